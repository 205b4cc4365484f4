//! Rate functions for random projections: the log-mgfs `Λ` and `Λ̄`, the
//! integrated log-mgf `Ψ_ν`, numerical Legendre conjugation, the quenched
//! and annealed good rate functions, and the variational formula tying them
//! together through the entropy functional ℍ_k.
//!
//! The quenched rate of the projections `n^{-1/2} aᵀ X^{(n)}` along a frame
//! sequence whose row-empirical measures converge to ν is
//!
//! ```text
//! J^qu_ν(x) = inf_{τ > 0} Ψ*_ν( x / ρ(τ), τ )
//! ```
//!
//! and the annealed rate (averaging over Haar frames) is
//!
//! ```text
//! J^an(x) = inf_{0 < c < 1} { J_X(‖x‖₂ / c) - ½ log(1 - c²) },
//! J_X(y)  = inf_{t₂ > 0} Λ̄*( y² / ρ²(t₂), t₂ ).
//! ```
//!
//! They satisfy `J^an(x) = inf_ν { J^qu_ν(x) + ℍ_k(ν) }`. The infimum over
//! all probability measures is not computable; `variational_rhs` minimizes
//! over centered Gaussians with covariance ⪯ I (diagonal in a frame aligned
//! with x), which yields an upper bound on the right-hand side — with
//! equality in the Gaussian base case, where the minimizer is γ^⊗k.
//!
//! Extended reals are values here: +∞ composes through every infimum and
//! supremum, and `converged` flags mark untrusted *finite* results.
//!
//! Families with `r ≡ 1` have a degenerate second coordinate: the
//! conjugates pin `τ = 1` (the mean of `r`) analytically and optimize the
//! remaining coordinates only.

mod logmgf;
mod psi;
mod solver;

pub use logmgf::{LogMgf, MgfDerivs, MgfKind};
pub use psi::{NuSpec, PsiEvaluator};
pub use solver::{
    legendre, legendre_from, minimize_scalar, nelder_mead, ConjugateResult, ScalarMin, SimplexMin,
    SmoothConvex, SolverConfig,
};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::MeasureFamily;
use crate::measures::{self, GaussianMeasure};

/// Lower endpoint guard for the positive scalar infima.
const TAU_FLOOR: f64 = 1e-9;
/// Widening cap for the positive scalar infima.
const TAU_CAP: f64 = 1e6;
/// Scan resolution before golden-section.
const SCAN_POINTS: usize = 16;

// ---------------------------------------------------------------------------
// Public evaluation ops
// ---------------------------------------------------------------------------

/// `Λ(s1, s2) = log E[exp(s1 ξ + s2 r(ξ))]`, +∞ outside `s2 < T`.
pub fn lambda_eval(family: &MeasureFamily, s1: f64, s2: f64) -> Result<f64> {
    LogMgf::plain(family).try_eval(s1, s2)
}

/// Gradient of `Λ`; `None` outside the domain.
pub fn lambda_grad(family: &MeasureFamily, s1: f64, s2: f64) -> Option<(f64, f64)> {
    LogMgf::plain(family).derivs(s1, s2).map(|d| (d.grad[0], d.grad[1]))
}

/// `Λ̄(s1, s2) = log E[exp(s1 ξ² + s2 r(ξ))]`.
pub fn lambda_bar_eval(family: &MeasureFamily, s1: f64, s2: f64) -> Result<f64> {
    LogMgf::squared(family).try_eval(s1, s2)
}

/// `Ψ_ν(t1, t2) = ∫ Λ(⟨t1, x⟩, t2) ν(dx)`.
pub fn psi_eval(nu: &NuSpec, family: &MeasureFamily, t1: &DVector<f64>, t2: f64) -> Result<f64> {
    Ok(PsiEvaluator::new(family, nu)?.eval(t1, t2))
}

// ---------------------------------------------------------------------------
// Conjugate-problem adapters
// ---------------------------------------------------------------------------

/// `Ψ_ν` as a function of `(t1, t2)` jointly.
pub struct PsiFull<'a> {
    pub psi: &'a PsiEvaluator,
}

impl SmoothConvex for PsiFull<'_> {
    fn dim(&self) -> usize {
        self.psi.k() + 1
    }
    fn eval(&self, t: &DVector<f64>) -> f64 {
        let (t1, t2) = split_last(t);
        self.psi.eval(&t1, t2)
    }
    fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let (t1, t2) = split_last(t);
        self.psi.derivs(&t1, t2)
    }
    fn max_feasible_step(&self, t: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let bound = self.psi.family().domain_bound();
        let k = t.len() - 1;
        if bound.is_finite() && d[k] > 0.0 {
            (bound - t[k]) / d[k]
        } else {
            f64::INFINITY
        }
    }
}

/// `t1 ↦ Ψ_ν(t1, t2)` at fixed `t2` (the whole story when `r ≡ 1`).
pub struct PsiSection<'a> {
    pub psi: &'a PsiEvaluator,
    pub t2: f64,
}

impl SmoothConvex for PsiSection<'_> {
    fn dim(&self) -> usize {
        self.psi.k()
    }
    fn eval(&self, t: &DVector<f64>) -> f64 {
        self.psi.eval(t, self.t2)
    }
    fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let k = self.psi.k();
        let (value, grad, hess) = self.psi.derivs(t, self.t2)?;
        Some((value, grad.rows(0, k).into_owned(), hess.view((0, 0), (k, k)).into_owned()))
    }
}

/// A joint log-mgf as a 2D convex function of `(s1, s2)`.
pub struct MgfFull {
    pub mgf: LogMgf,
}

impl SmoothConvex for MgfFull {
    fn dim(&self) -> usize {
        2
    }
    fn eval(&self, t: &DVector<f64>) -> f64 {
        self.mgf.eval(t[0], t[1])
    }
    fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.mgf.derivs(t[0], t[1])?;
        Some((
            d.value,
            DVector::from_row_slice(&d.grad),
            DMatrix::from_row_slice(
                2,
                2,
                &[d.hess[0][0], d.hess[0][1], d.hess[1][0], d.hess[1][1]],
            ),
        ))
    }
    fn max_feasible_step(&self, t: &DVector<f64>, d: &DVector<f64>) -> f64 {
        self.mgf.max_feasible_step(t[0], t[1], d[0], d[1])
    }
}

/// `s1 ↦ mgf(s1, s2)` at fixed `s2`.
pub struct MgfSection {
    pub mgf: LogMgf,
    pub s2: f64,
}

impl SmoothConvex for MgfSection {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, t: &DVector<f64>) -> f64 {
        self.mgf.eval(t[0], self.s2)
    }
    fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let d = self.mgf.derivs(t[0], self.s2)?;
        Some((
            d.value,
            DVector::from_vec(vec![d.grad[0]]),
            DMatrix::from_vec(1, 1, vec![d.hess[0][0]]),
        ))
    }
    fn max_feasible_step(&self, t: &DVector<f64>, d: &DVector<f64>) -> f64 {
        self.mgf.max_feasible_step(t[0], self.s2, d[0], 0.0)
    }
}

fn split_last(t: &DVector<f64>) -> (DVector<f64>, f64) {
    let k = t.len() - 1;
    (t.rows(0, k).into_owned(), t[k])
}

// ---------------------------------------------------------------------------
// Rate-function evaluations
// ---------------------------------------------------------------------------

/// One rate-function evaluation: an extended-real value with solver
/// diagnostics. The `converged` flag marks trustworthiness of *finite*
/// values; +∞ is a legitimate certified value.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatePoint {
    pub value: f64,
    pub converged: bool,
    /// Outer scalar minimizer: τ for the quenched rate, t₂ for `J_X`, c for
    /// the annealed rate. 1.0 when the coordinate is pinned analytically.
    pub outer_arg: Option<f64>,
    /// Argmax of the innermost conjugate problem at the outer minimizer.
    pub conjugate_arg: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

impl RatePoint {
    fn from_conjugate(conj: ConjugateResult, outer: Option<f64>) -> Self {
        RatePoint {
            value: conj.value,
            converged: conj.converged || conj.value.is_infinite(),
            outer_arg: outer,
            conjugate_arg: conj.argmax.iter().copied().collect(),
            iterations: conj.iterations,
            residual: conj.residual,
        }
    }

    fn infinite(outer: Option<f64>) -> Self {
        RatePoint {
            value: f64::INFINITY,
            converged: true,
            outer_arg: outer,
            conjugate_arg: Vec::new(),
            iterations: 0,
            residual: f64::NAN,
        }
    }
}

/// Bracket for the positive scalar infima over τ (or t₂): mean of `r(ξ)`
/// plus/minus six standard deviations, clipped away from zero. The scan
/// widens toward `TAU_FLOOR`/`TAU_CAP` only if the minimizer asks for it;
/// probing τ ≈ 0 up front is wasted work (the conjugate argmax runs off to
/// -∞ in its second coordinate there).
fn r_bracket(family: &MeasureFamily) -> (f64, f64) {
    let lo = (family.r_mean() - 6.0 * family.r_std()).max(0.02);
    let hi = family.r_mean() + 6.0 * family.r_std() + 1e-3;
    (lo, hi)
}

/// Quenched rate `J^qu_ν(x) = inf_{τ>0} Ψ*_ν(x/ρ(τ), τ)`.
///
/// For `r ≡ 1` the τ coordinate is degenerate and pinned to 1, leaving the
/// k-dimensional conjugate of `t1 ↦ Ψ_ν(t1, 0)` at x. Otherwise the
/// infimum runs over a bracketed golden-section with a full
/// (k+1)-dimensional Newton conjugation inside.
pub fn j_quenched(
    family: &MeasureFamily,
    nu: &NuSpec,
    x: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RatePoint> {
    let psi = PsiEvaluator::new(family, nu)?;
    if x.len() != psi.k() {
        return Err(Error::DimensionMismatch(format!(
            "x has dimension {}, ν lives on ℝ^{}",
            x.len(),
            psi.k()
        )));
    }
    if family.has_identity_r() {
        let section = PsiSection { psi: &psi, t2: 0.0 };
        let conj = legendre(&section, x, cfg);
        return Ok(RatePoint::from_conjugate(conj, Some(1.0)));
    }

    let p = family.p().expect("non-product family has p");
    let full = PsiFull { psi: &psi };
    let mut warm: Option<DVector<f64>> = None;
    let mut objective = |tau: f64| -> f64 {
        if tau <= 0.0 {
            return f64::INFINITY;
        }
        let target = conjugate_target(x, tau.powf(1.0 / p), tau);
        let res = legendre_from(&full, &target, cfg, warm.as_ref());
        if res.value.is_finite() {
            warm = Some(res.argmax.clone());
        }
        res.value
    };
    let (lo, hi) = r_bracket(family);
    let sm =
        minimize_scalar(&mut objective, lo, hi, SCAN_POINTS, cfg.golden_tol, TAU_FLOOR, TAU_CAP);
    if sm.x.is_nan() {
        return Ok(RatePoint::infinite(None));
    }
    let target = conjugate_target(x, sm.x.powf(1.0 / p), sm.x);
    let conj = legendre_from(&full, &target, cfg, warm.as_ref());
    let mut point = RatePoint::from_conjugate(conj, Some(sm.x));
    point.converged &= sm.converged;
    Ok(point)
}

fn conjugate_target(x: &DVector<f64>, scale: f64, last: f64) -> DVector<f64> {
    let k = x.len();
    let mut target = DVector::zeros(k + 1);
    for i in 0..k {
        target[i] = x[i] * scale;
    }
    target[k] = last;
    target
}

/// Rate of the scaled Euclidean norms `‖X^{(n)}‖₂/√n`:
/// `J_X(y) = inf_{t₂>0} Λ̄*(y²/ρ²(t₂), t₂)`, pinned to `t₂ = 1` for
/// `r ≡ 1`.
pub fn j_x(family: &MeasureFamily, y: f64, cfg: &SolverConfig) -> Result<RatePoint> {
    if y < 0.0 {
        return Err(Error::InvalidParameter("norms are nonnegative".into()));
    }
    let lbar = LogMgf::squared(family);
    let mut warm: Option<DVector<f64>> = None;
    Ok(j_x_inner(family, &lbar, y, cfg, &mut warm))
}

fn j_x_inner(
    family: &MeasureFamily,
    lbar: &LogMgf,
    y: f64,
    cfg: &SolverConfig,
    warm: &mut Option<DVector<f64>>,
) -> RatePoint {
    if family.has_identity_r() {
        let section = MgfSection { mgf: lbar.clone(), s2: 0.0 };
        let conj = legendre_from(&section, &DVector::from_vec(vec![y * y]), cfg, warm.as_ref());
        if conj.value.is_finite() {
            *warm = Some(conj.argmax.clone());
        }
        return RatePoint::from_conjugate(conj, Some(1.0));
    }
    let p = family.p().expect("non-product family has p");
    let full = MgfFull { mgf: lbar.clone() };
    let mut inner_warm = warm.clone();
    let mut objective = |t2: f64| -> f64 {
        if t2 <= 0.0 {
            return f64::INFINITY;
        }
        // ρ(t₂) = t₂^{-1/p}, so y²/ρ² = y² t₂^{2/p}
        let target = DVector::from_vec(vec![y * y * t2.powf(2.0 / p), t2]);
        let res = legendre_from(&full, &target, cfg, inner_warm.as_ref());
        if res.value.is_finite() {
            inner_warm = Some(res.argmax.clone());
        }
        res.value
    };
    let (lo, hi) = r_bracket(family);
    let sm =
        minimize_scalar(&mut objective, lo, hi, SCAN_POINTS, cfg.golden_tol, TAU_FLOOR, TAU_CAP);
    *warm = inner_warm;
    if sm.x.is_nan() {
        return RatePoint::infinite(None);
    }
    let target = DVector::from_vec(vec![y * y * sm.x.powf(2.0 / p), sm.x]);
    let conj = legendre_from(&full, &target, cfg, warm.as_ref());
    let mut point = RatePoint::from_conjugate(conj, Some(sm.x));
    point.converged &= sm.converged;
    point
}

/// Annealed rate `J^an(x) = inf_{0<c<1} { J_X(‖x‖₂/c) - ½ log(1-c²) }`.
///
/// The parametrization degenerates at the origin: there the rate is the
/// minimum of `J_X` over all norms (the c → 0 branch), which vanishes at
/// the law-of-large-numbers point.
pub fn j_annealed(
    family: &MeasureFamily,
    x: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<RatePoint> {
    let norm = x.norm();
    let lbar = LogMgf::squared(family);
    let mut warm: Option<DVector<f64>> = None;

    if norm < 1e-12 {
        let mut objective =
            |y: f64| -> f64 { j_x_inner(family, &lbar, y, cfg, &mut warm).value };
        let y_scale = family.xi_abs_moment(2.0).sqrt();
        let sm = minimize_scalar(
            &mut objective,
            (0.05 * y_scale).max(1e-4),
            3.0 * y_scale,
            SCAN_POINTS,
            cfg.golden_tol,
            TAU_FLOOR,
            TAU_CAP,
        );
        let inner = if sm.x.is_nan() {
            RatePoint::infinite(Some(0.0))
        } else {
            j_x_inner(family, &lbar, sm.x, cfg, &mut warm)
        };
        return Ok(RatePoint {
            value: sm.value,
            converged: inner.converged && sm.converged,
            outer_arg: Some(0.0),
            conjugate_arg: inner.conjugate_arg,
            iterations: inner.iterations,
            residual: inner.residual,
        });
    }

    let mut objective = |c: f64| -> f64 {
        if c <= 0.0 || c >= 1.0 {
            return f64::INFINITY;
        }
        let point = j_x_inner(family, &lbar, norm / c, cfg, &mut warm);
        point.value - 0.5 * (1.0 - c * c).ln()
    };
    let sm = minimize_scalar(
        &mut objective,
        1.0 / 64.0,
        1.0 - 1.0 / 64.0,
        48,
        cfg.golden_tol,
        1e-9,
        1.0 - 1e-12,
    );
    if sm.x.is_nan() {
        return Ok(RatePoint::infinite(None));
    }
    let inner = j_x_inner(family, &lbar, norm / sm.x, cfg, &mut warm);
    Ok(RatePoint {
        value: sm.value,
        converged: sm.converged && (inner.converged || sm.value.is_infinite()),
        outer_arg: Some(sm.x),
        conjugate_arg: inner.conjugate_arg,
        iterations: inner.iterations,
        residual: inner.residual,
    })
}

// ---------------------------------------------------------------------------
// Gaussian-family searches: the variational formula and Φ
// ---------------------------------------------------------------------------

/// Settings for the Nelder–Mead searches over the centered-Gaussian family.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", default)]
pub struct SearchConfig {
    pub max_evals: usize,
    pub starts: usize,
    pub f_tol: f64,
    /// Initial simplex scale in log-eigenvalue space.
    pub scale: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_evals: 200, starts: 3, f_tol: 1e-10, scale: 0.4 }
    }
}

/// Result of the variational-formula search.
#[derive(Debug, Clone)]
pub struct VariationalResult {
    /// Upper bound for `inf_ν { J^qu_ν(x) + ℍ_k(ν) }`, from the centered
    /// Gaussian subfamily with covariance ⪯ I.
    pub value: f64,
    pub argmin: GaussianMeasure,
    /// Eigenvalues of the argmin covariance in the x-aligned frame.
    pub argmin_sigma2: Vec<f64>,
    pub jqu_at_argmin: f64,
    pub hk_at_argmin: f64,
    pub converged: bool,
    pub evals: usize,
}

/// Orthogonal matrix whose first column is `x/‖x‖` (Householder
/// completion); identity when x vanishes.
fn aligned_rotation(x: &DVector<f64>) -> DMatrix<f64> {
    let k = x.len();
    let norm = x.norm();
    if norm < 1e-14 {
        return DMatrix::identity(k, k);
    }
    let xhat = x / norm;
    let mut v = -xhat.clone();
    v[0] += 1.0; // e1 - x̂
    let vnorm = v.norm();
    if vnorm < 1e-14 {
        return DMatrix::identity(k, k);
    }
    let v = v / vnorm;
    DMatrix::identity(k, k) - 2.0 * &v * v.transpose()
}

fn covariance_from_log_eigs(q: &DMatrix<f64>, lambda: &DVector<f64>) -> (DMatrix<f64>, Vec<f64>) {
    let k = lambda.len();
    let sigma2: Vec<f64> = lambda.iter().map(|l| l.exp().min(1.0)).collect();
    let diag = DMatrix::from_fn(k, k, |i, j| if i == j { sigma2[i] } else { 0.0 });
    let cov = q * diag * q.transpose();
    (crate::measures::SymMatrix::symmetrize(&cov).into_matrix(), sigma2)
}

/// Minimize `J^qu_ν(x) + ℍ_k(ν)` over centered Gaussians `ν = N(0, Σ)`
/// with `Σ ⪯ I` diagonal in a frame aligned with x, by Nelder–Mead over
/// log-eigenvalues with multiple starts.
///
/// The returned value is an upper bound on the infimum over all probability
/// measures; in the product-Gaussian family it is exact with argmin γ^⊗k.
pub fn variational_rhs(
    family: &MeasureFamily,
    x: &DVector<f64>,
    cfg: &SolverConfig,
    search: &SearchConfig,
) -> Result<VariationalResult> {
    let k = x.len();
    let q = aligned_rotation(x);

    let objective = |lambda: &DVector<f64>| -> f64 {
        let (cov, _) = covariance_from_log_eigs(&q, lambda);
        let Ok(nu) = GaussianMeasure::centered(cov) else {
            return f64::INFINITY;
        };
        let hk = measures::hk_gaussian(&nu);
        if hk.is_infinite() {
            return f64::INFINITY;
        }
        match j_quenched(family, &NuSpec::Gaussian(nu), x, cfg) {
            Ok(point) => point.value + hk,
            Err(_) => f64::INFINITY,
        }
    };

    let starts: Vec<DVector<f64>> = (0..search.starts.max(1))
        .map(|s| match s {
            0 => DVector::zeros(k),
            1 => DVector::from_element(k, (0.5f64).ln()),
            _ => DVector::from_fn(k, |i, _| if i % 2 == 0 { -0.05 } else { (0.7f64).ln() }),
        })
        .collect();
    let budget = search.max_evals / search.starts.max(1);
    let runs: Vec<SimplexMin> = starts
        .par_iter()
        .map(|x0| nelder_mead(objective, x0, search.scale, budget.max(20), search.f_tol))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r.clone())
        .expect("at least one start");

    let (cov, sigma2) = covariance_from_log_eigs(&q, &best.x);
    let argmin = GaussianMeasure::centered(cov)?;
    let hk = measures::hk_gaussian(&argmin);
    let jqu = j_quenched(family, &NuSpec::Gaussian(argmin.clone()), x, cfg)?;
    Ok(VariationalResult {
        value: best.value,
        argmin,
        argmin_sigma2: sigma2,
        jqu_at_argmin: jqu.value,
        hk_at_argmin: hk,
        converged: best.converged && jqu.converged,
        evals: runs.iter().map(|r| r.evals).sum(),
    })
}

/// Result of the Φ search (a lower bound: the supremum is restricted to
/// the centered-Gaussian slice of the compact set `∫‖x‖² dν ≤ k`).
#[derive(Debug, Clone)]
pub struct PhiResult {
    pub value: f64,
    pub argmax_sigma2: Vec<f64>,
    pub converged: bool,
    pub evals: usize,
}

/// `Φ(t1, t2) = sup_ν { Ψ_ν(t1, t2) - ℍ_k(ν) }` over the centered-Gaussian
/// subfamily with covariance ⪯ I; +∞ when `t2 ≥ T`.
pub fn phi_eval(
    family: &MeasureFamily,
    t1: &DVector<f64>,
    t2: f64,
    search: &SearchConfig,
) -> Result<PhiResult> {
    if t2 >= family.domain_bound() {
        return Ok(PhiResult {
            value: f64::INFINITY,
            argmax_sigma2: Vec::new(),
            converged: true,
            evals: 0,
        });
    }
    let k = t1.len();
    let q = aligned_rotation(t1);
    let objective = |lambda: &DVector<f64>| -> f64 {
        let (cov, _) = covariance_from_log_eigs(&q, lambda);
        let Ok(nu) = GaussianMeasure::centered(cov) else {
            return f64::INFINITY;
        };
        let hk = measures::hk_gaussian(&nu);
        if hk.is_infinite() {
            return f64::INFINITY;
        }
        match PsiEvaluator::new(family, &NuSpec::Gaussian(nu)) {
            Ok(psi) => hk - psi.eval(t1, t2),
            Err(_) => f64::INFINITY,
        }
    };
    let starts: Vec<DVector<f64>> = (0..search.starts.max(1))
        .map(|s| match s {
            0 => DVector::zeros(k),
            1 => DVector::from_element(k, (0.5f64).ln()),
            _ => DVector::from_fn(k, |i, _| if i % 2 == 0 { -0.05 } else { (0.8f64).ln() }),
        })
        .collect();
    let budget = search.max_evals / search.starts.max(1);
    let runs: Vec<SimplexMin> = starts
        .par_iter()
        .map(|x0| nelder_mead(objective, x0, search.scale, budget.max(20), search.f_tol))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)))
        .map(|(_, r)| r.clone())
        .expect("at least one start");
    let (_, sigma2) = covariance_from_log_eigs(&q, &best.x);
    Ok(PhiResult {
        value: -best.value,
        argmax_sigma2: sigma2,
        converged: best.converged,
        evals: runs.iter().map(|r| r.evals).sum(),
    })
}

/// Least-squares slope of `log Λ(s1, 0)` against `log s1` on a log-spaced
/// grid, used to verify the growth bound `Λ(s1, s2) ≤ C(1 + |s1|^{q⋆})`.
pub fn growth_exponent_fit(family: &MeasureFamily, s1_lo: f64, s1_hi: f64, points: usize) -> f64 {
    let l = LogMgf::plain(family);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for i in 0..points {
        let s1 = s1_lo * (s1_hi / s1_lo).powf(i as f64 / (points - 1) as f64);
        xs.push(s1.ln());
        ys.push(l.eval(s1, 0.0).ln());
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    cov / var
}

/// A grid of rate evaluations with provenance, ready for CSV export.
#[derive(Debug, Clone)]
pub struct RateCurve {
    pub family: MeasureFamily,
    pub nu_label: String,
    pub kind: RateKind,
    pub solver: SolverConfig,
    pub seed: u64,
    pub points: Vec<(Vec<f64>, RatePoint)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateKind {
    Quenched,
    Annealed,
}

impl RateKind {
    pub fn label(&self) -> &'static str {
        match self {
            RateKind::Quenched => "quenched",
            RateKind::Annealed => "annealed",
        }
    }
}
