//! Exact samplers: Haar frames on the Stiefel manifold via the Bartlett
//! decomposition, generalized p-normal scalars, and the cone/ball measures
//! on scaled lp spheres, plus the projection map `x ↦ n^{-1/2} Aᵀx`.
//!
//! The Bartlett route is the backbone: the QR factors of an n×k matrix of
//! i.i.d. standard Gaussians give a Haar-distributed orthonormal factor and
//! an upper-triangular factor whose diagonal entries are chi-distributed
//! with n-i+1 degrees of freedom. The sign convention matters: the diagonal
//! of `r` is kept strictly positive (the Gram–Schmidt convention), otherwise
//! the orthonormal factor is not Haar with the matching triangular factor.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};

use crate::error::{Error, Result};
use crate::family::{FamilyKind, MeasureFamily};

/// Orthonormality tolerance: `‖AᵀA - I‖_F ≤ ORTHONORMALITY_TOL · k`.
pub const ORTHONORMALITY_TOL: f64 = 1e-10;

/// Per-column unit-norm tolerance.
pub const COLUMN_NORM_TOL: f64 = 1e-12;

/// An n×k matrix with orthonormal columns (a k-frame in ℝⁿ).
#[derive(Debug, Clone, PartialEq)]
pub struct StiefelFrame {
    entries: DMatrix<f64>,
}

impl StiefelFrame {
    /// Wrap a matrix, validating the frame invariants.
    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        let (n, k) = entries.shape();
        if k == 0 || n <= k {
            return Err(Error::InvalidParameter(format!(
                "a k-frame needs n > k ≥ 1, got n={n}, k={k}"
            )));
        }
        let frame = StiefelFrame { entries };
        let defect = frame.orthonormality_defect();
        if defect > ORTHONORMALITY_TOL * k as f64 {
            return Err(Error::DegenerateInput(format!(
                "columns not orthonormal: ‖AᵀA - I‖_F = {defect:.3e}"
            )));
        }
        for j in 0..k {
            if (frame.entries.column(j).norm() - 1.0).abs() > COLUMN_NORM_TOL {
                return Err(Error::DegenerateInput(format!("column {j} is not unit norm")));
            }
        }
        Ok(frame)
    }

    /// The frame whose columns are the first k canonical basis vectors.
    pub fn canonical(n: usize, k: usize) -> Result<Self> {
        if k == 0 || n <= k {
            return Err(Error::InvalidParameter(format!(
                "a k-frame needs n > k ≥ 1, got n={n}, k={k}"
            )));
        }
        Ok(StiefelFrame { entries: DMatrix::identity(n, k) })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn k(&self) -> usize {
        self.entries.ncols()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// `‖AᵀA - I_k‖_F`.
    pub fn orthonormality_defect(&self) -> f64 {
        let k = self.k();
        let gram = self.entries.transpose() * &self.entries;
        (gram - DMatrix::identity(k, k)).norm()
    }
}

/// QR factors of a Gaussian matrix with the positive-diagonal convention.
#[derive(Debug, Clone)]
pub struct BartlettPair {
    pub q: StiefelFrame,
    pub r: DMatrix<f64>,
}

/// QR-factorize `z` by modified Gram–Schmidt with one reorthogonalization
/// pass, keeping the diagonal of `r` strictly positive.
///
/// Rank deficiency (a pivot below `1e-12 √n`) is reported as an error; for
/// matrices with i.i.d. Gaussian entries this happens with probability zero.
pub fn bartlett_qr(z: &DMatrix<f64>) -> Result<BartlettPair> {
    let (n, k) = z.shape();
    if k == 0 || n < k {
        return Err(Error::InvalidParameter(format!("need n ≥ k ≥ 1, got n={n}, k={k}")));
    }
    let mut q = z.clone();
    let mut r = DMatrix::zeros(k, k);
    let pivot_floor = 1e-12 * (n as f64).sqrt();
    for j in 0..k {
        // Two projection sweeps ("twice is enough") keep the frame
        // orthonormal to machine precision even at large n.
        for _pass in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let col_i = q.column(i).clone_owned();
                let mut col_j = q.column_mut(j);
                col_j.axpy(-proj, &col_i, 1.0);
                r[(i, j)] += proj;
            }
        }
        let norm = q.column(j).norm();
        if norm <= pivot_floor {
            return Err(Error::DegenerateInput(format!(
                "rank deficiency at column {j}: pivot {norm:.3e}"
            )));
        }
        r[(j, j)] = norm;
        q.column_mut(j).unscale_mut(norm);
    }
    Ok(BartlettPair { q: StiefelFrame { entries: q }, r })
}

/// Draw a frame from the Haar measure on the Stiefel manifold by
/// QR-factorizing an n×k matrix of i.i.d. standard Gaussians.
pub fn haar_stiefel(n: usize, k: usize, rng: &mut impl Rng) -> Result<StiefelFrame> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParameter(format!("need n > k ≥ 1, got n={n}, k={k}")));
    }
    let z = gaussian_matrix(n, k, rng);
    Ok(bartlett_qr(&z)?.q)
}

/// n×k matrix of i.i.d. standard Gaussians.
pub fn gaussian_matrix(n: usize, k: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    DMatrix::from_fn(n, k, |_, _| rng.sample(StandardNormal))
}

/// One draw from the generalized p-normal law (density ∝ e^{-|y|^p/p}),
/// realised as `S · (pG)^{1/p}` with `G ~ Gamma(1/p, 1)` and `S` a uniform
/// sign. Exact and constant-time; no rejection loop.
pub fn sample_p_normal(p: f64, rng: &mut impl Rng) -> f64 {
    debug_assert!(p > 1.0);
    let gamma = Gamma::new(1.0 / p, 1.0).expect("1/p is a valid shape");
    let g: f64 = gamma.sample(rng);
    let mag = (p * g).powf(1.0 / p);
    if rng.random::<bool>() {
        mag
    } else {
        -mag
    }
}

/// One draw of the n-dimensional vector `X^{(n)} = ξ^{(n)} ρ((1/n) Σ r(ξ_i))`.
///
/// For `cone-lp(p)` the construction enforces `Σ |X_i|^p = n` up to
/// floating-point roundoff; `ball-lp(p)` additionally shrinks by `U^{1/n}`.
pub fn sample_x(family: &MeasureFamily, n: usize, rng: &mut impl Rng) -> DVector<f64> {
    match family.kind {
        FamilyKind::ProductGaussian => DVector::from_fn(n, |_, _| rng.sample(StandardNormal)),
        FamilyKind::ProductCustom { p } => DVector::from_fn(n, |_, _| sample_p_normal(p, rng)),
        FamilyKind::ConeLp { p } => cone_sample(p, n, rng),
        FamilyKind::BallLp { p } => {
            let x = cone_sample(p, n, rng);
            scale_to_ball(x, rng)
        }
    }
}

fn cone_sample(p: f64, n: usize, rng: &mut impl Rng) -> DVector<f64> {
    let xi = DVector::from_fn(n, |_, _| sample_p_normal(p, rng));
    let mean_r = xi.iter().map(|y| y.abs().powf(p)).sum::<f64>() / n as f64;
    // ρ(y) = y^{-1/p}
    let scale = mean_r.powf(-1.0 / p);
    xi * scale
}

/// Shrink a cone sample into the scaled lp ball: `x ↦ U^{1/n} x` with `U`
/// uniform on [0, 1]. The pushforward of the cone measure under this map is
/// the uniform distribution on the ball.
pub fn scale_to_ball(x: DVector<f64>, rng: &mut impl Rng) -> DVector<f64> {
    let n = x.len();
    let u: f64 = rng.random();
    x * u.powf(1.0 / n as f64)
}

/// The projected k-vector `n^{-1/2} aᵀ x`.
pub fn project(a: &StiefelFrame, x: &DVector<f64>) -> Result<DVector<f64>> {
    if x.len() != a.n() {
        return Err(Error::DimensionMismatch(format!(
            "frame has n={}, vector has length {}",
            a.n(),
            x.len()
        )));
    }
    Ok((a.entries.transpose() * x) / (a.n() as f64).sqrt())
}
