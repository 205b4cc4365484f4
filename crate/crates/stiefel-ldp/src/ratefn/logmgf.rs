//! Log moment-generating functions of `(ξ, r(ξ))` and `(ξ², r(ξ))`.
//!
//! `Λ(s1, s2) = log E[exp(s1 ξ + s2 r(ξ))]` and
//! `Λ̄(s1, s2) = log E[exp(s1 ξ² + s2 r(ξ))]`.
//!
//! The product-Gaussian family has closed forms; the p-normal based
//! families are evaluated by adaptive Gauss–Kronrod quadrature of the
//! tilted density. One quadrature pass yields the value together with both
//! first derivatives (tilted means) and the full 2×2 Hessian (the tilted
//! covariance of `(ξ, r(ξ))`), which is what the Newton conjugation needs.

use crate::error::{Error, Result};
use crate::family::{FamilyKind, MeasureFamily};
use crate::quad::adaptive_gk_panels;

/// Integrand values below this fraction of the peak are truncated away when
/// choosing the integration window.
const LOG_TAIL_CUTOFF: f64 = -45.0;

/// Relative quadrature tolerance for the tilted-moment integrals.
const QUAD_REL_TOL: f64 = 1e-11;

/// Value, gradient and Hessian of a log-mgf at one point of its domain.
#[derive(Debug, Clone, Copy)]
pub struct MgfDerivs {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [[f64; 2]; 2],
}

/// Which joint log-mgf: of `(ξ, r(ξ))` or of `(ξ², r(ξ))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MgfKind {
    Plain,
    Squared,
}

/// Evaluator for `Λ` or `Λ̄` of a measure family.
#[derive(Debug, Clone)]
pub struct LogMgf {
    family: MeasureFamily,
    kind: MgfKind,
}

impl LogMgf {
    pub fn plain(family: &MeasureFamily) -> Self {
        LogMgf { family: family.clone(), kind: MgfKind::Plain }
    }

    pub fn squared(family: &MeasureFamily) -> Self {
        LogMgf { family: family.clone(), kind: MgfKind::Squared }
    }

    pub fn family(&self) -> &MeasureFamily {
        &self.family
    }

    /// Domain bound of the second argument (`T`), +∞ for product families.
    pub fn domain_bound(&self) -> f64 {
        self.family.domain_bound()
    }

    pub fn in_domain(&self, s1: f64, s2: f64) -> bool {
        if !s1.is_finite() || !s2.is_finite() {
            return false;
        }
        match (self.kind, self.family.kind) {
            (MgfKind::Plain, FamilyKind::ProductGaussian) => true,
            (MgfKind::Plain, FamilyKind::ProductCustom { .. }) => true,
            (MgfKind::Plain, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => s2 < 1.0 / p,
            (MgfKind::Squared, FamilyKind::ProductGaussian) => s1 < 0.5,
            (MgfKind::Squared, FamilyKind::ProductCustom { p }) => squared_domain(p, s1, 0.0),
            (MgfKind::Squared, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                squared_domain(p, s1, s2)
            }
        }
    }

    /// Extended-real evaluation: +∞ outside the domain.
    pub fn eval(&self, s1: f64, s2: f64) -> f64 {
        match self.derivs(s1, s2) {
            Some(d) => d.value,
            None => f64::INFINITY,
        }
    }

    /// Value with gradient and Hessian; `None` outside the domain.
    pub fn derivs(&self, s1: f64, s2: f64) -> Option<MgfDerivs> {
        if !self.in_domain(s1, s2) {
            return None;
        }
        Some(match (self.kind, self.family.kind) {
            (MgfKind::Plain, FamilyKind::ProductGaussian) => MgfDerivs {
                value: 0.5 * s1 * s1 + s2,
                grad: [s1, 1.0],
                hess: [[1.0, 0.0], [0.0, 0.0]],
            },
            (MgfKind::Squared, FamilyKind::ProductGaussian) => {
                let d = 1.0 - 2.0 * s1;
                MgfDerivs {
                    value: -0.5 * d.ln() + s2,
                    grad: [1.0 / d, 1.0],
                    hess: [[2.0 / (d * d), 0.0], [0.0, 0.0]],
                }
            }
            (MgfKind::Plain, FamilyKind::ProductCustom { p }) => {
                let m = plain_tilted_moments(p, s1, -1.0 / p);
                MgfDerivs {
                    value: m.log_mass + s2,
                    grad: [m.mean_a, 1.0],
                    hess: [[m.var_a, 0.0], [0.0, 0.0]],
                }
            }
            (MgfKind::Squared, FamilyKind::ProductCustom { p }) => {
                let m = squared_tilted_moments(p, s1, -1.0 / p);
                MgfDerivs {
                    value: m.log_mass + s2,
                    grad: [m.mean_a, 1.0],
                    hess: [[m.var_a, 0.0], [0.0, 0.0]],
                }
            }
            (MgfKind::Plain, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                let m = plain_tilted_moments(p, s1, s2 - 1.0 / p);
                MgfDerivs {
                    value: m.log_mass,
                    grad: [m.mean_a, m.mean_r],
                    hess: [[m.var_a, m.cov_ar], [m.cov_ar, m.var_r]],
                }
            }
            (MgfKind::Squared, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                let m = squared_tilted_moments(p, s1, s2 - 1.0 / p);
                MgfDerivs {
                    value: m.log_mass,
                    grad: [m.mean_a, m.mean_r],
                    hess: [[m.var_a, m.cov_ar], [m.cov_ar, m.var_r]],
                }
            }
        })
    }

    /// Largest step from `(s1, s2)` along `(d1, d2)` before leaving the
    /// domain; +∞ when unconstrained in that direction.
    pub fn max_feasible_step(&self, s1: f64, s2: f64, d1: f64, d2: f64) -> f64 {
        let ray = |boundary: f64, pos: f64, dir: f64| -> f64 {
            if dir > 0.0 {
                (boundary - pos) / dir
            } else {
                f64::INFINITY
            }
        };
        match (self.kind, self.family.kind) {
            (MgfKind::Plain, FamilyKind::ProductGaussian | FamilyKind::ProductCustom { .. }) => {
                f64::INFINITY
            }
            (MgfKind::Plain, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                ray(1.0 / p, s2, d2)
            }
            (MgfKind::Squared, FamilyKind::ProductGaussian) => ray(0.5, s1, d1),
            (MgfKind::Squared, FamilyKind::ProductCustom { p }) => {
                if p > 2.0 {
                    f64::INFINITY
                } else if p == 2.0 {
                    ray(0.5, s1, d1)
                } else {
                    ray(0.0, s1, d1)
                }
            }
            (MgfKind::Squared, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                if p > 2.0 {
                    ray(1.0 / p, s2, d2)
                } else if p == 2.0 {
                    ray(0.5, s1 + s2, d1 + d2)
                } else {
                    ray(0.0, s1, d1).min(ray(1.0 / p, s2, d2))
                }
            }
        }
    }

    /// Strict variant surfacing quadrature non-convergence with the partial
    /// value attached.
    pub fn try_eval(&self, s1: f64, s2: f64) -> Result<f64> {
        if !self.in_domain(s1, s2) {
            return Ok(f64::INFINITY);
        }
        // quadrature families funnel through the same moment machinery
        let check = match (self.kind, self.family.kind) {
            (_, FamilyKind::ProductGaussian) => None,
            (MgfKind::Plain, FamilyKind::ProductCustom { p }) => {
                Some(plain_tilted_moments_checked(p, s1, -1.0 / p))
            }
            (MgfKind::Squared, FamilyKind::ProductCustom { p }) => {
                Some(squared_tilted_moments_checked(p, s1, -1.0 / p))
            }
            (MgfKind::Plain, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                Some(plain_tilted_moments_checked(p, s1, s2 - 1.0 / p))
            }
            (MgfKind::Squared, FamilyKind::ConeLp { p } | FamilyKind::BallLp { p }) => {
                Some(squared_tilted_moments_checked(p, s1, s2 - 1.0 / p))
            }
        };
        match check {
            None => Ok(self.eval(s1, s2)),
            Some((m, converged, err)) => {
                let shift = if self.family.has_identity_r() { s2 } else { 0.0 };
                if converged {
                    Ok(m.log_mass + shift)
                } else {
                    Err(Error::QuadratureNonConvergence { partial: m.log_mass + shift, error: err })
                }
            }
        }
    }
}

fn squared_domain(p: f64, s1: f64, s2: f64) -> bool {
    if p > 2.0 {
        s2 < 1.0 / p
    } else if p == 2.0 {
        s1 + s2 < 0.5
    } else {
        // heavier-than-Gaussian tails: ξ² is never exponentially integrable
        // with a positive coefficient
        s1 < 0.0 || (s1 == 0.0 && s2 < 1.0 / p)
    }
}

/// Normalized moments of `(a(y), r(y))` under the tilted weight
/// `exp(g(y))`, where `a` is the linear (`y`) or square (`y²`) statistic,
/// `r(y) = |y|^p`, and `log_mass` already subtracts the p-normal normalizer.
#[derive(Debug, Clone, Copy)]
struct TiltedMoments {
    log_mass: f64,
    mean_a: f64,
    mean_r: f64,
    var_a: f64,
    var_r: f64,
    cov_ar: f64,
}

/// `|y|^p` with a multiply-only path for small integer p (the lp families
/// of interest sit at p = 2, 3, 4 and the quadrature spends its time here).
#[derive(Clone, Copy)]
enum AbsPow {
    Int(i32),
    Frac(f64),
}

impl AbsPow {
    fn of(p: f64) -> Self {
        if p.fract() == 0.0 && (2.0..=8.0).contains(&p) {
            AbsPow::Int(p as i32)
        } else {
            AbsPow::Frac(p)
        }
    }

    #[inline]
    fn apply(self, y: f64) -> f64 {
        match self {
            AbsPow::Int(i) => y.abs().powi(i),
            AbsPow::Frac(p) => y.abs().powf(p),
        }
    }
}

/// Moments for `Λ`: weight `exp(s1 y + c |y|^p)` with `c < 0`.
fn plain_tilted_moments(p: f64, s1: f64, c: f64) -> TiltedMoments {
    plain_tilted_moments_checked(p, s1, c).0
}

fn plain_tilted_moments_checked(p: f64, s1: f64, c: f64) -> (TiltedMoments, bool, f64) {
    debug_assert!(c < 0.0);
    let rp = AbsPow::of(p);
    let g = move |y: f64| s1 * y + c * rp.apply(y);
    // stationary point of the exponent
    let mode = if s1 == 0.0 {
        0.0
    } else {
        s1.signum() * (s1.abs() / (p * c.abs())).powf(1.0 / (p - 1.0))
    };
    let gmax = g(mode);
    let lo = expand_cutoff(&g, gmax, mode, -1.0);
    let hi = expand_cutoff(&g, gmax, mode, 1.0);
    let out = adaptive_gk_panels(
        |y| {
            let w = (g(y) - gmax).exp();
            let r = rp.apply(y);
            [w, y * w, y * y * w, r * w, r * r * w, y * r * w]
        },
        &peak_panels(lo, mode, hi),
        QUAD_REL_TOL,
    );
    let [mass, my, my2, mr, mr2, myr] = out.values;
    let log_norm = crate::family::p_normal_log_normalizer(p);
    let mean_a = my / mass;
    let mean_r = mr / mass;
    let moments = TiltedMoments {
        log_mass: gmax + mass.ln() - log_norm,
        mean_a,
        mean_r,
        var_a: (my2 / mass - mean_a * mean_a).max(0.0),
        var_r: (mr2 / mass - mean_r * mean_r).max(0.0),
        cov_ar: myr / mass - mean_a * mean_r,
    };
    (moments, out.converged, out.error / mass.max(1e-300))
}

/// Moments for `Λ̄`: weight `exp(s1 y² + c |y|^p)`, symmetric in y, so the
/// half-line integral is doubled and the statistic is `a = y²`.
fn squared_tilted_moments(p: f64, s1: f64, c: f64) -> TiltedMoments {
    squared_tilted_moments_checked(p, s1, c).0
}

fn squared_tilted_moments_checked(p: f64, s1: f64, c: f64) -> (TiltedMoments, bool, f64) {
    let rp = AbsPow::of(p);
    let g = move |y: f64| s1 * y * y + c * rp.apply(y);
    let mode = if s1 <= 0.0 || (p - 2.0).abs() < 1e-12 {
        0.0
    } else {
        (2.0 * s1 / (p * c.abs())).powf(1.0 / (p - 2.0))
    };
    let gmax = g(mode);
    let hi = expand_cutoff(&g, gmax, mode, 1.0);
    let lo = if mode > 0.0 { (expand_cutoff(&g, gmax, mode, -1.0)).max(0.0) } else { 0.0 };
    let out = adaptive_gk_panels(
        |y| {
            let w = (g(y) - gmax).exp();
            let a = y * y;
            let r = rp.apply(y);
            [w, a * w, a * a * w, r * w, r * r * w, a * r * w]
        },
        &peak_panels(lo, mode, hi),
        QUAD_REL_TOL,
    );
    let [mass, ma, ma2, mr, mr2, mar] = out.values;
    let log_norm = crate::family::p_normal_log_normalizer(p);
    let mean_a = ma / mass;
    let mean_r = mr / mass;
    // the doubling factor cancels in every normalized moment
    let moments = TiltedMoments {
        log_mass: gmax + (2.0 * mass).ln() - log_norm,
        mean_a,
        mean_r,
        var_a: (ma2 / mass - mean_a * mean_a).max(0.0),
        var_r: (mr2 / mass - mean_r * mean_r).max(0.0),
        cov_ar: mar / mass - mean_a * mean_r,
    };
    (moments, out.converged, out.error / mass.max(1e-300))
}

/// Walk outward from the mode, doubling the step, until the exponent drops
/// `LOG_TAIL_CUTOFF` below its peak.
fn expand_cutoff(g: &impl Fn(f64) -> f64, gmax: f64, mode: f64, direction: f64) -> f64 {
    let mut step = 0.25 * (1.0 + mode.abs());
    let mut y = mode;
    for _ in 0..200 {
        let cand = mode + direction * step;
        y = cand;
        if g(cand) - gmax < LOG_TAIL_CUTOFF {
            return cand;
        }
        step *= 2.0;
    }
    y
}

/// Initial panel boundaries concentrated geometrically around the peak, so
/// the adaptive pass starts close to resolved.
fn peak_panels(lo: f64, mode: f64, hi: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi, mode];
    for frac in [0.5, 0.25, 0.0625] {
        pts.push(mode + (hi - mode) * frac);
        pts.push(mode - (mode - lo) * frac);
    }
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts.retain(|&x| (lo..=hi).contains(&x));
    pts
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_stream;
    use crate::samplers::sample_p_normal;

    fn gaussian() -> MeasureFamily {
        MeasureFamily::product_gaussian()
    }

    fn cone(p: f64) -> MeasureFamily {
        MeasureFamily::cone_lp(p).unwrap()
    }

    #[test]
    fn closed_forms_for_the_gaussian_family() {
        let l = LogMgf::plain(&gaussian());
        assert_eq!(l.eval(0.0, 0.0), 0.0);
        assert!((l.eval(1.0, 0.0) - 0.5).abs() < 1e-15);
        assert!((l.eval(2.0, 0.3) - 2.3).abs() < 1e-15);

        let lb = LogMgf::squared(&gaussian());
        assert_eq!(lb.eval(0.0, 0.0), 0.0);
        assert!((lb.eval(0.25, 0.0) - 0.5f64.ln().abs()).abs() < 1e-12);
        assert_eq!(lb.eval(0.5, 0.0), f64::INFINITY);
        assert_eq!(lb.eval(0.7, -1.0), f64::INFINITY);
    }

    #[test]
    fn lambda_vanishes_at_origin_for_every_family() {
        for family in [
            gaussian(),
            MeasureFamily::product_custom(3.0).unwrap(),
            cone(1.5),
            cone(2.0),
            cone(3.0),
            MeasureFamily::ball_lp(3.0).unwrap(),
        ] {
            let l = LogMgf::plain(&family);
            assert!(l.eval(0.0, 0.0).abs() < 1e-10, "family {}", family.name());
            let lb = LogMgf::squared(&family);
            assert!(lb.eval(0.0, 0.0).abs() < 1e-10, "family {}", family.name());
        }
    }

    #[test]
    fn cone_domain_boundary_in_the_second_argument() {
        let l = LogMgf::plain(&cone(3.0));
        assert_eq!(l.eval(0.5, 1.0 / 3.0), f64::INFINITY);
        assert_eq!(l.eval(0.5, 0.4), f64::INFINITY);
        assert!(l.eval(0.5, 0.3).is_finite());
    }

    #[test]
    fn squared_domain_depends_on_p() {
        // p = 2: s1 + s2 < 1/2
        let lb2 = LogMgf::squared(&cone(2.0));
        assert!(lb2.eval(0.3, 0.1).is_finite());
        assert_eq!(lb2.eval(0.3, 0.2), f64::INFINITY);
        // p > 2: any s1, s2 < 1/p
        let lb3 = LogMgf::squared(&cone(3.0));
        assert!(lb3.eval(5.0, 0.2).is_finite());
        assert_eq!(lb3.eval(5.0, 0.34), f64::INFINITY);
        // p < 2: needs s1 ≤ 0
        let lb15 = LogMgf::squared(&cone(1.5));
        assert!(lb15.eval(-0.3, 0.1).is_finite());
        assert_eq!(lb15.eval(0.05, 0.0), f64::INFINITY);
    }

    #[test]
    fn cone_p2_log_mgf_matches_monte_carlo() {
        // log E[exp(s1 ξ + s2 ξ²)] for the 2-normal against 10⁶ samples
        let l = LogMgf::plain(&cone(2.0));
        let (s1, s2) = (0.5, 0.1);
        let analytic = l.eval(s1, s2);
        let m = 1_000_000;
        let mut rng = sample_stream(31, 0);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..m {
            let xi = sample_p_normal(2.0, &mut rng);
            let v = (s1 * xi + s2 * xi * xi).exp();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / m as f64;
        let sd = (sumsq / m as f64 - mean * mean).sqrt();
        let se_log = sd / mean / (m as f64).sqrt();
        assert!(
            (analytic - mean.ln()).abs() < 3.0 * se_log,
            "analytic {analytic} vs MC {} ± {se_log}",
            mean.ln()
        );
    }

    #[test]
    fn cone_p3_squared_log_mgf_matches_monte_carlo() {
        let lb = LogMgf::squared(&cone(3.0));
        let (s1, s2) = (0.1, 0.05);
        let analytic = lb.eval(s1, s2);
        let m = 1_000_000;
        let mut rng = sample_stream(31, 1);
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..m {
            let xi = sample_p_normal(3.0, &mut rng);
            let v = (s1 * xi * xi + s2 * xi.abs().powi(3)).exp();
            sum += v;
            sumsq += v * v;
        }
        let mean = sum / m as f64;
        let sd = (sumsq / m as f64 - mean * mean).sqrt();
        let se_log = sd / mean / (m as f64).sqrt();
        assert!(
            (analytic - mean.ln()).abs() < 3.0 * se_log,
            "analytic {analytic} vs MC {} ± {se_log}",
            mean.ln()
        );
    }

    #[test]
    fn gradients_match_central_differences() {
        let mut rng = sample_stream(31, 2);
        use rand::Rng;
        let step = 1e-5;
        for trial in 0..100 {
            let family = if trial % 2 == 0 { cone(3.0) } else { cone(2.5) };
            let l = LogMgf::plain(&family);
            let s1: f64 = rng.random_range(-3.0..3.0);
            let s2: f64 = rng.random_range(-2.0..(1.0 / 3.0 - 0.05));
            let d = l.derivs(s1, s2).unwrap();
            let fd1 = (l.eval(s1 + step, s2) - l.eval(s1 - step, s2)) / (2.0 * step);
            let fd2 = (l.eval(s1, s2 + step) - l.eval(s1, s2 - step)) / (2.0 * step);
            let scale1 = 1.0 + d.grad[0].abs();
            let scale2 = 1.0 + d.grad[1].abs();
            assert!((d.grad[0] - fd1).abs() / scale1 < 1e-6, "∂1 {} vs {fd1}", d.grad[0]);
            assert!((d.grad[1] - fd2).abs() / scale2 < 1e-6, "∂2 {} vs {fd2}", d.grad[1]);
        }
    }

    #[test]
    fn hessian_matches_finite_differences_of_the_gradient() {
        let l = LogMgf::plain(&cone(3.0));
        let (s1, s2) = (0.7, 0.1);
        let d = l.derivs(s1, s2).unwrap();
        let step = 1e-5;
        let gp = l.derivs(s1 + step, s2).unwrap();
        let gm = l.derivs(s1 - step, s2).unwrap();
        assert!(((gp.grad[0] - gm.grad[0]) / (2.0 * step) - d.hess[0][0]).abs() < 1e-6);
        assert!(((gp.grad[1] - gm.grad[1]) / (2.0 * step) - d.hess[0][1]).abs() < 1e-6);
        let gp2 = l.derivs(s1, s2 + step).unwrap();
        let gm2 = l.derivs(s1, s2 - step).unwrap();
        assert!(((gp2.grad[1] - gm2.grad[1]) / (2.0 * step) - d.hess[1][1]).abs() < 1e-6);
    }

    #[test]
    fn convexity_on_random_midpoints() {
        let mut rng = sample_stream(31, 3);
        use rand::Rng;
        for family in [cone(3.0), MeasureFamily::product_custom(2.5).unwrap()] {
            let l = LogMgf::plain(&family);
            let t = family.domain_bound();
            for _ in 0..50 {
                let a = (
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-3.0..t.min(10.0) - 0.05),
                );
                let b = (
                    rng.random_range(-4.0..4.0),
                    rng.random_range(-3.0..t.min(10.0) - 0.05),
                );
                let mid = l.eval(0.5 * (a.0 + b.0), 0.5 * (a.1 + b.1));
                let avg = 0.5 * (l.eval(a.0, a.1) + l.eval(b.0, b.1));
                assert!(mid <= avg + 1e-9, "convexity violated: {mid} > {avg}");
            }
        }
    }

    #[test]
    fn symmetry_in_the_first_argument() {
        for family in [gaussian(), cone(3.0), MeasureFamily::product_custom(1.7).unwrap()] {
            let l = LogMgf::plain(&family);
            for s1 in [0.3, 1.1, 2.7] {
                let plus = l.eval(s1, 0.05_f64.min(family.domain_bound() - 0.3));
                let minus = l.eval(-s1, 0.05_f64.min(family.domain_bound() - 0.3));
                assert!((plus - minus).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn growth_exponent_of_the_cone_p3_mgf() {
        // Λ(s1, 0) ~ const · s1^{3/2}: fitted slope on [10, 10⁴] in [1.4, 1.6]
        let l = LogMgf::plain(&cone(3.0));
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut s1 = 10.0f64;
        while s1 <= 1.0e4 + 1.0 {
            xs.push(s1.ln());
            ys.push(l.eval(s1, 0.0).ln());
            s1 *= 10.0f64.powf(0.25);
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let slope = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (x - mx) * (y - my))
            .sum::<f64>()
            / xs.iter().map(|x| (x - mx) * (x - mx)).sum::<f64>();
        assert!((1.4..=1.6).contains(&slope), "fitted exponent {slope}");
    }

    #[test]
    fn try_eval_reports_infinite_points_as_values() {
        let l = LogMgf::plain(&cone(3.0));
        assert_eq!(l.try_eval(0.1, 0.5).unwrap(), f64::INFINITY);
        assert!(l.try_eval(0.1, 0.1).unwrap().is_finite());
    }
}
