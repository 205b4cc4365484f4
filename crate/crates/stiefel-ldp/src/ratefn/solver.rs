//! Numerical optimization kernels: damped-Newton Legendre conjugation,
//! golden-section line minimization with a bracketing pre-scan, and a small
//! Nelder–Mead simplex for the Gaussian-family searches.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

/// Solver settings shared by the rate-function evaluators.
///
/// JSON form: `{"newtonTol":1e-10,"maxIter":200,"goldenTol":1e-8}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "camelCase", default)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iter: usize,
    pub golden_tol: f64,
    /// Unboundedness is certified when the concave objective exceeds the
    /// reciprocal of this threshold.
    pub infinity_threshold: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { newton_tol: 1e-10, max_iter: 200, golden_tol: 1e-8, infinity_threshold: 1e-12 }
    }
}

/// A smooth convex function with gradient and Hessian, finite on an open
/// domain and +∞ outside it.
pub trait SmoothConvex {
    fn dim(&self) -> usize;
    /// Extended-real evaluation.
    fn eval(&self, t: &DVector<f64>) -> f64;
    /// Value, gradient, Hessian; `None` outside the domain.
    fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)>;
    /// Largest step along `d` from `t` that stays inside the domain
    /// (+∞ when the domain is all of ℝ^m). Lets the line search snap to a
    /// fraction of the boundary gap instead of halving its way there.
    fn max_feasible_step(&self, t: &DVector<f64>, d: &DVector<f64>) -> f64 {
        let _ = (t, d);
        f64::INFINITY
    }
}

/// Outcome of a conjugate (Legendre transform) evaluation
/// `f*(τ) = sup_t { ⟨t, τ⟩ - f(t) }`.
#[derive(Debug, Clone)]
pub struct ConjugateResult {
    pub value: f64,
    pub argmax: DVector<f64>,
    pub converged: bool,
    pub iterations: usize,
    /// Gradient norm of the concave objective at the returned point.
    pub residual: f64,
}

/// Legendre transform by damped Newton ascent from the origin.
pub fn legendre(f: &dyn SmoothConvex, tau: &DVector<f64>, cfg: &SolverConfig) -> ConjugateResult {
    legendre_from(f, tau, cfg, None)
}

/// Residual level at which a stalled iteration still counts as converged:
/// near the optimum of an ill-scaled problem the objective improvement per
/// step drops below f64 resolution long before the gradient reaches the
/// primary tolerance.
const STALL_RESIDUAL_ACCEPT: f64 = 1e-8;

/// Legendre transform with an optional warm start (used by the nested
/// one-dimensional infima, where consecutive targets are close).
pub fn legendre_from(
    f: &dyn SmoothConvex,
    tau: &DVector<f64>,
    cfg: &SolverConfig,
    start: Option<&DVector<f64>>,
) -> ConjugateResult {
    let dim = f.dim();
    assert_eq!(tau.len(), dim, "target dimension mismatch");
    let unbounded_cap = 1.0 / cfg.infinity_threshold;
    // take the better of the warm start and the origin, so the returned
    // value can never undercut the trivial bound f*(τ) ≥ -f(0)
    let origin = DVector::zeros(dim);
    let mut t = match start {
        Some(s) if s.len() == dim && f.eval(s).is_finite() => {
            let warm_obj = tau.dot(s) - f.eval(s);
            let origin_obj = -f.eval(&origin);
            if warm_obj >= origin_obj {
                s.clone()
            } else {
                origin
            }
        }
        _ => origin,
    };
    let grad_scale = 1.0 + tau.norm();
    let mut residual = f64::INFINITY;
    let mut progress_mark = f64::NEG_INFINITY;
    let mut stagnant = 0usize;
    // best iterate seen, by objective value (unguarded Newton steps in the
    // endgame are not monotone)
    let mut best: Option<(f64, DVector<f64>, f64)> = None;
    let finish = |best: Option<(f64, DVector<f64>, f64)>,
                  obj: f64,
                  t: DVector<f64>,
                  residual: f64,
                  iterations: usize| {
        let (value, argmax, residual) = match best {
            Some((b_obj, b_t, b_res)) if b_obj > obj => (b_obj, b_t, b_res),
            _ => (obj, t, residual),
        };
        let converged = residual <= STALL_RESIDUAL_ACCEPT * grad_scale;
        ConjugateResult { value, argmax, converged, iterations, residual }
    };
    for iter in 0..cfg.max_iter {
        let Some((fv, grad, hess)) = f.derivs(&t) else {
            // start fell outside the domain: retreat halfway to the origin
            t *= 0.5;
            continue;
        };
        let obj = tau.dot(&t) - fv;
        if obj > unbounded_cap {
            return ConjugateResult {
                value: f64::INFINITY,
                argmax: t,
                converged: false,
                iterations: iter,
                residual,
            };
        }
        let ascent = tau - &grad;
        residual = ascent.norm();
        if best.as_ref().map_or(true, |(b, _, _)| obj > *b) {
            best = Some((obj, t.clone(), residual));
        }
        if residual <= cfg.newton_tol * grad_scale {
            return ConjugateResult {
                value: obj,
                argmax: t,
                converged: true,
                iterations: iter,
                residual,
            };
        }
        // objective progress below f64 resolution for several consecutive
        // iterations marks the accuracy floor (gradient noise); accept the
        // best point seen instead of burning the iteration budget
        if obj > progress_mark + 1e-13 * (1.0 + obj.abs()) {
            progress_mark = obj;
            stagnant = 0;
        } else {
            stagnant += 1;
            if stagnant >= 4 {
                return finish(best, obj, t, residual, iter);
            }
        }

        let direction = newton_direction(&hess, &ascent);
        // fall back to plain gradient ascent if the model is useless
        let direction = if ascent.dot(&direction) > 0.0 { direction } else { ascent.clone() };
        let slope = ascent.dot(&direction);

        // never start the search outside the domain: snap to a fraction of
        // the gap to the boundary, then retreat by halving
        let feasible_cap = f.max_feasible_step(&t, &direction);
        let step0 = if feasible_cap.is_finite() { (0.9 * feasible_cap).min(1.0) } else { 1.0 };

        // inside the quadratic-convergence zone objective improvements sink
        // below f64 resolution and Armijo cannot certify them; take the
        // plain Newton step and let the stagnation guard terminate. A small
        // decrement alone does not mean the zone is reached (stiff Hessians
        // shrink it too), so require a small residual as well.
        if slope <= 1e-9 * (1.0 + obj.abs()) && residual <= 1e-4 * grad_scale {
            let cand = &t + &direction * step0;
            if f.eval(&cand).is_finite() {
                t = cand;
                continue;
            }
        }

        let mut step = step0;
        let mut accepted = false;
        for _ in 0..60 {
            let cand = &t + &direction * step;
            let cand_val = f.eval(&cand);
            if cand_val.is_finite() {
                let cand_obj = tau.dot(&cand) - cand_val;
                if cand_obj >= obj + 1e-4 * step * slope {
                    t = cand;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !accepted {
            let value = tau.dot(&t) - f.eval(&t);
            return finish(best, value, t, residual, iter);
        }
    }
    let value = tau.dot(&t) - f.eval(&t);
    finish(best, value, t, residual, cfg.max_iter)
}

/// Solve `H d = g` with a Levenberg escalation when `H` is not positive
/// definite.
fn newton_direction(hess: &DMatrix<f64>, grad: &DVector<f64>) -> DVector<f64> {
    let dim = grad.len();
    let scale = hess.diagonal().amax().max(1e-12);
    let mut ridge = 0.0;
    for _ in 0..12 {
        let regularized = hess + DMatrix::identity(dim, dim) * ridge;
        if let Some(chol) = Cholesky::new(regularized) {
            return chol.solve(grad);
        }
        ridge = if ridge == 0.0 { 1e-12 * scale } else { ridge * 100.0 };
    }
    grad.clone()
}

/// Result of one-dimensional minimization.
#[derive(Debug, Clone, Copy)]
pub struct ScalarMin {
    pub x: f64,
    pub value: f64,
    pub converged: bool,
    pub evals: usize,
}

/// Minimize on `[lo, hi]` with a uniform pre-scan followed by golden-section
/// inside the bracketing triple. When the scan minimum sits at an endpoint,
/// the bracket is widened geometrically up to `[lo_floor, hi_cap]`.
///
/// Infinite values are legal; if every probe is +∞ the result is +∞ with a
/// NaN location.
pub fn minimize_scalar(
    mut f: impl FnMut(f64) -> f64,
    lo: f64,
    hi: f64,
    n_scan: usize,
    tol: f64,
    lo_floor: f64,
    hi_cap: f64,
) -> ScalarMin {
    assert!(lo < hi && n_scan >= 2);
    let mut evals = 0;
    let mut probe = |x: f64, evals: &mut usize| {
        *evals += 1;
        f(x)
    };

    let mut xs: Vec<f64> =
        (0..=n_scan).map(|i| lo + (hi - lo) * i as f64 / n_scan as f64).collect();
    let mut vs: Vec<f64> = xs.iter().map(|&x| probe(x, &mut evals)).collect();

    // widen toward the floor/cap while the best probe sits on the edge
    for _ in 0..24 {
        let best = argmin(&vs);
        if vs[best].is_infinite() {
            return ScalarMin { x: f64::NAN, value: f64::INFINITY, converged: true, evals };
        }
        if best == 0 && xs[0] > lo_floor {
            let new_x = (xs[0] - (xs[1] - xs[0]).max(xs[0] * 0.5)).max(lo_floor);
            let new_x = if new_x == xs[0] { lo_floor } else { new_x };
            xs.insert(0, new_x);
            vs.insert(0, probe(new_x, &mut evals));
        } else if best == xs.len() - 1 && xs[xs.len() - 1] < hi_cap {
            let last = xs[xs.len() - 1];
            let prev_gap = last - xs[xs.len() - 2];
            let new_x = (last + prev_gap.max(last * 0.5)).min(hi_cap);
            xs.push(new_x);
            vs.push(probe(new_x, &mut evals));
        } else {
            break;
        }
    }

    let best = argmin(&vs);
    let (mut a, mut b) = (
        if best == 0 { xs[0] } else { xs[best - 1] },
        if best == xs.len() - 1 { xs[xs.len() - 1] } else { xs[best + 1] },
    );
    let mut best_x = xs[best];
    let mut best_v = vs[best];

    // golden-section inside the bracket
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = probe(x1, &mut evals);
    let mut f2 = probe(x2, &mut evals);
    let mut iterations = 0usize;
    while (b - a).abs() > tol * (1.0 + best_x.abs()) && iterations < 200 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = probe(x1, &mut evals);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = probe(x2, &mut evals);
        }
        iterations += 1;
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v < best_v {
            best_v = v;
            best_x = x;
        }
    }
    ScalarMin { x: best_x, value: best_v, converged: iterations < 200, evals }
}

fn argmin(vs: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in vs.iter().enumerate() {
        if *v < vs[best] {
            best = i;
        }
    }
    best
}

/// Nelder–Mead simplex result.
#[derive(Debug, Clone)]
pub struct SimplexMin {
    pub x: DVector<f64>,
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Standard Nelder–Mead on ℝ^d; +∞ values are treated as worst, so hard
/// constraints can be expressed directly in the objective.
pub fn nelder_mead(
    mut f: impl FnMut(&DVector<f64>) -> f64,
    x0: &DVector<f64>,
    scale: f64,
    max_evals: usize,
    f_tol: f64,
) -> SimplexMin {
    let d = x0.len();
    let mut evals = 0usize;
    let mut eval = |x: &DVector<f64>, evals: &mut usize| {
        *evals += 1;
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<(DVector<f64>, f64)> = Vec::with_capacity(d + 1);
    let v0 = eval(x0, &mut evals);
    simplex.push((x0.clone(), v0));
    for i in 0..d {
        let mut x = x0.clone();
        x[i] += scale;
        let v = eval(&x, &mut evals);
        simplex.push((x, v));
    }

    while evals < max_evals {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[d].1;
        if worst.is_finite() && (worst - best).abs() <= f_tol * (1.0 + best.abs()) {
            return SimplexMin { x: simplex[0].0.clone(), value: best, evals, converged: true };
        }

        let centroid: DVector<f64> = simplex[..d]
            .iter()
            .fold(DVector::zeros(d), |acc, (x, _)| acc + x)
            / d as f64;
        let reflected = &centroid + (&centroid - &simplex[d].0);
        let fr = eval(&reflected, &mut evals);

        if fr < simplex[0].1 {
            let expanded = &centroid + (&reflected - &centroid) * 2.0;
            let fe = eval(&expanded, &mut evals);
            simplex[d] = if fe < fr { (expanded, fe) } else { (reflected, fr) };
        } else if fr < simplex[d - 1].1 {
            simplex[d] = (reflected, fr);
        } else {
            let contracted = &centroid + (&simplex[d].0 - &centroid) * 0.5;
            let fc = eval(&contracted, &mut evals);
            if fc < simplex[d].1 {
                simplex[d] = (contracted, fc);
            } else {
                // shrink toward the best vertex
                let anchor = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    entry.0 = &anchor + (&entry.0 - &anchor) * 0.5;
                    entry.1 = eval(&entry.0, &mut evals);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    SimplexMin { x: simplex[0].0.clone(), value: simplex[0].1, evals, converged: false }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Quadratic {
        dim: usize,
        curvature: f64,
    }

    impl SmoothConvex for Quadratic {
        fn dim(&self) -> usize {
            self.dim
        }
        fn eval(&self, t: &DVector<f64>) -> f64 {
            0.5 * self.curvature * t.norm_squared()
        }
        fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
            Some((
                self.eval(t),
                t * self.curvature,
                DMatrix::identity(self.dim, self.dim) * self.curvature,
            ))
        }
    }

    #[test]
    fn conjugate_of_the_unit_quadratic_is_itself() {
        let f = Quadratic { dim: 1, curvature: 1.0 };
        let cfg = SolverConfig::default();
        let res = legendre(&f, &DVector::from_vec(vec![3.0]), &cfg);
        assert!(res.converged);
        assert!((res.value - 4.5).abs() < 1e-10);
        assert!((res.argmax[0] - 3.0).abs() < 1e-8);
        assert!(res.residual <= 1e-8 * (1.0 + 3.0));
    }

    #[test]
    fn conjugate_vanishes_at_the_gradient_of_the_origin() {
        // f*(∇f(0)) = -f(0) = 0 for any mgf-like f with f(0) = 0
        let f = Quadratic { dim: 3, curvature: 2.5 };
        let cfg = SolverConfig::default();
        let res = legendre(&f, &DVector::zeros(3), &cfg);
        assert!(res.converged);
        assert!(res.value.abs() < 1e-12);
    }

    #[test]
    fn double_conjugation_recovers_the_quadratic() {
        // for f = c‖t‖²/2, f* = ‖τ‖²/(2c); conjugating the closed-form dual
        // returns the original on a grid
        let cfg = SolverConfig::default();
        for c in [0.5, 1.0, 2.0] {
            let dual = Quadratic { dim: 1, curvature: 1.0 / c };
            for x in [-2.0, -0.5, 0.0, 1.0, 3.0] {
                let res = legendre(&dual, &DVector::from_vec(vec![x]), &cfg);
                assert!(res.converged);
                let expected = 0.5 * c * x * x;
                assert!((res.value - expected).abs() <= 1e-8, "c={c}, x={x}");
            }
        }
    }

    struct LinearTail;

    // convex, finite everywhere, with bounded gradient range (-1, 1): the
    // conjugate is +∞ for |τ| > 1
    impl SmoothConvex for LinearTail {
        fn dim(&self) -> usize {
            1
        }
        fn eval(&self, t: &DVector<f64>) -> f64 {
            (t[0] * t[0] + 1.0).sqrt()
        }
        fn derivs(&self, t: &DVector<f64>) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
            let root = (t[0] * t[0] + 1.0).sqrt();
            Some((
                root,
                DVector::from_vec(vec![t[0] / root]),
                DMatrix::from_vec(1, 1, vec![1.0 / root.powi(3)]),
            ))
        }
    }

    #[test]
    fn unbounded_conjugates_are_certified_infinite() {
        let cfg = SolverConfig::default();
        let res = legendre(&LinearTail, &DVector::from_vec(vec![2.0]), &cfg);
        assert_eq!(res.value, f64::INFINITY);
        assert!(!res.converged);
        // inside the gradient range the sup is attained: f*(0.6) = -0.8
        let res = legendre(&LinearTail, &DVector::from_vec(vec![0.6]), &cfg);
        assert!(res.converged);
        assert!((res.value + 0.8).abs() < 1e-8);
    }

    #[test]
    fn scalar_minimizer_finds_interior_minima() {
        let out = minimize_scalar(|x| (x - 1.3) * (x - 1.3), 0.0, 4.0, 16, 1e-10, 0.0, 4.0);
        assert!(out.converged);
        assert!((out.x - 1.3).abs() < 1e-7);
    }

    #[test]
    fn scalar_minimizer_widens_past_the_initial_bracket() {
        let out = minimize_scalar(|x| (x - 9.0) * (x - 9.0), 0.1, 2.0, 8, 1e-9, 1e-6, 100.0);
        assert!((out.x - 9.0).abs() < 1e-6, "x = {}", out.x);
    }

    #[test]
    fn scalar_minimizer_handles_all_infinite_objectives() {
        let out = minimize_scalar(|_| f64::INFINITY, 0.0, 1.0, 8, 1e-8, 0.0, 1.0);
        assert!(out.value.is_infinite());
        assert!(out.x.is_nan());
    }

    #[test]
    fn nelder_mead_minimizes_a_shifted_bowl() {
        let f = |x: &DVector<f64>| (x[0] - 2.0).powi(2) + 3.0 * (x[1] + 1.0).powi(2);
        let out = nelder_mead(f, &DVector::zeros(2), 0.5, 400, 1e-12);
        assert!(out.converged);
        assert!((out.x[0] - 2.0).abs() < 1e-4);
        assert!((out.x[1] + 1.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_respects_infinite_barriers() {
        // constrained bowl: +∞ for x > 1, minimum of the restriction at 1
        let f = |x: &DVector<f64>| {
            if x[0] > 1.0 {
                f64::INFINITY
            } else {
                (x[0] - 3.0).powi(2)
            }
        };
        let out = nelder_mead(f, &DVector::from_vec(vec![0.0]), 0.3, 300, 1e-12);
        assert!((out.x[0] - 1.0).abs() < 1e-3, "x = {}", out.x[0]);
    }

    #[test]
    fn solver_config_round_trips_through_camel_case_json() {
        let cfg = SolverConfig::default();
        let json = serde_json::to_string(&cfg).unwrap();
        assert!(json.contains("newtonTol"));
        assert!(json.contains("goldenTol"));
        let parsed: SolverConfig = serde_json::from_str(r#"{"newtonTol":1e-9,"maxIter":50}"#).unwrap();
        assert_eq!(parsed.max_iter, 50);
        assert_eq!(parsed.golden_tol, cfg.golden_tol);
    }
}
