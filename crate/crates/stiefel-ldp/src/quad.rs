//! 1D quadrature: adaptive Gauss–Kronrod for the tilted-density integrals
//! behind the log moment-generating functions, and Gauss–Hermite rules for
//! integrating against one-dimensional Gaussian laws.

use nalgebra::DMatrix;

// QUADPACK 7-15 Gauss–Kronrod pair on [-1, 1].
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOutcome<const M: usize> {
    pub values: [f64; M],
    pub error: f64,
    pub converged: bool,
}

// Odd Kronrod indices carry the embedded 7-point Gauss rule.
fn gk15_componentwise<const M: usize>(
    f: &impl Fn(f64) -> [f64; M],
    a: f64,
    b: f64,
) -> ([f64; M], [f64; M]) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut kronrod = [0.0; M];
    let mut gauss = [0.0; M];
    for (i, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate() {
        let mut fsum = f(c + h * x);
        if x != 0.0 {
            let fm = f(c - h * x);
            for m in 0..M {
                fsum[m] += fm[m];
            }
        }
        for m in 0..M {
            kronrod[m] += wk * fsum[m];
        }
        if i % 2 == 1 {
            let wg = WG[i / 2];
            for m in 0..M {
                gauss[m] += wg * fsum[m];
            }
        }
    }
    let mut err = [0.0; M];
    for m in 0..M {
        kronrod[m] *= h;
        err[m] = (kronrod[m] - gauss[m] * h).abs();
    }
    (kronrod, err)
}

/// Adaptive Gauss–Kronrod integration of a vector-valued integrand on
/// `[a, b]`. Intervals are bisected, worst error first, until every
/// component's error estimate is below `rel_tol` relative to the larger of
/// that component and the leading one (the leading component is the mass
/// that normalises the others, so small components are allowed absolute
/// error at the mass scale).
pub fn adaptive_gk<const M: usize>(
    f: impl Fn(f64) -> [f64; M],
    a: f64,
    b: f64,
    rel_tol: f64,
) -> QuadOutcome<M> {
    adaptive_gk_panels(f, &[a, b], rel_tol)
}

/// Adaptive Gauss–Kronrod with caller-supplied initial breakpoints, so a
/// known peak location seeds a partition that needs little refinement.
pub fn adaptive_gk_panels<const M: usize>(
    f: impl Fn(f64) -> [f64; M],
    breakpoints: &[f64],
    rel_tol: f64,
) -> QuadOutcome<M> {
    const MAX_SEGMENTS: usize = 512;
    let worst_of = |e: &[f64; M]| e.iter().fold(0.0f64, |acc, x| acc.max(*x));
    let mut segments: Vec<(f64, f64, [f64; M], [f64; M])> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (v, e) = gk15_componentwise(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    assert!(!segments.is_empty(), "need at least one non-empty panel");
    loop {
        let mut values = [0.0; M];
        let mut err = [0.0; M];
        for (_, _, v, e) in &segments {
            for m in 0..M {
                values[m] += v[m];
                err[m] += e[m];
            }
        }
        let lead = values[0].abs();
        let done = (0..M).all(|m| err[m] <= rel_tol * values[m].abs().max(lead) + 1e-300);
        let total_err = err.iter().sum();
        if done {
            return QuadOutcome { values, error: total_err, converged: true };
        }
        if segments.len() >= MAX_SEGMENTS {
            return QuadOutcome { values, error: total_err, converged: false };
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| worst_of(&x.1 .3).total_cmp(&worst_of(&y.1 .3)))
            .map(|(i, _)| i)
            .unwrap();
        let (lo, hi, _, _) = segments.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        let (vl, el) = gk15_componentwise(&f, lo, mid);
        let (vr, er) = gk15_componentwise(&f, mid, hi);
        segments.push((lo, mid, vl, el));
        segments.push((mid, hi, vr, er));
    }
}

/// Gauss–Hermite rule for the weight `e^{-x²}` computed by the Golub–Welsch
/// eigendecomposition of the Jacobi matrix.
#[derive(Debug, Clone)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Shared Gauss–Hermite tables; the eigendecomposition is worth caching when
/// evaluators are rebuilt inside optimization loops.
pub fn gauss_hermite(order: usize) -> std::sync::Arc<GaussHermite> {
    use std::collections::HashMap;
    use std::sync::{Arc, Mutex, OnceLock};
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("gauss-hermite cache poisoned");
    guard.entry(order).or_insert_with(|| Arc::new(GaussHermite::new(order))).clone()
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut jacobi = DMatrix::zeros(n, n);
        for i in 1..n {
            let beta = (i as f64 / 2.0).sqrt();
            jacobi[(i - 1, i)] = beta;
            jacobi[(i, i - 1)] = beta;
        }
        let eig = nalgebra::SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|j| {
                let node = eig.eigenvalues[j];
                let w = std::f64::consts::PI.sqrt() * eig.eigenvectors[(0, j)].powi(2);
                (node, w)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussHermite {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `E[f(W)]` for `W ~ N(mean, sd²)`.
    pub fn gaussian_expectation(&self, mean: f64, sd: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mean + std::f64::consts::SQRT_2 * sd * x);
        }
        acc * inv_sqrt_pi
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_gaussian_mass() {
        let out = adaptive_gk(|x| [(-0.5 * x * x).exp()], -12.0, 12.0, 1e-12);
        assert!(out.converged);
        assert!((out.values[0] - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gk_handles_vector_integrands() {
        // Moments of the standard Gaussian: mass, mean, second moment.
        let out = adaptive_gk(
            |x| {
                let w = (-0.5 * x * x).exp();
                [w, x * w, x * x * w]
            },
            -12.0,
            12.0,
            1e-12,
        );
        let z = (2.0 * std::f64::consts::PI).sqrt();
        assert!((out.values[0] - z).abs() < 1e-11);
        assert!(out.values[1].abs() < 1e-12);
        assert!((out.values[2] - z).abs() < 1e-10);
    }

    #[test]
    fn hermite_rule_reproduces_normal_moments() {
        let gh = GaussHermite::new(64);
        let m2 = gh.gaussian_expectation(0.0, 1.0, |x| x * x);
        let m4 = gh.gaussian_expectation(0.0, 1.0, |x| x.powi(4));
        let shifted = gh.gaussian_expectation(1.5, 2.0, |x| x);
        assert!((m2 - 1.0).abs() < 1e-12);
        assert!((m4 - 3.0).abs() < 1e-11);
        assert!((shifted - 1.5).abs() < 1e-12);
        // weights sum to √π
        let total: f64 = gh.weights.iter().sum();
        assert!((total - std::f64::consts::PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn hermite_rule_is_exact_for_high_degree_polynomials() {
        let gh = GaussHermite::new(16);
        // degree 30 < 2·16: E[W^10] = 945 for N(0,1)
        let m10 = gh.gaussian_expectation(0.0, 1.0, |x| x.powi(10));
        assert!((m10 - 945.0).abs() / 945.0 < 1e-12);
    }
}
