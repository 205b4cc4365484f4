//! Small collection of special-function helpers shared across modules.

use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::gamma::ln_gamma as statrs_ln_gamma;

pub fn ln_gamma(x: f64) -> f64 {
    statrs_ln_gamma(x)
}

pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

pub fn normal_quantile(u: f64) -> f64 {
    Normal::standard().inverse_cdf(u)
}

/// `E|Z|^s` for a standard 1D Gaussian: `2^{s/2} Γ((s+1)/2) / √π`.
pub fn gaussian_abs_moment(s: f64) -> f64 {
    (0.5 * s * (2.0f64).ln() + ln_gamma(0.5 * (s + 1.0)) - 0.5 * std::f64::consts::PI.ln()).exp()
}

/// `E‖Z‖^q` for a standard Gaussian on ℝ^k (a chi-distribution moment):
/// `2^{q/2} Γ((k+q)/2) / Γ(k/2)`.
pub fn gaussian_norm_moment(k: usize, q: f64) -> f64 {
    (0.5 * q * (2.0f64).ln() + ln_gamma(0.5 * (k as f64 + q)) - ln_gamma(0.5 * k as f64)).exp()
}

/// One-sample Kolmogorov–Smirnov statistic of `sorted` against the CDF `f`.
pub fn ks_statistic(sorted: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let c = f(x);
        d = d.max((c - i as f64 / n).abs()).max(((i + 1) as f64 / n - c).abs());
    }
    d
}

/// Asymptotic Kolmogorov p-value `Q(√n·D) = 2 Σ (-1)^{j-1} e^{-2 j² t²}`,
/// switching to the dual theta series below t = 1 where the alternating
/// series converges too slowly.
pub fn kolmogorov_pvalue(n: usize, d: f64) -> f64 {
    let t = (n as f64).sqrt() * d;
    if t < 1e-8 {
        return 1.0;
    }
    if t < 1.0 {
        let mut cdf = 0.0;
        for j in 1..101 {
            let term = (-(2.0 * j as f64 - 1.0).powi(2) * std::f64::consts::PI.powi(2)
                / (8.0 * t * t))
                .exp();
            cdf += term;
            if term < 1e-16 {
                break;
            }
        }
        cdf *= (2.0 * std::f64::consts::PI).sqrt() / t;
        return (1.0 - cdf).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    for j in 1..101 {
        let term = (-2.0 * (j as f64).powi(2) * t * t).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_moments_match_known_values() {
        // E|Z| = √(2/π), EZ² = 1, E|Z|⁴ = 3.
        assert!((gaussian_abs_moment(1.0) - (2.0 / std::f64::consts::PI).sqrt()).abs() < 1e-14);
        assert!((gaussian_abs_moment(2.0) - 1.0).abs() < 1e-14);
        assert!((gaussian_abs_moment(4.0) - 3.0).abs() < 1e-13);
        // E‖Z‖ in 2D = √(π/2).
        assert!((gaussian_norm_moment(2, 1.0) - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-13);
        assert!((gaussian_norm_moment(3, 2.0) - 3.0).abs() < 1e-13);
    }

    #[test]
    fn ks_of_exact_quantiles_is_small() {
        let n = 1000;
        let sorted: Vec<f64> =
            (0..n).map(|i| normal_quantile((i as f64 + 0.5) / n as f64)).collect();
        let d = ks_statistic(&sorted, normal_cdf);
        assert!(d <= 0.5 / n as f64 + 1e-8, "d = {d}");
        assert!(kolmogorov_pvalue(n, d) > 0.999);
    }
}
