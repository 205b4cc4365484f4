//! The integrated log-mgf `Ψ_ν(t1, t2) = ∫ Λ(⟨t1, x⟩, t2) ν(dx)`.
//!
//! Discrete ν reduces to a weighted sum. For Gaussian ν the projection
//! `w = ⟨t1, X⟩` is a one-dimensional Gaussian, so the integral collapses
//! to Gauss–Hermite quadrature in w; gradients and Hessians in `t1` use the
//! conditional-expectation identities of the Gaussian,
//! `E[X | w] = m + Σt1 (w - μ)/s²` and
//! `Cov(X | w) = Σ - Σt1 t1ᵀΣ / s²`, which turn every needed moment into a
//! scalar expectation over the same Hermite nodes.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::family::MeasureFamily;
use crate::measures::{EmpiricalMeasure, GaussianMeasure};
use crate::quad::{gauss_hermite, GaussHermite};

use super::logmgf::LogMgf;

/// The measure ν that the log-mgf is integrated against.
#[derive(Debug, Clone)]
pub enum NuSpec {
    Gaussian(GaussianMeasure),
    Discrete(EmpiricalMeasure),
}

impl NuSpec {
    /// The standard Gaussian γ^⊗k.
    pub fn standard(k: usize) -> Self {
        NuSpec::Gaussian(GaussianMeasure::standard(k))
    }

    pub fn dim(&self) -> usize {
        match self {
            NuSpec::Gaussian(g) => g.dim(),
            NuSpec::Discrete(m) => m.dim(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            NuSpec::Gaussian(g) => {
                if g == &GaussianMeasure::standard(g.dim()) {
                    "standard".to_string()
                } else {
                    format!("gaussian:{}", serde_json::to_string(g).unwrap_or_default())
                }
            }
            NuSpec::Discrete(m) => format!("discrete({} points)", m.len()),
        }
    }
}

/// Starting Hermite order; doubled until the evaluation stabilizes.
const GH_BASE_ORDER: usize = 64;
const GH_MAX_ORDER: usize = 256;
const GH_DOUBLING_TOL: f64 = 1e-10;

/// Evaluator of `Ψ_ν` with first and second derivatives in `(t1, t2)`.
pub struct PsiEvaluator {
    family: MeasureFamily,
    nu: NuSpec,
    lambda: LogMgf,
    gh: Arc<GaussHermite>,
}

impl PsiEvaluator {
    pub fn new(family: &MeasureFamily, nu: &NuSpec) -> Result<Self> {
        if nu.dim() == 0 {
            return Err(Error::InvalidParameter("ν must live on ℝ^k with k ≥ 1".into()));
        }
        let mut evaluator = PsiEvaluator {
            family: family.clone(),
            nu: nu.clone(),
            lambda: LogMgf::plain(family),
            gh: gauss_hermite(GH_BASE_ORDER),
        };
        if matches!(nu, NuSpec::Gaussian(_)) {
            evaluator.calibrate_order();
        }
        Ok(evaluator)
    }

    /// Double the Hermite order until a probe evaluation moves < 1e-10.
    fn calibrate_order(&mut self) {
        let k = self.k();
        let probe1 = DVector::from_element(k, 0.5);
        let probe2 = DVector::from_element(k, 2.0);
        let t2 = if self.family.domain_bound().is_finite() {
            0.5 * self.family.domain_bound()
        } else {
            0.0
        };
        let mut order = GH_BASE_ORDER;
        let mut prev = (self.eval(&probe1, t2), self.eval(&probe2, t2));
        while order < GH_MAX_ORDER {
            order *= 2;
            self.gh = gauss_hermite(order);
            let cur = (self.eval(&probe1, t2), self.eval(&probe2, t2));
            if (cur.0 - prev.0).abs() < GH_DOUBLING_TOL && (cur.1 - prev.1).abs() < GH_DOUBLING_TOL
            {
                return;
            }
            prev = cur;
        }
    }

    pub fn k(&self) -> usize {
        self.nu.dim()
    }

    pub fn family(&self) -> &MeasureFamily {
        &self.family
    }

    pub fn nu(&self) -> &NuSpec {
        &self.nu
    }

    /// Extended-real evaluation; +∞ iff `t2 ≥ T`.
    pub fn eval(&self, t1: &DVector<f64>, t2: f64) -> f64 {
        if t2 >= self.family.domain_bound() {
            return f64::INFINITY;
        }
        match &self.nu {
            NuSpec::Discrete(m) => (0..m.len())
                .map(|i| m.weight(i) * self.lambda.eval(m.point(i).dot(t1), t2))
                .sum(),
            NuSpec::Gaussian(g) => {
                let mu = t1.dot(g.mean());
                let s2 = (t1.transpose() * g.cov() * t1)[(0, 0)].max(0.0);
                let sd = s2.sqrt();
                if self.family.lambda_is_closed_form() {
                    self.gh.gaussian_expectation(mu, sd, |w| self.lambda.eval(w, t2))
                } else {
                    // each node hides a quadrature; spread them over the pool
                    // and fold in node order so results stay bit-stable
                    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
                    let terms: Vec<f64> = self
                        .gh
                        .nodes
                        .par_iter()
                        .zip(self.gh.weights.par_iter())
                        .map(|(&x, &w)| {
                            w * self.lambda.eval(mu + std::f64::consts::SQRT_2 * sd * x, t2)
                        })
                        .collect();
                    terms.iter().sum::<f64>() * inv_sqrt_pi
                }
            }
        }
    }

    /// Value, (k+1)-gradient and (k+1)×(k+1) Hessian; `None` iff `t2 ≥ T`.
    pub fn derivs(&self, t1: &DVector<f64>, t2: f64) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        if t2 >= self.family.domain_bound() {
            return None;
        }
        let k = self.k();
        match &self.nu {
            NuSpec::Discrete(m) => {
                let mut value = 0.0;
                let mut grad = DVector::zeros(k + 1);
                let mut hess = DMatrix::zeros(k + 1, k + 1);
                for i in 0..m.len() {
                    let w = m.weight(i);
                    let x = m.point(i);
                    let d = self.lambda.derivs(x.dot(t1), t2)?;
                    value += w * d.value;
                    for a in 0..k {
                        grad[a] += w * x[a] * d.grad[0];
                        for b in 0..k {
                            hess[(a, b)] += w * x[a] * x[b] * d.hess[0][0];
                        }
                        hess[(a, k)] += w * x[a] * d.hess[0][1];
                    }
                    grad[k] += w * d.grad[1];
                    hess[(k, k)] += w * d.hess[1][1];
                }
                for a in 0..k {
                    hess[(k, a)] = hess[(a, k)];
                }
                Some((value, grad, hess))
            }
            NuSpec::Gaussian(g) => self.gaussian_derivs(g, t1, t2),
        }
    }

    fn gaussian_derivs(
        &self,
        g: &GaussianMeasure,
        t1: &DVector<f64>,
        t2: f64,
    ) -> Option<(f64, DVector<f64>, DMatrix<f64>)> {
        let k = self.k();
        let mu = t1.dot(g.mean());
        let u = g.cov() * t1;
        let s2 = t1.dot(&u).max(0.0);
        let m = g.mean();

        // scalar expectations over w ~ N(μ, s²):
        // [Λ, Λ₁, Λ₂, Λ₁₁, Λ₁₂, Λ₂₂, (w-μ)Λ₁₂, (w-μ)Λ₁₁, (w-μ)²Λ₁₁]
        let sd = s2.sqrt();
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let node_terms = |(&node, &weight): (&f64, &f64)| -> Option<[f64; 9]> {
            let w = mu + std::f64::consts::SQRT_2 * sd * node;
            let d = self.lambda.derivs(w, t2)?;
            let dw = w - mu;
            Some([
                weight * d.value,
                weight * d.grad[0],
                weight * d.grad[1],
                weight * d.hess[0][0],
                weight * d.hess[0][1],
                weight * d.hess[1][1],
                weight * dw * d.hess[0][1],
                weight * dw * d.hess[0][0],
                weight * dw * dw * d.hess[0][0],
            ])
        };
        let per_node: Vec<Option<[f64; 9]>> = if self.family.lambda_is_closed_form() {
            self.gh.nodes.iter().zip(&self.gh.weights).map(node_terms).collect()
        } else {
            self.gh.nodes.par_iter().zip(self.gh.weights.par_iter()).map(node_terms).collect()
        };
        let mut acc = [0.0f64; 9];
        for terms in per_node {
            let terms = terms?;
            for (a, v) in acc.iter_mut().zip(terms) {
                *a += v;
            }
        }
        for a in acc.iter_mut() {
            *a *= inv_sqrt_pi;
        }
        let [e_l, e_l1, e_l2, e_l11, e_l12, e_l22, e_wl12, e_wl11, e_w2l11] = acc;

        let mut grad = DVector::zeros(k + 1);
        let mut hess = DMatrix::zeros(k + 1, k + 1);
        grad[k] = e_l2;
        hess[(k, k)] = e_l22;

        // gradient through Stein's identity, E[(W-μ)Λ₁(W)] = s² E[Λ₁₁(W)]:
        // ∇_{t1}Ψ = E[X Λ₁(w)] = m E[Λ₁] + u E[Λ₁₁], which also covers the
        // degenerate s² = 0 case
        for a in 0..k {
            grad[a] = m[a] * e_l1 + u[a] * e_l11;
        }

        if s2 > 1e-28 {
            // E[XXᵀ g(w)] expands through Cov(X|w) and E[X|w]
            for a in 0..k {
                hess[(a, k)] = m[a] * e_l12 + u[a] * e_wl12 / s2;
                hess[(k, a)] = hess[(a, k)];
            }
            let cov_term = g.cov() - &u * u.transpose() / s2;
            for a in 0..k {
                for b in 0..k {
                    hess[(a, b)] = cov_term[(a, b)] * e_l11
                        + m[a] * m[b] * e_l11
                        + (m[a] * u[b] + u[a] * m[b]) * e_wl11 / s2
                        + u[a] * u[b] * e_w2l11 / (s2 * s2);
                }
            }
        } else {
            // degenerate projection: w ≡ μ and u = Σt1 = 0
            let d = self.lambda.derivs(mu, t2)?;
            for a in 0..k {
                hess[(a, k)] = m[a] * d.hess[0][1];
                hess[(k, a)] = hess[(a, k)];
                for b in 0..k {
                    hess[(a, b)] = (g.cov()[(a, b)] + m[a] * m[b]) * d.hess[0][0];
                }
            }
        }
        Some((e_l, grad, hess))
    }
}
