//! Descriptors of the high-dimensional measure families.
//!
//! A family fixes the representation `X = ξ · ρ((1/n) Σ r(ξ_i))` of the
//! n-dimensional vector: the base law of the i.i.d. scalars ξ, the function
//! `r` entering the normalisation, the rescaling `ρ`, the domain bound `T`
//! of the joint log-mgf in its second argument, and the Wasserstein tail
//! exponent `q⋆` used by convergence diagnostics.
//!
//! Supported families:
//!
//! * `product-gaussian` — i.i.d. standard normals, `r ≡ 1`, `ρ ≡ 1`.
//! * `product-custom`   — i.i.d. generalized p-normals (density ∝ e^{-|y|^p/p}),
//!   `r ≡ 1`, `ρ ≡ 1`.
//! * `cone-lp(p)`       — cone measure on the scaled lp sphere `Σ|x_i|^p = n`:
//!   p-normal ξ with `r(y) = |y|^p` and `ρ(y) = y^{-1/p}`.
//! * `ball-lp(p)`       — uniform on the scaled lp ball, realised as a cone
//!   sample shrunk by an independent factor `U^{1/n}`. Its log-mgfs and rate
//!   functions coincide with the cone's; only the sampler differs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special;

/// Symbolic tag for the function `r` in the representation of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RDescriptor {
    /// `r ≡ 1`: the normalising statistic is constant.
    IdentityOne,
    /// `r(y) = |y|^p`.
    AbsPow,
}

/// Symbolic tag for the rescaling `ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RhoDescriptor {
    /// `ρ ≡ 1`.
    ConstantOne,
    /// `ρ(y) = y^{-1/p}`.
    NegPowInv,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilyKind {
    ProductGaussian,
    /// Product of generalized p-normals without normalisation.
    ProductCustom { p: f64 },
    ConeLp { p: f64 },
    BallLp { p: f64 },
}

/// Descriptor of the law of the high-dimensional vector `X^{(n)}`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFamily {
    pub kind: FamilyKind,
    q_star: f64,
}

impl MeasureFamily {
    pub fn product_gaussian() -> Self {
        Self { kind: FamilyKind::ProductGaussian, q_star: 2.0 }
    }

    pub fn product_custom(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { kind: FamilyKind::ProductCustom { p }, q_star: default_q_star(p) })
    }

    pub fn cone_lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { kind: FamilyKind::ConeLp { p }, q_star: default_q_star(p) })
    }

    pub fn ball_lp(p: f64) -> Result<Self> {
        check_p(p)?;
        Ok(Self { kind: FamilyKind::BallLp { p }, q_star: default_q_star(p) })
    }

    /// Override the default tail exponent.
    pub fn with_q_star(mut self, q_star: f64) -> Result<Self> {
        if !(q_star > 0.0 && q_star <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "qStar must lie in (0, 2], got {q_star}"
            )));
        }
        self.q_star = q_star;
        Ok(self)
    }

    pub fn p(&self) -> Option<f64> {
        match self.kind {
            FamilyKind::ProductGaussian => None,
            FamilyKind::ProductCustom { p } | FamilyKind::ConeLp { p } | FamilyKind::BallLp { p } => {
                Some(p)
            }
        }
    }

    pub fn q_star(&self) -> f64 {
        self.q_star
    }

    /// Upper bound `T` of the log-mgf domain in its second argument:
    /// `1/p` when `r(y) = |y|^p`, `+∞` for product families.
    pub fn domain_bound(&self) -> f64 {
        match self.kind {
            FamilyKind::ProductGaussian | FamilyKind::ProductCustom { .. } => f64::INFINITY,
            FamilyKind::ConeLp { p } | FamilyKind::BallLp { p } => 1.0 / p,
        }
    }

    pub fn r_descriptor(&self) -> RDescriptor {
        match self.kind {
            FamilyKind::ProductGaussian | FamilyKind::ProductCustom { .. } => {
                RDescriptor::IdentityOne
            }
            FamilyKind::ConeLp { .. } | FamilyKind::BallLp { .. } => RDescriptor::AbsPow,
        }
    }

    pub fn rho_descriptor(&self) -> RhoDescriptor {
        match self.kind {
            FamilyKind::ProductGaussian | FamilyKind::ProductCustom { .. } => {
                RhoDescriptor::ConstantOne
            }
            FamilyKind::ConeLp { .. } | FamilyKind::BallLp { .. } => RhoDescriptor::NegPowInv,
        }
    }

    /// True when `r ≡ 1`, in which case the second coordinate of every
    /// conjugate problem is degenerate and pinned analytically.
    pub fn has_identity_r(&self) -> bool {
        self.r_descriptor() == RDescriptor::IdentityOne
    }

    pub fn rho(&self, tau: f64) -> f64 {
        match self.rho_descriptor() {
            RhoDescriptor::ConstantOne => 1.0,
            RhoDescriptor::NegPowInv => tau.powf(-1.0 / self.p().unwrap()),
        }
    }

    pub fn r(&self, y: f64) -> f64 {
        match self.r_descriptor() {
            RDescriptor::IdentityOne => 1.0,
            RDescriptor::AbsPow => y.abs().powf(self.p().unwrap()),
        }
    }

    /// Mean of `r(ξ)`: 1 in every supported family (`E|ξ|^p = 1` for the
    /// p-normal since `|ξ|^p/p ~ Gamma(1/p, 1)`).
    pub fn r_mean(&self) -> f64 {
        1.0
    }

    /// Standard deviation of `r(ξ)`: 0 when `r ≡ 1`, `√p` otherwise.
    pub fn r_std(&self) -> f64 {
        match self.r_descriptor() {
            RDescriptor::IdentityOne => 0.0,
            RDescriptor::AbsPow => self.p().unwrap().sqrt(),
        }
    }

    /// All supported base laws are symmetric about zero.
    pub fn is_symmetric(&self) -> bool {
        true
    }

    /// True when the log-mgfs have closed forms (no quadrature behind them).
    pub fn lambda_is_closed_form(&self) -> bool {
        matches!(self.kind, FamilyKind::ProductGaussian)
    }

    /// log-density of ξ up to the normalising constant: `-y²/2` or `-|y|^p/p`.
    pub fn xi_log_density_unnorm(&self, y: f64) -> f64 {
        match self.kind {
            FamilyKind::ProductGaussian => -0.5 * y * y,
            FamilyKind::ProductCustom { p } | FamilyKind::ConeLp { p } | FamilyKind::BallLp { p } => {
                -y.abs().powf(p) / p
            }
        }
    }

    /// log of the density normaliser: `½ log 2π` or `log(2 p^{1/p-1} Γ(1/p))`.
    pub fn xi_log_normalizer(&self) -> f64 {
        match self.kind {
            FamilyKind::ProductGaussian => 0.5 * (2.0 * std::f64::consts::PI).ln(),
            FamilyKind::ProductCustom { p } | FamilyKind::ConeLp { p } | FamilyKind::BallLp { p } => {
                p_normal_log_normalizer(p)
            }
        }
    }

    /// Closed-form absolute moment `E|ξ|^s` of the base law.
    pub fn xi_abs_moment(&self, s: f64) -> f64 {
        match self.kind {
            FamilyKind::ProductGaussian => special::gaussian_abs_moment(s),
            FamilyKind::ProductCustom { p } | FamilyKind::ConeLp { p } | FamilyKind::BallLp { p } => {
                p_normal_abs_moment(p, s)
            }
        }
    }

    pub fn name(&self) -> String {
        match self.kind {
            FamilyKind::ProductGaussian => "product-gaussian".to_string(),
            FamilyKind::ProductCustom { p } => format!("product-custom(p={p})"),
            FamilyKind::ConeLp { p } => format!("cone-lp(p={p})"),
            FamilyKind::BallLp { p } => format!("ball-lp(p={p})"),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must lie in (1, ∞), got {p}")));
    }
    Ok(())
}

/// Default tail exponent: the conjugate exponent `p/(p-1)` is established for
/// `p > 2`; for `p ≤ 2` (and the Gaussian) the safe value 2 is used.
fn default_q_star(p: f64) -> f64 {
    if p > 2.0 {
        p / (p - 1.0)
    } else {
        2.0
    }
}

/// `log ∫ exp(-|y|^p/p) dy = log(2 p^{1/p-1} Γ(1/p))`.
pub fn p_normal_log_normalizer(p: f64) -> f64 {
    (2.0f64).ln() + (1.0 / p - 1.0) * p.ln() + special::ln_gamma(1.0 / p)
}

/// `E|ξ|^s = p^{s/p} Γ((s+1)/p) / Γ(1/p)` for the generalized p-normal.
pub fn p_normal_abs_moment(p: f64, s: f64) -> f64 {
    ((s / p) * p.ln() + special::ln_gamma((s + 1.0) / p) - special::ln_gamma(1.0 / p)).exp()
}

// -- JSON form: {"kind":"cone-lp","p":3.0,"qStar":1.5} ------------------------

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(rename = "qStar", skip_serializing_if = "Option::is_none")]
    q_star: Option<f64>,
}

impl Serialize for MeasureFamily {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let repr = FamilyRepr {
            kind: match self.kind {
                FamilyKind::ProductGaussian => "product-gaussian",
                FamilyKind::ProductCustom { .. } => "product-custom",
                FamilyKind::ConeLp { .. } => "cone-lp",
                FamilyKind::BallLp { .. } => "ball-lp",
            }
            .to_string(),
            p: self.p(),
            q_star: Some(self.q_star),
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for MeasureFamily {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = FamilyRepr::deserialize(deserializer)?;
        let need_p = || repr.p.ok_or_else(|| DeError::custom(format!("family {} requires p", repr.kind)));
        let family = match repr.kind.as_str() {
            "product-gaussian" => MeasureFamily::product_gaussian(),
            "product-custom" => MeasureFamily::product_custom(need_p()?).map_err(DeError::custom)?,
            "cone-lp" => MeasureFamily::cone_lp(need_p()?).map_err(DeError::custom)?,
            "ball-lp" => MeasureFamily::ball_lp(need_p()?).map_err(DeError::custom)?,
            other => return Err(DeError::custom(format!("unknown family kind {other:?}"))),
        };
        match repr.q_star {
            Some(q) => family.with_q_star(q).map_err(DeError::custom),
            None => Ok(family),
        }
    }
}
