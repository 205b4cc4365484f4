//! Empirical measures of frame rows, the covariance map, the Gram–Schmidt
//! map Γ, Wasserstein-type convergence diagnostics, and the entropy
//! functionals ℍ_k and 𝕁_k on Gaussian measures.
//!
//! Conventions. The covariance map is the *second-moment* matrix
//! `𝒞(ν) = ∫ x⊗x dν`, not mean-centered. The row-empirical measure of a
//! frame `A` places mass 1/n on each row of `√n A`, so `𝒞` of it equals
//! `AᵀA = I_k` and the trace identity `tr(I_k - 𝒞) = 0` holds exactly.
//!
//! The functional ℍ_k is the good rate function for those row-empirical
//! measures: relative entropy to the standard Gaussian plus the trace
//! correction `½ tr(I_k - 𝒞(ν))`, finite only when `𝒞(ν) ⪯ I_k`. On a
//! Gaussian `N(m, Σ)` both terms are available in closed form. Relative
//! entropy of a *discrete* measure against the Gaussian is +∞ (no absolute
//! continuity), which is all the variational machinery ever needs.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use ordered_float::OrderedFloat;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::samplers::StiefelFrame;
use crate::special;

/// Tolerance on the positive-semidefinite order check `𝒞(ν) ⪯ I_k`, so
/// roundoff cannot turn a boundary case into a spurious +∞.
pub const PSD_TOL: f64 = 1e-10;

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// A weighted point cloud in ℝ^k. Weights default to uniform and must sum
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    points: DMatrix<f64>,
    weights: Option<Vec<f64>>,
}

impl EmpiricalMeasure {
    /// Uniform-weight cloud from a matrix whose rows are the points.
    pub fn from_points(points: DMatrix<f64>) -> Result<Self> {
        if points.nrows() == 0 {
            return Err(Error::InvalidParameter("empty point cloud".into()));
        }
        if points.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite point".into()));
        }
        Ok(EmpiricalMeasure { points, weights: None })
    }

    pub fn from_weighted_points(points: DMatrix<f64>, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != points.nrows() {
            return Err(Error::DimensionMismatch("one weight per point".into()));
        }
        if weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidParameter("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!("weights sum to {total}, expected 1")));
        }
        let mut m = Self::from_points(points)?;
        m.weights = Some(weights);
        Ok(m)
    }

    /// Single atom at `x`.
    pub fn dirac(x: &[f64]) -> Result<Self> {
        Self::from_points(DMatrix::from_row_slice(1, x.len(), x))
    }

    pub fn len(&self) -> usize {
        self.points.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.points.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.points.ncols()
    }

    pub fn points(&self) -> &DMatrix<f64> {
        &self.points
    }

    pub fn weight(&self, i: usize) -> f64 {
        match &self.weights {
            Some(w) => w[i],
            None => 1.0 / self.points.nrows() as f64,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.is_none()
    }

    pub fn point(&self, i: usize) -> DVector<f64> {
        self.points.row(i).transpose()
    }

    /// `∫ ‖x‖^q dν`.
    pub fn norm_moment(&self, q: f64) -> f64 {
        (0..self.len()).map(|i| self.weight(i) * self.points.row(i).norm().powf(q)).sum()
    }

    /// Write as CSV: header `x1,…,xk[,weight]`, one point per row. The
    /// weight column is omitted for uniform weights.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let k = self.dim();
        let mut header: Vec<String> = (1..=k).map(|j| format!("x{j}")).collect();
        if self.weights.is_some() {
            header.push("weight".into());
        }
        w.write_record(&header)?;
        for i in 0..self.len() {
            let mut rec: Vec<String> = (0..k).map(|j| self.points[(i, j)].to_string()).collect();
            if self.weights.is_some() {
                rec.push(self.weight(i).to_string());
            }
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: std::io::Read>(input: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let headers = rdr.headers()?.clone();
        let has_weight = headers.iter().last() == Some("weight");
        let k = headers.len() - usize::from(has_weight);
        if k == 0 {
            return Err(Error::Validation("empirical-measure CSV has no coordinates".into()));
        }
        let mut rows = Vec::new();
        let mut weights = Vec::new();
        for record in rdr.records() {
            let record = record?;
            let mut vals = Vec::with_capacity(k);
            for j in 0..k {
                vals.push(record[j].parse::<f64>().map_err(|e| {
                    Error::Validation(format!("bad coordinate {:?}: {e}", &record[j]))
                })?);
            }
            if has_weight {
                weights.push(record[k].parse::<f64>().map_err(|e| {
                    Error::Validation(format!("bad weight {:?}: {e}", &record[k]))
                })?);
            }
            rows.push(vals);
        }
        let n = rows.len();
        if n == 0 {
            return Err(Error::Validation("empirical-measure CSV has no rows".into()));
        }
        let points = DMatrix::from_fn(n, k, |i, j| rows[i][j]);
        if has_weight {
            Self::from_weighted_points(points, weights)
        } else {
            Self::from_points(points)
        }
    }
}

/// A Gaussian measure `N(mean, cov)` on ℝ^k.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeasure {
    mean: DVector<f64>,
    cov: DMatrix<f64>,
}

impl GaussianMeasure {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        let k = mean.len();
        if cov.shape() != (k, k) {
            return Err(Error::DimensionMismatch("covariance must be k×k".into()));
        }
        if (&cov - cov.transpose()).norm() > 1e-12 * (1.0 + cov.norm()) {
            return Err(Error::InvalidParameter("covariance not symmetric".into()));
        }
        let sym = SymMatrix::symmetrize(&cov);
        let min_eig = sym.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min_eig < -1e-12 {
            return Err(Error::InvalidParameter(format!(
                "covariance has negative eigenvalue {min_eig:.3e}"
            )));
        }
        Ok(GaussianMeasure { mean, cov: sym.into_matrix() })
    }

    /// The standard Gaussian γ^⊗k.
    pub fn standard(k: usize) -> Self {
        GaussianMeasure { mean: DVector::zeros(k), cov: DMatrix::identity(k, k) }
    }

    /// Centered isotropic `N(0, σ² I_k)`.
    pub fn isotropic(k: usize, sigma2: f64) -> Result<Self> {
        if sigma2 < 0.0 {
            return Err(Error::InvalidParameter("negative variance".into()));
        }
        Ok(GaussianMeasure { mean: DVector::zeros(k), cov: DMatrix::identity(k, k) * sigma2 })
    }

    /// Centered Gaussian with the given covariance.
    pub fn centered(cov: DMatrix<f64>) -> Result<Self> {
        Self::new(DVector::zeros(cov.nrows()), cov)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Relative entropy `H(ν | γ^⊗k) = ½ (tr Σ + ‖m‖² - k - log det Σ)`;
    /// +∞ when Σ is singular (absolute continuity fails).
    pub fn relative_entropy_to_standard(&self) -> f64 {
        let k = self.dim() as f64;
        match Cholesky::new(self.cov.clone()) {
            Some(chol) => {
                let log_det = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
                0.5 * (self.cov.trace() + self.mean.norm_squared() - k - log_det)
            }
            None => f64::INFINITY,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<DVector<f64>> {
        let chol = Cholesky::new(self.cov.clone())
            .ok_or_else(|| Error::SingularMatrix("covariance not positive definite".into()))?;
        let z = DVector::from_fn(self.dim(), |_, _| rng.sample(StandardNormal));
        Ok(&self.mean + chol.l() * z)
    }
}

// JSON form: {"mean":[...], "cov":[[...]]}
#[derive(Serialize, Deserialize)]
struct GaussianRepr {
    mean: Vec<f64>,
    cov: Vec<Vec<f64>>,
}

impl Serialize for GaussianMeasure {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let k = self.dim();
        GaussianRepr {
            mean: self.mean.iter().copied().collect(),
            cov: (0..k).map(|i| (0..k).map(|j| self.cov[(i, j)]).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for GaussianMeasure {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as DeError;
        let repr = GaussianRepr::deserialize(d)?;
        let k = repr.mean.len();
        if repr.cov.len() != k || repr.cov.iter().any(|row| row.len() != k) {
            return Err(DeError::custom("cov must be k×k"));
        }
        let cov = DMatrix::from_fn(k, k, |i, j| repr.cov[i][j]);
        GaussianMeasure::new(DVector::from_vec(repr.mean), cov).map_err(DeError::custom)
    }
}

/// A real symmetric k×k matrix; construction mirrors one triangle into the
/// other so `M = Mᵀ` holds exactly, entry for entry.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix(DMatrix<f64>);

impl SymMatrix {
    /// Accept a matrix that is symmetric within 1e-12 and store the exactly
    /// symmetrized version.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch("symmetric matrix must be square".into()));
        }
        if (&m - m.transpose()).norm() > 1e-12 * (1.0 + m.norm()) {
            return Err(Error::InvalidParameter("matrix is not symmetric".into()));
        }
        Ok(Self::symmetrize(&m))
    }

    /// Average the two triangles and mirror, so symmetry is exact.
    pub fn symmetrize(m: &DMatrix<f64>) -> Self {
        let k = m.nrows();
        let mut out = DMatrix::zeros(k, k);
        for i in 0..k {
            out[(i, i)] = m[(i, i)];
            for j in (i + 1)..k {
                let v = 0.5 * (m[(i, j)] + m[(j, i)]);
                out[(i, j)] = v;
                out[(j, i)] = v;
            }
        }
        SymMatrix(out)
    }

    pub fn identity(k: usize) -> Self {
        SymMatrix(DMatrix::identity(k, k))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.0.clone()).eigenvalues.iter().copied().collect()
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// The empirical measure of the rows of `√n A`: n uniform-weight points in
/// ℝ^k.
pub fn row_empirical(a: &StiefelFrame) -> EmpiricalMeasure {
    let scale = (a.n() as f64).sqrt();
    EmpiricalMeasure::from_points(a.entries() * scale).expect("frame entries are finite")
}

/// Second-moment matrix `𝒞(ν) = ∫ x⊗x dν` of an empirical measure.
pub fn covariance(m: &EmpiricalMeasure) -> SymMatrix {
    let k = m.dim();
    let mut acc = DMatrix::zeros(k, k);
    for i in 0..m.len() {
        let w = m.weight(i);
        let row = m.points().row(i);
        for a in 0..k {
            for b in a..k {
                acc[(a, b)] += w * row[a] * row[b];
            }
        }
    }
    for a in 0..k {
        for b in (a + 1)..k {
            acc[(b, a)] = acc[(a, b)];
        }
    }
    SymMatrix(acc)
}

/// Second-moment matrix of a Gaussian: `Σ + m⊗m`.
pub fn covariance_gaussian(nu: &GaussianMeasure) -> SymMatrix {
    SymMatrix::symmetrize(&(nu.cov() + nu.mean() * nu.mean().transpose()))
}

/// The Gram–Schmidt map Γ: the iterative recursion
///
/// ```text
/// Γ(M)_ij = ( M_ij - Σ_{h<i} Γ(M)_hi Γ(M)_hj ) / ( M_ii - Σ_{h<i} Γ(M)_hi² )^{1/2}
/// ```
///
/// for `i ≤ j`, which on positive-definite input produces the upper
/// triangular Cholesky factor: `Γ(M)ᵀ Γ(M) = M` with positive diagonal.
pub fn gamma_map(m: &SymMatrix) -> Result<DMatrix<f64>> {
    let k = m.dim();
    let mat = m.matrix();
    let mut g = DMatrix::zeros(k, k);
    let mut pivots = vec![0.0f64; k];
    for j in 0..k {
        for i in 0..=j {
            let mut num = mat[(i, j)];
            for h in 0..i {
                num -= g[(h, i)] * g[(h, j)];
            }
            if i == j {
                if num <= 1e-12 {
                    return Err(Error::SingularMatrix(format!(
                        "non-positive pivot {num:.3e} at index {i}"
                    )));
                }
                pivots[i] = num.sqrt();
                g[(i, j)] = pivots[i];
            } else {
                g[(i, j)] = num / pivots[i];
            }
        }
    }
    Ok(g)
}

/// One-dimensional q-Wasserstein distance between two sorted samples.
///
/// For `q ≥ 1` this is `((1/n) Σ |x_(i) - y_(i)|^q)^{1/q}` (the monotone
/// coupling is optimal); for `q < 1` the q-th-power cost without the outer
/// root, which is then itself a metric. Unequal sample counts fall back to
/// linear quantile interpolation and set the `interpolated` flag.
#[derive(Debug, Clone, Copy)]
pub struct Wasserstein1d {
    pub value: f64,
    pub interpolated: bool,
}

pub fn wasserstein_1d(x: &[f64], y: &[f64], q: f64) -> Result<Wasserstein1d> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::InvalidParameter("empty sample".into()));
    }
    if !(q > 0.0 && q <= 2.0) {
        return Err(Error::InvalidParameter(format!("q must lie in (0, 2], got {q}")));
    }
    debug_assert!(x.windows(2).all(|w| w[0] <= w[1]), "x must be sorted");
    debug_assert!(y.windows(2).all(|w| w[0] <= w[1]), "y must be sorted");
    let (cost, interpolated) = if x.len() == y.len() {
        let n = x.len() as f64;
        (x.iter().zip(y).map(|(a, b)| (a - b).abs().powf(q)).sum::<f64>() / n, false)
    } else {
        let levels = x.len().max(y.len());
        let mut acc = 0.0;
        for i in 0..levels {
            let t = (i as f64 + 0.5) / levels as f64;
            acc += (quantile(x, t) - quantile(y, t)).abs().powf(q);
        }
        (acc / levels as f64, true)
    };
    let value = if q >= 1.0 { cost.powf(1.0 / q) } else { cost };
    Ok(Wasserstein1d { value, interpolated })
}

/// Linear interpolation of the order statistics at level `t ∈ (0, 1)`.
fn quantile(sorted: &[f64], t: f64) -> f64 {
    let n = sorted.len();
    let pos = t * n as f64 - 0.5;
    if pos <= 0.0 {
        return sorted[0];
    }
    if pos >= (n - 1) as f64 {
        return sorted[n - 1];
    }
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
}

/// Sliced surrogate for the q-Wasserstein distance to the standard Gaussian.
///
/// `sliced` averages, over random unit directions θ, the 1D distance between
/// the projected sample ⟨θ, x_i⟩ and an equal-size Gaussian quantile grid;
/// `moment_gap` is `|∫‖x‖^q dν - E‖Z‖^q|`. Their sum mirrors the
/// q-Wasserstein topology: weak convergence plus convergence of q-th
/// moments.
#[derive(Debug, Clone, Copy)]
pub struct SlicedDiagnostic {
    pub sliced: f64,
    pub moment_gap: f64,
}

impl SlicedDiagnostic {
    pub fn total(&self) -> f64 {
        self.sliced + self.moment_gap
    }
}

pub fn wasserstein_to_gaussian(
    m: &EmpiricalMeasure,
    q: f64,
    n_directions: usize,
    rng: &mut impl Rng,
) -> Result<SlicedDiagnostic> {
    if !(q > 0.0 && q < 2.0) {
        return Err(Error::InvalidParameter(format!("q must lie in (0, 2), got {q}")));
    }
    if n_directions == 0 {
        return Err(Error::InvalidParameter("need at least one direction".into()));
    }
    let n = m.len();
    let k = m.dim();
    let grid: Vec<f64> =
        (0..n).map(|i| special::normal_quantile((i as f64 + 0.5) / n as f64)).collect();
    let mut sliced = 0.0;
    for _ in 0..n_directions {
        let theta = random_direction(k, rng);
        let proj: Vec<f64> = (0..n).map(|i| m.points().row(i).transpose().dot(&theta)).collect();
        if m.is_uniform() {
            let mut proj = proj;
            proj.sort_by(f64::total_cmp);
            sliced += wasserstein_1d(&proj, &grid, q)?.value;
        } else {
            // weighted cloud: compare weighted quantiles on the same levels
            let mut pairs: Vec<(f64, f64)> =
                proj.into_iter().enumerate().map(|(i, v)| (v, m.weight(i))).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut acc = 0.0;
            for (i, &g) in grid.iter().enumerate() {
                let t = (i as f64 + 0.5) / n as f64;
                acc += (weighted_quantile(&pairs, t) - g).abs().powf(q);
            }
            acc /= n as f64;
            sliced += if q >= 1.0 { acc.powf(1.0 / q) } else { acc };
        }
    }
    sliced /= n_directions as f64;
    let moment_gap = (m.norm_moment(q) - special::gaussian_norm_moment(k, q)).abs();
    Ok(SlicedDiagnostic { sliced, moment_gap })
}

fn random_direction(k: usize, rng: &mut impl Rng) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(k, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 1e-12 {
            return v / norm;
        }
    }
}

fn weighted_quantile(sorted_pairs: &[(f64, f64)], t: f64) -> f64 {
    let mut acc = 0.0;
    for &(v, w) in sorted_pairs {
        acc += w;
        if acc >= t {
            return v;
        }
    }
    sorted_pairs.last().unwrap().0
}

/// Exact q-Wasserstein distance between two equal-size uniform clouds by
/// optimal assignment. Quadratic memory and cubic time: capped at 512
/// points, intended as a small-instance oracle for the sliced surrogate.
pub fn wasserstein_exact(a: &EmpiricalMeasure, b: &EmpiricalMeasure, q: f64) -> Result<f64> {
    const MAX_POINTS: usize = 512;
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch("equal sample counts required".into()));
    }
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch("equal dimensions required".into()));
    }
    if a.len() > MAX_POINTS {
        return Err(Error::InvalidParameter(format!("exact transport capped at {MAX_POINTS}")));
    }
    if !(a.is_uniform() && b.is_uniform()) {
        return Err(Error::InvalidParameter("exact transport expects uniform weights".into()));
    }
    let n = a.len();
    let costs = pathfinding::matrix::Matrix::from_fn(n, n, |(i, j)| {
        OrderedFloat((a.points().row(i) - b.points().row(j)).norm().powf(q))
    });
    let (total, _assignment) = pathfinding::prelude::kuhn_munkres_min(&costs);
    let mean_cost = total.into_inner() / n as f64;
    Ok(if q >= 1.0 { mean_cost.powf(1.0 / q) } else { mean_cost })
}

/// The rate functional for row-empirical measures of Haar frames, evaluated
/// on a Gaussian: `H(ν|γ^⊗k) + ½ tr(I_k - 𝒞(ν))` when `𝒞(ν) ⪯ I_k`, and
/// +∞ otherwise.
pub fn hk_gaussian(nu: &GaussianMeasure) -> f64 {
    jk_gaussian(nu, &SymMatrix::identity(nu.dim()))
}

/// The joint rate function `𝕁_k(ν, M) = H(ν|γ^⊗k) + ½ tr(M - 𝒞(ν))` when
/// `𝒞(ν) ⪯ M`, +∞ otherwise; `𝕁_k(·, I_k) = ℍ_k`.
pub fn jk_gaussian(nu: &GaussianMeasure, m: &SymMatrix) -> f64 {
    let second = covariance_gaussian(nu);
    let slack = SymMatrix::symmetrize(&(m.matrix() - second.matrix()));
    let min_eig = slack.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    if min_eig < -PSD_TOL {
        return f64::INFINITY;
    }
    let h = nu.relative_entropy_to_standard();
    if !h.is_finite() {
        return f64::INFINITY;
    }
    h + 0.5 * (m.matrix() - second.matrix()).trace()
}

/// Pushforward of a Gaussian under the linear map `x ↦ x t` acting on row
/// vectors: mean `tᵀ m`, covariance `tᵀ Σ t`.
pub fn gaussian_pushforward(nu: &GaussianMeasure, t: &DMatrix<f64>) -> Result<GaussianMeasure> {
    let k = nu.dim();
    if t.shape() != (k, k) {
        return Err(Error::DimensionMismatch("transform must be k×k".into()));
    }
    let svd = t.clone().svd(false, false);
    let (smax, smin) = (
        svd.singular_values.iter().copied().fold(0.0f64, f64::max),
        svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min),
    );
    if smin <= 0.0 || smax / smin >= 1e12 {
        return Err(Error::SingularMatrix(format!(
            "transform condition number {:.3e} too large",
            smax / smin
        )));
    }
    GaussianMeasure::new(t.transpose() * nu.mean(), t.transpose() * nu.cov() * t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_stream;
    use crate::samplers::{bartlett_qr, gaussian_matrix, haar_stiefel};
    use proptest::prelude::*;

    #[test]
    fn row_empirical_of_canonical_frame() {
        let a = StiefelFrame::canonical(6, 2).unwrap();
        let m = row_empirical(&a);
        assert_eq!(m.len(), 6);
        let s = 6.0f64.sqrt();
        assert!((m.point(0)[0] - s).abs() < 1e-15);
        assert!((m.point(1)[1] - s).abs() < 1e-15);
        assert!(m.point(3).norm() < 1e-15);
        // second moment ∫‖x‖² dL = k exactly
        assert!((m.norm_moment(2.0) - 2.0).abs() <= 1e-10);
    }

    #[test]
    fn trace_identity_holds_for_sampled_frames() {
        let mut rng = sample_stream(21, 0);
        for &(n, k) in &[(10usize, 3usize), (100, 2), (500, 4)] {
            let a = haar_stiefel(n, k, &mut rng).unwrap();
            let c = covariance(&row_empirical(&a));
            let trace_gap = (DMatrix::identity(k, k) - c.matrix()).trace();
            assert!(trace_gap.abs() <= 1e-10, "n={n}, k={k}: {trace_gap:.3e}");
            assert!((c.matrix() - DMatrix::identity(k, k)).norm() <= 1e-10);
        }
    }

    #[test]
    fn row_marginals_of_a_large_haar_frame_look_gaussian() {
        use crate::special::{kolmogorov_pvalue, ks_statistic, normal_cdf};
        let mut rng = sample_stream(21, 7);
        let a = haar_stiefel(10_000, 2, &mut rng).unwrap();
        let m = row_empirical(&a);
        for j in 0..2 {
            let mut col: Vec<f64> = (0..m.len()).map(|i| m.points()[(i, j)]).collect();
            col.sort_by(f64::total_cmp);
            let d = ks_statistic(&col, normal_cdf);
            assert!(kolmogorov_pvalue(m.len(), d) > 0.01, "coordinate {j}: KS {d}");
        }
    }

    #[test]
    fn covariance_of_gaussian_is_second_moment() {
        let nu = GaussianMeasure::standard(3);
        assert!((covariance_gaussian(&nu).matrix() - DMatrix::identity(3, 3)).norm() < 1e-15);
        let mean = DVector::from_vec(vec![1.0, -2.0]);
        let cov = DMatrix::from_row_slice(2, 2, &[0.5, 0.1, 0.1, 0.3]);
        let nu = GaussianMeasure::new(mean.clone(), cov.clone()).unwrap();
        let expected = cov + &mean * mean.transpose();
        assert!((covariance_gaussian(&nu).matrix() - expected).norm() < 1e-14);
    }

    #[test]
    fn gamma_map_identity_and_hand_cholesky() {
        let g = gamma_map(&SymMatrix::identity(3)).unwrap();
        assert!((&g - DMatrix::identity(3, 3)).norm() < 1e-15);
        let m = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[4.0, 2.0, 2.0, 5.0])).unwrap();
        let g = gamma_map(&m).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 0.0, 2.0]);
        assert!((&g - expected).norm() < 1e-14);
        assert!((g.transpose() * &g - m.matrix()).norm() < 1e-14);
    }

    #[test]
    fn gamma_map_reconstructs_random_spd_matrices() {
        let mut rng = sample_stream(21, 1);
        for trial in 0..100usize {
            let k = 1 + trial % 8;
            let b = gaussian_matrix(k + 2, k, &mut rng);
            let spd =
                SymMatrix::symmetrize(&(b.transpose() * &b + DMatrix::identity(k, k) * 0.1));
            let g = gamma_map(&spd).unwrap();
            let rel = (g.transpose() * &g - spd.matrix()).norm() / spd.matrix().norm();
            assert!(rel <= 1e-12, "k={k}: rel={rel:.3e}");
            for i in 0..k {
                assert!(g[(i, i)] > 0.0);
                for j in 0..i {
                    assert_eq!(g[(i, j)], 0.0);
                }
            }
        }
    }

    #[test]
    fn gamma_map_rejects_non_positive_pivots() {
        let m = SymMatrix::new(DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0])).unwrap();
        assert!(matches!(gamma_map(&m), Err(Error::SingularMatrix(_))));
    }

    #[test]
    fn triangular_factor_of_bartlett_matches_gamma_of_covariance() {
        // n^{-1/2} R = Γ(𝒞(L^Z)) for the unscaled row-empirical measure of
        // a Gaussian matrix.
        let (n, k) = (200usize, 4usize);
        let mut rng = sample_stream(21, 2);
        for _ in 0..100 {
            let z = gaussian_matrix(n, k, &mut rng);
            let pair = bartlett_qr(&z).unwrap();
            let lz = EmpiricalMeasure::from_points(z.clone()).unwrap();
            let g = gamma_map(&covariance(&lz)).unwrap();
            let scaled_r = &pair.r / (n as f64).sqrt();
            let max_gap = (&g - &scaled_r).abs().max();
            assert!(max_gap <= 1e-9, "max entrywise gap {max_gap:.3e}");
        }
    }

    #[test]
    fn wasserstein_1d_examples() {
        assert_eq!(wasserstein_1d(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0], 1.0).unwrap().value, 0.0);
        let w = wasserstein_1d(&[0.0, 0.0], &[1.0, 1.0], 1.0).unwrap();
        assert!((w.value - 1.0).abs() < 1e-15 && !w.interpolated);
        let w = wasserstein_1d(&[0.0, 2.0], &[1.0, 3.0], 2.0).unwrap();
        assert!((w.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn wasserstein_1d_unequal_counts_flags_interpolation() {
        let w = wasserstein_1d(&[0.0, 1.0, 2.0, 3.0], &[0.0, 1.5, 3.0], 1.0).unwrap();
        assert!(w.interpolated);
        assert!(w.value < 0.5, "quantile fallback should stay small, got {}", w.value);
    }

    proptest! {
        #[test]
        fn wasserstein_1d_shift_and_identity(
            mut xs in proptest::collection::vec(-50.0..50.0f64, 2..40),
            shift in -5.0..5.0f64,
        ) {
            xs.sort_by(f64::total_cmp);
            let shifted: Vec<f64> = xs.iter().map(|v| v + shift).collect();
            // distance to itself vanishes, constant shift costs |shift|
            prop_assert!(wasserstein_1d(&xs, &xs, 1.0).unwrap().value < 1e-12);
            let w = wasserstein_1d(&xs, &shifted, 1.0).unwrap().value;
            prop_assert!((w - shift.abs()).abs() < 1e-9);
        }

        #[test]
        fn gamma_reconstruction_property(seed in 0u64..1000) {
            let mut rng = sample_stream(seed, 99);
            let b = gaussian_matrix(5, 3, &mut rng);
            let spd = SymMatrix::symmetrize(&(b.transpose() * &b + DMatrix::identity(3, 3) * 0.1));
            let g = gamma_map(&spd).unwrap();
            let rel = (g.transpose() * &g - spd.matrix()).norm() / spd.matrix().norm();
            prop_assert!(rel <= 1e-12);
        }
    }

    #[test]
    fn sliced_diagnostic_on_exact_quantile_grid_is_small() {
        let n = 1000;
        let grid =
            DMatrix::from_fn(n, 1, |i, _| special::normal_quantile((i as f64 + 0.5) / n as f64));
        let m = EmpiricalMeasure::from_points(grid).unwrap();
        let mut rng = sample_stream(22, 0);
        let d = wasserstein_to_gaussian(&m, 1.0, 8, &mut rng).unwrap();
        assert!(d.total() <= 2e-2, "diagnostic {}", d.total());
    }

    #[test]
    fn sliced_diagnostic_of_degenerate_measure_keeps_the_moment_gap() {
        let m = EmpiricalMeasure::from_points(DMatrix::zeros(64, 2)).unwrap();
        let mut rng = sample_stream(22, 1);
        let q = 1.0;
        let d = wasserstein_to_gaussian(&m, q, 8, &mut rng).unwrap();
        let expected = special::gaussian_norm_moment(2, q);
        assert!((d.moment_gap - expected).abs() < 1e-12);
        assert!(d.sliced > 0.5);
    }

    #[test]
    fn sliced_diagnostic_shrinks_for_haar_rows() {
        let mut rng = sample_stream(22, 2);
        let a = haar_stiefel(10_000, 2, &mut rng).unwrap();
        let d = wasserstein_to_gaussian(&row_empirical(&a), 1.0, 16, &mut rng).unwrap();
        assert!(d.total() <= 0.05, "diagnostic {}", d.total());
    }

    #[test]
    fn exact_transport_agrees_with_sorted_pairing_in_1d() {
        let x = EmpiricalMeasure::from_points(DMatrix::from_column_slice(
            4,
            1,
            &[0.0, 1.0, 2.0, 3.0],
        ))
        .unwrap();
        let y = EmpiricalMeasure::from_points(DMatrix::from_column_slice(
            4,
            1,
            &[0.5, 1.5, 2.5, 3.5],
        ))
        .unwrap();
        let exact = wasserstein_exact(&x, &y, 1.0).unwrap();
        assert!((exact - 0.5).abs() < 1e-12);
        let w2 = wasserstein_exact(&x, &y, 2.0).unwrap();
        assert!((w2 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sliced_projections_never_exceed_exact_transport() {
        // every 1D projection contracts distances, so each single-direction
        // distance lower-bounds the exact k-dim transport distance
        let mut rng = sample_stream(22, 3);
        let n = 64;
        let a = EmpiricalMeasure::from_points(gaussian_matrix(n, 2, &mut rng)).unwrap();
        let b = EmpiricalMeasure::from_points(gaussian_matrix(n, 2, &mut rng) * 1.4).unwrap();
        let exact = wasserstein_exact(&a, &b, 1.0).unwrap();
        for _ in 0..8 {
            let theta = random_direction(2, &mut rng);
            let mut pa: Vec<f64> =
                (0..n).map(|i| a.points().row(i).transpose().dot(&theta)).collect();
            let mut pb: Vec<f64> =
                (0..n).map(|i| b.points().row(i).transpose().dot(&theta)).collect();
            pa.sort_by(f64::total_cmp);
            pb.sort_by(f64::total_cmp);
            let w1 = wasserstein_1d(&pa, &pb, 1.0).unwrap().value;
            assert!(w1 <= exact + 1e-10, "sliced {w1} > exact {exact}");
        }
    }

    #[test]
    fn hk_closed_form_on_isotropic_gaussians() {
        assert_eq!(hk_gaussian(&GaussianMeasure::standard(3)), 0.0);
        let nu = GaussianMeasure::isotropic(2, 0.25).unwrap();
        assert!((hk_gaussian(&nu) - 4.0f64.ln()).abs() < 1e-12);
        // 𝒞(ν) ⋠ I_k
        assert_eq!(hk_gaussian(&GaussianMeasure::isotropic(2, 2.0).unwrap()), f64::INFINITY);
        // singular covariance: relative entropy undefined
        assert_eq!(hk_gaussian(&GaussianMeasure::isotropic(2, 0.0).unwrap()), f64::INFINITY);
    }

    #[test]
    fn hk_is_positive_away_from_the_standard_gaussian() {
        for sigma2 in [0.1, 0.4, 0.7, 0.999] {
            let nu = GaussianMeasure::isotropic(3, sigma2).unwrap();
            assert!(hk_gaussian(&nu) > 0.0);
        }
        let shifted =
            GaussianMeasure::new(DVector::from_vec(vec![0.3, 0.0]), DMatrix::identity(2, 2) * 0.8)
                .unwrap();
        assert!(hk_gaussian(&shifted) > 0.0);
    }

    #[test]
    fn hk_is_convex_in_the_isotropic_variance() {
        let k = 2;
        let grid: Vec<f64> = (1..=40).map(|i| i as f64 / 40.0).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&s2| hk_gaussian(&GaussianMeasure::isotropic(k, s2).unwrap()))
            .collect();
        for w in vals.windows(3) {
            assert!(w[0] - 2.0 * w[1] + w[2] >= -1e-9);
        }
    }

    #[test]
    fn jk_at_identity_matches_hk() {
        let nu = GaussianMeasure::isotropic(2, 0.5).unwrap();
        assert_eq!(jk_gaussian(&nu, &SymMatrix::identity(2)), hk_gaussian(&nu));
        assert_eq!(jk_gaussian(&GaussianMeasure::standard(2), &SymMatrix::identity(2)), 0.0);
    }

    #[test]
    fn jk_infimum_over_scaling_recovers_hk() {
        // inf over diagonal M of 𝕁_k(pushforward of ν along Γ(M), M) equals
        // ℍ_k(ν); the residual Σ((M_ii-1)/2 - log Γ(M)_ii) vanishes at M = I.
        let nu = GaussianMeasure::isotropic(2, 0.5).unwrap();
        let target = hk_gaussian(&nu);
        assert!((target - 2.0f64.ln()).abs() < 1e-12);
        let mut best = f64::INFINITY;
        let mut at_one = f64::INFINITY;
        for i in 0..=400 {
            let m_ii = 0.8 + 0.001 * i as f64;
            let m = SymMatrix::symmetrize(&(DMatrix::identity(2, 2) * m_ii));
            let g = gamma_map(&m).unwrap();
            let pushed = gaussian_pushforward(&nu, &g).unwrap();
            let val = jk_gaussian(&pushed, &m);
            best = best.min(val);
            if (m_ii - 1.0).abs() < 1e-12 {
                at_one = val;
            }
        }
        assert!((best - target).abs() <= 1e-6, "best {best} vs target {target}");
        assert!((at_one - target).abs() <= 1e-12);
        assert!(best >= target - 1e-12);
    }

    #[test]
    fn pushforward_examples() {
        let nu = GaussianMeasure::standard(2);
        let id = gaussian_pushforward(&nu, &DMatrix::identity(2, 2)).unwrap();
        assert_eq!(id, nu);
        let t = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 3.0]);
        let pushed = gaussian_pushforward(&nu, &t).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        assert!((pushed.cov() - expected).norm() < 1e-14);
        let singular = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(gaussian_pushforward(&nu, &singular).is_err());
    }

    #[test]
    fn pushforward_second_moment_transforms_by_conjugation() {
        // 𝒞(pushforward) = tᵀ 𝒞(ν) t, checked against 10⁵ Monte Carlo draws
        let nu = GaussianMeasure::new(
            DVector::from_vec(vec![0.2, -0.1]),
            DMatrix::from_row_slice(2, 2, &[0.6, 0.2, 0.2, 0.9]),
        )
        .unwrap();
        let t = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.2, 0.8]);
        let pushed = gaussian_pushforward(&nu, &t).unwrap();
        let analytic = t.transpose() * covariance_gaussian(&nu).matrix() * &t;
        assert!((covariance_gaussian(&pushed).matrix() - &analytic).norm() < 1e-12);

        let m = 100_000;
        let mut rng = sample_stream(22, 5);
        let mut acc = DMatrix::zeros(2, 2);
        for _ in 0..m {
            let x = pushed.sample(&mut rng).unwrap();
            acc += &x * x.transpose();
        }
        acc /= m as f64;
        assert!((acc - analytic).norm() < 0.02);
    }

    #[test]
    fn gaussian_json_round_trip() {
        let nu = GaussianMeasure::new(
            DVector::from_vec(vec![0.5, -1.0]),
            DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.2, 0.7]),
        )
        .unwrap();
        let json = serde_json::to_string(&nu).unwrap();
        let back: GaussianMeasure = serde_json::from_str(&json).unwrap();
        assert_eq!(nu, back);
        assert!(json.contains("\"mean\""));
        assert!(json.contains("\"cov\""));
    }

    #[test]
    fn empirical_measure_csv_round_trip() {
        let points = DMatrix::from_row_slice(3, 2, &[0.1, 0.2, -1.0, 2.0, 3.5, -0.25]);
        let m = EmpiricalMeasure::from_weighted_points(points, vec![0.25, 0.5, 0.25]).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let back = EmpiricalMeasure::read_csv(buf.as_slice()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn empirical_measure_validates_weights() {
        let pts = DMatrix::zeros(2, 1);
        assert!(EmpiricalMeasure::from_weighted_points(pts.clone(), vec![0.6, 0.6]).is_err());
        assert!(EmpiricalMeasure::from_weighted_points(pts, vec![-0.5, 1.5]).is_err());
        let nan = DMatrix::from_row_slice(1, 1, &[f64::NAN]);
        assert!(EmpiricalMeasure::from_points(nan).is_err());
    }
}
