//! Elementary symmetric functions, Gårding cones and admissible curvature
//! functions `(f, Γ)`.
//!
//! Everything operates on plain slices so it works in any dimension; the
//! [`EigenvalueVector`] newtype carries the `n ≥ 3` geometric invariant for
//! callers that work with Schouten spectra.

use std::fmt;
use std::sync::Arc;

use itertools::Itertools;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;

/// All elementary symmetric functions `σ_0, …, σ_n` of `values`.
///
/// Computed by expanding `∏ (1 + λ_i x)` one factor at a time, which only
/// ever adds products of the inputs.
pub fn elementary_symmetric_all(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut e = vec![0.0; n + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for j in (1..=i + 1).rev() {
            e[j] += v * e[j - 1];
        }
    }
    e
}

fn check_k(values: &[f64], k: usize) -> Result<()> {
    if k > values.len() {
        return Err(Error::KOutOfRange { k, n: values.len() });
    }
    Ok(())
}

/// `σ_k(λ)`, with `σ_0 = 1`.
pub fn sigma_k(values: &[f64], k: usize) -> Result<f64> {
    check_k(values, k)?;
    if k == 0 {
        return Ok(1.0);
    }
    let n = values.len();
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &v) in values.iter().enumerate() {
        for j in (1..=(i + 1).min(k)).rev() {
            e[j] += v * e[j - 1];
        }
    }
    debug_assert!(k <= n);
    Ok(e[k])
}

/// `σ_k` by explicit enumeration of all `k`-subsets. Exponential cost; meant
/// as a cross-check for `n ≤ 16`.
pub fn sigma_k_expanded(values: &[f64], k: usize) -> Result<f64> {
    check_k(values, k)?;
    if values.len() > 16 {
        return Err(Error::Dimension { n: values.len(), reason: "subset expansion limited to n <= 16" });
    }
    Ok(values
        .iter()
        .combinations(k)
        .map(|subset| subset.into_iter().product::<f64>())
        .sum())
}

/// `∂σ_k/∂λ_i = σ_{k-1}(λ with entry i removed)`.
pub fn sigma_k_gradient(values: &[f64], k: usize) -> Result<Vec<f64>> {
    check_k(values, k)?;
    if k == 0 {
        return Ok(vec![0.0; values.len()]);
    }
    let mut rest = Vec::with_capacity(values.len().saturating_sub(1));
    Ok((0..values.len())
        .map(|i| {
            rest.clear();
            rest.extend(values.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v));
            sigma_k(&rest, k - 1).expect("k - 1 <= n - 1")
        })
        .collect())
}

/// `λ ∈ Γ_k`: every `σ_l`, `1 ≤ l ≤ k`, strictly positive. Points on the
/// boundary of the cone are not members.
pub fn in_gamma_k(values: &[f64], k: usize) -> bool {
    if k == 0 || k > values.len() {
        return false;
    }
    let e = elementary_symmetric_all(values);
    e[1..=k].iter().all(|&s| s > 0.0)
}

/// A real spectrum of dimension `n ≥ 3`, stored in non-increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueVector {
    values: Vec<f64>,
}

impl EigenvalueVector {
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Dimension { n: values.len(), reason: "eigenvalue vectors need n >= 3" });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Input("non-finite eigenvalue".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(Self { values })
    }

    /// The rank-one-plus-identity spectrum: `radial` once and `tangential`
    /// with multiplicity `n - 1`.
    pub fn radial(radial: f64, tangential: f64, n: usize) -> Result<Self> {
        let mut v = vec![tangential; n];
        if n > 0 {
            v[0] = radial;
        }
        Self::new(v)
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn sigma(&self, k: usize) -> Result<f64> {
        sigma_k(&self.values, k)
    }

    pub fn in_cone(&self, cone: &ConeSpec) -> bool {
        in_gamma_k_vec(self, cone)
    }
}

impl AsRef<[f64]> for EigenvalueVector {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// The Gårding cone `Γ_k ⊂ ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ConeSpec {
    pub k: usize,
    pub n: usize,
}

impl ConeSpec {
    pub fn new(k: usize, n: usize) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        Ok(Self { k, n })
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.n && in_gamma_k(values, self.k)
    }
}

/// Cone membership for a spectrum; a dimension mismatch is never a member.
pub fn in_gamma_k_vec(values: &EigenvalueVector, cone: &ConeSpec) -> bool {
    cone.contains(values.as_slice())
}

/// Central-difference gradient with step `1e-5·max(1, |λ_i|)`.
pub fn numerical_gradient(f: impl Fn(&[f64]) -> f64, x: &[f64]) -> Vec<f64> {
    let mut probe = x.to_vec();
    (0..x.len())
        .map(|i| {
            let h = 1e-5 * x[i].abs().max(1.0);
            probe[i] = x[i] + h;
            let fp = f(&probe);
            probe[i] = x[i] - h;
            let fm = f(&probe);
            probe[i] = x[i];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// A positive concave function on an open symmetric cone that vanishes on
/// the cone's boundary.
pub trait DefiningFunction: Send + Sync {
    fn value(&self, values: &[f64]) -> f64;

    fn in_cone(&self, values: &[f64]) -> bool;

    fn gradient(&self, values: &[f64]) -> Vec<f64> {
        numerical_gradient(|x| self.value(x), values)
    }

    /// Whether `value` is already permutation invariant. Non-symmetric
    /// functions are symmetrized before use.
    fn is_symmetric(&self) -> bool {
        false
    }

    fn describe(&self) -> String;
}

/// `h = σ_k^{1/k}` on `Γ_k`.
#[derive(Debug, Clone, Copy)]
pub struct SigmaRoot {
    pub k: usize,
}

impl DefiningFunction for SigmaRoot {
    fn value(&self, values: &[f64]) -> f64 {
        sigma_k(values, self.k).map(|s| s.max(0.0).powf(1.0 / self.k as f64)).unwrap_or(f64::NAN)
    }

    fn in_cone(&self, values: &[f64]) -> bool {
        in_gamma_k(values, self.k)
    }

    fn gradient(&self, values: &[f64]) -> Vec<f64> {
        let k = self.k as f64;
        let s = sigma_k(values, self.k).unwrap_or(f64::NAN);
        let scale = s.powf(1.0 / k - 1.0) / k;
        sigma_k_gradient(values, self.k)
            .unwrap_or_else(|_| vec![f64::NAN; values.len()])
            .into_iter()
            .map(|g| scale * g)
            .collect()
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("sigma_{}^(1/{})", self.k, self.k)
    }
}

/// Permutation average of an arbitrary defining function.
pub struct Symmetrized {
    inner: Arc<dyn DefiningFunction>,
}

impl Symmetrized {
    pub fn new(inner: Arc<dyn DefiningFunction>) -> Self {
        Self { inner }
    }
}

impl DefiningFunction for Symmetrized {
    fn value(&self, values: &[f64]) -> f64 {
        let n = values.len();
        let mut count = 0usize;
        let mut total = 0.0;
        let mut permuted = vec![0.0; n];
        for perm in (0..n).permutations(n) {
            for (slot, &src) in permuted.iter_mut().zip(&perm) {
                *slot = values[src];
            }
            total += self.inner.value(&permuted);
            count += 1;
        }
        total / count as f64
    }

    fn in_cone(&self, values: &[f64]) -> bool {
        self.inner.in_cone(values)
    }

    fn is_symmetric(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("sym({})", self.inner.describe())
    }
}

/// Where an `(f, Γ)` pair came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    /// `σ_k^{1/k}` on `Γ_k`.
    SigmaRoot { k: usize },
    /// Un-rooted `σ_k` on `Γ_k` (homogeneous of degree `k`, kept for
    /// contrast in axiom checks).
    Sigma { k: usize },
    /// `f(λ) = [λ]·h(λ/[λ])^α` built from a defining function.
    ConcaveFromDefining { h: String, alpha: f64 },
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::SigmaRoot { k } => write!(f, "sigma_{k}^(1/{k})"),
            Provenance::Sigma { k } => write!(f, "sigma_{k}"),
            Provenance::ConcaveFromDefining { h, alpha } => write!(f, "concave(h={h}, alpha={alpha})"),
        }
    }
}

#[derive(Clone)]
enum Kind {
    SigmaRoot(usize),
    Sigma(usize),
    Concave { h: Arc<dyn DefiningFunction>, alpha: f64 },
}

/// An admissible pair `(f, Γ)`: a symmetric function defined on an open
/// symmetric cone.
#[derive(Clone)]
pub struct SymmetricCurvatureFunction {
    n: usize,
    kind: Kind,
}

impl fmt::Debug for SymmetricCurvatureFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SymmetricCurvatureFunction")
            .field("n", &self.n)
            .field("provenance", &self.provenance().to_string())
            .finish()
    }
}

/// Default exponent for [`build_concave_f`].
pub const DEFAULT_ALPHA: f64 = 0.5;

impl SymmetricCurvatureFunction {
    /// `(σ_k^{1/k}, Γ_k)`.
    pub fn sigma_root(k: usize, n: usize) -> Result<Self> {
        ConeSpec::new(k, n)?;
        Ok(Self { n, kind: Kind::SigmaRoot(k) })
    }

    /// `(σ_k, Γ_k)` without the root.
    pub fn sigma(k: usize, n: usize) -> Result<Self> {
        ConeSpec::new(k, n)?;
        Ok(Self { n, kind: Kind::Sigma(k) })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn provenance(&self) -> Provenance {
        match &self.kind {
            Kind::SigmaRoot(k) => Provenance::SigmaRoot { k: *k },
            Kind::Sigma(k) => Provenance::Sigma { k: *k },
            Kind::Concave { h, alpha } => Provenance::ConcaveFromDefining { h: h.describe(), alpha: *alpha },
        }
    }

    /// Declared homogeneity of degree one.
    pub fn is_homogeneous(&self) -> bool {
        !matches!(self.kind, Kind::Sigma(k) if k != 1)
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        if values.len() != self.n {
            return false;
        }
        match &self.kind {
            Kind::SigmaRoot(k) | Kind::Sigma(k) => in_gamma_k(values, *k),
            Kind::Concave { h, .. } => h.in_cone(values) && values.iter().sum::<f64>() > 0.0,
        }
    }

    fn check(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.n {
            return Err(Error::Input(format!("expected {} eigenvalues, got {}", self.n, values.len())));
        }
        if !self.contains(values) {
            return Err(Error::ConeViolation);
        }
        Ok(())
    }

    pub fn value(&self, values: &[f64]) -> Result<f64> {
        self.check(values)?;
        Ok(self.value_unchecked(values))
    }

    fn value_unchecked(&self, values: &[f64]) -> f64 {
        match &self.kind {
            Kind::SigmaRoot(k) => SigmaRoot { k: *k }.value(values),
            Kind::Sigma(k) => sigma_k(values, *k).unwrap_or(f64::NAN),
            Kind::Concave { h, alpha } => {
                let trace: f64 = values.iter().sum();
                let normalized: Vec<f64> = values.iter().map(|v| v / trace).collect();
                trace * h.value(&normalized).powf(*alpha)
            }
        }
    }

    pub fn gradient(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.check(values)?;
        Ok(self.gradient_unchecked(values))
    }

    fn gradient_unchecked(&self, values: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::SigmaRoot(k) => SigmaRoot { k: *k }.gradient(values),
            Kind::Sigma(k) => sigma_k_gradient(values, *k).unwrap_or_else(|_| vec![f64::NAN; values.len()]),
            Kind::Concave { h, alpha } => {
                // ∂_i f = g(λ') + ∂_i g(λ') − ∇g(λ')·λ',  g = h^α,  λ' = λ/[λ]
                let trace: f64 = values.iter().sum();
                let normalized: Vec<f64> = values.iter().map(|v| v / trace).collect();
                let hv = h.value(&normalized);
                let g = hv.powf(*alpha);
                let dg: Vec<f64> =
                    h.gradient(&normalized).into_iter().map(|d| alpha * hv.powf(alpha - 1.0) * d).collect();
                let radial: f64 = dg.iter().zip(&normalized).map(|(a, b)| a * b).sum();
                dg.iter().map(|d| g + d - radial).collect()
            }
        }
    }

    /// Symmetrized central-difference Hessian built from the gradient, base
    /// step `1e-5·‖λ‖`, with one Richardson extrapolation (steps `h`, `2h`)
    /// so truncation error stays below the concavity tolerance close to the
    /// cone boundary.
    pub fn numerical_hessian(&self, values: &[f64]) -> Result<DMatrix<f64>> {
        self.check(values)?;
        let n = values.len();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let step = 1e-5 * norm;
        let mut probe = values.to_vec();
        let mut column = |j: usize, h: f64| -> Vec<f64> {
            probe[j] = values[j] + h;
            let gp = self.gradient_unchecked(&probe);
            probe[j] = values[j] - h;
            let gm = self.gradient_unchecked(&probe);
            probe[j] = values[j];
            gp.iter().zip(&gm).map(|(a, b)| (a - b) / (2.0 * h)).collect()
        };
        let mut hess = DMatrix::zeros(n, n);
        for j in 0..n {
            let fine = column(j, step);
            let coarse = column(j, 2.0 * step);
            for i in 0..n {
                hess[(i, j)] = (4.0 * fine[i] - coarse[i]) / 3.0;
            }
        }
        Ok((&hess + hess.transpose()) * 0.5)
    }

    /// The constant `δ` in `Σ ∂_i f ≥ δ` on the cone.
    ///
    /// For a function built from a defining function `h` with exponent `α`
    /// this is `n·h(1/n,…,1/n)^{1/α}`; for the builtin functions it is
    /// `n·f(1/n,…,1/n)` (concavity plus homogeneity).
    pub fn delta(&self) -> f64 {
        let n = self.n as f64;
        let center = vec![1.0 / n; self.n];
        match &self.kind {
            Kind::Concave { h, alpha } => n * h.value(&center).powf(1.0 / alpha),
            _ => n * self.value_unchecked(&center),
        }
    }

    /// `n·f(1/n,…,1/n)`, the lower bound for `Σ ∂_i f` obtained directly from
    /// concavity and homogeneity of `f`.
    pub fn center_bound(&self) -> f64 {
        let n = self.n as f64;
        n * self.value_unchecked(&vec![1.0 / n; self.n])
    }

    /// Exponent `α` for functions built from a defining function.
    pub fn alpha(&self) -> Option<f64> {
        match &self.kind {
            Kind::Concave { alpha, .. } => Some(*alpha),
            _ => None,
        }
    }
}

/// Builds `f(λ) = [λ]·g(λ/[λ])`, `g = h^α`, from a concave defining function
/// `h` of a cone `Γ` with `Γ_n ⊂ Γ ⊂ Γ_1`.
///
/// The result is symmetric, homogeneous of degree one, concave, and
/// satisfies `∂_i f ≥ (1 − α) f / [λ]`. Non-symmetric `h` is replaced by its
/// permutation average first.
pub fn build_concave_f(h: Arc<dyn DefiningFunction>, alpha: f64, n: usize) -> Result<SymmetricCurvatureFunction> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    if n == 0 {
        return Err(Error::Dimension { n, reason: "empty eigenvalue vectors" });
    }
    let h: Arc<dyn DefiningFunction> = if h.is_symmetric() { h } else { Arc::new(Symmetrized::new(h)) };
    let center = vec![1.0 / n as f64; n];
    let hc = h.value(&center);
    if !(hc > 0.0) || !h.in_cone(&center) {
        return Err(Error::Domain(format!("defining function must be positive at the cone axis, h(e/n) = {hc}")));
    }
    Ok(SymmetricCurvatureFunction { n, kind: Kind::Concave { h, alpha } })
}

/// The deformed point `tλ + (1 − t)σ_1(λ)e`.
pub fn homotopy_point(values: &[f64], t: f64) -> Vec<f64> {
    let trace: f64 = values.iter().sum();
    values.iter().map(|v| t * v + (1.0 - t) * trace).collect()
}

/// `λ ∈ Γ_t` where `Γ_t = {λ : tλ + (1 − t)σ_1(λ)e ∈ Γ}`.
pub fn homotopy_membership(values: &[f64], t: f64, cone: impl Fn(&[f64]) -> bool) -> Result<bool> {
    check_t(t)?;
    Ok(cone(&homotopy_point(values, t)))
}

/// `f_t(λ) = f(tλ + (1 − t)σ_1(λ)e)`.
pub fn homotopy_f(values: &[f64], t: f64, f: &SymmetricCurvatureFunction) -> Result<f64> {
    check_t(t)?;
    f.value(&homotopy_point(values, t))
}

/// Boundary constant along the deformation: `t c + (1 − t)` for `c > 0`,
/// zero for `c = 0`. Negative constants are not deformed by this homotopy.
pub fn homotopy_boundary_constant(c: f64, t: f64) -> Result<f64> {
    check_t(t)?;
    if c > 0.0 {
        Ok(t * c + (1.0 - t))
    } else if c == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!("boundary constant must be non-negative, got {c}")))
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::Domain(format!("deformation parameter t must lie in [0, 1], got {t}")));
    }
    Ok(())
}

/// The pair `(Γ_t, f_t)` at a fixed deformation parameter.
#[derive(Debug, Clone)]
pub struct HomotopyCone<'a> {
    pub t: f64,
    pub base: &'a SymmetricCurvatureFunction,
}

impl<'a> HomotopyCone<'a> {
    pub fn new(t: f64, base: &'a SymmetricCurvatureFunction) -> Result<Self> {
        check_t(t)?;
        Ok(Self { t, base })
    }

    pub fn contains(&self, values: &[f64]) -> bool {
        self.base.contains(&homotopy_point(values, self.t))
    }

    pub fn value(&self, values: &[f64]) -> Result<f64> {
        homotopy_f(values, self.t, self.base)
    }
}

/// One axiom check over a sample set.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub max_violation: f64,
    pub tolerance: f64,
    /// Index of the sample attaining `max_violation`.
    pub worst_sample: Option<usize>,
}

impl AxiomCheck {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self { name, passed: true, max_violation: 0.0, tolerance, worst_sample: None }
    }

    fn record(&mut self, index: usize, violation: f64) {
        let violation = if violation.is_nan() { f64::INFINITY } else { violation };
        if violation > self.max_violation || self.worst_sample.is_none() {
            self.max_violation = self.max_violation.max(violation);
            self.worst_sample = Some(index);
        }
        if violation > self.tolerance {
            self.passed = false;
        }
    }
}

/// Tolerances for [`verify_axioms`].
#[derive(Debug, Clone, Copy)]
pub struct AxiomTolerances {
    pub symmetry: f64,
    pub concavity: f64,
    pub homogeneity: f64,
    pub euler: f64,
    pub delta: f64,
}

impl Default for AxiomTolerances {
    fn default() -> Self {
        Self { symmetry: 1e-12, concavity: 1e-8, homogeneity: 1e-10, euler: 1e-8, delta: 1e-8 }
    }
}

/// Axiom report for an `(f, Γ)` pair; every check is evaluated even when an
/// earlier one fails.
#[derive(Debug, Clone, serde::Serialize)]
pub struct AxiomReport {
    pub provenance: String,
    pub samples: usize,
    /// Samples outside the cone (skipped).
    pub rejected: usize,
    pub symmetry: AxiomCheck,
    pub positivity: AxiomCheck,
    pub monotonicity: AxiomCheck,
    pub concavity: AxiomCheck,
    pub homogeneity: AxiomCheck,
    pub euler: AxiomCheck,
    pub delta_bound: AxiomCheck,
    /// `∂_i f·[λ]/f ≥ 1 − α`, only for functions built from a defining
    /// function.
    pub trace_ratio: Option<AxiomCheck>,
    pub delta: f64,
    /// Smallest `Σ ∂_i f` seen over the samples.
    pub min_gradient_sum: f64,
}

impl AxiomReport {
    pub fn checks(&self) -> Vec<&AxiomCheck> {
        let mut v = vec![
            &self.symmetry,
            &self.positivity,
            &self.monotonicity,
            &self.concavity,
            &self.homogeneity,
            &self.euler,
            &self.delta_bound,
        ];
        if let Some(c) = &self.trace_ratio {
            v.push(c);
        }
        v
    }

    pub fn all_passed(&self) -> bool {
        self.checks().iter().all(|c| c.passed)
    }
}

/// Checks symmetry, positivity, strict monotonicity, concavity, degree-one
/// homogeneity, the Euler identity and the `Σ ∂_i f ≥ δ` bound at every
/// sample inside the cone.
///
/// Violations are relative for the scale-free identities (symmetry,
/// homogeneity, Euler) and absolute otherwise.
pub fn verify_axioms(f: &SymmetricCurvatureFunction, samples: &[Vec<f64>], tol: AxiomTolerances) -> AxiomReport {
    let mut symmetry = AxiomCheck::new("symmetry", tol.symmetry);
    let mut positivity = AxiomCheck::new("positivity", 0.0);
    let mut monotonicity = AxiomCheck::new("monotonicity", 0.0);
    let mut concavity = AxiomCheck::new("concavity", tol.concavity);
    let mut homogeneity = AxiomCheck::new("homogeneity", tol.homogeneity);
    let mut euler = AxiomCheck::new("euler", tol.euler);
    let mut delta_bound = AxiomCheck::new("delta_bound", tol.delta);
    let alpha = f.alpha();
    let mut trace_ratio = alpha.map(|_| AxiomCheck::new("trace_ratio", tol.delta));
    let delta = f.delta();
    let mut min_gradient_sum = f64::INFINITY;
    let mut rejected = 0;

    for (idx, x) in samples.iter().enumerate() {
        if !f.contains(x) {
            rejected += 1;
            continue;
        }
        let value = f.value_unchecked(x);
        let scale = value.abs().max(f64::MIN_POSITIVE);

        // reversal and a cyclic shift generate enough permutations to catch
        // asymmetric formulas
        let mut reversed = x.clone();
        reversed.reverse();
        let mut shifted = x.clone();
        shifted.rotate_left(1);
        for p in [&reversed, &shifted] {
            let fp = if f.contains(p) { f.value_unchecked(p) } else { f64::NAN };
            symmetry.record(idx, (fp - value).abs() / scale);
        }

        positivity.record(idx, if value > 0.0 { 0.0 } else { -value + f64::MIN_POSITIVE });

        let grad = f.gradient_unchecked(x);
        let min_partial = grad.iter().copied().fold(f64::INFINITY, f64::min);
        monotonicity.record(idx, if min_partial > 0.0 { 0.0 } else { -min_partial + f64::MIN_POSITIVE });

        match f.numerical_hessian(x).and_then(|h| linalg::symmetric_eigenvalues(&h)) {
            Ok(ev) => concavity.record(idx, ev[0].max(0.0)),
            Err(_) => concavity.record(idx, f64::INFINITY),
        }

        for t in [0.5, 2.0, 3.7] {
            let scaled: Vec<f64> = x.iter().map(|v| t * v).collect();
            homogeneity.record(idx, (f.value_unchecked(&scaled) - t * value).abs() / (t * scale));
        }

        let euler_sum: f64 = grad.iter().zip(x).map(|(g, v)| g * v).sum();
        euler.record(idx, (euler_sum - value).abs() / scale);

        let gsum: f64 = grad.iter().sum();
        min_gradient_sum = min_gradient_sum.min(gsum);
        delta_bound.record(idx, (delta - gsum).max(0.0));

        if let (Some(check), Some(a)) = (trace_ratio.as_mut(), alpha) {
            let trace: f64 = x.iter().sum();
            let worst = grad.iter().map(|g| g * trace / value).fold(f64::INFINITY, f64::min);
            check.record(idx, ((1.0 - a) - worst).max(0.0));
        }
    }

    AxiomReport {
        provenance: f.provenance().to_string(),
        samples: samples.len(),
        rejected,
        symmetry,
        positivity,
        monotonicity,
        concavity,
        homogeneity,
        euler,
        delta_bound,
        trace_ratio,
        delta,
        min_gradient_sum,
    }
}

/// Random points of `Γ_k ⊂ ℝⁿ` drawn from a box of half-width `spread`
/// around `e`, keeping only points whose `σ_k^{1/k}` exceeds `margin·‖λ‖`.
pub fn sample_cone(
    rng: &mut impl rand::Rng,
    n: usize,
    k: usize,
    count: usize,
    spread: f64,
    margin: f64,
) -> Vec<Vec<f64>> {
    let h = SigmaRoot { k };
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    while out.len() < count && attempts < count * 10_000 {
        attempts += 1;
        let x: Vec<f64> = (0..n).map(|_| 1.0 + rng.gen_range(-spread..spread)).collect();
        if !in_gamma_k(&x, k) {
            continue;
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if h.value(&x) > margin * norm {
            out.push(x);
        }
    }
    out
}
