//! Conformally invariant boundary operators.
//!
//! A boundary operator sees `(x, u, ∇u, ν, H)`. Under a Möbius map `ψ` the
//! data transform as
//!
//! ```text
//! u_ψ = |Jac_ψ|^{(n-2)/(2n)} u∘ψ,
//! ν_ψ = dψ ν / |dψ ν|,
//! H_ψ = |Jac_ψ|^{-1/n} (H + (1/n) (∇|Jac_ψ|·ν / |Jac_ψ|) I),
//! ```
//!
//! and every invariant operator factors through the matrix
//! `s^{-2/(n-2)} (H + (2/(n-2)) (p·ν/s) I)` evaluated at `(s, p) = (u, ∇u)`.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, symmetric_eigenvalues};
use crate::mobius::{gaussian, random_map, MobiusMap};
use crate::radial::format_float;

/// Pointwise boundary data.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub x: Vec<f64>,
    pub s: f64,
    pub p: Vec<f64>,
    pub nu: Vec<f64>,
    pub h: DMatrix<f64>,
}

impl BoundaryData {
    pub fn new(x: Vec<f64>, s: f64, p: Vec<f64>, nu: Vec<f64>, h: DMatrix<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(Error::Dimension { n, reason: "boundary operators need n >= 3" });
        }
        if p.len() != n || nu.len() != n || h.nrows() != n || h.ncols() != n {
            return Err(Error::Input("boundary data of inconsistent dimension".into()));
        }
        if !(s > 0.0) {
            return Err(Error::NonPositive { what: "u", value: s });
        }
        let len = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        if (len - 1.0).abs() > 1e-10 {
            return Err(Error::Input(format!("normal has length {len}")));
        }
        let asym = asymmetry(&h);
        if asym > 1e-10 * h.abs().max().max(1.0) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self { x, s, p, nu, h })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// Random data with `s ∈ [0.5, 2]`, Gaussian `p`, `H` and `x`.
    pub fn random<R: Rng>(rng: &mut R, n: usize) -> Self {
        let x = (0..n).map(|_| gaussian(rng)).collect();
        let p = (0..n).map(|_| gaussian(rng)).collect();
        let mut nu: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let len = nu.iter().map(|v| v * v).sum::<f64>().sqrt();
        nu.iter_mut().for_each(|v| *v /= len);
        let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
        let h = (&g + g.transpose()) * 0.5;
        Self { x, s: rng.gen_range(0.5..2.0), p, nu, h }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `s^{-2/(n-2)} (H + (2/(n-2)) (p·ν/s) I)`.
pub fn canonical_boundary_matrix(d: &BoundaryData) -> Result<DMatrix<f64>> {
    if !(d.s > 0.0) {
        return Err(Error::NonPositive { what: "u", value: d.s });
    }
    let n = d.n();
    let m = n as f64 - 2.0;
    let shift = 2.0 / m * dot(&d.p, &d.nu) / d.s;
    Ok((&d.h + DMatrix::identity(n, n) * shift) * d.s.powf(-2.0 / m))
}

/// Eigenvalues of the canonical matrix, non-increasing.
pub fn canonical_spectrum(d: &BoundaryData) -> Result<Vec<f64>> {
    symmetric_eigenvalues(&canonical_boundary_matrix(d)?)
}

/// A `C¹` function known through its value and gradient.
pub trait ScalarField {
    fn value(&self, y: &[f64]) -> f64;
    fn gradient(&self, y: &[f64]) -> Vec<f64>;
}

/// `u(y) = s + p·(y - y₀)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineField {
    pub base: Vec<f64>,
    pub s: f64,
    pub p: Vec<f64>,
}

impl ScalarField for AffineField {
    fn value(&self, y: &[f64]) -> f64 {
        self.s + self.p.iter().zip(y.iter().zip(&self.base)).map(|(pi, (yi, bi))| pi * (yi - bi)).sum::<f64>()
    }

    fn gradient(&self, _y: &[f64]) -> Vec<f64> {
        self.p.clone()
    }
}

/// Both sides of the invariance relation for one map and one point.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformedData {
    /// `(x, u_ψ(x), ∇u_ψ(x), ν(x), H(x))`.
    pub pulled_back: BoundaryData,
    /// `(ψ(x), u(ψ(x)), ∇u(ψ(x)), ν_ψ(x), H_ψ(x))`.
    pub pushed_forward: BoundaryData,
}

impl TransformedData {
    /// Largest eigenvalue discrepancy of the two canonical matrices.
    pub fn spectral_gap(&self) -> Result<f64> {
        let a = canonical_spectrum(&self.pulled_back)?;
        let b = canonical_spectrum(&self.pushed_forward)?;
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
    }
}

/// Transforms `(u, ν, H)` at `x` under `ψ`.
pub fn transform_boundary_data(
    psi: &MobiusMap,
    u: &dyn ScalarField,
    nu: &[f64],
    h: &DMatrix<f64>,
    x: &[f64],
) -> Result<TransformedData> {
    let n = x.len();
    let loc = psi.local(x)?;
    let a = loc.factor;
    let m = 0.5 * (n as f64 - 2.0);
    let y = &loc.image;
    let uy = u.value(y);
    if !(uy > 0.0) {
        return Err(Error::NonPositive { what: "u at the image point", value: uy });
    }
    let gy = u.gradient(y);
    // ∇(a^m u∘ψ) = a^m (dψᵀ ∇u∘ψ + m u∘ψ ∇ln a)
    let pulled = loc.jacobian.transpose() * DVector::from_column_slice(&gy);
    let am = a.powf(m);
    let p_psi: Vec<f64> = pulled.iter().zip(&loc.grad_log_factor).map(|(g, l)| am * (g + m * uy * l)).collect();
    let push = &loc.jacobian * DVector::from_column_slice(nu);
    let nu_psi: Vec<f64> = (push.clone() / push.norm()).iter().copied().collect();
    // (1/n) ∇|Jac|/|Jac| = ∇ ln a
    let shift = dot(&loc.grad_log_factor, nu);
    let h_psi = (h + DMatrix::identity(n, n) * shift) / a;
    Ok(TransformedData {
        pulled_back: BoundaryData::new(x.to_vec(), am * uy, p_psi, nu.to_vec(), h.clone())?,
        pushed_forward: BoundaryData::new(y.clone(), uy, gy, nu_psi, h_psi)?,
    })
}

/// Reflection taking `nu` to `e₁` (identity if they coincide).
pub fn rotation_to_first_axis(nu: &[f64]) -> DMatrix<f64> {
    let n = nu.len();
    let mut w = DVector::from_column_slice(nu);
    w[0] -= 1.0;
    let len2 = w.norm_squared();
    if len2 < 1e-30 {
        return DMatrix::identity(n, n);
    }
    DMatrix::identity(n, n) - (&w * w.transpose()) * (2.0 / len2)
}

/// The reduction steps checked by [`verify_reduction_identities`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Identity {
    /// Translations: no dependence on `x`.
    Translation,
    /// Inversion about `0` through `x = λν`, `λ = -(n-2)s/(p·ν)`: removes
    /// the normal part of `p` and flips `ν`.
    NormalInversion,
    /// Inversion through `x = λp/|p|`, `λ = -(n-2)s/|p|`, for `p ⟂ ν`:
    /// removes the tangential part of `p`.
    TangentialInversion,
    /// Combined: `(s, p, ν, H) ~ (s, 0, -ν, H + 2p·ν/((n-2)s) I)`.
    GradientRemoval,
    /// `(s, 0, ν, H) ~ (1, 0, ν, s^{-2/(n-2)} H)` via dilations.
    Dilation,
    /// `(s, 0, ν, H) ~ (s, 0, e, H)` via rotations.
    Rotation,
    /// Random compositions of generators at random points.
    GeneralMobius,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Translation,
        Identity::NormalInversion,
        Identity::TangentialInversion,
        Identity::GradientRemoval,
        Identity::Dilation,
        Identity::Rotation,
        Identity::GeneralMobius,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Identity::Translation => "translation",
            Identity::NormalInversion => "normal_inversion",
            Identity::TangentialInversion => "tangential_inversion",
            Identity::GradientRemoval => "gradient_removal",
            Identity::Dilation => "dilation",
            Identity::Rotation => "rotation",
            Identity::GeneralMobius => "general_mobius",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: Identity,
    pub samples: usize,
    pub skipped: usize,
    pub max_violation: f64,
    pub argmax_sample: Option<usize>,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityReport {
    pub checks: Vec<IdentityCheck>,
}

impl IdentityReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn get(&self, id: Identity) -> Option<&IdentityCheck> {
        self.checks.iter().find(|c| c.identity == id)
    }

    /// CSV with columns `identity,samples,skipped,max_violation,argmax_sample,passed`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("identity,samples,skipped,max_violation,argmax_sample,passed\n");
        for c in &self.checks {
            let arg = c.argmax_sample.map(|i| i.to_string()).unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                c.identity.name(),
                c.samples,
                c.skipped,
                format_float(c.max_violation),
                arg,
                c.passed
            );
        }
        out
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn matrix_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

fn spectra_gap(a: &BoundaryData, b: &BoundaryData) -> Result<f64> {
    Ok(max_abs_diff(&canonical_spectrum(a)?, &canonical_spectrum(b)?))
}

/// Scale for relative comparisons.
fn scale(d: &BoundaryData) -> f64 {
    let m = canonical_boundary_matrix(d).map(|c| c.abs().max()).unwrap_or(1.0);
    m.max(1.0)
}

fn check_one<R: Rng>(id: Identity, d: &BoundaryData, rng: &mut R) -> Result<Option<f64>> {
    let n = d.n();
    let m = n as f64 - 2.0;
    let pn = dot(&d.p, &d.nu);
    Ok(Some(match id {
        Identity::Translation => {
            let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
            let psi = MobiusMap::translation(v);
            let image = psi.apply(&d.x)?;
            let u = AffineField { base: image, s: d.s, p: d.p.clone() };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &d.x)?;
            let at_origin = BoundaryData { x: vec![0.0; n], ..d.clone() };
            t.spectral_gap()?.max(spectra_gap(d, &at_origin)?) / scale(d)
        }
        Identity::NormalInversion => {
            if pn.abs() < 1e-3 {
                return Ok(None);
            }
            let lambda = -m * d.s / pn;
            let x: Vec<f64> = d.nu.iter().map(|v| lambda * v).collect();
            let psi = MobiusMap::inversion(vec![0.0; n], lambda.abs())?;
            let u = AffineField { base: x.clone(), s: d.s, p: d.p.clone() };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &x)?;
            let pt: Vec<f64> = d.p.iter().zip(&d.nu).map(|(p, v)| p - pn * v).collect();
            let minus_nu: Vec<f64> = d.nu.iter().map(|v| -v).collect();
            let h_shift = &d.h + DMatrix::identity(n, n) * (2.0 * pn / (m * d.s));
            let claims = [
                (t.pulled_back.s - d.s).abs(),
                max_abs_diff(&t.pulled_back.p, &pt),
                max_abs_diff(&t.pushed_forward.x, &x),
                max_abs_diff(&t.pushed_forward.nu, &minus_nu),
                matrix_diff(&t.pushed_forward.h, &h_shift),
            ];
            let sc = scale(d).max(d.p.iter().map(|v| v.abs()).fold(0.0, f64::max));
            claims.iter().copied().fold(t.spectral_gap()?, f64::max) / sc
        }
        Identity::TangentialInversion => {
            let pt: Vec<f64> = d.p.iter().zip(&d.nu).map(|(p, v)| p - pn * v).collect();
            let len = pt.iter().map(|v| v * v).sum::<f64>().sqrt();
            if len < 1e-3 {
                return Ok(None);
            }
            let lambda = -m * d.s / len;
            let x: Vec<f64> = pt.iter().map(|v| lambda * v / len).collect();
            let psi = MobiusMap::inversion(vec![0.0; n], lambda.abs())?;
            let u = AffineField { base: x.clone(), s: d.s, p: pt.clone() };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &x)?;
            let claims = [
                (t.pulled_back.s - d.s).abs(),
                t.pulled_back.p.iter().map(|v| v.abs()).fold(0.0, f64::max),
                max_abs_diff(&t.pushed_forward.nu, &d.nu),
                matrix_diff(&t.pushed_forward.h, &d.h),
            ];
            let sc = scale(d).max(len);
            claims.iter().copied().fold(t.spectral_gap()?, f64::max) / sc
        }
        Identity::GradientRemoval => {
            let minus_nu: Vec<f64> = d.nu.iter().map(|v| -v).collect();
            let h_shift = &d.h + DMatrix::identity(n, n) * (2.0 * pn / (m * d.s));
            let reduced = BoundaryData { p: vec![0.0; n], nu: minus_nu, h: h_shift, ..d.clone() };
            spectra_gap(d, &reduced)? / scale(d)
        }
        Identity::Dilation => {
            let r = rng.gen_range(0.3..3.0);
            let psi = MobiusMap::dilation(n, r)?;
            let u = AffineField { base: vec![0.0; n], s: d.s, p: vec![0.0; n] };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &vec![0.0; n])?;
            let claims = [
                (t.pulled_back.s - r.powf(0.5 * m) * d.s).abs() / d.s,
                matrix_diff(&t.pushed_forward.h, &(&d.h / r)),
            ];
            let flat = BoundaryData { p: vec![0.0; n], ..d.clone() };
            let unit = BoundaryData { s: 1.0, h: &d.h * d.s.powf(-2.0 / m), ..flat.clone() };
            let direct = matrix_diff(&canonical_boundary_matrix(&flat)?, &canonical_boundary_matrix(&unit)?);
            claims.iter().copied().fold(t.spectral_gap()?.max(direct), f64::max) / scale(d)
        }
        Identity::Rotation => {
            let o = rotation_to_first_axis(&d.nu);
            let psi = MobiusMap::orthogonal(o)?;
            let u = AffineField { base: vec![0.0; n], s: d.s, p: vec![0.0; n] };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &vec![0.0; n])?;
            let mut e = vec![0.0; n];
            e[0] = 1.0;
            let claims = [max_abs_diff(&t.pushed_forward.nu, &e), matrix_diff(&t.pushed_forward.h, &d.h)];
            let flat = BoundaryData { p: vec![0.0; n], ..d.clone() };
            let to_e = BoundaryData { nu: e, ..flat.clone() };
            claims.iter().copied().fold(t.spectral_gap()?.max(spectra_gap(&flat, &to_e)?), f64::max) / scale(d)
        }
        Identity::GeneralMobius => {
            let psi = random_map(rng, n, 4);
            let Ok(loc) = psi.local(&d.x) else { return Ok(None) };
            if !(loc.factor > 1e-3 && loc.factor < 1e3) {
                return Ok(None);
            }
            let u = AffineField { base: loc.image.clone(), s: d.s, p: d.p.clone() };
            let t = transform_boundary_data(&psi, &u, &d.nu, &d.h, &d.x)?;
            let a = canonical_boundary_matrix(&t.pulled_back)?;
            let b = canonical_boundary_matrix(&t.pushed_forward)?;
            matrix_diff(&a, &b) / a.abs().max().max(1.0)
        }
    }))
}

/// Checks every reduction step on the samples; violations are relative to
/// the size of the canonical matrix. Inversion-based steps skip samples
/// whose construction degenerates (`|p·ν|` or `|p - (p·ν)ν|` below `1e-3`).
pub fn verify_reduction_identities<R: Rng>(samples: &[BoundaryData], rng: &mut R, tol: f64) -> Result<IdentityReport> {
    let mut checks = Vec::new();
    for id in Identity::ALL {
        let mut worst = 0.0_f64;
        let mut arg = None;
        let mut skipped = 0;
        for (i, d) in samples.iter().enumerate() {
            match check_one(id, d, rng)? {
                Some(v) => {
                    if !(v <= worst) {
                        worst = if v.is_nan() { f64::INFINITY } else { v };
                        arg = Some(i);
                    }
                }
                None => skipped += 1,
            }
        }
        checks.push(IdentityCheck {
            identity: id,
            samples: samples.len(),
            skipped,
            max_violation: worst,
            argmax_sample: arg,
            tolerance: tol,
            passed: worst <= tol,
        });
    }
    Ok(IdentityReport { checks })
}
