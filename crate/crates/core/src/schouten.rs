//! Schouten tensors of conformally flat metrics `u^{4/(n-2)} g_flat`.
//!
//! With `m = (n-2)/2` the matrix whose eigenvalues are those of the Schouten
//! tensor of `u^{4/(n-2)} g_flat` (measured against that metric) is
//!
//! ```text
//! A^u = -(2/(n-2)) u^{-(n+2)/(n-2)} ∇²u
//!       + (2n/(n-2)²) u^{-2n/(n-2)} ∇u⊗∇u
//!       - (2/(n-2)²) u^{-2n/(n-2)} |∇u|² I.
//! ```
//!
//! # Radial spectra
//!
//! For radial `u` write `t = ln r` and `ξ = -(2/(n-2)) ln u - t`. Substituting
//! into `A^u` (the matrix is `μ y⊗y + ν I`, see [`rank_one_spectrum`]) gives
//!
//! ```text
//! λ_rad = e^{2ξ} [ξ_tt - (1 - ξ_t²)/2],    λ_tan = e^{2ξ} (1 - ξ_t²)/2,
//! ```
//!
//! with `λ_tan` of multiplicity `n - 1`. Then
//! `σ_k = C(n-1,k-1)/2^{k-1} · e^{2kξ}(1-ξ_t²)^{k-1}[ξ_tt + (n-2k)/(2k)(1-ξ_t²)]`,
//! which is the normalized radial σ_k equation used in [`crate::radial`].
//! The cylinder `u = r^{-(n-2)/2}` (`ξ ≡ 0`) has spectrum `(-1/2, 1/2, …, 1/2)`
//! and therefore `σ_k = 2^{-k} C(n-1,k-1)(n-2k)/k`. Formulas carrying extra
//! factors `(n-2)/2` and `(n-2)/4` in front of these eigenvalues are not
//! compatible with the `A^u` normalization above.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::symfn::EigenvalueVector;

/// Value, gradient and Hessian of a conformal factor at one point, in flat
/// coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformalFactorSample {
    pub x: Vec<f64>,
    pub u: f64,
    pub grad: Vec<f64>,
    pub hess: DMatrix<f64>,
}

impl ConformalFactorSample {
    pub fn new(x: Vec<f64>, u: f64, grad: Vec<f64>, hess: DMatrix<f64>) -> Result<Self> {
        let n = x.len();
        if n < 3 {
            return Err(Error::Dimension { n, reason: "conformal factors need n >= 3" });
        }
        if grad.len() != n || hess.nrows() != n || hess.ncols() != n {
            return Err(Error::Input("gradient/Hessian shape does not match the point".into()));
        }
        if !(u > 0.0) {
            return Err(Error::NonPositive { what: "u", value: u });
        }
        let scale = hess.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let asym = linalg::asymmetry(&hess);
        if asym > 1e-10 * scale {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(Self { x, u, grad, hess })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }
}

/// The symmetric matrix `A^u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SchoutenMatrix(pub DMatrix<f64>);

impl SchoutenMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }
}

pub fn schouten_matrix(sample: &ConformalFactorSample) -> Result<SchoutenMatrix> {
    let n = sample.n();
    let nf = n as f64;
    let u = sample.u;
    if !(u > 0.0) {
        return Err(Error::NonPositive { what: "u", value: u });
    }
    let d = nf - 2.0;
    let hess_coeff = -(2.0 / d) * u.powf(-(nf + 2.0) / d);
    let lower = u.powf(-2.0 * nf / d);
    let grad_sq: f64 = sample.grad.iter().map(|g| g * g).sum();
    let a = DMatrix::from_fn(n, n, |i, j| {
        let mut v = hess_coeff * sample.hess[(i, j)] + (2.0 * nf / (d * d)) * lower * sample.grad[i] * sample.grad[j];
        if i == j {
            v -= (2.0 / (d * d)) * lower * grad_sq;
        }
        v
    });
    Ok(SchoutenMatrix((&a + a.transpose()) * 0.5))
}

/// Sorted spectrum of a Schouten matrix.
pub fn eigenvalues(a: &SchoutenMatrix) -> Result<EigenvalueVector> {
    EigenvalueVector::new(linalg::symmetric_eigenvalues(&a.0)?)
}

/// Spectrum of `μ x⊗x + ν I`: `μ|x|² + ν` once and `ν` with multiplicity
/// `n - 1`.
pub fn rank_one_spectrum(mu: f64, x: &[f64], nu: f64) -> Result<EigenvalueVector> {
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    EigenvalueVector::radial(mu * norm_sq + nu, nu, x.len())
}

/// Mean curvature of the boundary after the conformal change
/// `g̃ = u^{4/(n-2)} g`:
/// `h_g̃ = u^{-n/(n-2)} [(2/(n-2)) ∂u/∂ν + h_g u]`, with `ν` the outer unit
/// normal and `h_g` the normalized mean curvature (a round sphere of radius
/// `r` bounding a ball has `h = 1/r`).
///
/// Equivalently `∂u/∂ν + (n-2)/2 · h_g u = (n-2)/2 · h_g̃ u^{n/(n-2)}`, the
/// Robin form used for the annulus boundary conditions.
pub fn mean_curvature_conformal(u: f64, du_dnu: f64, h_g: f64, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::Dimension { n, reason: "conformal change needs n >= 3" });
    }
    if !(u > 0.0) {
        return Err(Error::NonPositive { what: "u", value: u });
    }
    let nf = n as f64;
    Ok(u.powf(-nf / (nf - 2.0)) * (2.0 / (nf - 2.0) * du_dnu + h_g * u))
}

/// `(λ_rad, λ_tan)` of `A^u` for a radial `u` in `ξ`-coordinates.
pub fn radial_eigenvalues(xi: f64, xi_t: f64, xi_tt: f64) -> (f64, f64) {
    let e2 = (2.0 * xi).exp();
    let q = 1.0 - xi_t * xi_t;
    (e2 * (xi_tt - 0.5 * q), 0.5 * e2 * q)
}

/// Closed-form conformal factors used as ground truth.
#[derive(Debug, Clone, PartialEq)]
pub enum ReferenceSolution {
    /// `u(y) = |y|^{-(n-2)/2}`, the cylindrical metric on the punctured space.
    Cylinder { n: usize },
    /// `u(y) = s·(a/(1 + a²|y - p|²))^{(n-2)/2}`, a round sphere.
    Bubble { n: usize, a: f64, center: Vec<f64>, amplitude: f64 },
}

impl ReferenceSolution {
    pub fn cylinder(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension { n, reason: "conformal factors need n >= 3" });
        }
        Ok(Self::Cylinder { n })
    }

    pub fn bubble(n: usize, a: f64, center: Vec<f64>, amplitude: f64) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension { n, reason: "conformal factors need n >= 3" });
        }
        if center.len() != n {
            return Err(Error::Input("bubble center has wrong dimension".into()));
        }
        if !(a > 0.0) {
            return Err(Error::NonPositive { what: "bubble scale a", value: a });
        }
        if !(amplitude > 0.0) {
            return Err(Error::NonPositive { what: "bubble amplitude", value: amplitude });
        }
        Ok(Self::Bubble { n, a, center, amplitude })
    }

    /// Unit bubble `a = 1`, centered at the origin.
    pub fn standard_bubble(n: usize) -> Result<Self> {
        Self::bubble(n, 1.0, vec![0.0; n], 1.0)
    }

    pub fn n(&self) -> usize {
        match self {
            Self::Cylinder { n } | Self::Bubble { n, .. } => *n,
        }
    }

    fn exponent(&self) -> f64 {
        0.5 * (self.n() as f64 - 2.0)
    }

    pub fn value(&self, y: &[f64]) -> f64 {
        let m = self.exponent();
        match self {
            Self::Cylinder { .. } => norm_sq(y).powf(-0.5 * m),
            Self::Bubble { a, center, amplitude, .. } => {
                let d2 = dist_sq(y, center);
                amplitude * (a / (1.0 + a * a * d2)).powf(m)
            }
        }
    }

    pub fn gradient(&self, y: &[f64]) -> Vec<f64> {
        let m = self.exponent();
        match self {
            Self::Cylinder { .. } => {
                // ∇ r^{-m} = -m r^{-m-2} y
                let r2 = norm_sq(y);
                let c = -m * r2.powf(-0.5 * m - 1.0);
                y.iter().map(|v| c * v).collect()
            }
            Self::Bubble { a, center, .. } => {
                // u = s a^m q^{-m}, q = 1 + a²|z|²  ⇒  ∇u = -2 m a² u z / q
                let z: Vec<f64> = y.iter().zip(center).map(|(v, c)| v - c).collect();
                let q = 1.0 + a * a * norm_sq(&z);
                let u = self.value(y);
                z.iter().map(|zi| -2.0 * m * a * a * u * zi / q).collect()
            }
        }
    }

    pub fn hessian(&self, y: &[f64]) -> DMatrix<f64> {
        let n = self.n();
        let m = self.exponent();
        match self {
            Self::Cylinder { .. } => {
                // ∇² r^{-m} = -m r^{-m-2} (I - (m+2) ŷ⊗ŷ)
                let r2 = norm_sq(y);
                let c = -m * r2.powf(-0.5 * m - 1.0);
                DMatrix::from_fn(n, n, |i, j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    c * (id - (m + 2.0) * y[i] * y[j] / r2)
                })
            }
            Self::Bubble { a, center, .. } => {
                // ∂_ij u = u [ -2 m a² δ_ij / q + 4 m (m+1) a⁴ z_i z_j / q² ]
                let z: Vec<f64> = y.iter().zip(center).map(|(v, c)| v - c).collect();
                let a2 = a * a;
                let q = 1.0 + a2 * norm_sq(&z);
                let u = self.value(y);
                DMatrix::from_fn(n, n, |i, j| {
                    let id = if i == j { 1.0 } else { 0.0 };
                    u * (-2.0 * m * a2 * id / q + 4.0 * m * (m + 1.0) * a2 * a2 * z[i] * z[j] / (q * q))
                })
            }
        }
    }

    /// Closed-form sample at `y`.
    pub fn sample(&self, y: &[f64]) -> Result<ConformalFactorSample> {
        ConformalFactorSample::new(y.to_vec(), self.value(y), self.gradient(y), self.hessian(y))
    }

    /// For the bubble, the constant spectrum `2 s^{-4/(n-2)}` (all entries);
    /// for the cylinder, `(-1/2, 1/2)` as `(radial, tangential)`.
    pub fn expected_spectrum(&self) -> (f64, f64) {
        match self {
            Self::Cylinder { .. } => (-0.5, 0.5),
            Self::Bubble { n, amplitude, .. } => {
                let v = 2.0 * amplitude.powf(-4.0 / (*n as f64 - 2.0));
                (v, v)
            }
        }
    }
}

/// Amplitude `s` for which the bubble satisfies `f(λ(A^u)) = 1`, given the
/// value `f(2, …, 2)` of a degree-one homogeneous `f` at the unit-amplitude
/// spectrum: `λ = 2 s^{-4/(n-2)} e`, so `s = f(2e)^{(n-2)/4}`.
pub fn bubble_amplitude_for_unit_f(f_at_unit_spectrum: f64, n: usize) -> Result<f64> {
    if !(f_at_unit_spectrum > 0.0) {
        return Err(Error::NonPositive { what: "f at the bubble spectrum", value: f_at_unit_spectrum });
    }
    Ok(f_at_unit_spectrum.powf((n as f64 - 2.0) / 4.0))
}

/// Sample of an arbitrary positive function with central-difference
/// derivatives. Base step `1e-3·max(1, |y_i|)` per coordinate, one
/// Richardson extrapolation against step `2h`; both first and second
/// derivatives are then accurate to roughly `1e-9` relative.
pub fn finite_difference_sample(u: impl Fn(&[f64]) -> f64, y: &[f64]) -> Result<ConformalFactorSample> {
    let n = y.len();
    let steps: Vec<f64> = y.iter().map(|v| 1e-3 * v.abs().max(1.0)).collect();
    let u0 = u(y);
    let mut probe = y.to_vec();
    let mut grad = vec![0.0; n];
    let mut hess = DMatrix::zeros(n, n);
    let mut eval = |probe: &mut Vec<f64>, moves: &[(usize, f64)]| {
        for &(i, d) in moves {
            probe[i] = y[i] + d;
        }
        let v = u(probe);
        for &(i, _) in moves {
            probe[i] = y[i];
        }
        v
    };
    let richardson = |fine: f64, coarse: f64| (4.0 * fine - coarse) / 3.0;
    for i in 0..n {
        let first = |probe: &mut Vec<f64>, eval: &mut dyn FnMut(&mut Vec<f64>, &[(usize, f64)]) -> f64, h: f64| {
            let up = eval(probe, &[(i, h)]);
            let um = eval(probe, &[(i, -h)]);
            ((up - um) / (2.0 * h), (up - 2.0 * u0 + um) / (h * h))
        };
        let (g1, d1) = first(&mut probe, &mut eval, steps[i]);
        let (g2, d2) = first(&mut probe, &mut eval, 2.0 * steps[i]);
        grad[i] = richardson(g1, g2);
        hess[(i, i)] = richardson(d1, d2);
        for j in (i + 1)..n {
            let mut mixed = |hi: f64, hj: f64| {
                (eval(&mut probe, &[(i, hi), (j, hj)]) - eval(&mut probe, &[(i, hi), (j, -hj)])
                    - eval(&mut probe, &[(i, -hi), (j, hj)])
                    + eval(&mut probe, &[(i, -hi), (j, -hj)]))
                    / (4.0 * hi * hj)
            };
            let v = richardson(mixed(steps[i], steps[j]), mixed(2.0 * steps[i], 2.0 * steps[j]));
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    ConformalFactorSample::new(y.to_vec(), u0, grad, hess)
}

/// Eigenvalues of `A^u` at `y` for a function given only by values.
pub fn spectrum_by_finite_differences(u: impl Fn(&[f64]) -> f64, y: &[f64]) -> Result<EigenvalueVector> {
    eigenvalues(&schouten_matrix(&finite_difference_sample(u, y)?)?)
}

fn norm_sq(y: &[f64]) -> f64 {
    y.iter().map(|v| v * v).sum()
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
