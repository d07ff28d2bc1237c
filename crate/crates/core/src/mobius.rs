//! Möbius transformations as generator words, Kelvin transforms, moving
//! sphere radii and the sphere inequalities used in the moving-sphere
//! argument near a boundary.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// One generator of the Möbius group of `ℝⁿ ∪ {∞}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Generator {
    Translation(Vec<f64>),
    Orthogonal(DMatrix<f64>),
    Dilation(f64),
    /// `y ↦ x + λ²(y - x)/|y - x|²`.
    Inversion { center: Vec<f64>, radius: f64 },
}

/// Pointwise data of a conformal map: image, differential, conformal factor
/// `a` (`dψᵀdψ = a² I`, `|Jac| = aⁿ`) and `∇ ln a`.
#[derive(Debug, Clone, PartialEq)]
pub struct Local {
    pub image: Vec<f64>,
    pub jacobian: DMatrix<f64>,
    pub factor: f64,
    pub grad_log_factor: Vec<f64>,
}

impl Local {
    /// `|Jac_ψ|`.
    pub fn jacobian_determinant(&self) -> f64 {
        self.factor.powi(self.image.len() as i32)
    }
}

impl Generator {
    fn local(&self, y: &[f64]) -> Result<Local> {
        let n = y.len();
        Ok(match self {
            Generator::Translation(v) => Local {
                image: y.iter().zip(v).map(|(a, b)| a + b).collect(),
                jacobian: DMatrix::identity(n, n),
                factor: 1.0,
                grad_log_factor: vec![0.0; n],
            },
            Generator::Orthogonal(o) => Local {
                image: (o * DVector::from_column_slice(y)).iter().copied().collect(),
                jacobian: o.clone(),
                factor: 1.0,
                grad_log_factor: vec![0.0; n],
            },
            Generator::Dilation(rho) => Local {
                image: y.iter().map(|v| rho * v).collect(),
                jacobian: DMatrix::identity(n, n) * *rho,
                factor: *rho,
                grad_log_factor: vec![0.0; n],
            },
            Generator::Inversion { center, radius } => {
                let d = sub(y, center);
                let d2 = dot(&d, &d);
                if !(d2 > 0.0) {
                    return Err(Error::Pole);
                }
                let l2 = radius * radius;
                let a = l2 / d2;
                Local {
                    image: center.iter().zip(&d).map(|(c, di)| c + a * di).collect(),
                    jacobian: DMatrix::from_fn(n, n, |i, j| {
                        let id = if i == j { 1.0 } else { 0.0 };
                        a * (id - 2.0 * d[i] * d[j] / d2)
                    }),
                    factor: a,
                    grad_log_factor: d.iter().map(|di| -2.0 * di / d2).collect(),
                }
            }
        })
    }

    fn inverse(&self) -> Generator {
        match self {
            Generator::Translation(v) => Generator::Translation(v.iter().map(|x| -x).collect()),
            Generator::Orthogonal(o) => Generator::Orthogonal(o.transpose()),
            Generator::Dilation(r) => Generator::Dilation(1.0 / r),
            g @ Generator::Inversion { .. } => g.clone(),
        }
    }
}

/// A composition of generators, applied in order: `word[0]` first.
#[derive(Debug, Clone, PartialEq)]
pub struct MobiusMap {
    n: usize,
    word: Vec<Generator>,
}

impl MobiusMap {
    pub fn identity(n: usize) -> Self {
        Self { n, word: Vec::new() }
    }

    pub fn translation(v: Vec<f64>) -> Self {
        Self { n: v.len(), word: vec![Generator::Translation(v)] }
    }

    pub fn orthogonal(o: DMatrix<f64>) -> Result<Self> {
        let n = o.nrows();
        if o.ncols() != n {
            return Err(Error::Input("orthogonal generator must be square".into()));
        }
        let defect = (o.transpose() * &o - DMatrix::identity(n, n)).abs().max();
        if defect > 1e-10 {
            return Err(Error::Input(format!("matrix is not orthogonal (defect {defect:e})")));
        }
        Ok(Self { n, word: vec![Generator::Orthogonal(o)] })
    }

    pub fn dilation(n: usize, rho: f64) -> Result<Self> {
        if !(rho > 0.0) {
            return Err(Error::NonPositive { what: "dilation factor", value: rho });
        }
        Ok(Self { n, word: vec![Generator::Dilation(rho)] })
    }

    /// `ψ_x^λ(y) = x + λ²(y - x)/|y - x|²`.
    pub fn inversion(center: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::NonPositive { what: "inversion radius", value: radius });
        }
        Ok(Self { n: center.len(), word: vec![Generator::Inversion { center, radius }] })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn word(&self) -> &[Generator] {
        &self.word
    }

    /// `other ∘ self`.
    pub fn then(mut self, other: MobiusMap) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::Input("composing maps of different dimension".into()));
        }
        self.word.extend(other.word);
        Ok(self)
    }

    pub fn inverse(&self) -> Self {
        Self { n: self.n, word: self.word.iter().rev().map(Generator::inverse).collect() }
    }

    fn check_dim(&self, y: &[f64]) -> Result<()> {
        if y.len() != self.n {
            return Err(Error::Input(format!("point has dimension {}, map has {}", y.len(), self.n)));
        }
        Ok(())
    }

    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(y)?;
        self.word.iter().try_fold(y.to_vec(), |p, g| Ok(g.local(&p)?.image))
    }

    /// Image, differential, conformal factor and `∇ ln a` at `y` by the
    /// chain rule over the word.
    pub fn local(&self, y: &[f64]) -> Result<Local> {
        self.check_dim(y)?;
        let n = self.n;
        let mut acc = Local {
            image: y.to_vec(),
            jacobian: DMatrix::identity(n, n),
            factor: 1.0,
            grad_log_factor: vec![0.0; n],
        };
        for g in &self.word {
            let step = g.local(&acc.image)?;
            // ∇_y ln a_g(ψ_prev(y)) = dψ_prevᵀ (∇ ln a_g)(ψ_prev(y))
            let pulled = acc.jacobian.transpose() * DVector::from_column_slice(&step.grad_log_factor);
            for (gi, pi) in acc.grad_log_factor.iter_mut().zip(pulled.iter()) {
                *gi += pi;
            }
            acc.jacobian = &step.jacobian * &acc.jacobian;
            acc.factor *= step.factor;
            acc.image = step.image;
        }
        Ok(acc)
    }

    pub fn jacobian(&self, y: &[f64]) -> Result<DMatrix<f64>> {
        Ok(self.local(y)?.jacobian)
    }

    /// `|Jac_ψ(y)|`.
    pub fn jacobian_determinant(&self, y: &[f64]) -> Result<f64> {
        Ok(self.local(y)?.jacobian_determinant())
    }

    /// `max |dψᵀdψ - a² I|` at `y`.
    pub fn conformality_defect(&self, y: &[f64]) -> Result<f64> {
        let l = self.local(y)?;
        let g = l.jacobian.transpose() * &l.jacobian - DMatrix::identity(self.n, self.n) * (l.factor * l.factor);
        Ok(g.abs().max())
    }
}

/// Uniformly random orthogonal matrix (QR of a Gaussian matrix with the sign
/// of `R`'s diagonal fixed).
pub fn random_orthogonal<R: Rng>(rng: &mut R, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Standard normal variate by Box–Muller.
pub fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Random word of `len` generators with moderate parameters.
pub fn random_map<R: Rng>(rng: &mut R, n: usize, len: usize) -> MobiusMap {
    let word = (0..len)
        .map(|_| match rng.gen_range(0..4) {
            0 => Generator::Translation((0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()),
            1 => Generator::Orthogonal(random_orthogonal(rng, n)),
            2 => Generator::Dilation(rng.gen_range(0.5..2.0)),
            _ => Generator::Inversion {
                center: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
                radius: rng.gen_range(0.5..2.0),
            },
        })
        .collect();
    MobiusMap { n, word }
}

/// `w_x^λ(y) = (λ/|y - x|)^{n-2} w(ψ_x^λ(y))`.
pub fn kelvin(w: impl Fn(&[f64]) -> f64, x: &[f64], lambda: f64, y: &[f64]) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositive { what: "Kelvin radius", value: lambda });
    }
    let n = y.len();
    let d = norm(&sub(y, x));
    if !(d > 0.0) {
        return Err(Error::Pole);
    }
    let image = MobiusMap::inversion(x.to_vec(), lambda)?.apply(y)?;
    Ok((lambda / d).powi(n as i32 - 2) * w(&image))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MovingSphereReport {
    /// Largest certified radius (0 if none).
    pub lambda_bar: f64,
    pub lambda_max: f64,
    /// First coarse-grid radius at which the comparison failed, if any.
    pub first_failure: Option<f64>,
    /// Worst `w_x^λ(y) - w(y)` at the first failing radius.
    pub worst_violation: f64,
    pub worst_sample: Option<Vec<f64>>,
    pub samples_used: usize,
}

/// Options for [`moving_sphere_radius`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MovingSphereOptions {
    pub lambda_max: f64,
    pub coarse_points: usize,
    /// Bisection stops at this width.
    pub resolution: f64,
    /// Allowed excess `w_x^λ - w`.
    pub tol: f64,
}

impl MovingSphereOptions {
    pub fn new(lambda_max: f64) -> Self {
        Self { lambda_max, coarse_points: 64, resolution: 1e-6, tol: 1e-12 }
    }
}

fn comparison(
    w: &dyn Fn(&[f64]) -> f64,
    samples: &[Vec<f64>],
    x: &[f64],
    lambda: f64,
    tol: f64,
) -> Result<(bool, f64, Option<usize>)> {
    let mut worst = f64::NEG_INFINITY;
    let mut arg = None;
    for (i, y) in samples.iter().enumerate() {
        if norm(&sub(y, x)) < lambda {
            continue;
        }
        let excess = kelvin(w, x, lambda, y)? - w(y);
        if excess > worst {
            worst = excess;
            arg = Some(i);
        }
    }
    Ok((worst <= tol, worst, arg))
}

/// Largest `λ` (coarse grid, then bisection) such that
/// `w_x^λ(y) ≤ w(y) + tol` for every sample `y` with `|y - x| ≥ λ`.
///
/// Only certified on the given samples; the true supremum over a continuum
/// is approximated to sample and grid accuracy.
pub fn moving_sphere_radius(
    w: &dyn Fn(&[f64]) -> f64,
    samples: &[Vec<f64>],
    x: &[f64],
    opts: &MovingSphereOptions,
) -> Result<MovingSphereReport> {
    if !(opts.lambda_max > 0.0) || opts.coarse_points == 0 {
        return Err(Error::Input("moving sphere search needs lambda_max > 0 and a coarse grid".into()));
    }
    let samples: Vec<Vec<f64>> = samples.iter().filter(|y| norm(&sub(y, x)) > 0.0).cloned().collect();
    for y in &samples {
        let v = w(y);
        if !(v > 0.0) {
            return Err(Error::NonPositive { what: "sampled field", value: v });
        }
    }
    let step = opts.lambda_max / opts.coarse_points as f64;
    let mut good = 0.0;
    let mut bad = None;
    for i in 1..=opts.coarse_points {
        let lam = step * i as f64;
        if comparison(w, &samples, x, lam, opts.tol)?.0 {
            good = lam;
        } else {
            bad = Some(lam);
            break;
        }
    }
    let mut report = MovingSphereReport {
        lambda_bar: good,
        lambda_max: opts.lambda_max,
        first_failure: bad,
        worst_violation: 0.0,
        worst_sample: None,
        samples_used: samples.len(),
    };
    let Some(mut hi) = bad else {
        return Ok(report);
    };
    let (_, worst, arg) = comparison(w, &samples, x, hi, opts.tol)?;
    report.worst_violation = worst;
    report.worst_sample = arg.map(|i| samples[i].clone());
    let mut lo = good;
    while hi - lo > opts.resolution {
        let mid = 0.5 * (lo + hi);
        if comparison(w, &samples, x, mid, opts.tol)?.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    report.lambda_bar = lo;
    Ok(report)
}

/// `max (|∇ ln w(y)| - (n-2)/(λ̄ - |y - x|))` over samples with
/// `|y - x| < λ̄`; non-positive when the gradient bound holds.
pub fn gradient_bound_excess(
    grad_log_w: &dyn Fn(&[f64]) -> Vec<f64>,
    samples: &[Vec<f64>],
    x: &[f64],
    lambda_bar: f64,
) -> f64 {
    samples
        .iter()
        .filter_map(|y| {
            let r = norm(&sub(y, x));
            (r < lambda_bar).then(|| {
                let n = y.len() as f64;
                norm(&grad_log_w(y)) - (n - 2.0) / (lambda_bar - r)
            })
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Which of the two sphere inequalities is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphereCase {
    /// `z` outside the open ball:
    /// `|y - z|²/(2r) + (y - z)·ν⁻(y) ≥ dist(z, ∂B)`.
    Exterior,
    /// `z` in the closed ball:
    /// `-|y - z|²/(2r) - (y - z)·ν⁻(y) ≥ dist(z, ∂B)/2`.
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereCheck {
    pub case: SphereCase,
    pub lhs: f64,
    pub rhs: f64,
    /// Whether equality is expected for this `z`.
    pub equality_expected: bool,
}

impl SphereCheck {
    pub fn violation(&self) -> f64 {
        (self.rhs - self.lhs).max(0.0)
    }
}

/// Evaluates the sphere inequalities for `B = B_r(x)`, a point `z` and
/// `y ∈ ∂B`, with `ν⁻(y) = (x - y)/r` the inner unit normal. Both cases are
/// returned when `z ∈ ∂B`. `tol` decides membership of `z` in `∂B` and
/// `{x}` and how far `y` may sit off the sphere.
pub fn sphere_identity_check(x: &[f64], r: f64, z: &[f64], y: &[f64], tol: f64) -> Result<Vec<SphereCheck>> {
    if !(r > 0.0) {
        return Err(Error::NonPositive { what: "ball radius", value: r });
    }
    if x.len() != z.len() || x.len() != y.len() {
        return Err(Error::Input("points of different dimension".into()));
    }
    let off = (norm(&sub(y, x)) - r).abs();
    if off > tol * r.max(1.0) {
        return Err(Error::Input(format!("y is {off:e} away from the sphere")));
    }
    let yz = sub(y, z);
    let nu: Vec<f64> = sub(x, y).iter().map(|v| v / r).collect();
    let q = dot(&yz, &yz) / (2.0 * r) + dot(&yz, &nu);
    let rho = norm(&sub(z, x));
    let dist = (rho - r).abs();
    let on_sphere = dist <= tol * r.max(1.0);
    let at_center = rho <= tol * r.max(1.0);
    let mut out = Vec::with_capacity(2);
    if rho >= r || on_sphere {
        out.push(SphereCheck { case: SphereCase::Exterior, lhs: q, rhs: dist, equality_expected: on_sphere });
    }
    if rho <= r || on_sphere {
        out.push(SphereCheck {
            case: SphereCase::Interior,
            lhs: -q,
            rhs: 0.5 * dist,
            equality_expected: on_sphere || at_center,
        });
    }
    Ok(out)
}
