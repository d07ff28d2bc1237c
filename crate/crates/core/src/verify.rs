//! Seeded property suites over every module, used by `syl verify`.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boundary::{verify_reduction_identities, BoundaryData};
use crate::error::{Error, Result};
use crate::mobius::{
    gaussian, gradient_bound_excess, kelvin, moving_sphere_radius, random_map, sphere_identity_check,
    MobiusMap, MovingSphereOptions,
};
use crate::radial::{self, RadialEquation, RadialState, Tolerances};
use crate::schouten::{
    eigenvalues, radial_eigenvalues, schouten_matrix, spectrum_by_finite_differences, ReferenceSolution,
};
use crate::shooting::{bifurcation_check, cylinder_solution, ShootingOptions};
use crate::symfn::{
    build_concave_f, homotopy_membership, homotopy_point, in_gamma_k, sample_cone, sigma_k, sigma_k_expanded,
    verify_axioms, AxiomTolerances, SigmaRoot, SymmetricCurvatureFunction,
};

/// Available suites.
pub const SUITES: [&str; 9] =
    ["symfn", "concave-f", "homotopy", "schouten", "radial", "shooting", "sphere", "kelvin", "boundary"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, samples: usize, max_violation: f64, tolerance: f64) -> Self {
        let max_violation = if max_violation.is_nan() { f64::INFINITY } else { max_violation };
        Self { name: name.into(), samples, max_violation, tolerance, passed: max_violation <= tolerance }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self::new(name, 1, if ok { 0.0 } else { 1.0 }, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs one suite by name, or every suite for `"all"`.
pub fn run(suite: &str, seed: u64) -> Result<Vec<SuiteReport>> {
    if suite == "all" {
        return SUITES.iter().map(|s| run_one(s, seed)).collect();
    }
    Ok(vec![run_one(suite, seed)?])
}

fn run_one(suite: &str, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = match suite {
        "symfn" => symfn_suite(&mut rng)?,
        "concave-f" => concave_suite(&mut rng)?,
        "homotopy" => homotopy_suite(&mut rng)?,
        "schouten" => schouten_suite(&mut rng)?,
        "radial" => radial_suite()?,
        "shooting" => shooting_suite()?,
        "sphere" => sphere_suite(&mut rng)?,
        "kelvin" => kelvin_suite(&mut rng)?,
        "boundary" => boundary_suite(&mut rng)?,
        other => return Err(Error::Input(format!("unknown suite '{other}' (known: all, {})", SUITES.join(", ")))),
    };
    Ok(SuiteReport { suite: suite.to_string(), seed, checks })
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn symfn_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut cyl = 0.0_f64;
    let mut sign_ok = true;
    for n in 3..=8 {
        let mut v = vec![0.5; n];
        v[0] = -0.5;
        for k in 1..=n {
            let s = sigma_k(&v, k)?;
            let closed = 0.5f64.powi(k as i32) * binomial(n - 1, k - 1) * (n as f64 - 2.0 * k as f64) / k as f64;
            cyl = cyl.max((s - closed).abs());
            sign_ok &= (s > 1e-15) == (n > 2 * k);
        }
    }
    let mut expanded = 0.0_f64;
    let mut cone = 0.0_f64;
    for _ in 0..2000 {
        let n = rng.gen_range(1..=8);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        for k in 0..=n {
            let a = sigma_k(&x, k)?;
            let b = sigma_k_expanded(&x, k)?;
            expanded = expanded.max((a - b).abs() / b.abs().max(1.0));
        }
        for k in 1..=n {
            let direct = (1..=k).all(|j| sigma_k_expanded(&x, j).map(|s| s > 0.0).unwrap_or(false));
            if direct != in_gamma_k(&x, k) {
                cone += 1.0;
            }
        }
    }
    Ok(vec![
        Check::new("cylinder_sigma_closed_form", 36, cyl, 1e-12),
        Check::flag("cylinder_sigma_sign", sign_ok),
        Check::new("recurrence_vs_expansion", 2000, expanded, 1e-12),
        Check::new("cone_membership_mismatches", 2000, cone, 0.0),
        Check::flag("cone_example_3_1_m1", !in_gamma_k(&[3.0, 1.0, -1.0], 2)),
    ])
}

fn concave_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = 4;
    let f = build_concave_f(Arc::new(SigmaRoot { k: 2 }), 0.5, n)?;
    let samples = sample_cone(rng, n, 2, 500, 1.5, 1e-3);
    let rep = verify_axioms(&f, &samples, AxiomTolerances::default());
    let mut out: Vec<Check> = rep
        .checks()
        .iter()
        .map(|c| Check::new(format!("sigma2_root_{}", c.name), samples.len() - rep.rejected, c.max_violation, c.tolerance))
        .collect();
    let f1 = build_concave_f(Arc::new(SigmaRoot { k: 1 }), 0.5, n)?;
    let mut diff = 0.0_f64;
    for x in sample_cone(rng, n, 1, 200, 3.0, 1e-3) {
        let s1: f64 = x.iter().sum();
        diff = diff.max((f1.value(&x)? - s1).abs() / s1);
    }
    out.push(Check::new("sigma1_reproduces_trace", 200, diff, 1e-12));
    out.push(Check::new("sigma1_delta_is_n", 1, (f1.delta() - n as f64).abs(), 1e-12));
    Ok(out)
}

fn homotopy_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let n = 5;
    let mut mismatch0 = 0.0;
    let mut mismatch1 = 0.0;
    for _ in 0..10_000 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let k = rng.gen_range(1..=n);
        let cone = |v: &[f64]| in_gamma_k(v, k);
        let s1: f64 = x.iter().sum();
        if homotopy_membership(&x, 0.0, cone)? != (s1 > 0.0) {
            mismatch0 += 1.0;
        }
        if homotopy_membership(&x, 1.0, cone)? != in_gamma_k(&x, k) {
            mismatch1 += 1.0;
        }
    }
    // f_t(λ) = f(tλ + (1-t)σ_1 e) is Lipschitz in t with constant |∇f|·|λ - σ_1 e|
    let f = SymmetricCurvatureFunction::sigma_root(2, n)?;
    let mut jump = 0.0_f64;
    for x in sample_cone(rng, n, 2, 200, 1.0, 1e-2) {
        let mut prev = f.value(&homotopy_point(&x, 0.0))?;
        let steps = 200;
        for i in 1..=steps {
            let t = i as f64 / steps as f64;
            let cur = f.value(&homotopy_point(&x, t))?;
            let grad = f.gradient(&homotopy_point(&x, t))?;
            let s1: f64 = x.iter().sum();
            let dist: f64 = x.iter().map(|v| (v - s1).powi(2)).sum::<f64>().sqrt();
            let lip = grad.iter().map(|g| g * g).sum::<f64>().sqrt() * dist;
            jump = jump.max((cur - prev).abs() - 2.0 * lip / steps as f64);
            prev = cur;
        }
    }
    Ok(vec![
        Check::new("gamma0_is_trace_positive", 10_000, mismatch0, 0.0),
        Check::new("gamma1_is_gamma", 10_000, mismatch1, 0.0),
        Check::new("f_t_continuity_excess", 200, jump.max(0.0), 0.0),
    ])
}

fn schouten_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut closed = 0.0_f64;
    let mut fd = 0.0_f64;
    let mut cyl = 0.0_f64;
    for i in 0..1000 {
        let n = 3 + i % 5;
        let a = rng.gen_range(0.5..2.0);
        let amp = rng.gen_range(0.5..2.0);
        let center: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let b = ReferenceSolution::bubble(n, a, center, amp)?;
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let (expect, _) = b.expected_spectrum();
        let ev = eigenvalues(&schouten_matrix(&b.sample(&y)?)?)?;
        closed = closed.max(ev.as_slice().iter().map(|v| (v - expect).abs() / expect).fold(0.0, f64::max));
        if i % 10 == 0 {
            let ev = spectrum_by_finite_differences(|p| b.value(p), &y)?;
            fd = fd.max(ev.as_slice().iter().map(|v| (v - expect).abs() / expect).fold(0.0, f64::max));
        }
        let c = ReferenceSolution::cylinder(n)?;
        let ev = eigenvalues(&schouten_matrix(&c.sample(&y)?)?)?;
        let s = ev.as_slice();
        let dev = s[..n - 1].iter().map(|v| (v - 0.5).abs()).fold((s[n - 1] + 0.5).abs(), f64::max);
        cyl = cyl.max(dev);
    }
    Ok(vec![
        Check::new("bubble_spectrum_closed_form", 1000, closed, 1e-8),
        Check::new("bubble_spectrum_finite_differences", 100, fd, 1e-5),
        Check::new("cylinder_spectrum", 1000, cyl, 1e-10),
    ])
}

fn radial_suite() -> Result<Vec<Check>> {
    let cyl = cylinder_solution(5, 2)?;
    let eq = RadialEquation::new(5, 2)?;
    let tr = radial::integrate(&eq, RadialState::new(0.0, cyl.xi, 0.0), 10.0, &Tolerances::default())?;
    let drift = tr.points.iter().map(|p| (p.xi - cyl.xi).abs()).fold(0.0, f64::max);
    let mut sigma = 0.0_f64;
    let mut dense = 0.0_f64;
    for (n, k, xi0, xt0) in [(5, 2, 0.1, 0.3), (7, 3, -0.2, -0.4), (6, 1, 0.0, 0.5), (8, 3, 0.3, 0.0)] {
        let eq = RadialEquation::new(n, k)?;
        let tr = radial::integrate(&eq, RadialState::new(0.0, xi0, xt0), 1.5, &Tolerances::default())?;
        for s in tr.reconstruct() {
            sigma = sigma.max(s.sigma_k_residual.abs());
        }
        // radial eigenvalues against the dense matrix of the reconstructed u
        for p in tr.points.iter().step_by(7) {
            let s = radial::ProfileSample::from_point(&eq, p);
            let mut y = vec![0.0; n];
            y[0] = s.r;
            let hess = nalgebra::DMatrix::from_fn(n, n, |i, j| match (i, j) {
                (0, 0) => s.d2u,
                (i, j) if i == j => s.du / s.r,
                _ => 0.0,
            });
            let mut grad = vec![0.0; n];
            grad[0] = s.du;
            let sample = crate::schouten::ConformalFactorSample::new(y, s.u, grad, hess)?;
            let ev = eigenvalues(&schouten_matrix(&sample)?)?;
            let (rad, tan) = radial_eigenvalues(p.xi, p.xi_t, p.xi_tt);
            let mut want = vec![tan; n];
            want[0] = rad;
            want.sort_by(|a, b| b.total_cmp(a));
            let err = ev.as_slice().iter().zip(&want).map(|(a, b)| (a - b).abs() / b.abs().max(1.0));
            dense = dense.max(err.fold(0.0, f64::max));
        }
    }
    Ok(vec![
        Check::new("cylinder_value", 1, (cyl.xi - 0.25 * 2f64.ln()).abs(), 1e-10),
        Check::new("cylinder_sigma_residual", 1, cyl.sigma_residual.abs(), 1e-10),
        Check::new("cylinder_trajectory_drift", tr.points.len(), drift, 1e-10),
        Check::new("sigma_k_along_trajectories", 4, sigma, 1e-8),
        Check::new("radial_vs_dense_spectrum", 4, dense, 1e-6),
    ])
}

fn shooting_suite() -> Result<Vec<Check>> {
    let b = bifurcation_check(5, 2, 1e-3, &ShootingOptions::default())?;
    Ok(vec![
        Check::new("count_below_threshold_is_one", 1, (b.count_below as f64 - 1.0).abs(), 0.0),
        Check::flag("second_solution_above_threshold", b.count_above >= 2),
    ])
}

fn unit<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
    let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / l).collect()
}

fn sphere_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = 1e-12;
    let mut violation = 0.0_f64;
    let mut oracle = 0.0_f64;
    let mut equality = 0.0_f64;
    let count = 10_000;
    for i in 0..count {
        let n = rng.gen_range(3..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = rng.gen_range(0.5..2.0);
        let y: Vec<f64> = unit(rng, n).iter().zip(&x).map(|(d, c)| c + r * d).collect();
        let z: Vec<f64> = match i % 4 {
            0 => x.clone(),
            1 => unit(rng, n).iter().zip(&x).map(|(d, c)| c + r * d).collect(),
            _ => (0..n).map(|j| x[j] + rng.gen_range(-3.0..3.0)).collect(),
        };
        let rho = z.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        for c in sphere_identity_check(&x, r, &z, &y, 1e-10)? {
            violation = violation.max(c.violation());
            // closed forms of lhs - rhs
            let gap = match c.case {
                crate::mobius::SphereCase::Exterior => (rho - r).powi(2) / (2.0 * r),
                crate::mobius::SphereCase::Interior => (r - rho) * rho / (2.0 * r),
            };
            oracle = oracle.max(((c.lhs - c.rhs) - gap).abs());
            if c.equality_expected {
                equality = equality.max((c.lhs - c.rhs).abs());
            }
        }
    }
    Ok(vec![
        Check::new("inequality_violation", count, violation, tol),
        Check::new("gap_vs_closed_form", count, oracle, 1e-12),
        Check::new("equality_cases", count, equality, tol),
    ])
}

fn kelvin_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut self_kelvin = 0.0_f64;
    let mut involution = 0.0_f64;
    let mut conformal = 0.0_f64;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=6);
        let a = rng.gen_range(0.5..2.0);
        let b = ReferenceSolution::bubble(n, a, vec![0.0; n], 1.0)?;
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let k = kelvin(|p| b.value(p), &vec![0.0; n], 1.0 / a, &y)?;
        self_kelvin = self_kelvin.max((k - b.value(&y)).abs() / b.value(&y));

        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let psi = MobiusMap::inversion(x, rng.gen_range(0.5..2.0))?;
        let back = psi.apply(&psi.apply(&y)?)?;
        let d = back.iter().zip(&y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        involution = involution.max(d / (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max)));

        let m = random_map(rng, n, 4);
        if let Ok(l) = m.local(&y) {
            conformal = conformal.max(m.conformality_defect(&y)? / (l.factor * l.factor).max(1.0));
        }
    }

    let n = 3;
    let b = ReferenceSolution::standard_bubble(n)?;
    let grid = 14;
    let mut samples = Vec::new();
    for i in 0..=grid {
        for j in 0..=grid {
            for k in 0..=grid {
                let p = [i, j, k].map(|v| -5.0 + 10.0 * v as f64 / grid as f64);
                if p.iter().map(|v| v * v).sum::<f64>() < 25.0 {
                    samples.push(p.to_vec());
                }
            }
        }
    }
    let w = |p: &[f64]| b.value(p);
    let rep = moving_sphere_radius(&w, &samples, &[0.0; 3], &MovingSphereOptions::new(4.0))?;
    let grad_log = |p: &[f64]| b.gradient(p).iter().map(|g| g / b.value(p)).collect::<Vec<_>>();
    let excess = gradient_bound_excess(&grad_log, &samples, &[0.0; 3], rep.lambda_bar);

    // conformal covariance of the spectrum under Kelvin transforms of a
    // non-symmetric positive function
    let mut covariance = 0.0_f64;
    for _ in 0..20 {
        let n = 4;
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let u = move |p: &[f64]| {
            let d2: f64 = p.iter().zip(&c).map(|(a, b)| (a - b).powi(2)).sum();
            (1.0 + d2).powf(-1.0) * (1.5 + 0.3 * (p[0] + 0.5 * p[1]).sin())
        };
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let lam = rng.gen_range(0.7..1.5);
        let y: Vec<f64> = unit(rng, n).iter().zip(&x).map(|(d, c)| c + 1.3 * d).collect();
        let image = MobiusMap::inversion(x.clone(), lam)?.apply(&y)?;
        let lhs = spectrum_by_finite_differences(|p| kelvin(&u, &x, lam, p).unwrap_or(f64::NAN), &y)?;
        let rhs = spectrum_by_finite_differences(&u, &image)?;
        let err = lhs.as_slice().iter().zip(rhs.as_slice()).map(|(a, b)| (a - b).abs() / b.abs().max(1.0));
        covariance = covariance.max(err.fold(0.0, f64::max));
    }

    Ok(vec![
        Check::new("bubble_self_kelvin", 1000, self_kelvin, 1e-10),
        Check::new("inversion_involution", 1000, involution, 1e-12),
        Check::new("conformality", 1000, conformal, 1e-10),
        Check::new("moving_sphere_radius_bubble", samples.len(), (rep.lambda_bar - 1.0).abs(), 1e-4),
        Check::new("gradient_bound_excess", samples.len(), excess.max(0.0), 0.0),
        Check::new("kelvin_spectrum_covariance", 20, covariance, 1e-6),
    ])
}

fn boundary_suite(rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let samples: Vec<BoundaryData> = (0..1000).map(|i| BoundaryData::random(rng, 3 + i % 6)).collect();
    let rep = verify_reduction_identities(&samples, rng, 1e-9)?;
    Ok(rep
        .checks
        .iter()
        .map(|c| Check::new(c.identity.name(), c.samples - c.skipped, c.max_violation, c.tolerance))
        .collect())
}

/// Result of building `f` from `h = σ_k^{1/k}` and checking its axioms on
/// seeded cone samples.
#[derive(Debug, Clone, Serialize)]
pub struct BuildReport {
    pub n: usize,
    pub k: usize,
    pub alpha: f64,
    pub seed: u64,
    pub delta: f64,
    pub center_bound: f64,
    /// `f(1, …, 1)`.
    pub value_at_center: f64,
    pub axioms: crate::symfn::AxiomReport,
    pub passed: bool,
}

pub fn build_f_report(n: usize, k: usize, alpha: f64, samples: usize, seed: u64) -> Result<BuildReport> {
    if k == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let f = build_concave_f(Arc::new(SigmaRoot { k }), alpha, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_cone(&mut rng, n, k, samples, 1.5, 1e-3);
    let axioms = verify_axioms(&f, &pts, AxiomTolerances::default());
    Ok(BuildReport {
        n,
        k,
        alpha,
        seed,
        delta: f.delta(),
        center_bound: f.center_bound(),
        value_at_center: f.value(&vec![1.0; n])?,
        passed: axioms.all_passed(),
        axioms,
    })
}
