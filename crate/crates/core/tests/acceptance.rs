//! Acceptance run: twelve criteria, one PASS/FAIL line each.
//!
//! Oracles are recomputed here from first principles wherever possible
//! (brute-force symmetric functions, an independent fixed-mesh RK4 for the
//! radial ODE, the boundary conditions in `u`-form, finite-difference Möbius
//! transforms) rather than read back from the library.

use std::sync::Arc;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use syl_core::boundary::{verify_reduction_identities, BoundaryData};
use syl_core::mobius::{kelvin, moving_sphere_radius, sphere_identity_check, MovingSphereOptions, SphereCase};
use syl_core::radial::{self, AnnulusProblem, RadialEquation, RadialState, Tolerances, Trajectory};
use syl_core::schouten::{
    eigenvalues, radial_eigenvalues, schouten_matrix, spectrum_by_finite_differences, ConformalFactorSample,
    ReferenceSolution,
};
use syl_core::shooting::{
    bifurcation_check, counterexample_sweep, cylinder_solution, find_r_star, log_space, regression_slope,
    solve_annulus, ScanSpec, ShootingOptions, Status, ThresholdOptions, ThresholdStatus,
};
use syl_core::symfn::{
    build_concave_f, homotopy_f, homotopy_membership, homotopy_point, in_gamma_k, sigma_k,
    SymmetricCurvatureFunction, SigmaRoot,
};

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: f64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit, format!("runtime {:.1} s exceeds {limit} s", elapsed.as_secs_f64()))
}

// ---------- independent oracles ----------

/// σ_k by summing over all k-subsets.
fn sigma_brute(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| x[i]).product::<f64>())
        .sum()
}

fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |a, i| a * (n - i) as f64 / (i + 1) as f64)
}

/// Right-hand side of the ξ-equation written out directly.
fn xi_rhs(n: usize, k: usize, xi: f64, xt: f64) -> f64 {
    let theta = 2f64.powi(k as i32 - 1) / binom(n - 1, k - 1);
    let q = 1.0 - xt * xt;
    theta * (-2.0 * k as f64 * xi).exp() * q.powi(1 - k as i32) - (n as f64 - 2.0 * k as f64) / (2.0 * k as f64) * q
}

/// Classical RK4 on a mesh graded towards `t = 0` (where the solutions
/// near the admissibility edge are stiffest).
fn rk4(n: usize, k: usize, xi0: f64, xt0: f64, t_end: f64, steps: usize) -> (f64, f64) {
    let f = |y: [f64; 2]| [y[1], xi_rhs(n, k, y[0], y[1])];
    let mut y = [xi0, xt0];
    let mesh = |i: usize| t_end * (i as f64 / steps as f64).powi(3);
    for i in 0..steps {
        let h = mesh(i + 1) - mesh(i);
        let k1 = f(y);
        let k2 = f([y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = f([y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = f([y[0] + h * k3[0], y[1] + h * k3[1]]);
        for j in 0..2 {
            y[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
    }
    (y[0], y[1])
}

/// Boundary residuals of the annulus problem in terms of `u`, normalised by
/// `(n-2)/2 · u`: `u = e^{-(n-2)(ξ+t)/2}`, `u_r = -(n-2)/2 · u (ξ_t + 1)/r`.
fn bc_residuals(n: usize, r_outer: f64, c1: f64, c2: f64, inner: (f64, f64), outer: (f64, f64)) -> (f64, f64) {
    let m = 0.5 * (n as f64 - 2.0);
    let u = |xi: f64, t: f64| (-m * (xi + t)).exp();
    let e = n as f64 / (n as f64 - 2.0);
    let u1 = u(inner.0, 0.0);
    let ur1 = -m * u1 * (inner.1 + 1.0);
    let res1 = (ur1 + m * u1 + c1 * m * u1.powf(e)) / (m * u1);
    let t = r_outer.ln();
    let ur = u(outer.0, t);
    let urr = -m * ur * (outer.1 + 1.0) / r_outer;
    let res2 = (urr + m / r_outer * ur - c2 * m / r_outer * ur.powf(e)) / (m * ur);
    (res1, res2)
}

/// `A^u` for a radial profile: radial and tangential eigenvalues from
/// `u, u', u''` at radius `r`.
fn schouten_radial(n: usize, r: f64, u: f64, du: f64, d2u: f64) -> (f64, f64) {
    let m = n as f64 - 2.0;
    let p = u.powf(-(n as f64 + 2.0) / m);
    let q = u.powf(-2.0 * n as f64 / m);
    let g2 = du * du;
    let rad = -2.0 / m * p * d2u + 2.0 * n as f64 / (m * m) * q * g2 - 2.0 / (m * m) * q * g2;
    let tan = -2.0 / m * p * du / r - 2.0 / (m * m) * q * g2;
    (rad, tan)
}

fn sigma_radial(n: usize, k: usize, rad: f64, tan: f64) -> f64 {
    binom(n - 1, k - 1) * rad * tan.powi(k as i32 - 1) + binom(n - 1, k) * tan.powi(k as i32)
}

/// `u, u_r, u_rr` from a ξ-trajectory point.
fn profile(n: usize, t: f64, xi: f64, xt: f64, xtt: f64) -> (f64, f64, f64, f64) {
    let m = 0.5 * (n as f64 - 2.0);
    let r = t.exp();
    let u = (-m * (xi + t)).exp();
    let du = -m * u * (xt + 1.0) / r;
    let d2u = (m * m * u * (xt + 1.0).powi(2) - m * u * xtt + m * u * (xt + 1.0)) / (r * r);
    (r, u, du, d2u)
}

fn max_sigma_defect(n: usize, k: usize, tr: &Trajectory) -> f64 {
    tr.points
        .iter()
        .map(|p| {
            let (r, u, du, d2u) = profile(n, p.t, p.xi, p.xi_t, p.xi_tt);
            let (rad, tan) = schouten_radial(n, r, u, du, d2u);
            (sigma_radial(n, k, rad, tan) - 1.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Re-integrates a reported solution independently and checks both
/// boundary conditions of the original problem.
fn independent_bc_defect(p: &AnnulusProblem, xi0: f64, xt0: f64) -> f64 {
    let end = rk4(p.n, p.k, xi0, xt0, p.r_outer.ln(), 40_000);
    let (a, b) = bc_residuals(p.n, p.r_outer, p.c1, p.c2, (xi0, xt0), end);
    a.abs().max(b.abs())
}

// ---------- criteria ----------

fn c1_cylinder() -> Outcome {
    let start = Instant::now();
    let cyl = cylinder_solution(5, 2).map_err(|e| e.to_string())?;
    let expect = 0.25 * 2f64.ln();
    let err = (cyl.xi - expect).abs();
    ensure(err <= 1e-10, format!("|xi - ln2/4| = {err:e}"))?;
    let eq = RadialEquation::new(5, 2).unwrap();
    let tr = radial::integrate(&eq, RadialState::new(0.0, cyl.xi, 0.0), 3.0, &Tolerances::default())
        .map_err(|e| e.to_string())?;
    let drift = tr.points.iter().map(|p| (p.xi - cyl.xi).abs()).fold(0.0, f64::max);
    let sigma = max_sigma_defect(5, 2, &tr);
    ensure(sigma <= 1e-10 && drift <= 1e-10, format!("sigma defect {sigma:e}, drift {drift:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("|xi - ln2/4| = {err:.1e}, sigma_2 defect {sigma:.1e} over {} points", tr.points.len()))
}

fn c2_bifurcation() -> Outcome {
    let mut parts = Vec::new();
    for (n, k, expect) in [(5, 2, 23.1407), (7, 2, 6.1337), (7, 3, 23.1407)] {
        let start = Instant::now();
        let formula = (std::f64::consts::PI / ((n - 2 * k) as f64).sqrt()).exp();
        ensure((formula - expect).abs() < 1e-4, format!("formula {formula} vs {expect}"))?;
        let b = bifurcation_check(n, k, 1e-3, &ShootingOptions::default()).map_err(|e| e.to_string())?;
        ensure((b.threshold - formula).abs() <= 1e-12 * formula, "threshold mismatch")?;
        ensure(
            b.count_below == 1 && b.count_above >= 2,
            format!("({n},{k}): {} below, {} above", b.count_below, b.count_above),
        )?;
        within(start.elapsed(), 120.0)?;
        parts.push(format!("({n},{k}) R={formula:.4}: {}->{}", b.count_below, b.count_above));
    }
    Ok(parts.join(", "))
}

fn c3_existence_grid() -> Outcome {
    let start = Instant::now();
    let mut cells = 0;
    let mut worst = 0.0_f64;
    for (n, k) in [(5, 2), (7, 3)] {
        for r in [1.5, 2.0, 5.0, 10.0, 50.0] {
            for (c1, c2) in [(0.0, 0.0), (0.3, 0.0), (0.5, -0.2)] {
                let p = AnnulusProblem::new(n, k, r, c1, c2).unwrap();
                let res = solve_annulus(&p, &ScanSpec::default_for(n, k), &ShootingOptions::default())
                    .map_err(|e| e.to_string())?;
                ensure(!res.solutions.is_empty(), format!("no solution for n={n} k={k} R={r} c=({c1},{c2})"))?;
                for s in &res.solutions {
                    worst = worst.max(independent_bc_defect(&p, s.xi0, s.xi_t0));
                }
                cells += 1;
            }
        }
    }
    ensure(worst < 1e-6, format!("independent boundary residual {worst:e}"))?;
    within(start.elapsed(), 300.0)?;
    Ok(format!("{cells}/30 cells solvable, independent BC residual <= {worst:.1e}"))
}

fn c4_threshold() -> Outcome {
    let start = Instant::now();
    let res = find_r_star(5, 2, -0.3, 0.0, &ThresholdOptions::default()).map_err(|e| e.to_string())?;
    ensure(res.status == ThresholdStatus::Bracketed, format!("status {:?}", res.status))?;
    ensure(res.r_star > 1.0, format!("R_* = {}", res.r_star))?;
    let solve = |r: f64| {
        let p = AnnulusProblem::new(5, 2, r, -0.3, 0.0).unwrap();
        solve_annulus(&p, &ScanSpec::default_for(5, 2), &ShootingOptions::default()).map(|s| (p, s))
    };
    let (_, below) = solve(res.r_star * (1.0 - 1e-3)).map_err(|e| e.to_string())?;
    ensure(
        below.status == Status::NoSolution,
        format!("below: {:?} with {} solutions", below.status, below.count()),
    )?;
    let (p, above) = solve(res.r_star * (1.0 + 1e-3)).map_err(|e| e.to_string())?;
    ensure(above.count() >= 1, "no solution above R_*")?;
    let bc = above.solutions.iter().map(|s| independent_bc_defect(&p, s.xi0, s.xi_t0)).fold(0.0, f64::max);
    ensure(bc < 1e-6, format!("independent BC residual above R_*: {bc:e}"))?;
    within(start.elapsed(), 300.0)?;
    Ok(format!(
        "R_* = {:.8}; none at R_*(1-1e-3), {} at R_*(1+1e-3) (BC {bc:.1e})",
        res.r_star,
        above.count()
    ))
}

fn c5_blow_up() -> Outcome {
    let start = Instant::now();
    let (n, k, c, delta) = (5, 2, -1.0, 0.05);
    let eps = log_space(1e-4, 1e-2, 9);
    let table = counterexample_sweep(n, k, c, &eps, delta, &Tolerances::default()).map_err(|e| e.to_string())?;
    // (i) slope of log ξ_tt(0) against log ε, from the table and from the
    // initial data alone
    let lx: Vec<f64> = eps.iter().map(|e| e.ln()).collect();
    let ly: Vec<f64> = table.rows.iter().map(|r| r.xi_tt0.abs().ln()).collect();
    let slope = regression_slope(&lx, &ly);
    let direct: Vec<f64> = eps.iter().map(|&e| xi_rhs(n, k, e + c.abs().ln(), -(-e).exp()).ln()).collect();
    let slope_direct = regression_slope(&lx, &direct);
    let target = -((k - 1) as f64);
    ensure((slope / target - 1.0).abs() <= 0.05, format!("slope {slope}"))?;
    ensure((slope - slope_direct).abs() < 1e-6, format!("table slope {slope} vs direct {slope_direct}"))?;
    // (ii) C¹ size stays bounded
    let sups: Vec<f64> = table.rows.iter().map(|r| r.c1_sup).collect();
    let ratio = sups.iter().cloned().fold(0.0, f64::max) / sups.iter().cloned().fold(f64::INFINITY, f64::min);
    ensure(ratio < 2.0, format!("C1 ratio {ratio}"))?;
    // (iii) window length bounded below independently of ε; spot-check it
    // with a crude fixed-step march
    let ts: Vec<f64> = table.rows.iter().map(|r| r.t_window).collect();
    let (tmin, tmax) = (ts.iter().cloned().fold(f64::INFINITY, f64::min), ts.iter().cloned().fold(0.0, f64::max));
    ensure(tmin > 0.0 && tmax / tmin < 1.5, format!("T range [{tmin}, {tmax}]"))?;
    for (i, &e) in eps.iter().enumerate().step_by(4) {
        let t = window_length(n, k, e + c.abs().ln(), -(-e).exp(), delta);
        ensure((t - ts[i]).abs() < 1e-5, format!("T({e}) = {} vs independent {t}", ts[i]))?;
    }
    // spot value: ξ_tt(0; 0.01) = ½e^{-0.04}/q - ¼q, q = 1 - e^{-0.02}
    let q = 1.0 - (-0.02f64).exp();
    let closed = 0.5 * (-0.04f64).exp() / q - 0.25 * q;
    let spot = table.rows.last().unwrap().xi_tt0;
    ensure((spot - closed).abs() <= 1e-6, format!("xi_tt(0; 0.01) = {spot} vs closed form {closed}"))?;
    ensure((spot - 24.26).abs() < 5e-3, format!("xi_tt(0; 0.01) = {spot} does not round to 24.26"))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "slope {slope:.4}, C1 ratio {ratio:.4}, T in [{tmin:.5}, {tmax:.5}], xi_tt(0;0.01) = {spot:.9}"
    ))
}

/// Time until `ξ_t ≥ -1 + δ` or `ξ_tt ≤ 0`, by RK4 with a fine fixed step
/// and linear interpolation of the crossing.
fn window_length(n: usize, k: usize, xi0: f64, xt0: f64, delta: f64) -> f64 {
    let h = 2e-7;
    let (mut t, mut xi, mut xt) = (0.0, xi0, xt0);
    let f = |a: f64, b: f64| (b, xi_rhs(n, k, a, b));
    loop {
        let (a1, b1) = f(xi, xt);
        let (a2, b2) = f(xi + 0.5 * h * a1, xt + 0.5 * h * b1);
        let (a3, b3) = f(xi + 0.5 * h * a2, xt + 0.5 * h * b2);
        let (a4, b4) = f(xi + h * a3, xt + h * b3);
        let nxi = xi + h / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        let nxt = xt + h / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
        let g0 = (-1.0 + delta - xt).min(xi_rhs(n, k, xi, xt));
        let g1 = (-1.0 + delta - nxt).min(xi_rhs(n, k, nxi, nxt));
        if g1 <= 0.0 {
            return t + h * g0 / (g0 - g1);
        }
        (t, xi, xt) = (t + h, nxi, nxt);
        if t > 10.0 {
            return f64::INFINITY;
        }
    }
}

fn c6_schouten() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let n = 4;
    let bubble = ReferenceSolution::standard_bubble(n).unwrap();
    let (mut closed, mut fd) = (0.0_f64, 0.0_f64);
    for _ in 0..1000 {
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ev = eigenvalues(&schouten_matrix(&bubble.sample(&y).unwrap()).unwrap()).unwrap();
        closed = closed.max(ev.as_slice().iter().map(|v| (v - 2.0).abs()).fold(0.0, f64::max));
        let ev = spectrum_by_finite_differences(|p| bubble.value(p), &y).unwrap();
        fd = fd.max(ev.as_slice().iter().map(|v| (v - 2.0).abs()).fold(0.0, f64::max));
    }
    ensure(closed <= 1e-8 && fd <= 1e-5, format!("bubble: closed {closed:e}, fd {fd:e}"))?;
    // the local radial formula reproduces the bubble too
    let (r, a) = (0.7, 1.0f64);
    let u = (a / (1.0 + r * r)).powf(1.0);
    let (du, d2u) = (-2.0 * r / (1.0 + r * r).powi(2), (6.0 * r * r - 2.0) / (1.0 + r * r).powi(3));
    let (rad, tan) = schouten_radial(n, r, u, du, d2u);
    ensure((rad - 2.0).abs() < 1e-12 && (tan - 2.0).abs() < 1e-12, format!("radial oracle ({rad}, {tan})"))?;

    let cyl = ReferenceSolution::cylinder(n).unwrap();
    let mut cyl_err = 0.0_f64;
    for _ in 0..100 {
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let ev = eigenvalues(&schouten_matrix(&cyl.sample(&y).unwrap()).unwrap()).unwrap();
        let s = ev.as_slice();
        cyl_err = cyl_err.max((s[n - 1] + 0.5).abs());
        cyl_err = s[..n - 1].iter().map(|v| (v - 0.5).abs()).fold(cyl_err, f64::max);
    }
    ensure(cyl_err < 1e-12, format!("cylinder {cyl_err:e}"))?;

    // (iii) radial formula vs dense pipeline on random profiles
    let mut dense = 0.0_f64;
    for _ in 0..500 {
        let n = rng.gen_range(3..=8);
        let (xi, xt, xtt) = (rng.gen_range(-1.0..1.0), rng.gen_range(-0.95..0.95), rng.gen_range(-2.0..2.0));
        let t = rng.gen_range(-1.0..2.0);
        let (r, u, du, d2u) = profile(n, t, xi, xt, xtt);
        let dir = {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            DVector::from_vec(v) / l
        };
        let proj = &dir * dir.transpose();
        let hess = &proj * d2u + (DMatrix::identity(n, n) - &proj) * (du / r);
        let y: Vec<f64> = (&dir * r).iter().copied().collect();
        let grad: Vec<f64> = (&dir * du).iter().copied().collect();
        let sample = ConformalFactorSample::new(y, u, grad, hess).unwrap();
        let ev = eigenvalues(&schouten_matrix(&sample).unwrap()).unwrap();
        let (rad, tan) = radial_eigenvalues(xi, xt, xtt);
        let mut want = vec![tan; n];
        want[0] = rad;
        want.sort_by(|a, b| b.total_cmp(a));
        let err = ev.as_slice().iter().zip(&want).map(|(a, b)| (a - b).abs() / b.abs().max(1.0)).fold(0.0, f64::max);
        dense = dense.max(err);
    }
    ensure(dense <= 1e-6, format!("radial vs dense {dense:e}"))?;

    // (iv) σ_k ≡ 1 along every solution trajectory of a few problems
    let mut sig = 0.0_f64;
    let mut trajectories = 0;
    for (n, k, r, c1, c2) in [(5, 2, 30.0, 0.0, 0.0), (7, 3, 5.0, 0.3, 0.0), (5, 2, 2.0, 0.5, -0.2)] {
        let p = AnnulusProblem::new(n, k, r, c1, c2).unwrap();
        let res = solve_annulus(&p, &ScanSpec::default_for(n, k), &ShootingOptions::default()).unwrap();
        for s in &res.solutions {
            sig = sig.max(max_sigma_defect(n, k, &s.trajectory));
            trajectories += 1;
        }
    }
    ensure(trajectories > 0 && sig <= 1e-8, format!("sigma_k defect {sig:e} on {trajectories} trajectories"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "bubble {closed:.1e}/{fd:.1e}, cylinder {cyl_err:.1e}, radial-vs-dense {dense:.1e}, sigma_k {sig:.1e} ({trajectories} traj.)"
    ))
}

fn c7_kelvin() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut self_k = 0.0_f64;
    for _ in 0..1000 {
        let n = rng.gen_range(3..=6);
        let a = rng.gen_range(0.3..3.0);
        let w = |y: &[f64]| (a / (1.0 + a * a * y.iter().map(|v| v * v).sum::<f64>())).powf(0.5 * (n as f64 - 2.0));
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let lam = 1.0 / a;
        // w_x^λ(y) = (λ/|y|)^{n-2} w(λ² y/|y|²) for x = 0
        let r2: f64 = y.iter().map(|v| v * v).sum();
        let image: Vec<f64> = y.iter().map(|v| lam * lam * v / r2).collect();
        let by_hand = (lam / r2.sqrt()).powf(n as f64 - 2.0) * w(&image);
        let lib = kelvin(w, &vec![0.0; n], lam, &y).unwrap();
        self_k = self_k.max((lib - w(&y)).abs() / w(&y)).max((by_hand - w(&y)).abs() / w(&y));
    }
    ensure(self_k <= 1e-10, format!("self-Kelvin {self_k:e}"))?;

    let n = 3;
    let w = |y: &[f64]| (1.0 / (1.0 + y.iter().map(|v| v * v).sum::<f64>())).sqrt();
    let mut samples = Vec::new();
    let g = 16;
    for i in 0..=g {
        for j in 0..=g {
            for l in 0..=g {
                let p = [i, j, l].map(|v| -4.0 + 8.0 * v as f64 / g as f64);
                if p.iter().map(|v| v * v).sum::<f64>() <= 16.0 {
                    samples.push(p.to_vec());
                }
            }
        }
    }
    let rep = moving_sphere_radius(&w, &samples, &[0.0; 3], &MovingSphereOptions::new(4.0)).unwrap();
    ensure((rep.lambda_bar - 1.0).abs() <= 1e-4, format!("lambda_bar = {}", rep.lambda_bar))?;
    // |∇ ln w(y)| = (n-2)|y|/(1+|y|²) ≤ (n-2)/(λ̄ - |y|) for |y| < λ̄
    let mut tested = 0;
    let mut worst = f64::NEG_INFINITY;
    for p in &samples {
        let r = p.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r < rep.lambda_bar {
            let lhs = (n as f64 - 2.0) * r / (1.0 + r * r);
            let rhs = (n as f64 - 2.0) / (rep.lambda_bar - r);
            worst = worst.max(lhs - rhs);
            tested += 1;
        }
    }
    ensure(tested > 0 && worst <= 0.0, format!("gradient bound excess {worst:e}"))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!("self-Kelvin {self_k:.1e}, lambda_bar = {:.6}, gradient bound at {tested} samples", rep.lambda_bar))
}

fn c8_spheres() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut viol, mut eq, mut oracle) = (0.0_f64, 0.0_f64, 0.0_f64);
    let mut equality_cases = 0;
    for i in 0..10_000 {
        let n = rng.gen_range(2..=6);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let r = rng.gen_range(0.3..3.0);
        let unit = |rng: &mut ChaCha8Rng| {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / l).collect::<Vec<_>>()
        };
        let y: Vec<f64> = unit(&mut rng).iter().zip(&x).map(|(d, c)| c + r * d).collect();
        let z: Vec<f64> = match i % 5 {
            0 => x.clone(),
            1 => unit(&mut rng).iter().zip(&x).map(|(d, c)| c + r * d).collect(),
            _ => (0..n).map(|j| x[j] + rng.gen_range(-2.0 * r..2.0 * r)).collect(),
        };
        // by hand: q = |y-z|²/(2r) + (y-z)·(x-y)/r, d = dist(z, ∂B)
        let q = y.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>() / (2.0 * r)
            + (0..n).map(|j| (y[j] - z[j]) * (x[j] - y[j])).sum::<f64>() / r;
        let rho = z.iter().zip(&x).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        for c in sphere_identity_check(&x, r, &z, &y, 1e-12).unwrap() {
            let (lhs, rhs) = match c.case {
                SphereCase::Exterior => (q, (rho - r).abs()),
                SphereCase::Interior => (-q, 0.5 * (rho - r).abs()),
            };
            viol = viol.max(rhs - lhs);
            oracle = oracle.max((c.lhs - lhs).abs()).max((c.rhs - rhs).abs());
            if c.equality_expected {
                eq = eq.max((lhs - rhs).abs());
                equality_cases += 1;
            }
        }
    }
    ensure(viol <= 1e-12, format!("violation {viol:e}"))?;
    ensure(eq <= 1e-12, format!("equality defect {eq:e}"))?;
    ensure(oracle <= 1e-12, format!("library vs hand {oracle:e}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("10^4 samples, violation {viol:.1e}, {equality_cases} equality cases to {eq:.1e}"))
}

/// A Möbius map assembled by hand: translation, rotation (Cayley), scaling,
/// then inversion.
struct Map {
    b: Vec<f64>,
    q: DMatrix<f64>,
    c: f64,
    center: Vec<f64>,
    lam: f64,
}

impl Map {
    fn random(rng: &mut ChaCha8Rng, n: usize) -> Self {
        let s = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
        let skew = &s - s.transpose();
        let id = DMatrix::<f64>::identity(n, n);
        let q = (&id - &skew).try_inverse().unwrap() * (&id + &skew);
        Map {
            b: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            q,
            c: rng.gen_range(0.5..2.0),
            center: (0..n).map(|_| rng.gen_range(2.0..3.0)).collect(),
            lam: rng.gen_range(0.5..2.0),
        }
    }

    fn apply(&self, y: &[f64]) -> Vec<f64> {
        let v = DVector::from_iterator(y.len(), y.iter().zip(&self.b).map(|(a, b)| a + b));
        let w: Vec<f64> = (&self.q * v * self.c).iter().copied().collect();
        let d: Vec<f64> = w.iter().zip(&self.center).map(|(a, c)| a - c).collect();
        let d2: f64 = d.iter().map(|v| v * v).sum();
        d.iter().zip(&self.center).map(|(v, c)| c + self.lam * self.lam * v / d2).collect()
    }
}

/// Fourth-order central differences.
fn fd_gradient(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let at = |s: f64| {
                let mut y = x.to_vec();
                y[i] += s * h;
                f(&y)
            };
            (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h)
        })
        .collect()
}

fn canonical(s: f64, p: &[f64], nu: &[f64], h: &DMatrix<f64>) -> Vec<f64> {
    let n = p.len();
    let m = n as f64 - 2.0;
    let shift = 2.0 / m * p.iter().zip(nu).map(|(a, b)| a * b).sum::<f64>() / s;
    let mat = (h + DMatrix::identity(n, n) * shift) * s.powf(-2.0 / m);
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

fn c9_boundary() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let samples: Vec<BoundaryData> = (0..1000).map(|i| BoundaryData::random(&mut rng, 3 + i % 6)).collect();
    let rep = verify_reduction_identities(&samples, &mut rng, 1e-9).map_err(|e| e.to_string())?;
    for c in &rep.checks {
        ensure(c.passed && c.max_violation <= 1e-9, format!("{}: {:e}", c.identity.name(), c.max_violation))?;
    }
    let lib_worst = rep.checks.iter().map(|c| c.max_violation).fold(0.0, f64::max);

    // independent route: transform by definition with finite differences
    let mut fd_worst = 0.0_f64;
    for _ in 0..200 {
        let n = rng.gen_range(3..=6);
        let psi = Map::random(&mut rng, n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let y0 = psi.apply(&x);
        let s0 = rng.gen_range(0.5..2.0);
        let p0: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.3..0.3)).collect();
        let u = |z: &[f64]| s0 + z.iter().zip(&y0).zip(&p0).map(|((a, b), c)| (a - b) * c).sum::<f64>();
        let nu = {
            let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let l = v.iter().map(|a| a * a).sum::<f64>().sqrt();
            v.into_iter().map(|a| a / l).collect::<Vec<_>>()
        };
        let hm = {
            let a = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
            (&a + a.transpose()) * 0.5
        };
        let h = 1e-3;
        let jac = DMatrix::from_fn(n, n, |i, j| {
            let comp = |z: &[f64]| psi.apply(z)[i];
            fd_gradient(&comp, &x, h)[j]
        });
        let factor = |z: &[f64]| {
            let j = DMatrix::from_fn(n, n, |i, l| {
                let comp = |w: &[f64]| psi.apply(w)[i];
                fd_gradient(&comp, z, h)[l]
            });
            j.determinant().abs().powf(1.0 / n as f64)
        };
        let m = 0.5 * (n as f64 - 2.0);
        let u_psi = |z: &[f64]| factor(z).powf(m) * u(&psi.apply(z));
        let s_x = u_psi(&x);
        let p_x = fd_gradient(&u_psi, &x, h);
        let ln_a = |z: &[f64]| factor(z).ln();
        let grad_ln_a = fd_gradient(&ln_a, &x, 1e-2);
        let a = factor(&x);
        let pushed = &jac * DVector::from_column_slice(&nu);
        let nu_psi: Vec<f64> = (&pushed / pushed.norm()).iter().copied().collect();
        let shift: f64 = grad_ln_a.iter().zip(&nu).map(|(g, v)| g * v).sum();
        let h_psi = (&hm + DMatrix::identity(n, n) * shift) / a;
        let lhs = canonical(s_x, &p_x, &nu, &hm);
        let rhs = canonical(u(&y0), &p0, &nu_psi, &h_psi);
        let scale = lhs.iter().map(|v| v.abs()).fold(1.0, f64::max);
        fd_worst = fd_worst.max(lhs.iter().zip(&rhs).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max) / scale);
    }
    ensure(fd_worst <= 1e-6, format!("finite-difference route {fd_worst:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!("{} identities on 10^3 samples, max {lib_worst:.1e}; FD transform route {fd_worst:.1e}", rep.checks.len()))
}

fn c10_concave_f() -> Outcome {
    let start = Instant::now();
    let n = 4;
    let f = build_concave_f(Arc::new(SigmaRoot { k: 2 }), 0.5, n).map_err(|e| e.to_string())?;
    // δ = n h(1/n, …)^{1/α} with h = σ_2^{1/2}
    let delta = n as f64 * (binom(n, 2) / (n * n) as f64);
    ensure((f.delta() - delta).abs() < 1e-12, format!("delta {} vs {delta}", f.delta()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut min_partial, mut max_hess, mut min_sum, mut euler) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, 0.0_f64);
    let mut count = 0;
    while count < 500 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let norm2: f64 = x.iter().map(|v| v * v).sum();
        if !(sigma_brute(&x, 1) > 0.0 && sigma_brute(&x, 2) > 1e-2 * norm2) {
            continue;
        }
        count += 1;
        let value = |y: &[f64]| f.value(y).unwrap();
        let g = fd_gradient(&value, &x, 1e-5);
        min_partial = min_partial.min(g.iter().cloned().fold(f64::INFINITY, f64::min));
        min_sum = min_sum.min(g.iter().sum::<f64>());
        let fx = value(&x);
        euler = euler.max((x.iter().zip(&g).map(|(a, b)| a * b).sum::<f64>() - fx).abs() / fx.max(1.0));
        // Hessian from differences of the analytic gradient, Richardson-
        // extrapolated: the zero mode along λ leaves no room for O(h²) error
        let hess_at = |hh: f64| {
            DMatrix::from_fn(n, n, |i, j| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += hh;
                xm[j] -= hh;
                (f.gradient(&xp).unwrap()[i] - f.gradient(&xm).unwrap()[i]) / (2.0 * hh)
            })
        };
        let hess = (hess_at(1e-4) * 4.0 - hess_at(2e-4)) / 3.0;
        let hess = (&hess + hess.transpose()) * 0.5;
        max_hess = max_hess.max(SymmetricEigen::new(hess).eigenvalues.max());
    }
    ensure(min_partial > 0.0, format!("min partial {min_partial}"))?;
    ensure(max_hess <= 1e-8, format!("max Hessian eigenvalue {max_hess:e}"))?;
    ensure(min_sum >= delta - 1e-8, format!("min gradient sum {min_sum} < delta {delta}"))?;
    ensure(euler <= 1e-8, format!("Euler defect {euler:e}"))?;

    let f1 = build_concave_f(Arc::new(SigmaRoot { k: 1 }), 0.5, n).map_err(|e| e.to_string())?;
    ensure(f1.delta() == n as f64, format!("sigma_1 delta {}", f1.delta()))?;
    let mut s1 = 0.0_f64;
    for _ in 0..500 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..3.0)).collect();
        let t: f64 = x.iter().sum();
        if t > 0.0 {
            s1 = s1.max((f1.value(&x).unwrap() - t).abs() / t);
        }
    }
    ensure(s1 <= 1e-14, format!("sigma_1 reproduction {s1:e}"))?;
    within(start.elapsed(), 30.0)?;
    Ok(format!(
        "min df_i {min_partial:.3e}, max Hess eig {max_hess:.1e}, min sum {min_sum:.4} >= delta {delta}, Euler {euler:.1e}, f=sigma_1 to {s1:.0e}"
    ))
}

fn c11_cylinder_constant() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0_f64;
    for n in 3..=8 {
        let mut v = vec![0.5; n];
        v[0] = -0.5;
        for k in 1..=n {
            let brute = sigma_brute(&v, k);
            let closed = 0.5f64.powi(k as i32) * binom(n - 1, k - 1) * (n as f64 - 2.0 * k as f64) / k as f64;
            let lib = sigma_k(&v, k).unwrap();
            worst = worst.max((brute - closed).abs()).max((lib - closed).abs());
            ensure((brute > 1e-14) == (n > 2 * k), format!("sign at n={n}, k={k}: {brute}"))?;
        }
    }
    ensure(worst < 1e-13, format!("closed form defect {worst:e}"))?;
    within(start.elapsed(), 1.0)?;
    Ok(format!("36 (n,k) pairs, max defect {worst:.1e}, positive iff n > 2k"))
}

fn c12_homotopy() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let (mut g0, mut g1) = (0, 0);
    for _ in 0..10_000 {
        let n = rng.gen_range(2..=7);
        let k = rng.gen_range(1..=n);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let cone = |v: &[f64]| (1..=k).all(|j| sigma_brute(v, j) > 0.0);
        if homotopy_membership(&x, 0.0, cone).unwrap() != (x.iter().sum::<f64>() > 0.0) {
            g0 += 1;
        }
        if homotopy_membership(&x, 1.0, |v: &[f64]| in_gamma_k(v, k)).unwrap() != cone(&x) {
            g1 += 1;
        }
    }
    ensure(g0 == 0 && g1 == 0, format!("{g0} Gamma_0 and {g1} Gamma_1 mismatches"))?;
    // continuity: |f_{t+h} - f_t| → 0 linearly in h at random λ ∈ Γ_n
    let n = 5;
    let f = SymmetricCurvatureFunction::sigma_root(3, n).unwrap();
    let mut worst_rate = 0.0_f64;
    for _ in 0..200 {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..2.0)).collect();
        let t = rng.gen_range(0.0..0.99);
        let by_hand: Vec<f64> = x.iter().map(|v| t * v + (1.0 - t) * x.iter().sum::<f64>()).collect();
        ensure(
            homotopy_point(&x, t).iter().zip(&by_hand).all(|(a, b)| (a - b).abs() < 1e-14),
            "homotopy point",
        )?;
        let ft = homotopy_f(&x, t, &f).unwrap();
        for h in [1e-2, 1e-4, 1e-6, 1e-8] {
            let d = (homotopy_f(&x, t + h, &f).unwrap() - ft).abs();
            worst_rate = worst_rate.max(d / h);
        }
    }
    // a uniform Lipschitz bound: |∇f| ≤ C(n) at homogeneous degree 1, and
    // |dλ_t/dt| ≤ (n + 1)|λ|; the bound below is generous
    ensure(worst_rate < 100.0, format!("difference quotient {worst_rate}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!("10^4 samples: 0 mismatches; |f_(t+h) - f_t|/h <= {worst_rate:.3}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("cylinder fixed point", c1_cylinder),
        ("bifurcation threshold", c2_bifurcation),
        ("existence for c1 + c2 >= 0", c3_existence_grid),
        ("threshold radius R_*", c4_threshold),
        ("C2 blow-up family", c5_blow_up),
        ("Schouten oracles", c6_schouten),
        ("Kelvin / moving spheres", c7_kelvin),
        ("sphere inequalities", c8_spheres),
        ("boundary canonical form", c9_boundary),
        ("concave f construction", c10_concave_f),
        ("cylinder sigma_k constant", c11_cylinder_constant),
        ("cone homotopy", c12_homotopy),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match out {
            Ok(msg) => println!("PASS {:>2} {name} [{secs:.2} s]: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{secs:.2} s]: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
