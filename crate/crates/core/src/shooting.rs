//! Annulus boundary value problems by shooting on `ξ(0)`.
//!
//! The inner condition fixes `ξ_t(0) = c₁ e^{-ξ(0)}`, so the problem is a
//! scalar root-finding problem for the outer residual as a function of
//! `ξ(0)`. The residual is sampled on a grid, sign changes are bisected, and
//! grid points where `|residual|` has a same-sign local minimum are
//! minimised locally so that pairs of nearby roots (folds) are not missed.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::radial::{
    self, inner_bc_residual, outer_bc_residual, AnnulusProblem, RadialEquation, RadialState, Termination,
    Tolerances, Trajectory, TrajectoryPoint,
};

/// Scan grid for `ξ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct ScanSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl ScanSpec {
    pub fn new(lo: f64, hi: f64, points: usize) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Input(format!("scan range [{lo}, {hi}] is empty")));
        }
        if points < 2 {
            return Err(Error::Input("scan needs at least 2 points".into()));
        }
        Ok(Self { lo, hi, points })
    }

    /// `[ξ_ref - 5, ξ_ref + 5]` with 2000 points, where `ξ_ref` is the
    /// cylinder value when it exists and 0 otherwise.
    pub fn default_for(n: usize, k: usize) -> Self {
        let center = RadialEquation::new(n, k).ok().and_then(|eq| eq.cylinder_xi().ok()).unwrap_or(0.0);
        Self { lo: center - 5.0, hi: center + 5.0, points: 2000 }
    }

    /// Same range with twice the density.
    pub fn refined(&self) -> Self {
        Self { points: 2 * self.points - 1, ..*self }
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.points - 1) as f64
    }

    pub fn point(&self, i: usize) -> f64 {
        if i + 1 == self.points {
            self.hi
        } else {
            self.lo + i as f64 * self.spacing()
        }
    }
}

/// Numerical knobs of the shooting solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShootingOptions {
    pub tol: Tolerances,
    /// Required `|outer residual|` at accepted roots.
    pub root_tol: f64,
    /// Roots closer than this in `ξ(0)` are merged.
    pub merge_tol: f64,
    /// Longest run of early-terminated cells compatible with a "no
    /// solution" verdict.
    pub max_gap: usize,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self { tol: Tolerances::default(), root_tol: 1e-10, merge_tol: 1e-6, max_gap: 10 }
    }
}

impl ShootingOptions {
    pub fn with_tolerance(rtol: f64) -> Self {
        Self { tol: Tolerances::new(rtol, 1e-2 * rtol), ..Self::default() }
    }
}

/// Outcome of one grid integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Cell {
    /// Reached `T = ln R`; outer residual recorded.
    Residual { value: f64 },
    /// The inner condition gives `|ξ_t(0)| ≥ 1`: no admissible start.
    Excluded,
    /// Trajectory stopped before `T`.
    Terminated { cause: Termination, t: f64 },
}

impl Cell {
    pub fn residual(&self) -> Option<f64> {
        match self {
            Cell::Residual { value } => Some(*value),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanDiagnostics {
    pub xi0: Vec<f64>,
    pub cells: Vec<Cell>,
    pub sign_changes: usize,
    pub fold_candidates: usize,
    pub folds_resolved: usize,
    /// Extra samples placed next to the edge of the admissible set.
    pub edge_points: usize,
    pub excluded_cells: usize,
    pub terminated_cells: usize,
    /// Longest run of consecutive terminated cells.
    pub max_gap: usize,
}

/// A located solution of the annulus problem.
#[derive(Debug, Clone, Serialize)]
pub struct AnnulusSolution {
    pub xi0: f64,
    pub xi_t0: f64,
    pub inner_residual: f64,
    pub outer_residual: f64,
    /// `max |σ_k(λ) - 1|` over the stored trajectory points.
    pub max_sigma_residual: f64,
    /// `max |ξ(t) - ξ(0)|`: zero for the cylinder.
    pub oscillation: f64,
    #[serde(skip)]
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// At least one solution found.
    Solved,
    /// Complete scan without sign change or wide gaps.
    NoSolution,
    /// No solution found, but gaps in the scan prevent a verdict.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShootingResult {
    pub problem: AnnulusProblem,
    pub scan: ScanSpec,
    pub solutions: Vec<AnnulusSolution>,
    pub diagnostics: ScanDiagnostics,
    pub status: Status,
}

impl ShootingResult {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }
}

/// Number of geometrically spaced samples placed between an inadmissible
/// grid point and its admissible neighbour.
const EDGE_LAYERS: usize = 12;

struct Shooter<'a> {
    problem: &'a AnnulusProblem,
    eq: RadialEquation,
    opts: &'a ShootingOptions,
}

impl Shooter<'_> {
    fn cell(&self, xi0: f64, tol: &Tolerances) -> Cell {
        let init = self.problem.initial_state(xi0);
        if !init.is_admissible() || self.eq.rhs(&init).is_none() {
            return Cell::Excluded;
        }
        match radial::integrate(&self.eq, init, self.problem.t_end(), tol) {
            Ok(tr) if tr.reached_target() => {
                Cell::Residual { value: outer_bc_residual(&tr.last().state(), self.problem.c2, self.problem.r_outer) }
            }
            Ok(tr) => Cell::Terminated { cause: tr.termination, t: tr.last().t },
            Err(_) => Cell::Excluded,
        }
    }

    fn residual(&self, xi0: f64) -> Option<f64> {
        self.cell(xi0, &self.opts.tol).residual()
    }

    /// Bisection on a bracket with `ra · rb < 0`.
    fn bisect(&self, mut a: f64, mut ra: f64, mut b: f64, mut rb: f64) -> Option<f64> {
        if ra == 0.0 {
            return Some(a);
        }
        if rb == 0.0 {
            return Some(b);
        }
        for _ in 0..200 {
            let (best, rbest) = if ra.abs() < rb.abs() { (a, ra) } else { (b, rb) };
            if rbest.abs() <= self.opts.root_tol && (b - a).abs() < 1e-6 {
                return Some(best);
            }
            let m = 0.5 * (a + b);
            if m == a || m == b {
                return Some(best);
            }
            let rm = self.residual(m)?;
            if rm == 0.0 {
                return Some(m);
            }
            if rm.signum() == ra.signum() {
                a = m;
                ra = rm;
            } else {
                b = m;
                rb = rm;
            }
        }
        Some(if ra.abs() < rb.abs() { a } else { b })
    }

    /// Golden-section minimisation of `sign · residual` on `[a, b]`;
    /// returns the first point where the sign flips, if any.
    fn fold_probe(&self, a: f64, b: f64, sign: f64) -> Option<(f64, f64)> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (a, b);
        let mut x1 = b - g * (b - a);
        let mut x2 = a + g * (b - a);
        let mut f1 = sign * self.residual(x1)?;
        let mut f2 = sign * self.residual(x2)?;
        for _ in 0..80 {
            if f1 <= 0.0 {
                return Some((x1, f1 * sign));
            }
            if f2 <= 0.0 {
                return Some((x2, f2 * sign));
            }
            if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
                break;
            }
            if f1 < f2 {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - g * (b - a);
                f1 = sign * self.residual(x1)?;
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (b - a);
                f2 = sign * self.residual(x2)?;
            }
        }
        None
    }

    fn admissible(&self, xi0: f64) -> bool {
        let init = self.problem.initial_state(xi0);
        init.is_admissible() && self.eq.rhs(&init).is_some()
    }

    /// Residual samples approaching the edge of the admissible set of
    /// `ξ(0)` between an excluded grid point and an admissible one, ordered
    /// from the edge towards `valid`.
    fn edge_layer(&self, excluded: f64, valid: f64) -> Vec<(f64, f64)> {
        let (mut out, mut inn) = (excluded, valid);
        for _ in 0..60 {
            let m = 0.5 * (out + inn);
            if self.admissible(m) {
                inn = m;
            } else {
                out = m;
            }
        }
        (1..=EDGE_LAYERS)
            .rev()
            .filter_map(|j| {
                let x = inn + (valid - inn) * 0.25f64.powi(j as i32);
                self.residual(x).map(|r| (x, r))
            })
            .collect()
    }

    fn solution(&self, xi0: f64) -> Option<AnnulusSolution> {
        let init = self.problem.initial_state(xi0);
        let tr = radial::integrate(&self.eq, init, self.problem.t_end(), &self.opts.tol).ok()?;
        if !tr.reached_target() {
            return None;
        }
        let outer = outer_bc_residual(&tr.last().state(), self.problem.c2, self.problem.r_outer);
        let max_sigma = tr.reconstruct().iter().map(|s| s.sigma_k_residual.abs()).fold(0.0, f64::max);
        let oscillation = tr.points.iter().map(|p| (p.xi - xi0).abs()).fold(0.0, f64::max);
        Some(AnnulusSolution {
            xi0,
            xi_t0: init.xi_t,
            inner_residual: inner_bc_residual(&init, self.problem.c1),
            outer_residual: outer,
            max_sigma_residual: max_sigma,
            oscillation,
            trajectory: tr,
        })
    }
}

/// Finds the radial solutions of the annulus problem with `ξ(0)` in the
/// scan range.
pub fn solve_annulus(problem: &AnnulusProblem, scan: &ScanSpec, opts: &ShootingOptions) -> Result<ShootingResult> {
    ScanSpec::new(scan.lo, scan.hi, scan.points)?;
    let shooter = Shooter { problem, eq: problem.equation(), opts };
    let xi0: Vec<f64> = (0..scan.points).map(|i| scan.point(i)).collect();
    let cells: Vec<Cell> = xi0.par_iter().map(|&x| shooter.cell(x, &opts.tol)).collect();

    let mut roots = Vec::new();
    let mut sign_changes = 0;
    for i in 0..cells.len() {
        if cells[i].residual() == Some(0.0) {
            roots.push(xi0[i]);
        }
    }
    for i in 0..cells.len().saturating_sub(1) {
        if let (Some(ra), Some(rb)) = (cells[i].residual(), cells[i + 1].residual()) {
            if ra * rb < 0.0 {
                sign_changes += 1;
                roots.extend(shooter.bisect(xi0[i], ra, xi0[i + 1], rb));
            }
        }
    }

    // the residual usually has a finite limit at the edge of the admissible
    // set, so roots can hide in the cell next to it
    let mut edge_points = 0;
    for i in 0..cells.len().saturating_sub(1) {
        let (ex, va) = match (&cells[i], &cells[i + 1]) {
            (Cell::Excluded, c) if c.residual().is_some() => (i, i + 1),
            (c, Cell::Excluded) if c.residual().is_some() => (i + 1, i),
            _ => continue,
        };
        let mut layer = shooter.edge_layer(xi0[ex], xi0[va]);
        layer.push((xi0[va], cells[va].residual().expect("checked above")));
        edge_points += layer.len() - 1;
        for w in layer.windows(2) {
            let ((xa, ra), (xb, rb)) = (w[0], w[1]);
            if ra == 0.0 {
                roots.push(xa);
            } else if ra * rb < 0.0 {
                sign_changes += 1;
                roots.extend(shooter.bisect(xa, ra, xb, rb));
            }
        }
    }

    // same-sign local minima of |residual|
    let mut fold_candidates = 0;
    let mut folds_resolved = 0;
    for i in 1..cells.len().saturating_sub(1) {
        let (Some(r0), Some(r1), Some(r2)) = (cells[i - 1].residual(), cells[i].residual(), cells[i + 1].residual())
        else {
            continue;
        };
        if r0 * r1 <= 0.0 || r1 * r2 <= 0.0 || r1.abs() > r0.abs() || r1.abs() > r2.abs() {
            continue;
        }
        fold_candidates += 1;
        let sign = r1.signum();
        if let Some((xm, rm)) = shooter.fold_probe(xi0[i - 1], xi0[i + 1], sign) {
            folds_resolved += 1;
            if rm == 0.0 {
                roots.push(xm);
            } else {
                roots.extend(shooter.bisect(xi0[i - 1], r0, xm, rm));
                roots.extend(shooter.bisect(xm, rm, xi0[i + 1], r2));
            }
        }
    }

    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|b, a| (*b - *a).abs() < opts.merge_tol);
    let solutions: Vec<AnnulusSolution> = roots.par_iter().filter_map(|&x| shooter.solution(x)).collect();

    let excluded_cells = cells.iter().filter(|c| matches!(c, Cell::Excluded)).count();
    let terminated_cells = cells.iter().filter(|c| matches!(c, Cell::Terminated { .. })).count();
    let max_gap = cells
        .iter()
        .fold((0usize, 0usize), |(best, run), c| {
            let run = if matches!(c, Cell::Terminated { .. }) { run + 1 } else { 0 };
            (best.max(run), run)
        })
        .0;
    let status = if !solutions.is_empty() {
        Status::Solved
    } else if max_gap > opts.max_gap {
        Status::Inconclusive
    } else {
        Status::NoSolution
    };
    Ok(ShootingResult {
        problem: *problem,
        scan: *scan,
        solutions,
        diagnostics: ScanDiagnostics {
            xi0,
            cells,
            sign_changes,
            fold_candidates,
            folds_resolved,
            edge_points,
            excluded_cells,
            terminated_cells,
            max_gap,
        },
        status,
    })
}

/// The constant solution and its conformal scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CylinderSolution {
    pub n: usize,
    pub k: usize,
    pub xi: f64,
    /// `u = s · r^{-(n-2)/2}`.
    pub scale: f64,
    /// `σ_k(λ) - 1` on the constant trajectory.
    pub sigma_residual: f64,
    pub bifurcation_radius: f64,
}

pub fn cylinder_solution(n: usize, k: usize) -> Result<CylinderSolution> {
    let eq = RadialEquation::new(n, k)?;
    let xi = eq.cylinder_xi()?;
    let p = TrajectoryPoint { t: 0.0, xi, xi_t: 0.0, xi_tt: 0.0 };
    let sample = radial::ProfileSample::from_point(&eq, &p);
    Ok(CylinderSolution {
        n,
        k,
        xi,
        scale: (-0.5 * (n as f64 - 2.0) * xi).exp(),
        sigma_residual: sample.sigma_k_residual,
        bifurcation_radius: bifurcation_threshold(n, k)?,
    })
}

/// `exp(π / √(n - 2k))`: the outer radius beyond which a non-constant
/// solution branches off the cylinder for `c₁ = c₂ = 0`.
pub fn bifurcation_threshold(n: usize, k: usize) -> Result<f64> {
    if n <= 2 * k {
        return Err(Error::Domain(format!("no bifurcation threshold for n = {n}, k = {k} (needs n > 2k)")));
    }
    Ok((std::f64::consts::PI / ((n - 2 * k) as f64).sqrt()).exp())
}

/// Solution counts for `c₁ = c₂ = 0` just below and just above the
/// bifurcation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BifurcationCheck {
    pub n: usize,
    pub k: usize,
    pub threshold: f64,
    pub relative_offset: f64,
    pub count_below: usize,
    pub count_above: usize,
}

impl BifurcationCheck {
    pub fn passed(&self) -> bool {
        self.count_below == 1 && self.count_above >= 2
    }
}

pub fn bifurcation_check(n: usize, k: usize, relative_offset: f64, opts: &ShootingOptions) -> Result<BifurcationCheck> {
    let threshold = bifurcation_threshold(n, k)?;
    let scan = ScanSpec::default_for(n, k);
    let count = |r: f64| -> Result<usize> {
        let p = AnnulusProblem::new(n, k, r, 0.0, 0.0)?;
        Ok(solve_annulus(&p, &scan, opts)?.count())
    };
    Ok(BifurcationCheck {
        n,
        k,
        threshold,
        relative_offset,
        count_below: count(threshold * (1.0 - relative_offset))?,
        count_above: count(threshold * (1.0 + relative_offset))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Solvable,
    Unsolvable,
    Inconclusive,
}

impl From<Status> for Verdict {
    fn from(s: Status) -> Self {
        match s {
            Status::Solved => Verdict::Solvable,
            Status::NoSolution => Verdict::Unsolvable,
            Status::Inconclusive => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Probe {
    pub r: f64,
    pub verdict: Verdict,
    pub solutions: usize,
    pub max_gap: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdStatus {
    /// `R_*` bracketed to the requested relative width.
    Bracketed,
    /// Solutions exist at the smallest probed radius.
    Anomaly,
    /// No solution up to the largest probed radius.
    Unresolved,
    /// A probe could not decide solvability.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct ThresholdResult {
    pub n: usize,
    pub k: usize,
    pub c1: f64,
    pub c2: f64,
    pub status: ThresholdStatus,
    /// Upper end of the final bracket (smallest radius seen to be solvable).
    pub r_star: f64,
    pub bracket: (f64, f64),
    pub history: Vec<Probe>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdOptions {
    pub shooting: ShootingOptions,
    pub scan: Option<ScanSpec>,
    /// First probe is `1 + initial_offset`.
    pub initial_offset: f64,
    pub r_max: f64,
    pub rel_tol: f64,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self { shooting: ShootingOptions::default(), scan: None, initial_offset: 1e-2, r_max: 1e4, rel_tol: 1e-4 }
    }
}

/// Locates the radius below which the annulus problem has no radial
/// solution. Requires `c₁ + c₂ < 0` and `2 ≤ k < n/2`.
pub fn find_r_star(n: usize, k: usize, c1: f64, c2: f64, opts: &ThresholdOptions) -> Result<ThresholdResult> {
    if !(c1 + c2 < 0.0) {
        return Err(Error::Domain(format!("threshold search needs c1 + c2 < 0, got {}", c1 + c2)));
    }
    if k < 2 || 2 * k >= n {
        return Err(Error::Domain(format!("threshold search needs 2 <= k < n/2, got n = {n}, k = {k}")));
    }
    let scan = opts.scan.unwrap_or_else(|| ScanSpec::default_for(n, k));
    let mut history = Vec::new();
    let mut probe = |r: f64| -> Result<Verdict> {
        let res = solve_annulus(&AnnulusProblem::new(n, k, r, c1, c2)?, &scan, &opts.shooting)?;
        let verdict = Verdict::from(res.status);
        history.push(Probe { r, verdict, solutions: res.count(), max_gap: res.diagnostics.max_gap });
        Ok(verdict)
    };
    let finish = |status, lo: f64, hi: f64, history: Vec<Probe>| ThresholdResult {
        n,
        k,
        c1,
        c2,
        status,
        r_star: hi,
        bracket: (lo, hi),
        history,
    };

    let mut lo = 1.0;
    let mut offset = opts.initial_offset;
    let hi = loop {
        let r = 1.0 + offset;
        if r > opts.r_max {
            return Ok(finish(ThresholdStatus::Unresolved, lo, f64::INFINITY, history));
        }
        match probe(r)? {
            Verdict::Solvable if lo == 1.0 => return Ok(finish(ThresholdStatus::Anomaly, 1.0, r, history)),
            Verdict::Solvable => break r,
            Verdict::Unsolvable => lo = r,
            Verdict::Inconclusive => return Ok(finish(ThresholdStatus::Inconclusive, lo, r, history)),
        }
        offset *= 2.0;
    };
    let mut hi = hi;
    while (hi - lo) > opts.rel_tol * lo {
        let mid = 0.5 * (lo + hi);
        match probe(mid)? {
            Verdict::Solvable => hi = mid,
            Verdict::Unsolvable => lo = mid,
            Verdict::Inconclusive => return Ok(finish(ThresholdStatus::Inconclusive, lo, hi, history)),
        }
    }
    Ok(finish(ThresholdStatus::Bracketed, lo, hi, history))
}

/// One row of the blow-up sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub xi0: f64,
    pub xi_t0: f64,
    pub xi_tt0: f64,
    /// Length of the admissible window in `t`.
    pub t_window: f64,
    pub termination: Termination,
    /// `sup |u| + |u⁻¹| + |∇u|` over the window.
    pub c1_sup: f64,
    /// `|∇²u|` on `r = 1`.
    pub hessian_at_one: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepTable {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub delta: f64,
    pub rows: Vec<SweepRow>,
    /// `exp(min T)`.
    pub r0: f64,
    /// Least-squares slope of `log ξ_tt(0)` against `log ε`.
    pub xi_tt_slope: f64,
    /// Least-squares slope of `log |∇²u(1)|` against `log ε`.
    pub hessian_slope: f64,
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("eps,xi0,xi_t0,xi_tt0,t_window,c1_sup,hessian_at_one,termination\n");
        for r in &self.rows {
            let vals = [r.eps, r.xi0, r.xi_t0, r.xi_tt0, r.t_window, r.c1_sup, r.hessian_at_one];
            let cols: Vec<String> = vals.iter().map(|v| radial::format_float(*v)).collect();
            out.push_str(&cols.join(","));
            out.push(',');
            out.push_str(&format!("{:?}", r.termination).to_lowercase());
            out.push('\n');
        }
        out
    }
}

/// `n` log-spaced values from `a` to `b`.
pub fn log_space(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Least-squares slope of `y` against `x`.
pub fn regression_slope(x: &[f64], y: &[f64]) -> f64 {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Seeds `ξ(0) = ε + ln|c|`, `ξ_t(0) = -e^{-ε}` (inner condition with
/// `c₁ = c`) and follows each trajectory while
/// `-e^{-ε} < ξ_t < -1 + δ` and `ξ_tt > 0`.
pub fn counterexample_sweep(
    n: usize,
    k: usize,
    c: f64,
    eps: &[f64],
    delta: f64,
    tol: &Tolerances,
) -> Result<SweepTable> {
    if k < 2 || k > n {
        return Err(Error::Domain(format!("sweep needs 2 <= k <= n, got n = {n}, k = {k}")));
    }
    if !(c < 0.0) {
        return Err(Error::Domain(format!("sweep needs c < 0, got {c}")));
    }
    if eps.is_empty() {
        return Err(Error::Input("empty epsilon list".into()));
    }
    for &e in eps {
        if !(e > 0.0 && e < delta && delta < 0.5 && -(-e).exp() < -1.0 + 0.5 * delta) {
            return Err(Error::Domain(format!("need 0 < eps < delta < 1/2 and -e^(-eps) < -1 + delta/2 (eps = {e}, delta = {delta})")));
        }
    }
    let eq = RadialEquation::new(n, k)?;
    let rows: Vec<SweepRow> = eps
        .par_iter()
        .map(|&e| -> Result<SweepRow> {
            let init = RadialState::new(0.0, e + c.abs().ln(), -(-e).exp());
            let lower = init.xi_t;
            let upper = move |p: &TrajectoryPoint| -1.0 + delta - p.xi_t;
            let convex = |p: &TrajectoryPoint| p.xi_tt;
            // ξ_t starts on the lower edge and increases, so only the
            // upper edge and convexity can fail
            let tr = radial::integrate_with_windows(&eq, init, 100.0, tol, &[&upper, &convex])?;
            let profile = tr.reconstruct();
            let first = profile[0];
            debug_assert!(tr.points.iter().all(|p| p.xi_t >= lower - 1e-9));
            Ok(SweepRow {
                eps: e,
                xi0: init.xi,
                xi_t0: init.xi_t,
                xi_tt0: first.xi_tt,
                t_window: tr.last().t,
                termination: tr.termination,
                c1_sup: profile.iter().map(|s| s.c1_size()).fold(0.0, f64::max),
                hessian_at_one: first.hessian_norm(n),
            })
        })
        .collect::<Result<_>>()?;
    let log_eps: Vec<f64> = rows.iter().map(|r| r.eps.ln()).collect();
    let xi_tt_slope = regression_slope(&log_eps, &rows.iter().map(|r| r.xi_tt0.abs().ln()).collect::<Vec<_>>());
    let hessian_slope = regression_slope(&log_eps, &rows.iter().map(|r| r.hessian_at_one.ln()).collect::<Vec<_>>());
    let t_min = rows.iter().map(|r| r.t_window).fold(f64::INFINITY, f64::min);
    Ok(SweepTable { n, k, c, delta, rows, r0: t_min.exp(), xi_tt_slope, hessian_slope })
}
