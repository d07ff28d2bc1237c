//! Radial σ_k solutions on annuli in `ξ`-coordinates.
//!
//! For `u(x) = u(|x|)` set `t = ln|x|` and `ξ(t) = -(2/(n-2)) ln u - t`, so
//! `u = exp(-(n-2)(ξ + t)/2)`. Then `σ_k(λ(A^u)) = 1` with `λ(A^u) ∈ Γ_k`
//! becomes the autonomous equation
//!
//! ```text
//! e^{2kξ} (1 - ξ_t²)^{k-1} [ξ_tt + (n-2k)/(2k) (1 - ξ_t²)] = Θ,   |ξ_t| < 1,
//! Θ = 2^{k-1} / C(n-1, k-1),
//! ```
//!
//! solved here in the form
//! `ξ_tt = Θ e^{-2kξ} (1 - ξ_t²)^{1-k} - (n-2k)/(2k) (1 - ξ_t²)`.
//!
//! The annulus boundary conditions
//! `∂_r u + (n-2)/2 u = -c₁ (n-2)/2 u^{n/(n-2)}` on `r = 1` and
//! `∂_r u + (n-2)/(2R) u = c₂ (n-2)/(2R) u^{n/(n-2)}` on `r = R` read
//! `ξ_t(0) = c₁ e^{-ξ(0)}` and `ξ_t(T) = -c₂ e^{-ξ(T)}/R`, `T = ln R`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::ode::{self, Event, Node, State, Stop};
use crate::schouten::radial_eigenvalues;
use crate::symfn::{elementary_symmetric_all, sigma_k};

pub use crate::ode::Tolerances;

/// Relative guard on `1 - ξ_t²` below which the equation is treated as
/// degenerate.
pub const ELLIPTICITY_GUARD: f64 = 1e-12;

/// A step-size failure is attributed to ellipticity breakdown when, at the
/// current rate, `1 - ξ_t²` would vanish within this time. Near the singular
/// set `1 - ξ_t²` behaves like `(t* - t)^{1/k}`, which cannot be followed down
/// to [`ELLIPTICITY_GUARD`] in double precision.
pub const DEGENERACY_HORIZON: f64 = 1e-9;

/// `Θ = 2^{k-1} / C(n-1, k-1)`.
pub fn theta(n: usize, k: usize) -> f64 {
    let binom = (0..k - 1).fold(1.0, |acc, i| acc * (n - 1 - i) as f64 / (i + 1) as f64);
    2f64.powi(k as i32 - 1) / binom
}

/// The radial σ_k equation for fixed `(n, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialEquation {
    pub n: usize,
    pub k: usize,
    pub theta: f64,
    pub guard: f64,
}

impl RadialEquation {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension { n, reason: "radial reduction needs n >= 3" });
        }
        if k == 0 || k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        Ok(Self { n, k, theta: theta(n, k), guard: ELLIPTICITY_GUARD })
    }

    /// `ξ_tt`, or `None` when `1 - ξ_t² ≤ guard`.
    pub fn xi_tt(&self, xi: f64, xi_t: f64) -> Option<f64> {
        let q = 1.0 - xi_t * xi_t;
        if !(q > self.guard) {
            return None;
        }
        let k = self.k as f64;
        let value = self.theta * (-2.0 * k * xi).exp() * q.powi(1 - self.k as i32)
            - (self.n as f64 - 2.0 * k) / (2.0 * k) * q;
        value.is_finite().then_some(value)
    }

    pub fn rhs(&self, state: &RadialState) -> Option<f64> {
        self.xi_tt(state.xi, state.xi_t)
    }

    /// Left-hand side of the σ_k equation divided by `Θ`, minus one: zero on
    /// solutions.
    pub fn residual(&self, xi: f64, xi_t: f64, xi_tt: f64) -> f64 {
        let k = self.k as f64;
        let q = 1.0 - xi_t * xi_t;
        (2.0 * k * xi).exp() * q.powi(self.k as i32 - 1) * (xi_tt + (self.n as f64 - 2.0 * k) / (2.0 * k) * q)
            / self.theta
            - 1.0
    }

    /// `(λ_rad, λ_tan, …, λ_tan)`.
    pub fn spectrum(&self, xi: f64, xi_t: f64, xi_tt: f64) -> Vec<f64> {
        let (rad, tan) = radial_eigenvalues(xi, xi_t, xi_tt);
        let mut v = vec![tan; self.n];
        v[0] = rad;
        v
    }

    /// Smallest of `σ_1, …, σ_k` of the spectrum; positive inside `Γ_k`.
    pub fn cone_margin(&self, xi: f64, xi_t: f64, xi_tt: f64) -> f64 {
        let e = elementary_symmetric_all(&self.spectrum(xi, xi_t, xi_tt));
        e[1..=self.k].iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Constant solution `ξ_tt = ξ_t = 0`:
    /// `ξ_cyl = ln(2kΘ/(n-2k)) / (2k)`. Requires `n > 2k`.
    pub fn cylinder_xi(&self) -> Result<f64> {
        if self.n <= 2 * self.k {
            return Err(Error::Domain(format!(
                "no cylinder solution for n = {}, k = {} (needs n > 2k)",
                self.n, self.k
            )));
        }
        let k = self.k as f64;
        Ok((2.0 * k * self.theta / (self.n as f64 - 2.0 * k)).ln() / (2.0 * k))
    }
}

/// A point `(t, ξ, ξ_t)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RadialState {
    pub t: f64,
    pub xi: f64,
    pub xi_t: f64,
}

impl RadialState {
    pub fn new(t: f64, xi: f64, xi_t: f64) -> Self {
        Self { t, xi, xi_t }
    }

    pub fn is_admissible(&self) -> bool {
        self.xi.is_finite() && self.xi_t.abs() < 1.0
    }
}

/// `ξ = -(2/(n-2)) ln u - ln r`.
pub fn xi_from_u(u: f64, r: f64, n: usize) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::NonPositive { what: "u", value: u });
    }
    if !(r > 0.0) {
        return Err(Error::NonPositive { what: "r", value: r });
    }
    Ok(-2.0 / (n as f64 - 2.0) * u.ln() - r.ln())
}

/// `u = exp(-(n-2)(ξ + t)/2)`.
pub fn u_from_xi(xi: f64, t: f64, n: usize) -> f64 {
    (-0.5 * (n as f64 - 2.0) * (xi + t)).exp()
}

/// Converts a sampled profile `(r_i, u_i)` to `(t_i, ξ_i)`.
pub fn xi_profile(samples: &[(f64, f64)], n: usize) -> Result<Vec<(f64, f64)>> {
    samples.iter().map(|&(r, u)| Ok((r.ln(), xi_from_u(u, r, n)?))).collect()
}

/// Converts `(t_i, ξ_i)` back to `(r_i, u_i)`.
pub fn u_profile(samples: &[(f64, f64)], n: usize) -> Vec<(f64, f64)> {
    samples.iter().map(|&(t, xi)| (t.exp(), u_from_xi(xi, t, n))).collect()
}

/// `ξ_t(0) - c₁ e^{-ξ(0)}`.
pub fn inner_bc_residual(state: &RadialState, c1: f64) -> f64 {
    state.xi_t - c1 * (-state.xi).exp()
}

/// `ξ_t(T) + c₂ e^{-ξ(T)}/R`.
pub fn outer_bc_residual(state: &RadialState, c2: f64, r_outer: f64) -> f64 {
    state.xi_t + c2 * (-state.xi).exp() / r_outer
}

/// The annulus problem on `B_R ∖ B_1`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct AnnulusProblem {
    pub n: usize,
    pub k: usize,
    pub r_outer: f64,
    pub c1: f64,
    pub c2: f64,
}

impl AnnulusProblem {
    pub fn new(n: usize, k: usize, r_outer: f64, c1: f64, c2: f64) -> Result<Self> {
        RadialEquation::new(n, k)?;
        if !(r_outer > 1.0) || !r_outer.is_finite() {
            return Err(Error::Domain(format!("outer radius must exceed 1, got {r_outer}")));
        }
        if !c1.is_finite() || !c2.is_finite() {
            return Err(Error::Input("boundary constants must be finite".into()));
        }
        Ok(Self { n, k, r_outer, c1, c2 })
    }

    pub fn equation(&self) -> RadialEquation {
        RadialEquation::new(self.n, self.k).expect("validated on construction")
    }

    pub fn theta(&self) -> f64 {
        theta(self.n, self.k)
    }

    pub fn t_end(&self) -> f64 {
        self.r_outer.ln()
    }

    /// Initial state with the inner condition imposed exactly.
    pub fn initial_state(&self, xi0: f64) -> RadialState {
        RadialState::new(0.0, xi0, self.c1 * (-xi0).exp())
    }
}

/// Why a trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ReachedT,
    EllipticityBreakdown,
    ConeExit,
    StepFailure,
    /// A caller-supplied window condition failed.
    WindowExit,
}

/// One stored point of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub xi: f64,
    pub xi_t: f64,
    pub xi_tt: f64,
}

impl TrajectoryPoint {
    pub fn state(&self) -> RadialState {
        RadialState::new(self.t, self.xi, self.xi_t)
    }

    fn node(&self) -> Node {
        Node { t: self.t, y: [self.xi, self.xi_t], dy: [self.xi_t, self.xi_tt] }
    }
}

/// An integrated solution of the radial equation.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub equation: RadialEquation,
    pub points: Vec<TrajectoryPoint>,
    pub termination: Termination,
    pub t_target: f64,
}

impl Trajectory {
    pub fn first(&self) -> &TrajectoryPoint {
        &self.points[0]
    }

    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectories are never empty")
    }

    pub fn reached_target(&self) -> bool {
        self.termination == Termination::ReachedT
    }

    /// Dense output by cubic Hermite interpolation; `None` outside the
    /// integrated range.
    pub fn interpolate(&self, t: f64) -> Option<TrajectoryPoint> {
        let forward = self.last().t >= self.first().t;
        let (lo, hi) = if forward { (self.first().t, self.last().t) } else { (self.last().t, self.first().t) };
        if !(t >= lo && t <= hi) {
            return None;
        }
        let idx = self.points.partition_point(|p| if forward { p.t < t } else { p.t > t });
        if idx == 0 {
            return Some(self.points[0]);
        }
        let a = self.points[idx - 1].node();
        let b = self.points[idx.min(self.points.len() - 1)].node();
        let y = ode::hermite(&a, &b, t);
        let xi_tt = self.equation.xi_tt(y[0], y[1])?;
        Some(TrajectoryPoint { t, xi: y[0], xi_t: y[1], xi_tt })
    }

    /// Profile samples at every stored point.
    pub fn reconstruct(&self) -> Vec<ProfileSample> {
        self.points.iter().map(|p| ProfileSample::from_point(&self.equation, p)).collect()
    }

    /// CSV with columns
    /// `t,xi,xi_t,xi_tt,r,u,du,d2u,lam_rad,lam_tan,sigma_k_residual`; floats
    /// in 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,xi,xi_t,xi_tt,r,u,du,d2u,lam_rad,lam_tan,sigma_k_residual\n");
        for s in self.reconstruct() {
            let row = [s.t, s.xi, s.xi_t, s.xi_tt, s.r, s.u, s.du, s.d2u, s.lam_rad, s.lam_tan, s.sigma_k_residual];
            let line: Vec<String> = row.iter().map(|v| format_float(*v)).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }
}

/// Float formatting shared by all CSV writers: 17 significant digits.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Reconstructed radial profile at one point.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProfileSample {
    pub t: f64,
    pub xi: f64,
    pub xi_t: f64,
    pub xi_tt: f64,
    pub r: f64,
    pub u: f64,
    /// `du/dr`
    pub du: f64,
    /// `d²u/dr²`
    pub d2u: f64,
    pub lam_rad: f64,
    pub lam_tan: f64,
    /// `σ_k(λ) - 1`.
    pub sigma_k_residual: f64,
}

impl ProfileSample {
    pub fn from_point(eq: &RadialEquation, p: &TrajectoryPoint) -> Self {
        let m = 0.5 * (eq.n as f64 - 2.0);
        let r = p.t.exp();
        let u = u_from_xi(p.xi, p.t, eq.n);
        let u_t = -m * (p.xi_t + 1.0) * u;
        let u_tt = (m * m * (p.xi_t + 1.0).powi(2) - m * p.xi_tt) * u;
        let du = u_t / r;
        let d2u = (u_tt - u_t) / (r * r);
        let (lam_rad, lam_tan) = radial_eigenvalues(p.xi, p.xi_t, p.xi_tt);
        let spectrum = eq.spectrum(p.xi, p.xi_t, p.xi_tt);
        let sigma = sigma_k(&spectrum, eq.k).unwrap_or(f64::NAN);
        Self {
            t: p.t,
            xi: p.xi,
            xi_t: p.xi_t,
            xi_tt: p.xi_tt,
            r,
            u,
            du,
            d2u,
            lam_rad,
            lam_tan,
            sigma_k_residual: sigma - 1.0,
        }
    }

    /// `|u| + |u⁻¹| + |∇u|`.
    pub fn c1_size(&self) -> f64 {
        self.u.abs() + 1.0 / self.u.abs() + self.du.abs()
    }

    /// Frobenius norm of `∇²u` for a radial function:
    /// eigenvalues `u''` once and `u'/r` with multiplicity `n - 1`.
    pub fn hessian_norm(&self, n: usize) -> f64 {
        (self.d2u * self.d2u + (n as f64 - 1.0) * (self.du / self.r).powi(2)).sqrt()
    }
}

/// Extra stopping condition: positive while the trajectory is acceptable.
pub type WindowFn<'a> = &'a dyn Fn(&TrajectoryPoint) -> f64;

/// Integrates from `initial` to `t_target` with the ellipticity and cone
/// events always active.
pub fn integrate(eq: &RadialEquation, initial: RadialState, t_target: f64, tol: &Tolerances) -> Result<Trajectory> {
    integrate_with_windows(eq, initial, t_target, tol, &[])
}

pub fn integrate_with_windows(
    eq: &RadialEquation,
    initial: RadialState,
    t_target: f64,
    tol: &Tolerances,
    windows: &[WindowFn<'_>],
) -> Result<Trajectory> {
    if !initial.is_admissible() {
        return Err(Error::Domain(format!("initial state {initial:?} is not admissible (|xi_t| < 1)")));
    }
    let xi_tt0 = eq.rhs(&initial).ok_or_else(|| Error::Domain("initial state violates the ellipticity guard".into()))?;
    if eq.cone_margin(initial.xi, initial.xi_t, xi_tt0) <= 0.0 {
        return Err(Error::Domain("initial state lies outside the cone".into()));
    }
    let f = |_t: f64, y: &State| eq.xi_tt(y[0], y[1]).map(|a| [y[1], a]);
    let ellipticity = |_t: f64, y: &State, _d: &State| (1.0 - y[1] * y[1]) - eq.guard;
    let cone = |_t: f64, y: &State, d: &State| eq.cone_margin(y[0], y[1], d[1]);
    let wrapped: Vec<Box<Event>> = windows
        .iter()
        .map(|w| {
            Box::new(move |t: f64, y: &State, d: &State| w(&TrajectoryPoint { t, xi: y[0], xi_t: y[1], xi_tt: d[1] }))
                as Box<Event>
        })
        .collect();
    let mut events: Vec<&Event> = vec![&ellipticity, &cone];
    events.extend(wrapped.iter().map(|b| b.as_ref()));

    let sol = ode::integrate(&f, initial.t, [initial.xi, initial.xi_t], t_target, tol, &events);
    let points: Vec<TrajectoryPoint> =
        sol.nodes.iter().map(|nd| TrajectoryPoint { t: nd.t, xi: nd.y[0], xi_t: nd.y[1], xi_tt: nd.dy[1] }).collect();
    let degenerating = points.last().is_some_and(|p| {
        let q = 1.0 - p.xi_t * p.xi_t;
        q < 2.0 * (p.xi_t * p.xi_tt).abs() * DEGENERACY_HORIZON
    });
    let termination = match sol.stop {
        Stop::ReachedEnd => Termination::ReachedT,
        Stop::Event(0) => Termination::EllipticityBreakdown,
        Stop::Event(1) => Termination::ConeExit,
        Stop::Event(_) => Termination::WindowExit,
        Stop::Refused => Termination::EllipticityBreakdown,
        Stop::StepFailure if degenerating => Termination::EllipticityBreakdown,
        Stop::StepFailure => Termination::StepFailure,
    };
    Ok(Trajectory { equation: *eq, points, termination, t_target })
}
