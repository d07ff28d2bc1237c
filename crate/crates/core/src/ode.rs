//! Adaptive Dormand–Prince 5(4) integration of planar systems with
//! terminal events.
//!
//! The right-hand side may refuse a state (returns `None`); such steps are
//! rejected and retried with a smaller step, so the integrator never steps
//! across a singular set. Events are located by bisection on the cubic
//! Hermite interpolant of the accepted step.

pub type State = [f64; 2];

/// Event function `g(t, y, y')`; integration stops where it reaches zero.
pub type Event<'a> = dyn Fn(f64, &State, &State) -> f64 + 'a;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, max_steps: 200_000 }
    }
}

impl Tolerances {
    pub fn new(rtol: f64, atol: f64) -> Self {
        Self { rtol, atol, ..Self::default() }
    }

    pub fn halved(&self) -> Self {
        Self { rtol: 0.5 * self.rtol, atol: 0.5 * self.atol, max_steps: self.max_steps }
    }
}

/// One accepted node of a solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub t: f64,
    pub y: State,
    pub dy: State,
}

/// Why integration stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stop {
    ReachedEnd,
    /// Event with the given index crossed zero from above.
    Event(usize),
    /// The right-hand side refused every step down to the minimum step.
    Refused,
    /// Step size underflow or step budget exhausted.
    StepFailure,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub nodes: Vec<Node>,
    pub stop: Stop,
}

/// Cubic Hermite interpolation between two nodes.
pub fn hermite(a: &Node, b: &Node, t: f64) -> State {
    let h = b.t - a.t;
    if h == 0.0 {
        return a.y;
    }
    let s = (t - a.t) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let mut out = [0.0; 2];
    for i in 0..2 {
        out[i] = h00 * a.y[i] + h10 * h * a.dy[i] + h01 * b.y[i] + h11 * h * b.dy[i];
    }
    out
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

enum Attempt {
    Accepted { y: State, dy: State, err: f64 },
    Refused,
}

fn attempt<F>(f: &F, t: f64, y: &State, dy: &State, h: f64, tol: &Tolerances) -> Attempt
where
    F: Fn(f64, &State) -> Option<State>,
{
    let mut k = [[0.0; 2]; 7];
    k[0] = *dy;
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            for i in 0..2 {
                ys[i] += h * A[s][j] * kj[i];
            }
        }
        match f(t + C[s] * h, &ys) {
            Some(v) if v.iter().all(|x| x.is_finite()) => k[s] = v,
            _ => return Attempt::Refused,
        }
    }
    let mut y5 = *y;
    let mut err = 0.0_f64;
    for i in 0..2 {
        let mut e = 0.0;
        for s in 0..7 {
            y5[i] += h * B5[s] * k[s][i];
            e += h * (B5[s] - B4[s]) * k[s][i];
        }
        let sc = tol.atol + tol.rtol * y[i].abs().max(y5[i].abs());
        err = err.max((e / sc).abs());
    }
    // FSAL: stage 7 is the derivative at the new point
    Attempt::Accepted { y: y5, dy: k[6], err }
}

/// Integrates `y' = f(t, y)` from `(t0, y0)` towards `t_end` (either
/// direction). `events[i](t, y, y')` must be positive at the start; the
/// first one to reach zero or below stops integration at the located
/// crossing.
pub fn integrate<F>(
    f: &F,
    t0: f64,
    y0: State,
    t_end: f64,
    tol: &Tolerances,
    events: &[&Event],
) -> Solution
where
    F: Fn(f64, &State) -> Option<State>,
{
    let dy0 = match f(t0, &y0) {
        Some(d) => d,
        None => return Solution { nodes: vec![], stop: Stop::Refused },
    };
    let mut nodes = vec![Node { t: t0, y: y0, dy: dy0 }];
    let span = t_end - t0;
    if span == 0.0 {
        return Solution { nodes, stop: Stop::ReachedEnd };
    }
    let dir = span.signum();
    let mut h = dir * (1e-3 * span.abs()).min(1e-2);
    let mut refused_last = false;

    for _ in 0..tol.max_steps {
        let cur = *nodes.last().expect("non-empty");
        let h_min = 1e-14 * cur.t.abs().max(1.0);
        let remaining = t_end - cur.t;
        if remaining.abs() <= h_min {
            return Solution { nodes, stop: Stop::ReachedEnd };
        }
        let last_step = h.abs() >= remaining.abs();
        if last_step {
            h = remaining;
        }
        match attempt(f, cur.t, &cur.y, &cur.dy, h, tol) {
            Attempt::Refused => {
                refused_last = true;
                h *= 0.25;
                if h.abs() < h_min {
                    return Solution { nodes, stop: Stop::Refused };
                }
            }
            Attempt::Accepted { y, dy, err } if err <= 1.0 => {
                refused_last = false;
                let t_new = if last_step { t_end } else { cur.t + h };
                let next = Node { t: t_new, y, dy };
                for (idx, ev) in events.iter().enumerate() {
                    if ev(next.t, &next.y, &next.dy) <= 0.0 {
                        let hit = locate(f, &cur, &next, *ev);
                        nodes.push(hit);
                        return Solution { nodes, stop: Stop::Event(idx) };
                    }
                }
                nodes.push(next);
                if last_step {
                    return Solution { nodes, stop: Stop::ReachedEnd };
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                h *= factor;
            }
            Attempt::Accepted { err, .. } => {
                let factor = (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
                h *= factor;
                if h.abs() < h_min {
                    let stop = if refused_last { Stop::Refused } else { Stop::StepFailure };
                    return Solution { nodes, stop };
                }
            }
        }
    }
    Solution { nodes, stop: Stop::StepFailure }
}

/// Bisection for the zero of an event on the Hermite interpolant of one step.
fn locate<F>(f: &F, a: &Node, b: &Node, ev: &dyn Fn(f64, &State, &State) -> f64) -> Node
where
    F: Fn(f64, &State) -> Option<State>,
{
    let eval = |t: f64| -> (State, Option<State>) {
        let y = hermite(a, b, t);
        (y, f(t, &y))
    };
    let (mut lo, mut hi) = (a.t, b.t);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        let (y, dy) = eval(mid);
        let g = match dy {
            Some(d) => ev(mid, &y, &d),
            None => -1.0,
        };
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // report the last point on the admissible side
    let (y, dy) = eval(lo);
    Node { t: lo, y, dy: dy.unwrap_or(a.dy) }
}
