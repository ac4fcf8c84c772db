//! Planar motion `q'' = grad V_eps(|q|)` integrated with DOP853, with
//! apsides, ball exit and collision located on the dense output.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, atan2, cos, hypot, sin, sqrt, PI};
use crate::ode::{DenseStep, Dop853, OdeConfig, State};
use crate::potentials::{PotentialSpec, SmoothedPotential};
use crate::radial::{apsidal_values, Case, RadialProblem};
use crate::roots::bisect_to;

/// Position and velocity in the plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseState {
    pub q: [f64; 2],
    pub p: [f64; 2],
}

impl PhaseState {
    pub fn new(q: [f64; 2], p: [f64; 2]) -> Self {
        Self { q, p }
    }

    pub fn from_array(y: State) -> Self {
        Self {
            q: [y[0], y[1]],
            p: [y[2], y[3]],
        }
    }

    pub fn to_array(&self) -> State {
        [self.q[0], self.q[1], self.p[0], self.p[1]]
    }

    pub fn r(&self) -> f64 {
        hypot(self.q[0], self.q[1])
    }

    pub fn theta(&self) -> f64 {
        atan2(self.q[1], self.q[0])
    }

    pub fn speed(&self) -> f64 {
        hypot(self.p[0], self.p[1])
    }

    /// `q . p`, which has the sign of the radial velocity.
    pub fn q_dot_p(&self) -> f64 {
        self.q[0] * self.p[0] + self.q[1] * self.p[1]
    }

    pub fn angular_momentum(&self) -> f64 {
        self.q[0] * self.p[1] - self.q[1] * self.p[0]
    }

    pub fn energy(&self, v: &SmoothedPotential) -> f64 {
        0.5 * (self.p[0] * self.p[0] + self.p[1] * self.p[1]) - v.value(self.r())
    }

    pub fn rotated(&self, angle: f64) -> Self {
        let (s, c) = (sin(angle), cos(angle));
        let rot = |v: [f64; 2]| [c * v[0] - s * v[1], s * v[0] + c * v[1]];
        Self {
            q: rot(self.q),
            p: rot(self.p),
        }
    }

    pub fn position_distance(&self, other: &Self) -> f64 {
        hypot(self.q[0] - other.q[0], self.q[1] - other.q[1])
    }

    pub fn velocity_distance(&self, other: &Self) -> f64 {
        hypot(self.p[0] - other.p[0], self.p[1] - other.p[1])
    }

    /// Euclidean distance in phase space.
    pub fn distance(&self, other: &Self) -> f64 {
        hypot(self.position_distance(other), self.velocity_distance(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Pericentre,
    Apocentre,
    Exit,
    Collision,
    Section,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Pericentre => "pericentre",
            EventKind::Apocentre => "apocentre",
            EventKind::Exit => "exit",
            EventKind::Collision => "collision",
            EventKind::Section => "section",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub t: f64,
    pub kind: EventKind,
    pub state: PhaseState,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Horizon,
    Exit,
    Collision,
}

/// A dense step seen through the map `t -> tau = offset + sign t`, with the
/// position and velocity scaled by `sq` and `sp`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub step: DenseStep,
    pub offset: f64,
    pub sign: f64,
    pub sq: f64,
    pub sp: f64,
}

impl Segment {
    fn direct(step: DenseStep) -> Self {
        Self {
            step,
            offset: 0.0,
            sign: 1.0,
            sq: 1.0,
            sp: 1.0,
        }
    }

    pub fn start(&self) -> f64 {
        if self.sign > 0.0 {
            self.step.t0 - self.offset
        } else {
            self.offset - self.step.t1()
        }
    }

    pub fn end(&self) -> f64 {
        if self.sign > 0.0 {
            self.step.t1() - self.offset
        } else {
            self.offset - self.step.t0
        }
    }

    pub fn eval(&self, t: f64) -> PhaseState {
        let tau = self.offset + self.sign * t;
        let y = self.step.eval(tau);
        PhaseState {
            q: [self.sq * y[0], self.sq * y[1]],
            p: [self.sp * y[2], self.sp * y[3]],
        }
    }

    fn transformed(&self, offset: f64, sign: f64, sq: f64, sp: f64) -> Self {
        // new(t) = T(old(offset + sign t)) composed with the existing map
        Self {
            step: self.step,
            offset: self.offset + self.sign * offset,
            sign: self.sign * sign,
            sq: self.sq * sq,
            sp: self.sp * sp,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub potential: SmoothedPotential,
    pub t_start: f64,
    pub t_end: f64,
    /// State at every accepted step boundary, in time order.
    pub samples: Vec<(f64, PhaseState)>,
    pub segments: Vec<Segment>,
    pub events: Vec<Event>,
    pub termination: Termination,
    pub energy0: f64,
    pub l0: f64,
}

impl Trajectory {
    pub fn initial(&self) -> PhaseState {
        self.samples[0].1
    }

    pub fn last(&self) -> PhaseState {
        self.samples[self.samples.len() - 1].1
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.t_start && t <= self.t_end
    }

    /// State at time `t` from the dense output.
    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        if !self.contains(t) || self.segments.is_empty() {
            if self.segments.is_empty() && t == self.t_start {
                return Ok(self.initial());
            }
            return Err(Error::OutOfSpan {
                t,
                start: self.t_start,
                end: self.t_end,
            });
        }
        let i = self.segments.partition_point(|s| s.end() < t);
        let seg = &self.segments[i.min(self.segments.len() - 1)];
        Ok(seg.eval(t))
    }

    /// Continuous polar angle increment `theta(t) - theta(t_start)`.
    pub fn angle_increment(&self, t: f64) -> Result<f64> {
        if !self.contains(t) {
            return Err(Error::OutOfSpan {
                t,
                start: self.t_start,
                end: self.t_end,
            });
        }
        let mut total = 0.0;
        let mut prev = self.initial().theta();
        for seg in &self.segments {
            let (a, b) = (seg.start(), seg.end().min(t));
            if a >= t {
                break;
            }
            const SUB: usize = 8;
            for j in 1..=SUB {
                let tj = a + (b - a) * j as f64 / SUB as f64;
                let th = seg.eval(tj).theta();
                total += wrap(th - prev);
                prev = th;
            }
        }
        Ok(total)
    }

    /// Largest deviation of energy and angular momentum from their initial
    /// values over the samples.
    pub fn conserved_drift(&self) -> (f64, f64) {
        self.samples.iter().fold((0.0, 0.0), |(de, dl), (_, s)| {
            (
                f64::max(de, abs(s.energy(&self.potential) - self.energy0)),
                f64::max(dl, abs(s.angular_momentum() - self.l0)),
            )
        })
    }

    pub fn events_of(&self, kind: EventKind) -> impl Iterator<Item = &Event> {
        self.events.iter().filter(move |e| e.kind == kind)
    }

    /// The trajectory `t -> S(x(offset + sign t))` where `S` scales position
    /// by `sq` and velocity by `sp`. With `sign = -1` the time order flips.
    /// The conserved reference values carry over.
    pub fn transformed(&self, offset: f64, sign: f64, sq: f64, sp: f64) -> Self {
        let map_t = |t: f64| sign * (t - offset);
        let map_s = |s: &PhaseState| PhaseState {
            q: [sq * s.q[0], sq * s.q[1]],
            p: [sp * s.p[0], sp * s.p[1]],
        };
        let mut samples: Vec<(f64, PhaseState)> =
            self.samples.iter().map(|(t, s)| (map_t(*t), map_s(s))).collect();
        let mut segments: Vec<Segment> = self
            .segments
            .iter()
            .map(|s| s.transformed(offset, sign, sq, sp))
            .collect();
        let mut events: Vec<Event> = self
            .events
            .iter()
            .map(|e| Event {
                t: map_t(e.t),
                kind: e.kind,
                state: map_s(&e.state),
            })
            .collect();
        let (mut a, mut b) = (map_t(self.t_start), map_t(self.t_end));
        if sign < 0.0 {
            samples.reverse();
            segments.reverse();
            events.reverse();
            core::mem::swap(&mut a, &mut b);
        }
        Self {
            potential: self.potential.clone(),
            t_start: a,
            t_end: b,
            samples,
            segments,
            events,
            termination: self.termination,
            energy0: self.energy0,
            l0: sq * sp * self.l0,
        }
    }
}

fn wrap(mut d: f64) -> f64 {
    while d > PI {
        d -= 2.0 * PI;
    }
    while d < -PI {
        d += 2.0 * PI;
    }
    d
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub ode: OdeConfig,
    /// Radius below which an unsmoothed orbit counts as colliding.
    pub collision_radius: f64,
    pub stop_at_exit: bool,
    /// Time tolerance of event location.
    pub event_tol: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            ode: OdeConfig::default(),
            collision_radius: 1e-8,
            stop_at_exit: true,
            event_tol: 1e-12,
        }
    }
}

/// Time in `[a, b]` where `g` changes sign along `seg`.
fn locate<G: Fn(&PhaseState) -> f64>(seg: &Segment, a: f64, b: f64, g: G, tol: f64) -> f64 {
    bisect_to(|t| g(&seg.eval(t)), a, b, tol)
}

/// Integrates from `nu` over `[0, horizon]`, stopping early at a collision
/// (unsmoothed potential only) or when leaving the ball of radius `r_bar`.
pub fn integrate(
    nu: PhaseState,
    potential: &SmoothedPotential,
    horizon: f64,
    r_bar: f64,
    cfg: &SimConfig,
) -> Result<Trajectory> {
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::Domain {
            what: "horizon",
            value: horizon,
        });
    }
    if potential.epsilon == 0.0 && nu.r() == 0.0 {
        return Err(Error::Domain {
            what: "initial radius",
            value: 0.0,
        });
    }
    let v = potential.clone();
    let rhs = |y: &State| {
        let k = v.force_factor(hypot(y[0], y[1]));
        [y[2], y[3], k * y[0], k * y[1]]
    };
    let mut ode = Dop853::new(rhs, 0.0, nu.to_array(), cfg.ode)?;
    let mut traj = Trajectory {
        potential: potential.clone(),
        t_start: 0.0,
        t_end: 0.0,
        samples: alloc::vec![(0.0, nu)],
        segments: Vec::new(),
        events: Vec::new(),
        termination: Termination::Horizon,
        energy0: nu.energy(potential),
        l0: nu.angular_momentum(),
    };
    let singular = potential.epsilon == 0.0;
    let rc = cfg.collision_radius;
    let exit_g = |s: &PhaseState| s.q[0] * s.q[0] + s.q[1] * s.q[1] - r_bar * r_bar;
    let coll_g = |s: &PhaseState| s.q[0] * s.q[0] + s.q[1] * s.q[1] - rc * rc;

    while ode.t() < horizon {
        let step = ode.step(horizon)?;
        let seg = Segment::direct(step);
        let (t0, t1) = (step.t0, step.t1());
        let s0 = PhaseState::from_array(step.start());
        let s1 = PhaseState::from_array(step.end());
        let mut stop: Option<(f64, Termination, EventKind)> = None;

        if singular {
            let hit = [0.25, 0.5, 0.75, 1.0]
                .iter()
                .map(|&f| t0 + f * (t1 - t0))
                .find(|&t| seg.eval(t).r() < rc);
            if let Some(tc) = hit {
                let t = locate(&seg, t0, tc, coll_g, cfg.event_tol);
                stop = Some((t, Termination::Collision, EventKind::Collision));
            }
        }
        if r_bar.is_finite() {
            let (g0, g1) = (exit_g(&s0), exit_g(&s1));
            if g0 <= 0.0 && g1 > 0.0 {
                let t = locate(&seg, t0, t1, exit_g, cfg.event_tol);
                let earlier = stop.is_none_or(|(ts, _, _)| t < ts);
                if earlier {
                    traj.events.push(Event {
                        t,
                        kind: EventKind::Exit,
                        state: seg.eval(t),
                    });
                    if cfg.stop_at_exit {
                        stop = Some((t, Termination::Exit, EventKind::Exit));
                    }
                }
            }
        }
        let t_lim = stop.map_or(t1, |(t, _, _)| t);
        let (a0, a1) = (s0.q_dot_p(), seg.eval(t_lim).q_dot_p());
        if a0 != 0.0 && a1 != 0.0 && (a0 < 0.0) != (a1 < 0.0) {
            let t = locate(&seg, t0, t_lim, |s| s.q_dot_p(), cfg.event_tol);
            let kind = if a0 < 0.0 {
                EventKind::Pericentre
            } else {
                EventKind::Apocentre
            };
            traj.events.push(Event {
                t,
                kind,
                state: seg.eval(t),
            });
        }

        traj.segments.push(seg);
        if let Some((t, term, kind)) = stop {
            let s = seg.eval(t);
            if kind == EventKind::Collision {
                traj.events.push(Event { t, kind, state: s });
            }
            traj.samples.push((t, s));
            traj.t_end = t;
            traj.termination = term;
            return Ok(traj);
        }
        traj.samples.push((t1, s1));
        traj.t_end = t1;
    }
    Ok(traj)
}

/// Perturbation of the collision initial datum: position offset, radial
/// velocity offset and angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Perturbation {
    pub dq: [f64; 2],
    pub dv1: f64,
    pub l: f64,
}

/// The unperturbed collision datum of `case`: at rest at `P` when bounded,
/// entering radially at `R_bar` otherwise. Returns the state and `P`.
pub fn collision_datum(case: &Case, potential: &PotentialSpec) -> Result<(PhaseState, f64)> {
    let energy = case.energy();
    let r_bar = case.r_bar();
    let rp = RadialProblem::new(potential.clone(), 0.0, energy, 0.0)?;
    let p = match apsidal_values(&rp, r_bar) {
        Ok(a) => a.p,
        Err(Error::InvalidParameter(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    match case {
        Case::Bounded { .. } => {
            if !(p < r_bar) {
                return Err(Error::CaseMismatch("bounded case needs P < R_bar"));
            }
            Ok((PhaseState::new([p, 0.0], [0.0, 0.0]), p))
        }
        Case::Unbounded { .. } => {
            if !(p >= r_bar && r_bar.is_finite()) {
                return Err(Error::CaseMismatch("unbounded case needs P >= R_bar with finite R_bar"));
            }
            let speed = sqrt(2.0 * (energy + potential.eval(r_bar)));
            Ok((PhaseState::new([r_bar, 0.0], [-speed, 0.0]), p))
        }
    }
}

/// Perturbed initial datum `nu` near the collision datum of `case`.
pub fn make_initial_data(
    case: &Case,
    potential: &PotentialSpec,
    perturbation: &Perturbation,
) -> Result<PhaseState> {
    let (base, _) = collision_datum(case, potential)?;
    let q = [base.q[0] + perturbation.dq[0], base.q[1] + perturbation.dq[1]];
    let r = hypot(q[0], q[1]);
    if !(r > 0.0) {
        return Err(Error::Domain {
            what: "perturbed initial radius",
            value: r,
        });
    }
    let u = [q[0] / r, q[1] / r];
    let n = [-u[1], u[0]];
    let vr = base.p[0] * u[0] + base.p[1] * u[1] + perturbation.dv1;
    let vt = perturbation.l / r;
    Ok(PhaseState::new(
        q,
        [vr * u[0] + vt * n[0], vr * u[1] + vt * n[1]],
    ))
}
