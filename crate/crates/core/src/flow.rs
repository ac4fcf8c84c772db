//! The flow extended through collisions by transmission, its time-`T` map,
//! continuity experiments near collision data and Poincaré sections.

use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::extrapolate::{Abscissa, Extrapolant};
use crate::math::{abs, cos, decade, hypot, sin, sqrt, PI};
use crate::potentials::{PotentialSpec, SmoothedPotential};
use crate::quadrature::QuadConfig;
use crate::radial::{collision_time, Case};
use crate::roots::bisect_to;
use crate::simulator::{
    collision_datum, integrate, make_initial_data, Perturbation, PhaseState, SimConfig,
    Termination, Trajectory,
};
use crate::table::{ConvergenceTable, SchedulePoint, Verdict};

/// A colliding orbit continued past the collision by `u0(t) = -u(2 T0 - t)`.
#[derive(Debug, Clone)]
pub struct TransmissionPath {
    /// Integrated leg up to the near-collision abort.
    pub pre: Trajectory,
    /// Mirror image of `pre` on `[2 T0 - t_abort, 2 T0]`.
    pub post: Trajectory,
    pub t0: f64,
    pub t_abort: f64,
    /// Unit vector of the collision ray.
    pub direction: [f64; 2],
    pub energy: f64,
    base: PotentialSpec,
    quad: QuadConfig,
}

/// Tolerance on `|l|` for a trajectory to count as radial.
pub const RADIAL_L_TOL: f64 = 1e-12;

/// Builds the transmission path of a trajectory that ended in a collision.
pub fn transmission_extend(pre: Trajectory, quad: &QuadConfig) -> Result<TransmissionPath> {
    if pre.termination != Termination::Collision {
        return Err(Error::NotCollision("trajectory does not end in a collision"));
    }
    if pre.potential.epsilon != 0.0 {
        return Err(Error::NotCollision("smoothed potentials have no collisions"));
    }
    if abs(pre.l0) > RADIAL_L_TOL * (1.0 + pre.initial().r() * pre.initial().speed()) {
        return Err(Error::NotCollision("nonzero angular momentum"));
    }
    let last = pre.last();
    let rc = last.r();
    let energy = pre.energy0;
    let base = pre.potential.base.clone();
    let residual = collision_time(&base, energy, rc, quad)?.value;
    let t_abort = pre.t_end;
    let t0 = t_abort + residual;
    let post = pre.transformed(2.0 * t0, -1.0, -1.0, 1.0);
    Ok(TransmissionPath {
        direction: [last.q[0] / rc, last.q[1] / rc],
        pre,
        post,
        t0,
        t_abort,
        energy,
        base,
        quad: *quad,
    })
}

impl TransmissionPath {
    pub fn t_end(&self) -> f64 {
        2.0 * self.t0
    }

    /// Radius `r` with free-fall time `tau` to the origin, inside the gap
    /// below the abort radius.
    fn gap_radius(&self, tau: f64) -> Result<f64> {
        let hi = self.pre.last().r();
        let mut err = None;
        let r = bisect_to(
            |r| {
                if r <= 0.0 {
                    return -tau;
                }
                match collision_time(&self.base, self.energy, r, &self.quad) {
                    Ok(q) => q.value - tau,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            },
            0.0,
            hi,
            1e-3 * hi * f64::EPSILON,
        );
        match err {
            Some(e) => Err(e),
            None => Ok(r),
        }
    }

    /// State reached by free fall from the abort radius.
    fn gap_state(&self, tau: f64) -> Result<PhaseState> {
        let r = self.gap_radius(tau)?;
        let speed = sqrt(2.0 * (self.energy + self.base.eval(r)));
        let u = self.direction;
        Ok(PhaseState::new([r * u[0], r * u[1]], [-speed * u[0], -speed * u[1]]))
    }

    /// State of the pre-collision leg `\bar x(s)` for `s` in `[0, T0)`.
    fn pre_state(&self, s: f64) -> Result<PhaseState> {
        if s <= self.t_abort {
            self.pre.state_at(s)
        } else {
            self.gap_state(self.t0 - s)
        }
    }

    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        if !(t >= 0.0 && t <= self.t_end()) {
            return Err(Error::OutOfSpan {
                t,
                start: 0.0,
                end: self.t_end(),
            });
        }
        if t == self.t0 {
            return Err(Error::AtCollisionInstant(t));
        }
        if t < self.t0 {
            return self.pre_state(t);
        }
        let s = self.pre_state(2.0 * self.t0 - t)?;
        Ok(PhaseState::new([-s.q[0], -s.q[1]], s.p))
    }

    /// State at time `T0 + sigma`, without the rounding of forming that sum.
    pub fn state_relative(&self, sigma: f64) -> Result<PhaseState> {
        if sigma == 0.0 {
            return Err(Error::AtCollisionInstant(self.t0));
        }
        let tau = abs(sigma);
        if tau > self.t0 {
            return Err(Error::OutOfSpan {
                t: self.t0 + sigma,
                start: 0.0,
                end: self.t_end(),
            });
        }
        let s = if tau < self.t0 - self.t_abort {
            self.gap_state(tau)?
        } else {
            self.pre.state_at(self.t0 - tau)?
        };
        Ok(if sigma > 0.0 {
            PhaseState::new([-s.q[0], -s.q[1]], s.p)
        } else {
            s
        })
    }

    /// Continuous angle increment; the collision contributes exactly `pi`.
    pub fn angle_increment(&self, t: f64) -> Result<f64> {
        if t == self.t0 {
            return Err(Error::AtCollisionInstant(t));
        }
        if t < self.t0 {
            return self.pre.angle_increment(t.min(self.t_abort));
        }
        if t > self.t_end() {
            return Err(Error::OutOfSpan {
                t,
                start: 0.0,
                end: self.t_end(),
            });
        }
        Ok(PI + self.pre.angle_increment((2.0 * self.t0 - t).min(self.t_abort))?)
    }
}

#[derive(Debug, Clone)]
pub enum Leg {
    Plain(Trajectory),
    Transmission(TransmissionPath),
}

impl Leg {
    fn duration(&self) -> f64 {
        match self {
            Leg::Plain(t) => t.t_end,
            Leg::Transmission(p) => p.t_end(),
        }
    }

    fn state_at(&self, t: f64) -> Result<PhaseState> {
        match self {
            Leg::Plain(tr) => tr.state_at(t),
            Leg::Transmission(p) => p.state_at(t),
        }
    }

    fn angle_increment(&self, t: f64) -> Result<f64> {
        match self {
            Leg::Plain(tr) => tr.angle_increment(t),
            Leg::Transmission(p) => p.angle_increment(t),
        }
    }
}

/// An orbit of the extended flow: plain legs and transmission legs glued
/// end to end. Each leg starts at its own local time zero.
#[derive(Debug, Clone)]
pub struct ExtendedOrbit {
    pub legs: Vec<(f64, Leg)>,
    pub horizon: f64,
}

const MAX_LEGS: usize = 10_000;

impl ExtendedOrbit {
    fn locate(&self, t: f64) -> Result<(usize, f64)> {
        let end = self.legs.last().map_or(0.0, |(o, l)| o + l.duration());
        if !(t >= 0.0 && t <= end) {
            return Err(Error::OutOfSpan { t, start: 0.0, end });
        }
        let i = self
            .legs
            .iter()
            .position(|(o, l)| t <= o + l.duration())
            .unwrap_or(self.legs.len() - 1);
        Ok((i, t - self.legs[i].0))
    }

    pub fn state_at(&self, t: f64) -> Result<PhaseState> {
        let (i, local) = self.locate(t)?;
        self.legs[i].1.state_at(local)
    }

    pub fn angle_increment(&self, t: f64) -> Result<f64> {
        let (i, local) = self.locate(t)?;
        let mut total = 0.0;
        for (_, leg) in &self.legs[..i] {
            total += leg.angle_increment(leg.duration())?;
        }
        Ok(total + self.legs[i].1.angle_increment(local)?)
    }

    pub fn collisions(&self) -> usize {
        self.legs
            .iter()
            .filter(|(_, l)| matches!(l, Leg::Transmission(_)))
            .count()
    }
}

/// Integrates the extended flow of `P(eps)` from `y` up to `horizon`,
/// continuing every collision by transmission.
pub fn extended_flow(
    y: PhaseState,
    potential: &SmoothedPotential,
    horizon: f64,
    r_bar: f64,
    sim: &SimConfig,
    quad: &QuadConfig,
) -> Result<ExtendedOrbit> {
    let mut orbit = ExtendedOrbit {
        legs: Vec::new(),
        horizon,
    };
    let mut offset = 0.0;
    let mut state = y;
    while orbit.legs.len() < MAX_LEGS {
        let traj = integrate(state, potential, horizon - offset, r_bar, sim)?;
        match traj.termination {
            Termination::Horizon => {
                orbit.legs.push((offset, Leg::Plain(traj)));
                return Ok(orbit);
            }
            Termination::Exit => {
                return Err(Error::ExitedBall {
                    t: offset + traj.t_end,
                    r_bar,
                })
            }
            Termination::Collision => {
                let path = transmission_extend(traj, quad)?;
                let len = path.t_end();
                let done = offset + len >= horizon;
                if !done {
                    state = path.state_at(len)?;
                }
                orbit.legs.push((offset, Leg::Transmission(path)));
                if done {
                    return Ok(orbit);
                }
                offset += len;
            }
        }
    }
    Err(Error::TooManySteps(MAX_LEGS))
}

/// Time-`T` map of the extended flow: state and continuous angle increment.
pub fn extended_poincare_map(
    y: PhaseState,
    potential: &SmoothedPotential,
    t: f64,
    r_bar: f64,
    sim: &SimConfig,
    quad: &QuadConfig,
) -> Result<(PhaseState, f64)> {
    let orbit = extended_flow(y, potential, t, r_bar, sim, quad)?;
    Ok((orbit.state_at(t)?, orbit.angle_increment(t)?))
}

/// One schedule point of a continuity experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleCell {
    pub k: i32,
    pub scale: f64,
    pub epsilon: f64,
    pub perturbation: Perturbation,
}

/// Diagonal schedule `eps = l = |dq| = |dv1| = 10^-k`, with `dq` at angle
/// `dq_angle` and the radial velocity offset pointing inward.
pub fn diagonal_schedule(ks: &[i32], dq_angle: f64) -> Vec<ScheduleCell> {
    ks.iter()
        .map(|&k| {
            let s = decade(k);
            ScheduleCell {
                k,
                scale: s,
                epsilon: s,
                perturbation: Perturbation {
                    dq: [s * cos(dq_angle), s * sin(dq_angle)],
                    dv1: -s,
                    l: s,
                },
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distance {
    pub total: f64,
    pub position: f64,
    pub velocity: f64,
    pub theta_increment: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellOutcome {
    Measured(Distance),
    /// The perturbed orbit left the ball before `T`.
    ExitedBall(f64),
    Failed(Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuityCell {
    pub cell: ScheduleCell,
    pub outcome: CellOutcome,
}

#[derive(Debug, Clone)]
pub struct ContinuityReport {
    pub t: f64,
    pub t0: f64,
    pub reference: PhaseState,
    pub reference_theta: f64,
    pub cells: Vec<ContinuityCell>,
    pub distance: ConvergenceTable,
    pub angle: ConvergenceTable,
}

impl ContinuityReport {
    /// Distances nonincreasing along the schedule and the last below a
    /// tenth of the first.
    pub fn distance_verdict(&self) -> Verdict {
        let d = self.distance.values();
        if d.len() != self.cells.len() || d.len() < 2 {
            return Verdict::Inconclusive;
        }
        let nonincreasing = d.windows(2).all(|w| w[1] <= w[0]);
        Verdict::from_bool(nonincreasing && d[d.len() - 1] < d[0] / 10.0)
    }

    pub fn angle_extrapolant(&self) -> Option<Extrapolant> {
        self.angle.extrapolate()
    }

    /// The extrapolated angle increment lies within `tol` of the
    /// transmission angle of the reference.
    pub fn angle_verdict(&self, tol: f64) -> Verdict {
        match self.angle_extrapolant() {
            Some(e) if e.fitted => Verdict::from_bool(abs(e.limit - self.reference_theta) <= tol),
            Some(e) => match self.angle.points.last() {
                Some(p) => Verdict::from_bool(abs(p.value - self.reference_theta) <= tol && e.monotone),
                None => Verdict::Inconclusive,
            },
            None => Verdict::Inconclusive,
        }
    }

    /// `d(s) / s` per measured cell.
    pub fn differentiability_probe(&self) -> Vec<(f64, f64)> {
        self.distance
            .points
            .iter()
            .map(|p| (p.scale, p.value / p.scale))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContinuityConfig {
    pub sim: SimConfig,
    pub quad: QuadConfig,
    /// Smallest admissible speed of the reference at `T`.
    pub min_speed: f64,
}

impl Default for ContinuityConfig {
    fn default() -> Self {
        Self {
            sim: SimConfig::default(),
            quad: QuadConfig::default(),
            min_speed: 1e-8,
        }
    }
}

/// Reference collision datum, its collision time and the extended orbit.
pub fn reference_orbit(
    case: &Case,
    base: &PotentialSpec,
    horizon: f64,
    cfg: &ContinuityConfig,
) -> Result<(PhaseState, f64, ExtendedOrbit)> {
    let (y_bar, _) = collision_datum(case, base)?;
    let v0 = SmoothedPotential::singular(base.clone());
    let orbit = extended_flow(y_bar, &v0, horizon, case.r_bar(), &cfg.sim, &cfg.quad)?;
    let t0 = match &orbit.legs[0].1 {
        Leg::Transmission(p) => p.t0,
        Leg::Plain(_) => f64::INFINITY,
    };
    Ok((y_bar, t0, orbit))
}

/// Collision time of the datum of `case`.
pub fn datum_collision_time(case: &Case, base: &PotentialSpec, cfg: &ContinuityConfig) -> Result<f64> {
    let (y_bar, _) = collision_datum(case, base)?;
    let v0 = SmoothedPotential::singular(base.clone());
    let traj = integrate(y_bar, &v0, 1e6, case.r_bar(), &cfg.sim)?;
    Ok(transmission_extend(traj, &cfg.quad)?.t0)
}

/// Time `T = t_factor * T0`, `T0`, and the reference state and angle
/// increment at `T`.
pub fn continuity_reference(
    case: &Case,
    base: &PotentialSpec,
    t_factor: f64,
    cfg: &ContinuityConfig,
) -> Result<(f64, f64, PhaseState, f64)> {
    let t0 = datum_collision_time(case, base, cfg)?;
    let t = t_factor * t0;
    let (_, _, orbit) = reference_orbit(case, base, t, cfg)?;
    let reference = orbit.state_at(t)?;
    if reference.speed() < cfg.min_speed {
        return Err(Error::Domain {
            what: "reference speed at T (rest point)",
            value: reference.speed(),
        });
    }
    Ok((t, t0, reference, orbit.angle_increment(t)?))
}

/// Measures `|Phi_T(y_k, eps_k) - Phi_T(y_bar, 0)|` along a schedule, with
/// `T = t_factor * T0`.
pub fn continuity_experiment(
    case: &Case,
    base: &PotentialSpec,
    t_factor: f64,
    schedule: &[ScheduleCell],
    cfg: &ContinuityConfig,
) -> Result<ContinuityReport> {
    let (t, t0, reference, reference_theta) = continuity_reference(case, base, t_factor, cfg)?;
    let cells: Vec<ContinuityCell> = schedule
        .iter()
        .map(|c| ContinuityCell {
            cell: *c,
            outcome: continuity_cell(case, base, t, c, &reference, cfg),
        })
        .collect();
    Ok(assemble_continuity(t, t0, reference, reference_theta, cells))
}

/// Evaluates a single schedule cell against the reference state.
pub fn continuity_cell(
    case: &Case,
    base: &PotentialSpec,
    t: f64,
    cell: &ScheduleCell,
    reference: &PhaseState,
    cfg: &ContinuityConfig,
) -> CellOutcome {
    let run = || -> Result<(PhaseState, f64)> {
        let y = make_initial_data(case, base, &cell.perturbation)?;
        let v = SmoothedPotential::new(base.clone(), cell.epsilon)?;
        extended_poincare_map(y, &v, t, case.r_bar(), &cfg.sim, &cfg.quad)
    };
    match run() {
        Ok((s, theta)) => CellOutcome::Measured(Distance {
            total: s.distance(reference),
            position: s.position_distance(reference),
            velocity: s.velocity_distance(reference),
            theta_increment: theta,
        }),
        Err(Error::ExitedBall { t, .. }) => CellOutcome::ExitedBall(t),
        Err(e) => CellOutcome::Failed(e),
    }
}

/// Builds the report tables from evaluated cells in schedule order.
pub fn assemble_continuity(
    t: f64,
    t0: f64,
    reference: PhaseState,
    reference_theta: f64,
    cells: Vec<ContinuityCell>,
) -> ContinuityReport {
    let mut distance = ConvergenceTable::new("phase_space_distance", Abscissa::InverseLog);
    let mut angle = ConvergenceTable::new("theta_increment", Abscissa::InverseLog);
    for c in &cells {
        if let CellOutcome::Measured(d) = c.outcome {
            let point = |value| SchedulePoint {
                k: c.cell.k.max(0) as usize,
                scale: c.cell.scale,
                epsilon: c.cell.epsilon,
                l: c.cell.perturbation.l,
                value,
            };
            distance.push(point(d.total));
            angle.push(point(d.theta_increment));
        }
    }
    ContinuityReport {
        t,
        t0,
        reference,
        reference_theta,
        cells,
        distance,
        angle,
    }
}

/// Section through `anchor` with normal `normal` in phase space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionSpec {
    pub anchor: PhaseState,
    pub normal: [f64; 4],
}

/// Vector field `f(y) = (p, grad V(q))` of the unsmoothed problem.
pub fn vector_field(y: &PhaseState, potential: &SmoothedPotential) -> [f64; 4] {
    let k = potential.force_factor(y.r());
    [y.p[0], y.p[1], k * y.q[0], k * y.q[1]]
}

fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SectionSpec {
    /// Section through `anchor` normal to the flow there.
    pub fn flow_normal(anchor: PhaseState, potential: &SmoothedPotential) -> Self {
        Self {
            anchor,
            normal: vector_field(&anchor, potential),
        }
    }

    pub fn transversality(&self, potential: &SmoothedPotential) -> f64 {
        dot4(&self.normal, &vector_field(&self.anchor, potential))
    }

    /// `(y - y1) . F`.
    pub fn height(&self, y: &PhaseState) -> f64 {
        let d = [
            y.q[0] - self.anchor.q[0],
            y.q[1] - self.anchor.q[1],
            y.p[0] - self.anchor.p[0],
            y.p[1] - self.anchor.p[1],
        ];
        dot4(&d, &self.normal)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub tau: f64,
    pub trace: PhaseState,
    pub bracket_xi: f64,
    /// `H` strictly increasing at the interior check points of the bracket.
    pub monotone: bool,
}

const MONOTONE_POINTS: usize = 10;
const MAX_HALVINGS: usize = 40;

/// Hitting time of `section` near `t` along `orbit`, by bisection on
/// `H(t) = (Phi(t) - y1) . F` in a bracket `[t - xi, t + xi]`.
pub fn locate_crossing(orbit: &ExtendedOrbit, section: &SectionSpec, t: f64, tol: f64) -> Result<Crossing> {
    let h = |s: f64| orbit.state_at(s).map(|y| section.height(&y));
    let mut xi = 0.1 * t;
    let mut last = (t - xi, t + xi);
    for _ in 0..MAX_HALVINGS {
        let (a, b) = (t - xi, t + xi);
        last = (a, b);
        let (ha, hb) = (h(a)?, h(b)?);
        if ha < 0.0 && hb > 0.0 {
            let mut values = Vec::with_capacity(MONOTONE_POINTS);
            for j in 1..=MONOTONE_POINTS {
                values.push(h(a + (b - a) * j as f64 / (MONOTONE_POINTS + 1) as f64)?);
            }
            let monotone = values.windows(2).all(|w| w[1] > w[0]) && ha < values[0] && values[MONOTONE_POINTS - 1] < hb;
            if monotone {
                let mut err = None;
                let tau = bisect_to(
                    |s| match h(s) {
                        Ok(v) => v,
                        Err(e) => {
                            err = Some(e);
                            0.0
                        }
                    },
                    a,
                    b,
                    tol,
                );
                if let Some(e) = err {
                    return Err(e);
                }
                return Ok(Crossing {
                    tau,
                    trace: orbit.state_at(tau)?,
                    bracket_xi: xi,
                    monotone,
                });
            }
        }
        xi *= 0.5;
    }
    Err(Error::NoCrossing {
        lo: last.0,
        hi: last.1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSample {
    pub id: usize,
    pub y: PhaseState,
    pub epsilon: f64,
    pub collision: bool,
    pub crossing: core::result::Result<Crossing, Error>,
}

/// Uniform point of the unit ball in the first `dim` coordinates.
fn unit_ball<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> [f64; 4] {
    loop {
        let mut v = [0.0; 4];
        for x in v.iter_mut().take(dim) {
            *x = 2.0 * rng.gen::<f64>() - 1.0;
        }
        let n = v.iter().map(|x| x * x).sum::<f64>();
        if n <= 1.0 && n > 0.0 {
            return v;
        }
    }
}

/// Draws `count` samples in the `delta`-ball around `y_bar`. Every fifth
/// sample is a collision datum (radial velocity, `eps = 0`); the rest get a
/// random 4D offset and `eps` uniform in `(0, delta]`.
pub fn section_samples<R: Rng + ?Sized>(y_bar: &PhaseState, delta: f64, count: usize, rng: &mut R) -> Vec<(PhaseState, f64, bool)> {
    (0..count)
        .map(|i| {
            if i % 5 == 0 {
                let v = unit_ball(rng, 3);
                let q = [y_bar.q[0] + delta * v[0] / 2.0, y_bar.q[1] + delta * v[1] / 2.0];
                let r = hypot(q[0], q[1]);
                let u = [q[0] / r, q[1] / r];
                let vr = y_bar.p[0] * u[0] + y_bar.p[1] * u[1] + delta * v[2] / 2.0;
                (PhaseState::new(q, [vr * u[0], vr * u[1]]), 0.0, true)
            } else {
                let v = unit_ball(rng, 4);
                let y = PhaseState::new(
                    [y_bar.q[0] + delta * v[0], y_bar.q[1] + delta * v[1]],
                    [y_bar.p[0] + delta * v[2], y_bar.p[1] + delta * v[3]],
                );
                let eps = delta * (1.0 - rng.gen::<f64>());
                (y, eps, false)
            }
        })
        .collect()
}

/// Locates the section crossing of one sample.
pub fn section_sample(
    base: &PotentialSpec,
    y: PhaseState,
    epsilon: f64,
    section: &SectionSpec,
    t: f64,
    r_bar: f64,
    sim: &SimConfig,
    quad: &QuadConfig,
) -> core::result::Result<Crossing, Error> {
    let v = SmoothedPotential::new(base.clone(), epsilon)?;
    let orbit = extended_flow(y, &v, 1.1 * t, r_bar, sim, quad)?;
    locate_crossing(&orbit, section, t, sim.event_tol)
}

#[derive(Debug, Clone)]
pub struct SectionReport {
    pub delta: f64,
    pub t: f64,
    pub section: SectionSpec,
    pub samples: Vec<SectionSample>,
}

impl SectionReport {
    pub fn all_crossed(&self) -> bool {
        self.samples.iter().all(|s| s.crossing.is_ok())
    }

    /// `max |tau - T|` and `max |S(y) - y1|` over the crossed samples.
    pub fn spreads(&self) -> (f64, f64) {
        self.samples
            .iter()
            .filter_map(|s| s.crossing.as_ref().ok())
            .fold((0.0, 0.0), |(dt, ds), c| {
                (
                    f64::max(dt, abs(c.tau - self.t)),
                    f64::max(ds, c.trace.distance(&self.section.anchor)),
                )
            })
    }
}

/// `T = t_factor * T0`, the collision datum and the section through the
/// reference at `T` normal to the flow.
pub fn section_setup(
    case: &Case,
    base: &PotentialSpec,
    t_factor: f64,
    cfg: &ContinuityConfig,
) -> Result<(f64, PhaseState, SectionSpec)> {
    let t0 = datum_collision_time(case, base, cfg)?;
    let t = t_factor * t0;
    let (y_bar, _, orbit) = reference_orbit(case, base, t, cfg)?;
    let anchor = orbit.state_at(t)?;
    Ok((t, y_bar, SectionSpec::flow_normal(anchor, &SmoothedPotential::singular(base.clone()))))
}

/// The section experiment at one radius, sampled sequentially.
#[allow(clippy::too_many_arguments)]
pub fn poincare_section<R: Rng + ?Sized>(
    case: &Case,
    base: &PotentialSpec,
    t_factor: f64,
    delta: f64,
    count: usize,
    rng: &mut R,
    cfg: &ContinuityConfig,
) -> Result<SectionReport> {
    let (t, y_bar, section) = section_setup(case, base, t_factor, cfg)?;
    let samples = section_samples(&y_bar, delta, count, rng)
        .into_iter()
        .enumerate()
        .map(|(id, (y, epsilon, collision))| SectionSample {
            id,
            y,
            epsilon,
            collision,
            crossing: section_sample(base, y, epsilon, &section, t, case.r_bar(), &cfg.sim, &cfg.quad),
        })
        .collect();
    Ok(SectionReport {
        delta,
        t,
        section,
        samples,
    })
}
