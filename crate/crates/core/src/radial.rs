//! The effective one-dimensional radial problem `r'' = 2(E + V_eps(r)) - l^2/r^2`
//! in terms of `f(r) = 2 r^2 (E + V_eps(r))`, whose level set `f = l^2`
//! gives the turning radii.

use crate::error::{Error, Result};
use crate::math::sqrt;
use crate::potentials::{PotentialSpec, SmoothedPotential};
use crate::quadrature::{integrate, Endpoint, Node, QuadConfig, Quadrature};
use crate::roots::{bisect, geometric_grid, golden_max};

const GRID_POINTS: usize = 10_000;
const GRID_MIN: f64 = 1e-12;

/// How the unperturbed collision orbit meets the ball `B(0, R_bar)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Case {
    /// The collision orbit starts at rest at `P < R_bar`.
    Bounded { energy: f64, r_bar: f64 },
    /// The collision orbit is not bounded in the ball (`P >= R_bar`) and
    /// enters it radially at `R_bar`.
    Unbounded { energy: f64, r_bar: f64 },
}

impl Case {
    pub fn energy(&self) -> f64 {
        match *self {
            Case::Bounded { energy, .. } | Case::Unbounded { energy, .. } => energy,
        }
    }

    pub fn r_bar(&self) -> f64 {
        match *self {
            Case::Bounded { r_bar, .. } | Case::Unbounded { r_bar, .. } => r_bar,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RadialProblem {
    pub potential: SmoothedPotential,
    pub energy: f64,
    /// Angular momentum magnitude.
    pub l: f64,
}

/// Turning radii of a radial problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsidalData {
    /// Pericentre radius; 0 for radial (`l = 0`) motion.
    pub r_minus: f64,
    /// Apocentre radius; infinite if `f - l^2` has no sign change on the grid.
    pub r_plus: f64,
    /// First zero of `f`; infinite if none on the grid.
    pub p: f64,
    /// `min(R_bar, R_+)`.
    pub beta: f64,
    pub f_max: f64,
    /// `f_max = l^2` up to tolerance: the orbit is circular.
    pub circular: bool,
}

impl RadialProblem {
    pub fn new(base: PotentialSpec, epsilon: f64, energy: f64, l: f64) -> Result<Self> {
        if !energy.is_finite() {
            return Err(Error::Domain {
                what: "energy",
                value: energy,
            });
        }
        if !l.is_finite() {
            return Err(Error::Domain {
                what: "angular momentum",
                value: l,
            });
        }
        Ok(Self {
            potential: SmoothedPotential::new(base, epsilon)?,
            energy,
            l: l.abs(),
        })
    }

    pub fn f(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        2.0 * r * r * (self.energy + self.potential.value(r))
    }

    /// `2(E + V_eps(r)) - l^2/r^2`, the squared radial speed.
    pub fn radicand(&self, r: f64) -> f64 {
        2.0 * (self.energy + self.potential.value(r)) - self.l * self.l / (r * r)
    }

    /// The radicand at `r = a + d` with `a` a root of the radicand.
    pub fn radicand_near(&self, a: f64, d: f64) -> f64 {
        let r = a + d;
        let mut rad = 2.0 * self.potential.increment(a, d);
        if self.l > 0.0 {
            let l2 = self.l * self.l;
            rad += l2 * d * (r + a) / (a * a * r * r);
        }
        rad
    }

    pub fn apsides(&self, r_bar: f64) -> Result<ApsidalData> {
        apsidal_values(self, r_bar)
    }

    /// `1/|r'|` integrated over `[r_a, r_b]`.
    pub fn time_of_flight(
        &self,
        aps: &ApsidalData,
        r_a: f64,
        r_b: f64,
        cfg: &QuadConfig,
    ) -> Result<Quadrature> {
        if aps.circular {
            return Ok(Quadrature {
                value: 0.0,
                error: 0.0,
                evaluations: 0,
                intervals: 0,
            });
        }
        if !(r_a >= aps.r_minus && r_a <= r_b && r_b <= aps.r_plus) {
            return Err(Error::InvalidParameter(alloc::format!(
                "time of flight bounds [{r_a}, {r_b}] outside [{}, {}]",
                aps.r_minus,
                aps.r_plus
            )));
        }
        let rad = SafeRadicand::new(self, aps, r_a, r_b);
        integrate(
            |n| {
                let v = rad.eval(n)?;
                Ok(1.0 / sqrt(v))
            },
            r_a,
            r_b,
            rad.lo_end(),
            rad.hi_end(),
            cfg,
        )
    }
}

/// Radicand evaluation that measures distances from whichever turning point
/// is close, so it stays accurate up to the endpoints.
pub(crate) struct SafeRadicand<'a> {
    rp: &'a RadialProblem,
    lower: Option<f64>,
    upper: Option<f64>,
}

impl<'a> SafeRadicand<'a> {
    pub(crate) fn new(rp: &'a RadialProblem, aps: &ApsidalData, lo: f64, hi: f64) -> Self {
        let lower = (aps.r_minus > 0.0 && lo == aps.r_minus).then_some(lo);
        let upper = (aps.r_plus.is_finite() && hi == aps.r_plus).then_some(hi);
        Self { rp, lower, upper }
    }

    pub(crate) fn lo_end(&self) -> Endpoint {
        if self.lower.is_some() {
            Endpoint::InvSqrt
        } else {
            Endpoint::Regular
        }
    }

    pub(crate) fn hi_end(&self) -> Endpoint {
        if self.upper.is_some() {
            Endpoint::InvSqrt
        } else {
            Endpoint::Regular
        }
    }

    pub(crate) fn eval(&self, n: Node) -> Result<f64> {
        let v = match (self.lower, self.upper) {
            (Some(a), _) if n.from_lo < 0.5 * a => self.rp.radicand_near(a, n.from_lo),
            (_, Some(b)) if n.to_hi < 0.5 * b => self.rp.radicand_near(b, -n.to_hi),
            _ => self.rp.radicand(n.x),
        };
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else if v.is_nan() {
            Err(Error::NonFinite("radicand"))
        } else if v == f64::INFINITY {
            Ok(v)
        } else {
            Err(Error::NegativeRadicand { at: n.x, value: v })
        }
    }
}

/// Turning radii on `(0, R_bar]` by a geometric bracket scan and bisection.
pub fn apsidal_values(rp: &RadialProblem, r_bar: f64) -> Result<ApsidalData> {
    if !(r_bar > 0.0) {
        return Err(Error::Domain {
            what: "ball radius",
            value: r_bar,
        });
    }
    let l2 = rp.l * rp.l;
    let hi = if r_bar.is_finite() {
        f64::max(10.0 * r_bar, 1e3)
    } else {
        1e3
    };
    let grid = geometric_grid(GRID_MIN, hi, GRID_POINTS);
    let g = |r: f64| rp.f(r) - l2;
    let gs: alloc::vec::Vec<f64> = grid.iter().map(|&r| g(r)).collect();
    if gs.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("f on the bracket grid"));
    }

    let imax = gs
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (a, b) = (
        grid[imax.saturating_sub(1)],
        grid[(imax + 1).min(GRID_POINTS - 1)],
    );
    let (r_star, f_star) = golden_max(|r| rp.f(r), a, b);
    let f_max = f_star.max(gs[imax] + l2);
    let tol = 1e-12 * f64::max(1.0, l2);

    let p = first_down_crossing(&grid, |r| rp.f(r), 0).unwrap_or(f64::INFINITY);

    if f_max < l2 - tol {
        return Err(Error::NoOrbit { l_sq: l2, f_max });
    }
    if rp.l > 0.0 && f_max - l2 <= tol {
        return Ok(ApsidalData {
            r_minus: r_star,
            r_plus: r_star,
            p,
            beta: r_bar.min(r_star),
            f_max,
            circular: true,
        });
    }

    let (r_minus, start) = if rp.l == 0.0 {
        if !(gs[0] > 0.0) {
            return Err(Error::NoOrbit { l_sq: 0.0, f_max });
        }
        (0.0, 0)
    } else if gs[0] > 0.0 {
        (bisect(g, 0.0, grid[0]), 0)
    } else {
        let i = (0..GRID_POINTS - 1)
            .find(|&i| gs[i] <= 0.0 && gs[i + 1] > 0.0)
            .ok_or(Error::NoOrbit { l_sq: l2, f_max })?;
        (bisect(g, grid[i], grid[i + 1]), i + 1)
    };
    let r_plus = first_down_crossing(&grid, g, start).unwrap_or(f64::INFINITY);
    let beta = r_bar.min(r_plus);
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(alloc::string::String::from(
            "unbounded orbit needs a finite ball radius",
        )));
    }
    Ok(ApsidalData {
        r_minus,
        r_plus,
        p,
        beta,
        f_max,
        circular: false,
    })
}

fn first_down_crossing<G: Fn(f64) -> f64>(grid: &[f64], g: G, start: usize) -> Option<f64> {
    if !(g(grid[start]) > 0.0) {
        return if start == 0 { Some(0.0) } else { None };
    }
    (start + 1..grid.len())
        .find(|&i| !(g(grid[i]) > 0.0))
        .map(|i| bisect(&g, grid[i - 1], grid[i]))
}

/// Time of flight between two radii of one radial problem.
pub fn time_of_flight(rp: &RadialProblem, r_a: f64, r_b: f64, cfg: &QuadConfig) -> Result<Quadrature> {
    let aps = apsidal_values(rp, f64::INFINITY).or_else(|e| match e {
        Error::InvalidParameter(_) => apsidal_values(rp, r_b),
        other => Err(other),
    })?;
    rp.time_of_flight(&aps, r_a, r_b, cfg)
}

/// Time for the radial (`l = 0`, unsmoothed) motion to fall from rest-or-
/// outward-speed radius `r0` into the origin: `int_0^r0 d rho / sqrt(2(E + V(rho)))`.
pub fn collision_time(base: &PotentialSpec, energy: f64, r0: f64, cfg: &QuadConfig) -> Result<Quadrature> {
    if !(r0 > 0.0 && r0.is_finite()) {
        return Err(Error::Domain {
            what: "collision time start radius",
            value: r0,
        });
    }
    let rp = RadialProblem::new(base.clone(), 0.0, energy, 0.0)?;
    let e0 = energy + base.eval(r0);
    let scale = 1e-13 * (1.0 + energy.abs());
    if e0 < -scale {
        return Err(Error::Domain {
            what: "collision time start radius (energetically forbidden)",
            value: r0,
        });
    }
    let turning = e0 <= scale;
    let res = integrate(
        |n: Node| {
            let rad = if turning && n.to_hi < 0.5 * r0 {
                2.0 * (e0.max(0.0) + base.increment(r0, -n.to_hi))
            } else {
                rp.radicand(n.x)
            };
            if !(rad > 0.0) {
                return Err(Error::NegativeRadicand { at: n.x, value: rad });
            }
            Ok(1.0 / sqrt(rad))
        },
        0.0,
        r0,
        Endpoint::Regular,
        if turning {
            Endpoint::InvSqrt
        } else {
            Endpoint::Regular
        },
        cfg,
    );
    match res {
        Ok(q) if q.value.is_finite() => Ok(q),
        Ok(_) | Err(Error::QuadratureNotConverged { .. }) | Err(Error::NonFinite(_)) => {
            Err(Error::Divergent("collision time"))
        }
        Err(e) => Err(e),
    }
}
