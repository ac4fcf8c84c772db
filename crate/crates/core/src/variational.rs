//! Action of paths on `[-T, T]`, the standard variation of a collision
//! path away from the origin, and the resulting action differences.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::flow::TransmissionPath;
use crate::math::{abs, hypot};
use crate::potentials::PotentialSpec;
use crate::quadrature::gauss7;

/// Values on the uniform grid `t_i = -T + i h`, `h = 2T / N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscretePath {
    pub half_span: f64,
    pub values: Vec<[f64; 2]>,
}

impl DiscretePath {
    pub fn new(half_span: f64, values: Vec<[f64; 2]>) -> Result<Self> {
        if !(half_span > 0.0 && half_span.is_finite()) {
            return Err(Error::Domain {
                what: "path half span",
                value: half_span,
            });
        }
        if values.len() < 3 || !(values.len() - 1).is_multiple_of(2) {
            return Err(Error::InvalidParameter(alloc::format!(
                "a path needs an even number of cells, got {}",
                values.len().saturating_sub(1)
            )));
        }
        Ok(Self { half_span, values })
    }

    /// Samples the transmission path on `[-T, T]`, centred on the collision.
    pub fn from_transmission(path: &TransmissionPath, half_span: f64, cells: usize) -> Result<Self> {
        if !(half_span > 0.0 && half_span <= path.t0) {
            return Err(Error::Domain {
                what: "half span beyond the transmission path",
                value: half_span,
            });
        }
        if cells < 2 || !cells.is_multiple_of(2) {
            return Err(Error::InvalidParameter(alloc::format!("cell count {cells} must be even")));
        }
        let h = 2.0 * half_span / cells as f64;
        let mid = (cells / 2) as isize;
        let values = (0..=cells as isize)
            .map(|i| {
                if i == mid {
                    Ok([0.0, 0.0])
                } else {
                    path.state_relative((i - mid) as f64 * h).map(|s| s.q)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(half_span, values)
    }

    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_span / self.cells() as f64
    }

    pub fn time(&self, i: usize) -> f64 {
        (i as f64 - (self.cells() / 2) as f64) * self.step()
    }

    pub fn kinetic(&self) -> f64 {
        let h = self.step();
        self.values
            .windows(2)
            .map(|w| {
                let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
                0.5 * (d[0] * d[0] + d[1] * d[1]) / h
            })
            .sum()
    }

    /// Time-reversed path `u(-t)`.
    pub fn reversed(&self) -> Self {
        let mut values = self.values.clone();
        values.reverse();
        Self {
            half_span: self.half_span,
            values,
        }
    }
}

/// Threshold on the change of a refined collision cell.
pub const CELL_TOL: f64 = 1e-10;
const MAX_DEPTH: usize = 200;

/// Integral over `[0, h]` of a function integrable but unbounded at 0,
/// summed over dyadic pieces `[h 2^-(j+1), h 2^-j]` until a piece adds
/// less than `tol`. Returns the value and depth.
pub fn dyadic_toward_zero<F: FnMut(f64, f64) -> Result<f64>>(mut piece: F, h: f64, tol: f64) -> Result<(f64, usize)> {
    let mut total = 0.0;
    let mut hi = h;
    for depth in 1..=MAX_DEPTH {
        let lo = 0.5 * hi;
        let c = piece(lo, hi)?;
        total += c;
        if abs(c) < tol {
            return Ok((total, depth));
        }
        hi = lo;
    }
    Err(Error::QuadratureNotConverged {
        estimate: total,
        error: f64::NAN,
    })
}

/// Discrete action `sum 1/2 |du/h|^2 h + int V(|u|)` with piecewise-linear
/// `u` and the midpoint rule on the potential. Cells next to a node at the
/// origin are refined dyadically toward it.
pub fn action(path: &DiscretePath, potential: &PotentialSpec) -> Result<f64> {
    let h = path.step();
    let v_at = |u: [f64; 2]| -> Result<f64> {
        let r = hypot(u[0], u[1]);
        if r == 0.0 {
            return Err(Error::NonFinite("potential at the origin"));
        }
        Ok(potential.eval(r))
    };
    let lerp = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])];
    let mut pot = 0.0;
    for w in path.values.windows(2) {
        let (a, b) = (w[0], w[1]);
        let a0 = a == [0.0, 0.0];
        let b0 = b == [0.0, 0.0];
        if a0 && b0 {
            return Err(Error::NonFinite("cell collapsed to the origin"));
        }
        if a0 || b0 {
            // parametrize by the distance from the origin node
            let (z, other) = if a0 { (a, b) } else { (b, a) };
            let (c, _) = dyadic_toward_zero(
                |lo, hi| Ok((hi - lo) * v_at(lerp(z, other, 0.5 * (lo + hi) / h))?),
                h,
                CELL_TOL,
            )?;
            pot += c;
        } else {
            pot += h * v_at(lerp(a, b, 0.5))?;
        }
    }
    Ok(path.kinetic() + pot)
}

/// Unit normal to the line of a collinear path, counterclockwise from the
/// direction of motion `u(T) - u(-T)`.
pub fn line_normal(path: &DiscretePath, tol: f64) -> Result<[f64; 2]> {
    let (a, b) = (path.values[0], path.values[path.cells()]);
    let far = [b[0] - a[0], b[1] - a[1]];
    let scale = hypot(far[0], far[1]);
    if scale == 0.0 {
        return Err(Error::NotCollinear(0.0));
    }
    let d = [far[0] / scale, far[1] / scale];
    let dev = path
        .values
        .iter()
        .map(|u| abs(u[0] * d[1] - u[1] * d[0]))
        .fold(0.0, f64::max);
    if dev > tol * scale {
        return Err(Error::NotCollinear(dev));
    }
    Ok([-d[1], d[0]])
}

/// Taper `v(t)`: `delta` on `|t| <= T1`, linear to zero at `|t| = T`.
pub fn taper(t: f64, delta: f64, t1: f64, half_span: f64) -> f64 {
    let a = abs(t);
    if a <= t1 {
        delta
    } else if a >= half_span {
        0.0
    } else {
        delta * (half_span - a) / (half_span - t1)
    }
}

/// Collinearity tolerance relative to the path size.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// `T1` moved to the nearest interior grid node.
pub fn snap_t1(path: &DiscretePath, t1: f64) -> Result<f64> {
    let h = path.step();
    let i = (t1 / h + 0.5) as usize;
    let half = path.cells() / 2;
    if !(t1 > 0.0) || i == 0 || i >= half {
        return Err(Error::Domain {
            what: "T1 must lie strictly inside (0, T)",
            value: t1,
        });
    }
    Ok(i as f64 * h)
}

/// `u1 = u0 + v(t) n` with `n` the counterclockwise normal of the line.
pub fn standard_variation(u0: &DiscretePath, delta: f64, t1: f64) -> Result<DiscretePath> {
    if !(delta > 0.0) {
        return Err(Error::Domain {
            what: "variation size",
            value: delta,
        });
    }
    let n = line_normal(u0, COLLINEAR_TOL)?;
    let t1 = snap_t1(u0, t1)?;
    let values = u0
        .values
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let v = taper(u0.time(i), delta, t1, u0.half_span);
            [u[0] + v * n[0], u[1] + v * n[1]]
        })
        .collect();
    DiscretePath::new(u0.half_span, values)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionDifference {
    pub delta: f64,
    pub t1: f64,
    /// `-delta^2 / (T - T1)`.
    pub dk_closed: f64,
    /// `K(u0) - K(u1)` from the grid values.
    pub dk_discrete: f64,
    /// `int V(|u0|) - V(|u1|)`.
    pub dv: f64,
    pub da: f64,
    /// Deepest dyadic level used next to the collision.
    pub collision_cell_depth: usize,
    /// `int_0^T1 V(|u0|) - V(sqrt(|u0|^2 + delta^2))`.
    pub dv_lower_bound: f64,
}

fn gauss7_try<F: FnMut(f64) -> Result<f64>>(mut f: F, a: f64, b: f64) -> Result<f64> {
    let mut err = None;
    let v = gauss7(
        |x| {
            f(x).unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            })
        },
        a,
        b,
    );
    err.map_or(Ok(v), Err)
}

/// `V(r0) - V(sqrt(r0^2 + v^2))`, accurate for small `v`.
fn potential_gap(base: &PotentialSpec, r0: f64, v: f64) -> f64 {
    let r1 = hypot(r0, v);
    -base.increment(r0, v * v / (r0 + r1))
}

/// Action difference `A(u0) - A(u1)` for the standard variation of the
/// transmission path sampled on `cells` cells of `[-T, T]`.
pub fn delta_action(path: &TransmissionPath, half_span: f64, cells: usize, delta: f64, t1: f64) -> Result<ActionDifference> {
    let u0 = DiscretePath::from_transmission(path, half_span, cells)?;
    let u1 = standard_variation(&u0, delta, t1)?;
    let t1 = snap_t1(&u0, t1)?;
    let h = u0.step();
    let t = half_span;

    let dk_discrete: f64 = u0
        .values
        .windows(2)
        .zip(u1.values.windows(2))
        .map(|(a, b)| {
            let d0 = [a[1][0] - a[0][0], a[1][1] - a[0][1]];
            let d1 = [b[1][0] - b[0][0], b[1][1] - b[0][1]];
            let cross = d0[0] * (d1[0] - d0[0]) + d0[1] * (d1[1] - d0[1]);
            let w = [d1[0] - d0[0], d1[1] - d0[1]];
            -(cross + 0.5 * (w[0] * w[0] + w[1] * w[1])) / h
        })
        .sum();
    let dk_closed = -delta * delta / (t - t1);

    let base = &path.pre.potential.base;
    let r_at = |sigma: f64| path.state_relative(sigma).map(|s| s.r());
    let gap_v = |sigma: f64| -> Result<f64> { Ok(potential_gap(base, r_at(sigma)?, taper(sigma, delta, t1, t))) };
    let gap_d = |sigma: f64| -> Result<f64> { Ok(potential_gap(base, r_at(sigma)?, delta)) };

    let half = cells / 2;
    let mut dv = 0.0;
    let mut depth = 0;
    for i in 0..cells {
        let (a, b) = (u0.time(i), u0.time(i + 1));
        if i + 1 == half || i == half {
            let sign = if i == half { 1.0 } else { -1.0 };
            let (c, d) = dyadic_toward_zero(|lo, hi| gauss7_try(|s| gap_v(sign * s), lo, hi), h, CELL_TOL)?;
            dv += c;
            depth = depth.max(d);
        } else {
            dv += gauss7_try(gap_v, a, b)?;
        }
    }

    let n1 = (t1 / h + 0.5) as usize;
    let (mut lower, _) = dyadic_toward_zero(|lo, hi| gauss7_try(gap_d, lo, hi), h, CELL_TOL)?;
    for j in 1..n1 {
        lower += gauss7_try(gap_d, j as f64 * h, (j + 1) as f64 * h)?;
    }

    Ok(ActionDifference {
        delta,
        t1,
        dk_closed,
        dk_discrete,
        dv,
        da: dk_discrete + dv,
        collision_cell_depth: depth,
        dv_lower_bound: lower,
    })
}
