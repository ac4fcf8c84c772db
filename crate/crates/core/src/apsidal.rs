//! Apsidal angle of smoothed near-collision orbits, the auxiliary bounds used
//! to dominate its integrand, and convergence sweeps toward the collision.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::extrapolate::{Abscissa, Extrapolant};
use crate::math::{abs, decade, sqrt};
use crate::potentials::{PotentialSpec, SmoothedPotential};
use crate::quadrature::{integrate, Endpoint, QuadConfig, Quadrature};
use crate::radial::{ApsidalData, Case, RadialProblem, SafeRadicand};
use crate::table::{ConvergenceTable, SchedulePoint, Verdict};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApsidalResult {
    pub delta_theta: f64,
    pub r_minus: f64,
    pub beta: f64,
    pub quad_err: f64,
    /// Contribution of `[R_-, sqrt(beta R_-)]`.
    pub i1: f64,
    /// Contribution of `[sqrt(beta R_-), beta]`.
    pub i2: f64,
}

/// `int_{R_-}^{beta} l / (r^2 r') dr`, the angle swept from pericentre to
/// `beta = min(R_bar, R_+)`.
pub fn apsidal_angle(rp: &RadialProblem, r_bar: f64, cfg: &QuadConfig) -> Result<ApsidalResult> {
    let aps = rp.apsides(r_bar)?;
    apsidal_angle_with(rp, &aps, cfg)
}

pub fn apsidal_angle_with(
    rp: &RadialProblem,
    aps: &ApsidalData,
    cfg: &QuadConfig,
) -> Result<ApsidalResult> {
    if !(rp.l > 0.0) {
        return Err(Error::Domain {
            what: "apsidal angle angular momentum",
            value: rp.l,
        });
    }
    if aps.circular {
        return Err(Error::CircularOrbit {
            radius: aps.r_minus,
        });
    }
    let (r_minus, beta) = (aps.r_minus, aps.beta);
    if !(r_minus > 0.0 && beta > r_minus) {
        return Err(Error::Domain {
            what: "pericentre radius",
            value: r_minus,
        });
    }
    let mid = sqrt(beta * r_minus);
    let l = rp.l;
    let piece = |lo: f64, hi: f64| -> Result<Quadrature> {
        let rad = SafeRadicand::new(rp, aps, lo, hi);
        integrate(
            |n| Ok(l / (n.x * n.x * sqrt(rad.eval(n)?))),
            lo,
            hi,
            rad.lo_end(),
            rad.hi_end(),
            cfg,
        )
    };
    let i1 = piece(r_minus, mid)?;
    let i2 = piece(mid, beta)?;
    Ok(ApsidalResult {
        delta_theta: i1.value + i2.value,
        r_minus,
        beta,
        quad_err: i1.error + i2.error,
        i1: i1.value,
        i2: i2.value,
    })
}

/// `int_1^xi dx / (x sqrt((x - 1)(1 - x/xi)))`, which equals pi for every
/// `xi > 1`; a self-test of the singular quadrature.
pub fn pi_identity(xi: f64, cfg: &QuadConfig) -> Result<Quadrature> {
    if !(xi > 1.0 && xi.is_finite()) {
        return Err(Error::Domain {
            what: "pi identity upper limit",
            value: xi,
        });
    }
    integrate(
        |n| Ok(1.0 / (n.x * sqrt(n.from_lo * (n.to_hi / xi)))),
        1.0,
        xi,
        Endpoint::InvSqrt,
        Endpoint::InvSqrt,
        cfg,
    )
}

/// `(V_eps(x) - V_eps(r)) / (r^2 - x^2)` with its limit at `x = r`.
fn drop_ratio(v: &SmoothedPotential, x: f64, r_bar: f64) -> f64 {
    if x == r_bar {
        -v.d1(r_bar) / (2.0 * r_bar)
    } else {
        v.increment(r_bar, x - r_bar) / ((r_bar - x) * (r_bar + x))
    }
}

fn check_order(y: f64, x: f64, r_bar: f64) -> Result<()> {
    if !(y > 0.0) {
        return Err(Error::Domain { what: "y", value: y });
    }
    if !(x > y) {
        return Err(Error::Domain { what: "x (needs x > y)", value: x });
    }
    if !(x <= r_bar && r_bar.is_finite()) {
        return Err(Error::Domain {
            what: "r_bar (needs x <= r_bar)",
            value: r_bar,
        });
    }
    Ok(())
}

/// `Q(eps, x) = (V_eps(x) - V_eps(r)) / (V_eps(y) - V_eps(r))`.
pub fn q_ratio(base: &PotentialSpec, eps: f64, y: f64, x: f64, r_bar: f64) -> Result<f64> {
    check_order(y, x, r_bar)?;
    let v = SmoothedPotential::new(base.clone(), eps)?;
    Ok(v.increment(r_bar, x - r_bar) / v.increment(r_bar, y - r_bar))
}

/// The function whose lower bound `r_bar` dominates the apsidal integrand:
///
/// `F = (r + x)/(x/y - 1) [ (x/y)^2 Q (r^2 - y^2)/(r^2 - x^2) - 1 ]`.
pub fn f_bound(base: &PotentialSpec, eps: f64, y: f64, x: f64, r_bar: f64) -> Result<f64> {
    check_order(y, x, r_bar)?;
    if y >= r_bar {
        return Err(Error::Domain { what: "y (needs y < r_bar)", value: y });
    }
    let v = SmoothedPotential::new(base.clone(), eps)?;
    let t = x / y;
    let bracket = t * t * drop_ratio(&v, x, r_bar) / drop_ratio(&v, y, r_bar) - 1.0;
    Ok((r_bar + x) / (t - 1.0) * bracket)
}

/// Limit of [`f_bound`] as `x -> y+`.
pub fn f_bound_limit(base: &PotentialSpec, eps: f64, y: f64, r_bar: f64) -> Result<f64> {
    if !(y > 0.0 && y < r_bar) {
        return Err(Error::Domain { what: "y", value: y });
    }
    let v = SmoothedPotential::new(base.clone(), eps)?;
    let log_slope = v.d1(y) / v.increment(r_bar, y - r_bar) + 2.0 * y / ((r_bar - y) * (r_bar + y));
    Ok((r_bar + y) * (2.0 + y * log_slope))
}

/// Squared radial speed at `beta` for the orbit of `rp`.
pub fn radial_speed_sq_at(rp: &RadialProblem, aps: &ApsidalData) -> f64 {
    if aps.beta == aps.r_plus {
        0.0
    } else {
        rp.radicand(aps.beta).max(0.0)
    }
}

/// The ratio `K(rho)` whose square root multiplies the model integrand
/// `1 / (rho sqrt((beta - rho R_-)(rho - 1)))` of the apsidal angle.
pub fn k_function(rp: &RadialProblem, aps: &ApsidalData, v_sq: f64, rho: f64) -> Result<f64> {
    let (rm, beta) = (aps.r_minus, aps.beta);
    if !(rm > 0.0) || rp.l == 0.0 {
        return Err(Error::Domain {
            what: "pericentre radius",
            value: rm,
        });
    }
    if !(rho > 1.0 && rho < beta / rm) {
        return Err(Error::Domain {
            what: "K argument rho",
            value: rho,
        });
    }
    if !(v_sq >= 0.0) {
        return Err(Error::Domain {
            what: "squared radial speed",
            value: v_sq,
        });
    }
    let v = &rp.potential;
    let x = rho * rm;
    let num_v = v.increment(beta, x - beta) + 0.5 * v_sq;
    let den_v = v.increment(beta, rm - beta) + 0.5 * v_sq;
    let b2 = beta * beta;
    let denom = (x * x / b2 - 1.0) + rho * rho * (num_v / den_v) * (b2 - rm * rm) / b2;
    Ok((beta - x) * (rho - 1.0) / denom)
}

/// Table of `V_eps(rho delta) / V_eps(delta)` along a schedule of
/// `(delta, eps)` pairs tending to `(0, 0)`.
pub fn vstar_ratio_limit(
    base: &PotentialSpec,
    rho: f64,
    schedule: &[(f64, f64)],
) -> Result<ConvergenceTable> {
    if !(rho >= 1.0) {
        return Err(Error::Domain { what: "rho", value: rho });
    }
    let mut table = ConvergenceTable::new("vstar_ratio", Abscissa::InverseLog);
    for (k, &(delta, eps)) in schedule.iter().enumerate() {
        let v = SmoothedPotential::new(base.clone(), eps)?;
        if !(delta > 0.0) {
            return Err(Error::Domain { what: "delta", value: delta });
        }
        table.push(SchedulePoint {
            k,
            scale: delta.max(eps),
            epsilon: eps,
            l: 0.0,
            value: v.value(rho * delta) / v.value(delta),
        });
    }
    Ok(table)
}

/// Seeded random audit of `F >= r_bar` and `K <= beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundAudit {
    pub epsilon: f64,
    pub samples: usize,
    pub f_violations: usize,
    pub k_violations: usize,
    /// Smallest `F - r_bar` seen.
    pub f_margin: f64,
    /// Smallest `beta - K` seen.
    pub k_margin: f64,
    /// Samples skipped because the orbit or the bound was undefined.
    pub skipped: usize,
}

/// Draws `samples` triples `y < x < r_bar` in `(0, r_max)` for `F` and
/// `samples` pairs `(l, rho)` on the `energy` orbits for `K`, counting
/// violations beyond `tol`. `l` is log-uniform in `l_range` and `rho`
/// log-uniform in `(1, beta / R_-)`.
#[allow(clippy::too_many_arguments)]
pub fn bound_audit<R: rand::Rng + ?Sized>(
    base: &PotentialSpec,
    eps: f64,
    energy: f64,
    r_max: f64,
    l_range: (f64, f64),
    samples: usize,
    tol: f64,
    rng: &mut R,
) -> Result<BoundAudit> {
    let mut audit = BoundAudit {
        epsilon: eps,
        samples,
        f_violations: 0,
        k_violations: 0,
        f_margin: f64::INFINITY,
        k_margin: f64::INFINITY,
        skipped: 0,
    };
    for _ in 0..samples {
        let mut u = [rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()];
        u.sort_by(f64::total_cmp);
        let (y, x, r) = (u[0] * r_max, u[1] * r_max, u[2] * r_max);
        match f_bound(base, eps, y, x, r) {
            Ok(f) if f.is_finite() => {
                audit.f_margin = audit.f_margin.min(f - r);
                if f < r - tol * (1.0 + r) {
                    audit.f_violations += 1;
                }
            }
            _ => audit.skipped += 1,
        }
    }
    let (l_lo, l_hi) = l_range;
    for _ in 0..samples {
        let l = l_lo * crate::math::powf(l_hi / l_lo, rng.gen::<f64>());
        let w = rng.gen::<f64>();
        let outcome = RadialProblem::new(base.clone(), eps, energy, l).and_then(|rp| {
            let aps = rp.apsides(f64::INFINITY)?;
            let rho = crate::math::powf(aps.beta / aps.r_minus, w);
            let k = k_function(&rp, &aps, radial_speed_sq_at(&rp, &aps), rho)?;
            Ok((k, aps.beta))
        });
        match outcome {
            Ok((k, beta)) if k.is_finite() => {
                audit.k_margin = audit.k_margin.min(beta - k);
                if k > beta + tol * (1.0 + beta) {
                    audit.k_violations += 1;
                }
            }
            _ => audit.skipped += 1,
        }
    }
    Ok(audit)
}

/// One schedule of `(eps, l)` pairs for a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPath {
    pub id: String,
    pub points: Vec<(f64, f64)>,
}

impl SweepPath {
    /// `eps = 10^-(k + de)`, `l = 10^-(k + dl)` for `k` in `ks`.
    pub fn decades(id: &str, ks: &[i32], de: i32, dl: i32) -> Self {
        Self {
            id: String::from(id),
            points: ks
                .iter()
                .map(|&k| (decade(k + de), decade(k + dl)))
                .collect(),
        }
    }
}

/// The diagonal and the two offset diagonals on which one of the scales
/// leads the other by a decade.
pub fn standard_paths(ks: &[i32]) -> Vec<SweepPath> {
    alloc::vec![
        SweepPath::decades("diagonal", ks, 0, 0),
        SweepPath::decades("epsilon_first", ks, 1, 0),
        SweepPath::decades("l_first", ks, 0, 1),
    ]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepCell {
    pub path_id: String,
    pub k: usize,
    pub epsilon: f64,
    pub l: f64,
    pub outcome: core::result::Result<ApsidalResult, Error>,
}

/// Ball radius that a sweep case integrates up to.
pub fn case_ball(base: &PotentialSpec, case: &Case) -> Result<f64> {
    let (energy, r_bar, bounded) = match *case {
        Case::Bounded { energy, r_bar } => (energy, r_bar, true),
        Case::Unbounded { energy, r_bar } => (energy, r_bar, false),
    };
    let rp = RadialProblem::new(base.clone(), 0.0, energy, 0.0)?;
    let p = match crate::radial::apsidal_values(&rp, r_bar) {
        Ok(a) => a.p,
        Err(Error::InvalidParameter(_)) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    if bounded && !(p < r_bar) {
        return Err(Error::CaseMismatch("bounded case needs P < R_bar"));
    }
    if !bounded && !(p >= r_bar && r_bar.is_finite()) {
        return Err(Error::CaseMismatch("unbounded case needs P >= R_bar with finite R_bar"));
    }
    Ok(r_bar)
}

pub fn sweep_cell(
    base: &PotentialSpec,
    case: &Case,
    path_id: &str,
    k: usize,
    eps: f64,
    l: f64,
    cfg: &QuadConfig,
) -> SweepCell {
    let outcome = RadialProblem::new(base.clone(), eps, case.energy(), l)
        .and_then(|rp| apsidal_angle(&rp, case.r_bar(), cfg));
    SweepCell {
        path_id: String::from(path_id),
        k,
        epsilon: eps,
        l,
        outcome,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathReport {
    pub id: String,
    pub cells: Vec<SweepCell>,
    pub table: ConvergenceTable,
    pub extrapolant: Option<Extrapolant>,
    pub verdict: Verdict,
}

impl PathReport {
    pub fn from_cells(id: &str, cells: Vec<SweepCell>, abscissa: Abscissa, target: f64) -> Self {
        let mut table = ConvergenceTable::new("delta_theta", abscissa);
        for c in &cells {
            if let Ok(r) = &c.outcome {
                table.push(SchedulePoint {
                    k: c.k,
                    scale: c.epsilon.max(c.l),
                    epsilon: c.epsilon,
                    l: c.l,
                    value: r.delta_theta,
                });
            }
        }
        let extrapolant = table.extrapolate();
        let verdict = table.verdict_against(target);
        Self {
            id: String::from(id),
            cells,
            table,
            extrapolant,
            verdict,
        }
    }

    pub fn limit(&self) -> Option<f64> {
        self.extrapolant.map(|e| e.limit)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub target: f64,
    pub paths: Vec<PathReport>,
    /// All paths extrapolate to a common limit.
    pub uniformity: Verdict,
}

impl SweepReport {
    pub fn from_paths(paths: Vec<PathReport>, target: f64) -> Self {
        let mut uniformity = Verdict::Holds;
        let spread = paths
            .iter()
            .filter_map(|p| p.extrapolant.map(|e| abs(e.last_increment)))
            .fold(0.0, f64::max);
        let limits: Vec<f64> = paths.iter().filter_map(|p| p.limit()).collect();
        if limits.len() < paths.len() || paths.iter().any(|p| p.verdict == Verdict::Inconclusive) {
            uniformity = Verdict::Inconclusive;
        }
        for a in &limits {
            for b in &limits {
                if abs(a - b) > 10.0 * spread {
                    uniformity = Verdict::Fails;
                }
            }
        }
        Self {
            target,
            paths,
            uniformity,
        }
    }

    /// Every path converges to the target and the paths agree.
    pub fn verdict(&self) -> Verdict {
        self.paths
            .iter()
            .fold(self.uniformity, |acc, p| acc.and(p.verdict))
    }
}

/// Apsidal angle along every path, compared with `target`.
pub fn convergence_sweep(
    base: &PotentialSpec,
    case: &Case,
    paths: &[SweepPath],
    abscissa: Abscissa,
    target: f64,
    cfg: &QuadConfig,
) -> Result<SweepReport> {
    case_ball(base, case)?;
    let reports = paths
        .iter()
        .map(|path| {
            let cells = path
                .points
                .iter()
                .enumerate()
                .map(|(k, &(eps, l))| sweep_cell(base, case, &path.id, k, eps, l, cfg))
                .collect();
            PathReport::from_cells(&path.id, cells, abscissa, target)
        })
        .collect();
    Ok(SweepReport::from_paths(reports, target))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn pi_identity_values() {
        let cfg = QuadConfig::default();
        for xi in [1.0001, 1.5, 2.0, 10.0, 1e6] {
            let q = pi_identity(xi, &cfg).unwrap();
            assert!((q.value - PI).abs() < 1e-8, "xi = {xi}: {}", q.value);
        }
    }

    #[test]
    fn kepler_apsidal_angle_is_pi() {
        let rp = RadialProblem::new(PotentialSpec::Homogeneous { alpha: 1.0 }, 0.0, -0.4, 0.8).unwrap();
        let r = apsidal_angle(&rp, f64::INFINITY, &QuadConfig::default()).unwrap();
        assert!((r.delta_theta - PI).abs() < 1e-8, "{}", r.delta_theta);
    }

    #[test]
    fn circular_orbit_is_an_error() {
        let rp = RadialProblem::new(PotentialSpec::Homogeneous { alpha: 1.0 }, 0.0, -0.5, 1.0).unwrap();
        assert!(matches!(
            apsidal_angle(&rp, f64::INFINITY, &QuadConfig::default()),
            Err(Error::CircularOrbit { .. })
        ));
    }

    #[test]
    fn f_bound_near_diagonal_matches_limit() {
        let p = PotentialSpec::Logarithmic;
        let (y, r) = (0.2, 0.7);
        let lim = f_bound_limit(&p, 1e-4, y, r).unwrap();
        let f = f_bound(&p, 1e-4, y, y * (1.0 + 1e-8), r).unwrap();
        assert!(f.is_finite());
        assert!((f - lim).abs() < 1e-6 * lim.abs(), "{f} vs {lim}");
    }

    #[test]
    fn f_bound_at_r_bar() {
        let p = PotentialSpec::Logarithmic;
        let a = f_bound(&p, 1e-4, 0.2, 0.7, 0.7).unwrap();
        let b = f_bound(&p, 1e-4, 0.2, 0.7 * (1.0 - 1e-9), 0.7).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs());
        assert!(f_bound(&p, 1e-4, 0.3, 0.3, 0.7).is_err());
    }

    #[test]
    fn k_reproduces_apsidal_angle() {
        let rp = RadialProblem::new(PotentialSpec::Logarithmic, 1e-3, 0.0, 0.05).unwrap();
        let aps = rp.apsides(f64::INFINITY).unwrap();
        let direct = apsidal_angle_with(&rp, &aps, &QuadConfig::default()).unwrap();
        let (rm, beta) = (aps.r_minus, aps.beta);
        let q = integrate(
            |n| {
                let rho = n.x;
                let k = k_function(&rp, &aps, 0.0, rho)?;
                Ok(sqrt(k) / (rho * sqrt((n.to_hi * rm) * n.from_lo)))
            },
            1.0,
            beta / rm,
            Endpoint::InvSqrt,
            Endpoint::InvSqrt,
            &QuadConfig::with_rel_tol(1e-9),
        )
        .unwrap();
        assert!((q.value - direct.delta_theta).abs() < 1e-6, "{} vs {}", q.value, direct.delta_theta);
    }

    #[test]
    fn k_has_finite_limit_at_pericentre() {
        let rp = RadialProblem::new(PotentialSpec::Logarithmic, 1e-3, 0.0, 0.05).unwrap();
        let aps = rp.apsides(f64::INFINITY).unwrap();
        let (rm, beta) = (aps.r_minus, aps.beta);
        let df = (rp.f(rm * (1.0 + 1e-7)) - rp.f(rm * (1.0 - 1e-7))) / (2e-7 * rm);
        let expect = (beta - rm) * rp.l * rp.l / (rm * df);
        let k = k_function(&rp, &aps, 0.0, 1.0 + 1e-7).unwrap();
        assert!(expect > 0.0);
        assert!((k - expect).abs() < 1e-4 * expect, "{k} vs {expect}");
    }

    #[test]
    fn vstar_ratio() {
        let sched: Vec<(f64, f64)> = (2..=9).map(|k| (10f64.powi(-k), 10f64.powi(-k))).collect();
        let t = vstar_ratio_limit(&PotentialSpec::Logarithmic, 2.0, &sched).unwrap();
        assert_eq!(t.verdict_against(1.0), Verdict::Holds);
        let t = vstar_ratio_limit(&PotentialSpec::Logarithmic, 1.0, &sched).unwrap();
        assert!(t.values().iter().all(|&v| v == 1.0));
        let sched: Vec<(f64, f64)> = (2..=9).map(|k| (10f64.powi(-k), 10f64.powi(-2 * k))).collect();
        let t = vstar_ratio_limit(&PotentialSpec::Homogeneous { alpha: 0.5 }, 2.0, &sched).unwrap();
        let last = *t.values().last().unwrap();
        assert!((last - 0.5f64.sqrt()).abs() < 1e-9);
        assert_eq!(t.verdict_against(1.0), Verdict::Fails);
    }
}
