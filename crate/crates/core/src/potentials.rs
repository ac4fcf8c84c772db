//! Potential families, their smoothings, and numerical membership checks for
//! the classes of weakly singular potentials.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::extrapolate::{extrapolate, Abscissa};
use crate::math::{abs, expm1, ln, ln_1p, powf};
use crate::roots::{bisect, geometric_grid};
use crate::table::{ConvergenceTable, SchedulePoint, Verdict};

pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A potential given by closures for `V`, `V'` and `V''`.
#[derive(Clone)]
pub struct UserPotential {
    pub name: String,
    pub value: ScalarFn,
    pub d1: ScalarFn,
    pub d2: ScalarFn,
}

impl fmt::Debug for UserPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UserPotential").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub enum PotentialSpec {
    /// `V(x) = -ln x`.
    Logarithmic,
    /// `V(x) = x^(-alpha)`.
    Homogeneous { alpha: f64 },
    User(UserPotential),
}

impl PotentialSpec {
    pub fn homogeneous(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::Domain {
                what: "homogeneous exponent",
                value: alpha,
            });
        }
        Ok(PotentialSpec::Homogeneous { alpha })
    }

    pub fn user(
        name: impl Into<String>,
        value: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        PotentialSpec::User(UserPotential {
            name: name.into(),
            value: Arc::new(value),
            d1: Arc::new(d1),
            d2: Arc::new(d2),
        })
    }

    pub fn name(&self) -> String {
        match self {
            PotentialSpec::Logarithmic => String::from("logarithmic"),
            PotentialSpec::Homogeneous { alpha } => format!("homogeneous(alpha={alpha})"),
            PotentialSpec::User(u) => u.name.clone(),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Logarithmic => -ln(x),
            PotentialSpec::Homogeneous { alpha } => powf(x, -alpha),
            PotentialSpec::User(u) => (u.value)(x),
        }
    }

    pub fn d1(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Logarithmic => -1.0 / x,
            PotentialSpec::Homogeneous { alpha } => -alpha * powf(x, -alpha - 1.0),
            PotentialSpec::User(u) => (u.d1)(x),
        }
    }

    pub fn d2(&self, x: f64) -> f64 {
        match self {
            PotentialSpec::Logarithmic => 1.0 / (x * x),
            PotentialSpec::Homogeneous { alpha } => alpha * (alpha + 1.0) * powf(x, -alpha - 2.0),
            PotentialSpec::User(u) => (u.d2)(x),
        }
    }

    /// `V(base + delta) - V(base)` without cancellation for small `delta`.
    pub fn increment(&self, base: f64, delta: f64) -> f64 {
        match self {
            PotentialSpec::Logarithmic => -ln_1p(delta / base),
            PotentialSpec::Homogeneous { alpha } => {
                powf(base, -alpha) * expm1(-alpha * ln_1p(delta / base))
            }
            PotentialSpec::User(u) => {
                if abs(delta) < 1e-6 * abs(base) {
                    delta * ((u.d1)(base) + 0.5 * delta * (u.d2)(base))
                } else {
                    (u.value)(base + delta) - (u.value)(base)
                }
            }
        }
    }
}

/// `V_eps(x) = V(sqrt(x^2 + eps^2))`; `eps = 0` is the singular potential.
#[derive(Debug, Clone)]
pub struct SmoothedPotential {
    pub base: PotentialSpec,
    pub epsilon: f64,
}

impl SmoothedPotential {
    pub fn new(base: PotentialSpec, epsilon: f64) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(Error::Domain {
                what: "smoothing parameter",
                value: epsilon,
            });
        }
        Ok(Self { base, epsilon })
    }

    pub fn singular(base: PotentialSpec) -> Self {
        Self { base, epsilon: 0.0 }
    }

    #[inline]
    fn rho(&self, x: f64) -> f64 {
        if self.epsilon == 0.0 {
            abs(x)
        } else {
            crate::math::hypot(x, self.epsilon)
        }
    }

    /// Checked evaluation; the singular potential is undefined at 0.
    pub fn smoothed_eval(&self, x: f64) -> Result<f64> {
        if !x.is_finite() || (self.epsilon == 0.0 && x == 0.0) {
            return Err(Error::Domain {
                what: "potential argument",
                value: x,
            });
        }
        Ok(self.value(x))
    }

    pub fn value(&self, x: f64) -> f64 {
        match self.base {
            PotentialSpec::Logarithmic if self.epsilon > 0.0 => {
                -0.5 * ln(x * x + self.epsilon * self.epsilon)
            }
            PotentialSpec::Homogeneous { alpha } if self.epsilon > 0.0 => {
                powf(x * x + self.epsilon * self.epsilon, -0.5 * alpha)
            }
            _ => self.base.eval(self.rho(x)),
        }
    }

    /// `d/dx V_eps(x)`.
    pub fn d1(&self, x: f64) -> f64 {
        self.force_factor(x) * x
    }

    /// `V'(rho) / rho` with `rho = sqrt(x^2 + eps^2)`; the acceleration of
    /// a particle at position `q` is this factor times `q`.
    pub fn force_factor(&self, x: f64) -> f64 {
        let e2 = self.epsilon * self.epsilon;
        match self.base {
            PotentialSpec::Logarithmic => -1.0 / (x * x + e2),
            PotentialSpec::Homogeneous { alpha } => -alpha * powf(x * x + e2, -0.5 * alpha - 1.0),
            PotentialSpec::User(_) => {
                let r = self.rho(x);
                self.base.d1(r) / r
            }
        }
    }

    /// `V_eps(base + delta) - V_eps(base)` for `base > 0`, accurate for small
    /// `delta`.
    pub fn increment(&self, base: f64, delta: f64) -> f64 {
        let r0 = self.rho(base);
        let r1 = self.rho(base + delta);
        let d_rho = delta * (2.0 * base + delta) / (r0 + r1);
        self.base.increment(r0, d_rho)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    /// `V -> +inf` at 0.
    Diverges,
    /// `V' < 0 < V''` near 0.
    Convex,
    /// `V'/V''` strictly decreasing near 0.
    RatioDecreasing,
    /// `(V'/V'')'(0+) < -1/2`.
    SlopeBelowHalf,
}

impl Property {
    pub fn label(self) -> &'static str {
        match self {
            Property::Diverges => "i",
            Property::Convex => "ii",
            Property::RatioDecreasing => "iii",
            Property::SlopeBelowHalf => "iv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassCheckConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points_per_decade: usize,
    /// Relative step of the central differences for `(V'/V'')'`.
    pub fd_rel_step: f64,
    /// Margin below which the slope test counts as failed.
    pub limit_tol: f64,
    /// Relative tolerance for sign tests on `V'/V'' + x/2`.
    pub deriv_tol: f64,
}

impl Default for ClassCheckConfig {
    fn default() -> Self {
        Self {
            x_min: 1e-8,
            x_max: 1e6,
            points_per_decade: 100,
            fd_rel_step: 1e-5,
            limit_tol: 1e-6,
            deriv_tol: 1e-10,
        }
    }
}

impl ClassCheckConfig {
    /// Probe grid, strictly decreasing toward 0.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.x_min > 0.0 && self.x_max > self.x_min) {
            return Err(Error::InvalidParameter(format!(
                "probe grid needs 0 < x_min < x_max, got [{}, {}]",
                self.x_min, self.x_max
            )));
        }
        let decades = ln(self.x_max / self.x_min) / core::f64::consts::LN_10;
        let n = ((decades * self.points_per_decade as f64) as usize + 1).max(64);
        let mut g = geometric_grid(self.x_min, self.x_max, n);
        g.reverse();
        Ok(g)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    pub in_v: bool,
    pub divergence: Verdict,
    pub convexity: Verdict,
    pub ratio_decreasing: Verdict,
    pub slope: Verdict,
    /// Estimated `(V'/V'')'(0+)` and its error.
    pub slope_limit: f64,
    pub slope_error: f64,
    /// Largest probed radius up to which ii and iii hold.
    pub s_est: f64,
    /// Largest radius below which `V'/V'' + x/2 < 0`.
    pub t_est: f64,
    pub r_bar: f64,
    pub witness: Option<(Property, f64)>,
}

fn ratio(p: &PotentialSpec, x: f64) -> f64 {
    p.d1(x) / p.d2(x)
}

/// Numerical membership test for the class of weakly singular potentials.
pub fn check_class_v(p: &PotentialSpec, cfg: &ClassCheckConfig) -> Result<ClassReport> {
    let mut xs = cfg.grid()?;
    xs.reverse();
    let x0 = xs[0];

    // i: increments per decade at the finest decades must not die out.
    let decade = |x: f64| p.eval(x) - p.eval(10.0 * x);
    let (inc_last, inc_prev) = (decade(x0), decade(10.0 * x0));
    let divergence = if !(inc_last.is_finite() && inc_prev.is_finite()) {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(inc_last > 0.0 && inc_prev > 0.0 && inc_last >= 0.5 * inc_prev)
    };

    // ii and iii, scanning outward from the origin.
    let mut s_est = f64::INFINITY;
    let mut first_bad: Option<Property> = None;
    let mut prev_ratio = f64::NAN;
    for (k, &x) in xs.iter().enumerate() {
        let (d1, d2) = (p.d1(x), p.d2(x));
        let convex = d1 < 0.0 && d2 > 0.0;
        let g = d1 / d2;
        let decreasing = k == 0 || g < prev_ratio;
        if !convex || !decreasing {
            s_est = x;
            if k == 0 || (k == 1 && !decreasing) {
                first_bad = Some(if convex {
                    Property::RatioDecreasing
                } else {
                    Property::Convex
                });
            }
            break;
        }
        prev_ratio = g;
    }
    let convexity = Verdict::from_bool(first_bad != Some(Property::Convex));
    let ratio_decreasing = Verdict::from_bool(first_bad.is_none());

    // iv: one-sided slope of V'/V'' at 0 by Richardson on central differences.
    let dg = |x: f64, h: f64| (ratio(p, x + h) - ratio(p, x - h)) / (2.0 * h);
    let probes = [4.0 * x0, 2.0 * x0, x0];
    let vals: Vec<f64> = probes.iter().map(|&x| dg(x, cfg.fd_rel_step * x)).collect();
    let fd_err = abs(vals[2] - dg(x0, 0.5 * cfg.fd_rel_step * x0));
    let (slope_limit, extrap_err) = match extrapolate(&probes, &vals, Abscissa::Power) {
        Some(e) if e.fitted && e.limit.is_finite() => (e.limit, abs(e.limit - vals[2])),
        _ => (vals[2], abs(vals[2] - vals[1])),
    };
    let slope_error = fd_err + extrap_err;
    let margin = -0.5 - slope_limit;
    let slope = if !slope_limit.is_finite() || (slope_error > abs(margin) && abs(margin) > cfg.limit_tol) {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(margin > cfg.limit_tol)
    };

    // T: first sign change of V'/V'' + x/2 by doubling then bisection.
    let h = |x: f64| ratio(p, x) + 0.5 * x + cfg.deriv_tol * x;
    let t_est = if !(h(x0) < 0.0) {
        0.0
    } else {
        let mut x = x0;
        loop {
            let next = 2.0 * x;
            if next > cfg.x_max {
                break f64::INFINITY;
            }
            if !(h(next) < 0.0) {
                break bisect(h, x, next);
            }
            x = next;
        }
    };

    let witness = if !divergence.holds() {
        Some((Property::Diverges, x0))
    } else if let Some(prop) = first_bad {
        Some((prop, x0))
    } else if !slope.holds() {
        Some((Property::SlopeBelowHalf, x0))
    } else {
        None
    };

    Ok(ClassReport {
        in_v: witness.is_none(),
        divergence,
        convexity,
        ratio_decreasing,
        slope,
        slope_limit,
        slope_error,
        s_est,
        t_est,
        r_bar: s_est.min(t_est),
        witness,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct VstarConfig {
    /// Scales `lambda`, decreasing toward 0.
    pub lambdas: Vec<f64>,
    /// Upper end of the ratio interval `[1, M]`.
    pub m: f64,
    pub x_points: usize,
    /// Tolerance on the extrapolated supremum.
    pub tol: f64,
}

impl Default for VstarConfig {
    fn default() -> Self {
        Self {
            lambdas: (2..=12).map(crate::math::decade).collect(),
            m: 10.0,
            x_points: 201,
            tol: 1e-3,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VstarReport {
    pub verdict: Verdict,
    /// `sup |V(lambda x)/V(lambda) - 1|` over `x` in `[1, M]` per `lambda`.
    pub table: ConvergenceTable,
    pub limit: f64,
}

/// Checks the slowly varying condition `V(lambda x)/V(lambda) -> 1`.
pub fn check_class_vstar(
    p: &PotentialSpec,
    cfg: &VstarConfig,
    class_cfg: &ClassCheckConfig,
) -> Result<VstarReport> {
    let report = check_class_v(p, class_cfg)?;
    if let Some((prop, _)) = report.witness {
        return Err(Error::NotInClassV(prop.label()));
    }
    if cfg.lambdas.len() < 3 || cfg.lambdas.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(String::from(
            "lambda schedule must have at least three strictly decreasing entries",
        )));
    }
    if !(cfg.m > 1.0) {
        return Err(Error::Domain {
            what: "ratio interval end M",
            value: cfg.m,
        });
    }
    let xs = geometric_grid(1.0, cfg.m, cfg.x_points.max(2));
    let mut table = ConvergenceTable::new("vstar_sup", Abscissa::InverseLog);
    for (k, &lambda) in cfg.lambdas.iter().enumerate() {
        let base = p.eval(lambda);
        let sup = xs
            .iter()
            .map(|&x| abs(p.eval(lambda * x) / base - 1.0))
            .fold(0.0, f64::max);
        table.push(SchedulePoint {
            k,
            scale: lambda,
            epsilon: 0.0,
            l: 0.0,
            value: sup,
        });
    }

    let values = table.values();
    let flat = |a: f64, b: f64| abs(a - b) <= 1e-12 * (1.0 + abs(a));
    let increasing = values.windows(2).any(|w| w[1] > w[0] && !flat(w[0], w[1]));
    let n = values.len();
    let limit = if flat(values[n - 2], values[n - 1]) {
        values[n - 1]
    } else {
        match table.extrapolate() {
            Some(e) if e.fitted => e.limit,
            _ => values[n - 1],
        }
    };
    let verdict = if increasing || !limit.is_finite() {
        Verdict::Inconclusive
    } else {
        Verdict::from_bool(abs(limit) <= cfg.tol)
    };
    Ok(VstarReport {
        verdict,
        table,
        limit,
    })
}

/// Heuristic check that `x^2 V(x) -> 0` as `x -> 0` along a grid that is
/// strictly decreasing toward 0.
pub fn weak_type_check(p: &PotentialSpec, grid: &[f64], tol: f64) -> Verdict {
    if grid.len() < 3 || grid.windows(2).any(|w| !(w[1] < w[0] && w[1] > 0.0)) {
        return Verdict::Inconclusive;
    }
    let x_min = grid[grid.len() - 1];
    let w: Vec<f64> = grid
        .iter()
        .filter(|&&x| x <= 10.0 * x_min)
        .map(|&x| x * x * p.eval(x))
        .collect();
    if w.len() < 2 || w.iter().any(|v| !v.is_finite()) {
        return Verdict::Inconclusive;
    }
    let last = w[w.len() - 1];
    let first = w[0];
    let slack = 1e-9 * abs(first);
    if abs(last) < tol {
        return Verdict::Holds;
    }
    if last >= first - slack {
        return Verdict::Fails;
    }
    // Decreasing but not yet small, or oscillating: the grid cannot decide.
    Verdict::Inconclusive
}

/// Default grid for [`weak_type_check`]: from 1 down to `1e-8`.
pub fn weak_type_grid() -> Vec<f64> {
    let mut g = geometric_grid(1e-8, 1.0, 801);
    g.reverse();
    g
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hom(a: f64) -> PotentialSpec {
        PotentialSpec::homogeneous(a).unwrap()
    }

    #[test]
    fn log_ratio_is_minus_x() {
        let p = PotentialSpec::Logarithmic;
        for &x in &[1e-6, 0.3, 7.0] {
            assert!((ratio(&p, x) + x).abs() <= 1e-15 * x);
        }
    }

    #[test]
    fn smoothed_log_closed_form() {
        let v = SmoothedPotential::new(PotentialSpec::Logarithmic, 0.1).unwrap();
        assert!((v.value(0.0) - (10f64).ln()).abs() < 1e-14);
        let x: f64 = 0.3;
        let expect = -0.5 * (x * x + 0.01).ln();
        assert!((v.value(x) - expect).abs() < 1e-15);
    }

    #[test]
    fn smoothed_eval_domain() {
        let v = SmoothedPotential::singular(PotentialSpec::Logarithmic);
        assert!(matches!(v.smoothed_eval(0.0), Err(Error::Domain { .. })));
        let w = SmoothedPotential::new(PotentialSpec::Logarithmic, 1e-3).unwrap();
        assert!(w.smoothed_eval(0.0).is_ok());
    }

    #[test]
    fn increment_matches_subtraction() {
        for p in [PotentialSpec::Logarithmic, hom(0.5), hom(1.0)] {
            for eps in [0.0, 1e-3, 0.5] {
                let v = SmoothedPotential::new(p.clone(), eps).unwrap();
                let (b, d) = (0.7, 0.2);
                let direct = v.value(b + d) - v.value(b);
                assert!((v.increment(b, d) - direct).abs() < 1e-14);
                let tiny = v.increment(b, 1e-12);
                assert!((tiny / 1e-12 - v.d1(b)).abs() < 1e-6 * v.d1(b).abs());
            }
        }
    }

    #[test]
    fn class_v_log() {
        let r = check_class_v(&PotentialSpec::Logarithmic, &ClassCheckConfig::default()).unwrap();
        assert!(r.in_v);
        assert!((r.slope_limit + 1.0).abs() < 1e-8);
        assert!(r.s_est.is_infinite() && r.t_est.is_infinite());
    }

    #[test]
    fn class_v_homogeneous() {
        let cfg = ClassCheckConfig::default();
        let r = check_class_v(&hom(0.5), &cfg).unwrap();
        assert!(r.in_v);
        assert!((r.slope_limit + 2.0 / 3.0).abs() < 1e-8);
        let r = check_class_v(&hom(1.0), &cfg).unwrap();
        assert!(!r.in_v);
        assert_eq!(r.witness.map(|w| w.0), Some(Property::SlopeBelowHalf));
    }

    #[test]
    fn constant_potential_is_rejected() {
        let p = PotentialSpec::user("constant", |_| 1.0, |_| 0.0, |_| 0.0);
        let r = check_class_v(&p, &ClassCheckConfig::default()).unwrap();
        assert!(!r.in_v);
        assert_eq!(r.witness.map(|w| w.0), Some(Property::Diverges));
        let err = check_class_vstar(&p, &VstarConfig::default(), &ClassCheckConfig::default());
        assert!(matches!(err, Err(Error::NotInClassV(_))));
    }

    #[test]
    fn vstar_log_and_homogeneous() {
        let cc = ClassCheckConfig::default();
        let vc = VstarConfig::default();
        let r = check_class_vstar(&PotentialSpec::Logarithmic, &vc, &cc).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        let r = check_class_vstar(&hom(0.5), &vc, &cc).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }

    #[test]
    fn weak_type() {
        let g = weak_type_grid();
        assert_eq!(weak_type_check(&PotentialSpec::Logarithmic, &g, 1e-6), Verdict::Holds);
        assert_eq!(weak_type_check(&hom(0.5), &g, 1e-6), Verdict::Holds);
        assert_eq!(weak_type_check(&hom(2.0), &g, 1e-6), Verdict::Fails);
        assert_eq!(weak_type_check(&hom(1.0), &[1.0, 2.0, 3.0], 1e-6), Verdict::Inconclusive);
    }
}
