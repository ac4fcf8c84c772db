//! Adaptive Gauss–Kronrod quadrature with endpoint substitutions for
//! inverse square root singularities.
//!
//! Integrands receive a [`Node`] that carries the distance to both ends of the
//! original interval, computed without subtracting nearly equal numbers. This
//! is what lets the apsidal and time-of-flight integrands evaluate their
//! radicands accurately right next to a turning point.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, acosh, expm1, ln, powf, sinh, sqrt};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const EPS: f64 = f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_intervals: 2000,
        }
    }
}

impl QuadConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
    pub intervals: usize,
}

impl Quadrature {
    const ZERO: Self = Self {
        value: 0.0,
        error: 0.0,
        evaluations: 0,
        intervals: 0,
    };

    fn add(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error: self.error + other.error,
            evaluations: self.evaluations + other.evaluations,
            intervals: self.intervals + other.intervals,
        }
    }
}

/// A quadrature point of the original interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Node {
    pub x: f64,
    /// `x - lo`, accurate even when tiny.
    pub from_lo: f64,
    /// `hi - x`, accurate even when tiny.
    pub to_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Regular,
    /// The integrand behaves like `(distance to the endpoint)^(-1/2)`.
    InvSqrt,
}

struct Rule {
    result: f64,
    error: f64,
    resabs: f64,
}

fn gk15<F: FnMut(f64) -> Result<f64>>(f: &mut F, a: f64, b: f64) -> Result<Rule> {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let dhlgth = abs(hlgth);

    let fc = f(centr)?;
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = abs(resk);
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..3 {
        let jtw = 2 * j + 1;
        let absc = hlgth * XGK[jtw];
        let f1 = f(centr - absc)?;
        let f2 = f(centr + absc)?;
        fv1[jtw] = f1;
        fv2[jtw] = f2;
        resg += WG[j] * (f1 + f2);
        resk += WGK[jtw] * (f1 + f2);
        resabs += WGK[jtw] * (abs(f1) + abs(f2));
    }
    for j in 0..4 {
        let jtwm1 = 2 * j;
        let absc = hlgth * XGK[jtwm1];
        let f1 = f(centr - absc)?;
        let f2 = f(centr + absc)?;
        fv1[jtwm1] = f1;
        fv2[jtwm1] = f2;
        resk += WGK[jtwm1] * (f1 + f2);
        resabs += WGK[jtwm1] * (abs(f1) + abs(f2));
    }

    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * abs(fc - reskh);
    for j in 0..7 {
        resasc += WGK[j] * (abs(fv1[j] - reskh) + abs(fv2[j] - reskh));
    }

    let result = resk * hlgth;
    resabs *= dhlgth;
    resasc *= dhlgth;
    let mut error = abs((resk - resg) * hlgth);
    if resasc != 0.0 && error != 0.0 {
        error = resasc * f64::min(1.0, powf(200.0 * error / resasc, 1.5));
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * EPS) {
        error = f64::max(50.0 * EPS * resabs, error);
    }
    if !result.is_finite() || !error.is_finite() {
        return Err(Error::NonFinite("quadrature"));
    }
    Ok(Rule {
        result,
        error,
        resabs,
    })
}

/// Fixed 7-point Gauss–Legendre rule on `[a, b]`.
pub fn gauss7<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let centr = 0.5 * (a + b);
    let hlgth = 0.5 * (b - a);
    let mut sum = WG[3] * f(centr);
    for j in 0..3 {
        let absc = hlgth * XGK[2 * j + 1];
        sum += WG[j] * (f(centr - absc) + f(centr + absc));
    }
    sum * hlgth
}

struct Segment {
    a: f64,
    b: f64,
    result: f64,
    error: f64,
}

/// Globally adaptive G7K15 quadrature of a regular integrand on `[a, b]`.
pub fn gauss_kronrod<F: FnMut(f64) -> Result<f64>>(
    mut f: F,
    a: f64,
    b: f64,
    cfg: &QuadConfig,
) -> Result<Quadrature> {
    adapt(&mut f, a, b, cfg.rel_tol, cfg.abs_tol, cfg.max_intervals)
}

fn adapt<F: FnMut(f64) -> Result<f64>>(
    f: &mut F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> Result<Quadrature> {
    if a == b {
        return Ok(Quadrature::ZERO);
    }
    let first = gk15(f, a, b)?;
    let resabs = first.resabs;
    let mut segs = Vec::with_capacity(64);
    segs.push(Segment {
        a,
        b,
        result: first.result,
        error: first.error,
    });
    let mut evaluations = 15;

    loop {
        let total: f64 = segs.iter().map(|s| s.result).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let tol = f64::max(abs_tol, rel_tol * abs(total)).max(50.0 * EPS * resabs);
        if err <= tol {
            return Ok(Quadrature {
                value: total,
                error: err,
                evaluations,
                intervals: segs.len(),
            });
        }
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (sa, sb) = (segs[worst].a, segs[worst].b);
        let mid = 0.5 * (sa + sb);
        if segs.len() >= max_intervals || mid <= sa.min(sb) || mid >= sa.max(sb) {
            return Err(Error::QuadratureNotConverged {
                estimate: total,
                error: err,
            });
        }
        let left = gk15(f, sa, mid)?;
        let right = gk15(f, mid, sb)?;
        evaluations += 30;
        segs[worst] = Segment {
            a: sa,
            b: mid,
            result: left.result,
            error: left.error,
        };
        segs.push(Segment {
            a: mid,
            b: sb,
            result: right.result,
            error: right.error,
        });
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    /// `x = u` on `[a, b]`.
    Linear { a: f64, b: f64 },
    /// `x = c e^u`, `u` in `[0, ln(b / c)]`.
    Log { c: f64, b: f64 },
    /// `x = lo + s^2`.
    SqrtLo { b: f64 },
    /// `x = lo cosh^2 w`, requires `lo > 0`.
    SinhLo { b: f64 },
    /// `x = hi - s^2`.
    SqrtHi { a: f64 },
}

impl Map {
    fn range(&self, lo: f64, hi: f64) -> (f64, f64) {
        match *self {
            Map::Linear { a, b } => (a, b),
            Map::Log { c, b } => (0.0, ln(b / c)),
            Map::SqrtLo { b } => (0.0, sqrt(b - lo)),
            Map::SinhLo { b } => (0.0, acosh(sqrt(b / lo))),
            Map::SqrtHi { a } => (0.0, sqrt(hi - a)),
        }
    }

    /// Returns the node and the Jacobian `dx/du`.
    fn node(&self, u: f64, lo: f64, hi: f64) -> (Node, f64) {
        let width = hi - lo;
        match *self {
            Map::Linear { .. } => (
                Node {
                    x: u,
                    from_lo: u - lo,
                    to_hi: hi - u,
                },
                1.0,
            ),
            Map::Log { c, .. } => {
                let x = c * crate::math::exp(u);
                (
                    Node {
                        x,
                        from_lo: (c - lo) + c * expm1(u),
                        to_hi: hi - x,
                    },
                    x,
                )
            }
            Map::SqrtLo { .. } => {
                let d = u * u;
                (
                    Node {
                        x: lo + d,
                        from_lo: d,
                        to_hi: width - d,
                    },
                    2.0 * u,
                )
            }
            Map::SinhLo { .. } => {
                let sh = sinh(u);
                let d = lo * sh * sh;
                let ch = sqrt(1.0 + sh * sh);
                (
                    Node {
                        x: lo + d,
                        from_lo: d,
                        to_hi: width - d,
                    },
                    2.0 * lo * sh * ch,
                )
            }
            Map::SqrtHi { .. } => {
                let d = u * u;
                (
                    Node {
                        x: hi - d,
                        from_lo: width - d,
                        to_hi: d,
                    },
                    2.0 * u,
                )
            }
        }
    }
}

fn regular_pieces(a: f64, b: f64, out: &mut Vec<Map>) {
    if a > 0.0 && b > 4.0 * a {
        out.push(Map::Log { c: a, b });
    } else {
        out.push(Map::Linear { a, b });
    }
}

fn lower_singular_pieces(lo: f64, b: f64, out: &mut Vec<Map>) {
    if lo > 0.0 {
        out.push(Map::SinhLo { b });
    } else {
        out.push(Map::SqrtLo { b });
    }
}

fn upper_singular_pieces(a: f64, hi: f64, out: &mut Vec<Map>) {
    if a == 0.0 || hi > 4.0 * a {
        let c = 0.5 * hi;
        regular_pieces(a, c, out);
        out.push(Map::SqrtHi { a: c });
    } else {
        out.push(Map::SqrtHi { a });
    }
}

/// Integrates `f` over `[lo, hi]`, removing inverse square root endpoint
/// singularities by substitution and resolving wide ranges on a log scale.
///
/// The integrand is never evaluated at either endpoint.
pub fn integrate<F: FnMut(Node) -> Result<f64>>(
    mut f: F,
    lo: f64,
    hi: f64,
    lo_end: Endpoint,
    hi_end: Endpoint,
    cfg: &QuadConfig,
) -> Result<Quadrature> {
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain {
            what: "quadrature interval",
            value: if lo.is_finite() { hi } else { lo },
        });
    }
    if lo > hi {
        return Err(Error::Domain {
            what: "quadrature interval lower end",
            value: lo,
        });
    }
    if lo == hi {
        return Ok(Quadrature::ZERO);
    }

    let mut maps = Vec::with_capacity(4);
    match (lo_end, hi_end) {
        (Endpoint::Regular, Endpoint::Regular) => regular_pieces(lo, hi, &mut maps),
        (Endpoint::InvSqrt, Endpoint::Regular) => lower_singular_pieces(lo, hi, &mut maps),
        (Endpoint::Regular, Endpoint::InvSqrt) => upper_singular_pieces(lo, hi, &mut maps),
        (Endpoint::InvSqrt, Endpoint::InvSqrt) => {
            let c = if lo > 0.0 && hi > 4.0 * lo {
                sqrt(lo * hi)
            } else {
                0.5 * (lo + hi)
            };
            lower_singular_pieces(lo, c, &mut maps);
            upper_singular_pieces(c, hi, &mut maps);
        }
    }

    let share = cfg.abs_tol / maps.len() as f64;
    let mut total = Quadrature::ZERO;
    for map in maps {
        let (u0, u1) = map.range(lo, hi);
        let mut g = |u: f64| -> Result<f64> {
            let (node, jac) = map.node(u, lo, hi);
            Ok(f(node)? * jac)
        };
        let piece = adapt(&mut g, u0, u1, cfg.rel_tol, share, cfg.max_intervals)?;
        total = total.add(piece);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronrod_weights_sum_to_two() {
        let s: f64 = 2.0 * WGK[..7].iter().sum::<f64>() + WGK[7];
        assert!((s - 2.0).abs() < 1e-15);
        let g: f64 = 2.0 * WG[..3].iter().sum::<f64>() + WG[3];
        assert!((g - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gauss7_is_exact_to_degree_13() {
        for n in 0..=13 {
            let v = gauss7(|x| x.powi(n), 0.0, 1.0);
            assert!((v - 1.0 / (n as f64 + 1.0)).abs() < 1e-14, "degree {n}");
        }
    }

    #[test]
    fn kronrod_is_exact_to_degree_22() {
        let mut f = |x: f64| Ok(x.powi(22));
        let r = gk15(&mut f, -1.0, 1.0).unwrap();
        assert!((r.result - 2.0 / 23.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let cfg = QuadConfig::default();
        let q = gauss_kronrod(|x| Ok(1.0 / (1e-6 + x * x)), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-3).atan() / 1e-3;
        assert!(((q.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn inverse_sqrt_endpoints() {
        let cfg = QuadConfig::default();
        // integral over [0, 1] of 1/sqrt(x (1 - x)) is pi
        let q = integrate(
            |n| Ok(1.0 / (n.from_lo * n.to_hi).sqrt()),
            0.0,
            1.0,
            Endpoint::InvSqrt,
            Endpoint::InvSqrt,
            &cfg,
        )
        .unwrap();
        assert!((q.value - core::f64::consts::PI).abs() < 1e-10);
    }

    #[test]
    fn nodes_never_touch_endpoints() {
        let cfg = QuadConfig::default();
        integrate(
            |n| {
                assert!(n.from_lo > 0.0 && n.to_hi > 0.0);
                Ok(1.0 / n.from_lo.sqrt())
            },
            2.0,
            3.0,
            Endpoint::InvSqrt,
            Endpoint::Regular,
            &cfg,
        )
        .unwrap();
    }

    #[test]
    fn log_scale_regular_piece() {
        let cfg = QuadConfig::default();
        let q = integrate(|n| Ok(1.0 / n.x), 1e-9, 1e3, Endpoint::Regular, Endpoint::Regular, &cfg)
            .unwrap();
        assert!((q.value - (1e12f64).ln()).abs() < 1e-9);
    }
}
