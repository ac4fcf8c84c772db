//! Three-point generalized Richardson extrapolation.
//!
//! The model is `v(w) = L + c w^p` with `p > 0` fitted from the last three
//! points. On geometric schedules with `w = s` this is Aitken's delta-squared
//! process.

use crate::math::{abs, ln, powf};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Abscissa {
    /// `w = s`, for observables that converge like a power of the scale.
    Power,
    /// `w = 1 / ln(1/s)`, for observables that converge logarithmically.
    InverseLog,
}

impl Abscissa {
    pub fn map(self, s: f64) -> f64 {
        match self {
            Abscissa::Power => s,
            Abscissa::InverseLog => 1.0 / ln(1.0 / s),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolant {
    pub limit: f64,
    /// Fitted exponent `p`; NaN when no fit was possible.
    pub exponent: f64,
    /// Difference between the last two values of the series.
    pub last_increment: f64,
    /// All consecutive differences above rounding level share one sign.
    pub monotone: bool,
    /// A model with `p > 0` matched the last three points.
    pub fitted: bool,
}

impl Extrapolant {
    /// The limit agrees with `target` to within ten times the last increment.
    pub fn agrees_with(&self, target: f64) -> bool {
        abs(self.limit - target) <= 10.0 * abs(self.last_increment) + 1e-12 * (1.0 + abs(target))
    }
}

fn ratio_at(p: f64, a: f64, b: f64) -> f64 {
    // ((w1/w2)^p - 1) / (1 - (w3/w2)^p)
    (powf(a, p) - 1.0) / (1.0 - powf(b, p))
}

/// Extrapolates `values` taken at decreasing `scales` to scale zero.
///
/// Returns `None` with fewer than three points or non-positive scales.
pub fn extrapolate(scales: &[f64], values: &[f64], abscissa: Abscissa) -> Option<Extrapolant> {
    let n = scales.len().min(values.len());
    if n < 3 || scales[..n].iter().any(|&s| !(s > 0.0)) {
        return None;
    }
    let w = [
        abscissa.map(scales[n - 3]),
        abscissa.map(scales[n - 2]),
        abscissa.map(scales[n - 1]),
    ];
    let v = [values[n - 3], values[n - 2], values[n - 1]];

    let mut monotone = true;
    let mut sign = 0.0;
    for pair in values[..n].windows(2) {
        let d = pair[1] - pair[0];
        if abs(d) <= 1e-14 * abs(pair[0]) {
            continue;
        }
        let s = if d > 0.0 { 1.0 } else { -1.0 };
        if sign != 0.0 && s != sign {
            monotone = false;
        }
        sign = s;
    }

    let d1 = v[0] - v[1];
    let d2 = v[1] - v[2];
    let fallback = |fitted: bool| Extrapolant {
        limit: v[2],
        exponent: f64::NAN,
        last_increment: -d2,
        monotone,
        fitted,
    };
    if d2 == 0.0 {
        return Some(fallback(d1 == 0.0));
    }
    let rho = d1 / d2;
    if !(w[0] > w[1] && w[1] > w[2] && w[2] > 0.0) || !(rho > 0.0) {
        return Some(fallback(false));
    }

    let a = w[0] / w[1];
    let b = w[2] / w[1];
    let r0 = ln(a) / -ln(b);
    if rho <= r0 {
        return Some(fallback(false));
    }
    let (mut lo, mut hi) = (1e-9, 1.0);
    while ratio_at(hi, a, b) < rho {
        hi *= 2.0;
        if hi > 200.0 {
            return Some(fallback(false));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ratio_at(mid, a, b) < rho {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            break;
        }
    }
    let p = 0.5 * (lo + hi);
    let q = powf(b, p);
    Some(Extrapolant {
        limit: v[2] - d2 * q / (1.0 - q),
        exponent: p,
        last_increment: -d2,
        monotone,
        fitted: true,
    })
}
