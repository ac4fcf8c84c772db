pub(crate) use libm::{atan2, cos, exp, expm1, log as ln, log1p as ln_1p, pow as powf, sin, sqrt};

pub(crate) const PI: f64 = core::f64::consts::PI;

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

#[inline]
pub(crate) fn hypot(x: f64, y: f64) -> f64 {
    libm::hypot(x, y)
}

#[inline]
pub(crate) fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

#[inline]
pub(crate) fn acosh(x: f64) -> f64 {
    libm::acosh(x)
}

/// `10^-k`, correctly rounded for integer `k` (`powf` is off by an ulp for
/// some decades).
pub fn decade(k: i32) -> f64 {
    let mut p = 1.0f64;
    for _ in 0..k.unsigned_abs() {
        p *= 10.0;
    }
    if k >= 0 {
        1.0 / p
    } else {
        p
    }
}
