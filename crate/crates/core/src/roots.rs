//! Bracketing and bisection.

use alloc::vec::Vec;

use crate::math::{exp, ln};

/// `n` points spaced geometrically from `lo` to `hi`, both included.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    let (a, b) = (ln(lo), ln(hi));
    let mut out: Vec<f64> = (0..n)
        .map(|i| exp(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect();
    out[0] = lo;
    out[n - 1] = hi;
    out
}

/// Bisection on a bracket `[a, b]` whose ends have opposite signs of `g`.
///
/// Runs until the midpoint coincides with one of the ends, so the result is
/// within one ulp of a sign change of `g`.
pub fn bisect<G: FnMut(f64) -> f64>(mut g: G, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    if ga == 0.0 {
        return a;
    }
    for _ in 0..2100 {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Bisection that stops once the bracket is shorter than `tol`.
pub fn bisect_to<G: FnMut(f64) -> f64>(mut g: G, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut ga = g(a);
    while (b - a).abs() > tol {
        let m = 0.5 * (a + b);
        if m <= a.min(b) || m >= a.max(b) {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if (gm < 0.0) == (ga < 0.0) {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Golden-section search for a maximum of a unimodal `g` on `[a, b]`.
pub fn golden_max<G: FnMut(f64) -> f64>(mut g: G, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = 0.618_033_988_749_894_9;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (a.abs() + b.abs()) {
            break;
        }
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + phi * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}
