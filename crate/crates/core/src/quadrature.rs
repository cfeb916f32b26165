//! Adaptive one-dimensional quadrature.
//!
//! [`gauss_kronrod`] is the workhorse; [`adaptive_simpson`] is an unrelated
//! rule kept around so callers can cross-check a result.

use std::cell::Cell;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

const MAX_DEPTH: u32 = 60;
/// Total bisections allowed per call, so an unreachable tolerance fails instead of stalling.
const MAX_SPLITS: usize = 100_000;

/// A quadrature result and its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = r * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * r, ((kron - gauss) * r).abs())
}

fn gk_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    whole: (f64, f64),
    tol: f64,
    depth: u32,
    budget: &Cell<usize>,
) -> Estimate {
    let (value, error) = whole;
    let m = 0.5 * (a + b);
    if error <= tol || error.is_nan() || depth >= MAX_DEPTH || budget.get() == 0 || m <= a || m >= b {
        return Estimate { value, error };
    }
    budget.set(budget.get() - 1);
    let left = gk15(f, a, m);
    let right = gk15(f, m, b);
    let l = gk_recurse(f, a, m, left, 0.5 * tol, depth + 1, budget);
    let r = gk_recurse(f, m, b, right, 0.5 * tol, depth + 1, budget);
    Estimate {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

/// Maps an integral with one or two infinite limits onto a finite one.
fn finite_form<'a, F: Fn(f64) -> f64 + 'a>(
    f: &'a F,
    a: f64,
    b: f64,
) -> (Box<dyn Fn(f64) -> f64 + 'a>, f64, f64) {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => (Box::new(f), a, b),
        (false, false) => (
            Box::new(move |t: f64| {
                let u = 1.0 - t * t;
                if u <= 0.0 {
                    return 0.0;
                }
                f(t / u) * (1.0 + t * t) / (u * u)
            }),
            -1.0,
            1.0,
        ),
        (true, false) => (
            Box::new(move |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(a + t / u) / (u * u)
            }),
            0.0,
            1.0,
        ),
        (false, true) => (
            Box::new(move |t: f64| {
                if t >= 1.0 {
                    return 0.0;
                }
                let u = 1.0 - t;
                f(b - t / u) / (u * u)
            }),
            0.0,
            1.0,
        ),
    }
}

/// Adaptive Gauss–Kronrod 7/15 quadrature of `f` over `[a, b]`.
///
/// Either limit may be infinite. `tol` is an absolute tolerance on the total
/// error estimate; if the estimate stays above it the call fails with the
/// achieved estimate.
pub fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0 });
    }
    if a > b {
        let e = gauss_kronrod(f, b, a, tol)?;
        return Ok(Estimate { value: -e.value, error: e.error });
    }
    let (g, lo, hi) = finite_form(&f, a, b);
    // pre-split so narrow features are not missed by the first panel
    let pieces = 8;
    let budget = Cell::new(MAX_SPLITS);
    let w = (hi - lo) / pieces as f64;
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for k in 0..pieces {
        let x0 = lo + k as f64 * w;
        let x1 = if k + 1 == pieces { hi } else { x0 + w };
        let first = gk15(&g, x0, x1);
        let e = gk_recurse(&g, x0, x1, first, tol / pieces as f64, 0, &budget);
        total.value += e.value;
        total.error += e.error;
    }
    if !total.value.is_finite() {
        return Err(Error::Quadrature { estimate: f64::INFINITY, tolerance: tol });
    }
    if total.error > tol {
        return Err(Error::Quadrature { estimate: total.error, tolerance: tol });
    }
    Ok(total)
}

fn simpson_recurse<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Estimate {
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth >= 50 || delta.abs() <= 15.0 * tol {
        return Estimate {
            value: left + right + delta / 15.0,
            error: delta.abs() / 15.0,
        };
    }
    let l = simpson_recurse(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth + 1);
    let r = simpson_recurse(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth + 1);
    Estimate {
        value: l.value + r.value,
        error: l.error + r.error,
    }
}

/// Adaptive Simpson quadrature over a finite interval.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::param("adaptive Simpson needs finite limits"));
    }
    let pieces = 16;
    let w = (b - a) / pieces as f64;
    let mut total = Estimate { value: 0.0, error: 0.0 };
    for k in 0..pieces {
        let x0 = a + k as f64 * w;
        let x1 = if k + 1 == pieces { b } else { x0 + w };
        let xm = 0.5 * (x0 + x1);
        let (f0, f1, fm) = (f(x0), f(x1), f(xm));
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        let e = simpson_recurse(&f, x0, f0, x1, f1, xm, fm, whole, tol / pieces as f64, 0);
        total.value += e.value;
        total.error += e.error;
    }
    if !total.value.is_finite() || total.error > tol {
        return Err(Error::Quadrature { estimate: total.error, tolerance: tol });
    }
    Ok(total)
}
