//! Classical quadratic Liénard oscillators `ẍ + f(x)ẋ² + g(x) = 0`.

use serde::{Deserialize, Serialize};

use crate::catalog::{make_system, SystemId};
use crate::error::{Error, Result};
use crate::quadrature::gauss_kronrod;

/// Liénard data of one of the two isochronous catalog systems.
///
/// `λ = 0` is accepted and gives the linear oscillator `f = 0`, `g = ω₀²x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LienardSystem {
    pub id: SystemId,
    pub lambda: f64,
    pub omega0: f64,
}

pub fn make_lienard(id: SystemId, lambda: f64, omega0: f64) -> Result<LienardSystem> {
    if !matches!(id, SystemId::ExpOscillator | SystemId::NonPolyOscillator) {
        return Err(Error::param(format!("no Liénard form for `{}`", id.name())));
    }
    if !(omega0 > 0.0 && omega0.is_finite()) || !lambda.is_finite() {
        return Err(Error::param("omega0 must be positive and lambda finite"));
    }
    Ok(LienardSystem { id, lambda, omega0 })
}

impl LienardSystem {
    pub fn f(&self, x: f64) -> f64 {
        match self.id {
            SystemId::ExpOscillator => self.lambda,
            _ => -2.0 * self.lambda / (1.0 + self.lambda * x),
        }
    }

    pub fn g(&self, x: f64) -> f64 {
        let (l, w2) = (self.lambda, self.omega0 * self.omega0);
        match self.id {
            SystemId::ExpOscillator if l == 0.0 => w2 * x,
            SystemId::ExpOscillator => -w2 / l * (-l * x).exp_m1(),
            _ => w2 * x * (1.0 + l * x),
        }
    }

    pub fn gprime(&self, x: f64) -> f64 {
        let (l, w2) = (self.lambda, self.omega0 * self.omega0);
        match self.id {
            SystemId::ExpOscillator => w2 * (-l * x).exp(),
            _ => w2 * (1.0 + 2.0 * l * x),
        }
    }

    /// `g′ + fg − ω₀²`, identically zero for an isochronous system.
    pub fn isochronicity_defect(&self, x: f64) -> f64 {
        self.gprime(x) + self.f(x) * self.g(x) - self.omega0 * self.omega0
    }

    pub fn accel(&self, x: f64, v: f64) -> f64 {
        -self.f(x) * v * v - self.g(x)
    }

    pub fn in_region(&self, x: f64) -> bool {
        match self.id {
            SystemId::NonPolyOscillator => 1.0 + self.lambda * x > 0.0,
            _ => x.is_finite(),
        }
    }

    /// `H = m(x)ẋ²/2 + V(x)` with the catalog mass and potential.
    pub fn energy(&self, x: f64, v: f64) -> f64 {
        if self.lambda == 0.0 {
            return 0.5 * v * v + 0.5 * self.omega0 * self.omega0 * x * x;
        }
        let sys = make_system(self.id, self.lambda, self.omega0, 1.0).expect("validated in make_lienard");
        0.5 * sys.mass(x) * v * v + sys.potential(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Escape thresholds on `|x|` and `|ẋ|`.
    pub x_bound: f64,
    pub v_bound: f64,
    /// Take fixed steps of this size instead of adapting.
    pub fixed_step: Option<f64>,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rtol: 1e-12,
            atol: 1e-14,
            h_min: 1e-14,
            h_max: f64::INFINITY,
            max_steps: 5_000_000,
            x_bound: 1e8,
            v_bound: 1e12,
            fixed_step: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub t: Vec<f64>,
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
}

impl Trajectory {
    fn push(&mut self, t: f64, x: f64, v: f64, a: f64) {
        self.t.push(t);
        self.x.push(x);
        self.v.push(v);
        self.a.push(a);
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Cubic Hermite interpolation of `(x, ẋ)` between accepted steps.
    pub fn at(&self, t: f64) -> (f64, f64) {
        let k = match self.t.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
            Ok(k) => return (self.x[k], self.v[k]),
            Err(0) => 0,
            Err(k) if k >= self.len() => self.len() - 2,
            Err(k) => k - 1,
        };
        let h = self.t[k + 1] - self.t[k];
        let s = (t - self.t[k]) / h;
        let x = hermite3(s, h, self.x[k], self.v[k], self.x[k + 1], self.v[k + 1]);
        let v = hermite3(s, h, self.v[k], self.a[k], self.v[k + 1], self.a[k + 1]);
        (x, v)
    }

    /// Resamples the dense output on a uniform time grid.
    pub fn sample(&self, dt: f64) -> Vec<(f64, f64, f64)> {
        let t_end = *self.t.last().unwrap_or(&0.0);
        let count = (t_end / dt).floor() as usize;
        (0..=count)
            .map(|k| {
                let t = (k as f64 * dt).min(t_end);
                let (x, v) = self.at(t);
                (t, x, v)
            })
            .collect()
    }
}

fn hermite3(s: f64, h: f64, y0: f64, d0: f64, y1: f64, d1: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

// Dormand–Prince 5(4) tableau; the last row doubles as the fifth-order weights
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step; returns the fifth-order state and the embedded error.
fn dp_step(sys: &LienardSystem, y: [f64; 2], h: f64) -> ([f64; 2], [f64; 2]) {
    let rhs = |y: [f64; 2]| [y[1], sys.accel(y[0], y[1])];
    let mut k = [[0.0; 2]; 7];
    k[0] = rhs(y);
    for i in 1..7 {
        let mut yi = y;
        for (j, kj) in k.iter().enumerate().take(i) {
            yi[0] += h * A[i][j] * kj[0];
            yi[1] += h * A[i][j] * kj[1];
        }
        k[i] = rhs(yi);
    }
    let mut next = y;
    let mut err = [0.0; 2];
    for i in 0..7 {
        let b = if i < 6 { A[6][i] } else { 0.0 };
        next[0] += h * b * k[i][0];
        next[1] += h * b * k[i][1];
        err[0] += h * E[i] * k[i][0];
        err[1] += h * E[i] * k[i][1];
    }
    (next, err)
}

fn escape(sys: &LienardSystem, opts: &IntegratorOptions, t: f64, y: [f64; 2]) -> Option<Error> {
    let bad = !y[0].is_finite()
        || !y[1].is_finite()
        || y[0].abs() > opts.x_bound
        || y[1].abs() > opts.v_bound
        || !sys.in_region(y[0]);
    bad.then(|| Error::BlowUp { time: t, x: y[0].abs(), v: y[1].abs() })
}

/// Integrates from `(x0, v0)` at `t = 0` to `t_end`. `dt` is the first trial
/// step (or the step itself in fixed-step mode).
pub fn integrate(
    sys: &LienardSystem,
    x0: f64,
    v0: f64,
    t_end: f64,
    dt: f64,
    opts: &IntegratorOptions,
) -> Result<Trajectory> {
    if !(dt > 0.0) || !(t_end >= 0.0) {
        return Err(Error::param("need dt > 0 and t_end >= 0"));
    }
    if !sys.in_region(x0) {
        return Err(Error::Domain(format!("x0 = {x0} lies outside the physical region")));
    }
    let mut traj = Trajectory::default();
    let mut t = 0.0;
    let mut y = [x0, v0];
    traj.push(t, y[0], y[1], sys.accel(y[0], y[1]));
    if let Some(step) = opts.fixed_step {
        let count = (t_end / step).ceil() as usize;
        for k in 0..count {
            let h = (t_end - t).min(step);
            y = dp_step(sys, y, h).0;
            t = if k + 1 == count { t_end } else { t + h };
            if let Some(e) = escape(sys, opts, t, y) {
                return Err(e);
            }
            traj.push(t, y[0], y[1], sys.accel(y[0], y[1]));
        }
        return Ok(traj);
    }
    let mut h = dt.min(opts.h_max);
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > opts.max_steps {
            return Err(Error::param(format!("step budget of {} exhausted at t = {t}", opts.max_steps)));
        }
        let last = t + h >= t_end;
        let hh = if last { t_end - t } else { h };
        let (next, err) = dp_step(sys, y, hh);
        let sc0 = opts.atol + opts.rtol * y[0].abs().max(next[0].abs());
        let sc1 = opts.atol + opts.rtol * y[1].abs().max(next[1].abs());
        let norm = (0.5 * ((err[0] / sc0).powi(2) + (err[1] / sc1).powi(2))).sqrt();
        let finite = next.iter().all(|v| v.is_finite()) && norm.is_finite();
        if finite && norm <= 1.0 {
            t = if last { t_end } else { t + hh };
            y = next;
            if let Some(e) = escape(sys, opts, t, y) {
                return Err(e);
            }
            traj.push(t, y[0], y[1], sys.accel(y[0], y[1]));
            let grow = if norm == 0.0 { 5.0 } else { (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0) };
            h = (hh * grow).min(opts.h_max);
        } else {
            let shrink = if finite { (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9) } else { 0.1 };
            h = hh * shrink;
            if h < opts.h_min {
                return Err(Error::BlowUp { time: t, x: y[0].abs(), v: y[1].abs() });
            }
        }
    }
    Ok(traj)
}

/// Closed-form orbits `x(t)`: `ln(1 − λA sin(ω₀t+δ))/λ` for the exponential
/// system, `A sin(ω₀t+δ)/(1 − λA sin(ω₀t+δ))` for the nonpolynomial one.
pub fn closed_form(id: SystemId, amplitude: f64, delta: f64, lambda: f64, omega0: f64, t: f64) -> Result<f64> {
    Ok(closed_form_state(id, amplitude, delta, lambda, omega0, t)?.0)
}

/// `(x(t), ẋ(t))` along the closed-form orbit.
pub fn closed_form_state(id: SystemId, amplitude: f64, delta: f64, lambda: f64, omega0: f64, t: f64) -> Result<(f64, f64)> {
    let la = lambda.abs() * amplitude;
    let ok = match id {
        SystemId::ExpOscillator => amplitude >= 0.0 && la <= 1.0,
        SystemId::NonPolyOscillator => amplitude >= 0.0 && la < 1.0,
        _ => return Err(Error::param(format!("no closed-form orbit for `{}`", id.name()))),
    };
    if !ok {
        return Err(Error::param(format!("amplitude {amplitude} outside the periodic range for λ = {lambda}")));
    }
    let ph = omega0 * t + delta;
    let (s, c) = ph.sin_cos();
    let w = 1.0 - lambda * amplitude * s;
    Ok(match id {
        SystemId::ExpOscillator if lambda == 0.0 => (-amplitude * s, -amplitude * omega0 * c),
        SystemId::ExpOscillator => (w.ln() / lambda, -amplitude * omega0 * c / w),
        _ => (amplitude * s / w, amplitude * omega0 * c / (w * w)),
    })
}

/// Refines a zero of `ẋ` inside an accepted step by re-stepping from its start.
fn refine_turning_time(sys: &LienardSystem, traj: &Trajectory, k: usize) -> f64 {
    let (t0, y0) = (traj.t[k], [traj.x[k], traj.v[k]]);
    let h = traj.t[k + 1] - t0;
    // bracket on the Hermite interpolant first
    let vh = |s: f64| hermite3(s, h, traj.v[k], traj.a[k], traj.v[k + 1], traj.a[k + 1]);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if (vh(mid) > 0.0) == (traj.v[k] > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Newton on v(t) using exact sub-steps of the integrator
    let mut tau = 0.5 * (lo + hi) * h;
    for _ in 0..4 {
        let y = if tau > 0.0 { dp_step(sys, y0, tau).0 } else { y0 };
        let a = sys.accel(y[0], y[1]);
        if a == 0.0 {
            break;
        }
        let step = y[1] / a;
        tau = (tau - step).clamp(0.0, h);
        if step.abs() < 1e-15 * (1.0 + t0.abs()) {
            break;
        }
    }
    t0 + tau
}

/// Times at which `ẋ` changes sign from positive to negative.
pub fn turning_times(sys: &LienardSystem, traj: &Trajectory) -> Vec<f64> {
    (0..traj.len().saturating_sub(1))
        .filter(|&k| traj.v[k] > 0.0 && traj.v[k + 1] <= 0.0)
        .map(|k| refine_turning_time(sys, traj, k))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodEstimate {
    pub period: f64,
    /// Number of full periods the estimate averages over.
    pub cycles: usize,
    /// Largest deviation of a single cycle from the mean.
    pub spread: f64,
}

/// Period of the orbit launched from the closed-form state with amplitude
/// `amplitude_seed` (phase zero), from successive maxima of `x`.
pub fn period(sys: &LienardSystem, amplitude_seed: f64, opts: &IntegratorOptions) -> Result<PeriodEstimate> {
    let (x0, v0) = closed_form_state(sys.id, amplitude_seed, 0.0, sys.lambda, sys.omega0, 0.0)?;
    let t_nominal = 2.0 * std::f64::consts::PI / sys.omega0;
    let traj = integrate(sys, x0, v0, 6.0 * t_nominal, 1e-3 * t_nominal, opts)?;
    let times = turning_times(sys, &traj);
    if times.len() < 2 {
        return Err(Error::NonPeriodic(format!(
            "found {} turning point(s) within {} nominal periods",
            times.len(),
            6
        )));
    }
    let cycles = times.len() - 1;
    let period = (times[cycles] - times[0]) / cycles as f64;
    let spread = times
        .windows(2)
        .map(|w| (w[1] - w[0] - period).abs())
        .fold(0.0, f64::max);
    Ok(PeriodEstimate { period, cycles, spread })
}

/// Outcome of checking `g` against the linearisable template
/// `g = g₁ e^{−F} I + g₂ e^{−F}`, `F = ∫f`, `I = ∫e^F`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Linearization {
    pub x_ref: f64,
    pub g1: f64,
    pub g2: f64,
    /// Largest |g − template| over the samples.
    pub consistency: f64,
    /// `(x, X = h₁ I(x) + h₂)` at the samples.
    pub transform: Vec<(f64, f64)>,
}

/// `F(x) = ∫_{x_ref}^x f`.
pub fn integral_f(f: &dyn Fn(f64) -> f64, x_ref: f64, x: f64) -> Result<f64> {
    Ok(gauss_kronrod(f, x_ref, x, 1e-13 * (1.0 + (x - x_ref).abs()))?.value)
}

/// `I(x) = ∫_{x_ref}^x e^{F(y)} dy`.
pub fn integral_exp_f(f: &dyn Fn(f64) -> f64, x_ref: f64, x: f64) -> Result<f64> {
    let inner = |y: f64| integral_f(f, x_ref, y).map(f64::exp).unwrap_or(f64::NAN);
    Ok(gauss_kronrod(inner, x_ref, x, 1e-12 * (1.0 + (x - x_ref).abs()))?.value)
}

/// Fits `g₁, g₂` by least squares over `samples` and reports the template misfit.
pub fn linearize(
    f: &dyn Fn(f64) -> f64,
    g: &dyn Fn(f64) -> f64,
    h1: f64,
    h2: f64,
    x_ref: f64,
    samples: &[f64],
) -> Result<Linearization> {
    if samples.len() < 2 {
        return Err(Error::param("need at least two sample points"));
    }
    let mut rows = Vec::with_capacity(samples.len());
    for &x in samples {
        let big_f = integral_f(f, x_ref, x)?;
        let big_i = integral_exp_f(f, x_ref, x)?;
        let emf = (-big_f).exp();
        rows.push((x, emf * big_i, emf, g(x), big_i));
    }
    // normal equations for the two basis functions
    let (mut s11, mut s12, mut s22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &(_, p, q, y, _) in &rows {
        s11 += p * p;
        s12 += p * q;
        s22 += q * q;
        b1 += p * y;
        b2 += q * y;
    }
    let det = s11 * s22 - s12 * s12;
    if det.abs() <= 1e-14 * s11 * s22 {
        return Err(Error::param("template basis is degenerate on these samples"));
    }
    let g1 = (b1 * s22 - b2 * s12) / det;
    let g2 = (s11 * b2 - s12 * b1) / det;
    let consistency = rows
        .iter()
        .map(|&(_, p, q, y, _)| (y - g1 * p - g2 * q).abs())
        .fold(0.0, f64::max);
    let transform = rows.iter().map(|&(x, _, _, _, i)| (x, h1 * i + h2)).collect();
    Ok(Linearization { x_ref, g1, g2, consistency, transform })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn exp_sys() -> LienardSystem {
        make_lienard(SystemId::ExpOscillator, 1.0, 2.0).unwrap()
    }

    fn np_sys() -> LienardSystem {
        make_lienard(SystemId::NonPolyOscillator, 1.0, 2.0).unwrap()
    }

    #[test]
    fn isochronicity_certificate() {
        for sys in [exp_sys(), np_sys(), make_lienard(SystemId::ExpOscillator, -0.7, 3.0).unwrap()] {
            for k in 0..100 {
                let x = -0.95 + 1.9 * k as f64 / 99.0;
                assert!(sys.isochronicity_defect(x).abs() < 1e-10, "{sys:?} x={x}");
            }
        }
    }

    #[test]
    fn linear_limit() {
        for id in [SystemId::ExpOscillator, SystemId::NonPolyOscillator] {
            let sys = make_lienard(id, 0.0, 2.0).unwrap();
            assert_eq!(sys.f(0.7), 0.0);
            assert!((sys.g(0.7) - 4.0 * 0.7).abs() < 1e-15);
            let p = period(&sys, 0.4, &IntegratorOptions::default()).unwrap();
            assert!((p.period - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_other_systems() {
        assert!(make_lienard(SystemId::AppBSextic, 1.0, 2.0).is_err());
        assert!(make_lienard(SystemId::ExpOscillator, 1.0, -2.0).is_err());
    }

    #[test]
    fn fixed_point_stays_put() {
        for sys in [exp_sys(), np_sys()] {
            let tr = integrate(&sys, 0.0, 0.0, 10.0, 0.01, &IntegratorOptions::default()).unwrap();
            assert!(tr.x.iter().chain(&tr.v).all(|v| *v == 0.0));
        }
    }

    #[test]
    fn closed_form_values() {
        for id in [SystemId::ExpOscillator, SystemId::NonPolyOscillator] {
            assert_eq!(closed_form(id, 0.0, 0.3, 1.0, 2.0, 1.7).unwrap(), 0.0);
        }
        let x = closed_form(SystemId::ExpOscillator, 0.5, 0.0, 1.0, 2.0, PI / 4.0).unwrap();
        assert!((x - 0.5f64.ln()).abs() < 1e-15);
        assert!(closed_form(SystemId::NonPolyOscillator, 1.0, 0.0, 1.0, 2.0, 0.0).is_err());
        assert!(closed_form(SystemId::ExpOscillator, 1.0, 0.0, 1.0, 2.0, 0.0).is_ok());
        assert!(closed_form(SystemId::ExpOscillator, 1.1, 0.0, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn closed_form_satisfies_the_equation_of_motion() {
        let h = 1e-4;
        for sys in [exp_sys(), np_sys()] {
            for k in 0..50 {
                let t = 0.05 + 0.1 * k as f64;
                let x = |t: f64| closed_form(sys.id, 0.6, 0.2, 1.0, 2.0, t).unwrap();
                let xd = (x(t + h) - x(t - h)) / (2.0 * h);
                let xdd = (x(t + h) - 2.0 * x(t) + x(t - h)) / (h * h);
                let r = xdd + sys.f(x(t)) * xd * xd + sys.g(x(t));
                assert!(r.abs() < 1e-6, "{:?} t={t} r={r}", sys.id);
                let (_, v) = closed_form_state(sys.id, 0.6, 0.2, 1.0, 2.0, t).unwrap();
                assert!((v - xd).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn nonpoly_escapes_beyond_the_periodic_range() {
        let sys = np_sys();
        for amp in [1.0, 1.5] {
            // launch as the closed form would, with x(0) = 0 and ẋ(0) = Aω₀
            let r = integrate(&sys, 0.0, amp * 2.0, 10.0, 1e-3, &IntegratorOptions::default());
            assert!(matches!(r, Err(Error::BlowUp { .. })), "{r:?}");
        }
        assert!(period(&sys, 1.2, &IntegratorOptions::default()).is_err());
    }

    #[test]
    fn fixed_step_mode_is_reproducible() {
        let opts = IntegratorOptions { fixed_step: Some(1e-3), ..Default::default() };
        let a = integrate(&exp_sys(), 0.0, -1.0, 3.0, 1e-3, &opts).unwrap();
        let b = integrate(&exp_sys(), 0.0, -1.0, 3.0, 1e-3, &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(*a.t.last().unwrap(), 3.0);
        let (x, _) = closed_form_state(SystemId::ExpOscillator, 0.5, 0.0, 1.0, 2.0, 3.0).unwrap();
        assert!((a.x.last().unwrap() - x).abs() < 1e-9);
    }

    #[test]
    fn dense_output_interpolates() {
        let sys = np_sys();
        let tr = integrate(&sys, 0.0, 0.8, 2.0, 1e-3, &IntegratorOptions::default()).unwrap();
        for (t, x, _) in tr.sample(0.05) {
            let exact = closed_form(sys.id, 0.4, 0.0, 1.0, 2.0, t).unwrap();
            assert!((x - exact).abs() < 1e-6);
        }
    }

    #[test]
    fn linearize_exp_and_nonpoly() {
        let samples: Vec<f64> = (0..200).map(|k| -0.9 + 1.8 * k as f64 / 199.0).collect();
        let sys = exp_sys();
        let lin = linearize(&|x| sys.f(x), &|x| sys.g(x), 1.0, 0.0, 0.0, &samples).unwrap();
        assert!(lin.consistency < 1e-8, "{}", lin.consistency);
        assert!((lin.g1 - 4.0).abs() < 1e-8 && lin.g2.abs() < 1e-8);
        for &(x, big_x) in &lin.transform {
            assert!((big_x - x.exp_m1()).abs() < 1e-10);
        }
        let sys = np_sys();
        let lin = linearize(&|x| sys.f(x), &|x| sys.g(x), 1.0, 0.0, 0.0, &samples).unwrap();
        assert!(lin.consistency < 1e-8);
        assert!((lin.g1 - 4.0).abs() < 1e-8 && lin.g2.abs() < 1e-8);
        for &(x, big_x) in &lin.transform {
            assert!((big_x - x / (1.0 + x)).abs() < 1e-10);
        }
        let lin = linearize(&|_| 0.0, &|x| 4.0 * x, 2.0, 1.0, 0.0, &samples).unwrap();
        assert!(lin.consistency < 1e-12);
        assert!(lin.transform.iter().all(|&(x, big_x)| (big_x - (2.0 * x + 1.0)).abs() < 1e-12));
    }

    #[test]
    fn non_template_g_is_flagged() {
        let samples: Vec<f64> = (0..50).map(|k| -1.0 + 2.0 * k as f64 / 49.0).collect();
        let lin = linearize(&|_| 0.0, &|x: f64| x * x * x, 1.0, 0.0, 0.0, &samples).unwrap();
        assert!(lin.consistency > 1e-2);
    }
}
