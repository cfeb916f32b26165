//! Closed-form eigenpairs of the exponential and nonpolynomial oscillators.
//!
//! Both eigenfunction families are Hermite functions of an auxiliary variable
//! `τ(x)`. The shape functions here carry no normalisation; [`EigenSolution`]
//! attaches the constant found by quadrature in `τ`, where the integrand is a
//! plain Gaussian-weighted polynomial on a (half-)line.

use serde::{Deserialize, Serialize};

use crate::catalog::{Interval, PdmSystem, SystemId};
use crate::error::{Error, Result};
use crate::linalg::hermite_zeros;
use crate::ordering::{constraint_a, constraint_b_nonpoly, OrderingAggregate, CONSTRAINT_TOL};
use crate::quadrature::gauss_kronrod;

/// Physicists' Hermite polynomial by upward recurrence.
pub fn hermite(n: usize, t: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * t);
    if n == 0 {
        return h0;
    }
    for k in 1..n {
        let h2 = 2.0 * t * h1 - 2.0 * k as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

pub fn hermite_d1(n: usize, t: f64) -> f64 {
    if n == 0 {
        0.0
    } else {
        2.0 * n as f64 * hermite(n - 1, t)
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn require_exact(system: &PdmSystem) -> Result<()> {
    if system.id.has_exact_solutions() {
        Ok(())
    } else {
        Err(Error::NotExactlySolvable {
            system: system.id.name().to_string(),
            detail: "no closed-form spectrum".into(),
        })
    }
}

/// Checks the ordering condition under which `system` has the Hermite spectrum.
pub fn check_ordering(system: &PdmSystem, agg: &OrderingAggregate) -> Result<()> {
    require_exact(system)?;
    let (name, value, target) = match system.id {
        SystemId::ExpOscillator => ("A", constraint_a(agg), 0.75),
        _ => ("B", constraint_b_nonpoly(agg), 2.0),
    };
    if (value - target).abs() < CONSTRAINT_TOL {
        Ok(())
    } else {
        Err(Error::NotExactlySolvable {
            system: system.id.name().to_string(),
            detail: format!("{name} = {value} but {target} is required"),
        })
    }
}

/// `E_n = (n + ½)ħω₀`; λ and the ordering play no role.
pub fn energy(n: usize, system: &PdmSystem) -> Result<f64> {
    require_exact(system)?;
    Ok((n as f64 + 0.5) * system.hbar * system.omega0)
}

/// Argument of the Hermite polynomial in ψ_n.
pub fn tau(system: &PdmSystem, x: f64) -> f64 {
    let mu = system.omega0 / system.hbar;
    let l = system.lambda;
    match system.id {
        SystemId::ExpOscillator => mu.sqrt() * ((l * x).exp() - 1.0),
        _ => mu.sqrt() * x / (1.0 + l * x),
    }
}

/// Range of `τ` swept as `x` runs over the support.
pub fn tau_range(system: &PdmSystem) -> Interval {
    let rmu = (system.omega0 / system.hbar).sqrt();
    match system.id {
        SystemId::ExpOscillator => Interval::new(-rmu, f64::INFINITY),
        _ => {
            let c = rmu / system.lambda.abs();
            if system.lambda > 0.0 {
                Interval::new(f64::NEG_INFINITY, c)
            } else {
                Interval::new(-c, f64::INFINITY)
            }
        }
    }
}

/// Unnormalised exponential-oscillator eigenfunction
/// `exp(−(μ/2)e^{2λx} + μe^{λx}) e^{λx/2} H_n(√μ(e^{λx} − 1))`, `μ = ω₀/ħ`.
///
/// Negative λ uses the same expression, which is the mirror image of the
/// `|λ|` solution.
pub fn psi_exp(n: usize, x: f64, system: &PdmSystem) -> f64 {
    let mu = system.omega0 / system.hbar;
    let l = system.lambda;
    let u = (l * x).exp();
    let expo = -0.5 * mu * u * u + mu * u + 0.5 * l * x;
    if expo < -740.0 || !expo.is_finite() {
        return 0.0;
    }
    expo.exp() * hermite(n, mu.sqrt() * (u - 1.0))
}

/// Unnormalised nonpolynomial-oscillator eigenfunction
/// `(1+λx)^{-1} exp(−μx²/(2(1+λx)²)) H_n(√μ x/(1+λx))`, and exactly zero on
/// the far side of `x = −1/λ`.
pub fn psi_nonpoly(n: usize, x: f64, system: &PdmSystem) -> f64 {
    let l = system.lambda;
    let w = 1.0 + l * x;
    if w <= 0.0 {
        return 0.0;
    }
    let mu = system.omega0 / system.hbar;
    let y = x / w;
    let expo = -0.5 * mu * y * y;
    if expo < -740.0 {
        return 0.0;
    }
    expo.exp() / w * hermite(n, mu.sqrt() * y)
}

fn shape(system: &PdmSystem, n: usize, x: f64) -> f64 {
    match system.id {
        SystemId::ExpOscillator => psi_exp(n, x, system),
        _ => psi_nonpoly(n, x, system),
    }
}

/// `∫ shape_m shape_n dx = P · ∫ e^{−τ²} H_m H_n dτ` over [`tau_range`]; this is `P`.
fn tau_prefactor(system: &PdmSystem) -> f64 {
    let mu = system.omega0 / system.hbar;
    match system.id {
        SystemId::ExpOscillator => mu.exp() / (system.lambda.abs() * mu.sqrt()),
        _ => 1.0 / mu.sqrt(),
    }
}

fn hermite_product_integral(system: &PdmSystem, m: usize, n: usize) -> Result<f64> {
    let r = tau_range(system);
    let cut = ((2 * m.max(n) + 1) as f64).sqrt() + 14.0;
    let lo = r.lo.max(-cut);
    let hi = r.hi.min(cut);
    if lo >= hi {
        return Ok(0.0);
    }
    let scale = std::f64::consts::PI.sqrt() * 2f64.powi(m.max(n) as i32) * factorial(m.max(n));
    let est = gauss_kronrod(
        |t: f64| (-t * t).exp() * hermite(m, t) * hermite(n, t),
        lo,
        hi,
        1e-14 * scale,
    )?;
    Ok(est.value)
}

/// `N_n` making `∫ψ_n² dx = 1`, by quadrature.
pub fn normalize(n: usize, system: &PdmSystem, agg: &OrderingAggregate) -> Result<f64> {
    check_ordering(system, agg)?;
    norm_const(n, system)
}

fn norm_const(n: usize, system: &PdmSystem) -> Result<f64> {
    let integral = tau_prefactor(system) * hermite_product_integral(system, n, n)?;
    Ok(1.0 / integral.sqrt())
}

/// Normalisation the unrestricted Hermite function would have,
/// `(√μ / (√π 2ⁿ n!))^{1/2}`; the nonpolynomial `N_n` tends to it as `λ → 0`.
pub fn harmonic_norm(n: usize, system: &PdmSystem) -> f64 {
    let mu = system.omega0 / system.hbar;
    (mu.sqrt() / (std::f64::consts::PI.sqrt() * 2f64.powi(n as i32) * factorial(n))).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Measure {
    /// `dx`, for the Hermitian-ordering ψ.
    Lebesgue,
    /// `m^{2η} dx`, for the non-Hermitian-ordering φ̂ = m^{−η}ψ.
    WeightedByMass2Eta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenSolution {
    pub system: PdmSystem,
    pub n: usize,
    pub energy: f64,
    pub norm_const: f64,
    pub measure: Measure,
    /// Similarity exponent applied on top of ψ; zero for the Lebesgue form.
    pub eta: f64,
    pub support: Interval,
}

impl EigenSolution {
    pub fn new(system: &PdmSystem, agg: &OrderingAggregate, n: usize) -> Result<Self> {
        let norm_const = normalize(n, system, agg)?;
        Ok(EigenSolution {
            system: *system,
            n,
            energy: energy(n, system)?,
            norm_const,
            measure: Measure::Lebesgue,
            eta: 0.0,
            support: system.domain(),
        })
    }

    /// The Hermitian-ordering eigenfunction ψ_n, regardless of the stored measure.
    pub fn psi_hermitian(&self, x: f64) -> f64 {
        if !(x > self.support.lo && x < self.support.hi) {
            return 0.0;
        }
        self.norm_const * shape(&self.system, self.n, x)
    }

    /// ψ_n for the Lebesgue form, φ̂_n = m^{−η}ψ_n for the weighted form.
    pub fn psi(&self, x: f64) -> f64 {
        let p = self.psi_hermitian(x);
        if self.eta == 0.0 || p == 0.0 {
            return p;
        }
        p.signum() * (p.abs().ln() - self.eta * self.system.log_mass(x)).exp()
    }

    /// Density with respect to `dx`: `|ψ|²`, or `|φ̂|² m^{2η}`.
    pub fn density(&self, x: f64) -> f64 {
        let p = self.psi_hermitian(x);
        p * p
    }

    /// Normalisation integral in the solution's own measure.
    pub fn norm_integral(&self) -> Result<f64> {
        Ok(self.norm_const.powi(2) * tau_prefactor(&self.system) * hermite_product_integral(&self.system, self.n, self.n)?)
    }

    /// Analytic count of interior zeros: zeros of `H_n` inside the τ-range.
    pub fn node_count(&self) -> usize {
        let r = tau_range(&self.system);
        hermite_zeros(self.n)
            .into_iter()
            .filter(|z| *z > r.lo && *z < r.hi)
            .count()
    }
}

/// `φ̂ = m^{−η}ψ` with `η = (γ̄ − ᾱ)/2`, normalised in `m^{2η}dx` with the same `N_n`.
pub fn quasi_hermitian_map(sol: &EigenSolution, agg: &OrderingAggregate) -> Result<EigenSolution> {
    if sol.measure != Measure::Lebesgue {
        return Err(Error::param("quasi-Hermitian map expects a Lebesgue-normalised solution"));
    }
    Ok(EigenSolution {
        measure: Measure::WeightedByMass2Eta,
        eta: agg.eta,
        ..*sol
    })
}

/// `∫ψ_a ψ_b dx` for two eigenfunctions of the same system (in the common
/// measure when both are mapped by the same η).
pub fn overlap(a: &EigenSolution, b: &EigenSolution) -> Result<f64> {
    if a.system != b.system || a.eta != b.eta {
        return Err(Error::param("overlap needs two solutions of one system and measure"));
    }
    Ok(a.norm_const
        * b.norm_const
        * tau_prefactor(&a.system)
        * hermite_product_integral(&a.system, a.n, b.n)?)
}

/// Inverse of [`tau`] on the support.
pub fn x_of_tau(system: &PdmSystem, t: f64) -> f64 {
    let rmu = (system.omega0 / system.hbar).sqrt();
    let l = system.lambda;
    match system.id {
        SystemId::ExpOscillator => (t / rmu).ln_1p() / l,
        _ => {
            let y = t / rmu;
            y / (1.0 - l * y)
        }
    }
}

/// Tabulated eigenfunctions sharing one abscissa.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveTable {
    pub ns: Vec<usize>,
    pub x: Vec<f64>,
    /// `columns[k][i]` is `ψ_{ns[k]}(x[i])`.
    pub columns: Vec<Vec<f64>>,
}

/// Samples ψ_n for every `n` in `ns`: `bulk` points uniform in τ over the
/// region where the Hermite functions live, then geometric tails out to where
/// every column is below `threshold`. Points beyond a singular point of the
/// mass are included and are exactly zero there.
pub fn wavefunction_table(
    system: &PdmSystem,
    agg: &OrderingAggregate,
    ns: &[usize],
    bulk: usize,
    threshold: f64,
) -> Result<WaveTable> {
    if ns.is_empty() || bulk < 2 {
        return Err(Error::param("need at least one level and two bulk points"));
    }
    let sols: Vec<EigenSolution> = ns.iter().map(|&n| EigenSolution::new(system, agg, n)).collect::<Result<_>>()?;
    let big = |x: f64| sols.iter().map(|s| s.psi(x).abs()).fold(0.0, f64::max) >= threshold;
    let r = tau_range(system);
    let nmax = *ns.iter().max().unwrap();
    let reach = ((2 * nmax + 1) as f64).sqrt() + 6.0;
    let pad = 1e-3 * (system.omega0 / system.hbar).sqrt();
    let t_lo = if r.lo.is_finite() { (r.lo + pad).max(-reach) } else { -reach };
    let t_hi = if r.hi.is_finite() { (r.hi - pad).min(reach) } else { reach };
    let mut xs: Vec<f64> = (0..bulk)
        .map(|i| x_of_tau(system, t_lo + (t_hi - t_lo) * i as f64 / (bulk - 1) as f64))
        .collect();
    xs.sort_by(f64::total_cmp);
    let dom = system.domain();
    let step = (xs[1] - xs[0]).abs().max((xs[bulk - 1] - xs[bulk - 2]).abs()).max(1e-6);
    let tail = |start: f64, dir: f64, edge: f64| -> Vec<f64> {
        let mut out = Vec::new();
        let mut x = start;
        for k in 0..400 {
            if !big(x) {
                break;
            }
            x = if edge.is_finite() {
                edge - (edge - start) * 0.5f64.powi(k + 1)
            } else {
                start + dir * step * 2f64.powi(k)
            };
            out.push(x);
        }
        out
    };
    let mut left = tail(xs[0], -1.0, dom.lo);
    let right = tail(xs[bulk - 1], 1.0, dom.hi);
    left.reverse();
    let mut x: Vec<f64> = left.into_iter().chain(xs).chain(right).collect();
    if let Some(edge) = system.singular_point() {
        let dir = if edge <= x[0] { -1.0 } else { 1.0 };
        let beyond = (0..=8).map(|k| edge + dir * 0.25 * k as f64);
        x.extend(beyond);
        x.sort_by(f64::total_cmp);
        x.dedup();
    }
    let columns = sols.iter().map(|s| x.iter().map(|&xi| s.psi(xi)).collect()).collect();
    Ok(WaveTable { ns: ns.to_vec(), x, columns })
}

/// Sign changes along a sampled function, ignoring exact zeros.
pub fn sign_changes(values: &[f64]) -> usize {
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in values {
        if v != 0.0 {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    count
}
