//! Polynomial solutions of
//!
//! ```text
//! (a₀ + a₁z + a₂z² + a₃z³) S″ + (b₀ + b₁z + b₂z²) S′ + (c₀ + c₁z) S = 0
//! ```
//!
//! by the Bethe ansatz `S = Π (z − zᵢ)`. The roots satisfy
//! `Σ_{j≠i} 2/(zᵢ − zⱼ) = −Q(zᵢ)/P(zᵢ)`, found here by damped complex Newton
//! from several seeds. Two polynomial conditions on `c₀, c₁` then decide
//! whether the problem actually admits the solution; they come from the two
//! leading powers of `z` in the ODE:
//!
//! ```text
//! c₁ = −n b₂ − n(n−1) a₃
//! c₀ = −(2(n−1)a₃ + b₂) Σzᵢ − n b₁ − n(n−1) a₂
//! ```

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{PdmSystem, SystemId};
use crate::error::{Error, Result};
use crate::linalg::hermite_zeros;
use crate::numeric::{assemble, eigenvalues, GridSpec};
use crate::ordering::{constraint_a, constraint_b_nonpoly, constraints_appb, OrderingAggregate};
use crate::quadrature::gauss_kronrod;

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_BE7E;

const RANDOM_STARTS: usize = 10;
const MIN_SEPARATION: f64 = 1e-10;
const CONVERGED: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetheProblem {
    pub a: [f64; 4],
    pub b: [f64; 3],
    pub c: [f64; 2],
    pub degree: usize,
}

fn horner(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn horner_d1(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, (k, &c)| acc * z + c * k as f64)
}

impl BetheProblem {
    pub fn p(&self, z: Complex64) -> Complex64 {
        horner(&self.a, z)
    }

    pub fn q(&self, z: Complex64) -> Complex64 {
        horner(&self.b, z)
    }

    /// `c₁` the degree forces.
    pub fn required_c1(&self) -> f64 {
        let n = self.degree as f64;
        -n * self.b[2] - n * (n - 1.0) * self.a[3]
    }

    /// `c₀` the degree and the root sum force.
    pub fn required_c0(&self, root_sum: Complex64) -> Complex64 {
        let n = self.degree as f64;
        -((2.0 * (n - 1.0) * self.a[3] + self.b[2]) * root_sum + n * self.b[1] + n * (n - 1.0) * self.a[2])
    }

    fn validate(&self) -> Result<()> {
        if self.a.iter().chain(&self.b).chain(&self.c).any(|v| !v.is_finite()) {
            return Err(Error::param("Bethe coefficients must be finite"));
        }
        if self.a.iter().all(|&v| v == 0.0) {
            return Err(Error::param("the S″ polynomial vanishes identically"));
        }
        Ok(())
    }

    /// `P(zᵢ) Σ 2/(zᵢ − zⱼ) + Q(zᵢ)` with a per-equation scale for reporting.
    fn equations(&self, z: &[Complex64]) -> (Vec<Complex64>, f64) {
        let mut worst: f64 = 0.0;
        let g = (0..z.len())
            .map(|i| {
                let mut s = Complex64::new(0.0, 0.0);
                let mut s_abs = 0.0;
                for j in (0..z.len()).filter(|&j| j != i) {
                    let t = 2.0 / (z[i] - z[j]);
                    s += t;
                    s_abs += t.norm();
                }
                let (p, q) = (self.p(z[i]), self.q(z[i]));
                let gi = p * s + q;
                let q_scale: f64 = self.b.iter().rev().fold(0.0, |acc, c| acc * z[i].norm() + c.abs());
                worst = worst.max(gi.norm() / (p.norm() * s_abs + q_scale + 1e-300));
                gi
            })
            .collect();
        (g, worst)
    }

    fn jacobian(&self, z: &[Complex64]) -> DMatrix<Complex64> {
        let n = z.len();
        DMatrix::from_fn(n, n, |i, k| {
            let p = self.p(z[i]);
            if i == k {
                let (mut s1, mut s2) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
                for j in (0..n).filter(|&j| j != i) {
                    let d = z[i] - z[j];
                    s1 += 2.0 / d;
                    s2 += 2.0 / (d * d);
                }
                horner_d1(&self.a, z[i]) * s1 - p * s2 + horner_d1(&self.b, z[i])
            } else {
                let d = z[i] - z[k];
                p * 2.0 / (d * d)
            }
        })
    }
}

/// One converged root set of the Bethe equations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheRoots {
    pub roots: Vec<Complex64>,
    /// Largest relative residual of the Bethe equations.
    pub residual: f64,
}

impl BetheRoots {
    pub fn sum(&self) -> Complex64 {
        self.roots.iter().sum()
    }

    pub fn min_separation(&self) -> f64 {
        let mut best = f64::INFINITY;
        for i in 0..self.roots.len() {
            for j in i + 1..self.roots.len() {
                best = best.min((self.roots[i] - self.roots[j]).norm());
            }
        }
        best
    }

    pub fn all_real(&self) -> bool {
        self.roots.iter().all(|z| z.im == 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheSolution {
    pub roots: Vec<Complex64>,
    pub energy: Option<f64>,
    /// `(c₁ − required c₁, c₀ − required c₀)`.
    pub constraint_residuals: (f64, f64),
    pub bethe_residual: f64,
    pub coeff_match: f64,
    pub all_real: bool,
}

fn newton(prob: &BetheProblem, mut z: Vec<Complex64>) -> Option<BetheRoots> {
    let (mut g, mut res) = prob.equations(&z);
    let norm = |g: &[Complex64]| g.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let mut gnorm = norm(&g);
    for _ in 0..200 {
        if res < 1e-14 {
            break;
        }
        let lu = prob.jacobian(&z).lu();
        let step = lu.solve(&DVector::from_iterator(g.len(), g.iter().map(|v| -v)))?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<Complex64> = z.iter().zip(step.iter()).map(|(a, b)| a + b * t).collect();
            let (tg, tres) = prob.equations(&trial);
            let tn = norm(&tg);
            if tn.is_finite() && tn < gnorm {
                z = trial;
                g = tg;
                res = tres;
                gnorm = tn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
        let size = step.iter().map(|v| v.norm()).fold(0.0, f64::max) * t;
        let scale = z.iter().map(|v| v.norm()).fold(1.0, f64::max);
        if size < 1e-15 * scale {
            break;
        }
    }
    if !(res < CONVERGED) {
        return None;
    }
    for v in &mut z {
        if v.im.abs() <= 1e-12 * (1.0 + v.re.abs()) {
            v.im = 0.0;
        }
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let roots = BetheRoots { roots: z, residual: res };
    (roots.min_separation() > MIN_SEPARATION).then_some(roots)
}

fn seeds(n: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let h = hermite_zeros(n);
    let span = h.last().copied().unwrap_or(0.0).max(1.0);
    let base: Vec<Complex64> = h.iter().map(|t| Complex64::new(0.5 + 0.45 * t / span, 0.0)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![base.clone()];
    for k in 0..RANDOM_STARTS {
        let amp = 0.1 * 1.8f64.powi(k as i32);
        out.push(
            base.iter()
                .map(|z| z + Complex64::new(rng.gen_range(-amp..amp), rng.gen_range(-0.2 * amp..0.2 * amp)))
                .collect(),
        );
    }
    out
}

/// Every distinct root set reached from the seeds, sorted by root sum.
pub fn bethe_roots(prob: &BetheProblem, seed: u64) -> Result<Vec<BetheRoots>> {
    prob.validate()?;
    let n = prob.degree;
    if n == 0 {
        return Ok(vec![BetheRoots { roots: Vec::new(), residual: 0.0 }]);
    }
    let mut found: Vec<BetheRoots> = Vec::new();
    for start in seeds(n, seed) {
        if let Some(r) = newton(prob, start) {
            let dup = found.iter().any(|f| {
                f.roots.iter().zip(&r.roots).all(|(a, b)| (a - b).norm() < 1e-7 * (1.0 + a.norm()))
            });
            if !dup {
                found.push(r);
            }
        }
    }
    if found.is_empty() {
        return Err(Error::Bethe {
            reason: format!("Newton did not converge from any of {} seeds for n = {n}", RANDOM_STARTS + 1),
            best_residual: f64::INFINITY,
        });
    }
    found.sort_by(|a, b| a.sum().re.total_cmp(&b.sum().re).then(a.sum().im.total_cmp(&b.sum().im)));
    Ok(found)
}

/// Largest coefficient of `P S″ + Q S′ + R S` with `S = Π(z − zᵢ)`.
pub fn coefficient_match(prob: &BetheProblem, roots: &[Complex64]) -> f64 {
    let n = roots.len();
    // ascending coefficients of S
    let mut s = vec![Complex64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); s.len() + 1];
        for (k, &c) in s.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * r;
        }
        s = next;
    }
    let d1: Vec<Complex64> = (1..=n).map(|k| s[k] * k as f64).collect();
    let d2: Vec<Complex64> = (2..=n).map(|k| s[k] * (k * (k - 1)) as f64).collect();
    let mut out = vec![Complex64::new(0.0, 0.0); n + 4];
    let mut acc = |poly: &[f64], series: &[Complex64]| {
        for (i, &p) in poly.iter().enumerate() {
            for (j, &q) in series.iter().enumerate() {
                out[i + j] += q * p;
            }
        }
    };
    acc(&prob.a, &d2);
    acc(&prob.b, &d1);
    acc(&prob.c, &s);
    out.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn finish(prob: &BetheProblem, r: &BetheRoots, energy: Option<f64>) -> BetheSolution {
    let c0 = prob.required_c0(r.sum());
    BetheSolution {
        roots: r.roots.clone(),
        energy,
        constraint_residuals: ((prob.c[1] - prob.required_c1()).abs(), (Complex64::new(prob.c[0], 0.0) - c0).norm()),
        bethe_residual: r.residual,
        coeff_match: coefficient_match(prob, &r.roots),
        all_real: r.all_real(),
    }
}

/// All converged solutions, each with its constraint residuals.
pub fn solve_bethe_all(prob: &BetheProblem, seed: u64) -> Result<Vec<BetheSolution>> {
    Ok(bethe_roots(prob, seed)?.iter().map(|r| finish(prob, r, None)).collect())
}

/// The root set that best satisfies the `c₀` condition.
pub fn solve_bethe(prob: &BetheProblem) -> Result<BetheSolution> {
    solve_bethe_seeded(prob, DEFAULT_SEED)
}

pub fn solve_bethe_seeded(prob: &BetheProblem, seed: u64) -> Result<BetheSolution> {
    let all = solve_bethe_all(prob, seed)?;
    Ok(all
        .into_iter()
        .min_by(|a, b| a.constraint_residuals.1.total_cmp(&b.constraint_residuals.1))
        .expect("bethe_roots never returns an empty list"))
}

/// `E_n = (2n + 2d − 1)ħω`.
pub fn energy_appb(n: usize, d: f64, omega: f64, hbar: f64) -> f64 {
    (2.0 * n as f64 + 2.0 * d - 1.0) * hbar * omega
}

/// The sextic problem in Bethe form for a given ordering and degree.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppbReduction {
    pub d: f64,
    /// The other root of `4d² − 10d + A = 0`.
    pub d_other: f64,
    pub a_value: f64,
    pub b_value: f64,
    /// `ω/(ħλ)`.
    pub mu: f64,
    pub energy: f64,
    pub problem: BetheProblem,
}

impl AppbReduction {
    /// The ordering constant `B` that makes a root set with this sum exact.
    pub fn required_b(&self, root_sum: f64) -> f64 {
        let c0 = self.problem.required_c0(Complex64::new(root_sum, 0.0)).re;
        4.0 * (c0 + self.mu * (0.75 - self.d) + self.d * (self.d - 2.0))
    }
}

fn appb_problem(system: &PdmSystem, b_value: f64, d: f64, n: usize) -> BetheProblem {
    let mu = system.omega0 / (system.hbar * system.lambda);
    let energy = energy_appb(n, d, system.omega0, system.hbar);
    let xi = 2.0 * energy / (system.hbar * system.hbar * system.lambda);
    BetheProblem {
        a: [0.0, 1.0, -1.0, 0.0],
        b: [2.0 * d - 1.5, -2.0 * d + 1.0 + mu, -mu],
        c: [b_value / 4.0 - mu * (0.75 - d) - d * (d - 2.0), xi / 4.0 + 0.5 * mu * (1.0 - 2.0 * d)],
        degree: n,
    }
}

/// Roots of `4d² − 10d + A = 0`, larger first.
pub fn d_roots(a_value: f64) -> Result<(f64, f64)> {
    let disc = 100.0 - 16.0 * a_value;
    if disc < 0.0 {
        return Err(Error::ReductionUnavailable(format!(
            "reduction unavailable for this ordering: 4d² − 10d + {a_value} = 0 has no real root"
        )));
    }
    let r = disc.sqrt();
    Ok(((10.0 + r) / 8.0, (10.0 - r) / 8.0))
}

/// Reduces the sextic system under `agg` to Bethe form at degree `n`,
/// preferring the larger `d` when it gives a square-integrable tail.
pub fn reduce_appb(system: &PdmSystem, agg: &OrderingAggregate, n: usize) -> Result<AppbReduction> {
    if system.id != SystemId::AppBSextic {
        return Err(Error::ReductionUnavailable(format!("`{}` has no sextic reduction", system.id.name())));
    }
    if !(system.lambda > 0.0) {
        return Err(Error::ReductionUnavailable("the sextic reduction needs λ > 0".into()));
    }
    let (a_value, b_value) = constraints_appb(agg);
    let (hi, lo) = d_roots(a_value)?;
    let (d, d_other) = if hi > 0.25 || lo <= 0.25 { (hi, lo) } else { (lo, hi) };
    Ok(reduction_with_d(system, a_value, b_value, d, d_other, n))
}

fn reduction_with_d(system: &PdmSystem, a_value: f64, b_value: f64, d: f64, d_other: f64, n: usize) -> AppbReduction {
    AppbReduction {
        d,
        d_other,
        a_value,
        b_value,
        mu: system.omega0 / (system.hbar * system.lambda),
        energy: energy_appb(n, d, system.omega0, system.hbar),
        problem: appb_problem(system, b_value, d, n),
    }
}

/// `ψ(x) = exp(μz/2) z^d S(z)` with `z = 1/(1 + λx²)`.
pub fn appb_psi(system: &PdmSystem, d: f64, roots: &[Complex64], x: f64) -> Complex64 {
    let mu = system.omega0 / (system.hbar * system.lambda);
    let z = 1.0 / (1.0 + system.lambda * x * x);
    let s: Complex64 = roots.iter().map(|r| Complex64::new(z, 0.0) - r).product();
    s * (0.5 * mu * z).exp() * z.powf(d)
}

/// `∫|ψ|² dx`, or `None` when the tail is not square integrable.
pub fn appb_norm(system: &PdmSystem, d: f64, roots: &[Complex64]) -> Option<f64> {
    let zero_roots = roots.iter().filter(|r| r.norm() < 1e-12).count() as f64;
    if d + zero_roots <= 0.25 {
        return None;
    }
    let peak = (0.5 * system.omega0 / (system.hbar * system.lambda)).exp();
    let f = |x: f64| appb_psi(system, d, roots, x).norm_sqr();
    gauss_kronrod(f, f64::NEG_INFINITY, f64::INFINITY, 1e-9 * peak * peak)
        .ok()
        .map(|e| e.value)
        .filter(|v| v.is_finite() && *v > 0.0)
}

/// A quasi-exact level of the sextic system together with the ordering
/// constant that makes it exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasiExactLevel {
    pub n: usize,
    pub d: f64,
    pub energy: f64,
    pub required_b: f64,
    pub solution: BetheSolution,
    pub norm: Option<f64>,
}

/// Every root set at degree `n` for `A` fixed, each paired with its `B`.
pub fn appb_levels(system: &PdmSystem, a_value: f64, n: usize, seed: u64) -> Result<Vec<QuasiExactLevel>> {
    let (hi, lo) = d_roots(a_value)?;
    let mut levels = Vec::new();
    for (d, other) in [(hi, lo), (lo, hi)] {
        let base = reduction_with_d(system, a_value, 0.0, d, other, n);
        for r in bethe_roots(&base.problem, seed)? {
            if !r.all_real() {
                continue;
            }
            let b = base.required_b(r.sum().re);
            let red = reduction_with_d(system, a_value, b, d, other, n);
            let solution = finish(&red.problem, &r, Some(red.energy));
            let norm = appb_norm(system, d, &r.roots);
            levels.push(QuasiExactLevel { n, d, energy: red.energy, required_b: b, solution, norm });
        }
        if levels.iter().any(|l| l.norm.is_some()) {
            break;
        }
    }
    Ok(levels)
}

/// Smallest relative distance from `energy` to the numeric spectrum of `system` under `agg`.
pub fn spectrum_distance(system: &PdmSystem, agg: &OrderingAggregate, energy: f64, grid: &GridSpec) -> Result<f64> {
    let op = assemble(system, agg, grid)?;
    let levels = eigenvalues(&op, grid.levels)?;
    Ok(levels.iter().map(|e| (e - energy).abs() / energy.abs()).fold(f64::INFINITY, f64::min))
}

/// Biconfluent-Heun form of the quasi-exact branch of an exact system.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeunReduction {
    pub mu: f64,
    pub energy: f64,
    pub problem: BetheProblem,
}

/// For the exponential system the branch needs `A = −d(d−2)`, for the
/// nonpolynomial one `B = −d(d−3)`.
pub fn heun_reduction(system: &PdmSystem, agg: &OrderingAggregate, d: f64, n: usize) -> Result<HeunReduction> {
    let (hbar, w) = (system.hbar, system.omega0);
    let nf = n as f64;
    match system.id {
        SystemId::ExpOscillator => {
            let a = constraint_a(agg);
            let want = -d * (d - 2.0);
            if (a - want).abs() > 1e-12 {
                return Err(Error::InvalidOrdering { constraint: "A = -d(d-2)", residual: a - want });
            }
            let mu = w / hbar;
            let energy = hbar * w * (nf + d);
            let xi = 2.0 * energy / (hbar * hbar);
            Ok(HeunReduction {
                mu,
                energy,
                problem: BetheProblem {
                    a: [0.0, 1.0, 0.0, 0.0],
                    b: [2.0 * d - 1.0, 2.0 * mu, -2.0 * mu],
                    c: [mu * (2.0 * d - 1.0), xi - 2.0 * mu * d],
                    degree: n,
                },
            })
        }
        SystemId::NonPolyOscillator => {
            let b = constraint_b_nonpoly(agg);
            let want = -d * (d - 3.0);
            if (b - want).abs() > 1e-12 {
                return Err(Error::InvalidOrdering { constraint: "B = -d(d-3)", residual: b - want });
            }
            let l2 = system.lambda * system.lambda;
            let mu = w / (hbar * l2);
            let energy = hbar * w * (nf + d - 0.5);
            let eps = 2.0 * energy / (hbar * hbar * l2);
            Ok(HeunReduction {
                mu,
                energy,
                problem: BetheProblem {
                    a: [0.0, 1.0, 0.0, 0.0],
                    b: [2.0 * (d - 1.0), 2.0 * mu, -2.0 * mu],
                    c: [2.0 * mu * (d - 1.0), eps + mu - 2.0 * mu * d],
                    degree: n,
                },
            })
        }
        other => Err(Error::ReductionUnavailable(format!("`{}` has no biconfluent branch", other.name()))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheResiduals {
    pub bethe: f64,
    pub coeff_match: f64,
    pub b_consistency: f64,
}

/// Serializable summary of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetheReport {
    pub n: usize,
    pub d: f64,
    pub roots: Vec<[f64; 2]>,
    pub energy: f64,
    pub required_b: Option<f64>,
    pub normalizable: bool,
    pub residuals: BetheResiduals,
}

impl BetheReport {
    pub fn new(n: usize, d: f64, energy: f64, sol: &BetheSolution, required_b: Option<f64>, normalizable: bool) -> Self {
        BetheReport {
            n,
            d,
            roots: sol.roots.iter().map(|z| [z.re, z.im]).collect(),
            energy,
            required_b,
            normalizable,
            residuals: BetheResiduals {
                bethe: sol.bethe_residual,
                coeff_match: sol.coeff_match,
                b_consistency: sol.constraint_residuals.1,
            },
        }
    }
}
