//! Finite-difference oracle for the Hermitian PDM Schrödinger operator
//!
//! `Ĥ = −(ħ²/2) d/dx (1/m) d/dx + V_eff`,
//! `V_eff = V + (ħ²/2)[((ᾱ+γ̄)/2)(1/m)″ + (‾αγ + η²) m′²/m³]`.
//!
//! Two discretisations share one symmetric tridiagonal form `T φ = E φ`,
//! `ψ = J^{-1/2} φ`, with `J = dx/dq` and uniform spacing `h` in `q`:
//!
//! * `Physical` (`q = x`, `J = 1`): the flux stencil
//!   `−(ħ²/2h²)[w_{i+½}(ψ_{i+1}−ψ_i) − w_{i−½}(ψ_i−ψ_{i−1})] + V_eff ψ` with `w = 1/m` at midpoints.
//! * `Liouville` (`q = s = ∫√m dx`, `J = m^{-1/2}`): the normal form
//!   `−(ħ²/2) χ″ + U χ`, `χ = m^{-1/4} ψ`,
//!   `U = V_eff − (ħ²/8)[m″/m² − (7/4) m′²/m³]`.
//!   Every catalog potential is a parabola in `s`, and walls of the
//!   `s`-interval (where `x = ±∞`) become ordinary Dirichlet ends.
//!
//! Either way `Σ ψ² J h ≈ ∫ψ² dx`.

use serde::{Deserialize, Serialize};

use crate::analytic;
use crate::catalog::{Interval, PdmModel, PdmSystem};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ordering::{OrderingAggregate, OrderingScheme};

/// `m ≡ m₀`, `V = ½ m₀ω²x²`: the reference problem with a known spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantMassOscillator {
    pub mass: f64,
    pub omega: f64,
    pub hbar: f64,
}

impl PdmModel for ConstantMassOscillator {
    fn hbar(&self) -> f64 {
        self.hbar
    }
    fn mass(&self, _x: f64) -> f64 {
        self.mass
    }
    fn mass_d1(&self, _x: f64) -> f64 {
        0.0
    }
    fn mass_d2(&self, _x: f64) -> f64 {
        0.0
    }
    fn potential(&self, x: f64) -> f64 {
        0.5 * self.mass * self.omega * self.omega * x * x
    }
    fn domain(&self) -> Interval {
        Interval::REAL_LINE
    }
    fn liouville(&self, x: f64) -> Option<f64> {
        Some(self.mass.sqrt() * x)
    }
    fn from_liouville(&self, s: f64) -> Option<f64> {
        Some(s / self.mass.sqrt())
    }
    fn liouville_interval(&self) -> Option<Interval> {
        Some(Interval::REAL_LINE)
    }
    fn liouville_well(&self) -> Option<(f64, f64)> {
        Some((0.0, (self.hbar / self.omega).sqrt()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Coordinate {
    /// Uniform in `x`.
    Physical,
    /// Uniform in `s = ∫√m dx`.
    #[default]
    Liouville,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Number of nodes, boundary nodes included.
    pub points: usize,
    pub coordinate: Coordinate,
    /// End points in the chosen coordinate; picked automatically when absent.
    pub range: Option<(f64, f64)>,
    /// How many levels the automatic range must hold comfortably.
    pub levels: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            points: 4001,
            coordinate: Coordinate::Liouville,
            range: None,
            levels: 10,
        }
    }
}

impl GridSpec {
    pub fn with_points(mut self, points: usize) -> Self {
        self.points = points;
        self
    }
    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.range = Some((lo, hi));
        self
    }
    pub fn with_coordinate(mut self, c: Coordinate) -> Self {
        self.coordinate = c;
        self
    }
    pub fn with_levels(mut self, k: usize) -> Self {
        self.levels = k;
        self
    }
}

/// Automatic range in the Liouville coordinate: the well centre plus
/// `σ(√(2k+1) + 9)` either side, clipped to the image of the domain.
pub fn auto_liouville_range(model: &dyn PdmModel, levels: usize) -> Result<(f64, f64)> {
    let (c, sigma) = model
        .liouville_well()
        .ok_or_else(|| Error::param("model has no closed-form Liouville map"))?;
    let iv = model.liouville_interval().unwrap_or(Interval::REAL_LINE);
    let span = sigma * (((2 * levels + 1) as f64).sqrt() + 9.0);
    Ok(((c - span).max(iv.lo), (c + span).min(iv.hi)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscretizedOperator {
    pub coordinate: Coordinate,
    pub hbar: f64,
    /// Uniform spacing in the computational coordinate.
    pub h: f64,
    /// Computational nodes, boundary nodes included.
    pub q: Vec<f64>,
    /// Physical positions; `±∞` where a boundary node sits at a wall of the Liouville image.
    pub x: Vec<f64>,
    /// `dx/dq` at the nodes (`NaN` on wall nodes).
    pub jac: Vec<f64>,
    /// `V_eff` at the nodes (`NaN` on wall nodes).
    pub veff: Vec<f64>,
    /// Diagonal of `T` on the `points − 2` interior nodes.
    pub diag: Vec<f64>,
    /// Couplings of `T` between nodes `i` and `i + 1`, boundary links included.
    pub offdiag: Vec<f64>,
}

/// `V_eff` of the Hermitian operator for an arbitrary aggregate.
pub fn effective_potential(model: &dyn PdmModel, agg: &OrderingAggregate, x: f64) -> f64 {
    let m = model.mass(x);
    let m1 = model.mass_d1(x);
    let m2 = model.mass_d2(x);
    let hb = model.hbar();
    let inv_m_dd = -m2 / (m * m) + 2.0 * m1 * m1 / (m * m * m);
    let grad = m1 * m1 / (m * m * m);
    model.potential(x)
        + 0.5 * hb * hb * (agg.mass_curvature_coeff() * inv_m_dd + (agg.agbar + agg.eta * agg.eta) * grad)
}

struct Map<'a> {
    model: &'a dyn PdmModel,
    coordinate: Coordinate,
}

impl Map<'_> {
    fn x(&self, q: f64) -> f64 {
        match self.coordinate {
            Coordinate::Physical => q,
            Coordinate::Liouville => self.model.from_liouville(q).unwrap_or(f64::NAN),
        }
    }
    /// `dx/dq` and `d²x/dq²` at physical position `x`.
    fn jac(&self, x: f64) -> (f64, f64) {
        match self.coordinate {
            Coordinate::Physical => (1.0, 0.0),
            Coordinate::Liouville => {
                let m = self.model.mass(x);
                (1.0 / m.sqrt(), -0.5 * self.model.mass_d1(x) / (m * m))
            }
        }
    }
}

pub fn assemble(model: &dyn PdmModel, agg: &OrderingAggregate, spec: &GridSpec) -> Result<DiscretizedOperator> {
    if spec.points < 5 {
        return Err(Error::param("grid needs at least 5 points"));
    }
    if spec.coordinate == Coordinate::Liouville && model.liouville_well().is_none() {
        return Err(Error::param("Liouville grid requested for a model without a Liouville map"));
    }
    let map = Map { model, coordinate: spec.coordinate };
    let (qlo, qhi) = match spec.range {
        Some(r) => r,
        None => auto_range(model, spec)?,
    };
    if !(qlo < qhi) || !qlo.is_finite() || !qhi.is_finite() {
        return Err(Error::Domain(format!("bad grid range [{qlo}, {qhi}]")));
    }
    let n = spec.points;
    let h = (qhi - qlo) / (n - 1) as f64;
    let q: Vec<f64> = (0..n).map(|i| if i + 1 == n { qhi } else { qlo + i as f64 * h }).collect();
    let dom = model.domain();
    let x: Vec<f64> = q.iter().map(|&v| map.x(v)).collect();

    // a Dirichlet node may sit on a wall of the Liouville image (at finite or
    // infinite x); everything else must be strictly inside
    let iv = model.liouville_interval().unwrap_or(Interval::REAL_LINE);
    let on_wall = |i: usize| {
        (i == 0 || i + 1 == n) && spec.coordinate == Coordinate::Liouville && (q[i] == iv.lo || q[i] == iv.hi)
    };
    for (i, (&qi, &xi)) in q.iter().zip(&x).enumerate() {
        if on_wall(i) {
            continue;
        }
        if !(xi > dom.lo && xi < dom.hi) || !xi.is_finite() {
            return Err(Error::Domain(format!(
                "grid node {i} at x = {xi} is not strictly inside ({}, {})",
                dom.lo, dom.hi
            )));
        }
        if spec.coordinate == Coordinate::Liouville && !(qi >= iv.lo && qi <= iv.hi) {
            return Err(Error::Domain(format!("grid node {i} at s = {qi} leaves the Liouville image")));
        }
    }

    let inside = |i: usize| !on_wall(i) && x[i].is_finite();
    let jac: Vec<f64> = (0..n).map(|i| if inside(i) { map.jac(x[i]).0 } else { f64::NAN }).collect();
    let veff: Vec<f64> = (0..n)
        .map(|i| if inside(i) { effective_potential(model, agg, x[i]) } else { f64::NAN })
        .collect();
    let k = 0.5 * model.hbar() * model.hbar() / (h * h);
    let (diag, offdiag): (Vec<f64>, Vec<f64>) = match spec.coordinate {
        Coordinate::Physical => {
            let w: Vec<f64> = (0..n - 1).map(|i| 1.0 / model.mass(0.5 * (x[i] + x[i + 1]))).collect();
            if w.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                return Err(Error::Domain("non-positive or non-finite mass on the grid".into()));
            }
            ((1..n - 1).map(|i| k * (w[i - 1] + w[i]) + veff[i]).collect(), w.iter().map(|v| -k * v).collect())
        }
        Coordinate::Liouville => {
            let hb = model.hbar();
            let diag = (1..n - 1)
                .map(|i| {
                    let xi = x[i];
                    let (m, m1, m2) = (model.mass(xi), model.mass_d1(xi), model.mass_d2(xi));
                    let u = veff[i] - 0.125 * hb * hb * (m2 / (m * m) - 1.75 * m1 * m1 / (m * m * m));
                    2.0 * k + u
                })
                .collect();
            (diag, vec![-k; n - 1])
        }
    };
    if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
        return Err(Error::Domain("operator has non-finite entries; the range touches a singularity".into()));
    }
    Ok(DiscretizedOperator {
        coordinate: spec.coordinate,
        hbar: model.hbar(),
        h,
        q,
        x,
        jac,
        veff,
        diag,
        offdiag,
    })
}

fn auto_range(model: &dyn PdmModel, spec: &GridSpec) -> Result<(f64, f64)> {
    let (slo, shi) = auto_liouville_range(model, spec.levels)?;
    match spec.coordinate {
        Coordinate::Liouville => Ok((slo, shi)),
        Coordinate::Physical => {
            let iv = model.liouville_interval().unwrap_or(Interval::REAL_LINE);
            let (_, sigma) = model.liouville_well().unwrap_or((0.0, 1.0));
            let pull = 1e-10 * sigma;
            let lo = if slo <= iv.lo { slo + pull } else { slo };
            let hi = if shi >= iv.hi { shi - pull } else { shi };
            let to_x = |s: f64| model.from_liouville(s).unwrap_or(f64::NAN);
            Ok((to_x(lo), to_x(hi)))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigenpair {
    pub energy: f64,
    /// ψ at every node (zero on the Dirichlet nodes), with `Σ ψ² J h = 1`.
    pub psi: Vec<f64>,
}

impl DiscretizedOperator {
    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    fn interior_offdiag(&self) -> &[f64] {
        &self.offdiag[1..self.offdiag.len() - 1]
    }

    /// Applies the discrete operator to ψ at interior node `i`.
    pub fn apply_at(&self, psi: &[f64], i: usize) -> f64 {
        let phi = |j: usize| psi[j] * self.jac[j].sqrt();
        let t = self.offdiag[i - 1] * phi(i - 1) + self.diag[i - 1] * phi(i) + self.offdiag[i] * phi(i + 1);
        t / self.jac[i].sqrt()
    }

    /// Interior nodes whose stencil stays off the walls.
    pub fn finite_interior(&self) -> impl Iterator<Item = usize> + '_ {
        (1..self.len() - 1).filter(move |&i| self.jac[i - 1].is_finite() && self.jac[i + 1].is_finite())
    }

    /// `∫ f g dx` by the grid quadrature.
    pub fn inner(&self, f: &[f64], g: &[f64]) -> f64 {
        (1..self.len() - 1).map(|i| f[i] * g[i] * self.jac[i]).sum::<f64>() * self.h
    }
}

/// The `k` lowest eigenpairs of the discrete operator.
pub fn spectrum(op: &DiscretizedOperator, k: usize) -> Result<Vec<Eigenpair>> {
    if k > op.diag.len() {
        return Err(Error::param(format!("asked for {k} levels from {} unknowns", op.diag.len())));
    }
    let pairs = linalg::lowest_eigenpairs(&op.diag, op.interior_offdiag(), k)?;
    Ok(pairs
        .into_iter()
        .map(|(energy, phi)| {
            let mut psi = vec![0.0; op.len()];
            let scale = 1.0 / op.h.sqrt();
            for (i, p) in phi.iter().enumerate() {
                psi[i + 1] = scale * p / op.jac[i + 1].sqrt();
            }
            Eigenpair { energy, psi }
        })
        .collect())
}

/// Eigenvalues only.
pub fn eigenvalues(op: &DiscretizedOperator, k: usize) -> Result<Vec<f64>> {
    if k > op.diag.len() {
        return Err(Error::param(format!("asked for {k} levels from {} unknowns", op.diag.len())));
    }
    Ok((0..k).map(|j| linalg::kth_eigenvalue(&op.diag, op.interior_offdiag(), j)).collect())
}

/// `max_i |(Ĥψ)_i − Eψ_i| / (1 + |Eψ_i|)` over interior nodes, optionally
/// restricted to `x ∈ window`.
pub fn residual_in(op: &DiscretizedOperator, psi: &dyn Fn(f64) -> f64, e: f64, window: Option<(f64, f64)>) -> f64 {
    let vals: Vec<f64> = op.x.iter().map(|&x| if x.is_finite() { psi(x) } else { 0.0 }).collect();
    op.finite_interior()
        .filter(|&i| window.is_none_or(|(a, b)| op.x[i] >= a && op.x[i] <= b))
        .map(|i| {
            let ep = e * vals[i];
            (op.apply_at(&vals, i) - ep).abs() / (1.0 + ep.abs())
        })
        .fold(0.0, f64::max)
}

pub fn residual(op: &DiscretizedOperator, psi: &dyn Fn(f64) -> f64, e: f64) -> f64 {
    residual_in(op, psi, e, None)
}

/// The non-Hermitian ordered operator applied to φ at interior node `i` with
/// centred differences in `q` and the chain rule.
fn nonhermitian_apply(model: &dyn PdmModel, agg: &OrderingAggregate, op: &DiscretizedOperator, phi: &[f64], i: usize) -> f64 {
    let map = Map { model, coordinate: op.coordinate };
    let x = op.x[i];
    let (j, jq) = map.jac(x);
    let dq = (phi[i + 1] - phi[i - 1]) / (2.0 * op.h);
    let dqq = (phi[i + 1] - 2.0 * phi[i] + phi[i - 1]) / (op.h * op.h);
    let d1 = dq / j;
    let d2 = dqq / (j * j) - dq * jq / (j * j * j);
    let m = model.mass(x);
    let m1 = model.mass_d1(x);
    let m2 = model.mass_d2(x);
    let hb = model.hbar();
    let bracket = d2 / m
        + (agg.gbar - 1.0 - agg.abar) * m1 / (m * m) * d1
        + (agg.gbar * m2 / (m * m) - (2.0 * agg.gbar + agg.agbar) * m1 * m1 / (m * m * m)) * phi[i];
    -0.5 * hb * hb * bracket + model.potential(x) * phi[i]
}

/// Scaled residual of the general (possibly non-Hermitian) ordered operator
/// on `phi`, evaluated on the nodes of `grid`.
pub fn nonhermitian_residual_in(
    model: &dyn PdmModel,
    agg: &OrderingAggregate,
    grid: &DiscretizedOperator,
    phi: &dyn Fn(f64) -> f64,
    e: f64,
    window: Option<(f64, f64)>,
) -> f64 {
    let vals: Vec<f64> = grid.x.iter().map(|&x| if x.is_finite() { phi(x) } else { 0.0 }).collect();
    grid.finite_interior()
        .filter(|&i| window.is_none_or(|(a, b)| grid.x[i] >= a && grid.x[i] <= b))
        .map(|i| {
            let ep = e * vals[i];
            (nonhermitian_apply(model, agg, grid, &vals, i) - ep).abs() / (1.0 + ep.abs())
        })
        .fold(0.0, f64::max)
}

pub fn nonhermitian_residual(
    model: &dyn PdmModel,
    agg: &OrderingAggregate,
    grid: &DiscretizedOperator,
    phi: &dyn Fn(f64) -> f64,
    e: f64,
) -> f64 {
    nonhermitian_residual_in(model, agg, grid, phi, e, None)
}

/// Richardson extrapolation for a second-order quantity at spacings `h` and `h/2`.
pub fn richardson(coarse: f64, fine: f64) -> f64 {
    (4.0 * fine - coarse) / 3.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridInfo {
    pub n: usize,
    pub h: f64,
    pub coordinate: Coordinate,
    pub x_lo: f64,
    pub x_hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub system: String,
    pub lambda: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub ordering: OrderingReport,
    pub grid: GridInfo,
    pub eigenvalues: Vec<f64>,
    /// Closed-form levels when the system and ordering have them.
    pub analytic: Option<Vec<f64>>,
    pub abs_err: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingReport {
    pub scheme: OrderingScheme,
    pub aggregate: OrderingAggregate,
}

pub fn spectrum_report(system: &PdmSystem, scheme: &OrderingScheme, spec: &GridSpec, levels: usize) -> Result<SpectrumReport> {
    let agg = scheme.aggregate()?;
    let spec = GridSpec { levels: spec.levels.max(levels), ..*spec };
    let op = assemble(system, &agg, &spec)?;
    let eigenvalues = eigenvalues(&op, levels)?;
    let analytic = match analytic::check_ordering(system, &agg) {
        Ok(()) => Some((0..levels).map(|n| analytic::energy(n, system)).collect::<Result<Vec<_>>>()?),
        Err(_) => None,
    };
    let abs_err = analytic
        .as_ref()
        .map(|a| a.iter().zip(&eigenvalues).map(|(x, y)| (x - y).abs()).collect());
    Ok(SpectrumReport {
        system: system.id.name().to_string(),
        lambda: system.lambda,
        omega0: system.omega0,
        hbar: system.hbar,
        ordering: OrderingReport { scheme: scheme.clone(), aggregate: agg },
        grid: GridInfo {
            n: op.len(),
            h: op.h,
            coordinate: op.coordinate,
            x_lo: op.x[0],
            x_hi: op.x[op.len() - 1],
        },
        eigenvalues,
        analytic,
        abs_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{make_system, SystemId};
    use crate::ordering::{constraint_a, OrderingScheme};

    fn bdd() -> OrderingAggregate {
        OrderingScheme::bendaniel_duke().aggregate().unwrap()
    }

    #[test]
    fn harmonic_oscillator_physical_grid() {
        let ho = ConstantMassOscillator { mass: 1.0, omega: 1.0, hbar: 1.0 };
        let spec = GridSpec::default()
            .with_coordinate(Coordinate::Physical)
            .with_range(-10.0, 10.0)
            .with_points(4001);
        let op = assemble(&ho, &bdd(), &spec).unwrap();
        assert!((op.h - 0.005).abs() < 1e-15);
        let ev = eigenvalues(&op, 6).unwrap();
        assert!((ev[0] - 0.5).abs() < 1e-5);
        for (n, e) in ev.iter().enumerate() {
            assert!((e - (n as f64 + 0.5)).abs() < 1e-4, "{n}: {e}");
        }
    }

    #[test]
    fn harmonic_oscillator_is_second_order() {
        let ho = ConstantMassOscillator { mass: 2.0, omega: 1.5, hbar: 0.8 };
        let errs: Vec<f64> = [201, 401, 801]
            .iter()
            .map(|&n| {
                let spec = GridSpec::default().with_range(-8.0, 8.0).with_points(n);
                let op = assemble(&ho, &bdd(), &spec).unwrap();
                (eigenvalues(&op, 3).unwrap()[2] - 2.5 * 0.8 * 1.5).abs()
            })
            .collect();
        let r1 = errs[0] / errs[1];
        let r2 = errs[1] / errs[2];
        assert!((3.5..4.5).contains(&r1) && (3.5..4.5).contains(&r2), "{errs:?}");
    }

    #[test]
    fn matrix_is_symmetric_and_eigenvectors_normalised() {
        let s = make_system(SystemId::NonPolyOscillator, 1.0, 2.0, 1.0).unwrap();
        let op = assemble(&s, &bdd(), &GridSpec::default().with_points(801)).unwrap();
        assert_eq!(op.offdiag.len(), op.diag.len() + 1);
        let pairs = spectrum(&op, 4).unwrap();
        for a in &pairs {
            for b in &pairs {
                let want = if a.energy == b.energy { 1.0 } else { 0.0 };
                assert!((op.inner(&a.psi, &b.psi) - want).abs() < 1e-10);
            }
            // eigenvector satisfies the unsymmetrised discrete equation
            for i in op.finite_interior() {
                let r = op.apply_at(&a.psi, i) - a.energy * a.psi[i];
                assert!(r.abs() < 1e-6 * (1.0 + a.energy));
            }
        }
    }

    #[test]
    fn effective_potential_of_exp_depends_only_on_a() {
        let s = make_system(SystemId::ExpOscillator, 1.0, 2.0, 1.0).unwrap();
        let one = OrderingScheme::von_roos_a34(0.0).unwrap().aggregate().unwrap();
        let two = OrderingScheme::von_roos_a34(0.7).unwrap().aggregate().unwrap();
        let three = OrderingAggregate::from_bars(0.0, -1.0, 1.0 / 16.0);
        assert!((constraint_a(&three) - 0.75).abs() < 1e-14);
        for x in [-3.0, -0.5, 0.0, 1.2] {
            let v = effective_potential(&s, &one, x);
            assert!((effective_potential(&s, &two, x) - v).abs() < 1e-12 * (1.0 + v.abs()));
            assert!((effective_potential(&s, &three, x) - v).abs() < 1e-12 * (1.0 + v.abs()));
            // C = λ²A, so V_eff = V − ħ²λ²A/(2m)
            let closed = s.potential(x) - 0.75 / (2.0 * s.mass(x));
            assert!((v - closed).abs() < 1e-12 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn hermitian_schemes_use_the_printed_form() {
        // with ᾱ = γ̄ the potential is V + (ħ²/2)[γ̄(1/m)″ + ‾αγ m′²/m³]
        let s = make_system(SystemId::NonPolyOscillator, 0.6, 2.0, 1.3).unwrap();
        let agg = OrderingScheme::von_roos(-0.2, -0.5, -0.3).unwrap().aggregate().unwrap();
        for x in [-0.5, 0.0, 2.0] {
            let (m, m1, m2) = (s.mass(x), s.mass_d1(x), s.mass_d2(x));
            let inv_dd = -m2 / (m * m) + 2.0 * m1 * m1 / (m * m * m);
            let want = s.potential(x) + 0.5 * 1.3 * 1.3 * (agg.gbar * inv_dd + agg.agbar * m1 * m1 / (m * m * m));
            assert!((effective_potential(&s, &agg, x) - want).abs() < 1e-12 * (1.0 + want.abs()));
        }
    }

    #[test]
    fn rejects_grids_touching_the_singularity() {
        let s = make_system(SystemId::NonPolyOscillator, 1.0, 2.0, 1.0).unwrap();
        let bad = GridSpec::default().with_coordinate(Coordinate::Physical).with_range(-1.0, 3.0);
        assert!(matches!(assemble(&s, &bdd(), &bad), Err(Error::Domain(_))));
        let bad = GridSpec::default().with_coordinate(Coordinate::Physical).with_range(-2.0, 3.0);
        assert!(assemble(&s, &bdd(), &bad).is_err());
        let ok = GridSpec::default()
            .with_coordinate(Coordinate::Physical)
            .with_range(-1.0 + 1e-6, 3.0)
            .with_points(401);
        assert!(assemble(&s, &bdd(), &ok).is_ok());
        let bad = GridSpec::default().with_range(-5.0, 1.5);
        assert!(assemble(&s, &bdd(), &bad).is_err());
    }

    #[test]
    fn negative_control_residual_is_large() {
        let s = make_system(SystemId::ExpOscillator, 1.0, 2.0, 1.0).unwrap();
        let agg = OrderingScheme::von_roos_a34(0.0).unwrap().aggregate().unwrap();
        let op = assemble(&s, &agg, &GridSpec::default()).unwrap();
        let r = residual_in(&op, &|x: f64| (-(x * x)).exp() * (3.0 * x).cos(), 1.0, Some((-2.0, 2.0)));
        assert!(r > 0.1, "{r}");
    }

    #[test]
    fn report_carries_analytic_levels() {
        let s = make_system(SystemId::ExpOscillator, 1.0, 2.0, 1.0).unwrap();
        let scheme = OrderingScheme::von_roos_a34(0.0).unwrap();
        let rep = spectrum_report(&s, &scheme, &GridSpec::default().with_points(801), 3).unwrap();
        assert_eq!(rep.analytic.as_deref(), Some(&[1.0, 3.0, 5.0][..]));
        assert_eq!(rep.eigenvalues.len(), 3);
        let gw = OrderingScheme::gora_williams();
        let rep = spectrum_report(&s, &gw, &GridSpec::default().with_points(801), 3).unwrap();
        assert!(rep.analytic.is_none());
        let json = serde_json::to_string(&rep).unwrap();
        assert!(json.contains("\"eigenvalues\""));
    }
}
