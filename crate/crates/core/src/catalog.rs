//! Catalog of position-dependent-mass oscillators.
//!
//! Every system is a classical Hamiltonian `H = p²/(2 m(x)) + V(x)` whose
//! equation of motion is a quadratic Liénard equation. Mass derivatives are
//! hard-coded in closed form; nothing here differentiates numerically.
//!
//! Each system also carries its Liouville coordinate `s(x) = ∫ √m dx`, in
//! which the kinetic term becomes that of a unit-mass particle. For every
//! entry of the catalog the potential is a plain harmonic well in `s`, which
//! is what makes the coordinate useful for truncating and meshing domains.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Open interval `(lo, hi)`; either end may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const REAL_LINE: Interval = Interval {
        lo: f64::NEG_INFINITY,
        hi: f64::INFINITY,
    };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lo && x < self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SystemId {
    /// `m = λ² e^{2λx}`, `V = (ω₀²/2)(1 − e^{λx})²`.
    #[serde(rename = "exp")]
    ExpOscillator,
    /// `m = (1 + λx)^{-4}`, `V = (ω₀²/2) x²/(1 + λx)²`.
    #[serde(rename = "nonpoly")]
    NonPolyOscillator,
    /// `m = (1 + λx²)^{-3}`, `V = (ω²/2) x²/(1 + λx²)`, with `λ ≥ 0`.
    #[serde(rename = "sextic")]
    AppBSextic,
    /// `m = 1/(1 + λ²x²)`, `V = (ω²/2λ²) asinh²(λx)`.
    #[serde(rename = "log")]
    AppBLog,
    /// `m = (λx − 2)²/(4(1 − λx)³)`, `V = ω²x²/(2(1 − λx))`.
    #[serde(rename = "rational")]
    AppBRational,
    /// `m = (ν + 1)² x^{2ν}`, `V = (ω²/2) x^{2ν+2}` on `x > 0`; `λ` plays the role of `ν`.
    #[serde(rename = "power")]
    AppBPower,
}

impl SystemId {
    pub const ALL: [SystemId; 6] = [
        SystemId::ExpOscillator,
        SystemId::NonPolyOscillator,
        SystemId::AppBSextic,
        SystemId::AppBLog,
        SystemId::AppBRational,
        SystemId::AppBPower,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::ExpOscillator => "exp",
            SystemId::NonPolyOscillator => "nonpoly",
            SystemId::AppBSextic => "sextic",
            SystemId::AppBLog => "log",
            SystemId::AppBRational => "rational",
            SystemId::AppBPower => "power",
        }
    }

    /// Systems with closed-form eigenfunctions for suitable orderings.
    pub fn has_exact_solutions(self) -> bool {
        matches!(self, SystemId::ExpOscillator | SystemId::NonPolyOscillator)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SystemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SystemId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::param(format!("unknown system id `{s}`")))
    }
}

/// Interface the numerical layer needs from a mass profile and potential.
pub trait PdmModel {
    fn hbar(&self) -> f64;
    fn mass(&self, x: f64) -> f64;
    fn mass_d1(&self, x: f64) -> f64;
    fn mass_d2(&self, x: f64) -> f64;
    fn potential(&self, x: f64) -> f64;
    /// Open interval on which `m > 0` and `V` is finite.
    fn domain(&self) -> Interval;

    /// Liouville coordinate `s(x)`, increasing in `x`, if known in closed form.
    fn liouville(&self, _x: f64) -> Option<f64> {
        None
    }
    fn from_liouville(&self, _s: f64) -> Option<f64> {
        None
    }
    /// Image of [`PdmModel::domain`] under the Liouville map.
    fn liouville_interval(&self) -> Option<Interval> {
        None
    }
    /// Centre and width `√(ħ/ω)` of the harmonic well in the Liouville coordinate.
    fn liouville_well(&self) -> Option<(f64, f64)> {
        None
    }
}

/// A catalog entry. Immutable and `Copy`; all evaluators are pure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdmSystem {
    pub id: SystemId,
    pub lambda: f64,
    pub omega0: f64,
    pub hbar: f64,
}

/// JSON form of a system, e.g. `{"system": "exp", "lambda": 1.0, "omega0": 2.0, "hbar": 1.0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub system: SystemId,
    pub lambda: f64,
    pub omega0: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

fn default_hbar() -> f64 {
    1.0
}

impl SystemConfig {
    pub fn build(&self) -> Result<PdmSystem> {
        make_system(self.system, self.lambda, self.omega0, self.hbar)
    }
}

impl From<&PdmSystem> for SystemConfig {
    fn from(s: &PdmSystem) -> Self {
        SystemConfig {
            system: s.id,
            lambda: s.lambda,
            omega0: s.omega0,
            hbar: s.hbar,
        }
    }
}

pub fn make_system(id: SystemId, lambda: f64, omega0: f64, hbar: f64) -> Result<PdmSystem> {
    if !(omega0.is_finite() && omega0 > 0.0) {
        return Err(Error::param(format!("omega0 must be positive, got {omega0}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::param(format!("hbar must be positive, got {hbar}")));
    }
    if !lambda.is_finite() {
        return Err(Error::param("lambda must be finite"));
    }
    let ok = match id {
        SystemId::ExpOscillator
        | SystemId::NonPolyOscillator
        | SystemId::AppBLog
        | SystemId::AppBRational => lambda != 0.0,
        SystemId::AppBSextic => lambda >= 0.0,
        SystemId::AppBPower => lambda > -1.0,
    };
    if !ok {
        let rule = match id {
            SystemId::AppBSextic => "lambda >= 0",
            SystemId::AppBPower => "nu = lambda > -1",
            _ => "lambda != 0",
        };
        return Err(Error::param(format!("{id} requires {rule}, got {lambda}")));
    }
    Ok(PdmSystem {
        id,
        lambda,
        omega0,
        hbar,
    })
}

impl PdmSystem {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SystemConfig =
            serde_json::from_str(text).map_err(|e| Error::param(format!("system config: {e}")))?;
        cfg.build()
    }

    /// The point where the mass or potential is singular, if it lies on the real line.
    pub fn singular_point(&self) -> Option<f64> {
        match self.id {
            SystemId::NonPolyOscillator => Some(-1.0 / self.lambda),
            SystemId::AppBRational => Some(1.0 / self.lambda),
            SystemId::AppBPower => Some(0.0),
            _ => None,
        }
    }

    pub fn domain(&self) -> Interval {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator | SystemId::AppBSextic | SystemId::AppBLog => {
                Interval::REAL_LINE
            }
            SystemId::NonPolyOscillator => {
                if l > 0.0 {
                    Interval::new(-1.0 / l, f64::INFINITY)
                } else {
                    Interval::new(f64::NEG_INFINITY, 1.0 / l.abs())
                }
            }
            SystemId::AppBRational => {
                if l > 0.0 {
                    Interval::new(f64::NEG_INFINITY, 1.0 / l)
                } else {
                    Interval::new(1.0 / l, f64::INFINITY)
                }
            }
            SystemId::AppBPower => Interval::new(0.0, f64::INFINITY),
        }
    }

    pub fn mass(&self, x: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => l * l * (2.0 * l * x).exp(),
            SystemId::NonPolyOscillator => (1.0 + l * x).powi(-4),
            SystemId::AppBSextic => (1.0 + l * x * x).powi(-3),
            SystemId::AppBLog => 1.0 / (1.0 + l * l * x * x),
            SystemId::AppBRational => {
                let u = 1.0 - l * x;
                (1.0 + u) * (1.0 + u) / (4.0 * u * u * u)
            }
            SystemId::AppBPower => (l + 1.0).powi(2) * x.powf(2.0 * l),
        }
    }

    /// `ln m(x)` without going through `m`, so it stays finite where `m` under- or overflows.
    pub fn log_mass(&self, x: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => 2.0 * l.abs().ln() + 2.0 * l * x,
            SystemId::NonPolyOscillator => -4.0 * (1.0 + l * x).abs().ln(),
            SystemId::AppBSextic => -3.0 * (l * x * x).ln_1p(),
            SystemId::AppBLog => -(l * l * x * x).ln_1p(),
            SystemId::AppBRational => {
                let u = 1.0 - l * x;
                2.0 * (1.0 + u).abs().ln() - 4f64.ln() - 3.0 * u.ln()
            }
            SystemId::AppBPower => 2.0 * (l + 1.0).ln() + 2.0 * l * x.ln(),
        }
    }

    pub fn mass_d1(&self, x: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => 2.0 * l * l * l * (2.0 * l * x).exp(),
            SystemId::NonPolyOscillator => -4.0 * l * (1.0 + l * x).powi(-5),
            SystemId::AppBSextic => -6.0 * l * x * (1.0 + l * x * x).powi(-4),
            SystemId::AppBLog => {
                let q = 1.0 + l * l * x * x;
                -2.0 * l * l * x / (q * q)
            }
            SystemId::AppBRational => {
                let r = 1.0 / (1.0 - l * x);
                l * (r.powi(2) + 4.0 * r.powi(3) + 3.0 * r.powi(4)) / 4.0
            }
            SystemId::AppBPower => (l + 1.0).powi(2) * 2.0 * l * x.powf(2.0 * l - 1.0),
        }
    }

    pub fn mass_d2(&self, x: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => 4.0 * l.powi(4) * (2.0 * l * x).exp(),
            SystemId::NonPolyOscillator => 20.0 * l * l * (1.0 + l * x).powi(-6),
            SystemId::AppBSextic => {
                let q = 1.0 + l * x * x;
                -6.0 * l * q.powi(-4) + 48.0 * l * l * x * x * q.powi(-5)
            }
            SystemId::AppBLog => {
                let q = 1.0 + l * l * x * x;
                8.0 * l.powi(4) * x * x / q.powi(3) - 2.0 * l * l / (q * q)
            }
            SystemId::AppBRational => {
                let r = 1.0 / (1.0 - l * x);
                l * l * (r.powi(3) + 6.0 * r.powi(4) + 6.0 * r.powi(5)) / 2.0
            }
            SystemId::AppBPower => {
                (l + 1.0).powi(2) * 2.0 * l * (2.0 * l - 1.0) * x.powf(2.0 * l - 2.0)
            }
        }
    }

    pub fn potential(&self, x: f64) -> f64 {
        let (l, w2) = (self.lambda, self.omega0 * self.omega0);
        match self.id {
            SystemId::ExpOscillator => 0.5 * w2 * (1.0 - (l * x).exp()).powi(2),
            SystemId::NonPolyOscillator => 0.5 * w2 * x * x / (1.0 + l * x).powi(2),
            SystemId::AppBSextic => 0.5 * w2 * x * x / (1.0 + l * x * x),
            SystemId::AppBLog => 0.5 * w2 * ((l * x).asinh() / l).powi(2),
            SystemId::AppBRational => 0.5 * w2 * x * x / (1.0 - l * x),
            SystemId::AppBPower => 0.5 * w2 * x.powf(2.0 * l + 2.0),
        }
    }

    /// `s(x) = ∫ √m dx`, normalised so that `V = (ω²/2)(s − s_c)²`.
    pub fn liouville(&self, x: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => l.signum() * (l * x).exp(),
            SystemId::NonPolyOscillator => x / (1.0 + l * x),
            SystemId::AppBSextic => x / (1.0 + l * x * x).sqrt(),
            SystemId::AppBLog => (l * x).asinh() / l,
            SystemId::AppBRational => x / (1.0 - l * x).sqrt(),
            SystemId::AppBPower => x.powf(l + 1.0),
        }
    }

    pub fn from_liouville(&self, s: f64) -> f64 {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => s.abs().ln() / l,
            SystemId::NonPolyOscillator => s / (1.0 - l * s),
            SystemId::AppBSextic => s / (1.0 - l * s * s).sqrt(),
            SystemId::AppBLog => (l * s).sinh() / l,
            SystemId::AppBRational => {
                let root = (l * l * s * s + 4.0).sqrt();
                if l * s >= 0.0 {
                    2.0 * s / (root + l * s)
                } else {
                    0.5 * s * (root - l * s)
                }
            }
            SystemId::AppBPower => s.powf(1.0 / (l + 1.0)),
        }
    }

    pub fn liouville_interval(&self) -> Interval {
        let l = self.lambda;
        match self.id {
            SystemId::ExpOscillator => {
                if l > 0.0 {
                    Interval::new(0.0, f64::INFINITY)
                } else {
                    Interval::new(f64::NEG_INFINITY, 0.0)
                }
            }
            SystemId::NonPolyOscillator => {
                if l > 0.0 {
                    Interval::new(f64::NEG_INFINITY, 1.0 / l)
                } else {
                    Interval::new(1.0 / l, f64::INFINITY)
                }
            }
            SystemId::AppBSextic => {
                if l > 0.0 {
                    let w = 1.0 / l.sqrt();
                    Interval::new(-w, w)
                } else {
                    Interval::REAL_LINE
                }
            }
            SystemId::AppBLog | SystemId::AppBRational => Interval::REAL_LINE,
            SystemId::AppBPower => Interval::new(0.0, f64::INFINITY),
        }
    }

    pub fn liouville_well(&self) -> (f64, f64) {
        let centre = match self.id {
            SystemId::ExpOscillator => self.lambda.signum(),
            _ => 0.0,
        };
        (centre, (self.hbar / self.omega0).sqrt())
    }
}

impl PdmModel for PdmSystem {
    fn hbar(&self) -> f64 {
        self.hbar
    }
    fn mass(&self, x: f64) -> f64 {
        PdmSystem::mass(self, x)
    }
    fn mass_d1(&self, x: f64) -> f64 {
        PdmSystem::mass_d1(self, x)
    }
    fn mass_d2(&self, x: f64) -> f64 {
        PdmSystem::mass_d2(self, x)
    }
    fn potential(&self, x: f64) -> f64 {
        PdmSystem::potential(self, x)
    }
    fn domain(&self) -> Interval {
        PdmSystem::domain(self)
    }
    fn liouville(&self, x: f64) -> Option<f64> {
        Some(PdmSystem::liouville(self, x))
    }
    fn from_liouville(&self, s: f64) -> Option<f64> {
        Some(PdmSystem::from_liouville(self, s))
    }
    fn liouville_interval(&self) -> Option<Interval> {
        Some(PdmSystem::liouville_interval(self))
    }
    fn liouville_well(&self) -> Option<(f64, f64)> {
        Some(PdmSystem::liouville_well(self))
    }
}
