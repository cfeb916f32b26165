//! Kinetic-energy ordering algebra.
//!
//! A scheme is a weighted sum of terms `w_i m^{α_i} p m^{β_i} p m^{γ_i}`.
//! Only four weighted averages of the exponents survive in the operator, and
//! all downstream formulas consume those through [`OrderingAggregate`].

use serde::{Deserialize, Serialize};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Tolerance for the exact rational conditions on orderings.
pub const CONSTRAINT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingTerm {
    pub w: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl OrderingTerm {
    pub fn new(w: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        OrderingTerm { w, alpha, beta, gamma }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderingScheme {
    pub terms: Vec<OrderingTerm>,
}

impl OrderingScheme {
    pub fn new(terms: Vec<OrderingTerm>) -> Result<Self> {
        let scheme = OrderingScheme { terms };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let scheme: OrderingScheme =
            serde_json::from_str(text).map_err(|e| Error::param(format!("ordering scheme: {e}")))?;
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<()> {
        if self.terms.is_empty() {
            return Err(Error::param("ordering scheme has no terms"));
        }
        for t in &self.terms {
            let r = t.alpha + t.beta + t.gamma + 1.0;
            if !(r.abs() < CONSTRAINT_TOL) {
                return Err(Error::InvalidOrdering {
                    constraint: "alpha + beta + gamma = -1",
                    residual: r,
                });
            }
        }
        let wsum: f64 = self.terms.iter().map(|t| t.w).sum();
        if !((wsum - 1.0).abs() < CONSTRAINT_TOL) {
            return Err(Error::InvalidOrdering {
                constraint: "sum of weights = 1",
                residual: wsum - 1.0,
            });
        }
        Ok(())
    }

    /// `½[m^α p m^β p m^γ + m^γ p m^β p m^α]`.
    pub fn von_roos(alpha: f64, beta: f64, gamma: f64) -> Result<Self> {
        OrderingScheme::new(vec![
            OrderingTerm::new(0.5, alpha, beta, gamma),
            OrderingTerm::new(0.5, gamma, beta, alpha),
        ])
    }

    /// `½[(1/2m) p² + p² (1/2m)]`.
    pub fn gora_williams() -> Self {
        OrderingScheme {
            terms: vec![
                OrderingTerm::new(0.5, -1.0, 0.0, 0.0),
                OrderingTerm::new(0.5, 0.0, 0.0, -1.0),
            ],
        }
    }

    /// `p (1/m) p`.
    pub fn bendaniel_duke() -> Self {
        OrderingScheme {
            terms: vec![OrderingTerm::new(1.0, 0.0, -1.0, 0.0)],
        }
    }

    /// Von Roos ordering on the `A = 3/4` surface of the exponential oscillator.
    pub fn von_roos_a34(gamma: f64) -> Result<Self> {
        let alpha = solve_vonroos_for_a34(gamma)?;
        OrderingScheme::von_roos(alpha, -1.0 - alpha - gamma, gamma)
    }

    /// Von Roos ordering on the `B = 2` surface of the nonpolynomial oscillator.
    pub fn von_roos_b2(gamma: f64) -> Result<Self> {
        let alpha = solve_vonroos_for_b2(gamma)?;
        OrderingScheme::von_roos(alpha, -1.0 - alpha - gamma, gamma)
    }

    /// A two-term Hermitian scheme realising `ᾱ = γ̄ = s`, `‾αγ = t`.
    pub fn realize_hermitian(s: f64, t: f64) -> Result<Self> {
        let disc = s * s - t;
        let beta = -1.0 - 2.0 * s;
        if disc >= 0.0 {
            let r = disc.sqrt();
            OrderingScheme::von_roos(s + r, beta, s - r)
        } else {
            let r = (-disc).sqrt();
            OrderingScheme::new(vec![
                OrderingTerm::new(0.5, s + r, -1.0 - 2.0 * (s + r), s + r),
                OrderingTerm::new(0.5, s - r, -1.0 - 2.0 * (s - r), s - r),
            ])
        }
    }

    pub fn aggregate(&self) -> Result<OrderingAggregate> {
        aggregate(self)
    }
}

/// Named ordering presets understood by configuration files and the CLI.
///
/// Grammar: `vonroos:<alpha>,<beta>,<gamma>`, `vonroos:a34[:<gamma>]`,
/// `vonroos:b2[:<gamma>]`, `gora-williams`, `bendaniel-duke`.
#[derive(Debug, Clone, PartialEq)]
pub enum OrderingPreset {
    VonRoos { alpha: f64, beta: f64, gamma: f64 },
    VonRoosA34 { gamma: f64 },
    VonRoosB2 { gamma: f64 },
    GoraWilliams,
    BenDanielDuke,
}

impl OrderingPreset {
    pub fn scheme(&self) -> Result<OrderingScheme> {
        match *self {
            OrderingPreset::VonRoos { alpha, beta, gamma } => {
                OrderingScheme::von_roos(alpha, beta, gamma)
            }
            OrderingPreset::VonRoosA34 { gamma } => OrderingScheme::von_roos_a34(gamma),
            OrderingPreset::VonRoosB2 { gamma } => OrderingScheme::von_roos_b2(gamma),
            OrderingPreset::GoraWilliams => Ok(OrderingScheme::gora_williams()),
            OrderingPreset::BenDanielDuke => Ok(OrderingScheme::bendaniel_duke()),
        }
    }
}

impl FromStr for OrderingPreset {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let num = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::param(format!("bad number `{s}` in ordering `{text}`")))
        };
        let mut parts = text.splitn(3, ':');
        let head = parts.next().unwrap_or_default();
        let arg = parts.next();
        let rest = parts.next();
        match (head, arg, rest) {
            ("gora-williams", None, None) => Ok(OrderingPreset::GoraWilliams),
            ("bendaniel-duke", None, None) => Ok(OrderingPreset::BenDanielDuke),
            ("vonroos", Some("a34"), g) => Ok(OrderingPreset::VonRoosA34 {
                gamma: g.map(num).transpose()?.unwrap_or(0.0),
            }),
            ("vonroos", Some("b2"), g) => Ok(OrderingPreset::VonRoosB2 {
                gamma: g.map(num).transpose()?.unwrap_or(0.0),
            }),
            ("vonroos", Some(list), None) => {
                let v: Vec<f64> = list.split(',').map(num).collect::<Result<_>>()?;
                match v.as_slice() {
                    [alpha, beta, gamma] => Ok(OrderingPreset::VonRoos {
                        alpha: *alpha,
                        beta: *beta,
                        gamma: *gamma,
                    }),
                    _ => Err(Error::param(format!("`{text}`: vonroos needs alpha,beta,gamma"))),
                }
            }
            _ => Err(Error::param(format!("unknown ordering preset `{text}`"))),
        }
    }
}

/// Weighted exponent averages `ᾱ, β̄, γ̄, ‾αγ` and the similarity exponent `η = (γ̄ − ᾱ)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OrderingAggregate {
    pub abar: f64,
    pub bbar: f64,
    pub gbar: f64,
    pub agbar: f64,
    pub eta: f64,
}

impl OrderingAggregate {
    /// Builds an aggregate directly, with `β̄ = −1 − ᾱ − γ̄`.
    pub fn from_bars(abar: f64, gbar: f64, agbar: f64) -> Self {
        OrderingAggregate {
            abar,
            bbar: -1.0 - abar - gbar,
            gbar,
            agbar,
            eta: 0.5 * (gbar - abar),
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.eta == 0.0
    }

    /// Coefficient of `m″/m` in the Hermitian Schrödinger equation.
    pub fn mass_curvature_coeff(&self) -> f64 {
        0.5 * (self.abar + self.gbar)
    }

    /// Coefficient of `−m′²/m²` in the Hermitian Schrödinger equation.
    pub fn mass_gradient_coeff(&self) -> f64 {
        let d = self.gbar - self.abar;
        self.agbar + self.gbar + self.abar + 0.25 * d * d
    }
}

pub fn aggregate(scheme: &OrderingScheme) -> Result<OrderingAggregate> {
    scheme.validate()?;
    let (mut a, mut b, mut g, mut ag) = (0.0, 0.0, 0.0, 0.0);
    for t in &scheme.terms {
        a += t.w * t.alpha;
        b += t.w * t.beta;
        g += t.w * t.gamma;
        ag += t.w * t.alpha * t.gamma;
    }
    Ok(OrderingAggregate {
        abar: a,
        bbar: b,
        gbar: g,
        agbar: ag,
        eta: 0.5 * (g - a),
    })
}

/// `A = −4‾αγ − (γ̄ − ᾱ)² − 2(γ̄ + ᾱ)`, the ordering term of the exponential oscillator.
pub fn constraint_a(agg: &OrderingAggregate) -> f64 {
    let d = agg.gbar - agg.abar;
    -4.0 * agg.agbar - d * d - 2.0 * (agg.gbar + agg.abar)
}

pub fn is_exact_exp(agg: &OrderingAggregate) -> bool {
    (constraint_a(agg) - 0.75).abs() < CONSTRAINT_TOL
}

/// `B = −16‾αγ − 4(γ̄ − ᾱ)² − 6(γ̄ + ᾱ)`, the ordering term of the nonpolynomial oscillator.
pub fn constraint_b_nonpoly(agg: &OrderingAggregate) -> f64 {
    let d = agg.gbar - agg.abar;
    -16.0 * agg.agbar - 4.0 * d * d - 6.0 * (agg.gbar + agg.abar)
}

pub fn is_exact_nonpoly(agg: &OrderingAggregate) -> bool {
    (constraint_b_nonpoly(agg) - 2.0).abs() < CONSTRAINT_TOL
}

/// `(A, B)` for the sextic oscillator `(1 + λx²)³ p²/2 + ...`.
pub fn constraints_appb(agg: &OrderingAggregate) -> (f64, f64) {
    let s = agg.abar + agg.gbar;
    let d = agg.gbar - agg.abar;
    let a = -36.0 * agg.agbar - 15.0 * s - 9.0 * d * d;
    let b = 36.0 * agg.agbar + 12.0 * s + 9.0 * d * d;
    (a, b)
}

/// Hermitian aggregate with prescribed sextic ordering terms `(A, B)`.
///
/// `A + B = −3(ᾱ + γ̄)` fixes `ᾱ = γ̄`, and `B` then fixes `‾αγ`.
pub fn hermitian_aggregate_for_appb(a: f64, b: f64) -> OrderingAggregate {
    let s = -(a + b) / 3.0;
    let t = (b - 12.0 * s) / 36.0;
    OrderingAggregate::from_bars(0.5 * s, 0.5 * s, t)
}

/// `α` on the von Roos `A = 3/4` surface: `2αγ + α + γ = −3/8`.
pub fn solve_vonroos_for_a34(gamma: f64) -> Result<f64> {
    let denom = 1.0 + 2.0 * gamma;
    if denom.abs() < CONSTRAINT_TOL {
        return Err(Error::param("gamma = -1/2 is singular for the A = 3/4 von Roos family"));
    }
    Ok((-0.375 - gamma) / denom)
}

/// `α` on the von Roos `B = 2` surface: `8αγ + 3(α + γ) = −1`.
pub fn solve_vonroos_for_b2(gamma: f64) -> Result<f64> {
    let denom = 8.0 * gamma + 3.0;
    if denom.abs() < CONSTRAINT_TOL {
        return Err(Error::param("gamma = -3/8 is singular for the B = 2 von Roos family"));
    }
    Ok(-(1.0 + 3.0 * gamma) / denom)
}
