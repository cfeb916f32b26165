use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use pdm_core::numeric::Coordinate;
use pdm_core::ordering::OrderingPreset;
use pdm_core::{OrderingScheme, SystemId};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    Wavefunction,
    Classical,
    PeriodScan,
    ConstraintCheck,
    Bethe,
}

/// Either a preset name such as `vonroos:a34` or an explicit list of terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderingSpec {
    Preset(String),
    Scheme(OrderingScheme),
}

impl OrderingSpec {
    pub fn scheme(&self) -> pdm_core::Result<OrderingScheme> {
        match self {
            OrderingSpec::Preset(name) => name.parse::<OrderingPreset>()?.scheme(),
            OrderingSpec::Scheme(s) => {
                s.validate()?;
                Ok(s.clone())
            }
        }
    }
}

/// Everything one invocation needs. The same schema is accepted from
/// `--config run.json` and echoed into every CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    pub system: SystemId,
    pub lambda: f64,
    pub omega0: f64,
    pub hbar: f64,
    pub ordering: Option<OrderingSpec>,
    /// Eigenvalues to report.
    pub levels: usize,
    /// Grid nodes for the finite-difference operator.
    pub points: usize,
    pub coordinate: Coordinate,
    pub range: Option<(f64, f64)>,
    /// Quantum numbers for wavefunction tables and Bethe solves.
    pub n: Vec<usize>,
    pub bulk_points: usize,
    /// Tables extend until every column is below this.
    pub threshold: f64,
    pub amplitude: f64,
    pub delta: f64,
    pub periods: f64,
    /// Output sampling interval for trajectories.
    pub dt: f64,
    pub fixed_step: Option<f64>,
    /// `lo:hi:count` or a comma-separated list.
    pub amplitudes: String,
    /// Appendix-B constant `A` for Bethe solves without an explicit ordering.
    pub a_value: f64,
    pub check_numeric: bool,
    pub seed: Option<u64>,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Spectrum,
            system: SystemId::ExpOscillator,
            lambda: 1.0,
            omega0: 2.0,
            hbar: 1.0,
            ordering: None,
            levels: 6,
            points: 4001,
            coordinate: Coordinate::Liouville,
            range: None,
            n: vec![0, 1, 2],
            bulk_points: 2001,
            threshold: 1e-10,
            amplitude: 0.5,
            delta: 0.0,
            periods: 5.0,
            dt: 0.01,
            fixed_step: None,
            amplitudes: "0.1:0.9:9".into(),
            a_value: 0.0,
            check_numeric: false,
            seed: None,
            output: None,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("invalid run config")
    }

    /// The configured ordering, or the natural one for the system.
    pub fn scheme(&self) -> pdm_core::Result<OrderingScheme> {
        match &self.ordering {
            Some(o) => o.scheme(),
            None => match self.system {
                SystemId::ExpOscillator => OrderingScheme::von_roos_a34(0.0),
                SystemId::NonPolyOscillator => OrderingScheme::von_roos_b2(0.0),
                _ => Ok(OrderingScheme::bendaniel_duke()),
            },
        }
    }

    pub fn amplitude_list(&self) -> Result<Vec<f64>> {
        parse_amplitudes(&self.amplitudes)
    }
}

pub fn parse_amplitudes(text: &str) -> Result<Vec<f64>> {
    let num = |s: &str| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}` in `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let list = match parts.as_slice() {
        [lo, hi, count] => {
            let (lo, hi) = (num(lo)?, num(hi)?);
            let count: usize = count.trim().parse().with_context(|| format!("bad count in `{text}`"))?;
            match count {
                0 => Vec::new(),
                1 => vec![lo],
                _ => (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect(),
            }
        }
        [single] => single.split(',').map(num).collect::<Result<_>>()?,
        _ => bail!("amplitudes must be `lo:hi:count` or a comma list, got `{text}`"),
    };
    if list.is_empty() {
        bail!("no amplitudes in `{text}`");
    }
    Ok(list)
}
