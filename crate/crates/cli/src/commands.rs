use std::f64::consts::PI;
use std::fmt::Write as _;

use anyhow::{bail, Result};
use pdm_core::analytic::wavefunction_table;
use pdm_core::bethe::{self, BetheReport, DEFAULT_SEED};
use pdm_core::classical::{self, IntegratorOptions};
use pdm_core::numeric::{self, GridSpec};
use pdm_core::ordering::{self, hermitian_aggregate_for_appb};
use pdm_core::{make_system, Error, PdmSystem, SystemId};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};

/// What a command produced, ready to be written out.
pub enum Artifact {
    Json(Value),
    Csv(String),
}

impl Artifact {
    pub fn render(&self) -> String {
        match self {
            Artifact::Json(v) => {
                let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
                s.push('\n');
                s
            }
            Artifact::Csv(s) => s.clone(),
        }
    }
}

fn system(cfg: &RunConfig) -> pdm_core::Result<PdmSystem> {
    make_system(cfg.system, cfg.lambda, cfg.omega0, cfg.hbar)
}

fn grid(cfg: &RunConfig) -> GridSpec {
    GridSpec {
        points: cfg.points,
        coordinate: cfg.coordinate,
        range: cfg.range,
        levels: cfg.levels.max(10),
    }
}

fn csv_header(cfg: &RunConfig, columns: &[String]) -> String {
    let meta = serde_json::to_string(cfg).expect("config always serializes");
    format!("# {meta}\n{}\n", columns.join(","))
}

/// Shortest round-trip decimal, switching to exponent form for very small or large magnitudes.
fn num(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e7).contains(&a) || !a.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types always serialize")
}

pub fn run(cfg: &RunConfig) -> Result<Artifact> {
    match cfg.command {
        Command::Spectrum => spectrum(cfg),
        Command::Wavefunction => wavefunction(cfg),
        Command::Classical => trajectory(cfg),
        Command::PeriodScan => period_scan(cfg),
        Command::ConstraintCheck => constraint_check(cfg),
        Command::Bethe => bethe_levels(cfg),
    }
}

fn spectrum(cfg: &RunConfig) -> Result<Artifact> {
    if cfg.levels == 0 {
        bail!(Error::InvalidParameter("levels must be at least 1".into()));
    }
    let sys = system(cfg)?;
    let report = numeric::spectrum_report(&sys, &cfg.scheme()?, &grid(cfg), cfg.levels)?;
    Ok(Artifact::Json(to_json(&report)))
}

fn wavefunction(cfg: &RunConfig) -> Result<Artifact> {
    let sys = system(cfg)?;
    let agg = cfg.scheme()?.aggregate()?;
    let table = wavefunction_table(&sys, &agg, &cfg.n, cfg.bulk_points, cfg.threshold)?;
    let mut cols = vec!["x".to_string()];
    cols.extend(table.ns.iter().map(|n| format!("psi_{n}")));
    let mut out = csv_header(cfg, &cols);
    for (i, x) in table.x.iter().enumerate() {
        out.push_str(&num(*x));
        for c in &table.columns {
            write!(out, ",{}", num(c[i])).unwrap();
        }
        out.push('\n');
    }
    Ok(Artifact::Csv(out))
}

fn lienard(cfg: &RunConfig) -> pdm_core::Result<classical::LienardSystem> {
    classical::make_lienard(cfg.system, cfg.lambda, cfg.omega0)
}

fn integrator(cfg: &RunConfig) -> IntegratorOptions {
    IntegratorOptions { fixed_step: cfg.fixed_step, ..Default::default() }
}

fn trajectory(cfg: &RunConfig) -> Result<Artifact> {
    let sys = lienard(cfg)?;
    if !(cfg.dt > 0.0 && cfg.periods > 0.0) {
        bail!(Error::InvalidParameter("dt and periods must be positive".into()));
    }
    let (x0, v0) = classical::closed_form_state(sys.id, cfg.amplitude, cfg.delta, sys.lambda, sys.omega0, 0.0)?;
    let period = 2.0 * PI / sys.omega0;
    let t_end = cfg.periods * period;
    let traj = classical::integrate(&sys, x0, v0, t_end, cfg.dt.min(1e-3 * period), &integrator(cfg))?;
    let cols = ["t", "x", "xdot", "H"].map(String::from);
    let mut out = csv_header(cfg, &cols);
    for (t, x, v) in traj.sample(cfg.dt) {
        writeln!(out, "{},{},{},{}", num(t), num(x), num(v), num(sys.energy(x, v))).unwrap();
    }
    Ok(Artifact::Csv(out))
}

fn period_scan(cfg: &RunConfig) -> Result<Artifact> {
    let sys = lienard(cfg)?;
    let amps = cfg.amplitude_list()?;
    let opts = integrator(cfg);
    let target = 2.0 * PI / sys.omega0;
    let rows: Vec<pdm_core::Result<classical::PeriodEstimate>> =
        amps.par_iter().map(|&a| classical::period(&sys, a, &opts)).collect();
    let cols = ["amplitude", "period", "abs_dev", "cycles", "spread"].map(String::from);
    let mut out = csv_header(cfg, &cols);
    for (a, row) in amps.iter().zip(rows) {
        let p = row?;
        let dev = (p.period - target).abs();
        writeln!(out, "{},{},{},{},{}", num(*a), num(p.period), num(dev), p.cycles, num(p.spread)).unwrap();
    }
    Ok(Artifact::Csv(out))
}

fn constraint_check(cfg: &RunConfig) -> Result<Artifact> {
    let scheme = cfg.scheme()?;
    let agg = scheme.aggregate()?;
    let mut v = json!({
        "system": cfg.system.name(),
        "ordering": scheme,
        "aggregate": agg,
    });
    let m = v.as_object_mut().expect("built as an object");
    match cfg.system {
        SystemId::ExpOscillator => {
            let a = ordering::constraint_a(&agg);
            m.insert("A".into(), json!(a));
            m.insert("required".into(), json!(0.75));
            m.insert("exact".into(), json!(ordering::is_exact_exp(&agg)));
        }
        SystemId::NonPolyOscillator => {
            let b = ordering::constraint_b_nonpoly(&agg);
            m.insert("B".into(), json!(b));
            m.insert("required".into(), json!(2.0));
            m.insert("exact".into(), json!(ordering::is_exact_nonpoly(&agg)));
        }
        SystemId::AppBSextic => {
            let (a, b) = ordering::constraints_appb(&agg);
            m.insert("A".into(), json!(a));
            m.insert("B".into(), json!(b));
            let d = bethe::d_roots(a).ok().map(|(hi, lo)| vec![hi, lo]);
            m.insert("reduction_available".into(), json!(d.is_some()));
            m.insert("d".into(), json!(d));
            m.insert("exact".into(), json!(false));
        }
        _ => {
            m.insert("exact".into(), json!(false));
        }
    }
    Ok(Artifact::Json(v))
}

#[derive(Serialize)]
struct LevelReport {
    #[serde(flatten)]
    report: BetheReport,
    /// Relative distance from the energy to the nearest numeric eigenvalue.
    numeric_rel_distance: Option<f64>,
}

fn bethe_levels(cfg: &RunConfig) -> Result<Artifact> {
    let sys = system(cfg)?;
    if sys.id != SystemId::AppBSextic {
        bail!(Error::ReductionUnavailable(format!("Bethe reports need the sextic system, got `{}`", sys.id.name())));
    }
    let seed = cfg.seed.unwrap_or(DEFAULT_SEED);
    let a_value = match &cfg.ordering {
        Some(_) => ordering::constraints_appb(&cfg.scheme()?.aggregate()?).0,
        None => cfg.a_value,
    };
    let spec = GridSpec { levels: cfg.levels.max(12), ..grid(cfg) };
    let per_n: Vec<Result<Vec<LevelReport>>> = cfg
        .n
        .par_iter()
        .map(|&n| -> Result<Vec<LevelReport>> {
            match &cfg.ordering {
                Some(_) => {
                    let agg = cfg.scheme()?.aggregate()?;
                    let red = bethe::reduce_appb(&sys, &agg, n)?;
                    let sol = bethe::solve_bethe_seeded(&red.problem, seed)?;
                    let norm = bethe::appb_norm(&sys, red.d, &sol.roots);
                    let sum = sol.roots.iter().map(|z| z.re).sum();
                    let report = BetheReport::new(n, red.d, red.energy, &sol, Some(red.required_b(sum)), norm.is_some());
                    let dist = cfg
                        .check_numeric
                        .then(|| bethe::spectrum_distance(&sys, &agg, red.energy, &spec))
                        .transpose()?;
                    Ok(vec![LevelReport { report, numeric_rel_distance: dist }])
                }
                None => bethe::appb_levels(&sys, cfg.a_value, n, seed)?
                    .into_iter()
                    .map(|l| {
                        let report = BetheReport::new(n, l.d, l.energy, &l.solution, Some(l.required_b), l.norm.is_some());
                        let agg = hermitian_aggregate_for_appb(cfg.a_value, l.required_b);
                        let dist = cfg
                            .check_numeric
                            .then(|| bethe::spectrum_distance(&sys, &agg, l.energy, &spec))
                            .transpose()?;
                        Ok(LevelReport { report, numeric_rel_distance: dist })
                    })
                    .collect(),
            }
        })
        .collect();
    let mut levels = Vec::new();
    for r in per_n {
        levels.extend(r?);
    }
    Ok(Artifact::Json(json!({
        "system": sys,
        "seed": seed,
        "a_value": a_value,
        "levels": to_json(&levels),
    })))
}

