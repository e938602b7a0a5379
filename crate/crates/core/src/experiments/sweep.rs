use std::fmt;
use std::io::{self, Write};
use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use super::generate::{gen_random_cnf, instance_seed, GenConfig};
use crate::counter::{count_ledger, is_satisfiable};
use crate::error::{Error, Result};
use crate::evidence::EvidenceTable;
use crate::formula::CnfSystem;
use crate::numeric::{count_to_float, ratio_to_float};
use crate::typicality::{erratum_stats, typical_atoms};

/// Largest `B` a sweep runs without `force`.
pub const DESK_MAX_VARS: usize = 40;

/// Clauses-to-variables ratio used by impurity sweeps.
pub const IMPURITY_SWEEP_RATIO: f64 = 4.26;

const BATCH: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Ratio,
    Impurity,
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::Ratio => "ratio",
            Axis::Impurity => "impurity",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepConfig {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub vars: usize,
    /// Satisfiable instances wanted per grid point.
    pub samples: usize,
    pub seed: u64,
    pub width: usize,
    /// Ratio held fixed on an impurity sweep.
    pub ratio: f64,
    /// Instances generated per grid point before giving up.
    pub max_attempts: usize,
    pub force: bool,
    /// Record wall time per row; off keeps output byte-reproducible.
    pub timed: bool,
}

impl SweepConfig {
    pub fn new(axis: Axis, grid: Vec<f64>, vars: usize, samples: usize, seed: u64) -> Self {
        SweepConfig {
            axis,
            grid,
            vars,
            samples,
            seed,
            width: 3,
            ratio: IMPURITY_SWEEP_RATIO,
            max_attempts: samples.saturating_mul(400).max(BATCH),
            force: false,
            timed: false,
        }
    }

    fn gen_config(&self, value: f64, seed: u64) -> GenConfig {
        let mut cfg = match self.axis {
            Axis::Ratio => GenConfig::with_ratio(self.vars, value, seed),
            Axis::Impurity => GenConfig::with_ratio(self.vars, self.ratio, seed).impurity(value),
        };
        cfg.width = self.width;
        cfg
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentRow {
    pub axis: Axis,
    pub value: f64,
    pub vars: usize,
    /// Instances generated, satisfiable or not.
    pub samples: usize,
    pub sat_count: usize,
    /// `None` when no instance was satisfiable.
    pub p_mtm: Option<f64>,
    /// `None` when no instance had a most typical model.
    pub mean_er_mtm: Option<f64>,
    pub mean_model_count: Option<f64>,
    pub seconds: f64,
}

/// What one satisfiable instance contributes to a row.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceOutcome {
    pub has_mtm: bool,
    pub er_mtm: f64,
    pub models: f64,
}

pub fn assess(system: &CnfSystem) -> Option<InstanceOutcome> {
    let ledger = count_ledger(system);
    if ledger.total_models.is_zero() {
        return None;
    }
    let table = EvidenceTable::from_ledger(&ledger, system.base_vars()).ok()?;
    let typical: Vec<_> = typical_atoms(&table).into_iter().map(|a| a.lit).collect();
    Some(InstanceOutcome {
        has_mtm: is_satisfiable(&system.with_units(&typical)),
        er_mtm: ratio_to_float(&erratum_stats(&table).most_typical),
        models: count_to_float(&ledger.total_models),
    })
}

fn guard(cfg: &SweepConfig) -> Result<()> {
    if cfg.vars > DESK_MAX_VARS && !cfg.force {
        return Err(Error::ResourceGuard(format!("sweeps above B={DESK_MAX_VARS} need force (got B={})", cfg.vars)));
    }
    if cfg.samples == 0 {
        return Err(Error::Domain("samples must be positive".into()));
    }
    Ok(())
}

/// One grid point: instances are drawn in index order until `samples`
/// satisfiable ones are collected. Batches run in parallel but the kept
/// prefix does not depend on scheduling.
pub fn sweep_point(cfg: &SweepConfig, point: usize) -> Result<ExperimentRow> {
    guard(cfg)?;
    let value = cfg.grid[point];
    let start = Instant::now();
    let mut kept: Vec<InstanceOutcome> = Vec::with_capacity(cfg.samples);
    let mut generated = 0;
    'outer: while generated < cfg.max_attempts {
        let end = (generated + BATCH).min(cfg.max_attempts);
        let batch: Vec<Option<InstanceOutcome>> = (generated..end)
            .into_par_iter()
            .map(|j| gen_random_cnf(&cfg.gen_config(value, instance_seed(cfg.seed, point, j))).map(|s| assess(&s)))
            .collect::<Result<_>>()?;
        for outcome in batch {
            generated += 1;
            if let Some(o) = outcome {
                kept.push(o);
                if kept.len() == cfg.samples {
                    break 'outer;
                }
            }
        }
    }
    let n = kept.len() as f64;
    let with_mtm: Vec<&InstanceOutcome> = kept.iter().filter(|o| o.has_mtm).collect();
    let mean = |xs: &mut dyn Iterator<Item = f64>, k: usize| if k == 0 { None } else { Some(xs.sum::<f64>() / k as f64) };
    Ok(ExperimentRow {
        axis: cfg.axis,
        value,
        vars: cfg.vars,
        samples: generated,
        sat_count: kept.len(),
        p_mtm: if kept.is_empty() { None } else { Some(with_mtm.len() as f64 / n) },
        mean_er_mtm: mean(&mut with_mtm.iter().map(|o| o.er_mtm), with_mtm.len()),
        mean_model_count: mean(&mut kept.iter().map(|o| o.models), kept.len()),
        seconds: if cfg.timed { start.elapsed().as_secs_f64() } else { 0.0 },
    })
}

pub fn sweep(cfg: &SweepConfig) -> Result<Vec<ExperimentRow>> {
    guard(cfg)?;
    (0..cfg.grid.len()).map(|i| sweep_point(cfg, i)).collect()
}

pub const CSV_HEADER: &str = "axis,value,B,samples,sat_count,p_mtm,mean_er_mtm,mean_model_count,seconds";

fn opt(x: Option<f64>, digits: usize) -> String {
    x.map_or_else(|| "NA".to_string(), |v| format!("{v:.digits$}"))
}

pub fn write_csv(rows: &[ExperimentRow], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{:.3}",
            r.axis,
            r.value,
            r.vars,
            r.samples,
            r.sat_count,
            opt(r.p_mtm, 6),
            opt(r.mean_er_mtm, 6),
            opt(r.mean_model_count, 2),
            r.seconds
        )?;
    }
    Ok(())
}

/// Whitespace-separated columns for plotting: value, p(mtm), ER(mtm).
pub fn write_dat(rows: &[ExperimentRow], out: &mut dyn Write) -> io::Result<()> {
    if let Some(r) = rows.first() {
        writeln!(out, "# {} B={}", r.axis, r.vars)?;
    }
    writeln!(out, "# value p_mtm er_mtm")?;
    for r in rows {
        writeln!(out, "{} {} {}", r.value, opt(r.p_mtm, 6), opt(r.mean_er_mtm, 6))?;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EmpiricalMinimum {
    pub value: f64,
    pub p_mtm: f64,
    pub mean_model_count: Option<f64>,
}

/// Grid point with the lowest `p(mtm)`; the first one on ties.
pub fn locate_empirical_minimum(rows: &[ExperimentRow]) -> Result<EmpiricalMinimum> {
    if rows.len() < 3 {
        return Err(Error::Domain("a minimum needs at least three rows".into()));
    }
    rows.iter()
        .filter_map(|r| r.p_mtm.map(|p| EmpiricalMinimum { value: r.value, p_mtm: p, mean_model_count: r.mean_model_count }))
        .fold(None, |best: Option<EmpiricalMinimum>, m| match best {
            Some(b) if b.p_mtm <= m.p_mtm => Some(b),
            _ => Some(m),
        })
        .ok_or_else(|| Error::Domain("no row has satisfiable instances".into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(value: f64, p: f64) -> ExperimentRow {
        ExperimentRow {
            axis: Axis::Ratio,
            value,
            vars: 10,
            samples: 1,
            sat_count: 1,
            p_mtm: Some(p),
            mean_er_mtm: None,
            mean_model_count: None,
            seconds: 0.0,
        }
    }

    #[test]
    fn minimum() {
        let rows = [row(2.0, 0.8), row(3.0, 0.6), row(4.0, 0.9)];
        assert_eq!(locate_empirical_minimum(&rows).unwrap().value, 3.0);
        let monotone = [row(2.0, 0.9), row(3.0, 0.8), row(4.0, 0.7)];
        assert_eq!(locate_empirical_minimum(&monotone).unwrap().value, 4.0);
        assert!(locate_empirical_minimum(&rows[..2]).is_err());
    }

    #[test]
    fn reproducible_csv() {
        let cfg = SweepConfig::new(Axis::Ratio, vec![2.0, 5.0], 12, 20, 7);
        let render = |rows: &[ExperimentRow]| {
            let mut buf = Vec::new();
            write_csv(rows, &mut buf).unwrap();
            String::from_utf8(buf).unwrap()
        };
        let a = render(&sweep(&cfg).unwrap());
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = render(&single.install(|| sweep(&cfg)).unwrap());
        assert_eq!(a, b);
        assert!(a.starts_with(CSV_HEADER));
    }

    #[test]
    fn rows_are_bounded() {
        let cfg = SweepConfig::new(Axis::Impurity, vec![0.0, 0.5], 12, 30, 1);
        for r in sweep(&cfg).unwrap() {
            assert_eq!(r.sat_count, 30);
            let p = r.p_mtm.unwrap();
            assert!((0.0..=1.0).contains(&p));
            if let Some(e) = r.mean_er_mtm {
                assert!((0.0..=1.0).contains(&e));
            }
        }
    }

    #[test]
    fn unsatisfiable_point_is_flagged() {
        let mut cfg = SweepConfig::new(Axis::Ratio, vec![20.0], 5, 3, 1);
        cfg.max_attempts = 40;
        let r = sweep_point(&cfg, 0).unwrap();
        assert_eq!((r.samples, r.sat_count, r.p_mtm), (40, 0, None));
    }

    #[test]
    fn desk_guard() {
        let cfg = SweepConfig::new(Axis::Ratio, vec![2.0], 41, 1, 0);
        assert!(matches!(sweep(&cfg), Err(Error::ResourceGuard(_))));
    }
}
