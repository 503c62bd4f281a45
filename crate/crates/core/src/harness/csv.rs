//! CSV output of sweep results.
//!
//! Two files are written: one row per (trial, scheme) in `trials.csv` and one
//! row per (sweep value, scheme) in `aggregate.csv`. Reals use scientific
//! notation with 12 significant digits.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::bench::Scheme;
use crate::error::{Error, Result};
use crate::harness::sweep::{Aggregate, TrialRecord};

pub const TRIALS_HEADER: &str = "sweep_value,trial,scheme,x,ee,throughput,energy,feasible,seed";
pub const AGGREGATE_HEADER: &str = "sweep_value,scheme,mean_ee,std_ee,feasible_frac,n";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvPaths {
    pub trials: PathBuf,
    pub aggregate: PathBuf,
}

/// 12 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_trials<W: Write>(records: &[TrialRecord], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{TRIALS_HEADER}")?;
    for r in records {
        for s in &r.results {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                fmt_real(r.sweep_value),
                r.trial,
                s.scheme,
                fmt_real(s.x),
                fmt_real(s.ee),
                fmt_real(s.throughput),
                fmt_real(s.energy),
                s.feasible,
                r.seed
            )?;
        }
    }
    Ok(())
}

pub fn write_aggregates<W: Write>(aggregates: &[Aggregate], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{AGGREGATE_HEADER}")?;
    for a in aggregates {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            fmt_real(a.sweep_value),
            a.scheme,
            fmt_real(a.mean_ee),
            fmt_real(a.std_ee),
            fmt_real(a.feasible_frac),
            a.n
        )?;
    }
    Ok(())
}

/// Writes `trials.csv` and `aggregate.csv` into `dir`, creating it if needed.
pub fn emit_csv(records: &[TrialRecord], aggregates: &[Aggregate], dir: &Path) -> Result<CsvPaths> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let paths = CsvPaths {
        trials: dir.join("trials.csv"),
        aggregate: dir.join("aggregate.csv"),
    };
    let write = |path: &Path, f: &dyn Fn(&mut Vec<u8>) -> std::io::Result<()>| -> Result<()> {
        let mut buf = Vec::new();
        f(&mut buf).map_err(|e| Error::io(path, e))?;
        fs::write(path, buf).map_err(|e| Error::io(path, e))
    };
    write(&paths.trials, &|b| write_trials(records, b))?;
    write(&paths.aggregate, &|b| write_aggregates(aggregates, b))?;
    Ok(paths)
}

/// One parsed row of `trials.csv`.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub sweep_value: f64,
    pub trial: usize,
    pub scheme: Scheme,
    pub x: f64,
    pub ee: f64,
    pub throughput: f64,
    pub energy: f64,
    pub feasible: bool,
    pub seed: u64,
}

pub fn parse_trials_csv(text: &str) -> Result<Vec<RawRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TRIALS_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: "missing trials header".into(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, line)| {
            let err = |m: &str| Error::Parse {
                line: i + 1,
                message: m.to_string(),
            };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(err("expected 9 fields"));
            }
            let real = |s: &str| s.parse::<f64>().map_err(|_| err("bad number"));
            Ok(RawRow {
                sweep_value: real(f[0])?,
                trial: f[1].parse().map_err(|_| err("bad trial index"))?,
                scheme: f[2].parse().map_err(|_| err("bad scheme"))?,
                x: real(f[3])?,
                ee: real(f[4])?,
                throughput: real(f[5])?,
                energy: real(f[6])?,
                feasible: f[7].parse().map_err(|_| err("bad feasible flag"))?,
                seed: f[8].parse().map_err(|_| err("bad seed"))?,
            })
        })
        .collect()
}
