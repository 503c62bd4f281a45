//! Seeded Monte-Carlo sweeps over region size or driver power.
//!
//! Every trial draws one channel instance and evaluates all requested schemes
//! on it. The instance seed depends only on the master seed and the trial
//! index, so trial `k` sees the same propagation environment at every sweep
//! value and curves are compared on common random numbers. Work items run in
//! parallel and are merged back in (value, trial) order.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bench::{self, Scheme, SchemeResult};
use crate::channel::{build_expansion, sample_instance};
use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepVariable {
    /// Region length in wavelengths, A/λ.
    RegionSize,
    /// Driver power P in watts.
    MovementPower,
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "region" => Ok(SweepVariable::RegionSize),
            "power" => Ok(SweepVariable::MovementPower),
            other => Err(Error::Config(format!(
                "unknown sweep `{other}`, expected `region` or `power`"
            ))),
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepVariable::RegionSize => "region",
            SweepVariable::MovementPower => "power",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub base: SystemParams,
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub schemes: Vec<Scheme>,
    /// Oracle and max-throughput grid step (m).
    pub resolution: f64,
}

impl SweepConfig {
    pub fn new(base: SystemParams, variable: SweepVariable, values: Vec<f64>) -> Self {
        let resolution = bench::default_resolution(&base);
        Self {
            base,
            variable,
            values,
            trials: 200,
            master_seed: 1,
            schemes: Scheme::ALL.to_vec(),
            resolution,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.values.is_empty() {
            return Err(Error::Config("sweep values must not be empty".into()));
        }
        if !self.values.windows(2).all(|w| w[1] > w[0]) {
            return Err(Error::Config(
                "sweep values must be strictly increasing".into(),
            ));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Config("sweep values must be finite".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("at least one trial is required".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::Config("no schemes selected".into()));
        }
        if !(self.resolution > 0.0) {
            return Err(Error::Config("resolution must be positive".into()));
        }
        for &v in &self.values {
            self.params_for(v).validate()?;
        }
        Ok(())
    }

    /// System parameters at one sweep value; x⁰ is the region centre.
    pub fn params_for(&self, value: f64) -> SystemParams {
        let mut p = self.base.clone();
        match self.variable {
            SweepVariable::RegionSize => p.region_length = value * p.wavelength,
            SweepVariable::MovementPower => p.movement_power = value,
        }
        p.initial_position = p.region_length / 2.0;
        p
    }
}

/// All scheme outcomes of one trial at one sweep value.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub sweep_value: f64,
    pub value_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub results: Vec<SchemeResult>,
}

/// Per-scheme summary at one sweep value. Means and deviations cover feasible
/// trials only; `n` counts them.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub sweep_value: f64,
    pub scheme: Scheme,
    pub mean_ee: f64,
    pub std_ee: f64,
    pub feasible_frac: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub records: Vec<TrialRecord>,
    pub aggregates: Vec<Aggregate>,
}

impl SweepOutput {
    pub fn aggregate(&self, sweep_value: f64, scheme: Scheme) -> Option<&Aggregate> {
        self.aggregates
            .iter()
            .find(|a| a.sweep_value == sweep_value && a.scheme == scheme)
    }

    /// Mean efficiency of `scheme` at every sweep value, in sweep order.
    pub fn mean_curve(&self, scheme: Scheme) -> Vec<f64> {
        self.aggregates
            .iter()
            .filter(|a| a.scheme == scheme)
            .map(|a| a.mean_ee)
            .collect()
    }
}

/// SplitMix64 finalizer over the master seed and the trial index.
pub fn trial_seed(master_seed: u64, trial: usize) -> u64 {
    let mut z = master_seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(trial as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run_trial(cfg: &SweepConfig, value_index: usize, trial: usize) -> Result<TrialRecord> {
    let value = cfg.values[value_index];
    let params = cfg.params_for(value);
    let seed = trial_seed(cfg.master_seed, trial);
    let g = sample_instance(&params, &mut ChaCha8Rng::seed_from_u64(seed));
    let e = build_expansion(&g, params.wavelength)?;
    let results = bench::evaluate_schemes(&e, &params, &cfg.schemes, cfg.resolution)?;
    Ok(TrialRecord {
        sweep_value: value,
        value_index,
        trial,
        seed,
        results,
    })
}

/// Runs the sweep on the global rayon pool.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutput> {
    cfg.validate()?;
    let items: Vec<(usize, usize)> = (0..cfg.values.len())
        .flat_map(|v| (0..cfg.trials).map(move |t| (v, t)))
        .collect();
    let records = items
        .par_iter()
        .map(|&(v, t)| run_trial(cfg, v, t))
        .collect::<Result<Vec<_>>>()?;
    let aggregates = aggregate(cfg, &records);
    Ok(SweepOutput {
        records,
        aggregates,
    })
}

/// Runs the sweep on a dedicated pool with `threads` workers.
pub fn run_sweep_on(cfg: &SweepConfig, threads: usize) -> Result<SweepOutput> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    pool.install(|| run_sweep(cfg))
}

fn aggregate(cfg: &SweepConfig, records: &[TrialRecord]) -> Vec<Aggregate> {
    let mut out = Vec::with_capacity(cfg.values.len() * cfg.schemes.len());
    for (vi, &value) in cfg.values.iter().enumerate() {
        for (si, &scheme) in cfg.schemes.iter().enumerate() {
            let ees: Vec<f64> = records
                .iter()
                .filter(|r| r.value_index == vi)
                .map(|r| &r.results[si])
                .filter(|r| r.feasible)
                .map(|r| r.ee)
                .collect();
            let (mean_ee, std_ee) = mean_std(&ees);
            out.push(Aggregate {
                sweep_value: value,
                scheme,
                mean_ee,
                std_ee,
                feasible_frac: ees.len() as f64 / cfg.trials as f64,
                n: ees.len(),
            });
        }
    }
    out
}

/// Mean and sample standard deviation; NaN mean for an empty slice, zero
/// deviation below two samples.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
