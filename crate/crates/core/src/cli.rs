//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when every result is infeasible (or a check
//! fails), 2 on configuration or usage errors.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench::{self, Scheme, SchemeResult};
use crate::channel::{build_expansion, sample_instance, PathResponseMatrix};
use crate::check;
use crate::error::{Error, Result};
use crate::harness::{self, SweepConfig, SweepVariable};
use crate::instance;
use crate::params::SystemParams;

#[derive(Debug, Parser)]
#[command(
    name = "maee",
    version,
    about = "Energy-efficient positioning of a movable receive antenna"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: CommonOpts,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Optimize one channel instance and compare all schemes.
    Solve,
    /// Run a seeded Monte-Carlo sweep and write CSV files.
    Sweep,
    /// Grid-search the best position of one instance.
    Oracle,
    /// Run the invariant checks on random instances.
    Check,
}

#[derive(Debug, Args)]
struct CommonOpts {
    /// Parameter file with `key = value` lines.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Master random seed.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo trials (sweep) or instances (check).
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Sweep variable: `region` (A/λ) or `power` (P in W).
    #[arg(long, global = true, value_name = "region|power")]
    sweep: Option<String>,
    /// Comma-separated sweep values.
    #[arg(long, global = true, value_name = "LIST")]
    values: Option<String>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Grid step of the oracle search (m).
    #[arg(long, global = true, value_name = "METERS")]
    resolution: Option<f64>,
    /// Print the per-iteration solver trace.
    #[arg(long, global = true)]
    trace: bool,
    /// Channel fixture to load instead of sampling one.
    #[arg(long, global = true, value_name = "FILE")]
    instance: Option<PathBuf>,
    /// Worker threads for sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn cli_main<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            2
        }
    }
}

fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    let params = match &cli.opts.config {
        Some(path) => harness::read_config(path)?,
        None => SystemParams::default(),
    };
    let resolution = cli
        .opts
        .resolution
        .unwrap_or_else(|| bench::default_resolution(&params));
    match cli.command {
        Command::Solve => solve(cli, &params, resolution, out),
        Command::Oracle => oracle(cli, &params, resolution, out),
        Command::Sweep => sweep(cli, params, resolution, out),
        Command::Check => run_check(cli, &params, out),
    }
}

fn load_instance(cli: &Cli, params: &SystemParams) -> Result<PathResponseMatrix> {
    match &cli.opts.instance {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            let (g, wavelength) = instance::read_instance(&text)?;
            if (wavelength - params.wavelength).abs() > 1e-12 * params.wavelength {
                return Err(Error::Config(format!(
                    "instance wavelength {wavelength} differs from configured {}",
                    params.wavelength
                )));
            }
            Ok(g)
        }
        None => Ok(sample_instance(
            params,
            &mut ChaCha8Rng::seed_from_u64(cli.opts.seed),
        )),
    }
}

fn io(e: std::io::Error) -> Error {
    Error::io("<stdout>", e)
}

fn write_results(out: &mut dyn Write, results: &[SchemeResult]) -> Result<()> {
    writeln!(
        out,
        "{:<15} {:>19} {:>19} {:>19} {:>19} {:>8}",
        "scheme", "x_m", "ee_bits_per_hz_per_j", "throughput", "energy_j", "feasible"
    )
    .map_err(io)?;
    for r in results {
        writeln!(
            out,
            "{:<15} {:>19.12e} {:>19.12e} {:>19.12e} {:>19.12e} {:>8}",
            r.scheme.name(),
            r.x,
            r.ee,
            r.throughput,
            r.energy,
            r.feasible
        )
        .map_err(io)?;
    }
    Ok(())
}

fn solve(cli: &Cli, params: &SystemParams, resolution: f64, out: &mut dyn Write) -> Result<i32> {
    let g = load_instance(cli, params)?;
    if g.num_paths() != params.num_paths || g.num_antennas() != params.num_bs_antennas {
        writeln!(
            out,
            "note: instance is {}x{}, configuration says {}x{}",
            g.num_paths(),
            g.num_antennas(),
            params.num_paths,
            params.num_bs_antennas
        )
        .map_err(io)?;
    }
    let e = build_expansion(&g, params.wavelength)?;
    let (proposed, report) = bench::scheme_proposed(&e, params)?;
    let mut results = vec![proposed];
    for s in &Scheme::ALL[1..] {
        results.extend(bench::evaluate_schemes(&e, params, &[*s], resolution)?);
    }
    results.push(bench::grid_global_ee(&e, params, resolution)?);

    match &cli.opts.instance {
        Some(p) => writeln!(out, "instance {}", p.display()),
        None => writeln!(out, "instance seed {}", cli.opts.seed),
    }
    .map_err(io)?;
    write_results(out, &results)?;
    writeln!(
        out,
        "solver: status {}, {} dinkelbach iterations, {} sca steps{}{}",
        report.status,
        report.iterations,
        report.sca_steps,
        if report.restarted {
            ", restarted from best feasible grid point"
        } else {
            ""
        },
        if report.outside_power_assumption {
            ", warning: driver power below transmit power"
        } else {
            ""
        }
    )
    .map_err(io)?;
    if cli.opts.trace {
        report.write_trace_csv(&mut *out).map_err(io)?;
    }
    if let Some(dir) = &cli.opts.out {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = dir.join("instance.txt");
        std::fs::write(&path, instance::instance_to_string(&g, params.wavelength))
            .map_err(|e| Error::io(&path, e))?;
        let path = dir.join("trace.csv");
        let mut buf = Vec::new();
        report
            .write_trace_csv(&mut buf)
            .map_err(|e| Error::io(&path, e))?;
        std::fs::write(&path, buf).map_err(|e| Error::io(&path, e))?;
    }
    Ok(if results.iter().any(|r| r.feasible) {
        0
    } else {
        1
    })
}

fn oracle(cli: &Cli, params: &SystemParams, resolution: f64, out: &mut dyn Write) -> Result<i32> {
    let g = load_instance(cli, params)?;
    let e = build_expansion(&g, params.wavelength)?;
    let best = bench::grid_global_ee(&e, params, resolution)?;
    let ub = bench::scheme_upper_bound(&e, params)?;
    write_results(out, &[best, ub])?;
    Ok(if best.feasible { 0 } else { 1 })
}

fn parse_values(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad sweep value `{s}`")))
        })
        .collect()
}

fn sweep(cli: &Cli, params: SystemParams, resolution: f64, out: &mut dyn Write) -> Result<i32> {
    let variable: SweepVariable = cli
        .opts
        .sweep
        .as_deref()
        .ok_or_else(|| Error::Config("sweep needs --sweep region|power".into()))?
        .parse()?;
    let values = match &cli.opts.values {
        Some(list) => parse_values(list)?,
        None => match variable {
            SweepVariable::RegionSize => vec![0.5, 1.0, 1.5, 2.0],
            SweepVariable::MovementPower => vec![0.1, 0.5, 1.0, 2.0, 5.0],
        },
    };
    let mut cfg = SweepConfig::new(params, variable, values);
    cfg.master_seed = cli.opts.seed;
    cfg.resolution = resolution;
    if let Some(t) = cli.opts.trials {
        cfg.trials = t;
    }
    let output = match cli.opts.threads {
        Some(n) => harness::run_sweep_on(&cfg, n)?,
        None => harness::run_sweep(&cfg)?,
    };
    let dir = cli
        .opts
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("results"));
    let paths = harness::emit_csv(&output.records, &output.aggregates, &dir)?;

    writeln!(
        out,
        "{:>12} {:<15} {:>19} {:>19} {:>9}",
        variable.to_string(),
        "scheme",
        "mean_ee",
        "std_ee",
        "feasible"
    )
    .map_err(io)?;
    for a in &output.aggregates {
        writeln!(
            out,
            "{:>12} {:<15} {:>19.12e} {:>19.12e} {:>9.4}",
            a.sweep_value,
            a.scheme.name(),
            a.mean_ee,
            a.std_ee,
            a.feasible_frac
        )
        .map_err(io)?;
    }
    writeln!(
        out,
        "wrote {} and {}",
        paths.trials.display(),
        paths.aggregate.display()
    )
    .map_err(io)?;
    let any_feasible = output
        .records
        .iter()
        .any(|r| r.results.iter().any(|s| s.feasible));
    Ok(if any_feasible { 0 } else { 1 })
}

fn run_check(cli: &Cli, params: &SystemParams, out: &mut dyn Write) -> Result<i32> {
    let outcomes = check::run_checks(params, cli.opts.seed, cli.opts.trials.unwrap_or(20))?;
    let mut ok = true;
    for o in &outcomes {
        ok &= o.passed;
        writeln!(
            out,
            "{} {} (worst {:.3e}, limit {:.1e})",
            if o.passed { "PASS" } else { "FAIL" },
            o.name,
            o.worst,
            o.limit
        )
        .map_err(io)?;
    }
    Ok(if ok { 0 } else { 1 })
}
