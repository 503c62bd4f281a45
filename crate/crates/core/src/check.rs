//! Invariant checks over random instances, run by `maee check`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bench;
use crate::channel::{self, build_expansion, sample_instance, GainExpansion};
use crate::ee;
use crate::error::Result;
use crate::harness::trial_seed;
use crate::params::SystemParams;
use crate::search::uniform_grid;
use crate::solver;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub worst: f64,
    pub limit: f64,
}

struct Worst {
    name: &'static str,
    worst: f64,
    limit: f64,
}

impl Worst {
    fn new(name: &'static str, limit: f64) -> Self {
        Self {
            name,
            worst: 0.0,
            limit,
        }
    }

    fn see(&mut self, v: f64) {
        if v > self.worst || v.is_nan() {
            self.worst = v;
        }
    }

    fn finish(self) -> CheckOutcome {
        CheckOutcome {
            name: self.name,
            passed: self.worst <= self.limit,
            worst: self.worst,
            limit: self.limit,
        }
    }
}

/// Runs every check on `instances` channels drawn from `seed`.
pub fn run_checks(params: &SystemParams, seed: u64, instances: usize) -> Result<Vec<CheckOutcome>> {
    params.validate()?;
    let pt = params.max_tx_power;
    let mut closed_form = Worst::new("closed-form gain matches direct evaluation", 1e-9);
    let mut first = Worst::new("first derivative matches finite difference", 1e-4);
    let mut second = Worst::new("second derivative matches finite difference", 1e-3);
    let mut curvature = Worst::new("curvature bound dominates second derivative", 0.0);
    let mut bound = Worst::new("efficiency never exceeds the movement-free bound", 1e-9);
    let mut sandwich = Worst::new("Taylor bounds enclose h(x)", 0.0);
    let mut bracket = Worst::new("solver lies between fixed antenna and grid oracle", 1e-9);

    for k in 0..instances {
        let g = sample_instance(params, &mut ChaCha8Rng::seed_from_u64(trial_seed(seed, k)));
        let e = build_expansion(&g, params.wavelength)?;
        let grid = uniform_grid(0.0, params.region_length, params.region_length / 1000.0);

        for &x in &grid {
            let direct = channel::direct_gain(&g, params.wavelength, x)?;
            closed_form.see((e.gain(x) - direct).abs() / (direct.abs() + f64::MIN_POSITIVE));
        }

        let d1_scale = e.derivative_scale(pt).max(f64::MIN_POSITIVE);
        let d2_scale = e.curvature(pt);
        for &x in grid.iter().step_by(5) {
            let h = |x: f64| pt * e.gain(x);
            let fd1 = (h(x + 1e-8) - h(x - 1e-8)) / 2e-8;
            first.see((e.derivative(pt, x) - fd1).abs() / d1_scale);
            let fd2 = (h(x + 1e-6) - 2.0 * h(x) + h(x - 1e-6)) / 1e-12;
            second.see((e.second_derivative(pt, x) - fd2).abs() / d2_scale);
        }

        let eps = e.curvature_bound(pt);
        for x in uniform_grid(0.0, params.region_length, params.region_length / 1e4) {
            curvature.see(e.second_derivative(pt, x) - eps);
        }

        let ub = ee::ee_upper_bound(&e, params, ee::default_bound_resolution(params))?;
        for &x in &grid {
            let v = ee::evaluate(&e, x, params).map(|b| b.ee).unwrap_or(0.0);
            bound.see(v / ub.ee - 1.0);
        }

        sandwich_check(&e, params, &grid, &mut sandwich);

        let fpa = bench::scheme_fpa(&e, params)?;
        if fpa.feasible {
            let oracle = bench::grid_global_ee(&e, params, bench::default_resolution(params))?;
            let report = solver::optimize(&e, params)?;
            bracket.see(fpa.ee - report.ee.ee);
            bracket.see(report.ee.ee - oracle.ee);
        }
    }

    Ok(vec![
        closed_form.finish(),
        first.finish(),
        second.finish(),
        curvature.finish(),
        bound.finish(),
        sandwich.finish(),
        bracket.finish(),
    ])
}

fn sandwich_check(e: &GainExpansion, params: &SystemParams, grid: &[f64], w: &mut Worst) {
    for &center in grid.iter().step_by(100) {
        let t = solver::taylor_bounds(e, params, center);
        for &x in grid {
            let h = solver::h_of_x(e, params, x);
            let slack = 1e-12 * h.abs();
            w.see(t.lower(x) - h - slack);
            w.see(h - t.upper(x) - slack);
        }
    }
}
