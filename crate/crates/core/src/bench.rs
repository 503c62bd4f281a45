//! Grid-search oracle and the comparison schemes.

use std::fmt;
use std::str::FromStr;

use crate::channel::GainExpansion;
use crate::ee::{self, EeBreakdown};
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::search;
use crate::solver::{self, SolverReport, SolverStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Scheme {
    Proposed,
    UpperBound,
    MaxThroughput,
    MaxSnr,
    Fpa,
    /// Exhaustive grid search; the reference for `Proposed`.
    Oracle,
}

impl Scheme {
    pub const ALL: [Scheme; 5] = [
        Scheme::Proposed,
        Scheme::UpperBound,
        Scheme::MaxThroughput,
        Scheme::MaxSnr,
        Scheme::Fpa,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::UpperBound => "upper_bound",
            Scheme::MaxThroughput => "max_throughput",
            Scheme::MaxSnr => "max_snr",
            Scheme::Fpa => "fpa",
            Scheme::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .chain([Scheme::Oracle])
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown scheme `{s}`")))
    }
}

/// Outcome of one scheme on one channel instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub x: f64,
    pub ee: f64,
    pub throughput: f64,
    pub energy: f64,
    pub feasible: bool,
}

impl SchemeResult {
    fn from_breakdown(scheme: Scheme, b: &EeBreakdown) -> Self {
        Self {
            scheme,
            x: b.position,
            ee: b.ee,
            throughput: b.throughput,
            energy: b.energy,
            feasible: b.feasible,
        }
    }
}

/// Default oracle grid step: λ/500.
pub fn default_resolution(params: &SystemParams) -> f64 {
    params.wavelength / 500.0
}

fn polish_tol(params: &SystemParams) -> f64 {
    params.wavelength * 1e-9
}

/// Globally best feasible position by exhaustive grid evaluation.
///
/// Every feasible grid-local maximum (and x⁰ itself) is polished by
/// golden-section search over its two neighbouring cells; the best polished
/// point wins, smallest position on ties. If no grid point meets the
/// throughput requirement the result is x⁰ flagged infeasible.
pub fn grid_global_ee(
    e: &GainExpansion,
    params: &SystemParams,
    resolution: f64,
) -> Result<SchemeResult> {
    if !(resolution > 0.0 && resolution <= params.wavelength / 100.0) {
        return Err(Error::invalid(
            "resolution",
            format!(
                "must lie in (0, λ/100 = {}], got {resolution}",
                params.wavelength / 100.0
            ),
        ));
    }
    let feasible_ee = |x: f64| match ee::ee_at(e, x, params) {
        Some(b) if b.feasible => b.ee,
        _ => f64::NEG_INFINITY,
    };
    let mut grid = search::uniform_grid(0.0, params.region_length, resolution);
    let x0 = params.initial_position;
    if let Err(pos) = grid.binary_search_by(|g| g.total_cmp(&x0)) {
        grid.insert(pos, x0);
    }
    let values: Vec<f64> = grid.iter().map(|&x| feasible_ee(x)).collect();

    let mut best: Option<(f64, f64)> = None;
    for i in 0..grid.len() {
        let v = values[i];
        if v == f64::NEG_INFINITY {
            continue;
        }
        let left = if i > 0 {
            values[i - 1]
        } else {
            f64::NEG_INFINITY
        };
        let right = values.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
        let is_peak = v >= left && v >= right;
        if !is_peak && grid[i] != x0 {
            continue;
        }
        let (lo, hi) = search::neighbour_bracket(&grid, i);
        let r = search::golden_section_max(feasible_ee, lo, hi, polish_tol(params));
        let (x, val) = if r.value > v {
            (r.x, r.value)
        } else {
            (grid[i], v)
        };
        best = match best {
            Some((bx, bv)) if bv > val || (bv == val && bx <= x) => Some((bx, bv)),
            _ => Some((x, val)),
        };
    }

    let x = best.map_or(x0, |(x, _)| x);
    let mut r = SchemeResult::from_breakdown(Scheme::Oracle, &ee::evaluate(e, x, params)?);
    r.feasible = r.feasible && best.is_some();
    Ok(r)
}

/// The movement-free upper bound: the antenna is assumed to already sit at
/// the gain maximizer, so the whole block is spent transmitting.
pub fn scheme_upper_bound(e: &GainExpansion, params: &SystemParams) -> Result<SchemeResult> {
    let ub = ee::ee_upper_bound(e, params, ee::default_bound_resolution(params))?;
    let throughput = params.block_duration * (1.0 + ee::mrc_snr(ub.gain, params)).log2();
    Ok(SchemeResult {
        scheme: Scheme::UpperBound,
        x: ub.position,
        ee: ub.ee,
        throughput,
        energy: params.max_tx_power * params.block_duration,
        feasible: throughput >= params.min_throughput,
    })
}

/// Position maximizing block throughput, ignoring energy and the minimum
/// throughput requirement.
pub fn scheme_max_throughput(
    e: &GainExpansion,
    params: &SystemParams,
    resolution: f64,
) -> Result<SchemeResult> {
    let rate = |x: f64| ee::ee_at(e, x, params).map_or(f64::NEG_INFINITY, |b| b.throughput);
    let grid = search::uniform_grid(0.0, params.region_length, resolution);
    let values: Vec<f64> = grid.iter().map(|&x| rate(x)).collect();
    let i = search::argmax_first(&values).expect("grid is never empty");
    let (lo, hi) = search::neighbour_bracket(&grid, i);
    let r = search::golden_section_max(rate, lo, hi, polish_tol(params));
    let x = if r.value > values[i] { r.x } else { grid[i] };
    Ok(SchemeResult::from_breakdown(
        Scheme::MaxThroughput,
        &ee::evaluate(e, x, params)?,
    ))
}

/// Position maximizing SNR, i.e. the gain maximizer `x̄` shared with the
/// upper bound, paying the movement cost from x⁰.
pub fn scheme_max_snr(
    e: &GainExpansion,
    params: &SystemParams,
    resolution: f64,
) -> Result<SchemeResult> {
    let ub = ee::ee_upper_bound(e, params, resolution)?;
    Ok(SchemeResult::from_breakdown(
        Scheme::MaxSnr,
        &ee::evaluate(e, ub.position, params)?,
    ))
}

/// Fixed antenna at x⁰.
pub fn scheme_fpa(e: &GainExpansion, params: &SystemParams) -> Result<SchemeResult> {
    Ok(SchemeResult::from_breakdown(
        Scheme::Fpa,
        &ee::evaluate(e, params.initial_position, params)?,
    ))
}

pub fn scheme_proposed(
    e: &GainExpansion,
    params: &SystemParams,
) -> Result<(SchemeResult, SolverReport)> {
    let report = solver::optimize(e, params)?;
    let mut r = SchemeResult::from_breakdown(Scheme::Proposed, &report.ee);
    r.feasible = r.feasible && report.status != SolverStatus::Infeasible;
    Ok((r, report))
}

/// Runs the requested schemes on one instance, in the order given.
pub fn evaluate_schemes(
    e: &GainExpansion,
    params: &SystemParams,
    schemes: &[Scheme],
    resolution: f64,
) -> Result<Vec<SchemeResult>> {
    schemes
        .iter()
        .map(|s| match s {
            Scheme::Proposed => scheme_proposed(e, params).map(|(r, _)| r),
            Scheme::UpperBound => scheme_upper_bound(e, params),
            Scheme::MaxThroughput => scheme_max_throughput(e, params, resolution),
            Scheme::MaxSnr => scheme_max_snr(e, params, ee::default_bound_resolution(params)),
            Scheme::Fpa => scheme_fpa(e, params),
            Scheme::Oracle => grid_global_ee(e, params, resolution),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{build_expansion, sample_instance, PathAngles, PathResponseMatrix};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random(seed: u64, params: &SystemParams) -> GainExpansion {
        let g = sample_instance(params, &mut ChaCha8Rng::seed_from_u64(seed));
        build_expansion(&g, params.wavelength).unwrap()
    }

    fn single_path(params: &SystemParams) -> GainExpansion {
        let angles = PathAngles::from_virtual(vec![-0.7]).unwrap();
        let g = PathResponseMatrix::new(vec![Complex64::new(1e-4, 1e-4); 16], 16, angles).unwrap();
        build_expansion(&g, params.wavelength).unwrap()
    }

    #[test]
    fn scheme_names_round_trip() {
        for s in Scheme::ALL.into_iter().chain([Scheme::Oracle]) {
            assert_eq!(s.name().parse::<Scheme>().unwrap(), s);
        }
        assert!("nope".parse::<Scheme>().is_err());
    }

    #[test]
    fn single_path_schemes_stay_at_start() {
        let p = SystemParams::default();
        let e = single_path(&p);
        let res = default_resolution(&p);
        let expected = (1.0 + ee::mrc_snr(e.x_sum(), &p)).log2() / p.max_tx_power;

        let oracle = grid_global_ee(&e, &p, res).unwrap();
        assert_eq!(oracle.x, p.initial_position);
        assert!((oracle.ee - expected).abs() <= 1e-12 * expected);

        let thr = scheme_max_throughput(&e, &p, res).unwrap();
        assert_eq!(thr.x, p.initial_position);

        let fpa = scheme_fpa(&e, &p).unwrap();
        assert!((fpa.ee - expected).abs() <= 1e-12 * expected);
    }

    #[test]
    fn oracle_rejects_coarse_grid() {
        let p = SystemParams::default();
        let e = random(0, &p);
        assert!(grid_global_ee(&e, &p, p.wavelength / 50.0).is_err());
    }

    #[test]
    fn oracle_is_stable_under_refinement() {
        let p = SystemParams::default();
        for seed in 0..10 {
            let e = random(seed, &p);
            let a = grid_global_ee(&e, &p, default_resolution(&p)).unwrap();
            let b = grid_global_ee(&e, &p, default_resolution(&p) / 2.0).unwrap();
            assert!((a.ee - b.ee).abs() <= 1e-6 * b.ee, "seed {seed}");
        }
    }

    #[test]
    fn scheme_ordering() {
        let p = SystemParams::default();
        let res = default_resolution(&p);
        for seed in 0..20 {
            let e = random(seed, &p);
            let oracle = grid_global_ee(&e, &p, res).unwrap();
            let ub = scheme_upper_bound(&e, &p).unwrap();
            let fpa = scheme_fpa(&e, &p).unwrap();
            let thr = scheme_max_throughput(&e, &p, res).unwrap();
            let snr = scheme_max_snr(&e, &p, ee::default_bound_resolution(&p)).unwrap();
            let (prop, _) = scheme_proposed(&e, &p).unwrap();
            assert!(oracle.ee <= ub.ee * (1.0 + 1e-9));
            assert!(snr.ee <= ub.ee * (1.0 + 1e-9));
            assert_eq!(snr.x, ub.x);
            if fpa.feasible {
                assert!(fpa.ee <= oracle.ee + 1e-9);
                assert!(prop.ee >= fpa.ee - 1e-9);
                assert!(
                    prop.ee <= oracle.ee + 1e-9,
                    "seed {seed}: {} > {}",
                    prop.ee,
                    oracle.ee
                );
                assert!(thr.ee <= oracle.ee + 1e-9 || !thr.feasible);
            }
            for x in search::uniform_grid(0.0, p.region_length, res) {
                let b = ee::evaluate(&e, x, &p).unwrap();
                assert!(thr.throughput >= b.throughput - 1e-12);
                assert!(e.gain(snr.x) >= e.gain(x));
            }
        }
    }

    #[test]
    fn max_snr_equals_upper_bound_when_started_there() {
        let p = SystemParams::default();
        let e = random(6, &p);
        let ub = scheme_upper_bound(&e, &p).unwrap();
        let q = SystemParams {
            initial_position: ub.x,
            ..p.clone()
        };
        let snr = scheme_max_snr(&e, &q, ee::default_bound_resolution(&q)).unwrap();
        assert_eq!(snr.x, ub.x);
        assert!((snr.ee - ub.ee).abs() <= 1e-12 * ub.ee);
    }

    #[test]
    fn fpa_ignores_driver() {
        let p = SystemParams::default();
        let e = random(9, &p);
        let a = scheme_fpa(&e, &p).unwrap();
        let b = scheme_fpa(
            &e,
            &SystemParams {
                movement_power: 3.0,
                speed: 0.9,
                ..p
            },
        )
        .unwrap();
        assert_eq!(a, b);
    }
}
