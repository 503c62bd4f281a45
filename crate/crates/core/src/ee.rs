//! Movement-aware energy efficiency under a maximum-ratio transmit beamformer.
//!
//! A block of length `T` is split into a movement phase of `|x − x⁰| / v`
//! seconds, during which only the driver draws power, and a communication
//! phase in which the base station transmits at `P_t`. With the beamformer
//! aligned to the channel, the SNR is `P_t ‖h(x)‖² / σ²`.

use crate::channel::GainExpansion;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::search;

/// Everything the efficiency metric is built from, at one antenna position.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeBreakdown {
    pub position: f64,
    /// Seconds spent moving from x⁰.
    pub move_time: f64,
    /// Bits/Hz delivered during the communication phase.
    pub throughput: f64,
    /// Joules spent in the block (movement plus transmission).
    pub energy: f64,
    /// Throughput per joule, (bits/Hz)/J.
    pub ee: f64,
    pub snr: f64,
    /// Position in the region and throughput at least the minimum.
    pub feasible: bool,
}

/// SNR `P_t · gain / σ²` of the maximum-ratio beamformer.
pub fn mrc_snr(gain: f64, params: &SystemParams) -> f64 {
    params.max_tx_power * gain / params.noise_power
}

pub fn movement_energy(x: f64, params: &SystemParams) -> Result<f64> {
    check_region(x, params)?;
    Ok(params.energy_per_meter() * (x - params.initial_position).abs())
}

/// Time left for communication after moving to `x`.
fn comm_time(x: f64, params: &SystemParams) -> Result<f64> {
    let move_time = params.move_time(x);
    if move_time > params.block_duration {
        return Err(Error::MovementTooLong {
            distance: (x - params.initial_position).abs(),
            move_time,
            block: params.block_duration,
        });
    }
    Ok(params.block_duration - move_time)
}

fn check_region(x: f64, params: &SystemParams) -> Result<()> {
    if params.contains(x) {
        Ok(())
    } else {
        Err(Error::OutsideRegion {
            x,
            region: params.region_length,
        })
    }
}

/// Energy of one block: `E₀|x − x⁰| + P_t (T − |x − x⁰|/v)`.
pub fn total_energy(x: f64, params: &SystemParams) -> Result<f64> {
    let comm = comm_time(x, params)?;
    Ok(
        params.energy_per_meter() * (x - params.initial_position).abs()
            + params.max_tx_power * comm,
    )
}

/// Throughput of one block: `(T − |x − x⁰|/v) log₂(1 + Γ)`.
pub fn throughput(x: f64, gain: f64, params: &SystemParams) -> Result<f64> {
    let comm = comm_time(x, params)?;
    Ok(comm * (1.0 + mrc_snr(gain, params)).log2())
}

pub fn energy_efficiency(x: f64, gain: f64, params: &SystemParams) -> Result<EeBreakdown> {
    let move_time = params.move_time(x);
    let throughput = throughput(x, gain, params)?;
    let energy = total_energy(x, params)?;
    let ee = if energy > 0.0 {
        throughput / energy
    } else {
        0.0
    };
    Ok(EeBreakdown {
        position: x,
        move_time,
        throughput,
        energy,
        ee,
        snr: mrc_snr(gain, params),
        feasible: params.contains(x) && throughput >= params.min_throughput,
    })
}

/// [`energy_efficiency`] with the gain read from the expansion.
pub fn evaluate(e: &GainExpansion, x: f64, params: &SystemParams) -> Result<EeBreakdown> {
    energy_efficiency(x, e.gain(x), params)
}

/// Efficiency at `x`, or `None` when the move does not fit in the block.
pub(crate) fn ee_at(e: &GainExpansion, x: f64, params: &SystemParams) -> Option<EeBreakdown> {
    evaluate(e, x, params).ok()
}

/// Best achievable efficiency if no movement were needed: the antenna sits at
/// the gain maximizer `x̄` from the start, so
/// `EE_ub = log₂(1 + P_t ‖h(x̄)‖² / σ²) / P_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperBound {
    pub ee: f64,
    /// Gain maximizer `x̄` over the region.
    pub position: f64,
    pub gain: f64,
}

/// Default grid step for locating `x̄`: λ/200.
pub fn default_bound_resolution(params: &SystemParams) -> f64 {
    params.wavelength / 200.0
}

/// Efficiency upper bound. `x̄` is located on a uniform grid over `[0, A]` and
/// polished by golden-section search; ties resolve to the smallest position.
pub fn ee_upper_bound(
    e: &GainExpansion,
    params: &SystemParams,
    grid_resolution: f64,
) -> Result<UpperBound> {
    if !(grid_resolution > 0.0) {
        return Err(Error::invalid(
            "grid_resolution",
            format!("must be positive, got {grid_resolution}"),
        ));
    }
    let position = gain_maximizer(e, params, grid_resolution);
    let gain = e.gain(position);
    let ee = (1.0 + mrc_snr(gain, params)).log2() / params.max_tx_power;
    Ok(UpperBound { ee, position, gain })
}

fn gain_maximizer(e: &GainExpansion, params: &SystemParams, resolution: f64) -> f64 {
    let grid = search::uniform_grid(0.0, params.region_length, resolution);
    let values: Vec<f64> = grid.iter().map(|&x| e.gain(x)).collect();
    let best = search::argmax_first(&values).expect("grid is never empty");
    let (lo, hi) = search::neighbour_bracket(&grid, best);
    let tol = params.wavelength * 1e-6;
    let polished = search::golden_section_max(|x| e.gain(x), lo, hi, tol);
    if e.gain(polished.x) > values[best] {
        polished.x
    } else {
        grid[best]
    }
}
