//! Scalar constants of the single-user movable-antenna link.

use crate::error::{Error, Result};

/// Converts a power level in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Converts a power ratio in dB to linear scale.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// All problem constants, in SI units (watts, meters, seconds).
///
/// The defaults reproduce the reference simulation setup: a 16-antenna base
/// station, 10 propagation paths, a 2-wavelength moving region at 30 GHz and a
/// stepper-motor driver drawing 0.5 W at 0.2 m/s.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemParams {
    /// Carrier wavelength λ (m).
    pub wavelength: f64,
    /// Length A of the moving region `[0, A]` (m).
    pub region_length: f64,
    /// Number of base-station antennas N.
    pub num_bs_antennas: usize,
    /// Number of propagation paths L.
    pub num_paths: usize,
    /// Maximum transmit power P_t (W).
    pub max_tx_power: f64,
    /// Driver power draw P while the antenna moves (W).
    pub movement_power: f64,
    /// Antenna moving speed v (m/s).
    pub speed: f64,
    /// Transmission block duration T (s).
    pub block_duration: f64,
    /// Minimum throughput per block R_TH (bits/Hz).
    pub min_throughput: f64,
    /// Noise power σ² (W).
    pub noise_power: f64,
    /// Antenna position x⁰ at the start of the block (m).
    pub initial_position: f64,
    /// Path loss at the 1 m reference distance, linear.
    pub pathloss_ref: f64,
    /// Base station to user distance (m).
    pub distance: f64,
    /// Path loss exponent.
    pub pathloss_exponent: f64,
    /// Convergence tolerance of the optimizer.
    pub tolerance: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        let region_length = 0.02;
        Self {
            wavelength: 0.01,
            region_length,
            num_bs_antennas: 16,
            num_paths: 10,
            max_tx_power: dbm_to_watts(10.0),
            movement_power: 0.5,
            speed: 0.2,
            block_duration: 5.0,
            min_throughput: 5.0,
            noise_power: dbm_to_watts(-70.0),
            initial_position: region_length / 2.0,
            pathloss_ref: db_to_linear(-40.0),
            distance: 50.0,
            pathloss_exponent: 2.8,
            tolerance: 1e-4,
        }
    }
}

impl SystemParams {
    /// Movement energy rate E₀ = P / v in joules per meter.
    pub fn energy_per_meter(&self) -> f64 {
        self.movement_power / self.speed
    }

    /// Variance of each path-response coefficient, ρ₀ d^(−α̃) / L.
    pub fn path_variance(&self) -> f64 {
        self.pathloss_ref * self.distance.powf(-self.pathloss_exponent) / self.num_paths as f64
    }

    /// Time spent moving from x⁰ to `x`.
    pub fn move_time(&self, x: f64) -> f64 {
        (x - self.initial_position).abs() / self.speed
    }

    /// True when the driver draws less power than the transmitter, which makes
    /// movement look cheaper than transmitting in the Dinkelbach objective.
    pub fn movement_cheaper_than_tx(&self) -> bool {
        self.movement_power < self.max_tx_power
    }

    pub fn contains(&self, x: f64) -> bool {
        (0.0..=self.region_length).contains(&x)
    }

    pub fn validate(&self) -> Result<()> {
        fn positive(name: &'static str, v: f64) -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    name,
                    format!("must be positive and finite, got {v}"),
                ))
            }
        }
        positive("wavelength", self.wavelength)?;
        positive("region_length", self.region_length)?;
        positive("max_tx_power", self.max_tx_power)?;
        positive("speed", self.speed)?;
        positive("block_duration", self.block_duration)?;
        positive("noise_power", self.noise_power)?;
        positive("pathloss_ref", self.pathloss_ref)?;
        positive("distance", self.distance)?;
        if self.num_bs_antennas == 0 {
            return Err(Error::invalid("num_bs_antennas", "must be at least 1"));
        }
        if self.num_paths == 0 {
            return Err(Error::invalid("num_paths", "must be at least 1"));
        }
        if !(self.movement_power.is_finite() && self.movement_power >= 0.0) {
            return Err(Error::invalid(
                "movement_power",
                format!("must be non-negative, got {}", self.movement_power),
            ));
        }
        if !(self.min_throughput.is_finite() && self.min_throughput >= 0.0) {
            return Err(Error::invalid(
                "min_throughput",
                format!("must be non-negative, got {}", self.min_throughput),
            ));
        }
        if !self.pathloss_exponent.is_finite() {
            return Err(Error::invalid("pathloss_exponent", "must be finite"));
        }
        if !self.contains(self.initial_position) {
            return Err(Error::invalid(
                "initial_position",
                format!(
                    "{} lies outside [0, {}]",
                    self.initial_position, self.region_length
                ),
            ));
        }
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return Err(Error::invalid(
                "tolerance",
                format!("must lie in (0, 1), got {}", self.tolerance),
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_setup() {
        let p = SystemParams::default();
        assert_eq!(p.wavelength, 0.01);
        assert_eq!(p.region_length, 0.02);
        assert_eq!(p.num_bs_antennas, 16);
        assert_eq!(p.num_paths, 10);
        assert!((p.max_tx_power - 0.01).abs() < 1e-15);
        assert!((p.noise_power - 1e-10).abs() < 1e-24);
        assert!((p.pathloss_ref - 1e-4).abs() < 1e-18);
        assert_eq!(p.movement_power, 0.5);
        assert_eq!(p.speed, 0.2);
        assert_eq!(p.block_duration, 5.0);
        assert_eq!(p.min_throughput, 5.0);
        assert_eq!(p.tolerance, 1e-4);
        assert_eq!(p.initial_position, 0.01);
        p.validate().unwrap();
    }

    #[test]
    fn energy_rate_is_power_over_speed() {
        let p = SystemParams::default();
        assert_eq!(p.energy_per_meter(), 0.5 / 0.2);
    }

    #[test]
    fn rejects_bad_values() {
        let mut p = SystemParams::default();
        p.speed = 0.0;
        assert!(p.validate().is_err());

        let mut p = SystemParams::default();
        p.initial_position = 0.03;
        assert!(p.validate().is_err());

        let mut p = SystemParams::default();
        p.tolerance = 1.0;
        assert!(p.validate().is_err());

        let mut p = SystemParams::default();
        p.num_paths = 0;
        assert!(p.validate().is_err());
    }
}
