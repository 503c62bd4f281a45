//! `key = value` parameter files.
//!
//! Keys follow the reference parameter table. Powers are given in the table's
//! units (`P_t` and `sigma2` in dBm, `rho_0` in dB, `P` in W) and converted to
//! linear watts here; everything else is SI. Unset keys keep their defaults,
//! and `x0` defaults to the centre of the region.
//!
//! ```text
//! # reference setup
//! lambda = 0.01
//! A      = 0.02
//! P_t    = 10      # dBm
//! ```

use std::collections::HashSet;
use std::path::Path;

use crate::error::{Error, Result};
use crate::params::{db_to_linear, dbm_to_watts, SystemParams};

pub const KEYS: &[&str] = &[
    "lambda",
    "A",
    "N",
    "L",
    "rho_0",
    "d",
    "alpha_tilde",
    "epsilon",
    "P_t",
    "P",
    "v",
    "T",
    "R_TH",
    "sigma2",
    "x0",
];

pub fn parse_config(text: &str) -> Result<SystemParams> {
    let mut p = SystemParams::default();
    let mut seen = HashSet::new();
    let mut x0 = None;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = i + 1;
        let (key, value) = line.split_once('=').ok_or_else(|| {
            Error::Config(format!(
                "line {lineno}: expected `key = value`, got `{line}`"
            ))
        })?;
        let key = key.trim();
        let value = value.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("line {lineno}: unknown key `{key}`")));
        }
        if !seen.insert(key.to_string()) {
            return Err(Error::Config(format!(
                "line {lineno}: duplicate key `{key}`"
            )));
        }
        let num = || -> Result<f64> {
            value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::Config(format!(
                        "line {lineno}: `{key}` needs a number, got `{value}`"
                    ))
                })
        };
        let count = || -> Result<usize> {
            value.parse::<usize>().map_err(|_| {
                Error::Config(format!(
                    "line {lineno}: `{key}` needs an integer, got `{value}`"
                ))
            })
        };
        match key {
            "lambda" => p.wavelength = num()?,
            "A" => p.region_length = num()?,
            "N" => p.num_bs_antennas = count()?,
            "L" => p.num_paths = count()?,
            "rho_0" => p.pathloss_ref = db_to_linear(num()?),
            "d" => p.distance = num()?,
            "alpha_tilde" => p.pathloss_exponent = num()?,
            "epsilon" => p.tolerance = num()?,
            "P_t" => p.max_tx_power = dbm_to_watts(num()?),
            "P" => p.movement_power = num()?,
            "v" => p.speed = num()?,
            "T" => p.block_duration = num()?,
            "R_TH" => p.min_throughput = num()?,
            "sigma2" => p.noise_power = dbm_to_watts(num()?),
            "x0" => x0 = Some(num()?),
            _ => unreachable!("key list checked above"),
        }
    }
    p.initial_position = x0.unwrap_or(p.region_length / 2.0);
    p.validate().map_err(|e| Error::Config(e.to_string()))?;
    Ok(p)
}

pub fn read_config(path: &Path) -> Result<SystemParams> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_reference_setup() {
        assert_eq!(parse_config("").unwrap(), SystemParams::default());
        assert_eq!(
            parse_config("# nothing\n\n").unwrap(),
            SystemParams::default()
        );
    }

    #[test]
    fn missing_keys_fall_back() {
        let p = parse_config("P = 2\nA = 0.03 # wider\n").unwrap();
        assert_eq!(p.movement_power, 2.0);
        assert_eq!(p.region_length, 0.03);
        assert_eq!(p.initial_position, 0.015);
        assert_eq!(p.block_duration, 5.0);
        assert_eq!(p.min_throughput, 5.0);
    }

    #[test]
    fn units_are_converted() {
        let p = parse_config("P_t = 20\nsigma2 = -80\nrho_0 = -30\nx0 = 0.004").unwrap();
        assert!((p.max_tx_power - 0.1).abs() < 1e-15);
        assert!((p.noise_power - 1e-11).abs() < 1e-25);
        assert!((p.pathloss_ref - 1e-3).abs() < 1e-17);
        assert_eq!(p.initial_position, 0.004);
    }

    #[test]
    fn errors_are_reported() {
        assert!(parse_config("Q = 1").is_err());
        assert!(parse_config("T 5").is_err());
        assert!(parse_config("T = five").is_err());
        assert!(parse_config("T = 5\nT = 6").is_err());
        assert!(parse_config("N = 2.5").is_err());
        assert!(parse_config("v = -1").is_err());
        assert!(parse_config("x0 = 1").is_err());
    }
}
