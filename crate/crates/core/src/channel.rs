//! Field-response channel model for a single receive antenna moving on a line.
//!
//! The channel from an N-antenna base station is `h(x) = Gᴴ f(x)` where `G` is
//! the L×N path-response matrix and `f(x)` collects the per-path phase shifts
//! `exp(j 2π/λ · x · ϑ_l)` seen at position `x`. Its power gain expands into a
//! constant plus one cosine per pair of paths, which gives cheap closed forms
//! for the gain and its first two derivatives.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Lower bound applied to the curvature constant so Taylor surrogates stay
/// well defined when the gain is constant (a single path).
pub const CURVATURE_FLOOR: f64 = 1e-12;

/// Elevation, azimuth and virtual angle of arrival of each path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathAngles {
    theta: Vec<f64>,
    phi: Vec<f64>,
    vartheta: Vec<f64>,
}

impl PathAngles {
    /// Builds angles from elevation/azimuth pairs; virtual angles are derived
    /// once as `sin θ · cos φ` and stored.
    pub fn from_elevation_azimuth(theta: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        if theta.len() != phi.len() {
            return Err(Error::invalid(
                "angles",
                format!("{} elevations but {} azimuths", theta.len(), phi.len()),
            ));
        }
        let vartheta = theta
            .iter()
            .zip(&phi)
            .map(|(t, p)| t.sin() * p.cos())
            .collect();
        Self::from_parts(theta, phi, vartheta)
    }

    /// Builds angles from stored triples, as read back from a fixture.
    pub fn from_parts(theta: Vec<f64>, phi: Vec<f64>, vartheta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::invalid("angles", "at least one path is required"));
        }
        if theta.len() != phi.len() || theta.len() != vartheta.len() {
            return Err(Error::invalid("angles", "angle arrays differ in length"));
        }
        if let Some(v) = vartheta.iter().find(|v| !(v.abs() <= 1.0)) {
            return Err(Error::invalid(
                "vartheta",
                format!("virtual angle {v} outside [-1, 1]"),
            ));
        }
        Ok(Self {
            theta,
            phi,
            vartheta,
        })
    }

    /// Paths with the given virtual angles only; elevation is set to π/2 and
    /// azimuth to `acos(ϑ)` so the stored triple is self-consistent.
    pub fn from_virtual(vartheta: Vec<f64>) -> Result<Self> {
        let theta = vec![PI / 2.0; vartheta.len()];
        let phi = vartheta.iter().map(|v| v.clamp(-1.0, 1.0).acos()).collect();
        Self::from_parts(theta, phi, vartheta)
    }

    pub fn len(&self) -> usize {
        self.vartheta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vartheta.is_empty()
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn vartheta(&self) -> &[f64] {
        &self.vartheta
    }
}

/// The L×N matrix `G` of path-response coefficients, stored row-major, with the
/// angles of its L paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResponseMatrix {
    entries: Vec<Complex64>,
    num_antennas: usize,
    angles: PathAngles,
}

impl PathResponseMatrix {
    pub fn new(entries: Vec<Complex64>, num_antennas: usize, angles: PathAngles) -> Result<Self> {
        let num_paths = angles.len();
        if num_antennas == 0 {
            return Err(Error::invalid("num_antennas", "must be at least 1"));
        }
        if entries.len() != num_paths * num_antennas {
            return Err(Error::invalid(
                "entries",
                format!(
                    "expected {num_paths}x{num_antennas} = {} entries, got {}",
                    num_paths * num_antennas,
                    entries.len()
                ),
            ));
        }
        if entries
            .iter()
            .any(|g| !g.re.is_finite() || !g.im.is_finite())
        {
            return Err(Error::invalid("entries", "all coefficients must be finite"));
        }
        Ok(Self {
            entries,
            num_antennas,
            angles,
        })
    }

    pub fn num_paths(&self) -> usize {
        self.angles.len()
    }

    pub fn num_antennas(&self) -> usize {
        self.num_antennas
    }

    pub fn angles(&self) -> &PathAngles {
        &self.angles
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Coefficient of path `l` towards base-station antenna `n` (zero-based).
    pub fn get(&self, l: usize, n: usize) -> Complex64 {
        self.entries[l * self.num_antennas + n]
    }

    pub fn row(&self, l: usize) -> &[Complex64] {
        &self.entries[l * self.num_antennas..(l + 1) * self.num_antennas]
    }
}

/// Field-response vector `f(x)`: one unit-magnitude phasor per path.
pub fn field_response(angles: &PathAngles, wavelength: f64, x: f64) -> Result<Vec<Complex64>> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid(
            "wavelength",
            format!("must be positive, got {wavelength}"),
        ));
    }
    let k = 2.0 * PI / wavelength;
    Ok(angles
        .vartheta()
        .iter()
        .map(|v| Complex64::from_polar(1.0, k * x * v))
        .collect())
}

/// Channel vector `h(x) = Gᴴ f(x)`, evaluated directly.
pub fn channel_vector(g: &PathResponseMatrix, wavelength: f64, x: f64) -> Result<Vec<Complex64>> {
    let f = field_response(g.angles(), wavelength, x)?;
    let mut h = vec![Complex64::new(0.0, 0.0); g.num_antennas()];
    for (l, fl) in f.iter().enumerate() {
        for (hn, gln) in h.iter_mut().zip(g.row(l)) {
            *hn += gln.conj() * fl;
        }
    }
    Ok(h)
}

/// Power gain `‖Gᴴ f(x)‖²` by direct evaluation of the channel vector.
pub fn direct_gain(g: &PathResponseMatrix, wavelength: f64, x: f64) -> Result<f64> {
    Ok(channel_vector(g, wavelength, x)?
        .iter()
        .map(|h| h.norm_sqr())
        .sum())
}

/// Cross term between paths `a < b` of the gain expansion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossTerm {
    pub a: usize,
    pub b: usize,
    /// `Y_ab = Σ_n g_{a,n} g*_{b,n}`.
    pub y: Complex64,
    /// `ϑ_b − ϑ_a`.
    pub dvartheta: f64,
    magnitude: f64,
    phase: f64,
    /// Spatial angular frequency `2π/λ · ϑ_ab` in rad/m.
    omega: f64,
}

/// Closed-form coefficients of the channel power gain:
///
/// `‖h(x)‖² = X + Σ_{a<b} 2|Y_ab| cos(2π/λ · x · ϑ_ab + ∠Y_ab)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainExpansion {
    x_sum: f64,
    terms: Vec<CrossTerm>,
    wavelength: f64,
}

/// Precomputes the gain expansion of `g` at the given wavelength.
pub fn build_expansion(g: &PathResponseMatrix, wavelength: f64) -> Result<GainExpansion> {
    if !(wavelength > 0.0) {
        return Err(Error::invalid(
            "wavelength",
            format!("must be positive, got {wavelength}"),
        ));
    }
    let x_sum = g.entries().iter().map(|e| e.norm_sqr()).sum();
    let vartheta = g.angles().vartheta();
    let l = g.num_paths();
    let k = 2.0 * PI / wavelength;
    let mut terms = Vec::with_capacity(l * l.saturating_sub(1) / 2);
    for a in 0..l {
        for b in a + 1..l {
            let y: Complex64 = g
                .row(a)
                .iter()
                .zip(g.row(b))
                .map(|(ga, gb)| ga * gb.conj())
                .sum();
            let dvartheta = vartheta[b] - vartheta[a];
            terms.push(CrossTerm {
                a,
                b,
                y,
                dvartheta,
                magnitude: y.norm(),
                phase: y.arg(),
                omega: k * dvartheta,
            });
        }
    }
    Ok(GainExpansion {
        x_sum,
        terms,
        wavelength,
    })
}

impl GainExpansion {
    /// `X = Σ_l Σ_n |g_{l,n}|²`.
    pub fn x_sum(&self) -> f64 {
        self.x_sum
    }

    pub fn terms(&self) -> &[CrossTerm] {
        &self.terms
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// `Y_ab` for zero-based `a < b`.
    pub fn cross(&self, a: usize, b: usize) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.a == a && t.b == b)
            .map(|t| t.y)
    }

    /// Channel power gain `‖h(x)‖²`.
    pub fn gain(&self, x: f64) -> f64 {
        self.x_sum
            + self
                .terms
                .iter()
                .map(|t| 2.0 * t.magnitude * (t.omega * x + t.phase).cos())
                .sum::<f64>()
    }

    /// First derivative of `h(x) = P_t · ‖h(x)‖²`.
    pub fn derivative(&self, tx_power: f64, x: f64) -> f64 {
        -2.0 * tx_power
            * self
                .terms
                .iter()
                .map(|t| t.magnitude * t.omega * (t.omega * x + t.phase).sin())
                .sum::<f64>()
    }

    /// Second derivative of `h(x) = P_t · ‖h(x)‖²`.
    pub fn second_derivative(&self, tx_power: f64, x: f64) -> f64 {
        -2.0 * tx_power
            * self
                .terms
                .iter()
                .map(|t| t.magnitude * t.omega * t.omega * (t.omega * x + t.phase).cos())
                .sum::<f64>()
    }

    /// Curvature constant `ε = Σ_{a<b} 8π² P_t |Y_ab| ϑ_ab² / λ²`, which
    /// dominates the second derivative of `P_t · gain` everywhere.
    pub fn curvature_bound(&self, tx_power: f64) -> f64 {
        let scale = 8.0 * PI * PI * tx_power / (self.wavelength * self.wavelength);
        scale
            * self
                .terms
                .iter()
                .map(|t| t.magnitude * t.dvartheta * t.dvartheta)
                .sum::<f64>()
    }

    /// [`Self::curvature_bound`] floored at [`CURVATURE_FLOOR`].
    pub fn curvature(&self, tx_power: f64) -> f64 {
        self.curvature_bound(tx_power).max(CURVATURE_FLOOR)
    }

    /// Largest possible `|h'(x)|`: `Σ 2 P_t |Y_ab| |ω_ab|`.
    pub fn derivative_scale(&self, tx_power: f64) -> f64 {
        2.0 * tx_power
            * self
                .terms
                .iter()
                .map(|t| t.magnitude * t.omega.abs())
                .sum::<f64>()
    }
}

pub fn gain_eval(e: &GainExpansion, x: f64) -> f64 {
    e.gain(x)
}

pub fn gain_derivative(e: &GainExpansion, tx_power: f64, x: f64) -> f64 {
    e.derivative(tx_power, x)
}

pub fn gain_second_derivative(e: &GainExpansion, tx_power: f64, x: f64) -> f64 {
    e.second_derivative(tx_power, x)
}

pub fn curvature_bound(e: &GainExpansion, tx_power: f64) -> f64 {
    e.curvature_bound(tx_power)
}

/// Draws a random channel instance.
///
/// Angles are drawn first (θ_l then φ_l for each path, uniform on `[0, π]`),
/// followed by the L×N coefficients in row-major order, each circularly
/// symmetric complex Gaussian with variance `ρ₀ d^(−α̃) / L`.
pub fn sample_instance<R: Rng + ?Sized>(params: &SystemParams, rng: &mut R) -> PathResponseMatrix {
    let l = params.num_paths;
    let n = params.num_bs_antennas;
    let angle = Uniform::new_inclusive(0.0, PI).expect("valid angle range");
    let mut theta = Vec::with_capacity(l);
    let mut phi = Vec::with_capacity(l);
    for _ in 0..l {
        theta.push(angle.sample(rng));
        phi.push(angle.sample(rng));
    }
    let std = (params.path_variance() / 2.0).sqrt();
    let normal = Normal::new(0.0, std).expect("finite variance");
    let entries = (0..l * n)
        .map(|_| Complex64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    let angles = PathAngles::from_elevation_azimuth(theta, phi).expect("angles in range");
    PathResponseMatrix::new(entries, n, angles).expect("shape matches params")
}
