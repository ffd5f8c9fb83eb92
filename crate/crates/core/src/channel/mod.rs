//! Propagation channels, genie channel knowledge and single-tap equalizers.

mod awgn;
mod equalizer;
mod fading;

pub use awgn::{add_noise, apply_awgn, AwgnOutput, AwgnSpec};
pub use equalizer::{mmse_equalize, mmse_equalize_complex, mmse_weights, zf_equalize};
pub use fading::{
    apply_tdl, effective_coefficients, effective_coefficients_fbmc, effective_coefficients_ofdm,
    ChannelRealization,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileName {
    Awgn,
    PedestrianA,
    VehicularA,
    Custom,
}

/// Default number of sinusoids per fading tap.
pub const DEFAULT_OSCILLATORS: usize = 32;

/// Tapped-delay-line description.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelProfile {
    name: ProfileName,
    tap_delays_s: Vec<f64>,
    tap_powers_db: Vec<f64>,
    max_doppler_hz: f64,
    oscillators: usize,
    seed: u64,
}

impl ChannelProfile {
    /// Validates the taps and renormalizes their powers to sum to one.
    pub fn new(
        name: ProfileName,
        tap_delays_s: Vec<f64>,
        tap_powers_db: Vec<f64>,
        max_doppler_hz: f64,
        seed: u64,
    ) -> Result<Self> {
        if tap_delays_s.is_empty() || tap_delays_s.len() != tap_powers_db.len() {
            return Err(invalid(format!(
                "{} tap delays and {} tap powers",
                tap_delays_s.len(),
                tap_powers_db.len()
            )));
        }
        if tap_delays_s.iter().any(|d| !(d.is_finite() && *d >= 0.0)) {
            return Err(invalid("tap delays must be finite and non-negative"));
        }
        if tap_delays_s.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("tap delays must be strictly increasing"));
        }
        if tap_powers_db.iter().any(|p| !p.is_finite()) {
            return Err(invalid("tap powers must be finite"));
        }
        if !(max_doppler_hz.is_finite() && max_doppler_hz >= 0.0) {
            return Err(invalid("maximum Doppler must be finite and non-negative"));
        }
        let total: f64 = tap_powers_db.iter().map(|p| libm::pow(10.0, p / 10.0)).sum();
        let offset = 10.0 * libm::log10(total);
        let tap_powers_db = tap_powers_db.iter().map(|p| p - offset).collect();
        Ok(Self { name, tap_delays_s, tap_powers_db, max_doppler_hz, oscillators: DEFAULT_OSCILLATORS, seed })
    }

    /// Identity channel; only noise is added.
    pub fn awgn() -> Self {
        Self {
            name: ProfileName::Awgn,
            tap_delays_s: vec![0.0],
            tap_powers_db: vec![0.0],
            max_doppler_hz: 0.0,
            oscillators: DEFAULT_OSCILLATORS,
            seed: 0,
        }
    }

    /// ITU-R M.1225 Pedestrian A.
    pub fn pedestrian_a(max_doppler_hz: f64) -> Result<Self> {
        Self::new(
            ProfileName::PedestrianA,
            vec![0.0, 110e-9, 190e-9, 410e-9],
            vec![0.0, -9.7, -19.2, -22.8],
            max_doppler_hz,
            0,
        )
    }

    /// ITU-R M.1225 Vehicular A.
    pub fn vehicular_a(max_doppler_hz: f64) -> Result<Self> {
        Self::new(
            ProfileName::VehicularA,
            vec![0.0, 310e-9, 710e-9, 1090e-9, 1730e-9, 2510e-9],
            vec![0.0, -1.0, -9.0, -10.0, -15.0, -20.0],
            max_doppler_hz,
            0,
        )
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_oscillators(mut self, oscillators: usize) -> Result<Self> {
        if oscillators == 0 {
            return Err(invalid("at least one oscillator per tap is required"));
        }
        self.oscillators = oscillators;
        Ok(self)
    }

    pub fn name(&self) -> ProfileName {
        self.name
    }

    pub fn tap_delays_s(&self) -> &[f64] {
        &self.tap_delays_s
    }

    pub fn tap_powers_db(&self) -> &[f64] {
        &self.tap_powers_db
    }

    pub fn tap_powers_linear(&self) -> Vec<f64> {
        self.tap_powers_db.iter().map(|p| libm::pow(10.0, p / 10.0)).collect()
    }

    pub fn max_doppler_hz(&self) -> f64 {
        self.max_doppler_hz
    }

    pub fn oscillators(&self) -> usize {
        self.oscillators
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Largest tap delay.
    pub fn max_delay_s(&self) -> f64 {
        *self.tap_delays_s.last().expect("non-empty")
    }
}
