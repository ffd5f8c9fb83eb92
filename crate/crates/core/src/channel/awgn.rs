use core::ops::Range;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{invalid, Error, Result};
use crate::grid::ComplexSignal;

/// How the noise level is derived from the requested SNR.
#[derive(Debug, Clone, PartialEq)]
pub struct AwgnSpec {
    /// `f64::INFINITY` disables noise.
    pub snr_db: f64,
    /// Samples whose mean power is the signal reference; `None` uses all.
    pub power_window: Option<Range<usize>>,
    /// Ratio of the sample rate to the occupied bandwidth. The SNR is then
    /// an in-band ratio: noise variance is `P L / snr`.
    pub bandwidth_ratio: f64,
}

impl AwgnSpec {
    pub fn new(snr_db: f64) -> Self {
        Self { snr_db, power_window: None, bandwidth_ratio: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AwgnOutput {
    pub signal: ComplexSignal,
    /// Complex noise variance per sample, `E|w|^2`.
    pub noise_variance: f64,
}

/// Adds complex white Gaussian noise of variance `variance` per sample.
pub fn add_noise<R: Rng + ?Sized>(s: &ComplexSignal, variance: f64, rng: &mut R) -> ComplexSignal {
    let sd = libm::sqrt(variance / 2.0);
    let samples = s
        .samples
        .iter()
        .map(|z| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            z + Complex64::new(re, im) * sd
        })
        .collect();
    ComplexSignal::new(samples, s.sample_rate)
}

/// `r = s + w` with the noise level set from the measured signal power.
pub fn apply_awgn<R: Rng + ?Sized>(s: &ComplexSignal, spec: &AwgnSpec, rng: &mut R) -> Result<AwgnOutput> {
    if spec.snr_db.is_nan() {
        return Err(invalid("SNR is NaN"));
    }
    if !(spec.bandwidth_ratio.is_finite() && spec.bandwidth_ratio > 0.0) {
        return Err(invalid("bandwidth ratio must be positive"));
    }
    if let Some(w) = &spec.power_window {
        if w.start >= w.end || w.end > s.len() {
            return Err(invalid("power window lies outside the signal"));
        }
    }
    if spec.snr_db == f64::INFINITY {
        return Ok(AwgnOutput { signal: s.clone(), noise_variance: 0.0 });
    }
    let power = s.mean_power(spec.power_window.clone());
    if !(power > 0.0) {
        return Err(Error::ZeroPowerSignal);
    }
    let snr = libm::pow(10.0, spec.snr_db / 10.0);
    let variance = power * spec.bandwidth_ratio / snr;
    Ok(AwgnOutput { signal: add_noise(s, variance, rng), noise_variance: variance })
}
