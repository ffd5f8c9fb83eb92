use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{ChannelProfile, ProfileName};
use crate::error::{invalid, mismatch, Result};
use crate::filters::PrototypeFilter;
use crate::grid::{ComplexGrid, ComplexSignal, GridRole, Numerology};
use crate::spreading::OfdmParams;

/// Tap gains actually applied by [`apply_tdl`].
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub sample_rate: f64,
    /// Tap delays rounded to whole samples.
    pub delays: Vec<usize>,
    /// Rounded delay minus requested delay, in seconds.
    pub delay_rounding_s: Vec<f64>,
    /// `gains[tap][k]`: complex gain at output sample `k`.
    pub gains: Vec<Vec<Complex64>>,
}

impl ChannelRealization {
    pub fn len(&self) -> usize {
        self.gains.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Sum-of-sinusoids Rayleigh process
/// `g(t) = sqrt(P/N) sum_i exp(j (2 pi f_D cos(alpha_i) t + phi_i))`
/// with uniformly drawn arrival angles `alpha_i` and phases `phi_i`.
/// Evaluated by rotating one phasor per oscillator.
fn sos_gain<R: Rng>(
    power: f64,
    doppler_hz: f64,
    oscillators: usize,
    sample_rate: f64,
    len: usize,
    rng: &mut R,
) -> Vec<Complex64> {
    let amp = libm::sqrt(power / oscillators as f64);
    let mut phasors = Vec::with_capacity(oscillators);
    let mut steps = Vec::with_capacity(oscillators);
    for _ in 0..oscillators {
        let alpha: f64 = rng.random::<f64>() * 2.0 * PI;
        let phi: f64 = rng.random::<f64>() * 2.0 * PI;
        phasors.push(Complex64::from_polar(amp, phi));
        steps.push(Complex64::from_polar(1.0, 2.0 * PI * doppler_hz * libm::cos(alpha) / sample_rate));
    }
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(phasors.iter().sum());
        phasors.iter_mut().zip(&steps).for_each(|(p, w)| *p *= w);
    }
    out
}

/// `r[k] = sum_taps g_tap[k] s[k - d_tap]`, lengthened by the largest delay.
///
/// Each tap is an independent sum-of-sinusoids process seeded from the
/// profile seed; the AWGN profile is the identity.
pub fn apply_tdl(s: &ComplexSignal, profile: &ChannelProfile) -> Result<(ComplexSignal, ChannelRealization)> {
    if s.is_empty() {
        return Err(invalid("cannot apply a channel to an empty signal"));
    }
    let fs = s.sample_rate;
    let delays: Vec<usize> = profile.tap_delays_s().iter().map(|d| libm::round(d * fs) as usize).collect();
    let rounding = profile
        .tap_delays_s()
        .iter()
        .zip(&delays)
        .map(|(d, k)| *k as f64 / fs - d)
        .collect();
    let max_delay = *delays.last().expect("non-empty");
    if max_delay >= s.len() {
        return Err(invalid(format!(
            "channel delay of {max_delay} samples exceeds the signal length {}",
            s.len()
        )));
    }
    let out_len = s.len() + max_delay;
    let gains: Vec<Vec<Complex64>> = if profile.name() == ProfileName::Awgn {
        vec![vec![Complex64::new(1.0, 0.0); out_len]]
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(profile.seed());
        profile
            .tap_powers_linear()
            .iter()
            .map(|&p| sos_gain(p, profile.max_doppler_hz(), profile.oscillators(), fs, out_len, &mut rng))
            .collect()
    };
    let mut out = vec![Complex64::new(0.0, 0.0); out_len];
    for (g, &d) in gains.iter().zip(&delays) {
        for (i, &v) in s.samples.iter().enumerate() {
            out[i + d] += g[i + d] * v;
        }
    }
    let realization = ChannelRealization { sample_rate: fs, delays, delay_rounding_s: rounding, gains };
    Ok((ComplexSignal::new(out, fs), realization))
}

/// Genie coefficients `h[m,n] = sum_taps gbar[tap,n] exp(-j 2 pi m d_tap / (M L))`,
/// where `gbar` averages the tap gain over window `n` with `weights`
/// (which must sum to one) starting at sample `starts[n]`.
pub fn effective_coefficients(
    realization: &ChannelRealization,
    numerology: Numerology,
    starts: &[usize],
    weights: &[f64],
) -> Result<ComplexGrid> {
    let m = numerology.subcarriers;
    let period = numerology.fft_size() as f64;
    let need = starts.iter().map(|s| s + weights.len()).max().unwrap_or(0);
    if realization.len() < need {
        return Err(mismatch(format!(
            "realization covers {} samples, windows need {need}",
            realization.len()
        )));
    }
    let mut h = ComplexGrid::zeros(m, starts.len(), GridRole::Channel);
    let ramps: Vec<Vec<Complex64>> = realization
        .delays
        .iter()
        .map(|&d| (0..m).map(|k| Complex64::from_polar(1.0, -2.0 * PI * (k * d) as f64 / period)).collect())
        .collect();
    for (n, &start) in starts.iter().enumerate() {
        let col = h.column_mut(n);
        for (g, ramp) in realization.gains.iter().zip(&ramps) {
            let avg: Complex64 = g[start..start + weights.len()].iter().zip(weights).map(|(v, w)| v * w).sum();
            col.iter_mut().zip(ramp).for_each(|(c, r)| *c += avg * r);
        }
    }
    Ok(h)
}

/// Coefficients for an FBMC burst: slot `n` averages over its receive
/// window with the squared prototype taps as weights.
pub fn effective_coefficients_fbmc(
    realization: &ChannelRealization,
    filter: &PrototypeFilter,
    slots: usize,
) -> Result<ComplexGrid> {
    let num = filter.numerology();
    let weights: Vec<f64> = filter.taps().iter().map(|p| p * p).collect();
    let starts: Vec<usize> = (0..slots).map(|n| n * num.hop()).collect();
    effective_coefficients(realization, num, &starts, &weights)
}

/// Coefficients for a CP-OFDM burst: uniform average over each symbol body.
pub fn effective_coefficients_ofdm(
    realization: &ChannelRealization,
    params: &OfdmParams,
    symbols: usize,
) -> Result<ComplexGrid> {
    let period = params.numerology.fft_size();
    let weights = vec![1.0 / period as f64; period];
    let starts: Vec<usize> = (0..symbols).map(|s| s * params.symbol_len() + params.cp_len).collect();
    effective_coefficients(realization, params.numerology, &starts, &weights)
}
