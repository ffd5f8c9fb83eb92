//! PAPR, CCDF, power spectral density and bit-error statistics.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral::{Direction, FftPlan};

/// Per-window PAPR values and the number of zero-power windows skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct PaprSeries {
    pub values_db: Vec<f64>,
    pub skipped: usize,
}

/// Splits `s` into consecutive windows of `window` samples (a trailing
/// partial window is dropped) and returns `10 log10(max|s|^2 / mean|s|^2)`
/// for each.
pub fn papr_db(s: &[Complex64], window: usize) -> Result<PaprSeries> {
    if window == 0 {
        return Err(invalid("PAPR window must be at least one sample"));
    }
    if s.len() < window {
        return Err(invalid(format!("signal of {} samples is shorter than the window {window}", s.len())));
    }
    let mut values_db = Vec::with_capacity(s.len() / window);
    let mut skipped = 0;
    for chunk in s.chunks_exact(window) {
        let (peak, sum) = chunk.iter().fold((0.0f64, 0.0f64), |(p, t), z| {
            let e = z.norm_sqr();
            (p.max(e), t + e)
        });
        if sum > 0.0 {
            values_db.push(10.0 * libm::log10(peak * window as f64 / sum));
        } else {
            skipped += 1;
        }
    }
    Ok(PaprSeries { values_db, skipped })
}

/// Empirical `Pr(PAPR >= threshold)` on a threshold grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CcdfCurve {
    pub thresholds_db: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub sample_count: usize,
}

impl CcdfCurve {
    /// Normal-approximation binomial interval `p +- z sqrt(p (1 - p) / n)`,
    /// clipped to `[0, 1]`.
    pub fn confidence(&self, z: f64) -> Vec<(f64, f64)> {
        self.probabilities
            .iter()
            .map(|&p| binomial_interval(p, self.sample_count as f64, z))
            .collect()
    }
}

fn binomial_interval(p: f64, n: f64, z: f64) -> (f64, f64) {
    let half = z * libm::sqrt(p * (1.0 - p) / n);
    ((p - half).max(0.0), (p + half).min(1.0))
}

pub fn ccdf(paprs_db: &[f64], grid_db: &[f64]) -> Result<CcdfCurve> {
    if paprs_db.is_empty() {
        return Err(Error::EmptyInput("PAPR samples"));
    }
    let mut sorted = paprs_db.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();
    let probabilities = grid_db
        .iter()
        .map(|&g| {
            let below = sorted.partition_point(|&v| v < g);
            (n - below) as f64 / n as f64
        })
        .collect();
    Ok(CcdfCurve { thresholds_db: grid_db.to_vec(), probabilities, sample_count: n })
}

/// Smallest sample value `g` with `Pr(PAPR >= g) >= probability`, i.e. the
/// PAPR read off the empirical CCDF at that level.
pub fn papr_at_probability(paprs_db: &[f64], probability: f64) -> Result<f64> {
    if paprs_db.is_empty() {
        return Err(Error::EmptyInput("PAPR samples"));
    }
    if !(probability > 0.0 && probability <= 1.0) {
        return Err(invalid(format!("CCDF level must lie in (0, 1], got {probability}")));
    }
    let mut sorted = paprs_db.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let k = libm::ceil(probability * sorted.len() as f64) as usize;
    Ok(sorted[k.clamp(1, sorted.len()) - 1])
}

/// Welch PSD estimate, peak-normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdEstimate {
    /// Normalized frequency in cycles per sample, ascending over `[-0.5, 0.5)`.
    pub frequencies: Vec<f64>,
    pub power_db: Vec<f64>,
    pub segments: usize,
    /// Set when fewer than two segments were averaged.
    pub single_segment: bool,
}

impl PsdEstimate {
    /// Level at the bin nearest to `frequency` (cycles per sample).
    pub fn level_at(&self, frequency: f64) -> f64 {
        let n = self.frequencies.len();
        let mut f = frequency + 0.5;
        f -= libm::floor(f);
        let idx = (libm::round(f * n as f64) as usize) % n;
        self.power_db[idx]
    }
}

/// Running Welch average with a Hann window, usable across many bursts.
#[derive(Debug, Clone)]
pub struct WelchAccumulator {
    segment: usize,
    step: usize,
    window: Vec<f64>,
    plan: FftPlan,
    sum: Vec<f64>,
    segments: usize,
}

impl WelchAccumulator {
    pub fn new(segment: usize, overlap: f64) -> Result<Self> {
        if segment < 2 {
            return Err(invalid("Welch segment must be at least 2 samples"));
        }
        if !(0.0..1.0).contains(&overlap) {
            return Err(invalid(format!("Welch overlap must lie in [0, 1), got {overlap}")));
        }
        let step = ((segment as f64 * (1.0 - overlap)) as usize).max(1);
        let window = (0..segment)
            .map(|k| 0.5 - 0.5 * libm::cos(2.0 * PI * k as f64 / (segment - 1) as f64))
            .collect();
        Ok(Self { segment, step, window, plan: FftPlan::new(segment)?, sum: vec![0.0; segment], segments: 0 })
    }

    /// Adds every full segment of `s`; returns the number added.
    pub fn add(&mut self, s: &[Complex64]) -> usize {
        let mut buf = vec![Complex64::new(0.0, 0.0); self.segment];
        let mut added = 0;
        let mut start = 0;
        while start + self.segment <= s.len() {
            for ((b, x), w) in buf.iter_mut().zip(&s[start..start + self.segment]).zip(&self.window) {
                *b = x * w;
            }
            self.plan.process(&mut buf, Direction::Forward);
            self.sum.iter_mut().zip(&buf).for_each(|(acc, z)| *acc += z.norm_sqr());
            added += 1;
            start += self.step;
        }
        self.segments += added;
        added
    }

    /// Merges another accumulator with the same settings.
    pub fn merge(&mut self, other: &WelchAccumulator) -> Result<()> {
        if other.segment != self.segment || other.step != self.step {
            return Err(invalid("cannot merge Welch accumulators with different settings"));
        }
        self.sum.iter_mut().zip(&other.sum).for_each(|(a, b)| *a += b);
        self.segments += other.segments;
        Ok(())
    }

    pub fn segments(&self) -> usize {
        self.segments
    }

    pub fn finish(&self) -> Result<PsdEstimate> {
        if self.segments == 0 {
            return Err(Error::EmptyInput("no complete Welch segment"));
        }
        let n = self.segment;
        let peak = self.sum.iter().cloned().fold(0.0, f64::max);
        if !(peak > 0.0) {
            return Err(Error::ZeroPowerSignal);
        }
        let half = n / 2;
        let mut frequencies = Vec::with_capacity(n);
        let mut power_db = Vec::with_capacity(n);
        for i in 0..n {
            let k = (i + n - half) % n;
            let bin = k as f64 / n as f64;
            frequencies.push(if k >= n - half { bin - 1.0 } else { bin });
            power_db.push(10.0 * libm::log10((self.sum[k] / peak).max(1e-300)));
        }
        Ok(PsdEstimate { frequencies, power_db, segments: self.segments, single_segment: self.segments < 2 })
    }
}

/// Welch estimate of a single signal.
pub fn psd_welch(s: &[Complex64], segment: usize, overlap: f64) -> Result<PsdEstimate> {
    if segment > s.len() {
        return Err(invalid(format!("segment {segment} exceeds the signal length {}", s.len())));
    }
    let mut acc = WelchAccumulator::new(segment, overlap)?;
    acc.add(s);
    acc.finish()
}

/// Bit-error count at one SNR.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bit_errors: u64,
    pub bits_total: u64,
}

impl BerPoint {
    pub fn new(snr_db: f64) -> Self {
        Self { snr_db, bit_errors: 0, bits_total: 0 }
    }

    pub fn ber(&self) -> f64 {
        if self.bits_total == 0 {
            return 0.0;
        }
        self.bit_errors as f64 / self.bits_total as f64
    }

    /// Binomial standard deviation of the estimate.
    pub fn std_dev(&self) -> f64 {
        let p = self.ber();
        libm::sqrt(p * (1.0 - p) / self.bits_total.max(1) as f64)
    }

    pub fn confidence(&self, z: f64) -> (f64, f64) {
        binomial_interval(self.ber(), self.bits_total.max(1) as f64, z)
    }

    pub fn record(&mut self, errors: u64, bits: u64) {
        self.bit_errors += errors;
        self.bits_total += bits;
    }
}

/// Monte Carlo budget: once `min_bits` have been simulated, stop at whichever
/// of `max_bits` or `target_errors` is reached first.
///
/// In fading, errors cluster in deeply faded bursts; `min_bits` keeps enough
/// channel realizations in every estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub min_bits: u64,
    pub max_bits: u64,
    pub target_errors: u64,
}

impl StopRule {
    pub fn is_done(&self, point: &BerPoint) -> bool {
        if point.bits_total < self.min_bits.min(self.max_bits) {
            return false;
        }
        point.bits_total >= self.max_bits || point.bit_errors >= self.target_errors
    }
}

/// Gaussian tail probability `Q(x) = erfc(x / sqrt 2) / 2`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / core::f64::consts::SQRT_2)
}

/// Bit error rate of Gray-mapped QPSK in AWGN at symbol SNR `Es/N0`.
pub fn qpsk_awgn_ber(snr_db: f64) -> f64 {
    q_function(libm::sqrt(libm::pow(10.0, snr_db / 10.0)))
}

/// Counts positions where two bit streams differ.
pub fn count_bit_errors(a: &[u8], b: &[u8]) -> u64 {
    a.iter().zip(b).filter(|(x, y)| x != y).count() as u64
}
