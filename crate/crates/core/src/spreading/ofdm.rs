//! Cyclic-prefix OFDM and SC-FDMA baselines on the same numerology.
//!
//! Data occupies bins `0..M` of an `M L`-point transform, so the band and
//! the sample rate match the filter-bank waveforms. Symbols are scaled by
//! `1/sqrt(M L)`, which makes the demodulator unitary.

use alloc::format;
use alloc::vec;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Error, Result};
use crate::grid::{ComplexGrid, ComplexSignal, GridRole, Numerology};
use crate::spectral::{Direction, FftPlan};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OfdmParams {
    pub numerology: Numerology,
    /// Cyclic prefix in samples at the oversampled rate.
    pub cp_len: usize,
}

impl OfdmParams {
    pub fn new(numerology: Numerology, cp_len: usize) -> Result<Self> {
        if cp_len > numerology.fft_size() {
            return Err(invalid(format!(
                "cyclic prefix {cp_len} exceeds the symbol length {}",
                numerology.fft_size()
            )));
        }
        Ok(Self { numerology, cp_len })
    }

    /// Default prefix of one eighth of the symbol.
    pub fn with_default_cp(numerology: Numerology) -> Self {
        Self { numerology, cp_len: numerology.fft_size() / 8 }
    }

    pub fn symbol_len(&self) -> usize {
        self.numerology.fft_size() + self.cp_len
    }

    pub fn burst_len(&self, symbols: usize) -> usize {
        symbols * self.symbol_len()
    }
}

/// CP-OFDM modulation of an `M x S` grid of subcarrier symbols.
pub fn ofdm_tx(d: &ComplexGrid, params: &OfdmParams) -> Result<ComplexSignal> {
    let num = params.numerology;
    let (m, period) = (num.subcarriers, num.fft_size());
    if d.rows() != m {
        return Err(mismatch(format!("grid has {} rows, expected {m}", d.rows())));
    }
    if d.columns() == 0 {
        return Err(Error::EmptyInput("symbol grid"));
    }
    if !d.is_finite() {
        return Err(Error::NonFinite("symbol grid"));
    }
    let plan = FftPlan::new(period)?;
    let scale = 1.0 / libm::sqrt(period as f64);
    let sym_len = params.symbol_len();
    let mut out = vec![Complex64::new(0.0, 0.0); params.burst_len(d.columns())];
    let mut buf = vec![Complex64::new(0.0, 0.0); period];
    for s in 0..d.columns() {
        buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
        buf[..m].copy_from_slice(d.column(s));
        plan.process(&mut buf, Direction::Inverse);
        let dst = &mut out[s * sym_len..(s + 1) * sym_len];
        for (i, o) in dst.iter_mut().enumerate() {
            *o = buf[(i + period - params.cp_len) % period] * scale;
        }
    }
    Ok(ComplexSignal::new(out, num.sample_rate()))
}

/// SC-FDMA: per-symbol `M`-point DFT (unit power) followed by [`ofdm_tx`].
pub fn scfdma_tx(d: &ComplexGrid, params: &OfdmParams) -> Result<ComplexSignal> {
    ofdm_tx(&super::scfdma_spread(d)?, params)
}

/// Removes the prefix and returns the `M x S` grid of subcarrier outputs.
pub fn ofdm_demodulate(r: &ComplexSignal, params: &OfdmParams, symbols: usize) -> Result<ComplexGrid> {
    let num = params.numerology;
    let (m, period) = (num.subcarriers, num.fft_size());
    let need = params.burst_len(symbols);
    if r.len() < need {
        return Err(mismatch(format!("need {need} samples for {symbols} symbols, got {}", r.len())));
    }
    let plan = FftPlan::new(period)?;
    let scale = 1.0 / libm::sqrt(period as f64);
    let sym_len = params.symbol_len();
    let mut y = ComplexGrid::zeros(m, symbols, GridRole::Received);
    let mut buf = vec![Complex64::new(0.0, 0.0); period];
    for s in 0..symbols {
        let start = s * sym_len + params.cp_len;
        buf.copy_from_slice(&r.samples[start..start + period]);
        plan.process(&mut buf, Direction::Forward);
        y.column_mut(s).iter_mut().zip(&buf[..m]).for_each(|(o, v)| *o = v * scale);
    }
    Ok(y)
}
