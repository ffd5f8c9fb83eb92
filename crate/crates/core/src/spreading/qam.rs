//! Gray-mapped square QAM with unit average energy.
//!
//! The bit-to-symbol tables follow the LTE modulation mapper: for 4-QAM the
//! bit pair `b0 b1` maps to `((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2)`; for
//! 64-QAM bits `b0 b2 b4` select the in-phase level and `b1 b3 b5` the
//! quadrature level, with per-axis Gray order `00 -> 3, 01 -> 1, 10 -> 5,
//! 11 -> 7` before the sign bit and the `1/sqrt(42)` normalization.

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constellation {
    Qam4,
    Qam64,
}

impl Constellation {
    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            4 => Ok(Self::Qam4),
            64 => Ok(Self::Qam64),
            _ => Err(invalid(format!("unsupported QAM order {order}; use 4 or 64"))),
        }
    }

    pub fn order(&self) -> usize {
        match self {
            Self::Qam4 => 4,
            Self::Qam64 => 64,
        }
    }

    pub fn bits_per_symbol(&self) -> usize {
        match self {
            Self::Qam4 => 2,
            Self::Qam64 => 6,
        }
    }

    fn scale(&self) -> f64 {
        match self {
            Self::Qam4 => libm::sqrt(0.5),
            Self::Qam64 => 1.0 / libm::sqrt(42.0),
        }
    }

    /// Maps one axis worth of bits (1 for 4-QAM, 3 for 64-QAM) to an
    /// unnormalized amplitude.
    fn level(&self, bits: &[u8]) -> f64 {
        let sign = 1.0 - 2.0 * bits[0] as f64;
        match self {
            Self::Qam4 => sign,
            Self::Qam64 => {
                let inner = 1.0 - 2.0 * bits[2] as f64;
                let outer = 1.0 - 2.0 * bits[1] as f64;
                sign * (4.0 - outer * (2.0 - inner))
            }
        }
    }

    fn slice(&self, v: f64, out: &mut Vec<u8>) {
        out.push(u8::from(v < 0.0));
        if *self == Self::Qam64 {
            let mag = libm::fabs(v);
            out.push(u8::from(mag > 4.0));
            out.push(u8::from(libm::fabs(mag - 4.0) > 2.0));
        }
    }

    /// All constellation points in bit-label order.
    pub fn points(&self) -> Vec<Complex64> {
        let k = self.bits_per_symbol();
        let bits: Vec<u8> = (0..self.order())
            .flat_map(|s| (0..k).map(move |b| ((s >> (k - 1 - b)) & 1) as u8))
            .collect();
        self.modulate(&bits).expect("complete symbols")
    }

    pub fn modulate(&self, bits: &[u8]) -> Result<Vec<Complex64>> {
        let k = self.bits_per_symbol();
        if !bits.len().is_multiple_of(k) {
            return Err(invalid(format!(
                "{} bits is not a multiple of {k} bits per symbol",
                bits.len()
            )));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(invalid("bits must be 0 or 1"));
        }
        let s = self.scale();
        Ok(bits
            .chunks_exact(k)
            .map(|c| {
                let (i, q) = match self {
                    Self::Qam4 => (self.level(&[c[0]]), self.level(&[c[1]])),
                    Self::Qam64 => (self.level(&[c[0], c[2], c[4]]), self.level(&[c[1], c[3], c[5]])),
                };
                Complex64::new(i * s, q * s)
            })
            .collect())
    }

    /// Minimum-distance hard decisions.
    pub fn demodulate(&self, symbols: &[Complex64]) -> Vec<u8> {
        let s = self.scale();
        let mut out = Vec::with_capacity(symbols.len() * self.bits_per_symbol());
        let mut i_bits = Vec::with_capacity(3);
        let mut q_bits = Vec::with_capacity(3);
        for z in symbols {
            i_bits.clear();
            q_bits.clear();
            self.slice(z.re / s, &mut i_bits);
            self.slice(z.im / s, &mut q_bits);
            for (bi, bq) in i_bits.iter().zip(&q_bits) {
                out.push(*bi);
                out.push(*bq);
            }
        }
        out
    }
}

/// Convenience wrapper for [`Constellation::modulate`].
pub fn qam_mod(constellation: Constellation, bits: &[u8]) -> Result<Vec<Complex64>> {
    constellation.modulate(bits)
}

/// Convenience wrapper for [`Constellation::demodulate`].
pub fn qam_demod(constellation: Constellation, symbols: &[Complex64]) -> Vec<u8> {
    constellation.demodulate(symbols)
}
