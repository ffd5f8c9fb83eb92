//! Transmit front-ends and their receive-side inverses.

pub mod ofdm;
pub mod qam;
pub mod symmetric;

use alloc::format;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fbmc::{destagger, stagger, Staggering};
use crate::grid::{ComplexGrid, GridRole, RealGrid};
use crate::spectral::{dft, idft};

pub use ofdm::{ofdm_demodulate, ofdm_tx, scfdma_tx, OfdmParams};
pub use qam::{qam_demod, qam_mod, Constellation};
pub use symmetric::{conjugate_symmetric_map, demap, MappedColumn, MidpointScaling};

use symmetric::j_pow;

/// Output of [`map_dft_spread_tx`].
#[derive(Debug, Clone, PartialEq)]
pub struct MapDftSymbols {
    /// Phased subcarrier symbols `a[m,n]`.
    pub phased: ComplexGrid,
    /// Real OQAM symbols `x[m,n] = a[m,n] / j^(m+n)`.
    pub real: RealGrid,
}

fn check_data(d: &ComplexGrid) -> Result<()> {
    if d.rows() == 0 || d.columns() == 0 {
        return Err(Error::EmptyInput("data grid"));
    }
    if !d.is_finite() {
        return Err(Error::NonFinite("data grid"));
    }
    Ok(())
}

/// Conjugate-symmetric mapping followed by an `M`-point DFT per slot.
///
/// `d` is `M/2 x N`. Scaling by `1/sqrt(2M)` gives
/// `E[x^2] = E[|d|^2] / 2`, so the real grid carries the data power.
pub fn map_dft_spread_tx(d: &ComplexGrid, scaling: MidpointScaling) -> Result<MapDftSymbols> {
    map_dft_spread_tx_at(d, 0, scaling)
}

/// [`map_dft_spread_tx`] for a block whose first column is lattice slot
/// `first_slot`; the slot index enters both `j^n` and `theta`.
pub fn map_dft_spread_tx_at(d: &ComplexGrid, first_slot: usize, scaling: MidpointScaling) -> Result<MapDftSymbols> {
    check_data(d)?;
    let m = 2 * d.rows();
    let slots = d.columns();
    let scale = 1.0 / libm::sqrt(2.0 * m as f64);
    let mut phased = ComplexGrid::zeros(m, slots, GridRole::Spread);
    let mut real = RealGrid::zeros(m, slots);
    for n in 0..slots {
        let slot = first_slot + n;
        let c = conjugate_symmetric_map(d.column(n), slot, scaling)?;
        let a = dft(&c.values)?;
        for (k, v) in a.iter().enumerate() {
            let v = v * scale;
            phased.set(k, n, v);
            real.set(k, n, (v * j_pow(k + slot).conj()).re);
        }
    }
    Ok(MapDftSymbols { phased, real })
}

/// Restores the phase factors, inverts the DFT and demaps each slot.
pub fn map_dft_spread_rx(x: &RealGrid, scaling: MidpointScaling) -> Result<ComplexGrid> {
    map_dft_spread_rx_at(x, 0, scaling)
}

/// Inverse of [`map_dft_spread_tx_at`].
pub fn map_dft_spread_rx_at(x: &RealGrid, first_slot: usize, scaling: MidpointScaling) -> Result<ComplexGrid> {
    let m = x.subcarriers();
    if m == 0 || !m.is_multiple_of(4) {
        return Err(invalid(format!("map-DFT spreading needs M divisible by 4, got M = {m}")));
    }
    let scale = libm::sqrt(2.0 * m as f64);
    let mut d = ComplexGrid::zeros(m / 2, x.slots(), GridRole::Data);
    for n in 0..x.slots() {
        let slot = first_slot + n;
        let a: Vec<Complex64> = x.column(n).iter().enumerate().map(|(k, &v)| j_pow(k + slot) * v).collect();
        let c: Vec<Complex64> = idft(&a)?.into_iter().map(|v| v * scale).collect();
        d.column_mut(n).copy_from_slice(&demap(&c, slot, scaling)?);
    }
    Ok(d)
}

/// Per-column unit-power DFT.
fn spread_columns(d: &ComplexGrid) -> Result<ComplexGrid> {
    let scale = 1.0 / libm::sqrt(d.rows() as f64);
    let mut out = ComplexGrid::zeros(d.rows(), d.columns(), GridRole::Spread);
    for n in 0..d.columns() {
        let col = dft(d.column(n))?;
        out.column_mut(n).iter_mut().zip(col).for_each(|(o, v)| *o = v * scale);
    }
    Ok(out)
}

/// Inverse of [`spread_columns`].
fn despread_columns(d: &ComplexGrid) -> Result<ComplexGrid> {
    let scale = libm::sqrt(d.rows() as f64);
    let mut out = ComplexGrid::zeros(d.rows(), d.columns(), GridRole::Data);
    for n in 0..d.columns() {
        let col = idft(d.column(n))?;
        out.column_mut(n).iter_mut().zip(col).for_each(|(o, v)| *o = v * scale);
    }
    Ok(out)
}

/// Simple DFT spreading: per-column DFT, then OQAM staggering.
///
/// Scheme 1 ([`Staggering::Time`]) takes `d` as `M x N/2`; scheme 2
/// ([`Staggering::Frequency`]) takes `d` as `M/2 x N`.
pub fn simple_dft_spread_tx(d: &ComplexGrid, scheme: Staggering) -> Result<RealGrid> {
    check_data(d)?;
    Ok(stagger(&spread_columns(d)?, scheme))
}

/// Inverse of [`simple_dft_spread_tx`].
pub fn simple_dft_spread_rx(x: &RealGrid, scheme: Staggering) -> Result<ComplexGrid> {
    despread_columns(&destagger(x, scheme)?)
}

/// Plain FBMC-OQAM: scheme-1 staggering of the QAM symbols.
pub fn oqam_tx(d: &ComplexGrid) -> Result<RealGrid> {
    check_data(d)?;
    Ok(stagger(d, Staggering::Time))
}

/// Inverse of [`oqam_tx`].
pub fn oqam_rx(x: &RealGrid) -> Result<ComplexGrid> {
    destagger(x, Staggering::Time)
}

/// Per-column inverse DFT used by the SC-FDMA receiver.
pub fn scfdma_despread(d: &ComplexGrid) -> Result<ComplexGrid> {
    despread_columns(d)
}

/// Per-column DFT used by the SC-FDMA transmitter.
pub fn scfdma_spread(d: &ComplexGrid) -> Result<ComplexGrid> {
    check_data(d)?;
    spread_columns(d)
}
