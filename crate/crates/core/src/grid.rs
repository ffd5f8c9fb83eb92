//! Time-frequency grids, sampled signals and lattice numerology.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Result};

/// Lattice parameters shared by every waveform.
///
/// `M` subcarriers spaced `F` apart, slot duration `T = 1/(2F)`, and an
/// integer oversampling factor `L` so the sample rate is `M F L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Numerology {
    pub subcarriers: usize,
    pub spacing_hz: f64,
    pub oversampling: usize,
}

impl Numerology {
    pub fn new(subcarriers: usize, spacing_hz: f64, oversampling: usize) -> Result<Self> {
        if subcarriers < 2 || !subcarriers.is_multiple_of(2) {
            return Err(invalid(format!(
                "subcarrier count must be even and at least 2, got {subcarriers}"
            )));
        }
        if !(spacing_hz.is_finite() && spacing_hz > 0.0) {
            return Err(invalid("subcarrier spacing must be positive"));
        }
        if oversampling == 0 {
            return Err(invalid("oversampling factor must be at least 1"));
        }
        Ok(Self { subcarriers, spacing_hz, oversampling })
    }

    /// Samples per multicarrier period `1/F`; also the transform size.
    pub fn fft_size(&self) -> usize {
        self.subcarriers * self.oversampling
    }

    /// Samples per half-symbol slot `T`.
    pub fn hop(&self) -> usize {
        self.fft_size() / 2
    }

    pub fn sample_rate(&self) -> f64 {
        self.fft_size() as f64 * self.spacing_hz
    }

    pub fn slot_duration(&self) -> f64 {
        0.5 / self.spacing_hz
    }
}

/// Real-valued OQAM symbol grid `x[m, n]`, stored slot by slot.
#[derive(Debug, Clone, PartialEq)]
pub struct RealGrid {
    subcarriers: usize,
    slots: usize,
    values: Vec<f64>,
}

impl RealGrid {
    pub fn zeros(subcarriers: usize, slots: usize) -> Self {
        Self { subcarriers, slots, values: vec![0.0; subcarriers * slots] }
    }

    pub fn from_fn(subcarriers: usize, slots: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut g = Self::zeros(subcarriers, slots);
        for n in 0..slots {
            for m in 0..subcarriers {
                g.values[n * subcarriers + m] = f(m, n);
            }
        }
        g
    }

    /// Builds a grid from slot-major values (`values[n * M + m]`).
    pub fn from_values(subcarriers: usize, slots: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != subcarriers * slots {
            return Err(mismatch(format!(
                "{} values for a {subcarriers}x{slots} grid",
                values.len()
            )));
        }
        Ok(Self { subcarriers, slots, values })
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn get(&self, m: usize, n: usize) -> f64 {
        self.values[n * self.subcarriers + m]
    }

    pub fn set(&mut self, m: usize, n: usize, v: f64) {
        self.values[n * self.subcarriers + m] = v;
    }

    pub fn column(&self, n: usize) -> &[f64] {
        &self.values[n * self.subcarriers..(n + 1) * self.subcarriers]
    }

    pub fn column_mut(&mut self, n: usize) -> &mut [f64] {
        &mut self.values[n * self.subcarriers..(n + 1) * self.subcarriers]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

/// What a complex grid holds; used to reject mixing domains by accident.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridRole {
    /// Data symbols `d[l, n]` before spreading.
    Data,
    /// Spread symbols `a[m, n]` or `D[m, n]` on subcarriers.
    Spread,
    /// Demodulator outputs `y[m, n]`.
    Received,
    /// Channel coefficients `h[m, n]`.
    Channel,
}

/// Complex grid `[rows, columns]`, stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGrid {
    rows: usize,
    columns: usize,
    role: GridRole,
    values: Vec<Complex64>,
}

impl ComplexGrid {
    pub fn zeros(rows: usize, columns: usize, role: GridRole) -> Self {
        Self { rows, columns, role, values: vec![Complex64::new(0.0, 0.0); rows * columns] }
    }

    pub fn from_fn(
        rows: usize,
        columns: usize,
        role: GridRole,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut g = Self::zeros(rows, columns, role);
        for n in 0..columns {
            for m in 0..rows {
                g.values[n * rows + m] = f(m, n);
            }
        }
        g
    }

    /// Builds a grid from column-major values (`values[n * rows + m]`).
    pub fn from_values(rows: usize, columns: usize, role: GridRole, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != rows * columns {
            return Err(mismatch(format!("{} values for a {rows}x{columns} grid", values.len())));
        }
        Ok(Self { rows, columns, role, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn columns(&self) -> usize {
        self.columns
    }

    pub fn role(&self) -> GridRole {
        self.role
    }

    pub fn with_role(mut self, role: GridRole) -> Self {
        self.role = role;
        self
    }

    pub fn get(&self, m: usize, n: usize) -> Complex64 {
        self.values[n * self.rows + m]
    }

    pub fn set(&mut self, m: usize, n: usize, v: Complex64) {
        self.values[n * self.rows + m] = v;
    }

    pub fn column(&self, n: usize) -> &[Complex64] {
        &self.values[n * self.rows..(n + 1) * self.rows]
    }

    pub fn column_mut(&mut self, n: usize) -> &mut [Complex64] {
        &mut self.values[n * self.rows..(n + 1) * self.rows]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

/// Complex baseband samples at a known rate.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSignal {
    pub samples: Vec<Complex64>,
    pub sample_rate: f64,
}

impl ComplexSignal {
    pub fn new(samples: Vec<Complex64>, sample_rate: f64) -> Self {
        Self { samples, sample_rate }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Mean of `|s|^2` over `range`, or over the whole signal when `None`.
    pub fn mean_power(&self, range: Option<core::ops::Range<usize>>) -> f64 {
        let r = range.unwrap_or(0..self.samples.len());
        let slice = &self.samples[r];
        if slice.is_empty() {
            return 0.0;
        }
        slice.iter().map(|z| z.norm_sqr()).sum::<f64>() / slice.len() as f64
    }
}

pub(crate) fn check_same_shape(a: &ComplexGrid, b: &ComplexGrid) -> Result<()> {
    if a.rows() != b.rows() || a.columns() != b.columns() {
        return Err(mismatch(format!(
            "grids are {}x{} and {}x{}",
            a.rows(),
            a.columns(),
            b.rows(),
            b.columns()
        )));
    }
    Ok(())
}
