//! Conjugate-symmetric mapping of `M/2` data symbols onto `M` positions.
//!
//! Positions, with `Q = M/4`:
//!
//! | `l`                | `c(l)`            |
//! |--------------------|-------------------|
//! | `0`                | `d(0)`            |
//! | `1 .. Q`           | `d(l)`            |
//! | `Q`                | `Re d(Q)`         |
//! | `Q+1 .. 2Q`        | `d*(2Q - l)`      |
//! | `2Q`               | `d*(0)`           |
//! | `2Q+1 .. 3Q`       | `d(l - Q)`        |
//! | `3Q`               | `Im d(Q)`         |
//! | `3Q+1 .. 4Q`       | `d*(5Q - l)`      |
//!
//! The column is then rotated by `j^n`. Before the rotation it satisfies
//! `c(M/2 - l) = c*(l)` (indices mod `M`); odd `n` flips the sign of that
//! relation. The DFT of such a column, divided by `j^(m+n)`, is real.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::SQRT_2;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Result};

/// How the two real-valued positions `M/4` and `3M/4` are weighted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MidpointScaling {
    /// Carry `Re d(M/4)` and `Im d(M/4)` with unit weight, as in the table.
    /// `d(M/4)` then receives half the energy of the other symbols.
    Literal,
    /// Weight both positions by `sqrt(2)` so every data symbol carries the
    /// same energy and the map preserves total power.
    #[default]
    EnergyBalanced,
}

impl MidpointScaling {
    fn factor(&self) -> f64 {
        match self {
            Self::Literal => 1.0,
            Self::EnergyBalanced => SQRT_2,
        }
    }
}

/// One mapped column and the sign `lambda` of its symmetry relation
/// `c(M/2 - l) = lambda c*(l)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MappedColumn {
    pub values: Vec<Complex64>,
    pub lambda: i8,
}

impl MappedColumn {
    /// Largest deviation from `c(M/2 - l) = lambda c*(l)` over all `l`.
    pub fn symmetry_error(&self) -> f64 {
        let m = self.values.len();
        let lambda = self.lambda as f64;
        (0..m)
            .map(|l| (self.values[(m / 2 + m - l) % m] - self.values[l].conj() * lambda).norm())
            .fold(0.0, f64::max)
    }
}

pub(crate) fn j_pow(n: usize) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn check_len(half: usize) -> Result<usize> {
    let m = 2 * half;
    if m == 0 || !m.is_multiple_of(4) {
        return Err(invalid(format!(
            "conjugate-symmetric mapping needs M divisible by 4, got M = {m}"
        )));
    }
    Ok(m)
}

/// Maps `d` (length `M/2`) for slot `n`.
pub fn conjugate_symmetric_map(d: &[Complex64], slot: usize, scaling: MidpointScaling) -> Result<MappedColumn> {
    let m = check_len(d.len())?;
    let q = m / 4;
    let w = scaling.factor();
    let rot = j_pow(slot);
    let values = (0..m)
        .map(|l| {
            let v = if l == 0 {
                d[0]
            } else if l < q {
                d[l]
            } else if l == q {
                Complex64::new(w * d[q].re, 0.0)
            } else if l < 2 * q {
                d[2 * q - l].conj()
            } else if l == 2 * q {
                d[0].conj()
            } else if l < 3 * q {
                d[l - q]
            } else if l == 3 * q {
                Complex64::new(w * d[q].im, 0.0)
            } else {
                d[5 * q - l].conj()
            };
            v * rot
        })
        .collect();
    Ok(MappedColumn { values, lambda: if slot.is_multiple_of(2) { 1 } else { -1 } })
}

/// Inverse of [`conjugate_symmetric_map`]; conjugate pairs are averaged.
pub fn demap(c: &[Complex64], slot: usize, scaling: MidpointScaling) -> Result<Vec<Complex64>> {
    if !c.len().is_multiple_of(2) {
        return Err(mismatch(format!("mapped column length {} is odd", c.len())));
    }
    let m = check_len(c.len() / 2)?;
    let q = m / 4;
    let w = scaling.factor();
    let unrot = j_pow(slot).conj();
    let c: Vec<Complex64> = c.iter().map(|v| v * unrot).collect();
    Ok((0..2 * q)
        .map(|l| {
            if l == 0 {
                (c[0] + c[2 * q].conj()) * 0.5
            } else if l < q {
                (c[l] + c[2 * q - l].conj()) * 0.5
            } else if l == q {
                Complex64::new(c[q].re / w, c[3 * q].re / w)
            } else {
                (c[l + q] + c[5 * q - l].conj()) * 0.5
            }
        })
        .collect())
}
