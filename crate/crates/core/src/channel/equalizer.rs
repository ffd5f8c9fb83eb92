//! Unbiased single-tap MMSE equalization.
//!
//! `v[m,n] = h*/(|h|^2 + rho) * M / sum_m' |h[m',n]|^2/(|h[m',n]|^2 + rho)`
//! with `rho = P_w / P_s`. The per-slot factor makes `(1/M) sum_m v h = 1`,
//! so decisions on `Re{y v}` are unbiased. `P_w = 0` is the zero-forcing
//! limit.

use alloc::format;
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::{check_same_shape, ComplexGrid, GridRole, RealGrid};

fn ratio(p_s: f64, p_w: f64) -> Result<f64> {
    if !(p_s.is_finite() && p_s > 0.0) {
        return Err(invalid(format!("signal power must be positive, got {p_s}")));
    }
    if !(p_w.is_finite() && p_w >= 0.0) {
        return Err(invalid(format!("noise power must be non-negative, got {p_w}")));
    }
    Ok(p_w / p_s)
}

pub fn mmse_weights(h: &ComplexGrid, p_s: f64, p_w: f64) -> Result<ComplexGrid> {
    let rho = ratio(p_s, p_w)?;
    let m = h.rows();
    let mut v = ComplexGrid::zeros(m, h.columns(), GridRole::Channel);
    for n in 0..h.columns() {
        let col = h.column(n);
        if col.iter().all(|z| z.norm_sqr() == 0.0) {
            return Err(Error::DegenerateChannel { slot: n });
        }
        let gain = |z: &Complex64| {
            let e = z.norm_sqr();
            if e + rho > 0.0 { e / (e + rho) } else { 0.0 }
        };
        let unbias = m as f64 / col.iter().map(gain).sum::<f64>();
        for (out, z) in v.column_mut(n).iter_mut().zip(col) {
            let den = z.norm_sqr() + rho;
            *out = if den > 0.0 { z.conj() / den * unbias } else { Complex64::new(0.0, 0.0) };
        }
    }
    Ok(v)
}

/// `y v` element by element.
pub fn mmse_equalize_complex(y: &ComplexGrid, h: &ComplexGrid, p_s: f64, p_w: f64) -> Result<ComplexGrid> {
    check_same_shape(y, h)?;
    let v = mmse_weights(h, p_s, p_w)?;
    let values = y.values().iter().zip(v.values()).map(|(a, b)| a * b).collect();
    ComplexGrid::from_values(y.rows(), y.columns(), GridRole::Received, values)
}

/// `Re{y v}`: real OQAM symbol estimates.
pub fn mmse_equalize(y: &ComplexGrid, h: &ComplexGrid, p_s: f64, p_w: f64) -> Result<RealGrid> {
    let z = mmse_equalize_complex(y, h, p_s, p_w)?;
    RealGrid::from_values(z.rows(), z.columns(), z.values().iter().map(|c| c.re).collect())
}

/// Zero forcing `y / h`; a zero coefficient is a degenerate channel.
pub fn zf_equalize(y: &ComplexGrid, h: &ComplexGrid) -> Result<ComplexGrid> {
    check_same_shape(y, h)?;
    let mut out = ComplexGrid::zeros(y.rows(), y.columns(), GridRole::Received);
    for n in 0..y.columns() {
        for m in 0..y.rows() {
            let c = h.get(m, n);
            if c.norm_sqr() == 0.0 {
                return Err(Error::DegenerateChannel { slot: n });
            }
            out.set(m, n, y.get(m, n) / c);
        }
    }
    Ok(out)
}
