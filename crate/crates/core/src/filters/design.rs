use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::Numerology;
use crate::spectral::{Direction, FftPlan};

/// Canonical tight window `S^{-1/2} g` of the Gabor system with time shift
/// `hop` and `period` channels on the cyclic group of length `g.len()`.
///
/// The frame operator is diagonal in the Zak domain, so the window is
/// obtained by dividing the Zak transform of `g` by the square root of that
/// diagonal. With `hop = period / 2` and a Gaussian input this yields the
/// IOTA / EGF family.
pub fn tight_window(g: &[f64], hop: usize, period: usize) -> Result<Vec<f64>> {
    let p = g.len();
    if hop == 0 || period == 0 || !p.is_multiple_of(hop) || !p.is_multiple_of(period) {
        return Err(invalid(format!(
            "support {p} must be a multiple of hop {hop} and period {period}"
        )));
    }
    let lz = p / hop;
    let nq = p / period;

    // corr[q][r] = sum_l g[r - l hop] g[r - l hop - q period], indices mod p.
    let mut corr = vec![0.0; nq * hop];
    for q in 0..nq {
        let shift = (q * period) % p;
        for r in 0..hop {
            let mut acc = 0.0;
            for l in 0..lz {
                let idx = (r + p - (l * hop) % p) % p;
                acc += g[idx] * g[(idx + p - shift) % p];
            }
            corr[q * hop + r] = acc;
        }
    }

    let plan = FftPlan::new(lz)?;
    let mut out = vec![0.0; p];
    let mut zak = vec![Complex64::new(0.0, 0.0); lz];
    for r in 0..hop {
        for (l, z) in zak.iter_mut().enumerate() {
            *z = Complex64::new(g[r + l * hop], 0.0);
        }
        plan.process(&mut zak, Direction::Forward);
        for (j, z) in zak.iter_mut().enumerate() {
            let sigma: f64 = period as f64
                * (0..nq)
                    .map(|q| corr[q * hop + r] * libm::cos(4.0 * PI * (q * j) as f64 / lz as f64))
                    .sum::<f64>();
            if !(sigma > 0.0) {
                return Err(Error::Design(format!(
                    "frame operator is singular at residue {r}, frequency {j}"
                )));
            }
            *z /= libm::sqrt(sigma);
        }
        plan.process(&mut zak, Direction::Inverse);
        for (l, z) in zak.iter().enumerate() {
            out[r + l * hop] = z.re / lz as f64;
        }
    }
    Ok(out)
}

/// Tikhonov weight that keeps passband taps from drifting.
const REGULARIZATION: f64 = 1e-3;
const MAX_ITERATIONS: usize = 50;

/// Sparse constraint gradient: `(index into the half-filter, value)` pairs.
struct Row {
    entries: Vec<(usize, f64)>,
}

/// Projects an even-symmetric filter onto the set of filters with exact
/// real orthogonality on the OQAM lattice.
///
/// With hop `a = M L / 2` the filter splits into `a` polyphase components
/// `g_r[l] = g[r + l a]`. Real orthogonality holds iff every component has
/// zero autocorrelation at all non-zero even lags and all components share
/// the same energy. Those quadratic constraints are met by Gauss-Newton
/// steps that minimise the added energy above `stopband_edge` (in units of
/// the subcarrier spacing), so the out-of-band behaviour of the input is kept.
pub fn project_real_orthogonal(taps: &[f64], numerology: Numerology, stopband_edge: f64) -> Result<Vec<f64>> {
    let n = taps.len();
    let a = numerology.hop();
    if n == 0 || !n.is_multiple_of(a) || !n.is_multiple_of(2) {
        return Err(invalid(format!("filter length {n} is not an even multiple of the hop {a}")));
    }
    let k2 = n / a;
    let half = n / 2;
    let mirror = |i: usize| if i < half { i } else { n - 1 - i };

    if !(stopband_edge > 0.0 && stopband_edge < numerology.fft_size() as f64 / 2.0) {
        return Err(invalid(format!("stopband edge {stopband_edge} is outside the Nyquist band")));
    }
    let nu = stopband_edge / numerology.fft_size() as f64;
    let qf = |d: i64| -> f64 {
        if d == 0 {
            1.0 - 2.0 * nu
        } else {
            let d = d as f64;
            -libm::sin(2.0 * PI * nu * d) / (PI * d)
        }
    };
    let weight = DMatrix::from_fn(half, half, |i, j| {
        let (i, j) = (i as i64, j as i64);
        2.0 * (qf(i - j) + qf(i + j + 1 - n as i64)) + if i == j { REGULARIZATION } else { 0.0 }
    });
    let weight_inv = weight
        .cholesky()
        .ok_or_else(|| Error::Design("stopband weight matrix is not positive definite".into()))?
        .inverse();

    let mut h: Vec<f64> = taps[..half].to_vec();
    let mut previous = f64::INFINITY;
    let mut worst = f64::INFINITY;
    for _ in 0..MAX_ITERATIONS {
        let g: Vec<f64> = (0..n).map(|i| h[mirror(i)]).collect();
        let (rows, values) = constraints(&g, a, k2, half, mirror);
        worst = values.iter().fold(0.0f64, |w, v| w.max(libm::fabs(*v)));
        if worst < 1e-16 || (worst < 1e-12 && worst > 0.5 * previous) {
            break;
        }
        previous = worst;

        // jq = J W^-1, then the Gram matrix J W^-1 J^T.
        let nr = rows.len();
        let mut jq = DMatrix::<f64>::zeros(nr, half);
        for (ri, row) in rows.iter().enumerate() {
            for &(i, v) in &row.entries {
                for c in 0..half {
                    jq[(ri, c)] += v * weight_inv[(i, c)];
                }
            }
        }
        let gram = DMatrix::from_fn(nr, nr, |ri, rj| {
            rows[rj].entries.iter().map(|&(i, v)| jq[(ri, i)] * v).sum::<f64>()
        });
        let lambda = gram
            .cholesky()
            .ok_or_else(|| Error::Design("orthogonality constraints are rank deficient".into()))?
            .solve(&DVector::from_vec(values));
        let step: DVector<f64> = jq.transpose() * lambda;
        for (hi, s) in h.iter_mut().zip(step.iter()) {
            *hi -= s;
        }
    }
    if worst > 1e-12 {
        return Err(Error::Design(format!(
            "orthogonality projection stalled with residual {worst:e}"
        )));
    }
    let mut out: Vec<f64> = (0..n).map(|i| h[mirror(i)]).collect();
    let e = libm::sqrt(out.iter().map(|v| v * v).sum::<f64>());
    out.iter_mut().for_each(|v| *v /= e);
    Ok(out)
}

/// Constraint values and their gradients with respect to the half filter.
///
/// Components `r` and `a - 1 - r` are mirror images, so only the first half
/// of the residues is constrained.
fn constraints(
    g: &[f64],
    a: usize,
    k2: usize,
    half: usize,
    mirror: impl Fn(usize) -> usize,
) -> (Vec<Row>, Vec<f64>) {
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut reference: Option<(f64, Vec<f64>)> = None;
    let mut dense = vec![0.0; half];
    for r in 0..a.div_ceil(2) {
        let comp: Vec<f64> = (0..k2).map(|l| g[r + l * a]).collect();
        for lag in (0..k2).step_by(2) {
            let value: f64 = (lag..k2).map(|l| comp[l] * comp[l - lag]).sum();
            dense.iter_mut().for_each(|v| *v = 0.0);
            for l in 0..k2 {
                let mut d = 0.0;
                if l >= lag {
                    d += comp[l - lag];
                }
                if l + lag < k2 {
                    d += comp[l + lag];
                }
                dense[mirror(r + l * a)] += d;
            }
            let (value, grad) = if lag == 0 {
                match &reference {
                    None => {
                        reference = Some((value, dense.clone()));
                        continue;
                    }
                    Some((v0, g0)) => {
                        let grad: Vec<f64> = dense.iter().zip(g0).map(|(x, y)| x - y).collect();
                        (value - v0, grad)
                    }
                }
            } else {
                (value, dense.clone())
            };
            let entries = grad
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(i, v)| (i, *v))
                .collect();
            rows.push(Row { entries });
            values.push(value);
        }
    }
    (rows, values)
}
