//! DFT pair and the Dirichlet kernels that describe spread waveforms.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Transform direction for [`FftPlan::process`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `X[k] = sum x[n] exp(-j 2 pi k n / N)`
    Forward,
    /// `x[n] = sum X[k] exp(+j 2 pi k n / N)`
    Inverse,
}

/// Precomputed unnormalized transform of a fixed length.
///
/// Power-of-two lengths use an iterative radix-2 kernel; any other length
/// falls back to a direct O(N^2) evaluation with a cached twiddle table.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    twiddles: Vec<Complex64>,
    bitrev: Vec<usize>,
}

impl FftPlan {
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::EmptyInput("transform length"));
        }
        let twiddles = (0..len)
            .map(|k| Complex64::from_polar(1.0, -2.0 * PI * k as f64 / len as f64))
            .collect();
        let bitrev = if len.is_power_of_two() {
            let bits = len.trailing_zeros();
            (0..len)
                .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
                .collect()
        } else {
            Vec::new()
        };
        Ok(Self { len, twiddles, bitrev })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Unnormalized in-place transform. `buf.len()` must equal the plan length.
    pub fn process(&self, buf: &mut [Complex64], dir: Direction) {
        assert_eq!(buf.len(), self.len, "buffer length does not match plan");
        if self.bitrev.is_empty() {
            self.direct(buf, dir);
        } else {
            self.radix2(buf, dir);
        }
    }

    fn twiddle(&self, idx: usize, dir: Direction) -> Complex64 {
        let w = self.twiddles[idx];
        match dir {
            Direction::Forward => w,
            Direction::Inverse => w.conj(),
        }
    }

    fn radix2(&self, buf: &mut [Complex64], dir: Direction) {
        let n = self.len;
        for i in 0..n {
            let j = self.bitrev[i];
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut size = 2;
        while size <= n {
            let half = size / 2;
            let stride = n / size;
            for start in (0..n).step_by(size) {
                for k in 0..half {
                    let w = self.twiddle(k * stride, dir);
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            size *= 2;
        }
    }

    fn direct(&self, buf: &mut [Complex64], dir: Direction) {
        let n = self.len;
        let input: Vec<Complex64> = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (i, v) in input.iter().enumerate() {
                acc += v * self.twiddle((k * i) % n, dir);
            }
            *out = acc;
        }
    }
}

fn check_input(v: &[Complex64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::EmptyInput("dft input"));
    }
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("dft input"));
    }
    Ok(())
}

fn transform(v: &[Complex64], dir: Direction) -> Result<Vec<Complex64>> {
    check_input(v)?;
    let plan = FftPlan::new(v.len())?;
    let mut out = v.to_vec();
    plan.process(&mut out, dir);
    Ok(out)
}

/// Forward DFT `X[k] = sum x[l] exp(-j 2 pi k l / L)` (no scaling).
pub fn dft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    transform(v, Direction::Forward)
}

/// Inverse DFT `x[l] = (1/L) sum X[k] exp(+j 2 pi k l / L)`.
pub fn idft(v: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = transform(v, Direction::Inverse)?;
    let scale = 1.0 / v.len() as f64;
    out.iter_mut().for_each(|z| *z *= scale);
    Ok(out)
}

/// `f1(t) = sum_{m=0}^{M-1} exp(j 2 pi m F t)`.
///
/// Closed form `exp(j pi (M-1) F t) sin(pi M F t) / sin(pi F t)`, with the
/// removable singularities at `F t` integer evaluated by their limit.
pub fn dirichlet_f1(t: f64, subcarriers: usize, spacing_hz: f64) -> Complex64 {
    let m = subcarriers as f64;
    let x = spacing_hz * t;
    let phase = Complex64::from_polar(1.0, PI * (m - 1.0) * x);
    let den = libm::sin(PI * x);
    if libm::fabs(den) < 1e-12 {
        // At integer x every term equals 1.
        return Complex64::new(m, 0.0);
    }
    phase * (libm::sin(PI * m * x) / den)
}

/// `f2(t) = sum_{m=0}^{M/2-1} exp(j 4 pi m F t)`, i.e. `f1` with `M/2` terms at
/// twice the spacing.
pub fn dirichlet_f2(t: f64, subcarriers: usize, spacing_hz: f64) -> Result<Complex64> {
    if !subcarriers.is_multiple_of(2) || subcarriers == 0 {
        return Err(crate::error::invalid("f2 requires an even, non-zero subcarrier count"));
    }
    Ok(dirichlet_f1(t, subcarriers / 2, 2.0 * spacing_hz))
}
