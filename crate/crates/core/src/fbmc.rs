//! FBMC-OQAM synthesis and analysis filter banks.
//!
//! The basis function of subcarrier `m`, slot `n` is
//! `g[m,n][k] = theta[m,n] p[k - n a] exp(j 2 pi m (k - c) / (M L))`
//! with hop `a = M L / 2` and filter center `c = (len - 1) / 2`, so slot `n`
//! is centered at `n T`. Transmit is `s = sum x[m,n] g[m,n]`; receive is the
//! matched inner product `y[m,n] = <r, g[m,n]>`, whose real part returns
//! `x` when the filter is real-orthogonal.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::Range;
use num_complex::Complex64;

use crate::error::{invalid, mismatch, Error, Result};
use crate::filters::PrototypeFilter;
use crate::grid::{ComplexGrid, ComplexSignal, GridRole, RealGrid};
use crate::spectral::{Direction, FftPlan};

/// Powers of `j` assigned to each lattice point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasePattern {
    subcarriers: usize,
    slots: usize,
    exponents: Vec<u8>,
}

fn j_pow(e: u8) -> Complex64 {
    match e % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

impl PhasePattern {
    /// Builds a pattern from a function returning the exponent of `j`.
    pub fn from_exponents(subcarriers: usize, slots: usize, f: impl Fn(usize, usize) -> u8) -> Self {
        let mut exponents = vec![0; subcarriers * slots];
        for n in 0..slots {
            for m in 0..subcarriers {
                exponents[n * subcarriers + m] = f(m, n) % 4;
            }
        }
        Self { subcarriers, slots, exponents }
    }

    pub fn subcarriers(&self) -> usize {
        self.subcarriers
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn exponent(&self, m: usize, n: usize) -> u8 {
        self.exponents[n * self.subcarriers + m]
    }

    pub fn value(&self, m: usize, n: usize) -> Complex64 {
        j_pow(self.exponent(m, n))
    }

    /// True when every pair of neighbours in time and in frequency differs
    /// by a factor of `+j` or `-j`.
    pub fn is_quadrature(&self) -> bool {
        let odd = |a: u8, b: u8| (a + 4 - b) % 2 == 1;
        (0..self.slots).all(|n| {
            (0..self.subcarriers).all(|m| {
                let e = self.exponent(m, n);
                (m + 1 == self.subcarriers || odd(e, self.exponent(m + 1, n)))
                    && (n + 1 == self.slots || odd(e, self.exponent(m, n + 1)))
            })
        })
    }
}

/// `theta[m,n] = j^((m + n) mod 4)`.
pub fn default_phase(subcarriers: usize, slots: usize) -> PhasePattern {
    PhasePattern::from_exponents(subcarriers, slots, |m, n| ((m + n) % 4) as u8)
}

/// Sample range in which every overlapping slot is active:
/// `[len - a, N a)`. Empty when the burst is shorter than the filter.
pub fn steady_state_range(filter: &PrototypeFilter, slots: usize) -> Range<usize> {
    let a = filter.numerology().hop();
    let start = filter.len().saturating_sub(a);
    let end = slots * a;
    start..end.max(start)
}

/// Number of samples produced by [`synthesize`] for `slots` slots.
pub fn burst_len(filter: &PrototypeFilter, slots: usize) -> usize {
    if slots == 0 {
        return 0;
    }
    (slots - 1) * filter.numerology().hop() + filter.len()
}

/// Synthesis/analysis pair with its transform plan cached.
#[derive(Debug, Clone)]
pub struct FilterBank {
    filter: Arc<PrototypeFilter>,
    plan: FftPlan,
    /// `exp(-j 2 pi m c / (M L))` for `m < M`.
    center_ramp: Vec<Complex64>,
}

impl FilterBank {
    pub fn new(filter: Arc<PrototypeFilter>) -> Result<Self> {
        let num = filter.numerology();
        let period = num.fft_size();
        let plan = FftPlan::new(period)?;
        let c = filter.center();
        let center_ramp = (0..num.subcarriers)
            .map(|m| Complex64::from_polar(1.0, -2.0 * PI * m as f64 * c / period as f64))
            .collect();
        Ok(Self { filter, plan, center_ramp })
    }

    pub fn filter(&self) -> &PrototypeFilter {
        &self.filter
    }

    fn check_phase(&self, theta: &PhasePattern, slots: usize) -> Result<()> {
        let m = self.filter.numerology().subcarriers;
        if theta.subcarriers() != m || theta.slots() < slots {
            return Err(mismatch(format!(
                "phase pattern is {}x{}, need at least {m}x{slots}",
                theta.subcarriers(),
                theta.slots()
            )));
        }
        Ok(())
    }

    pub fn synthesize(&self, x: &RealGrid, theta: &PhasePattern) -> Result<ComplexSignal> {
        let num = self.filter.numerology();
        let (m_count, slots) = (num.subcarriers, x.slots());
        if x.subcarriers() != m_count {
            return Err(mismatch(format!(
                "grid has {} subcarriers, filter bank has {m_count}",
                x.subcarriers()
            )));
        }
        if slots == 0 {
            return Err(Error::EmptyInput("symbol grid"));
        }
        if !x.is_finite() {
            return Err(Error::NonFinite("symbol grid"));
        }
        self.check_phase(theta, slots)?;
        let (a, period) = (num.hop(), num.fft_size());
        let taps = self.filter.taps();
        let mut out = vec![Complex64::new(0.0, 0.0); burst_len(&self.filter, slots)];
        let mut buf = vec![Complex64::new(0.0, 0.0); period];
        for n in 0..slots {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            for (m, &v) in x.column(n).iter().enumerate() {
                buf[m] = theta.value(m, n) * self.center_ramp[m] * v;
            }
            self.plan.process(&mut buf, Direction::Inverse);
            let start = n * a;
            for (i, &p) in taps.iter().enumerate() {
                out[start + i] += buf[(start + i) % period] * p;
            }
        }
        Ok(ComplexSignal::new(out, num.sample_rate()))
    }

    pub fn analyze(&self, r: &ComplexSignal, theta: &PhasePattern, slots: usize) -> Result<ComplexGrid> {
        let num = self.filter.numerology();
        if slots == 0 {
            return Err(Error::EmptyInput("slot count"));
        }
        let need = burst_len(&self.filter, slots);
        if r.len() < need {
            return Err(mismatch(format!("need {need} samples for {slots} slots, got {}", r.len())));
        }
        self.check_phase(theta, slots)?;
        let (a, period, m_count) = (num.hop(), num.fft_size(), num.subcarriers);
        let taps = self.filter.taps();
        let mut y = ComplexGrid::zeros(m_count, slots, GridRole::Received);
        let mut buf = vec![Complex64::new(0.0, 0.0); period];
        for n in 0..slots {
            buf.iter_mut().for_each(|z| *z = Complex64::new(0.0, 0.0));
            let start = n * a;
            for (i, &p) in taps.iter().enumerate() {
                buf[(start + i) % period] += r.samples[start + i] * p;
            }
            self.plan.process(&mut buf, Direction::Forward);
            let col = y.column_mut(n);
            for m in 0..m_count {
                col[m] = (theta.value(m, n) * self.center_ramp[m]).conj() * buf[m];
            }
        }
        Ok(y)
    }
}

/// Transmit `s = sum_{m,n} x[m,n] theta[m,n] p[k - n a] exp(j 2 pi m (k - c) / (M L))`.
pub fn synthesize(x: &RealGrid, theta: &PhasePattern, filter: &PrototypeFilter) -> Result<ComplexSignal> {
    FilterBank::new(Arc::new(filter.clone()))?.synthesize(x, theta)
}

/// Matched-filter outputs `y[m,n] = <r, g[m,n]>` for the first `slots` slots.
pub fn analyze(
    r: &ComplexSignal,
    theta: &PhasePattern,
    filter: &PrototypeFilter,
    slots: usize,
) -> Result<ComplexGrid> {
    FilterBank::new(Arc::new(filter.clone()))?.analyze(r, theta, slots)
}

/// How complex symbols are split into real OQAM symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Staggering {
    /// Scheme 1: real and imaginary parts on consecutive slots of the same
    /// subcarrier. Data grid is `M x N/2`.
    Time,
    /// Scheme 2: real and imaginary parts on adjacent subcarriers of the same
    /// slot. Data grid is `M/2 x N`.
    Frequency,
}

impl Staggering {
    /// Shape of the complex grid feeding a real grid of `subcarriers x slots`.
    pub fn data_shape(&self, subcarriers: usize, slots: usize) -> Result<(usize, usize)> {
        match self {
            Staggering::Time if slots.is_multiple_of(2) => Ok((subcarriers, slots / 2)),
            Staggering::Frequency if subcarriers.is_multiple_of(2) => Ok((subcarriers / 2, slots)),
            Staggering::Time => Err(invalid(format!("time staggering needs an even slot count, got {slots}"))),
            Staggering::Frequency => Err(invalid(format!(
                "frequency staggering needs an even subcarrier count, got {subcarriers}"
            ))),
        }
    }
}

/// Splits complex symbols into the real OQAM grid.
pub fn stagger(d: &ComplexGrid, scheme: Staggering) -> RealGrid {
    match scheme {
        Staggering::Time => RealGrid::from_fn(d.rows(), 2 * d.columns(), |m, n| {
            let v = d.get(m, n / 2);
            if n % 2 == 0 { v.re } else { v.im }
        }),
        Staggering::Frequency => RealGrid::from_fn(2 * d.rows(), d.columns(), |m, n| {
            let v = d.get(m / 2, n);
            if m % 2 == 0 { v.re } else { v.im }
        }),
    }
}

/// Inverse of [`stagger`].
pub fn destagger(x: &RealGrid, scheme: Staggering) -> Result<ComplexGrid> {
    let (rows, cols) = scheme.data_shape(x.subcarriers(), x.slots())?;
    Ok(match scheme {
        Staggering::Time => ComplexGrid::from_fn(rows, cols, GridRole::Data, |m, n| {
            Complex64::new(x.get(m, 2 * n), x.get(m, 2 * n + 1))
        }),
        Staggering::Frequency => ComplexGrid::from_fn(rows, cols, GridRole::Data, |m, n| {
            Complex64::new(x.get(2 * m, n), x.get(2 * m + 1, n))
        }),
    })
}

/// Scheme-1 staggering: `x[m,2n] = Re d[m,n]`, `x[m,2n+1] = Im d[m,n]`.
pub fn oqam_stagger_scheme1(d: &ComplexGrid) -> RealGrid {
    stagger(d, Staggering::Time)
}

/// Scheme-2 staggering: `x[2m,n] = Re d[m,n]`, `x[2m+1,n] = Im d[m,n]`.
pub fn oqam_stagger_scheme2(d: &ComplexGrid) -> RealGrid {
    stagger(d, Staggering::Frequency)
}
