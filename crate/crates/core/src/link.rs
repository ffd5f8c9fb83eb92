//! One transmitter, channel and receiver chain per waveform.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::ops::Range;
use rand::{Rng, RngCore};

use crate::channel::{
    add_noise, apply_tdl, effective_coefficients_fbmc, effective_coefficients_ofdm, mmse_equalize,
    mmse_equalize_complex, zf_equalize, ChannelProfile, ProfileName,
};
use crate::error::{invalid, Result};
use crate::fbmc::{self, default_phase, FilterBank, PhasePattern, Staggering};
use crate::filters::PrototypeFilter;
use crate::grid::{ComplexGrid, ComplexSignal, GridRole, Numerology, RealGrid};
use crate::metrics::count_bit_errors;
use crate::rng::{stream_rng, Stream};
use crate::spreading::{
    self, map_dft_spread_rx_at, map_dft_spread_tx_at, ofdm_demodulate, ofdm_tx, scfdma_tx,
    Constellation, MidpointScaling, OfdmParams,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Waveform {
    FbmcOqam,
    SimpleDftS1,
    SimpleDftS2,
    MapDft,
    ScFdma,
    Ofdm,
}

impl Waveform {
    pub const ALL: [Waveform; 6] = [
        Waveform::FbmcOqam,
        Waveform::SimpleDftS1,
        Waveform::SimpleDftS2,
        Waveform::MapDft,
        Waveform::ScFdma,
        Waveform::Ofdm,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Waveform::FbmcOqam => "fbmc_oqam",
            Waveform::SimpleDftS1 => "simple_dft_s1",
            Waveform::SimpleDftS2 => "simple_dft_s2",
            Waveform::MapDft => "map_dft",
            Waveform::ScFdma => "scfdma",
            Waveform::Ofdm => "ofdm",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|w| w.name() == name)
    }

    /// True for the waveforms built on the OQAM filter bank.
    pub fn uses_filter_bank(&self) -> bool {
        !matches!(self, Waveform::ScFdma | Waveform::Ofdm)
    }

    /// DFT-spread waveforms are equalized with the unbiased MMSE weights;
    /// the others with zero forcing.
    pub fn uses_mmse(&self) -> bool {
        matches!(self, Waveform::SimpleDftS1 | Waveform::SimpleDftS2 | Waveform::MapDft | Waveform::ScFdma)
    }
}

/// Static description of a link.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkSpec {
    pub waveform: Waveform,
    pub numerology: Numerology,
    pub constellation: Constellation,
    /// Half-symbol slots carrying data. OFDM-based waveforms send `slots / 2`
    /// symbols so every waveform carries the same number of bits.
    pub slots: usize,
    /// Zero slots added before and after the data in filter-bank bursts.
    pub guard_slots: usize,
    /// Cyclic prefix of the OFDM-based waveforms, in samples.
    pub cp_len: usize,
    pub mapping: MidpointScaling,
}

impl LinkSpec {
    pub fn validate(&self) -> Result<()> {
        let m = self.numerology.subcarriers;
        if self.slots == 0 || !self.slots.is_multiple_of(2) {
            return Err(invalid(format!("slot count must be even and positive, got {}", self.slots)));
        }
        if self.waveform == Waveform::MapDft && !m.is_multiple_of(4) {
            return Err(invalid(format!("map_dft requires M divisible by 4, got M = {m}")));
        }
        if self.cp_len > self.numerology.fft_size() {
            return Err(invalid("cyclic prefix longer than the OFDM symbol"));
        }
        Ok(())
    }

    pub fn bits_per_burst(&self) -> usize {
        self.numerology.subcarriers * self.slots / 2 * self.constellation.bits_per_symbol()
    }

    /// Shape of the complex data grid for this waveform.
    pub fn data_shape(&self) -> (usize, usize) {
        let m = self.numerology.subcarriers;
        match self.waveform {
            Waveform::SimpleDftS2 | Waveform::MapDft => (m / 2, self.slots),
            _ => (m, self.slots / 2),
        }
    }
}

/// A transmitted burst and where its data lives.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    pub bits: Vec<u8>,
    pub signal: ComplexSignal,
    /// Samples spanned by the data slots; the SNR reference.
    pub data_region: Range<usize>,
    /// Samples in which every overlapping slot carries data; the PAPR region.
    pub steady_region: Range<usize>,
}

/// Result of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialOutcome {
    pub bit_errors: u64,
    pub bits: u64,
    /// The cyclic prefix was shorter than the channel delay spread.
    pub cp_too_short: bool,
}

/// Prepared transmitter and receiver for one [`LinkSpec`].
#[derive(Debug, Clone)]
pub struct Link {
    spec: LinkSpec,
    bank: Option<FilterBank>,
    theta: PhasePattern,
    ofdm: OfdmParams,
}

impl Link {
    /// `filter` is required for filter-bank waveforms and ignored otherwise.
    pub fn new(spec: LinkSpec, filter: Option<Arc<PrototypeFilter>>) -> Result<Self> {
        spec.validate()?;
        let bank = if spec.waveform.uses_filter_bank() {
            let f = filter.ok_or_else(|| invalid(format!("{} needs a prototype filter", spec.waveform.name())))?;
            if f.numerology() != spec.numerology {
                return Err(invalid("filter numerology does not match the link"));
            }
            Some(FilterBank::new(f)?)
        } else {
            None
        };
        let total = spec.slots + 2 * spec.guard_slots;
        let theta = default_phase(spec.numerology.subcarriers, total);
        let ofdm = OfdmParams::new(spec.numerology, spec.cp_len)?;
        Ok(Self { spec, bank, theta, ofdm })
    }

    pub fn spec(&self) -> &LinkSpec {
        &self.spec
    }

    fn total_slots(&self) -> usize {
        self.spec.slots + 2 * self.spec.guard_slots
    }

    fn ofdm_symbols(&self) -> usize {
        self.spec.slots / 2
    }

    pub fn random_bits<R: RngCore + ?Sized>(&self, rng: &mut R) -> Vec<u8> {
        (0..self.spec.bits_per_burst()).map(|_| rng.random::<bool>() as u8).collect()
    }

    pub fn transmit<R: RngCore + ?Sized>(&self, rng: &mut R) -> Result<Burst> {
        let bits = self.random_bits(rng);
        self.transmit_bits(bits)
    }

    pub fn transmit_bits(&self, bits: Vec<u8>) -> Result<Burst> {
        let (rows, cols) = self.spec.data_shape();
        let symbols = self.spec.constellation.modulate(&bits)?;
        if symbols.len() != rows * cols {
            return Err(invalid(format!("{} bits do not fill one burst", bits.len())));
        }
        let d = ComplexGrid::from_values(rows, cols, GridRole::Data, symbols)?;
        let g = self.spec.guard_slots;
        let signal = match self.spec.waveform {
            Waveform::Ofdm => ofdm_tx(&d, &self.ofdm)?,
            Waveform::ScFdma => scfdma_tx(&d, &self.ofdm)?,
            w => {
                let x = match w {
                    Waveform::FbmcOqam => spreading::oqam_tx(&d)?,
                    Waveform::SimpleDftS1 => spreading::simple_dft_spread_tx(&d, Staggering::Time)?,
                    Waveform::SimpleDftS2 => spreading::simple_dft_spread_tx(&d, Staggering::Frequency)?,
                    _ => map_dft_spread_tx_at(&d, g, self.spec.mapping)?.real,
                };
                let mut full = RealGrid::zeros(x.subcarriers(), self.total_slots());
                for n in 0..x.slots() {
                    full.column_mut(n + g).copy_from_slice(x.column(n));
                }
                self.bank.as_ref().expect("filter bank").synthesize(&full, &self.theta)?
            }
        };
        let (data_region, steady_region) = self.regions(signal.len());
        Ok(Burst { bits, signal, data_region, steady_region })
    }

    fn regions(&self, len: usize) -> (Range<usize>, Range<usize>) {
        match &self.bank {
            None => (0..len, 0..len),
            Some(bank) => {
                let a = self.spec.numerology.hop();
                let g = self.spec.guard_slots;
                let n = self.spec.slots;
                let lp = bank.filter().len();
                // Slot k is centered on sample k a + (lp - 1) / 2.
                let first = (g * a + lp / 2).saturating_sub(a / 2);
                let data = first..(first + n * a).min(len);
                let steady = fbmc::steady_state_range(bank.filter(), n);
                let steady = steady.start + g * a..steady.end + g * a;
                (data, steady)
            }
        }
    }

    /// Recovers the bits from a received signal given the true channel.
    ///
    /// `noise_variance` is the complex noise variance per sample; with the
    /// unit-energy constellations it is also the MMSE regularization
    /// `P_w / P_s`.
    pub fn receive(
        &self,
        r: &ComplexSignal,
        realization: &crate::channel::ChannelRealization,
        noise_variance: f64,
    ) -> Result<Vec<u8>> {
        let m = self.spec.numerology.subcarriers;
        let p_w = if self.spec.waveform.uses_mmse() { noise_variance } else { 0.0 };
        let d_hat = match self.spec.waveform {
            Waveform::Ofdm | Waveform::ScFdma => {
                let symbols = self.ofdm_symbols();
                let y = ofdm_demodulate(r, &self.ofdm, symbols)?;
                let h = effective_coefficients_ofdm(realization, &self.ofdm, symbols)?;
                if self.spec.waveform == Waveform::Ofdm {
                    zf_equalize(&y, &h)?
                } else {
                    spreading::scfdma_despread(&mmse_equalize_complex(&y, &h, 1.0, p_w)?)?
                }
            }
            w => {
                let bank = self.bank.as_ref().expect("filter bank");
                let total = self.total_slots();
                let g = self.spec.guard_slots;
                let n = self.spec.slots;
                let y = bank.analyze(r, &self.theta, total)?;
                let h = effective_coefficients_fbmc(realization, bank.filter(), total)?;
                let pick = |grid: &ComplexGrid| {
                    ComplexGrid::from_values(m, n, grid.role(), grid.values()[g * m..(g + n) * m].to_vec())
                };
                let x_hat = mmse_equalize(&pick(&y)?, &pick(&h)?, 1.0, p_w)?;
                match w {
                    Waveform::FbmcOqam => spreading::oqam_rx(&x_hat)?,
                    Waveform::SimpleDftS1 => spreading::simple_dft_spread_rx(&x_hat, Staggering::Time)?,
                    Waveform::SimpleDftS2 => spreading::simple_dft_spread_rx(&x_hat, Staggering::Frequency)?,
                    _ => map_dft_spread_rx_at(&x_hat, g, self.spec.mapping)?,
                }
            }
        };
        Ok(self.spec.constellation.demodulate(d_hat.values()))
    }

    /// Transmits random bits through `profile` plus AWGN at `snr_db`
    /// (in-band SNR per data symbol) and counts bit errors.
    ///
    /// The data bits, channel seed and noise come from separate streams of
    /// `seed`, so different waveforms see identical random inputs.
    pub fn run_trial(&self, profile: &ChannelProfile, snr_db: f64, seed: u64) -> Result<TrialOutcome> {
        let burst = self.transmit(&mut stream_rng(seed, Stream::Data))?;
        let channel_seed = stream_rng(seed, Stream::Channel).next_u64();
        let (faded, realization) = apply_tdl(&burst.signal, &profile.clone().with_seed(channel_seed))?;
        let variance = if snr_db == f64::INFINITY {
            0.0
        } else {
            let power = burst.signal.mean_power(Some(burst.data_region.clone()));
            power * self.spec.numerology.oversampling as f64 / libm::pow(10.0, snr_db / 10.0)
        };
        let r = if variance > 0.0 {
            add_noise(&faded, variance, &mut stream_rng(seed, Stream::Noise))
        } else {
            faded
        };
        let bits = self.receive(&r, &realization, variance)?;
        let max_delay = realization.delays.last().copied().unwrap_or(0);
        Ok(TrialOutcome {
            bit_errors: count_bit_errors(&bits, &burst.bits),
            bits: burst.bits.len() as u64,
            cp_too_short: !self.spec.waveform.uses_filter_bank()
                && profile.name() != ProfileName::Awgn
                && max_delay > self.spec.cp_len,
        })
    }
}
