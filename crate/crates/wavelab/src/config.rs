//! Experiment configuration files.
//!
//! A config is a TOML document. Parsing happens in two steps: serde turns the
//! text into raw structs (catching syntax errors, unknown keys and type
//! mismatches), then [`ExperimentConfig::from_raw`] checks the semantic rules.
//! Both steps report the line and column of the offending item.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use serde::Deserialize;
use toml::Spanned;
use wavelab_core::channel::{ChannelProfile, ProfileName};
use wavelab_core::filters::FilterKind;
use wavelab_core::grid::Numerology;
use wavelab_core::link::{LinkSpec, Waveform};
use wavelab_core::spreading::{Constellation, MidpointScaling};

/// A config problem with its position in the source, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ConfigError {
    fn at(source: &str, span: Option<Range<usize>>, message: impl Into<String>) -> Self {
        let (line, column) = match span {
            Some(s) => {
                let (l, c) = line_col(source, s.start);
                (Some(l), Some(c))
            }
            None => (None, None),
        };
        Self { line, column, message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {l}, column {c}: {}", self.message),
            _ => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

/// 1-based line and column of byte `offset`.
fn line_col(source: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(source.len());
    let before = &source[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |p| offset - p - 1) + 1;
    (line, column)
}

// ------------------------------------------------------------------ raw form

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    name: Spanned<String>,
    experiment: Spanned<String>,
    seed: u64,
    waveforms: Spanned<Vec<Spanned<String>>>,
    constellations: Option<Spanned<Vec<Spanned<u64>>>>,
    mapping: Option<Spanned<String>>,
    output_dir: Option<String>,
    lattice: Spanned<RawLattice>,
    burst: Spanned<RawBurst>,
    #[serde(default)]
    filter: Vec<Spanned<RawFilter>>,
    channel: Option<Spanned<RawChannel>>,
    papr: Option<Spanned<RawPapr>>,
    psd: Option<Spanned<RawPsd>>,
    ber: Option<Spanned<RawBer>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLattice {
    subcarriers: Spanned<u64>,
    spacing_hz: Spanned<f64>,
    oversampling: Spanned<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBurst {
    slots: Spanned<u64>,
    #[serde(default)]
    guard_slots: u64,
    cp_len: Option<Spanned<u64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFilter {
    kind: Spanned<String>,
    overlap: Spanned<u64>,
    roll_off: Option<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    profile: Spanned<String>,
    doppler_hz: Option<Spanned<f64>>,
    delays_ns: Option<Vec<f64>>,
    powers_db: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPapr {
    windows: Spanned<u64>,
    #[serde(default = "default_ccdf_min")]
    ccdf_min_db: f64,
    #[serde(default = "default_ccdf_max")]
    ccdf_max_db: f64,
    #[serde(default = "default_ccdf_step")]
    ccdf_step_db: Spanned<f64>,
}

fn default_ccdf_min() -> f64 {
    0.0
}

fn default_ccdf_max() -> f64 {
    14.0
}

fn default_ccdf_step() -> Spanned<f64> {
    Spanned::new(0..0, 0.05)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPsd {
    bursts: Spanned<u64>,
    segment: Spanned<u64>,
    #[serde(default = "default_overlap")]
    overlap: Spanned<f64>,
}

fn default_overlap() -> Spanned<f64> {
    Spanned::new(0..0, 0.5)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBer {
    snr_db: Spanned<Vec<f64>>,
    #[serde(default = "default_min_bits")]
    min_bits: Spanned<u64>,
    max_bits: Spanned<u64>,
    target_errors: Spanned<u64>,
    #[serde(default = "default_batch")]
    batch_bursts: Spanned<u64>,
}

fn default_min_bits() -> Spanned<u64> {
    Spanned::new(0..0, 0)
}

fn default_batch() -> Spanned<u64> {
    Spanned::new(0..0, 16)
}

// ------------------------------------------------------------------ validated form

/// Prototype filter selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub overlap: usize,
}

impl FilterSpec {
    /// Short label used in curve names, e.g. `hermite` or `egf6`.
    pub fn slug(&self) -> String {
        match self.kind {
            FilterKind::ExtendedGaussian { alpha } => format!("egf{}", number_slug(alpha)),
            FilterKind::RootRaisedCosine { roll_off } if roll_off != 1.0 => {
                format!("rrc{}", number_slug(roll_off))
            }
            k => k.name().to_string(),
        }
    }
}

fn number_slug(v: f64) -> String {
    format!("{v}").replace('.', "p")
}

/// Channel selection; the profile seed is set per trial.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSpec {
    pub profile: ChannelProfile,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PaprSettings {
    /// Number of PAPR windows per curve.
    pub windows: usize,
    /// CCDF threshold grid in dB.
    pub grid_db: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdSettings {
    pub bursts: usize,
    pub segment: usize,
    pub overlap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BerSettings {
    pub snr_db: Vec<f64>,
    pub min_bits: u64,
    pub max_bits: u64,
    pub target_errors: u64,
    /// Bursts per scheduling unit. Results depend on this value but not on
    /// the number of workers.
    pub batch_bursts: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Experiment {
    Papr(PaprSettings),
    Psd(PsdSettings),
    Ber(BerSettings),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::Papr(_) => "papr",
            Experiment::Psd(_) => "psd",
            Experiment::Ber(_) => "ber",
        }
    }

    /// Prefix of the per-curve CSV files.
    pub fn file_prefix(&self) -> &'static str {
        match self {
            Experiment::Papr(_) => "ccdf",
            Experiment::Psd(_) => "psd",
            Experiment::Ber(_) => "ber",
        }
    }
}

/// One curve: a waveform with its filter and constellation.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec {
    pub name: String,
    pub waveform: Waveform,
    pub filter: Option<FilterSpec>,
    pub constellation: Constellation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    pub numerology: Numerology,
    pub waveforms: Vec<Waveform>,
    pub filters: Vec<FilterSpec>,
    pub constellations: Vec<Constellation>,
    pub mapping: MidpointScaling,
    pub slots: usize,
    pub guard_slots: usize,
    pub cp_len: usize,
    pub channel: ChannelSpec,
    pub experiment: Experiment,
    pub output_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(source: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = toml::from_str(source)
            .map_err(|e| ConfigError::at(source, e.span(), e.message().trim().to_string()))?;
        Self::from_raw(raw, source)
    }

    /// Curves in a fixed order: waveforms as listed, then filters, then
    /// constellations. Waveforms without a filter bank appear once per
    /// constellation.
    pub fn curves(&self) -> Vec<CurveSpec> {
        let multi_filter = self.filters.len() > 1;
        let multi_con = self.constellations.len() > 1;
        let mut out = Vec::new();
        for &w in &self.waveforms {
            let filters: Vec<Option<FilterSpec>> = if w.uses_filter_bank() {
                self.filters.iter().copied().map(Some).collect()
            } else {
                vec![None]
            };
            for f in filters {
                for &con in &self.constellations {
                    let mut name = w.name().to_string();
                    if let (Some(f), true) = (f, multi_filter) {
                        name.push('_');
                        name.push_str(&f.slug());
                    }
                    if multi_con {
                        name.push_str(&format!("_qam{}", con.order()));
                    }
                    out.push(CurveSpec { name, waveform: w, filter: f, constellation: con });
                }
            }
        }
        out
    }

    pub fn link_spec(&self, curve: &CurveSpec) -> LinkSpec {
        LinkSpec {
            waveform: curve.waveform,
            numerology: self.numerology,
            constellation: curve.constellation,
            slots: self.slots,
            guard_slots: self.guard_slots,
            cp_len: self.cp_len,
            mapping: self.mapping,
        }
    }

    /// Shortest burst over the configured waveforms, in samples.
    fn shortest_burst(&self) -> usize {
        let num = self.numerology;
        let ofdm = self.slots / 2 * (num.fft_size() + self.cp_len);
        let min_overlap = self.filters.iter().map(|f| f.overlap).min();
        self.waveforms
            .iter()
            .map(|w| match (w.uses_filter_bank(), min_overlap) {
                (true, Some(k)) => {
                    let len = if k == 0 { 0 } else { k * num.fft_size() };
                    (self.slots + 2 * self.guard_slots - 1) * num.hop() + len
                }
                _ => ofdm,
            })
            .min()
            .unwrap_or(ofdm)
    }

    fn from_raw(raw: RawConfig, src: &str) -> Result<Self, ConfigError> {
        let err = |span: Range<usize>, msg: String| {
            let span = if span.is_empty() && span.start == 0 { None } else { Some(span) };
            ConfigError::at(src, span, msg)
        };

        let name = raw.name.get_ref().trim().to_string();
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(err(raw.name.span(), "name must be non-empty and use only letters, digits, '_' or '-'".into()));
        }

        // Lattice.
        let lat = raw.lattice.get_ref();
        let m = *lat.subcarriers.get_ref() as usize;
        if m < 2 || !m.is_multiple_of(2) {
            return Err(err(lat.subcarriers.span(), format!("subcarriers must be even and at least 2, got {m}")));
        }
        let spacing = *lat.spacing_hz.get_ref();
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(err(lat.spacing_hz.span(), format!("spacing_hz must be positive, got {spacing}")));
        }
        let l_os = *lat.oversampling.get_ref() as usize;
        if l_os == 0 {
            return Err(err(lat.oversampling.span(), "oversampling must be at least 1".into()));
        }
        let numerology = Numerology::new(m, spacing, l_os).map_err(|e| err(raw.lattice.span(), e.to_string()))?;

        // Waveforms.
        let mut waveforms = Vec::new();
        for w in raw.waveforms.get_ref() {
            let wf = Waveform::from_name(w.get_ref()).ok_or_else(|| {
                let names: Vec<_> = Waveform::ALL.iter().map(|w| w.name()).collect();
                err(w.span(), format!("unknown waveform '{}'; expected one of {}", w.get_ref(), names.join(", ")))
            })?;
            if waveforms.contains(&wf) {
                return Err(err(w.span(), format!("waveform '{}' is listed twice", wf.name())));
            }
            if wf == Waveform::MapDft && !m.is_multiple_of(4) {
                return Err(err(
                    w.span(),
                    format!("waveform map_dft requires the subcarrier count M to be divisible by 4, got M = {m}"),
                ));
            }
            waveforms.push(wf);
        }
        if waveforms.is_empty() {
            return Err(err(raw.waveforms.span(), "at least one waveform is required".into()));
        }

        // Constellations.
        let constellations = match &raw.constellations {
            None => vec![Constellation::Qam4],
            Some(list) => {
                let mut out = Vec::new();
                for o in list.get_ref() {
                    let c = Constellation::from_order(*o.get_ref() as usize)
                        .map_err(|_| err(o.span(), format!("unsupported QAM order {}; expected 4 or 64", o.get_ref())))?;
                    if out.contains(&c) {
                        return Err(err(o.span(), format!("QAM order {} is listed twice", o.get_ref())));
                    }
                    out.push(c);
                }
                if out.is_empty() {
                    return Err(err(list.span(), "at least one constellation is required".into()));
                }
                out
            }
        };

        let mapping = match &raw.mapping {
            None => MidpointScaling::default(),
            Some(s) => match s.get_ref().as_str() {
                "energy_balanced" => MidpointScaling::EnergyBalanced,
                "literal" => MidpointScaling::Literal,
                other => {
                    return Err(err(
                        s.span(),
                        format!("unknown mapping '{other}'; expected energy_balanced or literal"),
                    ))
                }
            },
        };

        // Burst.
        let burst = raw.burst.get_ref();
        let slots = *burst.slots.get_ref() as usize;
        if slots == 0 || !slots.is_multiple_of(2) {
            return Err(err(burst.slots.span(), format!("slots must be even and positive, got {slots}")));
        }
        let guard_slots = burst.guard_slots as usize;
        let cp_len = match &burst.cp_len {
            None => numerology.fft_size() / 8,
            Some(c) => {
                let v = *c.get_ref() as usize;
                if v > numerology.fft_size() {
                    return Err(err(
                        c.span(),
                        format!("cp_len {v} exceeds the OFDM symbol length {}", numerology.fft_size()),
                    ));
                }
                v
            }
        };

        // Filters.
        let mut filters = Vec::new();
        for f in &raw.filter {
            filters.push(parse_filter(f.get_ref()).map_err(|msg| err(f.span(), msg))?);
        }
        if waveforms.iter().any(Waveform::uses_filter_bank) && filters.is_empty() {
            return Err(err(
                raw.waveforms.span(),
                "filter-bank waveforms need at least one [[filter]] table".into(),
            ));
        }

        // Channel.
        let channel = match &raw.channel {
            None => ChannelSpec { profile: ChannelProfile::awgn() },
            Some(c) => parse_channel(c.get_ref()).map_err(|msg| err(c.span(), msg))?,
        };

        // Experiment section.
        let kind = raw.experiment.get_ref().as_str();
        let sections = [("papr", raw.papr.is_some()), ("psd", raw.psd.is_some()), ("ber", raw.ber.is_some())];
        if !sections.iter().any(|(n, _)| *n == kind) {
            return Err(err(
                raw.experiment.span(),
                format!("unknown experiment '{kind}'; expected papr, psd or ber"),
            ));
        }
        if let (Some(c), true) = (&raw.channel, kind != "ber") {
            return Err(err(c.span(), format!("section [channel] does not apply to experiment '{kind}'")));
        }
        for (section, present) in sections {
            if present && section != kind {
                return Err(err(
                    raw.experiment.span(),
                    format!("section [{section}] does not apply to experiment '{kind}'"),
                ));
            }
        }
        let experiment = match kind {
            "papr" => {
                let p = raw.papr.as_ref().ok_or_else(|| err(raw.experiment.span(), "missing [papr] section".into()))?;
                let r = p.get_ref();
                let windows = *r.windows.get_ref() as usize;
                if windows == 0 {
                    return Err(err(r.windows.span(), "windows must be positive".into()));
                }
                let step = *r.ccdf_step_db.get_ref();
                if !(step > 0.0 && r.ccdf_max_db > r.ccdf_min_db && r.ccdf_min_db.is_finite() && r.ccdf_max_db.is_finite())
                {
                    return Err(err(p.span(), "CCDF grid needs ccdf_min_db < ccdf_max_db and ccdf_step_db > 0".into()));
                }
                let count = ((r.ccdf_max_db - r.ccdf_min_db) / step).round() as usize + 1;
                // Rounded so thresholds print as written rather than with float residue.
                let grid_db = (0..count).map(|k| ((r.ccdf_min_db + k as f64 * step) * 1e9).round() / 1e9).collect();
                Experiment::Papr(PaprSettings { windows, grid_db })
            }
            "psd" => {
                let p = raw.psd.as_ref().ok_or_else(|| err(raw.experiment.span(), "missing [psd] section".into()))?;
                let r = p.get_ref();
                let bursts = *r.bursts.get_ref() as usize;
                if bursts == 0 {
                    return Err(err(r.bursts.span(), "bursts must be positive".into()));
                }
                let segment = *r.segment.get_ref() as usize;
                if segment < 2 {
                    return Err(err(r.segment.span(), "segment must be at least 2 samples".into()));
                }
                let overlap = *r.overlap.get_ref();
                if !(0.0..1.0).contains(&overlap) {
                    return Err(err(r.overlap.span(), format!("overlap must lie in [0, 1), got {overlap}")));
                }
                Experiment::Psd(PsdSettings { bursts, segment, overlap })
            }
            _ => {
                let b = raw.ber.as_ref().ok_or_else(|| err(raw.experiment.span(), "missing [ber] section".into()))?;
                let r = b.get_ref();
                let snr_db = r.snr_db.get_ref().clone();
                if snr_db.is_empty() || snr_db.iter().any(|s| s.is_nan()) {
                    return Err(err(r.snr_db.span(), "snr_db must be a non-empty list of numbers".into()));
                }
                for (v, key) in [(&r.max_bits, "max_bits"), (&r.target_errors, "target_errors"), (&r.batch_bursts, "batch_bursts")] {
                    if *v.get_ref() == 0 {
                        return Err(err(v.span(), format!("{key} must be positive")));
                    }
                }
                if r.min_bits.get_ref() > r.max_bits.get_ref() {
                    return Err(err(
                        r.min_bits.span(),
                        format!("min_bits {} exceeds max_bits {}", r.min_bits.get_ref(), r.max_bits.get_ref()),
                    ));
                }
                Experiment::Ber(BerSettings {
                    snr_db,
                    min_bits: *r.min_bits.get_ref(),
                    max_bits: *r.max_bits.get_ref(),
                    target_errors: *r.target_errors.get_ref(),
                    batch_bursts: *r.batch_bursts.get_ref() as usize,
                })
            }
        };

        let config = Self {
            name,
            seed: raw.seed,
            numerology,
            waveforms,
            filters,
            constellations,
            mapping,
            slots,
            guard_slots,
            cp_len,
            channel,
            experiment,
            output_dir: raw.output_dir.map(PathBuf::from),
        };

        if let Experiment::Psd(p) = &config.experiment {
            let shortest = config.shortest_burst();
            if p.segment > shortest {
                let span = raw.psd.as_ref().map(|s| s.get_ref().segment.span());
                return Err(ConfigError::at(
                    src,
                    span,
                    format!("segment {} is longer than the shortest burst ({shortest} samples)", p.segment),
                ));
            }
        }
        Ok(config)
    }
}

fn parse_filter(f: &RawFilter) -> Result<FilterSpec, String> {
    FilterSpec::new(f.kind.get_ref(), *f.overlap.get_ref() as usize, f.roll_off, f.alpha)
}

impl FilterSpec {
    /// Validates a filter given by its config name and parameters.
    pub fn new(kind: &str, overlap: usize, roll_off: Option<f64>, alpha: Option<f64>) -> Result<Self, String> {
        filter_from_parts(kind, overlap, roll_off, alpha)
    }
}

fn filter_from_parts(kind: &str, overlap: usize, roll_off: Option<f64>, alpha: Option<f64>) -> Result<FilterSpec, String> {
    if overlap == 0 {
        return Err("filter overlap must be at least 1".into());
    }
    let kind = match kind {
        "rectangular" => FilterKind::Rectangular,
        "hermite" => FilterKind::Hermite,
        "iota" => FilterKind::Iota,
        "phydyas" => {
            if !(2..=4).contains(&overlap) {
                return Err(format!("phydyas supports overlap 2, 3 or 4, got {overlap}"));
            }
            FilterKind::Phydyas
        }
        "rrc" => {
            let roll_off = roll_off.unwrap_or(1.0);
            if !(0.0..=1.0).contains(&roll_off) {
                return Err(format!("rrc roll_off must lie in [0, 1], got {roll_off}"));
            }
            FilterKind::RootRaisedCosine { roll_off }
        }
        "egf" => {
            let alpha = alpha.ok_or("egf needs an alpha")?;
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(format!("egf alpha must be positive, got {alpha}"));
            }
            FilterKind::ExtendedGaussian { alpha }
        }
        other => {
            return Err(format!(
                "unknown filter kind '{other}'; expected rectangular, hermite, phydyas, iota, rrc or egf"
            ))
        }
    };
    if roll_off.is_some() && !matches!(kind, FilterKind::RootRaisedCosine { .. }) {
        return Err("roll_off only applies to rrc filters".into());
    }
    if alpha.is_some() && !matches!(kind, FilterKind::ExtendedGaussian { .. }) {
        return Err("alpha only applies to egf filters".into());
    }
    Ok(FilterSpec { kind, overlap })
}

fn parse_channel(c: &RawChannel) -> Result<ChannelSpec, String> {
    let doppler = c.doppler_hz.as_ref().map(|d| *d.get_ref());
    let need_doppler = || doppler.ok_or_else(|| format!("profile '{}' needs doppler_hz", c.profile.get_ref()));
    let name = c.profile.get_ref().as_str();
    if name != "custom" && (c.delays_ns.is_some() || c.powers_db.is_some()) {
        return Err("delays_ns and powers_db only apply to the custom profile".into());
    }
    let profile = match name {
        "awgn" => {
            if doppler.is_some_and(|d| d != 0.0) {
                return Err("the awgn profile has no Doppler".into());
            }
            ChannelProfile::awgn()
        }
        "pedestrian_a" => ChannelProfile::pedestrian_a(need_doppler()?).map_err(|e| e.to_string())?,
        "vehicular_a" => ChannelProfile::vehicular_a(need_doppler()?).map_err(|e| e.to_string())?,
        "custom" => {
            let delays = c.delays_ns.clone().ok_or("custom profile needs delays_ns")?;
            let powers = c.powers_db.clone().ok_or("custom profile needs powers_db")?;
            let delays_s = delays.iter().map(|d| d * 1e-9).collect();
            ChannelProfile::new(ProfileName::Custom, delays_s, powers, need_doppler()?, 0).map_err(|e| e.to_string())?
        }
        other => {
            return Err(format!(
                "unknown channel profile '{other}'; expected awgn, pedestrian_a, vehicular_a or custom"
            ))
        }
    };
    Ok(ChannelSpec { profile })
}
