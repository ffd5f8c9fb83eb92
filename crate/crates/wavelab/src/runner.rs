//! Executes an [`ExperimentConfig`] and renders its CSV artifacts.
//!
//! Monte Carlo work is cut into fixed-size batches. Batches are computed in
//! parallel but consumed strictly in index order, and stopping rules are
//! checked after each consumed batch, so results never depend on the number
//! of workers. Trial seeds come from [`split_seed`] and depend on neither the
//! waveform nor the SNR, so every curve and every SNR point sees the same
//! data, channel and noise draws.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;
use rayon::ThreadPool;
use wavelab_core::filters::{make_filter, PrototypeFilter};
use wavelab_core::link::Link;
use wavelab_core::metrics::{ccdf, papr_at_probability, papr_db, BerPoint, CcdfCurve, PsdEstimate, StopRule, WelchAccumulator};
use wavelab_core::rng::{split_seed, stream_rng, Stream};

use crate::config::{BerSettings, CurveSpec, Experiment, ExperimentConfig, FilterSpec, PaprSettings, PsdSettings};

/// Bursts per batch for PAPR and PSD runs.
const BURST_BATCH: usize = 16;

/// CCDF levels reported in the PAPR summary.
pub const SUMMARY_LEVELS: [f64; 3] = [1e-1, 1e-2, 1e-3];

/// Two-sided 95% normal quantile used for the CSV confidence columns.
pub const CI_Z: f64 = 1.96;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Core(#[from] wavelab_core::Error),
    #[error("cannot start worker pool: {0}")]
    Pool(String),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub enum CurveData {
    Ccdf {
        curve: CcdfCurve,
        /// Every per-window PAPR sample, in generation order.
        paprs_db: Vec<f64>,
        skipped_windows: usize,
    },
    Psd(PsdEstimate),
    Ber {
        points: Vec<BerPoint>,
        /// Some burst saw a channel longer than the cyclic prefix.
        cp_too_short: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveResult {
    pub spec: CurveSpec,
    pub data: CurveData,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub curves: Vec<CurveResult>,
}

/// A named file produced by a run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub file_name: String,
    pub bytes: Vec<u8>,
}

impl RunResult {
    pub fn curve(&self, name: &str) -> Option<&CurveResult> {
        self.curves.iter().find(|c| c.spec.name == name)
    }

    /// Per-curve CSV files followed by `summary.csv`.
    pub fn artifacts(&self, experiment: &Experiment) -> Result<Vec<Artifact>, RunError> {
        let prefix = experiment.file_prefix();
        let mut out = Vec::new();
        for c in &self.curves {
            let bytes = match &c.data {
                CurveData::Ccdf { curve, .. } => {
                    let rows = curve
                        .thresholds_db
                        .iter()
                        .zip(&curve.probabilities)
                        .zip(curve.confidence(CI_Z))
                        .map(|((x, y), (lo, hi))| vec![*x, *y, lo, hi]);
                    csv_bytes(&["papr_db", "ccdf", "ci_low", "ci_high"], rows)?
                }
                CurveData::Psd(p) => {
                    let rows = p.frequencies.iter().zip(&p.power_db).map(|(f, v)| vec![*f, *v]);
                    csv_bytes(&["freq_norm", "psd_db"], rows)?
                }
                CurveData::Ber { points, .. } => {
                    let rows = points.iter().map(|p| {
                        let (lo, hi) = p.confidence(CI_Z);
                        vec![p.snr_db, p.ber(), lo, hi]
                    });
                    csv_bytes(&["snr_db", "ber", "ci_low", "ci_high"], rows)?
                }
            };
            out.push(Artifact { file_name: format!("{prefix}_{}.csv", c.spec.name), bytes });
        }
        out.push(Artifact { file_name: "summary.csv".into(), bytes: self.summary_csv()? });
        Ok(out)
    }

    fn summary_csv(&self) -> Result<Vec<u8>, RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match self.curves.first().map(|c| &c.data) {
            Some(CurveData::Ccdf { .. }) => {
                w.write_record(["curve", "windows", "skipped", "papr_db_at_1e-1", "papr_db_at_1e-2", "papr_db_at_1e-3"])?;
                for c in &self.curves {
                    if let CurveData::Ccdf { paprs_db, skipped_windows, .. } = &c.data {
                        let mut rec = vec![c.spec.name.clone(), paprs_db.len().to_string(), skipped_windows.to_string()];
                        for level in SUMMARY_LEVELS {
                            rec.push(papr_at_probability(paprs_db, level)?.to_string());
                        }
                        w.write_record(&rec)?;
                    }
                }
            }
            Some(CurveData::Psd(_)) => {
                w.write_record(["curve", "segments"])?;
                for c in &self.curves {
                    if let CurveData::Psd(p) = &c.data {
                        w.write_record([c.spec.name.clone(), p.segments.to_string()])?;
                    }
                }
            }
            Some(CurveData::Ber { .. }) => {
                w.write_record(["curve", "snr_db", "bit_errors", "bits", "ber", "cp_too_short"])?;
                for c in &self.curves {
                    if let CurveData::Ber { points, cp_too_short } = &c.data {
                        for p in points {
                            w.write_record([
                                c.spec.name.clone(),
                                p.snr_db.to_string(),
                                p.bit_errors.to_string(),
                                p.bits_total.to_string(),
                                p.ber().to_string(),
                                cp_too_short.to_string(),
                            ])?;
                        }
                    }
                }
            }
            None => w.write_record(["curve"])?,
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
    }
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<Vec<u8>, RunError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
}

/// Runs every curve of `config` on `workers` threads.
pub fn run(config: &ExperimentConfig, workers: usize) -> Result<RunResult, RunError> {
    let workers = workers.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| RunError::Pool(e.to_string()))?;
    let filters = build_filters(config, &pool)?;
    let mut curves = Vec::new();
    for spec in config.curves() {
        let filter = spec.filter.map(|f| filters[&key(&f)].clone());
        let link = Link::new(config.link_spec(&spec), filter)?;
        let data = match &config.experiment {
            Experiment::Papr(p) => papr_curve(config, p, &link, &pool, workers)?,
            Experiment::Psd(p) => psd_curve(config, p, &link, &pool, workers)?,
            Experiment::Ber(b) => ber_curve(config, b, &link, &pool, workers)?,
        };
        curves.push(CurveResult { spec, data });
    }
    Ok(RunResult { curves })
}

fn key(f: &FilterSpec) -> String {
    format!("{}:{}", f.slug(), f.overlap)
}

fn build_filters(
    config: &ExperimentConfig,
    pool: &ThreadPool,
) -> Result<BTreeMap<String, Arc<PrototypeFilter>>, RunError> {
    if !config.waveforms.iter().any(|w| w.uses_filter_bank()) {
        return Ok(BTreeMap::new());
    }
    let built: Vec<Result<(String, Arc<PrototypeFilter>), RunError>> = pool.install(|| {
        config
            .filters
            .par_iter()
            .map(|f| Ok((key(f), Arc::new(make_filter(f.kind, config.numerology, f.overlap)?))))
            .collect()
    });
    built.into_iter().collect()
}

/// Computes batches `0, 1, 2, ...` in parallel rounds of `workers` and feeds
/// them to `consume` in order until it returns `true`.
fn ordered_batches<T, P, C>(pool: &ThreadPool, workers: usize, produce: P, mut consume: C) -> Result<(), RunError>
where
    T: Send,
    P: Fn(usize) -> Result<T, RunError> + Sync,
    C: FnMut(T) -> bool,
{
    let mut next = 0;
    loop {
        let round: Vec<Result<T, RunError>> =
            pool.install(|| (next..next + workers).into_par_iter().map(&produce).collect());
        for r in round {
            if consume(r?) {
                return Ok(());
            }
        }
        next += workers;
    }
}

fn papr_curve(
    config: &ExperimentConfig,
    settings: &PaprSettings,
    link: &Link,
    pool: &ThreadPool,
    workers: usize,
) -> Result<CurveData, RunError> {
    let window = config.numerology.fft_size();
    let mut paprs = Vec::with_capacity(settings.windows);
    let mut skipped = 0;
    ordered_batches(
        pool,
        workers,
        |b| {
            let mut values = Vec::new();
            let mut skipped = 0;
            for t in b * BURST_BATCH..(b + 1) * BURST_BATCH {
                let mut rng = stream_rng(split_seed(config.seed, 0, t as u64), Stream::Data);
                let burst = link.transmit(&mut rng)?;
                let series = papr_db(&burst.signal.samples[burst.steady_region.clone()], window)?;
                values.extend(series.values_db);
                skipped += series.skipped;
            }
            Ok((values, skipped))
        },
        |(values, s)| {
            paprs.extend(values);
            skipped += s;
            paprs.len() >= settings.windows
        },
    )?;
    paprs.truncate(settings.windows);
    let curve = ccdf(&paprs, &settings.grid_db)?;
    Ok(CurveData::Ccdf { curve, paprs_db: paprs, skipped_windows: skipped })
}

fn psd_curve(
    config: &ExperimentConfig,
    settings: &PsdSettings,
    link: &Link,
    pool: &ThreadPool,
    workers: usize,
) -> Result<CurveData, RunError> {
    let batches = settings.bursts.div_ceil(BURST_BATCH);
    let mut total = WelchAccumulator::new(settings.segment, settings.overlap)?;
    let mut done = 0;
    ordered_batches(
        pool,
        workers,
        |b| {
            let mut acc = WelchAccumulator::new(settings.segment, settings.overlap)?;
            let end = ((b + 1) * BURST_BATCH).min(settings.bursts);
            for t in b * BURST_BATCH..end {
                let mut rng = stream_rng(split_seed(config.seed, 0, t as u64), Stream::Data);
                acc.add(&link.transmit(&mut rng)?.signal.samples);
            }
            Ok(acc)
        },
        |acc| {
            // Settings match by construction.
            total.merge(&acc).expect("same Welch settings");
            done += 1;
            done >= batches
        },
    )?;
    Ok(CurveData::Psd(total.finish()?))
}

fn ber_curve(
    config: &ExperimentConfig,
    settings: &BerSettings,
    link: &Link,
    pool: &ThreadPool,
    workers: usize,
) -> Result<CurveData, RunError> {
    let rule = StopRule { min_bits: settings.min_bits, max_bits: settings.max_bits, target_errors: settings.target_errors };
    let profile = &config.channel.profile;
    let mut points = Vec::new();
    let mut cp_too_short = false;
    for &snr in &settings.snr_db {
        let mut point = BerPoint::new(snr);
        ordered_batches(
            pool,
            workers,
            |b| {
                let mut batch = (0u64, 0u64, false);
                for t in b * settings.batch_bursts..(b + 1) * settings.batch_bursts {
                    let o = link.run_trial(profile, snr, split_seed(config.seed, 1, t as u64))?;
                    batch.0 += o.bit_errors;
                    batch.1 += o.bits;
                    batch.2 |= o.cp_too_short;
                }
                Ok(batch)
            },
            |(errors, bits, short)| {
                point.record(errors, bits);
                cp_too_short |= short;
                rule.is_done(&point)
            },
        )?;
        points.push(point);
    }
    Ok(CurveData::Ber { points, cp_too_short })
}
