use core::f64::consts::PI;
use num_complex::Complex64;
use wavelab_core::filters::{base_pulse, make_filter, FilterKind};
use wavelab_core::grid::Numerology;

fn kinds() -> Vec<FilterKind> {
    vec![
        FilterKind::Rectangular,
        FilterKind::Hermite,
        FilterKind::Phydyas,
        FilterKind::Iota,
        FilterKind::RootRaisedCosine { roll_off: 1.0 },
        FilterKind::RootRaisedCosine { roll_off: 0.35 },
        FilterKind::ExtendedGaussian { alpha: 6.0 },
        FilterKind::ExtendedGaussian { alpha: 2.0 },
    ]
}

fn symmetry_error(taps: &[f64]) -> f64 {
    let n = taps.len();
    (0..n).map(|i| (taps[i] - taps[n - 1 - i]).abs()).fold(0.0, f64::max)
}

#[test]
fn symmetry_and_unit_energy_hold_across_the_matrix() {
    for m in [8usize, 16, 64] {
        for l in [1usize, 2, 4] {
            for k in [2usize, 3, 4] {
                let num = Numerology::new(m, 15e3, l).unwrap();
                for kind in kinds() {
                    let f = make_filter(kind, num, k).unwrap();
                    let energy: f64 = f.taps().iter().map(|v| v * v).sum();
                    assert!(symmetry_error(f.taps()) < 1e-9, "{kind:?} M={m} L={l} K={k}");
                    assert!((energy - 1.0).abs() < 1e-9, "{kind:?} M={m} L={l} K={k}");
                    let want = if kind == FilterKind::Rectangular { m * l / 2 } else { k * m * l };
                    assert_eq!(f.len(), want);
                }
            }
        }
    }
}

#[test]
fn rectangle_spans_one_slot() {
    let f = make_filter(FilterKind::Rectangular, Numerology::new(4, 15e3, 1).unwrap(), 4).unwrap();
    assert_eq!(f.taps(), &[1.0 / 2f64.sqrt(); 2]);
    assert_eq!(f.overlap(), 1);
    let f = make_filter(FilterKind::Rectangular, Numerology::new(8, 15e3, 1).unwrap(), 4).unwrap();
    assert_eq!(f.taps(), &[0.5; 4]);
}

#[test]
fn phydyas_peaks_at_the_center() {
    let num = Numerology::new(64, 15e3, 1).unwrap();
    let f = make_filter(FilterKind::Phydyas, num, 4).unwrap();
    let taps = f.taps();
    let c = taps.len() / 2;
    let peak = taps.iter().cloned().fold(f64::MIN, f64::max);
    assert_eq!(taps[c], peak);
    assert_eq!(taps[c - 1], peak);
    // The frequency-sampling formula vanishes at both ends of the support.
    assert!(taps[0].abs() < 1e-2 * peak);
}

#[test]
fn phydyas_base_pulse_matches_frequency_sampling_formula() {
    let num = Numerology::new(16, 15e3, 1).unwrap();
    let taps = base_pulse(FilterKind::Phydyas, num, 4).unwrap();
    let h = [1.0, 0.97195983, 1.0 / 2f64.sqrt(), 0.23514695];
    let n = taps.len();
    let raw: Vec<f64> = (0..n)
        .map(|k| {
            let t = (k as f64 - (n as f64 - 1.0) / 2.0) / 16.0;
            h[0] + 2.0 * (1..4).map(|i| h[i] * (2.0 * PI * i as f64 * t / 4.0).cos()).sum::<f64>()
        })
        .collect();
    let e = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    for (a, b) in taps.iter().zip(&raw) {
        assert!((a - b / e).abs() < 1e-12);
    }
}

#[test]
fn invalid_parameters_are_rejected() {
    let num = Numerology::new(16, 15e3, 1).unwrap();
    assert!(make_filter(FilterKind::RootRaisedCosine { roll_off: 1.5 }, num, 4).is_err());
    assert!(make_filter(FilterKind::ExtendedGaussian { alpha: 0.0 }, num, 4).is_err());
    assert!(make_filter(FilterKind::Phydyas, num, 5).is_err());
    assert!(make_filter(FilterKind::Hermite, num, 0).is_err());
    assert!(Numerology::new(15, 15e3, 1).is_err());
    assert!(Numerology::new(16, 15e3, 0).is_err());
}

/// Largest `|Re <g[m,n], g[0,n0]>|` over lattice points other than the
/// reference, with the basis functions built directly from the taps.
fn orthogonality_residual(taps: &[f64], m_count: usize, l: usize) -> f64 {
    let period = m_count * l;
    let a = period / 2;
    let lp = taps.len();
    let c = (lp as f64 - 1.0) / 2.0;
    let span = lp / a;
    let n0 = span;
    let slots = 2 * span + 1;
    let len = (slots - 1) * a + lp;
    let basis = |m: usize, n: usize| -> Vec<Complex64> {
        let theta = Complex64::new(0.0, 1.0).powu(((m + n) % 4) as u32);
        let mut g = vec![Complex64::new(0.0, 0.0); len];
        for (i, p) in taps.iter().enumerate() {
            let k = n * a + i;
            g[k] = theta * p * Complex64::from_polar(1.0, 2.0 * PI * m as f64 * (k as f64 - c) / period as f64);
        }
        g
    };
    let reference = basis(0, n0);
    let mut worst = 0.0f64;
    for n in 0..slots {
        for m in 0..m_count {
            let g = basis(m, n);
            let ip: Complex64 = g.iter().zip(&reference).map(|(x, y)| x * y.conj()).sum();
            if (m, n) == (0, n0) {
                assert!((ip.re - 1.0).abs() < 1e-9);
            } else {
                worst = worst.max(ip.re.abs());
            }
        }
    }
    worst
}

#[test]
fn hermite_orthogonality_residual_is_below_minus_50_db() {
    let num = Numerology::new(64, 15e3, 1).unwrap();
    let raw = base_pulse(FilterKind::Hermite, num, 4).unwrap();
    let raw_db = 20.0 * orthogonality_residual(&raw, 64, 1).log10();
    assert!(raw_db < -50.0, "raw Hermite residual {raw_db:.1} dB");
    let shipped = make_filter(FilterKind::Hermite, num, 4).unwrap();
    let shipped_db = 20.0 * orthogonality_residual(shipped.taps(), 64, 1).log10();
    assert!(shipped_db < -200.0, "shipped Hermite residual {shipped_db:.1} dB");
}

#[test]
fn every_shipped_filter_is_real_orthogonal() {
    let num = Numerology::new(16, 15e3, 2).unwrap();
    for kind in kinds() {
        let f = make_filter(kind, num, 4).unwrap();
        let r = orthogonality_residual(f.taps(), 16, 2);
        assert!(r < 1e-10, "{kind:?}: {r:e}");
    }
}

/// Fraction of filter energy at or beyond `edge` subcarrier spacings.
fn energy_beyond(taps: &[f64], period: usize, edge: f64) -> f64 {
    let pad = 16 * taps.len();
    let mut v = vec![Complex64::new(0.0, 0.0); pad];
    for (z, t) in v.iter_mut().zip(taps) {
        *z = Complex64::new(*t, 0.0);
    }
    let spec = wavelab_core::spectral::dft(&v).unwrap();
    let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
    let outside: f64 = spec
        .iter()
        .enumerate()
        .filter(|(k, _)| {
            let f = *k as f64 / pad as f64 * period as f64;
            f.min(period as f64 - f) >= edge
        })
        .map(|(_, z)| z.norm_sqr())
        .sum();
    outside / total
}

#[test]
fn projection_keeps_classic_designs_close() {
    let num = Numerology::new(64, 15e3, 1).unwrap();
    for kind in [FilterKind::Hermite, FilterKind::Iota] {
        let raw = base_pulse(kind, num, 4).unwrap();
        let f = make_filter(kind, num, 4).unwrap();
        let peak = raw.iter().cloned().fold(0.0, f64::max);
        let change = raw.iter().zip(f.taps()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(change < 2e-2 * peak, "{kind:?}: {change:e}");
    }
}

#[test]
fn projected_filters_stay_spectrally_contained() {
    let num = Numerology::new(64, 15e3, 1).unwrap();
    for kind in [
        FilterKind::Hermite,
        FilterKind::Phydyas,
        FilterKind::Iota,
        FilterKind::RootRaisedCosine { roll_off: 1.0 },
    ] {
        let f = make_filter(kind, num, 4).unwrap();
        let db = 10.0 * energy_beyond(f.taps(), 64, 4.0).log10();
        assert!(db < -55.0, "{kind:?}: {db:.1} dB beyond 4F");
    }
    let egf = make_filter(FilterKind::ExtendedGaussian { alpha: 6.0 }, num, 4).unwrap();
    let herm = make_filter(FilterKind::Hermite, num, 4).unwrap();
    assert!(energy_beyond(egf.taps(), 64, 2.0) > 100.0 * energy_beyond(herm.taps(), 64, 2.0));
}
