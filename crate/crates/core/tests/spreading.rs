use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use wavelab_core::fbmc::{self, default_phase, Staggering};
use wavelab_core::filters::{make_filter, FilterKind, PrototypeFilter};
use wavelab_core::grid::{ComplexGrid, GridRole, Numerology, RealGrid};
use wavelab_core::spectral::{dirichlet_f1, dirichlet_f2, idft};
use wavelab_core::spreading::{
    self, conjugate_symmetric_map, demap, map_dft_spread_rx, map_dft_spread_tx, ofdm_demodulate, ofdm_tx,
    qam_demod, qam_mod, scfdma_despread, scfdma_tx, simple_dft_spread_rx, simple_dft_spread_tx, Constellation,
    MidpointScaling, OfdmParams,
};
use wavelab_core::Error;

const LIT: MidpointScaling = MidpointScaling::Literal;
const BAL: MidpointScaling = MidpointScaling::EnergyBalanced;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len).map(|_| c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect()
}

fn random_grid(rows: usize, cols: usize, seed: u64) -> ComplexGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexGrid::from_fn(rows, cols, GridRole::Data, |_, _| {
        c(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)
    })
}

fn qpsk_grid(rows: usize, cols: usize, seed: u64) -> ComplexGrid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<u8> = (0..2 * rows * cols).map(|_| rng.random::<bool>() as u8).collect();
    let syms = qam_mod(Constellation::Qam4, &bits).unwrap();
    ComplexGrid::from_values(rows, cols, GridRole::Data, syms).unwrap()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn rectangle(m: usize, l: usize) -> PrototypeFilter {
    make_filter(FilterKind::Rectangular, Numerology::new(m, 15e3, l).unwrap(), 4).unwrap()
}

// ---------------------------------------------------------------- QAM

#[test]
fn qpsk_golden_vectors() {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let got = qam_mod(Constellation::Qam4, &[0, 0, 0, 1, 1, 0, 1, 1]).unwrap();
    assert_eq!(got, vec![c(s, s), c(s, -s), c(-s, s), c(-s, -s)]);
}

#[test]
fn qam64_golden_vectors() {
    // Rows of the LTE 64-QAM Gray table, in units of 1/sqrt(42).
    let table: [(&str, f64, f64); 12] = [
        ("000000", 3.0, 3.0),
        ("000001", 3.0, 1.0),
        ("000010", 1.0, 3.0),
        ("000011", 1.0, 1.0),
        ("000100", 3.0, 5.0),
        ("000101", 3.0, 7.0),
        ("001000", 5.0, 3.0),
        ("001010", 7.0, 3.0),
        ("001111", 7.0, 7.0),
        ("010000", 3.0, -3.0),
        ("100000", -3.0, 3.0),
        ("111111", -7.0, -7.0),
    ];
    let scale = 1.0 / 42f64.sqrt();
    for (bits, re, im) in table {
        let b: Vec<u8> = bits.bytes().map(|ch| ch - b'0').collect();
        let got = qam_mod(Constellation::Qam64, &b).unwrap()[0];
        assert!((got - c(re * scale, im * scale)).norm() < 1e-15, "{bits}");
    }
}

#[test]
fn constellations_have_unit_energy_and_round_trip() {
    for (con, order, bps) in [(Constellation::Qam4, 4, 2), (Constellation::Qam64, 64, 6)] {
        assert_eq!(Constellation::from_order(order).unwrap(), con);
        assert_eq!(con.bits_per_symbol(), bps);
        let pts = con.points();
        assert_eq!(pts.len(), order);
        let energy: f64 = pts.iter().map(|p| p.norm_sqr()).sum::<f64>() / order as f64;
        assert!((energy - 1.0).abs() < 1e-12);

        let bits: Vec<u8> = (0..order).flat_map(|i| (0..bps).map(move |k| ((i >> (bps - 1 - k)) & 1) as u8)).collect();
        let syms = qam_mod(con, &bits).unwrap();
        assert_eq!(qam_demod(con, &syms), bits);
        // Every bit pattern lands on a distinct point.
        for i in 0..order {
            for j in 0..i {
                assert!((syms[i] - syms[j]).norm() > 0.1);
            }
        }
    }
}

#[test]
fn gray_neighbours_differ_in_one_bit() {
    let con = Constellation::Qam64;
    let bits: Vec<u8> = (0..64).flat_map(|i: usize| (0..6).map(move |k| ((i >> (5 - k)) & 1) as u8)).collect();
    let syms = qam_mod(con, &bits).unwrap();
    let step = 2.0 / 42f64.sqrt();
    for i in 0..64 {
        for j in 0..64 {
            if ((syms[i] - syms[j]).norm() - step).abs() < 1e-9 {
                assert_eq!((i ^ j).count_ones(), 1);
            }
        }
    }
}

#[test]
fn demodulation_is_minimum_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for con in [Constellation::Qam4, Constellation::Qam64] {
        let pts = con.points();
        let bps = con.bits_per_symbol();
        for _ in 0..2000 {
            let z = c(rng.random::<f64>() * 2.4 - 1.2, rng.random::<f64>() * 2.4 - 1.2);
            let nearest = pts
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - z).norm().partial_cmp(&(b.1 - z).norm()).unwrap())
                .unwrap()
                .0;
            let want = &qam_demod(con, &[pts[nearest]])[..];
            assert_eq!(&qam_demod(con, &[z])[..], want);
            assert_eq!(want.len(), bps);
        }
    }
}

#[test]
fn qam_rejects_bad_input() {
    assert!(matches!(qam_mod(Constellation::Qam4, &[0, 1, 0]), Err(Error::InvalidParameter(_))));
    assert!(matches!(qam_mod(Constellation::Qam64, &[0; 8]), Err(Error::InvalidParameter(_))));
    assert!(Constellation::from_order(16).is_err());
}

// ---------------------------------------------------------------- map / demap

fn m8_example() -> Vec<Complex64> {
    vec![c(1.0, 2.0), c(-0.5, 0.25), c(3.0, -4.0), c(0.75, -1.5)]
}

#[test]
fn map_m8_example() {
    let d = m8_example();
    let col = conjugate_symmetric_map(&d, 0, LIT).unwrap();
    let want = [d[0], d[1], c(d[2].re, 0.0), d[1].conj(), d[0].conj(), d[3], c(d[2].im, 0.0), d[3].conj()];
    assert_eq!(col.values, want);
    assert_eq!(col.lambda, 1);
    assert!(col.symmetry_error() < 1e-15);
}

#[test]
fn map_m8_real_data_is_real_and_even() {
    let d = vec![c(1.0, 0.0), c(-2.0, 0.0), c(0.5, 0.0), c(3.0, 0.0)];
    let v = conjugate_symmetric_map(&d, 0, LIT).unwrap().values;
    assert!(v.iter().all(|z| z.im == 0.0));
    for l in 0..8 {
        assert_eq!(v[(4 + 8 - l) % 8], v[l]);
    }
}

#[test]
fn map_m8_odd_slot_rotates_by_j() {
    let d = m8_example();
    let even = conjugate_symmetric_map(&d, 0, LIT).unwrap();
    let odd = conjugate_symmetric_map(&d, 1, LIT).unwrap();
    for (a, b) in even.values.iter().zip(&odd.values) {
        assert_eq!(*b, a * c(0.0, 1.0));
    }
    assert_eq!(odd.lambda, -1);
    assert!(odd.symmetry_error() < 1e-15);
}

#[test]
fn map_rejects_bad_lengths() {
    assert!(matches!(conjugate_symmetric_map(&[c(1.0, 0.0); 3], 0, LIT), Err(Error::InvalidParameter(_))));
    assert!(matches!(conjugate_symmetric_map(&[c(1.0, 0.0); 5], 0, LIT), Err(Error::InvalidParameter(_))));
    assert!(demap(&[c(1.0, 0.0); 7], 0, LIT).is_err());
    assert!(demap(&[c(1.0, 0.0); 6], 0, LIT).is_err());
}

#[test]
fn demap_m8_worked_example() {
    // Hand evaluation of the demap rule on an arbitrary column.
    let ch = [c(1.0, 1.0), c(2.0, 0.0), c(3.0, 5.0), c(0.0, -2.0), c(4.0, 2.0), c(1.0, -1.0), c(6.0, 7.0), c(2.0, 3.0)];
    let want = [
        (ch[0] + ch[4].conj()) / 2.0,
        (ch[1] + ch[3].conj()) / 2.0,
        c(ch[2].re, ch[6].re),
        (ch[5] + ch[7].conj()) / 2.0,
    ];
    assert_eq!(demap(&ch, 0, LIT).unwrap(), want);
    assert_eq!(want, [c(2.5, -0.5), c(1.0, 1.0), c(3.0, 6.0), c(1.5, -2.0)]);
    // The same column seen in slot 1 carries an extra factor j.
    let rotated: Vec<Complex64> = ch.iter().map(|z| z * c(0.0, 1.0)).collect();
    assert_eq!(demap(&rotated, 1, LIT).unwrap(), want);
    // Inverting the map example.
    let d = m8_example();
    assert_eq!(demap(&conjugate_symmetric_map(&d, 0, LIT).unwrap().values, 0, LIT).unwrap(), d);
}

#[test]
fn map_demap_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for m in [8usize, 16, 32, 64] {
        for trial in 0..1000 {
            let d = random_vec(m / 2, &mut rng);
            let slot = trial % 4;
            for scaling in [LIT, BAL] {
                let col = conjugate_symmetric_map(&d, slot, scaling).unwrap();
                assert!(col.symmetry_error() < 1e-14);
                let back = demap(&col.values, slot, scaling).unwrap();
                assert!(max_diff(&back, &d) < 1e-14);
            }
        }
    }
}

#[test]
fn demap_halves_noise_on_averaged_positions() {
    let m = 16;
    let q = m / 4;
    let draws = 100_000;
    let sigma2 = 0.5;
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let d = random_vec(m / 2, &mut rng);
    let clean = conjugate_symmetric_map(&d, 0, LIT).unwrap().values;
    let mut acc = vec![0.0; m / 2];
    let sd = (sigma2 / 2.0f64).sqrt();
    for _ in 0..draws {
        let noisy: Vec<Complex64> = clean
            .iter()
            .map(|z| {
                let n: f64 = StandardNormal.sample(&mut rng);
                let k: f64 = StandardNormal.sample(&mut rng);
                z + c(n * sd, k * sd)
            })
            .collect();
        let e = demap(&noisy, 0, LIT).unwrap();
        for (a, (x, y)) in acc.iter_mut().zip(e.iter().zip(&d)) {
            *a += (x - y).norm_sqr();
        }
    }
    for (l, a) in acc.iter().enumerate() {
        let var = a / draws as f64;
        // The recombined position takes one real noise component per axis and
        // keeps the full per-entry variance.
        let want = if l == q { sigma2 } else { sigma2 / 2.0 };
        assert!((var / want - 1.0).abs() < 0.02, "l = {l}: {var}");
    }
}

// ---------------------------------------------------------------- map-DFT spreading

#[test]
fn map_dft_output_is_real_after_phase_removal() {
    let d = qpsk_grid(32, 10, 1);
    let out = map_dft_spread_tx(&d, BAL).unwrap();
    let mut worst = 0.0f64;
    for n in 0..10 {
        for m in 0..64 {
            let j = c(0.0, 1.0).powu(((m + n) % 4) as u32);
            let v = out.phased.get(m, n) / j;
            worst = worst.max(v.im.abs());
            assert!((v.re - out.real.get(m, n)).abs() < 1e-12);
        }
    }
    assert!(worst < 1e-10, "{worst}");
}

#[test]
fn map_dft_zero_in_zero_out() {
    let out = map_dft_spread_tx(&ComplexGrid::zeros(8, 3, GridRole::Data), BAL).unwrap();
    assert!(out.phased.values().iter().all(|z| z.norm() == 0.0));
    assert!(out.real.values().iter().all(|v| *v == 0.0));
    let back = map_dft_spread_rx(&RealGrid::zeros(16, 3), BAL).unwrap();
    assert!(back.values().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn map_dft_round_trip() {
    for m in [8usize, 16, 64] {
        let d = random_grid(m / 2, 7, m as u64);
        for scaling in [LIT, BAL] {
            let x = map_dft_spread_tx(&d, scaling).unwrap().real;
            let back = map_dft_spread_rx(&x, scaling).unwrap();
            assert!(max_diff(back.values(), d.values()) < 1e-12);
        }
    }
}

#[test]
fn map_dft_rejects_bad_sizes() {
    assert!(matches!(map_dft_spread_tx(&random_grid(3, 2, 0), BAL), Err(Error::InvalidParameter(_))));
    assert!(matches!(map_dft_spread_rx(&RealGrid::zeros(6, 2), BAL), Err(Error::InvalidParameter(_))));
    assert!(map_dft_spread_tx(&ComplexGrid::zeros(0, 2, GridRole::Data), BAL).is_err());
}

#[test]
fn map_dft_preserves_power() {
    let d = random_grid(32, 20, 5);
    let out = map_dft_spread_tx(&d, BAL).unwrap();
    let pin: f64 = d.values().iter().map(|z| z.norm_sqr()).sum();
    let pa: f64 = out.phased.values().iter().map(|z| z.norm_sqr()).sum();
    let px: f64 = out.real.values().iter().map(|v| v * v).sum();
    assert!((pa / pin - 1.0).abs() < 1e-10);
    assert!((px / pin - 1.0).abs() < 1e-10);
    // Per real symbol that is half the complex symbol power.
    let per_x = px / out.real.values().len() as f64;
    let per_d = pin / d.values().len() as f64;
    assert!((per_x / (per_d / 2.0) - 1.0).abs() < 1e-10);
}

#[test]
fn literal_midpoints_carry_half_energy() {
    // With unit weights the M/4 symbol contributes |d|^2 instead of 2|d|^2.
    let mut d = ComplexGrid::zeros(8, 1, GridRole::Data);
    d.set(4, 0, c(1.0, 1.0));
    let lit = map_dft_spread_tx(&d, LIT).unwrap();
    let bal = map_dft_spread_tx(&d, BAL).unwrap();
    let e = |g: &RealGrid| g.values().iter().map(|v| v * v).sum::<f64>();
    assert!((e(&lit.real) - 1.0).abs() < 1e-12);
    assert!((e(&bal.real) - 2.0).abs() < 1e-12);
}

#[test]
fn lambda_duality_from_real_grids() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let m = 16;
    for n in 0..6usize {
        let x: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let a: Vec<Complex64> =
            x.iter().enumerate().map(|(k, &v)| c(0.0, 1.0).powu(((k + n) % 4) as u32) * v).collect();
        let col = idft(&a).unwrap();
        let lambda = if n % 2 == 0 { 1.0 } else { -1.0 };
        for l in 0..m {
            assert!((col[(m / 2 + m - l) % m] - col[l].conj() * lambda).norm() < 1e-14);
        }
        if n % 2 == 0 {
            assert!(col[m / 4].im.abs() < 1e-14 && col[3 * m / 4].im.abs() < 1e-14);
        } else {
            // Imaginary-leading columns have purely imaginary midpoints.
            assert!(col[m / 4].re.abs() < 1e-14 && col[3 * m / 4].re.abs() < 1e-14);
        }
    }
}

#[test]
fn flipping_a_mapped_entry_touches_only_its_averages() {
    let d = m8_example();
    let col = conjugate_symmetric_map(&d, 0, LIT).unwrap().values;
    // Positions feeding each data entry under the demap rule for M = 8.
    let feeds: [&[usize]; 4] = [&[0, 4], &[1, 3], &[2, 6], &[5, 7]];
    for pos in 0..8 {
        let mut hit = col.clone();
        hit[pos] = -hit[pos] + c(0.5, 0.5);
        let out = demap(&hit, 0, LIT).unwrap();
        for (l, f) in feeds.iter().enumerate() {
            let moved = (out[l] - d[l]).norm() > 1e-12;
            assert_eq!(moved, f.contains(&pos), "pos {pos}, entry {l}");
        }
    }
}

#[test]
fn flipping_a_real_symbol_matches_the_derived_perturbation() {
    // A sign flip of x[m,n] changes a[m,n] by -2 a[m,n]; the inverse DFT
    // spreads it over every mapped position, so the perturbation of each
    // data entry follows from linearity of the receive chain.
    let m = 8usize;
    let d = ComplexGrid::from_values(4, 1, GridRole::Data, m8_example()).unwrap();
    let x = map_dft_spread_tx(&d, LIT).unwrap().real;
    let scale = (2.0 * m as f64).sqrt() / m as f64;
    for pos in 0..m {
        let mut flipped = x.clone();
        flipped.set(pos, 0, -x.get(pos, 0));
        let out = map_dft_spread_rx(&flipped, LIT).unwrap();
        let k = c(0.0, 1.0).powu((pos % 4) as u32) * (-2.0 * x.get(pos, 0) * scale);
        let delta: Vec<Complex64> = (0..m)
            .map(|l| k * Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * (pos * l) as f64 / m as f64))
            .collect();
        let want = [
            (delta[0] + delta[4].conj()) / 2.0,
            (delta[1] + delta[3].conj()) / 2.0,
            c(delta[2].re, delta[6].re),
            (delta[5] + delta[7].conj()) / 2.0,
        ];
        for l in 0..4 {
            assert!((out.get(l, 0) - d.get(l, 0) - want[l]).norm() < 1e-12, "pos {pos}, entry {l}");
        }
    }
}

/// Closed-form single-carrier view of map-DFT spread FBMC with the
/// rectangular pulse: slot `n` is `sum_l c[l,n] f1(t - l/(M F))`.
#[test]
fn map_dft_rectangle_matches_dirichlet_sum() {
    for l_os in [4usize, 8] {
        let m = 16;
        let filter = rectangle(m, l_os);
        let num = filter.numerology();
        let slots = 5;
        let d = random_grid(m / 2, slots, 40 + l_os as u64);
        let x = map_dft_spread_tx(&d, BAL).unwrap().real;
        let s = fbmc::synthesize(&x, &default_phase(m, slots), &filter).unwrap();
        let (a, fs, f) = (num.hop(), num.sample_rate(), num.spacing_hz);
        let gain = 1.0 / ((a as f64).sqrt() * (2.0 * m as f64).sqrt());
        let mut worst = 0.0f64;
        for n in 0..slots {
            let col = conjugate_symmetric_map(d.column(n), n, BAL).unwrap().values;
            for k in n * a..(n + 1) * a {
                let t = (k as f64 - filter.center()) / fs;
                let want: Complex64 = col
                    .iter()
                    .enumerate()
                    .map(|(l, cl)| cl * dirichlet_f1(t - l as f64 / (m as f64 * f), m, f))
                    .sum::<Complex64>()
                    * gain;
                worst = worst.max((s.samples[k] - want).norm());
            }
        }
        assert!(worst < 1e-8, "L = {l_os}: {worst}");
    }
}

// ---------------------------------------------------------------- simple DFT spreading

#[test]
fn simple_spreading_shapes_and_round_trip() {
    let d1 = random_grid(8, 3, 1);
    let x1 = simple_dft_spread_tx(&d1, Staggering::Time).unwrap();
    assert_eq!((x1.subcarriers(), x1.slots()), (8, 6));
    assert!(max_diff(simple_dft_spread_rx(&x1, Staggering::Time).unwrap().values(), d1.values()) < 1e-12);

    let d2 = random_grid(4, 5, 2);
    let x2 = simple_dft_spread_tx(&d2, Staggering::Frequency).unwrap();
    assert_eq!((x2.subcarriers(), x2.slots()), (8, 5));
    assert!(max_diff(simple_dft_spread_rx(&x2, Staggering::Frequency).unwrap().values(), d2.values()) < 1e-12);

    let z = simple_dft_spread_tx(&ComplexGrid::zeros(8, 2, GridRole::Data), Staggering::Time).unwrap();
    assert!(z.values().iter().all(|v| *v == 0.0));
    assert!(simple_dft_spread_rx(&RealGrid::zeros(8, 3), Staggering::Time).is_err());
    assert!(simple_dft_spread_rx(&RealGrid::zeros(7, 2), Staggering::Frequency).is_err());
}

#[test]
fn scheme1_rectangle_matches_closed_form() {
    let m = 16;
    let filter = rectangle(m, 4);
    let num = filter.numerology();
    let (a, fs, f) = (num.hop(), num.sample_rate(), num.spacing_hz);
    let half_t = 1.0 / (4.0 * f);
    let pairs = 3;
    let d = random_grid(m, pairs, 7);
    let x = simple_dft_spread_tx(&d, Staggering::Time).unwrap();
    let s = fbmc::synthesize(&x, &default_phase(m, 2 * pairs), &filter).unwrap();
    let gain = 1.0 / (2.0 * (a as f64 * m as f64).sqrt());
    let mut worst = 0.0f64;
    for slot in 0..2 * pairs {
        let col = d.column(slot / 2);
        let sign = if slot % 2 == 0 { 1.0 } else { -1.0 };
        let rot = c(0.0, 1.0).powu((slot / 2 * 2 % 4) as u32);
        for k in slot * a..(slot + 1) * a {
            let t = (k as f64 - filter.center()) / fs;
            let want: Complex64 = col
                .iter()
                .enumerate()
                .map(|(l, dl)| {
                    let shift = l as f64 / (m as f64 * f);
                    dl * dirichlet_f1(t - shift + half_t, m, f)
                        + dl.conj() * dirichlet_f1(t + shift + half_t, m, f) * sign
                })
                .sum::<Complex64>()
                * rot
                * gain;
            worst = worst.max((s.samples[k] - want).norm());
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn scheme2_rectangle_matches_closed_form() {
    let m = 16;
    let filter = rectangle(m, 4);
    let num = filter.numerology();
    let (a, fs, f) = (num.hop(), num.sample_rate(), num.spacing_hz);
    let half_t = 1.0 / (4.0 * f);
    let slots = 4;
    let d = random_grid(m / 2, slots, 8);
    let x = simple_dft_spread_tx(&d, Staggering::Frequency).unwrap();
    let s = fbmc::synthesize(&x, &default_phase(m, slots), &filter).unwrap();
    let gain = 1.0 / (2.0 * (a as f64 * m as f64 / 2.0).sqrt());
    let mut worst = 0.0f64;
    for n in 0..slots {
        let rot = c(0.0, 1.0).powu((n % 4) as u32);
        for k in n * a..(n + 1) * a {
            let t = (k as f64 - filter.center()) / fs;
            let tilt = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * t);
            let want: Complex64 = d
                .column(n)
                .iter()
                .enumerate()
                .map(|(l, dl)| {
                    let shift = l as f64 / (m as f64 * f);
                    let f_plus = dirichlet_f2(t - shift + half_t, m, f).unwrap();
                    let f_minus = dirichlet_f2(t + shift + half_t, m, f).unwrap();
                    dl * f_plus * (tilt + 1.0) + dl.conj() * f_minus * (-tilt + 1.0)
                })
                .sum::<Complex64>()
                * rot
                * gain;
            worst = worst.max((s.samples[k] - want).norm());
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn plain_oqam_is_scheme1_staggering() {
    let d = random_grid(8, 3, 9);
    let x = spreading::oqam_tx(&d).unwrap();
    assert_eq!(x, fbmc::oqam_stagger_scheme1(&d));
    assert!(max_diff(spreading::oqam_rx(&x).unwrap().values(), d.values()) == 0.0);
    assert_eq!(fbmc::oqam_stagger_scheme2(&d), fbmc::stagger(&d, Staggering::Frequency));
}

// ---------------------------------------------------------------- OFDM / SC-FDMA

#[test]
fn ofdm_and_scfdma_loopback() {
    let num = Numerology::new(16, 15e3, 4).unwrap();
    let params = OfdmParams::with_default_cp(num);
    assert_eq!(params.cp_len, 8);
    let d = random_grid(16, 6, 12);
    let y = ofdm_demodulate(&ofdm_tx(&d, &params).unwrap(), &params, 6).unwrap();
    assert!(max_diff(y.values(), d.values()) < 1e-12);
    let y = ofdm_demodulate(&scfdma_tx(&d, &params).unwrap(), &params, 6).unwrap();
    assert!(max_diff(scfdma_despread(&y).unwrap().values(), d.values()) < 1e-12);
}

#[test]
fn scfdma_without_cp_or_oversampling_is_the_data() {
    let num = Numerology::new(16, 15e3, 1).unwrap();
    let params = OfdmParams::new(num, 0).unwrap();
    let d = random_grid(16, 3, 13);
    let s = scfdma_tx(&d, &params).unwrap();
    for n in 0..3 {
        for l in 0..16 {
            assert!((s.samples[n * 16 + l] - d.get(l, n)).norm() < 1e-12);
        }
    }
}

#[test]
fn scfdma_matches_single_carrier_sum() {
    let m = 16;
    let num = Numerology::new(m, 15e3, 4).unwrap();
    let params = OfdmParams::with_default_cp(num);
    let d = random_grid(m, 3, 14);
    let s = scfdma_tx(&d, &params).unwrap();
    let (fs, f, period) = (num.sample_rate(), num.spacing_hz, num.fft_size());
    let gain = 1.0 / ((period * m) as f64).sqrt();
    let mut worst = 0.0f64;
    for n in 0..3 {
        for i in 0..params.symbol_len() {
            let t = (i as f64 - params.cp_len as f64) / fs;
            let want: Complex64 = d
                .column(n)
                .iter()
                .enumerate()
                .map(|(l, dl)| dl * dirichlet_f1(t - l as f64 / (m as f64 * f), m, f))
                .sum::<Complex64>()
                * gain;
            worst = worst.max((s.samples[n * params.symbol_len() + i] - want).norm());
        }
    }
    assert!(worst < 1e-8, "{worst}");
}

#[test]
fn ofdm_rejects_bad_input() {
    let num = Numerology::new(8, 15e3, 2).unwrap();
    assert!(OfdmParams::new(num, 17).is_err());
    let params = OfdmParams::with_default_cp(num);
    assert!(matches!(ofdm_tx(&random_grid(6, 2, 0), &params), Err(Error::DimensionMismatch(_))));
    let s = ofdm_tx(&random_grid(8, 2, 0), &params).unwrap();
    assert!(matches!(ofdm_demodulate(&s, &params, 3), Err(Error::DimensionMismatch(_))));
}

mod properties {
    use super::*;
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn map_dft_is_real_and_invertible(seed in any::<u64>(), q in 1usize..9, slot in 0usize..8) {
            let m = 4 * q;
            let d = random_grid(m / 2, 2, seed);
            let out = spreading::map_dft_spread_tx_at(&d, slot, BAL).unwrap();
            for n in 0..2 {
                for k in 0..m {
                    let j = c(0.0, 1.0).powu(((k + n + slot) % 4) as u32);
                    prop_assert!((out.phased.get(k, n) / j).im.abs() < 1e-10);
                }
            }
            let back = spreading::map_dft_spread_rx_at(&out.real, slot, BAL).unwrap();
            prop_assert!(max_diff(back.values(), d.values()) < 1e-10);
        }
    }
}
