//! Property tests for the invariants of each pipeline stage.

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use proptest::prelude::*;

use qframe::cyclic::{
    alignment_rate_zm, conditional_table_zm, copy_distribution_zm, covariant_mutual_info_zm, multinomial_oracle_zm,
    zm_asymmetry, zm_rate_point,
};
use qframe::dft::{dft, inverse_dft, SpectralProfile};
use qframe::povm::{covariant_povm, ensemble_states, mutual_info_of_povm, EnsembleSpec, PovmSpec};
use qframe::prob::{
    entropy_deficit, relative_entropy_diag, shannon_entropy, validate_state, DeviationVector, GroupSpec,
};
use qframe::sampling::{chi_square, simulate_protocol};
use qframe::u1::{
    convolve, copy_distribution_u1, covariant_mutual_info_u1, number_variance, phase_error_density, u1_asymmetry,
    QuadratureSpec,
};
use qframe::{Rate, StandardStateF64};

fn normalize(raw: Vec<f64>) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / total).collect()
}

/// Probability vectors of the given length range; entries may be exactly zero.
fn simplex(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    len.prop_flat_map(|m| {
        prop::collection::vec(prop_oneof![1 => Just(0.0), 6 => 0.001f64..1.0], m)
            .prop_filter("needs positive mass", |v| v.iter().any(|&x| x > 0.0))
            .prop_map(normalize)
    })
}

/// Strictly positive probability vectors.
fn interior(len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<f64>> {
    len.prop_flat_map(|m| prop::collection::vec(0.01f64..1.0, m).prop_map(normalize))
}

fn zm(p: &[f64]) -> StandardStateF64 {
    validate_state(p, GroupSpec::cyclic(p.len())).unwrap()
}

fn u1(p: &[f64]) -> StandardStateF64 {
    validate_state(p, GroupSpec::u1(p.len())).unwrap()
}

/// Plain two-variable mutual information, written out independently of the crate.
fn classical_mi(joint: &[Vec<f64>]) -> f64 {
    let rows: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let cols: Vec<f64> = (0..joint[0].len()).map(|y| joint.iter().map(|r| r[y]).sum()).collect();
    let mut total = 0.0;
    for (x, r) in joint.iter().enumerate() {
        for (y, &p) in r.iter().enumerate() {
            if p > 0.0 {
                total += p * (p / (rows[x] * cols[y])).log2();
            }
        }
    }
    total
}

fn haar_basis(m: usize, entries: &[(f64, f64)]) -> DMatrix<Complex64> {
    let g = DMatrix::from_fn(m, m, |i, j| {
        let (re, im) = entries[i * m + j];
        Complex64::new(re, im)
    });
    g.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn entropy_is_bounded(p in simplex(1..=12)) {
        let h = shannon_entropy(&p);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_deficit_is_nonnegative_and_matches_definition(p in simplex(2..=8)) {
        let dev = DeviationVector::from_probs(&p).unwrap();
        let d = entropy_deficit(&dev);
        prop_assert!(d >= 0.0);
        let direct = (p.len() as f64).log2() - shannon_entropy(&p);
        prop_assert!((d - direct).abs() < 1e-13);
        if dev.deltas().iter().any(|x| x.abs() > 1e-6) {
            prop_assert!(d > 0.0);
        }
    }

    #[test]
    fn relative_entropy_witness(c in interior(2..=6), sigmas in prop::collection::vec(prop::collection::vec(0.01f64..1.0, 6), 20)) {
        let h = shannon_entropy(&c);
        for s in sigmas {
            let sigma = normalize(s[..c.len()].to_vec());
            prop_assert!(relative_entropy_diag(&c, &sigma).unwrap() >= h - 1e-9);
        }
        prop_assert!((relative_entropy_diag(&c, &c).unwrap() - h).abs() < 1e-12);
    }

    #[test]
    fn dft_inverts_and_is_conjugate_symmetric(p in simplex(2..=10)) {
        let z = dft(&p);
        let back = inverse_dft(&z);
        for (a, b) in back.iter().zip(&p) {
            prop_assert!((a - b).abs() < 1e-13);
        }
        let prof = SpectralProfile::from_probs(&p).unwrap();
        let m = p.len();
        for n in 1..m {
            prop_assert!((prof.r[n] - prof.r[m - n]).abs() < 1e-13);
        }
    }

    #[test]
    fn dft_moduli_ignore_cyclic_shift(p in simplex(2..=9), s in 0usize..9) {
        let m = p.len();
        let shifted: Vec<f64> = (0..m).map(|k| p[(k + m - s % m) % m]).collect();
        let a = SpectralProfile::from_probs(&p).unwrap();
        let b = SpectralProfile::from_probs(&shifted).unwrap();
        for n in 0..m {
            prop_assert!((a.r[n] - b.r[n]).abs() < 1e-13);
        }
    }

    #[test]
    fn u1_holevo_bound(p in interior(2..=4), n in 1usize..=48) {
        let s = u1(&p);
        let quad = QuadratureSpec::default_for(&s, n);
        let i = covariant_mutual_info_u1(&s, n, &quad).unwrap();
        prop_assert!(i <= u1_asymmetry(&s, n).unwrap() + 1e-6);
    }

    #[test]
    fn u1_mean_shift_invariance(p in interior(2..=3), n in 1usize..=24, shift in 1usize..4) {
        let s = u1(&p);
        let t = s.shifted(shift);
        let quad = QuadratureSpec::new(4096).unwrap();
        prop_assert!((u1_asymmetry(&s, n).unwrap() - u1_asymmetry(&t, n).unwrap()).abs() < 1e-12);
        let a = covariant_mutual_info_u1(&s, n, &quad).unwrap();
        let b = covariant_mutual_info_u1(&t, n, &quad).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn u1_variance_is_additive(p in interior(2..=4), q in interior(2..=4)) {
        let (a, b) = (u1(&p), u1(&q));
        let joint = convolve(&p, &q);
        let mean: f64 = joint.iter().enumerate().map(|(k, c)| k as f64 * c).sum();
        let var: f64 = joint.iter().enumerate().map(|(k, c)| (k as f64 - mean).powi(2) * c).sum();
        let want = number_variance(&a).unwrap() + number_variance(&b).unwrap();
        prop_assert!((var - want).abs() < 1e-12);
    }

    #[test]
    fn u1_copies_compose_by_convolution(p in interior(2..=3), n1 in 1usize..=40, n2 in 1usize..=40) {
        let s = u1(&p);
        let whole = copy_distribution_u1(&s, n1 + n2).unwrap().c;
        let parts = convolve(&copy_distribution_u1(&s, n1).unwrap().c, &copy_distribution_u1(&s, n2).unwrap().c);
        prop_assert_eq!(whole.len(), parts.len());
        for (a, b) in whole.iter().zip(&parts) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn phase_density_is_normalized(p in interior(2..=4), n in 1usize..=32) {
        let c = copy_distribution_u1(&u1(&p), n).unwrap().c;
        let quad = QuadratureSpec::for_len(c.len());
        let f = phase_error_density(&c, &quad).unwrap();
        prop_assert!(f.iter().all(|&v| v >= 0.0));
        let integral: f64 = f.iter().sum::<f64>() * std::f64::consts::TAU / quad.grid_points as f64;
        prop_assert!((integral - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zm_dft_matches_oracle(p in simplex(2..=5), n in 1usize..=10) {
        let s = zm(&p);
        let fast = copy_distribution_zm(&s, n).unwrap().distribution.c;
        let slow = multinomial_oracle_zm(&s, n).unwrap().c;
        for (a, b) in fast.iter().zip(&slow) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zm_holevo_and_linearization_order(p in simplex(2..=6), n in 1usize..=12) {
        let s = zm(&p);
        let h = zm_asymmetry(&s, n).unwrap();
        let i = covariant_mutual_info_zm(&s, n).unwrap();
        prop_assert!(i.bits <= h.bits + 1e-9);
        let point = zm_rate_point(&s, n).unwrap();
        if let (Rate::Finite(li), Rate::Finite(lh)) = (point.lin_mi_per_copy, point.lin_asym_per_copy) {
            prop_assert!(li <= lh + 1e-9);
        }
    }

    #[test]
    fn conditional_table_is_doubly_stochastic_circulant(p in simplex(2..=6), n in 1usize..=6) {
        let t = conditional_table_zm(&zm(&p), n).unwrap();
        let m = p.len();
        for x in 0..m {
            prop_assert!((t[x].iter().sum::<f64>() - 1.0).abs() < 1e-12);
            prop_assert!(((0..m).map(|y| t[y][x]).sum::<f64>() - 1.0).abs() < 1e-12);
            for y in 0..m {
                prop_assert_eq!(t[x][y], t[(x + 1) % m][(y + 1) % m]);
            }
        }
    }

    #[test]
    fn gram_identity(p in simplex(2..=6), n in 1usize..=12) {
        let m = p.len();
        let c = copy_distribution_zm(&zm(&p), n).unwrap().distribution.c;
        let zc = dft(&c);
        let z1 = dft(&p);
        for k in 0..m {
            let want = z1[k].powu(n as u32);
            prop_assert!((zc[k] - want).norm() < 1e-12);
        }
    }

    #[test]
    fn asymptotics_within_stated_error(p in interior(2..=5)) {
        let prof = SpectralProfile::from_probs(&p).unwrap();
        prop_assume!(prof.r_max > 0.0 && prof.r_max < 0.9);
        let n = (1..=400).find(|&n| prof.subdominant_ratio(n) <= 1e-3);
        prop_assume!(n.is_some());
        let n = n.unwrap();
        let point = zm_rate_point(&zm(&p), n).unwrap();
        prop_assume!(!point.extrapolated);
        let bound = 3.0 * point.subdominant_ratio + 1e-12;
        let rel_h = (point.asymmetry_deficit_bits / point.predicted_asym_deficit - 1.0).abs();
        let rel_i = (point.mi_deficit_bits / point.predicted_mi_deficit - 1.0).abs();
        prop_assert!(rel_h <= bound, "H: {rel_h} > {bound} at N={n}");
        prop_assert!(rel_i <= bound, "I: {rel_i} > {bound} at N={n}");
    }

    #[test]
    fn relabeling_changes_nothing(p in simplex(2..=6), s in 1usize..6, n in 1usize..=10) {
        let a = zm(&p);
        let b = a.shifted(s);
        prop_assert_eq!(alignment_rate_zm(&a).unwrap().finite().map(|x| (x * 1e9).round()),
                        alignment_rate_zm(&b).unwrap().finite().map(|x| (x * 1e9).round()));
        prop_assert!((zm_asymmetry(&a, n).unwrap().bits - zm_asymmetry(&b, n).unwrap().bits).abs() < 1e-12);
        let ia = covariant_mutual_info_zm(&a, n).unwrap().bits;
        let ib = covariant_mutual_info_zm(&b, n).unwrap().bits;
        prop_assert!((ia - ib).abs() < 1e-12);
    }

    #[test]
    fn povm_circulant_relabeling(p in simplex(2..=5), s in 1usize..5, n in 1usize..=4) {
        let ens = ensemble_states(&zm(&p), n).unwrap();
        let povm = covariant_povm(ens.order).unwrap();
        let m = ens.order;
        let rolled_states = (0..m).map(|x| ens.states[(x + s) % m].clone()).collect();
        let rolled = EnsembleSpec { states: rolled_states, ..ens.clone() };
        let rolled_povm = PovmSpec { effects: (0..m).map(|y| povm.effects[(y + s) % m].clone()).collect() };
        let a = mutual_info_of_povm(&ens, &povm).unwrap();
        let b = mutual_info_of_povm(&rolled, &rolled_povm).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn basis_povm_matches_classical_channel(
        p in simplex(2..=4),
        n in 1usize..=3,
        entries in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 16),
    ) {
        let ens = ensemble_states(&zm(&p), n).unwrap();
        let m = ens.order;
        let u = haar_basis(m, &entries);
        let columns: Vec<DVector<Complex64>> = (0..m).map(|y| u.column(y).into_owned()).collect();
        let povm = PovmSpec::new(columns.iter().map(|v| v * v.adjoint()).collect()).unwrap();
        let joint: Vec<Vec<f64>> = ens
            .states
            .iter()
            .map(|psi| columns.iter().map(|v| v.dotc(psi).norm_sqr() / m as f64).collect())
            .collect();
        prop_assert!((mutual_info_of_povm(&ens, &povm).unwrap() - classical_mi(&joint)).abs() < 1e-12);
    }

    #[test]
    fn exact_joint_plugin_equals_analytic(p in simplex(2..=6), n in 1usize..=6) {
        let s = zm(&p);
        let table = conditional_table_zm(&s, n).unwrap();
        let m = p.len() as f64;
        let joint: Vec<Vec<f64>> = table.iter().map(|r| r.iter().map(|q| q / m).collect()).collect();
        let plugin = qframe::povm::joint_mutual_info(&joint);
        prop_assert!((plugin - covariant_mutual_info_zm(&s, n).unwrap().bits).abs() < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn sampled_rows_converge(p in interior(2..=4), n in 1usize..=3, seed in any::<u64>()) {
        let s = zm(&p);
        let m = p.len();
        let shots = 20_000u64;
        let rec = simulate_protocol(&s, n, &covariant_povm(m).unwrap(), shots, seed).unwrap();
        let table = conditional_table_zm(&s, n).unwrap();
        let bound = 5.0 / ((shots as f64) / m as f64).sqrt();
        for (x, row) in rec.counts.iter().enumerate() {
            let total: u64 = row.iter().sum();
            for (y, &c) in row.iter().enumerate() {
                prop_assert!((c as f64 / total as f64 - table[x][y]).abs() <= bound);
            }
        }
    }
}

#[test]
fn sampled_counts_pass_chi_square() {
    // 99% critical value of chi-square with 15 degrees of freedom.
    const CRITICAL: f64 = 30.578;
    let s = zm(&[13.0 / 64.0, 18.0 / 64.0, 19.0 / 64.0, 14.0 / 64.0]);
    let povm = covariant_povm(4).unwrap();
    let rec = simulate_protocol(&s, 1, &povm, 200_000, 2024).unwrap();
    let channel = conditional_table_zm(&s, 1).unwrap();
    let stat = chi_square(&rec, &channel);
    assert!(stat < CRITICAL, "chi-square {stat}");
}

#[test]
fn nth_power_check_uses_complex_pow() {
    let z = Complex::new(0.3f64, -0.2);
    assert!((z.powu(3) - z * z * z).norm() < 1e-15);
}
