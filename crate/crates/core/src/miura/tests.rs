use super::*;
use crate::flows::traces;
use crate::lattice_ops::{b_operator, projection_dagger_check, random_lax_f64, Lattice, Part};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit_product_state(sig: Signature, p: usize, rng: &mut ChaCha8Rng) -> BandOperator<f64> {
    normalize_lowest(&random_lax_f64(Lattice::unit(p), sig, 0.5, true, rng), sig).unwrap()
}

fn gap(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn unit_gauge_is_the_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let l = random_lax_f64(Lattice::unit(9), Signature::new(2, 1), 0.5, true, &mut rng);
    let out = gauge_conjugate(&l, &GaugeField::new(vec![1.0; 9]).unwrap()).unwrap();
    assert_eq!(out, l);
}

#[test]
fn gauge_keeps_the_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let l = random_lax_f64(Lattice::unit(9), Signature::new(2, 2), 0.5, true, &mut rng);
    let phi = GaugeField::new((0..9).map(|_| rng.gen_range(0.5..2.0)).collect()).unwrap();
    let out = gauge_conjugate(&l, &phi).unwrap();
    assert!(gap(&out.diagonal_or_zero(0), &l.diagonal_or_zero(0)) < 1e-15);
}

#[test]
fn gauge_rejects_non_positive_fields() {
    let err = GaugeField::new(vec![1.0, 0.0, 2.0]).unwrap_err();
    assert!(matches!(err, MiuraError::NonPositive { site: 1, .. }));
}

#[test]
fn two_one_gauge_normalises_the_lowest_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sig = Signature::new(2, 1);
    let l = unit_product_state(sig, 7, &mut rng);
    let phi = psi_for_signature(&l, sig, PsiForm::Log).unwrap();
    let out = gauge_conjugate(&l, &phi).unwrap();
    assert!(gap(&out.diagonal_or_zero(-1), &[1.0; 7]) < 1e-12);
}

#[test]
fn psi_is_one_for_unit_lowest_coefficient() {
    let sig = Signature::new(1, 2);
    let l = BandOperator::lax(Lattice::unit(7), sig, [(0, vec![0.3; 7]), (-2, vec![1.0; 7])]).unwrap();
    for form in [PsiForm::Log, PsiForm::Literal] {
        let psi = psi_for_signature(&l, sig, form).unwrap();
        assert!(gap(psi.values(), &[1.0; 7]) < 1e-15, "{form:?}");
    }
}

#[test]
fn one_two_lowest_coefficient_becomes_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sig = Signature::new(1, 2);
    for _ in 0..10 {
        let l = unit_product_state(sig, 7, &mut rng);
        let psi = psi_for_signature(&l, sig, PsiForm::Log).unwrap();
        let out = gauge_conjugate(&l, &psi).unwrap();
        assert!(gap(&out.diagonal_or_zero(-2), &[1.0; 7]) < 1e-12);
        assert!((psi.stats().geometric_mean - 1.0).abs() < 1e-12);
    }
}

#[test]
fn literal_exponent_does_not_normalise() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sig = Signature::new(1, 2);
    let l = unit_product_state(sig, 7, &mut rng);
    let psi = psi_for_signature(&l, sig, PsiForm::Literal).unwrap();
    let out = gauge_conjugate(&l, &psi).unwrap();
    assert!(gap(&out.diagonal_or_zero(-2), &[1.0; 7]) > 1e-3);
}

#[test]
fn the_product_of_the_lowest_coefficient_is_gauge_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let sig = Signature::new(1, 2);
    let l = random_lax_f64(Lattice::unit(7), sig, 0.5, true, &mut rng);
    let product = lowest_product(&l, sig).unwrap();
    let psi = psi_for_signature(&l, sig, PsiForm::Log).unwrap();
    let out = gauge_conjugate(&l, &psi).unwrap();
    // the best a gauge can do is the constant geometric mean
    let gm = product.powf(1.0 / 7.0);
    assert!(gap(&out.diagonal_or_zero(-2), &[gm; 7]) < 1e-12);
    assert!(matches!(nm_to_mn(&l, sig), Err(MiuraError::NonUnitProduct { .. })));
}

#[test]
fn cyclic_inverse_needs_coprime_step() {
    let g = vec![0.1, -0.2, 0.3, 0.4, -0.5, 0.6];
    let f = cyclic_difference_inverse(&g, 1).unwrap();
    let mean = g.iter().sum::<f64>() / 6.0;
    for x in 0..6 {
        assert!((f[x] - f[(x + 5) % 6] - (g[x] - mean)).abs() < 1e-15);
    }
    let err = cyclic_difference_inverse(&g, 2).unwrap_err();
    assert!(matches!(err, MiuraError::Lattice(LatticeError::SingularKernel { .. })));
}

#[test]
fn pure_shift_maps_by_dagger() {
    let sig = Signature::new(1, 2);
    let l = BandOperator::lax(Lattice::unit(7), sig, [(-2, vec![1.0; 7])]).unwrap();
    let out = nm_to_mn(&l, sig).unwrap();
    let want = BandOperator::lax(Lattice::unit(7), sig.swapped(), [(-1, vec![1.0; 7])]).unwrap();
    assert!(out.op_sub(&want).unwrap().max_abs() < 1e-15);
}

#[test]
fn image_is_a_monic_swapped_operator_with_the_stated_coefficients() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for (n, m) in [(1, 2), (2, 1), (2, 3), (3, 2)] {
        let sig = Signature::new(n, m);
        let l = unit_product_state(sig, 13, &mut rng);
        let out = nm_to_mn(&l, sig).unwrap();
        assert_eq!(out.max_offset(), Some(m as i32));
        assert_eq!(out.min_offset(), Some(-(n as i32)));
        assert_eq!(out.diagonal_or_zero(m as i32), vec![1.0; 13]);
        let psi = psi_for_signature(&l, sig, PsiForm::Log).unwrap();
        let ps = psi.values();
        for j in -(n as i32)..(m as i32) {
            let u = shift_values(&l.diagonal_or_zero(-j), j as i64);
            let psj = shift_values(ps, j as i64);
            let want: Vec<f64> = (0..13).map(|x| u[x] * ps[x] / psj[x]).collect();
            assert!(gap(&out.diagonal_or_zero(j), &want) < 1e-12, "{sig} j={j}");
        }
    }
}

#[test]
fn double_application_preserves_traces() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let sig = Signature::new(1, 2);
    let l = unit_product_state(sig, 13, &mut rng);
    let once = nm_to_mn(&l, sig).unwrap();
    let twice = nm_to_mn(&once, sig.swapped()).unwrap();
    let (a, b) = (traces(&l), traces(&twice));
    assert!(gap(&a, &b) < 1e-12, "{a:?} {b:?}");
}

#[test]
fn constant_data_has_zero_residual() {
    let sig = Signature::new(1, 2);
    let l = BandOperator::lax(Lattice::unit(13), sig, [(0, vec![0.4; 13]), (-1, vec![-0.2; 13]), (-2, vec![1.0; 13])])
        .unwrap();
    let r = equivalence_residual(&l).unwrap();
    assert_eq!(r.max_residual, 0.0);
}

#[test]
fn one_two_flows_match_their_two_one_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let l = unit_product_state(Signature::new(1, 2), 13, &mut rng);
        let r = equivalence_residual(&l).unwrap();
        for pair in &r.pairs {
            assert!(pair.displayed < 1e-10, "{pair:?}");
            assert!(pair.theorem < 1e-10, "{pair:?}");
        }
    }
}

#[test]
fn skipping_the_dagger_breaks_the_correspondence() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let l = unit_product_state(Signature::new(1, 2), 13, &mut rng);
    let r = equivalence_residual_with(&l, true).unwrap();
    assert!(r.pairs.iter().all(|p| p.displayed > 1e-2 && p.theorem > 1e-2), "{r:?}");
}

#[test]
fn equivalence_report_round_trips() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let l = unit_product_state(Signature::new(1, 2), 13, &mut rng);
    let r = equivalence_residual(&l).unwrap();
    let back: EquivalenceReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.pairs[1].target, "(2,1) t[2,0]");
}

#[test]
fn theorem_holds_for_every_primary_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 3), (3, 2)] {
        let sig = Signature::new(n, m);
        let l = unit_product_state(sig, 13, &mut rng);
        for flow in FlowSpec::primaries(sig) {
            let r = theorem_residual(&l, sig, flow).unwrap();
            assert!(r < 1e-10, "{sig} {flow}: {r:e}");
        }
    }
}

#[test]
fn projections_commute_with_dagger_on_flow_generators() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let sig = Signature::new(1, 2);
    let l = unit_product_state(sig, 13, &mut rng);
    for flow in FlowSpec::primaries(sig) {
        let b = b_operator(&l, flow.var(), sig, flow.depth(sig)).unwrap().op.project(Part::Geq(-6));
        for k in [0, 1] {
            assert!(projection_dagger_check(&b, k), "{flow} k={k}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gauges_preserve_traces(seed in any::<u64>(), n in 1u32..4, m in 1u32..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sig = Signature::new(n, m);
        let l = random_lax_f64(Lattice::unit(11), sig, 0.5, true, &mut rng);
        let phi = GaugeField::new((0..11).map(|_| rng.gen_range(0.3..3.0)).collect()).unwrap();
        let (a, b) = (traces(&l), traces(&gauge_conjugate(&l, &phi).unwrap()));
        for k in 0..3 {
            prop_assert!((a[k] - b[k]).abs() < 1e-10 * (1.0 + a[k].abs()));
        }
    }
}
