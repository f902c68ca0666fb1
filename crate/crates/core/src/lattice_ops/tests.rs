use super::*;
use crate::{Signature, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q(n: i64, d: i64) -> Q {
    Q::new(n.into(), d.into())
}

#[test]
fn shift_rule_and_identity() {
    let lat = Lattice::unit(5);
    let id = BandOperator::<Q>::identity(lat);
    let up = BandOperator::<Q>::shift(lat, 1);
    let down = BandOperator::<Q>::shift(lat, -1);
    assert_eq!(&up * &down, id);
    let f: Vec<Q> = (0..5).map(|i| q(i + 1, 1)).collect();
    let g: Vec<Q> = (0..5).map(|i| q(2 * i - 3, 1)).collect();
    let a = BandOperator::from_diagonals(lat, [(1, f.clone())]).unwrap();
    let b = BandOperator::from_diagonals(lat, [(1, g.clone())]).unwrap();
    let prod = &a * &b;
    let expect: Vec<Q> = (0..5).map(|x| f[x].clone() * g[(x + 1) % 5].clone()).collect();
    assert_eq!(prod.diagonal(2).unwrap(), expect.as_slice());
    assert_eq!(prod.offsets().collect::<Vec<_>>(), vec![2]);
}

#[test]
fn product_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let lat = Lattice::unit(7);
    for _ in 0..5 {
        let a = random_band_q(lat, -2, 3, &mut rng);
        let b = random_band_q(lat, -3, 1, &mut rng);
        let lhs = (&a * &b).to_dense();
        let rhs = dense_mul(&a.to_dense(), &b.to_dense());
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn lattice_mismatch_is_reported() {
    let a = BandOperator::<f64>::identity(Lattice::unit(5));
    let b = BandOperator::<f64>::identity(Lattice::unit(7));
    assert!(matches!(a.op_mul(&b), Err(LatticeError::Mismatch { .. })));
    assert!(Lattice::new(2, 1.0).is_err());
}

#[test]
fn projections() {
    let lat = Lattice::unit(5);
    let a = &BandOperator::<Q>::shift(lat, 1) + &BandOperator::shift(lat, -1);
    assert_eq!(a.project(Part::Plus), BandOperator::shift(lat, 1));
    let u0: Vec<Q> = (0..5).map(|i| q(i, 3)).collect();
    let u1: Vec<Q> = (0..5).map(|i| q(1 - i, 2)).collect();
    let b = BandOperator::from_diagonals(lat, [(0, u0.clone()), (1, u1.clone())]).unwrap();
    assert_eq!(b.project(Part::Diag0).diagonal(0).unwrap(), u0.as_slice());

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = random_lax_q(lat, Signature::new(2, 2), &mut rng);
    let geq1 = l.project(Part::Geq(1));
    assert_eq!(geq1.offsets().collect::<Vec<_>>(), vec![1, 2]);
    assert!(geq1.diagonal(2).unwrap().iter().all(|v| v.is_one()));
    assert_eq!(&l.project(Part::Plus) + &l.project(Part::Minus), l);
    assert_eq!(&l.project(Part::Geq(1)) + &l.project(Part::Diag0), l.project(Part::Geq(0)));
}

#[test]
fn nonlocal_kernel_cases() {
    let lat5 = Lattice::unit(5);
    let f = LatticeField::new(lat5, (0..5).map(|i| q(i * i - 2, 3)).collect()).unwrap();
    assert_eq!(nonlocal_solve(&ConstLaurent::one(), &f).unwrap(), f);

    let one_plus = ConstLaurent::<Q>::geometric(2, 1);
    let c = LatticeField::constant(lat5, q(7, 1));
    let g = nonlocal_solve(&one_plus, &c).unwrap();
    assert!(g.values.iter().all(|v| *v == q(7, 2)));

    let lat6 = Lattice::unit(6);
    let err = nonlocal_solve(&one_plus, &LatticeField::constant(lat6, Q::one())).unwrap_err();
    match err {
        LatticeError::SingularKernel { modes, p, .. } => {
            assert_eq!(p, 6);
            assert_eq!(modes, vec![3]);
        }
        other => panic!("unexpected {other:?}"),
    }
    let errf = nonlocal_solve(&ConstLaurent::<f64>::geometric(2, 1), &LatticeField::constant(lat6, 1.0)).unwrap_err();
    assert!(errf.to_string().contains("singular"));
}

#[test]
fn nonlocal_solve_float_residual() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let lat = Lattice::unit(13);
    let k = ConstLaurent::new([(0, 1.0), (1, 1.0)]);
    let f = LatticeField::new(lat, (0..13).map(|_| rng.gen_range(-1.0..1.0)).collect()).unwrap();
    let g = nonlocal_solve(&k, &f).unwrap();
    let back = k.to_operator(lat).apply(&g.values);
    for (a, b) in back.iter().zip(&f.values) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn upper_root_trivial_and_21_diagonal() {
    let lat = Lattice::unit(9);
    let sig = Signature::new(2, 1);
    let vac = BandOperator::<Q>::shift(lat, 2);
    let r = nth_root_upper(&vac, sig, 4).unwrap();
    assert_eq!(r.op, BandOperator::shift(lat, 1));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let l = random_lax_q(lat, sig, &mut rng);
    let r = nth_root_upper(&l, sig, 6).unwrap();
    let a0 = nonlocal_solve(&ConstLaurent::geometric(2, 1), &l.field(1)).unwrap();
    assert_eq!(r.op.diagonal_or_zero(0), a0.values);
}

#[test]
fn upper_root_exact_window() {
    let lat = Lattice::unit(9);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for sig in [Signature::new(2, 2), Signature::new(2, 1), Signature::new(1, 2)] {
        let l = random_lax_q(lat, sig, &mut rng);
        let depth = 5;
        let r = nth_root_upper(&l, sig, depth).unwrap();
        let rn = r.pow(sig.n);
        assert_eq!(rn.window, Window::AtLeast(sig.n as i32 - 1 - depth as i32));
        assert_eq!(rn.residual_against(&l), 0.0, "{sig}");
    }
}

#[test]
fn upper_root_float_residual() {
    let lat = Lattice::unit(9);
    let sig = Signature::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let l = random_lax_f64(lat, sig, 0.5, true, &mut rng);
    let r = nth_root_upper(&l, sig, 6).unwrap();
    let res = (&r.op.pow(2) - &l).max_abs_where(|d| d >= -4);
    assert!(res < 1e-10, "{res}");
}

#[test]
fn lower_root_exact_with_rational_leading() {
    let lat = Lattice::unit(9);
    let sig = Signature::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let lead: Vec<Q> = (0..9).map(|_| q(rng.gen_range(1..=6), rng.gen_range(1..=3))).collect();
    let mut l = random_lax_q(lat, sig, &mut rng);
    let u_low: Vec<Q> = (0..9).map(|x| lead[x].clone() * lead[(x + 8) % 9].clone()).collect();
    l.set_diagonal(-2, u_low);
    let s = mth_root_lower_with_leading(&l, sig, 5, lead.clone()).unwrap();
    let s2 = s.pow(2);
    assert_eq!(s2.window, Window::AtMost(4));
    assert_eq!(s2.residual_against(&l), 0.0);

    let bad: Vec<Q> = lead.iter().map(|v| v.clone() + Q::one()).collect();
    assert_eq!(mth_root_lower_with_leading(&l, sig, 5, bad), Err(LatticeError::InconsistentLeading));
}

#[test]
fn lower_root_float() {
    let lat = Lattice::unit(9);
    let sig = Signature::new(2, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let l = random_lax_f64(lat, sig, 0.5, true, &mut rng);
    let s = mth_root_lower(&l, sig, 6).unwrap();
    let res = (&s.op.pow(2) - &l).max_abs_where(|d| d <= 5);
    assert!(res < 1e-10, "{res}");

    // the closed form exp((1 + Λ⁻¹)⁻¹ log u_{−2})
    let logs: Vec<f64> = l.diagonal(-2).unwrap().iter().map(|v| v.ln()).collect();
    let k = ConstLaurent::new([(0, 1.0), (-1, 1.0)]);
    let g = nonlocal_solve(&k, &LatticeField::new(lat, logs).unwrap()).unwrap();
    for (a, b) in s.op.diagonal(-1).unwrap().iter().zip(&g.values) {
        assert!((a - b.exp()).abs() < 1e-12);
    }

    let mut ones = l.clone();
    ones.set_diagonal(-2, vec![1.0; 9]);
    let lead = lower_root_leading(&ones, sig).unwrap();
    assert!(lead.iter().all(|v| (v - 1.0).abs() < 1e-14));

    let mut neg = l.clone();
    let mut low = l.diagonal_or_zero(-2);
    low[4] = -0.1;
    neg.set_diagonal(-2, low);
    assert!(matches!(mth_root_lower(&neg, sig, 3), Err(LatticeError::NonPositive { site: 4, .. })));
}

#[test]
fn b_operators() {
    let lat = Lattice::unit(9);
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let s11 = Signature::new(1, 1);
    let l11 = random_lax_f64(lat, s11, 0.5, true, &mut rng);
    let b = b_operator(&l11, crate::polytime::TimeVar::new(1, 0), s11, 3).unwrap();
    assert_eq!(b.op, l11);

    let s21 = Signature::new(2, 1);
    let l21 = random_lax_f64(lat, s21, 0.5, true, &mut rng);
    let b = b_operator(&l21, crate::polytime::TimeVar::new(2, 0), s21, 4).unwrap();
    assert_eq!(b.power, 1);
    assert!((&b.op.pow(2) - &l21).max_abs_where(|d| b.window.contains(d) && d >= 1 - 4) < 1e-12);

    let s22 = Signature::new(2, 2);
    let l22 = random_lax_f64(lat, s22, 0.5, true, &mut rng);
    let half = b_operator(&l22, crate::polytime::TimeVar::new(-1, 0), s22, 6).unwrap();
    assert_eq!(half.power, 1);
    let res = (&half.op.pow(2) - &l22).max_abs_where(|d| d <= 5);
    assert!(res < 1e-10, "{res}");
    let whole = b_operator(&l22, crate::polytime::TimeVar::new(0, 0), s22, 6).unwrap();
    assert_eq!(whole.power, 2);
    assert!(whole.residual_against(&l22) < 1e-10);
    assert!(b_operator(&l22, crate::polytime::TimeVar::new(3, 0), s22, 2).is_err());
}

#[test]
fn dagger_examples() {
    let lat = Lattice::unit(7);
    assert_eq!(BandOperator::<Q>::shift(lat, 1).dagger(), BandOperator::shift(lat, -1));
    let u: Vec<Q> = (0..7).map(|i| q(i + 2, 1)).collect();
    let a = BandOperator::from_diagonals(lat, [(-2, u.clone())]).unwrap();
    let expect: Vec<Q> = (0..7).map(|x| u[(x + 2) % 7].clone()).collect();
    assert_eq!(a.dagger().diagonal(2).unwrap(), expect.as_slice());
    let sym = &BandOperator::<Q>::shift(lat, 1) + &BandOperator::shift(lat, -1);
    assert!(projection_dagger_check(&sym, 0));
}

#[test]
fn json_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let op = random_band_f64(Lattice::unit(5), -1, 2, &mut rng);
    let text = serde_json::to_string(&op).unwrap();
    assert!(text.contains("\"P\":5"));
    assert!(text.contains("\"diagonals\""));
    let back: BandOperator<f64> = serde_json::from_str(&text).unwrap();
    assert_eq!(back, op);
    assert!(serde_json::from_str::<BandOperator<f64>>(r#"{"P":5,"eps":1,"diagonals":{"x":[1,2,3,4,5]}}"#).is_err());
    assert!(serde_json::from_str::<BandOperator<f64>>(r#"{"P":5,"eps":1,"diagonals":{"0":[1,2]}}"#).is_err());
}

fn band(seed: u64, lo: i32, hi: i32) -> BandOperator<Q> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_band_q(Lattice::unit(7), lo, hi, &mut rng)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn ring_laws(s in any::<u64>()) {
        let a = band(s, -2, 1);
        let b = band(s ^ 1, -1, 2);
        let c = band(s ^ 2, 0, 1);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!((&a * &b).to_dense(), dense_mul(&a.to_dense(), &b.to_dense()));
    }

    #[test]
    fn dagger_is_anti_involution(s in any::<u64>()) {
        let a = band(s, -2, 2);
        let b = band(s ^ 5, -1, 3);
        prop_assert_eq!(a.dagger().dagger(), a.clone());
        prop_assert_eq!((&a * &b).dagger(), &b.dagger() * &a.dagger());
    }

    #[test]
    fn trace_is_cyclic(s in any::<u64>()) {
        let a = band(s, -2, 2);
        let b = band(s ^ 9, -3, 1);
        prop_assert_eq!((&a * &b).trace(), (&b * &a).trace());
    }

    #[test]
    fn projections_idempotent_and_dagger_compatible(s in any::<u64>(), k in 0i32..2) {
        let a = band(s, -3, 3);
        for part in [Part::Plus, Part::Minus] {
            prop_assert_eq!(a.project(part).project(part), a.project(part));
        }
        prop_assert!(projection_dagger_check(&a, k));
    }

    #[test]
    fn scalar_zero_diagonals_dropped(s in any::<u64>()) {
        let a = band(s, -1, 1);
        prop_assert!((&a - &a).is_zero());
        prop_assert!(a.diagonals().all(|(_, v)| v.iter().any(|x| !x.is_zero())));
    }
}
