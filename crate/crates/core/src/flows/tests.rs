use super::*;
use crate::lattice_ops::{random_lax_f64, BandOperator, Lattice, LatticeError};
use crate::Signature;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn lattice_for(s: Special) -> Lattice {
    Lattice::unit(if s.is_nonlocal() { 13 } else { 12 })
}

fn random_state(sig: Signature, p: usize, rng: &mut ChaCha8Rng) -> BandOperator<f64> {
    random_lax_f64(Lattice::unit(p), sig, 0.5, true, rng)
}

fn generic(l: &BandOperator<f64>, sig: Signature, flow: FlowSpec) -> GenericRhs<f64> {
    lax_rhs_generic(l, flow, sig, flow.depth(sig)).unwrap()
}

fn vacuum(sig: Signature, p: usize) -> BandOperator<f64> {
    BandOperator::lax(Lattice::unit(p), sig, Vec::<(i32, Vec<f64>)>::new()).unwrap()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).fold(0.0, f64::max)
}

#[test]
fn vacuum_is_stationary_for_every_primary_flow() {
    for (n, m) in [(1, 1), (2, 1), (1, 2), (2, 2), (3, 2)] {
        let sig = Signature::new(n, m);
        let l = vacuum(sig, 13);
        for flow in FlowSpec::primaries(sig) {
            let r = generic(&l, sig, flow);
            assert!(r.rhs.max_abs() < 1e-14, "{sig} {flow}");
            assert!(r.leakage < 1e-14);
        }
    }
}

#[test]
fn one_one_generic_flow_is_the_toda_lattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let sig = Signature::new(1, 1);
    for _ in 0..10 {
        let l = random_state(sig, 12, &mut rng);
        let r = generic(&l, sig, FlowSpec::new(1, 0));
        let (da, db) = toda11(&l.diagonal_or_zero(-1), &l.diagonal_or_zero(0));
        for (got, want) in [(r.rhs.diagonal_or_zero(-1), da), (r.rhs.diagonal_or_zero(0), db)] {
            let gap = got.iter().zip(&want).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-12, "{gap}");
        }
    }
}

#[test]
fn hand_written_systems_agree_with_the_generic_commutator() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for s in Special::ALL {
        let sig = s.sig();
        let lat = lattice_for(s);
        for _ in 0..20 {
            let l = random_lax_f64(lat, sig, 0.5, true, &mut rng);
            let aux = s.init_aux(&l).unwrap();
            let (special, _) = s.rhs(&l, aux.as_deref()).unwrap();
            let g = generic(&l, sig, s.flow());
            let gap = special.op_sub(&g.rhs).unwrap().max_abs();
            assert!(gap < 1e-10, "{}: {gap:e}", s.name());
            assert!(g.leakage < 1e-10, "{}: leakage {:e}", s.name(), g.leakage);
        }
    }
}

#[test]
fn auxiliary_derivatives_follow_the_fields() {
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let h = 1e-5;
    for s in Special::ALL.into_iter().filter(|s| s.needs_aux()) {
        let l = random_lax_f64(lattice_for(s), s.sig(), 0.5, true, &mut rng);
        let aux = s.init_aux(&l).unwrap().unwrap();
        let (dl, daux) = s.rhs(&l, Some(&aux)).unwrap();
        let plus = s.init_aux(&l.op_add(&dl.scale(&h)).unwrap()).unwrap().unwrap();
        let minus = s.init_aux(&l.op_sub(&dl.scale(&h)).unwrap()).unwrap().unwrap();
        let fd: Vec<f64> = plus.iter().zip(&minus).map(|(p, m)| (p - m) / (2.0 * h)).collect();
        let gap = fd.iter().zip(daux.unwrap()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-7, "{}: {gap:e}", s.name());
    }
}

#[test]
fn two_one_trivial_states() {
    let p = 13;
    let f = Bm21Fields { a: vec![0.7; p], b: vec![-0.3; p], c: vec![1.1; p] };
    let d = bm21_t10(&f);
    assert!(max_abs(&d.a) + max_abs(&d.b) + max_abs(&d.c) < 1e-15);
    let d = bm21_t20(&f).unwrap();
    assert!(max_abs(&d.a) + max_abs(&d.b) + max_abs(&d.c) < 1e-14);

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let l = random_state(Signature::new(2, 1), p, &mut rng);
    let zero_a = Bm21Fields { a: vec![0.0; p], b: l.diagonal_or_zero(0), c: l.diagonal_or_zero(1) };
    let d = bm21_t10(&zero_a);
    assert!(max_abs(&d.a) + max_abs(&d.b) + max_abs(&d.c) < 1e-15);
}

#[test]
fn barred_variable_reproduces_the_nonlocal_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let p = 13;
    for _ in 0..10 {
        let a: Vec<f64> = (0..p).map(|_| rng.gen_range(0.5..1.5)).collect();
        let b: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let cbar: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect();
        let c: Vec<f64> = (0..p).map(|x| cbar[(x + 1) % p] + cbar[x]).collect();
        let direct = bm21_t20(&Bm21Fields { a: a.clone(), b: b.clone(), c }).unwrap();
        let barred = bm21_t20_bar(&a, &b, &cbar);
        for (x, y) in [(&direct.a, &barred.a), (&direct.b, &barred.b), (&direct.c, &barred.c)] {
            let gap = x.iter().zip(y).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-12, "{gap:e}");
        }
    }
}

#[test]
fn one_two_lower_flow_with_unit_leading_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = 13;
    let u0: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let um1: Vec<f64> = (0..p).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let d = bth12_rhs(Bth12Flow::Tm10, &[u0.clone(), um1.clone(), vec![1.0; p]]).unwrap();
    assert!(max_abs(&d[0]) < 1e-13);
    for (got, f) in [(&d[1], &u0), (&d[2], &um1)] {
        let want: Vec<f64> = (0..p).map(|x| f[x] - f[(x + p - 1) % p]).collect();
        let gap = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(gap < 1e-13, "{gap:e}");
    }
}

#[test]
fn lower_flows_reject_non_positive_leading_coefficients() {
    let p = 13;
    let mut um2 = vec![1.0; p];
    um2[4] = -0.2;
    let err = bth12_rhs(Bth12Flow::Tm10, &[vec![0.0; p], vec![0.0; p], um2.clone()]).unwrap_err();
    assert!(matches!(err, FlowError::NonPositive { site: 4, .. }), "{err}");

    let l = BandOperator::lax(Lattice::unit(p), Signature::new(2, 2), [(-2, um2)]).unwrap();
    let system = System::Special(Special::Bth22(Bth22Flow::Tm10));
    assert!(matches!(system.prepare(l), Err(FlowError::NonPositive { .. })));
}

#[test]
fn nonlocal_flows_need_an_odd_lattice() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let l = random_state(Signature::new(2, 1), 12, &mut rng);
    let err = Special::Bm21T20.rhs(&l, None).unwrap_err();
    assert!(matches!(err, FlowError::Lattice(LatticeError::SingularKernel { .. })), "{err}");
}

#[test]
fn systems_check_signature_and_auxiliary_field() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let l = random_state(Signature::new(2, 2), 13, &mut rng);
    assert!(matches!(Special::Toda11.rhs(&l, None), Err(FlowError::WrongSignature { .. })));
    let s = Special::Bth22(Bth22Flow::T20);
    assert!(matches!(s.rhs(&l, None), Err(FlowError::MissingAux { .. })));
    let e = lax_rhs_generic(&l, FlowSpec::new(3, 0), Signature::new(2, 2), 1).unwrap_err();
    assert!(matches!(e, FlowError::BadFlow { gamma: 3, .. }));
}

#[test]
fn inconsistent_auxiliary_initialisation_is_refused() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let system = System::Special(Special::Bth22(Bth22Flow::T20));
    let l = random_state(Signature::new(2, 2), 13, &mut rng);
    let mut state = system.prepare(l).unwrap();
    state.aux.as_mut().unwrap()[0] += 1e-3;
    let err = integrate_state(&system, state, 1e-3, 5, &Monitors::default(), 1).unwrap_err();
    assert!(matches!(err, FlowError::AuxInconsistent { .. }), "{err}");
    let err = integrate(&system, random_state(Signature::new(2, 2), 13, &mut rng), 0.0, 5, &Monitors::default(), 1)
        .unwrap_err();
    assert_eq!(err, FlowError::BadStep(0.0));
}

#[test]
fn auxiliary_field_stays_consistent_along_the_two_two_nonlocal_flow() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let system = System::Special(Special::Bth22(Bth22Flow::T20));
    let l = random_state(Signature::new(2, 2), 13, &mut rng);
    let traj = integrate(&system, l, 1e-3, 500, &Monitors::default(), 100).unwrap();
    assert!(traj.max_aux_defect().unwrap() < 1e-8);
    assert_eq!(traj.times.len(), 6);
}

#[test]
fn traces_are_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let monitors = Monitors { trace_drift: Some(1e-8), ..Monitors::default() };
    let systems = [
        System::generic(Signature::new(2, 1), FlowSpec::new(1, 0)),
        System::generic(Signature::new(2, 2), FlowSpec::new(-1, 0)),
        System::Special(Special::Toda11),
        System::Special(Special::Bth22(Bth22Flow::Tm10)),
    ];
    for system in systems {
        let p = match system {
            System::Special(s) if !s.is_nonlocal() => 12,
            System::Generic { sig, flow, .. } if flow.var().slot(sig) % sig.width(flow.var().side()) == 0 => 12,
            _ => 13,
        };
        let l = random_state(system.sig(), p, &mut rng);
        let traj = integrate(&system, l, 1e-3, 200, &monitors, 50).unwrap();
        assert!(traj.trace_drift().iter().all(|d| *d < 1e-8), "{:?}", traj.trace_drift());
        assert!(traj.max_leakage() < 1e-10);
    }
}

#[test]
fn two_two_primary_flows_commute() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let sig = Signature::new(2, 2);
    let l = random_state(sig, 13, &mut rng);
    let flows = FlowSpec::primaries(sig);
    for (i, a) in flows.iter().enumerate() {
        for b in &flows[i..] {
            let c = commutativity_check(&l, *a, *b, sig, 1e-3).unwrap();
            assert!(c < 1e-6, "{a} {b}: {c:e}");
        }
    }
}

#[test]
fn commutator_defect_is_a_fourth_order_truncation() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let sig = Signature::new(2, 2);
    let l = random_state(sig, 13, &mut rng);
    let (a, b) = (FlowSpec::new(2, 0), FlowSpec::new(-1, 0));
    let coarse = commutativity_check(&l, a, b, sig, 4e-2).unwrap();
    let fine = commutativity_check(&l, a, b, sig, 2e-2).unwrap();
    assert!((12.0..=20.0).contains(&(coarse / fine)), "{coarse:e} {fine:e}");
}

#[test]
fn rk4_is_fourth_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let system = System::generic(Signature::new(2, 1), FlowSpec::new(1, 0));
    let l = random_state(system.sig(), 12, &mut rng);
    let r = richardson_ratio(&system, &l, 0.05, 1.0).unwrap();
    assert!((12.0..=20.0).contains(&r.ratio), "{r:?}");
}

#[test]
fn special_and_generic_trajectories_coincide() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let special = System::Special(Special::Bm21T10);
    let generic = System::generic(Signature::new(2, 1), FlowSpec::new(1, 0));
    let l = random_state(special.sig(), 12, &mut rng);
    let m = Monitors::default();
    let a = integrate(&special, l.clone(), 1e-2, 50, &m, 50).unwrap();
    let b = integrate(&generic, l, 1e-2, 50, &m, 50).unwrap();
    assert!(a.last().distance(b.last()) < 1e-10);
}

#[test]
fn trajectory_csv_has_one_row_per_record() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let system = System::Special(Special::Bth22(Bth22Flow::T20));
    let l = random_state(system.sig(), 13, &mut rng);
    let csv = integrate(&system, l, 1e-2, 10, &Monitors::default(), 5).unwrap().to_csv();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 4);
    let cols = lines[0].split(',').count();
    assert_eq!(cols, 1 + 5 * 13 + 13 + 5);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == cols));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generic_flows_preserve_traces_and_band(
        seed in any::<u64>(),
        sig_idx in 0usize..4,
        flow_idx in 0usize..5,
    ) {
        let sig = [(1, 1), (2, 1), (1, 2), (2, 2)].map(|(n, m)| Signature::new(n, m))[sig_idx];
        let flows = FlowSpec::primaries(sig);
        let flow = flows[flow_idx % flows.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let l = random_state(sig, 13, &mut rng);
        let r = generic(&l, sig, flow);
        prop_assert!(r.leakage < 1e-10);
        // d/dt tr L^k = k tr(L^{k−1} ∂L)
        let mut lk = BandOperator::identity(l.lattice());
        for k in 1..=3 {
            let rate = lk.op_mul(&r.rhs).unwrap().trace() * k as f64;
            prop_assert!(rate.abs() < 1e-10, "k={} rate={:e}", k, rate);
            lk = lk.op_mul(&l).unwrap();
        }
    }
}

