use super::*;
use crate::polytime::{hirota_apply, HirotaMonomial, TimeSet, TimeVar};
use crate::tau_engine::{evolve_moment_matrix, rational_tau, Seed, Tail};
use crate::{Side, Signature, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rational(n: u32, m: u32, j: u32, mm: u32, nn: u32) -> TauSequence {
    let sig = Signature::new(n, m);
    rational_tau(sig, j, mm, nn, &TimeSet::primary(sig)).unwrap()
}

fn failing(reports: &[ResidualReport]) -> Vec<String> {
    reports.iter().filter(|r| !r.passes()).map(|r| format!("{} n={}", r.equation, r.n)).collect()
}

#[test]
fn calibration_reproduces_frozen_table() {
    let groups = calibration_samples(4);
    for family in Family::PRIMARY.into_iter().chain([Family::K0]) {
        let c = calibrate_family(family, &groups).unwrap();
        assert!(c.equivalent, "{family:?}: survivors {:?} are not equivalent", c.vanishing);
        assert_eq!(c.chosen(), Some(frozen_variant(&Equation::primary(family, 0))), "{family:?}");
    }
}

#[test]
fn equation_sides_match_displayed_forms() {
    let sig = Signature::new(2, 3);
    let (l, r) = sides(&Equation::primary(Family::RightToda, -1), sig);
    assert_eq!(l.op, Operator::Monomial(vec![(Side::R, 2), (Side::L, 1)]));
    assert_eq!((r.scale, r.op, r.f, r.g), (2, Operator::Schur(Side::R, 1), 1, -1));
    let (l, r) = sides(&Equation::primary(Family::LeftKp, 1), sig);
    assert_eq!(l.op, Operator::Monomial(vec![(Side::L, 2), (Side::L, 1)]));
    assert_eq!(r.op, Operator::Schur(Side::L, 3));
    let (l, r) = sides(&Equation::k0(1, -1), sig);
    assert_eq!((l.op, l.f, l.g), (Operator::Schur(Side::L, 1), 2, 0));
    assert_eq!((r.op, r.f, r.g), (Operator::Schur(Side::R, 4), 1, 1));
    assert_eq!(Equation::k0(1, 0).id(), "beta01");
    assert_eq!(Equation::k0(1, -1).id(), "beta02");
    assert_eq!(Equation::k0(1, 1).id(), "beta03");
    assert_eq!(Equation::k0(0, 1).id(), "k0_r0_m1");
    assert_eq!(Equation::all_primary(sig).len(), 3 * 3 + 3 * 2);
}

#[test]
fn delta_seed_satisfies_everything() {
    for (n, m) in [(1, 1), (1, 2), (2, 3)] {
        let sig = Signature::new(n, m);
        let tau = evolve_moment_matrix(&Seed::delta_origin(sig), &TimeSet::primary(sig), 4).tau(Tail::Unknown);
        let reports = full_sweep(&tau).unwrap();
        assert!(failing(&reports).is_empty(), "{sig}: {:?}", failing(&reports));
    }
}

#[test]
fn toda_bilinear_form_for_one_one() {
    let sig = Signature::new(1, 1);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let tau = random_moment_tau(sig, 4, &mut rng);
    let reports = residuals(&tau, &[Equation::primary(Family::LeftToda, 1)]).unwrap();
    assert!(all_pass(&reports));
    let (x, y) = (TimeVar::new(1, 0), TimeVar::new(0, 0));
    for n in 1..4 {
        let lhs = hirota_apply(&HirotaMonomial::pair(x, y), &tau.taus()[n], &tau.taus()[n]).unwrap();
        let rhs = (&tau.taus()[n + 1] * &tau.taus()[n - 1]).scale(&Q::from_integer(2.into()));
        assert_eq!(lhs, rhs);
    }
    // along one time the (1,1) tau depends on t_{1,0} + t_{0,0} only, giving D_1² τ_n·τ_n = 2 τ_{n+1} τ_{n−1}
    let seed = Seed::random(sig, 6, 1.0, &mut rng);
    let line = evolve_moment_matrix(&seed, &TimeSet::with_slots(sig, 1, 0), 4).tau(Tail::Unknown);
    for n in 1..4 {
        let t = line.taus();
        let lhs = hirota_apply(&HirotaMonomial::new([(x, 2)]).unwrap(), &t[n], &t[n]).unwrap();
        assert_eq!(lhs, (&t[n + 1] * &t[n - 1]).scale(&Q::from_integer(2.into())));
    }
}

#[test]
fn rational_two_three_full_sweep() {
    let sig = Signature::new(2, 3);
    for c in crate::tau_engine::k_set(sig, 4) {
        let tau = rational(2, 3, 4, c.m, c.n);
        let reports = full_sweep(&tau).unwrap();
        assert!(failing(&reports).is_empty(), "k={}: {:?}", c.k, failing(&reports));
    }
}

#[test]
fn k0_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let junk = random_sequence(Signature::new(2, 3), 3, &mut rng);
    assert!(all_pass(&k0_residuals(&junk, 0, 0).unwrap()));
    for (j, m, n) in [(3, 0, 0), (3, 0, 1), (4, 0, 0)] {
        assert!(all_pass(&k0_residuals(&rational(1, 2, j, m, n), 1, 0).unwrap()));
    }
    let tau = rational(2, 3, 4, 1, 2);
    for m in [-1, 1] {
        assert!(all_pass(&k0_residuals(&tau, 1, m).unwrap()), "m={m}");
    }
    let bad = k0_residuals(&junk, 1, 0).unwrap();
    assert!(!all_pass(&bad));
}

#[test]
fn perturbed_tau_is_caught() {
    let tau = rational(1, 2, 3, 0, 0);
    assert!(all_pass(&full_sweep(&tau).unwrap()));
    let vars = tau.vars().clone();
    let bumped = &tau.taus()[2] + &crate::polytime::MultiPoly::variable(vars, TimeVar::new(1, 0));
    let broken = tau.with_tau(2, bumped).unwrap();
    let reports = primary_residuals(&broken).unwrap();
    let bad: Vec<_> = reports.iter().filter(|r| !r.passes()).collect();
    assert!(!bad.is_empty());
    let json = bad[0].to_json();
    assert!(!json.passes && json.leading_monomial.is_some() && json.terms > 0);
    let text = serde_json::to_string(&json).unwrap();
    let back: ResidualReportJson = serde_json::from_str(&text).unwrap();
    assert_eq!(back, json);
    let ok = reports.iter().find(|r| r.passes()).unwrap().to_json();
    assert!(ok.leading_monomial.is_none());
}

#[test]
fn relabel_correspondence() {
    let vacuum = TauSequence::vacuum(Signature::new(1, 1), TimeSet::primary(Signature::new(1, 1)), 3, Tail::Unknown);
    assert!(nm_mn_relabel_check(&vacuum, &vacuum.mirrored()).unwrap());
    for (n, m, j) in [(1, 2, 3), (1, 2, 4), (2, 3, 4)] {
        let tau = rational(n, m, j, 0, 0);
        let mirror = tau.mirrored();
        assert_eq!(mirror.sig, Signature::new(m, n));
        assert!(all_pass(&primary_residuals(&tau).unwrap()));
        assert!(all_pass(&primary_residuals(&mirror).unwrap()));
        assert!(nm_mn_relabel_check(&tau, &mirror).unwrap());
    }
}

#[test]
fn range_and_time_errors() {
    let sig = Signature::new(2, 3);
    let short = TauSequence::vacuum(sig, TimeSet::primary(sig), 0, Tail::Unknown);
    assert!(matches!(primary_residuals(&short), Err(HirotaCheckError::InsufficientRange { .. })));
    let thin = TauSequence::vacuum(sig, TimeSet::with_slots(sig, 1, 1), 3, Tail::Unknown);
    assert!(matches!(primary_residuals(&thin), Err(HirotaCheckError::MissingTime { .. })));
    let tau = rational(2, 3, 4, 0, 0);
    assert!(matches!(
        residuals(&tau, &[Equation::primary(Family::LeftKp, 3)]),
        Err(HirotaCheckError::BadEquation { .. })
    ));
    assert!(matches!(k0_residuals(&tau, 2, 0), Err(HirotaCheckError::BadEquation { .. })));
    // a zero tail allows one index past the end
    let sites = admissible_sites(&Equation::primary(Family::RightBacklund, 0), &tau);
    assert_eq!(sites, vec![0, 1, 2, 3, 4]);
}

fn mirror_equation(eq: &Equation) -> Equation {
    let family = match eq.family {
        Family::RightBacklund => Family::LeftBacklund,
        Family::RightKp => Family::LeftKp,
        Family::RightToda => Family::LeftToda,
        Family::LeftToda => Family::RightToda,
        Family::LeftKp => Family::RightKp,
        Family::LeftBacklund => Family::RightBacklund,
        Family::K0 => Family::K0,
    };
    Equation::primary(family, 1 - eq.gamma)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn residuals_commute_with_relabelling(seed in any::<u64>(), n in 1u32..=3, m in 1u32..=3) {
        let sig = Signature::new(n, m);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = random_sequence(sig, 3, &mut rng);
        let mirror = tau.mirrored();
        for eq in Equation::all_primary(sig) {
            let other = mirror_equation(&eq);
            for site in admissible_sites(&eq, &tau) {
                let a = residual(&eq, Variant::LITERAL, &tau, site).unwrap();
                let b = residual(&other, Variant::LITERAL, &mirror, site).unwrap();
                let a = a.relabel(TimeVar::mirrored).embed(mirror.vars()).unwrap();
                prop_assert_eq!(a, b, "{} at n={}", eq, site);
            }
        }
    }

    #[test]
    fn moment_taus_close_the_sweep(seed in any::<u64>(), which in 0usize..3) {
        let sig = [Signature::new(1, 1), Signature::new(1, 2), Signature::new(2, 2)][which];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = random_moment_tau(sig, 3, &mut rng);
        let reports = full_sweep(&tau).unwrap();
        prop_assert!(failing(&reports).is_empty(), "{:?}", failing(&reports));
    }
}
