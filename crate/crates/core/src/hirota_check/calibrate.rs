use super::family::{admissible_sites, residual, Equation, Family, Variant};
use super::HirotaCheckError;
use crate::polytime::{MultiPoly, TimePoint, TimeSet};
use crate::tau_engine::{evolve_moment_matrix, seed_moment_matrix, Seed, Tail, TauSequence};
use crate::{Signature, Q};
use num_traits::Zero;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The convention each family is evaluated in, as fixed by [`calibrate_family`].
pub const FROZEN: [(Family, Variant); 7] = [
    (Family::RightBacklund, Variant::LITERAL),
    (Family::RightKp, Variant::LITERAL),
    (Family::RightToda, Variant::LITERAL),
    (Family::LeftToda, Variant::LITERAL),
    (Family::LeftKp, Variant::LITERAL),
    (Family::LeftBacklund, Variant::LITERAL),
    (Family::K0, Variant::LITERAL),
];

pub fn frozen_variant(eq: &Equation) -> Variant {
    FROZEN.iter().find(|(f, _)| *f == eq.family).map(|(_, v)| *v).expect("every family is frozen")
}

/// Moment-matrix tau `τ_0..=τ_size` over the primary times from a random
/// integer seed with nonzero leading minors at `t = 0`.
pub fn random_moment_tau(sig: Signature, size: usize, rng: &mut impl Rng) -> TauSequence {
    let times = TimeSet::primary(sig);
    let level = (((size.max(1) - 1) / sig.n as usize) * sig.m as usize + size.max(1) - 1) as u64;
    let zero = TimePoint::new();
    loop {
        let seed = Seed::random(sig, level, 0.8, rng);
        let m0 = seed_moment_matrix(&seed, &times, size);
        if m0.tau(Tail::Unknown).eval(&zero).iter().all(|v| !v.is_zero()) {
            return evolve_moment_matrix(&seed, &times, size).tau(Tail::Unknown);
        }
    }
}

/// `τ_0 = 1` followed by random quadratics in the primary times; solves nothing.
pub fn random_sequence(sig: Signature, len: usize, rng: &mut impl Rng) -> TauSequence {
    let times = TimeSet::primary(sig);
    let vars = times.vars();
    let mut taus = vec![MultiPoly::one(vars.clone())];
    for _ in 0..len {
        let mut p = MultiPoly::constant(vars.clone(), Q::from_integer(rng.gen_range(1i64..=5).into()));
        for (i, &v) in vars.iter().enumerate() {
            let x = MultiPoly::variable(vars.clone(), v);
            p.add_scaled(&x, &Q::from_integer(rng.gen_range(-3i64..=3).into()));
            for &w in &vars[i..] {
                let y = MultiPoly::variable(vars.clone(), w);
                p.add_scaled(&(&x * &y), &Q::from_integer(rng.gen_range(-2i64..=2).into()));
            }
        }
        taus.push(p);
    }
    TauSequence::new(sig, times, taus, Tail::Unknown).expect("primary variables")
}

/// Outcome of calibrating one equation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Calibration {
    pub equation: Equation,
    /// Variants whose residual vanishes on every sample, in bit order.
    pub vanishing: Vec<Variant>,
    /// Whether all vanishing variants give the same residual up to sign on a
    /// sequence that solves nothing.
    pub equivalent: bool,
}

impl Calibration {
    pub fn chosen(&self) -> Option<Variant> {
        if self.equivalent {
            self.vanishing.first().copied()
        } else {
            None
        }
    }
}

fn vanishes(eq: &Equation, v: Variant, tau: &TauSequence) -> Result<bool, HirotaCheckError> {
    for n in admissible_sites(eq, tau) {
        if !residual(eq, v, tau, n)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs every variant of `eq` on the given solutions and compares the survivors
/// on `control`.
pub fn calibrate(eq: &Equation, samples: &[TauSequence], control: &TauSequence) -> Result<Calibration, HirotaCheckError> {
    let mut vanishing = Vec::new();
    for v in Variant::all() {
        let mut ok = true;
        for tau in samples.iter().filter(|t| eq.validate(t.sig).is_ok()) {
            if !vanishes(eq, v, tau)? {
                ok = false;
                break;
            }
        }
        if ok {
            vanishing.push(v);
        }
    }
    let mut equivalent = !vanishing.is_empty();
    if let Some(&first) = vanishing.first() {
        for n in admissible_sites(eq, control) {
            let base = residual(eq, first, control, n)?;
            for &v in &vanishing[1..] {
                let r = residual(eq, v, control, n)?;
                if r != base && r != -&base {
                    equivalent = false;
                }
            }
        }
    }
    Ok(Calibration { equation: *eq, vanishing, equivalent })
}

/// Calibration samples: moment-matrix taus for `(1,1)`, `(2,2)` and `(2,3)`
/// from a fixed generator, with a non-solution control per signature.
pub fn calibration_samples(size: usize) -> Vec<(Signature, Vec<TauSequence>, TauSequence)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7d0a);
    [(1, 1), (2, 2), (2, 3)]
        .into_iter()
        .map(|(n, m)| {
            let sig = Signature::new(n, m);
            let samples = (0..2).map(|_| random_moment_tau(sig, size, &mut rng)).collect();
            let control = random_sequence(sig, size, &mut rng);
            (sig, samples, control)
        })
        .collect()
}

/// Outcome of calibrating a whole family across signatures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyCalibration {
    pub family: Family,
    /// Variants vanishing for every member of the family on every sample.
    pub vanishing: Vec<Variant>,
    /// Whether the survivors agree up to sign on every control.
    pub equivalent: bool,
}

impl FamilyCalibration {
    pub fn chosen(&self) -> Option<Variant> {
        if self.equivalent {
            self.vanishing.first().copied()
        } else {
            None
        }
    }
}

fn members(family: Family, sig: Signature) -> Vec<Equation> {
    if family == Family::K0 {
        Equation::all_k0()
    } else {
        Equation::all_primary(sig).into_iter().filter(|e| e.family == family).collect()
    }
}

/// Intersects the vanishing variants of every member of `family` over the
/// sample groups, then checks the survivors against each control.
pub fn calibrate_family(
    family: Family,
    groups: &[(Signature, Vec<TauSequence>, TauSequence)],
) -> Result<FamilyCalibration, HirotaCheckError> {
    let mut vanishing: Vec<Variant> = Variant::all().to_vec();
    for (sig, samples, control) in groups {
        for eq in members(family, *sig) {
            let c = calibrate(&eq, samples, control)?;
            vanishing.retain(|v| c.vanishing.contains(v));
        }
    }
    let mut equivalent = !vanishing.is_empty();
    if let Some(&first) = vanishing.first() {
        for (sig, _, control) in groups {
            for eq in members(family, *sig) {
                for n in admissible_sites(&eq, control) {
                    let base = residual(&eq, first, control, n)?;
                    for &v in &vanishing[1..] {
                        let r = residual(&eq, v, control, n)?;
                        if r != base && r != -&base {
                            equivalent = false;
                        }
                    }
                }
            }
        }
    }
    Ok(FamilyCalibration { family, vanishing, equivalent })
}
