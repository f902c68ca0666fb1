use super::HirotaCheckError;
use crate::polytime::{hirota_apply, schur_hirota_apply, HirotaMonomial, MultiPoly, TimeVar, Weighting};
use crate::tau_engine::TauSequence;
use crate::{Side, Signature, Q};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The bilinear families checked on tau sequences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `(D_{β,0} − P_{M+β}(D̂_R)) τ_{n+1}∘τ_n = 0`.
    RightBacklund,
    /// `(D_{β,0} D_{−M+1,0} − 2 P_{M+β+1}(D̂_R)) τ_n∘τ_n = 0`.
    RightKp,
    /// `D_{β,0} D_{N,0} τ_n∘τ_n = 2 P_{M+β−1}(D̂_R) τ_{n+1}∘τ_{n−1}`.
    RightToda,
    /// `D_{α,0} D_{−M+1,0} τ_n∘τ_n = 2 P_{N−α}(D̂_L) τ_{n+1}∘τ_{n−1}`.
    LeftToda,
    /// `(D_{α,0} D_{N,0} − 2 P_{N−α+2}(D̂_L)) τ_n∘τ_n = 0`.
    LeftKp,
    /// `(D_{α,0} − P_{N−α+1}(D̂_L)) τ_{n+1}∘τ_n = 0`.
    LeftBacklund,
    /// `P_{Nr+m}(D̂_L) τ_{n−m+1}∘τ_n = P_{Mr−m}(D̂_R) τ_{n+1}∘τ_{n−m}`.
    K0,
}

impl Family {
    pub const PRIMARY: [Family; 6] = [
        Family::RightBacklund,
        Family::RightKp,
        Family::RightToda,
        Family::LeftToda,
        Family::LeftKp,
        Family::LeftBacklund,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RightBacklund => "right_backlund",
            Family::RightKp => "right_kp",
            Family::RightToda => "right_toda",
            Family::LeftToda => "left_toda",
            Family::LeftKp => "left_kp",
            Family::LeftBacklund => "left_backlund",
            Family::K0 => "k0",
        }
    }

    /// Side whose time index `α` or `β` parametrizes the family.
    pub fn side(self) -> Option<Side> {
        match self {
            Family::RightBacklund | Family::RightKp | Family::RightToda => Some(Side::R),
            Family::LeftToda | Family::LeftKp | Family::LeftBacklund => Some(Side::L),
            Family::K0 => None,
        }
    }
}

/// One member of a family: the family with its time index or `(r, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Equation {
    pub family: Family,
    /// `α` for left families, `β` for right families, `0` for `K0`.
    pub gamma: i32,
    pub r: u32,
    pub m: i32,
}

impl Equation {
    pub fn primary(family: Family, gamma: i32) -> Equation {
        Equation { family, gamma, r: 0, m: 0 }
    }

    pub fn k0(r: u32, m: i32) -> Equation {
        Equation { family: Family::K0, gamma: 0, r, m }
    }

    /// Every primary-family equation of a signature.
    pub fn all_primary(sig: Signature) -> Vec<Equation> {
        let mut out = Vec::new();
        for f in Family::PRIMARY {
            let range: Vec<i32> = match f.side() {
                Some(Side::L) => (1..=sig.n as i32).collect(),
                _ => (-(sig.m as i32) + 1..=0).collect(),
            };
            out.extend(range.into_iter().map(|g| Equation::primary(f, g)));
        }
        out
    }

    /// `K0` with `r ∈ {0, 1}`, `m ∈ {−1, 0, 1}`.
    pub fn all_k0() -> Vec<Equation> {
        (0..=1).flat_map(|r| (-1..=1).map(move |m| Equation::k0(r, m))).collect()
    }

    /// Display id; the `r = 1` members of `K0` carry their own names.
    pub fn id(&self) -> String {
        match (self.family, self.r, self.m) {
            (Family::K0, 1, 0) => "beta01".into(),
            (Family::K0, 1, -1) => "beta02".into(),
            (Family::K0, 1, 1) => "beta03".into(),
            (Family::K0, r, m) => format!("k0_r{r}_m{m}"),
            (f, _, _) => f.name().into(),
        }
    }

    pub fn validate(&self, sig: Signature) -> Result<(), HirotaCheckError> {
        let ok = match self.family.side() {
            Some(Side::L) => (1..=sig.n as i32).contains(&self.gamma),
            Some(Side::R) => (-(sig.m as i32) + 1..=0).contains(&self.gamma),
            None => self.r <= 1 && (-1..=1).contains(&self.m),
        };
        if ok {
            Ok(())
        } else {
            Err(HirotaCheckError::BadEquation { id: self.id(), gamma: self.gamma, r: self.r, m: self.m })
        }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::K0 => write!(f, "{}(r={}, m={})", self.id(), self.r, self.m),
            Family::LeftToda | Family::LeftKp | Family::LeftBacklund => write!(f, "{}(alpha={})", self.id(), self.gamma),
            _ => write!(f, "{}(beta={})", self.id(), self.gamma),
        }
    }
}

/// Bilinear operator acting on an ordered pair of taus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Operator {
    /// Product of plain Hirota derivatives along the given `(side, slot)` times.
    Monomial(Vec<(Side, u32)>),
    /// `P_k(D̂)` on one side.
    Schur(Side, i64),
}

/// `scale · Op τ_{n+f}∘τ_{n+g}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub scale: i64,
    pub op: Operator,
    pub f: i64,
    pub g: i64,
}

/// Sign and ordering convention: swap the pair on either side, negate the right side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Variant {
    pub swap_lhs: bool,
    pub swap_rhs: bool,
    pub negate_rhs: bool,
}

impl Variant {
    pub const LITERAL: Variant = Variant { swap_lhs: false, swap_rhs: false, negate_rhs: false };

    pub fn all() -> [Variant; 8] {
        let mut out = [Variant::LITERAL; 8];
        for (bits, v) in out.iter_mut().enumerate() {
            *v = Variant { swap_lhs: bits & 1 != 0, swap_rhs: bits & 2 != 0, negate_rhs: bits & 4 != 0 };
        }
        out
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.swap_lhs {
            parts.push("swap_lhs");
        }
        if self.swap_rhs {
            parts.push("swap_rhs");
        }
        if self.negate_rhs {
            parts.push("negate_rhs");
        }
        if parts.is_empty() {
            f.write_str("literal")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

/// The two sides `lhs = rhs` of an equation, before any variant is applied.
pub fn sides(eq: &Equation, sig: Signature) -> (Term, Term) {
    let (n, m) = (sig.n as i64, sig.m as i64);
    let g = eq.gamma as i64;
    // slots: t_{β,0} ↦ M + β on R, t_{α,0} ↦ N − α + 1 on L; t_{N,0} and t_{−M+1,0} are slot 1
    let beta = (Side::R, (m + g) as u32);
    let alpha = (Side::L, (n - g + 1) as u32);
    let (l1, r1) = ((Side::L, 1), (Side::R, 1));
    let t = |scale, op, f, g| Term { scale, op, f, g };
    match eq.family {
        Family::RightBacklund => (t(1, Operator::Monomial(vec![beta]), 1, 0), t(1, Operator::Schur(Side::R, m + g), 1, 0)),
        Family::RightKp => (t(1, Operator::Monomial(vec![beta, r1]), 0, 0), t(2, Operator::Schur(Side::R, m + g + 1), 0, 0)),
        Family::RightToda => (t(1, Operator::Monomial(vec![beta, l1]), 0, 0), t(2, Operator::Schur(Side::R, m + g - 1), 1, -1)),
        Family::LeftToda => (t(1, Operator::Monomial(vec![alpha, r1]), 0, 0), t(2, Operator::Schur(Side::L, n - g), 1, -1)),
        Family::LeftKp => (t(1, Operator::Monomial(vec![alpha, l1]), 0, 0), t(2, Operator::Schur(Side::L, n - g + 2), 0, 0)),
        Family::LeftBacklund => (t(1, Operator::Monomial(vec![alpha]), 1, 0), t(1, Operator::Schur(Side::L, n - g + 1), 1, 0)),
        Family::K0 => {
            let (r, mm) = (eq.r as i64, eq.m as i64);
            (
                t(1, Operator::Schur(Side::L, n * r + mm), 1 - mm, 0),
                t(1, Operator::Schur(Side::R, m * r - mm), 1, -mm),
            )
        }
    }
}

/// Tau indices read by an equation at site `n`.
pub fn indices(eq: &Equation, sig: Signature, n: i64) -> Vec<i64> {
    let (l, r) = sides(eq, sig);
    vec![n + l.f, n + l.g, n + r.f, n + r.g]
}

fn apply_term(term: &Term, swap: bool, tau: &TauSequence, n: i64) -> Result<MultiPoly, HirotaCheckError> {
    let (fi, gi) = if swap { (n + term.g, n + term.f) } else { (n + term.f, n + term.g) };
    let get = |i: i64| tau.get(i).ok_or(HirotaCheckError::IndexOutOfRange { index: i, last: tau.last() });
    let (f, g) = (get(fi)?, get(gi)?);
    let sig = tau.sig;
    let value = match &term.op {
        Operator::Monomial(factors) => {
            let vars: Vec<(TimeVar, u32)> =
                factors.iter().map(|&(side, slot)| (TimeVar::from_slot(side, slot, sig), 1)).collect();
            for (v, _) in &vars {
                if !tau.times.covers(v.side(), v.slot(sig)) {
                    return Err(HirotaCheckError::MissingTime { var: v.to_string() });
                }
            }
            let mono = HirotaMonomial::new(vars).expect("positive multiplicities");
            hirota_apply(&mono, &f, &g).map_err(|e| HirotaCheckError::Hirota(e.to_string()))?
        }
        Operator::Schur(side, k) => {
            let have = tau.times.slots(*side) as i64;
            // a missing top slot only enters as D̂_k alone, which vanishes on f∘f
            let need = if fi == gi { *k - 1 } else { *k };
            if need > have {
                return Err(HirotaCheckError::MissingTime {
                    var: TimeVar::from_slot(*side, need as u32, sig).to_string(),
                });
            }
            let chain = tau.times.chain(*side, Weighting::Hatted);
            schur_hirota_apply(*k, &f, &g, &chain).map_err(|e| HirotaCheckError::Hirota(e.to_string()))?
        }
    };
    Ok(value.scale(&Q::from_integer(term.scale.into())))
}

/// `lhs − (±rhs)` at site `n` under a convention variant.
pub fn residual(eq: &Equation, variant: Variant, tau: &TauSequence, n: i64) -> Result<MultiPoly, HirotaCheckError> {
    let (l, r) = sides(eq, tau.sig);
    let lhs = apply_term(&l, variant.swap_lhs, tau, n)?;
    let rhs = apply_term(&r, variant.swap_rhs, tau, n)?;
    Ok(if variant.negate_rhs { &lhs + &rhs } else { &lhs - &rhs })
}

/// Sites `n ≥ 0` whose indices are all known: stored, negative, or inside a zero tail
/// no further than one step past the end.
pub fn admissible_sites(eq: &Equation, tau: &TauSequence) -> Vec<i64> {
    let limit = tau.last() as i64 + if tau.tail == crate::tau_engine::Tail::Zero { 1 } else { 0 };
    (0..=limit + 1).filter(|&n| indices(eq, tau.sig, n).iter().all(|&i| i <= limit)).collect()
}
