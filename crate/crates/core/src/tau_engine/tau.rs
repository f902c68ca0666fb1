use super::TauError;
use crate::polytime::{parse_poly, MultiPoly, TimePoint, TimeSet, TimeVar};
use crate::{Signature, Q};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// What is known about `τ_s` beyond the stored range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tail {
    /// `τ_s = 0` for every `s > T`.
    Zero,
    /// Values beyond `T` were not computed.
    Unknown,
}

/// `τ_0, …, τ_T` over a fixed set of times, with `τ_0 = 1` and `τ_s = 0` for `s < 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauSequence {
    pub sig: Signature,
    pub times: TimeSet,
    taus: Vec<MultiPoly>,
    pub tail: Tail,
}

impl TauSequence {
    pub fn new(sig: Signature, times: TimeSet, taus: Vec<MultiPoly>, tail: Tail) -> Result<Self, TauError> {
        let vars = times.vars();
        let taus = taus
            .into_iter()
            .map(|t| t.embed(&vars).ok_or(TauError::ForeignVariables))
            .collect::<Result<Vec<_>, _>>()?;
        match taus.first() {
            Some(t) if t.is_one() => {}
            _ => return Err(TauError::TauZeroNotOne),
        }
        Ok(TauSequence { sig, times, taus, tail })
    }

    /// `τ_s = 1` for `s = 0..=len`.
    pub fn vacuum(sig: Signature, times: TimeSet, len: usize, tail: Tail) -> Self {
        let one = MultiPoly::one(times.vars());
        TauSequence { sig, times, taus: vec![one; len + 1], tail }
    }

    /// Largest stored index `T`.
    pub fn last(&self) -> usize {
        self.taus.len() - 1
    }

    pub fn vars(&self) -> &Arc<[TimeVar]> {
        self.taus[0].vars()
    }

    pub fn taus(&self) -> &[MultiPoly] {
        &self.taus
    }

    /// `τ_i`, including the conventions for `i < 0` and for a zero tail.
    pub fn get(&self, i: i64) -> Option<MultiPoly> {
        if i < 0 {
            return Some(MultiPoly::zero(self.vars().clone()));
        }
        match self.taus.get(i as usize) {
            Some(t) => Some(t.clone()),
            None if self.tail == Tail::Zero => Some(MultiPoly::zero(self.vars().clone())),
            None => None,
        }
    }

    /// Indices `s ≤ T` with `τ_s` identically zero.
    pub fn degenerate_indices(&self) -> Vec<usize> {
        self.taus.iter().enumerate().filter(|(_, t)| t.is_zero()).map(|(i, _)| i).collect()
    }

    pub fn eval(&self, point: &TimePoint) -> Vec<Q> {
        self.taus.iter().map(|t| t.eval(point)).collect()
    }

    /// Same polynomials after `t_{γ,n} → t_{1−γ,n}`, read in signature `(M, N)`.
    pub fn mirrored(&self) -> TauSequence {
        let times = self.times.mirrored();
        let vars = times.vars();
        let taus = self
            .taus
            .iter()
            .map(|t| t.relabel(TimeVar::mirrored).embed(&vars).expect("mirrored set covers mirrored variables"))
            .collect();
        TauSequence { sig: self.sig.swapped(), times, taus, tail: self.tail }
    }

    /// Replaces one entry, keeping everything else; used for perturbation tests.
    pub fn with_tau(&self, i: usize, tau: MultiPoly) -> Result<TauSequence, TauError> {
        let mut taus = self.taus.clone();
        *taus.get_mut(i).ok_or(TauError::IndexOutOfRange { index: i as i64, last: self.last() })? = tau;
        TauSequence::new(self.sig, self.times, taus, self.tail)
    }

    pub fn to_json(&self) -> TauSequenceJson {
        TauSequenceJson {
            n: self.sig.n,
            m: self.sig.m,
            l_slots: self.times.l_slots,
            r_slots: self.times.r_slots,
            tail: self.tail,
            taus: self.taus.iter().map(|t| t.to_string()).collect(),
        }
    }

    pub fn from_json(j: &TauSequenceJson) -> Result<TauSequence, TauError> {
        let sig = Signature::try_new(j.n, j.m).ok_or(TauError::BadSignature { n: j.n, m: j.m })?;
        let times = TimeSet::with_slots(sig, j.l_slots, j.r_slots);
        let vars = times.vars();
        let taus = j
            .taus
            .iter()
            .enumerate()
            .map(|(i, s)| parse_poly(s, &vars).map_err(|e| TauError::Parse { index: i, message: e.to_string() }))
            .collect::<Result<Vec<_>, _>>()?;
        if taus.is_empty() {
            return Err(TauError::TauZeroNotOne);
        }
        TauSequence::new(sig, times, taus, j.tail)
    }
}

/// Serialized tau sequence; each polynomial in canonical text form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauSequenceJson {
    #[serde(rename = "N")]
    pub n: u32,
    #[serde(rename = "M")]
    pub m: u32,
    pub l_slots: u32,
    pub r_slots: u32,
    pub tail: Tail,
    pub taus: Vec<String>,
}
