use crate::{Side, Signature, Q};
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

/// A hierarchy time `t_{γ,n}`.
///
/// Ordered lexicographically on `(n, γ)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeVar {
    pub gamma: i32,
    pub n: u32,
}

impl Ord for TimeVar {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.n, self.gamma).cmp(&(other.n, other.gamma))
    }
}

impl PartialOrd for TimeVar {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for TimeVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t[{},{}]", self.gamma, self.n)
    }
}

impl TimeVar {
    pub const fn new(gamma: i32, n: u32) -> Self {
        TimeVar { gamma, n }
    }

    pub fn side(self) -> Side {
        if self.gamma >= 1 {
            Side::L
        } else {
            Side::R
        }
    }

    pub fn is_valid(self, sig: Signature) -> bool {
        sig.gamma_range().contains(&self.gamma)
    }

    /// Position `j` of this time in the generating function of its side.
    ///
    /// On the `L` side `j = N(n+1) − α + 1`, on the `R` side `j = M(n+1) + β`.
    /// Every positive `j` is hit exactly once per side, and the hatted
    /// derivative along this time carries weight `1/j`.
    pub fn slot(self, sig: Signature) -> u32 {
        match self.side() {
            Side::L => (sig.n * (self.n + 1) + 1) - self.gamma as u32,
            Side::R => ((sig.m * (self.n + 1)) as i32 + self.gamma) as u32,
        }
    }

    /// Inverse of [`TimeVar::slot`].
    pub fn from_slot(side: Side, j: u32, sig: Signature) -> TimeVar {
        assert!(j >= 1, "slots start at 1");
        match side {
            Side::L => {
                let n = (j - 1) / sig.n;
                TimeVar { gamma: (sig.n * (n + 1) + 1 - j) as i32, n }
            }
            Side::R => {
                let n = (j - 1) / sig.m;
                TimeVar { gamma: j as i32 - (sig.m * (n + 1)) as i32, n }
            }
        }
    }

    /// Homogeneous degree under `deg t_{1,0} = deg t_{0,0} = MN`.
    pub fn degree(self, sig: Signature) -> u64 {
        let j = self.slot(sig) as u64;
        match self.side() {
            Side::L => j * sig.m as u64,
            Side::R => j * sig.n as u64,
        }
    }

    /// The relabelling `t_{γ,n} → t_{1−γ,n}` exchanging the two sides.
    pub fn mirrored(self) -> TimeVar {
        TimeVar { gamma: 1 - self.gamma, n: self.n }
    }
}

/// A time variable together with its generating-function slot and weight.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedVar {
    pub var: TimeVar,
    pub slot: u32,
    pub weight: Q,
}

/// How the slots of a chain are weighted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Slot `j` holds `t_j` itself, as in the moment-matrix Schur factors.
    Plain,
    /// Slot `j` holds `t_j / j`, as in the hatted derivative sets.
    Hatted,
}

/// The finite set of active times: slots `1..=l_slots` on the `L` side and
/// `1..=r_slots` on the `R` side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeSet {
    pub sig: Signature,
    pub l_slots: u32,
    pub r_slots: u32,
}

impl TimeSet {
    /// Only the primary times `t_{γ,0}`.
    pub fn primary(sig: Signature) -> Self {
        TimeSet { sig, l_slots: sig.n, r_slots: sig.m }
    }

    /// All times with level `n ≤ max_level`.
    pub fn with_levels(sig: Signature, max_level: u32) -> Self {
        TimeSet { sig, l_slots: sig.n * (max_level + 1), r_slots: sig.m * (max_level + 1) }
    }

    pub fn with_slots(sig: Signature, l_slots: u32, r_slots: u32) -> Self {
        TimeSet { sig, l_slots, r_slots }
    }

    /// Enough slots to evaluate every Lax entry of a `size × size` window.
    pub fn for_lax(sig: Signature, size: u32) -> Self {
        let w = sig.n + sig.m;
        let l = (size.saturating_sub(1) + sig.n).max(w);
        let r = (size.saturating_sub(1) + sig.m).max(w);
        TimeSet { sig, l_slots: l, r_slots: r }
    }

    pub fn slots(&self, side: Side) -> u32 {
        match side {
            Side::L => self.l_slots,
            Side::R => self.r_slots,
        }
    }

    /// The sorted variable list.
    pub fn vars(&self) -> Arc<[TimeVar]> {
        let mut v: Vec<TimeVar> = (1..=self.l_slots)
            .map(|j| TimeVar::from_slot(Side::L, j, self.sig))
            .chain((1..=self.r_slots).map(|j| TimeVar::from_slot(Side::R, j, self.sig)))
            .collect();
        v.sort();
        v.into()
    }

    /// Slots of one side, in increasing order, with the requested weights.
    pub fn chain(&self, side: Side, weighting: Weighting) -> Vec<WeightedVar> {
        (1..=self.slots(side))
            .map(|j| WeightedVar {
                var: TimeVar::from_slot(side, j, self.sig),
                slot: j,
                weight: match weighting {
                    Weighting::Plain => Q::one(),
                    Weighting::Hatted => Q::new(1.into(), j.into()),
                },
            })
            .collect()
    }

    /// The set after `t_{γ,n} → t_{1−γ,n}`, read in the swapped signature.
    pub fn mirrored(&self) -> TimeSet {
        TimeSet { sig: self.sig.swapped(), l_slots: self.r_slots, r_slots: self.l_slots }
    }

    pub fn covers(&self, side: Side, slot: u32) -> bool {
        slot <= self.slots(side)
    }
}

/// Values for some of the times; absent times read as zero.
pub type TimePoint = BTreeMap<TimeVar, Q>;
