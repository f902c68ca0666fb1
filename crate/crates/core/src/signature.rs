//! The pair (N, M) fixing the band shape of the Lax operator.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Band shape: `n` diagonals above the main one, `m` below.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Signature {
    pub n: u32,
    pub m: u32,
}

/// Which family of times a variable or operator belongs to.
///
/// `L` carries the times `t_{α,n}` with `1 ≤ α ≤ N`; `R` carries `t_{β,n}`
/// with `−M+1 ≤ β ≤ 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    L,
    R,
}

impl Signature {
    /// Panics if either entry is zero; use [`Signature::try_new`] for input data.
    pub fn new(n: u32, m: u32) -> Self {
        Self::try_new(n, m).expect("signature entries must be positive")
    }

    pub fn try_new(n: u32, m: u32) -> Option<Self> {
        (n >= 1 && m >= 1).then_some(Signature { n, m })
    }

    /// The signature with the roles of the two sides exchanged.
    pub fn swapped(self) -> Self {
        Signature { n: self.m, m: self.n }
    }

    pub fn gcd(self) -> u32 {
        num_integer::gcd(self.n, self.m)
    }

    /// Divides both entries by their gcd.
    pub fn reduced(self) -> Self {
        let g = self.gcd();
        Signature { n: self.n / g, m: self.m / g }
    }

    pub fn is_coprime(self) -> bool {
        self.gcd() == 1
    }

    /// Admissible `γ` range `[−M+1, N]`.
    pub fn gamma_range(self) -> std::ops::RangeInclusive<i32> {
        (1 - self.m as i32)..=(self.n as i32)
    }

    /// Number of independent primary flows, `N + M − 1`.
    pub fn primary_flow_count(self) -> u32 {
        self.n + self.m - 1
    }

    /// Width of the side: `N` for `L`, `M` for `R`.
    pub fn width(self, side: Side) -> u32 {
        match side {
            Side::L => self.n,
            Side::R => self.m,
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.n, self.m)
    }
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}
