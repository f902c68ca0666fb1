//! Band difference operators `Σ_d c_d(x) Λ^d` on a finite periodic lattice.
//!
//! Coefficients are generic over [`Scalar`]: exact rationals for identity
//! checks and `f64` for flow integration. Logarithms and exponentials, needed
//! only for the lower root `L^{1/M}`, are restricted to [`Real`].

mod band;
mod field;
mod roots;
mod scalar;
mod solve;

pub use band::{BandOperator, BandOperatorJson, Part};
pub use field::{shift_values, Lattice, LatticeField};
pub use roots::{
    b_operator, flow_depth, lower_root_leading, mth_root_lower, mth_root_lower_with_leading, nth_root_upper,
    projection_dagger_check, Truncated, Window,
};
pub use scalar::{Real, Scalar, F64_PIVOT_TOL};
pub use solve::{band_solve, dense_mul, dense_solve, nonlocal_solve, ConstLaurent, DenseLu, KernelSolver, SingularMatrix};

use crate::{Signature, Q};
use rand::Rng;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LatticeError {
    #[error("lattice size {0} is below the minimum of 3")]
    TooSmall(usize),
    #[error("lattice spacing {0} must be positive and finite")]
    BadSpacing(f64),
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("operators live on different lattices ({left:?} vs {right:?})")]
    Mismatch { left: Lattice, right: Lattice },
    #[error("offset {offset} lies outside the band [{lo}, {hi}]")]
    OffsetOutOfBand { offset: i32, lo: i32, hi: i32 },
    #[error("diagonal key {0:?} is not an integer offset")]
    BadOffsetKey(String),
    #[error(
        "kernel {kernel} is singular on P = {p}: its symbol vanishes at Λ = exp(2πik/{p}) for k in {modes:?}"
    )]
    SingularKernel { kernel: String, p: usize, modes: Vec<usize> },
    #[error("variable-coefficient operator is singular at elimination step {step}")]
    SingularOperator { step: usize },
    #[error("leading coefficient at offset {offset} must be identically 1")]
    NotMonic { offset: i32 },
    #[error("lowest coefficient at offset {offset} is missing")]
    MissingLowest { offset: i32 },
    #[error("lowest coefficient must be positive, found {value} at site {site}")]
    NonPositive { site: usize, value: f64 },
    #[error("supplied leading root coefficient does not reproduce the lowest Lax coefficient")]
    InconsistentLeading,
    #[error("t[{gamma},{n}] is not a flow of this signature")]
    BadFlow { gamma: i32, n: u32 },
}

/// Random Lax operator with coefficients uniform in `[−amp, amp]`.
///
/// With `positive_lowest`, `u_{−M}` is drawn from `[0.5, 1.5]` instead.
pub fn random_lax_f64(lat: Lattice, sig: Signature, amp: f64, positive_lowest: bool, rng: &mut impl Rng) -> BandOperator<f64> {
    let m = sig.m as i32;
    let u = (-m..sig.n as i32)
        .map(|i| {
            let v: Vec<f64> = (0..lat.p)
                .map(|_| if i == -m && positive_lowest { rng.gen_range(0.5..1.5) } else { rng.gen_range(-amp..amp) })
                .collect();
            (i, v)
        })
        .collect::<Vec<_>>();
    BandOperator::lax(lat, sig, u).expect("offsets are in band")
}

/// Random Lax operator with small-integer-over-small-denominator coefficients.
pub fn random_lax_q(lat: Lattice, sig: Signature, rng: &mut impl Rng) -> BandOperator<Q> {
    let m = sig.m as i32;
    let u = (-m..sig.n as i32)
        .map(|i| (i, (0..lat.p).map(|_| random_q(rng)).collect::<Vec<Q>>()))
        .collect::<Vec<_>>();
    BandOperator::lax(lat, sig, u).expect("offsets are in band")
}

/// A random rational `a/b` with `|a| ≤ 5`, `1 ≤ b ≤ 4`.
pub fn random_q(rng: &mut impl Rng) -> Q {
    Q::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=4).into())
}

/// Random band operator with offsets in `[lo, hi]`.
pub fn random_band_f64(lat: Lattice, lo: i32, hi: i32, rng: &mut impl Rng) -> BandOperator<f64> {
    BandOperator::from_diagonals(lat, (lo..=hi).map(|d| (d, (0..lat.p).map(|_| rng.gen_range(-1.0..1.0)).collect())))
        .expect("lengths match the lattice")
}

/// Random exact band operator with offsets in `[lo, hi]`.
pub fn random_band_q(lat: Lattice, lo: i32, hi: i32, rng: &mut impl Rng) -> BandOperator<Q> {
    BandOperator::from_diagonals(lat, (lo..=hi).map(|d| (d, (0..lat.p).map(|_| random_q(rng)).collect())))
        .expect("lengths match the lattice")
}

#[cfg(test)]
mod tests;
