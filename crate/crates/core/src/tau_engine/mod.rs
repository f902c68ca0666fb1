//! Tau sequences from moment matrices and rational constructions, with the
//! Lax entries, dressing matrices and wave pairings they determine.

mod dressing;
mod lax;
mod moment;
mod rational;
mod seed;
mod series;
mod tau;
mod wave;


pub use dressing::{dressing_at_point, dressing_matrices, lu_factor, DressingMatrices, DressingReport, DressingValues, LuFactors};
pub use lax::{lax_from_tau, lax_from_tau_at_point, lax_left, u_from_tau, LaxMatrix, LaxPointCheck, RationalFn};
pub use moment::{evolve_moment_matrix, moment_at_point, rational_det, seed_moment_matrix, tau_from_minors, MomentMatrix};
pub use rational::{
    check_params, double_wronskian, k_set, k_value, pbar_table, rational_tau, young_decomposition, young_sign,
    young_sum, DegreeDiagram, KChoice,
};
pub use seed::{ClassKey, Seed};
pub use tau::{Tail, TauSequence, TauSequenceJson};
pub use wave::{wave_pairing, WavePairing};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TauError {
    #[error("class residue {residue} is not below N = {n}")]
    BadClass { residue: u32, n: u32 },
    #[error("seed gives two different values to class (residue {residue}, level {level})")]
    OverDetermined { residue: u32, level: u64 },
    #[error("tau polynomial uses variables outside the declared time set")]
    ForeignVariables,
    #[error("tau sequence must start with tau_0 = 1")]
    TauZeroNotOne,
    #[error("tau index {index} outside 0..={last}")]
    IndexOutOfRange { index: i64, last: usize },
    #[error("invalid signature ({n}, {m})")]
    BadSignature { n: u32, m: u32 },
    #[error("cannot parse tau_{index}: {message}")]
    Parse { index: usize, message: String },
    #[error("tau_{index} vanishes where it is used as a denominator")]
    ZeroTau { index: usize },
    #[error("left and right Lax formulas disagree at entry ({i}, {j})")]
    LaxMismatch { i: usize, j: usize },
    #[error("time set too small: need {need_l} left and {need_r} right slots")]
    InsufficientTimes { need_l: u32, need_r: u32 },
    #[error("Lax entry ({i}, {j}) outside the band is nonzero")]
    BandViolation { i: usize, j: usize },
    #[error("parameter out of range: {reason}")]
    ParamOutOfRange { reason: String },
}
