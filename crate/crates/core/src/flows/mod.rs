//! Lax flows `∂L/∂t_{γ,n} = [(B_{γ,n})_+, L]` or `−[(B_{γ,n})_−, L]` on a periodic
//! lattice: the generic right-hand side through fractional roots, the
//! hand-written finite systems, RK4 integration and flow monitors.

mod generic;
mod integrate;
mod special;
#[cfg(test)]
mod tests;

pub use generic::{commutativity_check, lax_rhs_generic, FlowSpec, GenericRhs};
pub use integrate::{
    integrate, integrate_state, richardson_ratio, rk4_step, traces, FlowState, Monitors, Richardson, System, Trajectory,
};
pub use special::{
    bm21_t10, bm21_t20, bm21_t20_bar, bth12_rhs, bth22_rhs, toda11, Bm21Fields, Bth12Flow, Bth22Flow, Special,
};

use crate::lattice_ops::LatticeError;
use crate::Signature;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FlowError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("t[{gamma},{n}] is not a flow of signature {sig}")]
    BadFlow { gamma: i32, n: u32, sig: Signature },
    #[error("{system} needs signature {expected}, the state has {found}")]
    WrongSignature { system: String, expected: Signature, found: Signature },
    #[error("{field} must be positive, found {value} at site {site}")]
    NonPositive { field: String, site: usize, value: f64 },
    #[error("{system} needs an auxiliary field")]
    MissingAux { system: String },
    #[error("auxiliary field is inconsistent with the Lax coefficients: defect {defect:e} > {tol:e}")]
    AuxInconsistent { defect: f64, tol: f64 },
    #[error("monitor {name} reached {value:e} at step {step}, above tolerance {tol:e}")]
    MonitorBreach { name: String, step: usize, value: f64, tol: f64 },
    #[error("time step must be positive and finite, found {0}")]
    BadStep(f64),
    #[error("state became non-finite at step {step}")]
    NonFinite { step: usize },
}
