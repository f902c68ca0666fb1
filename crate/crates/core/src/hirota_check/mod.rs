//! Exact residuals of the primary bilinear equations and of the `k = 0`
//! coefficient identities on a tau sequence.

mod calibrate;
mod family;
#[cfg(test)]
mod tests;

pub use calibrate::{calibrate, calibrate_family, calibration_samples, frozen_variant, random_moment_tau, random_sequence, Calibration, FamilyCalibration, FROZEN};
pub use family::{admissible_sites, indices, residual, sides, Equation, Family, Operator, Term, Variant};

use crate::polytime::MultiPoly;
use crate::tau_engine::TauSequence;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HirotaCheckError {
    #[error("equation {id} is not defined for gamma={gamma}, r={r}, m={m}")]
    BadEquation { id: String, gamma: i32, r: u32, m: i32 },
    #[error("tau index {index} is beyond the stored range 0..={last}")]
    IndexOutOfRange { index: i64, last: usize },
    #[error("time {var} is needed but not among the tau variables")]
    MissingTime { var: String },
    #[error("no site n has all its tau indices in range for {id}")]
    InsufficientRange { id: String },
    #[error("Hirota evaluation failed: {0}")]
    Hirota(String),
}

/// Residual of one equation at one site.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualReport {
    pub equation: Equation,
    pub n: i64,
    pub residual: MultiPoly,
}

impl ResidualReport {
    pub fn id(&self) -> String {
        self.equation.id()
    }

    pub fn passes(&self) -> bool {
        self.residual.is_zero()
    }

    pub fn to_json(&self) -> ResidualReportJson {
        let e = &self.equation;
        let (alpha, beta, r, m) = match e.family.side() {
            Some(crate::Side::L) => (Some(e.gamma), None, None, None),
            Some(crate::Side::R) => (None, Some(e.gamma), None, None),
            None => (None, None, Some(e.r), Some(e.m)),
        };
        ResidualReportJson {
            id: self.id(),
            n: self.n,
            alpha,
            beta,
            r,
            m,
            passes: self.passes(),
            terms: self.residual.num_terms(),
            leading_monomial: self.residual.leading_term().map(|(e, c)| {
                MultiPoly::from_terms(self.residual.vars().clone(), [(e, c)]).to_string()
            }),
        }
    }
}

/// Serialized form of a [`ResidualReport`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReportJson {
    pub id: String,
    pub n: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i32>,
    pub passes: bool,
    pub terms: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub leading_monomial: Option<String>,
}

/// Residuals of the given equations at every admissible site, in the frozen
/// convention, sorted by `(equation, n)`.
pub fn residuals(tau: &TauSequence, equations: &[Equation]) -> Result<Vec<ResidualReport>, HirotaCheckError> {
    let mut jobs = Vec::new();
    for eq in equations {
        eq.validate(tau.sig)?;
        let sites = admissible_sites(eq, tau);
        if sites.is_empty() {
            return Err(HirotaCheckError::InsufficientRange { id: eq.to_string() });
        }
        jobs.extend(sites.into_iter().map(|n| (*eq, n)));
    }
    let mut out = jobs
        .into_par_iter()
        .map(|(eq, n)| {
            let residual = residual(&eq, frozen_variant(&eq), tau, n)?;
            Ok(ResidualReport { equation: eq, n, residual })
        })
        .collect::<Result<Vec<_>, HirotaCheckError>>()?;
    out.sort_by_key(|a| (a.equation, a.n));
    Ok(out)
}

/// The six primary families for every `α ∈ [1, N]` and `β ∈ [−M+1, 0]`.
pub fn primary_residuals(tau: &TauSequence) -> Result<Vec<ResidualReport>, HirotaCheckError> {
    residuals(tau, &Equation::all_primary(tau.sig))
}

/// `P_{Nr+m}(D̂_L) τ_{n−m+1}∘τ_n = P_{Mr−m}(D̂_R) τ_{n+1}∘τ_{n−m}` at every admissible site.
pub fn k0_residuals(tau: &TauSequence, r: u32, m: i32) -> Result<Vec<ResidualReport>, HirotaCheckError> {
    residuals(tau, &[Equation::k0(r, m)])
}

/// Primary families together with every `k = 0` identity with `r ∈ {0, 1}`, `m ∈ {−1, 0, 1}`.
pub fn full_sweep(tau: &TauSequence) -> Result<Vec<ResidualReport>, HirotaCheckError> {
    let mut eqs = Equation::all_primary(tau.sig);
    eqs.extend(Equation::all_k0());
    residuals(tau, &eqs)
}

pub fn all_pass(reports: &[ResidualReport]) -> bool {
    reports.iter().all(ResidualReport::passes)
}

/// True unless the primary residuals of `tau_nm` all vanish while those of
/// `tau_mn`, read in the swapped signature, do not.
pub fn nm_mn_relabel_check(tau_nm: &TauSequence, tau_mn: &TauSequence) -> Result<bool, HirotaCheckError> {
    let nm = all_pass(&primary_residuals(tau_nm)?);
    if !nm {
        return Ok(true);
    }
    Ok(all_pass(&primary_residuals(tau_mn)?))
}
