use super::FlowError;
use crate::lattice_ops::{b_operator, flow_depth, BandOperator, LatticeError, Part, Real};
use crate::polytime::TimeVar;
use crate::{Side, Signature};
use serde::{Deserialize, Serialize};
use std::fmt;

/// The flow `t_{γ,n}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FlowSpec {
    pub gamma: i32,
    pub n: u32,
}

impl FlowSpec {
    pub fn new(gamma: i32, n: u32) -> Self {
        FlowSpec { gamma, n }
    }

    pub fn var(self) -> TimeVar {
        TimeVar::new(self.gamma, self.n)
    }

    pub fn validate(self, sig: Signature) -> Result<TimeVar, FlowError> {
        if self.var().is_valid(sig) {
            Ok(self.var())
        } else {
            Err(FlowError::BadFlow { gamma: self.gamma, n: self.n, sig })
        }
    }

    /// Root depth at which the projection of `B_{γ,n}` is exact.
    pub fn depth(self, sig: Signature) -> u32 {
        flow_depth(self.var(), sig)
    }

    /// All primary flows `t_{γ,0}`.
    pub fn primaries(sig: Signature) -> Vec<FlowSpec> {
        sig.gamma_range().rev().map(|g| FlowSpec::new(g, 0)).collect()
    }
}

impl fmt::Display for FlowSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t[{},{}]", self.gamma, self.n)
    }
}

/// A generic right-hand side with the size of what fell outside the band.
#[derive(Clone, Debug, PartialEq)]
pub struct GenericRhs<S> {
    /// Offsets `−M..=N−1`.
    pub rhs: BandOperator<S>,
    /// Largest coefficient of the commutator outside `−M..=N−1`.
    pub leakage: f64,
}

/// `B_{γ,n}`: an integer power of `L` when the slot is a multiple of `N`
/// (resp. `M`), otherwise a power of the truncated root.
fn b_op<S: Real>(l: &BandOperator<S>, var: TimeVar, sig: Signature, depth: u32) -> Result<BandOperator<S>, LatticeError> {
    let j = var.slot(sig);
    let width = sig.width(var.side());
    if j.is_multiple_of(width) {
        return Ok(l.pow(j / width));
    }
    Ok(b_operator(l, var, sig, depth)?.op)
}

/// `[(B_{α,n})_+, L]` or `−[(B_{β,n})_−, L]`, projected onto the Lax band.
pub fn lax_rhs_generic<S: Real>(
    l: &BandOperator<S>,
    flow: FlowSpec,
    sig: Signature,
    depth: u32,
) -> Result<GenericRhs<S>, FlowError> {
    let var = flow.validate(sig)?;
    let (n, m) = (sig.n as i32, sig.m as i32);
    if l.max_offset() != Some(n) {
        return Err(LatticeError::NotMonic { offset: n }.into());
    }
    if l.diagonals().all(|(_, v)| v.iter().all(|x| *x == v[0])) {
        // constant coefficients commute with every power of L
        return Ok(GenericRhs { rhs: BandOperator::zero(l.lattice()), leakage: 0.0 });
    }
    let b = b_op(l, var, sig, depth)?;
    let c = match var.side() {
        Side::L => b.project(Part::Plus).op_mul(l)?.op_sub(&l.op_mul(&b.project(Part::Plus))?)?,
        Side::R => {
            let bm = b.project(Part::Minus);
            l.op_mul(&bm)?.op_sub(&bm.op_mul(l)?)?
        }
    };
    let leakage = c.max_abs_where(|d| d < -m || d > n - 1);
    Ok(GenericRhs { rhs: c.project(Part::Geq(-m)).project(Part::Leq(n - 1)), leakage })
}

/// `‖∂_A ∂_B L − ∂_B ∂_A L‖_∞` by five-point centred differences of the
/// generic vector fields with step `h`.
pub fn commutativity_check(
    l: &BandOperator<f64>,
    a: FlowSpec,
    b: FlowSpec,
    sig: Signature,
    h: f64,
) -> Result<f64, FlowError> {
    if a == b {
        return Ok(0.0);
    }
    let field = |f: FlowSpec, x: &BandOperator<f64>| lax_rhs_generic(x, f, sig, f.depth(sig)).map(|r| r.rhs);
    let directional = |outer: FlowSpec, along: &BandOperator<f64>| -> Result<BandOperator<f64>, FlowError> {
        let at = |k: f64| field(outer, &l.op_add(&along.scale(&(k * h)))?);
        let near = at(1.0)?.op_sub(&at(-1.0)?)?;
        let far = at(2.0)?.op_sub(&at(-2.0)?)?;
        Ok(near.scale(&8.0).op_sub(&far)?.scale(&(1.0 / (12.0 * h))))
    };
    let fa = field(a, l)?;
    let fb = field(b, l)?;
    let ab = directional(b, &fa)?;
    let ba = directional(a, &fb)?;
    Ok(ab.op_sub(&ba)?.max_abs())
}
