use super::band::{BandOperator, Part};
use super::scalar::{Real, Scalar};
use super::solve::{band_solve, ConstLaurent, KernelSolver};
use super::LatticeError;
use crate::polytime::TimeVar;
use crate::{Side, Signature};
use serde::{Deserialize, Serialize};

/// Offsets on which a truncated series is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Window {
    AtLeast(i32),
    AtMost(i32),
}

impl Window {
    pub fn contains(self, d: i32) -> bool {
        match self {
            Window::AtLeast(k) => d >= k,
            Window::AtMost(k) => d <= k,
        }
    }
}

/// A truncated root or power together with its exact offset window.
#[derive(Clone, Debug, PartialEq)]
pub struct Truncated<S> {
    pub op: BandOperator<S>,
    pub window: Window,
    /// `true` for `L^{1/N}` powers, `false` for `L^{1/M}` powers.
    pub upper: bool,
    pub depth: u32,
    pub power: u32,
}

impl<S: Scalar> Truncated<S> {
    /// `root^j` with the window shrunk accordingly.
    pub fn pow(&self, j: u32) -> Truncated<S> {
        assert_eq!(self.power, 1, "powers are taken of the root itself");
        let d = self.depth as i32;
        let j_i = j as i32;
        let window = if self.upper { Window::AtLeast(j_i - 1 - d) } else { Window::AtMost(d + 1 - j_i) };
        Truncated { op: self.op.pow(j), window, upper: self.upper, depth: self.depth, power: j }
    }

    /// Largest coefficient of `self.op − target` inside the exact window.
    pub fn residual_against(&self, target: &BandOperator<S>) -> f64 {
        let diff = &self.op - target;
        diff.max_abs_where(|d| self.window.contains(d))
    }
}

fn check_leading<S: Scalar>(l: &BandOperator<S>, sig: Signature) -> Result<(), LatticeError> {
    let n = sig.n as i32;
    let ok = l.max_offset() == Some(n)
        && l.diagonal(n).is_some_and(|v| v.iter().all(|c| (c.clone() - S::one()).negligible(1.0)));
    if ok {
        Ok(())
    } else {
        Err(LatticeError::NotMonic { offset: n })
    }
}

/// `R = Λ + Σ_{k=0}^{depth} a_{−k} Λ^{−k}` with `R^N = L` on offsets `≥ N − 1 − depth`.
///
/// Each coefficient solves `(1 + Λ + … + Λ^{N−1}) a_{−m} = (L − R_partial^N)_{N−1−m}`,
/// which is singular exactly when `gcd(N, P) > 1`.
pub fn nth_root_upper<S: Scalar>(l: &BandOperator<S>, sig: Signature, depth: u32) -> Result<Truncated<S>, LatticeError> {
    check_leading(l, sig)?;
    let lat = l.lattice();
    let n = sig.n as i32;
    let mut r = BandOperator::shift(lat, 1);
    if sig.n == 1 {
        r = l.project(Part::Geq(-(depth as i32)));
    } else {
        let solver = KernelSolver::new(&ConstLaurent::geometric(sig.n, 1), lat)?;
        for m in 0..=depth as i32 {
            let target = n - 1 - m;
            let rn = r.pow(sig.n);
            let rhs: Vec<S> = l
                .diagonal_or_zero(target)
                .into_iter()
                .zip(rn.diagonal_or_zero(target))
                .map(|(a, b)| a - b)
                .collect();
            r.set_diagonal(-m, solver.solve(&rhs));
        }
    }
    Ok(Truncated { op: r, window: Window::AtLeast(n - 1 - depth as i32), upper: true, depth, power: 1 })
}

/// `S = Σ_{k=−1}^{depth} b_k Λ^k` with `S^M = L` on offsets `≤ depth + 1 − M`,
/// given the leading coefficient `b_{−1}`.
///
/// `b_{−1}` must satisfy `Π_{r<M} b_{−1}(x − r) = u_{−M}(x)`.
pub fn mth_root_lower_with_leading<S: Scalar>(
    l: &BandOperator<S>,
    sig: Signature,
    depth: u32,
    lead: Vec<S>,
) -> Result<Truncated<S>, LatticeError> {
    let lat = l.lattice();
    let m = sig.m as i32;
    if l.min_offset() != Some(-m) {
        return Err(LatticeError::MissingLowest { offset: -m });
    }
    let window = Window::AtMost(depth as i32 + 1 - m);
    let mut s = BandOperator::zero(lat);
    s.set_diagonal(-1, lead.clone());
    let check = s.pow(sig.m);
    let scale = l.max_abs().max(1.0);
    let u_low = l.diagonal_or_zero(-m);
    if check.diagonal_or_zero(-m).into_iter().zip(&u_low).any(|(a, b)| !(a - b.clone()).negligible(scale * 1e2)) {
        return Err(LatticeError::InconsistentLeading);
    }
    if sig.m == 1 {
        let op = l.project(Part::Leq(depth as i32));
        return Ok(Truncated { op, window, upper: false, depth, power: 1 });
    }
    let shifted = |k: i64| super::field::shift_values(&lead, k);
    for k in 0..=depth as i32 {
        // coefficient of b_k(x − p) Λ^{k−p} ... in S^M at offset −M + 1 + k
        let mut a = BandOperator::zero(lat);
        for p in 0..m {
            let mut c = vec![S::one(); lat.p];
            for r in 0..p {
                for (ci, v) in c.iter_mut().zip(shifted(-(r as i64))) {
                    *ci = ci.clone() * v;
                }
            }
            for r in 0..=(m - 2 - p) {
                for (ci, v) in c.iter_mut().zip(shifted((-p + k - r) as i64)) {
                    *ci = ci.clone() * v;
                }
            }
            a.set_diagonal(-p, c);
        }
        let target = -m + 1 + k;
        let sm = s.pow(sig.m);
        let rhs: Vec<S> =
            l.diagonal_or_zero(target).into_iter().zip(sm.diagonal_or_zero(target)).map(|(x, y)| x - y).collect();
        s.set_diagonal(k, band_solve(&a, &rhs)?);
    }
    Ok(Truncated { op: s, window, upper: false, depth, power: 1 })
}

/// `b_{−1} = exp((1 + Λ⁻¹ + … + Λ^{−(M−1)})⁻¹ log u_{−M})`.
pub fn lower_root_leading<S: Real>(l: &BandOperator<S>, sig: Signature) -> Result<Vec<S>, LatticeError> {
    let m = sig.m as i32;
    let u = l.diagonal(-m).ok_or(LatticeError::MissingLowest { offset: -m })?;
    if sig.m == 1 {
        return Ok(u.to_vec());
    }
    for (x, v) in u.iter().enumerate() {
        if !(*v > S::zero()) {
            return Err(LatticeError::NonPositive { site: x, value: v.to_f64() });
        }
    }
    let logs: Vec<S> = u.iter().map(|v| v.ln()).collect();
    let solver = KernelSolver::new(&ConstLaurent::geometric(sig.m, -1), l.lattice())?;
    Ok(solver.solve(&logs).into_iter().map(|v| v.exp()).collect())
}

/// `L^{1/M}` on the branch with positive leading coefficient.
pub fn mth_root_lower<S: Real>(l: &BandOperator<S>, sig: Signature, depth: u32) -> Result<Truncated<S>, LatticeError> {
    let lead = lower_root_leading(l, sig)?;
    mth_root_lower_with_leading(l, sig, depth, lead)
}

/// Power of the root defining `B_{γ,n}`: `R^j` for `γ ≥ 1`, `S^j` for `γ ≤ 0`,
/// where `j` is the slot of `t_{γ,n}`.
pub fn b_operator<S: Real>(l: &BandOperator<S>, flow: TimeVar, sig: Signature, depth: u32) -> Result<Truncated<S>, LatticeError> {
    if !flow.is_valid(sig) {
        return Err(LatticeError::BadFlow { gamma: flow.gamma, n: flow.n });
    }
    let j = flow.slot(sig);
    let root = match flow.side() {
        Side::L => nth_root_upper(l, sig, depth)?,
        Side::R => mth_root_lower(l, sig, depth)?,
    };
    Ok(root.pow(j))
}

/// Smallest root depth for which the projection used by `flow` is exact.
pub fn flow_depth(flow: TimeVar, sig: Signature) -> u32 {
    flow.slot(sig)
}

/// Checks `((A)_{≥k})† = (A†)_{≤−k}` exactly.
pub fn projection_dagger_check<S: Scalar>(a: &BandOperator<S>, k: i32) -> bool {
    a.project(Part::Geq(k)).dagger() == a.dagger().project(Part::Leq(-k))
}
