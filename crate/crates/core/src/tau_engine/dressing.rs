use super::lax::RationalFn;
use super::seed::Seed;
use super::series::shifted_taus;
use super::tau::TauSequence;
use super::TauError;
use crate::polytime::{schur_derivatives, MultiPoly, TimePoint, TimeSet, Weighting};
use crate::{Side, Signature, Q};
use num_traits::{One, Zero};

/// The four triangular dressing matrices on a `size × size` window, 0-based.
///
/// `P̃_L` and `P̃_L⁻¹` are unit lower triangular, `P̃_R` and `P̃_R⁻¹` upper
/// triangular. Entries outside the triangle are zero.
#[derive(Clone, Debug)]
pub struct DressingMatrices {
    pub sig: Signature,
    pub size: usize,
    pub pl: Vec<Vec<RationalFn>>,
    pub pl_inv: Vec<Vec<RationalFn>>,
    pub pr: Vec<Vec<RationalFn>>,
    pub pr_inv: Vec<Vec<RationalFn>>,
}

/// Exact comparison of the dressing matrices at a point against the identities
/// they satisfy and against a moment matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DressingReport {
    pub left_identity_mismatches: usize,
    pub right_identity_mismatches: usize,
    pub factorization_mismatches: usize,
    pub lu_mismatches: usize,
    /// Rows of `P̃_L Λ^N P̃_L⁻¹` that do not depend on truncation.
    pub lax_rows: usize,
}

impl DressingReport {
    pub fn is_clean(&self) -> bool {
        self.left_identity_mismatches == 0
            && self.right_identity_mismatches == 0
            && self.factorization_mismatches == 0
            && self.lu_mismatches == 0
    }
}

/// `A = L U` with `L` unit lower triangular.
#[derive(Clone, Debug, PartialEq)]
pub struct LuFactors {
    pub lower: Vec<Vec<Q>>,
    pub upper: Vec<Vec<Q>>,
}

/// Doolittle factorization without pivoting; fails on a zero leading minor.
pub fn lu_factor(a: &[Vec<Q>]) -> Result<LuFactors, TauError> {
    let n = a.len();
    let mut lower = vec![vec![Q::zero(); n]; n];
    let mut upper = vec![vec![Q::zero(); n]; n];
    for i in 0..n {
        for j in i..n {
            let s: Q = (0..i).map(|k| &lower[i][k] * &upper[k][j]).sum();
            upper[i][j] = &a[i][j] - s;
        }
        if upper[i][i].is_zero() {
            return Err(TauError::ZeroTau { index: i + 1 });
        }
        lower[i][i] = Q::one();
        for r in (i + 1)..n {
            let s: Q = (0..i).map(|k| &lower[r][k] * &upper[k][i]).sum();
            lower[r][i] = (&a[r][i] - s) / &upper[i][i];
        }
    }
    Ok(LuFactors { lower, upper })
}

fn zero_fn(vars: &MultiPoly) -> RationalFn {
    RationalFn { num: MultiPoly::zero(vars.vars().clone()), den: MultiPoly::one(vars.vars().clone()) }
}

/// Builds the dressing matrices from `τ_0..τ_size`:
///
/// `(P̃_L)_{r,r−k} = P_k(−∂̂_L) τ_r / τ_r`,
/// `(P̃_L⁻¹)_{r,c} = P_{r−c}(∂̂_L) τ_{c+1} / τ_{c+1}`,
/// `(P̃_R)_{r,c} = P_{c−r}(∂̂_R) τ_{r+1} / τ_r`,
/// `(P̃_R⁻¹)_{r,c} = P_{c−r}(−∂̂_R) τ_c / τ_{c+1}`.
pub fn dressing_matrices(tau: &TauSequence, size: usize) -> Result<DressingMatrices, TauError> {
    if size > tau.last() {
        return Err(TauError::ParamOutOfRange {
            reason: format!("window {size} exceeds the last stored tau index {}", tau.last()),
        });
    }
    let need = (size as u32).saturating_sub(1);
    if tau.times.l_slots < need || tau.times.r_slots < need {
        return Err(TauError::InsufficientTimes { need_l: need, need_r: need });
    }
    let t = tau.taus();
    if let Some(index) = t[..=size].iter().position(|p| p.is_zero()) {
        return Err(TauError::ZeroTau { index });
    }
    let kmax = size.saturating_sub(1);
    let lchain = tau.times.chain(Side::L, Weighting::Hatted);
    let rchain = tau.times.chain(Side::R, Weighting::Hatted);
    let table = |s: usize, side: Side, negate: bool| -> Vec<MultiPoly> {
        let chain = if side == Side::L { &lchain } else { &rchain };
        schur_derivatives(&t[s], chain, kmax, negate)
    };
    let z = zero_fn(&t[0]);
    let mut pl = vec![vec![z.clone(); size]; size];
    let mut pl_inv = pl.clone();
    let mut pr = pl.clone();
    let mut pr_inv = pl.clone();
    for r in 0..size {
        let lneg = table(r, Side::L, true);
        for c in 0..=r {
            pl[r][c] = RationalFn { num: lneg[r - c].clone(), den: t[r].clone() };
        }
        let rpos = table(r + 1, Side::R, false);
        for c in r..size {
            pr[r][c] = RationalFn { num: rpos[c - r].clone(), den: t[r].clone() };
        }
    }
    for c in 0..size {
        let lpos = table(c + 1, Side::L, false);
        for r in c..size {
            pl_inv[r][c] = RationalFn { num: lpos[r - c].clone(), den: t[c + 1].clone() };
        }
        let rneg = table(c, Side::R, true);
        for r in 0..=c {
            pr_inv[r][c] = RationalFn { num: rneg[c - r].clone(), den: t[c + 1].clone() };
        }
    }
    Ok(DressingMatrices { sig: tau.sig, size, pl, pl_inv, pr, pr_inv })
}

fn eval_matrix(m: &[Vec<RationalFn>], point: &TimePoint) -> Result<Vec<Vec<Q>>, TauError> {
    m.iter()
        .map(|row| row.iter().map(|a| a.eval(point).ok_or(TauError::ZeroTau { index: 0 })).collect())
        .collect()
}

fn mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let n = a.len();
    (0..n).map(|i| (0..n).map(|j| (0..n).map(|k| &a[i][k] * &b[k][j]).sum()).collect()).collect()
}

fn mismatches(a: &[Vec<Q>], b: &[Vec<Q>]) -> usize {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).filter(|(p, q)| p != q).count()).sum()
}

fn identity(n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

/// The four matrices at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct DressingValues {
    pub pl: Vec<Vec<Q>>,
    pub pl_inv: Vec<Vec<Q>>,
    pub pr: Vec<Vec<Q>>,
    pub pr_inv: Vec<Vec<Q>>,
}

impl DressingMatrices {
    pub fn eval(&self, point: &TimePoint) -> Result<DressingValues, TauError> {
        Ok(DressingValues {
            pl: eval_matrix(&self.pl, point)?,
            pl_inv: eval_matrix(&self.pl_inv, point)?,
            pr: eval_matrix(&self.pr, point)?,
            pr_inv: eval_matrix(&self.pr_inv, point)?,
        })
    }

    /// Checks `P̃_L P̃_L⁻¹ = I`, `P̃_R P̃_R⁻¹ = I`, `M = P̃_L⁻¹ P̃_R` and the LU
    /// factors of `M` at `point`, where `moment` is `M(point)` on the window.
    pub fn check(&self, point: &TimePoint, moment: &[Vec<Q>]) -> Result<DressingReport, TauError> {
        let mut report = self.eval(point)?.check(moment)?;
        report.lax_rows = self.size.saturating_sub(self.sig.n as usize);
        Ok(report)
    }
}

impl DressingValues {
    /// `P̃_L Λ^N P̃_L⁻¹` on rows `0..size−N`, 0-based.
    pub fn lax_rows(&self, n: usize) -> Vec<Vec<Q>> {
        let size = self.pl.len();
        (0..size.saturating_sub(n))
            .map(|r| {
                (0..size)
                    .map(|c| (0..=r).filter(|k| k + n < size).map(|k| &self.pl[r][k] * &self.pl_inv[k + n][c]).sum())
                    .collect()
            })
            .collect()
    }
}

/// The dressing matrices of the moment-matrix tau of `seed`, evaluated at
/// `point` through the shifts `τ(t ± [z])`.
pub fn dressing_at_point(seed: &Seed, size: usize, point: &TimePoint) -> Result<DressingValues, TauError> {
    let times = TimeSet::primary(seed.sig);
    let order = size.saturating_sub(1);
    let taus = |side: Side, negate: bool| shifted_taus(seed, &times, size, point, side, negate, order);
    let (lp, ln, rp, rn) = (taus(Side::L, false), taus(Side::L, true), taus(Side::R, false), taus(Side::R, true));
    let t: Vec<Q> = lp.iter().map(|s| s[0].clone()).collect();
    if let Some(index) = t.iter().position(|v| v.is_zero()) {
        return Err(TauError::ZeroTau { index });
    }
    let mut v = DressingValues {
        pl: vec![vec![Q::zero(); size]; size],
        pl_inv: vec![vec![Q::zero(); size]; size],
        pr: vec![vec![Q::zero(); size]; size],
        pr_inv: vec![vec![Q::zero(); size]; size],
    };
    for r in 0..size {
        for c in 0..size {
            if c <= r {
                v.pl[r][c] = &ln[r][r - c] / &t[r];
                v.pl_inv[r][c] = &lp[c + 1][r - c] / &t[c + 1];
            } else {
                v.pr[r][c] = &rp[r + 1][c - r] / &t[r];
                v.pr_inv[r][c] = &rn[c][c - r] / &t[c + 1];
            }
            if c == r {
                v.pr[r][c] = &rp[r + 1][0] / &t[r];
                v.pr_inv[r][c] = &rn[c][0] / &t[c + 1];
            }
        }
    }
    Ok(v)
}

impl DressingValues {
    /// Same checks as [`DressingMatrices::check`] on already evaluated matrices.
    pub fn check(&self, moment: &[Vec<Q>]) -> Result<DressingReport, TauError> {
        let size = self.pl.len();
        let id = identity(size);
        let window: Vec<Vec<Q>> = moment[..size].iter().map(|r| r[..size].to_vec()).collect();
        let lu = lu_factor(&window)?;
        Ok(DressingReport {
            left_identity_mismatches: mismatches(&mul(&self.pl, &self.pl_inv), &id),
            right_identity_mismatches: mismatches(&mul(&self.pr, &self.pr_inv), &id),
            factorization_mismatches: mismatches(&mul(&self.pl_inv, &self.pr), &window),
            lu_mismatches: mismatches(&lu.lower, &self.pl_inv) + mismatches(&lu.upper, &self.pr),
            lax_rows: 0,
        })
    }
}
