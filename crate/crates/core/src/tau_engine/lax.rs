use super::seed::Seed;
use super::series::{bilinear_at, shifted_taus};
use super::tau::TauSequence;
use super::TauError;
use crate::polytime::{bilinear_from_tables, schur_derivatives, MultiPoly, TimePoint, TimeSet, Weighting};
use crate::{Side, Signature, Q};
use num_traits::Zero;
use rayon::prelude::*;

/// Quotient of two polynomials over the same variables; never reduced.
#[derive(Clone, Debug)]
pub struct RationalFn {
    pub num: MultiPoly,
    pub den: MultiPoly,
}

impl RationalFn {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    /// Equality by cross-multiplication, skipped when the denominators coincide.
    pub fn equals(&self, other: &RationalFn) -> bool {
        if self.den == other.den {
            return self.num == other.num;
        }
        &self.num * &other.den == &other.num * &self.den
    }

    /// `None` where the denominator vanishes.
    pub fn eval(&self, point: &TimePoint) -> Option<Q> {
        let d = self.den.eval(point);
        if d.is_zero() {
            None
        } else {
            Some(self.num.eval(point) / d)
        }
    }
}

impl PartialEq for RationalFn {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

/// Lax entries `a_{i,j}`, `1 ≤ i, j ≤ size`, stored 0-based.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxMatrix {
    pub sig: Signature,
    pub size: usize,
    pub entries: Vec<Vec<RationalFn>>,
}

impl LaxMatrix {
    /// `a_{i,j}` with 1-based indices.
    pub fn get(&self, i: usize, j: usize) -> &RationalFn {
        &self.entries[i - 1][j - 1]
    }

    pub fn eval(&self, point: &TimePoint) -> Vec<Vec<Option<Q>>> {
        self.entries.iter().map(|r| r.iter().map(|a| a.eval(point)).collect()).collect()
    }
}

/// Schur derivative tables `P_a(±∂̂) τ_s` for one side.
struct SideTables {
    pos: Vec<Vec<MultiPoly>>,
    neg: Vec<Vec<MultiPoly>>,
}

impl SideTables {
    fn new(taus: &[MultiPoly], times: &TimeSet, side: Side, kmax: usize) -> Self {
        let chain = times.chain(side, Weighting::Hatted);
        let (pos, neg) = taus
            .par_iter()
            .map(|t| (schur_derivatives(t, &chain, kmax, false), schur_derivatives(t, &chain, kmax, true)))
            .unzip();
        SideTables { pos, neg }
    }

    /// `P_k(D̂) τ_f ∘ τ_g`.
    fn bilinear(&self, k: i64, f: usize, g: usize) -> MultiPoly {
        if k < 0 {
            return MultiPoly::zero(self.pos[0][0].vars().clone());
        }
        bilinear_from_tables(k as usize, &self.pos[f], &self.neg[g])
    }
}

fn check_window(tau: &TauSequence, size: usize) -> Result<(), TauError> {
    if size > tau.last() {
        return Err(TauError::ParamOutOfRange {
            reason: format!("Lax window {size} exceeds the last stored tau index {}", tau.last()),
        });
    }
    let need_l = (size as u32).saturating_sub(1) + tau.sig.n;
    let need_r = (size as u32).saturating_sub(1) + tau.sig.m;
    if tau.times.l_slots < need_l || tau.times.r_slots < need_r {
        return Err(TauError::InsufficientTimes { need_l, need_r });
    }
    Ok(())
}

fn check_denominators(tau: &TauSequence, upto: usize) -> Result<(), TauError> {
    match tau.taus()[..upto].iter().position(|t| t.is_zero()) {
        Some(index) => Err(TauError::ZeroTau { index }),
        None => Ok(()),
    }
}

fn numerators(tau: &TauSequence, size: usize, side: Side) -> Vec<Vec<MultiPoly>> {
    let (n, m) = (tau.sig.n as i64, tau.sig.m as i64);
    let kmax = (size as i64 - 1 + n.max(m)) as usize;
    let tables = SideTables::new(&tau.taus()[..=size], &tau.times, side, kmax);
    (1..=size)
        .into_par_iter()
        .map(|i| {
            (1..=size)
                .map(|j| {
                    let (ii, jj) = (i as i64, j as i64);
                    match side {
                        Side::L => tables.bilinear(ii - jj + n, j, i - 1),
                        Side::R => tables.bilinear(jj - ii + m, i, j - 1),
                    }
                })
                .collect()
        })
        .collect()
}

fn assemble(tau: &TauSequence, size: usize, nums: Vec<Vec<MultiPoly>>) -> LaxMatrix {
    let t = tau.taus();
    let entries = nums
        .into_iter()
        .enumerate()
        .map(|(i0, row)| {
            row.into_iter()
                .enumerate()
                .map(|(j0, num)| RationalFn { num, den: &t[i0] * &t[j0 + 1] })
                .collect()
        })
        .collect();
    LaxMatrix { sig: tau.sig, size, entries }
}

/// `a_{i,j}` from both tau formulas
/// `P_{i−j+N}(D̂_L) τ_j∘τ_{i−1}` and `P_{j−i+M}(D̂_R) τ_i∘τ_{j−1}`, each over
/// `τ_{i−1} τ_j`. The two must agree exactly and the result must lie in the
/// band `−M ≤ j − i ≤ N`.
pub fn lax_from_tau(tau: &TauSequence, size: usize) -> Result<LaxMatrix, TauError> {
    check_window(tau, size)?;
    check_denominators(tau, size + 1)?;
    let left = numerators(tau, size, Side::L);
    let right = numerators(tau, size, Side::R);
    let (n, m) = (tau.sig.n as i64, tau.sig.m as i64);
    for i in 0..size {
        for j in 0..size {
            if left[i][j] != right[i][j] {
                let off = j as i64 - i as i64;
                return Err(if off > n || off < -m {
                    TauError::BandViolation { i: i + 1, j: j + 1 }
                } else {
                    TauError::LaxMismatch { i: i + 1, j: j + 1 }
                });
            }
        }
    }
    Ok(assemble(tau, size, left))
}

/// The left formula alone, without the cross-check.
pub fn lax_left(tau: &TauSequence, size: usize) -> Result<LaxMatrix, TauError> {
    check_window(tau, size)?;
    check_denominators(tau, size + 1)?;
    Ok(assemble(tau, size, numerators(tau, size, Side::L)))
}

/// `u_i` at sites `j` with `u_i(j) = a_{j, j+i}`, for every site inside the window.
pub fn u_from_tau(tau: &TauSequence, i: i64, size: usize) -> Result<Vec<(usize, RationalFn)>, TauError> {
    let (n, m) = (tau.sig.n as i64, tau.sig.m as i64);
    if i > n || i < -m {
        return Err(TauError::ParamOutOfRange { reason: format!("u_{i} is outside the band −{m}..={n}") });
    }
    let lax = lax_from_tau(tau, size)?;
    Ok((1..=size as i64)
        .filter(|j| (1..=size as i64).contains(&(j + i)))
        .map(|j| (j as usize, lax.get(j as usize, (j + i) as usize).clone()))
        .collect())
}

/// Both Lax formulas evaluated at one point, exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct LaxPointCheck {
    pub left: Vec<Vec<Q>>,
    pub right: Vec<Vec<Q>>,
    pub mismatches: Vec<(usize, usize)>,
}

impl LaxPointCheck {
    pub fn agrees(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Evaluates both formulas at `point` from the moment matrix of `seed`,
/// through the shifts `τ(t ± [z])` on the relevant side.
pub fn lax_from_tau_at_point(seed: &Seed, size: usize, point: &TimePoint) -> Result<LaxPointCheck, TauError> {
    let sig = seed.sig;
    let times = TimeSet::primary(sig);
    let (n, m) = (sig.n as i64, sig.m as i64);
    let order = size - 1 + n.max(m) as usize;
    let side_values = |side: Side| -> Result<Vec<Vec<Q>>, TauError> {
        let plus = shifted_taus(seed, &times, size, point, side, false, order);
        let minus = shifted_taus(seed, &times, size, point, side, true, order);
        let vals: Vec<&Q> = plus.iter().map(|s| &s[0]).collect();
        if let Some(index) = vals.iter().position(|v| v.is_zero()) {
            return Err(TauError::ZeroTau { index });
        }
        Ok((1..=size)
            .map(|i| {
                (1..=size)
                    .map(|j| {
                        let (ii, jj) = (i as i64, j as i64);
                        let num = match side {
                            Side::L => bilinear_at(ii - jj + n, &plus[j], &minus[i - 1]),
                            Side::R => bilinear_at(jj - ii + m, &plus[i], &minus[j - 1]),
                        };
                        num / (vals[i - 1] * vals[j])
                    })
                    .collect()
            })
            .collect())
    };
    let left = side_values(Side::L)?;
    let right = side_values(Side::R)?;
    let mismatches = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .filter(|&(i, j)| left[i][j] != right[i][j])
        .map(|(i, j)| (i + 1, j + 1))
        .collect();
    Ok(LaxPointCheck { left, right, mismatches })
}
