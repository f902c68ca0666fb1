use super::seed::Seed;
use super::tau::{Tail, TauSequence};
use crate::polytime::{poly_det, schur_table, MultiPoly, TimePoint, TimeSet, TimeVar, Weighting};
use crate::{Side, Signature, Q};
use num_traits::{One, Zero};
use std::sync::Arc;

/// Truncated `T × T` moment matrix `M(t) = U(t) M0 V(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentMatrix {
    pub sig: Signature,
    pub times: TimeSet,
    pub vars: Arc<[TimeVar]>,
    pub entries: Vec<Vec<MultiPoly>>,
}

/// Schur factors along one side: symbolic over `vars`, or numbers at a point.
fn side_table(times: &TimeSet, side: Side, kmax: usize, vars: &Arc<[TimeVar]>, at: Option<&TimePoint>) -> Vec<MultiPoly> {
    let chain = times.chain(side, Weighting::Plain);
    match at {
        None => schur_table(kmax, &chain, vars),
        Some(point) => {
            let own = crate::polytime::chain_vars(&chain);
            schur_table(kmax, &chain, &own).iter().map(|p| MultiPoly::constant(vars.clone(), p.eval(point))).collect()
        }
    }
}

/// `M_{a,b} = Σ_{k,l} P_k(x) P_l(y) M0_{a+k, b+l}`, with the left times `x`
/// and right times `y` either symbolic or fixed at a point.
pub(crate) fn build(
    seed: &Seed,
    times: &TimeSet,
    size: usize,
    fix_l: Option<&TimePoint>,
    fix_r: Option<&TimePoint>,
) -> MomentMatrix {
    let sig = seed.sig;
    let mut free: Vec<TimeVar> = Vec::new();
    if fix_l.is_none() {
        free.extend(times.chain(Side::L, Weighting::Plain).iter().map(|w| w.var));
    }
    if fix_r.is_none() {
        free.extend(times.chain(Side::R, Weighting::Plain).iter().map(|w| w.var));
    }
    free.sort();
    let vars: Arc<[TimeVar]> = free.into();
    let support = seed.support();
    let amax = support.iter().map(|e| e.0 as usize).max().unwrap_or(0);
    let bmax = support.iter().map(|e| e.1 as usize).max().unwrap_or(0);
    let px = side_table(times, Side::L, amax, &vars, fix_l);
    let py = side_table(times, Side::R, bmax, &vars, fix_r);
    let zero = MultiPoly::zero(vars.clone());
    // row stage: N_{a, b'} = Σ_{a'} P_{a'−a}(x) M0_{a', b'}
    let mut rows: Vec<Vec<MultiPoly>> = vec![vec![zero.clone(); bmax + 1]; size];
    for (a, row) in rows.iter_mut().enumerate() {
        for (ap, bp, v) in &support {
            let ap = *ap as usize;
            if ap >= a {
                let term = px[ap - a].scale(v);
                row[*bp as usize] += &term;
            }
        }
    }
    let mut entries = vec![vec![zero.clone(); size]; size];
    for a in 0..size {
        for b in 0..size {
            let mut acc = zero.clone();
            for (bp, nv) in rows[a].iter().enumerate().skip(b) {
                if !nv.is_zero() && !py[bp - b].is_zero() {
                    acc.add_product(nv, &py[bp - b]);
                }
            }
            entries[a][b] = acc;
        }
    }
    MomentMatrix { sig, times: *times, vars, entries }
}

/// The matrix at `t = 0`, as constants over the variables of `times`.
pub fn seed_moment_matrix(seed: &Seed, times: &TimeSet, size: usize) -> MomentMatrix {
    let vars = times.vars();
    let entries = (0..size)
        .map(|a| (0..size).map(|b| MultiPoly::constant(vars.clone(), seed.value(a as u32, b as u32))).collect())
        .collect();
    MomentMatrix { sig: seed.sig, times: *times, vars, entries }
}

/// Symbolic evolution over every time in `times`.
pub fn evolve_moment_matrix(seed: &Seed, times: &TimeSet, size: usize) -> MomentMatrix {
    build(seed, times, size, None, None)
}

/// Entries at a time point; absent times read as zero.
pub fn moment_at_point(seed: &Seed, times: &TimeSet, size: usize, point: &TimePoint) -> Vec<Vec<Q>> {
    build(seed, times, size, Some(point), Some(point))
        .entries
        .into_iter()
        .map(|r| r.into_iter().map(|p| p.constant_term()).collect())
        .collect()
}

impl MomentMatrix {
    pub fn size(&self) -> usize {
        self.entries.len()
    }

    /// Positions where `M_{a+N, b} ≠ M_{a, b+M}` inside the window.
    pub fn staircase_violations(&self) -> Vec<(usize, usize)> {
        let (n, m) = (self.sig.n as usize, self.sig.m as usize);
        let t = self.size();
        let mut out = Vec::new();
        for a in 0..t.saturating_sub(n) {
            for b in 0..t.saturating_sub(m) {
                if self.entries[a + n][b] != self.entries[a][b + m] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// `τ_s = det` of the leading `s × s` block, `s = 0..=T`.
    pub fn tau(&self, tail: Tail) -> TauSequence {
        let taus: Vec<MultiPoly> = (0..=self.size())
            .map(|s| {
                if s == 0 {
                    return MultiPoly::one(self.vars.clone());
                }
                let block: Vec<Vec<MultiPoly>> = self.entries[..s].iter().map(|r| r[..s].to_vec()).collect();
                poly_det(&block, &self.vars)
            })
            .collect();
        TauSequence::new(self.sig, self.times, taus, tail).expect("τ_0 = 1 by construction")
    }

    pub fn eval(&self, point: &TimePoint) -> Vec<Vec<Q>> {
        self.entries.iter().map(|r| r.iter().map(|p| p.eval(point)).collect()).collect()
    }
}

/// `τ_i = det M_i` for every leading block.
pub fn tau_from_minors(m: &MomentMatrix) -> TauSequence {
    m.tau(Tail::Unknown)
}

/// Exact determinant by fraction-field elimination.
pub fn rational_det(mut a: Vec<Vec<Q>>) -> Q {
    let n = a.len();
    let mut det = Q::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
            return Q::zero();
        };
        if p != k {
            a.swap(p, k);
            det = -det;
        }
        let pivot = a[k][k].clone();
        det *= pivot.clone();
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &pivot;
            for j in k..n {
                let t = &f * &a[k][j];
                a[i][j] -= t;
            }
        }
    }
    det
}
