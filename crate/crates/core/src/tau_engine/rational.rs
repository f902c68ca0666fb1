use super::moment::build;
use super::seed::Seed;
use super::tau::{Tail, TauSequence};
use super::TauError;
use crate::polytime::{poly_det, schur_of_diagram, schur_table, MultiPoly, TimeSet, Weighting, YoungDiagram};
use crate::{Side, Signature, Q};
use serde::{Deserialize, Serialize};

/// Element of `K_j`: `k = (j−1)NM + mM + nN`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KChoice {
    pub m: u32,
    pub n: u32,
    pub k: u64,
}

/// Rejects `j < 1` and offsets outside `0 ≤ m < N`, `0 ≤ n < M`.
pub fn check_params(sig: Signature, j: u32, m: u32, n: u32) -> Result<(), TauError> {
    if j == 0 {
        return Err(TauError::ParamOutOfRange { reason: "matrix size j must be at least 1".into() });
    }
    if m >= sig.n {
        return Err(TauError::ParamOutOfRange { reason: format!("m = {m} must satisfy 0 ≤ m < N = {}", sig.n) });
    }
    if n >= sig.m {
        return Err(TauError::ParamOutOfRange { reason: format!("n = {n} must satisfy 0 ≤ n < M = {}", sig.m) });
    }
    Ok(())
}

pub fn k_value(sig: Signature, j: u32, m: u32, n: u32) -> u64 {
    let (nn, mm) = (sig.n as u64, sig.m as u64);
    (j as u64 - 1) * nn * mm + m as u64 * mm + n as u64 * nn
}

/// `K_j` for the gcd-reduced signature, sorted by `k`.
pub fn k_set(sig: Signature, j: u32) -> Vec<KChoice> {
    let r = sig.reduced();
    let mut out: Vec<KChoice> =
        (0..r.n).flat_map(|m| (0..r.m).map(move |n| KChoice { m, n, k: k_value(r, j, m, n) })).collect();
    out.sort_by_key(|c| c.k);
    out
}

/// Homogeneous degrees of the rows of `τ_s`: `k − (s−1)N − i(M−N)`, `i = 0..s`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeDiagram {
    pub k: u64,
    pub s: u32,
    pub n: u32,
    pub m: u32,
}

impl DegreeDiagram {
    pub fn rows(&self) -> Vec<i64> {
        let (k, n, m) = (self.k as i64, self.n as i64, self.m as i64);
        (0..self.s as i64).map(|i| k - (self.s as i64 - 1) * n - i * (m - n)).collect()
    }

    pub fn total(&self) -> i64 {
        self.rows().iter().sum()
    }
}

/// `τ_0..τ_j` of the all-coefficients-one rational solution, as the leading
/// minors of the moment matrix with `M0_{a,b} = δ(aM + bN = k)`.
///
/// Non-coprime signatures are reduced by their gcd first; the returned
/// sequence carries the reduced signature. The tail is exactly zero.
pub fn rational_tau(sig: Signature, j: u32, m: u32, n: u32, times: &TimeSet) -> Result<TauSequence, TauError> {
    let sig = sig.reduced();
    check_params(sig, j, m, n)?;
    let times = TimeSet::with_slots(sig, times.l_slots, times.r_slots);
    let seed = Seed::rational(sig, k_value(sig, j, m, n));
    Ok(build(&seed, &times, j as usize, None, None).tau(Tail::Zero))
}

/// `P̄_k = Σ_{aM + bN = k} P_a(x) P_b(y)` with plain weights.
pub fn pbar_table(sig: Signature, times: &TimeSet, kmax: u64) -> Vec<MultiPoly> {
    let vars = times.vars();
    let px = schur_table((kmax / sig.m as u64) as usize, &times.chain(Side::L, Weighting::Plain), &vars);
    let py = schur_table((kmax / sig.n as u64) as usize, &times.chain(Side::R, Weighting::Plain), &vars);
    (0..=kmax)
        .map(|k| {
            let mut acc = MultiPoly::zero(vars.clone());
            let mut a = 0u64;
            while a * sig.m as u64 <= k {
                let rest = k - a * sig.m as u64;
                if rest.is_multiple_of(sig.n as u64) {
                    acc.add_product(&px[a as usize], &py[(rest / sig.n as u64) as usize]);
                }
                a += 1;
            }
            acc
        })
        .collect()
}

/// Direct `s × s` determinant `det(P̄_{k − aM − bN})`, an oracle for [`rational_tau`].
pub fn double_wronskian(sig: Signature, k: u64, s: usize, times: &TimeSet) -> MultiPoly {
    let vars = times.vars();
    let table = pbar_table(sig, times, k);
    let zero = MultiPoly::zero(vars.clone());
    let rows: Vec<Vec<MultiPoly>> = (0..s)
        .map(|a| {
            (0..s)
                .map(|b| {
                    let d = (a as u64) * sig.m as u64 + (b as u64) * sig.n as u64;
                    if d <= k {
                        table[(k - d) as usize].clone()
                    } else {
                        zero.clone()
                    }
                })
                .collect()
        })
        .collect();
    poly_det(&rows, &vars)
}

/// Pairs `(Y_L, Y_R)` indexed by `0 ≤ a_1 < … < a_s ≤ j−1`, with rows
/// `Y_L = ((j−1−a_1)N + m − s + 1, …, (j−1−a_s)N + m)` and
/// `Y_R = (n + a_s M − s + 1, …, n + a_1 M)`.
pub fn young_decomposition(sig: Signature, j: u32, m: u32, n: u32, s: u32) -> Result<Vec<(YoungDiagram, YoungDiagram)>, TauError> {
    check_params(sig, j, m, n)?;
    if s > j {
        return Err(TauError::ParamOutOfRange { reason: format!("s = {s} exceeds j = {j}") });
    }
    let (nn, mm, si) = (sig.n as i64, sig.m as i64, s as i64);
    let mut out = Vec::new();
    for subset in increasing_subsets(j as usize, s as usize) {
        let left: Vec<i64> =
            (1..=si).map(|r| (j as i64 - 1 - subset[r as usize - 1] as i64) * nn + m as i64 - si + r).collect();
        let right: Vec<i64> =
            (1..=si).map(|r| n as i64 + subset[(si - r) as usize] as i64 * mm - si + r).collect();
        if left.iter().chain(&right).any(|&v| v < 0) {
            continue;
        }
        let l = YoungDiagram::from_nonnegative(left.iter().map(|&v| v as u32).collect());
        let r = YoungDiagram::from_nonnegative(right.iter().map(|&v| v as u32).collect());
        if let (Ok(l), Ok(r)) = (l, r) {
            out.push((l, r));
        }
    }
    Ok(out)
}

/// The overall sign relating the raw minor to the Young sum: `(−1)^{s(s−1)/2}`.
pub fn young_sign(s: u32) -> i64 {
    if (s as u64 * (s as u64).saturating_sub(1) / 2).is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// `(−1)^{s(s−1)/2} Σ S_{Y_L}(x) S_{Y_R}(y)` over the decomposition.
pub fn young_sum(sig: Signature, j: u32, m: u32, n: u32, s: u32, times: &TimeSet) -> Result<MultiPoly, TauError> {
    let vars = times.vars();
    let lchain = times.chain(Side::L, Weighting::Plain);
    let rchain = times.chain(Side::R, Weighting::Plain);
    let mut acc = MultiPoly::zero(vars.clone());
    for (l, r) in young_decomposition(sig, j, m, n, s)? {
        let term = &schur_of_diagram(&l, &lchain, &vars) * &schur_of_diagram(&r, &rchain, &vars);
        acc += &term;
    }
    Ok(acc.scale(&Q::from_integer(young_sign(s).into())))
}

fn increasing_subsets(n: usize, s: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, s: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == s {
            out.push(cur.clone());
            return;
        }
        for a in start..n {
            cur.push(a);
            rec(a + 1, n, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, s, &mut Vec::new(), &mut out);
    out
}
