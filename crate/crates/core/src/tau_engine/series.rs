//! Truncated power series in one formal variable `z`, used to evaluate
//! Schur derivatives of tau functions at a point through the shift
//! `Σ_a z^a P_a(±∂̂) f(t) = f(t ± [z])`, where `[z]` adds `z^j / j` to slot `j`.

use super::seed::Seed;
use crate::polytime::{TimePoint, TimeSet, TimeVar};
use crate::{Side, Q};
use num_traits::{One, Zero};
use std::collections::HashMap;

/// Coefficients `c_0..=c_order`.
pub(crate) type Series = Vec<Q>;

fn zero(order: usize) -> Series {
    vec![Q::zero(); order + 1]
}

fn mul_add(acc: &mut Series, a: &Series, b: &Series) {
    let order = acc.len() - 1;
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().take(order + 1 - i).enumerate() {
            if !y.is_zero() {
                acc[i + j] += x * y;
            }
        }
    }
}

/// Times of one side as series: the value at `point`, plus `±z^j/j` when shifted.
/// Every slot given in `point` is used, whatever `times` declares.
fn side_times(times: &TimeSet, side: Side, point: &TimePoint, shift: Option<bool>, order: usize) -> Vec<(usize, Series)> {
    let in_point = point.keys().filter(|v| v.side() == side).map(|v| v.slot(times.sig)).max().unwrap_or(0);
    let slots = times.slots(side).max(in_point).max(if shift.is_some() { order as u32 } else { 0 });
    (1..=slots)
        .map(|j| {
            let v = TimeVar::from_slot(side, j, times.sig);
            let mut s = zero(order);
            s[0] = point.get(&v).cloned().unwrap_or_else(Q::zero);
            if let Some(negate) = shift {
                if (j as usize) <= order {
                    let c = Q::new(1.into(), (j as i64).into());
                    s[j as usize] += if negate { -c } else { c };
                }
            }
            (j as usize, s)
        })
        .collect()
}

/// Plain Schur polynomials `P_0..=P_kmax` of series-valued times.
fn schur_series(kmax: usize, slots: &[(usize, Series)], order: usize) -> Vec<Series> {
    let mut table = vec![{
        let mut one = zero(order);
        one[0] = Q::one();
        one
    }];
    for k in 1..=kmax {
        let mut acc = zero(order);
        for (j, t) in slots {
            if *j <= k {
                let scaled: Series = t.iter().map(|c| c * Q::from_integer((*j as i64).into())).collect();
                mul_add(&mut acc, &scaled, &table[k - j]);
            }
        }
        let inv = Q::new(1.into(), (k as i64).into());
        table.push(acc.into_iter().map(|c| c * &inv).collect());
    }
    table
}

/// Moment matrix at `point`, with one side optionally shifted by `±[z]`.
pub(crate) fn shifted_moment(
    seed: &Seed,
    times: &TimeSet,
    size: usize,
    point: &TimePoint,
    shift: Option<(Side, bool)>,
    order: usize,
) -> Vec<Vec<Series>> {
    let support = seed.support();
    let amax = support.iter().map(|e| e.0 as usize).max().unwrap_or(0);
    let bmax = support.iter().map(|e| e.1 as usize).max().unwrap_or(0);
    let side_shift = |side: Side| shift.and_then(|(s, neg)| (s == side).then_some(neg));
    let px = schur_series(amax, &side_times(times, Side::L, point, side_shift(Side::L), order), order);
    let py = schur_series(bmax, &side_times(times, Side::R, point, side_shift(Side::R), order), order);
    let mut rows: Vec<Vec<Series>> = vec![vec![zero(order); bmax + 1]; size];
    for (a, row) in rows.iter_mut().enumerate() {
        for (ap, bp, v) in &support {
            let ap = *ap as usize;
            if ap >= a {
                for (c, x) in row[*bp as usize].iter_mut().zip(&px[ap - a]) {
                    *c += x * v;
                }
            }
        }
    }
    (0..size)
        .map(|a| {
            (0..size)
                .map(|b| {
                    let mut acc = zero(order);
                    for (bp, nv) in rows[a].iter().enumerate().skip(b) {
                        mul_add(&mut acc, nv, &py[bp - b]);
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Determinant over truncated series by memoised Laplace expansion.
pub(crate) fn series_det(m: &[Vec<Series>], order: usize) -> Series {
    fn rec(m: &[Vec<Series>], row: usize, cols: u32, order: usize, memo: &mut HashMap<u32, Series>) -> Series {
        if cols == 0 {
            let mut one = zero(order);
            one[0] = Q::one();
            return one;
        }
        if let Some(s) = memo.get(&cols) {
            return s.clone();
        }
        let mut acc = zero(order);
        let mut positive = true;
        for c in 0..m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = &m[row][c];
            if entry.iter().any(|x| !x.is_zero()) {
                let minor = rec(m, row + 1, cols & !(1 << c), order, memo);
                let mut term = zero(order);
                mul_add(&mut term, entry, &minor);
                for (a, t) in acc.iter_mut().zip(term) {
                    if positive {
                        *a += t;
                    } else {
                        *a -= t;
                    }
                }
            }
            positive = !positive;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    assert!(m.len() <= 24, "determinant too large for subset expansion");
    rec(m, 0, (1u32 << m.len()) - 1, order, &mut HashMap::new())
}

/// `τ_0..=τ_size` at `point` shifted by `±[z]` on one side, to order `order`.
pub(crate) fn shifted_taus(
    seed: &Seed,
    times: &TimeSet,
    size: usize,
    point: &TimePoint,
    side: Side,
    negate: bool,
    order: usize,
) -> Vec<Series> {
    let m = shifted_moment(seed, times, size, point, Some((side, negate)), order);
    (0..=size)
        .map(|s| {
            let block: Vec<Vec<Series>> = m[..s].iter().map(|r| r[..s].to_vec()).collect();
            series_det(&block, order)
        })
        .collect()
}

/// `P_k(D̂) f∘g = Σ_{a+b=k} [z^a] f(t+[z]) · [z^b] g(t−[z])`.
pub(crate) fn bilinear_at(k: i64, plus: &Series, minus: &Series) -> Q {
    if k < 0 {
        return Q::zero();
    }
    let k = k as usize;
    (0..=k).map(|a| &plus[a] * &minus[k - a]).sum()
}
