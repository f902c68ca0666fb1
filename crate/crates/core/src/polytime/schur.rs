use super::poly::{poly_det, MultiPoly};
use super::timevar::{TimeVar, WeightedVar};
use crate::Q;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

/// A partition, rows weakly decreasing and positive. The empty diagram is φ.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct YoungDiagram {
    rows: Vec<u32>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("rows {0:?} are not a weakly decreasing list of positive integers")]
pub struct InvalidDiagram(pub Vec<u32>);

impl TryFrom<Vec<u32>> for YoungDiagram {
    type Error = InvalidDiagram;
    fn try_from(rows: Vec<u32>) -> Result<Self, InvalidDiagram> {
        YoungDiagram::new(rows)
    }
}

impl From<YoungDiagram> for Vec<u32> {
    fn from(y: YoungDiagram) -> Vec<u32> {
        y.rows
    }
}

impl YoungDiagram {
    pub fn new(rows: Vec<u32>) -> Result<Self, InvalidDiagram> {
        let ok = rows.iter().all(|&r| r > 0) && rows.windows(2).all(|w| w[0] >= w[1]);
        if ok {
            Ok(YoungDiagram { rows })
        } else {
            Err(InvalidDiagram(rows))
        }
    }

    /// Drops zero rows from a weakly decreasing list.
    pub fn from_nonnegative(rows: Vec<u32>) -> Result<Self, InvalidDiagram> {
        let trimmed: Vec<u32> = rows.iter().copied().filter(|&r| r > 0).collect();
        if rows.windows(2).all(|w| w[0] >= w[1]) {
            YoungDiagram::new(trimmed)
        } else {
            Err(InvalidDiagram(rows))
        }
    }

    pub fn empty() -> Self {
        YoungDiagram { rows: Vec::new() }
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn size(&self) -> u32 {
        self.rows.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// The transposed diagram.
    pub fn conjugate(&self) -> YoungDiagram {
        let width = self.rows.first().copied().unwrap_or(0);
        let rows = (1..=width).map(|c| self.rows.iter().filter(|&&r| r >= c).count() as u32).collect();
        YoungDiagram { rows }
    }

    /// All partitions of `k`, in reverse lexicographic order.
    pub fn partitions(k: u32) -> Vec<YoungDiagram> {
        fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<YoungDiagram>) {
            if rem == 0 {
                out.push(YoungDiagram { rows: cur.clone() });
                return;
            }
            for p in (1..=rem.min(max)).rev() {
                cur.push(p);
                rec(rem - p, p, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(k, k, &mut Vec::new(), &mut out);
        out
    }
}

impl fmt::Display for YoungDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.rows.is_empty() {
            return f.write_str("φ");
        }
        let parts: Vec<String> = self.rows.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Variable list of a chain, sorted.
pub fn chain_vars(chain: &[WeightedVar]) -> Arc<[TimeVar]> {
    let mut v: Vec<TimeVar> = chain.iter().map(|w| w.var).collect();
    v.sort();
    v.dedup();
    v.into()
}

/// `P_0 … P_kmax` over `vars` from `exp(Σ_j w_j t_j z^j) = Σ_k P_k z^k`.
///
/// Uses `k P_k = Σ_j j w_j t_j P_{k−j}`. Slots absent from the chain read as zero.
pub fn schur_table(kmax: usize, chain: &[WeightedVar], vars: &Arc<[TimeVar]>) -> Vec<MultiPoly> {
    let mut table = vec![MultiPoly::one(vars.clone())];
    let scaled: Vec<(usize, MultiPoly)> = chain
        .iter()
        .map(|w| {
            let factor = &w.weight * Q::from_integer((w.slot as i64).into());
            (w.slot as usize, MultiPoly::variable(vars.clone(), w.var).scale(&factor))
        })
        .collect();
    for k in 1..=kmax {
        let mut acc = MultiPoly::zero(vars.clone());
        for (j, yj) in &scaled {
            if *j <= k {
                acc.add_product(yj, &table[k - j]);
            }
        }
        table.push(acc.scale(&Q::new(1.into(), (k as i64).into())));
    }
    table
}

/// `P_k` over the chain's own variables; zero for negative `k`.
pub fn elementary_schur(k: i64, chain: &[WeightedVar]) -> MultiPoly {
    let vars = chain_vars(chain);
    if k < 0 {
        return MultiPoly::zero(vars);
    }
    schur_table(k as usize, chain, &vars).pop().expect("nonempty table")
}

/// Jacobi–Trudi determinant `S_Y = det(P_{Y_i − i + j})`.
pub fn schur_of_diagram(y: &YoungDiagram, chain: &[WeightedVar], vars: &Arc<[TimeVar]>) -> MultiPoly {
    let l = y.rows().len();
    if l == 0 {
        return MultiPoly::one(vars.clone());
    }
    let kmax = (y.rows()[0] as usize) + l;
    let table = schur_table(kmax, chain, vars);
    let zero = MultiPoly::zero(vars.clone());
    let rows: Vec<Vec<MultiPoly>> = (0..l)
        .map(|i| {
            (0..l)
                .map(|j| {
                    let idx = y.rows()[i] as i64 - i as i64 + j as i64;
                    if idx < 0 {
                        zero.clone()
                    } else {
                        table[idx as usize].clone()
                    }
                })
                .collect()
        })
        .collect();
    poly_det(&rows, vars)
}

/// Checks `S_Y(−t) = (−1)^{|Y|} S_{Y'}(t)` exactly.
pub fn conjugate_identity_check(y: &YoungDiagram, chain: &[WeightedVar]) -> bool {
    let vars = chain_vars(chain);
    let lhs = schur_of_diagram(y, chain, &vars).negate_vars();
    let rhs = schur_of_diagram(&y.conjugate(), chain, &vars);
    let rhs = if y.size() % 2 == 1 { -&rhs } else { rhs };
    lhs == rhs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytime::{parse_poly, TimeSet, Weighting};
    use crate::{Side, Signature};
    use num_traits::One;

    fn unweighted_chain(len: u32) -> Vec<WeightedVar> {
        TimeSet::with_slots(Signature::new(len, 1), len, 0).chain(Side::L, Weighting::Plain)
    }

    #[test]
    fn low_order_values() {
        let chain = unweighted_chain(2);
        let vars = chain_vars(&chain);
        assert!(elementary_schur(0, &chain).is_one());
        assert!(elementary_schur(-3, &chain).is_zero());
        // slot 1 is t[2,0], slot 2 is t[1,0] for N = 2
        let p2 = parse_poly("1/2 * t[2,0]^2 + t[1,0]", &vars).unwrap();
        assert_eq!(elementary_schur(2, &chain), p2);
    }

    #[test]
    fn diagrams() {
        let chain = unweighted_chain(3);
        let vars = chain_vars(&chain);
        let p = schur_table(4, &chain, &vars);
        assert!(schur_of_diagram(&YoungDiagram::empty(), &chain, &vars).is_one());
        let y1 = YoungDiagram::new(vec![1]).unwrap();
        assert_eq!(schur_of_diagram(&y1, &chain, &vars), p[1]);
        let y11 = YoungDiagram::new(vec![1, 1]).unwrap();
        assert_eq!(schur_of_diagram(&y11, &chain, &vars), &(&p[1] * &p[1]) - &p[2]);
        for k in 0..4u32 {
            let row = YoungDiagram::from_nonnegative(vec![k]).unwrap();
            assert_eq!(schur_of_diagram(&row, &chain, &vars), p[k as usize]);
        }
    }

    #[test]
    fn conjugation_examples() {
        let chain = unweighted_chain(4);
        for rows in [vec![1], vec![2, 1], vec![3], vec![2, 2], vec![3, 1]] {
            assert!(conjugate_identity_check(&YoungDiagram::new(rows).unwrap(), &chain));
        }
        let y3 = YoungDiagram::new(vec![3]).unwrap();
        assert_eq!(y3.conjugate().rows(), &[1, 1, 1]);
    }

    #[test]
    fn zero_point_is_delta() {
        let chain = unweighted_chain(3);
        let vars = chain_vars(&chain);
        let table = schur_table(5, &chain, &vars);
        for (k, p) in table.iter().enumerate() {
            let v = p.eval(&Default::default());
            assert_eq!(v, if k == 0 { Q::one() } else { Q::from_integer(0.into()) });
        }
    }

    #[test]
    fn invalid_diagram_rejected() {
        assert!(YoungDiagram::new(vec![1, 2]).is_err());
        assert!(YoungDiagram::new(vec![2, 0]).is_err());
        assert_eq!(YoungDiagram::partitions(4).len(), 5);
    }
}
