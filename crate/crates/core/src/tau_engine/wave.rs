use super::moment::rational_det;
use super::TauError;
use crate::{Signature, Q};
use num_traits::{One, Zero};

/// Pairings of the wave polynomials `W_{Li}` and `W̄_{Rj}` under
/// `⟨λ^{a/N}, λ^{b/M}⟩ = C_{a,b}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WavePairing {
    /// `⟨W_{Li}, W̄_{Rj}⟩`.
    pub plain: Q,
    /// `⟨W_{Li}, Ŵ_{Rj}⟩` with `Ŵ_{Rj} = (τ_j/τ_{j−1}) W̄_{Rj}`.
    pub hat: Q,
    /// `⟨λ W_{Li}, W̄_{Rj}⟩`.
    pub lambda: Q,
}

fn leading_minor(c: &[Vec<Q>], s: usize) -> Q {
    if s == 0 {
        return Q::one();
    }
    rational_det(c[..s].iter().map(|r| r[..s].to_vec()).collect())
}

/// Coefficients `w_a`, `a < i`, of `W_{Li} = Σ w_a λ^{a/N}`: the bordered
/// determinant with columns `0..i−1` of `C` and last column `λ^{a/N}`,
/// divided by `τ_{i−1}`.
fn left_coefficients(c: &[Vec<Q>], i: usize, tau_prev: &Q) -> Vec<Q> {
    (0..i)
        .map(|a| {
            let m: Vec<Vec<Q>> = (0..i)
                .map(|r| {
                    let mut row: Vec<Q> = c[r][..i - 1].to_vec();
                    row.push(if r == a { Q::one() } else { Q::zero() });
                    row
                })
                .collect();
            rational_det(m) / tau_prev
        })
        .collect()
}

/// Coefficients `v_b`, `b < j`, of `W̄_{Rj} = Σ v_b λ^{b/M}`: rows `0..j−1`
/// of `C` with last row `λ^{b/M}`, divided by `τ_j`.
fn right_coefficients(c: &[Vec<Q>], j: usize, tau_j: &Q) -> Vec<Q> {
    (0..j)
        .map(|b| {
            let mut m: Vec<Vec<Q>> = c[..j - 1].iter().map(|r| r[..j].to_vec()).collect();
            m.push((0..j).map(|x| if x == b { Q::one() } else { Q::zero() }).collect());
            rational_det(m) / tau_j
        })
        .collect()
}

/// Pairings for `1 ≤ i, j`, with `c` the moment matrix at a fixed time;
/// needs `c` of size at least `max(i, j) + N`.
pub fn wave_pairing(c: &[Vec<Q>], sig: Signature, i: usize, j: usize) -> Result<WavePairing, TauError> {
    let need = i.max(j) + sig.n as usize;
    if i == 0 || j == 0 || c.len() < need {
        return Err(TauError::ParamOutOfRange {
            reason: format!("pairing ({i}, {j}) needs indices ≥ 1 and a moment matrix of size ≥ {need}"),
        });
    }
    let (tau_im1, tau_j, tau_jm1) = (leading_minor(c, i - 1), leading_minor(c, j), leading_minor(c, j - 1));
    for (index, t) in [(i - 1, &tau_im1), (j, &tau_j), (j - 1, &tau_jm1)] {
        if t.is_zero() {
            return Err(TauError::ZeroTau { index });
        }
    }
    let w = left_coefficients(c, i, &tau_im1);
    let v = right_coefficients(c, j, &tau_j);
    let n = sig.n as usize;
    let pair = |shift: usize| -> Q {
        let mut acc = Q::zero();
        for (a, wa) in w.iter().enumerate() {
            for (b, vb) in v.iter().enumerate() {
                acc += wa * vb * &c[a + shift][b];
            }
        }
        acc
    };
    let plain = pair(0);
    let hat = &plain * &tau_j / &tau_jm1;
    Ok(WavePairing { plain, hat, lambda: pair(n) })
}
