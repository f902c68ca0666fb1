use super::poly::MultiPoly;
use super::timevar::{TimeVar, WeightedVar};
use crate::Q;
use num_integer::binomial;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

/// A product of Hirota derivatives `Π D_v^{k_v}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HirotaMonomial {
    factors: Vec<(TimeVar, u32)>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum HirotaError {
    #[error("f and g live over different variable sets")]
    VarSetMismatch,
    #[error("Hirota factor {0} is not among the polynomial variables")]
    UnknownVariable(TimeVar),
    #[error("Hirota factor multiplicities must be at least 1")]
    ZeroMultiplicity,
}

impl HirotaMonomial {
    /// Merges repeated variables; rejects zero multiplicities.
    pub fn new(factors: impl IntoIterator<Item = (TimeVar, u32)>) -> Result<Self, HirotaError> {
        let mut merged: Vec<(TimeVar, u32)> = Vec::new();
        for (v, k) in factors {
            if k == 0 {
                return Err(HirotaError::ZeroMultiplicity);
            }
            match merged.iter_mut().find(|(w, _)| *w == v) {
                Some((_, e)) => *e += k,
                None => merged.push((v, k)),
            }
        }
        merged.sort();
        Ok(HirotaMonomial { factors: merged })
    }

    pub fn single(v: TimeVar) -> Self {
        HirotaMonomial { factors: vec![(v, 1)] }
    }

    pub fn pair(a: TimeVar, b: TimeVar) -> Self {
        Self::new([(a, 1), (b, 1)]).expect("positive multiplicities")
    }

    pub fn factors(&self) -> &[(TimeVar, u32)] {
        &self.factors
    }

    pub fn order(&self) -> u32 {
        self.factors.iter().map(|(_, k)| k).sum()
    }
}

impl fmt::Display for HirotaMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .factors
            .iter()
            .map(|(v, k)| if *k == 1 { format!("D{v}") } else { format!("D{v}^{k}") })
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// `D^e f·g = Σ_{c ≤ e} Π C(e_i, c_i) (−1)^{e_i − c_i} ∂^c f ∂^{e−c} g`.
pub fn hirota_apply(mono: &HirotaMonomial, f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly, HirotaError> {
    if !f.same_vars(g) {
        return Err(HirotaError::VarSetMismatch);
    }
    for (v, _) in mono.factors() {
        if f.vars().binary_search(v).is_err() {
            return Err(HirotaError::UnknownVariable(*v));
        }
    }
    let exps: Vec<u32> = mono.factors().iter().map(|(_, k)| *k).collect();
    let mut df: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    let mut dg: HashMap<Vec<u32>, MultiPoly> = HashMap::new();
    let mut acc = MultiPoly::zero(f.vars().clone());
    let mut c = vec![0u32; exps.len()];
    loop {
        let rest: Vec<u32> = exps.iter().zip(&c).map(|(e, ci)| e - ci).collect();
        let mut coeff: i64 = 1;
        for (e, ci) in exps.iter().zip(&c) {
            coeff *= binomial(*e as i64, *ci as i64);
            if (e - ci) % 2 == 1 {
                coeff = -coeff;
            }
        }
        let a = df.entry(c.clone()).or_insert_with(|| multi_derivative(f, mono, &c)).clone();
        let b = dg.entry(rest.clone()).or_insert_with(|| multi_derivative(g, mono, &rest)).clone();
        if !a.is_zero() && !b.is_zero() {
            acc.add_scaled(&(&a * &b), &Q::from_integer(coeff.into()));
        }
        // odometer over 0 ≤ c_i ≤ e_i
        let mut i = 0;
        loop {
            if i == c.len() {
                return Ok(acc);
            }
            if c[i] < exps[i] {
                c[i] += 1;
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

fn multi_derivative(p: &MultiPoly, mono: &HirotaMonomial, counts: &[u32]) -> MultiPoly {
    mono.factors().iter().zip(counts).fold(p.clone(), |acc, ((v, _), &k)| acc.derivative_n(*v, k))
}

/// `[P_0(w∂)f, …, P_kmax(w∂)f]` with `y_j = sign · w_j ∂_{t_j}`.
///
/// Uses `a P_a = Σ_j j y_j P_{a−j}` with commuting derivative operators.
pub fn schur_derivatives(f: &MultiPoly, chain: &[WeightedVar], kmax: usize, negate: bool) -> Vec<MultiPoly> {
    let mut out = vec![f.clone()];
    for a in 1..=kmax {
        let mut acc = MultiPoly::zero(f.vars().clone());
        for w in chain {
            let j = w.slot as usize;
            if j > a {
                continue;
            }
            let d = out[a - j].derivative(w.var);
            if d.is_zero() {
                continue;
            }
            let mut factor = &w.weight * Q::from_integer((j as i64).into());
            if negate {
                factor = -factor;
            }
            acc.add_scaled(&d, &factor);
        }
        out.push(acc.scale(&Q::new(Q::one().to_integer(), (a as i64).into())));
    }
    out
}

/// `P_k(D̂) f·g = Σ_{a+b=k} P_a(∂̂) f · P_b(−∂̂) g`; zero for `k < 0`.
///
/// The chain fixes the side and its weights.
pub fn schur_hirota_apply(k: i64, f: &MultiPoly, g: &MultiPoly, chain: &[WeightedVar]) -> Result<MultiPoly, HirotaError> {
    if !f.same_vars(g) {
        return Err(HirotaError::VarSetMismatch);
    }
    if k < 0 {
        return Ok(MultiPoly::zero(f.vars().clone()));
    }
    let k = k as usize;
    let pf = schur_derivatives(f, chain, k, false);
    let pg = schur_derivatives(g, chain, k, true);
    Ok(bilinear_from_tables(k, &pf, &pg))
}

/// `Σ_{a+b=k} pf[a] · pg[b]` for precomputed derivative tables.
pub fn bilinear_from_tables(k: usize, pf: &[MultiPoly], pg: &[MultiPoly]) -> MultiPoly {
    let mut acc = MultiPoly::zero(pf[0].vars().clone());
    for a in 0..=k {
        let (x, y) = (&pf[a], &pg[k - a]);
        if !x.is_zero() && !y.is_zero() {
            acc.add_product(x, y);
        }
    }
    acc
}

/// `P_k(D̂)` expanded as a sum of Hirota monomials with rational coefficients.
///
/// This is the direct definition and serves as an independent path to
/// [`schur_hirota_apply`].
pub fn schur_operator_terms(k: i64, chain: &[WeightedVar]) -> Vec<(Q, HirotaMonomial)> {
    let p = super::schur::elementary_schur(k, chain);
    let vars = p.vars().clone();
    p.terms()
        .map(|(e, c)| {
            let factors: Vec<(TimeVar, u32)> =
                e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, &x)| (vars[i], x as u32)).collect();
            (c.clone(), HirotaMonomial { factors })
        })
        .collect()
}

/// Applies a linear combination of Hirota monomials; the constant monomial
/// acts as plain multiplication.
pub fn apply_terms(terms: &[(Q, HirotaMonomial)], f: &MultiPoly, g: &MultiPoly) -> Result<MultiPoly, HirotaError> {
    let mut acc = MultiPoly::zero(f.vars().clone());
    for (c, m) in terms {
        let t = if m.factors().is_empty() {
            if !f.same_vars(g) {
                return Err(HirotaError::VarSetMismatch);
            }
            f * g
        } else {
            hirota_apply(m, f, g)?
        };
        if !c.is_zero() {
            acc.add_scaled(&t, c);
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytime::{parse_poly, TimeSet, Weighting};
    use crate::{Side, Signature};

    fn setup() -> (std::sync::Arc<[TimeVar]>, Vec<WeightedVar>) {
        let ts = TimeSet::with_slots(Signature::new(3, 1), 3, 0);
        (ts.vars(), ts.chain(Side::L, Weighting::Hatted))
    }

    #[test]
    fn first_order_cases() {
        let (vars, _) = setup();
        let t1 = TimeVar::new(3, 0);
        let f = parse_poly("t[3,0]^2 * t[2,0] + 5 * t[1,0]", &vars).unwrap();
        let d1 = HirotaMonomial::single(t1);
        assert!(hirota_apply(&d1, &f, &f).unwrap().is_zero());
        let x = parse_poly("t[3,0]", &vars).unwrap();
        let one = MultiPoly::one(vars.clone());
        assert!(hirota_apply(&d1, &x, &one).unwrap().is_one());
    }

    #[test]
    fn second_order_matches_closed_form() {
        let (vars, _) = setup();
        let t1 = TimeVar::new(3, 0);
        let f = parse_poly("t[3,0]^2", &vars).unwrap();
        let d2 = HirotaMonomial::new([(t1, 2)]).unwrap();
        let lhs = hirota_apply(&d2, &f, &f).unwrap();
        let fp = f.derivative(t1);
        let fpp = fp.derivative(t1);
        let rhs = (&(&fpp * &f) - &(&fp * &fp)).scale(&Q::from_integer(2.into()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn schur_form_matches_monomial_expansion() {
        let (vars, chain) = setup();
        let f = parse_poly("t[3,0]^3 + 2 * t[3,0] * t[2,0] - t[1,0]^2", &vars).unwrap();
        let g = parse_poly("t[2,0]^2 * t[3,0] + 1/3 * t[1,0]", &vars).unwrap();
        for k in 0..5 {
            let a = schur_hirota_apply(k, &f, &g, &chain).unwrap();
            let b = apply_terms(&schur_operator_terms(k, &chain), &f, &g).unwrap();
            assert_eq!(a, b, "k = {k}");
        }
        assert_eq!(schur_hirota_apply(0, &f, &g, &chain).unwrap(), &f * &g);
        assert!(schur_hirota_apply(1, &f, &f, &chain).unwrap().is_zero());
    }

    #[test]
    fn mismatch_rejected() {
        let (vars, _) = setup();
        let other = TimeSet::primary(Signature::new(1, 1)).vars();
        let f = MultiPoly::one(vars);
        let g = MultiPoly::one(other);
        let d = HirotaMonomial::single(TimeVar::new(1, 0));
        assert_eq!(hirota_apply(&d, &f, &g), Err(HirotaError::VarSetMismatch));
        assert!(HirotaMonomial::new([(TimeVar::new(1, 0), 0)]).is_err());
    }
}
