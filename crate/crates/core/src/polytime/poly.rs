use super::timevar::{TimePoint, TimeVar};
use crate::{Signature, Q};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Exponent vector aligned with the variable list of its polynomial.
pub type Exponents = SmallVec<[u16; 8]>;

/// Sparse polynomial with exact rational coefficients over an ordered set of
/// [`TimeVar`]s.
///
/// Zero coefficients are never stored, so structural equality is polynomial
/// equality. Binary operations on polynomials over different variable sets
/// first embed both into the union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Arc<[TimeVar]>,
    terms: BTreeMap<Exponents, Q>,
}

impl MultiPoly {
    pub fn zero(vars: Arc<[TimeVar]>) -> Self {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]), "variables must be sorted and distinct");
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Arc<[TimeVar]>, c: Q) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            let e = SmallVec::from_elem(0, p.vars.len());
            p.terms.insert(e, c);
        }
        p
    }

    pub fn one(vars: Arc<[TimeVar]>) -> Self {
        Self::constant(vars, Q::one())
    }

    /// The polynomial `v`; panics if `v` is not among `vars`.
    pub fn variable(vars: Arc<[TimeVar]>, v: TimeVar) -> Self {
        let idx = vars.binary_search(&v).unwrap_or_else(|_| panic!("{v} is not in the variable set"));
        let mut e: Exponents = SmallVec::from_elem(0, vars.len());
        e[idx] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, Q::one());
        MultiPoly { vars, terms }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms(vars: Arc<[TimeVar]>, terms: impl IntoIterator<Item = (Exponents, Q)>) -> Self {
        let mut acc: BTreeMap<Exponents, Q> = BTreeMap::new();
        for (e, c) in terms {
            assert_eq!(e.len(), vars.len(), "exponent vector length must match the variable set");
            *acc.entry(e).or_insert_with(Q::zero) += c;
        }
        acc.retain(|_, c| !c.is_zero());
        MultiPoly { vars, terms: acc }
    }

    pub fn vars(&self) -> &Arc<[TimeVar]> {
        &self.vars
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self.terms.iter().all(|(e, c)| c.is_one() && e.iter().all(|&k| k == 0))
    }

    /// The constant term.
    pub fn constant_term(&self) -> Q {
        let e: Exponents = SmallVec::from_elem(0, self.vars.len());
        self.terms.get(&e).cloned().unwrap_or_else(Q::zero)
    }

    pub fn same_vars(&self, other: &MultiPoly) -> bool {
        Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars
    }

    /// Re-expresses the polynomial over a superset of its variables.
    pub fn embed(&self, vars: &Arc<[TimeVar]>) -> Option<MultiPoly> {
        if self.same_vars_as(vars) {
            return Some(MultiPoly { vars: vars.clone(), terms: self.terms.clone() });
        }
        let map: Option<Vec<usize>> = self.vars.iter().map(|v| vars.binary_search(v).ok()).collect();
        let map = map?;
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne: Exponents = SmallVec::from_elem(0, vars.len());
                for (i, &k) in e.iter().enumerate() {
                    ne[map[i]] = k;
                }
                (ne, c.clone())
            })
            .collect();
        Some(MultiPoly { vars: vars.clone(), terms })
    }

    fn same_vars_as(&self, vars: &Arc<[TimeVar]>) -> bool {
        Arc::ptr_eq(&self.vars, vars) || &self.vars == vars
    }

    fn unified(&self, other: &MultiPoly) -> (MultiPoly, MultiPoly) {
        let mut all: Vec<TimeVar> = self.vars.iter().chain(other.vars.iter()).copied().collect();
        all.sort();
        all.dedup();
        let vars: Arc<[TimeVar]> = all.into();
        (self.embed(&vars).expect("superset"), other.embed(&vars).expect("superset"))
    }

    /// Multiplies every coefficient by `c`.
    pub fn scale(&self, c: &Q) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k * c)).collect(),
        }
    }

    fn add_impl(&self, other: &MultiPoly, sign: bool) -> MultiPoly {
        if !self.same_vars(other) {
            let (a, b) = self.unified(other);
            return a.add_impl(&b, sign);
        }
        let mut terms = self.terms.clone();
        for (e, c) in &other.terms {
            match terms.get_mut(e) {
                Some(t) => {
                    if sign {
                        *t -= c;
                    } else {
                        *t += c;
                    }
                    if t.is_zero() {
                        terms.remove(e);
                    }
                }
                None => {
                    terms.insert(e.clone(), if sign { -c.clone() } else { c.clone() });
                }
            }
        }
        MultiPoly { vars: self.vars.clone(), terms }
    }

    fn accumulate(terms: &mut BTreeMap<Exponents, Q>, e: Exponents, c: Q) {
        match terms.entry(e) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
        }
    }

    /// `self += c · other` in place.
    pub fn add_scaled(&mut self, other: &MultiPoly, c: &Q) {
        if c.is_zero() || other.is_zero() {
            return;
        }
        if !self.same_vars(other) {
            let (a, b) = self.unified(other);
            *self = a;
            return self.add_scaled(&b, c);
        }
        let one = c.is_one();
        for (e, k) in &other.terms {
            Self::accumulate(&mut self.terms, e.clone(), if one { k.clone() } else { k * c });
        }
    }

    /// `self += a · b` in place.
    pub fn add_product(&mut self, a: &MultiPoly, b: &MultiPoly) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if !self.same_vars(a) || !a.same_vars(b) {
            let p = a * b;
            return self.add_scaled(&p, &Q::one());
        }
        if a.terms.len() * b.terms.len() > 64 {
            let p = a.mul_impl(b);
            return self.add_scaled(&p, &Q::one());
        }
        for (ea, ca) in &a.terms {
            for (eb, cb) in &b.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                Self::accumulate(&mut self.terms, e, ca * cb);
            }
        }
    }

    /// Coefficients as `i128` numerators over one common denominator, if they fit.
    fn scaled_integers(&self) -> Option<(BigInt, Vec<(&Exponents, i128)>)> {
        let den = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let nums = self
            .terms
            .iter()
            .map(|(e, c)| (c.numer() * (&den / c.denom())).to_i128().map(|n| (e, n)))
            .collect::<Option<Vec<_>>>()?;
        Some((den, nums))
    }

    /// Product in machine integers; `None` when a partial sum would overflow.
    fn mul_small(&self, other: &MultiPoly) -> Option<MultiPoly> {
        let (da, a) = self.scaled_integers()?;
        let (db, b) = other.scaled_integers()?;
        let bound = |v: &[(&Exponents, i128)]| v.iter().map(|(_, n)| n.unsigned_abs()).max().unwrap_or(0);
        let (ma, mb) = (bound(&a), bound(&b));
        // every partial sum stays below min(len) · max|a| · max|b|
        let terms_bound = a.len().min(b.len()) as u128;
        ma.checked_mul(mb)?.checked_mul(terms_bound).filter(|&v| v < i128::MAX as u128)?;
        let mut acc: HashMap<Exponents, i128> = HashMap::with_capacity(a.len() * b.len());
        for (ea, ca) in &a {
            for (eb, cb) in &b {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                *acc.entry(e).or_insert(0) += ca * cb;
            }
        }
        let den = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, c)| *c != 0)
            .map(|(e, c)| (e, Q::new(BigInt::from(c), den.clone())))
            .collect();
        Some(MultiPoly { vars: self.vars.clone(), terms })
    }

    fn mul_impl(&self, other: &MultiPoly) -> MultiPoly {
        if !self.same_vars(other) {
            let (a, b) = self.unified(other);
            return a.mul_impl(&b);
        }
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero(self.vars.clone());
        }
        if let Some(p) = self.mul_small(other) {
            return p;
        }
        let mut acc: HashMap<Exponents, Q> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(x, y)| x + y).collect();
                let c = ca * cb;
                match acc.get_mut(&e) {
                    Some(t) => *t += c,
                    None => {
                        acc.insert(e, c);
                    }
                }
            }
        }
        let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        MultiPoly { vars: self.vars.clone(), terms }
    }

    /// Partial derivative; zero if `v` is absent.
    pub fn derivative(&self, v: TimeVar) -> MultiPoly {
        let Ok(idx) = self.vars.binary_search(&v) else {
            return MultiPoly::zero(self.vars.clone());
        };
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[idx] > 0)
            .map(|(e, c)| {
                let mut ne = e.clone();
                let k = ne[idx];
                ne[idx] -= 1;
                (ne, c * Q::from_integer(k.into()))
            })
            .collect();
        MultiPoly { vars: self.vars.clone(), terms }
    }

    /// Repeated partial derivative `∂_v^k`.
    pub fn derivative_n(&self, v: TimeVar, k: u32) -> MultiPoly {
        (0..k).fold(self.clone(), |p, _| p.derivative(v))
    }

    /// Exact evaluation; times missing from `point` read as zero.
    pub fn eval(&self, point: &TimePoint) -> Q {
        let values: Vec<Q> = self.vars.iter().map(|v| point.get(v).cloned().unwrap_or_else(Q::zero)).collect();
        let mut total = Q::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    t *= num_traits::pow(values[i].clone(), k as usize);
                }
            }
            total += t;
        }
        total
    }

    /// `p(t) → p(−t)`.
    pub fn negate_vars(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let odd = e.iter().map(|&k| k as u32).sum::<u32>() % 2 == 1;
                    (e.clone(), if odd { -c.clone() } else { c.clone() })
                })
                .collect(),
        }
    }

    /// Renames variables through `f`, which must be injective on this set.
    pub fn relabel(&self, f: impl Fn(TimeVar) -> TimeVar) -> MultiPoly {
        let new: Vec<TimeVar> = self.vars.iter().map(|&v| f(v)).collect();
        let mut sorted = new.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(sorted.len(), new.len(), "relabelling must be injective");
        let vars: Arc<[TimeVar]> = sorted.into();
        let pos: Vec<usize> = new.iter().map(|v| vars.binary_search(v).expect("present")).collect();
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne: Exponents = SmallVec::from_elem(0, vars.len());
                for (i, &k) in e.iter().enumerate() {
                    ne[pos[i]] = k;
                }
                (ne, c.clone())
            })
            .collect();
        MultiPoly { vars, terms }
    }

    /// Graded degree of a monomial under `deg t_{1,0} = deg t_{0,0} = MN`.
    pub fn monomial_degree(&self, e: &Exponents, sig: Signature) -> u64 {
        e.iter().zip(self.vars.iter()).map(|(&k, v)| k as u64 * v.degree(sig)).sum()
    }

    /// `Some(d)` if every term has graded degree `d`; `None` for mixed degrees.
    /// The zero polynomial reports `Some(0)`.
    pub fn homogeneous_degree(&self, sig: Signature) -> Option<u64> {
        let mut degs = self.terms.keys().map(|e| self.monomial_degree(e, sig));
        let Some(first) = degs.next() else {
            return Some(0);
        };
        degs.all(|d| d == first).then_some(first)
    }

    /// Largest monomial in canonical order, with its coefficient.
    pub fn leading_term(&self) -> Option<(Exponents, Q)> {
        self.terms.iter().next_back().map(|(e, c)| (e.clone(), c.clone()))
    }

    /// Total degree in the ordinary sense.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().map(|&k| k as u32).sum()).max().unwrap_or(0)
    }

    /// Largest coefficient magnitude, as a rough size indicator.
    pub fn max_abs_coefficient(&self) -> Q {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Q::zero)
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_impl(rhs, false)
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        self.add_impl(rhs, true)
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        self.mul_impl(rhs)
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly { vars: self.vars.clone(), terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect() }
    }
}

impl std::ops::AddAssign<&MultiPoly> for MultiPoly {
    fn add_assign(&mut self, rhs: &MultiPoly) {
        self.add_scaled(rhs, &Q::one());
    }
}

impl std::ops::SubAssign<&MultiPoly> for MultiPoly {
    fn sub_assign(&mut self, rhs: &MultiPoly) {
        self.add_scaled(rhs, &-Q::one());
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoised on the set of remaining columns.
pub fn poly_det(rows: &[Vec<MultiPoly>], vars: &Arc<[TimeVar]>) -> MultiPoly {
    let n = rows.len();
    if n == 0 {
        return MultiPoly::one(vars.clone());
    }
    assert!(n <= 20, "determinant too large for subset expansion");
    assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    det_rec(rows, 0, (1u32 << n) - 1, vars, &mut memo)
}

fn det_rec(
    rows: &[Vec<MultiPoly>],
    row: usize,
    cols: u32,
    vars: &Arc<[TimeVar]>,
    memo: &mut HashMap<u32, MultiPoly>,
) -> MultiPoly {
    if cols == 0 {
        return MultiPoly::one(vars.clone());
    }
    if let Some(p) = memo.get(&cols) {
        return p.clone();
    }
    let mut acc = MultiPoly::zero(vars.clone());
    let mut sign_positive = true;
    for c in 0..rows.len() {
        if cols & (1 << c) == 0 {
            continue;
        }
        let entry = &rows[row][c];
        if !entry.is_zero() {
            let minor = det_rec(rows, row + 1, cols & !(1 << c), vars, memo);
            if !minor.is_zero() {
                let term = entry * &minor;
                if sign_positive {
                    acc += &term;
                } else {
                    acc -= &term;
                }
            }
        }
        sign_positive = !sign_positive;
    }
    memo.insert(cols, acc.clone());
    acc
}
