use super::field::{shift_values, Lattice, LatticeField};
use super::scalar::Scalar;
use super::LatticeError;
use crate::Signature;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

/// `Σ_d c_d(x) Λ^d` on a periodic lattice.
///
/// Products are taken in the formal Laurent algebra: offsets are never
/// reduced modulo `p`, so `Λ^p` stays distinct from the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct BandOperator<S> {
    lattice: Lattice,
    diags: BTreeMap<i32, Vec<S>>,
}

/// Which offsets a projection keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    /// Offsets `d ≥ 0`.
    Plus,
    /// Offsets `d < 0`.
    Minus,
    Geq(i32),
    Leq(i32),
    Diag0,
}

impl Part {
    pub fn keeps(self, d: i32) -> bool {
        match self {
            Part::Plus => d >= 0,
            Part::Minus => d < 0,
            Part::Geq(k) => d >= k,
            Part::Leq(k) => d <= k,
            Part::Diag0 => d == 0,
        }
    }
}

impl<S: Scalar> BandOperator<S> {
    pub fn zero(lattice: Lattice) -> Self {
        BandOperator { lattice, diags: BTreeMap::new() }
    }

    pub fn identity(lattice: Lattice) -> Self {
        Self::shift(lattice, 0)
    }

    /// `Λ^d`.
    pub fn shift(lattice: Lattice, d: i32) -> Self {
        let mut op = Self::zero(lattice);
        op.diags.insert(d, vec![S::one(); lattice.p]);
        op
    }

    /// `f(x) Λ^d`.
    pub fn monomial(field: &LatticeField<S>, d: i32) -> Self {
        let mut op = Self::zero(field.lattice);
        op.set_diagonal(d, field.values.clone());
        op
    }

    pub fn from_diagonals(lattice: Lattice, diags: impl IntoIterator<Item = (i32, Vec<S>)>) -> Result<Self, LatticeError> {
        let mut op = Self::zero(lattice);
        for (d, v) in diags {
            if v.len() != lattice.p {
                return Err(LatticeError::LengthMismatch { expected: lattice.p, found: v.len() });
            }
            let merged = match op.diags.remove(&d) {
                Some(old) => old.into_iter().zip(v).map(|(a, b)| a + b).collect(),
                None => v,
            };
            op.set_diagonal(d, merged);
        }
        Ok(op)
    }

    /// `Λ^N + Σ_{i=−M}^{N−1} u_i Λ^i`; missing `u_i` are zero.
    pub fn lax(lattice: Lattice, sig: Signature, u: impl IntoIterator<Item = (i32, Vec<S>)>) -> Result<Self, LatticeError> {
        let lo = -(sig.m as i32);
        let hi = sig.n as i32 - 1;
        let mut diags: Vec<(i32, Vec<S>)> = Vec::new();
        for (i, v) in u {
            if i < lo || i > hi {
                return Err(LatticeError::OffsetOutOfBand { offset: i, lo, hi });
            }
            diags.push((i, v));
        }
        diags.push((sig.n as i32, vec![S::one(); lattice.p]));
        Self::from_diagonals(lattice, diags)
    }

    /// Replaces a diagonal; an all-zero vector removes it.
    pub fn set_diagonal(&mut self, d: i32, values: Vec<S>) {
        assert_eq!(values.len(), self.lattice.p, "diagonal length must equal the lattice size");
        if values.iter().all(|v| v.is_zero()) {
            self.diags.remove(&d);
        } else {
            self.diags.insert(d, values);
        }
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    pub fn p(&self) -> usize {
        self.lattice.p
    }

    pub fn diagonal(&self, d: i32) -> Option<&[S]> {
        self.diags.get(&d).map(|v| v.as_slice())
    }

    pub fn diagonal_or_zero(&self, d: i32) -> Vec<S> {
        self.diags.get(&d).cloned().unwrap_or_else(|| vec![S::zero(); self.lattice.p])
    }

    pub fn field(&self, d: i32) -> LatticeField<S> {
        LatticeField { lattice: self.lattice, values: self.diagonal_or_zero(d) }
    }

    pub fn diagonals(&self) -> impl Iterator<Item = (i32, &[S])> {
        self.diags.iter().map(|(d, v)| (*d, v.as_slice()))
    }

    pub fn offsets(&self) -> impl Iterator<Item = i32> + '_ {
        self.diags.keys().copied()
    }

    pub fn min_offset(&self) -> Option<i32> {
        self.diags.keys().next().copied()
    }

    pub fn max_offset(&self) -> Option<i32> {
        self.diags.keys().next_back().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.diags.is_empty()
    }

    fn check(&self, other: &Self) -> Result<(), LatticeError> {
        if self.lattice != other.lattice {
            Err(LatticeError::Mismatch { left: self.lattice, right: other.lattice })
        } else {
            Ok(())
        }
    }

    /// `(a Λ^d)(b Λ^e) = a(x) b(x + d) Λ^{d+e}`.
    pub fn op_mul(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check(other)?;
        let mut acc: BTreeMap<i32, Vec<S>> = BTreeMap::new();
        for (d, a) in &self.diags {
            for (e, b) in &other.diags {
                let bs = shift_values(b, *d as i64);
                let slot = acc.entry(d + e).or_insert_with(|| vec![S::zero(); self.lattice.p]);
                for ((s, x), y) in slot.iter_mut().zip(a).zip(bs) {
                    *s = s.clone() + x.clone() * y;
                }
            }
        }
        let mut out = Self::zero(self.lattice);
        for (d, v) in acc {
            out.set_diagonal(d, v);
        }
        Ok(out)
    }

    pub fn op_add(&self, other: &Self) -> Result<Self, LatticeError> {
        self.check(other)?;
        let mut out = self.clone();
        for (d, b) in &other.diags {
            let merged = match out.diags.remove(d) {
                Some(a) => a.into_iter().zip(b).map(|(x, y)| x + y.clone()).collect(),
                None => b.clone(),
            };
            out.set_diagonal(*d, merged);
        }
        Ok(out)
    }

    pub fn op_sub(&self, other: &Self) -> Result<Self, LatticeError> {
        self.op_add(&-other)
    }

    pub fn scale(&self, c: &S) -> Self {
        self.map_coeffs(|v| v.clone() * c.clone())
    }

    pub fn map_coeffs(&self, f: impl Fn(&S) -> S) -> Self {
        let mut out = Self::zero(self.lattice);
        for (d, v) in &self.diags {
            out.set_diagonal(*d, v.iter().map(&f).collect());
        }
        out
    }

    /// `[A, B] = AB − BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self, LatticeError> {
        self.op_mul(other)?.op_sub(&other.op_mul(self)?)
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(self.lattice);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    pub fn project(&self, part: Part) -> Self {
        BandOperator {
            lattice: self.lattice,
            diags: self.diags.iter().filter(|(d, _)| part.keeps(**d)).map(|(d, v)| (*d, v.clone())).collect(),
        }
    }

    /// Anti-involution with `Λ† = Λ⁻¹` and `f† = f`: `(a Λ^d)† = a(x − d) Λ^{−d}`.
    pub fn dagger(&self) -> Self {
        let mut out = Self::zero(self.lattice);
        for (d, v) in &self.diags {
            out.set_diagonal(-d, shift_values(v, -(*d as i64)));
        }
        out
    }

    /// `Σ_x c_0(x)`, cyclic on products.
    pub fn trace(&self) -> S {
        self.diags.get(&0).map(|v| v.iter().cloned().fold(S::zero(), |a, b| a + b)).unwrap_or_else(S::zero)
    }

    pub fn max_abs(&self) -> f64 {
        self.diags.values().flat_map(|v| v.iter().map(|x| x.abs_f64())).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude among offsets accepted by `keep`.
    pub fn max_abs_where(&self, keep: impl Fn(i32) -> bool) -> f64 {
        self.diags
            .iter()
            .filter(|(d, _)| keep(**d))
            .flat_map(|(_, v)| v.iter().map(|x| x.abs_f64()))
            .fold(0.0, f64::max)
    }

    /// Dense `p × p` matrix with offsets aliased modulo `p`; row `x`,
    /// column `x + d` receives `c_d(x)`.
    pub fn to_dense(&self) -> Vec<Vec<S>> {
        let p = self.lattice.p;
        let mut m = vec![vec![S::zero(); p]; p];
        for (d, v) in &self.diags {
            for (x, c) in v.iter().enumerate() {
                let col = self.lattice.wrap(x as i64 + *d as i64);
                m[x][col] = m[x][col].clone() + c.clone();
            }
        }
        m
    }

    /// Applies the operator to a field: `(A f)(x) = Σ_d c_d(x) f(x + d)`.
    pub fn apply(&self, f: &[S]) -> Vec<S> {
        let p = self.lattice.p;
        let mut out = vec![S::zero(); p];
        for (d, v) in &self.diags {
            for x in 0..p {
                let y = self.lattice.wrap(x as i64 + *d as i64);
                out[x] = out[x].clone() + v[x].clone() * f[y].clone();
            }
        }
        out
    }

    pub fn to_f64(&self) -> BandOperator<f64> {
        BandOperator {
            lattice: self.lattice,
            diags: self.diags.iter().map(|(d, v)| (*d, v.iter().map(|x| x.to_f64()).collect())).collect(),
        }
    }
}

impl<S: Scalar> Mul for &BandOperator<S> {
    type Output = BandOperator<S>;
    /// Panics on lattice mismatch; use [`BandOperator::op_mul`] to handle it.
    fn mul(self, rhs: Self) -> BandOperator<S> {
        self.op_mul(rhs).expect("lattice mismatch in operator product")
    }
}

impl<S: Scalar> Add for &BandOperator<S> {
    type Output = BandOperator<S>;
    fn add(self, rhs: Self) -> BandOperator<S> {
        self.op_add(rhs).expect("lattice mismatch in operator sum")
    }
}

impl<S: Scalar> Sub for &BandOperator<S> {
    type Output = BandOperator<S>;
    fn sub(self, rhs: Self) -> BandOperator<S> {
        self.op_sub(rhs).expect("lattice mismatch in operator difference")
    }
}

impl<S: Scalar> Neg for &BandOperator<S> {
    type Output = BandOperator<S>;
    fn neg(self) -> BandOperator<S> {
        self.map_coeffs(|v| -v.clone())
    }
}

/// Wire format `{"P": …, "eps": …, "diagonals": {"d": [values]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BandOperatorJson {
    #[serde(rename = "P")]
    pub p: usize,
    pub eps: f64,
    pub diagonals: BTreeMap<String, Vec<f64>>,
}

impl From<&BandOperator<f64>> for BandOperatorJson {
    fn from(op: &BandOperator<f64>) -> Self {
        BandOperatorJson {
            p: op.lattice.p,
            eps: op.lattice.eps,
            diagonals: op.diags.iter().map(|(d, v)| (d.to_string(), v.clone())).collect(),
        }
    }
}

impl TryFrom<BandOperatorJson> for BandOperator<f64> {
    type Error = LatticeError;
    fn try_from(j: BandOperatorJson) -> Result<Self, LatticeError> {
        let lattice = Lattice::new(j.p, j.eps)?;
        let mut diags = Vec::with_capacity(j.diagonals.len());
        for (k, v) in j.diagonals {
            let d: i32 = k.trim().parse().map_err(|_| LatticeError::BadOffsetKey(k.clone()))?;
            diags.push((d, v));
        }
        BandOperator::from_diagonals(lattice, diags)
    }
}

impl Serialize for BandOperator<f64> {
    fn serialize<Se: serde::Serializer>(&self, s: Se) -> Result<Se::Ok, Se::Error> {
        BandOperatorJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for BandOperator<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = BandOperatorJson::deserialize(d)?;
        BandOperator::try_from(j).map_err(serde::de::Error::custom)
    }
}
