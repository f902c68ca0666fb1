use super::scalar::Scalar;
use super::LatticeError;
use serde::{Deserialize, Serialize};

/// Periodic lattice of `p ≥ 3` sites with spacing `eps`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    pub p: usize,
    pub eps: f64,
}

impl Lattice {
    pub fn new(p: usize, eps: f64) -> Result<Self, LatticeError> {
        if p < 3 {
            return Err(LatticeError::TooSmall(p));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(LatticeError::BadSpacing(eps));
        }
        Ok(Lattice { p, eps })
    }

    /// Unit spacing; panics for `p < 3`.
    pub fn unit(p: usize) -> Self {
        Lattice::new(p, 1.0).expect("lattice size must be at least 3")
    }

    /// Site index reduced modulo `p`.
    pub fn wrap(&self, x: i64) -> usize {
        x.rem_euclid(self.p as i64) as usize
    }
}

/// A function on the periodic lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField<S> {
    pub lattice: Lattice,
    pub values: Vec<S>,
}

impl<S: Scalar> LatticeField<S> {
    pub fn new(lattice: Lattice, values: Vec<S>) -> Result<Self, LatticeError> {
        if values.len() != lattice.p {
            return Err(LatticeError::LengthMismatch { expected: lattice.p, found: values.len() });
        }
        Ok(LatticeField { lattice, values })
    }

    pub fn constant(lattice: Lattice, c: S) -> Self {
        LatticeField { lattice, values: vec![c; lattice.p] }
    }

    pub fn zeros(lattice: Lattice) -> Self {
        Self::constant(lattice, S::zero())
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn at(&self, x: i64) -> &S {
        &self.values[self.lattice.wrap(x)]
    }

    /// `g(x) = f(x + k ε)`.
    pub fn shift(&self, k: i64) -> Self {
        LatticeField { lattice: self.lattice, values: shift_values(&self.values, k) }
    }

    pub fn map(&self, f: impl Fn(&S) -> S) -> Self {
        LatticeField { lattice: self.lattice, values: self.values.iter().map(f).collect() }
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        LatticeField {
            lattice: self.lattice,
            values: self.values.iter().zip(&other.values).map(|(a, b)| f(a, b)).collect(),
        }
    }

    pub fn sum(&self) -> S {
        self.values.iter().cloned().fold(S::zero(), |a, b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs_f64()).fold(0.0, f64::max)
    }
}

/// `out[x] = v[x + k mod p]`.
pub fn shift_values<S: Clone>(v: &[S], k: i64) -> Vec<S> {
    let p = v.len() as i64;
    (0..p).map(|x| v[(x + k).rem_euclid(p) as usize].clone()).collect()
}
