use crate::Q;
use num_traits::{One, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Coefficient ring of lattice fields: exact rationals or doubles.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
    /// Pivot test: exact zero for rationals, relative threshold for floats.
    fn negligible(&self, scale: f64) -> bool;
    fn abs_f64(&self) -> f64 {
        self.to_f64().abs()
    }
}

/// Scalars with logarithm and exponential.
pub trait Real: Scalar + Copy + PartialOrd {
    fn ln(self) -> Self;
    fn exp(self) -> Self;
}

/// Relative pivot threshold used by the float backend.
pub const F64_PIVOT_TOL: f64 = 1e-12;

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= F64_PIVOT_TOL * scale.max(1.0)
    }
}

impl Real for f64 {
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
}

impl Scalar for Q {
    fn from_i64(v: i64) -> Self {
        Q::from_integer(v.into())
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}
