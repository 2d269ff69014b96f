//! Numeric traits shared by every module.
//!
//! Polynomial and linear-system algebra only needs a [`Coeff`] (a signed,
//! ordered ring such as `f64`, `i64` or `Rational64`), so Table-style
//! comparisons can run in exact arithmetic. Anything that evaluates
//! transcendental functions, integrates ODEs or trains networks needs a
//! [`Scalar`] (`f32` or `f64`).

use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::Neg;

use ndarray::{LinalgScalar, ScalarOperand};
use num_traits::float::TotalOrder;
use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};

/// Coefficient type for polynomials, transfer functions and 2x2 systems.
pub trait Coeff: Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> {}

impl<T> Coeff for T where T: Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = T> {}

/// Floating-point scalar used by root finding, simulation and training.
pub trait Scalar:
    Coeff
    + Float
    + FloatConst
    + TotalOrder
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Display
    + Default
    + Send
    + Sync
    + LinalgScalar
    + ScalarOperand
    + 'static
{
    /// Tag written into checkpoint manifests.
    const DTYPE: &'static str;

    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    fn write_le(self, out: &mut Vec<u8>);

    /// Reads one value from the front of `bytes`, which must hold at least
    /// `size_of::<Self>()` bytes.
    fn read_le(bytes: &[u8]) -> Self;
}

impl Scalar for f64 {
    const DTYPE: &'static str = "f64";

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 8];
        buf.copy_from_slice(&bytes[..8]);
        f64::from_le_bytes(buf)
    }
}

impl Scalar for f32 {
    const DTYPE: &'static str = "f32";

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }

    fn read_le(bytes: &[u8]) -> Self {
        let mut buf = [0u8; 4];
        buf.copy_from_slice(&bytes[..4]);
        f32::from_le_bytes(buf)
    }
}
