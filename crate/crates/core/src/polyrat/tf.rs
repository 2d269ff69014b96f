use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use super::poly::Polynomial;
use super::roots::ComplexRoot;
use super::{classify_poles, StabilityClass};
use crate::error::{Error, Result};
use crate::scalar::{Coeff, Scalar};

/// Rational transfer function `num(s) / den(s)`.
///
/// The denominator always has a positive leading coefficient. Coefficients are
/// not divided through and common factors are not cancelled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Coeff + Serialize", deserialize = "T: Coeff + Deserialize<'de>"))]
pub struct TransferFunction<T> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Coeff> TransferFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateSystem("zero denominator".into()));
        }
        if *den.leading() < T::zero() {
            Ok(Self { num: -&num, den: -&den })
        } else {
            Ok(Self { num, den })
        }
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn map<U: Coeff>(&self, mut f: impl FnMut(&T) -> U) -> Result<TransferFunction<U>> {
        TransferFunction::new(self.num.map(&mut f), self.den.map(&mut f))
    }

    /// Closes a negative-feedback loop around this plant with the constant
    /// controller `T_b(s) = gain`: `T / (1 + gain T) = num / (den + gain num)`.
    pub fn feedback_close(&self, gain: T) -> Result<Self> {
        if gain < T::zero() {
            return Err(Error::InvalidArgument(format!("controller gain {gain:?} must be >= 0")));
        }
        let den = &self.den + &self.num.scale(gain);
        if den.is_zero() {
            return Err(Error::DegenerateSystem("closed-loop denominator vanished".into()));
        }
        Self::new(self.num.clone(), den)
    }
}

/// Free-function form of [`TransferFunction::feedback_close`].
pub fn feedback_close<T: Coeff>(plant: &TransferFunction<T>, controller_gain: T) -> Result<TransferFunction<T>> {
    plant.feedback_close(controller_gain)
}

impl<T: Scalar> TransferFunction<T> {
    pub fn poles(&self) -> Result<Vec<ComplexRoot<T>>> {
        self.den.roots()
    }

    pub fn classify(&self, tol: T) -> Result<StabilityClass> {
        Ok(classify_poles(&self.poles()?, tol))
    }
}

impl<I> TransferFunction<Ratio<I>>
where
    I: Integer + Clone + fmt::Debug + std::ops::Neg<Output = I>,
    Ratio<I>: Coeff,
{
    /// Scales numerator and denominator by a common factor so that every
    /// coefficient is an integer and their overall gcd is 1.
    pub fn integer_scaled(&self) -> TransferFunction<I>
    where
        I: Coeff,
    {
        let l = self.num.denominator_lcm().lcm(&self.den.denominator_lcm());
        let to_int = |c: &Ratio<I>| (c.clone() * Ratio::from_integer(l.clone())).to_integer();
        let num = self.num.map(to_int);
        let den = self.den.map(to_int);
        let g = num.coeffs().iter().chain(den.coeffs()).fold(I::zero(), |acc, c| acc.gcd(c));
        let g = if g.is_zero() { I::one() } else { g };
        TransferFunction { num: num.map(|c| c.clone() / g.clone()), den: den.map(|c| c.clone() / g.clone()) }
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for TransferFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.num, self.den)
    }
}
