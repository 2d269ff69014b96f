use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Coeff;

/// Real-coefficient polynomial in the Laplace variable `s`.
///
/// Coefficients are stored in ascending degree order (`coeffs[k]` multiplies
/// `s^k`) with trailing zeros stripped; the zero polynomial is `[0]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<T>", into = "Vec<T>")]
#[serde(bound(serialize = "T: Coeff + Serialize", deserialize = "T: Coeff + Deserialize<'de>"))]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Coeff> Polynomial<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidPolynomial("no coefficients".into()));
        }
        Ok(Self::normalized(coeffs))
    }

    fn normalized(mut coeffs: Vec<T>) -> Self {
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(T::zero());
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: vec![T::zero()] }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::normalized(vec![c])
    }

    /// The indeterminate `s`.
    pub fn s() -> Self {
        Self { coeffs: vec![T::zero(), T::one()] }
    }

    /// `s - root`.
    pub fn linear_factor(root: T) -> Self {
        Self::normalized(vec![-root, T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_zero()
    }

    pub fn leading(&self) -> &T {
        self.coeffs.last().expect("nonempty")
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, k: T) -> Self {
        Self::normalized(self.coeffs.iter().map(|c| c.clone() * k.clone()).collect())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - 1);
        let mut k = T::one();
        for c in &self.coeffs[1..] {
            out.push(c.clone() * k.clone());
            k = k + T::one();
        }
        Self::normalized(out)
    }

    pub fn map<U: Coeff>(&self, f: impl FnMut(&T) -> U) -> Polynomial<U> {
        Polynomial::normalized(self.coeffs.iter().map(f).collect())
    }

    pub fn try_map<U: Coeff, E>(
        &self,
        f: impl FnMut(&T) -> std::result::Result<U, E>,
    ) -> std::result::Result<Polynomial<U>, E> {
        let coeffs = self.coeffs.iter().map(f).collect::<std::result::Result<_, _>>()?;
        Ok(Polynomial::normalized(coeffs))
    }
}

/// Exact product of two polynomials (coefficient convolution).
pub fn poly_mul<T: Coeff>(a: &Polynomial<T>, b: &Polynomial<T>) -> Polynomial<T> {
    if a.is_zero() || b.is_zero() {
        return Polynomial::zero();
    }
    let mut out = vec![T::zero(); a.coeffs.len() + b.coeffs.len() - 1];
    for (i, x) in a.coeffs.iter().enumerate() {
        for (j, y) in b.coeffs.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    Polynomial::normalized(out)
}

fn zip_with<T: Coeff>(a: &Polynomial<T>, b: &Polynomial<T>, f: impl Fn(T, T) -> T) -> Polynomial<T> {
    let n = a.coeffs.len().max(b.coeffs.len());
    let get = |p: &Polynomial<T>, k: usize| p.coeffs.get(k).cloned().unwrap_or_else(T::zero);
    Polynomial::normalized((0..n).map(|k| f(get(a, k), get(b, k))).collect())
}

impl<T: Coeff> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        zip_with(self, rhs, |x, y| x + y)
    }
}

impl<T: Coeff> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        zip_with(self, rhs, |x, y| x - y)
    }
}

impl<T: Coeff> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        poly_mul(self, rhs)
    }
}

impl<T: Coeff> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        self.map(|c| -c.clone())
    }
}

impl<T: Coeff> TryFrom<Vec<T>> for Polynomial<T> {
    type Error = Error;
    fn try_from(coeffs: Vec<T>) -> Result<Self> {
        Self::new(coeffs)
    }
}

impl<T> From<Polynomial<T>> for Vec<T> {
    fn from(p: Polynomial<T>) -> Self {
        p.coeffs
    }
}

impl<I> Polynomial<Ratio<I>>
where
    I: Integer + Clone + fmt::Debug + std::ops::Neg<Output = I>,
    Ratio<I>: Coeff,
{
    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> I {
        self.coeffs.iter().fold(I::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl<T: Coeff + fmt::Display> fmt::Display for Polynomial<T> {
    /// Descending powers, e.g. `4s^2 + 2s + 1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let negative = *c < T::zero();
            let mag = if negative { -c.clone() } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let unit = mag.is_one();
            match k {
                0 => write!(f, "{mag}")?,
                1 if unit => write!(f, "s")?,
                1 => write!(f, "{mag}s")?,
                _ if unit => write!(f, "s^{k}")?,
                _ => write!(f, "{mag}s^{k}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Rational64;

    fn p(c: &[f64]) -> Polynomial<f64> {
        Polynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn difference_of_squares() {
        assert_eq!(poly_mul(&p(&[1.0, 1.0]), &p(&[1.0, -1.0])), p(&[1.0, 0.0, -1.0]));
    }

    #[test]
    fn s_times_s() {
        let s = Polynomial::<f64>::s();
        assert_eq!(poly_mul(&s, &s), p(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn hand_convolution() {
        // (1+2s)(3+s): 1*3, 1*1 + 2*3, 2*1
        assert_eq!(poly_mul(&p(&[1.0, 2.0]), &p(&[3.0, 1.0])), p(&[3.0, 7.0, 2.0]));
    }

    #[test]
    fn degree_adds_under_multiplication() {
        let a = p(&[1.0, 0.0, 3.0]);
        let b = p(&[2.0, 5.0]);
        assert_eq!((&a * &b).degree(), 3);
    }

    #[test]
    fn trailing_zeros_are_stripped() {
        let q = p(&[1.0, 2.0, 0.0, 0.0]);
        assert_eq!(q.degree(), 1);
        assert_eq!(p(&[0.0, 0.0]), Polynomial::zero());
        assert!(Polynomial::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn multiplying_by_zero() {
        assert!(poly_mul(&p(&[1.0, 2.0]), &Polynomial::zero()).is_zero());
    }

    #[test]
    fn add_cancels_leading_terms() {
        let a = p(&[1.0, 1.0, 1.0]);
        let b = p(&[0.0, 0.0, -1.0]);
        assert_eq!((&a + &b).degree(), 1);
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn display_descending() {
        let q = Polynomial::new(vec![Rational64::new(1, 4), Rational64::new(1, 2), Rational64::from(1)]).unwrap();
        assert_eq!(q.to_string(), "s^2 + 1/2s + 1/4");
        assert_eq!(p(&[1.0, 2.0, 4.0]).to_string(), "4s^2 + 2s + 1");
        assert_eq!(p(&[-1.0, 0.0, -1.0]).to_string(), "-s^2 - 1");
        assert_eq!(q.denominator_lcm(), 4);
    }

    #[test]
    fn derivative_and_eval() {
        let q = p(&[1.0, 0.0, 1.0, 1.0]);
        assert_eq!(q.derivative(), p(&[0.0, 2.0, 3.0]));
        assert_eq!(q.eval(2.0), 13.0);
    }

    #[test]
    fn serde_rejects_empty() {
        assert!(serde_json::from_str::<Polynomial<f64>>("[]").is_err());
        let q: Polynomial<f64> = serde_json::from_str("[1.0, 2.0, 0.0]").unwrap();
        assert_eq!(q.degree(), 1);
    }
}
