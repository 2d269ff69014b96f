//! Polynomial and rational transfer-function algebra with pole-based
//! stability classification.

mod poly;
mod roots;
mod tf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Scalar};

pub use poly::{poly_mul, Polynomial};
pub use roots::ComplexRoot;
pub use tf::{feedback_close, TransferFunction};

/// Default half-width of the band around the imaginary axis that counts as
/// "on the axis". Only absorbs floating-point error in exact-arithmetic poles.
pub const DEFAULT_AXIS_TOL: f64 = 1e-9;

/// Qualitative behaviour of a linear dynamic, read off its poles.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StabilityClass {
    AsymptoticallyStable,
    Oscillatory,
    Divergent,
}

impl std::fmt::Display for StabilityClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::AsymptoticallyStable => "AsymptoticallyStable",
            Self::Oscillatory => "Oscillatory",
            Self::Divergent => "Divergent",
        })
    }
}

pub fn max_real_part<T: Scalar>(poles: &[ComplexRoot<T>]) -> T {
    poles.iter().fold(T::neg_infinity(), |m, p| m.max(p.re))
}

/// Divergent if any pole lies right of `+tol`, stable if all lie left of
/// `-tol`, oscillatory otherwise.
pub fn classify_poles<T: Scalar>(poles: &[ComplexRoot<T>], tol: T) -> StabilityClass {
    let worst = max_real_part(poles);
    if worst > tol {
        StabilityClass::Divergent
    } else if worst < -tol {
        StabilityClass::AsymptoticallyStable
    } else {
        StabilityClass::Oscillatory
    }
}

pub fn classify<T: Scalar>(tf: &TransferFunction<T>, tol: T) -> Result<StabilityClass> {
    tf.classify(tol)
}

/// Routh–Hurwitz test for degrees 1 to 3: true iff every root has a negative
/// real part. A negative leading coefficient is flipped first, which leaves
/// the roots unchanged.
pub fn routh_hurwitz_stable<T: Coeff>(p: &Polynomial<T>) -> Result<bool> {
    let deg = p.degree();
    if !(1..=3).contains(&deg) {
        return Err(Error::UnsupportedDegree(deg));
    }
    let p = if *p.leading() < T::zero() { -p } else { p.clone() };
    let a = p.coeffs();
    let zero = T::zero();
    let all_positive = a.iter().all(|c| *c > zero);
    Ok(match deg {
        1 | 2 => all_positive,
        _ => all_positive && a[2].clone() * a[1].clone() > a[0].clone() * a[3].clone(),
    })
}
