use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::scalar::Scalar;

/// The GAN objective families analysed at Dirac scale.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Wgan,
    Sgan,
    Nsgan,
    Lsgan,
    Hinge,
}

impl ObjectiveKind {
    pub const ALL: [ObjectiveKind; 5] = [Self::Wgan, Self::Sgan, Self::Nsgan, Self::Lsgan, Self::Hinge];

    pub fn name(self) -> &'static str {
        match self {
            Self::Wgan => "wgan",
            Self::Sgan => "sgan",
            Self::Nsgan => "nsgan",
            Self::Lsgan => "lsgan",
            Self::Hinge => "hinge",
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ObjectiveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown objective '{s}'")))
    }
}

/// Which of the three scalar maps of the objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Term {
    /// `h1`, applied to the discriminator on real data.
    Real,
    /// `h2`, applied to the discriminator on generated data.
    Fake,
    /// `h3`, the generator's objective.
    Generator,
}

/// Value, first and second derivative of one `h_i` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

/// The scalar maps `h1, h2, h3` of a GAN objective
/// `V1 = h1(D(real)) + h2(D(fake))`, `V2 = h3(D(fake))`.
///
/// Every `h_i` takes the discriminator's *pre-offset* argument `u = phi * x`;
/// the discriminator output is `u + d_offset`. For LSGAN the offset of 0.5 is
/// folded into the maps (`h1(u) = -(u - 1/2)^2` etc.) so that the equilibrium
/// sits at `u = 0` for every kind.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec<T> {
    pub kind: ObjectiveKind,
    pub d_offset: T,
}

fn sigmoid<T: Scalar>(x: T) -> T {
    if x >= T::zero() {
        T::one() / (T::one() + (-x).exp())
    } else {
        let e = x.exp();
        e / (T::one() + e)
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

impl<T: Scalar> ObjectiveSpec<T> {
    pub fn new(kind: ObjectiveKind) -> Self {
        let d_offset = match kind {
            ObjectiveKind::Lsgan => T::lit(0.5),
            _ => T::zero(),
        };
        Self { kind, d_offset }
    }

    pub fn jet(&self, term: Term, x: T) -> Jet<T> {
        use ObjectiveKind::*;
        use Term::*;
        let one = T::one();
        let zero = T::zero();
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let jet = |value, d1, d2| Jet { value, d1, d2 };
        match (self.kind, term) {
            (Wgan, Real) | (Wgan, Generator) | (Hinge, Generator) => jet(x, one, zero),
            (Wgan, Fake) => jet(-x, -one, zero),

            // log sigma(x)
            (Sgan, Real) | (Nsgan, Real) | (Nsgan, Generator) => {
                let s = sigmoid(x);
                jet(-softplus(-x), one - s, -s * (one - s))
            }
            // log(1 - sigma(x))
            (Sgan, Fake) | (Nsgan, Fake) => {
                let s = sigmoid(x);
                jet(-softplus(x), -s, -s * (one - s))
            }
            // -log(1 - sigma(x))
            (Sgan, Generator) => {
                let s = sigmoid(x);
                jet(softplus(x), s, s * (one - s))
            }

            (Lsgan, Real) | (Lsgan, Generator) => {
                let r = x - half;
                jet(-r * r, -two * r, -two)
            }
            (Lsgan, Fake) => {
                let r = x + half;
                jet(-r * r, -two * r, -two)
            }

            // min(x - 1, 0); the kink at x = 1 takes the slope of the side
            // containing the equilibrium.
            (Hinge, Real) => {
                if x <= one {
                    jet(x - one, one, zero)
                } else {
                    jet(zero, zero, zero)
                }
            }
            // min(-1 - x, 0)
            (Hinge, Fake) => {
                if x >= -one {
                    jet(-one - x, -one, zero)
                } else {
                    jet(zero, zero, zero)
                }
            }
        }
    }

    pub fn h1(&self, x: T) -> T {
        self.jet(Term::Real, x).value
    }
    pub fn h2(&self, x: T) -> T {
        self.jet(Term::Fake, x).value
    }
    pub fn h3(&self, x: T) -> T {
        self.jet(Term::Generator, x).value
    }
    pub fn dh1(&self, x: T) -> T {
        self.jet(Term::Real, x).d1
    }
    pub fn dh2(&self, x: T) -> T {
        self.jet(Term::Fake, x).d1
    }
    pub fn dh3(&self, x: T) -> T {
        self.jet(Term::Generator, x).d1
    }
    pub fn d2h1(&self, x: T) -> T {
        self.jet(Term::Real, x).d2
    }
    pub fn d2h2(&self, x: T) -> T {
        self.jet(Term::Fake, x).d2
    }
    pub fn d2h3(&self, x: T) -> T {
        self.jet(Term::Generator, x).d2
    }

    /// Discriminator output `phi * x + d_offset` for a Dirac discriminator.
    pub fn discriminator(&self, phi: T, x: T) -> T {
        phi * x + self.d_offset
    }

    /// Coefficient through which the data location enters `dphi/dt` once
    /// linearized: `-h2'(0)`.
    pub fn input_gain(&self) -> T {
        -self.dh2(T::zero())
    }
}

pub fn make_objective<T: Scalar>(kind: ObjectiveKind) -> ObjectiveSpec<T> {
    ObjectiveSpec::new(kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgan_at_zero() {
        let s = make_objective::<f64>(ObjectiveKind::Sgan);
        assert_eq!(s.dh1(0.0), 0.5);
        assert_eq!(s.d2h1(0.0), -0.25);
        assert_eq!(s.dh2(0.0), -0.5);
        assert_eq!(s.dh3(0.0), 0.5);
        assert_eq!(s.h1(0.0), -std::f64::consts::LN_2);
    }

    #[test]
    fn wgan_is_linear() {
        let s = make_objective::<f64>(ObjectiveKind::Wgan);
        assert_eq!(s.d2h1(0.0), 0.0);
        assert_eq!(s.d2h2(0.0), 0.0);
        assert_eq!(s.h2(3.0), -3.0);
    }

    #[test]
    fn hinge_fake_term() {
        let s = make_objective::<f64>(ObjectiveKind::Hinge);
        assert_eq!(s.dh2(0.0), -1.0);
        assert_eq!(s.d2h2(0.0), 0.0);
        assert_eq!(s.h1(0.5), -0.5);
        assert_eq!(s.h1(2.0), 0.0);
        assert_eq!(s.dh1(2.0), 0.0);
        assert_eq!(s.dh2(-1.0), -1.0);
    }

    #[test]
    fn lsgan_offset_and_curvature() {
        let s = make_objective::<f64>(ObjectiveKind::Lsgan);
        assert_eq!(s.d_offset, 0.5);
        assert_eq!(s.d2h1(0.0), -2.0);
        assert_eq!(s.d2h2(0.0), -2.0);
        assert_eq!(s.dh1(0.0), 1.0);
        assert_eq!(s.discriminator(0.0, 1.0), 0.5);
    }

    #[test]
    fn equilibrium_slopes_have_the_required_signs_and_magnitudes() {
        for kind in ObjectiveKind::ALL {
            let s = make_objective::<f64>(kind);
            let (a, b, c) = (s.dh1(0.0), s.dh2(0.0), s.dh3(0.0));
            assert!(a > 0.0 && b < 0.0 && c > 0.0, "{kind}");
            assert_eq!(a, -b, "{kind}");
            assert_eq!(a, c, "{kind}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-5;
        for kind in ObjectiveKind::ALL {
            let s = make_objective::<f64>(kind);
            for term in [Term::Real, Term::Fake, Term::Generator] {
                for &x in &[-0.7, -0.2, 0.0, 0.3, 0.9] {
                    let j = s.jet(term, x);
                    let fd1 = (s.jet(term, x + h).value - s.jet(term, x - h).value) / (2.0 * h);
                    let fd2 = (s.jet(term, x + h).d1 - s.jet(term, x - h).d1) / (2.0 * h);
                    assert!((j.d1 - fd1).abs() < 1e-8, "{kind} {term:?} {x}");
                    assert!((j.d2 - fd2).abs() < 1e-8, "{kind} {term:?} {x}");
                }
            }
        }
    }

    #[test]
    fn softplus_is_stable_for_large_inputs() {
        let s = make_objective::<f64>(ObjectiveKind::Sgan);
        assert!(s.h1(-800.0).is_finite());
        assert!(s.h2(800.0).is_finite());
        assert_eq!(s.h3(-800.0), 0.0);
    }

    #[test]
    fn parse_kind() {
        assert_eq!("WGAN".parse::<ObjectiveKind>().unwrap(), ObjectiveKind::Wgan);
        assert!("vanilla".parse::<ObjectiveKind>().is_err());
    }
}
