//! The Dirac GAN family: objectives, vector field, local linearization,
//! transfer functions and closed-loop control.
//!
//! The generator is a point mass at `theta`, the discriminator is
//! `D(x) = phi x + offset` and the data sit at a single point `c`. The
//! equilibrium is `(phi, theta) = (0, c)` for every objective.

mod linear;
mod objective;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Coeff, Scalar};

pub use linear::{
    apply_clc, characteristic_polynomial, eigenvalues, jacobian_report, linearize, theorem1_threshold,
    transfer_functions, JacobianReport, LinearizedSystem, Matrix2,
};
pub use objective::{make_objective, Jet, ObjectiveKind, ObjectiveSpec, Term};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracState<T> {
    /// Discriminator slope.
    pub phi: T,
    /// Generator location.
    pub theta: T,
    /// Data location (the constant input).
    pub c: T,
}

impl<T: Scalar> DiracState<T> {
    pub fn new(phi: T, theta: T, c: T) -> Self {
        Self { phi, theta, c }
    }

    pub fn equilibrium(c: T) -> Self {
        Self { phi: T::zero(), theta: c, c }
    }

    pub fn distance_to_equilibrium(&self) -> T {
        self.phi.hypot(self.theta - self.c)
    }
}

/// How the proportional controller is wired into the discriminator dynamics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Realization {
    /// `M = U - lambda Y` fed through the plant input (frequency-domain loop).
    InputFeedback,
    /// `dphi/dt -= lambda phi` (time-domain regularizer gradient).
    OutputDamping,
}

impl Realization {
    pub const ALL: [Realization; 2] = [Self::InputFeedback, Self::OutputDamping];

    pub fn name(self) -> &'static str {
        match self {
            Self::InputFeedback => "input-feedback",
            Self::OutputDamping => "output-damping",
        }
    }
}

impl fmt::Display for Realization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Realization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown realization '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Controller<T> {
    None,
    Proportional { lambda: T, realization: Realization },
}

impl<T: Coeff> Controller<T> {
    pub fn proportional(lambda: T, realization: Realization) -> Result<Self> {
        if lambda < T::zero() {
            return Err(Error::InvalidArgument(format!("lambda {lambda:?} must be >= 0")));
        }
        Ok(Self::Proportional { lambda, realization })
    }

    /// `None` for `lambda == 0`, proportional otherwise.
    pub fn from_lambda(lambda: T, realization: Realization) -> Result<Self> {
        if lambda.is_zero() {
            Ok(Self::None)
        } else {
            Self::proportional(lambda, realization)
        }
    }

    pub fn lambda(&self) -> T {
        match self {
            Self::None => T::zero(),
            Self::Proportional { lambda, .. } => lambda.clone(),
        }
    }
}

/// Gradient-flow vector field `(dphi/dt, dtheta/dt)` of the Dirac GAN:
///
/// ```text
/// dphi/dt   = h1'(phi c) c + h2'(phi theta) theta - control
/// dtheta/dt = h3'(phi theta) phi
/// ```
///
/// where the control term is `lambda phi` for output damping and
/// `lambda g phi` (with `g` the input gain) for input feedback.
pub fn dirac_vector_field<T: Scalar>(spec: &ObjectiveSpec<T>, state: &DiracState<T>, ctrl: &Controller<T>) -> (T, T) {
    let DiracState { phi, theta, c } = *state;
    let control = match ctrl {
        Controller::None => T::zero(),
        Controller::Proportional { lambda, realization: Realization::OutputDamping } => *lambda * phi,
        Controller::Proportional { lambda, realization: Realization::InputFeedback } => {
            *lambda * spec.input_gain() * phi
        }
    };
    let dphi = spec.dh1(phi * c) * c + spec.dh2(phi * theta) * theta - control;
    let dtheta = spec.dh3(phi * theta) * phi;
    (dphi, dtheta)
}
