use serde::{Deserialize, Serialize};

use super::{Controller, ObjectiveSpec, Realization};
use crate::error::{Error, Result};
use crate::polyrat::{ComplexRoot, Polynomial, TransferFunction};
use crate::scalar::{Coeff, Scalar};

pub type Matrix2<T> = [[T; 2]; 2];

/// First-order model of the Dirac GAN around its equilibrium, in state order
/// `(dphi, dtheta)` with `dphi = phi - phi_e`, `dtheta = theta - theta_e`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinearizedSystem<T> {
    pub a: Matrix2<T>,
    /// Gain through which the data location enters `dphi/dt`; equals `-a[0][1]`.
    pub input_gain: T,
    /// `(phi_e, theta_e)`.
    pub equilibrium: (T, T),
}

impl<T: Coeff> LinearizedSystem<T> {
    pub fn trace(&self) -> T {
        self.a[0][0].clone() + self.a[1][1].clone()
    }

    pub fn determinant(&self) -> T {
        self.a[0][0].clone() * self.a[1][1].clone() - self.a[0][1].clone() * self.a[1][0].clone()
    }

    /// `det(sI - A) = s^2 - tr(A) s + det(A)`.
    pub fn characteristic_polynomial(&self) -> Polynomial<T> {
        characteristic_polynomial(&self.a)
    }

    pub fn map<U: Coeff>(&self, mut f: impl FnMut(&T) -> U) -> LinearizedSystem<U> {
        LinearizedSystem {
            a: [[f(&self.a[0][0]), f(&self.a[0][1])], [f(&self.a[1][0]), f(&self.a[1][1])]],
            input_gain: f(&self.input_gain),
            equilibrium: (f(&self.equilibrium.0), f(&self.equilibrium.1)),
        }
    }
}

pub fn characteristic_polynomial<T: Coeff>(a: &Matrix2<T>) -> Polynomial<T> {
    let tr = a[0][0].clone() + a[1][1].clone();
    let det = a[0][0].clone() * a[1][1].clone() - a[0][1].clone() * a[1][0].clone();
    Polynomial::new(vec![det, -tr, T::one()]).expect("nonempty")
}

/// Eigenvalues of a real 2x2 matrix, via the roots of its characteristic
/// polynomial.
pub fn eigenvalues<T: Scalar>(a: &Matrix2<T>) -> Result<Vec<ComplexRoot<T>>> {
    characteristic_polynomial(a).roots()
}

/// Jacobian of the Dirac dynamics at `(phi, theta) = (0, c)`.
pub fn linearize<T: Scalar>(spec: &ObjectiveSpec<T>, c: T) -> LinearizedSystem<T> {
    let zero = T::zero();
    let (phi_e, theta_e) = (zero, c);
    // Every h is evaluated at the equilibrium argument phi_e * x = 0.
    let a = [
        [
            spec.d2h1(zero) * c * c + spec.d2h2(zero) * theta_e * theta_e,
            spec.dh2(zero) + spec.d2h2(zero) * theta_e * phi_e,
        ],
        [spec.dh3(zero) + spec.d2h3(zero) * phi_e * theta_e, spec.d2h3(zero) * phi_e * phi_e],
    ];
    LinearizedSystem { input_gain: -a[0][1], a, equilibrium: (phi_e, theta_e) }
}

/// Frequency-domain solution `(Phi(s)/U(s), Theta(s)/U(s))` of the
/// linearized system driven by the data location `u`.
///
/// Writing `dtheta = theta - u`, the input enters as
/// `s Phi = a00 Phi + a01 Theta + g U` and `s Theta = a10 Phi + a11 Theta + e U`
/// with `g = -a01` and `e = -a11`; Cramer's rule gives both transfer
/// functions over the characteristic polynomial.
pub fn transfer_functions<T: Coeff>(sys: &LinearizedSystem<T>) -> Result<(TransferFunction<T>, TransferFunction<T>)> {
    let [[a00, a01], [a10, a11]] = sys.a.clone();
    let g = sys.input_gain.clone();
    let e = -a11.clone();
    let den = sys.characteristic_polynomial();
    if den.is_zero() {
        return Err(Error::DegenerateSystem("characteristic polynomial vanished".into()));
    }
    // Phi = [g (s - a11) + a01 e] / det,  Theta = [e (s - a00) + a10 g] / det
    let phi_num = Polynomial::new(vec![a01 * e.clone() - g.clone() * a11, g.clone()])?;
    let theta_num = Polynomial::new(vec![a10 * g - e.clone() * a00, e])?;
    Ok((TransferFunction::new(phi_num, den.clone())?, TransferFunction::new(theta_num, den)?))
}

/// Applies proportional closed-loop control to the linearized discriminator.
///
/// `OutputDamping` subtracts `lambda * phi` directly from `dphi/dt`;
/// `InputFeedback` feeds `-lambda * phi` back through the input channel, so
/// the damping is scaled by the plant's input gain.
pub fn apply_clc<T: Coeff>(sys: &LinearizedSystem<T>, ctrl: &Controller<T>) -> LinearizedSystem<T> {
    let mut out = sys.clone();
    if let Controller::Proportional { lambda, realization } = ctrl {
        let damping = match realization {
            Realization::OutputDamping => lambda.clone(),
            Realization::InputFeedback => lambda.clone() * sys.input_gain.clone(),
        };
        out.a[0][0] = out.a[0][0].clone() - damping;
    }
    out
}

/// Smallest CLC coefficient for which local convergence is guaranteed:
/// `max(0, -h1''(0) - h2''(0))`.
pub fn theorem1_threshold<T: Scalar>(spec: &ObjectiveSpec<T>) -> T {
    let zero = T::zero();
    (-spec.d2h1(zero) - spec.d2h2(zero)).max(zero)
}

/// Parameter-space view of CLC: the unregularized Jacobian, the regularizer's
/// contribution and the eigenvalues of their difference.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport<T> {
    pub unregularized: Matrix2<T>,
    /// Hessian of the CLC regularizer; nonzero only in the `(phi, phi)` entry.
    pub regularizer: Matrix2<T>,
    pub eigenvalues: Vec<ComplexRoot<T>>,
}

impl<T: Scalar> JacobianReport<T> {
    pub fn regularized(&self) -> Matrix2<T> {
        let (u, l) = (&self.unregularized, &self.regularizer);
        [[u[0][0] - l[0][0], u[0][1] - l[0][1]], [u[1][0] - l[1][0], u[1][1] - l[1][1]]]
    }

    pub fn max_real_part(&self) -> T {
        crate::polyrat::max_real_part(&self.eigenvalues)
    }
}

/// The regularizer `(lambda / 2) E[D^2]` has `phi`-Hessian `lambda E[x^2]`
/// for `D = phi x`; with the buffer concentrated at `x = c` that is
/// `lambda c^2`.
pub fn jacobian_report<T: Scalar>(spec: &ObjectiveSpec<T>, c: T, lambda: T) -> Result<JacobianReport<T>> {
    if lambda < T::zero() {
        return Err(Error::InvalidArgument(format!("lambda {lambda} must be >= 0")));
    }
    let zero = T::zero();
    let unregularized = linearize(spec, c).a;
    let regularizer = [[lambda * c * c, zero], [zero, zero]];
    let mut report = JacobianReport { unregularized, regularizer, eigenvalues: Vec::new() };
    report.eigenvalues = eigenvalues(&report.regularized())?;
    Ok(report)
}
