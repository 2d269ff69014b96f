use super::{Recorder, Scheme, SimConfig, Stepper, Trajectory};
use crate::diracgan::{dirac_vector_field, Controller, DiracState, ObjectiveSpec};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const DIRAC_LABELS: &[&str] = &["phi", "theta"];
const MOMENTUM_LABELS: &[&str] = &["phi", "theta", "m"];

/// Integrates the Dirac GAN gradient flow with RK4 or Euler, recording
/// every step. Blow-up ends the run early; the partial trajectory is
/// returned with [`Trajectory::terminated_early`] set.
pub fn simulate_dirac<T: Scalar>(
    spec: &ObjectiveSpec<T>,
    ctrl: &Controller<T>,
    init: &DiracState<T>,
    cfg: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    if cfg.scheme != Scheme::Continuous {
        return Err(Error::InvalidArgument(format!(
            "simulate_dirac needs the continuous scheme, got {:?}",
            cfg.scheme
        )));
    }
    if cfg.momentum_tau.is_some() {
        return Err(Error::InvalidArgument("momentum_tau is handled by simulate_momentum".into()));
    }
    let c = init.c;
    let steps = cfg.time_steps();
    let mut rec = Recorder::new(DIRAC_LABELS, steps.len() + 1);
    let mut y = [init.phi, init.theta];
    let mut stepper = Stepper::new(2);
    let field = |y: &[T], dy: &mut [T]| {
        let (dphi, dtheta) = dirac_vector_field(spec, &DiracState::new(y[0], y[1], c), ctrl);
        dy[0] = dphi;
        dy[1] = dtheta;
    };
    if rec.push(T::zero(), &y) {
        for &(t, h) in &steps {
            stepper.step(cfg.method, h, &mut y, field);
            if !rec.push(t, &y) {
                break;
            }
        }
    }
    Ok(Trajectory::finish(rec, vec![T::zero(), c]))
}

/// Discrete gradient steps of size `lr` on the Dirac GAN.
///
/// Simultaneous steps move both players from the same state (identical to
/// Euler with `dt = lr`). Alternating steps move the discriminator first and
/// then the generator against the updated discriminator. With
/// `momentum_beta` set, the discriminator follows an exponential moving
/// average of its gradient. Times are recorded as `k * lr`.
pub fn simulate_discrete<T: Scalar>(
    spec: &ObjectiveSpec<T>,
    ctrl: &Controller<T>,
    init: &DiracState<T>,
    cfg: &SimConfig<T>,
) -> Result<Trajectory<T>> {
    cfg.validate()?;
    if !cfg.scheme.is_discrete() {
        return Err(Error::InvalidArgument("simulate_discrete needs a discrete scheme".into()));
    }
    let c = init.c;
    let lr = cfg.lr;
    let field = |phi: T, theta: T| dirac_vector_field(spec, &DiracState::new(phi, theta, c), ctrl);
    let beta = cfg.momentum_beta;
    let mut rec = Recorder::new(DIRAC_LABELS, cfg.steps + 1);
    let (mut phi, mut theta) = (init.phi, init.theta);
    let mut avg = T::zero();
    let mut smooth = |g: T| match beta {
        Some(b) => {
            avg = b * avg + (T::one() - b) * g;
            avg
        }
        None => g,
    };
    if rec.push(T::zero(), &[phi, theta]) {
        for k in 1..=cfg.steps {
            match cfg.scheme {
                Scheme::DiscreteSimultaneous => {
                    let (dphi, dtheta) = field(phi, theta);
                    phi += lr * smooth(dphi);
                    theta += lr * dtheta;
                }
                _ => {
                    let (dphi, _) = field(phi, theta);
                    phi += lr * smooth(dphi);
                    let (_, dtheta) = field(phi, theta);
                    theta += lr * dtheta;
                }
            }
            if !rec.push(T::from_usize(k).unwrap() * lr, &[phi, theta]) {
                break;
            }
        }
    }
    Ok(Trajectory::finish(rec, vec![T::zero(), c]))
}

/// WGAN Dirac dynamics with an exponentially decayed discriminator input:
///
/// ```text
/// dm/dt     = (c - theta) - tau m
/// dphi/dt   = m
/// dtheta/dt = phi
/// ```
///
/// The momentum state starts at zero. Rows are `(phi, theta, m)`.
pub fn simulate_momentum<T: Scalar>(init: &DiracState<T>, cfg: &SimConfig<T>) -> Result<Trajectory<T>> {
    cfg.validate()?;
    let tau = cfg.momentum_tau.ok_or_else(|| Error::InvalidArgument("simulate_momentum needs momentum_tau".into()))?;
    let c = init.c;
    let steps = cfg.time_steps();
    let mut rec = Recorder::new(MOMENTUM_LABELS, steps.len() + 1);
    let mut y = [init.phi, init.theta, T::zero()];
    let mut stepper = Stepper::new(3);
    let field = |y: &[T], dy: &mut [T]| {
        dy[0] = y[2];
        dy[1] = y[0];
        dy[2] = (c - y[1]) - tau * y[2];
    };
    if rec.push(T::zero(), &y) {
        for &(t, h) in &steps {
            stepper.step(cfg.method, h, &mut y, field);
            if !rec.push(t, &y) {
                break;
            }
        }
    }
    Ok(Trajectory::finish(rec, vec![T::zero(), c, T::zero()]))
}
