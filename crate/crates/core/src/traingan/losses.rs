//! The closed-loop-controlled discriminator and generator objectives.

use ndarray::{concatenate, Array2, ArrayView2, Axis};

use super::mlp::{Gradients, Mlp, Tape};
use crate::diracgan::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Value and parameter gradient of the discriminator objective.
#[derive(Clone, Debug)]
pub struct DObjective<T> {
    /// Full objective `U(D)`.
    pub value: T,
    /// `(1/N) [sum h1(D(x_r)) + sum h2(D(x_f))]` over the fresh batches.
    pub adversarial: T,
    /// `(lambda/N) [sum D(x'_r)^2 + sum D(x'_f)^2]` over the buffer batches.
    pub reg: T,
    /// Mean of `D^2` over both buffer batches.
    pub mean_d_sq: T,
    pub grads: Gradients<T>,
}

/// Discriminator objective with the replay-buffer regularizer:
///
/// ```text
/// U(D) = (1/N) [sum h1(D(x_r)) + sum h2(D(x_f))]
///      - (lambda/N) [sum D(x'_r)^2 + sum D(x'_f)^2]
/// ```
///
/// The adversarial part sees only the fresh batches and the regularizer only
/// the buffer batches. All four batches must hold `N` rows. Network outputs
/// are read relative to the objective's discriminator offset.
pub fn clc_objective_d<T: Scalar>(
    d: &Mlp<T>,
    real: ArrayView2<T>,
    fake: ArrayView2<T>,
    buf_real: ArrayView2<T>,
    buf_fake: ArrayView2<T>,
    lambda: T,
    spec: &ObjectiveSpec<T>,
) -> Result<DObjective<T>> {
    let n = real.nrows();
    for b in [fake, buf_real, buf_fake] {
        if b.nrows() != n {
            return Err(Error::DimMismatch { expected: n, got: b.nrows() });
        }
    }
    if n == 0 {
        return Err(Error::InvalidArgument("batches must be nonempty".into()));
    }
    if d.output_dim() != 1 {
        return Err(Error::DimMismatch { expected: 1, got: d.output_dim() });
    }
    // One pass over the stacked batch: fresh real, fresh fake, buffer real, buffer fake.
    let stacked = concatenate(Axis(0), &[real, fake, buf_real, buf_fake])
        .map_err(|_| Error::DimMismatch { expected: d.input_dim(), got: fake.ncols() })?;
    let (out, tape) = d.forward_tape(stacked.view())?;
    let inv_n = T::one() / T::from_usize(n).unwrap();
    let two = T::lit(2.0);

    let mut adversarial = T::zero();
    let mut sum_sq = T::zero();
    let mut dy = Array2::zeros((4 * n, 1));
    for (i, (&y, g)) in out.column(0).iter().zip(dy.column_mut(0)).enumerate() {
        match i / n {
            0 => {
                adversarial += spec.h1(y);
                *g = spec.dh1(y) * inv_n;
            }
            1 => {
                adversarial += spec.h2(y);
                *g = spec.dh2(y) * inv_n;
            }
            _ => {
                sum_sq += y * y;
                *g = -two * lambda * y * inv_n;
            }
        }
    }
    let adversarial = adversarial * inv_n;
    let reg = lambda * inv_n * sum_sq;
    let (grads, _) = d.backward(&tape, dy.view())?;
    Ok(DObjective { value: adversarial - reg, adversarial, reg, mean_d_sq: sum_sq * inv_n / two, grads })
}

/// Value and generator-parameter gradient of `(1/N) sum h3(D(G(z)))`.
#[derive(Clone, Debug)]
pub struct GObjective<T> {
    pub value: T,
    pub grads: Gradients<T>,
}

/// Generator objective, given a forward tape of `G` on the latent batch.
pub fn clc_objective_g_taped<T: Scalar>(
    g: &Mlp<T>,
    g_tape: &Tape<T>,
    fake: ArrayView2<T>,
    d: &Mlp<T>,
    spec: &ObjectiveSpec<T>,
) -> Result<GObjective<T>> {
    let n = fake.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("batch must be nonempty".into()));
    }
    let (out, d_tape) = d.forward_tape(fake)?;
    let inv_n = T::one() / T::from_usize(n).unwrap();
    let mut value = T::zero();
    let mut dy = Array2::zeros((n, 1));
    for (&y, gy) in out.column(0).iter().zip(dy.column_mut(0)) {
        value += spec.h3(y);
        *gy = spec.dh3(y) * inv_n;
    }
    let dx = d.input_gradient(&d_tape, dy.view())?;
    let (grads, _) = g.backward(g_tape, dx.view())?;
    Ok(GObjective { value: value * inv_n, grads })
}

/// Generator objective `(1/N) sum h3(D(G(z)))` and its gradient.
pub fn clc_objective_g<T: Scalar>(
    g: &Mlp<T>,
    d: &Mlp<T>,
    z: ArrayView2<T>,
    spec: &ObjectiveSpec<T>,
) -> Result<GObjective<T>> {
    let (fake, tape) = g.forward_tape(z)?;
    clc_objective_g_taped(g, &tape, fake.view(), d, spec)
}

/// Splits a stacked `(4N, d)` batch back into its four parts. Test helper.
#[cfg(test)]
pub(crate) fn quarter<T: Clone>(x: &Array2<T>, k: usize) -> Array2<T> {
    let n = x.nrows() / 4;
    x.slice(ndarray::s![k * n..(k + 1) * n, ..]).to_owned()
}
