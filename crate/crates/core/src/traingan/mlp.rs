//! Fully connected ReLU networks with hand-written reverse mode.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis, Zip};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// One affine map `y = x W + b`, with `W` stored as `(d_in, d_out)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layer<T> {
    pub w: Array2<T>,
    pub b: Array1<T>,
}

/// ReLU on hidden layers, identity on the output layer.
#[derive(Clone, Debug, PartialEq)]
pub struct Mlp<T> {
    layers: Vec<Layer<T>>,
}

/// Activations saved by [`Mlp::forward_tape`] for the backward pass.
#[derive(Clone, Debug)]
pub struct Tape<T> {
    /// Input of each layer; hidden inputs are post-ReLU.
    inputs: Vec<Array2<T>>,
}

/// Parameter gradients, laid out like the network.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients<T> {
    pub layers: Vec<Layer<T>>,
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::InvalidArgument(format!("layer dims {dims:?} need at least two positive entries")));
    }
    Ok(())
}

impl<T: Scalar> Mlp<T> {
    /// Weights and biases uniform in `+-1/sqrt(d_in)` per layer.
    pub fn new<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Self> {
        check_dims(dims)?;
        let layers = dims
            .windows(2)
            .map(|d| {
                let bound = 1.0 / (d[0] as f64).sqrt();
                let mut draw = || T::lit(rng.random_range(-bound..bound));
                let w = Array2::from_shape_simple_fn((d[0], d[1]), &mut draw);
                let b = Array1::from_shape_simple_fn(d[1], &mut draw);
                Layer { w, b }
            })
            .collect();
        Ok(Self { layers })
    }

    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        let layers =
            dims.windows(2).map(|d| Layer { w: Array2::zeros((d[0], d[1])), b: Array1::zeros(d[1]) }).collect();
        Ok(Self { layers })
    }

    /// Single linear layer computing `x`.
    pub fn identity(dim: usize) -> Result<Self> {
        check_dims(&[dim, dim])?;
        Ok(Self { layers: vec![Layer { w: Array2::eye(dim), b: Array1::zeros(dim) }] })
    }

    pub fn from_layers(layers: Vec<Layer<T>>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::InvalidArgument("a network needs at least one layer".into()));
        }
        for (k, l) in layers.iter().enumerate() {
            if l.b.len() != l.w.ncols() {
                return Err(Error::DimMismatch { expected: l.w.ncols(), got: l.b.len() });
            }
            if k > 0 && l.w.nrows() != layers[k - 1].w.ncols() {
                return Err(Error::DimMismatch { expected: layers[k - 1].w.ncols(), got: l.w.nrows() });
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer<T>] {
        &self.layers
    }

    pub fn layer_dims(&self) -> Vec<usize> {
        std::iter::once(self.input_dim()).chain(self.layers.iter().map(|l| l.w.ncols())).collect()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].w.nrows()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().w.ncols()
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.w.len() + l.b.len()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.layers.iter().all(|l| l.w.iter().chain(&l.b).all(|v| v.is_finite()))
    }

    /// Parameters flattened layer by layer, weights (row-major) then bias.
    pub fn params_flat(&self) -> Vec<T> {
        self.layers.iter().flat_map(|l| l.w.iter().chain(&l.b).copied()).collect()
    }

    pub fn set_params_flat(&mut self, flat: &[T]) -> Result<()> {
        if flat.len() != self.param_count() {
            return Err(Error::DimMismatch { expected: self.param_count(), got: flat.len() });
        }
        let mut it = flat.iter();
        for l in &mut self.layers {
            l.w.iter_mut().chain(l.b.iter_mut()).for_each(|p| *p = *it.next().unwrap());
        }
        Ok(())
    }

    pub fn forward(&self, x: ArrayView1<T>) -> Result<Array1<T>> {
        let out = self.forward_batch(x.insert_axis(Axis(0)))?;
        Ok(out.index_axis_move(Axis(0), 0))
    }

    /// Row-wise forward pass over a `(batch, d_in)` matrix.
    pub fn forward_batch(&self, x: ArrayView2<T>) -> Result<Array2<T>> {
        self.check_input(x)?;
        let mut h = self.affine(0, x);
        for k in 1..self.layers.len() {
            relu_inplace(&mut h);
            h = self.affine(k, h.view());
        }
        Ok(h)
    }

    /// Forward pass that keeps what [`Mlp::backward`] needs.
    pub fn forward_tape(&self, x: ArrayView2<T>) -> Result<(Array2<T>, Tape<T>)> {
        self.check_input(x)?;
        let mut inputs = Vec::with_capacity(self.layers.len());
        inputs.push(x.to_owned());
        let mut h = self.affine(0, x);
        for k in 1..self.layers.len() {
            relu_inplace(&mut h);
            let next = self.affine(k, h.view());
            inputs.push(h);
            h = next;
        }
        Ok((h, Tape { inputs }))
    }

    /// Reverse pass for upstream gradient `dy` of shape `(batch, d_out)`.
    /// Returns parameter gradients and the gradient with respect to the input.
    pub fn backward(&self, tape: &Tape<T>, dy: ArrayView2<T>) -> Result<(Gradients<T>, Array2<T>)> {
        let (grads, dx) = self.reverse(tape, dy, true)?;
        Ok((grads.expect("parameter gradients requested"), dx))
    }

    /// Gradient with respect to the input only.
    pub fn input_gradient(&self, tape: &Tape<T>, dy: ArrayView2<T>) -> Result<Array2<T>> {
        Ok(self.reverse(tape, dy, false)?.1)
    }

    fn reverse(&self, tape: &Tape<T>, dy: ArrayView2<T>, params: bool) -> Result<(Option<Gradients<T>>, Array2<T>)> {
        let batch = tape.inputs[0].nrows();
        if tape.inputs.len() != self.layers.len() {
            return Err(Error::DimMismatch { expected: self.layers.len(), got: tape.inputs.len() });
        }
        if dy.dim() != (batch, self.output_dim()) {
            return Err(Error::DimMismatch { expected: batch * self.output_dim(), got: dy.len() });
        }
        let mut grads = Vec::with_capacity(if params { self.layers.len() } else { 0 });
        let mut delta = dy.to_owned();
        for k in (0..self.layers.len()).rev() {
            let input = &tape.inputs[k];
            if params {
                grads.push(Layer { w: input.t().dot(&delta), b: delta.sum_axis(Axis(0)) });
            }
            let mut dx = delta.dot(&self.layers[k].w.t());
            if k > 0 {
                // ReLU gate: the stored input is post-activation, zero where clipped.
                Zip::from(&mut dx).and(input).for_each(|d, &a| {
                    if a <= T::zero() {
                        *d = T::zero();
                    }
                });
            }
            delta = dx;
        }
        grads.reverse();
        Ok((params.then_some(Gradients { layers: grads }), delta))
    }

    fn check_input(&self, x: ArrayView2<T>) -> Result<()> {
        if x.ncols() != self.input_dim() {
            return Err(Error::DimMismatch { expected: self.input_dim(), got: x.ncols() });
        }
        Ok(())
    }

    fn affine(&self, k: usize, x: ArrayView2<T>) -> Array2<T> {
        let l = &self.layers[k];
        let mut y = x.dot(&l.w);
        y += &l.b;
        y
    }

    pub(crate) fn layers_mut(&mut self) -> &mut [Layer<T>] {
        &mut self.layers
    }
}

fn relu_inplace<T: Scalar>(h: &mut Array2<T>) {
    h.mapv_inplace(|v| if v > T::zero() { v } else { T::zero() });
}

impl<T: Scalar> Gradients<T> {
    pub fn flat(&self) -> Vec<T> {
        self.layers.iter().flat_map(|l| l.w.iter().chain(&l.b).copied()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.layers.iter().all(|l| l.w.iter().chain(&l.b).all(|v| v.is_zero()))
    }
}
