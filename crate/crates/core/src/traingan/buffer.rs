use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Fixed-capacity sample store. Appends until full, then each new sample
/// overwrites a uniformly random slot. Every slot remembers the iteration
/// that produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct ReplayBuffer<T> {
    capacity: usize,
    dim: usize,
    data: Vec<T>,
    tags: Vec<u64>,
}

impl<T: Scalar> ReplayBuffer<T> {
    pub fn new(capacity: usize, dim: usize) -> Result<Self> {
        if capacity == 0 || dim == 0 {
            return Err(Error::InvalidArgument("buffer capacity and dimension must be positive".into()));
        }
        Ok(Self { capacity, dim, data: Vec::with_capacity(capacity * dim), tags: Vec::with_capacity(capacity) })
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn fill(&self) -> usize {
        self.tags.len()
    }

    pub fn is_full(&self) -> bool {
        self.fill() == self.capacity
    }

    pub fn tags(&self) -> &[u64] {
        &self.tags
    }

    pub fn slot(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    /// Filled region as a `(fill, dim)` view.
    pub fn contents(&self) -> ArrayView2<'_, T> {
        ArrayView2::from_shape((self.fill(), self.dim), &self.data).expect("buffer layout")
    }

    pub fn push<R: Rng + ?Sized>(&mut self, sample: &[T], tag: u64, rng: &mut R) -> Result<()> {
        if sample.len() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: sample.len() });
        }
        if self.is_full() {
            let i = rng.random_range(0..self.capacity);
            self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(sample);
            self.tags[i] = tag;
        } else {
            self.data.extend_from_slice(sample);
            self.tags.push(tag);
        }
        Ok(())
    }

    pub fn push_batch<R: Rng + ?Sized>(&mut self, batch: ArrayView2<T>, tag: u64, rng: &mut R) -> Result<()> {
        if batch.ncols() != self.dim {
            return Err(Error::DimMismatch { expected: self.dim, got: batch.ncols() });
        }
        for row in batch.outer_iter() {
            match row.as_slice() {
                Some(s) => self.push(s, tag, rng)?,
                None => self.push(&row.to_vec(), tag, rng)?,
            }
        }
        Ok(())
    }

    /// `n` samples drawn uniformly with replacement from the filled region,
    /// with their tags.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<(Array2<T>, Vec<u64>)> {
        if self.fill() == 0 {
            return Err(Error::TooFewSamples { needed: 1, got: 0 });
        }
        let mut out = Array2::zeros((n, self.dim));
        let mut tags = Vec::with_capacity(n);
        for mut row in out.outer_iter_mut() {
            let i = rng.random_range(0..self.fill());
            row.as_slice_mut().unwrap().copy_from_slice(self.slot(i));
            tags.push(self.tags[i]);
        }
        Ok((out, tags))
    }
}
