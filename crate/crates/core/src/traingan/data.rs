use ndarray::{Array2, ArrayView2};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Target distribution for training.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", deny_unknown_fields)]
pub enum DataSpec {
    /// Eight equal-weight Gaussians evenly spaced on a circle.
    Ring8 { radius: f64, sigma: f64 },
    /// Equal-weight isotropic Gaussians at arbitrary 2-D centers.
    Custom { centers: Vec<[f64; 2]>, sigma: f64 },
}

impl Default for DataSpec {
    fn default() -> Self {
        Self::Ring8 { radius: 1.0, sigma: 0.05 }
    }
}

impl DataSpec {
    pub fn mixture<T: Scalar>(&self) -> Result<GaussianMixture<T>> {
        let (centers, sigma) = match self {
            Self::Ring8 { radius, sigma } => {
                let centers = (0..8)
                    .map(|k| {
                        let a = std::f64::consts::TAU * k as f64 / 8.0;
                        [radius * a.cos(), radius * a.sin()]
                    })
                    .collect();
                (centers, *sigma)
            }
            Self::Custom { centers, sigma } => (centers.clone(), *sigma),
        };
        GaussianMixture::new(centers.iter().map(|c| [T::lit(c[0]), T::lit(c[1])]).collect(), T::lit(sigma))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMixture<T> {
    centers: Vec<[T; 2]>,
    sigma: T,
}

impl<T: Scalar> GaussianMixture<T> {
    pub fn new(centers: Vec<[T; 2]>, sigma: T) -> Result<Self> {
        if centers.is_empty() {
            return Err(Error::InvalidArgument("mixture needs at least one center".into()));
        }
        if !(sigma > T::zero()) {
            return Err(Error::InvalidArgument(format!("sigma must be positive, got {sigma}")));
        }
        Ok(Self { centers, sigma })
    }

    pub fn ring8(radius: T, sigma: T) -> Self {
        DataSpec::Ring8 { radius: radius.to_f64().unwrap(), sigma: sigma.to_f64().unwrap() }
            .mixture()
            .expect("valid ring")
    }

    pub fn centers(&self) -> &[[T; 2]] {
        &self.centers
    }

    pub fn sigma(&self) -> T {
        self.sigma
    }

    /// `n` draws: a uniform component, then isotropic normal noise.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Array2<T> {
        let mut out = Array2::zeros((n, 2));
        for mut row in out.outer_iter_mut() {
            let c = self.centers[rng.random_range(0..self.centers.len())];
            for (d, v) in row.iter_mut().enumerate() {
                let e: f64 = rng.sample(StandardNormal);
                *v = c[d] + self.sigma * T::lit(e);
            }
        }
        out
    }
}

/// `n` rows of standard normal latents.
pub fn sample_latent<T: Scalar, R: Rng + ?Sized>(n: usize, dim: usize, rng: &mut R) -> Array2<T> {
    Array2::from_shape_simple_fn((n, dim), || T::lit(rng.sample::<f64, _>(StandardNormal)))
}

/// Thresholds for [`mode_metrics`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeThresholds {
    /// High-quality radius in units of the component width.
    pub radius_sigmas: f64,
    /// Minimum share of all samples a mode needs to count as covered.
    pub min_fraction: f64,
}

impl Default for ModeThresholds {
    fn default() -> Self {
        Self { radius_sigmas: 3.0, min_fraction: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeReport {
    pub coverage: usize,
    pub high_quality_rate: f64,
    /// High-quality samples assigned to each center.
    pub per_mode: Vec<usize>,
}

pub const MIN_MODE_SAMPLES: usize = 1000;

/// A sample is high quality when its nearest center lies within
/// `radius_sigmas * sigma`; a mode is covered when at least `min_fraction`
/// of all samples are high quality for it.
pub fn mode_metrics<T: Scalar>(
    samples: ArrayView2<T>,
    mix: &GaussianMixture<T>,
    th: &ModeThresholds,
) -> Result<ModeReport> {
    if samples.ncols() != 2 {
        return Err(Error::DimMismatch { expected: 2, got: samples.ncols() });
    }
    let n = samples.nrows();
    if n < MIN_MODE_SAMPLES {
        return Err(Error::TooFewSamples { needed: MIN_MODE_SAMPLES, got: n });
    }
    let r2 = {
        let r = T::lit(th.radius_sigmas) * mix.sigma;
        r * r
    };
    let mut per_mode = vec![0usize; mix.centers.len()];
    for s in samples.outer_iter() {
        let (k, d2) = mix
            .centers
            .iter()
            .map(|c| {
                let (dx, dy) = (s[0] - c[0], s[1] - c[1]);
                dx * dx + dy * dy
            })
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if d2 < r2 {
            per_mode[k] += 1;
        }
    }
    let need = th.min_fraction * n as f64;
    let coverage = per_mode.iter().filter(|&&c| c as f64 >= need).count();
    let high_quality_rate = per_mode.iter().sum::<usize>() as f64 / n as f64;
    Ok(ModeReport { coverage, high_quality_rate, per_mode })
}
