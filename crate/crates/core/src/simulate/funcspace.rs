//! A 1-D discretized function-space GAN: the discriminator is a function on
//! a uniform grid and the generator is a cloud of particles.

use serde::{Deserialize, Serialize};

use super::{Recorder, Scheme, SimConfig, Stepper, Trajectory};
use crate::diracgan::ObjectiveSpec;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

const LABELS: &[&str] = &["mean_dist", "mean_abs_d"];
const MIN_GRID: usize = 16;
/// Kernel contributions beyond this many bandwidths are dropped.
const KDE_CUTOFF: f64 = 6.0;
const DENSITY_TOL: f64 = 1e-6;

/// Discriminator values on `[-bound, bound]` and generator particles.
///
/// `d_values` are stored relative to the objective's discriminator offset,
/// so `D == 0` is the equilibrium for every objective.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuncSpaceState<T> {
    pub bound: T,
    pub grid: Vec<T>,
    pub d_values: Vec<T>,
    pub particles: Vec<T>,
    pub bandwidth: T,
}

impl<T: Scalar> FuncSpaceState<T> {
    /// Uniform grid of `n` points, `D = 0`, and the given particles clamped
    /// into range. The bandwidth defaults to three grid spacings.
    pub fn new(bound: T, n: usize, particles: Vec<T>, bandwidth: Option<T>) -> Result<Self> {
        if n < MIN_GRID {
            return Err(Error::InvalidArgument(format!("grid needs at least {MIN_GRID} points, got {n}")));
        }
        if !(bound > T::zero()) {
            return Err(Error::InvalidArgument(format!("bound must be positive, got {bound}")));
        }
        if particles.is_empty() {
            return Err(Error::InvalidArgument("at least one particle is required".into()));
        }
        let grid = uniform_grid(bound, n);
        let spacing = grid[1] - grid[0];
        let bandwidth = bandwidth.unwrap_or(T::lit(3.0) * spacing);
        if !(bandwidth > T::zero()) {
            return Err(Error::InvalidArgument(format!("bandwidth must be positive, got {bandwidth}")));
        }
        let particles = particles.into_iter().map(|g| g.max(-bound).min(bound)).collect();
        Ok(Self { bound, grid, d_values: vec![T::zero(); n], particles, bandwidth })
    }

    pub fn spacing(&self) -> T {
        self.grid[1] - self.grid[0]
    }

    /// Gaussian kernel density estimate of the particles on the grid.
    pub fn generator_density(&self) -> Vec<T> {
        let mut out = vec![T::zero(); self.grid.len()];
        kde(&self.particles, self.bound, self.spacing(), self.bandwidth, &mut out);
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.grid.len();
        if n < MIN_GRID {
            return Err(Error::InvalidArgument(format!("grid needs at least {MIN_GRID} points, got {n}")));
        }
        if self.d_values.len() != n {
            return Err(Error::DimMismatch { expected: n, got: self.d_values.len() });
        }
        let expect = uniform_grid(self.bound, n);
        let tol = T::lit(1e-9) * self.bound;
        if self.grid.iter().zip(&expect).any(|(a, b)| (*a - *b).abs() > tol) {
            return Err(Error::InvalidArgument("grid must be uniform on [-bound, bound]".into()));
        }
        if self.particles.is_empty() {
            return Err(Error::InvalidArgument("at least one particle is required".into()));
        }
        Ok(())
    }
}

fn uniform_grid<T: Scalar>(bound: T, n: usize) -> Vec<T> {
    let step = T::lit(2.0) * bound / T::from_usize(n - 1).unwrap();
    (0..n).map(|j| -bound + T::from_usize(j).unwrap() * step).collect()
}

/// Normal density with the given mean and width on `grid`, renormalized so
/// its trapezoid integral is one.
pub fn gaussian_density<T: Scalar>(grid: &[T], mean: T, sigma: T) -> Vec<T> {
    let mut p: Vec<T> = grid
        .iter()
        .map(|&x| {
            let z = (x - mean) / sigma;
            (-T::lit(0.5) * z * z).exp()
        })
        .collect();
    let mass = trapezoid(grid, &p);
    if mass > T::zero() {
        p.iter_mut().for_each(|v| *v /= mass);
    }
    p
}

fn trapezoid<T: Scalar>(grid: &[T], f: &[T]) -> T {
    grid.windows(2).zip(f.windows(2)).map(|(x, y)| (x[1] - x[0]) * (y[0] + y[1]) * T::lit(0.5)).sum()
}

fn kde<T: Scalar>(particles: &[T], bound: T, h: T, bw: T, out: &mut [T]) {
    out.iter_mut().for_each(|v| *v = T::zero());
    let n = out.len();
    let reach = T::lit(KDE_CUTOFF) * bw;
    let inv2 = T::one() / (T::lit(2.0) * bw * bw);
    for &g in particles {
        let lo = ((g - reach + bound) / h).ceil().max(T::zero()).to_usize().unwrap_or(0);
        let hi = ((g + reach + bound) / h).floor().to_isize().unwrap_or(-1);
        if hi < 0 {
            continue;
        }
        let hi = (hi as usize).min(n - 1);
        for (j, v) in out.iter_mut().enumerate().take(hi + 1).skip(lo) {
            let d = -bound + T::from_usize(j).unwrap() * h - g;
            *v += (-d * d * inv2).exp();
        }
    }
    let norm = T::one() / (T::from_usize(particles.len()).unwrap() * bw * (T::TAU()).sqrt());
    out.iter_mut().for_each(|v| *v *= norm);
}

/// Location of the density maximum, refined by a parabola through the
/// log-density at the three nearest grid points (exact for Gaussians).
fn density_mode<T: Scalar>(grid: &[T], p: &[T]) -> T {
    let j = p.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).map(|(j, _)| j).unwrap();
    if j == 0 || j + 1 == p.len() {
        return grid[j];
    }
    let (a, b, c) = (p[j - 1], p[j], p[j + 1]);
    let (a, b, c) = if a > T::zero() && c > T::zero() { (a.ln(), b.ln(), c.ln()) } else { (a, b, c) };
    let curv = a - T::lit(2.0) * b + c;
    let shift = if curv < T::zero() { T::lit(0.5) * (a - c) / curv } else { T::zero() };
    grid[j] + shift * (grid[1] - grid[0])
}

/// Output of [`simulate_funcspace`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FuncSpaceRun<T> {
    /// Rows are `(mean |g_i - mode|, mean |D| on the grid)`; the
    /// equilibrium is `(0, 0)`.
    pub trajectory: Trajectory<T>,
    pub final_state: FuncSpaceState<T>,
    /// Mode of the data density.
    pub mode: T,
}

/// Function-space gradient flow with proportional damping `lambda` on `D`:
///
/// ```text
/// dD(x_j)/dt = p(x_j) h1'(D(x_j)) + p_G(x_j) h2'(D(x_j)) - lambda D(x_j)
/// dg_i/dt    = (1/N) h3'(D(g_i)) D'(g_i)
/// ```
///
/// `p_G` is a Gaussian KDE of the particles. Each particle carries latent
/// mass `1/N`, matching the discrete expectation over latents. `D'` is the
/// central difference on the grid, zero at both ends. `D` and `D'` are
/// linearly interpolated at the particles. Particles are clamped to the grid
/// after every step.
pub fn simulate_funcspace<T: Scalar>(
    spec: &ObjectiveSpec<T>,
    lambda: T,
    init: &FuncSpaceState<T>,
    data_density: &[T],
    cfg: &SimConfig<T>,
) -> Result<FuncSpaceRun<T>> {
    cfg.validate()?;
    init.validate()?;
    if cfg.scheme != Scheme::Continuous {
        return Err(Error::InvalidArgument("the function-space simulator is continuous".into()));
    }
    if !(lambda >= T::zero()) {
        return Err(Error::InvalidArgument(format!("lambda must be >= 0, got {lambda}")));
    }
    let n = init.grid.len();
    if data_density.len() != n {
        return Err(Error::InvalidDensity(format!("{} values for a grid of {n}", data_density.len())));
    }
    if data_density.iter().any(|v| !v.is_finite() || *v < T::zero()) {
        return Err(Error::InvalidDensity("values must be finite and nonnegative".into()));
    }
    let mass = trapezoid(&init.grid, data_density);
    if (mass - T::one()).abs() > T::lit(DENSITY_TOL) {
        return Err(Error::InvalidDensity(format!("integrates to {mass}, expected 1")));
    }

    let bound = init.bound;
    let h = init.spacing();
    let bw = init.bandwidth;
    let np = init.particles.len();
    let inv_np = T::one() / T::from_usize(np).unwrap();
    let inv_2h = T::one() / (T::lit(2.0) * h);
    let mode = density_mode(&init.grid, data_density);

    let mut pg = vec![T::zero(); n];
    let mut slope = vec![T::zero(); n];
    let mut field = |y: &[T], dy: &mut [T]| {
        let (d, g) = y.split_at(n);
        let (dd, dg) = dy.split_at_mut(n);
        kde(g, bound, h, bw, &mut pg);
        for j in 0..n {
            dd[j] = data_density[j] * spec.dh1(d[j]) + pg[j] * spec.dh2(d[j]) - lambda * d[j];
        }
        slope[0] = T::zero();
        slope[n - 1] = T::zero();
        for j in 1..n - 1 {
            slope[j] = (d[j + 1] - d[j - 1]) * inv_2h;
        }
        for (gi, v) in g.iter().zip(dg.iter_mut()) {
            let x = gi.max(-bound).min(bound);
            let cell = ((x + bound) / h).floor().to_usize().unwrap_or(0).min(n - 2);
            let w = (x + bound) / h - T::from_usize(cell).unwrap();
            let dx = d[cell] + w * (d[cell + 1] - d[cell]);
            let sx = slope[cell] + w * (slope[cell + 1] - slope[cell]);
            *v = inv_np * spec.dh3(dx) * sx;
        }
    };

    let summary = |y: &[T]| {
        let (d, g) = y.split_at(n);
        let dist = g.iter().map(|&x| (x - mode).abs()).sum::<T>() * inv_np;
        let mean_d = d.iter().map(|v| v.abs()).sum::<T>() / T::from_usize(n).unwrap();
        [dist, mean_d]
    };

    let steps = cfg.time_steps();
    let mut rec = Recorder::new(LABELS, steps.len() + 1);
    let mut y: Vec<T> = init.d_values.iter().chain(&init.particles).copied().collect();
    let mut stepper = Stepper::new(y.len());
    if rec.push(T::zero(), &summary(&y)) {
        for &(t, h) in &steps {
            stepper.step(cfg.method, h, &mut y, &mut field);
            for g in &mut y[n..] {
                *g = g.max(-bound).min(bound);
            }
            if !rec.push(t, &summary(&y)) {
                break;
            }
        }
    }
    let final_state = FuncSpaceState { d_values: y[..n].to_vec(), particles: y[n..].to_vec(), ..init.clone() };
    Ok(FuncSpaceRun { trajectory: Trajectory::finish(rec, vec![T::zero(), T::zero()]), final_state, mode })
}
