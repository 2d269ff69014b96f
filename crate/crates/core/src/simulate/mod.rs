//! Time-domain simulators for the Dirac GAN (continuous flow, discrete
//! gradient steps, momentum) and a 1-D function-space GAN, plus empirical
//! stability classification of the resulting trajectories.

mod dirac;
mod funcspace;

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::csvfmt::sci;
use crate::error::{Error, Result};
use crate::polyrat::StabilityClass;
use crate::scalar::Scalar;

pub use dirac::{simulate_dirac, simulate_discrete, simulate_momentum};
pub use funcspace::{gaussian_density, simulate_funcspace, FuncSpaceRun, FuncSpaceState};

/// Runs are cut short once any state component exceeds this magnitude.
pub const BLOWUP_THRESHOLD: f64 = 1e6;
pub const DEFAULT_TOL_CONV: f64 = 1e-3;
/// Default classification window as a fraction of the trajectory duration.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Euler,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Continuous,
    DiscreteSimultaneous,
    DiscreteAlternating,
}

impl Scheme {
    pub fn is_discrete(self) -> bool {
        !matches!(self, Self::Continuous)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig<T> {
    pub method: Method,
    /// Continuous step.
    pub dt: T,
    pub t_end: T,
    /// Discrete step size.
    pub lr: T,
    pub steps: usize,
    pub scheme: Scheme,
    /// Continuous momentum decay.
    pub momentum_tau: Option<T>,
    /// Discrete EMA coefficient on the discriminator gradient.
    pub momentum_beta: Option<T>,
}

impl<T: Scalar> Default for SimConfig<T> {
    fn default() -> Self {
        Self {
            method: Method::Rk4,
            dt: T::lit(1e-3),
            t_end: T::lit(20.0),
            lr: T::lit(1e-2),
            steps: 5000,
            scheme: Scheme::Continuous,
            momentum_tau: None,
            momentum_beta: None,
        }
    }
}

impl<T: Scalar> SimConfig<T> {
    pub fn continuous(method: Method, dt: T, t_end: T) -> Self {
        Self { method, dt, t_end, ..Self::default() }
    }

    pub fn discrete(scheme: Scheme, lr: T, steps: usize) -> Self {
        Self { scheme, lr, steps, ..Self::default() }
    }

    pub fn momentum(tau: T, dt: T, t_end: T) -> Self {
        Self { dt, t_end, momentum_tau: Some(tau), ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(self.dt > T::zero()) || !self.dt.is_finite() {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end > T::zero()) || !self.t_end.is_finite() {
            return bad(format!("t_end must be positive, got {}", self.t_end));
        }
        if self.dt > self.t_end {
            return bad(format!("dt {} exceeds t_end {}", self.dt, self.t_end));
        }
        if !(self.lr > T::zero()) || !self.lr.is_finite() {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        if self.steps == 0 {
            return bad("steps must be positive".into());
        }
        if let Some(tau) = self.momentum_tau {
            if !(tau > T::zero()) {
                return bad(format!("momentum_tau must be positive, got {tau}"));
            }
            if self.scheme.is_discrete() {
                return bad("momentum_tau applies to the continuous scheme only".into());
            }
        }
        if let Some(beta) = self.momentum_beta {
            if !(beta >= T::zero() && beta < T::one()) {
                return bad(format!("momentum_beta must lie in [0, 1), got {beta}"));
            }
            if !self.scheme.is_discrete() {
                return bad("momentum_beta applies to discrete schemes only".into());
            }
        }
        Ok(())
    }

    /// Step times `t_1 < ... < t_n = t_end` paired with step sizes: `dt`
    /// throughout, except a shorter final step when `dt` does not divide
    /// `t_end`.
    pub(crate) fn time_steps(&self) -> Vec<(T, T)> {
        let ratio = (self.t_end / self.dt).to_f64().unwrap_or(f64::INFINITY);
        let n = (ratio - 1e-9).ceil().max(1.0) as usize;
        let ragged = (ratio - n as f64).abs() > 1e-9 * ratio.max(1.0);
        (1..=n)
            .map(|k| {
                if k == n && ragged {
                    let prev = T::from_usize(n - 1).unwrap() * self.dt;
                    (self.t_end, self.t_end - prev)
                } else {
                    (T::from_usize(k).unwrap() * self.dt, self.dt)
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TerminalClass {
    Converged,
    Oscillatory,
    Diverged,
}

impl fmt::Display for TerminalClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Converged => "converged",
            Self::Oscillatory => "oscillatory",
            Self::Diverged => "diverged",
        })
    }
}

impl From<StabilityClass> for TerminalClass {
    fn from(c: StabilityClass) -> Self {
        match c {
            StabilityClass::AsymptoticallyStable => Self::Converged,
            StabilityClass::Oscillatory => Self::Oscillatory,
            StabilityClass::Divergent => Self::Diverged,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalMetrics<T> {
    pub final_distance: T,
    /// Largest distance to the equilibrium over the whole run.
    pub peak_amplitude: T,
    /// Peak distance in the final window over peak distance in the first.
    pub decay_ratio: T,
}

/// A recorded run: strictly increasing times and one state row per time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory<T> {
    labels: Vec<String>,
    times: Vec<T>,
    data: Vec<T>,
    equilibrium: Vec<T>,
    terminated_early: bool,
    terminal_class: TerminalClass,
    metrics: TerminalMetrics<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn state(&self, k: usize) -> &[T] {
        &self.data[k * self.dim()..(k + 1) * self.dim()]
    }

    pub fn states(&self) -> impl ExactSizeIterator<Item = &[T]> + '_ {
        self.data.chunks_exact(self.dim())
    }

    pub fn last_state(&self) -> &[T] {
        self.state(self.len() - 1)
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.states().map(|s| s[j]).collect()
    }

    pub fn equilibrium(&self) -> &[T] {
        &self.equilibrium
    }

    /// Whether the run was cut short by blow-up or a non-finite state.
    pub fn terminated_early(&self) -> bool {
        self.terminated_early
    }

    pub fn terminal_class(&self) -> TerminalClass {
        self.terminal_class
    }

    pub fn metrics(&self) -> &TerminalMetrics<T> {
        &self.metrics
    }

    pub fn duration(&self) -> T {
        *self.times.last().unwrap() - self.times[0]
    }

    pub fn distances(&self) -> Vec<T> {
        self.states().map(|s| distance(s, &self.equilibrium)).collect()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    /// Re-runs classification with explicit parameters.
    pub fn classify(&self, tol_conv: T, window: T) -> Result<TerminalClass> {
        classify_trajectory(self, &self.equilibrium, tol_conv, window)
    }

    /// CSV with header `t,<labels>` and `%.12e` values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,{}", self.labels.join(","))?;
        let mut line = String::new();
        for (t, s) in self.times.iter().zip(self.states()) {
            line.clear();
            line.push_str(&sci(t.to_f64().unwrap(), 12));
            for x in s {
                line.push(',');
                line.push_str(&sci(x.to_f64().unwrap(), 12));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }

    pub(crate) fn finish(rec: Recorder<T>, equilibrium: Vec<T>) -> Self {
        let Recorder { labels, times, data, terminated_early } = rec;
        let mut traj = Trajectory {
            labels: labels.iter().map(|s| s.to_string()).collect(),
            times,
            data,
            equilibrium,
            terminated_early,
            terminal_class: TerminalClass::Oscillatory,
            metrics: TerminalMetrics { final_distance: T::zero(), peak_amplitude: T::zero(), decay_ratio: T::one() },
        };
        let window = traj.duration() * T::lit(DEFAULT_WINDOW_FRACTION);
        traj.terminal_class = classify_trajectory(&traj, &traj.equilibrium, T::lit(DEFAULT_TOL_CONV), window)
            .unwrap_or(if terminated_early { TerminalClass::Diverged } else { TerminalClass::Oscillatory });
        traj.metrics = terminal_metrics(&traj, window);
        traj
    }
}

fn distance<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt()
}

fn window_peak<T: Scalar>(times: &[T], dist: &[T], from: T, to: T) -> T {
    times.iter().zip(dist).filter(|(&t, _)| t >= from && t <= to).fold(T::zero(), |m, (_, &d)| m.max(d))
}

fn terminal_metrics<T: Scalar>(traj: &Trajectory<T>, window: T) -> TerminalMetrics<T> {
    let dist = traj.distances();
    let (t0, t1) = (traj.times[0], *traj.times.last().unwrap());
    let first = window_peak(&traj.times, &dist, t0, t0 + window);
    let last = window_peak(&traj.times, &dist, t1 - window, t1);
    let decay_ratio = if first > T::zero() {
        last / first
    } else if last > T::zero() {
        T::infinity()
    } else {
        T::one()
    };
    TerminalMetrics {
        final_distance: *dist.last().unwrap(),
        peak_amplitude: dist.iter().fold(T::zero(), |m, &d| m.max(d)),
        decay_ratio,
    }
}

/// Empirical stability class of a trajectory relative to `eq`.
///
/// Runs cut short by blow-up are `Diverged`. Otherwise the trajectory must
/// span more than `2 * window`; it is `Converged` if every point in the final
/// window is within `tol_conv` of `eq`, `Diverged` if the final distance is
/// over ten times the initial one and the final window peaks higher than the
/// window before it, and `Oscillatory` otherwise.
pub fn classify_trajectory<T: Scalar>(traj: &Trajectory<T>, eq: &[T], tol_conv: T, window: T) -> Result<TerminalClass> {
    if eq.len() != traj.dim() {
        return Err(Error::DimMismatch { expected: traj.dim(), got: eq.len() });
    }
    if traj.terminated_early {
        return Ok(TerminalClass::Diverged);
    }
    let duration = traj.duration();
    if !(duration > T::lit(2.0) * window) {
        return Err(Error::TooShort { duration: duration.to_f64().unwrap(), window: window.to_f64().unwrap() });
    }
    let dist: Vec<T> = traj.states().map(|s| distance(s, eq)).collect();
    let t1 = *traj.times.last().unwrap();
    let tail = t1 - window;
    let converged = traj.times.iter().zip(&dist).filter(|(&t, _)| t >= tail).all(|(_, &d)| d < tol_conv);
    if converged {
        return Ok(TerminalClass::Converged);
    }
    let last = window_peak(&traj.times, &dist, tail, t1);
    let before = window_peak(&traj.times, &dist, tail - window, tail);
    let (d0, dn) = (dist[0], *dist.last().unwrap());
    if dn > T::lit(10.0) * d0 && last > before {
        return Ok(TerminalClass::Diverged);
    }
    Ok(TerminalClass::Oscillatory)
}

/// Accumulates rows and watches for blow-up.
pub(crate) struct Recorder<T> {
    labels: &'static [&'static str],
    times: Vec<T>,
    data: Vec<T>,
    terminated_early: bool,
}

impl<T: Scalar> Recorder<T> {
    pub(crate) fn new(labels: &'static [&'static str], capacity: usize) -> Self {
        Self {
            labels,
            times: Vec::with_capacity(capacity),
            data: Vec::with_capacity(capacity * labels.len()),
            terminated_early: false,
        }
    }

    /// Records a row; returns `false` (and flags the run) once the state is
    /// non-finite or beyond the blow-up threshold.
    pub(crate) fn push(&mut self, t: T, row: &[T]) -> bool {
        debug_assert_eq!(row.len(), self.labels.len());
        self.times.push(t);
        self.data.extend_from_slice(row);
        let limit = T::lit(BLOWUP_THRESHOLD);
        let ok = row.iter().all(|x| x.is_finite() && x.abs() <= limit);
        if !ok {
            self.terminated_early = true;
        }
        ok
    }
}

/// Reusable stage buffers for one-step explicit integrators.
pub(crate) struct Stepper<T> {
    k: [Vec<T>; 4],
    tmp: Vec<T>,
}

impl<T: Scalar> Stepper<T> {
    pub(crate) fn new(n: usize) -> Self {
        Self { k: std::array::from_fn(|_| vec![T::zero(); n]), tmp: vec![T::zero(); n] }
    }

    /// Advances `y` by `h` under `f(y, dy)`.
    pub(crate) fn step(&mut self, method: Method, h: T, y: &mut [T], mut f: impl FnMut(&[T], &mut [T])) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        f(y, k1);
        if method == Method::Euler {
            for (yi, &d) in y.iter_mut().zip(k1.iter()) {
                *yi += h * d;
            }
            return;
        }
        let half = h * T::lit(0.5);
        let axpy = |tmp: &mut Vec<T>, y: &[T], a: T, k: &[T]| {
            for ((t, &yi), &ki) in tmp.iter_mut().zip(y).zip(k) {
                *t = yi + a * ki;
            }
        };
        axpy(tmp, y, half, k1);
        f(tmp, k2);
        axpy(tmp, y, half, k2);
        f(tmp, k3);
        axpy(tmp, y, h, k3);
        f(tmp, k4);
        let sixth = h / T::lit(6.0);
        for i in 0..y.len() {
            y[i] += sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]);
        }
    }
}
