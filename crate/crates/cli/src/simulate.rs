//! `simulate`: one Dirac GAN trajectory to CSV, summary to stdout.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use clcgan::diracgan::{DiracState, ObjectiveKind};
use clcgan::simulate::{
    simulate_dirac, simulate_discrete, simulate_momentum, Method, Scheme, SimConfig, TerminalClass, TerminalMetrics,
    Trajectory, BLOWUP_THRESHOLD,
};
use serde::Serialize;

use crate::analysis::{System, SystemArgs};
use crate::config::{parse_serde, usage, RunConfig};

/// Horizon used when neither flags nor config set one.
pub const DEFAULT_T_END: f64 = 100.0;

#[derive(Args, Debug, Clone, Default)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Output directory for trajectory.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Initial discriminator slope.
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<f64>,
    /// Initial generator location.
    #[arg(long, allow_hyphen_values = true)]
    pub theta0: Option<f64>,
    /// rk4 or euler.
    #[arg(long, value_parser = parse_serde::<Method>)]
    pub method: Option<Method>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// continuous, discrete-simultaneous or discrete-alternating.
    #[arg(long, value_parser = parse_serde::<Scheme>)]
    pub scheme: Option<Scheme>,
    /// Discrete step size.
    #[arg(long)]
    pub lr: Option<f64>,
    /// Number of discrete steps.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Continuous momentum decay (WGAN only, no controller).
    #[arg(long)]
    pub momentum_tau: Option<f64>,
    /// Discrete EMA coefficient on the discriminator gradient.
    #[arg(long)]
    pub momentum_beta: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Dynamics {
    Continuous,
    Discrete,
    Momentum,
}

#[derive(Serialize, Debug)]
pub struct SimulateReport {
    pub dynamics: Dynamics,
    pub objective: ObjectiveKind,
    pub c: f64,
    pub lambda: f64,
    pub terminal_class: TerminalClass,
    pub terminated_early: bool,
    pub non_finite: bool,
    pub metrics: TerminalMetrics<f64>,
    pub rows: usize,
    pub t_final: f64,
    pub trajectory: String,
}

pub struct SimulateRun {
    pub report: SimulateReport,
    pub trajectory: Trajectory<f64>,
}

impl SimulateRun {
    /// Non-finite values that never passed through a recognized blow-up.
    pub fn unexplained_non_finite(&self) -> bool {
        let crossed = self
            .trajectory
            .states()
            .any(|s| s.iter().all(|x| x.is_finite()) && s.iter().any(|x| x.abs() > BLOWUP_THRESHOLD));
        self.report.non_finite && !(crossed && self.report.terminal_class == TerminalClass::Diverged)
    }
}

pub fn resolve_sim(args: &SimulateArgs, cfg: &RunConfig) -> SimConfig<f64> {
    let mut sim = cfg.sim.clone().unwrap_or_else(|| SimConfig { t_end: DEFAULT_T_END, ..SimConfig::default() });
    let set = |dst: &mut f64, v: Option<f64>| {
        if let Some(v) = v {
            *dst = v;
        }
    };
    if let Some(m) = args.method {
        sim.method = m;
    }
    set(&mut sim.dt, args.dt);
    set(&mut sim.t_end, args.t_end);
    if let Some(s) = args.scheme {
        sim.scheme = s;
    }
    set(&mut sim.lr, args.lr);
    if let Some(n) = args.steps {
        sim.steps = n;
    }
    if args.momentum_tau.is_some() {
        sim.momentum_tau = args.momentum_tau;
    }
    if args.momentum_beta.is_some() {
        sim.momentum_beta = args.momentum_beta;
    }
    sim
}

/// Runs the configured simulation without touching the filesystem.
pub fn run_simulation(sys: &System, init: DiracState<f64>, sim: &SimConfig<f64>) -> anyhow::Result<SimulateRun> {
    sim.validate().map_err(|e| usage(e.to_string()))?;
    let (dynamics, trajectory) = if sim.momentum_tau.is_some() {
        if sys.objective != ObjectiveKind::Wgan || sys.lambda != 0.0 {
            return Err(usage("momentum dynamics are defined for uncontrolled WGAN only"));
        }
        (Dynamics::Momentum, simulate_momentum(&init, sim)?)
    } else if sim.scheme.is_discrete() {
        (Dynamics::Discrete, simulate_discrete(&sys.spec, &sys.controller(), &init, sim)?)
    } else {
        (Dynamics::Continuous, simulate_dirac(&sys.spec, &sys.controller(), &init, sim)?)
    };
    let report = SimulateReport {
        dynamics,
        objective: sys.objective,
        c: sys.c,
        lambda: sys.lambda,
        terminal_class: trajectory.terminal_class(),
        terminated_early: trajectory.terminated_early(),
        non_finite: trajectory.last_state().iter().any(|x| !x.is_finite()),
        metrics: *trajectory.metrics(),
        rows: trajectory.len(),
        t_final: *trajectory.times().last().unwrap(),
        trajectory: String::new(),
    };
    Ok(SimulateRun { report, trajectory })
}

pub fn run(args: &SimulateArgs) -> anyhow::Result<SimulateRun> {
    let cfg = RunConfig::load_opt(args.system.config.as_deref())?;
    let sys = System::resolve(&args.system, &cfg)?;
    let init = cfg.init;
    let phi = args.phi0.or(init.map(|i| i.phi)).unwrap_or(0.0);
    let theta = args.theta0.or(init.map(|i| i.theta)).unwrap_or(0.0);
    let sim = resolve_sim(args, &cfg);
    let mut run = run_simulation(&sys, DiracState::new(phi, theta, sys.c), &sim)?;
    let out = args.out.clone().or(cfg.out).unwrap_or_else(|| PathBuf::from("out"));
    let path = write_trajectory(&run.trajectory, &out)?;
    run.report.trajectory = path.display().to_string();
    Ok(run)
}

fn write_trajectory(traj: &Trajectory<f64>, dir: &Path) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join("trajectory.csv");
    let file = std::io::BufWriter::new(fs::File::create(&path)?);
    traj.write_csv(file)?;
    Ok(path)
}
