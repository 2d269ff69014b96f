//! `sweep`: a parameter grid fanned out over threads, one CSV row per point.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use clcgan::csvfmt::sci;
use clcgan::diracgan::{apply_clc, linearize, transfer_functions, DiracState, ObjectiveKind, Realization};
use clcgan::polyrat::DEFAULT_AXIS_TOL;
use clcgan::simulate::TerminalClass;
use clcgan::traingan::{train, TrainConfig, TrainStatus};
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{System, SystemArgs};
use crate::config::{parse_serde, usage, RunConfig, SweepSpec, Target};
use crate::simulate::{resolve_sim, run_simulation, SimulateArgs};

#[derive(Args, Debug, Clone, Default)]
pub struct SweepArgs {
    /// JSON run configuration with a `sweep` section; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory for sweep.csv.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Base seed for train sweeps; each point gets its own stream.
    #[arg(long)]
    pub seed: Option<u64>,
    /// dirac or train.
    #[arg(long, value_parser = parse_serde::<Target>)]
    pub target: Option<Target>,
    #[arg(long, value_delimiter = ',')]
    pub objectives: Option<Vec<ObjectiveKind>>,
    #[arg(long, value_delimiter = ',')]
    pub lambdas: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub realizations: Option<Vec<Realization>>,
}

#[derive(Serialize, Debug)]
pub struct SweepReport {
    pub target: Target,
    pub rows: usize,
    pub failed: usize,
    pub csv: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Point {
    objective: ObjectiveKind,
    lambda: f64,
    realization: Option<Realization>,
}

fn grid(spec: &SweepSpec) -> Vec<Point> {
    let realizations: Vec<Option<Realization>> = match spec.target {
        Target::Dirac => spec.realizations.iter().copied().map(Some).collect(),
        Target::Train => vec![None],
    };
    let mut points = Vec::new();
    for &objective in &spec.objectives {
        for &lambda in &spec.lambdas {
            for &realization in &realizations {
                points.push(Point { objective, lambda, realization });
            }
        }
    }
    points.sort_by(|a, b| {
        a.objective.cmp(&b.objective).then(a.lambda.total_cmp(&b.lambda)).then(a.realization.cmp(&b.realization))
    });
    points.dedup();
    points
}

fn resolve(args: &SweepArgs, cfg: &RunConfig) -> SweepSpec {
    let mut spec = cfg.sweep.clone().unwrap_or(SweepSpec {
        target: Target::Dirac,
        objectives: vec![],
        lambdas: vec![],
        realizations: vec![Realization::InputFeedback],
    });
    if let Some(t) = args.target {
        spec.target = t;
    }
    if let Some(o) = &args.objectives {
        spec.objectives = o.clone();
    }
    if let Some(l) = &args.lambdas {
        spec.lambdas = l.clone();
    }
    if let Some(r) = &args.realizations {
        spec.realizations = r.clone();
    }
    spec
}

fn clean(msg: &str) -> String {
    msg.replace([',', '\n', '"'], " ")
}

fn dirac_row(p: &Point, cfg: &RunConfig, sim_args: &SimulateArgs) -> String {
    let realization = p.realization.expect("dirac points carry a realization");
    let sys_args = SystemArgs {
        objective: Some(p.objective),
        lambda: Some(p.lambda),
        realization: Some(realization),
        ..SystemArgs::default()
    };
    let head = format!("{},{},{}", p.objective, p.lambda, realization);
    let result = (|| -> anyhow::Result<String> {
        let sys = System::resolve(&sys_args, cfg)?;
        let init = cfg.init.map_or(DiracState::new(0.0, 0.0, sys.c), |i| DiracState::new(i.phi, i.theta, sys.c));
        let run = run_simulation(&sys, init, &resolve_sim(sim_args, cfg))?;
        let (td, _) = transfer_functions(&apply_clc(&linearize(&sys.spec, sys.c), &sys.controller()))?;
        let pole_class = TerminalClass::from(td.classify(DEFAULT_AXIS_TOL)?);
        let m = run.report.metrics;
        Ok(format!(
            "ok,{},{},{},{},{}",
            run.report.terminal_class,
            pole_class,
            sci(m.final_distance, 8),
            sci(m.peak_amplitude, 8),
            sci(m.decay_ratio, 8)
        ))
    })();
    match result {
        Ok(tail) => format!("{head},{tail}"),
        Err(e) => format!("{head},error: {},,,,,", clean(&e.to_string())),
    }
}

fn train_row(p: &Point, stream: u64, base: &TrainConfig) -> String {
    let head = format!("{},{}", p.objective, p.lambda);
    let cfg =
        TrainConfig { objective: p.objective, lambda: p.lambda, stream, sample_checkpoints: vec![], ..base.clone() };
    match train::<f64>(&cfg) {
        Ok(out) => {
            let status = match out.status {
                TrainStatus::Completed => "ok".to_string(),
                TrainStatus::NonFinite { iter } => format!("non-finite at {iter}"),
            };
            match out.metrics.last() {
                Some(r) => format!(
                    "{head},{status},{},{},{},{},{}",
                    r.coverage,
                    sci(r.hq_rate, 8),
                    sci(r.mean_d_sq, 8),
                    sci(r.d_obj, 8),
                    sci(r.g_obj, 8)
                ),
                None => format!("{head},{status},,,,,"),
            }
        }
        Err(e) => format!("{head},error: {},,,,,", clean(&e.to_string())),
    }
}

pub fn run(args: &SweepArgs) -> anyhow::Result<SweepReport> {
    let cfg = RunConfig::load_opt(args.config.as_deref())?;
    let spec = resolve(args, &cfg);
    let points = grid(&spec);
    if points.is_empty() {
        return Err(usage("the sweep grid is empty"));
    }
    if let Some(bad) = points.iter().find(|p| !(p.lambda >= 0.0 && p.lambda.is_finite())) {
        return Err(usage(format!("lambda {} must be finite and >= 0", bad.lambda)));
    }
    let sim_args = SimulateArgs::default();
    let mut base = cfg.train.clone().unwrap_or_default();
    if let Some(s) = args.seed.or(cfg.seed) {
        base.seed = s;
    }
    let (header, rows): (&str, Vec<String>) = match spec.target {
        Target::Dirac => (
            "objective,lambda,realization,status,terminal_class,pole_class,final_distance,peak_amplitude,decay_ratio",
            points.par_iter().map(|p| dirac_row(p, &cfg, &sim_args)).collect(),
        ),
        Target::Train => (
            "objective,lambda,status,coverage,hq_rate,mean_d_sq,d_obj,g_obj",
            points.par_iter().enumerate().map(|(i, p)| train_row(p, i as u64, &base)).collect(),
        ),
    };
    let status_col = header.split(',').position(|h| h == "status").unwrap();
    let failed = rows.iter().filter(|r| r.split(',').nth(status_col) != Some("ok")).count();
    let mut csv = String::new();
    writeln!(csv, "{header}")?;
    for r in &rows {
        writeln!(csv, "{r}")?;
    }
    let out = args.out.clone().or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    let path = out.join("sweep.csv");
    fs::write(&path, csv)?;
    let report = SweepReport { target: spec.target, rows: rows.len(), failed, csv: path.display().to_string() };
    if failed == rows.len() {
        anyhow::bail!("all {} sweep points failed; see {}", failed, report.csv);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_sorted_and_deduplicated() {
        let spec = SweepSpec {
            target: Target::Dirac,
            objectives: vec![ObjectiveKind::Lsgan, ObjectiveKind::Wgan],
            lambdas: vec![2.0, 0.0, 2.0],
            realizations: vec![Realization::OutputDamping, Realization::InputFeedback],
        };
        let g = grid(&spec);
        assert_eq!(g.len(), 8);
        assert_eq!(
            g[0],
            Point { objective: ObjectiveKind::Wgan, lambda: 0.0, realization: Some(Realization::InputFeedback) }
        );
        assert_eq!(g[7].objective, ObjectiveKind::Lsgan);
    }

    #[test]
    fn train_grid_ignores_realizations() {
        let spec = SweepSpec {
            target: Target::Train,
            objectives: vec![ObjectiveKind::Wgan],
            lambdas: vec![0.0, 0.1],
            realizations: vec![Realization::OutputDamping, Realization::InputFeedback],
        };
        assert_eq!(grid(&spec).len(), 2);
    }
}
