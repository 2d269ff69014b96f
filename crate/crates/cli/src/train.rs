//! `train`: the Ring8 experiment (or any configured mixture).

use std::fs;
use std::io::BufWriter;
use std::path::PathBuf;

use clap::Args;
use clcgan::diracgan::ObjectiveKind;
use clcgan::traingan::{save_checkpoint, train, TrainConfig, TrainStatus};
use serde::Serialize;

use crate::config::{usage, RunConfig};

#[derive(Args, Debug, Clone, Default)]
pub struct TrainArgs {
    /// JSON run configuration; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub objective: Option<ObjectiveKind>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub iters: Option<usize>,
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq)]
pub struct FinalMetrics {
    pub coverage: usize,
    pub hq_rate: f64,
    pub mean_d_sq: f64,
}

#[derive(Serialize, Debug)]
pub struct TrainReport {
    #[serde(flatten)]
    pub status: TrainStatus,
    pub objective: ObjectiveKind,
    pub lambda: f64,
    pub seed: u64,
    pub iters: usize,
    #[serde(rename = "final")]
    pub final_metrics: Option<FinalMetrics>,
    pub out: String,
}

pub fn resolve(args: &TrainArgs, cfg: &RunConfig) -> TrainConfig {
    let mut t = cfg.train.clone().unwrap_or_default();
    if let Some(o) = args.objective.or(cfg.objective) {
        t.objective = o;
    }
    if let Some(l) = args.lambda.or(cfg.lambda) {
        t.lambda = l;
    }
    if let Some(s) = args.seed.or(cfg.seed) {
        t.seed = s;
    }
    if let Some(n) = args.iters {
        t.iters = n;
    }
    if t.sample_checkpoints.is_empty() {
        t.sample_checkpoints = vec![t.iters];
    }
    t
}

pub fn run(args: &TrainArgs) -> anyhow::Result<TrainReport> {
    let cfg = RunConfig::load_opt(args.config.as_deref())?;
    let tc = resolve(args, &cfg);
    tc.validate().map_err(|e| usage(e.to_string()))?;
    let out = args.out.clone().or(cfg.out).unwrap_or_else(|| PathBuf::from("out"));
    fs::create_dir_all(&out)?;
    fs::write(out.join("config.json"), serde_json::to_string_pretty(&tc)? + "\n")?;

    let outcome = train::<f64>(&tc)?;
    outcome.metrics.write_csv(BufWriter::new(fs::File::create(out.join("metrics.csv"))?))?;
    for dump in &outcome.samples {
        dump.write_csv(BufWriter::new(fs::File::create(out.join(format!("samples_{}.csv", dump.iter)))?))?;
    }
    save_checkpoint(&outcome.generator, &out.join("generator"))?;
    save_checkpoint(&outcome.discriminator, &out.join("discriminator"))?;

    let final_metrics = outcome.metrics.last().map(|r| FinalMetrics {
        coverage: r.coverage,
        hq_rate: r.hq_rate,
        mean_d_sq: r.mean_d_sq,
    });
    Ok(TrainReport {
        status: outcome.status,
        objective: tc.objective,
        lambda: tc.lambda,
        seed: tc.seed,
        iters: tc.iters,
        final_metrics,
        out: out.display().to_string(),
    })
}

pub fn failed(report: &TrainReport) -> bool {
    matches!(report.status, TrainStatus::NonFinite { .. })
}
