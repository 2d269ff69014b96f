//! Replay-buffer CLC-GAN training: small MLP generator and discriminator,
//! a proportional penalty on the discriminator over buffered real and fake
//! samples, and mode metrics on a 2-D Gaussian mixture.

mod buffer;
mod checkpoint;
mod data;
mod losses;
mod mlp;
mod optim;

use std::io::Write;

use ndarray::Array2;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::csvfmt::sci;
use crate::diracgan::{make_objective, ObjectiveKind};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub use buffer::ReplayBuffer;
pub use checkpoint::{load_checkpoint, save_checkpoint, Manifest, FORMAT as CHECKPOINT_FORMAT};
pub use data::{mode_metrics, sample_latent, DataSpec, GaussianMixture, ModeReport, ModeThresholds, MIN_MODE_SAMPLES};
pub use losses::{clc_objective_d, clc_objective_g, clc_objective_g_taped, DObjective, GObjective};
pub use mlp::{Gradients, Layer, Mlp, Tape};
pub use optim::{Optimizer, OptimizerConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub objective: ObjectiveKind,
    pub lambda: f64,
    /// Batch size `N`.
    pub batch: usize,
    /// Each buffer holds `buffer_mult * batch` samples.
    pub buffer_mult: usize,
    pub iters: usize,
    pub lr: f64,
    pub optimizer: OptimizerConfig,
    pub seed: u64,
    /// Run index; runs sharing a seed but not a stream draw independent numbers.
    pub stream: u64,
    pub latent_dim: usize,
    pub data: DataSpec,
    pub g_hidden: Vec<usize>,
    pub d_hidden: Vec<usize>,
    /// Metrics are recorded every this many iterations and after the last.
    pub record_every: usize,
    /// Generator samples drawn for each metrics record.
    pub eval_samples: usize,
    pub mode_thresholds: ModeThresholds,
    /// Iterations (0 = before training) at which generator samples are dumped.
    pub sample_checkpoints: Vec<usize>,
    /// Size of each sample dump.
    pub dump_samples: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            objective: ObjectiveKind::Wgan,
            lambda: 0.1,
            batch: 256,
            buffer_mult: 100,
            iters: 20_000,
            lr: 1e-4,
            optimizer: OptimizerConfig::default(),
            seed: 42,
            stream: 0,
            latent_dim: 2,
            data: DataSpec::default(),
            g_hidden: vec![128, 128],
            d_hidden: vec![128, 128],
            record_every: 100,
            eval_samples: 10_000,
            mode_thresholds: ModeThresholds::default(),
            sample_checkpoints: Vec::new(),
            dump_samples: 10_000,
        }
    }
}

impl TrainConfig {
    pub fn buffer_capacity(&self) -> usize {
        self.batch * self.buffer_mult
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.batch == 0 {
            return bad("batch must be at least 1".into());
        }
        if self.buffer_mult == 0 {
            return bad("buffer_mult must be at least 1 so the buffer holds a batch".into());
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return bad(format!("lambda must be finite and >= 0, got {}", self.lambda));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad(format!("lr must be positive, got {}", self.lr));
        }
        if self.latent_dim == 0 {
            return bad("latent_dim must be positive".into());
        }
        if self.g_hidden.contains(&0) || self.d_hidden.contains(&0) {
            return bad("hidden layer widths must be positive".into());
        }
        if self.record_every == 0 {
            return bad("record_every must be positive".into());
        }
        if self.eval_samples < MIN_MODE_SAMPLES {
            return bad(format!("eval_samples must be at least {MIN_MODE_SAMPLES}"));
        }
        if self.dump_samples == 0 {
            return bad("dump_samples must be positive".into());
        }
        if let OptimizerConfig::Adam { beta1, beta2, eps } = self.optimizer {
            if !(0.0..1.0).contains(&beta1) || !(0.0..1.0).contains(&beta2) || !(eps > 0.0) {
                return bad(format!("invalid Adam parameters ({beta1}, {beta2}, {eps})"));
            }
        }
        self.data.mixture::<f64>()?;
        Ok(())
    }

    fn g_dims(&self) -> Vec<usize> {
        std::iter::once(self.latent_dim).chain(self.g_hidden.iter().copied()).chain([2]).collect()
    }

    fn d_dims(&self) -> Vec<usize> {
        std::iter::once(2).chain(self.d_hidden.iter().copied()).chain([1]).collect()
    }

    /// Training, evaluation and dump generators, on disjoint streams.
    fn rngs(&self) -> [ChaCha8Rng; 3] {
        std::array::from_fn(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            rng.set_stream(3 * self.stream + k as u64);
            rng
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// Iterations completed.
    pub iter: usize,
    pub d_obj: f64,
    pub g_obj: f64,
    pub reg: f64,
    pub coverage: usize,
    pub hq_rate: f64,
    pub mean_d_sq: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub records: Vec<MetricsRecord>,
}

impl Metrics {
    pub fn last(&self) -> Option<&MetricsRecord> {
        self.records.last()
    }

    /// CSV with header `iter,d_obj,g_obj,reg,coverage,hq_rate,mean_d_sq`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "iter,d_obj,g_obj,reg,coverage,hq_rate,mean_d_sq")?;
        for r in &self.records {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.iter,
                sci(r.d_obj, 8),
                sci(r.g_obj, 8),
                sci(r.reg, 8),
                r.coverage,
                sci(r.hq_rate, 8),
                sci(r.mean_d_sq, 8)
            )?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii csv")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleDump<T> {
    pub iter: usize,
    pub points: Array2<T>,
}

impl<T: Scalar> SampleDump<T> {
    /// CSV with header `x,y`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y")?;
        for p in self.points.outer_iter() {
            writeln!(w, "{},{}", sci(p[0].to_f64().unwrap(), 8), sci(p[1].to_f64().unwrap(), 8))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum TrainStatus {
    Completed,
    /// A parameter became NaN or infinite during this iteration.
    NonFinite {
        iter: usize,
    },
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub status: TrainStatus,
    pub metrics: Metrics,
    pub generator: Mlp<T>,
    pub discriminator: Mlp<T>,
    pub samples: Vec<SampleDump<T>>,
}

/// Runs the replay-buffer CLC-GAN loop. Each iteration draws a real batch
/// and a latent batch, pushes real and generated samples into their buffers,
/// draws a batch from each buffer, takes one ascent step on `D` and then one
/// on `G` against the updated `D` with the same latents.
///
/// Everything is a deterministic function of the config. A non-finite
/// parameter stops the run; the outcome then carries the metrics so far.
pub fn train<T: Scalar>(cfg: &TrainConfig) -> Result<TrainOutcome<T>> {
    cfg.validate()?;
    let spec = make_objective::<T>(cfg.objective);
    let mix = cfg.data.mixture::<T>()?;
    let [mut rng, mut eval_rng, mut dump_rng] = cfg.rngs();
    let mut g = Mlp::<T>::new(&cfg.g_dims(), &mut rng)?;
    let mut d = Mlp::<T>::new(&cfg.d_dims(), &mut rng)?;
    let mut opt_g = Optimizer::new(cfg.optimizer, &g);
    let mut opt_d = Optimizer::new(cfg.optimizer, &d);
    let mut buf_real = ReplayBuffer::new(cfg.buffer_capacity(), 2)?;
    let mut buf_fake = ReplayBuffer::new(cfg.buffer_capacity(), 2)?;
    let (n, lr, lambda) = (cfg.batch, T::lit(cfg.lr), T::lit(cfg.lambda));

    let mut metrics = Metrics::default();
    let mut samples = Vec::new();
    let mut dump = |g: &Mlp<T>, iter: usize, samples: &mut Vec<SampleDump<T>>| -> Result<()> {
        if cfg.sample_checkpoints.contains(&iter) {
            let z = sample_latent(cfg.dump_samples, cfg.latent_dim, &mut dump_rng);
            samples.push(SampleDump { iter, points: g.forward_batch(z.view())? });
        }
        Ok(())
    };
    dump(&g, 0, &mut samples)?;

    let mut status = TrainStatus::Completed;
    for it in 0..cfg.iters {
        let real = mix.sample(n, &mut rng);
        let z = sample_latent::<T, _>(n, cfg.latent_dim, &mut rng);
        let (fake, g_tape) = g.forward_tape(z.view())?;
        let tag = it as u64;
        buf_real.push_batch(real.view(), tag, &mut rng)?;
        buf_fake.push_batch(fake.view(), tag, &mut rng)?;
        let (br, _) = buf_real.sample(n, &mut rng)?;
        let (bf, _) = buf_fake.sample(n, &mut rng)?;

        let d_out = clc_objective_d(&d, real.view(), fake.view(), br.view(), bf.view(), lambda, &spec)?;
        opt_d.ascend(&mut d, &d_out.grads, lr);
        let g_out = clc_objective_g_taped(&g, &g_tape, fake.view(), &d, &spec)?;
        opt_g.ascend(&mut g, &g_out.grads, lr);

        let done = it + 1;
        if !(d.is_finite() && g.is_finite()) {
            status = TrainStatus::NonFinite { iter: done };
            break;
        }
        if done % cfg.record_every == 0 || done == cfg.iters {
            let z = sample_latent(cfg.eval_samples, cfg.latent_dim, &mut eval_rng);
            let pts = g.forward_batch(z.view())?;
            let rep = mode_metrics(pts.view(), &mix, &cfg.mode_thresholds)?;
            metrics.records.push(MetricsRecord {
                iter: done,
                d_obj: d_out.value.to_f64().unwrap(),
                g_obj: g_out.value.to_f64().unwrap(),
                reg: d_out.reg.to_f64().unwrap(),
                coverage: rep.coverage,
                hq_rate: rep.high_quality_rate,
                mean_d_sq: d_out.mean_d_sq.to_f64().unwrap(),
            });
        }
        dump(&g, done, &mut samples)?;
    }
    Ok(TrainOutcome { status, metrics, generator: g, discriminator: d, samples })
}

#[cfg(test)]
mod tests;
