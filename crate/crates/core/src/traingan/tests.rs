use super::*;
use rand::Rng;

fn tiny(iters: usize) -> TrainConfig {
    TrainConfig {
        batch: 16,
        buffer_mult: 4,
        iters,
        g_hidden: vec![8],
        d_hidden: vec![8],
        record_every: 5,
        eval_samples: 1000,
        dump_samples: 50,
        ..TrainConfig::default()
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn zero_iterations_return_initial_nets() {
    let out = train::<f64>(&tiny(0)).unwrap();
    assert!(out.metrics.records.is_empty());
    assert_eq!(out.status, TrainStatus::Completed);
    let cfg = tiny(0);
    let [mut rng, ..] = cfg.rngs();
    let g = Mlp::<f64>::new(&cfg.g_dims(), &mut rng).unwrap();
    assert_eq!(out.generator, g);
}

#[test]
fn runs_are_reproducible_and_streams_differ() {
    let a = train::<f64>(&tiny(20)).unwrap();
    let b = train::<f64>(&tiny(20)).unwrap();
    assert_eq!(a.metrics.to_csv_string(), b.metrics.to_csv_string());
    assert_eq!(a.generator, b.generator);
    let c = train::<f64>(&TrainConfig { stream: 1, ..tiny(20) }).unwrap();
    assert_ne!(a.generator, c.generator);
}

#[test]
fn sample_dumps_do_not_perturb_training() {
    let plain = train::<f64>(&tiny(10)).unwrap();
    let dumped = train::<f64>(&TrainConfig { sample_checkpoints: vec![0, 5, 10], ..tiny(10) }).unwrap();
    assert_eq!(plain.metrics, dumped.metrics);
    assert_eq!(dumped.samples.iter().map(|s| s.iter).collect::<Vec<_>>(), vec![0, 5, 10]);
    assert_eq!(dumped.samples[0].points.dim(), (50, 2));
}

#[test]
fn records_every_k_and_at_the_end() {
    let out = train::<f64>(&tiny(12)).unwrap();
    let iters: Vec<_> = out.metrics.records.iter().map(|r| r.iter).collect();
    assert_eq!(iters, vec![5, 10, 12]);
    for r in &out.metrics.records {
        assert!(r.coverage <= 8);
        assert!((0.0..=1.0).contains(&r.hq_rate));
        assert!((r.reg - 2.0 * 0.1 * r.mean_d_sq).abs() <= 1e-12 * r.reg.abs().max(1.0));
    }
}

#[test]
fn metrics_csv_layout() {
    let out = train::<f64>(&tiny(5)).unwrap();
    let csv = out.metrics.to_csv_string();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iter,d_obj,g_obj,reg,coverage,hq_rate,mean_d_sq"));
    let row: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], "5");
    assert!(row[1].contains('e') && row[1].split('e').next().unwrap().split('.').nth(1).unwrap().len() == 8);
}

#[test]
fn blow_up_is_reported_with_partial_metrics() {
    let cfg = TrainConfig {
        objective: ObjectiveKind::Lsgan,
        optimizer: OptimizerConfig::Sgd,
        lr: 1e6,
        lambda: 0.0,
        record_every: 1,
        ..tiny(50)
    };
    let out = train::<f64>(&cfg).unwrap();
    match out.status {
        TrainStatus::NonFinite { iter } => assert_eq!(out.metrics.records.len(), iter - 1),
        s => panic!("expected a blow-up, got {s:?}"),
    }
}

#[test]
fn config_validation() {
    assert!(TrainConfig { batch: 0, ..tiny(1) }.validate().is_err());
    assert!(TrainConfig { buffer_mult: 0, ..tiny(1) }.validate().is_err());
    assert!(TrainConfig { lambda: -1.0, ..tiny(1) }.validate().is_err());
    assert!(TrainConfig { eval_samples: 10, ..tiny(1) }.validate().is_err());
    let json = r#"{"objective":"wgan","lambda":0.1,"bogus":1}"#;
    assert!(serde_json::from_str::<TrainConfig>(json).is_err());
    let json = r#"{"objective":"sgan","data":{"kind":"ring8","radius":2.0,"sigma":0.1},"optimizer":{"kind":"sgd"}}"#;
    let cfg: TrainConfig = serde_json::from_str(json).unwrap();
    assert_eq!(cfg.objective, ObjectiveKind::Sgan);
    assert_eq!(cfg.optimizer, OptimizerConfig::Sgd);
    assert_eq!(cfg.batch, 256);
}

/// Replays the training loop's buffer traffic and checks that every buffered
/// sample was produced at or before the iteration that reads it.
#[test]
fn buffers_hold_only_past_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (n, cap) = (8, 32);
    let mut buf = ReplayBuffer::<f64>::new(cap, 2).unwrap();
    for it in 0..40u64 {
        let batch = Array2::from_elem((n, 2), it as f64);
        buf.push_batch(batch.view(), it, &mut rng).unwrap();
        let (drawn, tags) = buf.sample(n, &mut rng).unwrap();
        assert!(tags.iter().all(|&t| t <= it));
        for (row, &t) in drawn.outer_iter().zip(&tags) {
            assert_eq!(row[0], t as f64);
        }
        assert_eq!(buf.fill(), ((it as usize + 1) * n).min(cap));
    }
}

fn random_batch(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Array2<f64> {
    Array2::from_shape_simple_fn((n, dim), || rng.random_range(-1.5..1.5))
}

/// Central differences on every parameter with step `h`.
fn fd_grad(net: &Mlp<f64>, h: f64, mut loss: impl FnMut(&Mlp<f64>) -> f64) -> Vec<f64> {
    let base = net.params_flat();
    let mut probe = net.clone();
    (0..base.len())
        .map(|i| {
            let mut p = base.clone();
            p[i] = base[i] + h;
            probe.set_params_flat(&p).unwrap();
            let up = loss(&probe);
            p[i] = base[i] - h;
            probe.set_params_flat(&p).unwrap();
            let down = loss(&probe);
            (up - down) / (2.0 * h)
        })
        .collect()
}

fn assert_close(analytic: &[f64], numeric: &[f64]) {
    for (i, (&a, &b)) in analytic.iter().zip(numeric).enumerate() {
        if a.abs().max(b.abs()) > 1e-6 {
            assert!(rel_err(a, b) < 1e-4, "coord {i}: {a} vs {b}");
        }
    }
}

#[test]
fn discriminator_objective_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for (k, kind) in ObjectiveKind::ALL.into_iter().enumerate() {
        let spec = make_objective::<f64>(kind);
        let d = Mlp::<f64>::new(&[2, 6, 5, 1], &mut rng).unwrap();
        let b: Vec<_> = (0..4).map(|_| random_batch(&mut rng, 5, 2)).collect();
        let lambda = 0.3 * k as f64;
        let eval = |net: &Mlp<f64>| {
            clc_objective_d(net, b[0].view(), b[1].view(), b[2].view(), b[3].view(), lambda, &spec).unwrap()
        };
        let analytic = eval(&d).grads.flat();
        let numeric = fd_grad(&d, 1e-4, |net| eval(net).value);
        assert_close(&analytic, &numeric);
    }
}

#[test]
fn generator_objective_gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for kind in ObjectiveKind::ALL {
        let spec = make_objective::<f64>(kind);
        let g = Mlp::<f64>::new(&[3, 7, 2], &mut rng).unwrap();
        let d = Mlp::<f64>::new(&[2, 6, 1], &mut rng).unwrap();
        let z = random_batch(&mut rng, 6, 3);
        let analytic = clc_objective_g(&g, &d, z.view(), &spec).unwrap().grads.flat();
        let numeric = fd_grad(&g, 1e-4, |net| clc_objective_g(net, &d, z.view(), &spec).unwrap().value);
        assert_close(&analytic, &numeric);
    }
}
