//! Trains the default Ring8 setup and prints the metrics CSV.
//!
//! Usage: `cargo run --release --example ring8 -- [iters] [lambda]`

use clcgan::traingan::{train, TrainConfig};

fn main() -> clcgan::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = TrainConfig::default();
    if let Some(iters) = args.next() {
        cfg.iters = iters.parse().expect("iters must be an integer");
    }
    if let Some(lambda) = args.next() {
        cfg.lambda = lambda.parse().expect("lambda must be a number");
    }
    let start = std::time::Instant::now();
    let out = train::<f64>(&cfg)?;
    print!("{}", out.metrics.to_csv_string());
    eprintln!("{:?} in {:.1?}", out.status, start.elapsed());
    Ok(())
}
