//! Fixed-width interval for the mean of a heavy-tailed stream.
//!
//! Run with `cargo run --release --example fixed_width_mean`.

use seqwidth::simulate::model::Model;
use seqwidth::{run_univariate, ProcedureConfig, Synthetic};

pub fn run_example() {
    let config = ProcedureConfig::new(0.05, 0.1, 15).expect("valid configuration");
    let mut source = Synthetic::univariate(Model::StudentT5, 4.0, 2024);
    let report = run_univariate(&mut source, &config).expect("an unbounded source never runs dry");

    println!("pilot sd        {:.4}", report.pilot_sd.unwrap_or(f64::NAN));
    println!("first stage     N0 = {}", report.n0);
    println!("final size      N  = {}", report.n_final);
    println!(
        "95% interval    [{:.4}, {:.4}] around {:.4}",
        report.interval.lower, report.interval.upper, report.point_estimate
    );
    println!(
        "cost            {} queries, {} observations",
        report.queries_used, report.observations_used
    );
    assert!((report.interval.width() - 0.2).abs() < 1e-12);
    assert!(report.queries_used <= 3);
}

#[allow(dead_code)]
fn main() {
    run_example();
}
