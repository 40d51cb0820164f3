//! Common mean of two samples with unequal spread, for each weight family.

use seqwidth::simulate::model::Model;
use seqwidth::{run_common_mean, ProcedureConfig, Synthetic, WeightSpec};

pub fn run_example() {
    let config = ProcedureConfig::new(0.05, 0.05, 10).unwrap();
    println!(
        "{:<8} {:>6} {:>6} {:>10}   interval",
        "weights", "N0", "N", "var/sample"
    );
    for weights in [WeightSpec::graybill_deal(), WeightSpec::nair(), WeightSpec::elfessi()] {
        // Same seed for every family, so the runs see identical data.
        let mut source = Synthetic::paired(Model::Normal, 1.5, 1.0, 0.5, 99);
        let r = run_common_mean(&mut source, &weights, &config).unwrap();
        println!(
            "{:<8} {:>6} {:>6} {:>10.4}   [{:.4}, {:.4}]",
            weights.name(),
            r.n0,
            r.n_final,
            r.sigma2_hat_stage1,
            r.interval.lower,
            r.interval.upper
        );
    }

    // A user-supplied weight: always trust the first sample.
    let first_only = WeightSpec::new("first", |_, _, _, _| 1.0, |_, _, _, _| 1.0);
    let mut source = Synthetic::paired(Model::Normal, 1.5, 1.0, 0.5, 99);
    let r = run_common_mean(&mut source, &first_only, &config).unwrap();
    println!(
        "{:<8} {:>6} {:>6} {:>10.4}",
        first_only.name(),
        r.n0,
        r.n_final,
        r.sigma2_hat_stage1
    );
}

#[allow(dead_code)]
fn main() {
    run_example();
}
