//! Behaviour as the interval narrows and as the confidence level rises.

use seqwidth::simulate::model::Model;
use seqwidth::simulate::{asymptotics_sweep, ExperimentCell, Sweep};

pub fn run_example() {
    let base = ExperimentCell::univariate(Model::Uniform25, 0.05, 0.3, 15).with_replications(2_000);

    println!("d -> 0 at alpha = 0.05");
    for r in asymptotics_sweep(&Sweep::HighAccuracy(vec![0.4, 0.2, 0.1, 0.05]), &base).unwrap() {
        println!(
            "  d {:<5} E(N)/N* {:.4}  E(N) - N* {:6.2}  coverage {:.3}",
            r.cell.d,
            r.efficiency_ratio(),
            r.mean_n_final - r.n_opt_star,
            r.coverage_p
        );
    }

    println!("alpha -> 0 at d = 0.3");
    for r in asymptotics_sweep(&Sweep::HighConfidence(vec![0.2, 0.05, 0.01, 0.001]), &base).unwrap() {
        println!(
            "  level {:<6} coverage {:.4} (se {:.4})",
            r.level(),
            r.coverage_p,
            r.mc_se_p
        );
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
