//! Interval for a contrast `w'μ` of a four-dimensional mean.

use seqwidth::estimators::{projection_estimate, ProjectionSpec};
use seqwidth::simulate::model::Model;
use seqwidth::{run_projection, ProcedureConfig, Synthetic, VecSource};

pub fn run_example() {
    let config = ProcedureConfig::new(0.05, 0.15, 15).unwrap();
    // Difference between the first two coordinates and the last two.
    let w = ProjectionSpec::new(vec![0.5, 0.5, -0.5, -0.5]).unwrap();

    let mut source = Synthetic::vector(Model::Uniform25, 3.0, 4, 5);
    let report = run_projection(&mut source, &w, &config).unwrap();
    println!(
        "w'mu in [{:.4}, {:.4}] from {} vectors (true value 0)",
        report.interval.lower, report.interval.upper, report.observations_used
    );

    // A unit vector reduces the procedure to the mean of one coordinate.
    let rows: Vec<Vec<f64>> = (0..400)
        .map(|i| {
            let x = (i as f64 * 0.37).sin();
            vec![x, 10.0 * x, -x]
        })
        .collect();
    let e1 = ProjectionSpec::unit(3, 0).unwrap();
    let first = run_projection(&mut VecSource::new(rows.clone()), &e1, &config).unwrap();
    let estimate = projection_estimate(&rows[..3 + first.n_final as usize][3..], &e1).unwrap();
    println!(
        "first coordinate: N = {}, estimate {:.4} (direct recomputation {:.4})",
        first.n_final, first.point_estimate, estimate
    );
}

#[allow(dead_code)]
fn main() {
    run_example();
}
