//! Simulated against published values for the short rows of both tables.
//!
//! The full tables take `cargo run --release --bin seqwidth -- simulate --table 1`.

use seqwidth::simulate::tables::{run_table, Table};

pub fn run_example() {
    let reps = std::env::var("REPS").ok().and_then(|r| r.parse().ok()).unwrap_or(1_000);
    for table in [Table::One, Table::Two] {
        let labels = table.group_labels();
        println!("{table:?}, {reps} replications, rows with d >= 0.2");
        let rows = run_table(table, reps, 1, |r| r.d >= 0.2).unwrap();
        for r in &rows {
            for (g, res) in r.results.iter().enumerate() {
                let published = r.row.published[g];
                println!(
                    "  {:.2} model {} d {:.1} {:<10} p {:.3} ({:.2})  mean_n {:8.2} ({:8.2})",
                    r.row.level(),
                    r.row.model.id(),
                    r.row.d,
                    labels[g],
                    res.coverage_p,
                    published.p,
                    res.mean_n,
                    published.mean_n
                );
            }
        }
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
