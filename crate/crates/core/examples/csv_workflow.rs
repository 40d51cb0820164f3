//! Running the procedure on a CSV file, including the case where the file
//! holds too few rows.

use std::io::Write;

use seqwidth::{run_univariate, Error, ProcedureConfig, VecSource};

pub fn run_example() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "yield").unwrap();
    for i in 0..5_000 {
        let x = 50.0 + 3.0 * ((i * 7919 % 1000) as f64 / 1000.0 - 0.5);
        writeln!(file, "{x}").unwrap();
    }
    file.flush().unwrap();

    let config = ProcedureConfig::new(0.05, 0.1, 20).unwrap();
    let mut source = VecSource::univariate_csv_file(file.path()).unwrap();
    let report = run_univariate(&mut source, &config).unwrap();
    println!("{}", serde_json::to_string_pretty(&report).unwrap());
    println!("{} rows left unread", source.remaining());

    let tight = ProcedureConfig::new(0.01, 0.005, 20).unwrap();
    let mut source = VecSource::univariate_csv_file(file.path()).unwrap();
    match run_univariate(&mut source, &tight) {
        Err(Error::RanOutOfData {
            requested,
            available,
            partial,
        }) => println!(
            "d = 0.005 needs {} rows in stage {:?}: asked for {requested}, {available} left",
            partial.n_final.unwrap_or(0),
            partial.stage
        ),
        other => panic!("expected the file to run dry, got {other:?}"),
    }
}

#[allow(dead_code)]
fn main() {
    run_example();
}
