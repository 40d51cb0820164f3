use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use seqwidth::engine::{run_common_mean, run_projection, run_univariate, Synthetic, TwoStageReport, VecSource};
use seqwidth::simulate::model::Model;
use seqwidth::simulate::tables::{run_table, write_results_csv, write_table_csv, Table, TableRow};
use seqwidth::simulate::{run_cell, CellKind, ExperimentCell};
use seqwidth::validation::{self, Mode};
use seqwidth::{Error, FirstStageRule, ProcedureConfig, ProjectionSpec, WeightSpec};

#[derive(Parser)]
#[command(name = "seqwidth", version, about = "Two-stage fixed-width confidence intervals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one two-stage procedure on a CSV file or a synthetic source.
    Run(RunArgs),
    /// Simulate a published table or a single custom cell.
    Simulate(SimulateArgs),
    /// Run the acceptance suite.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Mean,
    Projection,
    CommonMean,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Args)]
struct ProcedureArgs {
    #[arg(long, value_enum, default_value = "mean")]
    kind: Kind,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long)]
    d: f64,
    #[arg(long = "n0-min", default_value_t = 15)]
    n0_min: u64,
    /// Weight family for the common mean: gd, nair or elfessi.
    #[arg(long, default_value = "gd")]
    weights: String,
    /// Projection vector, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w: Option<Vec<f64>>,
    /// Use the γ-rule first stage `max{N̄₀, ⌊(f·z/d)^{2/(1+γ)}⌋}` instead of a pilot.
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 1.0, requires = "gamma")]
    f: f64,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    procedure: ProcedureArgs,
    #[arg(long, conflicts_with_all = ["model", "seed"])]
    csv: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    model: Option<u8>,
    #[arg(long)]
    seed: Option<u64>,
    /// Mean of the synthetic source.
    #[arg(long, default_value_t = 0.0)]
    mu: f64,
    /// Scale of the second synthetic sample (common mean only; the first has scale 1).
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    table: Option<u8>,
    #[arg(long, default_value_t = 10_000)]
    reps: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Row filter such as `model=2,d=0.1,alpha=0.05`.
    #[arg(long, requires = "table")]
    rows: Option<String>,
    #[arg(long, value_enum, conflicts_with = "table")]
    kind: Option<Kind>,
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3), default_value_t = 1)]
    model: u8,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, required_unless_present = "table")]
    d: Option<f64>,
    #[arg(long = "n0-min", default_value_t = 15)]
    n0_min: u64,
    /// Scale σ₂ of the second sample (common mean only; σ₁ = 1).
    #[arg(long, default_value_t = 1.0)]
    sigma2: f64,
    #[arg(long, default_value = "gd")]
    weights: String,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ValidateArgs {
    /// Skip the table rows with d ≤ 0.1.
    #[arg(long)]
    fast: bool,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

/// Failure classes mapped onto exit codes 2 and 1.
enum Failure {
    Usage(Error),
    Data(Error),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => e.exit(),
        Err(e) => {
            print_error("usage", &e.to_string().trim().replace('\n', " "), None);
            return ExitCode::from(2);
        }
    };
    if let Err(e) = configure_threads() {
        print_error("usage", &e, None);
        return ExitCode::from(2);
    }
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Validate(args) => cmd_validate(args),
    };
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(e)) => {
            report_failure(&e);
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            report_failure(&e);
            ExitCode::from(1)
        }
    }
}

fn configure_threads() -> Result<(), String> {
    let Ok(raw) = std::env::var("SEQWIDTH_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("SEQWIDTH_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

fn report_failure(e: &Error) {
    let partial = match e {
        Error::RanOutOfData { partial, .. } => serde_json::to_value(partial).ok(),
        _ => None,
    };
    print_error(e.kind(), &e.to_string(), partial);
}

fn print_error(kind: &str, message: &str, partial: Option<serde_json::Value>) {
    let mut body = json!({ "error": kind, "message": message });
    if let Some(p) = partial {
        body["partial"] = p;
    }
    println!("{body}");
}

enum Source {
    Csv(PathBuf),
    Synthetic { model: Model, seed: u64 },
}

enum Target {
    Mean,
    Projection(ProjectionSpec),
    CommonMean(WeightSpec),
}

fn procedure_config(p: &ProcedureArgs) -> Result<ProcedureConfig, Error> {
    let config = ProcedureConfig::new(p.alpha, p.d, p.n0_min)?;
    match p.gamma {
        Some(gamma) => config.with_first_stage_rule(FirstStageRule::GammaRule { gamma, f: p.f }),
        None => Ok(config),
    }
}

fn target(kind: Kind, w: Option<&Vec<f64>>, weights: &str) -> Result<Target, Error> {
    Ok(match kind {
        Kind::Mean => Target::Mean,
        Kind::Projection => {
            let w = w.ok_or_else(|| Error::Domain("--kind projection needs --w".into()))?;
            Target::Projection(ProjectionSpec::new(w.clone())?)
        }
        Kind::CommonMean => Target::CommonMean(WeightSpec::by_name(weights)?),
    })
}

fn cmd_run(args: RunArgs) -> Result<ExitCode, Failure> {
    // Flags are checked in full before any data is read.
    let config = procedure_config(&args.procedure).map_err(Failure::Usage)?;
    let target =
        target(args.procedure.kind, args.procedure.w.as_ref(), &args.procedure.weights).map_err(Failure::Usage)?;
    let source = match (&args.csv, args.model, args.seed) {
        (Some(path), _, _) => Source::Csv(path.clone()),
        (None, Some(m), Some(seed)) => Source::Synthetic {
            model: Model::from_id(m).map_err(Failure::Usage)?,
            seed,
        },
        _ => {
            return Err(Failure::Usage(Error::Domain(
                "give either --csv PATH or both --model and --seed".into(),
            )))
        }
    };
    if !(args.mu.is_finite() && args.sigma2.is_finite() && args.sigma2 >= 0.0) {
        return Err(Failure::Usage(Error::Domain(
            "--mu must be finite and --sigma2 nonnegative".into(),
        )));
    }

    let report = execute(&target, source, &config, args.mu, args.sigma2).map_err(Failure::Data)?;
    write_report(&report, args.format).map_err(Failure::Data)?;
    Ok(ExitCode::SUCCESS)
}

fn execute(
    target: &Target,
    source: Source,
    config: &ProcedureConfig,
    mu: f64,
    sigma2: f64,
) -> Result<TwoStageReport, Error> {
    match (target, source) {
        (Target::Mean, Source::Csv(path)) => run_univariate(&mut VecSource::univariate_csv_file(path)?, config),
        (Target::Mean, Source::Synthetic { model, seed }) => {
            run_univariate(&mut Synthetic::univariate(model, mu, seed), config)
        }
        (Target::Projection(w), Source::Csv(path)) => {
            run_projection(&mut VecSource::vector_csv_file(path, w.dim())?, w, config)
        }
        (Target::Projection(w), Source::Synthetic { model, seed }) => {
            run_projection(&mut Synthetic::vector(model, mu, w.dim(), seed), w, config)
        }
        (Target::CommonMean(g), Source::Csv(path)) => {
            run_common_mean(&mut VecSource::paired_csv_file(path)?, g, config)
        }
        (Target::CommonMean(g), Source::Synthetic { model, seed }) => {
            run_common_mean(&mut Synthetic::paired(model, mu, 1.0, sigma2, seed), g, config)
        }
    }
}

fn write_report(report: &TwoStageReport, format: Format) -> Result<(), Error> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(report)?)?,
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "procedure_kind",
                "pilot_sd",
                "n0",
                "n_final",
                "point_estimate",
                "lower",
                "upper",
                "half_width",
                "sigma2_hat_stage1",
                "queries_used",
                "observations_used",
            ])?;
            w.write_record([
                kind_label(report),
                report.pilot_sd.map(|s| s.to_string()).unwrap_or_default(),
                report.n0.to_string(),
                report.n_final.to_string(),
                report.point_estimate.to_string(),
                report.interval.lower.to_string(),
                report.interval.upper.to_string(),
                report.interval.half_width.to_string(),
                report.sigma2_hat_stage1.to_string(),
                report.queries_used.to_string(),
                report.observations_used.to_string(),
            ])?;
            w.flush()?;
        }
        Format::Text => {
            writeln!(out, "procedure        {}", kind_label(report))?;
            match report.pilot_sd {
                Some(sd) => writeln!(out, "pilot sd         {sd:.6}")?,
                None => writeln!(out, "pilot sd         (no pilot)")?,
            }
            writeln!(out, "first stage N0   {}", report.n0)?;
            writeln!(out, "final size N     {}", report.n_final)?;
            writeln!(out, "stage-1 variance {:.6}", report.sigma2_hat_stage1)?;
            writeln!(out, "estimate         {:.6}", report.point_estimate)?;
            writeln!(
                out,
                "interval         [{:.6}, {:.6}]",
                report.interval.lower, report.interval.upper
            )?;
            writeln!(out, "queries          {}", report.queries_used)?;
            writeln!(out, "observations     {}", report.observations_used)?;
        }
    }
    Ok(())
}

fn kind_label(report: &TwoStageReport) -> String {
    match &report.procedure_kind {
        seqwidth::ProcedureKind::UnivariateMean => "mean".into(),
        seqwidth::ProcedureKind::Projection => "projection".into(),
        seqwidth::ProcedureKind::CommonMean { weights } => format!("common-mean/{weights}"),
    }
}

/// Parses `key=value` pairs over `model`, `d`, `alpha` and `level`.
fn row_filter(spec: &str) -> Result<impl Fn(&TableRow) -> bool, Error> {
    let mut tests: Vec<(String, f64)> = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (key, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Domain(format!("row filter {part:?} is not key=value")))?;
        let key = key.trim().to_string();
        if !matches!(key.as_str(), "model" | "d" | "alpha" | "level") {
            return Err(Error::Domain(format!("unknown row filter key {key:?}")));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Domain(format!("row filter value {value:?} is not a number")))?;
        tests.push((key, value));
    }
    Ok(move |row: &TableRow| {
        tests.iter().all(|(key, value)| {
            let actual = match key.as_str() {
                "model" => row.model.id() as f64,
                "d" => row.d,
                "alpha" => row.alpha,
                _ => row.level(),
            };
            (actual - value).abs() < 1e-9
        })
    })
}

fn cmd_simulate(args: SimulateArgs) -> Result<ExitCode, Failure> {
    if args.reps == 0 {
        return Err(Failure::Usage(Error::Domain("--reps must be positive".into())));
    }
    let stdout = io::stdout();
    if let Some(n) = args.table {
        let table = Table::from_number(n).map_err(Failure::Usage)?;
        let filter = row_filter(args.rows.as_deref().unwrap_or("")).map_err(Failure::Usage)?;
        let rows = run_table(table, args.reps, args.seed, filter).map_err(Failure::Data)?;
        let result = match args.format {
            Format::Json => serde_json::to_string_pretty(&rows)
                .map(|text| println!("{text}"))
                .map_err(Error::from),
            Format::Csv => write_table_csv(table, &rows, stdout.lock()),
            Format::Text => {
                let mut out = stdout.lock();
                let labels = table.group_labels();
                let mut res = writeln!(
                    out,
                    "{:>5} {:>5} {:>5} | {:>22} | {:>22}",
                    "1-a", "model", "d", labels[0], labels[1]
                );
                for r in &rows {
                    let [a, b] = &r.results;
                    res = res.and(writeln!(
                        out,
                        "{:>5.2} {:>5} {:>5.2} | {:.4} {:>9.2} {:>6.2} | {:.4} {:>9.2} {:>6.2}",
                        r.row.level(),
                        r.row.model.id(),
                        r.row.d,
                        a.coverage_p,
                        a.mean_n,
                        a.over_under,
                        b.coverage_p,
                        b.mean_n,
                        b.over_under
                    ));
                }
                res.map_err(Error::from)
            }
        };
        result.map_err(Failure::Data)?;
        return Ok(ExitCode::SUCCESS);
    }

    let model = Model::from_id(args.model).map_err(Failure::Usage)?;
    let d = args.d.expect("clap requires --d without --table");
    let kind = args.kind.unwrap_or(Kind::Mean);
    let mut cell = match kind {
        Kind::Mean => ExperimentCell::univariate(model, args.alpha, d, args.n0_min),
        Kind::Projection => {
            let w = args
                .w
                .clone()
                .ok_or_else(|| Failure::Usage(Error::Domain("--kind projection needs --w".into())))?;
            ProjectionSpec::new(w.clone()).map_err(Failure::Usage)?;
            ExperimentCell {
                kind: CellKind::Projection { w },
                ..ExperimentCell::univariate(model, args.alpha, d, args.n0_min)
            }
        }
        Kind::CommonMean => {
            WeightSpec::by_name(&args.weights).map_err(Failure::Usage)?;
            if !(args.sigma2 > 0.0 && args.sigma2.is_finite()) {
                return Err(Failure::Usage(Error::Domain("--sigma2 must be positive".into())));
            }
            ExperimentCell {
                kind: CellKind::CommonMean {
                    sigma1: 1.0,
                    sigma2: args.sigma2,
                    weights: args.weights.clone(),
                },
                ..ExperimentCell::univariate(model, args.alpha, d, args.n0_min)
            }
        }
    };
    cell = cell.with_replications(args.reps).with_seed(args.seed);
    cell.config().map_err(Failure::Usage)?;
    let result = run_cell(&cell).map_err(Failure::Data)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&result).map_err(|e| Failure::Data(e.into()))?
        ),
        Format::Csv => write_results_csv(std::slice::from_ref(&result), stdout.lock()).map_err(Failure::Data)?,
        Format::Text => println!(
            "p {:.4} (se {:.4})  mean_n {:.2} (se {:.2})  reference {:.2}  over/under {:.2}",
            result.coverage_p, result.mc_se_p, result.mean_n, result.mc_se_n, result.reference, result.over_under
        ),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_validate(args: ValidateArgs) -> Result<ExitCode, Failure> {
    let mode = if args.fast { Mode::Fast } else { Mode::Full };
    let outcomes = validation::run(mode).map_err(Failure::Data)?;
    match args.format {
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&outcomes).map_err(|e| Failure::Data(e.into()))?
        ),
        _ => {
            for o in &outcomes {
                println!("{o}");
            }
        }
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed())
        .map(|o| format!("[{}] {}", o.id, o.name))
        .collect();
    if failed.is_empty() {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("failed: {}", failed.join(", "));
        Ok(ExitCode::from(1))
    }
}
