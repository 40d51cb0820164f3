//! Every example runs to completion.

#[path = "../examples/asymptotics.rs"]
mod asymptotics;
#[path = "../examples/common_mean_interval.rs"]
mod common_mean_interval;
#[path = "../examples/csv_workflow.rs"]
mod csv_workflow;
#[path = "../examples/fixed_width_mean.rs"]
mod fixed_width_mean;
#[path = "../examples/projection_interval.rs"]
mod projection_interval;
#[path = "../examples/reproduce_tables.rs"]
mod reproduce_tables;
#[path = "../examples/sample_size_rules.rs"]
mod sample_size_rules;

#[test]
fn fixed_width_mean_runs() {
    fixed_width_mean::run_example();
}

#[test]
fn sample_size_rules_runs() {
    sample_size_rules::run_example();
}

#[test]
fn projection_interval_runs() {
    projection_interval::run_example();
}

#[test]
fn common_mean_interval_runs() {
    common_mean_interval::run_example();
}

#[test]
fn csv_workflow_runs() {
    csv_workflow::run_example();
}

#[test]
fn reproduce_tables_runs() {
    reproduce_tables::run_example();
}

#[test]
fn asymptotics_runs() {
    asymptotics::run_example();
}
