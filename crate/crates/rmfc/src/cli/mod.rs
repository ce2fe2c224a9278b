//! Instance and solution file formats, seeded generators, and the command
//! layer behind the `rmfc` binary.

pub mod format;
pub mod generate;
pub mod run;

pub use format::{
    parse_instance, parse_metric, parse_solution, parse_tree, serialize_instance, serialize_metric, serialize_solution,
    serialize_tree, Instance, Solution, TreeFile,
};
pub use generate::{generate_metric, generate_tree, MetricKind};
pub use run::{bench, exit_code, run, BenchParams, Certificate, Command, Family, Problem, RunReport, SearchLimits};
