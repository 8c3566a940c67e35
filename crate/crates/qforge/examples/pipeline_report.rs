//! Runs the full pipeline on one case and checks the report is reproducible.
//!
//! `cargo run --example pipeline_report -- [case-id]`

use qforge::pipeline::{self, Input, PipelineConfig, Stage};

fn main() {
    let id = std::env::args().nth(1).unwrap_or_else(|| "d5-to-e6".into());
    let cfg = PipelineConfig::new(Input::Case(id), Stage::All);
    let a = pipeline::run(&cfg).unwrap();
    let b = pipeline::run(&cfg).unwrap();
    print!("{}", a.to_text());
    let diff = pipeline::diff_reports(&a.to_json_string(), &b.to_json_string()).unwrap();
    println!("differences between two runs (timings excluded): {}", diff.len());
    println!("exit code would be {}", a.exit_code());
}
