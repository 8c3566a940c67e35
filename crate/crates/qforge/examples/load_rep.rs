//! Loads a representation diagram and validates the resulting module.
//!
//! `cargo run --example load_rep -- [bundled-name | path.json]`

use qforge::{data, repmod};

fn main() {
    let arg = std::env::args().nth(1).unwrap_or_else(|| "e6_fund27".into());
    let text = match data::rep_text(&arg) {
        Some(t) => t.to_string(),
        None => std::fs::read_to_string(&arg).expect("readable diagram file"),
    };
    let diagram = repmod::parse_rep(&text).expect("diagram parses");
    let (module, warnings) = repmod::elaborate(&diagram).expect("diagram elaborates");
    println!("{}: {}-dimensional module of {}", module.name, module.p, module.rs.name());
    let top = module.highest_index();
    println!("highest weight at basis index {} (node {})", top + 1, module.node_ids[top]);

    let report = repmod::validate_rep(&module);
    for c in &report.checks {
        println!("  {} {}", if c.pass { "ok  " } else { "FAIL" }, c.name);
    }
    for w in &warnings {
        println!("  warning: {w}");
    }
    println!("bundled diagrams: {}", data::rep_names().collect::<Vec<_>>().join(", "));
}
