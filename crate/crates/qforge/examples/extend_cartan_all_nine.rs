//! Adds a node to nine Dynkin diagrams and identifies the result.

use qforge::inductor::{self, InductionCase};

fn main() {
    for spec in inductor::bundled_cases() {
        let case = InductionCase::from_spec(&spec).unwrap();
        let ext = inductor::extend_cartan(&case).unwrap();
        let ok = ext.matches(&case.target).is_some();
        println!(
            "{:<10} (nu,nu) = {:<4} new column {:?}, attached at {:?}: {} {}",
            case.id,
            case.nu_norm2.to_string(),
            ext.new_column(),
            ext.attachment,
            case.target.name(),
            if ok { "matches" } else { "DOES NOT MATCH" }
        );
    }
}
