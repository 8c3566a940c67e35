//! Minimal polynomial of PR_VV, its monomial roots and the normalization.
//!
//! `cargo run --example minimal_polynomial -- [d5_halfspin16 | e6_fund27 | e7_fund56]`

use qforge::specnorm::{self, EigenChoice};
use qforge::{data, rmatrix};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "d5_halfspin16".into());
    let m = data::bundled_module(&name).unwrap();
    let f = m.field();
    let r = rmatrix::rvv(&m).unwrap();
    let sd = specnorm::analyze(&r, &name, EigenChoice::Auto, 0).unwrap();

    println!("{name}: minimal polynomial of degree {:?}", sd.minpoly.degree());
    let labels: Vec<String> = sd.eigenvalues.iter().map(|e| e.label()).collect();
    println!("eigenvalues of PR_VV: {}", labels.join(", "));
    println!("lambda = {}", f.fmt(&sd.lambda));
    let normalized: Vec<String> = sd.normalized.iter().map(|e| e.label()).collect();
    println!("spectrum of PR after normalization: {}", normalized.join(", "));
    println!("minpoly annihilates PR: {}", specnorm::annihilates(&r.flip_left().mat, &sd.minpoly));
}
