//! Checks the bundled (m+)/(m-) entry claims against slices of R_VV.
//!
//! `cargo run --example m_claims -- [d5_halfspin16 | e6_fund27 | e7_fund56]`

use qforge::{data, inductor, rmatrix};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| "e6_fund27".into());
    let m = data::bundled_module(&name).unwrap();
    let r = rmatrix::rvv(&m).unwrap();
    let rinv = rmatrix::inverse(&r).unwrap();
    let claims = inductor::parse_claims(data::claims_text(&name).expect("bundled claims")).unwrap();

    let verdicts = inductor::verify_mclaims(&m, &r, &rinv, &claims).unwrap();
    for v in &verdicts {
        let ratio = v.ratio.as_ref().map(|x| format!("  (slice/claim = {x})")).unwrap_or_default();
        println!("{} {}{}", if v.pass { "ok  " } else { "FAIL" }, v.text, ratio);
    }
    let (plus, minus) = inductor::select_slice_conventions(&m, &r, &rinv, &claims).unwrap();
    println!("slice conventions reproducing every m+ claim: {:?}", plus.iter().map(|c| c.to_string()).collect::<Vec<_>>());
    println!("slice conventions proportional on every m- claim: {:?}", minus.iter().map(|c| c.to_string()).collect::<Vec<_>>());
}
