//! Builds R_VV on the 16-dimensional half-spin module of D5 and checks it.

use qforge::rmatrix::{self, CheckMode};
use qforge::{data, pipeline};

fn main() {
    let m = data::bundled_module("d5_halfspin16").unwrap();
    let f = m.field();
    let r = rmatrix::rvv(&m).unwrap();
    println!("R_VV: {} x {}, {} nonzero entries, L = {}", r.mat.nrows(), r.mat.ncols(), r.mat.nnz(), f.l());

    println!("R((2,1),(2,1)) = {}", f.fmt(&r.entry(2, 1, 2, 1)));
    println!("R((1,2),(2,1)) = {}", f.fmt(&r.entry(1, 2, 2, 1)));
    println!("PR((1,16),(16,1)) = {}", f.fmt(&r.flip_left().entry(1, 16, 16, 1)));

    println!("triangular violations: {}", rmatrix::triangular_violations(&r).len());
    println!("intertwiner: {}", rmatrix::check_intertwiner(&m, &r));
    println!("QYBE (full): {}", rmatrix::check_qybe(&r, CheckMode::Full));
    println!("PR symmetric: {}", rmatrix::pr_is_symmetric(&r));

    let st = rmatrix::self_test(&m);
    println!("convention self-test selected: {:?}", st.selected.map(|c| c.to_string()));
    println!("frozen convention: {}", rmatrix::FROZEN);

    let anchors = pipeline::ANCHORS.iter().filter(|a| a.0 == "d5_halfspin16").count();
    println!("{anchors} quoted entries are recorded in pipeline reports for this module");
}
