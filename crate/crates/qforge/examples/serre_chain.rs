//! Serre scalars read off the matrices, and the q-Serre identities they imply.

use qforge::exactq::QField;
use qforge::inductor;
use qforge::specnorm::{self, EigenChoice};
use qforge::{data, rmatrix};

fn main() {
    for name in ["d5_halfspin16", "e6_fund27", "e7_fund56"] {
        let m = data::bundled_module(name).unwrap();
        let r = rmatrix::rvv(&m).unwrap();
        let rinv = rmatrix::inverse(&r).unwrap();
        let sd = specnorm::analyze(&r, name, EigenChoice::Auto, 0).unwrap();
        let s = inductor::serre_extract(&m, &r, &rinv, &sd.rprime_generic).unwrap();
        let (a, b) = inductor::serre_verify(&s);
        let caught = inductor::serre_mutations(&s).iter().filter(|(_, _, v)| !(v.0 && v.1)).count();
        println!("{name}: (u, v, w, z) = ({}), identities ({a}, {b}), {caught}/8 mutations rejected", s.labels().join(", "));
    }

    // The checker also works on hand-written tuples.
    let f = QField::new(1);
    let q = f.q();
    let c = inductor::serre_check(&q, &q.pow(0).unwrap().neg(), &q, &q, f);
    println!("(q, -1, q, q): free-algebra {:?}, scalar {:?}", c.free, c.scalar);
}
