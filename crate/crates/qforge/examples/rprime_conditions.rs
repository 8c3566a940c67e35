//! Companion matrix R' and the three braided vector algebra conditions.

use qforge::rmatrix::{self, CheckMode};
use qforge::specnorm::{self, EigenChoice};
use qforge::data;

fn main() {
    for name in ["d5_halfspin16", "e6_fund27"] {
        let m = data::bundled_module(name).unwrap();
        let r = rmatrix::rvv(&m).unwrap();
        let sd = specnorm::analyze(&r, name, EigenChoice::Auto, 0).unwrap();
        let g = specnorm::check_vector_algebra_conditions(&sd.rnorm, &sd.rprime_generic, CheckMode::Full);
        println!("{name}: generic R' conditions (i, ii, iii) = ({}, {}, {})", g.i, g.ii, g.iii);
        if let Some((form, rp)) = &sd.rprime_closed {
            let c = specnorm::check_vector_algebra_conditions(&sd.rnorm, rp, CheckMode::Full);
            println!("{name}: {form:?} closed form conditions = ({}, {}, {})", c.i, c.ii, c.iii);
        }
    }
}
