//! Root data for the algebras the induction chain passes through.

use qforge::rootsys::{Family, RootSystem};

fn main() {
    for (family, rank) in [(Family::D, 5), (Family::E, 6), (Family::E, 7), (Family::E, 8), (Family::F, 4), (Family::G, 2)] {
        let rs = RootSystem::build(family, rank).expect("supported type");
        let rho: Vec<String> = rs.rho.iter().map(|x| x.to_string()).collect();
        println!(
            "{}: {} positive roots, w0 word of length {}, rho = ({})",
            rs.name(),
            rs.positive_roots.len(),
            rs.w0_word.len(),
            rho.join(", ")
        );
    }

    let e6 = RootSystem::build(Family::E, 6).unwrap();
    println!("\nE6 Cartan matrix:");
    for row in &e6.cartan {
        println!("  {row:?}");
    }
    println!("E6 reduced word for w0: {:?}", e6.w0_word);
}
