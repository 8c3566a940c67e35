//! The spectrum of PR_VV checked against an independent Casimir computation.
//!
//! For minuscule V(μ), V ⊗ V = ⊕ V(μ + ν) over the weights ν of V with μ + ν
//! dominant, each once, and PR acts on V(λ) by ±q^{((λ,λ+2ρ) − 2(μ,μ+2ρ))/2}.

use qforge::rootsys::{add_scaled, dot, Q};
use qforge::specnorm::{self, EigenChoice};
use qforge::{data, rmatrix};

fn casimir_exponents(name: &str) -> Vec<Q> {
    let m = data::bundled_module(name).unwrap();
    let rs = &m.rs;
    let mu = &m.weights[m.highest_index()];
    let c = |l: &[Q]| dot(l, &add_scaled(l, &rs.rho, Q::from_integer(2)));
    let mut out: Vec<Q> = m
        .weights
        .iter()
        .map(|nu| add_scaled(mu, nu, Q::from_integer(1)))
        .filter(|l| (0..rs.rank).all(|i| rs.coroot_pairing(l, i) >= Q::from_integer(0)))
        .map(|l| (c(&l) - c(mu) * 2) / 2)
        .collect();
    out.sort();
    out.reverse();
    out
}

fn check(name: &str, lambda: Q) {
    let m = data::bundled_module(name).unwrap();
    let r = rmatrix::rvv(&m).unwrap();
    let sd = specnorm::analyze(&r, name, EigenChoice::Auto, 7).unwrap();
    let mut eig = sd.eigenvalues.clone();
    eig.sort_by_key(|e| std::cmp::Reverse(e.exp));
    let exps: Vec<Q> = eig.iter().map(|e| e.exp).collect();
    assert_eq!(exps, casimir_exponents(name), "{name}");
    // Symmetric and antisymmetric summands alternate, starting from V(2μ).
    for (k, e) in eig.iter().enumerate() {
        assert_eq!(e.sign, if k % 2 == 0 { 1 } else { -1 }, "{name}");
    }
    assert_eq!(sd.lambda, m.field().q_pow(lambda).unwrap(), "{name}");
    assert!(specnorm::annihilates(&r.flip_left().mat, &sd.minpoly));
}

#[test]
fn d5_half_spin() {
    check("d5_halfspin16", Q::new(-3, 4));
    assert_eq!(casimir_exponents("d5_halfspin16"), vec![Q::new(5, 4), Q::new(-3, 4), Q::new(-27, 4)]);
}

#[test]
fn e6_fundamental() {
    check("e6_fund27", Q::new(-2, 3));
    assert_eq!(casimir_exponents("e6_fund27"), vec![Q::new(4, 3), Q::new(-2, 3), Q::new(-26, 3)]);
}

#[test]
fn e7_fundamental() {
    check("e7_fund56", Q::new(-1, 2));
    assert_eq!(casimir_exponents("e7_fund56"), vec![Q::new(3, 2), Q::new(-1, 2), Q::new(-21, 2), Q::new(-57, 2)]);
}

#[test]
fn explicit_eigen_choice_rescales() {
    let m = data::bundled_module("d5_halfspin16").unwrap();
    let r = rmatrix::rvv(&m).unwrap();
    let sd = specnorm::analyze(&r, "d5_halfspin16", EigenChoice::Explicit(Q::new(-3, 4)), 0).unwrap();
    assert_eq!(sd.lambda, m.field().q_pow(Q::new(-3, 4)).unwrap());
    assert!(specnorm::analyze(&r, "d5_halfspin16", EigenChoice::Explicit(Q::new(5, 4)), 0).is_err());
}
