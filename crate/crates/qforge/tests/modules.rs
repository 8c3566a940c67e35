use qforge::exactq::Scalar;
use qforge::rmatrix::{self, CheckMode, Coproduct};
use qforge::rootsys::Q;
use qforge::{data, repmod};

#[test]
fn every_bundled_diagram_validates() {
    for name in data::rep_names() {
        let m = data::bundled_module(name).unwrap();
        let v = repmod::validate_rep(&m);
        assert!(v.all_pass(), "{name}: {:?}", v.checks);
        // Minuscule: every coroot pairing lies in {−1, 0, 1}.
        for i in 0..m.rank() {
            for j in 0..m.p {
                let c = m.coroot(i, j);
                assert!(c >= Q::from_integer(-1) && c <= Q::from_integer(1), "{name}");
            }
        }
    }
}

#[test]
fn corrupted_diagram_is_rejected() {
    let text = data::rep_text("d5_halfspin16").unwrap();
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    let edges = v["edges"].as_array_mut().unwrap();
    let first = edges[0].clone();
    edges.push(first);
    let d = repmod::parse_rep(&v.to_string());
    assert!(d.is_err() || repmod::elaborate(&d.unwrap()).is_err());
}

#[test]
fn r_matrices_are_triangular_graded_and_intertwining() {
    for name in ["d5_halfspin16", "e6_fund27", "e7_fund56"] {
        let m = data::bundled_module(name).unwrap();
        let r = rmatrix::rvv(&m).unwrap();
        assert!(rmatrix::triangular_violations(&r).is_empty(), "{name}");
        assert!(rmatrix::grading_violations(&m, &r).is_empty(), "{name}");
        assert!(rmatrix::check_intertwiner(&m, &r), "{name}");
        assert!(!rmatrix::intertwiner_failures(&m, &r, Coproduct::Standard).is_empty(), "{name}");
        assert!(rmatrix::pr_is_symmetric(&r), "{name}");
        let ri = rmatrix::inverse(&r).unwrap();
        assert_eq!(r.mat.mul(&ri.mat), qforge::sparse::SparseMat::identity(m.p * m.p));
    }
}

#[test]
fn yang_baxter() {
    for name in ["d5_halfspin16", "e6_fund27"] {
        let r = rmatrix::rvv(&data::bundled_module(name).unwrap()).unwrap();
        assert!(rmatrix::check_qybe(&r, CheckMode::Full), "{name}");
    }
    let r = rmatrix::rvv(&data::bundled_module("e7_fund56").unwrap()).unwrap();
    assert!(rmatrix::check_qybe(&r, CheckMode::Sampled { n: 200, seed: 0 }));
    // A single perturbed entry breaks it.
    let mut bad = r.mat.clone();
    let (i, j, v) = bad.triplets().find(|(i, j, _)| i != j).map(|(i, j, v)| (i, j, v.clone())).unwrap();
    bad = bad.add(&qforge::sparse::SparseMat::from_triplets(bad.nrows(), bad.ncols(), vec![(i, j, v)]));
    let bad = rmatrix::RMatrix::new(r.p, r.field, bad);
    assert!(!rmatrix::check_qybe(&bad, CheckMode::Sampled { n: 200, seed: 0 }));
}

#[test]
fn quoted_entries() {
    let m = data::bundled_module("d5_halfspin16").unwrap();
    let f = m.field();
    let r = rmatrix::rvv(&m).unwrap();
    let q = |a, b| f.q_pow(Q::new(a, b)).unwrap();
    assert_eq!(r.entry(2, 1, 2, 1), q(1, 4));
    assert_eq!(r.entry(1, 2, 2, 1), q(1, 4).mul(&q(1, 1).sub(&q(-1, 1))));
    assert_eq!(r.flip_left().entry(1, 16, 16, 1), q(-3, 4));

    let m = data::bundled_module("e7_fund56").unwrap();
    let r = rmatrix::rvv(&m).unwrap();
    assert_eq!(r.entry(5, 11, 5, 11), m.field().q_pow(Q::new(1, 2)).unwrap());
    // wt11 − wt5 is a root, so the (5,11)/(11,5) block has one off-diagonal
    // entry; triangularity puts it in row (5,11).
    let f = m.field();
    assert_eq!(r.mat.row(r.idx(4, 10)).len(), 2);
    assert_eq!(r.entry(5, 11, 11, 5), f.q_pow(Q::new(3, 2)).unwrap().sub(&f.q_pow(Q::new(-1, 2)).unwrap()));
    let row = r.mat.row(r.idx(10, 4));
    assert_eq!(row.len(), 1);
    assert_eq!(row[0].1, f.q_pow(Q::new(1, 2)).unwrap());
    assert_ne!(row[0].1, Scalar::zero());
}

#[test]
fn convention_self_test_selects_the_frozen_convention() {
    let st = rmatrix::self_test(&data::bundled_module("d5_halfspin16").unwrap());
    assert_eq!(st.selected, Some(rmatrix::FROZEN));
    assert_eq!(st.coproduct, Some(rmatrix::FROZEN_COPRODUCT));
}
