use std::collections::HashSet;

use qforge::rootsys::{self, dot, Family, RootSystem, Q};

fn systems() -> Vec<RootSystem> {
    [(Family::D, 5), (Family::E, 6), (Family::E, 7), (Family::E, 8), (Family::B, 4), (Family::C, 4), (Family::F, 4), (Family::G, 2)]
        .into_iter()
        .map(|(f, r)| RootSystem::build(f, r).unwrap())
        .collect()
}

#[test]
fn w0_word_enumerates_positive_roots_once() {
    for rs in systems() {
        let roots = rs.word_roots(&rs.w0_word);
        assert_eq!(roots.len(), rs.positive_roots.len(), "{}", rs.name());
        let set: HashSet<Vec<Q>> = roots.iter().cloned().collect();
        assert_eq!(set.len(), roots.len(), "{}: repeated root", rs.name());
        for r in &roots {
            assert!(rs.is_positive_root(r), "{}: {r:?} not positive", rs.name());
        }
    }
}

#[test]
fn w0_sends_rho_to_minus_rho() {
    for rs in systems() {
        let mut v = rs.rho.clone();
        for &i in rs.w0_word.iter().rev() {
            v = rs.reflect(&v, i - 1);
        }
        let neg: Vec<Q> = rs.rho.iter().map(|x| -*x).collect();
        assert_eq!(v, neg, "{}", rs.name());
    }
}

#[test]
fn cartan_from_roots_and_fundamental_duality() {
    for rs in systems() {
        for i in 0..rs.rank {
            for j in 0..rs.rank {
                let a = rs.coroot_pairing(&rs.simple_roots[j], i);
                assert_eq!(a, Q::from_integer(rs.cartan[i][j]), "{}", rs.name());
                let d = rs.coroot_pairing(&rs.fundamental[j], i);
                assert_eq!(d, Q::from_integer((i == j) as i64), "{}", rs.name());
            }
        }
        for i in 0..rs.rank {
            assert_eq!(rs.coroot_pairing(&rs.rho, i), Q::from_integer(1), "{}", rs.name());
        }
        assert!(rootsys::symmetrizer(&rs.cartan).is_some());
    }
}

#[test]
fn positive_root_counts_and_expansions() {
    let expect = [20usize, 36, 63, 120, 16, 16, 24, 6];
    for (rs, n) in systems().into_iter().zip(expect) {
        assert_eq!(rs.positive_roots.len(), n, "{}", rs.name());
        let coords = rs.epsilon_to_fundamental(&rs.rho);
        assert!(coords.coords.iter().all(|x| *x == Q::from_integer(1)), "{}", rs.name());
        for (beta, c) in rs.positive_roots.iter().zip(&rs.positive_coeffs) {
            let mut v = vec![Q::from_integer(0); rs.dim];
            for (k, ck) in c.iter().enumerate() {
                v = rootsys::add_scaled(&v, &rs.simple_roots[k], Q::from_integer(*ck));
            }
            assert_eq!(&v, beta);
            assert!(dot(beta, beta) > Q::from_integer(0));
        }
    }
}
