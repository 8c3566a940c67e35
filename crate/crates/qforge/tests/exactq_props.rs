use proptest::prelude::*;
use qforge::exactq::{Laurent, QField, Rat, Scalar};

fn laurent() -> impl Strategy<Value = Laurent> {
    prop::collection::vec((-4i32..=4, -3i64..=3), 0..4)
        .prop_map(|ts| Laurent::from_terms(ts.into_iter().map(|(e, c)| (e, Rat::int(c)))))
}

fn nonzero_laurent() -> impl Strategy<Value = Laurent> {
    laurent().prop_filter("nonzero", |l| !l.is_zero())
}

fn scalar() -> impl Strategy<Value = Scalar> {
    (laurent(), prop::option::of(nonzero_laurent())).prop_map(|(n, d)| match d {
        Some(d) => Scalar::fraction(n, d).unwrap(),
        None => Scalar::from_laurent(n),
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ring_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.add(&Scalar::zero()), a.clone());
        prop_assert_eq!(a.mul(&Scalar::one()), a.clone());
        prop_assert!(a.sub(&a).is_zero());
    }

    #[test]
    fn inverses(a in scalar(), b in scalar()) {
        if !a.is_zero() {
            prop_assert!(a.mul(&a.recip().unwrap()).is_one());
            prop_assert_eq!(b.mul(&a).div(&a).unwrap(), b);
        } else {
            prop_assert!(a.recip().is_err());
        }
    }

    #[test]
    fn evaluation_is_a_homomorphism(a in scalar(), b in scalar(), t in prop::sample::select(vec![2i64, 3, -2, 5, 7])) {
        let t0 = Rat::new(t, 3);
        if let (Ok(x), Ok(y)) = (a.eval_at(&t0), b.eval_at(&t0)) {
            prop_assert_eq!(a.add(&b).eval_at(&t0).unwrap(), &x + &y);
            prop_assert_eq!(a.mul(&b).eval_at(&t0).unwrap(), &x * &y);
        }
    }

    #[test]
    fn canonical_form_is_unique(n in laurent(), d in nonzero_laurent(), k in nonzero_laurent(), s in -3i32..=3) {
        let x = Scalar::fraction(n.clone(), d.clone()).unwrap();
        // Common factors, shifts and constants in both halves cancel.
        let y = Scalar::fraction(n.mul(&k).shift(s).scale(&Rat::new(2, 7)), d.mul(&k).shift(s).scale(&Rat::new(2, 7))).unwrap();
        prop_assert_eq!(&x, &y);
        prop_assert_eq!(x.to_json(), y.to_json());
        prop_assert_eq!(Scalar::from_json(&x.to_json()).unwrap(), x.clone());
        let den = x.denom();
        if let Some(lead) = den.lead_coeff() {
            prop_assert!(lead.is_one());
            prop_assert!(den.min_exp().unwrap() >= 0);
        }
    }

    #[test]
    fn fractional_powers_compose(a in -12i64..=12, b in -12i64..=12) {
        let f = QField::new(12);
        let x = f.q_pow(qforge::rootsys::Q::new(a, 12)).unwrap();
        let y = f.q_pow(qforge::rootsys::Q::new(b, 12)).unwrap();
        prop_assert_eq!(x.mul(&y), f.q_pow(qforge::rootsys::Q::new(a + b, 12)).unwrap());
    }
}

#[test]
fn known_identities() {
    let f = QField::new(1);
    let q = f.q();
    let qi = q.recip().unwrap();
    assert_eq!(q.sub(&qi).mul(&q.add(&qi)), f.q_int(2).sub(&f.q_int(-2)));
    assert!(QField::new(2).q_pow(qforge::rootsys::Q::new(1, 3)).is_err());
    assert_eq!(f.fmt(&q.sub(&qi)), "q - q^-1");
}
