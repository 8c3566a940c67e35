//! Exact arithmetic in Q(t) with q = t^L.

use qforge::exactq::{QField, Rat, Scalar};
use qforge::rootsys::Q;

fn main() {
    // Quarter powers of q are available with L = 4.
    let f = QField::new(4);
    let q = f.q();
    let qinv = q.recip().unwrap();

    let two_q = q.add(&qinv);
    println!("[2]_q = {}", f.fmt(&two_q));

    let diff = q.sub(&qinv);
    println!("(q - q^-1)(q + q^-1) = {}", f.fmt(&diff.mul(&two_q)));

    let quarter = f.q_pow(Q::new(1, 4)).unwrap();
    println!("(q^(1/4))^4 = {}", f.fmt(&quarter.pow(4).unwrap()));

    // Genuine rational functions stay exact and canonical.
    let x = Scalar::one().div(&q.sub(&Scalar::one())).unwrap();
    let y = x.mul(&q.sub(&Scalar::one()));
    println!("1/(q - 1) = {}, times (q - 1) = {}", f.fmt(&x), f.fmt(&y));

    // Evaluation at t = 2 is a ring homomorphism.
    let t0 = Rat::int(2);
    let lhs = two_q.mul(&diff).eval_at(&t0).unwrap();
    let rhs = two_q.eval_at(&t0).unwrap() * diff.eval_at(&t0).unwrap();
    println!("eval at t = 2: {lhs} = {rhs}");

    let json = diff.to_json();
    println!("serialized q - q^-1: {json}");
    assert_eq!(Scalar::from_json(&json).unwrap(), diff);
}
