//! Elements of the rational function field Q(t).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::Rational64;
use serde_json::{json, Value};

use super::laurent::{dense_divrem, dense_gcd, Laurent};
use super::rat::Rat;
use super::ExactError;

/// Reduced fraction `num/den` of Laurent polynomials.
///
/// Canonical form: `den` is an honest polynomial with nonzero constant term,
/// monic, and coprime to `num`. A trivial denominator is stored as `None`, so
/// Laurent polynomials (the common case) carry no extra allocation.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    num: Laurent,
    den: Option<Box<Laurent>>,
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { num: Laurent::zero(), den: None }
    }

    pub fn one() -> Scalar {
        Scalar::from_laurent(Laurent::one())
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_rat(Rat::int(n))
    }

    pub fn from_rat(r: Rat) -> Scalar {
        Scalar::from_laurent(Laurent::constant(r))
    }

    pub fn from_laurent(num: Laurent) -> Scalar {
        Scalar { num, den: None }
    }

    pub fn t_pow(e: i32) -> Scalar {
        Scalar::from_laurent(Laurent::t_pow(e))
    }

    /// Reduces `num/den` to canonical form.
    pub fn fraction(num: Laurent, den: Laurent) -> Result<Scalar, ExactError> {
        if den.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Scalar::zero());
        }
        let lo = den.min_exp().unwrap();
        let num = num.shift(-lo);
        let den = den.shift(-lo);
        if den.is_monomial() {
            let inv = den.terms()[0].1.recip().unwrap();
            return Ok(Scalar::from_laurent(num.scale(&inv)));
        }
        let (nd, ns) = num.to_dense();
        let (dd, _) = den.to_dense();
        let g = dense_gcd(&nd, &dd);
        let (mut nd, mut dd) = if g.len() > 1 {
            (dense_divrem(&nd, &g).0, dense_divrem(&dd, &g).0)
        } else {
            (nd, dd)
        };
        let lc_inv = dd.last().unwrap().recip().unwrap();
        for c in nd.iter_mut().chain(dd.iter_mut()) {
            *c = &*c * &lc_inv;
        }
        let num = Laurent::from_dense(&nd, ns);
        if dd.len() == 1 {
            return Ok(Scalar::from_laurent(num));
        }
        Ok(Scalar { num, den: Some(Box::new(Laurent::from_dense(&dd, 0))) })
    }

    pub fn numer(&self) -> &Laurent {
        &self.num
    }

    /// Denominator; `1` when the value is a Laurent polynomial.
    pub fn denom(&self) -> Laurent {
        match &self.den {
            Some(d) => (**d).clone(),
            None => Laurent::one(),
        }
    }

    pub fn is_laurent(&self) -> bool {
        self.den.is_none()
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.den.is_none() && self.num.is_one()
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        match (&self.den, &o.den) {
            (None, None) => Scalar::from_laurent(self.num.add(&o.num)),
            (Some(a), Some(b)) if a == b => {
                Scalar::fraction(self.num.add(&o.num), (**a).clone()).unwrap()
            }
            _ => {
                let (da, db) = (self.denom(), o.denom());
                Scalar::fraction(self.num.mul(&db).add(&o.num.mul(&da)), da.mul(&db)).unwrap()
            }
        }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.is_zero() || o.is_zero() {
            return Scalar::zero();
        }
        match (&self.den, &o.den) {
            (None, None) => Scalar::from_laurent(self.num.mul(&o.num)),
            _ => Scalar::fraction(self.num.mul(&o.num), self.denom().mul(&o.denom())).unwrap(),
        }
    }

    pub fn recip(&self) -> Result<Scalar, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        Scalar::fraction(self.denom(), self.num.clone())
    }

    pub fn div(&self, o: &Scalar) -> Result<Scalar, ExactError> {
        if o.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        if self.den.is_none() && o.num.is_monomial() {
            let (e, c) = &o.num.terms()[0];
            let inv = Laurent::monomial(c.recip().unwrap(), -e);
            return Ok(Scalar::from_laurent(self.num.mul(&o.denom()).mul(&inv)));
        }
        Scalar::fraction(self.num.mul(&o.denom()), self.denom().mul(&o.num))
    }

    pub fn pow(&self, n: i32) -> Result<Scalar, ExactError> {
        let base = if n < 0 { self.recip()? } else { self.clone() };
        let mut acc = Scalar::one();
        for _ in 0..n.unsigned_abs() {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    pub fn scale_rat(&self, k: &Rat) -> Scalar {
        Scalar { num: self.num.scale(k), den: self.den.clone() }
    }

    /// `(sign, exponent in t)` when the value is `±t^e`.
    pub fn as_t_monomial(&self) -> Option<(i32, i32)> {
        if self.den.is_some() || !self.num.is_monomial() {
            return None;
        }
        let (e, c) = &self.num.terms()[0];
        if c.is_one() {
            Some((1, *e))
        } else if (-c).is_one() {
            Some((-1, *e))
        } else {
            None
        }
    }

    /// Ring homomorphism `t ↦ t0`.
    pub fn eval_at(&self, t0: &Rat) -> Result<Rat, ExactError> {
        if t0.is_zero() {
            return Err(ExactError::Pole);
        }
        let n = self.num.eval(t0).ok_or(ExactError::Pole)?;
        let d = self.denom().eval(t0).ok_or(ExactError::Pole)?;
        if d.is_zero() {
            return Err(ExactError::Pole);
        }
        Ok(&n / &d)
    }

    /// Replaces `t` by `t^k` (used to re-express data written in powers of q).
    pub fn inflate(&self, k: i32) -> Scalar {
        let stretch =
            |l: &Laurent| Laurent::from_terms(l.terms().iter().map(|(e, c)| (e * k, c.clone())));
        match &self.den {
            None => Scalar::from_laurent(stretch(&self.num)),
            Some(d) => Scalar::fraction(stretch(&self.num), stretch(d)).unwrap(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({"num": laurent_json(&self.num), "den": laurent_json(&self.denom())})
    }

    pub fn from_json(v: &Value) -> Result<Scalar, ExactError> {
        let num = laurent_from_json(v.get("num").ok_or(ExactError::Parse("missing num".into()))?)?;
        let den = match v.get("den") {
            Some(d) => laurent_from_json(d)?,
            None => Laurent::one(),
        };
        Scalar::fraction(num, den)
    }

    /// Human-readable form in powers of `q = t^l`.
    pub fn fmt_q(&self, l: u32) -> String {
        match &self.den {
            None => self.num.fmt_q(l),
            Some(d) => format!("({})/({})", self.num.fmt_q(l), d.fmt_q(l)),
        }
    }
}

fn int_json(b: BigInt) -> Value {
    match i64::try_from(&b) {
        Ok(x) => json!(x),
        Err(_) => json!(b.to_string()),
    }
}

fn laurent_json(l: &Laurent) -> Value {
    Value::Array(
        l.terms().iter().map(|(e, c)| json!([int_json(c.numer()), int_json(c.denom()), e])).collect(),
    )
}

fn big_from_json(v: &Value) -> Result<BigInt, ExactError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| ExactError::Parse(format!("non-integer coefficient {n}"))),
        Value::String(s) => s.parse().map_err(|_| ExactError::Parse(format!("bad integer {s}"))),
        _ => Err(ExactError::Parse("coefficient must be integer or string".into())),
    }
}

fn laurent_from_json(v: &Value) -> Result<Laurent, ExactError> {
    let arr = v.as_array().ok_or(ExactError::Parse("term list expected".into()))?;
    let mut terms = Vec::with_capacity(arr.len());
    for t in arr {
        let t = t.as_array().filter(|t| t.len() == 3).ok_or(ExactError::Parse("term must be [cnum, cden, exp]".into()))?;
        let c = Rat::from_bigints(big_from_json(&t[0])?, big_from_json(&t[1])?)
            .ok_or(ExactError::DivisionByZero)?;
        let e = t[2].as_i64().ok_or(ExactError::Parse("exponent must be an integer".into()))?;
        terms.push((e as i32, c));
    }
    Ok(Laurent::from_terms(terms))
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.den {
            None => write!(f, "{:?}", self.num),
            Some(d) => write!(f, "({:?})/({:?})", self.num, d),
        }
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::int(n)
    }
}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, o: &'a Scalar) -> Scalar {
        Scalar::add(self, o)
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, o: &'a Scalar) -> Scalar {
        Scalar::sub(self, o)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, o: &'a Scalar) -> Scalar {
        Scalar::mul(self, o)
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::neg(self)
    }
}

/// Fixes the exponent denominator `L` in `q = t^L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QField {
    l: u32,
}

impl QField {
    pub fn new(l: u32) -> QField {
        assert!(l > 0, "exponent denominator must be positive");
        QField { l }
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// `q^e`; errors when `e·L` is not an integer.
    pub fn q_pow(&self, e: Rational64) -> Result<Scalar, ExactError> {
        let k = e * Rational64::from_integer(self.l as i64);
        if !k.is_integer() {
            return Err(ExactError::ExponentNotRepresentable { exponent: e.to_string(), l: self.l });
        }
        Ok(Scalar::t_pow(k.to_integer() as i32))
    }

    pub fn q_int(&self, k: i32) -> Scalar {
        Scalar::t_pow(k * self.l as i32)
    }

    pub fn q(&self) -> Scalar {
        self.q_int(1)
    }

    /// `q - q^{-1}`.
    pub fn q_diff(&self) -> Scalar {
        self.q().sub(&self.q_int(-1))
    }

    /// `(sign, exponent)` when `a = sign·q^exponent` exactly.
    pub fn monomial_of(&self, a: &Scalar) -> Option<(i32, Rational64)> {
        a.as_t_monomial().map(|(s, e)| (s, Rational64::new(e as i64, self.l as i64)))
    }

    /// Re-reads a scalar written in the variable `q` as an element of this field.
    pub fn from_q_scalar(&self, a: &Scalar) -> Scalar {
        a.inflate(self.l as i32)
    }

    pub fn fmt(&self, a: &Scalar) -> String {
        a.fmt_q(self.l)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn difference_of_squares() {
        let f = QField::new(1);
        let a = f.q().sub(&f.q_int(-1));
        let b = f.q().add(&f.q_int(-1));
        assert_eq!(a.mul(&b), f.q_int(2).sub(&f.q_int(-2)));
    }

    #[test]
    fn quarter_power_expands_in_t() {
        let f = QField::new(4);
        let x = f.q_pow(Rational64::new(1, 4)).unwrap().mul(&f.q_diff());
        assert_eq!(x, Scalar::t_pow(5).sub(&Scalar::t_pow(-3)));
    }

    #[test]
    fn self_division_is_one() {
        let x = Scalar::t_pow(3).add(&Scalar::int(7)).div(&Scalar::t_pow(1).sub(&Scalar::int(2))).unwrap();
        assert_eq!(x.div(&x).unwrap(), Scalar::one());
    }

    #[test]
    fn monomial_detection() {
        let f = QField::new(4);
        let m = f.q_pow(Rational64::new(-3, 4)).unwrap().neg();
        assert_eq!(f.monomial_of(&m), Some((-1, Rational64::new(-3, 4))));
        assert_eq!(f.monomial_of(&Scalar::one()), Some((1, Rational64::from_integer(0))));
        assert_eq!(f.monomial_of(&f.q_diff()), None);
    }

    #[test]
    fn canonical_denominator_is_monic_polynomial() {
        // 1 / (2t^-1 - 2t)  ==  (-t/2) / (t^2 - 1)
        let den = Laurent::from_terms([(-1, Rat::int(2)), (1, Rat::int(-2))]);
        let s = Scalar::fraction(Laurent::one(), den).unwrap();
        assert_eq!(s.denom(), Laurent::from_terms([(0, Rat::int(-1)), (2, Rat::ONE)]));
        assert_eq!(s.numer(), &Laurent::monomial(Rat::new(-1, 2), 1));
    }

    #[test]
    fn eval_and_poles() {
        let t2p1 = Scalar::t_pow(2).add(&Scalar::one());
        assert_eq!(t2p1.eval_at(&Rat::int(2)).unwrap(), Rat::int(5));
        let inv = Scalar::t_pow(1).sub(&Scalar::one()).recip().unwrap();
        assert_eq!(inv.eval_at(&Rat::ONE), Err(ExactError::Pole));
    }

    #[test]
    fn json_round_trip() {
        let x = Scalar::fraction(
            Laurent::from_terms([(-3, Rat::new(5, 7)), (2, Rat::int(1))]),
            Laurent::from_terms([(0, Rat::int(3)), (1, Rat::int(1))]),
        )
        .unwrap();
        let back = Scalar::from_json(&x.to_json()).unwrap();
        assert_eq!(back, x);
        assert_eq!(back.to_json().to_string(), x.to_json().to_string());
    }
}
