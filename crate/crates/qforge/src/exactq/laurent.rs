//! Laurent polynomials in `t` with rational coefficients.

use std::fmt;

use smallvec::SmallVec;

use super::rat::Rat;

type Terms = SmallVec<[(i32, Rat); 4]>;

/// Sparse Laurent polynomial; terms sorted by exponent, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Laurent {
    terms: Terms,
}

impl Laurent {
    pub fn zero() -> Laurent {
        Laurent { terms: SmallVec::new() }
    }

    pub fn one() -> Laurent {
        Laurent::monomial(Rat::ONE, 0)
    }

    pub fn constant(c: Rat) -> Laurent {
        Laurent::monomial(c, 0)
    }

    pub fn monomial(c: Rat, e: i32) -> Laurent {
        let mut terms = SmallVec::new();
        if !c.is_zero() {
            terms.push((e, c));
        }
        Laurent { terms }
    }

    pub fn t_pow(e: i32) -> Laurent {
        Laurent::monomial(Rat::ONE, e)
    }

    /// Builds from arbitrary `(exponent, coefficient)` pairs, combining repeats.
    pub fn from_terms<I: IntoIterator<Item = (i32, Rat)>>(it: I) -> Laurent {
        let mut v: Vec<(i32, Rat)> = it.into_iter().collect();
        v.sort_by_key(|t| t.0);
        let mut terms: Terms = SmallVec::with_capacity(v.len());
        for (e, c) in v {
            match terms.last_mut() {
                Some((le, lc)) if *le == e => *lc += &c,
                _ => terms.push((e, c)),
            }
        }
        terms.retain(|t| !t.1.is_zero());
        Laurent { terms }
    }

    /// Dense ascending coefficients, the first at exponent `shift`.
    pub fn from_dense(coeffs: &[Rat], shift: i32) -> Laurent {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (shift + k as i32, c.clone()))
            .collect();
        Laurent { terms }
    }

    pub fn terms(&self) -> &[(i32, Rat)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0 == 0 && self.terms[0].1.is_one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.first().map(|t| t.0)
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.last().map(|t| t.0)
    }

    pub fn lead_coeff(&self) -> Option<&Rat> {
        self.terms.last().map(|t| &t.1)
    }

    pub fn is_monomial(&self) -> bool {
        self.terms.len() == 1
    }

    pub fn coeff(&self, e: i32) -> Rat {
        match self.terms.binary_search_by_key(&e, |t| t.0) {
            Ok(k) => self.terms[k].1.clone(),
            Err(_) => Rat::ZERO,
        }
    }

    pub fn neg(&self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }

    pub fn scale(&self, k: &Rat) -> Laurent {
        if k.is_zero() {
            return Laurent::zero();
        }
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, c * k)).collect() }
    }

    pub fn shift(&self, s: i32) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (e + s, c.clone())).collect() }
    }

    pub fn add(&self, o: &Laurent) -> Laurent {
        self.merge(o, false)
    }

    pub fn sub(&self, o: &Laurent) -> Laurent {
        self.merge(o, true)
    }

    fn merge(&self, o: &Laurent, negate: bool) -> Laurent {
        if o.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return if negate { o.neg() } else { o.clone() };
        }
        let (a, b) = (&self.terms, &o.terms);
        let mut out: Terms = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].0 < b[j].0);
            let take_b = i >= a.len() || (j < b.len() && b[j].0 < a[i].0);
            if take_a {
                out.push(a[i].clone());
                i += 1;
            } else if take_b {
                let c = if negate { -&b[j].1 } else { b[j].1.clone() };
                out.push((b[j].0, c));
                j += 1;
            } else {
                let c = if negate { &a[i].1 - &b[j].1 } else { &a[i].1 + &b[j].1 };
                if !c.is_zero() {
                    out.push((a[i].0, c));
                }
                i += 1;
                j += 1;
            }
        }
        Laurent { terms: out }
    }

    pub fn mul(&self, o: &Laurent) -> Laurent {
        if self.is_zero() || o.is_zero() {
            return Laurent::zero();
        }
        if o.terms.len() == 1 {
            let (e, c) = &o.terms[0];
            return Laurent { terms: self.terms.iter().map(|(x, d)| (x + e, d * c)).collect() };
        }
        if self.terms.len() == 1 {
            return o.mul(self);
        }
        let lo = self.terms[0].0 + o.terms[0].0;
        let hi = self.terms.last().unwrap().0 + o.terms.last().unwrap().0;
        let mut dense = vec![Rat::ZERO; (hi - lo + 1) as usize];
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                dense[(ea + eb - lo) as usize] += &(ca * cb);
            }
        }
        Laurent::from_dense(&dense, lo)
    }

    pub fn pow(&self, n: u32) -> Laurent {
        let mut acc = Laurent::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// Evaluates at `t = t0`; `t0` must be nonzero when negative exponents occur.
    pub fn eval(&self, t0: &Rat) -> Option<Rat> {
        let mut acc = Rat::ZERO;
        for (e, c) in &self.terms {
            if *e < 0 && t0.is_zero() {
                return None;
            }
            acc += &(c * &t0.pow(*e));
        }
        Some(acc)
    }

    /// Dense ascending coefficients after dividing out `t^{min_exp}`.
    pub fn to_dense(&self) -> (Vec<Rat>, i32) {
        let Some(lo) = self.min_exp() else { return (Vec::new(), 0) };
        let hi = self.max_exp().unwrap();
        let mut v = vec![Rat::ZERO; (hi - lo + 1) as usize];
        for (e, c) in &self.terms {
            v[(e - lo) as usize] = c.clone();
        }
        (v, lo)
    }

    /// Text rendering with `t^k` displayed as `q^(k/l)`.
    pub fn fmt_q(&self, l: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (k, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.signum() < 0;
            let a = c.abs();
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = q_power_str(*e, l);
            if mono.is_empty() {
                s.push_str(&a.to_string());
            } else if a.is_one() {
                s.push_str(&mono);
            } else {
                s.push_str(&format!("{a}*{mono}"));
            }
        }
        s
    }
}

fn q_power_str(e: i32, l: u32) -> String {
    if e == 0 {
        return String::new();
    }
    let r = num_rational::Ratio::new(e as i64, l as i64);
    if r.is_integer() {
        if *r.numer() == 1 {
            "q".into()
        } else {
            format!("q^{}", r.numer())
        }
    } else {
        format!("q^({}/{})", r.numer(), r.denom())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(e, c)| format!("({c})t^{e}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

// Dense univariate helpers over Q, ascending coefficient order.

pub(crate) fn dense_trim(v: &mut Vec<Rat>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Polynomial long division; `b` must be nonzero and trimmed.
pub(crate) fn dense_divrem(a: &[Rat], b: &[Rat]) -> (Vec<Rat>, Vec<Rat>) {
    let mut r: Vec<Rat> = a.to_vec();
    dense_trim(&mut r);
    let db = b.len() - 1;
    let lead_inv = b[db].recip().expect("nonzero leading coefficient");
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rat::ZERO; r.len() - db];
    while r.len() > db && !r.is_empty() {
        let dr = r.len() - 1;
        let c = &r[dr] * &lead_inv;
        let shift = dr - db;
        for (k, bk) in b.iter().enumerate() {
            let t = &c * bk;
            r[shift + k] -= &t;
        }
        q[shift] = c;
        r.pop();
        dense_trim(&mut r);
    }
    (q, r)
}

/// Monic gcd of two dense polynomials; both zero gives zero.
pub(crate) fn dense_gcd(a: &[Rat], b: &[Rat]) -> Vec<Rat> {
    let mut x: Vec<Rat> = a.to_vec();
    let mut y: Vec<Rat> = b.to_vec();
    dense_trim(&mut x);
    dense_trim(&mut y);
    while !y.is_empty() {
        let (_, r) = dense_divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(l) = x.last().cloned() {
        let inv = l.recip().unwrap();
        for c in x.iter_mut() {
            *c = &*c * &inv;
        }
    }
    x
}
