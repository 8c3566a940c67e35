//! Univariate polynomials `Σ c_k y^k` with coefficients in Q(t).

use serde_json::Value;

use super::scalar::Scalar;
use super::ExactError;

/// Ascending coefficients, trimmed (no trailing zeros).
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct UPoly {
    coeffs: Vec<Scalar>,
}

impl UPoly {
    pub fn new(mut coeffs: Vec<Scalar>) -> UPoly {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn one() -> UPoly {
        UPoly::new(vec![Scalar::one()])
    }

    /// `y - r`.
    pub fn linear(r: &Scalar) -> UPoly {
        UPoly::new(vec![r.neg(), Scalar::one()])
    }

    pub fn from_roots(roots: &[Scalar]) -> UPoly {
        roots.iter().fold(UPoly::one(), |acc, r| acc.mul(&UPoly::linear(r)))
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn monic(&self) -> UPoly {
        let Some(l) = self.coeffs.last() else { return self.clone() };
        let inv = l.recip().unwrap();
        UPoly::new(self.coeffs.iter().map(|c| c.mul(&inv)).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::default();
        }
        let mut out = vec![Scalar::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(out)
    }

    pub fn divrem(&self, d: &UPoly) -> Result<(UPoly, UPoly), ExactError> {
        let dd = d.degree().ok_or(ExactError::DivisionByZero)?;
        let lead_inv = d.coeffs[dd].recip()?;
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return Ok((UPoly::default(), self.clone()));
        }
        let mut q = vec![Scalar::zero(); r.len() - dd];
        for k in (dd..r.len()).rev() {
            let c = r[k].mul(&lead_inv);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs.iter().enumerate() {
                let idx = k - dd + j;
                r[idx] = r[idx].sub(&c.mul(dj));
            }
            q[k - dd] = c;
        }
        r.truncate(dd);
        Ok((UPoly::new(q), UPoly::new(r)))
    }

    /// Monic gcd.
    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b).unwrap();
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Monic lcm.
    pub fn lcm(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::default();
        }
        let g = self.gcd(o);
        self.mul(o).divrem(&g).unwrap().0.monic()
    }

    pub fn eval(&self, y: &Scalar) -> Scalar {
        self.coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc.mul(y).add(c))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(|c| c.to_json()).collect())
    }
}
