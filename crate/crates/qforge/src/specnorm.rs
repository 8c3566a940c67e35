//! Spectral data of `P·R_VV`: minimal polynomial, monomial eigenvalues,
//! normalization, the companion matrix `R′` and the braided-vector-algebra
//! conditions.

use std::collections::BTreeMap;

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactq::{ExactError, QField, Scalar, UPoly};
use crate::rmatrix::{flip, three_leg_mismatch, CheckMode, LegOp, RMatrix};
use crate::rootsys::Q;
use crate::sparse::{acc_add, SparseMat};

#[derive(Debug, thiserror::Error)]
pub enum SpecError {
    #[error("minimal polynomial verification failed after {0} rounds")]
    Verification(usize),
    #[error("polynomial has a root that is not of the form ±q^e (remaining factor of degree {0})")]
    NonMonomialRoot(usize),
    #[error("no eigenvalue of the form -q^e")]
    NoNegativeEigenvalue,
    #[error("requested eigenvalue -q^{0} is not in the spectrum")]
    UnknownEigenvalue(String),
    #[error("eigenvalue -1 missing after normalization")]
    MissingMinusOne,
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Eigenvalue `sign · q^exp`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mono {
    pub sign: i32,
    pub exp: Q,
}

impl Mono {
    pub fn to_scalar(&self, f: QField) -> Result<Scalar, ExactError> {
        let s = f.q_pow(self.exp)?;
        Ok(if self.sign < 0 { s.neg() } else { s })
    }

    pub fn to_json(&self) -> Value {
        json!([self.sign, self.exp.numer(), self.exp.denom()])
    }

    pub fn label(&self) -> String {
        let s = if self.sign < 0 { "-" } else { "" };
        if self.exp == Q::from_integer(0) {
            format!("{s}1")
        } else {
            format!("{s}q^({})", self.exp)
        }
    }
}

fn col_apply(cols: &[Vec<(u32, Scalar)>], v: &BTreeMap<u64, Scalar>) -> BTreeMap<u64, Scalar> {
    let mut out = BTreeMap::new();
    for (j, x) in v {
        for (i, m) in &cols[*j as usize] {
            acc_add(&mut out, *i as u64, m.mul(x));
        }
    }
    out
}

fn columns(m: &SparseMat) -> Vec<Vec<(u32, Scalar)>> {
    let t = m.transpose();
    (0..t.nrows()).map(|c| t.row(c).to_vec()).collect()
}

/// Minimal polynomial of `v` under `m`, by fraction-free elimination on the
/// Echelon row: pivot index, pivot value, row, expression in the Krylov basis.
type EchelonRow = (u64, Scalar, BTreeMap<u64, Scalar>, Vec<Scalar>);

/// Krylov sequence (entries stay Laurent when `m` and `v` are Laurent).
fn local_minpoly(cols: &[Vec<(u32, Scalar)>], v: BTreeMap<u64, Scalar>) -> UPoly {
    let mut basis: Vec<EchelonRow> = Vec::new();
    let mut cur = v;
    let mut k = 0usize;
    loop {
        let mut w = cur.clone();
        let mut combo = vec![Scalar::zero(); k + 1];
        combo[k] = Scalar::one();
        for (piv, pv, bv, bc) in &basis {
            let Some(x) = w.get(piv).cloned() else { continue };
            let mut nw = BTreeMap::new();
            for (i, val) in &w {
                acc_add(&mut nw, *i, val.mul(pv));
            }
            for (i, val) in bv {
                acc_add(&mut nw, *i, val.mul(&x).neg());
            }
            w = nw;
            for c in combo.iter_mut() {
                *c = c.mul(pv);
            }
            for (i, c) in bc.iter().enumerate() {
                combo[i] = combo[i].sub(&c.mul(&x));
            }
        }
        if w.is_empty() {
            return UPoly::new(combo).monic();
        }
        let (&piv, pv) = w.iter().next().unwrap();
        let pv = pv.clone();
        basis.push((piv, pv, w, combo));
        cur = col_apply(cols, &cur);
        k += 1;
    }
}

/// Checks `p(M) = 0` column by column with Horner's rule.
pub fn annihilates(m: &SparseMat, p: &UPoly) -> bool {
    let cols = columns(m);
    let c = p.coeffs();
    if c.is_empty() {
        return true;
    }
    (0..m.ncols()).into_par_iter().all(|j| {
        let mut acc: BTreeMap<u64, Scalar> = BTreeMap::new();
        for coef in c.iter().rev() {
            acc = col_apply(&cols, &acc);
            acc_add(&mut acc, j as u64, coef.clone());
        }
        acc.is_empty()
    })
}

/// Minimal polynomial via Krylov sequences from random integer vectors, verified
/// by substitution.
pub fn min_poly(m: &SparseMat, seed: u64) -> Result<UPoly, SpecError> {
    let n = m.ncols();
    let cols = columns(m);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = UPoly::one();
    let rounds = 4;
    for round in 0..rounds {
        let vectors: Vec<BTreeMap<u64, Scalar>> = (0..3 + round)
            .map(|_| {
                (0..n)
                    .filter_map(|i| {
                        let x: i64 = rng.gen_range(-9..=9);
                        (x != 0).then(|| (i as u64, Scalar::int(x)))
                    })
                    .collect()
            })
            .collect();
        let locals: Vec<UPoly> = vectors.into_par_iter().map(|v| local_minpoly(&cols, v)).collect();
        for l in locals {
            p = p.lcm(&l);
        }
        if annihilates(m, &p) {
            return Ok(p);
        }
    }
    Err(SpecError::Verification(rounds))
}

fn ord(s: &Scalar) -> i32 {
    s.numer().min_exp().unwrap() - s.denom().min_exp().unwrap()
}

/// Factorization into roots `±q^e`; exponents come from the lower Newton polygon
/// of the coefficient valuations and every root is confirmed by substitution.
pub fn monomial_roots(p: &UPoly, f: QField) -> Result<Vec<Mono>, SpecError> {
    let mut rest = p.monic();
    let mut roots = Vec::new();
    while let Some(d) = rest.degree().filter(|d| *d > 0) {
        let pts: Vec<(i64, i64)> = rest
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (k as i64, ord(c) as i64))
            .collect();
        let mut found = None;
        'slopes: for (a, b) in lower_hull(&pts).windows(2).map(|w| (w[0], w[1])) {
            let slope = Q::new(b.1 - a.1, b.0 - a.0);
            if !slope.is_integer() {
                continue;
            }
            let e = -slope.to_integer() as i32;
            for sign in [1, -1] {
                let y = if sign > 0 { Scalar::t_pow(e) } else { Scalar::t_pow(e).neg() };
                if rest.eval(&y).is_zero() {
                    found = Some((sign, e, y));
                    break 'slopes;
                }
            }
        }
        let Some((sign, e, y)) = found else { return Err(SpecError::NonMonomialRoot(d)) };
        rest = rest.divrem(&UPoly::linear(&y))?.0;
        roots.push(Mono { sign, exp: Q::new(e as i64, f.l() as i64) });
    }
    roots.sort_by(|a, b| a.exp.cmp(&b.exp).then(a.sign.cmp(&b.sign)));
    Ok(roots)
}

fn lower_hull(pts: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut h: Vec<(i64, i64)> = Vec::new();
    for &p in pts {
        while h.len() >= 2 {
            let (a, b) = (h[h.len() - 2], h[h.len() - 1]);
            let cross = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            if cross <= 0 {
                h.pop();
            } else {
                break;
            }
        }
        h.push(p);
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenChoice {
    Auto,
    /// Normalize by the eigenvalue `-q^e`.
    Explicit(Q),
}

/// Auto rule: the negative eigenvalue of smallest `|e|`, ties to the smaller `e`.
pub fn select_eigenvalue(eigs: &[Mono], choice: EigenChoice) -> Result<usize, SpecError> {
    match choice {
        EigenChoice::Auto => eigs
            .iter()
            .enumerate()
            .filter(|(_, m)| m.sign < 0)
            .min_by(|(_, a), (_, b)| a.exp.abs().cmp(&b.exp.abs()).then(a.exp.cmp(&b.exp)))
            .map(|(i, _)| i)
            .ok_or(SpecError::NoNegativeEigenvalue),
        EigenChoice::Explicit(e) => eigs
            .iter()
            .position(|m| m.sign < 0 && m.exp == e)
            .ok_or_else(|| SpecError::UnknownEigenvalue(e.to_string())),
    }
}

/// Returns `(λ, R_VV/λ)` with `λ = -x_sel`.
pub fn normalize(rvv: &RMatrix, eigs: &[Mono], choice: EigenChoice) -> Result<(Scalar, usize, RMatrix), SpecError> {
    let sel = select_eigenvalue(eigs, choice)?;
    let lambda = Mono { sign: 1, exp: eigs[sel].exp }.to_scalar(rvv.field)?;
    let rnorm = rvv.scale(&lambda.recip()?);
    Ok((lambda, sel, rnorm))
}

/// Eigenvalues of `P·R` after dividing by `λ = q^{e_sel}`.
pub fn normalized_spectrum(eigs: &[Mono], sel: usize) -> Vec<Mono> {
    let e0 = eigs[sel].exp;
    let mut v: Vec<Mono> = eigs.iter().map(|m| Mono { sign: m.sign, exp: m.exp - e0 }).collect();
    v.sort();
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RPrimeForm {
    /// `P + P∏_{x≠−1}(PR − x)`.
    Generic,
    /// `RPR − (q²+1)R + (q²+1)P`.
    Quadratic,
    /// `−q⁻⁴R(PR)² + q⁻²RPR + q⁻²R`.
    Cubic,
}

/// Closed form used for a bundled module, if any.
pub fn closed_form(rep_name: &str) -> Option<RPrimeForm> {
    match rep_name {
        "d5_halfspin16" | "e6_fund27" => Some(RPrimeForm::Quadratic),
        "e7_fund56" => Some(RPrimeForm::Cubic),
        _ => None,
    }
}

/// Constants `(a, b)` with `R′_closed = a·R′_generic + b·P`.
pub fn affine_constants(form: RPrimeForm, f: QField) -> (Scalar, Scalar) {
    match form {
        RPrimeForm::Generic | RPrimeForm::Quadratic => (Scalar::one(), Scalar::zero()),
        RPrimeForm::Cubic => {
            let a = f.q_int(-4).neg();
            (a.clone(), Scalar::one().sub(&a))
        }
    }
}

pub fn build_rprime(rnorm: &RMatrix, spectrum: &[Mono], form: RPrimeForm) -> Result<RMatrix, SpecError> {
    let f = rnorm.field;
    let p = rnorm.p;
    let pm = flip(p);
    let r = &rnorm.mat;
    let pr = rnorm.flip_left().mat;
    let mat = match form {
        RPrimeForm::Generic => {
            let minus_one = Mono { sign: -1, exp: Q::from_integer(0) };
            if !spectrum.contains(&minus_one) {
                return Err(SpecError::MissingMinusOne);
            }
            let mut prod = SparseMat::identity(p * p);
            for x in spectrum.iter().filter(|x| **x != minus_one) {
                prod = prod.mul(&pr.add_scalar(&x.to_scalar(f)?.neg()));
            }
            pm.add(&pm.mul(&prod))
        }
        RPrimeForm::Quadratic => {
            let c = f.q_int(2).add(&Scalar::one());
            r.mul(&pr).sub(&r.scale(&c)).add(&pm.scale(&c))
        }
        RPrimeForm::Cubic => {
            let rpr = r.mul(&pr);
            let rprpr = rpr.mul(&pr);
            let qm2 = f.q_int(-2);
            rprpr.scale(&f.q_int(-4).neg()).add(&rpr.scale(&qm2)).add(&r.scale(&qm2))
        }
    };
    Ok(RMatrix::new(p, f, mat))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub i: bool,
    pub ii: bool,
    pub iii: bool,
}

impl Conditions {
    pub fn all(&self) -> bool {
        self.i && self.ii && self.iii
    }
}

/// (i) `R12 R13 R′23 = R′23 R13 R12`, (ii) `(PR+1)(PR′−1) = 0`, (iii) `R21 R′12 = R′21 R12`.
pub fn check_vector_algebra_conditions(r: &RMatrix, rp: &RMatrix, mode: CheckMode) -> Conditions {
    let p = r.p;
    let rc = r.columns();
    let rpc = rp.columns();
    let i = {
        let op = |cols, legs| LegOp { cols, legs };
        three_leg_mismatch(
            p,
            &[op(&rc, (0, 1)), op(&rc, (0, 2)), op(&rpc, (1, 2))],
            &[op(&rpc, (1, 2)), op(&rc, (0, 2)), op(&rc, (0, 1))],
            mode,
        )
        .is_none()
    };
    let pr = r.flip_left().mat;
    let prp = rp.flip_left().mat;
    let ii = pr.add_scalar(&Scalar::one()).mul(&prp.add_scalar(&Scalar::one().neg())).is_zero();
    let iii = r.swap_legs().mat.mul(&rp.mat) == rp.swap_legs().mat.mul(&r.mat);
    Conditions { i, ii, iii }
}

#[derive(Debug, Clone)]
pub struct SpectralData {
    pub minpoly: UPoly,
    pub eigenvalues: Vec<Mono>,
    pub selected: usize,
    pub lambda: Scalar,
    pub normalized: Vec<Mono>,
    pub rnorm: RMatrix,
    pub rprime_generic: RMatrix,
    pub rprime_closed: Option<(RPrimeForm, RMatrix)>,
}

impl SpectralData {
    /// The companion matrix used downstream: the closed form when one exists.
    pub fn rprime(&self) -> &RMatrix {
        self.rprime_closed.as_ref().map(|(_, m)| m).unwrap_or(&self.rprime_generic)
    }

    pub fn to_json(&self, conditions: Option<(Conditions, CheckMode)>) -> Value {
        let f = self.rnorm.field;
        let mut v = json!({
            "minpoly": self.minpoly.to_json(),
            "eigenvalues": self.eigenvalues.iter().map(|m| m.to_json()).collect::<Vec<_>>(),
            "eigenvalue_labels": self.eigenvalues.iter().map(|m| m.label()).collect::<Vec<_>>(),
            "normalized_spectrum": self.normalized.iter().map(|m| m.label()).collect::<Vec<_>>(),
            "lambda": self.lambda.to_json(),
            "lambda_text": f.fmt(&self.lambda),
            "L": f.l(),
            "rprime_form": self.rprime_closed.as_ref().map(|(form, _)| format!("{form:?}")).unwrap_or("Generic".into()),
        });
        if let Some((c, mode)) = conditions {
            v["conditions"] = json!({"i": c.i, "ii": c.ii, "iii": c.iii, "mode": mode.to_string()});
        }
        v
    }
}

/// Runs the whole spectral stage on `R_VV`.
pub fn analyze(rvv: &RMatrix, rep_name: &str, choice: EigenChoice, seed: u64) -> Result<SpectralData, SpecError> {
    let f = rvv.field;
    let pr = rvv.flip_left().mat;
    let minpoly = min_poly(&pr, seed)?;
    let eigenvalues = monomial_roots(&minpoly, f)?;
    let (lambda, selected, rnorm) = normalize(rvv, &eigenvalues, choice)?;
    let normalized = normalized_spectrum(&eigenvalues, selected);
    let rprime_generic = build_rprime(&rnorm, &normalized, RPrimeForm::Generic)?;
    let rprime_closed = match closed_form(rep_name) {
        Some(form) => Some((form, build_rprime(&rnorm, &normalized, form)?)),
        None => None,
    };
    Ok(SpectralData { minpoly, eigenvalues, selected, lambda, normalized, rnorm, rprime_generic, rprime_closed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(f: QField, e: i64, d: i64) -> Scalar {
        f.q_pow(Q::new(e, d)).unwrap()
    }

    #[test]
    fn identity_minpoly_is_linear() {
        let p = min_poly(&SparseMat::identity(5), 1).unwrap();
        assert_eq!(p, UPoly::linear(&Scalar::one()));
    }

    #[test]
    fn roots_of_products() {
        let f = QField::new(1);
        let p = UPoly::from_roots(&[q(f, 1, 1), q(f, -1, 1)]);
        let r = monomial_roots(&p, f).unwrap();
        assert_eq!(r, vec![Mono { sign: 1, exp: Q::from_integer(-1) }, Mono { sign: 1, exp: Q::from_integer(1) }]);
        let pm = UPoly::from_roots(&[Scalar::one(), Scalar::int(-1)]);
        let r = monomial_roots(&pm, f).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.contains(&Mono { sign: -1, exp: Q::from_integer(0) }));
    }

    #[test]
    fn quartic_with_two_negative_roots() {
        let f = QField::new(2);
        let roots = [q(f, -1, 2).neg(), q(f, 1, 2).neg(), q(f, 1, 2), q(f, 3, 2)];
        let p = UPoly::from_roots(&roots);
        let r = monomial_roots(&p, f).unwrap();
        let labels: Vec<String> = r.iter().map(|m| m.label()).collect();
        assert_eq!(labels, ["-q^(-1/2)", "-q^(1/2)", "q^(1/2)", "q^(3/2)"]);
        assert_eq!(select_eigenvalue(&r, EigenChoice::Auto).unwrap(), 0);
    }

    #[test]
    fn non_monomial_root_is_rejected() {
        let f = QField::new(1);
        // y^2 - 2
        let p = UPoly::new(vec![Scalar::int(-2), Scalar::zero(), Scalar::one()]);
        assert!(matches!(monomial_roots(&p, f), Err(SpecError::NonMonomialRoot(2))));
    }

    #[test]
    fn minpoly_of_diagonal_and_jordan_block() {
        let f = QField::new(1);
        let d = SparseMat::diag(vec![f.q(), f.q(), f.q_int(-1)]);
        assert_eq!(min_poly(&d, 7).unwrap(), UPoly::from_roots(&[f.q(), f.q_int(-1)]));
        let j = SparseMat::from_triplets(2, 2, vec![(0, 0, f.q()), (0, 1, Scalar::one()), (1, 1, f.q())]);
        assert_eq!(min_poly(&j, 7).unwrap(), UPoly::from_roots(&[f.q(), f.q()]));
    }
}
