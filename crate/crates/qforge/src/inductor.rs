//! Rank-raising induction: extended Cartan matrices, m± claims and the
//! q-Serre data extracted from the R-matrices of a minuscule module.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::exactq::{ExactError, QField, Scalar};
use crate::repmod::{AlgebraSpec, RepError, RepModule};
use crate::rmatrix::{slice_with, RMatrix, SliceConvention, Which, MINUS_SLICE, PLUS_SLICE};
use crate::rootsys::{add_scaled, cartan_isomorphism, dot, symmetrizer, Family, RootError, RootSystem, Q};
use crate::sparse::SparseMat;
use crate::specnorm::SpectralData;

#[derive(Debug, thiserror::Error)]
pub enum InductError {
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("unknown case {0}")]
    UnknownCase(String),
    #[error("non-integral Cartan entry a[{0}][{1}] = {2}")]
    NonIntegral(usize, usize, Q),
    #[error("(nu, nu) = {0} is not positive")]
    NonPositiveNu(Q),
    #[error("diagonal entry R((i,p),(i,p)) for i = {0} is not a positive monomial")]
    NonMonomial(usize),
    #[error("claim {0}: {1}")]
    Claim(usize, String),
    #[error("extraction template mismatch: {0}")]
    Template(String),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

type Frac = [i64; 2];

fn frac(x: &Frac) -> Result<Q, InductError> {
    if x[1] == 0 {
        return Err(InductError::Schema("zero denominator".into()));
    }
    Ok(Q::new(x[0], x[1]))
}

/// Published values kept next to a rep-level case for comparison.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Reference {
    /// `[sign, num, den]` for `sign·q^{num/den}`.
    pub eigenvalues: Vec<[i64; 3]>,
    pub lambda_exponent: Frac,
    /// `(u, v, w, z)` as `[sign, num, den]`.
    pub serre: Option<Vec<[i64; 3]>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub id: String,
    #[serde(default)]
    pub title: String,
    pub base: AlgebraSpec,
    pub mu_fundamental: Vec<i64>,
    #[serde(default)]
    pub nu_norm2: Option<Frac>,
    #[serde(default)]
    pub nu_coords: Option<Vec<Frac>>,
    pub target: AlgebraSpec,
    #[serde(default)]
    pub target_len2: Option<Frac>,
    #[serde(default)]
    pub rep: Option<String>,
    #[serde(default)]
    pub reference: Option<Reference>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseFile {
    pub cases: Vec<CaseSpec>,
}

pub fn parse_cases(text: &str) -> Result<Vec<CaseSpec>, InductError> {
    let f: CaseFile = serde_json::from_str(text).map_err(|e| InductError::Schema(e.to_string()))?;
    Ok(f.cases)
}

/// The nine bundled induction cases.
pub fn bundled_cases() -> Vec<CaseSpec> {
    parse_cases(crate::data::cases_text()).expect("bundled case file parses")
}

fn build_rs(a: &AlgebraSpec) -> Result<RootSystem, InductError> {
    let family: Family = a.family.parse().map_err(InductError::Schema)?;
    Ok(RootSystem::build(family, a.rank)?)
}

#[derive(Debug, Clone)]
pub struct InductionCase {
    pub id: String,
    pub base: RootSystem,
    pub target: RootSystem,
    /// ε-coordinates of μ.
    pub mu: Vec<Q>,
    pub nu_norm2: Q,
    pub nu_coords: Option<Vec<Q>>,
    pub target_len2: Q,
    pub rep: Option<String>,
    pub reference: Option<Reference>,
}

/// `(ν,ν) = target_len² − (μ,μ)`.
pub fn solve_nu(mu_norm2: Q, target_len2: Q) -> Result<Q, InductError> {
    let nu = target_len2 - mu_norm2;
    if !nu.is_positive() {
        return Err(InductError::NonPositiveNu(nu));
    }
    Ok(nu)
}

impl InductionCase {
    pub fn from_spec(s: &CaseSpec) -> Result<InductionCase, InductError> {
        let base = build_rs(&s.base)?;
        let target = build_rs(&s.target)?;
        if s.mu_fundamental.len() != base.rank {
            return Err(InductError::Schema(format!("mu has {} coordinates, rank is {}", s.mu_fundamental.len(), base.rank)));
        }
        let mu_f: Vec<Q> = s.mu_fundamental.iter().map(|x| Q::from_integer(*x)).collect();
        let mu = base.fundamental_to_epsilon(&mu_f)?.coords;
        let target_len2 = s.target_len2.as_ref().map(frac).transpose()?.unwrap_or(Q::from_integer(2));
        let nu_norm2 = match &s.nu_norm2 {
            Some(x) => frac(x)?,
            None => solve_nu(dot(&mu, &mu), target_len2)?,
        };
        let nu_coords = s.nu_coords.as_ref().map(|v| v.iter().map(frac).collect::<Result<Vec<_>, _>>()).transpose()?;
        Ok(InductionCase {
            id: s.id.clone(),
            base,
            target,
            mu,
            nu_norm2,
            nu_coords,
            target_len2,
            rep: s.rep.clone(),
            reference: s.reference.clone(),
        })
    }

    pub fn mu_norm2(&self) -> Q {
        dot(&self.mu, &self.mu)
    }

    /// Consistency of the case data: orthogonality of explicit ν and the
    /// new-root length.
    pub fn invariants(&self) -> Vec<(String, bool)> {
        let mut out = vec![("length".to_string(), self.mu_norm2() + self.nu_norm2 == self.target_len2)];
        if let Some(nu) = &self.nu_coords {
            out.push(("nu_norm".into(), dot(nu, nu) == self.nu_norm2));
            out.push(("nu_perp_roots".into(), self.base.simple_roots.iter().all(|a| dot(nu, a).is_zero())));
            out.push(("nu_perp_mu".into(), dot(nu, &self.mu).is_zero()));
        }
        out
    }
}

pub fn find_case(id: &str) -> Result<InductionCase, InductError> {
    let spec = bundled_cases().into_iter().find(|c| c.id == id).ok_or_else(|| InductError::UnknownCase(id.into()))?;
    InductionCase::from_spec(&spec)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtendedCartan {
    pub matrix: Vec<Vec<i64>>,
    /// 1-based base nodes coupled to the new node.
    pub attachment: Vec<usize>,
    pub symmetrizer: Option<Vec<String>>,
}

impl ExtendedCartan {
    pub fn new_column(&self) -> Vec<i64> {
        let n = self.matrix.len() - 1;
        (0..n).map(|i| self.matrix[i][n]).collect()
    }

    pub fn symmetrizable(&self) -> bool {
        self.symmetrizer.is_some()
    }

    /// Node permutation onto the target Cartan matrix, if isomorphic.
    pub fn matches(&self, target: &RootSystem) -> Option<Vec<usize>> {
        cartan_isomorphism(&self.matrix, &target.cartan)
    }
}

fn integral(x: Q, i: usize, j: usize) -> Result<i64, InductError> {
    if x.is_integer() {
        Ok(x.to_integer())
    } else {
        Err(InductError::NonIntegral(i, j, x))
    }
}

/// Adjoins `μ + ν` as a new simple root.
pub fn extend_cartan(c: &InductionCase) -> Result<ExtendedCartan, InductError> {
    let n = c.base.rank;
    let new_len = c.mu_norm2() + c.nu_norm2;
    if new_len.is_zero() {
        return Err(InductError::NonPositiveNu(c.nu_norm2));
    }
    let mut a = vec![vec![0i64; n + 1]; n + 1];
    for (i, row) in c.base.cartan.iter().enumerate() {
        a[i][..n].copy_from_slice(row);
        let ai = &c.base.simple_roots[i];
        let pair = dot(ai, &c.mu);
        a[i][n] = integral(Q::from_integer(2) * pair / dot(ai, ai), i + 1, n + 1)?;
        a[n][i] = integral(Q::from_integer(2) * pair / new_len, n + 1, i + 1)?;
    }
    a[n][n] = 2;
    let attachment = (0..n).filter(|i| a[*i][n] != 0).map(|i| i + 1).collect();
    let sym = symmetrizer(&a).filter(|d| d.iter().all(|x| x.is_positive()));
    Ok(ExtendedCartan { matrix: a, attachment, symmetrizer: sym.map(|d| d.iter().map(|x| x.to_string()).collect()) })
}

/// New Cartan column read off the normalized R-matrix.
#[derive(Debug, Clone, Serialize)]
pub struct RepColumn {
    pub column: Vec<i64>,
    /// `(α_j, wt_p)` reconstructed from exponent differences.
    pub pairings: Vec<String>,
    /// Exponents of `Rnorm((i,p),(i,p))`, `i = 1..p`.
    pub diagonal_exponents: Vec<String>,
}

fn positive_exponent(f: QField, a: &Scalar) -> Option<Q> {
    match f.monomial_of(a) {
        Some((1, e)) => Some(e),
        _ => None,
    }
}

pub fn cartan_column_from_rep(m: &RepModule, sd: &SpectralData) -> Result<RepColumn, InductError> {
    let f = m.field();
    let p = m.p;
    let r = &sd.rnorm;
    let exps = (1..=p)
        .map(|i| positive_exponent(f, &r.entry(i, p, i, p)).ok_or(InductError::NonMonomial(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut column = Vec::with_capacity(m.rank());
    let mut pairings = Vec::with_capacity(m.rank());
    for j in 0..m.rank() {
        let (a, b) = (0..p)
            .find_map(|a| m.raise[j][a].map(|b| (a, b)))
            .ok_or_else(|| InductError::Template(format!("no E_{} edge", j + 1)))?;
        let pairing = exps[b] - exps[a];
        let k = m.k(j, 1);
        let len = positive_exponent(f, &k.get(b, b)).zip(positive_exponent(f, &k.get(a, a))).map(|(x, y)| x - y);
        let len = len.filter(|l| l.is_positive()).ok_or(InductError::NonMonomial(b + 1))?;
        column.push(integral(Q::from_integer(-2) * pairing / len, j + 1, m.rank() + 1)?);
        pairings.push(pairing.to_string());
    }
    Ok(RepColumn { column, pairings, diagonal_exponents: exps.iter().map(|e| e.to_string()).collect() })
}

/// Weights of the would-be generators `e^i`, `weight(e^i) = ν − wt_i`, with
/// the bookkeeping `weight(e^{a}) − weight(e^{b}) = α_j` along every edge.
#[derive(Debug, Clone, Serialize)]
pub struct EWeightDiagnostic {
    pub available: bool,
    pub lengths_ok: bool,
    pub edges_ok: bool,
    pub nu_perp_ok: bool,
    pub top_is_new_root: bool,
}

impl EWeightDiagnostic {
    pub fn pass(&self) -> bool {
        !self.available || (self.lengths_ok && self.edges_ok && self.nu_perp_ok && self.top_is_new_root)
    }
}

fn same_padded(a: &[Q], b: &[Q]) -> bool {
    (0..a.len().max(b.len())).all(|k| a.get(k).copied().unwrap_or_default() == b.get(k).copied().unwrap_or_default())
}

pub fn e_weight_diagnostic(m: &RepModule, c: &InductionCase) -> EWeightDiagnostic {
    let Some(nu) = &c.nu_coords else {
        return EWeightDiagnostic { available: false, lengths_ok: false, edges_ok: false, nu_perp_ok: false, top_is_new_root: false };
    };
    let ew: Vec<Vec<Q>> = m.weights.iter().map(|w| add_scaled(nu, w, Q::from_integer(-1))).collect();
    let lengths_ok = ew.iter().all(|w| dot(w, w) == c.target_len2);
    let mut edges_ok = true;
    let mut nu_perp_ok = true;
    for j in 0..m.rank() {
        let alpha = &m.rs.simple_roots[j];
        nu_perp_ok &= dot(nu, alpha).is_zero();
        for a in 0..m.p {
            if let Some(b) = m.raise[j][a] {
                edges_ok &= same_padded(&add_scaled(&ew[a], &ew[b], Q::from_integer(-1)), alpha);
            }
        }
    }
    let new_root = add_scaled(&c.mu, nu, Q::from_integer(1));
    let top_is_new_root = same_padded(&ew[m.p - 1], &new_root);
    EWeightDiagnostic { available: true, lengths_ok, edges_ok, nu_perp_ok, top_is_new_root }
}

// ---------------------------------------------------------------- claims

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct GenSpec {
    #[serde(rename = "type")]
    pub kind: String,
    pub index: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub which: String,
    pub i: usize,
    pub j: usize,
    pub coef: Value,
    pub gen: GenSpec,
    pub k_exponents: Vec<Frac>,
    /// `"k_first"` when the K-monomial is written before the generator.
    #[serde(default)]
    pub order: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClaimsFile {
    pub rep: String,
    /// `"q"` or `"t"`: the variable the coefficient exponents are written in.
    pub exponent_unit: String,
    pub claims: Vec<Claim>,
}

pub fn parse_claims(text: &str) -> Result<ClaimsFile, InductError> {
    let f: ClaimsFile = serde_json::from_str(text).map_err(|e| InductError::Schema(e.to_string()))?;
    if f.exponent_unit != "q" && f.exponent_unit != "t" {
        return Err(InductError::Schema(format!("exponent_unit {}", f.exponent_unit)));
    }
    Ok(f)
}

impl Claim {
    pub fn which(&self) -> Result<Which, String> {
        match self.which.as_str() {
            "plus" => Ok(Which::Plus),
            "minus" => Ok(Which::Minus),
            w => Err(format!("which = {w}")),
        }
    }

    fn coefficient(&self, f: QField, unit: &str) -> Result<Scalar, String> {
        let c = Scalar::from_json(&self.coef).map_err(|e| e.to_string())?;
        Ok(if unit == "q" { f.from_q_scalar(&c) } else { c })
    }

    fn exponents(&self) -> Result<Vec<Q>, String> {
        self.k_exponents.iter().map(|x| frac(x).map_err(|e| e.to_string())).collect()
    }

    pub fn text(&self, f: QField, unit: &str) -> String {
        let sign = if self.which == "plus" { "+" } else { "-" };
        let lhs = format!("(m{sign})^{}_{}", self.i, self.j);
        let Ok(c) = self.coefficient(f, unit) else { return format!("{lhs} = ?") };
        if c.is_zero() {
            return format!("{lhs} = 0");
        }
        let mut parts = vec![format!("({})", f.fmt(&c))];
        let gen = (self.gen.kind != "none").then(|| format!("{}{}", self.gen.kind, self.gen.index));
        let k: Vec<String> = self
            .exponents()
            .unwrap_or_default()
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_zero())
            .map(|(i, e)| format!("K{}^({e})", i + 1))
            .collect();
        let kpart = (!k.is_empty()).then(|| k.join(""));
        let k_first = self.order.as_deref() == Some("k_first");
        if k_first {
            parts.extend(kpart);
            parts.extend(gen);
        } else {
            parts.extend(gen);
            parts.extend(kpart);
        }
        format!("{lhs} = {}", parts.join("·"))
    }

    /// `T_V` of the claimed expression.
    pub fn evaluate(&self, m: &RepModule, unit: &str) -> Result<SparseMat, String> {
        let f = m.field();
        let p = m.p;
        if self.i < 1 || self.i > p || self.j < 1 || self.j > p {
            return Err(format!("indices ({}, {}) out of range 1..{p}", self.i, self.j));
        }
        let c = self.coefficient(f, unit)?;
        if c.is_zero() {
            return Ok(SparseMat::zeros(p, p));
        }
        let r = self.exponents()?;
        if r.len() != m.rank() {
            return Err(format!("{} K exponents for rank {}", r.len(), m.rank()));
        }
        let k = m.k_monomial(&r).map_err(|e| e.to_string())?;
        let g = match (self.gen.kind.as_str(), self.gen.index) {
            ("none", _) => None,
            (kind @ ("E" | "F"), idx) if idx >= 1 && idx <= m.rank() => {
                Some(if kind == "E" { m.mat_e[idx - 1].clone() } else { m.mat_f[idx - 1].clone() })
            }
            (kind, idx) => return Err(format!("generator {kind}{idx}")),
        };
        let prod = match (g, self.order.as_deref()) {
            (None, _) => k,
            (Some(g), Some("k_first")) => k.mul(&g),
            (Some(g), None | Some("gen_first")) => g.mul(&k),
            (Some(_), Some(o)) => return Err(format!("order {o}")),
        };
        Ok(prod.scale(&c))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClaimVerdict {
    pub which: String,
    pub i: usize,
    pub j: usize,
    pub text: String,
    pub pass: bool,
    pub detail: Option<String>,
    /// `slice / claim` when a failing claim is off by a constant factor.
    pub ratio: Option<String>,
}

/// The nonzero scalar `k` with `a = k·b`, if any.
pub fn proportionality(a: &SparseMat, b: &SparseMat) -> Option<Scalar> {
    let (i, j, v) = b.triplets().next()?;
    let k = a.get(i, j).div(v).ok()?;
    (!k.is_zero() && *a == b.scale(&k)).then_some(k)
}

/// Checks every claim against `slice_with(R, R⁻¹, conv, i, j)`, using the
/// frozen slice convention for the claim's sign.
pub fn verify_mclaims(m: &RepModule, r: &RMatrix, rinv: &RMatrix, claims: &ClaimsFile) -> Result<Vec<ClaimVerdict>, InductError> {
    verify_mclaims_with(m, r, rinv, claims, PLUS_SLICE, MINUS_SLICE)
}

pub fn verify_mclaims_with(
    m: &RepModule,
    r: &RMatrix,
    rinv: &RMatrix,
    claims: &ClaimsFile,
    plus: SliceConvention,
    minus: SliceConvention,
) -> Result<Vec<ClaimVerdict>, InductError> {
    if r.p != m.p {
        return Err(InductError::Schema(format!("R has leg dimension {}, module has {}", r.p, m.p)));
    }
    let f = m.field();
    claims
        .claims
        .par_iter()
        .enumerate()
        .map(|(n, c)| {
            let which = c.which().map_err(|e| InductError::Claim(n + 1, e))?;
            let expected = c.evaluate(m, &claims.exponent_unit).map_err(|e| InductError::Claim(n + 1, e))?;
            let conv = if which == Which::Plus { plus } else { minus };
            let got = slice_with(r, rinv, conv, c.i, c.j);
            let diff = got.first_difference(&expected);
            let detail = diff.map(|(a, b)| {
                format!("entry ({}, {}): slice {} vs claim {}", a + 1, b + 1, f.fmt(&got.get(a, b)), f.fmt(&expected.get(a, b)))
            });
            let ratio = diff.and_then(|_| proportionality(&got, &expected)).map(|k| f.fmt(&k));
            Ok(ClaimVerdict {
                which: c.which.clone(),
                i: c.i,
                j: c.j,
                text: c.text(f, &claims.exponent_unit),
                pass: diff.is_none(),
                detail,
                ratio,
            })
        })
        .collect()
}

/// Slice conventions under which every claim of the given sign holds.
pub fn select_slice_conventions(m: &RepModule, r: &RMatrix, rinv: &RMatrix, claims: &ClaimsFile) -> Result<(Vec<SliceConvention>, Vec<SliceConvention>), InductError> {
    let mut plus = Vec::new();
    let mut minus = Vec::new();
    for conv in SliceConvention::all() {
        let v = verify_mclaims_with(m, r, rinv, claims, conv, conv)?;
        if v.iter().filter(|c| c.which == "plus").all(|c| c.pass) {
            plus.push(conv);
        }
        if v.iter().filter(|c| c.which == "minus").all(|c| c.pass) {
            minus.push(conv);
        }
    }
    Ok((plus, minus))
}

// ---------------------------------------------------------------- Serre data

#[derive(Debug, Clone)]
pub struct SerreScalars {
    pub u: Scalar,
    pub v: Scalar,
    pub w: Scalar,
    pub z: Scalar,
    /// 1-based attachment node.
    pub node: usize,
    /// `(m⁺)^{p−1}_p = c·E_j·(m⁺)^p_p`.
    pub c: Scalar,
    pub field: QField,
}

impl SerreScalars {
    pub fn tuple(&self) -> [Scalar; 4] {
        [self.u.clone(), self.v.clone(), self.w.clone(), self.z.clone()]
    }

    pub fn labels(&self) -> Vec<String> {
        self.tuple().iter().map(|s| self.field.fmt(s)).collect()
    }

    pub fn to_json(&self) -> Value {
        let t = self.tuple();
        json!({
            "node": self.node,
            "c": self.field.fmt(&self.c),
            "u": t[0].to_json(), "v": t[1].to_json(), "w": t[2].to_json(), "z": t[3].to_json(),
            "labels": self.labels(),
        })
    }
}

fn row_support(r: &RMatrix, i: usize, k: usize) -> Vec<(usize, usize)> {
    let p = r.p;
    r.mat.row(r.idx(i - 1, k - 1)).iter().map(|(c, _)| (*c as usize / p + 1, *c as usize % p + 1)).collect()
}

fn expect_support(r: &RMatrix, what: &str, row: (usize, usize), allowed: &[(usize, usize)]) -> Result<(), InductError> {
    let s = row_support(r, row.0, row.1);
    if s.iter().all(|x| allowed.contains(x)) {
        Ok(())
    } else {
        Err(InductError::Template(format!("{what} row {row:?} has support {s:?}")))
    }
}

/// Extracts `(u, v, w, z)` with `e^{p−1} = u·e^p E_j + v·E_j e^p`,
/// `e^p e^{p−1} = w·e^{p−1} e^p` and `e^{p−1} E_j = z·E_j e^{p−1}`.
pub fn serre_extract(m: &RepModule, r: &RMatrix, rinv: &RMatrix, rprime: &RMatrix) -> Result<SerreScalars, InductError> {
    let f = m.field();
    let p = m.p;
    if p < 2 {
        return Err(InductError::Template("module too small".into()));
    }
    let (top, sub) = (p, p - 1);
    let js: Vec<usize> = (0..m.rank()).filter(|j| m.raise[*j][sub - 1] == Some(top - 1)).collect();
    let [j] = js[..] else {
        return Err(InductError::Template(format!("{} roots raise f_(p-1) to f_p", js.len())));
    };
    let diag = slice_with(r, rinv, PLUS_SLICE, top, top);
    let off = slice_with(r, rinv, PLUS_SLICE, sub, top);
    let x = m.mat_e[j].mul(&diag);
    let (a, b, xv) = x.triplets().next().map(|(a, b, v)| (a, b, v.clone())).ok_or_else(|| InductError::Template("E_j·m+ vanishes".into()))?;
    let c = off.get(a, b).div(&xv)?;
    if off != x.scale(&c) {
        return Err(InductError::Template("(m+)^(p-1)_p is not proportional to E_j (m+)^p_p".into()));
    }
    expect_support(r, "R", (sub, top), &[(sub, top), (top, sub)])?;
    expect_support(r, "R", (top, sub), &[(top, sub)])?;
    expect_support(r, "R", (top, top), &[(top, top)])?;
    expect_support(r, "R", (sub, sub), &[(sub, sub)])?;
    expect_support(rprime, "R'", (top, sub), &[(top, sub), (sub, top)])?;
    let r1 = r.entry(sub, top, sub, top);
    let r2 = r.entry(sub, top, top, sub);
    let r3 = r.entry(top, top, top, top);
    let r4 = r.entry(top, sub, top, sub);
    let r5 = r.entry(sub, sub, sub, sub);
    let u = c.mul(&r4).div(&r2)?;
    let v = c.mul(&r4).mul(&r1).div(&r2.mul(&r3))?.neg();
    let z = r5.div(&r4)?;
    let alpha = rprime.entry(top, sub, top, sub);
    let beta = rprime.entry(top, sub, sub, top);
    let w = Scalar::one().sub(&beta).div(&alpha)?;
    Ok(SerreScalars { u, v, w, z, node: j + 1, c, field: f })
}

/// Elements of the free algebra on `a`, `b` over ℚ(t).
type FreeElt = BTreeMap<Vec<u8>, Scalar>;
/// Leading word and its replacement.
type Rule = (Vec<u8>, Vec<(Vec<u8>, Scalar)>);

fn free_add(acc: &mut FreeElt, w: Vec<u8>, c: Scalar) {
    let e = acc.entry(w).or_insert_with(Scalar::zero);
    *e = e.add(&c);
}

/// Rewrites `lhs` subwords with the linear combinations in `rules` until none
/// remains. Each rule strictly decreases the word in the order where `a < b`
/// is compared from the left, so the process terminates.
fn reduce(mut x: FreeElt, rules: &[Rule]) -> FreeElt {
    loop {
        let hit = x.iter().filter(|(_, c)| !c.is_zero()).find_map(|(w, c)| {
            rules.iter().find_map(|(lhs, rhs)| {
                w.windows(lhs.len()).position(|s| s == lhs.as_slice()).map(|pos| (w.clone(), c.clone(), pos, lhs.len(), rhs))
            })
        });
        let Some((w, c, pos, len, rhs)) = hit else {
            x.retain(|_, c| !c.is_zero());
            return x;
        };
        x.remove(&w);
        for (mid, k) in rhs {
            let mut nw = w[..pos].to_vec();
            nw.extend_from_slice(mid);
            nw.extend_from_slice(&w[pos + len..]);
            free_add(&mut x, nw, c.mul(k));
        }
    }
}

/// Both q-Serre identities through free-algebra rewriting and through the
/// closed scalar conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SerreCheck {
    pub free: (bool, bool),
    pub scalar: (bool, bool),
}

impl SerreCheck {
    pub fn agree(&self) -> bool {
        self.free == self.scalar
    }
}

pub fn serre_check(u: &Scalar, v: &Scalar, w: &Scalar, z: &Scalar, f: QField) -> SerreCheck {
    if u.is_zero() || v.is_zero() || z.is_zero() {
        return SerreCheck { free: (false, false), scalar: (false, false) };
    }
    let two = f.q().add(&f.q().recip().expect("q is invertible"));
    let zv = z.mul(v);
    // a·s = w·s·a and s·b = z·b·s with s = u·ab + v·ba, solved for aab and bba.
    let aab = vec![
        (b"aba".to_vec(), w.mul(u).sub(v).div(u).unwrap()),
        (b"baa".to_vec(), w.mul(v).div(u).unwrap()),
    ];
    let bba = vec![
        (b"abb".to_vec(), u.div(&zv).unwrap()),
        (b"bab".to_vec(), v.sub(&z.mul(u)).div(&zv).unwrap()),
    ];
    let rules = vec![(b"aab".to_vec(), aab.clone()), (b"bba".to_vec(), bba.clone())];
    let serre = |x: &[u8], y: &[u8], mid: &[u8]| {
        let mut e = FreeElt::new();
        free_add(&mut e, x.to_vec(), Scalar::one());
        free_add(&mut e, mid.to_vec(), two.neg());
        free_add(&mut e, y.to_vec(), Scalar::one());
        reduce(e, &rules).is_empty()
    };
    let free = (serre(b"aab", b"baa", b"aba"), serre(b"bba", b"abb", b"bab"));
    let scalar = (
        aab[0].1 == two && aab[1].1 == Scalar::int(-1),
        bba[0].1 == Scalar::int(-1) && bba[1].1 == two,
    );
    SerreCheck { free, scalar }
}

/// `(first, second)` Serre identities; true only when both methods agree.
pub fn serre_verify(s: &SerreScalars) -> (bool, bool) {
    let c = serre_check(&s.u, &s.v, &s.w, &s.z, s.field);
    (c.free.0 && c.scalar.0, c.free.1 && c.scalar.1)
}

/// Every single-scalar perturbation by `q^{±1}`, with its verdict.
pub fn serre_mutations(s: &SerreScalars) -> Vec<(usize, i32, (bool, bool))> {
    let f = s.field;
    let mut out = Vec::new();
    for k in 0..4 {
        for e in [1, -1] {
            let mut t = s.tuple();
            t[k] = t[k].mul(&f.q_int(e));
            let c = serre_check(&t[0], &t[1], &t[2], &t[3], f);
            out.push((k, e, (c.free.0 && c.scalar.0, c.free.1 && c.scalar.1)));
        }
    }
    out
}

/// `[sign, num, den]` to `sign·q^{num/den}`.
pub fn signed_power(f: QField, x: &[i64; 3]) -> Result<Scalar, ExactError> {
    let s = f.q_pow(Q::new(x[1], x[2]))?;
    Ok(if x[0] < 0 { s.neg() } else { s })
}
