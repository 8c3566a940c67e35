//! The braiding `R_VV` of a minuscule module: braid operators, root vectors,
//! the truncated quasi-R-matrix, and exact checks of its defining properties.

use std::collections::{BTreeMap, BinaryHeap};
use std::fmt;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::exactq::{ExactError, QField, Scalar};
use crate::repmod::RepModule;
use crate::rootsys::{dot, Q};
use crate::sparse::{acc_add, SparseMat};

#[derive(Debug, thiserror::Error)]
pub enum RmError {
    #[error("module is not minuscule: <wt_{weight}, alpha_{root}^v> = {value}")]
    NotMinuscule { weight: usize, root: usize, value: String },
    #[error("word is not reduced: position {0} gives a repeated or negative root")]
    NotReduced(usize),
    #[error("root vector {0} does not shift weights uniformly")]
    NotHomogeneous(usize),
    #[error("no candidate convention matches the anchor entries and the intertwiner check")]
    SelfTestFailed,
    #[error("matrix is not triangular at ({0},{1})")]
    NotTriangular(usize, usize),
    #[error("zero diagonal entry at {0}")]
    Singular(usize),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Legs {
    /// `E_β ⊗ F_β`.
    EF,
    /// `F_β ⊗ E_β`.
    FE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Order {
    /// Factor for `β_1` leftmost.
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Conjugation {
    /// `E_β = T E_i T⁻¹`.
    Direct,
    /// `E_β = T⁻¹ E_i T`.
    Inverse,
}

/// Everything the construction of `R_VV` leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Convention {
    pub legs: Legs,
    pub order: Order,
    pub conjugation: Conjugation,
    /// `T_i v = sign · q_i^power · F_i v` when `<wt v, α_i^∨> = 1`.
    pub braid_sign: i8,
    pub braid_power: i8,
}

impl fmt::Display for Convention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.braid_sign < 0 { "-" } else { "+" };
        write!(
            f,
            "legs={:?} order={:?} conj={:?} braid={}q_i^{}",
            self.legs, self.order, self.conjugation, s, self.braid_power
        )
    }
}

/// Convention selected by [`self_test`] on the half-spin module of D5.
pub const FROZEN: Convention = Convention {
    legs: Legs::FE,
    order: Order::Forward,
    conjugation: Conjugation::Direct,
    braid_sign: -1,
    braid_power: 1,
};

pub const DEFAULT_BRAID: (i8, i8) = (-1, 1);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Leg {
    /// `T_{ab} = M[(i,a),(j,b)]`.
    First,
    /// `T_{ab} = M[(a,i),(b,j)]`.
    Second,
}

/// How an `m±` generator is read off the R-matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct SliceConvention {
    pub inverse: bool,
    pub leg: Leg,
}

impl SliceConvention {
    pub fn all() -> [SliceConvention; 4] {
        [
            SliceConvention { inverse: true, leg: Leg::First },
            SliceConvention { inverse: true, leg: Leg::Second },
            SliceConvention { inverse: false, leg: Leg::First },
            SliceConvention { inverse: false, leg: Leg::Second },
        ]
    }
}

impl fmt::Display for SliceConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.inverse { "R^-1" } else { "R" };
        let l = match self.leg {
            Leg::First => "first",
            Leg::Second => "second",
        };
        write!(f, "{l}-leg slice of {m}")
    }
}

/// Slice conventions that make the bundled `m±` claims verify.
pub const PLUS_SLICE: SliceConvention = SliceConvention { inverse: true, leg: Leg::First };
pub const MINUS_SLICE: SliceConvention = SliceConvention { inverse: false, leg: Leg::Second };

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Which {
    Plus,
    Minus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Full,
    Sampled { n: usize, seed: u64 },
}

impl fmt::Display for CheckMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckMode::Full => write!(f, "full"),
            CheckMode::Sampled { n, .. } => write!(f, "sampled:{n}"),
        }
    }
}

fn check_minuscule(m: &RepModule) -> Result<(), RmError> {
    for i in 0..m.rank() {
        for j in 0..m.p {
            let n = m.coroot(i, j);
            if !(n.is_zero() || n == Q::from_integer(1) || n == Q::from_integer(-1)) {
                return Err(RmError::NotMinuscule { weight: j + 1, root: i + 1, value: n.to_string() });
            }
        }
    }
    Ok(())
}

/// Lusztig's operator `T_i` specialised to a minuscule module.
pub fn braid_operator(m: &RepModule, i: usize, sign: i8, power: i8) -> Result<SparseMat, RmError> {
    check_minuscule(m)?;
    let qi = m.q_i(i).pow(power as i32)?;
    let c = if sign < 0 { qi.neg() } else { qi };
    let one = Q::from_integer(1);
    let trips = (0..m.p)
        .map(|j| {
            let n = m.coroot(i, j);
            if n.is_zero() {
                (j, j, Scalar::one())
            } else if n == one {
                (m.lower[i][j].expect("minuscule module has F_i edge"), j, c.clone())
            } else {
                (m.raise[i][j].expect("minuscule module has E_i edge"), j, Scalar::one())
            }
        })
        .collect();
    Ok(SparseMat::from_triplets(m.p, m.p, trips))
}

/// Inverse of a matrix with exactly one nonzero entry per row and column.
pub fn monomial_inverse(t: &SparseMat) -> SparseMat {
    let trips = t.triplets().map(|(i, j, v)| (j, i, v.recip().expect("monomial matrix entry"))).collect();
    SparseMat::from_triplets(t.ncols(), t.nrows(), trips)
}

#[derive(Debug, Clone)]
pub struct RootVector {
    pub beta: Vec<Q>,
    /// 1-based simple reflection at this position of the word.
    pub simple: usize,
    pub e: SparseMat,
    pub f: SparseMat,
    pub q_beta: Scalar,
}

/// Root vectors `E_{β_j}`, `F_{β_j}` along a reduced word for `w0`.
pub fn root_vectors(m: &RepModule, word: &[usize], conv: &Convention) -> Result<Vec<RootVector>, RmError> {
    let field = m.field();
    let ts: Vec<SparseMat> =
        (0..m.rank()).map(|i| braid_operator(m, i, conv.braid_sign, conv.braid_power)).collect::<Result<_, _>>()?;
    let tinv: Vec<SparseMat> = ts.iter().map(monomial_inverse).collect();
    let mut left = SparseMat::identity(m.p);
    let mut right = SparseMat::identity(m.p);
    let mut out: Vec<RootVector> = Vec::with_capacity(word.len());
    for (pos, &s) in word.iter().enumerate() {
        let i = s - 1;
        let e = left.mul(&m.mat_e[i]).mul(&right);
        let f = left.mul(&m.mat_f[i]).mul(&right);
        let mut beta: Option<Vec<Q>> = None;
        for (a, b, _) in e.triplets() {
            let shift: Vec<Q> = m.weights[a].iter().zip(&m.weights[b]).map(|(x, y)| x - y).collect();
            match &beta {
                None => beta = Some(shift),
                Some(bb) if *bb != shift => return Err(RmError::NotHomogeneous(pos + 1)),
                _ => {}
            }
        }
        let beta = beta.ok_or(RmError::NotReduced(pos + 1))?;
        if !m.rs.is_positive_root(&beta) || out.iter().any(|r| r.beta == beta) {
            return Err(RmError::NotReduced(pos + 1));
        }
        let q_beta = field.q_pow(dot(&beta, &beta) / Q::from_integer(2))?;
        out.push(RootVector { beta, simple: s, e, f, q_beta });
        match conv.conjugation {
            Conjugation::Direct => {
                left = left.mul(&ts[i]);
                right = tinv[i].mul(&right);
            }
            Conjugation::Inverse => {
                left = left.mul(&tinv[i]);
                right = ts[i].mul(&right);
            }
        }
    }
    Ok(out)
}

/// Matrix on `V⊗V`; composite index `(i,k) ↦ i·p + k` with 0-based `i, k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RMatrix {
    pub p: usize,
    pub field: QField,
    pub mat: SparseMat,
}

/// Column access: `cols[c]` lists `(row, value)`.
pub type Columns = Vec<Vec<(u32, Scalar)>>;

impl RMatrix {
    pub fn new(p: usize, field: QField, mat: SparseMat) -> RMatrix {
        assert_eq!(mat.nrows(), p * p);
        RMatrix { p, field, mat }
    }

    pub fn idx(&self, i: usize, k: usize) -> usize {
        i * self.p + k
    }

    /// Entry at row `(i,k)`, column `(j,l)`, 1-based indices.
    pub fn entry(&self, i: usize, k: usize, j: usize, l: usize) -> Scalar {
        self.mat.get(self.idx(i - 1, k - 1), self.idx(j - 1, l - 1))
    }

    pub fn columns(&self) -> Columns {
        let t = self.mat.transpose();
        (0..t.nrows()).map(|c| t.row(c).to_vec()).collect()
    }

    /// `P·M`.
    pub fn flip_left(&self) -> RMatrix {
        RMatrix::new(self.p, self.field, self.mat.permute_rows(&flip_perm(self.p)))
    }

    /// `M_21 = P·M·P`.
    pub fn swap_legs(&self) -> RMatrix {
        let perm = flip_perm(self.p);
        let trips = self.mat.triplets().map(|(r, c, v)| (perm[r], perm[c], v.clone())).collect();
        RMatrix::new(self.p, self.field, SparseMat::from_triplets(self.p * self.p, self.p * self.p, trips))
    }

    pub fn scale(&self, k: &Scalar) -> RMatrix {
        RMatrix::new(self.p, self.field, self.mat.scale(k))
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .mat
            .triplets()
            .map(|(r, c, v)| json!([r / self.p + 1, r % self.p + 1, c / self.p + 1, c % self.p + 1, v.to_json()]))
            .collect();
        json!({"dim": self.p, "L": self.field.l(), "entries": entries})
    }
}

/// `perm[(i,k)] = (k,i)`.
pub fn flip_perm(p: usize) -> Vec<usize> {
    (0..p * p).map(|x| (x % p) * p + x / p).collect()
}

pub fn flip(p: usize) -> SparseMat {
    SparseMat::identity(p * p).permute_rows(&flip_perm(p))
}

/// Diagonal weight-pairing operator `q^{(wt_i, wt_k)}`.
pub fn b_operator(m: &RepModule) -> Result<Vec<Scalar>, ExactError> {
    let f = m.field();
    let mut d = Vec::with_capacity(m.p * m.p);
    for a in &m.weights {
        for b in &m.weights {
            d.push(f.q_pow(dot(a, b))?);
        }
    }
    Ok(d)
}

type MonoCol = Vec<Option<(usize, Scalar)>>;

fn mono_columns(x: &SparseMat) -> MonoCol {
    let mut v = vec![None; x.ncols()];
    for (r, c, s) in x.triplets() {
        debug_assert!(v[c].is_none());
        v[c] = Some((r, s.clone()));
    }
    v
}

/// Builds `R_VV` under a given convention; `with_b = false` drops the
/// weight-pairing factor (used by mutation tests).
pub fn rvv_with(m: &RepModule, conv: &Convention, with_b: bool) -> Result<RMatrix, RmError> {
    let roots = root_vectors(m, &m.rs.w0_word, conv)?;
    let p = m.p;
    let field = m.field();
    let mut factors: Vec<(Scalar, MonoCol, MonoCol)> = roots
        .iter()
        .map(|r| {
            let c = r.q_beta.sub(&r.q_beta.recip().unwrap());
            let (x, y) = match conv.legs {
                Legs::EF => (&r.e, &r.f),
                Legs::FE => (&r.f, &r.e),
            };
            (c, mono_columns(x), mono_columns(y))
        })
        .collect();
    // The rightmost factor acts first.
    if conv.order == Order::Forward {
        factors.reverse();
    }
    let b = if with_b { b_operator(m)? } else { vec![Scalar::one(); p * p] };
    let cols: Vec<Vec<(u32, Scalar)>> = (0..p * p)
        .into_par_iter()
        .map(|col| {
            let mut v: BTreeMap<u64, Scalar> = BTreeMap::new();
            v.insert(col as u64, Scalar::one());
            for (c, x, y) in &factors {
                let mut add = BTreeMap::new();
                for (idx, val) in &v {
                    let (a, bb) = (*idx as usize / p, *idx as usize % p);
                    if let (Some((a2, xv)), Some((b2, yv))) = (&x[a], &y[bb]) {
                        acc_add(&mut add, (*a2 * p + *b2) as u64, c.mul(xv).mul(yv).mul(val));
                    }
                }
                for (k, val) in add {
                    acc_add(&mut v, k, val);
                }
            }
            v.into_iter().map(|(r, val)| (r as u32, val.mul(&b[r as usize]))).collect()
        })
        .collect();
    let trips = cols
        .into_iter()
        .enumerate()
        .flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r as usize, c, v)))
        .collect();
    Ok(RMatrix::new(p, field, SparseMat::from_triplets(p * p, p * p, trips)))
}

pub fn rvv(m: &RepModule) -> Result<RMatrix, RmError> {
    rvv_with(m, &FROZEN, true)
}

/// `Standard`: `Δ(E) = E⊗K + 1⊗E`, `Δ(F) = F⊗1 + K⁻¹⊗F`; `Opposite` swaps the legs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Coproduct {
    Standard,
    Opposite,
}

/// Coproduct under which the frozen `R_VV` is an intertwiner.
pub const FROZEN_COPRODUCT: Coproduct = Coproduct::Opposite;

fn coproducts(m: &RepModule, cop: Coproduct) -> Vec<(String, SparseMat)> {
    let id = SparseMat::identity(m.p);
    let mut out = Vec::new();
    let kr = |a: &SparseMat, b: &SparseMat| match cop {
        Coproduct::Standard => a.kron(b),
        Coproduct::Opposite => b.kron(a),
    };
    for i in 0..m.rank() {
        let k = m.k(i, 1);
        let kinv = m.k(i, -1);
        out.push((format!("E{}", i + 1), kr(&m.mat_e[i], &k).add(&kr(&id, &m.mat_e[i]))));
        out.push((format!("F{}", i + 1), kr(&m.mat_f[i], &id).add(&kr(&kinv, &m.mat_f[i]))));
        out.push((format!("K{}", i + 1), k.kron(&k)));
    }
    out
}

/// Generators `x` for which `PR·Δ(x) ≠ Δ(x)·PR`.
pub fn intertwiner_failures(m: &RepModule, r: &RMatrix, cop: Coproduct) -> Vec<String> {
    let pr = r.flip_left().mat;
    coproducts(m, cop)
        .into_par_iter()
        .filter_map(|(name, d)| if pr.mul(&d) == d.mul(&pr) { None } else { Some(name) })
        .collect()
}

/// Intertwiner property under [`FROZEN_COPRODUCT`].
pub fn check_intertwiner(m: &RepModule, r: &RMatrix) -> bool {
    intertwiner_failures(m, r, FROZEN_COPRODUCT).is_empty()
}

/// One operator in a product on `V⊗V⊗V`: a two-leg matrix acting on legs `(x, y)`.
pub struct LegOp<'a> {
    pub cols: &'a Columns,
    pub legs: (usize, usize),
}

fn apply_leg(p: usize, op: &LegOp<'_>, v: &BTreeMap<u64, Scalar>) -> BTreeMap<u64, Scalar> {
    let p = p as u64;
    let mut out = BTreeMap::new();
    let pw = [p * p, p, 1];
    let (x, y) = op.legs;
    for (idx, val) in v {
        let d = [idx / (p * p), (idx / p) % p, idx % p];
        let col = d[x] * p + d[y];
        let base = idx - d[x] * pw[x] - d[y] * pw[y];
        for (row, rv) in &op.cols[col as usize] {
            let (nx, ny) = (*row as u64 / p, *row as u64 % p);
            acc_add(&mut out, base + nx * pw[x] + ny * pw[y], rv.mul(val));
        }
    }
    out
}

fn sample_indices(total: usize, mode: CheckMode) -> Vec<usize> {
    match mode {
        CheckMode::Full => (0..total).collect(),
        CheckMode::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut v = rand::seq::index::sample(&mut rng, total, n.min(total)).into_vec();
            v.sort_unstable();
            v
        }
    }
}

/// Compares two operator products (written left to right) on basis vectors
/// of `V⊗V⊗V`; returns the first failing basis index.
pub fn three_leg_mismatch(p: usize, lhs: &[LegOp<'_>], rhs: &[LegOp<'_>], mode: CheckMode) -> Option<usize> {
    let apply_all = |ops: &[LegOp<'_>], c: usize| {
        let mut v = BTreeMap::new();
        v.insert(c as u64, Scalar::one());
        for op in ops.iter().rev() {
            v = apply_leg(p, op, &v);
        }
        v
    };
    sample_indices(p * p * p, mode).into_par_iter().find_first(|&c| apply_all(lhs, c) != apply_all(rhs, c))
}

/// `R12 R13 R23 = R23 R13 R12`.
pub fn check_qybe(r: &RMatrix, mode: CheckMode) -> bool {
    let cols = r.columns();
    let op = |legs| LegOp { cols: &cols, legs };
    three_leg_mismatch(r.p, &[op((0, 1)), op((0, 2)), op((1, 2))], &[op((1, 2)), op((0, 2)), op((0, 1))], mode)
        .is_none()
}

fn tri_key(p: usize, idx: usize) -> usize {
    let (i, k) = (idx / p, idx % p);
    i * p + (p - 1 - k)
}

/// Nonzero entries violating `(i = j ∧ k = l) ∨ (i < j ∧ k > l)`, 1-based.
pub fn triangular_violations(r: &RMatrix) -> Vec<(usize, usize, usize, usize)> {
    let p = r.p;
    r.mat
        .triplets()
        .filter_map(|(row, col, _)| {
            let (i, k, j, l) = (row / p, row % p, col / p, col % p);
            let ok = (i == j && k == l) || (i < j && k > l);
            (!ok).then_some((i + 1, k + 1, j + 1, l + 1))
        })
        .collect()
}

/// Nonzero entries joining different total weights, 1-based.
pub fn grading_violations(m: &RepModule, r: &RMatrix) -> Vec<(usize, usize, usize, usize)> {
    let p = r.p;
    let sum = |a: usize, b: usize| -> Vec<Q> { m.weights[a].iter().zip(&m.weights[b]).map(|(x, y)| x + y).collect() };
    r.mat
        .triplets()
        .filter_map(|(row, col, _)| {
            let (i, k, j, l) = (row / p, row % p, col / p, col % p);
            (sum(i, k) != sum(j, l)).then_some((i + 1, k + 1, j + 1, l + 1))
        })
        .collect()
}

/// Inverse by back-substitution; requires the triangular structure.
pub fn inverse(r: &RMatrix) -> Result<RMatrix, RmError> {
    let p = r.p;
    let n = p * p;
    if let Some(&(i, k, j, l)) = triangular_violations(r).first() {
        return Err(RmError::NotTriangular((i - 1) * p + k - 1, (j - 1) * p + l - 1));
    }
    let diag: Vec<Scalar> = (0..n).map(|x| r.mat.get(x, x)).collect();
    if let Some(x) = diag.iter().position(|d| d.is_zero()) {
        return Err(RmError::Singular(x));
    }
    let cols = r.columns();
    let mut key_to_idx = vec![0usize; n];
    for x in 0..n {
        key_to_idx[tri_key(p, x)] = x;
    }
    let out: Vec<Vec<(usize, Scalar)>> = (0..n)
        .into_par_iter()
        .map(|c| {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            let mut heap = BinaryHeap::new();
            acc.insert(tri_key(p, c), Scalar::one());
            heap.push(tri_key(p, c));
            let mut x = Vec::new();
            while let Some(key) = heap.pop() {
                let Some(rhs) = acc.remove(&key) else { continue };
                let idx = key_to_idx[key];
                let xi = rhs.div(&diag[idx]).unwrap();
                for (row, v) in &cols[idx] {
                    let row = *row as usize;
                    if row == idx {
                        continue;
                    }
                    let rk = tri_key(p, row);
                    let e = acc.entry(rk).or_insert_with(|| {
                        heap.push(rk);
                        Scalar::zero()
                    });
                    *e = e.sub(&v.mul(&xi));
                }
                x.push((idx, xi));
            }
            x.into_iter().filter(|(_, v)| !v.is_zero()).collect()
        })
        .collect();
    let trips = out.into_iter().enumerate().flat_map(|(c, col)| col.into_iter().map(move |(r, v)| (r, c, v))).collect();
    Ok(RMatrix::new(p, r.field, SparseMat::from_triplets(n, n, trips)))
}

/// `p×p` slice of a two-leg matrix at 1-based `(i, j)`.
pub fn slice(m: &RMatrix, leg: Leg, i: usize, j: usize) -> SparseMat {
    let p = m.p;
    let (i, j) = (i - 1, j - 1);
    let mut trips = Vec::new();
    for a in 0..p {
        let row = match leg {
            Leg::First => i * p + a,
            Leg::Second => a * p + i,
        };
        for (col, v) in m.mat.row(row) {
            let col = *col as usize;
            let (cj, cb) = match leg {
                Leg::First => (col / p, col % p),
                Leg::Second => (col % p, col / p),
            };
            if cj == j {
                trips.push((a, cb, v.clone()));
            }
        }
    }
    SparseMat::from_triplets(p, p, trips)
}

/// `T_V(m±_{ij})` under the frozen slice conventions.
pub fn lplus_slice(r: &RMatrix, rinv: &RMatrix, which: Which, i: usize, j: usize) -> SparseMat {
    let conv = match which {
        Which::Plus => PLUS_SLICE,
        Which::Minus => MINUS_SLICE,
    };
    slice_with(r, rinv, conv, i, j)
}

pub fn slice_with(r: &RMatrix, rinv: &RMatrix, conv: SliceConvention, i: usize, j: usize) -> SparseMat {
    slice(if conv.inverse { rinv } else { r }, conv.leg, i, j)
}

/// Whether `P·R` equals its transpose.
pub fn pr_is_symmetric(r: &RMatrix) -> bool {
    let pr = r.flip_left().mat;
    pr == pr.transpose()
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateResult {
    pub convention: Convention,
    pub anchors: Vec<bool>,
    /// Coproducts for which `P·R` commutes with all `Δ(x)`.
    pub intertwines: Vec<Coproduct>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SelfTest {
    pub evaluated: Vec<CandidateResult>,
    pub selected: Option<Convention>,
    pub coproduct: Option<Coproduct>,
    pub passing: usize,
    /// Number of different matrices among the passing candidates.
    pub distinct_matrices: usize,
}

/// Reference entries of the half-spin braiding: `(row i,k, col j,l)` of `P·R_VV`
/// with 1-based indices and exponent of `q`, plus an extra factor `q - q^{-1}`.
struct Anchor {
    pr: bool,
    idx: (usize, usize, usize, usize),
    exp: (i64, i64),
    with_diff: bool,
}

const D5_ANCHORS: [Anchor; 3] = [
    Anchor { pr: false, idx: (2, 1, 2, 1), exp: (1, 4), with_diff: false },
    Anchor { pr: false, idx: (1, 2, 2, 1), exp: (1, 4), with_diff: true },
    Anchor { pr: true, idx: (1, 16, 16, 1), exp: (-3, 4), with_diff: false },
];

fn anchor_values(m: &RepModule, r: &RMatrix) -> Vec<bool> {
    let f = m.field();
    let pr = r.flip_left();
    D5_ANCHORS
        .iter()
        .map(|a| {
            let mut want = f.q_pow(Q::new(a.exp.0, a.exp.1)).unwrap();
            if a.with_diff {
                want = want.mul(&f.q_diff());
            }
            let src = if a.pr { &pr } else { r };
            src.entry(a.idx.0, a.idx.1, a.idx.2, a.idx.3) == want
        })
        .collect()
}

fn candidates(braids: &[(i8, i8)]) -> Vec<Convention> {
    let mut out = Vec::new();
    for &(braid_sign, braid_power) in braids {
        for conjugation in [Conjugation::Direct, Conjugation::Inverse] {
            for legs in [Legs::EF, Legs::FE] {
                for order in [Order::Forward, Order::Reverse] {
                    out.push(Convention { legs, order, conjugation, braid_sign, braid_power });
                }
            }
        }
    }
    out
}

/// Evaluates candidate conventions on the D5 half-spin module; braid variants
/// are only tried if the default braid convention yields no match.
pub fn self_test(d5: &RepModule) -> SelfTest {
    let run = |cands: Vec<Convention>| -> Vec<(CandidateResult, Option<RMatrix>)> {
        cands
            .into_iter()
            .map(|c| match rvv_with(d5, &c, true) {
                Ok(r) => (
                    CandidateResult {
                        convention: c,
                        anchors: anchor_values(d5, &r),
                        intertwines: [Coproduct::Standard, Coproduct::Opposite]
                            .into_iter()
                            .filter(|&cop| intertwiner_failures(d5, &r, cop).is_empty())
                            .collect(),
                        error: None,
                    },
                    Some(r),
                ),
                Err(e) => (
                    CandidateResult { convention: c, anchors: vec![], intertwines: vec![], error: Some(e.to_string()) },
                    None,
                ),
            })
            .collect()
    };
    let ok = |c: &CandidateResult| !c.intertwines.is_empty() && !c.anchors.is_empty() && c.anchors.iter().all(|x| *x);
    let mut evaluated = run(candidates(&[DEFAULT_BRAID]));
    if !evaluated.iter().any(|(c, _)| ok(c)) {
        evaluated.extend(run(candidates(&[(-1, -1), (-1, 0), (1, -1), (1, 0), (1, 1)])));
    }
    let mut distinct: Vec<&RMatrix> = Vec::new();
    for (c, r) in &evaluated {
        if let (true, Some(r)) = (ok(c), r) {
            if !distinct.contains(&r) {
                distinct.push(r);
            }
        }
    }
    let distinct_matrices = distinct.len();
    let first = evaluated.iter().find(|(c, _)| ok(c));
    let selected = first.map(|(c, _)| c.convention);
    let coproduct = first.map(|(c, _)| c.intertwines[0]);
    let evaluated: Vec<CandidateResult> = evaluated.into_iter().map(|(c, _)| c).collect();
    let passing = evaluated.iter().filter(|c| ok(c)).count();
    SelfTest { evaluated, selected, coproduct, passing, distinct_matrices }
}
