//! Row-compressed sparse matrices over Q(t).

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::exactq::Scalar;

pub type Row = Vec<(u32, Scalar)>;

/// Sparse matrix; each row is sorted by column and holds no explicit zeros,
/// so structural equality is value equality.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SparseMat {
    nrows: usize,
    ncols: usize,
    rows: Vec<Row>,
}

fn accumulate(acc: &mut BTreeMap<u32, Scalar>, col: u32, v: Scalar) {
    use std::collections::btree_map::Entry;
    match acc.entry(col) {
        Entry::Vacant(e) => {
            e.insert(v);
        }
        Entry::Occupied(mut e) => {
            let s = e.get().add(&v);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

fn finish(acc: BTreeMap<u32, Scalar>) -> Row {
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

impl SparseMat {
    pub fn zeros(nrows: usize, ncols: usize) -> SparseMat {
        SparseMat { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> SparseMat {
        SparseMat::diag((0..n).map(|_| Scalar::one()).collect())
    }

    pub fn diag(d: Vec<Scalar>) -> SparseMat {
        let n = d.len();
        let rows = d
            .into_iter()
            .enumerate()
            .map(|(i, v)| if v.is_zero() { Vec::new() } else { vec![(i as u32, v)] })
            .collect();
        SparseMat { nrows: n, ncols: n, rows }
    }

    /// Sums duplicate coordinates.
    pub fn from_triplets(nrows: usize, ncols: usize, trips: Vec<(usize, usize, Scalar)>) -> SparseMat {
        let mut acc: Vec<BTreeMap<u32, Scalar>> = vec![BTreeMap::new(); nrows];
        for (i, j, v) in trips {
            assert!(i < nrows && j < ncols, "triplet out of range");
            accumulate(&mut acc[i], j as u32, v);
        }
        SparseMat { nrows, ncols, rows: acc.into_iter().map(finish).collect() }
    }

    pub fn from_rows(nrows: usize, ncols: usize, rows: Vec<Row>) -> SparseMat {
        assert_eq!(rows.len(), nrows);
        let rows = rows
            .into_iter()
            .map(|r| {
                let mut acc = BTreeMap::new();
                for (c, v) in r {
                    accumulate(&mut acc, c, v);
                }
                finish(acc)
            })
            .collect();
        SparseMat { nrows, ncols, rows }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(u32, Scalar)] {
        &self.rows[i]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn get(&self, i: usize, j: usize) -> Scalar {
        let r = &self.rows[i];
        match r.binary_search_by_key(&(j as u32), |t| t.0) {
            Ok(k) => r[k].1.clone(),
            Err(_) => Scalar::zero(),
        }
    }

    /// All nonzero entries in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, &Scalar)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, r)| r.iter().map(move |(j, v)| (i, *j as usize, v)))
    }

    pub fn transpose(&self) -> SparseMat {
        let mut rows: Vec<Row> = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for (j, v) in r {
                rows[*j as usize].push((i as u32, v.clone()));
            }
        }
        SparseMat { nrows: self.ncols, ncols: self.nrows, rows }
    }

    pub fn mul(&self, o: &SparseMat) -> SparseMat {
        assert_eq!(self.ncols, o.nrows, "dimension mismatch in product");
        let rows = self
            .rows
            .par_iter()
            .map(|r| {
                let mut acc = BTreeMap::new();
                for (k, a) in r {
                    for (j, b) in &o.rows[*k as usize] {
                        accumulate(&mut acc, *j, a.mul(b));
                    }
                }
                finish(acc)
            })
            .collect();
        SparseMat { nrows: self.nrows, ncols: o.ncols, rows }
    }

    fn combine(&self, o: &SparseMat, negate: bool) -> SparseMat {
        assert_eq!((self.nrows, self.ncols), (o.nrows, o.ncols), "dimension mismatch in sum");
        let rows = self
            .rows
            .par_iter()
            .zip(o.rows.par_iter())
            .map(|(a, b)| {
                let mut acc: BTreeMap<u32, Scalar> = a.iter().cloned().collect();
                for (j, v) in b {
                    accumulate(&mut acc, *j, if negate { v.neg() } else { v.clone() });
                }
                finish(acc)
            })
            .collect();
        SparseMat { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn add(&self, o: &SparseMat) -> SparseMat {
        self.combine(o, false)
    }

    pub fn sub(&self, o: &SparseMat) -> SparseMat {
        self.combine(o, true)
    }

    pub fn scale(&self, k: &Scalar) -> SparseMat {
        if k.is_zero() {
            return SparseMat::zeros(self.nrows, self.ncols);
        }
        let rows = self.rows.par_iter().map(|r| r.iter().map(|(j, v)| (*j, v.mul(k))).collect()).collect();
        SparseMat { nrows: self.nrows, ncols: self.ncols, rows }
    }

    /// `self + k·I`.
    pub fn add_scalar(&self, k: &Scalar) -> SparseMat {
        assert_eq!(self.nrows, self.ncols);
        self.add(&SparseMat::identity(self.nrows).scale(k))
    }

    /// Kronecker product with row index `i·o.nrows + k`.
    pub fn kron(&self, o: &SparseMat) -> SparseMat {
        let mut rows = Vec::with_capacity(self.nrows * o.nrows);
        for ra in &self.rows {
            for rb in &o.rows {
                let mut r = Vec::with_capacity(ra.len() * rb.len());
                for (j, a) in ra {
                    for (l, b) in rb {
                        r.push((j * o.ncols as u32 + l, a.mul(b)));
                    }
                }
                rows.push(r);
            }
        }
        SparseMat { nrows: self.nrows * o.nrows, ncols: self.ncols * o.ncols, rows }
    }

    /// Row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> SparseMat {
        let rows = perm.iter().map(|&p| self.rows[p].clone()).collect();
        SparseMat { nrows: perm.len(), ncols: self.ncols, rows }
    }

    pub fn apply_dense(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .par_iter()
            .map(|r| r.iter().fold(Scalar::zero(), |acc, (j, m)| {
                let x = &v[*j as usize];
                if x.is_zero() {
                    acc
                } else {
                    acc.add(&m.mul(x))
                }
            }))
            .collect()
    }

    /// First coordinate where two equally shaped matrices differ.
    pub fn first_difference(&self, o: &SparseMat) -> Option<(usize, usize)> {
        for i in 0..self.nrows {
            if self.rows[i] != o.rows[i] {
                let a: BTreeMap<_, _> = self.rows[i].iter().cloned().collect();
                let b: BTreeMap<_, _> = o.rows[i].iter().cloned().collect();
                for j in a.keys().chain(b.keys()) {
                    if a.get(j) != b.get(j) {
                        return Some((i, *j as usize));
                    }
                }
            }
        }
        None
    }

    pub fn is_diagonal(&self) -> bool {
        self.rows.iter().enumerate().all(|(i, r)| r.iter().all(|(j, _)| *j as usize == i))
    }
}

/// Sparse vector with sorted indices, used for column-by-column checks.
pub type SVec = Vec<(u64, Scalar)>;

/// Adds `x·v` into an accumulator.
pub fn acc_add(acc: &mut BTreeMap<u64, Scalar>, idx: u64, v: Scalar) {
    use std::collections::btree_map::Entry;
    match acc.entry(idx) {
        Entry::Vacant(e) => {
            e.insert(v);
        }
        Entry::Occupied(mut e) => {
            let s = e.get().add(&v);
            if s.is_zero() {
                e.remove();
            } else {
                *e.get_mut() = s;
            }
        }
    }
}

pub fn acc_finish(acc: BTreeMap<u64, Scalar>) -> SVec {
    acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> SparseMat {
        let n = rows.len();
        let c = rows[0].len();
        let mut t = Vec::new();
        for (i, r) in rows.iter().enumerate() {
            for (j, v) in r.iter().enumerate() {
                if *v != 0 {
                    t.push((i, j, Scalar::int(*v)));
                }
            }
        }
        SparseMat::from_triplets(n, c, t)
    }

    #[test]
    fn product_and_transpose() {
        let a = m(&[&[1, 2], &[0, 1]]);
        let b = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.mul(&b), m(&[&[2, 1], &[1, 0]]));
        assert_eq!(a.transpose(), m(&[&[1, 0], &[2, 1]]));
        assert_eq!(a.mul(&b).transpose(), b.transpose().mul(&a.transpose()));
    }

    #[test]
    fn cancellation_leaves_no_explicit_zero() {
        let a = m(&[&[1, -1]]);
        let b = m(&[&[1], &[1]]);
        let p = a.mul(&b);
        assert!(p.is_zero());
        assert_eq!(p.nnz(), 0);
    }

    #[test]
    fn kronecker_indexing() {
        let a = m(&[&[1, 2], &[3, 4]]);
        let i = SparseMat::identity(2);
        let k = a.kron(&i);
        assert_eq!(k.get(0, 2), Scalar::int(2));
        assert_eq!(k.get(3, 1), Scalar::int(3));
        assert_eq!(k.get(1, 0), Scalar::zero());
    }
}
