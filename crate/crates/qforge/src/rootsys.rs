//! Root systems, weights and Weyl-group combinatorics.
//!
//! Simple roots are stored in ε-coordinates. The B and C series number their
//! nodes from the short/long end (`α₁ = ε₁` resp. `2ε₁`, `α_i = ε_i − ε_{i−1}`),
//! D uses `α_i = ε_i − ε_{i+1}`, `α_n = ε_{n−1} + ε_n`, and the exceptional
//! series use the standard embedding in eight-dimensional space.

use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

pub type Q = Rational64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RootError {
    #[error("unsupported root system {0}{1}")]
    Unsupported(Family, usize),
    #[error("pairing against the zero vector")]
    ZeroRoot,
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Family {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim().to_ascii_uppercase().as_str() {
            "A" => Family::A,
            "B" => Family::B,
            "C" => Family::C,
            "D" => Family::D,
            "E" => Family::E,
            "F" => Family::F,
            "G" => Family::G,
            other => return Err(format!("unknown family {other}")),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Epsilon,
    Fundamental,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Weight {
    pub coords: Vec<Q>,
    pub basis: Basis,
}

/// Inner product with implicit zero padding, so vectors living in an enlarged
/// ε-space can be paired with roots.
pub fn dot(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn add_scaled(a: &[Q], b: &[Q], k: Q) -> Vec<Q> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).copied().unwrap_or_default() + k * b.get(i).copied().unwrap_or_default())
        .collect()
}

fn q(n: i64) -> Q {
    Q::from_integer(n)
}

fn unit(dim: usize, i: usize, c: Q) -> Vec<Q> {
    let mut v = vec![Q::zero(); dim];
    v[i] = c;
    v
}

fn diff(dim: usize, i: usize, j: usize) -> Vec<Q> {
    let mut v = unit(dim, i, q(1));
    v[j] -= q(1);
    v
}

#[derive(Debug, Clone)]
pub struct RootSystem {
    pub family: Family,
    pub rank: usize,
    pub dim: usize,
    pub simple_roots: Vec<Vec<Q>>,
    pub cartan: Vec<Vec<i64>>,
    pub symmetrizers: Vec<Q>,
    pub positive_roots: Vec<Vec<Q>>,
    /// Positive roots in the simple-root basis, parallel to `positive_roots`.
    pub positive_coeffs: Vec<Vec<i64>>,
    pub rho: Vec<Q>,
    pub fundamental: Vec<Vec<Q>>,
    pub fw_gram: Vec<Vec<Q>>,
    /// 1-based simple reflection indices.
    pub w0_word: Vec<usize>,
}

fn simple_roots(family: Family, rank: usize) -> Option<(usize, Vec<Vec<Q>>)> {
    let half = Q::new(1, 2);
    let r = rank;
    Some(match family {
        Family::A if (1..=9).contains(&r) => (r + 1, (0..r).map(|i| diff(r + 1, i, i + 1)).collect()),
        Family::B if (2..=9).contains(&r) => {
            let mut v = vec![unit(r, 0, q(1))];
            v.extend((1..r).map(|i| diff(r, i, i - 1)));
            (r, v)
        }
        Family::C if (2..=9).contains(&r) => {
            let mut v = vec![unit(r, 0, q(2))];
            v.extend((1..r).map(|i| diff(r, i, i - 1)));
            (r, v)
        }
        Family::D if (4..=9).contains(&r) => {
            let mut v: Vec<_> = (0..r - 1).map(|i| diff(r, i, i + 1)).collect();
            let mut last = unit(r, r - 2, q(1));
            last[r - 1] = q(1);
            v.push(last);
            (r, v)
        }
        Family::E if (6..=8).contains(&r) => {
            let mut a1 = vec![-half; 8];
            a1[0] = half;
            a1[7] = half;
            let mut a2 = unit(8, 0, q(1));
            a2[1] = q(1);
            let mut v = vec![a1, a2];
            v.extend((1..7).map(|k| diff(8, k, k - 1)));
            v.truncate(r);
            (8, v)
        }
        Family::F if r == 4 => {
            let a4 = vec![half, -half, -half, -half];
            (4, vec![diff(4, 1, 2), diff(4, 2, 3), unit(4, 3, q(1)), a4])
        }
        Family::G if r == 2 => (3, vec![diff(3, 0, 1), vec![q(-2), q(1), q(1)]]),
        _ => return None,
    })
}

/// Exact inverse of a small rational matrix.
pub fn invert(m: &[Vec<Q>]) -> Option<Vec<Vec<Q>>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { q(1) } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        let piv = a[c][c];
        for x in a[c].iter_mut() {
            *x /= piv;
        }
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c];
                let src = a[c].clone();
                for (x, y) in a[r].iter_mut().zip(src) {
                    *x -= f * y;
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

impl RootSystem {
    pub fn build(family: Family, rank: usize) -> Result<RootSystem, RootError> {
        let (dim, simple) = simple_roots(family, rank).ok_or(RootError::Unsupported(family, rank))?;
        let n = simple.len();
        let cartan: Vec<Vec<i64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = q(2) * dot(&simple[i], &simple[j]) / dot(&simple[i], &simple[i]);
                        assert!(v.is_integer(), "non-integral Cartan entry");
                        v.to_integer()
                    })
                    .collect()
            })
            .collect();
        let symmetrizers: Vec<Q> = simple.iter().map(|a| dot(a, a) / q(2)).collect();

        // Reflection closure in the simple-root basis.
        let mut coeffs: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        let mut k = 0;
        while k < coeffs.len() {
            let c = coeffs[k].clone();
            for i in 0..n {
                let p: i64 = (0..n).map(|j| c[j] * cartan[i][j]).sum();
                let mut s = c.clone();
                s[i] -= p;
                if s.iter().all(|x| *x >= 0) && s.iter().any(|x| *x > 0) && !coeffs.contains(&s) {
                    coeffs.push(s);
                }
            }
            k += 1;
        }
        coeffs.sort_by_key(|c| (c.iter().sum::<i64>(), c.iter().map(|x| -x).collect::<Vec<_>>()));
        let to_eps = |c: &[i64]| {
            c.iter().enumerate().fold(vec![Q::zero(); dim], |acc, (i, x)| add_scaled(&acc, &simple[i], q(*x)))
        };
        let positive_roots: Vec<Vec<Q>> = coeffs.iter().map(|c| to_eps(c)).collect();
        let rho = positive_roots.iter().fold(vec![Q::zero(); dim], |acc, b| add_scaled(&acc, b, Q::new(1, 2)));

        let at: Vec<Vec<Q>> = (0..n).map(|i| (0..n).map(|j| q(cartan[j][i])).collect()).collect();
        let m = invert(&at).expect("Cartan matrix is invertible");
        let fundamental: Vec<Vec<Q>> = (0..n)
            .map(|i| (0..n).fold(vec![Q::zero(); dim], |acc, k| add_scaled(&acc, &simple[k], m[i][k])))
            .collect();
        let fw_gram = (0..n).map(|i| (0..n).map(|j| dot(&fundamental[i], &fundamental[j])).collect()).collect();

        let mut rs = RootSystem {
            family,
            rank: n,
            dim,
            simple_roots: simple,
            cartan,
            symmetrizers,
            positive_roots,
            positive_coeffs: coeffs,
            rho,
            fundamental,
            fw_gram,
            w0_word: Vec::new(),
        };
        rs.w0_word = rs.greedy_w0();
        Ok(rs)
    }

    pub fn name(&self) -> String {
        format!("{}{}", self.family, self.rank)
    }

    /// `⟨v, α_i^∨⟩` for 0-based `i`.
    pub fn coroot_pairing(&self, v: &[Q], i: usize) -> Q {
        let a = &self.simple_roots[i];
        q(2) * dot(v, a) / dot(a, a)
    }

    /// `⟨μ, β^∨⟩ = 2(μ,β)/(β,β)`.
    pub fn pairing(&self, mu: &[Q], beta: &[Q]) -> Result<Q, RootError> {
        let bb = dot(beta, beta);
        if bb.is_zero() {
            return Err(RootError::ZeroRoot);
        }
        Ok(q(2) * dot(mu, beta) / bb)
    }

    pub fn reflect(&self, v: &[Q], i: usize) -> Vec<Q> {
        add_scaled(v, &self.simple_roots[i], -self.coroot_pairing(v, i))
    }

    /// Lowest-index descent from ρ to −ρ.
    fn greedy_w0(&self) -> Vec<usize> {
        let mut v = self.rho.clone();
        let mut word = Vec::new();
        while let Some(i) = (0..self.rank).find(|&i| self.coroot_pairing(&v, i).is_positive()) {
            v = self.reflect(&v, i);
            word.push(i + 1);
        }
        word
    }

    /// `β_j = s_{i₁}⋯s_{i_{j−1}}(α_{i_j})` along a word.
    pub fn word_roots(&self, word: &[usize]) -> Vec<Vec<Q>> {
        (0..word.len())
            .map(|j| {
                let mut v = self.simple_roots[word[j] - 1].clone();
                for k in (0..j).rev() {
                    v = self.reflect(&v, word[k] - 1);
                }
                v
            })
            .collect()
    }

    pub fn is_positive_root(&self, v: &[Q]) -> bool {
        self.positive_roots.iter().any(|b| b.as_slice() == v)
    }

    pub fn fundamental_to_epsilon(&self, coeffs: &[Q]) -> Result<Weight, RootError> {
        if coeffs.len() != self.rank {
            return Err(RootError::Dimension(coeffs.len(), self.rank));
        }
        let v = coeffs
            .iter()
            .enumerate()
            .fold(vec![Q::zero(); self.dim], |acc, (i, c)| add_scaled(&acc, &self.fundamental[i], *c));
        Ok(Weight { coords: v, basis: Basis::Epsilon })
    }

    pub fn epsilon_to_fundamental(&self, w: &[Q]) -> Weight {
        Weight { coords: (0..self.rank).map(|i| self.coroot_pairing(w, i)).collect(), basis: Basis::Fundamental }
    }

    pub fn to_epsilon(&self, w: &Weight) -> Result<Vec<Q>, RootError> {
        match w.basis {
            Basis::Epsilon => Ok(w.coords.clone()),
            Basis::Fundamental => Ok(self.fundamental_to_epsilon(&w.coords)?.coords),
        }
    }

    pub fn cartan_q(&self) -> Vec<Vec<Q>> {
        self.cartan.iter().map(|r| r.iter().map(|x| q(*x)).collect()).collect()
    }
}

/// Positive `d` with `d_i a_ij = d_j a_ji`, scaled so the first node of each
/// connected component has `d = 1`.
pub fn symmetrizer(a: &[Vec<i64>]) -> Option<Vec<Q>> {
    let n = a.len();
    let mut d: Vec<Option<Q>> = vec![None; n];
    for start in 0..n {
        if d[start].is_some() {
            continue;
        }
        d[start] = Some(q(1));
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for j in 0..n {
                if i == j || a[i][j] == 0 {
                    continue;
                }
                if a[j][i] == 0 {
                    return None;
                }
                let dj = d[i].unwrap() * q(a[i][j]) / q(a[j][i]);
                match d[j] {
                    None => {
                        d[j] = Some(dj);
                        stack.push(j);
                    }
                    Some(x) if x != dj => return None,
                    _ => {}
                }
            }
        }
    }
    let d: Vec<Q> = d.into_iter().map(|x| x.unwrap()).collect();
    d.iter().all(|x| x.is_positive()).then_some(d)
}

/// Node permutation `π` with `b[π(i)][π(j)] = a[i][j]`, if one exists.
pub fn cartan_isomorphism(a: &[Vec<i64>], b: &[Vec<i64>]) -> Option<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    fn extend(a: &[Vec<i64>], b: &[Vec<i64>], perm: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let i = perm.len();
        if i == a.len() {
            return true;
        }
        for c in 0..a.len() {
            if used[c] {
                continue;
            }
            let ok = (0..i).all(|k| a[i][k] == b[c][perm[k]] && a[k][i] == b[perm[k]][c]) && a[i][i] == b[c][c];
            if ok {
                perm.push(c);
                used[c] = true;
                if extend(a, b, perm, used) {
                    return true;
                }
                perm.pop();
                used[c] = false;
            }
        }
        false
    }
    let mut perm = Vec::with_capacity(n);
    let mut used = vec![false; n];
    extend(a, b, &mut perm, &mut used).then_some(perm)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count_oracle(f: Family, r: usize) -> usize {
        match f {
            Family::A => r * (r + 1) / 2,
            Family::B | Family::C => r * r,
            Family::D => r * (r - 1),
            Family::E => [0, 0, 0, 0, 0, 0, 36, 63, 120][r],
            Family::F => 24,
            Family::G => 6,
        }
    }

    #[test]
    fn positive_root_counts() {
        for (f, lo, hi) in [(Family::A, 1, 9), (Family::B, 2, 8), (Family::C, 2, 8), (Family::D, 4, 8)] {
            for r in lo..=hi {
                let rs = RootSystem::build(f, r).unwrap();
                assert_eq!(rs.positive_roots.len(), count_oracle(f, r), "{f}{r}");
                assert_eq!(rs.w0_word.len(), rs.positive_roots.len());
            }
        }
        for (f, r) in [(Family::E, 6), (Family::E, 7), (Family::E, 8), (Family::F, 4), (Family::G, 2)] {
            let rs = RootSystem::build(f, r).unwrap();
            assert_eq!(rs.positive_roots.len(), count_oracle(f, r));
        }
    }

    #[test]
    fn a1_is_trivial() {
        let rs = RootSystem::build(Family::A, 1).unwrap();
        assert_eq!(rs.w0_word, vec![1]);
        assert_eq!(rs.positive_roots, vec![vec![q(1), q(-1)]]);
    }

    #[test]
    fn d5_spin_weight() {
        let rs = RootSystem::build(Family::D, 5).unwrap();
        let w = rs.fundamental_to_epsilon(&[q(0), q(0), q(0), q(0), q(1)]).unwrap();
        assert_eq!(w.coords, vec![Q::new(1, 2); 5]);
        assert_eq!(dot(&w.coords, &w.coords), Q::new(5, 4));
        assert_eq!(rs.pairing(&w.coords, &rs.simple_roots[4]).unwrap(), q(1));
    }

    #[test]
    fn exceptional_norms() {
        let e6 = RootSystem::build(Family::E, 6).unwrap();
        assert_eq!(e6.fw_gram[5][5], Q::new(4, 3));
        let e7 = RootSystem::build(Family::E, 7).unwrap();
        assert_eq!(e7.fw_gram[6][6], Q::new(3, 2));
        // λ₇ = ½ε₈ − ½ε₇ + ε₆
        let mut l7 = vec![Q::zero(); 8];
        l7[7] = Q::new(1, 2);
        l7[6] = Q::new(-1, 2);
        l7[5] = q(1);
        assert_eq!(e7.fundamental[6], l7);
    }

    #[test]
    fn round_trip_fundamental() {
        let rs = RootSystem::build(Family::E, 6).unwrap();
        let c = vec![q(1), q(0), q(0), q(0), q(0), q(0)];
        let w = rs.fundamental_to_epsilon(&c).unwrap();
        assert_eq!(rs.epsilon_to_fundamental(&w.coords).coords, c);
        let z = rs.fundamental_to_epsilon(&[Q::zero(); 6]).unwrap();
        assert!(z.coords.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn isomorphism_search() {
        let a = vec![vec![2, -1, 0], vec![-1, 2, -1], vec![0, -1, 2]];
        let b = vec![vec![2, 0, -1], vec![0, 2, -1], vec![-1, -1, 2]];
        let p = cartan_isomorphism(&a, &b).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a[i][j], b[p[i]][p[j]]);
            }
        }
        let g2 = RootSystem::build(Family::G, 2).unwrap();
        assert_eq!(g2.cartan, vec![vec![2, -3], vec![-1, 2]]);
        assert!(cartan_isomorphism(&g2.cartan, &[vec![2, -1], vec![-1, 2]]).is_none());
    }

    #[test]
    fn symmetrizer_of_b3() {
        let rs = RootSystem::build(Family::B, 3).unwrap();
        let d = symmetrizer(&rs.cartan).unwrap();
        assert_eq!(d, vec![q(1), q(2), q(2)]);
    }
}
