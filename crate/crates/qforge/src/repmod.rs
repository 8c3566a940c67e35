//! Minuscule modules given as edge-labelled weight diagrams.
//!
//! An edge `(from, to, i)` means `E_i f_from = f_to` and `F_i f_to = f_from`.
//! Weights are propagated from a single anchor node; printed labels are only
//! cross-checked.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, VecDeque};
use std::cmp::Reverse;
use std::path::Path;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::exactq::{ExactError, QField, Scalar};
use crate::rootsys::{add_scaled, dot, Family, RootError, RootSystem, Q};
use crate::sparse::SparseMat;

#[derive(Debug, thiserror::Error)]
pub enum RepError {
    #[error("i/o error reading {0}: {1}")]
    Io(String, std::io::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("duplicate edge {0} -> {1} (root {2})")]
    DuplicateEdge(usize, usize, usize),
    #[error("unknown root index {0} (rank {1})")]
    UnknownRoot(usize, usize),
    #[error("weight propagation conflict at edge {from} -> {to} (root {root}); cycle through nodes {cycle:?}")]
    Conflict { from: usize, to: usize, root: usize, cycle: Vec<usize> },
    #[error("diagram is disconnected: nodes {0:?} unreachable from the anchor")]
    Disconnected(Vec<usize>),
    #[error("E-edges contain a directed cycle")]
    NotAcyclic,
    #[error("module is not minuscule: {0}")]
    NotMinuscule(String),
    #[error(transparent)]
    Root(#[from] RootError),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub family: String,
    pub rank: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct AnchorSpec {
    pub node: usize,
    pub weight_eps_numerators: Vec<i64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: usize,
    pub to: usize,
    pub root: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DeclaredWeights {
    /// `"epsilon"` or `"fundamental"`.
    pub basis: String,
    pub denominator: i64,
    pub weights: BTreeMap<String, Vec<i64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DiagramFile {
    pub name: String,
    pub algebra: AlgebraSpec,
    pub weight_denominator: i64,
    pub anchor: AnchorSpec,
    pub nodes: Vec<usize>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_weights: Option<DeclaredWeights>,
}

/// Parsed and structurally checked diagram.
#[derive(Debug, Clone)]
pub struct RepDiagram {
    pub name: String,
    pub rs: RootSystem,
    pub anchor: usize,
    pub anchor_weight: Vec<Q>,
    pub p: usize,
    /// `(from, to, root)`, 1-based.
    pub edges: Vec<(usize, usize, usize)>,
    pub declared: Option<DeclaredWeights>,
}

pub fn parse_rep(text: &str) -> Result<RepDiagram, RepError> {
    let file: DiagramFile = serde_json::from_str(text).map_err(|e| RepError::Schema(e.to_string()))?;
    from_file(file)
}

pub fn load_rep(path: &Path) -> Result<RepDiagram, RepError> {
    let text = std::fs::read_to_string(path).map_err(|e| RepError::Io(path.display().to_string(), e))?;
    parse_rep(&text)
}

pub fn from_file(f: DiagramFile) -> Result<RepDiagram, RepError> {
    let family: Family = f.algebra.family.parse().map_err(RepError::Schema)?;
    let rs = RootSystem::build(family, f.algebra.rank)?;
    let p = f.nodes.len();
    let mut sorted = f.nodes.clone();
    sorted.sort_unstable();
    if sorted != (1..=p).collect::<Vec<_>>() {
        return Err(RepError::Schema("node ids must be exactly 1..p".into()));
    }
    if f.weight_denominator <= 0 {
        return Err(RepError::Schema("weight_denominator must be positive".into()));
    }
    if f.anchor.node < 1 || f.anchor.node > p {
        return Err(RepError::Schema(format!("anchor node {} not in diagram", f.anchor.node)));
    }
    if f.anchor.weight_eps_numerators.len() != rs.dim {
        return Err(RepError::Schema(format!(
            "anchor weight has {} coordinates, expected {}",
            f.anchor.weight_eps_numerators.len(),
            rs.dim
        )));
    }
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(f.edges.len());
    for e in &f.edges {
        if e.root < 1 || e.root > rs.rank {
            return Err(RepError::UnknownRoot(e.root, rs.rank));
        }
        if e.from < 1 || e.from > p || e.to < 1 || e.to > p || e.from == e.to {
            return Err(RepError::Schema(format!("edge {} -> {} has invalid endpoints", e.from, e.to)));
        }
        if !seen.insert((e.from, e.to, e.root)) {
            return Err(RepError::DuplicateEdge(e.from, e.to, e.root));
        }
        edges.push((e.from, e.to, e.root));
    }
    let anchor_weight =
        f.anchor.weight_eps_numerators.iter().map(|n| Q::new(*n, f.weight_denominator)).collect();
    Ok(RepDiagram { name: f.name, rs, anchor: f.anchor.node, anchor_weight, p, edges, declared: f.declared_weights })
}

/// Elaborated module with exact generator matrices.
#[derive(Debug, Clone)]
pub struct RepModule {
    pub name: String,
    pub rs: RootSystem,
    pub p: usize,
    /// ε-coordinates per basis index (0-based, topological order).
    pub weights: Vec<Vec<Q>>,
    /// Original diagram node id for each basis index.
    pub node_ids: Vec<usize>,
    /// `(α_i, wt_j)`, indexed `[i][j]`.
    pub kpair: Vec<Vec<Q>>,
    /// `E_i f_j = f_k` as `raise[i][j] = Some(k)`.
    pub raise: Vec<Vec<Option<usize>>>,
    pub lower: Vec<Vec<Option<usize>>>,
    pub mat_e: Vec<SparseMat>,
    pub mat_f: Vec<SparseMat>,
    field: QField,
}

fn lcm_den(acc: i64, x: &Q) -> i64 {
    acc.lcm(x.denom())
}

fn cycle_through(parent: &HashMap<usize, usize>, a: usize, b: usize) -> Vec<usize> {
    let path = |mut x: usize| {
        let mut v = vec![x];
        while let Some(&p) = parent.get(&x) {
            v.push(p);
            x = p;
        }
        v
    };
    let pa = path(a);
    let pb = path(b);
    let common = pa.iter().find(|x| pb.contains(x)).copied();
    let mut out: Vec<usize> = pa.iter().take_while(|x| Some(**x) != common).copied().collect();
    out.extend(common);
    let tail: Vec<usize> = pb.iter().take_while(|x| Some(**x) != common).copied().collect();
    out.extend(tail.into_iter().rev());
    out
}

/// Propagates weights, orders the basis topologically and builds matrices.
/// Returns the module and warnings for declared labels that disagree.
pub fn elaborate(d: &RepDiagram) -> Result<(RepModule, Vec<String>), RepError> {
    let rs = &d.rs;
    let mut adj: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); d.p + 1];
    for &(a, b, r) in &d.edges {
        adj[a].push((a, b, r));
        adj[b].push((a, b, r));
    }
    let mut wt: Vec<Option<Vec<Q>>> = vec![None; d.p + 1];
    let mut parent = HashMap::new();
    wt[d.anchor] = Some(d.anchor_weight.clone());
    let mut queue = VecDeque::from([d.anchor]);
    while let Some(x) = queue.pop_front() {
        for &(a, b, r) in &adj[x] {
            let alpha = &rs.simple_roots[r - 1];
            let (other, w) = if a == x {
                (b, add_scaled(wt[a].as_ref().unwrap(), alpha, Q::one()))
            } else {
                (a, add_scaled(wt[b].as_ref().unwrap(), alpha, -Q::one()))
            };
            match &wt[other] {
                None => {
                    wt[other] = Some(w);
                    parent.insert(other, x);
                    queue.push_back(other);
                }
                Some(existing) if *existing != w => {
                    return Err(RepError::Conflict { from: a, to: b, root: r, cycle: cycle_through(&parent, a, b) });
                }
                _ => {}
            }
        }
    }
    let missing: Vec<usize> = (1..=d.p).filter(|&k| wt[k].is_none()).collect();
    if !missing.is_empty() {
        return Err(RepError::Disconnected(missing));
    }
    let wt: Vec<Vec<Q>> = wt.into_iter().skip(1).map(|w| w.unwrap()).collect();

    let mut warnings = Vec::new();
    if let Some(decl) = &d.declared {
        for (k, nums) in &decl.weights {
            let Ok(node) = k.parse::<usize>() else {
                warnings.push(format!("declared weight key {k:?} is not a node id"));
                continue;
            };
            if node < 1 || node > d.p {
                warnings.push(format!("declared weight for unknown node {node}"));
                continue;
            }
            let coords: Vec<Q> = nums.iter().map(|n| Q::new(*n, decl.denominator)).collect();
            let eps = match decl.basis.as_str() {
                "fundamental" => rs.fundamental_to_epsilon(&coords).map(|w| w.coords).ok(),
                "epsilon" => Some(coords),
                other => {
                    warnings.push(format!("unknown declared basis {other}"));
                    break;
                }
            };
            if eps.as_ref() != Some(&wt[node - 1]) {
                let derived: Vec<String> =
                    rs.epsilon_to_fundamental(&wt[node - 1]).coords.iter().map(|x| x.to_string()).collect();
                warnings.push(format!(
                    "node {node}: declared label {nums:?} disagrees with propagated weight [{}] (fundamental basis)",
                    derived.join(",")
                ));
            }
        }
    }

    // Kahn's algorithm, smallest node id first.
    let mut indeg = vec![0usize; d.p + 1];
    let mut out: Vec<Vec<usize>> = vec![Vec::new(); d.p + 1];
    for &(a, b, _) in &d.edges {
        indeg[b] += 1;
        out[a].push(b);
    }
    let mut heap: BinaryHeap<Reverse<usize>> = (1..=d.p).filter(|&k| indeg[k] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(d.p);
    while let Some(Reverse(x)) = heap.pop() {
        order.push(x);
        for &y in &out[x] {
            indeg[y] -= 1;
            if indeg[y] == 0 {
                heap.push(Reverse(y));
            }
        }
    }
    if order.len() != d.p {
        return Err(RepError::NotAcyclic);
    }
    let mut pos = vec![0usize; d.p + 1];
    for (k, &node) in order.iter().enumerate() {
        pos[node] = k;
    }
    let weights: Vec<Vec<Q>> = order.iter().map(|&n| wt[n - 1].clone()).collect();

    let n = rs.rank;
    let p = d.p;
    let mut raise = vec![vec![None; p]; n];
    let mut lower = vec![vec![None; p]; n];
    for &(a, b, r) in &d.edges {
        raise[r - 1][pos[a]] = Some(pos[b]);
        lower[r - 1][pos[b]] = Some(pos[a]);
    }
    let mat_e: Vec<SparseMat> = (0..n)
        .map(|i| {
            let t = (0..p).filter_map(|j| raise[i][j].map(|k| (k, j, Scalar::one()))).collect();
            SparseMat::from_triplets(p, p, t)
        })
        .collect();
    let mat_f: Vec<SparseMat> = mat_e.iter().map(|m| m.transpose()).collect();
    let kpair: Vec<Vec<Q>> =
        (0..n).map(|i| weights.iter().map(|w| dot(&rs.simple_roots[i], w)).collect()).collect();

    let mut l = 1i64;
    for a in &weights {
        for b in &weights {
            l = lcm_den(l, &dot(a, b));
        }
    }
    for b in &rs.positive_roots {
        l = lcm_den(l, &(dot(b, b) / Q::from_integer(2)));
    }
    for row in &kpair {
        for x in row {
            l = lcm_den(l, x);
        }
    }
    let module = RepModule {
        name: d.name.clone(),
        rs: rs.clone(),
        p,
        weights,
        node_ids: order,
        kpair,
        raise,
        lower,
        mat_e,
        mat_f,
        field: QField::new(l as u32),
    };
    Ok((module, warnings))
}

impl RepModule {
    pub fn field(&self) -> QField {
        self.field
    }

    pub fn rank(&self) -> usize {
        self.rs.rank
    }

    /// `q_i = q^{d_i}` for 0-based `i`.
    pub fn q_i(&self, i: usize) -> Scalar {
        self.field.q_pow(self.rs.symmetrizers[i]).expect("symmetrizer representable")
    }

    /// Exponents of `∏ K_i^{r_i}` on each basis vector.
    pub fn k_exponents(&self, r: &[Q]) -> Vec<Q> {
        (0..self.p).map(|j| r.iter().enumerate().fold(Q::zero(), |acc, (i, ri)| acc + ri * self.kpair[i][j])).collect()
    }

    /// Diagonal action of `∏ K_i^{r_i}`.
    pub fn k_monomial(&self, r: &[Q]) -> Result<SparseMat, ExactError> {
        let d = self.k_exponents(r).into_iter().map(|e| self.field.q_pow(e)).collect::<Result<Vec<_>, _>>()?;
        Ok(SparseMat::diag(d))
    }

    pub fn k(&self, i: usize, power: i64) -> SparseMat {
        let mut r = vec![Q::zero(); self.rank()];
        r[i] = Q::from_integer(power);
        self.k_monomial(&r).expect("integral K powers are representable")
    }

    /// `⟨wt_j, α_i^∨⟩`.
    pub fn coroot(&self, i: usize, j: usize) -> Q {
        self.rs.coroot_pairing(&self.weights[j], i)
    }

    /// Index of the basis vector with the given weight.
    pub fn index_of_weight(&self, w: &[Q]) -> Option<usize> {
        self.weights.iter().position(|x| x.as_slice() == w)
    }

    /// Weight of `K_β`-type exponent vector `Σ r_i α_i`.
    pub fn highest_index(&self) -> usize {
        self.p - 1
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ValidationReport {
    pub dim: usize,
    pub checks: Vec<Check>,
    /// Multiset of weights is closed under negation.
    pub self_dual_weights: bool,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub fn validate_rep(m: &RepModule) -> ValidationReport {
    let n = m.rank();
    let p = m.p;
    let mut checks = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| checks.push(Check { name: name.into(), pass, detail });

    push("dimension", m.weights.len() == p && m.node_ids.len() == p, format!("{p}"));

    let bad_e: Vec<usize> = (0..n).filter(|&i| !m.mat_e[i].mul(&m.mat_e[i]).is_zero()).map(|i| i + 1).collect();
    push("E_squared_zero", bad_e.is_empty(), if bad_e.is_empty() { String::new() } else { format!("fails for {bad_e:?}") });
    let bad_f: Vec<usize> = (0..n).filter(|&i| !m.mat_f[i].mul(&m.mat_f[i]).is_zero()).map(|i| i + 1).collect();
    push("F_squared_zero", bad_f.is_empty(), if bad_f.is_empty() { String::new() } else { format!("fails for {bad_f:?}") });

    let mut bad_comm = Vec::new();
    for i in 0..n {
        let qi = m.q_i(i);
        let denom = qi.sub(&qi.recip().unwrap());
        let kk = m.k(i, 1).sub(&m.k(i, -1));
        let rhs_diag = kk.scale(&denom.recip().unwrap());
        for j in 0..n {
            let lhs = m.mat_e[i].mul(&m.mat_f[j]).sub(&m.mat_f[j].mul(&m.mat_e[i]));
            let ok = if i == j { lhs == rhs_diag } else { lhs.is_zero() };
            if !ok {
                bad_comm.push((i + 1, j + 1));
            }
        }
    }
    push(
        "EF_commutator",
        bad_comm.is_empty(),
        if bad_comm.is_empty() { String::new() } else { format!("fails for {bad_comm:?}") },
    );

    let distinct: BTreeSet<&Vec<Q>> = m.weights.iter().collect();
    push("weights_distinct", distinct.len() == p, String::new());

    let mut bad_min = None;
    'outer: for (bi, b) in m.rs.positive_roots.iter().enumerate() {
        for (j, w) in m.weights.iter().enumerate() {
            let x = m.rs.pairing(w, b).unwrap();
            if !(x.is_zero() || x == Q::one() || x == -Q::one()) {
                bad_min = Some(format!("<wt_{}, beta_{}^v> = {x}", j + 1, bi + 1));
                break 'outer;
            }
        }
    }
    push("minuscule", bad_min.is_none(), bad_min.unwrap_or_default());

    let topo = (0..n).all(|i| (0..p).all(|j| m.raise[i][j].is_none_or(|k| k > j)));
    push("topological_order", topo, String::new());

    let mut ws: Vec<Vec<Q>> = m.weights.clone();
    let mut neg: Vec<Vec<Q>> = m.weights.iter().map(|w| w.iter().map(|x| -x).collect()).collect();
    ws.sort();
    neg.sort();
    ValidationReport { dim: p, checks, self_dual_weights: ws == neg }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data;

    #[test]
    fn half_spin_propagation() {
        let d = parse_rep(data::rep_text("d5_halfspin16").unwrap()).unwrap();
        assert_eq!(d.p, 16);
        assert_eq!(d.edges.len(), 20);
        let (m, warnings) = elaborate(&d).unwrap();
        assert!(warnings.is_empty(), "{warnings:?}");
        let h = Q::new(1, 2);
        assert_eq!(m.weights[0], vec![-h, -h, -h, -h, h]);
        assert_eq!(m.weights[1], vec![-h, -h, -h, h, -h]);
        // <wt(f1), α4^v> = -1, so [E4,F4] has -1 at f1.
        assert_eq!(m.coroot(3, 0), -Q::one());
        let comm = m.mat_e[3].mul(&m.mat_f[3]).sub(&m.mat_f[3].mul(&m.mat_e[3]));
        assert_eq!(comm.get(0, 0), Scalar::int(-1));
        assert_eq!(m.field().l(), 4);
    }

    #[test]
    fn corrupted_root_label_conflicts() {
        let text = data::rep_text("d5_halfspin16").unwrap();
        let mut f: DiagramFile = serde_json::from_str(text).unwrap();
        let e = f.edges.iter_mut().find(|e| e.from == 10 && e.to == 13).unwrap();
        assert_eq!(e.root, 4);
        e.root = 3;
        let d = from_file(f).unwrap();
        assert!(matches!(elaborate(&d), Err(RepError::Conflict { .. })));
    }

    #[test]
    fn duplicate_and_unknown_edges_rejected() {
        let text = data::rep_text("an_vector").unwrap();
        let mut f: DiagramFile = serde_json::from_str(text).unwrap();
        f.edges.push(f.edges[0].clone());
        assert!(matches!(from_file(f.clone()), Err(RepError::DuplicateEdge(..))));
        f.edges.pop();
        f.edges[0].root = 9;
        assert!(matches!(from_file(f), Err(RepError::UnknownRoot(9, 4))));
    }

    #[test]
    fn two_dimensional_sl2_module_validates() {
        let text = r#"{"name":"a1","algebra":{"family":"A","rank":1},"weight_denominator":2,
            "anchor":{"node":1,"weight_eps_numerators":[-1,1]},"nodes":[1,2],
            "edges":[{"from":1,"to":2,"root":1}]}"#;
        let (m, _) = elaborate(&parse_rep(text).unwrap()).unwrap();
        let v = validate_rep(&m);
        assert!(v.all_pass(), "{v:?}");
    }
}
