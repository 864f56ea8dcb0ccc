//! Potts partition functions on a fixed marked graph.
//!
//! Everything symbolic here comes from one enumeration of edge subsets
//! `A ⊆ E`, tallied by `(|A|, k(A), whether a ~ b in (V, A))`. The
//! chromatic polynomial is also computed independently by
//! deletion-contraction, and [`spin_enumerate_oracle`] sums the Boltzmann
//! weights directly over all colorings.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::budget::Budgets;
use crate::error::{Error, Result};
use crate::graph::MarkedGraph;
use crate::poly::{binomial_row, BivarPoly, IntPoly};

/// Key: `(|A|, components of (V, A), marks joined)`.
pub type SubsetKey = (usize, usize, bool);

/// Histogram of edge subsets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetStats {
    pub vertex_count: usize,
    pub edge_count: usize,
    pub counts: BTreeMap<SubsetKey, u64>,
}

impl SubsetStats {
    /// Components of `(V, A)` containing neither mark.
    pub fn free_components(key: &SubsetKey) -> usize {
        let &(_, k, joined) = key;
        k - if joined { 1 } else { 2 }
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn reset(&mut self, n: usize) {
        self.parent.clear();
        self.parent.extend(0..n);
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the union merged two components.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

const CHUNK_BITS: u32 = 14;

/// Enumerates all `2^|E|` edge subsets of `g`.
pub fn subset_stats(g: &MarkedGraph, budgets: &Budgets) -> Result<SubsetStats> {
    let m = g.edge_count();
    if m > budgets.subset_edges {
        return Err(Error::budget("subset-enumeration edge", m, budgets.subset_edges));
    }
    let n = g.vertex_count();
    let edges = g.edges();
    let (a, b) = (g.mark_a(), g.mark_b());
    let total: u64 = 1 << m;
    let chunk = 1u64 << CHUNK_BITS.min(m as u32);
    let chunks = total / chunk;

    let tally = |lo: u64, hi: u64| {
        let mut uf = UnionFind { parent: Vec::with_capacity(n) };
        let mut local: HashMap<SubsetKey, u64> = HashMap::new();
        for mask in lo..hi {
            uf.reset(n);
            let mut components = n;
            for (i, &(x, y)) in edges.iter().enumerate() {
                if mask >> i & 1 == 1 && uf.union(x, y) {
                    components -= 1;
                }
            }
            let joined = uf.find(a) == uf.find(b);
            *local.entry((mask.count_ones() as usize, components, joined)).or_default() += 1;
        }
        local
    };

    let merged = (0..chunks)
        .into_par_iter()
        .map(|c| tally(c * chunk, (c + 1) * chunk))
        .reduce(HashMap::new, |mut acc, part| {
            for (k, v) in part {
                *acc.entry(k).or_default() += v;
            }
            acc
        });
    Ok(SubsetStats {
        vertex_count: n,
        edge_count: m,
        counts: merged.into_iter().collect(),
    })
}

/// `(y - 1)^m` as a bivariate polynomial (no `q`).
fn y_minus_one_pow(m: usize) -> BivarPoly {
    let row = binomial_row(m);
    let mut out = BivarPoly::zero();
    for (j, c) in row.into_iter().enumerate() {
        let sign = if (m - j).is_multiple_of(2) { c } else { -c };
        out.add_term(0, j as u32, sign);
    }
    out
}

/// `Σ_A q^k(A) (y - 1)^|A|`.
pub fn partition_from_stats(stats: &SubsetStats) -> BivarPoly {
    let mut out = BivarPoly::zero();
    let mut by_edges: BTreeMap<usize, BTreeMap<usize, u64>> = BTreeMap::new();
    for (&(size, k, _), &count) in &stats.counts {
        *by_edges.entry(size).or_default().entry(k).or_default() += count;
    }
    for (size, ks) in by_edges {
        let mut q_part = BivarPoly::zero();
        for (k, count) in ks {
            q_part.add_term(k as u32, 0, BigInt::from(count));
        }
        out = &out + &(&q_part * &y_minus_one_pow(size));
    }
    out
}

/// Partition function `Z(q, y)` by the Fortuin-Kasteleyn subset expansion.
pub fn partition_fk(g: &MarkedGraph, budgets: &Budgets) -> Result<BivarPoly> {
    Ok(partition_from_stats(&subset_stats(g, budgets)?))
}

/// Tutte polynomial `T(x, y) = Σ_A (x - 1)^(k(A) - 1) (y - 1)^(|A| + k(A) - |V|)`,
/// returned with `x` in the first variable slot.
pub fn tutte(g: &MarkedGraph, budgets: &Budgets) -> Result<BivarPoly> {
    let stats = subset_stats(g, budgets)?;
    let n = stats.vertex_count;
    let mut tally: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for (&(size, k, _), &count) in &stats.counts {
        *tally.entry((k - 1, size + k - n)).or_default() += count;
    }
    let mut out = BivarPoly::zero();
    for ((ex, ey), count) in tally {
        // (x - 1)^ex, with x stored in the first slot
        let x_part = BivarPoly::from_big_terms(
            binomial_row(ex)
                .into_iter()
                .enumerate()
                .map(|(j, c)| (j as u32, 0, if (ex - j) % 2 == 0 { c } else { -c })),
        );
        let term = &x_part * &y_minus_one_pow(ey);
        out = &out + &term.scale(&BigInt::from(count));
    }
    Ok(out)
}

/// Partition functions with the marked spins pinned.
///
/// `u`: `σ(a) = σ(b)`; `v`: `σ(a) ≠ σ(b)`, both for one fixed pair of colors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionalPair {
    pub u: BivarPoly,
    pub v: BivarPoly,
}

impl ConditionalPair {
    /// `q u + q (q - 1) v`, which must equal the partition function.
    pub fn partition(&self) -> BivarPoly {
        let q = BivarPoly::q();
        let q_minus_one = BivarPoly::from_terms([(1, 0, 1), (0, 0, -1)]);
        &(&q * &self.u) + &(&(&q * &q_minus_one) * &self.v)
    }
}

pub fn conditional_from_stats(stats: &SubsetStats) -> ConditionalPair {
    let mut u = BivarPoly::zero();
    let mut v = BivarPoly::zero();
    for (key, &count) in &stats.counts {
        let f = SubsetStats::free_components(key) as u32;
        let term = &BivarPoly::monomial(BigInt::from(count), f, 0) * &y_minus_one_pow(key.0);
        if !key.2 {
            v = &v + &term;
        }
        u = &u + &term;
    }
    ConditionalPair { u, v }
}

/// Conditional partition functions by the pinned-boundary subset expansion:
/// a component containing a mark carries no free color, and for `v` any
/// subset joining `a` to `b` is inconsistent with the boundary condition.
pub fn conditional_uv(g: &MarkedGraph, budgets: &Budgets) -> Result<ConditionalPair> {
    Ok(conditional_from_stats(&subset_stats(g, budgets)?))
}

/// Direct Boltzmann sums over all colorings `σ: V → {1..q}` at an integer `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSums {
    /// `σ(a) = σ(b) = 1`, as a polynomial in `y`.
    pub u: IntPoly,
    /// `σ(a) = 1, σ(b) = 2`.
    pub v: IntPoly,
    /// All configurations.
    pub z: IntPoly,
}

pub fn spin_enumerate_oracle(g: &MarkedGraph, q: u32, budgets: &Budgets) -> Result<SpinSums> {
    if q == 0 {
        return Err(Error::InvalidArgument("spin enumeration needs q >= 1".into()));
    }
    let n = g.vertex_count();
    let configs = (q as u64).checked_pow(n as u32).filter(|&c| c <= budgets.spin_configs);
    let Some(configs) = configs else {
        return Err(Error::budget("spin-configuration", format!("{q}^{n}"), budgets.spin_configs));
    };
    let m = g.edge_count();
    let (a, b) = (g.mark_a(), g.mark_b());
    let mut z = vec![0u64; m + 1];
    let mut u = vec![0u64; m + 1];
    let mut v = vec![0u64; m + 1];
    let mut sigma = vec![0u32; n];
    for _ in 0..configs {
        let mono = g.edges().iter().filter(|&&(x, y)| sigma[x] == sigma[y]).count();
        z[mono] += 1;
        if sigma[a] == 0 && sigma[b] == 0 {
            u[mono] += 1;
        }
        if q >= 2 && sigma[a] == 0 && sigma[b] == 1 {
            v[mono] += 1;
        }
        for s in sigma.iter_mut() {
            *s += 1;
            if *s < q {
                break;
            }
            *s = 0;
        }
    }
    let to_poly = |c: Vec<u64>| IntPoly::from_coeffs(c.into_iter().map(BigInt::from).collect());
    Ok(SpinSums {
        u: to_poly(u),
        v: to_poly(v),
        z: to_poly(z),
    })
}

// ---------------------------------------------------------------------------
// Deletion-contraction

/// Simple graph as adjacency bitmasks over vertices `0..len`.
type Adjacency = Vec<u64>;

struct DeletionContraction {
    memo: HashMap<Adjacency, IntPoly>,
    limit: usize,
}

fn remove_vertex(adj: &Adjacency, v: usize) -> Adjacency {
    let low = (1u64 << v) - 1;
    adj.iter()
        .enumerate()
        .filter(|&(i, _)| i != v)
        .map(|(_, &row)| (row & low) | ((row >> 1) & !low))
        .collect()
}

fn falling_factorial(n: usize) -> IntPoly {
    let mut acc = IntPoly::one();
    for i in 0..n {
        acc = &acc * &IntPoly::linear(1, -(i as i64));
    }
    acc
}

fn component_of(adj: &Adjacency, start: usize) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        let mut f = frontier;
        while f != 0 {
            let i = f.trailing_zeros() as usize;
            f &= f - 1;
            next |= adj[i];
        }
        frontier = next & !seen;
        seen |= next;
    }
    seen
}

fn induced(adj: &Adjacency, keep: u64) -> Adjacency {
    let verts: Vec<usize> = (0..adj.len()).filter(|&i| keep >> i & 1 == 1).collect();
    verts
        .iter()
        .map(|&i| {
            let row = adj[i];
            let mut out = 0u64;
            for (new, &old) in verts.iter().enumerate() {
                if row >> old & 1 == 1 {
                    out |= 1 << new;
                }
            }
            out
        })
        .collect()
}

impl DeletionContraction {
    fn solve(&mut self, adj: Adjacency) -> Result<IntPoly> {
        let q = IntPoly::x();
        let q_minus_one = IntPoly::linear(1, -1);
        let mut factor = IntPoly::one();
        let mut adj = adj;
        // Peel isolated vertices and leaves.
        while let Some(v) = (0..adj.len()).find(|&i| adj[i].count_ones() <= 1) {
            factor = if adj[v] == 0 { &factor * &q } else { &factor * &q_minus_one };
            adj = remove_vertex(&adj, v);
        }
        let n = adj.len();
        if n == 0 {
            return Ok(factor);
        }
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let first = component_of(&adj, 0);
        if first != full {
            let left = self.solve(induced(&adj, first))?;
            let right = self.solve(induced(&adj, full & !first))?;
            return Ok(&factor * &(&left * &right));
        }
        if adj.iter().all(|row| row.count_ones() as usize == n - 1) {
            return Ok(&factor * &falling_factorial(n));
        }
        if let Some(hit) = self.memo.get(&adj) {
            return Ok(&factor * hit);
        }
        if self.memo.len() >= self.limit {
            return Err(Error::budget("deletion-contraction memo", self.memo.len() + 1, self.limit));
        }
        let u = (0..n).min_by_key(|&i| adj[i].count_ones()).unwrap();
        let v = adj[u].trailing_zeros() as usize;

        let mut deleted = adj.clone();
        deleted[u] &= !(1 << v);
        deleted[v] &= !(1 << u);

        let mut merged = adj.clone();
        let joined = (merged[u] | merged[v]) & !(1 << u) & !(1 << v);
        merged[u] = joined;
        for (i, row) in merged.iter_mut().enumerate() {
            if joined >> i & 1 == 1 {
                *row |= 1 << u;
            }
        }
        let contracted = remove_vertex(&merged, v);

        let result = &self.solve(deleted)? - &self.solve(contracted)?;
        self.memo.insert(adj, result.clone());
        Ok(&factor * &result)
    }
}

/// Chromatic polynomial by deletion-contraction. Parallel edges collapse;
/// a loop would force the zero polynomial but [`MarkedGraph`] excludes them.
pub fn chromatic(g: &MarkedGraph, budgets: &Budgets) -> Result<IntPoly> {
    let n = g.vertex_count();
    if n > budgets.deletion_contraction_vertices.min(64) {
        return Err(Error::budget(
            "deletion-contraction vertex",
            n,
            budgets.deletion_contraction_vertices.min(64),
        ));
    }
    let mut adj = vec![0u64; n];
    for &(x, y) in g.edges() {
        adj[x] |= 1 << y;
        adj[y] |= 1 << x;
    }
    let mut solver = DeletionContraction {
        memo: HashMap::new(),
        limit: budgets.deletion_contraction_memo,
    };
    solver.solve(adj)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generators::*;

    fn b() -> Budgets {
        Budgets::default()
    }

    fn bi(terms: &[(u32, u32, i64)]) -> BivarPoly {
        BivarPoly::from_terms(terms.iter().copied())
    }

    fn cycle(n: usize) -> MarkedGraph {
        MarkedGraph::new(n, (0..n).map(|i| (i, (i + 1) % n)).collect(), 0, 1).unwrap()
    }

    #[test]
    fn single_edge_partition() {
        let z = partition_fk(&MarkedGraph::single_edge(), &b()).unwrap();
        // q (y + q - 1)
        assert_eq!(z, bi(&[(1, 1, 1), (2, 0, 1), (1, 0, -1)]));
    }

    #[test]
    fn edgeless_partition() {
        let g = MarkedGraph::new(3, vec![], 0, 1).unwrap();
        assert_eq!(partition_fk(&g, &b()).unwrap(), BivarPoly::monomial(1, 3, 0));
    }

    #[test]
    fn triangle_chromatic_both_ways() {
        let expect = IntPoly::from_i64(&[0, 2, -3, 1]);
        assert_eq!(chromatic(&triangle(), &b()).unwrap(), expect);
        let z = partition_fk(&triangle(), &b()).unwrap();
        assert_eq!(z.substitute_y(&IntPoly::zero()), expect);
    }

    #[test]
    fn c4_chromatic() {
        // q (q - 1)(q^2 - 3q + 3)
        let expect = &(&IntPoly::x() * &IntPoly::linear(1, -1)) * &IntPoly::from_i64(&[3, -3, 1]);
        assert_eq!(chromatic(&cycle(4), &b()).unwrap(), expect);
        assert_eq!(chromatic(&dhl(), &b()).unwrap(), expect);
    }

    #[test]
    fn trees() {
        for k in 2..7 {
            let path = MarkedGraph::new(k, (0..k - 1).map(|i| (i, i + 1)).collect(), 0, 1).unwrap();
            let expect = &IntPoly::x() * &IntPoly::linear(1, -1).pow(k as u32 - 1);
            assert_eq!(chromatic(&path, &b()).unwrap(), expect);
        }
        let star = MarkedGraph::new(5, vec![(0, 4), (1, 4), (2, 4), (3, 4)], 0, 1).unwrap();
        assert_eq!(
            chromatic(&star, &b()).unwrap(),
            &IntPoly::x() * &IntPoly::linear(1, -1).pow(4)
        );
    }

    #[test]
    fn disconnected_and_complete() {
        let g = MarkedGraph::new(5, vec![(0, 1), (2, 3), (3, 4), (2, 4)], 0, 1).unwrap();
        let k2 = IntPoly::from_i64(&[0, -1, 1]);
        let k3 = IntPoly::from_i64(&[0, 2, -3, 1]);
        assert_eq!(chromatic(&g, &b()).unwrap(), &k2 * &k3);
    }

    #[test]
    fn tutte_examples() {
        // x
        assert_eq!(tutte(&MarkedGraph::single_edge(), &b()).unwrap(), BivarPoly::q());
        // x^2 + x + y
        assert_eq!(tutte(&triangle(), &b()).unwrap(), bi(&[(2, 0, 1), (1, 0, 1), (0, 1, 1)]));
        // x + y
        let pair = MarkedGraph::new(2, vec![(0, 1), (0, 1)], 0, 1).unwrap();
        assert_eq!(tutte(&pair, &b()).unwrap(), bi(&[(1, 0, 1), (0, 1, 1)]));
    }

    #[test]
    fn conditional_examples() {
        let c = conditional_uv(&MarkedGraph::single_edge(), &b()).unwrap();
        assert_eq!((c.u, c.v), (BivarPoly::y(), BivarPoly::one()));

        let c = conditional_uv(&linear_chain(), &b()).unwrap();
        assert_eq!(c.u, bi(&[(0, 2, 1), (1, 0, 1), (0, 0, -1)]));
        assert_eq!(c.v, bi(&[(0, 1, 2), (1, 0, 1), (0, 0, -2)]));

        let c = conditional_uv(&triangle(), &b()).unwrap();
        assert_eq!(c.u, bi(&[(0, 3, 1), (1, 1, 1), (0, 1, -1)]));
        assert_eq!(c.v, bi(&[(0, 1, 2), (1, 0, 1), (0, 0, -2)]));
    }

    #[test]
    fn spin_oracle_examples() {
        let s = spin_enumerate_oracle(&MarkedGraph::single_edge(), 2, &b()).unwrap();
        assert_eq!(s.z, IntPoly::from_i64(&[2, 2]));
        let s = spin_enumerate_oracle(&triangle(), 3, &b()).unwrap();
        assert_eq!(s.z.coeff(0), BigInt::from(6));
        let small = Budgets {
            spin_configs: 100,
            ..b()
        };
        assert!(spin_enumerate_oracle(&dhl(), 5, &small).unwrap_err().is_budget());
    }

    #[test]
    fn edge_budget() {
        let tight = Budgets {
            subset_edges: 3,
            ..b()
        };
        let err = partition_fk(&dhl(), &tight).unwrap_err();
        assert!(err.to_string().contains('4'), "{err}");
    }

    #[test]
    fn memo_budget() {
        let tight = Budgets {
            deletion_contraction_memo: 0,
            ..b()
        };
        assert!(chromatic(&split_diamond(), &tight).unwrap_err().is_budget());
    }
}
