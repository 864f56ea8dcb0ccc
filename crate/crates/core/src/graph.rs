//! Marked multigraphs and hierarchical lattice construction.
//!
//! A [`MarkedGraph`] is a loop-free multigraph with two distinguished
//! vertices `a` and `b`. Level `n + 1` of the hierarchical lattice generated
//! by `Γ` is obtained by replacing every edge of `Γ` with a copy of level `n`,
//! glued along its marked vertices.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::budget::Budgets;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MarkedGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    mark_a: usize,
    mark_b: usize,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    vertices: usize,
    edges: Vec<[usize; 2]>,
    a: usize,
    b: usize,
}

impl MarkedGraph {
    pub fn new(
        vertex_count: usize,
        edges: Vec<(usize, usize)>,
        mark_a: usize,
        mark_b: usize,
    ) -> Result<Self> {
        if mark_a >= vertex_count || mark_b >= vertex_count {
            return Err(Error::InvalidGraph(format!(
                "marks ({mark_a}, {mark_b}) out of range for {vertex_count} vertices"
            )));
        }
        if mark_a == mark_b {
            return Err(Error::InvalidGraph("marks a and b coincide".into()));
        }
        for (idx, &(i, j)) in edges.iter().enumerate() {
            if i >= vertex_count || j >= vertex_count {
                return Err(Error::InvalidGraph(format!(
                    "edge {idx} = ({i}, {j}) references a vertex >= {vertex_count}"
                )));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("edge {idx} is a loop at {i}")));
            }
        }
        Ok(MarkedGraph {
            vertex_count,
            edges,
            mark_a,
            mark_b,
        })
    }

    /// Level 0 of every hierarchical lattice.
    pub fn single_edge() -> Self {
        MarkedGraph {
            vertex_count: 2,
            edges: vec![(0, 1)],
            mark_a: 0,
            mark_b: 1,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn mark_a(&self) -> usize {
        self.mark_a
    }

    pub fn mark_b(&self) -> usize {
        self.mark_b
    }

    /// Parses the JSON graph format `{"vertices": N, "edges": [[i, j], ...], "a": i, "b": j}`.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GraphFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            location: format!("line {}, column {}", e.line(), e.column()),
            message: e.to_string(),
        })?;
        if raw.a >= raw.vertices {
            return Err(field_error("a", format!("mark {} >= vertices {}", raw.a, raw.vertices)));
        }
        if raw.b >= raw.vertices {
            return Err(field_error("b", format!("mark {} >= vertices {}", raw.b, raw.vertices)));
        }
        if raw.a == raw.b {
            return Err(field_error("b", "marks a and b must differ".to_string()));
        }
        for (idx, [i, j]) in raw.edges.iter().enumerate() {
            if *i >= raw.vertices || *j >= raw.vertices {
                return Err(field_error(
                    &format!("edges[{idx}]"),
                    format!("vertex index out of range (vertices = {})", raw.vertices),
                ));
            }
            if i == j {
                return Err(field_error(&format!("edges[{idx}]"), "loops are not allowed".into()));
            }
        }
        let edges = raw.edges.iter().map(|[i, j]| (*i, *j)).collect();
        MarkedGraph::new(raw.vertices, edges, raw.a, raw.b)
    }

    pub fn to_json(&self) -> String {
        let raw = GraphFile {
            vertices: self.vertex_count,
            edges: self.edges.iter().map(|&(i, j)| [i, j]).collect(),
            a: self.mark_a,
            b: self.mark_b,
        };
        serde_json::to_string(&raw).expect("graph serialization cannot fail")
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }

    /// Connectivity of the graph with `removed` deleted (if any).
    fn connected_without(&self, adj: &[Vec<usize>], removed: Option<usize>) -> bool {
        let Some(start) = (0..self.vertex_count).find(|&v| Some(v) != removed) else {
            return true;
        };
        let mut seen = vec![false; self.vertex_count];
        if let Some(r) = removed {
            seen[r] = true;
        }
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        let mut reached = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    reached += 1;
                    queue.push_back(w);
                }
            }
        }
        let expected = self.vertex_count - usize::from(removed.is_some());
        reached == expected
    }

    pub fn is_connected(&self) -> bool {
        self.connected_without(&self.adjacency(), None)
    }

    /// True iff the graph has at least three vertices, is connected, and stays
    /// connected after deleting any single vertex.
    pub fn is_two_connected(&self) -> bool {
        if self.vertex_count < 3 {
            return false;
        }
        let adj = self.adjacency();
        self.connected_without(&adj, None)
            && (0..self.vertex_count).all(|v| self.connected_without(&adj, Some(v)))
    }
}

fn field_error(field: &str, message: String) -> Error {
    Error::Parse {
        location: format!("field `{field}`"),
        message,
    }
}

/// Replaces every edge `(i, j)` of `outer` by a copy of `inner`, with the
/// inner mark `a` glued to `i` and mark `b` glued to `j`.
///
/// Vertex order: the vertices of `outer` keep their indices, followed by the
/// interior vertices of each copy in edge order. The result carries the marks
/// of `outer`.
pub fn replace_edges(outer: &MarkedGraph, inner: &MarkedGraph) -> MarkedGraph {
    let interior: Vec<usize> = (0..inner.vertex_count)
        .filter(|&v| v != inner.mark_a && v != inner.mark_b)
        .collect();
    let mut vertex_count = outer.vertex_count;
    let mut edges = Vec::with_capacity(outer.edges.len() * inner.edges.len());
    let mut relabel = vec![0usize; inner.vertex_count];
    for &(i, j) in &outer.edges {
        relabel[inner.mark_a] = i;
        relabel[inner.mark_b] = j;
        for &v in &interior {
            relabel[v] = vertex_count;
            vertex_count += 1;
        }
        edges.extend(inner.edges.iter().map(|&(x, y)| (relabel[x], relabel[y])));
    }
    MarkedGraph {
        vertex_count,
        edges,
        mark_a: outer.mark_a,
        mark_b: outer.mark_b,
    }
}

/// Builds level `level` of the hierarchical lattice generated by `generator`.
pub fn substitute(generator: &MarkedGraph, level: usize, budgets: &Budgets) -> Result<MarkedGraph> {
    let edges = (generator.edge_count() as u128).checked_pow(level as u32);
    match edges {
        Some(e) if e <= budgets.lattice_edges as u128 => {}
        _ => {
            let needed = edges.map_or_else(
                || format!("{}^{}", generator.edge_count(), level),
                |e| e.to_string(),
            );
            return Err(Error::budget("lattice edge", needed, budgets.lattice_edges));
        }
    }
    let mut current = MarkedGraph::single_edge();
    for _ in 0..level {
        current = replace_edges(generator, &current);
    }
    Ok(current)
}

/// `(|V_n|, |E_n|)` from the closed form; `None` on `u128` overflow.
pub fn level_counts(generator: &MarkedGraph, level: usize) -> Option<(u128, u128)> {
    if level == 0 {
        return Some((2, 1));
    }
    let v = generator.vertex_count() as u128;
    let e = generator.edge_count() as u128;
    let edges = e.checked_pow(level as u32)?;
    // |V| + (|V| - 2) * (|E| + |E|^2 + ... + |E|^(n-1))
    let mut geometric: u128 = 0;
    let mut power: u128 = 1;
    for _ in 1..level {
        power = power.checked_mul(e)?;
        geometric = geometric.checked_add(power)?;
    }
    let vertices = v.checked_add((v - 2).checked_mul(geometric)?)?;
    Some((vertices, edges))
}

/// The generating graphs used throughout the examples, by CLI name.
pub mod generators {
    use super::MarkedGraph;
    use crate::error::{Error, Result};

    /// `k` parallel paths of length two between the marks.
    pub fn kfold_dhl(k: usize) -> MarkedGraph {
        let mut edges = Vec::with_capacity(2 * k);
        for m in 0..k {
            edges.push((0, 2 + m));
            edges.push((2 + m, 1));
        }
        MarkedGraph::new(2 + k, edges, 0, 1).expect("valid by construction")
    }

    pub fn dhl() -> MarkedGraph {
        kfold_dhl(2)
    }

    pub fn linear_chain() -> MarkedGraph {
        kfold_dhl(1)
    }

    pub fn triangle() -> MarkedGraph {
        MarkedGraph::new(3, vec![(0, 1), (0, 2), (2, 1)], 0, 1).expect("valid by construction")
    }

    /// Path `a - c - b` with a pendant edge `c - d`.
    pub fn tripod() -> MarkedGraph {
        MarkedGraph::new(4, vec![(0, 2), (2, 1), (2, 3)], 0, 1).expect("valid by construction")
    }

    /// The diamond `a - c - b`, `a - d - b` with the cross edge `c - d`.
    pub fn split_diamond() -> MarkedGraph {
        MarkedGraph::new(4, vec![(0, 2), (2, 1), (0, 3), (3, 1), (2, 3)], 0, 1)
            .expect("valid by construction")
    }

    pub const NAMES: &[&str] = &["dhl", "kfold:<k>", "triangle", "tripod", "linear", "split-diamond"];

    pub fn by_name(name: &str) -> Result<MarkedGraph> {
        match name {
            "dhl" => Ok(dhl()),
            "triangle" => Ok(triangle()),
            "tripod" => Ok(tripod()),
            "linear" | "linear-chain" => Ok(linear_chain()),
            "split-diamond" => Ok(split_diamond()),
            other => {
                if let Some(k) = other.strip_prefix("kfold:") {
                    let k: usize = k
                        .parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad k in `{other}`")))?;
                    if k == 0 {
                        return Err(Error::InvalidArgument("kfold needs k >= 1".into()));
                    }
                    return Ok(kfold_dhl(k));
                }
                Err(Error::InvalidArgument(format!(
                    "unknown generator `{other}` (known: {})",
                    NAMES.join(", ")
                )))
            }
        }
    }
}
