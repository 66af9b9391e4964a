use std::collections::{HashSet, VecDeque};

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::combinatorial::DisjointSets;
use crate::error::{invalid, Error, Result};
use crate::rng::Rng;

/// Largest accepted edge weight.
pub const MAX_WEIGHT: u64 = 1_000_000;

/// An edge `u - v` (or arc `u -> v` when read as a digraph).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub weight: u64,
}

/// A graph with positive integer weights whose underlying undirected graph
/// is connected. Edge order is significant: bit `i` of an edge bit string
/// refers to `edges()[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    n_vertices: usize,
    edges: Vec<Edge>,
    w_max: u64,
}

impl WeightedGraph {
    pub fn new(n_vertices: usize, edges: Vec<Edge>) -> Result<Self> {
        if n_vertices == 0 {
            return Err(Error::InvalidGraph("graph has no vertices".into()));
        }
        for (i, e) in edges.iter().enumerate() {
            if e.u >= n_vertices || e.v >= n_vertices {
                return Err(Error::InvalidGraph(format!("edge {i} has an endpoint out of range")));
            }
            if e.u == e.v {
                return Err(Error::InvalidGraph(format!("edge {i} is a self-loop")));
            }
            if e.weight == 0 || e.weight > MAX_WEIGHT {
                return Err(Error::InvalidGraph(format!(
                    "edge {i} has weight {} outside 1..={MAX_WEIGHT}",
                    e.weight
                )));
            }
        }
        let mut dsu = DisjointSets::new(n_vertices);
        for e in &edges {
            dsu.union(e.u, e.v);
        }
        if dsu.components() != 1 {
            return Err(Error::InvalidGraph(format!(
                "graph is disconnected ({} components)",
                dsu.components()
            )));
        }
        let w_max = edges.iter().map(|e| e.weight).max().unwrap_or(1);
        Ok(Self {
            n_vertices,
            edges,
            w_max,
        })
    }

    /// Reads `n m` followed by `m` triples `u v w` (0-based vertices).
    /// Whitespace, including line breaks, is free-form; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut tokens = text
            .lines()
            .enumerate()
            .flat_map(|(i, l)| {
                let content = l.split('#').next().unwrap_or("");
                content.split_whitespace().map(move |t| (i + 1, t))
            });
        let mut next = |what: &str| -> Result<(usize, u64)> {
            let (line, tok) = tokens.next().ok_or_else(|| Error::Parse {
                line: 0,
                message: format!("unexpected end of input, expected {what}"),
            })?;
            let value = tok.parse::<u64>().map_err(|e| Error::Parse {
                line,
                message: format!("bad {what} {tok:?}: {e}"),
            })?;
            Ok((line, value))
        };
        let (_, n) = next("vertex count")?;
        let (_, m) = next("edge count")?;
        let mut edges = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let (_, u) = next("vertex")?;
            let (_, v) = next("vertex")?;
            let (_, weight) = next("weight")?;
            edges.push(Edge {
                u: u as usize,
                v: v as usize,
                weight,
            });
        }
        if let Some((line, tok)) = tokens.next() {
            return Err(Error::Parse {
                line,
                message: format!("trailing token {tok:?}"),
            });
        }
        Self::new(n as usize, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n_vertices, self.edges.len());
        for e in &self.edges {
            out.push_str(&format!("{} {} {}\n", e.u, e.v, e.weight));
        }
        out
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn w_max(&self) -> u64 {
        self.w_max
    }

    /// Whether every vertex is reachable from `source` along arcs `u -> v`.
    pub fn reachable_from(&self, source: usize) -> bool {
        if source >= self.n_vertices {
            return false;
        }
        let mut out = vec![Vec::new(); self.n_vertices];
        for e in &self.edges {
            out[e.u].push(e.v);
        }
        let mut seen = vec![false; self.n_vertices];
        seen[source] = true;
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            for &v in &out[u] {
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Random connected simple graph: a random spanning tree plus distinct
    /// extra edges, weights uniform in `1..=w_max`.
    pub fn random_connected(n: usize, m: usize, w_max: u64, rng: &mut Rng) -> Result<Self> {
        if n == 0 || m + 1 < n || m > n * (n - 1) / 2 {
            return Err(invalid(format!("no simple connected graph with n={n}, m={m}")));
        }
        check_w_max(w_max)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut pairs = HashSet::new();
        let mut edges = Vec::with_capacity(m);
        for i in 1..n {
            let (a, b) = (order[i], order[rng.random_range(0..i)]);
            pairs.insert((a.min(b), a.max(b)));
            edges.push((a, b));
        }
        while edges.len() < m {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            if a != b && pairs.insert((a.min(b), a.max(b))) {
                edges.push((a, b));
            }
        }
        edges.shuffle(rng);
        let edges = edges
            .into_iter()
            .map(|(u, v)| Edge {
                u,
                v,
                weight: rng.random_range(1..=w_max),
            })
            .collect();
        Self::new(n, edges)
    }

    /// Random digraph without parallel arcs in which every vertex is
    /// reachable from `source`: a random out-tree rooted at `source` plus
    /// distinct extra arcs.
    pub fn random_reachable_digraph(
        n: usize,
        m: usize,
        w_max: u64,
        source: usize,
        rng: &mut Rng,
    ) -> Result<Self> {
        if n == 0 || source >= n || m + 1 < n || m > n * (n - 1) {
            return Err(invalid(format!("no such digraph with n={n}, m={m}, source={source}")));
        }
        check_w_max(w_max)?;
        let mut order: Vec<usize> = (0..n).filter(|&v| v != source).collect();
        order.shuffle(rng);
        order.insert(0, source);
        let mut arcs = HashSet::new();
        let mut list = Vec::with_capacity(m);
        for i in 1..n {
            let (u, v) = (order[rng.random_range(0..i)], order[i]);
            arcs.insert((u, v));
            list.push((u, v));
        }
        while list.len() < m {
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u != v && arcs.insert((u, v)) {
                list.push((u, v));
            }
        }
        list.shuffle(rng);
        let edges = list
            .into_iter()
            .map(|(u, v)| Edge {
                u,
                v,
                weight: rng.random_range(1..=w_max),
            })
            .collect();
        Self::new(n, edges)
    }
}

fn check_w_max(w_max: u64) -> Result<()> {
    if w_max == 0 || w_max > MAX_WEIGHT {
        return Err(invalid(format!("w_max must lie in 1..={MAX_WEIGHT}, got {w_max}")));
    }
    Ok(())
}
