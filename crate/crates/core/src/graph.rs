//! Bouquets, Cayley-Serre multigraphs X(Z/ℓⁿZ, S, iₙ) and their Laplacians.
//!
//! Edges are undirected and stored once per unordered pair `(u, v)` with
//! `u <= v`; `u == v` is a loop. Each (vertex, generator) pair contributes
//! one edge {v, v + c}, so a generator with 2c ≡ 0 yields doubled edges and
//! c ≡ 0 yields loops.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::padic::{PadicError, Prime};
use crate::seed::{Seed, SeedSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error("{prime}^{level} vertices do not fit in memory")]
    TooManyVertices { prime: u64, level: u32 },
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge list line {line}: {message}")]
    EdgeList { line: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multigraph {
    vertex_count: usize,
    edges: BTreeMap<(usize, usize), u64>,
}

impl Multigraph {
    pub fn new(vertex_count: usize) -> Self {
        assert!(vertex_count >= 1, "a multigraph has at least one vertex");
        Multigraph {
            vertex_count,
            edges: BTreeMap::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn add_edges(&mut self, u: usize, v: usize, multiplicity: u64) -> Result<(), GraphError> {
        for w in [u, v] {
            if w >= self.vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    count: self.vertex_count,
                });
            }
        }
        if multiplicity > 0 {
            *self.edges.entry((u.min(v), u.max(v))).or_insert(0) += multiplicity;
        }
        Ok(())
    }

    pub fn multiplicity(&self, u: usize, v: usize) -> u64 {
        self.edges.get(&(u.min(v), u.max(v))).copied().unwrap_or(0)
    }

    /// `((u, v), m)` with `u <= v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = ((usize, usize), u64)> + '_ {
        self.edges.iter().map(|(&k, &m)| (k, m))
    }

    /// Total number of edges counted with multiplicity; a loop counts once.
    pub fn edge_count(&self) -> u64 {
        self.edges.values().sum()
    }

    /// A loop contributes 2 to the degree of its vertex.
    pub fn degree(&self, v: usize) -> u64 {
        self.edges
            .iter()
            .filter(|((a, b), _)| *a == v || *b == v)
            .map(|((a, b), m)| if a == b { 2 * m } else { *m })
            .sum()
    }

    pub fn degrees(&self) -> Vec<u64> {
        let mut deg = vec![0; self.vertex_count];
        for (&(a, b), &m) in &self.edges {
            deg[a] += m;
            deg[b] += m;
        }
        deg
    }

    /// Adjacency lists without loops, for traversal.
    fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &(a, b) in self.edges.keys() {
            if a != b {
                adj[a].push(b);
                adj[b].push(a);
            }
        }
        adj
    }

    /// Plain-text export: a `vertices <count>` header, then one `u v m` line
    /// per vertex pair.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("vertices {}\n", self.vertex_count);
        for (&(u, v), &m) in &self.edges {
            writeln!(out, "{u} {v} {m}").expect("writing to a String");
        }
        out
    }

    pub fn from_edge_list(text: &str) -> Result<Self, GraphError> {
        let err = |line: usize, message: &str| GraphError::EdgeList {
            line,
            message: message.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let count = header
            .strip_prefix("vertices")
            .and_then(|r| r.trim().parse::<usize>().ok())
            .filter(|&c| c >= 1)
            .ok_or_else(|| err(hl, "expected `vertices <count>`"))?;
        let mut g = Multigraph::new(count);
        for (ln, line) in lines {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 3 {
                return Err(err(ln, "expected `u v m`"));
            }
            let u = fields[0]
                .parse::<usize>()
                .map_err(|_| err(ln, "bad vertex"))?;
            let v = fields[1]
                .parse::<usize>()
                .map_err(|_| err(ln, "bad vertex"))?;
            let m = fields[2]
                .parse::<u64>()
                .map_err(|_| err(ln, "bad multiplicity"))?;
            g.add_edges(u, v, m).map_err(|e| err(ln, &e.to_string()))?;
        }
        Ok(g)
    }
}

/// One vertex with `t` loops.
pub fn bouquet(t: usize) -> Multigraph {
    assert!(t >= 1);
    let mut g = Multigraph::new(1);
    g.add_edges(0, 0, t as u64).expect("vertex 0 exists");
    g
}

/// iₙ(s): the image of a seed in Z/ℓⁿZ.
pub fn reduce_seed(seed: &Seed, prime: Prime, level: u32) -> Result<u64, GraphError> {
    if level == 0 {
        return Ok(0);
    }
    let r = seed.resolve(prime, level)?;
    r.residue().to_u64().ok_or(GraphError::TooManyVertices {
        prime: prime.get(),
        level,
    })
}

/// Number of vertices ℓⁿ at a level, if it fits in a `usize`.
pub fn level_size(prime: Prime, level: u32) -> Option<usize> {
    (prime.get() as usize).checked_pow(level)
}

/// X(Z/ℓⁿZ, S, iₙ); level 0 is the bouquet B_t.
pub fn build_cayley_serre(spec: &SeedSpec, level: u32) -> Result<Multigraph, GraphError> {
    let prime = spec.prime();
    let m = level_size(prime, level).ok_or(GraphError::TooManyVertices {
        prime: prime.get(),
        level,
    })?;
    let mut g = Multigraph::new(m);
    for seed in spec.seeds() {
        let c = reduce_seed(seed, prime, level)? as usize;
        for v in 0..m {
            g.add_edges(v, (v + c) % m, 1)?;
        }
    }
    Ok(g)
}

/// Combinatorial Laplacian D − A. Loops cancel and contribute nothing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaplacianMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl LaplacianMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.entries.chunks(self.dim.max(1))
    }

    /// The matrix with row and column `k` deleted.
    pub fn minor(&self, k: usize) -> Vec<Vec<i64>> {
        (0..self.dim)
            .filter(|&i| i != k)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| j != k)
                    .map(|j| self.get(i, j))
                    .collect()
            })
            .collect()
    }
}

pub fn laplacian(g: &Multigraph) -> LaplacianMatrix {
    let n = g.vertex_count();
    let mut entries = vec![0i64; n * n];
    for ((u, v), m) in g.edges() {
        if u == v {
            continue;
        }
        let m = m as i64;
        entries[u * n + u] += m;
        entries[v * n + v] += m;
        entries[u * n + v] -= m;
        entries[v * n + u] -= m;
    }
    LaplacianMatrix { dim: n, entries }
}

/// Breadth-first reachability from vertex 0.
pub fn is_connected(g: &Multigraph) -> bool {
    let adj = g.neighbours();
    let mut seen = vec![false; g.vertex_count()];
    let mut queue = VecDeque::from([0usize]);
    seen[0] = true;
    let mut reached = 1;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] {
                seen[w] = true;
                reached += 1;
                queue.push_back(w);
            }
        }
    }
    reached == g.vertex_count()
}
