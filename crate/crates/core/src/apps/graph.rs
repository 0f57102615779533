//! Simple undirected graphs.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{content_lines, parse_numbers, AppError};

/// Vertices `0..n`; every edge stored once as `(u, v)` with `u < v`, in
/// lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    n: usize,
    edges: Vec<(u32, u32)>,
    adjacency: Vec<Vec<u32>>,
    // incident[v] = edge ids of S_v, sorted by the other endpoint
    incident: Vec<Vec<u32>>,
}

impl SimpleGraph {
    pub fn new(n: usize, edges: &[(u32, u32)]) -> Result<Self, AppError> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(AppError::invalid(format!("self-loop at vertex {}", a + 1)));
            }
            if a as usize >= n || b as usize >= n {
                return Err(AppError::invalid(format!(
                    "edge {} {} leaves the vertex range 1..={n}",
                    a + 1,
                    b + 1
                )));
            }
            if !set.insert((a.min(b), a.max(b))) {
                return Err(AppError::invalid(format!(
                    "duplicate edge {} {}",
                    a + 1,
                    b + 1
                )));
            }
        }
        let edges: Vec<(u32, u32)> = set.into_iter().collect();
        let mut adjacency = vec![Vec::new(); n];
        let mut incident = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            adjacency[a as usize].push(b);
            adjacency[b as usize].push(a);
            incident[a as usize].push((b, e as u32));
            incident[b as usize].push((a, e as u32));
        }
        for a in &mut adjacency {
            a.sort_unstable();
        }
        let incident = incident
            .into_iter()
            .map(|mut v| {
                v.sort_unstable();
                v.into_iter().map(|(_, e)| e).collect()
            })
            .collect();
        Ok(SimpleGraph {
            n,
            edges,
            adjacency,
            incident,
        })
    }

    /// Erdős–Rényi `G(n, p)`.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for a in 0..n as u32 {
            for b in a + 1..n as u32 {
                if rng.gen_bool(p) {
                    edges.push((a, b));
                }
            }
        }
        SimpleGraph::new(n, &edges).expect("random graph is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (u32, u32) {
        self.edges[e]
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        &self.adjacency[v as usize]
    }

    /// Edge ids of `S_v`, ordered by the other endpoint.
    pub fn incident(&self, v: u32) -> &[u32] {
        &self.incident[v as usize]
    }

    pub fn degree(&self, v: u32) -> usize {
        self.adjacency[v as usize].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn edge_id(&self, a: u32, b: u32) -> Option<usize> {
        self.edges.binary_search(&(a.min(b), a.max(b))).ok()
    }

    /// `V E` header, then one `u v` line per edge (1-indexed).
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines
            .next()
            .ok_or_else(|| AppError::parse(1, "missing `V E` header"))?;
        let h: Vec<usize> = parse_numbers(ln, header)?;
        let [n, m] = h[..] else {
            return Err(AppError::parse(ln, "header must be `V E`"));
        };
        let mut edges = Vec::with_capacity(m);
        for (ln, line) in lines.by_ref().take(m) {
            let uv: Vec<u32> = parse_numbers(ln, line)?;
            let [u, v] = uv[..] else {
                return Err(AppError::parse(ln, "edge line must be `u v`"));
            };
            if u == 0 || v == 0 {
                return Err(AppError::parse(ln, "vertices are numbered from 1"));
            }
            edges.push((u - 1, v - 1));
        }
        if edges.len() != m {
            return Err(AppError::parse(
                ln,
                format!("expected {m} edges, found {}", edges.len()),
            ));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(AppError::parse(ln, "trailing content after the edge list"));
        }
        SimpleGraph::new(n, &edges)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edges.len());
        for &(a, b) in &self.edges {
            let _ = writeln!(out, "{} {}", a + 1, b + 1);
        }
        out
    }
}
