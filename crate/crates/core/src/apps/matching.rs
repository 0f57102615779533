//! Rainbow perfect matchings of an edge-colored complete graph `K_{2n}`.
//!
//! A flaw is a pair of vertex-disjoint edges of the same color, both in the
//! matching. Its four endpoints are named `v₁ > v₂`, `v₃ > v₄` with `v₁ > v₃`.
//! An action chooses `u₁ ∉ V = {v₁..v₄}` and then `u₃ ∉ V ∪ {u₁, u₂}`
//! (`u₂`, `u₄` their mates) and swaps the four matching edges
//! `v₁v₂, u₁u₂, v₃v₄, u₃u₄` for `v₁u₁, v₂u₂, v₃u₃, v₄u₄`.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{FlawId, Problem};

use super::{content_lines, parse_numbers, AppError, Violation};

fn pair_index(a: u32, b: u32) -> usize {
    let (lo, hi) = (a.min(b) as usize, a.max(b) as usize);
    hi * (hi - 1) / 2 + lo
}

/// Edge colors of `K_{2n}`, one per unordered vertex pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoredComplete {
    vertices: usize,
    colors: Vec<u32>,
}

impl EdgeColoredComplete {
    /// `colors` indexed by pairs `(lo, hi)` in the order
    /// `(0,1), (0,2), (1,2), (0,3), …`.
    pub fn new(vertices: usize, colors: Vec<u32>) -> Result<Self, AppError> {
        if vertices < 2 || vertices % 2 == 1 {
            return Err(AppError::invalid(format!(
                "need an even number of vertices, got {vertices}"
            )));
        }
        if colors.len() != vertices * (vertices - 1) / 2 {
            return Err(AppError::invalid("one color per vertex pair required"));
        }
        Ok(EdgeColoredComplete { vertices, colors })
    }

    /// Colors assigned in blocks of `q` edges to a random edge order, so
    /// every color is used at most `q` times.
    pub fn random(vertices: usize, q: usize, seed: u64) -> Result<Self, AppError> {
        if q == 0 {
            return Err(AppError::invalid("color multiplicity must be positive"));
        }
        let m = vertices * vertices.saturating_sub(1) / 2;
        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let mut colors = vec![0; m];
        for (rank, &e) in order.iter().enumerate() {
            colors[e] = (rank / q) as u32;
        }
        EdgeColoredComplete::new(vertices, colors)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn color(&self, a: u32, b: u32) -> u32 {
        self.colors[pair_index(a, b)]
    }

    /// `q`: the largest number of edges sharing a color.
    pub fn max_multiplicity(&self) -> usize {
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &c in &self.colors {
            *counts.entry(c).or_default() += 1;
        }
        counts.into_values().max().unwrap_or(0)
    }

    /// Line `2n`, then one `u v c` line per vertex pair (1-indexed, any order).
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines
            .next()
            .ok_or_else(|| AppError::parse(1, "missing `2n`"))?;
        let h: Vec<usize> = parse_numbers(ln, header)?;
        let [v] = h[..] else {
            return Err(AppError::parse(ln, "first line must be `2n`"));
        };
        if v < 2 || v % 2 == 1 {
            return Err(AppError::parse(
                ln,
                "vertex count must be even and at least 2",
            ));
        }
        let m = v * (v - 1) / 2;
        let mut colors: Vec<Option<u32>> = vec![None; m];
        for (ln, line) in lines {
            let t: Vec<u64> = parse_numbers(ln, line)?;
            let [a, b, c] = t[..] else {
                return Err(AppError::parse(ln, "expected `u v c`"));
            };
            if a == 0 || b == 0 || a as usize > v || b as usize > v || a == b {
                return Err(AppError::parse(ln, format!("bad vertex pair {a} {b}")));
            }
            let slot = &mut colors[pair_index(a as u32 - 1, b as u32 - 1)];
            if slot.is_some() {
                return Err(AppError::parse(ln, format!("pair {a} {b} colored twice")));
            }
            *slot = Some(u32::try_from(c).map_err(|_| AppError::parse(ln, "color id too large"))?);
        }
        let colors: Option<Vec<u32>> = colors.into_iter().collect();
        let colors = colors.ok_or_else(|| AppError::invalid("some vertex pair has no color"))?;
        EdgeColoredComplete::new(v, colors)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{}\n", self.vertices);
        for a in 0..self.vertices as u32 {
            for b in a + 1..self.vertices as u32 {
                let _ = writeln!(out, "{} {} {}", a + 1, b + 1, self.color(a, b));
            }
        }
        out
    }
}

/// A perfect matching as a mate array: `state[v]` is matched to `v`.
pub type Matching = Vec<u32>;

#[derive(Clone, Debug)]
pub struct MatchingProblem {
    graph: EdgeColoredComplete,
    // (v1, v2, v3, v4) with v1 > v2, v3 > v4, v1 > v3
    flaws: Vec<[u32; 4]>,
    // per pair index: (other pair's larger endpoint, smaller endpoint, flaw id)
    partners: Vec<Vec<(u32, u32, u32)>>,
}

impl MatchingProblem {
    /// Requires `2n ≥ 8` so that every flaw has at least one action.
    pub fn new(graph: EdgeColoredComplete) -> Result<Self, AppError> {
        if graph.vertices < 8 {
            return Err(AppError::invalid(format!(
                "2n = {} is too small for the switching step (need 2n ≥ 8)",
                graph.vertices
            )));
        }
        Ok(Self::new_unchecked(graph))
    }

    /// No lower bound on `2n`. For `2n = 6` flaws have no actions, which is
    /// only meaningful for enumerating the transition digraph.
    pub fn new_unchecked(graph: EdgeColoredComplete) -> Self {
        let v = graph.vertices as u32;
        let mut by_color: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for hi in 1..v {
            for lo in 0..hi {
                by_color
                    .entry(graph.color(lo, hi))
                    .or_default()
                    .push((hi, lo));
            }
        }
        let mut flaws = Vec::new();
        let mut colors: Vec<_> = by_color.into_iter().collect();
        colors.sort_unstable();
        for (_, edges) in colors {
            for (x, &(a1, a2)) in edges.iter().enumerate() {
                for &(b1, b2) in &edges[x + 1..] {
                    if a1 == b1 || a1 == b2 || a2 == b1 || a2 == b2 {
                        continue;
                    }
                    let (e, f) = if a1 > b1 {
                        ((a1, a2), (b1, b2))
                    } else {
                        ((b1, b2), (a1, a2))
                    };
                    flaws.push([e.0, e.1, f.0, f.1]);
                }
            }
        }
        flaws.sort_unstable();
        let mut partners = vec![Vec::new(); graph.colors.len()];
        for (id, q) in flaws.iter().enumerate() {
            partners[pair_index(q[0], q[1])].push((q[2], q[3], id as u32));
            partners[pair_index(q[2], q[3])].push((q[0], q[1], id as u32));
        }
        MatchingProblem {
            graph,
            flaws,
            partners,
        }
    }

    pub fn graph(&self) -> &EdgeColoredComplete {
        &self.graph
    }

    pub fn flaw_vertices(&self, f: FlawId) -> [u32; 4] {
        self.flaws[f.index()]
    }

    pub fn flaw_id(&self, vertices: [u32; 4]) -> Option<FlawId> {
        self.flaws
            .binary_search(&vertices)
            .ok()
            .map(|i| FlawId(i as u64))
    }

    fn actions_per_flaw(&self) -> u64 {
        let v = self.graph.vertices as u64;
        v.saturating_sub(4) * v.saturating_sub(6)
    }

    /// `(u₁, u₃)` of an action index for flaw `f` at `state`.
    pub fn action_vertices(&self, f: FlawId, state: &Matching, index: u64) -> (u32, u32) {
        let q = self.flaws[f.index()];
        let v = self.graph.vertices as u32;
        let inner = self.graph.vertices as u64 - 6;
        let outside: Vec<u32> = (0..v).filter(|x| !q.contains(x)).collect();
        let u1 = outside[(index / inner) as usize];
        let u2 = state[u1 as usize];
        let rest: Vec<u32> = outside
            .into_iter()
            .filter(|&x| x != u1 && x != u2)
            .collect();
        (u1, rest[(index % inner) as usize])
    }

    pub fn validate_solution(&self, state: &Matching) -> Result<(), Violation> {
        let v = self.graph.vertices;
        if state.len() != v {
            return Err(Violation(format!(
                "expected {v} vertices, got {}",
                state.len()
            )));
        }
        let mut seen: HashMap<u32, (u32, u32)> = HashMap::new();
        for (a, &b) in state.iter().enumerate() {
            let a = a as u32;
            if b as usize >= v || b == a || state[b as usize] != a {
                return Err(Violation(format!(
                    "vertex {} is not properly matched",
                    a + 1
                )));
            }
            if a < b {
                if let Some((x, y)) = seen.insert(self.graph.color(a, b), (a, b)) {
                    return Err(Violation(format!(
                        "edges {} {} and {} {} share color {}",
                        x + 1,
                        y + 1,
                        a + 1,
                        b + 1,
                        self.graph.color(a, b)
                    )));
                }
            }
        }
        Ok(())
    }
}

impl Problem for MatchingProblem {
    type State = Matching;

    /// `{1,2}, {3,4}, …`
    fn initial_state(&self) -> Matching {
        (0..self.graph.vertices as u32).map(|x| x ^ 1).collect()
    }

    fn flaw_count(&self) -> u64 {
        self.flaws.len() as u64
    }

    fn flaws_present(&self, state: &Matching) -> Vec<FlawId> {
        let mut out = Vec::new();
        for (a, &b) in state.iter().enumerate() {
            let a = a as u32;
            if a < b {
                for &(x, y, id) in &self.partners[pair_index(a, b)] {
                    // report each flaw once, from its first edge
                    if state[x as usize] == y
                        && (b, a) == (self.flaws[id as usize][0], self.flaws[id as usize][1])
                    {
                        out.push(FlawId(id as u64));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn action_count(&self, _flaw: FlawId, _state: &Matching) -> u64 {
        self.actions_per_flaw()
    }

    fn apply_action(&self, flaw: FlawId, state: &Matching, index: u64) -> Matching {
        let [v1, v2, v3, v4] = self.flaws[flaw.index()];
        let (u1, u3) = self.action_vertices(flaw, state, index);
        let (u2, u4) = (state[u1 as usize], state[u3 as usize]);
        let mut next = state.clone();
        for (a, b) in [(v1, u1), (v2, u2), (v3, u3), (v4, u4)] {
            next[a as usize] = b;
            next[b as usize] = a;
        }
        next
    }

    fn amenability(&self, _flaw: FlawId) -> u64 {
        self.actions_per_flaw()
    }

    /// Flaws with an edge having exactly one endpoint in `{v₁..v₄}`.
    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId> {
        let q = self.flaws[flaw.index()];
        let mut out = Vec::new();
        for &a in &q {
            for b in 0..self.graph.vertices as u32 {
                if !q.contains(&b) {
                    out.extend(
                        self.partners[pair_index(a, b)]
                            .iter()
                            .map(|&(_, _, id)| FlawId(id as u64)),
                    );
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        let q = self.flaws[flaw.index()];
        let g = self.flaws[other.index()];
        let crosses = |a: u32, b: u32| q.contains(&a) != q.contains(&b);
        crosses(g[0], g[1]) || crosses(g[2], g[3])
    }

    /// `log₂((2n−1)!!)`.
    fn log2_state_space(&self) -> f64 {
        (1..self.graph.vertices as u64)
            .step_by(2)
            .map(|k| (k as f64).log2())
            .sum()
    }

    fn encode_state(&self, state: &Matching, out: &mut Vec<u8>) {
        for m in state {
            out.extend_from_slice(&m.to_le_bytes());
        }
    }

    fn enumerate_states(&self) -> Option<Vec<Matching>> {
        fn go(mate: &mut Vec<u32>, out: &mut Vec<Matching>) {
            let Some(a) = mate.iter().position(|&m| m == u32::MAX) else {
                out.push(mate.clone());
                return;
            };
            for b in a + 1..mate.len() {
                if mate[b] == u32::MAX {
                    mate[a] = b as u32;
                    mate[b] = a as u32;
                    go(mate, out);
                    mate[a] = u32::MAX;
                    mate[b] = u32::MAX;
                }
            }
        }
        if self.graph.vertices > 12 {
            return None;
        }
        let mut out = Vec::new();
        go(&mut vec![u32::MAX; self.graph.vertices], &mut out);
        Some(out)
    }
}
