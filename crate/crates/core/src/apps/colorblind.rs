//! 6-edge-colorings whose palettes properly color the vertices.
//!
//! The palette `p(v)` of a vertex is its vector of color degrees sorted
//! non-decreasingly. Only edges `{u, v}` with `u < v` and `d(u) = d(v) = d`
//! can have `p(u) = p(v)`; each such edge carries `f(d)` flaws.
//!
//! For a coloring with `p(u) = p(v)`, the class `C` is the coloring of
//! `S_u \ {uv}`; inside it the coloring of `S_v` (edges ordered by their other
//! endpoint) is one of the vectors compatible with `C`. Its position in the
//! lexicographic order of those vectors is the flaw index `i`. Addressing
//! any of the edge's flaws recolors `S_v` in one of `6^d` ways.

use crate::problem::{FlawClass, FlawId, Problem, ProfileEntry};

use super::{AppError, SimpleGraph, Violation};

pub const COLORS: usize = 6;
/// Largest degree of an equal-degree edge whose flaw indices fit in 64 bits.
pub const MAX_DEGREE: usize = 20;

pub type Palette = [u8; COLORS];

/// Sorted color-degree vector of a list of edge colors.
pub fn palette(colors: impl IntoIterator<Item = u8>) -> Palette {
    let mut p = [0u8; COLORS];
    for c in colors {
        p[c as usize] += 1;
    }
    p.sort_unstable();
    p
}

fn factorial(n: u32) -> u128 {
    (1..=n as u128).product()
}

fn multinomial(parts: &[u32]) -> u128 {
    let total: u32 = parts.iter().sum();
    parts
        .iter()
        .fold(factorial(total), |acc, &k| acc / factorial(k))
}

/// `f(d) = 6! · max over d₁+…+d₆ = d of the multinomial (d; d₁,…,d₆)`,
/// by enumerating partitions of `d` into at most six parts.
pub fn class_bound(d: u32) -> u128 {
    fn go(rest: u32, max_part: u32, parts: &mut Vec<u32>, best: &mut u128) {
        if parts.len() == COLORS || rest == 0 {
            if rest == 0 {
                *best = (*best).max(multinomial(parts));
            }
            return;
        }
        for k in (1..=rest.min(max_part)).rev() {
            parts.push(k);
            go(rest - k, k, parts, best);
            parts.pop();
        }
    }
    let mut best = 0;
    go(d, d, &mut Vec::new(), &mut best);
    best * factorial(COLORS as u32)
}

/// `1572 · 6^d / d^{5/2}`.
pub fn class_bound_estimate(d: u32) -> f64 {
    1572.0 * 6f64.powi(d as i32) / (d as f64).powf(2.5)
}

/// Minimum degree above which the symmetric condition holds when
/// `Δ ≤ R·δ`: `(1572 e R²)²`.
pub fn min_degree_threshold(ratio: f64) -> f64 {
    (1572.0 * std::f64::consts::E * ratio * ratio).powi(2)
}

/// Distinct arrangements of a palette over the six colors.
fn arrangements(p: &Palette) -> Vec<[u32; COLORS]> {
    fn go(
        counts: &mut Vec<(u8, u32)>,
        slot: usize,
        cur: &mut [u32; COLORS],
        out: &mut Vec<[u32; COLORS]>,
    ) {
        if slot == COLORS {
            out.push(*cur);
            return;
        }
        for i in 0..counts.len() {
            if counts[i].1 > 0 {
                counts[i].1 -= 1;
                cur[slot] = counts[i].0 as u32;
                go(counts, slot + 1, cur, out);
                counts[i].1 += 1;
            }
        }
    }
    let mut counts: Vec<(u8, u32)> = Vec::new();
    for &v in p {
        match counts.iter_mut().find(|(x, _)| *x == v) {
            Some(e) => e.1 += 1,
            None => counts.push((v, 1)),
        }
    }
    let mut out = Vec::new();
    go(&mut counts, 0, &mut [0; COLORS], &mut out);
    out
}

#[derive(Clone, Debug)]
struct Eligible {
    edge: u32,
    u: u32,
    v: u32,
    degree: u32,
    offset: u64,
    size: u64,
    /// Position of the edge `uv` within `S_v`.
    position: usize,
}

#[derive(Clone, Debug)]
pub struct ColorBlindProblem {
    graph: SimpleGraph,
    eligible: Vec<Eligible>,
    // edge id → index into `eligible`
    eligible_of_edge: Vec<Option<u32>>,
    flaw_count: u64,
}

/// One of six colors per edge.
pub type EdgeColoring = Vec<u8>;

impl ColorBlindProblem {
    pub fn new(graph: SimpleGraph) -> Result<Self, AppError> {
        let mut eligible = Vec::new();
        let mut eligible_of_edge = vec![None; graph.edge_count()];
        let mut offset: u64 = 0;
        for (e, &(u, v)) in graph.edges().iter().enumerate() {
            let (du, dv) = (graph.degree(u), graph.degree(v));
            if du == 1 && dv == 1 {
                return Err(AppError::invalid(format!(
                    "edge {} {} is a component on its own; its endpoints always share a palette",
                    u + 1,
                    v + 1
                )));
            }
            if du != dv {
                continue;
            }
            if du > MAX_DEGREE {
                return Err(AppError::invalid(format!(
                    "edge {} {} has degree {du} above the supported {MAX_DEGREE}",
                    u + 1,
                    v + 1
                )));
            }
            let size = class_bound(du as u32) as u64;
            let position = graph
                .incident(v)
                .iter()
                .position(|&x| x as usize == e)
                .expect("edge incident to its endpoint");
            eligible_of_edge[e] = Some(eligible.len() as u32);
            eligible.push(Eligible {
                edge: e as u32,
                u,
                v,
                degree: du as u32,
                offset,
                size,
                position,
            });
            offset = offset
                .checked_add(size)
                .ok_or_else(|| AppError::invalid("flaw indices overflow 64 bits"))?;
        }
        Ok(ColorBlindProblem {
            graph,
            eligible,
            eligible_of_edge,
            flaw_count: offset,
        })
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn vertex_palette(&self, state: &EdgeColoring, v: u32) -> Palette {
        palette(self.graph.incident(v).iter().map(|&e| state[e as usize]))
    }

    /// Edges that can carry flaws, as `(u, v)`.
    pub fn eligible_edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        self.eligible.iter().map(|e| (e.u, e.v))
    }

    fn locate(&self, f: FlawId) -> (&Eligible, u64) {
        let k = self.eligible.partition_point(|e| e.offset <= f.0) - 1;
        let el = &self.eligible[k];
        (el, f.0 - el.offset)
    }

    /// `(u, v, i)` of a flaw.
    pub fn decode(&self, f: FlawId) -> (u32, u32, u64) {
        let (el, i) = self.locate(f);
        (el.u, el.v, i)
    }

    /// Number of `S_v` colorings completing `prefix` (color counts so far)
    /// whose palette equals `target`, with `free` positions left.
    fn completions_for(prefix: &[u32; COLORS], free: u32, target: &Palette) -> u128 {
        arrangements(target)
            .iter()
            .filter(|c| (0..COLORS).all(|k| c[k] >= prefix[k]))
            .map(|c| {
                let parts: Vec<u32> = (0..COLORS).map(|k| c[k] - prefix[k]).collect();
                debug_assert_eq!(parts.iter().sum::<u32>(), free);
                multinomial(&parts)
            })
            .sum()
    }

    /// Lexicographic rank of the `S_v` coloring `x` among all colorings of
    /// `S_v` compatible with `class` (color counts of `S_u \ {uv}`).
    fn rank(class: &[u32; COLORS], position: usize, x: &[u8]) -> u128 {
        let d = x.len();
        let target = |z: u8| {
            let mut c = *class;
            c[z as usize] += 1;
            let mut p = [0u8; COLORS];
            for k in 0..COLORS {
                p[k] = c[k] as u8;
            }
            p.sort_unstable();
            p
        };
        let mut rank = 0u128;
        let mut counts = [0u32; COLORS];
        for t in 0..d {
            for y in 0..x[t] {
                let mut pc = counts;
                pc[y as usize] += 1;
                let fixed = t + 1;
                rank += if position < fixed {
                    let z = if position == t { y } else { x[position] };
                    Self::completions_for(&pc, (d - fixed) as u32, &target(z))
                } else {
                    (0..COLORS as u8)
                        .map(|z| {
                            let mut pz = pc;
                            pz[z as usize] += 1;
                            Self::completions_for(&pz, (d - fixed - 1) as u32, &target(z))
                        })
                        .sum()
                };
            }
            counts[x[t] as usize] += 1;
        }
        rank
    }

    fn flaw_of(&self, state: &EdgeColoring, el: &Eligible) -> Option<FlawId> {
        if self.vertex_palette(state, el.u) != self.vertex_palette(state, el.v) {
            return None;
        }
        let mut class = [0u32; COLORS];
        for &e in self.graph.incident(el.u) {
            if e != el.edge {
                class[state[e as usize] as usize] += 1;
            }
        }
        let x: Vec<u8> = self
            .graph
            .incident(el.v)
            .iter()
            .map(|&e| state[e as usize])
            .collect();
        let i = Self::rank(&class, el.position, &x) as u64;
        debug_assert!(i < el.size);
        Some(FlawId(el.offset + i))
    }

    /// Whether edge `(a, b)` touches the closed neighborhood of `v`.
    fn touches(&self, v: u32, a: u32, b: u32) -> bool {
        let near = |x: u32| x == v || self.graph.neighbors(v).binary_search(&x).is_ok();
        near(a) || near(b)
    }

    /// Eligible edges within `M(u, v)`: edges meeting `v` or a neighbor of `v`.
    fn affected(&self, v: u32) -> Vec<&Eligible> {
        let mut edges: Vec<u32> = std::iter::once(v)
            .chain(self.graph.neighbors(v).iter().copied())
            .flat_map(|x| self.graph.incident(x).iter().copied())
            .collect();
        edges.sort_unstable();
        edges.dedup();
        edges
            .into_iter()
            .filter_map(|e| self.eligible_of_edge[e as usize])
            .map(|k| &self.eligible[k as usize])
            .collect()
    }

    /// `1572 · Δ² / δ^{5/2}`, an upper bound on the symmetric-condition sum.
    pub fn condition_bound(&self) -> f64 {
        let dmax = self.graph.max_degree() as f64;
        let dmin = self.graph.min_degree() as f64;
        1572.0 * dmax * dmax / dmin.powf(2.5)
    }

    pub fn validate_solution(&self, state: &EdgeColoring) -> Result<(), Violation> {
        if state.len() != self.graph.edge_count() {
            return Err(Violation("coloring has the wrong number of edges".into()));
        }
        if state.iter().any(|&c| c as usize >= COLORS) {
            return Err(Violation("color out of range".into()));
        }
        for &(a, b) in self.graph.edges() {
            if self.vertex_palette(state, a) == self.vertex_palette(state, b) {
                return Err(Violation(format!(
                    "vertices {} and {} have the same palette {:?}",
                    a + 1,
                    b + 1,
                    self.vertex_palette(state, a)
                )));
            }
        }
        Ok(())
    }
}

impl Problem for ColorBlindProblem {
    type State = EdgeColoring;

    fn initial_state(&self) -> EdgeColoring {
        vec![0; self.graph.edge_count()]
    }

    fn flaw_count(&self) -> u64 {
        self.flaw_count
    }

    fn flaws_present(&self, state: &EdgeColoring) -> Vec<FlawId> {
        // offsets increase with the eligible index, so the output is sorted
        self.eligible
            .iter()
            .filter_map(|el| self.flaw_of(state, el))
            .collect()
    }

    fn action_count(&self, flaw: FlawId, _state: &EdgeColoring) -> u64 {
        (COLORS as u64).pow(self.locate(flaw).0.degree)
    }

    fn apply_action(&self, flaw: FlawId, state: &EdgeColoring, index: u64) -> EdgeColoring {
        let (el, _) = self.locate(flaw);
        let mut next = state.clone();
        let mut k = index;
        for &e in self.graph.incident(el.v) {
            next[e as usize] = (k % COLORS as u64) as u8;
            k /= COLORS as u64;
        }
        next
    }

    fn amenability(&self, flaw: FlawId) -> u64 {
        (COLORS as u64).pow(self.locate(flaw).0.degree)
    }

    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId> {
        let (el, _) = self.locate(flaw);
        self.affected(el.v)
            .into_iter()
            .flat_map(|g| (g.offset..g.offset + g.size).map(FlawId))
            .collect()
    }

    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        let (el, _) = self.locate(flaw);
        let (g, _) = self.locate(other);
        self.touches(el.v, g.u, g.v)
    }

    fn log2_state_space(&self) -> f64 {
        self.graph.edge_count() as f64 * (COLORS as f64).log2()
    }

    fn encode_state(&self, state: &EdgeColoring, out: &mut Vec<u8>) {
        out.extend_from_slice(state);
    }

    fn neighborhood_profile(&self, flaw: FlawId) -> Option<Vec<ProfileEntry>> {
        let (el, _) = self.locate(flaw);
        let mut by_degree: std::collections::BTreeMap<u32, u64> = Default::default();
        for g in self.affected(el.v) {
            *by_degree.entry(g.degree).or_default() += g.size;
        }
        Some(
            by_degree
                .into_iter()
                .map(|(d, count)| ProfileEntry {
                    amenability: (COLORS as u64).pow(d),
                    count,
                })
                .collect(),
        )
    }

    fn flaw_classes(&self) -> Option<Vec<FlawClass>> {
        Some(
            self.eligible
                .iter()
                .map(|el| FlawClass {
                    representative: FlawId(el.offset),
                    size: el.size,
                })
                .collect(),
        )
    }

    fn enumerate_states(&self) -> Option<Vec<EdgeColoring>> {
        let m = self.graph.edge_count() as u32;
        let total = (COLORS as u64).checked_pow(m).filter(|&t| t <= 1 << 20)?;
        Some(
            (0..total)
                .map(|mut k| {
                    (0..m)
                        .map(|_| {
                            let c = (k % COLORS as u64) as u8;
                            k /= COLORS as u64;
                            c
                        })
                        .collect()
                })
                .collect(),
        )
    }
}
