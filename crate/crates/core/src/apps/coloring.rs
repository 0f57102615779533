//! Proper vertex coloring with `q ≥ Δ+1` colors.
//!
//! One flaw per (edge, color): both endpoints carry that color. Addressing it
//! recolors the higher-id endpoint with a color unused in its neighborhood,
//! so no flaw is ever introduced and the causality digraph is empty.

use crate::problem::{FlawId, Problem};

use super::{AppError, SimpleGraph, Violation};

#[derive(Clone, Debug)]
pub struct ColoringProblem {
    graph: SimpleGraph,
    q: u32,
}

/// Colors `0..q` per vertex.
pub type Coloring = Vec<u16>;

impl ColoringProblem {
    pub fn new(graph: SimpleGraph, q: u32) -> Result<Self, AppError> {
        let delta = graph.max_degree() as u32;
        if q <= delta {
            return Err(AppError::invalid(format!(
                "q = {q} colors but the maximum degree is {delta}; need q ≥ Δ+1"
            )));
        }
        if q > u16::MAX as u32 {
            return Err(AppError::invalid("too many colors"));
        }
        Ok(ColoringProblem { graph, q })
    }

    pub fn graph(&self) -> &SimpleGraph {
        &self.graph
    }

    pub fn colors(&self) -> u32 {
        self.q
    }

    /// `(edge, color)` of a flaw id.
    pub fn decode(&self, f: FlawId) -> (usize, u16) {
        ((f.0 / self.q as u64) as usize, (f.0 % self.q as u64) as u16)
    }

    fn available(&self, state: &Coloring, v: u32) -> Vec<u16> {
        let mut used = vec![false; self.q as usize];
        for &w in self.graph.neighbors(v) {
            used[state[w as usize] as usize] = true;
        }
        (0..self.q as u16).filter(|&c| !used[c as usize]).collect()
    }

    pub fn validate_solution(&self, state: &Coloring) -> Result<(), Violation> {
        if state.len() != self.graph.vertex_count() {
            return Err(Violation(
                "coloring has the wrong number of vertices".into(),
            ));
        }
        if let Some(&c) = state.iter().find(|&&c| c as u32 >= self.q) {
            return Err(Violation(format!("color {} out of range", c + 1)));
        }
        for &(a, b) in self.graph.edges() {
            if state[a as usize] == state[b as usize] {
                return Err(Violation(format!(
                    "edge {} {} is monochromatic (color {})",
                    a + 1,
                    b + 1,
                    state[a as usize] + 1
                )));
            }
        }
        Ok(())
    }
}

impl Problem for ColoringProblem {
    type State = Coloring;

    fn initial_state(&self) -> Coloring {
        vec![0; self.graph.vertex_count()]
    }

    fn flaw_count(&self) -> u64 {
        self.graph.edge_count() as u64 * self.q as u64
    }

    fn flaws_present(&self, state: &Coloring) -> Vec<FlawId> {
        self.graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, &(a, b))| state[a as usize] == state[b as usize])
            .map(|(e, &(a, _))| FlawId(e as u64 * self.q as u64 + state[a as usize] as u64))
            .collect()
    }

    fn action_count(&self, flaw: FlawId, state: &Coloring) -> u64 {
        let (e, _) = self.decode(flaw);
        self.available(state, self.graph.edge(e).1).len() as u64
    }

    fn apply_action(&self, flaw: FlawId, state: &Coloring, index: u64) -> Coloring {
        let (e, _) = self.decode(flaw);
        let v = self.graph.edge(e).1;
        let mut next = state.clone();
        next[v as usize] = self.available(state, v)[index as usize];
        next
    }

    fn amenability(&self, _flaw: FlawId) -> u64 {
        (self.q - self.graph.max_degree() as u32) as u64
    }

    fn neighborhood(&self, _flaw: FlawId) -> Vec<FlawId> {
        Vec::new()
    }

    fn in_neighborhood(&self, _flaw: FlawId, _other: FlawId) -> bool {
        false
    }

    fn log2_state_space(&self) -> f64 {
        self.graph.vertex_count() as f64 * (self.q as f64).log2()
    }

    fn encode_state(&self, state: &Coloring, out: &mut Vec<u8>) {
        for c in state {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }

    fn enumerate_states(&self) -> Option<Vec<Coloring>> {
        let n = self.graph.vertex_count() as u32;
        let total = (self.q as u64).checked_pow(n).filter(|&t| t <= 1 << 20)?;
        Some(
            (0..total)
                .map(|mut k| {
                    (0..n)
                        .map(|_| {
                            let c = (k % self.q as u64) as u16;
                            k /= self.q as u64;
                            c
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> ColoringProblem {
        ColoringProblem::new(SimpleGraph::new(3, &[(0, 1), (1, 2)]).unwrap(), 3).unwrap()
    }

    #[test]
    fn path_flaws_at_start() {
        let p = path3();
        let s = p.initial_state();
        assert_eq!(p.flaws_present(&s), vec![FlawId(0), FlawId(3)]);
        assert_eq!(p.decode(FlawId(3)), (1, 0));
        assert!(p.validate_solution(&s).is_err());
        assert!(p.validate_solution(&vec![0, 1, 0]).is_ok());
    }

    #[test]
    fn action_recolors_higher_endpoint_with_available_colors() {
        let p = path3();
        let s = vec![0, 0, 1];
        // f_{01,0}: vertex 1 sees colors {0, 1}, so only color 2 is available
        assert_eq!(p.action_count(FlawId(0), &s), 1);
        assert_eq!(p.apply_action(FlawId(0), &s, 0), vec![0, 2, 1]);
    }

    #[test]
    fn rejects_too_few_colors() {
        let k4: Vec<(u32, u32)> = vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        let g = SimpleGraph::new(4, &k4).unwrap();
        assert!(ColoringProblem::new(g.clone(), 3).is_err());
        let p = ColoringProblem::new(g, 4).unwrap();
        assert_eq!(p.amenability(FlawId(0)), 1);
    }
}
