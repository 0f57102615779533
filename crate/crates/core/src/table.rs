//! Explicit instances given by tables: states are `0..n`, every flaw's
//! presence and every action is listed. Meant for hand-built fixtures and
//! randomized differential testing of the walks and checkers.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::problem::{FlawId, Problem};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TableError {
    #[error("flaw {flaw} is present in state {state} but has no actions")]
    MissingActions { state: u32, flaw: FlawId },
    #[error("state {state} or flaw {flaw} out of range")]
    OutOfRange { state: u32, flaw: FlawId },
}

#[derive(Clone, Debug)]
pub struct TableProblem {
    initial: u32,
    present: Vec<Vec<FlawId>>,
    // actions[state][flaw] = destinations
    actions: Vec<Vec<Vec<u32>>>,
    neighbors: Vec<Vec<FlawId>>,
    amenability: Vec<u64>,
}

pub struct TableBuilder {
    initial: u32,
    present: Vec<BTreeSet<FlawId>>,
    actions: Vec<Vec<Vec<u32>>>,
    neighbors: Vec<BTreeSet<FlawId>>,
}

impl TableBuilder {
    pub fn initial(mut self, state: u32) -> Self {
        self.initial = state;
        self
    }

    pub fn present(mut self, state: u32, flaws: &[u64]) -> Self {
        self.present[state as usize].extend(flaws.iter().map(|&f| FlawId(f)));
        self
    }

    pub fn actions(mut self, state: u32, flaw: u64, dests: &[u32]) -> Self {
        self.actions[state as usize][flaw as usize].extend_from_slice(dests);
        self
    }

    pub fn neighbors(mut self, flaw: u64, of: &[u64]) -> Self {
        self.neighbors[flaw as usize].extend(of.iter().map(|&g| FlawId(g)));
        self
    }

    /// Builds without checking that present flaws have actions.
    pub fn build_unchecked(self) -> TableProblem {
        let nflaws = self.neighbors.len();
        let mut amenability = vec![u64::MAX; nflaws];
        for (s, fl) in self.present.iter().enumerate() {
            for f in fl {
                let c = self.actions[s][f.index()].len() as u64;
                amenability[f.index()] = amenability[f.index()].min(c);
            }
        }
        for a in &mut amenability {
            if *a == u64::MAX {
                *a = 1;
            }
        }
        TableProblem {
            initial: self.initial,
            present: self
                .present
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            actions: self.actions,
            neighbors: self
                .neighbors
                .into_iter()
                .map(|s| s.into_iter().collect())
                .collect(),
            amenability,
        }
    }

    pub fn build(self) -> Result<TableProblem, TableError> {
        let nstates = self.present.len() as u32;
        for (s, fl) in self.present.iter().enumerate() {
            for &f in fl {
                if f.index() >= self.neighbors.len() {
                    return Err(TableError::OutOfRange {
                        state: s as u32,
                        flaw: f,
                    });
                }
                let acts = &self.actions[s][f.index()];
                if acts.is_empty() {
                    return Err(TableError::MissingActions {
                        state: s as u32,
                        flaw: f,
                    });
                }
                if let Some(&d) = acts.iter().find(|&&d| d >= nstates) {
                    return Err(TableError::OutOfRange { state: d, flaw: f });
                }
            }
        }
        Ok(self.build_unchecked())
    }
}

impl TableProblem {
    pub fn builder(states: u32, flaws: u64) -> TableBuilder {
        TableBuilder {
            initial: 0,
            present: vec![BTreeSet::new(); states as usize],
            actions: vec![vec![Vec::new(); flaws as usize]; states as usize],
            neighbors: vec![BTreeSet::new(); flaws as usize],
        }
    }

    /// A random instance whose declared neighborhoods are exactly the
    /// causality relation of its transition digraph.
    ///
    /// Every flaw is present in a state with probability `density`; each
    /// present flaw gets between 1 and `max_actions` actions with at least one
    /// leaving the state. Actions to flawless states are favored by `sink_bias`
    /// so walks terminate at realistic rates.
    pub fn random(seed: u64, states: u32, flaws: u64, density: f64, max_actions: u32) -> Self {
        assert!(states >= 2 && flaws >= 1 && max_actions >= 1);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut b = TableProblem::builder(states, flaws);
        // state 0 flawed, last state flawless
        for s in 0..states - 1 {
            let mut any = false;
            for f in 0..flaws {
                if rng.gen_bool(density) {
                    b.present[s as usize].insert(FlawId(f));
                    any = true;
                }
            }
            if !any && s == 0 {
                b.present[0].insert(FlawId(rng.gen_range(0..flaws)));
            }
        }
        for s in 0..states {
            let fl: Vec<FlawId> = b.present[s as usize].iter().copied().collect();
            for f in fl {
                let n = rng.gen_range(1..=max_actions);
                let mut dests: Vec<u32> = (0..n).map(|_| rng.gen_range(0..states)).collect();
                if dests.iter().all(|&d| d == s) {
                    dests[0] = (s + 1 + rng.gen_range(0..states - 1)) % states;
                }
                b.actions[s as usize][f.index()] = dests;
            }
        }
        let mut t = b.build().expect("random table is well formed");
        t.neighbors = t.derived_neighborhoods();
        t
    }

    fn derived_neighborhoods(&self) -> Vec<Vec<FlawId>> {
        let mut nb = vec![BTreeSet::new(); self.neighbors.len()];
        for (s, fl) in self.present.iter().enumerate() {
            for &f in fl {
                for &d in &self.actions[s][f.index()] {
                    for &g in &self.present[d as usize] {
                        if g == f || self.present[s].binary_search(&g).is_err() {
                            nb[f.index()].insert(g);
                        }
                    }
                }
            }
        }
        nb.into_iter().map(|s| s.into_iter().collect()).collect()
    }

    pub fn state_count(&self) -> u32 {
        self.present.len() as u32
    }

    pub fn set_neighborhood(&mut self, flaw: FlawId, of: Vec<FlawId>) {
        let mut of = of;
        of.sort_unstable();
        of.dedup();
        self.neighbors[flaw.index()] = of;
    }

    pub fn set_amenability(&mut self, flaw: FlawId, value: u64) {
        self.amenability[flaw.index()] = value;
    }
}

impl Problem for TableProblem {
    type State = u32;

    fn initial_state(&self) -> u32 {
        self.initial
    }

    fn flaw_count(&self) -> u64 {
        self.neighbors.len() as u64
    }

    fn flaws_present(&self, state: &u32) -> Vec<FlawId> {
        self.present[*state as usize].clone()
    }

    fn action_count(&self, flaw: FlawId, state: &u32) -> u64 {
        self.actions[*state as usize][flaw.index()].len() as u64
    }

    fn apply_action(&self, flaw: FlawId, state: &u32, index: u64) -> u32 {
        self.actions[*state as usize][flaw.index()][index as usize]
    }

    fn amenability(&self, flaw: FlawId) -> u64 {
        self.amenability[flaw.index()]
    }

    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId> {
        self.neighbors[flaw.index()].clone()
    }

    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        self.neighbors[flaw.index()].binary_search(&other).is_ok()
    }

    fn log2_state_space(&self) -> f64 {
        (self.present.len() as f64).log2()
    }

    fn encode_state(&self, state: &u32, out: &mut Vec<u8>) {
        out.extend_from_slice(&state.to_le_bytes());
    }

    fn enumerate_states(&self) -> Option<Vec<u32>> {
        Some((0..self.state_count()).collect())
    }
}
