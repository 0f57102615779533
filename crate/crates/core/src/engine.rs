//! Seeded execution of the uniform, recursive and left-handed walks.
//!
//! All three walks share one random source: the action index drawn at step
//! `t` depends only on `(seed, t)` and the number of available actions, so a
//! trace can be replayed from its seed and two walks that address the same
//! flaws in the same states draw identical actions.
//!
//! The recursive walks use an explicit stack of open `ADDRESS` frames. The
//! budget counts `ADDRESS` invocations, i.e. steps; unwinding frames is free.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::forest::{ForestFlavor, WitnessForest};
use crate::order::FlawOrder;
use crate::problem::{FlawId, Problem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WalkError {
    #[error("budget must be at least one step")]
    ZeroBudget,
    #[error(
        "contract violation: flaw {flaw} is present in state {digest:#018x} but has no actions"
    )]
    NoActions { flaw: FlawId, digest: u64 },
    #[error("the left-handed walk needs a single fixed flaw order")]
    MultiPermutation,
    #[error("responsibility digraph base order does not match the walk's flaw order")]
    OrderMismatch,
    #[error("invariant violated at step {step} returning from ADDRESS({flaw}): {detail}")]
    Invariant {
        step: u64,
        flaw: FlawId,
        detail: String,
    },
}

/// One arc of a trajectory.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StepRecord {
    pub step: u64,
    pub flaw: FlawId,
    pub action: u64,
    pub post_digest: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome<S> {
    Sink(S),
    BudgetExceeded(S),
}

impl<S> Outcome<S> {
    pub fn state(&self) -> &S {
        match self {
            Outcome::Sink(s) | Outcome::BudgetExceeded(s) => s,
        }
    }

    pub fn is_sink(&self) -> bool {
        matches!(self, Outcome::Sink(_))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkTrace<S> {
    pub seed: u64,
    pub budget: u64,
    pub initial_digest: u64,
    pub steps: Vec<StepRecord>,
    pub outcome: Outcome<S>,
    /// `σ₁, …, σ_{t+1}` when state recording was requested.
    pub states: Option<Vec<S>>,
    /// Flaw arguments of the `ADDRESS` frames still open when the budget ran
    /// out, outermost first. Always empty for the uniform walk.
    pub open_stack: Vec<FlawId>,
}

impl<S> WalkTrace<S> {
    /// `W(Σ)`: the flaws labeling the arcs, in order.
    pub fn witness(&self) -> Vec<FlawId> {
        self.steps.iter().map(|s| s.flaw).collect()
    }

    pub fn final_state(&self) -> &S {
        self.outcome.state()
    }

    pub fn is_sink(&self) -> bool {
        self.outcome.is_sink()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A responsibility digraph `R` declared against a base order `π` (least first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResponsibilityDigraph {
    pub arcs: BTreeMap<FlawId, BTreeSet<FlawId>>,
    pub base_order: Vec<FlawId>,
}

impl ResponsibilityDigraph {
    pub fn new(base_order: Vec<FlawId>) -> Self {
        ResponsibilityDigraph {
            arcs: BTreeMap::new(),
            base_order,
        }
    }

    /// `R` equal to the declared causality digraph of `problem`, over the
    /// identity order.
    pub fn from_declared<P: Problem>(problem: &P) -> Self {
        let base_order: Vec<FlawId> = (0..problem.flaw_count()).map(FlawId).collect();
        let arcs = base_order
            .iter()
            .map(|&f| (f, problem.neighborhood(f).into_iter().collect()))
            .collect();
        ResponsibilityDigraph { arcs, base_order }
    }

    pub fn insert(&mut self, from: FlawId, to: FlawId) {
        self.arcs.entry(from).or_default().insert(to);
    }

    pub fn remove(&mut self, from: FlawId, to: FlawId) -> bool {
        self.arcs.get_mut(&from).is_some_and(|s| s.remove(&to))
    }

    pub fn contains(&self, from: FlawId, to: FlawId) -> bool {
        self.arcs.get(&from).is_some_and(|s| s.contains(&to))
    }

    /// `Γ_R(f)`.
    pub fn neighborhood(&self, f: FlawId) -> Vec<FlawId> {
        self.arcs
            .get(&f)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }
}

/// Which flaws an open `ADDRESS(f, ·)` frame keeps recursing on.
#[derive(Clone, Copy, Debug)]
pub enum RecursionFilter<'r> {
    /// `U(σ) ∩ Γ(f)`, the recursive walk.
    Neighborhood,
    /// `U(σ) ∩ Γ_R(f)`, the left-handed walk.
    Responsibility(&'r ResponsibilityDigraph),
    /// `U(σ)` itself; degenerates to the uniform walk.
    Everything,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct WalkOptions {
    /// Keep every visited state in the trace.
    pub record_states: bool,
    /// Assert the return contracts of `ADDRESS` online (costly).
    pub check_invariants: bool,
}

/// Index of the action taken at `step` when `count` actions are available.
pub fn draw_action(seed: u64, step: u64, count: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(step);
    rng.gen_range(0..count)
}

struct Recorder<'p, P: Problem> {
    problem: &'p P,
    seed: u64,
    steps: Vec<StepRecord>,
    states: Option<Vec<P::State>>,
}

impl<'p, P: Problem> Recorder<'p, P> {
    fn new(problem: &'p P, seed: u64, initial: &P::State, record: bool) -> Self {
        Recorder {
            problem,
            seed,
            steps: Vec::new(),
            states: record.then(|| vec![initial.clone()]),
        }
    }

    fn step(&mut self, flaw: FlawId, state: &P::State) -> Result<P::State, WalkError> {
        let count = self.problem.action_count(flaw, state);
        if count == 0 {
            return Err(WalkError::NoActions {
                flaw,
                digest: self.problem.digest(state),
            });
        }
        let step = self.steps.len() as u64 + 1;
        let action = draw_action(self.seed, step, count);
        let next = self.problem.apply_action(flaw, state, action);
        self.steps.push(StepRecord {
            step,
            flaw,
            action,
            post_digest: self.problem.digest(&next),
        });
        if let Some(states) = self.states.as_mut() {
            states.push(next.clone());
        }
        Ok(next)
    }

    fn taken(&self) -> u64 {
        self.steps.len() as u64
    }
}

/// Runs walks of one instance under one flaw order.
pub struct Walker<'a, P: Problem> {
    problem: &'a P,
    order: &'a FlawOrder,
    options: WalkOptions,
}

impl<'a, P: Problem> Walker<'a, P> {
    pub fn new(problem: &'a P, order: &'a FlawOrder) -> Self {
        Walker {
            problem,
            order,
            options: WalkOptions::default(),
        }
    }

    pub fn options(mut self, options: WalkOptions) -> Self {
        self.options = options;
        self
    }

    pub fn record_states(mut self, yes: bool) -> Self {
        self.options.record_states = yes;
        self
    }

    pub fn check_invariants(mut self, yes: bool) -> Self {
        self.options.check_invariants = yes;
        self
    }

    /// Uniform random walk on `D_π`.
    pub fn uniform(&self, budget: u64, seed: u64) -> Result<WalkTrace<P::State>, WalkError> {
        if budget == 0 {
            return Err(WalkError::ZeroBudget);
        }
        let p = self.problem;
        let mut state = p.initial_state();
        let initial_digest = p.digest(&state);
        let mut rec = Recorder::new(p, seed, &state, self.options.record_states);
        let outcome = loop {
            let present = p.flaws_present(&state);
            let Some(f) = self.order.greatest(rec.taken() + 1, present) else {
                break Outcome::Sink(state);
            };
            if rec.taken() == budget {
                break Outcome::BudgetExceeded(state);
            }
            state = rec.step(f, &state)?;
        };
        Ok(WalkTrace {
            seed,
            budget,
            initial_digest,
            steps: rec.steps,
            outcome,
            states: rec.states,
            open_stack: Vec::new(),
        })
    }

    pub fn recursive(
        &self,
        budget: u64,
        seed: u64,
    ) -> Result<(WalkTrace<P::State>, WitnessForest), WalkError> {
        self.run_recursion(RecursionFilter::Neighborhood, budget, seed)
    }

    pub fn lefthanded(
        &self,
        responsibility: &ResponsibilityDigraph,
        budget: u64,
        seed: u64,
    ) -> Result<(WalkTrace<P::State>, WitnessForest), WalkError> {
        if !self.order.is_fixed() {
            return Err(WalkError::MultiPermutation);
        }
        if !self
            .order
            .agrees_with(&responsibility.base_order, self.problem.flaw_count())
        {
            return Err(WalkError::OrderMismatch);
        }
        self.run_recursion(
            RecursionFilter::Responsibility(responsibility),
            budget,
            seed,
        )
    }

    /// The ELIMINATE/ADDRESS recursion with an arbitrary filter.
    pub fn run_recursion(
        &self,
        filter: RecursionFilter<'_>,
        budget: u64,
        seed: u64,
    ) -> Result<(WalkTrace<P::State>, WitnessForest), WalkError> {
        if budget == 0 {
            return Err(WalkError::ZeroBudget);
        }
        let p = self.problem;
        let flavor = match filter {
            RecursionFilter::Responsibility(_) => ForestFlavor::LeftHanded,
            _ => ForestFlavor::Recursive,
        };
        let keeps = |f: FlawId, g: FlawId| match filter {
            RecursionFilter::Neighborhood => p.in_neighborhood(f, g),
            RecursionFilter::Responsibility(r) => r.contains(f, g),
            RecursionFilter::Everything => true,
        };

        struct Frame {
            flaw: FlawId,
            node: usize,
            // U(σ) at invocation, kept only for invariant checks
            entry: Option<Vec<FlawId>>,
        }

        let mut state = p.initial_state();
        let initial_digest = p.digest(&state);
        let mut present = p.flaws_present(&state);
        let mut rec = Recorder::new(p, seed, &state, self.options.record_states);
        let mut forest = WitnessForest::new(flavor);
        let mut frames: Vec<Frame> = Vec::new();

        let outcome = loop {
            let next_step = rec.taken() + 1;
            let next = match frames.last() {
                None => match self.order.greatest(next_step, present.iter().copied()) {
                    Some(f) => f,
                    None => break Outcome::Sink(state),
                },
                Some(top) => {
                    let b = present.iter().copied().filter(|&g| keeps(top.flaw, g));
                    match self.order.greatest(next_step, b) {
                        Some(g) => g,
                        None => {
                            let top = frames.pop().expect("frame");
                            if let Some(entry) = &top.entry {
                                self.check_return(filter, top.flaw, entry, &present, rec.taken())?;
                            }
                            continue;
                        }
                    }
                }
            };
            if rec.taken() == budget {
                break Outcome::BudgetExceeded(state);
            }
            let entry = (self.options.check_invariants
                && !matches!(filter, RecursionFilter::Everything))
            .then(|| present.clone());
            let parent = frames.last().map(|f| f.node);
            state = rec.step(next, &state)?;
            present = p.flaws_present(&state);
            let node = forest.add(next, parent);
            frames.push(Frame {
                flaw: next,
                node,
                entry,
            });
        };

        let open_stack = match outcome {
            Outcome::BudgetExceeded(_) => frames.iter().map(|f| f.flaw).collect(),
            Outcome::Sink(_) => Vec::new(),
        };
        Ok((
            WalkTrace {
                seed,
                budget,
                initial_digest,
                steps: rec.steps,
                outcome,
                states: rec.states,
                open_stack,
            },
            forest,
        ))
    }

    fn check_return(
        &self,
        filter: RecursionFilter<'_>,
        flaw: FlawId,
        entry: &[FlawId],
        now: &[FlawId],
        step: u64,
    ) -> Result<(), WalkError> {
        let fail = |detail: String| WalkError::Invariant { step, flaw, detail };
        match filter {
            RecursionFilter::Neighborhood => {
                // U(τ) ⊆ U(σ) \ (Γ(f) ∪ {f})
                for &g in now {
                    if g == flaw || self.problem.in_neighborhood(flaw, g) {
                        return Err(fail(format!("flaw {g} of Γ(f) ∪ {{f}} still present")));
                    }
                    if entry.binary_search(&g).is_err() {
                        return Err(fail(format!("flaw {g} absent at invocation is present")));
                    }
                }
            }
            RecursionFilter::Responsibility(_) => {
                // τ ∉ f and W(τ,f) ⊆ W(σ,f)
                if now.binary_search(&flaw).is_ok() {
                    return Err(fail("addressed flaw still present".into()));
                }
                for &g in now {
                    if self.order.greater(0, g, flaw) && entry.binary_search(&g).is_err() {
                        return Err(fail(format!("greater flaw {g} introduced")));
                    }
                }
            }
            RecursionFilter::Everything => {}
        }
        Ok(())
    }
}

pub fn run_uniform<P: Problem>(
    problem: &P,
    order: &FlawOrder,
    budget: u64,
    seed: u64,
) -> Result<WalkTrace<P::State>, WalkError> {
    Walker::new(problem, order).uniform(budget, seed)
}

pub fn run_recursive<P: Problem>(
    problem: &P,
    order: &FlawOrder,
    budget: u64,
    seed: u64,
) -> Result<(WalkTrace<P::State>, WitnessForest), WalkError> {
    Walker::new(problem, order).recursive(budget, seed)
}

pub fn run_lefthanded<P: Problem>(
    problem: &P,
    order: &FlawOrder,
    responsibility: &ResponsibilityDigraph,
    budget: u64,
    seed: u64,
) -> Result<(WalkTrace<P::State>, WitnessForest), WalkError> {
    Walker::new(problem, order).lefthanded(responsibility, budget, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::TableProblem;

    // Single flaw 0 present in state 0; its only action leads back to state 0.
    fn stuck() -> TableProblem {
        TableProblem::builder(1, 1)
            .present(0, &[0])
            .actions(0, 0, &[0])
            .build()
            .unwrap()
    }

    // f=0 present in s0, addressing it leads to s1 where g=1 is present;
    // addressing g leads to the flawless s2.
    fn chain() -> TableProblem {
        TableProblem::builder(3, 2)
            .present(0, &[0])
            .present(1, &[1])
            .actions(0, 0, &[1, 1])
            .actions(1, 1, &[2, 2, 2])
            .neighbors(0, &[1])
            .build()
            .unwrap()
    }

    #[test]
    fn zero_budget_is_rejected() {
        let p = stuck();
        assert_eq!(
            run_uniform(&p, &FlawOrder::ById, 0, 1).unwrap_err(),
            WalkError::ZeroBudget
        );
        assert_eq!(
            run_recursive(&p, &FlawOrder::ById, 0, 1).unwrap_err(),
            WalkError::ZeroBudget
        );
    }

    #[test]
    fn stuck_walk_exhausts_budget() {
        let p = stuck();
        let t = run_uniform(&p, &FlawOrder::ById, 5, 3).unwrap();
        assert!(!t.is_sink());
        assert_eq!(t.len(), 5);
        assert!(t.steps.iter().all(|s| s.flaw == FlawId(0) && s.action == 0));
        let digests: BTreeSet<u64> = t.steps.iter().map(|s| s.post_digest).collect();
        assert_eq!(digests.len(), 1);
        assert_eq!(
            t.steps.iter().map(|s| s.step).collect::<Vec<_>>(),
            vec![1, 2, 3, 4, 5]
        );
    }

    #[test]
    fn flawless_start_is_an_empty_sink() {
        let p = TableProblem::builder(1, 1).build().unwrap();
        let t = run_uniform(&p, &FlawOrder::ById, 10, 0).unwrap();
        assert!(t.is_sink());
        assert!(t.is_empty());
        let (t, forest) = run_recursive(&p, &FlawOrder::ById, 10, 0).unwrap();
        assert!(t.is_sink() && forest.is_empty());
    }

    #[test]
    fn zero_actions_is_a_contract_violation() {
        let p = TableProblem::builder(1, 1)
            .present(0, &[0])
            .build_unchecked();
        let err = run_uniform(&p, &FlawOrder::ById, 3, 0).unwrap_err();
        assert!(matches!(
            err,
            WalkError::NoActions {
                flaw: FlawId(0),
                ..
            }
        ));
    }

    #[test]
    fn chain_builds_two_node_trees() {
        let p = chain();
        for seed in 0..20 {
            let (t, forest) = Walker::new(&p, &FlawOrder::ById)
                .check_invariants(true)
                .recursive(10, seed)
                .unwrap();
            assert!(t.is_sink());
            assert_eq!(t.witness(), vec![FlawId(0), FlawId(1)]);
            assert_eq!(forest.root_labels(), vec![FlawId(0)]);
            assert_eq!(forest.child_labels(forest.roots[0]), vec![FlawId(1)]);
        }
    }

    #[test]
    fn budget_exhaustion_reports_open_stack() {
        let p = chain();
        let (t, _) = run_recursive(&p, &FlawOrder::ById, 1, 0).unwrap();
        assert!(!t.is_sink());
        assert_eq!(t.open_stack, vec![FlawId(0)]);
    }

    #[test]
    fn lefthanded_rejects_per_step_orders_and_mismatched_bases() {
        let p = chain();
        let r = ResponsibilityDigraph::from_declared(&p);
        let err = run_lefthanded(&p, &FlawOrder::PerStep { seed: 1 }, &r, 5, 0).unwrap_err();
        assert_eq!(err, WalkError::MultiPermutation);
        let mut r2 = r.clone();
        r2.base_order.reverse();
        let err = run_lefthanded(&p, &FlawOrder::ById, &r2, 5, 0).unwrap_err();
        assert_eq!(err, WalkError::OrderMismatch);
    }

    #[test]
    fn unsound_declaration_trips_online_check() {
        // g is caused by f but not declared in Γ(f)
        let p = TableProblem::builder(3, 2)
            .present(0, &[0])
            .present(1, &[1])
            .actions(0, 0, &[1])
            .actions(1, 1, &[2])
            .build()
            .unwrap();
        let res = Walker::new(&p, &FlawOrder::ById)
            .check_invariants(true)
            .recursive(10, 0);
        assert!(matches!(res, Err(WalkError::Invariant { .. })));
    }

    #[test]
    fn draws_depend_only_on_seed_and_step() {
        let a: Vec<u64> = (1..50).map(|s| draw_action(9, s, 7)).collect();
        let b: Vec<u64> = (1..50).map(|s| draw_action(9, s, 7)).collect();
        assert_eq!(a, b);
        assert!(a.iter().all(|&k| k < 7));
        let c: Vec<u64> = (1..50).map(|s| draw_action(10, s, 7)).collect();
        assert_ne!(a, c);
    }
}
