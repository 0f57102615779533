//! Structural verification on small instances and the witness-forest machinery.
//!
//! Everything here works post hoc on materialized transition digraphs or on
//! complete traced runs. State identity is full equality, never digests.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use thiserror::Error;

use crate::conditions::FlawGraphG;
use crate::engine::{RecursionFilter, ResponsibilityDigraph, WalkTrace};
use crate::forest::{ForestFlavor, WitnessForest};
use crate::order::FlawOrder;
use crate::problem::{FlawId, Problem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StructureError {
    #[error("state cap {cap} exceeded while enumerating the transition digraph")]
    CapExceeded { cap: usize },
    #[error("the instance does not enumerate its state space")]
    NotEnumerable,
    #[error("state is not a vertex of the digraph")]
    UnknownState,
    #[error("no arc labeled {flaw} enters the state at witness position {position}")]
    NoIncomingArc { position: usize, flaw: FlawId },
    #[error("several arcs labeled {flaw} enter the state at witness position {position}")]
    AmbiguousSource { position: usize, flaw: FlawId },
    #[error("trace and state sequence disagree at step {step}")]
    InconsistentTrace { step: usize },
    #[error("the trace carries no state sequence")]
    MissingStates,
    #[error("no flaw available to address at step {step}")]
    EmptyFrontier { step: usize },
    #[error("label {flaw} occurs twice on the frontier at step {step}")]
    DuplicateFrontier { step: usize, flaw: FlawId },
    #[error("frontier labels differ from the recurrence at step {step}")]
    FrontierMismatch { step: usize },
    #[error("forest is not well formed")]
    MalformedForest,
    #[error("preorder reconstruction needs a single fixed flaw order")]
    OrderNotFixed,
}

/// One arc of `D`: `src` addresses `flaw` and moves to `dst` (state indices).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transition {
    pub src: usize,
    pub flaw: FlawId,
    pub dst: usize,
    pub action: u64,
}

/// A materialized portion of the transition multi-digraph `D`.
#[derive(Clone, Debug)]
pub struct ExplicitDigraph<S> {
    pub states: Vec<S>,
    /// `U(σ)` for every state, aligned with `states`.
    pub present: Vec<Vec<FlawId>>,
    pub arcs: Vec<Transition>,
    /// Whether every state's outgoing arcs are included.
    pub complete: bool,
    index: HashMap<S, usize>,
}

impl<S: Clone + Eq + std::hash::Hash> ExplicitDigraph<S> {
    fn empty() -> Self {
        ExplicitDigraph {
            states: Vec::new(),
            present: Vec::new(),
            arcs: Vec::new(),
            complete: true,
            index: HashMap::new(),
        }
    }

    fn intern<P: Problem<State = S>>(&mut self, problem: &P, state: &S) -> (usize, bool) {
        if let Some(&i) = self.index.get(state) {
            return (i, false);
        }
        let i = self.states.len();
        self.index.insert(state.clone(), i);
        self.present.push(problem.flaws_present(state));
        self.states.push(state.clone());
        (i, true)
    }

    fn expand<P: Problem<State = S>>(&mut self, problem: &P, src: usize) -> Vec<usize> {
        let state = self.states[src].clone();
        let mut fresh = Vec::new();
        for f in self.present[src].clone() {
            for k in 0..problem.action_count(f, &state) {
                let next = problem.apply_action(f, &state, k);
                let (dst, new) = self.intern(problem, &next);
                if new {
                    fresh.push(dst);
                }
                self.arcs.push(Transition {
                    src,
                    flaw: f,
                    dst,
                    action: k,
                });
            }
        }
        fresh
    }

    pub fn state_index(&self, state: &S) -> Option<usize> {
        self.index.get(state).copied()
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn is_sink(&self, state: usize) -> bool {
        self.present[state].is_empty()
    }

    /// States where some present flaw has every action leading back to the
    /// state itself, as `(state, flaw)`.
    pub fn stuck_pairs(&self) -> Vec<(usize, FlawId)> {
        let mut escapes: BTreeMap<(usize, FlawId), bool> = BTreeMap::new();
        for a in &self.arcs {
            *escapes.entry((a.src, a.flaw)).or_default() |= a.dst != a.src;
        }
        escapes
            .into_iter()
            .filter(|&(_, esc)| !esc)
            .map(|(k, _)| k)
            .collect()
    }

    /// Distinct sources of arcs labeled `flaw` into `dst`.
    pub fn sources(&self, flaw: FlawId, dst: usize) -> BTreeSet<usize> {
        self.arcs
            .iter()
            .filter(|a| a.dst == dst && a.flaw == flaw)
            .map(|a| a.src)
            .collect()
    }

    fn incoming(&self) -> HashMap<(usize, FlawId), BTreeSet<usize>> {
        let mut m: HashMap<(usize, FlawId), BTreeSet<usize>> = HashMap::new();
        for a in &self.arcs {
            m.entry((a.dst, a.flaw)).or_default().insert(a.src);
        }
        m
    }
}

/// Breadth-first closure of `D` from `σ₁`, limited to `state_cap` states.
pub fn enumerate_digraph<P: Problem>(
    problem: &P,
    state_cap: usize,
) -> Result<ExplicitDigraph<P::State>, StructureError> {
    let mut d = ExplicitDigraph::empty();
    d.intern(problem, &problem.initial_state());
    let mut queue = VecDeque::from([0usize]);
    while let Some(src) = queue.pop_front() {
        queue.extend(d.expand(problem, src));
        if d.state_count() > state_cap {
            return Err(StructureError::CapExceeded { cap: state_cap });
        }
    }
    Ok(d)
}

/// `D` over the instance's whole state space, as listed by
/// [`Problem::enumerate_states`].
pub fn enumerate_full<P: Problem>(
    problem: &P,
    state_cap: usize,
) -> Result<ExplicitDigraph<P::State>, StructureError> {
    let all = problem
        .enumerate_states()
        .ok_or(StructureError::NotEnumerable)?;
    if all.len() > state_cap {
        return Err(StructureError::CapExceeded { cap: state_cap });
    }
    let mut d = ExplicitDigraph::empty();
    for s in &all {
        d.intern(problem, s);
    }
    for src in 0..all.len() {
        d.expand(problem, src);
    }
    if d.state_count() > all.len() {
        // an action left the listed space; the listing was not closed
        d.complete = false;
    }
    Ok(d)
}

/// Outgoing arcs of the given states only; destinations become vertices
/// without their own arcs. Used to sample causality on large instances.
pub fn sample_digraph<P, I>(problem: &P, states: I) -> ExplicitDigraph<P::State>
where
    P: Problem,
    I: IntoIterator<Item = P::State>,
{
    let mut d = ExplicitDigraph::empty();
    let mut expanded = BTreeSet::new();
    for s in states {
        let (i, _) = d.intern(problem, &s);
        if expanded.insert(i) {
            d.expand(problem, i);
        }
    }
    d.complete = false;
    d
}

/// Two `flaw`-labeled arcs entering `dst` from distinct sources.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AtomicityViolation {
    pub flaw: FlawId,
    pub dst: usize,
    pub src1: usize,
    pub src2: usize,
}

/// Checks that each `(flaw, τ)` has at most one source. Parallel arcs from
/// a single source (an action set listing one state twice) do not count.
pub fn verify_atomicity<S: Clone + Eq + std::hash::Hash>(
    d: &ExplicitDigraph<S>,
) -> Result<(), AtomicityViolation> {
    let mut first: HashMap<(usize, FlawId), usize> = HashMap::new();
    for a in &d.arcs {
        match first.get(&(a.dst, a.flaw)) {
            Some(&src) if src != a.src => {
                let (src1, src2) = (src.min(a.src), src.max(a.src));
                return Err(AtomicityViolation {
                    flaw: a.flaw,
                    dst: a.dst,
                    src1,
                    src2,
                });
            }
            Some(_) => {}
            None => {
                first.insert((a.dst, a.flaw), a.src);
            }
        }
    }
    Ok(())
}

/// The causality digraph `C` on flaws.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CausalityDigraph {
    pub flaw_count: u64,
    pub arcs: BTreeMap<FlawId, BTreeSet<FlawId>>,
}

impl CausalityDigraph {
    pub fn new(flaw_count: u64) -> Self {
        CausalityDigraph {
            flaw_count,
            arcs: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, f: FlawId, g: FlawId) {
        self.arcs.entry(f).or_default().insert(g);
    }

    pub fn contains(&self, f: FlawId, g: FlawId) -> bool {
        self.arcs.get(&f).is_some_and(|s| s.contains(&g))
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.values().map(BTreeSet::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.arc_count() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (FlawId, FlawId)> + '_ {
        self.arcs
            .iter()
            .flat_map(|(&f, gs)| gs.iter().map(move |&g| (f, g)))
    }

    /// The declared neighborhoods of an instance read as a causality digraph.
    pub fn declared<P: Problem>(problem: &P) -> Self {
        let mut c = CausalityDigraph::new(problem.flaw_count());
        for f in (0..problem.flaw_count()).map(FlawId) {
            for g in problem.neighborhood(f) {
                c.insert(f, g);
            }
        }
        c
    }
}

/// `f → g` iff some `f`-labeled arc `σ → τ` has `g ∈ U(τ)` and `g = f` or `g ∉ U(σ)`.
pub fn derive_causality<S: Clone + Eq + std::hash::Hash>(
    d: &ExplicitDigraph<S>,
    flaw_count: u64,
) -> CausalityDigraph {
    let mut c = CausalityDigraph::new(flaw_count);
    for a in &d.arcs {
        let before = &d.present[a.src];
        for &g in &d.present[a.dst] {
            if g == a.flaw || before.binary_search(&g).is_err() {
                c.insert(a.flaw, g);
            }
        }
    }
    c
}

/// Derived arcs missing from the instance's declared neighborhoods.
pub fn undeclared_arcs<P: Problem>(
    problem: &P,
    derived: &CausalityDigraph,
) -> Vec<(FlawId, FlawId)> {
    derived
        .iter()
        .filter(|&(f, g)| !problem.in_neighborhood(f, g))
        .collect()
}

/// `{f, g}` is an edge iff both `f→g` and `g→f` are arcs; self-loops dropped.
pub fn build_g(c: &CausalityDigraph) -> FlawGraphG {
    let mut g = FlawGraphG::default();
    for (a, b) in c.iter() {
        if a != b && c.contains(b, a) {
            g.adjacency.entry(a).or_default().insert(b);
        }
    }
    g
}

/// Strongly connected components of `C`, sources of the condensation first.
/// Every flaw `0..flaw_count` appears in exactly one component.
pub fn scc_schedule(c: &CausalityDigraph) -> Vec<Vec<FlawId>> {
    let mut graph: DiGraph<FlawId, ()> = DiGraph::new();
    let nodes: Vec<_> = (0..c.flaw_count)
        .map(|f| graph.add_node(FlawId(f)))
        .collect();
    for (f, g) in c.iter() {
        graph.add_edge(nodes[f.index()], nodes[g.index()], ());
    }
    // tarjan_scc lists components in reverse topological order
    let mut comps: Vec<Vec<FlawId>> = tarjan_scc(&graph)
        .into_iter()
        .map(|comp| {
            let mut v: Vec<FlawId> = comp.into_iter().map(|n| graph[n]).collect();
            v.sort_unstable();
            v
        })
        .collect();
    comps.reverse();
    comps
}

/// Rebuilds `σ₁ … σ_{t+1}` from the witness and the final state by
/// following the unique `w_i`-labeled arc backwards at every step.
pub fn reconstruct_trajectory<S: Clone + Eq + std::hash::Hash>(
    witness: &[FlawId],
    final_state: &S,
    d: &ExplicitDigraph<S>,
) -> Result<Vec<S>, StructureError> {
    let incoming = d.incoming();
    let mut cur = d
        .state_index(final_state)
        .ok_or(StructureError::UnknownState)?;
    let mut rev = vec![cur];
    for (pos, &w) in witness.iter().enumerate().rev() {
        let srcs = incoming.get(&(cur, w));
        cur = match srcs.map(|s| s.len()) {
            Some(1) => *srcs.unwrap().iter().next().unwrap(),
            Some(_) => {
                return Err(StructureError::AmbiguousSource {
                    position: pos,
                    flaw: w,
                })
            }
            None => {
                return Err(StructureError::NoIncomingArc {
                    position: pos,
                    flaw: w,
                })
            }
        };
        rev.push(cur);
    }
    Ok(rev.into_iter().rev().map(|i| d.states[i].clone()).collect())
}

/// Which flaw-selection rule produced a trace.
#[derive(Clone, Copy, Debug)]
pub enum Selection<'r> {
    Uniform,
    Recursion(RecursionFilter<'r>),
}

/// First step where a witness departs from the selection rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SelectionMismatch {
    /// 1-based step.
    pub step: usize,
    pub expected: Option<FlawId>,
    pub found: FlawId,
}

/// Replays the deterministic part of a walk over a given state sequence:
/// at every step the addressed flaw must be the one the walk would select in
/// that state. Combined with [`reconstruct_trajectory`] this detects
/// tampered witnesses.
pub fn replay_selection<P: Problem>(
    problem: &P,
    order: &FlawOrder,
    selection: Selection<'_>,
    states: &[P::State],
    witness: &[FlawId],
) -> Result<(), SelectionMismatch> {
    assert_eq!(states.len(), witness.len() + 1, "one more state than steps");
    let keeps = |f: FlawId, g: FlawId| match selection {
        Selection::Uniform | Selection::Recursion(RecursionFilter::Everything) => true,
        Selection::Recursion(RecursionFilter::Neighborhood) => problem.in_neighborhood(f, g),
        Selection::Recursion(RecursionFilter::Responsibility(r)) => r.contains(f, g),
    };
    let mut stack: Vec<FlawId> = Vec::new();
    for (i, &found) in witness.iter().enumerate() {
        let step = i as u64 + 1;
        let present = problem.flaws_present(&states[i]);
        let expected = match selection {
            Selection::Uniform => order.greatest(step, present.iter().copied()),
            Selection::Recursion(_) => loop {
                match stack.last() {
                    None => break order.greatest(step, present.iter().copied()),
                    Some(&f) => {
                        let pick =
                            order.greatest(step, present.iter().copied().filter(|&g| keeps(f, g)));
                        if pick.is_some() {
                            break pick;
                        }
                        stack.pop();
                    }
                }
            },
        };
        if expected != Some(found) {
            return Err(SelectionMismatch {
                step: i + 1,
                expected,
                found,
            });
        }
        stack.push(found);
    }
    Ok(())
}

/// `B₀*, …, B_{t−1}*` of a `t`-step trajectory.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BreakSequence {
    pub sets: Vec<BTreeSet<FlawId>>,
}

impl BreakSequence {
    /// Runs `E₁ = B₀*`, `E_{i+1} = (E_i − w_i) ∪ B_i*` with `w_i = I_{π_i}(E_i)`
    /// and returns `w₁ … w_t`.
    pub fn witness(&self, order: &FlawOrder) -> Result<Vec<FlawId>, StructureError> {
        let mut e: BTreeSet<FlawId> = BTreeSet::new();
        let mut out = Vec::with_capacity(self.sets.len());
        for (i, b) in self.sets.iter().enumerate() {
            e.extend(b.iter().copied());
            let w = order
                .greatest(i as u64 + 1, e.iter().copied())
                .ok_or(StructureError::EmptyFrontier { step: i + 1 })?;
            e.remove(&w);
            out.push(w);
        }
        Ok(out)
    }
}

fn check_states<P: Problem>(
    problem: &P,
    trace: &WalkTrace<P::State>,
    states: &[P::State],
) -> Result<(), StructureError> {
    if states.len() != trace.steps.len() + 1 {
        return Err(StructureError::InconsistentTrace { step: 0 });
    }
    if problem.digest(&states[0]) != trace.initial_digest {
        return Err(StructureError::InconsistentTrace { step: 0 });
    }
    for (i, rec) in trace.steps.iter().enumerate() {
        if problem.digest(&states[i + 1]) != rec.post_digest {
            return Err(StructureError::InconsistentTrace { step: i + 1 });
        }
    }
    Ok(())
}

/// Definition of the break sequence, computed from a complete run.
///
/// With `w_i` the flaw addressed at step `i` and `σ_i` the state before it:
/// `B₀ = U(σ₁)`, `B_i = U(σ_{i+1}) \ (U(σ_i) \ {w_i})`. From each `B_i` the
/// flaws that vanish before being addressed (`O_i`) and those that stay
/// present to the end without ever being addressed (`N_i`) are removed.
pub fn break_sequence<P: Problem>(
    problem: &P,
    trace: &WalkTrace<P::State>,
    states: &[P::State],
) -> Result<BreakSequence, StructureError> {
    check_states(problem, trace, states)?;
    let t = trace.steps.len();
    let w = trace.witness();
    let present: Vec<BTreeSet<FlawId>> = states
        .iter()
        .map(|s| problem.flaws_present(s).into_iter().collect())
        .collect();
    // present[k] = U(σ_{k+1}); w[k] = w_{k+1}
    let mut sets = Vec::with_capacity(t);
    for i in 0..t {
        let b: BTreeSet<FlawId> = if i == 0 {
            present[0].clone()
        } else {
            present[i]
                .iter()
                .copied()
                .filter(|&f| f == w[i - 1] || !present[i - 1].contains(&f))
                .collect()
        };
        let kept = b
            .into_iter()
            .filter(|&f| {
                // j runs over i+1..=t (1-based); w_j = w[j-1], U(σ_{j+1}) = present[j]
                for j in i + 1..=t {
                    if w[j - 1] == f {
                        return true;
                    }
                    if !present[j].contains(&f) {
                        return false; // O_i
                    }
                }
                false // N_i
            })
            .collect();
        sets.push(kept);
    }
    Ok(BreakSequence { sets })
}

/// Break forest construction: roots labeled `B₀*`; at step `i` the frontier
/// vertex with the greatest label under `π_i` is expanded with children
/// labeled `B_i*`. Verifies along the way that the frontier labels form a
/// set equal to `E_i`.
pub fn break_forest(
    bs: &BreakSequence,
    order: &FlawOrder,
) -> Result<WitnessForest, StructureError> {
    let mut forest = WitnessForest::new(ForestFlavor::Break);
    let mut frontier: BTreeMap<FlawId, usize> = BTreeMap::new();
    let mut e: BTreeSet<FlawId> = BTreeSet::new();
    let add = |forest: &mut WitnessForest,
               frontier: &mut BTreeMap<FlawId, usize>,
               label: FlawId,
               parent: Option<usize>,
               step: usize|
     -> Result<(), StructureError> {
        let id = forest.add(label, parent);
        if frontier.insert(label, id).is_some() {
            return Err(StructureError::DuplicateFrontier { step, flaw: label });
        }
        Ok(())
    };
    let Some(first) = bs.sets.first() else {
        return Ok(forest);
    };
    for &f in first {
        add(&mut forest, &mut frontier, f, None, 1)?;
    }
    e.extend(first.iter().copied());
    for step in 1..=bs.sets.len() {
        if !frontier.keys().copied().eq(e.iter().copied()) {
            return Err(StructureError::FrontierMismatch { step });
        }
        let w = order
            .greatest(step as u64, frontier.keys().copied())
            .ok_or(StructureError::EmptyFrontier { step })?;
        let node = frontier.remove(&w).expect("frontier label");
        e.remove(&w);
        if let Some(b) = bs.sets.get(step) {
            for &f in b {
                add(&mut forest, &mut frontier, f, Some(node), step + 1)?;
            }
            e.extend(b.iter().copied());
        }
    }
    Ok(forest)
}

/// Recovers the witness from a forest: frontier replay for break forests,
/// preorder with trees and children sorted greatest first otherwise.
pub fn forest_to_witness(
    forest: &WitnessForest,
    order: &FlawOrder,
) -> Result<Vec<FlawId>, StructureError> {
    if !forest.is_well_formed() {
        return Err(StructureError::MalformedForest);
    }
    match forest.flavor {
        ForestFlavor::Break => {
            let mut frontier: BTreeMap<FlawId, usize> = BTreeMap::new();
            for &r in &forest.roots {
                if frontier.insert(forest.nodes[r].label, r).is_some() {
                    return Err(StructureError::DuplicateFrontier {
                        step: 1,
                        flaw: forest.nodes[r].label,
                    });
                }
            }
            let mut out = Vec::with_capacity(forest.len());
            let mut step = 1u64;
            while let Some(w) = order.greatest(step, frontier.keys().copied()) {
                let node = frontier.remove(&w).expect("frontier label");
                out.push(w);
                step += 1;
                for &c in &forest.nodes[node].children {
                    let label = forest.nodes[c].label;
                    if frontier.insert(label, c).is_some() {
                        return Err(StructureError::DuplicateFrontier {
                            step: step as usize,
                            flaw: label,
                        });
                    }
                }
            }
            Ok(out)
        }
        ForestFlavor::Recursive | ForestFlavor::LeftHanded => {
            if !order.is_fixed() {
                return Err(StructureError::OrderNotFixed);
            }
            let sorted = |ids: &[usize]| {
                let mut v = ids.to_vec();
                v.sort_by_key(|&n| std::cmp::Reverse(order.key(0, forest.nodes[n].label)));
                v
            };
            let mut out = Vec::with_capacity(forest.len());
            let mut stack: Vec<usize> = sorted(&forest.roots);
            stack.reverse();
            while let Some(n) = stack.pop() {
                out.push(forest.nodes[n].label);
                let mut kids = sorted(&forest.nodes[n].children);
                kids.reverse();
                stack.extend(kids);
            }
            Ok(out)
        }
    }
}

/// A breach of the responsibility-digraph rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResponsibilityViolation {
    /// The base order is not a permutation of all flaws.
    BaseOrder,
    /// A forward arc or self-loop of `C` is absent from `R`.
    MissingArc { from: FlawId, to: FlawId },
    /// `v_j → v_i` was dropped, `v_k → v_j ∈ R`, but `v_k → v_i ∉ R`.
    Transfer { k: FlawId, j: FlawId, i: FlawId },
}

/// Checks both rules of a responsibility digraph against `C`; returns the
/// first violation found.
pub fn validate_responsibility(
    r: &ResponsibilityDigraph,
    c: &CausalityDigraph,
) -> Result<(), ResponsibilityViolation> {
    let n = c.flaw_count as usize;
    let mut rank = vec![usize::MAX; n];
    if r.base_order.len() != n {
        return Err(ResponsibilityViolation::BaseOrder);
    }
    for (pos, f) in r.base_order.iter().enumerate() {
        match rank.get_mut(f.index()) {
            Some(slot) if *slot == usize::MAX => *slot = pos,
            _ => return Err(ResponsibilityViolation::BaseOrder),
        }
    }
    for (from, to) in c.iter() {
        if rank[to.index()] >= rank[from.index()] && !r.contains(from, to) {
            return Err(ResponsibilityViolation::MissingArc { from, to });
        }
    }
    for (j, i) in c.iter() {
        if rank[i.index()] < rank[j.index()] && !r.contains(j, i) {
            for (&k, outs) in &r.arcs {
                if outs.contains(&j) && !r.contains(k, i) {
                    return Err(ResponsibilityViolation::Transfer { k, j, i });
                }
            }
        }
    }
    Ok(())
}

/// Whether every sibling group of a recursive forest is independent in `g`.
pub fn siblings_independent(
    forest: &WitnessForest,
    g: &dyn crate::conditions::FlawAdjacency,
) -> bool {
    forest.sibling_groups().all(|grp| {
        grp.iter()
            .enumerate()
            .all(|(a, &x)| grp[a + 1..].iter().all(|&y| x != y && !g.adjacent(x, y)))
    })
}
