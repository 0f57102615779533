//! The flaw/action interface every instance implements.

use std::fmt;
use std::hash::Hash;

use crate::digest::fnv1a64;

/// Dense index into an instance's flaw universe.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct FlawId(pub u64);

impl FlawId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for FlawId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for FlawId {
    fn from(v: u64) -> Self {
        FlawId(v)
    }
}

/// A group of flaws sharing one amenability value inside some neighborhood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileEntry {
    pub amenability: u64,
    pub count: u64,
}

/// Closed-form description of a neighborhood as a union of cliques of `G`.
///
/// `Explicit` lists the members of each clique. `Counted` only carries an upper
/// bound on each clique's size; checkers then bound the clique's charge mass
/// by `size * max_charge`.
#[derive(Clone, Debug, PartialEq)]
pub enum CliqueCover {
    Explicit(Vec<Vec<FlawId>>),
    Counted(Vec<u64>),
}

/// Flaws that are interchangeable for condition checking: equal amenability and
/// neighborhoods with equal profiles. `representative` is one member.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FlawClass {
    pub representative: FlawId,
    pub size: u64,
}

/// A combinatorial search space together with flaws and the actions that
/// address them.
///
/// Implementations must be pure: every method is a function of its arguments
/// and the (immutable) instance.
pub trait Problem {
    type State: Clone + Eq + Hash + fmt::Debug;

    fn initial_state(&self) -> Self::State;

    fn flaw_count(&self) -> u64;

    /// Flaws present in `state`, sorted by id.
    fn flaws_present(&self, state: &Self::State) -> Vec<FlawId>;

    /// `|A(f, state)|`. Only called with `f` present in `state`.
    fn action_count(&self, flaw: FlawId, state: &Self::State) -> u64;

    /// The `index`-th element of `A(f, state)` under the instance's fixed enumeration.
    fn apply_action(&self, flaw: FlawId, state: &Self::State, index: u64) -> Self::State;

    /// Minimum of `action_count(flaw, s)` over all states containing the flaw.
    fn amenability(&self, flaw: FlawId) -> u64;

    /// Declared neighborhood in the causality digraph, sorted by id.
    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId>;

    /// Whether `other` belongs to `neighborhood(flaw)`.
    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        self.neighborhood(flaw).binary_search(&other).is_ok()
    }

    fn log2_state_space(&self) -> f64;

    /// Canonical byte serialization used for digests.
    fn encode_state(&self, state: &Self::State, out: &mut Vec<u8>);

    fn digest(&self, state: &Self::State) -> u64 {
        let mut buf = Vec::new();
        self.encode_state(state, &mut buf);
        fnv1a64(&buf)
    }

    /// Amenability profile of `neighborhood(flaw)`, possibly over-approximated
    /// (counts may exceed the true ones, never the reverse).
    fn neighborhood_profile(&self, _flaw: FlawId) -> Option<Vec<ProfileEntry>> {
        None
    }

    /// Clique cover of `neighborhood(flaw)` in `G`.
    fn clique_cover(&self, _flaw: FlawId) -> Option<CliqueCover> {
        None
    }

    /// Clique cover of a set of flaws present together (used to bound the
    /// largest independent subset of `U(σ₁)`).
    fn root_clique_cover(&self, _present: &[FlawId]) -> Option<Vec<Vec<FlawId>>> {
        None
    }

    /// Partition of the flaw universe into interchangeable classes.
    fn flaw_classes(&self) -> Option<Vec<FlawClass>> {
        None
    }

    /// Every state of `Ω`, when small enough to list.
    fn enumerate_states(&self) -> Option<Vec<Self::State>> {
        None
    }
}

impl<P: Problem + ?Sized> Problem for &P {
    type State = P::State;

    fn initial_state(&self) -> Self::State {
        (**self).initial_state()
    }
    fn flaw_count(&self) -> u64 {
        (**self).flaw_count()
    }
    fn flaws_present(&self, state: &Self::State) -> Vec<FlawId> {
        (**self).flaws_present(state)
    }
    fn action_count(&self, flaw: FlawId, state: &Self::State) -> u64 {
        (**self).action_count(flaw, state)
    }
    fn apply_action(&self, flaw: FlawId, state: &Self::State, index: u64) -> Self::State {
        (**self).apply_action(flaw, state, index)
    }
    fn amenability(&self, flaw: FlawId) -> u64 {
        (**self).amenability(flaw)
    }
    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId> {
        (**self).neighborhood(flaw)
    }
    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        (**self).in_neighborhood(flaw, other)
    }
    fn log2_state_space(&self) -> f64 {
        (**self).log2_state_space()
    }
    fn encode_state(&self, state: &Self::State, out: &mut Vec<u8>) {
        (**self).encode_state(state, out)
    }
    fn digest(&self, state: &Self::State) -> u64 {
        (**self).digest(state)
    }
    fn neighborhood_profile(&self, flaw: FlawId) -> Option<Vec<ProfileEntry>> {
        (**self).neighborhood_profile(flaw)
    }
    fn clique_cover(&self, flaw: FlawId) -> Option<CliqueCover> {
        (**self).clique_cover(flaw)
    }
    fn root_clique_cover(&self, present: &[FlawId]) -> Option<Vec<Vec<FlawId>>> {
        (**self).root_clique_cover(present)
    }
    fn flaw_classes(&self) -> Option<Vec<FlawClass>> {
        (**self).flaw_classes()
    }
    fn enumerate_states(&self) -> Option<Vec<Self::State>> {
        (**self).enumerate_states()
    }
}
