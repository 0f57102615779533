//! Focused random walks that search for flawless objects.
//!
//! An instance declares a state space, a family of *flaws* (sets of bad
//! states) and, for every flaw present in a state, a list of *actions*
//! (candidate next states). The walks in [`engine`] repeatedly pick a present
//! flaw according to a [`FlawOrder`] and move to a uniformly random action.
//! [`conditions`] evaluates sufficient conditions under which these walks
//! reach a flawless state quickly and turns them into step budgets;
//! [`structure`] brute-forces the structural properties those conditions rely
//! on for small instances. [`apps`] holds four concrete instances.

pub mod apps;
pub mod conditions;
pub mod digest;
pub mod engine;
pub mod forest;
pub mod order;
pub mod problem;
pub mod structure;
pub mod table;

pub use engine::{
    run_lefthanded, run_recursive, run_uniform, Outcome, RecursionFilter, ResponsibilityDigraph,
    StepRecord, WalkError, WalkOptions, WalkTrace, Walker,
};
pub use forest::{ForestFlavor, WitnessForest};
pub use order::FlawOrder;
pub use problem::{CliqueCover, FlawClass, FlawId, Problem, ProfileEntry};
