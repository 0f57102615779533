//! Fixtures shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeMap;

use flawwalk::apps::{ColorBlindProblem, SimpleGraph};
use flawwalk::conditions::{ChargeVector, ConditionReport};
use flawwalk::table::TableProblem;
use flawwalk::{FlawId, ResponsibilityDigraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Three flaws in a chain: addressing 0 may keep 0 or introduce 1,
/// addressing 1 may introduce 0 or 2, and flaw 2 only leads to sinks.
/// Causality is `{0→0, 0→1, 1→0, 1→2}` with amenabilities `(2, 2, 4)`.
pub fn chain_toy() -> TableProblem {
    TableProblem::builder(6, 3)
        .initial(0)
        .present(0, &[0])
        .present(1, &[1])
        .present(2, &[0])
        .present(3, &[2])
        .actions(0, 0, &[2, 1])
        .actions(2, 0, &[4, 1])
        .actions(1, 1, &[0, 3])
        .actions(3, 2, &[4, 4, 5, 5])
        .neighbors(0, &[0, 1])
        .neighbors(1, &[0, 2])
        .build()
        .expect("chain toy is well formed")
}

/// The chain's causality minus the backward arc `1→0`, over the identity order.
pub fn chain_responsibility() -> ResponsibilityDigraph {
    let mut r = ResponsibilityDigraph::new(vec![FlawId(0), FlawId(1), FlawId(2)]);
    r.insert(FlawId(0), FlawId(0));
    r.insert(FlawId(0), FlawId(1));
    r.insert(FlawId(1), FlawId(2));
    r
}

/// Charges under which the left-handed criterion holds on [`chain_toy`].
pub fn chain_charges() -> ChargeVector {
    ChargeVector::PerFlaw(vec![400.0, 0.75, 0.32])
}

/// A configuration of `k` flaws, all present initially, with the given
/// neighborhoods and amenabilities. Its transition digraph has no
/// causality arcs, so any declared neighborhoods are sound.
pub fn configuration(neighborhoods: &[Vec<u64>], amenability: &[u64]) -> TableProblem {
    let k = neighborhoods.len() as u64;
    let all: Vec<u64> = (0..k).collect();
    let mut b = TableProblem::builder(2, k).initial(0).present(0, &all);
    for f in 0..k {
        b = b.actions(0, f, &[1]);
    }
    let mut p = b.build().expect("configuration is well formed");
    for f in 0..k {
        let nb = neighborhoods[f as usize]
            .iter()
            .map(|&g| FlawId(g))
            .collect();
        p.set_neighborhood(FlawId(f), nb);
        p.set_amenability(FlawId(f), amenability[f as usize]);
    }
    p
}

/// Random neighborhoods of at most `max_gamma` flaws among `k`, and
/// amenabilities in `amen_range`.
pub fn random_configuration(
    seed: u64,
    k: u64,
    max_gamma: usize,
    amen_range: std::ops::RangeInclusive<u64>,
) -> TableProblem {
    let mut r = rng(seed);
    let mut nbs = Vec::new();
    let mut amen = Vec::new();
    for _ in 0..k {
        let size = r.gen_range(0..=max_gamma.min(k as usize));
        let mut all: Vec<u64> = (0..k).collect();
        for i in 0..size {
            let j = r.gen_range(i..all.len());
            all.swap(i, j);
        }
        let mut nb = all[..size].to_vec();
        nb.sort_unstable();
        nbs.push(nb);
        amen.push(r.gen_range(amen_range.clone()));
    }
    configuration(&nbs, &amen)
}

/// Log-uniform charges in `[lo, hi]`.
pub fn random_charges(seed: u64, k: u64, lo: f64, hi: f64) -> ChargeVector {
    let mut r = rng(seed);
    ChargeVector::PerFlaw(
        (0..k)
            .map(|_| (lo.ln() + r.gen::<f64>() * (hi.ln() - lo.ln())).exp())
            .collect(),
    )
}

pub fn theta_map(report: &ConditionReport) -> BTreeMap<FlawId, f64> {
    report.theta.iter().map(|e| (e.flaw, e.theta)).collect()
}

/// Small graphs for the color-blind instances whose full state space stays
/// under `6^4` colorings.
pub fn colorblind_small() -> Vec<ColorBlindProblem> {
    let shapes: [(usize, &[(u32, u32)]); 5] = [
        (3, &[(0, 1), (1, 2), (0, 2)]),
        (4, &[(0, 1), (1, 2), (2, 3)]),
        (4, &[(0, 1), (1, 2), (2, 3), (0, 3)]),
        (5, &[(0, 1), (1, 2), (2, 3), (3, 4)]),
        (4, &[(0, 1), (1, 2), (0, 2), (2, 3)]),
    ];
    shapes
        .iter()
        .map(|(n, e)| ColorBlindProblem::new(SimpleGraph::new(*n, e).unwrap()).unwrap())
        .collect()
}

/// A random graph on at most `max_n` vertices with no isolated edge.
pub fn random_graph_without_k2(seed: u64, max_n: usize) -> SimpleGraph {
    let mut r = rng(seed);
    loop {
        let n = r.gen_range(2..=max_n);
        let p = r.gen_range(0.2..0.8);
        let g = SimpleGraph::random(n, p, r.gen());
        let isolated_edge = g
            .edges()
            .iter()
            .any(|&(a, b)| g.degree(a) == 1 && g.degree(b) == 1);
        if !isolated_edge {
            return g;
        }
    }
}
