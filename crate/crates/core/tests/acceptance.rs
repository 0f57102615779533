//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false`; run with `cargo test --test acceptance`.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use flawwalk::apps::colorblind::{class_bound, class_bound_estimate, palette};
use flawwalk::apps::{
    ColorBlindProblem, ColorMatrix, ColoringProblem, EdgeColoredComplete, LatinProblem,
    MatchingProblem, SimpleGraph,
};
use flawwalk::conditions::{
    check_asymmetric, check_cluster, check_symmetric, expand_asymmetric, step_budget, ChargeVector,
    CheckOptions, DeclaredGraph,
};
use flawwalk::structure::{
    break_forest, break_sequence, derive_causality, enumerate_full, forest_to_witness,
    reconstruct_trajectory, replay_selection, sample_digraph, siblings_independent,
    verify_atomicity, ExplicitDigraph, Selection,
};
use flawwalk::table::TableProblem;
use flawwalk::{
    FlawId, FlawOrder, Problem, RecursionFilter, ResponsibilityDigraph, WalkTrace, Walker,
};
use rand::Rng;

use common::*;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn median(v: &mut [u64]) -> u64 {
    v.sort_unstable();
    v[v.len() / 2]
}

// 1 ------------------------------------------------------------------------

fn latin_instance(n: usize, seed: u64) -> LatinProblem {
    let delta = 27 * n / 256;
    LatinProblem::new(ColorMatrix::random(n, delta, seed).unwrap()).unwrap()
}

/// Steps of recursive runs on fresh instances; panics on an invalid sink.
fn latin_runs(
    n: usize,
    seeds: std::ops::Range<u64>,
    s: u32,
) -> Result<(u64, Vec<u64>, usize), String> {
    let order = FlawOrder::ById;
    let mut steps = Vec::new();
    let mut sinks = 0;
    let mut budget = 0;
    for seed in seeds {
        let p = latin_instance(n, seed);
        let mu = ChargeVector::Uniform(p.recommended_charge().unwrap());
        let report = check_cluster(&p, &mu, &DeclaredGraph(&p), &CheckOptions::default())
            .map_err(|e| e.to_string())?;
        budget = step_budget(&report, s).map_err(|e| e.to_string())?;
        let (trace, _) = Walker::new(&p, &order)
            .recursive(budget, seed)
            .map_err(|e| e.to_string())?;
        if trace.is_sink() {
            p.validate_solution(trace.final_state())
                .map_err(|v| format!("n={n} seed {seed}: sink is not a transversal: {v}"))?;
            sinks += 1;
        }
        steps.push(trace.len() as u64);
    }
    Ok((budget, steps, sinks))
}

fn criterion_1() -> Outcome {
    let n = 256usize;
    let delta = 27usize;
    let p = latin_instance(n, 0);
    ensure(p.delta() == delta, || {
        format!("generated Δ = {}", p.delta())
    })?;
    let mu = ChargeVector::Uniform(1.0 / (3.0 * n as f64 * (delta - 1) as f64));
    let report = check_cluster(&p, &mu, &DeclaredGraph(&p), &CheckOptions::default())
        .map_err(|e| e.to_string())?;
    let expected = (256.0 / 27.0) * (delta - 1) as f64 / (n - 1) as f64;
    ensure(report.holds, || {
        format!("cluster fails, max θ = {}", report.max_theta)
    })?;
    ensure(close(report.max_theta, expected, 1e-9), || {
        format!("θ = {} but closed form gives {expected}", report.max_theta)
    })?;

    let (budget, mut steps, sinks) = latin_runs(n, 0..50, 40)?;
    ensure(sinks >= 49, || format!("only {sinks}/50 sinks"))?;
    let med = median(&mut steps);
    ensure(med <= budget, || {
        format!("median {med} above budget {budget}")
    })?;

    // medians of a handful of steps are too coarse at small n; the mean is
    // compared against n ln n instead
    let mean = |v: &[u64]| v.iter().sum::<u64>() as f64 / v.len() as f64;
    let mut ratios = Vec::new();
    for m in [64usize, 128] {
        let (_, st, sk) = latin_runs(m, 100..150, 40)?;
        ensure(sk >= 49, || format!("n={m}: only {sk}/50 sinks"))?;
        ratios.push(mean(&st) / (m as f64 * (m as f64).ln()));
    }
    ratios.push(mean(&steps) / (n as f64 * (n as f64).ln()));
    let (lo, hi) = ratios
        .iter()
        .fold((f64::MAX, 0f64), |(a, b), &r| (a.min(r), b.max(r)));
    ensure(hi / lo <= 3.0, || {
        format!("mean/(n ln n) ratios {ratios:?} spread beyond 3x")
    })?;
    Ok(format!(
        "θ = {:.6}, {sinks}/50 sinks, median {med} ≤ budget {budget}, mean/(n ln n) at n = 64, 128, 256: {:?}",
        report.max_theta,
        ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>()
    ))
}

// 2 ------------------------------------------------------------------------

fn criterion_2() -> Outcome {
    let (vertices, q) = (60usize, 5usize);
    let half = (vertices / 2) as f64;
    let bound = 2.0 * (q as f64 - 1.0) / (half - 3.0);
    ensure(bound < (-1f64).exp(), || {
        format!("bound {bound} not below 1/e")
    })?;
    let order = FlawOrder::ById;
    let mut sinks = 0;
    let mut budget = 0;
    let mut worst: f64 = 0.0;
    for seed in 0..50u64 {
        let p =
            MatchingProblem::new(EdgeColoredComplete::random(vertices, q, seed).unwrap()).unwrap();
        let report = check_symmetric(&p, &CheckOptions::default()).map_err(|e| e.to_string())?;
        ensure(report.holds, || {
            format!("seed {seed}: symmetric check fails")
        })?;
        let sum = report.max_theta / std::f64::consts::E;
        worst = worst.max(sum);
        ensure(sum <= bound * (1.0 + 1e-12), || {
            format!("seed {seed}: Σ 1/A = {sum} above {bound}")
        })?;
        budget = step_budget(&report, 40).map_err(|e| e.to_string())?;
        let trace = Walker::new(&p, &order)
            .uniform(budget, seed)
            .map_err(|e| e.to_string())?;
        if trace.is_sink() {
            p.validate_solution(trace.final_state())
                .map_err(|v| format!("seed {seed}: invalid matching: {v}"))?;
            sinks += 1;
        }
    }
    ensure(sinks >= 49, || format!("only {sinks}/50 sinks"))?;
    Ok(format!(
        "max Σ 1/A = {worst:.4} ≤ 8/27, {sinks}/50 validated sinks within budget {budget}"
    ))
}

// 3 ------------------------------------------------------------------------

fn criterion_3() -> Outcome {
    let mut checked = Vec::new();
    for (vertices, q) in [(6usize, 2usize), (6, 3), (8, 2), (8, 3)] {
        for seed in 0..3 {
            let g = EdgeColoredComplete::random(vertices, q, seed).unwrap();
            let p = MatchingProblem::new_unchecked(g);
            let d = enumerate_full(&p, 1 << 16).map_err(|e| e.to_string())?;
            verify_atomicity(&d).map_err(|v| format!("matching 2n={vertices} q={q}: {v:?}"))?;
            checked.push(d.state_count());
        }
    }
    for seed in 0..5 {
        let p = LatinProblem::new(ColorMatrix::random(4, 2, seed).unwrap()).unwrap();
        let d = enumerate_full(&p, 1 << 16).map_err(|e| e.to_string())?;
        ensure(d.state_count() == 24, || {
            "Latin n=4 must have 24 states".into()
        })?;
        verify_atomicity(&d).map_err(|v| format!("Latin n=4 seed {seed}: {v:?}"))?;
    }
    // two states reach state 2 by addressing flaw 0
    let planted = TableProblem::builder(3, 1)
        .present(0, &[0])
        .present(1, &[0])
        .actions(0, 0, &[2])
        .actions(1, 0, &[2])
        .build()
        .unwrap();
    let d = enumerate_full(&planted, 16).map_err(|e| e.to_string())?;
    match verify_atomicity(&d) {
        Ok(()) => return Err("planted violation not reported".into()),
        Err(v) => {
            let mut srcs = [d.states[v.src1], d.states[v.src2]];
            srcs.sort_unstable();
            ensure(
                v.flaw == FlawId(0) && d.states[v.dst] == 2 && srcs == [0, 1],
                || format!("wrong counterexample {v:?}"),
            )?;
        }
    }
    Ok(format!(
        "matching state spaces {checked:?} and Latin n=4 atomic; planted fixture rejected"
    ))
}

// 4 ------------------------------------------------------------------------

/// Whether a tampered witness is told apart from the recorded run.
fn mutation_detected<P: Problem>(
    p: &P,
    order: &FlawOrder,
    selection: Selection<'_>,
    d: &ExplicitDigraph<P::State>,
    trace: &WalkTrace<P::State>,
    witness: &[FlawId],
) -> bool
where
    P::State: Clone + Eq + std::hash::Hash,
{
    match reconstruct_trajectory(witness, trace.final_state(), d) {
        Err(_) => true,
        Ok(states) => {
            states[0] != p.initial_state()
                || states[1..]
                    .iter()
                    .zip(&trace.steps)
                    .any(|(s, r)| p.digest(s) != r.post_digest)
                || replay_selection(p, order, selection, &states, witness).is_err()
        }
    }
}

/// Runs `runs` traced walks (half uniform, half recursive), checks exact
/// reconstruction and that every single-position mutation is detected.
fn reconstruct_runs<P: Problem>(
    instances: &[P],
    runs: u64,
    seed_base: u64,
) -> Result<(u64, u64), String>
where
    P::State: Clone + Eq + std::hash::Hash + std::fmt::Debug,
{
    let order = FlawOrder::ById;
    let digraphs: Vec<_> = instances
        .iter()
        .map(|p| enumerate_full(p, 1 << 18).map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()?;
    let mut mutations = 0;
    let mut total_steps = 0;
    for run in 0..runs {
        let seed = seed_base + run;
        let k = (run as usize) % instances.len();
        let (p, d) = (&instances[k], &digraphs[k]);
        let walker = Walker::new(p, &order).record_states(true);
        let (trace, selection) = if run % 2 == 0 {
            (walker.uniform(40, seed), Selection::Uniform)
        } else {
            (
                walker.recursive(40, seed).map(|(t, _)| t),
                Selection::Recursion(RecursionFilter::Neighborhood),
            )
        };
        let trace = trace.map_err(|e| e.to_string())?;
        let witness = trace.witness();
        total_steps += witness.len() as u64;
        let states = reconstruct_trajectory(&witness, trace.final_state(), d)
            .map_err(|e| format!("run {run}: {e}"))?;
        ensure(Some(&states) == trace.states.as_ref(), || {
            format!("run {run}: reconstructed states differ")
        })?;
        if witness.is_empty() {
            continue;
        }
        let mut r = rng(seed ^ 0x5eed);
        let i = r.gen_range(0..witness.len());
        let present: Vec<FlawId> = p
            .flaws_present(&states[i])
            .into_iter()
            .filter(|&g| g != witness[i])
            .collect();
        let replacement = if !present.is_empty() && r.gen_bool(0.7) {
            present[r.gen_range(0..present.len())]
        } else {
            loop {
                let g = FlawId(r.gen_range(0..p.flaw_count()));
                if g != witness[i] || p.flaw_count() == 1 {
                    break g;
                }
            }
        };
        if replacement == witness[i] {
            continue;
        }
        let mut mutated = witness.clone();
        mutated[i] = replacement;
        mutations += 1;
        ensure(
            mutation_detected(p, &order, selection, d, &trace, &mutated),
            || format!("run {run}: mutation at {i} to {replacement} undetected"),
        )?;
    }
    Ok((mutations, total_steps))
}

fn criterion_4() -> Outcome {
    let latin: Vec<LatinProblem> = (0..6)
        .map(|s| LatinProblem::new(ColorMatrix::random(4, 2, s).unwrap()).unwrap())
        .collect();
    let matching: Vec<MatchingProblem> = (0..4)
        .map(|s| MatchingProblem::new(EdgeColoredComplete::random(8, 3, s).unwrap()).unwrap())
        .collect();
    let coloring: Vec<ColoringProblem> = (0..8)
        .map(|s| {
            let g = SimpleGraph::random(5, 0.5, s);
            let q = g.max_degree() as u32 + 1;
            ColoringProblem::new(g, q).unwrap()
        })
        .collect();
    let colorblind: Vec<ColorBlindProblem> = colorblind_small();
    let mut mutations = 0;
    let mut steps = 0;
    for (m, s) in [
        reconstruct_runs(&latin, 250, 0)?,
        reconstruct_runs(&matching, 250, 1000)?,
        reconstruct_runs(&coloring, 250, 2000)?,
        reconstruct_runs(&colorblind, 250, 3000)?,
    ] {
        mutations += m;
        steps += s;
    }
    Ok(format!(
        "1000 runs ({steps} steps) reconstructed exactly; {mutations} mutations all detected"
    ))
}

// 5 ------------------------------------------------------------------------

fn criterion_5() -> Outcome {
    let opts = CheckOptions::default();
    let mut worst_rel: f64 = 0.0;
    for seed in 0..500u64 {
        let k = 4 + seed % 11;
        let p = random_configuration(seed, k, 12, 1..=40);
        let mu = random_charges(seed + 7, k, 1e-3, 3.0);
        let asym = check_asymmetric(&p, &mu, &opts).map_err(|e| e.to_string())?;
        let expanded = expand_asymmetric(&p, &mu, &opts).map_err(|e| e.to_string())?;
        let cluster =
            check_cluster(&p, &mu, &DeclaredGraph(&p), &opts).map_err(|e| e.to_string())?;
        let a = theta_map(&asym);
        let c = theta_map(&cluster);
        for (f, &ta) in &a {
            let te = expanded[f];
            worst_rel = worst_rel.max((ta - te).abs() / ta.abs());
            ensure(close(ta, te, 1e-12), || {
                format!("config {seed} flaw {f}: product {ta} vs expansion {te}")
            })?;
            ensure(c[f] <= ta * (1.0 + 1e-12), || {
                format!(
                    "config {seed} flaw {f}: cluster {} above asymmetric {ta}",
                    c[f]
                )
            })?;
        }
    }

    let mut holding = 0;
    let mut seed = 10_000u64;
    while holding < 100 {
        seed += 1;
        let k = 3 + seed % 10;
        let p = random_configuration(seed, k, 5, 8..=200);
        let sym = check_symmetric(&p, &opts).map_err(|e| e.to_string())?;
        if !sym.holds {
            continue;
        }
        holding += 1;
        let mu = ChargeVector::from_symmetric(&p, &opts).map_err(|e| e.to_string())?;
        let asym = check_asymmetric(&p, &mu, &opts).map_err(|e| e.to_string())?;
        ensure(asym.holds, || {
            format!(
                "config {seed}: symmetric holds but constructed charges give θ = {}",
                asym.max_theta
            )
        })?;
    }
    Ok(format!(
        "500 configs: worst relative gap {worst_rel:.2e}, cluster ≤ asymmetric; 100 symmetric configs carried over"
    ))
}

// 6 ------------------------------------------------------------------------

struct ForestTally {
    runs: u64,
    recursive: u64,
    lefthanded: u64,
}

fn forest_runs<P: Problem>(
    p: &P,
    runs: u64,
    seed_base: u64,
    responsibility: Option<&ResponsibilityDigraph>,
    tally: &mut ForestTally,
) -> Result<(), String> {
    let orders = [
        FlawOrder::ById,
        FlawOrder::PerStep { seed: seed_base },
        FlawOrder::from_permutation(&(0..p.flaw_count()).rev().map(FlawId).collect::<Vec<_>>())
            .unwrap(),
    ];
    for run in 0..runs {
        let seed = seed_base + run;
        let order = &orders[(run % 3) as usize];
        let walker = Walker::new(p, order).record_states(true);
        let trace = walker.uniform(60, seed).map_err(|e| e.to_string())?;
        let states = trace.states.clone().unwrap();
        let bs = break_sequence(p, &trace, &states).map_err(|e| e.to_string())?;
        let forest = break_forest(&bs, order).map_err(|e| format!("seed {seed}: {e}"))?;
        let back = forest_to_witness(&forest, order).map_err(|e| e.to_string())?;
        ensure(back == trace.witness(), || {
            format!("seed {seed}: break round trip changed the witness")
        })?;
        tally.runs += 1;

        let fixed = if order.is_fixed() { order } else { &orders[0] };
        let walker = Walker::new(p, fixed).check_invariants(true);
        let (rt, rf) = walker.recursive(60, seed).map_err(|e| e.to_string())?;
        ensure(siblings_independent(&rf, &DeclaredGraph(p)), || {
            format!("seed {seed}: recursive siblings adjacent in G")
        })?;
        ensure(
            forest_to_witness(&rf, fixed).ok() == Some(rt.witness()),
            || format!("seed {seed}: recursive preorder differs from the witness"),
        )?;
        tally.recursive += 1;

        if let Some(r) = responsibility {
            let (lt, lf) = Walker::new(p, &orders[0])
                .check_invariants(true)
                .lefthanded(r, 60, seed)
                .map_err(|e| e.to_string())?;
            ensure(lf.siblings_distinct(), || {
                format!("seed {seed}: left-handed siblings repeat a label")
            })?;
            ensure(
                forest_to_witness(&lf, &orders[0]).ok() == Some(lt.witness()),
                || format!("seed {seed}: left-handed preorder differs from the witness"),
            )?;
            tally.lefthanded += 1;
        }
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut tally = ForestTally {
        runs: 0,
        recursive: 0,
        lefthanded: 0,
    };
    for s in 0..4 {
        let p = LatinProblem::new(ColorMatrix::random(6, 2, s).unwrap()).unwrap();
        forest_runs(&p, 40, s * 100, None, &mut tally)?;
        let p = MatchingProblem::new(EdgeColoredComplete::random(10, 3, s).unwrap()).unwrap();
        forest_runs(&p, 40, 10_000 + s * 100, None, &mut tally)?;
        let g = SimpleGraph::random(12, 0.4, s);
        let q = g.max_degree() as u32 + 1;
        forest_runs(
            &ColoringProblem::new(g, q).unwrap(),
            40,
            20_000 + s * 100,
            None,
            &mut tally,
        )?;
    }
    for (i, p) in colorblind_small().iter().enumerate() {
        forest_runs(p, 40, 30_000 + i as u64 * 100, None, &mut tally)?;
    }
    for s in 0..28u64 {
        let p = TableProblem::random(s, 30, 6, 0.3, 4);
        let r = ResponsibilityDigraph::from_declared(&p);
        forest_runs(&p, 10, 40_000 + s * 100, Some(&r), &mut tally)?;
    }
    forest_runs(
        &chain_toy(),
        40,
        50_000,
        Some(&chain_responsibility()),
        &mut tally,
    )?;
    ensure(tally.runs >= 1000, || format!("only {} runs", tally.runs))?;
    Ok(format!(
        "{} break round trips, {} recursive and {} left-handed forests checked",
        tally.runs, tally.recursive, tally.lefthanded
    ))
}

// 7 ------------------------------------------------------------------------

fn palette_oracle(colors: &[u8]) -> [u8; 6] {
    let mut sorted = colors.to_vec();
    sorted.sort_unstable();
    let mut counts: Vec<u8> = sorted
        .chunk_by(|a, b| a == b)
        .map(|c| c.len() as u8)
        .collect();
    counts.resize(6, 0);
    counts.sort_unstable();
    counts.try_into().unwrap()
}

fn criterion_7() -> Outcome {
    for d in 1..=12u32 {
        let f = class_bound(d) as f64;
        let bound = class_bound_estimate(d);
        ensure(f < bound, || format!("f({d}) = {f} not below {bound}"))?;
    }
    let mut r = rng(7);
    for trial in 0..10_000 {
        let d = r.gen_range(1..=24);
        let colors: Vec<u8> = (0..d).map(|_| r.gen_range(0..6)).collect();
        ensure(
            palette(colors.iter().copied()) == palette_oracle(&colors),
            || format!("trial {trial}: palette of {colors:?}"),
        )?;
    }
    let mut flaws_seen = 0;
    for seed in 0..300u64 {
        let g = random_graph_without_k2(seed, 8);
        let p = ColorBlindProblem::new(g.clone()).map_err(|e| e.to_string())?;
        let mut r = rng(seed + 1);
        for _ in 0..20 {
            let s: Vec<u8> = (0..g.edge_count()).map(|_| r.gen_range(0..6)).collect();
            let mut flagged: Vec<(u32, u32)> = p
                .flaws_present(&s)
                .into_iter()
                .map(|f| {
                    let (u, v, _) = p.decode(f);
                    (u, v)
                })
                .collect();
            let n = flagged.len();
            flagged.dedup();
            ensure(flagged.len() == n, || {
                "an edge carries two present flaws".into()
            })?;
            let expected: Vec<(u32, u32)> = g
                .edges()
                .iter()
                .copied()
                .filter(|&(u, v)| {
                    let pal = |x: u32| {
                        let cs: Vec<u8> = g
                            .edges()
                            .iter()
                            .enumerate()
                            .filter(|(_, &(a, b))| a == x || b == x)
                            .map(|(e, _)| s[e])
                            .collect();
                        palette_oracle(&cs)
                    };
                    g.degree(u) == g.degree(v) && pal(u) == pal(v)
                })
                .collect();
            ensure(flagged == expected, || {
                format!("graph {seed}: flagged {flagged:?}, expected {expected:?}")
            })?;
            flaws_seen += n;
        }
    }
    Ok(format!(
        "f(d) < 1572·6^d/d^2.5 for d ≤ 12; 10^4 palettes match; 6000 colorings ({flaws_seen} flaws) agree"
    ))
}

// 8 ------------------------------------------------------------------------

fn criterion_8() -> Outcome {
    let order = FlawOrder::ById;
    let mut longest = 0.0f64;
    for seed in 0..100u64 {
        let mut r = rng(seed);
        let n = r.gen_range(1..=50);
        let g = SimpleGraph::random(n, r.gen_range(0.05..0.5), seed);
        let q = g.max_degree() as u32 + 1;
        let p = ColoringProblem::new(g.clone(), q).unwrap();
        let samples: Vec<Vec<u16>> = (0..40)
            .map(|_| (0..n).map(|_| r.gen_range(0..q as u16)).collect())
            .collect();
        let d = sample_digraph(&p, samples.into_iter().chain([p.initial_state()]));
        let c = derive_causality(&d, p.flaw_count());
        ensure(c.is_empty(), || {
            format!("graph {seed}: {} causality arcs", c.arc_count())
        })?;
        let report = check_symmetric(&p, &CheckOptions::default()).map_err(|e| e.to_string())?;
        ensure(report.holds && report.delta == 1.0, || {
            format!("graph {seed}: δ = {}", report.delta)
        })?;
        let budget = step_budget(&report, 20).map_err(|e| e.to_string())?;
        let limit = (g.edge_count() as u64 * q as u64).max(1);
        let trace = Walker::new(&p, &order)
            .uniform(budget.max(limit), seed)
            .map_err(|e| e.to_string())?;
        ensure(trace.is_sink(), || format!("graph {seed}: no sink"))?;
        p.validate_solution(trace.final_state())
            .map_err(|v| format!("graph {seed}: {v}"))?;
        ensure(trace.len() as u64 <= limit, || {
            format!("graph {seed}: {} steps above |E|·q = {limit}", trace.len())
        })?;
        longest = longest.max(trace.len() as f64 / limit as f64);
    }
    Ok(format!(
        "100 graphs: empty causality, δ = 1, proper colorings in at most {:.0}% of |E|·q steps",
        longest * 100.0
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("latin transversal end-to-end", criterion_1),
        ("rainbow matching end-to-end", criterion_2),
        ("atomicity oracle", criterion_3),
        ("trajectory reconstruction", criterion_4),
        ("condition checker oracles", criterion_5),
        ("forest round trips", criterion_6),
        ("color-blind machinery", criterion_7),
        ("Δ+1 coloring", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run))
            .unwrap_or_else(|e| Err(format!("panicked: {:?}", e.downcast_ref::<String>())));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {} {name} ({secs:.1}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name} ({secs:.1}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
