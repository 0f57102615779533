//! Browser bindings for three demo operations. Each returns a JSON string.
//!
//! The `*_json` functions are plain Rust so they can be tested natively; the
//! exported wrappers only turn their errors into JavaScript exceptions.

use flawwalk::apps::{ColorMatrix, ColoringProblem, LatinProblem, SimpleGraph};
use flawwalk::conditions::{check_cluster, step_budget, ChargeVector, CheckOptions, DeclaredGraph};
use flawwalk::{FlawOrder, Problem, Walker};
use serde::Serialize;
use wasm_bindgen::prelude::*;

const MAX_LATIN: usize = 256;
const MAX_VERTICES: usize = 200;

#[derive(Serialize, Debug)]
pub struct LatinRun {
    pub n: usize,
    pub delta: usize,
    pub holds: bool,
    pub max_theta: f64,
    pub budget: u64,
    pub steps: usize,
    pub sink: bool,
    /// Flaws present before the first step and after each step.
    pub flaws_per_step: Vec<usize>,
    /// Column chosen in each row.
    pub permutation: Vec<u32>,
    /// Color of each chosen cell.
    pub colors: Vec<u32>,
}

#[derive(Serialize, Debug)]
pub struct ThetaPoint {
    pub delta: usize,
    pub max_theta: f64,
    pub holds: bool,
}

#[derive(Serialize, Debug)]
pub struct ThetaCurve {
    pub n: usize,
    /// `⌊27n/256⌋`.
    pub threshold: usize,
    pub points: Vec<ThetaPoint>,
}

#[derive(Serialize, Debug)]
pub struct ColoringRun {
    pub vertices: usize,
    pub edges: Vec<(u32, u32)>,
    pub colors: u32,
    pub steps: usize,
    pub sink: bool,
    /// The coloring before the first step and after each step.
    pub frames: Vec<Vec<u16>>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

/// Random `n × n` matrix with multiplicity `delta`, solved by the recursive walk.
pub fn latin_solve_json(n: usize, delta: usize, seed: u64) -> Result<String, String> {
    if !(4..=MAX_LATIN).contains(&n) {
        return Err(format!("n must lie in 4..={MAX_LATIN}"));
    }
    let matrix = ColorMatrix::random(n, delta, seed).map_err(|e| e.to_string())?;
    let p = LatinProblem::new(matrix).map_err(|e| e.to_string())?;
    let (holds, max_theta, budget) = match p.recommended_charge() {
        Some(mu) => {
            let report = check_cluster(
                &p,
                &ChargeVector::Uniform(mu),
                &DeclaredGraph(&p),
                &CheckOptions::default(),
            )
            .map_err(|e| e.to_string())?;
            // past the threshold the walk still runs, under a fixed cap
            let budget = step_budget(&report, 20).unwrap_or(20 * n as u64 * n as u64);
            (report.holds, report.max_theta, budget)
        }
        None => (true, 0.0, 1),
    };
    let order = FlawOrder::ById;
    let (trace, _) = Walker::new(&p, &order)
        .record_states(true)
        .recursive(budget, seed)
        .map_err(|e| e.to_string())?;
    let states = trace.states.as_deref().unwrap_or_default();
    let last = trace.final_state();
    to_json(&LatinRun {
        n,
        delta: p.delta(),
        holds,
        max_theta,
        budget,
        steps: trace.len(),
        sink: trace.is_sink(),
        flaws_per_step: states.iter().map(|s| p.flaws_present(s).len()).collect(),
        permutation: last.clone(),
        colors: (0..n)
            .map(|row| p.matrix().get(row, last[row] as usize))
            .collect(),
    })
}

/// Largest cluster ratio at the recommended charge for `Δ = 2..=max_delta`.
pub fn theta_curve_json(n: usize, max_delta: usize, seed: u64) -> Result<String, String> {
    if !(4..=MAX_LATIN).contains(&n) {
        return Err(format!("n must lie in 4..={MAX_LATIN}"));
    }
    let mut points = Vec::new();
    for delta in 2..=max_delta.min(n) {
        let matrix = ColorMatrix::random(n, delta, seed).map_err(|e| e.to_string())?;
        let p = LatinProblem::new(matrix).map_err(|e| e.to_string())?;
        let Some(mu) = p.recommended_charge() else {
            continue;
        };
        let report = check_cluster(
            &p,
            &ChargeVector::Uniform(mu),
            &DeclaredGraph(&p),
            &CheckOptions::default(),
        )
        .map_err(|e| e.to_string())?;
        points.push(ThetaPoint {
            delta: p.delta(),
            max_theta: report.max_theta,
            holds: report.holds,
        });
    }
    to_json(&ThetaCurve {
        n,
        threshold: 27 * n / 256,
        points,
    })
}

/// Uniform walk for a `(Δ+1)`-coloring of `G(vertices, p)`.
pub fn coloring_run_json(vertices: usize, p: f64, seed: u64) -> Result<String, String> {
    if !(1..=MAX_VERTICES).contains(&vertices) {
        return Err(format!("vertex count must lie in 1..={MAX_VERTICES}"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err("edge probability must lie in [0, 1]".into());
    }
    let graph = SimpleGraph::random(vertices, p, seed);
    let q = graph.max_degree() as u32 + 1;
    let problem = ColoringProblem::new(graph, q).map_err(|e| e.to_string())?;
    let order = FlawOrder::ById;
    let budget = 10 * problem.graph().edge_count() as u64 + 10;
    let trace = Walker::new(&problem, &order)
        .record_states(true)
        .uniform(budget, seed)
        .map_err(|e| e.to_string())?;
    to_json(&ColoringRun {
        vertices,
        edges: problem.graph().edges().to_vec(),
        colors: q,
        steps: trace.len(),
        sink: trace.is_sink(),
        frames: trace.states.unwrap_or_default(),
    })
}

#[wasm_bindgen]
pub fn latin_solve(n: usize, delta: usize, seed: u32) -> Result<String, JsError> {
    latin_solve_json(n, delta, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn theta_curve(n: usize, max_delta: usize, seed: u32) -> Result<String, JsError> {
    theta_curve_json(n, max_delta, seed.into()).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn coloring_run(vertices: usize, p: f64, seed: u32) -> Result<String, JsError> {
    coloring_run_json(vertices, p, seed.into()).map_err(|e| JsError::new(&e))
}
