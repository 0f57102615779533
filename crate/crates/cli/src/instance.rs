//! Loading, generating and dispatching over the built-in instance kinds.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use flawwalk::apps::{
    ColorBlindProblem, ColorMatrix, ColoringProblem, EdgeColoredComplete, LatinProblem,
    MatchingProblem, SimpleGraph, Violation,
};
use flawwalk::digest::fnv1a64;
use flawwalk::table::TableProblem;
use flawwalk::Problem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AppKind {
    Latin,
    Matching,
    Coloring,
    ColorBlind,
    Table,
}

impl AppKind {
    pub fn name(self) -> &'static str {
        match self {
            AppKind::Latin => "latin",
            AppKind::Matching => "matching",
            AppKind::Coloring => "coloring",
            AppKind::ColorBlind => "colorblind",
            AppKind::Table => "table",
        }
    }
}

impl fmt::Display for AppKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AppKind {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "latin" => AppKind::Latin,
            "matching" => AppKind::Matching,
            "coloring" => AppKind::Coloring,
            "colorblind" => AppKind::ColorBlind,
            "table" => AppKind::Table,
            other => bail!("unknown app `{other}` (latin, matching, coloring, colorblind, table)"),
        })
    }
}

/// What the commands need beyond [`Problem`].
pub trait App: Problem
where
    Self::State: Clone + Eq + std::hash::Hash + fmt::Debug,
{
    fn validate(&self, state: &Self::State) -> Result<(), Violation>;

    /// The state in the instance's 1-indexed text conventions.
    fn format_solution(&self, state: &Self::State) -> String;

    /// Charge known to make the instance's natural criterion hold.
    fn recommended_charge(&self) -> Option<f64> {
        None
    }
}

fn one_line<T: Into<u64> + Copy>(values: &[T]) -> String {
    let parts: Vec<String> = values.iter().map(|&v| (v.into() + 1).to_string()).collect();
    parts.join(" ") + "\n"
}

impl App for LatinProblem {
    fn validate(&self, state: &Vec<u32>) -> Result<(), Violation> {
        self.validate_solution(state)
    }

    fn format_solution(&self, state: &Vec<u32>) -> String {
        one_line(state)
    }

    fn recommended_charge(&self) -> Option<f64> {
        LatinProblem::recommended_charge(self)
    }
}

impl App for MatchingProblem {
    fn validate(&self, state: &Vec<u32>) -> Result<(), Violation> {
        self.validate_solution(state)
    }

    fn format_solution(&self, state: &Vec<u32>) -> String {
        state
            .iter()
            .enumerate()
            .filter(|&(a, &b)| (a as u32) < b)
            .map(|(a, &b)| format!("{} {}\n", a + 1, b + 1))
            .collect()
    }
}

impl App for ColoringProblem {
    fn validate(&self, state: &Vec<u16>) -> Result<(), Violation> {
        self.validate_solution(state)
    }

    fn format_solution(&self, state: &Vec<u16>) -> String {
        one_line(state)
    }
}

impl App for ColorBlindProblem {
    fn validate(&self, state: &Vec<u8>) -> Result<(), Violation> {
        self.validate_solution(state)
    }

    fn format_solution(&self, state: &Vec<u8>) -> String {
        self.graph()
            .edges()
            .iter()
            .zip(state)
            .map(|(&(a, b), &c)| format!("{} {} {}\n", a + 1, b + 1, c + 1))
            .collect()
    }
}

impl App for TableProblem {
    fn validate(&self, state: &u32) -> Result<(), Violation> {
        let present = self.flaws_present(state);
        if present.is_empty() {
            Ok(())
        } else {
            Err(Violation(format!("state {state} has flaws {present:?}")))
        }
    }

    fn format_solution(&self, state: &u32) -> String {
        format!("{state}\n")
    }
}

pub enum Instance {
    Latin(LatinProblem),
    Matching(MatchingProblem),
    Coloring(ColoringProblem),
    ColorBlind(ColorBlindProblem),
    Table(TableProblem),
}

/// Runs `$body` with `$p` bound to the concrete problem.
macro_rules! with_app {
    ($inst:expr, $p:ident => $body:expr) => {
        match $inst {
            $crate::instance::Instance::Latin($p) => $body,
            $crate::instance::Instance::Matching($p) => $body,
            $crate::instance::Instance::Coloring($p) => $body,
            $crate::instance::Instance::ColorBlind($p) => $body,
            $crate::instance::Instance::Table($p) => $body,
        }
    };
}
pub(crate) use with_app;

pub struct Loaded {
    pub kind: AppKind,
    pub instance: Instance,
    /// FNV-1a of the file contents.
    pub digest: u64,
}

/// `relaxed` admits instances too small for the walks but still fine to
/// enumerate (matching on fewer than 8 vertices).
pub fn load(
    kind: AppKind,
    path: &std::path::Path,
    colors: Option<u32>,
    relaxed: bool,
) -> Result<Loaded> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let instance = parse(kind, &text, colors, relaxed)
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(Loaded {
        kind,
        instance,
        digest: fnv1a64(text.as_bytes()),
    })
}

pub fn parse(kind: AppKind, text: &str, colors: Option<u32>, relaxed: bool) -> Result<Instance> {
    Ok(match kind {
        AppKind::Latin => Instance::Latin(LatinProblem::new(ColorMatrix::parse(text)?)?),
        AppKind::Matching => {
            let g = EdgeColoredComplete::parse(text)?;
            Instance::Matching(if relaxed {
                MatchingProblem::new_unchecked(g)
            } else {
                MatchingProblem::new(g)?
            })
        }
        AppKind::Coloring => {
            let g = SimpleGraph::parse(text)?;
            let q = colors.unwrap_or(g.max_degree() as u32 + 1);
            Instance::Coloring(ColoringProblem::new(g, q)?)
        }
        AppKind::ColorBlind => {
            Instance::ColorBlind(ColorBlindProblem::new(SimpleGraph::parse(text)?)?)
        }
        AppKind::Table => Instance::Table(parse_table(text)?),
    })
}

/// Explicit transition tables:
///
/// ```text
/// table <states> <flaws> <initial>
/// flaws <state> <flaw>...
/// action <state> <flaw> <destination>...
/// gamma <flaw> <flaw>...
/// ```
///
/// States and flaws are 0-indexed. `gamma` lines declare neighborhoods.
fn parse_table(text: &str) -> Result<TableProblem> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let nums = |ln: usize, toks: &[&str]| -> Result<Vec<u64>> {
        toks.iter()
            .map(|t| {
                t.parse::<u64>()
                    .with_context(|| format!("line {ln}: `{t}` is not a number"))
            })
            .collect()
    };
    let (ln, header) = lines.next().context("empty table file")?;
    let toks: Vec<&str> = header.split_whitespace().collect();
    ensure!(
        toks.len() == 4 && toks[0] == "table",
        "line {ln}: expected `table <states> <flaws> <initial>`"
    );
    let h = nums(ln, &toks[1..])?;
    let (states, flaws) = (h[0] as u32, h[1]);
    ensure!(
        states >= 1 && h[2] < h[0],
        "line {ln}: initial state out of range"
    );
    let mut b = TableProblem::builder(states, flaws).initial(h[2] as u32);
    for (ln, line) in lines {
        let toks: Vec<&str> = line.split_whitespace().collect();
        let v = nums(ln, &toks[1..])?;
        let in_states = |x: u64| x < states as u64;
        match toks[0] {
            "flaws" if !v.is_empty() => {
                ensure!(in_states(v[0]), "line {ln}: state out of range");
                ensure!(
                    v[1..].iter().all(|&f| f < flaws),
                    "line {ln}: flaw out of range"
                );
                b = b.present(v[0] as u32, &v[1..]);
            }
            "action" if v.len() >= 3 => {
                ensure!(
                    in_states(v[0]) && v[1] < flaws,
                    "line {ln}: state or flaw out of range"
                );
                let dests: Vec<u32> = v[2..].iter().map(|&d| d as u32).collect();
                b = b.actions(v[0] as u32, v[1], &dests);
            }
            "gamma" if !v.is_empty() => {
                ensure!(v.iter().all(|&f| f < flaws), "line {ln}: flaw out of range");
                b = b.neighbors(v[0], &v[1..]);
            }
            _ => bail!("line {ln}: unrecognized table line"),
        }
    }
    Ok(b.build()?)
}

pub struct GenerateParams {
    pub size: usize,
    pub multiplicity: Option<usize>,
    pub edge_probability: f64,
    pub seed: u64,
    pub force: bool,
}

/// Largest Latin color multiplicity covered by the guarantee, `⌊27n/256⌋`.
pub fn latin_delta_bound(n: usize) -> usize {
    27 * n / 256
}

/// Largest matching color multiplicity with `q < n/(2e)` for `2n` vertices.
pub fn matching_multiplicity_bound(vertices: usize) -> usize {
    let limit = (vertices / 2) as f64 / (2.0 * std::f64::consts::E);
    (limit.ceil() as usize).saturating_sub(1)
}

pub fn generate(kind: AppKind, params: &GenerateParams) -> Result<String> {
    let GenerateParams {
        size, seed, force, ..
    } = *params;
    match kind {
        AppKind::Latin => {
            let bound = latin_delta_bound(size).max(1);
            let delta = params.multiplicity.unwrap_or(bound);
            ensure!(delta >= 1, "Δ must be at least 1");
            ensure!(
                force || delta <= bound,
                "Δ = {delta} exceeds ⌊27n/256⌋ = {bound} for n = {size}; pass --force to generate anyway"
            );
            let m = ColorMatrix::random(size, delta, seed)?;
            ensure!(
                m.max_multiplicity() <= delta,
                "generated multiplicity exceeds Δ"
            );
            Ok(m.serialize())
        }
        AppKind::Matching => {
            ensure!(
                size >= 2 && size % 2 == 0,
                "the vertex count 2n must be even and positive"
            );
            let bound = matching_multiplicity_bound(size);
            let q = params.multiplicity.unwrap_or(bound.max(1));
            ensure!(q >= 1, "color multiplicity must be at least 1");
            ensure!(
                force || q <= bound,
                "q = {q} does not satisfy q < n/(2e) for 2n = {size}; pass --force to generate anyway"
            );
            let g = EdgeColoredComplete::random(size, q, seed)?;
            ensure!(
                g.max_multiplicity() <= q,
                "generated multiplicity exceeds q"
            );
            Ok(g.serialize())
        }
        AppKind::Coloring => {
            Ok(SimpleGraph::random(size, params.edge_probability, seed).serialize())
        }
        AppKind::ColorBlind => {
            for attempt in 0..1000u64 {
                let g =
                    SimpleGraph::random(size, params.edge_probability, seed.wrapping_add(attempt));
                if ColorBlindProblem::new(g.clone()).is_ok() {
                    return Ok(g.serialize());
                }
            }
            bail!("no graph without isolated edges found in 1000 attempts; raise the edge probability")
        }
        AppKind::Table => bail!("table instances are written by hand"),
    }
}
