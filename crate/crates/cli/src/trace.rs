//! Trace files.
//!
//! ```text
//! trace v1 <app> <seed> <budget>
//! <step> <flaw> <action> <post_digest>
//! ...
//! end <sink|budget-exceeded> <final_digest>
//! ```
//!
//! All numbers are unsigned decimals; every line ends with `\n`. Parsing
//! accepts only the canonical spelling, so a parsed trace serializes back to
//! the same bytes.

use std::fmt::Write as _;

use anyhow::{bail, ensure, Context, Result};
use flawwalk::{FlawId, Problem, StepRecord, WalkTrace};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceOutcome {
    Sink,
    BudgetExceeded,
}

impl TraceOutcome {
    pub fn name(self) -> &'static str {
        match self {
            TraceOutcome::Sink => "sink",
            TraceOutcome::BudgetExceeded => "budget-exceeded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceFile {
    pub app: String,
    pub seed: u64,
    pub budget: u64,
    pub steps: Vec<StepRecord>,
    pub outcome: TraceOutcome,
    pub final_digest: u64,
}

impl TraceFile {
    pub fn from_walk<P: Problem>(app: &str, problem: &P, trace: &WalkTrace<P::State>) -> Self {
        TraceFile {
            app: app.to_string(),
            seed: trace.seed,
            budget: trace.budget,
            steps: trace.steps.clone(),
            outcome: if trace.is_sink() {
                TraceOutcome::Sink
            } else {
                TraceOutcome::BudgetExceeded
            },
            final_digest: problem.digest(trace.final_state()),
        }
    }

    pub fn witness(&self) -> Vec<FlawId> {
        self.steps.iter().map(|s| s.flaw).collect()
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("trace v1 {} {} {}\n", self.app, self.seed, self.budget);
        for s in &self.steps {
            let _ = writeln!(
                out,
                "{} {} {} {}",
                s.step, s.flaw.0, s.action, s.post_digest
            );
        }
        let _ = writeln!(out, "end {} {}", self.outcome.name(), self.final_digest);
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        ensure!(text.ends_with('\n'), "trace must end with a newline");
        let mut lines = text[..text.len() - 1].split('\n').enumerate();
        let (_, header) = lines.next().context("empty trace")?;
        let h: Vec<&str> = header.split(' ').collect();
        ensure!(
            h.len() == 5 && h[0] == "trace" && h[1] == "v1",
            "line 1: expected `trace v1 <app> <seed> <budget>`"
        );
        ensure!(
            !h[2].is_empty() && h[2].bytes().all(|b| b.is_ascii_graphic()),
            "line 1: bad app name"
        );
        let mut file = TraceFile {
            app: h[2].to_string(),
            seed: number(1, h[3])?,
            budget: number(1, h[4])?,
            steps: Vec::new(),
            outcome: TraceOutcome::Sink,
            final_digest: 0,
        };
        let mut ended = false;
        for (i, line) in lines {
            let ln = i + 1;
            ensure!(!ended, "line {ln}: content after the end line");
            let t: Vec<&str> = line.split(' ').collect();
            if t[0] == "end" {
                ensure!(t.len() == 3, "line {ln}: expected `end <outcome> <digest>`");
                file.outcome = match t[1] {
                    "sink" => TraceOutcome::Sink,
                    "budget-exceeded" => TraceOutcome::BudgetExceeded,
                    other => bail!("line {ln}: unknown outcome `{other}`"),
                };
                file.final_digest = number(ln, t[2])?;
                ended = true;
                continue;
            }
            ensure!(
                t.len() == 4,
                "line {ln}: expected `step flaw action post_digest`"
            );
            let step = number(ln, t[0])?;
            ensure!(
                step == file.steps.len() as u64 + 1,
                "line {ln}: steps must count up from 1"
            );
            file.steps.push(StepRecord {
                step,
                flaw: FlawId(number(ln, t[1])?),
                action: number(ln, t[2])?,
                post_digest: number(ln, t[3])?,
            });
        }
        ensure!(ended, "missing end line");
        ensure!(
            file.steps.len() as u64 <= file.budget,
            "trace has more steps than its budget"
        );
        Ok(file)
    }
}

fn number(ln: usize, tok: &str) -> Result<u64> {
    let canonical = !tok.is_empty()
        && tok.bytes().all(|b| b.is_ascii_digit())
        && (tok == "0" || !tok.starts_with('0'));
    ensure!(canonical, "line {ln}: `{tok}` is not a canonical decimal");
    tok.parse()
        .with_context(|| format!("line {ln}: `{tok}` out of range"))
}
