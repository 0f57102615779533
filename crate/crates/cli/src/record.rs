//! One-line run records and their aggregation.

use std::collections::BTreeMap;
use std::fmt;

use anyhow::{bail, ensure, Context, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunRecord {
    pub app: String,
    pub walk: String,
    pub seed: u64,
    pub budget: u64,
    pub sink: bool,
    pub steps: u64,
    pub wall_ms: u64,
    pub instance: u64,
}

const FIELDS: [&str; 8] = [
    "app", "walk", "seed", "budget", "outcome", "steps", "wall_ms", "instance",
];

impl fmt::Display for RunRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "run app={} walk={} seed={} budget={} outcome={} steps={} wall_ms={} instance={:016x}",
            self.app,
            self.walk,
            self.seed,
            self.budget,
            if self.sink { "sink" } else { "budget-exceeded" },
            self.steps,
            self.wall_ms,
            self.instance
        )
    }
}

impl RunRecord {
    pub fn parse(line: &str) -> Result<Self> {
        let mut toks = line.split_whitespace();
        ensure!(toks.next() == Some("run"), "not a run record");
        let mut values = Vec::with_capacity(FIELDS.len());
        for (name, tok) in FIELDS.iter().zip(toks.by_ref()) {
            let (k, v) = tok
                .split_once('=')
                .with_context(|| format!("`{tok}` is not key=value"))?;
            ensure!(k == *name, "expected field `{name}`, found `{k}`");
            values.push(v);
        }
        ensure!(values.len() == FIELDS.len(), "record has too few fields");
        ensure!(toks.next().is_none(), "record has extra fields");
        let num = |i: usize| -> Result<u64> {
            values[i]
                .parse()
                .with_context(|| format!("field `{}` is not a number", FIELDS[i]))
        };
        let sink = match values[4] {
            "sink" => true,
            "budget-exceeded" => false,
            other => bail!("unknown outcome `{other}`"),
        };
        let r = RunRecord {
            app: values[0].to_string(),
            walk: values[1].to_string(),
            seed: num(2)?,
            budget: num(3)?,
            sink,
            steps: num(5)?,
            wall_ms: num(6)?,
            instance: u64::from_str_radix(values[7], 16).context("instance digest is not hex")?,
        };
        ensure!(r.steps <= r.budget, "steps exceed the budget");
        Ok(r)
    }
}

/// Lines starting with `run ` parsed as records; everything else skipped.
pub fn collect(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| l.starts_with("run "))
        .map(|(i, l)| RunRecord::parse(l).with_context(|| format!("line {}", i + 1)))
        .collect()
}

pub struct GroupSummary {
    pub instance: u64,
    pub app: String,
    pub walk: String,
    pub runs: usize,
    pub successes: usize,
    pub median_steps: u64,
    pub p90_steps: u64,
    pub max_steps: u64,
    pub budget: u64,
    /// Largest `steps / budget` over the group.
    pub max_ratio: f64,
}

fn quantile(sorted: &[u64], q: f64) -> u64 {
    let i = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[i]
}

/// Groups by instance digest, app and walk.
pub fn summarize(records: &[RunRecord]) -> Vec<GroupSummary> {
    let mut groups: BTreeMap<(u64, &str, &str), Vec<&RunRecord>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.instance, &r.app, &r.walk))
            .or_default()
            .push(r);
    }
    groups
        .into_iter()
        .map(|((instance, app, walk), rs)| {
            let mut steps: Vec<u64> = rs.iter().map(|r| r.steps).collect();
            steps.sort_unstable();
            GroupSummary {
                instance,
                app: app.to_string(),
                walk: walk.to_string(),
                runs: rs.len(),
                successes: rs.iter().filter(|r| r.sink).count(),
                median_steps: quantile(&steps, 0.5),
                p90_steps: quantile(&steps, 0.9),
                max_steps: *steps.last().unwrap(),
                budget: rs.iter().map(|r| r.budget).max().unwrap(),
                max_ratio: rs
                    .iter()
                    .map(|r| r.steps as f64 / r.budget.max(1) as f64)
                    .fold(0.0, f64::max),
            }
        })
        .collect()
}
