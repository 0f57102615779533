use std::fmt::Debug;
use std::hash::Hash;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use flawwalk::conditions::{
    check_asymmetric, check_cluster, check_lefthanded, check_symmetric, step_budget, ChargeVector,
    CheckOptions, ConditionReport, Criterion, DeclaredGraph,
};
use flawwalk::structure::{
    derive_causality, enumerate_digraph, enumerate_full, reconstruct_trajectory, undeclared_arcs,
    validate_responsibility, verify_atomicity, ExplicitDigraph, ResponsibilityViolation,
};
use flawwalk::{FlawId, FlawOrder, Problem, ResponsibilityDigraph, WalkError, WalkTrace, Walker};

use crate::instance::{self, with_app, App, GenerateParams};
use crate::record::{self, RunRecord};
use crate::trace::{TraceFile, TraceOutcome};
use crate::{
    CheckArgs, ConditionArgs, CriterionArg, GenerateArgs, SolveArgs, StatsArgs, VerifyArgs,
    WalkKind,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_CONTRACT: u8 = 3;
pub const EXIT_INPUT: u8 = 4;

pub fn generate(a: GenerateArgs) -> Result<u8> {
    let text = instance::generate(
        a.app,
        &GenerateParams {
            size: a.size,
            multiplicity: a.multiplicity,
            edge_probability: a.p,
            seed: a.seed,
            force: a.force,
        },
    )?;
    match a.out {
        Some(path) => {
            std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{text}"),
    }
    Ok(EXIT_OK)
}

fn criterion_for(walk: WalkKind, arg: Option<CriterionArg>) -> Criterion {
    match arg {
        Some(CriterionArg::Symmetric) => Criterion::Symmetric,
        Some(CriterionArg::Asymmetric) => Criterion::Asymmetric,
        Some(CriterionArg::Cluster) => Criterion::Cluster,
        Some(CriterionArg::Lefthanded) => Criterion::LeftHanded,
        None => match walk {
            WalkKind::Uniform => Criterion::Symmetric,
            WalkKind::Recursive => Criterion::Cluster,
            WalkKind::Lefthanded => Criterion::LeftHanded,
        },
    }
}

/// Whether a criterion's guarantee covers a walk. The symmetric and
/// asymmetric conditions imply the cluster one, so they also cover the
/// recursive walk.
fn covers(criterion: Criterion, walk: WalkKind) -> bool {
    match walk {
        WalkKind::Uniform => matches!(criterion, Criterion::Symmetric | Criterion::Asymmetric),
        WalkKind::Recursive => criterion != Criterion::LeftHanded,
        WalkKind::Lefthanded => criterion == Criterion::LeftHanded,
    }
}

fn parse_positive(text: &str) -> Result<f64> {
    let v = match text.split_once('/') {
        Some((a, b)) => a.trim().parse::<f64>()? / b.trim().parse::<f64>()?,
        None => text.trim().parse::<f64>()?,
    };
    ensure!(v.is_finite() && v > 0.0, "charge `{text}` is not positive");
    Ok(v)
}

fn charges<P: App>(p: &P, spec: Option<&str>, opts: &CheckOptions) -> Result<ChargeVector>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let spec = match spec {
        Some(s) => s,
        None => {
            return match p.recommended_charge() {
                Some(mu) => Ok(ChargeVector::Uniform(mu)),
                None => Ok(ChargeVector::from_symmetric(p, opts)?),
            }
        }
    };
    if spec == "theorem1" {
        return Ok(ChargeVector::from_symmetric(p, opts)?);
    }
    if let Some(v) = spec.strip_prefix("uniform:") {
        return Ok(ChargeVector::Uniform(parse_positive(v)?));
    }
    if let Some(path) = spec.strip_prefix("file:") {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading charges {path}"))?;
        let v = text
            .split_whitespace()
            .map(parse_positive)
            .collect::<Result<Vec<f64>>>()?;
        ensure!(
            v.len() as u64 == p.flaw_count(),
            "charge file lists {} values for {} flaws",
            v.len(),
            p.flaw_count()
        );
        return Ok(ChargeVector::PerFlaw(v));
    }
    bail!("unknown --mu `{spec}` (theorem1, uniform:<value>, file:<path>)")
}

/// `base f…` (least first, optional) followed by one `from to` arc per line.
/// Without a file, `R` is the declared causality over the identity order.
fn responsibility<P: Problem>(p: &P, path: Option<&Path>) -> Result<ResponsibilityDigraph> {
    let Some(path) = path else {
        return Ok(ResponsibilityDigraph::from_declared(p));
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading responsibility digraph {}", path.display()))?;
    let mut r = ResponsibilityDigraph::new((0..p.flaw_count()).map(FlawId).collect());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (base, rest) = match line.strip_prefix("base") {
            Some(rest) => (true, rest),
            None => (false, line),
        };
        let v: Vec<u64> = rest
            .split_whitespace()
            .map(|t| t.parse().with_context(|| format!("line {}: `{t}`", i + 1)))
            .collect::<Result<_>>()?;
        ensure!(
            v.iter().all(|&f| f < p.flaw_count()),
            "line {}: flaw out of range",
            i + 1
        );
        if base {
            r.base_order = v.into_iter().map(FlawId).collect();
        } else {
            ensure!(v.len() == 2, "line {}: expected `from to`", i + 1);
            r.insert(FlawId(v[0]), FlawId(v[1]));
        }
    }
    FlawOrder::from_permutation(&r.base_order).map_err(|e| anyhow::anyhow!("base order: {e}"))?;
    ensure!(
        r.base_order.len() as u64 == p.flaw_count(),
        "base order must list every flaw"
    );
    Ok(r)
}

fn evaluate<P: App>(
    p: &P,
    criterion: Criterion,
    cond: &ConditionArgs,
    r: Option<&ResponsibilityDigraph>,
) -> Result<ConditionReport>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let opts = CheckOptions {
        cap: cond.cap,
        ..CheckOptions::default()
    };
    Ok(match criterion {
        Criterion::Symmetric => {
            ensure!(
                cond.mu.is_none(),
                "the symmetric criterion takes no charges"
            );
            check_symmetric(p, &opts)?
        }
        Criterion::Asymmetric => {
            check_asymmetric(p, &charges(p, cond.mu.as_deref(), &opts)?, &opts)?
        }
        Criterion::Cluster => {
            let mu = charges(p, cond.mu.as_deref(), &opts)?;
            check_cluster(p, &mu, &DeclaredGraph(p), &opts)?
        }
        Criterion::LeftHanded => {
            let r = r.context("the left-handed criterion needs a responsibility digraph")?;
            check_lefthanded(p, &charges(p, cond.mu.as_deref(), &opts)?, r)?
        }
    })
}

pub fn check(a: CheckArgs) -> Result<u8> {
    let loaded = instance::load(
        a.instance.app,
        &a.instance.instance,
        a.instance.colors,
        false,
    )?;
    let criterion = criterion_for(a.walk, a.condition.criterion);
    let report = with_app!(&loaded.instance, p => {
        let r = if criterion == Criterion::LeftHanded {
            Some(responsibility(p, a.condition.responsibility.as_deref())?)
        } else {
            None
        };
        evaluate(p, criterion, &a.condition, r.as_ref())?
    });
    print_report(&report);
    let budget = |s| {
        step_budget(&report, s)
            .map(|b| b.to_string())
            .unwrap_or_else(|_| "none".into())
    };
    println!(
        "check app={} criterion={} holds={} max_theta={:.12} delta={:.12} t0={:.6} root_term={} budget20={} budget40={} instance={:016x}",
        loaded.kind,
        criterion.name(),
        report.holds,
        tidy(report.max_theta),
        tidy(report.delta),
        report.t0,
        report.root_term,
        budget(20),
        budget(40),
        loaded.digest
    );
    Ok(if report.holds { EXIT_OK } else { EXIT_FAILED })
}

/// Drops the sign of a negative zero so that printed ratios read `0`.
fn tidy(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn print_report(report: &ConditionReport) {
    const SHOWN: usize = 20;
    let mut rows = report.theta.clone();
    rows.sort_by(|a, b| b.theta.total_cmp(&a.theta).then(a.flaw.cmp(&b.flaw)));
    println!("{:>12}  {:>12}  {:>14}", "flaw", "class size", "theta");
    for e in rows.iter().take(SHOWN) {
        println!(
            "{:>12}  {:>12}  {:>14.10}",
            e.flaw.0,
            e.class_size,
            tidy(e.theta)
        );
    }
    if rows.len() > SHOWN {
        println!("{:>12}", format!("({} more)", rows.len() - SHOWN));
    }
    println!(
        "criterion {}: max theta {:.10}, delta {:.10}, T0 {:.4}, root term {}, log2|states| {:.4}",
        report.criterion.name(),
        tidy(report.max_theta),
        tidy(report.delta),
        report.t0,
        report.root_term,
        report.log2_state_space
    );
    for s in [20, 40] {
        match step_budget(report, s) {
            Ok(b) => println!("budget at s={s}: {b}"),
            Err(_) => println!("budget at s={s}: none (criterion fails)"),
        }
    }
}

fn trace_path(base: &Path, seed: u64, runs: u64) -> PathBuf {
    if runs == 1 {
        return base.to_path_buf();
    }
    let mut name = base.as_os_str().to_os_string();
    name.push(format!(".{seed}"));
    PathBuf::from(name)
}

pub fn solve(a: SolveArgs) -> Result<u8> {
    ensure!(a.runs >= 1, "--runs must be at least 1");
    let loaded = instance::load(
        a.instance.app,
        &a.instance.instance,
        a.instance.colors,
        false,
    )?;
    with_app!(&loaded.instance, p => solve_with(p, &loaded, &a))
}

fn solve_with<P: App>(p: &P, loaded: &instance::Loaded, a: &SolveArgs) -> Result<u8>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let criterion = criterion_for(a.walk, a.condition.criterion);
    if !covers(criterion, a.walk) && !a.force {
        bail!(
            "the {} criterion does not cover the {} walk; pick another criterion or pass --force",
            criterion.name(),
            a.walk.name()
        );
    }
    // the declared digraph is large for big instances, so it is only built
    // when something reads it
    let r = if criterion == Criterion::LeftHanded || a.walk == WalkKind::Lefthanded {
        Some(responsibility(p, a.condition.responsibility.as_deref())?)
    } else {
        None
    };
    let report = match evaluate(p, criterion, &a.condition, r.as_ref()) {
        Ok(rep) => Some(rep),
        Err(e) if a.force => {
            eprintln!("warning: criterion not evaluated: {e:#}");
            None
        }
        Err(e) => return Err(e),
    };
    let holds = report.as_ref().is_some_and(|r| r.holds);
    if !holds && !a.force {
        eprintln!(
            "the {} criterion fails (max theta {:.6}); pass --force with --budget to run anyway",
            criterion.name(),
            report.as_ref().map_or(f64::NAN, |r| r.max_theta)
        );
        return Ok(EXIT_FAILED);
    }
    let budget = match (a.budget, &report) {
        (Some(b), _) => b,
        (None, Some(rep)) if rep.holds => step_budget(rep, a.s)?,
        (None, _) => bail!("--force without a holding criterion needs an explicit --budget"),
    };
    ensure!(budget >= 1, "budget must be at least 1");

    let order = match (a.walk, &r) {
        (WalkKind::Lefthanded, Some(r)) => FlawOrder::from_permutation(&r.base_order)
            .map_err(|e| anyhow::anyhow!("base order: {e}"))?,
        _ => FlawOrder::ById,
    };
    let walker = Walker::new(p, &order);
    let mut all_sinks = true;
    for seed in a.seed..a.seed + a.runs {
        let start = Instant::now();
        let result: Result<WalkTrace<P::State>, WalkError> = match a.walk {
            WalkKind::Uniform => walker.uniform(budget, seed),
            WalkKind::Recursive => walker.recursive(budget, seed).map(|(t, _)| t),
            WalkKind::Lefthanded => walker
                .lefthanded(
                    r.as_ref().expect("built for left-handed walks"),
                    budget,
                    seed,
                )
                .map(|(t, _)| t),
        };
        let trace = match result {
            Ok(t) => t,
            Err(e @ (WalkError::NoActions { .. } | WalkError::Invariant { .. })) => {
                eprintln!("contract violation (seed {seed}): {e}");
                return Ok(EXIT_CONTRACT);
            }
            Err(e) => bail!(e),
        };
        let wall_ms = start.elapsed().as_millis() as u64;
        if trace.is_sink() {
            if let Err(v) = p.validate(trace.final_state()) {
                eprintln!("contract violation (seed {seed}): flawless state fails validation: {v}");
                return Ok(EXIT_CONTRACT);
            }
            if let Some(out) = &a.output {
                std::fs::write(out, p.format_solution(trace.final_state()))
                    .with_context(|| format!("writing {}", out.display()))?;
            }
        }
        all_sinks &= trace.is_sink();
        if let Some(base) = &a.trace {
            let path = trace_path(base, seed, a.runs);
            let file = TraceFile::from_walk(loaded.kind.name(), p, &trace);
            std::fs::write(&path, file.serialize())
                .with_context(|| format!("writing {}", path.display()))?;
        }
        let rec = RunRecord {
            app: loaded.kind.name().to_string(),
            walk: a.walk.name().to_string(),
            seed,
            budget,
            sink: trace.is_sink(),
            steps: trace.len() as u64,
            wall_ms,
            instance: loaded.digest,
        };
        println!("{rec}");
    }
    Ok(if all_sinks { EXIT_OK } else { EXIT_BUDGET })
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Check {
    Atomicity,
    Causality,
    Reconstruction,
    Responsibility,
}

fn parse_checks(spec: &str) -> Result<Vec<Check>> {
    if spec == "all" {
        return Ok(vec![
            Check::Atomicity,
            Check::Causality,
            Check::Reconstruction,
            Check::Responsibility,
        ]);
    }
    spec.split(',')
        .map(|c| {
            Ok(match c.trim() {
                "atomicity" => Check::Atomicity,
                "causality" => Check::Causality,
                "reconstruction" => Check::Reconstruction,
                "responsibility" => Check::Responsibility,
                other => bail!("unknown check `{other}`"),
            })
        })
        .collect()
}

pub fn verify(a: VerifyArgs) -> Result<u8> {
    let checks = parse_checks(&a.checks)?;
    let loaded = instance::load(
        a.instance.app,
        &a.instance.instance,
        a.instance.colors,
        true,
    )?;
    with_app!(&loaded.instance, p => verify_with(p, &loaded, &a, &checks))
}

fn verdict(name: &str, result: Result<String, String>) -> bool {
    match result {
        Ok(detail) => {
            println!("PASS {name}: {detail}");
            true
        }
        Err(detail) => {
            println!("FAIL {name}: {detail}");
            false
        }
    }
}

fn verify_with<P: App>(
    p: &P,
    loaded: &instance::Loaded,
    a: &VerifyArgs,
    checks: &[Check],
) -> Result<u8>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let listed = p.enumerate_states().map(|s| s.len());
    let d = match listed {
        Some(n) if n <= a.cap => enumerate_full(p, a.cap)?,
        _ => enumerate_digraph(p, a.cap)?,
    };
    println!(
        "digraph: {} states, {} arcs ({})",
        d.state_count(),
        d.arcs.len(),
        if listed.is_some_and(|n| n <= a.cap) {
            "whole state space"
        } else {
            "reachable from the initial state"
        }
    );
    let c = derive_causality(&d, p.flaw_count());
    let mut ok = true;
    for check in checks {
        ok &= match check {
            Check::Atomicity => verdict(
                "atomicity",
                verify_atomicity(&d)
                    .map(|()| "every (flaw, state) has one source".into())
                    .map_err(|v| {
                        format!(
                            "addressing flaw {} leads both {:?} and {:?} to {:?}",
                            v.flaw, d.states[v.src1], d.states[v.src2], d.states[v.dst]
                        )
                    }),
            ),
            Check::Causality => {
                let extra = undeclared_arcs(p, &c);
                verdict(
                    "causality",
                    if extra.is_empty() {
                        Ok(format!("{} derived arcs, all declared", c.arc_count()))
                    } else {
                        let shown: Vec<String> = extra
                            .iter()
                            .take(10)
                            .map(|(f, g)| format!("{f}->{g}"))
                            .collect();
                        Err(format!(
                            "{} arcs missing from the declared neighborhoods: {}",
                            extra.len(),
                            shown.join(" ")
                        ))
                    },
                )
            }
            Check::Reconstruction => verdict(
                "reconstruction",
                match &a.trace {
                    Some(path) => check_trace_file(p, loaded, &d, path),
                    None => check_fresh_runs(p, &d, a.runs, a.budget),
                },
            ),
            Check::Responsibility => {
                let r = responsibility(p, a.responsibility.as_deref())?;
                verdict(
                    "responsibility",
                    validate_responsibility(&r, &c)
                        .map(|()| "both rules hold against the derived causality".into())
                        .map_err(|v| match v {
                            ResponsibilityViolation::BaseOrder => {
                                "base order is not a permutation of the flaws".into()
                            }
                            ResponsibilityViolation::MissingArc { from, to } => {
                                format!("arc {from}->{to} of C is not backward but is missing")
                            }
                            ResponsibilityViolation::Transfer { k, j, i } => format!(
                                "{j}->{i} dropped and {k}->{j} kept, but {k}->{i} is missing"
                            ),
                        }),
                )
            }
        };
    }
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}

/// Replays a trace file from the initial state, then rebuilds the same
/// states backwards from the witness and the final state.
fn check_trace_file<P: App>(
    p: &P,
    loaded: &instance::Loaded,
    d: &ExplicitDigraph<P::State>,
    path: &Path,
) -> Result<String, String>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let file = TraceFile::parse(&text).map_err(|e| format!("{e:#}"))?;
    if file.app != loaded.kind.name() {
        return Err(format!("trace is for app {}", file.app));
    }
    let mut state = p.initial_state();
    let mut forward = vec![state.clone()];
    for s in &file.steps {
        if !p.flaws_present(&state).contains(&s.flaw) {
            return Err(format!("step {}: flaw {} is not present", s.step, s.flaw));
        }
        if s.action >= p.action_count(s.flaw, &state) {
            return Err(format!("step {}: action {} out of range", s.step, s.action));
        }
        state = p.apply_action(s.flaw, &state, s.action);
        if p.digest(&state) != s.post_digest {
            return Err(format!("step {}: state digest differs", s.step));
        }
        forward.push(state.clone());
    }
    let sink = p.flaws_present(&state).is_empty();
    if p.digest(&state) != file.final_digest || sink != (file.outcome == TraceOutcome::Sink) {
        return Err("final state or outcome differs".into());
    }
    let backward = reconstruct_trajectory(&file.witness(), &state, d).map_err(|e| e.to_string())?;
    if backward != forward {
        return Err("backward reconstruction differs from the replay".into());
    }
    Ok(format!(
        "trace of {} steps replayed and reconstructed",
        file.steps.len()
    ))
}

fn check_fresh_runs<P: App>(
    p: &P,
    d: &ExplicitDigraph<P::State>,
    runs: u64,
    budget: u64,
) -> Result<String, String>
where
    P::State: Clone + Eq + Hash + Debug,
{
    let walker = Walker::new(p, &FlawOrder::ById).record_states(true);
    let mut steps = 0;
    for seed in 0..runs {
        let t = walker
            .uniform(budget.max(1), seed)
            .map_err(|e| e.to_string())?;
        let rebuilt = reconstruct_trajectory(&t.witness(), t.final_state(), d)
            .map_err(|e| format!("seed {seed}: {e}"))?;
        if Some(&rebuilt) != t.states.as_ref() {
            return Err(format!("seed {seed}: reconstructed states differ"));
        }
        steps += t.len();
    }
    Ok(format!(
        "{runs} uniform runs ({steps} steps) reconstructed exactly"
    ))
}

pub fn stats(a: StatsArgs) -> Result<u8> {
    let mut text = String::new();
    if a.files.is_empty() {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        for f in &a.files {
            text.push_str(
                &std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?,
            );
            text.push('\n');
        }
    }
    let records = record::collect(&text)?;
    ensure!(!records.is_empty(), "no run records found");
    println!(
        "{:<16}  {:<10}  {:<10}  {:>5}  {:>7}  {:>8}  {:>8}  {:>8}  {:>9}  {:>10}",
        "instance",
        "app",
        "walk",
        "runs",
        "success",
        "median",
        "p90",
        "max",
        "budget",
        "max/budget"
    );
    for g in record::summarize(&records) {
        println!(
            "{:016x}  {:<10}  {:<10}  {:>5}  {:>7.3}  {:>8}  {:>8}  {:>8}  {:>9}  {:>10.6}",
            g.instance,
            g.app,
            g.walk,
            g.runs,
            g.successes as f64 / g.runs as f64,
            g.median_steps,
            g.p90_steps,
            g.max_steps,
            g.budget,
            g.max_ratio
        );
    }
    Ok(EXIT_OK)
}
