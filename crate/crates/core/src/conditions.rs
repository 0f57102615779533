//! Sufficient conditions for fast convergence, and the step budgets they imply.
//!
//! Four criteria are supported. Each produces a per-flaw ratio `θ_f`; the
//! criterion holds when `max θ_f < 1`, the walk then progresses at rate
//! `δ = 1 − max θ_f` and reaches a sink within `(T₀ + s)/δ` steps except with
//! probability `2^{−s}`.
//!
//! | criterion   | `θ_f`                                                  | walk       |
//! |-------------|--------------------------------------------------------|------------|
//! | symmetric   | `e · Σ_{g∈Γ(f)} 1/A_g`                                 | uniform    |
//! | asymmetric  | `(μ_f A_f)⁻¹ · Π_{g∈Γ(f)} (1 + μ_g)`                   | uniform    |
//! | cluster     | `(μ_f A_f)⁻¹ · Σ_{S∈Ind(Γ(f))} Π_{g∈S} μ_g`            | recursive  |
//! | left-handed | `(μ_f A_f)⁻¹ · Π_{g∈Γ_R(f)} (1 + μ_g)`                 | left-handed|
//!
//! Neighborhoods are read from the instance. Instances with huge flaw
//! universes can answer through closed-form hooks (amenability profiles,
//! clique covers, flaw classes); [`CheckOptions::use_hooks`] switches those
//! off to force explicit enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::E;

use thiserror::Error;

use crate::engine::ResponsibilityDigraph;
use crate::problem::{CliqueCover, FlawId, Problem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConditionError {
    #[error("flaw {0} has amenability 0")]
    ZeroAmenability(FlawId),
    #[error("charge of flaw {0} is not a positive finite number")]
    BadCharge(FlawId),
    #[error("charge vector has {got} entries, the instance has {expected} flaws")]
    ChargeLength { expected: u64, got: u64 },
    #[error("neighborhood of flaw {flaw} has {size} members, above the enumeration cap {cap}")]
    CapExceeded {
        flaw: FlawId,
        size: usize,
        cap: usize,
    },
    #[error("the condition does not hold (max θ = {max_theta}); no step budget exists")]
    NotHolding { max_theta: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Criterion {
    Symmetric,
    Asymmetric,
    Cluster,
    LeftHanded,
}

impl Criterion {
    pub fn name(self) -> &'static str {
        match self {
            Criterion::Symmetric => "symmetric",
            Criterion::Asymmetric => "asymmetric",
            Criterion::Cluster => "cluster",
            Criterion::LeftHanded => "lefthanded",
        }
    }
}

impl std::str::FromStr for Criterion {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "symmetric" => Ok(Criterion::Symmetric),
            "asymmetric" => Ok(Criterion::Asymmetric),
            "cluster" => Ok(Criterion::Cluster),
            "lefthanded" => Ok(Criterion::LeftHanded),
            other => Err(format!("unknown criterion `{other}`")),
        }
    }
}

/// Positive charges `μ_f`.
#[derive(Clone, Debug, PartialEq)]
pub enum ChargeVector {
    Uniform(f64),
    /// `μ_f = scale / A_f`.
    InverseAmenability(f64),
    PerFlaw(Vec<f64>),
}

impl ChargeVector {
    pub fn get<P: Problem>(&self, problem: &P, f: FlawId) -> f64 {
        match self {
            ChargeVector::Uniform(mu) => *mu,
            ChargeVector::InverseAmenability(scale) => scale / problem.amenability(f) as f64,
            ChargeVector::PerFlaw(v) => v[f.index()],
        }
    }

    /// The charge as a function of amenability alone, when it is one.
    pub fn for_amenability(&self, amenability: u64) -> Option<f64> {
        match self {
            ChargeVector::Uniform(mu) => Some(*mu),
            ChargeVector::InverseAmenability(scale) => Some(scale / amenability as f64),
            ChargeVector::PerFlaw(_) => None,
        }
    }

    fn depends_on_amenability_only(&self) -> bool {
        !matches!(self, ChargeVector::PerFlaw(_))
    }

    /// Charges built from the symmetric criterion: `μ_f = 1/(d·A_f)` with
    /// `d = max_f Σ_{g∈Γ(f)} 1/A_g`. Whenever the symmetric criterion holds,
    /// the asymmetric one holds under these charges.
    ///
    /// When every neighborhood is empty `d` is 0 and `d = 1/2` is used instead.
    pub fn from_symmetric<P: Problem>(
        problem: &P,
        options: &CheckOptions,
    ) -> Result<Self, ConditionError> {
        let mut d: f64 = 0.0;
        for (f, _) in flaw_units(problem, true, options) {
            d = d.max(inverse_amenability_sum(problem, f, options)?);
        }
        let d = if d > 0.0 { d } else { 0.5 };
        Ok(ChargeVector::InverseAmenability(1.0 / d))
    }

    fn validate<P: Problem>(&self, problem: &P) -> Result<(), ConditionError> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        match self {
            ChargeVector::Uniform(mu) | ChargeVector::InverseAmenability(mu) => {
                if !ok(*mu) {
                    return Err(ConditionError::BadCharge(FlawId(0)));
                }
            }
            ChargeVector::PerFlaw(v) => {
                if v.len() as u64 != problem.flaw_count() {
                    return Err(ConditionError::ChargeLength {
                        expected: problem.flaw_count(),
                        got: v.len() as u64,
                    });
                }
                if let Some(i) = v.iter().position(|&x| !ok(x)) {
                    return Err(ConditionError::BadCharge(FlawId(i as u64)));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// Largest neighborhood (or `U(σ₁)`) enumerated subset by subset.
    pub cap: usize,
    pub use_hooks: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            cap: 20,
            use_hooks: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaEntry {
    pub flaw: FlawId,
    /// Number of flaws sharing this value (1 unless flaw classes were used).
    pub class_size: u64,
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionReport {
    pub criterion: Criterion,
    pub theta: Vec<ThetaEntry>,
    pub max_theta: f64,
    pub delta: f64,
    pub t0: f64,
    pub holds: bool,
    /// `|U(σ₁)|`, or a bound on the largest independent subset of it for
    /// the cluster criterion.
    pub root_term: u64,
    pub log2_state_space: f64,
}

impl ConditionReport {
    fn assemble(
        criterion: Criterion,
        theta: Vec<ThetaEntry>,
        t0: f64,
        root_term: u64,
        log2_state_space: f64,
    ) -> Self {
        let max_theta = theta.iter().map(|e| e.theta).fold(0.0, f64::max);
        let delta = 1.0 - max_theta;
        ConditionReport {
            criterion,
            theta,
            max_theta,
            delta,
            t0,
            holds: max_theta < 1.0,
            root_term,
            log2_state_space,
        }
    }

    pub fn theta_of(&self, f: FlawId) -> Option<f64> {
        self.theta.iter().find(|e| e.flaw == f).map(|e| e.theta)
    }

    /// The flaw attaining `max θ`.
    pub fn argmax(&self) -> Option<FlawId> {
        self.theta
            .iter()
            .max_by(|a, b| a.theta.total_cmp(&b.theta))
            .map(|e| e.flaw)
    }
}

/// Undirected adjacency on flaws.
pub trait FlawAdjacency {
    fn adjacent(&self, f: FlawId, g: FlawId) -> bool;
}

/// `G`: `{f, g}` is an edge iff both `f→g` and `g→f` are causality arcs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FlawGraphG {
    pub adjacency: BTreeMap<FlawId, BTreeSet<FlawId>>,
}

impl FlawGraphG {
    pub fn edge_count(&self) -> usize {
        self.adjacency.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, f: FlawId) -> impl Iterator<Item = FlawId> + '_ {
        self.adjacency.get(&f).into_iter().flatten().copied()
    }
}

impl FlawAdjacency for FlawGraphG {
    fn adjacent(&self, f: FlawId, g: FlawId) -> bool {
        self.adjacency.get(&f).is_some_and(|s| s.contains(&g))
    }
}

/// `G` induced by an instance's declared neighborhoods.
pub struct DeclaredGraph<'p, P>(pub &'p P);

impl<P: Problem> FlawAdjacency for DeclaredGraph<'_, P> {
    fn adjacent(&self, f: FlawId, g: FlawId) -> bool {
        f != g && self.0.in_neighborhood(f, g) && self.0.in_neighborhood(g, f)
    }
}

fn flaw_units<P: Problem>(
    problem: &P,
    class_invariant: bool,
    options: &CheckOptions,
) -> Vec<(FlawId, u64)> {
    if options.use_hooks && class_invariant {
        if let Some(classes) = problem.flaw_classes() {
            return classes
                .into_iter()
                .map(|c| (c.representative, c.size))
                .collect();
        }
    }
    (0..problem.flaw_count()).map(|f| (FlawId(f), 1)).collect()
}

fn amenability_of<P: Problem>(problem: &P, f: FlawId) -> Result<f64, ConditionError> {
    match problem.amenability(f) {
        0 => Err(ConditionError::ZeroAmenability(f)),
        a => Ok(a as f64),
    }
}

fn inverse_amenability_sum<P: Problem>(
    problem: &P,
    f: FlawId,
    options: &CheckOptions,
) -> Result<f64, ConditionError> {
    if options.use_hooks {
        if let Some(profile) = problem.neighborhood_profile(f) {
            let mut sum = 0.0;
            for e in profile {
                if e.amenability == 0 {
                    return Err(ConditionError::ZeroAmenability(f));
                }
                sum += e.count as f64 / e.amenability as f64;
            }
            return Ok(sum);
        }
    }
    problem
        .neighborhood(f)
        .into_iter()
        .map(|g| amenability_of(problem, g).map(|a| 1.0 / a))
        .sum()
}

/// `T₀ = log₂|Ω| + root · log₂(1 + max_f(μ_f A_f) / min_f A_f)`.
fn t0_term<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    units: &[(FlawId, u64)],
    root_term: u64,
) -> f64 {
    let mut max_mu_a: f64 = 0.0;
    let mut min_a = f64::INFINITY;
    for &(f, _) in units {
        let a = problem.amenability(f) as f64;
        max_mu_a = max_mu_a.max(charges.get(problem, f) * a);
        min_a = min_a.min(a);
    }
    let ratio = if units.is_empty() {
        0.0
    } else {
        max_mu_a / min_a
    };
    problem.log2_state_space() + root_term as f64 * (1.0 + ratio).log2()
}

fn initial_flaws<P: Problem>(problem: &P) -> Vec<FlawId> {
    problem.flaws_present(&problem.initial_state())
}

/// Symmetric criterion: `Σ_{g∈Γ(f)} 1/A_g < 1/e` for every flaw.
pub fn check_symmetric<P: Problem>(
    problem: &P,
    options: &CheckOptions,
) -> Result<ConditionReport, ConditionError> {
    let units = flaw_units(problem, true, options);
    let mut theta = Vec::with_capacity(units.len());
    for &(f, size) in &units {
        amenability_of(problem, f)?;
        let sum = inverse_amenability_sum(problem, f, options)?;
        theta.push(ThetaEntry {
            flaw: f,
            class_size: size,
            theta: E * sum,
        });
    }
    let root = initial_flaws(problem).len() as u64;
    let t0 = problem.log2_state_space() + root as f64;
    Ok(ConditionReport::assemble(
        Criterion::Symmetric,
        theta,
        t0,
        root,
        problem.log2_state_space(),
    ))
}

fn product_form<P: Problem>(problem: &P, charges: &ChargeVector, neighborhood: &[FlawId]) -> f64 {
    neighborhood
        .iter()
        .map(|&g| 1.0 + charges.get(problem, g))
        .product()
}

/// Asymmetric criterion with the product form `(μ_f A_f)⁻¹ Π_{g∈Γ(f)} (1+μ_g)`.
pub fn check_asymmetric<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    options: &CheckOptions,
) -> Result<ConditionReport, ConditionError> {
    charges.validate(problem)?;
    let units = flaw_units(problem, charges.depends_on_amenability_only(), options);
    let mut theta = Vec::with_capacity(units.len());
    for &(f, size) in &units {
        let a = amenability_of(problem, f)?;
        let profile = options
            .use_hooks
            .then(|| problem.neighborhood_profile(f))
            .flatten()
            .filter(|_| charges.depends_on_amenability_only());
        let prod = match profile {
            Some(profile) => profile
                .iter()
                .map(|e| {
                    let mu = charges
                        .for_amenability(e.amenability)
                        .expect("amenability charge");
                    (e.count as f64 * mu.ln_1p()).exp()
                })
                .product(),
            None => product_form(problem, charges, &problem.neighborhood(f)),
        };
        theta.push(ThetaEntry {
            flaw: f,
            class_size: size,
            theta: prod / (charges.get(problem, f) * a),
        });
    }
    let root = initial_flaws(problem).len() as u64;
    let t0 = t0_term(problem, charges, &units, root);
    Ok(ConditionReport::assemble(
        Criterion::Asymmetric,
        theta,
        t0,
        root,
        problem.log2_state_space(),
    ))
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// The asymmetric ratio evaluated by summing over every subset of `Γ(f)`,
/// `(μ_f A_f)⁻¹ Σ_{S⊆Γ(f)} Π_{g∈S} μ_g`. Exponential; refuses neighborhoods
/// above the cap. Serves as an independent route to [`check_asymmetric`].
pub fn expand_asymmetric<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    options: &CheckOptions,
) -> Result<BTreeMap<FlawId, f64>, ConditionError> {
    charges.validate(problem)?;
    let mut out = BTreeMap::new();
    for f in (0..problem.flaw_count()).map(FlawId) {
        let a = amenability_of(problem, f)?;
        let nb = problem.neighborhood(f);
        if nb.len() > options.cap {
            return Err(ConditionError::CapExceeded {
                flaw: f,
                size: nb.len(),
                cap: options.cap,
            });
        }
        let mus: Vec<f64> = nb.iter().map(|&g| charges.get(problem, g)).collect();
        let sum = compensated_sum((0u64..1 << mus.len()).map(|mask| {
            mus.iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, m)| m)
                .product::<f64>()
        }));
        out.insert(f, sum / (charges.get(problem, f) * a));
    }
    Ok(out)
}

/// `Σ_{S∈Ind(V)} Π_{g∈S} w_g` for vertex weights `w` and adjacency bitmasks.
fn independent_set_sum(weights: &[f64], adj: &[u32]) -> f64 {
    fn go(i: usize, allowed: u32, w: &[f64], adj: &[u32]) -> f64 {
        if i == w.len() {
            return 1.0;
        }
        let skip = go(i + 1, allowed, w, adj);
        if allowed >> i & 1 == 1 {
            skip + w[i] * go(i + 1, allowed & !adj[i], w, adj)
        } else {
            skip
        }
    }
    let all = if weights.len() >= 32 {
        u32::MAX
    } else {
        (1u32 << weights.len()) - 1
    };
    go(0, all, weights, adj)
}

fn adjacency_masks(vertices: &[FlawId], g: &dyn FlawAdjacency) -> Vec<u32> {
    vertices
        .iter()
        .map(|&a| {
            vertices
                .iter()
                .enumerate()
                .filter(|&(_, &b)| a != b && g.adjacent(a, b))
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect()
}

/// Size of the largest independent subset of `vertices` (`|vertices| ≤ 32`).
pub fn max_independent_subset(vertices: &[FlawId], g: &dyn FlawAdjacency) -> usize {
    fn go(i: usize, allowed: u32, adj: &[u32]) -> usize {
        if i == adj.len() {
            return 0;
        }
        let skip = go(i + 1, allowed, adj);
        if allowed >> i & 1 == 1 {
            skip.max(1 + go(i + 1, allowed & !adj[i], adj))
        } else {
            skip
        }
    }
    assert!(vertices.len() <= 32);
    let adj = adjacency_masks(vertices, g);
    let all = if vertices.len() == 32 {
        u32::MAX
    } else {
        (1u32 << vertices.len()) - 1
    };
    go(0, all, &adj)
}

/// `Σ_{S∈Ind(Γ(f))} Π_{g∈S} μ_g`, explicitly or through a clique cover.
fn cluster_sum<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    f: FlawId,
    g: &dyn FlawAdjacency,
    max_charge: f64,
    options: &CheckOptions,
) -> Result<f64, ConditionError> {
    if options.use_hooks {
        if let Some(cover) = problem.clique_cover(f) {
            return Ok(match cover {
                CliqueCover::Explicit(cliques) => cliques
                    .iter()
                    .map(|k| 1.0 + k.iter().map(|&h| charges.get(problem, h)).sum::<f64>())
                    .product(),
                CliqueCover::Counted(sizes) => {
                    sizes.iter().map(|&s| 1.0 + s as f64 * max_charge).product()
                }
            });
        }
    }
    let nb = problem.neighborhood(f);
    if nb.len() > options.cap.min(32) {
        return Err(ConditionError::CapExceeded {
            flaw: f,
            size: nb.len(),
            cap: options.cap,
        });
    }
    let weights: Vec<f64> = nb.iter().map(|&h| charges.get(problem, h)).collect();
    Ok(independent_set_sum(&weights, &adjacency_masks(&nb, g)))
}

fn max_charge<P: Problem>(problem: &P, charges: &ChargeVector, units: &[(FlawId, u64)]) -> f64 {
    match charges {
        ChargeVector::Uniform(mu) => *mu,
        ChargeVector::PerFlaw(v) => v.iter().copied().fold(0.0, f64::max),
        ChargeVector::InverseAmenability(_) => units
            .iter()
            .map(|&(f, _)| charges.get(problem, f))
            .fold(0.0, f64::max),
    }
}

/// Largest independent subset of `U(σ₁)`: exact below the cap, otherwise the
/// size of the instance's clique cover, otherwise `|U(σ₁)|`.
pub fn cluster_root_term<P: Problem>(
    problem: &P,
    g: &dyn FlawAdjacency,
    options: &CheckOptions,
) -> u64 {
    let present = initial_flaws(problem);
    if present.len() <= options.cap.min(32) {
        return max_independent_subset(&present, g) as u64;
    }
    if options.use_hooks {
        if let Some(cover) = problem.root_clique_cover(&present) {
            let cliques = cover.iter().filter(|k| !k.is_empty()).count() as u64;
            return cliques.min(present.len() as u64);
        }
    }
    present.len() as u64
}

/// Cluster criterion: sums over independent subsets of `Γ(f)` in `G`.
pub fn check_cluster<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    g: &dyn FlawAdjacency,
    options: &CheckOptions,
) -> Result<ConditionReport, ConditionError> {
    charges.validate(problem)?;
    let units = flaw_units(problem, charges.depends_on_amenability_only(), options);
    let mu_max = max_charge(problem, charges, &units);
    let mut theta = Vec::with_capacity(units.len());
    for &(f, size) in &units {
        let a = amenability_of(problem, f)?;
        let sum = cluster_sum(problem, charges, f, g, mu_max, options)?;
        theta.push(ThetaEntry {
            flaw: f,
            class_size: size,
            theta: sum / (charges.get(problem, f) * a),
        });
    }
    let root = cluster_root_term(problem, g, options);
    let t0 = t0_term(problem, charges, &units, root);
    Ok(ConditionReport::assemble(
        Criterion::Cluster,
        theta,
        t0,
        root,
        problem.log2_state_space(),
    ))
}

/// Left-handed criterion: the product form over `Γ_R(f)`.
pub fn check_lefthanded<P: Problem>(
    problem: &P,
    charges: &ChargeVector,
    responsibility: &ResponsibilityDigraph,
) -> Result<ConditionReport, ConditionError> {
    charges.validate(problem)?;
    let units: Vec<(FlawId, u64)> = (0..problem.flaw_count()).map(|f| (FlawId(f), 1)).collect();
    let mut theta = Vec::with_capacity(units.len());
    for &(f, _) in &units {
        let a = amenability_of(problem, f)?;
        let prod = product_form(problem, charges, &responsibility.neighborhood(f));
        theta.push(ThetaEntry {
            flaw: f,
            class_size: 1,
            theta: prod / (charges.get(problem, f) * a),
        });
    }
    let root = initial_flaws(problem).len() as u64;
    let t0 = t0_term(problem, charges, &units, root);
    Ok(ConditionReport::assemble(
        Criterion::LeftHanded,
        theta,
        t0,
        root,
        problem.log2_state_space(),
    ))
}

/// `⌈(T₀ + s)/δ⌉`.
pub fn step_budget(report: &ConditionReport, s: u32) -> Result<u64, ConditionError> {
    if !report.holds {
        return Err(ConditionError::NotHolding {
            max_theta: report.max_theta,
        });
    }
    Ok(((report.t0 + s as f64) / report.delta).ceil() as u64)
}

/// Log-spaced scan of uniform charges in `[lo, hi]`, returning the charge
/// with the smallest `max θ` and its report.
pub fn search_uniform_charge<F>(
    lo: f64,
    hi: f64,
    points: usize,
    mut evaluate: F,
) -> Option<(f64, ConditionReport)>
where
    F: FnMut(&ChargeVector) -> Result<ConditionReport, ConditionError>,
{
    assert!(lo > 0.0 && hi > lo && points >= 2);
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .filter_map(|i| {
            let mu = (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp();
            evaluate(&ChargeVector::Uniform(mu)).ok().map(|r| (mu, r))
        })
        .min_by(|a, b| a.1.max_theta.total_cmp(&b.1.max_theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::table::TableProblem;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(f64::MIN_POSITIVE)
    }

    /// Flaws with prescribed neighborhoods and amenabilities; one state.
    fn declared(neighborhoods: &[&[u64]], amenability: &[u64]) -> TableProblem {
        let n = neighborhoods.len() as u64;
        let mut b = TableProblem::builder(1, n);
        for (f, nb) in neighborhoods.iter().enumerate() {
            b = b.neighbors(f as u64, nb);
        }
        let mut t = b.build().unwrap();
        for (f, &a) in amenability.iter().enumerate() {
            t.set_amenability(FlawId(f as u64), a);
        }
        t
    }

    #[test]
    fn symmetric_empty_neighborhoods_hold_with_full_rate() {
        let p = declared(&[&[], &[]], &[1, 3]);
        let r = check_symmetric(&p, &CheckOptions::default()).unwrap();
        assert!(r.holds);
        assert_eq!(r.delta, 1.0);
    }

    #[test]
    fn symmetric_self_loop_with_two_actions_fails() {
        let p = declared(&[&[0]], &[2]);
        let r = check_symmetric(&p, &CheckOptions::default()).unwrap();
        assert!(!r.holds);
        assert!(close(r.max_theta, E / 2.0, 1e-15));
        assert!(step_budget(&r, 20).is_err());
    }

    #[test]
    fn zero_amenability_is_flagged() {
        let p = declared(&[&[1], &[]], &[3, 0]);
        assert_eq!(
            check_symmetric(&p, &CheckOptions::default()).unwrap_err(),
            ConditionError::ZeroAmenability(FlawId(1))
        );
    }

    #[test]
    fn asymmetric_single_neighbor() {
        // Γ(f) = {g}, μ_g = 1, A_f = 4, μ_f = 1 → θ_f = 2/4
        let p = declared(&[&[1], &[]], &[4, 1]);
        let r = check_asymmetric(
            &p,
            &ChargeVector::PerFlaw(vec![1.0, 1.0]),
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.theta_of(FlawId(0)), Some(0.5));
        // g: 1/(1·1) = 1, so overall not holding; drop g's weight to check f alone
        let r = check_asymmetric(
            &p,
            &ChargeVector::PerFlaw(vec![1.0, 2.0]),
            &CheckOptions::default(),
        )
        .unwrap();
        assert_eq!(r.theta_of(FlawId(0)), Some(0.75));
        assert_eq!(r.theta_of(FlawId(1)), Some(0.5));
        assert!(r.holds);
        assert_eq!(r.delta, 0.25);
    }

    #[test]
    fn expansion_edge_cases() {
        let p = declared(&[&[], &[0, 2], &[]], &[2, 5, 1]);
        let mu = ChargeVector::PerFlaw(vec![1.0, 0.5, 1.0]);
        let ex = expand_asymmetric(&p, &mu, &CheckOptions::default()).unwrap();
        // empty neighborhood: 1/(μ_f A_f)
        assert_eq!(ex[&FlawId(0)], 0.5);
        // {g,h} with unit charges: 4 subsets
        assert_eq!(ex[&FlawId(1)], 4.0 / (0.5 * 5.0));
        let cap = CheckOptions {
            cap: 1,
            use_hooks: true,
        };
        assert!(matches!(
            expand_asymmetric(&p, &mu, &cap),
            Err(ConditionError::CapExceeded {
                flaw: FlawId(1),
                size: 2,
                cap: 1
            })
        ));
    }

    #[test]
    fn clique_neighborhood_sums_singletons_only() {
        // Γ(0) = {1,2,3} forming a clique in G
        let p = declared(&[&[1, 2, 3], &[2, 3], &[1, 3], &[1, 2]], &[10, 10, 10, 10]);
        let mu = 0.1;
        let r = check_cluster(
            &p,
            &ChargeVector::Uniform(mu),
            &DeclaredGraph(&p),
            &CheckOptions::default(),
        )
        .unwrap();
        assert!(close(
            r.theta_of(FlawId(0)).unwrap(),
            (1.0 + 3.0 * mu) / (mu * 10.0),
            1e-14
        ));
    }

    #[test]
    fn budget_arithmetic() {
        let p = declared(&[&[]], &[1]);
        let mut r = check_symmetric(&p, &CheckOptions::default()).unwrap();
        r.t0 = 100.0;
        r.delta = 0.5;
        assert_eq!(step_budget(&r, 20).unwrap(), 240);
    }

    #[test]
    fn symmetric_charges_make_asymmetric_hold() {
        let p = declared(&[&[1, 2], &[0], &[0, 1]], &[40, 30, 50]);
        let sym = check_symmetric(&p, &CheckOptions::default()).unwrap();
        assert!(sym.holds);
        let mu = ChargeVector::from_symmetric(&p, &CheckOptions::default()).unwrap();
        let asym = check_asymmetric(&p, &mu, &CheckOptions::default()).unwrap();
        assert!(asym.holds);
        assert!(asym.max_theta <= 1.0 - sym.delta + 1e-12);
    }

    #[test]
    fn uniform_search_finds_a_holding_charge() {
        let p = declared(&[&[1], &[0]], &[4, 4]);
        let (mu, r) = search_uniform_charge(1e-3, 1e3, 61, |c| {
            check_asymmetric(&p, c, &CheckOptions::default())
        })
        .unwrap();
        assert!(r.holds);
        // (1+μ)/(4μ) is minimized as μ grows
        assert!(mu > 10.0);
    }

    #[test]
    fn max_independent_subset_on_small_graphs() {
        let p = declared(&[&[1], &[0, 2], &[1], &[]], &[1, 1, 1, 1]);
        let all: Vec<FlawId> = (0..4).map(FlawId).collect();
        // path 0-1-2 plus isolated 3
        assert_eq!(max_independent_subset(&all, &DeclaredGraph(&p)), 3);
    }
}
