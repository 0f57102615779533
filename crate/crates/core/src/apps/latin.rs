//! Latin transversals of an `n × n` colored matrix.
//!
//! States are permutations `π` of the rows' columns. A flaw is a pair of
//! same-colored cells `(i, j)`, `(i′, j′)` in distinct rows and columns with
//! `π(i) = j` and `π(i′) = j′`. Addressing it picks an ordered pair of
//! distinct rows `α ≠ α′` and performs two transpositions: the images of `i`
//! and `α` are swapped, then the images of `i′` and `α′`.

use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::problem::{CliqueCover, FlawClass, FlawId, Problem, ProfileEntry};

use super::{content_lines, log2_factorial, parse_numbers, AppError, Violation};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMatrix {
    n: usize,
    cells: Vec<u32>,
}

impl ColorMatrix {
    pub fn new(n: usize, cells: Vec<u32>) -> Result<Self, AppError> {
        if n == 0 || cells.len() != n * n {
            return Err(AppError::invalid(format!(
                "expected {} cells for n = {n}, got {}",
                n * n,
                cells.len()
            )));
        }
        Ok(ColorMatrix { n, cells })
    }

    /// Every color used exactly `delta` times (the last one possibly fewer),
    /// placed uniformly at random.
    pub fn random(n: usize, delta: usize, seed: u64) -> Result<Self, AppError> {
        if n == 0 || delta == 0 {
            return Err(AppError::invalid("need n ≥ 1 and Δ ≥ 1"));
        }
        let mut cells: Vec<u32> = (0..n * n).map(|k| (k / delta) as u32).collect();
        cells.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        ColorMatrix::new(n, cells)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.n + col]
    }

    /// `Δ`: the largest number of cells sharing a color.
    pub fn max_multiplicity(&self) -> usize {
        let mut sorted = self.cells.clone();
        sorted.sort_unstable();
        sorted
            .chunk_by(|a, b| a == b)
            .map(<[u32]>::len)
            .max()
            .unwrap_or(0)
    }

    /// Line `n`, then `n` lines of `n` color ids.
    pub fn parse(text: &str) -> Result<Self, AppError> {
        let mut lines = content_lines(text);
        let (ln, header) = lines
            .next()
            .ok_or_else(|| AppError::parse(1, "missing `n`"))?;
        let h: Vec<usize> = parse_numbers(ln, header)?;
        let [n] = h[..] else {
            return Err(AppError::parse(ln, "first line must be `n`"));
        };
        let mut cells = Vec::with_capacity(n * n);
        let mut last = ln;
        for (ln, line) in lines.by_ref().take(n) {
            let row: Vec<u32> = parse_numbers(ln, line)?;
            if row.len() != n {
                return Err(AppError::parse(
                    ln,
                    format!("expected {n} colors, found {}", row.len()),
                ));
            }
            cells.extend(row);
            last = ln;
        }
        if cells.len() != n * n {
            return Err(AppError::parse(last, format!("expected {n} rows")));
        }
        if let Some((ln, _)) = lines.next() {
            return Err(AppError::parse(ln, "trailing content after the matrix"));
        }
        ColorMatrix::new(n, cells)
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{}\n", self.n);
        for row in self.cells.chunks(self.n) {
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// A permutation: `state[i]` is the column selected in row `i`.
pub type Permutation = Vec<u32>;

#[derive(Clone, Debug)]
pub struct LatinProblem {
    matrix: ColorMatrix,
    delta: usize,
    // (i, j, i′, j′) with i < i′ and j ≠ j′, in lexicographic order
    flaws: Vec<[u32; 4]>,
    // per cell, the same-colored cells in other rows and columns with the flaw id
    partner_start: Vec<usize>,
    partners: Vec<(u32, u32)>,
}

impl LatinProblem {
    pub fn new(matrix: ColorMatrix) -> Result<Self, AppError> {
        let n = matrix.n;
        let delta = matrix.max_multiplicity();
        let mut by_color: std::collections::HashMap<u32, Vec<u32>> = Default::default();
        for (c, &color) in matrix.cells.iter().enumerate() {
            by_color.entry(color).or_default().push(c as u32);
        }
        let mut flaws = Vec::new();
        for a in 0..n * n {
            let (i, j) = (a / n, a % n);
            for &b in &by_color[&matrix.cells[a]] {
                let (i2, j2) = (b as usize / n, b as usize % n);
                if i2 > i && j2 != j {
                    flaws.push([i as u32, j as u32, i2 as u32, j2 as u32]);
                }
            }
        }
        // by_color lists are ascending, so flaws come out in lexicographic order
        if !flaws.is_empty() && n < 4 {
            return Err(AppError::invalid(format!(
                "n = {n} is too small for the switching step (need n ≥ 4)"
            )));
        }
        if flaws.len() > u32::MAX as usize {
            return Err(AppError::invalid("too many flaws"));
        }
        let mut lists: Vec<Vec<(u32, u32)>> = vec![Vec::new(); n * n];
        for (id, q) in flaws.iter().enumerate() {
            let a = q[0] * n as u32 + q[1];
            let b = q[2] * n as u32 + q[3];
            lists[a as usize].push((b, id as u32));
            lists[b as usize].push((a, id as u32));
        }
        let mut partner_start = Vec::with_capacity(n * n + 1);
        let mut partners = Vec::with_capacity(2 * flaws.len());
        for l in lists {
            partner_start.push(partners.len());
            partners.extend(l);
        }
        partner_start.push(partners.len());
        Ok(LatinProblem {
            matrix,
            delta,
            flaws,
            partner_start,
            partners,
        })
    }

    pub fn matrix(&self) -> &ColorMatrix {
        &self.matrix
    }

    pub fn size(&self) -> usize {
        self.matrix.n
    }

    /// Computed `Δ`.
    pub fn delta(&self) -> usize {
        self.delta
    }

    /// The cells `(i, j, i′, j′)` of a flaw, 0-indexed.
    pub fn flaw_cells(&self, f: FlawId) -> [u32; 4] {
        self.flaws[f.index()]
    }

    pub fn flaw_id(&self, cells: [u32; 4]) -> Option<FlawId> {
        self.flaws
            .binary_search(&cells)
            .ok()
            .map(|i| FlawId(i as u64))
    }

    /// `μ = 1/(3n(Δ−1))`, the charge under which the cluster condition holds
    /// for `Δ ≤ 27n/256`.
    pub fn recommended_charge(&self) -> Option<f64> {
        (self.delta >= 2).then(|| 1.0 / (3.0 * self.size() as f64 * (self.delta - 1) as f64))
    }

    fn partners_of(&self, cell: usize) -> &[(u32, u32)] {
        &self.partners[self.partner_start[cell]..self.partner_start[cell + 1]]
    }

    /// Decodes an action index into the ordered row pair `(α, α′)`.
    pub fn action_rows(&self, index: u64) -> (usize, usize) {
        let n1 = self.size() as u64 - 1;
        let alpha = index / n1;
        let r = index % n1;
        let alpha2 = if r < alpha { r } else { r + 1 };
        (alpha as usize, alpha2 as usize)
    }

    pub fn validate_solution(&self, state: &Permutation) -> Result<(), Violation> {
        let n = self.size();
        if state.len() != n {
            return Err(Violation(format!("expected {n} rows, got {}", state.len())));
        }
        let mut col_used = vec![false; n];
        for &c in state {
            match col_used.get_mut(c as usize) {
                Some(u) if !*u => *u = true,
                _ => {
                    return Err(Violation(format!(
                        "column {} used twice or out of range",
                        c + 1
                    )))
                }
            }
        }
        let mut seen = std::collections::HashMap::new();
        for (i, &c) in state.iter().enumerate() {
            if let Some(prev) = seen.insert(self.matrix.get(i, c as usize), i) {
                return Err(Violation(format!(
                    "rows {} and {} select color {}",
                    prev + 1,
                    i + 1,
                    self.matrix.get(i, c as usize)
                )));
            }
        }
        Ok(())
    }
}

impl Problem for LatinProblem {
    type State = Permutation;

    fn initial_state(&self) -> Permutation {
        (0..self.size() as u32).collect()
    }

    fn flaw_count(&self) -> u64 {
        self.flaws.len() as u64
    }

    fn flaws_present(&self, state: &Permutation) -> Vec<FlawId> {
        let n = self.size();
        let mut out = Vec::new();
        for (i, &j) in state.iter().enumerate() {
            for &(other, id) in self.partners_of(i * n + j as usize) {
                let (i2, j2) = (other as usize / n, other % n as u32);
                if i2 > i && state[i2] == j2 {
                    out.push(FlawId(id as u64));
                }
            }
        }
        out.sort_unstable();
        out
    }

    fn action_count(&self, _flaw: FlawId, _state: &Permutation) -> u64 {
        let n = self.size() as u64;
        n * (n - 1)
    }

    fn apply_action(&self, flaw: FlawId, state: &Permutation, index: u64) -> Permutation {
        let [i, _, i2, _] = self.flaws[flaw.index()];
        let (alpha, alpha2) = self.action_rows(index);
        let mut next = state.clone();
        next.swap(i as usize, alpha);
        next.swap(i2 as usize, alpha2);
        next
    }

    fn amenability(&self, _flaw: FlawId) -> u64 {
        let n = self.size() as u64;
        n * (n - 1)
    }

    fn neighborhood(&self, flaw: FlawId) -> Vec<FlawId> {
        let n = self.size();
        let [i, j, i2, j2] = self.flaws[flaw.index()].map(|x| x as usize);
        let mut out = Vec::new();
        for r in [i, i2] {
            for c in 0..n {
                out.extend(
                    self.partners_of(r * n + c)
                        .iter()
                        .map(|&(_, id)| FlawId(id as u64)),
                );
            }
        }
        for c in [j, j2] {
            for r in 0..n {
                out.extend(
                    self.partners_of(r * n + c)
                        .iter()
                        .map(|&(_, id)| FlawId(id as u64)),
                );
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    fn in_neighborhood(&self, flaw: FlawId, other: FlawId) -> bool {
        let [i, j, i2, j2] = self.flaws[flaw.index()];
        let [a, b, c, d] = self.flaws[other.index()];
        a == i || a == i2 || c == i || c == i2 || b == j || b == j2 || d == j || d == j2
    }

    fn log2_state_space(&self) -> f64 {
        log2_factorial(self.size() as u64)
    }

    fn encode_state(&self, state: &Permutation, out: &mut Vec<u8>) {
        for c in state {
            out.extend_from_slice(&c.to_le_bytes());
        }
    }

    fn neighborhood_profile(&self, _flaw: FlawId) -> Option<Vec<ProfileEntry>> {
        let n = self.size() as u64;
        Some(vec![ProfileEntry {
            amenability: n * (n - 1),
            count: 4 * n * (self.delta as u64).saturating_sub(1),
        }])
    }

    /// Flaws touching row `i`, row `i′`, column `j`, column `j′`: four
    /// cliques of at most `n(Δ−1)` flaws each.
    fn clique_cover(&self, _flaw: FlawId) -> Option<CliqueCover> {
        let k = self.size() as u64 * (self.delta as u64).saturating_sub(1);
        Some(CliqueCover::Counted(vec![k; 4]))
    }

    fn root_clique_cover(&self, present: &[FlawId]) -> Option<Vec<Vec<FlawId>>> {
        let mut by_row: std::collections::BTreeMap<u32, Vec<FlawId>> = Default::default();
        for &f in present {
            by_row.entry(self.flaws[f.index()][0]).or_default().push(f);
        }
        Some(by_row.into_values().collect())
    }

    fn flaw_classes(&self) -> Option<Vec<FlawClass>> {
        Some(if self.flaws.is_empty() {
            Vec::new()
        } else {
            vec![FlawClass {
                representative: FlawId(0),
                size: self.flaws.len() as u64,
            }]
        })
    }

    fn enumerate_states(&self) -> Option<Vec<Permutation>> {
        let n = self.size();
        if n > 8 {
            return None;
        }
        let mut perm: Permutation = (0..n as u32).collect();
        let mut all = vec![perm.clone()];
        // lexicographic successor
        while let Some(k) = (0..n.saturating_sub(1))
            .rev()
            .find(|&k| perm[k] < perm[k + 1])
        {
            let l = (k + 1..n)
                .rev()
                .find(|&l| perm[k] < perm[l])
                .expect("successor");
            perm.swap(k, l);
            perm[k + 1..].reverse();
            all.push(perm.clone());
        }
        Some(all)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_collision() -> LatinProblem {
        // cells (0,0) and (1,1) share color 9; everything else distinct
        let mut cells: Vec<u32> = (0..16).collect();
        cells[5] = 9;
        cells[0] = 9;
        cells[9] = 100;
        LatinProblem::new(ColorMatrix::new(4, cells).unwrap()).unwrap()
    }

    #[test]
    fn parse_round_trip() {
        let m = ColorMatrix::parse("3\n1 2 3\n4 5 6\n7 8 1\n").unwrap();
        assert_eq!(m.get(2, 2), 1);
        assert_eq!(m.max_multiplicity(), 2);
        assert_eq!(ColorMatrix::parse(&m.serialize()).unwrap(), m);
        assert!(ColorMatrix::parse("2\n1 2\n3\n").is_err());
    }

    #[test]
    fn switch_hand_trace() {
        let p = diag_collision();
        let f = p.flaw_id([0, 0, 1, 1]).unwrap();
        assert_eq!(p.flaws_present(&p.initial_state()), vec![f]);
        // α = row 3, α′ = row 4 (0-indexed 2, 3)
        let k = (2 * 3 + 2) as u64;
        assert_eq!(p.action_rows(k), (2, 3));
        assert_eq!(p.apply_action(f, &p.initial_state(), k), vec![2, 3, 0, 1]);
    }

    #[test]
    fn five_by_five_has_twenty_actions() {
        let mut cells: Vec<u32> = (0..25).collect();
        cells[6] = 0;
        let p = LatinProblem::new(ColorMatrix::new(5, cells).unwrap()).unwrap();
        let f = p.flaws_present(&p.initial_state())[0];
        assert_eq!(p.action_count(f, &p.initial_state()), 20);
        let rows: std::collections::BTreeSet<_> = (0..20).map(|k| p.action_rows(k)).collect();
        assert_eq!(rows.len(), 20);
        assert!(rows.iter().all(|(a, b)| a != b));
    }

    #[test]
    fn random_matrix_has_requested_multiplicity() {
        let m = ColorMatrix::random(16, 3, 7).unwrap();
        assert_eq!(m.max_multiplicity(), 3);
        let p = LatinProblem::new(m).unwrap();
        assert_eq!(p.delta(), 3);
        for f in (0..p.flaw_count()).step_by(7).map(FlawId) {
            let nb = p.neighborhood(f);
            assert!(nb.len() as u64 <= 4 * 16 * 2);
            assert!(nb.contains(&f));
            for g in (0..p.flaw_count()).map(FlawId) {
                assert_eq!(p.in_neighborhood(f, g), nb.binary_search(&g).is_ok());
            }
        }
    }

    #[test]
    fn small_matrices() {
        let distinct = ColorMatrix::new(3, (0..9).collect()).unwrap();
        let p = LatinProblem::new(distinct).unwrap();
        assert_eq!(p.flaw_count(), 0);
        assert!(p.validate_solution(&p.initial_state()).is_ok());
        let clash = ColorMatrix::new(3, vec![0, 1, 2, 3, 0, 5, 6, 7, 8]).unwrap();
        assert!(LatinProblem::new(clash).is_err());
        assert_eq!(diag_collision().enumerate_states().unwrap().len(), 24);
    }

    #[test]
    fn validator_names_the_clash() {
        let p = diag_collision();
        let v = p.validate_solution(&p.initial_state()).unwrap_err();
        assert!(v.0.contains("rows 1 and 2"));
        assert!(p.validate_solution(&vec![0, 0, 1, 2]).is_err());
    }
}
