//! Flaw orderings: which present flaw is addressed next.

use thiserror::Error;

use crate::problem::FlawId;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OrderError {
    #[error("permutation is not a bijection on 0..{len}: flaw {flaw} repeated or out of range")]
    NotAPermutation { len: usize, flaw: FlawId },
}

/// A strict total order on flaws for every step of a walk.
///
/// The greatest flaw of a set is the one addressed. `ById` and `Permutation`
/// use a single order for all steps; `PerStep` draws an independent
/// pseudo-random order for each step from `seed`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum FlawOrder {
    /// Larger id is greater.
    #[default]
    ById,
    /// `rank[f]` is the position of `f` in the permutation, least first.
    Permutation {
        rank: Vec<u64>,
    },
    PerStep {
        seed: u64,
    },
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl FlawOrder {
    /// Builds a fixed order from a permutation listed least-first.
    pub fn from_permutation(perm: &[FlawId]) -> Result<Self, OrderError> {
        let mut rank = vec![u64::MAX; perm.len()];
        for (pos, &f) in perm.iter().enumerate() {
            match rank.get_mut(f.index()) {
                Some(slot) if *slot == u64::MAX => *slot = pos as u64,
                _ => {
                    return Err(OrderError::NotAPermutation {
                        len: perm.len(),
                        flaw: f,
                    })
                }
            }
        }
        Ok(FlawOrder::Permutation { rank })
    }

    pub fn is_fixed(&self) -> bool {
        !matches!(self, FlawOrder::PerStep { .. })
    }

    /// Sort key of `flaw` at `step`; the greatest key wins.
    #[inline]
    pub fn key(&self, step: u64, flaw: FlawId) -> (u64, u64) {
        match self {
            FlawOrder::ById => (flaw.0, 0),
            FlawOrder::Permutation { rank } => (rank[flaw.index()], 0),
            FlawOrder::PerStep { seed } => (splitmix64(splitmix64(seed ^ step) ^ flaw.0), flaw.0),
        }
    }

    /// `I_π(S)` for the order used at `step`.
    pub fn greatest<I>(&self, step: u64, flaws: I) -> Option<FlawId>
    where
        I: IntoIterator<Item = FlawId>,
    {
        flaws.into_iter().max_by_key(|&f| self.key(step, f))
    }

    /// Whether `a` is strictly greater than `b` at `step`.
    pub fn greater(&self, step: u64, a: FlawId, b: FlawId) -> bool {
        self.key(step, a) > self.key(step, b)
    }

    /// Whether this fixed order lists flaws exactly as `perm` (least first).
    pub fn agrees_with(&self, perm: &[FlawId], flaw_count: u64) -> bool {
        if !self.is_fixed() || perm.len() as u64 != flaw_count {
            return false;
        }
        let mut seen = vec![false; perm.len()];
        for &f in perm {
            match seen.get_mut(f.index()) {
                Some(s) if !*s => *s = true,
                _ => return false,
            }
        }
        perm.windows(2)
            .all(|w| self.key(0, w[0]) < self.key(0, w[1]))
    }
}
