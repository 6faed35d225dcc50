//! Constructive families of random orders of type ℤ, used as stand-ins for an
//! invariant measure on the space of orders, and an empirical invariance test.
//!
//! * `dirac-standard-Z`: always the natural order on ℤ.
//! * `pair-swap-Z`: ℤ is cut into pairs `{2n+φ, 2n+φ+1}` with a fair phase
//!   coin `φ`; each pair is independently reversed with probability `p`.
//! * `hierarchical`: nested `2^d`-ary cubes over the coordinate lattice ℤ^d
//!   with uniform dyadic offsets per level. Two points are compared at the
//!   first level where they share a cube, by the reflected-Gray-code rank of
//!   their sub-cubes; each cube flips that sub-cube order on a fair coin.
//!
//! All randomness is read from [`crate::prf`], keyed by `(seed, level, cube)`,
//! so any `k^≺` or index lookup costs O(levels) without materializing
//! anything.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind};
use crate::order::{LazyOrder, Order, OrderPatternKey, OrderRule, Provenance};
use crate::prf::{prf, prf_unit, split};

/// Deepest precomputed hierarchy level. Positions inside a level-L cube need
/// `d·L` bits, which must fit in an `i128`.
pub const MAX_LEVEL: usize = 40;

const TAG_PHASE: i64 = 1;
const TAG_SWAP: i64 = 2;
const TAG_OFFSET: i64 = 3;
const TAG_REVERSE: i64 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
pub enum Family {
    DiracStandardZ,
    PairSwapZ,
    Hierarchical,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::DiracStandardZ => "dirac-standard-Z",
            Family::PairSwapZ => "pair-swap-Z",
            Family::Hierarchical => "hierarchical",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dirac-standard-Z" | "dirac-standard" | "dirac" => Ok(Family::DiracStandardZ),
            "pair-swap-Z" | "pair-swap" => Ok(Family::PairSwapZ),
            "hierarchical" => Ok(Family::Hierarchical),
            other => Err(Error::parse(format!(
                "unknown sampler family {other:?} (expected dirac-standard-Z, pair-swap-Z, hierarchical)"
            ))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MultiorderSampler {
    group: GroupKind,
    family: Family,
    seed: u64,
    swap_prob: f64,
}

impl MultiorderSampler {
    pub fn new(group: GroupKind, family: Family, seed: u64) -> Result<Self> {
        if family != Family::Hierarchical && group != GroupKind::Z {
            return Err(Error::usage(format!("family {family} is only defined on Z, not {group}")));
        }
        Ok(MultiorderSampler { group, family, seed, swap_prob: 0.5 })
    }

    /// Swap probability for `pair-swap-Z` (default 1/2).
    pub fn with_swap_prob(mut self, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::usage(format!("swap probability {p} outside [0, 1]")));
        }
        self.swap_prob = p;
        Ok(self)
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Draw one order; deterministic in `(self, seed)`.
    pub fn sample(&self, seed: u64) -> LazyOrder {
        let s = split(self.seed, seed);
        match self.family {
            Family::DiracStandardZ => LazyOrder::standard(),
            Family::PairSwapZ => {
                let phase = (prf(s, &[TAG_PHASE]) & 1) as i64;
                LazyOrder::from_rule(Arc::new(PairSwapRule::seeded(phase, s, self.swap_prob)))
            }
            Family::Hierarchical => LazyOrder::from_rule(Arc::new(HierarchicalRule::new(self.group, s))),
        }
    }
}

#[derive(Clone, Debug)]
enum SwapCoins {
    Seeded { seed: u64, prob: f64 },
    Explicit(BTreeSet<i64>),
}

/// Pair-swap order on ℤ. With `σ` the involution swapping reversed pairs,
/// `bi(k) = σ(k + σ(0))`.
#[derive(Clone, Debug)]
pub struct PairSwapRule {
    phase: i64,
    coins: SwapCoins,
    anchor: i64,
}

impl PairSwapRule {
    pub fn seeded(phase: i64, seed: u64, prob: f64) -> Self {
        Self::build(phase, SwapCoins::Seeded { seed, prob })
    }

    /// Reverse exactly the pairs `{2n+φ, 2n+φ+1}` for `n ∈ swapped`.
    pub fn explicit(phase: i64, swapped: impl IntoIterator<Item = i64>) -> Self {
        Self::build(phase, SwapCoins::Explicit(swapped.into_iter().collect()))
    }

    fn build(phase: i64, coins: SwapCoins) -> Self {
        let mut rule = PairSwapRule { phase: phase.rem_euclid(2), coins, anchor: 0 };
        rule.anchor = rule.sigma(0);
        rule
    }

    fn swapped(&self, block: i64) -> bool {
        match &self.coins {
            SwapCoins::Seeded { seed, prob } => prf_unit(*seed, &[TAG_SWAP, block]) < *prob,
            SwapCoins::Explicit(set) => set.contains(&block),
        }
    }

    fn sigma(&self, p: i64) -> i64 {
        let block = (p - self.phase).div_euclid(2);
        if !self.swapped(block) {
            return p;
        }
        let first = 2 * block + self.phase;
        if p == first {
            first + 1
        } else {
            first
        }
    }
}

impl OrderRule for PairSwapRule {
    fn group(&self) -> GroupKind {
        GroupKind::Z
    }

    fn at(&self, k: i64) -> Result<GroupElement> {
        Ok(GroupKind::z(self.sigma(k + self.anchor)))
    }

    fn position(&self, g: &GroupElement) -> Result<i64> {
        Ok(self.sigma(g.coords()[0]) - self.anchor)
    }

    fn provenance(&self) -> Provenance {
        Provenance::PairSwap
    }
}

/// Hierarchical order over the coordinate lattice of a group.
///
/// The level-`L` cube containing `p` has index `⌊(p - o_L) / 2^L⌋` with
/// `o_{L+1} = o_L + b_L·2^L`, `b_L ∈ {0,1}^d`, so cubes nest. A point's
/// position inside its level-`L` cube is `Σ_l rank_l · 2^{d(l-1)}`, where
/// `rank_l` is the serpentine rank of its level-`(l-1)` sub-cube.
pub struct HierarchicalRule {
    group: GroupKind,
    dim: usize,
    seed: u64,
    offsets: Vec<[i64; 3]>,
    origin_pos: Vec<i128>,
}

impl HierarchicalRule {
    pub fn new(group: GroupKind, seed: u64) -> Self {
        let dim = group.dim();
        let mut offsets = vec![[0i64; 3]; MAX_LEVEL + 1];
        for level in 0..MAX_LEVEL {
            let mut next = offsets[level];
            for (i, o) in next.iter_mut().enumerate().take(dim) {
                *o += ((prf(seed, &[TAG_OFFSET, level as i64, i as i64]) & 1) as i64) << level;
            }
            offsets[level + 1] = next;
        }
        let mut rule = HierarchicalRule { group, dim, seed, offsets, origin_pos: Vec::new() };
        let origin = [0i64; 3];
        let mut acc = 0i128;
        rule.origin_pos.push(0);
        for level in 1..=MAX_LEVEL {
            acc += (rule.rank_at(&origin, level) as i128) << (dim * (level - 1));
            rule.origin_pos.push(acc);
        }
        rule
    }

    fn block(&self, p: &[i64; 3], level: usize) -> [i64; 3] {
        let mut b = [0i64; 3];
        for i in 0..self.dim {
            b[i] = (p[i] - self.offsets[level][i]).div_euclid(1i64 << level);
        }
        b
    }

    // offset bit between level `level` and `level + 1` along axis i
    fn bit(&self, level: usize, i: usize) -> i64 {
        (self.offsets[level + 1][i] - self.offsets[level][i]) >> level
    }

    fn reversed(&self, level: usize, block: &[i64; 3]) -> bool {
        prf(self.seed, &[TAG_REVERSE, level as i64, block[0], block[1], block[2]]) & 1 == 1
    }

    fn mask(&self) -> u32 {
        (1u32 << self.dim) - 1
    }

    fn rank_at(&self, p: &[i64; 3], level: usize) -> u32 {
        let parent = self.block(p, level);
        let child = self.block(p, level - 1);
        let mut gray = 0u32;
        for i in 0..self.dim {
            let c = child[i] - 2 * parent[i] - self.bit(level - 1, i);
            debug_assert!(c == 0 || c == 1);
            gray |= (c as u32) << i;
        }
        let mut rank = gray_inverse(gray);
        if self.reversed(level, &parent) {
            rank = self.mask() - rank;
        }
        rank
    }

    fn position_in(&self, p: &[i64; 3], level: usize) -> i128 {
        (1..=level).map(|l| (self.rank_at(p, l) as i128) << (self.dim * (l - 1))).sum()
    }

    fn raw(&self, g: &GroupElement) -> [i64; 3] {
        let mut p = [0i64; 3];
        p[..self.dim].copy_from_slice(g.coords());
        p
    }

    /// First level at which `g` shares a cube with the identity.
    pub fn common_level(&self, g: &GroupElement) -> Result<usize> {
        let p = self.raw(g);
        let origin = [0i64; 3];
        (0..=MAX_LEVEL)
            .find(|&l| self.block(&p, l) == self.block(&origin, l))
            .ok_or_else(|| Error::horizon(format!("{g} shares no cube with e below level {MAX_LEVEL}")))
    }
}

fn gray_inverse(mut g: u32) -> u32 {
    let mut r = g;
    while g > 1 {
        g >>= 1;
        r ^= g;
    }
    r
}

impl OrderRule for HierarchicalRule {
    fn group(&self) -> GroupKind {
        self.group
    }

    fn at(&self, k: i64) -> Result<GroupElement> {
        let level = (0..=MAX_LEVEL)
            .find(|&l| {
                let t = self.origin_pos[l] + k as i128;
                t >= 0 && t < 1i128 << (self.dim * l)
            })
            .ok_or_else(|| Error::horizon(format!("index {k} beyond hierarchy level {MAX_LEVEL}")))?;
        let t = self.origin_pos[level] + k as i128;
        let mut block = self.block(&[0; 3], level);
        for l in (1..=level).rev() {
            let mut rank = ((t >> (self.dim * (l - 1))) as u32) & self.mask();
            if self.reversed(l, &block) {
                rank = self.mask() - rank;
            }
            let gray = rank ^ (rank >> 1);
            for (i, b) in block.iter_mut().enumerate().take(self.dim) {
                *b = 2 * *b + self.bit(l - 1, i) + ((gray >> i) & 1) as i64;
            }
        }
        self.group.element(&block[..self.dim])
    }

    fn position(&self, g: &GroupElement) -> Result<i64> {
        let level = self.common_level(g)?;
        let pos = self.position_in(&self.raw(g), level) - self.origin_pos[level];
        i64::try_from(pos).map_err(|_| Error::horizon(format!("index of {g} does not fit in i64")))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Hierarchical
    }
}

/// Result of [`invariance_test`].
#[derive(Clone, Debug, serde::Serialize)]
pub struct InvarianceEstimate {
    /// Empirical total-variation distance between the two pattern laws.
    pub tv: f64,
    pub n_samples: usize,
    /// Pattern encoding → (count under ≺, count under g(≺)).
    pub counts: BTreeMap<String, (u64, u64)>,
}

/// Compare the law of the radius-`m` pattern of `≺` with that of `g(≺)`
/// over `n_samples` independent draws.
pub fn invariance_test(
    sampler: &MultiorderSampler,
    g: &GroupElement,
    m: i64,
    n_samples: usize,
) -> Result<InvarianceEstimate> {
    if g.kind() != sampler.group() {
        return Err(Error::usage("acting element from the wrong group"));
    }
    let pairs: Vec<(OrderPatternKey, OrderPatternKey)> = (0..n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let order = Order::Lazy(sampler.sample(s));
            let acted = order.act(g)?;
            Ok((order.pattern_key(m)?, acted.pattern_key(m)?))
        })
        .collect::<Result<_>>()?;
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    for (a, b) in &pairs {
        counts.entry(a.encode()).or_default().0 += 1;
        counts.entry(b.encode()).or_default().1 += 1;
    }
    let n = n_samples.max(1) as f64;
    let tv = 0.5 * counts.values().map(|&(a, b)| (a as f64 - b as f64).abs() / n).sum::<f64>();
    Ok(InvarianceEstimate { tv, n_samples, counts })
}
