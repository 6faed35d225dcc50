use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{GroupElement, GroupKind};

/// Default bound on `|k|` for inverse lookups that have to search.
pub const DEFAULT_SEARCH_CAP: i64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Standard,
    PairSwap,
    Hierarchical,
    ActedUpon,
    TailModified,
    Custom,
}

impl Provenance {
    pub fn name(self) -> &'static str {
        match self {
            Provenance::Standard => "standard",
            Provenance::PairSwap => "pair-swap",
            Provenance::Hierarchical => "hierarchical",
            Provenance::ActedUpon => "acted-upon",
            Provenance::TailModified => "tail-modified",
            Provenance::Custom => "custom",
        }
    }
}

/// An anchored bijection `ℤ → G` given by rule.
///
/// Implementations must satisfy `at(0) == identity` and
/// `position(at(k)) == k`.
pub trait OrderRule: Send + Sync {
    fn group(&self) -> GroupKind;
    fn at(&self, k: i64) -> Result<GroupElement>;
    fn position(&self, g: &GroupElement) -> Result<i64>;
    fn provenance(&self) -> Provenance;
}

/// Order of type ℤ represented by a total rule `k ↦ k^≺`.
///
/// The group action is folded into two parameters, so acting is O(1) no
/// matter how many times it is repeated: the order stored here is
/// `k ↦ rule(k + shift) · right`.
#[derive(Clone)]
pub struct LazyOrder {
    rule: Arc<dyn OrderRule>,
    shift: i64,
    right: GroupElement,
    right_inv: GroupElement,
}

impl LazyOrder {
    pub fn from_rule(rule: Arc<dyn OrderRule>) -> Self {
        let e = rule.group().identity();
        LazyOrder { rule, shift: 0, right: e, right_inv: e }
    }

    /// The natural order `<` on ℤ.
    pub fn standard() -> Self {
        Self::from_rule(Arc::new(StandardRule))
    }

    /// An order given only by its forward rule. The inverse is found by
    /// searching `|k| ≤ search_cap`.
    pub fn from_fn<F>(group: GroupKind, f: F, search_cap: i64) -> Result<Self>
    where
        F: Fn(i64) -> GroupElement + Send + Sync + 'static,
    {
        let rule = FnRule { group, f: Box::new(f), search_cap };
        if !rule.at(0)?.is_identity() {
            return Err(Error::usage("order rule is not anchored: rule(0) != identity"));
        }
        Ok(Self::from_rule(Arc::new(rule)))
    }

    pub fn group(&self) -> GroupKind {
        self.rule.group()
    }

    pub fn provenance(&self) -> Provenance {
        if self.shift == 0 && self.right.is_identity() {
            self.rule.provenance()
        } else {
            Provenance::ActedUpon
        }
    }

    pub fn element_at(&self, k: i64) -> Result<GroupElement> {
        let i = k
            .checked_add(self.shift)
            .ok_or_else(|| Error::horizon(format!("index {k} overflows")))?;
        Ok(self.rule.at(i)? * self.right)
    }

    pub fn index_of(&self, g: &GroupElement) -> Result<i64> {
        if g.kind() != self.group() {
            return Err(Error::usage(format!(
                "{} element queried in an order on {}",
                g.kind(),
                self.group()
            )));
        }
        let p = self.rule.position(&(*g * self.right_inv))?;
        p.checked_sub(self.shift).ok_or_else(|| Error::horizon("index overflow"))
    }

    /// `g(≺)`: the order `i ↦ (i+k)^≺ · g⁻¹` where `g = k^≺`.
    pub fn act(&self, g: &GroupElement) -> Result<LazyOrder> {
        let k = self.index_of(g)?;
        let g_inv = g.inv();
        Ok(LazyOrder {
            rule: Arc::clone(&self.rule),
            shift: self.shift + k,
            right: self.right * g_inv,
            right_inv: *g * self.right_inv,
        })
    }

    /// Modify the tail of this order by a right translation.
    ///
    /// Returns the order `B` with `k^B = π(k)^A · g` where `g = (j^A)⁻¹`,
    /// and `π` is a seeded permutation of the finite index set
    /// `[min(j,0) - spread, k0)` with `π(0) = j` (identity elsewhere). So
    /// `k^B = k^A · g` for every `k ≥ k0`, and `B` is again anchored.
    pub fn tail_modified(&self, j: i64, k0: i64, spread: i64, seed: u64) -> Result<LazyOrder> {
        if k0 <= 0 || j >= k0 {
            return Err(Error::usage(format!("tail modification needs 0 < k0 and j < k0 (j={j}, k0={k0})")));
        }
        let g = self.element_at(j)?.inv();
        let lo = j.min(0) - spread.max(0);
        let domain: Vec<i64> = (lo..k0).collect();
        let mut image = domain.clone();
        image.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pos0 = (0 - lo) as usize;
        let at_j = image.iter().position(|&v| v == j).expect("j lies in the domain");
        image.swap(pos0, at_j);
        let forward: BTreeMap<i64, i64> = domain.iter().copied().zip(image.iter().copied()).collect();
        let backward: BTreeMap<i64, i64> = forward.iter().map(|(&a, &b)| (b, a)).collect();
        let rule = TailModifiedRule { base: self.clone(), g, g_inv: g.inv(), forward, backward };
        Ok(Self::from_rule(Arc::new(rule)))
    }
}

impl fmt::Debug for LazyOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LazyOrder")
            .field("group", &self.group())
            .field("provenance", &self.provenance())
            .field("shift", &self.shift)
            .field("right", &self.right)
            .finish()
    }
}

struct StandardRule;

impl OrderRule for StandardRule {
    fn group(&self) -> GroupKind {
        GroupKind::Z
    }

    fn at(&self, k: i64) -> Result<GroupElement> {
        Ok(GroupKind::z(k))
    }

    fn position(&self, g: &GroupElement) -> Result<i64> {
        Ok(g.coords()[0])
    }

    fn provenance(&self) -> Provenance {
        Provenance::Standard
    }
}

struct TailModifiedRule {
    base: LazyOrder,
    g: GroupElement,
    g_inv: GroupElement,
    forward: BTreeMap<i64, i64>,
    backward: BTreeMap<i64, i64>,
}

impl OrderRule for TailModifiedRule {
    fn group(&self) -> GroupKind {
        self.base.group()
    }

    fn at(&self, k: i64) -> Result<GroupElement> {
        let m = self.forward.get(&k).copied().unwrap_or(k);
        Ok(self.base.element_at(m)? * self.g)
    }

    fn position(&self, h: &GroupElement) -> Result<i64> {
        let m = self.base.index_of(&(*h * self.g_inv))?;
        Ok(self.backward.get(&m).copied().unwrap_or(m))
    }

    fn provenance(&self) -> Provenance {
        Provenance::TailModified
    }
}

type RuleFn = Box<dyn Fn(i64) -> GroupElement + Send + Sync>;

struct FnRule {
    group: GroupKind,
    f: RuleFn,
    search_cap: i64,
}

impl OrderRule for FnRule {
    fn group(&self) -> GroupKind {
        self.group
    }

    fn at(&self, k: i64) -> Result<GroupElement> {
        Ok((self.f)(k))
    }

    fn position(&self, g: &GroupElement) -> Result<i64> {
        for r in 0..=self.search_cap {
            if (self.f)(r) == *g {
                return Ok(r);
            }
            if r > 0 && (self.f)(-r) == *g {
                return Ok(-r);
            }
        }
        Err(Error::horizon(format!("{g} not found within |k| <= {}", self.search_cap)))
    }

    fn provenance(&self) -> Provenance {
        Provenance::Custom
    }
}
