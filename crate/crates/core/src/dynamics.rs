//! Full shifts `A^G`, the successor maps `S` and `S̃`, and the identity checks
//! tying the ℤ-action generated by `S` back to the `G`-action.
//!
//! The shift action is `(g·x)(h) = x(h·g)`. With this convention
//! `h·(g·x) = (hg)·x`, which is the same composition law as the action on
//! orders (`h(g(≺)) = (hg)(≺)`), and `S^k(x, ≺) = (k^≺·x, k^≺(≺))`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Bounded, Dyadic};
use crate::group::{GroupElement, GroupKind};
use crate::order::Order;
use crate::prf::{prf, split};

#[derive(Clone)]
enum ConfigRule {
    Random { seed: u64 },
    Periodic { periods: Vec<i64> },
    Constant { symbol: u16 },
    Overlay { base: ShiftConfiguration, flips: BTreeSet<GroupElement> },
    OrderParityFlip { base: ShiftConfiguration, order: Order, parity: i64 },
}

/// A point of the full shift `A^G`, `|A| = alphabet`, given by a
/// deterministic rule and a pending right translation.
#[derive(Clone)]
pub struct ShiftConfiguration {
    group: GroupKind,
    alphabet: u16,
    rule: Arc<ConfigRule>,
    translate: GroupElement,
}

impl ShiftConfiguration {
    fn with_rule(group: GroupKind, alphabet: u16, rule: ConfigRule) -> Result<Self> {
        if !(2..=256).contains(&alphabet) {
            return Err(Error::usage(format!("alphabet size {alphabet} outside 2..=256")));
        }
        Ok(ShiftConfiguration { group, alphabet, rule: Arc::new(rule), translate: group.identity() })
    }

    /// Symbols drawn from a counter-based PRF of the site coordinates.
    pub fn random(group: GroupKind, alphabet: u16, seed: u64) -> Result<Self> {
        Self::with_rule(group, alphabet, ConfigRule::Random { seed })
    }

    /// `x(h) = (Σ_i h_i mod p_i) mod |A|`; a single period applies to every axis.
    pub fn periodic(group: GroupKind, alphabet: u16, periods: Vec<i64>) -> Result<Self> {
        if periods.is_empty() || periods.iter().any(|&p| p < 1) {
            return Err(Error::usage("periods must be positive"));
        }
        if periods.len() != 1 && periods.len() != group.dim() {
            return Err(Error::usage(format!("{} periods given for a rank-{} group", periods.len(), group.dim())));
        }
        Self::with_rule(group, alphabet, ConfigRule::Periodic { periods })
    }

    pub fn constant(group: GroupKind, alphabet: u16, symbol: u16) -> Result<Self> {
        if symbol >= alphabet {
            return Err(Error::usage(format!("symbol {symbol} not in an alphabet of size {alphabet}")));
        }
        Self::with_rule(group, alphabet, ConfigRule::Constant { symbol })
    }

    /// `base` with the symbol at each site of `flips` replaced by its successor mod `|A|`.
    pub fn overlay(base: &ShiftConfiguration, flips: impl IntoIterator<Item = GroupElement>) -> Result<Self> {
        let flips: BTreeSet<GroupElement> = flips.into_iter().collect();
        if flips.iter().any(|g| g.kind() != base.group) {
            return Err(Error::usage("flip site from a different group"));
        }
        Self::with_rule(base.group, base.alphabet, ConfigRule::Overlay { base: base.clone(), flips })
    }

    /// `base` flipped at every site `s` with `index_of(s) ≥ 0` and
    /// `index_of(s) ≡ parity (mod 2)`. Sites the order cannot locate are left
    /// unflipped.
    pub fn order_parity_flip(base: &ShiftConfiguration, order: &Order, parity: i64) -> Result<Self> {
        if order.group() != base.group {
            return Err(Error::usage("order and configuration live on different groups"));
        }
        Self::with_rule(
            base.group,
            base.alphabet,
            ConfigRule::OrderParityFlip { base: base.clone(), order: order.clone(), parity: parity.rem_euclid(2) },
        )
    }

    pub fn group(&self) -> GroupKind {
        self.group
    }

    pub fn alphabet(&self) -> u16 {
        self.alphabet
    }

    /// Finite difference set of an overlay, in canonical element order.
    pub fn flips(&self) -> Option<Vec<GroupElement>> {
        match &*self.rule {
            ConfigRule::Overlay { flips, .. } => Some(flips.iter().map(|f| *f * self.translate.inv()).collect()),
            _ => None,
        }
    }

    pub fn symbol_at(&self, site: &GroupElement) -> u16 {
        self.eval(&(*site * self.translate))
    }

    fn eval(&self, s: &GroupElement) -> u16 {
        let a = self.alphabet;
        match &*self.rule {
            ConfigRule::Random { seed } => (prf(*seed, s.coords()) % a as u64) as u16,
            ConfigRule::Periodic { periods } => {
                let sum: i64 = s
                    .coords()
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c.rem_euclid(periods[i.min(periods.len() - 1)]))
                    .sum();
                (sum % a as i64) as u16
            }
            ConfigRule::Constant { symbol } => *symbol,
            ConfigRule::Overlay { base, flips } => {
                let v = base.symbol_at(s);
                if flips.contains(s) {
                    (v + 1) % a
                } else {
                    v
                }
            }
            ConfigRule::OrderParityFlip { base, order, parity } => {
                let v = base.symbol_at(s);
                match order.index_of(s) {
                    Ok(k) if k >= 0 && k.rem_euclid(2) == *parity => (v + 1) % a,
                    _ => v,
                }
            }
        }
    }

    /// A fresh independent draw for a random configuration (`None` for
    /// every other rule).
    pub fn reseeded(&self, stream: u64) -> Option<ShiftConfiguration> {
        match &*self.rule {
            ConfigRule::Random { seed } => Some(ShiftConfiguration {
                group: self.group,
                alphabet: self.alphabet,
                rule: Arc::new(ConfigRule::Random { seed: split(*seed, stream) }),
                translate: self.translate,
            }),
            _ => None,
        }
    }

    /// Structural identity: same rule object and same translation.
    pub fn same_as(&self, other: &ShiftConfiguration) -> bool {
        Arc::ptr_eq(&self.rule, &other.rule) && self.translate == other.translate
    }

    /// Equality on a declared finite site set.
    pub fn agrees_on(&self, other: &ShiftConfiguration, sites: &[GroupElement]) -> bool {
        sites.iter().all(|s| self.symbol_at(s) == other.symbol_at(s))
    }

    /// Parse `random:alphabet=2:seed=7`, `periodic:alphabet=2:periods=2,3`,
    /// `constant:alphabet=2:symbol=0` or `overlay:base=<spec>:flips=<e1>;<e2>`.
    pub fn parse(group: GroupKind, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, rest) = spec.split_once(':').unwrap_or((spec, ""));
        if kind == "overlay" {
            let rest = rest
                .strip_prefix("base=")
                .ok_or_else(|| Error::parse("overlay spec must start with base="))?;
            let (base, flips) = rest
                .rsplit_once(":flips=")
                .ok_or_else(|| Error::parse("overlay spec needs :flips="))?;
            let base = Self::parse(group, base)?;
            let flips = flips
                .split(';')
                .filter(|t| !t.trim().is_empty())
                .map(|t| group.parse_element(t))
                .collect::<Result<Vec<_>>>()?;
            return Self::overlay(&base, flips);
        }
        let mut fields = HashMap::new();
        for part in rest.split(':').filter(|p| !p.is_empty()) {
            let (k, v) = part
                .split_once('=')
                .ok_or_else(|| Error::parse(format!("expected key=value, got {part:?}")))?;
            fields.insert(k.trim(), v.trim());
        }
        let num = |key: &str, default: Option<u64>| -> Result<u64> {
            match fields.get(key) {
                Some(v) => v.parse().map_err(|e| Error::parse(format!("{key}={v}: {e}"))),
                None => default.ok_or_else(|| Error::parse(format!("{kind} spec needs {key}="))),
            }
        };
        let alphabet = u16::try_from(num("alphabet", Some(2))?).map_err(|_| Error::parse("alphabet too large"))?;
        match kind {
            "random" => Self::random(group, alphabet, num("seed", None)?),
            "constant" => Self::constant(group, alphabet, num("symbol", Some(0))? as u16),
            "periodic" => {
                let periods = fields
                    .get("periods")
                    .ok_or_else(|| Error::parse("periodic spec needs periods="))?
                    .split(',')
                    .map(|p| p.trim().parse::<i64>().map_err(|e| Error::parse(format!("period {p:?}: {e}"))))
                    .collect::<Result<Vec<_>>>()?;
                Self::periodic(group, alphabet, periods)
            }
            other => Err(Error::parse(format!("unknown configuration kind {other:?}"))),
        }
        .map_err(|e| match e {
            Error::Usage(m) => Error::Parse(m),
            e => e,
        })
    }
}

impl fmt::Debug for ShiftConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.rule {
            ConfigRule::Random { .. } => "random",
            ConfigRule::Periodic { .. } => "periodic",
            ConfigRule::Constant { .. } => "constant",
            ConfigRule::Overlay { .. } => "overlay",
            ConfigRule::OrderParityFlip { .. } => "order-parity-flip",
        };
        f.debug_struct("ShiftConfiguration")
            .field("group", &self.group)
            .field("alphabet", &self.alphabet)
            .field("rule", &kind)
            .field("translate", &self.translate)
            .finish()
    }
}

/// `g·x`, i.e. `(g·x)(h) = x(h·g)`.
pub fn shift_act(g: &GroupElement, x: &ShiftConfiguration) -> ShiftConfiguration {
    assert_eq!(g.kind(), x.group, "mixed-group shift action");
    ShiftConfiguration { translate: *g * x.translate, ..x.clone() }
}

/// A point `(x, ≺)` of the product system.
#[derive(Clone, Debug)]
pub struct ProductPoint {
    pub config: ShiftConfiguration,
    pub order: Order,
}

impl ProductPoint {
    pub fn new(config: ShiftConfiguration, order: Order) -> Result<Self> {
        if config.group() != order.group() {
            return Err(Error::usage("configuration and order on different groups"));
        }
        Ok(ProductPoint { config, order })
    }

    /// Apply one group element to both coordinates.
    pub fn act(&self, g: &GroupElement) -> Result<ProductPoint> {
        Ok(ProductPoint { config: shift_act(g, &self.config), order: self.order.act(g)? })
    }

    /// Equality of configurations on `sites` and of orders on `[-r, r]`.
    pub fn agrees_on(&self, other: &ProductPoint, sites: &[GroupElement], order_radius: i64) -> Result<bool> {
        if !self.config.agrees_on(&other.config, sites) {
            return Ok(false);
        }
        for k in -order_radius..=order_radius {
            if self.order.element_at(k)? != other.order.element_at(k)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `S(x, ≺) = (1^≺·x, 1^≺(≺))`; the order part alone is `S̃`.
pub fn successor_s(p: &ProductPoint) -> Result<ProductPoint> {
    let g = p.order.element_at(1)?;
    p.act(&g)
}

/// `S̃(≺) = 1^≺(≺)`.
pub fn successor_order(order: &Order) -> Result<Order> {
    order.act(&order.element_at(1)?)
}

/// `S^k` computed as `k` successive applications of [`successor_s`].
pub fn iterate_s(p: &ProductPoint, k: u64) -> Result<ProductPoint> {
    let mut q = p.clone();
    for _ in 0..k {
        q = successor_s(&q)?;
    }
    Ok(q)
}

/// `(k^≺·x, k^≺(≺))` computed in one step.
pub fn direct_iterate(p: &ProductPoint, k: i64) -> Result<ProductPoint> {
    p.act(&p.order.element_at(k)?)
}

#[derive(Clone, Debug)]
pub struct OrbitCheck {
    pub passed: bool,
    /// `(k, k^≺)`: the group element realizing `S^k` at this point.
    pub witnesses: Vec<(u64, GroupElement)>,
    pub first_failure: Option<u64>,
}

/// Check that every `S^k(p)`, `k ∈ ks`, equals the image of `p` under the
/// single group element `k^≺`, on the observation set `sites` and order
/// window `[-order_radius, order_radius]`.
pub fn orbit_membership_check(
    p: &ProductPoint,
    ks: impl IntoIterator<Item = u64>,
    sites: &[GroupElement],
    order_radius: i64,
) -> Result<OrbitCheck> {
    let ks: BTreeSet<u64> = ks.into_iter().collect();
    let mut witnesses = Vec::with_capacity(ks.len());
    let mut first_failure = None;
    let mut walker = p.clone();
    let mut at = 0u64;
    for &k in &ks {
        while at < k {
            walker = successor_s(&walker)?;
            at += 1;
        }
        let g = p.order.element_at(k as i64)?;
        let direct = p.act(&g)?;
        if !walker.agrees_on(&direct, sites, order_radius)? && first_failure.is_none() {
            first_failure = Some(k);
        }
        witnesses.push((k, g));
    }
    Ok(OrbitCheck { passed: first_failure.is_none(), witnesses, first_failure })
}

/// `Σ_{n≤N} 2^{-n}·[x(g_n) ≠ y(g_n)]` with tail bound `2^{-N}`.
pub fn point_metric(x: &ShiftConfiguration, y: &ShiftConfiguration, depth: u32) -> Bounded {
    assert_eq!(x.group(), y.group(), "point metric across groups");
    let group = x.group();
    let value = (1..=depth as u64)
        .filter(|&n| {
            let s = group.enumerate(n);
            x.symbol_at(&s) != y.symbol_at(&s)
        })
        .map(Dyadic::pow2_neg)
        .sum();
    Bounded { value, error_bound: Dyadic::pow2_neg(depth as u64) }
}

/// Plug-in Shannon entropy (bits per symbol) of the words
/// `(x(k^≺))_{0≤k<n}` over `x = source(0), …, source(n_samples - 1)`.
pub fn block_entropy_estimate<F>(source: F, order: &Order, n: usize, n_samples: usize) -> Result<f64>
where
    F: Fn(u64) -> ShiftConfiguration + Sync,
{
    if n == 0 || n_samples == 0 {
        return Err(Error::usage("block length and sample count must be positive"));
    }
    let sites = (0..n as i64).map(|k| order.element_at(k)).collect::<Result<Vec<_>>>()?;
    let words: Vec<Vec<u16>> = (0..n_samples as u64)
        .into_par_iter()
        .map(|s| {
            let x = source(s);
            sites.iter().map(|g| x.symbol_at(g)).collect()
        })
        .collect();
    let mut counts: BTreeMap<&[u16], usize> = BTreeMap::new();
    for w in &words {
        *counts.entry(w.as_slice()).or_default() += 1;
    }
    let total = n_samples as f64;
    let h: f64 = counts
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // + 0.0 turns the -0.0 of a single-word law into 0
    Ok(h / n as f64 + 0.0)
}
