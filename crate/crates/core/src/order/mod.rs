//! Orders of type ℤ on a countable group, always handled through their
//! anchored bijection `bi: ℤ → G` (`bi(0) = e`, `k^≺ = bi(k)`).
//!
//! Two representations share one operation surface: [`OrderWindow`] is a
//! finite, serializable segment; [`LazyOrder`] is a total rule. Queries that
//! leave the represented range fail with [`Error::Horizon`].

mod lazy;
mod window;

use std::cmp::Ordering;

pub use lazy::{LazyOrder, OrderRule, Provenance, DEFAULT_SEARCH_CAP};
pub use window::OrderWindow;

use crate::error::{Error, Result};
use crate::exact::{Bounded, Dyadic};
use crate::group::{GroupElement, GroupKind};

#[derive(Clone, Debug)]
pub enum Order {
    Window(OrderWindow),
    Lazy(LazyOrder),
}

impl From<OrderWindow> for Order {
    fn from(w: OrderWindow) -> Self {
        Order::Window(w)
    }
}

impl From<LazyOrder> for Order {
    fn from(l: LazyOrder) -> Self {
        Order::Lazy(l)
    }
}

impl Order {
    pub fn standard() -> Order {
        Order::Lazy(LazyOrder::standard())
    }

    pub fn group(&self) -> GroupKind {
        match self {
            Order::Window(w) => w.group(),
            Order::Lazy(l) => l.group(),
        }
    }

    pub fn provenance(&self) -> Option<Provenance> {
        match self {
            Order::Window(_) => None,
            Order::Lazy(l) => Some(l.provenance()),
        }
    }

    /// `k^≺`.
    pub fn element_at(&self, k: i64) -> Result<GroupElement> {
        match self {
            Order::Window(w) => w.element_at(k),
            Order::Lazy(l) => l.element_at(k),
        }
    }

    /// The unique `k` with `k^≺ = g`.
    pub fn index_of(&self, g: &GroupElement) -> Result<i64> {
        match self {
            Order::Window(w) => w.index_of(g),
            Order::Lazy(l) => l.index_of(g),
        }
    }

    /// `succ_≺(g) = bi(index_of(g) + 1)`.
    pub fn succ(&self, g: &GroupElement) -> Result<GroupElement> {
        self.element_at(self.index_of(g)? + 1)
    }

    pub fn compare(&self, a: &GroupElement, b: &GroupElement) -> Result<Ordering> {
        Ok(self.index_of(a)?.cmp(&self.index_of(b)?))
    }

    /// The order interval `[a, b]^≺`, endpoints included.
    pub fn interval(&self, a: &GroupElement, b: &GroupElement) -> Result<Vec<GroupElement>> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        if i > j {
            return Err(Error::usage(format!("interval endpoints out of order: {a} succeeds {b}")));
        }
        (i..=j).map(|k| self.element_at(k)).collect()
    }

    /// The action `g(≺)`: `i ↦ (i+k)^≺ · g⁻¹` with `g = k^≺`.
    pub fn act(&self, g: &GroupElement) -> Result<Order> {
        if g.kind() != self.group() {
            return Err(Error::usage(format!("cannot act by a {} element on an order on {}", g.kind(), self.group())));
        }
        Ok(match self {
            Order::Window(w) => Order::Window(w.act(g)?),
            Order::Lazy(l) => Order::Lazy(l.act(g)?),
        })
    }

    /// Materialize `bi(lo..=hi)`.
    pub fn window(&self, lo: i64, hi: i64) -> Result<OrderWindow> {
        if lo > 0 || hi < 0 {
            return Err(Error::usage(format!("window [{lo}, {hi}] must contain 0")));
        }
        let elements = (lo..=hi).map(|k| self.element_at(k)).collect::<Result<Vec<_>>>()?;
        OrderWindow::new(self.group(), lo, elements)
    }

    pub fn pattern_key(&self, radius: i64) -> Result<OrderPatternKey> {
        let elements = (-radius..=radius).map(|k| self.element_at(k)).collect::<Result<Vec<_>>>()?;
        Ok(OrderPatternKey { radius, elements })
    }

    pub fn comparator(&self) -> Comparator {
        Comparator { order: self.clone(), right: self.group().identity() }
    }
}

/// The relation `(a, b) ↦ compare(order, a·r, b·r)`.
///
/// This is the relational face of an order; [`Comparator::act`] is the action
/// `a ≺′ b ⟺ ag ≺ bg` written directly on relations.
#[derive(Clone, Debug)]
pub struct Comparator {
    order: Order,
    right: GroupElement,
}

impl Comparator {
    pub fn compare(&self, a: &GroupElement, b: &GroupElement) -> Result<Ordering> {
        Ok(self.key(a)?.cmp(&self.key(b)?))
    }

    /// Position of `a` in the underlying order after right translation;
    /// comparisons only ever look at differences of keys.
    pub fn key(&self, a: &GroupElement) -> Result<i64> {
        self.order.index_of(&(*a * self.right))
    }

    pub fn act(&self, g: &GroupElement) -> Comparator {
        Comparator { order: self.order.clone(), right: *g * self.right }
    }
}

/// `act_relational(g, c)`.
pub fn act_relational(g: &GroupElement, comparator: &Comparator) -> Comparator {
    comparator.act(g)
}

/// The tuple `(k^≺)_{k=-m..m}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrderPatternKey {
    pub radius: i64,
    pub elements: Vec<GroupElement>,
}

impl OrderPatternKey {
    pub fn encode(&self) -> String {
        self.elements.iter().map(|g| g.encode()).collect::<Vec<_>>().join(" ")
    }
}

/// Checks `i^{g(≺)} = (i+k)^≺ · g⁻¹` and `(-k)^{g(≺)} = g⁻¹` where `g = k^≺`.
///
/// Besides the element identity, the position of `i^{g(≺)}` is recomputed
/// through the relational action, which does not share code with `act`.
pub fn reindex_check(order: &Order, g: &GroupElement, i: i64) -> Result<bool> {
    let k = order.index_of(g)?;
    let acted = order.act(g)?;
    let g_inv = g.inv();
    let lhs = acted.element_at(i)?;
    let rhs = order.element_at(i + k)? * g_inv;
    let companion = acted.element_at(-k)? == g_inv;
    let rel = act_relational(g, &order.comparator());
    let rel_pos = rel.key(&lhs)? - rel.key(&order.group().identity())?;
    Ok(lhs == rhs && companion && rel_pos == i)
}

/// Truncated order-space metric `Σ_{|k|≤N} 2^{-|k|} ρ(k^≺, k^≺′)`.
///
/// The omitted tail is at most `2·2^{-N} · sup ρ = 2^{-N}`, returned as the
/// error bound.
pub fn order_metric(a: &Order, b: &Order, depth: u32) -> Result<Bounded> {
    if a.group() != b.group() {
        return Err(Error::usage("orders on different groups"));
    }
    let group = a.group();
    let n = depth as i64;
    let mut value = Dyadic::zero();
    for k in -n..=n {
        let (x, y) = (a.element_at(k)?, b.element_at(k)?);
        if x != y {
            let rho_exp = group.index_of(&x).min(group.index_of(&y));
            value = &value + &Dyadic::pow2_neg(rho_exp + k.unsigned_abs());
        }
    }
    Ok(Bounded { value, error_bound: Dyadic::pow2_neg(depth as u64) })
}
