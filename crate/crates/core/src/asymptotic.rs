//! `≺`-asymptotic pairs: a pair `x ≠ y` with `d_X(k^≺·x, k^≺·y) → 0` as
//! `k → +∞`.
//!
//! A limit cannot be decided from finitely many terms, so every result here
//! is one of: certified (an explicit bound `ε(k) → 0` backs it), consistent
//! at the horizon, refuted (a witnessed lower bound that does not decay), or
//! inconclusive.

use std::fmt;

use rayon::prelude::*;
use serde::ser::SerializeTuple;
use serde::Serialize;

use crate::dynamics::{point_metric, shift_act, successor_order, ProductPoint, ShiftConfiguration};
use crate::error::{Error, Result};
use crate::exact::Dyadic;
use crate::group::GroupElement;
use crate::order::{order_metric, Order};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    CertifiedAsymptotic,
    ConsistentAtHorizon,
    Refuted,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::CertifiedAsymptotic => "certified-asymptotic",
            Verdict::ConsistentAtHorizon => "consistent-at-horizon",
            Verdict::Refuted => "refuted",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One profile sample `(k, value, bound)` of `point_metric(k^≺·x, k^≺·y, N)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProfileEntry {
    pub k: u64,
    pub value: Dyadic,
    pub bound: Dyadic,
}

impl Serialize for ProfileEntry {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.k)?;
        t.serialize_element(&self.value)?;
        t.serialize_element(&self.bound)?;
        t.end()
    }
}

/// Analytic guarantee for a constructed pair at metric depth `depth`:
/// for all `k ≥ k0` the truncated distance is exactly 0, so `d_X ≤ 2^{-depth}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairCertificate {
    pub depth: u32,
    pub k0: u64,
    pub epsilon: Dyadic,
    /// `(N', K₀(N'))` for `N' = 1..=depth`; nondecreasing in `N'`.
    pub schedule: Vec<(u32, u64)>,
}

impl PairCertificate {
    /// `ε(k) = 2^{-N'}` for the largest `N' ≤ depth` with `K₀(N') ≤ k`, else 1.
    pub fn epsilon_at(&self, k: u64) -> Dyadic {
        self.schedule
            .iter()
            .rev()
            .find(|&&(_, k0)| k0 <= k)
            .map_or_else(Dyadic::one, |&(n, _)| Dyadic::pow2_neg(n as u64))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PairVerdict {
    pub verdict: Verdict,
    #[serde(rename = "K")]
    pub horizon: u64,
    #[serde(rename = "N")]
    pub depth: u32,
    pub enumeration: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PairCertificate>,
    /// A `k ≥ K/2` whose truncated distance exceeds the refutation threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub refutation_k: Option<u64>,
    pub profile: Vec<ProfileEntry>,
}

impl PairVerdict {
    pub fn tail_max(&self) -> Dyadic {
        let half = self.horizon / 2;
        self.profile
            .iter()
            .filter(|e| e.k >= half)
            .map(|e| e.value.clone())
            .max()
            .unwrap_or_else(Dyadic::zero)
    }
}

/// Default refutation threshold.
pub fn default_threshold() -> Dyadic {
    Dyadic::pow2_neg(2)
}

/// [`pair_profile_with`] with the default threshold and no certificate.
pub fn pair_profile(x: &ShiftConfiguration, y: &ShiftConfiguration, order: &Order, horizon: u64, depth: u32) -> Result<PairVerdict> {
    pair_profile_with(x, y, order, horizon, depth, &default_threshold(), None)
}

/// Profile `point_metric(k^≺·x, k^≺·y, N)` for `k = 0..=K` and classify.
///
/// A supplied certificate must be for depth `N`; if the profile is nonzero
/// somewhere in `[K₀, K]` the certificate is wrong and an error is returned.
pub fn pair_profile_with(
    x: &ShiftConfiguration,
    y: &ShiftConfiguration,
    order: &Order,
    horizon: u64,
    depth: u32,
    threshold: &Dyadic,
    certificate: Option<&PairCertificate>,
) -> Result<PairVerdict> {
    if x.group() != order.group() || y.group() != order.group() {
        return Err(Error::usage("configurations and order on different groups"));
    }
    let profile = (0..=horizon)
        .into_par_iter()
        .map(|k| {
            let g = order.element_at(k as i64)?;
            let m = point_metric(&shift_act(&g, x), &shift_act(&g, y), depth);
            Ok(ProfileEntry { k, value: m.value, bound: m.error_bound })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut out = PairVerdict {
        verdict: Verdict::Inconclusive,
        horizon,
        depth,
        enumeration: order.group().enumeration_name(),
        certificate: None,
        refutation_k: None,
        profile,
    };
    if let Some(cert) = certificate {
        if cert.depth != depth {
            return Err(Error::usage(format!("certificate is for depth {}, profile uses {depth}", cert.depth)));
        }
        if let Some(bad) = out.profile.iter().find(|e| e.k >= cert.k0 && !e.value.is_zero()) {
            return Err(Error::Contradiction(format!(
                "profile value {} at k={} beyond certified K0={}",
                bad.value, bad.k, cert.k0
            )));
        }
        out.certificate = Some(cert.clone());
        out.verdict = Verdict::CertifiedAsymptotic;
        return Ok(out);
    }
    let half = horizon / 2;
    out.refutation_k = out.profile.iter().find(|e| e.k >= half && e.value > *threshold).map(|e| e.k);
    let consistent_bound = &Dyadic::pow2_neg(depth as u64) + &Dyadic::pow2_neg(depth as u64);
    out.verdict = if out.refutation_k.is_some() {
        Verdict::Refuted
    } else if out.tail_max() <= consistent_bound {
        Verdict::ConsistentAtHorizon
    } else {
        Verdict::Inconclusive
    };
    Ok(out)
}

/// Certificate source for a pair built by [`construct_pair`].
#[derive(Clone, Debug)]
pub struct FlipCertificate {
    order: Order,
    flips: Vec<GroupElement>,
}

impl FlipCertificate {
    pub fn flips(&self) -> &[GroupElement] {
        &self.flips
    }

    /// `K₀(N) = 1 + max{k ≥ 0 : k^≺ ∈ ⋃_{n≤N} g_n⁻¹·E}` (0 if the set is empty).
    ///
    /// `k^≺·x` and `k^≺·y` differ at `g_n` exactly when `g_n·k^≺ ∈ E`.
    pub fn k0(&self, depth: u32) -> Result<u64> {
        let group = self.order.group();
        let mut k0 = 0u64;
        for n in 1..=depth as u64 {
            let g_inv = group.enumerate(n).inv();
            for e in &self.flips {
                let k = self.order.index_of(&(g_inv * *e))?;
                if k >= 0 {
                    k0 = k0.max(k as u64 + 1);
                }
            }
        }
        Ok(k0)
    }

    pub fn certificate(&self, depth: u32) -> Result<PairCertificate> {
        let schedule = (1..=depth).map(|n| Ok((n, self.k0(n)?))).collect::<Result<Vec<_>>>()?;
        let k0 = schedule.last().map_or(0, |&(_, k)| k);
        Ok(PairCertificate { depth, k0, epsilon: Dyadic::pow2_neg(depth as u64), schedule })
    }
}

/// `y` = `x` with the symbols on the finite nonempty set `E` changed.
pub fn construct_pair(
    x: &ShiftConfiguration,
    order: &Order,
    flips: &[GroupElement],
) -> Result<(ShiftConfiguration, FlipCertificate)> {
    if flips.is_empty() {
        return Err(Error::usage("flip set must be nonempty, otherwise the pair is not distinct"));
    }
    if x.group() != order.group() {
        return Err(Error::usage("configuration and order on different groups"));
    }
    let y = ShiftConfiguration::overlay(x, flips.iter().copied())?;
    let cert = FlipCertificate { order: order.clone(), flips: y.flips().unwrap_or_default() };
    Ok((y, cert))
}

/// `k^A = k^B · g₀` for all `k₀ ≤ k ≤ verified_through`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LemmaWitness {
    pub k0: u64,
    pub g0: GroupElement,
    pub verified_through: u64,
}

impl Serialize for LemmaWitness {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("LemmaWitness", 3)?;
        st.serialize_field("k0", &self.k0)?;
        st.serialize_field("g0", &self.g0.encode())?;
        st.serialize_field("K", &self.verified_through)?;
        st.end()
    }
}

/// Smallest `k₀ ≤ K/2` with `g₀ = (k₀^B)⁻¹·k₀^A` satisfying `k^A = k^B·g₀`
/// on `[k₀, K]`, if any.
pub fn orders_asymptotic(a: &Order, b: &Order, horizon: u64) -> Result<Option<LemmaWitness>> {
    if a.group() != b.group() {
        return Err(Error::usage("orders on different groups"));
    }
    let diffs = (0..=horizon as i64)
        .map(|k| Ok(b.element_at(k)?.inv() * a.element_at(k)?))
        .collect::<Result<Vec<_>>>()?;
    // g₀ is forced by k₀, so the relation holds from k₀ on iff the quotient
    // sequence is constant on [k₀, K]
    let last = diffs[horizon as usize];
    let mut k0 = horizon as usize;
    while k0 > 0 && diffs[k0 - 1] == last {
        k0 -= 1;
    }
    Ok((k0 as u64 <= horizon / 2).then_some(LemmaWitness { k0: k0 as u64, g0: last, verified_through: horizon }))
}

/// Cross-check a witness against the order metric along `S̃`-orbits.
///
/// Checks: the witness relation on `[k₀, K]`; `1^{S̃^k(A)} = 1^{S̃^k(B)}` for
/// `k ≥ k₀`; the induction step "`k` related and successors agree ⇒ `k+1`
/// related"; and `order_metric(S̃^k(A), S̃^k(B), N) = 0` for every
/// `k₀ + N ≤ k ≤ K`.
pub fn lemma_metric_crosscheck(a: &Order, b: &Order, witness: &LemmaWitness, horizon: u64, depth: u32) -> Result<bool> {
    let related = |k: u64| -> Result<bool> { Ok(a.element_at(k as i64)? == b.element_at(k as i64)? * witness.g0) };
    for k in witness.k0..=horizon {
        if !related(k)? {
            return Ok(false);
        }
    }
    let (mut sa, mut sb) = (a.clone(), b.clone());
    for k in 0..=horizon {
        if k >= witness.k0 {
            let successors_agree = sa.element_at(1)? == sb.element_at(1)?;
            if !successors_agree {
                return Ok(false);
            }
            if k < horizon && related(k)? && !related(k + 1)? {
                return Ok(false);
            }
            if k >= witness.k0 + depth as u64 && !order_metric(&sa, &sb, depth)?.value.is_zero() {
                return Ok(false);
            }
        }
        if k < horizon {
            sa = successor_order(&sa)?;
            sb = successor_order(&sb)?;
        }
    }
    Ok(true)
}

#[derive(Clone, Debug)]
pub struct TransferOutcome {
    pub x: ShiftConfiguration,
    pub y: ShiftConfiguration,
    pub witness: LemmaWitness,
    /// `y` is literally `x` (same rule, same translation).
    pub degenerate: bool,
    pub verdict: PairVerdict,
}

/// Turn a pair that is asymptotic under `S` on the product into a
/// `≺_A`-asymptotic pair `(x, g₀⁻¹·x′)` on `X`.
pub fn transfer_pair(pa: &ProductPoint, pb: &ProductPoint, horizon: u64, depth: u32) -> Result<TransferOutcome> {
    let witness = orders_asymptotic(&pa.order, &pb.order, horizon)?.ok_or_else(|| {
        Error::Precondition(format!("orders are not asymptotic at horizon {horizon}: no witness found"))
    })?;
    let y = shift_act(&witness.g0.inv(), &pb.config);
    let verdict = pair_profile(&pa.config, &y, &pa.order, horizon, depth)?;
    let degenerate = pa.config.same_as(&y);
    Ok(TransferOutcome { x: pa.config.clone(), y, witness, degenerate, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::GroupKind;
    use crate::order::LazyOrder;

    fn z(n: i64) -> GroupElement {
        GroupKind::z(n)
    }

    #[test]
    fn identical_pair_is_consistent() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 1).unwrap();
        let v = pair_profile(&x, &x, &Order::standard(), 32, 6).unwrap();
        assert_eq!(v.verdict, Verdict::ConsistentAtHorizon);
        assert!(v.profile.iter().all(|e| e.value.is_zero() && e.bound == Dyadic::pow2_neg(6)));
    }

    #[test]
    fn construct_pair_standard_z_example() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 1).unwrap();
        let order = Order::standard();
        let (y, cert) = construct_pair(&x, &order, &[z(0)]).unwrap();
        assert_eq!(cert.k0(3).unwrap(), 2);
        let c = cert.certificate(3).unwrap();
        assert_eq!(c.schedule, vec![(1, 1), (2, 1), (3, 2)]);
        let v = pair_profile_with(&x, &y, &order, 20, 3, &default_threshold(), Some(&c)).unwrap();
        assert_eq!(v.verdict, Verdict::CertifiedAsymptotic);
        // the certificate is tight here: k = 1 still sees the flip at g_3 = -1
        assert!(!v.profile[1].value.is_zero());
        assert_eq!(c.epsilon_at(0), Dyadic::one());
        assert_eq!(c.epsilon_at(5), Dyadic::pow2_neg(3));
    }

    #[test]
    fn empty_flip_set_rejected() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 1).unwrap();
        assert!(matches!(construct_pair(&x, &Order::standard(), &[]), Err(Error::Usage(_))));
    }

    #[test]
    fn wrong_certificate_is_reported() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 1).unwrap();
        let (y, _) = construct_pair(&x, &Order::standard(), &[z(10)]).unwrap();
        let bogus = PairCertificate { depth: 3, k0: 0, epsilon: Dyadic::pow2_neg(3), schedule: vec![(3, 0)] };
        let err = pair_profile_with(&x, &y, &Order::standard(), 20, 3, &default_threshold(), Some(&bogus)).unwrap_err();
        assert!(matches!(err, Error::Contradiction(_)));
    }

    #[test]
    fn parity_flip_pair_is_refuted() {
        let order = Order::standard();
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 4).unwrap();
        let y = ShiftConfiguration::order_parity_flip(&x, &order, 0).unwrap();
        let v = pair_profile(&x, &y, &order, 64, 8).unwrap();
        assert_eq!(v.verdict, Verdict::Refuted);
        for e in v.profile.iter().filter(|e| e.k % 2 == 0) {
            assert!(e.value >= Dyadic::pow2_neg(1));
        }
    }

    #[test]
    fn orders_asymptotic_identical_and_tail_modified() {
        let a: Order = Order::standard();
        let w = orders_asymptotic(&a, &a, 64).unwrap().unwrap();
        assert_eq!((w.k0, w.g0), (0, z(0)));
        let b: Order = LazyOrder::standard().tail_modified(-2, 5, 1, 3).unwrap().into();
        let w = orders_asymptotic(&a, &b, 64).unwrap().unwrap();
        // k^B = k^A + 2 in the tail, so g0 = -2
        assert!(w.k0 <= 5);
        assert_eq!(w.g0, z(-2));
        assert!(lemma_metric_crosscheck(&a, &b, &w, 64, 6).unwrap());
        let corrupted = LemmaWitness { g0: z(-3), ..w };
        assert!(!lemma_metric_crosscheck(&a, &b, &corrupted, 64, 6).unwrap());
        // no witness: a pair that keeps diverging
        let c: Order = LazyOrder::from_fn(GroupKind::Z, |k| z(-k), 1 << 12).unwrap().into();
        assert!(orders_asymptotic(&a, &c, 64).unwrap().is_none());
    }

    #[test]
    fn transfer_identical_points() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 2).unwrap();
        let p = ProductPoint::new(x.clone(), Order::standard()).unwrap();
        let out = transfer_pair(&p, &p, 32, 5).unwrap();
        assert!(out.degenerate);
        assert_eq!(out.witness.g0, z(0));
        let naive = pair_profile(&x, &x, &p.order, 32, 5).unwrap();
        assert_eq!(out.verdict.profile, naive.profile);
    }

    #[test]
    fn transfer_requires_witness() {
        let x = ShiftConfiguration::random(GroupKind::Z, 2, 2).unwrap();
        let pa = ProductPoint::new(x.clone(), Order::standard()).unwrap();
        let rev: Order = LazyOrder::from_fn(GroupKind::Z, |k| z(-k), 1 << 12).unwrap().into();
        let pb = ProductPoint::new(x, rev).unwrap();
        assert!(matches!(transfer_pair(&pa, &pb, 32, 5), Err(Error::Precondition(_))));
    }
}
