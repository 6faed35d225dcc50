//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::process::ExitCode;
use std::time::Instant;

use multiorder::asymptotic::{lemma_metric_crosscheck, orders_asymptotic, LemmaWitness};
use multiorder::dynamics::{block_entropy_estimate, ProductPoint, ShiftConfiguration};
use multiorder::experiment::{self, ExperimentConfig};
use multiorder::exact::Dyadic;
use multiorder::group::{GroupElement, GroupKind};
use multiorder::multiorder::{invariance_test, Family, MultiorderSampler};
use multiorder::order::{act_relational, order_metric, reindex_check, Order, OrderWindow};
use multiorder::prf::prf;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const GROUPS: [GroupKind; 3] = [GroupKind::Z, GroupKind::Z2, GroupKind::H3];
const ORDERS_PER_GROUP: u64 = 100;
const ELEMENTS_PER_ORDER: u64 = 20;
const WINDOW_RADIUS: i64 = 32;

fn sampler(group: GroupKind) -> MultiorderSampler {
    MultiorderSampler::new(group, Family::Hierarchical, 20_240_601).unwrap()
}

/// Test-side element draw, coordinates uniform in `[-8, 8]`.
fn element(group: GroupKind, seed: u64, i: u64) -> GroupElement {
    let coords: Vec<i64> = (0..group.dim() as i64).map(|a| (prf(seed, &[i as i64, a]) % 17) as i64 - 8).collect();
    group.element(&coords).unwrap()
}

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

/// Criterion 1: `g(≺)` from the bijection formula against the relation `a ≺′ b ⟺ ag ≺ bg`:
/// sorting the acted window with the relational comparator must give the
/// window back, anchored, with consecutive relational positions.
fn criterion_equivariance() -> Outcome {
    let mut checked = 0usize;
    for group in GROUPS {
        let results: Vec<Result<usize, String>> = (0..ORDERS_PER_GROUP)
            .into_par_iter()
            .map(|s| {
                let order = Order::Lazy(sampler(group).sample(s));
                let mut n = 0;
                for i in 0..ELEMENTS_PER_ORDER {
                    let g = element(group, s, i);
                    let acted = order.act(&g).map_err(|e| e.to_string())?;
                    let rel = act_relational(&g, &order.comparator());
                    let window = acted.window(-WINDOW_RADIUS, WINDOW_RADIUS).map_err(|e| e.to_string())?;
                    let mut sorted = window.elements().to_vec();
                    sorted.sort_by(|a, b| rel.compare(a, b).unwrap());
                    let tuple = || format!("group {group} seed {s} g {g}");
                    check(sorted == window.elements(), || format!("relational sort differs: {}", tuple()))?;
                    check(window.element_at(0).unwrap().is_identity(), || format!("not anchored: {}", tuple()))?;
                    for w in sorted.windows(2) {
                        let gap = rel.key(&w[1]).unwrap() - rel.key(&w[0]).unwrap();
                        check(gap == 1, || format!("gap {gap} between {} and {}: {}", w[0], w[1], tuple()))?;
                    }
                    n += 1;
                }
                Ok(n)
            })
            .collect();
        for r in results {
            checked += r?;
        }
    }
    Ok(format!("{checked} (order, g) windows of radius {WINDOW_RADIUS} over Z, Z2, H3"))
}

/// Criterion 2: `reindex_check` on every `(order, g, i)` of the same plan.
fn criterion_reindexing() -> Outcome {
    let mut checked = 0usize;
    for group in GROUPS {
        let results: Vec<Result<usize, String>> = (0..ORDERS_PER_GROUP)
            .into_par_iter()
            .map(|s| {
                let order = Order::Lazy(sampler(group).sample(s));
                let mut n = 0;
                for j in 0..ELEMENTS_PER_ORDER {
                    let g = element(group, s, j);
                    for i in -WINDOW_RADIUS..=WINDOW_RADIUS {
                        let ok = reindex_check(&order, &g, i).map_err(|e| e.to_string())?;
                        check(ok, || format!("group {group} seed {s} g {g} i {i}"))?;
                        n += 1;
                    }
                }
                Ok(n)
            })
            .collect();
        for r in results {
            checked += r?;
        }
    }
    Ok(format!("{checked} (order, g, i) triples"))
}

/// Criterion 3: Walk `S` step by step (test-side loop) and compare with the single
/// translate `k^≺` on the radius-4 box, `k ≤ 64`.
fn criterion_successor_orbit() -> Outcome {
    let mut checked = 0usize;
    for group in GROUPS {
        let sites = group.folner_box(4);
        let results: Vec<Result<usize, String>> = (0..ORDERS_PER_GROUP)
            .into_par_iter()
            .map(|s| {
                let err = |e: multiorder::error::Error| e.to_string();
                let order = Order::Lazy(sampler(group).sample(s));
                let x = ShiftConfiguration::random(group, 2, s ^ 0x5eed).map_err(err)?;
                let start = ProductPoint::new(x, order).map_err(err)?;
                let mut walker = start.clone();
                for k in 0..=64u64 {
                    let direct = start.act(&start.order.element_at(k as i64).map_err(err)?).map_err(err)?;
                    for site in &sites {
                        check(walker.config.symbol_at(site) == direct.config.symbol_at(site), || {
                            format!("group {group} seed {s} k {k} site {site}")
                        })?;
                    }
                    for i in -4..=4 {
                        check(
                            walker.order.element_at(i).map_err(err)? == direct.order.element_at(i).map_err(err)?,
                            || format!("order mismatch: group {group} seed {s} k {k} i {i}"),
                        )?;
                    }
                    let step = walker.order.element_at(1).map_err(err)?;
                    walker = walker.act(&step).map_err(err)?;
                }
                Ok(65)
            })
            .collect();
        for r in results {
            checked += r?;
        }
    }
    Ok(format!("{checked} (seed, k) points on the radius-4 box"))
}

/// Criterion 4: Tail-translate positives and independent negatives at `K = 256`.
fn criterion_lemma_detector() -> Outcome {
    const K: u64 = 256;
    let mut positives = 0;
    let mut negatives = 0;
    for group in GROUPS {
        let others = MultiorderSampler::new(group, Family::Hierarchical, 99).unwrap();
        let results: Vec<Result<(), String>> = (0..100u64)
            .into_par_iter()
            .map(|s| {
                let err = |e: multiorder::error::Error| e.to_string();
                let a_lazy = sampler(group).sample(s);
                let a = Order::Lazy(a_lazy.clone());
                let j = (prf(s, &[1]) % 9) as i64 - 4;
                let splice = j.max(0) + 1 + (prf(s, &[2]) % 40) as i64;
                let b = Order::Lazy(a_lazy.tail_modified(j, splice, 8, s).map_err(err)?);
                let tuple = || format!("group {group} seed {s} j {j} splice {splice}");
                let w = orders_asymptotic(&a, &b, K).map_err(err)?.ok_or_else(|| format!("no witness: {}", tuple()))?;
                let formula = b.element_at(w.k0 as i64).map_err(err)?.inv() * a.element_at(w.k0 as i64).map_err(err)?;
                check(w.g0 == formula, || format!("g0 not (k0^B)^-1 k0^A: {}", tuple()))?;
                check(w.g0 == a.element_at(j).map_err(err)?, || format!("g0 not the construction's: {}", tuple()))?;
                check(w.k0 as i64 <= splice, || format!("k0 {} past splice: {}", w.k0, tuple()))?;
                check(lemma_metric_crosscheck(&a, &b, &w, K, 8).map_err(err)?, || format!("crosscheck: {}", tuple()))?;
                let bad = LemmaWitness { g0: w.g0 * group.enumerate(2), ..w };
                check(!lemma_metric_crosscheck(&a, &b, &bad, K, 8).map_err(err)?, || format!("corrupted accepted: {}", tuple()))?;
                let c = Order::Lazy(others.sample(s));
                let neg = orders_asymptotic(&a, &c, K).map_err(err)?;
                check(neg.is_none(), || format!("false witness on independent pair: group {group} seed {s}"))?;
                Ok(())
            })
            .collect();
        for r in results {
            r?;
            positives += 1;
            negatives += 1;
        }
    }
    Ok(format!("{positives}/{positives} positives found with g0 and crosscheck; 0/{negatives} false witnesses at K={K}"))
}

/// Criterion 5: `bhr-run` on ℤ², then an independent recount of `K₀(8)` by locating
/// every `g_n⁻¹` through `element_at` scans.
fn criterion_bhr_run() -> Outcome {
    let cfg = ExperimentConfig::from_text("group=Z2\nfamily=hierarchical\nseeds=0..100\nalphabet=2\nN=8\nK=512\n").unwrap();
    let report = experiment::run("bhr-run", &cfg).map_err(|e| e.to_string())?;
    let certified = report.records.iter().filter(|r| r["verdict"] == "certified-asymptotic").count();
    check(certified == 100, || format!("{certified}/100 certified"))?;
    check(report.passed(), || format!("{} seeds failed", report.failures))?;

    let group = GroupKind::Z2;
    let s = MultiorderSampler::new(group, cfg.family, cfg.sampler_seed).unwrap();
    let targets: Vec<GroupElement> = (1..=8).map(|n| group.enumerate(n).inv()).collect();
    let mut beyond_k = 0;
    for rec in &report.records {
        let seed = rec["seed"].as_u64().unwrap();
        let k0 = rec["k0"].as_u64().unwrap();
        let order = s.sample(seed);
        let mut found: BTreeMap<GroupElement, i64> = BTreeMap::new();
        let mut r = 0i64;
        while found.len() < targets.len() {
            check(r < 1 << 24, || format!("seed {seed}: targets not located within 2^24"))?;
            for k in [r, -r] {
                let g = order.element_at(k).unwrap();
                if targets.contains(&g) {
                    found.insert(g, k);
                }
            }
            r += 1;
        }
        let want = found.values().filter(|&&k| k >= 0).map(|&k| k as u64 + 1).max().unwrap_or(0);
        check(k0 == want, || format!("seed {seed}: certificate K0 {k0}, scan gives {want}"))?;
        // y differs from x only at e, so the depth-8 value at k is nonzero
        // exactly when k^≺ is one of the targets
        let profile = rec["profile"].as_array().unwrap();
        for e in profile {
            let k = e[0].as_u64().unwrap();
            let zero = e[1] == "0";
            let hits = targets.contains(&order.element_at(k as i64).unwrap());
            check(zero != hits, || format!("seed {seed}: profile at k={k} disagrees with the target scan"))?;
            check(k < k0 || zero, || format!("seed {seed}: nonzero at k={k} ≥ K0={k0}"))?;
        }
        check(rec["tail_scan"]["all_zero"] == true, || format!("seed {seed}: tail scan beyond K0 not zero"))?;
        if k0 > cfg.horizon {
            beyond_k += 1;
        }
    }
    Ok(format!(
        "100/100 certified on Z2 (N=8, K=512); K0 recounted independently; {beyond_k} seeds with K0 > K verified on [K0, K0+K]"
    ))
}

/// Criterion 6: Exact truncated distances against hand-computed values.
fn criterion_metric() -> Outcome {
    let window = |swap: Option<(usize, usize)>| {
        let mut e: Vec<i64> = (-6..=6).collect();
        if let Some((a, b)) = swap {
            e.swap(a, b);
        }
        Order::Window(OrderWindow::new(GroupKind::Z, -6, e.into_iter().map(GroupKind::z).collect()).unwrap())
    };
    let std = window(None);
    // (other, depth, value): swap of indices 1,2 is 1/8 + 1/16; of -1,-2 is 1/16 + 1/32
    let cases = [
        (window(Some((7, 8))), 4u32, "3/16"),
        (window(Some((7, 8))), 1, "1/8"),
        (window(Some((7, 8))), 6, "3/16"),
        (window(Some((5, 4))), 4, "3/32"),
        (std.clone(), 6, "0"),
    ];
    for (other, depth, want) in &cases {
        let m = order_metric(&std, other, *depth).map_err(|e| e.to_string())?;
        check(m.value.to_ratio_string() == *want, || format!("depth {depth}: got {}, want {want}", m.value))?;
        check(m.error_bound == Dyadic::pow2_neg(*depth as u64), || format!("depth {depth}: bound {}", m.error_bound))?;
    }
    Ok(format!("{} hand-computed values exact, bounds 2^-N", cases.len()))
}

/// Exact law of the radius-`m` pattern of `t(≺)` for the pair-swap order
/// (fair phase, fair independent swaps): the listing of `t(≺)` is the
/// listing of `≺` minus `t`, re-anchored where `t` sits.
fn pair_swap_exact_law(m: i64, t: i64) -> BTreeMap<String, f64> {
    let reach = m + t.abs() + 4;
    let first_block = (-reach - 2).div_euclid(2);
    let blocks = ((reach + 2).div_euclid(2) - first_block + 1) as u32;
    let mut law = BTreeMap::new();
    for phase in 0..2i64 {
        for coins in 0u64..(1 << blocks) {
            let mut listing = Vec::new();
            let mut p = -reach;
            while p <= reach {
                let block = (p - phase).div_euclid(2);
                if (p - phase).rem_euclid(2) == 0 && (coins >> (block - first_block)) & 1 == 1 {
                    listing.extend([p + 1, p]);
                    p += 2;
                } else {
                    listing.push(p);
                    p += 1;
                }
            }
            let at = listing.iter().position(|&v| v == t).unwrap() as i64;
            let key = ((at - m)..=(at + m)).map(|i| (listing[i as usize] - t).to_string()).collect::<Vec<_>>().join(" ");
            *law.entry(key).or_insert(0.0) += 0.5 / (1u64 << blocks) as f64;
        }
    }
    law
}

fn tv(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
    0.5 * keys.iter().map(|k| (a.get(*k).unwrap_or(&0.0) - b.get(*k).unwrap_or(&0.0)).abs()).sum::<f64>()
}

/// Criterion 7: Dirac: TV exactly 0. Pair-swap: both sampled pattern laws within 0.05
/// of the exact law.
fn criterion_invariance() -> Outcome {
    let n = 10_000;
    let dirac = MultiorderSampler::new(GroupKind::Z, Family::DiracStandardZ, 1).unwrap();
    let d = invariance_test(&dirac, &GroupKind::z(1), 2, n).map_err(|e| e.to_string())?;
    check(d.tv == 0.0, || format!("dirac TV {}", d.tv))?;

    let ps = MultiorderSampler::new(GroupKind::Z, Family::PairSwapZ, 1).unwrap();
    let est = invariance_test(&ps, &GroupKind::z(1), 2, n).map_err(|e| e.to_string())?;
    let exact = pair_swap_exact_law(2, 0);
    check(tv(&exact, &pair_swap_exact_law(2, 1)) < 1e-12, || "exact law not shift invariant".into())?;
    let law = |pick: fn(&(u64, u64)) -> u64| -> BTreeMap<String, f64> {
        est.counts.iter().map(|(k, c)| (k.clone(), pick(c) as f64 / n as f64)).filter(|(_, p)| *p > 0.0).collect()
    };
    let tv_order = tv(&law(|c| c.0), &exact);
    let tv_acted = tv(&law(|c| c.1), &exact);
    check(tv_order <= 0.05 && tv_acted <= 0.05, || format!("TV to exact law {tv_order:.4} / {tv_acted:.4}"))?;
    Ok(format!(
        "dirac TV = 0; pair-swap m=2 n={n}: TV to exact law {tv_order:.4} (≺), {tv_acted:.4} (g(≺)), empirical TV {:.4}",
        est.tv
    ))
}

/// Criterion 8: Block entropy along sampled orders: i.i.d. binary ≈ 1 bit, constant = 0.
fn criterion_entropy() -> Outcome {
    let mut summary = Vec::new();
    for group in [GroupKind::Z, GroupKind::Z2] {
        let order = Order::Lazy(sampler(group).sample(7));
        let base = ShiftConfiguration::random(group, 2, 3).unwrap();
        let h = block_entropy_estimate(|i| base.reseeded(i).unwrap(), &order, 10, 10_000).map_err(|e| e.to_string())?;
        check((h - 1.0).abs() <= 0.05, || format!("{group}: i.i.d. entropy {h}"))?;
        let c = ShiftConfiguration::constant(group, 2, 1).unwrap();
        let h0 = block_entropy_estimate(|_| c.clone(), &order, 10, 10_000).map_err(|e| e.to_string())?;
        check(h0 == 0.0, || format!("{group}: constant entropy {h0}"))?;
        summary.push(format!("{group}: {h:.4}"));
    }
    Ok(format!("i.i.d. binary {} bits/symbol (n=10, 10^4 samples); constant 0 exactly", summary.join(", ")))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("equivariance", criterion_equivariance),
        ("reindexing", criterion_reindexing),
        ("successor orbit", criterion_successor_orbit),
        ("lemma detector", criterion_lemma_detector),
        ("bhr-run", criterion_bhr_run),
        ("metric truncation", criterion_metric),
        ("invariance", criterion_invariance),
        ("entropy", criterion_entropy),
    ];
    // `cargo test -- <filter>` style arguments select criteria by name
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        if !filters.is_empty() && !filters.iter().any(|p| name.contains(p.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: {name}: PASS ({detail}) [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: {name}: FAIL ({why}) [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
