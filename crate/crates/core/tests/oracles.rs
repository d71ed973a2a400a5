//! Implementation results checked against independent brute-force oracles.

mod common;

use std::collections::HashMap;
use std::sync::Arc;

use common::*;
use mapsearch::placement::{optimize_center, PlacementConfig};
use mapsearch::selection::{
    assign_tiers, bookability_filter, AdaptiveRank, AnchorStrategy, FilterConfig, MedianTop3,
    Topmost,
};
use mapsearch::{
    expected_booking, ndcg, rank_by_logit, AttentionModel, AttentionSurface, DisplaySet, Listing,
    PinTier, PositionalWeights,
};
use rand::Rng;

#[test]
fn ranking_matches_full_sort() {
    let mut rng = rng(1);
    for _ in 0..20 {
        // coarse logits so ties actually occur
        let listings: Vec<Listing> = (0..100)
            .map(|i| {
                listing(
                    &format!("id{:03}", (i * 37) % 100),
                    -(rng.random_range(0..20) as f64) / 4.0,
                )
            })
            .collect();
        let mut oracle: Vec<(f64, String)> =
            listings.iter().map(|l| (l.logit, l.id.clone())).collect();
        oracle.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
        let ranked = rank_by_logit(&listings).unwrap();
        let ids: Vec<&str> = ranked.ids().collect();
        let expected: Vec<&str> = oracle.iter().map(|(_, id)| id.as_str()).collect();
        assert_eq!(ids, expected);
    }
}

#[test]
fn list_weight_example_by_hand() {
    let d = DisplaySet::list(vec![
        with_probability("a", 0.3, 0.0, 0.0),
        with_probability("b", 0.6, 0.0, 0.0),
    ])
    .unwrap();
    let attn = AttentionModel::ListPositional(PositionalWeights::new(vec![1.0, 0.5]).unwrap());
    // (2/3) * 0.3 + (1/3) * 0.6
    assert!((expected_booking(&d, &attn).unwrap() - 0.4).abs() < 1e-12);
}

#[test]
fn logit_sorted_list_is_the_unique_best_permutation() {
    let mut rng = rng(2);
    for n in 2..=7 {
        for _ in 0..10 {
            let probs: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..0.9)).collect();
            let listings: Vec<Listing> = probs
                .iter()
                .enumerate()
                .map(|(i, p)| with_probability(&format!("l{i}"), *p, 0.0, 0.0))
                .collect();
            let attn = AttentionModel::harmonic_list(n);
            let sorted = rank_by_logit(&listings).unwrap().into_listings();
            let best = expected_booking(&DisplaySet::list(sorted.clone()).unwrap(), &attn).unwrap();
            for perm in permutations(n) {
                let order: Vec<Listing> = perm.iter().map(|&i| listings[i].clone()).collect();
                let value =
                    expected_booking(&DisplaySet::list(order.clone()).unwrap(), &attn).unwrap();
                assert!(value <= best + 1e-15);
                let same_sequence = order.iter().zip(&sorted).all(|(a, b)| a.logit == b.logit);
                if !same_sequence {
                    assert!(value < best - 1e-15, "non-sorted order ties the optimum");
                }
            }
        }
    }
}

#[test]
fn uniform_map_ignores_order() {
    let mut rng = rng(3);
    let listings = random_listings(&mut rng, 6, 3.0);
    let reference = expected_booking(
        &DisplaySet::pins(listings.clone()).unwrap(),
        &AttentionModel::MapUniform,
    )
    .unwrap();
    for perm in permutations(6) {
        let order: Vec<Listing> = perm.iter().map(|&i| listings[i].clone()).collect();
        let v = expected_booking(
            &DisplaySet::pins(order).unwrap(),
            &AttentionModel::MapUniform,
        )
        .unwrap();
        assert!((v - reference).abs() < 1e-12);
    }
}

#[test]
fn ndcg_matches_definition() {
    let mut rng = rng(4);
    for _ in 0..200 {
        let n = rng.random_range(1..12);
        let k = rng.random_range(1..15);
        let rel: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..3.0)).collect();
        let ids: Vec<String> = (0..n).map(|i| format!("d{i}")).collect();
        let relevance: HashMap<String, f64> =
            ids.iter().cloned().zip(rel.iter().copied()).collect();
        let mut ideal = rel.clone();
        ideal.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let expected = brute_dcg(&rel, k) / brute_dcg(&ideal, k);
        let got = ndcg(ids.iter().map(String::as_str), &relevance, k).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }
    let relevance: HashMap<String, f64> = [("a".to_string(), 1.0), ("b".to_string(), 0.0)].into();
    let reversed = ndcg(["b", "a"], &relevance, 2).unwrap();
    assert!((reversed - 1.0 / 3f64.log2()).abs() < 1e-12);
}

/// Top `cap` by probability, anchor by the strategy's rule, then the
/// probability-space admission test.
fn brute_filter(
    listings: &[Listing],
    alpha: f64,
    anchor: &str,
    cap: usize,
    total: usize,
) -> Vec<String> {
    let mut by_prob: Vec<(f64, &str)> = listings
        .iter()
        .map(|l| (l.logit.exp(), l.id.as_str()))
        .collect();
    by_prob.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(b.1)));
    by_prob.truncate(cap);
    let p_anchor = match anchor {
        "topmost" => by_prob[0].0,
        "median" => {
            let mut top3: Vec<f64> = by_prob.iter().take(3).map(|x| x.0.ln()).collect();
            top3.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let m = top3.len();
            if m % 2 == 1 {
                top3[m / 2].exp()
            } else {
                ((top3[m / 2 - 1] + top3[m / 2]) / 2.0).exp()
            }
        }
        "adaptive" => {
            let rank = match total {
                0..=30 => 1,
                31..=100 => 2,
                101..=300 => 3,
                _ => 4,
            };
            by_prob[rank.min(by_prob.len()) - 1].0
        }
        _ => unreachable!(),
    };
    by_prob
        .iter()
        .filter(|(p, _)| *p > p_anchor / alpha.exp())
        .map(|(_, id)| id.to_string())
        .collect()
}

#[test]
fn filter_equals_probability_space_brute_force() {
    let mut rng = rng(5);
    let strategies: [(&str, Arc<dyn AnchorStrategy>); 3] = [
        ("topmost", Arc::new(Topmost)),
        ("median", Arc::new(MedianTop3)),
        ("adaptive", Arc::new(AdaptiveRank::default())),
    ];
    for _ in 0..1000 {
        let n = rng.random_range(1..40);
        let spread = rng.random_range(0.5..6.0);
        let listings = random_listings(&mut rng, n, spread);
        let alpha = rng.random_range(0.05..5.0);
        let total = rng.random_range(n..400);
        for (name, strategy) in &strategies {
            let cfg = FilterConfig::new(alpha, strategy.clone(), 18).unwrap();
            let got: Vec<String> = bookability_filter(&listings, &cfg, total)
                .unwrap()
                .listings()
                .map(|l| l.id.clone())
                .collect();
            assert_eq!(
                got,
                brute_filter(&listings, alpha, name, 18, total),
                "{name} alpha={alpha}"
            );
        }
    }
}

#[test]
fn prefix_tiering_is_optimal_among_equal_sized_assignments() {
    let mut rng = rng(6);
    let tiered = AttentionModel::tiered();
    for _ in 0..200 {
        let n = rng.random_range(2..=10);
        let listings = random_listings(&mut rng, n, 3.0);
        let ranked = rank_by_logit(&listings).unwrap();
        let cfg = FilterConfig::topmost(rng.random_range(0.1..2.0)).unwrap();
        let display = assign_tiers(&ranked, &cfg).unwrap();
        let regular = display.count_tier(PinTier::Regular);
        let value = expected_booking(&display, &tiered).unwrap();

        let mut best = f64::NEG_INFINITY;
        for chosen in combinations(n, regular) {
            let items = ranked
                .listings()
                .iter()
                .enumerate()
                .map(|(i, l)| mapsearch::DisplayItem {
                    listing: l.clone(),
                    list_rank: Some(i + 1),
                    tier: if chosen.contains(&i) {
                        PinTier::Regular
                    } else {
                        PinTier::Mini
                    },
                })
                .collect();
            let v = expected_booking(&DisplaySet::new(items, None).unwrap(), &tiered).unwrap();
            best = best.max(v);
        }
        assert!(value >= best - 1e-12, "prefix {value} < best {best}");
    }
}

/// Same candidates as the optimizer, built and scored independently:
/// optionally the centroid first, then the grid.
fn brute_center(
    pins: &[Listing],
    eps: f64,
    surface: &AttentionSurface,
    with_centroid: bool,
) -> ((f64, f64), f64) {
    let r = surface.resolution();
    let ctr = surface.ctr_values();
    let center = ctr[(r / 2) * r + r / 2];
    let lookup = |d: f64| -> Option<usize> {
        if !(-0.5..=0.5).contains(&d) {
            None
        } else {
            Some((((d + 0.5) * r as f64).floor() as usize).min(r - 1))
        }
    };
    let axis = |lo: f64, hi: f64| -> Vec<f64> {
        if hi <= lo {
            return vec![lo];
        }
        let mut v = Vec::new();
        let mut k = 0usize;
        loop {
            let c = lo + k as f64 * eps;
            if c >= hi {
                break;
            }
            v.push(c);
            k += 1;
        }
        v
    };
    let xs: Vec<f64> = pins.iter().map(|l| l.x).collect();
    let ys: Vec<f64> = pins.iter().map(|l| l.y).collect();
    let fold = |v: &[f64]| {
        v.iter()
            .fold((f64::MAX, f64::MIN), |(a, b), &x| (a.min(x), b.max(x)))
    };
    let ((x0, x1), (y0, y1)) = (fold(&xs), fold(&ys));
    let score = |i: f64, j: f64| -> f64 {
        let mut total = 0.0;
        for l in pins {
            if let (Some(ix), Some(iy)) = (lookup(l.x - i), lookup(l.y - j)) {
                total += ctr[iy * r + ix] / center * l.logit.exp();
            }
        }
        total
    };
    let mut candidates = Vec::new();
    if with_centroid {
        let n = pins.len() as f64;
        candidates.push((xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n));
    }
    for &i in &axis(x0, x1) {
        for &j in &axis(y0, y1) {
            candidates.push((i, j));
        }
    }
    let mut best = ((0.0, 0.0), f64::NEG_INFINITY);
    for (i, j) in candidates {
        let total = score(i, j);
        if total > best.1 {
            best = ((i, j), total);
        }
    }
    best
}

#[test]
fn placement_matches_exhaustive_grid() {
    let mut rng = rng(7);
    for _ in 0..200 {
        let n = rng.random_range(1..=20);
        let total = rng.random_range(n..n + 10);
        let listings = random_listings(&mut rng, total, 3.0);
        let surface = Arc::new(
            AttentionSurface::synthetic_radial(
                0.3,
                rng.random_range(0.05..0.4),
                rng.random_range(-0.1..0.1),
                21,
            )
            .unwrap(),
        );
        let eps = rng.random_range(0.02..0.2);
        let pins = rank_by_logit(&listings).unwrap().top(n).into_listings();
        for with_centroid in [true, false] {
            let mut cfg = PlacementConfig::new(n, eps, surface.clone()).unwrap();
            cfg.start_from_centroid = with_centroid;
            let placement = optimize_center(&listings, &cfg).unwrap();
            let (center, value) = brute_center(&pins, eps, &surface, with_centroid);
            assert_eq!(placement.pins, pins);
            assert_eq!(placement.center, center);
            assert_eq!(placement.objective, value);
        }
    }
}
