use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ClickRecord;
use crate::error::{Error, Result};

/// Which rank a click curve is keyed by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankKey {
    SearchRank,
    DistanceRank,
}

impl RankKey {
    fn of(self, record: &ClickRecord) -> usize {
        match self {
            RankKey::SearchRank => record.rank,
            RankKey::DistanceRank => record.distance_rank,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub rank: usize,
    pub impressions: u64,
    pub clicks: u64,
    pub ctr: f64,
    /// `ctr / ctr(rank 1)`.
    pub normalized: f64,
}

/// Click-through rate per rank, normalized by the rate at rank 1.
/// Ranks with no impressions do not appear.
pub fn ctr_by_rank_curve<'a, I>(logs: I, key: RankKey) -> Result<Vec<CurvePoint>>
where
    I: IntoIterator<Item = &'a ClickRecord>,
{
    let mut tally: BTreeMap<usize, (u64, u64)> = BTreeMap::new();
    for record in logs {
        let entry = tally.entry(key.of(record)).or_default();
        entry.0 += 1;
        entry.1 += u64::from(record.clicked);
    }
    let top = match tally.get(&1) {
        Some(&(imp, clk)) if clk > 0 => clk as f64 / imp as f64,
        _ => return Err(Error::MissingRankOne),
    };
    Ok(tally
        .into_iter()
        .map(|(rank, (impressions, clicks))| {
            let ctr = clicks as f64 / impressions as f64;
            CurvePoint {
                rank,
                impressions,
                clicks,
                ctr,
                normalized: ctr / top,
            }
        })
        .collect())
}

/// `log(2) / log(2 + avg_rank)`: 1 at rank 0, decreasing in rank, shaped
/// like the DCG position discount.
pub fn rank_distance_transform(avg_rank: f64) -> f64 {
    debug_assert!(avg_rank >= 0.0);
    std::f64::consts::LN_2 / (2.0 + avg_rank).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistancePoint {
    /// Midpoint of the distance bin.
    pub distance: f64,
    pub count: u64,
    pub avg_rank: f64,
    pub transformed: f64,
}

/// Average search rank of pins by distance from the map center, binned over
/// `[0, max_distance)`, with the rank transformed by
/// [`rank_distance_transform`]. Empty bins are skipped; pins beyond
/// `max_distance` land in the last bin.
pub fn rank_distance_curve<'a, I>(
    logs: I,
    bins: usize,
    max_distance: f64,
) -> Result<Vec<DistancePoint>>
where
    I: IntoIterator<Item = &'a ClickRecord>,
{
    if bins == 0 || max_distance.is_nan() || max_distance <= 0.0 {
        return Err(Error::InvalidConfig(
            "distance curve needs bins >= 1 and max_distance > 0".into(),
        ));
    }
    let width = max_distance / bins as f64;
    let mut sums = vec![(0u64, 0.0f64); bins];
    for record in logs {
        let d = record.dx.hypot(record.dy);
        let b = ((d / width) as usize).min(bins - 1);
        sums[b].0 += 1;
        sums[b].1 += record.rank as f64;
    }
    Ok(sums
        .into_iter()
        .enumerate()
        .filter(|(_, (n, _))| *n > 0)
        .map(|(b, (count, total))| {
            let avg_rank = total / count as f64;
            DistancePoint {
                distance: (b as f64 + 0.5) * width,
                count,
                avg_rank,
                transformed: rank_distance_transform(avg_rank),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::display::PinTier;

    fn rec(rank: usize, distance_rank: usize, clicked: bool) -> ClickRecord {
        ClickRecord {
            query_id: "q".into(),
            dx: 0.0,
            dy: 0.0,
            clicked,
            tier: PinTier::Regular,
            rank,
            distance_rank,
        }
    }

    #[test]
    fn transform_values() {
        assert_eq!(rank_distance_transform(0.0), 1.0);
        assert!((rank_distance_transform(2.0) - 0.5).abs() < 1e-15);
        let mut prev = f64::INFINITY;
        for r in 0..50 {
            let v = rank_distance_transform(r as f64 * 0.7);
            assert!(v < prev);
            prev = v;
        }
    }

    #[test]
    fn curve_is_normalized_by_rank_one() {
        let mut logs = Vec::new();
        for i in 0..100 {
            logs.push(rec(1, 2, i < 40));
            logs.push(rec(2, 1, i < 20));
        }
        // rank 3 never shown
        logs.push(rec(4, 3, false));
        let curve = ctr_by_rank_curve(&logs, RankKey::SearchRank).unwrap();
        let ranks: Vec<_> = curve.iter().map(|p| p.rank).collect();
        assert_eq!(ranks, [1, 2, 4]);
        assert_eq!(curve[0].normalized, 1.0);
        assert!((curve[1].normalized - 0.5).abs() < 1e-12);

        let by_distance = ctr_by_rank_curve(&logs, RankKey::DistanceRank).unwrap();
        assert!((by_distance[1].normalized - 2.0).abs() < 1e-12);
    }

    #[test]
    fn curve_without_rank_one_clicks_errors() {
        let logs = vec![rec(1, 1, false), rec(2, 2, true)];
        assert_eq!(
            ctr_by_rank_curve(&logs, RankKey::SearchRank),
            Err(Error::MissingRankOne)
        );
    }

    #[test]
    fn distance_curve_bins_average_rank() {
        let mut near = rec(1, 1, false);
        near.dx = 0.01;
        let mut near2 = rec(3, 2, false);
        near2.dy = 0.02;
        let mut far = rec(10, 3, false);
        far.dx = 0.45;
        let curve = rank_distance_curve(&[near, near2, far], 5, 0.5).unwrap();
        assert_eq!(curve.len(), 2);
        assert_eq!(curve[0].avg_rank, 2.0);
        assert!((curve[0].transformed - 0.5).abs() < 1e-15);
        assert_eq!(curve[1].avg_rank, 10.0);
    }
}
