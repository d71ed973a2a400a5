use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{AttentionSurface, CellSource};
use crate::display::PinTier;
use crate::error::{Error, Result};

/// One pin impression from a map search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClickRecord {
    pub query_id: String,
    /// Offset of the pin from the map center, viewport units.
    pub dx: f64,
    pub dy: f64,
    pub clicked: bool,
    pub tier: PinTier,
    /// Search rank of the listing.
    pub rank: usize,
    /// Rank of the pin by distance from the map center.
    pub distance_rank: usize,
}

/// Per-cell click and impression tallies. Merging is plain addition, so
/// counts folded over disjoint partitions of a log combine in any order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SurfaceCounts {
    resolution: usize,
    impressions: Vec<u64>,
    clicks: Vec<u64>,
    dropped: u64,
}

impl SurfaceCounts {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution == 0 || resolution.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "surface resolution must be odd and positive, got {resolution}"
            )));
        }
        let cells = resolution * resolution;
        Ok(Self {
            resolution,
            impressions: vec![0; cells],
            clicks: vec![0; cells],
            dropped: 0,
        })
    }

    fn cell(&self, d: f64) -> Option<usize> {
        if !(-0.5..=0.5).contains(&d) {
            return None;
        }
        Some((((d + 0.5) * self.resolution as f64).floor() as usize).min(self.resolution - 1))
    }

    pub fn add(&mut self, record: &ClickRecord) {
        match (self.cell(record.dx), self.cell(record.dy)) {
            (Some(ix), Some(iy)) => {
                let i = iy * self.resolution + ix;
                self.impressions[i] += 1;
                self.clicks[i] += u64::from(record.clicked);
            }
            _ => self.dropped += 1,
        }
    }

    pub fn merge(&mut self, other: &SurfaceCounts) {
        assert_eq!(
            self.resolution, other.resolution,
            "merging counts of different resolutions"
        );
        for (a, b) in self.impressions.iter_mut().zip(&other.impressions) {
            *a += b;
        }
        for (a, b) in self.clicks.iter_mut().zip(&other.clicks) {
            *a += b;
        }
        self.dropped += other.dropped;
    }

    /// Records that fell outside the viewport.
    pub fn dropped(&self) -> u64 {
        self.dropped
    }

    pub fn total_impressions(&self) -> u64 {
        self.impressions.iter().sum()
    }

    /// Turns tallies into a surface.
    ///
    /// Cells below `min_impressions` take the mean ctr of covered cells within
    /// Chebyshev distance 1, or 0 if there are none. The center cell has to
    /// be covered and clicked at least once, since every lookup divides by it.
    pub fn finish(&self, min_impressions: u64) -> Result<SurfaceEstimate> {
        let min_impressions = min_impressions.max(1);
        let r = self.resolution;
        let center = (r / 2) * r + r / 2;
        if self.impressions[center] < min_impressions || self.clicks[center] == 0 {
            return Err(Error::UncoveredCenter {
                impressions: self.impressions[center],
                clicks: self.clicks[center],
                required: min_impressions,
            });
        }

        let covered = |i: usize| self.impressions[i] >= min_impressions;
        let observed = |i: usize| self.clicks[i] as f64 / self.impressions[i] as f64;

        let mut ctr = vec![0.0; r * r];
        let mut sources = vec![CellSource::Observed; r * r];
        for iy in 0..r {
            for ix in 0..r {
                let i = iy * r + ix;
                if covered(i) {
                    ctr[i] = observed(i);
                    continue;
                }
                let mut sum = 0.0;
                let mut n = 0usize;
                for ny in iy.saturating_sub(1)..=(iy + 1).min(r - 1) {
                    for nx in ix.saturating_sub(1)..=(ix + 1).min(r - 1) {
                        let j = ny * r + nx;
                        if j != i && covered(j) {
                            sum += observed(j);
                            n += 1;
                        }
                    }
                }
                if n > 0 {
                    ctr[i] = sum / n as f64;
                    sources[i] = CellSource::NeighborFill;
                } else {
                    sources[i] = CellSource::Empty;
                }
            }
        }

        let filled = sources
            .iter()
            .filter(|s| **s == CellSource::NeighborFill)
            .count();
        let empty = sources.iter().filter(|s| **s == CellSource::Empty).count();
        let surface = AttentionSurface::from_parts(r, ctr, self.impressions.clone(), sources)?;
        Ok(SurfaceEstimate {
            surface,
            filled_cells: filled,
            empty_cells: empty,
            dropped_records: self.dropped,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SurfaceEstimate {
    pub surface: AttentionSurface,
    pub filled_cells: usize,
    pub empty_cells: usize,
    pub dropped_records: u64,
}

/// Click-through surface from a click log: clicks over impressions per cell.
///
/// `tier` restricts the estimate to one pin tier; `None` uses every record.
pub fn estimate_surface<'a, I>(
    logs: I,
    resolution: usize,
    min_impressions: u64,
    tier: Option<PinTier>,
) -> Result<SurfaceEstimate>
where
    I: IntoIterator<Item = &'a ClickRecord>,
{
    let mut counts = SurfaceCounts::new(resolution)?;
    for record in logs {
        if tier.is_none_or(|t| t == record.tier) {
            counts.add(record);
        }
    }
    counts.finish(min_impressions)
}

/// Same as [`estimate_surface`], folding each query's records separately on
/// the rayon pool and summing the tallies.
pub fn estimate_surface_par(
    logs: &[ClickRecord],
    resolution: usize,
    min_impressions: u64,
    tier: Option<PinTier>,
) -> Result<SurfaceEstimate> {
    use rayon::prelude::*;

    let mut by_query: HashMap<&str, Vec<&ClickRecord>> = HashMap::new();
    for record in logs {
        if tier.is_none_or(|t| t == record.tier) {
            by_query
                .entry(record.query_id.as_str())
                .or_default()
                .push(record);
        }
    }
    let partitions: Vec<Vec<&ClickRecord>> = by_query.into_values().collect();
    let empty = SurfaceCounts::new(resolution)?;
    let counts = partitions
        .par_iter()
        .map(|part| {
            let mut counts = empty.clone();
            for record in part {
                counts.add(record);
            }
            counts
        })
        .reduce(
            || empty.clone(),
            |mut a, b| {
                a.merge(&b);
                a
            },
        );
    counts.finish(min_impressions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(dx: f64, dy: f64, clicked: bool) -> ClickRecord {
        ClickRecord {
            query_id: "q".into(),
            dx,
            dy,
            clicked,
            tier: PinTier::Regular,
            rank: 1,
            distance_rank: 1,
        }
    }

    #[test]
    fn cell_ctr_is_clicks_over_impressions() {
        let logs: Vec<_> = (0..100).map(|i| rec(0.0, 0.0, i < 8)).collect();
        let est = estimate_surface(&logs, 3, 1, None).unwrap();
        assert!((est.surface.center_ctr() - 0.08).abs() < 1e-15);
        assert_eq!(est.surface.impressions_at_cell(1, 1), 100);
    }

    #[test]
    fn uncovered_cell_takes_neighbor_mean() {
        // Resolution 3: fill every cell but (2, 1).
        let mut logs = Vec::new();
        for iy in 0..3 {
            for ix in 0..3 {
                if (ix, iy) == (2, 1) {
                    continue;
                }
                let (dx, dy) = (ix as f64 / 3.0 - 1.0 / 3.0, iy as f64 / 3.0 - 1.0 / 3.0);
                let clicks = ix + iy + 1;
                for k in 0..10 {
                    logs.push(rec(dx, dy, k < clicks));
                }
            }
        }
        let est = estimate_surface(&logs, 3, 1, None).unwrap();
        // Neighbors of (2,1): (1,0),(2,0),(1,1),(1,2),(2,2) -> clicks 2,3,3,4,5 of 10.
        assert!((est.surface.ctr_at_cell(2, 1) - 0.34).abs() < 1e-12);
        assert_eq!(est.surface.source_at_cell(2, 1), CellSource::NeighborFill);
        assert_eq!(est.filled_cells, 1);
    }

    #[test]
    fn isolated_empty_cell_is_zero() {
        let logs: Vec<_> = (0..10).map(|i| rec(0.0, 0.0, i == 0)).collect();
        let est = estimate_surface(&logs, 5, 1, None).unwrap();
        assert_eq!(est.surface.ctr_at_cell(0, 0), 0.0);
        assert_eq!(est.surface.source_at_cell(0, 0), CellSource::Empty);
        assert_eq!(est.surface.source_at_cell(1, 1), CellSource::NeighborFill);
    }

    #[test]
    fn uncovered_center_is_an_error() {
        assert!(matches!(
            estimate_surface(&[], 21, 1, None),
            Err(Error::UncoveredCenter { .. })
        ));
        let logs: Vec<_> = (0..5).map(|_| rec(0.0, 0.0, true)).collect();
        assert!(estimate_surface(&logs, 21, 10, None).is_err());
    }

    #[test]
    fn out_of_viewport_records_are_dropped() {
        let logs = vec![rec(0.0, 0.0, true), rec(0.7, 0.0, true)];
        let est = estimate_surface(&logs, 3, 1, None).unwrap();
        assert_eq!(est.dropped_records, 1);
    }

    #[test]
    fn tier_split_surfaces_give_the_attention_ratio() {
        let mut logs = Vec::new();
        for i in 0..800 {
            logs.push(rec(0.0, 0.0, i < 80));
            let mut mini = rec(0.0, 0.0, i < 10);
            mini.tier = PinTier::Mini;
            logs.push(mini);
        }
        let regular = estimate_surface(&logs, 3, 1, Some(PinTier::Regular)).unwrap();
        let mini = estimate_surface(&logs, 3, 1, Some(PinTier::Mini)).unwrap();
        let ratio = regular.surface.center_ctr() / mini.surface.center_ctr();
        assert!((ratio - 8.0).abs() < 1e-12);
    }

    #[test]
    fn parallel_estimate_matches_sequential() {
        let logs: Vec<_> = (0..500)
            .map(|i| {
                let mut r = rec(
                    ((i % 7) as f64 - 3.0) / 7.0,
                    ((i % 5) as f64 - 2.0) / 5.0,
                    i % 3 == 0,
                );
                r.query_id = format!("q{}", i % 13);
                r
            })
            .collect();
        let a = estimate_surface(&logs, 7, 1, None).unwrap();
        let b = estimate_surface_par(&logs, 7, 1, None).unwrap();
        assert_eq!(a, b);
    }
}
