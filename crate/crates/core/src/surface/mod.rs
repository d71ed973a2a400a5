//! Two-dimensional click-through surfaces indexed by offset from the map
//! center, plus the log-derived diagnostics built on them.
//!
//! The grid covers one viewport, `[-0.5, 0.5]` on each axis, split into an
//! odd number of square cells so that one cell sits on the center. Cells are
//! stored row-major with rows along `dy`: `index = iy * resolution + ix`.

mod curves;
mod estimate;

pub use curves::{
    ctr_by_rank_curve, rank_distance_curve, rank_distance_transform, CurvePoint, DistancePoint,
    RankKey,
};
pub use estimate::{
    estimate_surface, estimate_surface_par, ClickRecord, SurfaceCounts, SurfaceEstimate,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RESOLUTION: usize = 21;

/// Where a cell's value came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellSource {
    Observed,
    /// Too few impressions; filled with the mean of covered neighbors.
    NeighborFill,
    /// Too few impressions and no covered neighbor; value is 0.
    Empty,
    /// Evaluated from a closed-form surface.
    Analytic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SurfaceData", into = "SurfaceData")]
pub struct AttentionSurface {
    resolution: usize,
    ctr: Vec<f64>,
    impressions: Vec<u64>,
    sources: Vec<CellSource>,
}

#[derive(Serialize, Deserialize)]
struct SurfaceData {
    resolution: usize,
    ctr: Vec<f64>,
    impressions: Vec<u64>,
    #[serde(default)]
    sources: Option<Vec<CellSource>>,
}

impl TryFrom<SurfaceData> for AttentionSurface {
    type Error = Error;

    fn try_from(data: SurfaceData) -> Result<Self> {
        let sources = data
            .sources
            .unwrap_or_else(|| vec![CellSource::Observed; data.resolution * data.resolution]);
        AttentionSurface::from_parts(data.resolution, data.ctr, data.impressions, sources)
    }
}

impl From<AttentionSurface> for SurfaceData {
    fn from(surface: AttentionSurface) -> Self {
        SurfaceData {
            resolution: surface.resolution,
            ctr: surface.ctr,
            impressions: surface.impressions,
            sources: Some(surface.sources),
        }
    }
}

impl AttentionSurface {
    pub fn from_parts(
        resolution: usize,
        ctr: Vec<f64>,
        impressions: Vec<u64>,
        sources: Vec<CellSource>,
    ) -> Result<Self> {
        if resolution == 0 || resolution.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "surface resolution must be odd and positive, got {resolution}"
            )));
        }
        let cells = resolution * resolution;
        if ctr.len() != cells || impressions.len() != cells || sources.len() != cells {
            return Err(Error::InvalidConfig(format!(
                "surface of resolution {resolution} needs {cells} cells"
            )));
        }
        if let Some(bad) = ctr.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidConfig(format!(
                "surface ctr {bad} is not finite and >= 0"
            )));
        }
        let surface = Self {
            resolution,
            ctr,
            impressions,
            sources,
        };
        if surface.center_ctr() <= 0.0 {
            return Err(Error::InvalidConfig(
                "surface center ctr must be positive".into(),
            ));
        }
        Ok(surface)
    }

    /// `peak_ctr * exp(-((dx - shift)^2 + dy^2) / (2 * decay_scale^2))`
    /// evaluated at every cell center.
    ///
    /// A negative `horizontal_shift` pulls attention to the left, the way a
    /// result list docked beside the map does.
    pub fn synthetic_radial(
        peak_ctr: f64,
        decay_scale: f64,
        horizontal_shift: f64,
        resolution: usize,
    ) -> Result<Self> {
        if !(peak_ctr > 0.0 && peak_ctr <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "peak ctr {peak_ctr} outside (0, 1]"
            )));
        }
        if !(decay_scale > 0.0 && decay_scale.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "decay scale {decay_scale} must be > 0"
            )));
        }
        if !horizontal_shift.is_finite() {
            return Err(Error::NonFinite {
                field: "horizontal_shift",
                value: horizontal_shift,
            });
        }
        if resolution == 0 || resolution.is_multiple_of(2) {
            return Err(Error::InvalidConfig(format!(
                "surface resolution must be odd and positive, got {resolution}"
            )));
        }
        let denom = 2.0 * decay_scale * decay_scale;
        let h = 1.0 / resolution as f64;
        let half = (resolution / 2) as f64;
        let mut ctr = Vec::with_capacity(resolution * resolution);
        for iy in 0..resolution {
            let dy = (iy as f64 - half) * h;
            for ix in 0..resolution {
                let dx = (ix as f64 - half) * h;
                let sx = dx - horizontal_shift;
                ctr.push(peak_ctr * (-(sx * sx + dy * dy) / denom).exp());
            }
        }
        let cells = resolution * resolution;
        Self::from_parts(
            resolution,
            ctr,
            vec![0; cells],
            vec![CellSource::Analytic; cells],
        )
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn cell_size(&self) -> f64 {
        1.0 / self.resolution as f64
    }

    pub fn center_cell(&self) -> (usize, usize) {
        (self.resolution / 2, self.resolution / 2)
    }

    fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.resolution + ix
    }

    /// Nearest cell for an offset, or `None` outside the viewport.
    pub fn cell_of(&self, dx: f64, dy: f64) -> Option<(usize, usize)> {
        Some((self.axis_index(dx)?, self.axis_index(dy)?))
    }

    fn axis_index(&self, d: f64) -> Option<usize> {
        if !(-0.5..=0.5).contains(&d) {
            return None;
        }
        let i = ((d + 0.5) * self.resolution as f64).floor() as usize;
        Some(i.min(self.resolution - 1))
    }

    /// Offset of a cell's center from the grid origin.
    pub fn cell_offset(&self, ix: usize, iy: usize) -> (f64, f64) {
        let half = (self.resolution / 2) as f64;
        let h = self.cell_size();
        ((ix as f64 - half) * h, (iy as f64 - half) * h)
    }

    pub fn ctr_at_cell(&self, ix: usize, iy: usize) -> f64 {
        self.ctr[self.index(ix, iy)]
    }

    pub fn impressions_at_cell(&self, ix: usize, iy: usize) -> u64 {
        self.impressions[self.index(ix, iy)]
    }

    pub fn source_at_cell(&self, ix: usize, iy: usize) -> CellSource {
        self.sources[self.index(ix, iy)]
    }

    pub fn center_ctr(&self) -> f64 {
        let (cx, cy) = self.center_cell();
        self.ctr_at_cell(cx, cy)
    }

    /// Raw click-through rate at an offset; `None` outside the viewport.
    pub fn ctr_at(&self, dx: f64, dy: f64) -> Option<f64> {
        self.cell_of(dx, dy)
            .map(|(ix, iy)| self.ctr_at_cell(ix, iy))
    }

    /// Attention at an offset relative to the center cell; 0 off-grid.
    pub fn relative_attention(&self, dx: f64, dy: f64) -> f64 {
        self.ctr_at(dx, dy)
            .map_or(0.0, |ctr| ctr / self.center_ctr())
    }

    pub fn relative_attention_at_cell(&self, ix: usize, iy: usize) -> f64 {
        self.ctr_at_cell(ix, iy) / self.center_ctr()
    }

    /// Every cell as `(ix, iy)`, row-major.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let r = self.resolution;
        (0..r).flat_map(move |iy| (0..r).map(move |ix| (ix, iy)))
    }

    pub fn ctr_values(&self) -> &[f64] {
        &self.ctr
    }

    pub fn impression_counts(&self) -> &[u64] {
        &self.impressions
    }
}
