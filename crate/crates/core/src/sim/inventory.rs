//! Synthetic listing inventories for one map area.
//!
//! Booking propensity falls off with distance from the viewport center:
//! `logit = min(0, base - distance_coeff * distance + noise)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listing::Listing;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Spatial {
    Uniform,
    /// `clusters` centers drawn uniformly, points Gaussian around them.
    Clustered {
        clusters: usize,
        spread: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogitModel {
    pub base: f64,
    pub distance_coeff: f64,
    pub noise_sd: f64,
}

impl Default for LogitModel {
    fn default() -> Self {
        Self {
            base: -3.0,
            distance_coeff: 2.0,
            noise_sd: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InventoryConfig {
    pub n_listings: usize,
    pub spatial: Spatial,
    pub logit: LogitModel,
    pub seed: u64,
}

impl Default for InventoryConfig {
    fn default() -> Self {
        Self {
            n_listings: 200,
            spatial: Spatial::Uniform,
            logit: LogitModel::default(),
            seed: 0,
        }
    }
}

impl InventoryConfig {
    pub fn validate(&self) -> Result<()> {
        let LogitModel {
            base,
            distance_coeff,
            noise_sd,
        } = self.logit;
        if !(base.is_finite() && base <= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "logit base must be <= 0, got {base}"
            )));
        }
        if !(distance_coeff.is_finite() && distance_coeff >= 0.0) {
            return Err(Error::InvalidConfig(
                "distance coefficient must be >= 0".into(),
            ));
        }
        if !(noise_sd.is_finite() && noise_sd >= 0.0) {
            return Err(Error::InvalidConfig("noise sd must be >= 0".into()));
        }
        if let Spatial::Clustered { clusters, spread } = self.spatial {
            if clusters == 0 || !(spread.is_finite() && spread > 0.0) {
                return Err(Error::InvalidConfig(
                    "clustered layout needs clusters >= 1 and spread > 0".into(),
                ));
            }
        }
        Ok(())
    }
}

pub fn generate_inventory(cfg: &InventoryConfig) -> Result<Vec<Listing>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // noise_sd = 0 is a valid degenerate normal
    let noise = Normal::new(0.0, cfg.logit.noise_sd).expect("validated sd");
    let price = LogNormal::new(150f64.ln(), 0.4).expect("constant parameters");
    let reviews = Poisson::new(40.0).expect("constant parameters");
    let rating = Normal::<f64>::new(4.6, 0.3).expect("constant parameters");

    let centers: Vec<(f64, f64)> = match cfg.spatial {
        Spatial::Uniform => Vec::new(),
        Spatial::Clustered { clusters, .. } => (0..clusters)
            .map(|_| (rng.random_range(-0.4..0.4), rng.random_range(-0.4..0.4)))
            .collect(),
    };

    let mut listings = Vec::with_capacity(cfg.n_listings);
    for i in 0..cfg.n_listings {
        let (x, y) = match cfg.spatial {
            Spatial::Uniform => (rng.random_range(-0.5..=0.5), rng.random_range(-0.5..=0.5)),
            Spatial::Clustered { spread, .. } => {
                let (cx, cy) = centers[rng.random_range(0..centers.len())];
                let jitter = Normal::new(0.0, spread).expect("validated spread");
                (
                    (cx + jitter.sample(&mut rng)).clamp(-0.5, 0.5),
                    (cy + jitter.sample(&mut rng)).clamp(-0.5, 0.5),
                )
            }
        };
        let distance = x.hypot(y);
        let logit = (cfg.logit.base - cfg.logit.distance_coeff * distance + noise.sample(&mut rng))
            .min(0.0);
        let listing = Listing::new(format!("L{i:06}"), x, y, logit)?.with_metadata(
            Some(price.sample(&mut rng)),
            Some(reviews.sample(&mut rng) as u32),
            Some(rating.sample(&mut rng).clamp(0.0, 5.0)),
        );
        listings.push(listing);
    }
    Ok(listings)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inventory() {
        let cfg = InventoryConfig {
            n_listings: 0,
            ..Default::default()
        };
        assert!(generate_inventory(&cfg).unwrap().is_empty());
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = InventoryConfig {
            n_listings: 50,
            seed: 9,
            ..Default::default()
        };
        assert_eq!(
            generate_inventory(&cfg).unwrap(),
            generate_inventory(&cfg).unwrap()
        );
        let other = InventoryConfig {
            seed: 10,
            ..cfg.clone()
        };
        assert_ne!(
            generate_inventory(&cfg).unwrap(),
            generate_inventory(&other).unwrap()
        );
    }

    #[test]
    fn listings_are_valid_and_in_viewport() {
        for spatial in [
            Spatial::Uniform,
            Spatial::Clustered {
                clusters: 3,
                spread: 0.2,
            },
        ] {
            let cfg = InventoryConfig {
                n_listings: 500,
                spatial,
                logit: LogitModel {
                    base: -0.1,
                    distance_coeff: 0.5,
                    noise_sd: 0.5,
                },
                seed: 1,
            };
            for l in generate_inventory(&cfg).unwrap() {
                assert!(l.logit <= 0.0);
                assert!(l.x.abs() <= 0.5 && l.y.abs() <= 0.5);
                l.validate().unwrap();
            }
        }
    }

    #[test]
    fn rejects_bad_config() {
        let mut cfg = InventoryConfig::default();
        cfg.logit.base = 0.5;
        assert!(generate_inventory(&cfg).is_err());
        let cfg = InventoryConfig {
            spatial: Spatial::Clustered {
                clusters: 0,
                spread: 0.1,
            },
            ..Default::default()
        };
        assert!(generate_inventory(&cfg).is_err());
    }
}
