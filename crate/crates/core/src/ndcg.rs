//! Normalized discounted cumulative gain.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// DCG over the first `k` gains with the `1 / log2(rank + 1)` discount.
pub fn dcg(gains: &[f64], k: usize) -> f64 {
    gains
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, g)| g / ((i + 2) as f64).log2())
        .sum()
}

/// NDCG@k of an ordering of ids given per-id relevance.
///
/// A query whose ideal DCG is zero (no relevant item at all) scores 1.0.
pub fn ndcg<'a, I>(order: I, relevance: &HashMap<String, f64>, k: usize) -> Result<f64>
where
    I: IntoIterator<Item = &'a str>,
{
    if k == 0 {
        return Err(Error::InvalidConfig("ndcg cutoff k must be >= 1".into()));
    }
    let gains = order
        .into_iter()
        .map(|id| match relevance.get(id) {
            Some(&r) if r.is_finite() && r >= 0.0 => Ok(r),
            Some(_) => Err(Error::InvalidConfig(format!(
                "relevance of `{id}` must be finite and >= 0"
            ))),
            None => Err(Error::MissingRelevance(id.to_string())),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ndcg_of_gains(&gains, k))
}

/// NDCG@k of gains already in display order.
pub fn ndcg_of_gains(gains: &[f64], k: usize) -> f64 {
    let mut ideal = gains.to_vec();
    ideal.sort_by(|a, b| b.total_cmp(a));
    let idcg = dcg(&ideal, k);
    if idcg <= 0.0 {
        return 1.0;
    }
    (dcg(gains, k) / idcg).clamp(0.0, 1.0)
}
