/// Normal-approximation 95% interval for a Bernoulli rate.
pub fn bernoulli_ci95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 0.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let half = 1.959_963_984_540_054 * (p * (1.0 - p) / n).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// Nearest-rank percentile, `q` in `(0, 1]`. `None` for empty input.
pub fn percentile_nearest_rank(values: &[usize], q: f64) -> Option<usize> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_unstable();
    let rank = (q * sorted.len() as f64).ceil().max(1.0) as usize;
    Some(sorted[rank.min(sorted.len()) - 1])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ci_brackets_rate() {
        let (lo, hi) = bernoulli_ci95(30, 100);
        assert!(lo < 0.3 && hi > 0.3);
        assert!((hi - lo - 2.0 * 1.96 * (0.21f64 / 100.0).sqrt()).abs() < 1e-4);
        assert_eq!(bernoulli_ci95(0, 0), (0.0, 0.0));
    }

    #[test]
    fn percentile() {
        let v: Vec<usize> = (1..=20).collect();
        assert_eq!(percentile_nearest_rank(&v, 0.95), Some(19));
        assert_eq!(percentile_nearest_rank(&v, 1.0), Some(20));
        assert_eq!(percentile_nearest_rank(&[], 0.5), None);
    }
}
