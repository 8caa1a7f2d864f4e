//! Concentration indices over market shares.
//!
//! All five indices operate on a validated [`ShareVector`] and land in
//! `(0, 1]`, where 1 is a single employer and values near zero indicate an
//! atomistic market. `weighted_summary` provides the distributional
//! machinery used by the reporting layer (weighted means, percentiles, and
//! band shares).

use crate::error::{Error, Result};

/// Tolerance for the shares-sum-to-one invariant.
pub const SHARE_SUM_TOL: f64 = 1e-12;

/// Slack accepted on nominally-[0,1] inputs before rejecting them, so that
/// downstream floating-point noise (e.g. an HHI of 1 + 2e-16) does not
/// trigger spurious domain errors.
const RANGE_SLACK: f64 = 1e-9;

/// A non-empty vector of market shares in `(0, 1]` summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareVector(Vec<f64>);

impl ShareVector {
    pub fn new(shares: Vec<f64>) -> Result<Self> {
        if shares.is_empty() {
            return Err(Error::domain("share vector must be non-empty"));
        }
        let mut sum = 0.0;
        for (i, &s) in shares.iter().enumerate() {
            if !s.is_finite() || s <= 0.0 || s > 1.0 + RANGE_SLACK {
                return Err(Error::domain(format!(
                    "share {i} = {s} outside (0, 1]"
                )));
            }
            sum += s;
        }
        if (sum - 1.0).abs() > SHARE_SUM_TOL {
            return Err(Error::domain(format!(
                "shares sum to {sum}, expected 1 within {SHARE_SUM_TOL:e}"
            )));
        }
        Ok(ShareVector(shares))
    }

    /// Normalize raw object counts into shares. Zero counts are dropped
    /// (a firm with no objects is not present in the market); negative or
    /// non-finite counts are rejected.
    pub fn from_counts(counts: &[f64]) -> Result<Self> {
        let mut kept = Vec::with_capacity(counts.len());
        for (i, &c) in counts.iter().enumerate() {
            if !c.is_finite() || c < 0.0 {
                return Err(Error::domain(format!("count {i} = {c} is not a non-negative number")));
            }
            if c > 0.0 {
                kept.push(c);
            }
        }
        let total: f64 = kept.iter().sum();
        if total <= 0.0 {
            return Err(Error::domain("all counts are zero"));
        }
        Ok(ShareVector(kept.iter().map(|c| c / total).collect()))
    }

    pub fn equal(j: usize) -> Result<Self> {
        if j == 0 {
            return Err(Error::domain("firm count must be positive"));
        }
        Ok(ShareVector(vec![1.0 / j as f64; j]))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// All shares bit-identical: the degenerate case where every index
/// collapses to `1/J` in exact arithmetic, so it is returned as such
/// rather than through the rounding of the general formula.
fn uniform_value(shares: &ShareVector) -> Option<f64> {
    let s = shares.as_slice();
    if s.windows(2).all(|w| w[0] == w[1]) {
        Some(1.0 / s.len() as f64)
    } else {
        None
    }
}

/// Herfindahl-Hirschman index: the sum of squared shares.
pub fn hhi(shares: &ShareVector) -> f64 {
    if let Some(v) = uniform_value(shares) {
        return v;
    }
    shares.as_slice().iter().map(|e| e * e).sum()
}

/// Rosenbluth index `1 / (2 * sum_j e_j * j - 1)` with ranks `j` assigned
/// in descending order of shares (1-based; ties keep input order).
pub fn rosenbluth(shares: &ShareVector) -> f64 {
    if let Some(v) = uniform_value(shares) {
        return v;
    }
    let mut sorted: Vec<f64> = shares.as_slice().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, e)| e * (i + 1) as f64)
        .sum();
    1.0 / (2.0 * weighted - 1.0)
}

/// Sum of the `k` largest shares, capped at 1 when `k >= J`.
pub fn concentration_ratio(shares: &ShareVector, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::domain("concentration ratio requires k >= 1"));
    }
    if k >= shares.len() {
        return Ok(1.0);
    }
    let mut sorted: Vec<f64> = shares.as_slice().to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sorted[..k].iter().sum())
}

/// Inverse number of subjects, `1 / J`.
pub fn inverse_number(j: usize) -> Result<f64> {
    if j == 0 {
        return Err(Error::domain("firm count must be positive"));
    }
    Ok(1.0 / j as f64)
}

/// Exponential index: the geometric mean of shares weighted by themselves,
/// `prod_j e_j^{e_j} = exp(sum_j e_j ln e_j)`.
pub fn exponential_index(shares: &ShareVector) -> f64 {
    if let Some(v) = uniform_value(shares) {
        return v;
    }
    shares
        .as_slice()
        .iter()
        .map(|&e| e * e.ln())
        .sum::<f64>()
        .exp()
}

/// Equivalent number of subjects: the count of equal-sized firms that would
/// produce the observed index value.
pub fn equivalent_number(index: f64) -> Result<f64> {
    if !index.is_finite() || index <= 0.0 {
        return Err(Error::domain(format!("index {index} must be positive")));
    }
    Ok(1.0 / index)
}

/// E.U. antitrust concentration bands for HHI values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Band {
    Low,
    Medium,
    High,
}

impl Band {
    pub fn as_str(&self) -> &'static str {
        match self {
            Band::Low => "low",
            Band::Medium => "medium",
            Band::High => "high",
        }
    }
}

impl std::str::FromStr for Band {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "low" => Ok(Band::Low),
            "medium" => Ok(Band::Medium),
            "high" => Ok(Band::High),
            other => Err(Error::domain(format!("unknown band `{other}`"))),
        }
    }
}

/// Classify an HHI value into the low/medium/high bands. Boundaries are
/// left-closed: 0.1 is medium and 0.2 is high.
pub fn classify_band(hhi: f64) -> Result<Band> {
    if !hhi.is_finite() || hhi < -RANGE_SLACK || hhi > 1.0 + RANGE_SLACK {
        return Err(Error::domain(format!("HHI {hhi} outside [0, 1]")));
    }
    Ok(if hhi < 0.1 {
        Band::Low
    } else if hhi < 0.2 {
        Band::Medium
    } else {
        Band::High
    })
}

/// Weighted distributional summary of a set of index values.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSummary {
    pub mean: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    /// Weight share of values in the medium band [0.1, 0.2).
    pub share_medium: f64,
    /// Weight share of values in the high band [0.2, 1.0].
    pub share_high: f64,
}

/// Weighted mean, weighted percentiles (cumulative-weight inversion with
/// lower interpolation), and band weight shares.
pub fn weighted_summary(values: &[f64], weights: &[f64]) -> Result<WeightedSummary> {
    if values.len() != weights.len() {
        return Err(Error::domain(format!(
            "values ({}) and weights ({}) differ in length",
            values.len(),
            weights.len()
        )));
    }
    if values.is_empty() {
        return Err(Error::domain("empty value vector"));
    }
    let mut total = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::domain(format!("weight {i} = {w} is negative")));
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::domain("total weight is zero"));
    }

    let mean = values
        .iter()
        .zip(weights)
        .map(|(v, w)| v * w)
        .sum::<f64>()
        / total;

    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());

    let percentile = |q: f64| -> f64 {
        let target = q * total;
        let mut cum = 0.0;
        for &i in &order {
            cum += weights[i];
            if cum >= target {
                return values[i];
            }
        }
        values[*order.last().unwrap()]
    };

    let mut w_medium = 0.0;
    let mut w_high = 0.0;
    for (&v, &w) in values.iter().zip(weights) {
        match classify_band(v)? {
            Band::Low => {}
            Band::Medium => w_medium += w,
            Band::High => w_high += w,
        }
    }

    Ok(WeightedSummary {
        mean,
        p25: percentile(0.25),
        p50: percentile(0.50),
        p75: percentile(0.75),
        share_medium: w_medium / total,
        share_high: w_high / total,
    })
}

/// All indices for one market cell.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSet {
    pub j: usize,
    pub hhi: f64,
    pub rbi: f64,
    pub cr1: f64,
    pub ins: f64,
    pub exp: f64,
    pub band: Band,
}

pub fn index_set(shares: &ShareVector) -> Result<IndexSet> {
    let h = hhi(shares);
    Ok(IndexSet {
        j: shares.len(),
        hhi: h,
        rbi: rosenbluth(shares),
        cr1: concentration_ratio(shares, 1)?,
        ins: inverse_number(shares.len())?,
        exp: exponential_index(shares),
        band: classify_band(h)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sv(shares: &[f64]) -> ShareVector {
        ShareVector::new(shares.to_vec()).unwrap()
    }

    #[test]
    fn hhi_monopsony_is_one() {
        assert_eq!(hhi(&sv(&[1.0])), 1.0);
    }

    #[test]
    fn hhi_equal_shares_is_inverse_count() {
        for j in 1..20 {
            let shares = ShareVector::equal(j).unwrap();
            assert!((hhi(&shares) - 1.0 / j as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn hhi_direct_sum_of_squares() {
        // 0.25 + 0.09 + 0.04
        assert!((hhi(&sv(&[0.5, 0.3, 0.2])) - 0.38).abs() < 1e-15);
    }

    #[test]
    fn share_vector_rejects_bad_input() {
        assert!(ShareVector::new(vec![]).is_err());
        assert!(ShareVector::new(vec![0.5, 0.6]).is_err());
        assert!(ShareVector::new(vec![0.5, 0.5, 0.0]).is_err());
        assert!(ShareVector::new(vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn from_counts_drops_zeros_and_normalizes() {
        let s = ShareVector::from_counts(&[3.0, 0.0, 1.0]).unwrap();
        assert_eq!(s.as_slice(), &[0.75, 0.25]);
        assert!(ShareVector::from_counts(&[0.0, 0.0]).is_err());
        assert!(ShareVector::from_counts(&[1.0, -1.0]).is_err());
    }

    #[test]
    fn rosenbluth_examples() {
        assert_eq!(rosenbluth(&sv(&[1.0])), 1.0);
        // equal shares: sum e_j * j = (J + 1) / 2, so RBI = 1/J
        for j in 1..15 {
            let shares = ShareVector::equal(j).unwrap();
            assert!((rosenbluth(&shares) - 1.0 / j as f64).abs() < 1e-12);
        }
        // 1 / (2 * (0.5*1 + 0.3*2 + 0.2*3) - 1) = 1 / 2.4
        assert!((rosenbluth(&sv(&[0.5, 0.3, 0.2])) - 1.0 / 2.4).abs() < 1e-15);
        // permutation of the same shares ranks identically
        assert!((rosenbluth(&sv(&[0.2, 0.5, 0.3])) - 1.0 / 2.4).abs() < 1e-15);
    }

    #[test]
    fn concentration_ratio_examples() {
        let s = sv(&[0.5, 0.3, 0.2]);
        assert!((concentration_ratio(&s, 1).unwrap() - 0.5).abs() < 1e-15);
        assert!((concentration_ratio(&s, 2).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(concentration_ratio(&s, 3).unwrap(), 1.0);
        assert_eq!(concentration_ratio(&s, 10).unwrap(), 1.0);
        assert!(concentration_ratio(&s, 0).is_err());
    }

    #[test]
    fn inverse_number_examples() {
        assert_eq!(inverse_number(1).unwrap(), 1.0);
        assert_eq!(inverse_number(4).unwrap(), 0.25);
        // median of 0.08 is "equivalent to 13 establishments"
        assert!((inverse_number(13).unwrap() - 0.0769).abs() < 1e-4);
        assert!(inverse_number(0).is_err());
    }

    #[test]
    fn exponential_index_examples() {
        assert_eq!(exponential_index(&sv(&[1.0])), 1.0);
        for j in 1..15 {
            let shares = ShareVector::equal(j).unwrap();
            assert!((exponential_index(&shares) - 1.0 / j as f64).abs() < 1e-12);
        }
        let expected = (0.99f64 * 0.99f64.ln() + 0.01 * 0.01f64.ln()).exp();
        assert!((exponential_index(&sv(&[0.99, 0.01])) - expected).abs() < 1e-15);
        assert!((expected - 0.9455).abs() < 1e-4);
    }

    #[test]
    fn equivalent_number_examples() {
        assert!((equivalent_number(0.07).unwrap() - 14.3).abs() < 0.05);
        assert_eq!(equivalent_number(1.0).unwrap(), 1.0);
        assert_eq!(equivalent_number(0.5).unwrap(), 2.0);
        assert!(equivalent_number(0.0).is_err());
        assert!(equivalent_number(-0.2).is_err());
    }

    #[test]
    fn band_boundaries_left_closed() {
        assert_eq!(classify_band(0.0).unwrap(), Band::Low);
        assert_eq!(classify_band(0.05).unwrap(), Band::Low);
        assert_eq!(classify_band(0.1).unwrap(), Band::Medium);
        assert_eq!(classify_band(0.19).unwrap(), Band::Medium);
        assert_eq!(classify_band(0.2).unwrap(), Band::High);
        assert_eq!(classify_band(1.0).unwrap(), Band::High);
        assert!(classify_band(1.1).is_err());
        assert!(classify_band(-0.1).is_err());
    }

    #[test]
    fn weighted_summary_examples() {
        let s = weighted_summary(&[0.1, 0.3], &[1.0, 3.0]).unwrap();
        assert!((s.mean - 0.25).abs() < 1e-15);

        // unit weights match the unweighted view; lower interpolation picks
        // the first value whose cumulative weight reaches the target
        let s = weighted_summary(&[0.1, 0.2, 0.3, 0.4], &[1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.p25, 0.1);
        assert_eq!(s.p50, 0.2);
        assert_eq!(s.p75, 0.3);
        assert!((s.mean - 0.25).abs() < 1e-15);
        // 0.1 is medium under left-closed bands; 0.2, 0.3, 0.4 are high
        assert!((s.share_medium - 0.25).abs() < 1e-15);
        assert!((s.share_high - 0.75).abs() < 1e-15);

        assert!(weighted_summary(&[0.1], &[0.0]).is_err());
        assert!(weighted_summary(&[0.1], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn index_set_consistency() {
        let set = index_set(&sv(&[0.5, 0.3, 0.2])).unwrap();
        assert_eq!(set.j, 3);
        assert_eq!(set.band, Band::High);
        assert!(set.cr1 >= set.hhi && set.hhi >= set.exp && set.exp >= set.ins);
    }
}
