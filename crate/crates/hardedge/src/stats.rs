//! Empirical distributions and the comparison toolkit every statistical
//! check runs through: Kolmogorov–Smirnov distances, DKW confidence bands,
//! order-statistic quantiles.

use crate::{Error, Result};

/// Sorted sample set with CDF, quantile and KS queries. Immutable after
/// construction, freely shareable.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Domain("empirical distribution needs at least one sample".into()));
        }
        if samples.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("samples contain NaN".into()));
        }
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(EmpiricalDistribution { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction requires at least one sample
    }

    pub fn samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().unwrap()
    }

    /// Empirical CDF: fraction of samples ≤ x. Right-continuous step
    /// function.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.sorted.partition_point(|&s| s <= x);
        k as f64 / self.len() as f64
    }

    /// Kolmogorov–Smirnov distance to a reference CDF, evaluating both
    /// one-sided limits at every sample point (the left limit through the
    /// adjacent representable float, so a step reference with atoms at the
    /// sample points — e.g. this distribution's own CDF — compares exactly).
    pub fn ks_distance(&self, reference_cdf: impl Fn(f64) -> f64) -> f64 {
        let n = self.len() as f64;
        let mut d = 0.0f64;
        let mut below = 0usize; // samples strictly below the current value
        let mut i = 0usize;
        while i < self.sorted.len() {
            let x = self.sorted[i];
            let mut j = i;
            while j < self.sorted.len() && self.sorted[j] == x {
                j += 1;
            }
            d = d.max((reference_cdf(x) - j as f64 / n).abs());
            d = d.max((reference_cdf(x.next_down()) - below as f64 / n).abs());
            below = j;
            i = j;
        }
        d
    }

    /// Two-sample KS distance: sup over the merged support of the difference
    /// of empirical CDFs.
    pub fn ks_distance_two_sample(&self, other: &EmpiricalDistribution) -> f64 {
        let mut d = 0.0f64;
        for &x in self.sorted.iter().chain(other.sorted.iter()) {
            d = d.max((self.cdf(x) - other.cdf(x)).abs());
        }
        d
    }

    /// Order-statistic quantile under the lower rule: the ⌈q·n⌉-th smallest
    /// sample (q = 0 gives the minimum). Fixed so cross-run comparisons are
    /// exact.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::Domain(format!("quantile level {q} outside [0, 1]")));
        }
        if q == 0.0 {
            return Ok(self.min());
        }
        let n = self.len();
        let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
        Ok(self.sorted[idx])
    }
}

/// Dvoretzky–Kiefer–Wolfowitz band: √(log(2/α) / (2n)). With probability at
/// least 1 − α the empirical CDF of n i.i.d. samples stays within this band
/// of the truth uniformly.
pub fn dkw_band(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain("DKW band needs n ≥ 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} outside (0, 1)")));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::normal_cdf;
    use crate::rng::RandomStream;
    use proptest::prelude::*;

    #[test]
    fn cdf_step_values() {
        let d = EmpiricalDistribution::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(d.cdf(0.5), 0.0);
        assert_eq!(d.cdf(2.0), 2.0 / 3.0);
        assert_eq!(d.cdf(3.5), 1.0);
    }

    #[test]
    fn ks_single_sample_against_uniform() {
        let d = EmpiricalDistribution::new(vec![0.0]).unwrap();
        let ks = d.ks_distance(|x| x.clamp(0.0, 1.0));
        assert_eq!(ks, 1.0);
    }

    #[test]
    fn ks_against_own_step_cdf_is_zero() {
        let d = EmpiricalDistribution::new(vec![0.3, 1.7, 2.2, 9.0]).unwrap();
        let copy = d.clone();
        let ks = d.ks_distance(move |x| copy.cdf(x));
        assert_eq!(ks, 0.0);
        assert_eq!(d.ks_distance_two_sample(&d), 0.0);
    }

    #[test]
    fn ks_gaussian_sample_within_dkw() {
        let n = 10_000;
        let mut s = RandomStream::new(31, 0);
        let d = EmpiricalDistribution::new((0..n).map(|_| s.gaussian()).collect()).unwrap();
        let ks = d.ks_distance(|x| normal_cdf(x, 0.0, 1.0));
        let band = dkw_band(n, 0.01).unwrap();
        assert!(ks < band, "ks = {ks}, band = {band}");
    }

    #[test]
    fn dkw_band_values() {
        // n = 1e4, α = 1%: √(ln 200 / 2e4).
        let b = dkw_band(10_000, 0.01).unwrap();
        assert!((b - 0.016276).abs() < 1e-5, "band {b}");
        // α = 2e⁻² makes the log exactly 2: band = 1/√n.
        let b2 = dkw_band(100, 2.0 * (-2.0f64).exp()).unwrap();
        assert!((b2 - 0.1).abs() < 1e-12, "band {b2}");
        assert!(dkw_band(1000, 0.01).unwrap() < dkw_band(100, 0.01).unwrap());
        assert!(dkw_band(0, 0.5).is_err());
        assert!(dkw_band(10, 0.0).is_err());
        assert!(dkw_band(10, 1.0).is_err());
    }

    #[test]
    fn quantile_lower_rule() {
        let d = EmpiricalDistribution::new(vec![4.0, 1.0, 3.0, 2.0]).unwrap();
        assert_eq!(d.quantile(0.0).unwrap(), 1.0);
        assert_eq!(d.quantile(0.5).unwrap(), 2.0);
        assert_eq!(d.quantile(1.0).unwrap(), 4.0);
        assert!(d.quantile(1.5).is_err());
        assert!(d.quantile(-0.1).is_err());
    }

    #[test]
    fn empty_samples_rejected() {
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(128))]

        #[test]
        fn cdf_nondecreasing(mut xs in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let d = EmpiricalDistribution::new(xs).unwrap();
            let mut prev = 0.0;
            for i in -40..=40 {
                let x = i as f64 * 30.0;
                let c = d.cdf(x);
                prop_assert!(c >= prev);
                prop_assert!((0.0..=1.0).contains(&c));
                prev = c;
            }
        }

        #[test]
        fn quantile_nondecreasing(xs in prop::collection::vec(-1e3f64..1e3, 1..60)) {
            let d = EmpiricalDistribution::new(xs).unwrap();
            let mut prev = d.min();
            for i in 0..=20 {
                let q = i as f64 / 20.0;
                let v = d.quantile(q).unwrap();
                prop_assert!(v >= prev);
                prev = v;
            }
        }

        #[test]
        fn ks_self_zero(xs in prop::collection::vec(-1e2f64..1e2, 1..50)) {
            let d = EmpiricalDistribution::new(xs).unwrap();
            let copy = d.clone();
            prop_assert_eq!(d.ks_distance(move |x| copy.cdf(x)), 0.0);
        }
    }
}
