//! Threshold calibration for the screening stage.
//!
//! The screening scores of the `p(p+1)/2` components have to be compared
//! against a cutoff that reflects their fluctuation when no change is
//! present. Two rules are provided:
//!
//! * [`bootstrap_threshold`] — a Gaussian multiplier scheme. Successive
//!   observation pairs of each component's product series are differenced
//!   and scaled by `1/sqrt(2)`, which cancels any common level and leaves a
//!   noise sample; the standard deviation of that sample calibrates one
//!   synthetic Gaussian series per component. Each synthetic series is
//!   pushed through the identical weighted-contrast aggregation, with no
//!   re-centering and no product construction, and the threshold is the
//!   maximum score across components.
//! * [`theoretical_threshold`] — the asymptotic rate `C * max(ln p, ln n)`
//!   for callers who prefer a closed form over resampling.

use alloc::vec::Vec;

use rand_distr::{Distribution, StandardNormal};
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::data::{vech_len, CenteredData, ComponentIndex, ComponentSeries};
use crate::error::{Error, Result};
use crate::math;
use crate::reduction::weighted_contrast;
use crate::rng::{substream, STREAM_BOOT_ROW};

/// Scaled successive-pair differences of every component's product series.
///
/// Row `ell` holds `(y_{2t} - y_{2t-1}) / sqrt(2)` for `t = 1..=floor(n/2)`,
/// where `y` is the product series of the component with linear index
/// `ell`. A trailing odd observation is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PairDifferenceMatrix {
    p: usize,
    cols: usize,
    values: Vec<f64>,
}

impl PairDifferenceMatrix {
    pub(crate) fn from_raw(p: usize, cols: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), vech_len(p) * cols);
        Self { p, cols, values }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    /// Number of rows, one per component.
    pub fn rows(&self) -> usize {
        vech_len(self.p)
    }

    /// Number of observation pairs.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, ell: usize) -> &[f64] {
        &self.values[ell * self.cols..(ell + 1) * self.cols]
    }
}

#[inline]
fn pair_difference(c: &CenteredData, a0: usize, b0: usize, t: usize) -> f64 {
    let lo = c.get(2 * t, a0) * c.get(2 * t, b0);
    let hi = c.get(2 * t + 1, a0) * c.get(2 * t + 1, b0);
    (hi - lo) / core::f64::consts::SQRT_2
}

/// Builds the pair-difference matrix; needs `n >= 4` for two pairs.
pub fn pair_differences(c: &CenteredData) -> Result<PairDifferenceMatrix> {
    let n = c.n();
    if n < 4 {
        return Err(Error::TooFewRows { n, min: 4 });
    }
    let p = c.p();
    let cols = n / 2;
    let mut values = Vec::with_capacity(vech_len(p) * cols);
    for ell in 0..vech_len(p) {
        let idx = ComponentIndex::from_linear(ell, p)?;
        let (a0, b0) = (idx.a() - 1, idx.b() - 1);
        for t in 0..cols {
            values.push(pair_difference(c, a0, b0, t));
        }
    }
    Ok(PairDifferenceMatrix::from_raw(p, cols, values))
}

/// Per-component noise scales: sample standard deviations of the
/// pair-difference rows (mean removed, `cols - 1` denominator).
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceProfile {
    p: usize,
    scales: Vec<f64>,
}

impl VarianceProfile {
    pub(crate) fn from_scales(p: usize, scales: Vec<f64>) -> Self {
        debug_assert_eq!(scales.len(), vech_len(p));
        Self { p, scales }
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.scales.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scales.is_empty()
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    /// True when every scale is zero, i.e. the data carry no usable noise
    /// sample (constant products).
    pub fn is_degenerate(&self) -> bool {
        self.scales.iter().all(|&s| s == 0.0)
    }
}

fn sample_std(row: &[f64]) -> f64 {
    let m = row.len() as f64;
    let mean = row.iter().sum::<f64>() / m;
    let ss: f64 = row.iter().map(|z| (z - mean) * (z - mean)).sum();
    math::sqrt(ss / (m - 1.0))
}

/// Standard deviation of each row of the pair-difference matrix.
pub fn row_scales(z: &PairDifferenceMatrix) -> Result<VarianceProfile> {
    if z.cols() < 2 {
        return Err(Error::TooFewRows {
            n: z.cols(),
            min: 2,
        });
    }
    let scales = (0..z.rows()).map(|ell| sample_std(z.row(ell))).collect();
    Ok(VarianceProfile::from_scales(z.p(), scales))
}

/// Noise scales straight from centered data.
///
/// Numerically identical to `row_scales(&pair_differences(c)?)` but streams
/// one row at a time, so memory stays `O(n)` regardless of `p`.
pub fn variance_profile(c: &CenteredData) -> Result<VarianceProfile> {
    let n = c.n();
    if n < 4 {
        return Err(Error::TooFewRows { n, min: 4 });
    }
    let p = c.p();
    let cols = n / 2;
    let mut row = Vec::with_capacity(cols);
    let mut scales = Vec::with_capacity(vech_len(p));
    for ell in 0..vech_len(p) {
        let idx = ComponentIndex::from_linear(ell, p)?;
        let (a0, b0) = (idx.a() - 1, idx.b() - 1);
        row.clear();
        for t in 0..cols {
            row.push(pair_difference(c, a0, b0, t));
        }
        scales.push(sample_std(&row));
    }
    Ok(VarianceProfile::from_scales(p, scales))
}

/// How replicate maxima are combined into one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// One replicate, its maximum is the threshold (the reference scheme).
    MaxOfSingle,
    /// Median of the per-replicate maxima; an extension for callers who
    /// want the threshold stabilized over several replicates.
    MedianOfMaxima,
}

/// Bootstrap configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdConfig {
    /// Number of bootstrap replicates, at least 1.
    pub replicates: u32,
    /// Master seed for the synthetic Gaussian series.
    pub seed: u64,
    pub aggregation: Aggregation,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            replicates: 1,
            seed: crate::DEFAULT_SEED,
            aggregation: Aggregation::MaxOfSingle,
        }
    }
}

impl ThresholdConfig {
    /// Single-replicate scheme with the given seed.
    pub fn with_seed(seed: u64) -> Self {
        Self {
            seed,
            ..Self::default()
        }
    }
}

/// A calibrated threshold with its provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdEstimate {
    pub tau: f64,
    pub replicates: u32,
    pub aggregation: Aggregation,
    /// Set when the profile was all zero, which forces `tau = 0`.
    pub degenerate_profile: bool,
}

/// Maximum synthetic score over all components for replicate `b`.
///
/// Row `ell` draws from its own seed-derived stream, so the result does not
/// depend on how rows are scheduled across threads; `max` is associative and
/// commutative, so neither does the reduction.
fn replicate_max(profile: &VarianceProfile, n: usize, seed: u64, b: u32) -> f64 {
    let p = profile.p();
    let score_row = |ell: usize| -> f64 {
        let scale = profile.scales()[ell];
        let mut rng = substream(seed, &[STREAM_BOOT_ROW, b as u64, ell as u64]);
        let values: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                scale * z
            })
            .collect();
        let idx = ComponentIndex::from_linear(ell, p).expect("profile length matches p");
        weighted_contrast(&ComponentSeries::from_values(idx, values))
            .expect("series length checked by caller")
    };
    let rows = profile.len();
    #[cfg(feature = "parallel")]
    {
        (0..rows)
            .into_par_iter()
            .map(score_row)
            .reduce(|| f64::NEG_INFINITY, f64::max)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..rows).map(score_row).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Calibrates the screening threshold by a Gaussian multiplier bootstrap.
///
/// `n` must match the number of observations behind `profile`; each
/// synthetic series has that length so the score distribution is
/// comparable. An all-zero profile yields `tau = 0`, flagged in the result.
pub fn bootstrap_threshold(
    profile: &VarianceProfile,
    n: usize,
    cfg: &ThresholdConfig,
) -> Result<ThresholdEstimate> {
    if n < 8 {
        return Err(Error::TooFewRows { n, min: 8 });
    }
    if cfg.replicates == 0 {
        return Err(Error::InvalidParameter {
            name: "replicates",
            detail: "at least one bootstrap replicate required",
        });
    }
    if cfg.aggregation == Aggregation::MaxOfSingle && cfg.replicates != 1 {
        return Err(Error::InvalidParameter {
            name: "aggregation",
            detail: "max-of-single applies to exactly one replicate",
        });
    }
    if profile.is_degenerate() {
        return Ok(ThresholdEstimate {
            tau: 0.0,
            replicates: cfg.replicates,
            aggregation: cfg.aggregation,
            degenerate_profile: true,
        });
    }
    let mut maxima: Vec<f64> = (0..cfg.replicates)
        .map(|b| replicate_max(profile, n, cfg.seed, b))
        .collect();
    let tau = match cfg.aggregation {
        Aggregation::MaxOfSingle => maxima[0],
        Aggregation::MedianOfMaxima => {
            maxima.sort_by(f64::total_cmp);
            let mid = maxima.len() / 2;
            if maxima.len() % 2 == 1 {
                maxima[mid]
            } else {
                0.5 * (maxima[mid - 1] + maxima[mid])
            }
        }
    };
    Ok(ThresholdEstimate {
        tau,
        replicates: cfg.replicates,
        aggregation: cfg.aggregation,
        degenerate_profile: false,
    })
}

/// Closed-form threshold `C * max(ln p, ln n)`.
pub fn theoretical_threshold(p: usize, n: usize, c: f64) -> Result<f64> {
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            detail: "constant must be finite and positive",
        });
    }
    if p == 0 || n == 0 {
        return Err(Error::InvalidParameter {
            name: "shape",
            detail: "p and n must be positive",
        });
    }
    Ok(c * math::ln(p as f64).max(math::ln(n as f64)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{center, DataMatrix};
    use alloc::vec;
    use rand::Rng;

    fn centered(n: usize, p: usize, seed: u64) -> CenteredData {
        let mut rng = crate::rng::substream(seed, &[0x0E]);
        let values = (0..n * p).map(|_| rng.random_range(-2.0..2.0)).collect();
        center(&DataMatrix::from_vec(n, p, values).unwrap())
    }

    #[test]
    fn pair_differences_hand_case() {
        // One centered column (3, -1, -1, -1): products (9, 1, 1, 1), so the
        // two pair differences are (1-9)/sqrt(2) and (1-1)/sqrt(2).
        let c = CenteredData::from_centered(4, 1, vec![3.0, -1.0, -1.0, -1.0]).unwrap();
        let z = pair_differences(&c).unwrap();
        assert_eq!(z.rows(), 1);
        assert_eq!(z.cols(), 2);
        assert_eq!(z.row(0)[0], (1.0 - 9.0) / core::f64::consts::SQRT_2);
        assert_eq!(z.row(0)[1], 0.0);
    }

    #[test]
    fn pair_differences_drop_odd_tail() {
        let c = CenteredData::from_centered(5, 1, vec![2.0, -2.0, 1.0, -1.0, 0.0]).unwrap();
        let z = pair_differences(&c).unwrap();
        assert_eq!(z.cols(), 2);
    }

    #[test]
    fn pair_differences_constant_data_are_zero() {
        let rows: Vec<Vec<f64>> = (0..8).map(|_| vec![4.0, 4.0]).collect();
        let c = center(&DataMatrix::from_rows(&rows).unwrap());
        let z = pair_differences(&c).unwrap();
        for ell in 0..z.rows() {
            assert!(z.row(ell).iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn pair_differences_recompute_entrywise() {
        let c = centered(8, 2, 9);
        let z = pair_differences(&c).unwrap();
        for ell in 0..z.rows() {
            let idx = ComponentIndex::from_linear(ell, 2).unwrap();
            let (a0, b0) = (idx.a() - 1, idx.b() - 1);
            for t in 0..z.cols() {
                let lo = c.get(2 * t, a0) * c.get(2 * t, b0);
                let hi = c.get(2 * t + 1, a0) * c.get(2 * t + 1, b0);
                let want = (hi - lo) / core::f64::consts::SQRT_2;
                assert_eq!(z.row(ell)[t], want);
            }
        }
    }

    #[test]
    fn row_scales_hand_cases() {
        let z = PairDifferenceMatrix::from_raw(1, 2, vec![1.0, -1.0]);
        let profile = row_scales(&z).unwrap();
        assert!((profile.scales()[0] - core::f64::consts::SQRT_2).abs() < 1e-15);

        let z = PairDifferenceMatrix::from_raw(1, 4, vec![0.0; 4]);
        let profile = row_scales(&z).unwrap();
        assert_eq!(profile.scales()[0], 0.0);
        assert!(profile.is_degenerate());
    }

    #[test]
    fn row_scales_concentrate_for_standard_normal_rows() {
        // 500 iid N(0,1) entries: the sample s.d. should sit in [0.9, 1.1]
        // in at least 99% of seeds.
        let mut hits = 0;
        for seed in 0..200u64 {
            let mut rng = crate::rng::substream(seed, &[0x0F]);
            let values: Vec<f64> = (0..500)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut rng);
                    z
                })
                .collect();
            let z = PairDifferenceMatrix::from_raw(1, 500, values);
            let o = row_scales(&z).unwrap().scales()[0];
            if (0.9..=1.1).contains(&o) {
                hits += 1;
            }
        }
        assert!(hits >= 198, "only {hits}/200 seeds in range");
    }

    #[test]
    fn streaming_profile_matches_materialized() {
        let c = centered(10, 3, 17);
        let a = variance_profile(&c).unwrap();
        let b = row_scales(&pair_differences(&c).unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn zero_profile_yields_zero_tau() {
        let profile = VarianceProfile::from_scales(2, vec![0.0, 0.0, 0.0]);
        let est = bootstrap_threshold(&profile, 16, &ThresholdConfig::default()).unwrap();
        assert_eq!(est.tau, 0.0);
        assert!(est.degenerate_profile);
    }

    #[test]
    fn threshold_is_deterministic_per_seed() {
        let c = centered(12, 2, 3);
        let profile = variance_profile(&c).unwrap();
        let cfg = ThresholdConfig::with_seed(99);
        let a = bootstrap_threshold(&profile, 12, &cfg).unwrap();
        let b = bootstrap_threshold(&profile, 12, &cfg).unwrap();
        assert_eq!(a, b);
        let other = bootstrap_threshold(&profile, 12, &ThresholdConfig::with_seed(100)).unwrap();
        assert_ne!(a.tau, other.tau);
    }

    #[test]
    fn threshold_scales_quadratically_with_profile() {
        let c = centered(12, 2, 7);
        let profile = variance_profile(&c).unwrap();
        let scaled = VarianceProfile::from_scales(
            2,
            profile.scales().iter().map(|s| 3.0 * s).collect(),
        );
        let cfg = ThresholdConfig::with_seed(5);
        let tau = bootstrap_threshold(&profile, 12, &cfg).unwrap().tau;
        let tau_scaled = bootstrap_threshold(&scaled, 12, &cfg).unwrap().tau;
        assert!((tau_scaled - 9.0 * tau).abs() <= 1e-9 * tau.abs().max(tau_scaled.abs()));
    }

    #[test]
    fn median_of_maxima_matches_singles() {
        let c = centered(12, 2, 13);
        let profile = variance_profile(&c).unwrap();
        let cfg = ThresholdConfig {
            replicates: 3,
            seed: 21,
            aggregation: Aggregation::MedianOfMaxima,
        };
        let est = bootstrap_threshold(&profile, 12, &cfg).unwrap();
        let mut singles: Vec<f64> = (0..3).map(|b| replicate_max(&profile, 12, 21, b)).collect();
        singles.sort_by(f64::total_cmp);
        assert_eq!(est.tau, singles[1]);
    }

    #[test]
    fn max_of_single_rejects_extra_replicates() {
        let profile = VarianceProfile::from_scales(1, vec![1.0]);
        let cfg = ThresholdConfig {
            replicates: 2,
            seed: 0,
            aggregation: Aggregation::MaxOfSingle,
        };
        assert!(bootstrap_threshold(&profile, 16, &cfg).is_err());
    }

    #[test]
    fn theoretical_threshold_values() {
        let got = theoretical_threshold(500, 200, 5.0).unwrap();
        assert!((got - 31.07304049211096).abs() < 1e-9);
        let sym = theoretical_threshold(200, 200, 2.0).unwrap();
        assert!((sym - 2.0 * 200f64.ln()).abs() < 1e-12);
        // n dominates when longer than p is wide.
        let tall = theoretical_threshold(10, 5000, 1.0).unwrap();
        assert!((tall - 5000f64.ln()).abs() < 1e-12);
        assert!(theoretical_threshold(10, 10, 0.0).is_err());
        assert!(theoretical_threshold(10, 10, f64::NAN).is_err());
        assert!(theoretical_threshold(0, 10, 1.0).is_err());
    }
}
