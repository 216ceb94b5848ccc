//! Stage two: locate the change point on the selected components.
//!
//! [`change_score`] is a between-segment statistic built from the same
//! debiased pair sums as the screening contrast, accumulated over the
//! selected components:
//!
//! ```text
//! score(k) = (1/n^4) * sum_c [ (n-k)(n-k-1)(S_k^2 - Q_k)
//!                              - 2(k-1)(n-k-1) S_k T_k
//!                              + k(k-1)(T_k^2 - R_k) ]
//! ```
//!
//! with `S, Q` (`T, R`) the head (tail) sums of the component's product
//! series. The estimated change point is the smallest split maximizing the
//! score over `k = 2..=n-2`; ties break toward the smallest split.
//!
//! [`detect_change`] runs the full two-stage pipeline: center, screen,
//! threshold, select, score, locate.

use alloc::vec;
use alloc::vec::Vec;

use crate::bootstrap::{
    bootstrap_threshold, theoretical_threshold, variance_profile, Aggregation, ThresholdConfig,
};
use crate::data::{center, CenteredData, ComponentSeries, DataMatrix};
use crate::error::{Error, Result};
use crate::reduction::{screening, select, SelectionSet};

#[inline]
fn score_from_sums(s_k: f64, q_k: f64, s_n: f64, q_n: f64, k: usize, n: usize) -> f64 {
    let t_k = s_n - s_k;
    let r_k = q_n - q_k;
    let kf = k as f64;
    let mf = (n - k) as f64;
    mf * (mf - 1.0) * (s_k * s_k - q_k) - 2.0 * (kf - 1.0) * (mf - 1.0) * s_k * t_k
        + kf * (kf - 1.0) * (t_k * t_k - r_k)
}

/// Change score at split `k` over the given component series.
///
/// All series must share one length `n`, and `2 <= k <= n - 2`.
pub fn change_score(selected: &[ComponentSeries], k: usize) -> Result<f64> {
    let first = selected.first().ok_or(Error::InvalidParameter {
        name: "selected",
        detail: "at least one component series required",
    })?;
    let n = first.len();
    if selected.iter().any(|s| s.len() != n) {
        return Err(Error::ShapeMismatch {
            what: "series length",
            expected: n,
            actual: selected.iter().map(ComponentSeries::len).max().unwrap_or(0),
        });
    }
    if n < 4 || k < 2 || k > n - 2 {
        return Err(Error::SplitOutOfRange { split: k, n });
    }
    let mut acc = 0.0;
    for s in selected {
        acc += score_from_sums(s.sum_to(k), s.sq_sum_to(k), s.total(), s.total_sq(), k, n);
    }
    let nf = n as f64;
    Ok(acc / (nf * nf * nf * nf))
}

/// The change score evaluated at every admissible split.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreCurve {
    n: usize,
    values: Vec<f64>,
}

impl ScoreCurve {
    /// Evaluates the curve for the selected components.
    ///
    /// Components are streamed one at a time, so memory stays `O(n)` even
    /// when the selection is the full set of `p(p+1)/2` components.
    pub fn compute(c: &CenteredData, selection: &SelectionSet) -> Result<Self> {
        if selection.p() != c.p() {
            return Err(Error::ShapeMismatch {
                what: "selection dimension",
                expected: c.p(),
                actual: selection.p(),
            });
        }
        if selection.is_empty() {
            return Err(Error::InvalidParameter {
                name: "selection",
                detail: "at least one component required",
            });
        }
        let n = c.n();
        if n < 4 {
            return Err(Error::TooFewRows { n, min: 4 });
        }
        let mut raw = vec![0.0f64; n - 3];
        for idx in selection.indices() {
            let series = ComponentSeries::compute(c, *idx)?;
            let (s_n, q_n) = (series.total(), series.total_sq());
            for k in 2..=n - 2 {
                raw[k - 2] +=
                    score_from_sums(series.sum_to(k), series.sq_sum_to(k), s_n, q_n, k, n);
            }
        }
        let nf = n as f64;
        let n4 = nf * nf * nf * nf;
        for v in &mut raw {
            *v /= n4;
        }
        Ok(Self { n, values: raw })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Scores for `k = 2..=n-2`, in order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value_at(&self, k: usize) -> Option<f64> {
        if k < 2 || k > self.n - 2 {
            None
        } else {
            Some(self.values[k - 2])
        }
    }

    /// `(k, score)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i + 2, v))
    }

    /// Smallest split attaining the maximum score.
    pub fn peak(&self) -> usize {
        let mut best = 0usize;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best + 2
    }
}

/// Threshold rule for the screening stage.
#[derive(Debug, Clone, PartialEq)]
pub enum TauRule {
    Bootstrap(ThresholdConfig),
    Theoretical { c: f64 },
}

/// Pipeline configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub tau_rule: TauRule,
    /// Score every component instead of screening first.
    pub skip_reduction: bool,
    /// When the selection comes back empty, fall back to the full component
    /// set instead of reporting no detection.
    pub fallback_all: bool,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            tau_rule: TauRule::Bootstrap(ThresholdConfig::default()),
            skip_reduction: false,
            fallback_all: false,
        }
    }
}

impl DetectConfig {
    /// Bootstrap-thresholded pipeline with the given seed.
    pub fn bootstrap(seed: u64) -> Self {
        Self {
            tau_rule: TauRule::Bootstrap(ThresholdConfig::with_seed(seed)),
            ..Self::default()
        }
    }

    /// Closed-form threshold `c * max(ln p, ln n)`.
    pub fn theoretical(c: f64) -> Self {
        Self {
            tau_rule: TauRule::Theoretical { c },
            ..Self::default()
        }
    }

    /// No screening; every component enters the score.
    pub fn without_reduction() -> Self {
        Self {
            skip_reduction: true,
            ..Self::default()
        }
    }
}

/// The threshold that was actually applied, for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AppliedThreshold {
    Bootstrap {
        replicates: u32,
        seed: u64,
        aggregation: Aggregation,
        degenerate_profile: bool,
    },
    Theoretical {
        c: f64,
    },
    /// Screening was skipped.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DetectionStatus {
    ChangeEstimated,
    NoComponentsSelected,
}

/// Outcome of the two-stage pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub n: usize,
    pub p: usize,
    /// Threshold used by the selection; minus infinity when screening is
    /// skipped.
    pub tau: f64,
    pub rule: AppliedThreshold,
    pub selection: SelectionSet,
    /// True when an empty selection was replaced by the full set.
    pub fallback_used: bool,
    pub curve: Option<ScoreCurve>,
    pub k_hat: Option<usize>,
    /// `k_hat / n`.
    pub r_hat: Option<f64>,
    pub status: DetectionStatus,
}

/// Runs the two-stage pipeline on raw observations.
///
/// An empty selection is a legal outcome, reported as
/// [`DetectionStatus::NoComponentsSelected`] with no location estimate,
/// unless `fallback_all` asks for the full component set instead.
pub fn detect_change(data: &DataMatrix, cfg: &DetectConfig) -> Result<DetectionResult> {
    let centered = center(data);
    let scores = screening(&centered)?;
    let (tau, rule) = if cfg.skip_reduction {
        (f64::NEG_INFINITY, AppliedThreshold::None)
    } else {
        match &cfg.tau_rule {
            TauRule::Bootstrap(tc) => {
                let profile = variance_profile(&centered)?;
                let est = bootstrap_threshold(&profile, data.n(), tc)?;
                (
                    est.tau,
                    AppliedThreshold::Bootstrap {
                        replicates: est.replicates,
                        seed: tc.seed,
                        aggregation: est.aggregation,
                        degenerate_profile: est.degenerate_profile,
                    },
                )
            }
            TauRule::Theoretical { c } => (
                theoretical_threshold(data.p(), data.n(), *c)?,
                AppliedThreshold::Theoretical { c: *c },
            ),
        }
    };
    let mut selection = select(&scores, tau)?;
    let mut fallback_used = false;
    if selection.is_empty() && cfg.fallback_all {
        selection = SelectionSet::full(data.p());
        fallback_used = true;
    }
    if selection.is_empty() {
        return Ok(DetectionResult {
            n: data.n(),
            p: data.p(),
            tau,
            rule,
            selection,
            fallback_used,
            curve: None,
            k_hat: None,
            r_hat: None,
            status: DetectionStatus::NoComponentsSelected,
        });
    }
    let curve = ScoreCurve::compute(&centered, &selection)?;
    let k_hat = curve.peak();
    Ok(DetectionResult {
        n: data.n(),
        p: data.p(),
        tau,
        rule,
        selection,
        fallback_used,
        curve: Some(curve),
        k_hat: Some(k_hat),
        r_hat: Some(k_hat as f64 / data.n() as f64),
        status: DetectionStatus::ChangeEstimated,
    })
}
