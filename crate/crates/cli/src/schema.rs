//! Serialized forms of reports and scenario files.
//!
//! Field order is fixed by the struct declarations and floats are written in
//! shortest-round-trip form, so parsing a report and re-serializing it
//! reproduces the file byte for byte.

use anyhow::{bail, Result};
use serde::{Deserialize, Serialize};

use covcp_core::{
    AppliedThreshold, Aggregation, CovBlock, CovSpec, DetectionResult, DetectionStatus,
    ReplicationReport, Scenario,
};

/// How the selection threshold was chosen, echoed into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauRuleReport {
    /// `"bootstrap"`, `"theory"`, or `"none"` (screening skipped).
    pub rule: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub aggregation: Option<String>,
    /// Set when the variance profile was identically zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degenerate_profile: Option<bool>,
    /// Scale in front of `max(ln p, ln n)` for the deterministic rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

fn aggregation_name(aggregation: Aggregation) -> &'static str {
    match aggregation {
        Aggregation::MaxOfSingle => "max-of-single",
        Aggregation::MedianOfMaxima => "median-of-maxima",
    }
}

impl From<&AppliedThreshold> for TauRuleReport {
    fn from(applied: &AppliedThreshold) -> Self {
        match *applied {
            AppliedThreshold::Bootstrap {
                replicates,
                seed,
                aggregation,
                degenerate_profile,
            } => Self {
                rule: "bootstrap".to_string(),
                replicates: Some(replicates),
                seed: Some(seed),
                aggregation: Some(aggregation_name(aggregation).to_string()),
                degenerate_profile: Some(degenerate_profile),
                c: None,
            },
            AppliedThreshold::Theoretical { c } => Self {
                rule: "theory".to_string(),
                replicates: None,
                seed: None,
                aggregation: None,
                degenerate_profile: None,
                c: Some(c),
            },
            AppliedThreshold::None => Self {
                rule: "none".to_string(),
                replicates: None,
                seed: None,
                aggregation: None,
                degenerate_profile: None,
                c: None,
            },
        }
    }
}

fn status_name(status: DetectionStatus) -> &'static str {
    match status {
        DetectionStatus::ChangeEstimated => "change-estimated",
        DetectionStatus::NoComponentsSelected => "no-components-selected",
    }
}

/// Detection outcome written by `covcp detect`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectReport {
    pub n: usize,
    pub p: usize,
    /// `"change-estimated"` or `"no-components-selected"`.
    pub status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_hat: Option<usize>,
    /// `k_hat / n`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_hat: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_score: Option<f64>,
    /// Selection threshold; absent when screening was skipped.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub tau_rule: TauRuleReport,
    pub selected_components: usize,
    pub total_components: usize,
    /// True when an empty selection was replaced by the full component set.
    pub fallback_used: bool,
}

impl DetectReport {
    pub fn from_result(result: &DetectionResult) -> Self {
        let peak_score = result
            .k_hat
            .and_then(|k| result.curve.as_ref().and_then(|curve| curve.value_at(k)));
        Self {
            n: result.n,
            p: result.p,
            status: status_name(result.status).to_string(),
            k_hat: result.k_hat,
            r_hat: result.r_hat,
            peak_score,
            tau: result.tau.is_finite().then_some(result.tau),
            tau_rule: TauRuleReport::from(&result.rule),
            selected_components: result.selection.len(),
            total_components: covcp_core::vech_len(result.p),
            fallback_used: result.fallback_used,
        }
    }
}

/// Summary written by `covcp simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub n: usize,
    pub p: usize,
    pub k0: usize,
    pub target_ratio: f64,
    pub replicates: u32,
    pub detected: u32,
    pub no_detection: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub std: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mse: Option<f64>,
    /// Master seed; each replicate derives its own streams from it.
    pub seed: u64,
    pub skip_reduction: bool,
    pub tau_rule: TauRuleReport,
}

impl SimulationReport {
    pub fn new(
        scenario: &Scenario,
        report: &ReplicationReport,
        seed: u64,
        skip_reduction: bool,
        tau_rule: TauRuleReport,
    ) -> Self {
        Self {
            n: scenario.n(),
            p: scenario.p(),
            k0: scenario.k0(),
            target_ratio: scenario.ratio(),
            replicates: report.requested(),
            detected: report.n_detected(),
            no_detection: report.n_no_detection(),
            mean: report.mean(),
            std: report.std_dev(),
            mse: report.mse(),
            seed,
            skip_reduction,
            tau_rule,
        }
    }
}

/// A 2x2 covariance block in a scenario file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovBlockDto {
    pub v11: f64,
    pub v12: f64,
    pub v22: f64,
}

impl From<CovBlockDto> for CovBlock {
    fn from(dto: CovBlockDto) -> Self {
        Self {
            v11: dto.v11,
            v12: dto.v12,
            v22: dto.v22,
        }
    }
}

/// A segment covariance in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CovSpecDto {
    /// `scale` times the identity.
    ScaledIdentity { scale: f64 },
    /// Identity except the first diagonal entry, which is `value`.
    SingleEntry { value: f64 },
    /// 2x2 blocks on the leading diagonal positions, identity elsewhere.
    BlockDiagonal { blocks: Vec<CovBlockDto> },
}

impl From<CovSpecDto> for CovSpec {
    fn from(dto: CovSpecDto) -> Self {
        match dto {
            CovSpecDto::ScaledIdentity { scale } => CovSpec::ScaledIdentity { scale },
            CovSpecDto::SingleEntry { value } => CovSpec::SingleEntry { value },
            CovSpecDto::BlockDiagonal { blocks } => CovSpec::BlockDiagonal {
                blocks: blocks.into_iter().map(CovBlock::from).collect(),
            },
        }
    }
}

/// On-disk description of a simulation scenario.
///
/// Either `case` (1-4, the standard designs) or both explicit segment
/// covariances must be given, not both.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub n: usize,
    pub p: usize,
    pub k0: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<u8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma1: Option<CovSpecDto>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma2: Option<CovSpecDto>,
}

impl ScenarioFile {
    pub fn into_scenario(self) -> Result<Scenario> {
        match (self.case, self.sigma1, self.sigma2) {
            (Some(case), None, None) => {
                Ok(Scenario::standard_case(case, self.n, self.p, self.k0)?)
            }
            (None, Some(sigma1), Some(sigma2)) => Ok(Scenario::new(
                self.n,
                self.p,
                self.k0,
                sigma1.into(),
                sigma2.into(),
            )?),
            _ => bail!("scenario must set either `case` or both `sigma1` and `sigma2`"),
        }
    }
}

/// Serializes with two-space indentation and a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}
