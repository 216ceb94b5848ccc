//! Synthetic data with a covariance break at a known row.
//!
//! A [`Scenario`] draws independent Gaussian rows, switching the covariance
//! from one [`CovSpec`] to another after a fixed row, and
//! [`run_replications`] feeds many such draws through the detection pipeline
//! and summarizes how well the break is recovered. All randomness flows from
//! one master seed through fixed substreams, so every replicate is
//! reproducible regardless of thread count.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Poisson, StandardNormal};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::data::DataMatrix;
use crate::detect::{detect_change, DetectConfig, TauRule};
use crate::error::{Error, Result};
use crate::math;
use crate::rng::{derive_seed, substream, STREAM_SIM_BOOT, STREAM_SIM_DATA};

/// A symmetric 2x2 covariance block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovBlock {
    pub v11: f64,
    pub v12: f64,
    pub v22: f64,
}

impl CovBlock {
    /// Lower-triangular Cholesky factor `(l11, l21, l22)`.
    fn cholesky(&self, block: usize) -> Result<(f64, f64, f64)> {
        if !(self.v11.is_finite() && self.v12.is_finite() && self.v22.is_finite())
            || self.v11 < 0.0
            || self.v22 < 0.0
        {
            return Err(Error::NotPositiveSemidefinite { block });
        }
        let l11 = math::sqrt(self.v11);
        let l21 = if l11 > 0.0 {
            self.v12 / l11
        } else if self.v12 == 0.0 {
            0.0
        } else {
            return Err(Error::NotPositiveSemidefinite { block });
        };
        let disc = self.v22 - l21 * l21;
        if disc < -1e-10 * self.v22.max(1.0) {
            return Err(Error::NotPositiveSemidefinite { block });
        }
        Ok((l11, l21, math::sqrt(disc.max(0.0))))
    }
}

/// Population covariance of one segment.
#[derive(Debug, Clone, PartialEq)]
pub enum CovSpec {
    /// `scale` times the identity.
    ScaledIdentity { scale: f64 },
    /// Identity except the first diagonal entry, which is `value`.
    SingleEntry { value: f64 },
    /// 2x2 blocks on the leading diagonal positions, identity elsewhere.
    BlockDiagonal { blocks: Vec<CovBlock> },
}

impl CovSpec {
    pub fn validate(&self, p: usize) -> Result<()> {
        if p == 0 {
            return Err(Error::InvalidParameter {
                name: "p",
                detail: "dimension must be positive",
            });
        }
        match self {
            Self::ScaledIdentity { scale } => {
                if !scale.is_finite() || *scale <= 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "scale",
                        detail: "must be finite and positive",
                    });
                }
            }
            Self::SingleEntry { value } => {
                if !value.is_finite() || *value < 0.0 {
                    return Err(Error::InvalidParameter {
                        name: "value",
                        detail: "must be finite and nonnegative",
                    });
                }
            }
            Self::BlockDiagonal { blocks } => {
                if 2 * blocks.len() > p {
                    return Err(Error::InvalidParameter {
                        name: "blocks",
                        detail: "blocks do not fit in the dimension",
                    });
                }
                for (t, b) in blocks.iter().enumerate() {
                    b.cholesky(t)?;
                }
            }
        }
        Ok(())
    }

    /// Dense `p x p` covariance, row major.
    pub fn dense(&self, p: usize) -> Result<Vec<f64>> {
        self.validate(p)?;
        let mut out = vec![0.0; p * p];
        for d in 0..p {
            out[d * p + d] = 1.0;
        }
        match self {
            Self::ScaledIdentity { scale } => {
                for d in 0..p {
                    out[d * p + d] = *scale;
                }
            }
            Self::SingleEntry { value } => out[0] = *value,
            Self::BlockDiagonal { blocks } => {
                for (t, b) in blocks.iter().enumerate() {
                    let i = 2 * t;
                    out[i * p + i] = b.v11;
                    out[i * p + i + 1] = b.v12;
                    out[(i + 1) * p + i] = b.v12;
                    out[(i + 1) * p + i + 1] = b.v22;
                }
            }
        }
        Ok(out)
    }
}

enum RowSampler {
    Diagonal { stds: Vec<f64> },
    Blocks { chol: Vec<(f64, f64, f64)>, p: usize },
}

impl RowSampler {
    fn new(spec: &CovSpec, p: usize) -> Result<Self> {
        spec.validate(p)?;
        Ok(match spec {
            CovSpec::ScaledIdentity { scale } => Self::Diagonal {
                stds: vec![math::sqrt(*scale); p],
            },
            CovSpec::SingleEntry { value } => {
                let mut stds = vec![1.0; p];
                stds[0] = math::sqrt(*value);
                Self::Diagonal { stds }
            }
            CovSpec::BlockDiagonal { blocks } => Self::Blocks {
                chol: blocks
                    .iter()
                    .enumerate()
                    .map(|(t, b)| b.cholesky(t))
                    .collect::<Result<_>>()?,
                p,
            },
        })
    }

    fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut Vec<f64>) {
        match self {
            Self::Diagonal { stds } => {
                for s in stds {
                    let z: f64 = rng.sample(StandardNormal);
                    out.push(s * z);
                }
            }
            Self::Blocks { chol, p } => {
                for (l11, l21, l22) in chol {
                    let z1: f64 = rng.sample(StandardNormal);
                    let z2: f64 = rng.sample(StandardNormal);
                    out.push(l11 * z1);
                    out.push(l21 * z1 + l22 * z2);
                }
                for _ in 2 * chol.len()..*p {
                    out.push(rng.sample(StandardNormal));
                }
            }
        }
    }
}

/// The standard covariance pairs used in the simulation studies, numbered
/// 1 through 4. The first segment is always the identity; the second is
/// `1.5 I`, `2 I`, or the identity with its first diagonal entry set to 4
/// or 8.
pub fn case_covariance(case: u8) -> Result<(CovSpec, CovSpec)> {
    let before = CovSpec::ScaledIdentity { scale: 1.0 };
    let after = match case {
        1 => CovSpec::ScaledIdentity { scale: 1.5 },
        2 => CovSpec::ScaledIdentity { scale: 2.0 },
        3 => CovSpec::SingleEntry { value: 4.0 },
        4 => CovSpec::SingleEntry { value: 8.0 },
        _ => {
            return Err(Error::InvalidParameter {
                name: "case",
                detail: "must be 1, 2, 3, or 4",
            })
        }
    };
    Ok((before, after))
}

/// A random block-diagonal covariance: the number of 2x2 blocks is Poisson
/// with mean 3, clamped to `1..=p/2`; each block has unit variances and an
/// off-diagonal entry drawn uniformly from `[0.3, 0.6)` with a random sign.
/// Draws happen in a fixed order, so a seeded generator reproduces the spec.
pub fn random_block_covariance<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Result<CovSpec> {
    if p < 2 {
        return Err(Error::InvalidParameter {
            name: "p",
            detail: "need at least two coordinates for a block",
        });
    }
    let poisson = Poisson::new(3.0).expect("valid rate");
    let drawn = rng.sample(poisson) as usize;
    let count = drawn.clamp(1, p / 2);
    let blocks = (0..count)
        .map(|_| {
            let magnitude = rng.random_range(0.3..0.6);
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            CovBlock {
                v11: 1.0,
                v12: sign * magnitude,
                v22: 1.0,
            }
        })
        .collect();
    Ok(CovSpec::BlockDiagonal { blocks })
}

/// Draws `n` independent rows from one covariance.
pub fn sample_matrix<R: Rng + ?Sized>(
    n: usize,
    p: usize,
    spec: &CovSpec,
    rng: &mut R,
) -> Result<DataMatrix> {
    let sampler = RowSampler::new(spec, p)?;
    let mut values = Vec::with_capacity(n * p);
    for _ in 0..n {
        sampler.sample_into(rng, &mut values);
    }
    DataMatrix::from_vec(n, p, values)
}

/// A sampling plan: `n` rows of dimension `p`, covariance switching from
/// `sigma1` to `sigma2` after row `k0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    n: usize,
    p: usize,
    k0: usize,
    sigma1: CovSpec,
    sigma2: CovSpec,
}

impl Scenario {
    pub fn new(n: usize, p: usize, k0: usize, sigma1: CovSpec, sigma2: CovSpec) -> Result<Self> {
        if n < DataMatrix::MIN_ROWS {
            return Err(Error::TooFewRows {
                n,
                min: DataMatrix::MIN_ROWS,
            });
        }
        if k0 < 1 || k0 >= n {
            return Err(Error::SplitOutOfRange { split: k0, n });
        }
        sigma1.validate(p)?;
        sigma2.validate(p)?;
        Ok(Self {
            n,
            p,
            k0,
            sigma1,
            sigma2,
        })
    }

    /// Scenario for one of the standard cases; see [`case_covariance`].
    pub fn standard_case(case: u8, n: usize, p: usize, k0: usize) -> Result<Self> {
        let (sigma1, sigma2) = case_covariance(case)?;
        Self::new(n, p, k0, sigma1, sigma2)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn k0(&self) -> usize {
        self.k0
    }

    /// `k0 / n`, the quantity the pipeline estimates.
    pub fn ratio(&self) -> f64 {
        self.k0 as f64 / self.n as f64
    }

    pub fn sigma1(&self) -> &CovSpec {
        &self.sigma1
    }

    pub fn sigma2(&self) -> &CovSpec {
        &self.sigma2
    }

    /// Draws one dataset with the break in place.
    pub fn sample_dataset<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<DataMatrix> {
        let before = RowSampler::new(&self.sigma1, self.p)?;
        let after = RowSampler::new(&self.sigma2, self.p)?;
        let mut values = Vec::with_capacity(self.n * self.p);
        for _ in 0..self.k0 {
            before.sample_into(rng, &mut values);
        }
        for _ in self.k0..self.n {
            after.sample_into(rng, &mut values);
        }
        DataMatrix::from_vec(self.n, self.p, values)
    }
}

/// Summary of repeated detection runs on one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicationReport {
    requested: u32,
    target_ratio: f64,
    estimates: Vec<f64>,
    n_no_detection: u32,
}

impl ReplicationReport {
    /// Builds the summary from per-replicate outcomes; `None` marks a run
    /// where no component survived screening.
    pub fn from_estimates(target_ratio: f64, outcomes: &[Option<f64>]) -> Self {
        let estimates: Vec<f64> = outcomes.iter().filter_map(|o| *o).collect();
        Self {
            requested: outcomes.len() as u32,
            target_ratio,
            n_no_detection: (outcomes.len() - estimates.len()) as u32,
            estimates,
        }
    }

    pub fn requested(&self) -> u32 {
        self.requested
    }

    pub fn target_ratio(&self) -> f64 {
        self.target_ratio
    }

    pub fn n_detected(&self) -> u32 {
        self.estimates.len() as u32
    }

    pub fn n_no_detection(&self) -> u32 {
        self.n_no_detection
    }

    /// Estimated ratios from the replicates that detected a change.
    pub fn estimates(&self) -> &[f64] {
        &self.estimates
    }

    pub fn mean(&self) -> Option<f64> {
        if self.estimates.is_empty() {
            return None;
        }
        Some(self.estimates.iter().sum::<f64>() / self.estimates.len() as f64)
    }

    /// Sample standard deviation (n - 1 denominator) of the estimates.
    pub fn std_dev(&self) -> Option<f64> {
        let m = self.estimates.len();
        if m < 2 {
            return None;
        }
        let mean = self.mean()?;
        let ss: f64 = self.estimates.iter().map(|e| (e - mean) * (e - mean)).sum();
        Some(math::sqrt(ss / (m - 1) as f64))
    }

    /// Mean squared error of the estimates around the target ratio.
    pub fn mse(&self) -> Option<f64> {
        if self.estimates.is_empty() {
            return None;
        }
        let ss: f64 = self
            .estimates
            .iter()
            .map(|e| (e - self.target_ratio) * (e - self.target_ratio))
            .sum();
        Some(ss / self.estimates.len() as f64)
    }
}

/// Runs the pipeline on `replicates` fresh datasets and summarizes the
/// estimated break ratios.
///
/// Replicate `i` draws its data from a substream keyed by `i`; when the
/// configuration uses a bootstrap threshold, its seed is likewise rederived
/// per replicate. Results are identical for any thread count.
pub fn run_replications(
    scenario: &Scenario,
    replicates: u32,
    master_seed: u64,
    cfg: &DetectConfig,
) -> Result<ReplicationReport> {
    if replicates < 2 {
        return Err(Error::InvalidParameter {
            name: "replicates",
            detail: "need at least two replicates",
        });
    }
    let run_one = |i: u32| -> Result<Option<f64>> {
        let mut data_rng = substream(master_seed, &[STREAM_SIM_DATA, i as u64]);
        let data = scenario.sample_dataset(&mut data_rng)?;
        let mut replicate_cfg = cfg.clone();
        if let TauRule::Bootstrap(tc) = &mut replicate_cfg.tau_rule {
            tc.seed = derive_seed(master_seed, &[STREAM_SIM_BOOT, i as u64]);
        }
        Ok(detect_change(&data, &replicate_cfg)?.r_hat)
    };
    #[cfg(feature = "parallel")]
    let outcomes: Vec<Option<f64>> = (0..replicates)
        .into_par_iter()
        .map(run_one)
        .collect::<Result<_>>()?;
    #[cfg(not(feature = "parallel"))]
    let outcomes: Vec<Option<f64>> = (0..replicates).map(run_one).collect::<Result<_>>()?;
    Ok(ReplicationReport::from_estimates(
        scenario.ratio(),
        &outcomes,
    ))
}
