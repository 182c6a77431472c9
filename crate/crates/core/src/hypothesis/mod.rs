//! The hypothesis-test battery: rater influence, the normality and
//! correlation gates, and the eight equality tests (branches a–h).
//!
//! Every test returns a [`TestOutcome`] carrying the statistic, the
//! reference distribution's parameters, the critical value(s), the p-value
//! and the decision, plus a test-specific detail record for auditing.

mod gates;
mod nonparametric;
mod parametric;
pub mod ranks;

pub use gates::{
    correlation, ks_normality, ks_normality_with, rater_influence_test, NormalityMethod,
};
pub use nonparametric::{
    mann_whitney, wilcoxon_signed_rank, MANN_WHITNEY_EXACT_MAX, WILCOXON_EXACT_MAX,
};
pub use parametric::{
    means_indep, means_indep_large, means_indep_small, means_related_z, one_sample_t, var_indep_f,
    var_related_chi2, LARGE_SAMPLE_MIN,
};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distributions::DistError;
use crate::float_serde;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TestId {
    RaterInfluence,
    KSNormality,
    Correlation,
    MeansIndepZ,
    MeansIndepT,
    VarIndepF,
    MeansRelatedZ,
    VarRelatedChi2,
    MannWhitneySmall,
    MannWhitneyLarge,
    WilcoxonSmall,
    WilcoxonLarge,
    InterMethodT,
}

impl TestId {
    pub const ALL: [TestId; 13] = [
        TestId::RaterInfluence,
        TestId::KSNormality,
        TestId::Correlation,
        TestId::MeansIndepZ,
        TestId::MeansIndepT,
        TestId::VarIndepF,
        TestId::MeansRelatedZ,
        TestId::VarRelatedChi2,
        TestId::MannWhitneySmall,
        TestId::MannWhitneyLarge,
        TestId::WilcoxonSmall,
        TestId::WilcoxonLarge,
        TestId::InterMethodT,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TestId::RaterInfluence => "RaterInfluence",
            TestId::KSNormality => "KSNormality",
            TestId::Correlation => "Correlation",
            TestId::MeansIndepZ => "MeansIndepZ",
            TestId::MeansIndepT => "MeansIndepT",
            TestId::VarIndepF => "VarIndepF",
            TestId::MeansRelatedZ => "MeansRelatedZ",
            TestId::VarRelatedChi2 => "VarRelatedChi2",
            TestId::MannWhitneySmall => "MannWhitneySmall",
            TestId::MannWhitneyLarge => "MannWhitneyLarge",
            TestId::WilcoxonSmall => "WilcoxonSmall",
            TestId::WilcoxonLarge => "WilcoxonLarge",
            TestId::InterMethodT => "InterMethodT",
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TestId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TestId::ALL
            .into_iter()
            .find(|t| t.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown test id `{s}`"))
    }
}

/// Statistic, critical value(s), p-value and decision at level `alpha`.
///
/// `critical_value` is the upper critical value of two-sided tests, the
/// table value of the exact rank tests, or `K_α` for the chi-square test.
/// `critical_lower` is only set for the F test's acceptance interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailDecision {
    #[serde(with = "float_serde")]
    pub statistic: f64,
    #[serde(with = "float_serde")]
    pub critical_value: f64,
    #[serde(
        with = "float_serde::option",
        default,
        skip_serializing_if = "Option::is_none"
    )]
    pub critical_lower: Option<f64>,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

impl TailDecision {
    /// Decision by the p-value rule `reject ⇔ p < alpha`.
    pub(crate) fn by_p(statistic: f64, critical_value: f64, p_value: f64, alpha: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        TailDecision {
            statistic,
            critical_value,
            critical_lower: None,
            p_value,
            alpha,
            reject: p_value < alpha,
        }
    }
}

/// Summary statistics carrying both variance conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub n: usize,
    pub mean: f64,
    /// s², divisor n.
    pub var_n: f64,
    /// Divisor n − 1; 0 when n < 2.
    pub var_unbiased: f64,
}

impl SampleSummary {
    pub fn from_slice(xs: &[f64]) -> Self {
        let n = xs.len();
        if n == 0 {
            return SampleSummary {
                n,
                mean: 0.0,
                var_n: 0.0,
                var_unbiased: 0.0,
            };
        }
        if is_constant(xs) {
            return SampleSummary {
                n,
                mean: xs[0],
                var_n: 0.0,
                var_unbiased: 0.0,
            };
        }
        let mean = xs.iter().sum::<f64>() / n as f64;
        let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        SampleSummary {
            n,
            mean,
            var_n: ss / n as f64,
            var_unbiased: if n > 1 { ss / (n - 1) as f64 } else { 0.0 },
        }
    }

    /// s with divisor n.
    pub fn sd_n(&self) -> f64 {
        self.var_n.sqrt()
    }
}

pub(crate) fn is_constant(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] == w[1])
}

/// Ranking details of the Mann–Whitney test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankTestDetail {
    pub n_a: usize,
    pub n_b: usize,
    pub rank_sum_a: f64,
    pub rank_sum_b: f64,
    pub u_a: f64,
    pub u_b: f64,
    /// Sizes of the groups of tied values (only groups of two or more).
    pub tie_groups: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd_u: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignedRankDetail {
    pub t_positive: f64,
    pub t_negative: f64,
    pub n_effective: usize,
    pub zeros_discarded: usize,
    pub tie_groups: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sd_t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatedVarianceDetail {
    pub s11: f64,
    pub s22: f64,
    pub s12: f64,
    pub det_s: f64,
    pub sigma2: f64,
    pub rho: f64,
    pub dimension: usize,
    pub multiplier: f64,
    pub df: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationKind {
    Pearson,
    Spearman,
    Kendall,
}

impl FromStr for CorrelationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "pearson" => Ok(CorrelationKind::Pearson),
            "spearman" => Ok(CorrelationKind::Spearman),
            "kendall" => Ok(CorrelationKind::Kendall),
            _ => Err(format!("unknown correlation kind `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationOutcome {
    pub coefficient_kind: CorrelationKind,
    pub r: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Test-specific audit record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TestDetail {
    OneSample {
        n: usize,
        mean: f64,
        sd: f64,
        #[serde(with = "float_serde")]
        standard_error: f64,
    },
    TwoSample {
        a: SampleSummary,
        b: SampleSummary,
        #[serde(with = "float_serde")]
        standard_error: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        r12: Option<f64>,
    },
    Variance {
        a: SampleSummary,
        b: SampleSummary,
    },
    RelatedVariance(RelatedVarianceDetail),
    Rank(RankTestDetail),
    SignedRank(SignedRankDetail),
    Normality {
        n: usize,
        mean: f64,
        sd: f64,
        d: f64,
        method: NormalityMethod,
    },
    Correlation(CorrelationOutcome),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test_id: TestId,
    #[serde(with = "float_serde")]
    pub statistic: f64,
    pub df_or_sizes: Vec<usize>,
    pub decision: TailDecision,
    pub detail: TestDetail,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl TestOutcome {
    pub fn reject(&self) -> bool {
        self.decision.reject
    }

    pub fn p_value(&self) -> f64 {
        self.decision.p_value
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TestError {
    #[error("significance level {0} is outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("needs at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("paired series have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite observation")]
    NonFinite,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("zero variance: coefficient undefined")]
    ZeroVariance,
    #[error("covariance matrix is singular (determinant {0})")]
    SingularCovariance(f64),
    #[error(transparent)]
    Distribution(#[from] DistError),
}

pub(crate) fn check_alpha(alpha: f64) -> Result<(), TestError> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(TestError::InvalidAlpha(alpha))
    }
}

pub(crate) fn check_finite(xs: &[f64]) -> Result<(), TestError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(TestError::NonFinite)
    }
}

pub(crate) fn check_paired(x: &[f64], y: &[f64], min: usize) -> Result<(), TestError> {
    if x.len() != y.len() {
        return Err(TestError::LengthMismatch(x.len(), y.len()));
    }
    if x.len() < min {
        return Err(TestError::TooFewObservations {
            needed: min,
            got: x.len(),
        });
    }
    check_finite(x)?;
    check_finite(y)
}
