//! Normal-theory tests: one-sample t, branches a–d.

use super::gates::pearson_r;
use super::{
    check_alpha, check_finite, check_paired, is_constant, RelatedVarianceDetail, SampleSummary,
    TailDecision, TestDetail, TestError, TestId, TestOutcome,
};
use crate::distributions::{
    chi_square_quantile, chi_square_sf, f_cdf, f_quantile, f_sf, std_normal_sf, std_normal_upper,
    student_t_sf, student_t_upper,
};

/// Samples with more than this many observations use the large-sample Z
/// form of the independent-means test; at or below it, the pooled t.
pub const LARGE_SAMPLE_MIN: usize = 30;

/// Dimension of the random vector in the related-variances test.
const DIMENSION: usize = 2;

/// One-sample t test of H0: mean = 0, `t = x̄ / (s / √(n−1))` with `s`
/// using divisor n (equivalently the usual `x̄ / (s_{n−1} / √n)`).
///
/// A constant sample has no spread: all zeros accept with p = 1, a nonzero
/// constant rejects with p = 0.
pub fn one_sample_t(xs: &[f64], alpha: f64, test_id: TestId) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_finite(xs)?;
    let n = xs.len();
    if n < 2 {
        return Err(TestError::TooFewObservations { needed: 2, got: n });
    }
    let s = SampleSummary::from_slice(xs);
    let df = (n - 1) as f64;
    let critical = student_t_upper(alpha / 2.0, df)?;
    let se = (s.var_n / df).sqrt();
    let detail = TestDetail::OneSample {
        n,
        mean: s.mean,
        sd: s.sd_n(),
        standard_error: se,
    };
    let mut warnings = Vec::new();
    let (t, p) = if is_constant(xs) {
        if s.mean == 0.0 {
            warnings.push("all differences are zero".to_owned());
            (0.0, 1.0)
        } else {
            warnings.push("constant nonzero difference: zero spread".to_owned());
            (s.mean.signum() * f64::INFINITY, 0.0)
        }
    } else {
        let t = s.mean / se;
        (t, 2.0 * student_t_sf(t.abs(), df)?)
    };
    Ok(TestOutcome {
        test_id,
        statistic: t,
        df_or_sizes: vec![n - 1],
        decision: TailDecision::by_p(t, critical, p, alpha),
        detail,
        warnings,
    })
}

fn degenerate_location(mean_a: f64, mean_b: f64, warnings: &mut Vec<String>) -> (f64, f64) {
    if mean_a == mean_b {
        warnings.push("zero standard error with equal means".to_owned());
        (0.0, 1.0)
    } else {
        warnings.push("zero standard error with different means".to_owned());
        ((mean_a - mean_b).signum() * f64::INFINITY, 0.0)
    }
}

/// Branch a, large samples: `Z = (x̄₁−x̄₂) / √(s₁²/(n1−1) + s₂²/(n2−1))`.
pub fn means_indep_large(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    if a.n <= LARGE_SAMPLE_MIN || b.n <= LARGE_SAMPLE_MIN {
        return Err(TestError::Precondition(format!(
            "large-sample Z needs both n > {LARGE_SAMPLE_MIN}, got {} and {}",
            a.n, b.n
        )));
    }
    large_z(a, b, alpha)
}

/// Branch a as the decision tree runs it: Z when both samples exceed
/// [`LARGE_SAMPLE_MIN`], the pooled t otherwise (including mixed sizes).
pub fn means_indep(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    if a.n > LARGE_SAMPLE_MIN && b.n > LARGE_SAMPLE_MIN {
        large_z(a, b, alpha)
    } else {
        pooled_t(a, b, alpha)
    }
}

pub(crate) fn large_z(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    if a.n < 2 || b.n < 2 {
        return Err(TestError::TooFewObservations {
            needed: 2,
            got: a.n.min(b.n),
        });
    }
    let se = (a.var_n / (a.n - 1) as f64 + b.var_n / (b.n - 1) as f64).sqrt();
    let mut warnings = Vec::new();
    let (z, p) = if se == 0.0 {
        degenerate_location(a.mean, b.mean, &mut warnings)
    } else {
        let z = (a.mean - b.mean) / se;
        (z, 2.0 * std_normal_sf(z.abs()))
    };
    Ok(TestOutcome {
        test_id: TestId::MeansIndepZ,
        statistic: z,
        df_or_sizes: vec![a.n, b.n],
        decision: TailDecision::by_p(z, std_normal_upper(alpha / 2.0), p, alpha),
        detail: TestDetail::TwoSample {
            a: *a,
            b: *b,
            standard_error: se,
            r12: None,
        },
        warnings,
    })
}

/// Branch a, small samples: pooled t with `n1 + n2 − 2` degrees of freedom,
/// `t = (x̄₁−x̄₂) / √(((n1 s₁² + n2 s₂²)/(n1+n2−2)) · (n1+n2)/(n1 n2))`.
pub fn means_indep_small(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    if a.n > LARGE_SAMPLE_MIN || b.n > LARGE_SAMPLE_MIN {
        return Err(TestError::Precondition(format!(
            "pooled t is the small-sample form (n ≤ {LARGE_SAMPLE_MIN}), got {} and {}",
            a.n, b.n
        )));
    }
    pooled_t(a, b, alpha)
}

pub(crate) fn pooled_t(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    if a.n < 2 || b.n < 2 {
        return Err(TestError::TooFewObservations {
            needed: 2,
            got: a.n.min(b.n),
        });
    }
    let (n1, n2) = (a.n as f64, b.n as f64);
    let df = n1 + n2 - 2.0;
    let pooled = (n1 * a.var_n + n2 * b.var_n) / df;
    let se = (pooled * (n1 + n2) / (n1 * n2)).sqrt();
    let mut warnings = Vec::new();
    let (t, p) = if se == 0.0 {
        degenerate_location(a.mean, b.mean, &mut warnings)
    } else {
        let t = (a.mean - b.mean) / se;
        (t, 2.0 * student_t_sf(t.abs(), df)?)
    };
    Ok(TestOutcome {
        test_id: TestId::MeansIndepT,
        statistic: t,
        df_or_sizes: vec![a.n + b.n - 2],
        decision: TailDecision::by_p(t, student_t_upper(alpha / 2.0, df)?, p, alpha),
        detail: TestDetail::TwoSample {
            a: *a,
            b: *b,
            standard_error: se,
            r12: None,
        },
        warnings,
    })
}

/// Branch b: `F = n1(n2−1)s₁² / (n2(n1−1)s₂²)` on `(n1−1, n2−1)` degrees of
/// freedom; H0 is kept while F lies inside `(F_{1−α/2}, F_{α/2})`.
pub fn var_indep_f(
    a: &SampleSummary,
    b: &SampleSummary,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    if a.n < 2 || b.n < 2 {
        return Err(TestError::TooFewObservations {
            needed: 2,
            got: a.n.min(b.n),
        });
    }
    let (n1, n2) = (a.n as f64, b.n as f64);
    let (d1, d2) = (n1 - 1.0, n2 - 1.0);
    let mut warnings = Vec::new();
    let (f, p) = if b.var_n == 0.0 {
        if a.var_n == 0.0 {
            warnings.push("both samples are constant".to_owned());
            (1.0, 1.0)
        } else {
            warnings.push("second sample is constant".to_owned());
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = n1 * (n2 - 1.0) * a.var_n / (n2 * (n1 - 1.0) * b.var_n);
        let lower = f_cdf(f, d1, d2)?;
        let upper = f_sf(f, d1, d2)?;
        (f, 2.0 * lower.min(upper))
    };
    let (lo, hi) = if alpha <= 0.0 {
        (0.0, f64::INFINITY)
    } else if alpha >= 1.0 {
        let m = f_quantile(0.5, d1, d2)?;
        (m, m)
    } else {
        (
            f_quantile(alpha / 2.0, d1, d2)?,
            f_quantile(1.0 - alpha / 2.0, d1, d2)?,
        )
    };
    let mut decision = TailDecision::by_p(f, hi, p, alpha);
    decision.critical_lower = Some(lo);
    Ok(TestOutcome {
        test_id: TestId::VarIndepF,
        statistic: f,
        df_or_sizes: vec![a.n - 1, b.n - 1],
        decision,
        detail: TestDetail::Variance { a: *a, b: *b },
        warnings,
    })
}

/// Branch c: related means,
/// `Z = (x̄₁−x̄₂) / √(s₁²/(n−1) + s₂²/(n−1) − 2 r₁₂ (s₁/√(n−1))(s₂/√(n−1)))`
/// with divisor-n variances and r₁₂ the Pearson coefficient of the pairs.
pub fn means_related_z(x: &[f64], y: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_paired(x, y, 3)?;
    let a = SampleSummary::from_slice(x);
    let b = SampleSummary::from_slice(y);
    let n1 = (x.len() - 1) as f64;
    let r12 = pearson_r(x, y).unwrap_or(0.0);
    let (s1, s2) = (a.sd_n(), b.sd_n());
    let se2 = a.var_n / n1 + b.var_n / n1 - 2.0 * r12 * (s1 / n1.sqrt()) * (s2 / n1.sqrt());
    let diffs: Vec<f64> = x.iter().zip(y).map(|(p, q)| p - q).collect();
    let mut warnings = Vec::new();
    let (se, z, p) = if is_constant(&diffs) || se2 <= 0.0 {
        let (z, p) = degenerate_location(a.mean, b.mean, &mut warnings);
        (0.0, z, p)
    } else {
        let se = se2.sqrt();
        let z = (a.mean - b.mean) / se;
        (se, z, 2.0 * std_normal_sf(z.abs()))
    };
    Ok(TestOutcome {
        test_id: TestId::MeansRelatedZ,
        statistic: z,
        df_or_sizes: vec![x.len()],
        decision: TailDecision::by_p(z, std_normal_upper(alpha / 2.0), p, alpha),
        detail: TestDetail::TwoSample {
            a,
            b,
            standard_error: se,
            r12: Some(r12),
        },
        warnings,
    })
}

/// Bartlett-type multiplier `n − 1 − p(p+1)²(2p−3) / (6(p−1)(p²+p−4))`.
fn chi2_multiplier(n: usize, p: usize) -> f64 {
    let p = p as f64;
    (n as f64)
        - 1.0
        - p * (p + 1.0).powi(2) * (2.0 * p - 3.0) / (6.0 * (p - 1.0) * (p * p + p - 4.0))
}

/// Branch d: related variances via the compound-symmetry likelihood ratio
///
/// ```text
/// −[n − 1 − p(p+1)²(2p−3) / (6(p−1)(p²+p−4))] · ln( |Ŝ| / ((σ̂²)^p (1−ρ̂)^(p−1) (1+(p−1)ρ̂)) )
/// ```
///
/// on `p(p+1)/2 − 2` degrees of freedom, with p = 2. The printed source
/// formula shows `(σ̂²)` without the exponent; the determinant has units of
/// variance², so the exponent p is required for the ratio to be scale-free.
///
/// For p = 2 the log ratio equals `−ln(1 + Δ²/|Ŝ|)` with `Δ = (ŝ₁₁ − ŝ₂₂)/2`,
/// which is how it is evaluated (nonnegative by construction).
pub fn var_related_chi2(x: &[f64], y: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_paired(x, y, 4)?;
    let n = x.len();
    let a = SampleSummary::from_slice(x);
    let b = SampleSummary::from_slice(y);
    let s11 = a.var_unbiased;
    let s22 = b.var_unbiased;
    let s12 = x
        .iter()
        .zip(y)
        .map(|(p, q)| (p - a.mean) * (q - b.mean))
        .sum::<f64>()
        / (n - 1) as f64;
    let det = s11 * s22 - s12 * s12;
    let sigma2 = (s11 + s22) / 2.0;
    let rho = if sigma2 > 0.0 { s12 / sigma2 } else { 0.0 };
    let multiplier = chi2_multiplier(n, DIMENSION);
    let df = DIMENSION * (DIMENSION + 1) / 2 - 2;
    let mut warnings = Vec::new();
    let half_gap = (s11 - s22) / 2.0;
    let singular = !(det > 1e-12 * s11 * s22) || sigma2 == 0.0;
    let statistic = if s11 == s22 {
        if singular {
            warnings.push("singular covariance with equal variances".to_owned());
        }
        0.0
    } else if singular {
        return Err(TestError::SingularCovariance(det));
    } else {
        multiplier * (half_gap * half_gap / det).ln_1p()
    };
    let p = chi_square_sf(statistic, df as f64)?;
    let critical = if alpha <= 0.0 {
        f64::INFINITY
    } else if alpha >= 1.0 {
        0.0
    } else {
        chi_square_quantile(1.0 - alpha, df as f64)?
    };
    Ok(TestOutcome {
        test_id: TestId::VarRelatedChi2,
        statistic,
        df_or_sizes: vec![df],
        decision: TailDecision::by_p(statistic, critical, p, alpha),
        detail: TestDetail::RelatedVariance(RelatedVarianceDetail {
            s11,
            s22,
            s12,
            det_s: det,
            sigma2,
            rho,
            dimension: DIMENSION,
            multiplier,
            df,
        }),
        warnings,
    })
}
