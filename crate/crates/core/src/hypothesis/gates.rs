//! Rater influence, the Kolmogorov–Smirnov normality gate and the
//! correlation (independence) gate.

use serde::{Deserialize, Serialize};

use super::parametric::one_sample_t;
use super::ranks::midranks;
use super::{
    check_alpha, check_finite, check_paired, CorrelationKind, CorrelationOutcome, SampleSummary,
    TailDecision, TestDetail, TestError, TestId, TestOutcome,
};
use crate::distributions::{
    std_normal_cdf, std_normal_sf, std_normal_upper, student_t_sf, student_t_upper,
};

/// H0: τ_j − τ_k = 0, tested by a one-sample t test on the per-project
/// differences `M_ji − M_ki`.
pub fn rater_influence_test(differences: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    one_sample_t(differences, alpha, TestId::RaterInfluence)
}

/// Reference distribution for the KS statistic with estimated parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalityMethod {
    /// Plain asymptotic Kolmogorov distribution of `√n · D`.
    #[default]
    Kolmogorov,
    /// Dallal–Wilkinson approximation to the Lilliefors distribution.
    Lilliefors,
}

/// Kolmogorov–Smirnov normality gate with the plain Kolmogorov p-value.
pub fn ks_normality(sample: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    ks_normality_with(sample, alpha, NormalityMethod::Kolmogorov)
}

/// `D = sup |F_n − Φ((x − x̄)/s)|` with `s` using divisor n. `reject` means
/// the sample is classified non-normal.
pub fn ks_normality_with(
    sample: &[f64],
    alpha: f64,
    method: NormalityMethod,
) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_finite(sample)?;
    let n = sample.len();
    if n < 3 {
        return Err(TestError::TooFewObservations { needed: 3, got: n });
    }
    let s = SampleSummary::from_slice(sample);
    let sd = s.sd_n();
    let critical = ks_critical(n, alpha, method);
    if sd == 0.0 {
        return Ok(TestOutcome {
            test_id: TestId::KSNormality,
            statistic: 1.0,
            df_or_sizes: vec![n],
            decision: TailDecision::by_p(1.0, critical, 0.0, alpha),
            detail: TestDetail::Normality {
                n,
                mean: s.mean,
                sd,
                d: 1.0,
                method,
            },
            warnings: vec!["zero variance: a constant sample is not normal".to_owned()],
        });
    }
    let d = ks_statistic(sample, |x| std_normal_cdf((x - s.mean) / sd));
    let p = ks_p_value(d, n, method);
    Ok(TestOutcome {
        test_id: TestId::KSNormality,
        statistic: d,
        df_or_sizes: vec![n],
        decision: TailDecision::by_p(d, critical, p, alpha),
        detail: TestDetail::Normality {
            n,
            mean: s.mean,
            sd,
            d,
            method,
        },
        warnings: Vec::new(),
    })
}

/// Largest deviation between the empirical CDF and `cdf`, checked on both
/// sides of every jump.
pub(crate) fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Survival function of the Kolmogorov distribution, P(K > λ).
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // P(K ≤ λ) = √(2π)/λ · Σ exp(−(2k−1)²π²/(8λ²))
        let c = std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=20 {
            let m = (2 * k - 1) as f64;
            let term = (-m * m * c).exp();
            sum += term;
            if term < 1e-17 * sum {
                break;
            }
        }
        (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * sum).clamp(0.0, 1.0)
    } else {
        // 2 Σ (−1)^(k−1) exp(−2k²λ²)
        let mut sum = 0.0;
        for k in 1..=100 {
            let kf = k as f64;
            let term = (-2.0 * kf * kf * lambda * lambda).exp();
            sum += if k % 2 == 1 { term } else { -term };
            if term < 1e-17 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// Dallal–Wilkinson (1986) approximation of the Lilliefors p-value. The
/// fit targets p < 0.1; larger values are reported as computed, capped at 1.
fn lilliefors_p_value(d: f64, n: usize) -> f64 {
    let (mut d, mut n) = (d, n as f64);
    if n > 100.0 {
        d *= (n / 100.0).powf(0.49);
        n = 100.0;
    }
    let p = (-7.01256 * d * d * (n + 2.78019) + 2.99587 * d * (n + 2.78019).sqrt() - 0.122119
        + 0.974598 / n.sqrt()
        + 1.67997 / n)
        .exp();
    p.clamp(0.0, 1.0)
}

fn ks_p_value(d: f64, n: usize, method: NormalityMethod) -> f64 {
    match method {
        NormalityMethod::Kolmogorov => kolmogorov_sf((n as f64).sqrt() * d),
        NormalityMethod::Lilliefors => lilliefors_p_value(d, n),
    }
}

/// Smallest D whose p-value falls to alpha (bisection; p is decreasing in D).
fn ks_critical(n: usize, alpha: f64, method: NormalityMethod) -> f64 {
    if alpha <= 0.0 {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    if ks_p_value(hi, n, method) >= alpha {
        return hi;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if ks_p_value(mid, n, method) >= alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Pearson's r, or `None` when either series has zero spread.
pub(crate) fn pearson_r(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 || super::is_constant(x) || super::is_constant(y) {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

fn r_to_t_p(r: f64, n: usize) -> Result<(f64, f64), TestError> {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return Ok((r.signum() * f64::INFINITY, 0.0));
    }
    let t = r * df.sqrt() / (1.0 - r * r).sqrt();
    Ok((t, 2.0 * student_t_sf(t.abs(), df)?))
}

/// Kendall's tau-b and its tie-corrected normal-approximation z.
fn kendall(x: &[f64], y: &[f64]) -> Result<(f64, f64), TestError> {
    let n = x.len();
    let mut s = 0i64;
    for i in 0..n {
        for j in (i + 1)..n {
            let a = (x[i] - x[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            let b = (y[i] - y[j]).partial_cmp(&0.0).map_or(0, |o| o as i64);
            s += a * b;
        }
    }
    let (_, tx) = midranks(x);
    let (_, ty) = midranks(y);
    let nf = n as f64;
    let n0 = nf * (nf - 1.0) / 2.0;
    let pairs = |t: &[usize]| t.iter().map(|&g| (g * (g - 1) / 2) as f64).sum::<f64>();
    let (n1, n2) = (pairs(&tx), pairs(&ty));
    if n0 - n1 <= 0.0 || n0 - n2 <= 0.0 {
        return Err(TestError::ZeroVariance);
    }
    let s = s as f64;
    let tau = s / ((n0 - n1) * (n0 - n2)).sqrt();
    let sum = |t: &[usize], f: &dyn Fn(f64) -> f64| t.iter().map(|&g| f(g as f64)).sum::<f64>();
    let v0 = nf * (nf - 1.0) * (2.0 * nf + 5.0);
    let vt = sum(&tx, &|g| g * (g - 1.0) * (2.0 * g + 5.0));
    let vu = sum(&ty, &|g| g * (g - 1.0) * (2.0 * g + 5.0));
    let v1 = sum(&tx, &|g| g * (g - 1.0)) * sum(&ty, &|g| g * (g - 1.0)) / (2.0 * nf * (nf - 1.0));
    let v2 = sum(&tx, &|g| g * (g - 1.0) * (g - 2.0)) * sum(&ty, &|g| g * (g - 1.0) * (g - 2.0))
        / (9.0 * nf * (nf - 1.0) * (nf - 2.0));
    let var_s = (v0 - vt - vu) / 18.0 + v1 + v2;
    Ok((tau.clamp(-1.0, 1.0), s / var_s.sqrt()))
}

/// Correlation gate: coefficient plus two-sided p-value. `reject` means the
/// samples are treated as related.
pub fn correlation(
    x: &[f64],
    y: &[f64],
    kind: CorrelationKind,
    alpha: f64,
) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_paired(x, y, 3)?;
    let n = x.len();
    let (r, statistic, p, critical, df) = match kind {
        CorrelationKind::Pearson | CorrelationKind::Spearman => {
            let r = if kind == CorrelationKind::Pearson {
                pearson_r(x, y)
            } else {
                pearson_r(&midranks(x).0, &midranks(y).0)
            }
            .ok_or(TestError::ZeroVariance)?;
            let (t, p) = r_to_t_p(r, n)?;
            (
                r,
                t,
                p,
                student_t_upper(alpha / 2.0, (n - 2) as f64)?,
                n - 2,
            )
        }
        CorrelationKind::Kendall => {
            let (tau, z) = kendall(x, y)?;
            (
                tau,
                z,
                2.0 * std_normal_sf(z.abs()),
                std_normal_upper(alpha / 2.0),
                n,
            )
        }
    };
    let p = p.clamp(0.0, 1.0);
    Ok(TestOutcome {
        test_id: TestId::Correlation,
        statistic,
        df_or_sizes: vec![df],
        decision: TailDecision::by_p(statistic, critical, p, alpha),
        detail: TestDetail::Correlation(CorrelationOutcome {
            coefficient_kind: kind,
            r,
            p_value: p,
            n,
        }),
        warnings: Vec::new(),
    })
}
