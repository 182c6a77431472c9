//! Rank tests for non-normal samples: Mann–Whitney (branches e, f) and the
//! Wilcoxon signed-rank T (branches g, h).

use super::ranks::midranks;
use super::{
    check_alpha, check_finite, RankTestDetail, SignedRankDetail, TailDecision, TestDetail,
    TestError, TestId, TestOutcome,
};
use crate::distributions::{exact_t_pmf, exact_u_pmf, std_normal_sf, std_normal_upper};

/// Mann–Whitney uses the exact table regime while either sample has at most
/// this many observations.
pub const MANN_WHITNEY_EXACT_MAX: usize = 10;
/// Wilcoxon T uses the exact table regime up to this many nonzero differences.
pub const WILCOXON_EXACT_MAX: usize = 30;

/// Mann–Whitney U on the joint midranking of `a` and `b`.
///
/// Exact regime (`N_A ≤ 10` or `N_B ≤ 10`): H0 is rejected when
/// `U = min(U_A, U_B)` is strictly below the table value, the largest `u`
/// with `2·P(U ≤ u) ≤ α`. Otherwise `U` is referred to
/// `N(N_A·N_B/2, N_A·N_B(N_A+N_B+1)/12)`. Ties, or sizes past the exact
/// cap, send the exact regime to the normal approximation with a warning.
pub fn mann_whitney(a: &[f64], b: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    check_finite(a)?;
    check_finite(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(TestError::TooFewObservations { needed: 1, got: 0 });
    }
    let (na, nb) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, tie_groups) = midranks(&pooled);
    let rank_sum_a: f64 = ranks[..na].iter().sum();
    let rank_sum_b: f64 = ranks[na..].iter().sum();
    let (naf, nbf) = (na as f64, nb as f64);
    let u_a = naf * nbf + naf * (naf + 1.0) / 2.0 - rank_sum_a;
    let u_b = naf * nbf + nbf * (nbf + 1.0) / 2.0 - rank_sum_b;
    let u = u_a.min(u_b);
    let mut detail = RankTestDetail {
        n_a: na,
        n_b: nb,
        rank_sum_a,
        rank_sum_b,
        u_a,
        u_b,
        tie_groups,
        mean_u: None,
        sd_u: None,
    };
    let mut warnings = Vec::new();

    if na <= MANN_WHITNEY_EXACT_MAX || nb <= MANN_WHITNEY_EXACT_MAX {
        if !detail.tie_groups.is_empty() {
            warnings.push(
                "ties present: exact U distribution invalid, using normal approximation".to_owned(),
            );
        } else {
            match exact_u_pmf(na, nb) {
                Ok(pmf) => {
                    let observed = u.round() as usize;
                    let p = pmf.two_sided_lower(observed);
                    let table = pmf.critical_value(alpha);
                    let reject = table.is_some_and(|c| observed < c);
                    return Ok(TestOutcome {
                        test_id: TestId::MannWhitneySmall,
                        statistic: u,
                        df_or_sizes: vec![na, nb],
                        decision: TailDecision {
                            statistic: u,
                            critical_value: table.map_or(f64::NEG_INFINITY, |c| c as f64),
                            critical_lower: None,
                            p_value: p,
                            alpha,
                            reject,
                        },
                        detail: TestDetail::Rank(detail),
                        warnings,
                    });
                }
                Err(e) => warnings.push(format!("{e}: using normal approximation")),
            }
        }
    }

    let mean = naf * nbf / 2.0;
    let sd = (naf * nbf * (naf + nbf + 1.0) / 12.0).sqrt();
    let z = (u - mean) / sd;
    detail.mean_u = Some(mean);
    detail.sd_u = Some(sd);
    let p = 2.0 * std_normal_sf(z.abs());
    Ok(TestOutcome {
        test_id: TestId::MannWhitneyLarge,
        statistic: z,
        df_or_sizes: vec![na, nb],
        decision: TailDecision::by_p(z, std_normal_upper(alpha / 2.0), p, alpha),
        detail: TestDetail::Rank(detail),
        warnings,
    })
}

/// Wilcoxon signed-rank T on the paired differences `x − y`.
///
/// Zero differences are discarded. With at most 30 remaining differences H0
/// is rejected when `T = min(T_p, T_N)` is at or below the table value;
/// beyond that `T` is referred to `N(n(n+1)/4, n(n+1)(2n+1)/24)`.
pub fn wilcoxon_signed_rank(x: &[f64], y: &[f64], alpha: f64) -> Result<TestOutcome, TestError> {
    check_alpha(alpha)?;
    if x.len() != y.len() {
        return Err(TestError::LengthMismatch(x.len(), y.len()));
    }
    check_finite(x)?;
    check_finite(y)?;
    let diffs: Vec<f64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|d| *d != 0.0)
        .collect();
    let zeros_discarded = x.len() - diffs.len();
    let n = diffs.len();
    if n == 0 {
        return Ok(TestOutcome {
            test_id: TestId::WilcoxonSmall,
            statistic: 0.0,
            df_or_sizes: vec![0],
            decision: TailDecision {
                statistic: 0.0,
                critical_value: f64::NEG_INFINITY,
                critical_lower: None,
                p_value: 1.0,
                alpha,
                reject: false,
            },
            detail: TestDetail::SignedRank(SignedRankDetail {
                t_positive: 0.0,
                t_negative: 0.0,
                n_effective: 0,
                zeros_discarded,
                tie_groups: Vec::new(),
                mean_t: None,
                sd_t: None,
            }),
            warnings: vec!["all paired differences are zero".to_owned()],
        });
    }
    let magnitudes: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let (ranks, tie_groups) = midranks(&magnitudes);
    let t_positive: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let t_negative: f64 = diffs
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d < 0.0)
        .map(|(_, r)| r)
        .sum();
    let t = t_positive.min(t_negative);
    let mut detail = SignedRankDetail {
        t_positive,
        t_negative,
        n_effective: n,
        zeros_discarded,
        tie_groups,
        mean_t: None,
        sd_t: None,
    };
    let mut warnings = Vec::new();

    if n <= WILCOXON_EXACT_MAX {
        if detail.tie_groups.is_empty() {
            let pmf = exact_t_pmf(n)?;
            let observed = t.round() as usize;
            let table = pmf.critical_value(alpha);
            return Ok(TestOutcome {
                test_id: TestId::WilcoxonSmall,
                statistic: t,
                df_or_sizes: vec![n],
                decision: TailDecision {
                    statistic: t,
                    critical_value: table.map_or(f64::NEG_INFINITY, |c| c as f64),
                    critical_lower: None,
                    p_value: pmf.two_sided_lower(observed),
                    alpha,
                    reject: table.is_some_and(|c| observed <= c),
                },
                detail: TestDetail::SignedRank(detail),
                warnings,
            });
        }
        warnings.push(
            "tied |differences|: exact T distribution invalid, using normal approximation"
                .to_owned(),
        );
    }

    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let sd = (nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0).sqrt();
    let z = (t - mean) / sd;
    detail.mean_t = Some(mean);
    detail.sd_t = Some(sd);
    let p = 2.0 * std_normal_sf(z.abs());
    Ok(TestOutcome {
        test_id: TestId::WilcoxonLarge,
        statistic: z,
        df_or_sizes: vec![n],
        decision: TailDecision::by_p(z, std_normal_upper(alpha / 2.0), p, alpha),
        detail: TestDetail::SignedRank(detail),
        warnings,
    })
}
