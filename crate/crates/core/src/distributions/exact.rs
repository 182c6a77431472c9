//! Exact null distributions of the Mann–Whitney U and Wilcoxon signed-rank
//! T statistics, computed by counting dynamic programs instead of lookup
//! tables.

use serde::{Deserialize, Serialize};

use super::DistError;

/// Default bound on `N_A · N_B` for the exact U distribution.
pub const DEFAULT_U_CAP: usize = 400;
/// Default bound on `n` for the exact signed-rank distribution.
pub const DEFAULT_T_CAP: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum RankStatistic {
    MannWhitneyU { n_a: usize, n_b: usize },
    WilcoxonT { n: usize },
}

/// Probability mass function on the integer support `0..=max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactRankPmf {
    pub statistic: RankStatistic,
    pub probabilities: Vec<f64>,
}

impl ExactRankPmf {
    pub fn max_value(&self) -> usize {
        self.probabilities.len() - 1
    }

    pub fn pmf(&self, k: usize) -> f64 {
        self.probabilities.get(k).copied().unwrap_or(0.0)
    }

    /// P(S <= k).
    pub fn cdf(&self, k: usize) -> f64 {
        let upto = k.min(self.max_value());
        self.probabilities[..=upto].iter().sum::<f64>().min(1.0)
    }

    /// Two-sided p-value `2 · P(S <= k)` clamped to 1, for `k` at or below
    /// the midpoint of the support.
    pub fn two_sided_lower(&self, k: usize) -> f64 {
        (2.0 * self.cdf(k)).min(1.0)
    }

    /// Largest `k` with `2 · P(S <= k) <= alpha`, if any.
    pub fn critical_value(&self, alpha: f64) -> Option<usize> {
        let mut acc = 0.0;
        let mut found = None;
        for (k, &p) in self.probabilities.iter().enumerate() {
            acc += p;
            if 2.0 * acc <= alpha {
                found = Some(k);
            } else {
                break;
            }
        }
        found
    }
}

/// Exact distribution of U for sample sizes `n_a`, `n_b` with the default cap.
pub fn exact_u_pmf(n_a: usize, n_b: usize) -> Result<ExactRankPmf, DistError> {
    exact_u_pmf_with_cap(n_a, n_b, DEFAULT_U_CAP)
}

/// Exact distribution of U under H0, every arrangement of the pooled ranks
/// being equally likely.
///
/// `count(m, n, u)` is the number of arrangements of `m` A's and `n` B's
/// giving `U = u`; it satisfies
/// `count(m, n, u) = count(m - 1, n, u - n) + count(m, n - 1, u)`
/// (the largest observation is either an A, which beats all `n` B's, or a B).
pub fn exact_u_pmf_with_cap(n_a: usize, n_b: usize, cap: usize) -> Result<ExactRankPmf, DistError> {
    if n_a == 0 || n_b == 0 {
        return Err(DistError::SampleSize(0));
    }
    if n_a * n_b > cap {
        return Err(DistError::CapExceeded {
            size: n_a * n_b,
            cap,
        });
    }
    // table[i][j] holds counts for (i, j), length i*j + 1
    let mut table: Vec<Vec<Vec<f64>>> = Vec::with_capacity(n_a + 1);
    for i in 0..=n_a {
        let mut row: Vec<Vec<f64>> = Vec::with_capacity(n_b + 1);
        for j in 0..=n_b {
            let mut counts = vec![0.0; i * j + 1];
            if i == 0 || j == 0 {
                counts[0] = 1.0;
            } else {
                let with_a_top = &table[i - 1][j];
                for (u, &c) in with_a_top.iter().enumerate() {
                    counts[u + j] += c;
                }
                let with_b_top = &row[j - 1];
                for (u, &c) in with_b_top.iter().enumerate() {
                    counts[u] += c;
                }
            }
            row.push(counts);
        }
        table.push(row);
    }
    let counts = &table[n_a][n_b];
    let total: f64 = counts.iter().sum();
    Ok(ExactRankPmf {
        statistic: RankStatistic::MannWhitneyU { n_a, n_b },
        probabilities: counts.iter().map(|c| c / total).collect(),
    })
}

/// Largest `u` with `2 · P(U <= u) <= alpha`; `None` when even `u = 0` is too likely.
pub fn u_critical(n_a: usize, n_b: usize, alpha: f64) -> Result<Option<usize>, DistError> {
    Ok(exact_u_pmf(n_a, n_b)?.critical_value(alpha))
}

pub fn exact_t_pmf(n: usize) -> Result<ExactRankPmf, DistError> {
    exact_t_pmf_with_cap(n, DEFAULT_T_CAP)
}

/// Exact distribution of the positive-rank sum over the `2^n` equally likely
/// sign patterns on ranks `1..=n` (subset-sum counting).
pub fn exact_t_pmf_with_cap(n: usize, cap: usize) -> Result<ExactRankPmf, DistError> {
    if n == 0 {
        return Err(DistError::SampleSize(0));
    }
    if n > cap {
        return Err(DistError::CapExceeded { size: n, cap });
    }
    let max = n * (n + 1) / 2;
    let mut counts = vec![0.0_f64; max + 1];
    counts[0] = 1.0;
    let mut reach = 0;
    for rank in 1..=n {
        reach += rank;
        for t in (rank..=reach).rev() {
            counts[t] += counts[t - rank];
        }
    }
    let total = 2f64.powi(n as i32);
    Ok(ExactRankPmf {
        statistic: RankStatistic::WilcoxonT { n },
        probabilities: counts.iter().map(|c| c / total).collect(),
    })
}

/// Largest `t` with `2 · P(T <= t) <= alpha`.
pub fn t_critical(n: usize, alpha: f64) -> Result<Option<usize>, DistError> {
    Ok(exact_t_pmf(n)?.critical_value(alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn u_one_one() {
        let pmf = exact_u_pmf(1, 1).unwrap();
        assert_eq!(pmf.probabilities, vec![0.5, 0.5]);
    }

    #[test]
    fn u_two_two_matches_enumeration() {
        // C(4,2) = 6 arrangements: U = 0,1,2,2,3,4
        let pmf = exact_u_pmf(2, 2).unwrap();
        let expected = [1.0, 1.0, 2.0, 1.0, 1.0].map(|c| c / 6.0);
        for (got, want) in pmf.probabilities.iter().zip(expected) {
            assert!((got - want).abs() < 1e-15);
        }
    }

    #[test]
    fn u_critical_small_cases() {
        // (3,3): P(U = 0) = 1/20, doubled 0.1 > 0.05
        assert_eq!(u_critical(3, 3, 0.05).unwrap(), None);
        assert_eq!(u_critical(1, 1, 0.5).unwrap(), None);
        // (3,3) at alpha = 0.1: 2 * 1/20 = 0.1 <= 0.1
        assert_eq!(u_critical(3, 3, 0.1).unwrap(), Some(0));
    }

    #[test]
    fn u_cap_is_enforced() {
        assert!(matches!(
            exact_u_pmf(20, 21),
            Err(DistError::CapExceeded {
                size: 420,
                cap: 400
            })
        ));
        assert!(exact_u_pmf(20, 20).is_ok());
        assert!(exact_u_pmf_with_cap(25, 25, 625).is_ok());
    }

    #[test]
    fn t_small_cases() {
        let pmf = exact_t_pmf(2).unwrap();
        assert_eq!(pmf.probabilities, vec![0.25; 4]);
        // n = 5: min two-sided p = 2/32
        assert_eq!(t_critical(5, 0.05).unwrap(), None);
        assert_eq!(t_critical(5, 0.0625).unwrap(), Some(0));
        assert!(matches!(
            exact_t_pmf(61),
            Err(DistError::CapExceeded { .. })
        ));
    }

    #[test]
    fn t_critical_table_values() {
        // Two-sided 0.05 critical values from standard signed-rank tables.
        assert_eq!(t_critical(6, 0.05).unwrap(), Some(0));
        assert_eq!(t_critical(10, 0.05).unwrap(), Some(8));
        assert_eq!(t_critical(20, 0.05).unwrap(), Some(52));
    }

    #[test]
    fn u_critical_table_values() {
        // Two-sided 0.05 critical values from standard Mann–Whitney tables.
        assert_eq!(u_critical(10, 10, 0.05).unwrap(), Some(23));
        assert_eq!(u_critical(5, 8, 0.05).unwrap(), Some(6));
        assert_eq!(u_critical(20, 20, 0.05).unwrap(), Some(127));
    }

    #[test]
    fn pmfs_are_symmetric_and_normalized() {
        for (a, b) in [(3, 7), (6, 6), (10, 12), (1, 9)] {
            let pmf = exact_u_pmf(a, b).unwrap();
            let m = pmf.max_value();
            assert_eq!(m, a * b);
            assert!((pmf.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for u in 0..=m {
                assert!((pmf.pmf(u) - pmf.pmf(m - u)).abs() < 1e-15);
            }
        }
        for n in [1, 4, 17, 40, 60] {
            let pmf = exact_t_pmf(n).unwrap();
            let m = pmf.max_value();
            assert!((pmf.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for t in 0..=m {
                assert!((pmf.pmf(t) - pmf.pmf(m - t)).abs() < 1e-15);
            }
        }
    }
}
