//! Independent reference implementations used as test oracles. None of
//! these call into the library: closed forms for integer degrees of
//! freedom, power series and continued fractions, and brute-force
//! enumeration.
#![allow(dead_code)]

use std::f64::consts::PI;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Φ(x): Taylor series `½ + φ(x) Σ x^(2k+1)/(2k+1)!!` for |x| ≤ 6, Laplace's
/// continued fraction for the tail beyond.
pub fn normal_cdf(x: f64) -> f64 {
    if x.abs() <= 6.0 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term.abs() > 1e-30 * sum.abs().max(1e-300) {
            k += 1.0;
            term *= x * x / (2.0 * k + 1.0);
            sum += term;
            if k > 500.0 {
                break;
            }
        }
        0.5 + normal_pdf(x) * sum
    } else {
        let t = x.abs();
        let mut cf = t;
        for k in (1..=300).rev() {
            cf = t + k as f64 / cf;
        }
        let tail = normal_pdf(t) / cf;
        if x > 0.0 {
            1.0 - tail
        } else {
            tail
        }
    }
}

/// Bisection on [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    let (mut lo, mut hi) = (-40.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if normal_cdf(mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Student t CDF for integer ν from the finite trigonometric sums.
pub fn t_cdf(t: f64, nu: u32) -> f64 {
    let theta = (t.abs() / (nu as f64).sqrt()).atan();
    let (s, c) = (theta.sin(), theta.cos());
    let a = if nu % 2 == 1 {
        let mut sum = 0.0;
        if nu > 1 {
            let mut term = 1.0;
            sum = 1.0;
            let mut k = 1;
            while 2 * k < nu - 1 {
                term *= (2 * k) as f64 / (2 * k + 1) as f64 * c * c;
                sum += term;
                k += 1;
            }
            sum *= s * c;
        }
        2.0 / PI * (theta + sum)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 1;
        while 2 * k <= nu - 2 {
            term *= (2 * k - 1) as f64 / (2 * k) as f64 * c * c;
            sum += term;
            k += 1;
        }
        s * sum
    };
    if t >= 0.0 {
        0.5 + a / 2.0
    } else {
        0.5 - a / 2.0
    }
}

fn ln_choose(n: u32, k: u32) -> f64 {
    (1..=k).map(|i| ((n - k + i) as f64 / i as f64).ln()).sum()
}

/// Regularized incomplete beta for integer a, b ≥ 1 as a binomial tail.
pub fn beta_reg_int(a: u32, b: u32, y: f64) -> f64 {
    let n = a + b - 1;
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 1.0;
    }
    (a..=n)
        .map(|j| (ln_choose(n, j) + j as f64 * y.ln() + (n - j) as f64 * (1.0 - y).ln()).exp())
        .sum()
}

/// F CDF for even degrees of freedom.
pub fn f_cdf_even(x: f64, d1: u32, d2: u32) -> f64 {
    assert!(d1.is_multiple_of(2) && d2.is_multiple_of(2));
    let y = d1 as f64 * x / (d1 as f64 * x + d2 as f64);
    beta_reg_int(d1 / 2, d2 / 2, y)
}

/// Chi-square CDF: Poisson sum for even ν, normal tail plus a finite sum
/// for odd ν.
pub fn chi2_cdf(x: f64, nu: u32) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if nu.is_multiple_of(2) {
        let h = x / 2.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..nu / 2 {
            term *= h / k as f64;
            sum += term;
        }
        1.0 - (-h).exp() * sum
    } else {
        let r = x.sqrt();
        let mut q = 2.0 * (1.0 - normal_cdf(r));
        let mut term = r;
        let mut sum = 0.0;
        for k in 1..=(nu - 1) / 2 {
            if k > 1 {
                term *= x / (2 * k - 1) as f64;
            }
            sum += term;
        }
        q += 2.0 * normal_pdf(r) * sum;
        1.0 - q
    }
}

/// Null pmf of U_A by enumerating every placement of the A ranks.
pub fn brute_u_pmf(n_a: usize, n_b: usize) -> Vec<f64> {
    let n = n_a + n_b;
    let mut counts = vec![0u64; n_a * n_b + 1];
    let mut total = 0u64;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n_a {
            continue;
        }
        // U_A counts (a, b) pairs with b ranked below a
        let mut u = 0;
        let mut bs_below = 0;
        for pos in 0..n {
            if mask >> pos & 1 == 1 {
                u += bs_below;
            } else {
                bs_below += 1;
            }
        }
        counts[u] += 1;
        total += 1;
    }
    counts.iter().map(|&c| c as f64 / total as f64).collect()
}

/// Null pmf of T_p over all sign patterns of ranks 1..=n.
pub fn brute_t_pmf(n: usize) -> Vec<f64> {
    let max = n * (n + 1) / 2;
    let mut counts = vec![0u64; max + 1];
    for mask in 0u32..(1 << n) {
        let t: usize = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).sum();
        counts[t] += 1;
    }
    let total = (1u64 << n) as f64;
    counts.iter().map(|&c| c as f64 / total).collect()
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased variance.
pub fn var(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Textbook pooled two-sample t with unbiased variances.
pub fn pooled_t(a: &[f64], b: &[f64]) -> f64 {
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let sp2 = ((n1 - 1.0) * var(a) + (n2 - 1.0) * var(b)) / (n1 + n2 - 2.0);
    (mean(a) - mean(b)) / (sp2 * (1.0 / n1 + 1.0 / n2)).sqrt()
}

/// Pitman–Morgan test of equal variances for paired data: correlate
/// `x + y` with `x − y`; returns the two-sided p-value on n − 2 df.
pub fn pitman_morgan_p(x: &[f64], y: &[f64]) -> f64 {
    let u: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
    let v: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    let r = pearson(&u, &v);
    let n = x.len() as u32;
    let t = r * ((n - 2) as f64).sqrt() / (1.0 - r * r).sqrt();
    2.0 * (1.0 - t_cdf(t.abs(), n - 2))
}
