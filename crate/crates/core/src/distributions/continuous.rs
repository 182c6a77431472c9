//! Standard normal, Student t, Snedecor F and chi-square.
//!
//! Each family exposes a CDF, a survival function (upper tail, computed
//! without `1 - cdf` cancellation) and a quantile. Quantiles other than the
//! normal one are obtained by safeguarded Newton iteration on the CDF.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{beta_reg_pair, erfc, gamma_p, gamma_q, ln_beta, ln_gamma};
use super::DistError;

fn check_probability(p: f64) -> Result<(), DistError> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(DistError::Probability(p))
    }
}

fn check_df(df: f64) -> Result<(), DistError> {
    if df > 0.0 && df.is_finite() {
        Ok(())
    } else {
        Err(DistError::DegreesOfFreedom(df))
    }
}

fn check_nonnegative(x: f64) -> Result<(), DistError> {
    if x >= 0.0 {
        Ok(())
    } else {
        Err(DistError::Argument(x))
    }
}

// ---------------------------------------------------------------------------
// Normal
// ---------------------------------------------------------------------------

pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

pub fn std_normal_sf(x: f64) -> f64 {
    std_normal_cdf(-x)
}

/// Inverse of the standard normal CDF (Wichura, AS 241, PPND16).
#[allow(clippy::inconsistent_digit_grouping, clippy::excessive_precision)]
pub fn std_normal_quantile(p: f64) -> Result<f64, DistError> {
    check_probability(p)?;
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = (((((((2509.080_928_730_122_7 * r + 33_430.575_583_588_13) * r
            + 67265.770_927_008_7)
            * r
            + 45921.953_931_549_87)
            * r
            + 13_731.693_765_509_46)
            * r
            + 1971.590_950_306_551_3)
            * r
            + 133.141_667_891_784_38)
            * r
            + 3.387_132_872_796_366_5)
            * q;
        let den = ((((((5226.495_278_852_545 * r + 28729.085_735_721_943) * r
            + 39307.895_800_092_71)
            * r
            + 21213.794_301_586_597)
            * r
            + 5394.196_021_424_751)
            * r
            + 687.187_007_492_057_9)
            * r
            + 42.313_330_701_600_91)
            * r
            + 1.0;
        return Ok(num / den);
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        let r = r - 1.6;
        let num = ((((((7.745_450_142_783_414e-4 * r + 0.022_723_844_989_269_184) * r
            + 0.241_780_725_177_450_6)
            * r
            + 1.270_458_252_452_368_4)
            * r
            + 3.647_848_324_763_204_5)
            * r
            + 5.769_497_221_460_691)
            * r
            + 4.630_337_846_156_546)
            * r
            + 1.423_437_110_749_683_5;
        let den = ((((((1.050_750_071_644_416_9e-9 * r + 5.475_938_084_995_345e-4) * r
            + 0.015_198_666_563_616_457)
            * r
            + 0.148_103_976_427_480_08)
            * r
            + 0.689_767_334_985_100_1)
            * r
            + 1.676_384_830_183_803_8)
            * r
            + 2.053_191_626_637_759)
            * r
            + 1.0;
        num / den
    } else {
        let r = r - 5.0;
        let num = ((((((2.010_334_399_292_288_1e-7 * r + 2.711_555_568_743_487_6e-5) * r
            + 0.001_242_660_947_388_078_4)
            * r
            + 0.026_532_189_526_576_124)
            * r
            + 0.296_560_571_828_504_9)
            * r
            + 1.784_826_539_917_291_3)
            * r
            + 5.463_784_911_164_114)
            * r
            + 6.657_904_643_501_103;
        let den = ((((((2.044_263_103_389_939_7e-15 * r + 1.421_511_758_316_446e-7) * r
            + 1.846_318_317_510_054_8e-5)
            * r
            + 7.868_691_311_456_133e-4)
            * r
            + 0.014_875_361_290_850_615)
            * r
            + 0.136_929_880_922_735_8)
            * r
            + 0.599_832_206_555_888)
            * r
            + 1.0;
        num / den
    };
    Ok(if q < 0.0 { -val } else { val })
}

/// Upper critical value z with P(Z > z) = tail. Returns +inf for tail = 0.
pub fn std_normal_upper(tail: f64) -> f64 {
    if tail <= 0.0 {
        f64::INFINITY
    } else if tail >= 1.0 {
        f64::NEG_INFINITY
    } else {
        -std_normal_quantile(tail).expect("tail in (0,1)")
    }
}

// ---------------------------------------------------------------------------
// Student t
// ---------------------------------------------------------------------------

pub fn student_t_pdf(x: f64, df: f64) -> f64 {
    let ln_norm = ln_gamma((df + 1.0) / 2.0) - ln_gamma(df / 2.0) - 0.5 * (df * PI).ln();
    (ln_norm - (df + 1.0) / 2.0 * (x * x / df).ln_1p()).exp()
}

/// P(T > x) for x >= 0, computed directly in whichever form avoids cancellation.
fn student_t_upper_nonneg(x: f64, df: f64) -> f64 {
    let x2 = x * x;
    let denom = df + x2;
    if x2 < df {
        // central mass: P(|T| < x) = I_{x²/(ν+x²)}(1/2, ν/2)
        let central = beta_reg_pair(0.5, df / 2.0, x2 / denom, df / denom);
        0.5 * (1.0 - central)
    } else {
        0.5 * beta_reg_pair(df / 2.0, 0.5, df / denom, x2 / denom)
    }
}

pub fn student_t_cdf(x: f64, df: f64) -> Result<f64, DistError> {
    check_df(df)?;
    if x.is_nan() {
        return Err(DistError::Argument(x));
    }
    if x.is_infinite() {
        return Ok(if x > 0.0 { 1.0 } else { 0.0 });
    }
    Ok(if x >= 0.0 {
        1.0 - student_t_upper_nonneg(x, df)
    } else {
        student_t_upper_nonneg(-x, df)
    })
}

pub fn student_t_sf(x: f64, df: f64) -> Result<f64, DistError> {
    student_t_cdf(-x, df)
}

pub fn student_t_quantile(p: f64, df: f64) -> Result<f64, DistError> {
    check_probability(p)?;
    check_df(df)?;
    if p == 0.5 {
        return Ok(0.0);
    }
    // solve in the lower tail and mirror
    let target = p.min(1.0 - p);
    let guess = std_normal_quantile(target)?;
    let lower = invert(
        |x| student_t_cdf(x, df).unwrap_or(f64::NAN),
        |x| student_t_pdf(x, df),
        target,
        guess.min(-1e-3),
        f64::NEG_INFINITY,
        0.0,
    );
    Ok(if p < 0.5 { lower } else { -lower })
}

/// Upper critical value t with P(T > t) = tail.
pub fn student_t_upper(tail: f64, df: f64) -> Result<f64, DistError> {
    check_df(df)?;
    if tail <= 0.0 {
        return Ok(f64::INFINITY);
    }
    if tail >= 1.0 {
        return Ok(f64::NEG_INFINITY);
    }
    student_t_quantile(1.0 - tail, df)
}

// ---------------------------------------------------------------------------
// Snedecor F
// ---------------------------------------------------------------------------

pub fn f_pdf(x: f64, d1: f64, d2: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 && d1 == 2.0 { 1.0 } else { 0.0 };
    }
    let ln = 0.5 * d1 * (d1 / d2).ln() + (0.5 * d1 - 1.0) * x.ln()
        - 0.5 * (d1 + d2) * (d1 * x / d2).ln_1p()
        - ln_beta(d1 / 2.0, d2 / 2.0);
    ln.exp()
}

pub fn f_cdf(x: f64, d1: f64, d2: f64) -> Result<f64, DistError> {
    check_df(d1)?;
    check_df(d2)?;
    check_nonnegative(x)?;
    if x.is_infinite() {
        return Ok(1.0);
    }
    let num = d1 * x;
    let den = num + d2;
    Ok(beta_reg_pair(d1 / 2.0, d2 / 2.0, num / den, d2 / den))
}

pub fn f_sf(x: f64, d1: f64, d2: f64) -> Result<f64, DistError> {
    check_df(d1)?;
    check_df(d2)?;
    check_nonnegative(x)?;
    if x.is_infinite() {
        return Ok(0.0);
    }
    let num = d1 * x;
    let den = num + d2;
    Ok(beta_reg_pair(d2 / 2.0, d1 / 2.0, d2 / den, num / den))
}

pub fn f_quantile(p: f64, d1: f64, d2: f64) -> Result<f64, DistError> {
    check_probability(p)?;
    check_df(d1)?;
    check_df(d2)?;
    Ok(invert(
        |x| f_cdf(x, d1, d2).unwrap_or(f64::NAN),
        |x| f_pdf(x, d1, d2),
        p,
        1.0,
        0.0,
        f64::INFINITY,
    ))
}

// ---------------------------------------------------------------------------
// Chi-square
// ---------------------------------------------------------------------------

pub fn chi_square_pdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 && df == 2.0 { 0.5 } else { 0.0 };
    }
    let k = df / 2.0;
    ((k - 1.0) * x.ln() - x / 2.0 - k * 2f64.ln() - ln_gamma(k)).exp()
}

pub fn chi_square_cdf(x: f64, df: f64) -> Result<f64, DistError> {
    check_df(df)?;
    check_nonnegative(x)?;
    Ok(gamma_p(df / 2.0, x / 2.0))
}

pub fn chi_square_sf(x: f64, df: f64) -> Result<f64, DistError> {
    check_df(df)?;
    check_nonnegative(x)?;
    Ok(gamma_q(df / 2.0, x / 2.0))
}

pub fn chi_square_quantile(p: f64, df: f64) -> Result<f64, DistError> {
    check_probability(p)?;
    check_df(df)?;
    // Wilson–Hilferty starting point
    let z = std_normal_quantile(p)?;
    let h = 2.0 / (9.0 * df);
    let guess = (df * (1.0 - h + z * h.sqrt()).powi(3)).max(1e-3);
    Ok(invert(
        |x| chi_square_cdf(x, df).unwrap_or(f64::NAN),
        |x| chi_square_pdf(x, df),
        p,
        guess,
        0.0,
        f64::INFINITY,
    ))
}

// ---------------------------------------------------------------------------
// Root finding
// ---------------------------------------------------------------------------

/// Solve `cdf(x) = p` for a nondecreasing `cdf` on `(lo, hi)`.
///
/// Newton steps from `guess`, falling back to bisection whenever a step
/// leaves the current bracket. Infinite bracket ends are first replaced by
/// finite ones by doubling outward from the guess.
fn invert(
    cdf: impl Fn(f64) -> f64,
    pdf: impl Fn(f64) -> f64,
    p: f64,
    guess: f64,
    lo: f64,
    hi: f64,
) -> f64 {
    let mut lo = lo;
    let mut hi = hi;
    let mut x = guess;
    if !hi.is_finite() {
        let mut step = guess.abs().max(1.0);
        hi = guess;
        while cdf(hi) < p {
            lo = hi;
            hi += step;
            step *= 2.0;
            if !hi.is_finite() {
                return f64::INFINITY;
            }
        }
    }
    if !lo.is_finite() {
        let mut step = guess.abs().max(1.0);
        lo = guess;
        while cdf(lo) > p {
            hi = lo;
            lo -= step;
            step *= 2.0;
            if !lo.is_finite() {
                return f64::NEG_INFINITY;
            }
        }
    }
    if x <= lo || x >= hi {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..500 {
        let f = cdf(x) - p;
        if f == 0.0 {
            return x;
        }
        if f < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut next = if d > 0.0 && d.is_finite() {
            x - f / d
        } else {
            f64::NAN
        };
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1e-300) || hi - lo <= 1e-15 * hi.abs() {
            return next;
        }
        x = next;
    }
    x
}
