//! Inter-method comparison: are two methods measuring the same thing?
//!
//! Per project, `dab = ((M1A − M1B) + (M2A − M2B)) / 2` averages the
//! method difference over both raters. H0 is `E[dab] = 0`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, MeasurementDataset};
use crate::hypothesis::{
    is_constant, ks_normality_with, one_sample_t, wilcoxon_signed_rank, NormalityMethod,
    SampleSummary, TestError, TestId, TestOutcome,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterMethodSeries {
    pub method_a: String,
    pub method_b: String,
    pub projects: Vec<String>,
    /// `M1A − M1B`, the first raters' difference.
    pub d1ab: Vec<f64>,
    /// `M2A − M2B`.
    pub d2ab: Vec<f64>,
    pub dab: Vec<f64>,
    pub summary: SampleSummary,
}

/// Builds the dab series. Both methods must cover the same projects; rater
/// slots pair by position within each method (first-seen rater of A with
/// first-seen rater of B).
pub fn dab_series(
    ds: &MeasurementDataset,
    a: &str,
    b: &str,
) -> Result<InterMethodSeries, DatasetError> {
    let pa = ds.extract_pair(a)?;
    let pb = ds.extract_pair(b)?;
    let order = align(&pa.projects, &pb.projects, a, b)?;
    let projects = pa.projects.clone();
    let d1: Vec<f64> = order
        .iter()
        .enumerate()
        .map(|(i, &j)| pa.first[i] - pb.first[j])
        .collect();
    let d2: Vec<f64> = order
        .iter()
        .enumerate()
        .map(|(i, &j)| pa.second[i] - pb.second[j])
        .collect();
    let dab: Vec<f64> = d1.iter().zip(&d2).map(|(x, y)| (x + y) / 2.0).collect();
    Ok(InterMethodSeries {
        method_a: a.to_owned(),
        method_b: b.to_owned(),
        projects,
        summary: SampleSummary::from_slice(&dab),
        d1ab: d1,
        d2ab: d2,
        dab,
    })
}

/// For each project of `pa`, its index in `pb`; the sets must match.
fn align(pa: &[String], pb: &[String], a: &str, b: &str) -> Result<Vec<usize>, DatasetError> {
    let mismatch = || DatasetError::ProjectSetMismatch {
        a: a.to_owned(),
        b: b.to_owned(),
    };
    if pa.len() != pb.len() {
        return Err(mismatch());
    }
    pa.iter()
        .map(|p| pb.iter().position(|q| q == p).ok_or_else(mismatch))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterMethodOutcome {
    /// The KS gate on dab; absent when it could not or need not run.
    pub normality: Option<TestOutcome>,
    /// Paired t (`InterMethodT`) or, for non-normal dab, Wilcoxon against 0.
    pub equality: TestOutcome,
    pub warnings: Vec<String>,
}

impl InterMethodOutcome {
    pub fn methods_differ(&self) -> bool {
        self.equality.reject()
    }
}

/// `t = d̄ / (s_n / √(n−1))` on `n − 1` degrees of freedom when dab passes
/// the normality gate; otherwise a signed-rank test of dab against zero.
pub fn intermethod_equality_test(
    series: &InterMethodSeries,
    alpha: f64,
    normality: NormalityMethod,
) -> Result<InterMethodOutcome, TestError> {
    dab_equality_test(&series.dab, alpha, normality)
}

/// [`intermethod_equality_test`] on a bare dab sample.
pub fn dab_equality_test(
    dab: &[f64],
    alpha: f64,
    normality: NormalityMethod,
) -> Result<InterMethodOutcome, TestError> {
    let mut warnings = Vec::new();
    if dab.len() >= 2 && is_constant(dab) {
        warnings.push("dab is constant: normality gate skipped".to_owned());
        let equality = one_sample_t(dab, alpha, TestId::InterMethodT)?;
        return Ok(InterMethodOutcome {
            normality: None,
            equality,
            warnings,
        });
    }
    let gate = if dab.len() >= 3 {
        Some(ks_normality_with(dab, alpha, normality)?)
    } else {
        warnings.push(format!("only {} projects: normality assumed", dab.len()));
        None
    };
    let normal = gate.as_ref().is_none_or(|g| !g.reject());
    let equality = if normal {
        one_sample_t(dab, alpha, TestId::InterMethodT)?
    } else {
        warnings
            .push("dab is not normal: signed-rank test against zero used instead of t".to_owned());
        wilcoxon_signed_rank(dab, &vec![0.0; dab.len()], alpha)?
    };
    Ok(InterMethodOutcome {
        normality: gate,
        equality,
        warnings,
    })
}

/// Least-squares line predicting B from A over rater-averaged values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationFit {
    pub predictor: String,
    pub response: String,
    pub slope: f64,
    pub intercept: f64,
    pub r: f64,
    pub r_squared: f64,
    pub residual_sd: f64,
    pub n: usize,
}

impl CalibrationFit {
    pub fn predict(&self, a: f64) -> f64 {
        self.slope * a + self.intercept
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CalibrationError {
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error("correlation |r| = {r} is below the threshold {threshold}")]
    WeakCorrelation { r: f64, threshold: f64 },
    #[error("calibration needs at least 3 projects, got {0}")]
    TooFewProjects(usize),
    #[error("values of `{0}` do not vary")]
    ZeroVariance(String),
}

/// Fits `B ≈ slope·A + intercept` when `|r| ≥ strong_r`.
pub fn fit_calibration_regression(
    ds: &MeasurementDataset,
    a: &str,
    b: &str,
    strong_r: f64,
) -> Result<CalibrationFit, CalibrationError> {
    let pa = ds.extract_pair(a)?;
    let pb = ds.extract_pair(b)?;
    let order = align(&pa.projects, &pb.projects, a, b)?;
    let xs: Vec<f64> = pa
        .first
        .iter()
        .zip(&pa.second)
        .map(|(x, y)| (x + y) / 2.0)
        .collect();
    let ys: Vec<f64> = order
        .iter()
        .map(|&j| (pb.first[j] + pb.second[j]) / 2.0)
        .collect();
    let n = xs.len();
    if n < 3 {
        return Err(CalibrationError::TooFewProjects(n));
    }
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 {
        return Err(CalibrationError::ZeroVariance(a.to_owned()));
    }
    if syy == 0.0 {
        return Err(CalibrationError::ZeroVariance(b.to_owned()));
    }
    let r = (sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0);
    if r.abs() < strong_r {
        return Err(CalibrationError::WeakCorrelation {
            r,
            threshold: strong_r,
        });
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum();
    Ok(CalibrationFit {
        predictor: a.to_owned(),
        response: b.to_owned(),
        slope,
        intercept,
        r,
        r_squared: r * r,
        residual_sd: (sse / (n - 2) as f64).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv;

    fn two_methods(rows: &[(f64, f64, f64, f64)]) -> MeasurementDataset {
        let mut s = String::from("project,method,rater,value\n");
        for (i, (a1, a2, b1, b2)) in rows.iter().enumerate() {
            s.push_str(&format!(
                "p{i},A,r1,{a1}\np{i},A,r2,{a2}\np{i},B,r1,{b1}\np{i},B,r2,{b2}\n"
            ));
        }
        parse_csv(s.as_bytes()).unwrap()
    }

    #[test]
    fn dab_is_rater_average_of_differences() {
        let ds = two_methods(&[(10.0, 12.0, 7.0, 8.0), (20.0, 20.0, 21.0, 23.0)]);
        let s = dab_series(&ds, "A", "B").unwrap();
        assert_eq!(s.d1ab, vec![3.0, -1.0]);
        assert_eq!(s.d2ab, vec![4.0, -3.0]);
        assert_eq!(s.dab, vec![3.5, -2.0]);
        let r = dab_series(&ds, "B", "A").unwrap();
        assert_eq!(r.dab, vec![-3.5, 2.0]);
    }

    #[test]
    fn constant_dab() {
        let zero = two_methods(&[
            (10.0, 10.0, 10.0, 10.0),
            (20.0, 21.0, 20.0, 21.0),
            (5.0, 6.0, 5.0, 6.0),
        ]);
        let o = intermethod_equality_test(
            &dab_series(&zero, "A", "B").unwrap(),
            0.05,
            NormalityMethod::Kolmogorov,
        )
        .unwrap();
        assert!(!o.methods_differ());
        assert_eq!(o.equality.p_value(), 1.0);
        let shifted = two_methods(&[
            (15.0, 15.0, 10.0, 10.0),
            (25.0, 26.0, 20.0, 21.0),
            (10.0, 11.0, 5.0, 6.0),
        ]);
        let o = intermethod_equality_test(
            &dab_series(&shifted, "A", "B").unwrap(),
            0.05,
            NormalityMethod::Kolmogorov,
        )
        .unwrap();
        assert!(o.methods_differ());
        assert_eq!(o.equality.p_value(), 0.0);
    }

    #[test]
    fn calibration_recovers_exact_line() {
        let rows: Vec<_> = (1..=8)
            .map(|k| {
                let a = 10.0 * k as f64;
                (a, a, 2.0 * a + 5.0, 2.0 * a + 5.0)
            })
            .collect();
        let ds = two_methods(&rows);
        let fit = fit_calibration_regression(&ds, "A", "B", 0.8).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!((fit.intercept - 5.0).abs() < 1e-9);
        assert!((fit.r - 1.0).abs() < 1e-12);
        assert!(fit.residual_sd < 1e-9);
        assert!((fit.predict(100.0) - 205.0).abs() < 1e-9);
    }

    #[test]
    fn calibration_skips_weak_relation() {
        let ds = two_methods(&[
            (10.0, 10.0, 50.0, 50.0),
            (20.0, 20.0, 10.0, 10.0),
            (30.0, 30.0, 40.0, 40.0),
            (40.0, 40.0, 20.0, 20.0),
        ]);
        assert!(matches!(
            fit_calibration_regression(&ds, "A", "B", 0.8),
            Err(CalibrationError::WeakCorrelation { .. })
        ));
    }
}
