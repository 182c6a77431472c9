//! The CA2 consistency statistic and the inter-rater decision procedure.
//!
//! For each project, `CA2 = |M₁ − M₂| / ((M₁ + M₂)/2)`; lower values mean
//! the two raters agreed more closely. Two methods are compared by running
//! the rater-influence check, the normality and correlation gates, and then
//! the equality test(s) of the branch those gates select:
//!
//! | normal | related | tests                                   |
//! |--------|---------|-----------------------------------------|
//! | yes    | no      | a (means: Z or pooled t), then b (F)    |
//! | yes    | yes     | c (related means Z), then d (chi-square)|
//! | no     | no      | e / f (Mann–Whitney)                    |
//! | no     | yes     | g / h (Wilcoxon signed-rank)            |

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{DatasetError, MeasurementDataset, PairedSeries};
use crate::hypothesis::{
    correlation, ks_normality_with, mann_whitney, means_indep, means_related_z,
    rater_influence_test, var_indep_f, var_related_chi2, wilcoxon_signed_rank, CorrelationKind,
    SampleSummary, TestDetail, TestError, TestId, TestOutcome,
};
use crate::report::AnalysisConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConsistencyError {
    #[error("measurements must be strictly positive, got {0} and {1}")]
    NonPositiveInput(f64, f64),
}

/// `|m1 − m2| / ((m1 + m2) / 2)`, in `[0, 2)` for positive inputs.
pub fn ca2(m1: f64, m2: f64) -> Result<f64, ConsistencyError> {
    if !(m1 > 0.0 && m2 > 0.0) || !m1.is_finite() || !m2.is_finite() {
        return Err(ConsistencyError::NonPositiveInput(m1, m2));
    }
    Ok((m1 - m2).abs() / ((m1 + m2) / 2.0))
}

/// CA2 values of one method, in project order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencySample {
    pub method_id: String,
    pub projects: Vec<String>,
    pub values: Vec<f64>,
    pub summary: SampleSummary,
    /// Outcome of the normality gate; `None` until it has run.
    pub normal: Option<bool>,
}

impl ConsistencySample {
    pub fn from_pair(pair: &PairedSeries) -> Self {
        let values: Vec<f64> = pair
            .first
            .iter()
            .zip(&pair.second)
            .map(|(&a, &b)| ca2(a, b).expect("dataset values are positive"))
            .collect();
        ConsistencySample {
            method_id: pair.method_id.clone(),
            projects: pair.projects.clone(),
            summary: SampleSummary::from_slice(&values),
            values,
            normal: None,
        }
    }
}

pub fn consistency_sample(
    ds: &MeasurementDataset,
    method: &str,
) -> Result<ConsistencySample, DatasetError> {
    Ok(ConsistencySample::from_pair(&ds.extract_pair(method)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl Branch {
    pub fn letter(self) -> char {
        match self {
            Branch::A => 'a',
            Branch::B => 'b',
            Branch::C => 'c',
            Branch::D => 'd',
            Branch::E => 'e',
            Branch::F => 'f',
            Branch::G => 'g',
            Branch::H => 'h',
        }
    }

    fn of(test: TestId) -> Option<Branch> {
        Some(match test {
            TestId::MeansIndepZ | TestId::MeansIndepT => Branch::A,
            TestId::VarIndepF => Branch::B,
            TestId::MeansRelatedZ => Branch::C,
            TestId::VarRelatedChi2 => Branch::D,
            TestId::MannWhitneySmall => Branch::E,
            TestId::MannWhitneyLarge => Branch::F,
            TestId::WilcoxonSmall => Branch::G,
            TestId::WilcoxonLarge => Branch::H,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum VerdictKind {
    MoreConsistent { method: String },
    NoDifference,
    Inconclusive { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityGate {
    pub method_id: String,
    pub normal: bool,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationGate {
    pub coefficient_kind: CorrelationKind,
    pub r: f64,
    pub p_value: f64,
    pub related: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    pub normality: Vec<NormalityGate>,
    pub correlation: Option<CorrelationGate>,
    pub samples_related: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyVerdict {
    pub method_a: String,
    pub method_b: String,
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub branch_taken: Option<Branch>,
    pub samples: Vec<ConsistencySample>,
    pub gates: Gates,
    /// Every gate and test that ran, in execution order.
    pub evidence: Vec<TestOutcome>,
    pub warnings: Vec<String>,
}

impl ConsistencyVerdict {
    pub fn more_consistent(&self) -> Option<&str> {
        match &self.kind {
            VerdictKind::MoreConsistent { method } => Some(method),
            _ => None,
        }
    }
}

struct Run {
    verdict: ConsistencyVerdict,
    alpha: f64,
}

impl Run {
    fn record(&mut self, outcome: TestOutcome) -> TestOutcome {
        for w in &outcome.warnings {
            self.verdict
                .warnings
                .push(format!("{}: {w}", outcome.test_id));
        }
        self.verdict.evidence.push(outcome.clone());
        outcome
    }

    fn finish(mut self, kind: VerdictKind) -> ConsistencyVerdict {
        self.verdict.kind = kind;
        self.verdict
    }

    fn inconclusive(self, reason: impl Into<String>) -> ConsistencyVerdict {
        self.finish(VerdictKind::Inconclusive {
            reason: reason.into(),
        })
    }

    fn conclude(mut self, outcome: &TestOutcome, pick: Option<&str>) -> ConsistencyVerdict {
        self.verdict.branch_taken = Branch::of(outcome.test_id);
        if !outcome.reject() {
            return self.finish(VerdictKind::NoDifference);
        }
        match pick {
            Some(m) => {
                let method = m.to_owned();
                self.finish(VerdictKind::MoreConsistent { method })
            }
            None => self.inconclusive(format!(
                "{} rejected equality but the samples do not differ in the deciding statistic",
                outcome.test_id
            )),
        }
    }
}

fn lower_of<'a>(
    a: &'a ConsistencySample,
    b: &'a ConsistencySample,
    key: impl Fn(&SampleSummary) -> f64,
) -> Option<&'a str> {
    let (ka, kb) = (key(&a.summary), key(&b.summary));
    if ka < kb {
        Some(&a.method_id)
    } else if kb < ka {
        Some(&b.method_id)
    } else {
        None
    }
}

/// Inter-rater comparison of methods `a` and `b`.
///
/// Dataset problems (unknown method, incomplete design, not exactly two
/// raters) are errors; every statistical degeneracy ends in a verdict.
pub fn compare_methods_interrater(
    ds: &MeasurementDataset,
    a: &str,
    b: &str,
    config: &AnalysisConfig,
) -> Result<ConsistencyVerdict, DatasetError> {
    let pair_a = ds.extract_pair(a)?;
    let pair_b = ds.extract_pair(b)?;
    Ok(compare_pairs(&pair_a, &pair_b, config))
}

/// Same as [`compare_methods_interrater`] on already extracted rater pairs.
pub fn compare_pairs(
    pair_a: &PairedSeries,
    pair_b: &PairedSeries,
    config: &AnalysisConfig,
) -> ConsistencyVerdict {
    let alpha = config.alpha;
    let mut run = Run {
        verdict: ConsistencyVerdict {
            method_a: pair_a.method_id.clone(),
            method_b: pair_b.method_id.clone(),
            kind: VerdictKind::NoDifference,
            branch_taken: None,
            samples: Vec::new(),
            gates: Gates::default(),
            evidence: Vec::new(),
            warnings: Vec::new(),
        },
        alpha,
    };

    let mut sa = ConsistencySample::from_pair(pair_a);
    let mut sb = ConsistencySample::from_pair(pair_b);
    run.verdict.samples = vec![sa.clone(), sb.clone()];

    // rater influence, per method
    let mut anomalous = Vec::new();
    for pair in [pair_a, pair_b] {
        match rater_influence_test(&pair.differences(), run.alpha) {
            Ok(o) => {
                let o = run.record(o);
                if o.reject() {
                    anomalous.push(format!(
                        "method `{}`: raters `{}` and `{}` differ systematically (p = {})",
                        pair.method_id,
                        pair.raters[0],
                        pair.raters[1],
                        fmt_p(o.p_value())
                    ));
                }
            }
            Err(e) => anomalous.push(format!(
                "method `{}`: rater influence test failed: {e}",
                pair.method_id
            )),
        }
    }
    if !anomalous.is_empty() {
        return run.inconclusive(format!(
            "rater influence must be resolved first; {}",
            anomalous.join("; ")
        ));
    }

    // normality gate on CA2
    let normality = config.normality();
    let mut gate_failure = None;
    for s in [&mut sa, &mut sb] {
        match ks_normality_with(&s.values, alpha, normality) {
            Ok(o) => {
                let o = run.record(o);
                s.normal = Some(!o.reject());
                run.verdict.gates.normality.push(NormalityGate {
                    method_id: s.method_id.clone(),
                    normal: !o.reject(),
                    p_value: o.p_value(),
                });
            }
            Err(e) => {
                gate_failure = Some(format!(
                    "normality gate for `{}` could not run: {e}",
                    s.method_id
                ));
                break;
            }
        }
    }
    run.verdict.samples = vec![sa.clone(), sb.clone()];
    if let Some(reason) = gate_failure {
        return run.inconclusive(reason);
    }
    let both_normal = sa.normal == Some(true) && sb.normal == Some(true);
    if sa.normal != sb.normal {
        run.verdict
            .warnings
            .push("mixed normality: using the nonparametric branch".to_owned());
    }

    // correlation gate
    let same_projects = sa.projects == sb.projects;
    let kind = config.correlation.unwrap_or(if both_normal {
        CorrelationKind::Pearson
    } else {
        CorrelationKind::Spearman
    });
    let (x, y): (Vec<f64>, Vec<f64>) = if same_projects {
        (sa.values.clone(), sb.values.clone())
    } else {
        run.verdict
            .warnings
            .push("project sets differ: correlation computed on shared projects".to_owned());
        sa.projects
            .iter()
            .zip(&sa.values)
            .filter_map(|(p, &v)| {
                sb.projects
                    .iter()
                    .position(|q| q == p)
                    .map(|j| (v, sb.values[j]))
            })
            .unzip()
    };
    let mut related = false;
    match correlation(&x, &y, kind, alpha) {
        Ok(o) => {
            let o = run.record(o);
            if let TestDetail::Correlation(c) = &o.detail {
                run.verdict.gates.correlation = Some(CorrelationGate {
                    coefficient_kind: c.coefficient_kind,
                    r: c.r,
                    p_value: c.p_value,
                    related: o.reject(),
                });
            }
            related = o.reject();
        }
        Err(e) => run.verdict.warnings.push(format!(
            "correlation undefined ({e}): treating samples as independent"
        )),
    }
    run.verdict.gates.samples_related = Some(related);
    if related && !same_projects {
        return run.inconclusive(
            "samples are related but the methods were not measured on the same projects",
        );
    }

    match (both_normal, related) {
        (true, false) => {
            let means = match means_indep(&sa.summary, &sb.summary, alpha) {
                Ok(o) => run.record(o),
                Err(e) => return run.inconclusive(format!("branch a failed: {e}")),
            };
            if means.reject() {
                let pick = lower_of(&sa, &sb, |s| s.mean);
                return run.conclude(&means, pick);
            }
            match var_indep_f(&sa.summary, &sb.summary, alpha) {
                Ok(o) => {
                    let o = run.record(o);
                    let pick = lower_of(&sa, &sb, |s| s.var_n);
                    run.conclude(&o, pick)
                }
                Err(e) => run.inconclusive(format!("branch b failed: {e}")),
            }
        }
        (true, true) => {
            let means = match means_related_z(&sa.values, &sb.values, alpha) {
                Ok(o) => run.record(o),
                Err(e) => return run.inconclusive(format!("branch c failed: {e}")),
            };
            if means.reject() {
                let pick = lower_of(&sa, &sb, |s| s.mean);
                return run.conclude(&means, pick);
            }
            match var_related_chi2(&sa.values, &sb.values, alpha) {
                Ok(o) => {
                    let o = run.record(o);
                    let pick = lower_of(&sa, &sb, |s| s.var_n);
                    run.conclude(&o, pick)
                }
                Err(e @ TestError::SingularCovariance(_)) => {
                    run.verdict.branch_taken = Some(Branch::D);
                    run.inconclusive(format!("branch d not computable: {e}"))
                }
                Err(e) => run.inconclusive(format!("branch d failed: {e}")),
            }
        }
        (false, false) => match mann_whitney(&sa.values, &sb.values, alpha) {
            Ok(o) => {
                let o = run.record(o);
                let pick = lower_of(&sa, &sb, |s| s.mean);
                run.conclude(&o, pick)
            }
            Err(e) => run.inconclusive(format!("Mann–Whitney failed: {e}")),
        },
        (false, true) => match wilcoxon_signed_rank(&sa.values, &sb.values, alpha) {
            Ok(o) => {
                let o = run.record(o);
                let pick = lower_of(&sa, &sb, |s| s.mean);
                run.conclude(&o, pick)
            }
            Err(e) => run.inconclusive(format!("Wilcoxon failed: {e}")),
        },
    }
}

pub(crate) fn fmt_p(p: f64) -> String {
    serde_json::to_string(&p).unwrap_or_else(|_| p.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::parse_csv;

    #[test]
    fn ca2_examples() {
        assert_eq!(ca2(100.0, 100.0).unwrap(), 0.0);
        assert!((ca2(100.0, 120.0).unwrap() - 2.0 / 11.0).abs() < 1e-15);
        assert!((ca2(7.0 * 3.0, 7.0 * 5.0).unwrap() - ca2(3.0, 5.0).unwrap()).abs() < 1e-15);
        assert!(ca2(0.0, 1.0).is_err());
        assert!(ca2(1.0, -1.0).is_err());
        assert!(ca2(f64::NAN, 1.0).is_err());
    }

    fn dataset(rows: &[(&str, &str, &str, f64)]) -> MeasurementDataset {
        let mut s = String::from("project,method,rater,value\n");
        for (p, m, r, v) in rows {
            s.push_str(&format!("{p},{m},{r},{v}\n"));
        }
        parse_csv(s.as_bytes()).unwrap()
    }

    #[test]
    fn sample_examples() {
        let ds = dataset(&[
            ("p1", "A", "r1", 100.0),
            ("p1", "A", "r2", 100.0),
            ("p2", "A", "r1", 50.0),
            ("p2", "A", "r2", 50.0),
            ("p1", "B", "r1", 100.0),
            ("p1", "B", "r2", 120.0),
            ("p2", "B", "r1", 50.0),
            ("p2", "B", "r2", 60.0),
            ("p3", "B", "r1", 10.0),
            ("p3", "B", "r2", 12.0),
        ]);
        let a = consistency_sample(&ds, "A").unwrap();
        assert_eq!(a.values, vec![0.0, 0.0]);
        assert_eq!(a.normal, None);
        let b = consistency_sample(&ds, "B").unwrap();
        for v in &b.values {
            assert!((v - 2.0 / 11.0).abs() < 1e-15);
        }
        assert_eq!(b.projects, vec!["p1", "p2", "p3"]);
    }

    #[test]
    fn branch_letters() {
        assert_eq!(Branch::of(TestId::MeansIndepT), Some(Branch::A));
        assert_eq!(Branch::of(TestId::WilcoxonLarge), Some(Branch::H));
        assert_eq!(Branch::of(TestId::Correlation), None);
        assert_eq!(serde_json::to_string(&Branch::D).unwrap(), "\"d\"");
    }
}
