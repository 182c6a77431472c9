//! Whole-dataset analysis: every method's rater-influence check, the
//! inter-rater verdict and inter-method outcome for every method pair, and
//! a plain-text rendering of the result.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{compare_pairs, fmt_p, ConsistencyVerdict, VerdictKind};
use crate::dataset::{DatasetError, MeasurementDataset, PairedSeries};
use crate::hypothesis::{
    rater_influence_test, CorrelationKind, NormalityMethod, TestDetail, TestOutcome,
};
use crate::intermethod::{
    dab_series, fit_calibration_regression, intermethod_equality_test, CalibrationFit,
    InterMethodOutcome,
};

/// Bumped whenever the JSON layout of [`AnalysisReport`] changes.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub alpha: f64,
    /// Forces the coefficient of the correlation gate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<CorrelationKind>,
    pub strong_r: f64,
    /// Lilliefors p-values for the normality gates instead of Kolmogorov's.
    pub lilliefors: bool,
    pub format: OutputFormat,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            alpha: 0.05,
            correlation: None,
            strong_r: 0.8,
            lilliefors: false,
            format: OutputFormat::Text,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("alpha must lie in (0, 1), got {0}")]
    Alpha(f64),
    #[error("strong_r must lie in (0, 1], got {0}")]
    StrongR(f64),
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError::Alpha(self.alpha));
        }
        if !(self.strong_r > 0.0 && self.strong_r <= 1.0) {
            return Err(ConfigError::StrongR(self.strong_r));
        }
        Ok(())
    }

    pub fn normality(&self) -> NormalityMethod {
        if self.lilliefors {
            NormalityMethod::Lilliefors
        } else {
            NormalityMethod::Kolmogorov
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodDigest {
    pub method_id: String,
    pub raters: Vec<String>,
    pub projects: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetDigest {
    pub records: usize,
    pub projects: usize,
    pub methods: Vec<MethodDigest>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RaterInfluenceEntry {
    pub method_id: String,
    pub raters: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<TestOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterMethodEntry {
    pub method_a: String,
    pub method_b: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<InterMethodOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationFit>,
    /// Why the equality test or the calibration did not produce a result.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub alpha: f64,
    pub dataset: DatasetDigest,
    pub rater_influence: Vec<RaterInfluenceEntry>,
    pub interrater: Vec<ConsistencyVerdict>,
    pub intermethod: Vec<InterMethodEntry>,
    #[serde(default)]
    pub warnings: Vec<String>,
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// A method was found less consistent, or some rater pair disagrees
    /// systematically.
    pub fn has_findings(&self) -> bool {
        self.interrater
            .iter()
            .any(|v| matches!(v.kind, VerdictKind::MoreConsistent { .. }))
            || self
                .rater_influence
                .iter()
                .any(|e| e.outcome.as_ref().is_some_and(|o| o.reject()))
    }
}

/// Runs the inter-rater and inter-method procedures for every method pair
/// (in first-seen method order). Fails only on design errors in the data.
pub fn analyze(
    ds: &MeasurementDataset,
    config: &AnalysisConfig,
) -> Result<AnalysisReport, DatasetError> {
    let pairs: Vec<PairedSeries> = ds
        .methods()
        .iter()
        .map(|m| ds.extract_pair(m))
        .collect::<Result<_, _>>()?;
    let mut warnings = Vec::new();

    let digest = DatasetDigest {
        records: ds.records().len(),
        projects: ds.projects().len(),
        methods: pairs
            .iter()
            .map(|p| MethodDigest {
                method_id: p.method_id.clone(),
                raters: p.raters.to_vec(),
                projects: p.len(),
            })
            .collect(),
    };

    let rater_influence = pairs
        .iter()
        .map(|p| {
            let (outcome, error) = match rater_influence_test(&p.differences(), config.alpha) {
                Ok(o) => (Some(o), None),
                Err(e) => (None, Some(e.to_string())),
            };
            RaterInfluenceEntry {
                method_id: p.method_id.clone(),
                raters: p.raters.to_vec(),
                outcome,
                error,
            }
        })
        .collect();

    let mut interrater = Vec::new();
    let mut intermethod = Vec::new();
    for i in 0..pairs.len() {
        for j in i + 1..pairs.len() {
            interrater.push(compare_pairs(&pairs[i], &pairs[j], config));
            intermethod.push(intermethod_entry(
                ds,
                &pairs[i].method_id,
                &pairs[j].method_id,
                config,
            ));
        }
    }
    if pairs.len() < 2 {
        warnings.push("fewer than two methods: no method pairs to compare".to_owned());
    }

    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        alpha: config.alpha,
        dataset: digest,
        rater_influence,
        interrater,
        intermethod,
        warnings,
    })
}

fn intermethod_entry(
    ds: &MeasurementDataset,
    a: &str,
    b: &str,
    config: &AnalysisConfig,
) -> InterMethodEntry {
    let mut entry = InterMethodEntry {
        method_a: a.to_owned(),
        method_b: b.to_owned(),
        outcome: None,
        calibration: None,
        notes: Vec::new(),
    };
    let series = match dab_series(ds, a, b) {
        Ok(s) => s,
        Err(e) => {
            entry.notes.push(e.to_string());
            return entry;
        }
    };
    match intermethod_equality_test(&series, config.alpha, config.normality()) {
        Ok(o) => {
            if o.methods_differ() {
                match fit_calibration_regression(ds, a, b, config.strong_r) {
                    Ok(fit) => entry.calibration = Some(fit),
                    Err(e) => entry.notes.push(format!("no calibration: {e}")),
                }
            }
            entry.outcome = Some(o);
        }
        Err(e) => entry
            .notes
            .push(format!("equality test not computable: {e}")),
    }
    entry
}

/// Six significant digits, trailing zeros trimmed.
fn num(x: f64) -> String {
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..=9).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_owned()
    } else {
        s
    }
}

fn describe(test: &TestOutcome) -> String {
    let d = &test.decision;
    let mut s = format!("{}: statistic = {}", test.test_id, num(test.statistic));
    match &test.detail {
        TestDetail::Rank(r) => {
            let _ = write!(
                s,
                " (U_A = {}, U_B = {}, sizes {}/{})",
                num(r.u_a),
                num(r.u_b),
                r.n_a,
                r.n_b
            );
        }
        TestDetail::SignedRank(w) => {
            let _ = write!(
                s,
                " (T+ = {}, T- = {}, n = {})",
                num(w.t_positive),
                num(w.t_negative),
                w.n_effective
            );
        }
        TestDetail::Correlation(c) => {
            let _ = write!(s, " ({:?} r = {})", c.coefficient_kind, num(c.r));
        }
        TestDetail::Normality { d, .. } => {
            let _ = write!(s, " (D = {})", num(*d));
        }
        _ => {}
    }
    if !test.df_or_sizes.is_empty() {
        let dfs: Vec<String> = test.df_or_sizes.iter().map(|v| v.to_string()).collect();
        let _ = write!(s, ", df/sizes = {}", dfs.join("/"));
    }
    match d.critical_lower {
        Some(lo) => {
            let _ = write!(
                s,
                ", acceptance region = ({}, {})",
                num(lo),
                num(d.critical_value)
            );
        }
        None => {
            let _ = write!(s, ", critical = {}", num(d.critical_value));
        }
    }
    let _ = write!(
        s,
        ", p = {} -> {}",
        fmt_p(d.p_value),
        if d.reject { "reject H0" } else { "accept H0" }
    );
    s
}

fn branch_name(letter: char) -> &'static str {
    match letter {
        'a' => "independent means",
        'b' => "independent variances (F)",
        'c' => "related means (Z)",
        'd' => "related variances (chi-square)",
        'e' => "Mann-Whitney, exact table",
        'f' => "Mann-Whitney, normal approximation",
        'g' => "Wilcoxon signed-rank, exact table",
        'h' => "Wilcoxon signed-rank, normal approximation",
        _ => "",
    }
}

/// Human-readable report. Every p-value appears exactly as in the JSON.
pub fn render_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    let ds = &report.dataset;
    let _ = writeln!(
        out,
        "Consistency analysis (report schema {})",
        report.schema_version
    );
    let _ = writeln!(
        out,
        "Dataset: {} measurements, {} projects, {} method{}; alpha = {}",
        ds.records,
        ds.projects,
        ds.methods.len(),
        if ds.methods.len() == 1 { "" } else { "s" },
        report.alpha
    );
    for m in &ds.methods {
        let _ = writeln!(
            out,
            "  method {}: raters {}, {} projects",
            m.method_id,
            m.raters.join(" and "),
            m.projects
        );
    }

    let _ = writeln!(out, "\nInter-rater reliability");
    let _ = writeln!(
        out,
        "  Rater influence (mean difference between the two raters)"
    );
    for e in &report.rater_influence {
        match (&e.outcome, &e.error) {
            (Some(o), _) => {
                let finding = if o.reject() {
                    "raters differ systematically"
                } else {
                    "no rater influence detected"
                };
                let _ = writeln!(
                    out,
                    "    {} ({}): {}; {}",
                    e.method_id,
                    e.raters.join(" vs "),
                    describe(o),
                    finding
                );
            }
            (None, Some(err)) => {
                let _ = writeln!(out, "    {}: not computable: {err}", e.method_id);
            }
            (None, None) => {}
        }
    }
    for v in &report.interrater {
        let _ = writeln!(out, "  {} vs {}", v.method_a, v.method_b);
        for g in &v.gates.normality {
            let _ = writeln!(
                out,
                "    CA2 of {}: {} (p = {})",
                g.method_id,
                if g.normal { "normal" } else { "not normal" },
                fmt_p(g.p_value)
            );
        }
        if let Some(c) = &v.gates.correlation {
            let _ = writeln!(
                out,
                "    {:?} correlation r = {} (p = {}): samples {}",
                c.coefficient_kind,
                num(c.r),
                fmt_p(c.p_value),
                if c.related { "related" } else { "independent" }
            );
        }
        let _ = writeln!(out, "    evidence:");
        for t in &v.evidence {
            let _ = writeln!(out, "      {}", describe(t));
        }
        if let Some(b) = v.branch_taken {
            let _ = writeln!(
                out,
                "    branch {} ({})",
                b.letter(),
                branch_name(b.letter())
            );
        }
        let verdict = match &v.kind {
            VerdictKind::MoreConsistent { method } => format!("{method} is more consistent"),
            VerdictKind::NoDifference => "no difference in consistency detected".to_owned(),
            VerdictKind::Inconclusive { reason } => format!("inconclusive: {reason}"),
        };
        let _ = writeln!(out, "    verdict: {verdict}");
        for w in &v.warnings {
            let _ = writeln!(out, "    warning: {w}");
        }
    }

    if !report.intermethod.is_empty() {
        let _ = writeln!(out, "\nInter-method reliability");
    }
    for e in &report.intermethod {
        let _ = writeln!(
            out,
            "  {} vs {} (dab = mean over raters of {} - {})",
            e.method_a, e.method_b, e.method_a, e.method_b
        );
        if let Some(o) = &e.outcome {
            if let Some(g) = &o.normality {
                let _ = writeln!(out, "    {}", describe(g));
            }
            let _ = writeln!(out, "    {}", describe(&o.equality));
            let _ = writeln!(
                out,
                "    {}",
                if o.methods_differ() {
                    "the methods differ systematically"
                } else {
                    "no systematic difference between the methods"
                }
            );
            for w in &o.warnings {
                let _ = writeln!(out, "    warning: {w}");
            }
        }
        if let Some(c) = &e.calibration {
            let sign = if c.intercept < 0.0 { "-" } else { "+" };
            let _ = writeln!(
                out,
                "    calibration: {} ≈ {}·{} {} {} (r² = {}, residual sd = {}, n = {})",
                c.response,
                num(c.slope),
                c.predictor,
                sign,
                num(c.intercept.abs()),
                num(c.r_squared),
                num(c.residual_sd),
                c.n
            );
        }
        for n in &e.notes {
            let _ = writeln!(out, "    note: {n}");
        }
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "\nWarnings");
        for w in &report.warnings {
            let _ = writeln!(out, "  {w}");
        }
    }
    out
}
