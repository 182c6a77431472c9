//! Synthetic data from the measurement model `M_ji = X_i + ε_ji`,
//! `ε_ji ~ N(τ_j, σ²)`, and Monte Carlo calibration of the tests.
//!
//! Every replication draws from its own ChaCha stream selected by the
//! replication index, so results do not depend on how replications are
//! scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::consistency::{compare_pairs, VerdictKind};
use crate::dataset::{DatasetError, MeasurementDataset, MeasurementRecord};
use crate::hypothesis::{
    correlation, ks_normality, mann_whitney, means_indep_large, means_indep_small, means_related_z,
    rater_influence_test, var_indep_f, var_related_chi2, wilcoxon_signed_rank, CorrelationKind,
    NormalityMethod, SampleSummary, TestError, TestId, TestOutcome,
};
use crate::intermethod::dab_equality_test;
use crate::report::AnalysisConfig;

/// Per-cell bound on positivity redraws before giving up.
pub const MAX_REDRAWS_PER_CELL: usize = 1000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimulationError {
    #[error("invalid simulation spec: {0}")]
    InvalidSpec(String),
    #[error(
        "could not draw a positive measurement for project {project}, method {method}, rater {rater} \
         in {attempts} attempts (noise too large for the sizes)"
    )]
    ImpossiblePositivity {
        project: String,
        method: String,
        rater: String,
        attempts: usize,
    },
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SizeDistribution {
    Uniform {
        low: f64,
        high: f64,
    },
    /// `ln X ~ N(mu, sigma²)`.
    LogNormal {
        mu: f64,
        sigma: f64,
    },
}

impl SizeDistribution {
    pub fn mean(&self) -> f64 {
        match *self {
            SizeDistribution::Uniform { low, high } => (low + high) / 2.0,
            SizeDistribution::LogNormal { mu, sigma } => (mu + sigma * sigma / 2.0).exp(),
        }
    }

    fn validate(&self) -> Result<(), SimulationError> {
        let ok = match *self {
            SizeDistribution::Uniform { low, high } => low > 0.0 && high > low && high.is_finite(),
            SizeDistribution::LogNormal { mu, sigma } => {
                mu.is_finite() && sigma > 0.0 && sigma.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(SimulationError::InvalidSpec(format!(
                "bad size distribution {self:?}"
            )))
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            SizeDistribution::Uniform { low, high } => Uniform::new(low, high)
                .expect("validated bounds")
                .sample(rng),
            SizeDistribution::LogNormal { mu, sigma } => LogNormal::new(mu, sigma)
                .expect("validated parameters")
                .sample(rng),
        }
    }
}

impl Default for SizeDistribution {
    fn default() -> Self {
        SizeDistribution::Uniform {
            low: 100.0,
            high: 1000.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodModel {
    pub id: String,
    #[serde(default = "default_raters")]
    pub raters: [String; 2],
    /// `τ` of the first and second rater.
    #[serde(default)]
    pub rater_biases: [f64; 2],
    /// Noise sd; defaults to 5% of the mean true size.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
}

fn default_raters() -> [String; 2] {
    ["r1".to_owned(), "r2".to_owned()]
}

impl MethodModel {
    pub fn new(id: &str) -> Self {
        MethodModel {
            id: id.to_owned(),
            raters: default_raters(),
            rater_biases: [0.0, 0.0],
            sigma: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulationSpec {
    pub n_projects: usize,
    pub true_sizes: SizeDistribution,
    pub methods: Vec<MethodModel>,
    pub seed: u64,
}

impl Default for SimulationSpec {
    fn default() -> Self {
        SimulationSpec {
            n_projects: 30,
            true_sizes: SizeDistribution::default(),
            methods: vec![MethodModel::new("A"), MethodModel::new("B")],
            seed: 0,
        }
    }
}

impl SimulationSpec {
    pub fn validate(&self) -> Result<(), SimulationError> {
        let bad = |m: String| Err(SimulationError::InvalidSpec(m));
        if self.n_projects == 0 {
            return bad("n_projects must be positive".into());
        }
        self.true_sizes.validate()?;
        if self.methods.is_empty() {
            return bad("at least one method is required".into());
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].iter().any(|o| o.id == m.id) {
                return bad(format!("duplicate method id `{}`", m.id));
            }
            if m.raters[0] == m.raters[1] {
                return bad(format!("method `{}` needs two distinct rater ids", m.id));
            }
            if m.rater_biases.iter().any(|b| !b.is_finite()) {
                return bad(format!("method `{}` has a non-finite rater bias", m.id));
            }
            if let Some(s) = m.sigma {
                if !(s > 0.0 && s.is_finite()) {
                    return bad(format!(
                        "method `{}`: sigma must be positive, got {s}",
                        m.id
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn sigma_of(&self, method: &MethodModel) -> f64 {
        method.sigma.unwrap_or(0.05 * self.true_sizes.mean())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub dataset: MeasurementDataset,
    /// Number of non-positive draws that were redrawn.
    pub resamples: usize,
}

/// The generator for replication `rep` of a run seeded with `seed`.
pub fn replication_rng(seed: u64, rep: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(rep);
    rng
}

/// One dataset from `spec`, drawn from stream 0 of `spec.seed`.
pub fn generate_dataset(spec: &SimulationSpec) -> Result<GeneratedDataset, SimulationError> {
    spec.validate()?;
    generate_with(spec, &mut replication_rng(spec.seed, 0))
}

fn generate_with<R: Rng>(
    spec: &SimulationSpec,
    rng: &mut R,
) -> Result<GeneratedDataset, SimulationError> {
    let width = spec.n_projects.to_string().len().max(3);
    let mut records = Vec::with_capacity(spec.n_projects * spec.methods.len() * 2);
    let mut resamples = 0;
    for i in 0..spec.n_projects {
        let project = format!("P{:0width$}", i + 1);
        let x = spec.true_sizes.sample(rng);
        for m in &spec.methods {
            let sigma = spec.sigma_of(m);
            for (rater, bias) in m.raters.iter().zip(m.rater_biases) {
                let mut attempts = 0;
                let value = loop {
                    let z: f64 = rng.sample(StandardNormal);
                    let v = x + bias + sigma * z;
                    if v > 0.0 {
                        break v;
                    }
                    attempts += 1;
                    if attempts >= MAX_REDRAWS_PER_CELL {
                        return Err(SimulationError::ImpossiblePositivity {
                            project,
                            method: m.id.clone(),
                            rater: rater.clone(),
                            attempts,
                        });
                    }
                };
                resamples += attempts;
                records.push(MeasurementRecord {
                    project_id: project.clone(),
                    method_id: m.id.clone(),
                    rater_id: rater.clone(),
                    value,
                });
            }
        }
    }
    Ok(GeneratedDataset {
        dataset: MeasurementDataset::from_records(records)?,
        resamples,
    })
}

/// Sampling design for calibrating one test. `effect` is measured in units
/// of `sd` (location shifts) or as a relative increase of the second
/// sample's sd (variance tests).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NullScenario {
    pub n_a: usize,
    pub n_b: usize,
    /// Correlation between paired observations (related designs only).
    pub rho: f64,
    pub sd: f64,
    /// True sizes for the tests that work on measurement-model data.
    pub true_sizes: SizeDistribution,
}

impl Default for NullScenario {
    fn default() -> Self {
        NullScenario {
            n_a: 30,
            n_b: 30,
            rho: 0.0,
            sd: 27.5,
            true_sizes: SizeDistribution::default(),
        }
    }
}

impl NullScenario {
    /// The design each test is calibrated under by default; sizes keep every
    /// test in the regime its id names.
    pub fn default_for(test: TestId) -> Self {
        let base = NullScenario::default();
        let (n_a, n_b, rho) = match test {
            TestId::RaterInfluence | TestId::InterMethodT => (30, 30, 0.0),
            TestId::KSNormality | TestId::Correlation => (30, 30, 0.0),
            TestId::MeansIndepZ => (40, 40, 0.0),
            TestId::MeansIndepT => (15, 15, 0.0),
            TestId::VarIndepF => (20, 20, 0.0),
            TestId::MeansRelatedZ => (40, 40, 0.5),
            TestId::VarRelatedChi2 => (30, 30, 0.5),
            TestId::MannWhitneySmall => (8, 8, 0.0),
            TestId::MannWhitneyLarge => (20, 20, 0.0),
            TestId::WilcoxonSmall => (15, 15, 0.5),
            TestId::WilcoxonLarge => (40, 40, 0.5),
        };
        NullScenario {
            n_a,
            n_b,
            rho,
            ..base
        }
    }

    fn validate(&self, test: TestId) -> Result<(), SimulationError> {
        let bad = |m: &str| Err(SimulationError::InvalidSpec(m.to_owned()));
        if !(self.sd > 0.0 && self.sd.is_finite()) {
            return bad("scenario sd must be positive");
        }
        if !(self.rho > -1.0 && self.rho < 1.0) {
            return bad("scenario rho must lie in (-1, 1)");
        }
        if self.n_a < 2 || self.n_b < 2 {
            return bad("scenario sample sizes must be at least 2");
        }
        if is_paired(test) && self.n_a != self.n_b {
            return bad("paired designs need n_a == n_b");
        }
        self.true_sizes.validate()
    }
}

fn is_paired(test: TestId) -> bool {
    matches!(
        test,
        TestId::RaterInfluence
            | TestId::InterMethodT
            | TestId::Correlation
            | TestId::MeansRelatedZ
            | TestId::VarRelatedChi2
            | TestId::WilcoxonSmall
            | TestId::WilcoxonLarge
    )
}

/// The two samples handed to a test. For `RaterInfluence` they are the two
/// raters' measurements, for `InterMethodT` `x` is the dab series and `y`
/// is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct Samples {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

fn normals<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Draws one replication's data for `test` under `scenario` with the given
/// effect (0 is the null hypothesis).
pub fn draw_samples<R: Rng>(
    test: TestId,
    scenario: &NullScenario,
    effect: f64,
    rng: &mut R,
) -> Samples {
    let sd = scenario.sd;
    let n = scenario.n_a;
    match test {
        TestId::RaterInfluence => {
            let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
            for _ in 0..n {
                let size = scenario.true_sizes.sample(rng);
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                x.push(size + sd * e1);
                y.push(size + sd * (e2 + effect));
            }
            Samples { x, y }
        }
        TestId::InterMethodT => {
            let mut dab = Vec::with_capacity(n);
            for _ in 0..n {
                let size = scenario.true_sizes.sample(rng);
                let z = normals(rng, 4);
                let (a1, a2) = (size + sd * z[0], size + sd * z[1]);
                let (b1, b2) = (size + sd * (z[2] + effect), size + sd * (z[3] + effect));
                dab.push(((a1 - b1) + (a2 - b2)) / 2.0);
            }
            Samples {
                x: dab,
                y: Vec::new(),
            }
        }
        TestId::KSNormality => {
            let x = normals(rng, n)
                .into_iter()
                .map(|z| sd * (z + effect * (z * z - 1.0)))
                .collect();
            Samples { x, y: Vec::new() }
        }
        TestId::Correlation => {
            let x = normals(rng, n);
            let y = normals(rng, n)
                .into_iter()
                .zip(&x)
                .map(|(z, &xi)| sd * (z + effect * xi))
                .collect();
            Samples {
                x: x.into_iter().map(|v| sd * v).collect(),
                y,
            }
        }
        TestId::VarIndepF => {
            let x = normals(rng, scenario.n_a)
                .into_iter()
                .map(|z| sd * z)
                .collect();
            let y = normals(rng, scenario.n_b)
                .into_iter()
                .map(|z| sd * (1.0 + effect) * z)
                .collect();
            Samples { x, y }
        }
        TestId::MeansIndepZ
        | TestId::MeansIndepT
        | TestId::MannWhitneySmall
        | TestId::MannWhitneyLarge => {
            let x = normals(rng, scenario.n_a)
                .into_iter()
                .map(|z| sd * z)
                .collect();
            let y = normals(rng, scenario.n_b)
                .into_iter()
                .map(|z| sd * (z + effect))
                .collect();
            Samples { x, y }
        }
        TestId::MeansRelatedZ
        | TestId::VarRelatedChi2
        | TestId::WilcoxonSmall
        | TestId::WilcoxonLarge => {
            let rho = scenario.rho;
            let c = (1.0 - rho * rho).sqrt();
            let (mut x, mut y) = (Vec::with_capacity(n), Vec::with_capacity(n));
            let scale = if test == TestId::VarRelatedChi2 {
                1.0 + effect
            } else {
                1.0
            };
            let shift = if test == TestId::VarRelatedChi2 {
                0.0
            } else {
                effect
            };
            for _ in 0..n {
                let z1: f64 = rng.sample(StandardNormal);
                let z2: f64 = rng.sample(StandardNormal);
                x.push(sd * z1);
                y.push(sd * (scale * (rho * z1 + c * z2) + shift));
            }
            Samples { x, y }
        }
    }
}

/// Runs the test named by `test` on samples drawn by [`draw_samples`].
pub fn run_test(test: TestId, s: &Samples, alpha: f64) -> Result<TestOutcome, TestError> {
    match test {
        TestId::RaterInfluence => {
            let d: Vec<f64> = s.x.iter().zip(&s.y).map(|(a, b)| a - b).collect();
            rater_influence_test(&d, alpha)
        }
        TestId::InterMethodT => {
            dab_equality_test(&s.x, alpha, NormalityMethod::Kolmogorov).map(|o| o.equality)
        }
        TestId::KSNormality => ks_normality(&s.x, alpha),
        TestId::Correlation => correlation(&s.x, &s.y, CorrelationKind::Pearson, alpha),
        TestId::MeansIndepZ => means_indep_large(
            &SampleSummary::from_slice(&s.x),
            &SampleSummary::from_slice(&s.y),
            alpha,
        ),
        TestId::MeansIndepT => means_indep_small(
            &SampleSummary::from_slice(&s.x),
            &SampleSummary::from_slice(&s.y),
            alpha,
        ),
        TestId::VarIndepF => var_indep_f(
            &SampleSummary::from_slice(&s.x),
            &SampleSummary::from_slice(&s.y),
            alpha,
        ),
        TestId::MeansRelatedZ => means_related_z(&s.x, &s.y, alpha),
        TestId::VarRelatedChi2 => var_related_chi2(&s.x, &s.y, alpha),
        TestId::MannWhitneySmall | TestId::MannWhitneyLarge => mann_whitney(&s.x, &s.y, alpha),
        TestId::WilcoxonSmall | TestId::WilcoxonLarge => wilcoxon_signed_rank(&s.x, &s.y, alpha),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub test_id: TestId,
    pub replications: usize,
    pub rejection_rate: f64,
    pub alpha: f64,
    /// `√(rate (1 − rate) / replications)`.
    pub standard_error: f64,
    pub effect: f64,
    /// Replications where the test could not be computed (counted as
    /// non-rejections).
    pub failures: usize,
    pub seed: u64,
}

fn check_run(replications: usize, alpha: f64) -> Result<(), SimulationError> {
    if replications == 0 {
        return Err(SimulationError::InvalidSpec(
            "replications must be positive".into(),
        ));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(SimulationError::InvalidSpec(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(())
}

fn rate_and_se(hits: usize, replications: usize) -> (f64, f64) {
    let rate = hits as f64 / replications as f64;
    (rate, (rate * (1.0 - rate) / replications as f64).sqrt())
}

/// Rejection rate of `test` at `effect` over `replications` draws.
pub fn rejection_rate(
    test: TestId,
    scenario: &NullScenario,
    effect: f64,
    replications: usize,
    alpha: f64,
    seed: u64,
) -> Result<CalibrationResult, SimulationError> {
    check_run(replications, alpha)?;
    scenario.validate(test)?;
    let (rejections, failures) = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep);
            let s = draw_samples(test, scenario, effect, &mut rng);
            match run_test(test, &s, alpha) {
                Ok(o) => (o.reject() as usize, 0),
                Err(_) => (0, 1),
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let (rate, se) = rate_and_se(rejections, replications);
    Ok(CalibrationResult {
        test_id: test,
        replications,
        rejection_rate: rate,
        alpha,
        standard_error: se,
        effect,
        failures,
        seed,
    })
}

/// Empirical type-I error rate of `test` under `scenario`.
pub fn calibrate_type1(
    test: TestId,
    scenario: &NullScenario,
    replications: usize,
    alpha: f64,
    seed: u64,
) -> Result<CalibrationResult, SimulationError> {
    rejection_rate(test, scenario, 0.0, replications, alpha, seed)
}

/// Rejection rates over a nondecreasing grid of effects. Every grid point
/// reuses the same random streams.
pub fn power_curve(
    test: TestId,
    scenario: &NullScenario,
    effects: &[f64],
    replications: usize,
    alpha: f64,
    seed: u64,
) -> Result<Vec<CalibrationResult>, SimulationError> {
    if effects.is_empty()
        || effects.iter().any(|e| !e.is_finite())
        || effects.windows(2).any(|w| w[1] < w[0])
    {
        return Err(SimulationError::InvalidSpec(
            "effects must be finite and nondecreasing".into(),
        ));
    }
    effects
        .iter()
        .map(|&e| rejection_rate(test, scenario, e, replications, alpha, seed))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineCalibration {
    pub method_a: String,
    pub method_b: String,
    pub replications: usize,
    pub alpha: f64,
    pub seed: u64,
    pub more_consistent: usize,
    pub no_difference: usize,
    pub inconclusive: usize,
    /// Share of replications ending in `MoreConsistent`.
    pub rejection_rate: f64,
    pub standard_error: f64,
    /// Replications per branch letter, `-` when no branch was reached.
    pub branches: BTreeMap<String, usize>,
    pub resamples: usize,
}

/// Runs the inter-rater comparison of the first two methods of `spec` on
/// `replications` generated datasets (replication `k` uses stream `k` of
/// `spec.seed`, so replication 0 is [`generate_dataset`]'s output).
pub fn calibrate_pipeline(
    spec: &SimulationSpec,
    replications: usize,
    config: &AnalysisConfig,
) -> Result<PipelineCalibration, SimulationError> {
    spec.validate()?;
    check_run(replications, config.alpha)?;
    if spec.methods.len() < 2 {
        return Err(SimulationError::InvalidSpec(
            "pipeline calibration needs two methods".into(),
        ));
    }
    let (a, b) = (&spec.methods[0].id, &spec.methods[1].id);
    let per_rep: Vec<(u8, Option<char>, usize)> = (0..replications as u64)
        .into_par_iter()
        .map(|rep| {
            let g = generate_with(spec, &mut replication_rng(spec.seed, rep))?;
            let pa = g.dataset.extract_pair(a)?;
            let pb = g.dataset.extract_pair(b)?;
            let v = compare_pairs(&pa, &pb, config);
            let kind = match v.kind {
                VerdictKind::MoreConsistent { .. } => 0,
                VerdictKind::NoDifference => 1,
                VerdictKind::Inconclusive { .. } => 2,
            };
            Ok((kind, v.branch_taken.map(|b| b.letter()), g.resamples))
        })
        .collect::<Result<_, SimulationError>>()?;
    let mut counts = [0usize; 3];
    let mut branches = BTreeMap::new();
    let mut resamples = 0;
    for (kind, branch, r) in per_rep {
        counts[kind as usize] += 1;
        *branches
            .entry(branch.map_or("-".to_owned(), String::from))
            .or_insert(0) += 1;
        resamples += r;
    }
    let (rate, se) = rate_and_se(counts[0], replications);
    Ok(PipelineCalibration {
        method_a: a.clone(),
        method_b: b.clone(),
        replications,
        alpha: config.alpha,
        seed: spec.seed,
        more_consistent: counts[0],
        no_difference: counts[1],
        inconclusive: counts[2],
        rejection_rate: rate,
        standard_error: se,
        branches,
        resamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_spec_shape() {
        let spec = SimulationSpec::default();
        assert_eq!(spec.sigma_of(&spec.methods[0]), 27.5);
        let g = generate_dataset(&spec).unwrap();
        assert_eq!(g.dataset.records().len(), 30 * 2 * 2);
        assert_eq!(g.dataset.projects()[0], "P001");
        assert_eq!(g.resamples, 0);
    }

    #[test]
    fn spec_from_partial_json() {
        let spec: SimulationSpec = serde_json::from_str(
            r#"{"n_projects": 5, "true_sizes": {"kind": "lognormal", "mu": 5.0, "sigma": 0.5},
                "methods": [{"id": "X", "rater_biases": [0, 2], "sigma": 3}]}"#,
        )
        .unwrap();
        assert_eq!(spec.methods[0].raters, default_raters());
        assert_eq!(spec.seed, 0);
        assert!(generate_dataset(&spec).is_ok());
        assert!(serde_json::from_str::<SimulationSpec>(r#"{"n_project": 5}"#).is_err());
    }

    #[test]
    fn invalid_specs() {
        let mut spec = SimulationSpec::default();
        spec.methods[0].sigma = Some(0.0);
        assert!(matches!(
            generate_dataset(&spec),
            Err(SimulationError::InvalidSpec(_))
        ));
        let mut spec = SimulationSpec::default();
        spec.methods[1].id = "A".into();
        assert!(generate_dataset(&spec).is_err());
        let spec = SimulationSpec {
            n_projects: 0,
            ..Default::default()
        };
        assert!(generate_dataset(&spec).is_err());
    }

    #[test]
    fn impossible_positivity() {
        let mut spec = SimulationSpec {
            true_sizes: SizeDistribution::Uniform {
                low: 1.0,
                high: 2.0,
            },
            ..Default::default()
        };
        spec.methods[0].rater_biases = [-1e6, 0.0];
        spec.methods[0].sigma = Some(1.0);
        assert!(matches!(
            generate_dataset(&spec),
            Err(SimulationError::ImpossiblePositivity { .. })
        ));
    }

    #[test]
    fn streams_differ_per_replication() {
        let a: f64 = replication_rng(7, 0).sample(StandardNormal);
        let b: f64 = replication_rng(7, 1).sample(StandardNormal);
        let c: f64 = replication_rng(7, 0).sample(StandardNormal);
        assert_ne!(a, b);
        assert_eq!(a, c);
    }

    #[test]
    fn power_grid_must_be_monotone() {
        let s = NullScenario::default_for(TestId::MeansIndepT);
        assert!(power_curve(TestId::MeansIndepT, &s, &[0.5, 0.0], 10, 0.05, 1).is_err());
        assert!(power_curve(TestId::MeansIndepT, &s, &[], 10, 0.05, 1).is_err());
    }

    #[test]
    fn default_scenarios_stay_in_their_regime() {
        for t in TestId::ALL {
            let s = NullScenario::default_for(t);
            let o = run_test(
                t,
                &draw_samples(t, &s, 0.0, &mut replication_rng(3, 0)),
                0.05,
            )
            .unwrap();
            assert_eq!(o.test_id, t, "{t}");
        }
    }
}
