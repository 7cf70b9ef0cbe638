//! Seeded verification campaigns and their JSON reports.
//!
//! Every campaign evaluates independent samples in parallel, keeps them in
//! sample order, and reduces sequentially with ties going to the lowest
//! index, so reports are identical for any number of worker threads.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SymError};
use crate::json::SCHEMA;
use crate::product::{ProductConstants, ProductSpace};
use crate::sampling::{sample_seed, FrameSearch};
use crate::simons::{self, lemma_from_breakdown, Lemma, SimonsBreakdown, ROUTE_TOL};
use crate::submersion::{self, FibrationKind, FibrationModel, SubmersionSummary};
use crate::symmetric::{
    build_cpn_pair, build_hpn_pair, build_sphere_pair, CurvatureSummary, PairKind, SymmetricPair,
};
use crate::triple::{self, CandidateSubspace, TripleReport, TripleStatus};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    #[serde(alias = "so")]
    Sphere,
    #[serde(alias = "su")]
    Cpn,
    #[serde(alias = "sp")]
    Hpn,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorSpec {
    pub family: Family,
    pub n: usize,
}

impl FactorSpec {
    pub fn build(&self) -> Result<SymmetricPair> {
        match self.family {
            Family::Sphere => build_sphere_pair(self.n),
            Family::Cpn => build_cpn_pair(self.n),
            Family::Hpn => build_hpn_pair(self.n),
        }
    }
}

impl FromStr for FactorSpec {
    type Err = SymError;

    /// `sphere:4`, `cpn:2`, `hpn:1` (also `so`, `su`, `sp`).
    fn from_str(s: &str) -> Result<Self> {
        let (fam, n) = s.split_once(':').ok_or_else(|| {
            SymError::InvalidParameter(format!("factor '{s}' is not of the form family:n"))
        })?;
        let family = match fam.trim().to_ascii_lowercase().as_str() {
            "sphere" | "so" | "s" => Family::Sphere,
            "cpn" | "su" | "cp" => Family::Cpn,
            "hpn" | "sp" | "hp" => Family::Hpn,
            other => {
                return Err(SymError::InvalidParameter(format!(
                    "unknown family '{other}' (expected sphere, cpn or hpn)"
                )))
            }
        };
        let n = n.trim().parse().map_err(|_| {
            SymError::InvalidParameter(format!("factor '{s}': '{n}' is not a dimension"))
        })?;
        Ok(Self { family, n })
    }
}

impl fmt::Display for FactorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fam = match self.family {
            Family::Sphere => "sphere",
            Family::Cpn => "cpn",
            Family::Hpn => "hpn",
        };
        write!(f, "{fam}:{}", self.n)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub factor1: FactorSpec,
    pub factor2: FactorSpec,
}

impl FromStr for SpaceSpec {
    type Err = SymError;

    /// `sphere:3xsphere:3`
    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once('x').ok_or_else(|| {
            SymError::InvalidParameter(format!("space '{s}' is not of the form A x B"))
        })?;
        Ok(Self {
            factor1: a.parse()?,
            factor2: b.parse()?,
        })
    }
}

impl SpaceSpec {
    pub fn build(&self, search: &FrameSearch) -> Result<ProductSpace> {
        ProductSpace::new(self.factor1.build()?, self.factor2.build()?, search)
    }
}

fn default_samples() -> usize {
    1000
}
fn default_magnitude() -> f64 {
    1.0
}
fn default_tol() -> f64 {
    1e-9
}
fn default_frame_samples() -> usize {
    256
}
fn default_refine_steps() -> usize {
    200
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub space_spec: SpaceSpec,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    /// Defaults to `Λ_tg` of the space.
    #[serde(default)]
    pub lambda_max: Option<f64>,
    #[serde(default = "default_magnitude")]
    pub magnitude: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub output_path: Option<String>,
    /// Random starts for curvature extrema.
    #[serde(default = "default_frame_samples")]
    pub frame_samples: usize,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
    /// Whether per-sample breakdowns go into the report.
    #[serde(default = "default_true")]
    pub record_samples: bool,
}

impl CampaignConfig {
    pub fn new(space_spec: SpaceSpec) -> Self {
        Self {
            space_spec,
            samples: default_samples(),
            seed: 0,
            lambda_max: None,
            magnitude: default_magnitude(),
            tol: default_tol(),
            output_path: None,
            frame_samples: default_frame_samples(),
            refine_steps: default_refine_steps(),
            record_samples: true,
        }
    }

    /// Parses a JSON config; errors name the offending field.
    pub fn from_json(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples < 1 {
            return Err(SymError::InvalidParameter(
                "samples: must be at least 1".into(),
            ));
        }
        if let Some(l) = self.lambda_max {
            if !(0.0..1.0).contains(&l) {
                return Err(SymError::InvalidParameter(format!(
                    "lambda_max: must lie in [0, 1), got {l}"
                )));
            }
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(SymError::InvalidParameter(format!(
                "tol: must be positive, got {}",
                self.tol
            )));
        }
        if !(self.magnitude >= 0.0 && self.magnitude.is_finite()) {
            return Err(SymError::InvalidParameter(format!(
                "magnitude: must be finite and non-negative, got {}",
                self.magnitude
            )));
        }
        if self.frame_samples < 1 {
            return Err(SymError::InvalidParameter(
                "frame_samples: must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn frame_search(&self) -> FrameSearch {
        FrameSearch::new(self.frame_samples, self.refine_steps, self.seed)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Finding,
    Fail,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 2,
            Status::Finding => 3,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckMode {
    /// A violation fails the campaign.
    Assert,
    /// A violation is reported as a finding about the bound, not a failure.
    Finding,
}

#[derive(Clone, Debug, Serialize)]
pub struct MarginDistribution {
    pub min: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
    pub max: f64,
    pub mean: f64,
    pub below_tol: usize,
}

impl MarginDistribution {
    pub fn from_margins(margins: &[f64], tol: f64) -> Option<Self> {
        if margins.is_empty() {
            return None;
        }
        let mut sorted = margins.to_vec();
        sorted.sort_by(f64::total_cmp);
        let q = |f: f64| sorted[((sorted.len() - 1) as f64 * f).round() as usize];
        Some(Self {
            min: sorted[0],
            q05: q(0.05),
            median: q(0.5),
            q95: q(0.95),
            max: sorted[sorted.len() - 1],
            mean: margins.iter().sum::<f64>() / margins.len() as f64,
            below_tol: margins.iter().filter(|m| **m < -tol).count(),
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub mode: CheckMode,
    /// Bound (right-hand side) at the worst sample.
    pub bound: f64,
    pub worst_margin: f64,
    pub argmin_seed: Option<u64>,
    pub n_samples: usize,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distribution: Option<MarginDistribution>,
}

impl CheckResult {
    /// Reduces per-sample `(margin, bound, seed)` to the worst sample; ties
    /// go to the first.
    pub fn reduce(
        name: impl Into<String>,
        mode: CheckMode,
        samples: &[(f64, f64, Option<u64>)],
        tol: f64,
        with_distribution: bool,
    ) -> Self {
        let mut worst = 0;
        for (i, s) in samples.iter().enumerate() {
            if s.0 < samples[worst].0 {
                worst = i;
            }
        }
        let (margin, bound, seed) =
            samples
                .get(worst)
                .copied()
                .unwrap_or((f64::INFINITY, 0.0, None));
        let margins: Vec<f64> = samples.iter().map(|s| s.0).collect();
        Self {
            name: name.into(),
            mode,
            bound,
            worst_margin: margin,
            argmin_seed: seed,
            n_samples: samples.len(),
            passed: margin >= -tol,
            distribution: if with_distribution {
                MarginDistribution::from_margins(&margins, tol)
            } else {
                None
            },
        }
    }

    /// A single deterministic check: passes when `value ≤ allowed`.
    pub fn residual(name: impl Into<String>, value: f64, allowed: f64, tol: f64) -> Self {
        Self::reduce(
            name,
            CheckMode::Assert,
            &[(allowed - value, allowed, None)],
            tol,
            false,
        )
    }
}

pub fn overall_status(checks: &[CheckResult]) -> Status {
    let mut status = Status::Pass;
    for c in checks {
        if !c.passed {
            let s = match c.mode {
                CheckMode::Assert => Status::Fail,
                CheckMode::Finding => Status::Finding,
            };
            status = status.max(s);
        }
    }
    status
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport<T: Serialize> {
    pub schema: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub status: Status,
    pub details: T,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl<T: Serialize> VerificationReport<T> {
    pub fn new(
        command: &str,
        config: serde_json::Value,
        checks: Vec<CheckResult>,
        details: T,
        started: Instant,
    ) -> Self {
        let status = overall_status(&checks);
        Self {
            schema: SCHEMA,
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            checks,
            status,
            details,
            wall_time: Some(started.elapsed().as_secs_f64()),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        crate::json::to_string(self)
    }

    /// The report without `wall_time`: identical for identical configs.
    pub fn payload_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Payload<'a, T: Serialize> {
            schema: &'static str,
            version: &'static str,
            command: &'a str,
            config: &'a serde_json::Value,
            checks: &'a [CheckResult],
            status: Status,
            details: &'a T,
        }
        crate::json::to_string(&Payload {
            schema: self.schema,
            version: self.version,
            command: &self.command,
            config: &self.config,
            checks: &self.checks,
            status: self.status,
            details: &self.details,
        })
    }
}

fn echo<T: Serialize>(cfg: &T) -> serde_json::Value {
    serde_json::to_value(cfg).unwrap_or(serde_json::Value::Null)
}

// ---------------------------------------------------------------- space

#[derive(Clone, Debug, Serialize)]
pub struct SpaceConfig {
    pub factor: FactorSpec,
    pub search: FrameSearch,
}

pub fn run_space(cfg: &SpaceConfig, tol: f64) -> Result<VerificationReport<CurvatureSummary>> {
    let started = Instant::now();
    let pair = cfg.factor.build()?;
    let summary = pair.summary(&cfg.search)?;
    let d = pair.m_dim();
    let ric = pair.ricci();
    let ric_off = (&ric - DMatrix::identity(d, d) * summary.rho).amax();
    let mut checks = vec![
        CheckResult::residual("closure", pair.closure_residuals().max(), 1e-9, tol),
        CheckResult::residual("ricci_multiple_of_metric", ric_off, 1e-8, tol),
        CheckResult::residual(
            "sec_max_equals_bracket_square",
            (summary.sec_max - summary.k_bracket_max.powi(2)).abs(),
            1e-8,
            tol,
        ),
    ];
    if cfg.factor.family == Family::Sphere {
        let c = 1.0 / (2.0 * (cfg.factor.n as f64 - 1.0));
        checks.push(CheckResult::residual(
            "sphere_sec_spread",
            summary.sec_max - summary.sec_min,
            1e-6,
            tol,
        ));
        checks.push(CheckResult::residual(
            "sphere_sec_value",
            (summary.sec_max - c).abs(),
            1e-4,
            tol,
        ));
        checks.push(CheckResult::residual(
            "sphere_scalar",
            (summary.scalar - cfg.factor.n as f64 / 2.0).abs(),
            1e-8,
            tol,
        ));
    }
    Ok(VerificationReport::new(
        "space",
        echo(cfg),
        checks,
        summary,
        started,
    ))
}

// ---------------------------------------------------------------- constants

#[derive(Clone, Debug, Serialize)]
pub struct ConstantsDetails {
    #[serde(flatten)]
    pub constants: ProductConstants,
    pub seeds: FrameSearch,
    pub space: String,
}

pub fn run_constants(cfg: &CampaignConfig) -> Result<VerificationReport<ConstantsDetails>> {
    cfg.validate()?;
    let started = Instant::now();
    let space = cfg.space_spec.build(&cfg.frame_search())?;
    let k = *space.constants();
    let formula = crate::product::constant_c(k.p, k.n_total, k.k1, k.k2)?;
    let checks = vec![
        CheckResult::residual("constant_c_formula", (k.c - formula).abs(), 1e-9, cfg.tol),
        CheckResult::residual(
            "lambda_k_below_lambda_tg",
            k.lambda_k - k.lambda_tg,
            0.0,
            cfg.tol,
        ),
        CheckResult::residual(
            "rho_is_factor_minimum",
            (k.rho - space.factor1().rho_min().min(space.factor2().rho_min())).abs(),
            1e-10,
            cfg.tol,
        ),
    ];
    let details = ConstantsDetails {
        constants: k,
        seeds: cfg.frame_search(),
        space: space.name().to_string(),
    };
    Ok(VerificationReport::new(
        "constants",
        echo(cfg),
        checks,
        details,
        started,
    ))
}

// ---------------------------------------------------------------- simons

#[derive(Clone, Debug, Serialize)]
pub struct SimonsSample {
    pub seed: u64,
    #[serde(flatten)]
    pub breakdown: SimonsBreakdown,
}

#[derive(Clone, Debug, Serialize)]
pub struct SimonsDetails {
    pub space: String,
    pub constants: ProductConstants,
    pub lambda_max: f64,
    pub min_margin: f64,
    pub argmin_seed: u64,
    pub max_route_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<SimonsSample>>,
}

/// Main inequality, lemma bounds, term symmetries and route agreement over
/// `cfg.samples` random germs. Lemma `L5` is checked in finding mode, both
/// with `K₁²` and with the coefficient as printed.
pub fn run_simons(cfg: &CampaignConfig) -> Result<VerificationReport<SimonsDetails>> {
    cfg.validate()?;
    let started = Instant::now();
    let space = cfg.space_spec.build(&cfg.frame_search())?;
    run_simons_on(&space, cfg, started)
}

pub fn run_simons_on(
    space: &ProductSpace,
    cfg: &CampaignConfig,
    started: Instant,
) -> Result<VerificationReport<SimonsDetails>> {
    cfg.validate()?;
    if space.sphere_curvature().is_none() {
        return Err(SymError::InvalidParameter(
            "space_spec.factor1: the Simons bound needs a sphere as first factor".into(),
        ));
    }
    let lambda_max = cfg.lambda_max.unwrap_or(space.constants().lambda_tg);
    if !(0.0..1.0).contains(&lambda_max) {
        return Err(SymError::InvalidParameter(format!(
            "lambda_max: must lie in [0, 1), got {lambda_max}"
        )));
    }
    let samples: Vec<SimonsSample> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let seed = sample_seed(cfg.seed, i as u64);
            let germ = simons::random_germ(space, lambda_max, cfg.magnitude, seed)?;
            Ok(SimonsSample {
                seed,
                breakdown: simons::simons_total(space, &germ)?,
            })
        })
        .collect::<Result<_>>()?;

    let tol = cfg.tol;
    let collect = |f: &dyn Fn(&SimonsBreakdown) -> (f64, f64)| -> Vec<(f64, f64, Option<u64>)> {
        samples
            .iter()
            .map(|s| {
                let (m, b) = f(&s.breakdown);
                (m, b, Some(s.seed))
            })
            .collect()
    };
    let mut checks = vec![CheckResult::reduce(
        "main_inequality",
        CheckMode::Assert,
        &collect(&|b| (b.margin, b.bound)),
        tol,
        true,
    )];
    for lemma in Lemma::ALL {
        let mode = match lemma {
            Lemma::L5 | Lemma::L5Printed => CheckMode::Finding,
            _ => CheckMode::Assert,
        };
        let data = collect(&|b| {
            let c = lemma_from_breakdown(space, b, lemma);
            (c.margin, c.rhs)
        });
        checks.push(CheckResult::reduce(lemma.name(), mode, &data, tol, true));
    }
    checks.push(CheckResult::reduce(
        "symmetry_term1_term2",
        CheckMode::Assert,
        &collect(&|b| (-(b.direct_terms[0] - b.direct_terms[1]).abs(), 0.0)),
        tol,
        false,
    ));
    checks.push(CheckResult::reduce(
        "symmetry_term3_term4",
        CheckMode::Assert,
        &collect(&|b| (-(b.direct_terms[2] - b.direct_terms[3]).abs(), 0.0)),
        tol,
        false,
    ));
    checks.push(CheckResult::reduce(
        "route_agreement",
        CheckMode::Assert,
        &collect(&|b| {
            let allowed = ROUTE_TOL * b.a_norm_sq.max(1.0);
            (allowed - b.route_gap, allowed)
        }),
        tol,
        false,
    ));
    checks.push(CheckResult::reduce(
        "term5_nonpositive",
        CheckMode::Assert,
        &collect(&|b| (-b.terms[4], 0.0)),
        tol,
        false,
    ));

    let main = &checks[0];
    let details = SimonsDetails {
        space: space.name().to_string(),
        constants: *space.constants(),
        lambda_max,
        min_margin: main.worst_margin,
        argmin_seed: main.argmin_seed.unwrap_or(0),
        max_route_gap: samples
            .iter()
            .map(|s| s.breakdown.route_gap)
            .fold(0.0, f64::max),
        samples: cfg.record_samples.then_some(samples),
    };
    Ok(VerificationReport::new(
        "simons-verify",
        echo(cfg),
        checks,
        details,
        started,
    ))
}

// ---------------------------------------------------------------- triple systems

#[derive(Clone, Debug, Serialize)]
pub struct NamedTriple {
    pub name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(flatten)]
    pub report: TripleReport,
}

/// Headline numbers for a single user subspace.
#[derive(Clone, Debug, Serialize)]
pub struct TripleSummary {
    pub residual: f64,
    pub envelope_dim: Option<usize>,
    pub injective: Option<bool>,
    pub sigma_min: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TripleDetails {
    pub space: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summary: Option<TripleSummary>,
    pub instances: Vec<NamedTriple>,
    /// Random subspaces whose residual is at most the borderline threshold.
    pub flagged_random: Vec<u64>,
}

/// Checks one user subspace (given as columns of `m`-coordinates).
pub fn run_triple_single(
    cfg: &CampaignConfig,
    basis: &DMatrix<f64>,
) -> Result<VerificationReport<TripleDetails>> {
    cfg.validate()?;
    let started = Instant::now();
    let space = cfg.space_spec.build(&cfg.frame_search())?;
    let sub = CandidateSubspace::from_span(space.pair(), basis)?;
    let report = triple::triple_report(&space, &sub)?;
    let mut checks = Vec::new();
    if let Some(inj) = report.injectivity.as_ref().filter(|i| i.applicable) {
        checks.push(CheckResult::reduce(
            "pi1_injective",
            CheckMode::Assert,
            &[(
                inj.sigma_min.unwrap_or(0.0) - triple::INJECTIVITY_TOL,
                triple::INJECTIVITY_TOL,
                None,
            )],
            0.0,
            false,
        ));
    }
    let inj = report.injectivity.as_ref();
    let summary = TripleSummary {
        residual: report.residual,
        envelope_dim: report.envelope_dim,
        injective: inj.and_then(|i| i.injective),
        sigma_min: inj.and_then(|i| i.sigma_min),
    };
    let details = TripleDetails {
        space: space.name().to_string(),
        summary: Some(summary),
        instances: vec![NamedTriple {
            name: "input".into(),
            seed: None,
            report,
        }],
        flagged_random: Vec::new(),
    };
    Ok(VerificationReport::new(
        "triple-check",
        echo(cfg),
        checks,
        details,
        started,
    ))
}

/// Great spheres of the first factor, the diagonal (for identical factors)
/// and `cfg.samples` random 3-dimensional subspaces of the product.
pub fn run_triple_suite(cfg: &CampaignConfig) -> Result<VerificationReport<TripleDetails>> {
    cfg.validate()?;
    let started = Instant::now();
    let space = cfg.space_spec.build(&cfg.frame_search())?;
    let pair = space.pair();
    let n = space.n_total();
    let mut instances = Vec::new();
    if space.sphere_curvature().is_some() {
        for k in 1..=space.p() {
            let mut basis = DMatrix::zeros(n, k);
            basis.view_mut((0, 0), (k, k)).fill_with_identity();
            let sub = CandidateSubspace::new(pair, basis)?;
            instances.push(NamedTriple {
                name: format!("great_sphere_{k}"),
                seed: None,
                report: triple::triple_report(&space, &sub)?,
            });
        }
    }
    if cfg.space_spec.factor1 == cfg.space_spec.factor2 {
        let sub = triple::diagonal_subspace(&space)?;
        instances.push(NamedTriple {
            name: "diagonal".into(),
            seed: None,
            report: triple::triple_report(&space, &sub)?,
        });
    }
    let structured = instances.len();
    let k = 3.min(n);
    let random: Vec<NamedTriple> = (0..cfg.samples)
        .into_par_iter()
        .map(|i| {
            let seed = sample_seed(cfg.seed, i as u64);
            let sub = triple::random_subspace(pair, k, seed)?;
            Ok(NamedTriple {
                name: format!("random_{i}"),
                seed: Some(seed),
                report: triple::triple_report(&space, &sub)?,
            })
        })
        .collect::<Result<_>>()?;
    let flagged_random: Vec<u64> = random
        .iter()
        .filter(|r| r.report.status != TripleStatus::NotTriple)
        .filter_map(|r| r.seed)
        .collect();
    instances.extend(random);

    let structured_data: Vec<_> = instances[..structured]
        .iter()
        .map(|r| (1e-10 - r.report.residual, 1e-10, None))
        .collect();
    let mut checks = Vec::new();
    if !structured_data.is_empty() {
        checks.push(CheckResult::reduce(
            "structured_triple_systems",
            CheckMode::Assert,
            &structured_data,
            0.0,
            false,
        ));
    }
    let injectivity: Vec<_> = instances
        .iter()
        .filter_map(|r| {
            r.report
                .injectivity
                .as_ref()
                .filter(|i| i.applicable)
                .map(|i| (r.seed, i))
        })
        .map(|(seed, i)| {
            (
                i.sigma_min.unwrap_or(0.0) - triple::INJECTIVITY_TOL,
                triple::INJECTIVITY_TOL,
                seed,
            )
        })
        .collect();
    if !injectivity.is_empty() {
        checks.push(CheckResult::reduce(
            "pi1_injective",
            CheckMode::Assert,
            &injectivity,
            0.0,
            false,
        ));
    }
    let envelope_ok: Vec<_> = instances
        .iter()
        .filter(|r| r.report.dim >= 2)
        .filter_map(|r| {
            r.report
                .envelope_killing_definite
                .map(|d| (if d { 0.0 } else { -1.0 }, 0.0, r.seed))
        })
        .collect();
    if !envelope_ok.is_empty() {
        checks.push(CheckResult::reduce(
            "envelope_compact",
            CheckMode::Assert,
            &envelope_ok,
            0.0,
            false,
        ));
    }
    let details = TripleDetails {
        space: space.name().to_string(),
        summary: None,
        instances,
        flagged_random,
    };
    Ok(VerificationReport::new(
        "triple-check",
        echo(cfg),
        checks,
        details,
        started,
    ))
}

// ---------------------------------------------------------------- submersion

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubmersionConfig {
    pub model: FibrationKind,
    pub n: usize,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_frame_samples")]
    pub frame_samples: usize,
    #[serde(default = "default_refine_steps")]
    pub refine_steps: usize,
}

impl SubmersionConfig {
    pub fn new(model: FibrationKind, n: usize) -> Self {
        Self {
            model,
            n,
            samples: default_samples(),
            seed: 0,
            tol: default_tol(),
            frame_samples: default_frame_samples(),
            refine_steps: default_refine_steps(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SubmersionDetails {
    #[serde(flatten)]
    pub summary: SubmersionSummary,
    /// Largest `Σ_i S_M(e_i, ν)` over fibred germs (`CP^n` only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_sampled_max: Option<f64>,
}

/// Fibre, twisting and threshold identities, plus (for `CP^n`) the pointwise
/// twisting bound on fibred germs over `S^{2n+1} × S²`.
pub fn run_submersion(cfg: &SubmersionConfig) -> Result<VerificationReport<SubmersionDetails>> {
    if cfg.samples < 1 {
        return Err(SymError::InvalidParameter(
            "samples: must be at least 1".into(),
        ));
    }
    let started = Instant::now();
    let search = FrameSearch::new(cfg.frame_samples, cfg.refine_steps, cfg.seed);
    let model = FibrationModel::new(cfg.model, cfg.n)?;
    let summary = submersion::summarize(&model, &search)?;
    let tol = cfg.tol;
    let mut checks = vec![
        CheckResult::residual("lift_identity", summary.lift_residual, 1e-9, tol),
        CheckResult::residual(
            "fibre_scalar_direct",
            (summary.r - summary.r_direct).abs(),
            1e-8,
            tol,
        ),
        CheckResult::residual(
            "total_scalar",
            (summary.k_bar - summary.k_bar_direct).abs(),
            1e-9,
            tol,
        ),
        CheckResult::residual(
            "base_scalar_rescaled",
            (summary.base_scalar_rescaled - summary.threshold_closed_form).abs(),
            1e-6,
            tol,
        ),
    ];
    let mut tau_sampled_max = None;
    if cfg.model == FibrationKind::Cpn {
        let space = ProductSpace::new(model.total.clone(), build_sphere_pair(2)?, &search)?;
        let results: Vec<(u64, submersion::FibredCheck)> = (0..cfg.samples)
            .into_par_iter()
            .map(|i| {
                let seed = sample_seed(cfg.seed, i as u64);
                // λ spread over [0, 0.9] by sample index
                let lambda = 0.9 * (i % 10) as f64 / 9.0;
                let fg = submersion::random_fibred_germ(&space, lambda, 1.0, seed)?;
                Ok((seed, submersion::check_fibred_germ(&space, &fg)?))
            })
            .collect::<Result<_>>()?;
        let data =
            |f: &dyn Fn(&submersion::FibredCheck) -> (f64, f64)| -> Vec<(f64, f64, Option<u64>)> {
                results
                    .iter()
                    .map(|(s, c)| {
                        let (m, b) = f(c);
                        (m, b, Some(*s))
                    })
                    .collect()
            };
        checks.push(CheckResult::reduce(
            "tau_pointwise",
            CheckMode::Assert,
            &data(&|c| (-c.excess, 0.0)),
            tol,
            false,
        ));
        checks.push(CheckResult::reduce(
            "gauss_nonnegative",
            CheckMode::Assert,
            &data(&|c| (c.gauss_gap_min, 0.0)),
            1e-12,
            false,
        ));
        checks.push(CheckResult::reduce(
            "ambient_mixed_curvature",
            CheckMode::Assert,
            &data(&|c| (1e-9 - c.ambient_gap, 1e-9)),
            tol,
            false,
        ));
        checks.push(CheckResult::reduce(
            "tau_total",
            CheckMode::Assert,
            &data(&|c| (summary.tau_bound - c.tau, summary.tau_bound)),
            tol,
            false,
        ));
        tau_sampled_max = Some(
            results
                .iter()
                .map(|(_, c)| c.tau)
                .fold(f64::NEG_INFINITY, f64::max),
        );
    }
    let details = SubmersionDetails {
        summary,
        tau_sampled_max,
    };
    Ok(VerificationReport::new(
        "submersion",
        echo(cfg),
        checks,
        details,
        started,
    ))
}

// ---------------------------------------------------------------- all

#[derive(Clone, Debug, Serialize)]
pub struct SectionStatus {
    pub command: String,
    pub status: Status,
    pub checks: Vec<CheckResult>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AllDetails {
    pub sections: Vec<SectionStatus>,
}

fn section<T: Serialize>(name: &str, r: VerificationReport<T>) -> SectionStatus {
    SectionStatus {
        command: format!("{} ({name})", r.command),
        status: r.status,
        checks: r.checks,
    }
}

/// Every campaign for the configured space, plus the fibrations over
/// `CP^n` and `HP^n` associated with the first factor.
pub fn run_all(cfg: &CampaignConfig) -> Result<VerificationReport<AllDetails>> {
    cfg.validate()?;
    let started = Instant::now();
    let search = cfg.frame_search();
    let mut sections = Vec::new();
    for (name, factor) in [
        ("factor1", cfg.space_spec.factor1),
        ("factor2", cfg.space_spec.factor2),
    ] {
        let sc = SpaceConfig { factor, search };
        sections.push(section(name, run_space(&sc, cfg.tol)?));
    }
    let space = cfg.space_spec.build(&search)?;
    sections.push(section("product", run_constants(cfg)?));
    let quiet = CampaignConfig {
        record_samples: false,
        ..cfg.clone()
    };
    if space.sphere_curvature().is_some() {
        sections.push(section(
            "product",
            run_simons_on(&space, &quiet, Instant::now())?,
        ));
    }
    sections.push(section("product", run_triple_suite(&quiet)?));
    let cpn_n = match space.factor1().kind() {
        PairKind::Sphere(p) if p % 2 == 1 => p.div_ceil(2) - 1,
        _ => 1,
    }
    .max(1);
    for (kind, n) in [(FibrationKind::Cpn, cpn_n), (FibrationKind::Hpn, 1)] {
        let sc = SubmersionConfig {
            samples: cfg.samples.min(1000),
            seed: cfg.seed,
            tol: cfg.tol,
            frame_samples: cfg.frame_samples,
            refine_steps: cfg.refine_steps,
            ..SubmersionConfig::new(kind, n)
        };
        let label = format!("{}:{n}", format!("{kind:?}").to_lowercase());
        sections.push(section(&label, run_submersion(&sc)?));
    }
    let checks: Vec<CheckResult> = sections
        .iter()
        .flat_map(|s| {
            s.checks.iter().map(move |c| CheckResult {
                name: format!("{}/{}", s.command, c.name),
                distribution: None,
                ..c.clone()
            })
        })
        .collect();
    Ok(VerificationReport::new(
        "all",
        echo(cfg),
        checks,
        AllDetails { sections },
        started,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(spec: &str) -> CampaignConfig {
        CampaignConfig {
            samples: 40,
            frame_samples: 16,
            seed: 3,
            ..CampaignConfig::new(spec.parse().unwrap())
        }
    }

    #[test]
    fn parses_specs() {
        let s: SpaceSpec = "sphere:4xcpn:2".parse().unwrap();
        assert_eq!(
            s.factor1,
            FactorSpec {
                family: Family::Sphere,
                n: 4
            }
        );
        assert_eq!(s.factor2.family, Family::Cpn);
        assert!("sphere4".parse::<FactorSpec>().is_err());
        assert!("torus:2".parse::<FactorSpec>().is_err());
        assert_eq!(s.factor1.to_string(), "sphere:4");
    }

    #[test]
    fn config_errors_name_the_field() {
        let err = CampaignConfig::from_json(r#"{"space_spec": {"factor1": {"family": "sphere", "n": 3}, "factor2": {"family": "sphere", "n": 3}}, "lambda_max": 1.5}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("lambda_max"), "{err}");
        let err = CampaignConfig::from_json(
            r#"{"space_spec": {"factor1": {"family": "sphere", "n": 3}}}"#,
        )
        .unwrap_err()
        .to_string();
        assert!(err.contains("factor2"), "{err}");
        let err = CampaignConfig::from_json(r#"{"space_spec": {"factor1": {"family": "so", "n": 3}, "factor2": {"family": "sp", "n": 1}}, "samples": "many"}"#)
            .unwrap_err()
            .to_string();
        assert!(
            err.contains("samples") || err.contains("invalid type"),
            "{err}"
        );
    }

    #[test]
    fn simons_campaign_passes_and_is_deterministic() {
        let cfg = small("sphere:3xsphere:3");
        let a = run_simons(&cfg).unwrap();
        assert_eq!(a.status, Status::Pass, "{:#?}", a.checks);
        let b = run_simons(&cfg).unwrap();
        assert_eq!(a.payload_json().unwrap(), b.payload_json().unwrap());
        let seed = a.details.argmin_seed;
        let space = cfg.space_spec.build(&cfg.frame_search()).unwrap();
        let germ = simons::random_germ(&space, a.details.lambda_max, cfg.magnitude, seed).unwrap();
        let br = simons::simons_total(&space, &germ).unwrap();
        assert_eq!(br.margin, a.details.min_margin);
    }

    #[test]
    fn zero_germ_campaign() {
        let cfg = CampaignConfig {
            samples: 1,
            lambda_max: Some(0.0),
            magnitude: 0.0,
            seed: 7,
            frame_samples: 8,
            ..CampaignConfig::new("sphere:3xsphere:3".parse().unwrap())
        };
        let r = run_simons(&cfg).unwrap();
        assert_eq!(r.status, Status::Pass);
        let s = &r.details.samples.as_ref().unwrap()[0];
        assert_eq!((s.breakdown.total, s.breakdown.margin), (0.0, 0.0));
    }

    #[test]
    fn status_ordering() {
        let ok = CheckResult::residual("a", 0.0, 1.0, 1e-9);
        let mut finding = CheckResult::residual("b", 2.0, 1.0, 1e-9);
        finding.mode = CheckMode::Finding;
        let fail = CheckResult::residual("c", 2.0, 1.0, 1e-9);
        assert_eq!(overall_status(std::slice::from_ref(&ok)), Status::Pass);
        assert_eq!(
            overall_status(&[ok.clone(), finding.clone()]),
            Status::Finding
        );
        assert_eq!(overall_status(&[finding, fail]), Status::Fail);
        assert_eq!(Status::Finding.exit_code(), 3);
    }

    #[test]
    fn triple_suite_on_s2_s2() {
        let cfg = small("sphere:2xsphere:2");
        let r = run_triple_suite(&cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{:#?}", r.checks);
        let diag = r
            .details
            .instances
            .iter()
            .find(|i| i.name == "diagonal")
            .unwrap();
        assert_eq!(diag.report.envelope_dim, Some(3));
    }

    #[test]
    fn submersion_campaign() {
        let cfg = SubmersionConfig {
            samples: 30,
            frame_samples: 16,
            ..SubmersionConfig::new(FibrationKind::Cpn, 2)
        };
        let r = run_submersion(&cfg).unwrap();
        assert_eq!(r.status, Status::Pass, "{:#?}", r.checks);
    }
}
