//! Spec files, the example zoo, suite orchestration, and JSON reports.

pub mod courant;
pub mod zoo;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::bihermitian::{
    four_dim_suite, gk_integrability_residual, identity_suite, normalized_gauge, validate_at_load,
    validate_quadruple, Quadruple,
};
use crate::eigendist::{eigendist_suite, theorem_scenario, Scenario};
use crate::error::{Error, Result};
use crate::patch::{EndoField, ExprMatrix, MetricField, Patch, SamplePlan, TwoFormField};
use crate::residual::Outcome;
use crate::tol::Tolerances;

use courant::{courant_suite, sections_suite, BracketRecord, SectionsFile};

/// Default number of pointwise samples for the four-dimensional
/// equivalences when a spec does not configure the sampler.
pub const DEFAULT_POINTWISE_COUNT: usize = 1000;

/// Tolerance for the structural invariants checked when a spec is loaded.
pub const LOAD_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointwiseSampler {
    pub count: usize,
    pub seed: u64,
}

/// Contents of a spec file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ManifoldSpec {
    pub dim: usize,
    pub coords: Vec<String>,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    pub metric: Vec<Vec<String>>,
    pub b: Vec<Vec<String>>,
    pub jplus: Vec<Vec<String>>,
    pub jminus: Vec<Vec<String>>,
    pub domain: Vec<[f64; 2]>,
    #[serde(default)]
    pub sample_plan: SamplePlan,
    #[serde(default = "positive")]
    pub orientation: i8,
    #[serde(default)]
    pub declared_scenarios: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pointwise_sampler: Option<PointwiseSampler>,
}

fn positive() -> i8 {
    1
}

impl ManifoldSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Invalid(format!("spec file: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Parse every field; shapes, names and orientation are checked here.
    pub fn quadruple(&self) -> Result<Quadruple> {
        if self.coords.len() != self.dim {
            return Err(Error::Shape(format!("{} coordinate names for dim {}", self.coords.len(), self.dim)));
        }
        let names: BTreeSet<&String> = self.coords.iter().chain(self.parameters.keys()).collect();
        if names.len() != self.coords.len() + self.parameters.len() {
            return Err(Error::Invalid("coordinate and parameter names must be distinct".into()));
        }
        if let Some((k, v)) = self.parameters.iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Invalid(format!("parameter {k} = {v} is not finite")));
        }
        if self.orientation != 1 && self.orientation != -1 {
            return Err(Error::Invalid(format!("orientation must be 1 or -1, got {}", self.orientation)));
        }
        for s in &self.declared_scenarios {
            Suite::parse(s)?;
        }
        let m = |t: &Vec<Vec<String>>, what: &str| ExprMatrix::parse(t, &self.coords, &self.parameters, what);
        let patch = Patch::new(
            self.coords.clone(),
            self.domain.iter().map(|[a, b]| (*a, *b)).collect(),
            self.sample_plan.clone(),
        )?;
        Ok(Quadruple {
            patch,
            g: MetricField(m(&self.metric, "metric")?),
            b: TwoFormField(m(&self.b, "b")?),
            jplus: EndoField(m(&self.jplus, "jplus")?),
            jminus: EndoField(m(&self.jminus, "jminus")?),
            orientation: self.orientation,
        })
    }

    /// Parsed quadruple after the load-time invariants on the pre-grid.
    pub fn validated(&self) -> Result<Quadruple> {
        let q = self.quadruple()?;
        validate_at_load(&q, &q.patch.pre_grid(), LOAD_TOLERANCE)?;
        Ok(q)
    }
}

pub fn load_spec(path: &Path) -> Result<ManifoldSpec> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let spec = ManifoldSpec::from_json(&text)?;
    spec.validated()?;
    Ok(spec)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Validate,
    Gk,
    Identities,
    Gauge,
    Eigendist,
    Theorem,
    Fourdim,
    Courant,
    All,
}

impl Suite {
    pub const CONCRETE: [Suite; 8] = [
        Suite::Validate,
        Suite::Gk,
        Suite::Identities,
        Suite::Gauge,
        Suite::Eigendist,
        Suite::Theorem,
        Suite::Fourdim,
        Suite::Courant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Validate => "validate",
            Suite::Gk => "gk",
            Suite::Identities => "identities",
            Suite::Gauge => "gauge",
            Suite::Eigendist => "eigendist",
            Suite::Theorem => "theorem",
            Suite::Fourdim => "fourdim",
            Suite::Courant => "courant",
            Suite::All => "all",
        }
    }

    pub fn parse(s: &str) -> Result<Suite> {
        Suite::CONCRETE
            .iter()
            .chain(&[Suite::All])
            .copied()
            .find(|x| x.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Suite::CONCRETE.iter().map(|x| x.name()).collect();
                Error::Invalid(format!("unknown suite '{s}' (expected one of {names:?} or all)"))
            })
    }
}

/// Command-line overrides applied on top of a spec.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    /// Uniform identity tolerance.
    pub tol: Option<f64>,
    pub grid: Option<usize>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn tolerances(&self) -> Tolerances {
        match self.tol {
            Some(t) => Tolerances::default().with_uniform(t),
            None => Tolerances::default(),
        }
    }

    pub fn apply(&self, spec: &ManifoldSpec) -> ManifoldSpec {
        let mut s = spec.clone();
        if let Some(g) = self.grid {
            s.sample_plan.grid = g;
        }
        if let Some(seed) = self.seed {
            s.sample_plan.seed = seed;
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportMeta {
    pub toolkit: String,
    pub version: String,
    pub suite: String,
    pub seed: u64,
    pub grid: usize,
    pub random: usize,
    pub points: usize,
    pub tolerances: Tolerances,
    /// Seconds since the Unix epoch; the only field that varies between
    /// identical runs.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CheckRecord {
    pub check_name: String,
    /// The identity tested, written as a formula.
    pub paper_ref: String,
    /// `null` when the residual is not a number.
    pub max_residual: Option<f64>,
    pub argmax_point: Vec<f64>,
    pub tolerance: f64,
    pub pass: bool,
    pub gating: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SkipRecord {
    pub check_name: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioRecord {
    pub verdict: String,
    pub invertible_sum: bool,
    pub invertible_difference: bool,
    pub dimension_hypothesis: bool,
    #[serde(rename = "conditionI")]
    pub condition_i: bool,
    #[serde(rename = "conditionII")]
    pub condition_ii: bool,
    #[serde(rename = "conditionIISums")]
    pub condition_ii_sums: bool,
}

impl From<&Scenario> for ScenarioRecord {
    fn from(s: &Scenario) -> Self {
        ScenarioRecord {
            verdict: s.verdict.as_str().to_string(),
            invertible_sum: s.invertible_sum,
            invertible_difference: s.invertible_difference,
            dimension_hypothesis: s.dimension_hypothesis,
            condition_i: s.condition_i,
            condition_ii: s.condition_ii,
            condition_ii_sums: s.condition_ii_sums,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Report {
    pub meta: ReportMeta,
    pub checks: Vec<CheckRecord>,
    pub skipped: Vec<SkipRecord>,
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<ScenarioRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub brackets: Vec<BracketRecord>,
    /// All gating checks pass.
    pub pass: bool,
}

impl Report {
    fn assemble(meta: ReportMeta, outcome: Outcome, scenario: Option<ScenarioRecord>, brackets: Vec<BracketRecord>) -> Self {
        let pass = outcome.all_gating_pass();
        Report {
            meta,
            checks: outcome
                .checks
                .iter()
                .map(|c| CheckRecord {
                    check_name: c.name.clone(),
                    paper_ref: c.reference.clone(),
                    max_residual: c.residual.max.is_finite().then_some(c.residual.max),
                    argmax_point: c.residual.argmax.clone(),
                    tolerance: c.tolerance,
                    pass: c.pass(),
                    gating: c.gating,
                })
                .collect(),
            skipped: outcome
                .skipped
                .into_iter()
                .map(|s| SkipRecord { check_name: s.name, reason: s.reason })
                .collect(),
            notes: outcome.notes,
            scenario,
            brackets,
            pass,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check_name == name)
    }

    pub fn exit_code(&self) -> i32 {
        if self.pass {
            0
        } else {
            1
        }
    }
}

fn meta(q: &Quadruple, suite: &str, points: usize, tol: &Tolerances) -> ReportMeta {
    ReportMeta {
        toolkit: "gkv".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        suite: suite.into(),
        seed: q.patch.plan.seed,
        grid: q.patch.plan.grid,
        random: q.patch.plan.random,
        points,
        tolerances: *tol,
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
    }
}

/// Suites executed for `suite`; `all` means the declared scenarios, or every
/// suite applicable to the dimension when none are declared.
pub fn expand_suite(spec: &ManifoldSpec, suite: Suite) -> Result<Vec<Suite>> {
    if suite != Suite::All {
        return Ok(vec![suite]);
    }
    let mut v: Vec<Suite> = if spec.declared_scenarios.is_empty() {
        Suite::CONCRETE.iter().copied().filter(|s| *s != Suite::Fourdim || spec.dim == 4).collect()
    } else {
        spec.declared_scenarios.iter().map(|s| Suite::parse(s)).collect::<Result<_>>()?
    };
    v.retain(|s| *s != Suite::All);
    v.sort();
    v.dedup();
    Ok(v)
}

/// Run one suite (or `all`) over the spec's sample plan.
pub fn run_suite(spec: &ManifoldSpec, suite: Suite, config: &RunConfig) -> Result<Report> {
    let spec = config.apply(spec);
    let q = spec.validated()?;
    let tol = config.tolerances();
    let points = q.sample_points();
    let mut outcome = Outcome::default();
    let mut scenario = None;
    for s in expand_suite(&spec, suite)? {
        let part = match s {
            Suite::Validate => validate_quadruple(&q, &points, &tol)?,
            Suite::Gk => gk_integrability_residual(&q, &points, &tol)?,
            Suite::Identities => identity_suite(&q, &points, &tol)?,
            Suite::Gauge => normalized_gauge(&q, &points, &tol)?,
            Suite::Eigendist => eigendist_suite(&q, &points, &tol)?.0,
            Suite::Theorem => {
                let (o, sc) = theorem_scenario(&q, &points, &tol)?;
                scenario = Some(ScenarioRecord::from(&sc));
                o
            }
            Suite::Fourdim => {
                let ps = spec.pointwise_sampler.unwrap_or(PointwiseSampler {
                    count: DEFAULT_POINTWISE_COUNT,
                    seed: spec.sample_plan.seed,
                });
                four_dim_suite(&q, &points, &tol, (ps.seed, ps.count))?
            }
            Suite::Courant => courant_suite(&q, &points, &tol, spec.sample_plan.seed)?,
            Suite::All => unreachable!("expanded"),
        };
        outcome.extend(part);
    }
    debug_assert_eq!(
        outcome.checks.iter().map(|c| &c.name).collect::<BTreeSet<_>>().len(),
        outcome.checks.len(),
        "check names are unique"
    );
    Ok(Report::assemble(meta(&q, suite.name(), points.len(), &tol), outcome, scenario, Vec::new()))
}

/// Courant brackets of the section pairs in a sections file.
pub fn run_sections(spec: &ManifoldSpec, sections: &SectionsFile, config: &RunConfig) -> Result<Report> {
    let spec = config.apply(spec);
    let q = spec.validated()?;
    let tol = config.tolerances();
    let points = q.sample_points();
    let pairs = sections
        .iter()
        .map(|[u, v]| Ok((u.parse(&spec.coords, &spec.parameters)?, v.parse(&spec.coords, &spec.parameters)?)))
        .collect::<Result<Vec<_>>>()?;
    let (outcome, brackets) = sections_suite(&q, &pairs, &points, &tol)?;
    Ok(Report::assemble(meta(&q, "courant-sections", points.len(), &tol), outcome, None, brackets))
}

pub fn parse_sections(text: &str) -> Result<SectionsFile> {
    serde_json::from_str(text).map_err(|e| Error::Invalid(format!("sections file: {e}")))
}

/// Worker pool sized by `GKV_WORKERS` when set.
pub fn worker_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("GKV_WORKERS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Invalid(format!("GKV_WORKERS must be a positive integer, got '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| Error::Invalid(format!("worker pool: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_round_trip_and_shape_errors() {
        let s = zoo::generate("Z1", &BTreeMap::new()).unwrap();
        let back = ManifoldSpec::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
        let mut bad = s.clone();
        bad.metric[0].push("0".into());
        assert!(matches!(bad.quadruple(), Err(Error::Shape(_))));
        let text = s.to_json().replace("\"dim\"", "\"dimension\"");
        assert!(ManifoldSpec::from_json(&text).is_err());
    }

    #[test]
    fn load_time_domain_error() {
        let mut s = zoo::generate("Z1", &BTreeMap::new()).unwrap();
        s.metric[0][0] = "1 + log(x1)".into();
        assert!(matches!(s.validated(), Err(Error::Domain { .. })));
    }

    #[test]
    fn suite_names() {
        assert_eq!(Suite::parse("theorem").unwrap(), Suite::Theorem);
        assert!(Suite::parse("nope").is_err());
        let s = zoo::generate("Z3", &BTreeMap::new()).unwrap();
        assert!(!expand_suite(&s, Suite::All).unwrap().contains(&Suite::Fourdim));
    }
}
