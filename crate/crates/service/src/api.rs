//! Request bodies and the engine calls behind each endpoint.
//!
//! Every function here is a thin translation between request documents and
//! library calls; the handlers in `lib.rs` only add routing and status codes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use sedmap_core::analysis::{influence_report, stability_report, stabilize_search, transitive_closure};
use sedmap_core::dynamics::simulate;
use sedmap_core::format::{baseline_state, dense_schedule, FormatError, ScenarioDoc, TargetDoc, TrajectoryDocument};
use sedmap_core::map::FactorId;
use sedmap_core::report::{
    AnalysisDocument, InversionDocument, RankingDocument, ScenarioResultDocument, StabilizationDocument,
};
use sedmap_core::scenario::{compare_scenarios, invert_scenario, run_scenario};
use sedmap_core::{CognitiveMap, Error, ValidationReport};

pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SimulateRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    /// Step → factor → injected gain.
    #[serde(default)]
    pub schedule: BTreeMap<String, BTreeMap<String, f64>>,
    pub horizon: usize,
    #[serde(default)]
    pub clamp: bool,
    /// Baseline levels; absent factors start at 0.
    #[serde(default)]
    pub baseline: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AnalyzeRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StabilizeRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Edges as `source->target`.
    #[serde(default)]
    pub locked: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RunRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    pub scenario: ScenarioDoc,
    #[serde(default)]
    pub baseline: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct CompareRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    pub scenarios: Vec<ScenarioDoc>,
    pub target: TargetDoc,
    #[serde(default)]
    pub baseline: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InvertRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format_version: Option<String>,
    pub controls: Vec<String>,
    pub target: TargetDoc,
    #[serde(default)]
    pub ridge: f64,
    #[serde(default)]
    pub baseline: BTreeMap<String, f64>,
}

/// Engine failure, before it is mapped onto an HTTP status.
#[derive(Debug)]
pub enum Failure {
    BadRequest(String),
    Invalid(ValidationReport),
    Engine(Error),
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        match e {
            FormatError::Invalid(r) => Failure::Invalid(r),
            FormatError::Model(e) => Failure::Engine(e),
            other => Failure::BadRequest(other.to_string()),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidMap(r) => Failure::Invalid(r),
            other => Failure::Engine(other),
        }
    }
}

pub fn parse_edge(key: &str) -> Result<(FactorId, FactorId), Failure> {
    match key.split_once("->") {
        Some((s, t)) if !s.is_empty() && !t.is_empty() => Ok((s.trim().into(), t.trim().into())),
        _ => Err(Failure::BadRequest(format!("edge `{key}` is not of the form source->target"))),
    }
}

pub fn run_simulate(map: &CognitiveMap, req: &SimulateRequest) -> Result<TrajectoryDocument, Failure> {
    let base = baseline_state(map, &req.baseline)?;
    let schedule = dense_schedule(map, &req.schedule)?;
    let tr = simulate(map, &base, &schedule, req.horizon, req.clamp)?;
    Ok(TrajectoryDocument::new(map, &tr))
}

pub fn run_analyze(map: &CognitiveMap, req: &AnalyzeRequest) -> Result<AnalysisDocument, Failure> {
    let stability = stability_report(map, req.tol.unwrap_or(DEFAULT_TOL))?;
    let closure = transitive_closure(map);
    let influence = influence_report(&closure)?;
    Ok(AnalysisDocument::new(map, &closure, &influence, &stability))
}

pub fn run_stabilize(map: &CognitiveMap, req: &StabilizeRequest) -> Result<StabilizationDocument, Failure> {
    let locked = req.locked.iter().map(|k| parse_edge(k)).collect::<Result<Vec<_>, _>>()?;
    let plan = stabilize_search(map, &locked, req.tol.unwrap_or(DEFAULT_TOL))?;
    Ok(StabilizationDocument::new(&plan))
}

pub fn run_run(map: &CognitiveMap, req: &RunRequest) -> Result<ScenarioResultDocument, Failure> {
    let base = baseline_state(map, &req.baseline)?;
    let scenario = req.scenario.to_scenario()?;
    let result = run_scenario(map, &base, &scenario)?;
    Ok(ScenarioResultDocument::new(map, &scenario.name, &result))
}

pub fn run_compare(map: &CognitiveMap, req: &CompareRequest) -> Result<RankingDocument, Failure> {
    let base = baseline_state(map, &req.baseline)?;
    let scenarios = req.scenarios.iter().map(ScenarioDoc::to_scenario).collect::<Result<Vec<_>, _>>()?;
    let spec = req.target.to_spec();
    let ranked = compare_scenarios(map, &base, &scenarios, &spec)?;
    Ok(RankingDocument::new(&req.target.factor, spec.desired_delta, &ranked))
}

pub fn run_invert(map: &CognitiveMap, req: &InvertRequest) -> Result<InversionDocument, Failure> {
    let base = baseline_state(map, &req.baseline)?;
    let controls: Vec<FactorId> = req.controls.iter().map(|c| FactorId::new(c.clone())).collect();
    let spec = req.target.to_spec();
    let inv = invert_scenario(map, &base, &controls, &spec, req.ridge)?;
    Ok(InversionDocument::new(&req.target.factor, spec.desired_delta, &inv))
}
