//! File formats: map, scenario and registry documents (JSON, version
//! `fcm/1`), indicator series and trajectory tables (CSV).
//!
//! Map and scenario documents and trajectory tables carry at most 12
//! significant digits; report and trajectory documents keep full precision.
//! Documents are written with a fixed key order so identical inputs give
//! identical bytes.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{ImpulseSchedule, ImpulseVector, StateVector, Trajectory};
use crate::error::Error;
use crate::knowledge::{
    IndicatorTemplate, KnowledgeError, MunicipalityType, PopulationClass, SemanticNetwork, Triple, TypologyRegistry,
};
use crate::map::{
    build_map, validate_map, CognitiveMap, Factor, FactorId, FactorKind, MapMetadata, ValidationReport,
    WeightedEdge,
};
use crate::scalar::Scalar;
use crate::scenario::{Scenario, TargetSpec};

pub const FORMAT_VERSION: &str = "fcm/1";

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unsupported version `{0}` (expected `fcm/1`)")]
    UnsupportedVersion(String),
    #[error("schema violation at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("invalid map: {0}")]
    Invalid(ValidationReport),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("indicator series: {0}")]
    Indicators(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    let r: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// Decimal rendering used in tables.
pub fn format_number(x: f64) -> String {
    format!("{}", round_sig(x))
}

fn rounded<S: Scalar>(x: S) -> f64 {
    round_sig(x.to_f64_lossy())
}

fn scalar<S: Scalar>(x: f64) -> S {
    S::from_f64(x).unwrap_or_else(S::nan)
}

/// Parses JSON, checks `formatVersion`, then decodes into `T` with field paths in errors.
pub fn parse_document<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, FormatError> {
    let value: serde_json::Value = serde_json::from_slice(bytes).map_err(|e| FormatError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    match value.get("formatVersion") {
        Some(serde_json::Value::String(v)) if v == FORMAT_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(FormatError::UnsupportedVersion(v.clone())),
        Some(_) => {
            return Err(FormatError::Schema { path: "formatVersion".into(), message: "expected a string".into() })
        }
        None => return Err(FormatError::Schema { path: "formatVersion".into(), message: "missing field".into() }),
    }
    serde_path_to_error::deserialize(value).map_err(|e| FormatError::Schema {
        path: e.path().to_string(),
        message: e.inner().to_string(),
    })
}

/// Pretty JSON with a trailing newline.
pub fn render_document<T: Serialize>(doc: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(doc).expect("document serializes");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MetadataDoc {
    pub name: String,
    #[serde(default)]
    pub version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub municipality_type: Option<MunicipalityType>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorDoc {
    pub id: String,
    pub name: String,
    pub kind: FactorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub source: String,
    pub target: String,
    pub weight: f64,
}

/// On-disk form of a cognitive map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MapDocument {
    pub format_version: String,
    pub metadata: MetadataDoc,
    pub factors: Vec<FactorDoc>,
    #[serde(default)]
    pub edges: Vec<EdgeDoc>,
}

impl MapDocument {
    pub fn from_map<S: Scalar>(map: &CognitiveMap<S>) -> Self {
        let meta = map.metadata();
        Self {
            format_version: FORMAT_VERSION.into(),
            metadata: MetadataDoc {
                name: meta.name.clone(),
                version: meta.version.clone(),
                municipality_type: meta.municipality_type.clone(),
            },
            factors: map
                .factors()
                .iter()
                .map(|f| FactorDoc {
                    id: f.id.to_string(),
                    name: f.name.clone(),
                    kind: f.kind,
                    parent: f.parent.as_ref().map(ToString::to_string),
                })
                .collect(),
            edges: map
                .edges()
                .iter()
                .map(|e| EdgeDoc { source: e.source.to_string(), target: e.target.to_string(), weight: rounded(e.weight) })
                .collect(),
        }
    }

    pub fn parts<S: Scalar>(&self) -> (Vec<Factor>, Vec<WeightedEdge<S>>, MapMetadata) {
        let factors = self
            .factors
            .iter()
            .map(|f| Factor {
                id: FactorId::new(f.id.clone()),
                name: f.name.clone(),
                kind: f.kind,
                parent: f.parent.clone().map(FactorId::new),
            })
            .collect();
        let edges =
            self.edges.iter().map(|e| WeightedEdge::new(e.source.clone(), e.target.clone(), scalar(e.weight))).collect();
        let metadata = MapMetadata {
            name: self.metadata.name.clone(),
            version: self.metadata.version.clone(),
            municipality_type: self.metadata.municipality_type.clone(),
        };
        (factors, edges, metadata)
    }

    /// All map-invariant violations of the document.
    pub fn validate(&self) -> ValidationReport {
        let (factors, edges, _) = self.parts::<f64>();
        validate_map(&factors, &edges)
    }

    pub fn to_map<S: Scalar>(&self) -> Result<CognitiveMap<S>, FormatError> {
        for (i, e) in self.edges.iter().enumerate() {
            if !(-1.0..=1.0).contains(&e.weight) {
                return Err(FormatError::Schema {
                    path: format!("edges[{i}].weight"),
                    message: format!("weight outside [−1,1]: {}", e.weight),
                });
            }
        }
        let (factors, edges, metadata) = self.parts();
        build_map(factors, edges, metadata).map_err(|e| match e {
            Error::InvalidMap(report) => FormatError::Invalid(report),
            other => FormatError::Model(other),
        })
    }
}

pub fn load_map<S: Scalar>(bytes: &[u8]) -> Result<CognitiveMap<S>, FormatError> {
    parse_document::<MapDocument>(bytes)?.to_map()
}

pub fn save_map<S: Scalar>(map: &CognitiveMap<S>) -> Vec<u8> {
    render_document(&MapDocument::from_map(map))
}

/// Replaces `path` in one step: write a sibling temp file, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Indicator series

/// One row of an indicator series file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorRow {
    pub municipality: String,
    pub factor: String,
    pub period: String,
    pub value: f64,
    pub min: f64,
    pub max: f64,
}

/// CSV with header `municipality,factor,period,value,min,max`.
pub fn parse_indicator_series(bytes: &[u8]) -> Result<Vec<IndicatorRow>, FormatError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    reader
        .deserialize()
        .enumerate()
        .map(|(i, r)| r.map_err(|e| FormatError::Indicators(format!("row {}: {e}", i + 1))))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct IngestOptions {
    /// Level for factors without a row.
    pub default_level: f64,
    pub defaults: BTreeMap<FactorId, f64>,
    /// Restrict to one municipality's rows.
    pub municipality: Option<String>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        Self { default_level: 0.5, defaults: BTreeMap::new(), municipality: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ingestion<S> {
    pub state: StateVector<S>,
    pub warnings: Vec<String>,
}

/// Min-max normalizes one period of indicator rows into a baseline state.
pub fn ingest_indicators<S: Scalar>(
    rows: &[IndicatorRow],
    map: &CognitiveMap<S>,
    period: &str,
    options: &IngestOptions,
) -> Result<Ingestion<S>, FormatError> {
    let mut found: Vec<Option<&IndicatorRow>> = vec![None; map.len()];
    let mut warnings = Vec::new();
    let selected = rows.iter().filter(|r| {
        r.period == period && options.municipality.as_ref().is_none_or(|m| &r.municipality == m)
    });
    for row in selected {
        let Some(i) = map.index_of(&FactorId::new(row.factor.clone())) else {
            warnings.push(format!("factor `{}` is not in the map; row ignored", row.factor));
            continue;
        };
        if row.min.is_nan() || row.max.is_nan() || row.max <= row.min {
            return Err(FormatError::Indicators(format!(
                "factor `{}` period `{period}`: max {} ≤ min {}",
                row.factor, row.max, row.min
            )));
        }
        if found[i].is_some() {
            return Err(FormatError::Indicators(format!(
                "duplicate row for factor `{}` period `{period}`",
                row.factor
            )));
        }
        found[i] = Some(row);
    }

    let mut state = Vec::with_capacity(map.len());
    for (f, row) in map.factors().iter().zip(found) {
        let level = match row {
            Some(r) => {
                let mut v = r.value;
                if v < r.min || v > r.max {
                    warnings.push(format!(
                        "factor `{}` value {} outside [{}, {}]; clipped",
                        f.id, r.value, r.min, r.max
                    ));
                    v = v.clamp(r.min, r.max);
                }
                (v - r.min) / (r.max - r.min)
            }
            None => *options.defaults.get(&f.id).unwrap_or(&options.default_level),
        };
        state.push(scalar(level));
    }
    Ok(Ingestion { state: StateVector(state), warnings })
}

// ---------------------------------------------------------------------------
// Trajectories

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    /// CSV: `t,<factor>...` then Y per step.
    Tabular,
    /// JSON with both Y and O series.
    Document,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TrajectoryDocument {
    pub format_version: String,
    pub factors: Vec<String>,
    pub horizon: usize,
    pub states: Vec<Vec<f64>>,
    pub impulses: Vec<Vec<f64>>,
}

impl TrajectoryDocument {
    pub fn new<S: Scalar>(map: &CognitiveMap<S>, trajectory: &Trajectory<S>) -> Self {
        let rows = |vs: Vec<&[S]>| vs.into_iter().map(|v| v.iter().map(|&x| x.to_f64_lossy() + 0.0).collect()).collect();
        Self {
            format_version: FORMAT_VERSION.into(),
            factors: map.factors().iter().map(|f| f.id.to_string()).collect(),
            horizon: trajectory.horizon,
            states: rows(trajectory.states.iter().map(|s| s.as_slice()).collect()),
            impulses: rows(trajectory.impulses.iter().map(|s| s.as_slice()).collect()),
        }
    }

    /// Column of `factor` in the Y series.
    pub fn state_column(&self, factor: &str) -> Option<Vec<f64>> {
        let i = self.factors.iter().position(|f| f == factor)?;
        Some(self.states.iter().map(|row| row[i]).collect())
    }
}

pub fn export_trajectory<S: Scalar>(map: &CognitiveMap<S>, trajectory: &Trajectory<S>, format: ExportFormat) -> Vec<u8> {
    match format {
        ExportFormat::Document => render_document(&TrajectoryDocument::new(map, trajectory)),
        ExportFormat::Tabular => {
            let mut out = String::from("t");
            for f in map.factors() {
                out.push(',');
                out.push_str(f.id.as_str());
            }
            out.push('\n');
            for (t, y) in trajectory.states.iter().enumerate() {
                out.push_str(&t.to_string());
                for &v in y.as_slice() {
                    out.push(',');
                    out.push_str(&format_number(v.to_f64_lossy()));
                }
                out.push('\n');
            }
            out.into_bytes()
        }
    }
}

// ---------------------------------------------------------------------------
// Scenarios

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioDoc {
    pub name: String,
    pub controls: Vec<String>,
    pub horizon: usize,
    #[serde(default)]
    pub clamp: bool,
    /// Step (as a decimal string) → factor → gain.
    #[serde(default)]
    pub schedule: BTreeMap<String, BTreeMap<String, f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TargetDoc {
    pub factor: String,
    pub desired_delta: f64,
    pub horizon: usize,
}

/// Scenario file: scenarios plus optional target, controls, ridge and baseline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ScenarioFile {
    pub format_version: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub baseline: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub controls: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ridge: Option<f64>,
    #[serde(default)]
    pub scenarios: Vec<ScenarioDoc>,
}

pub fn parse_step(step: &str) -> Result<usize, FormatError> {
    step.parse().map_err(|_| FormatError::Schema {
        path: format!("schedule.{step}"),
        message: "step must be a non-negative integer".into(),
    })
}

impl ScenarioDoc {
    pub fn to_scenario<S: Scalar>(&self) -> Result<Scenario<S>, FormatError> {
        let mut schedule = BTreeMap::new();
        for (step, entries) in &self.schedule {
            let step = parse_step(step)?;
            let row: BTreeMap<FactorId, S> =
                entries.iter().map(|(f, &v)| (FactorId::new(f.clone()), scalar(v))).collect();
            schedule.insert(step, row);
        }
        Ok(Scenario {
            name: self.name.clone(),
            controls: self.controls.iter().map(|c| FactorId::new(c.clone())).collect(),
            schedule,
            horizon: self.horizon,
            clamp: self.clamp,
        })
    }

    pub fn from_scenario<S: Scalar>(s: &Scenario<S>) -> Self {
        Self {
            name: s.name.clone(),
            controls: s.controls.iter().map(ToString::to_string).collect(),
            horizon: s.horizon,
            clamp: s.clamp,
            schedule: s
                .schedule
                .iter()
                .map(|(k, row)| (k.to_string(), row.iter().map(|(f, &v)| (f.to_string(), rounded(v))).collect()))
                .collect(),
        }
    }
}

impl TargetDoc {
    pub fn to_spec<S: Scalar>(&self) -> TargetSpec<S> {
        TargetSpec { target: FactorId::new(self.factor.clone()), desired_delta: scalar(self.desired_delta), horizon: self.horizon }
    }
}

/// Dense baseline from a sparse factor → level table; absent factors are 0.
pub fn baseline_state<S: Scalar>(
    map: &CognitiveMap<S>,
    levels: &BTreeMap<String, f64>,
) -> Result<StateVector<S>, FormatError> {
    let mut y = StateVector::zeros(map.len());
    for (f, &v) in levels {
        let i = map
            .index_of(&FactorId::new(f.clone()))
            .ok_or_else(|| FormatError::Model(Error::UnknownFactor(FactorId::new(f.clone()))))?;
        y.0[i] = scalar(v);
    }
    Ok(y)
}

/// Dense schedule from step → factor → gain.
pub fn dense_schedule<S: Scalar>(
    map: &CognitiveMap<S>,
    sparse: &BTreeMap<String, BTreeMap<String, f64>>,
) -> Result<ImpulseSchedule<S>, FormatError> {
    let mut out = ImpulseSchedule::new();
    for (step, row) in sparse {
        let step = parse_step(step)?;
        let mut o = ImpulseVector::zeros(map.len());
        for (f, &v) in row {
            let i = map
                .index_of(&FactorId::new(f.clone()))
                .ok_or_else(|| FormatError::Model(Error::UnknownFactor(FactorId::new(f.clone()))))?;
            o.0[i] = scalar(v);
        }
        out.insert(step, o);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Registry

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct OverrideDoc {
    #[serde(rename = "type")]
    pub municipality_type: MunicipalityType,
    pub indicators: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct IndicatorsDoc {
    pub general: BTreeSet<String>,
    #[serde(default)]
    pub special: BTreeMap<String, BTreeSet<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overrides: Vec<OverrideDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub nodes: Vec<String>,
    pub edges: Vec<Triple>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct RegistryDocument {
    pub format_version: String,
    pub climate_zones: Vec<String>,
    pub population_classes: Vec<PopulationClass>,
    pub specializations: Vec<String>,
    /// Omitted means every combination is supported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub supported: Option<Vec<MunicipalityType>>,
    pub indicators: IndicatorsDoc,
    pub semantic_network: NetworkDoc,
}

/// Typology, indicator template and semantic network loaded together.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeBase {
    pub registry: TypologyRegistry,
    pub template: IndicatorTemplate,
    pub network: SemanticNetwork,
}

impl KnowledgeBase {
    pub fn bundled() -> Self {
        Self {
            registry: crate::fixtures::registry(),
            template: crate::fixtures::indicator_template(),
            network: crate::fixtures::semantic_network(),
        }
    }
}

impl RegistryDocument {
    pub fn to_knowledge(&self) -> Result<KnowledgeBase, FormatError> {
        let registry = TypologyRegistry::new(
            self.climate_zones.clone(),
            self.population_classes.clone(),
            self.specializations.clone(),
            self.supported.clone().map(|v| v.into_iter().collect()),
        )?;
        let template = IndicatorTemplate {
            general: self.indicators.general.clone(),
            special: self.indicators.special.clone(),
            overrides: self
                .indicators
                .overrides
                .iter()
                .map(|o| (o.municipality_type.clone(), o.indicators.clone()))
                .collect(),
        };
        template.validate()?;
        let network = SemanticNetwork::new(self.semantic_network.nodes.clone(), self.semantic_network.edges.clone())?;
        Ok(KnowledgeBase { registry, template, network })
    }

    pub fn from_knowledge(kb: &KnowledgeBase) -> Self {
        let all: BTreeSet<MunicipalityType> = {
            let r = &kb.registry;
            let mut s = BTreeSet::new();
            for k in r.climate_zones() {
                for p in r.population_classes() {
                    for a in r.specializations() {
                        s.insert(MunicipalityType::new(k, &p.label, a));
                    }
                }
            }
            s
        };
        let supported = (kb.registry.supported() != &all).then(|| kb.registry.supported().iter().cloned().collect());
        Self {
            format_version: FORMAT_VERSION.into(),
            climate_zones: kb.registry.climate_zones().to_vec(),
            population_classes: kb.registry.population_classes().to_vec(),
            specializations: kb.registry.specializations().to_vec(),
            supported,
            indicators: IndicatorsDoc {
                general: kb.template.general.clone(),
                special: kb.template.special.clone(),
                overrides: kb
                    .template
                    .overrides
                    .iter()
                    .map(|(t, ids)| OverrideDoc { municipality_type: t.clone(), indicators: ids.clone() })
                    .collect(),
            },
            semantic_network: NetworkDoc {
                nodes: kb.network.nodes().iter().cloned().collect(),
                edges: kb.network.triples().cloned().collect(),
            },
        }
    }
}

pub fn load_registry(bytes: &[u8]) -> Result<KnowledgeBase, FormatError> {
    parse_document::<RegistryDocument>(bytes)?.to_knowledge()
}

pub fn save_registry(kb: &KnowledgeBase) -> Vec<u8> {
    render_document(&RegistryDocument::from_knowledge(kb))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate;
    use crate::fixtures;

    #[test]
    fn chain_round_trip() {
        let m = fixtures::chain::<f64>();
        let bytes = save_map(&m);
        assert_eq!(load_map::<f64>(&bytes).unwrap(), m);
        assert_eq!(save_map(&m), bytes);
    }

    #[test]
    fn chain_document_text() {
        let text = String::from_utf8(save_map(&fixtures::chain::<f64>())).unwrap();
        assert!(text.starts_with("{\n  \"formatVersion\": \"fcm/1\",\n  \"metadata\""), "{text}");
        assert!(text.contains("\"weight\": 0.5"));
    }

    #[test]
    fn weight_outside_bounds_is_schema_violation() {
        let doc = br#"{"formatVersion":"fcm/1","metadata":{"name":"x"},
            "factors":[{"id":"a","name":"a","kind":"general"},{"id":"b","name":"b","kind":"general"}],
            "edges":[{"source":"a","target":"b","weight":1.5}]}"#;
        let err = load_map::<f64>(doc).unwrap_err();
        match &err {
            FormatError::Schema { path, message } => {
                assert_eq!(path, "edges[0].weight");
                assert!(message.contains("weight outside [−1,1]"));
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn unknown_version() {
        let doc = br#"{"formatVersion":"fcm/9","metadata":{"name":"x"},"factors":[]}"#;
        let err = load_map::<f64>(doc).unwrap_err();
        assert!(err.to_string().contains("unsupported version"));
    }

    #[test]
    fn parse_error_has_position() {
        let err = load_map::<f64>(b"{\n  \"formatVersion\": \"fcm/1\",\n  oops\n}").unwrap_err();
        match err {
            FormatError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn schema_error_names_field() {
        let doc = br#"{"formatVersion":"fcm/1","metadata":{"name":"x"},
            "factors":[{"id":"a","name":"a","kind":"boss"}]}"#;
        match load_map::<f64>(doc).unwrap_err() {
            FormatError::Schema { path, .. } => assert_eq!(path, "factors[0].kind"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn validation_violations_propagate() {
        let doc = br#"{"formatVersion":"fcm/1","metadata":{"name":"x"},
            "factors":[{"id":"a","name":"a","kind":"general"}],
            "edges":[{"source":"a","target":"ghost","weight":0.5}]}"#;
        match load_map::<f64>(doc).unwrap_err() {
            FormatError::Invalid(r) => assert_eq!(r.violations[0].code(), "dangling-endpoint"),
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn rounding_to_twelve_digits() {
        assert_eq!(round_sig(0.1 + 0.2), 0.3);
        assert_eq!(round_sig(-0.0), 0.0);
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0), "2");
        assert_eq!(round_sig(123_456_789.123_456_7), 123_456_789.123);
    }

    fn row(factor: &str, value: f64, min: f64, max: f64) -> IndicatorRow {
        IndicatorRow {
            municipality: "m1".into(),
            factor: factor.into(),
            period: "2020".into(),
            value,
            min,
            max,
        }
    }

    #[test]
    fn ingestion_anchors() {
        let m = fixtures::chain::<f64>();
        let opts = IngestOptions::default();
        let lo = ingest_indicators(&[row("q", 3.0, 3.0, 9.0)], &m, "2020", &opts).unwrap();
        assert_eq!(lo.state.0, vec![0.5, 0.0]);
        let hi = ingest_indicators(&[row("q", 9.0, 3.0, 9.0)], &m, "2020", &opts).unwrap();
        assert_eq!(hi.state.0[1], 1.0);
        let mid = ingest_indicators(&[row("q", 30_000.0, 10_000.0, 50_000.0)], &m, "2020", &opts).unwrap();
        assert_eq!(mid.state.0[1], 0.5);
    }

    #[test]
    fn ingestion_clips_with_warning() {
        let m = fixtures::chain::<f64>();
        let got = ingest_indicators(&[row("q", 12.0, 0.0, 10.0)], &m, "2020", &IngestOptions::default()).unwrap();
        assert_eq!(got.state.0[1], 1.0);
        assert_eq!(got.warnings.len(), 1);
    }

    #[test]
    fn ingestion_errors() {
        let m = fixtures::chain::<f64>();
        let opts = IngestOptions::default();
        assert!(ingest_indicators(&[row("q", 1.0, 5.0, 5.0)], &m, "2020", &opts).is_err());
        let dup = [row("q", 1.0, 0.0, 5.0), row("q", 2.0, 0.0, 5.0)];
        assert!(ingest_indicators(&dup, &m, "2020", &opts).unwrap_err().to_string().contains("duplicate"));
        // other periods are ignored, so no duplicate there
        let mut other = row("q", 2.0, 0.0, 5.0);
        other.period = "2021".into();
        assert!(ingest_indicators(&[row("q", 1.0, 0.0, 5.0), other], &m, "2020", &opts).is_ok());
    }

    #[test]
    fn ingestion_defaults() {
        let m = fixtures::chain::<f64>();
        let opts = IngestOptions {
            default_level: 0.25,
            defaults: BTreeMap::from([(FactorId::new("q"), 0.75)]),
            municipality: None,
        };
        assert_eq!(ingest_indicators(&[], &m, "2020", &opts).unwrap().state.0, vec![0.25, 0.75]);
    }

    #[test]
    fn indicator_csv() {
        let csv = "municipality,factor,period,value,min,max\nm1, q ,2020,30000,10000,50000\n";
        let rows = parse_indicator_series(csv.as_bytes()).unwrap();
        assert_eq!(rows, vec![row("q", 30_000.0, 10_000.0, 50_000.0)]);
        assert!(parse_indicator_series(b"municipality,factor\nm1\n").is_err());
    }

    fn chain_trajectory(horizon: usize) -> Trajectory<f64> {
        let m = fixtures::chain::<f64>();
        simulate(
            &m,
            &StateVector::zeros(2),
            &ImpulseSchedule::initial(ImpulseVector(vec![1.0, 0.0])),
            horizon,
            false,
        )
        .unwrap()
    }

    #[test]
    fn tabular_export() {
        let m = fixtures::chain::<f64>();
        let out = export_trajectory(&m, &chain_trajectory(2), ExportFormat::Tabular);
        assert_eq!(String::from_utf8(out).unwrap(), "t,p,q\n0,1,0\n1,1,0.5\n2,1,0.5\n");
        let single = export_trajectory(&m, &chain_trajectory(0), ExportFormat::Tabular);
        assert_eq!(String::from_utf8(single).unwrap().lines().count(), 2);
    }

    #[test]
    fn document_export() {
        let m = fixtures::chain::<f64>();
        let out = export_trajectory(&m, &chain_trajectory(2), ExportFormat::Document);
        let doc: TrajectoryDocument = parse_document(&out).unwrap();
        assert_eq!(doc.state_column("q").unwrap(), vec![0.0, 0.5, 0.5]);
        assert_eq!(doc.impulses[1], vec![0.0, 0.5]);
    }

    #[test]
    fn registry_round_trip() {
        let kb = KnowledgeBase::bundled();
        let bytes = save_registry(&kb);
        assert_eq!(load_registry(&bytes).unwrap(), kb);
    }

    #[test]
    fn scenario_file_parses() {
        let text = br#"{"formatVersion":"fcm/1",
            "target":{"factor":"q","desiredDelta":1.0,"horizon":2},
            "controls":["p"],
            "scenarios":[{"name":"push","controls":["p"],"horizon":2,"schedule":{"0":{"p":1.0}}}]}"#;
        let file: ScenarioFile = parse_document(text).unwrap();
        let s = file.scenarios[0].to_scenario::<f64>().unwrap();
        assert_eq!(s.schedule[&0][&FactorId::new("p")], 1.0);
        assert_eq!(ScenarioDoc::from_scenario(&s), file.scenarios[0]);
        let bad = br#"{"formatVersion":"fcm/1","scenarios":[{"name":"x","controls":[],"horizon":1,"schedule":{"zero":{}}}]}"#;
        let file: ScenarioFile = parse_document(bad).unwrap();
        assert!(file.scenarios[0].to_scenario::<f64>().is_err());
    }
}
