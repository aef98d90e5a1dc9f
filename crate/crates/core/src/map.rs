//! Cognitive maps: factors, signed fuzzy weights, validation and decomposition.
//!
//! A map is a set of factors plus a weight relation `w(source, target) ∈ [−1, 1]`
//! saying how much a change in `source` moves `target`. Factor order is
//! significant: the i-th factor is the i-th coordinate of every vector and
//! matrix derived from the map.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::knowledge::MunicipalityType;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Short whitespace-free token naming a factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FactorId(String);

impl FactorId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn is_well_formed(&self) -> bool {
        !self.0.is_empty() && !self.0.chars().any(char::is_whitespace)
    }
}

impl fmt::Display for FactorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for FactorId {
    fn from(s: &str) -> Self {
        Self::new(s)
    }
}

impl AsRef<str> for FactorId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorKind {
    Target,
    Control,
    General,
    Special,
}

impl fmt::Display for FactorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FactorKind::Target => "target",
            FactorKind::Control => "control",
            FactorKind::General => "general",
            FactorKind::Special => "special",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Factor {
    pub id: FactorId,
    pub name: String,
    pub kind: FactorKind,
    /// Factor this one was decomposed from.
    pub parent: Option<FactorId>,
}

impl Factor {
    pub fn new(id: impl Into<String>, name: impl Into<String>, kind: FactorKind) -> Self {
        Self { id: FactorId::new(id), name: name.into(), kind, parent: None }
    }

    /// Factor whose display name is its id.
    pub fn bare(id: &str, kind: FactorKind) -> Self {
        Self::new(id, id, kind)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedEdge<S> {
    pub source: FactorId,
    pub target: FactorId,
    pub weight: S,
}

impl<S> WeightedEdge<S> {
    pub fn new(source: impl Into<String>, target: impl Into<String>, weight: S) -> Self {
        Self { source: FactorId::new(source), target: FactorId::new(target), weight }
    }

    /// `source->target`, the form used for edge references on the command line.
    pub fn key(&self) -> String {
        format!("{}->{}", self.source, self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct MapMetadata {
    pub name: String,
    pub version: String,
    pub municipality_type: Option<MunicipalityType>,
}

impl MapMetadata {
    pub fn named(name: impl Into<String>) -> Self {
        Self { name: name.into(), version: "1".into(), municipality_type: None }
    }
}

/// One broken invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    MalformedFactorId(String),
    DuplicateFactor(FactorId),
    UnknownParent { factor: FactorId, parent: FactorId },
    LineageCycle(FactorId),
    MultipleTargets(Vec<FactorId>),
    DanglingEndpoint { edge: String, missing: FactorId },
    DuplicateEdge(String),
    WeightOutOfRange { edge: String, weight: String },
}

impl Violation {
    /// Stable machine-readable name of the invariant.
    pub fn code(&self) -> &'static str {
        match self {
            Violation::MalformedFactorId(_) => "malformed-factor-id",
            Violation::DuplicateFactor(_) => "duplicate-factor",
            Violation::UnknownParent { .. } => "unknown-parent",
            Violation::LineageCycle(_) => "lineage-cycle",
            Violation::MultipleTargets(_) => "multiple-targets",
            Violation::DanglingEndpoint { .. } => "dangling-endpoint",
            Violation::DuplicateEdge(_) => "duplicate-edge",
            Violation::WeightOutOfRange { .. } => "weight-out-of-range",
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MalformedFactorId(id) => write!(f, "malformed factor id {id:?}"),
            Violation::DuplicateFactor(id) => write!(f, "duplicate factor id `{id}`"),
            Violation::UnknownParent { factor, parent } => {
                write!(f, "factor `{factor}` names unknown parent `{parent}`")
            }
            Violation::LineageCycle(id) => write!(f, "decomposition lineage cycle through `{id}`"),
            Violation::MultipleTargets(ids) => {
                let ids: Vec<_> = ids.iter().map(FactorId::as_str).collect();
                write!(f, "multiple target factors: {}", ids.join(", "))
            }
            Violation::DanglingEndpoint { edge, missing } => {
                write!(f, "dangling edge endpoint `{missing}` in edge {edge}")
            }
            Violation::DuplicateEdge(edge) => write!(f, "duplicate edge {edge}"),
            Violation::WeightOutOfRange { edge, weight } => {
                write!(f, "weight outside [−1,1]: {edge} has {weight}")
            }
        }
    }
}

/// Result of [`validate_map`]; empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let msgs: Vec<_> = self.violations.iter().map(ToString::to_string).collect();
        f.write_str(&msgs.join("; "))
    }
}

/// Checks every map invariant over raw parts.
pub fn validate_map<S: Scalar>(factors: &[Factor], edges: &[WeightedEdge<S>]) -> ValidationReport {
    let mut violations = Vec::new();

    let mut seen = HashSet::new();
    for f in factors {
        if !f.id.is_well_formed() {
            violations.push(Violation::MalformedFactorId(f.id.as_str().to_owned()));
        }
        if !seen.insert(&f.id) {
            violations.push(Violation::DuplicateFactor(f.id.clone()));
        }
    }

    let parents: HashMap<&FactorId, Option<&FactorId>> =
        factors.iter().map(|f| (&f.id, f.parent.as_ref())).collect();
    for f in factors {
        if let Some(p) = &f.parent {
            if !parents.contains_key(p) {
                violations.push(Violation::UnknownParent { factor: f.id.clone(), parent: p.clone() });
            }
        }
    }
    // Walk each lineage; a chain longer than the factor count must revisit a node.
    let mut cyclic: Vec<&FactorId> = Vec::new();
    for f in factors {
        let mut cur = f.parent.as_ref();
        let mut steps = 0;
        while let Some(p) = cur {
            if p == &f.id || steps > factors.len() {
                if !cyclic.contains(&&f.id) {
                    cyclic.push(&f.id);
                }
                break;
            }
            cur = parents.get(p).copied().flatten();
            steps += 1;
        }
    }
    violations.extend(cyclic.into_iter().map(|id| Violation::LineageCycle(id.clone())));

    let targets: Vec<FactorId> =
        factors.iter().filter(|f| f.kind == FactorKind::Target).map(|f| f.id.clone()).collect();
    if targets.len() > 1 {
        violations.push(Violation::MultipleTargets(targets));
    }

    let mut pairs = HashSet::new();
    for e in edges {
        for end in [&e.source, &e.target] {
            if !seen.contains(end) {
                violations.push(Violation::DanglingEndpoint { edge: e.key(), missing: end.clone() });
            }
        }
        if !pairs.insert((&e.source, &e.target)) {
            violations.push(Violation::DuplicateEdge(e.key()));
        }
        // Closed interval, exact comparison; NaN fails both tests.
        if !(e.weight >= -S::one() && e.weight <= S::one()) {
            violations.push(Violation::WeightOutOfRange { edge: e.key(), weight: e.weight.to_string() });
        }
    }

    ValidationReport { violations }
}

/// An immutable, validated cognitive map.
#[derive(Debug, Clone, PartialEq)]
pub struct CognitiveMap<S> {
    factors: Vec<Factor>,
    edges: Vec<WeightedEdge<S>>,
    metadata: MapMetadata,
    index: HashMap<FactorId, usize>,
}

/// Validates parts and assembles a map. Factor order is preserved.
pub fn build_map<S: Scalar>(
    factors: Vec<Factor>,
    edges: Vec<WeightedEdge<S>>,
    metadata: MapMetadata,
) -> Result<CognitiveMap<S>> {
    let report = validate_map(&factors, &edges);
    if !report.is_valid() {
        return Err(Error::InvalidMap(report));
    }
    let index = factors.iter().enumerate().map(|(i, f)| (f.id.clone(), i)).collect();
    Ok(CognitiveMap { factors, edges, metadata, index })
}

impl<S: Scalar> CognitiveMap<S> {
    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn edges(&self) -> &[WeightedEdge<S>] {
        &self.edges
    }

    pub fn metadata(&self) -> &MapMetadata {
        &self.metadata
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn index_of(&self, id: &FactorId) -> Option<usize> {
        self.index.get(id).copied()
    }

    pub fn factor(&self, id: &FactorId) -> Option<&Factor> {
        self.index_of(id).map(|i| &self.factors[i])
    }

    pub fn weight(&self, source: &FactorId, target: &FactorId) -> Option<S> {
        self.edges
            .iter()
            .find(|e| &e.source == source && &e.target == target)
            .map(|e| e.weight)
    }

    /// The single target factor, if any.
    pub fn target(&self) -> Option<&Factor> {
        self.factors.iter().find(|f| f.kind == FactorKind::Target)
    }

    pub fn factors_of_kind(&self, kind: FactorKind) -> impl Iterator<Item = &Factor> {
        self.factors.iter().filter(move |f| f.kind == kind)
    }

    /// Always empty for a constructed map.
    pub fn validate(&self) -> ValidationReport {
        validate_map(&self.factors, &self.edges)
    }

    /// Weight matrix `W[i][j] = w(e_i, e_j)`.
    pub fn weight_matrix(&self) -> Matrix<S> {
        let mut w = Matrix::zeros(self.len());
        for e in &self.edges {
            w[(self.index[&e.source], self.index[&e.target])] = e.weight;
        }
        w
    }

    /// Propagation operator `M = Wᵀ`, so that `O(t+1) = M·O(t)`.
    pub fn propagation_matrix(&self) -> Matrix<S> {
        let mut m = Matrix::zeros(self.len());
        for e in &self.edges {
            m[(self.index[&e.target], self.index[&e.source])] = e.weight;
        }
        m
    }

    /// Copy of this map with one edge reweighted. The edge must exist and
    /// the new weight lie in [−1, 1].
    pub fn with_weight(&self, source: &FactorId, target: &FactorId, weight: S) -> Result<Self> {
        let mut edges = self.edges.clone();
        let edge = edges
            .iter_mut()
            .find(|e| &e.source == source && &e.target == target)
            .ok_or_else(|| Error::UnknownEdge(format!("{source}->{target}")))?;
        edge.weight = weight;
        build_map(self.factors.clone(), edges, self.metadata.clone())
    }

    pub fn into_parts(self) -> (Vec<Factor>, Vec<WeightedEdge<S>>, MapMetadata) {
        (self.factors, self.edges, self.metadata)
    }
}

/// Breaks `factor` down into `children`, each feeding the parent through a
/// new `child → factor` edge carrying its aggregation weight.
///
/// The parent stays in the map as an aggregate node; existing edges are untouched.
pub fn decompose_factor<S: Scalar>(
    map: &CognitiveMap<S>,
    factor: &FactorId,
    children: Vec<(Factor, S)>,
) -> Result<CognitiveMap<S>> {
    if map.index_of(factor).is_none() {
        return Err(Error::UnknownFactor(factor.clone()));
    }
    let mut factors = map.factors.clone();
    let mut edges = map.edges.clone();
    let mut fresh: HashSet<FactorId> = HashSet::new();
    for (mut child, weight) in children {
        if map.index_of(&child.id).is_some() || !fresh.insert(child.id.clone()) {
            return Err(Error::IdCollision(child.id));
        }
        if !(weight >= -S::one() && weight <= S::one()) {
            return Err(Error::AggregationWeight { factor: child.id, weight: weight.to_f64_lossy() });
        }
        child.parent = Some(factor.clone());
        edges.push(WeightedEdge { source: child.id.clone(), target: factor.clone(), weight });
        factors.push(child);
    }
    build_map(factors, edges, map.metadata.clone())
}
