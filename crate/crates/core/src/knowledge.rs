//! Municipality typology, indicator templates and the semantic network of
//! what a development strategy depends on.
//!
//! A municipality type is a cell of the climate × population × specialization
//! partition. Population classes are half-open intervals `[lower, upper)` that
//! together cover `[0, ∞)`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KnowledgeError {
    #[error("unknown climate zone `{0}`")]
    UnknownClimate(String),
    #[error("unknown specialization `{0}`")]
    UnknownSpecialization(String),
    #[error("unknown population class `{0}`")]
    UnknownPopulationClass(String),
    #[error("population {0} matches no class (corrupt registry)")]
    NoPopulationClass(u64),
    #[error("unsupported municipality type {0}")]
    Unsupported(MunicipalityType),
    #[error("invalid registry: {0}")]
    InvalidRegistry(String),
    #[error("invalid semantic network: {0}")]
    InvalidNetwork(String),
}

/// Classification triple `(climate, population class, specialization)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MunicipalityType {
    pub climate: String,
    pub population_class: String,
    pub specialization: String,
}

impl MunicipalityType {
    pub fn new(climate: &str, population_class: &str, specialization: &str) -> Self {
        Self {
            climate: climate.into(),
            population_class: population_class.into(),
            specialization: specialization.into(),
        }
    }
}

impl fmt::Display for MunicipalityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.climate, self.population_class, self.specialization)
    }
}

/// Population interval `[lower, upper)`; `upper = None` means unbounded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PopulationClass {
    pub label: String,
    pub lower: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upper: Option<u64>,
}

impl PopulationClass {
    pub fn contains(&self, population: u64) -> bool {
        population >= self.lower && self.upper.is_none_or(|u| population < u)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TypologyRegistry {
    climate_zones: Vec<String>,
    population_classes: Vec<PopulationClass>,
    specializations: Vec<String>,
    supported: BTreeSet<MunicipalityType>,
}

impl TypologyRegistry {
    /// Validates the partition and label sets. `supported = None` supports
    /// every combination.
    pub fn new(
        climate_zones: Vec<String>,
        mut population_classes: Vec<PopulationClass>,
        specializations: Vec<String>,
        supported: Option<BTreeSet<MunicipalityType>>,
    ) -> Result<Self, KnowledgeError> {
        let bad = |m: String| Err(KnowledgeError::InvalidRegistry(m));
        for (axis, labels) in [("climate zone", &climate_zones), ("specialization", &specializations)] {
            let unique: BTreeSet<_> = labels.iter().collect();
            if unique.len() != labels.len() {
                return bad(format!("duplicate {axis} label"));
            }
            if labels.iter().any(|l| l.is_empty()) {
                return bad(format!("empty {axis} label"));
            }
        }
        let unique: BTreeSet<_> = population_classes.iter().map(|c| &c.label).collect();
        if unique.len() != population_classes.len() {
            return bad("duplicate population class label".into());
        }

        population_classes.sort_by_key(|c| c.lower);
        match population_classes.first() {
            None => return bad("no population classes".into()),
            Some(c) if c.lower != 0 => return bad(format!("population classes start at {}, not 0", c.lower)),
            _ => {}
        }
        for pair in population_classes.windows(2) {
            match pair[0].upper {
                Some(u) if u == pair[1].lower => {}
                _ => {
                    return bad(format!(
                        "population class `{}` does not end where `{}` begins",
                        pair[0].label, pair[1].label
                    ))
                }
            }
        }
        for c in &population_classes {
            if c.upper.is_some_and(|u| u <= c.lower) {
                return bad(format!("population class `{}` is empty", c.label));
            }
        }
        if population_classes.last().is_some_and(|c| c.upper.is_some()) {
            return bad("last population class must be unbounded".into());
        }

        let supported = match supported {
            Some(s) => s,
            None => {
                let mut all = BTreeSet::new();
                for k in &climate_zones {
                    for p in &population_classes {
                        for a in &specializations {
                            all.insert(MunicipalityType::new(k, &p.label, a));
                        }
                    }
                }
                all
            }
        };
        let reg = Self { climate_zones, population_classes, specializations, supported };
        for t in &reg.supported {
            reg.check_labels(t)?;
        }
        Ok(reg)
    }

    pub fn climate_zones(&self) -> &[String] {
        &self.climate_zones
    }

    /// Sorted by lower bound.
    pub fn population_classes(&self) -> &[PopulationClass] {
        &self.population_classes
    }

    pub fn specializations(&self) -> &[String] {
        &self.specializations
    }

    pub fn supported(&self) -> &BTreeSet<MunicipalityType> {
        &self.supported
    }

    pub fn population_class(&self, population: u64) -> Option<&PopulationClass> {
        self.population_classes.iter().find(|c| c.contains(population))
    }

    fn check_labels(&self, t: &MunicipalityType) -> Result<(), KnowledgeError> {
        if !self.climate_zones.contains(&t.climate) {
            return Err(KnowledgeError::UnknownClimate(t.climate.clone()));
        }
        if !self.population_classes.iter().any(|c| c.label == t.population_class) {
            return Err(KnowledgeError::UnknownPopulationClass(t.population_class.clone()));
        }
        if !self.specializations.contains(&t.specialization) {
            return Err(KnowledgeError::UnknownSpecialization(t.specialization.clone()));
        }
        Ok(())
    }

    /// True when the triple names known labels and is a supported cell.
    pub fn is_supported(&self, t: &MunicipalityType) -> bool {
        self.supported.contains(t)
    }
}

/// Maps a concrete municipality onto its typology cell.
pub fn resolve_type(
    registry: &TypologyRegistry,
    climate: &str,
    population: u64,
    specialization: &str,
) -> Result<MunicipalityType, KnowledgeError> {
    if !registry.climate_zones.iter().any(|k| k == climate) {
        return Err(KnowledgeError::UnknownClimate(climate.into()));
    }
    if !registry.specializations.iter().any(|a| a == specialization) {
        return Err(KnowledgeError::UnknownSpecialization(specialization.into()));
    }
    let class = registry
        .population_class(population)
        .ok_or(KnowledgeError::NoPopulationClass(population))?;
    let t = MunicipalityType::new(climate, &class.label, specialization);
    if registry.supported.contains(&t) {
        Ok(t)
    } else {
        Err(KnowledgeError::Unsupported(t))
    }
}

/// General indicators apply everywhere; special ones are keyed by
/// specialization, with optional per-type overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IndicatorTemplate {
    pub general: BTreeSet<String>,
    pub special: BTreeMap<String, BTreeSet<String>>,
    pub overrides: BTreeMap<MunicipalityType, BTreeSet<String>>,
}

impl IndicatorTemplate {
    pub fn validate(&self) -> Result<(), KnowledgeError> {
        let all = self
            .general
            .iter()
            .chain(self.special.values().flatten())
            .chain(self.overrides.values().flatten());
        for id in all {
            if id.is_empty() {
                return Err(KnowledgeError::InvalidRegistry("empty indicator id".into()));
            }
        }
        Ok(())
    }
}

/// `general ∪ special(type)`; a per-type override replaces the
/// specialization entry.
pub fn indicators_for_type(template: &IndicatorTemplate, t: &MunicipalityType) -> BTreeSet<String> {
    let special = template
        .overrides
        .get(t)
        .or_else(|| template.special.get(&t.specialization));
    let mut out = template.general.clone();
    if let Some(s) = special {
        out.extend(s.iter().cloned());
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    DependsOn,
    IsA,
    PartOf,
    AssessedBy,
}

impl std::str::FromStr for Relation {
    type Err = KnowledgeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "depends-on" => Ok(Relation::DependsOn),
            "is-a" => Ok(Relation::IsA),
            "part-of" => Ok(Relation::PartOf),
            "assessed-by" => Ok(Relation::AssessedBy),
            other => Err(KnowledgeError::InvalidNetwork(format!("unknown relation `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: String,
    pub relation: Relation,
    pub object: String,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SemanticNetwork {
    nodes: BTreeSet<String>,
    edges: BTreeSet<Triple>,
}

impl SemanticNetwork {
    /// Rejects dangling endpoints and duplicate triples.
    pub fn new(nodes: Vec<String>, edges: Vec<Triple>) -> Result<Self, KnowledgeError> {
        let node_set: BTreeSet<String> = nodes.into_iter().collect();
        let mut edge_set = BTreeSet::new();
        for t in edges {
            for end in [&t.subject, &t.object] {
                if !node_set.contains(end) {
                    return Err(KnowledgeError::InvalidNetwork(format!("unknown node `{end}`")));
                }
            }
            if edge_set.contains(&t) {
                return Err(KnowledgeError::InvalidNetwork(format!(
                    "duplicate triple ({}, {:?}, {})",
                    t.subject, t.relation, t.object
                )));
            }
            edge_set.insert(t);
        }
        Ok(Self { nodes: node_set, edges: edge_set })
    }

    pub fn nodes(&self) -> &BTreeSet<String> {
        &self.nodes
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.edges.iter()
    }
}

/// All objects `o` with `(subject, relation, o)` in the network.
pub fn semantic_query(network: &SemanticNetwork, subject: &str, relation: Relation) -> BTreeSet<String> {
    network
        .edges
        .iter()
        .filter(|t| t.subject == subject && t.relation == relation)
        .map(|t| t.object.clone())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn resolves_medium_agricultural_municipality() {
        let reg = fixtures::registry();
        let t = resolve_type(&reg, "temperate", 25_000, "agriculture").unwrap();
        assert_eq!(t, MunicipalityType::new("temperate", "medium", "agriculture"));
    }

    #[test]
    fn lower_bound_is_inclusive() {
        let reg = fixtures::registry();
        assert_eq!(resolve_type(&reg, "temperate", 10_000, "agriculture").unwrap().population_class, "medium");
        assert_eq!(resolve_type(&reg, "temperate", 9_999, "agriculture").unwrap().population_class, "small");
        assert_eq!(resolve_type(&reg, "temperate", 0, "agriculture").unwrap().population_class, "small");
        assert_eq!(resolve_type(&reg, "temperate", u64::MAX, "agriculture").unwrap().population_class, "large");
    }

    #[test]
    fn unknown_labels() {
        let reg = fixtures::registry();
        let err = resolve_type(&reg, "temperate", 25_000, "tourism").unwrap_err();
        assert_eq!(err.to_string(), "unknown specialization `tourism`");
        let err = resolve_type(&reg, "tropical", 25_000, "mining").unwrap_err();
        assert!(matches!(err, KnowledgeError::UnknownClimate(_)));
    }

    #[test]
    fn unsupported_combination() {
        let base = fixtures::registry();
        let only = BTreeSet::from([MunicipalityType::new("temperate", "small", "mining")]);
        let reg = TypologyRegistry::new(
            base.climate_zones().to_vec(),
            base.population_classes().to_vec(),
            base.specializations().to_vec(),
            Some(only),
        )
        .unwrap();
        assert!(resolve_type(&reg, "temperate", 5, "mining").is_ok());
        assert!(matches!(
            resolve_type(&reg, "temperate", 25_000, "mining"),
            Err(KnowledgeError::Unsupported(_))
        ));
    }

    #[test]
    fn registry_rejects_broken_partitions() {
        let cls = |l: &str, lo: u64, up: Option<u64>| PopulationClass { label: l.into(), lower: lo, upper: up };
        let mk = |classes| TypologyRegistry::new(vec!["k".into()], classes, vec!["a".into()], None);
        assert!(mk(vec![cls("x", 1, None)]).is_err());
        assert!(mk(vec![cls("x", 0, Some(10)), cls("y", 11, None)]).is_err());
        assert!(mk(vec![cls("x", 0, Some(10))]).is_err());
        assert!(mk(vec![cls("x", 0, Some(10)), cls("x", 10, None)]).is_err());
        assert!(mk(vec![]).is_err());
        assert!(mk(vec![cls("x", 0, Some(10)), cls("y", 10, None)]).is_ok());
        // unsorted input is accepted and sorted
        let reg = mk(vec![cls("y", 10, None), cls("x", 0, Some(10))]).unwrap();
        assert_eq!(reg.population_classes()[0].label, "x");
    }

    #[test]
    fn agricultural_indicators() {
        let tpl = IndicatorTemplate {
            general: set(&["demographics", "quality_of_life"]),
            special: BTreeMap::from([("agriculture".to_string(), set(&["agricultural_output"]))]),
            overrides: BTreeMap::new(),
        };
        let t = MunicipalityType::new("temperate", "medium", "agriculture");
        assert_eq!(
            indicators_for_type(&tpl, &t),
            set(&["demographics", "quality_of_life", "agricultural_output"])
        );
        let other = MunicipalityType::new("temperate", "medium", "mining");
        assert_eq!(indicators_for_type(&tpl, &other), tpl.general);
    }

    #[test]
    fn overlapping_sets_union() {
        let tpl = IndicatorTemplate {
            general: set(&["demographics"]),
            special: BTreeMap::from([("forestry".to_string(), set(&["demographics", "timber"]))]),
            overrides: BTreeMap::new(),
        };
        let t = MunicipalityType::new("boreal", "small", "forestry");
        assert_eq!(indicators_for_type(&tpl, &t), set(&["demographics", "timber"]));
    }

    #[test]
    fn override_replaces_specialization_entry() {
        let t = MunicipalityType::new("arctic", "small", "mining");
        let tpl = IndicatorTemplate {
            general: set(&["demographics"]),
            special: BTreeMap::from([("mining".to_string(), set(&["ore_output"]))]),
            overrides: BTreeMap::from([(t.clone(), set(&["ore_output", "winter_logistics"]))]),
        };
        assert_eq!(indicators_for_type(&tpl, &t), set(&["demographics", "ore_output", "winter_logistics"]));
    }

    #[test]
    fn strategy_dependencies() {
        let net = fixtures::semantic_network();
        assert_eq!(
            semantic_query(&net, "sed-strategy", Relation::DependsOn),
            set(&["municipality-type", "current-sed-level", "rural-settlement-count"])
        );
        assert_eq!(
            semantic_query(&net, "municipality-type", Relation::DependsOn),
            set(&["climate-zone", "population-class", "specialization"])
        );
        assert!(semantic_query(&net, "nonexistent", Relation::DependsOn).is_empty());
    }

    #[test]
    fn network_rejects_bad_triples() {
        let t = |s: &str, o: &str| Triple { subject: s.into(), relation: Relation::IsA, object: o.into() };
        assert!(SemanticNetwork::new(vec!["a".into()], vec![t("a", "b")]).is_err());
        assert!(SemanticNetwork::new(vec!["a".into(), "b".into()], vec![t("a", "b"), t("a", "b")]).is_err());
    }

    #[test]
    fn relation_parse() {
        assert_eq!("assessed-by".parse::<Relation>().unwrap(), Relation::AssessedBy);
        assert!("likes".parse::<Relation>().is_err());
    }
}
