//! Bundled example maps and knowledge base.
//!
//! The standard development model uses quality of life as its target and
//! production as its variable control factor. Beyond those two, the factor
//! set and every weight are illustrative.

use std::collections::{BTreeMap, BTreeSet};

use crate::knowledge::{IndicatorTemplate, PopulationClass, Relation, SemanticNetwork, Triple, TypologyRegistry};
use crate::map::{build_map, CognitiveMap, Factor, FactorKind, MapMetadata, WeightedEdge};
use crate::scalar::Scalar;

/// `p (control) → q (target)` with weight 0.5.
pub fn chain<S: Scalar>() -> CognitiveMap<S> {
    build_map(
        vec![Factor::bare("p", FactorKind::Control), Factor::bare("q", FactorKind::Target)],
        vec![WeightedEdge::new("p", "q", S::lit(0.5))],
        MapMetadata::named("chain"),
    )
    .expect("chain fixture is valid")
}

/// Standard cognitive model of municipal development.
pub fn standard_model<S: Scalar>() -> CognitiveMap<S> {
    use FactorKind::*;
    let factors = vec![
        Factor::new("quality_of_life", "Quality of life", Target),
        Factor::new("production", "Production", Control),
        Factor::new("investment", "Investment", Control),
        Factor::new("demographics", "Demographics", General),
        Factor::new("social_infrastructure", "Social infrastructure", General),
        Factor::new("employment", "Employment", General),
        Factor::new("income", "Household income", General),
        Factor::new("budget", "Municipal budget", General),
        Factor::new("environment", "Environmental condition", Special),
    ];
    let w = |s: &str, t: &str, x: f64| WeightedEdge::new(s, t, S::lit(x));
    let edges = vec![
        w("production", "employment", 0.7),
        w("production", "budget", 0.5),
        w("production", "environment", -0.4),
        w("investment", "production", 0.6),
        w("investment", "social_infrastructure", 0.3),
        w("employment", "income", 0.6),
        w("income", "quality_of_life", 0.7),
        w("budget", "social_infrastructure", 0.6),
        w("social_infrastructure", "quality_of_life", 0.5),
        w("environment", "quality_of_life", 0.4),
        w("demographics", "social_infrastructure", 0.4),
        w("demographics", "employment", 0.3),
        w("quality_of_life", "demographics", 0.5),
        w("income", "budget", 0.3),
    ];
    build_map(factors, edges, MapMetadata::named("standard-sed-model")).expect("standard model is valid")
}

fn labels(items: &[&str]) -> Vec<String> {
    items.iter().map(|s| s.to_string()).collect()
}

fn set(items: &[&str]) -> BTreeSet<String> {
    items.iter().map(|s| s.to_string()).collect()
}

/// Three climate zones, population classes `small [0, 10 000)`,
/// `medium [10 000, 50 000)`, `large [50 000, ∞)`, three specializations;
/// every combination supported.
pub fn registry() -> TypologyRegistry {
    TypologyRegistry::new(
        labels(&["arctic", "boreal", "temperate"]),
        vec![
            PopulationClass { label: "small".into(), lower: 0, upper: Some(10_000) },
            PopulationClass { label: "medium".into(), lower: 10_000, upper: Some(50_000) },
            PopulationClass { label: "large".into(), lower: 50_000, upper: None },
        ],
        labels(&["agriculture", "forestry", "mining"]),
        None,
    )
    .expect("registry fixture is valid")
}

pub fn indicator_template() -> IndicatorTemplate {
    IndicatorTemplate {
        general: set(&["demographics", "quality_of_life", "social_infrastructure", "employment", "income"]),
        special: BTreeMap::from([
            ("agriculture".to_string(), set(&["agricultural_output", "arable_land_use"])),
            ("forestry".to_string(), set(&["timber_harvest", "forest_cover"])),
            ("mining".to_string(), set(&["ore_output", "environment"])),
        ]),
        overrides: BTreeMap::new(),
    }
}

/// Determinants of a municipal development strategy.
pub fn semantic_network() -> SemanticNetwork {
    use Relation::*;
    let nodes = labels(&[
        "sed-strategy",
        "municipality-type",
        "current-sed-level",
        "rural-settlement-count",
        "climate-zone",
        "population-class",
        "specialization",
        "general-indicators",
        "special-indicators",
        "sed-indicators",
        "demographics",
        "quality-of-life",
    ]);
    let t = |s: &str, r, o: &str| Triple { subject: s.into(), relation: r, object: o.into() };
    let edges = vec![
        t("sed-strategy", DependsOn, "municipality-type"),
        t("sed-strategy", DependsOn, "current-sed-level"),
        t("sed-strategy", DependsOn, "rural-settlement-count"),
        t("municipality-type", DependsOn, "climate-zone"),
        t("municipality-type", DependsOn, "population-class"),
        t("municipality-type", DependsOn, "specialization"),
        t("current-sed-level", AssessedBy, "general-indicators"),
        t("current-sed-level", AssessedBy, "special-indicators"),
        t("special-indicators", DependsOn, "municipality-type"),
        t("general-indicators", PartOf, "sed-indicators"),
        t("special-indicators", PartOf, "sed-indicators"),
        t("demographics", IsA, "general-indicators"),
        t("quality-of-life", IsA, "general-indicators"),
    ];
    SemanticNetwork::new(nodes, edges).expect("semantic network fixture is valid")
}
