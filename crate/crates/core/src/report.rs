//! Report documents shared by the CLI and the HTTP service, plus their
//! plain-text table renderings.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::analysis::{ClosurePair, InfluenceReport, StabilityReport, StabilizationPlan};
use crate::format::{format_number, TrajectoryDocument, FORMAT_VERSION};
use crate::map::CognitiveMap;
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::scenario::{Inversion, RankedScenario, ScenarioResult};

/// Full precision; `-0` folds to `0`.
fn r<S: Scalar>(x: S) -> f64 {
    x.to_f64_lossy() + 0.0
}

fn rows<S: Scalar>(m: &Matrix<S>) -> Vec<Vec<f64>> {
    m.rows().into_iter().map(|row| row.into_iter().map(r).collect()).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilityDoc {
    pub spectral_radius: f64,
    pub classification: String,
    pub tolerance: f64,
}

impl StabilityDoc {
    pub fn new<S: Scalar>(s: &StabilityReport<S>) -> Self {
        Self {
            spectral_radius: r(s.spectral_radius),
            classification: s.classification.to_string(),
            tolerance: r(s.tolerance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct FactorInfluenceDoc {
    pub factor: String,
    pub influence_on_system: f64,
    pub susceptibility: f64,
    pub consonance_on_system: f64,
}

/// Closure, influence indicators and stability of one map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct AnalysisDocument {
    pub format_version: String,
    pub factors: Vec<String>,
    pub positive_closure: Vec<Vec<f64>>,
    pub negative_closure: Vec<Vec<f64>>,
    pub influence: Vec<Vec<f64>>,
    pub consonance: Vec<Vec<f64>>,
    pub dissonance: Vec<Vec<f64>>,
    pub per_factor: Vec<FactorInfluenceDoc>,
    pub stability: StabilityDoc,
}

impl AnalysisDocument {
    pub fn new<S: Scalar>(
        map: &CognitiveMap<S>,
        closure: &ClosurePair<S>,
        influence: &InfluenceReport<S>,
        stability: &StabilityReport<S>,
    ) -> Self {
        let factors: Vec<String> = map.factors().iter().map(|f| f.id.to_string()).collect();
        Self {
            format_version: FORMAT_VERSION.into(),
            per_factor: factors
                .iter()
                .zip(&influence.per_factor)
                .map(|(f, p)| FactorInfluenceDoc {
                    factor: f.clone(),
                    influence_on_system: r(p.influence_on_system),
                    susceptibility: r(p.susceptibility),
                    consonance_on_system: r(p.consonance_on_system),
                })
                .collect(),
            factors,
            positive_closure: rows(&closure.positive),
            negative_closure: rows(&closure.negative),
            influence: rows(&influence.influence),
            consonance: rows(&influence.consonance),
            dissonance: rows(&influence.dissonance),
            stability: StabilityDoc::new(stability),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "spectral radius {}  ({}, tol {})",
            format_number(self.stability.spectral_radius),
            self.stability.classification,
            format_number(self.stability.tolerance)
        );
        out.push('\n');
        out.push_str(&matrix_table("influence P", &self.factors, &self.influence));
        out.push('\n');
        out.push_str(&matrix_table("consonance C", &self.factors, &self.consonance));
        out.push('\n');
        let w = self.factors.iter().map(String::len).max().unwrap_or(6).max(6);
        let _ = writeln!(out, "{:<w$}  {:>12}  {:>12}  {:>12}", "factor", "influence", "susceptible", "consonance");
        for p in &self.per_factor {
            let _ = writeln!(
                out,
                "{:<w$}  {:>12}  {:>12}  {:>12}",
                p.factor,
                format_number(p.influence_on_system),
                format_number(p.susceptibility),
                format_number(p.consonance_on_system)
            );
        }
        out
    }
}

fn matrix_table(title: &str, labels: &[String], m: &[Vec<f64>]) -> String {
    let w = labels.iter().map(String::len).max().unwrap_or(1).max(8);
    let mut out = format!("{title}\n{:<w$}", "");
    for l in labels {
        let _ = write!(out, "  {l:>w$}");
    }
    out.push('\n');
    for (l, row) in labels.iter().zip(m) {
        let _ = write!(out, "{l:<w$}");
        for &v in row {
            let _ = write!(out, "  {:>w$}", format_number(v));
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ModificationDoc {
    pub source: String,
    pub target: String,
    pub old_weight: f64,
    pub new_weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StabilizationDocument {
    pub format_version: String,
    pub success: bool,
    pub initial_radius: f64,
    pub resulting_radius: f64,
    pub modifications: Vec<ModificationDoc>,
}

impl StabilizationDocument {
    pub fn new<S: Scalar>(plan: &StabilizationPlan<S>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            success: plan.success,
            initial_radius: r(plan.initial_radius),
            resulting_radius: r(plan.resulting_radius),
            modifications: plan
                .modifications
                .iter()
                .map(|m| ModificationDoc {
                    source: m.source.to_string(),
                    target: m.target.to_string(),
                    old_weight: r(m.old_weight),
                    new_weight: r(m.new_weight),
                })
                .collect(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{}: spectral radius {} -> {}\n",
            if self.success { "stabilized" } else { "not stabilized" },
            format_number(self.initial_radius),
            format_number(self.resulting_radius)
        );
        for (i, m) in self.modifications.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>3}. {}->{}  {} -> {}",
                i + 1,
                m.source,
                m.target,
                format_number(m.old_weight),
                format_number(m.new_weight)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScenarioResultDocument {
    pub format_version: String,
    pub name: String,
    pub target: String,
    pub target_delta: f64,
    pub final_deltas: Vec<(String, f64)>,
    pub trajectory: TrajectoryDocument,
}

impl ScenarioResultDocument {
    pub fn new<S: Scalar>(map: &CognitiveMap<S>, name: &str, result: &ScenarioResult<S>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            name: name.into(),
            target: result.target.to_string(),
            target_delta: r(result.target_delta),
            final_deltas: result.final_deltas.iter().map(|(f, d)| (f.to_string(), r(*d))).collect(),
            trajectory: TrajectoryDocument::new(map, &result.trajectory),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("scenario {}: {} changes by {}\n", self.name, self.target, format_number(self.target_delta));
        for (f, d) in &self.final_deltas {
            let _ = writeln!(out, "  {f:<24} {:>14}", format_number(*d));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankingEntry {
    pub name: String,
    pub target_delta: f64,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct RankingDocument {
    pub format_version: String,
    pub target: String,
    pub desired_delta: f64,
    pub ranking: Vec<RankingEntry>,
}

impl RankingDocument {
    pub fn new<S: Scalar>(target: &str, desired: S, ranked: &[RankedScenario<S>]) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            target: target.into(),
            desired_delta: r(desired),
            ranking: ranked
                .iter()
                .map(|x| RankingEntry { name: x.name.clone(), target_delta: r(x.target_delta), distance: r(x.distance) })
                .collect(),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("target {} desired change {}\n", self.target, format_number(self.desired_delta));
        for (i, e) in self.ranking.iter().enumerate() {
            let _ = writeln!(
                out,
                "{:>3}. {:<24} delta {:>14}  distance {:>14}",
                i + 1,
                e.name,
                format_number(e.target_delta),
                format_number(e.distance)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InversionDocument {
    pub format_version: String,
    pub target: String,
    pub desired_delta: f64,
    pub impulse: Vec<(String, f64)>,
    pub gains: Vec<(String, f64)>,
    pub achieved_delta: f64,
    pub residual: f64,
}

impl InversionDocument {
    pub fn new<S: Scalar>(target: &str, desired: S, inv: &Inversion<S>) -> Self {
        Self {
            format_version: FORMAT_VERSION.into(),
            target: target.into(),
            desired_delta: r(desired),
            impulse: inv.controls.iter().map(|(f, v)| (f.to_string(), r(*v))).collect(),
            gains: inv.controls.iter().zip(&inv.gains).map(|((f, _), g)| (f.to_string(), r(*g))).collect(),
            achieved_delta: r(inv.achieved_delta),
            residual: r(inv.residual),
        }
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "initial impulse for {} to change by {} (achieved {}, residual {})\n",
            self.target,
            format_number(self.desired_delta),
            format_number(self.achieved_delta),
            format_number(self.residual)
        );
        for ((f, v), (_, g)) in self.impulse.iter().zip(&self.gains) {
            let _ = writeln!(out, "  {f:<24} {:>14}  (gain {})", format_number(*v), format_number(*g));
        }
        out
    }
}
