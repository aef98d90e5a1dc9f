//! Fixed corpus of stored maps and request bodies, each paired with a check
//! against direct library calls.
#![allow(dead_code)]

use serde_json::{json, Value};

use sedmap_core::analysis::{influence_report, stability_report, stabilize_search, transitive_closure};
use sedmap_core::dynamics::simulate;
use sedmap_core::map::{build_map, Factor, FactorKind, MapMetadata, WeightedEdge};
use sedmap_core::scenario::{compare_scenarios, invert_scenario, run_scenario};
use sedmap_core::{fixtures, CognitiveMap, FactorId, ImpulseSchedule, ImpulseVector, Matrix, Scenario, StateVector, TargetSpec};

pub const TOL: f64 = 1e-12;

pub struct Fixture {
    pub name: &'static str,
    pub map: CognitiveMap,
    /// Path below `/v1/maps/{id}/`.
    pub route: &'static str,
    pub body: Value,
}

fn small_map(name: &str, factors: &[(&str, FactorKind)], edges: &[(&str, &str, f64)]) -> CognitiveMap {
    build_map(
        factors.iter().map(|&(id, k)| Factor::bare(id, k)).collect(),
        edges.iter().map(|&(s, t, w)| WeightedEdge::new(s, t, w)).collect(),
        MapMetadata::named(name),
    )
    .unwrap()
}

pub fn two_cycle() -> CognitiveMap {
    use FactorKind::*;
    small_map("two-cycle", &[("a", Target), ("b", Control)], &[("a", "b", 0.8), ("b", "a", 0.9)])
}

pub fn unit_loop() -> CognitiveMap {
    use FactorKind::*;
    small_map("unit-loop", &[("x", Target), ("u", Control)], &[("x", "x", 1.0), ("u", "x", 0.5)])
}

pub fn edgeless() -> CognitiveMap {
    use FactorKind::*;
    small_map("edgeless", &[("a", Target), ("b", Control), ("c", General)], &[])
}

/// Mixed-sign graph with a three-cycle and a self-loop.
pub fn signed_triangle() -> CognitiveMap {
    use FactorKind::*;
    small_map(
        "signed-triangle",
        &[("t", Target), ("c1", Control), ("c2", Control), ("g", General)],
        &[
            ("c1", "g", 0.6),
            ("c2", "g", -0.4),
            ("g", "t", 0.9),
            ("t", "c1", -0.5),
            ("g", "g", 0.3),
            ("c2", "t", 0.2),
        ],
    )
}

/// Spectral radius above 1.
pub fn amplifier() -> CognitiveMap {
    use FactorKind::*;
    small_map(
        "amplifier",
        &[("t", Target), ("c", Control), ("g", General)],
        &[("c", "g", 1.0), ("g", "c", 0.95), ("g", "t", 0.7), ("t", "t", 0.8), ("c", "c", 0.4)],
    )
}

pub fn corpus() -> Vec<Fixture> {
    let f = |name, map, route, body| Fixture { name, map, route, body };
    vec![
        f("simulate-chain", fixtures::chain(), "simulate", json!({"schedule": {"0": {"p": 1.0}}, "horizon": 2})),
        f("simulate-chain-h0", fixtures::chain(), "simulate", json!({"horizon": 0, "baseline": {"p": 0.3, "q": 0.7}})),
        f(
            "simulate-standard-clamped",
            fixtures::standard_model(),
            "simulate",
            json!({"schedule": {"0": {"production": 0.4}, "3": {"investment": -0.2}}, "horizon": 12, "clamp": true,
                   "baseline": {"quality_of_life": 0.5, "employment": 0.6, "budget": 0.4}}),
        ),
        f(
            "simulate-triangle",
            signed_triangle(),
            "simulate",
            json!({"schedule": {"0": {"c1": 1.0, "c2": 0.5}, "5": {"g": -0.3}}, "horizon": 25}),
        ),
        f("simulate-amplifier", amplifier(), "simulate", json!({"schedule": {"0": {"c": 0.1}}, "horizon": 30})),
        f("analyze-edgeless", edgeless(), "analyze", json!({})),
        f("analyze-two-cycle", two_cycle(), "analyze", json!({"tol": 1e-9})),
        f("analyze-standard", fixtures::standard_model(), "analyze", json!({"tol": 1e-6})),
        f("analyze-triangle", signed_triangle(), "analyze", json!({})),
        f("analyze-amplifier", amplifier(), "analyze", json!({"tol": 1e-8})),
        f("stabilize-unit-loop", unit_loop(), "stabilize", json!({})),
        f("stabilize-amplifier", amplifier(), "stabilize", json!({"tol": 1e-6})),
        f("stabilize-amplifier-locked", amplifier(), "stabilize", json!({"locked": ["c->g", "t->t"]})),
        f(
            "run-chain",
            fixtures::chain(),
            "scenarios/run",
            json!({"scenario": {"name": "A", "controls": ["p"], "horizon": 2, "schedule": {"0": {"p": 1.0}}}}),
        ),
        f(
            "run-standard",
            fixtures::standard_model(),
            "scenarios/run",
            json!({"scenario": {"name": "mixed", "controls": ["production", "investment"], "horizon": 10,
                                "schedule": {"0": {"production": 0.5}, "2": {"investment": 0.25}}},
                   "baseline": {"quality_of_life": 0.4}}),
        ),
        f(
            "compare-chain",
            fixtures::chain(),
            "scenarios/compare",
            json!({"scenarios": [
                      {"name": "B", "controls": ["p"], "horizon": 2, "schedule": {"0": {"p": 0.4}}},
                      {"name": "A", "controls": ["p"], "horizon": 2, "schedule": {"0": {"p": 1.0}}}],
                   "target": {"factor": "q", "desiredDelta": 0.45, "horizon": 2}}),
        ),
        f(
            "compare-standard",
            fixtures::standard_model(),
            "scenarios/compare",
            json!({"scenarios": [
                      {"name": "prod", "controls": ["production"], "horizon": 8, "schedule": {"0": {"production": 0.5}}},
                      {"name": "inv", "controls": ["investment"], "horizon": 8, "schedule": {"0": {"investment": 0.5}}},
                      {"name": "none", "controls": ["production"], "horizon": 8}],
                   "target": {"factor": "quality_of_life", "desiredDelta": 0.3, "horizon": 8}}),
        ),
        f(
            "invert-chain",
            fixtures::chain(),
            "scenarios/invert",
            json!({"controls": ["p"], "target": {"factor": "q", "desiredDelta": 1.0, "horizon": 2}}),
        ),
        f(
            "invert-standard-ridge",
            fixtures::standard_model(),
            "scenarios/invert",
            json!({"controls": ["production", "investment"], "ridge": 0.01,
                   "target": {"factor": "quality_of_life", "desiredDelta": 0.2, "horizon": 6}}),
        ),
        f(
            "invert-triangle",
            signed_triangle(),
            "scenarios/invert",
            json!({"controls": ["c1", "c2"], "target": {"factor": "t", "desiredDelta": -0.3, "horizon": 15}}),
        ),
    ]
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL * a.abs().max(b.abs()).max(1.0)
}

fn num(v: &Value, path: &str) -> Result<f64, String> {
    v.pointer(path).and_then(Value::as_f64).ok_or_else(|| format!("missing number at {path}"))
}

fn expect(label: &str, got: f64, want: f64) -> Result<(), String> {
    if close(got, want) {
        Ok(())
    } else {
        Err(format!("{label}: service {got} vs library {want}"))
    }
}

fn expect_rows(label: &str, got: &Value, want: &[Vec<f64>]) -> Result<(), String> {
    let rows = got.as_array().ok_or_else(|| format!("{label}: not an array"))?;
    if rows.len() != want.len() {
        return Err(format!("{label}: {} rows vs {}", rows.len(), want.len()));
    }
    for (i, (row, w)) in rows.iter().zip(want).enumerate() {
        let row = row.as_array().ok_or_else(|| format!("{label}[{i}]: not an array"))?;
        if row.len() != w.len() {
            return Err(format!("{label}[{i}]: length {} vs {}", row.len(), w.len()));
        }
        for (j, (g, &x)) in row.iter().zip(w).enumerate() {
            expect(&format!("{label}[{i}][{j}]"), g.as_f64().unwrap_or(f64::NAN), x)?;
        }
    }
    Ok(())
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m[(i, j)]).collect()).collect()
}

fn baseline(map: &CognitiveMap, body: &Value) -> StateVector {
    let mut y = StateVector::zeros(map.len());
    if let Some(levels) = body.get("baseline").and_then(Value::as_object) {
        for (f, v) in levels {
            y.0[map.index_of(&FactorId::new(f.clone())).unwrap()] = v.as_f64().unwrap();
        }
    }
    y
}

fn scenario(doc: &Value) -> Scenario {
    let controls = doc["controls"].as_array().unwrap().iter().map(|c| FactorId::new(c.as_str().unwrap())).collect();
    let mut s = Scenario::new(doc["name"].as_str().unwrap(), controls, doc["horizon"].as_u64().unwrap() as usize);
    s.clamp = doc.get("clamp").and_then(Value::as_bool).unwrap_or(false);
    if let Some(schedule) = doc.get("schedule").and_then(Value::as_object) {
        for (step, row) in schedule {
            for (f, v) in row.as_object().unwrap() {
                s = s.with_impulse(step.parse().unwrap(), f, v.as_f64().unwrap());
            }
        }
    }
    s
}

fn target(doc: &Value) -> TargetSpec {
    TargetSpec {
        target: FactorId::new(doc["factor"].as_str().unwrap()),
        desired_delta: doc["desiredDelta"].as_f64().unwrap(),
        horizon: doc["horizon"].as_u64().unwrap() as usize,
    }
}

fn states(tr: &sedmap_core::Trajectory) -> Vec<Vec<f64>> {
    tr.states.iter().map(|s| s.0.clone()).collect()
}

fn impulses(tr: &sedmap_core::Trajectory) -> Vec<Vec<f64>> {
    tr.impulses.iter().map(|o| o.0.clone()).collect()
}

/// Compares a decoded endpoint response with the library computation.
pub fn check(fx: &Fixture, resp: &Value) -> Result<(), String> {
    let map = &fx.map;
    let body = &fx.body;
    let tol = body.get("tol").and_then(Value::as_f64).unwrap_or(1e-6);
    match fx.route {
        "simulate" => {
            let mut schedule = ImpulseSchedule::new();
            if let Some(s) = body.get("schedule").and_then(Value::as_object) {
                for (step, row) in s {
                    let mut o = ImpulseVector::zeros(map.len());
                    for (f, v) in row.as_object().unwrap() {
                        o.0[map.index_of(&FactorId::new(f.clone())).unwrap()] = v.as_f64().unwrap();
                    }
                    schedule.insert(step.parse().unwrap(), o);
                }
            }
            let horizon = body["horizon"].as_u64().unwrap() as usize;
            let clamp = body.get("clamp").and_then(Value::as_bool).unwrap_or(false);
            let tr = simulate(map, &baseline(map, body), &schedule, horizon, clamp).map_err(|e| e.to_string())?;
            expect_rows("states", &resp["states"], &states(&tr))?;
            expect_rows("impulses", &resp["impulses"], &impulses(&tr))
        }
        "analyze" => {
            let closure = transitive_closure(map);
            let influence = influence_report(&closure).map_err(|e| e.to_string())?;
            let stability = stability_report(map, tol).map_err(|e| e.to_string())?;
            expect_rows("positiveClosure", &resp["positiveClosure"], &matrix_rows(&closure.positive))?;
            expect_rows("negativeClosure", &resp["negativeClosure"], &matrix_rows(&closure.negative))?;
            expect_rows("influence", &resp["influence"], &matrix_rows(&influence.influence))?;
            expect_rows("consonance", &resp["consonance"], &matrix_rows(&influence.consonance))?;
            expect_rows("dissonance", &resp["dissonance"], &matrix_rows(&influence.dissonance))?;
            expect("spectralRadius", num(resp, "/stability/spectralRadius")?, stability.spectral_radius)?;
            let class = resp.pointer("/stability/classification").and_then(Value::as_str);
            if class != Some(stability.classification.as_str()) {
                return Err(format!("classification {class:?} vs {}", stability.classification));
            }
            Ok(())
        }
        "stabilize" => {
            let locked: Vec<(FactorId, FactorId)> = body
                .get("locked")
                .and_then(Value::as_array)
                .map(|l| {
                    l.iter()
                        .map(|k| {
                            let (s, t) = k.as_str().unwrap().split_once("->").unwrap();
                            (FactorId::new(s), FactorId::new(t))
                        })
                        .collect()
                })
                .unwrap_or_default();
            let plan = stabilize_search(map, &locked, tol).map_err(|e| e.to_string())?;
            if resp["success"].as_bool() != Some(plan.success) {
                return Err("success flag differs".into());
            }
            expect("initialRadius", num(resp, "/initialRadius")?, plan.initial_radius)?;
            expect("resultingRadius", num(resp, "/resultingRadius")?, plan.resulting_radius)?;
            let mods = resp["modifications"].as_array().ok_or("modifications missing")?;
            if mods.len() != plan.modifications.len() {
                return Err(format!("{} modifications vs {}", mods.len(), plan.modifications.len()));
            }
            for (m, p) in mods.iter().zip(&plan.modifications) {
                if m["source"] != p.source.as_str() || m["target"] != p.target.as_str() {
                    return Err("modified edge differs".into());
                }
                expect("newWeight", num(m, "/newWeight")?, p.new_weight)?;
            }
            Ok(())
        }
        "scenarios/run" => {
            let s = scenario(&body["scenario"]);
            let r = run_scenario(map, &baseline(map, body), &s).map_err(|e| e.to_string())?;
            expect("targetDelta", num(resp, "/targetDelta")?, r.target_delta)?;
            expect_rows("trajectory.states", &resp["trajectory"]["states"], &states(&r.trajectory))
        }
        "scenarios/compare" => {
            let list: Vec<Scenario> =
                body["scenarios"].as_array().unwrap().iter().map(scenario).collect();
            let ranked =
                compare_scenarios(map, &baseline(map, body), &list, &target(&body["target"])).map_err(|e| e.to_string())?;
            let got = resp["ranking"].as_array().ok_or("ranking missing")?;
            if got.len() != ranked.len() {
                return Err("ranking length differs".into());
            }
            for (g, r) in got.iter().zip(&ranked) {
                if g["name"] != r.name.as_str() {
                    return Err(format!("ranking order: {} vs {}", g["name"], r.name));
                }
                expect("targetDelta", num(g, "/targetDelta")?, r.target_delta)?;
                expect("distance", num(g, "/distance")?, r.distance)?;
            }
            Ok(())
        }
        "scenarios/invert" => {
            let controls: Vec<FactorId> =
                body["controls"].as_array().unwrap().iter().map(|c| FactorId::new(c.as_str().unwrap())).collect();
            let ridge = body.get("ridge").and_then(Value::as_f64).unwrap_or(0.0);
            let inv = invert_scenario(map, &baseline(map, body), &controls, &target(&body["target"]), ridge)
                .map_err(|e| e.to_string())?;
            let got = resp["impulse"].as_array().ok_or("impulse missing")?;
            if got.len() != inv.controls.len() {
                return Err("impulse length differs".into());
            }
            for (g, (id, v)) in got.iter().zip(&inv.controls) {
                if g[0] != id.as_str() {
                    return Err("control order differs".into());
                }
                expect(&format!("impulse {id}"), g[1].as_f64().unwrap_or(f64::NAN), *v)?;
            }
            expect("achievedDelta", num(resp, "/achievedDelta")?, inv.achieved_delta)?;
            expect("residual", num(resp, "/residual")?, inv.residual)
        }
        other => Err(format!("unknown route {other}")),
    }
}
