//! What-if scenarios against the target factor: running, ranking and
//! inverting control impulses.

use std::collections::BTreeMap;

use crate::dynamics::{cumulative_operator, simulate, ImpulseSchedule, ImpulseVector, StateVector, Trajectory};
use crate::error::{Error, Result};
use crate::map::{CognitiveMap, FactorId, FactorKind};
use crate::scalar::Scalar;

/// Control impulses injected on a map over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<S> {
    pub name: String,
    pub controls: Vec<FactorId>,
    /// Step → control factor → injected gain.
    pub schedule: BTreeMap<usize, BTreeMap<FactorId, S>>,
    pub horizon: usize,
    pub clamp: bool,
}

impl<S: Scalar> Scenario<S> {
    pub fn new(name: impl Into<String>, controls: Vec<FactorId>, horizon: usize) -> Self {
        Self { name: name.into(), controls, schedule: BTreeMap::new(), horizon, clamp: false }
    }

    /// Adds `value` on `factor` at `step`.
    pub fn with_impulse(mut self, step: usize, factor: &str, value: S) -> Self {
        self.schedule.entry(step).or_default().insert(FactorId::new(factor), value);
        self
    }

    /// Dense schedule aligned with `map`, after checking the scenario against it.
    pub fn dense_schedule(&self, map: &CognitiveMap<S>) -> Result<ImpulseSchedule<S>> {
        let invalid = |reason: String| Error::InvalidScenario { name: self.name.clone(), reason };
        if self.horizon < 1 {
            return Err(invalid("horizon must be at least 1".into()));
        }
        for c in &self.controls {
            let f = map.factor(c).ok_or_else(|| Error::UnknownFactor(c.clone()))?;
            if f.kind != FactorKind::Control {
                return Err(Error::NotControl(c.clone()));
            }
        }
        let mut out = ImpulseSchedule::new();
        for (&step, entries) in &self.schedule {
            if step > self.horizon {
                return Err(Error::ScheduleBeyondHorizon { step, horizon: self.horizon });
            }
            let mut o = ImpulseVector::zeros(map.len());
            for (id, &v) in entries {
                let idx = map.index_of(id).ok_or_else(|| Error::UnknownFactor(id.clone()))?;
                if v != S::zero() && !self.controls.contains(id) {
                    return Err(Error::NonControlImpulse(id.clone()));
                }
                o.0[idx] += v;
            }
            out.insert(step, o);
        }
        Ok(out)
    }
}

/// Desired change of a target factor over a horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetSpec<S> {
    pub target: FactorId,
    pub desired_delta: S,
    pub horizon: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult<S> {
    pub trajectory: Trajectory<S>,
    pub target: FactorId,
    /// `Y_target(T) − Y_target,base`.
    pub target_delta: S,
    /// `Y(T) − Y_base` per factor, in map order.
    pub final_deltas: Vec<(FactorId, S)>,
}

fn target_index<S: Scalar>(map: &CognitiveMap<S>, target: &FactorId) -> Result<usize> {
    let f = map.factor(target).ok_or_else(|| Error::UnknownFactor(target.clone()))?;
    if f.kind != FactorKind::Target {
        return Err(Error::NotTarget(target.clone()));
    }
    Ok(map.index_of(target).expect("factor exists"))
}

fn run_against<S: Scalar>(
    map: &CognitiveMap<S>,
    base: &StateVector<S>,
    scenario: &Scenario<S>,
    target: &FactorId,
) -> Result<ScenarioResult<S>> {
    let t = target_index(map, target)?;
    let schedule = scenario.dense_schedule(map)?;
    let trajectory = simulate(map, base, &schedule, scenario.horizon, scenario.clamp)?;
    let last = trajectory.final_state();
    let final_deltas: Vec<_> = map
        .factors()
        .iter()
        .zip(last.0.iter().zip(&base.0))
        .map(|(f, (&y, &b))| (f.id.clone(), y - b))
        .collect();
    let target_delta = final_deltas[t].1;
    Ok(ScenarioResult { trajectory, target: target.clone(), target_delta, final_deltas })
}

/// Runs a scenario; the outcome is measured on the map's target factor.
pub fn run_scenario<S: Scalar>(
    map: &CognitiveMap<S>,
    base: &StateVector<S>,
    scenario: &Scenario<S>,
) -> Result<ScenarioResult<S>> {
    let target = map.target().ok_or(Error::NoTarget)?.id.clone();
    run_against(map, base, scenario, &target)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedScenario<S> {
    pub name: String,
    pub target_delta: S,
    pub distance: S,
}

/// Ranks scenarios by `|targetDelta − desiredDelta|`, ties by name.
pub fn compare_scenarios<S: Scalar>(
    map: &CognitiveMap<S>,
    base: &StateVector<S>,
    scenarios: &[Scenario<S>],
    spec: &TargetSpec<S>,
) -> Result<Vec<RankedScenario<S>>> {
    target_index(map, &spec.target)?;
    let mut ranked = Vec::with_capacity(scenarios.len());
    for s in scenarios {
        if s.horizon != spec.horizon {
            return Err(Error::HorizonMismatch { name: s.name.clone(), expected: spec.horizon, got: s.horizon });
        }
        let r = run_against(map, base, s, &spec.target)?;
        ranked.push(RankedScenario {
            name: s.name.clone(),
            target_delta: r.target_delta,
            distance: (r.target_delta - spec.desired_delta).abs(),
        });
    }
    ranked.sort_by(|a, b| {
        a.distance
            .partial_cmp(&b.distance)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.name.cmp(&b.name))
    });
    Ok(ranked)
}

/// `∂Y_target(T)/∂O_i(0)` for every factor: the target row of `Σ_{t≤T} Mᵗ`.
pub fn sensitivity<S: Scalar>(map: &CognitiveMap<S>, spec: &TargetSpec<S>) -> Result<Vec<S>> {
    let t = map.index_of(&spec.target).ok_or_else(|| Error::UnknownFactor(spec.target.clone()))?;
    Ok(cumulative_operator(map, spec.horizon).row(t).to_vec())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Inversion<S> {
    /// Initial impulse, zero off the controls.
    pub impulse: ImpulseVector<S>,
    pub controls: Vec<(FactorId, S)>,
    /// Gains `g_c` of the target on each control.
    pub gains: Vec<S>,
    pub achieved_delta: S,
    /// `achieved − desired`.
    pub residual: S,
}

/// Gains below this are treated as zero.
const UNREACHABLE_GAIN: f64 = 1e-12;

/// Initial control impulse minimizing
/// `(Y_target(T) − Y_target,base − desired)² + λ‖o‖²`.
///
/// The target responds linearly, `Δ = g·o`, so the minimizer is
/// `o = g·desired / (‖g‖² + λ)`; at `λ = 0` this is the minimum-norm exact
/// solution.
pub fn invert_scenario<S: Scalar>(
    map: &CognitiveMap<S>,
    base: &StateVector<S>,
    controls: &[FactorId],
    spec: &TargetSpec<S>,
    ridge: S,
) -> Result<Inversion<S>> {
    if base.0.len() != map.len() {
        return Err(Error::LengthMismatch { expected: map.len(), got: base.0.len() });
    }
    if controls.is_empty() {
        return Err(Error::NoControls);
    }
    if ridge.is_nan() || ridge < S::zero() {
        return Err(Error::InvalidScenario { name: "inversion".into(), reason: "ridge must be ≥ 0".into() });
    }
    target_index(map, &spec.target)?;
    let mut idx = Vec::with_capacity(controls.len());
    for c in controls {
        let f = map.factor(c).ok_or_else(|| Error::UnknownFactor(c.clone()))?;
        if f.kind != FactorKind::Control {
            return Err(Error::NotControl(c.clone()));
        }
        idx.push(map.index_of(c).expect("factor exists"));
    }
    let row = sensitivity(map, spec)?;
    let gains: Vec<S> = idx.iter().map(|&i| row[i]).collect();
    let gain_max = crate::scalar::max_abs(&gains);
    let desired = spec.desired_delta;

    let mut impulse = ImpulseVector::zeros(map.len());
    if gain_max < S::lit(UNREACHABLE_GAIN) {
        if desired != S::zero() {
            return Err(Error::Unreachable);
        }
    } else {
        let denom = gains.iter().map(|&g| g * g).sum::<S>() + ridge;
        let scale = desired / denom;
        for (&i, &g) in idx.iter().zip(&gains) {
            impulse.0[i] += g * scale;
        }
    }
    let achieved: S = row.iter().zip(&impulse.0).map(|(&g, &o)| g * o).sum();
    Ok(Inversion {
        controls: controls.iter().cloned().zip(idx.iter().map(|&i| impulse.0[i])).collect(),
        impulse,
        gains,
        achieved_delta: achieved,
        residual: achieved - desired,
    })
}
