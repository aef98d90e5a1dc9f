//! Impulse processes on a cognitive map.
//!
//! An impulse `O(t)` is the per-factor gain at step `t`. It propagates along
//! edge direction, `O(t+1)_j = Σ_i w(e_i, e_j)·O(t)_i`, and accumulates into
//! the state: `Y(t+1) = Y(t) + O(t+1)`. The first impulse already moves the
//! state, `Y(0) = Y_base + O(0)`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::map::CognitiveMap;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Normalized indicator levels, index-aligned with the map's factors.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector<S>(pub Vec<S>);

/// Per-factor gain for one step.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseVector<S>(pub Vec<S>);

impl<S: Scalar> StateVector<S> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![S::zero(); n])
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }
}

impl<S: Scalar> ImpulseVector<S> {
    pub fn zeros(n: usize) -> Self {
        Self(vec![S::zero(); n])
    }

    /// `scale` on coordinate `index`, zero elsewhere.
    pub fn unit(n: usize, index: usize, scale: S) -> Self {
        let mut v = Self::zeros(n);
        v.0[index] = scale;
        v
    }

    pub fn as_slice(&self) -> &[S] {
        &self.0
    }

    pub fn max_abs(&self) -> S {
        crate::scalar::max_abs(&self.0)
    }
}

/// External injections keyed by step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ImpulseSchedule<S> {
    steps: BTreeMap<usize, ImpulseVector<S>>,
}

impl<S: Scalar> ImpulseSchedule<S> {
    pub fn new() -> Self {
        Self { steps: BTreeMap::new() }
    }

    /// Schedule with a single injection at `t = 0`.
    pub fn initial(o: ImpulseVector<S>) -> Self {
        let mut s = Self::new();
        s.insert(0, o);
        s
    }

    /// Replaces any earlier injection at `step`.
    pub fn insert(&mut self, step: usize, o: ImpulseVector<S>) {
        self.steps.insert(step, o);
    }

    pub fn get(&self, step: usize) -> Option<&ImpulseVector<S>> {
        self.steps.get(&step)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ImpulseVector<S>)> {
        self.steps.iter().map(|(&k, v)| (k, v))
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn last_step(&self) -> Option<usize> {
        self.steps.keys().next_back().copied()
    }

    /// `a·self + b·other`, step by step.
    pub fn combine(&self, a: S, other: &Self, b: S, n: usize) -> Self {
        let mut out = Self::new();
        let keys: std::collections::BTreeSet<usize> =
            self.steps.keys().chain(other.steps.keys()).copied().collect();
        for k in keys {
            let zero = ImpulseVector::zeros(n);
            let x = self.steps.get(&k).unwrap_or(&zero);
            let y = other.steps.get(&k).unwrap_or(&zero);
            let v = x.0.iter().zip(&y.0).map(|(&x, &y)| a * x + b * y).collect();
            out.insert(k, ImpulseVector(v));
        }
        out
    }
}

/// Y and O series for `t = 0..=horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<S> {
    pub horizon: usize,
    pub states: Vec<StateVector<S>>,
    pub impulses: Vec<ImpulseVector<S>>,
}

impl<S: Scalar> Trajectory<S> {
    pub fn final_state(&self) -> &StateVector<S> {
        self.states.last().expect("trajectory has at least one row")
    }
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// One propagation step: `O′_j = Σ_i w(e_i, e_j)·O_i`.
pub fn impulse_step<S: Scalar>(map: &CognitiveMap<S>, o: &ImpulseVector<S>) -> Result<ImpulseVector<S>> {
    check_len(map.len(), o.0.len())?;
    let mut next = vec![S::zero(); map.len()];
    for e in map.edges() {
        let i = map.index_of(&e.source).expect("validated endpoint");
        let j = map.index_of(&e.target).expect("validated endpoint");
        next[j] += e.weight * o.0[i];
    }
    Ok(ImpulseVector(next))
}

/// Runs the impulse process for `horizon` steps.
pub fn simulate<S: Scalar>(
    map: &CognitiveMap<S>,
    base: &StateVector<S>,
    schedule: &ImpulseSchedule<S>,
    horizon: usize,
    clamp: bool,
) -> Result<Trajectory<S>> {
    let n = map.len();
    check_len(n, base.0.len())?;
    for (step, o) in schedule.iter() {
        if step > horizon {
            return Err(Error::ScheduleBeyondHorizon { step, horizon });
        }
        check_len(n, o.0.len())?;
    }

    let clip = |y: &mut StateVector<S>| {
        if clamp {
            for v in &mut y.0 {
                *v = v.max(S::zero()).min(S::one());
            }
        }
    };

    let mut o = schedule.get(0).cloned().unwrap_or_else(|| ImpulseVector::zeros(n));
    let mut y = StateVector(base.0.iter().zip(&o.0).map(|(&b, &d)| b + d).collect());
    clip(&mut y);

    let mut states = Vec::with_capacity(horizon + 1);
    let mut impulses = Vec::with_capacity(horizon + 1);
    states.push(y.clone());
    impulses.push(o.clone());

    for t in 0..horizon {
        let mut next = impulse_step(map, &o)?;
        if let Some(ext) = schedule.get(t + 1) {
            for (a, &b) in next.0.iter_mut().zip(&ext.0) {
                *a += b;
            }
        }
        for (a, &b) in y.0.iter_mut().zip(&next.0) {
            *a += b;
        }
        clip(&mut y);
        o = next;
        states.push(y.clone());
        impulses.push(o.clone());
    }

    Ok(Trajectory { horizon, states, impulses })
}

/// `Σ_{t=0..T} Mᵗ`, accumulated over explicit matrix powers.
pub fn cumulative_operator<S: Scalar>(map: &CognitiveMap<S>, horizon: usize) -> Matrix<S> {
    let m = map.propagation_matrix();
    let mut power = Matrix::identity(map.len());
    let mut sum = power.clone();
    for _ in 0..horizon {
        power = power.mul(&m);
        sum.add_assign(&power);
    }
    sum
}

/// `Y(T) − Y_base` for a single initial impulse without clamping, from
/// matrix powers instead of step-by-step propagation.
pub fn closed_form_state<S: Scalar>(
    map: &CognitiveMap<S>,
    initial: &ImpulseVector<S>,
    horizon: usize,
) -> Result<StateVector<S>> {
    check_len(map.len(), initial.0.len())?;
    Ok(StateVector(cumulative_operator(map, horizon).mul_vec(&initial.0)))
}
