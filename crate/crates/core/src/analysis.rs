//! Static analysis of a map: signed path closure, influence and consonance
//! indicators, stability via the spectral radius, and a greedy search for
//! weight reductions that make a map stable.

use crate::dynamics::{impulse_step, ImpulseVector};
use crate::error::{Error, Result};
use crate::map::{CognitiveMap, FactorId};
use crate::matrix::Matrix;
use crate::scalar::{sign, Scalar};

/// Best positive and best negative path influence between every pair.
///
/// `positive[i][j]` is the largest product over simple paths `i → j` whose
/// product is positive; `negative[i][j]` is the largest magnitude among
/// simple paths with a negative product. Diagonal entries cover simple
/// cycles through `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosurePair<S> {
    pub positive: Matrix<S>,
    pub negative: Matrix<S>,
}

/// Signed max-product composition iterated to a fixpoint over walks.
///
/// Every simple path is a walk, so these values bound the simple-path
/// closure from above. They coincide whenever no walk improves on a simple
/// path by looping through a negative cycle.
pub fn walk_closure<S: Scalar>(map: &CognitiveMap<S>) -> ClosurePair<S> {
    let n = map.len();
    let w = map.weight_matrix();
    let mut pos = Matrix::zeros(n);
    let mut neg = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let x = w[(i, j)];
            if x > S::zero() {
                pos[(i, j)] = x;
            } else if x < S::zero() {
                neg[(i, j)] = -x;
            }
        }
    }
    // Each round extends best walks by one edge; a round without change is the fixpoint.
    // Magnitudes never grow along a walk, so the number of distinct improvements is finite
    // in exact arithmetic; the cap guards against rounding ping-pong.
    let cap = 4 * n * n + 16;
    for _ in 0..cap {
        let mut changed = false;
        for i in 0..n {
            for m in 0..n {
                let (p, q) = (pos[(i, m)], neg[(i, m)]);
                if p == S::zero() && q == S::zero() {
                    continue;
                }
                for j in 0..n {
                    let x = w[(m, j)];
                    if x == S::zero() {
                        continue;
                    }
                    let (np, nq) = if x > S::zero() { (p * x, q * x) } else { (q * -x, p * -x) };
                    if np > pos[(i, j)] {
                        pos[(i, j)] = np;
                        changed = true;
                    }
                    if nq > neg[(i, j)] {
                        neg[(i, j)] = nq;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    ClosurePair { positive: pos, negative: neg }
}

/// Exact simple-path closure.
///
/// Depth-first search from every source over simple paths, pruned with the
/// walk closure as an optimistic bound on what any extension can still reach.
pub fn transitive_closure<S: Scalar>(map: &CognitiveMap<S>) -> ClosurePair<S> {
    let n = map.len();
    let bound = walk_closure(map);
    let mut adjacency: Vec<Vec<(usize, S)>> = vec![Vec::new(); n];
    for e in map.edges() {
        let i = map.index_of(&e.source).expect("validated endpoint");
        let j = map.index_of(&e.target).expect("validated endpoint");
        if e.weight != S::zero() {
            adjacency[i].push((j, e.weight));
        }
    }

    let mut pos = Matrix::zeros(n);
    let mut neg = Matrix::zeros(n);
    let mut search = PathSearch {
        adjacency: &adjacency,
        bound: &bound,
        visited: vec![false; n],
        best_pos: vec![S::zero(); n],
        best_neg: vec![S::zero(); n],
        source: 0,
        slack: S::one() + S::lit(1e-9),
    };
    for source in 0..n {
        search.source = source;
        search.best_pos.iter_mut().for_each(|v| *v = S::zero());
        search.best_neg.iter_mut().for_each(|v| *v = S::zero());
        search.visited[source] = true;
        search.extend(source, S::one());
        search.visited[source] = false;
        for j in 0..n {
            pos[(source, j)] = search.best_pos[j];
            neg[(source, j)] = search.best_neg[j];
        }
    }
    ClosurePair { positive: pos, negative: neg }
}

struct PathSearch<'a, S> {
    adjacency: &'a [Vec<(usize, S)>],
    bound: &'a ClosurePair<S>,
    visited: Vec<bool>,
    best_pos: Vec<S>,
    best_neg: Vec<S>,
    source: usize,
    slack: S,
}

impl<S: Scalar> PathSearch<'_, S> {
    fn record(&mut self, node: usize, product: S) {
        if product > S::zero() {
            if product > self.best_pos[node] {
                self.best_pos[node] = product;
            }
        } else if -product > self.best_neg[node] {
            self.best_neg[node] = -product;
        }
    }

    /// Whether a path currently at `node` with `product` could still improve any entry.
    fn promising(&self, node: usize, product: S) -> bool {
        let mag = product.abs() * self.slack;
        let (same, flip) = (&self.bound.positive, &self.bound.negative);
        (0..self.best_pos.len()).any(|j| {
            let (to_pos, to_neg) = if product > S::zero() {
                (same[(node, j)], flip[(node, j)])
            } else {
                (flip[(node, j)], same[(node, j)])
            };
            mag * to_pos > self.best_pos[j] || mag * to_neg > self.best_neg[j]
        })
    }

    fn extend(&mut self, node: usize, product: S) {
        for k in 0..self.adjacency[node].len() {
            let (next, w) = self.adjacency[node][k];
            let p = product * w;
            if next == self.source {
                self.record(next, p);
                continue;
            }
            if self.visited[next] {
                continue;
            }
            self.record(next, p);
            if self.promising(next, p) {
                self.visited[next] = true;
                self.extend(next, p);
                self.visited[next] = false;
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorInfluence<S> {
    /// Mean of the factor's row of `P`.
    pub influence_on_system: S,
    /// Mean of the factor's column of `P`.
    pub susceptibility: S,
    /// Mean of the factor's row of `C`.
    pub consonance_on_system: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceReport<S> {
    pub influence: Matrix<S>,
    pub consonance: Matrix<S>,
    pub dissonance: Matrix<S>,
    pub per_factor: Vec<FactorInfluence<S>>,
}

/// Influence `P = sign(V⁺ − V⁻)·max(V⁺, V⁻)`, consonance
/// `C = |V⁺ − V⁻| / (V⁺ + V⁻)` (1 where both vanish), dissonance `1 − C`.
pub fn influence_report<S: Scalar>(closure: &ClosurePair<S>) -> Result<InfluenceReport<S>> {
    let n = closure.positive.dim();
    if closure.negative.dim() != n {
        return Err(Error::ShapeMismatch);
    }
    let mut p = Matrix::zeros(n);
    let mut c = Matrix::zeros(n);
    let mut d = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            let vp = closure.positive[(i, j)];
            let vn = closure.negative[(i, j)];
            p[(i, j)] = sign(vp - vn) * vp.max(vn);
            let total = vp + vn;
            c[(i, j)] = if total == S::zero() { S::one() } else { (vp - vn).abs() / total };
            d[(i, j)] = S::one() - c[(i, j)];
        }
    }
    let inv_n = if n == 0 { S::zero() } else { S::one() / S::from_usize(n).expect("small n") };
    let per_factor = (0..n)
        .map(|k| FactorInfluence {
            influence_on_system: (0..n).map(|j| p[(k, j)]).sum::<S>() * inv_n,
            susceptibility: (0..n).map(|i| p[(i, k)]).sum::<S>() * inv_n,
            consonance_on_system: (0..n).map(|j| c[(k, j)]).sum::<S>() * inv_n,
        })
        .collect();
    Ok(InfluenceReport { influence: p, consonance: c, dissonance: d, per_factor })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Marginal,
    Unstable,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Stability::Stable => "stable",
            Stability::Marginal => "marginal",
            Stability::Unstable => "unstable",
        }
    }
}

impl std::fmt::Display for Stability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport<S> {
    pub spectral_radius: S,
    pub classification: Stability,
    pub tolerance: S,
    /// Largest power `k` of the propagation operator examined.
    pub power: u64,
}

/// Upper bound on doublings; `k = 2^60` is far beyond any useful estimate.
const MAX_DOUBLINGS: u32 = 60;

/// Spectral radius by the Gelfand limit `‖Mᵏ‖₂^(1/k)`, doubling `k` until
/// the relative change drops below `tol / 2`.
///
/// Powers are kept normalized, `Mᵏ = e^L·B` with `‖B‖₂ = 1`, so unstable
/// operators never overflow.
pub fn spectral_radius<S: Scalar>(op: &Matrix<S>, tol: S) -> (S, u64) {
    let half_tol = tol / S::lit(2.0);
    let norm = op.norm2();
    if norm == S::zero() {
        return (S::zero(), 1);
    }
    let mut b = op.clone();
    b.scale(S::one() / norm);
    let mut log_scale = norm.ln();
    let mut k: u64 = 1;
    let mut estimate = norm;
    for _ in 0..MAX_DOUBLINGS {
        let mut sq = b.mul(&b);
        let nu = sq.norm2();
        if nu == S::zero() {
            return (S::zero(), k * 2);
        }
        sq.scale(S::one() / nu);
        b = sq;
        log_scale = log_scale * S::lit(2.0) + nu.ln();
        k *= 2;
        let next = (log_scale / S::from_u64(k).expect("power fits scalar")).exp();
        let change = (next - estimate).abs();
        estimate = next;
        if change <= half_tol * next {
            break;
        }
    }
    (estimate, k)
}

pub fn stability_report<S: Scalar>(map: &CognitiveMap<S>, tol: S) -> Result<StabilityReport<S>> {
    if tol.is_nan() || tol <= S::zero() {
        return Err(Error::Tolerance(tol.to_f64_lossy()));
    }
    let (rho, power) = spectral_radius(&map.propagation_matrix(), tol);
    Ok(StabilityReport { spectral_radius: rho, classification: classify(rho, tol), tolerance: tol, power })
}

fn classify<S: Scalar>(rho: S, tol: S) -> Stability {
    if rho < S::one() - tol {
        Stability::Stable
    } else if rho > S::one() + tol {
        Stability::Unstable
    } else {
        Stability::Marginal
    }
}

/// Step count after which every impulse has shrunk below `eps` times its
/// initial Euclidean norm, or `None` if no contracting power `M^(2^j)` is
/// found within `max_power`.
///
/// With `q = ‖Mᵏ‖₂ < 1` and `C = max_{r<k} ‖Mʳ‖₂`, any `t = m·k + r` has
/// `‖Mᵗ‖₂ ≤ C·qᵐ`, so `t ≥ k·⌈ln(eps/C) / ln q⌉` suffices.
pub fn decay_horizon<S: Scalar>(map: &CognitiveMap<S>, eps: S, max_power: u64) -> Option<u64> {
    let m = map.propagation_matrix();
    let n = map.len();
    let mut power = m.clone();
    let mut k: u64 = 1;
    let mut q = power.norm2();
    while q >= S::one() {
        if k >= max_power {
            return None;
        }
        power = power.mul(&power);
        k *= 2;
        q = power.norm2();
    }
    if q == S::zero() {
        return Some(k);
    }
    let mut c = S::one();
    let mut p = Matrix::identity(n);
    for _ in 1..k {
        p = p.mul(&m);
        c = c.max(p.norm2());
    }
    let ratio = (eps / c).ln() / q.ln();
    let blocks = if ratio <= S::zero() { 0 } else { ratio.ceil().to_u64()? };
    Some(k * blocks.max(1))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeModification<S> {
    pub source: FactorId,
    pub target: FactorId,
    pub old_weight: S,
    pub new_weight: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilizationPlan<S> {
    pub modifications: Vec<EdgeModification<S>>,
    pub initial_radius: S,
    pub resulting_radius: S,
    /// `resulting_radius < 1 − tol`.
    pub success: bool,
}

impl<S: Scalar> StabilizationPlan<S> {
    /// Applies the modifications in order.
    pub fn apply(&self, map: &CognitiveMap<S>) -> Result<CognitiveMap<S>> {
        let mut out = map.clone();
        for m in &self.modifications {
            out = out.with_weight(&m.source, &m.target, m.new_weight)?;
        }
        Ok(out)
    }
}

/// Magnitudes below this after halving are set to zero.
const SNAP_TO_ZERO: f64 = 1e-9;

/// Greedy search: repeatedly halve the unlocked edge whose halving lowers
/// the spectral radius most, until the map is stable or no halving helps.
///
/// `locked` holds `(source, target)` pairs that must keep their weight.
pub fn stabilize_search<S: Scalar>(
    map: &CognitiveMap<S>,
    locked: &[(FactorId, FactorId)],
    tol: S,
) -> Result<StabilizationPlan<S>> {
    for (s, t) in locked {
        if map.weight(s, t).is_none() {
            return Err(Error::UnknownEdge(format!("{s}->{t}")));
        }
    }
    let initial = stability_report(map, tol)?.spectral_radius;
    let stable_below = S::one() - tol;
    let free: Vec<usize> = map
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, e)| !locked.iter().any(|(s, t)| s == &e.source && t == &e.target))
        .map(|(i, _)| i)
        .collect();
    if initial >= stable_below && free.is_empty() {
        return Err(Error::AllEdgesLocked { rho: initial.to_f64_lossy() });
    }

    let mut current = map.clone();
    let mut rho = initial;
    let mut modifications = Vec::new();
    let snap = S::lit(SNAP_TO_ZERO);
    while rho >= stable_below {
        let mut best: Option<(S, usize, S)> = None;
        for &idx in &free {
            let edge = &current.edges()[idx];
            if edge.weight == S::zero() {
                continue;
            }
            let mut halved = edge.weight * S::lit(0.5);
            if halved.abs() < snap {
                halved = S::zero();
            }
            let candidate = current.with_weight(&edge.source, &edge.target, halved)?;
            let r = stability_report(&candidate, tol)?.spectral_radius;
            if best.is_none_or(|(b, _, _)| r < b) {
                best = Some((r, idx, halved));
            }
        }
        match best {
            Some((r, idx, new_weight)) if r < rho => {
                let edge = &current.edges()[idx];
                modifications.push(EdgeModification {
                    source: edge.source.clone(),
                    target: edge.target.clone(),
                    old_weight: edge.weight,
                    new_weight,
                });
                current = current.with_weight(&edge.source.clone(), &edge.target.clone(), new_weight)?;
                rho = r;
            }
            _ => break,
        }
    }
    Ok(StabilizationPlan {
        modifications,
        initial_radius: initial,
        resulting_radius: rho,
        success: rho < stable_below,
    })
}

/// Largest `‖O(t)‖∞` reached by a unit impulse on `factor` within `steps`.
pub fn impulse_peak<S: Scalar>(map: &CognitiveMap<S>, factor: usize, steps: usize) -> Result<S> {
    let mut o = ImpulseVector::unit(map.len(), factor, S::one());
    let mut peak = o.max_abs();
    for _ in 0..steps {
        o = impulse_step(map, &o)?;
        peak = peak.max(o.max_abs());
    }
    Ok(peak)
}
