//! Random map generators and independent oracles for the test suites.
#![allow(dead_code)]

use rand::Rng;
use sedmap_core::map::{build_map, CognitiveMap, Factor, FactorKind, MapMetadata, WeightedEdge};

/// Random map with `n` factors, each ordered pair (self-loops included)
/// present with probability `density`, weights uniform in [−1, 1] on a 1e-6 grid.
///
/// Factor 0 is the target, the next `controls` factors are controls.
pub fn random_map<R: Rng>(rng: &mut R, n: usize, density: f64, controls: usize) -> CognitiveMap<f64> {
    let factors = (0..n)
        .map(|i| {
            let kind = if i == 0 {
                FactorKind::Target
            } else if i <= controls {
                FactorKind::Control
            } else if rng.gen_bool(0.5) {
                FactorKind::General
            } else {
                FactorKind::Special
            };
            Factor::new(format!("f{i}"), format!("factor {i}"), kind)
        })
        .collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if rng.gen_bool(density) {
                let w = (rng.gen_range(-1_000_000i64..=1_000_000) as f64) / 1e6;
                edges.push(WeightedEdge::new(format!("f{i}"), format!("f{j}"), w));
            }
        }
    }
    build_map(factors, edges, MapMetadata::named("random")).expect("generated map is valid")
}

/// Edge-list form: `adj[i]` holds `(j, w(i, j))`.
pub fn adjacency(map: &CognitiveMap<f64>) -> Vec<Vec<(usize, f64)>> {
    let mut adj = vec![Vec::new(); map.len()];
    for e in map.edges() {
        let i = map.index_of(&e.source).unwrap();
        let j = map.index_of(&e.target).unwrap();
        adj[i].push((j, e.weight));
    }
    adj
}

/// Exhaustive enumeration of every simple path (and simple cycle) from every
/// source. Returns `(positive, negative)` best values as nested vectors.
pub fn simple_path_oracle(map: &CognitiveMap<f64>) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let n = map.len();
    let adj = adjacency(map);
    let mut pos = vec![vec![0.0; n]; n];
    let mut neg = vec![vec![0.0; n]; n];

    fn walk(
        adj: &[Vec<(usize, f64)>],
        source: usize,
        node: usize,
        product: f64,
        on_path: &mut Vec<bool>,
        pos: &mut [f64],
        neg: &mut [f64],
    ) {
        for &(next, w) in &adj[node] {
            let p = product * w;
            let closes_cycle = next == source;
            if !closes_cycle && on_path[next] {
                continue;
            }
            if p > 0.0 && p > pos[next] {
                pos[next] = p;
            }
            if p < 0.0 && -p > neg[next] {
                neg[next] = -p;
            }
            if !closes_cycle {
                on_path[next] = true;
                walk(adj, source, next, p, on_path, pos, neg);
                on_path[next] = false;
            }
        }
    }

    for s in 0..n {
        let mut on_path = vec![false; n];
        on_path[s] = true;
        walk(&adj, s, s, 1.0, &mut on_path, &mut pos[s], &mut neg[s]);
    }
    (pos, neg)
}

/// Direct unrolling of the impulse recurrence from the edge list, for a
/// single initial impulse: returns the Y − Y_base series.
pub fn unrolled_deltas(map: &CognitiveMap<f64>, o0: &[f64], horizon: usize) -> Vec<Vec<f64>> {
    let adj = adjacency(map);
    let n = map.len();
    let mut o = o0.to_vec();
    let mut y = o0.to_vec();
    let mut out = vec![y.clone()];
    for _ in 0..horizon {
        let mut next = vec![0.0; n];
        for (i, edges) in adj.iter().enumerate() {
            for &(j, w) in edges {
                next[j] += w * o[i];
            }
        }
        for k in 0..n {
            y[k] += next[k];
        }
        o = next;
        out.push(y.clone());
    }
    out
}

/// Minimizes `f` over a uniform grid on `[lo, hi]` in each of `dims`
/// coordinates; returns the best value.
pub fn grid_min(dims: usize, lo: f64, hi: f64, step: f64, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let count = ((hi - lo) / step).round() as usize + 1;
    let mut best = f64::INFINITY;
    let mut idx = vec![0usize; dims];
    loop {
        let x: Vec<f64> = idx.iter().map(|&i| lo + i as f64 * step).collect();
        best = best.min(f(&x));
        let mut d = 0;
        loop {
            if d == dims {
                return best;
            }
            idx[d] += 1;
            if idx[d] < count {
                break;
            }
            idx[d] = 0;
            d += 1;
        }
    }
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
