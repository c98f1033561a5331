#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use gblab::graph::{build_graph, VertexId, VertexSet, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Log-uniform weight in `[0.1, 10]`.
pub fn weight<R: Rng>(rng: &mut R) -> f64 {
    10f64.powf(rng.random_range(-1.0..1.0))
}

/// Random spanning tree plus `extra` chords, random positive weights.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: usize, weighted: bool) -> WeightedGraph {
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    let w = |rng: &mut R| if weighted { weight(rng) } else { 1.0 };
    for i in 1..n {
        let j = rng.random_range(0..i);
        seen.insert((j, i));
        let r = w(rng);
        edges.push((j, i, r));
    }
    for _ in 0..extra {
        if n < 3 {
            break;
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let key = (a.min(b), a.max(b));
        if a != b && seen.insert(key) {
            let r = w(rng);
            // keep both orientation conventions in play
            if rng.random_bool(0.5) {
                edges.push((a, b, r));
            } else {
                edges.push((b, a, r));
            }
        }
    }
    let c: Vec<f64> = (0..n).map(|_| w(rng)).collect();
    build_graph(&c, &edges).expect("valid random graph")
}

pub fn random_subset<R: Rng>(rng: &mut R, g: &WeightedGraph, p: f64) -> VertexSet {
    VertexSet::new(g.vertices().filter(|_| rng.random_bool(p)))
}

/// Plain BFS distances, written independently of the library.
pub fn bfs(g: &WeightedGraph, s: VertexId) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj = vec![Vec::new(); n];
    for (a, b, _) in g.edge_triples() {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut dist = vec![usize::MAX; n];
    dist[s.0] = 0;
    let mut q = VecDeque::from([s.0]);
    while let Some(x) = q.pop_front() {
        for &y in &adj[x] {
            if dist[y] == usize::MAX {
                dist[y] = dist[x] + 1;
                q.push_back(y);
            }
        }
    }
    dist
}
