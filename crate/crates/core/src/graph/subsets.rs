//! Subgraph combinatorics: boundaries, neighbourhoods, balls and paths.

use std::collections::VecDeque;

use super::{EdgeSet, OrientedEdge, Region, VertexId, VertexSet, WeightedGraph};
use crate::error::Result;

fn checked(g: &WeightedGraph, k: &VertexSet) -> Result<Vec<bool>> {
    k.iter().try_for_each(|x| g.check_vertex(x))?;
    Ok(k.mask(g.vertex_count()))
}

/// `∂K = { x ∉ K : ∃ y ∈ K, (x, y) ∈ ℰ }`.
pub fn vertex_boundary(g: &WeightedGraph, k: &VertexSet) -> Result<VertexSet> {
    let in_k = checked(g, k)?;
    Ok(k.iter()
        .flat_map(|y| g.neighbors(y))
        .filter(|x| !in_k[x.0])
        .collect())
}

/// Canonical edges with exactly one endpoint in `K`.
pub fn edge_boundary(g: &WeightedGraph, k: &VertexSet) -> Result<EdgeSet> {
    let in_k = checked(g, k)?;
    Ok(g.canonical_edges()
        .filter(|e| in_k[e.tail.0] != in_k[e.head.0])
        .map(|e| e.edge)
        .collect())
}

/// `ℰ_K`: canonical edges with both endpoints in `K`.
pub fn induced_edges(g: &WeightedGraph, k: &VertexSet) -> Result<EdgeSet> {
    let in_k = checked(g, k)?;
    Ok(g.canonical_edges()
        .filter(|e| in_k[e.tail.0] && in_k[e.head.0])
        .map(|e| e.edge)
        .collect())
}

/// The smallest neighbourhood `G_K̃₀`: vertices `K ∪ ∂K`, edges `ℰ_K ⊔ ∂ℰ_K`.
pub fn combinatorial_neighborhood(g: &WeightedGraph, k: &VertexSet) -> Result<Region> {
    let in_k = checked(g, k)?;
    let vertices = k.union(&vertex_boundary(g, k)?);
    let edges = g
        .canonical_edges()
        .filter(|e| in_k[e.tail.0] || in_k[e.head.0])
        .map(|e| e.edge)
        .collect();
    Ok(Region::new(vertices, edges))
}

/// Multi-source BFS hop distances; `None` for unreachable vertices.
pub fn distances_from(g: &WeightedGraph, sources: &[VertexId]) -> Result<Vec<Option<usize>>> {
    let mut dist = vec![None; g.vertex_count()];
    let mut queue = VecDeque::new();
    for &s in sources {
        g.check_vertex(s)?;
        if dist[s.0].is_none() {
            dist[s.0] = Some(0);
            queue.push_back(s);
        }
    }
    while let Some(x) = queue.pop_front() {
        let dx = dist[x.0].unwrap_or(0);
        for y in g.neighbors(x) {
            if dist[y.0].is_none() {
                dist[y.0] = Some(dx + 1);
                queue.push_back(y);
            }
        }
    }
    Ok(dist)
}

/// `{ x : d(o, x) ≤ n }`.
pub fn ball(g: &WeightedGraph, o: VertexId, n: usize) -> Result<VertexSet> {
    let dist = distances_from(g, &[o])?;
    Ok(VertexSet::from_sorted_unchecked(
        g.vertices()
            .filter(|x| matches!(dist[x.0], Some(d) if d <= n))
            .collect(),
    ))
}

/// Balls of radius `0..=n_max` around `o`.
pub fn exhaustion(g: &WeightedGraph, o: VertexId, n_max: usize) -> Result<Vec<VertexSet>> {
    let dist = distances_from(g, &[o])?;
    Ok((0..=n_max)
        .map(|n| {
            VertexSet::from_sorted_unchecked(
                g.vertices()
                    .filter(|x| matches!(dist[x.0], Some(d) if d <= n))
                    .collect(),
            )
        })
        .collect())
}

/// A minimal-hop path from `x` to `y`. Among shortest paths the one whose
/// vertex sequence is lexicographically smallest is returned.
pub fn shortest_path(g: &WeightedGraph, x: VertexId, y: VertexId) -> Result<Vec<OrientedEdge>> {
    g.check_vertex(x)?;
    let to_target = distances_from(g, &[y])?;
    let mut path = Vec::new();
    let mut here = x;
    while here != y {
        let d = to_target[here.0].expect("connected graph");
        // emanating edges are sorted by head, so the first hit has the lowest index
        let step = g
            .emanating(here)
            .iter()
            .find(|e| to_target[e.head.0] == Some(d - 1))
            .copied()
            .expect("BFS predecessor exists");
        path.push(step);
        here = step.head;
    }
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_graph, EdgeId};

    fn p5() -> WeightedGraph {
        build_graph(&[1.0; 5], &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)]).unwrap()
    }

    fn vs(ids: &[usize]) -> VertexSet {
        VertexSet::new(ids.iter().map(|&i| VertexId(i)))
    }

    fn es(ids: &[usize]) -> EdgeSet {
        EdgeSet::new(ids.iter().map(|&i| EdgeId(i)))
    }

    #[test]
    fn boundaries_on_p5() {
        let g = p5();
        assert_eq!(vertex_boundary(&g, &vs(&[2])).unwrap(), vs(&[1, 3]));
        assert!(vertex_boundary(&g, &g.all_vertices()).unwrap().is_empty());
        assert_eq!(edge_boundary(&g, &vs(&[2])).unwrap(), es(&[1, 2]));
        assert!(edge_boundary(&g, &VertexSet::empty()).unwrap().is_empty());
    }

    #[test]
    fn neighborhood_on_p5() {
        let g = p5();
        let n = combinatorial_neighborhood(&g, &vs(&[2])).unwrap();
        assert_eq!(n.vertices, vs(&[1, 2, 3]));
        assert_eq!(n.edges, es(&[1, 2]));
        assert!(combinatorial_neighborhood(&g, &VertexSet::empty())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn balls_on_p5() {
        let g = p5();
        assert_eq!(ball(&g, VertexId(2), 1).unwrap(), vs(&[1, 2, 3]));
        assert_eq!(ball(&g, VertexId(2), 0).unwrap(), vs(&[2]));
        let ex = exhaustion(&g, VertexId(0), 5).unwrap();
        assert_eq!(ex.len(), 6);
        assert_eq!(ex[4], g.all_vertices());
        assert!(ball(&g, VertexId(9), 1).is_err());
    }

    #[test]
    fn paths_on_p5() {
        let g = p5();
        let p = shortest_path(&g, VertexId(0), VertexId(3)).unwrap();
        let pairs: Vec<_> = p.iter().map(|e| (e.tail.0, e.head.0)).collect();
        assert_eq!(pairs, vec![(0, 1), (1, 2), (2, 3)]);
        assert!(shortest_path(&g, VertexId(2), VertexId(2)).unwrap().is_empty());
        let back = shortest_path(&g, VertexId(3), VertexId(1)).unwrap();
        assert!(back.iter().all(|e| !e.canonical));
    }
}
