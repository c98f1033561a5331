mod common;

use gblab::cochain::{cutoff, inner_section, Cochain0, Cochain1, Section};
use gblab::graph::{combinatorial_neighborhood, VertexSet, WeightedGraph};
use gblab::operators::{
    check_adjointness, commutator_chi_d, commutator_chi_d_direct, commutator_chi_delta, commutator_chi_delta_direct, d,
    delta, derivation_d, derivation_delta, gauss_bonnet, random_cochain0, random_cochain1, random_section,
    OperatorMatrices,
};
use proptest::prelude::*;

use common::{random_connected, random_subset, rng};

fn graph_and_seed() -> impl Strategy<Value = (WeightedGraph, u64)> {
    (any::<u64>(), 2usize..60, 0usize..80)
        .prop_map(|(seed, n, extra)| (random_connected(&mut rng(seed), n, extra, true), seed.rotate_left(17)))
}

/// δφ(x) from the incoming-edge sum, written out by hand.
fn delta_oracle(g: &WeightedGraph, phi: &Cochain1) -> Vec<f64> {
    let mut out = vec![0.0; g.vertex_count()];
    for (i, (t, h, r)) in g.edge_triples().into_iter().enumerate() {
        let v = phi.values()[i];
        // canonical edge enters h with φ, its reverse enters t with −φ
        out[h] += r * v;
        out[t] -= r * v;
    }
    for (x, o) in out.iter_mut().enumerate() {
        *o /= g.vertex_weights()[x];
    }
    out
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn adjointness_against_naive_inner_products((g, seed) in graph_and_seed()) {
        let mut r = rng(seed);
        let f = random_cochain0(&g, &mut r);
        let phi = random_cochain1(&g, &mut r);
        let df = d(&g, &f);
        let dphi = delta_oracle(&g, &phi);
        let lhs: f64 = g.edge_ids().map(|e| g.r(e) * df.get(e) * phi.get(e)).sum();
        let rhs: f64 = g.vertices().map(|x| g.c(x) * f.get(x) * dphi[x.0]).sum();
        let scale = 1.0 + lhs.abs();
        prop_assert!((lhs - rhs).abs() < 1e-12 * scale);
        prop_assert!(check_adjointness(&g, &f, &phi).unwrap() < 1e-12 * scale);
    }

    #[test]
    fn delta_summation_and_matrix_agree((g, seed) in graph_and_seed()) {
        let phi = random_cochain1(&g, &mut rng(seed));
        let direct = delta(&g, &phi);
        let oracle = delta_oracle(&g, &phi);
        let mats = OperatorMatrices::new(&g);
        let fast = mats.delta(phi.values());
        prop_assert!(max_diff(direct.values(), &oracle) < 1e-13 * (1.0 + phi.max_abs()) * 100.0);
        prop_assert!(max_diff(direct.values(), &fast) < 1e-13 * (1.0 + phi.max_abs()) * 100.0);
    }

    #[test]
    fn gauss_bonnet_is_symmetric((g, seed) in graph_and_seed()) {
        let mut r = rng(seed);
        let (s, t) = (random_section(&g, &mut r), random_section(&g, &mut r));
        let a = inner_section(&g, &gauss_bonnet(&g, &s), &t).unwrap();
        let b = inner_section(&g, &s, &gauss_bonnet(&g, &t)).unwrap();
        prop_assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn laplacian_is_positive((g, seed) in graph_and_seed()) {
        let f = random_cochain0(&g, &mut rng(seed));
        let df = d(&g, &f);
        let lap = delta(&g, &df);
        let quad: f64 = g.vertices().map(|x| g.c(x) * lap.get(x) * f.get(x)).sum();
        let energy: f64 = g.edge_ids().map(|e| g.r(e) * df.get(e).powi(2)).sum();
        prop_assert!(quad >= -1e-12);
        prop_assert!((quad - energy).abs() < 1e-12 * (1.0 + energy));
    }

    #[test]
    fn derivation_identities((g, seed) in graph_and_seed()) {
        let mut r = rng(seed);
        let (f, h) = (random_cochain0(&g, &mut r), random_cochain0(&g, &mut r));
        let phi = random_cochain1(&g, &mut r);
        prop_assert!(derivation_d(&g, &f, &h).unwrap().max_abs() < 1e-12);
        prop_assert!(derivation_delta(&g, &f, &phi).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn commutators_closed_form_and_support((g, seed) in graph_and_seed()) {
        let mut r = rng(seed);
        let k = random_subset(&mut r, &g, 0.3);
        let cut = cutoff(&g, &k).unwrap();
        let f = random_cochain0(&g, &mut r);
        let phi = random_cochain1(&g, &mut r);
        let cd = commutator_chi_d(&g, &cut, &f);
        let cdelta = commutator_chi_delta(&g, &cut, &phi);
        prop_assert!(cd.try_sub(&commutator_chi_d_direct(&g, &cut, &f).unwrap()).unwrap().max_abs() < 1e-12);
        prop_assert!(cdelta.try_sub(&commutator_chi_delta_direct(&g, &cut, &phi).unwrap()).unwrap().max_abs() < 1e-12);
        let nb = combinatorial_neighborhood(&g, &k).unwrap();
        for x in g.vertices() {
            if cdelta.get(x) != 0.0 {
                prop_assert!(nb.vertices.contains(x));
            }
        }
        for e in g.edge_ids() {
            if cd.get(e) != 0.0 {
                prop_assert!(cut.dchi.get(e) != 0.0);
            }
        }
    }
}

#[test]
fn hand_examples_on_p3() {
    let g = gblab::graph::build_graph(&[1.0; 3], &[(0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    let f = Cochain0::from_values(&g, vec![0.0, 1.0, 0.0]).unwrap();
    assert_eq!(d(&g, &f).values(), &[1.0, -1.0]);
    let phi = Cochain1::from_values(&g, vec![1.0, 1.0]).unwrap();
    assert_eq!(delta(&g, &phi).values(), &[-1.0, 0.0, 1.0]);
    assert_eq!(check_adjointness(&g, &f, &phi).unwrap(), 0.0);
    let s = Section::new(f.clone(), Cochain1::zeros(&g)).unwrap();
    assert_eq!(gauss_bonnet(&g, &s).phi.values(), d(&g, &f).values());
    assert_eq!(gauss_bonnet(&g, &s).f.max_abs(), 0.0);
}

#[test]
fn doubling_a_vertex_weight_halves_delta() {
    let mut r = rng(21);
    let g = random_connected(&mut r, 20, 15, true);
    let phi = random_cochain1(&g, &mut r);
    let mut c = g.vertex_weights().to_vec();
    c[4] *= 2.0;
    let h = g.reweighted(c, g.edge_weights().to_vec()).unwrap();
    let phi_h = Cochain1::from_values(&h, phi.values().to_vec()).unwrap();
    let (a, b) = (delta(&g, &phi), delta(&h, &phi_h));
    for x in g.vertices() {
        let expected = if x.0 == 4 { a.get(x) / 2.0 } else { a.get(x) };
        assert_eq!(b.get(x), expected);
    }
}

#[test]
fn closed_f_vanishes_when_pinned() {
    // df = 0 on a connected graph forces f constant; a zero value pins it
    let g = random_connected(&mut rng(4), 25, 10, true);
    let f = Cochain0::constant(&g, 3.5);
    assert_eq!(d(&g, &f).max_abs(), 0.0);
    let cut = cutoff(&g, &VertexSet::empty()).unwrap();
    assert_eq!(commutator_chi_d(&g, &cut, &f).max_abs(), 0.0);
}
