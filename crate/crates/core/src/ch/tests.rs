use proptest::prelude::*;

use super::*;
use crate::dijkstra::dijkstra_distances;
use crate::fixtures;

fn full(g: &Graph<u32>) -> Hierarchy<u32> {
    Hierarchy::build(g, &ContractionParams::default())
}

#[test]
fn tg1_distance_and_one_to_all() {
    let g = fixtures::tg1();
    let h = full(&g);
    assert_eq!(h.distance(0, 3), 9);
    assert_eq!(h.one_to_all(0), vec![0, 2, 5, 9]);
}

#[test]
fn keep_everything_contracts_nothing() {
    let g = fixtures::tg2();
    let c = contract(&g, &vec![true; 6], &ContractionParams::default());
    assert!(c.up.is_empty() && c.down.is_empty());
    assert_eq!(c.shortcuts, 0);
    let mut core: Vec<_> = c.core.clone();
    core.sort_unstable();
    let mut edges: Vec<_> = g.edges().collect();
    edges.sort_unstable();
    assert_eq!(core, edges);
}

#[test]
fn chain_vertex_needs_shortcut() {
    let g = Graph::from_edges(3, [(0, 1, 2u32), (1, 2, 3)]).unwrap();
    let c = contract(&g, &[true, false, true], &ContractionParams::default());
    assert_eq!(c.core, vec![(0, 2, 5)]);
    assert_eq!(c.shortcuts, 1);
    assert_eq!(c.down, vec![(0, 1, 2)]);
    assert_eq!(c.up, vec![(1, 2, 3)]);
    assert_eq!(c.level, vec![1, 0, 1]);
}

#[test]
fn witness_prevents_shortcut() {
    let g = Graph::from_edges(3, [(0, 1, 2u32), (1, 2, 3), (0, 2, 4)]).unwrap();
    let c = contract(&g, &[true, false, true], &ContractionParams::default());
    assert_eq!(c.core, vec![(0, 2, 4)]);
    assert_eq!(c.shortcuts, 0);
}

#[test]
fn single_vertex() {
    let g = Graph::<u32>::from_edges(1, []).unwrap();
    let h = full(&g);
    assert_eq!(h.one_to_all(0), vec![0]);
}

#[test]
fn sweep_is_idempotent() {
    let g = fixtures::tg3_mountain();
    let h = full(&g);
    let n = g.num_vertices();
    let mut labels = Labels::new(n);
    let mut heap = IndexedHeap::new(n);
    h.upward_search(&[(h.permutation().new_id(0), 0)], None, &mut labels, &mut heap);
    h.sweep(&mut labels, 0..n);
    let once = labels.to_vec();
    h.sweep(&mut labels, 0..n);
    assert_eq!(labels.to_vec(), once);
}

#[test]
fn multi_source_and_stop() {
    let g = fixtures::tg3();
    let h = full(&g);
    let n = g.num_vertices();
    let p = h.permutation();
    let mut labels = Labels::new(n);
    let mut heap = IndexedHeap::new(n);
    h.upward_search(&[(p.new_id(0), 0), (p.new_id(3), 0)], None, &mut labels, &mut heap);
    h.sweep(&mut labels, 0..n);
    let (a, b) = (dijkstra_distances(&g, 0), dijkstra_distances(&g, 3));
    for v in 0..n {
        assert_eq!(labels.get(p.new_id(v)), a[v].min(b[v]));
    }
    labels.reset();
    let settled = h.upward_search(&[(p.new_id(0), 0), (p.new_id(3), 1)], Some(0), &mut labels, &mut heap);
    assert_eq!(settled, 1);
}

#[test]
fn selections() {
    let g = fixtures::tg1();
    let h = full(&g);
    let all: Vec<usize> = (0..4).collect();
    let sel = h.select(&all).unwrap();
    assert_eq!(sel.len(), 4);
    assert_eq!(sel.num_edges(), h.num_downward_edges());
    assert_eq!(h.one_to_many(0, &sel), vec![0, 2, 5, 9]);
    let top = h.permutation().old_id(0);
    let sel = h.select(&[top]).unwrap();
    assert_eq!((sel.len(), sel.num_edges()), (1, 0));
    assert!(h.select(&[]).is_err());
    let sel = h.select(&[3, 1]).unwrap();
    assert_eq!(h.one_to_many(0, &sel), vec![9, 2]);
}

#[test]
fn levels_are_a_sweep_order() {
    let g = fixtures::tg3_mountain();
    let h = full(&g);
    for v in 0..g.num_vertices() {
        for (u, _) in h.downward_in(v) {
            assert!(u < v && h.level(u) > h.level(v));
        }
    }
}

fn random_graph() -> impl Strategy<Value = Graph<u32>> {
    (1usize..40).prop_flat_map(|n| {
        proptest::collection::vec((0..n as u32, 0..n as u32, 0u32..20), 0..4 * n)
            .prop_map(move |e| Graph::from_edges(n, e).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hierarchy_preserves_distances(g in random_graph(), hops in 1u32..6) {
        let params = ContractionParams { sim_hops: hops, hops: (hops, hops + 1), settle_limit: 8, ..Default::default() };
        let h = Hierarchy::build(&g, &params);
        for s in 0..g.num_vertices() {
            let d = dijkstra_distances(&g, s);
            prop_assert_eq!(&h.one_to_all(s), &d);
            for t in 0..g.num_vertices() {
                prop_assert_eq!(h.distance(s, t), d[t]);
            }
        }
    }

    #[test]
    fn core_preserves_distances(g in random_graph(), mask in proptest::collection::vec(any::<bool>(), 40)) {
        let n = g.num_vertices();
        let keep = &mask[..n];
        let c = contract(&g, keep, &ContractionParams::default());
        // the core alone must preserve distances between kept vertices
        let core = Graph::from_edges(n, c.core.clone()).unwrap();
        for s in (0..n).filter(|&v| keep[v]) {
            let a = dijkstra_distances(&g, s);
            let b = dijkstra_distances(&core, s);
            for t in (0..n).filter(|&v| keep[v]) {
                prop_assert_eq!(a[t], b[t]);
            }
        }
    }
}
