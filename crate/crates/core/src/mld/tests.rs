use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::dijkstra::{brute_force_isochrone, dijkstra_distances};
use crate::fixtures;
use crate::isochrone::IsochroneAlgorithm;

const INF: u32 = u32::MAX;

fn overlay(graph: &Graph<u32>, cells: Vec<Vec<u32>>, mode: EccMode, reduce: bool) -> Arc<Overlay<u32>> {
    let part = MultilevelPartition::new(cells).unwrap();
    let opt = CustomizeOptions {
        mode,
        grasp: true,
        reduce,
        threads: 1,
    };
    build_overlay(graph, &part, opt).unwrap()
}

/// Distances inside the subgraph induced by `cell`.
fn restricted_distances(graph: &Graph<u32>, cells: &[u32], s: usize) -> Vec<u32> {
    let keep: Vec<u32> = (0..graph.num_vertices())
        .map(|v| if cells[v] == cells[s] { 0 } else { u32::MAX })
        .collect();
    let mut new_of = vec![u32::MAX; graph.num_vertices()];
    let mut old = Vec::new();
    for v in 0..graph.num_vertices() {
        if keep[v] == 0 {
            new_of[v] = old.len() as u32;
            old.push(v);
        }
    }
    let sub = graph.induced(&new_of, old.len());
    let d = dijkstra_distances(&sub, new_of[s] as usize);
    let mut out = vec![INF; graph.num_vertices()];
    for (i, &v) in old.iter().enumerate() {
        out[v] = d[i];
    }
    out
}

fn taus(graph: &Graph<u32>) -> Vec<u32> {
    let max = (0..graph.num_vertices())
        .flat_map(|s| dijkstra_distances(graph, s))
        .max()
        .unwrap();
    let mut t: Vec<u32> = (0..=max + 1).collect();
    t.push(INF - 1);
    t
}

fn check_all(graph: &Graph<u32>, cells: Vec<Vec<u32>>, label: &str) {
    let taus = taus(graph);
    for mode in EccMode::ALL {
        for reduce in [true, false] {
            let ov = overlay(graph, cells.clone(), mode, reduce);
            let crp = IsoCrp::new(ov.clone());
            let grasp = IsoGrasp::new(ov.clone()).unwrap();
            for s in 0..graph.num_vertices() {
                for &tau in &taus {
                    let expect = brute_force_isochrone(graph, s, tau);
                    assert_eq!(crp.query(s, tau), expect, "{label} crp {mode} s={s} tau={tau}");
                    assert_eq!(grasp.query(s, tau), expect, "{label} grasp {mode} s={s} tau={tau}");
                }
                assert_eq!(ov.one_to_all(s), dijkstra_distances(graph, s), "{label} one-to-all {mode}");
            }
        }
    }
}

#[test]
fn tg3_clique_and_eccentricities() {
    let g = fixtures::tg3();
    for mode in EccMode::ALL {
        let ov = overlay(&g, vec![fixtures::tg3_cells()], mode, true);
        assert_eq!(ov.boundary_of(1, ov.cell_of(1, 0) as usize), vec![0, 2]);
        assert_eq!(ov.clique_distance(1, 0, 0), Some(0));
        assert_eq!(ov.clique_distance(1, 0, 2), Some(2));
        assert_eq!(ov.clique_distance(1, 2, 0), Some(1));
        assert_eq!(ov.clique_distance(1, 2, 2), Some(0));
        assert_eq!(ov.clique_distance(1, 1, 0), None);
        assert_eq!(ov.eccentricity(1, 0), Some(2), "{mode}");
        assert_eq!(ov.eccentricity(1, 2), Some(2), "{mode}");
    }
}

#[test]
fn tg3_downward_edges() {
    let g = fixtures::tg3();
    let ov = overlay(&g, vec![fixtures::tg3_cells()], EccMode::Sep, false);
    let mut down = ov.downward_edges_of(1);
    down.sort_unstable();
    assert_eq!(down, vec![(0, 1), (2, 2)]);
    // 3 -> 2 runs through boundary vertex 1 at equal length
    let ov = overlay(&g, vec![fixtures::tg3_cells()], EccMode::Sep, true);
    assert_eq!(ov.downward_edges_of(1), vec![(0, 1)]);

    // under a single top cell the level-2 boundary is empty
    let ov = overlay(&g, vec![fixtures::tg3_cells(), vec![0; 6]], EccMode::Sep, true);
    for v in [0, 2, 3, 5] {
        assert!(ov.downward_edges_of(v).is_empty());
    }
}

#[test]
fn tg3_interior_label_from_boundary() {
    let g = fixtures::tg3();
    let ov = overlay(&g, vec![fixtures::tg3_cells()], EccMode::Sep, true);
    for s in 3..6 {
        let d = ov.one_to_all(s);
        assert_eq!(d[1], (d[0] + 1).min(d[2] + 2));
    }
}

#[test]
fn single_vertex_cell() {
    let g = fixtures::tg1();
    let ov = overlay(&g, vec![vec![0, 0, 1, 2]], EccMode::Sep, true);
    let c = ov.cell_of(1, 2) as usize;
    assert_eq!(ov.boundary_of(1, c), vec![2]);
    assert_eq!(ov.clique_distance(1, 2, 2), Some(0));
    assert_eq!(ov.eccentricity(1, 2), Some(0));
}

/// a -> b inside one cell, return path b -> c -> d -> a of length 10.
fn path_cell() -> Graph<u32> {
    Graph::from_edges(4, [(0, 1, 1), (1, 2, 5), (2, 3, 3), (3, 0, 2)]).unwrap()
}

#[test]
fn unreachable_pairs() {
    let g = path_cell();
    let ov = overlay(&g, vec![vec![0, 0, 1, 1]], EccMode::Sep, true);
    assert_eq!(ov.clique_distance(1, 1, 0), Some(INF));
    assert_eq!(ov.clique_distance(1, 0, 1), Some(1));
    assert_eq!(ov.unreachable_of(1, 1), Some(vec![0]));
    assert_eq!(ov.unreachable_of(1, 0), Some(vec![]));
    assert_eq!(ov.eccentricity(1, 1), Some(0));
    let ov = overlay(&g, vec![vec![0, 0, 1, 1]], EccMode::UpDown, true);
    assert_eq!(ov.unreachable_of(1, 1), None);
}

#[test]
fn refinement_uses_global_distances() {
    let g = path_cell();
    let cells = vec![vec![0, 0, 1, 1]];
    let oracle = dijkstra_distances(&g, 1);
    let expect = oracle[0].max(oracle[1]);
    assert_eq!(expect, 10);
    assert_eq!(overlay(&g, cells.clone(), EccMode::None, true).eccentricity(1, 1), Some(INF));
    for mode in [EccMode::All, EccMode::Inf, EccMode::Scc] {
        assert_eq!(overlay(&g, cells.clone(), mode, true).eccentricity(1, 1), Some(expect), "{mode}");
    }
    // vertex a reaches the whole cell, so only `all` may change it, and
    // then only to the same value
    for mode in EccMode::ALL {
        assert_eq!(overlay(&g, cells.clone(), mode, true).eccentricity(1, 0), Some(1), "{mode}");
    }
}

#[test]
fn scc_shortcut_avoids_search() {
    // b -> c inside the cell, but c cannot reach b; c's eccentricity is
    // refined by search, b's is then len(b, c) + ecc(c)
    let g = Graph::from_edges(4, [(0, 1, 1), (1, 2, 1), (2, 3, 4), (3, 0, 1)]).unwrap();
    let cells = vec![vec![0, 0, 0, 1]];
    let scc = overlay(&g, cells.clone(), EccMode::Scc, true);
    let all = overlay(&g, cells, EccMode::All, true);
    // boundary of the cell: 0 (entered from 3) and 2 (leaves to 3)
    assert_eq!(scc.boundary_of(1, scc.cell_of(1, 0) as usize), vec![0, 2]);
    let e2 = scc.eccentricity(1, 2).unwrap();
    assert_eq!(e2, all.eccentricity(1, 2).unwrap());
    assert_eq!(e2, 5 + 1);
    assert_eq!(scc.eccentricity(1, 0), Some(2));
}

#[test]
fn fixtures_match_oracle_single_level() {
    for f in fixtures::all() {
        check_all(&f.graph, vec![f.cells.clone()], f.name);
    }
}

#[test]
fn fixtures_match_oracle_two_levels() {
    for f in fixtures::all() {
        let n = f.graph.num_vertices();
        check_all(&f.graph, vec![f.cells.clone(), vec![0; n]], f.name);
        let top: Vec<u32> = f.cells.iter().map(|_| 0).collect();
        let singletons: Vec<u32> = (0..n as u32).collect();
        check_all(&f.graph, vec![singletons, f.cells.clone(), top], f.name);
    }
}

#[test]
fn mountain_cell_is_activated() {
    let g = fixtures::tg3_mountain();
    let ov = overlay(&g, vec![fixtures::tg3_mountain_cells()], EccMode::Sep, true);
    let d = dijkstra_distances(&g, 0);
    assert_eq!(d, vec![0, 1, 2, 2, 6, 1]);
    // every portal and the tunnel are within 2, the summit is not
    let tau = 2;
    let expect = brute_force_isochrone(&g, 0, tau);
    assert!(expect.iter().any(|(e, _)| g.head(e) == 4 || g.tail(e) == 4));
    for engine in [
        Box::new(IsoCrp::new(ov.clone())) as Box<dyn IsochroneAlgorithm<u32>>,
        Box::new(IsoGrasp::new(ov.clone()).unwrap()),
    ] {
        let (set, stats) = engine.query_with_stats(0, tau, 1);
        assert_eq!(set, expect, "{}", engine.name());
        assert_eq!(stats.active_cells, 1, "{}", engine.name());
    }
}

#[test]
fn tg2_excludes_detour_edge() {
    let g = fixtures::tg2();
    let ov = overlay(&g, vec![fixtures::tg2_cells()], EccMode::Sep, true);
    let set = IsoGrasp::new(ov.clone()).unwrap().query(0, 4);
    let vw = g.find_edge(3, 4).unwrap();
    assert!(!set.contains(vw));
    assert!(set.contains(g.find_edge(4, 5).unwrap()));
    assert_eq!(IsoCrp::new(ov).query(0, 4), set);
}

#[test]
fn everything_in_range_means_no_active_cells() {
    let g = fixtures::tg3();
    let ov = overlay(&g, vec![fixtures::tg3_cells(), vec![0; 6]], EccMode::Sep, true);
    for s in 0..6 {
        let (set, stats) = IsoCrp::new(ov.clone()).query_with_stats(s, 100, 1);
        assert!(set.is_empty());
        assert_eq!(stats.active_cells, 0);
        let (set, stats) = IsoGrasp::new(ov.clone()).unwrap().query_with_stats(s, 100, 1);
        assert!(set.is_empty());
        assert_eq!(stats.active_cells, 0);
    }
}

#[test]
fn rejects_mismatched_or_disconnected_input() {
    let part = MultilevelPartition::single_level(vec![0, 0, 1]).unwrap();
    assert!(Overlay::build(&fixtures::tg1(), &part, CustomizeOptions::default()).is_err());
    let g = Graph::from_edges(2, [(0, 1, 1u32)]).unwrap();
    let part = MultilevelPartition::single_level(vec![0, 1]).unwrap();
    assert!(Overlay::build(&g, &part, CustomizeOptions::default()).is_err());
    let opt = CustomizeOptions {
        grasp: false,
        ..Default::default()
    };
    let ov = build_overlay(&fixtures::tg1(), &MultilevelPartition::single_level(vec![0, 0, 1, 1]).unwrap(), opt).unwrap();
    assert!(IsoGrasp::new(ov).is_err());
}

#[test]
fn ecc_mode_names_round_trip() {
    for m in EccMode::ALL {
        assert_eq!(m.as_str().parse::<EccMode>().unwrap(), m);
    }
    assert!("bogus".parse::<EccMode>().is_err());
}

/// Random strongly connected graph (a Hamiltonian cycle plus extra edges)
/// with a random nested two-level partition.
fn instance() -> impl Strategy<Value = (Graph<u32>, Vec<Vec<u32>>)> {
    (3usize..24).prop_flat_map(|n| {
        (
            proptest::collection::vec((0..n as u32, 0..n as u32, 0u32..6), 0..3 * n),
            proptest::collection::vec(1u32..6, n),
            proptest::collection::vec(0..n as u32, n),
            proptest::collection::vec(0u32..3, n),
            Just(n),
        )
            .prop_map(|(extra, ring, c1, c2, n)| {
                let mut edges: Vec<(u32, u32, u32)> =
                    (0..n as u32).map(|v| (v, (v + 1) % n as u32, ring[v as usize])).collect();
                edges.extend(extra);
                let g = Graph::from_edges(n, edges).unwrap();
                let l1 = compact(&c1);
                let parent: Vec<u32> = (0..n).map(|v| c2[l1[v] as usize % n]).collect();
                let l2 = compact(&parent);
                (g, vec![l1, l2])
            })
    })
}

fn compact(ids: &[u32]) -> Vec<u32> {
    let mut map = std::collections::HashMap::new();
    ids.iter()
        .map(|&c| {
            let next = map.len() as u32;
            *map.entry(c).or_insert(next)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_instances_match_oracle((g, cells) in instance(), s_pick in 0usize..1000, tau in 0u32..40) {
        let s = s_pick % g.num_vertices();
        let expect = brute_force_isochrone(&g, s, tau);
        let dist = dijkstra_distances(&g, s);
        for mode in EccMode::ALL {
            let ov = overlay(&g, cells.clone(), mode, true);
            prop_assert_eq!(&IsoCrp::new(ov.clone()).query(s, tau), &expect, "crp {}", mode);
            prop_assert_eq!(&IsoGrasp::new(ov.clone()).unwrap().query(s, tau), &expect, "grasp {}", mode);
            prop_assert_eq!(&ov.one_to_all(s), &dist);
        }
        let unreduced = overlay(&g, cells.clone(), EccMode::Sep, false);
        prop_assert_eq!(&unreduced.one_to_all(s), &dist);
        let top_only = vec![cells[1].clone()];
        let ov = overlay(&g, top_only, EccMode::UpDown, true);
        prop_assert_eq!(&IsoGrasp::new(ov).unwrap().query_with_stats(s, tau, 3).0, &expect);
    }

    #[test]
    fn level_one_eccentricity_is_restricted_maximum((g, cells) in instance()) {
        let ov = overlay(&g, cells.clone(), EccMode::Sep, true);
        let ov_upper = overlay(&g, cells.clone(), EccMode::All, true);
        for c in 0..ov.num_cells(1) {
            for u in ov.boundary_of(1, c) {
                let d = restricted_distances(&g, &cells[0], u);
                let exact = d.iter().copied().filter(|&x| x != INF).max().unwrap();
                prop_assert_eq!(ov.eccentricity(1, u), Some(exact));
                for v in ov.boundary_of(1, c) {
                    prop_assert_eq!(ov.clique_distance(1, u, v), Some(d[v]));
                }
                // unrestricted bounds dominate global distances to the cell
                let global = dijkstra_distances(&g, u);
                let cell_max = (0..g.num_vertices())
                    .filter(|&x| cells[0][x] == cells[0][u])
                    .map(|x| global[x])
                    .max()
                    .unwrap();
                prop_assert!(ov_upper.eccentricity(1, u).unwrap() >= cell_max);
            }
        }
        for l in 2..=ov.num_levels() {
            for c in 0..ov.num_cells(l) {
                for u in ov.boundary_of(l, c) {
                    let d = restricted_distances(&g, &cells[l - 1], u);
                    let exact = d.iter().copied().filter(|&x| x != INF).max().unwrap();
                    prop_assert!(ov.eccentricity(l, u).unwrap() >= exact);
                }
            }
        }
    }

    #[test]
    fn parallel_descent_is_deterministic((g, cells) in instance(), s_pick in 0usize..1000, tau in 0u32..40) {
        let s = s_pick % g.num_vertices();
        let ov = overlay(&g, cells, EccMode::Sep, true);
        let crp = IsoCrp::new(ov.clone());
        let grasp = IsoGrasp::new(ov).unwrap();
        let one = crp.query(s, tau);
        for threads in [2, 4] {
            prop_assert_eq!(&crp.query_with_stats(s, tau, threads).0, &one);
            prop_assert_eq!(&grasp.query_with_stats(s, tau, threads).0, &one);
        }
    }
}
