use std::sync::Arc;

use proptest::prelude::*;

use super::*;
use crate::dijkstra::{brute_force_isochrone, dijkstra_distances};
use crate::fixtures;
use crate::graph::Graph;
use crate::isochrone::IsochroneAlgorithm;
use crate::partition::EdgePartition;
use crate::weight::Weight;

const INF: u32 = u32::INF;

fn taus(graph: &Graph<u32>) -> Vec<u32> {
    let max = (0..graph.num_vertices())
        .flat_map(|s| dijkstra_distances(graph, s))
        .max()
        .unwrap();
    let mut t: Vec<u32> = (0..=max + 1).collect();
    t.push(INF - 1);
    t
}

fn cd(graph: &Graph<u32>, cells: &[u32]) -> Arc<CoreIsoPhast<u32>> {
    Arc::new(CoreIsoPhast::build_cd(graph, cells, &PhastOptions::default()).unwrap())
}

fn cp(graph: &Graph<u32>, cells: &[u32], rule: FlagRule) -> Arc<CoreIsoPhast<u32>> {
    let opt = PhastOptions {
        flag_rule: rule,
        ..PhastOptions::default()
    };
    Arc::new(CoreIsoPhast::build_cp(graph, cells, &opt).unwrap())
}

fn dt(graph: &Graph<u32>, cells: &[u32], compress: usize) -> Arc<DtIsoPhast<u32>> {
    let edge_cells = (0..graph.num_edges()).map(|e| cells[graph.tail(e)]).collect();
    let part = EdgePartition::new(graph, edge_cells).unwrap();
    let opt = DtOptions {
        compress,
        ..DtOptions::default()
    };
    Arc::new(DtIsoPhast::build(graph, &part, &opt).unwrap())
}

fn engines(graph: &Graph<u32>, cells: &[u32]) -> Vec<(String, Box<dyn IsochroneAlgorithm<u32>>)> {
    let n = graph.num_vertices();
    let mut out: Vec<(String, Box<dyn IsochroneAlgorithm<u32>>)> = vec![
        ("cd".into(), Box::new(IsoPhastCore::new(cd(graph, cells)))),
        ("cp".into(), Box::new(IsoPhastCore::new(cp(graph, cells, FlagRule::Exact)))),
        ("cp-relaxed".into(), Box::new(IsoPhastCore::new(cp(graph, cells, FlagRule::Relaxed)))),
    ];
    for c in [0, n / 2, n] {
        out.push((format!("dt-c{c}"), Box::new(IsoPhastDt::new(dt(graph, cells, c)))));
    }
    out
}

fn check_all(graph: &Graph<u32>, cells: &[u32], label: &str) {
    let taus = taus(graph);
    for (name, algo) in engines(graph, cells) {
        for s in 0..graph.num_vertices() {
            for &tau in &taus {
                let expect = brute_force_isochrone(graph, s, tau);
                assert_eq!(algo.query(s, tau), expect, "{label} {name} s={s} tau={tau}");
            }
        }
    }
}

#[test]
fn fixtures_match_oracle() {
    for f in fixtures::all() {
        check_all(&f.graph, &f.cells, f.name);
        check_all(&f.graph, &vec![0; f.graph.num_vertices()], f.name);
        let singletons: Vec<u32> = (0..f.graph.num_vertices() as u32).collect();
        check_all(&f.graph, &singletons, f.name);
    }
}

#[test]
fn tg3_core_and_eccentricities() {
    let g = fixtures::tg3();
    let data = cd(&g, &fixtures::tg3_cells());
    let core: Vec<usize> = (0..6).filter(|&v| data.is_core(v)).collect();
    assert_eq!(core, vec![0, 2, 3, 5]);
    assert_eq!(data.core_size(), 4);
    assert_eq!(data.eccentricity(0), Some(2));
    assert_eq!(data.eccentricity(2), Some(2));
    assert_eq!(data.eccentricity(1), None);
    assert_eq!(data.unreachable_of(0), Some(vec![]));
}

#[test]
fn tg3_core_sweep_reproduces_labels() {
    let g = fixtures::tg3();
    let data = cp(&g, &fixtures::tg3_cells(), FlagRule::Exact);
    assert_eq!(data.strategy(), CoreStrategy::Phast);
    for s in 0..6 {
        assert_eq!(data.one_to_all(s), dijkstra_distances(&g, s), "s={s}");
    }
    let data = cd(&g, &fixtures::tg3_cells());
    for s in 0..6 {
        assert_eq!(data.one_to_all(s), dijkstra_distances(&g, s), "s={s}");
    }
}

#[test]
fn unreachable_core_pairs() {
    // 0 -> 1 -> 2 inside one cell, with 0 and 2 on the boundary
    let g = Graph::from_edges(4, vec![(0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1)]).unwrap();
    let data = cd(&g, &[0, 0, 0, 1]);
    assert_eq!(data.eccentricity(0), Some(2));
    assert_eq!(data.unreachable_of(0), Some(vec![]));
    // nothing inside the cell is reachable from 2 except itself
    assert_eq!(data.unreachable_of(2), Some(vec![0]));
    assert_eq!(data.eccentricity(2), Some(0));
}

#[test]
fn mountain_cell_is_activated() {
    let g = fixtures::tg3_mountain();
    let cells = fixtures::tg3_mountain_cells();
    let expect = brute_force_isochrone(&g, 0, 2);
    assert!(!expect.is_empty());
    let data = cd(&g, &cells);
    let (set, stats) = IsoPhastCore::new(data).query_with_stats(0, 2, 1);
    assert_eq!(set, expect);
    assert!(stats.active_cells >= 1);
    let (set, _) = IsoPhastCore::new(cp(&g, &cells, FlagRule::Exact)).query_with_stats(0, 2, 1);
    assert_eq!(set, expect);
}

#[test]
fn broken_eccentricity_misses_edges() {
    // fault injection: a too small eccentricity on the mountain cell portal
    // clears the cell and loses the summit edges
    let g = fixtures::tg3_mountain();
    let cells = fixtures::tg3_mountain_cells();
    let mut data = CoreIsoPhast::build_cd(&g, &cells, &PhastOptions::default()).unwrap();
    let expect = brute_force_isochrone(&g, 0, 2);
    for v in 0..6 {
        if data.is_core(v) {
            data.set_eccentricity_for_testing(v, 0);
        }
    }
    let got = IsoPhastCore::new(Arc::new(data)).query(0, 2);
    assert_ne!(got, expect);
}

#[test]
fn tg3_distance_bounds() {
    let g = fixtures::tg3();
    let data = dt(&g, &fixtures::tg3_cells(), 0);
    let b = data.bounds();
    assert_eq!(b.num_cells(), 2);
    assert_eq!(b.lower(0, 1), 0);
    assert_eq!(b.upper(0, 1), 6);
    assert_eq!(data.diameters()[0], 4);
    assert_eq!(b.lower(0, 0), 0);
}

#[test]
fn bounds_sandwich_on_fixtures() {
    for f in fixtures::all() {
        let g = &f.graph;
        let edge_cells: Vec<u32> = (0..g.num_edges()).map(|e| f.cells[g.tail(e)]).collect();
        let data = dt(g, &f.cells, 0);
        let b = data.bounds();
        for s in 0..g.num_vertices() {
            let d = dijkstra_distances(g, s);
            for e in 0..g.num_edges() {
                let i = edge_cells[e] as usize;
                if g.tail(e) != s && g.head(e) != s {
                    continue;
                }
                for e2 in 0..g.num_edges() {
                    let j = edge_cells[e2] as usize;
                    for v in [g.tail(e2), g.head(e2)] {
                        assert!(b.lower(i, j) <= d[v] && d[v] <= b.upper(i, j), "{} s={s} v={v}", f.name);
                    }
                }
            }
        }
    }
}

#[test]
fn compression_does_not_change_results() {
    let g = fixtures::tg3_mountain();
    let cells = fixtures::tg3_mountain_cells();
    let plain = IsoPhastDt::new(dt(&g, &cells, 0));
    for c in 1..=6 {
        let data = dt(&g, &cells, c);
        let sizes: usize = data.selection_sizes().iter().sum();
        let algo = IsoPhastDt::new(data);
        for s in 0..6 {
            for tau in 0..14 {
                assert_eq!(algo.query(s, tau), plain.query(s, tau));
            }
        }
        if c == 6 {
            assert_eq!(sizes, 0);
        }
    }
}

#[test]
fn beyond_diameter_is_empty_without_work() {
    let g = fixtures::tg3();
    let dtq = IsoPhastDt::new(dt(&g, &fixtures::tg3_cells(), 0));
    let (set, stats) = dtq.query_with_stats(0, 100, 1);
    assert!(set.is_empty());
    assert_eq!(stats.active_cells, 0);
    let cdq = IsoPhastCore::new(cd(&g, &fixtures::tg3_cells()));
    let (set, stats) = cdq.query_with_stats(0, 100, 1);
    assert!(set.is_empty());
    assert_eq!(stats.active_cells, 0);
}

#[test]
fn rejects_bad_input() {
    let g = fixtures::tg3();
    assert!(CoreIsoPhast::build_cd(&g, &[0, 0, 0], &PhastOptions::default()).is_err());
    let g2 = Graph::<u32>::from_edges(2, vec![(0, 1, 1)]).unwrap();
    assert!(CoreIsoPhast::build_cd(&g2, &[0, 1], &PhastOptions::default()).is_err());
    let part = EdgePartition::new(&g, vec![0; 8]).unwrap();
    let opt = DtOptions {
        compress: 7,
        ..DtOptions::default()
    };
    assert!(DtIsoPhast::build(&g, &part, &opt).is_err());
}

fn instance() -> impl Strategy<Value = (Graph<u32>, Vec<u32>)> {
    (3usize..24).prop_flat_map(|n| {
        (
            proptest::collection::vec((0..n as u32, 0..n as u32, 0u32..6), 0..3 * n),
            proptest::collection::vec(1u32..6, n),
            proptest::collection::vec(0..4u32, n),
            Just(n),
        )
            .prop_map(|(extra, ring, cells, n)| {
                let mut edges: Vec<(u32, u32, u32)> =
                    (0..n as u32).map(|v| (v, (v + 1) % n as u32, ring[v as usize])).collect();
                edges.extend(extra);
                (Graph::from_edges(n, edges).unwrap(), compact(&cells))
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
    fn random_instances_match_oracle((g, cells) in instance(), s_pick in 0usize..1000, tau in 0u32..40, c_pick in 0usize..1000) {
        let n = g.num_vertices();
        let s = s_pick % n;
        let expect = brute_force_isochrone(&g, s, tau);
        let c = c_pick % (n + 1);
        prop_assert_eq!(IsoPhastCore::new(cd(&g, &cells)).query(s, tau), expect.clone());
        prop_assert_eq!(IsoPhastCore::new(cp(&g, &cells, FlagRule::Exact)).query(s, tau), expect.clone());
        prop_assert_eq!(IsoPhastCore::new(cp(&g, &cells, FlagRule::Relaxed)).query(s, tau), expect.clone());
        prop_assert_eq!(IsoPhastDt::new(dt(&g, &cells, c)).query(s, tau), expect);
    }

    #[test]
    fn relaxed_flags_activate_a_superset((g, cells) in instance(), s_pick in 0usize..1000, tau in 0u32..40) {
        let s = s_pick % g.num_vertices();
        let exact = IsoPhastCore::new(cp(&g, &cells, FlagRule::Exact)).query_with_stats(s, tau, 1).1;
        let relaxed = IsoPhastCore::new(cp(&g, &cells, FlagRule::Relaxed)).query_with_stats(s, tau, 1).1;
        prop_assert!(relaxed.active_cells >= exact.active_cells);
    }

    #[test]
    fn one_to_all_matches_dijkstra((g, cells) in instance(), s_pick in 0usize..1000) {
        let s = s_pick % g.num_vertices();
        let d = dijkstra_distances(&g, s);
        prop_assert_eq!(cd(&g, &cells).one_to_all(s), d.clone());
        prop_assert_eq!(cp(&g, &cells, FlagRule::Exact).one_to_all(s), d);
    }

    #[test]
    fn parallel_queries_are_deterministic((g, cells) in instance(), s_pick in 0usize..1000, tau in 0u32..40) {
        let s = s_pick % g.num_vertices();
        let a = IsoPhastCore::new(cp(&g, &cells, FlagRule::Exact));
        let b = IsoPhastDt::new(dt(&g, &cells, 0));
        let ra = a.query(s, tau);
        let rb = b.query(s, tau);
        for threads in [2, 4] {
            prop_assert_eq!(a.query_with_stats(s, tau, threads).0, ra.clone());
            prop_assert_eq!(b.query_with_stats(s, tau, threads).0, rb.clone());
        }
    }

    #[test]
    fn bounds_hold_for_random_pairs((g, cells) in instance(), s_pick in 0usize..1000) {
        let s = s_pick % g.num_vertices();
        let data = dt(&g, &cells, 0);
        let edge_cells: Vec<u32> = (0..g.num_edges()).map(|e| cells[g.tail(e)]).collect();
        let part = EdgePartition::new(&g, edge_cells.clone()).unwrap();
        let k = part.num_cells();
        let d = dijkstra_distances(&g, s);
        let b = data.bounds();
        for e in 0..g.num_edges() {
            if g.tail(e) != s && g.head(e) != s {
                continue;
            }
            let i = edge_cells[e] as usize;
            for e2 in 0..g.num_edges() {
                let j = edge_cells[e2] as usize;
                prop_assert!(j < k);
                for v in [g.tail(e2), g.head(e2)] {
                    prop_assert!(b.lower(i, j) <= d[v] && d[v] <= b.upper(i, j));
                }
            }
        }
    }
}
