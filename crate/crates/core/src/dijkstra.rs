//! Plain Dijkstra, the isoDijkstra baseline and the brute-force oracle.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use crate::graph::Graph;
use crate::heap::IndexedHeap;
use crate::isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
use crate::scratch::{Labels, Marks, Pool};
use crate::weight::Weight;

/// One-to-all distances with a lazy-deletion binary heap. Deliberately
/// independent of the addressable heap used by the engines.
pub fn dijkstra_distances<W: Weight>(graph: &Graph<W>, source: usize) -> Vec<W> {
    let mut dist = vec![W::INF; graph.num_vertices()];
    let mut queue = BinaryHeap::new();
    dist[source] = W::zero();
    queue.push(Reverse((W::zero(), source)));
    while let Some(Reverse((d, u))) = queue.pop() {
        if d > dist[u] {
            continue;
        }
        for e in graph.out_edges(u) {
            let v = graph.head(e);
            let nd = d.add_sat(graph.weight(e));
            if nd < dist[v] {
                dist[v] = nd;
                queue.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

/// Reference isochrone: full Dijkstra, then every edge is tested against
/// the definition.
pub fn brute_force_isochrone<W: Weight>(graph: &Graph<W>, source: usize, tau: W) -> IsochroneEdgeSet {
    let dist = dijkstra_distances(graph, source);
    IsochroneEdgeSet::from_range(graph, |v| dist[v] <= tau)
}

/// Working memory of one isoDijkstra run.
pub struct IsoScratch<W> {
    pub labels: Labels<W>,
    pub settled: Marks,
    pub heap: IndexedHeap<W>,
}

impl<W: Weight> IsoScratch<W> {
    pub fn new(n: usize) -> Self {
        IsoScratch {
            labels: Labels::new(n),
            settled: Marks::new(n),
            heap: IndexedHeap::new(n),
        }
    }

    pub fn reset(&mut self) {
        self.labels.reset();
        self.settled.reset();
        self.heap.clear();
    }
}

/// Runs isoDijkstra from `source` and returns the edge set with the number
/// of settled vertices.
pub fn iso_dijkstra_with<W: Weight>(
    graph: &Graph<W>,
    source: usize,
    tau: W,
    scratch: &mut IsoScratch<W>,
) -> (IsochroneEdgeSet, u64) {
    scratch.reset();
    let IsoScratch {
        labels,
        settled,
        heap,
    } = scratch;
    labels.set(source, W::zero());
    heap.push_or_decrease(source, W::zero());
    let mut count = 0u64;
    while let Some((u, du)) = heap.peek() {
        if du > tau {
            break;
        }
        heap.pop();
        settled.set(u);
        count += 1;
        for e in graph.out_edges(u) {
            let v = graph.head(e);
            if settled.get(v) {
                continue;
            }
            let nd = du.add_sat(graph.weight(e));
            if labels.relax(v, nd) {
                heap.push_or_decrease(v, nd);
            }
        }
        for &e in graph.in_edges(u) {
            let v = graph.tail(e as usize);
            if !settled.get(v) && !heap.contains(v) {
                heap.push_or_decrease(v, W::INF);
            }
        }
    }
    let mut out = Vec::new();
    for (q, _) in heap.entries() {
        for &e in graph.in_edges(q) {
            if settled.get(graph.tail(e as usize)) {
                out.push((e, Direction::InOut));
            }
        }
        for e in graph.out_edges(q) {
            if settled.get(graph.head(e)) {
                out.push((e as u32, Direction::OutIn));
            }
        }
    }
    (IsochroneEdgeSet::from_unsorted(out), count)
}

/// Convenience wrapper allocating fresh scratch.
pub fn iso_dijkstra<W: Weight>(graph: &Graph<W>, source: usize, tau: W) -> IsochroneEdgeSet {
    iso_dijkstra_with(graph, source, tau, &mut IsoScratch::new(graph.num_vertices())).0
}

/// The baseline as a reusable engine.
pub struct IsoDijkstra<W> {
    graph: Arc<Graph<W>>,
    scratch: Pool<IsoScratch<W>>,
}

impl<W: Weight> IsoDijkstra<W> {
    pub fn new(graph: Arc<Graph<W>>) -> Self {
        IsoDijkstra {
            graph,
            scratch: Pool::default(),
        }
    }
}

impl<W: Weight> IsochroneAlgorithm<W> for IsoDijkstra<W> {
    fn name(&self) -> &str {
        "isodijkstra"
    }

    fn query_with_stats(&self, source: usize, tau: W, _threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        let n = self.graph.num_vertices();
        let start = Instant::now();
        let (set, settled) = self
            .scratch
            .with(|| IsoScratch::new(n), |s| iso_dijkstra_with(&self.graph, source, tau, s));
        let stats = QueryStats {
            settled,
            active_cells: 0,
            upward: start.elapsed(),
            scan: Default::default(),
        };
        (set, stats)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::isochrone::Direction::{InOut, OutIn};

    fn named(g: &Graph<u32>, set: &IsochroneEdgeSet) -> Vec<(usize, usize, Direction)> {
        set.iter().map(|(e, d)| (g.tail(e) + 1, g.head(e) + 1, d)).collect()
    }

    #[test]
    fn tg1_distances() {
        assert_eq!(dijkstra_distances(&fixtures::tg1(), 0), vec![0, 2, 5, 9]);
    }

    #[test]
    fn tg1_examples() {
        let g = fixtures::tg1();
        assert_eq!(named(&g, &iso_dijkstra(&g, 0, 5)), vec![(3, 4, InOut), (4, 1, OutIn)]);
        assert_eq!(
            named(&g, &iso_dijkstra(&g, 0, 0)),
            vec![(1, 2, InOut), (1, 3, InOut), (4, 1, OutIn)]
        );
        assert!(iso_dijkstra(&g, 0, 9).is_empty());
        assert!(brute_force_isochrone(&g, 0, u32::MAX - 1).is_empty());
    }

    #[test]
    fn tg1_exhaustive() {
        let g = fixtures::tg1();
        for s in 0..4 {
            for tau in 0..=10 {
                assert_eq!(iso_dijkstra(&g, s, tau), brute_force_isochrone(&g, s, tau), "s={s} tau={tau}");
            }
        }
    }

    #[test]
    fn tg2_excludes_detour_edge() {
        let g = fixtures::tg2();
        let set = iso_dijkstra(&g, 0, 4);
        assert_eq!(set, brute_force_isochrone(&g, 0, 4));
        let edges = named(&g, &set);
        assert!(edges.contains(&(5, 6, InOut)));
        assert!(edges.contains(&(6, 1, OutIn)));
        assert!(!edges.iter().any(|&(t, h, _)| (t, h) == (4, 5)));
    }

    #[test]
    fn label_equal_to_limit_is_in_range() {
        let g = fixtures::tg1();
        let set = iso_dijkstra(&g, 0, 2);
        // vertex 2 sits exactly at the limit, so 1->2 is not an isochrone edge
        assert!(!named(&g, &set).iter().any(|&(t, h, _)| (t, h) == (1, 2)));
    }
}
