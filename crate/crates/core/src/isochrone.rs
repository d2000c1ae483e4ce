//! Query result type and the common interface of all isochrone algorithms.

use std::fmt;
use std::time::Duration;

use crate::graph::Graph;
use crate::weight::Weight;

/// Which endpoint of an isochrone edge is in range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// Tail in range, head out of range.
    InOut,
    /// Head in range, tail out of range.
    OutIn,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::InOut => "in_out",
            Direction::OutIn => "out_in",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Sorted, duplicate-free set of isochrone edges, identified by their ids
/// in the input graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IsochroneEdgeSet {
    edges: Vec<(u32, Direction)>,
}

impl IsochroneEdgeSet {
    /// Canonicalizes an arbitrary list that may contain duplicates.
    pub fn from_unsorted(mut edges: Vec<(u32, Direction)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        debug_assert!(
            edges.windows(2).all(|w| w[0].0 != w[1].0),
            "edge reported with both directions"
        );
        IsochroneEdgeSet { edges }
    }

    /// Definition-level construction from a range predicate.
    pub fn from_range<W: Weight>(graph: &Graph<W>, in_range: impl Fn(usize) -> bool) -> Self {
        let mut edges = Vec::new();
        for e in 0..graph.num_edges() {
            match (in_range(graph.tail(e)), in_range(graph.head(e))) {
                (true, false) => edges.push((e as u32, Direction::InOut)),
                (false, true) => edges.push((e as u32, Direction::OutIn)),
                _ => {}
            }
        }
        IsochroneEdgeSet { edges }
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Direction)> + '_ {
        self.edges.iter().map(|&(e, d)| (e as usize, d))
    }

    pub fn contains(&self, edge: usize) -> bool {
        self.edges.binary_search_by_key(&(edge as u32), |x| x.0).is_ok()
    }

    pub fn direction(&self, edge: usize) -> Option<Direction> {
        self.edges
            .binary_search_by_key(&(edge as u32), |x| x.0)
            .ok()
            .map(|i| self.edges[i].1)
    }

    /// 64-bit FNV-1a over the canonical `(edge, direction)` sequence.
    pub fn hash64(&self) -> u64 {
        let mut h = Fnv1a::new();
        for &(e, d) in &self.edges {
            h.write(&e.to_le_bytes());
            h.write(&[d as u8]);
        }
        h.finish()
    }

    /// One `tail head direction` line per edge, 1-based.
    pub fn to_text<W: Weight>(&self, graph: &Graph<W>) -> String {
        let mut s = String::new();
        for (e, d) in self.iter() {
            s.push_str(&format!("{} {} {}\n", graph.tail(e) + 1, graph.head(e) + 1, d));
        }
        s
    }
}

/// 64-bit FNV-1a, used for reproducible result fingerprints.
#[derive(Clone, Copy, Debug)]
pub struct Fnv1a(u64);

impl Fnv1a {
    pub fn new() -> Self {
        Fnv1a(0xcbf2_9ce4_8422_2325)
    }

    pub fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }

    pub fn finish(&self) -> u64 {
        self.0
    }
}

impl Default for Fnv1a {
    fn default() -> Self {
        Self::new()
    }
}

/// Work counters and phase timings of one query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryStats {
    pub settled: u64,
    pub active_cells: u64,
    pub upward: Duration,
    pub scan: Duration,
}

/// Common interface of every isochrone algorithm.
///
/// Sources are vertex ids of the input graph and results refer to its edge
/// ids, whatever internal ordering an implementation uses.
pub trait IsochroneAlgorithm<W: Weight>: Send + Sync {
    fn name(&self) -> &str;

    fn query_with_stats(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats);

    fn query(&self, source: usize, tau: W) -> IsochroneEdgeSet {
        self.query_with_stats(source, tau, 1).0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_and_hash() {
        let a = IsochroneEdgeSet::from_unsorted(vec![(4, Direction::OutIn), (2, Direction::InOut), (4, Direction::OutIn)]);
        assert_eq!(a.len(), 2);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![(2, Direction::InOut), (4, Direction::OutIn)]);
        let b = IsochroneEdgeSet::from_unsorted(vec![(2, Direction::InOut), (4, Direction::OutIn)]);
        assert_eq!(a.hash64(), b.hash64());
        assert_ne!(a.hash64(), IsochroneEdgeSet::default().hash64());
        assert_eq!(IsochroneEdgeSet::default().hash64(), 0xcbf2_9ce4_8422_2325);
    }
}
