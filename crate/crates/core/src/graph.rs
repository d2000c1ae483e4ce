//! Static directed road graph in adjacency-array form.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::weight::Weight;

/// Marker for "no vertex" in id maps.
pub const NO_VERTEX: u32 = u32::MAX;

/// Directed graph with forward and reverse adjacency arrays.
///
/// Edge ids are positions in the canonical forward order (sorted by tail,
/// then head). Parallel edges are collapsed to their minimum weight and
/// self-loops are dropped at construction, so `(tail, head)` identifies an
/// edge uniquely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<W> {
    first_out: Vec<u32>,
    head: Vec<u32>,
    tail: Vec<u32>,
    weight: Vec<W>,
    first_in: Vec<u32>,
    in_edge: Vec<u32>,
}

impl<W: Weight> Graph<W> {
    /// Builds the canonical graph from an arbitrary edge list.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32, W)>,
    {
        if n >= NO_VERTEX as usize {
            return Err(Error::validation(format!("too many vertices: {n}")));
        }
        let mut list: Vec<(u32, u32, W)> = Vec::new();
        for (u, v, w) in edges {
            if u as usize >= n || v as usize >= n {
                return Err(Error::validation(format!(
                    "edge endpoint out of range: ({u}, {v}) with n = {n}"
                )));
            }
            if w.is_inf() {
                return Err(Error::validation(format!("edge ({u}, {v}) has infinite weight")));
            }
            if u != v {
                list.push((u, v, w));
            }
        }
        list.sort_unstable();
        list.dedup_by(|next, kept| next.0 == kept.0 && next.1 == kept.1);
        Ok(Self::from_sorted_unique(n, list))
    }

    fn from_sorted_unique(n: usize, list: Vec<(u32, u32, W)>) -> Self {
        let m = list.len();
        let mut first_out = vec![0u32; n + 1];
        let mut head = Vec::with_capacity(m);
        let mut tail = Vec::with_capacity(m);
        let mut weight = Vec::with_capacity(m);
        let mut in_deg = vec![0u32; n + 1];
        for &(u, v, w) in &list {
            first_out[u as usize + 1] += 1;
            in_deg[v as usize + 1] += 1;
            tail.push(u);
            head.push(v);
            weight.push(w);
        }
        for i in 0..n {
            first_out[i + 1] += first_out[i];
            in_deg[i + 1] += in_deg[i];
        }
        let first_in = in_deg.clone();
        let mut fill = in_deg;
        let mut in_edge = vec![0u32; m];
        // forward order is sorted by tail, so each in-list ends up sorted by tail
        for e in 0..m {
            let v = head[e] as usize;
            in_edge[fill[v] as usize] = e as u32;
            fill[v] += 1;
        }
        Graph {
            first_out,
            head,
            tail,
            weight,
            first_in,
            in_edge,
        }
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.first_out.len() - 1
    }

    #[inline]
    pub fn num_edges(&self) -> usize {
        self.head.len()
    }

    /// Ids of the edges leaving `v`.
    #[inline]
    pub fn out_edges(&self, v: usize) -> Range<usize> {
        self.first_out[v] as usize..self.first_out[v + 1] as usize
    }

    /// Ids of the edges entering `v`, ordered by tail.
    #[inline]
    pub fn in_edges(&self, v: usize) -> &[u32] {
        &self.in_edge[self.first_in[v] as usize..self.first_in[v + 1] as usize]
    }

    #[inline]
    pub fn head(&self, e: usize) -> usize {
        self.head[e] as usize
    }

    #[inline]
    pub fn tail(&self, e: usize) -> usize {
        self.tail[e] as usize
    }

    #[inline]
    pub fn weight(&self, e: usize) -> W {
        self.weight[e]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_edges(v).len()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_edges(v).len()
    }

    /// Iterates `(tail, head, weight)` in canonical order.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32, W)> + '_ {
        (0..self.num_edges()).map(move |e| (self.tail[e], self.head[e], self.weight[e]))
    }

    /// Edge id of `(u, v)`, if present.
    pub fn find_edge(&self, u: usize, v: usize) -> Option<usize> {
        let range = self.out_edges(u);
        let start = range.start;
        self.head[range]
            .binary_search(&(v as u32))
            .ok()
            .map(|i| start + i)
    }

    /// Relabels vertices: edge `(u, v, w)` becomes `(perm(u), perm(v), w)`.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self> {
        if perm.len() != self.num_vertices() {
            return Err(Error::validation(format!(
                "permutation of length {} applied to graph with {} vertices",
                perm.len(),
                self.num_vertices()
            )));
        }
        let mut list: Vec<(u32, u32, W)> = self
            .edges()
            .map(|(u, v, w)| (perm.new_id(u as usize) as u32, perm.new_id(v as usize) as u32, w))
            .collect();
        list.sort_unstable();
        Ok(Self::from_sorted_unique(self.num_vertices(), list))
    }

    /// Subgraph induced by the vertices with `new_of[v] != NO_VERTEX`,
    /// relabelled through `new_of`.
    pub fn induced(&self, new_of: &[u32], new_n: usize) -> Self {
        let mut list: Vec<(u32, u32, W)> = self
            .edges()
            .filter_map(|(u, v, w)| {
                let (a, b) = (new_of[u as usize], new_of[v as usize]);
                (a != NO_VERTEX && b != NO_VERTEX).then_some((a, b, w))
            })
            .collect();
        list.sort_unstable();
        Self::from_sorted_unique(new_n, list)
    }

    /// Graph with every edge reversed. Edge ids are not preserved.
    pub fn reversed(&self) -> Self {
        let mut list: Vec<(u32, u32, W)> = self.edges().map(|(u, v, w)| (v, u, w)).collect();
        list.sort_unstable();
        Self::from_sorted_unique(self.num_vertices(), list)
    }

    /// Strongly connected component id per vertex (iterative Tarjan).
    pub fn strongly_connected_components(&self) -> (Vec<u32>, usize) {
        let n = self.num_vertices();
        const UNVISITED: u32 = u32::MAX;
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut comp = vec![UNVISITED; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut call: Vec<(u32, u32)> = Vec::new();
        let mut next_index = 0u32;
        let mut num_comp = 0usize;
        for root in 0..n {
            if index[root] != UNVISITED {
                continue;
            }
            call.push((root as u32, self.first_out[root]));
            index[root] = next_index;
            low[root] = next_index;
            next_index += 1;
            stack.push(root as u32);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut pos)) = call.last_mut() {
                let v = v as usize;
                if *pos < self.first_out[v + 1] {
                    let w = self.head[*pos as usize] as usize;
                    *pos += 1;
                    if index[w] == UNVISITED {
                        index[w] = next_index;
                        low[w] = next_index;
                        next_index += 1;
                        stack.push(w as u32);
                        on_stack[w] = true;
                        call.push((w as u32, self.first_out[w]));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        let p = parent as usize;
                        low[p] = low[p].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack underflow") as usize;
                            on_stack[w] = false;
                            comp[w] = num_comp as u32;
                            if w == v {
                                break;
                            }
                        }
                        num_comp += 1;
                    }
                }
            }
        }
        (comp, num_comp)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.num_vertices() <= 1 || self.strongly_connected_components().1 == 1
    }
}

/// Mapping from the vertices of a graph to those of an induced subgraph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubgraphMap {
    /// New id per old vertex, `NO_VERTEX` for dropped vertices.
    pub new_of: Vec<u32>,
    /// Old id per new vertex.
    pub old_of: Vec<u32>,
}

impl SubgraphMap {
    pub fn is_identity(&self) -> bool {
        self.new_of.len() == self.old_of.len()
            && self.new_of.iter().enumerate().all(|(i, &v)| v as usize == i)
    }
}

/// Restricts `graph` (and optionally its coordinates) to the largest
/// strongly connected component. Ties go to the component holding the
/// smallest vertex id.
pub fn restrict_to_largest_scc<W: Weight>(
    graph: &Graph<W>,
    coords: Option<&crate::coords::Coordinates>,
) -> (Graph<W>, Option<crate::coords::Coordinates>, SubgraphMap) {
    let n = graph.num_vertices();
    let (comp, num_comp) = graph.strongly_connected_components();
    let mut size = vec![0usize; num_comp];
    let mut min_member = vec![usize::MAX; num_comp];
    for (v, &c) in comp.iter().enumerate() {
        size[c as usize] += 1;
        min_member[c as usize] = min_member[c as usize].min(v);
    }
    let best = (0..num_comp)
        .min_by_key(|&c| (std::cmp::Reverse(size[c]), min_member[c]))
        .map(|c| c as u32);
    let mut new_of = vec![NO_VERTEX; n];
    let mut old_of = Vec::new();
    if let Some(best) = best {
        for v in 0..n {
            if comp[v] == best {
                new_of[v] = old_of.len() as u32;
                old_of.push(v as u32);
            }
        }
    }
    let sub = graph.induced(&new_of, old_of.len());
    let sub_coords = coords.map(|c| c.select(&old_of));
    (sub, sub_coords, SubgraphMap { new_of, old_of })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn canonical_form_collapses_and_drops() {
        let g = Graph::<u32>::from_edges(3, [(0, 1, 5), (0, 1, 3), (1, 1, 2), (2, 0, 1)]).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1, 3), (2, 0, 1)]);
    }

    #[test]
    fn endpoint_out_of_range() {
        assert!(Graph::<u32>::from_edges(2, [(0, 2, 1)]).is_err());
    }

    #[test]
    fn forward_and_reverse_agree() {
        let g = fixtures::tg1();
        let mut seen = 0;
        for v in 0..g.num_vertices() {
            for &e in g.in_edges(v) {
                assert_eq!(g.head(e as usize), v);
                seen += 1;
            }
        }
        assert_eq!(seen, g.num_edges());
        let outs: usize = (0..4).map(|v| g.out_degree(v)).sum();
        assert_eq!(outs, g.num_edges());
    }

    #[test]
    fn tg1_is_strongly_connected() {
        let g = fixtures::tg1();
        let (sub, _, map) = restrict_to_largest_scc(&g, None);
        assert!(map.is_identity());
        assert_eq!(sub, g);
    }

    #[test]
    fn two_cycles_tie_goes_to_smallest_id() {
        let g = Graph::<u32>::from_edges(4, [(2, 3, 1), (3, 2, 1), (0, 1, 1), (1, 0, 1)]).unwrap();
        let (sub, _, map) = restrict_to_largest_scc(&g, None);
        assert_eq!(map.old_of, vec![0, 1]);
        assert_eq!(sub.num_edges(), 2);
        assert_eq!(map.new_of[2], NO_VERTEX);
    }

    #[test]
    fn out_star_collapses_to_single_vertex() {
        let g = Graph::<u32>::from_edges(4, [(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap();
        let (sub, _, _) = restrict_to_largest_scc(&g, None);
        assert_eq!(sub.num_vertices(), 1);
        assert_eq!(sub.num_edges(), 0);
    }

    #[test]
    fn swap_relabels_edges() {
        let g = fixtures::tg1();
        let perm = Permutation::from_new_of(vec![1, 0, 2, 3]).unwrap();
        let p = g.permuted(&perm).unwrap();
        let e = p.find_edge(1, 0).expect("edge 1->0");
        assert_eq!(p.weight(e), 2);
        assert!(p.find_edge(0, 1).is_none());
        let back = p.permuted(&perm.inverse()).unwrap();
        assert_eq!(back, g);
    }
}
