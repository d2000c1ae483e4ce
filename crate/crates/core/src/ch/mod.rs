//! Contraction hierarchies with PHAST sweeps and RPHAST target selection.

mod contract;

use std::collections::VecDeque;
use std::ops::Range;

pub use contract::{contract, Contraction, ContractionParams};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heap::IndexedHeap;
use crate::permutation::Permutation;
use crate::scratch::{Labels, Pool};
use crate::weight::Weight;

/// Search scratch of a hierarchy.
pub struct ChScratch<W> {
    pub fwd: Labels<W>,
    pub bwd: Labels<W>,
    pub heap: IndexedHeap<W>,
}

impl<W: Weight> ChScratch<W> {
    pub fn new(n: usize) -> Self {
        ChScratch {
            fwd: Labels::new(n),
            bwd: Labels::new(n),
            heap: IndexedHeap::new(n),
        }
    }
}

/// Builds CSR arrays from `(key, other, weight)` triples.
pub(crate) fn csr<W: Copy>(n: usize, mut list: Vec<(u32, u32, W)>) -> (Vec<u32>, Vec<u32>, Vec<W>) {
    list.sort_unstable_by_key(|e| (e.0, e.1));
    let mut first = vec![0u32; n + 1];
    for e in &list {
        first[e.0 as usize + 1] += 1;
    }
    for i in 0..n {
        first[i + 1] += first[i];
    }
    let other = list.iter().map(|e| e.1).collect();
    let w = list.iter().map(|e| e.2).collect();
    (first, other, w)
}

/// Fully contracted graph with vertices renumbered by descending CH level,
/// so a PHAST sweep is a single pass over ids `0..n`.
pub struct Hierarchy<W> {
    perm: Permutation,
    level: Vec<u32>,
    up_first: Vec<u32>,
    up_head: Vec<u32>,
    up_w: Vec<W>,
    down_first: Vec<u32>,
    down_tail: Vec<u32>,
    down_w: Vec<W>,
    shortcuts: usize,
    scratch: Pool<ChScratch<W>>,
}

impl<W: Weight> Hierarchy<W> {
    pub fn build(graph: &Graph<W>, params: &ContractionParams) -> Self {
        let n = graph.num_vertices();
        let c = contract(graph, &vec![false; n], params);
        Self::from_contraction(n, &c)
    }

    pub fn from_contraction(n: usize, c: &Contraction<W>) -> Self {
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by_key(|&v| (std::cmp::Reverse(c.level[v as usize]), std::cmp::Reverse(c.rank[v as usize])));
        let perm = Permutation::from_order(order.clone()).expect("sort yields a bijection");
        let map = |e: &(u32, u32, W)| (perm.new_id(e.0 as usize) as u32, perm.new_id(e.1 as usize) as u32, e.2);
        let up: Vec<_> = c.up.iter().map(map).collect();
        let down: Vec<_> = c.down.iter().map(|e| {
            let (t, h, w) = map(e);
            (h, t, w)
        }).collect();
        let (up_first, up_head, up_w) = csr(n, up);
        let (down_first, down_tail, down_w) = csr(n, down);
        let level = order.iter().map(|&v| c.level[v as usize]).collect();
        Hierarchy {
            perm,
            level,
            up_first,
            up_head,
            up_w,
            down_first,
            down_tail,
            down_w,
            shortcuts: c.shortcuts,
            scratch: Pool::default(),
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.level.len()
    }

    pub fn num_shortcuts(&self) -> usize {
        self.shortcuts
    }

    pub fn num_upward_edges(&self) -> usize {
        self.up_head.len()
    }

    pub fn num_downward_edges(&self) -> usize {
        self.down_tail.len()
    }

    /// Original id to sweep position.
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// CH level of the vertex at sweep position `v`.
    pub fn level(&self, v: usize) -> u32 {
        self.level[v]
    }

    #[inline]
    pub fn upward(&self, v: usize) -> impl Iterator<Item = (usize, W)> + '_ {
        let r = self.up_first[v] as usize..self.up_first[v + 1] as usize;
        self.up_head[r.clone()].iter().zip(&self.up_w[r]).map(|(&h, &w)| (h as usize, w))
    }

    /// Incoming downward edges of `v`: tails rank above `v`.
    #[inline]
    pub fn downward_in(&self, v: usize) -> impl Iterator<Item = (usize, W)> + '_ {
        let r = self.down_first[v] as usize..self.down_first[v + 1] as usize;
        self.down_tail[r.clone()].iter().zip(&self.down_w[r]).map(|(&t, &w)| (t as usize, w))
    }

    /// Dijkstra on the upward graph from several sources (sweep positions)
    /// with offsets. Stops once the minimum key exceeds `stop_at`. Returns
    /// the number of settled vertices.
    pub fn upward_search(
        &self,
        sources: &[(usize, W)],
        stop_at: Option<W>,
        labels: &mut Labels<W>,
        heap: &mut IndexedHeap<W>,
    ) -> u64 {
        heap.clear();
        for &(s, d) in sources {
            if labels.relax(s, d) {
                heap.push_or_decrease(s, d);
            }
        }
        let limit = stop_at.unwrap_or(W::INF);
        let mut settled = 0;
        while let Some((u, du)) = heap.peek() {
            if du > limit {
                break;
            }
            heap.pop();
            settled += 1;
            for (v, w) in self.upward(u) {
                let nd = du.add_sat(w);
                if labels.relax(v, nd) {
                    heap.push_or_decrease(v, nd);
                }
            }
        }
        heap.clear();
        settled
    }

    /// PHAST sweep over a range of sweep positions.
    pub fn sweep(&self, labels: &mut Labels<W>, range: Range<usize>) {
        for v in range {
            let mut best = labels.get(v);
            for (u, w) in self.downward_in(v) {
                debug_assert!(u < v, "sweep reads a label written later");
                best = best.min(labels.get(u).add_sat(w));
            }
            if best < labels.get(v) {
                labels.set(v, best);
            }
        }
    }

    /// Point-to-point distance (original ids).
    pub fn distance(&self, s: usize, t: usize) -> W {
        let n = self.num_vertices();
        let (s, t) = (self.perm.new_id(s), self.perm.new_id(t));
        self.scratch.with(
            || ChScratch::new(n),
            |sc| {
                sc.fwd.reset();
                sc.bwd.reset();
                self.upward_search(&[(s, W::zero())], None, &mut sc.fwd, &mut sc.heap);
                // backward search on the reversed downward graph
                sc.heap.clear();
                sc.bwd.set(t, W::zero());
                sc.heap.push_or_decrease(t, W::zero());
                let mut best = W::INF;
                while let Some((u, du)) = sc.heap.pop() {
                    if du >= best {
                        break;
                    }
                    best = best.min(du.add_sat(sc.fwd.get(u)));
                    for (x, w) in self.downward_in(u) {
                        let nd = du.add_sat(w);
                        if sc.bwd.relax(x, nd) {
                            sc.heap.push_or_decrease(x, nd);
                        }
                    }
                }
                sc.heap.clear();
                best
            },
        )
    }

    /// Distances from `s` to every vertex (original ids) by one upward
    /// search and one full sweep.
    pub fn one_to_all(&self, s: usize) -> Vec<W> {
        let n = self.num_vertices();
        self.scratch.with(
            || ChScratch::new(n),
            |sc| {
                sc.fwd.reset();
                self.upward_search(&[(self.perm.new_id(s), W::zero())], None, &mut sc.fwd, &mut sc.heap);
                self.sweep(&mut sc.fwd, 0..n);
                (0..n).map(|v| sc.fwd.get(self.perm.new_id(v))).collect()
            },
        )
    }

    /// Restriction of the downward graph to everything the targets
    /// (original ids) depend on.
    pub fn select(&self, targets: &[usize]) -> Result<SelectionGraph<W>> {
        if targets.is_empty() {
            return Err(Error::Config("selection needs at least one target".into()));
        }
        let n = self.num_vertices();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for &t in targets {
            let v = self.perm.new_id(t);
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(v) = queue.pop_front() {
            for (u, _) in self.downward_in(v) {
                if !seen[u] {
                    seen[u] = true;
                    queue.push_back(u);
                }
            }
        }
        let verts: Vec<u32> = (0..n).filter(|&v| seen[v]).map(|v| v as u32).collect();
        let mut local = vec![u32::MAX; n];
        for (i, &v) in verts.iter().enumerate() {
            local[v as usize] = i as u32;
        }
        let mut first = Vec::with_capacity(verts.len() + 1);
        let mut tail = Vec::new();
        let mut weight = Vec::new();
        first.push(0);
        for &v in &verts {
            for (u, w) in self.downward_in(v as usize) {
                tail.push(local[u]);
                weight.push(w);
            }
            first.push(tail.len() as u32);
        }
        let target_pos = targets.iter().map(|&t| local[self.perm.new_id(t)]).collect();
        Ok(SelectionGraph {
            verts,
            first,
            tail,
            weight,
            targets: target_pos,
        })
    }

    /// Distances from `s` to the targets of a selection, in target order.
    pub fn one_to_many(&self, s: usize, sel: &SelectionGraph<W>) -> Vec<W> {
        let n = self.num_vertices();
        self.scratch.with(
            || ChScratch::new(n),
            |sc| {
                sc.fwd.reset();
                self.upward_search(&[(self.perm.new_id(s), W::zero())], None, &mut sc.fwd, &mut sc.heap);
                let mut local: Vec<W> = sel.verts.iter().map(|&v| sc.fwd.get(v as usize)).collect();
                sel.sweep(&mut local);
                sel.targets.iter().map(|&p| local[p as usize]).collect()
            },
        )
    }
}

/// Downward graph restricted to a target set, with contiguous local ids in
/// sweep order.
#[derive(Clone, Debug)]
pub struct SelectionGraph<W> {
    /// Sweep positions in the hierarchy, ascending.
    pub verts: Vec<u32>,
    first: Vec<u32>,
    /// Local ids of incoming-edge tails.
    tail: Vec<u32>,
    weight: Vec<W>,
    /// Local ids of the targets, in the order given.
    pub targets: Vec<u32>,
}

impl<W: Weight> SelectionGraph<W> {
    pub fn len(&self) -> usize {
        self.verts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.tail.len()
    }

    /// Sweep over local labels initialized from an upward search.
    pub fn sweep(&self, labels: &mut [W]) {
        for i in 0..self.verts.len() {
            let r = self.first[i] as usize..self.first[i + 1] as usize;
            let mut best = labels[i];
            for (&t, &w) in self.tail[r.clone()].iter().zip(&self.weight[r]) {
                best = best.min(labels[t as usize].add_sat(w));
            }
            labels[i] = best;
        }
    }
}

#[cfg(test)]
mod tests;
