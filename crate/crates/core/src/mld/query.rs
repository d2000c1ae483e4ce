//! Upward phase shared by isoCRP and isoGRASP, and both downward phases.

use std::sync::atomic::{AtomicU32, Ordering};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::{Overlay, Phase};
use crate::heap::IndexedHeap;
use crate::isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
use crate::scratch::{blocks, thread_pool, Labels, Marks, SharedLabels};
use crate::weight::Weight;

const FLAG_IN: u32 = 1;
const FLAG_O_CLEARED: u32 = 2;

/// i/o flags of every cell at every level, reset by generation.
pub(crate) struct CellFlags {
    cells: Vec<Vec<AtomicU32>>,
    gen: u32,
}

impl CellFlags {
    fn new<W: Weight>(ov: &Overlay<W>) -> Self {
        CellFlags {
            cells: ov
                .levels
                .iter()
                .map(|l| (0..l.num_cells()).map(|_| AtomicU32::new(0)).collect())
                .collect(),
            gen: 1,
        }
    }

    fn reset(&mut self) {
        self.gen += 1;
        if self.gen >= 1 << 29 {
            for level in &mut self.cells {
                level.iter_mut().for_each(|f| *f.get_mut() = 0);
            }
            self.gen = 1;
        }
    }

    #[inline]
    fn bits(&self, l: usize, c: usize) -> u32 {
        let x = self.cells[l - 1][c].load(Ordering::Relaxed);
        if x >> 2 == self.gen {
            x & 3
        } else {
            0
        }
    }

    #[inline]
    fn add(&self, l: usize, c: usize, bit: u32) {
        let b = self.bits(l, c);
        if b & bit == 0 {
            self.cells[l - 1][c].store((self.gen << 2) | b | bit, Ordering::Relaxed);
        }
    }

    #[inline]
    fn active(&self, l: usize, c: usize) -> bool {
        self.bits(l, c) == FLAG_IN
    }
}

pub(crate) struct Scratch<W> {
    labels: Labels<W>,
    settled: Marks,
    heap: IndexedHeap<W>,
    flags: CellFlags,
    edges: Vec<(u32, Direction)>,
}

impl<W: Weight> Scratch<W> {
    fn new(ov: &Overlay<W>) -> Self {
        Scratch {
            labels: Labels::new(ov.n),
            settled: Marks::new(ov.n),
            heap: IndexedHeap::new(ov.n),
            flags: CellFlags::new(ov),
            edges: Vec::new(),
        }
    }
}

pub(crate) struct Worker<W> {
    settled: Marks,
    heap: IndexedHeap<W>,
    edges: Vec<(u32, Direction)>,
    scanned: u64,
    cells: u64,
}

impl<W: Weight> Worker<W> {
    fn new(n: usize) -> Self {
        Worker {
            settled: Marks::new(n),
            heap: IndexedHeap::new(n),
            edges: Vec::new(),
            scanned: 0,
            cells: 0,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Descent {
    Dijkstra,
    Sweep,
}

impl<W: Weight> Overlay<W> {
    /// Level of the search graph at `u` for source `s`: one below the
    /// lowest level at which both share a cell.
    #[inline]
    fn search_level(&self, s: usize, u: usize) -> usize {
        for (i, cells) in self.cell.iter().enumerate() {
            if cells[u] == cells[s] {
                return i;
            }
        }
        self.cell.len()
    }

    /// Records a vertex known to be in range: sets `i` on its cells at
    /// levels `lo..=hi` and clears `o` where the eccentricity bound shows
    /// the whole cell to be in range.
    #[inline]
    #[allow(clippy::too_many_arguments)]
    fn mark_in_range(
        &self,
        u: usize,
        du: W,
        tau: W,
        lo: usize,
        hi: usize,
        phase: Phase,
        flags: &CellFlags,
        label: impl Fn(usize) -> W,
    ) {
        for l in lo..=hi {
            flags.add(l, self.cell[l - 1][u] as usize, FLAG_IN);
        }
        let check = self.mode.checks_unreachable(phase);
        for l in lo..=hi.min(self.blevel[u] as usize) {
            let c = self.cell[l - 1][u] as usize;
            if flags.bits(l, c) & FLAG_O_CLEARED != 0 {
                continue;
            }
            if du.add_sat(self.ecc(l, u, phase)) > tau {
                continue;
            }
            if check {
                let fits = |v: usize| label(v).add_sat(self.ecc(l, v, phase)) <= tau;
                let lvl = &self.levels[l - 1];
                let ok = if lvl.unr_first.is_empty() {
                    let row = lvl.row(c, u);
                    lvl.boundary(c)
                        .iter()
                        .zip(row)
                        .all(|(&v, d)| d.is_finite() || fits(v as usize))
                } else {
                    lvl.unreachable(u).iter().all(|&v| fits(v as usize))
                };
                if !ok {
                    continue;
                }
            }
            flags.add(l, c, FLAG_O_CLEARED);
        }
    }

    /// isoDijkstra on the search graph of `s`. Returns the number of
    /// settled vertices; emitted edges go to `sc.edges`.
    fn upward(&self, s: usize, tau: W, sc: &mut Scratch<W>) -> u64 {
        let Scratch {
            labels,
            settled,
            heap,
            flags,
            edges,
        } = sc;
        labels.reset();
        settled.reset();
        heap.clear();
        flags.reset();
        edges.clear();
        let top = self.levels.len();
        labels.set(s, W::zero());
        heap.push_or_decrease(s, W::zero());
        let mut count = 0;
        while let Some((u, du)) = heap.peek() {
            if du > tau {
                break;
            }
            heap.pop();
            settled.set(u);
            count += 1;
            if top > 0 {
                self.mark_in_range(u, du, tau, 1, top, Phase::Upward, flags, |v| labels.get(v));
            }
            let lv = self.search_level(s, u);
            for i in self.out_range(u) {
                if (self.out_top[i] as usize) < lv {
                    break;
                }
                let v = self.out_head[i] as usize;
                if settled.get(v) {
                    continue;
                }
                let nd = du.add_sat(self.out_w[i]);
                if labels.relax(v, nd) {
                    heap.push_or_decrease(v, nd);
                }
            }
            if lv >= 1 {
                let lvl = &self.levels[lv - 1];
                let c = self.cell[lv - 1][u] as usize;
                for (&v, &d) in lvl.boundary(c).iter().zip(lvl.row(c, u)) {
                    let v = v as usize;
                    if d.is_inf() || settled.get(v) {
                        continue;
                    }
                    let nd = du.add_sat(d);
                    if labels.relax(v, nd) {
                        heap.push_or_decrease(v, nd);
                    }
                }
            }
            for i in self.in_range(u) {
                if (self.in_top[i] as usize) < lv {
                    break;
                }
                let v = self.in_tail[i] as usize;
                if !settled.get(v) && !heap.contains(v) {
                    heap.push_or_decrease(v, W::INF);
                }
            }
        }
        for (q, _) in heap.entries() {
            let lv = self.search_level(s, q);
            for i in self.in_range(q) {
                if (self.in_top[i] as usize) < lv {
                    break;
                }
                if settled.get(self.in_tail[i] as usize) {
                    edges.push((self.in_eid[i], Direction::InOut));
                }
            }
            for i in self.out_range(q) {
                if (self.out_top[i] as usize) < lv {
                    break;
                }
                if settled.get(self.out_head[i] as usize) {
                    edges.push((self.out_eid[i], Direction::OutIn));
                }
            }
        }
        count
    }

    /// Active cells whose parent was covered by the upward phase, top
    /// level first.
    fn roots(&self, s: usize, flags: &CellFlags, all: bool) -> Vec<(usize, usize)> {
        let top = self.levels.len();
        let mut roots = Vec::new();
        for l in (1..=top).rev() {
            let own = self.cell[l - 1][s] as usize;
            let candidates: Vec<usize> = if l == top {
                (0..self.levels[l - 1].num_cells()).collect()
            } else {
                let parent = self.cell[l][s] as usize;
                self.levels[l].children(parent).iter().map(|&c| c as usize).collect()
            };
            for c in candidates {
                if c != own && (all || flags.active(l, c)) {
                    roots.push((l, c));
                }
            }
        }
        roots
    }

    fn descend(
        &self,
        roots: &[(usize, usize)],
        tau: W,
        how: Descent,
        all: bool,
        labels: SharedLabels<'_, W>,
        flags: &CellFlags,
        w: &mut Worker<W>,
    ) {
        let mut stack: Vec<(usize, usize)> = roots.iter().rev().copied().collect();
        while let Some((l, c)) = stack.pop() {
            w.cells += 1;
            match how {
                Descent::Dijkstra => self.cell_dijkstra(l, c, tau, labels, flags, w),
                Descent::Sweep => self.cell_sweep(l, c, tau, labels, flags, w),
            }
            if l >= 2 {
                for &child in self.levels[l - 1].children(c).iter().rev() {
                    if all || flags.active(l - 1, child as usize) {
                        stack.push((l - 1, child as usize));
                    }
                }
            }
        }
    }

    /// isoDijkstra inside one cell, seeded with its boundary vertices.
    fn cell_dijkstra(
        &self,
        l: usize,
        c: usize,
        tau: W,
        labels: SharedLabels<'_, W>,
        flags: &CellFlags,
        w: &mut Worker<W>,
    ) {
        let lvl = &self.levels[l - 1];
        let inner = l - 1;
        // SAFETY (all label accesses below): only members of `c` are read or
        // written and no other worker processes `c` or its descendants.
        let get = |v: usize| unsafe { labels.get(v) };
        w.settled.reset();
        for &b in lvl.boundary(c) {
            w.heap.push_or_decrease(b as usize, get(b as usize));
        }
        while let Some((u, du)) = w.heap.peek() {
            if du > tau {
                break;
            }
            w.heap.pop();
            w.settled.set(u);
            w.scanned += 1;
            if inner >= 1 {
                self.mark_in_range(u, du, tau, inner, inner, Phase::Downward, flags, get);
            }
            for i in self.out_range(u) {
                let t = self.out_top[i] as usize;
                if t < inner {
                    break;
                }
                let v = self.out_head[i] as usize;
                if t > inner || w.settled.get(v) {
                    continue;
                }
                let nd = du.add_sat(self.out_w[i]);
                if nd < get(v) {
                    unsafe { labels.set(v, nd) };
                    w.heap.push_or_decrease(v, nd);
                }
            }
            if inner >= 1 {
                let low = &self.levels[inner - 1];
                let cc = self.cell[inner - 1][u] as usize;
                for (&v, &d) in low.boundary(cc).iter().zip(low.row(cc, u)) {
                    let v = v as usize;
                    if d.is_inf() || w.settled.get(v) {
                        continue;
                    }
                    let nd = du.add_sat(d);
                    if nd < get(v) {
                        unsafe { labels.set(v, nd) };
                        w.heap.push_or_decrease(v, nd);
                    }
                }
            }
            for i in self.in_range(u) {
                let t = self.in_top[i] as usize;
                if t < inner {
                    break;
                }
                let v = self.in_tail[i] as usize;
                if t == inner && !w.settled.get(v) && !w.heap.contains(v) {
                    w.heap.push_or_decrease(v, W::INF);
                }
            }
        }
        for (q, _) in w.heap.entries() {
            for i in self.in_range(q) {
                let t = self.in_top[i] as usize;
                if t < inner {
                    break;
                }
                if t == inner && w.settled.get(self.in_tail[i] as usize) {
                    w.edges.push((self.in_eid[i], Direction::InOut));
                }
            }
            for i in self.out_range(q) {
                let t = self.out_top[i] as usize;
                if t < inner {
                    break;
                }
                if t == inner && w.settled.get(self.out_head[i] as usize) {
                    w.edges.push((self.out_eid[i], Direction::OutIn));
                }
            }
        }
        w.heap.clear();
    }

    /// Linear sweep over the internal members of one cell, then edge
    /// emission from the finished labels.
    fn cell_sweep(
        &self,
        l: usize,
        c: usize,
        tau: W,
        labels: SharedLabels<'_, W>,
        flags: &CellFlags,
        w: &mut Worker<W>,
    ) {
        let lvl = &self.levels[l - 1];
        let inner = l - 1;
        // SAFETY: as in `cell_dijkstra`, only members of `c` are accessed.
        let get = |v: usize| unsafe { labels.get(v) };
        let f = lvl.mem_first[c] as usize;
        let b = lvl.nbound[c] as usize;
        let end = lvl.mem_first[c + 1] as usize;
        for pos in f + b..end {
            let (src, len) = lvl.down_edges(pos);
            let mut best = W::INF;
            for (&s, &d) in src.iter().zip(len) {
                best = best.min(get(s as usize).add_sat(d));
            }
            unsafe { labels.set(lvl.members[pos] as usize, best) };
        }
        w.scanned += (end - f - b) as u64;
        if inner >= 1 {
            for &v in &lvl.members[f..end] {
                let dv = get(v as usize);
                if dv <= tau {
                    self.mark_in_range(v as usize, dv, tau, inner, inner, Phase::Downward, flags, get);
                }
            }
        }
        // each search-graph edge is emitted from its endpoint with the
        // larger id; edges between two boundary members come from the
        // per-cell list since boundary members are not swept
        for &v in &lvl.members[f + b..end] {
            let v = v as usize;
            let rv = get(v) <= tau;
            for i in self.out_range(v) {
                let t = self.out_top[i] as usize;
                if t < inner {
                    break;
                }
                let x = self.out_head[i] as usize;
                if t == inner && x < v && (get(x) <= tau) != rv {
                    w.edges.push((self.out_eid[i], if rv { Direction::InOut } else { Direction::OutIn }));
                }
            }
            for i in self.in_range(v) {
                let t = self.in_top[i] as usize;
                if t < inner {
                    break;
                }
                let x = self.in_tail[i] as usize;
                if t == inner && x < v && (get(x) <= tau) != rv {
                    w.edges.push((self.in_eid[i], if rv { Direction::OutIn } else { Direction::InOut }));
                }
            }
        }
        for &(u, i) in lvl.home_edges(c) {
            let (u, i) = (u as usize, i as usize);
            let ru = get(u) <= tau;
            if ru != (get(self.out_head[i] as usize) <= tau) {
                w.edges.push((self.out_eid[i], if ru { Direction::InOut } else { Direction::OutIn }));
            }
        }
    }

    fn run(&self, source: usize, tau: W, threads: usize, how: Descent) -> (IsochroneEdgeSet, QueryStats) {
        let s = self.perm.new_id(source);
        let start = Instant::now();
        self.scratch.with(
            || Scratch::new(self),
            |sc| {
                let settled = self.upward(s, tau, sc);
                let t_up = start.elapsed();
                let roots = self.roots(s, &sc.flags, false);
                let mut edges = std::mem::take(&mut sc.edges);
                let (scanned, cells) = self.downward(&roots, tau, how, false, sc, threads, &mut edges);
                let set = IsochroneEdgeSet::from_unsorted(std::mem::take(&mut edges));
                sc.edges = edges;
                let stats = QueryStats {
                    settled: settled + scanned,
                    active_cells: cells,
                    upward: t_up,
                    scan: start.elapsed() - t_up,
                };
                (set, stats)
            },
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn downward(
        &self,
        roots: &[(usize, usize)],
        tau: W,
        how: Descent,
        all: bool,
        sc: &mut Scratch<W>,
        threads: usize,
        edges: &mut Vec<(u32, Direction)>,
    ) -> (u64, u64) {
        let flags = &sc.flags;
        let labels = sc.labels.shared();
        let n = self.n;
        let work = |block: &[(usize, usize)]| {
            self.workers.with(
                || Worker::new(n),
                |w| {
                    w.edges.clear();
                    w.scanned = 0;
                    w.cells = 0;
                    self.descend(block, tau, how, all, labels, flags, w);
                    (std::mem::take(&mut w.edges), w.scanned, w.cells)
                },
            )
        };
        let parts: Vec<(Vec<(u32, Direction)>, u64, u64)> = if threads <= 1 || roots.len() <= 1 {
            vec![work(roots)]
        } else {
            let pool = thread_pool(threads);
            let chunks = blocks(roots, threads * 4);
            pool.install(|| chunks.par_iter().map(|b| work(b)).collect())
        };
        let (mut scanned, mut cells) = (0, 0);
        for (e, s, c) in parts {
            edges.extend_from_slice(&e);
            scanned += s;
            cells += c;
        }
        (scanned, cells)
    }

    /// Exact distances from `source` to every vertex (original ids) by an
    /// unbounded upward search followed by sweeps over all other cells.
    pub fn one_to_all(&self, source: usize) -> Vec<W> {
        assert!(self.grasp, "overlay built without downward edges");
        let s = self.perm.new_id(source);
        let tau = W::INF;
        self.scratch.with(
            || Scratch::new(self),
            |sc| {
                self.upward(s, tau, sc);
                let roots = self.roots(s, &sc.flags, true);
                let mut edges = Vec::new();
                self.downward(&roots, tau, Descent::Sweep, true, sc, 1, &mut edges);
                (0..self.n).map(|v| sc.labels.get(self.perm.new_id(v))).collect()
            },
        )
    }

    /// Unrestricted eccentricity bound of boundary vertex `u` at level `l`:
    /// a search from `u` until every member of its cell is settled.
    pub(super) fn unrestricted_eccentricity(&self, l: usize, u: usize) -> W {
        let c = self.cell[l - 1][u] as usize;
        let lvl = &self.levels[l - 1];
        let target = lvl.members(c).len();
        let is_member = |x: usize| self.cell[l - 1][x] as usize == c && self.blevel[x] as usize + 1 >= l;
        self.scratch.with(
            || Scratch::new(self),
            |sc| {
                sc.labels.reset();
                sc.settled.reset();
                sc.heap.clear();
                sc.labels.set(u, W::zero());
                sc.heap.push_or_decrease(u, W::zero());
                let mut found = 0;
                let mut ecc = W::zero();
                while let Some((x, dx)) = sc.heap.pop() {
                    sc.settled.set(x);
                    if is_member(x) {
                        let below = if l >= 2 { self.ecc(l - 1, x, Phase::Upward) } else { W::zero() };
                        ecc = ecc.max(dx.add_sat(below));
                        found += 1;
                        if found == target {
                            break;
                        }
                    }
                    let lv = self.search_level(u, x);
                    for i in self.out_range(x) {
                        if (self.out_top[i] as usize) < lv {
                            break;
                        }
                        let v = self.out_head[i] as usize;
                        let nd = dx.add_sat(self.out_w[i]);
                        if !sc.settled.get(v) && sc.labels.relax(v, nd) {
                            sc.heap.push_or_decrease(v, nd);
                        }
                    }
                    if lv >= 1 {
                        let low = &self.levels[lv - 1];
                        let cc = self.cell[lv - 1][x] as usize;
                        for (&v, &d) in low.boundary(cc).iter().zip(low.row(cc, x)) {
                            let v = v as usize;
                            let nd = dx.add_sat(d);
                            if d.is_finite() && !sc.settled.get(v) && sc.labels.relax(v, nd) {
                                sc.heap.push_or_decrease(v, nd);
                            }
                        }
                    }
                }
                sc.heap.clear();
                if found == target {
                    ecc
                } else {
                    W::INF
                }
            },
        )
    }
}

/// isoCRP: upward phase plus per-cell isoDijkstra descents.
pub struct IsoCrp<W> {
    overlay: Arc<Overlay<W>>,
}

impl<W: Weight> IsoCrp<W> {
    pub fn new(overlay: Arc<Overlay<W>>) -> Self {
        IsoCrp { overlay }
    }

    pub fn overlay(&self) -> &Arc<Overlay<W>> {
        &self.overlay
    }
}

impl<W: Weight> IsochroneAlgorithm<W> for IsoCrp<W> {
    fn name(&self) -> &str {
        "isocrp"
    }

    fn query_with_stats(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        self.overlay.run(source, tau, threads, Descent::Dijkstra)
    }
}

/// isoGRASP: upward phase plus linear downward-edge sweeps.
pub struct IsoGrasp<W> {
    overlay: Arc<Overlay<W>>,
}

impl<W: Weight> IsoGrasp<W> {
    /// Fails if the overlay was customized without downward edges.
    pub fn new(overlay: Arc<Overlay<W>>) -> crate::Result<Self> {
        if !overlay.grasp {
            return Err(crate::Error::Config("overlay has no GRASP downward edges".into()));
        }
        Ok(IsoGrasp { overlay })
    }

    pub fn overlay(&self) -> &Arc<Overlay<W>> {
        &self.overlay
    }
}

impl<W: Weight> IsochroneAlgorithm<W> for IsoGrasp<W> {
    fn name(&self) -> &str {
        "isograsp"
    }

    fn query_with_stats(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        self.overlay.run(source, tau, threads, Descent::Sweep)
    }
}
