//! isoPHAST-CD and isoPHAST-CP: cell interiors contracted, boundary
//! vertices kept as a core that is searched (CD) or swept (CP).

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::ch::{contract, csr, ContractionParams};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heap::IndexedHeap;
use crate::isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
use crate::permutation::Permutation;
use crate::scratch::{blocks, thread_pool, Labels, Marks, Pool, SharedLabels};
use crate::weight::Weight;

/// How the core is processed at query time.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoreStrategy {
    /// isoDijkstra on the core with the limit as stopping criterion.
    Dijkstra,
    /// Full CH on the core, swept after an exhaustive upward search.
    Phast,
}

/// Cell-flag rule of the swept core.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FlagRule {
    /// Clear `o` from one in-range vertex plus its unreachable pairs.
    #[default]
    Exact,
    /// Keep `o` cleared only if every core vertex of the cell satisfies
    /// `d(v) + ecc(v) <= tau`.
    Relaxed,
}

impl std::str::FromStr for FlagRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(FlagRule::Exact),
            "relaxed" => Ok(FlagRule::Relaxed),
            _ => Err(Error::Config(format!("unknown flag rule '{s}'"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhastOptions {
    pub contraction: ContractionParams,
    pub threads: usize,
    pub flag_rule: FlagRule,
}

impl Default for PhastOptions {
    fn default() -> Self {
        PhastOptions {
            contraction: ContractionParams::default(),
            threads: 1,
            flag_rule: FlagRule::Exact,
        }
    }
}

/// Original edge stored at one endpoint: other endpoint, edge id and
/// whether the owner is the tail.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct OrigEntry {
    other: u32,
    eid: u32,
    owner_is_tail: bool,
}

pub(crate) struct Scratch<W> {
    labels: Labels<W>,
    heap: IndexedHeap<W>,
    settled: Vec<u32>,
    i_flag: Marks,
    o_clear: Marks,
    o_set: Marks,
    edges: Vec<(u32, Direction)>,
}

/// Preprocessed data of isoPHAST-CD / -CP. Vertices are renumbered: core
/// first, then the interior of every cell, each by descending CH level.
pub struct CoreIsoPhast<W> {
    n: usize,
    perm: Permutation,
    /// Cell per (new) vertex id.
    cell: Vec<u32>,
    k: usize,
    nc: usize,
    /// Interior of cell `c` is `cell_first[c]..cell_first[c + 1]`.
    cell_first: Vec<u32>,
    up_first: Vec<u32>,
    up_head: Vec<u32>,
    up_w: Vec<W>,
    down_first: Vec<u32>,
    down_tail: Vec<u32>,
    down_w: Vec<W>,
    ext_first: Vec<u32>,
    ext: Vec<OrigEntry>,
    /// Original edges between core vertices, at both endpoints.
    core_first: Vec<u32>,
    core_adj: Vec<OrigEntry>,
    ecc: Vec<W>,
    unr_first: Vec<u32>,
    unr: Vec<u32>,
    strategy: CoreStrategy,
    flag_rule: FlagRule,
    scratch: Pool<Scratch<W>>,
    workers: Pool<Vec<(u32, Direction)>>,
}

/// Per-cell contraction output in global ids.
struct CellContraction<W> {
    interior: Vec<(u32, u32, u32)>,
    up: Vec<(u32, u32, W)>,
    down: Vec<(u32, u32, W)>,
    core: Vec<(u32, u32, W)>,
}

fn orig_csr(n: usize, mut list: Vec<(u32, OrigEntry)>) -> (Vec<u32>, Vec<OrigEntry>) {
    list.sort_unstable();
    let mut first = vec![0u32; n + 1];
    for e in &list {
        first[e.0 as usize + 1] += 1;
    }
    for i in 0..n {
        first[i + 1] += first[i];
    }
    (first, list.into_iter().map(|e| e.1).collect())
}

impl<W: Weight> CoreIsoPhast<W> {
    /// isoPHAST-CD preprocessing over a vertex partition (cell per vertex).
    pub fn build_cd(graph: &Graph<W>, cells: &[u32], options: &PhastOptions) -> Result<Self> {
        let mut base = Self::build_base(graph, cells, options)?;
        base.compute_eccentricities(options.threads);
        Ok(base)
    }

    /// isoPHAST-CP preprocessing: CD preprocessing plus a CH on the core.
    pub fn build_cp(graph: &Graph<W>, cells: &[u32], options: &PhastOptions) -> Result<Self> {
        let mut base = Self::build_cd(graph, cells, options)?;
        base.contract_core(&options.contraction);
        base.strategy = CoreStrategy::Phast;
        Ok(base)
    }

    fn build_base(graph: &Graph<W>, cells: &[u32], options: &PhastOptions) -> Result<Self> {
        let n = graph.num_vertices();
        if cells.len() != n {
            return Err(Error::partition(format!("{} cell ids for {n} vertices", cells.len())));
        }
        if !graph.is_strongly_connected() {
            return Err(Error::validation("isoPHAST requires a strongly connected graph"));
        }
        let k = cells.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut boundary = vec![false; n];
        for (u, v, _) in graph.edges() {
            if cells[u as usize] != cells[v as usize] {
                boundary[u as usize] = true;
                boundary[v as usize] = true;
            }
        }
        let mut members = vec![Vec::new(); k];
        for v in 0..n {
            members[cells[v] as usize].push(v as u32);
        }
        let pool = thread_pool(options.threads);
        let params = options.contraction;
        let parts: Vec<CellContraction<W>> = pool.install(|| {
            members
                .par_iter()
                .map(|m| contract_cell(graph, cells, &boundary, m, &params))
                .collect()
        });

        // ordering: core by (cell, id), interior by (cell, level desc, rank desc)
        let mut level = vec![0u32; n];
        let mut rank = vec![0u32; n];
        for p in &parts {
            for &(v, l, r) in &p.interior {
                level[v as usize] = l;
                rank[v as usize] = r;
            }
        }
        let mut order: Vec<u32> = (0..n as u32).collect();
        order.sort_unstable_by_key(|&v| {
            let v = v as usize;
            (!boundary[v], cells[v], Reverse(level[v]), Reverse(rank[v]), v)
        });
        let perm = Permutation::from_order(order.clone())?;
        let nc = boundary.iter().filter(|&&b| b).count();
        let cell: Vec<u32> = order.iter().map(|&v| cells[v as usize]).collect();
        let mut cell_first = vec![nc as u32; k + 1];
        for c in 0..k {
            cell_first[c + 1] = cell_first[c] + members[c].iter().filter(|&&v| !boundary[v as usize]).count() as u32;
        }
        let id = |v: u32| perm.new_id(v as usize) as u32;

        let mut up = Vec::new();
        let mut down = Vec::new();
        for p in &parts {
            up.extend(p.up.iter().map(|&(a, b, w)| (id(a), id(b), w)));
            up.extend(p.core.iter().map(|&(a, b, w)| (id(a), id(b), w)));
            down.extend(p.down.iter().map(|&(a, b, w)| (id(b), id(a), w)));
        }
        for (a, b, w) in graph.edges() {
            if cells[a as usize] != cells[b as usize] {
                up.push((id(a), id(b), w));
            }
        }
        let (up_first, up_head, up_w) = csr(n, up);
        let (down_first, down_tail, down_w) = csr(n, down);

        let mut ext = Vec::new();
        let mut core_adj = Vec::new();
        for e in 0..graph.num_edges() {
            let (a, b) = (id(graph.tail(e) as u32), id(graph.head(e) as u32));
            let eid = e as u32;
            if (a as usize) < nc && (b as usize) < nc {
                core_adj.push((a, OrigEntry { other: b, eid, owner_is_tail: true }));
                core_adj.push((b, OrigEntry { other: a, eid, owner_is_tail: false }));
            } else {
                // the endpoint swept later (larger id) owns the edge
                let a_owns = a > b;
                let (owner, other) = if a_owns { (a, b) } else { (b, a) };
                ext.push((owner, OrigEntry { other, eid, owner_is_tail: a_owns }));
            }
        }
        let (ext_first, ext) = orig_csr(n, ext);
        let (core_first, core_adj) = orig_csr(nc, core_adj);

        Ok(CoreIsoPhast {
            n,
            perm,
            cell,
            k,
            nc,
            cell_first,
            up_first,
            up_head,
            up_w,
            down_first,
            down_tail,
            down_w,
            ext_first,
            ext,
            core_first,
            core_adj,
            ecc: Vec::new(),
            unr_first: Vec::new(),
            unr: Vec::new(),
            strategy: CoreStrategy::Dijkstra,
            flag_rule: options.flag_rule,
            scratch: Pool::default(),
            workers: Pool::default(),
        })
    }

    /// Restricted eccentricity of every core vertex: Dijkstra on the core of
    /// its cell followed by a sweep over the cell interior. Interior vertices
    /// out of reach inside the cell are reached from some core vertex on the
    /// unreachable list, since the graph is strongly connected.
    fn compute_eccentricities(&mut self, threads: usize) {
        let mut core_first = vec![0usize; self.k + 1];
        for v in 0..self.nc {
            core_first[self.cell[v] as usize + 1] += 1;
        }
        for c in 0..self.k {
            core_first[c + 1] += core_first[c];
        }
        let pool = thread_pool(threads);
        let this = &*self;
        let per_cell: Vec<Vec<(W, Vec<u32>)>> = pool.install(|| {
            (0..this.k)
                .into_par_iter()
                .map(|c| this.cell_eccentricities(c, core_first[c]..core_first[c + 1]))
                .collect()
        });
        let mut ecc = Vec::with_capacity(self.nc);
        let mut unr_first = vec![0u32];
        let mut unr = Vec::new();
        for cell in per_cell {
            for (e, list) in cell {
                ecc.push(e);
                unr.extend(list);
                unr_first.push(unr.len() as u32);
            }
        }
        self.ecc = ecc;
        self.unr_first = unr_first;
        self.unr = unr;
    }

    fn cell_eccentricities(&self, c: usize, core: std::ops::Range<usize>) -> Vec<(W, Vec<u32>)> {
        let interior = self.cell_first[c] as usize..self.cell_first[c + 1] as usize;
        let nb = core.len();
        let local = |v: usize| {
            if v < self.nc {
                v - core.start
            } else {
                nb + v - interior.start
            }
        };
        let mut dist = vec![W::INF; nb + interior.len()];
        let mut heap = BinaryHeap::new();
        let mut out = Vec::with_capacity(nb);
        for u in core.clone() {
            dist.iter_mut().for_each(|d| *d = W::INF);
            dist[u - core.start] = W::zero();
            heap.push(Reverse((W::zero(), u)));
            while let Some(Reverse((d, x))) = heap.pop() {
                if d > dist[x - core.start] {
                    continue;
                }
                for i in self.up_first[x] as usize..self.up_first[x + 1] as usize {
                    let y = self.up_head[i] as usize;
                    if y >= self.nc || self.cell[y] as usize != c {
                        continue;
                    }
                    let nd = d.add_sat(self.up_w[i]);
                    if nd < dist[y - core.start] {
                        dist[y - core.start] = nd;
                        heap.push(Reverse((nd, y)));
                    }
                }
            }
            for v in interior.clone() {
                let mut best = W::INF;
                for i in self.down_first[v] as usize..self.down_first[v + 1] as usize {
                    best = best.min(dist[local(self.down_tail[i] as usize)].add_sat(self.down_w[i]));
                }
                dist[local(v)] = best;
            }
            let unreachable: Vec<u32> = core
                .clone()
                .filter(|&v| dist[v - core.start].is_inf())
                .map(|v| v as u32)
                .collect();
            let ecc = dist.iter().copied().filter(|d| d.is_finite()).max().unwrap_or(W::zero());
            out.push((ecc, unreachable));
        }
        out
    }

    /// Replaces the core graph by a CH on it and reorders the core by
    /// descending level.
    fn contract_core(&mut self, params: &ContractionParams) {
        let nc = self.nc;
        let mut core_edges = Vec::new();
        let mut up = Vec::new();
        for u in 0..self.n {
            for i in self.up_first[u] as usize..self.up_first[u + 1] as usize {
                let e = (u as u32, self.up_head[i], self.up_w[i]);
                if u < nc {
                    core_edges.push(e);
                } else {
                    up.push(e);
                }
            }
        }
        let core_graph = Graph::from_edges(nc, core_edges).expect("core edges are valid");
        let ch = contract(&core_graph, &vec![false; nc], params);
        let mut order: Vec<u32> = (0..nc as u32).collect();
        order.sort_unstable_by_key(|&v| (Reverse(ch.level[v as usize]), Reverse(ch.rank[v as usize])));
        order.extend(nc as u32..self.n as u32);
        let q = Permutation::from_order(order).expect("core order is a permutation");
        let id = |v: u32| q.new_id(v as usize) as u32;

        let mut down = Vec::new();
        for v in 0..self.n {
            for i in self.down_first[v] as usize..self.down_first[v + 1] as usize {
                down.push((id(v as u32), id(self.down_tail[i]), self.down_w[i]));
            }
        }
        let mut up: Vec<_> = up.into_iter().map(|(a, b, w)| (id(a), id(b), w)).collect();
        up.extend(ch.up.iter().map(|&(a, b, w)| (id(a), id(b), w)));
        down.extend(ch.down.iter().map(|&(a, b, w)| (id(b), id(a), w)));
        (self.up_first, self.up_head, self.up_w) = csr(self.n, up);
        (self.down_first, self.down_tail, self.down_w) = csr(self.n, down);

        let remap = |first: &[u32], entries: &[OrigEntry], n: usize| {
            let mut list = Vec::new();
            for v in 0..n {
                for e in &entries[first[v] as usize..first[v + 1] as usize] {
                    list.push((id(v as u32), OrigEntry { other: id(e.other), ..*e }));
                }
            }
            orig_csr(n, list)
        };
        (self.ext_first, self.ext) = remap(&self.ext_first, &self.ext, self.n);
        (self.core_first, self.core_adj) = remap(&self.core_first, &self.core_adj, nc);

        let mut ecc = vec![W::INF; nc];
        let mut unr = Vec::new();
        for v in 0..nc {
            ecc[id(v as u32) as usize] = self.ecc[v];
        }
        let mut lists: Vec<Vec<u32>> = vec![Vec::new(); nc];
        for v in 0..nc {
            lists[id(v as u32) as usize] = self.unreachable(v).iter().map(|&x| id(x)).collect();
        }
        let mut unr_first = vec![0u32];
        for l in lists {
            unr.extend(l);
            unr_first.push(unr.len() as u32);
        }
        self.ecc = ecc;
        self.unr = unr;
        self.unr_first = unr_first;
        self.cell = (0..self.n).map(|v| self.cell[q.old_id(v)]).collect();
        self.perm = self.perm.then(&q);
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.k
    }

    pub fn core_size(&self) -> usize {
        self.nc
    }

    pub fn strategy(&self) -> CoreStrategy {
        self.strategy
    }

    pub fn set_flag_rule(&mut self, rule: FlagRule) {
        self.flag_rule = rule;
    }

    /// Whether the original vertex `v` is a core (boundary) vertex.
    pub fn is_core(&self, v: usize) -> bool {
        self.perm.new_id(v) < self.nc
    }

    /// Eccentricity of a core vertex (original id).
    pub fn eccentricity(&self, v: usize) -> Option<W> {
        let x = self.perm.new_id(v);
        (x < self.nc).then(|| self.ecc[x])
    }

    /// Overwrites an eccentricity; used by fault-injection tests.
    #[doc(hidden)]
    pub fn set_eccentricity_for_testing(&mut self, v: usize, value: W) {
        let x = self.perm.new_id(v);
        self.ecc[x] = value;
    }

    /// Core vertices (original ids) of the same cell not reachable from the
    /// core vertex `v` inside the cell.
    pub fn unreachable_of(&self, v: usize) -> Option<Vec<usize>> {
        let x = self.perm.new_id(v);
        (x < self.nc).then(|| self.unreachable(x).iter().map(|&y| self.perm.old_id(y as usize)).collect())
    }

    /// Number of (upward, downward) edges.
    pub fn edge_counts(&self) -> (usize, usize) {
        (self.up_head.len(), self.down_tail.len())
    }

    #[inline]
    fn unreachable(&self, v: usize) -> &[u32] {
        &self.unr[self.unr_first[v] as usize..self.unr_first[v + 1] as usize]
    }

    fn new_scratch(&self) -> Scratch<W> {
        Scratch {
            labels: Labels::new(self.n),
            heap: IndexedHeap::new(self.n),
            settled: Vec::new(),
            i_flag: Marks::new(self.k),
            o_clear: Marks::new(self.k),
            o_set: Marks::new(self.k),
            edges: Vec::new(),
        }
    }

    /// Dijkstra over the upward graph (which includes the whole core for
    /// CD). Returns the settled count.
    fn upward(&self, s: usize, limit: W, sc: &mut Scratch<W>) -> u64 {
        let Scratch { labels, heap, settled, .. } = sc;
        labels.reset();
        heap.clear();
        settled.clear();
        labels.set(s, W::zero());
        heap.push_or_decrease(s, W::zero());
        let mut count = 0;
        while let Some((u, du)) = heap.peek() {
            if du > limit {
                break;
            }
            heap.pop();
            count += 1;
            if u < self.nc {
                settled.push(u as u32);
            }
            for i in self.up_first[u] as usize..self.up_first[u + 1] as usize {
                let v = self.up_head[i] as usize;
                let nd = du.add_sat(self.up_w[i]);
                if labels.relax(v, nd) {
                    heap.push_or_decrease(v, nd);
                }
            }
        }
        heap.clear();
        count
    }

    fn sweep_core(&self, labels: &mut Labels<W>) {
        for v in 0..self.nc {
            let mut best = labels.get(v);
            for i in self.down_first[v] as usize..self.down_first[v + 1] as usize {
                best = best.min(labels.get(self.down_tail[i] as usize).add_sat(self.down_w[i]));
            }
            if best < labels.get(v) {
                labels.set(v, best);
            }
        }
    }

    /// Flags from the in-range core vertices; returns the active cells.
    fn active_cells(&self, s: usize, tau: W, in_range: &[u32], sc: &mut Scratch<W>) -> Vec<u32> {
        let Scratch { labels, i_flag, o_clear, o_set, .. } = sc;
        i_flag.reset();
        o_clear.reset();
        o_set.reset();
        for &u in in_range {
            i_flag.set(self.cell[u as usize] as usize);
        }
        match self.flag_rule {
            FlagRule::Exact => {
                for &u in in_range {
                    let u = u as usize;
                    let c = self.cell[u] as usize;
                    if o_clear.get(c) || labels.get(u).add_sat(self.ecc[u]) > tau {
                        continue;
                    }
                    if self
                        .unreachable(u)
                        .iter()
                        .all(|&v| labels.get(v as usize).add_sat(self.ecc[v as usize]) <= tau)
                    {
                        o_clear.set(c);
                    }
                }
            }
            FlagRule::Relaxed => {
                // `o` starts cleared and is set by any core vertex without a
                // guarantee; labels are exact everywhere after the sweep
                for u in 0..self.nc {
                    if labels.get(u).add_sat(self.ecc[u]) > tau {
                        o_set.set(self.cell[u] as usize);
                    }
                }
                for c in 0..self.k {
                    if !o_set.get(c) {
                        o_clear.set(c);
                    }
                }
            }
        }
        let mut active: Vec<u32> = in_range
            .iter()
            .map(|&u| self.cell[u as usize])
            .filter(|&c| !o_clear.get(c as usize))
            .collect();
        if s >= self.nc {
            active.push(self.cell[s]);
        }
        active.sort_unstable();
        active.dedup();
        active
    }

    /// Sweeps the interior of one cell and emits its isochrone edges.
    fn process_cell(&self, c: usize, tau: W, labels: SharedLabels<'_, W>, out: &mut Vec<(u32, Direction)>) -> u64 {
        let range = self.cell_first[c] as usize..self.cell_first[c + 1] as usize;
        // SAFETY: only this cell's interior is written; the core is read-only
        // in this phase and interiors of different cells are disjoint.
        let get = |v: usize| unsafe { labels.get(v) };
        for v in range.clone() {
            let mut best = get(v);
            for i in self.down_first[v] as usize..self.down_first[v + 1] as usize {
                best = best.min(get(self.down_tail[i] as usize).add_sat(self.down_w[i]));
            }
            unsafe { labels.set(v, best) };
        }
        for v in range.clone() {
            let rv = get(v) <= tau;
            for e in &self.ext[self.ext_first[v] as usize..self.ext_first[v + 1] as usize] {
                if rv != (get(e.other as usize) <= tau) {
                    let tail_in = if e.owner_is_tail { rv } else { !rv };
                    out.push((e.eid, if tail_in { Direction::InOut } else { Direction::OutIn }));
                }
            }
        }
        range.len() as u64
    }

    fn run(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        let s = self.perm.new_id(source);
        let start = Instant::now();
        self.scratch.with(
            || self.new_scratch(),
            |sc| {
                let mut settled = match self.strategy {
                    CoreStrategy::Dijkstra => self.upward(s, tau, sc),
                    CoreStrategy::Phast => {
                        let c = self.upward(s, W::INF, sc);
                        self.sweep_core(&mut sc.labels);
                        sc.settled.clear();
                        for u in 0..self.nc {
                            if sc.labels.get(u) <= tau {
                                sc.settled.push(u as u32);
                            }
                        }
                        c + self.nc as u64
                    }
                };
                let in_range = std::mem::take(&mut sc.settled);
                let active = self.active_cells(s, tau, &in_range, sc);
                let t_up = start.elapsed();

                let mut edges = std::mem::take(&mut sc.edges);
                edges.clear();
                for &u in &in_range {
                    let u = u as usize;
                    for e in &self.core_adj[self.core_first[u] as usize..self.core_first[u + 1] as usize] {
                        if sc.labels.get(e.other as usize) > tau {
                            let dir = if e.owner_is_tail { Direction::InOut } else { Direction::OutIn };
                            edges.push((e.eid, dir));
                        }
                    }
                }
                sc.settled = in_range;

                let labels = sc.labels.shared();
                let work = |cells: &[u32]| {
                    self.workers.with(Vec::new, |buf| {
                        buf.clear();
                        let mut count = 0;
                        for &c in cells {
                            count += self.process_cell(c as usize, tau, labels, buf);
                        }
                        (buf.clone(), count)
                    })
                };
                let parts: Vec<(Vec<(u32, Direction)>, u64)> = if threads <= 1 || active.len() <= 1 {
                    vec![work(&active)]
                } else {
                    let chunks = blocks(&active, threads * 4);
                    thread_pool(threads).install(|| chunks.par_iter().map(|b| work(b)).collect())
                };
                for (e, count) in parts {
                    edges.extend_from_slice(&e);
                    settled += count;
                }
                let set = IsochroneEdgeSet::from_unsorted(std::mem::take(&mut edges));
                sc.edges = edges;
                let stats = QueryStats {
                    settled,
                    active_cells: active.len() as u64,
                    upward: t_up,
                    scan: start.elapsed() - t_up,
                };
                (set, stats)
            },
        )
    }

    /// Distances from `source` to every vertex (original ids): exhaustive
    /// upward search, core sweep or search, then all interiors.
    pub fn one_to_all(&self, source: usize) -> Vec<W> {
        let s = self.perm.new_id(source);
        self.scratch.with(
            || self.new_scratch(),
            |sc| {
                self.upward(s, W::INF, sc);
                if self.strategy == CoreStrategy::Phast {
                    self.sweep_core(&mut sc.labels);
                }
                let labels = sc.labels.shared();
                let mut sink = Vec::new();
                for c in 0..self.k {
                    self.process_cell(c, W::zero(), labels, &mut sink);
                }
                (0..self.n).map(|v| sc.labels.get(self.perm.new_id(v))).collect()
            },
        )
    }
}

fn contract_cell<W: Weight>(
    graph: &Graph<W>,
    cells: &[u32],
    boundary: &[bool],
    members: &[u32],
    params: &ContractionParams,
) -> CellContraction<W> {
    let c = match members.first() {
        Some(&v) => cells[v as usize],
        None => {
            return CellContraction {
                interior: Vec::new(),
                up: Vec::new(),
                down: Vec::new(),
                core: Vec::new(),
            }
        }
    };
    let mut local = std::collections::HashMap::with_capacity(members.len());
    for (i, &v) in members.iter().enumerate() {
        local.insert(v, i as u32);
    }
    let mut edges = Vec::new();
    for &v in members {
        for e in graph.out_edges(v as usize) {
            let h = graph.head(e);
            if cells[h] == c {
                edges.push((local[&v], local[&(h as u32)], graph.weight(e)));
            }
        }
    }
    let g = Graph::from_edges(members.len(), edges).expect("cell subgraph is valid");
    let keep: Vec<bool> = members.iter().map(|&v| boundary[v as usize]).collect();
    let ch = contract(&g, &keep, params);
    let glob = |e: &(u32, u32, W)| (members[e.0 as usize], members[e.1 as usize], e.2);
    CellContraction {
        interior: (0..members.len())
            .filter(|&i| !keep[i])
            .map(|i| (members[i], ch.level[i], ch.rank[i]))
            .collect(),
        up: ch.up.iter().map(glob).collect(),
        down: ch.down.iter().map(glob).collect(),
        core: ch.core.iter().map(glob).collect(),
    }
}

/// isoPHAST-CD or -CP as an isochrone engine.
pub struct IsoPhastCore<W> {
    data: Arc<CoreIsoPhast<W>>,
}

impl<W: Weight> IsoPhastCore<W> {
    pub fn new(data: Arc<CoreIsoPhast<W>>) -> Self {
        IsoPhastCore { data }
    }

    pub fn data(&self) -> &Arc<CoreIsoPhast<W>> {
        &self.data
    }
}

impl<W: Weight> IsochroneAlgorithm<W> for IsoPhastCore<W> {
    fn name(&self) -> &str {
        match self.data.strategy {
            CoreStrategy::Dijkstra => "isophast-cd",
            CoreStrategy::Phast => "isophast-cp",
        }
    }

    fn query_with_stats(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        self.data.run(source, tau, threads)
    }
}
