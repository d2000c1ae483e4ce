//! isoPHAST-DT: a full CH over the whole graph, a per-cell distance-bounds
//! table deciding which cells of an edge partition can contain isochrone
//! edges, and per-cell RPHAST selections below a shared compressed top.

use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::ch::{ContractionParams, Hierarchy};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::heap::IndexedHeap;
use crate::isochrone::{Direction, IsochroneAlgorithm, IsochroneEdgeSet, QueryStats};
use crate::partition::EdgePartition;
use crate::scratch::{blocks, thread_pool, Labels, Pool};
use crate::weight::Weight;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DtOptions {
    pub contraction: ContractionParams,
    pub threads: usize,
    /// Number of topmost sweep positions shared by every query.
    pub compress: usize,
}

impl Default for DtOptions {
    fn default() -> Self {
        DtOptions {
            contraction: ContractionParams::default(),
            threads: 1,
            compress: 0,
        }
    }
}

/// Lower and upper bounds on distances from any vertex of cell `i` to the
/// vertices of cell `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceBoundsTable<W> {
    k: usize,
    lower: Vec<W>,
    upper: Vec<W>,
}

impl<W: Weight> DistanceBoundsTable<W> {
    pub fn num_cells(&self) -> usize {
        self.k
    }

    pub fn lower(&self, i: usize, j: usize) -> W {
        self.lower[i * self.k + j]
    }

    pub fn upper(&self, i: usize, j: usize) -> W {
        self.upper[i * self.k + j]
    }

    /// Whether cell `j` may contain isochrone edges for a source in `i`.
    #[inline]
    pub fn is_active(&self, i: usize, j: usize, tau: W) -> bool {
        self.lower(i, j) <= tau && tau < self.upper(i, j)
    }
}

/// Downward edges of one cell below the compressed top, in sweep order.
struct CellSweep<W> {
    verts: Vec<u32>,
    first: Vec<u32>,
    tail: Vec<u32>,
    weight: Vec<W>,
    /// `(edge id, tail position, head position)` of the cell's edges.
    edges: Vec<(u32, u32, u32)>,
}

pub struct DtScratch<W> {
    labels: Labels<W>,
    heap: IndexedHeap<W>,
    edges: Vec<(u32, Direction)>,
}

pub struct DtIsoPhast<W> {
    n: usize,
    hierarchy: Hierarchy<W>,
    bounds: DistanceBoundsTable<W>,
    diameters: Vec<W>,
    compress: usize,
    cells: Vec<CellSweep<W>>,
    /// Lowest cell with an edge at each vertex (original ids).
    source_cell: Vec<u32>,
    scratch: Pool<DtScratch<W>>,
}

/// Vertices incident to edges of each cell, ascending.
fn cell_vertices<W: Weight>(graph: &Graph<W>, part: &EdgePartition) -> Vec<Vec<u32>> {
    let mut ve = vec![Vec::new(); part.num_cells()];
    for e in 0..graph.num_edges() {
        let c = part.cell(e) as usize;
        ve[c].push(graph.tail(e) as u32);
        ve[c].push(graph.head(e) as u32);
    }
    for list in &mut ve {
        list.sort_unstable();
        list.dedup();
    }
    ve
}

/// Largest distance from any vertex of the cell to any of its boundary
/// vertices, by one reverse Dijkstra per boundary vertex that stops once
/// every cell vertex is settled.
fn boundary_diameter<W: Weight>(reversed: &Graph<W>, verts: &[u32], boundary: &[u32], in_cell: &[bool]) -> W {
    let n = reversed.num_vertices();
    let mut labels = Labels::new(n);
    let mut heap = IndexedHeap::new(n);
    let mut diameter = W::zero();
    for &b in boundary {
        labels.reset();
        heap.clear();
        labels.set(b as usize, W::zero());
        heap.push_or_decrease(b as usize, W::zero());
        let mut left = verts.len();
        while let Some((u, du)) = heap.pop() {
            if in_cell[u] {
                diameter = diameter.max(du);
                left -= 1;
                if left == 0 {
                    break;
                }
            }
            for e in reversed.out_edges(u) {
                let nd = du.add_sat(reversed.weight(e));
                let v = reversed.head(e);
                if labels.relax(v, nd) {
                    heap.push_or_decrease(v, nd);
                }
            }
        }
        if left > 0 {
            return W::INF;
        }
    }
    diameter
}

impl<W: Weight> DtIsoPhast<W> {
    pub fn build(graph: &Graph<W>, part: &EdgePartition, options: &DtOptions) -> Result<Self> {
        let n = graph.num_vertices();
        if part.cells().len() != graph.num_edges() {
            return Err(Error::partition(format!(
                "{} cell ids for {} edges",
                part.cells().len(),
                graph.num_edges()
            )));
        }
        if options.compress > n {
            return Err(Error::validation(format!("compression {} exceeds {n} vertices", options.compress)));
        }
        let k = part.num_cells();
        let ve = cell_vertices(graph, part);
        let boundary: Vec<Vec<u32>> = ve
            .iter()
            .map(|vs| vs.iter().copied().filter(|&v| part.is_ambiguous(v as usize)).collect())
            .collect();
        let hierarchy = Hierarchy::build(graph, &options.contraction);
        let perm = hierarchy.permutation().clone();
        let pool = thread_pool(options.threads);

        let reversed = graph.reversed();
        let diameters: Vec<W> = pool.install(|| {
            (0..k)
                .into_par_iter()
                .map(|i| {
                    let mut in_cell = vec![false; n];
                    for &v in &ve[i] {
                        in_cell[v as usize] = true;
                    }
                    boundary_diameter(&reversed, &ve[i], &boundary[i], &in_cell)
                })
                .collect()
        });

        let rows: Vec<(Vec<W>, Vec<W>)> = pool.install(|| {
            (0..k)
                .into_par_iter()
                .map(|i| {
                    let mut lower = vec![W::INF; k];
                    let mut upper = vec![W::INF; k];
                    if boundary[i].is_empty() {
                        // no way out: nothing known beyond the trivial bounds
                        for j in 0..k {
                            if !ve[j].is_empty() {
                                lower[j] = W::zero();
                            }
                        }
                        return (lower, upper);
                    }
                    let mut labels = Labels::new(n);
                    let mut heap = IndexedHeap::new(n);
                    let sources: Vec<(usize, W)> =
                        boundary[i].iter().map(|&b| (perm.new_id(b as usize), W::zero())).collect();
                    hierarchy.upward_search(&sources, None, &mut labels, &mut heap);
                    hierarchy.sweep(&mut labels, 0..n);
                    for j in 0..k {
                        if ve[j].is_empty() {
                            continue;
                        }
                        let (mut lo, mut hi) = (W::INF, W::zero());
                        for &v in &ve[j] {
                            let d = labels.get(perm.new_id(v as usize));
                            lo = lo.min(d);
                            hi = hi.max(d);
                        }
                        lower[j] = lo;
                        upper[j] = hi.add_sat(diameters[i]);
                    }
                    lower[i] = W::zero();
                    (lower, upper)
                })
                .collect()
        });
        let mut bounds = DistanceBoundsTable {
            k,
            lower: Vec::with_capacity(k * k),
            upper: Vec::with_capacity(k * k),
        };
        for (lo, hi) in rows {
            bounds.lower.extend(lo);
            bounds.upper.extend(hi);
        }

        let mut cell_edges = vec![Vec::new(); k];
        for e in 0..graph.num_edges() {
            let (t, h) = (perm.new_id(graph.tail(e)) as u32, perm.new_id(graph.head(e)) as u32);
            cell_edges[part.cell(e) as usize].push((e as u32, t, h));
        }
        let compress = options.compress;
        let cells: Vec<CellSweep<W>> = pool.install(|| {
            cell_edges
                .into_par_iter()
                .zip(ve.par_iter())
                .map(|(edges, vs)| {
                    if vs.is_empty() {
                        return CellSweep {
                            verts: Vec::new(),
                            first: vec![0],
                            tail: Vec::new(),
                            weight: Vec::new(),
                            edges,
                        };
                    }
                    let targets: Vec<usize> = vs.iter().map(|&v| v as usize).collect();
                    let sel = hierarchy.select(&targets).expect("non-empty target set");
                    let mut first = vec![0u32];
                    let mut tail = Vec::new();
                    let mut weight = Vec::new();
                    let verts: Vec<u32> = sel.verts.into_iter().filter(|&v| v as usize >= compress).collect();
                    for &v in &verts {
                        for (u, w) in hierarchy.downward_in(v as usize) {
                            tail.push(u as u32);
                            weight.push(w);
                        }
                        first.push(tail.len() as u32);
                    }
                    CellSweep {
                        verts,
                        first,
                        tail,
                        weight,
                        edges,
                    }
                })
                .collect()
        });

        let mut source_cell = vec![u32::MAX; n];
        for e in 0..graph.num_edges() {
            let c = part.cell(e);
            for v in [graph.tail(e), graph.head(e)] {
                source_cell[v] = source_cell[v].min(c);
            }
        }

        Ok(DtIsoPhast {
            n,
            hierarchy,
            bounds,
            diameters,
            compress,
            cells,
            source_cell,
            scratch: Pool::default(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn bounds(&self) -> &DistanceBoundsTable<W> {
        &self.bounds
    }

    /// Backward boundary diameter per cell.
    pub fn diameters(&self) -> &[W] {
        &self.diameters
    }

    pub fn compress(&self) -> usize {
        self.compress
    }

    pub fn hierarchy(&self) -> &Hierarchy<W> {
        &self.hierarchy
    }

    /// Sizes of the per-cell selections below the compressed top.
    pub fn selection_sizes(&self) -> Vec<usize> {
        self.cells.iter().map(|c| c.verts.len()).collect()
    }

    /// Lowest cell with an edge at `v`.
    pub fn source_cell(&self, v: usize) -> u32 {
        self.source_cell[v]
    }

    fn new_scratch(&self) -> DtScratch<W> {
        DtScratch {
            labels: Labels::new(self.n),
            heap: IndexedHeap::new(self.n),
            edges: Vec::new(),
        }
    }

    /// Upward search plus compressed-top sweep. Returns the work done.
    fn init(&self, s: usize, sc: &mut DtScratch<W>) -> u64 {
        sc.labels.reset();
        let settled = self
            .hierarchy
            .upward_search(&[(s, W::zero())], None, &mut sc.labels, &mut sc.heap);
        self.hierarchy.sweep(&mut sc.labels, 0..self.compress);
        settled + self.compress as u64
    }

    fn process_cell(&self, c: &CellSweep<W>, tau: W, labels: &mut Labels<W>, out: &mut Vec<(u32, Direction)>) -> u64 {
        for (i, &v) in c.verts.iter().enumerate() {
            let v = v as usize;
            let r = c.first[i] as usize..c.first[i + 1] as usize;
            let mut best = labels.get(v);
            for (&t, &w) in c.tail[r.clone()].iter().zip(&c.weight[r]) {
                best = best.min(labels.get(t as usize).add_sat(w));
            }
            if best < labels.get(v) {
                labels.set(v, best);
            }
        }
        for &(e, t, h) in &c.edges {
            let (rt, rh) = (labels.get(t as usize) <= tau, labels.get(h as usize) <= tau);
            if rt != rh {
                out.push((e, if rt { Direction::InOut } else { Direction::OutIn }));
            }
        }
        c.verts.len() as u64
    }

    fn run(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        let start = Instant::now();
        let s = self.hierarchy.permutation().new_id(source);
        let src = self.source_cell[source] as usize;
        let active: Vec<u32> = if src < self.cells.len() {
            (0..self.cells.len() as u32)
                .filter(|&j| self.bounds.is_active(src, j as usize, tau))
                .collect()
        } else {
            Vec::new()
        };
        if active.is_empty() {
            let stats = QueryStats {
                upward: start.elapsed(),
                ..QueryStats::default()
            };
            return (IsochroneEdgeSet::default(), stats);
        }
        let work = |cells: &[u32], timed: bool| {
            self.scratch.with(
                || self.new_scratch(),
                |sc| {
                    let mut settled = self.init(s, sc);
                    let t_up = start.elapsed();
                    let mut edges = std::mem::take(&mut sc.edges);
                    edges.clear();
                    for &j in cells {
                        settled += self.process_cell(&self.cells[j as usize], tau, &mut sc.labels, &mut edges);
                    }
                    let out = edges.clone();
                    sc.edges = edges;
                    (out, settled, if timed { Some(t_up) } else { None })
                },
            )
        };
        let parts = if threads <= 1 || active.len() <= 1 {
            vec![work(&active, true)]
        } else {
            let chunks = blocks(&active, threads);
            thread_pool(threads).install(|| chunks.par_iter().enumerate().map(|(i, b)| work(b, i == 0)).collect())
        };
        let mut edges = Vec::new();
        let mut settled = 0;
        let mut t_up = None;
        for (e, count, t) in parts {
            edges.extend(e);
            settled += count;
            t_up = t_up.or(t);
        }
        let t_up = t_up.unwrap_or_default();
        let stats = QueryStats {
            settled,
            active_cells: active.len() as u64,
            upward: t_up,
            scan: start.elapsed().saturating_sub(t_up),
        };
        (IsochroneEdgeSet::from_unsorted(edges), stats)
    }
}

/// isoPHAST-DT as an isochrone engine.
pub struct IsoPhastDt<W> {
    data: Arc<DtIsoPhast<W>>,
}

impl<W: Weight> IsoPhastDt<W> {
    pub fn new(data: Arc<DtIsoPhast<W>>) -> Self {
        IsoPhastDt { data }
    }

    pub fn data(&self) -> &Arc<DtIsoPhast<W>> {
        &self.data
    }
}

impl<W: Weight> IsochroneAlgorithm<W> for IsoPhastDt<W> {
    fn name(&self) -> &str {
        "isophast-dt"
    }

    fn query_with_stats(&self, source: usize, tau: W, threads: usize) -> (IsochroneEdgeSet, QueryStats) {
        self.data.run(source, tau, threads)
    }
}
