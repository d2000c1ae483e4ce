//! Multilevel overlay: clique matrices with eccentricity columns, GRASP
//! downward edges and the isoCRP / isoGRASP queries built on them.
//!
//! Vertices are renumbered so that level-`l` boundary vertices occupy the
//! prefix `[0, nb_l)`. Every cell at level `l` has a member list: the
//! level-`(l-1)` boundary vertices it contains (all its vertices at level
//! 1), ascending, which puts its own boundary vertices first.

mod customize;
mod query;

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::partition::{crp_vertex_order, MultilevelPartition};
use crate::permutation::Permutation;
use crate::scratch::Pool;
use crate::weight::Weight;

pub use query::{IsoCrp, IsoGrasp};

/// Eccentricity variant computed during customization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EccMode {
    /// Unrestricted semantics without refinement: infinite whenever a cell
    /// is not fully reachable from the boundary vertex inside the cell.
    None,
    /// Unrestricted, every boundary vertex refined by a global search.
    All,
    /// Unrestricted, only infinite values refined.
    Inf,
    /// Like `Inf`, but first tries `len(u, v) + ecc(v)` over the clique row.
    Scc,
    /// Restricted with unreachable-pair checks in the upward phase,
    /// unrestricted (`None`) semantics in the downward phase.
    Up,
    /// Restricted; unreachable pairs found by scanning matrix rows.
    UpDown,
    /// Restricted; unreachable pairs read from a separate index.
    Sep,
}

impl EccMode {
    pub const ALL: [EccMode; 7] = [
        EccMode::None,
        EccMode::All,
        EccMode::Inf,
        EccMode::Scc,
        EccMode::Up,
        EccMode::UpDown,
        EccMode::Sep,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EccMode::None => "none",
            EccMode::All => "all",
            EccMode::Inf => "inf",
            EccMode::Scc => "scc",
            EccMode::Up => "up",
            EccMode::UpDown => "updown",
            EccMode::Sep => "sep",
        }
    }

    /// Whether the matrix column holds restricted eccentricities.
    fn restricted_column(self) -> bool {
        matches!(self, EccMode::Up | EccMode::UpDown | EccMode::Sep)
    }

    /// Whether flag checks in the given phase must look at unreachable pairs.
    fn checks_unreachable(self, phase: Phase) -> bool {
        match self {
            EccMode::UpDown | EccMode::Sep => true,
            EccMode::Up => phase == Phase::Upward,
            _ => false,
        }
    }
}

impl fmt::Display for EccMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EccMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EccMode::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown eccentricity mode '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Phase {
    Upward,
    Downward,
}

/// Customization settings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CustomizeOptions {
    pub mode: EccMode,
    /// Build GRASP downward edges.
    pub grasp: bool,
    /// Drop downward edges dominated through another boundary vertex.
    pub reduce: bool,
    pub threads: usize,
}

impl Default for CustomizeOptions {
    fn default() -> Self {
        CustomizeOptions {
            mode: EccMode::Sep,
            grasp: true,
            reduce: true,
            threads: 1,
        }
    }
}

/// Per-level overlay data. Cell-indexed arrays use the cell ids of the
/// partition at that level.
#[derive(Clone, Debug, Default)]
pub(crate) struct Level<W> {
    /// Cell members (CSR over cells).
    pub mem_first: Vec<u32>,
    pub members: Vec<u32>,
    /// Number of boundary vertices per cell (prefix of its members).
    pub nbound: Vec<u32>,
    /// Position of a vertex within its cell's member list. Indexed by
    /// vertex, defined for members only.
    pub local: Vec<u32>,
    /// Row-major `b x (b + 1)` matrices; the last column holds
    /// eccentricities.
    pub mat_first: Vec<usize>,
    pub mat: Vec<W>,
    /// Downward-phase eccentricities for `EccMode::Up`, by boundary vertex.
    pub ecc_down: Vec<W>,
    /// Unreachable boundary pairs per boundary vertex (`EccMode::Sep`).
    pub unr_first: Vec<u32>,
    pub unr: Vec<u32>,
    /// Incoming downward edges per member position (empty for boundary
    /// members).
    pub down_first: Vec<u32>,
    pub down_src: Vec<u32>,
    pub down_len: Vec<W>,
    /// Edges of this cell's search graph whose endpoints are both boundary
    /// vertices of the cell: tail and position in the out-adjacency.
    pub home_first: Vec<u32>,
    pub home: Vec<(u32, u32)>,
    /// Child cells at the level below.
    pub child_first: Vec<u32>,
    pub children: Vec<u32>,
}

impl<W: Weight> Level<W> {
    #[inline]
    pub fn num_cells(&self) -> usize {
        self.nbound.len()
    }

    #[inline]
    pub fn members(&self, c: usize) -> &[u32] {
        &self.members[self.mem_first[c] as usize..self.mem_first[c + 1] as usize]
    }

    #[inline]
    pub fn boundary(&self, c: usize) -> &[u32] {
        let f = self.mem_first[c] as usize;
        &self.members[f..f + self.nbound[c] as usize]
    }

    #[inline]
    pub fn children(&self, c: usize) -> &[u32] {
        &self.children[self.child_first[c] as usize..self.child_first[c + 1] as usize]
    }

    /// Matrix row of boundary vertex `v` in cell `c` (including the
    /// eccentricity column).
    #[inline]
    pub fn row(&self, c: usize, v: usize) -> &[W] {
        let b = self.nbound[c] as usize;
        let start = self.mat_first[c] + self.local[v] as usize * (b + 1);
        &self.mat[start..start + b + 1]
    }

    #[inline]
    pub fn down_edges(&self, pos: usize) -> (&[u32], &[W]) {
        let r = self.down_first[pos] as usize..self.down_first[pos + 1] as usize;
        (&self.down_src[r.clone()], &self.down_len[r])
    }

    #[inline]
    pub fn unreachable(&self, v: usize) -> &[u32] {
        &self.unr[self.unr_first[v] as usize..self.unr_first[v + 1] as usize]
    }

    #[inline]
    pub fn home_edges(&self, c: usize) -> &[(u32, u32)] {
        &self.home[self.home_first[c] as usize..self.home_first[c + 1] as usize]
    }
}

/// Customized multilevel overlay over a graph in CRP order.
pub struct Overlay<W> {
    n: usize,
    /// Original vertex id to overlay id.
    perm: Permutation,
    /// `cell[l - 1][v]` in overlay ids.
    cell: Vec<Vec<u32>>,
    blevel: Vec<u8>,
    /// Out-adjacency sorted per vertex by descending top level.
    out_first: Vec<u32>,
    out_head: Vec<u32>,
    out_w: Vec<W>,
    out_eid: Vec<u32>,
    out_top: Vec<u8>,
    /// In-adjacency with the same layout.
    in_first: Vec<u32>,
    in_tail: Vec<u32>,
    in_eid: Vec<u32>,
    in_top: Vec<u8>,
    levels: Vec<Level<W>>,
    mode: EccMode,
    grasp: bool,
    pub(crate) scratch: Pool<query::Scratch<W>>,
    pub(crate) workers: Pool<query::Worker<W>>,
}

impl<W: Weight> Overlay<W> {
    /// Reorders the graph, builds the overlay topology and customizes it.
    pub fn build(graph: &Graph<W>, partition: &MultilevelPartition, options: CustomizeOptions) -> Result<Self> {
        if partition.num_vertices() != graph.num_vertices() {
            return Err(Error::partition(format!(
                "partition has {} vertices, graph has {}",
                partition.num_vertices(),
                graph.num_vertices()
            )));
        }
        if !graph.is_strongly_connected() {
            return Err(Error::validation("overlay requires a strongly connected graph"));
        }
        if partition.num_levels() > u8::MAX as usize - 1 {
            return Err(Error::partition("too many levels"));
        }
        let perm = crp_vertex_order(graph, partition);
        let part = partition.permuted(&perm);
        let mut overlay = Self::topology(graph, &part, perm, options);
        customize::customize(&mut overlay, options)?;
        Ok(overlay)
    }

    fn topology(graph: &Graph<W>, part: &MultilevelPartition, perm: Permutation, options: CustomizeOptions) -> Self {
        let n = graph.num_vertices();
        let levels = part.num_levels();
        let cell: Vec<Vec<u32>> = (1..=levels).map(|l| part.level_cells(l).to_vec()).collect();

        let mut out: Vec<(u32, u8, u32, W, u32)> = Vec::with_capacity(graph.num_edges());
        let mut inc: Vec<(u32, u8, u32, W, u32)> = Vec::with_capacity(graph.num_edges());
        let mut blevel = vec![0u8; n];
        for e in 0..graph.num_edges() {
            let u = perm.new_id(graph.tail(e));
            let v = perm.new_id(graph.head(e));
            let top = part.top_level(u, v) as u8;
            blevel[u] = blevel[u].max(top);
            blevel[v] = blevel[v].max(top);
            // sort key: vertex, then top descending, then neighbor
            out.push((u as u32, u8::MAX - top, v as u32, graph.weight(e), e as u32));
            inc.push((v as u32, u8::MAX - top, u as u32, graph.weight(e), e as u32));
        }
        out.sort_unstable_by_key(|x| (x.0, x.1, x.2));
        inc.sort_unstable_by_key(|x| (x.0, x.1, x.2));
        let csr = |list: &[(u32, u8, u32, W, u32)]| {
            let mut first = vec![0u32; n + 1];
            for x in list {
                first[x.0 as usize + 1] += 1;
            }
            for i in 0..n {
                first[i + 1] += first[i];
            }
            (
                first,
                list.iter().map(|x| x.2).collect::<Vec<_>>(),
                list.iter().map(|x| x.3).collect::<Vec<_>>(),
                list.iter().map(|x| x.4).collect::<Vec<_>>(),
                list.iter().map(|x| u8::MAX - x.1).collect::<Vec<_>>(),
            )
        };
        let (out_first, out_head, out_w, out_eid, out_top) = csr(&out);
        let (in_first, in_tail, _, in_eid, in_top) = csr(&inc);

        let mut overlay = Overlay {
            n,
            perm,
            cell,
            blevel,
            out_first,
            out_head,
            out_w,
            out_eid,
            out_top,
            in_first,
            in_tail,
            in_eid,
            in_top,
            levels: Vec::new(),
            mode: options.mode,
            grasp: options.grasp,
            scratch: Pool::default(),
            workers: Pool::default(),
        };
        for l in 1..=levels {
            let lvl = overlay.level_topology(part, l);
            overlay.levels.push(lvl);
        }
        overlay
    }

    fn level_topology(&self, part: &MultilevelPartition, l: usize) -> Level<W> {
        let k = part.num_cells(l);
        let cells = &self.cell[l - 1];
        let mut count = vec![0u32; k + 1];
        let mut nbound = vec![0u32; k];
        let is_member = |v: usize| self.blevel[v] as usize >= l - 1;
        for v in 0..self.n {
            if is_member(v) {
                count[cells[v] as usize + 1] += 1;
                if self.blevel[v] as usize >= l {
                    nbound[cells[v] as usize] += 1;
                }
            }
        }
        for c in 0..k {
            count[c + 1] += count[c];
        }
        let mem_first = count.clone();
        let mut fill = count;
        let mut members = vec![0u32; mem_first[k] as usize];
        let mut local = vec![u32::MAX; self.n];
        for v in 0..self.n {
            if is_member(v) {
                let c = cells[v] as usize;
                local[v] = fill[c] - mem_first[c];
                members[fill[c] as usize] = v as u32;
                fill[c] += 1;
            }
        }
        let mut home_first = vec![0u32; k + 1];
        let mut home = Vec::new();
        for c in 0..k {
            let f = mem_first[c] as usize;
            for &u in &members[f..f + nbound[c] as usize] {
                let u = u as usize;
                for i in self.out_first[u] as usize..self.out_first[u + 1] as usize {
                    let v = self.out_head[i] as usize;
                    if self.out_top[i] as usize == l - 1 && self.blevel[v] as usize >= l {
                        home.push((u as u32, i as u32));
                    }
                }
            }
            home_first[c + 1] = home.len() as u32;
        }
        let mut child_first = vec![0u32; k + 1];
        let mut children = Vec::new();
        if l >= 2 {
            let mut kids: Vec<(u32, u32)> = (0..self.n)
                .map(|v| (cells[v], self.cell[l - 2][v]))
                .collect();
            kids.sort_unstable();
            kids.dedup();
            for (c, child) in kids {
                child_first[c as usize + 1] += 1;
                children.push(child);
            }
            for c in 0..k {
                child_first[c + 1] += child_first[c];
            }
        }
        Level {
            mem_first,
            members,
            nbound,
            local,
            home_first,
            home,
            child_first,
            children,
            ..Default::default()
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn num_cells(&self, level: usize) -> usize {
        self.levels[level - 1].num_cells()
    }

    pub fn mode(&self) -> EccMode {
        self.mode
    }

    pub fn has_grasp(&self) -> bool {
        self.grasp
    }

    /// Original vertex id to overlay id.
    pub fn permutation(&self) -> &Permutation {
        &self.perm
    }

    /// Cell of the original vertex `v` at `level`.
    pub fn cell_of(&self, level: usize, v: usize) -> u32 {
        self.cell[level - 1][self.perm.new_id(v)]
    }

    /// Boundary vertices (original ids) of a cell.
    pub fn boundary_of(&self, level: usize, c: usize) -> Vec<usize> {
        self.levels[level - 1]
            .boundary(c)
            .iter()
            .map(|&v| self.perm.old_id(v as usize))
            .collect()
    }

    /// Clique distance between two boundary vertices (original ids) of the
    /// same level-`level` cell.
    pub fn clique_distance(&self, level: usize, u: usize, v: usize) -> Option<W> {
        let (u, v) = (self.perm.new_id(u), self.perm.new_id(v));
        let lvl = &self.levels[level - 1];
        let c = self.cell[level - 1][u] as usize;
        if c != self.cell[level - 1][v] as usize
            || (self.blevel[u] as usize) < level
            || (self.blevel[v] as usize) < level
        {
            return None;
        }
        Some(lvl.row(c, u)[lvl.local[v] as usize])
    }

    /// Eccentricity stored for boundary vertex `u` (original id) at `level`.
    pub fn eccentricity(&self, level: usize, u: usize) -> Option<W> {
        let u = self.perm.new_id(u);
        if (self.blevel[u] as usize) < level {
            return None;
        }
        Some(self.ecc(level, u, Phase::Upward))
    }

    /// Unreachable boundary pairs of `u` (original ids), from the separate
    /// index when built.
    pub fn unreachable_of(&self, level: usize, u: usize) -> Option<Vec<usize>> {
        let lvl = &self.levels[level - 1];
        let u = self.perm.new_id(u);
        if lvl.unr_first.is_empty() || (self.blevel[u] as usize) < level {
            return None;
        }
        Some(lvl.unreachable(u).iter().map(|&v| self.perm.old_id(v as usize)).collect())
    }

    /// Incoming GRASP downward edges `(source, length)` of `v` (original
    /// ids) at the level where `v` is an internal member.
    pub fn downward_edges_of(&self, v: usize) -> Vec<(usize, W)> {
        let x = self.perm.new_id(v);
        let l = self.blevel[x] as usize + 1;
        if l > self.num_levels() || !self.grasp {
            return Vec::new();
        }
        let lvl = &self.levels[l - 1];
        let c = self.cell[l - 1][x] as usize;
        let pos = lvl.mem_first[c] as usize + lvl.local[x] as usize;
        let (src, len) = lvl.down_edges(pos);
        src.iter()
            .zip(len)
            .map(|(&b, &d)| (self.perm.old_id(b as usize), d))
            .collect()
    }

    /// Total size of the overlay matrices in entries.
    pub fn matrix_entries(&self) -> usize {
        self.levels.iter().map(|l| l.mat.len()).sum()
    }

    pub fn downward_edge_count(&self) -> usize {
        self.levels.iter().map(|l| l.down_src.len()).sum()
    }

    #[inline]
    pub(crate) fn ecc(&self, l: usize, v: usize, phase: Phase) -> W {
        let lvl = &self.levels[l - 1];
        if self.mode == EccMode::Up && phase == Phase::Downward {
            lvl.ecc_down[v]
        } else {
            let c = self.cell[l - 1][v] as usize;
            let row = lvl.row(c, v);
            row[row.len() - 1]
        }
    }

    /// Overwrites an eccentricity; used by fault-injection tests.
    #[doc(hidden)]
    pub fn set_eccentricity_for_testing(&mut self, level: usize, u: usize, value: W) {
        let v = self.perm.new_id(u);
        let lvl = &mut self.levels[level - 1];
        let c = self.cell[level - 1][v] as usize;
        let b = lvl.nbound[c] as usize;
        let idx = lvl.mat_first[c] + lvl.local[v] as usize * (b + 1) + b;
        lvl.mat[idx] = value;
        if !lvl.ecc_down.is_empty() {
            lvl.ecc_down[v] = value;
        }
    }

    #[inline]
    pub(crate) fn out_range(&self, v: usize) -> std::ops::Range<usize> {
        self.out_first[v] as usize..self.out_first[v + 1] as usize
    }

    #[inline]
    pub(crate) fn in_range(&self, v: usize) -> std::ops::Range<usize> {
        self.in_first[v] as usize..self.in_first[v + 1] as usize
    }
}

/// Convenience: shared overlay handle for both multilevel engines.
pub fn build_overlay<W: Weight>(
    graph: &Graph<W>,
    partition: &MultilevelPartition,
    options: CustomizeOptions,
) -> Result<Arc<Overlay<W>>> {
    Overlay::build(graph, partition, options).map(Arc::new)
}

#[cfg(test)]
mod tests;
