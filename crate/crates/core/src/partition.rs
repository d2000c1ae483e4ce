//! Nested multilevel vertex partitions, edge partitions and the vertex
//! order used by the overlay engines.

use std::collections::VecDeque;
use std::io::{BufRead, Write};

use crate::coords::Coordinates;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::permutation::Permutation;
use crate::weight::Weight;

/// Cell ids per vertex for levels `1..=L`. Level 0 (singletons) and level
/// `L + 1` (the whole graph) are implicit.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilevelPartition {
    cells: Vec<Vec<u32>>,
    counts: Vec<u32>,
}

impl MultilevelPartition {
    /// `cells[l][v]` is the cell of `v` at level `l + 1`. Checks density and
    /// nesting.
    pub fn new(cells: Vec<Vec<u32>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::partition("at least one level required"));
        }
        let n = cells[0].len();
        let mut counts = Vec::with_capacity(cells.len());
        for (l, level) in cells.iter().enumerate() {
            if level.len() != n {
                return Err(Error::partition(format!("level {} has {} entries, expected {n}", l + 1, level.len())));
            }
            counts.push(dense_count(level).map_err(|m| Error::partition(format!("level {}: {m}", l + 1)))?);
        }
        for l in 0..cells.len().saturating_sub(1) {
            let mut parent = vec![u32::MAX; counts[l] as usize];
            for v in 0..n {
                let (c, p) = (cells[l][v] as usize, cells[l + 1][v]);
                if parent[c] == u32::MAX {
                    parent[c] = p;
                } else if parent[c] != p {
                    return Err(Error::partition(format!(
                        "nesting violated: level-{} cell {c} spans level-{} cells {} and {p}",
                        l + 1,
                        l + 2,
                        parent[c]
                    )));
                }
            }
        }
        Ok(MultilevelPartition { cells, counts })
    }

    /// Top-down recursive median bisection; every level-`l` cell ends up
    /// with at most `max_cell_sizes[l - 1]` vertices.
    pub fn build<W: Weight>(
        graph: &Graph<W>,
        coords: Option<&Coordinates>,
        max_cell_sizes: &[usize],
    ) -> Result<Self> {
        if max_cell_sizes.is_empty() {
            return Err(Error::partition("empty list of cell sizes"));
        }
        if max_cell_sizes.contains(&0) || max_cell_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::partition("cell sizes must be positive and strictly increasing"));
        }
        let n = graph.num_vertices();
        let points = layout_points(graph, coords)?;
        let levels = max_cell_sizes.len();
        let mut cells = vec![vec![0u32; n]; levels];
        let mut next_id = vec![0u32; levels];
        assign_cells(&points, (0..n as u32).collect(), levels, max_cell_sizes, &mut cells, &mut next_id);
        Self::new(cells)
    }

    /// One-level partition from explicit cell ids.
    pub fn single_level(cells: Vec<u32>) -> Result<Self> {
        Self::new(vec![cells])
    }

    pub fn num_levels(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.cells[0].len()
    }

    /// Number of cells at `level` (1-based).
    pub fn num_cells(&self, level: usize) -> usize {
        self.counts[level - 1] as usize
    }

    /// Cell of `v` at `level` (1-based).
    #[inline]
    pub fn cell(&self, level: usize, v: usize) -> u32 {
        self.cells[level - 1][v]
    }

    pub fn level_cells(&self, level: usize) -> &[u32] {
        &self.cells[level - 1]
    }

    /// Highest level at which `u` and `v` lie in different cells, 0 if none.
    pub fn top_level(&self, u: usize, v: usize) -> usize {
        (1..=self.num_levels())
            .rev()
            .find(|&l| self.cell(l, u) != self.cell(l, v))
            .unwrap_or(0)
    }

    /// Highest level at which `v` is a boundary vertex, 0 if none.
    pub fn boundary_levels<W: Weight>(&self, graph: &Graph<W>) -> Vec<u8> {
        let mut b = vec![0u8; graph.num_vertices()];
        for e in 0..graph.num_edges() {
            let (u, v) = (graph.tail(e), graph.head(e));
            let t = self.top_level(u, v) as u8;
            b[u] = b[u].max(t);
            b[v] = b[v].max(t);
        }
        b
    }

    /// Boundary vertices of every level-`level` cell, ascending.
    pub fn boundary_vertices<W: Weight>(&self, graph: &Graph<W>, level: usize) -> Vec<Vec<u32>> {
        let blevel = self.boundary_levels(graph);
        let mut out = vec![Vec::new(); self.num_cells(level)];
        for (v, &b) in blevel.iter().enumerate() {
            if b as usize >= level {
                out[self.cell(level, v) as usize].push(v as u32);
            }
        }
        out
    }

    pub fn permuted(&self, perm: &Permutation) -> Self {
        MultilevelPartition {
            cells: self.cells.iter().map(|c| perm.permute_data(c)).collect(),
            counts: self.counts.clone(),
        }
    }

    /// Restriction to a single level.
    pub fn level(&self, level: usize) -> Result<Self> {
        if level == 0 || level > self.num_levels() {
            return Err(Error::partition(format!(
                "level {level} out of range 1..={}",
                self.num_levels()
            )));
        }
        Ok(MultilevelPartition {
            cells: vec![self.cells[level - 1].clone()],
            counts: vec![self.counts[level - 1]],
        })
    }

    pub fn write<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(out, "mlp {} {}", self.num_levels(), self.num_vertices())?;
        let mut line = String::new();
        for v in 0..self.num_vertices() {
            line.clear();
            for (l, level) in self.cells.iter().enumerate() {
                if l > 0 {
                    line.push(' ');
                }
                line.push_str(&level[v].to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Reads a partition file; `n` is the vertex count of the graph.
    pub fn read<R: BufRead>(reader: R, n: usize) -> Result<Self> {
        let mut lines = reader.lines().enumerate();
        let (levels, count) = loop {
            let (i, line) = lines.next().ok_or_else(|| Error::parse(0, "missing header"))?;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.len() != 3 || t[0] != "mlp" {
                return Err(Error::parse(i + 1, "expected 'mlp <levels> <n>'"));
            }
            let l: usize = t[1].parse().map_err(|_| Error::parse(i + 1, "bad level count"))?;
            let c: usize = t[2].parse().map_err(|_| Error::parse(i + 1, "bad vertex count"))?;
            break (l, c);
        };
        if count != n {
            return Err(Error::partition(format!("file is for {count} vertices, graph has {n}")));
        }
        if levels == 0 {
            return Err(Error::partition("at least one level required"));
        }
        let mut cells = vec![Vec::with_capacity(n); levels];
        for (i, line) in lines {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let mut k = 0;
            for tok in line.split_whitespace() {
                if k == levels {
                    return Err(Error::parse(i + 1, "too many cell ids"));
                }
                cells[k].push(tok.parse().map_err(|_| Error::parse(i + 1, format!("bad cell id '{tok}'")))?);
                k += 1;
            }
            if k != levels {
                return Err(Error::parse(i + 1, format!("expected {levels} cell ids")));
            }
        }
        if cells[0].len() != n {
            return Err(Error::partition(format!("expected {n} vertex lines, found {}", cells[0].len())));
        }
        Self::new(cells)
    }
}

fn dense_count(ids: &[u32]) -> std::result::Result<u32, String> {
    let k = ids.iter().max().map_or(0, |&m| m as usize + 1);
    let mut used = vec![false; k];
    for &c in ids {
        used[c as usize] = true;
    }
    if let Some(c) = used.iter().position(|u| !u) {
        return Err(format!("cell ids not dense, {c} unused"));
    }
    Ok(k as u32)
}

/// Planar points for geometric splitting: real coordinates when present,
/// otherwise hop distances from two far-apart vertices.
fn layout_points<W: Weight>(graph: &Graph<W>, coords: Option<&Coordinates>) -> Result<Vec<(i64, i64)>> {
    let n = graph.num_vertices();
    if let Some(c) = coords {
        if c.len() != n {
            return Err(Error::partition(format!("{} coordinates for {n} vertices", c.len())));
        }
        return Ok((0..n).map(|v| (c.lon_micro(v) as i64, c.lat_micro(v) as i64)).collect());
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let a = hop_distances(graph, 0);
    let far = (0..n).max_by_key(|&v| (a[v], std::cmp::Reverse(v))).unwrap_or(0);
    let b = hop_distances(graph, far);
    Ok((0..n).map(|v| (a[v], b[v])).collect())
}

fn hop_distances<W: Weight>(graph: &Graph<W>, root: usize) -> Vec<i64> {
    let n = graph.num_vertices();
    let mut d = vec![-1i64; n];
    let mut queue = VecDeque::new();
    d[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        let next = graph
            .out_edges(u)
            .map(|e| graph.head(e))
            .chain(graph.in_edges(u).iter().map(|&e| graph.tail(e as usize)));
        for v in next.collect::<Vec<_>>() {
            if d[v] < 0 {
                d[v] = d[u] + 1;
                queue.push_back(v);
            }
        }
    }
    let max = d.iter().copied().max().unwrap_or(0);
    d.iter().map(|&x| if x < 0 { max + 1 } else { x }).collect()
}

/// Sorts along the wider axis, ties by id, and returns the sorted members.
fn sort_on_wider_axis(points: &[(i64, i64)], mut members: Vec<u32>) -> Vec<u32> {
    let (mut x0, mut x1, mut y0, mut y1) = (i64::MAX, i64::MIN, i64::MAX, i64::MIN);
    for &v in &members {
        let (x, y) = points[v as usize];
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if x1 - x0 >= y1 - y0 {
        members.sort_unstable_by_key(|&v| (points[v as usize].0, v));
    } else {
        members.sort_unstable_by_key(|&v| (points[v as usize].1, v));
    }
    members
}

/// Median bisection until every part has at most `max_size` members.
fn split_to_size(points: &[(i64, i64)], members: Vec<u32>, max_size: usize, out: &mut Vec<Vec<u32>>) {
    if members.len() <= max_size {
        out.push(members);
        return;
    }
    let mut sorted = sort_on_wider_axis(points, members);
    let right = sorted.split_off(sorted.len() / 2);
    split_to_size(points, sorted, max_size, out);
    split_to_size(points, right, max_size, out);
}

/// Splits `members` for `level` and recurses into each part, numbering
/// cells depth-first so that siblings get consecutive ids.
fn assign_cells(
    points: &[(i64, i64)],
    members: Vec<u32>,
    level: usize,
    sizes: &[usize],
    cells: &mut [Vec<u32>],
    next_id: &mut [u32],
) {
    if level == 0 {
        return;
    }
    let mut parts = Vec::new();
    split_to_size(points, members, sizes[level - 1], &mut parts);
    for part in parts {
        let id = next_id[level - 1];
        next_id[level - 1] += 1;
        for &v in &part {
            cells[level - 1][v as usize] = id;
        }
        assign_cells(points, part, level - 1, sizes, cells, next_id);
    }
}

/// Splits into exactly `k` parts with sizes proportional to their share.
fn split_into(points: &[(i64, i64)], members: Vec<u32>, k: usize, out: &mut Vec<Vec<u32>>) {
    if k <= 1 {
        out.push(members);
        return;
    }
    let k_left = k / 2;
    let mut sorted = sort_on_wider_axis(points, members);
    let cut = sorted.len() * k_left / k;
    let right = sorted.split_off(cut);
    split_into(points, sorted, k_left, out);
    split_into(points, right, k - k_left, out);
}

/// Single-level partition into exactly `k` cells by recursive geometric
/// bisection. `k` must not exceed the vertex count.
pub fn bisect_into_cells<W: Weight>(graph: &Graph<W>, coords: Option<&Coordinates>, k: usize) -> Result<Vec<u32>> {
    let n = graph.num_vertices();
    if k == 0 || k > n.max(1) {
        return Err(Error::partition(format!("cannot split {n} vertices into {k} cells")));
    }
    let points = layout_points(graph, coords)?;
    let mut parts = Vec::new();
    split_into(&points, (0..n as u32).collect(), k, &mut parts);
    let mut cells = vec![0u32; n];
    for (c, part) in parts.iter().enumerate() {
        for &v in part {
            cells[v as usize] = c as u32;
        }
    }
    Ok(cells)
}

/// Permutation moving boundary vertices to the front by descending boundary
/// level; each group is ordered by its cell at that level (level 1 for
/// interior vertices), then by id.
pub fn crp_vertex_order<W: Weight>(graph: &Graph<W>, partition: &MultilevelPartition) -> Permutation {
    let blevel = partition.boundary_levels(graph);
    let mut order: Vec<u32> = (0..graph.num_vertices() as u32).collect();
    order.sort_unstable_by_key(|&v| {
        let b = blevel[v as usize] as usize;
        (std::cmp::Reverse(b), partition.cell(b.max(1), v as usize), v)
    });
    Permutation::from_order(order).expect("sorted ids form a permutation")
}

/// Cell id per edge plus the induced ambiguous/distinct classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgePartition {
    k: usize,
    cell: Vec<u32>,
    ambiguous: Vec<bool>,
}

impl EdgePartition {
    pub fn new<W: Weight>(graph: &Graph<W>, cell: Vec<u32>) -> Result<Self> {
        if cell.len() != graph.num_edges() {
            return Err(Error::partition(format!(
                "{} edge cells for {} edges",
                cell.len(),
                graph.num_edges()
            )));
        }
        let k = dense_count(&cell).map_err(Error::partition)? as usize;
        let n = graph.num_vertices();
        let mut first = vec![u32::MAX; n];
        let mut ambiguous = vec![false; n];
        for (e, &c) in cell.iter().enumerate() {
            for v in [graph.tail(e), graph.head(e)] {
                if first[v] == u32::MAX {
                    first[v] = c;
                } else if first[v] != c {
                    ambiguous[v] = true;
                }
            }
        }
        Ok(EdgePartition { k, cell, ambiguous })
    }

    /// Assigns every edge to the cell of its tail at `level`.
    pub fn derive<W: Weight>(graph: &Graph<W>, partition: &MultilevelPartition, level: usize) -> Result<Self> {
        if level == 0 || level > partition.num_levels() {
            return Err(Error::partition(format!(
                "level {level} out of range 1..={}",
                partition.num_levels()
            )));
        }
        if partition.num_vertices() != graph.num_vertices() {
            return Err(Error::partition("partition does not match graph"));
        }
        let cell = (0..graph.num_edges())
            .map(|e| partition.cell(level, graph.tail(e)))
            .collect();
        let mut ep = Self::new(graph, cell)?;
        // keep the vertex partition's cell count even if some cell has no edges
        ep.k = ep.k.max(partition.num_cells(level));
        Ok(ep)
    }

    pub fn num_cells(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn cell(&self, e: usize) -> u32 {
        self.cell[e]
    }

    pub fn cells(&self) -> &[u32] {
        &self.cell
    }

    #[inline]
    pub fn is_ambiguous(&self, v: usize) -> bool {
        self.ambiguous[v]
    }

    pub fn ambiguous(&self) -> &[bool] {
        &self.ambiguous
    }

    pub fn write<Wr: Write>(&self, mut out: Wr) -> Result<()> {
        writeln!(out, "ep {} {}", self.k, self.cell.len())?;
        for c in &self.cell {
            writeln!(out, "{c}")?;
        }
        Ok(())
    }

    pub fn read<W: Weight, R: BufRead>(reader: R, graph: &Graph<W>) -> Result<Self> {
        let mut header: Option<(usize, usize)> = None;
        let mut cell = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let t: Vec<&str> = line.split_whitespace().collect();
            if t.is_empty() {
                continue;
            }
            match header {
                None => {
                    if t.len() != 3 || t[0] != "ep" {
                        return Err(Error::parse(i + 1, "expected 'ep <k> <m>'"));
                    }
                    let k = t[1].parse().map_err(|_| Error::parse(i + 1, "bad cell count"))?;
                    let m = t[2].parse().map_err(|_| Error::parse(i + 1, "bad edge count"))?;
                    header = Some((k, m));
                }
                Some(_) => {
                    if t.len() != 1 {
                        return Err(Error::parse(i + 1, "expected one cell id"));
                    }
                    cell.push(t[0].parse().map_err(|_| Error::parse(i + 1, "bad cell id"))?);
                }
            }
        }
        let (k, m) = header.ok_or_else(|| Error::parse(0, "missing header"))?;
        if m != graph.num_edges() {
            return Err(Error::partition(format!("file is for {m} edges, graph has {}", graph.num_edges())));
        }
        if cell.len() != m {
            return Err(Error::partition(format!("expected {m} edge lines, found {}", cell.len())));
        }
        let ep = Self::new(graph, cell)?;
        if ep.k != k {
            return Err(Error::partition(format!("header declares {k} cells, found {}", ep.k)));
        }
        Ok(ep)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn tg1_two_levels() {
        let g = fixtures::tg1();
        let p = MultilevelPartition::build(&g, Some(&fixtures::tg1_coords()), &[2, 4]).unwrap();
        assert_eq!(p.num_levels(), 2);
        assert_eq!(p.num_cells(2), 1);
        assert_eq!(p.num_cells(1), 2);
        assert_eq!(p.level_cells(1), &[0, 0, 1, 1]);
    }

    #[test]
    fn whole_graph_and_singletons() {
        let g = fixtures::tg3();
        let p = MultilevelPartition::build(&g, Some(&fixtures::tg3_coords()), &[6]).unwrap();
        assert_eq!(p.num_cells(1), 1);
        assert!(p.boundary_levels(&g).iter().all(|&b| b == 0));
        let p = MultilevelPartition::build(&g, Some(&fixtures::tg3_coords()), &[1, 6]).unwrap();
        assert_eq!(p.num_cells(1), 6);
        assert!(p.boundary_levels(&g).iter().all(|&b| b == 1));
    }

    #[test]
    fn bad_sizes() {
        let g = fixtures::tg1();
        assert!(MultilevelPartition::build(&g, None, &[]).is_err());
        assert!(MultilevelPartition::build(&g, None, &[4, 2]).is_err());
        assert!(MultilevelPartition::build(&g, None, &[2, 2]).is_err());
    }

    #[test]
    fn tail_rule_edge_partition() {
        let g = fixtures::tg1();
        let p = MultilevelPartition::single_level(vec![0, 0, 1, 1]).unwrap();
        let ep = EdgePartition::derive(&g, &p, 1).unwrap();
        for (e, (u, v, _)) in g.edges().enumerate() {
            let expect = if u < 2 { 0 } else { 1 };
            assert_eq!(ep.cell(e), expect, "edge {}->{}", u + 1, v + 1);
        }
        assert_eq!(ep.ambiguous(), &[true, false, true, false]);
        assert!(EdgePartition::derive(&g, &p, 2).is_err());

        let one = MultilevelPartition::single_level(vec![0; 4]).unwrap();
        let ep = EdgePartition::derive(&g, &one, 1).unwrap();
        assert!(ep.cells().iter().all(|&c| c == 0));
        assert!(ep.ambiguous().iter().all(|&a| !a));
    }

    #[test]
    fn crp_order_examples() {
        let g = fixtures::tg1();
        let p = MultilevelPartition::single_level(vec![0, 0, 1, 1]).unwrap();
        assert!(crp_vertex_order(&g, &p).is_identity());

        let one = MultilevelPartition::single_level(vec![1, 0, 1, 0]).unwrap();
        let perm = crp_vertex_order(&g, &one);
        assert_eq!(perm.old_of(), &[1, 3, 0, 2]);
    }

    #[test]
    fn file_round_trip_and_errors() {
        let g = fixtures::tg3();
        let p = MultilevelPartition::build(&g, Some(&fixtures::tg3_coords()), &[2, 3, 6]).unwrap();
        let mut buf = Vec::new();
        p.write(&mut buf).unwrap();
        assert_eq!(MultilevelPartition::read(buf.as_slice(), 6).unwrap(), p);
        assert!(MultilevelPartition::read(buf.as_slice(), 5).is_err());

        let bad = "mlp 2 4\n0 0\n0 1\n1 1\n1 1\n";
        let err = MultilevelPartition::read(bad.as_bytes(), 4).unwrap_err();
        assert!(err.to_string().contains("nesting"));
        assert!(MultilevelPartition::read("mlp 1 2\n0\n2\n".as_bytes(), 2).is_err());

        let ep = EdgePartition::derive(&g, &p, 2).unwrap();
        let mut buf = Vec::new();
        ep.write(&mut buf).unwrap();
        assert_eq!(EdgePartition::read(buf.as_slice(), &g).unwrap(), ep);
        let text = String::from_utf8(buf).unwrap();
        let short: String = text.lines().take(g.num_edges()).map(|l| format!("{l}\n")).collect();
        assert!(EdgePartition::read(short.as_bytes(), &g).is_err());
    }

    #[test]
    fn exact_k_split() {
        let g = fixtures::tg3();
        let cells = bisect_into_cells(&g, Some(&fixtures::tg3_coords()), 2).unwrap();
        assert_eq!(cells, vec![0, 0, 0, 1, 1, 1]);
        let cells = bisect_into_cells(&g, None, 3).unwrap();
        let mut sizes = [0; 3];
        cells.iter().for_each(|&c| sizes[c as usize] += 1);
        assert_eq!(sizes, [2, 2, 2]);
        assert!(bisect_into_cells(&g, None, 7).is_err());
    }
}
