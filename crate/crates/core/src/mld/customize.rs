//! Metric customization: clique matrices, eccentricities, unreachable
//! pairs and GRASP downward edges, level by level with cells in parallel.

use rayon::prelude::*;

use super::{CustomizeOptions, EccMode, Level, Overlay};
use crate::error::Result;
use crate::heap::IndexedHeap;
use crate::scratch::thread_pool;
use crate::weight::Weight;

/// Output of one cell, concatenated in cell order afterwards.
struct CellResult<W> {
    mat: Vec<W>,
    /// Unrestricted bound per boundary vertex, `INF` unless the whole cell
    /// is reachable inside the cell.
    cheap: Vec<W>,
    unreachable: Vec<Vec<u32>>,
    /// Per internal member: incoming downward edges.
    down: Vec<Vec<(u32, W)>>,
}

/// Cell search graph over member positions.
struct LocalGraph<W> {
    first: Vec<u32>,
    head: Vec<u32>,
    weight: Vec<W>,
}

pub(super) fn customize<W: Weight>(ov: &mut Overlay<W>, opt: CustomizeOptions) -> Result<()> {
    let pool = thread_pool(opt.threads);
    for l in 1..=ov.levels.len() {
        let k = ov.levels[l - 1].num_cells();
        let results: Vec<CellResult<W>> = {
            let ov = &*ov;
            pool.install(|| (0..k).into_par_iter().map(|c| customize_cell(ov, l, c, opt)).collect())
        };
        assemble(ov, l, results, opt);
    }
    if matches!(opt.mode, EccMode::All | EccMode::Inf | EccMode::Scc) {
        refine(ov, opt);
    }
    Ok(())
}

impl<W: Weight> Overlay<W> {
    /// Restricted eccentricity of a level-`l` boundary vertex during
    /// customization of level `l + 1`.
    fn lower_restricted(&self, l: usize, v: usize) -> W {
        debug_assert!(self.mode.restricted_column());
        let lvl = &self.levels[l - 1];
        let row = lvl.row(self.cell[l - 1][v] as usize, v);
        row[row.len() - 1]
    }

    /// Unrestricted (possibly infinite) eccentricity of a level-`l` boundary
    /// vertex.
    fn lower_unrestricted(&self, l: usize, v: usize) -> W {
        let lvl = &self.levels[l - 1];
        if self.mode == EccMode::Up {
            lvl.ecc_down[v]
        } else if self.mode.restricted_column() {
            W::INF
        } else {
            let row = lvl.row(self.cell[l - 1][v] as usize, v);
            row[row.len() - 1]
        }
    }

    fn local_graph(&self, l: usize, c: usize) -> LocalGraph<W> {
        let lvl = &self.levels[l - 1];
        let members = lvl.members(c);
        let mut first = Vec::with_capacity(members.len() + 1);
        let mut head = Vec::new();
        let mut weight = Vec::new();
        first.push(0u32);
        for &x in members {
            let x = x as usize;
            for i in self.out_range(x) {
                let t = self.out_top[i] as usize;
                if t < l - 1 {
                    break;
                }
                if t == l - 1 {
                    head.push(lvl.local[self.out_head[i] as usize]);
                    weight.push(self.out_w[i]);
                }
            }
            if l >= 2 {
                let lower = &self.levels[l - 2];
                let cc = self.cell[l - 2][x] as usize;
                let row = lower.row(cc, x);
                for (&y, &d) in lower.boundary(cc).iter().zip(row) {
                    if y as usize != x && d.is_finite() {
                        head.push(lvl.local[y as usize]);
                        weight.push(d);
                    }
                }
            }
            first.push(head.len() as u32);
        }
        LocalGraph { first, head, weight }
    }
}

fn customize_cell<W: Weight>(ov: &Overlay<W>, l: usize, c: usize, opt: CustomizeOptions) -> CellResult<W> {
    let lvl = &ov.levels[l - 1];
    let members = lvl.members(c);
    let m = members.len();
    let b = lvl.nbound[c] as usize;
    let g = ov.local_graph(l, c);
    let restricted = opt.mode.restricted_column();

    let mut mat = vec![W::INF; b * (b + 1)];
    let mut cheap = vec![W::INF; b];
    let mut unreachable = vec![Vec::new(); if opt.mode == EccMode::Sep { b } else { 0 }];
    let mut down = vec![Vec::new(); if opt.grasp { m - b } else { 0 }];

    let lower_r: Vec<W> = if l >= 2 && restricted {
        members.iter().map(|&x| ov.lower_restricted(l - 1, x as usize)).collect()
    } else {
        vec![W::zero(); m]
    };
    let lower_u: Vec<W> = if l >= 2 {
        members.iter().map(|&x| ov.lower_unrestricted(l - 1, x as usize)).collect()
    } else {
        vec![W::zero(); m]
    };

    let mut dist = vec![W::INF; m];
    let mut via = vec![false; m];
    let mut done = vec![false; m];
    let mut heap = IndexedHeap::new(m);
    for src in 0..b {
        dist.iter_mut().for_each(|d| *d = W::INF);
        via.iter_mut().for_each(|f| *f = false);
        done.iter_mut().for_each(|f| *f = false);
        dist[src] = W::zero();
        heap.push_or_decrease(src, W::zero());
        let mut settled = 0usize;
        let mut ecc_r = W::zero();
        let mut ecc_u = W::zero();
        while let Some((x, dx)) = heap.pop() {
            done[x] = true;
            settled += 1;
            ecc_r = ecc_r.max(dx.add_sat(lower_r[x]));
            ecc_u = ecc_u.max(dx.add_sat(lower_u[x]));
            // a path through another boundary vertex makes the direct
            // downward edge redundant; zero-length detours only count
            // towards smaller ids so that reductions cannot form a cycle
            let through = via[x] || (x < b && x != src && (dx > W::zero() || x < src));
            for i in g.first[x] as usize..g.first[x + 1] as usize {
                let y = g.head[i] as usize;
                let nd = dx.add_sat(g.weight[i]);
                if nd < dist[y] {
                    dist[y] = nd;
                    via[y] = through;
                    heap.push_or_decrease(y, nd);
                } else if nd == dist[y] && through {
                    via[y] = true;
                }
            }
        }
        let row = &mut mat[src * (b + 1)..(src + 1) * (b + 1)];
        row[..b].copy_from_slice(&dist[..b]);
        cheap[src] = if settled == m { ecc_u } else { W::INF };
        row[b] = if restricted { ecc_r } else { cheap[src] };
        if opt.mode == EccMode::Sep {
            unreachable[src] = (0..b)
                .filter(|&t| dist[t].is_inf())
                .map(|t| members[t])
                .collect();
        }
        if opt.grasp {
            for t in b..m {
                if dist[t].is_finite() && !(opt.reduce && via[t]) {
                    down[t - b].push((members[src], dist[t]));
                }
            }
        }
    }
    CellResult {
        mat,
        cheap,
        unreachable,
        down,
    }
}

fn assemble<W: Weight>(ov: &mut Overlay<W>, l: usize, results: Vec<CellResult<W>>, opt: CustomizeOptions) {
    let nb = ov.blevel.iter().filter(|&&b| b as usize >= l).count();
    let lvl: &mut Level<W> = &mut ov.levels[l - 1];
    let k = lvl.num_cells();
    lvl.mat_first = Vec::with_capacity(k + 1);
    lvl.mat_first.push(0);
    let total: usize = results.iter().map(|r| r.mat.len()).sum();
    lvl.mat = Vec::with_capacity(total);
    if opt.mode == EccMode::Up {
        lvl.ecc_down = vec![W::INF; nb];
    }
    let mut unr: Vec<Vec<u32>> = if opt.mode == EccMode::Sep { vec![Vec::new(); nb] } else { Vec::new() };
    let mut down_first = vec![0u32; if opt.grasp { lvl.members.len() + 1 } else { 0 }];
    let mut down_src = Vec::new();
    let mut down_len = Vec::new();
    for (c, r) in results.into_iter().enumerate() {
        lvl.mat.extend_from_slice(&r.mat);
        lvl.mat_first.push(lvl.mat.len());
        let f = lvl.mem_first[c] as usize;
        let b = lvl.nbound[c] as usize;
        for (i, &v) in lvl.members[f..f + b].iter().enumerate() {
            if opt.mode == EccMode::Up {
                lvl.ecc_down[v as usize] = r.cheap[i];
            }
            if opt.mode == EccMode::Sep {
                unr[v as usize] = r.unreachable[i].clone();
            }
        }
        if opt.grasp {
            for pos in f..f + b {
                down_first[pos + 1] = down_src.len() as u32;
            }
            for (t, edges) in r.down.into_iter().enumerate() {
                for (s, d) in edges {
                    down_src.push(s);
                    down_len.push(d);
                }
                down_first[f + b + t + 1] = down_src.len() as u32;
            }
        }
    }
    if opt.grasp {
        lvl.down_first = down_first;
        lvl.down_src = down_src;
        lvl.down_len = down_len;
    }
    if opt.mode == EccMode::Sep {
        lvl.unr_first = Vec::with_capacity(nb + 1);
        lvl.unr_first.push(0);
        for list in unr {
            lvl.unr.extend_from_slice(&list);
            lvl.unr_first.push(lvl.unr.len() as u32);
        }
    }
}

/// Replaces eccentricities by unrestricted bounds, bottom-up.
fn refine<W: Weight>(ov: &mut Overlay<W>, opt: CustomizeOptions) {
    let pool = thread_pool(opt.threads);
    for l in 1..=ov.levels.len() {
        let k = ov.levels[l - 1].num_cells();
        match opt.mode {
            EccMode::All | EccMode::Inf => {
                let all = opt.mode == EccMode::All;
                let updates: Vec<(usize, W)> = {
                    let ov = &*ov;
                    let lvl = &ov.levels[l - 1];
                    let todo: Vec<(usize, usize)> = (0..k)
                        .flat_map(|c| lvl.boundary(c).iter().map(move |&u| (c, u as usize)))
                        .filter(|&(c, u)| all || lvl.row(c, u).last().is_some_and(|e| e.is_inf()))
                        .collect();
                    pool.install(|| {
                        todo.par_iter()
                            .map(|&(_, u)| (u, ov.unrestricted_eccentricity(l, u)))
                            .collect()
                    })
                };
                for (u, e) in updates {
                    set_ecc(ov, l, u, e);
                }
            }
            EccMode::Scc => {
                for c in 0..k {
                    let boundary = ov.levels[l - 1].boundary(c).to_vec();
                    for &u in &boundary {
                        let u = u as usize;
                        let lvl = &ov.levels[l - 1];
                        let row = lvl.row(c, u);
                        let b = boundary.len();
                        if row[b].is_finite() {
                            continue;
                        }
                        let mut best = W::INF;
                        for (i, &v) in boundary.iter().enumerate() {
                            if v as usize == u || row[i].is_inf() {
                                continue;
                            }
                            let ev = lvl.row(c, v as usize)[b];
                            best = best.min(row[i].add_sat(ev));
                        }
                        let e = if best.is_finite() {
                            best
                        } else {
                            ov.unrestricted_eccentricity(l, u)
                        };
                        set_ecc(ov, l, u, e);
                    }
                }
            }
            _ => unreachable!("refinement only for unrestricted modes"),
        }
    }
}

fn set_ecc<W: Weight>(ov: &mut Overlay<W>, l: usize, u: usize, e: W) {
    let c = ov.cell[l - 1][u] as usize;
    let lvl = &mut ov.levels[l - 1];
    let b = lvl.nbound[c] as usize;
    let idx = lvl.mat_first[c] + lvl.local[u] as usize * (b + 1) + b;
    lvl.mat[idx] = e;
}
