//! Node contraction with lazy priority updates and bounded witness searches.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::graph::Graph;
use crate::scratch::Labels;
use crate::weight::Weight;

/// Tuning knobs of the contraction order and witness searches.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractionParams {
    /// Weight of the edge difference in the priority.
    pub edge_diff_weight: i64,
    /// Weight of the number of already contracted neighbors.
    pub deleted_weight: i64,
    /// Weight of the current CH level.
    pub level_weight: i64,
    /// Hop limit of witness searches while estimating priorities.
    pub sim_hops: u32,
    /// Hop limits while contracting, switching to the second value once the
    /// average remaining degree exceeds `hop_switch_degree`.
    pub hops: (u32, u32),
    pub hop_switch_degree: f64,
    /// Settled-vertex cap per witness search while contracting.
    pub settle_limit: usize,
    /// Settled-vertex cap per witness search while estimating priorities.
    pub sim_settle_limit: usize,
    /// Neighbors of a contracted vertex with a larger degree keep their
    /// last edge difference and are re-simulated only when popped.
    pub resim_degree: usize,
}

impl Default for ContractionParams {
    fn default() -> Self {
        ContractionParams {
            edge_diff_weight: 2,
            deleted_weight: 1,
            level_weight: 1,
            sim_hops: 2,
            hops: (5, 10),
            hop_switch_degree: 5.0,
            settle_limit: 500,
            sim_settle_limit: 20,
            resim_degree: 24,
        }
    }
}

/// Result of contracting every vertex outside a keep set.
#[derive(Clone, Debug)]
pub struct Contraction<W> {
    /// Contraction position, `u32::MAX` for kept vertices.
    pub rank: Vec<u32>,
    /// CH level: one more than the highest level of any neighbor contracted
    /// before the vertex.
    pub level: Vec<u32>,
    /// Edges `(tail, head, weight)` leaving a contracted vertex towards a
    /// vertex contracted later (or kept).
    pub up: Vec<(u32, u32, W)>,
    /// Edges entering a contracted vertex from a vertex contracted later
    /// (or kept).
    pub down: Vec<(u32, u32, W)>,
    /// Remaining edges between kept vertices, shortcuts included.
    pub core: Vec<(u32, u32, W)>,
    pub shortcuts: usize,
}

impl<W: Weight> Contraction<W> {
    pub fn is_kept(&self, v: usize) -> bool {
        self.rank[v] == u32::MAX
    }
}

struct Dynamic<W> {
    out: Vec<Vec<(u32, W)>>,
    inn: Vec<Vec<(u32, W)>>,
}

impl<W: Weight> Dynamic<W> {
    fn add_or_lower(&mut self, u: usize, v: usize, w: W) -> bool {
        if let Some(e) = self.out[u].iter_mut().find(|e| e.0 as usize == v) {
            if w < e.1 {
                e.1 = w;
                let back = self.inn[v].iter_mut().find(|e| e.0 as usize == u).expect("mirrored edge");
                back.1 = w;
            }
            return false;
        }
        self.out[u].push((v as u32, w));
        self.inn[v].push((u as u32, w));
        true
    }

    fn detach(&mut self, v: usize) {
        for (u, _) in std::mem::take(&mut self.inn[v]) {
            self.out[u as usize].retain(|e| e.0 as usize != v);
        }
        for (x, _) in std::mem::take(&mut self.out[v]) {
            self.inn[x as usize].retain(|e| e.0 as usize != v);
        }
    }
}

struct Witness<W> {
    dist: Labels<W>,
    hops: Vec<u32>,
    heap: BinaryHeap<Reverse<(W, u32)>>,
    /// Targets of the current search are marked with `generation`.
    target: Vec<u32>,
    generation: u32,
}

impl<W: Weight> Witness<W> {
    /// Bounded Dijkstra from `s` avoiding `skip`; stops early once all
    /// `targets` are settled.
    #[allow(clippy::too_many_arguments)]
    fn run(
        &mut self,
        g: &Dynamic<W>,
        s: usize,
        skip: usize,
        targets: &[(u32, W)],
        limit: W,
        max_hops: u32,
        max_settled: usize,
    ) {
        self.dist.reset();
        self.heap.clear();
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.target.iter_mut().for_each(|t| *t = 0);
            self.generation = 1;
        }
        let mut left = 0;
        for &(x, _) in targets {
            let x = x as usize;
            if x != s && x != skip && self.target[x] != self.generation {
                self.target[x] = self.generation;
                left += 1;
            }
        }
        self.dist.set(s, W::zero());
        self.hops[s] = 0;
        self.heap.push(Reverse((W::zero(), s as u32)));
        let mut settled = 0;
        while let Some(Reverse((d, u))) = self.heap.pop() {
            let u = u as usize;
            if d > self.dist.get(u) {
                continue;
            }
            if d > limit || settled >= max_settled || left == 0 {
                break;
            }
            settled += 1;
            if self.target[u] == self.generation {
                left -= 1;
            }
            let h = self.hops[u];
            if h >= max_hops {
                continue;
            }
            for &(x, w) in &g.out[u] {
                let x = x as usize;
                if x == skip {
                    continue;
                }
                let nd = d.add_sat(w);
                if nd <= limit && self.dist.relax(x, nd) {
                    self.hops[x] = h + 1;
                    self.heap.push(Reverse((nd, x as u32)));
                }
            }
        }
    }
}

struct Contractor<'a, W> {
    g: Dynamic<W>,
    wit: Witness<W>,
    level: Vec<u32>,
    deleted: Vec<u32>,
    /// Edge difference of the last simulation.
    diff: Vec<i64>,
    params: &'a ContractionParams,
}

impl<W: Weight> Contractor<'_, W> {
    /// Shortcuts needed when contracting `v`.
    fn shortcuts(&mut self, v: usize, max_hops: u32, max_settled: usize) -> Vec<(u32, u32, W)> {
        let mut result = Vec::new();
        let ins = self.g.inn[v].clone();
        for &(u, wu) in &ins {
            let u = u as usize;
            let limit = self.g.out[v]
                .iter()
                .filter(|e| e.0 as usize != u)
                .map(|e| wu.add_sat(e.1))
                .max();
            let Some(limit) = limit else { continue };
            self.wit
                .run(&self.g, u, v, &self.g.out[v], limit, max_hops, max_settled);
            for &(x, wx) in &self.g.out[v] {
                let x = x as usize;
                let via = wu.add_sat(wx);
                if x != u && self.wit.dist.get(x) > via {
                    result.push((u as u32, x as u32, via));
                }
            }
        }
        result
    }

    fn priority(&mut self, v: usize) -> i64 {
        let added = self.shortcuts(v, self.params.sim_hops, self.params.sim_settle_limit).len() as i64;
        let removed = (self.g.inn[v].len() + self.g.out[v].len()) as i64;
        self.diff[v] = added - removed;
        self.cached_priority(v)
    }

    fn cached_priority(&self, v: usize) -> i64 {
        self.params.edge_diff_weight * self.diff[v]
            + self.params.deleted_weight * self.deleted[v] as i64
            + self.params.level_weight * self.level[v] as i64
    }
}

/// Contracts every vertex with `keep[v] == false`.
pub fn contract<W: Weight>(graph: &Graph<W>, keep: &[bool], params: &ContractionParams) -> Contraction<W> {
    let n = graph.num_vertices();
    assert_eq!(keep.len(), n, "keep mask size");
    let mut g = Dynamic {
        out: vec![Vec::new(); n],
        inn: vec![Vec::new(); n],
    };
    for (u, v, w) in graph.edges() {
        g.add_or_lower(u as usize, v as usize, w);
    }
    let mut c = Contractor {
        g,
        wit: Witness {
            dist: Labels::new(n),
            hops: vec![0; n],
            heap: BinaryHeap::new(),
            target: vec![0; n],
            generation: 0,
        },
        level: vec![0; n],
        deleted: vec![0; n],
        diff: vec![0; n],
        params,
    };
    let mut prio = vec![0i64; n];
    let mut queue = BinaryHeap::new();
    for v in (0..n).filter(|&v| !keep[v]) {
        prio[v] = c.priority(v);
        queue.push(Reverse((prio[v], v as u32)));
    }
    let mut rank = vec![u32::MAX; n];
    let mut up = Vec::new();
    let mut down = Vec::new();
    let mut shortcuts = 0;
    let mut next = 0u32;
    let mut remaining_edges: usize = graph.num_edges();
    let mut remaining = queue.len();
    while let Some(Reverse((p, v))) = queue.pop() {
        let v = v as usize;
        if rank[v] != u32::MAX || p != prio[v] {
            continue;
        }
        let fresh = c.priority(v);
        if fresh > p {
            if let Some(Reverse((q, _))) = queue.peek() {
                if fresh > *q {
                    prio[v] = fresh;
                    queue.push(Reverse((fresh, v as u32)));
                    continue;
                }
            }
        }
        let avg_degree = remaining_edges as f64 / remaining.max(1) as f64;
        let hops = if avg_degree > params.hop_switch_degree {
            params.hops.1
        } else {
            params.hops.0
        };
        let added = c.shortcuts(v, hops, params.settle_limit);
        rank[v] = next;
        next += 1;
        remaining -= 1;
        for &(u, w) in &c.g.inn[v] {
            down.push((u, v as u32, w));
        }
        for &(x, w) in &c.g.out[v] {
            up.push((v as u32, x, w));
        }
        let neighbors: Vec<u32> = c.g.inn[v].iter().chain(&c.g.out[v]).map(|e| e.0).collect();
        remaining_edges = remaining_edges.saturating_sub(c.g.inn[v].len() + c.g.out[v].len());
        c.g.detach(v);
        for (a, b, w) in added {
            if c.g.add_or_lower(a as usize, b as usize, w) {
                shortcuts += 1;
                remaining_edges += 1;
            }
        }
        let lv = c.level[v];
        let mut touched = neighbors;
        touched.sort_unstable();
        touched.dedup();
        for &x in &touched {
            let x = x as usize;
            c.level[x] = c.level[x].max(lv + 1);
            c.deleted[x] += 1;
        }
        for &x in &touched {
            let x = x as usize;
            if !keep[x] && rank[x] == u32::MAX {
                prio[x] = if c.g.inn[x].len() + c.g.out[x].len() <= params.resim_degree {
                    c.priority(x)
                } else {
                    c.cached_priority(x)
                };
                queue.push(Reverse((prio[x], x as u32)));
            }
        }
    }
    let mut core = Vec::new();
    for u in 0..n {
        if keep[u] {
            for &(x, w) in &c.g.out[u] {
                core.push((u as u32, x, w));
            }
        }
    }
    core.sort_unstable();
    Contraction {
        rank,
        level: c.level,
        up,
        down,
        core,
        shortcuts,
    }
}
