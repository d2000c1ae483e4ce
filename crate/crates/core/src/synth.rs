//! Deterministic road-like test networks: a jittered grid of local streets
//! with faster arterial and motorway lines, random gaps and one-way
//! streets, restricted to its largest strongly connected component.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::coords::{haversine_m, Coordinates};
use crate::error::{Error, Result};
use crate::graph::{restrict_to_largest_scc, Graph};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SynthParams {
    pub width: usize,
    pub height: usize,
    pub seed: u64,
    /// Grid spacing in metres.
    pub spacing_m: f64,
    /// Every `arterial_every`-th row and column is an arterial road.
    pub arterial_every: usize,
    /// Every `motorway_every`-th row and column is a motorway.
    pub motorway_every: usize,
    /// Probability that a local street segment is missing.
    pub gap_rate: f64,
    /// Probability that a local street segment is one-way.
    pub one_way_rate: f64,
    /// South-west corner (lon, lat) in degrees.
    pub origin: (f64, f64),
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            width: 100,
            height: 100,
            seed: 1,
            spacing_m: 120.0,
            arterial_every: 8,
            motorway_every: 48,
            gap_rate: 0.08,
            one_way_rate: 0.06,
            origin: (13.0, 52.3),
        }
    }
}

impl SynthParams {
    /// Square grid with roughly `n` vertices before the SCC restriction.
    pub fn square(n: usize, seed: u64) -> Self {
        let side = (n as f64).sqrt().ceil() as usize;
        SynthParams {
            width: side,
            height: side,
            seed,
            ..Self::default()
        }
    }
}

/// Speeds in km/h of local streets, arterials and motorways.
const LOCAL_KMH: (f64, f64) = (25.0, 50.0);
const ARTERIAL_KMH: f64 = 70.0;
const MOTORWAY_KMH: f64 = 110.0;

/// Generates the network; travel times are whole seconds, at least one.
pub fn road_network(p: &SynthParams) -> Result<(Graph<u32>, Coordinates)> {
    if p.width < 2 || p.height < 2 {
        return Err(Error::validation("grid needs at least 2x2 vertices"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (w, h) = (p.width, p.height);
    let deg_lat = p.spacing_m / 111_320.0;
    let deg_lon = deg_lat / p.origin.1.to_radians().cos();
    let mut points = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let jx = rng.random_range(-0.3..0.3);
            let jy = rng.random_range(-0.3..0.3);
            points.push((
                p.origin.0 + (x as f64 + jx) * deg_lon,
                p.origin.1 + (y as f64 + jy) * deg_lat,
            ));
        }
    }
    let class = |line: usize| {
        if p.motorway_every > 0 && line % p.motorway_every == 0 {
            2
        } else if p.arterial_every > 0 && line % p.arterial_every == 0 {
            1
        } else {
            0
        }
    };
    let mut edges = Vec::with_capacity(4 * w * h);
    let mut add = |rng: &mut ChaCha8Rng, a: usize, b: usize, road: u8| {
        let (pa, pb) = (points[a], points[b]);
        let metres = haversine_m(pa.1, pa.0, pb.1, pb.0);
        let kmh = match road {
            2 => MOTORWAY_KMH,
            1 => ARTERIAL_KMH,
            _ => rng.random_range(LOCAL_KMH.0..LOCAL_KMH.1),
        };
        let secs = (metres / (kmh / 3.6)).round().max(1.0) as u32;
        if road == 0 {
            if rng.random_bool(p.gap_rate) {
                return;
            }
            if rng.random_bool(p.one_way_rate) {
                if rng.random_bool(0.5) {
                    edges.push((a as u32, b as u32, secs));
                } else {
                    edges.push((b as u32, a as u32, secs));
                }
                return;
            }
        }
        edges.push((a as u32, b as u32, secs));
        edges.push((b as u32, a as u32, secs));
    };
    for y in 0..h {
        for x in 0..w {
            let v = y * w + x;
            if x + 1 < w {
                add(&mut rng, v, v + 1, class(y));
            }
            if y + 1 < h {
                add(&mut rng, v, v + w, class(x));
            }
        }
    }
    let graph = Graph::from_edges(w * h, edges)?;
    let coords = Coordinates::from_degrees(&points)?;
    let (graph, coords, _) = restrict_to_largest_scc(&graph, Some(&coords));
    Ok((graph, coords.expect("coordinates were given")))
}
