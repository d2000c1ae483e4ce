//! Nearest-vertex lookup on a uniform lat/lon grid.

use isochrone::Coordinates;

const EARTH_RADIUS_M: f64 = 6_371_008.8;
const MICRO: f64 = 1e-6;

/// Great-circle distance between two micro-degree points, computed from
/// integer differences so that mirrored points tie exactly.
fn distance_m(lon1: i64, lat1: i64, lon2: i64, lat2: i64) -> f64 {
    let p1 = (lat1 as f64 * MICRO).to_radians();
    let p2 = (lat2 as f64 * MICRO).to_radians();
    let dp = ((lat2 - lat1) as f64 * MICRO).to_radians();
    let dl = ((lon2 - lon1) as f64 * MICRO).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}

/// Vertex ids bucketed by grid cell over the coordinate bounding box.
pub struct SpatialIndex {
    lon: Vec<i32>,
    lat: Vec<i32>,
    min: (i64, i64),
    cell: (i64, i64),
    dims: (i64, i64),
    first: Vec<u32>,
    ids: Vec<u32>,
    /// Largest absolute latitude of any vertex, in radians.
    max_abs_lat: f64,
}

impl SpatialIndex {
    pub fn new(coords: &Coordinates) -> Self {
        let n = coords.len();
        let lon: Vec<i32> = (0..n).map(|v| coords.lon_micro(v)).collect();
        let lat: Vec<i32> = (0..n).map(|v| coords.lat_micro(v)).collect();
        let side = ((n as f64 / 2.0).sqrt().ceil() as i64).max(1);
        let (x0, x1) = (lon.iter().min().copied().unwrap_or(0), lon.iter().max().copied().unwrap_or(0));
        let (y0, y1) = (lat.iter().min().copied().unwrap_or(0), lat.iter().max().copied().unwrap_or(0));
        let cell = (
            ((x1 as i64 - x0 as i64) / side + 1).max(1),
            ((y1 as i64 - y0 as i64) / side + 1).max(1),
        );
        let dims = (side, side);
        let mut index = SpatialIndex {
            lon,
            lat,
            min: (x0 as i64, y0 as i64),
            cell,
            dims,
            first: Vec::new(),
            ids: Vec::new(),
            max_abs_lat: 0.0,
        };
        let buckets = (dims.0 * dims.1) as usize;
        let mut count = vec![0u32; buckets + 1];
        let keys: Vec<usize> = (0..n).map(|v| index.bucket_of(v)).collect();
        for &k in &keys {
            count[k + 1] += 1;
        }
        for i in 0..buckets {
            count[i + 1] += count[i];
        }
        let mut next = count.clone();
        let mut ids = vec![0u32; n];
        for (v, &k) in keys.iter().enumerate() {
            ids[next[k] as usize] = v as u32;
            next[k] += 1;
        }
        index.first = count;
        index.ids = ids;
        index.max_abs_lat = index
            .lat
            .iter()
            .map(|&y| (y as f64 * MICRO).abs())
            .fold(0.0, f64::max)
            .to_radians();
        index
    }

    pub fn len(&self) -> usize {
        self.lon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lon.is_empty()
    }

    fn cell_of(&self, lon: i64, lat: i64) -> (i64, i64) {
        (
            ((lon - self.min.0).div_euclid(self.cell.0)).clamp(0, self.dims.0 - 1),
            ((lat - self.min.1).div_euclid(self.cell.1)).clamp(0, self.dims.1 - 1),
        )
    }

    fn bucket_of(&self, v: usize) -> usize {
        let (cx, cy) = self.cell_of(self.lon[v] as i64, self.lat[v] as i64);
        (cy * self.dims.0 + cx) as usize
    }

    /// Lower bound on the distance from a query to any vertex at least
    /// `rings` whole cells away from it in some direction.
    fn ring_bound(&self, rings: i64, query_lat: f64) -> f64 {
        if rings <= 0 {
            return 0.0;
        }
        let dlat = (rings * self.cell.1) as f64 * MICRO;
        let by_lat = EARTH_RADIUS_M * dlat.to_radians();
        let dlon = ((rings * self.cell.0) as f64 * MICRO).to_radians().min(std::f64::consts::PI);
        let cos = self.max_abs_lat.max(query_lat.abs().to_radians()).cos();
        let by_lon = 2.0 * EARTH_RADIUS_M * (cos * (dlon / 2.0).sin()).min(1.0).asin();
        by_lat.min(by_lon)
    }

    /// Closest vertex by great-circle distance, lowest id on ties. The
    /// query is rounded to micro-degrees. `None` only without vertices.
    pub fn nearest(&self, lat: f64, lon: f64) -> Option<usize> {
        if self.is_empty() {
            return None;
        }
        let qx = (lon * 1e6).round() as i64;
        let qy = (lat * 1e6).round() as i64;
        let (cx, cy) = self.cell_of(qx, qy);
        let mut best: Option<(f64, usize)> = None;
        let max_ring = self.dims.0.max(self.dims.1);
        for r in 0..=max_ring {
            if let Some((d, _)) = best {
                // cells of ring r are at least r - 1 whole cells away
                if self.ring_bound(r - 1, lat) > d {
                    break;
                }
            }
            for y in cy - r..=cy + r {
                if y < 0 || y >= self.dims.1 {
                    continue;
                }
                let step = if y == cy - r || y == cy + r { 1 } else { (2 * r).max(1) };
                let mut x = cx - r;
                while x <= cx + r {
                    if x >= 0 && x < self.dims.0 {
                        let b = (y * self.dims.0 + x) as usize;
                        for &v in &self.ids[self.first[b] as usize..self.first[b + 1] as usize] {
                            let v = v as usize;
                            let d = distance_m(qx, qy, self.lon[v] as i64, self.lat[v] as i64);
                            let better = match best {
                                None => true,
                                Some((bd, bv)) => d < bd || (d == bd && v < bv),
                            };
                            if better {
                                best = Some((d, v));
                            }
                        }
                    }
                    x += step;
                }
            }
        }
        best.map(|(_, v)| v)
    }
}
