//! Vertex coordinates in micro-degrees.

use crate::error::{Error, Result};

const EARTH_RADIUS_M: f64 = 6_371_008.8;

/// Per-vertex longitude/latitude, stored as integer micro-degrees.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coordinates {
    lon: Vec<i32>,
    lat: Vec<i32>,
}

impl Coordinates {
    /// Builds from micro-degree pairs `(lon, lat)`.
    pub fn from_micro(points: Vec<(i32, i32)>) -> Result<Self> {
        let mut lon = Vec::with_capacity(points.len());
        let mut lat = Vec::with_capacity(points.len());
        for (v, (x, y)) in points.into_iter().enumerate() {
            if !(-180_000_000..=180_000_000).contains(&x) || !(-90_000_000..=90_000_000).contains(&y) {
                return Err(Error::validation(format!(
                    "coordinate of vertex {} out of range: ({x}, {y})",
                    v + 1
                )));
            }
            lon.push(x);
            lat.push(y);
        }
        Ok(Coordinates { lon, lat })
    }

    pub fn from_degrees(points: &[(f64, f64)]) -> Result<Self> {
        Self::from_micro(
            points
                .iter()
                .map(|&(lon, lat)| ((lon * 1e6).round() as i32, (lat * 1e6).round() as i32))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.lon.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lon.is_empty()
    }

    #[inline]
    pub fn lon_micro(&self, v: usize) -> i32 {
        self.lon[v]
    }

    #[inline]
    pub fn lat_micro(&self, v: usize) -> i32 {
        self.lat[v]
    }

    pub fn lon(&self, v: usize) -> f64 {
        self.lon[v] as f64 * 1e-6
    }

    pub fn lat(&self, v: usize) -> f64 {
        self.lat[v] as f64 * 1e-6
    }

    /// Coordinates of the listed vertices, in list order.
    pub fn select(&self, ids: &[u32]) -> Self {
        Coordinates {
            lon: ids.iter().map(|&v| self.lon[v as usize]).collect(),
            lat: ids.iter().map(|&v| self.lat[v as usize]).collect(),
        }
    }

    /// Bounding box as `(min_lon, min_lat, max_lon, max_lat)` in degrees.
    pub fn bbox(&self) -> Option<(f64, f64, f64, f64)> {
        if self.is_empty() {
            return None;
        }
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for v in 0..self.len() {
            x0 = x0.min(self.lon[v]);
            x1 = x1.max(self.lon[v]);
            y0 = y0.min(self.lat[v]);
            y1 = y1.max(self.lat[v]);
        }
        Some((x0 as f64 * 1e-6, y0 as f64 * 1e-6, x1 as f64 * 1e-6, y1 as f64 * 1e-6))
    }
}

/// Great-circle distance in meters (haversine).
pub fn haversine_m(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let (p1, p2) = (lat1.to_radians(), lat2.to_radians());
    let dp = p2 - p1;
    let dl = (lon2 - lon1).to_radians();
    let a = (dp / 2.0).sin().powi(2) + p1.cos() * p2.cos() * (dl / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * a.sqrt().min(1.0).asin()
}
