//! GeoJSON rendering of isochrone edge sets.

use isochrone::{Coordinates, Graph, IsochroneEdgeSet, Weight};
use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FeatureCollection {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub features: Vec<Feature>,
    pub edge_count: usize,
    pub query_ms: f64,
    /// 1-based source vertex the query ran from.
    pub source: usize,
    pub tau_s: u64,
    pub algo: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Feature {
    #[serde(rename = "type")]
    pub kind: &'static str,
    pub geometry: LineString,
    pub properties: EdgeProperties,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LineString {
    #[serde(rename = "type")]
    pub kind: &'static str,
    /// `[lon, lat]` of tail and head.
    pub coordinates: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EdgeProperties {
    pub tail: usize,
    pub head: usize,
    pub direction: &'static str,
    pub tau_s: u64,
    pub algo: String,
}

fn position(coords: &Coordinates, v: usize) -> [f64; 2] {
    [coords.lon(v), coords.lat(v)]
}

/// One LineString per edge in canonical edge order.
pub fn feature_collection<W: Weight>(
    graph: &Graph<W>,
    coords: &Coordinates,
    edges: &IsochroneEdgeSet,
    source: usize,
    tau_s: u64,
    algo: &str,
    query_ms: f64,
) -> FeatureCollection {
    let features = edges
        .iter()
        .map(|(e, dir)| {
            let (t, h) = (graph.tail(e), graph.head(e));
            Feature {
                kind: "Feature",
                geometry: LineString {
                    kind: "LineString",
                    coordinates: [position(coords, t), position(coords, h)],
                },
                properties: EdgeProperties {
                    tail: t + 1,
                    head: h + 1,
                    direction: dir.as_str(),
                    tau_s,
                    algo: algo.to_string(),
                },
            }
        })
        .collect::<Vec<_>>();
    FeatureCollection {
        kind: "FeatureCollection",
        edge_count: features.len(),
        features,
        query_ms,
        source: source + 1,
        tau_s,
        algo: algo.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use isochrone::dijkstra::iso_dijkstra;
    use isochrone::fixtures;

    #[test]
    fn tg1_features() {
        let g = fixtures::tg1();
        let c = fixtures::tg1_coords();
        let fc = feature_collection(&g, &c, &iso_dijkstra(&g, 0, 5), 0, 5, "isodijkstra", 0.5);
        assert_eq!(fc.edge_count, 2);
        let p: Vec<_> = fc.features.iter().map(|f| (f.properties.tail, f.properties.head, f.properties.direction)).collect();
        assert_eq!(p, [(3, 4, "in_out"), (4, 1, "out_in")]);
        let f = &fc.features[0];
        assert_eq!(f.geometry.coordinates, [[c.lon(2), c.lat(2)], [c.lon(3), c.lat(3)]]);
        let json = serde_json::to_value(&fc).unwrap();
        assert_eq!(json["type"], "FeatureCollection");
        assert_eq!(json["features"][0]["geometry"]["type"], "LineString");
        assert_eq!(json["source"], 1);
    }
}
