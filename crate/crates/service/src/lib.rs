//! HTTP service answering isochrone queries with GeoJSON.
//!
//! * `GET /api/isochrone?source=ID&tau=SECONDS&algo=NAME`, or with
//!   `lat=..&lon=..` instead of `source`, which snaps to the nearest vertex.
//! * `GET /api/info` describes the loaded graph.
//!
//! Vertex ids in requests and responses are 1-based.

pub mod config;
pub mod geojson;
pub mod spatial;

use std::collections::HashMap;
use std::sync::Arc;
use std::time::Instant;

use axum::extract::{Query, State};
use axum::http::{HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use isochrone::dijkstra::dijkstra_distances;
use isochrone::engine::{Manifest, ALGORITHMS};
use isochrone::{Coordinates, IsochroneAlgorithm, RoadGraph, Weight};
use serde::Serialize;
use tower_http::cors::{AllowOrigin, CorsLayer};

pub use config::ServiceConfig;
pub use geojson::FeatureCollection;
pub use spatial::SpatialIndex;

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(#[from] isochrone::Error),
}

/// Request failure, rendered as a status code and `{"error": ...}` body.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ApiError {
    #[error("{0}")]
    BadRequest(String),
    #[error("unknown algorithm '{0}'")]
    UnknownAlgorithm(String),
    #[error("tau must be positive, got {0}")]
    NonPositiveTau(i64),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::UnknownAlgorithm(_) => StatusCode::NOT_FOUND,
            ApiError::NonPositiveTau(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

/// Loaded graph, coordinates and engines, shared by all requests.
pub struct AppState {
    graph: Arc<RoadGraph>,
    coords: Coordinates,
    index: SpatialIndex,
    engines: Vec<Arc<dyn IsochroneAlgorithm<u32>>>,
    default_algo: String,
    threads: usize,
    tau_max_s: u64,
}

impl AppState {
    pub fn new(
        graph: Arc<RoadGraph>,
        coords: Coordinates,
        engines: Vec<Arc<dyn IsochroneAlgorithm<u32>>>,
        threads: usize,
    ) -> Result<Self, ServiceError> {
        let n = graph.num_vertices();
        if n == 0 {
            return Err(ServiceError::Config("graph has no vertices".into()));
        }
        if coords.len() != n {
            return Err(ServiceError::Config(format!(
                "{} coordinates for {} vertices",
                coords.len(),
                n
            )));
        }
        let Some(first) = engines.first() else {
            return Err(ServiceError::Config("no algorithms loaded".into()));
        };
        let default_algo = first.name().to_string();
        let tau_max_s = diameter_bound(&graph);
        Ok(AppState {
            index: SpatialIndex::new(&coords),
            graph,
            coords,
            engines,
            default_algo,
            threads: threads.max(1),
            tau_max_s,
        })
    }

    /// Loads the manifest and engines named in the config.
    pub fn load(config: &ServiceConfig) -> Result<Self, ServiceError> {
        let manifest = Manifest::open(&config.data)?;
        let all: Vec<String> = ALGORITHMS.iter().map(|a| a.to_string()).collect();
        let only = if !config.algorithms.is_empty() {
            Some(config.algorithms.as_slice())
        } else if manifest.engines.is_empty() {
            Some(all.as_slice())
        } else {
            None
        };
        let data = manifest.load(only, config.threads)?;
        let coords = match (&config.coords, data.coords) {
            (Some(path), _) => isochrone::dimacs::read_co_file(path, data.graph.num_vertices())?,
            (None, Some(c)) => c,
            (None, None) => return Err(ServiceError::Config("the service needs vertex coordinates".into())),
        };
        let mut state = AppState::new(data.graph, coords, data.engines, config.threads)?;
        if let Some(name) = &config.default_algo {
            state.set_default_algo(name)?;
        }
        Ok(state)
    }

    pub fn set_default_algo(&mut self, name: &str) -> Result<(), ServiceError> {
        if self.engine(name).is_none() {
            return Err(ServiceError::Config(format!("default algorithm '{name}' is not loaded")));
        }
        self.default_algo = name.to_string();
        Ok(())
    }

    fn engine(&self, name: &str) -> Option<&Arc<dyn IsochroneAlgorithm<u32>>> {
        self.engines.iter().find(|e| e.name() == name)
    }

    pub fn algorithms(&self) -> Vec<String> {
        self.engines.iter().map(|e| e.name().to_string()).collect()
    }

    /// 0-based nearest vertex.
    pub fn nearest_vertex(&self, lat: f64, lon: f64) -> usize {
        self.index.nearest(lat, lon).expect("graph has vertices")
    }

    /// Runs one query and renders it.
    pub fn isochrone(&self, source: usize, tau_s: u64, algo: &str) -> Result<FeatureCollection, ApiError> {
        let engine = self
            .engine(algo)
            .ok_or_else(|| ApiError::UnknownAlgorithm(algo.to_string()))?;
        let tau = tau_s.min(u64::from(u32::INF - 1)) as u32;
        let start = Instant::now();
        let (edges, _) = engine.query_with_stats(source, tau, self.threads);
        let query_ms = start.elapsed().as_secs_f64() * 1e3;
        Ok(geojson::feature_collection(
            &self.graph,
            &self.coords,
            &edges,
            source,
            tau_s,
            algo,
            query_ms,
        ))
    }

    pub fn info(&self) -> Info {
        let (x0, y0, x1, y1) = self.coords.bbox().expect("graph has vertices");
        Info {
            n: self.graph.num_vertices(),
            m: self.graph.num_edges(),
            bbox: [x0, y0, x1, y1],
            algorithms: self.algorithms(),
            default_algo: self.default_algo.clone(),
            tau_min_s: 1,
            tau_max_s: self.tau_max_s,
        }
    }
}

/// `max_v d(v, 0) + max_w d(0, w)`, an upper bound on the diameter of a
/// strongly connected graph; 1 when vertex 0 reaches nothing else.
fn diameter_bound(graph: &RoadGraph) -> u64 {
    let far = |d: Vec<u32>| d.into_iter().filter(|x| !x.is_inf()).max().unwrap_or(0) as u64;
    let out = far(dijkstra_distances(graph, 0));
    let back = far(dijkstra_distances(&graph.reversed(), 0));
    (out + back).max(1)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Info {
    pub n: usize,
    pub m: usize,
    /// `[min_lon, min_lat, max_lon, max_lat]`.
    pub bbox: [f64; 4],
    pub algorithms: Vec<String>,
    pub default_algo: String,
    pub tau_min_s: u64,
    /// Every vertex is in range from any source at this limit.
    pub tau_max_s: u64,
}

/// Parsed `/api/isochrone` parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct IsochroneRequest {
    pub source: SourceSpec,
    pub tau_s: u64,
    pub algo: String,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SourceSpec {
    /// 0-based vertex.
    Vertex(usize),
    Point { lat: f64, lon: f64 },
}

fn parse_coord(params: &HashMap<String, String>, key: &str, limit: f64) -> Result<f64, ApiError> {
    let raw = &params[key];
    let x: f64 = raw
        .trim()
        .parse()
        .map_err(|_| ApiError::BadRequest(format!("{key} is not a number: '{raw}'")))?;
    if !x.is_finite() || x.abs() > limit {
        return Err(ApiError::BadRequest(format!("{key} out of range: {x}")));
    }
    Ok(x)
}

impl IsochroneRequest {
    /// Validates in order: malformed parameters (400), unknown algorithm
    /// (404), non-positive limit (422).
    pub fn parse(params: &HashMap<String, String>, state: &AppState) -> Result<Self, ApiError> {
        let n = state.graph.num_vertices();
        let has = |k: &str| params.contains_key(k);
        let source = match (has("source"), has("lat"), has("lon")) {
            (true, false, false) => {
                let raw = &params["source"];
                let id: usize = raw
                    .trim()
                    .parse()
                    .map_err(|_| ApiError::BadRequest(format!("source is not a vertex id: '{raw}'")))?;
                if id == 0 || id > n {
                    return Err(ApiError::BadRequest(format!("source {id} outside 1..={n}")));
                }
                SourceSpec::Vertex(id - 1)
            }
            (false, true, true) => SourceSpec::Point {
                lat: parse_coord(params, "lat", 90.0)?,
                lon: parse_coord(params, "lon", 180.0)?,
            },
            (false, false, false) => return Err(ApiError::BadRequest("missing source or lat/lon".into())),
            _ => {
                return Err(ApiError::BadRequest(
                    "give either source or both lat and lon".into(),
                ))
            }
        };
        let raw = params
            .get("tau")
            .ok_or_else(|| ApiError::BadRequest("missing tau".into()))?;
        let tau: i64 = raw
            .trim()
            .parse()
            .map_err(|_| ApiError::BadRequest(format!("tau is not an integer number of seconds: '{raw}'")))?;
        let algo = params.get("algo").cloned().unwrap_or_else(|| state.default_algo.clone());
        if state.engine(&algo).is_none() {
            return Err(ApiError::UnknownAlgorithm(algo));
        }
        if tau <= 0 {
            return Err(ApiError::NonPositiveTau(tau));
        }
        Ok(IsochroneRequest {
            source,
            tau_s: tau as u64,
            algo,
        })
    }
}

async fn isochrone_handler(
    State(state): State<Arc<AppState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Result<Json<FeatureCollection>, ApiError> {
    let req = IsochroneRequest::parse(&params, &state)?;
    let source = match req.source {
        SourceSpec::Vertex(v) => v,
        SourceSpec::Point { lat, lon } => state.nearest_vertex(lat, lon),
    };
    log::debug!("isochrone source={} tau={} algo={}", source + 1, req.tau_s, req.algo);
    let st = state.clone();
    let fc = tokio::task::spawn_blocking(move || st.isochrone(source, req.tau_s, &req.algo))
        .await
        .map_err(|e| ApiError::Internal(format!("query task failed: {e}")))??;
    Ok(Json(fc))
}

async fn info_handler(State(state): State<Arc<AppState>>) -> Json<Info> {
    Json(state.info())
}

/// Routes with CORS for `origin`, or for any origin when `None`.
pub fn router(state: Arc<AppState>, origin: Option<&str>) -> Result<Router, ServiceError> {
    let allow = match origin {
        Some(o) => AllowOrigin::exact(
            HeaderValue::from_str(o).map_err(|_| ServiceError::Config(format!("invalid CORS origin '{o}'")))?,
        ),
        None => AllowOrigin::any(),
    };
    let cors = CorsLayer::new().allow_origin(allow).allow_methods([Method::GET]);
    Ok(Router::new()
        .route("/api/isochrone", get(isochrone_handler))
        .route("/api/info", get(info_handler))
        .layer(cors)
        .with_state(state))
}

/// Loads the data and serves until the process is stopped.
pub async fn run(config: ServiceConfig) -> Result<(), ServiceError> {
    let state = Arc::new(AppState::load(&config)?);
    let app = router(state.clone(), config.cors_origin.as_deref())?;
    let listener = tokio::net::TcpListener::bind(config.addr()).await?;
    log::info!(
        "serving {} vertices with {} on http://{}",
        state.graph.num_vertices(),
        state.algorithms().join(","),
        listener.local_addr()?
    );
    axum::serve(listener, app).await?;
    Ok(())
}
