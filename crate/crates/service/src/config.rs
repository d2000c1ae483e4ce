use std::net::{IpAddr, Ipv4Addr, SocketAddr};
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::ServiceError;

/// Service settings, read from a TOML file.
///
/// ```toml
/// port = 8080
/// data = "berlin.json"
/// algorithms = ["isodijkstra", "isograsp"]
/// threads = 4
/// ```
#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceConfig {
    #[serde(default = "default_bind")]
    pub bind: IpAddr,
    #[serde(default = "default_port")]
    pub port: u16,
    /// Data manifest written by `customize` or `prepro`, or a `.gr` file
    /// to load with default parameters.
    pub data: PathBuf,
    /// Coordinate file; overrides the one named in the manifest.
    #[serde(default)]
    pub coords: Option<PathBuf>,
    /// Engines to load. Empty means every engine in the manifest, or all
    /// algorithms when the manifest names none.
    #[serde(default)]
    pub algorithms: Vec<String>,
    /// Used when a request names no algorithm. Defaults to the first loaded.
    #[serde(default)]
    pub default_algo: Option<String>,
    /// Upper bound on threads used by a single query.
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Allowed CORS origin; any origin when unset.
    #[serde(default)]
    pub cors_origin: Option<String>,
}

fn default_bind() -> IpAddr {
    IpAddr::V4(Ipv4Addr::LOCALHOST)
}

fn default_port() -> u16 {
    8080
}

fn default_threads() -> usize {
    1
}

impl ServiceConfig {
    pub fn new(data: impl Into<PathBuf>) -> Self {
        ServiceConfig {
            bind: default_bind(),
            port: default_port(),
            data: data.into(),
            coords: None,
            algorithms: Vec::new(),
            default_algo: None,
            threads: default_threads(),
            cors_origin: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ServiceError> {
        let config: ServiceConfig = toml::from_str(text)?;
        if config.threads == 0 {
            return Err(ServiceError::Config("threads must be at least 1".into()));
        }
        Ok(config)
    }

    /// Reads a config file. Relative data paths are taken relative to the
    /// file's directory.
    pub fn read(path: &Path) -> Result<Self, ServiceError> {
        let mut config = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if config.data.is_relative() {
            config.data = base.join(&config.data);
        }
        if let Some(c) = config.coords.as_mut().filter(|c| c.is_relative()) {
            *c = base.join(&*c);
        }
        Ok(config)
    }

    pub fn addr(&self) -> SocketAddr {
        SocketAddr::new(self.bind, self.port)
    }
}
