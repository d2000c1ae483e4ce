//! Building engines by name, default parameters scaled to the graph size,
//! and JSON data manifests that record how to rebuild them.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coords::Coordinates;
use crate::dijkstra::IsoDijkstra;
use crate::dimacs;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::isochrone::IsochroneAlgorithm;
use crate::isophast::{CoreIsoPhast, DtIsoPhast, DtOptions, FlagRule, IsoPhastCore, IsoPhastDt, PhastOptions};
use crate::mld::{build_overlay, CustomizeOptions, EccMode, IsoCrp, IsoGrasp, Overlay};
use crate::partition::{bisect_into_cells, EdgePartition, MultilevelPartition};
use crate::weight::Weight;

/// Every algorithm name, baseline first.
pub const ALGORITHMS: [&str; 6] = [
    "isodijkstra",
    "isocrp",
    "isograsp",
    "isophast-cd",
    "isophast-cp",
    "isophast-dt",
];

/// One engine and its parameters. A PHAST cell count of `None` takes the
/// cells from level 1 of the data set's partition.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "algo")]
pub enum EngineSpec {
    #[serde(rename = "isodijkstra")]
    Dijkstra,
    #[serde(rename = "isocrp")]
    Crp { ecc_mode: EccMode },
    #[serde(rename = "isograsp")]
    Grasp { ecc_mode: EccMode, reduce: bool },
    #[serde(rename = "isophast-cd")]
    PhastCd { cells: Option<usize> },
    #[serde(rename = "isophast-cp")]
    PhastCp { cells: Option<usize>, flag_rule: FlagRule },
    #[serde(rename = "isophast-dt")]
    PhastDt { cells: Option<usize>, compress: usize },
}

/// Vertices per cell at the bottom level of the default overlay.
const BOTTOM_CELL: usize = 256;
/// Cells of the top level of the default overlay.
const TOP_CELLS: usize = 16;

/// Four geometrically spaced cell sizes from 256 up to `n / 16` vertices
/// (fewer levels for small graphs).
pub fn default_cell_sizes(n: usize) -> Vec<usize> {
    let top = (n / TOP_CELLS).max(2);
    let bottom = BOTTOM_CELL.min(top);
    if top <= bottom {
        return vec![top];
    }
    let ratio = (top as f64 / bottom as f64).powf(1.0 / 3.0);
    let mut sizes: Vec<usize> = (0..4).map(|i| (bottom as f64 * ratio.powi(i)).round() as usize).collect();
    sizes[3] = top;
    sizes.dedup();
    sizes
}

/// Default cell count of an isoPHAST variant: a vertex-per-cell ratio
/// that keeps cells at a few thousand vertices (CD, CP) or around a
/// thousand (DT), at least one cell.
pub fn default_cells(algo: &str, n: usize) -> usize {
    let per_cell = match algo {
        "isophast-cd" | "isophast-cp" => 4096,
        _ => 1024,
    };
    n.div_ceil(per_cell).next_power_of_two().clamp(1, n.max(1))
}

/// Default compressed-top size of isoPHAST-DT: 0.35 % of the vertices.
pub fn default_compress(n: usize) -> usize {
    n * 35 / 10_000
}

impl EngineSpec {
    pub fn name(&self) -> &'static str {
        match self {
            EngineSpec::Dijkstra => ALGORITHMS[0],
            EngineSpec::Crp { .. } => ALGORITHMS[1],
            EngineSpec::Grasp { .. } => ALGORITHMS[2],
            EngineSpec::PhastCd { .. } => ALGORITHMS[3],
            EngineSpec::PhastCp { .. } => ALGORITHMS[4],
            EngineSpec::PhastDt { .. } => ALGORITHMS[5],
        }
    }

    /// Default parameters for a graph with `n` vertices.
    pub fn default_for(name: &str, n: usize) -> Result<Self> {
        let cells = Some(default_cells(name, n));
        Ok(match name {
            "isodijkstra" => EngineSpec::Dijkstra,
            "isocrp" => EngineSpec::Crp { ecc_mode: EccMode::Sep },
            "isograsp" => EngineSpec::Grasp {
                ecc_mode: EccMode::Sep,
                reduce: true,
            },
            "isophast-cd" => EngineSpec::PhastCd { cells },
            "isophast-cp" => EngineSpec::PhastCp {
                cells,
                flag_rule: FlagRule::Exact,
            },
            "isophast-dt" => EngineSpec::PhastDt {
                cells,
                compress: default_compress(n),
            },
            _ => return Err(Error::UnknownAlgorithm(name.to_string())),
        })
    }

    /// Parses a comma-separated list; `all` expands to every algorithm.
    pub fn parse_list(list: &str, n: usize) -> Result<Vec<Self>> {
        let mut out = Vec::new();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            if name == "all" {
                for a in ALGORITHMS {
                    out.push(Self::default_for(a, n)?);
                }
            } else {
                out.push(Self::default_for(name, n)?);
            }
        }
        if out.is_empty() {
            return Err(Error::Config("no algorithm given".into()));
        }
        Ok(out)
    }
}

/// Inputs shared by all engines of one graph.
pub struct EngineInputs<'a, W> {
    pub graph: &'a Arc<Graph<W>>,
    pub coords: Option<&'a Coordinates>,
    /// Multilevel partition for the overlay engines; built from
    /// [`default_cell_sizes`] when absent.
    pub partition: Option<&'a MultilevelPartition>,
    pub threads: usize,
}

/// Builds engines, sharing one overlay between CRP and GRASP engines with
/// the same eccentricity mode and reduction setting.
pub fn build_engines<W: Weight>(
    specs: &[EngineSpec],
    inputs: &EngineInputs<'_, W>,
) -> Result<Vec<Arc<dyn IsochroneAlgorithm<W>>>> {
    let graph = inputs.graph;
    let n = graph.num_vertices();
    let mut default_partition = None;
    let mut overlays: Vec<((EccMode, bool), Arc<Overlay<W>>)> = Vec::new();
    let mut overlay = |mode: EccMode, reduce: bool| -> Result<Arc<Overlay<W>>> {
        if let Some((_, ov)) = overlays.iter().find(|(key, _)| *key == (mode, reduce)) {
            return Ok(ov.clone());
        }
        let part = match inputs.partition {
            Some(p) => p,
            None => {
                if default_partition.is_none() {
                    default_partition = Some(MultilevelPartition::build(
                        graph.as_ref(),
                        inputs.coords,
                        &default_cell_sizes(n),
                    )?);
                }
                default_partition.as_ref().expect("just built")
            }
        };
        let opt = CustomizeOptions {
            mode,
            grasp: true,
            reduce,
            threads: inputs.threads,
        };
        let ov = build_overlay(graph.as_ref(), part, opt)?;
        overlays.push(((mode, reduce), ov.clone()));
        Ok(ov)
    };
    let vertex_cells = |cells: Option<usize>| -> Result<Vec<u32>> {
        match (cells, inputs.partition) {
            (Some(k), _) => bisect_into_cells(graph.as_ref(), inputs.coords, k),
            (None, Some(p)) => Ok(p.level_cells(1).to_vec()),
            (None, None) => Err(Error::Config("cells from a partition requested, but none given".into())),
        }
    };
    let mut out: Vec<Arc<dyn IsochroneAlgorithm<W>>> = Vec::new();
    for spec in specs {
        let engine: Arc<dyn IsochroneAlgorithm<W>> = match *spec {
            EngineSpec::Dijkstra => Arc::new(IsoDijkstra::new(graph.clone())),
            EngineSpec::Crp { ecc_mode } => Arc::new(IsoCrp::new(overlay(ecc_mode, true)?)),
            EngineSpec::Grasp { ecc_mode, reduce } => Arc::new(IsoGrasp::new(overlay(ecc_mode, reduce)?)?),
            EngineSpec::PhastCd { cells } => {
                let cells = vertex_cells(cells)?;
                let opt = PhastOptions {
                    threads: inputs.threads,
                    ..PhastOptions::default()
                };
                Arc::new(IsoPhastCore::new(Arc::new(CoreIsoPhast::build_cd(graph, &cells, &opt)?)))
            }
            EngineSpec::PhastCp { cells, flag_rule } => {
                let cells = vertex_cells(cells)?;
                let opt = PhastOptions {
                    threads: inputs.threads,
                    flag_rule,
                    ..PhastOptions::default()
                };
                Arc::new(IsoPhastCore::new(Arc::new(CoreIsoPhast::build_cp(graph, &cells, &opt)?)))
            }
            EngineSpec::PhastDt { cells, compress } => {
                let part = dt_partition(graph, &vertex_cells(cells)?)?;
                let opt = DtOptions {
                    threads: inputs.threads,
                    compress: compress.min(n),
                    ..DtOptions::default()
                };
                Arc::new(IsoPhastDt::new(Arc::new(DtIsoPhast::build(graph, &part, &opt)?)))
            }
        };
        out.push(engine);
    }
    Ok(out)
}

/// Edge partition of isoPHAST-DT: every edge goes to the cell of its tail.
pub fn dt_partition<W: Weight>(graph: &Graph<W>, vc: &[u32]) -> Result<EdgePartition> {
    EdgePartition::new(graph, (0..graph.num_edges()).map(|e| vc[graph.tail(e)]).collect())
}

/// Description of a data set: input files plus the engines to build.
/// Relative paths are resolved against the manifest's directory.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub graph: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partition: Option<PathBuf>,
    #[serde(default)]
    pub engines: Vec<EngineSpec>,
}

/// Loaded manifest contents.
pub struct DataSet {
    pub graph: Arc<Graph<u32>>,
    pub coords: Option<Coordinates>,
    pub partition: Option<MultilevelPartition>,
    pub engines: Vec<Arc<dyn IsochroneAlgorithm<u32>>>,
}

impl DataSet {
    pub fn engine(&self, name: &str) -> Option<&Arc<dyn IsochroneAlgorithm<u32>>> {
        self.engines.iter().find(|e| e.name() == name)
    }
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

impl Manifest {
    /// Reads a manifest, or wraps a `.gr` file (with a `.co` file of the
    /// same stem, if present) in a manifest without engines.
    pub fn open(path: &Path) -> Result<Self> {
        if path.extension().is_some_and(|e| e == "gr") {
            let co = path.with_extension("co");
            return Ok(Manifest {
                graph: path.to_path_buf(),
                coords: co.exists().then_some(co),
                partition: None,
                engines: Vec::new(),
            });
        }
        Self::read(path)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let mut m: Manifest = serde_json::from_reader(BufReader::new(File::open(path)?))?;
        let base = path.parent().unwrap_or(Path::new("."));
        m.graph = resolve(base, &m.graph);
        m.coords = m.coords.map(|p| resolve(base, &p));
        m.partition = m.partition.map(|p| resolve(base, &p));
        Ok(m)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        serde_json::to_writer_pretty(BufWriter::new(File::create(path)?), self)?;
        Ok(())
    }

    /// Reads the inputs and builds every engine. With `only`, engines with
    /// other names are skipped; a name missing from the manifest is built
    /// with default parameters.
    pub fn load(&self, only: Option<&[String]>, threads: usize) -> Result<DataSet> {
        let graph: Arc<Graph<u32>> = Arc::new(dimacs::read_gr_file(&self.graph)?);
        let n = graph.num_vertices();
        let coords = match &self.coords {
            Some(p) => Some(dimacs::read_co_file(p, n)?),
            None => None,
        };
        let partition = match &self.partition {
            Some(p) => Some(MultilevelPartition::read(BufReader::new(File::open(p)?), n)?),
            None => None,
        };
        let specs = match only {
            None => self.engines.clone(),
            Some(names) => names
                .iter()
                .map(|name| match self.engines.iter().find(|s| s.name() == name) {
                    Some(s) => Ok(s.clone()),
                    None => EngineSpec::default_for(name, n),
                })
                .collect::<Result<_>>()?,
        };
        let engines = build_engines(
            &specs,
            &EngineInputs {
                graph: &graph,
                coords: coords.as_ref(),
                partition: partition.as_ref(),
                threads,
            },
        )?;
        Ok(DataSet {
            graph,
            coords,
            partition,
            engines,
        })
    }
}
