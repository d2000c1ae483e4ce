use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use isochrone::engine::{build_engines, default_compress, EngineInputs, EngineSpec, Manifest, ALGORITHMS};
use isochrone::graph::restrict_to_largest_scc;
use isochrone::isophast::FlagRule;
use isochrone::mld::EccMode;
use isochrone::partition::MultilevelPartition;
use isochrone::synth::{road_network, SynthParams};
use isochrone::workload::{self, gen_workload, minutes_to_seconds, CSV_HEADER};
use isochrone::{dimacs, Coordinates, IsochroneAlgorithm, RoadGraph};
use isochrone_service::ServiceConfig;

fn read_graph(path: &Path) -> Result<RoadGraph> {
    let t = Instant::now();
    let g = dimacs::read_gr_file(path).with_context(|| format!("reading graph {}", path.display()))?;
    log::info!(
        "read {} vertices and {} edges in {:.1?}",
        g.num_vertices(),
        g.num_edges(),
        t.elapsed()
    );
    Ok(g)
}

fn read_coords(path: Option<&Path>, n: usize) -> Result<Option<Coordinates>> {
    path.map(|p| dimacs::read_co_file(p, n).with_context(|| format!("reading coordinates {}", p.display())))
        .transpose()
}

fn read_partition(path: &Path, n: usize) -> Result<MultilevelPartition> {
    let f = File::open(path).with_context(|| format!("opening partition {}", path.display()))?;
    Ok(MultilevelPartition::read(BufReader::new(f), n)?)
}

fn absolute(p: &Path) -> Result<PathBuf> {
    std::fs::canonicalize(p).with_context(|| format!("resolving {}", p.display()))
}

fn names(list: &str) -> Vec<String> {
    if list.trim() == "all" {
        return ALGORITHMS.iter().map(|a| a.to_string()).collect();
    }
    list.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

/// Builds the engine once to validate and time it, then records the inputs
/// in a manifest.
fn write_manifest(
    graph: &Path,
    g: RoadGraph,
    coords: Option<&Path>,
    partition: Option<&Path>,
    spec: EngineSpec,
    threads: usize,
    out: &Path,
) -> Result<()> {
    let g = Arc::new(g);
    let n = g.num_vertices();
    let c = read_coords(coords, n)?;
    let p = partition.map(|p| read_partition(p, n)).transpose()?;
    let t = Instant::now();
    build_engines(
        std::slice::from_ref(&spec),
        &EngineInputs {
            graph: &g,
            coords: c.as_ref(),
            partition: p.as_ref(),
            threads,
        },
    )
    .with_context(|| format!("building {}", spec.name()))?;
    log::info!("built {} in {:.1?}", spec.name(), t.elapsed());
    let manifest = Manifest {
        graph: absolute(graph)?,
        coords: coords.map(absolute).transpose()?,
        partition: partition.map(absolute).transpose()?,
        engines: vec![spec],
    };
    manifest.write(out)?;
    log::info!("wrote {}", out.display());
    Ok(())
}

pub fn build_partition(graph: &Path, coords: Option<&Path>, sizes: &[usize], out: &Path) -> Result<()> {
    let g = read_graph(graph)?;
    let c = read_coords(coords, g.num_vertices())?;
    let t = Instant::now();
    let p = MultilevelPartition::build(&g, c.as_ref(), sizes)?;
    for l in 1..=p.num_levels() {
        log::info!("level {l}: {} cells", p.num_cells(l));
    }
    log::info!("partitioned in {:.1?}", t.elapsed());
    let mut w = BufWriter::new(File::create(out)?);
    p.write(&mut w)?;
    w.flush()?;
    Ok(())
}

pub struct CustomizeArgs {
    pub graph: PathBuf,
    pub partition: PathBuf,
    pub algo: String,
    pub ecc_mode: String,
    pub reduce: bool,
    pub coords: Option<PathBuf>,
    pub threads: usize,
    pub out: PathBuf,
}

pub fn customize(a: CustomizeArgs) -> Result<()> {
    let ecc_mode: EccMode = a.ecc_mode.parse()?;
    let spec = match a.algo.as_str() {
        "isocrp" | "crp" => EngineSpec::Crp { ecc_mode },
        "isograsp" | "grasp" => EngineSpec::Grasp {
            ecc_mode,
            reduce: a.reduce,
        },
        other => bail!("customize supports isocrp and isograsp, not '{other}'"),
    };
    let g = read_graph(&a.graph)?;
    write_manifest(&a.graph, g, a.coords.as_deref(), Some(&a.partition), spec, a.threads, &a.out)
}

pub struct PreproArgs {
    pub graph: PathBuf,
    pub partition: Option<PathBuf>,
    pub algo: String,
    pub cells: Option<usize>,
    pub compress: Option<usize>,
    pub flag_rule: String,
    pub coords: Option<PathBuf>,
    pub threads: usize,
    pub out: PathBuf,
}

pub fn prepro(a: PreproArgs) -> Result<()> {
    ensure!(
        a.cells.is_some() || a.partition.is_some(),
        "give --cells or a --partition whose level 1 holds the cells"
    );
    ensure!(a.cells != Some(0), "--cells must be positive");
    let cells = a.cells;
    let g = read_graph(&a.graph)?;
    let spec = match a.algo.as_str() {
        "cd" | "isophast-cd" => EngineSpec::PhastCd { cells },
        "cp" | "isophast-cp" => EngineSpec::PhastCp {
            cells,
            flag_rule: a.flag_rule.parse::<FlagRule>()?,
        },
        "dt" | "isophast-dt" => {
            let compress = a.compress.unwrap_or_else(|| default_compress(g.num_vertices()));
            EngineSpec::PhastDt { cells, compress }
        }
        other => bail!("prepro supports cd, cp and dt, not '{other}'"),
    };
    let partition = if a.cells.is_some() { None } else { a.partition.as_deref() };
    write_manifest(&a.graph, g, a.coords.as_deref(), partition, spec, a.threads, &a.out)
}

fn load(data: &Path, algos: &[String], threads: usize) -> Result<isochrone::engine::DataSet> {
    let manifest = Manifest::open(data).with_context(|| format!("reading {}", data.display()))?;
    let t = Instant::now();
    let set = manifest.load(Some(algos), threads)?;
    log::info!(
        "loaded {} on {} vertices in {:.1?}",
        algos.join(","),
        set.graph.num_vertices(),
        t.elapsed()
    );
    Ok(set)
}

pub fn query(data: &Path, algo: &str, source: usize, tau_min: u32, threads: usize, geojson: bool) -> Result<()> {
    let set = load(data, &[algo.to_string()], threads)?;
    let n = set.graph.num_vertices();
    ensure!((1..=n).contains(&source), "source {source} outside 1..={n}");
    let tau = minutes_to_seconds(&[tau_min])?[0];
    let engine = &set.engines[0];
    let t = Instant::now();
    let (edges, stats) = engine.query_with_stats(source - 1, tau, threads);
    let ms = t.elapsed().as_secs_f64() * 1e3;
    log::info!(
        "{}: {} edges, {} settled, {} active cells, {:.3} ms",
        engine.name(),
        edges.len(),
        stats.settled,
        stats.active_cells,
        ms
    );
    let mut out = std::io::stdout().lock();
    if geojson {
        let coords = set.coords.as_ref().context("--geojson needs coordinates in the data set")?;
        let fc = isochrone_service::geojson::feature_collection(
            &set.graph,
            coords,
            &edges,
            source - 1,
            tau as u64,
            engine.name(),
            ms,
        );
        writeln!(out, "{}", serde_json::to_string(&fc)?)?;
    } else {
        out.write_all(edges.to_text(&set.graph).as_bytes())?;
    }
    Ok(())
}

pub fn verify(
    graph: &Path,
    coords: Option<&Path>,
    algos: &str,
    queries: usize,
    seed: u64,
    tau_min: &[u32],
    threads: usize,
) -> Result<()> {
    let g = read_graph(graph)?;
    let c = read_coords(coords, g.num_vertices())?;
    let (g, c) = if g.is_strongly_connected() {
        (g, c)
    } else {
        let (sub, sub_c, _) = restrict_to_largest_scc(&g, c.as_ref());
        log::warn!(
            "graph is not strongly connected; verifying on its largest component ({} of {} vertices)",
            sub.num_vertices(),
            g.num_vertices()
        );
        (sub, sub_c)
    };
    let g = Arc::new(g);
    let specs = EngineSpec::parse_list(algos, g.num_vertices())?;
    let t = Instant::now();
    let engines = build_engines(
        &specs,
        &EngineInputs {
            graph: &g,
            coords: c.as_ref(),
            partition: None,
            threads,
        },
    )?;
    log::info!("built {} engines in {:.1?}", engines.len(), t.elapsed());
    let taus = minutes_to_seconds(tau_min)?;
    let w = gen_workload(g.num_vertices(), queries, seed, &taus)?;
    let refs: Vec<&dyn IsochroneAlgorithm<u32>> = engines.iter().map(|e| e.as_ref()).collect();
    let t = Instant::now();
    let report = workload::verify(&g, &refs, &w, threads);
    match report.mismatch {
        None => {
            println!(
                "PASS {} checks ({} queries x {} algorithms) in {:.1?}",
                report.checked,
                w.queries.len(),
                refs.len(),
                t.elapsed()
            );
            Ok(())
        }
        Some(m) => {
            println!(
                "FAIL {} source={} tau_s={}: {} missing, {} extra",
                m.algo,
                m.source + 1,
                m.tau_s,
                m.missing.len(),
                m.extra.len()
            );
            for (e, d) in m.missing.iter().take(10) {
                println!("  missing {} {} {}", g.tail(*e) + 1, g.head(*e) + 1, d);
            }
            for (e, d) in m.extra.iter().take(10) {
                println!("  extra {} {} {}", g.tail(*e) + 1, g.head(*e) + 1, d);
            }
            bail!("{} disagrees with the oracle", m.algo)
        }
    }
}

#[allow(clippy::too_many_arguments)]
pub fn bench(
    data: &Path,
    algos: &str,
    queries: usize,
    seed: u64,
    tau_min: &[u32],
    threads: usize,
    csv: Option<&Path>,
) -> Result<()> {
    let algos = names(algos);
    ensure!(!algos.is_empty(), "no algorithm given");
    let set = load(data, &algos, threads)?;
    let taus = minutes_to_seconds(tau_min)?;
    let w = gen_workload(set.graph.num_vertices(), queries, seed, &taus)?;
    let refs: Vec<&dyn IsochroneAlgorithm<u32>> = set.engines.iter().map(|e| e.as_ref()).collect();
    let rows = workload::bench(&refs, &w, threads);
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for r in &rows {
        text.push_str(&r.csv_row());
        text.push('\n');
    }
    match csv {
        Some(path) => {
            std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
            for r in &rows {
                log::info!(
                    "{:<12} tau={:>6}s median {:>9.3} ms, {} settled",
                    r.algo,
                    r.tau_s,
                    r.t_total_ms,
                    r.settled
                );
            }
        }
        None => print!("{text}"),
    }
    Ok(())
}

pub struct ServeArgs {
    pub data: Option<PathBuf>,
    pub coords: Option<PathBuf>,
    pub algo: Option<String>,
    pub port: Option<u16>,
    pub threads: Option<usize>,
    pub config: Option<PathBuf>,
}

pub fn serve(a: ServeArgs) -> Result<()> {
    let mut config = match (&a.config, &a.data) {
        (Some(path), _) => ServiceConfig::read(path)?,
        (None, Some(data)) => ServiceConfig::new(data.clone()),
        (None, None) => bail!("give --data or --config"),
    };
    if let Some(d) = a.data {
        config.data = d;
    }
    if a.coords.is_some() {
        config.coords = a.coords;
    }
    if let Some(list) = a.algo {
        config.algorithms = names(&list);
    }
    if let Some(p) = a.port {
        config.port = p;
    }
    if let Some(t) = a.threads {
        ensure!(t > 0, "--threads must be positive");
        config.threads = t;
    }
    let rt = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    rt.block_on(isochrone_service::run(config))?;
    Ok(())
}

pub fn synth(vertices: usize, seed: u64, out: &Path) -> Result<()> {
    let t = Instant::now();
    let (g, c) = road_network(&SynthParams::square(vertices, seed))?;
    let mut w = BufWriter::new(File::create(out)?);
    dimacs::write_gr(&g, &mut w)?;
    w.flush()?;
    let co = out.with_extension("co");
    let mut w = BufWriter::new(File::create(&co)?);
    dimacs::write_co(&c, &mut w)?;
    w.flush()?;
    log::info!(
        "wrote {} vertices and {} edges to {} and {} in {:.1?}",
        g.num_vertices(),
        g.num_edges(),
        out.display(),
        co.display(),
        t.elapsed()
    );
    Ok(())
}
