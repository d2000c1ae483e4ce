use std::path::PathBuf;

use anyhow::Result;
use clap::{Parser, Subcommand};

mod commands;

#[derive(Parser)]
#[command(name = "isochrone", version, about = "Isochrone queries on road networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Multilevel partition of a graph by recursive geometric bisection
    BuildPartition {
        /// DIMACS .gr file
        #[arg(long)]
        graph: PathBuf,
        /// DIMACS .co file
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Largest cell size per level, bottom level first
        #[arg(long, value_delimiter = ',', required = true)]
        max_cell_sizes: Vec<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Customize an overlay metric for isoCRP or isoGRASP
    Customize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        /// isocrp or isograsp
        #[arg(long)]
        algo: String,
        /// none, all, inf, scc, up, updown or sep
        #[arg(long, default_value = "sep")]
        ecc_mode: String,
        /// Keep dominated downward edges (isograsp)
        #[arg(long)]
        no_reduce: bool,
        /// Recorded in the data manifest for `serve`
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Data manifest to write
        #[arg(long)]
        out: PathBuf,
    },
    /// Preprocess an isoPHAST variant
    Prepro {
        #[arg(long)]
        graph: PathBuf,
        /// Level 1 gives the cells unless --cells is set
        #[arg(long)]
        partition: Option<PathBuf>,
        /// cd, cp or dt
        #[arg(long)]
        algo: String,
        /// Number of cells from geometric bisection
        #[arg(long)]
        cells: Option<usize>,
        /// Size of the compressed top graph (dt)
        #[arg(long)]
        compress: Option<usize>,
        /// Core flag rule (cp): exact or relaxed
        #[arg(long, default_value = "exact")]
        flag_rule: String,
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one query and print the isochrone edges
    Query {
        /// Data manifest, or a .gr file for default parameters
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "isodijkstra")]
        algo: String,
        /// 1-based vertex id
        #[arg(long)]
        source: usize,
        #[arg(long)]
        tau_min: u32,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Print GeoJSON instead of `tail head direction` lines
        #[arg(long)]
        geojson: bool,
    },
    /// Compare algorithms against the Dijkstra oracle on random queries
    Verify {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        coords: Option<PathBuf>,
        #[arg(long, default_value = "all")]
        algos: String,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "10,100,500")]
        tau_min_list: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Time algorithms on a reproducible workload
    Bench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "all")]
        algos: String,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_value = "10,100,500")]
        tau_min_list: Vec<u32>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// HTTP GeoJSON service
    Serve {
        /// Data manifest, or a .gr file for default parameters
        #[arg(long, required_unless_present = "config")]
        data: Option<PathBuf>,
        #[arg(long)]
        coords: Option<PathBuf>,
        /// Comma-separated algorithms to load, or `all`
        #[arg(long)]
        algo: Option<String>,
        #[arg(long)]
        port: Option<u16>,
        #[arg(long)]
        threads: Option<usize>,
        /// TOML config; flags override its values
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Generate a synthetic road network
    Synth {
        #[arg(long)]
        vertices: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output .gr file; the .co file is written next to it
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match Cli::parse().command {
        Command::BuildPartition {
            graph,
            coords,
            max_cell_sizes,
            out,
        } => commands::build_partition(&graph, coords.as_deref(), &max_cell_sizes, &out),
        Command::Customize {
            graph,
            partition,
            algo,
            ecc_mode,
            no_reduce,
            coords,
            threads,
            out,
        } => commands::customize(commands::CustomizeArgs {
            graph,
            partition,
            algo,
            ecc_mode,
            reduce: !no_reduce,
            coords,
            threads,
            out,
        }),
        Command::Prepro {
            graph,
            partition,
            algo,
            cells,
            compress,
            flag_rule,
            coords,
            threads,
            out,
        } => commands::prepro(commands::PreproArgs {
            graph,
            partition,
            algo,
            cells,
            compress,
            flag_rule,
            coords,
            threads,
            out,
        }),
        Command::Query {
            data,
            algo,
            source,
            tau_min,
            threads,
            geojson,
        } => commands::query(&data, &algo, source, tau_min, threads, geojson),
        Command::Verify {
            graph,
            coords,
            algos,
            queries,
            seed,
            tau_min_list,
            threads,
        } => commands::verify(&graph, coords.as_deref(), &algos, queries, seed, &tau_min_list, threads),
        Command::Bench {
            data,
            algos,
            queries,
            seed,
            tau_min_list,
            threads,
            csv,
        } => commands::bench(&data, &algos, queries, seed, &tau_min_list, threads, csv.as_deref()),
        Command::Serve {
            data,
            coords,
            algo,
            port,
            threads,
            config,
        } => commands::serve(commands::ServeArgs {
            data,
            coords,
            algo,
            port,
            threads,
            config,
        }),
        Command::Synth { vertices, seed, out } => commands::synth(vertices, seed, &out),
    }
}
