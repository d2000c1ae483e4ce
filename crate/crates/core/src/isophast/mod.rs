//! isoPHAST: contraction-based isochrone engines.
//!
//! CD and CP contract every cell interior and keep the cell boundaries as a
//! core. CD runs isoDijkstra on the core, CP contracts the core as well and
//! sweeps it. DT contracts everything and decides which cells to sweep from
//! a table of distance bounds between cells of an edge partition.

mod core;
mod dt;

pub use self::core::{CoreIsoPhast, CoreStrategy, FlagRule, IsoPhastCore, PhastOptions};
pub use self::dt::{DistanceBoundsTable, DtIsoPhast, DtOptions, IsoPhastDt};

#[cfg(test)]
mod tests;
