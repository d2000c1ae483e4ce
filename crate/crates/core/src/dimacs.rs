//! DIMACS shortest-path text formats (`.gr` graphs, `.co` coordinates).
//!
//! Vertex ids are 1-based in files and 0-based in memory.

use std::io::{BufRead, Write};

use crate::coords::Coordinates;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::weight::Weight;

fn field<'a>(it: &mut impl Iterator<Item = &'a str>, line: usize, what: &str) -> Result<&'a str> {
    it.next()
        .ok_or_else(|| Error::parse(line, format!("missing {what}")))
}

fn int(tok: &str, line: usize, what: &str) -> Result<i64> {
    tok.parse::<i64>()
        .map_err(|_| Error::parse(line, format!("bad {what} '{tok}'")))
}

fn vertex(tok: &str, n: usize, line: usize) -> Result<u32> {
    let id = int(tok, line, "vertex id")?;
    if id < 1 || id as u64 > n as u64 {
        return Err(Error::validation(format!(
            "line {line}: vertex {id} out of range 1..={n}"
        )));
    }
    Ok((id - 1) as u32)
}

/// Parses a `.gr` stream into canonical form.
pub fn parse_gr<W: Weight, R: BufRead>(reader: R) -> Result<Graph<W>> {
    let mut n: Option<usize> = None;
    let mut edges = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") => {}
            Some("p") => {
                if n.is_some() {
                    return Err(Error::parse(line_no, "duplicate problem line"));
                }
                if field(&mut toks, line_no, "problem kind")? != "sp" {
                    return Err(Error::parse(line_no, "expected 'p sp <n> <m>'"));
                }
                let nv = int(field(&mut toks, line_no, "vertex count")?, line_no, "vertex count")?;
                let m = int(field(&mut toks, line_no, "edge count")?, line_no, "edge count")?;
                if nv < 0 || m < 0 {
                    return Err(Error::parse(line_no, "negative size"));
                }
                n = Some(nv as usize);
                edges.reserve(m as usize);
            }
            Some("a") => {
                let nv = n.ok_or_else(|| Error::parse(line_no, "arc before problem line"))?;
                let u = vertex(field(&mut toks, line_no, "tail")?, nv, line_no)?;
                let v = vertex(field(&mut toks, line_no, "head")?, nv, line_no)?;
                let w = int(field(&mut toks, line_no, "weight")?, line_no, "weight")?;
                if w < 0 {
                    return Err(Error::validation(format!("line {line_no}: negative weight {w}")));
                }
                let w = W::from_u64(w as u64).ok_or_else(|| {
                    Error::validation(format!("line {line_no}: weight {w} too large"))
                })?;
                edges.push((u, v, w));
            }
            Some(tag) => return Err(Error::parse(line_no, format!("unknown line type '{tag}'"))),
        }
    }
    let n = n.ok_or_else(|| Error::parse(0, "missing problem line"))?;
    Graph::from_edges(n, edges)
}

pub fn write_gr<W: Weight, Wr: Write>(graph: &Graph<W>, mut out: Wr) -> Result<()> {
    writeln!(out, "p sp {} {}", graph.num_vertices(), graph.num_edges())?;
    for (u, v, w) in graph.edges() {
        writeln!(out, "a {} {} {}", u + 1, v + 1, w)?;
    }
    Ok(())
}

/// Parses a `.co` stream for a graph with `n` vertices.
pub fn parse_co<R: BufRead>(reader: R, n: usize) -> Result<Coordinates> {
    let mut points: Vec<Option<(i32, i32)>> = vec![None; n];
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line?;
        let mut toks = line.split_whitespace();
        match toks.next() {
            None | Some("c") | Some("p") => {}
            Some("v") => {
                let v = vertex(field(&mut toks, line_no, "vertex id")?, n, line_no)? as usize;
                let x = int(field(&mut toks, line_no, "x")?, line_no, "x")?;
                let y = int(field(&mut toks, line_no, "y")?, line_no, "y")?;
                if points[v].is_some() {
                    return Err(Error::validation(format!(
                        "line {line_no}: duplicate coordinate for vertex {}",
                        v + 1
                    )));
                }
                let x = i32::try_from(x).map_err(|_| Error::parse(line_no, "x out of range"))?;
                let y = i32::try_from(y).map_err(|_| Error::parse(line_no, "y out of range"))?;
                points[v] = Some((x, y));
            }
            Some(tag) => return Err(Error::parse(line_no, format!("unknown line type '{tag}'"))),
        }
    }
    let mut out = Vec::with_capacity(n);
    for (v, p) in points.into_iter().enumerate() {
        out.push(p.ok_or_else(|| Error::validation(format!("missing coordinate for vertex {}", v + 1)))?);
    }
    Coordinates::from_micro(out)
}

pub fn write_co<Wr: Write>(coords: &Coordinates, mut out: Wr) -> Result<()> {
    writeln!(out, "p aux sp co {}", coords.len())?;
    for v in 0..coords.len() {
        writeln!(out, "v {} {} {}", v + 1, coords.lon_micro(v), coords.lat_micro(v))?;
    }
    Ok(())
}

pub fn read_gr_file<W: Weight>(path: &std::path::Path) -> Result<Graph<W>> {
    let f = std::fs::File::open(path)?;
    parse_gr(std::io::BufReader::new(f))
}

pub fn read_co_file(path: &std::path::Path, n: usize) -> Result<Coordinates> {
    let f = std::fs::File::open(path)?;
    parse_co(std::io::BufReader::new(f), n)
}
