//! Small hand-checkable instances used by tests, verification and the
//! service demo. Vertex names in comments are 1-based as in DIMACS files.

use crate::coords::Coordinates;
use crate::dimacs;
use crate::graph::Graph;

/// Directed 4-cycle with a chord. Distances from vertex 1: 0, 2, 5, 9.
pub const TG1_GR: &str = "p sp 4 5\na 1 2 2\na 2 3 3\na 3 4 4\na 4 1 1\na 1 3 10\n";

/// Six vertices s, u, x, v, w, z where w is reached both directly from u
/// and through the detour u, x, v. At limit 4 only z is out of range, so
/// `v -> w` is not an isochrone edge.
pub const TG2_GR: &str = "p sp 6 7\n\
a 1 2 2\na 2 3 1\na 3 4 1\na 2 5 2\na 4 5 1\na 5 6 5\na 6 1 1\n";

/// Two unit 3-cycles {1,2,3} and {4,5,6} joined by 3->4 and 6->1 (length 2).
pub const TG3_GR: &str = "p sp 6 8\n\
a 1 2 1\na 2 3 1\na 3 1 1\na 4 5 1\na 5 6 1\na 6 4 1\na 3 4 2\na 6 1 2\n";

/// s=1, a=2, t=3, b=4, m=5, y=6. The cell {a, t, b, m} has a short tunnel
/// a-t-b and a summit m five away from both portals. From s the summit is
/// at distance 6 while every other vertex is within 2.
pub const TG3_MOUNTAIN_GR: &str = "p sp 6 14\n\
a 1 2 1\na 2 3 1\na 3 4 1\na 4 6 1\na 6 1 1\na 2 5 5\na 5 4 5\n\
a 3 2 1\na 4 3 1\na 4 5 5\na 5 2 5\na 2 1 1\na 6 4 1\na 1 6 1\n";

fn load(text: &str) -> Graph<u32> {
    dimacs::parse_gr(text.as_bytes()).expect("fixture parses")
}

fn coords(deg: &[(f64, f64)]) -> Coordinates {
    Coordinates::from_degrees(deg).expect("fixture coordinates")
}

pub fn tg1() -> Graph<u32> {
    load(TG1_GR)
}

/// Vertices on a west-east line, so median bisection yields {1,2} | {3,4}.
pub fn tg1_coords() -> Coordinates {
    coords(&[(13.40, 52.50), (13.41, 52.50), (13.42, 52.50), (13.43, 52.50)])
}

pub fn tg2() -> Graph<u32> {
    load(TG2_GR)
}

pub fn tg2_coords() -> Coordinates {
    coords(&[
        (13.40, 52.50),
        (13.41, 52.50),
        (13.42, 52.51),
        (13.43, 52.51),
        (13.43, 52.50),
        (13.41, 52.49),
    ])
}

/// Level-1 cells of TG2 that separate the detour from the direct road.
pub fn tg2_cells() -> Vec<u32> {
    vec![0, 0, 1, 1, 1, 0]
}

pub fn tg3() -> Graph<u32> {
    load(TG3_GR)
}

pub fn tg3_coords() -> Coordinates {
    coords(&[
        (13.400, 52.500),
        (13.401, 52.502),
        (13.402, 52.500),
        (13.410, 52.500),
        (13.411, 52.502),
        (13.412, 52.500),
    ])
}

/// Cells {1,2,3} and {4,5,6}.
pub fn tg3_cells() -> Vec<u32> {
    vec![0, 0, 0, 1, 1, 1]
}

pub fn tg3_mountain() -> Graph<u32> {
    load(TG3_MOUNTAIN_GR)
}

pub fn tg3_mountain_coords() -> Coordinates {
    coords(&[
        (13.400, 52.500),
        (13.410, 52.500),
        (13.420, 52.500),
        (13.430, 52.500),
        (13.420, 52.520),
        (13.415, 52.490),
    ])
}

/// Cells {s, y} and the mountain {a, t, b, m}.
pub fn tg3_mountain_cells() -> Vec<u32> {
    vec![0, 1, 1, 1, 1, 0]
}

/// Named fixture with its preferred level-1 cells.
pub struct Fixture {
    pub name: &'static str,
    pub graph: Graph<u32>,
    pub coords: Coordinates,
    pub cells: Vec<u32>,
}

pub fn all() -> Vec<Fixture> {
    vec![
        Fixture {
            name: "TG1",
            graph: tg1(),
            coords: tg1_coords(),
            cells: vec![0, 0, 1, 1],
        },
        Fixture {
            name: "TG2",
            graph: tg2(),
            coords: tg2_coords(),
            cells: tg2_cells(),
        },
        Fixture {
            name: "TG3",
            graph: tg3(),
            coords: tg3_coords(),
            cells: tg3_cells(),
        },
        Fixture {
            name: "TG3-mountain",
            graph: tg3_mountain(),
            coords: tg3_mountain_coords(),
            cells: tg3_mountain_cells(),
        },
    ]
}
