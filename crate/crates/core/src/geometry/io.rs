//! Plain-text mesh files.
//!
//! ```text
//! nodes N elements M bedges B
//! x y            (N lines)
//! i0 i1 i2 i3    (M lines, 0-based, counterclockwise)
//! i j tag        (B lines)
//! ```

use std::fmt::Write as _;
use std::path::Path;

use super::mesh::{BoundaryEdge, QuadMesh};
use crate::error::{Error, Result};
use crate::Vec2;

pub fn read_mesh(path: impl AsRef<Path>) -> Result<QuadMesh> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn write_mesh(mesh: &QuadMesh, path: impl AsRef<Path>) -> Result<()> {
    let mut s = String::new();
    write_mesh_to(mesh, &mut s);
    std::fs::write(path, s)?;
    Ok(())
}

/// Serialize with 17 significant digits so that reading back is exact.
pub fn write_mesh_to(mesh: &QuadMesh, out: &mut String) {
    let _ = writeln!(
        out,
        "nodes {} elements {} bedges {}",
        mesh.n_nodes(),
        mesh.n_elements(),
        mesh.boundary_edges().len()
    );
    for p in mesh.nodes() {
        let _ = writeln!(out, "{:.16e} {:.16e}", p.x, p.y);
    }
    for c in mesh.elements() {
        let _ = writeln!(out, "{} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    for be in mesh.boundary_edges() {
        let _ = writeln!(out, "{} {} {}", be.a, be.b, be.tag);
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from {tok:?}")))
}

pub fn parse_mesh(text: &str) -> Result<QuadMesh> {
    // Blank lines are skipped but still counted for error messages.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty mesh file"))?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 6 || tok[0] != "nodes" || tok[2] != "elements" || tok[4] != "bedges" {
        return Err(parse_err(ln, "expected `nodes N elements M bedges B`"));
    }
    let n: usize = field(Some(tok[1]), ln, "node count")?;
    let m: usize = field(Some(tok[3]), ln, "element count")?;
    let b: usize = field(Some(tok[5]), ln, "boundary edge count")?;

    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(text.lines().count() + 1, format!("unexpected end of file, expected {what}")))
    };

    let mut nodes = Vec::with_capacity(n);
    for _ in 0..n {
        let (ln, l) = next("node")?;
        let mut it = l.split_whitespace();
        let x: f64 = field(it.next(), ln, "x")?;
        let y: f64 = field(it.next(), ln, "y")?;
        if it.next().is_some() {
            return Err(parse_err(ln, "trailing data after node coordinates"));
        }
        if !x.is_finite() || !y.is_finite() {
            return Err(parse_err(ln, "non-finite coordinate"));
        }
        nodes.push(Vec2::new(x, y));
    }
    let mut elements = Vec::with_capacity(m);
    for _ in 0..m {
        let (ln, l) = next("element")?;
        let mut it = l.split_whitespace();
        let mut conn = [0usize; 4];
        for c in conn.iter_mut() {
            *c = field(it.next(), ln, "node index")?;
            if *c >= n {
                return Err(parse_err(ln, format!("node index {c} out of range (mesh has {n} nodes)")));
            }
        }
        if it.next().is_some() {
            return Err(parse_err(ln, "element lines have exactly 4 indices"));
        }
        elements.push(conn);
    }
    let mut bedges = Vec::with_capacity(b);
    for _ in 0..b {
        let (ln, l) = next("boundary edge")?;
        let mut it = l.split_whitespace();
        let i: usize = field(it.next(), ln, "node index")?;
        let j: usize = field(it.next(), ln, "node index")?;
        let tag: String = field(it.next(), ln, "tag")?;
        if i >= n || j >= n {
            return Err(parse_err(ln, "boundary edge node index out of range"));
        }
        bedges.push(BoundaryEdge::new(i, j, tag));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "trailing content after declared records"));
    }
    QuadMesh::new(nodes, elements, bedges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{gen_perturbed, gen_structured_rect};

    #[test]
    fn round_trip() {
        let base = gen_structured_rect(5, 3, 2.0, 1.0).unwrap();
        let mesh = gen_perturbed(&base, 0.3, 11).unwrap();
        let mut s = String::new();
        write_mesh_to(&mesh, &mut s);
        assert_eq!(parse_mesh(&s).unwrap(), mesh);
    }

    #[test]
    fn file_round_trip() {
        let mesh = gen_structured_rect(2, 2, 1.0, 1.0).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        write_mesh(&mesh, &path).unwrap();
        assert_eq!(read_mesh(&path).unwrap(), mesh);
    }

    #[test]
    fn malformed_index_reports_line() {
        let text = "nodes 4 elements 1 bedges 0\n0 0\n1 0\n1 1\n0 1\n0 1 2 9\n";
        match parse_mesh(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 6),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_number_reports_line() {
        let text = "nodes 1 elements 0 bedges 0\n0 zero\n";
        match parse_mesh(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 2);
                assert!(msg.contains("zero"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn clockwise_element_names_element() {
        let text = "nodes 4 elements 1 bedges 0\n0 0\n1 0\n1 1\n0 1\n0 3 2 1\n";
        let err = parse_mesh(text).unwrap_err();
        assert!(err.to_string().contains("element 0"), "{err}");
    }
}
