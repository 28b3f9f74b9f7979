//! CSV and legacy-ASCII VTK writers.

use std::fmt::Write as _;

use crate::benchmarks::{EigenTableRow, Rates, RunResult, SweepPoint};
use crate::error::{Error, Result};
use crate::geometry::QuadMesh;

pub const CSV_HEADER: &str = "case,method,mesh,h,ndof,errL2,errEnergy,errHydro,cond,tip";

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.10e}")).unwrap_or_default()
}

pub fn csv_row(r: &RunResult) -> String {
    format!(
        "{},{},{},{:.10e},{},{},{},{},{},{}",
        r.case,
        r.method,
        r.mesh_label,
        r.h,
        r.ndof,
        opt(r.errors.l2),
        opt(r.errors.energy),
        opt(r.errors.hydrostatic),
        opt(r.cond),
        opt(r.tip),
    )
}

/// Header, one row per run, then `# rate` lines for the fitted norms.
pub fn convergence_csv(runs: &[RunResult], rates: Option<&Rates>) -> String {
    let mut s = String::new();
    s.push_str(CSV_HEADER);
    s.push('\n');
    for r in runs {
        s.push_str(&csv_row(r));
        s.push('\n');
    }
    if let Some(rates) = rates {
        for (name, fit) in [("errL2", rates.l2), ("errEnergy", rates.energy), ("errHydro", rates.hydrostatic)] {
            if let Some(f) = fit {
                let _ = writeln!(s, "# rate {name} {:.4} residual {:.3e}", f.rate, f.residual);
            }
        }
    }
    s
}

pub fn eigen_table_csv(rows: &[EigenTableRow]) -> String {
    let mut s = String::from("mode,angle,fourth,largest\n");
    for r in rows {
        let _ = writeln!(s, "{},{:.10e},{:.10e},{:.10e}", r.mode.name(), r.angle, r.fourth, r.largest);
    }
    s
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from("g1,g2,fourth\n");
    for p in points {
        let _ = writeln!(s, "{:.10e},{:.10e},{:.10e}", p.g1, p.g2, p.fourth);
    }
    if let Some(m) = crate::benchmarks::sweep_minimum(points) {
        let _ = writeln!(s, "# min {:.10e} at {:.10e},{:.10e}", m.fourth, m.g1, m.g2);
    }
    s
}

/// Legacy ASCII unstructured grid with nodal displacement and element
/// scalars.
pub fn vtk_string(
    mesh: &QuadMesh,
    title: &str,
    displacement: &[f64],
    cell_scalars: &[(&str, &[f64])],
) -> Result<String> {
    let (nn, ne) = (mesh.n_nodes(), mesh.n_elements());
    if displacement.len() != 2 * nn {
        return Err(Error::DimensionMismatch(format!(
            "{} displacement values for {nn} nodes",
            displacement.len()
        )));
    }
    for (name, v) in cell_scalars {
        if v.len() != ne || name.is_empty() || name.contains(char::is_whitespace) {
            return Err(Error::DimensionMismatch(format!("cell field {name:?} has {} values for {ne} cells", v.len())));
        }
    }
    let mut s = String::new();
    s.push_str("# vtk DataFile Version 3.0\n");
    let title: String = title.chars().filter(|c| *c != '\n').take(255).collect();
    let _ = writeln!(s, "{title}");
    s.push_str("ASCII\nDATASET UNSTRUCTURED_GRID\n");
    let _ = writeln!(s, "POINTS {nn} double");
    for p in mesh.nodes() {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", p.x, p.y);
    }
    let _ = writeln!(s, "CELLS {ne} {}", 5 * ne);
    for c in mesh.elements() {
        let _ = writeln!(s, "4 {} {} {} {}", c[0], c[1], c[2], c[3]);
    }
    let _ = writeln!(s, "CELL_TYPES {ne}");
    for _ in 0..ne {
        s.push_str("9\n");
    }
    let _ = writeln!(s, "POINT_DATA {nn}");
    s.push_str("VECTORS displacement double\n");
    for i in 0..nn {
        let _ = writeln!(s, "{:.16e} {:.16e} 0", displacement[2 * i], displacement[2 * i + 1]);
    }
    if !cell_scalars.is_empty() {
        let _ = writeln!(s, "CELL_DATA {ne}");
        for (name, v) in cell_scalars {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for x in *v {
                let _ = writeln!(s, "{x:.16e}");
            }
        }
    }
    Ok(s)
}

/// VTK file for a benchmark solve: displacement, element hydrostatic
/// stress, and trace of the projected strain.
pub fn run_vtk(mesh: &QuadMesh, r: &RunResult) -> Result<String> {
    let trace = r.element_trace();
    vtk_string(
        mesh,
        &format!("{} {} {}", r.case, r.method, r.mesh_label),
        &r.solution.u,
        &[("hydrostatic", &r.element_hydrostatic), ("trace_strain", &trace)],
    )
}

/// What a legacy VTK file declares.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VtkSummary {
    pub n_points: usize,
    pub n_cells: usize,
    pub point_vectors: Vec<String>,
    pub cell_scalars: Vec<String>,
}

/// Check a legacy-ASCII unstructured-grid quad file against the grammar the
/// writer emits: header, counts, connectivity bounds, cell types, and data
/// section sizes.
pub fn validate_vtk(text: &str) -> Result<VtkSummary> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let bad = |line: usize, msg: &str| Error::Parse { line, msg: msg.to_string() };
    let mut next = |what: &str| lines.next().ok_or_else(|| bad(0, &format!("unexpected end of file, expected {what}")));

    let (n, l) = next("header")?;
    if !l.starts_with("# vtk DataFile Version") {
        return Err(bad(n, "missing vtk header"));
    }
    next("title")?;
    let (n, l) = next("format")?;
    if l != "ASCII" {
        return Err(bad(n, "expected ASCII"));
    }
    let (n, l) = next("dataset")?;
    if l != "DATASET UNSTRUCTURED_GRID" {
        return Err(bad(n, "expected DATASET UNSTRUCTURED_GRID"));
    }
    let count = |n: usize, l: &str, kw: &str, extra: usize| -> Result<Vec<usize>> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.first() != Some(&kw) || toks.len() < 2 + extra {
            return Err(bad(n, &format!("expected {kw}")));
        }
        toks[1..2 + extra]
            .iter()
            .map(|t| t.parse::<usize>().map_err(|_| bad(n, &format!("bad count in {kw}"))))
            .collect()
    };
    let floats = |n: usize, l: &str, k: usize| -> Result<()> {
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.len() != k || toks.iter().any(|t| t.parse::<f64>().map(|v| !v.is_finite()).unwrap_or(true)) {
            return Err(bad(n, &format!("expected {k} finite numbers")));
        }
        Ok(())
    };

    let (n, l) = next("POINTS")?;
    let np = count(n, l, "POINTS", 0)?[0];
    if !l.ends_with("double") && !l.ends_with("float") {
        return Err(bad(n, "POINTS needs a data type"));
    }
    for _ in 0..np {
        let (n, l) = next("point")?;
        floats(n, l, 3)?;
    }
    let (n, l) = next("CELLS")?;
    let c = count(n, l, "CELLS", 1)?;
    let (nc, size) = (c[0], c[1]);
    let mut seen = 0;
    for _ in 0..nc {
        let (n, l) = next("cell")?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad(n, "bad cell index")))
            .collect::<Result<_>>()?;
        if ids.len() != 5 || ids[0] != 4 || ids[1..].iter().any(|&i| i >= np) {
            return Err(bad(n, "cell must be 4 valid point indices"));
        }
        seen += ids.len();
    }
    if seen != size {
        return Err(bad(n, "CELLS size does not match its entries"));
    }
    let (n, l) = next("CELL_TYPES")?;
    if count(n, l, "CELL_TYPES", 0)?[0] != nc {
        return Err(bad(n, "CELL_TYPES count mismatch"));
    }
    for _ in 0..nc {
        let (n, l) = next("cell type")?;
        if l != "9" {
            return Err(bad(n, "cell type must be 9 (VTK_QUAD)"));
        }
    }
    let mut summary = VtkSummary {
        n_points: np,
        n_cells: nc,
        point_vectors: Vec::new(),
        cell_scalars: Vec::new(),
    };
    let mut section: Option<usize> = None;
    while let Some((n, l)) = lines.next() {
        if l.is_empty() {
            continue;
        }
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks[0] {
            "POINT_DATA" => {
                if count(n, l, "POINT_DATA", 0)?[0] != np {
                    return Err(bad(n, "POINT_DATA count mismatch"));
                }
                section = Some(np);
            }
            "CELL_DATA" => {
                if count(n, l, "CELL_DATA", 0)?[0] != nc {
                    return Err(bad(n, "CELL_DATA count mismatch"));
                }
                section = Some(nc);
            }
            "VECTORS" if section == Some(np) && toks.len() == 3 => {
                for _ in 0..np {
                    let (n, l) = lines.next().ok_or_else(|| bad(n, "truncated VECTORS"))?;
                    floats(n, l, 3)?;
                }
                summary.point_vectors.push(toks[1].to_string());
            }
            "SCALARS" if section.is_some() && (3..=4).contains(&toks.len()) => {
                let len = section.unwrap();
                let (n2, lt) = lines.next().ok_or_else(|| bad(n, "missing LOOKUP_TABLE"))?;
                if !lt.starts_with("LOOKUP_TABLE") {
                    return Err(bad(n2, "expected LOOKUP_TABLE"));
                }
                for _ in 0..len {
                    let (n, l) = lines.next().ok_or_else(|| bad(n, "truncated SCALARS"))?;
                    floats(n, l, 1)?;
                }
                if len == nc && section == Some(nc) {
                    summary.cell_scalars.push(toks[1].to_string());
                }
            }
            _ => return Err(bad(n, &format!("unexpected line {l:?}"))),
        }
    }
    Ok(summary)
}
