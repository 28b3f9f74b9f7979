use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use shvem_core::benchmarks::cases::{DEFAULT_COLLAPSE, DEFAULT_NOTCH, DEFAULT_PERTURBATION};
use shvem_core::benchmarks::{
    default_eigen_table, eigen_sweep_angle, eigen_sweep_vertex, fit_rates, solve_case, BenchmarkCase, CaseKind,
    MeshFamily, RunResult,
};
use shvem_core::geometry::write_mesh_to;
use shvem_core::output::{convergence_csv, eigen_table_csv, run_vtk, sweep_csv};
use shvem_core::{Error, Method, QuadMesh};

#[derive(Parser)]
#[command(name = "shvem", version, about = "Plane-strain virtual element benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark mesh and write it in the plain-text mesh format.
    Mesh(MeshArgs),
    /// Solve a benchmark on one mesh or a ladder; CSV to stdout, VTK to --out.
    Run(RunArgs),
    /// Element eigenvalue table or distortion sweep.
    Eig(EigArgs),
    /// Solve a ladder and report observed convergence rates.
    Convergence(RunArgs),
}

#[derive(Args)]
struct MeshArgs {
    #[arg(long, value_parser = parse_case, default_value = "manufactured")]
    case: CaseKind,
    /// Mesh family with optional parameters, e.g. `perturbed:16:0.2`,
    /// `unstructured:1000`, `file:path.mesh`.
    #[arg(long, default_value = "structured")]
    mesh: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; the mesh goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    /// manufactured, beam, cook, plate, cylinder or punch.
    #[arg(long, value_parser = parse_case, default_value = "manufactured")]
    case: CaseKind,
    /// shvem, bbar or classic.
    #[arg(long, value_parser = parse_method, default_value = "shvem")]
    method: Method,
    /// Poisson ratio override, in [0, 0.5).
    #[arg(long, value_parser = parse_nu)]
    nu: Option<f64>,
    /// Mesh family and parameters, as for `shvem mesh`. Grid families take
    /// a base size (`structured:32`); a ladder doubles it per rung.
    #[arg(long, default_value = "structured")]
    mesh: String,
    /// Number of rungs, each doubling the resolution.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=8))]
    ladder: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also estimate the condition number of each reduced stiffness.
    #[arg(long)]
    cond: bool,
    /// Directory for the CSV and one VTK file per rung.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Sweep {
    Vertex,
    Angle,
}

#[derive(Args)]
struct EigArgs {
    #[arg(long, conflicts_with = "sweep", required_unless_present = "sweep")]
    table: bool,
    #[arg(long, value_enum)]
    sweep: Option<Sweep>,
    /// Grid points per axis for sweeps.
    #[arg(long, default_value_t = shvem_core::benchmarks::eigen::SWEEP_POINTS)]
    points: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_case(s: &str) -> Result<CaseKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_nu(s: &str) -> Result<f64, String> {
    let nu: f64 = s.parse().map_err(|_| format!("not a number: {s:?}"))?;
    if !(0.0..0.5).contains(&nu) {
        return Err(format!("nu must lie in [0, 0.5), got {nu}"));
    }
    Ok(nu)
}

/// A parsed `--mesh` value. `size` is the base size for grid families and
/// the element count for `unstructured`.
struct MeshSpec {
    family: MeshFamily,
    size: Option<usize>,
}

fn usage(msg: String) -> anyhow::Error {
    Error::InvalidArgument(msg).into()
}

fn parse_mesh_spec(s: &str, seed: u64) -> anyhow::Result<MeshSpec> {
    let mut parts = s.splitn(2, ':');
    let name = parts.next().unwrap_or_default();
    let rest = parts.next();
    if name == "file" {
        let path = rest.filter(|p| !p.is_empty()).ok_or_else(|| usage("file mesh needs a path".into()))?;
        return Ok(MeshSpec {
            family: MeshFamily::File(path.into()),
            size: None,
        });
    }
    let params: Vec<&str> = rest.map(|r| r.split(':').collect()).unwrap_or_default();
    let size = params
        .first()
        .map(|p| p.parse::<usize>().ok().filter(|&n| n > 0).ok_or_else(|| usage(format!("bad mesh size {p:?}"))))
        .transpose()?;
    let real = |default: f64| -> anyhow::Result<f64> {
        match params.get(1) {
            None => Ok(default),
            Some(p) => p.parse().map_err(|_| usage(format!("bad mesh parameter {p:?}"))),
        }
    };
    let max_params = match name {
        "perturbed" | "nonconvex" | "degenerate" => 2,
        _ => 1,
    };
    if params.len() > max_params {
        return Err(usage(format!("too many parameters in mesh spec {s:?}")));
    }
    let family = match name {
        "structured" => MeshFamily::Structured,
        "trapezoidal" => MeshFamily::Trapezoidal,
        "perturbed" => MeshFamily::Perturbed {
            magnitude: real(DEFAULT_PERTURBATION)?,
            seed,
        },
        "nonconvex" => MeshFamily::Nonconvex {
            notch: real(DEFAULT_NOTCH)?,
        },
        "degenerate" => MeshFamily::Degenerate {
            collapse: real(DEFAULT_COLLAPSE)?,
        },
        "unstructured" => MeshFamily::Unstructured {
            elements: size.unwrap_or(1000),
            seed,
        },
        _ => {
            return Err(usage(format!(
                "unknown mesh family {name:?} (expected structured, perturbed, nonconvex, trapezoidal, \
                 degenerate, unstructured or file)"
            )))
        }
    };
    Ok(MeshSpec { family, size })
}

/// Meshes for each rung with their base sizes.
fn ladder_meshes(case: &BenchmarkCase, spec: &MeshSpec, rungs: u32) -> anyhow::Result<Vec<(usize, QuadMesh)>> {
    if let MeshFamily::File(path) = &spec.family {
        if rungs > 1 {
            bail!(usage("a mesh file cannot be refined into a ladder".into()));
        }
        let mesh = case.mesh(&spec.family, 0).with_context(|| format!("reading {}", path.display()))?;
        return Ok(vec![(0, mesh)]);
    }
    (0..rungs)
        .map(|k| {
            let (family, n) = match spec.family {
                MeshFamily::Unstructured { elements, seed } => (
                    MeshFamily::Unstructured {
                        elements: elements << (2 * k),
                        seed,
                    },
                    0,
                ),
                ref f => (f.clone(), spec.size.unwrap_or(case.default_size) << k),
            };
            let mesh = case
                .mesh(&family, n)
                .with_context(|| format!("generating {} mesh for {} (size {n})", family.label(), case.name()))?;
            Ok((n, mesh))
        })
        .collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> anyhow::Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_mesh(a: MeshArgs) -> anyhow::Result<()> {
    let case = BenchmarkCase::new(a.case, None)?;
    let spec = parse_mesh_spec(&a.mesh, a.seed)?;
    let (n, mesh) = ladder_meshes(&case, &spec, 1)?.remove(0);
    let mut text = String::new();
    write_mesh_to(&mesh, &mut text);
    match a.out {
        Some(dir) => {
            let name = format!("{}_{}_{}.mesh", case.name(), spec.family.label().replace(['/', ':'], "_"), n);
            write_file(&dir, &name, &text)?;
            eprintln!("{} nodes, {} elements -> {}", mesh.n_nodes(), mesh.n_elements(), dir.join(name).display());
        }
        None => print!("{text}"),
    }
    Ok(())
}

fn solve_ladder(a: &RunArgs) -> anyhow::Result<(Vec<RunResult>, Vec<QuadMesh>)> {
    let case = BenchmarkCase::new(a.case, a.nu)?;
    let spec = parse_mesh_spec(&a.mesh, a.seed)?;
    let mut runs = Vec::new();
    let mut meshes = Vec::new();
    for (n, mesh) in ladder_meshes(&case, &spec, a.ladder)? {
        let r = solve_case(&case, &mesh, a.method, &spec.family.label(), a.cond).with_context(|| {
            format!(
                "{} with {} on {} mesh (size {n}, {} elements)",
                case.name(),
                a.method,
                spec.family.label(),
                mesh.n_elements()
            )
        })?;
        runs.push(r);
        meshes.push(mesh);
    }
    Ok((runs, meshes))
}

fn cmd_run(a: RunArgs) -> anyhow::Result<()> {
    let (runs, meshes) = solve_ladder(&a)?;
    let rates = (runs.len() >= 3).then(|| fit_rates(&runs));
    let csv = convergence_csv(&runs, rates.as_ref());
    print!("{csv}");
    if let Some(dir) = &a.out {
        let stem = format!("{}_{}", a.case.name(), a.method);
        write_file(dir, &format!("{stem}.csv"), &csv)?;
        for (k, (r, mesh)) in runs.iter().zip(&meshes).enumerate() {
            write_file(dir, &format!("{stem}_{k}.vtk"), &run_vtk(mesh, r)?)?;
        }
    }
    Ok(())
}

fn cmd_convergence(a: RunArgs) -> anyhow::Result<()> {
    if a.ladder < 3 {
        bail!(usage(format!("a rate needs at least 3 rungs, got --ladder {}", a.ladder)));
    }
    let (runs, _) = solve_ladder(&a)?;
    let rates = fit_rates(&runs);
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |x| format!("{x:.4e}"));
    let mut report = format!("{} {} on {} mesh\n", a.case.name(), a.method, runs[0].mesh_label);
    report.push_str(&format!("{:>10} {:>8} {:>12} {:>12} {:>12}\n", "h", "ndof", "errL2", "errEnergy", "errHydro"));
    for r in &runs {
        report.push_str(&format!(
            "{:>10.4e} {:>8} {:>12} {:>12} {:>12}\n",
            r.h,
            r.ndof,
            fmt(r.errors.l2),
            fmt(r.errors.energy),
            fmt(r.errors.hydrostatic)
        ));
    }
    for (name, fit) in [("L2", rates.l2), ("energy", rates.energy), ("hydrostatic", rates.hydrostatic)] {
        match fit {
            Some(f) => report.push_str(&format!("rate {name}: {:.3} (fit residual {:.2e})\n", f.rate, f.residual)),
            None => report.push_str(&format!("rate {name}: n/a\n")),
        }
    }
    print!("{report}");
    if let Some(dir) = &a.out {
        let stem = format!("{}_{}", a.case.name(), a.method);
        write_file(dir, &format!("{stem}_rates.csv"), &convergence_csv(&runs, Some(&rates)))?;
        write_file(dir, &format!("{stem}_rates.txt"), &report)?;
    }
    Ok(())
}

fn cmd_eig(a: EigArgs) -> anyhow::Result<()> {
    let (name, csv) = match a.sweep {
        None => ("eig_table.csv", eigen_table_csv(&default_eigen_table()?)),
        Some(s) => {
            if a.points < 2 {
                bail!(usage("a sweep needs at least 2 points per axis".into()));
            }
            match s {
                Sweep::Vertex => ("eig_sweep_vertex.csv", sweep_csv(&eigen_sweep_vertex(a.points)?)),
                Sweep::Angle => ("eig_sweep_angle.csv", sweep_csv(&eigen_sweep_angle(a.points)?)),
            }
        }
    };
    print!("{csv}");
    if let Some(dir) = &a.out {
        write_file(dir, name, &csv)?;
    }
    Ok(())
}

fn is_usage_error(e: &anyhow::Error) -> bool {
    e.chain()
        .any(|c| matches!(c.downcast_ref::<Error>(), Some(Error::InvalidArgument(_))))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mesh(a) => cmd_mesh(a),
        Command::Run(a) => cmd_run(a),
        Command::Eig(a) => cmd_eig(a),
        Command::Convergence(a) => cmd_convergence(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(if is_usage_error(&e) { 2 } else { 1 })
        }
    }
}
