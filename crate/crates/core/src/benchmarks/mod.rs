//! Benchmark problems, error measures, rates, and eigenvalue studies.

pub mod cases;
pub mod eigen;
pub mod norms;
pub mod rates;
pub mod runner;

pub use cases::{
    case_beam, case_cook, case_cylinder, case_manufactured, case_plate_hole, case_punch, BenchmarkCase,
    BoundaryCondition, CaseKind, Components, MeshFamily,
};
pub use eigen::{
    default_eigen_table, eigen_sweep_angle, eigen_sweep_vertex, eigen_table, sweep_minimum, EigenTableRow,
    SweepPoint,
};
pub use norms::{error_norms, ErrorNorms};
pub use rates::{fit_rate, RateFit};
pub use runner::{
    apply_boundary_conditions, fit_rates, ladder_sizes, run_convergence, solve_case, ConvergenceReport, Rates,
    RunResult,
};
