//! Element kernels for every method, global assembly, boundary conditions,
//! the sparse solve, and condition-number estimation.

mod condition;
mod kernels;
mod system;

pub use condition::{condition_number, condition_number_of, lanczos_largest, SymOperator};
pub use kernels::{compute_kernels, ElementKernel, Method};
pub use system::{
    assemble, body_force_vector, traction_vector, CsrMatrix, GlobalSystem, ReducedSystem,
    Solution, RESIDUAL_TOL,
};
