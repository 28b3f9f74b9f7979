use thiserror::Error;

/// Errors raised by mesh handling, element kernels, and the global solve.
#[derive(Debug, Error)]
pub enum Error {
    #[error("element {element}: degenerate quadrilateral (signed area {area:e}, guard {guard:e})")]
    DegenerateElement { element: usize, area: f64, guard: f64 },

    #[error("element {element}: self-intersecting quadrilateral")]
    SelfIntersecting { element: usize },

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh file line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("polynomial degree {degree} exceeds supported maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("no interior-visible fan vertex for quadrilateral")]
    NoFanVertex,

    #[error("invalid material: {0}")]
    InvalidMaterial(String),

    #[error("{}ill-conditioned {matrix} matrix (condition estimate {cond:e})", element_prefix(*.element))]
    IllConditioned {
        element: Option<usize>,
        matrix: &'static str,
        cond: f64,
    },

    #[error("singular reduced stiffness matrix: {0}")]
    SingularSystem(String),

    #[error("solver residual {residual:e} exceeds tolerance {tol:e}")]
    Residual { residual: f64, tol: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("perturbation of node {node} failed after {tries} attempts")]
    PerturbationFailed { node: usize, tries: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn element_prefix(element: Option<usize>) -> String {
    match element {
        Some(e) => format!("element {e}: "),
        None => String::new(),
    }
}

impl Error {
    /// Attach an element index to errors raised by per-element kernels.
    pub fn at_element(self, index: usize) -> Self {
        match self {
            Error::IllConditioned { matrix, cond, .. } => Error::IllConditioned {
                element: Some(index),
                matrix,
                cond,
            },
            Error::DegenerateElement { area, guard, .. } => Error::DegenerateElement {
                element: index,
                area,
                guard,
            },
            Error::SelfIntersecting { .. } => Error::SelfIntersecting { element: index },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
