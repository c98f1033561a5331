//! Sparse assembly and the constrained minimization behind the probes.

pub mod gram;
pub mod rayleigh;
pub mod sparse;
pub mod svd;

pub use gram::{
    assemble_d_gram, probe_masks, weighted_d_matrix, Admissibility, ConstraintMask, NormConvention,
    QuadraticForm,
};
pub use rayleigh::{min_rayleigh_constrained, RayleighResult, SolveMethod, SolverOptions};
pub use sparse::{conjugate_gradient, CgOutcome, CsrMatrix};
pub use svd::{smallest_singular_value, SingularEstimate, SvdOptions};
