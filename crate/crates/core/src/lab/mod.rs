//! Numerical probes: the non-parabolicity constant, kernels, test flows on
//! trees, capacities and radius sweeps.

pub mod capacity;
pub mod constants;
pub mod decay;
pub mod kernel;
pub mod probe;
pub mod report;
pub mod triadic;

pub use capacity::classical_capacity;
pub use constants::{lemma2_constant, lemma34_constant, w_norm, w_norm_equivalence, PathConstant, WNorm};
pub use decay::{
    fit_slope, place_u, probe_decay, probe_graph, probe_single, DecayConfig, DecayResult, DecayRow, ProbeKind,
    URule, Verdict,
};
pub use kernel::{analyze_kernel, delta_kernel_outside, euler_cycle_count, DeltaKernel, KernelAnalysis};
pub use probe::{nonparabolicity_constant, rayleigh_ratio, ProbeDiagnostics, ProbeOptions, ProbeReport};
pub use report::{csv_string, json_string, write_csv, CSV_COLUMNS, CSV_HEADER_COMMENT};
pub use triadic::{triadic_witness, RootedTree, TriadicWitness};
