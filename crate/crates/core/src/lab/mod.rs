//! Experiments on foliated domain sequences: limit sets of escaping
//! points, defective sets, convergence of `η` and the dense construction.

mod defect;
mod dense;
mod experiment;
pub mod families;

pub use defect::{
    defective_membership, detect_f, removability_check, CloudIndex, Confidence, Membership, Removability,
    RemovabilityKind, F_HIT_FRACTION,
};
pub use families::Family;
pub use experiment::{
    hausdorff_to_kernel_check, pointwise_convergence_experiment, uniform_convergence_experiment, ConvergenceSetup,
    ExperimentKind, ExperimentReport, HausdorffKernelReport, HausdorffStage, ReportRow, Verdicts, MC_RELATIVE_TOL,
};
pub use dense::{
    covering_radius, dense_defective_construction, line_distance, radial_leaf_samples, slice_test_grid,
    DenseConstruction,
};
