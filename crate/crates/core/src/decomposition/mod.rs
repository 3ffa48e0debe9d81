//! Factorizations of states: SVD, Schmidt form, matrix product states.

mod mps;
mod schmidt;
mod svd;

pub use mps::{
    fidelity, mps_factor, mps_factor_with_report, mps_overlap, mps_reconstruct, mps_truncate, verify_isometry,
    IsometryDirection, MpsChain, TruncationPolicy, TruncationReport,
};
pub use schmidt::{classify_topology, schmidt, SchmidtForm, Topology};
pub use svd::{diagrammatic_svd, svd, SvdFactors};

/// Relative threshold below which a singular value counts as zero.
pub const RANK_TOL: f64 = 1e-10;
