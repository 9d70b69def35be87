//! Differential invariants of framings (absolute parallelisms) on a
//! coordinate chart: the frame groupoid, connection, torsion, linear
//! curvature, structure constants, the canonical almost complex / almost
//! symplectic / Riemannian structures, and a deterministic verification
//! engine that recomputes every invariant along two independent routes.

#![forbid(unsafe_code)]

pub mod canonical;
pub mod catalog;
pub mod error;
pub mod expr;
pub mod fd;
pub mod frame;
pub mod framing_file;
pub mod jet;
pub mod report;
pub mod sample;
pub mod tensor;
pub mod verify;

pub use canonical::{
    canonical_j, canonical_metric, canonical_omega, compatibility_report, domega,
    domega_constants, jhat, metric_curvature, nijenhuis_constants, nijenhuis_direct,
    nijenhuis_via_torsion, omega_hat, scalar_curvature_from_constants, ConstantsMode,
    CurvatureResult, DomegaMode, Pairing,
};
pub use catalog::{get_example, CatalogEntry, Expected};
pub use error::{Error, Result};
pub use expr::{evaluate, parse, pretty, Expr};
pub use frame::{
    jacobi_defect, Domain, FlatnessCertificate, Framing, FramingSpec, JetTensor,
    StructureConstants,
};
pub use jet::{ElemFunc, Jet2, JetMatrix, Scalar};
pub use report::{CheckRow, ConstantsSection, VerificationReport};
pub use sample::{sample_pairs, sample_points, SplitMix64};
pub use tensor::{Matrix, Tensor};
pub use verify::{run_constants, run_verify, RunConfig};
