//! Translation-method lower bounds on the stress energy of plane composites made of two
//! well-ordered isotropic materials and void, with the laminates that attain them.
//!
//! ```
//! use threephase::{bound, CompositeSpec, Region};
//!
//! let spec = CompositeSpec::from_compliances([1.0, 2.0, 3.0, 4.0], 0.05, 0.35, 1.0).unwrap();
//! let b = bound(&spec);
//! assert_eq!(b.region, Region::A1);
//! assert!((b.u_tr - 22.0).abs() < 1e-12);
//! ```

pub mod atlas;
pub mod bound;
pub mod error;
pub mod laminate;
pub mod oracle;
pub mod par;
pub mod tensor;
pub mod verify;

pub use atlas::{boundary_samples, classify, classify_with_margin, psi, BoundaryKind, Classification, Region};
pub use bound::{
    alpha_star, bound, effective_moduli, effective_moduli_from_envelope, energy_in, hs_bounds, phase_averages,
    BoundResult, HsBounds, PhaseAverages,
};
pub use error::{Error, Result};
pub use laminate::{build, build_in, build_sg, evaluate, LaminateNode, LaminateReport, OptimalLaminate, SgCell};
pub use oracle::{phi_inner, regime_of, translation_max, OracleResult, RegimeTag};
pub use par::Execution;
pub use tensor::{Axis, CompositeSpec, Loading, Material, Materials, Phase, SymTensor2};
