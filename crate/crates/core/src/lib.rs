//! Numerical engine for cosymplectic, coKähler and 3-cosymplectic
//! geometry.
//!
//! The crate builds and verifies structure bundles on coordinate charts,
//! performs moment-map reduction through explicit local slices, transports
//! structures through cone and mapping-torus constructions, checks that
//! reduction commutes with both, and integrates the Reeb flows of
//! time-dependent Hamiltonian systems (including the heavy-top example on
//! T*SO(3)).
//!
//! Everything is an evaluator: fields map chart points to components,
//! first derivatives come from forward-mode jets, and derived fields
//! (reduced tensors, exterior derivatives) answer derivative queries by
//! central finite differences. All verification is sampling-based with
//! seeded, reproducible point sets; reports serialize deterministically.
//!
//! ```
//! use cosym_core::fixtures::flat_cokahler_r3;
//! use cosym_core::structures::{reeb_field, verify_cokahler};
//! use cosym_core::{SamplePlan, Tolerances};
//!
//! let structure = flat_cokahler_r3();
//! let report = verify_cokahler(&structure, &SamplePlan::new(100, 7), &Tolerances::default());
//! assert!(report.pass);
//!
//! // the Reeb field solves ι_ξω = 0, η(ξ) = 1 pointwise
//! let xi = reeb_field(&structure.underlying());
//! assert_eq!(xi.value(&[0.1, -0.2, 0.3]), vec![0.0, 0.0, 1.0]);
//! ```

pub mod action;
pub mod chart;
pub mod cone;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod field;
pub mod fixtures;
pub mod form;
pub mod jet;
pub mod linalg;
pub mod ops;
pub mod reduction;
pub mod report;
pub mod rigid;
pub mod sample;
pub mod scenario;
pub mod structures;
pub mod torus;

pub use chart::Chart;
pub use error::{GeomError, Result};
pub use field::{EndoField, KForm, MetricField, ScalarField, SmoothMap, VectorField};
pub use jet::Jet;
pub use report::{CheckResult, Tolerances, VerificationReport};
pub use sample::SamplePlan;
