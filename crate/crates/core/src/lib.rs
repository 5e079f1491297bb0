//! Exact computation with grade-d measures, interference operators and
//! polymeasures on finite measurable spaces.
//!
//! Everything is exact rational arithmetic: no tolerance appears anywhere.
//! On a finite space a σ-algebra is the power set of its atom list, every set
//! function is trivially continuous, and σ-additivity reduces to finite
//! additivity, so the finite theory is fully computable.
//!
//! - [`space`]: finite spaces, measurable sets, disjoint-tuple enumeration.
//! - [`interference`]: interference operators `I_d`, the difference operator
//!   `Δ_S`, grade-d additivity checks.
//! - [`polymeasure`]: atom-level polymeasures, diagonals, marginals,
//!   symmetrization, polarization, variation and semivariation.
//! - [`grade2`]: the correspondence between grade-2 measures and symmetric
//!   bimeasures.
//! - [`diagbox`]: diagonal length of finite unions of rational boxes.
//! - [`kernel`]: truncated kernel bimeasures with divergent variation.
//! - [`random`]: seeded generators for test corpora.

#![forbid(unsafe_code)]

pub mod diagbox;
pub mod error;
pub mod grade2;
pub mod interference;
pub mod kernel;
pub mod polymeasure;
pub mod random;
pub mod scalar;
pub mod setfn;
pub mod space;

pub use diagbox::{BoxUnion, RBox, RInterval};
pub use error::{Error, Result};
pub use interference::{GradeReport, Witness};
pub use kernel::KernelMatrix;
pub use polymeasure::{PolyMeasure, RawCylinderTable, Semivariation, SemivariationMode};
pub use scalar::Scalar;
pub use setfn::SetFunction;
pub use space::{FiniteSpace, MSet};
