//! Numerical Bergman, Hardy and jet-constrained kernels on products of planar disks and annuli.
//!
//! Every numeric type is generic over a [`Real`] scalar (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`.

// `!(x > 0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod basis;
pub mod error;
pub mod geometry;
pub mod green;
pub mod ideal;
pub mod kernel;
pub mod linalg;
pub mod minimal;
pub mod quadrature;
pub mod scalar;
pub mod weight;

pub use basis::{BasisKind, BasisSpec, GramMatrix, Measure, OrderedONBasis, TensorBasis};
pub use error::{LabError, Result};
pub use geometry::{BoundaryQuadrature, Domain, ProductDomain};
pub use green::{character_period, characters_equal, solve_green, CharacterPeriod, GreenSolution, HarmonicFn};
pub use ideal::{JetIdeal, JetTarget};
pub use kernel::{
    bergman_kernel_at, bergman_min_at, cauchy_extend, hardy_dm_kernel_at, hardy_dm_min_at, hardy_s_kernel_at,
    hardy_s_min_at, KernelContext, KernelReport, Setting, Truncation,
};
pub use minimal::{c_tail, closed_form_g, concavity_report, g_of_t, MinL2Setup};
pub use scalar::{cx, Cx, Real};
pub use weight::{CWeight, PhiPreset, WeightSpec};

/// Double-precision aliases.
pub type C64 = Cx<f64>;
pub type Domain64 = Domain<f64>;
pub type ProductDomain64 = ProductDomain<f64>;
pub type Setting64 = Setting<f64>;
pub type KernelContext64 = KernelContext<f64>;
pub type KernelReport64 = KernelReport<f64>;
pub type WeightSpec64 = WeightSpec<f64>;
pub type PhiPreset64 = PhiPreset<f64>;
pub type CWeight64 = CWeight<f64>;
pub type JetIdeal64 = JetIdeal<f64>;
pub type JetTarget64 = JetTarget<f64>;
pub type MinL2Setup64 = MinL2Setup<f64>;
