//! Flow-box charts for Lipschitz vector fields on ℝⁿ.
//!
//! Near a non-equilibrium point `x₁` of a Lipschitz field `f`, solutions of
//! `x' = f(x)` can be straightened: there is a bi-Lipschitz map `φ` with
//! `φ(F(x, t)) = φ(x) + t·e₁`, where `F` is the local flow. This crate builds
//! that map numerically by tracking each point back along its solution to the
//! hyperplane `Π = {χ = 0}` transverse to `f(x₁)`, and audits every
//! quantitative guarantee of the construction by sampling:
//!
//! * [`field`], [`builtin`], [`estimate`]: vector fields, the builtin catalog
//!   and sampled Lipschitz / speed-bound estimation.
//! * [`dsl`]: a small expression language for defining fields at runtime.
//! * [`integrate`]: Picard iteration, an adaptive Dormand–Prince integrator,
//!   the local flow and the hyperplane crossing solver.
//! * [`flowbox`]: normalization, radii, `φ`, `φ⁻¹` and interior radii.
//! * [`verify`]: conjugacy, Lipschitz, dependence and flow-axiom audits.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

pub mod builtin;
pub mod dsl;
pub mod estimate;
pub mod field;
pub mod flowbox;
pub mod integrate;
pub mod linalg;
pub mod rng;
pub mod verify;

pub use field::{FieldError, Regularity, VectorField};
pub use flowbox::{build_chart, ChartConfig, ChartError, FlowBoxChart, NormalizationRecord};

pub use integrate::{CrossingResult, IntegrateError, Trajectory};
