//! Numerical library for the topological structure of electromagnetic
//! radiation in a cubic cavity of side π (natural units ħ = c = ε₀ = 1).
//!
//! The crate provides:
//!
//! * [`cavity`] — closed-form normal modes, their potentials, symmetry and
//!   boundary checks;
//! * [`clebsch`] — Clebsch-variable machinery: scalar ↔ Clebsch conversion,
//!   fields as cross products of gradients, the gauge and Möbius
//!   transformations, the primed construction and starred fields;
//! * [`quadrature`] — deterministic tensor-product quadrature with
//!   compensated, worker-count-independent reductions;
//! * [`topology`] — degree of sphere maps, Gauss linking, fiber tracing,
//!   the vanishing 4-torus integral and the fundamental-cell degree;
//! * [`quantize`] — energy, helicity, photon number, and the quantization
//!   report tying the degree `d` to the energy through `E = (d/4)·ω`.

pub mod cavity;
pub mod clebsch;
pub mod curve;
pub mod field;
pub mod quadrature;
pub mod quantize;
pub mod topology;

pub use cavity::ModeSpec;
pub use curve::Curve3;
pub use field::{ScalarField, SpaceTimePoint, Vec3, VectorField};
pub use quadrature::{Axis, AxisKind, GridSpec, QuadResult};

/// Default spatial resolution (points per axis) for cavity integrals.
pub const DEFAULT_SPACE_POINTS: usize = 48;
/// Default time resolution (points over the integration interval).
pub const DEFAULT_TIME_POINTS: usize = 64;
