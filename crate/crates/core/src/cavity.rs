//! Closed-form normal modes of the empty cubic cavity of side π, their
//! potentials, and symmetry / boundary-condition checks.
//!
//! Natural units (ħ = c = ε₀ = 1) throughout. A mode is labeled by an
//! integer triple `k` with every component ≥ 1, an amplitude `A ≥ 0`, and a
//! polarization triad `(e1, e2, k/|k|)`. The fields are
//!
//! ```text
//! E_i = ω A e1_i sin(ωt) cos(k_i x_i) sin(k_j x_j) sin(k_k x_k)
//! B_i = ω A e2_i cos(ωt) sin(k_i x_i) cos(k_j x_j) cos(k_k x_k)
//! ```
//!
//! with `(i j k)` a cyclic permutation of `(1 2 3)` and no summation over
//! repeated indices; `ω = |k|` and the time period is `τ = 2π/ω`.
//!
//! Triples with a zero component are rejected: the closed-form energy
//! `ω²A²π³/16` relies on all three sine factors being present, and a
//! degenerate triple would need a different normalization.

use crate::field::{SpaceTimePoint, Vec3, VectorField};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("ZeroModeComponent: k[{index}] = {value}, every component must be >= 1")]
    ZeroModeComponent { index: usize, value: i64 },
    #[error("NegativeAmplitude: amplitude {value} must be >= 0")]
    NegativeAmplitude { value: f64 },
    #[error("DegeneratePolarization: polarization seed is parallel to k")]
    DegeneratePolarization,
}

/// A cavity normal mode: wave triple, amplitude, polarization triad,
/// frequency and period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeSpec {
    pub k: [i64; 3],
    pub amplitude: f64,
    pub e1: [f64; 3],
    pub e2: [f64; 3],
    pub omega: f64,
    pub tau: f64,
}

impl ModeSpec {
    /// Builds a mode with the default polarization seed ẑ (falling back to
    /// x̂ if k were parallel to ẑ, which cannot happen for valid triples).
    pub fn new(k: [i64; 3], amplitude: f64) -> Result<Self, ModeError> {
        Self::with_polarization(k, amplitude, Vec3::z())
    }

    /// Builds a mode with `e1` the normalized component of `pol_seed`
    /// orthogonal to `k`, and `e2 = (k/|k|) × e1`.
    pub fn with_polarization(
        k: [i64; 3],
        amplitude: f64,
        pol_seed: Vec3,
    ) -> Result<Self, ModeError> {
        for (index, &value) in k.iter().enumerate() {
            if value < 1 {
                return Err(ModeError::ZeroModeComponent { index, value });
            }
        }
        if amplitude < 0.0 {
            return Err(ModeError::NegativeAmplitude { value: amplitude });
        }
        let kf = Vec3::new(k[0] as f64, k[1] as f64, k[2] as f64);
        let omega = kf.norm();
        let khat = kf / omega;

        let mut seed = pol_seed;
        let mut rejected = seed - khat * khat.dot(&seed);
        if rejected.norm() < 1e-12 {
            if seed != Vec3::z() {
                return Err(ModeError::DegeneratePolarization);
            }
            seed = Vec3::x();
            rejected = seed - khat * khat.dot(&seed);
            if rejected.norm() < 1e-12 {
                return Err(ModeError::DegeneratePolarization);
            }
        }
        let e1 = rejected.normalize();
        let e2 = khat.cross(&e1);
        Ok(Self {
            k,
            amplitude,
            e1: [e1.x, e1.y, e1.z],
            e2: [e2.x, e2.y, e2.z],
            omega,
            tau: 2.0 * PI / omega,
        })
    }

    pub fn e1_vec(&self) -> Vec3 {
        Vec3::from(self.e1)
    }

    pub fn e2_vec(&self) -> Vec3 {
        Vec3::from(self.e2)
    }

    fn trig_factors(&self, r: &Vec3) -> ([f64; 3], [f64; 3]) {
        let mut s = [0.0; 3];
        let mut c = [0.0; 3];
        for i in 0..3 {
            let arg = self.k[i] as f64 * r[i];
            s[i] = arg.sin();
            c[i] = arg.cos();
        }
        (s, c)
    }

    /// Electric field at a spacetime point.
    pub fn e_at(&self, p: &SpaceTimePoint) -> Vec3 {
        let (s, c) = self.trig_factors(&p.r);
        let amp = self.omega * self.amplitude * (self.omega * p.t).sin();
        Vec3::new(
            amp * self.e1[0] * c[0] * s[1] * s[2],
            amp * self.e1[1] * c[1] * s[2] * s[0],
            amp * self.e1[2] * c[2] * s[0] * s[1],
        )
    }

    /// Magnetic field at a spacetime point.
    pub fn b_at(&self, p: &SpaceTimePoint) -> Vec3 {
        let (s, c) = self.trig_factors(&p.r);
        let amp = self.omega * self.amplitude * (self.omega * p.t).cos();
        Vec3::new(
            amp * self.e2[0] * s[0] * c[1] * c[2],
            amp * self.e2[1] * s[1] * c[2] * c[0],
            amp * self.e2[2] * s[2] * c[0] * c[1],
        )
    }

    /// Vector potential in the temporal gauge (A⁰ = 0): `E = -∂A/∂t` and
    /// `B = ∇×A`.
    pub fn a_at(&self, p: &SpaceTimePoint) -> Vec3 {
        let (s, c) = self.trig_factors(&p.r);
        let amp = self.amplitude * (self.omega * p.t).cos();
        Vec3::new(
            amp * self.e1[0] * c[0] * s[1] * s[2],
            amp * self.e1[1] * c[1] * s[2] * s[0],
            amp * self.e1[2] * c[2] * s[0] * s[1],
        )
    }

    /// Electric pseudo-potential `C(r,t) = B(r,0) sin(ωt)/ω`, which
    /// satisfies `∇×C = E` for the mode.
    pub fn c_at(&self, p: &SpaceTimePoint) -> Vec3 {
        let (s, c) = self.trig_factors(&p.r);
        let amp = self.amplitude * (self.omega * p.t).sin();
        Vec3::new(
            amp * self.e2[0] * s[0] * c[1] * c[2],
            amp * self.e2[1] * s[1] * c[2] * c[0],
            amp * self.e2[2] * s[2] * c[0] * c[1],
        )
    }

    pub fn e_field(&self) -> VectorField {
        let m = *self;
        VectorField::new(move |p| m.e_at(p))
    }

    pub fn b_field(&self) -> VectorField {
        let m = *self;
        VectorField::new(move |p| m.b_at(p))
    }

    pub fn a_field(&self) -> VectorField {
        let m = *self;
        VectorField::new(move |p| m.a_at(p))
    }

    pub fn c_field(&self) -> VectorField {
        let m = *self;
        VectorField::new(move |p| m.c_at(p))
    }
}

/// Maximum violations of the reflection/time-parity relations and the
/// spacetime periodicity of a mode's fields over random sample points.
#[derive(Debug, Clone, Serialize)]
pub struct SymmetryReport {
    /// `E_i(-x_i) = +E_i(x_i)`
    pub e_even_own_axis: f64,
    /// `E_i(-x_j) = -E_i(x_j)`, `i != j`
    pub e_odd_other_axes: f64,
    /// `B_i(-x_i) = -B_i(x_i)`
    pub b_odd_own_axis: f64,
    /// `B_i(-x_j) = +B_i(x_j)`, `i != j`
    pub b_even_other_axes: f64,
    /// `E(-t) = -E(t)`
    pub e_odd_in_time: f64,
    /// `B(-t) = +B(t)`
    pub b_even_in_time: f64,
    /// 2π-periodicity in each coordinate
    pub space_periodicity: f64,
    /// τ-periodicity in time
    pub time_periodicity: f64,
    pub max_violation: f64,
    pub n_samples: usize,
}

impl SymmetryReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_violation < tol
    }
}

fn sample_points(n: usize, tau: f64, seed: u64) -> Vec<SpaceTimePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            SpaceTimePoint::new(
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..2.0 * PI),
                rng.gen_range(0.0..tau),
            )
        })
        .collect()
}

/// Field-level symmetry check, so corrupted evaluators can be fed as
/// negative controls. Violations are data, not errors.
pub fn symmetry_report(
    e: &VectorField,
    b: &VectorField,
    tau: f64,
    n_samples: usize,
    seed: u64,
) -> SymmetryReport {
    let mut rep = SymmetryReport {
        e_even_own_axis: 0.0,
        e_odd_other_axes: 0.0,
        b_odd_own_axis: 0.0,
        b_even_other_axes: 0.0,
        e_odd_in_time: 0.0,
        b_even_in_time: 0.0,
        space_periodicity: 0.0,
        time_periodicity: 0.0,
        max_violation: 0.0,
        n_samples,
    };
    let period = 2.0 * PI;
    for p in sample_points(n_samples, tau, seed) {
        let ev = e.eval(&p);
        let bv = b.eval(&p);
        for axis in 0..3 {
            let mut refl = p;
            refl.r[axis] = -refl.r[axis];
            let er = e.eval(&refl);
            let br = b.eval(&refl);
            for comp in 0..3 {
                if comp == axis {
                    rep.e_even_own_axis = rep.e_even_own_axis.max((er[comp] - ev[comp]).abs());
                    rep.b_odd_own_axis = rep.b_odd_own_axis.max((br[comp] + bv[comp]).abs());
                } else {
                    rep.e_odd_other_axes = rep.e_odd_other_axes.max((er[comp] + ev[comp]).abs());
                    rep.b_even_other_axes = rep.b_even_other_axes.max((br[comp] - bv[comp]).abs());
                }
            }
            let mut shifted = p;
            shifted.r[axis] += period;
            rep.space_periodicity = rep
                .space_periodicity
                .max((e.eval(&shifted) - ev).norm())
                .max((b.eval(&shifted) - bv).norm());
        }
        let neg_t = SpaceTimePoint::at(p.r, -p.t);
        rep.e_odd_in_time = rep.e_odd_in_time.max((e.eval(&neg_t) + ev).norm());
        rep.b_even_in_time = rep.b_even_in_time.max((b.eval(&neg_t) - bv).norm());
        let shifted_t = SpaceTimePoint::at(p.r, p.t + tau);
        rep.time_periodicity = rep
            .time_periodicity
            .max((e.eval(&shifted_t) - ev).norm())
            .max((b.eval(&shifted_t) - bv).norm());
    }
    rep.max_violation = [
        rep.e_even_own_axis,
        rep.e_odd_other_axes,
        rep.b_odd_own_axis,
        rep.b_even_other_axes,
        rep.e_odd_in_time,
        rep.b_even_in_time,
        rep.space_periodicity,
        rep.time_periodicity,
    ]
    .into_iter()
    .fold(0.0, f64::max);
    rep
}

/// Symmetry check for a mode's own fields with a fixed sampling seed.
pub fn check_symmetries(mode: &ModeSpec, n_samples: usize) -> SymmetryReport {
    symmetry_report(
        &mode.e_field(),
        &mode.b_field(),
        mode.tau,
        n_samples,
        0x5eed_ca41,
    )
}

/// Maximum boundary-condition violations over random wall points:
/// `|E × n|` (tangential E) and `|B · n|` (normal B) on all six walls.
#[derive(Debug, Clone, Serialize)]
pub struct BoundaryReport {
    pub max_tangential_e: f64,
    pub max_normal_b: f64,
    pub n_samples: usize,
}

/// Field-level boundary check over the six walls `x_i ∈ {0, π}`.
pub fn boundary_report(
    e: &VectorField,
    b: &VectorField,
    tau: f64,
    n_samples: usize,
    seed: u64,
) -> BoundaryReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_e = 0.0f64;
    let mut max_b = 0.0f64;
    for _ in 0..n_samples {
        let axis = rng.gen_range(0..3usize);
        let wall = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let mut r = Vec3::new(
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
            rng.gen_range(0.0..PI),
        );
        r[axis] = wall;
        let p = SpaceTimePoint::at(r, rng.gen_range(0.0..tau));
        let mut normal = Vec3::zeros();
        normal[axis] = 1.0;
        max_e = max_e.max(e.eval(&p).cross(&normal).norm());
        max_b = max_b.max(b.eval(&p).dot(&normal).abs());
    }
    BoundaryReport {
        max_tangential_e: max_e,
        max_normal_b: max_b,
        n_samples,
    }
}

/// Boundary check for a mode's own fields with a fixed sampling seed.
pub fn check_boundary(mode: &ModeSpec, n_samples: usize) -> BoundaryReport {
    boundary_report(
        &mode.e_field(),
        &mode.b_field(),
        mode.tau,
        n_samples,
        0x5eed_b0df,
    )
}
