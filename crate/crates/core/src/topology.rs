//! Topological indices: degree of sphere maps, Gauss linking of closed
//! curves, level-curve (fiber) tracing, the vanishing 4-torus integral,
//! and the fundamental-cell degree behind the energy-quantization relation
//! `E = (d/4)·ω`.

use crate::cavity::ModeSpec;
use crate::clebsch::{CValue, ClebschError, ComplexScalarField};
pub use crate::curve::{Curve3, CurveError};
use crate::field::{SpaceTimePoint, Vec3, VectorField};
use crate::quadrature::{
    integrate_box, integrate_cell, integrate_value, Axis, CompensatedSum, GridSpec, QuadError,
    QuadResult,
};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

/// Distance below which two curves are treated as intersecting.
pub const INTERSECTION_THRESHOLD: f64 = 1e-6;
/// Accepted deviation of a topological index from the nearest integer.
/// Values farther out are reported raw with the flag cleared rather than
/// coerced, so under-resolution stays visible.
pub const INTEGER_THRESHOLD: f64 = 0.01;
/// Accepted deviation of a fiber seed from the requested level.
pub const SEED_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("CurvesIntersect: minimum separation {min_distance:.3e} below threshold")]
    CurvesIntersect { min_distance: f64 },
    #[error("OpenCurve: linking requires closed curves (gap {gap:.3e})")]
    OpenCurve { gap: f64 },
    #[error("DegenerateDirection: ∇Re × ∇Im vanishes at ({x}, {y}, {z})")]
    DegenerateDirection { x: f64, y: f64, z: f64 },
    #[error("seed is off the requested fiber: |φ(seed) - c| = {deviation:.3e}")]
    SeedOffFiber { deviation: f64 },
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Scalar(#[from] ClebschError),
    #[error(transparent)]
    Quad(#[from] QuadError),
}

/// A raw index value together with its nearest integer; `near_integer` is
/// false when the raw value sits more than [`INTEGER_THRESHOLD`] away,
/// which signals under-resolution.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegreeEstimate {
    pub raw: f64,
    pub rounded: i64,
    pub near_integer: bool,
}

impl DegreeEstimate {
    pub fn from_raw(raw: f64) -> Self {
        let rounded = raw.round() as i64;
        Self {
            raw,
            rounded,
            near_integer: (raw - rounded as f64).abs() <= INTEGER_THRESHOLD,
        }
    }
}

/// A map from a parameterized closed surface to the unit 2-sphere. The
/// parameter rectangle convention is `(a, b) = (polar ∈ [0, π], azimuth ∈
/// [0, 2π))`; see [`SphereMap::param_grid`]. Outputs are renormalized, so
/// the map only needs to point in the right direction.
#[derive(Clone)]
pub struct SphereMap {
    f: Arc<dyn Fn(f64, f64) -> Vec3 + Send + Sync>,
}

impl SphereMap {
    pub fn new(f: impl Fn(f64, f64) -> Vec3 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn eval(&self, a: f64, b: f64) -> Vec3 {
        (self.f)(a, b).normalize()
    }

    /// The quadrature grid matching the parameter convention: closed polar
    /// axis, periodic azimuthal axis with twice the points.
    pub fn param_grid(points: usize) -> GridSpec {
        GridSpec::new(vec![
            Axis::closed(0.0, PI, points),
            Axis::periodic(0.0, 2.0 * PI, 2 * points),
        ])
    }

    /// The identity of the unit sphere in spherical coordinates (degree 1).
    pub fn identity() -> Self {
        Self::new(|theta, phi| {
            Vec3::new(
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            )
        })
    }

    /// Doubles the azimuthal angle (degree 2).
    pub fn azimuth_doubling() -> Self {
        Self::new(|theta, phi| {
            Vec3::new(
                theta.sin() * (2.0 * phi).cos(),
                theta.sin() * (2.0 * phi).sin(),
                theta.cos(),
            )
        })
    }

    /// The antipodal map (degree -1 on the 2-sphere).
    pub fn antipodal() -> Self {
        let id = Self::identity();
        Self::new(move |a, b| -id.eval(a, b))
    }
}

impl std::fmt::Debug for SphereMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("SphereMap")
    }
}

/// Degree of a sphere map as the integral of the pulled-back normalized
/// area form, `(1/4π) ∬ m · (∂_a m × ∂_b m) da db`, with parameter
/// derivatives by central differences.
pub fn surface_degree(map: &SphereMap, grid: &GridSpec) -> Result<DegreeEstimate, QuadError> {
    let h = 1e-6;
    let m = map.clone();
    let integrand = move |c: &[f64]| {
        let (a, b) = (c[0], c[1]);
        let v = m.eval(a, b);
        let da = (m.eval(a + h, b) - m.eval(a - h, b)) / (2.0 * h);
        let db = (m.eval(a, b + h) - m.eval(a, b - h)) / (2.0 * h);
        v.dot(&da.cross(&db)) / (4.0 * PI)
    };
    let result = integrate_box(&integrand, grid)?;
    Ok(DegreeEstimate::from_raw(result.value))
}

/// Gauss linking number of two disjoint closed curves by the midpoint
/// double sum
///
/// ```text
/// ℓ = (1/4π) Σ_i Σ_j (m_i - m_j) · (Δr_i × Δr_j) / |m_i - m_j|³
/// ```
///
/// The outer curve's segments are partitioned across workers and partial
/// sums combined in segment order, so the value is independent of the
/// worker count.
pub fn gauss_linking(c1: &Curve3, c2: &Curve3) -> Result<DegreeEstimate, TopologyError> {
    if !c1.closed {
        return Err(TopologyError::OpenCurve {
            gap: c1.closure_gap,
        });
    }
    if !c2.closed {
        return Err(TopologyError::OpenCurve {
            gap: c2.closure_gap,
        });
    }
    let seg1 = c1.segments();
    let seg2 = c2.segments();

    let rows: Vec<(f64, f64)> = seg1
        .par_iter()
        .map(|(m1, d1)| {
            let mut acc = CompensatedSum::default();
            let mut min_dist = f64::INFINITY;
            for (m2, d2) in &seg2 {
                let rel = m1 - m2;
                let dist = rel.norm();
                min_dist = min_dist.min(dist);
                if dist > 0.0 {
                    acc.add(rel.dot(&d1.cross(d2)) / dist.powi(3));
                }
            }
            (acc.value(), min_dist)
        })
        .collect();

    let mut total = CompensatedSum::default();
    let mut min_dist = f64::INFINITY;
    for (partial, d) in rows {
        total.add(partial);
        min_dist = min_dist.min(d);
    }
    if min_dist < INTERSECTION_THRESHOLD {
        return Err(TopologyError::CurvesIntersect {
            min_distance: min_dist,
        });
    }
    Ok(DegreeEstimate::from_raw(total.value() / (4.0 * PI)))
}

/// The canonically linked pair of circles (linking number +1 with these
/// orientations): the unit circle in the xy-plane and a unit circle in the
/// xz-plane threaded through it.
pub fn canonical_hopf_link(points: usize) -> (Curve3, Curve3) {
    let c1 = Curve3::parametric(points, |a| Vec3::new(a.cos(), a.sin(), 0.0), 1.0).unwrap();
    let c2 = Curve3::parametric(points, |a| Vec3::new(1.0 + a.cos(), 0.0, -a.sin()), 1.0).unwrap();
    (c1, c2)
}

/// Two disjoint coplanar circles with linking number 0.
pub fn coplanar_unlinked(points: usize) -> (Curve3, Curve3) {
    let c1 = Curve3::parametric(points, |a| Vec3::new(a.cos(), a.sin(), 0.0), 1.0).unwrap();
    let c2 = Curve3::parametric(points, |a| Vec3::new(3.0 + a.cos(), a.sin(), 0.0), 1.0).unwrap();
    (c1, c2)
}

/// The Hopf map pulled back to ℝ³ through inverse stereographic
/// projection: `φ(r) = (2z + i(r²-1)) / (2(x+iy))`, with the z-axis mapped
/// to the point at infinity. Its level curves are pairwise linked circles;
/// the fiber over 0 is the unit circle in the z = 0 plane.
pub fn hopf_scalar() -> ComplexScalarField {
    ComplexScalarField::new(|pt| {
        let (x, y, z) = (pt.r.x, pt.r.y, pt.r.z);
        let r2 = x * x + y * y + z * z;
        let num = Complex64::new(2.0 * z, r2 - 1.0);
        let den = Complex64::new(2.0 * x, 2.0 * y);
        if den.norm_sqr() == 0.0 {
            CValue::Infinity
        } else {
            CValue::Finite(num / den)
        }
    })
}

/// Traces the level curve `φ = level` through `seed` at fixed time `t` by
/// fourth-order Runge-Kutta steps along the normalized direction
/// `∇Re(φ) × ∇Im(φ)` (which is tangent to the fiber). Terminates when the
/// path returns within `step/2` of the seed after at least 8 steps, or
/// after `max_steps` (returned with `closed = false`).
pub fn trace_level_curve(
    phi: &ComplexScalarField,
    level: Complex64,
    seed: Vec3,
    t: f64,
    step: f64,
    max_steps: usize,
) -> Result<Curve3, TopologyError> {
    let at = |r: Vec3| SpaceTimePoint::at(r, t);
    let value = phi.eval(&at(seed))?;
    let deviation = match value {
        CValue::Finite(z) => (z - level).norm(),
        CValue::Infinity => f64::INFINITY,
    };
    if deviation > SEED_TOLERANCE {
        return Err(TopologyError::SeedOffFiber { deviation });
    }

    let direction = |r: Vec3| -> Result<Vec3, TopologyError> {
        let jet = phi.jet(&at(r))?;
        let ga = Vec3::new(jet.grad[0].re, jet.grad[1].re, jet.grad[2].re);
        let gb = Vec3::new(jet.grad[0].im, jet.grad[1].im, jet.grad[2].im);
        let v = ga.cross(&gb);
        let n = v.norm();
        if n < 1e-12 {
            return Err(TopologyError::DegenerateDirection {
                x: r.x,
                y: r.y,
                z: r.z,
            });
        }
        Ok(v / n)
    };

    let mut vertices = vec![seed];
    let mut p = seed;
    for taken in 1..=max_steps {
        let k1 = direction(p)?;
        let k2 = direction(p + 0.5 * step * k1)?;
        let k3 = direction(p + 0.5 * step * k2)?;
        let k4 = direction(p + step * k3)?;
        p += (step / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        vertices.push(p);
        if taken >= 8 && (p - seed).norm() < step / 2.0 {
            break;
        }
    }
    Ok(Curve3::new(vertices, step)?)
}

/// The signed spacetime integral `∫_{T⁴} (E² - B²)/2 d⁴x` over the full
/// 4-torus (space period 2π, time period `tau`). Vanishes for every
/// source-free field.
pub fn t4_degree(
    e: &VectorField,
    b: &VectorField,
    tau: f64,
    space_points: usize,
    time_points: usize,
) -> Result<QuadResult, QuadError> {
    let grid = GridSpec::torus4(space_points, time_points, tau);
    let f = |c: &[f64]| {
        let pt = SpaceTimePoint::new(c[0], c[1], c[2], c[3]);
        (e.eval(&pt).norm_squared() - b.eval(&pt).norm_squared()) / 2.0
    };
    integrate_box(&f, &grid)
}

fn cell_integrand(mode: &ModeSpec, pt: &SpaceTimePoint) -> f64 {
    let shifted = SpaceTimePoint::at(pt.r, pt.t + mode.tau / 4.0);
    let ee = mode.e_at(pt).dot(&mode.e_at(&shifted));
    let bb = mode.b_at(pt).dot(&mode.b_at(&shifted));
    (ee - bb) / 2.0
}

/// The spatial integral `∫_C [E(t)·E(t+τ/4) - B(t)·B(t+τ/4)]/2 d³r`, using
/// the integral identities that let the physical fields stand in for their
/// starred partners. Equals `E sin 2ωt` with `E` the mode energy.
pub fn degree_integrand(mode: &ModeSpec, t: f64, grid: &GridSpec) -> Result<f64, QuadError> {
    let f = |c: &[f64]| cell_integrand(mode, &SpaceTimePoint::new(c[0], c[1], c[2], t));
    integrate_value(&f, grid)
}

/// Degree of the fundamental-cell map and the photon number it encodes.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct DegreeResult {
    /// `d = 4 ∫₀^{τ/4} dt ∫_C [E(t)·E(t+τ/4) - B(t)·B(t+τ/4)]/2 d³r`
    pub d: f64,
    /// `n = d/4`
    pub photon_n: f64,
    pub err_estimate: f64,
}

/// Computes the degree `d` over the fundamental cell `C × [0, τ/4]`; the
/// factor 4 restores the normalization of the quotient construction.
/// Satisfies `d = 4E/ω` at quadrature accuracy for every mode and
/// amplitude.
pub fn degree_d(
    mode: &ModeSpec,
    space_points: usize,
    time_points: usize,
) -> Result<DegreeResult, QuadError> {
    let m = *mode;
    let f = move |pt: &SpaceTimePoint| cell_integrand(&m, pt);
    let quad = integrate_cell(&f, mode.tau, space_points, time_points)?;
    let d = 4.0 * quad.value;
    Ok(DegreeResult {
        d,
        photon_n: d / 4.0,
        err_estimate: 4.0 * quad.err_estimate,
    })
}

/// Full-period variant over `t ∈ [0, τ]`.
///
/// With `absolute`, integrates the modulus of the spatial integral; the four
/// quarter-period contributions have equal moduli and the result equals
/// [`degree_d`]. Without it the signed contributions cancel and the result
/// is 0. Each quarter is integrated on its own closed panel set so the
/// kinks of the modulus at the quarter boundaries never cross a panel.
pub fn degree_d_fullperiod(
    mode: &ModeSpec,
    space_points: usize,
    time_points: usize,
    absolute: bool,
) -> Result<f64, QuadError> {
    let grid = GridSpec::cavity(space_points);
    let quarter_points = (time_points / 4).max(4);
    let mut total = CompensatedSum::default();
    for quarter in 0..4 {
        let t0 = quarter as f64 * mode.tau / 4.0;
        let t1 = (quarter + 1) as f64 * mode.tau / 4.0;
        let axis = Axis::closed(t0, t1, quarter_points);
        let (nodes, weights) = axis.nodes_weights();
        for (t, w) in nodes.iter().zip(weights.iter()) {
            let inner = degree_integrand(mode, *t, &grid)?;
            total.add(w * if absolute { inner.abs() } else { inner });
        }
    }
    Ok(total.value())
}

/// How a mode's fields transform under the 32-element group generated by
/// the wall reflections `x_i → 2π - x_i` and the time operations
/// `t → τ/2 - t`, `t → -t`, `t → t + τ/2`.
#[derive(Debug, Clone, Serialize)]
pub struct OrbifoldReport {
    pub max_e_violation: f64,
    pub max_b_violation: f64,
    pub group_elements: usize,
    pub n_samples: usize,
}

impl OrbifoldReport {
    pub fn max_violation(&self) -> f64 {
        self.max_e_violation.max(self.max_b_violation)
    }
}

/// Checks the equivariance of the mode fields under every element of the
/// product group (8 wall-reflection subsets × 4 time operations): each
/// element multiplies each field component by a known sign.
pub fn check_orbifold_symmetry(mode: &ModeSpec, n_samples: usize, seed: u64) -> OrbifoldReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let tau = mode.tau;
    let mut max_e = 0.0f64;
    let mut max_b = 0.0f64;
    for _ in 0..n_samples {
        let pt = SpaceTimePoint::new(
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(0.0..tau),
        );
        let e0 = mode.e_at(&pt);
        let b0 = mode.b_at(&pt);
        for mask in 0..8u32 {
            for time_op in 0..4u32 {
                let mut q = pt;
                for axis in 0..3 {
                    if mask & (1 << axis) != 0 {
                        q.r[axis] = 2.0 * PI - q.r[axis];
                    }
                }
                // time ops: identity, reflection about τ/4, time reversal,
                // half-period shift
                let (te, tb) = match time_op {
                    0 => (1.0, 1.0),
                    1 => {
                        q.t = tau / 2.0 - q.t;
                        (1.0, -1.0)
                    }
                    2 => {
                        q.t = -q.t;
                        (-1.0, 1.0)
                    }
                    _ => {
                        q.t += tau / 2.0;
                        (-1.0, -1.0)
                    }
                };
                let e1 = mode.e_at(&q);
                let b1 = mode.b_at(&q);
                let reflected = mask.count_ones();
                for comp in 0..3 {
                    let own = mask & (1 << comp) != 0;
                    let se = if (reflected - own as u32).is_multiple_of(2) {
                        1.0
                    } else {
                        -1.0
                    };
                    let sb = if own { -1.0 } else { 1.0 };
                    max_e = max_e.max((e1[comp] - se * te * e0[comp]).abs());
                    max_b = max_b.max((b1[comp] - sb * tb * b0[comp]).abs());
                }
            }
        }
    }
    OrbifoldReport {
        max_e_violation: max_e,
        max_b_violation: max_b,
        group_elements: 32,
        n_samples,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantize;
    use approx::assert_abs_diff_eq;

    #[test]
    fn surface_degree_oracles() {
        let grid = SphereMap::param_grid(48);
        let id = surface_degree(&SphereMap::identity(), &grid).unwrap();
        assert_eq!(id.rounded, 1);
        assert!(id.near_integer);
        assert!((id.raw - 1.0).abs() < 1e-6);

        let dbl = surface_degree(&SphereMap::azimuth_doubling(), &grid).unwrap();
        assert_eq!(dbl.rounded, 2);
        assert!((dbl.raw - 2.0).abs() < 1e-6);

        let anti = surface_degree(&SphereMap::antipodal(), &grid).unwrap();
        assert_eq!(anti.rounded, -1);
        assert!((anti.raw + 1.0).abs() < 1e-6);
    }

    #[test]
    fn surface_degree_stable_under_refinement() {
        let map = SphereMap::azimuth_doubling();
        let a = surface_degree(&map, &SphereMap::param_grid(32)).unwrap();
        let b = surface_degree(&map, &SphereMap::param_grid(64)).unwrap();
        assert!((a.raw - b.raw).abs() < 1e-6);
    }

    #[test]
    fn linking_of_canonical_pairs() {
        let (c1, c2) = canonical_hopf_link(512);
        let l = gauss_linking(&c1, &c2).unwrap();
        assert_eq!(l.rounded, 1);
        assert!(l.near_integer, "raw {}", l.raw);
        assert!((l.raw - 1.0).abs() < 0.01);

        let (u1, u2) = coplanar_unlinked(512);
        let l = gauss_linking(&u1, &u2).unwrap();
        assert_eq!(l.rounded, 0);
        assert!(l.raw.abs() < 1e-3);

        // far separation: essentially zero
        let far = u2.transformed(&nalgebra::Rotation3::identity(), Vec3::new(100.0, 0.0, 0.0));
        let l = gauss_linking(&u1, &far).unwrap();
        assert!(l.raw.abs() < 1e-6);
    }

    #[test]
    fn linking_is_symmetric_and_orientation_sensitive() {
        let (c1, c2) = canonical_hopf_link(256);
        let ab = gauss_linking(&c1, &c2).unwrap().raw;
        let ba = gauss_linking(&c2, &c1).unwrap().raw;
        assert_abs_diff_eq!(ab, ba, epsilon = 1e-9);

        let rev = gauss_linking(&c1, &c2.reversed()).unwrap().raw;
        assert_abs_diff_eq!(rev, -ab, epsilon = 1e-12);
    }

    #[test]
    fn linking_invariant_under_rigid_motion() {
        let (c1, c2) = canonical_hopf_link(256);
        let before = gauss_linking(&c1, &c2).unwrap().raw;
        let rot = nalgebra::Rotation3::from_euler_angles(0.4, -1.1, 2.2);
        let shift = Vec3::new(3.0, -2.0, 0.7);
        let after = gauss_linking(&c1.transformed(&rot, shift), &c2.transformed(&rot, shift))
            .unwrap()
            .raw;
        assert_abs_diff_eq!(before, after, epsilon = 1e-6);
    }

    #[test]
    fn intersecting_curves_rejected() {
        let (c1, _) = canonical_hopf_link(128);
        assert!(matches!(
            gauss_linking(&c1, &c1.clone()),
            Err(TopologyError::CurvesIntersect { .. })
        ));
    }

    #[test]
    fn hopf_fibers_close_and_link_once() {
        let phi = hopf_scalar();
        // fiber over 0: the unit circle in the z = 0 plane
        let f0 = trace_level_curve(
            &phi,
            Complex64::new(0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            0.0,
            0.01,
            2000,
        )
        .unwrap();
        assert!(
            f0.closed,
            "fiber over 0 did not close (gap {})",
            f0.closure_gap
        );

        // fiber over 1: seed solves 2z + i(r²-1) = 2(x+iy)
        let t: f64 = 0.5;
        let y = 1.0 - (2.0 - 2.0 * t * t).sqrt();
        let f1 = trace_level_curve(
            &phi,
            Complex64::new(1.0, 0.0),
            Vec3::new(t, y, t),
            0.0,
            0.01,
            2000,
        )
        .unwrap();
        assert!(
            f1.closed,
            "fiber over 1 did not close (gap {})",
            f1.closure_gap
        );

        let l = gauss_linking(&f0, &f1).unwrap();
        assert_eq!(l.rounded, 1, "raw linking {}", l.raw);
        assert!(l.near_integer);
    }

    #[test]
    fn off_fiber_seed_rejected() {
        let phi = hopf_scalar();
        let err = trace_level_curve(
            &phi,
            Complex64::new(0.0, 0.0),
            Vec3::new(1.5, 0.2, 0.3),
            0.0,
            0.01,
            100,
        );
        assert!(matches!(err, Err(TopologyError::SeedOffFiber { .. })));
    }

    #[test]
    fn t4_integral_vanishes_for_modes() {
        for (k, a) in [([1i64, 1, 1], 1.0), ([2, 1, 1], 0.7)] {
            let m = ModeSpec::new(k, a).unwrap();
            let r = t4_degree(&m.e_field(), &m.b_field(), m.tau, 24, 24).unwrap();
            assert!(r.value.abs() < 1e-9, "t4 integral {} for {k:?}", r.value);
        }
    }

    #[test]
    fn t4_integral_constant_control() {
        let e = VectorField::new(|_| Vec3::new(1.0, 0.0, 0.0));
        let b = VectorField::new(|_| Vec3::zeros());
        let tau = 0.9;
        let r = t4_degree(&e, &b, tau, 8, 8).unwrap();
        let expect = (2.0 * PI).powi(3) * tau / 2.0;
        assert_abs_diff_eq!(r.value, expect, epsilon = 1e-9 * expect);
    }

    #[test]
    fn degree_integrand_matches_energy_times_sine() {
        let m = ModeSpec::new([1, 1, 1], 1.0).unwrap();
        let grid = GridSpec::cavity(32);
        let energy = quantize::energy_analytic(&m);
        // 3π³/16, frozen from 40-digit evaluation
        assert_abs_diff_eq!(energy, 5.813676877556216, epsilon = 1e-14);

        let at_eighth = degree_integrand(&m, m.tau / 8.0, &grid).unwrap();
        assert!(
            (at_eighth - energy).abs() < 1e-8 * energy,
            "integrand at τ/8: {at_eighth} vs {energy}"
        );
        assert!(degree_integrand(&m, 0.0, &grid).unwrap().abs() < 1e-10);
        assert!(degree_integrand(&m, m.tau / 4.0, &grid).unwrap().abs() < 1e-10);
    }

    #[test]
    fn degree_equals_four_energy_over_omega() {
        let m = ModeSpec::new([1, 1, 1], 1.0).unwrap();
        let d = degree_d(&m, 24, 32).unwrap();
        // √3 π³ / 4, frozen from 40-digit evaluation
        assert_abs_diff_eq!(d.d, 13.426111640954338, epsilon = 1e-9);
        assert_abs_diff_eq!(d.photon_n, d.d / 4.0, epsilon = 0.0);

        let zero = ModeSpec::new([1, 1, 1], 0.0).unwrap();
        assert_abs_diff_eq!(degree_d(&zero, 8, 8).unwrap().d, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn cell_quadrature_of_raw_integrand_matches_degree() {
        // cross-module consistency: integrating the raw two-time integrand
        // over the fundamental cell reproduces degree_d up to the factor 4
        let m = ModeSpec::new([1, 1, 1], 1.0).unwrap();
        let f = |pt: &SpaceTimePoint| {
            let shifted = SpaceTimePoint::at(pt.r, pt.t + m.tau / 4.0);
            (m.e_at(pt).dot(&m.e_at(&shifted)) - m.b_at(pt).dot(&m.b_at(&shifted))) / 2.0
        };
        let cell = crate::quadrature::integrate_cell(&f, m.tau, 24, 32).unwrap();
        let d = degree_d(&m, 24, 32).unwrap().d;
        assert_abs_diff_eq!(4.0 * cell.value, d, epsilon = 1e-12);
    }

    #[test]
    fn exhausted_steps_return_open_curve() {
        let phi = hopf_scalar();
        let partial = trace_level_curve(
            &phi,
            Complex64::new(0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            0.0,
            0.01,
            60, // far fewer than the ~630 steps the circle needs
        )
        .unwrap();
        assert!(!partial.closed);
        assert!(partial.closure_gap > 0.01);
        assert_eq!(partial.len(), 61);
    }

    #[test]
    fn degenerate_direction_detected() {
        // a scalar depending on x alone has ∇Re ∥ ∇Im, so the fiber
        // direction vanishes
        let phi =
            crate::clebsch::ComplexScalarField::new(|pt| CValue::finite(pt.r.x, 2.0 * pt.r.x));
        let err = trace_level_curve(
            &phi,
            Complex64::new(0.5, 1.0),
            Vec3::new(0.5, 0.0, 0.0),
            0.0,
            0.01,
            50,
        );
        assert!(matches!(
            err,
            Err(TopologyError::DegenerateDirection { .. })
        ));
    }

    #[test]
    fn degree_scales_quadratically_with_amplitude() {
        let m1 = ModeSpec::new([2, 1, 1], 0.6).unwrap();
        let m2 = ModeSpec::new([2, 1, 1], 1.2).unwrap();
        let d1 = degree_d(&m1, 24, 32).unwrap().d;
        let d2 = degree_d(&m2, 24, 32).unwrap().d;
        assert!((d2 - 4.0 * d1).abs() < 1e-9 * d2.abs());
    }

    #[test]
    fn full_period_signed_vanishes_absolute_recovers_degree() {
        for k in [[1i64, 1, 1], [2, 1, 1]] {
            let m = ModeSpec::new(k, 1.0).unwrap();
            let signed = degree_d_fullperiod(&m, 24, 32, false).unwrap();
            assert!(signed.abs() < 1e-9, "signed full period {signed}");
            let abs = degree_d_fullperiod(&m, 24, 32, true).unwrap();
            let d = degree_d(&m, 24, 32).unwrap().d;
            assert!(
                (abs - d).abs() < 1e-6 * d,
                "absolute {abs} vs degree {d} for {k:?}"
            );
        }
    }

    #[test]
    fn orbifold_group_equivariance() {
        for k in [[1i64, 1, 1], [2, 1, 1]] {
            let m = ModeSpec::new(k, 1.0).unwrap();
            let rep = check_orbifold_symmetry(&m, 100, 21);
            assert_eq!(rep.group_elements, 32);
            assert!(
                rep.max_violation() < 1e-12,
                "orbifold violation {:.3e}",
                rep.max_violation()
            );
        }
    }
}
