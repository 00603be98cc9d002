//! Clebsch-variable machinery.
//!
//! A divergence-free field is represented by a pair of scalars as
//! `B = ∇p × ∇s`; the pair is equivalent to one complex scalar through
//! `p = 1/(1+|φ|²)`, `s = arg(φ)/2π`. This module implements the
//! conversions in both directions, field construction from pairs, the
//! duality check between a magnetic and an electric pair, the gauge
//! transformation that adds a function of `p` to `s`, the Möbius
//! transformation `ζ → (ζ-i)/(ζ+i)`, the primed time-separable pair
//! construction, the starred fields it generates, and the integral
//! identities `∫B·B* = ∫B²`, `∫E·E* = ∫E²` over the cavity.
//!
//! Complex scalars admit a tagged point at infinity (`p = 0` there).
//! Gradients of pairs derived from a complex scalar are computed from
//! complex finite differences of the scalar itself, which keeps the phase
//! gradient single-valued across the branch cut of `arg`.

use crate::cavity::ModeSpec;
use crate::field::{ScalarField, SpaceTimePoint, Vec3, VectorField, DEFAULT_FD_STEP};
use crate::quadrature::{integrate_value, GridSpec, QuadError};
use num_complex::Complex64;
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClebschError {
    #[error("DomainError: magnitude variable p = {p} outside [0, 1]")]
    Domain { p: f64 },
    #[error("MultiBranchWall: wall samples with p ≈ {p} carry distinct phases {s1} and {s2}")]
    MultiBranchWall { p: f64, s1: f64, s2: f64 },
    #[error("range violation: {name} = {value} at sample point outside [0, 1]")]
    RangeViolation { name: &'static str, value: f64 },
    #[error("pole inside a finite-difference stencil; sample away from poles")]
    PoleInStencil,
    #[error("wall sampling produced {got} usable knots, need at least 2")]
    TooFewWallKnots { got: usize },
}

/// Value of a complex scalar: finite, or the tagged point at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CValue {
    Finite(Complex64),
    Infinity,
}

impl CValue {
    pub fn finite(re: f64, im: f64) -> Self {
        CValue::Finite(Complex64::new(re, im))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, CValue::Infinity)
    }

    /// The magnitude variable `p = 1/(1+|φ|²)`; 0 at infinity.
    pub fn p_value(&self) -> f64 {
        match self {
            CValue::Finite(z) => 1.0 / (1.0 + z.norm_sqr()),
            CValue::Infinity => 0.0,
        }
    }

    /// The phase variable `s = arg(φ)/2π`, by convention 0 at infinity.
    pub fn s_value(&self) -> f64 {
        match self {
            CValue::Finite(z) => z.arg() / (2.0 * PI),
            CValue::Infinity => 0.0,
        }
    }
}

type CFn = Arc<dyn Fn(&SpaceTimePoint) -> Result<CValue, ClebschError> + Send + Sync>;

/// Value and first derivatives of a complex scalar at a point.
#[derive(Debug, Clone, Copy)]
pub struct ComplexJet {
    pub value: Complex64,
    pub grad: [Complex64; 3],
    pub dt: Complex64,
}

/// A pure complex scalar on spacetime, with a tagged point at infinity.
#[derive(Clone)]
pub struct ComplexScalarField {
    f: CFn,
    fd_step: f64,
}

impl ComplexScalarField {
    pub fn new(f: impl Fn(&SpaceTimePoint) -> CValue + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(move |p| Ok(f(p))),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn new_fallible(
        f: impl Fn(&SpaceTimePoint) -> Result<CValue, ClebschError> + Send + Sync + 'static,
    ) -> Self {
        Self {
            f: Arc::new(f),
            fd_step: DEFAULT_FD_STEP,
        }
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn eval(&self, p: &SpaceTimePoint) -> Result<CValue, ClebschError> {
        (self.f)(p)
    }

    fn finite_at(&self, p: &SpaceTimePoint) -> Result<Complex64, ClebschError> {
        match self.eval(p)? {
            CValue::Finite(z) => Ok(z),
            CValue::Infinity => Err(ClebschError::PoleInStencil),
        }
    }

    /// Value with central-difference spatial gradient and time derivative.
    pub fn jet(&self, p: &SpaceTimePoint) -> Result<ComplexJet, ClebschError> {
        let h = self.fd_step;
        let value = self.finite_at(p)?;
        let mut grad = [Complex64::new(0.0, 0.0); 3];
        for (j, g) in grad.iter_mut().enumerate() {
            let mut pp = *p;
            let mut pm = *p;
            pp.r[j] += h;
            pm.r[j] -= h;
            *g = (self.finite_at(&pp)? - self.finite_at(&pm)?) / (2.0 * h);
        }
        let mut tp = *p;
        let mut tm = *p;
        tp.t += h;
        tm.t -= h;
        let dt = (self.finite_at(&tp)? - self.finite_at(&tm)?) / (2.0 * h);
        Ok(ComplexJet { value, grad, dt })
    }

    /// The magnetic-type field generated by this scalar through the
    /// pull-back of the normalized sphere area form:
    /// `B = -(∇Reφ × ∇Imφ) / (π (1+|φ|²)²)`.
    ///
    /// Evaluation at or next to a pole yields NaN components.
    pub fn pullback_b_field(&self) -> VectorField {
        let field = self.clone();
        VectorField::new(move |p| match field.jet(p) {
            Ok(jet) => {
                let ga = Vec3::new(jet.grad[0].re, jet.grad[1].re, jet.grad[2].re);
                let gb = Vec3::new(jet.grad[0].im, jet.grad[1].im, jet.grad[2].im);
                let denom = PI * (1.0 + jet.value.norm_sqr()).powi(2);
                -ga.cross(&gb) / denom
            }
            Err(_) => Vec3::new(f64::NAN, f64::NAN, f64::NAN),
        })
    }
}

impl std::fmt::Debug for ComplexScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ComplexScalarField")
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

/// Two scalar evaluators: a magnitude-like variable (range `[0,1]` when
/// `normalized`) and a phase-like variable defined modulo 1.
#[derive(Debug, Clone)]
pub struct ClebschPair {
    pub p: ScalarField,
    pub s: ScalarField,
    /// Whether the magnitude variable is constrained to `[0, 1]`.
    /// Generalized pairs (useful test fields) are admitted un-normalized.
    pub normalized: bool,
}

impl ClebschPair {
    pub fn new(p: ScalarField, s: ScalarField, normalized: bool) -> Self {
        Self { p, s, normalized }
    }

    /// Total increment of the phase variable along a closed polygonal loop,
    /// `Σ ∇s(mid)·Δr` including the closing segment. Integer for loops in
    /// the regular region of a genuine phase.
    pub fn phase_loop_increment(&self, loop_points: &[SpaceTimePoint]) -> f64 {
        let n = loop_points.len();
        let mut total = 0.0;
        for i in 0..n {
            let a = &loop_points[i];
            let b = &loop_points[(i + 1) % n];
            let mid = SpaceTimePoint::at(0.5 * (a.r + b.r), 0.5 * (a.t + b.t));
            total += self.s.gradient(&mid).dot(&(b.r - a.r));
        }
        total
    }
}

/// Converts a complex scalar to its normalized Clebsch pair
/// `p = 1/(1+|φ|²)`, `s = arg(φ)/2π`, with gradients and time derivatives
/// derived from complex finite differences of the scalar (single-valued
/// across the `arg` branch cut).
pub fn scalar_to_clebsch(phi: &ComplexScalarField) -> ClebschPair {
    let f_val = phi.clone();
    let p_field = ScalarField::new(move |pt| match f_val.eval(pt) {
        Ok(v) => v.p_value(),
        Err(_) => f64::NAN,
    });
    let f_grad = phi.clone();
    let p_field = p_field.with_gradient(move |pt| {
        if let Ok(CValue::Infinity) = f_grad.eval(pt) {
            return Vec3::zeros();
        }
        match f_grad.jet(pt) {
            Ok(jet) => p_gradient_from_jet(&jet),
            Err(_) => Vec3::new(f64::NAN, f64::NAN, f64::NAN),
        }
    });
    let f_dt = phi.clone();
    let p_field = p_field.with_time_derivative(move |pt| {
        if let Ok(CValue::Infinity) = f_dt.eval(pt) {
            return 0.0;
        }
        match f_dt.jet(pt) {
            Ok(jet) => {
                let w = jet.value.conj() * jet.dt;
                -2.0 * w.re / (1.0 + jet.value.norm_sqr()).powi(2)
            }
            Err(_) => f64::NAN,
        }
    });

    let g_val = phi.clone();
    let s_field = ScalarField::new(move |pt| match g_val.eval(pt) {
        Ok(v) => v.s_value(),
        Err(_) => f64::NAN,
    });
    let g_grad = phi.clone();
    let s_field = s_field.with_gradient(move |pt| {
        if let Ok(CValue::Infinity) = g_grad.eval(pt) {
            return Vec3::zeros();
        }
        match g_grad.jet(pt) {
            Ok(jet) => s_gradient_from_jet(&jet),
            Err(_) => Vec3::new(f64::NAN, f64::NAN, f64::NAN),
        }
    });
    let g_dt = phi.clone();
    let s_field = s_field.with_time_derivative(move |pt| {
        if let Ok(CValue::Infinity) = g_dt.eval(pt) {
            return 0.0;
        }
        match g_dt.jet(pt) {
            Ok(jet) => {
                let w = jet.value.conj() * jet.dt;
                w.im / (2.0 * PI * jet.value.norm_sqr())
            }
            Err(_) => f64::NAN,
        }
    });

    ClebschPair::new(p_field, s_field, true)
}

fn p_gradient_from_jet(jet: &ComplexJet) -> Vec3 {
    // ∇p = -2 Re(φ̄ ∇φ) / (1+|φ|²)²
    let denom = (1.0 + jet.value.norm_sqr()).powi(2);
    let mut out = Vec3::zeros();
    for j in 0..3 {
        out[j] = -2.0 * (jet.value.conj() * jet.grad[j]).re / denom;
    }
    out
}

fn s_gradient_from_jet(jet: &ComplexJet) -> Vec3 {
    // ∇s = Im(φ̄ ∇φ) / (2π |φ|²)
    let denom = 2.0 * PI * jet.value.norm_sqr();
    let mut out = Vec3::zeros();
    for j in 0..3 {
        out[j] = (jet.value.conj() * jet.grad[j]).im / denom;
    }
    out
}

/// Reconstructs the complex scalar `φ = √((1-p)/p) e^{i2πs}` from a
/// normalized pair. Evaluating the result where `p` leaves `[0, 1]`
/// produces [`ClebschError::Domain`]; `p = 0` maps to the point at
/// infinity and `p = 1` to zero.
pub fn clebsch_to_scalar(pair: &ClebschPair) -> ComplexScalarField {
    let p = pair.p.clone();
    let s = pair.s.clone();
    ComplexScalarField::new_fallible(move |pt| {
        let pv = p.eval(pt);
        if !(-1e-12..=1.0 + 1e-12).contains(&pv) {
            return Err(ClebschError::Domain { p: pv });
        }
        let pv = pv.clamp(0.0, 1.0);
        if pv == 0.0 {
            return Ok(CValue::Infinity);
        }
        let modulus = ((1.0 - pv) / pv).sqrt();
        Ok(CValue::Finite(Complex64::from_polar(
            modulus,
            2.0 * PI * s.eval(pt),
        )))
    })
}

/// The magnetic-type field `∇p × ∇s` generated by one pair.
pub fn pair_field(pair: &ClebschPair) -> VectorField {
    let p = pair.p.clone();
    let s = pair.s.clone();
    VectorField::new(move |pt| p.gradient(pt).cross(&s.gradient(pt)))
}

/// Builds both fields of the representation: `B = ∇p × ∇s` from the
/// magnetic pair `(p, s)` and `E = ∇u × ∇v` from the electric pair
/// `(v, u)` (magnitude `v`, phase `u`).
pub fn fields_from_clebsch(
    mag_pair: &ClebschPair,
    el_pair: &ClebschPair,
) -> (VectorField, VectorField) {
    let b = pair_field(mag_pair);
    let v = el_pair.p.clone();
    let u = el_pair.s.clone();
    let e = VectorField::new(move |pt| u.gradient(pt).cross(&v.gradient(pt)));
    (b, e)
}

/// Maximum violations of the two duality equalities
/// `B = ∂₀u ∇v - ∂₀v ∇u` and `E = ∂₀s ∇p - ∂₀p ∇s`
/// (with `B = ∇p × ∇s`, `E = ∇u × ∇v`), plus, when reference fields are
/// supplied, of the reconstruction of those references by the pairs.
#[derive(Debug, Clone, Serialize)]
pub struct DualityReport {
    pub max_b_violation: f64,
    pub max_e_violation: f64,
    pub max_b_reconstruction: Option<f64>,
    pub max_e_reconstruction: Option<f64>,
    pub n_samples: usize,
}

pub fn verify_duality(
    mag_pair: &ClebschPair,
    el_pair: &ClebschPair,
    reference: Option<(&VectorField, &VectorField)>,
    samples: &[SpaceTimePoint],
) -> DualityReport {
    let mut max_b = 0.0f64;
    let mut max_e = 0.0f64;
    let mut max_b_rec = reference.map(|_| 0.0f64);
    let mut max_e_rec = reference.map(|_| 0.0f64);
    for pt in samples {
        let grad_p = mag_pair.p.gradient(pt);
        let grad_s = mag_pair.s.gradient(pt);
        let grad_v = el_pair.p.gradient(pt);
        let grad_u = el_pair.s.gradient(pt);
        let b = grad_p.cross(&grad_s);
        let e = grad_u.cross(&grad_v);
        let b_dual =
            grad_v * el_pair.s.time_derivative(pt) - grad_u * el_pair.p.time_derivative(pt);
        let e_dual =
            grad_p * mag_pair.s.time_derivative(pt) - grad_s * mag_pair.p.time_derivative(pt);
        max_b = max_b.max((b - b_dual).norm());
        max_e = max_e.max((e - e_dual).norm());
        if let Some((b_ref, e_ref)) = reference {
            let rb = (b - b_ref.eval(pt)).norm();
            let re = (e - e_ref.eval(pt)).norm();
            max_b_rec = max_b_rec.map(|m| m.max(rb));
            max_e_rec = max_e_rec.map(|m| m.max(re));
        }
    }
    DualityReport {
        max_b_violation: max_b,
        max_e_violation: max_e,
        max_b_reconstruction: max_b_rec,
        max_e_reconstruction: max_e_rec,
        n_samples: samples.len(),
    }
}

/// Gauge transformation T₁: `(p, s) → (p, s + g(p))`. Leaves `∇p × ∇s`
/// unchanged for any smooth `g`, since `∇g(p) ∥ ∇p`.
pub fn gauge_t1(pair: &ClebschPair, g: impl Fn(f64) -> f64 + Send + Sync + 'static) -> ClebschPair {
    let g = Arc::new(g);
    // derivative of g by one-dimensional central differences
    let hg = 1e-6;
    let dg = {
        let g = g.clone();
        move |x: f64| (g(x + hg) - g(x - hg)) / (2.0 * hg)
    };

    let (p0, s0) = (pair.p.clone(), pair.s.clone());
    let (pv, sv) = (p0.clone(), s0.clone());
    let gv = g.clone();
    let s_new = ScalarField::new(move |pt| sv.eval(pt) + gv(pv.eval(pt)));

    let (pg, sg) = (p0.clone(), s0.clone());
    let dgg = dg.clone();
    let s_new = s_new.with_gradient(move |pt| sg.gradient(pt) + pg.gradient(pt) * dgg(pg.eval(pt)));

    let (pt_, st_) = (p0.clone(), s0.clone());
    let s_new = s_new.with_time_derivative(move |pt| {
        st_.time_derivative(pt) + dg(pt_.eval(pt)) * pt_.time_derivative(pt)
    });

    ClebschPair::new(pair.p.clone(), s_new, pair.normalized)
}

/// Single-branch wall function `s = f(p)`, built by sampling the pair on
/// the cavity walls and monotone piecewise-linear interpolation in `p`.
#[derive(Debug, Clone)]
pub struct WallFunction {
    knots: Vec<(f64, f64)>,
}

impl WallFunction {
    pub fn eval(&self, p: f64) -> f64 {
        let k = &self.knots;
        if p <= k[0].0 {
            return k[0].1;
        }
        if p >= k[k.len() - 1].0 {
            return k[k.len() - 1].1;
        }
        let idx = k.partition_point(|&(kp, _)| kp < p);
        let (p0, s0) = k[idx - 1];
        let (p1, s1) = k[idx];
        if p1 == p0 {
            return s0;
        }
        s0 + (s1 - s0) * (p - p0) / (p1 - p0)
    }

    pub fn knot_count(&self) -> usize {
        self.knots.len()
    }
}

/// Samples `(p, s)` on all six cavity walls at time `t` and fits the wall
/// function `s = f(p)`. Samples with equal `p` but distinct `s` indicate a
/// multi-branch wall set, which is rejected with a diagnostic; only the
/// single-branch case is constructed.
pub fn wall_gauge_function(
    pair: &ClebschPair,
    t: f64,
    samples_per_axis: usize,
) -> Result<WallFunction, ClebschError> {
    let n = samples_per_axis.max(2);
    let mut samples: Vec<(f64, f64)> = Vec::new();
    for axis in 0..3usize {
        for &wall in &[0.0, PI] {
            for i in 0..n {
                for j in 0..n {
                    let a = (i as f64 + 0.5) * PI / n as f64;
                    let b = (j as f64 + 0.5) * PI / n as f64;
                    let mut r = Vec3::zeros();
                    r[axis] = wall;
                    r[(axis + 1) % 3] = a;
                    r[(axis + 2) % 3] = b;
                    let pt = SpaceTimePoint::at(r, t);
                    samples.push((pair.p.eval(&pt), pair.s.eval(&pt)));
                }
            }
        }
    }
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));

    const P_TOL: f64 = 1e-9;
    const S_TOL: f64 = 1e-7;
    let mut knots: Vec<(f64, f64)> = Vec::new();
    for (p, s) in samples {
        match knots.last() {
            Some(&(lp, ls)) if (p - lp).abs() < P_TOL => {
                if (s - ls).abs() > S_TOL {
                    return Err(ClebschError::MultiBranchWall { p, s1: ls, s2: s });
                }
            }
            _ => knots.push((p, s)),
        }
    }
    if knots.len() < 2 {
        return Err(ClebschError::TooFewWallKnots { got: knots.len() });
    }
    Ok(WallFunction { knots })
}

/// The Möbius point transform `ζ → (ζ-i)/(ζ+i)`, with the pole `ζ = -i`
/// mapped to the point at infinity and infinity mapped to 1.
pub fn mobius_t2_value(z: CValue) -> CValue {
    const I: Complex64 = Complex64::new(0.0, 1.0);
    match z {
        CValue::Infinity => CValue::finite(1.0, 0.0),
        CValue::Finite(z) => {
            let den = z + I;
            if den.norm_sqr() == 0.0 {
                CValue::Infinity
            } else {
                CValue::Finite((z - I) / den)
            }
        }
    }
}

/// Möbius transformation T₂ applied pointwise to a complex scalar. Maps the
/// upper half plane into the unit disk, sends real wall values to the unit
/// circle, and preserves the pull-back area density (same generated fields).
pub fn mobius_t2(zeta: &ComplexScalarField) -> ComplexScalarField {
    let z = zeta.clone();
    ComplexScalarField::new_fallible(move |pt| Ok(mobius_t2_value(z.eval(pt)?)))
        .with_fd_step(zeta.fd_step)
}

/// The primed pairs built from spatial snapshots: `(P, S)` from the
/// magnetic pair at `t = 0` and `(V, U)` from the electric pair at
/// `t = τ/4`.
#[derive(Debug, Clone)]
pub struct PrimedPairs {
    pub ps: ClebschPair,
    pub vu: ClebschPair,
    pub omega: f64,
}

/// Builds the time-separable primed Clebsch pairs
///
/// ```text
/// P = (1 + (p0(r) - 1/2) cos ωt)/2,   S = 2 s0(r),
/// V = (1 + v_q(r) sin ωt)/2,          U = 2 u_q(r),
/// ```
///
/// from spatial snapshots `p0` (magnitude at t = 0) and `v_q` (magnitude at
/// t = τ/4) with their phases. The phases are time independent. Inputs are
/// validated on the supplied sample positions: `p0, v_q ∈ [0, 1]` keeps
/// `P, V ∈ [0, 1]` for all t.
pub fn primed_clebsch(
    p0: &ScalarField,
    s0: &ScalarField,
    vq: &ScalarField,
    uq: &ScalarField,
    omega: f64,
    validation_samples: &[Vec3],
) -> Result<PrimedPairs, ClebschError> {
    for r in validation_samples {
        let pt = SpaceTimePoint::at(*r, 0.0);
        let pv = p0.eval(&pt);
        if !(-1e-9..=1.0 + 1e-9).contains(&pv) {
            return Err(ClebschError::RangeViolation {
                name: "p0",
                value: pv,
            });
        }
        let vv = vq.eval(&pt);
        if !(-1e-9..=1.0 + 1e-9).contains(&vv) {
            return Err(ClebschError::RangeViolation {
                name: "vq",
                value: vv,
            });
        }
    }

    let spatial = |f: &ScalarField, pt: &SpaceTimePoint| f.eval(&SpaceTimePoint::at(pt.r, 0.0));

    let p0c = p0.clone();
    let big_p =
        ScalarField::new(move |pt| (1.0 + (spatial(&p0c, pt) - 0.5) * (omega * pt.t).cos()) / 2.0);
    let p0g = p0.clone();
    let big_p = big_p.with_gradient(move |pt| {
        p0g.gradient(&SpaceTimePoint::at(pt.r, 0.0)) * (0.5 * (omega * pt.t).cos())
    });
    let p0t = p0.clone();
    let big_p = big_p.with_time_derivative(move |pt| {
        -0.5 * omega * (spatial(&p0t, pt) - 0.5) * (omega * pt.t).sin()
    });

    let s0c = s0.clone();
    let big_s = ScalarField::new(move |pt| 2.0 * spatial(&s0c, pt));
    let s0g = s0.clone();
    let big_s = big_s
        .with_gradient(move |pt| s0g.gradient(&SpaceTimePoint::at(pt.r, 0.0)) * 2.0)
        .with_time_derivative(|_| 0.0);

    let vqc = vq.clone();
    let big_v = ScalarField::new(move |pt| (1.0 + spatial(&vqc, pt) * (omega * pt.t).sin()) / 2.0);
    let vqg = vq.clone();
    let big_v = big_v.with_gradient(move |pt| {
        vqg.gradient(&SpaceTimePoint::at(pt.r, 0.0)) * (0.5 * (omega * pt.t).sin())
    });
    let vqt = vq.clone();
    let big_v = big_v
        .with_time_derivative(move |pt| 0.5 * omega * spatial(&vqt, pt) * (omega * pt.t).cos());

    let uqc = uq.clone();
    let big_u = ScalarField::new(move |pt| 2.0 * spatial(&uqc, pt));
    let uqg = uq.clone();
    let big_u = big_u
        .with_gradient(move |pt| uqg.gradient(&SpaceTimePoint::at(pt.r, 0.0)) * 2.0)
        .with_time_derivative(|_| 0.0);

    Ok(PrimedPairs {
        ps: ClebschPair::new(big_p, big_s, true),
        vu: ClebschPair::new(big_v, big_u, true),
        omega,
    })
}

/// The starred fields generated by the primed pairs:
/// `E* = ∂₀S ∇P - ∂₀P ∇S` and `B* = ∂₀U ∇V - ∂₀V ∇U`.
pub fn starred_fields(ps: &ClebschPair, vu: &ClebschPair) -> (VectorField, VectorField) {
    let (p, s) = (ps.p.clone(), ps.s.clone());
    let e_star = VectorField::new(move |pt| {
        p.gradient(pt) * s.time_derivative(pt) - s.gradient(pt) * p.time_derivative(pt)
    });
    let (v, u) = (vu.p.clone(), vu.s.clone());
    let b_star = VectorField::new(move |pt| {
        v.gradient(pt) * u.time_derivative(pt) - u.gradient(pt) * v.time_derivative(pt)
    });
    (e_star, b_star)
}

/// Starred partners of a cavity mode's own fields, differing from them by
/// explicit gradients that respect the wall structure:
///
/// ```text
/// E* = E + ∇α,  α = e_shift · sin(k₁x) sin(k₂y) sin(k₃z) · sin ωt
/// B* = B + ∇β,  β = b_shift · cos(k₁x) cos(k₂y) cos(k₃z) · cos ωt
/// ```
///
/// `∇α` is normal to the walls (α constant there) and `∇β` tangent to them,
/// so `∇×E* = -∂B/∂t`, `∇×B* = ∂E/∂t`, and the cavity integral identities
/// `∫B·B* = ∫B²`, `∫E·E* = ∫E²` all hold. The trigonometric factors match
/// the mode's triple, keeping every derived integrand π-periodic per axis.
pub fn mode_starred_partners(
    mode: &ModeSpec,
    e_shift: f64,
    b_shift: f64,
) -> (VectorField, VectorField) {
    let m = *mode;
    let e_star = VectorField::new(move |pt| {
        let (k1, k2, k3) = (m.k[0] as f64, m.k[1] as f64, m.k[2] as f64);
        let (sx, cx) = (k1 * pt.r.x).sin_cos();
        let (sy, cy) = (k2 * pt.r.y).sin_cos();
        let (sz, cz) = (k3 * pt.r.z).sin_cos();
        let amp = e_shift * (m.omega * pt.t).sin();
        let grad_alpha = Vec3::new(
            amp * k1 * cx * sy * sz,
            amp * k2 * sx * cy * sz,
            amp * k3 * sx * sy * cz,
        );
        m.e_at(pt) + grad_alpha
    });
    let m2 = *mode;
    let b_star = VectorField::new(move |pt| {
        let (k1, k2, k3) = (m2.k[0] as f64, m2.k[1] as f64, m2.k[2] as f64);
        let (sx, cx) = (k1 * pt.r.x).sin_cos();
        let (sy, cy) = (k2 * pt.r.y).sin_cos();
        let (sz, cz) = (k3 * pt.r.z).sin_cos();
        let amp = -b_shift * (m2.omega * pt.t).cos();
        let grad_beta = Vec3::new(
            amp * k1 * sx * cy * cz,
            amp * k2 * cx * sy * cz,
            amp * k3 * cx * cy * sz,
        );
        m2.b_at(pt) + grad_beta
    });
    (e_star, b_star)
}

/// Curl residuals of the starred/unstarred differences and their wall
/// alignment: `E* - E` must be a gradient normal to the walls and
/// `B* - B` a gradient tangent to them.
#[derive(Debug, Clone, Serialize)]
pub struct GradientRelationReport {
    pub max_curl_e_diff: f64,
    pub max_curl_b_diff: f64,
    pub max_wall_tangential_e_diff: f64,
    pub max_wall_normal_b_diff: f64,
    pub n_samples: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn check_gradient_relation(
    e: &VectorField,
    e_star: &VectorField,
    b: &VectorField,
    b_star: &VectorField,
    tau: f64,
    n_samples: usize,
    seed: u64,
    h: f64,
) -> GradientRelationReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let de = e_star.minus(e);
    let db = b_star.minus(b);
    let mut max_curl_e = 0.0f64;
    let mut max_curl_b = 0.0f64;
    let mut max_wall_e = 0.0f64;
    let mut max_wall_b = 0.0f64;
    let margin = 0.1;
    for _ in 0..n_samples {
        let pt = SpaceTimePoint::new(
            rng.gen_range(margin..PI - margin),
            rng.gen_range(margin..PI - margin),
            rng.gen_range(margin..PI - margin),
            rng.gen_range(0.0..tau),
        );
        max_curl_e = max_curl_e.max(de.curl_fd(&pt, h).norm());
        max_curl_b = max_curl_b.max(db.curl_fd(&pt, h).norm());

        let axis = rng.gen_range(0..3usize);
        let wall = if rng.gen_bool(0.5) { 0.0 } else { PI };
        let mut r = pt.r;
        r[axis] = wall;
        let wp = SpaceTimePoint::at(r, pt.t);
        let mut normal = Vec3::zeros();
        normal[axis] = 1.0;
        let de_w = de.eval(&wp);
        let db_w = db.eval(&wp);
        max_wall_e = max_wall_e.max((de_w - normal * de_w.dot(&normal)).norm());
        max_wall_b = max_wall_b.max(db_w.dot(&normal).abs());
    }
    GradientRelationReport {
        max_curl_e_diff: max_curl_e,
        max_curl_b_diff: max_curl_b,
        max_wall_tangential_e_diff: max_wall_e,
        max_wall_normal_b_diff: max_wall_b,
        n_samples,
    }
}

/// The four cavity integrals of the Lemma at time `t`:
/// `∫B·B*`, `∫B²`, `∫E·E*`, `∫E²` over `C = [0, π]³`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LemmaIntegrals {
    pub bb_star: f64,
    pub bb: f64,
    pub ee_star: f64,
    pub ee: f64,
}

impl LemmaIntegrals {
    /// Relative deviation of `∫B·B*` from `∫B²` (absolute when `∫B² ≈ 0`).
    pub fn b_rel_diff(&self) -> f64 {
        let d = (self.bb_star - self.bb).abs();
        if self.bb.abs() > 1e-300 {
            d / self.bb.abs()
        } else {
            d
        }
    }

    pub fn e_rel_diff(&self) -> f64 {
        let d = (self.ee_star - self.ee).abs();
        if self.ee.abs() > 1e-300 {
            d / self.ee.abs()
        } else {
            d
        }
    }
}

pub fn lemma_integrals(
    b: &VectorField,
    b_star: &VectorField,
    e: &VectorField,
    e_star: &VectorField,
    t: f64,
    grid: &GridSpec,
) -> Result<LemmaIntegrals, QuadError> {
    let at = |c: &[f64]| SpaceTimePoint::new(c[0], c[1], c[2], t);
    let bb_star = integrate_value(&|c: &[f64]| b.eval(&at(c)).dot(&b_star.eval(&at(c))), grid)?;
    let bb = integrate_value(&|c: &[f64]| b.eval(&at(c)).norm_squared(), grid)?;
    let ee_star = integrate_value(&|c: &[f64]| e.eval(&at(c)).dot(&e_star.eval(&at(c))), grid)?;
    let ee = integrate_value(&|c: &[f64]| e.eval(&at(c)).norm_squared(), grid)?;
    Ok(LemmaIntegrals {
        bb_star,
        bb,
        ee_star,
        ee,
    })
}
