//! Physical quantities of a mode — energy (closed form and quadrature),
//! helicity, photon number, amplitude inversion — and the quantization
//! report tying the fundamental-cell degree `d` to the energy through
//! `E = (d/4)·ω`.
//!
//! Natural units ħ = c = ε₀ = 1 throughout; [`photons_to_joules`] is the
//! single conversion helper for physical-unit reporting.

use crate::cavity::{ModeError, ModeSpec};
use crate::field::SpaceTimePoint;
use crate::quadrature::{integrate_box, GridSpec, QuadError, QuadResult};
use crate::topology;
use serde::Serialize;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuantizeError {
    #[error("NonpositiveFrequency: omega = {omega}")]
    NonpositiveFrequency { omega: f64 },
    #[error("photon number must be >= 0, got {n}")]
    NegativePhotonNumber { n: f64 },
    #[error(transparent)]
    Mode(#[from] ModeError),
}

/// Closed-form cavity energy `E = ω²A²π³/16`.
pub fn energy_analytic(mode: &ModeSpec) -> f64 {
    mode.omega * mode.omega * mode.amplitude * mode.amplitude * PI.powi(3) / 16.0
}

/// Quadrature of the energy density `(E² + B²)/2` over the cavity at time
/// `t`. Time-independent and equal to [`energy_analytic`] for every mode.
pub fn energy_numeric(
    mode: &ModeSpec,
    t: f64,
    space_points: usize,
) -> Result<QuadResult, QuadError> {
    let grid = GridSpec::cavity(space_points);
    let m = *mode;
    let f = move |c: &[f64]| {
        let pt = SpaceTimePoint::new(c[0], c[1], c[2], t);
        (m.e_at(&pt).norm_squared() + m.b_at(&pt).norm_squared()) / 2.0
    };
    integrate_box(&f, &grid)
}

/// Electromagnetic helicity `H = ½ ∫_C (A·B + C·E) d³r` at time `t`, with
/// the temporal-gauge potential `A` and the electric pseudo-potential
/// `C = B(r,0) sin(ωt)/ω`. Standing modes carry equal right- and
/// left-handed content, so `H = 0` identically.
///
/// The unintegrated densities are gauge dependent; only the integral `H`
/// is reported.
pub fn helicity(mode: &ModeSpec, t: f64, space_points: usize) -> Result<QuadResult, QuadError> {
    let grid = GridSpec::cavity(space_points);
    let m = *mode;
    let f = move |c: &[f64]| {
        let pt = SpaceTimePoint::new(c[0], c[1], c[2], t);
        (m.a_at(&pt).dot(&m.b_at(&pt)) + m.c_at(&pt).dot(&m.e_at(&pt))) / 2.0
    };
    integrate_box(&f, &grid)
}

/// Photon number `n = E/ω` (the Planck-Einstein relation with ħ = 1).
pub fn photon_number(energy: f64, omega: f64) -> Result<f64, QuantizeError> {
    if omega <= 0.0 {
        return Err(QuantizeError::NonpositiveFrequency { omega });
    }
    Ok(energy / omega)
}

/// The amplitude at which the mode `k` carries exactly `n` photons:
/// inverting `ω²A²π³/16 = nω` gives `A = 4√(n/(ωπ³))`.
pub fn amplitude_for_photons(n: f64, k: [i64; 3]) -> Result<f64, QuantizeError> {
    if n < 0.0 {
        return Err(QuantizeError::NegativePhotonNumber { n });
    }
    let probe = ModeSpec::new(k, 0.0)?;
    Ok(4.0 * (n / (probe.omega * PI.powi(3))).sqrt())
}

/// Reduced Planck constant, J·s.
pub const HBAR_JS: f64 = 1.054_571_817e-34;

/// Physical-unit energy `n·ħ·ω` in joules for a photon number and an
/// angular frequency in rad/s. Reporting helper only; all computations stay
/// in natural units.
pub fn photons_to_joules(photon_n: f64, omega_rad_per_s: f64) -> f64 {
    photon_n * HBAR_JS * omega_rad_per_s
}

/// Pass/fail thresholds of the quantization report.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReportTolerances {
    /// `|d - 4E/ω|`
    pub residual: f64,
    /// relative numeric-vs-analytic energy agreement
    pub energy_rel: f64,
    /// absolute helicity bound for a standing mode
    pub helicity_abs: f64,
}

impl Default for ReportTolerances {
    fn default() -> Self {
        Self {
            residual: 1e-6,
            energy_rel: 1e-9,
            helicity_abs: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ModeKey {
    pub k: [i64; 3],
}

/// Everything the quantization of one mode amounts to. Serialized with a
/// fixed key set; `d_rounded` and `d_mod4` are omitted when `d` sits too
/// far from an integer (reported raw instead of coerced).
#[derive(Debug, Clone, Serialize)]
pub struct QuantizationReport {
    pub mode: ModeKey,
    pub omega: f64,
    pub amplitude: f64,
    pub energy_analytic: f64,
    pub energy_numeric: f64,
    pub helicity: f64,
    pub d_raw: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_rounded: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_mod4: Option<i64>,
    pub photon_n: f64,
    /// `|d - 4E/ω|` with the closed-form energy
    pub residual: f64,
    pub tolerances: ReportTolerances,
    pub pass: bool,
}

/// Assembles energy (closed form and quadrature), helicity, the cell degree
/// `d`, the photon number `n = d/4`, the identity residual `|d - 4E/ω|`,
/// and the `d mod 4` diagnostic, judged against the given tolerances.
pub fn quantization_report(
    mode: &ModeSpec,
    space_points: usize,
    time_points: usize,
    tolerances: ReportTolerances,
) -> Result<QuantizationReport, QuadError> {
    let e_ana = energy_analytic(mode);
    let e_num = energy_numeric(mode, 0.0, space_points)?.value;
    let h = helicity(mode, 0.0, space_points)?.value;
    let degree = topology::degree_d(mode, space_points, time_points)?;
    let estimate = topology::DegreeEstimate::from_raw(degree.d);
    let residual = (degree.d - 4.0 * e_ana / mode.omega).abs();

    let energy_ok = if e_ana > 0.0 {
        (e_num - e_ana).abs() / e_ana < tolerances.energy_rel
    } else {
        e_num.abs() < 1e-12
    };
    let pass = residual < tolerances.residual && energy_ok && h.abs() < tolerances.helicity_abs;

    Ok(QuantizationReport {
        mode: ModeKey { k: mode.k },
        omega: mode.omega,
        amplitude: mode.amplitude,
        energy_analytic: e_ana,
        energy_numeric: e_num,
        helicity: h,
        d_raw: degree.d,
        d_rounded: estimate.near_integer.then_some(estimate.rounded),
        d_mod4: estimate
            .near_integer
            .then_some(estimate.rounded.rem_euclid(4)),
        photon_n: degree.photon_n,
        residual,
        tolerances,
        pass,
    })
}
