//! Spacetime points and evaluator types shared by every module.
//!
//! Fields are represented as pure closures behind [`VectorField`] and
//! [`ScalarField`]. Evaluators are referentially transparent and `Send + Sync`,
//! so they can be sampled from any number of workers without locking.

use std::sync::Arc;

/// 3-vector in natural units.
pub type Vec3 = nalgebra::Vector3<f64>;

/// Default step for central finite differences used by verification
/// oracles and by gradients of user-supplied scalars.
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A point of the spacetime domain: position `r` and time `t`.
///
/// Coordinates are interpreted modulo the periods (2π in space for the
/// torus extension, `tau` in time); evaluators accept raw coordinates and
/// rely on the periodicity of the underlying trigonometric expressions,
/// so no eager reduction is performed. Use [`SpaceTimePoint::reduced`]
/// when a canonical representative is needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub r: Vec3,
    pub t: f64,
}

impl SpaceTimePoint {
    pub fn new(x: f64, y: f64, z: f64, t: f64) -> Self {
        Self {
            r: Vec3::new(x, y, z),
            t,
        }
    }

    pub fn at(r: Vec3, t: f64) -> Self {
        Self { r, t }
    }

    /// Canonical representative with `r` in `[0, 2π)³` and `t` in `[0, tau)`.
    pub fn reduced(&self, tau: f64) -> Self {
        let period = 2.0 * std::f64::consts::PI;
        let wrap = |x: f64, p: f64| {
            let m = x % p;
            if m < 0.0 {
                m + p
            } else {
                m
            }
        };
        Self {
            r: Vec3::new(
                wrap(self.r.x, period),
                wrap(self.r.y, period),
                wrap(self.r.z, period),
            ),
            t: wrap(self.t, tau),
        }
    }
}

type VecFn = Arc<dyn Fn(&SpaceTimePoint) -> Vec3 + Send + Sync>;
type SclFn = Arc<dyn Fn(&SpaceTimePoint) -> f64 + Send + Sync>;
type GradFn = Arc<dyn Fn(&SpaceTimePoint) -> Vec3 + Send + Sync>;

/// A pure map from spacetime to a 3-vector (carrier for E, B, A, C, E*, B*).
#[derive(Clone)]
pub struct VectorField {
    f: VecFn,
}

impl VectorField {
    pub fn new(f: impl Fn(&SpaceTimePoint) -> Vec3 + Send + Sync + 'static) -> Self {
        Self { f: Arc::new(f) }
    }

    pub fn eval(&self, p: &SpaceTimePoint) -> Vec3 {
        (self.f)(p)
    }

    /// Jacobian dF_i/dx_j by central differences with step `h`.
    #[allow(clippy::needless_range_loop)]
    pub fn jacobian_fd(&self, p: &SpaceTimePoint, h: f64) -> [[f64; 3]; 3] {
        let mut jac = [[0.0; 3]; 3];
        for j in 0..3 {
            let mut rp = *p;
            let mut rm = *p;
            rp.r[j] += h;
            rm.r[j] -= h;
            let d = (self.eval(&rp) - self.eval(&rm)) / (2.0 * h);
            for i in 0..3 {
                jac[i][j] = d[i];
            }
        }
        jac
    }

    /// Curl by central differences with step `h`.
    pub fn curl_fd(&self, p: &SpaceTimePoint, h: f64) -> Vec3 {
        let j = self.jacobian_fd(p, h);
        Vec3::new(j[2][1] - j[1][2], j[0][2] - j[2][0], j[1][0] - j[0][1])
    }

    /// Divergence by central differences with step `h`.
    pub fn divergence_fd(&self, p: &SpaceTimePoint, h: f64) -> f64 {
        let j = self.jacobian_fd(p, h);
        j[0][0] + j[1][1] + j[2][2]
    }

    /// Time derivative by central differences with step `h`.
    pub fn dt_fd(&self, p: &SpaceTimePoint, h: f64) -> Vec3 {
        let mut tp = *p;
        let mut tm = *p;
        tp.t += h;
        tm.t -= h;
        (self.eval(&tp) - self.eval(&tm)) / (2.0 * h)
    }

    /// Pointwise difference `self - other`.
    pub fn minus(&self, other: &VectorField) -> VectorField {
        let a = self.clone();
        let b = other.clone();
        VectorField::new(move |p| a.eval(p) - b.eval(p))
    }
}

impl std::fmt::Debug for VectorField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("VectorField")
    }
}

/// A pure scalar evaluator on spacetime with optional analytic gradient and
/// time derivative. When no analytic derivative is supplied, central finite
/// differences with the configured step are used.
#[derive(Clone)]
pub struct ScalarField {
    f: SclFn,
    grad: Option<GradFn>,
    dt: Option<SclFn>,
    fd_step: f64,
}

impl ScalarField {
    pub fn new(f: impl Fn(&SpaceTimePoint) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            f: Arc::new(f),
            grad: None,
            dt: None,
            fd_step: DEFAULT_FD_STEP,
        }
    }

    /// A scalar depending on position only.
    pub fn spatial(f: impl Fn(&Vec3) -> f64 + Send + Sync + 'static) -> Self {
        Self::new(move |p| f(&p.r))
    }

    pub fn with_gradient(
        mut self,
        g: impl Fn(&SpaceTimePoint) -> Vec3 + Send + Sync + 'static,
    ) -> Self {
        self.grad = Some(Arc::new(g));
        self
    }

    pub fn with_spatial_gradient(self, g: impl Fn(&Vec3) -> Vec3 + Send + Sync + 'static) -> Self {
        self.with_gradient(move |p| g(&p.r))
    }

    pub fn with_time_derivative(
        mut self,
        dt: impl Fn(&SpaceTimePoint) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.dt = Some(Arc::new(dt));
        self
    }

    pub fn with_fd_step(mut self, h: f64) -> Self {
        self.fd_step = h;
        self
    }

    pub fn fd_step(&self) -> f64 {
        self.fd_step
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.grad.is_some()
    }

    pub fn eval(&self, p: &SpaceTimePoint) -> f64 {
        (self.f)(p)
    }

    /// Spatial gradient: analytic if supplied, otherwise central differences.
    pub fn gradient(&self, p: &SpaceTimePoint) -> Vec3 {
        if let Some(g) = &self.grad {
            return g(p);
        }
        let h = self.fd_step;
        let mut out = Vec3::zeros();
        for j in 0..3 {
            let mut pp = *p;
            let mut pm = *p;
            pp.r[j] += h;
            pm.r[j] -= h;
            out[j] = (self.eval(&pp) - self.eval(&pm)) / (2.0 * h);
        }
        out
    }

    /// Time derivative: analytic if supplied, otherwise central differences.
    pub fn time_derivative(&self, p: &SpaceTimePoint) -> f64 {
        if let Some(dt) = &self.dt {
            return dt(p);
        }
        let h = self.fd_step;
        let mut tp = *p;
        let mut tm = *p;
        tp.t += h;
        tm.t -= h;
        (self.eval(&tp) - self.eval(&tm)) / (2.0 * h)
    }
}

impl std::fmt::Debug for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ScalarField")
            .field("analytic_gradient", &self.grad.is_some())
            .field("analytic_dt", &self.dt.is_some())
            .field("fd_step", &self.fd_step)
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn reduced_wraps_into_fundamental_ranges() {
        let tau = 1.5;
        let p = SpaceTimePoint::new(-0.5, 7.0, 2.0 * std::f64::consts::PI, -0.1).reduced(tau);
        assert!(p.r.x >= 0.0 && p.r.x < 2.0 * std::f64::consts::PI);
        assert!(p.r.y >= 0.0 && p.r.y < 2.0 * std::f64::consts::PI);
        assert!(p.r.z >= 0.0 && p.r.z < 2.0 * std::f64::consts::PI);
        assert!(p.t >= 0.0 && p.t < tau);
        assert_abs_diff_eq!(p.t, 1.4, epsilon = 1e-12);
    }

    #[test]
    fn fd_gradient_matches_analytic() {
        let f = ScalarField::new(|p| p.r.x * p.r.x + 2.0 * p.r.y + p.t * p.r.z);
        let p = SpaceTimePoint::new(0.3, -0.7, 1.1, 0.5);
        let g = f.gradient(&p);
        assert_abs_diff_eq!(g.x, 0.6, epsilon = 1e-9);
        assert_abs_diff_eq!(g.y, 2.0, epsilon = 1e-9);
        assert_abs_diff_eq!(g.z, 0.5, epsilon = 1e-9);
        assert_abs_diff_eq!(f.time_derivative(&p), 1.1, epsilon = 1e-9);
    }

    #[test]
    fn curl_of_gradient_vanishes() {
        let v = VectorField::new(|p| {
            // gradient of x^2 y + sin(z)
            Vec3::new(2.0 * p.r.x * p.r.y, p.r.x * p.r.x, p.r.z.cos())
        });
        let p = SpaceTimePoint::new(0.4, 0.9, 0.2, 0.0);
        let c = v.curl_fd(&p, 1e-5);
        assert!(c.norm() < 1e-8);
    }
}
