//! Deterministic tensor-product quadrature over boxes, the spacetime
//! fundamental cell, 4-tori, and along polylines.
//!
//! Axis rules:
//! * periodic axes use the trapezoidal rule without the duplicated endpoint,
//!   which is spectrally accurate for smooth periodic integrands and exact
//!   to rounding for trigonometric polynomials below the Nyquist degree;
//! * closed axes use composite 4-point Gauss-Legendre panels.
//!
//! Reductions are compensated (Neumaier) sums accumulated in a fixed axis
//! order. The outermost axis may be partitioned across rayon workers; the
//! per-slice partials are combined in index order, so results are
//! bit-reproducible across runs and across worker counts.

use crate::curve::Curve3;
use crate::field::{SpaceTimePoint, Vec3};
use rayon::prelude::*;
use serde::Serialize;
use std::io::Write;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QuadError {
    #[error("ResolutionTooLow: axis {axis} has {points} points, need at least 2")]
    ResolutionTooLow { axis: usize, points: usize },
    #[error("OpenCurve: closure gap {gap:.3e} exceeds tolerance")]
    OpenCurve { gap: f64 },
}

/// Sampling rule along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxisKind {
    /// Uniform open-ended sampling on `[lo, hi)`, trapezoidal weights.
    Periodic,
    /// Composite 4-point Gauss-Legendre panels on `[lo, hi]`.
    Closed,
}

/// One axis of a tensor-product grid.
#[derive(Debug, Clone, Serialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub kind: AxisKind,
}

// 4-point Gauss-Legendre nodes and weights on [-1, 1].
const GL4_NODES: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_26,
    0.339_981_043_584_856_26,
    0.861_136_311_594_052_6,
];
const GL4_WEIGHTS: [f64; 4] = [
    0.347_854_845_137_453_86,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_86,
];

impl Axis {
    pub fn periodic(lo: f64, hi: f64, points: usize) -> Self {
        Self {
            lo,
            hi,
            points,
            kind: AxisKind::Periodic,
        }
    }

    pub fn closed(lo: f64, hi: f64, points: usize) -> Self {
        // composite GL4 panels always carry a multiple of 4 nodes
        let panels = points.div_ceil(4).max(1);
        Self {
            lo,
            hi,
            points: 4 * panels,
            kind: AxisKind::Closed,
        }
    }

    /// Quadrature nodes and weights for this axis.
    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        match self.kind {
            AxisKind::Periodic => {
                let n = self.points;
                let h = (self.hi - self.lo) / n as f64;
                let nodes = (0..n).map(|i| self.lo + i as f64 * h).collect();
                let weights = vec![h; n];
                (nodes, weights)
            }
            AxisKind::Closed => {
                let panels = self.points / 4;
                let h = (self.hi - self.lo) / panels as f64;
                let mut nodes = Vec::with_capacity(self.points);
                let mut weights = Vec::with_capacity(self.points);
                for p in 0..panels {
                    let a = self.lo + p as f64 * h;
                    let mid = a + 0.5 * h;
                    for q in 0..4 {
                        nodes.push(mid + 0.5 * h * GL4_NODES[q]);
                        weights.push(0.5 * h * GL4_WEIGHTS[q]);
                    }
                }
                (nodes, weights)
            }
        }
    }

    fn halved(&self) -> Self {
        let n = (self.points / 2).max(2);
        match self.kind {
            AxisKind::Periodic => Axis::periodic(self.lo, self.hi, n),
            AxisKind::Closed => Axis::closed(self.lo, self.hi, n.max(4)),
        }
    }
}

/// Tensor-product grid specification.
#[derive(Debug, Clone, Serialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>) -> Self {
        Self { axes }
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn points_per_dim(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.points).collect()
    }

    /// The cavity `[0, π]³` sampled periodically. Mode-field integrands are
    /// π-periodic trigonometric polynomials in each coordinate, so this grid
    /// integrates them exactly to rounding.
    pub fn cavity(points: usize) -> Self {
        let pi = std::f64::consts::PI;
        Self::new(vec![
            Axis::periodic(0.0, pi, points),
            Axis::periodic(0.0, pi, points),
            Axis::periodic(0.0, pi, points),
        ])
    }

    /// The cavity `[0, π]³` with composite Gauss-Legendre panels, for
    /// integrands that are not periodic over the box.
    pub fn cavity_closed(points: usize) -> Self {
        let pi = std::f64::consts::PI;
        Self::new(vec![
            Axis::closed(0.0, pi, points),
            Axis::closed(0.0, pi, points),
            Axis::closed(0.0, pi, points),
        ])
    }

    /// The full 4-torus `[0, 2π)³ × [0, tau)`.
    pub fn torus4(space_points: usize, time_points: usize, tau: f64) -> Self {
        let period = 2.0 * std::f64::consts::PI;
        Self::new(vec![
            Axis::periodic(0.0, period, space_points),
            Axis::periodic(0.0, period, space_points),
            Axis::periodic(0.0, period, space_points),
            Axis::periodic(0.0, tau, time_points),
        ])
    }

    /// The fundamental cell `C × [0, tau/4]`: periodic cavity axes and a
    /// closed quarter-period time axis.
    pub fn fundamental_cell(space_points: usize, time_points: usize, tau: f64) -> Self {
        let pi = std::f64::consts::PI;
        Self::new(vec![
            Axis::periodic(0.0, pi, space_points),
            Axis::periodic(0.0, pi, space_points),
            Axis::periodic(0.0, pi, space_points),
            Axis::closed(0.0, tau / 4.0, time_points),
        ])
    }

    fn halved(&self) -> Self {
        Self::new(self.axes.iter().map(Axis::halved).collect())
    }

    fn validate(&self) -> Result<(), QuadError> {
        for (i, a) in self.axes.iter().enumerate() {
            if a.points < 2 {
                return Err(QuadError::ResolutionTooLow {
                    axis: i,
                    points: a.points,
                });
            }
        }
        Ok(())
    }
}

/// Quadrature value with a resolution-doubling error estimate.
#[derive(Debug, Clone, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_estimate: f64,
    pub grid: GridSpec,
    /// (points per dimension, value) pairs, coarsest first.
    pub history: Vec<(Vec<usize>, f64)>,
}

/// Neumaier compensated accumulator; keeps the reduction error near one ulp
/// of the running sum regardless of term count.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Single-pass tensor quadrature without the error estimate.
///
/// The outermost axis is partitioned across workers; per-slice partial sums
/// are combined sequentially in index order so the result does not depend on
/// the worker count.
pub fn integrate_value<F>(f: &F, grid: &GridSpec) -> Result<f64, QuadError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid.validate()?;
    let rules: Vec<(Vec<f64>, Vec<f64>)> = grid.axes.iter().map(Axis::nodes_weights).collect();
    let dims = rules.len();
    if dims == 0 {
        return Ok(0.0);
    }
    let (outer_nodes, outer_weights) = &rules[0];
    let inner: Vec<&(Vec<f64>, Vec<f64>)> = rules[1..].iter().collect();

    let partials: Vec<f64> = outer_nodes
        .par_iter()
        .zip(outer_weights.par_iter())
        .map(|(&x0, &w0)| {
            let mut coord = vec![0.0f64; dims];
            coord[0] = x0;
            let mut acc = CompensatedSum::default();
            accumulate_inner(f, &inner, &mut coord, 1, w0, &mut acc);
            acc.value()
        })
        .collect();

    let mut total = CompensatedSum::default();
    for p in partials {
        total.add(p);
    }
    Ok(total.value())
}

fn accumulate_inner<F>(
    f: &F,
    inner: &[&(Vec<f64>, Vec<f64>)],
    coord: &mut Vec<f64>,
    depth: usize,
    weight: f64,
    acc: &mut CompensatedSum,
) where
    F: Fn(&[f64]) -> f64 + Sync,
{
    if depth == coord.len() {
        acc.add(weight * f(coord));
        return;
    }
    let (nodes, weights) = inner[depth - 1];
    for (x, w) in nodes.iter().zip(weights.iter()) {
        coord[depth] = *x;
        accumulate_inner(f, inner, coord, depth + 1, weight * w, acc);
    }
}

/// Tensor-product quadrature with a doubling-based error estimate.
///
/// The integral is evaluated at the requested resolution and at half the
/// resolution per axis; `err_estimate` is the absolute difference.
pub fn integrate_box<F>(f: &F, grid: &GridSpec) -> Result<QuadResult, QuadError>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    grid.validate()?;
    let coarse = grid.halved();
    let v_coarse = integrate_value(f, &coarse)?;
    let v = integrate_value(f, grid)?;
    Ok(QuadResult {
        value: v,
        err_estimate: (v - v_coarse).abs(),
        grid: grid.clone(),
        history: vec![
            (coarse.points_per_dim(), v_coarse),
            (grid.points_per_dim(), v),
        ],
    })
}

/// 4D quadrature of a spacetime scalar over the fundamental cell
/// `C × [0, tau/4]` with the default axis kinds of
/// [`GridSpec::fundamental_cell`].
pub fn integrate_cell<F>(
    f: &F,
    mode_tau: f64,
    space_points: usize,
    time_points: usize,
) -> Result<QuadResult, QuadError>
where
    F: Fn(&SpaceTimePoint) -> f64 + Sync,
{
    let grid = GridSpec::fundamental_cell(space_points, time_points, mode_tau);
    let g = |c: &[f64]| f(&SpaceTimePoint::new(c[0], c[1], c[2], c[3]));
    integrate_box(&g, &grid)
}

/// Midpoint-rule circulation of a spatial vector field along a closed
/// polyline: `Σ f(midpoint) · Δr` over all segments including the closing
/// one.
pub fn line_integral<F>(curve: &Curve3, f: &F) -> Result<f64, QuadError>
where
    F: Fn(&Vec3) -> Vec3,
{
    if !curve.closed {
        return Err(QuadError::OpenCurve {
            gap: curve.closure_gap,
        });
    }
    let mut acc = CompensatedSum::default();
    for (mid, delta) in curve.segments() {
        acc.add(f(&mid).dot(&delta));
    }
    Ok(acc.value())
}

/// Writes grid samples of a spacetime scalar at fixed time `t` as CSV with
/// header `x,y,z,t,value`, rows in row-major order over the grid axes.
/// Values are printed with shortest round-trip decimal formatting, so output
/// is byte-identical for identical inputs.
pub fn dump_grid_csv<F, W>(f: &F, grid: &GridSpec, t: f64, out: &mut W) -> std::io::Result<usize>
where
    F: Fn(&SpaceTimePoint) -> f64,
    W: Write,
{
    assert_eq!(grid.dims(), 3, "dump_grid_csv expects a 3D spatial grid");
    writeln!(out, "x,y,z,t,value")?;
    let nodes: Vec<Vec<f64>> = grid.axes.iter().map(|a| a.nodes_weights().0).collect();
    let mut rows = 0usize;
    for &x in &nodes[0] {
        for &y in &nodes[1] {
            for &z in &nodes[2] {
                let v = f(&SpaceTimePoint::new(x, y, z, t));
                writeln!(out, "{x},{y},{z},{t},{v}")?;
                rows += 1;
            }
        }
    }
    Ok(rows)
}
