//! Oriented polylines in 3-space with closure metadata, used for field
//! lines, fibers of complex scalars, and linking-number integrals.

use crate::field::Vec3;
use std::io::{BufRead, Write};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("a curve needs at least 8 distinct vertices, got {got}")]
    TooFewVertices { got: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed curve CSV at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

/// An oriented polyline. `closed` records whether the endpoint returned to
/// the start within the closure tolerance given at construction;
/// `closure_gap` is the endpoint-to-start distance either way.
#[derive(Debug, Clone)]
pub struct Curve3 {
    pub vertices: Vec<Vec3>,
    pub closed: bool,
    pub closure_gap: f64,
}

impl Curve3 {
    /// Builds a curve, dropping consecutive duplicate vertices. The curve is
    /// marked closed when the last vertex lies within `closure_tol` of the
    /// first.
    pub fn new(vertices: Vec<Vec3>, closure_tol: f64) -> Result<Self, CurveError> {
        let mut pts: Vec<Vec3> = Vec::with_capacity(vertices.len());
        for v in vertices {
            if pts.last().is_none_or(|last| *last != v) {
                pts.push(v);
            }
        }
        if pts.len() < 8 {
            return Err(CurveError::TooFewVertices { got: pts.len() });
        }
        let gap = (pts[pts.len() - 1] - pts[0]).norm();
        Ok(Self {
            vertices: pts,
            closed: gap < closure_tol,
            closure_gap: gap,
        })
    }

    /// Regular polygon approximation of a circle, for demos and tests.
    /// `frame` maps the unit-circle parameter point (cos a, sin a) into space.
    pub fn parametric(
        n: usize,
        frame: impl Fn(f64) -> Vec3,
        closure_tol: f64,
    ) -> Result<Self, CurveError> {
        let pts = (0..n)
            .map(|i| frame(2.0 * std::f64::consts::PI * i as f64 / n as f64))
            .collect();
        Self::new(pts, closure_tol)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Same trace with the opposite orientation.
    pub fn reversed(&self) -> Self {
        let mut v = self.vertices.clone();
        v.reverse();
        Self {
            vertices: v,
            closed: self.closed,
            closure_gap: self.closure_gap,
        }
    }

    /// Segment midpoints and displacement vectors, including the closing
    /// segment when the curve is closed.
    pub fn segments(&self) -> Vec<(Vec3, Vec3)> {
        let n = self.vertices.len();
        let count = if self.closed { n } else { n - 1 };
        (0..count)
            .map(|i| {
                let a = self.vertices[i];
                let b = self.vertices[(i + 1) % n];
                (0.5 * (a + b), b - a)
            })
            .collect()
    }

    /// Rigid transform applied to every vertex.
    pub fn transformed(&self, rot: &nalgebra::Rotation3<f64>, shift: Vec3) -> Self {
        Self {
            vertices: self.vertices.iter().map(|v| rot * v + shift).collect(),
            closed: self.closed,
            closure_gap: self.closure_gap,
        }
    }

    /// Writes the curve as CSV: a `# closed=...` comment, an `x,y,z` header,
    /// then one vertex per row in round-trip decimal formatting.
    pub fn to_csv<W: Write>(&self, out: &mut W) -> Result<(), CurveError> {
        writeln!(out, "# closed={}", self.closed)?;
        writeln!(out, "x,y,z")?;
        for v in &self.vertices {
            writeln!(out, "{},{},{}", v.x, v.y, v.z)?;
        }
        Ok(())
    }

    /// Parses the CSV format written by [`Curve3::to_csv`]. The closed flag
    /// from the comment header is honored verbatim.
    pub fn from_csv<R: BufRead>(input: R) -> Result<Self, CurveError> {
        let mut closed_flag: Option<bool> = None;
        let mut pts: Vec<Vec3> = Vec::new();
        for (idx, line) in input.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() {
                continue;
            }
            if let Some(rest) = trimmed.strip_prefix('#') {
                if let Some(v) = rest.trim().strip_prefix("closed=") {
                    closed_flag = Some(v.trim() == "true");
                }
                continue;
            }
            if trimmed.starts_with('x') {
                continue; // column header
            }
            let fields: Vec<&str> = trimmed.split(',').collect();
            if fields.len() != 3 {
                return Err(CurveError::Parse {
                    line: idx + 1,
                    reason: format!("expected 3 fields, got {}", fields.len()),
                });
            }
            let mut c = [0.0f64; 3];
            for (j, f) in fields.iter().enumerate() {
                c[j] = f.trim().parse().map_err(|e| CurveError::Parse {
                    line: idx + 1,
                    reason: format!("bad number {f:?}: {e}"),
                })?;
            }
            pts.push(Vec3::new(c[0], c[1], c[2]));
        }
        let gap = if pts.len() >= 2 {
            (pts[pts.len() - 1] - pts[0]).norm()
        } else {
            0.0
        };
        let mut curve = Curve3::new(pts, f64::INFINITY)?;
        curve.closed = closed_flag.unwrap_or(false);
        curve.closure_gap = gap;
        Ok(curve)
    }
}
