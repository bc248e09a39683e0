//! Sampled fields on grids and the discrete differential operators acting
//! on them.
//!
//! Conventions: `perp_gradient(f) = (d2 f, -d1 f)`, so that
//! `gradient(a) . perp_gradient(b) = d1a d2b - d2a d1b` and, on the
//! boundary of either domain, `perp_gradient(b) . nu = d_tau b` with the
//! tangent oriented so that the domain lies on its left.
//!
//! Derivatives are second-order. On the half-plane every axis uses the
//! three-point Lagrange stencil of the (possibly graded) node set, one-sided
//! at the edges. On the disk the radial derivative is centered everywhere
//! except the outer ring; at the innermost ring the stencil reaches across
//! the origin to the antipodal node. The angular difference is divided by
//! `2 sin(dtheta)` instead of `2 dtheta`, which keeps it second-order and
//! makes it exact on affine functions.

use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{Grid, HalfPlaneGrid, LineGrid, LineKind, Point, PolarGrid};

#[derive(Debug, Clone)]
pub struct ScalarField {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct VectorField {
    grid: Arc<Grid>,
    x: Vec<f64>,
    y: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    line: Arc<LineGrid>,
    values: Vec<f64>,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().position(|v| !v.is_finite()) {
        Some(i) => Err(Error::InvalidArgument(format!(
            "non-finite value {} at node {i}",
            values[i]
        ))),
        None => Ok(()),
    }
}

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

impl ScalarField {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} nodes",
                values.len(),
                grid.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Point) -> f64) -> Result<Self> {
        let values = grid.points().map(f).collect();
        Self::new(grid.clone(), values)
    }

    pub fn zeros(grid: &Arc<Grid>) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![0.0; grid.len()],
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &ScalarField) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + c * b)
                .collect(),
        })
    }

    pub fn sub(&self, other: &ScalarField) -> Result<Self> {
        self.axpy(-1.0, other)
    }

    pub fn add_constant(&self, c: f64) -> Self {
        self.map(|v| v + c)
    }

    /// Writes `x1,x2,value` rows, one per node.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "x1,x2,value")?;
        for (p, v) in self.grid.points().zip(&self.values) {
            writeln!(w, "{},{},{}", p[0], p[1], v)?;
        }
        Ok(())
    }
}

impl VectorField {
    pub fn new(grid: Arc<Grid>, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != grid.len() || y.len() != grid.len() {
            return Err(Error::InvalidArgument(
                "component length does not match node count".into(),
            ));
        }
        check_finite(&x)?;
        check_finite(&y)?;
        Ok(Self { grid, x, y })
    }

    pub fn from_fn(grid: &Arc<Grid>, f: impl Fn(Point) -> Point) -> Result<Self> {
        let (x, y) = grid.points().map(f).map(|v| (v[0], v[1])).unzip();
        Self::new(grid.clone(), x, y)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn magnitude(&self) -> Vec<f64> {
        self.x.iter().zip(&self.y).map(|(a, b)| a.hypot(*b)).collect()
    }

    /// Pointwise product `s * self`.
    pub fn scaled_by(&self, s: &ScalarField) -> Result<Self> {
        same_grid(&self.grid, &s.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            x: self.x.iter().zip(&s.values).map(|(v, s)| v * s).collect(),
            y: self.y.iter().zip(&s.values).map(|(v, s)| v * s).collect(),
        })
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: f64, other: &VectorField) -> Result<Self> {
        same_grid(&self.grid, &other.grid)?;
        Ok(Self {
            grid: self.grid.clone(),
            x: self.x.iter().zip(&other.x).map(|(a, b)| a + c * b).collect(),
            y: self.y.iter().zip(&other.y).map(|(a, b)| a + c * b).collect(),
        })
    }

    pub fn dot(&self, other: &VectorField) -> Result<ScalarField> {
        same_grid(&self.grid, &other.grid)?;
        let values = (0..self.len())
            .map(|i| self.x[i] * other.x[i] + self.y[i] * other.y[i])
            .collect();
        Ok(ScalarField {
            grid: self.grid.clone(),
            values,
        })
    }

    pub fn component_x(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.x.clone(),
        }
    }

    pub fn component_y(&self) -> ScalarField {
        ScalarField {
            grid: self.grid.clone(),
            values: self.y.clone(),
        }
    }
}

impl BoundaryTrace {
    pub fn new(line: Arc<LineGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != line.len() {
            return Err(Error::InvalidArgument(format!(
                "{} values for {} boundary nodes",
                values.len(),
                line.len()
            )));
        }
        check_finite(&values)?;
        Ok(Self { line, values })
    }

    /// Samples `f` at the boundary node coordinates (angle or `x1`).
    pub fn from_fn(line: &Arc<LineGrid>, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = line.nodes().iter().map(|&s| f(s)).collect();
        Self::new(line.clone(), values)
    }

    pub fn line(&self) -> &Arc<LineGrid> {
        &self.line
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn same_line(&self, other: &BoundaryTrace) -> Result<()> {
        if Arc::ptr_eq(&self.line, &other.line) || self.line == other.line {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn mul(&self, other: &BoundaryTrace) -> Result<Self> {
        self.same_line(other)?;
        Ok(Self {
            line: self.line.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            line: self.line.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    pub fn add(&self, other: &BoundaryTrace) -> Result<Self> {
        self.same_line(other)?;
        Ok(Self {
            line: self.line.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    pub fn integral(&self) -> f64 {
        self.values
            .iter()
            .zip(self.line.weights())
            .map(|(v, w)| v * w)
            .sum()
    }

    /// Piecewise-linear interpolation at boundary coordinate `s`. On a line
    /// the trace is taken as zero beyond the outermost nodes; on the circle
    /// `s` is an angle and wraps.
    pub fn value_at(&self, s: f64) -> f64 {
        let nodes = self.line.nodes();
        let n = nodes.len();
        match self.line.kind() {
            LineKind::Circle => {
                let dt = std::f64::consts::TAU / n as f64;
                let u = s.rem_euclid(std::f64::consts::TAU) / dt;
                let k = (u.floor() as usize) % n;
                let t = u - u.floor();
                (1.0 - t) * self.values[k] + t * self.values[(k + 1) % n]
            }
            LineKind::Line { .. } => {
                if s < nodes[0] || s > nodes[n - 1] {
                    return 0.0;
                }
                let k = nodes.partition_point(|&x| x <= s).clamp(1, n - 1);
                let (x0, x1) = (nodes[k - 1], nodes[k]);
                let t = (s - x0) / (x1 - x0);
                (1.0 - t) * self.values[k - 1] + t * self.values[k]
            }
        }
    }

    /// Writes `x1,value` rows (`theta,value` on the circle).
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        match self.line.kind() {
            LineKind::Circle => writeln!(w, "theta,value")?,
            LineKind::Line { .. } => writeln!(w, "x1,value")?,
        }
        for (s, v) in self.line.nodes().iter().zip(&self.values) {
            writeln!(w, "{s},{v}")?;
        }
        Ok(())
    }
}

/// Weights of the derivative at `xs[i]` of the quadratic through three
/// neighbouring nodes. Returns the stencil's first index and its weights.
fn stencil(xs: &[f64], i: usize) -> (usize, [f64; 3]) {
    let n = xs.len();
    let s = i.saturating_sub(1).min(n - 3);
    let (p0, p1, p2) = (xs[s], xs[s + 1], xs[s + 2]);
    let t = xs[i];
    (
        s,
        [
            ((t - p1) + (t - p2)) / ((p0 - p1) * (p0 - p2)),
            ((t - p0) + (t - p2)) / ((p1 - p0) * (p1 - p2)),
            ((t - p0) + (t - p1)) / ((p2 - p0) * (p2 - p1)),
        ],
    )
}

/// Derivative of `v` along one axis of a half-plane grid.
fn halfplane_partial(g: &HalfPlaneGrid, v: &[f64], axis: usize) -> Vec<f64> {
    let (n_x, n_y) = (g.n_x(), g.n_y());
    let mut out = vec![0.0; v.len()];
    if axis == 0 {
        let st: Vec<_> = (0..n_x).map(|i| stencil(g.x_nodes(), i)).collect();
        for j in 0..n_y {
            let row = &v[j * n_x..(j + 1) * n_x];
            for (i, (s, w)) in st.iter().enumerate() {
                out[j * n_x + i] = w[0] * row[*s] + w[1] * row[s + 1] + w[2] * row[s + 2];
            }
        }
    } else {
        for j in 0..n_y {
            let (s, w) = stencil(g.y_nodes(), j);
            for i in 0..n_x {
                out[j * n_x + i] = w[0] * v[s * n_x + i]
                    + w[1] * v[(s + 1) * n_x + i]
                    + w[2] * v[(s + 2) * n_x + i];
            }
        }
    }
    out
}

/// `(d_r v, r^-1 d_theta v)` on a polar grid.
fn polar_partials(g: &PolarGrid, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let (n_r, n_t) = (g.n_r(), g.n_theta());
    let dr = g.dr();
    let two_sin = 2.0 * g.dtheta().sin();
    let mut d_r = vec![0.0; v.len()];
    let mut d_t = vec![0.0; v.len()];
    for j in 0..n_r {
        let r = g.r_nodes()[j];
        for k in 0..n_t {
            let idx = j * n_t + k;
            d_r[idx] = if j == 0 {
                // signed radii -dr/2 (antipodal node) and 3dr/2 straddle dr/2
                let anti = (k + n_t / 2) % n_t;
                (v[n_t + k] - v[anti]) / (2.0 * dr)
            } else if j == n_r - 1 {
                (3.0 * v[idx] - 4.0 * v[idx - n_t] + v[idx - 2 * n_t]) / (2.0 * dr)
            } else {
                (v[idx + n_t] - v[idx - n_t]) / (2.0 * dr)
            };
            let kp = j * n_t + (k + 1) % n_t;
            let km = j * n_t + (k + n_t - 1) % n_t;
            d_t[idx] = (v[kp] - v[km]) / (two_sin * r);
        }
    }
    (d_r, d_t)
}

fn partials(grid: &Grid, v: &[f64]) -> (Vec<f64>, Vec<f64>) {
    match grid {
        Grid::HalfPlane(g) => (halfplane_partial(g, v, 0), halfplane_partial(g, v, 1)),
        Grid::Polar(g) => {
            let (d_r, d_t) = polar_partials(g, v);
            let n_t = g.n_theta();
            let mut gx = vec![0.0; v.len()];
            let mut gy = vec![0.0; v.len()];
            for idx in 0..v.len() {
                let t = g.theta_nodes()[idx % n_t];
                let (s, c) = t.sin_cos();
                gx[idx] = c * d_r[idx] - s * d_t[idx];
                gy[idx] = s * d_r[idx] + c * d_t[idx];
            }
            (gx, gy)
        }
    }
}

pub fn gradient(f: &ScalarField) -> VectorField {
    let (x, y) = partials(&f.grid, &f.values);
    VectorField {
        grid: f.grid.clone(),
        x,
        y,
    }
}

/// `(d2 f, -d1 f)`.
pub fn perp_gradient(f: &ScalarField) -> VectorField {
    let g = gradient(f);
    VectorField {
        grid: g.grid,
        x: g.y,
        y: g.x.into_iter().map(|v| -v).collect(),
    }
}

/// `d1a d2b - d2a d1b = grad a . perp_grad b`.
pub fn jacobian(a: &ScalarField, b: &ScalarField) -> Result<ScalarField> {
    same_grid(&a.grid, &b.grid)?;
    let ga = gradient(a);
    let gb = gradient(b);
    let values = (0..a.len())
        .map(|i| ga.x[i] * gb.y[i] - ga.y[i] * gb.x[i])
        .collect();
    Ok(ScalarField {
        grid: a.grid.clone(),
        values,
    })
}

pub fn divergence(v: &VectorField) -> ScalarField {
    let (dxx, _) = partials(&v.grid, &v.x);
    let (_, dyy) = partials(&v.grid, &v.y);
    ScalarField {
        grid: v.grid.clone(),
        values: dxx.iter().zip(&dyy).map(|(a, b)| a + b).collect(),
    }
}

/// `d1 V2 - d2 V1`.
pub fn curl(v: &VectorField) -> ScalarField {
    let (_, dy1) = partials(&v.grid, &v.x);
    let (dx2, _) = partials(&v.grid, &v.y);
    ScalarField {
        grid: v.grid.clone(),
        values: dx2.iter().zip(&dy1).map(|(a, b)| a - b).collect(),
    }
}

/// Boundary values by quadratic extrapolation from the three layers
/// nearest the boundary (outer rings on the disk, bottom rows on the
/// half-plane).
pub fn trace(f: &ScalarField) -> BoundaryTrace {
    let values = match f.grid.as_ref() {
        Grid::Polar(g) => {
            let (n_r, n_t) = (g.n_r(), g.n_theta());
            let ring = |j: usize, k: usize| f.values[j * n_t + k];
            // Lagrange weights at r = 1 for nodes 1 - dr/2, 1 - 3dr/2, 1 - 5dr/2
            (0..n_t)
                .map(|k| {
                    1.875 * ring(n_r - 1, k) - 1.25 * ring(n_r - 2, k) + 0.375 * ring(n_r - 3, k)
                })
                .collect()
        }
        Grid::HalfPlane(g) => {
            let n_x = g.n_x();
            let y = g.y_nodes();
            let w = [
                y[1] * y[2] / ((y[0] - y[1]) * (y[0] - y[2])),
                y[0] * y[2] / ((y[1] - y[0]) * (y[1] - y[2])),
                y[0] * y[1] / ((y[2] - y[0]) * (y[2] - y[1])),
            ];
            (0..n_x)
                .map(|i| {
                    w[0] * f.values[i] + w[1] * f.values[n_x + i] + w[2] * f.values[2 * n_x + i]
                })
                .collect()
        }
    };
    BoundaryTrace {
        line: f.grid.boundary().clone(),
        values,
    }
}

/// Derivative along the boundary with respect to arclength, in the
/// direction of [`LineGrid::tangent`].
pub fn tangential_derivative(t: &BoundaryTrace) -> BoundaryTrace {
    let n = t.len();
    let v = &t.values;
    let values = match t.line.kind() {
        LineKind::Circle => {
            let two_sin = 2.0 * (std::f64::consts::TAU / n as f64).sin();
            (0..n)
                .map(|k| (v[(k + 1) % n] - v[(k + n - 1) % n]) / two_sin)
                .collect()
        }
        LineKind::Line { .. } => (0..n)
            .map(|i| {
                let (s, w) = stencil(t.line.nodes(), i);
                w[0] * v[s] + w[1] * v[s + 1] + w[2] * v[s + 2]
            })
            .collect(),
    };
    BoundaryTrace {
        line: t.line.clone(),
        values,
    }
}

/// Normal component `V . nu` of a vector field's boundary trace.
pub fn normal_trace(v: &VectorField) -> BoundaryTrace {
    let tx = trace(&v.component_x());
    let ty = trace(&v.component_y());
    let line = tx.line.clone();
    let values = (0..line.len())
        .map(|i| {
            let n = line.normal(i);
            tx.values[i] * n[0] + ty.values[i] * n[1]
        })
        .collect();
    BoundaryTrace { line, values }
}

pub fn integral(f: &ScalarField) -> f64 {
    f.values
        .iter()
        .zip(f.grid.cell_areas())
        .map(|(v, a)| v * a)
        .sum()
}

pub fn mean(f: &ScalarField) -> f64 {
    integral(f) / f.grid.cell_areas().iter().sum::<f64>()
}
