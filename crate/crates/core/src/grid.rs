//! Discretizations of the unit disk, a truncated upper half-plane and their
//! boundaries, plus the Cayley map between disk and half-plane.
//!
//! All grids are cell-centered: every node sits at the center of a cell and
//! carries that cell's area (or length, on a boundary) as its quadrature
//! weight. No node ever lies on `r = 0` or on the line `x2 = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

/// Adjacent-cell ratio used by the log-graded spacing.
pub const GRADING_RATIO: f64 = 1.2;

pub const MIN_RADIAL_CELLS: usize = 4;
pub const MIN_ANGULAR_NODES: usize = 8;

/// Polar discretization of the unit disk.
///
/// Nodes are indexed ring-major: node `j * n_theta + k` sits at radius
/// `r_j = (j + 1/2) / n_r` and angle `theta_k = 2 pi k / n_theta`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    n_r: usize,
    n_theta: usize,
    r_nodes: Vec<f64>,
    theta_nodes: Vec<f64>,
    cell_areas: Vec<f64>,
    boundary: Arc<LineGrid>,
}

impl PolarGrid {
    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.n_r as f64
    }

    pub fn dtheta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta_nodes
    }

    pub fn cell_areas(&self) -> &[f64] {
        &self.cell_areas
    }

    pub fn index(&self, j: usize, k: usize) -> usize {
        j * self.n_theta + k
    }

    pub fn point(&self, idx: usize) -> Point {
        let r = self.r_nodes[idx / self.n_theta];
        let t = self.theta_nodes[idx % self.n_theta];
        [r * t.cos(), r * t.sin()]
    }

    pub fn boundary(&self) -> &Arc<LineGrid> {
        &self.boundary
    }
}

/// Build a polar grid with cell-centered radii `(j + 1/2) / n_r`.
pub fn make_polar_grid(n_r: usize, n_theta: usize) -> Result<PolarGrid> {
    if n_r < MIN_RADIAL_CELLS {
        return Err(Error::InvalidGrid(format!(
            "n_r = {n_r} is below the minimum {MIN_RADIAL_CELLS}"
        )));
    }
    if n_theta < MIN_ANGULAR_NODES || !n_theta.is_multiple_of(2) {
        return Err(Error::InvalidGrid(format!(
            "n_theta = {n_theta} must be even and at least {MIN_ANGULAR_NODES}"
        )));
    }
    let dr = 1.0 / n_r as f64;
    let dtheta = 2.0 * PI / n_theta as f64;
    let r_nodes: Vec<f64> = (0..n_r).map(|j| (j as f64 + 0.5) * dr).collect();
    let theta_nodes: Vec<f64> = (0..n_theta).map(|k| k as f64 * dtheta).collect();
    let cell_areas = r_nodes
        .iter()
        .flat_map(|&r| std::iter::repeat_n(r * dr * dtheta, n_theta))
        .collect();
    let boundary = Arc::new(LineGrid {
        kind: LineKind::Circle,
        nodes: theta_nodes.clone(),
        weights: vec![dtheta; n_theta],
    });
    Ok(PolarGrid {
        n_r,
        n_theta,
        r_nodes,
        theta_nodes,
        cell_areas,
        boundary,
    })
}

/// Truncated upper half-plane `[-L, L] x (0, H]`.
///
/// Nodes are indexed row-major: node `j * n_x + i` sits at
/// `(x_nodes[i], y_nodes[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlaneGrid {
    half_width: f64,
    height: f64,
    refined: bool,
    x_nodes: Vec<f64>,
    x_widths: Vec<f64>,
    y_nodes: Vec<f64>,
    y_widths: Vec<f64>,
    cell_areas: Vec<f64>,
    boundary: Arc<LineGrid>,
}

impl HalfPlaneGrid {
    pub fn n_x(&self) -> usize {
        self.x_nodes.len()
    }

    pub fn n_y(&self) -> usize {
        self.y_nodes.len()
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn is_refined(&self) -> bool {
        self.refined
    }

    pub fn x_nodes(&self) -> &[f64] {
        &self.x_nodes
    }

    pub fn x_widths(&self) -> &[f64] {
        &self.x_widths
    }

    pub fn y_nodes(&self) -> &[f64] {
        &self.y_nodes
    }

    pub fn y_widths(&self) -> &[f64] {
        &self.y_widths
    }

    pub fn cell_areas(&self) -> &[f64] {
        &self.cell_areas
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.x_nodes.len() + i
    }

    pub fn point(&self, idx: usize) -> Point {
        let n_x = self.x_nodes.len();
        [self.x_nodes[idx % n_x], self.y_nodes[idx / n_x]]
    }

    /// Cell rectangle `[x0, x1] x [y0, y1]` of node `idx`.
    pub fn cell(&self, idx: usize) -> [f64; 4] {
        let n_x = self.x_nodes.len();
        let (i, j) = (idx % n_x, idx / n_x);
        let (hx, hy) = (self.x_widths[i], self.y_widths[j]);
        let (x, y) = (self.x_nodes[i], self.y_nodes[j]);
        [x - hx / 2.0, x + hx / 2.0, y - hy / 2.0, y + hy / 2.0]
    }

    pub fn boundary(&self) -> &Arc<LineGrid> {
        &self.boundary
    }
}

/// Build a half-plane grid with `n_x * n_y` cells.
///
/// With `refine` set, cell widths grow geometrically (ratio
/// [`GRADING_RATIO`]) away from `x = 0` and from `y = 0` until they reach
/// twice the uniform spacing, and stay constant beyond. `n_x` must then be
/// even so the grid is symmetric about `x = 0`.
pub fn make_halfplane_grid(
    n_x: usize,
    n_y: usize,
    half_width: f64,
    height: f64,
    refine: bool,
) -> Result<HalfPlaneGrid> {
    if !(half_width > 0.0 && height > 0.0) || !half_width.is_finite() || !height.is_finite() {
        return Err(Error::InvalidGrid(format!(
            "extents must be positive, got L = {half_width}, H = {height}"
        )));
    }
    if n_x < 3 || n_y < 3 {
        return Err(Error::InvalidGrid(format!(
            "need at least 3 cells per direction, got {n_x} x {n_y}"
        )));
    }
    let (x_widths, y_widths) = if refine {
        if !n_x.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "refined grids need an even n_x, got {n_x}"
            )));
        }
        let half = graded_widths(n_x / 2, half_width);
        let mut xw: Vec<f64> = half.iter().rev().copied().collect();
        xw.extend_from_slice(&half);
        (xw, graded_widths(n_y, height))
    } else {
        (
            vec![2.0 * half_width / n_x as f64; n_x],
            vec![height / n_y as f64; n_y],
        )
    };
    let x_nodes = if refine {
        let half = centers(0.0, &x_widths[n_x / 2..]);
        let mut xn: Vec<f64> = half.iter().rev().map(|x| -x).collect();
        xn.extend_from_slice(&half);
        xn
    } else {
        centers(-half_width, &x_widths)
    };
    let y_nodes = centers(0.0, &y_widths);
    let cell_areas = y_widths
        .iter()
        .flat_map(|&hy| x_widths.iter().map(move |&hx| hx * hy))
        .collect();
    let boundary = Arc::new(LineGrid {
        kind: LineKind::Line { half_width },
        nodes: x_nodes.clone(),
        weights: x_widths.clone(),
    });
    Ok(HalfPlaneGrid {
        half_width,
        height,
        refined: refine,
        x_nodes,
        x_widths,
        y_nodes,
        y_widths,
        cell_areas,
        boundary,
    })
}

fn centers(start: f64, widths: &[f64]) -> Vec<f64> {
    let mut edge = start;
    widths
        .iter()
        .map(|&w| {
            let c = edge + w / 2.0;
            edge += w;
            c
        })
        .collect()
}

/// `m` widths starting at 0, graded geometrically up to a cap of twice the
/// uniform width, summing to `extent`.
fn graded_widths(m: usize, extent: f64) -> Vec<f64> {
    let cap = 2.0 * extent / m as f64;
    let widths = |h0: f64| -> Vec<f64> {
        let mut h = h0;
        (0..m)
            .map(|_| {
                let w = h.min(cap);
                h *= GRADING_RATIO;
                w
            })
            .collect()
    };
    let (mut lo, mut hi) = (0.0, cap);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if widths(mid).iter().sum::<f64>() < extent {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = widths(0.5 * (lo + hi));
    let scale = extent / w.iter().sum::<f64>();
    w.into_iter().map(|x| x * scale).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LineKind {
    /// The unit circle; nodes are angles.
    Circle,
    /// The segment `[-L, L] x {0}`; nodes are `x1` coordinates.
    Line { half_width: f64 },
}

/// Boundary nodes with 1D quadrature weights.
#[derive(Debug, Clone, PartialEq)]
pub struct LineGrid {
    kind: LineKind,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl LineGrid {
    pub fn kind(&self) -> LineKind {
        self.kind
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn length(&self) -> f64 {
        match self.kind {
            LineKind::Circle => 2.0 * PI,
            LineKind::Line { half_width } => 2.0 * half_width,
        }
    }

    pub fn point(&self, i: usize) -> Point {
        match self.kind {
            LineKind::Circle => [self.nodes[i].cos(), self.nodes[i].sin()],
            LineKind::Line { .. } => [self.nodes[i], 0.0],
        }
    }

    /// Unit outward normal at node `i`.
    pub fn normal(&self, i: usize) -> Point {
        match self.kind {
            LineKind::Circle => self.point(i),
            LineKind::Line { .. } => [0.0, -1.0],
        }
    }

    /// Unit tangent at node `i`, oriented so the domain lies on its left.
    pub fn tangent(&self, i: usize) -> Point {
        let [nx, ny] = self.normal(i);
        [-ny, nx]
    }

    /// Distance between nodes `i` and `j` (chordal on the circle).
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match self.kind {
            LineKind::Circle => 2.0 * (0.5 * (self.nodes[i] - self.nodes[j])).sin().abs(),
            LineKind::Line { .. } => (self.nodes[i] - self.nodes[j]).abs(),
        }
    }
}

/// A grid of either kind. Fields hold an `Arc<Grid>`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Polar(PolarGrid),
    HalfPlane(HalfPlaneGrid),
}

impl Grid {
    pub fn shared(self) -> Arc<Grid> {
        Arc::new(self)
    }

    pub fn len(&self) -> usize {
        self.cell_areas().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_areas(&self) -> &[f64] {
        match self {
            Grid::Polar(g) => g.cell_areas(),
            Grid::HalfPlane(g) => g.cell_areas(),
        }
    }

    pub fn area(&self) -> f64 {
        match self {
            Grid::Polar(_) => PI,
            Grid::HalfPlane(g) => 2.0 * g.half_width() * g.height(),
        }
    }

    pub fn point(&self, idx: usize) -> Point {
        match self {
            Grid::Polar(g) => g.point(idx),
            Grid::HalfPlane(g) => g.point(idx),
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    pub fn boundary(&self) -> &Arc<LineGrid> {
        match self {
            Grid::Polar(g) => g.boundary(),
            Grid::HalfPlane(g) => g.boundary(),
        }
    }

    pub fn as_polar(&self) -> Result<&PolarGrid> {
        match self {
            Grid::Polar(g) => Ok(g),
            _ => Err(Error::WrongGrid { expected: "polar" }),
        }
    }

    pub fn as_halfplane(&self) -> Result<&HalfPlaneGrid> {
        match self {
            Grid::HalfPlane(g) => Ok(g),
            _ => Err(Error::WrongGrid {
                expected: "half-plane",
            }),
        }
    }
}

impl From<PolarGrid> for Grid {
    fn from(g: PolarGrid) -> Self {
        Grid::Polar(g)
    }
}

impl From<HalfPlaneGrid> for Grid {
    fn from(g: HalfPlaneGrid) -> Self {
        Grid::HalfPlane(g)
    }
}

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Cayley map `z -> i (1 - z) / (1 + z)` from the closed disk minus `-1`
/// onto the closed upper half-plane. Sends `0` to `(0, 1)` and `1` to the
/// origin.
pub fn cayley_to_halfplane(p: Point) -> Result<Point> {
    let z = Complex64::new(p[0], p[1]);
    if !(z.norm() <= 1.0 + 1e-12) || (z + 1.0).norm() < 1e-300 {
        return Err(Error::OutsideDomain(p));
    }
    let w = I * (1.0 - z) / (1.0 + z);
    if !w.re.is_finite() || !w.im.is_finite() {
        return Err(Error::OutsideDomain(p));
    }
    Ok([w.re, w.im.max(0.0)])
}

/// Inverse Cayley map `w -> (i - w) / (i + w)`.
pub fn cayley_to_disk(p: Point) -> Result<Point> {
    if !p[0].is_finite() || !p[1].is_finite() || p[1] < -1e-12 {
        return Err(Error::OutsideDomain(p));
    }
    let w = Complex64::new(p[0], p[1]);
    let z = (I - w) / (I + w);
    Ok([z.re, z.im])
}

/// `|d Phi / dz|` of the forward Cayley map, `2 / |1 + z|^2`.
pub fn cayley_stretch(p: Point) -> f64 {
    let z = Complex64::new(p[0], p[1]);
    2.0 / (1.0 + z).norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn polar_nodes_are_cell_centered() {
        let g = make_polar_grid(4, 8).unwrap();
        assert_eq!(g.r_nodes(), &[0.125, 0.375, 0.625, 0.875]);
        assert!(g.r_nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn polar_area_is_pi() {
        for (n_r, n_t) in [(4, 8), (17, 30), (128, 128)] {
            let g = make_polar_grid(n_r, n_t).unwrap();
            let area: f64 = g.cell_areas().iter().sum();
            assert_relative_eq!(area, PI, max_relative = 1e-6);
        }
    }

    #[test]
    fn polar_rejects_bad_counts() {
        assert!(make_polar_grid(3, 8).is_err());
        assert!(make_polar_grid(4, 9).is_err());
        assert!(make_polar_grid(4, 6).is_err());
    }

    #[test]
    fn uniform_halfplane() {
        let g = make_halfplane_grid(64, 64, 1.0, 1.0, false).unwrap();
        assert_eq!(g.n_x(), 64);
        assert_relative_eq!(g.x_widths()[0], 1.0 / 32.0);
        assert_relative_eq!(g.y_widths()[0], 1.0 / 64.0);
        assert_relative_eq!(g.x_nodes()[0], -1.0 + 1.0 / 64.0);
        let area: f64 = g.cell_areas().iter().sum();
        assert_relative_eq!(area, 2.0, max_relative = 1e-6);
        assert!(g.y_nodes().iter().all(|&y| y > 0.0));
    }

    #[test]
    fn refined_halfplane_is_graded() {
        let g = make_halfplane_grid(128, 64, 1.0, 1.0, true).unwrap();
        let area: f64 = g.cell_areas().iter().sum();
        assert_relative_eq!(area, 2.0, max_relative = 1e-6);
        let uniform = 2.0 / 128.0;
        let min = g.x_widths().iter().copied().fold(f64::MAX, f64::min);
        assert!(min < uniform);
        for w in [g.x_widths(), g.y_widths()] {
            for p in w.windows(2) {
                let r = p[1] / p[0];
                assert!((1.0 / GRADING_RATIO - 1e-9..=GRADING_RATIO + 1e-9).contains(&r));
            }
        }
        // strictly increasing away from the origin until the cap
        let half = &g.x_widths()[64..];
        assert!(half[1] > half[0]);
        // symmetric about x = 0
        for i in 0..64 {
            assert_eq!(g.x_nodes()[i], -g.x_nodes()[127 - i]);
        }
    }

    #[test]
    fn halfplane_rejects_bad_input() {
        assert!(make_halfplane_grid(0, 64, 1.0, 1.0, false).is_err());
        assert!(make_halfplane_grid(64, 64, 0.0, 1.0, false).is_err());
        assert!(make_halfplane_grid(64, 64, 1.0, -1.0, false).is_err());
        assert!(make_halfplane_grid(63, 64, 1.0, 1.0, true).is_err());
    }

    #[test]
    fn boundary_weights_sum_to_length() {
        let g = make_polar_grid(8, 64).unwrap();
        let s: f64 = g.boundary().weights().iter().sum();
        assert_relative_eq!(s, 2.0 * PI, max_relative = 1e-6);
        let h = make_halfplane_grid(100, 10, 1.5, 1.0, true).unwrap();
        let s: f64 = h.boundary().weights().iter().sum();
        assert_relative_eq!(s, 3.0, max_relative = 1e-6);
        assert!(h.boundary().weights().iter().all(|&w| w > 0.0));
    }

    #[test]
    fn cayley_normalization() {
        let c = cayley_to_halfplane([0.0, 0.0]).unwrap();
        assert!((c[0]).abs() < 1e-15 && (c[1] - 1.0).abs() < 1e-15);
        let o = cayley_to_halfplane([1.0, 0.0]).unwrap();
        assert!(o[0].abs() < 1e-15 && o[1].abs() < 1e-15);
        assert!(cayley_to_halfplane([-1.0, 0.0]).is_err());
        assert!(cayley_to_disk([f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn cayley_maps_circle_to_line() {
        for k in 1..20 {
            let t = -PI + 2.0 * PI * k as f64 / 20.0 + 0.01;
            let w = cayley_to_halfplane([t.cos(), t.sin()]).unwrap();
            assert!(w[1].abs() < 1e-12);
        }
    }

    #[test]
    fn midpoint_integration_converges_at_second_order() {
        // smooth f = exp(x1) cos(x2) over [-1,1] x (0,1]
        let exact = (1f64.exp() - (-1f64).exp()) * 1f64.sin();
        let err = |n: usize| {
            let g: Grid = make_halfplane_grid(n, n, 1.0, 1.0, false).unwrap().into();
            let s: f64 = g
                .points()
                .zip(g.cell_areas())
                .map(|(p, a)| p[0].exp() * p[1].cos() * a)
                .sum();
            s - exact
        };
        let (e1, e2, e3) = (err(16), err(32), err(64));
        let r1 = (e1 - e2) / (e2 - e3);
        assert!((3.5..=4.5).contains(&r1), "Richardson ratio {r1}");
        // same on the disk, f = |x|^4
        let errd = |n: usize| {
            let g: Grid = make_polar_grid(n, 2 * n).unwrap().into();
            g.points()
                .zip(g.cell_areas())
                .map(|(p, a)| (p[0] * p[0] + p[1] * p[1]).powi(2) * a)
                .sum::<f64>()
                - PI / 3.0
        };
        let r = (errd(16) - errd(32)) / (errd(32) - errd(64));
        assert!((3.5..=4.5).contains(&r), "disk Richardson ratio {r}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn cayley_round_trip(r in 0.0f64..0.999, t in -3.1f64..3.1) {
            let p = [r * t.cos(), r * t.sin()];
            let q = cayley_to_disk(cayley_to_halfplane(p).unwrap()).unwrap();
            prop_assert!((p[0] - q[0]).hypot(p[1] - q[1]) < 1e-10);
        }
    }
}
