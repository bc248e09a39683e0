//! Green's-function representations on the upper half-plane.
//!
//! The Neumann Green kernel is
//! `G(x, y) = -(1/2pi) (log|x - y| + log|y - x~|)` with `x~ = (x1, -x2)`.
//! For data `a, b` and `w` solving `-Delta w = J(a, b)`,
//! `d_nu w = -a d_1 b` on the boundary,
//!
//! ```text
//! w(x) = int G(x, y) J(a, b) dy + (1/pi) int log((y1 - x1)^2 + x2^2)^{1/2} a d_1 b dy1
//! ```
//!
//! and on the boundary the trace splits into a regularized volume term and
//! a principal-value line term,
//!
//! ```text
//! w(x1, 0) = (1/pi) int grad_y log|y - x| . (a - a+(|y - x|)) perp_grad b dy
//!          + (1/pi) int_0^inf a+(t) (b(x1 - t) - b(x1 + t)) dt / t
//! ```
//!
//! with `a+(t) = (a(x1 + t, 0) + a(x1 - t, 0)) / 2`. The solution `v1` of the
//! same equation with zero Neumann data differs from `w` on the boundary by
//! `-(1/pi) int log|y1 - x1| a d_1 b dy1`.

use std::f64::consts::PI;
use std::sync::Arc;

use gauss_quad::GaussLegendre;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{
    jacobian, perp_gradient, tangential_derivative, trace, BoundaryTrace, ScalarField, VectorField,
};
use crate::grid::{Grid, HalfPlaneGrid, Point};

pub fn neumann_green(x: Point, y: Point) -> Result<f64> {
    for p in [x, y] {
        if !(p[1] >= 0.0) || !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::OutsideDomain(p));
        }
    }
    let d = (x[0] - y[0]).hypot(x[1] - y[1]);
    if d == 0.0 {
        return Err(Error::Coincident(x));
    }
    let dr = (x[0] - y[0]).hypot(x[1] + y[1]);
    Ok(-(d.ln() + dr.ln()) / (2.0 * PI))
}

/// Quadrature policy for the logarithmic kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval {
    exclusion_radius: f64,
}

impl GreenEval {
    /// A cell is integrated analytically when the target point lies within
    /// `exclusion_radius` cell sizes of it.
    pub fn new(exclusion_radius: f64) -> Result<Self> {
        if !(exclusion_radius > 0.0 && exclusion_radius <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "exclusion radius must lie in (0, 1], got {exclusion_radius}"
            )));
        }
        Ok(Self { exclusion_radius })
    }

    pub fn exclusion_radius(&self) -> f64 {
        self.exclusion_radius
    }
}

impl Default for GreenEval {
    fn default() -> Self {
        Self {
            exclusion_radius: 1.0,
        }
    }
}

/// Antiderivative in `u` and `v` of `log(u^2 + v^2)`.
fn log_antiderivative(u: f64, v: f64) -> f64 {
    let r2 = u * u + v * v;
    if r2 == 0.0 {
        return 0.0;
    }
    let mut s = u * v * r2.ln() - 3.0 * u * v;
    if u != 0.0 {
        s += u * u * (v / u).atan();
    }
    if v != 0.0 {
        s += v * v * (u / v).atan();
    }
    s
}

/// Mean of `log|y - p|` over the rectangle `[x0, x1] x [y0, y1]`.
pub fn rect_log_average(p: Point, cell: [f64; 4]) -> f64 {
    let [x0, x1, y0, y1] = cell;
    let (u0, u1, v0, v1) = (x0 - p[0], x1 - p[0], y0 - p[1], y1 - p[1]);
    let s = log_antiderivative(u1, v1) - log_antiderivative(u0, v1) - log_antiderivative(u1, v0)
        + log_antiderivative(u0, v0);
    0.5 * s / ((x1 - x0) * (y1 - y0))
}

/// `int_{s0}^{s1} log(s^2 + c^2)^{1/2} ds`.
pub fn segment_log_integral(c: f64, s0: f64, s1: f64) -> f64 {
    let f = |s: f64| {
        let r2 = s * s + c * c;
        let l = if r2 > 0.0 { s * r2.ln() } else { 0.0 };
        let t = if c != 0.0 { 2.0 * c * (s / c).atan() } else { 0.0 };
        0.5 * (l - 2.0 * s + t)
    };
    f(s1) - f(s0)
}

/// Log-substituted Gauss-Legendre rule for the principal-value line term.
const LINE_PANELS: usize = 240;
const LINE_DEGREE: usize = 6;
const LINE_T_MIN: f64 = 1e-14;

/// Precomputed data for repeated evaluation of the representation formulas.
pub struct Representation {
    grid: Arc<Grid>,
    eval: GreenEval,
    a: Vec<f64>,
    jac: Vec<f64>,
    perp_b: VectorField,
    a_trace: BoundaryTrace,
    b_trace: BoundaryTrace,
    a_db: BoundaryTrace,
    x_edges: Vec<f64>,
    line_rule: Vec<(f64, f64)>,
}

impl Representation {
    pub fn new(a: &ScalarField, b: &ScalarField, eval: GreenEval) -> Result<Self> {
        let g = a.grid().as_halfplane()?;
        let jac = jacobian(a, b)?.into_values();
        let a_trace = trace(a);
        let b_trace = trace(b);
        let a_db = a_trace.mul(&tangential_derivative(&b_trace))?;
        let mut x_edges = Vec::with_capacity(g.n_x() + 1);
        x_edges.push(-g.half_width());
        for w in g.x_widths() {
            x_edges.push(x_edges.last().unwrap() + w);
        }
        let t_max = 2.0 * g.half_width();
        Ok(Self {
            grid: a.grid().clone(),
            eval,
            a: a.values().to_vec(),
            jac,
            perp_b: perp_gradient(b),
            a_trace,
            b_trace,
            a_db,
            x_edges,
            line_rule: log_rule(LINE_T_MIN, t_max)?,
        })
    }

    fn hp(&self) -> &HalfPlaneGrid {
        self.grid.as_halfplane().expect("checked at construction")
    }

    fn check_inside(&self, x: Point) -> Result<()> {
        let g = self.hp();
        if !(x[1] > 0.0 && x[1] <= g.height() && x[0].abs() <= g.half_width()) {
            return Err(Error::OutsideDomain(x));
        }
        Ok(())
    }

    fn near(&self, p: Point, cell: [f64; 4]) -> bool {
        let r = self.eval.exclusion_radius;
        let (hx, hy) = (cell[1] - cell[0], cell[3] - cell[2]);
        p[0] >= cell[0] - r * hx && p[0] <= cell[1] + r * hx && p[1] >= cell[2] - r * hy && p[1] <= cell[3] + r * hy
    }

    /// Volume and boundary contributions to `w(x)` at an interior point.
    #[allow(clippy::needless_range_loop)]
    pub fn interior_terms(&self, x: Point) -> Result<(f64, f64)> {
        self.check_inside(x)?;
        let g = self.hp();
        let areas = g.cell_areas();
        let xr = [x[0], -x[1]];
        let mut volume = 0.0;
        for idx in 0..self.jac.len() {
            if self.jac[idx] == 0.0 {
                continue;
            }
            let cell = g.cell(idx);
            let y = g.point(idx);
            let direct = if self.near(x, cell) {
                rect_log_average(x, cell)
            } else {
                (y[0] - x[0]).hypot(y[1] - x[1]).ln()
            };
            let reflected = if self.near(xr, cell) {
                rect_log_average(xr, cell)
            } else {
                (y[0] - x[0]).hypot(y[1] + x[1]).ln()
            };
            volume += (direct + reflected) * self.jac[idx] * areas[idx];
        }
        volume *= -1.0 / (2.0 * PI);
        let boundary = self.boundary_log_integral(x[0], x[1]) / PI;
        Ok((volume, boundary))
    }

    /// `int log((y1 - x1)^2 + c^2)^{1/2} a d_1 b dy1`, each boundary segment
    /// integrated exactly against the piecewise-constant data.
    fn boundary_log_integral(&self, x1: f64, c: f64) -> f64 {
        self.a_db
            .values()
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0.0)
            .map(|(i, v)| v * segment_log_integral(c, self.x_edges[i] - x1, self.x_edges[i + 1] - x1))
            .sum()
    }

    pub fn interior(&self, x: Point) -> Result<f64> {
        let (v, b) = self.interior_terms(x)?;
        Ok(v + b)
    }

    fn a_plus(&self, x1: f64, t: f64) -> f64 {
        0.5 * (self.a_trace.value_at(x1 + t) + self.a_trace.value_at(x1 - t))
    }

    /// Regularized volume term of the trace formula.
    pub fn trace_volume(&self, x1: f64) -> f64 {
        let g = self.hp();
        let areas = g.cell_areas();
        let (px, py) = (self.perp_b.x(), self.perp_b.y());
        let mut s = 0.0;
        for idx in 0..self.a.len() {
            if px[idx] == 0.0 && py[idx] == 0.0 {
                continue;
            }
            let y = g.point(idx);
            let (dx, dy) = (y[0] - x1, y[1]);
            let r2 = dx * dx + dy * dy;
            let weight = self.a[idx] - self.a_plus(x1, r2.sqrt());
            s += (dx * px[idx] + dy * py[idx]) / r2 * weight * areas[idx];
        }
        s / PI
    }

    /// Principal-value line term of the trace formula.
    pub fn trace_line(&self, x1: f64) -> f64 {
        let f = |t: f64| {
            self.a_plus(x1, t) * (self.b_trace.value_at(x1 - t) - self.b_trace.value_at(x1 + t)) / t
        };
        let body: f64 = self.line_rule.iter().map(|(t, w)| w * f(*t)).sum();
        // below t_min the integrand is its limit at t = 0
        let head = LINE_T_MIN * f(LINE_T_MIN);
        (body + head) / PI
    }

    pub fn trace_terms(&self, x1: f64) -> (f64, f64) {
        (self.trace_volume(x1), self.trace_line(x1))
    }

    pub fn trace(&self, x1: f64) -> f64 {
        let (v, l) = self.trace_terms(x1);
        v + l
    }

    /// `-(1/pi) int log|y1 - x1| a d_1 b dy1`.
    pub fn log_term(&self, x1: f64) -> f64 {
        -self.boundary_log_integral(x1, 0.0) / PI
    }

    pub fn v1_trace(&self, x1: f64) -> f64 {
        self.trace(x1) + self.log_term(x1)
    }

    /// `(1/pi) int grad_y log|y - x| . a perp_grad b dy` without the split.
    pub fn trace_unsplit(&self, x1: f64) -> f64 {
        let g = self.hp();
        let areas = g.cell_areas();
        let (px, py) = (self.perp_b.x(), self.perp_b.y());
        let mut s = 0.0;
        for idx in 0..self.a.len() {
            let y = g.point(idx);
            let (dx, dy) = (y[0] - x1, y[1]);
            s += (dx * px[idx] + dy * py[idx]) / (dx * dx + dy * dy) * self.a[idx] * areas[idx];
        }
        s / PI
    }

    /// The three boundary profiles (volume, line, log term) sampled at
    /// every boundary node, evaluated in parallel.
    pub fn trace_profiles(&self) -> Result<[BoundaryTrace; 3]> {
        let line = self.grid.boundary().clone();
        let rows: Vec<[f64; 3]> = line
            .nodes()
            .par_iter()
            .map(|&x1| {
                let (v, l) = self.trace_terms(x1);
                [v, l, self.log_term(x1)]
            })
            .collect();
        let col = |k: usize| BoundaryTrace::new(line.clone(), rows.iter().map(|r| r[k]).collect());
        Ok([col(0)?, col(1)?, col(2)?])
    }
}

fn log_rule(t_min: f64, t_max: f64) -> Result<Vec<(f64, f64)>> {
    let gl = GaussLegendre::new(LINE_DEGREE)
        .map_err(|e| Error::InvalidArgument(format!("quadrature rule: {e}")))?;
    let (u0, u1) = (t_min.ln(), t_max.ln());
    let du = (u1 - u0) / LINE_PANELS as f64;
    let mut rule = Vec::with_capacity(LINE_PANELS * LINE_DEGREE);
    for p in 0..LINE_PANELS {
        let (a, b) = (u0 + p as f64 * du, u0 + (p + 1) as f64 * du);
        for (x, w) in gl.iter() {
            let u = 0.5 * (a + b) + 0.5 * (b - a) * x;
            let t = u.exp();
            rule.push((t, 0.5 * (b - a) * w * t));
        }
    }
    Ok(rule)
}

pub fn represent_interior(a: &ScalarField, b: &ScalarField, x: Point, eval: GreenEval) -> Result<f64> {
    Representation::new(a, b, eval)?.interior(x)
}

pub fn represent_trace(a: &ScalarField, b: &ScalarField, x1: f64) -> Result<f64> {
    Ok(Representation::new(a, b, GreenEval::default())?.trace(x1))
}

pub fn represent_v1_trace(a: &ScalarField, b: &ScalarField, x1: f64) -> Result<f64> {
    Ok(Representation::new(a, b, GreenEval::default())?.v1_trace(x1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_halfplane_grid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn plane(n_x: usize, n_y: usize, l: f64, h: f64, refine: bool) -> Arc<Grid> {
        Grid::from(make_halfplane_grid(n_x, n_y, l, h, refine).unwrap()).shared()
    }

    #[test]
    fn green_closed_form() {
        let v = neumann_green([0.0, 1.0], [1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(v, -(5f64.ln()) / (4.0 * PI), epsilon = 1e-15);
        assert_abs_diff_eq!(v, -0.12807, epsilon = 1e-5);
        assert!(matches!(neumann_green([0.3, 0.0], [0.3, 0.0]), Err(Error::Coincident(_))));
        assert!(neumann_green([0.3, -1.0], [0.0, 1.0]).is_err());
    }

    #[test]
    fn green_normal_derivative_vanishes_on_boundary() {
        let h = 1e-4;
        for (x, y1) in [([0.2, 0.7], 0.5), ([-1.0, 0.1], 0.3), ([2.0, 3.0], -1.0)] {
            let g = |y2: f64| neumann_green(x, [y1, y2]).unwrap();
            let d = (-3.0 * g(0.0) + 4.0 * g(h) - g(2.0 * h)) / (2.0 * h);
            assert!(d.abs() < 1e-6, "{d}");
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn green_is_symmetric(
            x in (-5.0f64..5.0, 0.0f64..5.0),
            y in (-5.0f64..5.0, 0.0f64..5.0),
        ) {
            let (x, y) = ([x.0, x.1], [y.0, y.1]);
            prop_assume!(x != y);
            prop_assert_eq!(neumann_green(x, y).unwrap(), neumann_green(y, x).unwrap());
        }
    }

    #[test]
    fn log_antiderivative_and_averages() {
        // mixed second difference of the antiderivative recovers the kernel
        let (u, v, h) = (0.7, -0.4, 1e-4);
        let d = (log_antiderivative(u + h, v + h) - log_antiderivative(u - h, v + h)
            - log_antiderivative(u + h, v - h)
            + log_antiderivative(u - h, v - h))
            / (4.0 * h * h);
        assert_abs_diff_eq!(d, (u * u + v * v).ln(), epsilon = 1e-6);
        // self-cell average against a midpoint rule that skips the singularity
        let cell = [-0.5, 0.5, 0.0, 1.0];
        let p = [0.1, 0.3];
        let n = 2000;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let y = [-0.5 + (i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64];
                s += (y[0] - p[0]).hypot(y[1] - p[1]).ln();
            }
        }
        assert_abs_diff_eq!(rect_log_average(p, cell), s / (n * n) as f64, epsilon = 1e-4);
        // far away the average approaches the point value
        let far = rect_log_average([10.0, 10.0], [0.0, 0.01, 0.0, 0.01]);
        assert_abs_diff_eq!(far, (9.995f64.hypot(9.995)).ln(), epsilon = 1e-8);
        // segment: int_{-1}^{1} log|s| ds = -2
        assert_abs_diff_eq!(segment_log_integral(0.0, -1.0, 1.0), -2.0, epsilon = 1e-14);
        // int_0^1 log(s^2 + 1)^{1/2} ds = (ln 2 - 2 + pi/2)/2
        assert_abs_diff_eq!(
            segment_log_integral(1.0, 0.0, 1.0),
            0.5 * (2f64.ln() - 2.0 + PI / 2.0),
            epsilon = 1e-14
        );
        assert!(GreenEval::new(0.0).is_err() && GreenEval::new(1.5).is_err());
    }

    /// `u = g(y1) e^{-y2}` with `g(s) = -2 s^2 e^{-s^2}`, `a = y1` and
    /// `b = -e^{-y1^2} - (g'' + g)(y1)(1 - e^{-y2})`: then `J(a, b) = d_2 b =
    /// -Delta u` and `-a d_1 b = g = d_nu u` on the boundary.
    fn reproduction_data(grid: &Arc<Grid>) -> (ScalarField, ScalarField) {
        let g = |s: f64| -2.0 * s * s * (-s * s).exp();
        let g2 = |s: f64| (-8.0 * s.powi(4) + 20.0 * s * s - 4.0) * (-s * s).exp();
        let a = ScalarField::from_fn(grid, |p| p[0]).unwrap();
        let b = ScalarField::from_fn(grid, |p| {
            -(-p[0] * p[0]).exp() - (g2(p[0]) + g(p[0])) * (1.0 - (-p[1]).exp())
        })
        .unwrap();
        (a, b)
    }

    #[test]
    fn interior_representation_reproduces_known_solution() {
        let grid = plane(240, 240, 6.0, 12.0, false);
        let (a, b) = reproduction_data(&grid);
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        let u = |p: Point| -2.0 * p[0] * p[0] * (-p[0] * p[0]).exp() * (-p[1]).exp();
        for x in [[0.5, 1.0], [-1.0, 0.5], [0.3, 2.0], [1.2, 0.05]] {
            let (vol, bdry) = rep.interior_terms(x).unwrap();
            let exact = u(x);
            assert!(((vol + bdry) / exact - 1.0).abs() < 0.05, "at {x:?}: {} vs {exact}", vol + bdry);
            // the opposite sign on the boundary term misses badly
            assert!(((vol - bdry) / exact - 1.0).abs() > 0.2, "at {x:?}");
        }
    }

    fn bump(p: Point, c: Point, s: f64) -> f64 {
        let r2 = ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2)) / (s * s);
        if r2 < 1.0 {
            (1.0 - r2).powi(3)
        } else {
            0.0
        }
    }

    fn smooth_pair(grid: &Arc<Grid>) -> (ScalarField, ScalarField) {
        let a = ScalarField::from_fn(grid, |p| (1.0 + p[0]) * bump(p, [0.0, 0.0], 0.5)).unwrap();
        let b = ScalarField::from_fn(grid, |p| (p[0] + 0.5 * p[1]) * bump(p, [0.1, 0.0], 0.45)).unwrap();
        (a, b)
    }

    #[test]
    fn vanishing_and_constant_data() {
        let grid = plane(64, 32, 1.0, 1.0, false);
        let (a, b) = smooth_pair(&grid);
        let z = ScalarField::zeros(&grid);
        let e = GreenEval::default();
        assert_eq!(represent_interior(&z, &b, [0.1, 0.2], e).unwrap(), 0.0);
        assert_eq!(represent_interior(&a, &z, [0.1, 0.2], e).unwrap(), 0.0);
        assert_eq!(represent_v1_trace(&z, &b, 0.1).unwrap(), 0.0);
        assert_eq!(represent_v1_trace(&a, &z, 0.1).unwrap(), 0.0);
        let c = ScalarField::from_fn(&grid, |_| 2.0).unwrap();
        let rep = Representation::new(&c, &b, e).unwrap();
        let (vol, bdry) = rep.interior_terms([0.1, 0.2]).unwrap();
        assert_eq!(vol, 0.0);
        assert!(bdry.abs() > 1e-3);
        assert!(rep.interior([0.1, 2.0]).is_err());
    }

    #[test]
    fn line_term_vanishes_for_even_b() {
        let grid = plane(128, 32, 1.0, 1.0, true);
        let a = ScalarField::from_fn(&grid, |p| (0.3 + p[0]) * bump(p, [0.0, 0.0], 0.6)).unwrap();
        let b = ScalarField::from_fn(&grid, |p| bump(p, [0.0, 0.0], 0.5)).unwrap();
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        assert!(rep.trace_line(0.0).abs() < 1e-14);
    }

    #[test]
    fn line_term_one_sided_reduction() {
        // a even, b supported in y1 > 0: line term = -(1/pi) int_0^inf a b / t dt
        let grid = plane(400, 64, 1.0, 1.0, false);
        let a = ScalarField::from_fn(&grid, |p| bump(p, [0.0, 0.0], 0.8)).unwrap();
        let b = ScalarField::from_fn(&grid, |p| bump(p, [0.4, 0.0], 0.3)).unwrap();
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        let gl = GaussLegendre::new(20).unwrap();
        let exact = -gl.integrate(0.1, 0.7, |t| {
            bump([t, 0.0], [0.0, 0.0], 0.8) * bump([t, 0.0], [0.4, 0.0], 0.3) / t
        }) / PI;
        assert!((rep.trace_line(0.0) / exact - 1.0).abs() < 0.01, "{} vs {exact}", rep.trace_line(0.0));
    }

    #[test]
    fn split_matches_unsplit() {
        let grid = plane(256, 128, 1.0, 1.0, false);
        let (a, b) = smooth_pair(&grid);
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        for x1 in [-0.2, 0.0, 0.15] {
            let (s, u) = (rep.trace(x1), rep.trace_unsplit(x1));
            assert!((s - u).abs() < 0.02 * u.abs().max(1e-2), "x1 {x1}: {s} vs {u}");
        }
    }

    #[test]
    fn interior_converges_to_trace() {
        // w(x1, delta) - w(x1, 0) is first order in delta, so the check uses
        // nodes of a refined grid where the local boundary spacing is small
        let grid = plane(256, 128, 1.0, 1.0, true);
        let (a, b) = smooth_pair(&grid);
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        let hp = grid.as_halfplane().unwrap();
        for k in [0, 5, 20, 40] {
            for i in [128 + k, 127 - k] {
                let x1 = hp.x_nodes()[i];
                let delta = 2.0 * hp.x_widths()[i];
                let t = rep.trace(x1);
                let v = rep.interior([x1, delta]).unwrap();
                assert!((t - v).abs() < 0.02 * t.abs(), "x1 {x1}: trace {t}, interior {v}");
            }
        }
    }

    #[test]
    fn trace_converges_under_refinement() {
        let value = |n: usize| {
            let grid = plane(2 * n, n, 1.0, 1.0, false);
            let (a, b) = smooth_pair(&grid);
            represent_trace(&a, &b, 0.0).unwrap()
        };
        let (c, f) = (value(128), value(256));
        assert!((c / f - 1.0).abs() < 0.01, "{c} vs {f}");
    }

    #[test]
    fn v1_is_trace_plus_log_term() {
        let grid = plane(128, 64, 1.0, 1.0, false);
        let (a, b) = smooth_pair(&grid);
        let rep = Representation::new(&a, &b, GreenEval::default()).unwrap();
        for x1 in [-0.3, 0.05] {
            assert_abs_diff_eq!(rep.v1_trace(x1), rep.trace(x1) + rep.log_term(x1), epsilon = 1e-15);
        }
        let [v, l, g] = rep.trace_profiles().unwrap();
        let k = grid.boundary().len() / 2;
        let x1 = grid.boundary().nodes()[k];
        assert_abs_diff_eq!(v.values()[k] + l.values()[k] + g.values()[k], rep.v1_trace(x1), epsilon = 1e-14);
    }
}
