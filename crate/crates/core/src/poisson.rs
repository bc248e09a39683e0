//! Poisson solvers on the unit disk.
//!
//! Fourier transform in theta, then a cell-centered finite-volume
//! discretization in r for each mode. With `h = 1/n_r`, nodes
//! `r_j = (j + 1/2) h` and faces `r_{j+1/2} = (j + 1) h`, row `j` of mode `k`
//! reads
//!
//! ```text
//! -[r_{j+1/2} (u_{j+1} - u_j) - r_{j-1/2} (u_j - u_{j-1})] + k^2 h^2 u_j / r_j = b_j
//! ```
//!
//! where `b_j = r_j h^2 f_j` for a pointwise right-hand side. The face at the
//! origin has zero radius, which encodes regularity. Dirichlet data enter
//! through a ghost node `u_n = 2g - u_{n-1}`, Neumann data as the outer face
//! flux `h g`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::field::{
    curl, gradient, integral, jacobian, mean, perp_gradient, tangential_derivative, trace,
    BoundaryTrace, ScalarField, VectorField,
};
use crate::grid::{Grid, LineKind, PolarGrid};
use crate::norms::lp_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompatibilityPolicy {
    Error,
    Project,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tolerance: f64,
    pub policy: CompatibilityPolicy,
    /// Highest retained |k|; `None` keeps every mode.
    pub max_mode: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-6,
            policy: CompatibilityPolicy::Project,
            max_mode: None,
        }
    }
}

impl SolveOptions {
    fn validate(&self, g: &PolarGrid) -> Result<usize> {
        if !(self.tolerance > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        let cap = g.n_theta() / 2;
        match self.max_mode {
            Some(m) if m > cap => Err(Error::InvalidArgument(format!(
                "max mode {m} exceeds n_theta/2 = {cap}"
            ))),
            Some(m) => Ok(m),
            None => Ok(cap),
        }
    }
}

#[derive(Debug, Clone)]
pub struct NeumannSolution {
    pub u: ScalarField,
    /// `int rhs + oint flux` before projection.
    pub defect: f64,
}

#[derive(Debug, Clone)]
pub struct ConjugateSolution {
    pub w: ScalarField,
    pub c: ScalarField,
    /// `||curl G||_2 / ||div(a grad b)||_2` for `G = perp_grad C - a perp_grad b`.
    pub curl_residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Boundary {
    Dirichlet,
    Neumann,
}

fn polar(grid: &Grid) -> Result<&PolarGrid> {
    grid.as_polar()
}

fn wavenumber(m: usize, n: usize) -> i64 {
    if m <= n / 2 {
        m as i64
    } else {
        m as i64 - n as i64
    }
}

/// Ring-major forward transforms: `out[j][m]`.
fn forward(g: &PolarGrid, v: &[f64]) -> Vec<Vec<Complex64>> {
    let n_t = g.n_theta();
    let fft = FftPlanner::new().plan_fft_forward(n_t);
    v.chunks(n_t)
        .map(|ring| {
            let mut buf: Vec<Complex64> = ring.iter().map(|&x| Complex64::new(x, 0.0)).collect();
            fft.process(&mut buf);
            buf
        })
        .collect()
}

fn inverse(g: &PolarGrid, hat: Vec<Vec<Complex64>>) -> Vec<f64> {
    let n_t = g.n_theta();
    let fft = FftPlanner::new().plan_fft_inverse(n_t);
    let scale = 1.0 / n_t as f64;
    let mut out = Vec::with_capacity(g.n_r() * n_t);
    for mut ring in hat {
        fft.process(&mut ring);
        out.extend(ring.iter().map(|c| c.re * scale));
    }
    out
}

fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for j in 1..n {
        let m = diag[j] - lower[j] * c[j - 1];
        c[j] = upper[j] / m;
        d[j] = (rhs[j] - lower[j] * d[j - 1]) / m;
    }
    for j in (0..n - 1).rev() {
        d[j] = d[j] - c[j] * d[j + 1];
    }
    d
}

/// Solves every retained mode. `rhs[j][m]` is the full finite-volume right
/// side, boundary contributions included. For Neumann mode 0 the rows are
/// first made to sum to zero, then the flux is marched outward; the additive
/// constant is fixed later by the zero-mean shift.
fn solve_modes(
    g: &PolarGrid,
    rhs: Vec<Vec<Complex64>>,
    bc: Boundary,
    max_mode: usize,
) -> Vec<Vec<Complex64>> {
    let (n_r, n_t) = (g.n_r(), g.n_theta());
    let h = g.dr();
    let r = g.r_nodes();
    let face = |j: usize| (j + 1) as f64 * h;
    let zero = Complex64::new(0.0, 0.0);

    let columns: Vec<Vec<Complex64>> = (0..n_t)
        .into_par_iter()
        .map(|m| {
            let k = wavenumber(m, n_t);
            if k.unsigned_abs() as usize > max_mode {
                return vec![zero; n_r];
            }
            let b: Vec<Complex64> = (0..n_r).map(|j| rhs[j][m]).collect();
            if k == 0 && bc == Boundary::Neumann {
                let weight: f64 = r.iter().sum();
                let total: Complex64 = b.iter().sum();
                let mut u = vec![zero; n_r];
                let mut flux = zero;
                for j in 0..n_r - 1 {
                    flux -= b[j] - total * (r[j] / weight);
                    u[j + 1] = u[j] + flux / face(j);
                }
                return u;
            }
            let kk = (k * k) as f64 * h * h;
            let lower: Vec<f64> = (0..n_r)
                .map(|j| if j == 0 { 0.0 } else { -face(j - 1) })
                .collect();
            let upper: Vec<f64> = (0..n_r)
                .map(|j| if j + 1 == n_r { 0.0 } else { -face(j) })
                .collect();
            let diag: Vec<f64> = (0..n_r)
                .map(|j| {
                    let inner = if j == 0 { 0.0 } else { face(j - 1) };
                    let outer = if j + 1 < n_r {
                        face(j)
                    } else {
                        match bc {
                            Boundary::Dirichlet => 2.0,
                            Boundary::Neumann => 0.0,
                        }
                    };
                    inner + outer + kk / r[j]
                })
                .collect();
            thomas(&lower, &diag, &upper, &b)
        })
        .collect();

    (0..n_r)
        .map(|j| columns.iter().map(|col| col[j]).collect())
        .collect()
}

fn pointwise_rhs(g: &PolarGrid, f: &[f64]) -> Vec<Vec<Complex64>> {
    let h2 = g.dr() * g.dr();
    let mut hat = forward(g, f);
    for (j, ring) in hat.iter_mut().enumerate() {
        let s = g.r_nodes()[j] * h2;
        ring.iter_mut().for_each(|c| *c *= s);
    }
    hat
}

/// Weak `-div F` per mode: face-averaged radial flux differences plus the
/// spectral angular derivative of `F_theta`. For Neumann problems the outer
/// face is left out, where it cancels against the natural boundary flux.
fn div_form_rhs(g: &PolarGrid, f: &VectorField, bc: Boundary) -> Vec<Vec<Complex64>> {
    let (n_r, n_t) = (g.n_r(), g.n_theta());
    let h = g.dr();
    let mut fr = vec![0.0; f.len()];
    let mut ft = vec![0.0; f.len()];
    for idx in 0..f.len() {
        let (s, c) = g.theta_nodes()[idx % n_t].sin_cos();
        fr[idx] = c * f.x()[idx] + s * f.y()[idx];
        ft[idx] = -s * f.x()[idx] + c * f.y()[idx];
    }
    let fr = forward(g, &fr);
    let ft = forward(g, &ft);
    let outer_face = |m: usize| -> Complex64 {
        match bc {
            Boundary::Dirichlet if n_r >= 2 => 1.5 * fr[n_r - 1][m] - 0.5 * fr[n_r - 2][m],
            Boundary::Dirichlet => fr[n_r - 1][m],
            Boundary::Neumann => Complex64::new(0.0, 0.0),
        }
    };
    (0..n_r)
        .map(|j| {
            (0..n_t)
                .map(|m| {
                    let out = if j + 1 < n_r {
                        (j + 1) as f64 * h * 0.5 * (fr[j][m] + fr[j + 1][m])
                    } else {
                        outer_face(m)
                    };
                    let inn = if j == 0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        j as f64 * h * 0.5 * (fr[j - 1][m] + fr[j][m])
                    };
                    let k = wavenumber(m, n_t);
                    let ik = if n_t % 2 == 0 && m == n_t / 2 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        Complex64::new(0.0, k as f64)
                    };
                    -h * (out - inn) - h * h * ik * ft[j][m]
                })
                .collect()
        })
        .collect()
}

fn zero_mean(grid: &Arc<Grid>, values: Vec<f64>) -> Result<ScalarField> {
    let u = ScalarField::new(grid.clone(), values)?;
    let m = mean(&u);
    Ok(u.add_constant(-m))
}

/// `-Delta u = rhs` in the disk, `u = 0` on the circle.
pub fn solve_dirichlet_disk(rhs: &ScalarField) -> Result<ScalarField> {
    let g = polar(rhs.grid())?;
    let hat = pointwise_rhs(g, rhs.values());
    let u = solve_modes(g, hat, Boundary::Dirichlet, g.n_theta() / 2);
    ScalarField::new(rhs.grid().clone(), inverse(g, u))
}

/// `-Delta u = rhs`, `d_nu u = flux`, zero mean.
pub fn solve_neumann_disk(
    rhs: &ScalarField,
    flux: &BoundaryTrace,
    opts: &SolveOptions,
) -> Result<NeumannSolution> {
    let g = polar(rhs.grid())?;
    if !Arc::ptr_eq(flux.line(), g.boundary()) && flux.line().as_ref() != g.boundary().as_ref() {
        return Err(Error::GridMismatch);
    }
    let max_mode = opts.validate(g)?;
    let defect = integral(rhs) + flux.integral();
    if defect.abs() > opts.tolerance && opts.policy == CompatibilityPolicy::Error {
        return Err(Error::Incompatible {
            defect,
            tolerance: opts.tolerance,
        });
    }
    let projected = rhs.add_constant(-defect / PI);
    let mut hat = pointwise_rhs(g, projected.values());
    let h = g.dr();
    let flux_hat = forward_line(g, flux.values());
    let last = hat.len() - 1;
    for (m, c) in flux_hat.into_iter().enumerate() {
        hat[last][m] += h * c;
    }
    let u = solve_modes(g, hat, Boundary::Neumann, max_mode);
    Ok(NeumannSolution {
        u: zero_mean(rhs.grid(), inverse(g, u))?,
        defect,
    })
}

fn forward_line(g: &PolarGrid, v: &[f64]) -> Vec<Complex64> {
    debug_assert_eq!(g.boundary().kind(), LineKind::Circle);
    let mut buf: Vec<Complex64> = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(g.n_theta()).process(&mut buf);
    buf
}

/// `-Delta C = -div F` weakly, `C = 0` on the circle.
pub fn solve_dirichlet_div_form(f: &VectorField) -> Result<ScalarField> {
    let g = polar(f.grid())?;
    let hat = div_form_rhs(g, f, Boundary::Dirichlet);
    let u = solve_modes(g, hat, Boundary::Dirichlet, g.n_theta() / 2);
    ScalarField::new(f.grid().clone(), inverse(g, u))
}

/// `-Delta w = -div G` weakly with `d_nu w = G . nu`, zero mean. The weak
/// form carries the boundary flux, so the data are compatible by
/// construction.
pub fn solve_neumann_div_form(f: &VectorField) -> Result<ScalarField> {
    let g = polar(f.grid())?;
    let hat = div_form_rhs(g, f, Boundary::Neumann);
    let u = solve_modes(g, hat, Boundary::Neumann, g.n_theta() / 2);
    zero_mean(f.grid(), inverse(g, u))
}

/// Compatible Neumann solution through the conjugate function: `C` from
/// the Dirichlet problem with data `a grad b`, then `w` with
/// `grad w = perp_grad C - a perp_grad b`.
pub fn conjugate_reduction(a: &ScalarField, b: &ScalarField) -> Result<ConjugateSolution> {
    polar(a.grid())?;
    let gb = gradient(b);
    if a.grid() != gb.grid() {
        return Err(Error::GridMismatch);
    }
    let a_grad_b = gb.scaled_by(a)?;
    let c = solve_dirichlet_div_form(&a_grad_b)?;
    let a_perp_b = perp_gradient(b).scaled_by(a)?;
    let big_g = perp_gradient(&c).axpy(-1.0, &a_perp_b)?;
    let res = lp_norm(&curl(&big_g), 2.0)?;
    let scale = lp_norm(&crate::field::divergence(&a_grad_b), 2.0)?;
    let curl_residual = if scale > 0.0 { res / scale } else { res };
    let w = solve_neumann_div_form(&big_g)?;
    Ok(ConjugateSolution {
        w,
        c,
        curl_residual,
    })
}

/// Direct route: `-Delta w = J(a, b)`, `d_nu w = -a d_tau b`.
pub fn solve_wente_neumann(
    a: &ScalarField,
    b: &ScalarField,
    opts: &SolveOptions,
) -> Result<NeumannSolution> {
    let j = jacobian(a, b)?;
    let flux = trace(a).mul(&tangential_derivative(&trace(b)))?.scale(-1.0);
    solve_neumann_disk(&j, &flux, opts)
}

/// Monomials `x1^p x2^q`, `1 <= p + q <= 3`, with their gradients.
fn test_monomials() -> Vec<(i32, i32)> {
    let mut out = Vec::new();
    for d in 1..=3 {
        for p in 0..=d {
            out.push((p, d - p));
        }
    }
    out
}

/// Largest `|int (grad w + a perp_grad b) . grad phi|` over low-degree
/// monomial test functions. Vanishes for the exact compatible-Neumann
/// solution.
pub fn euler_lagrange_residual(
    w: &ScalarField,
    a: &ScalarField,
    b: &ScalarField,
) -> Result<f64> {
    let v = gradient(w).axpy(1.0, &perp_gradient(b).scaled_by(a)?)?;
    let grid = w.grid();
    let mut worst: f64 = 0.0;
    for (p, q) in test_monomials() {
        let gphi = VectorField::from_fn(grid, |[x, y]| {
            let dx = if p > 0 { p as f64 * x.powi(p - 1) * y.powi(q) } else { 0.0 };
            let dy = if q > 0 { q as f64 * x.powi(p) * y.powi(q - 1) } else { 0.0 };
            [dx, dy]
        })?;
        worst = worst.max(integral(&v.dot(&gphi)?).abs());
    }
    Ok(worst)
}
