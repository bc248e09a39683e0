//! Function families behind the counterexamples and control experiments.
//!
//! All half-plane families use `a = psi(|x|)`. Their `b` carries the
//! singular factor `f_beta(|x|) = (-log|x|)^{-beta} psi(|x|)` at the
//! boundary point 0; the step families cut it with the cone mollifier
//! `chi(x1 / (x2 + eps))`, whose trace is `f_beta * chi(x1/eps)` and whose
//! limit as `eps -> 0` is the extension `tilde_f`. Disk versions are pulled
//! back through the Cayley map, which sends `z = 1` to the origin.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use gauss_quad::GaussLegendre;

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{cayley_to_halfplane, Grid, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    LinfBlowup,
    H1Blowup,
    DirichletControl,
    L21Control,
    VanishingTrace,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::LinfBlowup,
        Family::H1Blowup,
        Family::DirichletControl,
        Family::L21Control,
        Family::VanishingTrace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::LinfBlowup => "linf_blowup",
            Family::H1Blowup => "h1_blowup",
            Family::DirichletControl => "dirichlet_control",
            Family::L21Control => "l21_control",
            Family::VanishingTrace => "vanishing_trace",
        }
    }

    /// True for the families whose primary computations run on the
    /// half-plane.
    pub fn on_halfplane(self) -> bool {
        matches!(self, Family::LinfBlowup | Family::H1Blowup)
    }

    fn has_step(self) -> bool {
        matches!(self, Family::LinfBlowup | Family::DirichletControl | Family::L21Control)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidSpec(format!("unknown family {s:?}")))
    }
}

pub const MAX_EPS: f64 = 0.125;

/// Singular point of `b` for the vanishing-trace family.
pub const VANISHING_TRACE_CENTER: Point = [0.375, 0.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleSpec {
    family: Family,
    beta: f64,
    eps: f64,
}

impl CounterexampleSpec {
    /// Checks the family's admissible range of `beta` and `0 < eps <= 1/8`.
    pub fn new(family: Family, beta: f64, eps: f64) -> Result<Self> {
        let (lo, hi) = match family {
            Family::LinfBlowup => (0.5, 1.0),
            Family::H1Blowup => (0.0, 0.5),
            Family::DirichletControl => (0.5, f64::INFINITY),
            Family::L21Control => (1.0, f64::INFINITY),
            Family::VanishingTrace => (0.0, f64::INFINITY),
        };
        if !(beta > lo && beta < hi) {
            return Err(Error::InvalidSpec(format!(
                "{family} needs beta in ({lo}, {hi}), got {beta}"
            )));
        }
        Self::relaxed(family, beta, eps)
    }

    /// Like [`CounterexampleSpec::new`] but only requires `beta > 0`, for
    /// control runs outside a family's counterexample range.
    pub fn relaxed(family: Family, beta: f64, eps: f64) -> Result<Self> {
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidSpec(format!("beta must be positive, got {beta}")));
        }
        if !(eps > 0.0 && eps <= MAX_EPS) {
            return Err(Error::InvalidSpec(format!("eps must lie in (0, 1/8], got {eps}")));
        }
        Ok(Self { family, beta, eps })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    /// `a` on the half-plane (or on the disk for the vanishing-trace family).
    pub fn a(&self, p: Point) -> f64 {
        psi(p[0].hypot(p[1]))
    }

    pub fn b(&self, p: Point) -> f64 {
        let beta = self.beta;
        match self.family {
            Family::VanishingTrace => {
                let c = VANISHING_TRACE_CENTER;
                let d = (p[0] - c[0]).hypot(p[1] - c[1]);
                f_beta(d.hypot(self.eps), beta)
            }
            Family::H1Blowup => f_beta(p[0].hypot(p[1]).hypot(self.eps), beta),
            _ => {
                debug_assert!(self.family.has_step());
                f_beta(p[0].hypot(p[1]), beta) * chi(p[0] / (p[1] + self.eps))
            }
        }
    }

    /// Boundary trace of `b` on the line `x2 = 0`.
    pub fn b_trace(&self, x1: f64) -> f64 {
        self.b([x1, 0.0])
    }
}

/// Samples `(a, b)` on `grid`. Half-plane families are pulled back through
/// the Cayley map when the grid is a disk; the vanishing-trace family lives
/// on the disk only.
pub fn build_pair(spec: &CounterexampleSpec, grid: &Arc<Grid>) -> Result<(ScalarField, ScalarField)> {
    match (spec.family, grid.as_ref()) {
        (Family::VanishingTrace, Grid::HalfPlane(_)) => Err(Error::WrongGrid { expected: "polar" }),
        (Family::VanishingTrace, Grid::Polar(_)) | (_, Grid::HalfPlane(_)) => Ok((
            ScalarField::from_fn(grid, |p| spec.a(p))?,
            ScalarField::from_fn(grid, |p| spec.b(p))?,
        )),
        (_, Grid::Polar(_)) => {
            let pulled: Vec<Point> = grid
                .points()
                .map(cayley_to_halfplane)
                .collect::<Result<_>>()?;
            let a = pulled.iter().map(|&p| spec.a(p)).collect();
            let b = pulled.iter().map(|&p| spec.b(p)).collect();
            Ok((
                ScalarField::new(grid.clone(), a)?,
                ScalarField::new(grid.clone(), b)?,
            ))
        }
    }
}

fn smooth_step_kernel(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Radial cutoff: 1 on `[0, 1/4]`, 0 from `1/2` on, smooth and decreasing
/// in between.
pub fn psi(r: f64) -> f64 {
    let t = 4.0 * (0.5 - r);
    if t >= 1.0 {
        return 1.0;
    }
    if t <= 0.0 {
        return 0.0;
    }
    let (s0, s1) = (smooth_step_kernel(t), smooth_step_kernel(1.0 - t));
    s0 / (s0 + s1)
}

/// `(2/pi)(arctan x + pi/4)` on `[-1, 1]`, 0 below, 1 above. Lipschitz,
/// with corners at `x = +-1`.
pub fn chi(x: f64) -> f64 {
    if x >= 1.0 {
        1.0
    } else if x <= -1.0 {
        0.0
    } else {
        2.0 / PI * (x.atan() + PI / 4.0)
    }
}

pub fn heaviside_mollified(x: f64, eps: f64) -> f64 {
    chi(x / eps)
}

/// `(-log r)^{-beta} psi(r)`, with the limit 0 at `r = 0`.
pub fn f_beta(r: f64, beta: f64) -> f64 {
    if r <= 0.0 || r >= 0.5 {
        return 0.0;
    }
    (-r.ln()).powf(-beta) * psi(r)
}

/// `(-log(x^2 + y^2)/2)^{-beta} psi(sqrt(x^2 + y^2)) chi(x / y)` for `y > 0`.
pub fn tilde_f(x: f64, y: f64, beta: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(Error::InvalidArgument(format!("tilde_f needs y > 0, got {y}")));
    }
    Ok(f_beta(x.hypot(y), beta) * chi(x / y))
}

fn check_delta(beta: f64, delta: f64) -> Result<()> {
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidArgument(format!("beta must lie in (0, 1), got {beta}")));
    }
    if !(delta > 0.0 && delta <= 0.25) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, 1/4], got {delta}")));
    }
    Ok(())
}

const DIVERGENT_PANELS: usize = 64;

/// Composite Gauss-Legendre in `u = -log t` over `[u0, u1]`.
fn log_integral(u0: f64, u1: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    if u1 <= u0 {
        return Ok(0.0);
    }
    let gl = GaussLegendre::new(10).map_err(|e| Error::InvalidArgument(format!("quadrature rule: {e}")))?;
    let du = (u1 - u0) / DIVERGENT_PANELS as f64;
    Ok((0..DIVERGENT_PANELS)
        .map(|k| {
            let a = u0 + k as f64 * du;
            gl.integrate(a, a + du, &f)
        })
        .sum())
}

/// `(1/pi) int_delta^inf t^{-1} (-log t)^{-beta} psi(t)^2 dt`.
pub fn divergent_integral(beta: f64, delta: f64) -> Result<f64> {
    check_delta(beta, delta)?;
    let v = log_integral(2f64.ln(), -delta.ln(), |u| u.powf(-beta) * psi((-u).exp()).powi(2))?;
    Ok(v / PI)
}

/// The same integral with `psi^2` replaced by the indicator of `[0, 1/4]`.
pub fn divergent_integral_plateau(beta: f64, delta: f64) -> Result<f64> {
    check_delta(beta, delta)?;
    Ok(log_integral(4f64.ln(), -delta.ln(), |u| u.powf(-beta))? / PI)
}
