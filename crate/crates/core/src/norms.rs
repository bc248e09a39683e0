//! Norm and seminorm functionals: Lebesgue norms, the H^1 seminorm, the
//! Lorentz L^{2,1} norm, the Gagliardo H^{1/2} seminorm of boundary traces,
//! and a weighted L^2 pairing on the boundary.

use std::io::Write;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{gradient, BoundaryTrace, ScalarField, VectorField};
use crate::grid::Grid;

/// Anything that has a nonnegative magnitude per node and a quadrature
/// weight per node.
pub trait Sampled {
    fn magnitudes(&self) -> Vec<f64>;
    fn weights(&self) -> &[f64];
}

impl Sampled for ScalarField {
    fn magnitudes(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.abs()).collect()
    }

    fn weights(&self) -> &[f64] {
        self.grid().cell_areas()
    }
}

impl Sampled for VectorField {
    fn magnitudes(&self) -> Vec<f64> {
        self.magnitude()
    }

    fn weights(&self) -> &[f64] {
        self.grid().cell_areas()
    }
}

impl Sampled for BoundaryTrace {
    fn magnitudes(&self) -> Vec<f64> {
        self.values().iter().map(|v| v.abs()).collect()
    }

    fn weights(&self) -> &[f64] {
        self.line().weights()
    }
}

pub fn lp_norm(f: &impl Sampled, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidArgument(format!("L^p norm needs p >= 1, got {p}")));
    }
    let s: f64 = f
        .magnitudes()
        .iter()
        .zip(f.weights())
        .map(|(m, w)| m.powf(p) * w)
        .sum();
    Ok(s.powf(1.0 / p))
}

pub fn linf_norm(f: &impl Sampled) -> f64 {
    f.magnitudes().into_iter().fold(0.0, f64::max)
}

pub fn h1_seminorm(f: &ScalarField) -> f64 {
    let g = gradient(f);
    lp_norm(&g, 2.0).expect("p = 2 is valid")
}

/// `int_0^inf |{|f| >= lambda}|^{1/2} d lambda` by the layer-cake formula.
///
/// Node magnitudes sorted in decreasing order `v_1 >= v_2 >= ...` with
/// cumulative areas `A_i` give a piecewise constant distribution function,
/// so the integral is exactly `sum_i sqrt(A_i) (v_i - v_{i+1})`.
pub fn lorentz_l21(f: &impl Sampled) -> f64 {
    let mut pairs: Vec<(f64, f64)> = f
        .magnitudes()
        .into_iter()
        .zip(f.weights().iter().copied())
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let mut area = 0.0;
    let mut total = 0.0;
    for i in 0..pairs.len() {
        area += pairs[i].1;
        let next = pairs.get(i + 1).map_or(0.0, |p| p.0);
        total += area.sqrt() * (pairs[i].0 - next);
    }
    total
}

/// `||nabla^2 f||_{L^1}` with the Frobenius norm of the discrete Hessian
/// (second differences of the discrete gradient).
pub fn hessian_l1(f: &ScalarField) -> f64 {
    let g = gradient(f);
    let gx = gradient(&g.component_x());
    let gy = gradient(&g.component_y());
    let areas = f.grid().cell_areas();
    (0..f.len())
        .map(|i| {
            let (fxx, fyy) = (gx.x()[i], gy.y()[i]);
            let fxy = 0.5 * (gx.y()[i] + gy.x()[i]);
            (fxx * fxx + 2.0 * fxy * fxy + fyy * fyy).sqrt() * areas[i]
        })
        .sum()
}

const GAGLIARDO_BLOCK: usize = 64;

/// Discrete Gagliardo H^{1/2} seminorm
/// `( sum_{i != j} |t_i - t_j|^2 / d(i, j)^2 w_i w_j )^{1/2}`,
/// with `d` the distance along the line or the chordal distance on the
/// circle. Row blocks are summed in parallel and combined in a fixed order.
pub fn gagliardo_h12(t: &BoundaryTrace) -> f64 {
    let line = t.line();
    let v = t.values();
    let w = line.weights();
    let n = v.len();
    let blocks: Vec<f64> = (0..n)
        .step_by(GAGLIARDO_BLOCK)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|start| {
            let mut s = 0.0;
            for i in start..(start + GAGLIARDO_BLOCK).min(n) {
                let mut row = 0.0;
                for j in 0..n {
                    if i != j {
                        let d = line.distance(i, j);
                        let dv = v[i] - v[j];
                        row += dv * dv / (d * d) * w[j];
                    }
                }
                s += row * w[i];
            }
            s
        })
        .collect();
    blocks.iter().sum::<f64>().sqrt()
}

/// Weighted L^2 pairing `sum f g w` over a shared boundary grid.
pub fn duality_pairing(f: &BoundaryTrace, g: &BoundaryTrace) -> Result<f64> {
    f.same_line(g)?;
    Ok(f.mul(g)?.integral())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Resolution {
    Polar { n_r: usize, n_theta: usize },
    HalfPlane { n_x: usize, n_y: usize },
}

impl Resolution {
    pub fn of(grid: &Grid) -> Self {
        match grid {
            Grid::Polar(g) => Resolution::Polar {
                n_r: g.n_r(),
                n_theta: g.n_theta(),
            },
            Grid::HalfPlane(g) => Resolution::HalfPlane {
                n_x: g.n_x(),
                n_y: g.n_y(),
            },
        }
    }
}

/// Named norm values, kept in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct NormReport {
    entries: Vec<(String, f64)>,
    resolution: Resolution,
}

impl NormReport {
    pub fn new(resolution: Resolution) -> Self {
        Self {
            entries: Vec::new(),
            resolution,
        }
    }

    pub fn push(&mut self, name: &str, value: f64) -> Result<()> {
        if !(value >= 0.0) || !value.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "norm {name} must be finite and nonnegative, got {value}"
            )));
        }
        self.entries.push((name.to_string(), value));
        Ok(())
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.entries.iter().find(|(n, _)| n == name).map(|e| e.1)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    pub fn resolution(&self) -> Resolution {
        self.resolution
    }

    /// Writes `norm,value,n_r,n_theta` (or `n_x,n_y`) rows.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        let (h, a, b) = match self.resolution {
            Resolution::Polar { n_r, n_theta } => ("n_r,n_theta", n_r, n_theta),
            Resolution::HalfPlane { n_x, n_y } => ("n_x,n_y", n_x, n_y),
        };
        writeln!(w, "norm,value,{h}")?;
        for (name, v) in &self.entries {
            writeln!(w, "{name},{v},{a},{b}")?;
        }
        Ok(())
    }
}
