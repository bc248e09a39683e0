//! Fast invariant suite behind `wente-lab check`.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counterexamples::{divergent_integral_plateau, f_beta, tilde_f};
use crate::error::Result;
use crate::field::{integral, jacobian, tangential_derivative, trace, ScalarField};
use crate::grid::{make_polar_grid, Grid};
use crate::halfplane::neumann_green;
use crate::norms::{linf_norm, lorentz_l21};
use crate::poisson::solve_dirichlet_disk;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, passed: bool, detail: String) -> CheckOutcome {
    CheckOutcome { name, passed, detail }
}

fn disk(n: usize) -> Result<Arc<Grid>> {
    Ok(Grid::from(make_polar_grid(n, n)?).shared())
}

fn dirichlet_constant() -> Result<CheckOutcome> {
    let g = disk(64)?;
    let u = solve_dirichlet_disk(&ScalarField::from_fn(&g, |_| 1.0)?)?;
    let exact = ScalarField::from_fn(&g, |p| (1.0 - p[0] * p[0] - p[1] * p[1]) / 4.0)?;
    let err = linf_norm(&u.sub(&exact)?);
    Ok(outcome("dirichlet_constant_rhs", err < 1e-3, format!("max error {err:.2e}")))
}

fn green_symmetry(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(0.0..5.0)];
        let y = [rng.gen_range(-5.0..5.0), rng.gen_range(0.0..5.0)];
        if x == y {
            continue;
        }
        worst = worst.max((neumann_green(x, y)? - neumann_green(y, x)?).abs());
    }
    Ok(outcome("green_symmetry", worst == 0.0, format!("max asymmetry {worst:e}")))
}

fn green_neumann(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let h = 1e-4;
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let x = [rng.gen_range(-5.0..5.0), rng.gen_range(0.1..5.0)];
        let y1 = rng.gen_range(-5.0..5.0);
        let g = |y2: f64| neumann_green(x, [y1, y2]);
        let d = (-3.0 * g(0.0)? + 4.0 * g(h)? - g(2.0 * h)?) / (2.0 * h);
        worst = worst.max(d.abs());
    }
    Ok(outcome("green_normal_derivative", worst < 1e-6, format!("max |d_nu G| {worst:.2e}")))
}

fn compatibility() -> Result<CheckOutcome> {
    let g = disk(64)?;
    let a = ScalarField::from_fn(&g, |p| p[0])?;
    let b = ScalarField::from_fn(&g, |p| p[1])?;
    let volume = integral(&jacobian(&a, &b)?);
    let boundary = trace(&a).mul(&tangential_derivative(&trace(&b)))?.integral();
    let gap = (volume - boundary).abs();
    Ok(outcome(
        "compatibility_identity",
        gap < 1e-3,
        format!("int J = {volume:.6}, oint a d_tau b = {boundary:.6}"),
    ))
}

fn lorentz_indicator() -> Result<CheckOutcome> {
    let g = disk(64)?;
    let ind = ScalarField::from_fn(&g, |p| if p[0].hypot(p[1]) < 0.5 { 1.0 } else { 0.0 })?;
    let v = lorentz_l21(&ind);
    let exact = PI.sqrt() / 2.0;
    Ok(outcome(
        "lorentz_indicator",
        (v - exact).abs() < 1e-3,
        format!("{v:.6} vs {exact:.6}"),
    ))
}

fn divergent_closed_form() -> Result<CheckOutcome> {
    let mut worst = 0.0f64;
    for beta in [0.6, 0.75, 0.9] {
        for delta in [1e-2, 1e-3, 1e-4] {
            let exact = ((-f64::ln(delta)).powf(1.0 - beta) - 4f64.ln().powf(1.0 - beta)) / ((1.0 - beta) * PI);
            let v = divergent_integral_plateau(beta, delta)?;
            worst = worst.max(((v - exact) / exact).abs());
        }
    }
    Ok(outcome(
        "divergent_integral_closed_form",
        worst < 5e-3,
        format!("max relative error {worst:.2e}"),
    ))
}

fn solver_linearity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let g = disk(32)?;
    let (c1, c2) = (rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
    let (p, q) = (rng.gen_range(0.5..2.0), rng.gen_range(0.5..2.0));
    let f1 = ScalarField::from_fn(&g, |x| (p * x[0]).sin())?;
    let f2 = ScalarField::from_fn(&g, |x| (q * x[1]).cos() * x[0])?;
    let lhs = solve_dirichlet_disk(&f1.scale(c1).axpy(c2, &f2)?)?;
    let rhs = solve_dirichlet_disk(&f1)?.scale(c1).axpy(c2, &solve_dirichlet_disk(&f2)?)?;
    let err = linf_norm(&lhs.sub(&rhs)?);
    Ok(outcome("solver_linearity", err < 1e-12, format!("max deviation {err:.2e}")))
}

fn trace_identity(rng: &mut ChaCha8Rng) -> Result<CheckOutcome> {
    let beta = rng.gen_range(0.55..0.95);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let x: f64 = rng.gen_range(0.05..0.6) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let limit = if x > 0.0 { f_beta(x.abs(), beta) } else { 0.0 };
        worst = worst.max((tilde_f(x, 1e-4, beta)? - limit).abs());
    }
    Ok(outcome(
        "tilde_f_trace_identity",
        worst < 1e-3,
        format!("beta {beta:.3}, max deviation {worst:.2e}"),
    ))
}

/// Runs every check. Randomized checks draw from a ChaCha8 stream seeded
/// with `seed`.
pub fn run_checks(seed: u64) -> Result<Vec<CheckOutcome>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(vec![
        dirichlet_constant()?,
        green_symmetry(&mut rng)?,
        green_neumann(&mut rng)?,
        compatibility()?,
        lorentz_indicator()?,
        divergent_closed_form()?,
        solver_linearity(&mut rng)?,
        trace_identity(&mut rng)?,
    ])
}
