//! Per-row evaluation and sweep reports.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;

use crate::counterexamples::{build_pair, CounterexampleSpec, Family};
use crate::error::{Error, Result};
use crate::experiments::config::SweepConfig;
use crate::experiments::fit::{fit_log_exponent, fit_log_exponent_offset, Fit};
use crate::field::{gradient, jacobian, trace, ScalarField};
use crate::grid::{make_halfplane_grid, make_polar_grid, Grid};
use crate::halfplane::{GreenEval, Representation};
use crate::norms::{gagliardo_h12, h1_seminorm, hessian_l1, linf_norm, lorentz_l21, lp_norm};
use crate::poisson::{conjugate_reduction, solve_dirichlet_disk, solve_wente_neumann, SolveOptions};

pub const CSV_HEADER: &str = "family,beta,eps,n,norm_a_inf,seminorm_a_h1,seminorm_b_h1,lorentz_b,linf_u,w_origin,l2_grad_w,lorentz_grad_w,h12_trace,ratio_dirichlet,ratio_neumann,ratio_l21,defect";

/// Quantities outside the CSV schema, printed in the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// `|grad^2 w|_1 / (|grad a|_2 |grad b|_2)` on the disk.
    pub ratio_hessian: f64,
    /// Relative L2 gap between the conjugate and direct Neumann solutions.
    pub conjugate_gap: f64,
    pub curl_residual: f64,
    /// Half-plane families: H^{1/2} seminorms of the volume, line and log
    /// parts of the boundary representation.
    pub h12_terms: Option<[f64; 3]>,
    /// Half-plane families: volume and line parts of `w(0,0)`.
    pub w_origin_terms: Option<[f64; 2]>,
}

/// One sweep row. Norms of `a` and `b` and the origin/trace quantities are
/// measured on the family's native domain (the half-plane for
/// `linf_blowup` and `h1_blowup`, the disk otherwise); `linf_u`, the
/// gradients of `w` and all ratios come from the disk solves.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub family: Family,
    pub beta: f64,
    pub eps: f64,
    pub n: usize,
    pub norm_a_inf: f64,
    pub seminorm_a_h1: f64,
    pub seminorm_b_h1: f64,
    pub lorentz_b: f64,
    pub linf_u: f64,
    pub w_origin: f64,
    pub l2_grad_w: f64,
    pub lorentz_grad_w: f64,
    pub h12_trace: f64,
    pub ratio_dirichlet: f64,
    pub ratio_neumann: f64,
    pub ratio_l21: f64,
    pub defect: f64,
    pub diagnostics: Diagnostics,
}

impl Row {
    fn csv_line(&self) -> String {
        let v = [
            self.norm_a_inf,
            self.seminorm_a_h1,
            self.seminorm_b_h1,
            self.lorentz_b,
            self.linf_u,
            self.w_origin,
            self.l2_grad_w,
            self.lorentz_grad_w,
            self.h12_trace,
            self.ratio_dirichlet,
            self.ratio_neumann,
            self.ratio_l21,
            self.defect,
        ];
        let mut s = format!("{},{},{},{}", self.family, self.beta, self.eps, self.n);
        for x in v {
            s.push(',');
            s.push_str(&format!("{x:e}"));
        }
        s
    }
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        f64::INFINITY
    }
}

fn disk_grid(n: usize) -> Result<Arc<Grid>> {
    Ok(Grid::from(make_polar_grid(n, 2 * n)?).shared())
}

fn halfplane_grid(n: usize) -> Result<Arc<Grid>> {
    Ok(Grid::from(make_halfplane_grid(2 * n, n, 1.0, 1.0, true)?).shared())
}

/// Native-domain measurements of the data.
struct DataNorms {
    a_inf: f64,
    a_h1: f64,
    b_h1: f64,
    b_l21: f64,
}

impl DataNorms {
    fn of(a: &ScalarField, b: &ScalarField) -> Self {
        Self {
            a_inf: linf_norm(a),
            a_h1: h1_seminorm(a),
            b_h1: h1_seminorm(b),
            b_l21: lorentz_l21(&gradient(b)),
        }
    }
}

/// Evaluates one `(family, beta, eps)` instance at resolution `n`.
pub fn evaluate(spec: &CounterexampleSpec, n: usize, opts: &SolveOptions) -> Result<Row> {
    let disk = disk_grid(n)?;
    let (a, b) = build_pair(spec, &disk)?;
    let disk_norms = DataNorms::of(&a, &b);

    let u = solve_dirichlet_disk(&jacobian(&a, &b)?)?;
    let direct = solve_wente_neumann(&a, &b, opts)?;
    let conj = conjugate_reduction(&a, &b)?;
    let w = &direct.u;
    let gap = ratio(lp_norm(&conj.w.sub(w)?, 2.0)?, lp_norm(w, 2.0)?);

    let grad_w = gradient(w);
    let l2_grad_w = lp_norm(&grad_w, 2.0)?;
    let lorentz_grad_w = lorentz_l21(&grad_w);
    let linf_u = linf_norm(&u);
    let energy = disk_norms.a_h1 * disk_norms.b_h1;

    let (native, w_origin, h12_trace, h12_terms, w_origin_terms) = if spec.family().on_halfplane() {
        let hp = halfplane_grid(n)?;
        let (ha, hb) = build_pair(spec, &hp)?;
        let rep = Representation::new(&ha, &hb, GreenEval::default())?;
        let (vol0, line0) = rep.trace_terms(0.0);
        let [vol, line, log] = rep.trace_profiles()?;
        let mut profile = vol.add(&line)?;
        if spec.family() == Family::H1Blowup {
            profile = profile.add(&log)?;
        }
        let terms = [gagliardo_h12(&vol), gagliardo_h12(&line), gagliardo_h12(&log)];
        (
            DataNorms::of(&ha, &hb),
            vol0 + line0,
            gagliardo_h12(&profile),
            Some(terms),
            Some([vol0, line0]),
        )
    } else {
        let tw = trace(w);
        let origin = tw.values()[0];
        let norms = DataNorms::of(&a, &b);
        (norms, origin, gagliardo_h12(&tw), None, None)
    };

    Ok(Row {
        family: spec.family(),
        beta: spec.beta(),
        eps: spec.eps(),
        n,
        norm_a_inf: native.a_inf,
        seminorm_a_h1: native.a_h1,
        seminorm_b_h1: native.b_h1,
        lorentz_b: native.b_l21,
        linf_u,
        w_origin,
        l2_grad_w,
        lorentz_grad_w,
        h12_trace,
        ratio_dirichlet: ratio(linf_u + lp_norm(&gradient(&u), 2.0)?, energy),
        ratio_neumann: ratio(l2_grad_w, energy),
        ratio_l21: ratio(lorentz_grad_w, disk_norms.a_inf * disk_norms.b_l21),
        defect: direct.defect,
        diagnostics: Diagnostics {
            ratio_hessian: ratio(hessian_l1(w), energy),
            conjugate_gap: gap,
            curl_residual: conj.curl_residual,
            h12_terms,
            w_origin_terms,
        },
    })
}

/// Fitted growth of one quantity over the eps sweep at the finest
/// resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct FitEntry {
    pub family: Family,
    pub beta: f64,
    pub n: usize,
    pub quantity: &'static str,
    pub plain: Option<Fit>,
    pub offset: Option<Fit>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub rows: Vec<Row>,
    pub fits: Vec<FitEntry>,
}

/// The quantity whose eps-dependence characterizes each family.
pub fn fitted_quantity(family: Family) -> (&'static str, fn(&Row) -> f64) {
    match family {
        Family::LinfBlowup => ("|w_origin|", |r| r.w_origin.abs()),
        Family::H1Blowup => ("h12_trace", |r| r.h12_trace),
        Family::DirichletControl => ("ratio_dirichlet", |r| r.ratio_dirichlet),
        Family::L21Control => ("ratio_l21", |r| r.ratio_l21),
        Family::VanishingTrace => ("ratio_neumann", |r| r.ratio_neumann),
    }
}

/// Runs every `(beta, eps, n)` row. Rows run in parallel and are reported
/// in ascending `(beta, eps, n)` order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let mut betas = cfg.betas.clone();
    let mut epss = cfg.epss.clone();
    betas.sort_by(f64::total_cmp);
    epss.sort_by(f64::total_cmp);
    let mut jobs = Vec::new();
    for &beta in &betas {
        for &eps in &epss {
            for &n in &cfg.resolutions {
                jobs.push((beta, eps, n));
            }
        }
    }
    let rows: Vec<Row> = jobs
        .par_iter()
        .map(|&(beta, eps, n)| {
            CounterexampleSpec::new(cfg.family, beta, eps)
                .and_then(|spec| evaluate(&spec, n, &cfg.solve))
                .map_err(|e| Error::Row {
                    beta,
                    eps,
                    n,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;

    let n_max = *cfg.resolutions.last().expect("validated");
    let (quantity, value) = fitted_quantity(cfg.family);
    let mut by_beta: BTreeMap<usize, Vec<(f64, f64)>> = BTreeMap::new();
    for (k, &beta) in betas.iter().enumerate() {
        let pairs = rows
            .iter()
            .filter(|r| r.beta == beta && r.n == n_max)
            .map(|r| (r.eps, value(r)))
            .collect();
        by_beta.insert(k, pairs);
    }
    let fits = by_beta
        .into_iter()
        .map(|(k, pairs)| FitEntry {
            family: cfg.family,
            beta: betas[k],
            n: n_max,
            quantity,
            plain: fit_log_exponent(&pairs).ok(),
            offset: fit_log_exponent_offset(&pairs).ok(),
        })
        .collect();
    Ok(SweepReport { rows, fits })
}

impl SweepReport {
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            writeln!(w, "{}", r.csv_line())?;
        }
        Ok(())
    }

    /// Fitted exponents followed by the per-row diagnostics.
    pub fn write_summary(&self, mut w: impl Write) -> Result<()> {
        let show = |f: &Option<Fit>| match f {
            Some(f) => format!("alpha={:.4} c={:.4e} d={:.4e} rms={:.2e}", f.alpha, f.c, f.offset, f.residual),
            None => "n/a".to_string(),
        };
        writeln!(w, "fits (value ~ c log(1/eps)^alpha [+ d]):")?;
        for f in &self.fits {
            writeln!(
                w,
                "  {} beta={} n={} {}: plain {} | offset {}",
                f.family,
                f.beta,
                f.n,
                f.quantity,
                show(&f.plain),
                show(&f.offset)
            )?;
        }
        writeln!(w, "diagnostics:")?;
        for r in &self.rows {
            let d = &r.diagnostics;
            write!(
                w,
                "  beta={} eps={:e} n={} ratio_hessian={:.4e} conjugate_gap={:.3e} curl_residual={:.3e}",
                r.beta, r.eps, r.n, d.ratio_hessian, d.conjugate_gap, d.curl_residual
            )?;
            if let Some([v, l, g]) = d.h12_terms {
                write!(w, " h12_volume={v:.4e} h12_line={l:.4e} h12_log={g:.4e}")?;
            }
            if let Some([v, l]) = d.w_origin_terms {
                write!(w, " w_origin_volume={v:.4e} w_origin_line={l:.4e}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_ordered_and_complete() {
        let cfg = SweepConfig::new(
            Family::VanishingTrace,
            vec![0.9, 0.6],
            vec![1e-2, 1e-1, 1e-3],
            vec![8, 16],
        )
        .unwrap();
        let rep = run_sweep(&cfg).unwrap();
        let keys: Vec<(f64, f64, usize)> = rep.rows.iter().map(|r| (r.beta, r.eps, r.n)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(keys, sorted);
        assert_eq!(keys.len(), 12);
        for r in &rep.rows {
            for x in [r.ratio_dirichlet, r.ratio_neumann, r.ratio_l21, r.diagnostics.ratio_hessian] {
                assert!(x.is_finite() && x >= 0.0);
            }
        }
        let mut out = Vec::new();
        rep.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.lines().skip(1).all(|l| l.split(',').count() == 17));
        assert_eq!(rep.fits.len(), 2);
        assert!(rep.fits.iter().all(|f| f.plain.is_some() && f.offset.is_none()));
    }

    #[test]
    fn halfplane_row_reports_terms() {
        let spec = CounterexampleSpec::new(Family::LinfBlowup, 0.75, 1e-2).unwrap();
        let r = evaluate(&spec, 16, &SolveOptions::default()).unwrap();
        let [v, l] = r.diagnostics.w_origin_terms.unwrap();
        assert!((v + l - r.w_origin).abs() < 1e-12);
        assert!(r.diagnostics.h12_terms.is_some());
        assert!((r.norm_a_inf - 1.0).abs() < 1e-12);
    }
}
