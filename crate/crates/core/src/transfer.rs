//! Fundamental solutions `Ψ_ζ^s`, transfer-function evaluation and the
//! `V`, `U`, `Z` factors of the diagonal representation.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, C64};
use crate::measure::{AtomicMeasure, DelayBasis};
use crate::ode::{self, Tolerance};
use crate::spectral::{BoundaryDecomposition, DiagonalForm};
use crate::system::HyperbolicSystem;

/// Condition number of `WB [Ψ_b; I]` beyond which `s` is treated as unusable.
pub const RESOLVENT_COND_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct TransferSample {
    pub s: C64,
    pub g: CMat,
    /// `‖WB‖₂ / σ_min(WB Q)` with `Q` an orthonormal basis of `[Ψ_b; I]`.
    pub boundary_condition_number: f64,
}

/// Which representation `fundamental_solution` uses for a system.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionMethod {
    MatrixExponential,
    DiagonalQuadrature,
    RungeKutta,
}

pub fn solution_method(sys: &HyperbolicSystem) -> SolutionMethod {
    if sys.is_constant_coefficient() {
        SolutionMethod::MatrixExponential
    } else if linalg::is_diagonal(&sys.p1) && sys.h.is_diagonal() && sys.p0.is_diagonal() {
        SolutionMethod::DiagonalQuadrature
    } else {
        SolutionMethod::RungeKutta
    }
}

fn check_xi(sys: &HyperbolicSystem, xi: f64) -> Result<()> {
    let slack = 1e-12 * (sys.b - sys.a).max(1.0);
    if xi.is_finite() && xi >= sys.a - slack && xi <= sys.b + slack {
        Ok(())
    } else {
        Err(Error::Domain { xi, a: sys.a, b: sys.b })
    }
}

/// `A(ξ) = P1⁻¹ (s H⁻¹(ξ) − P0(ξ))`, the generator of `v' = A v`.
fn generator(p1_inv: &CMat, p0: &CMat, h: &CMat, s: C64) -> Result<CMat> {
    let h_inv = linalg::inverse(h)?;
    Ok(p1_inv * (h_inv * s - p0))
}

/// `∫_{x0}^{x1} dξ / h(ξ)` for `h` linear between `h0` and `h1`.
fn reciprocal_linear_integral(x0: f64, x1: f64, h0: f64, h1: f64) -> f64 {
    let len = x1 - x0;
    let d = h1 - h0;
    if d.abs() <= 1e-12 * h0.abs() {
        len * 2.0 / (h0 + h1)
    } else {
        len * (d / h0).ln_1p() / d
    }
}

/// `∫_a^ζ f` for a piecewise-linear scalar function given by `eval`, with kinks at `nodes`.
fn piecewise_integral(a: f64, zeta: f64, nodes: &[f64], eval: impl Fn(f64) -> C64, reciprocal: bool) -> C64 {
    let mut pts: Vec<f64> = nodes.iter().copied().filter(|&x| x > a && x < zeta).collect();
    pts.insert(0, a);
    pts.push(zeta);
    let mut acc = C64::new(0.0, 0.0);
    for w in pts.windows(2) {
        let (f0, f1) = (eval(w[0]), eval(w[1]));
        acc += if reciprocal {
            real(reciprocal_linear_integral(w[0], w[1], f0.re, f1.re))
        } else {
            (f0 + f1) * real(0.5 * (w[1] - w[0]))
        };
    }
    acc
}

/// Solve `Y' = A(ξ) Y` from `from` to `to` starting at `y0`.
pub fn propagate(sys: &HyperbolicSystem, s: C64, y0: &CMat, from: f64, to: f64) -> Result<CMat> {
    check_xi(sys, from)?;
    check_xi(sys, to)?;
    let n = sys.n;
    let p1_inv = linalg::inverse(&sys.p1).map_err(|_| Error::SingularP1)?;
    match solution_method(sys) {
        SolutionMethod::MatrixExponential => {
            let a = generator(&p1_inv, &sys.p0.eval_unchecked(from), &sys.h.eval_unchecked(from), s)?;
            Ok((a * real(to - from)).exp() * y0)
        }
        SolutionMethod::DiagonalQuadrature => {
            let (lo, hi, sign) = if to >= from { (from, to, 1.0) } else { (to, from, -1.0) };
            let h_nodes: Vec<f64> = sys.h.nodes().to_vec();
            let p0_nodes: Vec<f64> = sys.p0.nodes().to_vec();
            let mut d = Vec::with_capacity(n);
            for j in 0..n {
                let inv_h = piecewise_integral(lo, hi, &h_nodes, |x| sys.h.eval_unchecked(x)[(j, j)], true);
                let p0_int = piecewise_integral(lo, hi, &p0_nodes, |x| sys.p0.eval_unchecked(x)[(j, j)], false);
                let exponent = p1_inv[(j, j)] * (s * inv_h - p0_int) * sign;
                d.push(exponent.exp());
            }
            Ok(linalg::diag(&d) * y0)
        }
        SolutionMethod::RungeKutta => {
            let mut breaks: Vec<f64> = sys.h.nodes().iter().chain(sys.p0.nodes()).copied().collect();
            breaks.sort_by(f64::total_cmp);
            breaks.dedup();
            let coeff = |x: f64| {
                generator(&p1_inv, &sys.p0.eval_unchecked(x), &sys.h.eval_unchecked(x), s)
                    .unwrap_or_else(|_| CMat::from_element(n, n, C64::new(f64::NAN, 0.0)))
            };
            ode::integrate(coeff, y0, from, to, &breaks, Tolerance::default())
        }
    }
}

/// `Ψ_ζ^s` with `Ψ_a^s = I`.
pub fn fundamental_solution(sys: &HyperbolicSystem, s: C64, zeta: f64) -> Result<CMat> {
    propagate(sys, s, &linalg::eye(sys.n), sys.a, zeta)
}

/// Orthonormal basis of the column space of `[Ψ_b; I]`.
fn boundary_basis(psi_b: &CMat) -> CMat {
    let stacked = linalg::vstack(psi_b, &linalg::eye(psi_b.nrows()));
    stacked.qr().q()
}

/// `G(s) = WC [Ψ_b; I] (WB [Ψ_b; I])⁻¹`.
pub fn transfer_eval(sys: &HyperbolicSystem, s: C64) -> Result<TransferSample> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::Parameter("s must be finite".into()));
    }
    let psi_b = fundamental_solution(sys, s, sys.b)?;
    if psi_b.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Resolvent { cond: f64::INFINITY });
    }
    let q = boundary_basis(&psi_b);
    let wbq = &sys.wb * &q;
    // measured against ‖WB‖ so a 1×1 boundary map cannot hide cancellation
    let sv = linalg::singular_values(&wbq);
    let smallest = sv.last().copied().unwrap_or(0.0);
    let cond = if smallest > 0.0 { linalg::norm_2(&sys.wb) / smallest } else { f64::INFINITY };
    if !(cond <= RESOLVENT_COND_LIMIT) {
        return Err(Error::Resolvent { cond });
    }
    let wcq = &sys.wc * &q;
    // G = WC Q (WB Q)⁻¹, solved as (WB Q)ᵀ Gᵀ = (WC Q)ᵀ
    let gt = linalg::solve(&wbq.transpose(), &wcq.transpose()).map_err(|_| Error::Resolvent { cond })?;
    let g = gt.transpose();
    if g.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Resolvent { cond });
    }
    Ok(TransferSample { s, g, boundary_condition_number: cond })
}

/// Evaluate `G` at many points in parallel.
pub fn transfer_grid(sys: &HyperbolicSystem, points: &[C64]) -> Vec<Result<TransferSample>> {
    points.par_iter().map(|&s| transfer_eval(sys, s)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct VuMatrices {
    pub v: CMat,
    pub v_inv: CMat,
    pub u: CMat,
}

/// `V = diag(e^{sτ_j}, j < m; 1, j ≥ m)`, its inverse, and `U = diag(e^{−sτ_j})`.
pub fn vu_matrices(diag: &DiagonalForm, s: C64) -> Result<VuMatrices> {
    diag.require_p0d_zero()?;
    let n = diag.n;
    let v: Vec<C64> = (0..n).map(|j| if j < diag.m { (s * diag.tau[j]).exp() } else { real(1.0) }).collect();
    let v_inv: Vec<C64> = (0..n).map(|j| if j < diag.m { (-s * diag.tau[j]).exp() } else { real(1.0) }).collect();
    let u: Vec<C64> = diag.tau.iter().map(|&t| (-s * t).exp()).collect();
    Ok(VuMatrices { v: linalg::diag(&v), v_inv: linalg::diag(&v_inv), u: linalg::diag(&u) })
}

/// Diagonal entries of `Ψ_b V⁻¹` (top block) and `V⁻¹` (bottom block) of `[Ψ_b; I] V⁻¹`.
fn z_blocks(diag: &DiagonalForm, s: C64) -> (Vec<C64>, Vec<C64>) {
    let n = diag.n;
    let decay: Vec<C64> = diag.tau.iter().map(|&t| (-s * t).exp()).collect();
    let top = (0..n).map(|j| if j < diag.m { real(1.0) } else { decay[j] }).collect();
    let bottom = (0..n).map(|j| if j < diag.m { decay[j] } else { real(1.0) }).collect();
    (top, bottom)
}

/// `Z(s) = WC^D [Ψ_b; I] V(s)⁻¹`.
pub fn z_eval(diag: &DiagonalForm, s: C64) -> Result<CMat> {
    diag.require_p0d_zero()?;
    let (top, bottom) = z_blocks(diag, s);
    let stacked = linalg::vstack(&linalg::diag(&top), &linalg::diag(&bottom));
    Ok(&diag.wcd * stacked)
}

/// Atomic measure whose Laplace transform is `Z`.
pub fn z_measure(diag: &DiagonalForm) -> Result<AtomicMeasure> {
    diag.require_p0d_zero()?;
    let n = diag.n;
    let basis = DelayBasis::new(&diag.tau)?;
    let (wc1, wc2) = linalg::split_halves(&diag.wcd);
    let mut out = AtomicMeasure::zero(n, basis.base.clone())?;
    for j in 0..n {
        let (at_origin, delayed) = if j < diag.m { (&wc1, &wc2) } else { (&wc2, &wc1) };
        let mut w0 = CMat::zeros(n, n);
        w0.set_column(j, &at_origin.column(j));
        out.add_atom(basis.origin(), w0)?;
        let mut w1 = CMat::zeros(n, n);
        w1.set_column(j, &delayed.column(j));
        out.add_atom(basis.unit(j), w1)?;
    }
    Ok(out)
}

/// `Z(s) (I − M U(s))⁻¹ K⁻¹`.
pub fn transfer_from_decomposition(diag: &DiagonalForm, dec: &BoundaryDecomposition, s: C64) -> Result<CMat> {
    let (k, m) = (dec.k()?, dec.m()?);
    let z = z_eval(diag, s)?;
    let vu = vu_matrices(diag, s)?;
    let resolvent = linalg::eye(diag.n) - m * &vu.u;
    let inner = linalg::solve(&resolvent, &linalg::inverse(k)?)?;
    Ok(z * inner)
}
