//! Hyperbolic boundary control systems and their structural validation.

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat};
use crate::spectral;

/// Scalar field of the system data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Complex,
}

/// A ξ-dependent n×n coefficient: constant, or piecewise linear on a grid.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialMatrixFunction {
    Constant(CMat),
    Grid { xs: Vec<f64>, values: Vec<CMat> },
}

impl SpatialMatrixFunction {
    pub fn constant(value: CMat) -> Self {
        SpatialMatrixFunction::Constant(value)
    }

    /// Grid kind; checks ordering, sample count and shapes.
    pub fn grid(xs: Vec<f64>, values: Vec<CMat>) -> Result<Self> {
        if xs.len() < 2 {
            return Err(Error::format("xs", "grid needs at least 2 samples"));
        }
        if xs.len() != values.len() {
            return Err(Error::Dimension(format!(
                "grid has {} nodes but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) || xs.iter().any(|x| !x.is_finite()) {
            return Err(Error::format("xs", "grid nodes must be finite and strictly increasing"));
        }
        let shape = values[0].shape();
        if values.iter().any(|v| v.shape() != shape) {
            return Err(Error::Dimension("grid values have inconsistent shapes".into()));
        }
        Ok(SpatialMatrixFunction::Grid { xs, values })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, SpatialMatrixFunction::Constant(_))
    }

    pub fn shape(&self) -> (usize, usize) {
        match self {
            SpatialMatrixFunction::Constant(v) => v.shape(),
            SpatialMatrixFunction::Grid { values, .. } => values[0].shape(),
        }
    }

    /// Grid nodes, empty for the constant kind.
    pub fn nodes(&self) -> &[f64] {
        match self {
            SpatialMatrixFunction::Constant(_) => &[],
            SpatialMatrixFunction::Grid { xs, .. } => xs,
        }
    }

    /// Evaluate without a domain check; the grid kind clamps to its end values.
    pub fn eval_unchecked(&self, xi: f64) -> CMat {
        match self {
            SpatialMatrixFunction::Constant(v) => v.clone(),
            SpatialMatrixFunction::Grid { xs, values } => {
                let last = xs.len() - 1;
                if xi <= xs[0] {
                    return values[0].clone();
                }
                if xi >= xs[last] {
                    return values[last].clone();
                }
                let k = xs.partition_point(|&x| x <= xi).min(last);
                let (x0, x1) = (xs[k - 1], xs[k]);
                let t = (xi - x0) / (x1 - x0);
                &values[k - 1] * real(1.0 - t) + &values[k] * real(t)
            }
        }
    }

    /// Evaluate with a domain check against the grid's own span.
    pub fn eval(&self, xi: f64) -> Result<CMat> {
        if let SpatialMatrixFunction::Grid { xs, .. } = self {
            let (a, b) = (xs[0], xs[xs.len() - 1]);
            if !in_interval(xi, a, b) {
                return Err(Error::Domain { xi, a, b });
            }
        }
        Ok(self.eval_unchecked(xi))
    }

    fn all_matrices(&self) -> Vec<&CMat> {
        match self {
            SpatialMatrixFunction::Constant(v) => vec![v],
            SpatialMatrixFunction::Grid { values, .. } => values.iter().collect(),
        }
    }

    fn is_real(&self) -> bool {
        self.all_matrices().into_iter().all(linalg::is_real)
    }

    /// True when every sample is diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.all_matrices().into_iter().all(linalg::is_diagonal)
    }
}

/// Evaluate a spatial coefficient at `xi`; grid kinds reject points outside their span.
pub fn eval_spatial(f: &SpatialMatrixFunction, xi: f64) -> Result<CMat> {
    f.eval(xi)
}

fn in_interval(xi: f64, a: f64, b: f64) -> bool {
    let slack = 1e-12 * (b - a).abs().max(1.0);
    xi.is_finite() && xi >= a - slack && xi <= b + slack
}

/// `x_t = P1 ∂ξ(H x) + P0 H x` on `[a, b]` with boundary input `WB` and output `WC`
/// acting on the trace vector `[(Hx)(b); (Hx)(a)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicSystem {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub p1: CMat,
    pub p0: SpatialMatrixFunction,
    pub h: SpatialMatrixFunction,
    pub wb: CMat,
    pub wc: CMat,
    pub field: Field,
}

impl HyperbolicSystem {
    /// Construct and check structural well-formedness.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        n: usize,
        (a, b): (f64, f64),
        p1: CMat,
        p0: SpatialMatrixFunction,
        h: SpatialMatrixFunction,
        wb: CMat,
        wc: CMat,
        field: Field,
    ) -> Result<Self> {
        let sys = HyperbolicSystem { n, a, b, p1, p0, h, wb, wc, field };
        sys.check_structure()?;
        Ok(sys)
    }

    /// Dimension, interval, grid-endpoint and field checks.
    pub fn check_structure(&self) -> Result<()> {
        let n = self.n;
        if n == 0 {
            return Err(Error::format("n", "must be positive"));
        }
        if !(self.a.is_finite() && self.b.is_finite() && self.a < self.b) {
            return Err(Error::format("interval", "need finite a < b"));
        }
        let square = |name: &str, shape: (usize, usize)| {
            if shape != (n, n) {
                Err(Error::Dimension(format!("{name} is {}x{}, expected {n}x{n}", shape.0, shape.1)))
            } else {
                Ok(())
            }
        };
        square("P1", self.p1.shape())?;
        square("P0", self.p0.shape())?;
        square("H", self.h.shape())?;
        for (name, w) in [("WB", &self.wb), ("WC", &self.wc)] {
            if w.shape() != (n, 2 * n) {
                return Err(Error::Dimension(format!(
                    "{name} is {}x{}, expected {n}x{}",
                    w.nrows(),
                    w.ncols(),
                    2 * n
                )));
            }
        }
        for (name, f) in [("P0", &self.p0), ("H", &self.h)] {
            let xs = f.nodes();
            if let (Some(&first), Some(&last)) = (xs.first(), xs.last()) {
                let tol = 1e-12 * (self.b - self.a).max(1.0);
                if (first - self.a).abs() > tol || (last - self.b).abs() > tol {
                    return Err(Error::format(
                        name,
                        format!("grid must span [{}, {}], got [{first}, {last}]", self.a, self.b),
                    ));
                }
            }
        }
        let all_finite = [&self.p1, &self.wb, &self.wc]
            .into_iter()
            .chain(self.p0.all_matrices())
            .chain(self.h.all_matrices())
            .all(|m| m.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        if !all_finite {
            return Err(Error::format("matrices", "entries must be finite"));
        }
        if self.field == Field::Real {
            let real_data = [&self.p1, &self.wb, &self.wc].into_iter().all(linalg::is_real)
                && self.p0.is_real()
                && self.h.is_real();
            if !real_data {
                return Err(Error::format("field", "declared real but has complex entries"));
            }
        }
        Ok(())
    }

    fn check_xi(&self, xi: f64) -> Result<()> {
        if in_interval(xi, self.a, self.b) {
            Ok(())
        } else {
            Err(Error::Domain { xi, a: self.a, b: self.b })
        }
    }

    pub fn h_at(&self, xi: f64) -> Result<CMat> {
        self.check_xi(xi)?;
        Ok(self.h.eval_unchecked(xi))
    }

    pub fn p0_at(&self, xi: f64) -> Result<CMat> {
        self.check_xi(xi)?;
        Ok(self.p0.eval_unchecked(xi))
    }

    pub fn is_constant_coefficient(&self) -> bool {
        self.p0.is_constant() && self.h.is_constant()
    }

    /// Union of the coefficient grids with a uniform grid of `k` points.
    pub fn evaluation_grid(&self, k: usize) -> Vec<f64> {
        let mut xs: Vec<f64> = (0..k)
            .map(|i| self.a + (self.b - self.a) * i as f64 / (k - 1) as f64)
            .chain(self.h.nodes().iter().copied())
            .chain(self.p0.nodes().iter().copied())
            .collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (self.b - self.a));
        xs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ContractionClass {
    StrictlyPositive,
    Psd,
    Indefinite,
}

impl ContractionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ContractionClass::StrictlyPositive => "strictly_positive",
            ContractionClass::Psd => "psd",
            ContractionClass::Indefinite => "indefinite",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SemigroupRank {
    Ok,
    Failed,
    NotApplicable,
}

impl SemigroupRank {
    pub fn as_str(self) -> &'static str {
        match self {
            SemigroupRank::Ok => "ok",
            SemigroupRank::Failed => "failed",
            SemigroupRank::NotApplicable => "not_applicable",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub ok: bool,
    pub checks: Vec<Check>,
    pub h_min_eigenvalue: f64,
    pub h_max_eigenvalue: f64,
    pub contraction_matrix: CMat,
    pub contraction_class: ContractionClass,
    /// Smallest eigenvalue of the contraction matrix.
    pub contraction_margin: f64,
    pub semigroup_rank_ok: SemigroupRank,
}

impl ValidationReport {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Uniform points added to the coefficient grids when checking positivity of H.
pub const POSITIVITY_GRID: usize = 129;

/// Run the standing-assumption checks. Only structural errors are returned as `Err`.
pub fn validate_system(sys: &HyperbolicSystem, tol: f64) -> Result<ValidationReport> {
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    sys.check_structure()?;
    let n = sys.n;
    let mut checks = Vec::new();

    let p1_scale = linalg::norm_2(&sys.p1).max(1.0);
    let p1_asym = linalg::norm_2(&(&sys.p1 - sys.p1.adjoint())) / p1_scale;
    checks.push(Check { name: "P1 self-adjoint", passed: p1_asym <= tol, residual: p1_asym });

    let sv = linalg::singular_values(&sys.p1);
    let sigma_min = *sv.last().unwrap();
    let p1_invertible = sigma_min > tol * sv[0].max(f64::MIN_POSITIVE);
    checks.push(Check { name: "P1 invertible", passed: p1_invertible, residual: sigma_min });

    let mut h_asym: f64 = 0.0;
    let mut h_min = f64::INFINITY;
    let mut h_max = f64::NEG_INFINITY;
    for xi in sys.evaluation_grid(POSITIVITY_GRID) {
        let h = sys.h.eval_unchecked(xi);
        let scale = linalg::norm_2(&h).max(1.0);
        h_asym = h_asym.max(linalg::norm_2(&(&h - h.adjoint())) / scale);
        let (lo, hi) = linalg::hermitian_extremes(&h);
        h_min = h_min.min(lo);
        h_max = h_max.max(hi);
    }
    checks.push(Check { name: "H self-adjoint", passed: h_asym <= tol, residual: h_asym });
    checks.push(Check {
        name: "H uniformly positive",
        passed: h_min > tol * h_max.abs().max(1.0),
        residual: h_min,
    });
    checks.push(Check { name: "H bounded", passed: h_max.is_finite(), residual: h_max });

    let wb_rank = linalg::rank(&sys.wb, tol);
    checks.push(Check {
        name: "WB full row rank",
        passed: wb_rank == n,
        residual: relative_gap(&sys.wb, n),
    });
    let stacked = linalg::vstack(&sys.wb, &sys.wc);
    let stacked_rank = linalg::rank(&stacked, tol);
    checks.push(Check {
        name: "[WB; WC] full rank",
        passed: stacked_rank == 2 * n,
        residual: relative_gap(&stacked, 2 * n),
    });

    let (contraction_matrix, contraction_class, contraction_margin) = if p1_invertible {
        let (m, class, margin) = contraction_form_with_tol(sys, tol)?;
        (m, class, margin)
    } else {
        (CMat::zeros(n, n), ContractionClass::Indefinite, f64::NAN)
    };

    let structural_ok = checks.iter().all(|c| c.passed);
    let semigroup_rank_ok = if structural_ok {
        match spectral::diagonalize(sys, spectral::DEFAULT_GRID_SIZE) {
            Ok(d) => {
                let probe = spectral::semigroup_rank_matrix(&d);
                if linalg::rank(&probe, tol) == n {
                    SemigroupRank::Ok
                } else {
                    SemigroupRank::Failed
                }
            }
            Err(_) => SemigroupRank::NotApplicable,
        }
    } else {
        SemigroupRank::NotApplicable
    };
    checks.push(Check {
        name: "diagonal semigroup rank",
        passed: semigroup_rank_ok != SemigroupRank::Failed,
        residual: if semigroup_rank_ok == SemigroupRank::Failed { 1.0 } else { 0.0 },
    });

    Ok(ValidationReport {
        ok: checks.iter().all(|c| c.passed),
        checks,
        h_min_eigenvalue: h_min,
        h_max_eigenvalue: h_max,
        contraction_matrix,
        contraction_class,
        contraction_margin,
        semigroup_rank_ok,
    })
}

/// Relative size of the k-th singular value (1-based index `k`), 0 when rank-deficient.
fn relative_gap(a: &CMat, k: usize) -> f64 {
    let sv = linalg::singular_values(a);
    match (sv.first(), sv.get(k - 1)) {
        (Some(&top), Some(&s)) if top > 0.0 => s / top,
        _ => 0.0,
    }
}

/// `R0⁻¹` for `R0 = (1/√2)[[P1, −P1], [I, I]]`, i.e. `(1/√2)[[P1⁻¹, I], [−P1⁻¹, I]]`.
pub fn r0_inverse(p1: &CMat) -> Result<CMat> {
    let n = p1.nrows();
    let p1_inv = linalg::inverse(p1).map_err(|_| Error::SingularP1)?;
    let id = linalg::eye(n);
    let top = linalg::hstack(&p1_inv, &id);
    let bottom = linalg::hstack(&(-&p1_inv), &id);
    Ok(linalg::vstack(&top, &bottom) * real(std::f64::consts::FRAC_1_SQRT_2))
}

/// `WB R0⁻¹ Σ (WB R0⁻¹)*` with `Σ = [[0, I], [I, 0]]`, and its classification.
pub fn contraction_form(sys: &HyperbolicSystem) -> Result<(CMat, ContractionClass)> {
    let (m, class, _) = contraction_form_with_tol(sys, 1e-10)?;
    Ok((m, class))
}

/// As [`contraction_form`], also returning the smallest eigenvalue.
pub fn contraction_form_with_tol(
    sys: &HyperbolicSystem,
    tol: f64,
) -> Result<(CMat, ContractionClass, f64)> {
    let n = sys.n;
    if linalg::singular_values(&sys.p1).last().copied().unwrap_or(0.0) == 0.0 {
        return Err(Error::SingularP1);
    }
    let x = &sys.wb * r0_inverse(&sys.p1)?;
    let (x1, x2) = linalg::split_halves(&x);
    // X Σ X* = X1 X2* + X2 X1*
    let form = &x1 * x2.adjoint() + &x2 * x1.adjoint();
    let (vals, _) = linalg::hermitian_eigen(&form);
    let margin = vals[0];
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let class = if margin > tol * scale {
        ContractionClass::StrictlyPositive
    } else if margin >= -tol * scale {
        ContractionClass::Psd
    } else {
        ContractionClass::Indefinite
    };
    debug_assert_eq!(form.shape(), (n, n));
    Ok((form, class, margin))
}
