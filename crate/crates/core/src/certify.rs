//! Sufficient BIBO conditions on the reflection matrix `M`, the certificate
//! pipeline, and truncated impulse responses with total-variation tail bounds.

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, RMat};
use crate::measure::{self, mu_measure, AtomicMeasure, Side, DEFAULT_MERGE_TOL};
use crate::spectral::{self, BoundaryDecomposition, DiagonalForm};
use crate::system::{self, HyperbolicSystem};
use crate::transfer::z_measure;

/// Margin applied to every strict `< 1` test.
pub const STRICT_MARGIN: f64 = 1e-12;
pub const DEFAULT_K_MAX: usize = 12;
/// `K` with a larger condition number makes the certificate inconclusive.
pub const K_COND_LIMIT: f64 = 1e10;
pub const VALIDATION_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    CertifiedBibo,
    Inconclusive,
    InvalidInput,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::CertifiedBibo => "certified_bibo",
            Outcome::Inconclusive => "inconclusive",
            Outcome::InvalidInput => "invalid_input",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    InfNorm,
    AbsSeries,
    K0,
    None,
}

impl Condition {
    pub fn as_str(self) -> &'static str {
        match self {
            Condition::InfNorm => "cond1_inf_norm",
            Condition::AbsSeries => "cond2_abs_series",
            Condition::K0 => "cond3_k0",
            Condition::None => "none",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfNormCheck {
    pub pass: bool,
    pub m_inf: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsSeriesCheck {
    pub pass: bool,
    pub rho_abs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerRow {
    pub k: usize,
    /// Merged total variation of `(M U)^k`.
    pub tv: RMat,
    pub row_sums: Vec<f64>,
    pub max_row_sum: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct K0Check {
    pub pass: bool,
    pub k0: Option<usize>,
    pub table: Vec<PowerRow>,
}

fn strictly_below_one(x: f64) -> bool {
    x < 1.0 - STRICT_MARGIN
}

fn borderline(x: f64) -> bool {
    (x - 1.0).abs() <= STRICT_MARGIN
}

/// `‖M‖∞ < 1`.
pub fn condition1_inf_norm(m: &CMat) -> InfNormCheck {
    let m_inf = linalg::norm_inf(m);
    InfNormCheck { pass: strictly_below_one(m_inf), m_inf }
}

/// `ρ(|M|) < 1`, equivalently convergence of `Σ |M|^k`.
pub fn condition2_abs_series(m: &CMat) -> AbsSeriesCheck {
    let rho_abs = linalg::spectral_radius(&linalg::abs(m));
    AbsSeriesCheck { pass: strictly_below_one(rho_abs), rho_abs }
}

/// Search `k = 1..=k_max` for a power of `M U` whose total variation has max row sum below one.
/// The table always covers every `k` up to `k_max`.
pub fn condition3_k0(m: &CMat, diag: &DiagonalForm, k_max: usize) -> Result<K0Check> {
    if k_max < 1 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    let mu = mu_measure(m, diag)?;
    let mut power = AtomicMeasure::identity(mu.n(), mu.base_delays().to_vec())?;
    let mut table = Vec::with_capacity(k_max);
    let mut k0 = None;
    for k in 1..=k_max {
        power = power.convolve(&mu)?;
        let tv = power.total_variation(DEFAULT_MERGE_TOL);
        let row_sums = linalg::row_sums(&tv);
        let max_row_sum = row_sums.iter().copied().fold(0.0, f64::max);
        if k0.is_none() && strictly_below_one(max_row_sum) {
            k0 = Some(k);
        }
        table.push(PowerRow { k, tv, row_sums, max_row_sum });
    }
    Ok(K0Check { pass: k0.is_some(), k0, table })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CertificateReport {
    pub outcome: Outcome,
    pub triggered_condition: Condition,
    pub cond1: Option<InfNormCheck>,
    pub cond2: Option<AbsSeriesCheck>,
    pub cond3: Option<K0Check>,
    pub m: Option<CMat>,
    pub k_condition: Option<f64>,
    pub tau: Vec<f64>,
    /// Smallest eigenvalue of the contraction form.
    pub contraction_margin: Option<f64>,
    pub warnings: Vec<String>,
}

impl CertificateReport {
    fn new(outcome: Outcome) -> Self {
        CertificateReport {
            outcome,
            triggered_condition: Condition::None,
            cond1: None,
            cond2: None,
            cond3: None,
            m: None,
            k_condition: None,
            tau: Vec::new(),
            contraction_margin: None,
            warnings: Vec::new(),
        }
    }
}

/// validate → diagonalize → `P0^D = 0` gate → `(K, M)` of `WB^D` → conditions 1, 2, 3.
pub fn certify(sys: &HyperbolicSystem, k_max: usize) -> Result<CertificateReport> {
    if k_max < 1 {
        return Err(Error::Parameter("k_max must be at least 1".into()));
    }
    let validation = match system::validate_system(sys, VALIDATION_TOL) {
        Ok(v) => v,
        Err(e) => {
            let mut r = CertificateReport::new(Outcome::InvalidInput);
            r.warnings.push(e.to_string());
            return Ok(r);
        }
    };
    if !validation.ok {
        let mut r = CertificateReport::new(Outcome::InvalidInput);
        r.warnings.extend(validation.failed_checks().map(|c| format!("check failed: {}", c.name)));
        return Ok(r);
    }
    let mut report = CertificateReport::new(Outcome::Inconclusive);
    report.contraction_margin = Some(validation.contraction_margin);

    let diag = match spectral::diagonalize(sys, spectral::DEFAULT_GRID_SIZE) {
        Ok(d) => d,
        Err(e) => {
            report.warnings.push(format!("diagonalization failed: {e}"));
            return Ok(report);
        }
    };
    report.tau = diag.tau.clone();
    if !diag.p0d_is_zero {
        report.warnings.push(format!("P0^D does not vanish (max norm {:e})", diag.p0d_residual));
        return Ok(report);
    }
    let dec = diag.decompose()?;
    let (Some(k), Some(m)) = (dec.k.as_ref(), dec.m.as_ref()) else {
        report.warnings.push("no (K, M) decomposition of the diagonal input matrix".into());
        return Ok(report);
    };
    let k_cond = linalg::cond(k);
    report.k_condition = Some(k_cond);
    report.m = Some(m.clone());
    if k_cond > K_COND_LIMIT {
        report.warnings.push(format!("K is ill-conditioned (condition number {k_cond:e})"));
        return Ok(report);
    }

    let mut notes = Vec::new();
    let c1 = condition1_inf_norm(m);
    let pass1 = c1.pass;
    if borderline(c1.m_inf) {
        notes.push(format!("borderline: ||M||_inf = {} within {STRICT_MARGIN:e} of 1", c1.m_inf));
    }
    report.cond1 = Some(c1);
    if pass1 {
        report.outcome = Outcome::CertifiedBibo;
        report.triggered_condition = Condition::InfNorm;
        return Ok(report);
    }
    let c2 = condition2_abs_series(m);
    let pass2 = c2.pass;
    if borderline(c2.rho_abs) {
        notes.push(format!("borderline: rho(|M|) = {} within {STRICT_MARGIN:e} of 1", c2.rho_abs));
    }
    report.cond2 = Some(c2);
    if pass2 {
        report.outcome = Outcome::CertifiedBibo;
        report.triggered_condition = Condition::AbsSeries;
        return Ok(report);
    }
    let c3 = condition3_k0(m, &diag, k_max)?;
    if c3.pass {
        report.outcome = Outcome::CertifiedBibo;
        report.triggered_condition = Condition::K0;
    } else {
        if c3.table.iter().any(|r| borderline(r.max_row_sum)) {
            notes.push(format!("borderline: max row sums of TV((MU)^k) within {STRICT_MARGIN:e} of 1"));
        }
        report.warnings.extend(notes);
    }
    report.cond3 = Some(c3);
    Ok(report)
}

/// Bound on the total variation of the omitted Neumann terms.
#[derive(Debug, Clone, PartialEq)]
pub struct TailBound {
    pub condition: Condition,
    /// Ratio `q < 1` of the geometric bound.
    pub decay_ratio: f64,
    pub k0: usize,
    /// Bound on each output row's total variation of the omitted part of the impulse response.
    pub row_bound: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseTruncation {
    /// `Z ∗ Σ_{k≤N} (MU)^{∗k} · K⁻¹`.
    pub measure: AtomicMeasure,
    pub order: usize,
    pub tail: Option<TailBound>,
}

impl ImpulseTruncation {
    pub fn require_bound(&self) -> Result<&TailBound> {
        self.tail.as_ref().ok_or(Error::NoDecayCertificate)
    }

    /// Output times up to which the truncated measure is exact.
    pub fn coverage(&self) -> f64 {
        let tau_min = self.measure.base_delays().iter().copied().fold(f64::INFINITY, f64::min);
        (self.order as f64 + 1.0) * tau_min
    }
}

/// Truncated inverse Laplace transform of `G = Z (I − M U)⁻¹ K⁻¹`.
pub fn impulse_response(diag: &DiagonalForm, dec: &BoundaryDecomposition, order: usize) -> Result<ImpulseTruncation> {
    diag.require_p0d_zero()?;
    let (k, m) = (dec.k()?, dec.m()?);
    let k_inv = linalg::inverse(k)?;
    let z = z_measure(diag)?;
    let mu = mu_measure(m, diag)?;

    let mut power = AtomicMeasure::identity(diag.n, mu.base_delays().to_vec())?;
    let mut series = power.clone();
    for _ in 0..order {
        power = power.convolve(&mu)?;
        series = series.add(&power)?;
    }
    let measure = z.convolve(&series)?.scale_matrix(&k_inv, Side::Right)?;

    let tail = tail_bound(m, diag, &z, &k_inv, order)?;
    Ok(ImpulseTruncation { measure, order, tail })
}

fn tail_bound(m: &CMat, diag: &DiagonalForm, z: &AtomicMeasure, k_inv: &CMat, order: usize) -> Result<Option<TailBound>> {
    let n = diag.n;
    let tv_z = z.total_variation_unmerged();
    let k_inv_abs = linalg::abs(k_inv);
    let k_inv_norm = measure::max_row_sum(&k_inv_abs);
    let scalar_rows = |b: f64| -> Vec<f64> { linalg::row_sums(&tv_z).iter().map(|r| r * b * k_inv_norm).collect() };
    let exponent = (order + 1) as i32;

    let c1 = condition1_inf_norm(m);
    if c1.pass {
        let q = c1.m_inf;
        let b = q.powi(exponent) / (1.0 - q);
        return Ok(Some(TailBound { condition: Condition::InfNorm, decay_ratio: q, k0: 1, row_bound: scalar_rows(b) }));
    }
    let c2 = condition2_abs_series(m);
    if c2.pass {
        let abs_m = linalg::abs(m);
        let resolvent = (RMat::identity(n, n) - &abs_m)
            .try_inverse()
            .ok_or_else(|| Error::Numerical("I − |M| not invertible".into()))?;
        let mut pow = RMat::identity(n, n);
        for _ in 0..=order {
            pow = &pow * &abs_m;
        }
        let bound = &tv_z * (pow * resolvent) * &k_inv_abs;
        return Ok(Some(TailBound {
            condition: Condition::AbsSeries,
            decay_ratio: c2.rho_abs,
            k0: 1,
            row_bound: linalg::row_sums(&bound),
        }));
    }
    let c3 = condition3_k0(m, diag, DEFAULT_K_MAX)?;
    let Some(k0) = c3.k0 else { return Ok(None) };
    let q = c3.table[k0 - 1].max_row_sum;
    // C = max over r < k0 of ‖TV((MU)^r)‖∞, with r = 0 giving 1
    let prefix = c3.table[..k0 - 1].iter().map(|r| r.max_row_sum).fold(1.0, f64::max);
    let first = order + 1;
    let l0 = first / k0;
    let partial = k0 * (l0 + 1) - first;
    let b = prefix * (partial as f64 * q.powi(l0 as i32) + k0 as f64 * q.powi(l0 as i32 + 1) / (1.0 - q));
    Ok(Some(TailBound { condition: Condition::K0, decay_ratio: q, k0, row_bound: scalar_rows(b) }))
}

/// `max_p` of row `p`'s total variation plus its tail bound: an upper bound on the L∞ gain
/// with the sup-norm on input and output vectors.
pub fn gain_upper_bound(imp: &ImpulseTruncation) -> Result<f64> {
    let tail = imp.require_bound()?;
    let tv = imp.measure.total_variation(DEFAULT_MERGE_TOL);
    Ok(linalg::row_sums(&tv).iter().zip(&tail.row_bound).map(|(r, t)| r + t).fold(0.0, f64::max))
}
