//! Signature projections of `P1`, boundary decompositions `(J, L)` / `(K, M)`,
//! and diagonalization of `P1 H` into characteristic (Riemann-invariant) form.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid;
use crate::linalg::{self, real, CMat, C64};
use crate::system::{Field, HyperbolicSystem, SpatialMatrixFunction};

pub const DEFAULT_GRID_SIZE: usize = 257;
/// Relative eigenvalue gap below which `P1` counts as singular.
pub const SINGULAR_TOL: f64 = 1e-12;
/// `J` counts as invertible when its condition number stays below this.
pub const J_COND_LIMIT: f64 = 1e12;
/// Gate for `P0^D = 0`.
pub const P0D_ZERO_TOL: f64 = 1e-8;
/// Relative gap under which two eigenvalues of `P1 H` are treated as equal.
const CLUSTER_TOL: f64 = 1e-9;
/// Nodes used to predict eigenvectors inside degenerate eigenspaces.
const PREDICT_NODES: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SignatureData {
    /// Number of positive eigenvalues of `P1`.
    pub m: usize,
    pub q_plus: CMat,
    pub q_minus: CMat,
    pub p_plus: CMat,
    pub p_minus: CMat,
}

/// `Q± = ι± (±P1|E±)^{1/2} ι±*` from a Hermitian eigendecomposition of `P1`.
pub fn signature_projections(p1: &CMat) -> Result<SignatureData> {
    let n = p1.nrows();
    if p1.ncols() != n {
        return Err(Error::Dimension("P1 must be square".into()));
    }
    let scale = linalg::max_abs(p1);
    if scale == 0.0 {
        return Err(Error::SingularP1);
    }
    if linalg::max_abs_diff(p1, &p1.adjoint()) > 1e-10 * scale {
        return Err(Error::Parameter("P1 is not self-adjoint".into()));
    }

    let (values, vectors) = if linalg::is_diagonal(p1) {
        // exact construction for diagonal P1
        ((0..n).map(|i| p1[(i, i)].re).collect::<Vec<_>>(), linalg::eye(n))
    } else {
        linalg::hermitian_eigen(p1)
    };
    let top = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let smallest = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if smallest <= SINGULAR_TOL * top {
        return Err(Error::NumericallySingularP1(smallest));
    }

    let mut q_plus = CMat::zeros(n, n);
    let mut q_minus = CMat::zeros(n, n);
    let mut p_plus = CMat::zeros(n, n);
    let mut p_minus = CMat::zeros(n, n);
    for (k, &lambda) in values.iter().enumerate() {
        let v = vectors.column(k);
        let proj = &v * v.adjoint();
        if lambda > 0.0 {
            q_plus += &proj * real(lambda.sqrt());
            p_plus += proj;
        } else {
            q_minus += &proj * real((-lambda).sqrt());
            p_minus += proj;
        }
    }
    Ok(SignatureData {
        m: values.iter().filter(|&&v| v > 0.0).count(),
        q_plus,
        q_minus,
        p_plus,
        p_minus,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryDecomposition {
    pub j: CMat,
    pub l: CMat,
    pub k: Option<CMat>,
    pub m: Option<CMat>,
    pub exists_km: bool,
    /// 2-norm condition number of `J`.
    pub j_condition: f64,
}

impl BoundaryDecomposition {
    /// `(J Q+ − L Q− | J Q− − L Q+)`.
    pub fn reconstruct_from_jl(&self, sig: &SignatureData) -> CMat {
        let left = &self.j * &sig.q_plus - &self.l * &sig.q_minus;
        let right = &self.j * &sig.q_minus - &self.l * &sig.q_plus;
        linalg::hstack(&left, &right)
    }

    /// `K (Q+ − M Q− | Q− − M Q+)` when the decomposition exists.
    pub fn reconstruct_from_km(&self, sig: &SignatureData) -> Option<CMat> {
        let (k, m) = (self.k.as_ref()?, self.m.as_ref()?);
        let left = &sig.q_plus - m * &sig.q_minus;
        let right = &sig.q_minus - m * &sig.q_plus;
        Some(k * linalg::hstack(&left, &right))
    }

    pub fn k(&self) -> Result<&CMat> {
        self.k.as_ref().ok_or(Error::BoundaryCouplingSingular)
    }

    pub fn m(&self) -> Result<&CMat> {
        self.m.as_ref().ok_or(Error::BoundaryCouplingSingular)
    }
}

/// `J = WB[Q+; −Q−]P1⁻¹`, `L = WB[Q−; −Q+]P1⁻¹`, and `K = J`, `M = J⁻¹L` when `J` is invertible.
pub fn decompose_boundary(wb: &CMat, sig: &SignatureData, p1: &CMat) -> Result<BoundaryDecomposition> {
    let n = p1.nrows();
    if wb.shape() != (n, 2 * n) || sig.q_plus.shape() != (n, n) {
        return Err(Error::Dimension(format!("WB must be {n}x{}", 2 * n)));
    }
    let p1_inv = linalg::inverse(p1).map_err(|_| Error::SingularP1)?;
    let (w1, w2) = linalg::split_halves(wb);
    let j = (&w1 * &sig.q_plus - &w2 * &sig.q_minus) * &p1_inv;
    let l = (&w1 * &sig.q_minus - &w2 * &sig.q_plus) * &p1_inv;
    let j_condition = linalg::cond(&j);
    let m = if j_condition <= J_COND_LIMIT { linalg::solve(&j, &l).ok() } else { None };
    let exists_km = m.is_some();
    Ok(BoundaryDecomposition { k: exists_km.then(|| j.clone()), j, l, m, exists_km, j_condition })
}

/// Pointwise characteristic form `P1 H = S⁻¹ P1^D H^D S` on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalForm {
    pub n: usize,
    pub m: usize,
    pub a: f64,
    pub b: f64,
    pub field: Field,
    pub s: SpatialMatrixFunction,
    pub s_inv: SpatialMatrixFunction,
    pub hd: SpatialMatrixFunction,
    pub p0d: SpatialMatrixFunction,
    /// `diag(I_m, −I_{n−m})`.
    pub p1d: CMat,
    pub wbd: CMat,
    pub wcd: CMat,
    /// Travel times `∫ (H^D_jj)⁻¹`.
    pub tau: Vec<f64>,
    pub p0d_is_zero: bool,
    /// Largest grid value of `‖P0^D‖₂`.
    pub p0d_residual: f64,
    /// Largest relative residual of `P1 H = S⁻¹ P1^D H^D S` over the grid.
    pub relation_residual: f64,
}

impl DiagonalForm {
    /// The diagonal coordinates as a system in their own right.
    pub fn to_system(&self) -> HyperbolicSystem {
        HyperbolicSystem {
            n: self.n,
            a: self.a,
            b: self.b,
            p1: self.p1d.clone(),
            p0: self.p0d.clone(),
            h: self.hd.clone(),
            wb: self.wbd.clone(),
            wc: self.wcd.clone(),
            field: if linalg::is_real(&self.wbd) && linalg::is_real(&self.wcd) {
                self.field
            } else {
                Field::Complex
            },
        }
    }

    pub fn signature(&self) -> SignatureData {
        signature_projections(&self.p1d).expect("P1^D is a signature matrix")
    }

    /// `(K, M)` decomposition of `WB^D`.
    pub fn decompose(&self) -> Result<BoundaryDecomposition> {
        decompose_boundary(&self.wbd, &self.signature(), &self.p1d)
    }

    pub fn require_p0d_zero(&self) -> Result<()> {
        if self.p0d_is_zero {
            Ok(())
        } else {
            Err(Error::P0DNonzero(self.p0d_residual))
        }
    }
}

/// `WB^D [P+^D; P−^D]`, whose invertibility is the diagonal semigroup criterion.
pub fn semigroup_rank_matrix(d: &DiagonalForm) -> CMat {
    let sig = d.signature();
    let (w1, w2) = linalg::split_halves(&d.wbd);
    &w1 * &sig.p_plus + &w2 * &sig.p_minus
}

/// Eigenpairs of `P1 H(ξ)` at one node, via the Hermitian matrix `H^{1/2} P1 H^{1/2}`.
struct NodeEigen {
    values: Vec<f64>,
    /// Orthonormal eigenvectors of the Hermitian matrix, columns sorted with `values`.
    vectors: CMat,
    h_inv_sqrt: CMat,
}

fn node_eigen(p1: &CMat, h: &CMat, xi: f64) -> Result<NodeEigen> {
    let (lo, _) = linalg::hermitian_extremes(h);
    if lo <= 0.0 {
        return Err(Error::HamiltonianNotPositive(xi));
    }
    let (h_sqrt, h_inv_sqrt) = linalg::hpd_sqrt(h)?;
    let c = &h_sqrt * p1 * &h_sqrt;
    let (vals, vecs) = linalg::hermitian_eigen(&c);
    let n = vals.len();
    // descending
    let values: Vec<f64> = vals.iter().rev().copied().collect();
    let vectors = CMat::from_fn(n, n, |i, k| vecs[(i, n - 1 - k)]);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if values.iter().any(|v| v.abs() <= SINGULAR_TOL * scale) {
        return Err(Error::NotUniformlyHyperbolic(format!("zero characteristic speed at xi = {xi}")));
    }
    Ok(NodeEigen { values, vectors, h_inv_sqrt })
}

/// Contiguous runs of near-equal values in a descending list.
fn clusters(values: &[f64]) -> Vec<Vec<usize>> {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match out.last_mut() {
            Some(run) if (values[run[0]] - v).abs() <= CLUSTER_TOL * scale => run.push(i),
            _ => out.push(vec![i]),
        }
    }
    out
}

fn columns(a: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(a.nrows(), idx.len(), |i, k| a[(i, idx[k])])
}

/// Unitary polar factor `U V*` of `A = U Σ V*`.
fn polar(a: &CMat) -> CMat {
    let svd = a.clone().svd(true, true);
    svd.u.unwrap() * svd.v_t.unwrap()
}

/// Tracked eigen-branches: `vectors[node]` column `b` belongs to branch `b`.
struct Branches {
    values: Vec<Vec<f64>>,
    vectors: Vec<CMat>,
}

/// Predict branch vectors at `xs[target]` from already tracked nodes.
fn predict(xs: &[f64], tracked: &[(usize, &CMat)], target: usize, count: usize) -> CMat {
    let used = &tracked[tracked.len().saturating_sub(count)..];
    let nodes: Vec<f64> = used.iter().map(|(k, _)| xs[*k]).collect();
    let w = grid::lagrange_weights(xs[target], &nodes);
    let mut out = CMat::zeros(used[0].1.nrows(), used[0].1.ncols());
    for ((_, v), wk) in used.iter().zip(w) {
        out += *v * real(wk);
    }
    out
}

/// Assign the eigenpairs of `cur` to branches continuing `prev_vectors`.
fn assign_node(
    cur: &NodeEigen,
    prev_vectors: &CMat,
    predicted: &CMat,
    xi: f64,
) -> Result<(Vec<f64>, CMat)> {
    let n = cur.values.len();
    let groups = clusters(&cur.values);
    // weight of branch b on cluster g: squared norm of its projection
    let mut owner: Vec<Vec<usize>> = vec![Vec::new(); groups.len()];
    for bi in 0..n {
        let v = prev_vectors.column(bi);
        let mut best = (0usize, -1.0f64);
        for (g, idx) in groups.iter().enumerate() {
            let w: f64 = idx.iter().map(|&j| cur.vectors.column(j).dotc(&v).norm_sqr()).sum();
            if w > best.1 {
                best = (g, w);
            }
        }
        if best.1 < 0.5 {
            return Err(Error::NotUniformlyHyperbolic(format!(
                "eigenvector branch lost near xi = {xi}"
            )));
        }
        owner[best.0].push(bi);
    }
    let mut values = vec![0.0; n];
    let mut vectors = CMat::zeros(n, n);
    for (g, idx) in groups.iter().enumerate() {
        let branches = &owner[g];
        if branches.len() != idx.len() {
            return Err(Error::NotUniformlyHyperbolic(format!(
                "eigenvalue branches cannot be matched near xi = {xi}"
            )));
        }
        let basis = columns(&cur.vectors, idx);
        let aligned = if idx.len() == 1 {
            let z = basis.column(0).dotc(&prev_vectors.column(branches[0]));
            if z.norm() > 0.0 {
                &basis * (z / z.norm())
            } else {
                basis
            }
        } else {
            &basis * polar(&(basis.adjoint() * columns(predicted, branches)))
        };
        let mean = idx.iter().map(|&j| cur.values[j]).sum::<f64>() / idx.len() as f64;
        for (k, &bi) in branches.iter().enumerate() {
            vectors.set_column(bi, &aligned.column(k));
            values[bi] = if idx.len() == 1 { cur.values[idx[0]] } else { mean };
        }
    }
    Ok((values, vectors))
}

fn track_branches(xs: &[f64], eig: &[NodeEigen]) -> Result<Branches> {
    let len = eig.len();
    let anchor = (0..len).find(|&k| clusters(&eig[k].values).iter().all(|g| g.len() == 1)).unwrap_or(0);
    let mut values: Vec<Option<Vec<f64>>> = vec![None; len];
    let mut vectors: Vec<Option<CMat>> = vec![None; len];
    values[anchor] = Some(eig[anchor].values.clone());
    vectors[anchor] = Some(eig[anchor].vectors.clone());

    let forward: Vec<usize> = (anchor + 1..len).collect();
    let backward: Vec<usize> = (0..anchor).rev().collect();
    // the backward pass predicts from the forward nodes nearest the anchor
    let seed_back: Vec<usize> = (anchor..len.min(anchor + PREDICT_NODES)).rev().collect();
    for (order, seed) in [(forward, vec![anchor]), (backward, seed_back)] {
        let mut trail = seed;
        for &k in &order {
            let prev = *trail.last().unwrap();
            let tracked: Vec<(usize, &CMat)> =
                trail.iter().map(|&t| (t, vectors[t].as_ref().unwrap())).collect();
            let predicted = predict(xs, &tracked, k, PREDICT_NODES);
            let (vals, vecs) = assign_node(&eig[k], vectors[prev].as_ref().unwrap(), &predicted, xs[k])?;
            values[k] = Some(vals);
            vectors[k] = Some(vecs);
            trail.push(k);
        }
    }
    let values: Vec<Vec<f64>> = values.into_iter().map(Option::unwrap).collect();
    check_no_crossings(xs, &values)?;
    Ok(Branches { values, vectors: vectors.into_iter().map(Option::unwrap).collect() })
}

/// Reject sign changes of a branch and strict order flips between branches.
fn check_no_crossings(xs: &[f64], values: &[Vec<f64>]) -> Result<()> {
    let n = values[0].len();
    for bi in 0..n {
        let sign = values[0][bi].signum();
        if let Some(k) = values.iter().position(|v| v[bi].signum() != sign) {
            return Err(Error::NotUniformlyHyperbolic(format!(
                "characteristic speed changes sign near xi = {}",
                xs[k]
            )));
        }
    }
    for bi in 0..n {
        for bj in bi + 1..n {
            let mut seen = 0.0f64;
            for (k, v) in values.iter().enumerate() {
                let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                let d = v[bi] - v[bj];
                if d.abs() <= CLUSTER_TOL * scale {
                    continue;
                }
                if seen != 0.0 && d.signum() != seen {
                    return Err(Error::NotUniformlyHyperbolic(format!(
                        "eigenvalue crossing near xi = {}",
                        xs[k]
                    )));
                }
                seen = d.signum();
            }
        }
    }
    Ok(())
}

fn dominant_index(v: &[C64]) -> usize {
    let mut best = 0;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    best
}

/// Unit-norm columns of `H^{-1/2} V`.
fn eigenvector_matrix(h_inv_sqrt: &CMat, v: &CMat) -> CMat {
    let mut x = h_inv_sqrt * v;
    for mut col in x.column_iter_mut() {
        let nrm = col.norm();
        col /= real(nrm);
    }
    x
}

/// Pointwise diagonalization of `P1 H` on a uniform grid of `grid_size` points
/// (a single point when `H` is constant).
pub fn diagonalize(sys: &HyperbolicSystem, grid_size: usize) -> Result<DiagonalForm> {
    sys.check_structure()?;
    if grid_size < 2 {
        return Err(Error::Parameter("grid_size must be at least 2".into()));
    }
    let n = sys.n;
    let constant_h = sys.h.is_constant();
    let xs = if constant_h { vec![sys.a] } else { grid::uniform(sys.a, sys.b, grid_size) };

    let eig: Vec<NodeEigen> = xs
        .par_iter()
        .map(|&xi| node_eigen(&sys.p1, &sys.h.eval_unchecked(xi), xi))
        .collect::<Result<_>>()?;
    let branches = track_branches(&xs, &eig)?;

    // final branch order at ξ = a: positive first, descending, ties by dominant component
    let x0 = eigenvector_matrix(&eig[0].h_inv_sqrt, &branches.vectors[0]);
    let v0 = &branches.values[0];
    let scale0 = v0.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let dom: Vec<usize> = (0..n)
        .map(|bi| dominant_index(&x0.column(bi).iter().copied().collect::<Vec<_>>()))
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (vi, vj) = (v0[i], v0[j]);
        if (vi > 0.0) != (vj > 0.0) {
            return vj.total_cmp(&vi);
        }
        if (vi - vj).abs() <= CLUSTER_TOL * scale0 {
            return dom[i].cmp(&dom[j]);
        }
        vj.total_cmp(&vi)
    });
    let m = order.iter().filter(|&&bi| v0[bi] > 0.0).count();

    // S⁻¹ columns: unit norm, diagonal entry real positive at ξ = a
    let s_inv_nodes: Vec<CMat> = eig
        .iter()
        .zip(&branches.vectors)
        .map(|(e, v)| columns(&eigenvector_matrix(&e.h_inv_sqrt, v), &order))
        .collect();
    let mut phases = Vec::with_capacity(n);
    for j in 0..n {
        let col = s_inv_nodes[0].column(j);
        let pivot = if col[j].norm() > 1e-12 {
            col[j]
        } else {
            *col.iter().find(|z| z.norm() > 1e-12).unwrap()
        };
        phases.push(pivot.conj() / pivot.norm());
    }
    let phase = linalg::diag(&phases);
    let s_inv_nodes: Vec<CMat> = s_inv_nodes.into_iter().map(|x| x * &phase).collect();
    let s_nodes: Vec<CMat> = s_inv_nodes.iter().map(linalg::inverse).collect::<Result<_>>()?;
    let hd_nodes: Vec<CMat> = branches
        .values
        .iter()
        .map(|v| linalg::diag(&order.iter().map(|&bi| real(v[bi].abs())).collect::<Vec<_>>()))
        .collect();

    let signs: Vec<C64> = (0..n).map(|j| real(if j < m { 1.0 } else { -1.0 })).collect();
    let p1d = linalg::diag(&signs);
    let p1_inv = linalg::inverse(&sys.p1).map_err(|_| Error::SingularP1)?;

    let mut relation_residual: f64 = 0.0;
    for (k, &xi) in xs.iter().enumerate() {
        let lhs = &sys.p1 * sys.h.eval_unchecked(xi);
        let rhs = &s_inv_nodes[k] * &p1d * &hd_nodes[k] * &s_nodes[k];
        let scale = linalg::norm_2(&lhs).max(1.0);
        relation_residual = relation_residual.max(linalg::norm_2(&(lhs - rhs)) / scale);
    }

    let (s, s_inv, hd, p0d, tau) = if constant_h {
        let s = s_nodes[0].clone();
        let s_inv = s_inv_nodes[0].clone();
        let right = &p1_inv * &s_inv * &p1d;
        let p0d = match &sys.p0 {
            SpatialMatrixFunction::Constant(p0) => SpatialMatrixFunction::Constant(&s * p0 * &right),
            SpatialMatrixFunction::Grid { xs: px, values } => SpatialMatrixFunction::Grid {
                xs: px.clone(),
                values: values.iter().map(|p0| &s * p0 * &right).collect(),
            },
        };
        let tau: Vec<f64> = (0..n).map(|j| (sys.b - sys.a) / hd_nodes[0][(j, j)].re).collect();
        (
            SpatialMatrixFunction::Constant(s),
            SpatialMatrixFunction::Constant(s_inv),
            SpatialMatrixFunction::Constant(hd_nodes[0].clone()),
            p0d,
            tau,
        )
    } else {
        let ds_inv = grid::derivative(&xs, &s_inv_nodes);
        let p0d_nodes: Vec<CMat> = xs
            .iter()
            .enumerate()
            .map(|(k, &xi)| {
                let inner = &ds_inv[k] + sys.p0.eval_unchecked(xi) * &p1_inv * &s_inv_nodes[k];
                &s_nodes[k] * inner * &p1d
            })
            .collect();
        let tau: Vec<f64> = (0..n)
            .map(|j| {
                let f: Vec<f64> = hd_nodes.iter().map(|h| 1.0 / h[(j, j)].re).collect();
                grid::integrate_uniform(&xs, &f)
            })
            .collect();
        let grid_fn = |v: Vec<CMat>| SpatialMatrixFunction::Grid { xs: xs.clone(), values: v };
        (grid_fn(s_nodes.clone()), grid_fn(s_inv_nodes.clone()), grid_fn(hd_nodes), grid_fn(p0d_nodes), tau)
    };

    if let Some(&t) = tau.iter().find(|t| !(**t > 0.0)) {
        return Err(Error::NonpositiveDelay(t));
    }

    let p0d_residual = match &p0d {
        SpatialMatrixFunction::Constant(v) => linalg::norm_2(v),
        SpatialMatrixFunction::Grid { values, .. } => {
            values.iter().map(linalg::norm_2).fold(0.0, f64::max)
        }
    };

    let s_inv_b = s_inv.eval_unchecked(sys.b);
    let s_inv_a = s_inv.eval_unchecked(sys.a);
    let transform = linalg::block_diag(&(&p1_inv * &s_inv_b * &p1d), &(&p1_inv * &s_inv_a * &p1d));
    let wbd = &sys.wb * &transform;
    let wcd = &sys.wc * &transform;

    Ok(DiagonalForm {
        n,
        m,
        a: sys.a,
        b: sys.b,
        field: sys.field,
        s,
        s_inv,
        hd,
        p0d,
        p1d,
        wbd,
        wcd,
        tau,
        p0d_is_zero: p0d_residual <= P0D_ZERO_TOL,
        p0d_residual,
        relation_residual,
    })
}

/// `Q+` and `Q−` for a signature matrix `diag(I_m, −I_{n−m})`.
pub fn diagonal_signature(n: usize, m: usize) -> SignatureData {
    let d = |f: &dyn Fn(usize) -> bool| {
        linalg::diag(&(0..n).map(|i| real(if f(i) { 1.0 } else { 0.0 })).collect::<Vec<_>>())
    };
    let plus = d(&|i| i < m);
    let minus = d(&|i| i >= m);
    SignatureData { m, q_plus: plus.clone(), q_minus: minus.clone(), p_plus: plus, p_minus: minus }
}
