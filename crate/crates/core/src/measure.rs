//! Matrix-valued measures that are finite sums of Dirac atoms placed at
//! nonnegative integer combinations of base delays.
//!
//! Atom positions are stored as exact multi-indices `c`, the numeric location
//! being `c · τ`. Convolution adds multi-indices, so powers never lose atoms to
//! rounding; numeric merging of coincident locations happens only when a total
//! variation is requested.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, RMat, C64};
use crate::spectral::DiagonalForm;

/// Default relative tolerance for merging atoms at equal numeric locations.
pub const DEFAULT_MERGE_TOL: f64 = 1e-9;
/// Relative tolerance under which two delays share one base index.
pub const DELAY_DEDUP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    n: usize,
    base_delays: Vec<f64>,
    atoms: BTreeMap<Vec<u32>, CMat>,
}

impl AtomicMeasure {
    pub fn zero(n: usize, base_delays: Vec<f64>) -> Result<Self> {
        if let Some(&t) = base_delays.iter().find(|t| !(**t > 0.0 && t.is_finite())) {
            return Err(Error::NonpositiveDelay(t));
        }
        Ok(AtomicMeasure { n, base_delays, atoms: BTreeMap::new() })
    }

    /// `δ₀ · I` over the given base.
    pub fn identity(n: usize, base_delays: Vec<f64>) -> Result<Self> {
        let d = base_delays.len();
        let mut out = Self::zero(n, base_delays)?;
        out.add_atom(vec![0; d], linalg::eye(n))?;
        Ok(out)
    }

    /// `δ₀ · I` with no base delays; combines with measures over any base.
    pub fn scalar_identity(n: usize) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(Vec::new(), linalg::eye(n));
        AtomicMeasure { n, base_delays: Vec::new(), atoms }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_delays(&self) -> &[f64] {
        &self.base_delays
    }

    pub fn atoms(&self) -> &BTreeMap<Vec<u32>, CMat> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn location(&self, index: &[u32]) -> f64 {
        index.iter().zip(&self.base_delays).map(|(&c, &t)| c as f64 * t).sum()
    }

    /// Add `weight` at multi-index `index`, dropping the atom if it cancels exactly.
    pub fn add_atom(&mut self, index: Vec<u32>, weight: CMat) -> Result<()> {
        if index.len() != self.base_delays.len() {
            return Err(Error::Dimension(format!(
                "multi-index of length {} for {} base delays",
                index.len(),
                self.base_delays.len()
            )));
        }
        if weight.shape() != (self.n, self.n) {
            return Err(Error::Dimension("atom weight has wrong shape".into()));
        }
        let slot = self.atoms.entry(index).or_insert_with(|| CMat::zeros(self.n, self.n));
        *slot += weight;
        self.prune();
        Ok(())
    }

    fn prune(&mut self) {
        self.atoms.retain(|_, w| w.iter().any(|z| *z != C64::new(0.0, 0.0)));
    }

    fn is_scalar(&self) -> bool {
        self.base_delays.is_empty()
    }

    /// The same measure re-expressed over `base` (only from the empty base).
    fn lifted(&self, base: &[f64]) -> AtomicMeasure {
        let atoms = self.atoms.values().map(|w| (vec![0; base.len()], w.clone())).collect();
        AtomicMeasure { n: self.n, base_delays: base.to_vec(), atoms }
    }

    fn aligned<'a>(a: &'a AtomicMeasure, b: &'a AtomicMeasure) -> Result<(AtomicMeasure, AtomicMeasure)> {
        if a.n != b.n {
            return Err(Error::Dimension(format!("measures of size {} and {}", a.n, b.n)));
        }
        if a.base_delays == b.base_delays {
            Ok((a.clone(), b.clone()))
        } else if a.is_scalar() {
            Ok((a.lifted(&b.base_delays), b.clone()))
        } else if b.is_scalar() {
            Ok((a.clone(), b.lifted(&a.base_delays)))
        } else {
            Err(Error::IncompatibleBases)
        }
    }

    pub fn add(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        let (mut out, rhs) = Self::aligned(self, other)?;
        for (k, w) in rhs.atoms {
            *out.atoms.entry(k).or_insert_with(|| CMat::zeros(self.n, self.n)) += w;
        }
        out.prune();
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> AtomicMeasure {
        let mut out = self.clone();
        for w in out.atoms.values_mut() {
            *w *= c;
        }
        out.prune();
        out
    }

    /// Multiply every weight by `c` on the given side.
    pub fn scale_matrix(&self, c: &CMat, side: Side) -> Result<AtomicMeasure> {
        if c.shape() != (self.n, self.n) {
            return Err(Error::Dimension("scaling matrix has wrong shape".into()));
        }
        let mut out = self.clone();
        for w in out.atoms.values_mut() {
            *w = match side {
                Side::Left => c * &*w,
                Side::Right => &*w * c,
            };
        }
        out.prune();
        Ok(out)
    }

    /// Convolution: atoms at `c₁ + c₂` with weights `W₁ W₂`.
    pub fn convolve(&self, other: &AtomicMeasure) -> Result<AtomicMeasure> {
        let (a, b) = Self::aligned(self, other)?;
        let mut out = AtomicMeasure { n: a.n, base_delays: a.base_delays.clone(), atoms: BTreeMap::new() };
        for (ka, wa) in &a.atoms {
            for (kb, wb) in &b.atoms {
                let key: Vec<u32> = ka.iter().zip(kb).map(|(x, y)| x + y).collect();
                *out.atoms.entry(key).or_insert_with(|| CMat::zeros(a.n, a.n)) += wa * wb;
            }
        }
        out.prune();
        Ok(out)
    }

    /// k-fold convolution power; `power(0)` is `δ₀ · I`.
    pub fn power(&self, k: u32) -> AtomicMeasure {
        let mut acc = AtomicMeasure::identity(self.n, self.base_delays.clone()).expect("valid base");
        for _ in 0..k {
            acc = acc.convolve(self).expect("same base");
        }
        acc
    }

    /// `Σ W_c e^{−s (c·τ)}`.
    pub fn laplace_eval(&self, s: C64) -> CMat {
        let mut out = CMat::zeros(self.n, self.n);
        for (k, w) in &self.atoms {
            out += w * (-s * self.location(k)).exp();
        }
        out
    }

    /// Atoms merged by numeric location (relative tolerance), sorted by location.
    pub fn merged_atoms(&self, merge_tol: f64) -> Vec<(f64, CMat)> {
        let mut located: Vec<(f64, &CMat)> = self.atoms.iter().map(|(k, w)| (self.location(k), w)).collect();
        located.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut out: Vec<(f64, CMat)> = Vec::new();
        for (loc, w) in located {
            match out.last_mut() {
                Some((start, acc)) if loc - *start <= merge_tol * loc.abs().max(1.0) => *acc += w,
                _ => out.push((loc, w.clone())),
            }
        }
        out
    }

    /// Entrywise total variation after merging coincident locations.
    pub fn total_variation(&self, merge_tol: f64) -> RMat {
        let mut tv = RMat::zeros(self.n, self.n);
        for (_, w) in self.merged_atoms(merge_tol) {
            tv += linalg::abs(&w);
        }
        tv
    }

    /// Entrywise total variation over stored atoms, without merging.
    pub fn total_variation_unmerged(&self) -> RMat {
        let mut tv = RMat::zeros(self.n, self.n);
        for w in self.atoms.values() {
            tv += linalg::abs(w);
        }
        tv
    }

    /// `(measure ∗ u)(t) = Σ W_c u(t − c·τ)` with `u = 0` on negative times.
    pub fn apply<F>(&self, t: f64, u: F, slack: f64) -> Vec<C64>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let mut y = vec![C64::new(0.0, 0.0); self.n];
        for (k, w) in &self.atoms {
            let arg = t - self.location(k);
            if arg < -slack {
                continue;
            }
            let val = u(arg.max(0.0));
            for (i, yi) in y.iter_mut().enumerate() {
                for (j, uj) in val.iter().enumerate() {
                    *yi += w[(i, j)] * real(*uj);
                }
            }
        }
        y
    }
}

/// Max row sum of a nonnegative matrix.
pub fn max_row_sum(a: &RMat) -> f64 {
    linalg::row_sums(a).into_iter().fold(0.0, f64::max)
}

/// Deduplicated base delays and, for each channel, its base index.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayBasis {
    pub base: Vec<f64>,
    pub channel_index: Vec<usize>,
}

impl DelayBasis {
    pub fn new(tau: &[f64]) -> Result<Self> {
        let mut base: Vec<f64> = Vec::new();
        let mut channel_index = Vec::with_capacity(tau.len());
        for &t in tau {
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::NonpositiveDelay(t));
            }
            match base.iter().position(|&b| (b - t).abs() <= DELAY_DEDUP_TOL * b.max(t)) {
                Some(i) => channel_index.push(i),
                None => {
                    channel_index.push(base.len());
                    base.push(t);
                }
            }
        }
        Ok(DelayBasis { base, channel_index })
    }

    pub fn unit(&self, channel: usize) -> Vec<u32> {
        let mut c = vec![0; self.base.len()];
        c[self.channel_index[channel]] = 1;
        c
    }

    pub fn origin(&self) -> Vec<u32> {
        vec![0; self.base.len()]
    }
}

/// Measure whose Laplace transform is `M U(s)`: column `j` of `M` sits at `e_j`.
pub fn mu_measure(m: &CMat, diag: &DiagonalForm) -> Result<AtomicMeasure> {
    diag.require_p0d_zero()?;
    mu_measure_from_delays(m, &diag.tau)
}

pub fn mu_measure_from_delays(m: &CMat, tau: &[f64]) -> Result<AtomicMeasure> {
    let n = m.nrows();
    if m.shape() != (n, tau.len()) {
        return Err(Error::Dimension("M must be n×n with n delays".into()));
    }
    let basis = DelayBasis::new(tau)?;
    let mut out = AtomicMeasure::zero(n, basis.base.clone())?;
    for j in 0..n {
        let mut w = CMat::zeros(n, n);
        w.set_column(j, &m.column(j));
        out.add_atom(basis.unit(j), w)?;
    }
    Ok(out)
}
