//! Method-of-characteristics simulator for diagonal systems with `P0^D = 0`.
//!
//! In diagonal coordinates `w = H^D x̃` is constant along characteristics, so
//! each channel is a delay line of length `τ_j`. Channels `j < m` enter at
//! `ξ = b` and leave at `ξ = a`; the others run the opposite way. At every
//! step the incoming boundary values solve `w_in = K⁻¹ u + M w_out`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::certify::ImpulseTruncation;
use crate::error::{Error, Result};
use crate::linalg::{self, real, CMat, C64};
use crate::spectral::{BoundaryDecomposition, DiagonalForm};

/// `amplitude · cos(2π · frequency · t + phase)` on one input channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SineTerm {
    pub channel: usize,
    pub amplitude: f64,
    pub frequency: f64,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Constant(Vec<f64>),
    /// Linear interpolation between samples, held constant outside the sample range.
    Sampled { times: Vec<f64>, values: Vec<Vec<f64>> },
    Sines(Vec<SineTerm>),
}

impl InputSignal {
    pub fn zero(n: usize) -> Self {
        InputSignal::Constant(vec![0.0; n])
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            InputSignal::Constant(v) => {
                if v.len() != n {
                    return Err(Error::Dimension(format!("constant input has {} channels, expected {n}", v.len())));
                }
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Parameter("input values must be finite".into()));
                }
            }
            InputSignal::Sampled { times, values } => {
                if times.is_empty() || times.len() != values.len() {
                    return Err(Error::Parameter("sampled input needs matching times and values".into()));
                }
                if times.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Parameter("sample times must be strictly increasing".into()));
                }
                if values.iter().any(|v| v.len() != n) {
                    return Err(Error::Dimension(format!("sampled input rows must have {n} channels")));
                }
                if values.iter().flatten().chain(times).any(|x| !x.is_finite()) {
                    return Err(Error::Parameter("input samples must be finite".into()));
                }
            }
            InputSignal::Sines(terms) => {
                for t in terms {
                    if t.channel >= n {
                        return Err(Error::Dimension(format!("sine term on channel {} of {n}", t.channel)));
                    }
                    if ![t.amplitude, t.frequency, t.phase].iter().all(|x| x.is_finite()) {
                        return Err(Error::Parameter("sine parameters must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, t: f64, n: usize) -> Vec<f64> {
        match self {
            InputSignal::Constant(v) => v.clone(),
            InputSignal::Sampled { times, values } => {
                let last = times.len() - 1;
                if t <= times[0] {
                    return values[0].clone();
                }
                if t >= times[last] {
                    return values[last].clone();
                }
                let k = times.partition_point(|&x| x <= t);
                let w = (t - times[k - 1]) / (times[k] - times[k - 1]);
                values[k - 1].iter().zip(&values[k]).map(|(a, b)| a * (1.0 - w) + b * w).collect()
            }
            InputSignal::Sines(terms) => {
                let mut u = vec![0.0; n];
                for s in terms {
                    u[s.channel] += s.amplitude * (std::f64::consts::TAU * s.frequency * t + s.phase).cos();
                }
                u
            }
        }
    }

    /// Pointwise linear combination `α·self + β·other`, sampled on `times`.
    pub fn combine(&self, alpha: f64, other: &InputSignal, beta: f64, times: &[f64], n: usize) -> InputSignal {
        let values = times
            .iter()
            .map(|&t| {
                let (x, y) = (self.eval(t, n), other.eval(t, n));
                x.iter().zip(&y).map(|(a, b)| alpha * a + beta * b).collect()
            })
            .collect();
        InputSignal::Sampled { times: times.to_vec(), values }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub dt: f64,
    pub times: Vec<f64>,
    pub y: Vec<Vec<C64>>,
    /// Running sup over time of `max_i |y_i|`.
    pub sup_y: Vec<f64>,
    /// For each channel, the Riemann invariant along its line from inflow to outflow.
    pub x_final: Vec<Vec<C64>>,
}

/// How a channel reads its delayed inflow on the time grid.
#[derive(Debug, Clone, Copy)]
struct Lag {
    whole: usize,
    frac: f64,
}

impl Lag {
    fn new(tau: f64, dt: f64) -> Self {
        let ratio = tau / dt;
        let nearest = ratio.round();
        if (ratio - nearest).abs() <= 1e-9 * ratio.max(1.0) {
            Lag { whole: nearest as usize, frac: 0.0 }
        } else {
            Lag { whole: ratio.floor() as usize, frac: ratio - ratio.floor() }
        }
    }

    /// Inflow value `τ` ago, given the history up to (excluding) step `i`.
    fn read(&self, history: &[C64], i: usize) -> C64 {
        let at = |k: usize| if k <= i { history.get(i - k).copied().unwrap_or_default() } else { C64::new(0.0, 0.0) };
        let zero = C64::new(0.0, 0.0);
        let first = if self.whole <= i { at(self.whole) } else { zero };
        if self.frac == 0.0 {
            first
        } else {
            let second = if self.whole < i { at(self.whole + 1) } else { zero };
            first * (1.0 - self.frac) + second * self.frac
        }
    }
}

/// Zero-state response to `u` on `[0, T]` with step `dt`.
pub fn simulate(diag: &DiagonalForm, dec: &BoundaryDecomposition, u: &InputSignal, t_end: f64, dt: f64) -> Result<Trace> {
    diag.require_p0d_zero()?;
    let n = diag.n;
    u.validate(n)?;
    if !(dt > 0.0 && dt.is_finite()) || !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Parameter("need dt > 0 and T >= 0".into()));
    }
    let tau_min = diag.tau.iter().copied().fold(f64::INFINITY, f64::min);
    if dt > tau_min * (1.0 + 1e-9) {
        return Err(Error::Parameter(format!("dt = {dt} exceeds the shortest delay {tau_min}")));
    }
    let k_inv = linalg::inverse(dec.k()?).map_err(|_| Error::BoundaryCouplingSingular)?;
    let m = dec.m()?.clone();
    let lags: Vec<Lag> = diag.tau.iter().map(|&t| Lag::new(t, dt)).collect();
    let steps = (t_end / dt + 1e-9).floor() as usize;
    let (wc1, wc2) = linalg::split_halves(&diag.wcd);

    let mut inflow: Vec<Vec<C64>> = vec![Vec::with_capacity(steps + 1); n];
    let mut times = Vec::with_capacity(steps + 1);
    let mut ys = Vec::with_capacity(steps + 1);
    let mut sup_y = Vec::with_capacity(steps + 1);
    let mut running: f64 = 0.0;
    let mut w_out = CMat::zeros(n, 1);
    for i in 0..=steps {
        let t = i as f64 * dt;
        for j in 0..n {
            w_out[j] = lags[j].read(&inflow[j], i);
        }
        let ut = CMat::from_iterator(n, 1, u.eval(t, n).into_iter().map(real));
        let w_in = &k_inv * ut + &m * &w_out;
        for j in 0..n {
            inflow[j].push(w_in[j]);
        }
        // w(b): incoming for j < m, outgoing otherwise; w(a) the reverse
        let w_b = CMat::from_fn(n, 1, |j, _| if j < diag.m { w_in[j] } else { w_out[j] });
        let w_a = CMat::from_fn(n, 1, |j, _| if j < diag.m { w_out[j] } else { w_in[j] });
        let y = &wc1 * w_b + &wc2 * w_a;
        let y: Vec<C64> = y.iter().copied().collect();
        running = running.max(y.iter().fold(0.0, |acc, z| acc.max(z.norm())));
        times.push(t);
        ys.push(y);
        sup_y.push(running);
    }

    let x_final = (0..n)
        .map(|j| {
            let len = (diag.tau[j] / dt).ceil() as usize;
            let hist = &inflow[j];
            (0..=len.min(hist.len() - 1)).map(|k| hist[hist.len() - 1 - k]).collect()
        })
        .collect();
    Ok(Trace { dt, times, y: ys, sup_y, x_final })
}

/// Largest observed output-to-input sup ratio and the input achieving it.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProbe {
    pub lower_bound: f64,
    pub descriptor: String,
}

fn sign_patterns(n: usize) -> Vec<Vec<f64>> {
    if n > 10 {
        return (0..n)
            .flat_map(|c| [1.0, -1.0].map(|s| (0..n).map(|j| if j == c { s } else { 0.0 }).collect()))
            .collect();
    }
    (0..1usize << n)
        .map(|mask| (0..n).map(|j| if mask >> j & 1 == 1 { -1.0 } else { 1.0 }).collect())
        .collect()
}

fn probe_family(diag: &DiagonalForm, t_end: f64, dt: f64, trials: usize, seed: u64) -> Vec<(String, InputSignal)> {
    let n = diag.n;
    let mut family: Vec<(String, InputSignal)> = Vec::new();
    for p in sign_patterns(n) {
        family.push((format!("constant {p:?}"), InputSignal::Constant(p)));
    }

    let mut periods: Vec<f64> = Vec::new();
    for &t in &diag.tau {
        if !periods.iter().any(|&p: &f64| (p - t).abs() <= 1e-12 * p.max(t)) {
            periods.push(t);
        }
    }
    let times: Vec<f64> = (0..=(t_end / dt + 1e-9).floor() as usize).map(|i| i as f64 * dt).collect();
    let switching = |t: f64, period: f64| (10.0 * (std::f64::consts::PI * t / period).sin()).tanh();
    for &period in &periods {
        for c in 0..n {
            for sign in [1.0, -1.0] {
                let values = times
                    .iter()
                    .map(|&t| (0..n).map(|j| if j == c { sign * switching(t, period) } else { 0.0 }).collect())
                    .collect();
                family.push((
                    format!("switching channel {c} period {period} sign {sign}"),
                    InputSignal::Sampled { times: times.clone(), values },
                ));
            }
        }
        if n <= 4 {
            for p in sign_patterns(n) {
                let values = times.iter().map(|&t| p.iter().map(|s| s * switching(t, period)).collect()).collect();
                family.push((
                    format!("switching all channels period {period} pattern {p:?}"),
                    InputSignal::Sampled { times: times.clone(), values },
                ));
            }
        }
    }

    let tau_min = diag.tau.iter().copied().fold(f64::INFINITY, f64::min);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let mut terms = Vec::new();
        for channel in 0..n {
            for _ in 0..3 {
                terms.push(SineTerm {
                    channel,
                    amplitude: rng.gen_range(-1.0..1.0),
                    frequency: rng.gen_range(0.05..1.5) / tau_min,
                    phase: rng.gen_range(0.0..std::f64::consts::TAU),
                });
            }
        }
        let signal = InputSignal::Sines(terms.clone());
        let peak = times.iter().map(|&t| sup_abs(&signal.eval(t, n))).fold(0.0, f64::max);
        if peak > 0.0 {
            for term in &mut terms {
                term.amplitude /= peak;
            }
        }
        family.push((format!("random smooth trial {trial} (seed {seed})"), InputSignal::Sines(terms)));
    }
    family
}

fn sup_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Empirical lower bound on the L∞ gain over a deterministic family of inputs.
pub fn linf_gain_probe(
    diag: &DiagonalForm,
    dec: &BoundaryDecomposition,
    t_end: f64,
    dt: f64,
    trials: usize,
    seed: u64,
) -> Result<GainProbe> {
    let n = diag.n;
    let family = probe_family(diag, t_end, dt, trials, seed);
    let ratios: Vec<Result<f64>> = family
        .par_iter()
        .map(|(_, u)| {
            let trace = simulate(diag, dec, u, t_end, dt)?;
            let u_sup = trace.times.iter().map(|&t| sup_abs(&u.eval(t, n))).fold(0.0, f64::max);
            let y_sup = trace.sup_y.last().copied().unwrap_or(0.0);
            Ok(if u_sup > 0.0 { y_sup / u_sup } else { 0.0 })
        })
        .collect();
    let mut best = GainProbe { lower_bound: 0.0, descriptor: "none".into() };
    for ((name, _), r) in family.iter().zip(ratios) {
        let r = r?;
        if r > best.lower_bound {
            best = GainProbe { lower_bound: r, descriptor: name.clone() };
        }
    }
    Ok(best)
}

/// `sup_t |y_sim(t) − (measure ∗ u)(t)|` over the part of `[0, T]` the truncation covers.
pub fn cross_check_impulse(
    diag: &DiagonalForm,
    dec: &BoundaryDecomposition,
    imp: &ImpulseTruncation,
    u: &InputSignal,
    t_end: f64,
    dt: f64,
) -> Result<f64> {
    imp.require_bound()?;
    let n = diag.n;
    let tau_min = diag.tau.iter().copied().fold(f64::INFINITY, f64::min);
    let coverage = imp.coverage();
    let horizon = t_end.min(coverage);
    if horizon < tau_min {
        return Err(Error::Parameter(format!("horizon {horizon} is shorter than one delay {tau_min}")));
    }
    let trace = simulate(diag, dec, u, horizon, dt)?;
    let mut worst: f64 = 0.0;
    for (t, y) in trace.times.iter().zip(&trace.y) {
        if *t >= coverage - 1e-9 * coverage {
            break;
        }
        let conv = imp.measure.apply(*t, |s| u.eval(s, n), 1e-9 * t.max(1.0));
        for (a, b) in y.iter().zip(&conv) {
            worst = worst.max((a - b).norm());
        }
    }
    Ok(worst)
}
