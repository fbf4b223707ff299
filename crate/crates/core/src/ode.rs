//! Adaptive Dormand–Prince 5(4) integration of linear matrix ODEs `Y' = A(x) Y`.

use crate::error::{Error, Result};
use crate::linalg::{real, CMat};

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_steps: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { abs: 1e-11, rel: 1e-11, max_steps: 1_000_000 }
    }
}

/// Integrate `Y' = coeff(x) Y` from `x0` to `x1` (either direction), starting at `y0`.
/// `breaks` lists points where `coeff` may be non-smooth; steps never cross them.
pub fn integrate<F>(coeff: F, y0: &CMat, x0: f64, x1: f64, breaks: &[f64], tol: Tolerance) -> Result<CMat>
where
    F: Fn(f64) -> CMat,
{
    let (lo, hi) = (x0.min(x1), x0.max(x1));
    let mut stops: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    stops.push(x1);
    if x1 < x0 {
        stops.sort_by(|a, b| b.total_cmp(a));
    } else {
        stops.sort_by(f64::total_cmp);
    }
    let mut y = y0.clone();
    let mut x = x0;
    let mut h_guess = (x1 - x0).abs() / 16.0;
    let mut steps = 0usize;
    for &stop in &stops {
        if stop == x {
            continue;
        }
        let (y_next, h_next) = segment(&coeff, y, x, stop, h_guess, tol, &mut steps)?;
        y = y_next;
        x = stop;
        h_guess = h_next;
    }
    Ok(y)
}

fn error_norm(y: &CMat, y_new: &CMat, err: &CMat, tol: Tolerance) -> f64 {
    let mut worst: f64 = 0.0;
    for ((a, b), e) in y.iter().zip(y_new.iter()).zip(err.iter()) {
        let scale = tol.abs + tol.rel * a.norm().max(b.norm());
        worst = worst.max(e.norm() / scale);
    }
    worst
}

fn segment<F>(
    coeff: &F,
    mut y: CMat,
    x0: f64,
    x1: f64,
    h_guess: f64,
    tol: Tolerance,
    steps: &mut usize,
) -> Result<(CMat, f64)>
where
    F: Fn(f64) -> CMat,
{
    let dir = (x1 - x0).signum();
    let span = (x1 - x0).abs();
    let mut x = x0;
    let mut h = h_guess.min(span).max(span * 1e-12);
    let mut k: Vec<CMat> = Vec::with_capacity(7);
    loop {
        let remaining = (x1 - x).abs();
        if remaining <= 1e-15 * span.max(1.0) {
            return Ok((y, h));
        }
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        *steps += 1;
        if *steps > tol.max_steps {
            return Err(Error::Numerical("ODE step limit exceeded".into()));
        }
        let hs = dir * step;
        k.clear();
        for stage in 0..7 {
            let mut arg = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[stage][j] != 0.0 {
                    arg += kj * real(hs * A[stage][j]);
                }
            }
            k.push(coeff(x + C[stage] * hs) * arg);
        }
        let mut y5 = y.clone();
        let mut err = CMat::zeros(y.nrows(), y.ncols());
        for stage in 0..7 {
            y5 += &k[stage] * real(hs * B5[stage]);
            err += &k[stage] * real(hs * (B5[stage] - B4[stage]));
        }
        let e = error_norm(&y, &y5, &err, tol);
        if !e.is_finite() {
            return Err(Error::Numerical("non-finite ODE state".into()));
        }
        let factor = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
        if e <= 1.0 {
            y = y5;
            x = if last { x1 } else { x + hs };
            if !last {
                h = step * factor;
            }
        } else {
            h = step * factor;
            if h < span * 1e-14 {
                return Err(Error::Numerical("ODE step size underflow".into()));
            }
        }
    }
}
