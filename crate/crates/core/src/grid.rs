//! Quadrature, finite-difference and extrapolation weights on 1-D grids.

use crate::linalg::{real, CMat};

/// Stencil width used for derivatives on the diagonalization grid.
pub const STENCIL: usize = 9;

pub fn uniform(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let last = count - 1;
    (0..count)
        .map(|i| if i == last { b } else { a + (b - a) * i as f64 / last as f64 })
        .collect()
}

/// Fornberg's weights for the first derivative at `x0` from values at `nodes`.
pub fn derivative_weights(x0: f64, nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len();
    // c[j][k]: weight of node j for derivative order k (k = 0, 1)
    let mut c = vec![[0.0f64; 2]; n];
    c[0][0] = 1.0;
    let mut c1 = 1.0;
    let mut c4 = nodes[0] - x0;
    for i in 1..n {
        let mn = i.min(1);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = nodes[i] - x0;
        for j in 0..i {
            let c3 = nodes[i] - nodes[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|w| w[1]).collect()
}

/// Start index of a `width`-point window centred on `i`, clamped to `[0, len)`.
fn window_start(i: usize, width: usize, len: usize) -> usize {
    let half = width / 2;
    i.saturating_sub(half).min(len - width)
}

/// Derivative of grid samples with a clamped high-order stencil.
pub fn derivative(xs: &[f64], values: &[CMat]) -> Vec<CMat> {
    let len = xs.len();
    let width = STENCIL.min(len);
    (0..len)
        .map(|i| {
            let start = window_start(i, width, len);
            let w = derivative_weights(xs[i], &xs[start..start + width]);
            let mut acc = CMat::zeros(values[i].nrows(), values[i].ncols());
            for (k, wk) in w.iter().enumerate() {
                acc += &values[start + k] * real(*wk);
            }
            acc
        })
        .collect()
}

/// Composite Simpson rule on a uniform grid; an odd interval count closes with
/// the 3/8 rule on the last three intervals.
pub fn integrate_uniform(xs: &[f64], f: &[f64]) -> f64 {
    let intervals = xs.len() - 1;
    let h = (xs[intervals] - xs[0]) / intervals as f64;
    let simpson = |lo: usize, hi: usize| -> f64 {
        let mut s = f[lo] + f[hi];
        for i in lo + 1..hi {
            s += if (i - lo) % 2 == 1 { 4.0 * f[i] } else { 2.0 * f[i] };
        }
        s * h / 3.0
    };
    let three_eighths = |lo: usize| 3.0 * h / 8.0 * (f[lo] + 3.0 * f[lo + 1] + 3.0 * f[lo + 2] + f[lo + 3]);
    match intervals {
        1 => 0.5 * h * (f[0] + f[1]),
        3 => three_eighths(0),
        k if k % 2 == 0 => simpson(0, k),
        k => simpson(0, k - 3) + three_eighths(k - 3),
    }
}

/// Lagrange weights for evaluating the interpolant through `nodes` at `x`.
pub fn lagrange_weights(x: f64, nodes: &[f64]) -> Vec<f64> {
    (0..nodes.len())
        .map(|j| {
            nodes
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != j)
                .map(|(_, &xk)| (x - xk) / (nodes[j] - xk))
                .product()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_weights_exact_on_polynomials() {
        let nodes = [0.0, 0.1, 0.25, 0.3, 0.5];
        let w = derivative_weights(0.1, &nodes);
        // d/dx x^3 at 0.1 is 0.03
        let d: f64 = w.iter().zip(nodes).map(|(wi, x)| wi * x * x * x).sum();
        assert!((d - 0.03).abs() < 1e-12);
        let d0: f64 = w.iter().sum();
        assert!(d0.abs() < 1e-10);
    }

    #[test]
    fn derivative_of_sine_is_accurate() {
        let xs = uniform(0.0, 1.0, 65);
        let vals: Vec<CMat> = xs.iter().map(|&x| CMat::from_element(1, 1, real(x.sin()))).collect();
        for (x, d) in xs.iter().zip(derivative(&xs, &vals)) {
            assert!((d[(0, 0)].re - x.cos()).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn simpson_and_three_eighths() {
        for count in [2usize, 4, 5, 8, 257, 258] {
            let xs = uniform(0.0, 1.0, count);
            let f: Vec<f64> = xs.iter().map(|x| x * x * x).collect();
            let exact = if count == 2 { 0.5 } else { 0.25 };
            assert!((integrate_uniform(&xs, &f) - exact).abs() < 1e-14, "count {count}");
        }
        let xs = uniform(0.0, 1.0, 257);
        let f: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x)).collect();
        assert!((integrate_uniform(&xs, &f) - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn lagrange_reproduces_cubic() {
        let nodes = [1.0, 2.0, 3.0, 4.0];
        let w = lagrange_weights(0.0, &nodes);
        let v: f64 = w.iter().zip(nodes).map(|(wi, x)| wi * (x * x * x - x)).sum();
        assert!(v.abs() < 1e-12);
    }
}
