//! Potentials of closed 1-forms on a chart grid.
//!
//! Edge increments use the trapezoid rule with the Euler–Maclaurin end
//! correction, and the grid-graph least-squares problem is solved exactly in
//! the cosine basis that diagonalizes the Neumann Laplacian.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::grid::{diff, interpolate, Axis, ChartGrid};

fn dct_basis(n: usize) -> (DMatrix<f64>, Vec<f64>) {
    let c = DMatrix::from_fn(n, n, |i, k| {
        let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
        s * (std::f64::consts::PI * k as f64 * (i as f64 + 0.5) / n as f64).cos()
    });
    let lambda = (0..n).map(|k| 2.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos()).collect();
    (c, lambda)
}

/// Solve `L φ = b` for the Neumann grid Laplacian, returning the zero-mean solution.
fn poisson(grid: &ChartGrid, b: &[f64], basis: &(DMatrix<f64>, Vec<f64>)) -> Vec<f64> {
    let n = grid.n;
    let (c, lambda) = basis;
    // rows are y, columns are x
    let bm = DMatrix::from_row_slice(n, n, b);
    let mut t = c.transpose() * bm * c;
    for j in 0..n {
        for i in 0..n {
            let d = lambda[i] + lambda[j];
            t[(j, i)] = if d == 0.0 { 0.0 } else { t[(j, i)] / d };
        }
    }
    let phi = c * t * c.transpose();
    let mut out = vec![0.0; n * n];
    for j in 0..n {
        for i in 0..n {
            out[grid.index(i, j)] = phi[(j, i)];
        }
    }
    out
}

/// Least-squares potential `φ` with `dφ ≈ ω` for a strided real form.
///
/// `wx`, `wy` hold the chart components with `stride` reals per sample. The
/// result has zero mean in every component.
pub fn potential(grid: &ChartGrid, wx: &[f64], wy: &[f64], stride: usize) -> Vec<f64> {
    let n = grid.n;
    let h = grid.h();
    let dwx = diff(grid, wx, stride, Axis::X);
    let dwy = diff(grid, wy, stride, Axis::Y);
    let d3 = |v: &[f64], axis| diff(grid, &diff(grid, v, stride, axis), stride, axis);
    let (d3x, d3y) = (d3(&dwx, Axis::X), d3(&dwy, Axis::Y));
    let basis = dct_basis(n);
    let comps: Vec<Vec<f64>> = (0..stride)
        .into_par_iter()
        .map(|c| {
            let mut b = vec![0.0; n * n];
            let at = |v: &[f64], i: usize, j: usize| v[grid.index(i, j) * stride + c];
            for j in 0..n {
                for i in 0..n {
                    if i + 1 < n {
                        let d = 0.5 * h * (at(wx, i, j) + at(wx, i + 1, j))
                            + h * h / 12.0 * (at(&dwx, i, j) - at(&dwx, i + 1, j))
                            - h.powi(4) / 720.0 * (at(&d3x, i, j) - at(&d3x, i + 1, j));
                        b[j * n + i + 1] += d;
                        b[j * n + i] -= d;
                    }
                    if j + 1 < n {
                        let d = 0.5 * h * (at(wy, i, j) + at(wy, i, j + 1))
                            + h * h / 12.0 * (at(&dwy, i, j) - at(&dwy, i, j + 1))
                            - h.powi(4) / 720.0 * (at(&d3y, i, j) - at(&d3y, i, j + 1));
                        b[(j + 1) * n + i] += d;
                        b[j * n + i] -= d;
                    }
                }
            }
            poisson(grid, &b, &basis)
        })
        .collect();
    let mut out = vec![0.0; n * n * stride];
    for (c, phi) in comps.iter().enumerate() {
        for (k, v) in phi.iter().enumerate() {
            out[k * stride + c] = *v;
        }
    }
    out
}

/// `max |∂_x ω_y − ∂_y ω_x|` over samples with `|z| ≤ 1`, relative to `max |ω|`.
pub fn closedness(grid: &ChartGrid, wx: &[f64], wy: &[f64], stride: usize) -> f64 {
    let curl_a = diff(grid, wy, stride, Axis::X);
    let curl_b = diff(grid, wx, stride, Axis::Y);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for k in 0..grid.len() {
        if grid.local(k).norm() > 1.0 {
            continue;
        }
        let r = k * stride..(k + 1) * stride;
        let c: f64 = curl_a[r.clone()].iter().zip(&curl_b[r.clone()]).map(|(a, b)| (a - b).powi(2)).sum();
        let w: f64 = wx[r.clone()].iter().chain(&wy[r]).map(|a| a * a).sum();
        num = num.max(c.sqrt());
        den = den.max(w.sqrt());
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `max |dφ − ω|` over samples with `|z| ≤ 1`, relative to `max |ω|`.
pub fn integration_residual(grid: &ChartGrid, phi: &[f64], wx: &[f64], wy: &[f64], stride: usize) -> f64 {
    let px = diff(grid, phi, stride, Axis::X);
    let py = diff(grid, phi, stride, Axis::Y);
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for k in 0..grid.len() {
        if grid.local(k).norm() > 1.0 {
            continue;
        }
        let r = k * stride..(k + 1) * stride;
        let e: f64 = px[r.clone()]
            .iter()
            .zip(&wx[r.clone()])
            .chain(py[r.clone()].iter().zip(&wy[r.clone()]))
            .map(|(a, b)| (a - b).powi(2))
            .sum();
        let w: f64 = wx[r.clone()].iter().chain(&wy[r]).map(|a| a * a).sum();
        num = num.max(e.sqrt());
        den = den.max(w.sqrt());
    }
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// `|∮ ω|` around `|z| = radius` relative to `∮ |ω|`.
pub fn loop_integral(grid: &ChartGrid, wx: &[f64], wy: &[f64], stride: usize, radius: f64) -> f64 {
    const M: usize = 512;
    let mut total = vec![0.0; stride];
    let mut mass = 0.0;
    for t in 0..M {
        let th = 2.0 * std::f64::consts::PI * t as f64 / M as f64;
        let z = Complex64::from_polar(radius, th);
        let (dx, dy) = (-radius * th.sin(), radius * th.cos());
        let a = interpolate(grid, wx, stride, z);
        let b = interpolate(grid, wy, stride, z);
        let dt = 2.0 * std::f64::consts::PI / M as f64;
        let mut local = 0.0;
        for c in 0..stride {
            let v = (a[c] * dx + b[c] * dy) * dt;
            total[c] += v;
            local += v * v;
        }
        mass += local.sqrt();
    }
    let norm = total.iter().map(|v| v * v).sum::<f64>().sqrt();
    if mass == 0.0 {
        0.0
    } else {
        norm / mass
    }
}
