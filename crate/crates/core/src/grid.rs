//! Two-chart sampling of the Riemann sphere.
//!
//! Chart A uses `z` and chart B uses `w = 1/z`; each samples the square
//! `[-(1+ε), 1+ε]²` on a uniform `N×N` grid. Every sphere point is owned by
//! exactly one chart (`|z| ≤ 1` or `|w| < 1`) and integrals use a smooth
//! partition of unity supported in the overlap annulus.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_OVERLAP: f64 = 0.1;
pub const DEFAULT_RESOLUTION: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Chart {
    A,
    B,
}

impl Chart {
    pub const BOTH: [Chart; 2] = [Chart::A, Chart::B];

    pub fn index(self) -> usize {
        match self {
            Chart::A => 0,
            Chart::B => 1,
        }
    }

    pub fn other(self) -> Chart {
        match self {
            Chart::A => Chart::B,
            Chart::B => Chart::A,
        }
    }
}

/// A point given in one of the two charts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub chart: Chart,
    pub re: f64,
    pub im: f64,
}

impl ChartPoint {
    pub fn a(z: Complex64) -> Self {
        ChartPoint { chart: Chart::A, re: z.re, im: z.im }
    }

    pub fn b(w: Complex64) -> Self {
        ChartPoint { chart: Chart::B, re: w.re, im: w.im }
    }

    pub fn local(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }

    /// Affine coordinate `z`, `None` at infinity.
    pub fn z(&self) -> Option<Complex64> {
        match self.chart {
            Chart::A => Some(self.local()),
            Chart::B => {
                let w = self.local();
                (w.norm() > 0.0).then(|| 1.0 / w)
            }
        }
    }

    /// The same sphere point expressed in the chart that owns it.
    pub fn canonical(&self) -> ChartPoint {
        match (self.chart, self.z()) {
            (_, None) => ChartPoint::b(Complex64::new(0.0, 0.0)),
            (_, Some(z)) if z.norm() <= 1.0 => ChartPoint::a(z),
            (_, Some(z)) => ChartPoint::b(1.0 / z),
        }
    }

    /// Chordal distance on the unit sphere.
    pub fn chordal_distance(&self, other: &ChartPoint) -> f64 {
        let s = |p: &ChartPoint| -> [f64; 3] {
            match p.z() {
                None => [0.0, 0.0, 1.0],
                Some(z) => {
                    let r2 = z.norm_sqr();
                    [2.0 * z.re / (1.0 + r2), 2.0 * z.im / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0)]
                }
            }
        };
        let (a, b) = (s(self), s(other));
        ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChartGrid {
    /// Points per side per chart.
    pub n: usize,
    /// Overlap width ε; each chart reaches `|·| ≤ 1 + ε`.
    pub eps: f64,
}

impl ChartGrid {
    pub fn new(n: usize) -> Self {
        ChartGrid::with_overlap(n, DEFAULT_OVERLAP)
    }

    pub fn with_overlap(n: usize, eps: f64) -> Self {
        assert!(n >= 8, "grid needs at least 8 points per side");
        assert!(eps > 0.0);
        ChartGrid { n, eps }
    }

    pub fn half_width(&self) -> f64 {
        1.0 + self.eps
    }

    /// Grid spacing.
    pub fn h(&self) -> f64 {
        2.0 * self.half_width() / (self.n - 1) as f64
    }

    pub fn len(&self) -> usize {
        self.n * self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn coord(&self, i: usize) -> f64 {
        -self.half_width() + i as f64 * self.h()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.n, idx / self.n)
    }

    /// Chart coordinate of a sample.
    pub fn local(&self, idx: usize) -> Complex64 {
        let (i, j) = self.ij(idx);
        Complex64::new(self.coord(i), self.coord(j))
    }

    pub fn point(&self, chart: Chart, idx: usize) -> ChartPoint {
        let z = self.local(idx);
        ChartPoint { chart, re: z.re, im: z.im }
    }

    pub fn owned(&self, chart: Chart, idx: usize) -> bool {
        let r = self.local(idx).norm();
        match chart {
            Chart::A => r <= 1.0,
            Chart::B => r < 1.0,
        }
    }

    pub fn owned_indices(&self, chart: Chart) -> Vec<usize> {
        (0..self.len()).filter(|&k| self.owned(chart, k)).collect()
    }

    /// Smooth partition-of-unity weight of a sample in its chart.
    pub fn partition(&self, idx: usize) -> f64 {
        partition_weight(self.local(idx).norm(), self.eps)
    }

    /// Quadrature weight `h² χ` for chart-coordinate 2-form densities.
    pub fn weight(&self, idx: usize) -> f64 {
        self.h() * self.h() * self.partition(idx)
    }

    /// Nearest sample to a chart coordinate (clamped to the grid).
    pub fn nearest(&self, z: Complex64) -> usize {
        let f = |t: f64| {
            (((t + self.half_width()) / self.h()).round().max(0.0) as usize).min(self.n - 1)
        };
        self.index(f(z.re), f(z.im))
    }

    /// Locate a chart coordinate inside this grid's square.
    pub fn contains(&self, z: Complex64) -> bool {
        z.re.abs() <= self.half_width() && z.im.abs() <= self.half_width()
    }
}

fn bump(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        (-1.0 / s).exp()
    }
}

/// `χ(r)` equal to 1 for `r ≤ 1/(1+ε)`, 0 for `r ≥ 1+ε`, smooth, and with
/// `χ(r) + χ(1/r) = 1`.
pub fn partition_weight(r: f64, eps: f64) -> f64 {
    if r == 0.0 {
        return 1.0;
    }
    let t = r.ln() / (1.0 + eps).ln();
    let (a, b) = (bump(1.0 - t), bump(1.0 + t));
    if a + b == 0.0 {
        return if t < 0.0 { 1.0 } else { 0.0 };
    }
    a / (a + b)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

const CENTRAL: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const EDGE0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const EDGE1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

/// Fourth-order first derivative of a strided real array along one axis.
///
/// `data` holds `stride` reals per sample in the grid's sample order.
/// Boundary samples use one-sided fourth-order stencils.
pub fn diff(grid: &ChartGrid, data: &[f64], stride: usize, axis: Axis) -> Vec<f64> {
    assert_eq!(data.len(), grid.len() * stride);
    let mut out = vec![0.0; data.len()];
    out.par_chunks_mut(stride).enumerate().for_each(|(idx, o)| {
        for (at, w) in stencil(grid, idx, axis) {
            if w == 0.0 {
                continue;
            }
            for (a, &b) in o.iter_mut().zip(&data[at * stride..(at + 1) * stride]) {
                *a += w * b;
            }
        }
    });
    out
}

/// Sample indices and weights of the first-derivative stencil at one sample.
pub fn stencil(grid: &ChartGrid, idx: usize, axis: Axis) -> [(usize, f64); 5] {
    let n = grid.n;
    let (i, j) = grid.ij(idx);
    let pos = match axis {
        Axis::X => i,
        Axis::Y => j,
    };
    let (start, coeffs, sign) = if pos >= 2 && pos + 2 < n {
        (pos - 2, CENTRAL, 1.0)
    } else if pos == 0 {
        (0, EDGE0, 1.0)
    } else if pos == 1 {
        (0, EDGE1, 1.0)
    } else if pos == n - 2 {
        (n - 5, rev(EDGE1), -1.0)
    } else {
        (n - 5, rev(EDGE0), -1.0)
    };
    let scale = sign / (12.0 * grid.h());
    std::array::from_fn(|t| {
        let at = match axis {
            Axis::X => grid.index(start + t, j),
            Axis::Y => grid.index(i, start + t),
        };
        (at, coeffs[t] * scale)
    })
}

/// Derivative at one sample of a quantity evaluated on demand at neighbours.
pub fn diff_at<F>(grid: &ChartGrid, idx: usize, axis: Axis, f: F) -> Vec<f64>
where
    F: Fn(usize) -> Vec<f64>,
{
    let mut out: Vec<f64> = Vec::new();
    for (at, w) in stencil(grid, idx, axis) {
        if w == 0.0 {
            continue;
        }
        let v = f(at);
        if out.is_empty() {
            out = vec![0.0; v.len()];
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += w * x;
        }
    }
    out
}

fn rev(c: [f64; 5]) -> [f64; 5] {
    [c[4], c[3], c[2], c[1], c[0]]
}

/// Whether the x/y stencils at a sample are centered (full order).
pub fn centered(grid: &ChartGrid, idx: usize) -> bool {
    let (i, j) = grid.ij(idx);
    let n = grid.n;
    i >= 2 && j >= 2 && i + 2 < n && j + 2 < n
}

/// Tensor six-point Lagrange interpolation of a strided array at chart coordinate `z`.
pub fn interpolate(grid: &ChartGrid, data: &[f64], stride: usize, z: Complex64) -> Vec<f64> {
    let n = grid.n;
    let h = grid.h();
    let base = |t: f64| -> (usize, f64) {
        let s = (t + grid.half_width()) / h;
        let i0 = (s.floor() as isize - 2).clamp(0, n as isize - 6) as usize;
        (i0, s - i0 as f64)
    };
    let (i0, sx) = base(z.re);
    let (j0, sy) = base(z.im);
    let lag = |s: f64| -> [f64; 6] {
        let mut w = [1.0; 6];
        for (a, wa) in w.iter_mut().enumerate() {
            for b in 0..6 {
                if a != b {
                    *wa *= (s - b as f64) / (a as f64 - b as f64);
                }
            }
        }
        w
    };
    let (wx, wy) = (lag(sx), lag(sy));
    let mut out = vec![0.0; stride];
    for (b, &wyb) in wy.iter().enumerate() {
        for (a, &wxa) in wx.iter().enumerate() {
            let idx = grid.index(i0 + a, j0 + b);
            let w = wxa * wyb;
            for (o, &v) in out.iter_mut().zip(&data[idx * stride..(idx + 1) * stride]) {
                *o += w * v;
            }
        }
    }
    out
}
