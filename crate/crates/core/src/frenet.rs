//! Residuals of the Frenet equations, flag derivatives, Weierstrass points
//! and the degree count of `K R₊`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CurveField, Provenance};
use crate::grid::{diff_at, Axis, Chart, ChartPoint};
use crate::quaternion::HMatrix;

/// Derivative of the flag at level `k`, `δ_k = π_{V/V_k} ∇|_{V_k}`, as chart components.
#[derive(Clone, Debug)]
pub struct DeltaMap {
    pub k: usize,
    pub x: HMatrix,
    pub y: HMatrix,
    /// `‖δ_y − S δ_x‖` on the quotient.
    pub left: f64,
    /// `‖δ_y − δ_x S‖` on `V_k`.
    pub right: f64,
    /// `‖π_{V/V_{k+1}} ∇|_{V_k}‖`, zero when derivatives stay in the next space.
    pub overshoot: f64,
}

fn projector_reals(field: &CurveField, chart: Chart, k: usize) -> impl Fn(usize) -> Vec<f64> + '_ {
    move |idx| field.projector(chart, idx, k).reals().collect()
}

/// The flag derivatives `δ_0, …, δ_{n−1}` at one sample.
pub fn delta_maps(field: &CurveField, chart: Chart, idx: usize) -> Vec<DeltaMap> {
    let m = field.m();
    let s = field.s(chart, idx);
    let id = HMatrix::identity(m);
    (0..field.n)
        .map(|k| {
            let p = field.projector(chart, idx, k);
            let q = &id - &p;
            let next = &id - &field.projector(chart, idx, k + 1);
            let px = HMatrix::from_reals(m, m, &diff_at(&field.grid, idx, Axis::X, projector_reals(field, chart, k)));
            let py = HMatrix::from_reals(m, m, &diff_at(&field.grid, idx, Axis::Y, projector_reals(field, chart, k)));
            let dx = &(&q * &px) * &p;
            let dy = &(&q * &py) * &p;
            let left = (&dy - &(&(&q * &s) * &dx)).norm();
            let right = (&dy - &(&(&dx * &s) * &p)).norm();
            let overshoot = (&(&next * &px) * &p).norm().max((&(&next * &py) * &p).norm());
            DeltaMap { k, x: dx, y: dy, left, right, overshoot }
        })
        .collect()
}

/// Maximum residuals of the Frenet equations over owned samples of both charts.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct FrenetResiduals {
    pub resolution: usize,
    /// `‖S² + 1‖`.
    pub s_squared: f64,
    /// `‖π_{V/V_k} S|_{V_k}‖`.
    pub flag_stability: f64,
    /// `‖π_{V/V_{k+1}} ∇|_{V_k}‖`.
    pub flag_derivative: f64,
    /// `‖*δ − Sδ‖`.
    pub delta_left: f64,
    /// `‖*δ − δS‖`.
    pub delta_right: f64,
    /// `‖π_{V/L} A‖`.
    pub a_into_l: f64,
    /// `‖Q|_{V_{n−1}}‖`.
    pub q_on_flag: f64,
    /// `‖SA + AS‖`.
    pub anticommutation: f64,
    /// `‖*A − SA‖ + ‖*Q + SQ‖`.
    pub hopf_type: f64,
    /// `‖dS − 2(*Q − *A)‖`.
    pub reconstruction: f64,
}

impl FrenetResiduals {
    /// Largest residual among the algebraic identities.
    pub fn algebraic(&self) -> f64 {
        self.s_squared.max(self.flag_stability).max(self.anticommutation).max(self.hopf_type)
    }

    /// Largest residual of `*δ = Sδ = δS`.
    pub fn delta(&self) -> f64 {
        self.delta_left.max(self.delta_right)
    }

    /// Largest residual of `AV ⊂ L` and `Q|_{V_{n−1}} = 0`.
    pub fn canonical(&self) -> f64 {
        self.a_into_l.max(self.q_on_flag)
    }
}

fn max_fold(a: FrenetResiduals, b: FrenetResiduals) -> FrenetResiduals {
    FrenetResiduals {
        resolution: a.resolution.max(b.resolution),
        s_squared: a.s_squared.max(b.s_squared),
        flag_stability: a.flag_stability.max(b.flag_stability),
        flag_derivative: a.flag_derivative.max(b.flag_derivative),
        delta_left: a.delta_left.max(b.delta_left),
        delta_right: a.delta_right.max(b.delta_right),
        a_into_l: a.a_into_l.max(b.a_into_l),
        q_on_flag: a.q_on_flag.max(b.q_on_flag),
        anticommutation: a.anticommutation.max(b.anticommutation),
        hopf_type: a.hopf_type.max(b.hopf_type),
        reconstruction: a.reconstruction.max(b.reconstruction),
    }
}

fn sample_residuals(field: &CurveField, chart: Chart, idx: usize) -> FrenetResiduals {
    let m = field.m();
    let n = field.n;
    let id = HMatrix::identity(m);
    let s = field.s(chart, idx);
    let (sx, sy) = field.s_derivatives(chart, idx);
    let (ax, ay) = field.hopf_a(chart, idx);
    let (qx, qy) = field.hopf_q(chart, idx);
    let mut r = FrenetResiduals { s_squared: (&(&s * &s) + &id).norm(), ..Default::default() };
    for k in 0..n {
        let p = field.projector(chart, idx, k);
        r.flag_stability = r.flag_stability.max((&(&(&id - &p) * &s) * &p).norm());
    }
    for d in delta_maps(field, chart, idx) {
        r.flag_derivative = r.flag_derivative.max(d.overshoot);
        r.delta_left = r.delta_left.max(d.left);
        r.delta_right = r.delta_right.max(d.right);
    }
    let away = &id - &field.projector(chart, idx, 0);
    r.a_into_l = (&away * &ax).norm().max((&away * &ay).norm());
    if n >= 1 {
        let low = field.projector(chart, idx, n - 1);
        r.q_on_flag = (&qx * &low).norm().max((&qy * &low).norm());
    }
    r.anticommutation = (&(&s * &ax) + &(&ax * &s)).norm().max((&(&s * &ay) + &(&ay * &s)).norm());
    r.hopf_type = (&ay - &(&s * &ax)).norm() + (&qy + &(&s * &qx)).norm();
    // dS = 2(*Q − *A) with (*X)_x = X_y and (*X)_y = −X_x
    let rx = (&sx - &(&qy - &ay).scale(2.0)).norm();
    let ry = (&sy - &(&ax - &qx).scale(2.0)).norm();
    r.reconstruction = rx.max(ry);
    r
}

/// All Frenet residuals of a field, maximized over owned samples.
pub fn canonical_residuals(field: &CurveField) -> FrenetResiduals {
    let mut total = FrenetResiduals { resolution: field.grid.n, ..Default::default() };
    for chart in Chart::BOTH {
        let owned = field.grid.owned_indices(chart);
        let part = owned
            .par_iter()
            .map(|&idx| sample_residuals(field, chart, idx))
            .reduce(FrenetResiduals::default, max_fold);
        total = max_fold(total, part);
    }
    total
}

/// A zero of a flag derivative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassPoint {
    pub point: ChartPoint,
    pub level: usize,
    pub order: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassReport {
    pub points: Vec<WeierstrassPoint>,
    /// Orders come from polynomial data rather than grid sampling.
    pub exact: bool,
}

impl WeierstrassReport {
    pub fn total_order(&self) -> usize {
        self.points.iter().map(|p| p.order).sum()
    }
}

/// Grid threshold for a vanishing flag derivative.
pub const DELTA_DIP: f64 = 1e-6;

/// Zeros of `δ_0, …, δ_{n−1}` with their orders.
///
/// For twistor fields the order of `δ_k` at `p` is `s_{k+1} − 2s_k + s_{k−1}`,
/// where `s_k` is the vanishing order of the level-`k` osculating wedge.
pub fn weierstrass_points(field: &CurveField) -> Result<WeierstrassReport> {
    match &field.curve {
        Some(h) => {
            let osc = h.osculating();
            let mut candidates: Vec<ChartPoint> = Vec::new();
            for k in 1..=field.n {
                for (p, _) in osc.wedge_zeros(k)? {
                    if !candidates.iter().any(|q| q.chordal_distance(&p) < 1e-6) {
                        candidates.push(p);
                    }
                }
            }
            let mut points = Vec::new();
            for p in candidates {
                let s: Vec<i64> = (0..=field.n)
                    .map(|k| osc.wedge_order(k, &p).map(|o| o as i64))
                    .collect::<Result<_>>()?;
                for k in 0..field.n {
                    let prev = if k == 0 { 0 } else { s[k - 1] };
                    let order = s[k + 1] - 2 * s[k] + prev;
                    if order > 0 {
                        points.push(WeierstrassPoint { point: p, level: k, order: order as usize });
                    }
                }
            }
            Ok(WeierstrassReport { points, exact: true })
        }
        None => Ok(grid_weierstrass(field)),
    }
}

fn delta_size(field: &CurveField, chart: Chart, idx: usize, k: usize) -> f64 {
    let d = &delta_maps(field, chart, idx)[k];
    d.x.norm()
}

fn grid_weierstrass(field: &CurveField) -> WeierstrassReport {
    let g = &field.grid;
    let radius = 2.0 * g.h();
    let mut points: Vec<WeierstrassPoint> = Vec::new();
    for k in 0..field.n {
        for chart in Chart::BOTH {
            let owned = g.owned_indices(chart);
            let vals: Vec<(usize, f64)> = owned.par_iter().map(|&i| (i, delta_size(field, chart, i, k))).collect();
            let mut dips: Vec<(usize, f64)> = vals.into_iter().filter(|&(_, v)| v < DELTA_DIP).collect();
            dips.sort_by(|a, b| a.1.total_cmp(&b.1));
            let mut centers: Vec<usize> = Vec::new();
            for (i, _) in dips {
                if centers.iter().all(|&c| (g.local(c) - g.local(i)).norm() > radius) {
                    centers.push(i);
                }
            }
            for c in centers {
                let (ci, cj) = g.ij(c);
                let ring = |r: usize| -> f64 {
                    let mut acc: f64 = 0.0;
                    for (di, dj) in [(r as isize, 0isize), (-(r as isize), 0), (0, r as isize), (0, -(r as isize))] {
                        let (i, j) = (ci as isize + di, cj as isize + dj);
                        if i >= 0 && j >= 0 && (i as usize) < g.n && (j as usize) < g.n {
                            acc = acc.max(delta_size(field, chart, g.index(i as usize, j as usize), k));
                        }
                    }
                    acc
                };
                let order = ((ring(2) / ring(1).max(1e-300)).log2().round() as i64).max(1) as usize;
                points.push(WeierstrassPoint { point: g.point(chart, c), level: k, order });
            }
        }
    }
    WeierstrassReport { points, exact: false }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub deg_kr_plus: i64,
    pub ord_total: usize,
}

/// `deg K R₊ = (n+1) deg K − ord(δ_{n−1}∘…∘δ_0)` on the sphere, where `deg K = −2`.
///
/// The order of the composition is the total order of the level-`n` wedge
/// minus that of the level-`(n−1)` wedge, read exactly from the minors.
pub fn degree_check(field: &CurveField) -> Result<DegreeCheck> {
    let h = match (&field.curve, field.provenance) {
        (Some(h), Provenance::Twistor) => h,
        _ => return Err(Error::NotPolynomial),
    };
    let n = field.n;
    let osc = h.osculating();
    let ord_total = if n == 0 { 0 } else { osc.total_order(n)? - osc.total_order(n - 1)? };
    let deg = -2 * (n as i64 + 1) - ord_total as i64;
    if deg >= 0 {
        return Err(Error::Numerical(format!("deg K R+ = {deg} is not negative")));
    }
    Ok(DegreeCheck { deg_kr_plus: deg, ord_total })
}

/// Conjugate `S` by `G = 1 + t P_0` with a smooth non-holomorphic `t`.
///
/// The result is still a flag-stabilizing complex structure but no longer
/// satisfies `AV ⊂ L`; used as a negative control.
pub fn perturb_structure(field: &CurveField, amplitude: f64) -> CurveField {
    let m = field.m();
    let id = HMatrix::identity(m);
    let s: [Vec<HMatrix>; 2] = Chart::BOTH.map(|chart| {
        (0..field.grid.len())
            .into_par_iter()
            .map(|idx| {
                let pt = field.grid.point(chart, idx);
                let (x, y, z) = match pt.z() {
                    Some(w) => {
                        let r2 = w.norm_sqr();
                        (2.0 * w.re / (1.0 + r2), 2.0 * w.im / (1.0 + r2), (r2 - 1.0) / (r2 + 1.0))
                    }
                    None => (0.0, 0.0, 1.0),
                };
                let t = amplitude * (1.0 + x + 0.5 * y * y - 0.3 * z + 0.2 * x * z);
                let p0 = field.projector(chart, idx, 0);
                let g = &id + &p0.scale(t);
                let gi = &id - &p0.scale(t / (1.0 + t));
                &(&g * &field.s(chart, idx)) * &gi
            })
            .collect()
    });
    field.with_structure(s)
}
