//! Tangent curves, osculating curves, envelopes and Bäcklund projections.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CurveField, Provenance, Sample};
use crate::grid::{interpolate, Chart, ChartGrid, ChartPoint};
use crate::integrate;
use crate::quaternion::{right_span, HMatrix, HVector, Quaternion};
use crate::surface::SurfaceMap;

/// Smallest admissible `|α(ψ)| / (|α||ψ|)` over the sphere.
pub const MIN_MARGIN: f64 = 1e-4;

/// A quaternionic hyperplane `H = ker α`, stored through the covector `α`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub alpha: HVector,
}

impl Hyperplane {
    pub fn new(alpha: HVector) -> Result<Self> {
        if alpha.norm() == 0.0 {
            return Err(Error::Config("zero covector".into()));
        }
        Ok(Hyperplane { alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    pub fn eval(&self, v: &HVector) -> Quaternion {
        self.alpha.pair(v)
    }

    /// The normal vector `ν` with `α(v) = ⟨ν, v⟩`.
    pub fn normal(&self) -> HVector {
        HVector(self.alpha.iter().map(|q| q.conj()).collect())
    }

    /// Columns form an orthonormal basis of `ker α`.
    pub fn basis(&self) -> HMatrix {
        let m = self.dim();
        let mut vs = vec![self.normal().normalized()];
        vs.extend((0..m).map(|i| HVector::basis(m, i)));
        let (b, _) = right_span(&vs, 1e-8);
        HMatrix::from_columns(&b[1..m])
    }

    /// `φ₀` with `α(φ₀) = 1`, orthogonal to `ker α`.
    pub fn dual(&self) -> HVector {
        let nu = self.normal();
        nu.scale(1.0 / nu.norm_sqr())
    }

    /// `min |α(ψ)| / (|α||ψ|)` over every sample of both charts.
    pub fn margin(&self, field: &CurveField) -> f64 {
        let a = self.alpha.norm();
        Chart::BOTH
            .iter()
            .map(|&c| {
                (0..field.grid.len())
                    .into_par_iter()
                    .map(|i| {
                        let p = field.psi(c, i);
                        self.eval(&p).norm() / (a * p.norm())
                    })
                    .reduce(|| f64::INFINITY, f64::min)
            })
            .fold(f64::INFINITY, f64::min)
    }
}

/// Best of `trials` seeded random hyperplanes by margin.
pub fn choose_hyperplane(field: &CurveField, trials: usize, seed: u64) -> Result<Hyperplane> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = field.m();
    let mut best: Option<(f64, Hyperplane)> = None;
    for _ in 0..trials.max(1) {
        let v: Vec<f64> = (0..4 * m).map(|_| StandardNormal.sample(&mut rng)).collect();
        let h = Hyperplane { alpha: HVector::from_real(&v).normalized() };
        let g = h.margin(field);
        if best.as_ref().is_none_or(|(b, _)| g > *b) {
            best = Some((g, h));
        }
    }
    match best {
        Some((g, h)) if g >= MIN_MARGIN => Ok(h),
        Some((g, _)) => Err(Error::NoAdmissibleHyperplane { margin: g, trials }),
        None => unreachable!(),
    }
}

fn basepoint(grid: &ChartGrid) -> usize {
    grid.nearest(Complex64::new(0.0, 0.0))
}

struct TangentSample {
    frame: HMatrix,
    s: HMatrix,
}

fn tangent_sample(field: &CurveField, chart: Chart, idx: usize, hp: &Hyperplane, e: &HMatrix) -> Result<TangentSample> {
    let m = field.m();
    let frame = field.frame(chart, idx);
    let e0 = frame.column(0);
    let a0 = hp.eval(&e0);
    if a0.norm() < 1e-14 {
        return Err(Error::HyperplaneMeetsCurve { margin: 0.0 });
    }
    let lift = e0.right_mul(a0.inv());
    let ea = e.adjoint();
    let cut: Vec<HVector> = (1..m)
        .map(|j| {
            let ej = frame.column(j);
            ea.apply(&(&ej - &lift.right_mul(hp.eval(&ej))))
        })
        .collect();
    let (basis, rank) = right_span(&cut, 1e-10);
    if rank != m - 1 {
        return Err(Error::Numerical(format!("tangent flag has rank {rank}, expected {}", m - 1)));
    }
    let pi = &HMatrix::identity(m) - &HMatrix::outer(&lift, &hp.alpha);
    let s = &(&(&ea * &pi) * &field.s(chart, idx)) * e;
    Ok(TangentSample { frame: HMatrix::from_columns(&basis), s })
}

/// The tangent curve `f̃` of `field` relative to `hp`, a Frenet curve in `HP^{n−1}`.
pub fn tangent_curve(field: &CurveField, hp: &Hyperplane) -> Result<CurveField> {
    if field.n == 0 {
        return Err(Error::PointCurve);
    }
    if hp.dim() != field.m() {
        return Err(Error::DimensionMismatch { expected: field.m(), found: hp.dim() });
    }
    let margin = hp.margin(field);
    if margin < MIN_MARGIN {
        return Err(Error::HyperplaneMeetsCurve { margin });
    }
    let e = hp.basis();
    let raw: Vec<Vec<TangentSample>> = Chart::BOTH
        .iter()
        .map(|&c| {
            (0..field.grid.len())
                .into_par_iter()
                .map(|i| tangent_sample(field, c, i, hp, &e))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mt = field.m() - 1;
    // the lift projects a fixed reference vector onto L̃; pick the one that stays farthest from zero
    let base = raw[0][basepoint(&field.grid)].frame.column(0);
    let mut candidates: Vec<HVector> = (0..mt).map(|i| HVector::basis(mt, i)).collect();
    candidates.sort_by(|a, b| base.dot(b).norm().total_cmp(&base.dot(a).norm()));
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..8 {
        let v: Vec<f64> = (0..4 * mt).map(|_| StandardNormal.sample(&mut rng)).collect();
        candidates.push(HVector::from_real(&v).normalized());
    }
    let anchor_norm = |c: &HVector| {
        raw.iter().flatten().map(|t| t.frame.column(0).dot(c).norm()).fold(f64::INFINITY, f64::min)
    };
    let mut reference = candidates[0].clone();
    let mut anchor = anchor_norm(&reference);
    if anchor < 1e-3 {
        for c in &candidates[1..] {
            let a = anchor_norm(c);
            if a > anchor {
                anchor = a;
                reference = c.clone();
            }
        }
    }
    let samples: Vec<Vec<Sample>> = raw
        .into_iter()
        .map(|chart| {
            chart
                .into_iter()
                .map(|t| {
                    let l = t.frame.column(0);
                    Sample { psi: l.right_mul(l.dot(&reference)), frame: t.frame, s: t.s }
                })
                .collect()
        })
        .collect();
    let [a, b]: [Vec<Sample>; 2] = samples.try_into().expect("two charts");
    let meta = serde_json::json!({
        "operation": "tangent",
        "alpha": hp.alpha.reals().collect::<Vec<_>>(),
        "margin": margin,
        "reference": reference.reals().collect::<Vec<_>>(),
        "anchor": anchor,
        "parent": field.meta,
    });
    Ok(CurveField::from_samples(field.n - 1, field.grid.clone(), Provenance::Tangent, [a, b], meta))
}

/// The `k`-fold tangent curve, in `HP^{n−k}`.
///
/// Hyperplanes are taken from `given` in order and drawn with `seed` once it runs out.
pub fn osculate(field: &CurveField, k: usize, given: &[Hyperplane], seed: u64) -> Result<CurveField> {
    if k > field.n {
        return Err(Error::PointCurve);
    }
    let mut f = field.clone();
    for i in 0..k {
        let hp = match given.get(i) {
            Some(h) => h.clone(),
            None => choose_hyperplane(&f, 64, seed + i as u64)?,
        };
        f = tangent_curve(&f, &hp)?;
    }
    if k > 1 {
        f.provenance = Provenance::Osculate;
    }
    Ok(f)
}

/// Decomposition `H^{n+1} = L_0 ⊕ … ⊕ L_n` by iterated tangent lines.
#[derive(Clone, Debug)]
pub struct Splitting {
    /// Unit generators of each `L_i` per chart and sample.
    pub lines: Vec<[Vec<HVector>; 2]>,
    /// Smallest singular value of `[ℓ_0 … ℓ_n]` over owned samples.
    pub certificate: f64,
}

pub fn splitting(field: &CurveField, seed: u64) -> Result<Splitting> {
    let m = field.m();
    let mut lines: Vec<[Vec<HVector>; 2]> = Vec::with_capacity(m);
    let mut f = field.clone();
    let mut embed = HMatrix::identity(m);
    for i in 0..m {
        lines.push(Chart::BOTH.map(|c| {
            (0..f.grid.len()).into_par_iter().map(|k| embed.apply(&f.psi(c, k)).normalized()).collect()
        }));
        if i + 1 < m {
            let hp = choose_hyperplane(&f, 64, seed + i as u64)?;
            embed = &embed * &hp.basis();
            f = tangent_curve(&f, &hp)?;
        }
    }
    let certificate = Chart::BOTH
        .iter()
        .map(|&c| {
            field
                .grid
                .owned_indices(c)
                .into_par_iter()
                .map(|k| {
                    let cols: Vec<HVector> = lines.iter().map(|l| l[c.index()][k].clone()).collect();
                    HMatrix::from_columns(&cols).min_singular_value()
                })
                .reduce(|| f64::INFINITY, f64::min)
        })
        .fold(f64::INFINITY, f64::min);
    if certificate < 1e-8 {
        return Err(Error::SplittingFailed { certificate });
    }
    Ok(Splitting { lines, certificate })
}

/// Data that continues `B = 2ψβ` through zeros of a Willmore form `ω = *Ãb`.
#[derive(Clone, Debug)]
pub struct WillmoreData {
    pub b0: HVector,
    /// Covectors `β` with `β|_{ker Ã} = 0`, `β(b) = 1`, flat per chart.
    pub beta: [Vec<f64>; 2],
}

/// An `L̃`-valued 1-form `ω` with `*ω = S̃ω`, as chart components.
#[derive(Clone, Debug)]
pub struct HoloForm {
    pub m: usize,
    pub wx: [Vec<f64>; 2],
    pub wy: [Vec<f64>; 2],
    pub willmore: Option<WillmoreData>,
}

impl HoloForm {
    fn at(&self, chart: Chart, idx: usize) -> (HVector, HVector) {
        let st = 4 * self.m;
        let r = idx * st..(idx + 1) * st;
        (HVector::from_real(&self.wx[chart.index()][r.clone()]), HVector::from_real(&self.wy[chart.index()][r]))
    }

    /// Relative `|dω|` over both charts.
    pub fn closedness(&self, grid: &ChartGrid) -> f64 {
        Chart::BOTH
            .iter()
            .map(|&c| integrate::closedness(grid, &self.wx[c.index()], &self.wy[c.index()], 4 * self.m))
            .fold(0.0, f64::max)
    }

    /// `min |ω| / max |ω|` over owned samples.
    pub fn min_ratio(&self, grid: &ChartGrid) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for c in Chart::BOTH {
            for k in grid.owned_indices(c) {
                let (x, y) = self.at(c, k);
                let v = (x.norm_sqr() + y.norm_sqr()).sqrt();
                lo = lo.min(v);
                hi = hi.max(v);
            }
        }
        if hi == 0.0 {
            0.0
        } else {
            lo / hi
        }
    }
}

/// `ω = *Ãb` for a constant vector `b`, closed exactly when `f̃` is Willmore.
pub fn make_willmore_form(field: &CurveField, b0: &HVector) -> Result<HoloForm> {
    let m = field.m();
    if b0.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: b0.len() });
    }
    let mut wx = [Vec::new(), Vec::new()];
    let mut wy = [Vec::new(), Vec::new()];
    let mut beta = [Vec::new(), Vec::new()];
    let mut max_a: f64 = 0.0;
    let mut max_w: f64 = 0.0;
    for c in Chart::BOTH {
        let rows: Vec<(HVector, HVector, HVector, f64)> = (0..field.grid.len())
            .into_par_iter()
            .map(|k| {
                let (ax, ay) = field.hopf_a(c, k);
                let l = field.psi(c, k);
                let lc = HVector(l.iter().map(|q| q.conj()).collect());
                let r = ax.pull_row(&lc).scale(1.0 / l.norm_sqr());
                let rb = r.pair(b0);
                let b = if rb.norm() > 0.0 { r.left_mul(rb.inv()) } else { HVector::zeros(m) };
                (ay.apply(b0), ax.apply(b0).scale(-1.0), b, ax.norm())
            })
            .collect();
        for (x, y, b, a) in rows {
            max_a = max_a.max(a);
            max_w = max_w.max(x.norm()).max(y.norm());
            wx[c.index()].extend(x.reals());
            wy[c.index()].extend(y.reals());
            beta[c.index()].extend(b.reals());
        }
    }
    if field.provenance == Provenance::Twistor {
        return Err(Error::TwistorDegenerate { max_norm: max_a });
    }
    if max_w < 1e-12 {
        return Err(Error::ZeroForm);
    }
    Ok(HoloForm { m, wx, wy, willmore: Some(WillmoreData { b0: b0.clone(), beta }) })
}

/// Default bound on the relative closedness of a form before integration.
pub const DEFAULT_CLOSED_TOL: f64 = 1e-2;

/// Diagnostics of a chart-wise integration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrationReport {
    pub closedness: f64,
    pub residual: f64,
    /// Disagreement of the two chart potentials on `|z| = 1`, relative.
    pub mismatch: f64,
    pub period: f64,
}

fn integrate_charts(
    grid: &ChartGrid,
    wx: &[Vec<f64>; 2],
    wy: &[Vec<f64>; 2],
    st: usize,
    base: &ChartPoint,
    value: &[f64],
) -> ([Vec<f64>; 2], IntegrationReport) {
    let mut phi = [integrate::potential(grid, &wx[0], &wy[0], st), integrate::potential(grid, &wx[1], &wy[1], st)];
    const M: usize = 256;
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..M)
        .map(|t| {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / M as f64);
            (interpolate(grid, &phi[0], st, z), interpolate(grid, &phi[1], st, z.inv()))
        })
        .collect();
    let mut shift = vec![0.0; st];
    for (a, b) in &pairs {
        for c in 0..st {
            shift[c] += (a[c] - b[c]) / M as f64;
        }
    }
    let mut dev: f64 = 0.0;
    let mut size: f64 = 0.0;
    for (a, b) in &pairs {
        dev = dev.max((0..st).map(|c| (a[c] - b[c] - shift[c]).powi(2)).sum::<f64>().sqrt());
        size = size.max(a.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    for (k, v) in phi[1].iter_mut().enumerate() {
        *v += shift[k % st];
    }
    let at = interpolate(grid, &phi[base.chart.index()], st, base.local());
    for p in phi.iter_mut() {
        for (k, v) in p.iter_mut().enumerate() {
            *v += value[k % st] - at[k % st];
        }
    }
    let report = IntegrationReport {
        closedness: (0..2).map(|c| integrate::closedness(grid, &wx[c], &wy[c], st)).fold(0.0, f64::max),
        residual: (0..2).map(|c| integrate::integration_residual(grid, &phi[c], &wx[c], &wy[c], st)).fold(0.0, f64::max),
        mismatch: if size > 0.0 { dev / size } else { 0.0 },
        period: integrate::loop_integral(grid, &wx[0], &wy[0], st, 1.0),
    };
    (phi, report)
}

fn conj_vec(v: &HVector) -> HVector {
    HVector(v.iter().map(|q| q.conj()).collect())
}

/// Envelope `f` in `HP^{n+1}` of `field` by `ω`, normalized by `ψ̃(base) = value`.
///
/// The lift is `ψ = (ψ̃, 1)` with `dψ̃ = ω`; the hyperplane `H^{n+1} ⊕ 0`
/// recovers `field` as the tangent curve.
pub fn envelope(field: &CurveField, form: &HoloForm, base: &ChartPoint, value: &HVector, closed_tol: f64) -> Result<CurveField> {
    let mt = field.m();
    if form.m != mt || value.len() != mt {
        return Err(Error::DimensionMismatch { expected: mt, found: if form.m != mt { form.m } else { value.len() } });
    }
    let grid = &field.grid;
    let closed = form.closedness(grid);
    if closed > closed_tol {
        return Err(Error::NotClosed { residual: closed, tol: closed_tol });
    }
    if form.willmore.is_none() {
        let r = form.min_ratio(grid);
        if r < 1e-9 {
            return Err(Error::FormHasZeros { min_norm: r });
        }
    }
    let st = 4 * mt;
    let values: Vec<f64> = value.reals().collect();
    let (phi, report) = integrate_charts(grid, &form.wx, &form.wy, st, base, &values);
    let m = mt + 1;
    let embed = |v: &HVector| {
        let mut out = v.clone();
        out.0.push(Quaternion::ZERO);
        out
    };
    let mut samples: Vec<Vec<Sample>> = Vec::with_capacity(2);
    let mut derivs = Vec::with_capacity(2);
    for c in Chart::BOTH {
        let chart: Vec<Result<(Sample, HVector, HVector)>> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let pt = HVector::from_real(&phi[c.index()][k * st..(k + 1) * st]);
                let mut psi = pt.clone();
                psi.0.push(Quaternion::ONE);
                let ft = field.frame(c, k);
                let mut vs = vec![psi.clone()];
                vs.extend((0..mt).map(|j| embed(&ft.column(j))));
                let (basis, rank) = right_span(&vs, 1e-12);
                if rank != m {
                    return Err(Error::Numerical(format!("envelope flag has rank {rank}")));
                }
                let st_ = field.s(c, k);
                let (wx, wy) = form.at(c, k);
                let (mut n, mut b) = match &form.willmore {
                    Some(w) => {
                        let beta = HVector::from_real(&w.beta[c.index()][k * st..(k + 1) * st]);
                        (-beta.pair(&st_.apply(&w.b0)), beta.scale(2.0))
                    }
                    None => {
                        let (ax, _) = field.hopf_a(c, k);
                        let n = wx.dot(&wy) * (1.0 / wx.norm_sqr());
                        (n, ax.pull_row(&conj_vec(&wy)).scale(-2.0 / wy.norm_sqr()))
                    }
                };
                n = n.im();
                n = n * (1.0 / n.norm());
                b = (&b + &st_.pull_row(&b).left_mul(n)).scale(0.5);
                let bp = b.pair(&pt);
                let sp = st_.apply(&pt);
                let mut s = HMatrix::zeros(m, m);
                for i in 0..mt {
                    for j in 0..mt {
                        s[(i, j)] = st_[(i, j)] + pt[i] * b[j];
                    }
                    s[(i, mt)] = pt[i] * n - sp[i] - pt[i] * bp;
                    s[(mt, i)] = b[i];
                }
                s[(mt, mt)] = n - bp;
                Ok((Sample { psi, frame: HMatrix::from_columns(&basis), s }, embed(&wx), embed(&wy)))
            })
            .collect();
        let mut ss = Vec::with_capacity(grid.len());
        let mut dx = Vec::with_capacity(grid.len());
        let mut dy = Vec::with_capacity(grid.len());
        for r in chart {
            let (s, x, y) = r?;
            ss.push(s);
            dx.extend(x.reals());
            dy.extend(y.reals());
        }
        samples.push(ss);
        derivs.push((dx, dy));
    }
    let [a, b]: [Vec<Sample>; 2] = samples.try_into().expect("two charts");
    let meta = serde_json::json!({
        "operation": "envelope",
        "willmore": form.willmore.is_some(),
        "integration": report,
        "parent": field.meta,
    });
    let mut out = CurveField::from_samples(field.n + 1, grid.clone(), Provenance::Envelope, [a, b], meta);
    for (c, d) in derivs.into_iter().enumerate() {
        out.charts[c].psi_d = Some(d);
    }
    Ok(out)
}

/// The envelope of the tangent curve of `field`, mapped back next to the original.
#[derive(Clone, Debug)]
pub struct Recovery {
    pub envelope: CurveField,
    /// `T(ṽ, t) = Eṽ + φ₀t`, taking envelope coordinates to the original ones.
    pub map: HMatrix,
    /// Largest projective distance `sin ∠(T ψ_env, ψ)` over owned samples.
    pub distance: f64,
}

/// Rebuild `field` from its tangent curve relative to `hp` and the form `ω = E*d(ψ α(ψ)⁻¹)`.
pub fn recover_original(field: &CurveField, hp: &Hyperplane) -> Result<Recovery> {
    let tangent = tangent_curve(field, hp)?;
    let e = hp.basis();
    let ea = e.adjoint();
    let mut wx = [Vec::new(), Vec::new()];
    let mut wy = [Vec::new(), Vec::new()];
    for c in Chart::BOTH {
        let rows: Vec<(HVector, HVector)> = (0..field.grid.len())
            .into_par_iter()
            .map(|k| {
                let psi = field.psi(c, k);
                let (px, py) = field.psi_derivatives(c, k);
                let ai = hp.eval(&psi).inv();
                let u = psi.right_mul(ai);
                let d = |dp: &HVector| ea.apply(&(&dp.right_mul(ai) - &u.right_mul(hp.eval(dp) * ai)));
                (d(&px), d(&py))
            })
            .collect();
        for (x, y) in rows {
            wx[c.index()].extend(x.reals());
            wy[c.index()].extend(y.reals());
        }
    }
    let form = HoloForm { m: field.m() - 1, wx, wy, willmore: None };
    let k0 = basepoint(&field.grid);
    let base = field.grid.point(Chart::A, k0);
    let psi0 = field.psi(Chart::A, k0);
    let value = ea.apply(&psi0.right_mul(hp.eval(&psi0).inv()));
    let env = envelope(&tangent, &form, &base, &value, f64::INFINITY)?;
    let mut cols: Vec<HVector> = (0..e.cols()).map(|j| e.column(j)).collect();
    cols.push(hp.dual());
    let map = HMatrix::from_columns(&cols);
    let distance = Chart::BOTH
        .iter()
        .map(|&c| {
            field
                .grid
                .owned_indices(c)
                .into_par_iter()
                .map(|k| projective_distance(&map.apply(&env.psi(c, k)), &field.psi(c, k)))
                .reduce(|| 0.0, f64::max)
        })
        .fold(0.0, f64::max);
    Ok(Recovery { envelope: env, map, distance })
}

/// `sin` of the angle between the quaternionic lines spanned by `u` and `v`.
pub fn projective_distance(u: &HVector, v: &HVector) -> f64 {
    let (u, v) = (u.normalized(), v.normalized());
    (&v - &u.right_mul(u.dot(&v))).norm()
}

/// The affine map `g` with `dg = α(ω)` and `g(base) = value`.
///
/// For `ω = *Ãb` this is a Bäcklund transform of the Willmore sphere `f̃`.
pub fn backlund_project(
    field: &CurveField,
    form: &HoloForm,
    hp: &Hyperplane,
    base: &ChartPoint,
    value: Quaternion,
) -> Result<(SurfaceMap, IntegrationReport)> {
    if hp.dim() != form.m {
        return Err(Error::DimensionMismatch { expected: form.m, found: hp.dim() });
    }
    let scalar = |w: &Vec<f64>| -> Vec<f64> {
        w.chunks_exact(4 * form.m).flat_map(|c| hp.eval(&HVector::from_real(c)).to_array()).collect()
    };
    let gx = [scalar(&form.wx[0]), scalar(&form.wx[1])];
    let gy = [scalar(&form.wy[0]), scalar(&form.wy[1])];
    let (phi, report) = integrate_charts(&field.grid, &gx, &gy, 4, base, &value.to_array());
    let [a, b] = phi.map(|p| p.chunks_exact(4).map(|c| [c[0], c[1], c[2], c[3]]).collect());
    Ok((SurfaceMap::new(field.grid.clone(), [a, b], Vec::new()), report))
}
