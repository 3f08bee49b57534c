//! Sampled Frenet curves in `HP^n`: lift, adapted frame and complex structure
//! on both charts of the sphere.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{diff, Axis, Chart, ChartGrid, ChartPoint};
use crate::quaternion::{lift_complex, project_onto, solve_endomorphism, HMatrix, HVector, Quaternion};
use crate::rational::{Osculating, RationalCurve};

/// How a field was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Twistor,
    Tangent,
    Envelope,
    Osculate,
}

impl Provenance {
    fn code(self) -> u8 {
        match self {
            Provenance::Twistor => 0,
            Provenance::Tangent => 1,
            Provenance::Envelope => 2,
            Provenance::Osculate => 3,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        Ok(match c {
            0 => Provenance::Twistor,
            1 => Provenance::Tangent,
            2 => Provenance::Envelope,
            3 => Provenance::Osculate,
            _ => return Err(Error::Format(format!("unknown provenance code {c}"))),
        })
    }
}

/// Per-chart sample arrays, stored as flat reals.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldChart {
    /// `4m` reals per sample.
    pub psi: Vec<f64>,
    /// Exact lift derivatives `(ψ_x, ψ_y)` when known.
    pub psi_d: Option<(Vec<f64>, Vec<f64>)>,
    /// Unitary frame with `V_k` spanned by the first `k+1` columns; `4m²` reals per sample.
    pub frame: Vec<f64>,
    pub s: Vec<f64>,
    pub sx: Vec<f64>,
    pub sy: Vec<f64>,
}

/// Pointwise data used to assemble a chart.
#[derive(Clone, Debug)]
pub struct Sample {
    pub psi: HVector,
    pub frame: HMatrix,
    pub s: HMatrix,
}

#[derive(Clone, Debug)]
pub struct CurveField {
    pub n: usize,
    pub grid: ChartGrid,
    pub provenance: Provenance,
    pub charts: [FieldChart; 2],
    /// Twistor lift, when the field came from polynomial data.
    pub curve: Option<RationalCurve>,
    /// Construction parameters for replay.
    pub meta: serde_json::Value,
}

fn flatten_vecs(vs: &[HVector]) -> Vec<f64> {
    vs.iter().flat_map(|v| v.reals().collect::<Vec<_>>()).collect()
}

fn flatten_mats(ms: &[HMatrix]) -> Vec<f64> {
    ms.iter().flat_map(|m| m.reals().collect::<Vec<_>>()).collect()
}

/// Derivatives of a sampled complex structure, projected onto the tangent
/// space `{X : SX + XS = 0}` of the structure manifold.
fn structure_derivatives(grid: &ChartGrid, s: &[f64], m: usize) -> (Vec<f64>, Vec<f64>) {
    let stride = 4 * m * m;
    let project = |raw: Vec<f64>| -> Vec<f64> {
        let mut out = vec![0.0; raw.len()];
        out.par_chunks_mut(stride).enumerate().for_each(|(idx, o)| {
            let sm = HMatrix::from_reals(m, m, &s[idx * stride..(idx + 1) * stride]);
            let d = HMatrix::from_reals(m, m, &raw[idx * stride..(idx + 1) * stride]);
            let t = (&d + &(&(&sm * &d) * &sm)).scale(0.5);
            for (a, b) in o.iter_mut().zip(t.reals()) {
                *a = b;
            }
        });
        out
    };
    (project(diff(grid, s, stride, Axis::X)), project(diff(grid, s, stride, Axis::Y)))
}

impl FieldChart {
    pub fn assemble(grid: &ChartGrid, m: usize, samples: &[Sample], psi_d: Option<(Vec<HVector>, Vec<HVector>)>) -> Self {
        let psi = flatten_vecs(&samples.iter().map(|s| s.psi.clone()).collect::<Vec<_>>());
        let frame = flatten_mats(&samples.iter().map(|s| s.frame.clone()).collect::<Vec<_>>());
        let s = flatten_mats(&samples.iter().map(|s| s.s.clone()).collect::<Vec<_>>());
        let (sx, sy) = structure_derivatives(grid, &s, m);
        FieldChart {
            psi,
            psi_d: psi_d.map(|(x, y)| (flatten_vecs(&x), flatten_vecs(&y))),
            frame,
            s,
            sx,
            sy,
        }
    }
}

impl CurveField {
    pub fn from_samples(
        n: usize,
        grid: ChartGrid,
        provenance: Provenance,
        samples: [Vec<Sample>; 2],
        meta: serde_json::Value,
    ) -> Self {
        let m = n + 1;
        let [a, b] = samples;
        let charts = [FieldChart::assemble(&grid, m, &a, None), FieldChart::assemble(&grid, m, &b, None)];
        CurveField { n, grid, provenance, charts, curve: None, meta }
    }

    /// Quaternionic dimension `m = n + 1` of the trivial bundle.
    pub fn m(&self) -> usize {
        self.n + 1
    }

    fn chart(&self, chart: Chart) -> &FieldChart {
        &self.charts[chart.index()]
    }

    pub fn psi(&self, chart: Chart, idx: usize) -> HVector {
        let st = 4 * self.m();
        HVector::from_real(&self.chart(chart).psi[idx * st..(idx + 1) * st])
    }

    /// Chart derivatives of the lift: exact when stored, order-4 stencils otherwise.
    pub fn psi_derivatives(&self, chart: Chart, idx: usize) -> (HVector, HVector) {
        let st = 4 * self.m();
        let c = self.chart(chart);
        match &c.psi_d {
            Some((x, y)) => (
                HVector::from_real(&x[idx * st..(idx + 1) * st]),
                HVector::from_real(&y[idx * st..(idx + 1) * st]),
            ),
            None => {
                let f = |k: usize| c.psi[k * st..(k + 1) * st].to_vec();
                (
                    HVector::from_real(&crate::grid::diff_at(&self.grid, idx, Axis::X, f)),
                    HVector::from_real(&crate::grid::diff_at(&self.grid, idx, Axis::Y, f)),
                )
            }
        }
    }

    fn mat(&self, data: &[f64], idx: usize) -> HMatrix {
        let m = self.m();
        let st = 4 * m * m;
        HMatrix::from_reals(m, m, &data[idx * st..(idx + 1) * st])
    }

    pub fn frame(&self, chart: Chart, idx: usize) -> HMatrix {
        self.mat(&self.chart(chart).frame, idx)
    }

    /// Orthonormal basis of `V_k`.
    pub fn flag_basis(&self, chart: Chart, idx: usize, k: usize) -> Vec<HVector> {
        let f = self.frame(chart, idx);
        (0..=k).map(|j| f.column(j)).collect()
    }

    /// Orthogonal projector onto `V_k`.
    pub fn projector(&self, chart: Chart, idx: usize, k: usize) -> HMatrix {
        HMatrix::projector(&self.flag_basis(chart, idx, k), self.m())
    }

    pub fn s(&self, chart: Chart, idx: usize) -> HMatrix {
        self.mat(&self.chart(chart).s, idx)
    }

    pub fn s_derivatives(&self, chart: Chart, idx: usize) -> (HMatrix, HMatrix) {
        let c = self.chart(chart);
        (self.mat(&c.sx, idx), self.mat(&c.sy, idx))
    }

    /// Hopf field `A` as chart components `(A_x, A_y)`.
    pub fn hopf_a(&self, chart: Chart, idx: usize) -> (HMatrix, HMatrix) {
        let s = self.s(chart, idx);
        let (sx, sy) = self.s_derivatives(chart, idx);
        let ax = (&sy + &(&s * &sx)).scale(0.25);
        let ay = (&(&s * &sy) - &sx).scale(0.25);
        (ax, ay)
    }

    /// Hopf field `Q` as chart components `(Q_x, Q_y)`.
    pub fn hopf_q(&self, chart: Chart, idx: usize) -> (HMatrix, HMatrix) {
        let s = self.s(chart, idx);
        let (sx, sy) = self.s_derivatives(chart, idx);
        let qx = (&(&s * &sx) - &sy).scale(0.25);
        let qy = (&(&s * &sy) + &sx).scale(0.25);
        (qx, qy)
    }

    /// Flat `A_x`, `A_y` arrays for a whole chart.
    pub fn hopf_a_grid(&self, chart: Chart) -> (Vec<f64>, Vec<f64>) {
        let st = 4 * self.m() * self.m();
        let mut ax = vec![0.0; self.grid.len() * st];
        let mut ay = vec![0.0; self.grid.len() * st];
        ax.par_chunks_mut(st).zip(ay.par_chunks_mut(st)).enumerate().for_each(|(idx, (ox, oy))| {
            let (x, y) = self.hopf_a(chart, idx);
            ox.iter_mut().zip(x.reals()).for_each(|(o, v)| *o = v);
            oy.iter_mut().zip(y.reals()).for_each(|(o, v)| *o = v);
        });
        (ax, ay)
    }

    /// Replace the complex structure, recomputing its derivatives.
    pub fn with_structure(&self, s: [Vec<HMatrix>; 2]) -> CurveField {
        let mut out = self.clone();
        let m = self.m();
        for chart in Chart::BOTH {
            let flat = flatten_mats(&s[chart.index()]);
            let (sx, sy) = structure_derivatives(&self.grid, &flat, m);
            let c = &mut out.charts[chart.index()];
            c.s = flat;
            c.sx = sx;
            c.sy = sy;
        }
        out
    }

    /// Samples of one chart in the form accepted by [`CurveField::from_samples`].
    pub fn samples(&self, chart: Chart) -> Vec<Sample> {
        (0..self.grid.len())
            .map(|k| Sample { psi: self.psi(chart, k), frame: self.frame(chart, k), s: self.s(chart, k) })
            .collect()
    }
}

/// Exact twistor data at a single point.
#[derive(Clone, Debug)]
pub struct TwistorSample {
    pub psi: HVector,
    /// `ψ_x = ι(h')`; `ψ_y = ψ_x·i`.
    pub psi_x: HVector,
    pub frame: HMatrix,
    pub s: HMatrix,
}

/// Twistor projection of `h` at one chart point, using precomputed minors.
pub fn twistor_sample(h: &RationalCurve, osc: &Osculating, p: &ChartPoint) -> Result<TwistorSample> {
    let n = h.dim();
    let m = n + 1;
    let (v, dv) = h.eval_with_derivative(p.chart, p.local());
    let mut basis: Vec<HVector> = Vec::with_capacity(m);
    for k in 0..=n {
        let w: Vec<HVector> = osc.space(k, p)?.iter().map(|u| lift_complex(u)).collect();
        let best = w
            .iter()
            .map(|u| u - &project_onto(&basis, u))
            .max_by(|a, b| a.norm().total_cmp(&b.norm()))
            .expect("nonempty osculating basis");
        let r = &best - &project_onto(&basis, &best);
        if r.norm() < 1e-6 {
            return Err(Error::QuaternionicLocus { count: 1 });
        }
        basis.push(r.normalized());
    }
    let wn = osc.space(n, p)?;
    let pairs: Vec<(HVector, HVector)> = wn
        .iter()
        .map(|u| {
            let q = lift_complex(u);
            let qi = q.right_mul(Quaternion::I);
            (q, qi)
        })
        .collect();
    let s = solve_endomorphism(&pairs, 1e-8)
        .map_err(|_| Error::QuaternionicLocus { count: 1 })?
        .matrix;
    Ok(TwistorSample { psi: lift_complex(&v), psi_x: lift_complex(&dv), frame: HMatrix::from_columns(&basis), s })
}

/// The Frenet field of the twistor projection of `h` to `HP^n`.
///
/// Fails if the `n`-th osculating space of `h` contains a quaternionic line somewhere.
pub fn twistor_project(h: &RationalCurve, grid: ChartGrid) -> Result<CurveField> {
    let locus = h.quaternionic_locus()?;
    if !locus.is_empty() {
        return Err(Error::QuaternionicLocus { count: locus.count() });
    }
    let n = h.dim();
    let osc = h.osculating();
    let mut charts = Vec::with_capacity(2);
    for chart in Chart::BOTH {
        let samples: Vec<TwistorSample> = (0..grid.len())
            .into_par_iter()
            .map(|idx| twistor_sample(h, &osc, &grid.point(chart, idx)))
            .collect::<Result<_>>()?;
        let psi_x: Vec<HVector> = samples.iter().map(|t| t.psi_x.clone()).collect();
        let psi_y: Vec<HVector> = psi_x.iter().map(|v| v.right_mul(Quaternion::I)).collect();
        let base: Vec<Sample> = samples
            .into_iter()
            .map(|t| Sample { psi: t.psi, frame: t.frame, s: t.s })
            .collect();
        charts.push(FieldChart::assemble(&grid, n + 1, &base, Some((psi_x, psi_y))));
    }
    let b = charts.pop().expect("chart B");
    let a = charts.pop().expect("chart A");
    Ok(CurveField {
        n,
        grid,
        provenance: Provenance::Twistor,
        charts: [a, b],
        curve: Some(h.clone()),
        meta: serde_json::json!({ "operation": "twistor" }),
    })
}

impl CurveField {
    /// Nested orthonormal bases of `V_0 ⊂ … ⊂ V_n` at `p`: exact for twistor
    /// fields, otherwise read at the nearest sample.
    pub fn frenet_flag(&self, p: &ChartPoint) -> Result<Vec<Vec<HVector>>> {
        let frame = match &self.curve {
            Some(h) => twistor_sample(h, &h.osculating(), p)?.frame,
            None => self.frame(p.chart, self.grid.nearest(p.local())),
        };
        Ok((0..=self.n).map(|k| (0..=k).map(|j| frame.column(j)).collect()).collect())
    }
}

const MAGIC: &[u8; 8] = b"FRNTFLD\0";
const VERSION: u32 = 1;

fn put_f64s(w: &mut impl Write, v: &[f64]) -> Result<()> {
    w.write_all(&(v.len() as u64).to_le_bytes())?;
    let mut buf = Vec::with_capacity(8 * v.len());
    for x in v {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

fn put_bytes(w: &mut impl Write, b: &[u8]) -> Result<()> {
    w.write_all(&(b.len() as u64).to_le_bytes())?;
    w.write_all(b)?;
    Ok(())
}

fn get_u64(r: &mut impl Read) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn get_bytes(r: &mut impl Read) -> Result<Vec<u8>> {
    let len = get_u64(r)? as usize;
    let mut b = vec![0u8; len];
    r.read_exact(&mut b)?;
    Ok(b)
}

fn get_f64s(r: &mut impl Read, expected: usize) -> Result<Vec<f64>> {
    let b = get_bytes_f64(r)?;
    if b.len() != expected {
        return Err(Error::Format(format!("array of {} reals, expected {expected}", b.len())));
    }
    Ok(b)
}

fn get_bytes_f64(r: &mut impl Read) -> Result<Vec<f64>> {
    let len = get_u64(r)? as usize;
    let mut b = vec![0u8; 8 * len];
    r.read_exact(&mut b)?;
    Ok(b.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
}

impl CurveField {
    /// Versioned little-endian dump. Structure derivatives are recomputed on load.
    pub fn write_dump(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&VERSION.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.grid.n as u64).to_le_bytes())?;
        w.write_all(&self.grid.eps.to_le_bytes())?;
        w.write_all(&[self.provenance.code()])?;
        put_bytes(w, self.curve.as_ref().map(|h| h.to_json()).unwrap_or_default().as_bytes())?;
        put_bytes(w, serde_json::to_string(&self.meta)?.as_bytes())?;
        for c in &self.charts {
            put_f64s(w, &c.psi)?;
            match &c.psi_d {
                Some((x, y)) => {
                    w.write_all(&[1])?;
                    put_f64s(w, x)?;
                    put_f64s(w, y)?;
                }
                None => w.write_all(&[0])?,
            }
            put_f64s(w, &c.frame)?;
            put_f64s(w, &c.s)?;
        }
        Ok(())
    }

    pub fn read_dump(r: &mut impl Read) -> Result<CurveField> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Format("not a field dump".into()));
        }
        let mut v = [0u8; 4];
        r.read_exact(&mut v)?;
        if u32::from_le_bytes(v) != VERSION {
            return Err(Error::Format(format!("unsupported dump version {}", u32::from_le_bytes(v))));
        }
        let n = get_u64(r)? as usize;
        let gn = get_u64(r)? as usize;
        let mut e = [0u8; 8];
        r.read_exact(&mut e)?;
        let grid = ChartGrid::with_overlap(gn, f64::from_le_bytes(e));
        let mut p = [0u8; 1];
        r.read_exact(&mut p)?;
        let provenance = Provenance::from_code(p[0])?;
        let curve_text = String::from_utf8(get_bytes(r)?).map_err(|e| Error::Format(e.to_string()))?;
        let curve = if curve_text.is_empty() { None } else { Some(RationalCurve::from_json(&curve_text)?) };
        let meta_text = String::from_utf8(get_bytes(r)?).map_err(|e| Error::Format(e.to_string()))?;
        let meta = serde_json::from_str(&meta_text)?;
        let m = n + 1;
        let (vl, ml) = (grid.len() * 4 * m, grid.len() * 4 * m * m);
        let mut charts = Vec::with_capacity(2);
        for _ in 0..2 {
            let psi = get_f64s(r, vl)?;
            let mut flag = [0u8; 1];
            r.read_exact(&mut flag)?;
            let psi_d = if flag[0] == 1 { Some((get_f64s(r, vl)?, get_f64s(r, vl)?)) } else { None };
            let frame = get_f64s(r, ml)?;
            let s = get_f64s(r, ml)?;
            let (sx, sy) = structure_derivatives(&grid, &s, m);
            charts.push(FieldChart { psi, psi_d, frame, s, sx, sy });
        }
        let b = charts.pop().expect("chart B");
        let a = charts.pop().expect("chart A");
        Ok(CurveField { n, grid, provenance, charts: [a, b], curve, meta })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_dump(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CurveField> {
        CurveField::read_dump(&mut std::io::BufReader::new(std::fs::File::open(path)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn round() -> RationalCurve {
        RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap()
    }

    fn cubic() -> RationalCurve {
        RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]).unwrap()
    }

    #[test]
    fn round_sphere_has_constant_structure() {
        let f = twistor_project(&round(), ChartGrid::new(16)).unwrap();
        for chart in Chart::BOTH {
            for k in 0..f.grid.len() {
                let (ax, ay) = f.hopf_a(chart, k);
                assert!(ax.norm() + ay.norm() < 1e-10);
                let s = f.s(chart, k);
                assert!((&(&s * &s) + &HMatrix::identity(2)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn twistor_structure_is_i_on_w() {
        let h = cubic();
        let osc = h.osculating();
        let p = ChartPoint::a(Complex64::new(0.3, -0.2));
        let t = twistor_sample(&h, &osc, &p).unwrap();
        for u in osc.space(1, &p).unwrap() {
            let q = lift_complex(&u);
            assert!((&t.s.apply(&q) - &q.right_mul(Quaternion::I)).norm() < 1e-12);
            let qj = q.right_mul(Quaternion::J);
            assert!((&t.s.apply(&qj) - &qj.right_mul(-Quaternion::I)).norm() < 1e-12);
        }
        // V_0 is the line of ψ
        let psi = t.psi.normalized();
        let e0 = t.frame.column(0);
        assert!((1.0 - e0.dot(&psi).norm()).abs() < 1e-12);
    }

    #[test]
    fn quaternionic_curve_rejected() {
        let bad = RationalCurve::from_real(&[&[1.0], &[0.0], &[0.0, 1.0], &[0.0]]).unwrap();
        assert!(matches!(twistor_project(&bad, ChartGrid::new(16)), Err(Error::QuaternionicLocus { .. })));
    }

    #[test]
    fn dump_round_trip_is_bit_exact() {
        let f = twistor_project(&cubic(), ChartGrid::new(16)).unwrap();
        let mut buf = Vec::new();
        f.write_dump(&mut buf).unwrap();
        let g = CurveField::read_dump(&mut buf.as_slice()).unwrap();
        assert_eq!(f.charts, g.charts);
        assert_eq!(f.curve, g.curve);
        let mut again = Vec::new();
        g.write_dump(&mut again).unwrap();
        assert_eq!(buf, again);
    }
}
