//! Surfaces in R⁴: stereographic projection of HP¹ fields, pointwise
//! curvature, planar ends and mesh export.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{CurveField, Provenance};
use crate::grid::{diff_at, Axis, Chart, ChartGrid, ChartPoint};
use crate::quaternion::{right_span, HVector};

/// Samples closer than this many cells to a puncture are excluded.
pub const EXCLUSION_CELLS: f64 = 3.0;

/// `|b| / |ψ|` below which a sample is a puncture.
pub const PUNCTURE_TOL: f64 = 1e-7;

/// Sampled map into R⁴ on both charts. Punctured samples hold NaN.
#[derive(Clone, Debug)]
pub struct SurfaceMap {
    pub grid: ChartGrid,
    pub points: [Vec<[f64; 4]>; 2],
    pub punctures: Vec<ChartPoint>,
    pub meta: serde_json::Value,
}

impl SurfaceMap {
    pub fn new(grid: ChartGrid, points: [Vec<[f64; 4]>; 2], punctures: Vec<ChartPoint>) -> Self {
        SurfaceMap { grid, points, punctures, meta: serde_json::Value::Null }
    }

    /// Map a function of the chart coordinate over both charts.
    pub fn from_fn(grid: ChartGrid, f: impl Fn(&ChartPoint) -> [f64; 4] + Sync) -> Self {
        let points = Chart::BOTH.map(|c| (0..grid.len()).into_par_iter().map(|k| f(&grid.point(c, k))).collect());
        SurfaceMap::new(grid, points, Vec::new())
    }

    pub fn point(&self, chart: Chart, idx: usize) -> [f64; 4] {
        self.points[chart.index()][idx]
    }

    /// Within the exclusion disk of some puncture.
    pub fn excluded(&self, chart: Chart, idx: usize) -> bool {
        let z = self.grid.local(idx);
        let r = EXCLUSION_CELLS * self.grid.h();
        self.punctures.iter().any(|p| match local_in(p, chart) {
            Some(q) => (q - z).norm() <= r + 1e-12,
            None => false,
        })
    }

    /// Euclidean area of the exclusion disks, an upper bound on what quadrature skips.
    pub fn excluded_area(&self) -> f64 {
        let r = EXCLUSION_CELLS * self.grid.h();
        self.punctures.len() as f64 * std::f64::consts::PI * r * r
    }

    /// Round-sphere area of the exclusion disks as a fraction of `4π`.
    pub fn excluded_fraction(&self) -> f64 {
        let r = EXCLUSION_CELLS * self.grid.h();
        self.punctures
            .iter()
            .map(|p| {
                let q = p.local().norm().min(1.0 / p.local().norm());
                let scale = 2.0 / (1.0 + q * q);
                std::f64::consts::PI * (scale * r).powi(2)
            })
            .sum::<f64>()
            / (4.0 * std::f64::consts::PI)
    }
}

/// Coordinate of `p` in `chart`, if finite.
pub fn local_in(p: &ChartPoint, chart: Chart) -> Option<num_complex::Complex64> {
    if p.chart == chart {
        return Some(p.local());
    }
    let q = p.local();
    if q.norm() == 0.0 {
        None
    } else {
        Some(q.inv())
    }
}

/// How the projection pole is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pole {
    /// The kernel of `A` at the sample where `‖A‖` is largest; for twistor
    /// fields the line `L` there.
    Auto,
    /// The line `L` at a sample of chart A.
    Index(usize),
    /// An explicit line, as reals of a generator.
    Line(Vec<f64>),
}

impl std::str::FromStr for Pole {
    type Err = Error;

    /// `auto` or a chart A sample index.
    fn from_str(s: &str) -> Result<Pole> {
        match s {
            "auto" => Ok(Pole::Auto),
            _ => s.parse().map(Pole::Index).map_err(|_| Error::Config(format!("pole must be `auto` or a sample index, got `{s}`"))),
        }
    }
}

/// A resolved pole with its provenance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoleChoice {
    pub line: Vec<f64>,
    pub source: String,
    /// `max ‖A_x k‖ / ‖A_x‖` over samples where `A` is not small; zero when
    /// the kernel of `A` is constant.
    pub kernel_drift: f64,
}

fn left_kernel(row: &HVector) -> HVector {
    let nu = HVector(row.iter().map(|q| q.conj()).collect()).normalized();
    let mut vs = vec![nu];
    vs.extend((0..row.len()).map(|i| HVector::basis(row.len(), i)));
    right_span(&vs, 1e-8).0[1].clone()
}

pub fn resolve_pole(field: &CurveField, pole: &Pole) -> Result<PoleChoice> {
    if field.n != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: field.n });
    }
    match pole {
        Pole::Line(v) => Ok(PoleChoice { line: v.clone(), source: "line".into(), kernel_drift: 0.0 }),
        Pole::Index(k) => {
            if *k >= field.grid.len() {
                return Err(Error::Config(format!("pole sample {k} out of range")));
            }
            Ok(PoleChoice {
                line: field.psi(Chart::A, *k).normalized().reals().collect(),
                source: format!("sample {k}"),
                kernel_drift: 0.0,
            })
        }
        Pole::Auto => {
            let norms: Vec<(Chart, usize, f64)> = Chart::BOTH
                .iter()
                .flat_map(|&c| {
                    field.grid.owned_indices(c).into_par_iter().map(move |k| (c, k, field.hopf_a(c, k).0.norm())).collect::<Vec<_>>()
                })
                .collect();
            let &(c, k, top) = norms.iter().max_by(|a, b| a.2.total_cmp(&b.2)).expect("nonempty grid");
            if field.provenance == Provenance::Twistor || top == 0.0 {
                return Ok(PoleChoice {
                    line: field.psi(c, k).normalized().reals().collect(),
                    source: format!("L at max |A|, chart {c:?} sample {k}"),
                    kernel_drift: 0.0,
                });
            }
            let ax = field.hopf_a(c, k).0;
            let row = (0..2).map(|i| ax.row(i)).max_by(|a, b| a.norm().total_cmp(&b.norm())).expect("two rows");
            let kernel = left_kernel(&row);
            let drift = norms
                .iter()
                .filter(|t| t.2 > 1e-3 * top)
                .map(|&(c, k, a)| field.hopf_a(c, k).0.apply(&kernel).norm() / a)
                .fold(0.0, f64::max);
            Ok(PoleChoice {
                line: kernel.reals().collect(),
                source: format!("ker A at max |A|, chart {c:?} sample {k}"),
                kernel_drift: drift,
            })
        }
    }
}

/// Affine coordinate `a b⁻¹` of `L`, where `ψ = p a + q b` with `p` spanning the pole.
pub fn stereographic(field: &CurveField, pole: &HVector) -> Result<SurfaceMap> {
    if field.n != 1 || pole.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 1, found: field.n });
    }
    let p = pole.normalized();
    let q = right_span(&[p.clone(), HVector::basis(2, 0), HVector::basis(2, 1)], 1e-8).0[1].clone();
    let grid = field.grid.clone();
    let mut coords: [Vec<([f64; 4], f64)>; 2] = [Vec::new(), Vec::new()];
    let points = Chart::BOTH.map(|c| {
        let rows: Vec<([f64; 4], ([f64; 4], f64))> = (0..grid.len())
            .into_par_iter()
            .map(|k| {
                let psi = field.psi(c, k);
                let (a, b) = (p.dot(&psi), q.dot(&psi));
                let ratio = b.norm() / psi.norm();
                // b a⁻¹ is gauge invariant and vanishes to first order at a puncture
                let g = if a.norm() > 0.0 { (b * a.inv()).to_array() } else { [f64::INFINITY; 4] };
                if ratio < PUNCTURE_TOL {
                    ([f64::NAN; 4], (g, ratio))
                } else {
                    ((a * b.inv()).to_array(), (g, ratio))
                }
            })
            .collect();
        coords[c.index()] = rows.iter().map(|t| t.1).collect();
        rows.into_iter().map(|t| t.0).collect()
    });
    if coords.iter().all(|r| r.iter().all(|v| v.1 < PUNCTURE_TOL)) {
        return Err(Error::PoleEverywhere);
    }
    let punctures = locate_punctures(&grid, &coords);
    let mut map = SurfaceMap::new(grid, points, punctures);
    map.meta = serde_json::json!({ "pole": p.reals().collect::<Vec<_>>(), "source": field.meta });
    Ok(map)
}

fn norm4(v: &[f64; 4]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Zeros of `G = b a⁻¹`: local minima of `|b|/|ψ|` where the linear model of
/// `G` from central differences reaches zero within 1.5 cells. The zero is
/// placed by one least-squares Newton step; one point is kept per spot.
fn locate_punctures(grid: &ChartGrid, coords: &[Vec<([f64; 4], f64)>; 2]) -> Vec<ChartPoint> {
    let mut found: Vec<(ChartPoint, f64)> = Vec::new();
    let n = grid.n;
    let h = grid.h();
    for c in Chart::BOTH {
        let b: Vec<[f64; 4]> = coords[c.index()].iter().map(|t| t.0).collect();
        let r = |k: usize| coords[c.index()][k].1;
        for k in 0..grid.len() {
            let (i, j) = grid.ij(k);
            if i == 0 || j == 0 || i + 1 == n || j + 1 == n || grid.local(k).norm() > 1.0 + grid.eps {
                continue;
            }
            let minimum = (i - 1..=i + 1).all(|a| (j - 1..=j + 1).all(|bb| r(grid.index(a, bb)) >= r(k)));
            if !minimum {
                continue;
            }
            let d = |k1: usize, k0: usize| -> [f64; 4] { std::array::from_fn(|t| (b[k1][t] - b[k0][t]) / (2.0 * h)) };
            let bx = d(grid.index(i + 1, j), grid.index(i - 1, j));
            let by = d(grid.index(i, j + 1), grid.index(i, j - 1));
            let m = nalgebra::Matrix4x2::from_fn(|t, col| if col == 0 { bx[t] } else { by[t] });
            let rhs = -nalgebra::Vector4::from_row_slice(&b[k]);
            let Some(step) = (m.transpose() * m).try_inverse().map(|inv| inv * m.transpose() * rhs) else {
                continue;
            };
            let miss = (m * step - rhs).norm();
            if !(step.norm() <= 1.5 * h && miss <= 0.25 * norm4(&b[k]) + 1e-14) {
                continue;
            }
            let z = grid.local(k) + num_complex::Complex64::new(step[0], step[1]);
            let pt = if c == Chart::A { ChartPoint::a(z) } else { ChartPoint::b(z) };
            match found.iter_mut().find(|(q, _)| q.chordal_distance(&pt) < 3.0 * h) {
                Some(slot) if slot.1 > r(k) => *slot = (pt, r(k)),
                Some(_) => {}
                None => found.push((pt, r(k))),
            }
        }
    }
    found.into_iter().map(|t| t.0).collect()
}

/// Pointwise extrinsic curvature of a surface in R⁴.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    /// `|H|²` with `H` the mean of the principal curvature vectors.
    pub h2: f64,
    pub k: f64,
    /// Normal curvature for the orientation `(F_x, F_y, n_1, n_2)` positive.
    pub k_perp: f64,
    /// `√(EG − F²)`.
    pub area: f64,
}

type V4 = [f64; 4];

fn dot4(a: &V4, b: &V4) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(a: &V4, s: f64, b: &V4) -> V4 {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

fn unit(a: &V4) -> V4 {
    let n = dot4(a, a).sqrt();
    a.map(|x| x / n)
}

fn det4(m: [V4; 4]) -> f64 {
    nalgebra::Matrix4::from_fn(|i, j| m[j][i]).determinant()
}

/// First derivatives `F_x`, `F_y` at a sample, `None` if a stencil sample is a puncture.
pub fn first_derivatives(map: &SurfaceMap, chart: Chart, idx: usize) -> Option<(V4, V4)> {
    let pts = &map.points[chart.index()];
    let f = |k: usize| pts[k].to_vec();
    let fx = diff_at(&map.grid, idx, Axis::X, f);
    let fy = diff_at(&map.grid, idx, Axis::Y, f);
    let v = |d: Vec<f64>| [d[0], d[1], d[2], d[3]];
    let (fx, fy) = (v(fx), v(fy));
    if fx.iter().chain(&fy).all(|x| x.is_finite()) {
        Some((fx, fy))
    } else {
        None
    }
}

/// Curvature from order-4 stencils of the sampled map.
pub fn curvature_at(map: &SurfaceMap, chart: Chart, idx: usize) -> Option<Curvature> {
    let (fx, fy) = first_derivatives(map, chart, idx)?;
    let g = &map.grid;
    let der = |axis: Axis, which: usize| {
        diff_at(g, idx, axis, |k| match first_derivatives(map, chart, k) {
            Some((a, b)) => (if which == 0 { a } else { b }).to_vec(),
            None => vec![f64::NAN; 4],
        })
    };
    let v = |d: Vec<f64>| [d[0], d[1], d[2], d[3]];
    let fxx = v(der(Axis::X, 0));
    let fyy = v(der(Axis::Y, 1));
    let fxy = v(der(Axis::Y, 0));
    if !fxx.iter().chain(&fyy).chain(&fxy).all(|x| x.is_finite()) {
        return None;
    }
    let e1 = unit(&fx);
    let e2 = unit(&axpy(&fy, -dot4(&fy, &e1), &e1));
    if !e1.iter().chain(&e2).all(|x| x.is_finite()) {
        // not immersed: zero area
        return Some(Curvature::default());
    }
    let mut normals: Vec<V4> = Vec::new();
    for i in 0..4 {
        let mut u = [0.0; 4];
        u[i] = 1.0;
        for b in [e1, e2].iter().chain(&normals) {
            u = axpy(&u, -dot4(&u, b), b);
        }
        if dot4(&u, &u) > 1e-6 {
            normals.push(unit(&u));
        }
        if normals.len() == 2 {
            break;
        }
    }
    if normals.len() < 2 {
        return Some(Curvature::default());
    }
    let (n1, mut n2) = (normals[0], normals[1]);
    if det4([e1, e2, n1, n2]) < 0.0 {
        n2 = n2.map(|x| -x);
    }
    // J maps coordinate directions to the orthonormal tangent frame
    let (a11, a12, a22) = (dot4(&fx, &e1), dot4(&fy, &e1), dot4(&fy, &e2));
    let ji = nalgebra::Matrix2::new(a11, a12, 0.0, a22).try_inverse()?;
    let shape = |n: &V4| {
        let h = nalgebra::Matrix2::new(dot4(&fxx, n), dot4(&fxy, n), dot4(&fxy, n), dot4(&fyy, n));
        ji.transpose() * h * ji
    };
    let (s1, s2) = (shape(&n1), shape(&n2));
    let h2 = 0.25 * (s1.trace().powi(2) + s2.trace().powi(2));
    let k = s1.determinant() + s2.determinant();
    let k_perp = (s1 * s2 - s2 * s1)[(0, 1)];
    Some(Curvature { h2, k, k_perp, area: a11 * a22 })
}

/// Planarity and minimality near one puncture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndReport {
    pub point: ChartPoint,
    /// Relative plane-fit residual on the inner annulus `[3h, 6h]`.
    pub inner: f64,
    /// Same on the outer annulus `[6h, 12h]`.
    pub outer: f64,
    pub planar: bool,
    /// Largest `|H|` over both annuli.
    pub mean_curvature: f64,
    pub minimal: bool,
    pub status: String,
}

/// `|H|` below which an end counts as minimal.
pub const MINIMAL_TOL: f64 = 1e-3;

fn plane_residual(points: &[V4]) -> f64 {
    if points.len() < 3 {
        return f64::NAN;
    }
    let n = points.len() as f64;
    let mean: V4 = std::array::from_fn(|c| points.iter().map(|p| p[c]).sum::<f64>() / n);
    let m = nalgebra::DMatrix::from_fn(points.len(), 4, |i, c| points[i][c] - mean[c]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    if sv[0] == 0.0 {
        0.0
    } else {
        (sv[2] * sv[2] + sv[3] * sv[3]).sqrt() / sv[0]
    }
}

pub fn planar_end_check(map: &SurfaceMap) -> Vec<EndReport> {
    let g = &map.grid;
    let h = g.h();
    map.punctures
        .iter()
        .map(|p| {
            let c = if p.local().norm() <= 1.0 { p.chart } else { p.chart.other() };
            let z0 = local_in(p, c).expect("finite in its own chart");
            let ring = |lo: f64, hi: f64| -> Vec<usize> {
                (0..g.len())
                    .filter(|&k| {
                        let d = (g.local(k) - z0).norm();
                        d > lo * h && d <= hi * h && !map.excluded(c, k)
                    })
                    .collect()
            };
            let (a, b) = (ring(EXCLUSION_CELLS, 6.0), ring(6.0, 12.0));
            let pts = |ks: &[usize]| ks.iter().map(|&k| map.point(c, k)).filter(|q| q.iter().all(|x| x.is_finite())).collect::<Vec<_>>();
            let (inner, outer) = (plane_residual(&pts(&a)), plane_residual(&pts(&b)));
            let mean_curvature = a
                .iter()
                .chain(&b)
                .filter_map(|&k| curvature_at(map, c, k))
                .map(|cv| cv.h2.max(0.0).sqrt())
                .fold(0.0, f64::max);
            let planar = inner < 1e-10 || inner < outer;
            let minimal = mean_curvature < MINIMAL_TOL;
            let status = match (planar, minimal) {
                (true, true) => "minimal, planar end",
                (false, true) => "minimal, end not planar",
                _ => "not minimal, Willmore only",
            };
            EndReport { point: *p, inner, outer, planar, mean_curvature, minimal, status: status.into() }
        })
        .collect()
}

/// Viewing projection R⁴ → R³.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Projection {
    /// Drop the last coordinate.
    #[default]
    Orthogonal,
    /// `(x, y, z) / (1 − w)`, the stereographic projection of the unit 3-sphere.
    Stereographic,
}

/// Samples that become mesh vertices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshDomain {
    /// Owned samples of both charts.
    #[default]
    Owned,
    /// Every sample of chart A.
    #[serde(rename = "chart_a")]
    ChartA,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshOptions {
    pub projection: Projection,
    pub domain: MeshDomain,
    /// Append the fourth coordinate to every vertex line.
    pub bake_w: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshStats {
    pub vertices: usize,
    pub triangles: usize,
    pub excluded: usize,
}

fn project(p: &V4, proj: Projection) -> Option<[f64; 3]> {
    let out = match proj {
        Projection::Orthogonal => [p[0], p[1], p[2]],
        Projection::Stereographic => {
            let d = 1.0 - p[3];
            [p[0] / d, p[1] / d, p[2] / d]
        }
    };
    out.iter().all(|x| x.is_finite()).then_some(out)
}

/// Write an OBJ mesh: vertices in chart then row-major order, then faces.
pub fn write_mesh(map: &SurfaceMap, opts: MeshOptions, w: &mut impl Write) -> Result<MeshStats> {
    let g = &map.grid;
    let charts: &[Chart] = match opts.domain {
        MeshDomain::Owned => &Chart::BOTH,
        MeshDomain::ChartA => &[Chart::A],
    };
    let mut ids: Vec<Vec<Option<usize>>> = Vec::new();
    let mut next = 1;
    let mut excluded = 0;
    writeln!(w, "# frenet surface mesh, grid {}", g.n)?;
    for &c in charts {
        let mut chart_ids = vec![None; g.len()];
        for (k, slot) in chart_ids.iter_mut().enumerate() {
            if opts.domain == MeshDomain::Owned && !g.owned(c, k) {
                continue;
            }
            if map.excluded(c, k) {
                excluded += 1;
                continue;
            }
            let p = map.point(c, k);
            let Some(v) = project(&p, opts.projection) else {
                excluded += 1;
                continue;
            };
            if opts.bake_w {
                writeln!(w, "v {:.16e} {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2], p[3])?;
            } else {
                writeln!(w, "v {:.16e} {:.16e} {:.16e}", v[0], v[1], v[2])?;
            }
            *slot = Some(next);
            next += 1;
        }
        ids.push(chart_ids);
    }
    let mut triangles = 0;
    for chart_ids in &ids {
        for j in 0..g.n - 1 {
            for i in 0..g.n - 1 {
                let q = [g.index(i, j), g.index(i + 1, j), g.index(i + 1, j + 1), g.index(i, j + 1)].map(|k| chart_ids[k]);
                if let [Some(a), Some(b), Some(c), Some(d)] = q {
                    writeln!(w, "f {a} {b} {c}\nf {a} {c} {d}")?;
                    triangles += 2;
                }
            }
        }
    }
    Ok(MeshStats { vertices: next - 1, triangles, excluded })
}

pub fn export_mesh(map: &SurfaceMap, opts: MeshOptions, path: &Path) -> Result<MeshStats> {
    let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
    let stats = write_mesh(map, opts, &mut w)?;
    w.flush()?;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::twistor_project;
    use crate::rational::RationalCurve;
    use num_complex::Complex64;

    /// `f = [1 : z]`, the twistor projection of `(1, z, 0, 0)`.
    fn line_field(n: usize) -> CurveField {
        let h = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        twistor_project(&h, ChartGrid::new(n)).unwrap()
    }

    fn mesh_counts(map: &SurfaceMap, domain: MeshDomain) -> (usize, usize, MeshStats) {
        let mut buf = Vec::new();
        let stats = write_mesh(map, MeshOptions { domain, ..Default::default() }, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let count = |p: &str| text.lines().filter(|l| l.starts_with(p)).count();
        (count("v "), count("f "), stats)
    }

    #[test]
    fn pole_at_second_basis_vector_gives_the_plane() {
        let f = line_field(32);
        let map = stereographic(&f, &HVector::basis(2, 1)).unwrap();
        for k in 0..f.grid.len() {
            let z = f.grid.local(k);
            let p = map.point(Chart::A, k);
            let want = [z.re, z.im, 0.0, 0.0];
            assert!(p.iter().zip(want).all(|(a, b)| (a - b).abs() < 1e-12), "{p:?} vs {want:?}");
        }
        // the only puncture is z = ∞
        assert_eq!(map.punctures.len(), 1);
        assert!(map.punctures[0].chordal_distance(&ChartPoint::b(Complex64::new(0.0, 0.0))) < 1e-9);
    }

    #[test]
    fn pole_at_first_basis_vector_gives_an_inversion_with_a_planar_end() {
        let f = line_field(64);
        let map = stereographic(&f, &HVector::basis(2, 0)).unwrap();
        assert_eq!(map.punctures.len(), 1);
        assert!(map.punctures[0].chordal_distance(&ChartPoint::a(Complex64::new(0.0, 0.0))) < 1e-9);
        let k = f.grid.nearest(Complex64::new(0.5, 0.25));
        let w = f.grid.local(k).inv();
        let p = map.point(Chart::A, k);
        assert!((p[0] - w.re).abs() < 1e-12 && (p[1] - w.im).abs() < 1e-12 && p[2].abs() < 1e-12);
        let ends = planar_end_check(&map);
        assert_eq!(ends.len(), 1);
        assert!(ends[0].inner < 1e-10, "{:?}", ends[0]);
        assert!(ends[0].minimal && ends[0].planar);
        assert_eq!(ends[0].status, "minimal, planar end");
    }

    #[test]
    fn constant_curve_at_the_pole_is_rejected() {
        let f = line_field(16);
        let pole = f.psi(Chart::A, 0);
        let pin = |c| {
            f.samples(c)
                .into_iter()
                .map(|mut s| {
                    s.psi = pole.clone();
                    s
                })
                .collect()
        };
        let stuck = CurveField::from_samples(1, f.grid.clone(), f.provenance, [pin(Chart::A), pin(Chart::B)], serde_json::Value::Null);
        assert!(matches!(stereographic(&stuck, &pole), Err(Error::PoleEverywhere)));
    }

    #[test]
    fn flat_patch_mesh_has_two_triangles_per_cell() {
        let g = ChartGrid::new(24);
        let map = SurfaceMap::from_fn(g.clone(), |p| {
            let z = p.local();
            [z.re, z.im, 0.0, 0.0]
        });
        let (v, f, stats) = mesh_counts(&map, MeshDomain::ChartA);
        assert_eq!(v, 24 * 24);
        assert_eq!(f, 2 * 23 * 23);
        assert_eq!(stats.triangles, f);
        assert_eq!(stats.excluded, 0);
    }

    #[test]
    fn punctured_mesh_drops_exactly_the_excluded_samples() {
        let f = line_field(32);
        let map = stereographic(&f, &HVector::basis(2, 0)).unwrap();
        let excluded = (0..f.grid.len()).filter(|&k| map.excluded(Chart::A, k)).count();
        assert!(excluded > 0);
        let (v, _, stats) = mesh_counts(&map, MeshDomain::ChartA);
        assert_eq!(v, f.grid.len() - excluded);
        assert_eq!(stats.excluded, excluded);
    }

    #[test]
    fn mesh_output_is_deterministic() {
        let f = line_field(32);
        let map = stereographic(&f, &HVector::basis(2, 0)).unwrap();
        let write = || {
            let mut buf = Vec::new();
            write_mesh(&map, MeshOptions { bake_w: true, ..Default::default() }, &mut buf).unwrap();
            buf
        };
        assert_eq!(write(), write());
    }

    #[test]
    fn pole_text() {
        assert_eq!("auto".parse::<Pole>().unwrap(), Pole::Auto);
        assert_eq!("17".parse::<Pole>().unwrap(), Pole::Index(17));
        assert!("north".parse::<Pole>().is_err());
    }
}
