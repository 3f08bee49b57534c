//! Rational curves `h: S² → CP^{2n+1}` with exact osculating flags.
//!
//! Osculating spaces are read from the Plücker coordinates of the wedge
//! `h ∧ h' ∧ … ∧ h^(k)` after dividing out the GCD of its minors, so the flag
//! extends through ramification points without taking limits.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Chart, ChartPoint};
use crate::poly::{cluster_roots, divide, gcd_many, Poly, GCD_GAP};
use crate::quaternion::sigma;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Relative size below which an osculating minor counts as identically zero.
const MINOR_EPS: f64 = 1e-10;

/// Threshold on `|det[W_n, σ W_n]|` flagging a quaternionic osculating space.
pub const LOCUS_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct RationalCurve {
    n: usize,
    coords: Vec<Poly>,
}

#[derive(Serialize, Deserialize)]
struct CurveFile {
    n: usize,
    coords: Vec<Vec<[f64; 2]>>,
}

impl RationalCurve {
    /// Builds a curve from `2n+2` coordinate polynomials, removing their content.
    pub fn new(coords: Vec<Poly>) -> Result<Self> {
        if coords.len() < 2 || coords.len() % 2 != 0 {
            return Err(Error::InvalidCurve(format!(
                "need an even number of coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().all(|p| p.trimmed(0.0).is_zero()) {
            return Err(Error::InvalidCurve("all coordinates vanish".into()));
        }
        let coords: Vec<Poly> = coords.iter().map(|p| p.trimmed(0.0)).collect();
        let g = gcd_many(&coords, GCD_GAP);
        let coords = if g.degree().unwrap_or(0) > 0 {
            coords.iter().map(|p| divide(p, &g).trimmed(1e-13)).collect()
        } else {
            coords
        };
        Ok(RationalCurve { n: coords.len() / 2 - 1, coords })
    }

    pub fn from_real(coords: &[&[f64]]) -> Result<Self> {
        RationalCurve::new(coords.iter().map(|c| Poly::from_real(c)).collect())
    }

    /// Quaternionic dimension `n` of the target `HP^n`.
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn degree(&self) -> usize {
        self.coords.iter().filter_map(|p| p.degree()).max().unwrap_or(0)
    }

    /// Coordinate polynomials in the given chart (`w^d h(1/w)` in chart B).
    pub fn chart_coords(&self, chart: Chart) -> Vec<Poly> {
        match chart {
            Chart::A => self.coords.clone(),
            Chart::B => {
                let d = self.degree();
                self.coords.iter().map(|p| p.reversed(d)).collect()
            }
        }
    }

    /// Unnormalized lift and its first derivative in chart coordinates.
    pub fn eval_with_derivative(&self, chart: Chart, t: Complex64) -> (Vec<Complex64>, Vec<Complex64>) {
        let cs = self.chart_coords(chart);
        let v = cs.iter().map(|p| p.eval(t)).collect();
        let dv = cs.iter().map(|p| p.derivative().eval(t)).collect();
        (v, dv)
    }

    /// Unit-norm representative of `h(p)`.
    pub fn evaluate(&self, p: &ChartPoint) -> Vec<Complex64> {
        let v: Vec<Complex64> = self.chart_coords(p.chart).iter().map(|c| c.eval(p.local())).collect();
        let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        assert!(norm > 0.0, "curve evaluates to zero after content removal");
        v.iter().map(|c| c / norm).collect()
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        RationalCurve::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CurveFile = serde_json::from_str(text)?;
        if f.coords.len() != 2 * f.n + 2 {
            return Err(Error::DimensionMismatch { expected: 2 * f.n + 2, found: f.coords.len() });
        }
        RationalCurve::new(
            f.coords
                .iter()
                .map(|c| Poly::new(c.iter().map(|&[re, im]| Complex64::new(re, im)).collect()))
                .collect(),
        )
    }

    pub fn to_json(&self) -> String {
        let f = CurveFile {
            n: self.n,
            coords: self
                .coords
                .iter()
                .map(|p| p.coeffs.iter().map(|c| [c.re, c.im]).collect())
                .collect(),
        };
        serde_json::to_string_pretty(&f).expect("curve serializes")
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    /// Minor data for every osculating level `0..=2n+1` in both charts.
    ///
    /// Levels whose minors vanish identically are kept as `None`, so a curve
    /// lying in a subspace is still usable below its degenerate level.
    pub fn osculating(&self) -> Osculating {
        let m = self.coords.len();
        let mut levels = [Vec::with_capacity(m), Vec::with_capacity(m)];
        for chart in Chart::BOTH {
            let cs = self.chart_coords(chart);
            let mut rows = vec![cs];
            for k in 0..m {
                if k > 0 {
                    let next = rows[k - 1].iter().map(|p| p.derivative()).collect();
                    rows.push(next);
                }
                levels[chart.index()].push(Level::new(&rows, k).ok());
            }
        }
        Osculating { m, levels }
    }

    /// Points where `W_n` contains a quaternionic line, i.e. `W_n ∩ W_n j ≠ 0`.
    pub fn quaternionic_locus(&self) -> Result<QuaternionicLocus> {
        let osc = self.osculating();
        osc.level(Chart::A, self.n)?;
        osc.level(Chart::B, self.n)?;
        let f = |p: &ChartPoint| osc.quaternionic_defect(self.n, p);
        let mut found: Vec<(ChartPoint, f64)> = Vec::new();
        let mut max_val: f64 = 0.0;
        let mut min_val = f64::INFINITY;
        const M: usize = 41;
        for chart in Chart::BOTH {
            let r = 1.05;
            let at = |i: usize| -r + 2.0 * r * i as f64 / (M - 1) as f64;
            let mut vals = vec![0.0; M * M];
            for j in 0..M {
                for i in 0..M {
                    let p = ChartPoint { chart, re: at(i), im: at(j) };
                    vals[j * M + i] = f(&p);
                }
            }
            let chart_max = vals.iter().copied().fold(0.0, f64::max);
            max_val = max_val.max(chart_max);
            if vals.iter().all(|&v| v < LOCUS_TOL) {
                continue;
            }
            for j in 0..M {
                for i in 0..M {
                    let v = vals[j * M + i];
                    let is_min = (j.saturating_sub(1)..=(j + 1).min(M - 1)).all(|jj| {
                        (i.saturating_sub(1)..=(i + 1).min(M - 1)).all(|ii| vals[jj * M + ii] >= v)
                    });
                    if !is_min || v > 0.1 * chart_max {
                        continue;
                    }
                    let start = ChartPoint { chart, re: at(i), im: at(j) };
                    let (p, val) = pattern_search(&f, start, 2.0 * r / (M - 1) as f64);
                    min_val = min_val.min(val);
                    if val < LOCUS_TOL {
                        let p = p.canonical();
                        if !found.iter().any(|(q, _)| q.chordal_distance(&p) < 1e-5) {
                            found.push((p, val));
                        }
                    }
                }
            }
        }
        Ok(QuaternionicLocus {
            everywhere: max_val < LOCUS_TOL,
            points: found.into_iter().map(|(p, _)| p).collect(),
            min_defect: min_val.min(max_val),
        })
    }
}

fn pattern_search(f: &impl Fn(&ChartPoint) -> f64, start: ChartPoint, step0: f64) -> (ChartPoint, f64) {
    let mut p = start;
    let mut v = f(&p);
    let mut step = step0;
    while step > 1e-13 && v > 0.0 {
        let mut moved = false;
        for (dx, dy) in [(1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0), (0.7, 0.7), (-0.7, -0.7), (0.7, -0.7), (-0.7, 0.7)] {
            let q = ChartPoint { chart: p.chart, re: p.re + dx * step, im: p.im + dy * step };
            let w = f(&q);
            if w < v {
                p = q;
                v = w;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (p, v)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QuaternionicLocus {
    pub points: Vec<ChartPoint>,
    /// `W_n` is quaternionic at every sampled point.
    pub everywhere: bool,
    pub min_defect: f64,
}

impl QuaternionicLocus {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty() && !self.everywhere
    }

    pub fn count(&self) -> usize {
        if self.everywhere {
            usize::MAX
        } else {
            self.points.len()
        }
    }
}

/// Minors of `h ∧ … ∧ h^(k)` in one chart.
#[derive(Clone, Debug)]
pub struct Level {
    pub k: usize,
    pub combos: Vec<Vec<usize>>,
    /// GCD of the raw minors (monic).
    pub gcd: Poly,
    /// Raw minors divided by `gcd`.
    pub deflated: Vec<Poly>,
}

fn combinations(m: usize, r: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, m: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, m, r, &mut Vec::new(), &mut out);
    out
}

/// Determinant polynomial of a square polynomial matrix, by evaluation at
/// roots of unity and inverse DFT.
fn det_poly(rows: &[Vec<&Poly>], bound: usize) -> Poly {
    let r = rows.len();
    let npts = bound + 1;
    let vals: Vec<Complex64> = (0..npts)
        .map(|j| {
            let z = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / npts as f64);
            let m = DMatrix::from_fn(r, r, |a, b| rows[a][b].eval(z));
            m.determinant()
        })
        .collect();
    let coeffs = (0..npts)
        .map(|c| {
            let s: Complex64 = vals
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    v * Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * c) as f64 / npts as f64)
                })
                .sum();
            s / npts as f64
        })
        .collect();
    Poly::new(coeffs)
}

impl Level {
    fn new(rows: &[Vec<Poly>], k: usize) -> Result<Level> {
        let m = rows[0].len();
        let combos = combinations(m, k + 1);
        let d = rows[0].iter().filter_map(|p| p.degree()).max().unwrap_or(0);
        let bound = (k + 1) * d;
        if rows[..=k].iter().any(|row| row.iter().all(|p| p.max_abs() == 0.0)) {
            return Err(Error::DegenerateCurve { level: k });
        }
        let scale: f64 = rows[..=k].iter().map(|row| row.iter().map(|p| p.max_abs()).sum::<f64>()).product();
        let mut minors: Vec<Poly> = combos
            .iter()
            .map(|c| {
                let sub: Vec<Vec<&Poly>> = (0..=k).map(|a| c.iter().map(|&b| &rows[a][b]).collect()).collect();
                det_poly(&sub, bound)
            })
            .collect();
        let top = minors.iter().map(|p| p.max_abs()).fold(0.0, f64::max);
        if top <= MINOR_EPS * scale {
            return Err(Error::DegenerateCurve { level: k });
        }
        for p in minors.iter_mut() {
            for c in p.coeffs.iter_mut() {
                if c.norm() < 1e-13 * top {
                    *c = C0;
                }
            }
            *p = p.trimmed(0.0);
        }
        let gcd = gcd_many(&minors, GCD_GAP);
        let deflated = if gcd.degree().unwrap_or(0) > 0 {
            minors.iter().map(|p| if p.is_zero() { Poly::zero() } else { divide(p, &gcd) }).collect()
        } else {
            let lead = gcd.coeffs[0];
            minors.iter().map(|p| p.scale(Complex64::new(1.0, 0.0) / lead)).collect()
        };
        Ok(Level { k, combos, gcd, deflated })
    }

    /// Orthonormal basis of the osculating space from the deflated Plücker vector.
    pub fn basis_at(&self, t: Complex64, m: usize) -> Vec<Vec<Complex64>> {
        let vals: Vec<Complex64> = self.deflated.iter().map(|p| p.eval(t)).collect();
        let i0 = (0..vals.len())
            .max_by(|&a, &b| vals[a].norm().total_cmp(&vals[b].norm()))
            .expect("nonempty");
        let base = &self.combos[i0];
        let lookup = |set: &[usize]| -> Complex64 {
            let mut s = set.to_vec();
            let mut sign = 1.0;
            // insertion sort tracking parity
            for a in 1..s.len() {
                let mut b = a;
                while b > 0 && s[b - 1] > s[b] {
                    s.swap(b - 1, b);
                    sign = -sign;
                    b -= 1;
                }
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return C0;
            }
            let idx = self.combos.iter().position(|c| *c == s).expect("combo");
            vals[idx] * sign
        };
        let rows: Vec<Vec<Complex64>> = (0..base.len())
            .map(|r| {
                (0..m)
                    .map(|j| {
                        let mut set = base.clone();
                        set[r] = j;
                        lookup(&set)
                    })
                    .collect()
            })
            .collect();
        complex_gram_schmidt(&rows)
    }
}

pub fn complex_gram_schmidt(vs: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    for v in vs {
        let mut u = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c: Complex64 = e.iter().zip(&u).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in u.iter_mut().zip(e) {
                    *x -= c * y;
                }
            }
        }
        let norm = u.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-12 {
            out.push(u.iter().map(|c| c / norm).collect());
        }
    }
    out
}

/// Osculating minor data for all levels of a curve.
#[derive(Clone, Debug)]
pub struct Osculating {
    m: usize,
    levels: [Vec<Option<Level>>; 2],
}

impl Osculating {
    pub fn level(&self, chart: Chart, k: usize) -> Result<&Level> {
        self.levels[chart.index()]
            .get(k)
            .and_then(|l| l.as_ref())
            .ok_or(Error::DegenerateCurve { level: k })
    }

    /// Highest level whose minors do not vanish identically.
    pub fn top_level(&self) -> usize {
        self.levels[0].iter().take_while(|l| l.is_some()).count().saturating_sub(1)
    }

    /// Orthonormal basis of `W_k` at `p`.
    pub fn space(&self, k: usize, p: &ChartPoint) -> Result<Vec<Vec<Complex64>>> {
        Ok(self.level(p.chart, k)?.basis_at(p.local(), self.m))
    }

    /// `|det[W_n, σ W_n]|` for orthonormal bases; zero exactly on the quaternionic locus.
    ///
    /// Panics if level `n` is degenerate.
    pub fn quaternionic_defect(&self, n: usize, p: &ChartPoint) -> f64 {
        let w = self.space(n, p).expect("nondegenerate level");
        let m = self.m;
        let mat = DMatrix::from_fn(m, m, |r, c| if c <= n { w[c][r] } else { sigma(&w[c - n - 1])[r] });
        mat.determinant().norm()
    }

    /// Vanishing order of the level-`k` wedge at `p` (0 away from ramification).
    pub fn wedge_order(&self, k: usize, p: &ChartPoint) -> Result<usize> {
        let g = &self.level(p.chart, k)?.gcd;
        if g.degree().unwrap_or(0) == 0 {
            return Ok(0);
        }
        let radius = 1e-4_f64.max(1e-4 * p.local().norm());
        Ok(g.roots().iter().filter(|r| (*r - p.local()).norm() < radius).count())
    }

    /// Total vanishing order of the level-`k` wedge over the sphere.
    pub fn total_order(&self, k: usize) -> Result<usize> {
        let finite = self.level(Chart::A, k)?.gcd.degree().unwrap_or(0);
        Ok(finite + self.level(Chart::B, k)?.gcd.order_at(C0, 1e-9))
    }

    /// Zeros of the level-`k` wedge as clustered sphere points with orders.
    pub fn wedge_zeros(&self, k: usize) -> Result<Vec<(ChartPoint, usize)>> {
        let mut out: Vec<(ChartPoint, usize)> = cluster_roots(&self.level(Chart::A, k)?.gcd.roots(), 1e-4)
            .into_iter()
            .map(|(z, mult)| (ChartPoint::a(z).canonical(), mult))
            .collect();
        let inf = self.level(Chart::B, k)?.gcd.order_at(C0, 1e-9);
        if inf > 0 {
            out.push((ChartPoint::b(C0), inf));
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn span_distance(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> f64 {
        // residual of projecting a's vectors onto span b
        a.iter()
            .map(|v| {
                let mut u = v.clone();
                for e in b {
                    let cc: Complex64 = e.iter().zip(v).map(|(x, y)| x.conj() * y).sum();
                    for (x, y) in u.iter_mut().zip(e) {
                        *x -= cc * y;
                    }
                }
                u.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn evaluate_examples() {
        let h = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        let v = h.evaluate(&ChartPoint::b(c(0.5)));
        let s = 1.0 / 1.25f64.sqrt();
        assert!((v[0] - c(0.5 * s)).norm() < 1e-15 && (v[1] - c(s)).norm() < 1e-15);
        let h2 = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0]]).unwrap();
        assert_eq!(h2.evaluate(&ChartPoint::a(c(0.0))), vec![c(1.0), c(0.0)]);
        let cubic = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]).unwrap();
        for x in cubic.evaluate(&ChartPoint::a(c(1.0))) {
            assert!((x - c(0.5)).norm() < 1e-15);
        }
    }

    #[test]
    fn content_is_removed() {
        // (z-1)·(1, z, z², z³)
        let f = Poly::from_real(&[-1.0, 1.0]);
        let base = [Poly::from_real(&[1.0]), Poly::monomial(1), Poly::monomial(2), Poly::monomial(3)];
        let h = RationalCurve::new(base.iter().map(|p| p.mul(&f)).collect()).unwrap();
        assert_eq!(h.degree(), 3);
    }

    #[test]
    fn charts_agree_on_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let coords: Vec<Poly> = (0..4)
            .map(|_| {
                Poly::new((0..4).map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect())
            })
            .collect();
        let h = RationalCurve::new(coords).unwrap();
        for t in 0..16 {
            let z = Complex64::from_polar(1.0 + 0.05 * (t % 3) as f64, t as f64 * 0.4);
            let a = h.evaluate(&ChartPoint::a(z));
            let b = h.evaluate(&ChartPoint::b(1.0 / z));
            let inner: Complex64 = a.iter().zip(&b).map(|(x, y)| x.conj() * y).sum();
            assert!((1.0 - inner.norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn osculating_rational_normal_curve() {
        let h = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]).unwrap();
        let osc = h.osculating();
        let w3 = osc.space(3, &ChartPoint::a(c(0.3))).unwrap();
        assert_eq!(w3.len(), 4);
        assert_eq!(osc.total_order(3).unwrap(), 0);
        for k in 0..4 {
            assert_eq!(osc.space(k, &ChartPoint::b(c(0.0))).unwrap().len(), k + 1);
        }
    }

    #[test]
    fn osculating_through_cusp() {
        let h = RationalCurve::from_real(&[&[1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0], &[0.0]]).unwrap();
        let osc = h.osculating();
        let w1 = osc.space(1, &ChartPoint::a(c(0.0))).unwrap();
        let e12 = vec![vec![c(1.0), c(0.0), c(0.0), c(0.0)], vec![c(0.0), c(1.0), c(0.0), c(0.0)]];
        assert!(span_distance(&w1, &e12) < 1e-12);
        // limit of tangent spans {h, h'} on a small circle
        let p = Poly::from_real;
        let cs = [p(&[1.0]), p(&[0.0, 0.0, 1.0]), p(&[0.0, 0.0, 0.0, 1.0]), p(&[0.0])];
        for i in 0..8 {
            let z = Complex64::from_polar(1e-3, i as f64 * 0.785);
            let v: Vec<_> = cs.iter().map(|q| q.eval(z)).collect();
            let dv: Vec<_> = cs.iter().map(|q| q.derivative().eval(z)).collect();
            let raw = complex_gram_schmidt(&[v, dv]);
            assert!(span_distance(&raw, &w1) < 1e-2);
        }
    }

    #[test]
    fn plucker_count_of_ramified_curve() {
        let h = RationalCurve::from_real(&[
            &[1.0],
            &[0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 1.0],
            &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let osc = h.osculating();
        // (m+1)(d−m) for m = 3, d = 5
        assert_eq!(osc.total_order(3).unwrap(), 8);
        assert!(osc.wedge_order(1, &ChartPoint::a(c(0.0))).unwrap() > 0);
    }

    #[test]
    fn degenerate_curve_rejected() {
        let h = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        let osc = h.osculating();
        assert_eq!(osc.top_level(), 1);
        assert!(matches!(osc.space(2, &ChartPoint::a(c(0.0))), Err(Error::DegenerateCurve { level: 2 })));
    }

    #[test]
    fn quaternionic_locus_examples() {
        let round = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0], &[0.0]]).unwrap();
        assert!(round.quaternionic_locus().unwrap().is_empty());
        let bad = RationalCurve::from_real(&[&[1.0], &[0.0], &[0.0, 1.0], &[0.0]]).unwrap();
        let loc = bad.quaternionic_locus().unwrap();
        assert!(loc.everywhere && !loc.is_empty());
        let cubic = RationalCurve::from_real(&[&[1.0], &[0.0, 1.0], &[0.0, 0.0, 1.0], &[0.0, 0.0, 0.0, 1.0]]).unwrap();
        let loc = cubic.quaternionic_locus().unwrap();
        assert!(loc.is_empty(), "{loc:?}");
    }

    #[test]
    fn curve_file_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let coords: Vec<Poly> = (0..6)
            .map(|_| Poly::new((0..5).map(|_| Complex64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))).collect()))
            .collect();
        let h = RationalCurve::new(coords).unwrap();
        let back = RationalCurve::from_json(&h.to_json()).unwrap();
        assert_eq!(h, back);
    }
}
