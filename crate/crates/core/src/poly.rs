//! Dense univariate polynomials over C and an approximate GCD.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Singular-value gap used to decide the degree of an approximate GCD.
pub const GCD_GAP: f64 = 1e-7;

/// Coefficients below this fraction of the largest one are treated as zero.
pub const COEFF_EPS: f64 = 1e-12;

const C0: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const C1: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Poly {
    pub coeffs: Vec<Complex64>,
}

impl Poly {
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly { coeffs: vec![C1] }
    }

    pub fn monomial(k: usize) -> Self {
        let mut c = vec![C0; k + 1];
        c[k] = C1;
        Poly { coeffs: c }
    }

    pub fn from_real(c: &[f64]) -> Self {
        Poly::new(c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == C0)
    }

    /// Degree ignoring exactly-zero trailing coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|c| *c != C0)
    }

    /// Drop trailing coefficients smaller than `rel * max|c|`.
    pub fn trimmed(&self, rel: f64) -> Poly {
        let m = self.max_abs();
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.norm() > rel * m)
            .map_or(0, |d| d + 1);
        Poly::new(self.coeffs[..keep].to_vec())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(C0, |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly::new(
            (0..n)
                .map(|k| {
                    self.coeffs.get(k).copied().unwrap_or(C0) + o.coeffs.get(k).copied().unwrap_or(C0)
                })
                .collect(),
        )
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-C1))
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.coeffs.is_empty() || o.coeffs.is_empty() {
            return Poly::zero();
        }
        let mut c = vec![C0; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in o.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    /// `w^d p(1/w)`: the same curve coordinate read in the chart at infinity.
    pub fn reversed(&self, d: usize) -> Poly {
        let mut c = vec![C0; d + 1];
        for (k, &a) in self.coeffs.iter().enumerate() {
            if a != C0 {
                assert!(k <= d, "degree exceeds reversal degree");
            }
            if k <= d {
                c[d - k] = a;
            }
        }
        Poly::new(c)
    }

    /// Coefficients of `t ↦ p(z0 + t)`.
    pub fn taylor_at(&self, z0: Complex64) -> Vec<Complex64> {
        let mut c = self.coeffs.clone();
        let n = c.len();
        for k in 0..n {
            for j in (k..n.saturating_sub(1)).rev() {
                let next = c[j + 1];
                c[j] += z0 * next;
            }
        }
        c
    }

    /// Vanishing order at `z0`, counting Taylor coefficients below `rel·max` as zero.
    pub fn order_at(&self, z0: Complex64, rel: f64) -> usize {
        let t = self.taylor_at(z0);
        let m = t.iter().map(|c| c.norm()).fold(0.0, f64::max);
        t.iter().position(|c| c.norm() > rel * m).unwrap_or(t.len())
    }

    /// Roots by Aberth–Ehrlich iteration. Multiple roots come back as clusters.
    pub fn roots(&self) -> Vec<Complex64> {
        let p = self.trimmed(COEFF_EPS);
        let Some(d) = p.degree() else { return vec![] };
        if d == 0 {
            return vec![];
        }
        let lead = p.coeffs[d];
        let monic = p.scale(C1 / lead);
        let dp = monic.derivative();
        // Cauchy bound for the initial circle
        let radius = 1.0 + monic.coeffs[..d].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let r0 = radius.min(1e3).max(0.5) * 0.5;
        let mut z: Vec<Complex64> = (0..d)
            .map(|k| Complex64::from_polar(r0, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / d as f64))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for k in 0..d {
                let pk = monic.eval(z[k]);
                if pk == C0 {
                    continue;
                }
                let ratio = pk / dp.eval(z[k]);
                let s: Complex64 = (0..d)
                    .filter(|&j| j != k)
                    .map(|j| C1 / (z[k] - z[j]))
                    .sum();
                let w = ratio / (C1 - ratio * s);
                if w.is_finite() {
                    z[k] -= w;
                    moved = moved.max(w.norm() / (1.0 + z[k].norm()));
                }
            }
            if moved < 1e-15 {
                break;
            }
        }
        z
    }
}

/// Clusters of nearby roots, returned as (mean, multiplicity).
pub fn cluster_roots(roots: &[Complex64], radius: f64) -> Vec<(Complex64, usize)> {
    let mut used = vec![false; roots.len()];
    let mut out = Vec::new();
    for i in 0..roots.len() {
        if used[i] {
            continue;
        }
        let mut members = vec![i];
        used[i] = true;
        // grow transitively so a spread-out multiple root stays together
        let mut k = 0;
        while k < members.len() {
            let c = roots[members[k]];
            for j in 0..roots.len() {
                if !used[j] && (roots[j] - c).norm() < radius {
                    used[j] = true;
                    members.push(j);
                }
            }
            k += 1;
        }
        let mean = members.iter().map(|&j| roots[j]).sum::<Complex64>() / members.len() as f64;
        out.push((mean, members.len()));
    }
    out
}

fn convolution_matrix(p: &Poly, cols: usize) -> DMatrix<Complex64> {
    let a = p.coeffs.len();
    let mut m = DMatrix::from_element(a + cols - 1, cols, C0);
    for j in 0..cols {
        for (i, &c) in p.coeffs.iter().enumerate() {
            m[(i + j, j)] = c;
        }
    }
    m
}

fn null_vector(m: DMatrix<Complex64>) -> Vec<Complex64> {
    let svd = m.svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &s)| if s < bv { (i, s) } else { (bi, bv) });
    vt.row(idx).iter().map(|c| c.conj()).collect()
}

/// Least-squares quotient `q` with `g·q ≈ p`.
pub fn divide(p: &Poly, g: &Poly) -> Poly {
    let p = p.trimmed(COEFF_EPS);
    let g = g.trimmed(COEFF_EPS);
    let (Some(dp), Some(dg)) = (p.degree(), g.degree()) else {
        return Poly::zero();
    };
    if dg > dp {
        return Poly::zero();
    }
    if dg == 0 {
        return p.scale(C1 / g.coeffs[0]);
    }
    let c = convolution_matrix(&g, dp - dg + 1);
    let rhs = nalgebra::DVector::from_column_slice(&p.coeffs);
    let svd = c.svd(true, true);
    let q = svd.solve(&rhs, 1e-14).expect("svd solve");
    Poly::new(q.iter().copied().collect())
}

/// Approximate GCD of two polynomials via the rank deficiency of their
/// Sylvester matrix. Returned monic.
pub fn approx_gcd(p: &Poly, q: &Poly, gap: f64) -> Poly {
    let p = p.trimmed(COEFF_EPS);
    let q = q.trimmed(COEFF_EPS);
    let (dp, dq) = match (p.degree(), q.degree()) {
        (None, None) => return Poly::zero(),
        (None, Some(_)) => return monic(&q),
        (Some(_), None) => return monic(&p),
        (Some(a), Some(b)) => (a, b),
    };
    if dp == 0 || dq == 0 {
        return Poly::one();
    }
    let pn = p.scale(Complex64::new(1.0 / p.max_abs(), 0.0));
    let qn = q.scale(Complex64::new(1.0 / q.max_abs(), 0.0));
    let n = dp + dq;
    let mut s = DMatrix::from_element(n, n, C0);
    for k in 0..dq {
        for (i, &c) in pn.coeffs.iter().enumerate() {
            s[(i + k, k)] = c;
        }
    }
    for k in 0..dp {
        for (i, &c) in qn.coeffs.iter().enumerate() {
            s[(i + k, dq + k)] = c;
        }
    }
    let sv = s.singular_values();
    let smax = sv.max();
    let k = sv.iter().filter(|&&x| x < gap * smax).count();
    if k == 0 {
        return Poly::one();
    }
    // reduced Sylvester matrix for degree k has a one-dimensional kernel (u, v)
    // with p·u + q·v = 0, so v is proportional to p / gcd
    let (cu, cv) = (dq - k + 1, dp - k + 1);
    let mut sk = DMatrix::from_element(n - k + 1, cu + cv, C0);
    for j in 0..cu {
        for (i, &c) in pn.coeffs.iter().enumerate() {
            sk[(i + j, j)] = c;
        }
    }
    for j in 0..cv {
        for (i, &c) in qn.coeffs.iter().enumerate() {
            sk[(i + j, cu + j)] = c;
        }
    }
    let nv = null_vector(sk);
    let cofactor = Poly::new(nv[cu..].to_vec());
    monic(&divide(&pn, &cofactor))
}

/// GCD of a family, skipping identically-zero members (relative to the family scale).
pub fn gcd_many(polys: &[Poly], gap: f64) -> Poly {
    let scale = polys.iter().map(|p| p.max_abs()).fold(0.0, f64::max);
    let mut g: Option<Poly> = None;
    for p in polys {
        if p.max_abs() <= COEFF_EPS * scale {
            continue;
        }
        g = Some(match g {
            None => monic(&p.trimmed(COEFF_EPS)),
            Some(g) => approx_gcd(&g, p, gap),
        });
        if g.as_ref().and_then(|g| g.degree()) == Some(0) {
            break;
        }
    }
    g.unwrap_or_else(Poly::zero)
}

fn monic(p: &Poly) -> Poly {
    let p = p.trimmed(COEFF_EPS);
    match p.degree() {
        None => p,
        Some(d) => p.scale(C1 / p.coeffs[d]),
    }
}
