//! Quaternions and the right H-module `H^m`.
//!
//! Vectors carry the quaternionic scalar action on the right, matrices act
//! from the left; a quaternion matrix is therefore exactly a right-linear
//! endomorphism. The Hermitian form conjugates its left argument.

use std::fmt;
use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub const fn real(w: f64) -> Self {
        Quaternion::new(w, 0.0, 0.0, 0.0)
    }

    /// The complex number `c` as an element of `span{1, i}`.
    pub fn from_complex(c: Complex64) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Quaternion::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.w, -self.x, -self.y, -self.z)
    }

    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Multiplicative inverse; infinite components for zero.
    pub fn inv(self) -> Self {
        self.conj() * (1.0 / self.norm_sqr())
    }

    /// Imaginary part `xi + yj + zk`.
    pub fn im(self) -> Self {
        Quaternion::new(0.0, self.x, self.y, self.z)
    }

    /// Left-multiplication `p ↦ self·p` as a real 4×4 matrix.
    pub fn left_matrix(self) -> [[f64; 4]; 4] {
        let Quaternion { w, x, y, z } = self;
        [
            [w, -x, -y, -z],
            [x, w, -z, y],
            [y, z, w, -x],
            [z, -y, x, w],
        ]
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, o: Quaternion) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, o: Quaternion) -> Quaternion {
        Quaternion::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl SubAssign for Quaternion {
    fn sub_assign(&mut self, o: Quaternion) {
        *self = *self - o;
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.w, -self.x, -self.y, -self.z)
    }
}

/// Hamilton product.
impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, o: Quaternion) -> Quaternion {
        let (a1, b1, c1, d1) = (self.w, self.x, self.y, self.z);
        let (a2, b2, c2, d2) = (o.w, o.x, o.y, o.z);
        Quaternion::new(
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, s: f64) -> Quaternion {
        Quaternion::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}i + {}j + {}k", self.w, self.x, self.y, self.z)
    }
}

pub fn quat_mul(a: Quaternion, b: Quaternion) -> Quaternion {
    a * b
}

/// An element of the right H-module `H^m`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct HVector(pub Vec<Quaternion>);

impl HVector {
    pub fn zeros(m: usize) -> Self {
        HVector(vec![Quaternion::ZERO; m])
    }

    /// Standard basis vector `e_i` (zero based).
    /// Components with independent standard normal coordinates.
    pub fn random<R: rand::Rng>(rng: &mut R, m: usize) -> Self {
        use rand_distr::StandardNormal;
        HVector(
            (0..m)
                .map(|_| Quaternion::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect(),
        )
    }

    pub fn basis(m: usize, i: usize) -> Self {
        let mut v = HVector::zeros(m);
        v.0[i] = Quaternion::ONE;
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Quaternion> {
        self.0.iter()
    }

    /// Right scalar action `v·q`.
    pub fn right_mul(&self, q: Quaternion) -> HVector {
        HVector(self.0.iter().map(|&a| a * q).collect())
    }

    pub fn scale(&self, s: f64) -> HVector {
        HVector(self.0.iter().map(|&a| a * s).collect())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|q| q.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> HVector {
        self.scale(1.0 / self.norm())
    }

    /// `Σ conj(self_i)·other_i`. Panics on length mismatch; see [`hermitian`]
    /// for the checked form.
    pub fn dot(&self, other: &HVector) -> Quaternion {
        assert_eq!(self.len(), other.len(), "HVector length mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a.conj() * b)
    }

    /// Apply `self` as a row covector: `Σ self_i·v_i`.
    pub fn pair(&self, v: &HVector) -> Quaternion {
        assert_eq!(self.len(), v.len(), "HVector length mismatch");
        self.0
            .iter()
            .zip(&v.0)
            .fold(Quaternion::ZERO, |acc, (&a, &b)| acc + a * b)
    }

    /// Left multiplication of every entry, used for covectors `q·β`.
    pub fn left_mul(&self, q: Quaternion) -> HVector {
        HVector(self.0.iter().map(|&a| q * a).collect())
    }

    pub fn to_real(&self) -> DVector<f64> {
        DVector::from_iterator(4 * self.len(), self.0.iter().flat_map(|q| q.to_array()))
    }

    pub fn from_real(v: &[f64]) -> HVector {
        HVector(
            v.chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        )
    }

    pub fn reals(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().flat_map(|q| q.to_array())
    }
}

impl Index<usize> for HVector {
    type Output = Quaternion;
    fn index(&self, i: usize) -> &Quaternion {
        &self.0[i]
    }
}

impl IndexMut<usize> for HVector {
    fn index_mut(&mut self, i: usize) -> &mut Quaternion {
        &mut self.0[i]
    }
}

impl Add for &HVector {
    type Output = HVector;
    fn add(self, o: &HVector) -> HVector {
        assert_eq!(self.len(), o.len());
        HVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a + b).collect())
    }
}

impl Sub for &HVector {
    type Output = HVector;
    fn sub(self, o: &HVector) -> HVector {
        assert_eq!(self.len(), o.len());
        HVector(self.0.iter().zip(&o.0).map(|(&a, &b)| a - b).collect())
    }
}

/// Checked Hermitian form `Σ conj(a_i)·b_i`.
pub fn hermitian(a: &HVector, b: &HVector) -> Result<Quaternion> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(a.dot(b))
}

/// Orthogonal projection of `v` onto the span of the orthonormal list `basis`.
pub fn project_onto(basis: &[HVector], v: &HVector) -> HVector {
    let mut out = HVector::zeros(v.len());
    for e in basis {
        let c = e.dot(v);
        for (o, &ei) in out.0.iter_mut().zip(&e.0) {
            *o += ei * c;
        }
    }
    out
}

pub const DEFAULT_RANK_TOL: f64 = 1e-9;

/// Gram–Schmidt over H. `tol` is relative to the largest input norm.
///
/// Returns an orthonormal basis of the quaternionic span and its rank.
pub fn right_span(vectors: &[HVector], tol: f64) -> (Vec<HVector>, usize) {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut basis: Vec<HVector> = Vec::new();
    if scale == 0.0 {
        return (basis, 0);
    }
    for v in vectors {
        let mut r = v.clone();
        // two passes keep the basis orthogonal to working precision
        for _ in 0..2 {
            let p = project_onto(&basis, &r);
            r = &r - &p;
        }
        let nr = r.norm();
        if nr > tol * scale {
            basis.push(r.scale(1.0 / nr));
        }
    }
    let rank = basis.len();
    (basis, rank)
}

/// Quaternion matrix acting on column vectors from the left.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Quaternion>,
}

impl HMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        HMatrix {
            rows,
            cols,
            data: vec![Quaternion::ZERO; rows * cols],
        }
    }

    pub fn identity(m: usize) -> Self {
        HMatrix::scalar(m, Quaternion::ONE)
    }

    /// `q·Id`; note that this is right-linear only because it multiplies from the left.
    pub fn scalar(m: usize, q: Quaternion) -> Self {
        let mut a = HMatrix::zeros(m, m);
        for i in 0..m {
            a[(i, i)] = q;
        }
        a
    }

    pub fn from_columns(cols: &[HVector]) -> Self {
        let rows = cols.first().map_or(0, |c| c.len());
        let mut a = HMatrix::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows);
            for i in 0..rows {
                a[(i, j)] = c[i];
            }
        }
        a
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<Quaternion>) -> Self {
        assert_eq!(data.len(), rows * cols);
        HMatrix { rows, cols, data }
    }

    /// `col·row`, the rank-one map `v ↦ col·(row·v)`.
    pub fn outer(col: &HVector, row: &HVector) -> Self {
        let mut a = HMatrix::zeros(col.len(), row.len());
        for i in 0..col.len() {
            for j in 0..row.len() {
                a[(i, j)] = col[i] * row[j];
            }
        }
        a
    }

    /// Orthogonal projector `Σ e e*` onto the span of an orthonormal list.
    pub fn projector(basis: &[HVector], m: usize) -> Self {
        let mut p = HMatrix::zeros(m, m);
        for e in basis {
            for i in 0..m {
                for j in 0..m {
                    p[(i, j)] += e[i] * e[j].conj();
                }
            }
        }
        p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Quaternion] {
        &self.data
    }

    pub fn column(&self, j: usize) -> HVector {
        HVector((0..self.rows).map(|i| self[(i, j)]).collect())
    }

    pub fn row(&self, i: usize) -> HVector {
        HVector(self.data[i * self.cols..(i + 1) * self.cols].to_vec())
    }

    pub fn apply(&self, v: &HVector) -> HVector {
        assert_eq!(self.cols, v.len());
        HVector(
            (0..self.rows)
                .map(|i| {
                    (0..self.cols).fold(Quaternion::ZERO, |acc, j| acc + self[(i, j)] * v[j])
                })
                .collect(),
        )
    }

    /// Row covector times matrix.
    pub fn pull_row(&self, row: &HVector) -> HVector {
        assert_eq!(self.rows, row.len());
        HVector(
            (0..self.cols)
                .map(|j| (0..self.rows).fold(Quaternion::ZERO, |acc, i| acc + row[i] * self[(i, j)]))
                .collect(),
        )
    }

    pub fn adjoint(&self) -> HMatrix {
        let mut a = HMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                a[(j, i)] = self[(i, j)].conj();
            }
        }
        a
    }

    pub fn scale(&self, s: f64) -> HMatrix {
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&q| q * s).collect(),
        }
    }

    pub fn left_scale(&self, q: Quaternion) -> HMatrix {
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| q * a).collect(),
        }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.data.iter().map(|q| q.norm_sqr()).sum()
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Quarter of the real trace, i.e. `Σ Re a_ii`.
    pub fn quarter_real_trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)].w).sum()
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        let mut r = DMatrix::zeros(4 * self.rows, 4 * self.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let b = self[(i, j)].left_matrix();
                for (a, row) in b.iter().enumerate() {
                    for (c, &val) in row.iter().enumerate() {
                        r[(4 * i + a, 4 * j + c)] = val;
                    }
                }
            }
        }
        r
    }

    /// Reads the quaternion entries of a right-linear real matrix from the
    /// first column of each 4×4 block.
    pub fn from_real(r: &DMatrix<f64>) -> HMatrix {
        assert!(r.nrows() % 4 == 0 && r.ncols() % 4 == 0);
        let (rows, cols) = (r.nrows() / 4, r.ncols() / 4);
        let mut a = HMatrix::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                a[(i, j)] = Quaternion::new(
                    r[(4 * i, 4 * j)],
                    r[(4 * i + 1, 4 * j)],
                    r[(4 * i + 2, 4 * j)],
                    r[(4 * i + 3, 4 * j)],
                );
            }
        }
        a
    }

    pub fn inverse(&self) -> Option<HMatrix> {
        assert_eq!(self.rows, self.cols);
        self.to_real().try_inverse().map(|r| HMatrix::from_real(&r))
    }

    /// Smallest singular value of the real representation.
    pub fn min_singular_value(&self) -> f64 {
        let sv = self.to_real().singular_values();
        sv.iter().cloned().fold(f64::INFINITY, f64::min)
    }

    pub fn reals(&self) -> impl Iterator<Item = f64> + '_ {
        self.data.iter().flat_map(|q| q.to_array())
    }

    pub fn from_reals(rows: usize, cols: usize, v: &[f64]) -> HMatrix {
        assert_eq!(v.len(), 4 * rows * cols);
        HMatrix {
            rows,
            cols,
            data: v
                .chunks_exact(4)
                .map(|c| Quaternion::new(c[0], c[1], c[2], c[3]))
                .collect(),
        }
    }
}

impl Index<(usize, usize)> for HMatrix {
    type Output = Quaternion;
    fn index(&self, (i, j): (usize, usize)) -> &Quaternion {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for HMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Quaternion {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &HMatrix {
    type Output = HMatrix;
    fn mul(self, o: &HMatrix) -> HMatrix {
        assert_eq!(self.cols, o.rows);
        let mut a = HMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let s = self[(i, k)];
                for j in 0..o.cols {
                    a.data[i * o.cols + j] += s * o[(k, j)];
                }
            }
        }
        a
    }
}

impl Add for &HMatrix {
    type Output = HMatrix;
    fn add(self, o: &HMatrix) -> HMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl Sub for &HMatrix {
    type Output = HMatrix;
    fn sub(self, o: &HMatrix) -> HMatrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        HMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&o.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Result of [`solve_endomorphism`].
#[derive(Clone, Debug)]
pub struct Endomorphism {
    pub matrix: HMatrix,
    /// `max ‖M u − v‖` over the prescribed pairs.
    pub residual: f64,
}

/// Find the right-linear map `M` with `M u = v` for every pair.
///
/// The `u`s must quaternionically span `H^m`. A square, invertible family is
/// solved directly as `V U⁻¹`; otherwise the real least-squares problem
/// `R(M) R(U) = R(V)` is solved by pseudo-inverse. `tol` bounds the accepted
/// residual relative to the largest `|v|`.
pub fn solve_endomorphism(pairs: &[(HVector, HVector)], tol: f64) -> Result<Endomorphism> {
    let m = pairs.first().map_or(0, |p| p.0.len());
    if m == 0 {
        return Err(Error::Underdetermined { rank: 0, needed: 0 });
    }
    let us: Vec<HVector> = pairs.iter().map(|p| p.0.clone()).collect();
    let vs: Vec<HVector> = pairs.iter().map(|p| p.1.clone()).collect();
    for v in us.iter().chain(&vs) {
        if v.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: v.len(),
            });
        }
    }
    let u = HMatrix::from_columns(&us);
    let v = HMatrix::from_columns(&vs);
    let matrix = if pairs.len() == m {
        match u.inverse() {
            Some(ui) => &v * &ui,
            None => {
                let (_, rank) = right_span(&us, DEFAULT_RANK_TOL);
                return Err(Error::Underdetermined { rank, needed: m });
            }
        }
    } else {
        let ru = u.to_real();
        let svd = ru.clone().svd(true, true);
        let smax = svd.singular_values.max();
        let rank = svd
            .singular_values
            .iter()
            .filter(|&&s| s > DEFAULT_RANK_TOL * smax)
            .count();
        if rank < 4 * m {
            return Err(Error::Underdetermined {
                rank: rank / 4,
                needed: m,
            });
        }
        let pinv = svd
            .pseudo_inverse(DEFAULT_RANK_TOL * smax)
            .map_err(|e| Error::Numerical(e.to_string()))?;
        HMatrix::from_real(&(v.to_real() * pinv))
    };
    let scale = vs.iter().map(|x| x.norm()).fold(1e-300, f64::max);
    let residual = us
        .iter()
        .zip(&vs)
        .map(|(a, b)| (&matrix.apply(a) - b).norm())
        .fold(0.0, f64::max);
    if residual > tol * scale.max(1.0) {
        return Err(Error::Inconsistent { residual });
    }
    Ok(Endomorphism { matrix, residual })
}

/// `ι(z_1,…,z_{2m}) = (z_1 + j z_{m+1}, …, z_m + j z_{2m})`.
pub fn lift_complex(v: &[Complex64]) -> HVector {
    assert!(v.len() % 2 == 0, "complex vector must have even length");
    let m = v.len() / 2;
    HVector(
        (0..m)
            .map(|a| {
                let (za, zb) = (v[a], v[a + m]);
                // j(c + di) = cj − dk
                Quaternion::new(za.re, za.im, zb.re, -zb.im)
            })
            .collect(),
    )
}

/// Inverse of [`lift_complex`].
pub fn complex_coords(v: &HVector) -> Vec<Complex64> {
    let m = v.len();
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * m];
    for (a, q) in v.iter().enumerate() {
        out[a] = Complex64::new(q.w, q.x);
        out[a + m] = Complex64::new(q.y, -q.z);
    }
    out
}

/// The antiholomorphic involution with `ι(v)·j = ι(σ(v))`.
pub fn sigma(v: &[Complex64]) -> Vec<Complex64> {
    complex_coords(&lift_complex(v).right_mul(Quaternion::J))
}


#[cfg(test)]
mod tests {
    use super::testing::*;
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Quaternion, b: Quaternion, tol: f64) -> bool {
        (a - b).norm() < tol
    }

    #[test]
    fn defining_relations() {
        let (i, j, k) = (Quaternion::I, Quaternion::J, Quaternion::K);
        assert_eq!(i * j, k);
        assert_eq!(j * k, i);
        assert_eq!(k * i, j);
        for q in [i, j, k] {
            assert_eq!(q * q, -Quaternion::ONE);
        }
        let q = Quaternion::new(0.3, -1.0, 2.0, 0.5);
        assert_eq!(quat_mul(Quaternion::ONE, q), q);
        assert_eq!(
            (Quaternion::ONE + i) * (Quaternion::ONE + j),
            Quaternion::new(1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn left_matrix_matches_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (a, b) = (random_quaternion(&mut rng), random_quaternion(&mut rng));
        let m = a.left_matrix();
        let bv = b.to_array();
        let mut out = [0.0; 4];
        for r in 0..4 {
            out[r] = (0..4).map(|c| m[r][c] * bv[c]).sum();
        }
        assert!(close(Quaternion::from_array(out), a * b, 1e-14));
    }

    #[test]
    fn hermitian_examples() {
        let e1 = HVector::basis(2, 0);
        let e2 = HVector::basis(2, 1);
        assert_eq!(hermitian(&e1, &e1).unwrap(), Quaternion::ONE);
        assert_eq!(hermitian(&e1, &e2).unwrap(), Quaternion::ZERO);
        assert_eq!(
            hermitian(&e1.right_mul(Quaternion::J), &e1).unwrap(),
            -Quaternion::J
        );
        assert!(hermitian(&e1, &HVector::basis(3, 0)).is_err());
    }

    #[test]
    fn hermitian_is_sesquilinear() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_hvector(&mut rng, 3);
        let b = random_hvector(&mut rng, 3);
        let q = random_quaternion(&mut rng);
        let lhs = a.right_mul(q).dot(&b);
        let rhs = q.conj() * a.dot(&b);
        assert!(close(lhs, rhs, 1e-12));
        assert!(close(a.dot(&b.right_mul(q)), a.dot(&b) * q, 1e-12));
    }

    #[test]
    fn right_span_examples() {
        let e1 = HVector::basis(3, 0);
        let (_, r) = right_span(&[e1.clone(), e1.right_mul(Quaternion::I)], DEFAULT_RANK_TOL);
        assert_eq!(r, 1);
        let (_, r) = right_span(&[e1, HVector::basis(3, 1)], DEFAULT_RANK_TOL);
        assert_eq!(r, 2);
        let (b, r) = right_span(&[], DEFAULT_RANK_TOL);
        assert!(b.is_empty() && r == 0);
    }

    #[test]
    fn right_span_random_matches_real_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let vs: Vec<HVector> = (0..5).map(|_| random_hvector(&mut rng, 3)).collect();
        // oracle: real rank of the 12×20 matrix of real coordinates of the
        // vectors and their right multiples by i, j, k, divided by four
        let mut cols = Vec::new();
        for v in &vs {
            for q in [Quaternion::ONE, Quaternion::I, Quaternion::J, Quaternion::K] {
                cols.push(v.right_mul(q).to_real());
            }
        }
        let m = DMatrix::from_columns(&cols);
        let sv = m.singular_values();
        let real_rank = sv.iter().filter(|&&s| s > 1e-9 * sv.max()).count();
        assert_eq!(real_rank, 12);
        let (_, rank) = right_span(&vs, DEFAULT_RANK_TOL);
        assert_eq!(rank, real_rank / 4);
    }

    #[test]
    fn solve_endomorphism_examples() {
        // n = 0: e ↦ e·i forces left multiplication by i; the second pair is redundant
        let e = HVector::basis(1, 0);
        let pairs = vec![
            (e.clone(), e.right_mul(Quaternion::I)),
            (
                e.right_mul(Quaternion::J),
                e.right_mul(Quaternion::I * Quaternion::J),
            ),
        ];
        let s = solve_endomorphism(&pairs, 1e-10).unwrap().matrix;
        let s2 = &s * &s;
        assert!((&s2 + &HMatrix::identity(1)).norm() < 1e-12);

        let id: Vec<_> = (0..3).map(|i| (HVector::basis(3, i), HVector::basis(3, i))).collect();
        let m = solve_endomorphism(&id, 1e-10).unwrap().matrix;
        assert!((&m - &HMatrix::identity(3)).norm() < 1e-14);

        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs: Vec<_> = (0..3)
            .map(|_| (random_hvector(&mut rng, 3), random_hvector(&mut rng, 3)))
            .collect();
        let sol = solve_endomorphism(&pairs, 1e-10).unwrap();
        assert!(sol.residual < 1e-12);
    }

    #[test]
    fn solve_endomorphism_errors() {
        let e = HVector::basis(2, 0);
        let pairs = vec![(e.clone(), e.clone()), (e.right_mul(Quaternion::I), e.clone())];
        assert!(matches!(
            solve_endomorphism(&pairs, 1e-10),
            Err(Error::Underdetermined { .. })
        ));
        // inconsistent: same u twice with different images
        let e2 = HVector::basis(2, 1);
        let pairs = vec![(e.clone(), e.clone()), (e2.clone(), e2.clone()), (e.clone(), e2)];
        assert!(matches!(
            solve_endomorphism(&pairs, 1e-10),
            Err(Error::Inconsistent { .. })
        ));
    }

    #[test]
    fn lift_complex_examples() {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let o = c(0.0, 0.0);
        assert_eq!(
            lift_complex(&[c(1.0, 0.0), o, o, o]),
            HVector(vec![Quaternion::ONE, Quaternion::ZERO])
        );
        assert_eq!(
            lift_complex(&[o, o, c(1.0, 0.0), o]),
            HVector(vec![Quaternion::J, Quaternion::ZERO])
        );
        let z = c(0.3, -0.7);
        assert_eq!(
            lift_complex(&[c(1.0, 0.0), z, o, o]),
            HVector(vec![Quaternion::ONE, Quaternion::from_complex(z)])
        );
    }

    fn arb_quat() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-3.0f64..3.0).prop_map(Quaternion::from_array)
    }

    fn arb_complex_vec(len: usize) -> impl Strategy<Value = Vec<Complex64>> {
        prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), len)
            .prop_map(|v| v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect())
    }

    proptest! {
        #[test]
        fn norm_is_multiplicative(a in arb_quat(), b in arb_quat()) {
            prop_assert!(((a * b).norm() - a.norm() * b.norm()).abs() < 1e-12 * (1.0 + a.norm() * b.norm()));
            prop_assert!(((a * b).conj() - b.conj() * a.conj()).norm() < 1e-12 * (1.0 + a.norm() * b.norm()));
        }

        #[test]
        fn right_action_is_associative(v in prop::collection::vec(arb_quat(), 3), q in arb_quat(), p in arb_quat()) {
            let v = HVector(v);
            let lhs = v.right_mul(q).right_mul(p);
            let rhs = v.right_mul(q * p);
            prop_assert!((&lhs - &rhs).norm() < 1e-10);
        }

        #[test]
        fn matrices_are_right_linear(entries in prop::collection::vec(arb_quat(), 9), v in prop::collection::vec(arb_quat(), 3), q in arb_quat()) {
            let m = HMatrix::from_rows(3, 3, entries);
            let v = HVector(v);
            let lhs = m.apply(&v.right_mul(q));
            let rhs = m.apply(&v).right_mul(q);
            prop_assert!((&lhs - &rhs).norm() < 1e-9);
        }

        #[test]
        fn lift_intertwines_complex_structure(v in arb_complex_vec(4), re in -2.0f64..2.0, im in -2.0f64..2.0) {
            let lam = Complex64::new(re, im);
            let scaled: Vec<_> = v.iter().map(|&z| z * lam).collect();
            let lhs = lift_complex(&scaled);
            let rhs = lift_complex(&v).right_mul(Quaternion::from_complex(lam));
            prop_assert!((&lhs - &rhs).norm() < 1e-10);
            let back = complex_coords(&lift_complex(&v));
            prop_assert!(back.iter().zip(&v).all(|(a, b)| (a - b).norm() < 1e-14));
            // σ is an antiholomorphic involution up to sign: σ² = −1
            let ss = sigma(&sigma(&v));
            prop_assert!(ss.iter().zip(&v).all(|(a, b)| (a + b).norm() < 1e-12));
        }

        #[test]
        fn right_span_is_idempotent(vs in prop::collection::vec(prop::collection::vec(arb_quat(), 3), 1..5)) {
            let vs: Vec<HVector> = vs.into_iter().map(HVector).collect();
            let (b1, r1) = right_span(&vs, DEFAULT_RANK_TOL);
            let (b2, r2) = right_span(&b1, DEFAULT_RANK_TOL);
            prop_assert_eq!(r1, r2);
            for v in &b1 {
                let resid = (v - &project_onto(&b2, v)).norm();
                prop_assert!(resid < 1e-9);
            }
        }

        #[test]
        fn solved_maps_are_right_linear(us in prop::collection::vec(prop::collection::vec(arb_quat(), 2), 3), vs in prop::collection::vec(prop::collection::vec(arb_quat(), 2), 3)) {
            let pairs: Vec<_> = us.into_iter().map(HVector).zip(vs.into_iter().map(HVector)).collect();
            // overdetermined random constraints are generally inconsistent;
            // we only check right-linearity of whatever least-squares map comes out
            if let Ok(sol) = solve_endomorphism(&pairs, f64::INFINITY) {
                let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(9);
                for _ in 0..100 {
                    let v = random_hvector(&mut rng, 2);
                    let q = random_quaternion(&mut rng);
                    let d = &sol.matrix.apply(&v.right_mul(q)) - &sol.matrix.apply(&v).right_mul(q);
                    prop_assert!(d.norm() < 1e-10 * (1.0 + sol.matrix.norm() * v.norm() * q.norm()));
                }
            }
        }
    }
}
