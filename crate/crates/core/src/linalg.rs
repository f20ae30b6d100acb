//! Complex linear algebra on C^{2n+2} with the quaternionic structure.
//!
//! Coordinates are grouped in pairs (z_1, z_2), (z_3, z_4), ... and a pair
//! stands for the quaternion z_1 + z_2 j. Left multiplication by j acts as
//! `v -> J v̄` where `J` is block diagonal with blocks [[0, -1], [1, 0]].

use crate::error::{Error, Result};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

pub type C64 = Complex64;

/// A vector of homogeneous coordinates in C^{2n+2}.
pub type CVec = Vec<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

fn check_even(len: usize) -> Result<()> {
    if len < 2 || len % 2 != 0 {
        return Err(Error::OddLength(len));
    }
    Ok(())
}

/// Σ v_a conj(w_a).
pub fn herm_inner(v: &[C64], w: &[C64]) -> Result<C64> {
    if v.len() != w.len() {
        return Err(Error::LengthMismatch {
            left: v.len(),
            right: w.len(),
        });
    }
    Ok(inner(v, w))
}

/// Unchecked inner product; callers guarantee equal lengths.
pub(crate) fn inner(v: &[C64], w: &[C64]) -> C64 {
    v.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

pub fn norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

pub fn normalize(v: &[C64]) -> Result<CVec> {
    let n = norm(v);
    if n == 0.0 || !n.is_finite() {
        return Err(Error::ZeroVector);
    }
    Ok(v.iter().map(|a| a / n).collect())
}

/// The quaternionic structure `v -> J v̄`.
pub fn j_map(v: &[C64]) -> Result<CVec> {
    check_even(v.len())?;
    Ok(j_unchecked(v))
}

pub(crate) fn j_unchecked(v: &[C64]) -> CVec {
    let mut out = vec![ZERO; v.len()];
    for p in 0..v.len() / 2 {
        let (a, b) = (v[2 * p], v[2 * p + 1]);
        out[2 * p] = -b.conj();
        out[2 * p + 1] = a.conj();
    }
    out
}

pub(crate) fn axpy(y: &mut [C64], a: C64, x: &[C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += a * xi;
    }
}

pub(crate) fn sub(v: &[C64], w: &[C64]) -> CVec {
    v.iter().zip(w).map(|(a, b)| a - b).collect()
}

pub(crate) fn scale(v: &[C64], a: C64) -> CVec {
    v.iter().map(|x| x * a).collect()
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        CMat {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_cols(cols: &[&[C64]]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn diag(d: &[C64]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// `v w^*`.
    pub fn outer(v: &[C64], w: &[C64]) -> Self {
        let mut m = Self::zeros(v.len(), w.len());
        for i in 0..v.len() {
            for j in 0..w.len() {
                m[(i, j)] = v[i] * w[j].conj();
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn col(&self, j: usize) -> CVec {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let mut m = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(j, i)] = self[(i, j)];
            }
        }
        m
    }

    pub fn conj(&self) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &CMat) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let mut m = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    m.data[i * other.cols + j] += a * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn apply(&self, v: &[C64]) -> CVec {
        assert_eq!(self.cols, v.len(), "apply shape mismatch");
        (0..self.rows)
            .map(|i| inner_plain(&self.data[i * self.cols..(i + 1) * self.cols], v))
            .collect()
    }

    pub fn add(&self, other: &CMat) -> Self {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &CMat) -> Self {
        self.zip(other, |a, b| a - b)
    }

    pub fn scale(&self, a: C64) -> Self {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * a).collect(),
        }
    }

    fn zip(&self, other: &CMat, f: impl Fn(C64, C64) -> C64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    /// `[A, B] = AB - BA`.
    pub fn commutator(&self, other: &CMat) -> Self {
        self.matmul(other).sub(&other.matmul(self))
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn det2(&self) -> C64 {
        assert!(self.rows == 2 && self.cols == 2);
        self[(0, 0)] * self[(1, 1)] - self[(0, 1)] * self[(1, 0)]
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<C64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self[(i, j)])
    }
}

fn inner_plain(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// J_{n+1} acting on C^{dim}, `dim = 2n+2`.
pub fn j_matrix(dim: usize) -> Result<CMat> {
    check_even(dim)?;
    let mut m = CMat::zeros(dim, dim);
    for p in 0..dim / 2 {
        m[(2 * p, 2 * p + 1)] = -ONE;
        m[(2 * p + 1, 2 * p)] = ONE;
    }
    Ok(m)
}

/// Membership in Sp(n+1): unitary and `U J U^T = J`, both in max-entry norm.
pub fn is_symplectic(u: &CMat, tol: f64) -> Result<bool> {
    if !u.is_square() {
        return Err(Error::BadShape {
            rows: u.rows,
            cols: u.cols,
            reason: "symplectic test needs a square matrix",
        });
    }
    let j = j_matrix(u.rows).map_err(|_| Error::BadShape {
        rows: u.rows,
        cols: u.cols,
        reason: "symplectic test needs even size",
    })?;
    let unit = u.adjoint().matmul(u).sub(&CMat::identity(u.rows)).max_abs();
    let sym = u.matmul(&j).matmul(&u.transpose()).sub(&j).max_abs();
    Ok(unit <= tol && sym <= tol)
}

/// A point of HP^n as the rank-2 projector `ss* + (js)(js)*`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HPoint {
    pub projector: CMat,
}

/// The twistor map CP^{2n+1} -> HP^n.
pub fn twistor_project(v: &[C64]) -> Result<HPoint> {
    check_even(v.len())?;
    let s = normalize(v)?;
    let js = j_unchecked(&s);
    Ok(HPoint {
        projector: CMat::outer(&s, &s).add(&CMat::outer(&js, &js)),
    })
}

/// Max-entry distance between projectors.
pub fn hpoint_distance(p: &HPoint, q: &HPoint) -> Result<f64> {
    if p.projector.rows != q.projector.rows {
        return Err(Error::LengthMismatch {
            left: p.projector.rows,
            right: q.projector.rows,
        });
    }
    Ok(p.projector.sub(&q.projector).max_abs())
}

impl HPoint {
    pub fn dim(&self) -> usize {
        self.projector.rows
    }

    /// Image under a constant matrix acting on lifts: `U P U^*`.
    pub fn transform(&self, u: &CMat) -> HPoint {
        HPoint {
            projector: u.matmul(&self.projector).matmul(&u.adjoint()),
        }
    }

    /// Defect of `J P̄ J^T = P`.
    pub fn j_invariance_defect(&self) -> f64 {
        let j = j_matrix(self.dim()).expect("HPoint has even size");
        j.matmul(&self.projector.conj())
            .matmul(&j.transpose())
            .sub(&self.projector)
            .max_abs()
    }
}

/// Entries with independent standard normal real and imaginary parts.
pub fn random_cvec<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVec {
    (0..len).map(|_| C64::new(gauss(rng), gauss(rng))).collect()
}

pub(crate) fn gauss<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box-Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (std::f64::consts::TAU * v).cos()
}

/// Haar-ish random unitary by Gram-Schmidt on Gaussian columns.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let mut cols: Vec<CVec> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v = random_cvec(rng, n);
        for c in &cols {
            let p = inner(&v, c);
            axpy(&mut v, -p, c);
        }
        if let Ok(u) = normalize(&v) {
            cols.push(u);
        }
    }
    let refs: Vec<&[C64]> = cols.iter().map(|c| c.as_slice()).collect();
    CMat::from_cols(&refs)
}

/// Random element of Sp(n+1) acting on C^{2n+2}.
///
/// Product of an embedded U(n+1) (V on odd slots, V̄ on even slots) and
/// independent SU(2) blocks on each coordinate pair.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    let q = n + 1;
    let v = random_unitary(rng, q);
    let mut emb = CMat::zeros(2 * q, 2 * q);
    for i in 0..q {
        for k in 0..q {
            emb[(2 * i, 2 * k)] = v[(i, k)];
            emb[(2 * i + 1, 2 * k + 1)] = v[(i, k)].conj();
        }
    }
    let mut blocks = CMat::zeros(2 * q, 2 * q);
    for i in 0..q {
        let w = normalize(&random_cvec(rng, 2)).expect("gaussian pair is nonzero");
        let (a, b) = (w[0], w[1]);
        blocks[(2 * i, 2 * i)] = a;
        blocks[(2 * i, 2 * i + 1)] = -b.conj();
        blocks[(2 * i + 1, 2 * i)] = b;
        blocks[(2 * i + 1, 2 * i + 1)] = a.conj();
    }
    emb.matmul(&blocks)
}

/// SU(2) element `[[a, -b̄], [b, ā]]` from a unit pair.
pub fn su2(a: C64, b: C64) -> CMat {
    CMat::from_rows(&[vec![a, -b.conj()], vec![b, a.conj()]])
}

/// Numerical rank of the columns of `m` (singular values above `tol`).
pub fn numerical_rank(m: &CMat, tol: f64) -> usize {
    singular_values(m).iter().filter(|s| **s > tol).count()
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.rows == 0 || m.cols == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.to_nalgebra().singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}
