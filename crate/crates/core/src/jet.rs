//! Truncated Taylor series in (z - z0, z̄ - z̄0).
//!
//! A series of order K stores the coefficients c_{pq} for p + q <= K, so
//! that the mixed Wirtinger derivative ∂_z^p ∂_z̄^q at the base point is
//! p! q! c_{pq}. Products truncate at the smaller order; ∂_z and ∂_z̄ drop
//! the order by one.

use crate::error::{Error, Result};
use crate::linalg::{self, CVec, C64, ONE, ZERO};

/// Position of (p, q) in the coefficient table.
#[inline]
pub fn idx(p: usize, q: usize) -> usize {
    let d = p + q;
    d * (d + 1) / 2 + q
}

#[inline]
pub fn table_len(order: usize) -> usize {
    (order + 1) * (order + 2) / 2
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// Indices (p, q) with p + q <= order, ordered by total degree.
pub fn multi_indices(order: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=order).flat_map(|d| (0..=d).map(move |q| (d - q, q)))
}

/// Scalar-valued series.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarJet {
    order: usize,
    c: Vec<C64>,
}

impl ScalarJet {
    pub fn constant(v: C64, order: usize) -> Self {
        let mut c = vec![ZERO; table_len(order)];
        c[0] = v;
        ScalarJet { order, c }
    }

    pub fn from_coeffs(order: usize, c: Vec<C64>) -> Self {
        assert_eq!(c.len(), table_len(order));
        ScalarJet { order, c }
    }

    /// z - z0 (`conj = false`) or z̄ - z̄0 (`conj = true`).
    pub fn coordinate(conj: bool, order: usize) -> Self {
        let mut j = Self::constant(ZERO, order);
        if order >= 1 {
            j.c[if conj { idx(0, 1) } else { idx(1, 0) }] = ONE;
        }
        j
    }

    /// x - x0 and y - y0 as series.
    pub fn real_coordinates(order: usize) -> (Self, Self) {
        let dz = Self::coordinate(false, order);
        let dzb = Self::coordinate(true, order);
        let x = dz.add(&dzb).scale(C64::new(0.5, 0.0));
        let y = dz.sub(&dzb).scale(C64::new(0.0, -0.5));
        (x, y)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeff(&self, p: usize, q: usize) -> C64 {
        if p + q > self.order {
            return ZERO;
        }
        self.c[idx(p, q)]
    }

    pub fn value(&self) -> C64 {
        self.c[0]
    }

    pub fn deriv(&self, p: usize, q: usize) -> C64 {
        self.coeff(p, q) * factorial(p) * factorial(q)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        ScalarJet {
            order,
            c: self.c[..table_len(order)].to_vec(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let c = (0..table_len(k)).map(|i| self.c[i] + o.c[i]).collect();
        ScalarJet { order: k, c }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let c = (0..table_len(k)).map(|i| self.c[i] - o.c[i]).collect();
        ScalarJet { order: k, c }
    }

    pub fn scale(&self, a: C64) -> Self {
        ScalarJet {
            order: self.order,
            c: self.c.iter().map(|x| x * a).collect(),
        }
    }

    pub fn add_const(&self, a: C64) -> Self {
        let mut r = self.clone();
        r.c[0] += a;
        r
    }

    pub fn mul(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let mut c = vec![ZERO; table_len(k)];
        for (i, j) in multi_indices(k) {
            let a = self.c[idx(i, j)];
            if a == ZERO {
                continue;
            }
            for (p, q) in multi_indices(k - i - j) {
                c[idx(i + p, j + q)] += a * o.c[idx(p, q)];
            }
        }
        ScalarJet { order: k, c }
    }

    /// Series of the pointwise complex conjugate.
    pub fn conj(&self) -> Self {
        let mut c = vec![ZERO; self.c.len()];
        for (p, q) in multi_indices(self.order) {
            c[idx(p, q)] = self.c[idx(q, p)].conj();
        }
        ScalarJet { order: self.order, c }
    }

    pub fn d_z(&self) -> Result<Self> {
        self.derivative(false)
    }

    pub fn d_zbar(&self) -> Result<Self> {
        self.derivative(true)
    }

    fn derivative(&self, bar: bool) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::JetOrder {
                requested: 1,
                max: 0,
            });
        }
        let k = self.order - 1;
        let mut c = vec![ZERO; table_len(k)];
        for (p, q) in multi_indices(k) {
            c[idx(p, q)] = if bar {
                self.c[idx(p, q + 1)] * (q + 1) as f64
            } else {
                self.c[idx(p + 1, q)] * (p + 1) as f64
            };
        }
        Ok(ScalarJet { order: k, c })
    }

    /// Σ_k coef[k] g^k for the nilpotent part g = self - value.
    fn compose(&self, coef: &[C64]) -> Self {
        let mut g = self.clone();
        g.c[0] = ZERO;
        // Horner: (((c_K g + c_{K-1}) g + ...) g + c_0)
        let k = self.order;
        let mut acc = Self::constant(coef[k], k);
        for m in (0..k).rev() {
            acc = acc.mul(&g).add_const(coef[m]);
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let f0 = self.value().exp();
        let coef: Vec<C64> = (0..=self.order).map(|m| f0 / factorial(m)).collect();
        self.compose(&coef)
    }

    pub fn recip(&self) -> Result<Self> {
        let f0 = self.value();
        if f0.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        // 1/(f0 + g) = Σ (-1)^m g^m / f0^{m+1}
        let coef: Vec<C64> = (0..=self.order)
            .map(|m| {
                let s = if m % 2 == 0 { 1.0 } else { -1.0 };
                s / f0.powi(m as i32 + 1)
            })
            .collect();
        Ok(self.compose(&coef))
    }

    /// Principal square root; the value must be nonzero.
    pub fn sqrt(&self) -> Result<Self> {
        let f0 = self.value();
        if f0.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        let r0 = f0.sqrt();
        // sqrt(f0 + g) = r0 Σ binom(1/2, m) (g/f0)^m
        let mut coef = Vec::with_capacity(self.order + 1);
        let mut b = 1.0;
        for m in 0..=self.order {
            coef.push(r0 * b / f0.powi(m as i32));
            b *= (0.5 - m as f64) / (m as f64 + 1.0);
        }
        Ok(self.compose(&coef))
    }

    pub fn ln(&self) -> Result<Self> {
        let f0 = self.value();
        if f0.norm() == 0.0 {
            return Err(Error::ZeroVector);
        }
        // log(f0 + g) = log f0 + Σ_{m>=1} (-1)^{m+1} (g/f0)^m / m
        let mut coef = vec![f0.ln()];
        for m in 1..=self.order {
            let s = if m % 2 == 1 { 1.0 } else { -1.0 };
            coef.push(s / (m as f64 * f0.powi(m as i32)));
        }
        Ok(self.compose(&coef))
    }

    pub fn cos(&self) -> Self {
        let ip = self.scale(C64::new(0.0, 1.0)).exp();
        let im = self.scale(C64::new(0.0, -1.0)).exp();
        ip.add(&im).scale(C64::new(0.5, 0.0))
    }

    pub fn sin(&self) -> Self {
        let ip = self.scale(C64::new(0.0, 1.0)).exp();
        let im = self.scale(C64::new(0.0, -1.0)).exp();
        ip.sub(&im).scale(C64::new(0.0, -0.5))
    }
}

/// Vector-valued series at a point, the `Jet` of a lift.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    pub point: (f64, f64),
    order: usize,
    dim: usize,
    c: Vec<CVec>,
}

impl Jet {
    pub fn zeros(point: (f64, f64), order: usize, dim: usize) -> Self {
        Jet {
            point,
            order,
            dim,
            c: vec![vec![ZERO; dim]; table_len(order)],
        }
    }

    pub fn constant(point: (f64, f64), v: CVec, order: usize) -> Self {
        let mut j = Self::zeros(point, order, v.len());
        j.c[0] = v;
        j
    }

    /// Build from Taylor coefficients c_{pq} in table order.
    pub fn from_coeffs(point: (f64, f64), order: usize, c: Vec<CVec>) -> Self {
        assert_eq!(c.len(), table_len(order));
        let dim = c[0].len();
        Jet {
            point,
            order,
            dim,
            c,
        }
    }

    /// Build from derivatives ∂_z^p ∂_z̄^q.
    pub fn from_derivs(point: (f64, f64), order: usize, d: Vec<CVec>) -> Self {
        let c = multi_indices(order)
            .zip(d)
            .map(|((p, q), v)| linalg::scale(&v, C64::new(1.0 / (factorial(p) * factorial(q)), 0.0)))
            .collect();
        Self::from_coeffs(point, order, c)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn coeff(&self, p: usize, q: usize) -> &[C64] {
        &self.c[idx(p, q)]
    }

    pub fn coeffs(&self) -> &[CVec] {
        &self.c
    }

    pub fn value(&self) -> &[C64] {
        &self.c[0]
    }

    /// ∂_z^p ∂_z̄^q at the base point.
    pub fn deriv(&self, p: usize, q: usize) -> CVec {
        if p + q > self.order {
            return vec![ZERO; self.dim];
        }
        linalg::scale(&self.c[idx(p, q)], C64::new(factorial(p) * factorial(q), 0.0))
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Jet {
            point: self.point,
            order,
            dim: self.dim,
            c: self.c[..table_len(order)].to_vec(),
        }
    }

    pub fn component(&self, a: usize) -> ScalarJet {
        ScalarJet::from_coeffs(self.order, self.c.iter().map(|v| v[a]).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let c = (0..table_len(k))
            .map(|i| self.c[i].iter().zip(&o.c[i]).map(|(a, b)| a + b).collect())
            .collect();
        Jet {
            point: self.point,
            order: k,
            dim: self.dim,
            c,
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let k = self.order.min(o.order);
        let c = (0..table_len(k)).map(|i| linalg::sub(&self.c[i], &o.c[i])).collect();
        Jet {
            point: self.point,
            order: k,
            dim: self.dim,
            c,
        }
    }

    /// Pointwise product with a scalar series.
    pub fn mul_scalar(&self, f: &ScalarJet) -> Self {
        let k = self.order.min(f.order());
        let mut c = vec![vec![ZERO; self.dim]; table_len(k)];
        for (i, j) in multi_indices(k) {
            let a = f.coeff(i, j);
            if a == ZERO {
                continue;
            }
            for (p, q) in multi_indices(k - i - j) {
                linalg::axpy(&mut c[idx(i + p, j + q)], a, &self.c[idx(p, q)]);
            }
        }
        Jet {
            point: self.point,
            order: k,
            dim: self.dim,
            c,
        }
    }

    pub fn scale(&self, a: C64) -> Self {
        Jet {
            point: self.point,
            order: self.order,
            dim: self.dim,
            c: self.c.iter().map(|v| linalg::scale(v, a)).collect(),
        }
    }

    /// Series of ⟨self, other⟩ = Σ_a self_a conj(other_a).
    pub fn inner(&self, o: &Self) -> ScalarJet {
        let k = self.order.min(o.order);
        let mut c = vec![ZERO; table_len(k)];
        for (i, j) in multi_indices(k) {
            let v = &self.c[idx(i, j)];
            for (p, q) in multi_indices(k - i - j) {
                // conj(other) has coefficient (p, q) equal to conj(other_{q p})
                c[idx(i + p, j + q)] += linalg::inner(v, &o.c[idx(q, p)]);
            }
        }
        ScalarJet::from_coeffs(k, c)
    }

    pub fn norm_sqr(&self) -> ScalarJet {
        self.inner(self)
    }

    /// Series of j(s) = J s̄.
    pub fn j(&self) -> Self {
        let mut c = vec![Vec::new(); self.c.len()];
        for (p, q) in multi_indices(self.order) {
            c[idx(p, q)] = linalg::j_unchecked(&self.c[idx(q, p)]);
        }
        Jet {
            point: self.point,
            order: self.order,
            dim: self.dim,
            c,
        }
    }

    /// Constant matrix applied to every coefficient.
    pub fn apply(&self, m: &linalg::CMat) -> Self {
        Jet {
            point: self.point,
            order: self.order,
            dim: m.rows,
            c: self.c.iter().map(|v| m.apply(v)).collect(),
        }
    }

    pub fn d_z(&self) -> Result<Self> {
        self.derivative(false)
    }

    pub fn d_zbar(&self) -> Result<Self> {
        self.derivative(true)
    }

    fn derivative(&self, bar: bool) -> Result<Self> {
        if self.order == 0 {
            return Err(Error::JetOrder {
                requested: 1,
                max: 0,
            });
        }
        let k = self.order - 1;
        let c = multi_indices(k)
            .map(|(p, q)| {
                if bar {
                    linalg::scale(&self.c[idx(p, q + 1)], C64::new((q + 1) as f64, 0.0))
                } else {
                    linalg::scale(&self.c[idx(p + 1, q)], C64::new((p + 1) as f64, 0.0))
                }
            })
            .collect();
        Ok(Jet {
            point: self.point,
            order: k,
            dim: self.dim,
            c,
        })
    }

    /// s / |s| through the series, so derivative identities of unit lifts
    /// hold to rounding.
    pub fn normalized(&self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2.value().re <= 0.0 {
            return Err(Error::ZeroVector);
        }
        let inv = n2.sqrt()?.recip()?;
        Ok(self.mul_scalar(&inv))
    }

    /// Max coefficient-table distance (as derivatives) to another jet.
    pub fn max_deriv_distance(&self, o: &Self) -> f64 {
        let k = self.order.min(o.order);
        multi_indices(k)
            .map(|(p, q)| linalg::norm(&linalg::sub(&self.deriv(p, q), &o.deriv(p, q))))
            .fold(0.0, f64::max)
    }
}
