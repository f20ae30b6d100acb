//! Parametrized lifts, jet providers and evaluation grids.

use crate::error::{Error, Result};
use crate::jet::{multi_indices, Jet, ScalarJet};
use crate::linalg::{self, CVec, C64, ZERO};
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;
use std::fmt;
use std::sync::Arc;

/// A (possibly non-unit) lift z -> C^{2n+2}.
pub trait Lift: Send + Sync + fmt::Debug {
    /// Ambient complex dimension 2n+2.
    fn dim(&self) -> usize;

    /// Raw value at (x, y).
    fn eval(&self, x: f64, y: f64) -> CVec;

    /// Raw Taylor series to `order` at (x, y) when a closed form exists.
    fn series(&self, _x: f64, _y: f64, _order: usize) -> Option<Result<Jet>> {
        None
    }
}

/// Finite-difference settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdConfig {
    pub step: f64,
    /// Richardson extrapolation levels on top of the central stencils.
    pub richardson: usize,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: 1e-4,
            richardson: 1,
        }
    }
}

/// Highest jet order the finite-difference provider supports.
pub const FD_MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Provider {
    Exact,
    FiniteDifference(FdConfig),
}

impl Provider {
    pub fn kind(&self) -> &'static str {
        match self {
            Provider::Exact => "exact",
            Provider::FiniteDifference(_) => "finite_difference",
        }
    }

    /// Default verdict tolerance for boolean predicates.
    pub fn default_tol(&self) -> f64 {
        match self {
            Provider::Exact => crate::tolerances::EXACT_PREDICATE,
            Provider::FiniteDifference(_) => crate::tolerances::FD_PREDICATE,
        }
    }
}

/// Axis-aligned rectangle [x0, x1] × [y0, y1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Cell {
    /// [0, 2π/(n+1)]², the periodicity cell of the exponential families.
    pub fn family(n: usize) -> Self {
        let l = TAU / (n as f64 + 1.0);
        Cell {
            x0: 0.0,
            x1: l,
            y0: 0.0,
            y1: l,
        }
    }

    pub fn size(&self) -> f64 {
        (self.x1 - self.x0).abs().max((self.y1 - self.y0).abs())
    }
}

/// Uniform samples of a cell, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub cell: Cell,
    pub nx: usize,
    pub ny: usize,
}

impl Grid {
    pub fn new(cell: Cell, nx: usize, ny: usize) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::InvalidGrid("resolution must be positive".into()));
        }
        let vals = [cell.x0, cell.x1, cell.y0, cell.y1];
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid("cell bounds must be finite".into()));
        }
        Ok(Grid { cell, nx, ny })
    }

    /// 9×9 over the family cell.
    pub fn family(n: usize) -> Self {
        Grid {
            cell: Cell::family(n),
            nx: 9,
            ny: 9,
        }
    }

    fn lin(a: f64, b: f64, k: usize, m: usize) -> f64 {
        if m == 1 {
            a
        } else {
            a + (b - a) * k as f64 / (m - 1) as f64
        }
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| Self::lin(self.cell.x0, self.cell.x1, i, self.nx)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| Self::lin(self.cell.y0, self.cell.y1, j, self.ny)).collect()
    }

    /// Points in row-major order: y outer, x inner.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let xs = self.xs();
        self.ys()
            .into_iter()
            .flat_map(|y| xs.iter().map(move |&x| (x, y)))
            .collect()
    }
}

/// A parametrized surface: a lift plus a jet provider.
#[derive(Debug, Clone)]
pub struct SurfaceMap {
    pub lift: Arc<dyn Lift>,
    pub provider: Provider,
    /// Target HP^n (equivalently CP^{2n+1}).
    pub ambient_n: usize,
    pub cell: Cell,
    pub label: String,
}

impl SurfaceMap {
    pub fn new(lift: Arc<dyn Lift>, provider: Provider, cell: Cell, label: impl Into<String>) -> Result<Self> {
        let dim = lift.dim();
        if dim < 2 || dim % 2 != 0 {
            return Err(Error::OddLength(dim));
        }
        Ok(SurfaceMap {
            lift,
            provider,
            ambient_n: dim / 2 - 1,
            cell,
            label: label.into(),
        })
    }

    pub fn dim(&self) -> usize {
        self.lift.dim()
    }

    pub fn with_provider(&self, provider: Provider) -> Self {
        SurfaceMap {
            provider,
            ..self.clone()
        }
    }

    pub fn default_grid(&self) -> Grid {
        Grid {
            cell: self.cell,
            nx: 9,
            ny: 9,
        }
    }

    pub fn default_tol(&self) -> f64 {
        self.provider.default_tol()
    }

    /// Unit lift value at a point.
    pub fn unit_value(&self, x: f64, y: f64) -> Result<CVec> {
        linalg::normalize(&self.lift.eval(x, y))
    }

    pub fn jet_at(&self, point: (f64, f64), order: usize) -> Result<Jet> {
        jet_at(self, point, order)
    }
}

/// Jet of the normalized lift s/|s| at `point`.
pub fn jet_at(surface: &SurfaceMap, point: (f64, f64), order: usize) -> Result<Jet> {
    let (x, y) = point;
    match surface.provider {
        Provider::Exact => match surface.lift.series(x, y, order) {
            Some(raw) => raw?.normalized(),
            None => Err(Error::Provider(format!(
                "lift '{}' has no closed-form series",
                surface.label
            ))),
        },
        Provider::FiniteDifference(cfg) => fd_jet(surface.lift.as_ref(), point, order, cfg),
    }
}

/// Central stencils on offsets -2..=2 for real derivatives of order 0..=4.
fn stencil(order: usize) -> [f64; 5] {
    match order {
        0 => [0.0, 0.0, 1.0, 0.0, 0.0],
        1 => [0.0, -0.5, 0.0, 0.5, 0.0],
        2 => [0.0, 1.0, -2.0, 1.0, 0.0],
        3 => [-0.5, 1.0, 0.0, -1.0, 0.5],
        4 => [1.0, -4.0, 6.0, -4.0, 1.0],
        _ => unreachable!("stencil order above 4"),
    }
}

/// Coefficients of ∂x^a ∂y^b in ∂_z^p ∂_z̄^q = 2^{-p-q} (∂x - i∂y)^p (∂x + i∂y)^q.
/// Index `a` runs over 0..=p+q with b = p+q-a.
fn wirtinger_mix(p: usize, q: usize) -> Vec<C64> {
    let mut poly = vec![C64::new(1.0, 0.0)];
    let mul = |poly: &Vec<C64>, sy: C64| {
        // multiply by (∂x + sy ∂y); index by power of ∂x, highest power last
        let mut out = vec![ZERO; poly.len() + 1];
        for (a, c) in poly.iter().enumerate() {
            out[a + 1] += c;
            out[a] += c * sy;
        }
        out
    };
    for _ in 0..p {
        poly = mul(&poly, C64::new(0.0, -1.0));
    }
    for _ in 0..q {
        poly = mul(&poly, C64::new(0.0, 1.0));
    }
    let s = 0.5f64.powi((p + q) as i32);
    poly.into_iter().map(|c| c * s).collect()
}

/// Raw central-difference derivatives (no extrapolation) of the unit lift.
fn fd_raw(lift: &dyn Lift, point: (f64, f64), order: usize, h: f64) -> Result<Vec<CVec>> {
    let dim = lift.dim();
    let span: i32 = if order >= 3 { 2 } else { 1 };
    let mut samples = vec![vec![Vec::new(); 5]; 5];
    for i in -span..=span {
        for j in -span..=span {
            let v = lift.eval(point.0 + i as f64 * h, point.1 + j as f64 * h);
            samples[(i + 2) as usize][(j + 2) as usize] = linalg::normalize(&v)?;
        }
    }
    // real partials ∂x^a ∂y^b for a + b <= order
    let mut partial = vec![vec![None::<CVec>; order + 1]; order + 1];
    for a in 0..=order {
        for b in 0..=order - a {
            let (wa, wb) = (stencil(a), stencil(b));
            let scale = h.powi(-((a + b) as i32));
            let mut acc = vec![ZERO; dim];
            for i in 0..5 {
                for j in 0..5 {
                    let w = wa[i] * wb[j];
                    if w != 0.0 {
                        linalg::axpy(&mut acc, C64::new(w * scale, 0.0), &samples[i][j]);
                    }
                }
            }
            partial[a][b] = Some(acc);
        }
    }
    Ok(multi_indices(order)
        .map(|(p, q)| {
            let mix = wirtinger_mix(p, q);
            let d = p + q;
            let mut out = vec![ZERO; dim];
            for (a, c) in mix.iter().enumerate() {
                let v = partial[a][d - a].as_ref().expect("partial computed");
                linalg::axpy(&mut out, *c, v);
            }
            out
        })
        .collect())
}

/// Finite-difference jet with Richardson extrapolation.
pub fn fd_jet(lift: &dyn Lift, point: (f64, f64), order: usize, cfg: FdConfig) -> Result<Jet> {
    if order > FD_MAX_ORDER {
        return Err(Error::JetOrder {
            requested: order,
            max: FD_MAX_ORDER,
        });
    }
    let h_min = cfg.step / 2f64.powi(cfg.richardson as i32);
    if !(cfg.step > 0.0) || (order > 0 && h_min.powi(order as i32) <= f64::EPSILON) {
        return Err(Error::StepUnderflow {
            step: h_min,
            order,
        });
    }
    // table[level][k]: level-k extrapolant at step h/2^i
    let mut rows: Vec<Vec<CVec>> = (0..=cfg.richardson)
        .map(|i| fd_raw(lift, point, order, cfg.step / 2f64.powi(i as i32)))
        .collect::<Result<_>>()?;
    for k in 1..=cfg.richardson {
        let f = 4f64.powi(k as i32);
        rows = (0..rows.len() - 1)
            .map(|i| {
                rows[i]
                    .iter()
                    .zip(&rows[i + 1])
                    .map(|(coarse, fine)| {
                        fine.iter()
                            .zip(coarse)
                            .map(|(a, b)| (a * f - b) / (f - 1.0))
                            .collect()
                    })
                    .collect()
            })
            .collect();
    }
    let derivs = rows.pop().expect("at least one level");
    Ok(Jet::from_derivs(point, order, derivs))
}

/// A lift given by a closure; finite-difference jets only.
pub struct FnLift<F> {
    dim: usize,
    f: F,
}

impl<F> FnLift<F>
where
    F: Fn(f64, f64) -> CVec + Send + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnLift { dim, f }
    }
}

impl<F> fmt::Debug for FnLift<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnLift(dim={})", self.dim)
    }
}

impl<F> Lift for FnLift<F>
where
    F: Fn(f64, f64) -> CVec + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: f64, y: f64) -> CVec {
        (self.f)(x, y)
    }
}

/// One monomial c z^p z̄^q.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Monomial {
    pub coef: C64,
    pub p: usize,
    pub q: usize,
}

/// Lift whose components are polynomials in z and z̄; exact series.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialLift {
    pub components: Vec<Vec<Monomial>>,
}

impl PolynomialLift {
    pub fn new(components: Vec<Vec<Monomial>>) -> Self {
        PolynomialLift { components }
    }

    /// Shorthand: component list of (coef, p, q) triples.
    pub fn from_terms(terms: &[&[(C64, usize, usize)]]) -> Self {
        PolynomialLift {
            components: terms
                .iter()
                .map(|c| c.iter().map(|&(coef, p, q)| Monomial { coef, p, q }).collect())
                .collect(),
        }
    }
}

impl Lift for PolynomialLift {
    fn dim(&self) -> usize {
        self.components.len()
    }

    fn eval(&self, x: f64, y: f64) -> CVec {
        let z = C64::new(x, y);
        self.components
            .iter()
            .map(|c| c.iter().map(|m| m.coef * z.powu(m.p as u32) * z.conj().powu(m.q as u32)).sum())
            .collect()
    }

    fn series(&self, x: f64, y: f64, order: usize) -> Option<Result<Jet>> {
        let z0 = C64::new(x, y);
        let z = ScalarJet::coordinate(false, order).add_const(z0);
        let zb = ScalarJet::coordinate(true, order).add_const(z0.conj());
        let pow = |b: &ScalarJet, k: usize| {
            (0..k).fold(ScalarJet::constant(C64::new(1.0, 0.0), order), |acc, _| acc.mul(b))
        };
        let comps: Vec<ScalarJet> = self
            .components
            .iter()
            .map(|c| {
                c.iter().fold(ScalarJet::constant(ZERO, order), |acc, m| {
                    acc.add(&pow(&z, m.p).mul(&pow(&zb, m.q)).scale(m.coef))
                })
            })
            .collect();
        let coeffs = multi_indices(order)
            .map(|(p, q)| comps.iter().map(|s| s.coeff(p, q)).collect())
            .collect();
        Some(Ok(Jet::from_coeffs((x, y), order, coeffs)))
    }
}
