//! SU(2) gauge changes of unit lifts and the horizontal-lift construction.
//!
//! For a unit lift s put D = (s, js)^* ∂_z (s, js). A new lift
//! (s̃, js̃) = (s, js) T is horizontal when dT + (D dz - D^* dz̄) T = 0.

use crate::calculus::horizontal_diff;
use crate::checkers::{fd_dbar, matrix_fd_config, scan_grid};
use crate::error::{Error, Result};
use crate::jet::{idx, multi_indices, table_len, Jet, ScalarJet};
use crate::linalg::{self, inner, j_unchecked, su2, CMat, CVec, C64, ONE, ZERO};
use crate::surface::{Grid, Lift, Provider, SurfaceMap};
use crate::tolerances::{GAUGE_STEP_FRACTION, HOLONOMY, NON_INTEGRABLE};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

/// D from an order-1 jet of a unit lift.
pub fn d_from_jet(jet: &Jet) -> Result<CMat> {
    if jet.order() < 1 {
        return Err(Error::JetOrder {
            requested: 1,
            max: 0,
        });
    }
    let s = jet.value();
    let js = j_unchecked(s);
    let dz_s = jet.coeff(1, 0);
    // ∂_z (js) = j(∂_z̄ s)
    let dz_js = j_unchecked(jet.coeff(0, 1));
    Ok(CMat::from_rows(&[
        vec![inner(dz_s, s), inner(&dz_js, s)],
        vec![inner(dz_s, &js), inner(&dz_js, &js)],
    ]))
}

pub fn compute_d(lift: &SurfaceMap, point: (f64, f64)) -> Result<CMat> {
    d_from_jet(&lift.jet_at(point, 1)?)
}

/// The matrix field D of a lift.
#[derive(Debug, Clone)]
pub struct GaugeField {
    pub lift: SurfaceMap,
}

impl GaugeField {
    pub fn new(lift: SurfaceMap) -> Self {
        GaugeField { lift }
    }

    pub fn d_at(&self, p: (f64, f64)) -> Result<CMat> {
        compute_d(&self.lift, p)
    }

    /// Default ODE step: a fixed fraction of the cell size.
    pub fn default_step(&self) -> f64 {
        GAUGE_STEP_FRACTION * self.lift.cell.size()
    }
}

/// Left side ∂_z̄ D + ∂_z D^* + [D, D^*] at a point, derivatives by stencil.
pub fn integrability_matrix(lift: &SurfaceMap, p: (f64, f64)) -> Result<CMat> {
    let d = compute_d(lift, p)?;
    let x = fd_dbar(p, matrix_fd_config(&lift.provider), |q| compute_d(lift, q))?;
    let ds = d.adjoint();
    Ok(x.add(&x.adjoint()).add(&d.commutator(&ds)))
}

/// Right side of the curvature identity built from the horizontal differential.
pub fn integrability_rhs(jet: &Jet) -> Result<CMat> {
    let (a, b) = horizontal_diff(jet)?;
    let jb = j_unchecked(&b);
    let gap = C64::new(linalg::norm_sqr(&a) - linalg::norm_sqr(&b), 0.0);
    Ok(CMat::from_rows(&[
        vec![gap, inner(&jb, &a) * 2.0],
        vec![inner(&a, &jb) * 2.0, -gap],
    ]))
}

pub fn integrability_residual(lift: &SurfaceMap, grid: &Grid) -> Result<f64> {
    let (r, _, _) = scan_grid(grid, |p| Ok(Some(integrability_matrix(lift, p)?.max_abs())))?;
    Ok(r)
}

/// A frame T in SU(2) attached to a base point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeFrame {
    pub t: CMat,
    pub base: (f64, f64),
}

impl GaugeFrame {
    pub fn identity(base: (f64, f64)) -> Self {
        GaugeFrame {
            t: CMat::identity(2),
            base,
        }
    }
}

/// (‖T*T - I‖, |det T - 1|).
pub fn su2_defects(t: &CMat) -> (f64, f64) {
    (
        t.adjoint().matmul(t).sub(&CMat::identity(2)).max_abs(),
        (t.det2() - ONE).norm(),
    )
}

/// Nearest SU(2) element: polar factor, then the determinant phase removed.
pub fn reunitarize(m: &CMat) -> CMat {
    // sqrt(A) = (A + √det A I) / √(tr A + 2√det A) for 2×2 Hermitian A > 0
    let a = m.adjoint().matmul(m);
    let sd = a.det2().re.max(0.0).sqrt();
    let denom = (a.trace().re + 2.0 * sd).sqrt();
    let root = a.add(&CMat::identity(2).scale(C64::new(sd, 0.0))).scale(C64::new(1.0 / denom, 0.0));
    let inv = {
        let det = root.det2();
        CMat::from_rows(&[vec![root[(1, 1)], -root[(0, 1)]], vec![-root[(1, 0)], root[(0, 0)]]]).scale(1.0 / det)
    };
    let u = m.matmul(&inv);
    u.scale(1.0 / u.det2().sqrt())
}

/// Result of integrating along a polyline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathIntegration {
    pub frame: GaugeFrame,
    /// Largest ‖T*T - I‖ seen after a step, before re-projection.
    pub max_unitarity_defect: f64,
    /// Largest |det T - 1| seen after a step, before re-projection.
    pub max_det_defect: f64,
    pub steps: usize,
}

const MIN_STEP: f64 = 1e-12;

/// RK4 along each polyline segment with at most `max_step` per step.
pub fn integrate_gauge(field: &GaugeField, path: &[(f64, f64)], t0: &GaugeFrame, max_step: f64) -> Result<PathIntegration> {
    let (du, dd) = su2_defects(&t0.t);
    if t0.t.rows != 2 || t0.t.cols != 2 || du > 1e-8 || dd > 1e-8 {
        return Err(Error::NotSpecialUnitary { defect: du.max(dd) });
    }
    if !(max_step >= MIN_STEP) {
        return Err(Error::StepUnderflow {
            step: max_step,
            order: 0,
        });
    }
    let mut t = t0.t.clone();
    let mut out = PathIntegration {
        frame: t0.clone(),
        max_unitarity_defect: 0.0,
        max_det_defect: 0.0,
        steps: 0,
    };
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let len = (b.0 - a.0).hypot(b.1 - a.1);
        if len == 0.0 {
            continue;
        }
        let n = (len / max_step).ceil().max(1.0) as usize;
        let dz = C64::new((b.0 - a.0) / n as f64, (b.1 - a.1) / n as f64);
        // generator -(D dz - D^* dz̄) for one step
        let gen = |d: &CMat| d.scale(dz).sub(&d.adjoint().scale(dz.conj())).scale(-ONE);
        let at = |k: f64| (a.0 + (b.0 - a.0) * k / n as f64, a.1 + (b.1 - a.1) * k / n as f64);
        let mut f0 = gen(&field.d_at(at(0.0))?);
        for i in 0..n {
            let fi = i as f64;
            let fm = gen(&field.d_at(at(fi + 0.5))?);
            let f1 = gen(&field.d_at(at(fi + 1.0))?);
            let k1 = f0.matmul(&t);
            let k2 = fm.matmul(&t.add(&k1.scale(C64::new(0.5, 0.0))));
            let k3 = fm.matmul(&t.add(&k2.scale(C64::new(0.5, 0.0))));
            let k4 = f1.matmul(&t.add(&k3));
            let inc = k1.add(&k2.scale(C64::new(2.0, 0.0))).add(&k3.scale(C64::new(2.0, 0.0))).add(&k4);
            t = t.add(&inc.scale(C64::new(1.0 / 6.0, 0.0)));
            let (u, d) = su2_defects(&t);
            out.max_unitarity_defect = out.max_unitarity_defect.max(u);
            out.max_det_defect = out.max_det_defect.max(d);
            t = reunitarize(&t);
            f0 = f1;
            out.steps += 1;
        }
    }
    out.frame = GaugeFrame { t, base: t0.base };
    Ok(out)
}

/// Axis-aligned path from `from` to `to`: first along x, then along y.
pub fn l_path(from: (f64, f64), to: (f64, f64)) -> Vec<(f64, f64)> {
    vec![from, (to.0, from.1), to]
}

/// ‖T_loop - I‖ for the rectangle boundary through `corner` and `opposite`.
pub fn loop_holonomy(field: &GaugeField, corner: (f64, f64), opposite: (f64, f64), max_step: f64) -> Result<PathIntegration> {
    let path = [corner, (opposite.0, corner.1), opposite, (corner.0, opposite.1), corner];
    integrate_gauge(field, &path, &GaugeFrame::identity(corner), max_step)
}

fn point_key(p: (f64, f64)) -> (u64, u64) {
    (p.0.to_bits(), p.1.to_bits())
}

/// The horizontal lift s̃ = first column of (s, js) T.
pub struct HorizontalLift {
    field: GaugeField,
    base: (f64, f64),
    step: f64,
    frames: HashMap<(u64, u64), CMat>,
}

impl fmt::Debug for HorizontalLift {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "HorizontalLift(base={:?}, source={})", self.base, self.field.lift.label)
    }
}

impl HorizontalLift {
    /// T at a point: cached for grid points, otherwise integrated along the L-path.
    pub fn frame_at(&self, p: (f64, f64)) -> Result<CMat> {
        if let Some(t) = self.frames.get(&point_key(p)) {
            return Ok(t.clone());
        }
        Ok(integrate_gauge(&self.field, &l_path(self.base, p), &GaugeFrame::identity(self.base), self.step)?
            .frame
            .t)
    }

    fn source_series(&self, x: f64, y: f64, order: usize) -> Result<Jet> {
        self.field.lift.jet_at((x, y), order)
    }
}

/// Taylor series of T from its value and the series of D, using
/// ∂_z T = -D T and ∂_z̄ T = D^* T.
fn t_series(t0: &CMat, d: &[[ScalarJet; 2]; 2], order: usize) -> Vec<[[C64; 2]; 2]> {
    let dc = |p: usize, q: usize, a: usize, b: usize| d[a][b].coeff(p, q);
    // (D^*)(z) has coefficient (p, q) equal to conj(D_{qp}) transposed
    let dsc = |p: usize, q: usize, a: usize, b: usize| d[b][a].coeff(q, p).conj();
    let mut t = vec![[[ZERO; 2]; 2]; table_len(order)];
    t[0] = [[t0[(0, 0)], t0[(0, 1)]], [t0[(1, 0)], t0[(1, 1)]]];
    for deg in 1..=order {
        for q in 0..=deg {
            let p = deg - q;
            let mut acc = [[ZERO; 2]; 2];
            if p >= 1 {
                for (i, j) in multi_indices(deg - 1).filter(|&(i, j)| i <= p - 1 && j <= q) {
                    let tt = t[idx(p - 1 - i, q - j)];
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                acc[a][b] -= dc(i, j, a, c) * tt[c][b];
                            }
                        }
                    }
                }
                let s = 1.0 / p as f64;
                t[idx(p, q)] = acc.map(|r| r.map(|v| v * s));
            } else {
                for j in 0..q {
                    let tt = t[idx(0, q - 1 - j)];
                    for a in 0..2 {
                        for b in 0..2 {
                            for c in 0..2 {
                                acc[a][b] += dsc(0, j, a, c) * tt[c][b];
                            }
                        }
                    }
                }
                let s = 1.0 / q as f64;
                t[idx(0, q)] = acc.map(|r| r.map(|v| v * s));
            }
        }
    }
    t
}

fn d_series(s: &Jet) -> Result<[[ScalarJet; 2]; 2]> {
    let js = s.j();
    let dz_s = s.d_z()?;
    let dz_js = s.d_zbar()?.j();
    let (st, jst) = (s.truncate(dz_s.order()), js.truncate(dz_s.order()));
    Ok([
        [dz_s.inner(&st), dz_js.inner(&st)],
        [dz_s.inner(&jst), dz_js.inner(&jst)],
    ])
}

impl Lift for HorizontalLift {
    fn dim(&self) -> usize {
        self.field.lift.dim()
    }

    fn eval(&self, x: f64, y: f64) -> CVec {
        match (self.field.lift.unit_value(x, y), self.frame_at((x, y))) {
            (Ok(s), Ok(t)) => {
                let mut v = linalg::scale(&s, t[(0, 0)]);
                linalg::axpy(&mut v, t[(1, 0)], &j_unchecked(&s));
                v
            }
            _ => vec![C64::new(f64::NAN, 0.0); self.dim()],
        }
    }

    fn series(&self, x: f64, y: f64, order: usize) -> Option<Result<Jet>> {
        let run = || -> Result<Jet> {
            let s = self.source_series(x, y, order.max(1))?;
            let t0 = self.frame_at((x, y))?;
            let d = d_series(&s)?;
            let t = t_series(&t0, &d, order);
            let col = |r: usize| ScalarJet::from_coeffs(order, t.iter().map(|m| m[r][0]).collect());
            let s = s.truncate(order);
            Ok(s.mul_scalar(&col(0)).add(&s.j().mul_scalar(&col(1))))
        };
        Some(run())
    }
}

/// Horizontal lift of an integrable (totally real) surface, with T = I at
/// `base_point` and frames integrated along L-paths.
pub fn horizontalize(lift: &SurfaceMap, base_point: (f64, f64)) -> Result<SurfaceMap> {
    let grid = lift.default_grid();
    let residual = integrability_residual(lift, &grid)?;
    if residual > NON_INTEGRABLE {
        return Err(Error::NonIntegrable {
            residual,
            threshold: NON_INTEGRABLE,
        });
    }
    let field = GaugeField::new(lift.clone());
    let step = field.default_step();
    let c = lift.cell;
    let hol = loop_holonomy(&field, (c.x0, c.y0), (c.x1, c.y1), step)?;
    let defect = hol.frame.t.sub(&CMat::identity(2)).max_abs();
    if defect > HOLONOMY {
        return Err(Error::Holonomy {
            defect,
            threshold: HOLONOMY,
        });
    }
    let pts = grid.points();
    let frames: Vec<((u64, u64), CMat)> = pts
        .par_iter()
        .map(|&p| {
            let r = integrate_gauge(&field, &l_path(base_point, p), &GaugeFrame::identity(base_point), step)?;
            Ok((point_key(p), r.frame.t))
        })
        .collect::<Result<_>>()?;
    let h = HorizontalLift {
        field,
        base: base_point,
        step,
        frames: frames.into_iter().collect(),
    };
    let provider = match lift.provider {
        Provider::Exact => Provider::Exact,
        fd => fd,
    };
    SurfaceMap::new(Arc::new(h), provider, lift.cell, format!("horizontal({})", lift.label))
}

/// T(x, y) = [[cos χ e^{iψ1}, -sin χ e^{-iψ2}], [sin χ e^{iψ2}, cos χ e^{-iψ1}]]
/// with χ, ψ1, ψ2 trigonometric polynomials c0 + c1 sin(x + φ1) + c2 cos(y + φ2) + c3 sin(x + y).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothGauge {
    /// Rows for χ, ψ1, ψ2: [c0, c1, c2, c3, φ1, φ2].
    pub coeffs: [[f64; 6]; 3],
}

impl SmoothGauge {
    pub fn random<R: Rng + ?Sized>(rng: &mut R, amplitude: f64) -> Self {
        let mut coeffs = [[0.0; 6]; 3];
        for row in coeffs.iter_mut() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = if k < 4 {
                    amplitude * rng.gen_range(-1.0..1.0)
                } else {
                    rng.gen_range(0.0..std::f64::consts::TAU)
                };
            }
        }
        SmoothGauge { coeffs }
    }

    /// A pure phase e^{iθ} on s, θ = ψ1.
    pub fn phase(c: [f64; 6]) -> Self {
        SmoothGauge {
            coeffs: [[0.0; 6], c, [0.0; 6]],
        }
    }

    fn angle(c: &[f64; 6], x: f64, y: f64) -> f64 {
        c[0] + c[1] * (x + c[4]).sin() + c[2] * (y + c[5]).cos() + c[3] * (x + y).sin()
    }

    fn angle_series(c: &[f64; 6], x: f64, y: f64, order: usize) -> ScalarJet {
        let (dx, dy) = ScalarJet::real_coordinates(order);
        let r = |v: f64| C64::new(v, 0.0);
        let xs = dx.add_const(r(x + c[4]));
        let ys = dy.add_const(r(y + c[5]));
        let xy = dx.add(&dy).add_const(r(x + y));
        ScalarJet::constant(r(c[0]), order)
            .add(&xs.sin().scale(r(c[1])))
            .add(&ys.cos().scale(r(c[2])))
            .add(&xy.sin().scale(r(c[3])))
    }

    pub fn matrix(&self, x: f64, y: f64) -> CMat {
        let chi = Self::angle(&self.coeffs[0], x, y);
        let p1 = Self::angle(&self.coeffs[1], x, y);
        let p2 = Self::angle(&self.coeffs[2], x, y);
        su2(C64::from_polar(chi.cos(), p1), C64::from_polar(chi.sin(), p2))
    }

    /// Series of the first column (α, β).
    fn column_series(&self, x: f64, y: f64, order: usize) -> (ScalarJet, ScalarJet) {
        let chi = Self::angle_series(&self.coeffs[0], x, y, order);
        let i = C64::new(0.0, 1.0);
        let e1 = Self::angle_series(&self.coeffs[1], x, y, order).scale(i).exp();
        let e2 = Self::angle_series(&self.coeffs[2], x, y, order).scale(i).exp();
        (chi.cos().mul(&e1), chi.sin().mul(&e2))
    }

    /// The lift α s + β js of a surface's unit lift.
    pub fn apply(&self, surface: &SurfaceMap) -> Result<SurfaceMap> {
        let g = GaugedLift {
            source: surface.clone(),
            gauge: self.clone(),
        };
        SurfaceMap::new(Arc::new(g), surface.provider, surface.cell, format!("gauged({})", surface.label))
    }
}

/// A unit lift changed pointwise by a smooth SU(2) field.
#[derive(Debug)]
pub struct GaugedLift {
    source: SurfaceMap,
    gauge: SmoothGauge,
}

impl Lift for GaugedLift {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn eval(&self, x: f64, y: f64) -> CVec {
        let s = self
            .source
            .unit_value(x, y)
            .unwrap_or_else(|_| vec![C64::new(f64::NAN, 0.0); self.dim()]);
        let t = self.gauge.matrix(x, y);
        let mut v = linalg::scale(&s, t[(0, 0)]);
        linalg::axpy(&mut v, t[(1, 0)], &j_unchecked(&s));
        v
    }

    fn series(&self, x: f64, y: f64, order: usize) -> Option<Result<Jet>> {
        let run = || -> Result<Jet> {
            let s = self.source.jet_at((x, y), order)?;
            let (a, b) = self.gauge.column_series(x, y, order);
            Ok(s.mul_scalar(&a).add(&s.j().mul_scalar(&b)))
        };
        Some(run())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checkers::check_horizontal;
    use crate::families::{make_classified, ClassifiedSurface};
    use crate::surface::{Cell, PolynomialLift};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn clifford(n: usize) -> SurfaceMap {
        make_classified(&ClassifiedSurface::clifford(n)).unwrap().1
    }

    #[test]
    fn horizontal_lift_has_zero_d() {
        let d = compute_d(&clifford(2), (0.3, 0.2)).unwrap();
        assert!(d.max_abs() < 1e-15);
    }

    #[test]
    fn phase_gauge_gives_diagonal_d() {
        // θ = 0.4 sin(x + 0.3): ∂_z θ = 0.2 cos(x + 0.3)
        let g = SmoothGauge::phase([0.0, 0.4, 0.0, 0.0, 0.3, 0.0]);
        let s = g.apply(&clifford(1)).unwrap();
        let p = (0.5, 0.7);
        let d = compute_d(&s, p).unwrap();
        let dz = 0.2 * (p.0 + 0.3f64).cos();
        let want = CMat::diag(&[C64::new(0.0, dz), C64::new(0.0, -dz)]);
        assert!(d.sub(&want).max_abs() < 1e-14);
    }

    #[test]
    fn phase_gauge_integrates_in_closed_form() {
        let g = SmoothGauge::phase([0.0, 0.4, 0.0, 0.0, 0.3, 0.0]);
        let field = GaugeField::new(g.apply(&clifford(1)).unwrap());
        let (a, b) = ((0.1, 0.2), (1.3, 0.9));
        let r = integrate_gauge(&field, &l_path(a, b), &GaugeFrame::identity(a), 1e-3).unwrap();
        let th = |p: (f64, f64)| 0.4 * (p.0 + 0.3f64).sin();
        let e = C64::from_polar(1.0, -(th(b) - th(a)));
        let want = CMat::diag(&[e, e.conj()]);
        assert!(r.frame.t.sub(&want).max_abs() < 1e-11);
        assert!(r.max_unitarity_defect < 1e-12 && r.max_det_defect < 1e-12);
    }

    #[test]
    fn zero_field_keeps_t_constant() {
        let field = GaugeField::new(clifford(1));
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t0 = GaugeFrame {
            t: SmoothGauge::random(&mut rng, 1.0).matrix(0.0, 0.0),
            base: (0.0, 0.0),
        };
        let r = integrate_gauge(&field, &[(0.0, 0.0), (1.0, 2.0), (-0.5, 0.3)], &t0, 1e-2).unwrap();
        assert!(r.frame.t.sub(&t0.t).max_abs() < 1e-14);
    }

    #[test]
    fn bad_frame_rejected() {
        let field = GaugeField::new(clifford(1));
        let t0 = GaugeFrame {
            t: CMat::diag(&[C64::new(2.0, 0.0), C64::new(0.5, 0.0)]),
            base: (0.0, 0.0),
        };
        assert!(matches!(
            integrate_gauge(&field, &[(0.0, 0.0), (1.0, 0.0)], &t0, 1e-2),
            Err(Error::NotSpecialUnitary { .. })
        ));
        assert!(matches!(
            integrate_gauge(&field, &[(0.0, 0.0), (1.0, 0.0)], &GaugeFrame::identity((0.0, 0.0)), 0.0),
            Err(Error::StepUnderflow { .. })
        ));
    }

    #[test]
    fn reunitarize_projects_to_su2() {
        let m = CMat::from_rows(&[vec![C64::new(1.1, 0.1), C64::new(0.2, 0.0)], vec![C64::new(-0.1, 0.3), C64::new(0.9, -0.2)]]);
        let u = reunitarize(&m);
        let (a, b) = su2_defects(&u);
        assert!(a < 1e-14 && b < 1e-14);
        let v = su2(C64::from_polar(0.6, 0.3), C64::from_polar(0.8, -1.0));
        assert!(reunitarize(&v).sub(&v).max_abs() < 1e-15);
    }

    #[test]
    fn curvature_identity_matches_display() {
        // holds for any unit lift; check on a non-totally-real one
        let lift = PolynomialLift::from_terms(&[
            &[(C64::new(1.0, 0.0), 0, 0)],
            &[(C64::new(0.3, 0.1), 0, 1)],
            &[(C64::new(1.0, 0.0), 1, 0)],
            &[(C64::new(0.0, 0.5), 1, 1)],
        ]);
        let s = SurfaceMap::new(Arc::new(lift), Provider::Exact, Cell::family(1), "mixed").unwrap();
        for p in [(0.1, 0.2), (-0.3, 0.4)] {
            let lhs = integrability_matrix(&s, p).unwrap();
            let rhs = integrability_rhs(&s.jet_at(p, 1).unwrap()).unwrap();
            assert!(lhs.sub(&rhs).max_abs() < 1e-8, "{}", lhs.sub(&rhs).max_abs());
            assert!(rhs.max_abs() > 1e-2);
        }
    }

    #[test]
    fn horizontal_input_is_unchanged() {
        let l = clifford(1);
        let h = horizontalize(&l, (0.0, 0.0)).unwrap();
        for p in [(0.5, 0.5), (2.0, 1.0)] {
            let a = l.jet_at(p, 2).unwrap();
            let b = h.jet_at(p, 2).unwrap();
            assert!(a.max_deriv_distance(&b) < 1e-12);
        }
    }

    #[test]
    fn holomorphic_curve_is_not_integrable() {
        let lift = PolynomialLift::from_terms(&[&[(C64::new(1.0, 0.0), 0, 0)], &[], &[(C64::new(1.0, 0.0), 1, 0)], &[]]);
        let s = SurfaceMap::new(Arc::new(lift), Provider::Exact, Cell { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5 }, "line").unwrap();
        assert!(matches!(horizontalize(&s, (0.0, 0.0)), Err(Error::NonIntegrable { .. })));
    }

    #[test]
    fn gauged_clifford_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let l = clifford(1);
        let gauged = SmoothGauge::random(&mut rng, 0.5).apply(&l).unwrap();
        let g = Grid::new(l.cell, 4, 4).unwrap();
        assert!(!check_horizontal(&gauged, &g, 1e-6).unwrap().pass);
        let h = horizontalize(&gauged, (0.0, 0.0)).unwrap();
        let e = check_horizontal(&h, &g, 1e-6).unwrap();
        assert!(e.pass, "{}", e.max_residual);
    }
}
