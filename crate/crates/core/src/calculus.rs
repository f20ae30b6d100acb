//! Horizontal differential, induced metric, angle functions and curvature.

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, inner, j_unchecked, CVec, C64};
use crate::surface::{FdConfig, Provider, SurfaceMap};
use crate::tolerances::DEGENERATE_METRIC;
use serde::{Deserialize, Serialize};

fn need_order(jet: &Jet, k: usize) -> Result<()> {
    if jet.order() < k {
        return Err(Error::JetOrder {
            requested: k,
            max: jet.order(),
        });
    }
    Ok(())
}

/// Remove the components along s and js.
pub(crate) fn horizontal_part(v: &[C64], s: &[C64], js: &[C64]) -> CVec {
    let mut out = v.to_vec();
    linalg::axpy(&mut out, -inner(v, s), s);
    linalg::axpy(&mut out, -inner(v, js), js);
    out
}

/// (d^H s(∂_z), d^H s(∂_z̄)).
pub fn horizontal_diff(jet: &Jet) -> Result<(CVec, CVec)> {
    need_order(jet, 1)?;
    let s = jet.value();
    let js = j_unchecked(s);
    Ok((
        horizontal_part(jet.coeff(1, 0), s, &js),
        horizontal_part(jet.coeff(0, 1), s, &js),
    ))
}

fn degenerate(jet: &Jet, value: f64) -> Error {
    Error::Degenerate {
        x: jet.point.0,
        y: jet.point.1,
        value,
    }
}

/// e^{2u} = |d^H s(∂_z)|² + |d^H s(∂_z̄)|².
pub fn metric_factor(jet: &Jet) -> Result<f64> {
    let (a, b) = horizontal_diff(jet)?;
    let f = linalg::norm_sqr(&a) + linalg::norm_sqr(&b);
    if f < DEGENERATE_METRIC {
        return Err(degenerate(jet, f));
    }
    Ok(f)
}

/// Pointwise angle data of the quaternionic Kähler structure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleReport {
    pub cos_a1: f64,
    pub cos_a2: f64,
    pub cos_a3: f64,
    pub cos_sq_alpha: f64,
    pub point: (f64, f64),
}

pub fn angles(jet: &Jet) -> Result<AngleReport> {
    let (a, b) = horizontal_diff(jet)?;
    let na = linalg::norm_sqr(&a);
    let nb = linalg::norm_sqr(&b);
    let sum = na + nb;
    if sum < DEGENERATE_METRIC {
        return Err(degenerate(jet, sum));
    }
    // P = ⟨dHz, j dHz̄⟩; the second pairing ⟨j dHz̄, dHz⟩ is its conjugate
    let jb = j_unchecked(&b);
    let p = inner(&a, &jb);
    let q = inner(&jb, &a);
    let cos_a1 = (na - nb) / sum;
    let cos_a2 = (C64::i() * (p - q)).re / sum;
    let cos_a3 = (p + q).re / sum;
    let cos_sq_alpha = ((na - nb).powi(2) + 4.0 * p.norm_sqr()) / (sum * sum);
    Ok(AngleReport {
        cos_a1,
        cos_a2,
        cos_a3,
        cos_sq_alpha,
        point: jet.point,
    })
}

/// s^⊥ v = v - ⟨v, s⟩ s.
pub(crate) fn perp(v: &[C64], s: &[C64]) -> CVec {
    let mut out = v.to_vec();
    linalg::axpy(&mut out, -inner(v, s), s);
    out
}

/// Kähler angle θ of [s] in CP^{2n+1}, tan(θ/2) = |s^⊥ ∂_z̄ s| / |s^⊥ ∂_z s|.
pub fn cp_kahler_angle(jet: &Jet) -> Result<f64> {
    need_order(jet, 1)?;
    let s = jet.value();
    let num = linalg::norm(&perp(jet.coeff(0, 1), s));
    let den = linalg::norm(&perp(jet.coeff(1, 0), s));
    if num * num + den * den < DEGENERATE_METRIC {
        return Err(degenerate(jet, num * num + den * den));
    }
    // atan2 returns π/2 when den = 0, giving θ = π
    Ok(2.0 * num.atan2(den))
}

/// Step used for second differences of u = ½ log e^{2u}.
///
/// Ten times the jet step: the metric factor is itself a first-derivative
/// quantity, so a Laplacian at the jet step would amplify its rounding.
pub fn curvature_config(provider: &Provider) -> FdConfig {
    let base = match provider {
        Provider::Exact => FdConfig::default(),
        Provider::FiniteDifference(c) => *c,
    };
    FdConfig {
        step: 10.0 * base.step,
        richardson: base.richardson,
    }
}

/// K = -4 e^{-2u} ∂_z ∂_z̄ u by a five-point Laplacian with Richardson levels.
pub fn gauss_curvature(surface: &SurfaceMap, point: (f64, f64)) -> Result<f64> {
    let cfg = curvature_config(&surface.provider);
    let u_at = |x: f64, y: f64| -> Result<f64> {
        let j = surface.jet_at((x, y), 1)?;
        Ok(0.5 * metric_factor(&j)?.ln())
    };
    let (x, y) = point;
    let u0 = u_at(x, y)?;
    let lap = |h: f64| -> Result<f64> {
        let s = u_at(x + h, y)? + u_at(x - h, y)? + u_at(x, y + h)? + u_at(x, y - h)?;
        Ok((s - 4.0 * u0) / (h * h))
    };
    let mut level: Vec<f64> = (0..=cfg.richardson)
        .map(|i| lap(cfg.step / 2f64.powi(i as i32)))
        .collect::<Result<_>>()?;
    for k in 1..=cfg.richardson {
        let f = 4f64.powi(k as i32);
        level = level.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
    }
    // Δu = 4 ∂_z ∂_z̄ u
    Ok(-(-2.0 * u0).exp() * level[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{Cell, PolynomialLift};
    use std::sync::Arc;

    fn r(v: f64) -> C64 {
        C64::new(v, 0.0)
    }

    fn poly(terms: &[&[(C64, usize, usize)]]) -> SurfaceMap {
        SurfaceMap::new(
            Arc::new(PolynomialLift::from_terms(terms)),
            Provider::Exact,
            Cell::family(1),
            "poly",
        )
        .unwrap()
    }

    #[test]
    fn holomorphic_horizontal_curve_is_totally_complex() {
        let s = poly(&[&[(r(1.0), 0, 0)], &[], &[(r(1.0), 1, 0)], &[]]);
        let a = angles(&s.jet_at((0.0, 0.0), 1).unwrap()).unwrap();
        assert!((a.cos_sq_alpha - 1.0).abs() < 1e-14);
        let fd = s.with_provider(Provider::FiniteDifference(FdConfig::default()));
        let b = angles(&fd.jet_at((0.0, 0.0), 1).unwrap()).unwrap();
        assert!((b.cos_sq_alpha - 1.0).abs() < 1e-7);
    }

    #[test]
    fn kahler_angle_holomorphic_and_conjugate() {
        let h = poly(&[&[(r(1.0), 0, 0)], &[(r(1.0), 1, 0)]]);
        let a = poly(&[&[(r(1.0), 0, 0)], &[(r(1.0), 0, 1)]]);
        assert!(cp_kahler_angle(&h.jet_at((0.2, 0.1), 1).unwrap()).unwrap().abs() < 1e-14);
        let t = cp_kahler_angle(&a.jet_at((0.2, 0.1), 1).unwrap()).unwrap();
        assert!((t - std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn curvature_of_complex_line() {
        // u = -log(1+|z|^2) so K = 4 exactly
        let s = poly(&[&[(r(1.0), 0, 0)], &[], &[(r(1.0), 1, 0)], &[]]);
        let k = gauss_curvature(&s, (0.0, 0.0)).unwrap();
        assert!((k - 4.0).abs() < 1e-4, "{k}");
        let k2 = gauss_curvature(&s, (0.3, -0.2)).unwrap();
        assert!((k2 - 4.0).abs() < 1e-4, "{k2}");
    }

    #[test]
    fn vertical_curve_is_degenerate() {
        // (1, z) spans a single quaternionic line: the HP point is constant
        let s = poly(&[&[(r(1.0), 0, 0)], &[(r(1.0), 1, 0)], &[], &[]]);
        let j = s.jet_at((0.1, 0.0), 1).unwrap();
        assert!(matches!(metric_factor(&j), Err(Error::Degenerate { .. })));
        assert!(gauss_curvature(&s, (0.0, 0.0)).is_err());
    }

    #[test]
    fn lower_order_jet_rejected() {
        let s = poly(&[&[(r(1.0), 0, 0)], &[(r(1.0), 1, 0)]]);
        let j = s.jet_at((0.1, 0.0), 0).unwrap();
        assert!(horizontal_diff(&j).is_err());
    }
}
