//! Invariants of exponential-family lifts under constant symplectic maps:
//! the exponents a_k and weights r_k = |c_k|² of s = Σ c_k e^{a_k z - ā_k z̄}.

use crate::error::{Error, Result};
use crate::linalg::{inner, CMat, C64, ONE};
use crate::surface::{Grid, SurfaceMap};
use crate::tolerances::RANK;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvariantSet {
    /// Exponents sorted by argument in [0, 2π).
    pub exponents: Vec<C64>,
    pub weights: Vec<f64>,
}

impl InvariantSet {
    /// The pairs (a_k, -ā_k) acting as ∂_z and ∂_z̄ eigenvalues.
    pub fn pairs(&self) -> Vec<(C64, C64)> {
        self.exponents.iter().map(|a| (*a, -a.conj())).collect()
    }

    pub fn matches(&self, other: &InvariantSet, tol: f64) -> bool {
        self.exponents.len() == other.exponents.len()
            && self.exponents.iter().zip(&other.exponents).all(|(a, b)| (a - b).norm() <= tol)
            && self.weights.iter().zip(&other.weights).all(|(a, b)| (a - b).abs() <= tol)
    }
}

const CONSISTENCY: f64 = 1e-6;

fn not_exp(msg: String) -> Error {
    Error::NotExponential(msg)
}

/// Extract the invariants from the ∂_z action on the span of grid samples.
pub fn congruence_invariants(surface: &SurfaceMap, grid: &Grid) -> Result<InvariantSet> {
    let pts = grid.points();
    let dim = surface.dim();
    let mut s = CMat::zeros(dim, pts.len());
    let mut dz = CMat::zeros(dim, pts.len());
    let mut dzb = CMat::zeros(dim, pts.len());
    for (c, &p) in pts.iter().enumerate() {
        let jet = surface.jet_at(p, 1)?;
        for r in 0..dim {
            s[(r, c)] = jet.value()[r];
            dz[(r, c)] = jet.coeff(1, 0)[r];
            dzb[(r, c)] = jet.coeff(0, 1)[r];
        }
    }
    let svd = s.to_nalgebra().svd(true, true);
    let (u, vt) = (svd.u.expect("U"), svd.v_t.expect("V^T"));
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&k| svd.singular_values[k] > RANK).collect();
    let r = keep.len();
    if r == 0 {
        return Err(not_exp("zero lift".into()));
    }
    // basis U_r and the operator L_r = U_r^* ∂s V_r Σ_r^{-1}
    let ur_cols: Vec<Vec<C64>> = keep.iter().map(|&k| u.column(k).iter().copied().collect()).collect();
    let ur = CMat::from_cols(&ur_cols.iter().map(Vec::as_slice).collect::<Vec<_>>());
    let vr_sinv = {
        let mut m = CMat::zeros(pts.len(), r);
        for (c, &k) in keep.iter().enumerate() {
            for i in 0..pts.len() {
                m[(i, c)] = vt[(k, i)].conj() / svd.singular_values[k];
            }
        }
        m
    };
    let l = ur.adjoint().matmul(&dz).matmul(&vr_sinv);
    let lb = ur.adjoint().matmul(&dzb).matmul(&vr_sinv);
    let sr = ur.adjoint().matmul(&s);
    let scale = dz.max_abs().max(1.0);
    let fit = ur.matmul(&l).matmul(&sr).sub(&dz).max_abs() / scale;
    if fit > CONSISTENCY {
        return Err(not_exp(format!("∂_z s is not linear in s (residual {fit:.3e})")));
    }
    let schur = l.to_nalgebra().schur();
    let (_, t) = schur.unpack();
    let eig: Vec<C64> = (0..r).map(|k| t[(k, k)]).collect();
    for (k, a) in eig.iter().enumerate() {
        if (a.norm() - 1.0).abs() > CONSISTENCY {
            return Err(not_exp(format!("exponent {a} is not unimodular")));
        }
        if eig[..k].iter().any(|b| (a - b).norm() <= CONSISTENCY) {
            return Err(not_exp("repeated exponent".into()));
        }
    }
    // spectral projectors P_k = Π_{l≠k} (L - a_l)/(a_k - a_l)
    let id = CMat::identity(r);
    let projectors: Vec<CMat> = (0..r)
        .map(|k| {
            (0..r).filter(|&q| q != k).fold(id.clone(), |acc, q| {
                acc.matmul(&l_shift(&l, eig[q])).scale(ONE / (eig[k] - eig[q]))
            })
        })
        .collect();
    let lbar = projectors
        .iter()
        .zip(&eig)
        .fold(CMat::zeros(r, r), |acc, (p, a)| acc.add(&p.scale(-a.conj())));
    let bar_fit = lbar.sub(&lb).max_abs() / scale;
    if bar_fit > CONSISTENCY {
        return Err(not_exp(format!("∂_z̄ s is inconsistent with the exponents (residual {bar_fit:.3e})")));
    }
    let mut weights = vec![0.0; r];
    for c in 0..pts.len() {
        let v = sr.col(c);
        for (k, p) in projectors.iter().enumerate() {
            let pv = p.apply(&v);
            weights[k] += inner(&pv, &pv).re / pts.len() as f64;
        }
    }
    let mut pairs: Vec<(C64, f64)> = eig.into_iter().zip(weights).collect();
    // arguments just below 2π belong with 0
    pairs.sort_by(|a, b| key(a.0).total_cmp(&key(b.0)));
    let (exponents, weights) = pairs.into_iter().unzip();
    Ok(InvariantSet { exponents, weights })
}

fn key(a: C64) -> f64 {
    let t = a.arg().rem_euclid(TAU);
    if TAU - t < 1e-9 {
        0.0
    } else {
        t
    }
}

fn l_shift(l: &CMat, a: C64) -> CMat {
    l.sub(&CMat::identity(l.rows).scale(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{make_classified, stated_cp_form, ClassifiedSurface, Variant};
    use crate::linalg::random_symplectic;
    use crate::surface::{Cell, PolynomialLift, Provider};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;
    use std::sync::Arc;

    fn roots(step: f64, n: usize) -> Vec<C64> {
        (0..=n).map(|k| C64::from_polar(1.0, step * k as f64)).collect()
    }

    #[test]
    fn clifford_invariants() {
        let (_, lift) = make_classified(&ClassifiedSurface::clifford(2)).unwrap();
        let inv = congruence_invariants(&lift, &lift.default_grid()).unwrap();
        let want = InvariantSet {
            exponents: roots(2.0 * PI / 3.0, 2),
            weights: vec![1.0 / 3.0; 3],
        };
        assert!(inv.matches(&want, 1e-9), "{inv:?}");
    }

    #[test]
    fn companion_stated_form_differs() {
        let s = stated_cp_form(Variant::Companion, 2).unwrap();
        let inv = congruence_invariants(&s, &s.default_grid()).unwrap();
        let want = InvariantSet {
            exponents: roots(PI / 3.0, 2),
            weights: vec![1.0 / 3.0; 3],
        };
        assert!(inv.matches(&want, 1e-9), "{inv:?}");
        let (_, cl) = make_classified(&ClassifiedSurface::clifford(2)).unwrap();
        assert!(!inv.matches(&congruence_invariants(&cl, &cl.default_grid()).unwrap(), 1e-3));
    }

    #[test]
    fn symplectic_image_has_same_invariants() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = ClassifiedSurface::clifford(2);
        let (_, lift) = make_classified(&spec).unwrap();
        let u = random_symplectic(&mut rng, 2);
        let moved = crate::families::classified_lift(&spec).unwrap().transformed(&u);
        let moved = SurfaceMap::new(Arc::new(moved), Provider::Exact, lift.cell, "moved").unwrap();
        let g = lift.default_grid();
        let a = congruence_invariants(&lift, &g).unwrap();
        let b = congruence_invariants(&moved, &g).unwrap();
        assert!(a.matches(&b, 1e-9));
    }

    #[test]
    fn polynomial_is_not_exponential() {
        let lift = PolynomialLift::from_terms(&[&[(ONE, 0, 0)], &[(ONE, 1, 0)]]);
        let s = SurfaceMap::new(Arc::new(lift), Provider::Exact, Cell::family(0), "line").unwrap();
        let err = congruence_invariants(&s, &s.default_grid()).unwrap_err();
        assert!(matches!(err, Error::NotExponential(_)));
    }
}
