//! Exponential families and the classified flat totally real minimal surfaces.

use crate::error::{Error, Result};
use crate::jet::{multi_indices, Jet};
use crate::linalg::{numerical_rank, CMat, CVec, C64};
use crate::surface::{Cell, Grid, Lift, Provider, SurfaceMap};
use crate::tolerances::RANK;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

/// Parameters θ_k, r_k of V_0 = (e^{a_k z - ā_k z̄} √r_k)_k with a_k = e^{iθ_k}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentialFamily {
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
    /// Ambient complex dimension 2n+2; components fill the leading slots.
    pub ambient_slots: usize,
}

const WEIGHT_SUM_TOL: f64 = 1e-12;

impl ExponentialFamily {
    /// Top index m.
    pub fn m(&self) -> usize {
        self.thetas.len().saturating_sub(1)
    }

    pub fn exponents(&self) -> Vec<C64> {
        self.thetas.iter().map(|t| C64::from_polar(1.0, *t)).collect()
    }

    /// Σ a_k r_k; the family is CP-minimal exactly when this vanishes.
    pub fn moment(&self) -> C64 {
        self.exponents().iter().zip(&self.weights).map(|(a, r)| a * r).sum()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidFamily(s.to_string()));
        if self.thetas.is_empty() || self.thetas.len() != self.weights.len() {
            return bad("thetas and weights must be non-empty and of equal length");
        }
        if self.thetas[0] != 0.0 {
            return bad("theta_0 must be 0");
        }
        if self.thetas.windows(2).any(|w| !(w[0] < w[1])) || self.thetas.iter().any(|t| !(*t < TAU)) {
            return bad("thetas must increase strictly and stay below 2π");
        }
        if self.weights.iter().any(|r| !(*r > 0.0)) {
            return bad("weights must be positive");
        }
        if (self.weights.iter().sum::<f64>() - 1.0).abs() > WEIGHT_SUM_TOL {
            return bad("weights must sum to 1");
        }
        if self.ambient_slots < self.thetas.len() || self.ambient_slots % 2 != 0 {
            return bad("ambient_slots must be even and hold every component");
        }
        Ok(())
    }
}

/// s(z) = M (ξ_k e^{a_k z - ā_k z̄})_k for a constant placement matrix M.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentialLift {
    pub placement: CMat,
    pub exponents: Vec<C64>,
    pub amplitudes: Vec<f64>,
}

impl ExponentialLift {
    pub fn new(placement: CMat, exponents: Vec<C64>, amplitudes: Vec<f64>) -> Self {
        assert_eq!(placement.cols, exponents.len());
        assert_eq!(exponents.len(), amplitudes.len());
        ExponentialLift {
            placement,
            exponents,
            amplitudes,
        }
    }

    /// Left-multiply the placement by a constant matrix.
    pub fn transformed(&self, u: &CMat) -> Self {
        ExponentialLift {
            placement: u.matmul(&self.placement),
            ..self.clone()
        }
    }

    fn phases(&self, x: f64, y: f64) -> Vec<C64> {
        let z = C64::new(x, y);
        self.exponents
            .iter()
            .zip(&self.amplitudes)
            .map(|(a, xi)| (a * z - a.conj() * z.conj()).exp() * xi)
            .collect()
    }
}

impl Lift for ExponentialLift {
    fn dim(&self) -> usize {
        self.placement.rows
    }

    fn eval(&self, x: f64, y: f64) -> CVec {
        self.placement.apply(&self.phases(x, y))
    }

    fn series(&self, x: f64, y: f64, order: usize) -> Option<Result<Jet>> {
        let base = self.phases(x, y);
        let mut fact = vec![1.0; order + 1];
        for k in 1..=order {
            fact[k] = fact[k - 1] * k as f64;
        }
        let coeffs = multi_indices(order)
            .map(|(p, q)| {
                let v: CVec = base
                    .iter()
                    .zip(&self.exponents)
                    .map(|(b, a)| b * a.powu(p as u32) * (-a.conj()).powu(q as u32) / (fact[p] * fact[q]))
                    .collect();
                self.placement.apply(&v)
            })
            .collect();
        Some(Ok(Jet::from_coeffs((x, y), order, coeffs)))
    }
}

/// V_0 with components in the leading slots and exact jets.
pub fn make_exponential(params: &ExponentialFamily) -> Result<SurfaceMap> {
    params.validate()?;
    let m1 = params.thetas.len();
    let mut placement = CMat::zeros(params.ambient_slots, m1);
    for k in 0..m1 {
        placement[(k, k)] = C64::new(1.0, 0.0);
    }
    let lift = ExponentialLift::new(
        placement,
        params.exponents(),
        params.weights.iter().map(|r| r.sqrt()).collect(),
    );
    let n = params.ambient_slots / 2 - 1;
    SurfaceMap::new(Arc::new(lift), Provider::Exact, Cell::family(n), "exponential")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Variant {
    Clifford,
    Companion,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LiftVariant {
    /// Clifford exponents interleaved with zero slots.
    InterleavedZeros,
    /// Even n: alternating weights and a free unit phase on the odd slots.
    FullEvenN,
    /// All 2n+2 exponents e^{ikπ/(n+1)}, uniform weights, alternating signs.
    FullSigned,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedSurface {
    pub n: usize,
    pub variant: Variant,
    pub lift_variant: LiftVariant,
    /// Unit phase w for FullEvenN.
    pub phase: C64,
    /// r_odd / r_even for FullEvenN; must differ from 1.
    pub weight_ratio: f64,
}

impl ClassifiedSurface {
    pub fn clifford(n: usize) -> Self {
        ClassifiedSurface {
            n,
            variant: Variant::Clifford,
            lift_variant: LiftVariant::InterleavedZeros,
            phase: C64::new(1.0, 0.0),
            weight_ratio: 0.5,
        }
    }

    pub fn companion(n: usize) -> Self {
        ClassifiedSurface {
            variant: Variant::Companion,
            lift_variant: LiftVariant::FullSigned,
            ..Self::clifford(n)
        }
    }

    pub fn companion_even(n: usize, phase: C64) -> Self {
        ClassifiedSurface {
            variant: Variant::Companion,
            lift_variant: LiftVariant::FullEvenN,
            phase,
            ..Self::clifford(n)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::IncompatibleSpec(s.to_string()));
        match (self.variant, self.lift_variant) {
            (Variant::Clifford, LiftVariant::InterleavedZeros) => {}
            (Variant::Companion, LiftVariant::FullSigned) => {}
            (Variant::Companion, LiftVariant::FullEvenN) => {
                if self.n % 2 != 0 {
                    return bad("FullEvenN requires even n");
                }
                if (self.phase.norm() - 1.0).abs() > 1e-12 {
                    return bad("FullEvenN phase must have unit modulus");
                }
                if !(self.weight_ratio > 0.0) || (self.weight_ratio - 1.0).abs() < 1e-12 {
                    return bad("FullEvenN weight ratio must be positive and differ from 1");
                }
            }
            _ => return bad("InterleavedZeros pairs with Clifford; full lifts pair with Companion"),
        }
        Ok(())
    }

    /// Exponents and weights carried by the lift.
    pub fn lift_family(&self) -> (Vec<C64>, Vec<f64>) {
        let n = self.n;
        match self.lift_variant {
            LiftVariant::InterleavedZeros => (
                (0..=n).map(|k| C64::from_polar(1.0, TAU * k as f64 / (n + 1) as f64)).collect(),
                vec![1.0 / (n + 1) as f64; n + 1],
            ),
            LiftVariant::FullSigned => (
                companion_exponents(n),
                vec![1.0 / (2 * n + 2) as f64; 2 * n + 2],
            ),
            LiftVariant::FullEvenN => {
                let r0 = 1.0 / ((n + 1) as f64 * (1.0 + self.weight_ratio));
                let r1 = r0 * self.weight_ratio;
                (
                    companion_exponents(n),
                    (0..2 * n + 2).map(|k| if k % 2 == 0 { r0 } else { r1 }).collect(),
                )
            }
        }
    }
}

fn companion_exponents(n: usize) -> Vec<C64> {
    (0..2 * n + 2)
        .map(|k| C64::from_polar(1.0, PI * k as f64 / (n + 1) as f64))
        .collect()
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The lift of a classified surface as an exponential lift.
pub fn classified_lift(spec: &ClassifiedSurface) -> Result<ExponentialLift> {
    spec.validate()?;
    let n = spec.n;
    let dim = 2 * n + 2;
    let (a, r) = spec.lift_family();
    let xi: Vec<f64> = r.iter().map(|v| v.sqrt()).collect();
    let mut m = CMat::zeros(dim, a.len());
    match spec.lift_variant {
        LiftVariant::InterleavedZeros => {
            for k in 0..=n {
                m[(2 * k, k)] = C64::new(1.0, 0.0);
            }
        }
        LiftVariant::FullSigned => {
            for t in 0..=n {
                m[(2 * t, t)] = C64::new(1.0, 0.0);
                m[(2 * t + 1, n + 1 + t)] = C64::new(sign(n + 1 - t), 0.0);
            }
        }
        LiftVariant::FullEvenN => {
            for t in 0..=n {
                m[(2 * t, t)] = C64::new(1.0, 0.0);
                m[(2 * t + 1, n + 1 + t)] = spec.phase * sign(t + 1);
            }
        }
    }
    Ok(ExponentialLift::new(m, a, xi))
}

/// (surface in HP^n, lift in C^{2n+2}); the surface is represented by the
/// same unit lift, so its HPoint field is the twistor image of the lift.
pub fn make_classified(spec: &ClassifiedSurface) -> Result<(SurfaceMap, SurfaceMap)> {
    let lift: Arc<dyn Lift> = Arc::new(classified_lift(spec)?);
    let cell = Cell::family(spec.n);
    let name = format!("{:?}/{:?}/n={}", spec.variant, spec.lift_variant, spec.n);
    let surface = SurfaceMap::new(lift.clone(), Provider::Exact, cell, format!("surface {name}"))?;
    let lift = SurfaceMap::new(lift, Provider::Exact, cell, format!("lift {name}"))?;
    Ok((surface, lift))
}

/// The CP^n form with exponents e^{ikπ/(n+1)}, k = 0..n, uniform weights,
/// on interleaved slots (for Clifford this is the classified lift itself).
pub fn stated_cp_form(variant: Variant, n: usize) -> Result<SurfaceMap> {
    let step = match variant {
        Variant::Clifford => TAU,
        Variant::Companion => PI,
    } / (n + 1) as f64;
    let a: Vec<C64> = (0..=n).map(|k| C64::from_polar(1.0, step * k as f64)).collect();
    let mut m = CMat::zeros(2 * n + 2, n + 1);
    for k in 0..=n {
        m[(2 * k, k)] = C64::new(1.0, 0.0);
    }
    let lift = ExponentialLift::new(m, a, vec![(1.0 / (n + 1) as f64).sqrt(); n + 1]);
    SurfaceMap::new(Arc::new(lift), Provider::Exact, Cell::family(n), format!("{variant:?} stated form"))
}

/// Numerical rank of the lift values sampled over a grid.
pub fn lift_span_rank(lift: &SurfaceMap, grid: &Grid) -> Result<usize> {
    let pts = grid.points();
    let mut m = CMat::zeros(lift.dim(), pts.len());
    for (c, &(x, y)) in pts.iter().enumerate() {
        let v = lift.unit_value(x, y)?;
        for (r, val) in v.into_iter().enumerate() {
            m[(r, c)] = val;
        }
    }
    Ok(numerical_rank(&m, RANK))
}

/// The two generators exercised by the acceptance suite.
pub fn classified_corpus(n: usize) -> Vec<ClassifiedSurface> {
    vec![ClassifiedSurface::clifford(n), ClassifiedSurface::companion(n)]
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;

    #[test]
    fn family_validation() {
        let ok = ExponentialFamily {
            thetas: vec![0.0, PI],
            weights: vec![0.5, 0.5],
            ambient_slots: 2,
        };
        assert!(ok.validate().is_ok());
        assert!(ok.moment().norm() < 1e-15);
        let mut bad = ok.clone();
        bad.weights = vec![0.5, 0.6];
        assert!(bad.validate().is_err());
        bad = ok.clone();
        bad.thetas = vec![0.0, 0.0];
        assert!(bad.validate().is_err());
        bad = ok.clone();
        bad.ambient_slots = 3;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn exponential_component_derivatives() {
        let a = C64::from_polar(1.0, 0.7);
        let lift = ExponentialLift::new(CMat::identity(2), vec![a, -a], vec![1.0, 0.0]);
        let j = lift.series(0.2, 0.4, 2).unwrap().unwrap();
        let v = j.value()[0];
        assert!((j.deriv(1, 0)[0] - a * v).norm() < 1e-15);
        assert!((j.deriv(0, 1)[0] + a.conj() * v).norm() < 1e-15);
        assert!((j.deriv(1, 1)[0] + v).norm() < 1e-15);
    }

    #[test]
    fn clifford_layout() {
        let l = classified_lift(&ClassifiedSurface::clifford(2)).unwrap();
        let v = l.eval(0.3, 0.9);
        assert_eq!(v.len(), 6);
        assert!(v[1] == ZERO && v[3] == ZERO && v[5] == ZERO);
        assert!(v.iter().step_by(2).all(|c| (c.norm() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15));
    }

    #[test]
    fn full_signed_n1_signs() {
        let l = classified_lift(&ClassifiedSurface::companion(1)).unwrap();
        let v = l.eval(0.0, 0.0);
        // pairs (e_0, (-1)^2 e_2), (e_1, (-1)^1 e_3), ξ = 1/2
        let want = [0.5, 0.5, 0.5, -0.5];
        for (c, w) in v.iter().zip(want) {
            assert!((c - C64::new(w, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn incompatible_specs() {
        let mut s = ClassifiedSurface::clifford(1);
        s.lift_variant = LiftVariant::FullSigned;
        assert!(make_classified(&s).is_err());
        assert!(make_classified(&ClassifiedSurface::companion_even(1, C64::new(1.0, 0.0))).is_err());
        assert!(make_classified(&ClassifiedSurface::companion_even(2, C64::new(0.0, 1.0))).is_ok());
    }
}
