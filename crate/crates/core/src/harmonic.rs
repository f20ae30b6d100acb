//! Harmonic sequences, isotropy order and the quaternionic orthogonality
//! relations between f_k and j f_{-k}.

use crate::checkers::{entry, PropertyEntry};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, inner, j_unchecked, CMat, CVec, C64};
use crate::surface::{Grid, SurfaceMap};
use crate::tolerances::SEQUENCE_DEGENERATE;
use serde::{Deserialize, Serialize};

/// Frames f_{-m}, ..., f_m at a point, unit-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarmonicSequence {
    pub point: (f64, f64),
    pub depth: usize,
    /// frames[k + depth] = f_k.
    pub frames: Vec<CVec>,
    /// norms[k + depth] = |f_k| before renormalization (1 for k = 0).
    pub norms: Vec<f64>,
}

impl HarmonicSequence {
    fn slot(&self, k: i32) -> usize {
        let m = self.depth as i32;
        assert!(k.abs() <= m, "frame index {k} outside ±{m}");
        (k + m) as usize
    }

    pub fn frame(&self, k: i32) -> &[C64] {
        &self.frames[self.slot(k)]
    }

    pub fn norm(&self, k: i32) -> f64 {
        self.norms[self.slot(k)]
    }

    /// ⟨f_i, f_j⟩ of the normalized frames.
    pub fn gram(&self, i: i32, j: i32) -> C64 {
        inner(self.frame(i), self.frame(j))
    }

    /// ⟨f_i, j f_j⟩ of the normalized frames.
    pub fn jgram(&self, i: i32, j: i32) -> C64 {
        inner(self.frame(i), &j_unchecked(self.frame(j)))
    }

    /// Full tables indexed from -depth, row-major.
    pub fn gram_table(&self) -> Vec<Vec<C64>> {
        let m = self.depth as i32;
        (-m..=m).map(|i| (-m..=m).map(|j| self.gram(i, j)).collect()).collect()
    }

    pub fn jgram_table(&self) -> Vec<Vec<C64>> {
        let m = self.depth as i32;
        (-m..=m).map(|i| (-m..=m).map(|j| self.jgram(i, j)).collect()).collect()
    }
}

fn terminated(index: i32, point: (f64, f64)) -> Error {
    Error::SequenceTerminated {
        index,
        x: point.0,
        y: point.1,
    }
}

/// One direction of the recursion from the unit-lift series.
fn march(s: &Jet, depth: usize, bar: bool) -> Result<(Vec<CVec>, Vec<f64>)> {
    let sign = if bar { -1 } else { 1 };
    let mut f = s.clone();
    let mut frames = Vec::with_capacity(depth);
    let mut norms = Vec::with_capacity(depth);
    for k in 1..=depth {
        let g = if bar { f.d_zbar()? } else { f.d_z()? };
        let f_t = f.truncate(g.order());
        // f is unit as a series, so the projection coefficient is ⟨g, f⟩
        let coef = g.inner(&f_t);
        let g = g.sub(&f_t.mul_scalar(&coef));
        let n2 = linalg::norm_sqr(g.value());
        if n2 < SEQUENCE_DEGENERATE {
            return Err(terminated(sign * k as i32, s.point));
        }
        f = g.normalized()?;
        frames.push(f.value().to_vec());
        norms.push(n2.sqrt());
    }
    Ok((frames, norms))
}

pub fn build_sequence(lift: &SurfaceMap, point: (f64, f64), depth: usize) -> Result<HarmonicSequence> {
    let s = lift.jet_at(point, depth)?;
    let (fwd, nf) = march(&s, depth, false)?;
    let (bwd, nb) = march(&s, depth, true)?;
    let mut frames: Vec<CVec> = bwd.into_iter().rev().collect();
    let mut norms: Vec<f64> = nb.into_iter().rev().collect();
    frames.push(s.value().to_vec());
    norms.push(1.0);
    frames.extend(fwd);
    norms.extend(nf);
    Ok(HarmonicSequence {
        point,
        depth,
        frames,
        norms,
    })
}

/// Isotropy order r, or a lower bound when no violation occurs up to depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Isotropy {
    Order(usize),
    AtLeast(usize),
}

/// Smallest r >= 1 with max_grid |⟨f_{r+1}, f_0⟩| > tol.
pub fn isotropy_order(lift: &SurfaceMap, grid: &Grid, depth: usize, tol: f64) -> Result<Isotropy> {
    use rayon::prelude::*;
    let pts = grid.points();
    let seqs: Vec<HarmonicSequence> = pts
        .par_iter()
        .map(|&p| build_sequence(lift, p, depth))
        .collect::<Result<_>>()?;
    for i in 2..=depth as i32 {
        let worst = seqs.iter().map(|s| s.gram(i, 0).norm()).fold(0.0, f64::max);
        if worst > tol {
            return Ok(Isotropy::Order(i as usize - 1));
        }
    }
    Ok(Isotropy::AtLeast(depth))
}

/// Orthogonal projector onto the span of two vectors.
fn span2_projector(a: &[C64], b: &[C64]) -> Result<CMat> {
    let e1 = linalg::normalize(a)?;
    let mut r = b.to_vec();
    linalg::axpy(&mut r, -inner(b, &e1), &e1);
    let e2 = linalg::normalize(&r)?;
    Ok(CMat::outer(&e1, &e1).add(&CMat::outer(&e2, &e2)))
}

fn gs_series(u: &Jet, basis: &[&Jet]) -> Jet {
    basis.iter().fold(u.clone(), |acc, e| {
        let e_t = e.truncate(acc.order());
        acc.sub(&e_t.mul_scalar(&acc.inner(&e_t)))
    })
}

/// Projectors of the HP^n harmonic sequence φ_0, ..., φ_depth, each step
/// taking ∂_z of an orthonormal frame of φ_k and projecting off φ_k.
pub fn hp_sequence(lift: &SurfaceMap, point: (f64, f64), depth: usize) -> Result<Vec<CMat>> {
    let s = lift.jet_at(point, depth)?;
    let mut basis = (s.clone(), s.j());
    let proj = |b: &(Jet, Jet)| CMat::outer(b.0.value(), b.0.value()).add(&CMat::outer(b.1.value(), b.1.value()));
    let mut out = vec![proj(&basis)];
    for k in 1..=depth {
        let (u1, u2) = (&basis.0, &basis.1);
        let w1 = gs_series(&u1.d_z()?, &[u1, u2]);
        let w2 = gs_series(&u2.d_z()?, &[u1, u2]);
        let (a, b) = if linalg::norm_sqr(w1.value()) >= linalg::norm_sqr(w2.value()) {
            (w1, w2)
        } else {
            (w2, w1)
        };
        if linalg::norm_sqr(a.value()) < SEQUENCE_DEGENERATE {
            return Err(terminated(k as i32, point));
        }
        let e1 = a.normalized()?;
        let b = gs_series(&b, &[&e1]);
        if linalg::norm_sqr(b.value()) < SEQUENCE_DEGENERATE {
            return Err(terminated(k as i32, point));
        }
        let e2 = b.normalized()?;
        basis = (e1, e2);
        out.push(proj(&basis));
    }
    Ok(out)
}

/// (relation residual, bundle residual) at one point.
pub fn prop35_residuals(lift: &SurfaceMap, point: (f64, f64), depth: usize) -> Result<(f64, f64)> {
    let seq = build_sequence(lift, point, depth)?;
    let m = depth as i32;
    let mut rel: f64 = 0.0;
    for k in 0..=m {
        for q in [k - 2, k - 1, k] {
            if q.abs() > m {
                continue;
            }
            rel = rel.max(seq.jgram(k, -q).norm());
            let jfk = j_unchecked(seq.frame(-k));
            rel = rel.max(inner(&jfk, seq.frame(q)).norm());
        }
    }
    let phis = hp_sequence(lift, point, depth)?;
    let mut bundle: f64 = 0.0;
    for (k, phi) in phis.iter().enumerate() {
        let k = k as i32;
        let p = span2_projector(seq.frame(k), &j_unchecked(seq.frame(-k)))?;
        bundle = bundle.max(p.sub(phi).max_abs());
    }
    Ok((rel, bundle))
}

pub fn check_prop35(lift: &SurfaceMap, grid: &Grid, depth: usize, tol: f64) -> Result<PropertyEntry> {
    entry("prop35", lift, grid, tol, |p| {
        let (a, b) = prop35_residuals(lift, p, depth)?;
        Ok(Some(a.max(b)))
    })
}
