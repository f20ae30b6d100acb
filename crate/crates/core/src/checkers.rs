//! Residual checks for horizontality, total reality, minimality and flatness.

use crate::calculus::{self, horizontal_diff, perp};
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg::{self, inner, j_unchecked, CMat, CVec, C64};
use crate::surface::{FdConfig, Grid, Provider, SurfaceMap};
use crate::tolerances::DEGENERATE_METRIC;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Verdict for one property over a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyEntry {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// First grid point attaining the maximum; `None` if no point was usable.
    pub worst_point: Option<(f64, f64)>,
    pub degenerate_points: Vec<(f64, f64)>,
    pub provider: String,
    /// Target value for isometry checks.
    pub target: Option<f64>,
}

/// All entries for one surface on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub grid: Grid,
    pub entries: Vec<PropertyEntry>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyEntry> {
        self.entries.iter().find(|e| e.name == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Target {
    HP,
    CP,
}

/// Per-point residuals; `Ok(None)` and degenerate errors mark excluded points.
pub(crate) fn scan_grid<F>(grid: &Grid, f: F) -> Result<(f64, Option<(f64, f64)>, Vec<(f64, f64)>)>
where
    F: Fn((f64, f64)) -> Result<Option<f64>> + Sync,
{
    let pts = grid.points();
    let vals: Vec<Result<Option<f64>>> = pts
        .par_iter()
        .map(|&p| match f(p) {
            Err(Error::Degenerate { .. }) => Ok(None),
            other => other,
        })
        .collect();
    let mut worst: Option<(f64, (f64, f64))> = None;
    let mut degenerate = Vec::new();
    for (p, v) in pts.iter().zip(vals) {
        match v? {
            None => degenerate.push(*p),
            Some(r) => {
                let r = if r.is_nan() { f64::INFINITY } else { r };
                if worst.map_or(true, |(w, _)| r > w) {
                    worst = Some((r, *p));
                }
            }
        }
    }
    match worst {
        None => Err(Error::AllDegenerate),
        Some((r, p)) => Ok((r, Some(p), degenerate)),
    }
}

pub(crate) fn entry(name: &str, surface: &SurfaceMap, grid: &Grid, tol: f64, f: impl Fn((f64, f64)) -> Result<Option<f64>> + Sync) -> Result<PropertyEntry> {
    let (max_residual, worst_point, degenerate_points) = scan_grid(grid, f)?;
    Ok(PropertyEntry {
        name: name.to_string(),
        max_residual,
        tolerance: tol,
        pass: max_residual <= tol,
        worst_point,
        degenerate_points,
        provider: surface.provider.kind().to_string(),
        target: None,
    })
}

fn hp_metric_ok(dhz: &[C64], dhzb: &[C64]) -> bool {
    linalg::norm_sqr(dhz) + linalg::norm_sqr(dhzb) >= DEGENERATE_METRIC
}

fn cp_metric_ok(jet: &Jet) -> bool {
    let s = jet.value();
    let a = perp(jet.coeff(1, 0), s);
    let b = perp(jet.coeff(0, 1), s);
    linalg::norm_sqr(&a) + linalg::norm_sqr(&b) >= DEGENERATE_METRIC
}

/// HP: |dHz|² - |dHz̄|² and ⟨dHz, j dHz̄⟩; CP: |∂_z s|² - |∂_z̄ s|².
pub fn totally_real_residual(jet: &Jet, target: Target) -> Result<Option<f64>> {
    match target {
        Target::HP => {
            let (a, b) = horizontal_diff(jet)?;
            if !hp_metric_ok(&a, &b) {
                return Ok(None);
            }
            let gap = (linalg::norm_sqr(&a) - linalg::norm_sqr(&b)).abs();
            let pair = inner(&a, &j_unchecked(&b)).norm();
            Ok(Some(gap.max(pair)))
        }
        Target::CP => {
            if !cp_metric_ok(jet) {
                return Ok(None);
            }
            Ok(Some(
                (linalg::norm_sqr(jet.coeff(1, 0)) - linalg::norm_sqr(jet.coeff(0, 1))).abs(),
            ))
        }
    }
}

pub fn check_totally_real(surface: &SurfaceMap, target: Target, grid: &Grid, tol: f64) -> Result<PropertyEntry> {
    let name = match target {
        Target::HP => "totally_real_hp",
        Target::CP => "totally_real_cp",
    };
    entry(name, surface, grid, tol, |p| totally_real_residual(&surface.jet_at(p, 1)?, target))
}

/// Residual vector of the CP^{2n+1} harmonic-map equation for a unit lift.
pub fn minimal_cp_vector(jet: &Jet) -> Result<CVec> {
    if jet.order() < 2 {
        return Err(Error::JetOrder {
            requested: 2,
            max: jet.order(),
        });
    }
    let s = jet.value();
    let sz = jet.coeff(1, 0);
    let szb = jet.coeff(0, 1);
    let szzb = jet.coeff(1, 1);
    let a = inner(sz, s);
    let mut r = szzb.to_vec();
    linalg::axpy(&mut r, -inner(szzb, s), s);
    linalg::axpy(&mut r, -a, szb);
    linalg::axpy(&mut r, -inner(szb, s), sz);
    linalg::axpy(&mut r, C64::new(-2.0 * a.norm_sqr(), 0.0), s);
    Ok(r)
}

pub fn check_minimal_cp(lift: &SurfaceMap, grid: &Grid, tol: f64) -> Result<PropertyEntry> {
    entry("minimal_cp", lift, grid, tol, |p| {
        let j = lift.jet_at(p, 2)?;
        if !cp_metric_ok(&j) {
            return Ok(None);
        }
        Ok(Some(linalg::norm(&minimal_cp_vector(&j)?)))
    })
}

/// Residual vector of the HP^n minimality equation for an arbitrary unit lift.
pub fn minimal_hp_vector(jet: &Jet) -> Result<CVec> {
    if jet.order() < 2 {
        return Err(Error::JetOrder {
            requested: 2,
            max: jet.order(),
        });
    }
    let s_ser = jet.truncate(2);
    let js_ser = s_ser.j();
    let sz_ser = s_ser.d_z()?;
    let a = sz_ser.inner(&s_ser);
    let b = sz_ser.inner(&js_ser);
    let dhz_ser = sz_ser.sub(&s_ser.mul_scalar(&a)).sub(&js_ser.mul_scalar(&b));
    let d_bar_dhz = dhz_ser.d_zbar()?.value().to_vec();

    let s = jet.value();
    let js = j_unchecked(s);
    let szb = jet.coeff(0, 1);
    let (dhz, dhzb) = horizontal_diff(jet)?;
    let jdhzb = j_unchecked(&dhzb);
    let mut r = d_bar_dhz;
    linalg::axpy(&mut r, -inner(szb, s), &dhz);
    linalg::axpy(&mut r, -inner(szb, &js), &jdhzb);
    linalg::axpy(&mut r, C64::new(linalg::norm_sqr(&dhz), 0.0), s);
    linalg::axpy(&mut r, inner(&dhz, &jdhzb), &js);
    Ok(r)
}

pub fn check_minimal_hp(surface: &SurfaceMap, grid: &Grid, tol: f64) -> Result<PropertyEntry> {
    entry("minimal_hp", surface, grid, tol, |p| {
        let j = surface.jet_at(p, 2)?;
        let (a, b) = horizontal_diff(&j)?;
        if !hp_metric_ok(&a, &b) {
            return Ok(None);
        }
        Ok(Some(linalg::norm(&minimal_hp_vector(&j)?)))
    })
}

/// max of |⟨∂s, s⟩|, |⟨∂s, js⟩| over ∂ ∈ {∂_z, ∂_z̄}.
pub fn horizontal_residual(jet: &Jet) -> Result<f64> {
    if jet.order() < 1 {
        return Err(Error::JetOrder {
            requested: 1,
            max: 0,
        });
    }
    let s = jet.value();
    let js = j_unchecked(s);
    let (sz, szb) = (jet.coeff(1, 0), jet.coeff(0, 1));
    Ok([inner(sz, s), inner(sz, &js), inner(szb, s), inner(szb, &js)]
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max))
}

pub fn check_horizontal(lift: &SurfaceMap, grid: &Grid, tol: f64) -> Result<PropertyEntry> {
    entry("horizontal", lift, grid, tol, |p| Ok(Some(horizontal_residual(&lift.jet_at(p, 1)?)?)))
}

/// (A_z, A_z̄) of the Cartan embedding at a point.
pub fn cartan_matrices(jet: &Jet) -> (CMat, CMat) {
    let s = jet.value();
    let pz = perp(jet.coeff(1, 0), s);
    let pzb = perp(jet.coeff(0, 1), s);
    let az = CMat::outer(s, &pzb).sub(&CMat::outer(&pz, s));
    let azb = CMat::outer(s, &pz).sub(&CMat::outer(&pzb, s));
    (az, azb)
}

/// Step policy for ∂_z̄ of assembled matrices.
pub(crate) fn matrix_fd_config(provider: &Provider) -> FdConfig {
    match provider {
        Provider::Exact => FdConfig::default(),
        Provider::FiniteDifference(c) => *c,
    }
}

/// ∂_z̄ M = ½(∂_x + i ∂_y) M by central differences with Richardson levels.
pub(crate) fn fd_dbar<F>(point: (f64, f64), cfg: FdConfig, f: F) -> Result<CMat>
where
    F: Fn((f64, f64)) -> Result<CMat>,
{
    let (x, y) = point;
    let raw = |h: f64| -> Result<CMat> {
        let dx = f((x + h, y))?.sub(&f((x - h, y))?);
        let dy = f((x, y + h))?.sub(&f((x, y - h))?);
        Ok(dx.add(&dy.scale(C64::new(0.0, 1.0))).scale(C64::new(0.25 / h, 0.0)))
    };
    let mut level: Vec<CMat> = (0..=cfg.richardson)
        .map(|i| raw(cfg.step / 2f64.powi(i as i32)))
        .collect::<Result<_>>()?;
    for k in 1..=cfg.richardson {
        let fk = 4f64.powi(k as i32);
        level = level
            .windows(2)
            .map(|w| w[1].scale(C64::new(fk, 0.0)).sub(&w[0]).scale(C64::new(1.0 / (fk - 1.0), 0.0)))
            .collect();
    }
    Ok(level.swap_remove(0))
}

/// max ‖∂_z̄ A_z - [A_z, A_z̄]‖ over the grid, ∂_z̄ by finite differences.
pub fn cartan_residual(lift: &SurfaceMap, grid: &Grid) -> Result<f64> {
    let cfg = matrix_fd_config(&lift.provider);
    let (r, _, _) = scan_grid(grid, |p| {
        let j = lift.jet_at(p, 1)?;
        if !cp_metric_ok(&j) {
            return Ok(None);
        }
        let (az, azb) = cartan_matrices(&j);
        let dbar = fd_dbar(p, cfg, |q| Ok(cartan_matrices(&lift.jet_at(q, 1)?).0))?;
        Ok(Some(dbar.sub(&az.commutator(&azb)).max_abs()))
    })?;
    Ok(r)
}

/// (flat, isometric) entries: max |K| and max |e^{2u} - target|.
pub fn check_flat_isometric(surface: &SurfaceMap, grid: &Grid, tol: f64, target_factor: f64) -> Result<(PropertyEntry, PropertyEntry)> {
    let flat = entry("flat", surface, grid, tol, |p| {
        Ok(Some(calculus::gauss_curvature(surface, p)?.abs()))
    })?;
    let mut iso = entry("isometric_factor", surface, grid, tol, |p| {
        Ok(Some((calculus::metric_factor(&surface.jet_at(p, 1)?)? - target_factor).abs()))
    })?;
    iso.target = Some(target_factor);
    Ok((flat, iso))
}

/// Tolerances for a full report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportTolerances {
    pub horizontal: f64,
    pub totally_real: f64,
    pub minimal: f64,
    pub flat: f64,
    pub isometric: f64,
}

impl ReportTolerances {
    pub fn uniform(t: f64) -> Self {
        ReportTolerances {
            horizontal: t,
            totally_real: t,
            minimal: t,
            flat: t,
            isometric: t,
        }
    }
}

/// Every property on one grid; the surface and lift may coincide.
pub fn full_report(surface: &SurfaceMap, lift: &SurfaceMap, grid: &Grid, tol: &ReportTolerances, target_factor: f64) -> Result<PropertyReport> {
    let mut entries = vec![
        check_horizontal(lift, grid, tol.horizontal)?,
        check_totally_real(surface, Target::HP, grid, tol.totally_real)?,
        check_totally_real(lift, Target::CP, grid, tol.totally_real)?,
        check_minimal_hp(surface, grid, tol.minimal)?,
        check_minimal_cp(lift, grid, tol.minimal)?,
    ];
    let (flat, iso) = check_flat_isometric(surface, grid, tol.flat, target_factor)?;
    entries.push(flat);
    let mut iso = iso;
    iso.tolerance = tol.isometric;
    iso.pass = iso.max_residual <= tol.isometric;
    entries.push(iso);
    Ok(PropertyReport { grid: *grid, entries })
}
