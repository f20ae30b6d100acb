//! Small-n scan of the exponential-family constraints: solve the moment
//! conditions Σ a_j^k r_j = 0 (k = 1..n) and analyse which entries of the
//! anti-symmetric matrix W survive the grouped exponential relations.

use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, CMat, C64, ZERO};
use crate::tolerances::{RANK, SCAN_CLUSTER, SCAN_ENTRY};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

/// Structure of the admissible top-left (m+1)×(m+1) block of W.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WAnalysis {
    /// Number of distinct values a_i + a_j (i < j) after clustering.
    pub clusters: usize,
    pub equations: usize,
    /// Dimension of the solution space of the stacked linear constraints.
    pub null_dim: usize,
    /// Entries (i, j), i < j, that vanish on the whole solution space.
    pub forced_zero: Vec<(usize, usize)>,
    /// Entries that some solution leaves nonzero.
    pub free: Vec<(usize, usize)>,
    /// Rank of a generic element of the solution space.
    pub generic_rank: usize,
    /// Whether W can be completed to an anti-symmetric unitary (2n+2)×(2n+2)
    /// matrix: needs generic_rank >= 2m - 2n.
    pub feasible: bool,
    /// Every a_j satisfies a_j^{2n+2} = 1.
    pub roots_of_unity: bool,
}

impl WAnalysis {
    pub fn block_zero(&self) -> bool {
        self.null_dim == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSolution {
    pub thetas: Vec<f64>,
    pub weights: Vec<f64>,
    /// max_k |Σ a_j^k r_j|.
    pub moment_residual: f64,
    pub w: WAnalysis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: f64,
    /// Distinct solutions, sorted lexicographically by thetas.
    pub solutions: Vec<ScanSolution>,
    /// Trials that did not converge or violated ordering/positivity.
    pub rejected: usize,
}

fn moment_vec(thetas: &[f64], weights: &[f64], n: usize) -> Vec<C64> {
    (1..=n as i32)
        .map(|k| {
            thetas
                .iter()
                .zip(weights)
                .map(|(t, r)| C64::from_polar(*r, k as f64 * t))
                .sum()
        })
        .collect()
}

fn softmax(u: &[f64]) -> Vec<f64> {
    let mx = u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = u.iter().map(|v| (v - mx).exp()).collect();
    let s: f64 = e.iter().sum();
    e.into_iter().map(|v| v / s).collect()
}

/// Unknowns: θ_1..θ_m, then u_0..u_m with r = softmax(u).
fn unpack(x: &DVector<f64>, m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut th = vec![0.0];
    th.extend(x.iter().take(m));
    (th, softmax(&x.as_slice()[m..]))
}

fn residual_and_jacobian(x: &DVector<f64>, n: usize, m: usize) -> (DVector<f64>, DMatrix<f64>) {
    let (th, r) = unpack(x, m);
    let mut f = DVector::zeros(2 * n);
    let mut jac = DMatrix::zeros(2 * n, 2 * m + 1);
    for k in 1..=n {
        let kf = k as f64;
        let e: Vec<C64> = th.iter().map(|t| C64::from_polar(1.0, kf * t)).collect();
        let v: C64 = e.iter().zip(&r).map(|(a, b)| a * b).sum();
        let row = 2 * (k - 1);
        f[row] = v.re;
        f[row + 1] = v.im;
        for j in 1..=m {
            let d = C64::new(0.0, kf) * e[j] * r[j];
            jac[(row, j - 1)] = d.re;
            jac[(row + 1, j - 1)] = d.im;
        }
        for l in 0..=m {
            // ∂r_j/∂u_l = r_j (δ_jl - r_l)
            let d: C64 = (0..=m)
                .map(|j| e[j] * r[j] * (if j == l { 1.0 } else { 0.0 } - r[l]))
                .sum();
            jac[(row, m + l)] = d.re;
            jac[(row + 1, m + l)] = d.im;
        }
    }
    (f, jac)
}

/// Levenberg–Marquardt on the moment equations from one start.
fn solve_moments(n: usize, m: usize, x0: DVector<f64>, tol: f64) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let mut x = x0;
    let mut lambda = 1e-3;
    let (mut f, mut jac) = residual_and_jacobian(&x, n, m);
    let mut cost = f.norm_squared();
    for _ in 0..500 {
        if cost.sqrt() <= tol * 1e-2 {
            break;
        }
        let jt = jac.transpose();
        let mut a = &jt * &jac;
        for i in 0..a.nrows() {
            a[(i, i)] += lambda * (1.0 + a[(i, i)]);
        }
        let g = &jt * &f;
        let Some(step) = a.lu().solve(&(-g)) else { break };
        let trial = &x + &step;
        let (ft, jt2) = residual_and_jacobian(&trial, n, m);
        let ct = ft.norm_squared();
        if ct < cost {
            x = trial;
            f = ft;
            jac = jt2;
            cost = ct;
            lambda = (lambda * 0.3).max(1e-12);
        } else {
            lambda *= 10.0;
            if lambda > 1e12 {
                break;
            }
        }
    }
    let (th, r) = unpack(&x, m);
    // fold into [0, 2π) and sort, carrying weights along
    let mut pairs: Vec<(f64, f64)> = th.iter().map(|t| t.rem_euclid(TAU)).zip(r).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (th, r): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let res = moment_vec(&th, &r, n).iter().map(|v| v.norm()).fold(0.0, f64::max);
    let distinct = th.windows(2).all(|w| w[1] - w[0] > 1e-6) && th.last().map_or(true, |t| TAU - t > 1e-6);
    (res <= tol && distinct && th[0] == 0.0 && r.iter().all(|v| *v > 1e-6)).then_some((th, r, res))
}

/// Groups of index pairs i < j whose sums a_i + a_j agree within 1e-9.
pub fn sum_clusters(a: &[C64]) -> Vec<Vec<(usize, usize)>> {
    let mut clusters: Vec<(C64, Vec<(usize, usize)>)> = Vec::new();
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let s = a[i] + a[j];
            match clusters.iter_mut().find(|(c, _)| (c - s).norm() <= SCAN_CLUSTER) {
                Some((_, v)) => v.push((i, j)),
                None => clusters.push((s, vec![(i, j)])),
            }
        }
    }
    clusters.into_iter().map(|(_, v)| v).collect()
}

/// Stacked linear constraints on w_ij (i < j): for each k = 1..n and each
/// sum cluster, Σ w_ij ξ_i ξ_j (a_j^k - a_i^k) = 0 and the same with -ā.
pub fn w_constraints(n: usize, a: &[C64], xi: &[f64]) -> (Vec<(usize, usize)>, CMat) {
    let pairs: Vec<(usize, usize)> = (0..a.len()).flat_map(|i| (i + 1..a.len()).map(move |j| (i, j))).collect();
    let col = |p: (usize, usize)| pairs.iter().position(|q| *q == p).unwrap();
    let clusters = sum_clusters(a);
    let mut rows = Vec::new();
    for k in 1..=n as u32 {
        for c in &clusters {
            let mut r1 = vec![ZERO; pairs.len()];
            let mut r2 = vec![ZERO; pairs.len()];
            for &(i, j) in c {
                let x = xi[i] * xi[j];
                let b = |v: C64| -v.conj();
                r1[col((i, j))] = (a[j].powu(k) - a[i].powu(k)) * x;
                r2[col((i, j))] = (b(a[j]).powu(k) - b(a[i]).powu(k)) * x;
            }
            rows.push(r1);
            rows.push(r2);
        }
    }
    (pairs, CMat::from_rows(&rows))
}

/// Null space of `e` as columns (complex SVD, singular values <= tol).
fn null_space(e: &CMat, tol: f64) -> Vec<Vec<C64>> {
    let cols = e.cols;
    if cols == 0 {
        return Vec::new();
    }
    // pad so the SVD returns a full right basis
    let mut padded = CMat::zeros(e.rows.max(cols), cols);
    for i in 0..e.rows {
        for j in 0..cols {
            padded[(i, j)] = e[(i, j)];
        }
    }
    let svd = padded.to_nalgebra().svd(false, true);
    let vt = svd.v_t.expect("requested V^T");
    let scale = svd.singular_values.max().max(1.0);
    (0..cols)
        .filter(|&k| svd.singular_values[k] <= tol * scale)
        .map(|k| (0..cols).map(|j| vt[(k, j)].conj()).collect())
        .collect()
}

fn antisym(m1: usize, pairs: &[(usize, usize)], v: &[C64]) -> CMat {
    let mut w = CMat::zeros(m1, m1);
    for (p, &(i, j)) in pairs.iter().enumerate() {
        w[(i, j)] = v[p];
        w[(j, i)] = -v[p];
    }
    w
}

pub fn analyse_w(n: usize, thetas: &[f64], weights: &[f64]) -> WAnalysis {
    let a: Vec<C64> = thetas.iter().map(|t| C64::from_polar(1.0, *t)).collect();
    let xi: Vec<f64> = weights.iter().map(|r| r.sqrt()).collect();
    let m = a.len() - 1;
    let (pairs, e) = w_constraints(n, &a, &xi);
    let null = null_space(&e, RANK);
    let (mut forced_zero, mut free) = (Vec::new(), Vec::new());
    for (p, &ij) in pairs.iter().enumerate() {
        if null.iter().all(|v| v[p].norm() <= SCAN_ENTRY) {
            forced_zero.push(ij);
        } else {
            free.push(ij);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut generic = vec![ZERO; pairs.len()];
    for v in &null {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        for (g, x) in generic.iter_mut().zip(v) {
            *g += c * x;
        }
    }
    let generic_rank = numerical_rank(&antisym(m + 1, &pairs, &generic), RANK);
    let need = (2 * m).saturating_sub(2 * n);
    WAnalysis {
        clusters: sum_clusters(&a).len(),
        equations: e.rows,
        null_dim: null.len(),
        forced_zero,
        free,
        generic_rank,
        feasible: m <= n || generic_rank >= need,
        roots_of_unity: a.iter().all(|v| (v.powu(2 * n as u32 + 2) - 1.0).norm() <= SCAN_ENTRY),
    }
}

/// Relative residual |E w| / |w| of a candidate block against the constraints.
pub fn w_block_residual(n: usize, thetas: &[f64], weights: &[f64], w: &CMat) -> f64 {
    let a: Vec<C64> = thetas.iter().map(|t| C64::from_polar(1.0, *t)).collect();
    let xi: Vec<f64> = weights.iter().map(|r| r.sqrt()).collect();
    let (pairs, e) = w_constraints(n, &a, &xi);
    let v: Vec<C64> = pairs.iter().map(|&(i, j)| w[(i, j)]).collect();
    let nv = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    if nv == 0.0 {
        return 0.0;
    }
    let ev = e.apply(&v);
    ev.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt() / nv
}

/// Analysis for given parameters, without solving.
pub fn scan_fixed(n: usize, thetas: &[f64], weights: &[f64]) -> Result<ScanSolution> {
    if thetas.len() != weights.len() || thetas.is_empty() {
        return Err(Error::InvalidFamily("thetas and weights must have equal non-zero length".into()));
    }
    Ok(ScanSolution {
        thetas: thetas.to_vec(),
        weights: weights.to_vec(),
        moment_residual: moment_vec(thetas, weights, n).iter().map(|v| v.norm()).fold(0.0, f64::max),
        w: analyse_w(n, thetas, weights),
    })
}

const DEDUP: f64 = 1e-6;

pub fn constraint_scan(n: usize, m: usize, trials: usize, tol: f64, seed: u64) -> Result<ScanReport> {
    if n == 0 || n > 3 || m == 0 || m > 2 * n + 1 {
        return Err(Error::InvalidFamily(format!("scan needs 1 <= n <= 3 and 1 <= m <= 2n+1, got n={n}, m={m}")));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidFamily("tolerance must be positive".into()));
    }
    let starts: Vec<DVector<f64>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..trials)
            .map(|_| {
                let mut th: Vec<f64> = (0..m).map(|_| rng.gen_range(0.0..TAU)).collect();
                th.sort_by(f64::total_cmp);
                th.extend((0..=m).map(|_| rng.gen_range(-1.0..1.0)));
                DVector::from_vec(th)
            })
            .collect()
    };
    let found: Vec<Option<(Vec<f64>, Vec<f64>, f64)>> =
        starts.into_par_iter().map(|x0| solve_moments(n, m, x0, tol)).collect();
    let rejected = found.iter().filter(|f| f.is_none()).count();
    let mut solutions: Vec<ScanSolution> = Vec::new();
    for (th, r, res) in found.into_iter().flatten() {
        let dup = solutions.iter().any(|s| {
            s.thetas.iter().zip(&th).all(|(a, b)| (a - b).abs() <= DEDUP)
                && s.weights.iter().zip(&r).all(|(a, b)| (a - b).abs() <= DEDUP)
        });
        if !dup {
            let w = analyse_w(n, &th, &r);
            solutions.push(ScanSolution {
                thetas: th,
                weights: r,
                moment_residual: res,
                w,
            });
        }
    }
    solutions.sort_by(|a, b| {
        a.thetas
            .iter()
            .zip(&b.thetas)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(ScanReport {
        n,
        m,
        trials,
        seed,
        tol,
        solutions,
        rejected,
    })
}

/// Full column rank of the matrix with rows a^{2τ+1}, then ā^{2τ+1}, τ = 0..q.
pub fn vandermonde_full_rank(a: &[C64], q: usize) -> bool {
    let mut rows: Vec<Vec<C64>> = (0..=q as u32).map(|t| a.iter().map(|v| v.powu(2 * t + 1)).collect()).collect();
    rows.extend((0..=q as u32).map(|t| a.iter().map(|v| v.conj().powu(2 * t + 1)).collect::<Vec<_>>()));
    numerical_rank(&CMat::from_rows(&rows), RANK) == a.len()
}
