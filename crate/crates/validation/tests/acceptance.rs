//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use quatsurf::checkers::{cartan_residual, check_flat_isometric, check_horizontal, check_minimal_cp, check_minimal_hp, check_totally_real, Target};
use quatsurf::families::{classified_corpus, lift_span_rank, make_classified, make_exponential, ClassifiedSurface, ExponentialFamily, LiftVariant};
use quatsurf::gauge::{horizontalize, integrate_gauge, l_path, loop_holonomy, GaugeField, GaugeFrame, SmoothGauge};
use quatsurf::harmonic::{check_prop35, isotropy_order, Isotropy};
use quatsurf::linalg::{herm_inner, hpoint_distance, j_map, random_cvec, twistor_project};
use quatsurf::scan::{constraint_scan, scan_fixed, vandermonde_full_rank, w_block_residual};
use quatsurf::surface::PolynomialLift;
use quatsurf::{CMat, Cell, FdConfig, Grid, Provider, SurfaceMap, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use quatsurf_validation::{run_criteria, Outcome};

fn name(spec: &ClassifiedSurface) -> String {
    let v = match spec.lift_variant {
        LiftVariant::InterleavedZeros => "clifford",
        LiftVariant::FullSigned => "companion",
        LiftVariant::FullEvenN => "companion-even",
    };
    format!("{v} n={}", spec.n)
}

fn c1_classified_suite() -> Outcome {
    let mut failing = Vec::new();
    let mut worst = [0.0f64; 5];
    for n in 1..=4 {
        for spec in classified_corpus(n) {
            let (surf, lift) = make_classified(&spec).unwrap();
            let g = Grid::family(n);
            let tr = check_totally_real(&surf, Target::HP, &g, 1e-10).unwrap();
            let mh = check_minimal_hp(&surf, &g, 1e-8).unwrap();
            let (flat, iso) = check_flat_isometric(&surf, &g, 1e-6, 2.0).unwrap();
            let iso_ok = iso.max_residual <= 1e-10;
            let hz = check_horizontal(&lift, &g, 1e-12).unwrap();
            let vals = [tr.max_residual, mh.max_residual, iso.max_residual, flat.max_residual, hz.max_residual];
            for (w, v) in worst.iter_mut().zip(vals) {
                *w = w.max(v);
            }
            let ok = tr.pass && mh.pass && iso_ok && flat.pass && hz.pass;
            println!(
                "    {:<16} totally_real={:.1e} minimal_hp={:.1e} |factor-2|={:.1e} |K|={:.1e} horizontal={:.1e} {}",
                name(&spec),
                vals[0],
                vals[1],
                vals[2],
                vals[3],
                vals[4],
                if ok { "ok" } else { "FAIL" }
            );
            if !ok {
                failing.push(name(&spec));
            }
        }
    }
    (
        failing.is_empty(),
        format!(
            "worst totally_real={:.1e} minimal_hp={:.1e} factor={:.1e} K={:.1e} horizontal={:.1e}; failing: [{}]",
            worst[0],
            worst[1],
            worst[2],
            worst[3],
            worst[4],
            failing.join(", ")
        ),
    )
}

fn c2_isotropy_dichotomy() -> Outcome {
    let mut failing = Vec::new();
    for n in 1..=3 {
        for spec in classified_corpus(n) {
            let (_, lift) = make_classified(&spec).unwrap();
            let g = Grid::family(n);
            let iso = isotropy_order(&lift, &g, 2 * n + 2, 1e-6).unwrap();
            let rank = lift_span_rank(&lift, &g).unwrap();
            let (want_iso, want_rank) = match spec.lift_variant {
                LiftVariant::InterleavedZeros => (n, n + 1),
                _ => (2 * n + 1, 2 * n + 2),
            };
            let ok = iso == Isotropy::Order(want_iso) && rank == want_rank;
            println!("    {:<16} isotropy={iso:?} (want {want_iso}) rank={rank} (want {want_rank}) {}", name(&spec), if ok { "ok" } else { "FAIL" });
            if !ok {
                failing.push(name(&spec));
            }
        }
    }
    (failing.is_empty(), format!("failing: [{}]", failing.join(", ")))
}

fn c3_orthogonality_relations() -> Outcome {
    let mut failing = Vec::new();
    let mut worst: f64 = 0.0;
    for n in 1..=3 {
        for spec in classified_corpus(n) {
            let (_, lift) = make_classified(&spec).unwrap();
            let e = check_prop35(&lift, &Grid::family(n), n + 1, 1e-8).unwrap();
            worst = worst.max(e.max_residual);
            println!("    {:<16} residual={:.1e} {}", name(&spec), e.max_residual, if e.pass { "ok" } else { "FAIL" });
            if !e.pass {
                failing.push(name(&spec));
            }
        }
    }
    (failing.is_empty(), format!("worst={worst:.1e}; failing: [{}]", failing.join(", ")))
}

fn c4_j_algebra() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let d = 2 * rng.gen_range(1..6);
        let (v, w) = (random_cvec(&mut rng, d), random_cvec(&mut rng, d));
        let lam = C64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let jv = j_map(&v).unwrap();
        let jw = j_map(&w).unwrap();
        let jjv = j_map(&jv).unwrap();
        let r1 = jjv.iter().zip(&v).map(|(a, b)| (a + b).norm()).fold(0.0, f64::max);
        let r2 = (herm_inner(&jv, &jw).unwrap() - herm_inner(&w, &v).unwrap()).norm();
        let r3 = herm_inner(&jv, &v).unwrap().norm();
        let lv: Vec<C64> = v.iter().map(|x| lam * x).collect();
        let r4 = j_map(&lv).unwrap().iter().zip(&jv).map(|(a, b)| (a - lam.conj() * b).norm()).fold(0.0, f64::max);
        worst = worst.max(r1).max(r2).max(r3).max(r4);
    }
    (worst <= 1e-13, format!("1000 vectors, worst residual={worst:.1e}"))
}

fn poly(name: &str, terms: &[&[(C64, usize, usize)]]) -> SurfaceMap {
    let cell = Cell { x0: -0.5, x1: 0.5, y0: -0.5, y1: 0.5 };
    SurfaceMap::new(Arc::new(PolynomialLift::from_terms(terms)), Provider::Exact, cell, name).unwrap()
}

fn family(thetas: &[f64], weights: &[f64], n: usize) -> SurfaceMap {
    make_exponential(&ExponentialFamily {
        thetas: thetas.to_vec(),
        weights: weights.to_vec(),
        ambient_slots: 2 * n + 2,
    })
    .unwrap()
}

fn c5_oracle_equivalence() -> Outcome {
    let one = C64::new(1.0, 0.0);
    let mut corpus: Vec<(String, SurfaceMap)> = Vec::new();
    for n in 1..=3 {
        corpus.push((format!("clifford n={n}"), make_classified(&ClassifiedSurface::clifford(n)).unwrap().1));
    }
    for n in 1..=2 {
        corpus.push((format!("companion n={n}"), make_classified(&ClassifiedSurface::companion(n)).unwrap().1));
    }
    corpus.push(("holomorphic (1,z)".into(), poly("line", &[&[(one, 0, 0)], &[(one, 1, 0)]])));
    corpus.push(("holomorphic (1,z,z^2,0)".into(), poly("conic", &[&[(one, 0, 0)], &[(one, 1, 0)], &[(one, 2, 0)], &[]])));
    corpus.push(("holomorphic (1,0,z,0)".into(), poly("line2", &[&[(one, 0, 0)], &[], &[(one, 1, 0)], &[]])));
    corpus.push(("nonzero moment V_0".into(), family(&[0.0, PI / 2.0, 2.5], &[0.5, 0.3, 0.2], 2)));
    corpus.push(("perturbed clifford".into(), family(&[0.0, TAU / 3.0 + 0.1, 2.0 * TAU / 3.0], &[1.0 / 3.0; 3], 2)));
    corpus.push(("mixed (1,z,zbar^2,0)".into(), poly("mixed", &[&[(one, 0, 0)], &[(one, 1, 0)], &[(one, 0, 2)], &[]])));
    let mut disagreements = Vec::new();
    for (label, lift) in &corpus {
        let g = Grid::new(lift.cell, 9, 9).unwrap();
        let cartan = cartan_residual(lift, &g).unwrap();
        let direct = check_minimal_cp(lift, &g, 1e-6).unwrap().max_residual;
        let class = |r: f64| if r <= 1e-6 { Some(true) } else if r >= 1e-3 { Some(false) } else { None };
        let agree = matches!((class(cartan), class(direct)), (Some(a), Some(b)) if a == b);
        println!("    {label:<26} cartan={cartan:.1e} direct={direct:.1e} {}", if agree { "agree" } else { "DISAGREE" });
        if !agree {
            disagreements.push(label.clone());
        }
    }
    (disagreements.is_empty(), format!("{} maps, disagreements: [{}]", corpus.len(), disagreements.join(", ")))
}

fn c6_gauge_round_trip() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (n, seed) in [(1usize, 11u64), (2, 12)] {
        let (_, lift) = make_classified(&ClassifiedSurface::clifford(n)).unwrap();
        let gauged = SmoothGauge::random(&mut ChaCha8Rng::seed_from_u64(seed), 0.5).apply(&lift).unwrap();
        let g = lift.default_grid();
        let h = horizontalize(&gauged, (g.cell.x0, g.cell.y0)).unwrap();
        let hz = check_horizontal(&h, &g, 1e-6).unwrap().max_residual;
        let before = check_horizontal(&gauged, &g, 1e-6).unwrap().max_residual;
        let mut hp: f64 = 0.0;
        for (x, y) in g.points() {
            let a = twistor_project(&lift.unit_value(x, y).unwrap()).unwrap();
            let b = twistor_project(&h.unit_value(x, y).unwrap()).unwrap();
            hp = hp.max(hpoint_distance(&a, &b).unwrap());
        }
        let field = GaugeField::new(gauged);
        let step = field.default_step();
        let c = g.cell;
        let hol = loop_holonomy(&field, (c.x0, c.y0), (c.x1, c.y1), step).unwrap();
        let hol_defect = hol.frame.t.sub(&CMat::identity(2)).max_abs();
        let mut su2 = hol.max_unitarity_defect.max(hol.max_det_defect);
        // every L-path used for the grid, plus the y-then-x path for path independence
        let mut path_gap: f64 = 0.0;
        let base = (c.x0, c.y0);
        for p in g.points() {
            let t0 = GaugeFrame::identity(base);
            let a = integrate_gauge(&field, &l_path(base, p), &t0, step).unwrap();
            let b = integrate_gauge(&field, &[base, (base.0, p.1), p], &t0, step).unwrap();
            su2 = su2.max(a.max_unitarity_defect).max(a.max_det_defect).max(b.max_unitarity_defect).max(b.max_det_defect);
            path_gap = path_gap.max(a.frame.t.sub(&b.frame.t).max_abs());
        }
        let pass = hz <= 1e-6 && hp <= 1e-10 && hol_defect <= 1e-6 && su2 <= 1e-8 && path_gap <= 1e-6;
        println!(
            "    clifford n={n}: horizontal {before:.1e} -> {hz:.1e}, hpoint={hp:.1e}, holonomy={hol_defect:.1e}, su2={su2:.1e}, paths={path_gap:.1e} {}",
            if pass { "ok" } else { "FAIL" }
        );
        ok &= pass;
        notes.push(format!("n={n} horizontal={hz:.1e}"));
    }
    (ok, notes.join(", "))
}

/// Weights r > 0 with Σ r = 1 and Σ r_k e^{iθ_k} = 0 for three angles, if any.
fn barycentric(th: &[f64; 3]) -> Option<[f64; 3]> {
    let p: Vec<C64> = th.iter().map(|t| C64::from_polar(1.0, *t)).collect();
    let cross = |a: C64, b: C64| a.re * b.im - a.im * b.re;
    let w = [cross(p[1], p[2]), cross(p[2], p[0]), cross(p[0], p[1])];
    let s: f64 = w.iter().sum();
    let r = w.map(|v| v / s);
    r.iter().all(|v| *v > 0.02).then_some(r)
}

fn c7_minimality_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut zero, mut disagreements) = (0, 0);
    for i in 0..200 {
        let (thetas, weights) = match i % 4 {
            0 => {
                // arbitrary parameters
                let m = rng.gen_range(1..=3);
                let mut t: Vec<f64> = (0..m).map(|_| rng.gen_range(0.05..TAU - 0.05)).collect();
                t.sort_by(f64::total_cmp);
                t.insert(0, 0.0);
                let raw: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.1..1.0)).collect();
                let s: f64 = raw.iter().sum();
                (t, raw.iter().map(|r| r / s).collect::<Vec<_>>())
            }
            1 => loop {
                let mut t = [0.0, rng.gen_range(0.1..TAU - 0.1), rng.gen_range(0.1..TAU - 0.1)];
                t.sort_by(f64::total_cmp);
                if t[2] - t[1] < 0.05 {
                    continue;
                }
                if let Some(r) = barycentric(&t) {
                    break (t.to_vec(), r.to_vec());
                }
            },
            2 => {
                let t = rng.gen_range(0.1..PI - 0.1);
                let a = rng.gen_range(0.1..0.4);
                (vec![0.0, t, PI, PI + t], vec![a, 0.5 - a, a, 0.5 - a])
            }
            _ => (vec![0.0, PI], vec![0.5, 0.5]),
        };
        let n = thetas.len() - 1;
        let fam = ExponentialFamily { thetas: thetas.clone(), weights: weights.clone(), ambient_slots: 2 * n + 2 };
        let moment_zero = fam.moment().norm() <= 1e-8;
        zero += moment_zero as usize;
        let s = make_exponential(&fam).unwrap();
        let g = Grid::new(Cell::family(n), 5, 5).unwrap();
        let passes = check_minimal_cp(&s, &g, 1e-8).unwrap().pass;
        if passes != moment_zero {
            disagreements += 1;
            println!("    disagreement: thetas={thetas:?} weights={weights:?} moment={:.1e}", fam.moment().norm());
        }
    }
    (disagreements == 0, format!("200 families ({zero} with zero moment), disagreements={disagreements}"))
}

fn c8_constraint_scan() -> Outcome {
    let rep = constraint_scan(1, 1, 64, 1e-10, 0).unwrap();
    let m1 = rep.solutions.len() == 1 && {
        let s = &rep.solutions[0];
        (s.thetas[1] - PI).abs() <= 1e-8 && s.weights.iter().all(|r| (r - 0.5).abs() <= 1e-8)
    };
    println!("    m=1: {} solution(s) {:?} {}", rep.solutions.len(), rep.solutions.iter().map(|s| (&s.thetas, &s.weights)).collect::<Vec<_>>(), if m1 { "ok" } else { "FAIL" });

    let th: Vec<f64> = (0..4).map(|j| j as f64 * PI / 2.0).collect();
    let fixed = scan_fixed(1, &th, &[0.25; 4]).unwrap();
    let mut anti = CMat::zeros(4, 4);
    for i in 0..4 {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        anti[(i, 3 - i)] = C64::new(sign, 0.0);
    }
    let anti_res = w_block_residual(1, &th, &[0.25; 4], &anti);
    let m3 = fixed.w.null_dim > 0 && anti_res <= 1e-8;
    println!(
        "    m=3, a_j = i^j: null_dim={} forced_zero={:?} feasible={} anti-diagonal residual={anti_res:.2e} {}",
        fixed.w.null_dim,
        fixed.w.forced_zero,
        fixed.w.feasible,
        if m3 { "ok" } else { "FAIL" }
    );
    let scan3 = constraint_scan(1, 3, 32, 1e-10, 0).unwrap();
    println!(
        "    m=3 scan: {} moment solutions, feasible W for {}",
        scan3.solutions.len(),
        scan3.solutions.iter().filter(|s| s.w.feasible).count()
    );

    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut vfail = 0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3usize);
        let q = (n - 1) / 2;
        let cols = rng.gen_range(1..=(2 * q + 2).min(n + 1));
        // distinct classes of (2n+2)-th roots of unity, one sign each
        let mut classes: Vec<usize> = (0..=n).collect();
        for i in (1..classes.len()).rev() {
            classes.swap(i, rng.gen_range(0..=i));
        }
        let a: Vec<C64> = classes[..cols]
            .iter()
            .map(|&k| C64::from_polar(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, k as f64 * PI / (n + 1) as f64))
            .collect();
        if !vandermonde_full_rank(&a, q) {
            vfail += 1;
        }
    }
    println!("    vandermonde: {} of 100 draws full rank", 100 - vfail);
    (m1 && m3 && vfail == 0, format!("m=1 {}, m=3 W block {}, vandermonde {}/100", ok_str(m1), ok_str(m3), 100 - vfail))
}

fn ok_str(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn c9_fd_convergence() -> Outcome {
    let (_, lift) = make_classified(&ClassifiedSurface::clifford(1)).unwrap();
    let hs: [f64; 3] = [1e-2, 1e-3, 1e-4];
    let slope = |e: &[f64]| -> Vec<f64> { (0..2).map(|i| (e[i] / e[i + 1]).log10() / (hs[i] / hs[i + 1]).log10()).collect() };
    let (mut worst_order, mut worst_first, mut passing) = (f64::INFINITY, f64::INFINITY, 0);
    let g = lift.default_grid();
    let total = g.points().len();
    for p in g.points() {
        let exact = lift.jet_at(p, 2).unwrap();
        let mut all = Vec::new();
        let mut first = Vec::new();
        for &h in &hs {
            let fd = lift.with_provider(Provider::FiniteDifference(FdConfig { step: h, richardson: 0 })).jet_at(p, 2).unwrap();
            all.push(fd.max_deriv_distance(&exact));
            first.push(fd.truncate(1).max_deriv_distance(&exact));
        }
        let (sa, sf) = (slope(&all), slope(&first));
        let order = sa.iter().cloned().fold(f64::INFINITY, f64::min);
        passing += (order >= 1.95) as usize;
        if order < 1.95 {
            println!(
                "    point ({:.3}, {:.3}): errors={:.2e} {:.2e} {:.2e} slopes={:.3} {:.3} (first derivatives only: {:.3} {:.3})",
                p.0, p.1, all[0], all[1], all[2], sa[0], sa[1], sf[0], sf[1]
            );
        }
        worst_order = worst_order.min(order);
        worst_first = worst_first.min(sf[0].min(sf[1]));
    }
    (
        worst_order >= 1.95,
        format!("observed order {worst_order:.3} (threshold 1.95), {passing}/{total} grid points pass; first derivatives alone {worst_first:.3}"),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("1 classified-family suite", c1_classified_suite),
        ("2 isotropy dichotomy", c2_isotropy_dichotomy),
        ("3 orthogonality relations", c3_orthogonality_relations),
        ("4 j-structure algebra", c4_j_algebra),
        ("5 oracle equivalence", c5_oracle_equivalence),
        ("6 gauge round trip", c6_gauge_round_trip),
        ("7 minimality law", c7_minimality_law),
        ("8 constraint scan", c8_constraint_scan),
        ("9 finite-difference convergence", c9_fd_convergence),
    ];
    if run_criteria(&criteria) > 0 {
        std::process::exit(1);
    }
}
