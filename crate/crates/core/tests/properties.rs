use proptest::prelude::*;
use quatsurf::calculus::{angles, horizontal_diff, metric_factor};
use quatsurf::checkers::{horizontal_residual, minimal_hp_vector, totally_real_residual, Target};
use quatsurf::families::{make_exponential, ClassifiedSurface, ExponentialFamily};
use quatsurf::gauge::SmoothGauge;
use quatsurf::linalg::{herm_inner, hpoint_distance, is_symplectic, j_map, norm, random_symplectic, twistor_project};
use quatsurf::surface::{Monomial, PolynomialLift};
use quatsurf::{Cell, Provider, SurfaceMap, C64};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

fn cvec(len: usize) -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec(c64(), len)
}

fn even_dim() -> impl Strategy<Value = usize> {
    (1usize..5).prop_map(|q| 2 * q)
}

fn dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Polynomial lift in C^4 of degree <= 2, non-vanishing near the origin.
fn poly_lift() -> impl Strategy<Value = SurfaceMap> {
    prop::collection::vec(prop::collection::vec(c64(), 6), 4).prop_map(|cs| {
        let pq = [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)];
        let comps: Vec<Vec<Monomial>> = cs
            .iter()
            .enumerate()
            .map(|(k, c)| {
                pq.iter()
                    .zip(c)
                    .map(|(&(p, q), &coef)| Monomial {
                        coef: if k == 0 && p + q == 0 { C64::new(2.0, 0.0) } else { coef },
                        p,
                        q,
                    })
                    .collect()
            })
            .collect();
        SurfaceMap::new(Arc::new(PolynomialLift::new(comps)), Provider::Exact, Cell::family(1), "poly").unwrap()
    })
}

fn point() -> impl Strategy<Value = (f64, f64)> {
    (-0.2f64..0.2, -0.2f64..0.2)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn j_structure_identities(v in even_dim().prop_flat_map(|d| (cvec(d), cvec(d))), lam in c64()) {
        let (v, w) = v;
        let jv = j_map(&v).unwrap();
        let jw = j_map(&w).unwrap();
        let jjv = j_map(&jv).unwrap();
        let neg: Vec<C64> = v.iter().map(|x| -x).collect();
        prop_assert!(dist(&jjv, &neg) <= 1e-13);
        prop_assert!((herm_inner(&jv, &jw).unwrap() - herm_inner(&w, &v).unwrap()).norm() <= 1e-13);
        prop_assert!(herm_inner(&jv, &v).unwrap().norm() <= 1e-13);
        let lv: Vec<C64> = v.iter().map(|x| lam * x).collect();
        let want: Vec<C64> = jv.iter().map(|x| lam.conj() * x).collect();
        prop_assert!(dist(&j_map(&lv).unwrap(), &want) <= 1e-13);
    }

    #[test]
    fn twistor_projection_forgets_the_fiber(v in cvec(6), lam in c64(), sym_seed in any::<u64>()) {
        prop_assume!(norm(&v) > 1e-3 && lam.norm() > 1e-3);
        let p = twistor_project(&v).unwrap();
        let lv: Vec<C64> = v.iter().map(|x| lam * x).collect();
        prop_assert!(hpoint_distance(&p, &twistor_project(&lv).unwrap()).unwrap() <= 1e-12);
        prop_assert!(hpoint_distance(&p, &twistor_project(&j_map(&v).unwrap()).unwrap()).unwrap() <= 1e-12);
        prop_assert!(p.j_invariance_defect() <= 1e-12);
        // Sp(3) acts compatibly on lifts and projectors
        let u = random_symplectic(&mut ChaCha8Rng::seed_from_u64(sym_seed), 2);
        prop_assert!(is_symplectic(&u, 1e-12).unwrap());
        let moved = twistor_project(&u.apply(&v)).unwrap();
        prop_assert!(hpoint_distance(&moved, &p.transform(&u)).unwrap() <= 1e-12);
    }

    #[test]
    fn angle_identity_and_horizontal_orthogonality(lift in poly_lift(), p in point()) {
        let jet = lift.jet_at(p, 1).unwrap();
        let (a, b) = horizontal_diff(&jet).unwrap();
        let s = jet.value();
        let js = j_map(s).unwrap();
        for v in [&a, &b] {
            prop_assert!(herm_inner(v, s).unwrap().norm() <= 1e-12);
            prop_assert!(herm_inner(v, &js).unwrap().norm() <= 1e-12);
        }
        if metric_factor(&jet).is_ok() {
            let r = angles(&jet).unwrap();
            let sum = r.cos_a1.powi(2) + r.cos_a2.powi(2) + r.cos_a3.powi(2);
            prop_assert!((r.cos_sq_alpha - sum).abs() <= 1e-10);
            prop_assert!(r.cos_sq_alpha <= 1.0 + 1e-10);
        }
    }

    #[test]
    fn hp_checks_are_gauge_invariant(lift in poly_lift(), p in point(), seed in any::<u64>()) {
        let g = SmoothGauge::random(&mut ChaCha8Rng::seed_from_u64(seed), 0.7);
        let gauged = g.apply(&lift).unwrap();
        let (j0, j1) = (lift.jet_at(p, 2).unwrap(), gauged.jet_at(p, 2).unwrap());
        prop_assume!(metric_factor(&j0).is_ok());
        prop_assert!((metric_factor(&j0).unwrap() - metric_factor(&j1).unwrap()).abs() <= 1e-10);
        let m0 = norm(&minimal_hp_vector(&j0).unwrap());
        let m1 = norm(&minimal_hp_vector(&j1).unwrap());
        prop_assert!((m0 - m1).abs() <= 1e-9, "{} {}", m0, m1);
        // the three angles rotate under the gauge; cos²α does not
        let (a0, a1) = (angles(&j0).unwrap(), angles(&j1).unwrap());
        prop_assert!((a0.cos_sq_alpha - a1.cos_sq_alpha).abs() <= 1e-9);
        if totally_real_residual(&j0, Target::HP).unwrap().unwrap() <= 1e-12 {
            prop_assert!(totally_real_residual(&j1, Target::HP).unwrap().unwrap() <= 1e-9);
        }
    }

    #[test]
    fn symplectic_covariance(n in 1usize..4, seed in any::<u64>(), p in point()) {
        let spec = ClassifiedSurface::clifford(n);
        let base = quatsurf::families::classified_lift(&spec).unwrap();
        let u = random_symplectic(&mut ChaCha8Rng::seed_from_u64(seed), n);
        let cell = Cell::family(n);
        let a = SurfaceMap::new(Arc::new(base.clone()), Provider::Exact, cell, "a").unwrap();
        let b = SurfaceMap::new(Arc::new(base.transformed(&u)), Provider::Exact, cell, "b").unwrap();
        let (ja, jb) = (a.jet_at(p, 2).unwrap(), b.jet_at(p, 2).unwrap());
        prop_assert!((metric_factor(&ja).unwrap() - metric_factor(&jb).unwrap()).abs() <= 1e-12);
        prop_assert!((horizontal_residual(&ja).unwrap() - horizontal_residual(&jb).unwrap()).abs() <= 1e-12);
        prop_assert!(norm(&minimal_hp_vector(&jb).unwrap()) <= 1e-12);
    }

    #[test]
    fn exponential_metric_factor_is_constant(t1 in 0.1f64..3.0, t2 in 3.2f64..6.2, w in 0.1f64..0.8, p in point(), q in point()) {
        let fam = ExponentialFamily { thetas: vec![0.0, t1, t2], weights: vec![w * 0.5, 1.0 - w, w * 0.5], ambient_slots: 4 };
        let s = make_exponential(&fam).unwrap();
        let (a, b) = (s.jet_at(p, 1).unwrap(), s.jet_at(q, 1).unwrap());
        if let (Ok(fa), Ok(fb)) = (metric_factor(&a), metric_factor(&b)) {
            prop_assert!((fa - fb).abs() <= 1e-12);
        }
    }
}
