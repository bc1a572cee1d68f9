use ebound::cli::FunctionSpec;
use ebound::geometry::{min_norm_point, project_onto_polyhedron, Projector};
use ebound::oracle::{brute_min_norm, brute_projection};
use ebound::perturb::{
    global_lipschitz_bound, is_local_member, synthesize_destabilizer, Candidate,
    LinearPerturbation, LocalFamily,
};
use ebound::slopes::{boundary_slope_local, local_error_bound_modulus};
use ebound::{AffinePiece, PolyhedralFunction, Settings};
use proptest::prelude::*;

fn coeff() -> impl Strategy<Value = f64> {
    (-50i32..=50).prop_map(|k| k as f64 / 10.0)
}

/// `(f, x̄)` with `f(x̄) = 0`: `k` pieces vanish at `x̄`, the rest lie below it.
fn anchored() -> impl Strategy<Value = (PolyhedralFunction, Vec<f64>)> {
    (1usize..=2, 1usize..=5).prop_flat_map(|(n, m)| {
        (
            prop::collection::vec(prop::collection::vec(coeff(), n), m),
            prop::collection::vec(-3i32..=3, n),
            prop::collection::vec(0.1f64..2.0, m),
            1usize..=m.min(n + 1),
        )
            .prop_map(move |(grads, xb, gaps, k)| {
                let xbar: Vec<f64> = xb.iter().map(|v| *v as f64 / 10.0).collect();
                let pieces = grads
                    .into_iter()
                    .enumerate()
                    .map(|(i, a)| {
                        let v = if i < k { 0.0 } else { -gaps[i] };
                        let b = a.iter().zip(&xbar).map(|(p, q)| p * q).sum::<f64>() - v;
                        AffinePiece::new(a, b)
                    })
                    .collect();
                (PolyhedralFunction::new(n, pieces).unwrap(), xbar)
            })
    })
}

fn cfg() -> Settings {
    Settings::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn base_point_is_on_the_zero_level((f, x) in anchored()) {
        prop_assert!(f.evaluate(&x).unwrap().abs() < 1e-9);
        let act = f.active_set(&x, 1e-9).unwrap();
        prop_assert!(!act.is_empty());
        prop_assert!(f.f_plus(&x).unwrap() < 1e-9);
    }

    #[test]
    fn boundary_slope_bounds_the_modulus((f, x) in anchored()) {
        let c = cfg();
        let bd = boundary_slope_local(&f, &x, &c).unwrap().value();
        let er = local_error_bound_modulus(&f, &x, &c).unwrap().value();
        prop_assert!(bd <= er + 1e-9, "bd {} er {}", bd, er);
    }

    #[test]
    fn min_norm_matches_brute_force((f, x) in anchored()) {
        let sub = f.subdifferential(&x, &cfg()).unwrap();
        let exact = min_norm_point(&sub, &cfg()).unwrap();
        let brute = brute_min_norm(&sub, 40).unwrap();
        prop_assert!(brute >= exact.dist - 1e-9);
        prop_assert!(brute - exact.dist <= 1e-2);
        prop_assert!(sub.contains(&exact.point, &cfg()).unwrap());
    }

    #[test]
    fn projection_matches_brute_force(
        (f, _x) in anchored(),
        y in prop::collection::vec(-20i32..=20, 2),
    ) {
        let c = cfg();
        let q = f.sublevel_polyhedron();
        let y: Vec<f64> = y.iter().take(f.dim()).map(|v| *v as f64 / 4.0).collect();
        let exact = project_onto_polyhedron(&q, &y, &c).unwrap();
        let p = exact.point.clone().unwrap();
        prop_assert!(q.contains(&p, 1e-7));
        let pre = Projector::new(&q, &c).unwrap().project(&y).unwrap();
        prop_assert!((pre.dist - exact.dist).abs() < 1e-9);
        let brute = brute_projection(&q, &y, 11).unwrap();
        prop_assert!((brute - exact.dist).abs() <= 1e-7 * (1.0 + exact.dist), "brute {} exact {}", brute, exact.dist);
    }

    #[test]
    fn destabilizer_beats_the_radius((f, x) in anchored(), extra in 0.05f64..1.0) {
        let c = cfg();
        let bd = boundary_slope_local(&f, &x, &c).unwrap().value();
        let eps = bd + extra;
        let d = synthesize_destabilizer(&f, &x, eps, None, &c).unwrap();
        let slope = d.perturbation.slope.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!(slope < eps);
        let er = local_error_bound_modulus(&d.g, &x, &c).unwrap().value();
        prop_assert!(er <= 2.0 * d.certificate.xi + 1e-9, "er {} xi {}", er, d.certificate.xi);
        prop_assert!(d.g.evaluate(&x).unwrap().abs() < 1e-9);
    }

    #[test]
    fn linear_candidates_have_their_slope_as_rate(
        (f, x) in anchored(),
        w in prop::collection::vec(coeff(), 2),
        eps in 0.0f64..8.0,
    ) {
        let w: Vec<f64> = w.into_iter().take(f.dim()).collect();
        let norm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        let cand = Candidate::Linear(LinearPerturbation::new(x.clone(), w));
        let m = is_local_member(&f, &x, &cand, eps, LocalFamily::Linear, &cfg()).unwrap();
        prop_assert!((m.rate - norm).abs() < 1e-9);
        prop_assert_eq!(m.member, norm <= eps);
    }

    #[test]
    fn lipschitz_bound_dominates_difference_quotients(
        (f, _x) in anchored(),
        u in prop::collection::vec(-5.0f64..5.0, 2),
        v in prop::collection::vec(-5.0f64..5.0, 2),
    ) {
        let n = f.dim();
        let (u, v) = (&u[..n], &v[..n]);
        let gap = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        prop_assume!(gap > 1e-6);
        let q = (f.evaluate(u).unwrap() - f.evaluate(v).unwrap()).abs() / gap;
        prop_assert!(q <= global_lipschitz_bound(&f) + 1e-9);
    }

    #[test]
    fn specs_round_trip(
        rows in prop::collection::vec((any::<f64>(), any::<f64>(), any::<f64>()), 1..6),
    ) {
        prop_assume!(rows.iter().all(|(a, b, c)| a.is_finite() && b.is_finite() && c.is_finite()));
        let pieces = rows.iter().map(|(a, b, c)| AffinePiece::new(vec![*a, *b], *c)).collect();
        let f = PolyhedralFunction::new(2, pieces).unwrap();
        let text = serde_json::to_string(&FunctionSpec::from_function(&f, None)).unwrap();
        let g = FunctionSpec::parse(&text).unwrap().to_function().unwrap();
        prop_assert_eq!(f, g);
    }
}
