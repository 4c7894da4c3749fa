mod common;

use proptest::prelude::*;
use toric_core::geometry::{coordinate_laplacians, ke_check, laplacian_invariant, scalar_curvature, scalar_curvature_with, DerivativeMode};
use toric_core::poly::Polynomial;
use toric_core::polytope::{Facet, LabelledPolytope};
use toric_core::potential::SymplecticPotential;
use toric_core::rational::{frac, int};
use toric_core::sampling::FloatPolytope;

fn fixtures() -> Vec<LabelledPolytope> {
    vec![
        LabelledPolytope::interval(int(0), int(1)).unwrap(),
        LabelledPolytope::standard_simplex(2, 1).unwrap(),
        LabelledPolytope::cube(2, int(0), int(1)).unwrap(),
        LabelledPolytope::new(
            2,
            vec![
                Facet::new(vec![1, 0], frac(1, 5)),
                Facet::new(vec![0, 1], frac(1, 7)),
                Facet::new(vec![-1, -1], frac(9, 10)),
            ],
        )
        .unwrap(),
    ]
}

fn potentials(p: &LabelledPolytope, c: f64, s: f64) -> Vec<SymplecticPotential> {
    vec![
        SymplecticPotential::guillemin(p).unwrap(),
        SymplecticPotential::quadratic_perturbed(p, 0, c).unwrap(),
        SymplecticPotential::dilation(p, s).unwrap(),
    ]
}

fn point_in(fp: &FloatPolytope, raw: &[f64]) -> Vec<f64> {
    let w: Vec<f64> = (0..fp.vertices.len()).map(|i| 0.3 + raw[i % raw.len()]).collect();
    let total: f64 = w.iter().sum();
    (0..fp.dim).map(|j| fp.vertices.iter().zip(&w).map(|(v, a)| v[j] * a).sum::<f64>() / total).collect()
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 40, failure_persistence: None, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn ricci_trace_gives_scalar_curvature(which in 0usize..4, raw in prop::collection::vec(0.0f64..1.0, 3), c in 0.0f64..20.0, s in 1.05f64..5.0) {
        let p = &fixtures()[which];
        let x = point_in(&FloatPolytope::new(p).unwrap(), &raw);
        for u in potentials(p, c, s) {
            let k = scalar_curvature(&u, &x).unwrap();
            prop_assert!((k.scal - 2.0 * k.ricci.trace()).abs() <= 1e-9 * (1.0 + k.scal.abs()));
        }
    }

    #[test]
    fn coordinate_laplacians_generate_ricci(which in 0usize..4, raw in prop::collection::vec(0.0f64..1.0, 3), c in 0.0f64..20.0, s in 1.05f64..5.0) {
        let p = &fixtures()[which];
        let fp = FloatPolytope::new(p).unwrap();
        let x = point_in(&fp, &raw);
        let h = 1e-5 * fp.width();
        for u in potentials(p, c, s) {
            let rho = scalar_curvature(&u, &x).unwrap().ricci;
            for k in 0..fp.dim {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[k] += h;
                xm[k] -= h;
                let lp = coordinate_laplacians(&u, &xp, DerivativeMode::ClosedForm).unwrap();
                let lm = coordinate_laplacians(&u, &xm, DerivativeMode::ClosedForm).unwrap();
                for j in 0..fp.dim {
                    let fd = (lp[j] - lm[j]) / (2.0 * h);
                    prop_assert!((fd - 2.0 * rho[(k, j)]).abs() <= 1e-5 * (1.0 + rho.norm()), "{}: {} vs {}", u.kind(), fd, 2.0 * rho[(k, j)]);
                }
            }
        }
    }

    #[test]
    fn closed_form_and_difference_curvature_agree(which in 0usize..4, raw in prop::collection::vec(0.0f64..1.0, 3), c in 0.0f64..20.0, s in 1.05f64..5.0) {
        let p = &fixtures()[which];
        let fp = FloatPolytope::new(p).unwrap();
        let x = point_in(&fp, &raw);
        prop_assume!(fp.facet_values(&x).iter().all(|&l| l >= 0.05));
        for u in potentials(p, c, s) {
            let a = scalar_curvature_with(&u, &x, DerivativeMode::ClosedForm).unwrap().scal;
            let b = scalar_curvature_with(&u, &x, DerivativeMode::FiniteDifference).unwrap().scal;
            prop_assert!((a - b).abs() <= 1e-4 * a.abs().max(1.0), "{}: {} vs {}", u.kind(), a, b);
        }
    }

    #[test]
    fn perturbed_interval_curvature_matches_hand_derivative(x in 0.01f64..0.99, c in 0.0f64..100.0) {
        let p = &fixtures()[0];
        let u = SymplecticPotential::quadratic_perturbed(p, 0, c).unwrap();
        let want = common::scal_uc01(c, x);
        let got = scalar_curvature(&u, &[x]).unwrap().scal;
        prop_assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "{} vs {}", got, want);
    }
}

#[test]
fn ke_fit_is_an_eigenfunction() {
    for p in [fixtures()[0].clone(), fixtures()[1].clone()] {
        let u = SymplecticPotential::guillemin(&p).unwrap();
        let r = ke_check(&u, 40, None).unwrap();
        assert!(r.is_ke);
        let fp = FloatPolytope::new(&p).unwrap();
        for i in 0..fp.dim {
            let mut a = vec![0.0; fp.dim];
            a[i] = 1.0;
            let f = Polynomial::affine(&a, -r.xbar[i]);
            for x in fp.interior_points(25, 0.02) {
                let lhs = laplacian_invariant(&u, &f, &x).unwrap();
                let rhs = 2.0 * r.lambda_hat * (x[i] - r.xbar[i]);
                assert!((lhs - rhs).abs() < r.tol, "{lhs} vs {rhs}");
            }
        }
    }
}

#[test]
fn non_einstein_potentials_are_rejected() {
    for p in fixtures() {
        let u = SymplecticPotential::quadratic_perturbed(&p, 0, 5.0).unwrap();
        assert!(!ke_check(&u, 40, None).unwrap().is_ke);
    }
    // the square is a product of two round spheres, which is Einstein
    let sq = SymplecticPotential::guillemin(&fixtures()[2]).unwrap();
    let r = ke_check(&sq, 40, None).unwrap();
    assert!(r.is_ke && (r.lambda_hat - 2.0).abs() < 1e-9);
}
