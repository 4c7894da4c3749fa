mod common;

use nalgebra::DVector;
use proptest::prelude::*;
use toric_core::linalg::quad_form;
use toric_core::polytope::LabelledPolytope;
use toric_core::potential::SymplecticPotential;
use toric_core::quadrature::build_quadrature;
use toric_core::rational::{self, int};
use toric_core::spectral::{assemble, lambda1_invariant, rayleigh_quotient, sweep_dilation, sweep_uc, TrialSpace};

fn interval() -> LabelledPolytope {
    LabelledPolytope::interval(int(0), int(1)).unwrap()
}

fn centred_interval() -> LabelledPolytope {
    LabelledPolytope::interval(int(-1), int(1)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

#[test]
fn ritz_eigenvector_reproduces_its_value() {
    let simplex = LabelledPolytope::standard_simplex(2, 1).unwrap();
    let square = LabelledPolytope::cube(2, int(0), int(1)).unwrap();
    let cases = [
        (SymplecticPotential::guillemin(&interval()).unwrap(), 6, 4, 3),
        (SymplecticPotential::quadratic_perturbed(&interval(), 0, 10.0).unwrap(), 8, 4, 3),
        (SymplecticPotential::dilation(&centred_interval(), 1.5).unwrap(), 8, 4, 3),
        (SymplecticPotential::guillemin(&simplex).unwrap(), 4, 3, 1),
        (SymplecticPotential::quadratic_perturbed(&square, 1, 3.0).unwrap(), 4, 3, 1),
    ];
    for (u, degree, order, depth) in cases {
        let q = build_quadrature(u.polytope(), order, depth).unwrap();
        let r = lambda1_invariant(&u, degree, &q).unwrap();
        let rq = rayleigh_quotient(&u, &r.eigenfunction(), &q).unwrap();
        assert!(rel(rq, r.lambda1_t) < 1e-8, "{}: {rq} vs {}", u.kind(), r.lambda1_t);
        assert!(r.lambda1_t > 0.0);
        assert!(r.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn larger_trial_spaces_never_raise_the_value() {
    let simplex = LabelledPolytope::standard_simplex(2, 1).unwrap();
    let cases = [
        (SymplecticPotential::quadratic_perturbed(&interval(), 0, 10.0).unwrap(), 10, 4, 3),
        (SymplecticPotential::dilation(&centred_interval(), 1.1).unwrap(), 10, 4, 3),
        (SymplecticPotential::quadratic_perturbed(&simplex, 0, 2.0).unwrap(), 5, 4, 1),
    ];
    for (u, max_degree, order, depth) in cases {
        let q = build_quadrature(u.polytope(), order, depth).unwrap();
        let values: Vec<f64> = (1..=max_degree).map(|d| lambda1_invariant(&u, d, &q).unwrap().lambda1_t).collect();
        for w in values.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-10), "{}: {values:?}", u.kind());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn dilation_stiffness_dominates(si in 0usize..3, square in any::<bool>(), coeffs in prop::collection::vec(-1.0f64..1.0, 15)) {
        let s = [1.01, 2.0, 10.0][si];
        let p = if square { LabelledPolytope::cube(2, int(-1), int(1)).unwrap() } else { centred_interval() };
        let q = build_quadrature(&p, 3, 1).unwrap();
        let space = TrialSpace::new(&p, 4, &q).unwrap();
        let a0 = assemble(&SymplecticPotential::guillemin(&p).unwrap(), &space, &q).unwrap().stiffness;
        let a_s = assemble(&SymplecticPotential::dilation(&p, s).unwrap(), &space, &q).unwrap().stiffness;
        let x = DVector::from_iterator(space.len(), coeffs.iter().cycle().cloned().take(space.len()));
        let (e0, es) = (quad_form(&a0, &x), quad_form(&a_s, &x));
        prop_assert!(es >= e0 * (1.0 - 1e-12), "{} < {}", es, e0);
    }

    #[test]
    fn rule_integrates_polynomials_exactly(order in 1usize..5, depth in 0usize..3, a in 0u32..8, b in 0u32..8) {
        prop_assume!(a + b < 2 * order as u32);
        // interval [0, 1]
        let q1 = build_quadrature(&interval(), order, depth).unwrap();
        let got = q1.integrate(|x| x[0].powi(a as i32));
        prop_assert!(rel(got, 1.0 / (a + 1) as f64) < 1e-12);
        // unit simplex: a! b! / (a + b + 2)!
        let q2 = build_quadrature(&LabelledPolytope::standard_simplex(2, 1).unwrap(), order, depth).unwrap();
        let got = q2.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32));
        prop_assert!(rel(got, factorial(a) * factorial(b) / factorial(a + b + 2)) < 1e-12);
        // unit square
        let q3 = build_quadrature(&LabelledPolytope::cube(2, int(0), int(1)).unwrap(), order, depth).unwrap();
        let got = q3.integrate(|x| x[0].powi(a as i32) * x[1].powi(b as i32));
        prop_assert!(rel(got, 1.0 / ((a + 1) * (b + 1)) as f64) < 1e-12);
    }
}

#[test]
fn weights_sum_to_exact_volume() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/polytopes");
    let mut polys: Vec<LabelledPolytope> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| toric_core::io::read_polytope(&e.unwrap().path()).unwrap())
        .collect();
    polys.push(LabelledPolytope::cube(3, int(0), int(1)).unwrap());
    polys.push(LabelledPolytope::standard_simplex(3, 2).unwrap());
    for p in polys {
        for (order, depth) in [(1, 0), (3, 2), (4, 1)] {
            let q = build_quadrature(&p, order, depth).unwrap();
            let vol = rational::to_f64(&rational::parse(&q.volume).unwrap());
            assert!(rel(q.total_weight(), vol) < 1e-10);
            assert!(q.weights.iter().all(|&w| w > 0.0));
        }
    }
}

#[test]
fn interval_values_match_sturm_liouville_oracle() {
    let q = build_quadrature(&interval(), 4, 3).unwrap();
    let qc = build_quadrature(&centred_interval(), 4, 3).unwrap();
    let mut cases: Vec<(SymplecticPotential, f64)> = vec![(
        SymplecticPotential::guillemin(&interval()).unwrap(),
        common::sturm_liouville_lambda1(common::h_guillemin01, 0.0, 1.0, 2000),
    )];
    for c in [0.0, 1.0, 10.0] {
        cases.push((
            SymplecticPotential::quadratic_perturbed(&interval(), 0, c).unwrap(),
            common::sturm_liouville_lambda1(common::h_uc01(c), 0.0, 1.0, 2000),
        ));
    }
    for s in [1.5, 2.0] {
        cases.push((
            SymplecticPotential::dilation(&centred_interval(), s).unwrap(),
            common::sturm_liouville_lambda1(common::h_dilation_pm1(s), -1.0, 1.0, 2000),
        ));
    }
    for (u, oracle) in cases {
        let rule = if u.polytope().facets()[0].offset == int(1) { &qc } else { &q };
        let got = lambda1_invariant(&u, 8, rule).unwrap().lambda1_t;
        assert!(rel(got, oracle) < 1e-3, "{}: {got} vs {oracle}", u.kind());
    }
}

#[test]
fn sweeps_are_bit_identical() {
    let q = build_quadrature(&interval(), 3, 2).unwrap();
    let a = sweep_uc(&interval(), 0, &[0.0, 1.0, 10.0], 6, &q).unwrap().to_csv();
    let b = sweep_uc(&interval(), 0, &[0.0, 1.0, 10.0], 6, &q).unwrap().to_csv();
    assert_eq!(a, b);
    let sq = LabelledPolytope::cube(2, int(-1), int(1)).unwrap();
    let q2 = build_quadrature(&sq, 3, 1).unwrap();
    let a = sweep_dilation(&sq, &[2.0, 1.2], 4, &q2).unwrap();
    let b = sweep_dilation(&sq, &[2.0, 1.2], 4, &q2).unwrap();
    assert_eq!(a.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), b.values().iter().map(|v| v.to_bits()).collect::<Vec<_>>());
}

#[test]
fn perturbation_drives_value_down_and_dilation_up() {
    let q = build_quadrature(&interval(), 4, 3).unwrap();
    let t = sweep_uc(&interval(), 0, &[0.0, 1.0, 10.0, 100.0, 1000.0], 8, &q).unwrap();
    let v = t.values();
    assert!(v.windows(2).all(|w| w[1] < w[0]) && v[4] < 0.05, "{v:?}");
    let qc = build_quadrature(&centred_interval(), 4, 3).unwrap();
    let t = sweep_dilation(&centred_interval(), &[2.0, 1.5, 1.1, 1.01], 8, &qc).unwrap();
    let v = t.values();
    assert!(v.windows(2).all(|w| w[1] > w[0]) && v[3] > 5.0 * v[0], "{v:?}");
}
