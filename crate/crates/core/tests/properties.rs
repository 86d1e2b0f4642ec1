use num_traits::{Signed, Zero};
use proptest::prelude::*;
use qmt_core::chow::{chow_presentation, graded_dimensions};
use qmt_core::exactlin::verify_exact_sequence;
use qmt_core::fans::{count_cones, poincare_polynomial, verify_simplicial_sample};
use qmt_core::pseudofan::{AmvcProblem, MinValueSolution};
use qmt_core::rational::Q;
use qmt_core::toricdata::{build_vertex_matrix, build_weight_matrix};
use qmt_core::Degree;

fn degree() -> impl Strategy<Value = Degree> {
    (1i64..=4, 1i64..=4).prop_filter_map("d1 >= d2", |(a, b)| Degree::new(a.max(b), a.min(b)).ok())
}

fn rational() -> impl Strategy<Value = Q> {
    (-60i64..=60, 1i64..=6).prop_map(|(p, q)| Q::new(p.into(), q.into()))
}

fn target(d: Degree) -> impl Strategy<Value = Vec<Q>> {
    proptest::collection::vec(rational(), d.r())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn solver_certifies_rational_targets((d, y) in degree().prop_flat_map(|d| (Just(d), target(d)))) {
        let p = AmvcProblem::new(d);
        let MinValueSolution { x, residuals } = p.solve(&y).unwrap();
        prop_assert!(residuals.iter().all(Zero::is_zero));
        prop_assert!(p.is_solution(&y, &x));
        let vals = p.member_values(&y, &x);
        for c in &p.collections.collections {
            prop_assert!(c.indices.iter().all(|&i| !vals[i].is_negative()));
        }
    }

    #[test]
    fn oracle_agrees_on_2_1(y in target(Degree::new(2, 1).unwrap())) {
        let p = AmvcProblem::new(Degree::new(2, 1).unwrap());
        let e = p.enumerate(&y).unwrap();
        prop_assert_eq!(e.solutions.len(), 1);
        prop_assert_eq!(&e.solutions[0].x, &p.solve(&y).unwrap().x);
    }

    #[test]
    fn singletons_are_cones(d in degree()) {
        let c = count_cones(d, 1, None).unwrap();
        prop_assert_eq!(c.counts, vec![1, d.r() as u64]);
    }

    #[test]
    fn simplicial_samples_pass(d in degree(), seed in any::<u64>()) {
        let r = verify_simplicial_sample(d, 5, seed);
        prop_assert!(r.all_passed());
        prop_assert_eq!(r.max_size, d.n());
    }
}

#[test]
fn exactness_up_to_five() {
    for d in Degree::all_up_to(5) {
        let rep = verify_exact_sequence(&build_vertex_matrix(d).matrix, &build_weight_matrix(d).matrix).unwrap();
        assert!(rep.is_exact(), "{d}: {:?}", rep.failures());
    }
}

#[test]
fn betti_vectors_well_formed() {
    for d in Degree::all_up_to(4) {
        let p = poincare_polynomial(d, None).unwrap().polynomial;
        assert!(p.is_palindromic(), "{d}");
        assert_eq!(p.betti[0], 1);
        assert_eq!(p.betti[1], d.torus_rank() as i128, "{d}");
        assert!(p.betti.iter().all(|&b| b > 0));
    }
}

#[test]
fn chow_matches_cone_counting() {
    for d in Degree::all_up_to(3) {
        let dims = graded_dimensions(&chow_presentation(d), 2, None).unwrap();
        let betti = poincare_polynomial(d, None).unwrap().polynomial.betti;
        let dims: Vec<i128> = dims.into_iter().map(|x| x as i128).collect();
        assert_eq!(dims, betti[..3].to_vec(), "{d}");
    }
}
