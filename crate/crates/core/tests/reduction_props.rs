use grassdyn::recipes::{random_basis, random_structure};
use grassdyn::reduction::{reduce, verify_reduction, ChiView, DEFAULT_REDUCTION_TOL};
use grassdyn::sampling::rng;
use proptest::prelude::*;
use rand::Rng;

fn case(seed: u64) -> (ChiView, Vec<Vec<f64>>) {
    let mut r = rng(seed);
    let structure = random_structure(&mut r, 12, 3).unwrap();
    let n = structure.ambient_dim();
    let m = r.random_range(1..n);
    let basis = random_basis(&mut r, n, m);
    (ChiView::new(structure), basis)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn deterministic(seed in any::<u64>()) {
        let (view, basis) = case(seed);
        let a = reduce(&view, &basis, DEFAULT_REDUCTION_TOL).unwrap();
        let b = reduce(&view, &basis, DEFAULT_REDUCTION_TOL).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn span_and_properties_hold(seed in any::<u64>()) {
        let (view, basis) = case(seed);
        let rb = reduce(&view, &basis, DEFAULT_REDUCTION_TOL).unwrap();
        let check = verify_reduction(&rb, &view, &basis, DEFAULT_REDUCTION_TOL);
        prop_assert!(check.passed, "{:?}", check);
        prop_assert!(check.span_max_angle < 1e-8);
    }

    #[test]
    fn idempotent_shape(seed in any::<u64>()) {
        let (view, basis) = case(seed);
        let once = reduce(&view, &basis, DEFAULT_REDUCTION_TOL).unwrap();
        let twice = reduce(&view, &once.vectors, DEFAULT_REDUCTION_TOL).unwrap();
        prop_assert_eq!(once.kappa, twice.kappa);
    }

    #[test]
    fn monotone_staircase(seed in any::<u64>()) {
        let (view, basis) = case(seed);
        let rb = reduce(&view, &basis, DEFAULT_REDUCTION_TOL).unwrap();
        prop_assert_eq!(rb.kappa.len(), view.relative_size() + 1);
        for w in rb.kappa.windows(2) {
            prop_assert!(w[0] <= w[1] && w[1] - w[0] <= 2);
        }
    }
}
