use std::f64::consts::SQRT_2;

use grassdyn::jordan::example_operator;
use grassdyn::matrix::{matrix_power, Matrix};
use grassdyn::orbit::{orbit_grassmann_density, orbit_point_density, projection_rank_lock, DensityOptions, Orbit};
use grassdyn::par::Exec;
use grassdyn::recipes::family_member;
use grassdyn::sampling::{random_orthogonal, random_subspace, rng, unit_vector};
use grassdyn::subspace::{complement, grassmann_distance, Subspace};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn example_operators_are_isometries(seed in any::<u64>(), rotations in 1usize..=3, odd in any::<bool>()) {
        let mut r = rng(seed);
        let angles: Vec<f64> = (0..rotations).map(|_| r.random_range(0.1..3.0)).collect();
        let t = example_operator(&angles, odd).unwrap().into_dmatrix();
        let x = DVector::from_vec(unit_vector(&mut r, t.nrows())).scale(r.random_range(0.1..10.0));
        let norm = x.norm();
        let mut y = x;
        for _ in 0..10_000 {
            y = &t * y;
            prop_assert!((y.norm() / norm - 1.0).abs() <= 1e-9);
        }
    }

    #[test]
    fn incremental_frames_match_direct_powers(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=6);
        let d = r.random_range(1..n);
        // orthogonal times a diagonal within 1e-4 of the identity
        let q = random_orthogonal(&mut r, n);
        let diag = DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| 1.0 + r.random_range(-1e-4..1e-4)));
        let t = Matrix::from_dmatrix(q * diag).unwrap();
        let m = random_subspace(&mut r, n, d).unwrap();
        let mut orbit = Orbit::new(&t, &m).unwrap();
        for _ in 0..10_000 {
            orbit.advance().unwrap();
        }
        let direct = Subspace::from_columns(&(matrix_power(&t, 10_000).unwrap().as_dmatrix() * m.frame())).unwrap();
        prop_assert!(grassmann_distance(&orbit.subspace(), &direct).unwrap().chordal < 1e-7);
    }

    #[test]
    fn family_members_stay_locked(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = example_operator(&[1.0, SQRT_2], false).unwrap();
        let m = family_member(&mut r).unwrap();
        let rep = projection_rank_lock(&t, &m, 2_000).unwrap();
        prop_assert!(rep.holds, "{:?}", rep);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn grassmann_metric_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=8);
        let d = r.random_range(1..=n);
        let a = random_subspace(&mut r, n, d).unwrap();
        let b = random_subspace(&mut r, n, d).unwrap();
        let c = random_subspace(&mut r, n, d).unwrap();
        let ab = grassmann_distance(&a, &b).unwrap();
        prop_assert_eq!(&ab, &grassmann_distance(&b, &a).unwrap());
        let ac = grassmann_distance(&a, &c).unwrap().chordal;
        let bc = grassmann_distance(&b, &c).unwrap().chordal;
        prop_assert!(ac <= ab.chordal + bc + 1e-12);
        prop_assert!(ab.principal_angles.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(ab.principal_angles.iter().all(|&x| (0.0..=std::f64::consts::FRAC_PI_2).contains(&x)));
        prop_assert_eq!(grassmann_distance(&a, &a).unwrap().chordal, 0.0);
    }

    #[test]
    fn complement_preserves_max_angle(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(2..=10);
        let d = r.random_range(1..n);
        let a = random_subspace(&mut r, n, d).unwrap();
        let b = random_subspace(&mut r, n, d).unwrap();
        let direct = grassmann_distance(&a, &b).unwrap().max_angle;
        let dual = grassmann_distance(&complement(&a).unwrap(), &complement(&b).unwrap()).unwrap().max_angle;
        prop_assert!((direct - dual).abs() <= 1e-9);
        let back = complement(&complement(&a).unwrap()).unwrap();
        prop_assert!(grassmann_distance(&a, &back).unwrap().chordal < 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn density_is_monotone_in_budget(seed in any::<u64>(), k1 in 0usize..3000, extra in 0usize..3000) {
        let mut r = rng(seed);
        let t = example_operator(&[1.0, SQRT_2], false).unwrap();
        let m = Subspace::coordinate(4, &[0, 2]).unwrap();
        let targets: Vec<Vec<f64>> = (0..5).map(|_| unit_vector(&mut r, 4)).collect();
        let short = orbit_point_density(&t, &m, &targets, &DensityOptions::new(k1, 0.05)).unwrap();
        let long = orbit_point_density(&t, &m, &targets, &DensityOptions::new(k1 + extra, 0.05)).unwrap();
        for (s, l) in short.per_target.iter().zip(&long.per_target) {
            prop_assert!(l.min_distance <= s.min_distance);
            prop_assert!(l.argmin_iterate <= k1 + extra);
        }
        prop_assert!(long.hits >= short.hits);

        let planes: Vec<Subspace> = (0..3).map(|_| random_subspace(&mut r, 4, 2).unwrap()).collect();
        let gs = orbit_grassmann_density(&t, &m, &planes, &DensityOptions::new(k1, 0.02)).unwrap();
        let gl = orbit_grassmann_density(&t, &m, &planes, &DensityOptions::new(k1 + extra, 0.02)).unwrap();
        for (s, l) in gs.per_target.iter().zip(&gl.per_target) {
            prop_assert!(l.min_distance <= s.min_distance);
        }
    }

    #[test]
    fn schedules_agree(seed in any::<u64>()) {
        let mut r = rng(seed);
        let t = example_operator(&[1.0, SQRT_2], false).unwrap();
        let m = random_subspace(&mut r, 4, 2).unwrap();
        let targets: Vec<Vec<f64>> = (0..9).map(|_| unit_vector(&mut r, 4)).collect();
        let mut opts = DensityOptions::new(5000, 0.05);
        opts.exec = Exec::Sequential;
        let a = orbit_point_density(&t, &m, &targets, &opts).unwrap();
        opts.exec = Exec::Parallel;
        let b = orbit_point_density(&t, &m, &targets, &opts).unwrap();
        prop_assert_eq!(a.per_target, b.per_target);
    }
}

#[test]
fn single_rotation_fills_the_circle_of_lines() {
    let t = example_operator(&[1.0], false).unwrap();
    let m = Subspace::coordinate(2, &[0]).unwrap();
    let mut r = rng(31);
    let targets: Vec<Subspace> = (0..50).map(|_| random_subspace(&mut r, 2, 1).unwrap()).collect();
    let rep = orbit_grassmann_density(&t, &m, &targets, &DensityOptions::new(10_000, 0.02)).unwrap();
    assert_eq!(rep.hits, 50);
}

#[test]
fn double_rotation_never_reaches_the_first_plane() {
    let t = example_operator(&[1.0, SQRT_2], false).unwrap();
    let m = Subspace::coordinate(4, &[0, 2]).unwrap();
    let plane = Subspace::coordinate(4, &[0, 1]).unwrap();
    let mut orbit = Orbit::new(&t, &m).unwrap();
    for _ in 0..10_000 {
        let d = grassmann_distance(&orbit.subspace(), &plane).unwrap();
        assert!((d.max_angle - std::f64::consts::FRAC_PI_2).abs() <= 1e-10);
        orbit.advance().unwrap();
    }
}
