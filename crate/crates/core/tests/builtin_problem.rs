mod support;

use elcone::example::{self, OMEGA_POINT, SOLUTION};
use elcone::exact::rat;
use elcone::solver::{check_start, in_gamma, in_omega, mixed_picard_step, picard_step, residual, verify_lower_bound};
use elcone::{leq, solve, SolveOptions, Termination, Tolerance};
use proptest::prelude::*;
use support::{arc_samples, builtin_blocks, dist};

const TOL: Tolerance = Tolerance::DEFAULT;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn blocks_match_hand_formula(z in prop::collection::vec(-50.0..50.0f64, 4)) {
        let problem = example::problem();
        let (g, h) = problem.blocks(&problem.point(z.clone()).unwrap()).unwrap();
        let (eg, eh) = builtin_blocks(&z);
        prop_assert!(dist(&g, &eg) <= 1e-12 * (1.0 + z.iter().map(|v| v.abs()).sum::<f64>()));
        prop_assert!(dist(&h, &eh) <= 1e-12 * (1.0 + z.iter().map(|v| v.abs()).sum::<f64>()));
    }

    #[test]
    fn mixed_step_equals_full_step(z in prop::collection::vec(-50.0..50.0f64, 4)) {
        let problem = example::problem();
        let pt = problem.point(z.clone()).unwrap();
        let full = picard_step(&problem, &pt).unwrap();
        let mixed = mixed_picard_step(&problem, &z[..2], &z[2..]).unwrap();
        prop_assert_eq!(full, mixed);
    }
}

#[test]
fn first_iterate_and_start_check() {
    let problem = example::problem();
    let check = check_start(&problem, &problem.zero_point(), TOL).unwrap();
    assert!(check.ordered && check.in_k);
    let z1 = check.first_iterate.as_slice().to_vec();
    assert!(dist(&z1, &[0.4, 0.4, 0.0, 7.0 / 30.0]) <= 1e-15);
}

#[test]
fn closed_form_recurrences() {
    let problem = example::problem();
    let rep = solve(
        &problem,
        &problem.zero_point(),
        &SolveOptions {
            trace: true,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(rep.termination, Termination::ResidualTol);
    for w in rep.trace.windows(2).skip(1) {
        let (a, b) = (w[0].z.as_slice(), w[1].z.as_slice());
        assert!((b[0] - (5.0 / 24.0 * a[0] + 19.0 / 45.0)).abs() <= 1e-12);
        assert!((b[3] - (5.0 / 24.0 * a[3] + 19.0 / 90.0)).abs() <= 1e-12);
        assert!((b[0] - (4.0 * b[3] - 8.0 / 15.0)).abs() <= 1e-12);
    }
}

#[test]
fn exact_iterates_by_hand() {
    let it = example::exact_problem().iterate(vec![rat(0, 1); 4], 3).unwrap();
    assert_eq!(it[1], vec![rat(2, 5), rat(2, 5), rat(0, 1), rat(7, 30)]);
    // x_2 = (5/24)(2/5) + 19/45, u_2 = (5/24)(7/30) + 19/90
    assert_eq!(it[2], vec![rat(91, 180), rat(91, 180), rat(0, 1), rat(187, 720)]);
}

#[test]
fn gamma_traps_the_iterates() {
    let problem = example::problem();
    let w = problem.point(OMEGA_POINT.to_vec()).unwrap();
    assert!(in_omega(&problem, &w, TOL).unwrap());
    assert!(in_gamma(&problem, &w, TOL).unwrap());
    let rep = solve(
        &problem,
        &problem.zero_point(),
        &SolveOptions {
            trace: true,
            ..Default::default()
        },
    )
    .unwrap();
    for row in &rep.trace {
        assert!(leq(&row.z, &w, TOL).unwrap(), "iterate {}", row.n);
    }
    assert!(verify_lower_bound(&problem, &rep.solution, &[w], TOL).unwrap());
    let outside = problem.point(vec![0.0, 0.0, 1.0, 0.0]).unwrap();
    assert!(verify_lower_bound(&problem, &rep.solution, &[outside], TOL).is_err());
}

#[test]
fn solution_is_a_fixed_point() {
    let problem = example::problem();
    let z = problem.point(SOLUTION.to_vec()).unwrap();
    assert!(residual(&problem, &z).unwrap() <= 1e-15);
}

#[test]
fn ray_candidate_fails_brute_force_dual_test() {
    let problem = example::problem();
    let c = problem.point(example::ray_candidate().to_vec()).unwrap();
    let (g, h) = problem.blocks(&c).unwrap();
    assert!(g.iter().all(|v| v.abs() <= 1e-12));
    assert!((h[0] - 2.0 / 15.0).abs() <= 1e-12 && (h[1] + 2.0 / 15.0).abs() <= 1e-12);
    let h2 = std::f64::consts::FRAC_1_SQRT_2;
    let worst = arc_samples(&[0.0, 1.0], &[h2, h2], 1000)
        .iter()
        .map(|m| h[0] * m[0] + h[1] * m[1])
        .fold(f64::INFINITY, f64::min);
    assert!(worst < -0.1);
    assert!(!problem.cone().contains_dual(&h, TOL).unwrap());
    // the candidate is not ordered below its Picard image
    let rep = solve(&problem, &c, &SolveOptions::default()).unwrap();
    assert_eq!(rep.termination, Termination::MonotonicityViolation);
    // without the order check the iteration leaves it for the other point
    let opts = SolveOptions {
        monotone_check: false,
        ..Default::default()
    };
    let rep = solve(&problem, &c, &opts).unwrap();
    assert!(rep.converged());
    assert!(dist(rep.solution.as_slice(), &SOLUTION) <= 1e-9);
}
