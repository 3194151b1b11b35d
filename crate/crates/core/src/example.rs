//! The built-in test problem on `R^2 x R^2`.
//!
//! `C = {u : u_2 >= u_1 >= 0}` and `(x - G, u - H) = f_1 w^1 + f_2 w^2` with
//! `f_1 = (x_1 + ||u|| + 12) / 12`, `f_2 = (x_2 + ||u|| - 7.2) / 12`,
//! `w^1 = (1, 1, 1/6, 1/3)`, `w^2 = (1, 1, 1/3, 1/6)`.
//! Started from the origin, the Picard iteration converges to
//! `(8/15, 8/15, 0, 4/15)` with error ratio `5/24` per step.

use std::sync::Arc;

use crate::cone::{ConeSpec, Tolerance};
use crate::exact::{rat, ExactProblem, ExactTerm};
use crate::isotone::{build_combination, CombinationTerm, IsotoneCombination, MonotoneScalarFn};
use crate::map::IdentityMinus;
use crate::solver::Problem;

pub const BUILTIN_ID: &str = "paper-example-7";

pub const SOLUTION: [f64; 4] = [8.0 / 15.0, 8.0 / 15.0, 0.0, 4.0 / 15.0];

/// Error ratio of consecutive iterates.
pub const CONTRACTION: f64 = 5.0 / 24.0;

/// A point of `Omega`, hence an upper bound for every iterate.
pub const OMEGA_POINT: [f64; 4] = [31.0, 31.0, 3.0, 4.0];

/// `{u_2 >= u_1 >= 0}` as `{u_1 - u_2 <= 0, -u_1 <= 0}`.
pub fn cone() -> ConeSpec {
    ConeSpec::Halfspaces {
        normals: vec![vec![1.0, -1.0], vec![-1.0, 0.0]],
    }
}

pub fn combination() -> IsotoneCombination {
    let twelfth = 1.0 / 12.0;
    IsotoneCombination {
        p: 2,
        q: 2,
        terms: vec![
            CombinationTerm {
                f: MonotoneScalarFn::LorentzAffine {
                    d: vec![twelfth, 0.0],
                    beta: twelfth,
                    gamma: 1.0,
                },
                weight: vec![1.0, 1.0, 1.0 / 6.0, 1.0 / 3.0],
            },
            CombinationTerm {
                f: MonotoneScalarFn::LorentzAffine {
                    d: vec![0.0, twelfth],
                    beta: twelfth,
                    gamma: -0.6,
                },
                weight: vec![1.0, 1.0, 1.0 / 3.0, 1.0 / 6.0],
            },
        ],
    }
}

pub fn problem() -> Problem {
    let t = build_combination(&combination(), Tolerance::DEFAULT).expect("built-in combination is valid");
    Problem::new(BUILTIN_ID, 2, 2, cone(), Arc::new(IdentityMinus(t))).expect("built-in problem is valid")
}

/// Looks up a built-in problem by id.
pub fn builtin(id: &str) -> Option<Problem> {
    (id == BUILTIN_ID).then(problem)
}

/// The same problem with exact rational coefficients.
pub fn exact_problem() -> ExactProblem {
    let z = || rat(0, 1);
    let twelfth = || rat(1, 12);
    let terms = vec![
        ExactTerm {
            d: vec![twelfth(), z()],
            beta: twelfth(),
            gamma: rat(1, 1),
            weight: vec![rat(1, 1), rat(1, 1), rat(1, 6), rat(1, 3)],
        },
        ExactTerm {
            d: vec![z(), twelfth()],
            beta: twelfth(),
            gamma: rat(-3, 5),
            weight: vec![rat(1, 1), rat(1, 1), rat(1, 3), rat(1, 6)],
        },
    ];
    let normals = vec![vec![rat(1, 1), rat(-1, 1)], vec![rat(-1, 1), z()]];
    ExactProblem::new(2, 2, terms, normals).expect("built-in exact problem is valid")
}

/// The boundary candidate with `u_1 = u_2 > 0`:
/// `u_i = (120 + 6 sqrt 2) / 995`, `x_i = (480 + 24 sqrt 2) / 995`.
pub fn ray_candidate() -> [f64; 4] {
    let s = 2f64.sqrt();
    let x = (480.0 + 24.0 * s) / 995.0;
    let u = (120.0 + 6.0 * s) / 995.0;
    [x, x, u, u]
}
