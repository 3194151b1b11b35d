mod support;

use elcone::projection::{project, project_product, project_second_order, translate_project};
use elcone::{example, verify, ConeSpec, Point, Tolerance};
use proptest::prelude::*;
use support::{dist, dot, grid_projection, norm, simplicial_generators};

const TOL: Tolerance = Tolerance::DEFAULT;

fn cones() -> Vec<ConeSpec> {
    vec![
        ConeSpec::Orthant { dim: 3 },
        ConeSpec::SecondOrder { dim: 3 },
        verify::chain_cone(3),
        ConeSpec::Halfspaces {
            normals: vec![vec![1.0, 2.0, -1.0], vec![-1.0, 0.5, 0.0], vec![0.0, -1.0, -1.0], vec![0.3, 0.3, 0.3]],
        },
        ConeSpec::Generated {
            generators: vec![vec![1.0, 0.0, 0.0], vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0]],
        },
    ]
}

fn vec3() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-10.0..10.0f64, 3)
}

/// Directions that generate the polar of each cone in `cones()`, or members
/// of the cone itself: `v - P(v)` must have nonpositive inner product with
/// every member of the cone.
fn members(c: &ConeSpec, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = elcone::sampling::rng(seed);
    (0..64)
        .map(|_| {
            let w: Vec<f64> = (0..3).map(|_| rand::Rng::random_range(&mut rng, -5.0..5.0)).collect();
            project(c, &w, TOL).unwrap().point
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn idempotent(v in vec3()) {
        for c in cones() {
            let p = project(&c, &v, TOL).unwrap().point;
            let pp = project(&c, &p, TOL).unwrap().point;
            prop_assert!(dist(&p, &pp) <= 1e-9 * (1.0 + norm(&v)), "{c:?}");
            prop_assert!(c.contains(&p, TOL).unwrap(), "{c:?} {p:?}");
        }
    }

    #[test]
    fn nonexpansive(v in vec3(), w in vec3()) {
        for c in cones() {
            let pv = project(&c, &v, TOL).unwrap().point;
            let pw = project(&c, &w, TOL).unwrap().point;
            prop_assert!(dist(&pv, &pw) <= dist(&v, &w) + 1e-9);
        }
    }

    /// Moreau: `v = P(v) + (v - P(v))` with `v - P(v)` in the polar cone and
    /// orthogonal to `P(v)`.
    #[test]
    fn moreau_decomposition(v in vec3(), seed in any::<u64>()) {
        for c in cones() {
            let p = project(&c, &v, TOL).unwrap().point;
            let r: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
            prop_assert!(dot(&p, &r).abs() <= 1e-9 * (1.0 + norm(&v).powi(2)), "{c:?}");
            for m in members(&c, seed) {
                prop_assert!(dot(&r, &m) <= 1e-9 * (1.0 + norm(&v)) * (1.0 + norm(&m)), "{c:?}");
            }
        }
    }

    #[test]
    fn second_order_against_moreau(v in prop::collection::vec(-10.0..10.0f64, 2..6)) {
        let p = project_second_order(&v);
        let k = v.len() - 1;
        let r: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        // p in K, -r in K (self-dual), <p, r> = 0
        prop_assert!(norm(&p[..k]) <= p[k] + 1e-9);
        prop_assert!(norm(&r[..k]) <= -r[k] + 1e-9);
        prop_assert!(dot(&p, &r).abs() <= 1e-9 * (1.0 + dot(&v, &v)));
    }

    #[test]
    fn translation(y in vec3(), x in vec3()) {
        for c in cones() {
            let t = translate_project(&x, &c, &y, TOL).unwrap();
            let shifted: Vec<f64> = y.iter().zip(&x).map(|(a, b)| a - b).collect();
            let direct = project(&c, &shifted, TOL).unwrap().point;
            let rel: Vec<f64> = t.iter().zip(&x).map(|(a, b)| a - b).collect();
            prop_assert!(dist(&rel, &direct) <= 1e-12 * (1.0 + norm(&y) + norm(&x)));
            prop_assert!(c.contains(&rel, TOL).unwrap());
        }
    }

    #[test]
    fn product_keeps_x(x in prop::collection::vec(-1e6..1e6f64, 2), u in vec3()) {
        for c in cones() {
            let z = project_product(&x, &u, &c, TOL).unwrap();
            prop_assert_eq!(z.x(), &x[..]);
            prop_assert_eq!(z.u(), &project(&c, &u, TOL).unwrap().point[..]);
        }
    }

    /// `z1 <=_L z2` with `z2 - z1 = (t e + s, w)`, `||w|| <= t`, `s >= 0`.
    #[test]
    fn product_projection_is_isotone(
        z1 in prop::collection::vec(-5.0..5.0f64, 5),
        t in 0.0..5.0f64,
        s in prop::collection::vec(0.0..2.0f64, 2),
        dir in prop::collection::vec(-1.0..1.0f64, 3),
        frac in 0.0..=1.0f64,
    ) {
        let nd = norm(&dir).max(1e-12);
        let mut d: Vec<f64> = s.iter().map(|si| t + si).collect();
        d.extend(dir.iter().map(|v| v / nd * t * frac));
        let z2: Vec<f64> = z1.iter().zip(&d).map(|(a, b)| a + b).collect();
        for c in cones() {
            let p1 = project_product(&z1[..2], &z1[2..], &c, TOL).unwrap();
            let p2 = project_product(&z2[..2], &z2[2..], &c, TOL).unwrap();
            prop_assert!(elcone::leq(&p1, &p2, TOL).unwrap(), "{c:?}");
        }
    }
}

#[test]
fn builtin_cone_matches_grid_oracle() {
    let mut rng = elcone::sampling::rng(7);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let gens = vec![vec![0.0, 1.0], vec![h, h]];
    for _ in 0..50 {
        let v = elcone::sampling::normal_vec(&mut rng, 2);
        let p = project(&example::cone(), &v, TOL).unwrap().point;
        let oracle = grid_projection(&gens, &v);
        assert!(dist(&p, &oracle) <= 2e-3, "{v:?}: {p:?} vs {oracle:?}");
    }
}

#[test]
fn random_simplicial_cone_matches_grid_oracle() {
    let mut rng = elcone::sampling::rng(11);
    let normals: Vec<Vec<f64>> = (0..3).map(|_| elcone::sampling::unit_vector(&mut rng, 3)).collect();
    let gens = simplicial_generators(&normals);
    let cone = ConeSpec::Halfspaces { normals };
    for _ in 0..10 {
        let v = elcone::sampling::normal_vec(&mut rng, 3);
        let p = project(&cone, &v, TOL).unwrap().point;
        let oracle = grid_projection(&gens, &v);
        assert!(dist(&p, &oracle) <= 2e-3, "{v:?}: {p:?} vs {oracle:?}");
    }
}

#[test]
fn generated_and_halfspace_forms_agree() {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let generated = ConeSpec::Generated {
        generators: vec![vec![0.0, 1.0], vec![h, h]],
    };
    let mut rng = elcone::sampling::rng(3);
    for _ in 0..500 {
        let v = elcone::sampling::normal_vec(&mut rng, 2);
        let a = project(&example::cone(), &v, TOL).unwrap().point;
        let b = project(&generated, &v, TOL).unwrap().point;
        assert!(dist(&a, &b) <= 1e-12);
    }
}

#[test]
fn point_split_is_preserved() {
    let z = Point::new(vec![1.0, 2.0], vec![3.0, 4.0]).unwrap();
    let p = project_product(z.x(), z.u(), &example::cone(), TOL).unwrap();
    assert_eq!((p.p(), p.q()), (2, 2));
}
