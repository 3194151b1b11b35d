//! Seeded random points, `L`-members and `L`-ordered pairs.
//!
//! All sampling is driven by a [`ChaCha8Rng`] built from an explicit seed, so
//! every suite is reproducible from the seed it reports.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::cone::{generators_q1, Point};
use crate::linalg::norm;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for shard `index` derived from a root seed.
pub fn shard_seed(root: u64, index: u64) -> u64 {
    // splitmix64 step
    let mut z = root.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(index + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn normal_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let v = normal_vec(rng, n);
        let nv = norm(&v);
        if nv > 1e-12 {
            return v.into_iter().map(|t| t / nv).collect();
        }
    }
}

pub fn normal_point<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> Point {
    Point::from_flat(p, q, normal_vec(rng, p + q)).expect("p, q >= 1")
}

fn exp1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

/// A random member of `L`.
///
/// For `q = 1` this is a random nonnegative combination of the generators,
/// with each coefficient zeroed half of the time so that faces are hit. For
/// `q > 1` it is `(t e + s, w)` with `t` exponential, `||w|| <= t` (on the
/// boundary half of the time) and a sparse nonnegative `s`.
pub fn l_member<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> Point {
    if q == 1 {
        let gens = generators_q1(p).expect("p >= 1").cone;
        loop {
            let mut acc = vec![0.0; p + 1];
            for g in &gens {
                if rng.random_bool(0.5) {
                    let c = exp1(rng);
                    for (a, gi) in acc.iter_mut().zip(g.as_slice()) {
                        *a += c * gi;
                    }
                }
            }
            if acc.iter().any(|&a| a != 0.0) {
                return Point::from_flat(p, 1, acc).expect("p >= 1");
            }
        }
    }
    let t = exp1(rng);
    let radius = if rng.random_bool(0.5) { t } else { t * rng.random::<f64>() };
    let dir = unit_vector(rng, q);
    let mut data: Vec<f64> = (0..p)
        .map(|_| if rng.random_bool(0.5) { t } else { t + exp1(rng) })
        .collect();
    data.extend(dir.iter().map(|d| d * radius));
    Point::from_flat(p, q, data).expect("p, q >= 1")
}

/// A pair `z1 <=_L z2`: `z1` standard normal, `z2 = z1 + l_member`.
pub fn ordered_pair<R: Rng + ?Sized>(rng: &mut R, p: usize, q: usize) -> (Point, Point) {
    let z1 = normal_point(rng, p, q);
    let d = l_member(rng, p, q);
    let z2 = z1
        .with_data(crate::linalg::add(z1.as_slice(), d.as_slice()))
        .expect("same split");
    (z1, z2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::{contains_l, Tolerance};

    #[test]
    fn members_are_in_l() {
        let mut r = rng(7);
        for (p, q) in [(1, 1), (2, 1), (3, 1), (2, 2), (1, 3), (4, 2)] {
            for _ in 0..500 {
                assert!(contains_l(&l_member(&mut r, p, q), Tolerance::new(1e-12).unwrap()));
            }
        }
    }

    #[test]
    fn seeded_streams_repeat() {
        let a = normal_vec(&mut rng(3), 5);
        let b = normal_vec(&mut rng(3), 5);
        assert_eq!(a, b);
        assert_ne!(shard_seed(42, 0), shard_seed(42, 1));
    }
}
