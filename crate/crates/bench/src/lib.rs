//! Shared fixtures for the benches.

use padist::groups::{random_group_element, GroupElement};
use padist::poly::IntPoly;
use padist::PrimeContext;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn ctx(p: u64) -> PrimeContext {
    PrimeContext::new(p).expect("prime")
}

pub fn group_pairs(
    p: u64,
    dim: usize,
    count: usize,
    precision: i64,
) -> Vec<(GroupElement, GroupElement)> {
    let c = ctx(p);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    (0..count)
        .map(|_| {
            (
                random_group_element(c, dim, precision, &mut rng),
                random_group_element(c, dim, precision, &mut rng),
            )
        })
        .collect()
}

pub fn polys(count: usize, degree: usize) -> Vec<IntPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..count)
        .map(|_| IntPoly::random(&mut rng, degree, 10_000))
        .collect()
}
