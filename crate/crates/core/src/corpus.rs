//! Seeded random integral PA convex functions for tests and the `verify` driver.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::affine::AffineFunctional;
use crate::measure::ma_measure;
use crate::pa::PAConvexFunction;
use crate::polytope::Polytope;
use crate::rational::int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusEntry {
    pub name: String,
    pub h: PAConvexFunction,
}

/// Canonical PA function with integer slopes in `[-2, 2]^n`, intercepts in `[-1, 1]`,
/// on the box `[-2, 2]^n`, having at least one interior vertex.
pub fn random_pa(rng: &mut impl Rng, n: usize) -> PAConvexFunction {
    let domain = Polytope::cube(n, &int(-2), &int(2));
    loop {
        let k = rng.gen_range(n + 1..=n + 4);
        let pieces: Vec<AffineFunctional> = (0..k)
            .map(|_| {
                AffineFunctional::new((0..n).map(|_| int(rng.gen_range(-2..=2))).collect(), int(rng.gen_range(-1..=1)))
            })
            .collect();
        let h = PAConvexFunction::new(pieces, domain.clone()).expect("well formed").canonicalize().expect("canonical form");
        if !ma_measure(&h).expect("measure").is_empty() {
            return h;
        }
    }
}

/// `per_dim` functions in each of dimensions 1, 2, 3.
pub fn generate(seed: u64, per_dim: usize) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(3 * per_dim);
    for n in 1..=3 {
        for i in 0..per_dim {
            out.push(CorpusEntry { name: format!("n{n}_{i:02}"), h: random_pa(&mut rng, n) });
        }
    }
    out
}

/// The corpus used by the test-suite and shipped under `corpus/`.
pub fn default_corpus() -> Vec<CorpusEntry> {
    generate(20240601, 8)
}

/// Random integer affine functional with entries in `[-3, 3]`.
pub fn random_affine(rng: &mut impl Rng, n: usize) -> AffineFunctional {
    AffineFunctional::new((0..n).map(|_| int(rng.gen_range(-3..=3))).collect(), int(rng.gen_range(-3..=3)))
}

/// Random permutation of `0..k`.
pub fn random_permutation(rng: &mut impl Rng, k: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..k).collect();
    v.shuffle(rng);
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_nontrivial() {
        let a = generate(7, 2);
        let b = generate(7, 2);
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        for e in &a {
            assert!(!ma_measure(&e.h).unwrap().is_empty(), "{}", e.name);
            assert_eq!(e.h, e.h.canonicalize().unwrap());
        }
    }
}
