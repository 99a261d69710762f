//! Shared inputs for the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use powalt_core::alternative::random_word;
use powalt_core::{ElementWord, GroupDescription};

/// `count` reproducible random words of length at most `max_len` over the generators of `g`.
pub fn sample_words(g: &GroupDescription, count: usize, max_len: usize, seed: u64) -> Vec<ElementWord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gens: Vec<ElementWord> = (0..g.rank()).map(ElementWord::gen).collect();
    (0..count).map(|_| random_word(&mut rng, &gens, max_len)).collect()
}
