#![allow(dead_code)]

use std::collections::BTreeSet;

use ctcfx::softmax_exact;
use ctcfx::Alphabet;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `a b c d _`.
pub fn small_alphabet() -> Alphabet {
    Alphabet::new(vec!['a', 'b', 'c', 'd', '_']).unwrap()
}

/// Frames of random logits in `(-spread, spread)` pushed through exact softmax.
pub fn random_probs(rng: &mut ChaCha8Rng, t: usize, k: usize, spread: f64) -> Vec<Vec<f64>> {
    (0..t)
        .map(|_| {
            let logits: Vec<f64> = (0..=k).map(|_| rng.random_range(-spread..spread)).collect();
            softmax_exact(&logits)
        })
        .collect()
}

/// Up to `max_words` distinct words of length `1..=max_len` drawn from the
/// first `letters` non-separator labels of `alphabet`.
pub fn random_words(
    rng: &mut ChaCha8Rng,
    alphabet: &Alphabet,
    max_words: usize,
    max_len: usize,
    letters: usize,
) -> Vec<String> {
    let pool = &alphabet.labels()[..letters.min(alphabet.k() - 1)];
    let n = rng.random_range(1..=max_words);
    let mut set = BTreeSet::new();
    for _ in 0..n {
        let len = rng.random_range(1..=max_len);
        let w: String = (0..len).map(|_| pool[rng.random_range(0..pool.len())]).collect();
        set.insert(w);
    }
    set.into_iter().collect()
}

/// `1 +` the number of distinct non-empty prefixes of `words`.
pub fn prefix_node_count<S: AsRef<str>>(words: &[S]) -> u64 {
    let mut prefixes = BTreeSet::new();
    for w in words {
        let chars: Vec<char> = w.as_ref().chars().collect();
        for end in 1..=chars.len() {
            prefixes.insert(chars[..end].to_vec());
        }
    }
    1 + prefixes.len() as u64
}
