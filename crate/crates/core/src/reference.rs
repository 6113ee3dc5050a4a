//! Slow baselines for testing the decoder: the textbook beam search with a
//! full candidate set and a word-list language model, and exhaustive path
//! enumeration for tiny inputs.

use std::collections::{HashMap, HashSet};

use crate::alphabet::Alphabet;
use crate::error::{DictError, OracleError};

/// Largest number of paths [`best_labelling_bruteforce`] will enumerate.
pub const MAX_PATHS: u128 = 10_000_000;
/// Longest input [`best_labelling_bruteforce`] accepts.
pub const MAX_BRUTE_T: usize = 8;

/// Relative gap below which two probabilities count as tied.
pub const TIE_EPS: f64 = 1e-12;

/// Dictionary language model that keeps the words themselves.
#[derive(Clone, Debug)]
pub struct WordListLm {
    words: HashSet<Vec<u16>>,
    prefixes: HashSet<Vec<u16>>,
    separator: u16,
}

impl WordListLm {
    /// `words` hold labels in `1..separator`.
    pub fn new(words: &[Vec<u16>], separator: u16) -> Self {
        let mut prefixes = HashSet::new();
        for w in words {
            for end in 1..=w.len() {
                prefixes.insert(w[..end].to_vec());
            }
        }
        Self {
            words: words.iter().cloned().collect(),
            prefixes,
            separator,
        }
    }

    pub fn from_words<S: AsRef<str>>(words: &[S], alphabet: &Alphabet) -> Result<Self, DictError> {
        let labelled = words
            .iter()
            .map(|w| {
                let w = w.as_ref();
                w.chars()
                    .map(|c| match alphabet.index_of(c) {
                        Some(i) if i != alphabet.separator_index() => Ok(i),
                        _ => Err(DictError::InvalidChar {
                            word: w.to_string(),
                            ch: c,
                        }),
                    })
                    .collect::<Result<Vec<u16>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::new(&labelled, alphabet.separator_index()))
    }

    /// Whether appending `label` to `sentence` stays inside the dictionary.
    pub fn allows(&self, sentence: &[u16], label: u16) -> bool {
        let start = sentence
            .iter()
            .rposition(|&l| l == self.separator)
            .map_or(0, |p| p + 1);
        let partial = &sentence[start..];
        if label == self.separator {
            return !partial.is_empty() && self.words.contains(partial);
        }
        let mut probe = partial.to_vec();
        probe.push(label);
        self.prefixes.contains(&probe)
    }
}

#[derive(Clone, Debug)]
struct Entry {
    sentence: Vec<u16>,
    plus: f64,
    minus: f64,
}

impl Entry {
    fn pr(&self) -> f64 {
        self.minus + self.plus
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReferenceOutput {
    pub sentence: Vec<u16>,
    pub probability: f64,
    /// Some pruning decision or the final choice compared two probabilities
    /// within [`TIE_EPS`]; the result then depends on tie-breaking.
    pub tie: bool,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= TIE_EPS * a.abs().max(b.abs())
}

fn check_frames<F: AsRef<[f64]>>(probs: &[F]) -> Result<usize, OracleError> {
    let first = probs.first().ok_or(OracleError::NoFrames)?.as_ref().len();
    if first < 2 || probs.iter().any(|f| f.as_ref().len() != first) {
        return Err(OracleError::Ragged);
    }
    Ok(first - 1)
}

/// Beam search keeping the `w` most probable sentences per frame, with the
/// full candidate set of every retained sentence extended by every label.
///
/// A sentence appears in the candidate set once. An extension `y + k` that
/// is itself retained is not added separately: its probability reaches the
/// carried-over copy of `y + k` through the prefix term. Candidates of
/// probability zero are dropped. The result is the best candidate after the
/// last frame.
pub fn decode_reference<F: AsRef<[f64]>>(
    probs: &[F],
    lm: Option<&WordListLm>,
    w: usize,
) -> Result<ReferenceOutput, OracleError> {
    let k = check_frames(probs)?;
    let mut tie = false;
    let mut b = vec![Entry {
        sentence: Vec::new(),
        plus: 0.0,
        minus: 1.0,
    }];
    let ext = |y: &Entry, label: u16, p: f64| -> f64 {
        if lm.is_some_and(|lm| !lm.allows(&y.sentence, label)) {
            return 0.0;
        }
        let base = if y.sentence.last() == Some(&label) {
            y.minus
        } else {
            y.pr()
        };
        p * base
    };

    for frame in probs {
        let frame = frame.as_ref();
        b.retain(|e| e.pr() > 0.0);
        b.sort_by(|x, y| y.pr().total_cmp(&x.pr()));
        if b.len() > w {
            tie |= near(b[w - 1].pr(), b[w].pr());
            b.truncate(w);
        }
        let b_hat = std::mem::take(&mut b);
        let index: HashMap<&[u16], usize> = b_hat
            .iter()
            .enumerate()
            .map(|(i, e)| (&e.sentence[..], i))
            .collect();
        let blank = frame[k];
        for y in &b_hat {
            let minus = y.pr() * blank;
            let mut plus = 0.0;
            if let Some(&last) = y.sentence.last() {
                plus = y.plus * frame[last as usize - 1];
                let prefix = &y.sentence[..y.sentence.len() - 1];
                if let Some(&j) = index.get(prefix) {
                    plus += ext(&b_hat[j], last, frame[last as usize - 1]);
                }
            }
            b.push(Entry {
                sentence: y.sentence.clone(),
                plus,
                minus,
            });
            for label in 1..=k as u16 {
                let mut sentence = y.sentence.clone();
                sentence.push(label);
                if index.contains_key(&sentence[..]) {
                    continue;
                }
                let e = ext(y, label, frame[label as usize - 1]);
                if e > 0.0 {
                    b.push(Entry {
                        sentence,
                        plus: e,
                        minus: 0.0,
                    });
                }
            }
        }
    }
    b.retain(|e| e.pr() > 0.0);
    b.sort_by(|x, y| y.pr().total_cmp(&x.pr()));
    if b.len() > 1 {
        tie |= near(b[0].pr(), b[1].pr());
    }
    let best = b.into_iter().next().unwrap_or(Entry {
        sentence: Vec::new(),
        plus: 0.0,
        minus: 0.0,
    });
    Ok(ReferenceOutput {
        probability: best.pr(),
        sentence: best.sentence,
        tie,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathScore {
    pub labelling: Vec<u16>,
    pub probability: f64,
}

/// Merges repeated labels, then drops blanks.
pub fn collapse(path: &[u16], blank: u16) -> Vec<u16> {
    let mut out = Vec::new();
    let mut prev = None;
    for &l in path {
        if Some(l) != prev && l != blank {
            out.push(l);
        }
        prev = Some(l);
    }
    out
}

/// Probability of every labelling reachable from `probs`, most probable
/// first (ties in ascending label order). Frames list labels `1..=K` then
/// the blank.
pub fn labelling_distribution<F: AsRef<[f64]>>(probs: &[F]) -> Result<Vec<PathScore>, OracleError> {
    let k = check_frames(probs)?;
    let t = probs.len();
    let paths = (k as u128 + 1).checked_pow(t as u32).unwrap_or(u128::MAX);
    if t > MAX_BRUTE_T || paths > MAX_PATHS {
        return Err(OracleError::InstanceTooLarge {
            paths,
            limit: MAX_PATHS,
        });
    }
    let blank = k as u16 + 1;
    let mut totals: HashMap<Vec<u16>, f64> = HashMap::new();
    let mut path = vec![1u16; t];
    loop {
        let p: f64 = path
            .iter()
            .zip(probs)
            .map(|(&l, f)| f.as_ref()[l as usize - 1])
            .product();
        *totals.entry(collapse(&path, blank)).or_insert(0.0) += p;
        // odometer over 1..=K+1
        let mut i = t;
        loop {
            if i == 0 {
                let mut scores: Vec<PathScore> = totals
                    .into_iter()
                    .map(|(labelling, probability)| PathScore {
                        labelling,
                        probability,
                    })
                    .collect();
                scores.sort_by(|a, b| {
                    b.probability
                        .total_cmp(&a.probability)
                        .then_with(|| a.labelling.cmp(&b.labelling))
                });
                return Ok(scores);
            }
            i -= 1;
            if path[i] < blank {
                path[i] += 1;
                break;
            }
            path[i] = 1;
        }
    }
}

/// The most probable labelling by exhaustive enumeration of paths.
pub fn best_labelling_bruteforce<F: AsRef<[f64]>>(probs: &[F]) -> Result<PathScore, OracleError> {
    Ok(labelling_distribution(probs)?.swap_remove(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collapse_examples() {
        // c=1, a=2, t=3, blank=4
        assert_eq!(collapse(&[1, 4, 4, 2, 4, 3], 4), vec![1, 2, 3]);
        assert_eq!(collapse(&[1, 1, 4, 2, 2, 2, 4, 4, 3, 3], 4), vec![1, 2, 3]);
        assert_eq!(collapse(&[2, 4, 2], 4), vec![2, 2]);
        assert!(collapse(&[4, 4], 4).is_empty());
    }

    #[test]
    fn two_frames_one_label() {
        let d = labelling_distribution(&[[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let get = |l: &[u16]| {
            d.iter()
                .find(|s| s.labelling == l)
                .map_or(0.0, |s| s.probability)
        };
        assert_eq!(get(&[]), 0.25);
        assert_eq!(get(&[1]), 0.75);
        assert_eq!(get(&[1, 1]), 0.0);
    }

    #[test]
    fn single_frame_is_the_frame() {
        let d = labelling_distribution(&[[0.2, 0.5, 0.3]]).unwrap();
        assert_eq!(d[0], PathScore { labelling: vec![2], probability: 0.5 });
        assert_eq!(d[1], PathScore { labelling: vec![], probability: 0.3 });
        assert_eq!(d[2], PathScore { labelling: vec![1], probability: 0.2 });
    }

    #[test]
    fn distribution_sums_to_one() {
        let frames = [[0.1, 0.2, 0.7], [0.3, 0.3, 0.4], [0.6, 0.1, 0.3], [0.2, 0.5, 0.3]];
        let total: f64 = labelling_distribution(&frames)
            .unwrap()
            .iter()
            .map(|s| s.probability)
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn too_large_is_rejected() {
        let frames = vec![[0.25; 4]; 9];
        assert!(matches!(
            best_labelling_bruteforce(&frames),
            Err(OracleError::InstanceTooLarge { .. })
        ));
        let frames = vec![vec![0.01; 100]; 4];
        assert!(best_labelling_bruteforce(&frames).is_err());
        let empty: Vec<[f64; 2]> = vec![];
        assert_eq!(best_labelling_bruteforce(&empty), Err(OracleError::NoFrames));
    }

    #[test]
    fn reference_single_frame() {
        let out = decode_reference(&[[0.6, 0.3, 0.1]], None, 2).unwrap();
        assert_eq!(out.sentence, vec![1]);
        let out = decode_reference(&[[0.2, 0.1, 0.7]], None, 2).unwrap();
        assert!(out.sentence.is_empty());
        assert!((out.probability - 0.7).abs() < 1e-15);
    }

    #[test]
    fn wide_reference_matches_enumeration() {
        let frames = [
            [0.3, 0.25, 0.45],
            [0.5, 0.1, 0.4],
            [0.2, 0.35, 0.45],
            [0.4, 0.35, 0.25],
        ];
        let best = best_labelling_bruteforce(&frames).unwrap();
        let out = decode_reference(&frames, None, 64).unwrap();
        assert_eq!(out.sentence, best.labelling);
        assert!((out.probability - best.probability).abs() < 1e-12);
    }

    #[test]
    fn word_list_lm() {
        let a = Alphabet::english();
        let lm = WordListLm::from_words(&["an", "ant"], &a).unwrap();
        let sep = a.separator_index();
        let n = [1, 14];
        assert!(lm.allows(&n, 20));
        assert!(lm.allows(&n, sep));
        assert!(!lm.allows(&n, 1));
        assert!(!lm.allows(&[], sep));
        assert!(lm.allows(&[1, 14, sep], 1));
        assert!(WordListLm::from_words(&["a_b"], &a).is_err());
    }
}
