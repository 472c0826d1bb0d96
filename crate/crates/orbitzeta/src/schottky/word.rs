//! Reduced words over a free group's generators, conjugacy canonical forms,
//! and primitive roots.
//!
//! Letters are nonzero integers: +i is the i-th generator (1-based), −i its
//! inverse. The textual form writes generator i as the lowercase letter
//! `('a' + i − 1)` and its inverse as the corresponding uppercase letter.
//! The total order used everywhere is a < a⁻¹ < b < b⁻¹ < …

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("word is empty")]
    EmptyWord,
    #[error("invalid letter character {0:?}")]
    BadLetter(char),
}

/// Sort key realizing a < a⁻¹ < b < b⁻¹ < …
fn ord_key(letter: i32) -> u32 {
    debug_assert!(letter != 0);
    let idx = (letter.unsigned_abs() - 1) * 2;
    idx + if letter < 0 { 1 } else { 0 }
}

/// Compare letter sequences in the a < a⁻¹ < b < b⁻¹ order.
pub fn compare_letters(lhs: &[i32], rhs: &[i32]) -> std::cmp::Ordering {
    let a = lhs.iter().map(|&l| ord_key(l));
    let b = rhs.iter().map(|&l| ord_key(l));
    a.cmp(b)
}

/// A freely reduced word (no adjacent letter/inverse pair).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<i32>,
}

impl Word {
    /// Freely reduce a letter sequence (cancel adjacent x x⁻¹ pairs) and wrap
    /// the result; the empty word is allowed here and rejected by the
    /// operations that need content.
    pub fn reduce(letters: &[i32]) -> Word {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for &l in letters {
            debug_assert!(l != 0);
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word { letters: out }
    }

    /// Wrap letters that are already reduced (debug-asserted).
    pub fn from_reduced(letters: Vec<i32>) -> Word {
        debug_assert!(letters.windows(2).all(|w| w[0] != -w[1]));
        Word { letters }
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word { letters: self.letters.iter().rev().map(|&l| -l).collect() }
    }

    pub fn is_cyclically_reduced(&self) -> bool {
        match (self.letters.first(), self.letters.last()) {
            (Some(&f), Some(&l)) => f != -l || self.letters.len() == 1,
            _ => true,
        }
    }

    /// Strip matching first/last inverse pairs until cyclically reduced.
    pub fn cyclic_reduction(&self) -> Word {
        let mut lo = 0;
        let mut hi = self.letters.len();
        while hi - lo >= 2 && self.letters[lo] == -self.letters[hi - 1] {
            lo += 1;
            hi -= 1;
        }
        Word { letters: self.letters[lo..hi].to_vec() }
    }

    fn rotation(&self, by: usize) -> Vec<i32> {
        let n = self.letters.len();
        let mut v = Vec::with_capacity(n);
        v.extend_from_slice(&self.letters[by..]);
        v.extend_from_slice(&self.letters[..by]);
        v
    }

    /// Conjugacy-class representative: cyclically reduce, then take the
    /// lexicographically least cyclic rotation under a < a⁻¹ < b < b⁻¹.
    pub fn canonical_form(&self) -> Result<Word, WordError> {
        let core = self.cyclic_reduction();
        if core.is_empty() {
            return Err(WordError::EmptyWord);
        }
        let mut best = core.rotation(0);
        for by in 1..core.len() {
            let cand = core.rotation(by);
            if compare_letters(&cand, &best) == std::cmp::Ordering::Less {
                best = cand;
            }
        }
        Ok(Word { letters: best })
    }

    /// Whether this word is its own canonical form (cyclically reduced and
    /// minimal among its rotations). Cheaper than building the form.
    pub fn is_canonical(&self) -> bool {
        if self.letters.is_empty() || !self.is_cyclically_reduced() {
            return false;
        }
        (1..self.letters.len())
            .all(|by| compare_letters(&self.rotation(by), &self.letters) != std::cmp::Ordering::Less)
    }

    /// Decompose a cyclically reduced word as root^k with k maximal.
    ///
    /// The minimal cyclic-shift symmetry p of the word necessarily divides
    /// its length, so the scan doubles as the classical "w occurs inside w·w"
    /// periodicity test.
    pub fn primitive_root(&self) -> Result<(Word, u32), WordError> {
        let n = self.letters.len();
        if n == 0 {
            return Err(WordError::EmptyWord);
        }
        debug_assert!(self.is_cyclically_reduced());
        for p in 1..n {
            if n % p == 0 && self.rotation(p) == self.letters {
                return Ok((Word { letters: self.letters[..p].to_vec() }, (n / p) as u32));
            }
        }
        Ok((self.clone(), 1))
    }
}

pub fn letter_to_char(letter: i32) -> char {
    let idx = letter.unsigned_abs() - 1;
    debug_assert!(idx < 26);
    if letter > 0 {
        (b'a' + idx as u8) as char
    } else {
        (b'A' + idx as u8) as char
    }
}

pub fn char_to_letter(c: char) -> Result<i32, WordError> {
    match c {
        'a'..='z' => Ok((c as u8 - b'a') as i32 + 1),
        'A'..='Z' => Ok(-((c as u8 - b'A') as i32 + 1)),
        _ => Err(WordError::BadLetter(c)),
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            write!(f, "{}", letter_to_char(l))?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = WordError;

    /// Parses a compact word string like "abA"; the result is freely reduced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut letters = Vec::with_capacity(s.len());
        for c in s.chars() {
            letters.push(char_to_letter(c)?);
        }
        Ok(Word::reduce(&letters))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn free_reduction_cancels_adjacent_pairs() {
        assert_eq!(Word::reduce(&[1, 2, -2, -1, 3]).to_string(), "c");
        assert!(Word::reduce(&[1, -1]).is_empty());
    }

    #[test]
    fn cyclic_reduction_strips_conjugating_pairs() {
        assert_eq!(w("abA").canonical_form().unwrap().to_string(), "b");
        assert_eq!(w("aabAA").cyclic_reduction().to_string(), "b");
        assert_eq!(w("aabA").cyclic_reduction().to_string(), "ab");
    }

    #[test]
    fn canonical_form_picks_least_rotation() {
        // Letter order a < A < b < B.
        assert_eq!(w("ba").canonical_form().unwrap().to_string(), "ab");
        assert_eq!(w("bA").canonical_form().unwrap().to_string(), "Ab");
        assert_eq!(w("BaB").canonical_form().unwrap().to_string(), "aBB");
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let c = w("bbaB").canonical_form().unwrap();
        assert_eq!(c.canonical_form().unwrap(), c);
        assert!(c.is_canonical());
        assert!(!w("ba").is_canonical());
    }

    #[test]
    fn empty_words_are_rejected() {
        assert_eq!(w("aA").canonical_form(), Err(WordError::EmptyWord));
    }

    #[test]
    fn inverse_reverses_and_negates() {
        assert_eq!(w("abA").inverse().to_string(), "aBA");
        let v = w("aBab");
        assert!(Word::reduce(
            &[v.letters(), v.inverse().letters()].concat()
        )
        .is_empty());
    }

    #[test]
    fn primitive_root_examples() {
        let (root, k) = w("abab").primitive_root().unwrap();
        assert_eq!((root.to_string().as_str(), k), ("ab", 2));
        let (root, k) = w("ab").primitive_root().unwrap();
        assert_eq!((root.to_string().as_str(), k), ("ab", 1));
        let (root, k) = w("aaa").primitive_root().unwrap();
        assert_eq!((root.to_string().as_str(), k), ("a", 3));
    }

    /// Enumerate all reduced words of the given length over rank 2.
    fn all_reduced(len: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut stack: Vec<Vec<i32>> = vec![vec![]];
        while let Some(cur) = stack.pop() {
            if cur.len() == len {
                out.push(Word::from_reduced(cur));
                continue;
            }
            for l in [1, -1, 2, -2] {
                if cur.last() != Some(&-l) {
                    let mut next = cur.clone();
                    next.push(l);
                    stack.push(next);
                }
            }
        }
        out
    }

    #[test]
    fn primitive_root_matches_divisor_oracle_up_to_length_8() {
        // Independent oracle: try every proper divisor d of |w| and test
        // whether the first d letters repeated n/d times rebuild w.
        fn oracle(word: &Word) -> (Vec<i32>, u32) {
            let n = word.len();
            for d in 1..n {
                if n % d != 0 {
                    continue;
                }
                let block = &word.letters()[..d];
                let rebuilt: Vec<i32> =
                    block.iter().cycle().take(n).copied().collect();
                if rebuilt == word.letters() {
                    return (block.to_vec(), (n / d) as u32);
                }
            }
            (word.letters().to_vec(), 1)
        }

        let mut checked = 0usize;
        for len in 1..=8 {
            for word in all_reduced(len) {
                if !word.is_cyclically_reduced() {
                    continue;
                }
                let (root, k) = word.primitive_root().unwrap();
                let (oroot, ok) = oracle(&word);
                assert_eq!((root.letters().to_vec(), k), (oroot, ok), "word {word}");
                checked += 1;
            }
        }
        assert!(checked > 5000);
    }

    proptest! {
        #[test]
        fn canonical_form_is_conjugacy_invariant(
            raw in proptest::collection::vec(-3i32..=3, 1..12),
            conj in proptest::collection::vec(-3i32..=3, 0..5),
        ) {
            let letters: Vec<i32> = raw.into_iter().filter(|&l| l != 0).collect();
            let u: Vec<i32> = conj.into_iter().filter(|&l| l != 0).collect();
            let word = Word::reduce(&letters);
            prop_assume!(!word.cyclic_reduction().is_empty());

            let mut conjugated = u.clone();
            conjugated.extend_from_slice(word.letters());
            conjugated.extend(u.iter().rev().map(|&l| -l));
            let conj_word = Word::reduce(&conjugated);

            prop_assert_eq!(
                word.canonical_form().unwrap(),
                conj_word.canonical_form().unwrap()
            );
        }

        #[test]
        fn primitive_root_commutes_with_squaring(
            raw in proptest::collection::vec(-2i32..=2, 1..10),
        ) {
            // Canonicalization commutes with taking powers: (w²)'s canonical
            // primitive root equals w's canonical form.
            let letters: Vec<i32> = raw.into_iter().filter(|&l| l != 0).collect();
            let word = Word::reduce(&letters);
            prop_assume!(!word.cyclic_reduction().is_empty());
            let canon = word.canonical_form().unwrap();
            let doubled = Word::reduce(&[canon.letters(), canon.letters()].concat());
            let (root, k) = doubled.primitive_root().unwrap();
            let (base_root, base_k) = canon.primitive_root().unwrap();
            prop_assert_eq!(root.canonical_form().unwrap(), base_root.canonical_form().unwrap());
            prop_assert_eq!(k, 2 * base_k);
        }
    }
}
