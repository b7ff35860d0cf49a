//! Cyclic-word utilities: primitivity and canonical conjugacy representatives.

/// True iff `word` is not a proper power `u^k` (k ≥ 2) of a shorter word.
/// The empty word is not primitive.
pub fn is_primitive<T: Eq>(word: &[T]) -> bool {
    let n = word.len();
    if n == 0 {
        return false;
    }
    (1..n)
        .filter(|p| n % p == 0)
        .all(|p| (p..n).any(|i| word[i] != word[i - p]))
}

/// Lexicographically least cyclic rotation.
pub fn least_rotation<T: Ord + Clone>(word: &[T]) -> Vec<T> {
    let n = word.len();
    let best = (0..n)
        .min_by(|&i, &j| {
            let ri = word[i..].iter().chain(&word[..i]);
            let rj = word[j..].iter().chain(&word[..j]);
            ri.cmp(rj)
        })
        .unwrap_or(0);
    word[best..].iter().chain(&word[..best]).cloned().collect()
}

/// Formal inverse of a word: reversed, each letter replaced by its inverse.
pub fn inverse_word<T: Clone>(word: &[T], invert: impl Fn(&T) -> T) -> Vec<T> {
    word.iter().rev().map(invert).collect()
}

/// Least rotation among the rotations of `word` and of its inverse.
///
/// Two cyclically reduced words related by rotation or inversion map to the
/// same representative.
pub fn canonical_rotation<T: Ord + Clone>(word: &[T], invert: impl Fn(&T) -> T) -> Vec<T> {
    let fwd = least_rotation(word);
    let bwd = least_rotation(&inverse_word(word, invert));
    fwd.min(bwd)
}
