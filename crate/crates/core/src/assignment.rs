//! Max-score assignment between two equal-size label sets.
//!
//! Small problems (the usual 2-3 speakers) are solved by lexicographic
//! brute force, which also fixes the tie-break contract; larger ones use
//! the Hungarian algorithm with potentials.

use ndarray::Array2;

use crate::error::{Error, Result};

const BRUTE_FORCE_LIMIT: usize = 3;

/// Permutation `perm` maximizing `sum_i score[(i, perm[i])]`.
///
/// Ties resolve to the lexicographically smallest permutation for sizes
/// up to the brute-force limit.
pub fn best_permutation(score: &Array2<f64>) -> Result<Vec<usize>> {
    let n = score.nrows();
    if score.ncols() != n {
        return Err(Error::ShapeMismatch(format!(
            "score matrix must be square, got {}x{}",
            n,
            score.ncols()
        )));
    }
    if score.iter().any(|v| v.is_nan()) {
        return Err(Error::NonFinite("assignment score matrix".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    if n <= BRUTE_FORCE_LIMIT {
        Ok(brute_force(score))
    } else {
        Ok(hungarian_max(score))
    }
}

fn brute_force(score: &Array2<f64>) -> Vec<usize> {
    let n = score.nrows();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = perm.clone();
    let mut best_score = total(score, &perm);
    while next_permutation(&mut perm) {
        let s = total(score, &perm);
        if s > best_score {
            best_score = s;
            best = perm.clone();
        }
    }
    best
}

fn total(score: &Array2<f64>, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| score[(i, j)]).sum()
}

/// Advance to the next permutation in lexicographic order.
fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

/// Hungarian algorithm (shortest augmenting paths with potentials) on the
/// negated score matrix.
fn hungarian_max(score: &Array2<f64>) -> Vec<usize> {
    let n = score.nrows();
    let cost = |i: usize, j: usize| -score[(i, j)];
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut assigned_row = vec![0usize; n + 1]; // column -> row (1-based)
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        assigned_row[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = assigned_row[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[assigned_row[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if assigned_row[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            assigned_row[j0] = assigned_row[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        if assigned_row[j] > 0 {
            perm[assigned_row[j] - 1] = j - 1;
        }
    }
    perm
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::Rng;

    fn exhaustive(score: &Array2<f64>) -> Vec<usize> {
        let n = score.nrows();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = perm.clone();
        let mut best_score = total(score, &perm);
        while next_permutation(&mut perm) {
            let s = total(score, &perm);
            if s > best_score {
                best_score = s;
                best = perm.clone();
            }
        }
        best
    }

    #[test]
    fn identity_when_diagonal_dominates() {
        let s = array![[10.0, 0.0], [0.0, 10.0]];
        assert_eq!(best_permutation(&s).unwrap(), vec![0, 1]);
    }

    #[test]
    fn swap_when_antidiagonal_dominates() {
        let s = array![[0.0, 10.0], [10.0, 0.0]];
        assert_eq!(best_permutation(&s).unwrap(), vec![1, 0]);
    }

    #[test]
    fn ties_break_lexicographically() {
        let s = Array2::from_elem((3, 3), 1.0);
        assert_eq!(best_permutation(&s).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn nan_rejected() {
        let s = array![[f64::NAN, 0.0], [0.0, 1.0]];
        assert!(best_permutation(&s).is_err());
    }

    #[test]
    fn hungarian_matches_exhaustive() {
        let mut rng = crate::seed::rng_from_seed(99);
        for n in [4usize, 5, 6] {
            for _ in 0..200 {
                let s = Array2::from_shape_fn((n, n), |_| rng.random_range(-5.0..5.0));
                let fast = best_permutation(&s).unwrap();
                let slow = exhaustive(&s);
                assert_eq!(
                    total(&s, &fast),
                    total(&s, &slow),
                    "scores differ on {s:?}"
                );
                assert_eq!(fast, slow);
            }
        }
    }
}
