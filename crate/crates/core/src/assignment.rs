//! Maximum-weight perfect matching on a dense square matrix.
//!
//! Shortest augmenting paths with row/column potentials (the O(n³)
//! Hungarian scheme), run on costs `−w`.

use crate::matrix::Matrix;
use crate::numeric::for_each_permutation;

/// Optimal assignment: `perm[i]` is the column matched to row `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub perm: Vec<usize>,
    pub value: f64,
}

/// Value of `perm` on `w`, summed over rows in order.
#[must_use]
pub fn assignment_value(w: &Matrix, perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| w.get(i, j)).sum()
}

/// Maximizes `Σ_i w[i][perm[i]]`. Entries must be finite.
///
/// # Panics
/// If `w` is not square.
#[must_use]
pub fn max_weight_assignment(w: &Matrix) -> Assignment {
    let n = w.rows();
    assert_eq!(n, w.cols(), "assignment needs a square matrix");
    if n == 0 {
        return Assignment {
            perm: Vec::new(),
            value: 0.0,
        };
    }
    // 1-based arrays; index 0 is the virtual source column.
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    let mut col_owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    let mut minv = vec![0.0f64; n + 1];
    let mut used = vec![false; n + 1];

    for i in 1..=n {
        col_owner[0] = i;
        let mut j0 = 0usize;
        minv.fill(f64::INFINITY);
        used.fill(false);
        loop {
            used[j0] = true;
            let i0 = col_owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = -w.get(i0 - 1, j - 1) - u[i0] - v[j];
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
                    u[col_owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if col_owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            col_owner[j0] = col_owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0usize; n];
    for j in 1..=n {
        perm[col_owner[j] - 1] = j - 1;
    }
    let value = assignment_value(w, &perm);
    Assignment { perm, value }
}

/// Best assignment by enumerating all `n!` permutations. The first
/// maximizer in Heap order is returned.
#[must_use]
pub fn brute_force_assignment(w: &Matrix) -> Assignment {
    let n = w.rows();
    let mut best = Assignment {
        perm: (0..n).collect(),
        value: f64::NEG_INFINITY,
    };
    for_each_permutation(n, |p| {
        let v = assignment_value(w, p);
        if v > best.value {
            best.value = v;
            best.perm.copy_from_slice(p);
        }
    });
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn two_by_two_example() {
        let w = Matrix::from_rows(&[vec![2.0, 5.0], vec![4.0, 1.0]]).unwrap();
        let a = max_weight_assignment(&w);
        assert_eq!(a.perm, vec![1, 0]);
        assert_eq!(a.value, 9.0);
    }

    #[test]
    fn matches_brute_force_on_random_matrices() {
        let mut rng = crate::rng::substream(99, crate::rng::Purpose::NullData, 0);
        for trial in 0..300 {
            let n = 1 + trial % 7;
            let data: Vec<f64> = (0..n * n)
                .map(|_| rng.random::<f64>() * 10.0 - 5.0)
                .collect();
            let w = Matrix::from_row_major(n, n, data).unwrap();
            let fast = max_weight_assignment(&w);
            let slow = brute_force_assignment(&w);
            assert_eq!(fast.value, slow.value, "n={n}");
            assert_eq!(fast.perm, slow.perm);
        }
    }

    #[test]
    fn integer_ties_give_exact_optimum() {
        let mut rng = crate::rng::substream(5, crate::rng::Purpose::NullData, 1);
        for trial in 0..200 {
            let n = 1 + trial % 7;
            let data: Vec<f64> = (0..n * n)
                .map(|_| f64::from(rng.random_range(0..4u8)))
                .collect();
            let w = Matrix::from_row_major(n, n, data).unwrap();
            let fast = max_weight_assignment(&w);
            assert_eq!(fast.value, brute_force_assignment(&w).value);
            assert!(crate::numeric::is_permutation(&fast.perm, n));
        }
    }
}
