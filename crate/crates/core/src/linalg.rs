//! Exact rational linear algebra on small dense matrices.

use num_traits::{One, Zero};

use crate::qscalar::Rat;

pub type Matrix = Vec<Vec<Rat>>;

pub fn identity(n: usize) -> Matrix {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Rat::one() } else { Rat::zero() })
                .collect()
        })
        .collect()
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return vec![];
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j]).collect())
        .collect()
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let k = b.len();
    let cols = if k == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..k).fold(Rat::zero(), |acc, t| acc + row[t] * b[t][j]))
                .collect()
        })
        .collect()
}

/// Gauss–Jordan inverse; `None` if singular or not square.
pub fn inverse(m: &Matrix) -> Option<Matrix> {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: Matrix = m.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col];
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                for j in 0..n {
                    let (x, y) = (a[col][j], inv[col][j]);
                    a[r][j] -= f * x;
                    inv[r][j] -= f * y;
                }
            }
        }
    }
    Some(inv)
}

/// Solve `m x = b` for a matrix right-hand side.
pub fn solve(m: &Matrix, b: &Matrix) -> Option<Matrix> {
    Some(matmul(&inverse(m)?, b))
}

/// Unique solution of a possibly overdetermined system `rows · x = rhs`.
pub fn solve_unique(rows: &Matrix, rhs: &[Rat], n: usize) -> Option<Vec<Rat>> {
    let mut aug: Matrix = rows
        .iter()
        .zip(rhs)
        .map(|(r, b)| {
            let mut r = r.clone();
            r.push(*b);
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(piv) = (row..aug.len()).find(|&r| !aug[r][col].is_zero()) else {
            continue;
        };
        aug.swap(row, piv);
        let p = aug[row][col];
        for v in aug[row].iter_mut() {
            *v /= p;
        }
        for r in 0..aug.len() {
            if r != row && !aug[r][col].is_zero() {
                let f = aug[r][col];
                for j in 0..=n {
                    let x = aug[row][j];
                    aug[r][j] -= f * x;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < n || aug[row..].iter().any(|r| !r[n].is_zero()) {
        return None;
    }
    Some((0..n).map(|i| aug[i][n]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rint};

    #[test]
    fn inverse_of_a2_cartan() {
        let a = vec![vec![rint(2), rint(-1)], vec![rint(-1), rint(2)]];
        let inv = inverse(&a).unwrap();
        assert_eq!(
            inv,
            vec![vec![rat(2, 3), rat(1, 3)], vec![rat(1, 3), rat(2, 3)]]
        );
        assert_eq!(matmul(&a, &inv), identity(2));
    }

    #[test]
    fn overdetermined() {
        let rows = vec![
            vec![rint(1), rint(0)],
            vec![rint(0), rint(1)],
            vec![rint(1), rint(1)],
        ];
        assert_eq!(
            solve_unique(&rows, &[rint(1), rint(2), rint(3)], 2),
            Some(vec![rint(1), rint(2)])
        );
        assert_eq!(solve_unique(&rows, &[rint(1), rint(2), rint(4)], 2), None);
        assert_eq!(solve_unique(&rows[..1].to_vec(), &[rint(1)], 2), None);
    }

    #[test]
    fn singular() {
        let a = vec![vec![rint(1), rint(2)], vec![rint(2), rint(4)]];
        assert!(inverse(&a).is_none());
    }
}
