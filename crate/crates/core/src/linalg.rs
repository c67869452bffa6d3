//! Exact Gaussian elimination over the rationals.

use num_traits::{One, Zero};

use crate::polyring::Q;

/// Rank of a dense matrix given as rows.
pub fn rank(rows: &[Vec<Q>]) -> usize {
    let mut m: Vec<Vec<Q>> = rows.to_vec();
    row_reduce(&mut m).len()
}

/// Reduces `m` in place to reduced row echelon form; returns pivot columns.
pub fn row_reduce(m: &mut [Vec<Q>]) -> Vec<usize> {
    let ncols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (lo, hi) = if i < r { let (a, b) = m.split_at_mut(r); (&mut a[i], &b[0]) } else { let (a, b) = m.split_at_mut(i); (&mut b[0], &a[r]) };
                for (x, y) in lo.iter_mut().zip(hi.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Some solution of `A x = b`, or `None` if the system is inconsistent.
pub fn solve(a: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Q>> = a.iter().zip(b).map(|(row, bi)| row.iter().cloned().chain(std::iter::once(bi.clone())).collect()).collect();
    let pivots = row_reduce(&mut aug);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![Q::zero(); ncols];
    for (r, &c) in pivots.iter().enumerate() {
        debug_assert!(aug[r][c].is_one());
        x[c] = aug[r][ncols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyring::q;

    #[test]
    fn rank_and_solve() {
        let a = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rank(&a), 1);
        assert!(solve(&a, &[q(1), q(3)]).is_none());
        let x = solve(&a, &[q(1), q(2)]).unwrap();
        assert_eq!(&x[0] + &(q(2) * &x[1]), q(1));
        assert_eq!(rank(&[vec![q(0), q(1)], vec![q(1), q(0)]]), 2);
    }
}
