//! Fraction-free Gaussian elimination on `[I - lambda Q | r]` over `Q[lambda]`.
//!
//! The k-th pivot is the leading principal minor of order `k + 1`, which is
//! 1 at `lambda = 0`, so no pivoting is needed. Every division is exact.

use super::{lambda_times, Chain};
use crate::algebra::{Polynomial, RationalFunction};

/// Per-state values `v_s = y_s / det` with `y = adj(I - lambda Q) r`.
pub(crate) fn solve(chain: &Chain<'_>) -> Vec<RationalFunction> {
    let n = chain.payoffs.len();
    if n == 0 {
        return Vec::new();
    }
    // row i: columns 0..n hold I - lambda Q, column n holds r
    let mut m: Vec<Vec<Polynomial>> = (0..n)
        .map(|i| {
            let mut row = vec![Polynomial::zero(); n + 1];
            row[i] = Polynomial::one();
            for (&j, q) in chain.rows[i] {
                row[j] = &row[j] - &lambda_times(q);
            }
            row[n] = Polynomial::constant(chain.payoffs[i].clone());
            row
        })
        .collect();

    let mut prev = Polynomial::one();
    for k in 0..n.saturating_sub(1) {
        assert!(!m[k][k].is_zero(), "leading principal minor vanished");
        for i in k + 1..n {
            let mik = std::mem::replace(&mut m[i][k], Polynomial::zero());
            for j in k + 1..=n {
                let lhs = &m[k][k] * &m[i][j];
                let t = if mik.is_zero() || m[k][j].is_zero() {
                    lhs
                } else {
                    &lhs - &(&mik * &m[k][j])
                };
                m[i][j] = if prev.is_one() {
                    t
                } else {
                    t.exact_div(&prev).expect("Bareiss division is exact")
                };
            }
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    assert!(!det.is_zero(), "I - lambda Q is invertible");

    let mut y = vec![Polynomial::zero(); n];
    for i in (0..n).rev() {
        let mut num = &det * &m[i][n];
        for j in i + 1..n {
            if !m[i][j].is_zero() && !y[j].is_zero() {
                num = &num - &(&m[i][j] * &y[j]);
            }
        }
        y[i] = num.exact_div(&m[i][i]).expect("adjugate entries are polynomials");
    }
    y.into_iter()
        .map(|yi| RationalFunction::new(yi, det.clone()).expect("nonzero determinant"))
        .collect()
}
