//! Square and rectangular matrices over `F[T]`: determinants, adjugates, and
//! the Hermite normal form under unimodular row operations.

use super::UniPoly;
use crate::field::Field;

pub type PolyMatrix<F> = Vec<Vec<UniPoly<F>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm<F> {
    /// Upper echelon form; pivots monic, entries above a pivot of smaller degree.
    pub h: PolyMatrix<F>,
    /// Unimodular transform with `h = u * m`.
    pub u: PolyMatrix<F>,
}

pub fn identity<F: Field>(n: usize) -> PolyMatrix<F> {
    (0..n).map(|i| (0..n).map(|j| if i == j { UniPoly::one() } else { UniPoly::zero() }).collect()).collect()
}

pub fn mat_mul<F: Field>(a: &PolyMatrix<F>, b: &PolyMatrix<F>) -> PolyMatrix<F> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).fold(UniPoly::zero(), |acc, k| &acc + &(&row[k] * &b[k][j]))).collect())
        .collect()
}

fn row_axpy<F: Field>(m: &mut PolyMatrix<F>, target: usize, factor: &UniPoly<F>, source: usize) {
    let src = m[source].clone();
    for (t, s) in m[target].iter_mut().zip(&src) {
        *t = &*t - &(factor * s);
    }
}

/// Row-style Hermite normal form of `m` over `F[T]`.
pub fn hermite_normal_form<F: Field>(m: &PolyMatrix<F>) -> HermiteForm<F> {
    let nrows = m.len();
    let ncols = m.first().map_or(0, Vec::len);
    let mut h = m.clone();
    let mut u = identity::<F>(nrows);
    let mut pivot_row = 0;
    for col in 0..ncols {
        if pivot_row == nrows {
            break;
        }
        let mut found = false;
        loop {
            let best = (pivot_row..nrows).filter(|&r| !h[r][col].is_zero()).min_by_key(|&r| h[r][col].degree());
            let Some(best) = best else { break };
            found = true;
            h.swap(pivot_row, best);
            u.swap(pivot_row, best);
            let mut clean = true;
            for r in pivot_row + 1..nrows {
                if h[r][col].is_zero() {
                    continue;
                }
                let (q, rem) = h[r][col].div_rem(&h[pivot_row][col]).expect("nonzero pivot");
                row_axpy(&mut h, r, &q, pivot_row);
                row_axpy(&mut u, r, &q, pivot_row);
                if !rem.is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if !found {
            continue;
        }
        let lc_inv = h[pivot_row][col].leading_coeff().expect("pivot").inv();
        let unit = UniPoly::constant(lc_inv);
        for v in h[pivot_row].iter_mut() {
            *v = &*v * &unit;
        }
        for v in u[pivot_row].iter_mut() {
            *v = &*v * &unit;
        }
        for r in 0..pivot_row {
            if h[r][col].is_zero() {
                continue;
            }
            let (q, _) = h[r][col].div_rem(&h[pivot_row][col]).expect("nonzero pivot");
            row_axpy(&mut h, r, &q, pivot_row);
            row_axpy(&mut u, r, &q, pivot_row);
        }
        pivot_row += 1;
    }
    HermiteForm { h, u }
}

fn minor<F: Field>(m: &PolyMatrix<F>, skip_row: usize, skip_col: usize) -> PolyMatrix<F> {
    m.iter()
        .enumerate()
        .filter(|(i, _)| *i != skip_row)
        .map(|(_, row)| row.iter().enumerate().filter(|(j, _)| *j != skip_col).map(|(_, v)| v.clone()).collect())
        .collect()
}

/// Determinant by cofactor expansion; the matrices here are at most a few rows.
pub fn poly_det<F: Field>(m: &PolyMatrix<F>) -> UniPoly<F> {
    match m.len() {
        0 => UniPoly::one(),
        1 => m[0][0].clone(),
        n => (0..n).fold(UniPoly::zero(), |acc, j| {
            if m[0][j].is_zero() {
                return acc;
            }
            let term = &m[0][j] * &poly_det(&minor(m, 0, j));
            if j % 2 == 0 {
                &acc + &term
            } else {
                &acc - &term
            }
        }),
    }
}

/// Adjugate: `m * adj(m) = det(m) * I`.
pub fn adjugate<F: Field>(m: &PolyMatrix<F>) -> PolyMatrix<F> {
    let n = m.len();
    if n == 1 {
        return vec![vec![UniPoly::one()]];
    }
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let c = poly_det(&minor(m, j, i));
                    if (i + j) % 2 == 0 {
                        c
                    } else {
                        -&c
                    }
                })
                .collect()
        })
        .collect()
}
