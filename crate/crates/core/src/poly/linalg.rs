//! Dense exact linear algebra over a field.
//!
//! The bounded searches (kernel ansatz, seeds, dependency certificates,
//! `solve_in_f`) all reduce to nullspaces of coefficient matrices built by
//! [`coefficient_matrix`].

use std::collections::BTreeMap;

use super::{Monomial, MultiPoly};
use crate::field::Field;

pub type Matrix<F> = Vec<Vec<F>>;

/// Reduced row echelon form in place; returns pivot columns. Zero rows are dropped.
pub fn rref<F: Field>(m: &mut Matrix<F>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        if row == m.len() {
            break;
        }
        let Some(p) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][col].inv();
        for v in m[row].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..ncols {
                    let delta = factor.clone() * m[row][c].clone();
                    m[r][c] = m[r][c].clone() - delta;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    m.truncate(row);
    pivots
}

pub fn rank<F: Field>(m: &Matrix<F>, ncols: usize) -> usize {
    let mut m = m.clone();
    rref(&mut m, ncols).len()
}

/// Basis of `{v : m v = 0}`, one vector per free column, in column order.
pub fn nullspace<F: Field>(m: &Matrix<F>, ncols: usize) -> Vec<Vec<F>> {
    let mut m = m.clone();
    let pivots = rref(&mut m, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![F::zero(); ncols];
        v[free] = F::one();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[r][free].clone();
        }
        basis.push(v);
    }
    basis
}

/// One solution of `m x = b` (free variables set to zero), if consistent.
pub fn solve<F: Field>(m: &Matrix<F>, b: &[F], ncols: usize) -> Option<Vec<F>> {
    let mut aug: Matrix<F> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.contains(&ncols) {
        return None;
    }
    let mut x = vec![F::zero(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Rows of the canonical (reduced echelon) basis of the span of `vectors`.
pub fn canonical_basis<F: Field>(vectors: &[Vec<F>], ncols: usize) -> Vec<Vec<F>> {
    let mut m = vectors.to_vec();
    rref(&mut m, ncols);
    m
}

/// Writes each polynomial in `columns` as a column of coefficients. Row `k`
/// corresponds to the `k`-th monomial of the returned list.
pub fn coefficient_matrix<F: Field>(columns: &[MultiPoly<F>]) -> (Matrix<F>, Vec<Monomial>) {
    let mut index: BTreeMap<Monomial, usize> = BTreeMap::new();
    for p in columns {
        for (m, _) in p.terms() {
            let n = index.len();
            index.entry(m.clone()).or_insert(n);
        }
    }
    let mut mat = vec![vec![F::zero(); columns.len()]; index.len()];
    for (j, p) in columns.iter().enumerate() {
        for (m, c) in p.terms() {
            mat[index[m]][j] = c.clone();
        }
    }
    let mut rows: Vec<(Monomial, usize)> = index.into_iter().collect();
    rows.sort_by_key(|(_, i)| *i);
    (mat, rows.into_iter().map(|(m, _)| m).collect())
}

/// Like [`coefficient_matrix`], but each column is a tuple of polynomials
/// (one per condition group) whose coefficients are stacked.
pub fn stacked_coefficient_matrix<F: Field>(columns: &[Vec<MultiPoly<F>>]) -> Matrix<F> {
    let mut index: BTreeMap<(usize, Monomial), usize> = BTreeMap::new();
    for col in columns {
        for (g, p) in col.iter().enumerate() {
            for (m, _) in p.terms() {
                let n = index.len();
                index.entry((g, m.clone())).or_insert(n);
            }
        }
    }
    let mut mat = vec![vec![F::zero(); columns.len()]; index.len()];
    for (j, col) in columns.iter().enumerate() {
        for (g, p) in col.iter().enumerate() {
            for (m, c) in p.terms() {
                mat[index[&(g, m.clone())]][j] = c.clone();
            }
        }
    }
    mat
}

/// Canonical basis of the subspace of polynomials spanned by `nullspace`
/// vectors over `monomials`: rows in reduced echelon form with respect to
/// descending grevlex, so distinct basis elements have distinct leading
/// monomials. Returned in ascending order of leading monomial.
pub fn canonical_polys<F: Field>(vectors: &[Vec<F>], monomials: &[Monomial]) -> Vec<MultiPoly<F>> {
    let n = monomials.len();
    let nvars = monomials.first().map_or(0, Monomial::nvars);
    // reorder columns so the largest monomial comes first
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| monomials[b].cmp(&monomials[a]));
    let permuted: Vec<Vec<F>> = vectors.iter().map(|v| order.iter().map(|&k| v[k].clone()).collect()).collect();
    let basis = canonical_basis(&permuted, n);
    let mut polys: Vec<MultiPoly<F>> = basis
        .iter()
        .map(|row| {
            MultiPoly::from_terms(nvars, row.iter().zip(&order).map(|(c, &k)| (monomials[k].clone(), c.clone())))
        })
        .collect();
    polys.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
    polys
}

/// Rank of the Jacobian of `elements` evaluated at `point`.
pub fn jacobian_rank<F: Field>(elements: &[MultiPoly<F>], point: &[F]) -> usize {
    let nvars = point.len();
    let m: Matrix<F> = elements.iter().map(|e| (0..nvars).map(|v| e.derivative(v).eval(point)).collect()).collect();
    rank(&m, nvars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn nullspace_and_solve() {
        let m = vec![vec![q(1), q(1), q(0)], vec![q(0), q(0), q(1)]];
        let ns = nullspace(&m, 3);
        assert_eq!(ns, vec![vec![q(-1), q(1), q(0)]]);
        let x = solve(&m, &[q(2), q(3)], 3).unwrap();
        assert_eq!(x, vec![q(2), q(0), q(3)]);
        assert!(solve(&vec![vec![q(0)]], &[q(1)], 1).is_none());
    }

    #[test]
    fn jacobian_examples() {
        let x = MultiPoly::<Rational>::var(2, 0);
        let y = MultiPoly::<Rational>::var(2, 1);
        assert_eq!(jacobian_rank(&[x.clone(), y.clone()], &[q(1), q(1)]), 2);
        // rows (2, 0) and (3, 0)
        assert_eq!(jacobian_rank(&[x.pow(2), x.pow(3)], &[q(1), q(0)]), 1);
        for pt in [[q(0), q(0)], [q(5), q(-7)]] {
            assert_eq!(jacobian_rank(&[&x + &y, &x - &y], &pt), 2);
        }
    }
}
