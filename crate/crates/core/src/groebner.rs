//! Buchberger's algorithm under grevlex with cofactor tracking.
//!
//! Every basis element remembers how it is built from the original generators,
//! so ideal membership can return an explicit certificate `a = sum c_j g_j`.

use crate::field::Field;
use crate::poly::{Monomial, MultiPoly};

/// Anything that maps a polynomial to a canonical representative.
pub trait NormalForm<F: Field> {
    fn reduce(&self, p: &MultiPoly<F>) -> MultiPoly<F>;

    fn is_zero_mod(&self, p: &MultiPoly<F>) -> bool {
        self.reduce(p).is_zero()
    }

    /// Leading monomials of the reducers; used to enumerate standard monomials.
    fn leading_monomials(&self) -> Vec<Monomial>;

    /// Monomials of degree at most `max_degree` that are not divisible by any
    /// leading monomial, ascending. They form a basis of the quotient's filtration.
    fn standard_monomials(&self, nvars: usize, max_degree: u32) -> Vec<Monomial> {
        let lms = self.leading_monomials();
        Monomial::up_to_degree(nvars, max_degree).into_iter().filter(|m| !lms.iter().any(|l| l.divides(m))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct GroebnerBasis<F> {
    nvars: usize,
    basis: Vec<MultiPoly<F>>,
    /// `cofactors[k][j]`: coefficient of generator `j` in `basis[k]`.
    cofactors: Vec<Vec<MultiPoly<F>>>,
    ngens: usize,
}

impl<F: Field> GroebnerBasis<F> {
    /// Reduced Gröbner basis of the ideal generated by `gens`.
    pub fn compute(nvars: usize, gens: &[MultiPoly<F>]) -> Self {
        let ngens = gens.len();
        let mut basis: Vec<MultiPoly<F>> = Vec::new();
        let mut cofactors: Vec<Vec<MultiPoly<F>>> = Vec::new();
        for (j, g) in gens.iter().enumerate() {
            assert_eq!(g.nvars(), nvars, "generator arity");
            let Some(lc) = g.leading_coeff() else { continue };
            let inv = lc.inv();
            let mut cof = vec![MultiPoly::zero(nvars); ngens];
            cof[j] = MultiPoly::constant(nvars, inv.clone());
            basis.push(g.scale(&inv));
            cofactors.push(cof);
        }
        let mut gb = GroebnerBasis { nvars, basis, cofactors, ngens };
        gb.buchberger();
        gb.minimize_and_interreduce();
        gb
    }

    fn buchberger(&mut self) {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for j in 0..self.basis.len() {
            for i in 0..j {
                pairs.push((i, j));
            }
        }
        while !pairs.is_empty() {
            // normal strategy: smallest lcm first
            let (k, _) = pairs
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| self.pair_lcm(a.0, a.1).cmp(&self.pair_lcm(b.0, b.1)).then(a.cmp(b)))
                .expect("nonempty");
            let (i, j) = pairs.swap_remove(k);
            let (li, lj) = (self.lm(i).clone(), self.lm(j).clone());
            if li.is_coprime(&lj) {
                continue;
            }
            let lcm = li.lcm(&lj);
            let (mi, mj) = (li.quotient_of(&lcm), lj.quotient_of(&lcm));
            let one = F::one();
            let s = &self.basis[i].mul_term(&mi, &one) - &self.basis[j].mul_term(&mj, &one);
            let mut cof: Vec<MultiPoly<F>> = (0..self.ngens)
                .map(|g| &self.cofactors[i][g].mul_term(&mi, &one) - &self.cofactors[j][g].mul_term(&mj, &one))
                .collect();
            let (quots, rem) = self.divide(&s);
            if rem.is_zero() {
                continue;
            }
            for (k, q) in quots.iter().enumerate() {
                if q.is_zero() {
                    continue;
                }
                for (g, c) in cof.iter_mut().enumerate() {
                    *c = &*c - &(q * &self.cofactors[k][g]);
                }
            }
            let inv = rem.leading_coeff().expect("nonzero").inv();
            let new_index = self.basis.len();
            self.basis.push(rem.scale(&inv));
            self.cofactors.push(cof.iter().map(|c| c.scale(&inv)).collect());
            for i in 0..new_index {
                pairs.push((i, new_index));
            }
        }
    }

    fn minimize_and_interreduce(&mut self) {
        // drop elements whose leading monomial is divisible by another's
        let n = self.basis.len();
        let mut keep = vec![true; n];
        for i in 0..n {
            for j in 0..n {
                if i == j || !keep[j] {
                    continue;
                }
                let (li, lj) = (self.lm(i), self.lm(j));
                if lj.divides(li) && (lj != li || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        let mut basis = Vec::new();
        let mut cofs = Vec::new();
        for (k, keep) in keep.into_iter().enumerate() {
            if keep {
                basis.push(self.basis[k].clone());
                cofs.push(self.cofactors[k].clone());
            }
        }
        self.basis = basis;
        self.cofactors = cofs;
        // full tail reduction against the others
        for k in 0..self.basis.len() {
            let others: Vec<usize> = (0..self.basis.len()).filter(|&o| o != k).collect();
            let (quots, rem) = divide_by(&self.basis[k], others.iter().map(|&o| &self.basis[o]).collect());
            let mut cof = self.cofactors[k].clone();
            for (q, &o) in quots.iter().zip(&others) {
                if q.is_zero() {
                    continue;
                }
                for (g, c) in cof.iter_mut().enumerate() {
                    *c = &*c - &(q * &self.cofactors[o][g]);
                }
            }
            self.basis[k] = rem;
            self.cofactors[k] = cof;
        }
        let mut order: Vec<usize> = (0..self.basis.len()).collect();
        order.sort_by(|&a, &b| self.lm(a).cmp(self.lm(b)));
        self.basis = order.iter().map(|&k| self.basis[k].clone()).collect();
        self.cofactors = order.iter().map(|&k| self.cofactors[k].clone()).collect();
    }

    fn lm(&self, k: usize) -> &Monomial {
        self.basis[k].leading_monomial().expect("basis elements are nonzero")
    }

    fn pair_lcm(&self, i: usize, j: usize) -> Monomial {
        self.lm(i).lcm(self.lm(j))
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn basis(&self) -> &[MultiPoly<F>] {
        &self.basis
    }

    /// The ideal is the whole ring.
    pub fn is_unit_ideal(&self) -> bool {
        self.basis.iter().any(MultiPoly::is_constant)
    }

    /// Quotients per basis element and the fully reduced remainder.
    pub fn divide(&self, p: &MultiPoly<F>) -> (Vec<MultiPoly<F>>, MultiPoly<F>) {
        divide_by(p, self.basis.iter().collect())
    }

    /// `Some(c)` with `p = sum c_j * gens[j]` exactly when `p` is in the ideal.
    pub fn membership(&self, p: &MultiPoly<F>) -> Option<Vec<MultiPoly<F>>> {
        let (quots, rem) = self.divide(p);
        if !rem.is_zero() {
            return None;
        }
        let mut out = vec![MultiPoly::zero(self.nvars); self.ngens];
        for (k, q) in quots.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (g, c) in out.iter_mut().enumerate() {
                *c = &*c + &(q * &self.cofactors[k][g]);
            }
        }
        Some(out)
    }
}

impl<F: Field> NormalForm<F> for GroebnerBasis<F> {
    fn reduce(&self, p: &MultiPoly<F>) -> MultiPoly<F> {
        self.divide(p).1
    }

    fn leading_monomials(&self) -> Vec<Monomial> {
        self.basis.iter().filter_map(|b| b.leading_monomial().cloned()).collect()
    }
}

/// Multivariate division with full reduction of every term.
pub(crate) fn divide_by<F: Field>(p: &MultiPoly<F>, divisors: Vec<&MultiPoly<F>>) -> (Vec<MultiPoly<F>>, MultiPoly<F>) {
    let nvars = p.nvars();
    let mut quots = vec![MultiPoly::zero(nvars); divisors.len()];
    let mut rem = MultiPoly::zero(nvars);
    let mut cur = p.clone();
    let leads: Vec<(Monomial, F)> = divisors
        .iter()
        .map(|d| {
            let (m, c) = d.leading_term().expect("nonzero divisor");
            (m.clone(), c.inv())
        })
        .collect();
    while let Some((m, c)) = cur.leading_term() {
        let (m, c) = (m.clone(), c.clone());
        match leads.iter().position(|(l, _)| l.divides(&m)) {
            Some(k) => {
                let qm = leads[k].0.quotient_of(&m);
                let qc = c * leads[k].1.clone();
                cur = &cur - &divisors[k].mul_term(&qm, &qc);
                quots[k].add_term(qm, qc);
            }
            None => {
                let t = MultiPoly::term(m, c);
                cur = &cur - &t;
                rem = &rem + &t;
            }
        }
    }
    (quots, rem)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn v(n: usize, i: usize) -> MultiPoly<Rational> {
        MultiPoly::var(n, i)
    }
    fn c(n: usize, k: i64) -> MultiPoly<Rational> {
        MultiPoly::constant(n, Rational::from_i64(k))
    }

    #[test]
    fn membership_with_substitution() {
        // (X^2 Y - Z^2, X - 1) contains Y - Z^2
        let (x, y, z) = (v(3, 0), v(3, 1), v(3, 2));
        let gens = vec![&(&x.pow(2) * &y) - &z.pow(2), &x - &c(3, 1)];
        let gb = GroebnerBasis::compute(3, &gens);
        let a = &y - &z.pow(2);
        let cof = gb.membership(&a).expect("member");
        let recon = &(&cof[0] * &gens[0]) + &(&cof[1] * &gens[1]);
        assert_eq!(recon, a);
    }

    #[test]
    fn non_member_and_generator() {
        let x = v(1, 0);
        let gb = GroebnerBasis::compute(1, std::slice::from_ref(&x));
        assert!(gb.membership(&c(1, 1)).is_none());
        let cof = gb.membership(&x).unwrap();
        assert_eq!(cof, vec![c(1, 1)]);
    }

    #[test]
    fn reduced_basis_of_fiber_at_zero() {
        // (X, X^2 Y + X + Z^2 + T^3) -> {X, T^3 + Z^2}
        let (x, y, z, t) = (v(4, 0), v(4, 1), v(4, 2), v(4, 3));
        let r = &(&(&x.pow(2) * &y) + &x) + &(&z.pow(2) + &t.pow(3));
        let gb = GroebnerBasis::compute(4, &[x.clone(), r]);
        let mut basis = gb.basis().to_vec();
        basis.sort_by(|a, b| a.leading_monomial().cmp(&b.leading_monomial()));
        assert_eq!(basis, vec![x, &t.pow(3) + &z.pow(2)]);
    }

    #[test]
    fn unit_ideal() {
        let x = v(2, 0);
        let gb = GroebnerBasis::compute(2, &[x.clone(), &x - &c(2, 1)]);
        assert!(gb.is_unit_ideal());
        assert!(gb.membership(&c(2, 5)).is_some());
    }
}
