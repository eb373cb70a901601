use std::cmp::Ordering;
use std::fmt;

/// Exponent vector, one entry per ambient variable.
///
/// `Ord` is graded reverse lexicographic: total degree first, ties broken in
/// favour of the monomial with the *smaller* exponent in the last variable
/// where the two differ.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, index: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Monomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `other / self`, assuming `self` divides `other`.
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial(other.0.iter().zip(&self.0).map(|(a, b)| a - b).collect())
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Appends `extra` zero exponents.
    pub fn extend(&self, extra: usize) -> Monomial {
        let mut e = self.0.clone();
        e.extend(std::iter::repeat_n(0, extra));
        Monomial(e)
    }

    /// Number of variables with a nonzero exponent.
    pub fn support_size(&self) -> usize {
        self.0.iter().filter(|&&e| e > 0).count()
    }

    /// All monomials in `nvars` variables of total degree at most `max_degree`,
    /// in ascending grevlex order.
    pub fn up_to_degree(nvars: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            let mut cur = vec![0; nvars];
            of_degree(&mut cur, 0, d, &mut out);
        }
        out.sort();
        out
    }

    pub(crate) fn fmt_with(&self, names: &[String], f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                write!(f, "*")?;
            }
            first = false;
            write!(f, "{}", names[i])?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        if first {
            write!(f, "1")?;
        }
        Ok(())
    }
}

fn of_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if cur.is_empty() {
        if remaining == 0 {
            out.push(Monomial(Vec::new()));
        }
        return;
    }
    if pos == cur.len() - 1 {
        cur[pos] = remaining;
        out.push(Monomial(cur.clone()));
        cur[pos] = 0;
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        of_degree(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.degree().cmp(&other.degree()) {
            Ordering::Equal => {}
            o => return o,
        }
        for (a, b) in self.0.iter().zip(&other.0).rev() {
            if a != b {
                return b.cmp(a);
            }
        }
        self.0.len().cmp(&other.0.len())
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grevlex_ordering() {
        // x^2*y > t^3 in x, y, z, t
        let a = Monomial::new(vec![2, 1, 0, 0]);
        let b = Monomial::new(vec![0, 0, 0, 3]);
        assert!(a > b);
        // x*z < y^2 in three variables (grevlex: smaller last exponent wins)
        let xz = Monomial::new(vec![1, 0, 1]);
        let yy = Monomial::new(vec![0, 2, 0]);
        assert!(yy > xz);
        assert!(Monomial::new(vec![1, 0, 0]) > Monomial::new(vec![0, 1, 0]));
    }

    #[test]
    fn enumeration_counts() {
        // C(4 + 2, 2) monomials of degree <= 2 in 4 variables
        assert_eq!(Monomial::up_to_degree(4, 2).len(), 15);
        assert_eq!(Monomial::up_to_degree(0, 3).len(), 1);
        let ms = Monomial::up_to_degree(2, 3);
        assert!(ms.windows(2).all(|w| w[0] < w[1]));
    }
}
