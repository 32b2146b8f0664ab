use crate::field::Field;
use crate::matrix::QMatrix;
use crate::rational::Rational;

/// Dense univariate polynomial over ℚ, coefficients from the constant term up.
/// Trailing zeros are trimmed so `coeffs.len() - 1` is the degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poly {
    pub coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| Rational::from_int(x)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::new(vec![]);
        }
        let mut out = vec![Rational::ZERO; self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    /// Quotient and remainder.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.coeffs.clone();
        let dd = d.degree();
        let lead = d.coeffs[dd].clone();
        if r.len() <= dd {
            return (Poly::new(vec![]), self.clone());
        }
        let mut q = vec![Rational::ZERO; r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if c.is_zero() {
                continue;
            }
            for (j, dc) in d.coeffs.iter().enumerate() {
                r[k + j] -= &(&c * dc);
            }
            q[k] = c;
        }
        (Poly::new(q), Poly::new(r))
    }
}

/// `det(xI − A)` by the Faddeev–LeVerrier recursion.
pub fn char_poly(a: &QMatrix) -> Poly {
    assert!(a.is_square());
    let n = a.rows();
    let mut c = vec![Rational::ZERO; n + 1];
    c[n] = Rational::ONE;
    let mut m = QMatrix::zeros(n, n);
    for k in 1..=n {
        // M_k = A·M_{k-1} + c_{n-k+1}·I
        let mut next = a.mul(&m);
        for i in 0..n {
            next[(i, i)] = next[(i, i)].add(&c[n - k + 1]);
        }
        m = next;
        let t = a.mul(&m).trace();
        c[n - k] = -(&t / &Rational::from_int(k as i64));
    }
    Poly::new(c)
}

pub fn euler_phi(mut n: u64) -> u64 {
    let mut result = n;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if n > 1 {
        result -= result / n;
    }
    result
}

/// The `d`-th cyclotomic polynomial, as `(x^d − 1) / ∏_{e | d, e < d} Φ_e`.
pub fn cyclotomic(d: u64) -> Poly {
    assert!(d >= 1);
    let mut c = vec![Rational::ZERO; d as usize + 1];
    c[0] = Rational::from_int(-1);
    c[d as usize] = Rational::ONE;
    let mut p = Poly::new(c);
    for e in (1..d).filter(|e| d % e == 0) {
        let (q, r) = p.div_rem(&cyclotomic(e));
        debug_assert!(r.is_zero());
        p = q;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic(1), Poly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(3), Poly::from_i64(&[1, 1, 1]));
        assert_eq!(cyclotomic(4), Poly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), Poly::from_i64(&[1, -1, 1]));
        assert_eq!(cyclotomic(12), Poly::from_i64(&[1, 0, -1, 0, 1]));
        for d in 1..40 {
            assert_eq!(cyclotomic(d).degree() as u64, euler_phi(d));
        }
    }

    #[test]
    fn char_poly_of_companion() {
        let c = QMatrix::from_i64_rows(&[&[0, -1], &[1, -1]]);
        assert_eq!(char_poly(&c), Poly::from_i64(&[1, 1, 1]));
        let j = QMatrix::from_i64_rows(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        // (x-1)^3
        assert_eq!(char_poly(&j), Poly::from_i64(&[-1, 3, -3, 1]));
    }
}
