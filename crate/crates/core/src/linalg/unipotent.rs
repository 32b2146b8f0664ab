use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::{Matrix, QMatrix};
use num_integer::Integer;

use super::poly::{char_poly, cyclotomic, euler_phi};
use super::rank;

/// Smallest `k ≥ 0` with `n^k = 0`, or `None` if `n` is not nilpotent.
pub fn nilpotency_index<F: Field>(n: &Matrix<F>) -> Option<usize> {
    assert!(n.is_square());
    let dim = n.rows();
    let mut p = Matrix::<F>::identity(dim);
    for k in 0..=dim {
        if p.is_zero() {
            return Some(k);
        }
        p = p.mul(n);
    }
    None
}

pub fn is_unipotent<F: Field>(m: &Matrix<F>) -> bool {
    m.is_square() && nilpotency_index(&m.minus_identity()).is_some()
}

pub fn unipotent_log<F: Field>(m: &Matrix<F>) -> Result<Matrix<F>> {
    let n = m.minus_identity();
    let idx = nilpotency_index(&n).ok_or(Error::NotUnipotent(None))?;
    let mut acc = Matrix::zeros(m.rows(), m.cols());
    let mut pw = n.clone();
    for k in 1..idx {
        let c = F::from_i64(if k % 2 == 1 { 1 } else { -1 }).div(&F::from_i64(k as i64));
        acc = acc.add(&pw.scale(&c));
        pw = pw.mul(&n);
    }
    Ok(acc)
}

/// `Σ x^k / k!`; panics if `x` is not nilpotent.
pub fn exp_nilpotent<F: Field>(x: &Matrix<F>) -> Matrix<F> {
    let idx = nilpotency_index(x).expect("exp_nilpotent of a non-nilpotent matrix");
    let mut acc = Matrix::identity(x.rows());
    let mut term = Matrix::identity(x.rows());
    for k in 1..idx {
        term = term.mul(x).scale(&F::from_i64(k as i64).inv());
        acc = acc.add(&term);
    }
    acc
}

/// Jordan block sizes of a unipotent matrix, largest first.
pub fn jordan_profile_unipotent<F: Field>(m: &Matrix<F>) -> Result<Vec<usize>> {
    let n = m.minus_identity();
    let idx = nilpotency_index(&n).ok_or(Error::NotUnipotent(None))?;
    // ranks[k] = rank(N^k)
    let mut ranks = vec![m.rows()];
    let mut pw = Matrix::identity(m.rows());
    for _ in 0..idx {
        pw = pw.mul(&n);
        ranks.push(rank(&pw));
    }
    ranks.push(0);
    let mut out = Vec::new();
    for k in (1..=idx).rev() {
        let at_least_k = ranks[k - 1] - ranks[k];
        let at_least_k1 = ranks[k] - ranks[k + 1];
        out.extend(std::iter::repeat(k).take(at_least_k - at_least_k1));
    }
    Ok(out)
}

/// Smallest `N ≥ 1` with `m^N` unipotent.
pub fn quasi_unipotent_order(m: &QMatrix) -> Result<u64> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch("quasi_unipotent_order needs a square matrix".into()));
    }
    let mut p = char_poly(m);
    let deg = p.degree() as u64;
    let mut lcm: u64 = 1;
    let mut d = 1u64;
    while p.degree() > 0 && d <= 2 * deg * deg + 2 {
        if euler_phi(d) <= deg {
            let phi = cyclotomic(d);
            loop {
                let (q, r) = p.div_rem(&phi);
                if !r.is_zero() {
                    break;
                }
                p = q;
                lcm = lcm.lcm(&d);
            }
        }
        d += 1;
    }
    if p.degree() > 0 {
        return Err(Error::NotQuasiUnipotent);
    }
    let mut divisors: Vec<u64> = (1..=lcm).filter(|k| lcm % k == 0).collect();
    divisors.sort_unstable();
    for k in divisors {
        if is_unipotent(&m.pow(k)) {
            return Ok(k);
        }
    }
    unreachable!("m^lcm has only eigenvalue 1")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64_rows(rows)
    }

    #[test]
    fn unipotence_examples() {
        assert!(is_unipotent(&QMatrix::identity(4)));
        assert!(is_unipotent(&q(&[&[1, 1], &[0, 1]])));
        let d = QMatrix::diag(&[Rational::from_int(2), Rational::new(1, 2)]);
        assert!(!is_unipotent(&d));
        assert!(matches!(unipotent_log(&d), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn log_examples() {
        assert!(unipotent_log(&QMatrix::identity(3)).unwrap().is_zero());
        assert_eq!(unipotent_log(&q(&[&[1, 1], &[0, 1]])).unwrap(), q(&[&[0, 1], &[0, 0]]));
        let j = q(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let mut want = q(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        want[(0, 2)] = Rational::new(-1, 2);
        assert_eq!(unipotent_log(&j).unwrap(), want);
    }

    #[test]
    fn jordan_examples() {
        assert_eq!(jordan_profile_unipotent(&QMatrix::identity(3)).unwrap(), vec![1, 1, 1]);
        let j = q(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        assert_eq!(jordan_profile_unipotent(&j).unwrap(), vec![3]);
        let b = q(&[&[1, 1], &[0, 1]]);
        assert_eq!(jordan_profile_unipotent(&b.direct_sum(&b)).unwrap(), vec![2, 2]);
    }

    #[test]
    fn quasi_unipotent_examples() {
        assert_eq!(quasi_unipotent_order(&q(&[&[1, 5], &[0, 1]])).unwrap(), 1);
        assert_eq!(quasi_unipotent_order(&QMatrix::identity(2).neg()).unwrap(), 2);
        let c = q(&[&[0, -1], &[1, -1]]);
        assert_eq!(quasi_unipotent_order(&c).unwrap(), 3);
        assert!(c.pow(3).is_identity());
        assert_eq!(quasi_unipotent_order(&q(&[&[2, 1], &[1, 1]])), Err(Error::NotQuasiUnipotent));
        // −(Jordan block) ⊕ rotation by 90°: order lcm(2,4) = 4
        let m = q(&[&[-1, -1], &[0, -1]]).direct_sum(&q(&[&[0, -1], &[1, 0]]));
        assert_eq!(quasi_unipotent_order(&m).unwrap(), 4);
    }

    fn unitriangular(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-3i64..4, n * n).prop_map(move |v| {
            QMatrix::from_fn(n, n, |r, c| match r.cmp(&c) {
                std::cmp::Ordering::Equal => Rational::ONE,
                std::cmp::Ordering::Less => Rational::from_int(v[r * n + c]),
                _ => Rational::ZERO,
            })
        })
    }

    proptest! {
        #[test]
        fn exp_log_round_trip(u in unitriangular(5), p in unitriangular(5)) {
            // conjugate so the matrix is not triangular
            let pt = p.transpose().mul(&p);
            let m = pt.mul(&u).mul(&super::super::inverse(&pt).unwrap());
            let x = unipotent_log(&m).unwrap();
            prop_assert!(nilpotency_index(&x).is_some());
            prop_assert_eq!(exp_nilpotent(&x), m);
        }

        #[test]
        fn rank_sequence_is_monotone(u in unitriangular(6)) {
            let n = u.minus_identity();
            let prof = jordan_profile_unipotent(&u).unwrap();
            prop_assert_eq!(prof.iter().sum::<usize>(), 6);
            let mut prev = 6;
            let mut pw = QMatrix::identity(6);
            for k in 1..=prof[0] {
                pw = pw.mul(&n);
                let r = rank(&pw);
                prop_assert!(r <= prev);
                prev = r;
                prop_assert_eq!(r == 0, k == prof[0]);
            }
        }

        #[test]
        fn order_divides_cyclotomic_lcm(k in 0usize..4, u in unitriangular(2)) {
            let rot = [q(&[&[1, 0], &[0, 1]]), q(&[&[0, -1], &[1, 0]]), q(&[&[0, -1], &[1, -1]]), q(&[&[1, -1], &[1, 0]])];
            let m = rot[k].direct_sum(&u);
            let n = quasi_unipotent_order(&m).unwrap();
            prop_assert_eq!(n, [1, 4, 3, 6][k]);
        }
    }
}
