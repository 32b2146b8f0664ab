use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::matrix::Matrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Inertia {
    pub n_plus: usize,
    pub n_zero: usize,
    pub n_minus: usize,
}

impl Inertia {
    pub fn is_psd(&self) -> bool {
        self.n_minus == 0
    }

    pub fn is_nsd(&self) -> bool {
        self.n_plus == 0
    }
}

/// Signature of a symmetric (over ℚ) or Hermitian (over ℚ(i)) matrix by
/// congruence: 1×1 pivots on the diagonal, a 2×2 pivot `[[0,b],[b̄,0]]`
/// when the remaining diagonal vanishes.
pub fn inertia<F: Field>(q: &Matrix<F>) -> Result<Inertia> {
    if !q.is_hermitian() {
        return Err(Error::NotSymmetric);
    }
    let mut a = q.row_vecs();
    let mut out = Inertia { n_plus: 0, n_zero: 0, n_minus: 0 };
    while !a.is_empty() {
        let n = a.len();
        if let Some(k) = (0..n).find(|&k| !a[k][k].is_zero()) {
            let d = a[k][k].clone();
            if d.re_signum() > 0 {
                out.n_plus += 1;
            } else {
                out.n_minus += 1;
            }
            let dinv = d.inv();
            let col: Vec<F> = (0..n).map(|i| a[i][k].clone()).collect();
            let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
            a = keep
                .iter()
                .map(|&i| {
                    keep.iter()
                        .map(|&j| {
                            if col[i].is_zero() || a[k][j].is_zero() {
                                a[i][j].clone()
                            } else {
                                a[i][j].sub(&col[i].mul(&dinv).mul(&a[k][j]))
                            }
                        })
                        .collect()
                })
                .collect();
            continue;
        }
        let off = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
        let Some((k, l)) = off else {
            out.n_zero += n;
            break;
        };
        // [[0,b],[b̄,0]] has one positive and one negative eigenvalue
        out.n_plus += 1;
        out.n_minus += 1;
        let b = a[k][l].clone();
        let (binv, bbinv) = (b.inv(), b.conj().inv());
        let keep: Vec<usize> = (0..n).filter(|&i| i != k && i != l).collect();
        // A' = C − [x_k x_l] D⁻¹ [x_k x_l]†, D⁻¹ = [[0, 1/b̄],[1/b, 0]]
        a = keep
            .iter()
            .map(|&i| {
                keep.iter()
                    .map(|&j| {
                        let t1 = a[i][k].mul(&bbinv).mul(&a[l][j]);
                        let t2 = a[i][l].mul(&binv).mul(&a[k][j]);
                        a[i][j].sub(&t1).sub(&t2)
                    })
                    .collect()
            })
            .collect();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Gaussian;
    use crate::matrix::{CMatrix, QMatrix};
    use crate::rational::Rational;
    use proptest::prelude::*;

    fn q(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64_rows(rows)
    }

    fn triple(i: Inertia) -> (usize, usize, usize) {
        (i.n_plus, i.n_zero, i.n_minus)
    }

    #[test]
    fn examples() {
        assert_eq!(triple(inertia(&QMatrix::identity(2)).unwrap()), (2, 0, 0));
        assert_eq!(triple(inertia(&q(&[&[1, 0, 0], &[0, 0, 0], &[0, 0, -1]])).unwrap()), (1, 1, 1));
        assert_eq!(triple(inertia(&q(&[&[0, 1], &[1, 0]])).unwrap()), (1, 0, 1));
        assert_eq!(inertia(&q(&[&[0, 1], &[2, 0]])), Err(Error::NotSymmetric));
    }

    #[test]
    fn hermitian_zero_diagonal() {
        let i = Gaussian::i();
        let m = CMatrix::from_rows(vec![vec![Gaussian::zero(), i.clone()], vec![i.neg(), Gaussian::zero()]]);
        assert_eq!(triple(inertia(&m).unwrap()), (1, 0, 1));
    }

    fn sym(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-3i64..4, n * n).prop_map(move |v| {
            let m = QMatrix::from_vec(n, n, v.into_iter().map(Rational::from_int).collect());
            m.add(&m.transpose())
        })
    }

    fn invertible(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-2i64..3, n * n).prop_filter_map("singular", move |v| {
            let m = QMatrix::from_vec(n, n, v.into_iter().map(Rational::from_int).collect());
            (!crate::linalg::det(&m).is_zero()).then_some(m)
        })
    }

    proptest! {
        #[test]
        fn congruence_invariant(qm in sym(5), p in invertible(5)) {
            let a = inertia(&qm).unwrap();
            let b = inertia(&p.transpose().mul(&qm).mul(&p)).unwrap();
            prop_assert_eq!(a, b);
            prop_assert_eq!(a.n_plus + a.n_zero + a.n_minus, 5);
            prop_assert_eq!(a.n_zero, 5 - crate::linalg::rank(&qm));
        }

        #[test]
        fn diagonal_signs(d in proptest::collection::vec(-3i64..4, 6), p in invertible(6)) {
            let dm = QMatrix::diag(&d.iter().map(|&x| Rational::from_int(x)).collect::<Vec<_>>());
            let want = (d.iter().filter(|&&x| x > 0).count(), d.iter().filter(|&&x| x == 0).count(), d.iter().filter(|&&x| x < 0).count());
            prop_assert_eq!(triple(inertia(&p.transpose().mul(&dm).mul(&p)).unwrap()), want);
        }
    }
}
