//! Exact elimination, subspaces, exterior powers and the unipotent toolkit.

mod inertia;
mod poly;
mod subspace;
mod unipotent;

pub use inertia::{inertia, Inertia};
pub use poly::{char_poly, cyclotomic, euler_phi, Poly};
pub use subspace::Subspace;
pub use unipotent::{
    exp_nilpotent, is_unipotent, jordan_profile_unipotent, nilpotency_index, quasi_unipotent_order,
    unipotent_log,
};

use crate::field::Field;
use crate::matrix::Matrix;

/// Reduced row echelon form and the pivot column of each nonzero row.
pub fn rref<F: Field>(m: &Matrix<F>) -> (Matrix<F>, Vec<usize>) {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a: Vec<Vec<F>> = m.row_vecs();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let inv = a[r][c].inv();
        if !inv.is_one() {
            for x in a[r][c..].iter_mut() {
                *x = x.mul(&inv);
            }
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (Matrix::from_vec(rows, cols, a.into_iter().flatten().collect()), pivots)
}

pub fn rank<F: Field>(m: &Matrix<F>) -> usize {
    rref(m).1.len()
}

/// Basis of the right null space `{x : m·x = 0}`, one vector per free column
/// in increasing order, normalized to 1 at that column.
pub fn kernel<F: Field>(m: &Matrix<F>) -> Vec<Vec<F>> {
    let (r, pivots) = rref(m);
    let cols = m.cols();
    let mut is_pivot = vec![false; cols];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    (0..cols)
        .filter(|&f| !is_pivot[f])
        .map(|f| {
            let mut v = vec![F::zero(); cols];
            v[f] = F::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[p] = r[(i, f)].neg();
            }
            v
        })
        .collect()
}

/// Some `x` with `a·x = b`, or `None` if the system is inconsistent.
pub fn solve<F: Field>(a: &Matrix<F>, b: &[F]) -> Option<Vec<F>> {
    assert_eq!(a.rows(), b.len());
    let aug = a.hstack(&Matrix::column(b));
    let (r, pivots) = rref(&aug);
    if pivots.last() == Some(&a.cols()) {
        return None;
    }
    let mut x = vec![F::zero(); a.cols()];
    for (i, &p) in pivots.iter().enumerate() {
        x[p] = r[(i, a.cols())].clone();
    }
    Some(x)
}

pub fn inverse<F: Field>(m: &Matrix<F>) -> Option<Matrix<F>> {
    if !m.is_square() {
        return None;
    }
    let n = m.rows();
    let (r, pivots) = rref(&m.hstack(&Matrix::identity(n)));
    if pivots.len() < n || pivots[n - 1] != n - 1 {
        return None;
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let rows: Vec<usize> = (0..n).collect();
    Some(r.submatrix(&rows, &cols))
}

pub fn det<F: Field>(m: &Matrix<F>) -> F {
    assert!(m.is_square(), "determinant of non-square matrix");
    let n = m.rows();
    match n {
        0 => return F::one(),
        1 => return m[(0, 0)].clone(),
        2 => return m[(0, 0)].mul(&m[(1, 1)]).sub(&m[(0, 1)].mul(&m[(1, 0)])),
        _ => {}
    }
    let mut a = m.row_vecs();
    let mut acc = F::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return F::zero() };
        if p != c {
            a.swap(p, c);
            acc = acc.neg();
        }
        acc = acc.mul(&a[c][c]);
        let inv = a[c][c].inv();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv);
            for j in c + 1..n {
                if !a[c][j].is_zero() {
                    let t = f.mul(&a[c][j]);
                    a[i][j] = a[i][j].sub(&t);
                }
            }
        }
    }
    acc
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), &mut out);
    }
    out
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `p`-th compound matrix: entry `(I, K)` is the minor `det A[I, K]`, with
/// subsets in lexicographic order. This is the matrix of `∧^p A`.
pub fn compound<F: Field>(a: &Matrix<F>, p: usize) -> Matrix<F> {
    let rs = subsets(a.rows(), p);
    let cs = subsets(a.cols(), p);
    Matrix::from_fn(rs.len(), cs.len(), |i, j| det(&a.submatrix(&rs[i], &cs[j])))
}

/// Kronecker product.
pub fn kron<F: Field>(a: &Matrix<F>, b: &Matrix<F>) -> Matrix<F> {
    let (br, bc) = (b.rows(), b.cols());
    Matrix::from_fn(a.rows() * br, a.cols() * bc, |r, c| {
        let x = &a[(r / br, c / bc)];
        if x.is_zero() {
            F::zero()
        } else {
            x.mul(&b[(r % br, c % bc)])
        }
    })
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

    // cofactor expansion, independent of elimination
    fn det_cofactor(m: &QMatrix) -> Rational {
        let n = m.rows();
        if n == 0 {
            return Rational::ONE;
        }
        let mut acc = Rational::ZERO;
        for c in 0..n {
            let rows: Vec<usize> = (1..n).collect();
            let cols: Vec<usize> = (0..n).filter(|&j| j != c).collect();
            let t = &m[(0, c)] * &det_cofactor(&m.submatrix(&rows, &cols));
            if c % 2 == 0 { acc += t } else { acc -= &t }
        }
        acc
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&QMatrix::identity(3)), 3);
        assert_eq!(rank(&QMatrix::unit(3, 3, 0, 1)), 1);
        let blk = q(&[&[0, -1], &[1, 0]]);
        let j = blk.direct_sum(&blk).to_gaussian();
        let shifted = j.sub(&CMatrix::identity(4).scale(&Gaussian::i()));
        assert_eq!(rank(&shifted), 2);
    }

    #[test]
    fn compound_of_product_is_product_of_compounds() {
        let a = q(&[&[1, 2, 0, 1], &[0, 1, 3, 0], &[2, 0, 1, 1], &[1, 1, 1, 2]]);
        let b = q(&[&[2, 0, 1, 0], &[1, 1, 0, 0], &[0, 3, 1, 1], &[1, 0, 0, 1]]);
        for p in 0..=4 {
            assert_eq!(compound(&a.mul(&b), p), compound(&a, p).mul(&compound(&b, p)));
        }
        assert_eq!(compound(&a, 4)[(0, 0)], det(&a));
    }

    #[test]
    fn subsets_count() {
        for n in 0..7 {
            for k in 0..=n {
                assert_eq!(subsets(n, k).len(), binomial(n, k));
            }
        }
    }

    fn small_matrix(n: usize) -> impl Strategy<Value = QMatrix> {
        proptest::collection::vec(-4i64..5, n * n)
            .prop_map(move |v| QMatrix::from_vec(n, n, v.into_iter().map(Rational::from_int).collect()))
    }

    proptest! {
        #[test]
        fn det_matches_cofactor(m in small_matrix(4)) {
            prop_assert_eq!(det(&m), det_cofactor(&m));
        }

        #[test]
        fn kernel_vectors_are_annihilated(m in proptest::collection::vec(-3i64..4, 12)) {
            let a = QMatrix::from_vec(3, 4, m.into_iter().map(Rational::from_int).collect());
            let k = kernel(&a);
            prop_assert_eq!(k.len() + rank(&a), 4);
            for v in &k {
                prop_assert!(a.mul_vec(v).iter().all(Rational::is_zero));
            }
        }

        #[test]
        fn rank_is_basis_independent(m in small_matrix(3), p in small_matrix(3), r in small_matrix(3)) {
            if let (Some(_), Some(_)) = (inverse(&p), inverse(&r)) {
                prop_assert_eq!(rank(&p.mul(&m).mul(&r)), rank(&m));
            }
        }

        #[test]
        fn inverse_is_two_sided(m in small_matrix(4)) {
            match inverse(&m) {
                Some(inv) => {
                    prop_assert!(m.mul(&inv).is_identity());
                    prop_assert!(inv.mul(&m).is_identity());
                }
                None => prop_assert!(det(&m).is_zero()),
            }
        }

        #[test]
        fn solve_finds_solutions(m in small_matrix(3), x in proptest::collection::vec(-5i64..6, 3)) {
            let x: Vec<Rational> = x.into_iter().map(Rational::from_int).collect();
            let b = m.mul_vec(&x);
            let y = solve(&m, &b).expect("consistent by construction");
            prop_assert_eq!(m.mul_vec(&y), b);
        }
    }
}
