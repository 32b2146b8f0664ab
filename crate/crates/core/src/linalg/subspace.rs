use crate::field::Field;
use crate::matrix::Matrix;

use super::{kernel, rref};

/// A linear subspace of `F^n`, stored as the nonzero rows of its reduced
/// echelon basis. Equal subspaces have identical representations.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Subspace<F> {
    ambient: usize,
    basis: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> Subspace<F> {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self::span(ambient, Matrix::<F>::identity(ambient).row_vecs())
    }

    pub fn span(ambient: usize, vectors: Vec<Vec<F>>) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length != ambient dimension");
        let m = Matrix::from_vec(vectors.len(), ambient, vectors.into_iter().flatten().collect());
        let (r, pivots) = rref(&m);
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<F>] {
        &self.basis
    }

    /// Reduce `v` against the echelon basis; zero iff `v` is in the span.
    pub fn residue(&self, v: &[F]) -> Vec<F> {
        let mut w = v.to_vec();
        for (row, &p) in self.basis.iter().zip(&self.pivots) {
            if w[p].is_zero() {
                continue;
            }
            let f = w[p].clone();
            for (x, b) in w.iter_mut().zip(row) {
                if !b.is_zero() {
                    *x = x.sub(&f.mul(b));
                }
            }
        }
        w
    }

    pub fn contains(&self, v: &[F]) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.residue(v).iter().all(F::is_zero)
    }

    pub fn contains_space(&self, o: &Self) -> bool {
        o.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, o: &Self) -> Self {
        let mut v = self.basis.clone();
        v.extend(o.basis.iter().cloned());
        Self::span(self.ambient, v)
    }

    pub fn with(&self, v: &[F]) -> Self {
        let mut b = self.basis.clone();
        b.push(v.to_vec());
        Self::span(self.ambient, b)
    }

    /// `{w : Σ w_k v_k = 0 for all v in self}` (bilinear, no conjugation).
    pub fn annihilator(&self) -> Self {
        if self.basis.is_empty() {
            return Self::full(self.ambient);
        }
        let m = Matrix::from_vec(self.dim(), self.ambient, self.basis.concat());
        Self::span(self.ambient, kernel(&m))
    }

    pub fn intersect(&self, o: &Self) -> Self {
        self.annihilator().sum(&o.annihilator()).annihilator()
    }

    /// Vectors of `self` not reducible by `base`, extending a basis of
    /// `base ∩ self` to one of `self`.
    pub fn complement_in(&self, base: &Self) -> Vec<Vec<F>> {
        let mut acc = base.intersect(self);
        let mut out = Vec::new();
        for v in &self.basis {
            if !acc.contains(v) {
                acc = acc.with(v);
                out.push(v.clone());
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::Rational;

    fn v(x: &[i64]) -> Vec<Rational> {
        x.iter().map(|&a| Rational::from_int(a)).collect()
    }

    #[test]
    fn intersection_of_planes_is_line() {
        let a = Subspace::span(3, vec![v(&[1, 0, 0]), v(&[0, 1, 0])]);
        let b = Subspace::span(3, vec![v(&[0, 1, 0]), v(&[0, 0, 1])]);
        let c = a.intersect(&b);
        assert_eq!(c, Subspace::span(3, vec![v(&[0, 5, 0])]));
        assert_eq!(a.sum(&b).dim(), 3);
        assert_eq!(a.complement_in(&c).len(), 1);
    }

    #[test]
    fn representation_is_canonical() {
        let a = Subspace::span(3, vec![v(&[1, 2, 3]), v(&[2, 4, 7])]);
        let b = Subspace::span(3, vec![v(&[0, 0, 1]), v(&[3, 6, 0])]);
        assert_eq!(a, b);
    }
}
