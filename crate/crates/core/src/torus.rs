//! Complex tori `ℂ^n / Λ` in lattice coordinates and their Dolbeault
//! cohomology `H^{p,q} = ∧^p V^{1,0*} ⊗ ∧^q V^{0,1*}`.
//!
//! Conventions:
//! - the lattice is `ℤ^{2n}`; an automorphism `g` moves points by `M`, so it
//!   pulls 1-forms back by `M^T`;
//! - `H^{1,0}` is spanned by the forms `φ` with `φ∘J = iφ`, taken as the
//!   reduced echelon basis `φ_1, …, φ_n` of that eigenspace of `J^T`;
//! - `H^{p,q}` has basis `φ_I ∧ φ̄_J`, `I` a `p`-subset and `J` a `q`-subset,
//!   both lexicographic, `I` major;
//! - a Hermitian matrix `H` stands for the real (1,1)-class `i Σ H_kl φ_k ∧ φ̄_l`;
//! - top-degree classes are evaluated so that `∫ ω_I^n = 1` for `ω_I` the class
//!   of the identity matrix.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::field::{Field, Gaussian};
use crate::linalg::{binomial, det, inertia, inverse, kron, rank, subsets, Inertia, Subspace};
use crate::matrix::{CMatrix, QMatrix};
use crate::rational::Rational;

/// Subset bookkeeping for `∧^• ℂ^n`, as bitmasks in lexicographic order.
#[derive(Debug)]
pub struct Exterior {
    pub n: usize,
    masks: Vec<Vec<u32>>,
    index: Vec<usize>,
}

impl Exterior {
    fn build(n: usize) -> Self {
        let mut masks = Vec::with_capacity(n + 1);
        let mut index = vec![0; 1 << n];
        for p in 0..=n {
            let ms: Vec<u32> = subsets(n, p).iter().map(|s| s.iter().fold(0u32, |m, &i| m | (1 << i))).collect();
            for (k, &m) in ms.iter().enumerate() {
                index[m as usize] = k;
            }
            masks.push(ms);
        }
        Exterior { n, masks, index }
    }

    pub fn get(n: usize) -> Arc<Exterior> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Exterior>>>> = OnceLock::new();
        assert!(n <= 16, "torus dimension {n} too large");
        let mut map = CACHE.get_or_init(Default::default).lock().unwrap();
        map.entry(n).or_insert_with(|| Arc::new(Exterior::build(n))).clone()
    }

    pub fn masks(&self, p: usize) -> &[u32] {
        self.masks.get(p).map_or(&[], Vec::as_slice)
    }

    pub fn index_of(&self, mask: u32) -> usize {
        self.index[mask as usize]
    }
}

/// `(−1)^{#{(a,b) : a ∈ A, b ∈ B, a > b}}`, the sign sorting `e_A ∧ e_B`.
fn merge_sign(a: u32, b: u32) -> i32 {
    let mut inv = 0;
    let mut bb = b;
    while bb != 0 {
        let k = bb.trailing_zeros();
        inv += (a >> (k + 1)).count_ones();
        bb &= bb - 1;
    }
    if inv % 2 == 0 { 1 } else { -1 }
}

/// An element of `H^{p,q}` in the basis `φ_I ∧ φ̄_J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HodgeClass {
    pub n: usize,
    pub p: usize,
    pub q: usize,
    pub coords: Vec<Gaussian>,
}

impl HodgeClass {
    pub fn zero(n: usize, p: usize, q: usize) -> Self {
        HodgeClass { n, p, q, coords: vec![Gaussian::zero(); binomial(n, p) * binomial(n, q)] }
    }

    /// The unit class `1 ∈ H^{0,0}`.
    pub fn unit(n: usize) -> Self {
        HodgeClass { n, p: 0, q: 0, coords: vec![Gaussian::one()] }
    }

    pub fn basis_element(n: usize, p: usize, q: usize, idx: usize) -> Self {
        let mut c = Self::zero(n, p, q);
        c.coords[idx] = Gaussian::one();
        c
    }

    pub fn dim(n: usize, p: usize, q: usize) -> usize {
        binomial(n, p) * binomial(n, q)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Gaussian::is_zero)
    }

    fn same_space(&self, o: &Self) {
        assert_eq!((self.n, self.p, self.q), (o.n, o.p, o.q), "classes live in different H^{{p,q}}");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.same_space(o);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a.add(b)).collect();
        HodgeClass { coords, ..*self }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.same_space(o);
        let coords = self.coords.iter().zip(&o.coords).map(|(a, b)| a.sub(b)).collect();
        HodgeClass { coords, ..*self }
    }

    pub fn scale(&self, s: &Gaussian) -> Self {
        HodgeClass { coords: self.coords.iter().map(|a| a.mul(s)).collect(), ..*self }
    }

    pub fn scale_q(&self, s: &Rational) -> Self {
        HodgeClass { coords: self.coords.iter().map(|a| a.scale(s)).collect(), ..*self }
    }

    /// Apply a matrix acting on this `H^{p,q}` (e.g. from `action_on_hpq`).
    pub fn apply(&self, m: &CMatrix) -> Self {
        HodgeClass { coords: m.mul_vec(&self.coords), ..*self }
    }

    /// Complex conjugate, as a class in `H^{q,p}`.
    pub fn conjugate(&self) -> Self {
        let ext = Exterior::get(self.n);
        let mut out = Self::zero(self.n, self.q, self.p);
        let nq = binomial(self.n, self.q);
        let np = binomial(self.n, self.p);
        let sign = if (self.p * self.q) % 2 == 0 { 1 } else { -1 };
        for (a, &mi) in ext.masks(self.p).iter().enumerate() {
            for (b, &mj) in ext.masks(self.q).iter().enumerate() {
                let c = &self.coords[a * nq + b];
                if c.is_zero() {
                    continue;
                }
                let t = ext.index_of(mj) * np + ext.index_of(mi);
                let v = c.conj();
                out.coords[t] = if sign > 0 { v } else { v.neg() };
            }
        }
        out
    }

    /// Fixed by conjugation (only meaningful for `p = q`).
    pub fn is_real(&self) -> bool {
        self.p == self.q && self.conjugate() == *self
    }
}

/// Wedge product; zero (in an empty space) when the degree exceeds `(n, n)`.
pub fn cup(a: &HodgeClass, b: &HodgeClass) -> HodgeClass {
    assert_eq!(a.n, b.n, "cup of classes on different tori");
    let n = a.n;
    let (p, q) = (a.p + b.p, a.q + b.q);
    let mut out = HodgeClass::zero(n, p, q);
    if p > n || q > n {
        return out;
    }
    let ext = Exterior::get(n);
    let (aq, bq, oq) = (binomial(n, a.q), binomial(n, b.q), binomial(n, q));
    // φ_I φ̄_J ∧ φ_K φ̄_L = (−1)^{|J||K|} φ_I φ_K φ̄_J φ̄_L
    let base_sign = if (a.q * b.p) % 2 == 0 { 1 } else { -1 };
    let am = (ext.masks(a.p), ext.masks(a.q));
    let bm = (ext.masks(b.p), ext.masks(b.q));
    for (ia, ca) in a.coords.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        let (mi, mj) = (am.0[ia / aq], am.1[ia % aq]);
        for (ib, cb) in b.coords.iter().enumerate() {
            if cb.is_zero() {
                continue;
            }
            let (mk, ml) = (bm.0[ib / bq], bm.1[ib % bq]);
            if mi & mk != 0 || mj & ml != 0 {
                continue;
            }
            let s = base_sign * merge_sign(mi, mk) * merge_sign(mj, ml);
            let t = ext.index_of(mi | mk) * oq + ext.index_of(mj | ml);
            let v = ca.mul(cb);
            out.coords[t] = if s > 0 { out.coords[t].add(&v) } else { out.coords[t].sub(&v) };
        }
    }
    out
}

pub fn cup_all(classes: &[HodgeClass]) -> HodgeClass {
    let mut it = classes.iter();
    let first = it.next().expect("cup_all of an empty list").clone();
    it.fold(first, |acc, c| cup(&acc, c))
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

/// `∫` of a top-degree class, normalized so the identity Hermitian class has volume 1.
pub fn eval_top(c: &HodgeClass) -> Gaussian {
    assert_eq!((c.p, c.q), (c.n, c.n), "evaluation needs a class of degree (n,n)");
    let n = c.n;
    let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 0 { 1 } else { -1 };
    let norm = Gaussian::i_pow(n).scale(&Rational::from_int(factorial(n) * sign));
    c.coords[0].div(&norm)
}

/// `∫` of a class whose value is known to be real.
pub fn eval_top_real(c: &HodgeClass) -> Rational {
    let v = eval_top(c);
    assert!(v.im.is_zero(), "expected a real intersection number, got {v}");
    v.re
}

/// A real (1,1)-class as an `n × n` Hermitian matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermitianClass {
    pub h: CMatrix,
}

impl HermitianClass {
    pub fn new(h: CMatrix) -> Result<Self> {
        if !h.is_hermitian() {
            return Err(Error::NotSymmetric);
        }
        Ok(HermitianClass { h })
    }

    pub fn from_real(h: QMatrix) -> Result<Self> {
        Self::new(h.to_gaussian())
    }

    pub fn identity(n: usize) -> Self {
        HermitianClass { h: CMatrix::identity(n) }
    }

    pub fn n(&self) -> usize {
        self.h.rows()
    }

    pub fn add(&self, o: &Self) -> Self {
        HermitianClass { h: self.h.add(&o.h) }
    }

    pub fn sub(&self, o: &Self) -> Self {
        HermitianClass { h: self.h.sub(&o.h) }
    }

    pub fn scale(&self, s: &Rational) -> Self {
        HermitianClass { h: self.h.map(|x| x.scale(s)) }
    }

    pub fn to_hodge(&self) -> HodgeClass {
        let n = self.n();
        let i = Gaussian::i();
        HodgeClass { n, p: 1, q: 1, coords: self.h.entries().iter().map(|x| x.mul(&i)).collect() }
    }

    /// Inverse of [`to_hodge`](Self::to_hodge); fails on non-real classes.
    pub fn from_hodge(c: &HodgeClass) -> Result<Self> {
        assert_eq!((c.p, c.q), (1, 1));
        let mi = Gaussian::i().neg();
        Self::new(CMatrix::from_vec(c.n, c.n, c.coords.iter().map(|x| x.mul(&mi)).collect()))
    }

    /// Coordinates in [`real_basis_11`].
    pub fn real_coords(&self) -> Vec<Rational> {
        let n = self.n();
        let mut out = Vec::with_capacity(n * n);
        for k in 0..n {
            out.push(self.h[(k, k)].re.clone());
            for l in k + 1..n {
                out.push(self.h[(k, l)].re.clone());
                out.push(self.h[(k, l)].im.clone());
            }
        }
        out
    }

    pub fn from_real_coords(n: usize, v: &[Rational]) -> Self {
        assert_eq!(v.len(), n * n);
        let basis = real_basis_11(n);
        let mut h = CMatrix::zeros(n, n);
        for (b, c) in basis.iter().zip(v) {
            if !c.is_zero() {
                h = h.add(&b.h.map(|x| x.scale(c)));
            }
        }
        HermitianClass { h }
    }

    pub fn inertia(&self) -> Inertia {
        inertia(&self.h).expect("Hermitian by construction")
    }
}

/// Real basis of `H^{1,1}(ℝ)` as Hermitian matrices: for each `k`, `E_kk`
/// followed by `E_kl + E_lk` and `i(E_kl − E_lk)` for `l > k`.
pub fn real_basis_11(n: usize) -> Vec<HermitianClass> {
    let mut out = Vec::with_capacity(n * n);
    for k in 0..n {
        out.push(HermitianClass { h: CMatrix::unit(n, n, k, k) });
        for l in k + 1..n {
            let s = CMatrix::unit(n, n, k, l).add(&CMatrix::unit(n, n, l, k));
            let a = CMatrix::unit(n, n, k, l).sub(&CMatrix::unit(n, n, l, k)).scale(&Gaussian::i());
            out.push(HermitianClass { h: s });
            out.push(HermitianClass { h: a });
        }
    }
    out
}

/// Real basis of `H^{p,p}(ℝ)`: `i^p e_{II}`, and for `I < J` both
/// `i^p(e_{IJ} + e_{JI})` and `i^{p+1}(e_{IJ} − e_{JI})`.
pub fn real_basis_pp(n: usize, p: usize) -> Vec<HodgeClass> {
    let m = binomial(n, p);
    let ip = Gaussian::i_pow(p);
    let ip1 = Gaussian::i_pow(p + 1);
    let mut out = Vec::with_capacity(m * m);
    for a in 0..m {
        let mut c = HodgeClass::zero(n, p, p);
        c.coords[a * m + a] = ip.clone();
        out.push(c);
        for b in a + 1..m {
            let mut s = HodgeClass::zero(n, p, p);
            s.coords[a * m + b] = ip.clone();
            s.coords[b * m + a] = ip.clone();
            out.push(s);
            let mut d = HodgeClass::zero(n, p, p);
            d.coords[a * m + b] = ip1.clone();
            d.coords[b * m + a] = ip1.neg();
            out.push(d);
        }
    }
    out
}

/// Basis of the span of all `k`-fold products of real (1,1)-classes, as
/// real classes in `H^{k,k}`. Cached per `(n, k)`.
pub fn product_span(n: usize, k: usize) -> Arc<Vec<HodgeClass>> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Vec<HodgeClass>>>>> = OnceLock::new();
    if let Some(v) = CACHE.get_or_init(Default::default).lock().unwrap().get(&(n, k)) {
        return v.clone();
    }
    let out = if k == 0 {
        vec![HodgeClass::unit(n)]
    } else {
        let prev = product_span(n, k - 1);
        let gens: Vec<HodgeClass> = real_basis_11(n).iter().map(HermitianClass::to_hodge).collect();
        let full = HodgeClass::dim(n, k, k);
        let mut span: Subspace<Gaussian> = Subspace::zero(full);
        let mut chosen = Vec::new();
        'outer: for s in prev.iter() {
            for g in &gens {
                let c = cup(s, g);
                if !span.contains(&c.coords) {
                    span = span.with(&c.coords);
                    chosen.push(c);
                    if span.dim() == full {
                        break 'outer;
                    }
                }
            }
        }
        chosen
    };
    let out = Arc::new(out);
    CACHE.get_or_init(Default::default).lock().unwrap().insert((n, k), out.clone());
    out
}

/// Symmetric multilinear intersection number of `n` real (1,1)-classes, by
/// polarizing the determinant.
pub fn intersection_number(classes: &[HermitianClass]) -> Result<Rational> {
    let n = classes.first().map_or(0, HermitianClass::n);
    if classes.len() != n || n == 0 {
        return Err(Error::WrongArity { expected: n, got: classes.len() });
    }
    let mut acc = Gaussian::zero();
    for s in 1u32..(1 << n) {
        let mut sum = CMatrix::zeros(n, n);
        for (i, c) in classes.iter().enumerate() {
            if s & (1 << i) != 0 {
                sum = sum.add(&c.h);
            }
        }
        let d = det(&sum);
        if (n as u32 - s.count_ones()) % 2 == 0 {
            acc = acc.add(&d);
        } else {
            acc = acc.sub(&d);
        }
    }
    let v = acc.scale(&Rational::new(1, factorial(n)));
    debug_assert!(v.im.is_zero());
    Ok(v.re)
}

/// Intersection number by wedging the classes and evaluating.
pub fn intersection_number_wedge(classes: &[HermitianClass]) -> Result<Rational> {
    let n = classes.first().map_or(0, HermitianClass::n);
    if classes.len() != n || n == 0 {
        return Err(Error::WrongArity { expected: n, got: classes.len() });
    }
    let hs: Vec<HodgeClass> = classes.iter().map(HermitianClass::to_hodge).collect();
    Ok(eval_top_real(&cup_all(&hs)))
}

pub fn is_nef(h: &HermitianClass) -> bool {
    h.inertia().n_minus == 0
}

pub fn is_kahler(h: &HermitianClass) -> bool {
    h.inertia().n_plus == h.n()
}

/// Positive definite spanning family of `H^{1,1}(ℝ)`: `I` and `I + v v†` for
/// `v ∈ {e_a, e_a + e_b, e_a + i e_b}`.
pub fn kahler_family(n: usize) -> Vec<HermitianClass> {
    let mut vs: Vec<Vec<Gaussian>> = Vec::new();
    for a in 0..n {
        let mut v = vec![Gaussian::zero(); n];
        v[a] = Gaussian::one();
        vs.push(v);
    }
    for a in 0..n {
        for b in a + 1..n {
            let mut v = vec![Gaussian::zero(); n];
            v[a] = Gaussian::one();
            v[b] = Gaussian::one();
            vs.push(v.clone());
            v[b] = Gaussian::i();
            vs.push(v);
        }
    }
    let mut out = vec![HermitianClass::identity(n)];
    for v in vs {
        let col = CMatrix::column(&v);
        out.push(HermitianClass { h: CMatrix::identity(n).add(&col.mul(&col.adjoint())) });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusModel {
    n: usize,
    j: QMatrix,
    /// `[φ | φ̄]`, columns are dual-coordinate vectors.
    p: CMatrix,
    p_inv: CMatrix,
}

impl TorusModel {
    pub fn new(j: QMatrix) -> Result<Self> {
        if !j.is_square() || j.rows() % 2 != 0 {
            return Err(Error::BadComplexStructure(format!("J is {}x{}, need 2n x 2n", j.rows(), j.cols())));
        }
        let n = j.rows() / 2;
        if !j.mul(&j).neg().is_identity() {
            return Err(Error::BadComplexStructure("J^2 != -I".into()));
        }
        let shifted = j.transpose().to_gaussian().sub(&CMatrix::identity(2 * n).scale(&Gaussian::i()));
        let eig = Subspace::span(2 * n, crate::linalg::kernel(&shifted));
        if eig.dim() != n {
            return Err(Error::BadComplexStructure(format!("+i eigenspace has dimension {} != {n}", eig.dim())));
        }
        let phi = CMatrix::from_rows(eig.basis().to_vec()).transpose();
        let p = phi.hstack(&phi.conj());
        let p_inv = inverse(&p).ok_or_else(|| Error::BadComplexStructure("V^{1,0} + V^{0,1} != V".into()))?;
        Ok(TorusModel { n, j, p, p_inv })
    }

    /// `n` copies of the square curve, `J = ⊕ [[0,−1],[1,0]]`.
    pub fn square(n: usize) -> Self {
        let blk = QMatrix::from_i64_rows(&[&[0, -1], &[1, 0]]);
        let mut j = QMatrix::zeros(0, 0);
        for _ in 0..n {
            j = j.direct_sum(&blk);
        }
        TorusModel::new(j).expect("square complex structure")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn j(&self) -> &QMatrix {
        &self.j
    }

    /// Change of basis `[φ | φ̄]` from the Hodge basis to dual lattice coordinates.
    pub fn hodge_basis_matrix(&self) -> &CMatrix {
        &self.p
    }

    /// Check the automorphism invariants for a lattice matrix.
    pub fn validate_automorphism(&self, m: &QMatrix) -> Result<()> {
        let inv = |s: &str| Error::Invariant { generator: None, invariant: s.into() };
        if m.rows() != 2 * self.n || !m.is_square() {
            return Err(inv("matrix size is 2n x 2n"));
        }
        if !m.is_integral() {
            return Err(inv("integer entries"));
        }
        if det(m).abs() != Rational::ONE {
            return Err(inv("determinant ±1"));
        }
        if m.mul(&self.j) != self.j.mul(m) {
            return Err(inv("MJ = JM"));
        }
        Ok(())
    }

    /// Matrix `A` of `g*` on `H^{1,0}`: `g*φ_k = Σ_j A_jk φ_j`.
    pub fn h10_action(&self, g: &TorusAutomorphism) -> Result<CMatrix> {
        let n = self.n;
        let full = self.p_inv.mul(&g.m.transpose().to_gaussian()).mul(&self.p);
        for r in 0..2 * n {
            for c in 0..2 * n {
                if (r < n) != (c < n) && !full[(r, c)].is_zero() {
                    return Err(Error::Invariant { generator: None, invariant: "MJ = JM".into() });
                }
            }
        }
        let idx: Vec<usize> = (0..n).collect();
        Ok(full.submatrix(&idx, &idx))
    }

    /// Matrix of `g*` on all of `H¹(ℂ)` in the basis `φ_1..φ_n, φ̄_1..φ̄_n`.
    pub fn h1_action(&self, g: &TorusAutomorphism) -> CMatrix {
        self.p_inv.mul(&g.m.transpose().to_gaussian()).mul(&self.p)
    }

    /// Matrix of `g*` on `H^{p,q}` in the basis `φ_I ∧ φ̄_J`.
    pub fn action_on_hpq(&self, g: &TorusAutomorphism, p: usize, q: usize) -> Result<CMatrix> {
        if p > self.n || q > self.n {
            return Err(Error::BadDegree { p, q, n: self.n });
        }
        let a = self.h10_action(g)?;
        Ok(hpq_from_h10(&a, p, q))
    }

    /// Matrix of `g*` on `H^{1,1}(ℝ)` in [`real_basis_11`] coordinates.
    pub fn action_on_h11_real(&self, g: &TorusAutomorphism) -> Result<QMatrix> {
        let a = self.h10_action(g)?;
        let n = self.n;
        let cols: Vec<Vec<Rational>> =
            real_basis_11(n).iter().map(|b| pullback_with(&a, b).real_coords()).collect();
        Ok(QMatrix::from_rows(cols).transpose())
    }

    pub fn pullback_hermitian(&self, g: &TorusAutomorphism, h: &HermitianClass) -> Result<HermitianClass> {
        Ok(pullback_with(&self.h10_action(g)?, h))
    }

    pub fn hodge_split(&self) -> (Vec<Vec<Gaussian>>, Vec<Vec<Gaussian>>) {
        let v10 = (0..self.n).map(|k| self.p.col(k)).collect();
        let v01 = (self.n..2 * self.n).map(|k| self.p.col(k)).collect();
        (v10, v01)
    }
}

/// `∧^p A ⊗ ∧^q Ā`.
pub fn hpq_from_h10(a: &CMatrix, p: usize, q: usize) -> CMatrix {
    kron(&crate::linalg::compound(a, p), &crate::linalg::compound(&a.conj(), q))
}

/// `A H A†`: the pullback of the class of `H` when `g*` acts on `H^{1,0}` by `A`.
pub fn pullback_with(a: &CMatrix, h: &HermitianClass) -> HermitianClass {
    HermitianClass { h: a.mul(&h.h).mul(&a.adjoint()) }
}

pub fn hodge_split(t: &TorusModel) -> (Vec<Vec<Gaussian>>, Vec<Vec<Gaussian>>) {
    t.hodge_split()
}

/// A holomorphic group automorphism of the torus, optionally composed with
/// a translation (which acts trivially on cohomology).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusAutomorphism {
    pub m: QMatrix,
    pub t: Option<Vec<Rational>>,
}

impl TorusAutomorphism {
    pub fn new(m: QMatrix) -> Self {
        TorusAutomorphism { m, t: None }
    }

    pub fn with_translation(m: QMatrix, t: Vec<Rational>) -> Self {
        assert_eq!(m.rows(), t.len());
        TorusAutomorphism { m, t: Some(t.iter().map(Rational::fract_mod1).collect()) }
    }

    pub fn identity(n: usize) -> Self {
        TorusAutomorphism::new(QMatrix::identity(2 * n))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        let m = self.m.mul(&other.m);
        let t = match (&self.t, &other.t) {
            (None, None) => None,
            (a, b) => {
                let k = self.m.rows();
                let zero = vec![Rational::ZERO; k];
                let tb = b.as_ref().unwrap_or(&zero);
                let ta = a.as_ref().unwrap_or(&zero);
                Some(self.m.mul_vec(tb).iter().zip(ta).map(|(x, y)| (x + y).fract_mod1()).collect())
            }
        };
        TorusAutomorphism { m, t }
    }

    pub fn pow(&self, k: u64) -> Self {
        let mut acc = TorusAutomorphism { m: QMatrix::identity(self.m.rows()), t: self.t.as_ref().map(|t| vec![Rational::ZERO; t.len()]) };
        for _ in 0..k {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn is_unipotent(&self) -> bool {
        crate::linalg::is_unipotent(&self.m)
    }
}

/// Rank of `c ↦ c·ω^{n−2}` from `H^{1,1}` to `H^{n−1,n−1}`; equals `n²`
/// when `ω` is Kähler.
pub fn lefschetz_rank(omega: &HermitianClass) -> usize {
    let n = omega.n();
    assert!(n >= 2);
    let w = omega.to_hodge();
    let pw = (2..n).fold(HodgeClass::unit(n), |acc, _| cup(&acc, &w));
    let cols: Vec<Vec<Gaussian>> = (0..n * n).map(|k| cup(&HodgeClass::basis_element(n, 1, 1, k), &pw).coords).collect();
    rank(&CMatrix::from_rows(cols))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64) -> Rational {
        Rational::from_int(a)
    }

    #[test]
    fn split_of_square_curve() {
        let t = TorusModel::square(1);
        let (v10, v01) = t.hodge_split();
        assert_eq!(v10, vec![vec![Gaussian::one(), Gaussian::i()]]);
        assert_eq!(v01, vec![vec![Gaussian::one(), Gaussian::i().neg()]]);
        let t2 = TorusModel::square(2);
        let (v10, _) = t2.hodge_split();
        let z = Gaussian::zero();
        assert_eq!(v10[1], vec![z.clone(), z, Gaussian::one(), Gaussian::i()]);
    }

    #[test]
    fn bad_structures_are_rejected() {
        assert!(matches!(TorusModel::new(QMatrix::identity(2)), Err(Error::BadComplexStructure(_))));
        let w = QMatrix::from_i64_rows(&[&[0, -1], &[1, -1]]);
        assert!(matches!(TorusModel::new(w), Err(Error::BadComplexStructure(_))));
    }

    #[test]
    fn unit_class_has_volume_one() {
        for n in 1..=4 {
            let i = HermitianClass::identity(n);
            let v = vec![i; n];
            assert_eq!(intersection_number(&v).unwrap(), r(1));
            assert_eq!(intersection_number_wedge(&v).unwrap(), r(1));
        }
    }

    #[test]
    fn polarization_in_dimension_two() {
        let h = HermitianClass::from_real(QMatrix::from_i64_rows(&[&[2, 1], &[1, 3]])).unwrap();
        let k = HermitianClass::from_real(QMatrix::from_i64_rows(&[&[1, 0], &[0, 4]])).unwrap();
        let want = (det(&h.h.add(&k.h)).sub(&det(&h.h)).sub(&det(&k.h))).re / r(2);
        assert_eq!(intersection_number(&[h.clone(), k.clone()]).unwrap(), want);
        assert_eq!(intersection_number_wedge(&[h, k]).unwrap(), want);
    }

    #[test]
    fn nef_and_kahler() {
        assert!(is_kahler(&HermitianClass::identity(3)));
        let d = HermitianClass::from_real(QMatrix::diag(&[r(1), r(-1)])).unwrap();
        assert!(!is_nef(&d) && !is_kahler(&d));
        let v = CMatrix::column(&[Gaussian::one(), Gaussian::i(), Gaussian::one()]);
        let rk1 = HermitianClass::new(v.mul(&v.adjoint())).unwrap();
        assert!(is_nef(&rk1) && !is_kahler(&rk1));
        let i = rk1.inertia();
        assert_eq!((i.n_plus, i.n_zero, i.n_minus), (1, 2, 0));
    }

    #[test]
    fn real_bases_are_real_and_independent() {
        for n in 1..=3 {
            for p in 0..=n {
                let b = real_basis_pp(n, p);
                assert_eq!(b.len(), HodgeClass::dim(n, p, p));
                assert!(b.iter().all(HodgeClass::is_real));
                let m = CMatrix::from_rows(b.iter().map(|c| c.coords.clone()).collect());
                assert_eq!(rank(&m), b.len());
            }
            let b11: Vec<HodgeClass> = real_basis_11(n).iter().map(HermitianClass::to_hodge).collect();
            assert!(b11.iter().all(HodgeClass::is_real));
        }
    }

    #[test]
    fn products_span_everything() {
        for n in 1..=4 {
            for k in 0..=n {
                assert_eq!(product_span(n, k).len(), binomial(n, k).pow(2));
            }
        }
    }

    #[test]
    fn degree_overflow_is_zero() {
        let a = HodgeClass::basis_element(2, 2, 0, 0);
        let b = HodgeClass::basis_element(2, 1, 0, 0);
        let c = cup(&a, &b);
        assert!(c.is_zero() && c.coords.is_empty());
    }

    #[test]
    fn kahler_family_spans_and_is_positive() {
        for n in 1..=4 {
            let fam = kahler_family(n);
            assert!(fam.iter().all(is_kahler));
            let m = QMatrix::from_rows(fam.iter().map(HermitianClass::real_coords).collect());
            assert_eq!(rank(&m), n * n);
        }
    }

    #[test]
    fn real_coords_round_trip() {
        let h = HermitianClass::new(CMatrix::from_rows(vec![
            vec![Gaussian::real(r(2)), Gaussian::new(r(1), r(-3))],
            vec![Gaussian::new(r(1), r(3)), Gaussian::real(r(-5))],
        ]))
        .unwrap();
        assert_eq!(HermitianClass::from_real_coords(2, &h.real_coords()), h);
        assert_eq!(HermitianClass::from_hodge(&h.to_hodge()).unwrap(), h);
    }

    #[test]
    fn lefschetz_is_injective_for_kahler() {
        for n in 2..=4 {
            assert_eq!(lefschetz_rank(&HermitianClass::identity(n)), n * n);
        }
        let v = CMatrix::column(&[Gaussian::one(), Gaussian::zero(), Gaussian::zero()]);
        let rk1 = HermitianClass::new(v.mul(&v.adjoint())).unwrap();
        assert!(lefschetz_rank(&rk1) < 9);
    }
}
