//! Finitely generated unipotent matrix and affine groups.
//!
//! Nilpotency class and derived length are read off the Lie algebra spanned
//! by brackets of generator logarithms; `lcs_oracle` checks the same numbers
//! by brute-force commutator enumeration in the group itself.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{inverse, is_unipotent, unipotent_log, Subspace};
use crate::matrix::QMatrix;
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixGroup {
    dim: usize,
    generators: Vec<QMatrix>,
}

impl MatrixGroup {
    /// Generators must be square, of size `dim`, and invertible.
    pub fn new(dim: usize, generators: Vec<QMatrix>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(Error::Invariant { generator: Some(i), invariant: format!("square of size {dim}") });
            }
            if crate::linalg::det(g).is_zero() {
                return Err(Error::Invariant { generator: Some(i), invariant: "invertible".into() });
            }
        }
        Ok(MatrixGroup { dim, generators })
    }

    /// As [`new`](Self::new), additionally requiring integer entries and determinant ±1.
    pub fn new_integral(dim: usize, generators: Vec<QMatrix>) -> Result<Self> {
        let g = Self::new(dim, generators)?;
        for (i, m) in g.generators.iter().enumerate() {
            if !m.is_integral() {
                return Err(Error::Invariant { generator: Some(i), invariant: "integer entries".into() });
            }
            if crate::linalg::det(m).abs() != Rational::ONE {
                return Err(Error::Invariant { generator: Some(i), invariant: "determinant ±1".into() });
            }
        }
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[QMatrix] {
        &self.generators
    }

    pub fn is_unipotent(&self) -> bool {
        self.generators.iter().all(is_unipotent)
    }

    fn check_unipotent(&self) -> Result<()> {
        match self.generators.iter().position(|g| !is_unipotent(g)) {
            Some(i) => Err(Error::NotUnipotent(Some(format!("generator {i}")))),
            None => Ok(()),
        }
    }
}

/// A nilpotent matrix Lie algebra, stored as an echelon basis of flattened
/// matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebra {
    dim: usize,
    span: Subspace<Rational>,
}

fn flatten(m: &QMatrix) -> Vec<Rational> {
    m.entries().to_vec()
}

fn unflatten(dim: usize, v: &[Rational]) -> QMatrix {
    QMatrix::from_vec(dim, dim, v.to_vec())
}

impl LieAlgebra {
    pub fn ambient_dim(&self) -> usize {
        self.dim
    }

    pub fn dimension(&self) -> usize {
        self.span.dim()
    }

    pub fn basis(&self) -> Vec<QMatrix> {
        self.span.basis().iter().map(|v| unflatten(self.dim, v)).collect()
    }

    pub fn contains(&self, x: &QMatrix) -> bool {
        self.span.contains(&flatten(x))
    }

    fn bracket_span(&self, a: &Subspace<Rational>, b: &Subspace<Rational>) -> Subspace<Rational> {
        let mut out = Subspace::zero(self.dim * self.dim);
        for x in a.basis() {
            let x = unflatten(self.dim, x);
            for y in b.basis() {
                let z = flatten(&x.bracket(&unflatten(self.dim, y)));
                if !out.contains(&z) {
                    out = out.with(&z);
                }
            }
        }
        out
    }

    /// Dimensions of `Γ_0 = L ⊋ Γ_1 = [L, Γ_0] ⊋ … ⊋ 0`.
    pub fn lower_central_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.span.dim()];
        let mut cur = self.span.clone();
        while cur.dim() > 0 {
            let next = self.bracket_span(&self.span, &cur);
            assert!(next.dim() < cur.dim(), "lower central series stalled: algebra is not nilpotent");
            cur = next;
            dims.push(cur.dim());
        }
        dims
    }

    /// Dimensions of `L^(0) = L ⊋ L^(1) = [L^(0), L^(0)] ⊋ … ⊋ 0`.
    pub fn derived_dims(&self) -> Vec<usize> {
        let mut dims = vec![self.span.dim()];
        let mut cur = self.span.clone();
        while cur.dim() > 0 {
            let next = self.bracket_span(&cur, &cur);
            assert!(next.dim() < cur.dim(), "derived series stalled: algebra is not solvable");
            cur = next;
            dims.push(cur.dim());
        }
        dims
    }

    /// Least `p` with `Γ_p = 0`.
    pub fn class(&self) -> usize {
        self.lower_central_dims().len() - 1
    }

    /// Least `p` with `L^(p) = 0`.
    pub fn derived_length(&self) -> usize {
        self.derived_dims().len() - 1
    }
}

/// Smallest bracket-closed subspace containing the generator logarithms.
pub fn lie_closure(g: &MatrixGroup) -> Result<LieAlgebra> {
    g.check_unipotent()?;
    let dim = g.dim;
    let logs: Vec<QMatrix> = g.generators.iter().map(unipotent_log).collect::<Result<_>>()?;
    let mut span = Subspace::zero(dim * dim);
    let mut frontier = Vec::new();
    for x in &logs {
        let v = flatten(x);
        if !span.contains(&v) {
            span = span.with(&v);
            frontier.push(x.clone());
        }
    }
    // right-normed brackets [s1,[s2,…]] of generators span the closure
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for x in &frontier {
            for s in &logs {
                let y = s.bracket(x);
                let v = flatten(&y);
                if !span.contains(&v) {
                    span = span.with(&v);
                    next.push(y);
                }
            }
        }
        frontier = next;
    }
    Ok(LieAlgebra { dim, span })
}

pub fn nilpotency_class(g: &MatrixGroup) -> Result<usize> {
    Ok(lie_closure(g)?.class())
}

pub fn derived_length(g: &MatrixGroup) -> Result<usize> {
    Ok(lie_closure(g)?.derived_length())
}

/// `⌊log₂ c⌋ + 1`, the derived-length ceiling for a nilpotent group of class `c ≥ 1`.
pub fn derived_length_bound(class: usize) -> usize {
    assert!(class >= 1);
    (usize::BITS - 1 - class.leading_zeros()) as usize + 1
}

/// Group elements the commutator oracle can work with.
pub trait GroupElement: Clone + Send + Sync {
    fn compose(&self, o: &Self) -> Self;
    fn inverse(&self) -> Self;
    fn is_identity(&self) -> bool;

    /// `[a, b] = a b a⁻¹ b⁻¹`.
    fn commutator(&self, o: &Self) -> Self {
        self.compose(o).compose(&self.inverse()).compose(&o.inverse())
    }
}

impl GroupElement for QMatrix {
    fn compose(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn inverse(&self) -> Self {
        inverse(self).expect("group element is invertible")
    }
    fn is_identity(&self) -> bool {
        QMatrix::is_identity(self)
    }
}

/// Index tuple of a nontrivial left-normed commutator `[g_{i1}, …, g_{iw}]`,
/// or `None` if all of them are the identity.
pub fn find_nontrivial_commutator<E: GroupElement>(gens: &[E], weight: usize) -> Option<Vec<usize>> {
    assert!(weight >= 1);
    fn dfs<E: GroupElement>(gens: &[E], prefix: &E, path: &mut Vec<usize>, weight: usize) -> bool {
        if prefix.is_identity() {
            return false;
        }
        if path.len() == weight {
            return true;
        }
        for (j, g) in gens.iter().enumerate() {
            path.push(j);
            if dfs(gens, &prefix.commutator(g), path, weight) {
                return true;
            }
            path.pop();
        }
        false
    }
    // parallel over the first letter, first hit in index order wins
    let hits: Vec<Option<Vec<usize>>> = (0..gens.len())
        .into_par_iter()
        .map(|i| {
            let mut path = vec![i];
            dfs(gens, &gens[i], &mut path, weight).then_some(path)
        })
        .collect();
    hits.into_iter().flatten().next()
}

/// True iff every left-normed generator commutator of the given weight is
/// the identity. Depth beyond the ambient dimension is capped there: a
/// unipotent group of size `N` has class at most `N − 1`.
pub fn lcs_oracle(g: &MatrixGroup, weight: usize) -> bool {
    let w = weight.min(g.dim.max(1));
    find_nontrivial_commutator(&g.generators, w).is_none()
}

/// Class found by increasing the commutator weight until all vanish.
pub fn class_by_enumeration<E: GroupElement>(gens: &[E], max_weight: usize) -> Option<usize> {
    (1..=max_weight + 1).find(|&w| find_nontrivial_commutator(gens, w).is_none()).map(|w| w - 1)
}

/// Commutator word over generator indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommutatorWord {
    Gen(usize),
    Comm(Box<CommutatorWord>, Box<CommutatorWord>),
}

impl CommutatorWord {
    pub fn weight(&self) -> usize {
        match self {
            CommutatorWord::Gen(_) => 1,
            CommutatorWord::Comm(a, b) => a.weight() + b.weight(),
        }
    }

    pub fn max_generator(&self) -> usize {
        match self {
            CommutatorWord::Gen(i) => *i,
            CommutatorWord::Comm(a, b) => a.max_generator().max(b.max_generator()),
        }
    }

    pub fn eval<E: GroupElement>(&self, gens: &[E]) -> E {
        match self {
            CommutatorWord::Gen(i) => gens[*i].clone(),
            CommutatorWord::Comm(a, b) => a.eval(gens).commutator(&b.eval(gens)),
        }
    }

    /// Parses `3`, `[0,1]`, `[[0,1],2]`, … (whitespace ignored).
    pub fn parse(s: &str) -> Result<Self> {
        let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut pos = 0;
        let w = Self::parse_at(&toks, &mut pos, s)?;
        if pos != toks.len() {
            return Err(Error::MalformedWord(format!("trailing input in {s:?}")));
        }
        Ok(w)
    }

    fn parse_at(t: &[char], pos: &mut usize, src: &str) -> Result<Self> {
        let bad = |why: &str, at: usize| Error::MalformedWord(format!("{why} at offset {at} in {src:?}"));
        match t.get(*pos) {
            Some('[') => {
                *pos += 1;
                let a = Self::parse_at(t, pos, src)?;
                if t.get(*pos) != Some(&',') {
                    return Err(bad("expected ','", *pos));
                }
                *pos += 1;
                let b = Self::parse_at(t, pos, src)?;
                if t.get(*pos) != Some(&']') {
                    return Err(bad("expected ']'", *pos));
                }
                *pos += 1;
                Ok(CommutatorWord::Comm(Box::new(a), Box::new(b)))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = *pos;
                while t.get(*pos).is_some_and(char::is_ascii_digit) {
                    *pos += 1;
                }
                let digits: String = t[start..*pos].iter().collect();
                digits.parse().map(CommutatorWord::Gen).map_err(|_| bad("generator index out of range", start))
            }
            _ => Err(bad("expected generator index or '['", *pos)),
        }
    }
}

impl fmt::Display for CommutatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommutatorWord::Gen(i) => write!(f, "{i}"),
            CommutatorWord::Comm(a, b) => write!(f, "[{a},{b}]"),
        }
    }
}

/// `sign · h_1(Id − g_1) ⋯ h_k(Id − g_k)`.
#[derive(Clone, Debug)]
pub struct DecompositionTerm {
    pub sign: i8,
    pub factors: Vec<(QMatrix, QMatrix)>,
}

impl DecompositionTerm {
    pub fn evaluate(&self) -> QMatrix {
        let dim = self.factors[0].0.rows();
        let mut acc = QMatrix::identity(dim);
        for (h, g) in &self.factors {
            acc = acc.mul(h).mul(&g.minus_identity().neg());
        }
        if self.sign < 0 { acc.neg() } else { acc }
    }
}

/// Writes `Id − w` as a signed sum of products `h_1(Id−g_1)⋯h_k(Id−g_k)`
/// with `k` equal to the weight of `w`, by induction on the word using
/// `Id − [a,b] = ab(Id−b⁻¹)(Id−a⁻¹) − ab(Id−a⁻¹)(Id−b⁻¹)`.
pub fn gamma_decomposition(gens: &[QMatrix], word: &CommutatorWord) -> Vec<DecompositionTerm> {
    match word {
        CommutatorWord::Gen(i) => {
            let dim = gens[*i].rows();
            vec![DecompositionTerm { sign: 1, factors: vec![(QMatrix::identity(dim), gens[*i].clone())] }]
        }
        CommutatorWord::Comm(wa, wb) => {
            let (a, b) = (wa.eval(gens), wb.eval(gens));
            let (ai, bi) = (GroupElement::inverse(&a), GroupElement::inverse(&b));
            let ab = a.mul(&b);
            // Id − x⁻¹ = −x⁻¹(Id − x): flip signs, push x⁻¹ into the first h
            let inv_terms = |terms: Vec<DecompositionTerm>, xi: &QMatrix| -> Vec<DecompositionTerm> {
                terms
                    .into_iter()
                    .map(|mut t| {
                        t.sign = -t.sign;
                        t.factors[0].0 = xi.mul(&t.factors[0].0);
                        t
                    })
                    .collect()
            };
            let da = inv_terms(gamma_decomposition(gens, wa), &ai);
            let db = inv_terms(gamma_decomposition(gens, wb), &bi);
            let mut out = Vec::with_capacity(2 * da.len() * db.len());
            for (first, second, sign) in [(&db, &da, 1i8), (&da, &db, -1i8)] {
                for s in first {
                    for t in second {
                        let mut factors = s.factors.clone();
                        factors[0].0 = ab.mul(&factors[0].0);
                        factors.extend(t.factors.iter().cloned());
                        out.push(DecompositionTerm { sign: sign * s.sign * t.sign, factors });
                    }
                }
            }
            out
        }
    }
}

/// Builds the decomposition of `Id − g` for `g` given by `word` and checks it
/// exactly, along with `k ≥ l + 1` for every term.
pub fn gamma_decomposition_check(g: &MatrixGroup, word: &CommutatorWord, l: usize) -> Result<bool> {
    if word.max_generator() >= g.generators.len() {
        return Err(Error::MalformedWord(format!(
            "word {word} uses generator {} but the group has {}",
            word.max_generator(),
            g.generators.len()
        )));
    }
    if word.weight() < l + 1 {
        return Err(Error::MalformedWord(format!("word {word} has weight {} < {}", word.weight(), l + 1)));
    }
    let terms = gamma_decomposition(&g.generators, word);
    if terms.iter().any(|t| t.factors.len() < l + 1) {
        return Ok(false);
    }
    let sum = terms.iter().fold(QMatrix::zeros(g.dim, g.dim), |acc, t| acc.add(&t.evaluate()));
    let lhs = QMatrix::identity(g.dim).sub(&word.eval(&g.generators));
    Ok(sum == lhs)
}

/// `h_1*(Id − g_1*) ⋯ h_m*(Id − g_m*)` on `H¹ = (ℚ^{2n})^*`, where each
/// argument is a lattice matrix `M` and acts on `H¹` by `M^T`.
pub fn annihilation_product(h: &[QMatrix], g: &[QMatrix]) -> Result<QMatrix> {
    if h.len() != g.len() {
        return Err(Error::DimensionMismatch(format!("{} h's vs {} g's", h.len(), g.len())));
    }
    let Some(first) = h.first().or(g.first()) else {
        return Err(Error::BadParameters("empty element lists".into()));
    };
    let dim = first.rows();
    let mut acc = QMatrix::identity(dim);
    for (hi, gi) in h.iter().zip(g) {
        let gs = gi.transpose();
        acc = acc.mul(&hi.transpose()).mul(&QMatrix::identity(dim).sub(&gs));
    }
    Ok(acc)
}

/// Affine map `x ↦ A x + b`. With `torus` set, translations are taken
/// modulo ℤ after every operation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineMap {
    pub a: QMatrix,
    pub b: Vec<Rational>,
    pub torus: bool,
}

impl AffineMap {
    pub fn new(a: QMatrix, b: Vec<Rational>) -> Self {
        assert_eq!(a.rows(), b.len());
        AffineMap { a, b, torus: false }
    }

    pub fn on_torus(a: QMatrix, b: Vec<Rational>) -> Self {
        assert_eq!(a.rows(), b.len());
        let mut m = AffineMap { a, b, torus: true };
        m.reduce();
        m
    }

    pub fn identity(k: usize, torus: bool) -> Self {
        AffineMap { a: QMatrix::identity(k), b: vec![Rational::ZERO; k], torus }
    }

    fn reduce(&mut self) {
        if self.torus {
            for x in &mut self.b {
                *x = x.fract_mod1();
            }
        }
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        let mut y: Vec<Rational> = self.a.mul_vec(x).iter().zip(&self.b).map(|(u, v)| u + v).collect();
        if self.torus {
            y.iter_mut().for_each(|v| *v = v.fract_mod1());
        }
        y
    }

    /// `[[A, b], [0, 1]]`.
    pub fn block_matrix(&self) -> QMatrix {
        let k = self.a.rows();
        QMatrix::from_fn(k + 1, k + 1, |r, c| match (r < k, c < k) {
            (true, true) => self.a[(r, c)].clone(),
            (true, false) => self.b[r].clone(),
            (false, true) => Rational::ZERO,
            (false, false) => Rational::ONE,
        })
    }
}

impl GroupElement for AffineMap {
    /// `(A,b)·(A',b') = (AA', Ab' + b)`.
    fn compose(&self, o: &Self) -> Self {
        let b = self.a.mul_vec(&o.b).iter().zip(&self.b).map(|(u, v)| u + v).collect();
        let mut m = AffineMap { a: self.a.mul(&o.a), b, torus: self.torus || o.torus };
        m.reduce();
        m
    }

    fn inverse(&self) -> Self {
        let ai = GroupElement::inverse(&self.a);
        let b = ai.mul_vec(&self.b).iter().map(|x| -x).collect();
        let mut m = AffineMap { a: ai, b, torus: self.torus };
        m.reduce();
        m
    }

    fn is_identity(&self) -> bool {
        self.a.is_identity() && self.b.iter().all(|x| if self.torus { x.is_integer() } else { x.is_zero() })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineGroup {
    linear_dim: usize,
    generators: Vec<AffineMap>,
}

impl AffineGroup {
    pub fn new(linear_dim: usize, generators: Vec<AffineMap>) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            if g.a.rows() != linear_dim || !g.a.is_square() {
                return Err(Error::Invariant { generator: Some(i), invariant: format!("linear part of size {linear_dim}") });
            }
            if crate::linalg::det(&g.a).is_zero() {
                return Err(Error::Invariant { generator: Some(i), invariant: "invertible linear part".into() });
            }
        }
        Ok(AffineGroup { linear_dim, generators })
    }

    pub fn linear_dim(&self) -> usize {
        self.linear_dim
    }

    pub fn generators(&self) -> &[AffineMap] {
        &self.generators
    }
}

/// The block embedding `(A, b) ↦ [[A, b], [0, 1]]`.
pub fn affine_to_unipotent(g: &AffineGroup) -> Result<MatrixGroup> {
    if let Some(i) = g.generators.iter().position(|m| !is_unipotent(&m.a)) {
        return Err(Error::NotUnipotent(Some(format!("linear part of generator {i}"))));
    }
    MatrixGroup::new(g.linear_dim + 1, g.generators.iter().map(AffineMap::block_matrix).collect())
}

/// The block embedding is multiplicative on every ordered generator pair
/// (including inverses).
pub fn verify_affine_embedding(g: &AffineGroup) -> bool {
    let mut elems: Vec<AffineMap> = g.generators.clone();
    elems.extend(g.generators.iter().map(GroupElement::inverse));
    elems.iter().all(|x| {
        elems.iter().all(|y| x.compose(y).block_matrix() == x.block_matrix().mul(&y.block_matrix()))
    })
}

/// If every element of `s` is the identity on `w` and on `V/w`, checks that
/// `s` is commutative. `Ok(false)` when that hypothesis fails.
pub fn flag_abelian_check(s: &[QMatrix], w: &Subspace<Rational>) -> Result<bool> {
    let dim = w.ambient();
    for (i, m) in s.iter().enumerate() {
        if m.rows() != dim || !m.is_square() {
            return Err(Error::DimensionMismatch(format!("element {i} is not {dim}x{dim}")));
        }
        if !w.basis().iter().all(|v| w.contains(&m.mul_vec(v))) {
            return Err(Error::BadParameters(format!("element {i} does not preserve the subspace")));
        }
    }
    let hypothesis = s.iter().all(|m| {
        let n = m.minus_identity();
        w.basis().iter().all(|v| n.mul_vec(v).iter().all(Rational::is_zero))
            && (0..dim).all(|c| w.contains(&n.col(c)))
    });
    if !hypothesis {
        return Ok(false);
    }
    for (i, a) in s.iter().enumerate() {
        for (j, b) in s.iter().enumerate().skip(i + 1) {
            if a.mul(b) != b.mul(a) {
                return Err(Error::Invariant {
                    generator: None,
                    invariant: format!("flag-trivial elements {i} and {j} commute"),
                });
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::unitriangular_generators;

    fn u(n: usize) -> MatrixGroup {
        MatrixGroup::new_integral(n, unitriangular_generators(n)).unwrap()
    }

    fn tau(n: usize, i: usize, j: usize) -> QMatrix {
        QMatrix::identity(n).add(&QMatrix::unit(n, n, i, j))
    }

    #[test]
    fn closure_examples() {
        let triv = MatrixGroup::new(3, vec![QMatrix::identity(3)]).unwrap();
        assert_eq!(lie_closure(&triv).unwrap().dimension(), 0);
        assert_eq!(nilpotency_class(&triv).unwrap(), 0);
        let l = lie_closure(&u(3)).unwrap();
        assert_eq!(l.dimension(), 3);
        assert!(l.contains(&QMatrix::unit(3, 3, 0, 2)));
        let one = MatrixGroup::new(2, vec![tau(2, 0, 1)]).unwrap();
        assert_eq!(lie_closure(&one).unwrap().basis(), vec![QMatrix::unit(2, 2, 0, 1)]);
    }

    #[test]
    fn heisenberg_has_class_two() {
        let h = MatrixGroup::new(3, vec![tau(3, 0, 1), tau(3, 1, 2)]).unwrap();
        assert_eq!(nilpotency_class(&h).unwrap(), 2);
        assert!(!lcs_oracle(&h, 2));
        assert!(lcs_oracle(&h, 3));
        let c = tau(3, 0, 1).commutator(&tau(3, 1, 2));
        assert_eq!(c, tau(3, 0, 2));
    }

    #[test]
    fn derived_length_examples() {
        assert_eq!(derived_length(&u(2)).unwrap(), 1);
        assert_eq!(derived_length(&u(4)).unwrap(), 2);
        assert_eq!(derived_length(&u(8)).unwrap(), 3);
        assert_eq!(derived_length_bound(1), 1);
        assert_eq!(derived_length_bound(3), 2);
        assert_eq!(derived_length_bound(4), 3);
    }

    #[test]
    fn not_unipotent_is_rejected() {
        let g = MatrixGroup::new(2, vec![QMatrix::identity(2).neg()]).unwrap();
        assert!(matches!(lie_closure(&g), Err(Error::NotUnipotent(_))));
    }

    #[test]
    fn oracle_on_u3() {
        assert!(lcs_oracle(&u(3), 3));
        assert!(!lcs_oracle(&u(3), 2));
        let triv = MatrixGroup::new(1, vec![QMatrix::identity(1)]).unwrap();
        assert!(lcs_oracle(&triv, 1));
    }

    #[test]
    fn word_parsing() {
        let w = CommutatorWord::parse(" [[0, 1], 2]").unwrap();
        assert_eq!(w.weight(), 3);
        assert_eq!(w.to_string(), "[[0,1],2]");
        for bad in ["", "[0,1", "[0;1]", "[0,1]]", "x", "[,1]"] {
            assert!(matches!(CommutatorWord::parse(bad), Err(Error::MalformedWord(_))), "{bad}");
        }
    }

    #[test]
    fn decomposition_base_case_and_commutators() {
        let g = u(3);
        // generators: τ_12, τ_13, τ_23
        let base = CommutatorWord::Gen(0);
        assert!(gamma_decomposition_check(&g, &base, 0).unwrap());
        assert_eq!(gamma_decomposition(g.generators(), &base).len(), 1);
        let c = CommutatorWord::parse("[0,2]").unwrap();
        assert!(gamma_decomposition_check(&g, &c, 1).unwrap());
        let nested = CommutatorWord::parse("[[0,2],1]").unwrap();
        let terms = gamma_decomposition(g.generators(), &nested);
        assert!(terms.iter().all(|t| t.factors.len() >= 3));
        assert!(gamma_decomposition_check(&g, &nested, 2).unwrap());
        assert!(matches!(gamma_decomposition_check(&g, &c, 2), Err(Error::MalformedWord(_))));
        assert!(matches!(gamma_decomposition_check(&g, &CommutatorWord::Gen(9), 0), Err(Error::MalformedWord(_))));
    }

    #[test]
    fn displayed_commutator_identity() {
        let (g, h) = (tau(3, 0, 1), tau(3, 1, 2).mul(&tau(3, 0, 2)));
        let gi = GroupElement::inverse(&g);
        let hi = GroupElement::inverse(&h);
        let id = QMatrix::identity(3);
        let lhs = id.sub(&g.commutator(&h));
        let gh = g.mul(&h);
        let rhs = gh.mul(&id.sub(&hi)).mul(&id.sub(&gi)).sub(&gh.mul(&id.sub(&gi)).mul(&id.sub(&hi)));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn affine_embedding() {
        let k = 3;
        let id = AffineMap::identity(k, false);
        assert!(id.block_matrix().is_identity());
        let mut e1 = vec![Rational::ZERO; k];
        e1[0] = Rational::ONE;
        let t = AffineMap::new(QMatrix::identity(k), e1);
        assert_eq!(t.block_matrix(), tau(k + 1, 0, k));
        let a = AffineMap::new(tau(k, 0, 1), vec![Rational::from_int(2), Rational::ZERO, Rational::from_int(-1)]);
        let b = AffineMap::new(tau(k, 1, 2).mul(&tau(k, 0, 2)), vec![Rational::ONE, Rational::from_int(3), Rational::ZERO]);
        let g = AffineGroup::new(k, vec![t, a, b]).unwrap();
        assert!(verify_affine_embedding(&g));
        let m = affine_to_unipotent(&g).unwrap();
        assert!(m.is_unipotent());
    }

    #[test]
    fn flag_examples() {
        let e1 = Subspace::span(2, vec![vec![Rational::ONE, Rational::ZERO]]);
        let s = vec![tau(2, 0, 1), tau(2, 0, 1).pow(3)];
        assert_eq!(flag_abelian_check(&s, &e1), Ok(true));
        let e1_3 = Subspace::span(3, vec![vec![Rational::ONE, Rational::ZERO, Rational::ZERO]]);
        assert_eq!(flag_abelian_check(&[tau(3, 0, 1), tau(3, 1, 2)], &e1_3), Ok(false));
        assert_eq!(flag_abelian_check(&[QMatrix::identity(3)], &e1_3), Ok(true));
    }
}
