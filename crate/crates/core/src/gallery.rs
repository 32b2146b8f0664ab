//! Explicit groups on products of elliptic curves, and a seeded fuzzer.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::Gaussian;
use crate::group::{AffineGroup, AffineMap, GroupElement, MatrixGroup};
use crate::linalg::{kron, quasi_unipotent_order};
use crate::matrix::{CMatrix, QMatrix};
use crate::rational::Rational;
use crate::torus::{HermitianClass, TorusAutomorphism, TorusModel};

/// `τ_ij = I + E_ij` for `i < j`, lexicographic in `(i, j)`.
pub fn unitriangular_generators(n: usize) -> Vec<QMatrix> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push(QMatrix::identity(n).add(&QMatrix::unit(n, n, i, j)));
        }
    }
    out
}

/// Lift an `n × n` integer matrix acting on `ℤ[i]^n` to the lattice `ℤ^{2n}`.
pub fn on_square_lattice(m: &QMatrix) -> QMatrix {
    kron(m, &QMatrix::identity(2))
}

/// Lift a Gaussian-integer matrix on `ℤ[i]^n` to `ℤ^{2n}`: `x + iy ↦ [[x,−y],[y,x]]`.
pub fn gaussian_on_square_lattice(m: &CMatrix) -> QMatrix {
    let n = m.rows();
    QMatrix::from_fn(2 * n, 2 * n, |r, c| {
        let z = &m[(r / 2, c / 2)];
        match (r % 2, c % 2) {
            (0, 0) | (1, 1) => z.re.clone(),
            (0, 1) => -&z.im,
            _ => z.im.clone(),
        }
    })
}

/// `I + Σ E_{i,i+1}`, the full unipotent Jordan block, acting diagonally on `E_i^n`.
pub fn full_jordan(n: usize) -> TorusAutomorphism {
    let mut m = QMatrix::identity(n);
    for i in 0..n.saturating_sub(1) {
        m[(i, i + 1)] = Rational::ONE;
    }
    TorusAutomorphism::new(on_square_lattice(&m))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// Stated in the source text.
    Claimed,
    /// Computed here by an independent oracle.
    Derived,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expectation {
    pub name: String,
    pub value: i64,
    pub provenance: Provenance,
}

#[derive(Clone, Debug)]
pub enum CaseGroup {
    Torus(Vec<TorusAutomorphism>),
    Affine(AffineGroup),
}

#[derive(Clone, Debug)]
pub struct GalleryCase {
    pub name: String,
    pub torus: TorusModel,
    pub group: CaseGroup,
    pub expected: Vec<Expectation>,
    pub metadata: BTreeMap<String, String>,
}

impl GalleryCase {
    /// Torus automorphisms: the case's own, or the block embedding of an affine group.
    pub fn automorphisms(&self) -> Vec<TorusAutomorphism> {
        match &self.group {
            CaseGroup::Torus(g) => g.clone(),
            CaseGroup::Affine(a) => a
                .generators()
                .iter()
                .map(|m| TorusAutomorphism::new(on_square_lattice(&m.block_matrix())))
                .collect(),
        }
    }

    pub fn lattice_group(&self) -> MatrixGroup {
        let gens = self.automorphisms().into_iter().map(|g| g.m).collect();
        MatrixGroup::new(2 * self.torus.n(), gens).expect("gallery generators are invertible")
    }

    pub fn expected(&self, name: &str) -> Option<i64> {
        self.expected.iter().find(|e| e.name == name).map(|e| e.value)
    }
}

/// `U(n, ℤ)` acting on `E_i^n` through `τ_ij ↦ I_{2n} + E_ij ⊗ I_2`.
pub fn u_n_on_torus(n: usize) -> Result<GalleryCase> {
    if n < 2 {
        return Err(Error::BadParameters(format!("u_n needs n >= 2, got {n}")));
    }
    let gens = unitriangular_generators(n).iter().map(|t| TorusAutomorphism::new(on_square_lattice(t))).collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("gallery".into(), format!("u_n {n}"));
    Ok(GalleryCase {
        name: format!("u_n_{n}"),
        torus: TorusModel::square(n),
        group: CaseGroup::Torus(gens),
        expected: vec![Expectation { name: "nilpotency_class".into(), value: n as i64 - 1, provenance: Provenance::Claimed }],
        metadata,
    })
}

/// `ℤ^k ⋊ U(k, ℤ)` with `k = n − κ`: the `τ_ij` of `U(k)` plus the unit translations.
pub fn affine_example(n: usize, kappa: usize) -> Result<GalleryCase> {
    if kappa < 1 || kappa + 1 > n {
        return Err(Error::BadParameters(format!("need 1 <= kappa <= n-1, got n={n}, kappa={kappa}")));
    }
    let k = n - kappa;
    let mut gens: Vec<AffineMap> =
        unitriangular_generators(k).into_iter().map(|a| AffineMap::new(a, vec![Rational::ZERO; k])).collect();
    for i in 0..k {
        let mut b = vec![Rational::ZERO; k];
        b[i] = Rational::ONE;
        gens.push(AffineMap::new(QMatrix::identity(k), b));
    }
    let mut metadata = BTreeMap::new();
    metadata.insert("gallery".into(), format!("affine {n} {kappa}"));
    metadata.insert("linear_dim".into(), k.to_string());
    Ok(GalleryCase {
        name: format!("affine_{n}_{kappa}"),
        torus: TorusModel::square(k + 1),
        group: CaseGroup::Affine(AffineGroup::new(k, gens)?),
        expected: vec![Expectation { name: "nilpotency_class".into(), value: k as i64, provenance: Provenance::Claimed }],
        metadata,
    })
}

/// Lattice action of the cube root of unity `ω` on one Eisenstein curve.
pub fn eisenstein_cm_block() -> QMatrix {
    QMatrix::from_i64_rows(&[&[0, -1], &[1, -1]])
}

/// On `E_ω^n`, the scalar `−ω` (lattice form `−W ⊕ … ⊕ −W`) commutes with
/// every `U(n, ℤ)` generator image and has order exactly 6.
pub fn eisenstein_quotient_check(n: usize) -> bool {
    let w = eisenstein_cm_block();
    if !w.mul(&w).add(&w).add(&QMatrix::identity(2)).is_zero() {
        return false;
    }
    let minus_w = kron(&QMatrix::identity(n), &w).neg();
    let commutes = unitriangular_generators(n).iter().all(|t| {
        let g = on_square_lattice(t);
        g.mul(&minus_w) == minus_w.mul(&g)
    });
    commutes && quasi_unipotent_order(&minus_w) == Ok(6) && minus_w.pow(6).is_identity()
}

/// Gallery form of the Eisenstein case: the `U(n, ℤ)` image, with the CM
/// operator recorded in metadata.
pub fn eisenstein_case(n: usize) -> Result<GalleryCase> {
    let mut case = u_n_on_torus(n)?;
    case.name = format!("eisenstein_{n}");
    case.metadata.insert("gallery".into(), format!("eisenstein {n}"));
    case.metadata.insert("cm_block".into(), "[[0,-1],[1,-1]]".into());
    case.metadata.insert("cm_order".into(), "6".into());
    Ok(case)
}

/// `I + E_ab ⊗ (x + y·j)` on `ℤ^{2n}`.
fn block_elementary(n: usize, a: usize, b: usize, x: i64, y: i64) -> QMatrix {
    let mut z = CMatrix::identity(n);
    z[(a, b)] = Gaussian::new(Rational::from_int(x), Rational::from_int(y));
    gaussian_on_square_lattice(&z)
}

/// Deterministic in `seed`: each generator is a product of 1–3 upper block
/// elementaries with coefficients in `[−3, 3] + [−3, 3]i`, all conjugated
/// by one random `J`-commuting unimodular matrix.
pub fn random_unipotent_group(n: usize, generators: usize, seed: u64) -> GalleryCase {
    assert!(n >= 1 && generators >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick_pair = |rng: &mut ChaCha8Rng, upper: bool| -> Option<(usize, usize)> {
        if n < 2 {
            return None;
        }
        let a = rng.gen_range(0..n);
        let mut b = rng.gen_range(0..n - 1);
        if b >= a {
            b += 1;
        }
        Some(if upper { (a.min(b), a.max(b)) } else { (a, b) })
    };
    let mut conj = QMatrix::identity(2 * n);
    for _ in 0..2 {
        if let Some((a, b)) = pick_pair(&mut rng, false) {
            let (x, y) = (rng.gen_range(-1..=1), rng.gen_range(-1..=1));
            conj = conj.mul(&block_elementary(n, a, b, x, y));
        }
    }
    let conj_inv = GroupElement::inverse(&conj);
    let gens = (0..generators)
        .map(|_| {
            let mut m = QMatrix::identity(2 * n);
            for _ in 0..rng.gen_range(1..=3) {
                if let Some((a, b)) = pick_pair(&mut rng, true) {
                    let (x, y) = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
                    m = m.mul(&block_elementary(n, a, b, x, y));
                }
            }
            TorusAutomorphism::new(conj.mul(&m).mul(&conj_inv))
        })
        .collect();
    let mut metadata = BTreeMap::new();
    metadata.insert("gallery".into(), format!("random {n} {generators} {seed}"));
    GalleryCase {
        name: format!("random_{n}_{generators}_{seed}"),
        torus: TorusModel::square(n),
        group: CaseGroup::Torus(gens),
        expected: vec![],
        metadata,
    }
}

/// `X X† + I` for a random Gaussian-integer `X` with entries in `[−2, 2]`.
pub fn random_kahler(n: usize, rng: &mut impl Rng) -> HermitianClass {
    let x = CMatrix::from_fn(n, n, |_, _| {
        Gaussian::new(Rational::from_int(rng.gen_range(-2..=2)), Rational::from_int(rng.gen_range(-2..=2)))
    });
    HermitianClass::new(x.mul(&x.adjoint()).add(&CMatrix::identity(n))).expect("Hermitian by construction")
}

/// `U(n) ⋉ (rational translations in the first curve factor)` on `E_i^n`,
/// as affine maps on `ℝ^{2n}/ℤ^{2n}`. The first factor is stable under every
/// linear part.
pub fn subtorus_translation_group(n: usize, seed: u64) -> Vec<AffineMap> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gens: Vec<AffineMap> = unitriangular_generators(n)
        .iter()
        .map(|t| AffineMap::on_torus(on_square_lattice(t), vec![Rational::ZERO; 2 * n]))
        .collect();
    for _ in 0..2 {
        let mut b = vec![Rational::ZERO; 2 * n];
        for x in b.iter_mut().take(2) {
            *x = Rational::new(rng.gen_range(1..12), rng.gen_range(2..13));
        }
        gens.push(AffineMap::on_torus(QMatrix::identity(2 * n), b));
    }
    gens
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::is_unipotent;

    #[test]
    fn u_n_generator_counts_and_faithfulness() {
        assert_eq!(u_n_on_torus(2).unwrap().automorphisms().len(), 1);
        let c = u_n_on_torus(3).unwrap();
        assert_eq!(c.automorphisms().len(), 3);
        assert_eq!(c.expected("nilpotency_class"), Some(2));
        for g in c.automorphisms() {
            c.torus.validate_automorphism(&g.m).unwrap();
            assert!(!c.torus.action_on_h11_real(&g).unwrap().is_identity());
        }
        assert!(u_n_on_torus(1).is_err());
    }

    #[test]
    fn affine_parameters() {
        assert!(affine_example(3, 0).is_err());
        assert!(affine_example(3, 3).is_err());
        let c = affine_example(5, 2).unwrap();
        assert_eq!(c.expected("nilpotency_class"), Some(3));
    }

    #[test]
    fn eisenstein_checks() {
        assert!(eisenstein_quotient_check(2));
        assert!(eisenstein_quotient_check(3));
    }

    #[test]
    fn fuzzer_is_deterministic_and_valid() {
        let a = random_unipotent_group(3, 3, 42);
        let b = random_unipotent_group(3, 3, 42);
        assert_eq!(a.automorphisms(), b.automorphisms());
        for g in a.automorphisms() {
            assert!(is_unipotent(&g.m));
            a.torus.validate_automorphism(&g.m).unwrap();
        }
        let triv = random_unipotent_group(1, 1, 7);
        assert!(triv.automorphisms()[0].m.is_identity());
    }
}
