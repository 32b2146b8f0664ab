//! Invariant classes `L_0, …, L_n` of a unipotent group on a torus and the
//! subspaces `F_i ⊆ H^{1,1}(ℝ)` they cut out.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{Field, Gaussian};
use crate::growth::{expand_with, expansion_classes};
use crate::linalg::{inertia, kernel, Inertia, Subspace};
use crate::matrix::{CMatrix, QMatrix};
use crate::rational::Rational;
use crate::torus::{
    cup, eval_top, hpq_from_h10, is_kahler, kahler_family, product_span, real_basis_11, HermitianClass, HodgeClass,
    TorusAutomorphism, TorusModel,
};

/// Bound on dominant-term steps per level in [`build_chain_group`].
pub const DEFAULT_MAX_STEPS: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
}

impl Check {
    fn new(name: impl Into<String>, pass: bool) -> Self {
        Check { name: name.into(), pass }
    }
}

/// One replacement `M ← (g* − Id)^index M` of the class being pushed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DominantStep {
    pub generator: usize,
    pub index: usize,
}

/// Why `L_{level+1}` lies in the closure of `L_level · Nef`: the dominant
/// steps taken from the reference Kähler class, with `L_level · M_j = 0`
/// verified for every `j` past each chosen index, and the positive number
/// `L_{level+1} · ω^{n−level−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NefCertificate {
    pub level: usize,
    pub steps: Vec<DominantStep>,
    pub positivity: Rational,
}

#[derive(Clone, Debug)]
pub struct InvariantChain {
    pub n: usize,
    /// `L_0 = 1, …, L_n`, `L_i ∈ H^{i,i}`.
    pub levels: Vec<HodgeClass>,
    /// `M_1, …, M_n` with `L_{i+1} = L_i · M_{i+1}`.
    pub witnesses: Vec<HermitianClass>,
    pub certificates: Vec<NefCertificate>,
    /// `H^{1,0}` actions of the generators the chain is invariant under.
    pub actions: Vec<CMatrix>,
    pub omega: HermitianClass,
}

fn power(c: &HodgeClass, k: usize) -> HodgeClass {
    (0..k).fold(HodgeClass::unit(c.n), |acc, _| cup(&acc, c))
}

fn product(n: usize, cs: &[&HermitianClass]) -> HodgeClass {
    cs.iter().fold(HodgeClass::unit(n), |acc, c| cup(&acc, &c.to_hodge()))
}

fn real_value(g: Gaussian) -> Rational {
    assert!(g.im.is_zero(), "expected a real intersection number, got {g}");
    g.re
}

/// `y ↦ ∫ z ∧ y` on the complementary degree, tabulated on the basis.
struct Pairing {
    coeffs: Vec<Gaussian>,
}

impl Pairing {
    fn new(z: &HodgeClass) -> Self {
        let n = z.n;
        let d = n - z.p;
        let coeffs = (0..HodgeClass::dim(n, d, d))
            .map(|u| eval_top(&cup(z, &HodgeClass::basis_element(n, d, d, u))))
            .collect();
        Pairing { coeffs }
    }

    fn eval(&self, y: &HodgeClass) -> Gaussian {
        assert_eq!(y.coords.len(), self.coeffs.len());
        self.coeffs
            .iter()
            .zip(&y.coords)
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .fold(Gaussian::zero(), |acc, (a, b)| acc.add(&a.mul(b)))
    }

    fn eval_real(&self, y: &HodgeClass) -> Rational {
        real_value(self.eval(y))
    }
}

/// Real solutions `x` of `Σ_a x_a v_a = 0` for complex vectors `v_a`.
fn real_kernel(vectors: &[Vec<Gaussian>]) -> Vec<Vec<Rational>> {
    let cols = vectors.len();
    let len = vectors.first().map_or(0, Vec::len);
    let mut data = Vec::with_capacity(2 * len * cols);
    for r in 0..len {
        data.extend(vectors.iter().map(|v| v[r].re.clone()));
    }
    for r in 0..len {
        data.extend(vectors.iter().map(|v| v[r].im.clone()));
    }
    kernel(&QMatrix::from_vec(2 * len, cols, data))
}

fn combine(basis: &[Vec<Rational>], alpha: &[Rational]) -> Vec<Rational> {
    let dim = basis.first().map_or(0, Vec::len);
    let mut out = vec![Rational::ZERO; dim];
    for (b, a) in basis.iter().zip(alpha) {
        if a.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(b) {
            *o = &*o + &(a * x);
        }
    }
    out
}

/// Multisets of size `k` from `0..m`, as sorted index lists.
pub fn multisets(m: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            go(i, m, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, m, k, &mut Vec::new(), &mut out);
    out
}

/// Nef classes used to test cone conditions: [`kahler_family`] followed by
/// the rank-one classes `v v†` on its boundary.
pub fn nef_family(n: usize) -> Vec<HermitianClass> {
    let kf = kahler_family(n);
    let id = HermitianClass::identity(n);
    let mut out = kf.clone();
    out.extend(kf.iter().skip(1).map(|k| k.sub(&id)));
    out
}

fn require_unipotent(gs: &[TorusAutomorphism]) -> Result<()> {
    match gs.iter().position(|g| !g.is_unipotent()) {
        Some(i) => Err(Error::NotUnipotent(Some(format!("generator {i}")))),
        None => Ok(()),
    }
}

fn positivity(omega: &HermitianClass, l: &HodgeClass) -> Rational {
    let w = omega.to_hodge();
    real_value(eval_top(&cup(l, &power(&w, omega.n() - l.p))))
}

/// Chain from one automorphism: `L_{i+1} = L_i · ω_k` with `ω_k = (g* − Id)^k ω`
/// and `k` the largest index with `L_i · ω_k ≠ 0`.
pub fn build_chain_cyclic(t: &TorusModel, g: &TorusAutomorphism, omega: &HermitianClass) -> Result<InvariantChain> {
    let rec = expansion_classes(t, g, omega)?;
    let a = t.h10_action(g)?;
    let n = t.n();
    let mut levels = vec![HodgeClass::unit(n)];
    let mut witnesses = Vec::with_capacity(n);
    let mut certificates = Vec::with_capacity(n);
    for i in 0..n {
        let li = &levels[i];
        let prods: Vec<HodgeClass> = rec.omega_classes.iter().map(|w| cup(li, &w.to_hodge())).collect();
        let k = prods.iter().rposition(|p| !p.is_zero()).ok_or(Error::ChainStalled(i))?;
        let next = prods[k].clone();
        if hpq_from_h10(&a, i + 1, i + 1).mul_vec(&next.coords) != next.coords {
            return Err(Error::InvalidChain(format!("L_{} is not invariant", i + 1)));
        }
        let pos = positivity(omega, &next);
        if !pos.is_positive() {
            return Err(Error::InvalidChain(format!("L_{} has non-positive volume against ω", i + 1)));
        }
        certificates.push(NefCertificate {
            level: i,
            steps: if k > 0 { vec![DominantStep { generator: 0, index: k }] } else { vec![] },
            positivity: pos,
        });
        witnesses.push(rec.omega_classes[k].clone());
        levels.push(next);
    }
    Ok(InvariantChain { n, levels, witnesses, certificates, actions: vec![a], omega: omega.clone() })
}

/// Chain for several generators: at each level, repeatedly replace `M`
/// (starting from `ω`) by its dominant term under some generator until
/// `L_i · M` is fixed by all of them.
pub fn build_chain_group(
    t: &TorusModel,
    gens: &[TorusAutomorphism],
    omega: &HermitianClass,
    max_steps: usize,
) -> Result<InvariantChain> {
    require_unipotent(gens)?;
    if !is_kahler(omega) {
        return Err(Error::NotKahler);
    }
    let n = t.n();
    let actions: Vec<CMatrix> = gens.iter().map(|g| t.h10_action(g)).collect::<Result<_>>()?;
    let mut levels = vec![HodgeClass::unit(n)];
    let mut witnesses = Vec::with_capacity(n);
    let mut certificates = Vec::with_capacity(n);
    for i in 0..n {
        let li = levels[i].clone();
        let mut m = omega.clone();
        if cup(&li, &m.to_hodge()).is_zero() {
            return Err(Error::ChainStalled(i));
        }
        let mut steps = Vec::new();
        loop {
            let mut moved = false;
            for (gi, a) in actions.iter().enumerate() {
                let rec = expand_with(a, &m)?;
                let k = rec
                    .omega_classes
                    .iter()
                    .rposition(|w| !cup(&li, &w.to_hodge()).is_zero())
                    .ok_or(Error::ChainStalled(i))?;
                if k > 0 {
                    m = rec.omega_classes[k].clone();
                    steps.push(DominantStep { generator: gi, index: k });
                    moved = true;
                    if steps.len() >= max_steps {
                        return Err(Error::LChainNotFound { level: i, iterations: steps.len() });
                    }
                }
            }
            if !moved {
                break;
            }
        }
        let next = cup(&li, &m.to_hodge());
        for a in &actions {
            if hpq_from_h10(a, i + 1, i + 1).mul_vec(&next.coords) != next.coords {
                return Err(Error::InvalidChain(format!("L_{} is not invariant", i + 1)));
            }
        }
        let pos = positivity(omega, &next);
        if !pos.is_positive() {
            return Err(Error::InvalidChain(format!("L_{} has non-positive volume against ω", i + 1)));
        }
        certificates.push(NefCertificate { level: i, steps, positivity: pos });
        witnesses.push(m);
        levels.push(next);
    }
    Ok(InvariantChain { n, levels, witnesses, certificates, actions, omega: omega.clone() })
}

impl InvariantChain {
    /// A chain given directly by its witnesses, with no invariance or
    /// positivity claims. `omega` only serves as the reference class.
    pub fn from_witnesses(witnesses: Vec<HermitianClass>, omega: HermitianClass) -> Result<Self> {
        let n = omega.n();
        if witnesses.len() != n {
            return Err(Error::WrongArity { expected: n, got: witnesses.len() });
        }
        let mut levels = vec![HodgeClass::unit(n)];
        for (i, m) in witnesses.iter().enumerate() {
            let next = cup(&levels[i], &m.to_hodge());
            if next.is_zero() {
                return Err(Error::InvalidChain(format!("L_{} vanishes", i + 1)));
            }
            levels.push(next);
        }
        Ok(InvariantChain { n, levels, witnesses, certificates: Vec::new(), actions: Vec::new(), omega })
    }

    /// Exact invariance `g* L_i = L_i` under each stored generator.
    pub fn invariance_checks(&self) -> Vec<Check> {
        let mut out = Vec::new();
        for (gi, a) in self.actions.iter().enumerate() {
            for (i, l) in self.levels.iter().enumerate() {
                let fixed = hpq_from_h10(a, i, i).mul_vec(&l.coords) == l.coords;
                out.push(Check::new(format!("generator {gi} fixes L_{i}"), fixed));
            }
        }
        out
    }

    fn validate(&self) -> Result<()> {
        let n = self.n;
        if self.levels.len() != n + 1 || self.witnesses.len() != n {
            return Err(Error::InvalidChain("wrong number of levels".into()));
        }
        if self.levels[0] != HodgeClass::unit(n) {
            return Err(Error::InvalidChain("L_0 is not 1".into()));
        }
        for i in 0..n {
            let l = &self.levels[i + 1];
            if (l.p, l.q) != (i + 1, i + 1) || l.is_zero() {
                return Err(Error::InvalidChain(format!("L_{} is zero or of the wrong degree", i + 1)));
            }
            if cup(&self.levels[i], &self.witnesses[i].to_hodge()) != *l {
                return Err(Error::InvalidChain(format!("L_{} != L_{i} · M_{}", i + 1, i + 1)));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct FiltrationSpaces {
    pub n: usize,
    /// `F_0, …, F_n` in [`real_basis_11`] coordinates.
    pub f: Vec<Subspace<Rational>>,
    /// `F'_i` for `i = 1..n` (index 0 holds `F_0`).
    pub f_prime: Vec<Subspace<Rational>>,
    /// Span of the classes certified to lie in `C_i`, plus `F_{i−1}`.
    pub cone_span: Vec<Subspace<Rational>>,
    /// `𝒩^i ⊆ H^{i,i}` for `i = 0..n`.
    pub null: Vec<Subspace<Gaussian>>,
    pub checks: Vec<Check>,
}

impl FiltrationSpaces {
    pub fn f_dims(&self) -> Vec<usize> {
        self.f.iter().map(Subspace::dim).collect()
    }

    pub fn f_prime_dims(&self) -> Vec<usize> {
        self.f_prime.iter().map(Subspace::dim).collect()
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `L · b` for each real basis class `b` of `H^{1,1}`.
fn times_basis(l: &HodgeClass) -> Vec<HodgeClass> {
    real_basis_11(l.n).iter().map(|b| cup(l, &b.to_hodge())).collect()
}

fn f_space(chain: &InvariantChain, i: usize) -> (Subspace<Rational>, bool) {
    let n = chain.n;
    let nn = n * n;
    if i == n {
        return (Subspace::full(nn), true);
    }
    let xs = times_basis(&chain.levels[i]);
    let rows: Vec<Rational> = product_span(n, n - i - 1)
        .iter()
        .flat_map(|s| {
            let pi = Pairing::new(s);
            xs.iter().map(move |x| pi.eval_real(x)).collect::<Vec<_>>()
        })
        .collect();
    let m = QMatrix::from_vec(rows.len() / nn, nn, rows);
    let by_pairing = Subspace::span(nn, kernel(&m));
    let direct = Subspace::span(nn, real_kernel(&xs.iter().map(|x| x.coords.clone()).collect::<Vec<_>>()));
    let agree = by_pairing == direct;
    (by_pairing, agree)
}

fn null_space(n: usize, i: usize) -> Subspace<Gaussian> {
    let dim = HodgeClass::dim(n, i, i);
    let rows: Vec<Vec<Gaussian>> = product_span(n, n - i).iter().map(|s| Pairing::new(s).coeffs).collect();
    let m = CMatrix::from_rows(rows);
    Subspace::span(dim, kernel(&m))
}

fn to_class(n: usize, v: &[Rational]) -> HodgeClass {
    HermitianClass::from_real_coords(n, v).to_hodge()
}

/// `{c ∈ F_i : L_{i−1} c x = 0 for all x ∈ F_i}`, plus whether every form
/// `Q_t(c, c') = ∫ L_{i−1} c c' t` with `t` a product of `n−i−1` family
/// classes is negative semidefinite on `F_i`. Given the latter, the result
/// is exactly `{c ∈ F_i : L_{i−1} c² = 0}`.
fn f_prime_space(chain: &InvariantChain, fi: &Subspace<Rational>, i: usize) -> (Subspace<Rational>, bool) {
    let n = chain.n;
    let basis = fi.basis();
    let f = basis.len();
    if f == 0 {
        return (Subspace::zero(n * n), true);
    }
    let hb: Vec<HodgeClass> = basis.iter().map(|v| to_class(n, v)).collect();
    let ys: Vec<HodgeClass> = hb.iter().map(|b| cup(&chain.levels[i - 1], b)).collect();
    let z: Vec<Vec<HodgeClass>> = ys.iter().map(|y| hb.iter().map(|b| cup(y, b)).collect()).collect();
    let cols: Vec<Vec<Gaussian>> = z.iter().map(|row| row.iter().flat_map(|c| c.coords.clone()).collect()).collect();
    let alphas = real_kernel(&cols);
    let space = Subspace::span(n * n, alphas.iter().map(|a| combine(basis, a)).collect());
    let family = kahler_family(n);
    let nsd = multisets(family.len(), n - i - 1).iter().all(|tuple| {
        let cs: Vec<&HermitianClass> = tuple.iter().map(|&k| &family[k]).collect();
        let pi = Pairing::new(&product(n, &cs));
        let gram = QMatrix::from_fn(f, f, |a, b| pi.eval_real(&z[a][b]));
        inertia(&gram).map(|x| x.is_nsd()).unwrap_or(false)
    });
    (space, nsd)
}

/// Classes certified to lie in `C_i`: `M_i`, and the dominant term at level
/// `i−1` of the reference class under each generator.
fn certified_cone_classes(chain: &InvariantChain, i: usize) -> Result<Vec<Vec<Rational>>> {
    let mut out = vec![chain.witnesses[i - 1].real_coords()];
    if chain.certificates.is_empty() {
        return Ok(out);
    }
    let l = &chain.levels[i - 1];
    for a in &chain.actions {
        let rec = expand_with(a, &chain.omega)?;
        if let Some(k) = rec.omega_classes.iter().rposition(|w| !cup(l, &w.to_hodge()).is_zero()) {
            out.push(rec.omega_classes[k].real_coords());
        }
    }
    Ok(out)
}

pub fn compute_spaces(chain: &InvariantChain) -> Result<FiltrationSpaces> {
    chain.validate()?;
    let n = chain.n;
    let nn = n * n;
    let mut checks = Vec::new();
    let mut f = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let (space, agree) = f_space(chain, i);
        checks.push(Check::new(format!("F_{i} by pairing equals the kernel of L_{i}·"), agree));
        f.push(space);
    }
    let null: Vec<Subspace<Gaussian>> = (0..=n).map(|i| null_space(n, i)).collect();
    let mut f_prime = vec![f[0].clone()];
    let mut cone_span = vec![f[0].clone()];
    for i in 1..=n {
        let (fp, nsd) = if i == n { (f[n].clone(), true) } else { f_prime_space(chain, &f[i], i) };
        checks.push(Check::new(format!("Q negative semidefinite on F_{i} for the family tuples"), nsd));
        let mut cone = f[i - 1].clone();
        for v in certified_cone_classes(chain, i)? {
            if f[i].contains(&v) {
                cone = cone.with(&v);
            }
        }
        checks.push(Check::new(format!("F'_{i} quadratic characterization equals span of C_{i}"), cone == fp));
        f_prime.push(fp);
        cone_span.push(cone);
    }
    checks.push(Check::new("F_0 = 0", f[0].dim() == 0));
    checks.push(Check::new(format!("F_{} is a hyperplane", n - 1), f[n - 1].dim() + 1 == nn));
    checks.push(Check::new(format!("F_{n} is everything"), f[n].dim() == nn));
    for i in 1..=n {
        let nested = f_prime[i].contains_space(&f[i - 1]) && f[i].contains_space(&f_prime[i]);
        checks.push(Check::new(format!("F_{} ⊆ F'_{i} ⊆ F_{i}", i - 1), nested));
        checks.push(Check::new(format!("dim F'_{i}/F_{} <= 1", i - 1), f_prime[i].dim() <= f[i - 1].dim() + 1));
    }
    Ok(FiltrationSpaces { n, f, f_prime, cone_span, null, checks })
}

/// Gram matrix of `Q(M, M') = ∫ L_i M M' c_1 ⋯ c_{n−i−2}` on [`real_basis_11`].
pub fn quadratic_form_q(chain: &InvariantChain, i: usize, tuple: &[HermitianClass]) -> Result<QMatrix> {
    let n = chain.n;
    if n < 2 || i > n - 2 {
        return Err(Error::BadDegree { p: i, q: i, n });
    }
    if tuple.len() != n - i - 2 {
        return Err(Error::WrongArity { expected: n - i - 2, got: tuple.len() });
    }
    if !tuple.iter().all(is_kahler) {
        return Err(Error::NotKahler);
    }
    let cs: Vec<&HermitianClass> = tuple.iter().collect();
    let z = cup(&chain.levels[i], &product(n, &cs));
    let xs = times_basis(&z);
    let basis: Vec<HodgeClass> = real_basis_11(n).iter().map(HermitianClass::to_hodge).collect();
    let nn = n * n;
    let mut q = QMatrix::zeros(nn, nn);
    for a in 0..nn {
        for b in a..nn {
            let v = real_value(eval_top(&cup(&xs[a], &basis[b])));
            q[(a, b)] = v.clone();
            q[(b, a)] = v;
        }
    }
    Ok(q)
}

/// Inertia of the symmetric form `q` restricted to `sub`.
pub fn restricted_inertia(q: &QMatrix, sub: &Subspace<Rational>) -> Inertia {
    let b = sub.basis();
    if b.is_empty() {
        return Inertia { n_plus: 0, n_zero: 0, n_minus: 0 };
    }
    let bm = QMatrix::from_rows(b.to_vec());
    inertia(&bm.mul(q).mul(&bm.transpose())).expect("restriction of a symmetric form is symmetric")
}

/// `P = {M : ∫ L_i M c_1 ⋯ c_{n−i−1} = 0}`.
pub fn primitive_hyperplane(chain: &InvariantChain, i: usize, tuple: &[HermitianClass]) -> Result<Subspace<Rational>> {
    let n = chain.n;
    if i >= n {
        return Err(Error::BadDegree { p: i, q: i, n });
    }
    if tuple.len() != n - i - 1 {
        return Err(Error::WrongArity { expected: n - i - 1, got: tuple.len() });
    }
    let cs: Vec<&HermitianClass> = tuple.iter().collect();
    let z = cup(&chain.levels[i], &product(n, &cs));
    let row: Vec<Rational> = times_basis(&z).iter().map(|x| real_value(eval_top(x))).collect();
    let nn = n * n;
    Ok(Subspace::span(nn, kernel(&QMatrix::from_vec(1, nn, row))))
}

/// Negative semidefiniteness of `Q` on `P` and on `F_{i+1}`.
pub fn hodge_riemann_check(
    chain: &InvariantChain,
    spaces: &FiltrationSpaces,
    i: usize,
    tuple: &[HermitianClass],
    extra: &HermitianClass,
) -> Result<(Inertia, Inertia)> {
    let q = quadratic_form_q(chain, i, tuple)?;
    let mut full = tuple.to_vec();
    full.push(extra.clone());
    let p = primitive_hyperplane(chain, i, &full)?;
    Ok((restricted_inertia(&q, &p), restricted_inertia(&q, &spaces.f[i + 1])))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SSequence {
    pub s: Vec<usize>,
    pub r: usize,
    pub top_index: usize,
    /// `λ_j > 0` with `ω_{2j} ≡ λ_j M_{s_j}` modulo `F_{s_j−1}`.
    pub ratios: Vec<Rational>,
    /// `∫ L_{s_j−1} ω_{2j} ω^{n−s_j}`, positive.
    pub sign_certificates: Vec<Rational>,
    pub checks: Vec<Check>,
}

impl SSequence {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// `c = λ d` modulo `base`, if it holds.
fn ratio_modulo(c: &[Rational], d: &[Rational], base: &Subspace<Rational>) -> Option<Rational> {
    let rc = base.residue(c);
    let rd = base.residue(d);
    let k = rd.iter().position(|x| !x.is_zero())?;
    let lambda = &rc[k] / &rd[k];
    rc.iter().zip(&rd).all(|(x, y)| *x == &lambda * y).then_some(lambda)
}

/// Levels `s_1 > ⋯ > s_r` with `ω_{2j−1} ∈ F_{s_j} ∖ F'_{s_j}` and
/// `ω_{2j} ∈ F'_{s_j} ∖ F_{s_j−1}`, with every structural claim checked.
pub fn s_sequence(
    t: &TorusModel,
    g: &TorusAutomorphism,
    chain: &InvariantChain,
    spaces: &FiltrationSpaces,
    omega: &HermitianClass,
) -> Result<SSequence> {
    let rec = expansion_classes(t, g, omega)?;
    let n = chain.n;
    let top = rec.top_index;
    let w = &rec.omega_classes;
    let mut out = SSequence { s: vec![], r: 0, top_index: top, ratios: vec![], sign_certificates: vec![], checks: vec![] };
    let mut j = 1;
    while 2 * j - 1 <= top {
        let odd = w[2 * j - 1].real_coords();
        let s = (0..=n).find(|&i| spaces.f[i].contains(&odd)).expect("F_n is everything");
        out.s.push(s);
        if s == 0 {
            out.checks.push(Check::new(format!("ω_{} is nonzero", 2 * j - 1), false));
            break;
        }
        out.checks.push(Check::new(format!("ω_{} ∉ F'_{s}", 2 * j - 1), !spaces.f_prime[s].contains(&odd)));
        let Some(even) = w.get(2 * j).map(HermitianClass::real_coords) else {
            out.checks.push(Check::new(format!("ω_{} is nonzero", 2 * j), false));
            break;
        };
        let placed = spaces.f_prime[s].contains(&even) && !spaces.f[s - 1].contains(&even);
        out.checks.push(Check::new(format!("ω_{} ∈ F'_{s} ∖ F_{}", 2 * j, s - 1), placed));
        out.checks.push(Check::new(
            format!("dim F'_{s}/F_{} = 1", s - 1),
            spaces.f_prime[s].dim() == spaces.f[s - 1].dim() + 1,
        ));
        let witness = chain.witnesses[s - 1].real_coords();
        match ratio_modulo(&even, &witness, &spaces.f[s - 1]) {
            Some(lambda) => {
                out.checks.push(Check::new(format!("ω_{} positively proportional to M_{s}", 2 * j), lambda.is_positive()));
                out.ratios.push(lambda);
            }
            None => out.checks.push(Check::new(format!("ω_{} proportional to M_{s}", 2 * j), false)),
        }
        let sign = real_value(eval_top(&cup(
            &cup(&chain.levels[s - 1], &w[2 * j].to_hodge()),
            &power(&omega.to_hodge(), n - s),
        )));
        out.checks.push(Check::new(format!("∫ L_{} ω_{} ω^{} > 0", s - 1, 2 * j, n - s), sign.is_positive()));
        out.sign_certificates.push(sign);
        j += 1;
    }
    out.r = out.s.len();
    out.checks.push(Check::new("ω_{2r+1} = 0", top == 2 * out.r));
    out.checks.push(Check::new("strictly decreasing", out.s.windows(2).all(|p| p[0] > p[1])));
    out.checks.push(Check::new("s_1 <= n-1", out.s.first().is_none_or(|&s| s < n)));
    out.checks.push(Check::new("r <= n-1", out.r < n.max(1)));
    Ok(out)
}

/// Smallest `i` with `(g* − Id) H^{1,1} ⊆ F_i`.
pub fn h_level(t: &TorusModel, g: &TorusAutomorphism, spaces: &FiltrationSpaces) -> Result<usize> {
    let nmat = t.action_on_h11_real(g)?.minus_identity();
    let cols: Vec<Vec<Rational>> = (0..nmat.cols()).map(|c| nmat.col(c)).collect();
    Ok((0..=spaces.n).find(|&i| cols.iter().all(|v| spaces.f[i].contains(v))).expect("F_n is everything"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RootDecision {
    pub member: bool,
    /// Smallest `t ≥ 0` such that `t ω` serves as witness on the tested family.
    pub t_min: Option<Rational>,
    /// Nef tuple (indices into [`nef_family`]) with `L_j c = 0` and `∫ L_{j−1} c² c < 0`.
    pub blocking_tuple: Option<Vec<usize>>,
    pub tuples_tested: usize,
    /// `∫ L_j ω c = 0` exactly when `L_j c = 0`, on every tested tuple.
    pub vanishing_consistent: bool,
}

/// Membership of `c ∈ F_j` in the primitive root space `W_j`, tested on
/// all `(n−j−1)`-tuples `u` of [`nef_family`] with witnesses `t ω`, `ω` the
/// chain's reference class.
///
/// Where `∫ L_j ω u > 0`, `t` is bounded below by `−∫ L_{j−1} c² u / ∫ L_j ω u`.
/// A tuple with `∫ L_j ω u = 0` and `∫ L_{j−1} c² u < 0` leaves no valid `t`.
/// For certified chains that vanishing happens exactly when `L_j u = 0`,
/// which then rules out every witness.
pub fn primitive_root_membership(
    chain: &InvariantChain,
    spaces: &FiltrationSpaces,
    j: usize,
    c: &HermitianClass,
) -> Result<RootDecision> {
    let n = chain.n;
    if j == 0 || j >= n {
        return Err(Error::BadDegree { p: j, q: j, n });
    }
    if !spaces.f[j].contains(&c.real_coords()) {
        return Err(Error::NotInFj(j));
    }
    let family = nef_family(n);
    let c2 = cup(&chain.levels[j - 1], &power(&c.to_hodge(), 2));
    let lw = cup(&chain.levels[j], &chain.omega.to_hodge());
    let tuples = multisets(family.len(), n - j - 1);
    let mut t_min = Rational::ZERO;
    let mut consistent = true;
    for tuple in &tuples {
        let cs: Vec<&HermitianClass> = tuple.iter().map(|&k| &family[k]).collect();
        let u = product(n, &cs);
        let pi = Pairing::new(&u);
        let d = pi.eval_real(&lw);
        let q = pi.eval_real(&c2);
        let killed = cup(&chain.levels[j], &u).is_zero();
        consistent &= killed == d.is_zero();
        if d.is_zero() {
            if q.is_negative() {
                return Ok(RootDecision {
                    member: false,
                    t_min: None,
                    blocking_tuple: Some(tuple.clone()),
                    tuples_tested: tuples.len(),
                    vanishing_consistent: consistent,
                });
            }
        } else {
            let need = -&q / &d;
            if need > t_min {
                t_min = need;
            }
        }
    }
    Ok(RootDecision {
        member: true,
        t_min: Some(t_min),
        blocking_tuple: None,
        tuples_tested: tuples.len(),
        vanishing_consistent: consistent,
    })
}

/// `C_i ∩ (−C_i) = F_{i−1}` on samples `x = f + λ M_i` with `f ∈ F_{i−1}`:
/// whenever both `x` and `−x` pass the positivity test `∫ L_{i−1} x u ≥ 0`
/// on every family tuple, `x ∈ F_{i−1}`; also `L_{i−1} F_{i−1} = 0`.
pub fn cone_lineality_check(
    chain: &InvariantChain,
    spaces: &FiltrationSpaces,
    i: usize,
    rng: &mut impl Rng,
    samples: usize,
) -> bool {
    let n = chain.n;
    let base = &spaces.f[i - 1];
    let lp = &chain.levels[i - 1];
    let kills_base = base.basis().iter().all(|v| cup(lp, &to_class(n, v)).is_zero());
    let family = kahler_family(n);
    let pairings: Vec<Pairing> = multisets(family.len(), n - i)
        .iter()
        .map(|tuple| {
            let cs: Vec<&HermitianClass> = tuple.iter().map(|&k| &family[k]).collect();
            Pairing::new(&product(n, &cs))
        })
        .collect();
    let m = chain.witnesses[i - 1].real_coords();
    let in_cone = spaces.f[i].contains(&m);
    let mut ok = kills_base;
    for s in 0..samples {
        let lambda = if in_cone { Rational::from_int((s % 3) as i64) } else { Rational::ZERO };
        let mut x: Vec<Rational> = m.iter().map(|v| &lambda * v).collect();
        for b in base.basis() {
            let a = Rational::from_int(rng.gen_range(-3..=3));
            for (xv, bv) in x.iter_mut().zip(b) {
                *xv = &*xv + &(&a * bv);
            }
        }
        let lx = cup(lp, &to_class(n, &x));
        let vals: Vec<Rational> = pairings.iter().map(|p| p.eval_real(&lx)).collect();
        let plus = vals.iter().all(|v| !v.is_negative());
        let minus = vals.iter().all(|v| !v.is_positive());
        ok &= plus;
        if plus && minus {
            ok &= base.contains(&x);
        }
    }
    ok
}

/// For nef classes `N_1, …, N_p`, `L_i N_1 ⋯ N_p = 0` iff its product with
/// `ω^{n−i−p}` vanishes, iff its products with all family tuples vanish.
pub fn nef_product_vanishing_check(chain: &InvariantChain, i: usize, nefs: &[HermitianClass]) -> Result<bool> {
    let n = chain.n;
    let p = nefs.len();
    if i + p > n {
        return Err(Error::BadDegree { p: i + p, q: i + p, n });
    }
    let cs: Vec<&HermitianClass> = nefs.iter().collect();
    let x = cup(&chain.levels[i], &product(n, &cs));
    let zero = x.is_zero();
    let one = real_value(eval_top(&cup(&x, &power(&chain.omega.to_hodge(), n - i - p)))).is_zero();
    let family = kahler_family(n);
    let every = multisets(family.len(), n - i - p).iter().all(|tuple| {
        let ts: Vec<&HermitianClass> = tuple.iter().map(|&k| &family[k]).collect();
        Pairing::new(&product(n, &ts)).eval(&x).is_zero()
    });
    Ok(zero == one && one == every)
}

/// No chain class is numerically trivial: `L_i ∉ 𝒩^i` for `i ≥ 1`.
pub fn chain_not_null_check(chain: &InvariantChain, spaces: &FiltrationSpaces) -> bool {
    chain.levels.iter().enumerate().all(|(i, l)| !spaces.null[i].contains(&l.coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::{full_jordan, on_square_lattice, u_n_on_torus};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn qm(rows: &[&[i64]]) -> QMatrix {
        QMatrix::from_i64_rows(rows)
    }

    #[test]
    fn identity_chain_is_powers() {
        let n = 3;
        let t = TorusModel::square(n);
        let w = HermitianClass::identity(n);
        let chain = build_chain_cyclic(&t, &TorusAutomorphism::identity(n), &w).unwrap();
        for i in 0..=n {
            assert_eq!(chain.levels[i], power(&w.to_hodge(), i));
        }
        let sp = compute_spaces(&chain).unwrap();
        assert!(sp.all_pass(), "{:?}", sp.checks);
        assert_eq!(sp.f_dims(), vec![0, 0, 8, 9]);
        let ss = s_sequence(&t, &TorusAutomorphism::identity(n), &chain, &sp, &w).unwrap();
        assert!(ss.s.is_empty());
        assert_eq!(h_level(&t, &TorusAutomorphism::identity(n), &sp).unwrap(), 0);
    }

    #[test]
    fn jordan_block_sequence() {
        for n in 2..=3 {
            let t = TorusModel::square(n);
            let g = full_jordan(n);
            let w = HermitianClass::identity(n);
            let chain = build_chain_cyclic(&t, &g, &w).unwrap();
            assert!(chain.invariance_checks().iter().all(|c| c.pass));
            let sp = compute_spaces(&chain).unwrap();
            assert!(sp.all_pass(), "{:?}", sp.checks);
            let ss = s_sequence(&t, &g, &chain, &sp, &w).unwrap();
            assert!(ss.all_pass(), "{:?}", ss.checks);
            assert_eq!(ss.s, (1..n).rev().collect::<Vec<_>>());
            assert_eq!(h_level(&t, &g, &sp).unwrap(), n - 1);
        }
    }

    #[test]
    fn level_one_is_rank_deficient() {
        let t = TorusModel::square(2);
        let chain = build_chain_cyclic(&t, &full_jordan(2), &HermitianClass::identity(2)).unwrap();
        let m1 = &chain.witnesses[0];
        let i = m1.inertia();
        assert_eq!((i.n_plus, i.n_zero, i.n_minus), (1, 1, 0));
    }

    #[test]
    fn group_chain_matches_cyclic() {
        let case = u_n_on_torus(2).unwrap();
        let t = &case.torus;
        let gens = case.automorphisms();
        let w = HermitianClass::identity(2);
        let a = build_chain_group(t, &gens, &w, DEFAULT_MAX_STEPS).unwrap();
        let b = build_chain_cyclic(t, &gens[0], &w).unwrap();
        assert_eq!(a.levels, b.levels);
    }

    #[test]
    fn transverse_pair_has_no_joint_chain() {
        let t = TorusModel::square(2);
        let g1 = TorusAutomorphism::new(on_square_lattice(&qm(&[&[1, 1], &[0, 1]])));
        let g2 = TorusAutomorphism::new(on_square_lattice(&qm(&[&[1, 0], &[1, 1]])));
        let err = build_chain_group(&t, &[g1, g2], &HermitianClass::identity(2), DEFAULT_MAX_STEPS).unwrap_err();
        assert!(matches!(err, Error::LChainNotFound { level: 0, .. }), "{err:?}");
    }

    #[test]
    fn q_arity_and_degree() {
        let t = TorusModel::square(3);
        let chain = build_chain_cyclic(&t, &full_jordan(3), &HermitianClass::identity(3)).unwrap();
        assert!(quadratic_form_q(&chain, 1, &[]).is_ok());
        assert!(matches!(quadratic_form_q(&chain, 2, &[]), Err(Error::BadDegree { .. })));
        assert!(matches!(quadratic_form_q(&chain, 0, &[]), Err(Error::WrongArity { .. })));
    }

    #[test]
    fn hodge_riemann_on_chain() {
        let t = TorusModel::square(3);
        let chain = build_chain_cyclic(&t, &full_jordan(3), &HermitianClass::identity(3)).unwrap();
        let sp = compute_spaces(&chain).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for i in 0..=1 {
            let tuple: Vec<HermitianClass> = (0..3 - i - 2).map(|_| crate::gallery::random_kahler(3, &mut rng)).collect();
            let extra = crate::gallery::random_kahler(3, &mut rng);
            let (on_p, on_f) = hodge_riemann_check(&chain, &sp, i, &tuple, &extra).unwrap();
            assert!(on_p.is_nsd() && on_f.is_nsd());
        }
    }

    #[test]
    fn root_space_examples() {
        let n = 3;
        let t = TorusModel::square(n);
        let g = full_jordan(n);
        let w = HermitianClass::identity(n);
        let chain = build_chain_cyclic(&t, &g, &w).unwrap();
        let sp = compute_spaces(&chain).unwrap();
        let zero = HermitianClass { h: CMatrix::zeros(n, n) };
        assert!(primitive_root_membership(&chain, &sp, 1, &zero).unwrap().member);
        let rec = expansion_classes(&t, &g, &w).unwrap();
        let ss = s_sequence(&t, &g, &chain, &sp, &w).unwrap();
        for (j, &s) in ss.s.iter().enumerate() {
            let c = &rec.omega_classes[2 * j + 1];
            let d = primitive_root_membership(&chain, &sp, s, c).unwrap();
            assert!(d.member && d.vanishing_consistent);
        }
        assert_eq!(primitive_root_membership(&chain, &sp, 1, &w).unwrap_err(), Error::NotInFj(1));
    }

    #[test]
    fn root_space_rejects_uncompensated_direction() {
        let diag = |v: &[i64]| HermitianClass::from_real(QMatrix::diag(&v.iter().map(|&x| Rational::from_int(x)).collect::<Vec<_>>())).unwrap();
        let chain = InvariantChain::from_witnesses(
            vec![diag(&[0, 1, -1]), HermitianClass::identity(3), diag(&[0, 1, 0])],
            HermitianClass::identity(3),
        )
        .unwrap();
        let sp = compute_spaces(&chain).unwrap();
        let c = HermitianClass::from_real(qm(&[&[0, 0, 0], &[0, 0, 1], &[0, 1, 0]])).unwrap();
        let d = primitive_root_membership(&chain, &sp, 1, &c).unwrap();
        assert!(!d.member);
        assert_eq!(d.blocking_tuple, Some(vec![0]));
        let half = c.scale(&Rational::new(1, 2));
        assert!(!primitive_root_membership(&chain, &sp, 1, &half).unwrap().member);
    }

    #[test]
    fn multisets_count() {
        assert_eq!(multisets(4, 2).len(), 10);
        assert_eq!(multisets(5, 0), vec![Vec::<usize>::new()]);
    }
}
