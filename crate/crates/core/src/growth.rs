//! Polynomial growth of `(g^m)*` on the Hodge pieces of a torus.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{binomial, nilpotency_index};
use crate::matrix::CMatrix;
use crate::rational::Rational;
use crate::torus::{is_kahler, pullback_with, HermitianClass, TorusAutomorphism, TorusModel};

/// The classes `ω_j = (g* − Id)^j ω` for `j ≤ top_index`.
#[derive(Clone, Debug)]
pub struct ExpansionRecord {
    pub omega_classes: Vec<HermitianClass>,
    pub top_index: usize,
}

fn require_unipotent(g: &TorusAutomorphism) -> Result<()> {
    if g.is_unipotent() {
        Ok(())
    } else {
        Err(Error::NotUnipotent(None))
    }
}

/// `ω_{j+1} = g*ω_j − ω_j` until it vanishes, then check
/// `(g^m)*ω = Σ_j C(m,j) ω_j` for `m ≤ top_index + 2`.
pub fn expansion_classes(t: &TorusModel, g: &TorusAutomorphism, omega: &HermitianClass) -> Result<ExpansionRecord> {
    require_unipotent(g)?;
    if !is_kahler(omega) {
        return Err(Error::NotKahler);
    }
    let a = t.h10_action(g)?;
    expand_with(&a, omega)
}

/// Expansion for an arbitrary starting class, given the `H^{1,0}` action.
pub fn expand_with(a: &CMatrix, start: &HermitianClass) -> Result<ExpansionRecord> {
    let n = start.n();
    let mut classes = vec![start.clone()];
    loop {
        let last = classes.last().unwrap();
        let next = pullback_with(a, last).sub(last);
        if next.h.is_zero() {
            break;
        }
        classes.push(next);
        if classes.len() > n * n + 1 {
            return Err(Error::NotUnipotent(Some("on H^{1,1}".into())));
        }
    }
    let top = classes.len() - 1;
    let mut am = CMatrix::identity(n);
    for m in 0..=top + 2 {
        let direct = pullback_with(&am, start);
        let mut sum = HermitianClass { h: CMatrix::zeros(n, n) };
        for (j, c) in classes.iter().enumerate().take(m + 1) {
            sum = sum.add(&c.scale(&Rational::from_int(binomial(m, j) as i64)));
        }
        if direct != sum {
            return Err(Error::Invariant { generator: None, invariant: format!("binomial expansion at m = {m}") });
        }
        am = am.mul(a);
    }
    Ok(ExpansionRecord { omega_classes: classes, top_index: top })
}

/// Largest Jordan block of `g*` on `H^{p,q}`, minus one.
pub fn growth_exponent(t: &TorusModel, g: &TorusAutomorphism, p: usize, q: usize) -> Result<usize> {
    require_unipotent(g)?;
    let act = t.action_on_hpq(g, p, q)?;
    exponent_of(&act)
}

fn exponent_of(act: &CMatrix) -> Result<usize> {
    let idx = nilpotency_index(&act.minus_identity()).ok_or(Error::NotUnipotent(None))?;
    Ok(idx.saturating_sub(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundCheck {
    pub name: String,
    pub bound: Option<usize>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeReport {
    pub p: usize,
    pub q: usize,
    pub exponent: usize,
    pub checks: Vec<BoundCheck>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthReport {
    pub n: usize,
    pub degrees: Vec<DegreeReport>,
    pub all_pass: bool,
}

impl GrowthReport {
    pub fn exponent(&self, p: usize, q: usize) -> Option<usize> {
        self.degrees.iter().find(|d| d.p == p && d.q == q).map(|d| d.exponent)
    }

    pub fn failures(&self) -> Vec<String> {
        self.degrees
            .iter()
            .flat_map(|d| d.checks.iter().filter(|c| !c.pass).map(move |c| format!("({},{}) {}", d.p, d.q, c.name)))
            .collect()
    }
}

/// Every `(p,q)` exponent together with the torus bounds: `(p'+q')(n−1)`,
/// evenness on `H^{1,1}`, `2p(n−1) − 2` on `H^{p,p}` for `p ≥ 2`, and
/// symmetry under `(p,q) ↦ (n−p, n−q)`.
pub fn verify_growth_bounds(t: &TorusModel, g: &TorusAutomorphism) -> Result<GrowthReport> {
    require_unipotent(g)?;
    let n = t.n();
    let a = t.h10_action(g)?;
    let pairs: Vec<(usize, usize)> = (0..=n).flat_map(|p| (0..=n).map(move |q| (p, q))).collect();
    let exps: Vec<usize> = pairs
        .iter()
        .map(|&(p, q)| exponent_of(&crate::torus::hpq_from_h10(&a, p, q)))
        .collect::<Result<_>>()?;
    let at = |p: usize, q: usize| exps[p * (n + 1) + q];
    let mut degrees = Vec::with_capacity(pairs.len());
    for &(p, q) in &pairs {
        let e = at(p, q);
        let (pp, qq) = (p.min(n - p), q.min(n - q));
        let main = (pp + qq) * n.saturating_sub(1);
        let mut checks = vec![BoundCheck { name: "torus bound".into(), bound: Some(main), pass: e <= main }];
        if p == 1 && q == 1 {
            checks.push(BoundCheck { name: "even on H^{1,1}".into(), bound: None, pass: e % 2 == 0 });
        }
        if p == q && p >= 2 {
            let b = 2 * p * (n - 1) - 2;
            checks.push(BoundCheck { name: "H^{p,p} bound".into(), bound: Some(b), pass: e <= b });
        }
        checks.push(BoundCheck { name: "duality".into(), bound: None, pass: e == at(n - p, n - q) });
        degrees.push(DegreeReport { p, q, exponent: e, checks });
    }
    let all_pass = degrees.iter().all(|d| d.checks.iter().all(|c| c.pass));
    Ok(GrowthReport { n, degrees, all_pass })
}

fn max_abs_entry(m: &CMatrix) -> Rational {
    m.entries()
        .iter()
        .flat_map(|z| [z.re.abs(), z.im.abs()])
        .max()
        .unwrap_or(Rational::ZERO)
}

/// Largest `|Re|` or `|Im|` among the entries of `(g^m)*` on `H^{p,q}`.
pub fn norm_growth_sample(t: &TorusModel, g: &TorusAutomorphism, p: usize, q: usize, m: u64) -> Result<Rational> {
    let act = t.action_on_hpq(g, p, q)?;
    Ok(max_abs_entry(&act.pow(m)))
}

/// Least-squares slope of `log ‖(g^m)*‖` against `log m` for
/// `m = 2^4, …, 2^12`.
pub fn fitted_growth_slope(t: &TorusModel, g: &TorusAutomorphism, p: usize, q: usize) -> Result<f64> {
    let act = t.action_on_hpq(g, p, q)?;
    let mut pw = act.pow(16);
    let mut pts = Vec::new();
    for k in 4..=12 {
        let norm = max_abs_entry(&pw);
        pts.push(((k as f64) * std::f64::consts::LN_2, norm.ln_abs()));
        pw = pw.mul(&pw);
    }
    let len = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / len;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / len;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Top index of the expansion for random Kähler classes, sampled until two
/// consecutive draws agree (at most five). Returns the largest value seen.
pub fn generic_top_index(t: &TorusModel, g: &TorusAutomorphism, rng: &mut impl Rng) -> Result<usize> {
    let mut best = 0;
    let mut prev = None;
    for _ in 0..5 {
        let w = crate::gallery::random_kahler(t.n(), rng);
        let k = expansion_classes(t, g, &w)?.top_index;
        best = best.max(k);
        if prev == Some(k) {
            break;
        }
        prev = Some(k);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::full_jordan;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_has_no_growth() {
        let t = TorusModel::square(3);
        let g = TorusAutomorphism::identity(3);
        let rec = expansion_classes(&t, &g, &HermitianClass::identity(3)).unwrap();
        assert_eq!(rec.top_index, 0);
        let rep = verify_growth_bounds(&t, &g).unwrap();
        assert!(rep.all_pass);
        assert!(rep.degrees.iter().all(|d| d.exponent == 0));
        assert_eq!(norm_growth_sample(&t, &g, 1, 1, 37).unwrap(), Rational::ONE);
    }

    #[test]
    fn full_jordan_saturates() {
        for n in 2..=3 {
            let t = TorusModel::square(n);
            let g = full_jordan(n);
            assert_eq!(growth_exponent(&t, &g, 1, 1).unwrap(), 2 * (n - 1));
            assert_eq!(growth_exponent(&t, &g, 0, 0).unwrap(), 0);
            let rec = expansion_classes(&t, &g, &HermitianClass::identity(n)).unwrap();
            assert_eq!(rec.top_index, 2 * (n - 1));
        }
    }

    #[test]
    fn jordan_block_norm_is_linear() {
        let t = TorusModel::square(2);
        let g = full_jordan(2);
        for m in [1u64, 5, 40] {
            assert_eq!(norm_growth_sample(&t, &g, 1, 0, m).unwrap(), Rational::from_int(m as i64));
        }
        let s = fitted_growth_slope(&t, &g, 1, 1).unwrap();
        assert_eq!(s.round() as usize, 2);
    }

    #[test]
    fn non_kahler_rejected() {
        let t = TorusModel::square(2);
        let w = HermitianClass::from_real(crate::matrix::QMatrix::from_i64_rows(&[&[1, 0], &[0, 0]])).unwrap();
        assert_eq!(expansion_classes(&t, &full_jordan(2), &w).unwrap_err(), Error::NotKahler);
    }

    #[test]
    fn generic_matches_structural() {
        let t = TorusModel::square(3);
        let g = full_jordan(3);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(generic_top_index(&t, &g, &mut rng).unwrap(), growth_exponent(&t, &g, 1, 1).unwrap());
    }
}
