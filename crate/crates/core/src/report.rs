//! JSON reports behind the command-line verbs.
//!
//! Every report is a `serde_json::Value` whose objects have sorted keys.
//! Any object carrying both `name` and `pass` is a check: `true` passes,
//! `false` is a violation, `null` is undetermined. The report outcome is
//! derived from those checks alone.

use std::collections::BTreeMap;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::filtration::{
    build_chain_cyclic, build_chain_group, chain_not_null_check, compute_spaces, cone_lineality_check, h_level,
    hodge_riemann_check, primitive_root_membership, s_sequence, DEFAULT_MAX_STEPS,
};
use crate::gallery::{
    affine_example, eisenstein_case, eisenstein_quotient_check, random_kahler, random_unipotent_group,
    subtorus_translation_group, u_n_on_torus, unitriangular_generators, on_square_lattice, GalleryCase,
};
use crate::group::{annihilation_product, derived_length_bound, find_nontrivial_commutator, lcs_oracle, lie_closure, MatrixGroup};
use crate::groupfile::GroupFile;
use crate::growth::{expansion_classes, fitted_growth_slope, verify_growth_bounds};
use crate::linalg::quasi_unipotent_order;
use crate::matrix::QMatrix;
use crate::rational::Rational;
use crate::torus::{is_kahler, HermitianClass, TorusAutomorphism};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    Undetermined,
    Violation,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::Violation => 3,
            Outcome::Undetermined => 4,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub outcome: Outcome,
    pub body: Value,
}

impl Report {
    pub fn new(mut body: Value) -> Self {
        let outcome = outcome_of(&body);
        if let Value::Object(m) = &mut body {
            m.insert("outcome".into(), json!(outcome));
        }
        Report { outcome, body }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("reports serialize");
        s.push('\n');
        s
    }
}

fn check(name: impl Into<String>, pass: bool) -> Value {
    json!({ "name": name.into(), "pass": pass })
}

fn undetermined(name: impl Into<String>, reason: impl Into<String>) -> Value {
    json!({ "name": name.into(), "pass": null, "reason": reason.into() })
}

/// `(name, pass)` for every check in the tree, in document order.
pub fn collect_checks(v: &Value) -> Vec<(String, Option<bool>)> {
    let mut out = Vec::new();
    walk(v, &mut out);
    out
}

fn walk(v: &Value, out: &mut Vec<(String, Option<bool>)>) {
    match v {
        Value::Object(m) => {
            if let (Some(Value::String(name)), Some(pass)) = (m.get("name"), m.get("pass")) {
                out.push((name.clone(), pass.as_bool()));
            }
            m.values().for_each(|x| walk(x, out));
        }
        Value::Array(a) => a.iter().for_each(|x| walk(x, out)),
        _ => {}
    }
}

fn outcome_of(v: &Value) -> Outcome {
    collect_checks(v)
        .iter()
        .map(|(_, p)| match p {
            Some(true) => Outcome::Ok,
            Some(false) => Outcome::Violation,
            None => Outcome::Undetermined,
        })
        .max()
        .unwrap_or(Outcome::Ok)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report pieces serialize")
}

/// Deterministic generator for a unit of work identified by `tags`.
pub fn rng_for(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut h = seed ^ 0x9e37_79b9_7f4a_7c15;
    for &t in tags {
        h = (h ^ t).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn lattice_group(dim: usize, mats: Vec<QMatrix>) -> Result<MatrixGroup> {
    MatrixGroup::new(dim, mats)
}

// ---------------------------------------------------------------- analyze

pub fn analyze_group(file: &GroupFile) -> Result<Report> {
    let n = file.n();
    let gens: Vec<Value> = file
        .generators
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let unipotent = g.is_unipotent();
            let mut o = Map::new();
            o.insert("index".into(), json!(i));
            o.insert("unipotent".into(), json!(unipotent));
            match quasi_unipotent_order(&g.m) {
                Ok(k) => o.insert("quasi_unipotent_order".into(), json!(k)),
                Err(e) => o.insert("quasi_unipotent_order_error".into(), json!(e.to_string())),
            };
            if !unipotent {
                o.insert("diagnostic".into(), json!(Error::NotUnipotent(Some(format!("generator {i}"))).to_string()));
            }
            Value::Object(o)
        })
        .collect();
    let all_unipotent = file.generators.iter().all(TorusAutomorphism::is_unipotent);
    let mut body = json!({
        "command": "analyze-group",
        "n": n,
        "generator_count": file.generators.len(),
        "generators": gens,
        "metadata": file.metadata,
    });
    if all_unipotent {
        let inv = group_invariants(file)?;
        body["expected"] = expected_checks(file, &inv);
        body["group"] = inv;
    } else {
        body["group"] = Value::Null;
    }
    Ok(Report::new(body))
}

fn group_invariants(file: &GroupFile) -> Result<Value> {
    let n = file.n();
    let mats: Vec<QMatrix> = file.generators.iter().map(|g| g.m.clone()).collect();
    let g = lattice_group(2 * n, mats.clone())?;
    let lie = lie_closure(&g)?;
    let c = lie.class();
    let l = lie.derived_length();
    let oracle = lcs_oracle(&g, c + 1) && (c == 0 || !lcs_oracle(&g, c));
    let h1 = lattice_group(2 * n, mats.iter().map(QMatrix::transpose).collect())?;
    let h1_class = lie_closure(&h1)?.class();
    let h11_mats = file.generators.iter().map(|a| file.torus.action_on_h11_real(a)).collect::<Result<Vec<_>>>()?;
    let h11 = lattice_group(n * n, h11_mats)?;
    let h11_lie = lie_closure(&h11)?;
    let bound = (c >= 1).then(|| derived_length_bound(c));
    Ok(json!({
        "lie_dimension": lie.dimension(),
        "nilpotency_class": c,
        "derived_length": l,
        "lower_central_dims": lie.lower_central_dims(),
        "derived_dims": lie.derived_dims(),
        "derived_length_bound": bound,
        "h1_class": h1_class,
        "h11_class": h11_lie.class(),
        "h11_derived_length": h11_lie.derived_length(),
        "checks": [
            check("commutator enumeration agrees with Lie class", oracle),
            check("derived length <= class", l <= c),
            check("derived length <= floor(log2 class) + 1", bound.map_or(l == 0, |b| l <= b)),
            check("class on H^1 <= n-1", h1_class + 1 <= n.max(1)),
            check("derived length on H^{1,1} <= n-1", h11_lie.derived_length() + 1 <= n.max(1)),
        ],
    }))
}

/// Metadata entries `expected.<invariant>` compared with computed values.
fn expected_checks(file: &GroupFile, inv: &Value) -> Value {
    let mut out = Vec::new();
    for (k, v) in &file.metadata {
        let Some(name) = k.strip_prefix("expected.") else { continue };
        let computed = inv.get(name).and_then(Value::as_i64);
        let want = v.parse::<i64>().ok();
        let mut o = json!({ "name": format!("expected {name}"), "expected": v, "computed": computed });
        o["pass"] = match (computed, want) {
            (Some(c), Some(w)) => json!(c == w),
            _ => Value::Null,
        };
        out.push(o);
    }
    Value::Array(out)
}

// ----------------------------------------------------------------- growth

#[derive(Clone, Debug)]
pub struct GrowthOptions {
    /// Restrict the listed degrees to one `(p, q)`; all bounds are still checked.
    pub pq: Option<(usize, usize)>,
    pub samples: usize,
    pub max_word_len: usize,
    pub seed: u64,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions { pq: None, samples: 3, max_word_len: 1, seed: 0 }
    }
}

/// Positive words of length `1..=max_len`, shortest first, then lexicographic.
pub fn positive_words(gens: usize, max_len: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|w| {
                (0..gens).map(move |g| {
                    let mut v = w.clone();
                    v.push(g);
                    v
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

fn word_label(w: &[usize]) -> String {
    w.iter().map(|i| format!("g{i}")).collect::<Vec<_>>().join("*")
}

pub struct GrowthOutput {
    pub report: Report,
    pub csv: String,
}

pub fn growth(file: &GroupFile, opts: &GrowthOptions) -> Result<GrowthOutput> {
    let n = file.n();
    if let Some((p, q)) = opts.pq {
        if p > n || q > n {
            return Err(Error::BadDegree { p, q, n });
        }
    }
    let words = positive_words(file.generators.len(), opts.max_word_len);
    let rows: Vec<(Value, Vec<String>)> = words
        .par_iter()
        .enumerate()
        .map(|(wi, w)| growth_word(file, opts, wi, w))
        .collect::<Result<_>>()?;
    let mut csv = String::from("word,p,q,exponent,torus_bound,pass\n");
    let mut entries = Vec::with_capacity(rows.len());
    for (v, lines) in rows {
        entries.push(v);
        for l in lines {
            csv.push_str(&l);
            csv.push('\n');
        }
    }
    let body = json!({
        "command": "growth",
        "n": n,
        "max_word_len": opts.max_word_len,
        "samples": opts.samples,
        "seed": opts.seed,
        "pq": opts.pq.map(|(p, q)| format!("{p},{q}")).unwrap_or_else(|| "all".into()),
        "words": entries,
        "metadata": file.metadata,
    });
    Ok(GrowthOutput { report: Report::new(body), csv })
}

fn growth_word(file: &GroupFile, opts: &GrowthOptions, wi: usize, w: &[usize]) -> Result<(Value, Vec<String>)> {
    let t = &file.torus;
    let label = word_label(w);
    let m = w.iter().fold(QMatrix::identity(2 * t.n()), |acc, &i| acc.mul(&file.generators[i].m));
    let g = TorusAutomorphism::new(m);
    if !g.is_unipotent() {
        let order = quasi_unipotent_order(&g.m).ok();
        return Ok((
            json!({
                "word": label,
                "quasi_unipotent_order": order,
                "check": undetermined("unipotent", "growth exponents need a unipotent action; pass to a power"),
            }),
            vec![],
        ));
    }
    let rep = verify_growth_bounds(t, &g)?;
    let e11 = rep.exponent(1, 1).unwrap_or(0);
    let mut rng = rng_for(opts.seed, &[wi as u64]);
    let tops: Vec<usize> = (0..opts.samples)
        .map(|_| Ok(expansion_classes(t, &g, &random_kahler(t.n(), &mut rng))?.top_index))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    if let Some(&top) = tops.iter().max() {
        checks.push(check("generic top index equals H^{1,1} exponent", top == e11));
    }
    let (sp, sq) = opts.pq.unwrap_or((1, 1));
    let mut slope = Value::Null;
    if w.len() == 1 {
        let s = fitted_growth_slope(t, &g, sp, sq)?;
        let e = rep.exponent(sp, sq).unwrap_or(0);
        checks.push(check(format!("fitted slope rounds to exponent on H^{{{sp},{sq}}}"), s.round() == e as f64));
        slope = json!(format!("{s:.3}"));
    }
    let degrees: Vec<_> = rep.degrees.iter().filter(|d| opts.pq.is_none_or(|pq| pq == (d.p, d.q))).collect();
    let lines = degrees
        .iter()
        .map(|d| {
            let b = d.checks.iter().find(|c| c.name == "torus bound").and_then(|c| c.bound).unwrap_or(0);
            let pass = d.checks.iter().all(|c| c.pass);
            format!("{label},{},{},{},{b},{pass}", d.p, d.q, d.exponent)
        })
        .collect();
    let hidden: Vec<_> = rep
        .degrees
        .iter()
        .filter(|d| opts.pq.is_some_and(|pq| pq != (d.p, d.q)))
        .flat_map(|d| d.checks.iter().filter(|c| !c.pass).map(move |c| check(format!("({},{}) {}", d.p, d.q, c.name), false)))
        .collect();
    checks.extend(hidden);
    Ok((
        json!({
            "word": label,
            "exponent_h11": e11,
            "degrees": to_value(&degrees),
            "sampled_top_indices": tops,
            "fitted_slope": slope,
            "checks": checks,
        }),
        lines,
    ))
}

// -------------------------------------------------------------- decompose

#[derive(Clone, Debug)]
pub struct DecomposeOptions {
    pub seed: u64,
    /// Random Kähler tuples per level for the semidefiniteness checks.
    pub tuples: usize,
    /// Reference Kähler class; the identity form when absent.
    pub omega: Option<HermitianClass>,
    pub group_chain: bool,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { seed: 0, tuples: 2, omega: None, group_chain: true }
    }
}

/// Real symmetric `n × n` rows of rationals, which must be positive definite.
pub fn parse_omega(text: &str, n: usize) -> Result<HermitianClass> {
    let rows: Vec<Vec<Rational>> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("omega: {e}")))?;
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::Parse(format!("omega must be {n}x{n}")));
    }
    let h = HermitianClass::from_real(QMatrix::from_rows(rows))?;
    if !is_kahler(&h) {
        return Err(Error::NotKahler);
    }
    Ok(h)
}

pub fn decompose(file: &GroupFile, generator: usize, opts: &DecomposeOptions) -> Result<Report> {
    let mut body = decompose_value(file, generator, opts)?;
    body["command"] = json!("decompose");
    body["metadata"] = to_value(&file.metadata);
    if opts.group_chain {
        let omega = opts.omega.clone().unwrap_or_else(|| HermitianClass::identity(file.n()));
        body["group_chain"] = group_chain_value(file, &omega)?;
    }
    Ok(Report::new(body))
}

fn decompose_value(file: &GroupFile, generator: usize, opts: &DecomposeOptions) -> Result<Value> {
    let t = &file.torus;
    let n = t.n();
    let g = file.generators.get(generator).ok_or_else(|| {
        Error::BadParameters(format!("generator {generator} out of range (file has {})", file.generators.len()))
    })?;
    let omega = opts.omega.clone().unwrap_or_else(|| HermitianClass::identity(n));
    let chain = build_chain_cyclic(t, g, &omega)?;
    let spaces = compute_spaces(&chain)?;
    let seq = s_sequence(t, g, &chain, &spaces, &omega)?;
    let hl = h_level(t, g, &spaces)?;
    let mut rng = rng_for(opts.seed, &[generator as u64]);

    let other = random_kahler(n, &mut rng);
    let chain2 = build_chain_cyclic(t, g, &other)?;
    let spaces2 = compute_spaces(&chain2)?;
    let seq2 = s_sequence(t, g, &chain2, &spaces2, &other)?;

    let mut hr = Vec::new();
    for i in 0..n.saturating_sub(1) {
        let k = n - i - 2;
        let mut tuples = vec![("omega".to_string(), vec![omega.clone(); k], omega.clone())];
        for s in 0..opts.tuples {
            let tuple = (0..k).map(|_| random_kahler(n, &mut rng)).collect();
            tuples.push((format!("random {s}"), tuple, random_kahler(n, &mut rng)));
        }
        for (label, tuple, extra) in tuples {
            let (on_p, on_f) = hodge_riemann_check(&chain, &spaces, i, &tuple, &extra)?;
            hr.push(json!({
                "level": i,
                "tuple": label,
                "inertia_on_primitive": on_p,
                "inertia_on_next_f": on_f,
                "name": format!("Q_{i} has no positive direction"),
                "pass": on_p.n_plus == 0 && on_f.n_plus == 0,
            }));
        }
    }

    let rec = expansion_classes(t, g, &omega)?;
    let mut roots = Vec::new();
    for (j, &s) in seq.s.iter().enumerate() {
        if s == 0 || s >= n {
            continue;
        }
        let c = &rec.omega_classes[2 * j + 1];
        let d = primitive_root_membership(&chain, &spaces, s, c)?;
        let mut v = to_value(&d);
        v["name"] = json!(format!("ω_{} in W_{s}", 2 * j + 1));
        v["pass"] = json!(d.member);
        v["level"] = json!(s);
        roots.push(v);
    }

    let mut cone_checks = vec![check("no chain class is numerically trivial", chain_not_null_check(&chain, &spaces))];
    for i in 1..=n {
        cone_checks.push(check(format!("C_{i} ∩ -C_{i} = F_{}", i - 1), cone_lineality_check(&chain, &spaces, i, &mut rng, 6)));
    }

    let witnesses: Vec<Vec<Rational>> = chain.witnesses.iter().map(HermitianClass::real_coords).collect();
    Ok(json!({
        "generator": generator,
        "n": n,
        "omega": omega.real_coords(),
        "chain": {
            "witnesses": witnesses,
            "certificates": to_value(&chain.certificates),
            "checks": to_value(&chain.invariance_checks()),
        },
        "spaces": {
            "f_dims": spaces.f_dims(),
            "f_prime_dims": spaces.f_prime_dims(),
            "cone_span_dims": spaces.cone_span.iter().map(|s| s.dim()).collect::<Vec<_>>(),
            "null_dims": spaces.null.iter().map(|s| s.dim()).collect::<Vec<_>>(),
            "checks": to_value(&spaces.checks),
        },
        "s_sequence": to_value(&seq),
        "s_sequence_second_class": {
            "omega": other.real_coords(),
            "s": seq2.s,
            "checks": to_value(&seq2.checks),
        },
        "s_sequence_independent_of_omega": check("s-sequence independent of the Kähler class", seq.s == seq2.s),
        "h_level": hl,
        "h_level_check": check("h-level <= n-1", hl + 1 <= n.max(1)),
        "hodge_riemann": hr,
        "root_spaces": roots,
        "cone_checks": cone_checks,
    }))
}

fn group_chain_value(file: &GroupFile, omega: &HermitianClass) -> Result<Value> {
    if !file.generators.iter().all(TorusAutomorphism::is_unipotent) {
        return Ok(json!({ "status": "skipped", "check": undetermined("joint invariant chain", "group is not unipotent") }));
    }
    match build_chain_group(&file.torus, &file.generators, omega, DEFAULT_MAX_STEPS) {
        Ok(chain) => {
            let spaces = compute_spaces(&chain)?;
            Ok(json!({
                "status": "found",
                "certificates": to_value(&chain.certificates),
                "f_dims": spaces.f_dims(),
                "f_prime_dims": spaces.f_prime_dims(),
                "checks": to_value(&chain.invariance_checks()),
                "space_checks": to_value(&spaces.checks),
            }))
        }
        Err(Error::LChainNotFound { level, iterations }) => Ok(json!({
            "status": "not_found",
            "level": level,
            "iterations": iterations,
            "check": undetermined("joint invariant chain", format!("no fixed class at level {level} after {iterations} steps")),
        })),
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------- gallery

/// `u_n N`, `affine N KAPPA` or `eisenstein N`.
pub fn gallery_case(name: &str, params: &[usize]) -> Result<GalleryCase> {
    let arity = |k: usize| {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::BadParameters(format!("{name} takes {k} parameter(s), got {}", params.len())))
        }
    };
    match name {
        "u_n" => {
            arity(1)?;
            u_n_on_torus(params[0])
        }
        "affine" => {
            arity(2)?;
            affine_example(params[0], params[1])
        }
        "eisenstein" => {
            arity(1)?;
            let case = eisenstein_case(params[0])?;
            if !eisenstein_quotient_check(params[0]) {
                return Err(Error::Invariant { generator: None, invariant: "-ω commutes with the group".into() });
            }
            Ok(case)
        }
        other => Err(Error::BadParameters(format!("unknown gallery case {other:?}"))),
    }
}

/// Largest torus dimension for which [`suite`] runs the filtration analysis.
pub const SUITE_MAX_FILTRATION_DIM: usize = 4;

/// Analysis, growth and per-generator decomposition of one file.
pub fn suite(file: &GroupFile, seed: u64) -> Result<Report> {
    let analysis = analyze_group(file)?;
    let growth = growth(file, &GrowthOptions { seed, ..GrowthOptions::default() })?;
    let unipotent = file.generators.iter().all(TorusAutomorphism::is_unipotent);
    let filtration = unipotent && file.n() <= SUITE_MAX_FILTRATION_DIM;
    let decomps: Vec<Value> = if filtration {
        (0..file.generators.len())
            .into_par_iter()
            .map(|i| {
                let opts = DecomposeOptions { seed, group_chain: false, ..DecomposeOptions::default() };
                decompose_value(file, i, &opts)
            })
            .collect::<Result<_>>()?
    } else {
        vec![]
    };
    let omega = HermitianClass::identity(file.n());
    let strip = |mut v: Value| {
        if let Value::Object(m) = &mut v {
            m.remove("metadata");
            m.remove("outcome");
            m.remove("command");
        }
        v
    };
    let group_chain = if filtration { group_chain_value(file, &omega)? } else { Value::Null };
    Ok(Report::new(json!({
        "command": "suite",
        "metadata": file.metadata,
        "analysis": strip(analysis.body),
        "growth": strip(growth.report.body),
        "filtration_run": filtration,
        "decompositions": decomps,
        "group_chain": group_chain,
    })))
}

// ------------------------------------------------------------------- fuzz

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub undetermined: usize,
}

/// Check names with subscript indices replaced by `k`, so that per-level
/// checks of one kind share a counter.
fn normalize(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut in_index = false;
    for ch in name.chars() {
        if ch.is_ascii_digit() && (in_index || out.ends_with('_')) {
            if !in_index {
                out.push('k');
            }
            in_index = true;
            continue;
        }
        in_index = false;
        out.push(ch);
    }
    out
}

pub fn tally(reports: &[&Value]) -> BTreeMap<String, Tally> {
    let mut out: BTreeMap<String, Tally> = BTreeMap::new();
    for r in reports {
        for (name, pass) in collect_checks(r) {
            let t = out.entry(normalize(&name)).or_default();
            match pass {
                Some(true) => t.pass += 1,
                Some(false) => t.fail += 1,
                None => t.undetermined += 1,
            }
        }
    }
    out
}

/// Case `i` of a fuzz run: between one and three generators.
pub fn fuzz_case(n: usize, seed: u64, i: usize) -> GalleryCase {
    let s = rng_for(seed, &[n as u64, i as u64]).next_u64();
    random_unipotent_group(n, 1 + i % 3, s)
}

pub fn fuzz(n: usize, count: usize, seed: u64) -> Result<Report> {
    if n == 0 {
        return Err(Error::BadParameters("fuzz needs n >= 1".into()));
    }
    let cases: Vec<Value> = (0..count)
        .into_par_iter()
        .map(|i| {
            let file = GroupFile::from_case(&fuzz_case(n, seed, i));
            let r = suite(&file, seed ^ i as u64)?;
            let mut v = r.body;
            v["case"] = json!(i);
            v["generators"] = json!(file.generators.len());
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let refs: Vec<&Value> = cases.iter().collect();
    let counts = tally(&refs);
    let failing: Vec<Value> = cases
        .iter()
        .filter(|c| c.get("outcome").and_then(Value::as_str) == Some("violation"))
        .map(|c| json!({ "case": c["case"], "gallery": c["metadata"]["gallery"] }))
        .collect();
    let undetermined: Vec<Value> = cases
        .iter()
        .filter(|c| c.get("outcome").and_then(Value::as_str) == Some("undetermined"))
        .map(|c| c["case"].clone())
        .collect();
    let mut body = json!({
        "command": "fuzz",
        "n": n,
        "count": count,
        "seed": seed,
        "invariants": to_value(&counts),
        "failing_cases": failing,
        "undetermined_cases": undetermined,
    });
    // the outcome follows the tallies rather than the per-case checks
    let outcome = if counts.values().any(|t| t.fail > 0) {
        Outcome::Violation
    } else if counts.values().any(|t| t.undetermined > 0) {
        Outcome::Undetermined
    } else {
        Outcome::Ok
    };
    body["outcome"] = json!(outcome);
    Ok(Report { outcome, body })
}

// ------------------------------------------------------------- verify-all

pub const GALLERY_SUITE: &[(&str, &[usize])] = &[
    ("u_n", &[2]),
    ("u_n", &[3]),
    ("u_n", &[4]),
    ("affine", &[3, 1]),
    ("affine", &[4, 2]),
    ("affine", &[5, 2]),
    ("eisenstein", &[2]),
    ("eisenstein", &[3]),
];

/// Products `h_1*(Id − g_1*) ⋯` over random unipotent elements vanish for
/// `n` factors; some product of `n − 1` factors does not.
pub fn annihilation_value(n: usize, tuples: usize, seed: u64) -> Value {
    let mut zero = 0;
    for s in 0..tuples {
        let case = random_unipotent_group(n, 2 * n, rng_for(seed, &[n as u64, s as u64, 7]).next_u64());
        let ms: Vec<QMatrix> = case.automorphisms().into_iter().map(|a| a.m).collect();
        let (h, g) = ms.split_at(n);
        if annihilation_product(h, g).map(|p| p.is_zero()).unwrap_or(false) {
            zero += 1;
        }
    }
    let witness = if n >= 2 {
        let taus: Vec<QMatrix> = unitriangular_generators(n).iter().map(on_square_lattice).collect();
        let ids = vec![QMatrix::identity(2 * n); n - 1];
        let found = positive_words(taus.len(), n - 1)
            .into_iter()
            .filter(|w| w.len() == n - 1)
            .find(|w| {
                let g: Vec<QMatrix> = w.iter().map(|&i| taus[i].clone()).collect();
                annihilation_product(&ids, &g).map(|p| !p.is_zero()).unwrap_or(false)
            });
        json!({ "name": format!("nonvanishing product with {} factors", n - 1), "pass": found.is_some(), "word": found })
    } else {
        Value::Null
    };
    json!({
        "n": n,
        "tuples": tuples,
        "zero_products": zero,
        "check": check(format!("all {n}-factor products vanish"), zero == tuples),
        "witness": witness,
    })
}

/// Weight-`n` left-normed commutators of `U(n)` with rational translations
/// in a stable curve factor are all trivial.
pub fn subtorus_translation_value(n: usize, seed: u64) -> Value {
    let gens = subtorus_translation_group(n, seed);
    let hit = find_nontrivial_commutator(&gens, n);
    json!({
        "n": n,
        "generators": gens.len(),
        "nontrivial_commutator": hit,
        "check": check(format!("weight-{n} affine commutators are trivial"), hit.is_none()),
    })
}

pub fn verify_all(seed: u64, fuzz_count: usize) -> Result<Report> {
    let gallery: Vec<Value> = GALLERY_SUITE
        .par_iter()
        .map(|(name, params)| {
            let case = gallery_case(name, params)?;
            let file = GroupFile::from_case(&case);
            let mut v = suite(&file, seed)?.body;
            v["case"] = json!(case.name);
            Ok(v)
        })
        .collect::<Result<_>>()?;
    let fuzzes: Vec<Value> =
        (2..=4).into_par_iter().map(|n| Ok(fuzz(n, fuzz_count, seed)?.body)).collect::<Result<_>>()?;
    let annihilation: Vec<Value> = (1..=4).into_par_iter().map(|n| annihilation_value(n, 50, seed)).collect();
    let subtorus: Vec<Value> = (2..=4).map(|n| subtorus_translation_value(n, seed)).collect();
    let eisenstein: Vec<Value> = (2..=4).map(|n| check(format!("eisenstein descent n={n}"), eisenstein_quotient_check(n))).collect();
    let summary: Vec<Value> = gallery
        .iter()
        .map(|g| json!({ "case": g["case"], "outcome": g["outcome"] }))
        .chain(fuzzes.iter().map(|f| json!({ "case": format!("fuzz n={}", f["n"]), "outcome": f["outcome"] })))
        .collect();
    let fuzz_tallies: Vec<Value> = fuzzes
        .iter()
        .map(|f| {
            let t = f["invariants"].as_object().cloned().unwrap_or_default();
            let failed = t.values().any(|x| x["fail"].as_u64().unwrap_or(0) > 0);
            let undet = t.values().any(|x| x["undetermined"].as_u64().unwrap_or(0) > 0);
            let pass = if failed { json!(false) } else if undet { Value::Null } else { json!(true) };
            json!({ "name": format!("fuzz n={}", f["n"]), "pass": pass })
        })
        .collect();
    let mut gallery_min = gallery.clone();
    for g in &mut gallery_min {
        if let Value::Object(m) = g {
            m.remove("outcome");
        }
    }
    Ok(Report::new(json!({
        "command": "verify-all",
        "seed": seed,
        "fuzz_count": fuzz_count,
        "gallery": gallery_min,
        "fuzz": fuzzes.iter().map(|f| {
            let mut f = f.clone();
            if let Value::Object(m) = &mut f { m.remove("outcome"); }
            f
        }).collect::<Vec<_>>(),
        "fuzz_checks": fuzz_tallies,
        "annihilation": annihilation,
        "subtorus_translations": subtorus,
        "eisenstein": eisenstein,
        "summary": summary,
    })))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn file(name: &str, params: &[usize]) -> GroupFile {
        GroupFile::from_case(&gallery_case(name, params).unwrap())
    }

    #[test]
    fn analyze_u3() {
        let r = analyze_group(&file("u_n", &[3])).unwrap();
        assert_eq!(r.outcome, Outcome::Ok);
        assert_eq!(r.body["group"]["nilpotency_class"], 2);
        assert_eq!(r.body["group"]["derived_length"], 2);
        assert_eq!(r.body["expected"][0]["pass"], true);
    }

    #[test]
    fn analyze_trivial_and_minus_identity() {
        let mut f = file("u_n", &[2]);
        f.generators = vec![TorusAutomorphism::identity(2)];
        let r = analyze_group(&f).unwrap();
        assert_eq!(r.body["group"]["nilpotency_class"], 0);
        f.generators = vec![TorusAutomorphism::new(QMatrix::identity(4).neg())];
        f.metadata.clear();
        let r = analyze_group(&f).unwrap();
        assert_eq!(r.body["generators"][0]["unipotent"], false);
        assert_eq!(r.body["generators"][0]["quasi_unipotent_order"], 2);
        assert!(r.body["generators"][0]["diagnostic"].as_str().unwrap().contains("generator 0"));
        assert_eq!(r.outcome, Outcome::Ok);
    }

    #[test]
    fn growth_words_and_csv() {
        let f = file("u_n", &[3]);
        let out = growth(&f, &GrowthOptions { max_word_len: 2, pq: Some((1, 1)), ..GrowthOptions::default() }).unwrap();
        assert_eq!(out.report.outcome, Outcome::Ok);
        assert_eq!(out.report.body["words"].as_array().unwrap().len(), 3 + 9);
        assert_eq!(out.csv.lines().count(), 1 + 12);
        assert!(out.csv.lines().nth(1).unwrap().starts_with("g0,1,1,"));
    }

    #[test]
    fn decompose_jordan_generator() {
        let f = file("u_n", &[3]);
        let r = decompose(&f, 0, &DecomposeOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::Ok, "{}", r.to_json());
        assert_eq!(r.body["group_chain"]["status"], "found");
        assert!(matches!(decompose(&f, 9, &DecomposeOptions::default()), Err(Error::BadParameters(_))));
    }

    #[test]
    fn outcome_from_checks() {
        assert_eq!(Report::new(json!({"a": [check("x", true)]})).outcome, Outcome::Ok);
        assert_eq!(Report::new(json!({"a": [check("x", true), undetermined("y", "")]})).outcome, Outcome::Undetermined);
        assert_eq!(Report::new(json!({"a": {"b": check("x", false)}, "c": undetermined("y", "")})).outcome, Outcome::Violation);
        assert_eq!(normalize("ω_13 ∉ F'_2"), "ω_k ∉ F'_k");
        assert_eq!(normalize("class on H^1 <= n-1"), "class on H^1 <= n-1");
    }

    #[test]
    fn words_enumerate_by_length() {
        assert_eq!(positive_words(2, 2), vec![vec![0], vec![1], vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn annihilation_and_subtorus() {
        for n in 1..=3 {
            let v = annihilation_value(n, 5, 1);
            assert_eq!(v["check"]["pass"], true);
            if n >= 2 {
                assert_eq!(v["witness"]["pass"], true);
            }
        }
        assert_eq!(subtorus_translation_value(3, 2)["check"]["pass"], true);
    }
}
