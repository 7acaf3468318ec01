//! Batch verification suites with machine-readable reports.
//!
//! Every check is deterministic: random objects come from ChaCha streams
//! seeded by `(m, n)` and the check name, so identical inputs produce
//! identical reports. The batch loops fan out through [`crate::parallel`].

use std::time::Instant;

use num_bigint::BigInt;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

use crate::classgroup::{compose, reduced_forms, ClassGroup};
use crate::extension::{
    atkin_lehner, coset_representatives, even_n_reps, minor_ideal, sl_normalizer_reps,
    atkin_decomposition,
};
use crate::ideals::{atkin_ideal, Ideal};
use crate::matgroup::{Modulus, ScaledMatrix, WordSampler};
use crate::matrix::Mat;
use crate::orthobridge::{
    in_hermitian_half_space, ortho_action, phi_mat, phi_point, su_action, GramData,
    HalfSpacePoint,
};
use crate::parallel::{batch_map, batch_map_seq};
use crate::quadfield::{AlgInt, FieldParams};
use crate::{Error, Result};

type CheckOutcome = std::result::Result<(), Value>;

#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub witness: Option<Value>,
    pub millis: u128,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub suite: String,
    pub m: u64,
    pub n: usize,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// Deterministic JSON; timings are attached only on request since they
    /// vary across runs.
    pub fn to_json(&self, include_timings: bool) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                let mut map = Map::new();
                if include_timings {
                    map.insert("millis".into(), Value::from(c.millis as u64));
                }
                map.insert("name".into(), Value::String(c.name.clone()));
                map.insert(
                    "status".into(),
                    Value::String(if c.passed { "pass" } else { "fail" }.into()),
                );
                map.insert("witness".into(), c.witness.clone().unwrap_or(Value::Null));
                Value::Object(map)
            })
            .collect();
        let mut map = Map::new();
        map.insert("checks".into(), Value::Array(checks));
        map.insert("m".into(), Value::from(self.m));
        map.insert("n".into(), Value::from(self.n as u64));
        map.insert("ok".into(), Value::Bool(self.ok()));
        map.insert("suite".into(), Value::String(self.suite.clone()));
        Value::Object(map)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Invariants,
    Cosets,
    Phi,
    All,
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "invariants" => Ok(Suite::Invariants),
            "cosets" => Ok(Suite::Cosets),
            "phi" => Ok(Suite::Phi),
            "all" => Ok(Suite::All),
            other => Err(Error::Json(format!(
                "unknown suite `{other}` (expected invariants, cosets, phi or all)"
            ))),
        }
    }
}

impl std::fmt::Display for Suite {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Suite::Invariants => "invariants",
            Suite::Cosets => "cosets",
            Suite::Phi => "phi",
            Suite::All => "all",
        };
        write!(f, "{s}")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub tolerance: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { tolerance: 1e-9 }
    }
}

fn fail(reason: &str, extra: Value) -> CheckOutcome {
    Err(json!({ "object": extra, "reason": reason }))
}

fn lift(e: Error) -> Value {
    json!({ "error": e.to_string() })
}

struct Runner {
    checks: Vec<CheckResult>,
}

impl Runner {
    fn new() -> Self {
        Runner { checks: Vec::new() }
    }

    fn run(&mut self, name: &str, f: impl FnOnce() -> CheckOutcome) {
        let start = Instant::now();
        let outcome = f();
        let millis = start.elapsed().as_millis();
        match outcome {
            Ok(()) => {
                self.checks.push(CheckResult { name: name.into(), passed: true, witness: None, millis })
            }
            Err(w) => self.checks.push(CheckResult {
                name: name.into(),
                passed: false,
                witness: Some(w),
                millis,
            }),
        }
    }
}

/// Runs the requested suite for `(m, n)`.
pub fn run_suite(suite: Suite, m: u64, n: usize, opts: &VerifyOptions) -> Result<Report> {
    let field = FieldParams::new(m)?;
    let cl = ClassGroup::new(field);
    let mut runner = Runner::new();
    match suite {
        Suite::Invariants => invariant_checks(&mut runner, field, n, &cl),
        Suite::Cosets => coset_checks(&mut runner, field, n, &cl),
        Suite::Phi => phi_checks(&mut runner, field, opts),
        Suite::All => {
            invariant_checks(&mut runner, field, n, &cl);
            coset_checks(&mut runner, field, n, &cl);
            phi_checks(&mut runner, field, opts);
        }
    }
    Ok(Report { suite: suite.to_string(), m, n, checks: runner.checks })
}

fn seed_for(field: FieldParams, n: usize, salt: u64) -> u64 {
    field.m().wrapping_mul(1_000_003).wrapping_add(n as u64).wrapping_mul(31) ^ salt
}

fn rng_for(field: FieldParams, n: usize, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_for(field, n, salt))
}

fn random_algint(rng: &mut ChaCha8Rng, field: FieldParams) -> AlgInt {
    use rand::Rng;
    AlgInt::from_coords(field, rng.gen_range(-50i64..=50), rng.gen_range(-50i64..=50))
}

fn random_ideal(rng: &mut ChaCha8Rng, field: FieldParams) -> Ideal {
    loop {
        let g1 = random_algint(rng, field);
        let g2 = random_algint(rng, field);
        if g1.is_zero() && g2.is_zero() {
            continue;
        }
        if let Ok(ideal) = Ideal::from_generators(&[g1, g2]) {
            return ideal;
        }
    }
}

fn invariant_checks(runner: &mut Runner, field: FieldParams, n: usize, cl: &ClassGroup) {
    let m = field.m();
    runner.run("quadfield/ring-invariants", || {
        let mut rng = rng_for(field, n, 0xA1);
        // omega satisfies its minimal polynomial
        let omega = field.omega();
        let expected = if field.omega_halved() {
            let q = (1 + m as i64) / 4;
            &omega - &field.from_int(q)
        } else {
            field.from_int(-(m as i64))
        };
        if &omega * &omega != expected {
            return fail("omega violates its minimal polynomial", json!({ "m": m }));
        }
        for _ in 0..200 {
            let x = random_algint(&mut rng, field);
            let y = random_algint(&mut rng, field);
            if (&x * &y).norm() != x.norm() * y.norm() {
                return fail("norm is not multiplicative", json!({"x": x.to_json(), "y": y.to_json()}));
            }
            if x.conj().conj() != x {
                return fail("conjugation is not involutive", json!({"x": x.to_json()}));
            }
        }
        Ok(())
    });
    runner.run("quadfield/units-oracle", || {
        let listed = field.units();
        let mut enumerated = Vec::new();
        for a in -3i64..=3 {
            for b in -3i64..=3 {
                let x = AlgInt::from_coords(field, a, b);
                if !x.is_zero() && x.norm().is_one() {
                    enumerated.push(x);
                }
            }
        }
        if listed.len() != enumerated.len() || !listed.iter().all(|u| enumerated.contains(u)) {
            return fail("unit group differs from the norm-1 enumeration", json!({ "m": m }));
        }
        Ok(())
    });
    runner.run("ideals/norm-and-conjugate", || {
        let mut rng = rng_for(field, n, 0xA2);
        for _ in 0..25 {
            let i = random_ideal(&mut rng, field);
            let j = random_ideal(&mut rng, field);
            let ni = i.norm_int().map_err(lift)?;
            let nj = j.norm_int().map_err(lift)?;
            let prod = i.mul(&j).map_err(lift)?;
            if prod.norm_int().map_err(lift)? != &ni * &nj {
                return fail("ideal norm is not multiplicative", json!({"I": i.to_json(), "J": j.to_json()}));
            }
            let conj_prod = i.mul(&i.conj()).map_err(lift)?;
            let expect = Ideal::principal(&AlgInt::new(field, ni, BigInt::from(0))).map_err(lift)?;
            if conj_prod != expect {
                return fail("I * conj(I) differs from N(I) O_K", json!({"I": i.to_json()}));
            }
        }
        Ok(())
    });
    runner.run("ideals/atkin-family", || {
        let divisors = field.squarefree_divisors();
        for &d in &divisors {
            let a_d = atkin_ideal(field, d).map_err(lift)?;
            if a_d.norm_int().map_err(lift)? != BigInt::from(d) {
                return fail("A_d has the wrong norm", json!({ "d": d }));
            }
            let square = a_d.mul(&a_d).map_err(lift)?;
            let expect = Ideal::principal(&field.from_int(d as i64)).map_err(lift)?;
            if square != expect {
                return fail("A_d^2 differs from d O_K", json!({ "d": d }));
            }
            for &e in &divisors {
                if num_integer::gcd(d, e) == 1 {
                    let lhs = a_d.mul(&atkin_ideal(field, e).map_err(lift)?).map_err(lift)?;
                    if lhs != atkin_ideal(field, d * e).map_err(lift)? {
                        return fail("A_d A_e differs from A_de", json!({"d": d, "e": e}));
                    }
                }
            }
        }
        Ok(())
    });
    runner.run("ideals/hnf-canonical", || {
        let mut rng = rng_for(field, n, 0xA3);
        for _ in 0..20 {
            let i = random_ideal(&mut rng, field);
            let (b1, b2) = i.basis_elements();
            // regenerate from randomized O_K-combinations of the basis
            let r1 = random_algint(&mut rng, field);
            let r2 = random_algint(&mut rng, field);
            let gens = [b1.clone(), b2.clone(), &(&b1 * &r1) + &(&b2 * &r2)];
            let j = Ideal::from_generators(&gens).map_err(lift)?;
            if i != j {
                return fail("HNF differs across generating sets", json!({"I": i.to_json()}));
            }
        }
        Ok(())
    });
    runner.run("classgroup/hecke-two-torsion", || {
        let nu = field.discriminant_primes().len() as u32;
        let two = cl.torsion_subgroup(2).len();
        if two != 2usize.pow(nu - 1) {
            return fail("|Cl[2]| differs from 2^(nu-1)", json!({"m": m, "two_torsion": two}));
        }
        Ok(())
    });
    runner.run("classgroup/group-law", || {
        let h = cl.h();
        let e = cl.identity();
        let bound = if h <= 16 { h } else { 6 };
        for i in 0..bound {
            if cl.compose_indices(e, i) != i {
                return fail("identity law fails", json!({"class": i}));
            }
            if cl.compose_indices(i, cl.inverse_index(i)) != e {
                return fail("inverse law fails", json!({"class": i}));
            }
            for jdx in 0..bound {
                for l in 0..bound {
                    let lhs = cl.compose_indices(cl.compose_indices(i, jdx), l);
                    let rhs = cl.compose_indices(i, cl.compose_indices(jdx, l));
                    if lhs != rhs {
                        return fail("associativity fails", json!({"i": i, "j": jdx, "l": l}));
                    }
                }
            }
        }
        // torsion subgroup closure
        let t = cl.torsion_subgroup(n as u64);
        for &i in &t {
            if !t.contains(&cl.inverse_index(i)) {
                return fail("torsion subgroup not closed under inverse", json!({"class": i}));
            }
            for &jdx in &t {
                if !t.contains(&cl.compose_indices(i, jdx)) {
                    return fail("torsion subgroup not closed", json!({"i": i, "j": jdx}));
                }
            }
        }
        Ok(())
    });
    runner.run("classgroup/ideal-dictionary", || {
        let mut rng = rng_for(field, n, 0xA4);
        for i in 0..cl.h() {
            if cl.class_of_ideal(&cl.ideal_of_class(i)).map_err(lift)? != i {
                return fail("dictionary round trip fails", json!({"class": i}));
            }
        }
        for _ in 0..10 {
            let i = random_ideal(&mut rng, field);
            let j = random_ideal(&mut rng, field);
            let lhs = cl.class_of_ideal(&i.mul(&j).map_err(lift)?).map_err(lift)?;
            let rhs = cl.compose_indices(
                cl.class_of_ideal(&i).map_err(lift)?,
                cl.class_of_ideal(&j).map_err(lift)?,
            );
            if lhs != rhs {
                return fail("class map is not a homomorphism", json!({"I": i.to_json(), "J": j.to_json()}));
            }
        }
        Ok(())
    });
    runner.run("matgroup/block-determinants-real", || {
        let seeds: Vec<u64> = (0..1000).map(|i| seed_for(field, 2, 0xB000 + i)).collect();
        let bad = batch_map(&seeds, |&s| {
            let mut sampler = WordSampler::new(field, 2, ChaCha8Rng::seed_from_u64(s));
            let w = sampler.random_word(6);
            let (a, b, c, d) = w.blocks();
            [a, b, c, d].iter().all(|blk| blk.det().is_rational())
        });
        match bad.iter().position(|ok| !ok) {
            None => Ok(()),
            Some(idx) => fail("block determinant is not real", json!({"word_index": idx})),
        }
    });
    runner.run("matgroup/content-scale-and-power", || {
        let mut constructed: Vec<(String, ScaledMatrix)> = Vec::new();
        for rec in atkin_decomposition(field).map_err(lift)? {
            constructed.push((format!("W_{}", rec.d), rec.matrix));
        }
        if n >= 2 {
            if let Ok(reps) = coset_representatives(field, n, cl) {
                for rep in reps {
                    constructed.push((format!("rep_{}", rep.class_index), rep.matrix));
                }
            }
        }
        for (name, mat) in &constructed {
            let content = mat.content_ideal();
            let deg = mat.degree();
            if content.norm_int().map_err(lift)? != *mat.ell() {
                return fail("N(I(L)) differs from ell", json!({"element": name}));
            }
            let ell_ideal =
                Ideal::principal(&AlgInt::new(field, mat.ell().clone(), BigInt::from(0)))
                    .map_err(lift)?;
            if content.mul(&content.conj()).map_err(lift)? != ell_ideal {
                return fail("I(L) conj(I(L)) differs from ell O_K", json!({"element": name}));
            }
            if Ideal::principal(mat.w()).map_err(lift)? != content.pow(deg) {
                return fail("w O_K differs from I(L)^n", json!({"element": name}));
            }
            let power = mat.pow(deg).map_err(lift)?;
            if !power.has_gamma_representative().map_err(lift)? {
                return fail("M^n does not reach Gamma up to a unit scalar", json!({"element": name}));
            }
        }
        Ok(())
    });
    runner.run("matgroup/double-coset-content", || {
        let mut sampler = WordSampler::new(field, 2, rng_for(field, n, 0xA6));
        for rec in atkin_decomposition(field).map_err(lift)? {
            let r = sampler.random_word(5);
            let rp = sampler.random_word(5);
            let prod = r.mul(&rec.matrix).map_err(lift)?.mul(&rp).map_err(lift)?;
            if prod.content_ideal() != rec.matrix.content_ideal() {
                return fail("content ideal is not double-coset invariant", json!({"d": rec.d}));
            }
        }
        Ok(())
    });
    runner.run("matgroup/class-homomorphism", || {
        let reps = atkin_decomposition(field).map_err(lift)?;
        for x in &reps {
            for y in &reps {
                let cx = x.matrix.delta_membership(cl).map_err(lift)?.class.unwrap();
                let cy = y.matrix.delta_membership(cl).map_err(lift)?.class.unwrap();
                let prod = x.matrix.mul(&y.matrix).map_err(lift)?;
                let cp = prod.delta_membership(cl).map_err(lift)?.class.unwrap();
                if cp != cl.compose_indices(cx, cy) {
                    return fail("matrix class map is not a homomorphism", json!({"d": x.d, "e": y.d}));
                }
            }
        }
        Ok(())
    });
}

fn coset_checks(runner: &mut Runner, field: FieldParams, n: usize, cl: &ClassGroup) {
    runner.run("extension/atkin-decomposition", || {
        let reps = atkin_decomposition(field).map_err(lift)?;
        let nu = field.discriminant_primes().len();
        if reps.len() != 1 << nu {
            return fail("coset count differs from 2^nu", json!({"count": reps.len()}));
        }
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                let eq = reps[i]
                    .matrix
                    .coset_equal(&reps[j].matrix, Modulus::Gamma, cl)
                    .map_err(lift)?;
                if eq != (i == j) {
                    return fail("Gamma cosets are not pairwise distinct", json!({"d": reps[i].d, "e": reps[j].d}));
                }
            }
        }
        for x in &reps {
            for y in &reps {
                let g = num_integer::gcd(x.d, y.d);
                let target = atkin_lehner(field, x.d / g * (y.d / g)).map_err(lift)?;
                let prod = x.matrix.mul(&y.matrix).map_err(lift)?;
                if !prod.coset_equal(&target, Modulus::Gamma, cl).map_err(lift)? {
                    return fail("W_d W_e misses the W_{de} coset", json!({"d": x.d, "e": y.d}));
                }
            }
        }
        Ok(())
    });
    runner.run("extension/atkin-class-count", || {
        if matches!(field.d_k(), -3 | -4) {
            return Ok(()); // the kernel is larger there and the class map is trivial anyway
        }
        let reps = atkin_decomposition(field).map_err(lift)?;
        let mut classes: Vec<usize> = Vec::new();
        for r in &reps {
            let c = r.matrix.delta_membership(cl).map_err(lift)?.class.unwrap();
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
        if classes.len() != cl.torsion_subgroup(2).len() {
            return fail(
                "distinct W_d classes differ from |Cl[2]|",
                json!({"classes": classes.len()}),
            );
        }
        Ok(())
    });
    runner.run("extension/representatives-enumerate-torsion", || {
        let reps = coset_representatives(field, n, cl).map_err(lift)?;
        let torsion = cl.torsion_subgroup(n as u64);
        if reps.len() != torsion.len() {
            return fail("representative count differs from |Cl[n]|", json!({"count": reps.len()}));
        }
        let mut classes: Vec<usize> = reps.iter().map(|r| r.class_index).collect();
        classes.sort_unstable();
        if classes != torsion {
            return fail("classes do not enumerate the torsion subgroup", json!({"classes": classes}));
        }
        for i in 0..reps.len() {
            for j in 0..reps.len() {
                let eq = reps[i]
                    .matrix
                    .coset_equal(&reps[j].matrix, Modulus::MuGamma, cl)
                    .map_err(lift)?;
                if eq != (i == j) {
                    return fail("representatives are not pairwise inequivalent", json!({"i": i, "j": j}));
                }
            }
        }
        Ok(())
    });
    runner.run("extension/minor-ideal-oracle", || {
        for class_index in cl.torsion_subgroup(n as u64) {
            let a_ideal = cl.ideal_of_class(class_index);
            let (mat, g) = crate::extension::elementary_divisor_matrix(&a_ideal, n).map_err(lift)?;
            for k in 1..=n {
                if minor_ideal(&mat, k).map_err(lift)? != a_ideal.pow(k) {
                    return fail("minor ideal differs from A^k", json!({"class": class_index, "k": k}));
                }
            }
            if Ideal::principal(&g).map_err(lift)? != a_ideal.pow(n) {
                return fail("det does not generate A^n", json!({"class": class_index}));
            }
        }
        Ok(())
    });
    runner.run("extension/sl-normalizer", || {
        let reps = sl_normalizer_reps(field, n, cl).map_err(lift)?;
        if reps.len() != cl.torsion_subgroup(n as u64).len() {
            return fail("SL representative count differs from |Cl[n]|", json!({"count": reps.len()}));
        }
        Ok(())
    });
    if n % 2 == 0 && cl.torsion_subgroup(2).len() == cl.h() {
        runner.run("extension/even-degree-representatives", || {
            let reps = even_n_reps(field, n, cl).map_err(lift)?;
            let mut classes: Vec<usize> = reps.iter().map(|r| r.class_index).collect();
            classes.sort_unstable();
            classes.dedup();
            if classes != cl.torsion_subgroup(n as u64) {
                return fail("even-degree classes miss the torsion subgroup", json!({"classes": classes}));
            }
            Ok(())
        });
    }
}

fn phi_checks(runner: &mut Runner, field: FieldParams, opts: &VerifyOptions) {
    let gram = GramData::new(field);
    runner.run("orthobridge/phi-of-j", || {
        use num_rational::BigRational;
        let j = ScaledMatrix::j_matrix(field, 2);
        let img = phi_mat(&j, &gram).map_err(lift)?;
        let expect = Mat::from_fn(6, 6, |r, c| {
            BigRational::from_integer(BigInt::from(match (r, c) {
                (0, 5) | (5, 0) | (1, 4) | (4, 1) => -1,
                (2, 2) | (3, 3) => 1,
                _ => 0,
            }))
        });
        if img.entries() != &expect {
            return fail("phi(J) differs from the displayed matrix", json!({"m": field.m()}));
        }
        Ok(())
    });
    runner.run("orthobridge/orthogonality-and-multiplicativity", || {
        let w_nontrivial = atkin_decomposition(field)
            .map_err(lift)?
            .pop()
            .expect("at least one Atkin-Lehner matrix")
            .matrix;
        let seeds: Vec<u64> = (0..200).map(|i| seed_for(field, 2, 0xC000 + i)).collect();
        let failures = batch_map(&seeds, |&s| {
            let mut sampler = WordSampler::new(field, 2, ChaCha8Rng::seed_from_u64(s));
            let x = sampler.random_word(4);
            let y = if s % 2 == 0 {
                sampler.random_word(4)
            } else {
                sampler.random_word(3).mul(&w_nontrivial).expect("same field")
            };
            // phi_mat verifies exact S_1-orthogonality internally
            let px = match phi_mat(&x, &gram) {
                Ok(v) => v,
                Err(_) => return false,
            };
            let py = match phi_mat(&y, &gram) {
                Ok(v) => v,
                Err(_) => return false,
            };
            let pxy = match phi_mat(&x.mul(&y).expect("same field"), &gram) {
                Ok(v) => v,
                Err(_) => return false,
            };
            pxy == px.mul(&py).expect("same field")
        });
        match failures.iter().position(|ok| !ok) {
            None => Ok(()),
            Some(idx) => fail("phi fails orthogonality or multiplicativity", json!({"word_index": idx})),
        }
    });
    runner.run("orthobridge/kernel-plus-minus", || {
        let mut sampler = WordSampler::new(field, 2, rng_for(field, 2, 0xC9));
        for _ in 0..50 {
            let x = sampler.random_word(4);
            let y = sampler.random_word(4);
            let px = phi_mat(&x, &gram).map_err(lift)?;
            let py = phi_mat(&y, &gram).map_err(lift)?;
            if (px == py) != (x == y) {
                return fail("phi identifies matrices beyond ±M", json!({"m": field.m()}));
            }
        }
        Ok(())
    });
    runner.run("orthobridge/integrality-on-extended-group", || {
        for rec in atkin_decomposition(field).map_err(lift)? {
            let img = phi_mat(&rec.matrix, &gram).map_err(lift)?;
            if !img.is_integral() {
                return fail("phi(W_d) is not integral", json!({"d": rec.d}));
            }
        }
        Ok(())
    });
    runner.run("orthobridge/discriminant-kernel", || {
        let seeds: Vec<u64> = (0..100).map(|i| seed_for(field, 2, 0xD000 + i)).collect();
        let results = batch_map(&seeds, |&s| {
            let mut sampler = WordSampler::new(field, 2, ChaCha8Rng::seed_from_u64(s));
            let g = sampler.random_word(5);
            match phi_mat(&g, &gram) {
                Ok(img) => img.is_integral() && img.in_discriminant_kernel(&gram),
                Err(_) => false,
            }
        });
        match results.iter().position(|ok| !ok) {
            None => Ok(()),
            Some(idx) => fail("phi(Gamma) escapes the discriminant kernel", json!({"word_index": idx})),
        }
    });
    runner.run("orthobridge/action-equivariance", || {
        let tol = opts.tolerance;
        let mut rng = rng_for(field, 2, 0xE0);
        let mut sampler = WordSampler::new(field, 2, rng_for(field, 2, 0xE1));
        let w_last = atkin_decomposition(field)
            .map_err(lift)?
            .pop()
            .expect("nonempty")
            .matrix;
        let mut tested = 0;
        while tested < 20 {
            use rand::Rng;
            let word = if tested % 3 == 0 {
                w_last.clone()
            } else {
                sampler.random_mild_word(3, 10_000)
            };
            let mt = phi_mat(&word, &gram).map_err(lift)?;
            let mut re = |s: f64| rng.gen_range(-s..s);
            let x12 = num_complex::Complex64::new(re(1.0), re(1.0));
            let z = Mat::from_rows(vec![
                vec![num_complex::Complex64::new(re(1.0), 1.0 + re(0.5).abs()), x12],
                vec![x12.conj(), num_complex::Complex64::new(re(1.0), 1.0 + re(0.5).abs())],
            ]);
            if !in_hermitian_half_space(&z) {
                continue;
            }
            let (img, det) = match su_action(&word, &z) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let zp = match HalfSpacePoint::new(phi_point(field, &z), &gram) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let (img_o, factor) = ortho_action(&mt, &zp, &gram, tol).map_err(lift)?;
            let img_vec = phi_point(field, &img);
            for c in 0..4 {
                if (img_vec[c] - img_o.coords[c]).norm() >= tol {
                    return fail("action equivariance exceeds tolerance", json!({"coord": c}));
                }
            }
            if (det - factor).norm() >= tol {
                return fail("det(CZ+D) differs from the orthogonal factor", json!({"trial": tested}));
            }
            tested += 1;
        }
        Ok(())
    });
}

/// `|Cl_K[2]| = 2^(nu-1)` for every squarefree `m <= limit`; evaluated with
/// the parallel batch map.
pub fn hecke_sweep(limit: u64) -> Vec<(u64, bool)> {
    let ms: Vec<u64> = (1..=limit).filter(|&m| FieldParams::new(m).is_ok()).collect();
    batch_map(&ms, |&m| (m, hecke_check(m)))
}

/// Sequential reference version of [`hecke_sweep`] for the benchmarks.
pub fn hecke_sweep_seq(limit: u64) -> Vec<(u64, bool)> {
    let ms: Vec<u64> = (1..=limit).filter(|&m| FieldParams::new(m).is_ok()).collect();
    batch_map_seq(&ms, |&m| (m, hecke_check(m)))
}

fn hecke_check(m: u64) -> bool {
    let field = FieldParams::new(m).expect("squarefree by construction");
    let cl = ClassGroup::new(field);
    let nu = field.discriminant_primes().len() as u32;
    cl.torsion_subgroup(2).len() == 2usize.pow(nu - 1)
}

/// Reality of block determinants: `count` random degree-2 words whose block
/// determinants must all be real; parallel and sequential versions share the
/// same seeds.
pub fn block_det_batch(m: u64, count: u64) -> bool {
    let field = FieldParams::new(m).expect("valid field");
    let seeds: Vec<u64> = (0..count).map(|i| m.wrapping_mul(97) + i).collect();
    batch_map(&seeds, |&s| block_dets_real_for_word(field, s)).into_iter().all(|b| b)
}

pub fn block_det_batch_seq(m: u64, count: u64) -> bool {
    let field = FieldParams::new(m).expect("valid field");
    let seeds: Vec<u64> = (0..count).map(|i| m.wrapping_mul(97) + i).collect();
    batch_map_seq(&seeds, |&s| block_dets_real_for_word(field, s)).into_iter().all(|b| b)
}

fn block_dets_real_for_word(field: FieldParams, seed: u64) -> bool {
    let mut sampler = WordSampler::new(field, 2, ChaCha8Rng::seed_from_u64(seed));
    let w = sampler.random_word(6);
    let (a, b, c, d) = w.blocks();
    [a, b, c, d].iter().all(|blk| blk.det().is_rational())
}

/// The class-number table used by the acceptance gate, computed through the
/// library path (reduced-form enumeration).
pub fn class_number(m: u64) -> Result<usize> {
    Ok(reduced_forms(FieldParams::new(m)?).len())
}

/// Cross-check helper exposed for the CLI: composes two reduced forms.
pub fn compose_reduced(
    field: FieldParams,
    f: &crate::classgroup::QuadForm,
    g: &crate::classgroup::QuadForm,
) -> Result<crate::classgroup::QuadForm> {
    let _ = field;
    compose(f, g)
}
