//! The ideal class group of `K` modelled by reduced positive definite binary
//! quadratic forms of discriminant `d_K`, with Gauss composition as the group
//! law and the classical form/ideal dictionary
//! `(a, b, c) <-> Z a + Z (-b + sqrt(d_K))/2`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::ideals::Ideal;
use crate::jsonutil;
use crate::quadfield::{AlgInt, FieldParams};
use crate::{Error, Result};

/// A positive definite integral binary quadratic form `a x^2 + b xy + c y^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadForm {
    pub a: BigInt,
    pub b: BigInt,
    pub c: BigInt,
}

impl QuadForm {
    pub fn new(a: i64, b: i64, c: i64) -> Self {
        QuadForm { a: BigInt::from(a), b: BigInt::from(b), c: BigInt::from(c) }
    }

    pub fn discriminant(&self) -> BigInt {
        &self.b * &self.b - BigInt::from(4) * &self.a * &self.c
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = self.b.abs();
        if !(abs_b <= self.a && self.a <= self.c) {
            return false;
        }
        if self.b.is_negative() && (abs_b == self.a || self.a == self.c) {
            return false;
        }
        true
    }

    pub fn reduce(&self) -> QuadForm {
        let (a, b, c) = reduce_triple(self.a.clone(), self.b.clone(), self.c.clone());
        QuadForm { a, b, c }
    }

    /// The class inverse `(a, -b, c)`, reduced.
    pub fn inverse(&self) -> QuadForm {
        QuadForm { a: self.a.clone(), b: -&self.b, c: self.c.clone() }.reduce()
    }

    pub fn triple(&self) -> (i64, i64, i64) {
        use num_traits::ToPrimitive;
        (
            self.a.to_i64().unwrap_or(i64::MAX),
            self.b.to_i64().unwrap_or(i64::MAX),
            self.c.to_i64().unwrap_or(i64::MAX),
        )
    }

    pub fn to_json(&self) -> Value {
        Value::Array(vec![
            jsonutil::bigint_to_json(&self.a),
            jsonutil::bigint_to_json(&self.b),
            jsonutil::bigint_to_json(&self.c),
        ])
    }
}

/// Reduction of a positive definite form triple.
pub(crate) fn reduce_triple(a: BigInt, b: BigInt, c: BigInt) -> (BigInt, BigInt, BigInt) {
    let d = &b * &b - BigInt::from(4) * &a * &c;
    let (mut a, mut b, mut c) = (a, b, c);
    loop {
        // normalize b into (-a, a]
        let two_a = BigInt::from(2) * &a;
        let mut r = b.mod_floor(&two_a);
        if r > a {
            r -= &two_a;
        }
        if r != b {
            b = r;
            c = (&b * &b - &d) / (BigInt::from(4) * &a);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
        } else {
            break;
        }
    }
    if b.is_negative() && (a == c || -&b == a) {
        b = -b;
    }
    debug_assert_eq!(&b * &b - BigInt::from(4) * &a * &c, d);
    (a, b, c)
}

/// The principal form of discriminant `d < 0`.
pub(crate) fn principal_triple(d: i64) -> (BigInt, BigInt, BigInt) {
    let d = BigInt::from(d);
    let b = if d.is_even() { BigInt::zero() } else { BigInt::one() };
    let c = (&b * &b - &d) / BigInt::from(4);
    (BigInt::one(), b, c)
}

/// Gauss composition of primitive forms of the same discriminant, followed by
/// reduction (Cohen, Algorithm 5.4.7).
pub fn compose(f: &QuadForm, g: &QuadForm) -> Result<QuadForm> {
    if f.discriminant() != g.discriminant() {
        return Err(Error::DiscriminantMismatch);
    }
    let (f1, f2) = if f.a > g.a { (g, f) } else { (f, g) };
    let (a1, b1, _c1) = (&f1.a, &f1.b, &f1.c);
    let (a2, b2, c2) = (&f2.a, &f2.b, &f2.c);
    let s = (b1 + b2) / BigInt::from(2);
    let n = b2 - &s;
    let (y1, d) = if a2.mod_floor(a1).is_zero() {
        (BigInt::zero(), a1.clone())
    } else {
        let eg = a2.extended_gcd(a1);
        (eg.x, eg.gcd)
    };
    let (x2, y2, d1) = if s.mod_floor(&d).is_zero() {
        (BigInt::zero(), BigInt::from(-1), d.clone())
    } else {
        let eg = s.extended_gcd(&d);
        (eg.x, -eg.y, eg.gcd)
    };
    let v1 = a1 / &d1;
    let v2 = a2 / &d1;
    let r = (&y1 * &y2 * &n - &x2 * c2).mod_floor(&v1);
    let b3 = b2 + BigInt::from(2) * &v2 * &r;
    let a3 = &v1 * &v2;
    let c3_num = c2 * &d1 + &r * (b2 + &v2 * &r);
    let (c3, rem) = c3_num.div_rem(&v1);
    debug_assert!(rem.is_zero(), "composition division must be exact");
    let out = QuadForm { a: a3, b: b3, c: c3 }.reduce();
    debug_assert_eq!(out.discriminant(), f.discriminant());
    Ok(out)
}

/// One reduced form per ideal class, enumerated by `|b| <= a <= sqrt(|d|/3)`,
/// sorted by `(a, b, c)`.
pub fn reduced_forms(field: FieldParams) -> Vec<QuadForm> {
    let d = BigInt::from(field.d_k());
    let bound = (-&d / BigInt::from(3)).sqrt();
    let mut forms = Vec::new();
    let mut a = BigInt::one();
    while a <= bound {
        let mut b = -(&a) + 1u8;
        while b <= a {
            if (&b - &d).is_even() {
                let num = &b * &b - &d;
                let four_a = BigInt::from(4) * &a;
                let (c, rem) = num.div_rem(&four_a);
                if rem.is_zero() && c >= a {
                    let form = QuadForm { a: a.clone(), b: b.clone(), c };
                    if form.is_reduced() {
                        debug_assert!(form.a.gcd(&form.b).gcd(&form.c).is_one());
                        forms.push(form);
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    forms.sort_by(|x, y| (&x.a, &x.b, &x.c).cmp(&(&y.a, &y.b, &y.c)));
    forms
}

/// The class group: the list of reduced forms, the class number and the
/// elementary divisors of the underlying abelian group.
#[derive(Debug, Clone)]
pub struct ClassGroup {
    field: FieldParams,
    forms: Vec<QuadForm>,
    index: HashMap<(BigInt, BigInt, BigInt), usize>,
    structure: Vec<u64>,
}

impl ClassGroup {
    pub fn new(field: FieldParams) -> Self {
        let forms = reduced_forms(field);
        let index = forms
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.a.clone(), f.b.clone(), f.c.clone()), i))
            .collect();
        let mut group = ClassGroup { field, forms, index, structure: Vec::new() };
        group.structure = group.elementary_divisors();
        group
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn h(&self) -> usize {
        self.forms.len()
    }

    pub fn forms(&self) -> &[QuadForm] {
        &self.forms
    }

    pub fn form(&self, i: usize) -> &QuadForm {
        &self.forms[i]
    }

    /// Cyclic orders `d_1 | d_2 | ... | d_k` with product `h` (empty for `h = 1`).
    pub fn structure(&self) -> &[u64] {
        &self.structure
    }

    pub fn identity(&self) -> usize {
        let (a, b, c) = principal_triple(self.field.d_k());
        self.index[&(a, b, c)]
    }

    fn lookup(&self, f: &QuadForm) -> usize {
        *self
            .index
            .get(&(f.a.clone(), f.b.clone(), f.c.clone()))
            .expect("reduced form of the right discriminant")
    }

    pub fn compose_indices(&self, i: usize, j: usize) -> usize {
        let f = compose(&self.forms[i], &self.forms[j]).expect("same discriminant");
        self.lookup(&f)
    }

    pub fn inverse_index(&self, i: usize) -> usize {
        self.lookup(&self.forms[i].inverse())
    }

    pub fn pow_index(&self, i: usize, e: u64) -> usize {
        let mut acc = self.identity();
        let mut base = i;
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.compose_indices(acc, base);
            }
            base = self.compose_indices(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn order_of(&self, i: usize) -> u64 {
        let h = self.h() as u64;
        for d in 1..=h {
            if h % d == 0 && self.pow_index(i, d) == self.identity() {
                return d;
            }
        }
        unreachable!("element order divides the group order")
    }

    /// All classes killed by `n`, ascending by index. Forms a subgroup.
    pub fn torsion_subgroup(&self, n: u64) -> Vec<usize> {
        (0..self.h()).filter(|&i| self.pow_index(i, n) == self.identity()).collect()
    }

    fn elementary_divisors(&self) -> Vec<u64> {
        let h = self.h() as u64;
        if h == 1 {
            return Vec::new();
        }
        // For each prime p | h read off the partition of the p-group from the
        // counts f(j) = #{x : x^(p^j) = e}: the increments log_p f(j)/f(j-1)
        // form the conjugate partition.
        let mut per_prime: Vec<Vec<u32>> = Vec::new();
        let mut primes = Vec::new();
        for p in crate::quadfield::distinct_primes(h) {
            let mut counts = vec![1u64];
            loop {
                let j = counts.len() as u32;
                let pj = p.pow(j);
                let cnt = (0..self.h())
                    .filter(|&i| self.pow_index(i, pj) == self.identity())
                    .count() as u64;
                if cnt == *counts.last().unwrap() {
                    break;
                }
                counts.push(cnt);
            }
            let ranks: Vec<u32> = counts
                .windows(2)
                .map(|w| {
                    let ratio = w[1] / w[0];
                    debug_assert_eq!(w[1] % w[0], 0);
                    let mut e = 0u32;
                    let mut r = ratio;
                    while r > 1 {
                        debug_assert_eq!(r % p, 0);
                        r /= p;
                        e += 1;
                    }
                    e
                })
                .collect();
            let rank = *ranks.first().unwrap_or(&0) as usize;
            let mut exps = vec![0u32; rank];
            for r in &ranks {
                for item in exps.iter_mut().take(*r as usize) {
                    *item += 1;
                }
            }
            // exps is descending by construction
            per_prime.push(exps);
            primes.push(p);
        }
        let k = per_prime.iter().map(Vec::len).max().unwrap_or(0);
        let mut divisors = Vec::with_capacity(k);
        for i in 0..k {
            let mut d = 1u64;
            for (p, exps) in primes.iter().zip(per_prime.iter()) {
                if let Some(e) = exps.get(i) {
                    d *= p.pow(*e);
                }
            }
            divisors.push(d);
        }
        divisors.reverse(); // ascending divisibility chain
        debug_assert_eq!(divisors.iter().product::<u64>(), h);
        divisors
    }

    /// The integral ideal `Z a + Z (-b + sqrt(d_K))/2` attached to the class.
    pub fn ideal_of_class(&self, i: usize) -> Ideal {
        let f = &self.forms[i];
        let field = self.field;
        let second = if field.omega_halved() {
            // (-b + sqrt(-m))/2 = (-b-1)/2 + omega
            AlgInt::new(field, (-&f.b - BigInt::one()) / BigInt::from(2), BigInt::one())
        } else {
            // (-b + 2 omega)/2 = -b/2 + omega
            AlgInt::new(field, -&f.b / BigInt::from(2), BigInt::one())
        };
        let alpha = AlgInt::new(field, f.a.clone(), BigInt::zero());
        Ideal::from_generators(&[alpha, second]).expect("form lattice is an ideal")
    }

    /// The class index of a nonzero fractional ideal, decided by testing
    /// `I * conj(J_c)` for principality against every class representative.
    pub fn class_of_ideal(&self, ideal: &Ideal) -> Result<usize> {
        if ideal.field() != self.field {
            return Err(Error::FieldMismatch(self.field.m(), ideal.field().m()));
        }
        // The class only depends on the integral part.
        let (a, b, c) = ideal.hnf_basis();
        let (x, y) = (
            AlgInt::new(self.field, a, BigInt::zero()),
            AlgInt::new(self.field, b, c),
        );
        let integral = Ideal::from_generators(&[x, y])?;
        for i in 0..self.h() {
            let j = self.ideal_of_class(i).conj();
            if integral.mul(&j)?.is_principal()?.is_some() {
                return Ok(i);
            }
        }
        Err(Error::Internal("every ideal lies in some class"))
    }

    /// JSON encoding `{"h": h, "structure": [..], "forms": [[a,b,c], ..]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("h".into(), Value::from(self.h() as u64));
        map.insert(
            "structure".into(),
            Value::Array(self.structure.iter().map(|d| Value::from(*d)).collect()),
        );
        map.insert("forms".into(), Value::Array(self.forms.iter().map(QuadForm::to_json).collect()));
        Value::Object(map)
    }

    /// Reconstructs a class group from its JSON encoding (the on-disk cache
    /// path). The payload is structurally validated: every form must be
    /// reduced of the right discriminant, the counts must match, and the
    /// principal form must be present.
    pub fn from_json(field: FieldParams, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("class group must be an object".into()))?;
        let h = obj
            .get("h")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Json("class group: missing `h`".into()))? as usize;
        let structure: Vec<u64> = obj
            .get("structure")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("class group: missing `structure`".into()))?
            .iter()
            .map(|x| x.as_u64().ok_or_else(|| Error::Json("class group: bad cyclic order".into())))
            .collect::<Result<_>>()?;
        let raw_forms = obj
            .get("forms")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("class group: missing `forms`".into()))?;
        let mut forms = Vec::with_capacity(raw_forms.len());
        for f in raw_forms {
            let t = f.as_array().filter(|a| a.len() == 3).ok_or_else(|| {
                Error::Json("class group: each form must be a triple [a, b, c]".into())
            })?;
            let a = crate::jsonutil::bigint_from_json(&t[0], "form a")?;
            let b = crate::jsonutil::bigint_from_json(&t[1], "form b")?;
            let c = crate::jsonutil::bigint_from_json(&t[2], "form c")?;
            let form = QuadForm { a, b, c };
            if form.discriminant() != BigInt::from(field.d_k()) || !form.is_reduced() {
                return Err(Error::Json("class group: form is not reduced of discriminant d_K".into()));
            }
            forms.push(form);
        }
        if forms.len() != h || structure.iter().product::<u64>() != h.max(1) as u64 {
            return Err(Error::Json("class group: inconsistent counts".into()));
        }
        let (pa, pb, pc) = principal_triple(field.d_k());
        if !forms.iter().any(|f| (&f.a, &f.b, &f.c) == (&pa, &pb, &pc)) {
            return Err(Error::Json("class group: principal form missing".into()));
        }
        let index = forms
            .iter()
            .enumerate()
            .map(|(i, f)| ((f.a.clone(), f.b.clone(), f.c.clone()), i))
            .collect();
        Ok(ClassGroup { field, forms, index, structure })
    }
}

/// `|Cl_K[2]|`, counted directly.
pub fn two_torsion_order(field: FieldParams) -> usize {
    ClassGroup::new(field).torsion_subgroup(2).len()
}
