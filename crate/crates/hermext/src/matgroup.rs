//! Scaled matrices `M = (1/u) L` in `SU(n,n;C)` stored exactly as the triple
//! `(L, ell, w)` with `L` integral, `ell = u*conj(u)` and `w = u^n`; the
//! complex scale `u` itself is never materialized. Membership in the
//! Hermitian modular group and in its maximal discrete extension, content
//! ideals and coset comparisons are all decided from the triple.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use serde_json::{Map, Value};

use crate::classgroup::ClassGroup;
use crate::ideals::Ideal;
use crate::jsonutil;
use crate::matrix::Mat;
use crate::quadfield::{AlgInt, AlgNum, FieldParams};
use crate::{Error, Result};

/// `M = (1/u) L` with `conj(L)^T J L = ell*J`, `det L = w^2`,
/// `w*conj(w) = ell^n`; these three identities are checked at construction.
/// The triple determines `M` up to an `n`-th root of unity, which is exactly
/// the ambiguity left by `u^n = w`.
#[derive(Debug, Clone)]
pub struct ScaledMatrix {
    field: FieldParams,
    n: usize,
    l: Mat<AlgInt>,
    ell: BigInt,
    w: AlgInt,
}

impl ScaledMatrix {
    /// Validates the three defining identities and divides out the integer
    /// content `r` of `L` (replacing `ell` by `ell/r^2` and `w` by `w/r^n`).
    pub fn new(l: Mat<AlgInt>, n: usize, ell: BigInt, w: AlgInt) -> Result<Self> {
        let field = w.field();
        if l.rows() != 2 * n || l.cols() != 2 * n || n == 0 {
            return Err(Error::DimensionMismatch);
        }
        if !ell.is_positive() {
            return Err(Error::NonPositiveScale);
        }
        for e in l.entries() {
            if e.field() != field {
                return Err(Error::FieldMismatch(field.m(), e.field().m()));
            }
        }
        let mut content = BigInt::zero();
        for e in l.entries() {
            content = content.gcd(e.coord_a()).gcd(e.coord_b());
        }
        let (l, ell, w) = if content > BigInt::one() {
            let r2 = &content * &content;
            let rn = num_traits::pow(content.clone(), n);
            if !ell.mod_floor(&r2).is_zero()
                || !w.coord_a().mod_floor(&rn).is_zero()
                || !w.coord_b().mod_floor(&rn).is_zero()
            {
                return Err(Error::NonIntegralNormalization);
            }
            (
                l.map(|e| AlgInt::new(field, e.coord_a() / &content, e.coord_b() / &content)),
                ell / r2,
                AlgInt::new(field, w.coord_a() / &rn, w.coord_b() / &rn),
            )
        } else {
            (l, ell, w)
        };
        let m = ScaledMatrix { field, n, l, ell, w };
        m.check_invariants()?;
        Ok(m)
    }

    fn check_invariants(&self) -> Result<()> {
        let j = j_numerator(self.field, self.n);
        let lhs = self.l.map(AlgInt::conj).transpose().mul(&j).mul(&self.l);
        let scaled_j = j.map(|e| e.mul_int(&self.ell));
        if lhs != scaled_j {
            return Err(Error::UnitaryRelation);
        }
        if self.l.det() != &self.w * &self.w {
            return Err(Error::DeterminantMismatch);
        }
        if self.w.norm() != num_traits::pow(self.ell.clone(), self.n) {
            return Err(Error::ScaleNormMismatch);
        }
        Ok(())
    }

    pub fn identity(field: FieldParams, n: usize) -> Self {
        let l = Mat::from_fn(2 * n, 2 * n, |r, c| {
            if r == c {
                field.one()
            } else {
                field.zero()
            }
        });
        ScaledMatrix::new(l, n, BigInt::one(), field.one()).expect("identity is unitary")
    }

    /// The involution `J = (0, -I; I, 0)`.
    pub fn j_matrix(field: FieldParams, n: usize) -> Self {
        ScaledMatrix::new(j_numerator(field, n), n, BigInt::one(), field.one())
            .expect("J is unitary")
    }

    /// Translation `(I, H; 0, I)` by an integral Hermitian matrix.
    pub fn translation(field: FieldParams, h: &Mat<AlgInt>) -> Result<Self> {
        let n = h.rows();
        if h.cols() != n {
            return Err(Error::DimensionMismatch);
        }
        if h != &h.map(AlgInt::conj).transpose() {
            return Err(Error::NotHermitian);
        }
        let l = Mat::from_fn(2 * n, 2 * n, |r, c| {
            if r == c {
                field.one()
            } else if r < n && c >= n {
                h.at(r, c - n).clone()
            } else {
                field.zero()
            }
        });
        ScaledMatrix::new(l, n, BigInt::one(), field.one())
    }

    /// `diag(conj(U)^T, U^{-1})` for `U` in `GL_n(O_K)` with `det U = ±1`.
    pub fn unitary_pair(field: FieldParams, u: &Mat<AlgInt>) -> Result<Self> {
        let n = u.rows();
        if u.cols() != n {
            return Err(Error::DimensionMismatch);
        }
        let det = u.det();
        let minus_one = -&field.one();
        if det != field.one() && det != minus_one {
            return Err(Error::NotIntegral);
        }
        let u_inv = u
            .adjugate()
            .map(|e| e.div_exact(&det).expect("unit determinant divides the adjugate"));
        let a = u.map(AlgInt::conj).transpose();
        let zero = Mat::from_fn(n, n, |_, _| field.zero());
        let l = Mat::from_blocks(&a, &zero, &zero, &u_inv);
        ScaledMatrix::new(l, n, BigInt::one(), field.one())
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn numerator(&self) -> &Mat<AlgInt> {
        &self.l
    }

    pub fn ell(&self) -> &BigInt {
        &self.ell
    }

    pub fn w(&self) -> &AlgInt {
        &self.w
    }

    /// The four `n x n` blocks `(A, B, C, D)` of the numerator.
    pub fn blocks(&self) -> (Mat<AlgInt>, Mat<AlgInt>, Mat<AlgInt>, Mat<AlgInt>) {
        let n = self.n;
        (
            self.l.block(0, 0, n, n),
            self.l.block(0, n, n, n),
            self.l.block(n, 0, n, n),
            self.l.block(n, n, n, n),
        )
    }

    fn check_compatible(&self, other: &ScaledMatrix) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.m(), other.field.m()));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, other: &ScaledMatrix) -> Result<ScaledMatrix> {
        self.check_compatible(other)?;
        ScaledMatrix::new(
            self.l.mul(&other.l),
            self.n,
            &self.ell * &other.ell,
            &self.w * &other.w,
        )
    }

    /// `M^{-1} = (1/conj(u)) (conj(D)^T, -conj(B)^T; -conj(C)^T, conj(A)^T)`.
    pub fn inverse(&self) -> ScaledMatrix {
        let (a, b, c, d) = self.blocks();
        let ct = |m: &Mat<AlgInt>| m.map(AlgInt::conj).transpose();
        let l = Mat::from_blocks(&ct(&d), &ct(&b).neg(), &ct(&c).neg(), &ct(&a));
        ScaledMatrix::new(l, self.n, self.ell.clone(), self.w.conj())
            .expect("inverse satisfies the same identities")
    }

    pub fn pow(&self, e: usize) -> Result<ScaledMatrix> {
        let mut acc = ScaledMatrix::identity(self.field, self.n);
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// The content ideal `I(L)` generated by all entries of the numerator.
    pub fn content_ideal(&self) -> Ideal {
        let gens: Vec<AlgInt> = self.l.entries().filter(|e| !e.is_zero()).cloned().collect();
        Ideal::from_generators(&gens).expect("numerator of an invertible matrix is nonzero")
    }

    /// Membership in `Gamma_n(O_K)` up to a unit scalar: true iff `ell = 1`
    /// after canonical normalization and `w` is a unit.
    pub fn gamma_membership(&self) -> bool {
        self.ell.is_one() && self.w.is_unit()
    }

    /// Membership in the extended group: `w O_K = I(L)^n`. For members the
    /// scale conditions `N(I(L)) = ell` and `I(L) conj(I(L)) = ell O_K` are
    /// theorems and are re-verified; the attached ideal class is returned.
    pub fn delta_membership(&self, cl: &ClassGroup) -> Result<DeltaMembership> {
        if cl.field() != self.field {
            return Err(Error::FieldMismatch(self.field.m(), cl.field().m()));
        }
        let content = self.content_ideal();
        let member = Ideal::principal(&self.w)? == content.pow(self.n);
        if !member {
            return Ok(DeltaMembership { member: false, class: None });
        }
        if content.norm_int()? != self.ell {
            return Err(Error::Internal("member violates N(I(L)) = ell"));
        }
        let ell_ok = Ideal::principal(&AlgInt::new(self.field, self.ell.clone(), BigInt::zero()))?;
        if content.mul(&content.conj())? != ell_ok {
            return Err(Error::Internal("member violates I(L) conj(I(L)) = ell O_K"));
        }
        let class = cl.class_of_ideal(&content)?;
        Ok(DeltaMembership { member: true, class: Some(class) })
    }

    /// Coset comparison inside the extended group.
    ///
    /// * [`Modulus::Gamma`]: same `Gamma_n(O_K)` coset iff some complex
    ///   representative of `M^{-1} M'` lies in `Gamma_n(O_K)`; this holds iff
    ///   there is `eta` in `O_K` with `N(eta) = ell`, `eta^n = w` and
    ///   `eta | L` entrywise (root-of-unity scalings are realized through
    ///   `eta` and the `w`-data, never numerically).
    /// * [`Modulus::MuGamma`]: equality modulo the kernel of the class
    ///   homomorphism, i.e. the ideal classes agree. For `d_K = -3, -4` the
    ///   kernel picks up the unit-diagonal twists; those are exactly the
    ///   class-trivial elements, so the same test applies.
    pub fn coset_equal(
        &self,
        other: &ScaledMatrix,
        modulo: Modulus,
        cl: &ClassGroup,
    ) -> Result<bool> {
        self.check_compatible(other)?;
        let me = self.delta_membership(cl)?;
        let them = other.delta_membership(cl)?;
        if !me.member || !them.member {
            return Err(Error::NotMember);
        }
        match modulo {
            Modulus::MuGamma => Ok(me.class == them.class),
            Modulus::Gamma => self.inverse().mul(other)?.has_gamma_representative(),
        }
    }

    /// True iff some complex representative of the triple lies in
    /// `Gamma_n(O_K)` on the nose.
    pub fn has_gamma_representative(&self) -> Result<bool> {
        let candidates = Ideal::unit_ideal(self.field).elements_of_norm(&self.ell)?;
        for eta in candidates {
            if eta.pow(self.n as u32) != self.w {
                continue;
            }
            if self.l.entries().all(|e| eta.divides(e)) {
                return Ok(true);
            }
        }
        Ok(false)
    }

    /// JSON: `{"L": [[[a,b],..],..], "ell": .., "m": .., "n": .., "w": [a,b]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        let rows: Vec<Value> = (0..self.l.rows())
            .map(|r| Value::Array((0..self.l.cols()).map(|c| self.l.at(r, c).to_json()).collect()))
            .collect();
        map.insert("L".into(), Value::Array(rows));
        map.insert("ell".into(), jsonutil::bigint_to_json(&self.ell));
        map.insert("m".into(), Value::from(self.field.m()));
        map.insert("n".into(), Value::from(self.n as u64));
        map.insert("w".into(), self.w.to_json());
        Value::Object(map)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("matrix must be an object".into()))?;
        let get =
            |k: &str| obj.get(k).ok_or_else(|| Error::Json(format!("matrix: missing `{k}`")));
        let m = jsonutil::u64_from_json(get("m")?, "matrix field m")?;
        let field = FieldParams::new(m)?;
        let n = jsonutil::u64_from_json(get("n")?, "matrix degree n")? as usize;
        let ell = jsonutil::bigint_from_json(get("ell")?, "matrix ell")?;
        let w = AlgInt::from_json(field, get("w")?)?;
        let rows = get("L")?
            .as_array()
            .ok_or_else(|| Error::Json("matrix: `L` must be an array of rows".into()))?;
        if rows.len() != 2 * n {
            return Err(Error::Json(format!("matrix: expected {} rows in `L`", 2 * n)));
        }
        let mut parsed: Vec<Vec<AlgInt>> = Vec::with_capacity(2 * n);
        for row in rows {
            let cells = row
                .as_array()
                .ok_or_else(|| Error::Json("matrix: each row of `L` must be an array".into()))?;
            if cells.len() != 2 * n {
                return Err(Error::Json(format!("matrix: expected {} columns in `L`", 2 * n)));
            }
            parsed
                .push(cells.iter().map(|c| AlgInt::from_json(field, c)).collect::<Result<_>>()?);
        }
        ScaledMatrix::new(Mat::from_rows(parsed), n, ell, w)
    }
}

/// Two triples are equal when they determine the same set
/// `{zeta M : zeta^n = 1}` of complex matrices; this quotients out the unit
/// rescalings `(L, w) -> (zeta L, zeta^n w)` of the stored data.
impl PartialEq for ScaledMatrix {
    fn eq(&self, other: &Self) -> bool {
        if self.field != other.field || self.n != other.n || self.ell != other.ell {
            return false;
        }
        for zeta in self.field.units() {
            if other.w == &self.w * &zeta.pow(self.n as u32) && other.l == self.l.map(|e| e * &zeta)
            {
                return true;
            }
        }
        false
    }
}

impl Eq for ScaledMatrix {}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaMembership {
    pub member: bool,
    /// Class index in the ambient class group, present for members.
    pub class: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Modulus {
    /// Cosets of `Gamma_n(O_K)` itself.
    Gamma,
    /// Cosets of the kernel of the class homomorphism (the root-of-unity
    /// scalings of `Gamma_n(O_K)`, plus unit-diagonal twists for
    /// `d_K = -3, -4`).
    MuGamma,
}

fn j_numerator(field: FieldParams, n: usize) -> Mat<AlgInt> {
    Mat::from_fn(2 * n, 2 * n, |r, c| {
        if r < n && c == r + n {
            -&field.one()
        } else if r >= n && c == r - n {
            field.one()
        } else {
            field.zero()
        }
    })
}

/// A 2x2 Hermitian matrix over `K`: `h21 = conj(h12)` and rational diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct HermMatrix {
    field: FieldParams,
    h11: BigRational,
    h12: AlgNum,
    h22: BigRational,
}

impl HermMatrix {
    pub fn new(field: FieldParams, h11: BigRational, h12: AlgNum, h22: BigRational) -> Result<Self> {
        if h12.field() != field {
            return Err(Error::FieldMismatch(field.m(), h12.field().m()));
        }
        Ok(HermMatrix { field, h11, h12, h22 })
    }

    /// Validates a full 2x2 entry matrix for Hermitian shape.
    pub fn from_entries(field: FieldParams, e: &Mat<AlgNum>) -> Result<Self> {
        if e.rows() != 2 || e.cols() != 2 {
            return Err(Error::DimensionMismatch);
        }
        if e.at(1, 0) != &e.at(0, 1).conj() {
            return Err(Error::NotHermitian);
        }
        let rational = |x: &AlgNum| -> Result<BigRational> {
            if x.numerator().coord_b().is_zero() {
                Ok(BigRational::new(x.numerator().coord_a().clone(), x.denominator().clone()))
            } else {
                Err(Error::NotHermitian)
            }
        };
        HermMatrix::new(field, rational(e.at(0, 0))?, e.at(0, 1).clone(), rational(e.at(1, 1))?)
    }

    pub fn from_integral(h: &Mat<AlgInt>) -> Result<Self> {
        let field = h.at(0, 0).field();
        HermMatrix::from_entries(field, &h.map(|x| AlgNum::from_int(x.clone())))
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn h11(&self) -> &BigRational {
        &self.h11
    }

    pub fn h12(&self) -> &AlgNum {
        &self.h12
    }

    pub fn h22(&self) -> &BigRational {
        &self.h22
    }

    pub fn to_matnum(&self) -> Mat<AlgNum> {
        let rat = |q: &BigRational| {
            AlgNum::new(
                AlgInt::new(self.field, q.numer().clone(), BigInt::zero()),
                q.denom().clone(),
            )
            .expect("nonzero denominator")
        };
        Mat::from_rows(vec![
            vec![rat(&self.h11), self.h12.clone()],
            vec![self.h12.conj(), rat(&self.h22)],
        ])
    }

    pub fn det(&self) -> BigRational {
        let (n, d) = self.h12.norm();
        &self.h11 * &self.h22 - BigRational::new(n, d)
    }
}

/// Deterministic sampler for random words in the standard generators of
/// `Gamma_n(O_K)`: `J`, translations by Hermitian `H` with entries bounded
/// by 10, and `diag(conj(U)^T, U^{-1})` for unimodular `U` built from
/// elementary matrices.
pub struct WordSampler<R: Rng> {
    field: FieldParams,
    n: usize,
    rng: R,
}

impl<R: Rng> WordSampler<R> {
    pub fn new(field: FieldParams, n: usize, rng: R) -> Self {
        WordSampler { field, n, rng }
    }

    pub fn random_hermitian(&mut self) -> Mat<AlgInt> {
        let f = self.field;
        let n = self.n;
        let mut h = Mat::from_fn(n, n, |_, _| f.zero());
        for r in 0..n {
            let a = self.rng.gen_range(-10i64..=10);
            h.set(r, r, AlgInt::from_coords(f, a, 0));
            for c in r + 1..n {
                let x = AlgInt::from_coords(
                    f,
                    self.rng.gen_range(-10i64..=10),
                    self.rng.gen_range(-10i64..=10),
                );
                h.set(r, c, x.clone());
                h.set(c, r, x.conj());
            }
        }
        h
    }

    pub fn random_unimodular(&mut self) -> Mat<AlgInt> {
        let f = self.field;
        let n = self.n;
        let mut u = Mat::from_fn(n, n, |r, c| if r == c { f.one() } else { f.zero() });
        if n == 1 {
            return u;
        }
        let steps = self.rng.gen_range(2usize..=4);
        for _ in 0..steps {
            let i = self.rng.gen_range(0..n);
            let mut j = self.rng.gen_range(0..n);
            while j == i {
                j = self.rng.gen_range(0..n);
            }
            let x = AlgInt::from_coords(
                f,
                self.rng.gen_range(-2i64..=2),
                self.rng.gen_range(-2i64..=2),
            );
            // row_i += x * row_j
            for c in 0..n {
                let v = u.at(i, c) + &(&x * u.at(j, c));
                u.set(i, c, v);
            }
        }
        u
    }

    pub fn random_generator(&mut self) -> ScaledMatrix {
        match self.rng.gen_range(0u8..3) {
            0 => ScaledMatrix::j_matrix(self.field, self.n),
            1 => ScaledMatrix::translation(self.field, &self.random_hermitian())
                .expect("sampled H is Hermitian"),
            _ => ScaledMatrix::unitary_pair(self.field, &self.random_unimodular())
                .expect("sampled U is unimodular"),
        }
    }

    pub fn random_word(&mut self, max_len: usize) -> ScaledMatrix {
        let len = self.rng.gen_range(2..=max_len.max(2));
        let mut acc = self.random_generator();
        for _ in 1..len {
            acc = acc.mul(&self.random_generator()).expect("same field and degree");
        }
        acc
    }

    /// A random word whose numerator entries stay below `cap` in norm; used
    /// by the floating-point half-space checks, where conditioning must stay
    /// mild for the documented tolerance.
    pub fn random_mild_word(&mut self, max_len: usize, cap: i64) -> ScaledMatrix {
        let cap = BigInt::from(cap);
        loop {
            let w = self.random_word(max_len);
            if w.numerator().entries().all(|e| e.norm() <= cap) {
                return w;
            }
        }
    }
}
