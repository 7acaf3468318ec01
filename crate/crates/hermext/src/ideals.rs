//! Fractional ideals of `O_K` in Hermite normal form.
//!
//! An ideal is stored as `(1/den) * (Z*a + Z*(b + c*omega))` with
//! `a, c > 0`, `c | a`, `c | b`, `0 <= b < a` and `gcd(gcd(a,b,c), den) = 1`.
//! The HNF basis is unique per ideal, so equality is structural.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::jsonutil;
use crate::quadfield::{unit_normalize, AlgInt, FieldParams};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ideal {
    field: FieldParams,
    a: BigInt,
    b: BigInt,
    c: BigInt,
    den: BigInt,
}

/// Hermite normal form of the lattice spanned by coordinate vectors
/// `(x, y) = x + y*omega`. Returns `(a, b, c)` for the basis `[a, b + c*omega]`.
fn hnf_from_vectors(vectors: &[(BigInt, BigInt)]) -> Result<(BigInt, BigInt, BigInt)> {
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut xs: Vec<BigInt> = Vec::new();
    for (x, y) in vectors {
        if x.is_zero() && y.is_zero() {
            continue;
        }
        if y.is_zero() {
            xs.push(x.clone());
            continue;
        }
        match pivot.take() {
            None => pivot = Some((x.clone(), y.clone())),
            Some((px, py)) => {
                let eg = py.extended_gcd(y);
                let (g, s, t) = (eg.gcd, eg.x, eg.y);
                let new_pivot = (&s * &px + &t * x, &s * &py + &t * y);
                // (py/g) * v - (y/g) * p has omega-coordinate zero
                let eliminated = (&py / &g) * x - (y / &g) * &px;
                if !eliminated.is_zero() {
                    xs.push(eliminated);
                }
                pivot = Some(new_pivot);
            }
        }
    }
    let (mut bx, mut c) = pivot.ok_or(Error::ZeroIdeal)?;
    if c.is_negative() {
        bx = -bx;
        c = -c;
    }
    let mut a = BigInt::zero();
    for x in xs {
        a = a.gcd(&x);
    }
    if a.is_zero() {
        return Err(Error::Internal("rank-1 lattice cannot be an ideal"));
    }
    let b = bx.mod_floor(&a);
    Ok((a, b, c))
}

impl Ideal {
    fn from_hnf(field: FieldParams, a: BigInt, b: BigInt, c: BigInt, den: BigInt) -> Self {
        let mut ideal = Ideal { field, a, b, c, den };
        ideal.canonicalize();
        debug_assert!(ideal.closed_under_omega(), "HNF basis is not an O_K module");
        ideal
    }

    fn canonicalize(&mut self) {
        let content = self.a.gcd(&self.b).gcd(&self.c);
        let g = content.gcd(&self.den);
        if !g.is_one() {
            self.a /= &g;
            self.b /= &g;
            self.c /= &g;
            self.den /= &g;
        }
    }

    fn closed_under_omega(&self) -> bool {
        if !(divides(&self.c, &self.a) && divides(&self.c, &self.b)) {
            return false;
        }
        let beta = AlgInt::new(self.field, self.b.clone(), self.c.clone());
        let alpha = AlgInt::new(self.field, self.a.clone(), BigInt::zero());
        let w = self.field.omega();
        self.integral_part_contains(&(&alpha * &w)) && self.integral_part_contains(&(&beta * &w))
    }

    fn integral_part_contains(&self, x: &AlgInt) -> bool {
        let (q, r) = x.coord_b().div_rem(&self.c);
        if !r.is_zero() {
            return false;
        }
        (x.coord_a() - q * &self.b).mod_floor(&self.a).is_zero()
    }

    /// Smallest `O_K`-module containing the generators (an integral ideal when
    /// all generators are integral).
    pub fn from_generators(gens: &[AlgInt]) -> Result<Self> {
        let field = gens.first().ok_or(Error::ZeroIdeal)?.field();
        let mut vectors = Vec::with_capacity(2 * gens.len());
        let omega = field.omega();
        for g in gens {
            if g.field() != field {
                return Err(Error::FieldMismatch(field.m(), g.field().m()));
            }
            vectors.push((g.coord_a().clone(), g.coord_b().clone()));
            let gw = g * &omega;
            vectors.push((gw.coord_a().clone(), gw.coord_b().clone()));
        }
        let (a, b, c) = hnf_from_vectors(&vectors)?;
        Ok(Ideal::from_hnf(field, a, b, c, BigInt::one()))
    }

    /// The lattice spanned by products of basis elements; valid only when the
    /// span is already an `O_K`-module (products, conjugates, sums of ideals).
    fn from_module_gens(field: FieldParams, gens: &[AlgInt], den: BigInt) -> Result<Self> {
        let vectors: Vec<(BigInt, BigInt)> =
            gens.iter().map(|g| (g.coord_a().clone(), g.coord_b().clone())).collect();
        let (a, b, c) = hnf_from_vectors(&vectors)?;
        Ok(Ideal::from_hnf(field, a, b, c, den))
    }

    pub fn principal(x: &AlgInt) -> Result<Self> {
        if x.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        Ideal::from_generators(std::slice::from_ref(x))
    }

    pub fn unit_ideal(field: FieldParams) -> Self {
        Ideal {
            field,
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::one(),
            den: BigInt::one(),
        }
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    /// HNF basis `[a, b + c*omega]` of the integral part.
    pub fn hnf_basis(&self) -> (BigInt, BigInt, BigInt) {
        (self.a.clone(), self.b.clone(), self.c.clone())
    }

    pub fn basis_elements(&self) -> (AlgInt, AlgInt) {
        (
            AlgInt::new(self.field, self.a.clone(), BigInt::zero()),
            AlgInt::new(self.field, self.b.clone(), self.c.clone()),
        )
    }

    fn check_field(&self, other: &Ideal) -> Result<()> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.m(), other.field.m()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Ideal) -> Result<Ideal> {
        self.check_field(other)?;
        let (x1, x2) = self.basis_elements();
        let (y1, y2) = other.basis_elements();
        let gens = [&x1 * &y1, &x1 * &y2, &x2 * &y1, &x2 * &y2];
        Ideal::from_module_gens(self.field, &gens, &self.den * &other.den)
    }

    pub fn add(&self, other: &Ideal) -> Result<Ideal> {
        self.check_field(other)?;
        // I/d + J/e = (e*I + d*J)/(d*e)
        let (x1, x2) = self.basis_elements();
        let (y1, y2) = other.basis_elements();
        let gens = [
            x1.mul_int(&other.den),
            x2.mul_int(&other.den),
            y1.mul_int(&self.den),
            y2.mul_int(&self.den),
        ];
        Ideal::from_module_gens(self.field, &gens, &self.den * &other.den)
    }

    pub fn conj(&self) -> Ideal {
        let (x1, x2) = self.basis_elements();
        Ideal::from_module_gens(self.field, &[x1.conj(), x2.conj()], self.den.clone())
            .expect("conjugate of a nonzero ideal is nonzero")
    }

    pub fn pow(&self, e: usize) -> Ideal {
        let mut acc = Ideal::unit_ideal(self.field);
        for _ in 0..e {
            acc = acc.mul(self).expect("same field");
        }
        acc
    }

    /// Multiplies by the rational number `num/den`.
    pub fn scale_rational(&self, num: &BigInt, den: &BigInt) -> Result<Ideal> {
        if num.is_zero() || den.is_zero() {
            return Err(Error::ZeroIdeal);
        }
        let n = num.abs();
        let d = den.abs();
        Ok(Ideal::from_hnf(self.field, &self.a * &n, &self.b * &n, &self.c * &n, &self.den * d))
    }

    pub fn mul_element(&self, x: &AlgInt) -> Result<Ideal> {
        self.mul(&Ideal::principal(x)?)
    }

    pub fn inverse(&self) -> Ideal {
        // (I_int/den)^-1 = den * conj(I_int) / N(I_int)
        let n = self.integral_norm();
        self.conj()
            .scale_rational(&(&self.den * &self.den), &n)
            .expect("norm of a nonzero ideal is nonzero")
    }

    fn integral_norm(&self) -> BigInt {
        &self.a * &self.c
    }

    /// Reduced norm as an exact rational.
    pub fn norm(&self) -> BigRational {
        BigRational::new(self.integral_norm(), &self.den * &self.den)
    }

    /// Norm of an integral ideal.
    pub fn norm_int(&self) -> Result<BigInt> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        Ok(self.integral_norm())
    }

    pub fn contains(&self, x: &AlgInt) -> bool {
        self.integral_part_contains(&x.mul_int(&self.den))
    }

    pub fn is_unit_ideal(&self) -> bool {
        self == &Ideal::unit_ideal(self.field)
    }

    /// All elements of the integral ideal with the given positive norm.
    /// The search is complete: the omega-coordinate `q` of any solution obeys
    /// `q^2 <= 4*target/|d_K|`, and for each `q` the norm equation is solved
    /// exactly for the other coordinate.
    pub fn elements_of_norm(&self, target: &BigInt) -> Result<Vec<AlgInt>> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        if !target.is_positive() {
            return Ok(Vec::new());
        }
        let field = self.field;
        let m = BigInt::from(field.m());
        let abs_d = BigInt::from(field.d_k().unsigned_abs());
        let c2 = &self.c * &self.c;
        let ymax = (BigInt::from(4) * target / (&c2 * &abs_d)).sqrt();
        let mut out = Vec::new();
        let mut y = -ymax.clone();
        while y <= ymax {
            let q = &y * &self.c;
            let mut ps: Vec<BigInt> = Vec::new();
            if field.omega_halved() {
                // p^2 + p q + q^2 (1+m)/4 = target
                let disc = BigInt::from(4) * target - &m * &q * &q;
                if !disc.is_negative() {
                    let s = disc.sqrt();
                    if &s * &s == disc {
                        for sgn in [&s, &(-&s)] {
                            let num = sgn - &q;
                            if num.is_even() {
                                ps.push(num / BigInt::from(2));
                            }
                        }
                    }
                }
            } else {
                // p^2 + m q^2 = target
                let rest = target - &m * &q * &q;
                if !rest.is_negative() {
                    let s = rest.sqrt();
                    if &s * &s == rest {
                        ps.push(s.clone());
                        if !s.is_zero() {
                            ps.push(-s);
                        }
                    }
                }
            }
            for p in ps {
                // x = (p - y*b)/a must be integral for membership
                if (&p - &y * &self.b).mod_floor(&self.a).is_zero() {
                    let cand = AlgInt::new(field, p, q.clone());
                    if !out.contains(&cand) {
                        out.push(cand);
                    }
                }
            }
            y += 1;
        }
        out.sort_by(|u, v| {
            (u.coord_b(), u.coord_a()).cmp(&(v.coord_b(), v.coord_a()))
        });
        Ok(out)
    }

    /// The norm form of the ideal in its HNF basis, an integral positive
    /// definite binary quadratic form of discriminant `d_K`.
    pub fn norm_form(&self) -> (BigInt, BigInt, BigInt) {
        let (alpha, beta) = self.basis_elements();
        let n = self.integral_norm();
        let qa = alpha.norm() / &n;
        let qb = (&alpha.conj() * &beta).trace() / &n;
        let qc = beta.norm() / &n;
        (qa, qb, qc)
    }

    /// Decides principality by reduced-form comparison and, in the principal
    /// case, returns the generator with maximal real part (then maximal
    /// imaginary part) among its unit multiples, found by a complete search
    /// over elements of norm `N(I)`.
    pub fn is_principal(&self) -> Result<Option<AlgInt>> {
        if !self.is_integral() {
            return Err(Error::NotIntegral);
        }
        let (qa, qb, qc) = self.norm_form();
        let reduced = crate::classgroup::reduce_triple(qa, qb, qc);
        let principal = crate::classgroup::principal_triple(self.field.d_k());
        if reduced != principal {
            return Ok(None);
        }
        let n = self.integral_norm();
        let candidates = self.elements_of_norm(&n)?;
        let g = candidates
            .into_iter()
            .next()
            .ok_or(Error::Internal("principal ideal has no element of minimal norm"))?;
        Ok(Some(unit_normalize(&g)))
    }

    /// JSON encoding `{"den": n, "basis": [[a, 0], [b, c]]}`.
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert(
            "basis".into(),
            Value::Array(vec![
                Value::Array(vec![
                    jsonutil::bigint_to_json(&self.a),
                    jsonutil::bigint_to_json(&BigInt::zero()),
                ]),
                Value::Array(vec![
                    jsonutil::bigint_to_json(&self.b),
                    jsonutil::bigint_to_json(&self.c),
                ]),
            ]),
        );
        map.insert("den".into(), jsonutil::bigint_to_json(&self.den));
        Value::Object(map)
    }

    pub fn from_json(field: FieldParams, v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Json("ideal must be an object".into()))?;
        let den = jsonutil::bigint_from_json(
            obj.get("den").ok_or_else(|| Error::Json("ideal: missing `den`".into()))?,
            "ideal den",
        )?;
        let basis = obj
            .get("basis")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Json("ideal: missing `basis` array".into()))?;
        if basis.len() != 2 {
            return Err(Error::Json("ideal basis must have two rows".into()));
        }
        let row0 = AlgInt::from_json(field, &basis[0])?;
        let row1 = AlgInt::from_json(field, &basis[1])?;
        if !row0.coord_b().is_zero() {
            return Err(Error::Json("ideal basis row 0 must be [a, 0]".into()));
        }
        if den.is_zero() {
            return Err(Error::Json("ideal den must be nonzero".into()));
        }
        let ideal = Ideal::from_module_gens(field, &[row0, row1], den.abs())?;
        if !ideal.closed_under_omega() {
            return Err(Error::Json("ideal basis does not span an O_K-module".into()));
        }
        Ok(ideal)
    }
}

impl std::fmt::Display for Ideal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den.is_one() {
            write!(f, "[{}, {}+{}w]", self.a, self.b, self.c)
        } else {
            write!(f, "(1/{})[{}, {}+{}w]", self.den, self.a, self.b, self.c)
        }
    }
}

/// The ideal `A_d = O_K d + O_K (m + sqrt(-m))`, the unique integral ideal of
/// reduced norm `d`, defined for squarefree divisors `d` of the discriminant.
pub fn atkin_ideal(field: FieldParams, d: u64) -> Result<Ideal> {
    if d == 0 || !field.squarefree_divisors().contains(&d) {
        return Err(Error::NotAtkinIndex(d, field.d_k()));
    }
    let gen1 = field.from_int(d as i64);
    let gen2 = &field.from_int(field.m() as i64) + &field.sqrt_minus_m();
    let ideal = Ideal::from_generators(&[gen1, gen2])?;
    if ideal.norm_int()? != BigInt::from(d) {
        return Err(Error::Internal("Atkin ideal norm differs from d"));
    }
    let square = ideal.mul(&ideal)?;
    let d_ok = Ideal::principal(&field.from_int(d as i64))?;
    if square != d_ok {
        return Err(Error::Internal("Atkin ideal square differs from d*O_K"));
    }
    Ok(ideal)
}

/// Solves `sum z_i gens_i = target` over `Z`. Returns a particular solution
/// together with a basis of the kernel lattice, or `None` when the target is
/// outside the `Z`-span.
pub fn express_in_span(
    target: &AlgInt,
    gens: &[AlgInt],
) -> Option<(Vec<BigInt>, Vec<Vec<BigInt>>)> {
    let k = gens.len();
    if k == 0 {
        return None;
    }
    // Column-reduce the 2 x k coordinate matrix, tracking the unimodular
    // transform U so that solutions pull back as z = U * y.
    let mut m: Vec<[BigInt; 2]> = gens
        .iter()
        .map(|g| [g.coord_a().clone(), g.coord_b().clone()])
        .collect();
    let mut u: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();

    let combine = |m: &mut Vec<[BigInt; 2]>, u: &mut Vec<Vec<BigInt>>, row: usize, p: usize, j: usize| {
        // zero out m[j][row] against the pivot column p
        let (g, s, t) = {
            let eg = m[p][row].extended_gcd(&m[j][row]);
            (eg.gcd, eg.x, eg.y)
        };
        let cp = m[p].clone();
        let cj = m[j].clone();
        let fp = &cp[row] / &g;
        let fj = &cj[row] / &g;
        for r in 0..2 {
            m[p][r] = &s * &cp[r] + &t * &cj[r];
            m[j][r] = &fp * &cj[r] - &fj * &cp[r];
        }
        for i in 0..k {
            let up = u[i][p].clone();
            let uj = u[i][j].clone();
            u[i][p] = &s * &up + &t * &uj;
            u[i][j] = &fp * &uj - &fj * &up;
        }
    };

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut next_col = 0usize;
    for row in 0..2 {
        let pivot = (next_col..k).find(|&j| !m[j][row].is_zero());
        if let Some(p) = pivot {
            m.swap(p, next_col);
            for item in u.iter_mut() {
                item.swap(p, next_col);
            }
            for j in (next_col + 1)..k {
                if !m[j][row].is_zero() {
                    combine(&mut m, &mut u, row, next_col, j);
                }
            }
            pivots.push((row, next_col));
            next_col += 1;
        }
    }

    // Back-substitute on the (at most two) pivot columns.
    let mut y = vec![BigInt::zero(); k];
    let mut rem = [target.coord_a().clone(), target.coord_b().clone()];
    for &(row, col) in &pivots {
        let (q, r) = rem[row].div_rem(&m[col][row]);
        if !r.is_zero() {
            return None;
        }
        for rr in 0..2 {
            rem[rr] -= &q * &m[col][rr];
        }
        y[col] = q;
    }
    if !rem[0].is_zero() || !rem[1].is_zero() {
        return None;
    }
    let z: Vec<BigInt> = (0..k)
        .map(|i| (0..k).map(|j| &u[i][j] * &y[j]).sum())
        .collect();
    let kernel: Vec<Vec<BigInt>> = (next_col..k)
        .map(|j| (0..k).map(|i| u[i][j].clone()).collect())
        .collect();
    Some((z, kernel))
}

fn divides(d: &BigInt, x: &BigInt) -> bool {
    !d.is_zero() && x.mod_floor(d).is_zero()
}
