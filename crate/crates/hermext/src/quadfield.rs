//! Exact arithmetic in the imaginary-quadratic field `K = Q(sqrt(-m))` and its
//! ring of integers `O_K = Z + Z*omega`.
//!
//! All elements are stored by their coordinates in the integral basis
//! `(1, omega)`, where `omega = (1 + sqrt(-m))/2` for `m = 3 (mod 4)` and
//! `omega = sqrt(-m)` otherwise. Nothing in this module touches floating
//! point except [`AlgInt::to_complex`], which exists for the numeric
//! half-space checks of the orthogonal bridge.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::jsonutil;
use crate::{Error, Result};

/// The field `K = Q(sqrt(-m))` for squarefree `m >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldParams {
    m: u64,
    case3: bool,
}

impl FieldParams {
    /// Validates `m` (positive, squarefree) and fixes the omega case.
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidField(m));
        }
        if !is_squarefree(m) {
            return Err(Error::NotSquarefree(m));
        }
        Ok(FieldParams { m, case3: m % 4 == 3 })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// True when `m = 3 (mod 4)`, i.e. `omega = (1 + sqrt(-m))/2`.
    pub fn omega_halved(&self) -> bool {
        self.case3
    }

    /// The field discriminant: `-m` for `m = 3 (mod 4)`, `-4m` otherwise.
    pub fn d_k(&self) -> i64 {
        if self.case3 {
            -(self.m as i64)
        } else {
            -4 * self.m as i64
        }
    }

    /// Distinct primes dividing the discriminant, ascending.
    pub fn discriminant_primes(&self) -> Vec<u64> {
        distinct_primes(self.d_k().unsigned_abs())
    }

    /// Squarefree positive divisors of the discriminant, ascending.
    pub fn squarefree_divisors(&self) -> Vec<u64> {
        let primes = self.discriminant_primes();
        let mut divs = vec![1u64];
        for p in primes {
            let mut next: Vec<u64> = divs.iter().map(|d| d * p).collect();
            divs.append(&mut next);
        }
        divs.sort_unstable();
        divs
    }

    pub fn zero(&self) -> AlgInt {
        AlgInt::new(*self, BigInt::zero(), BigInt::zero())
    }

    pub fn one(&self) -> AlgInt {
        AlgInt::new(*self, BigInt::one(), BigInt::zero())
    }

    pub fn omega(&self) -> AlgInt {
        AlgInt::new(*self, BigInt::zero(), BigInt::one())
    }

    /// `sqrt(-m)` as an element of `O_K`: `2*omega - 1` or `omega`.
    pub fn sqrt_minus_m(&self) -> AlgInt {
        if self.case3 {
            AlgInt::new(*self, BigInt::from(-1), BigInt::from(2))
        } else {
            self.omega()
        }
    }

    pub fn from_int(&self, v: i64) -> AlgInt {
        AlgInt::new(*self, BigInt::from(v), BigInt::zero())
    }

    /// The unit group of `O_K`: `{±1}` in general, the fourth roots of unity
    /// for `d_K = -4` and the sixth roots of unity for `d_K = -3`, listed as
    /// consecutive powers of a fixed primitive root.
    pub fn units(&self) -> Vec<AlgInt> {
        match self.d_k() {
            -4 => {
                let i = self.omega();
                vec![self.one(), i.clone(), -&self.one(), -&i]
            }
            -3 => {
                let z = self.omega();
                let mut units = Vec::with_capacity(6);
                let mut cur = self.one();
                for _ in 0..6 {
                    units.push(cur.clone());
                    cur = &cur * &z;
                }
                units
            }
            _ => vec![self.one(), -&self.one()],
        }
    }

    /// Numeric value of omega.
    pub fn omega_complex(&self) -> Complex64 {
        let root = (self.m as f64).sqrt();
        if self.case3 {
            Complex64::new(0.5, root / 2.0)
        } else {
            Complex64::new(0.0, root)
        }
    }
}

fn is_squarefree(m: u64) -> bool {
    let mut m = m;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 1;
    }
    true
}

/// Distinct prime divisors of `n`, ascending.
pub fn distinct_primes(mut n: u64) -> Vec<u64> {
    let mut primes = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            primes.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        primes.push(n);
    }
    primes
}

/// An algebraic integer `a + b*omega` in `O_K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgInt {
    field: FieldParams,
    a: BigInt,
    b: BigInt,
}

impl AlgInt {
    pub fn new(field: FieldParams, a: BigInt, b: BigInt) -> Self {
        AlgInt { field, a, b }
    }

    pub fn from_coords(field: FieldParams, a: i64, b: i64) -> Self {
        AlgInt::new(field, BigInt::from(a), BigInt::from(b))
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn coord_a(&self) -> &BigInt {
        &self.a
    }

    pub fn coord_b(&self) -> &BigInt {
        &self.b
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True when the element lies in `Q`, i.e. the omega coordinate vanishes.
    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.a.is_one() && self.b.is_zero()
    }

    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    fn same_field(&self, other: &AlgInt) {
        assert_eq!(
            self.field, other.field,
            "mixed fields: Q(sqrt(-{})) vs Q(sqrt(-{}))",
            self.field.m, other.field.m
        );
    }

    /// Complex conjugate. `conj(omega) = 1 - omega` in the halved case and
    /// `-omega` otherwise.
    pub fn conj(&self) -> AlgInt {
        if self.field.case3 {
            AlgInt::new(self.field, &self.a + &self.b, -&self.b)
        } else {
            AlgInt::new(self.field, self.a.clone(), -&self.b)
        }
    }

    /// `x * conj(x)`, a non-negative rational integer.
    pub fn norm(&self) -> BigInt {
        let m = BigInt::from(self.field.m);
        if self.field.case3 {
            // a^2 + ab + b^2 (1+m)/4
            let q = (BigInt::one() + &m) / BigInt::from(4);
            &self.a * &self.a + &self.a * &self.b + &self.b * &self.b * q
        } else {
            &self.a * &self.a + m * &self.b * &self.b
        }
    }

    /// `x + conj(x)`, a rational integer.
    pub fn trace(&self) -> BigInt {
        if self.field.case3 {
            BigInt::from(2) * &self.a + &self.b
        } else {
            BigInt::from(2) * &self.a
        }
    }

    /// Twice the real part (an integer for every element of `O_K`).
    pub fn double_re(&self) -> BigInt {
        self.trace()
    }

    /// Exact division in `O_K`; `None` when `other` does not divide `self`.
    pub fn div_exact(&self, other: &AlgInt) -> Option<AlgInt> {
        self.same_field(other);
        if other.is_zero() {
            return None;
        }
        let n = other.norm();
        let t = self * &other.conj();
        let (qa, ra) = t.a.div_rem(&n);
        let (qb, rb) = t.b.div_rem(&n);
        if ra.is_zero() && rb.is_zero() {
            Some(AlgInt::new(self.field, qa, qb))
        } else {
            None
        }
    }

    pub fn divides(&self, other: &AlgInt) -> bool {
        other.div_exact(self).is_some()
    }

    pub fn mul_int(&self, k: &BigInt) -> AlgInt {
        AlgInt::new(self.field, &self.a * k, &self.b * k)
    }

    pub fn pow(&self, e: u32) -> AlgInt {
        let mut acc = self.field.one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn to_complex(&self) -> Complex64 {
        let a = bigint_to_f64(&self.a);
        let b = bigint_to_f64(&self.b);
        Complex64::new(a, 0.0) + self.field.omega_complex() * b
    }

    /// JSON encoding: the two-element integer array `[a, b]`.
    pub fn to_json(&self) -> Value {
        Value::Array(vec![jsonutil::bigint_to_json(&self.a), jsonutil::bigint_to_json(&self.b)])
    }

    pub fn from_json(field: FieldParams, v: &Value) -> Result<Self> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Json("element must be a two-element array [a, b]".into()))?;
        if arr.len() != 2 {
            return Err(Error::Json("element must be a two-element array [a, b]".into()));
        }
        let a = jsonutil::bigint_from_json(&arr[0], "element coordinate a")?;
        let b = jsonutil::bigint_from_json(&arr[1], "element coordinate b")?;
        Ok(AlgInt::new(field, a, b))
    }
}

pub(crate) fn bigint_to_f64(v: &BigInt) -> f64 {
    use num_traits::ToPrimitive;
    v.to_f64().unwrap_or(f64::NAN)
}

impl std::fmt::Display for AlgInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}w", self.b)
        } else {
            write!(f, "{}{:+}w", self.a, self.b)
        }
    }
}

macro_rules! algint_binop {
    ($trait:ident, $method:ident, |$x:ident, $y:ident| $body:expr) => {
        impl std::ops::$trait<&AlgInt> for &AlgInt {
            type Output = AlgInt;
            fn $method(self, rhs: &AlgInt) -> AlgInt {
                self.same_field(rhs);
                let $x = self;
                let $y = rhs;
                $body
            }
        }
        impl std::ops::$trait<AlgInt> for AlgInt {
            type Output = AlgInt;
            fn $method(self, rhs: AlgInt) -> AlgInt {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
    };
}

algint_binop!(Add, add, |x, y| AlgInt::new(x.field, &x.a + &y.a, &x.b + &y.b));
algint_binop!(Sub, sub, |x, y| AlgInt::new(x.field, &x.a - &y.a, &x.b - &y.b));
algint_binop!(Mul, mul, |x, y| {
    let f = x.field;
    let m = BigInt::from(f.m);
    let ac = &x.a * &y.a;
    let bd = &x.b * &y.b;
    let cross = &x.a * &y.b + &x.b * &y.a;
    if f.case3 {
        // omega^2 = omega - (1+m)/4
        let q = (BigInt::one() + &m) / BigInt::from(4);
        AlgInt::new(f, ac - &bd * q, cross + bd)
    } else {
        // omega^2 = -m
        AlgInt::new(f, ac - m * bd, cross)
    }
});

impl std::ops::Neg for &AlgInt {
    type Output = AlgInt;
    fn neg(self) -> AlgInt {
        AlgInt::new(self.field, -&self.a, -&self.b)
    }
}

impl std::ops::Neg for AlgInt {
    type Output = AlgInt;
    fn neg(self) -> AlgInt {
        -&self
    }
}

/// An element of `K` stored as `num / den` with `den > 0` and
/// `gcd(num.a, num.b, den) = 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlgNum {
    num: AlgInt,
    den: BigInt,
}

impl AlgNum {
    pub fn new(num: AlgInt, den: BigInt) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::reduced(num, den))
    }

    fn reduced(num: AlgInt, den: BigInt) -> Self {
        let (num, den) = if den.is_negative() { (-num, -den) } else { (num, den) };
        let g = num.a.gcd(&num.b).gcd(&den);
        if g.is_one() || g.is_zero() {
            AlgNum { num, den }
        } else {
            AlgNum {
                num: AlgInt::new(num.field, &num.a / &g, &num.b / &g),
                den: den / g,
            }
        }
    }

    pub fn from_int(x: AlgInt) -> Self {
        AlgNum { den: BigInt::one(), num: x }
    }

    pub fn field(&self) -> FieldParams {
        self.num.field
    }

    pub fn numerator(&self) -> &AlgInt {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integral(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_algint(&self) -> Result<AlgInt> {
        if self.is_integral() {
            Ok(self.num.clone())
        } else {
            Err(Error::NotIntegral)
        }
    }

    pub fn conj(&self) -> AlgNum {
        AlgNum { num: self.num.conj(), den: self.den.clone() }
    }

    /// Norm as a reduced fraction `(num, den)` with `den > 0`.
    pub fn norm(&self) -> (BigInt, BigInt) {
        let n = self.num.norm();
        let d = &self.den * &self.den;
        let g = n.gcd(&d);
        (n / &g, d / g)
    }

    pub fn inv(&self) -> Result<AlgNum> {
        if self.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        // 1/(x/d) = d*conj(x) / N(x)
        AlgNum::new(self.num.conj().mul_int(&self.den), self.num.norm())
    }

    pub fn mul_rational(&self, num: &BigInt, den: &BigInt) -> Result<AlgNum> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        AlgNum::new(self.num.mul_int(num), &self.den * den)
    }

    pub fn to_complex(&self) -> Complex64 {
        self.num.to_complex() / bigint_to_f64(&self.den)
    }
}

impl std::ops::Add<&AlgNum> for &AlgNum {
    type Output = AlgNum;
    fn add(self, rhs: &AlgNum) -> AlgNum {
        AlgNum::reduced(
            self.num.mul_int(&rhs.den) + rhs.num.mul_int(&self.den),
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Sub<&AlgNum> for &AlgNum {
    type Output = AlgNum;
    fn sub(self, rhs: &AlgNum) -> AlgNum {
        AlgNum::reduced(
            self.num.mul_int(&rhs.den) - rhs.num.mul_int(&self.den),
            &self.den * &rhs.den,
        )
    }
}

impl std::ops::Mul<&AlgNum> for &AlgNum {
    type Output = AlgNum;
    fn mul(self, rhs: &AlgNum) -> AlgNum {
        AlgNum::reduced(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl std::ops::Div<&AlgNum> for &AlgNum {
    type Output = AlgNum;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: &AlgNum) -> AlgNum {
        let inv = rhs.inv().expect("division by zero in K");
        self * &inv
    }
}

impl std::ops::Neg for &AlgNum {
    type Output = AlgNum;
    fn neg(self) -> AlgNum {
        AlgNum { num: -&self.num, den: self.den.clone() }
    }
}

/// Deterministic ordering key used when a single representative must be
/// chosen among unit multiples: larger real part first, then larger
/// imaginary part.
pub fn unit_normalize(x: &AlgInt) -> AlgInt {
    let mut best: Option<(BigInt, BigInt, AlgInt)> = None;
    for u in x.field().units() {
        let cand = x * &u;
        let key = (cand.double_re(), cand.coord_b().clone());
        match &best {
            Some((re, im, _)) if (&key.0, &key.1) <= (re, im) => {}
            _ => best = Some((key.0, key.1, cand)),
        }
    }
    best.expect("unit group is never empty").2
}
