//! The exact homomorphism from `SU(2,2;C)` onto the orthogonal group of the
//! signature-(2,4) form `S_1`, together with the half-space actions.
//!
//! All block formulas are evaluated on the integral numerator `L` with the
//! scale tracked separately: a quantity quadratic in `M = (1/u)L` equals
//! `(1/w) * (quadratic in L)` for degree 2, and `1/w = conj(w)/ell^2`, so
//! every entry of the image is an exact rational with denominator dividing
//! `ell^2` before reduction. Floating point enters only in the half-space
//! actions, checked against the documented tolerance.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;

use crate::jsonutil;
use crate::matgroup::{HermMatrix, ScaledMatrix};
use crate::matrix::Mat;
use crate::quadfield::{AlgInt, AlgNum, FieldParams};
use crate::{Error, Result};

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// The Gram data of the field: `S` (2x2), `S_0` (4x4), `S_1` (6x6).
#[derive(Debug, Clone)]
pub struct GramData {
    field: FieldParams,
    pub s: Mat<BigRational>,
    pub s0: Mat<BigRational>,
    pub s1: Mat<BigRational>,
    s1_inv: Mat<BigRational>,
}

impl GramData {
    pub fn new(field: FieldParams) -> Self {
        let omega = field.omega();
        let two_re = BigRational::from_integer(omega.trace());
        let two_norm = BigRational::from_integer(BigInt::from(2) * omega.norm());
        let s = Mat::from_rows(vec![
            vec![rat(2), two_re.clone()],
            vec![two_re, two_norm],
        ]);
        let s0 = Mat::from_fn(4, 4, |r, c| match (r, c) {
            (0, 3) | (3, 0) => rat(1),
            (1..=2, 1..=2) => -s.at(r - 1, c - 1).clone(),
            _ => rat(0),
        });
        let s1 = Mat::from_fn(6, 6, |r, c| match (r, c) {
            (0, 5) | (5, 0) => rat(1),
            (1..=4, 1..=4) => s0.at(r - 1, c - 1).clone(),
            _ => rat(0),
        });
        let s1_inv = s1.inverse().expect("S_1 is nondegenerate");
        GramData { field, s, s0, s1, s1_inv }
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    /// `S_0[z] = z^T S_0 z` for a complex 4-vector.
    pub fn s0_quad(&self, z: &[Complex64; 4]) -> Complex64 {
        let s0 = self.s0.map(rational_to_c64_entry);
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                acc += z[r] * s0.at(r, c) * z[c];
            }
        }
        acc
    }
}

fn rational_to_c64_entry(q: &BigRational) -> Complex64 {
    Complex64::new(rational_to_f64(q), 0.0)
}

pub(crate) fn rational_to_f64(q: &BigRational) -> f64 {
    crate::quadfield::bigint_to_f64(q.numer()) / crate::quadfield::bigint_to_f64(q.denom())
}

/// The linear bijection between Hermitian 2x2 matrices and `R^4`:
/// `[[alpha, beta + gamma*omega], [beta + gamma*conj(omega), delta]]`
/// maps to `(alpha, beta, gamma, delta)`.
pub fn phi_vec(h: &HermMatrix) -> [BigRational; 4] {
    let h12 = h.h12();
    let beta = BigRational::new(h12.numerator().coord_a().clone(), h12.denominator().clone());
    let gamma = BigRational::new(h12.numerator().coord_b().clone(), h12.denominator().clone());
    [h.h11().clone(), beta, gamma, h.h22().clone()]
}

/// Inverse of [`phi_vec`].
pub fn phi_vec_inverse(field: FieldParams, v: &[BigRational; 4]) -> Result<HermMatrix> {
    let den = v[1].denom() * v[2].denom();
    let a = v[1].numer() * v[2].denom();
    let b = v[2].numer() * v[1].denom();
    let h12 = AlgNum::new(AlgInt::new(field, a, b), den)?;
    HermMatrix::new(field, v[0].clone(), h12, v[3].clone())
}

/// A 6x6 rational matrix in the orthogonal group of `S_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoMatrix {
    field: FieldParams,
    mat: Mat<BigRational>,
}

impl OrthoMatrix {
    fn checked(field: FieldParams, mat: Mat<BigRational>, gram: &GramData) -> Result<Self> {
        let lhs = mat.transpose().mul(&gram.s1).mul(&mat);
        if lhs != gram.s1 {
            return Err(Error::Internal("image matrix is not S_1-orthogonal"));
        }
        if mat.det() != BigRational::one() {
            return Err(Error::Internal("image matrix must have determinant 1"));
        }
        Ok(OrthoMatrix { field, mat })
    }

    pub fn field(&self) -> FieldParams {
        self.field
    }

    pub fn entries(&self) -> &Mat<BigRational> {
        &self.mat
    }

    pub fn identity(field: FieldParams) -> Self {
        OrthoMatrix {
            field,
            mat: Mat::from_fn(6, 6, |r, c| if r == c { rat(1) } else { rat(0) }),
        }
    }

    pub fn mul(&self, other: &OrthoMatrix) -> Result<OrthoMatrix> {
        if self.field != other.field {
            return Err(Error::FieldMismatch(self.field.m(), other.field.m()));
        }
        Ok(OrthoMatrix { field: self.field, mat: self.mat.mul(&other.mat) })
    }

    pub fn is_integral(&self) -> bool {
        self.mat.entries().all(|q| q.denom().is_one())
    }

    /// Discriminant kernel membership: `M - I` lies in `Z^{6x6} S_1`.
    pub fn in_discriminant_kernel(&self, gram: &GramData) -> bool {
        let id = Mat::from_fn(6, 6, |r, c| if r == c { rat(1) } else { rat(0) });
        let diff = self.mat.sub(&id);
        diff.mul(&gram.s1_inv).entries().all(|q| q.denom().is_one())
    }

    /// Block data per the displayed shape
    /// `(alpha, a^T S_0, beta; b, K, c; gamma, d^T S_0, delta)`.
    pub fn action_blocks(&self) -> ActionBlocks {
        let m = &self.mat;
        ActionBlocks {
            beta: m.at(0, 5).clone(),
            gamma: m.at(5, 0).clone(),
            delta: m.at(5, 5).clone(),
            b: [m.at(1, 0).clone(), m.at(2, 0).clone(), m.at(3, 0).clone(), m.at(4, 0).clone()],
            c: [m.at(1, 5).clone(), m.at(2, 5).clone(), m.at(3, 5).clone(), m.at(4, 5).clone()],
            k: m.block(1, 1, 4, 4),
            dt_s0: [m.at(5, 1).clone(), m.at(5, 2).clone(), m.at(5, 3).clone(), m.at(5, 4).clone()],
        }
    }

    /// JSON: the 6x6 array of exact rationals as strings `"p/q"`.
    pub fn to_json(&self) -> Value {
        Value::Array(
            (0..6)
                .map(|r| {
                    Value::Array(
                        (0..6)
                            .map(|c| Value::String(jsonutil::rational_to_string(self.mat.at(r, c))))
                            .collect(),
                    )
                })
                .collect(),
        )
    }

    pub fn from_json(field: FieldParams, v: &Value) -> Result<Self> {
        let rows = v.as_array().ok_or_else(|| Error::Json("expected a 6x6 array".into()))?;
        if rows.len() != 6 {
            return Err(Error::Json("expected 6 rows".into()));
        }
        let mut out = Vec::with_capacity(6);
        for row in rows {
            let cells = row.as_array().ok_or_else(|| Error::Json("expected 6 columns".into()))?;
            if cells.len() != 6 {
                return Err(Error::Json("expected 6 columns".into()));
            }
            let mut parsed = Vec::with_capacity(6);
            for cell in cells {
                let s = cell
                    .as_str()
                    .ok_or_else(|| Error::Json("entries must be rational strings".into()))?;
                parsed.push(jsonutil::rational_from_string(s, "orthogonal matrix entry")?);
            }
            out.push(parsed);
        }
        let mat = Mat::from_rows(out);
        let gram = GramData::new(field);
        if mat.transpose().mul(&gram.s1).mul(&mat) != gram.s1 || mat.det() != BigRational::one() {
            return Err(Error::Json("matrix is not special orthogonal for S_1".into()));
        }
        Ok(OrthoMatrix { field, mat })
    }
}

pub struct ActionBlocks {
    pub beta: BigRational,
    pub gamma: BigRational,
    pub delta: BigRational,
    pub b: [BigRational; 4],
    pub c: [BigRational; 4],
    pub k: Mat<BigRational>,
    pub dt_s0: [BigRational; 4],
}

/// Decomposes an integral 2x2 matrix in the complexified Hermitian
/// coordinates and divides by `den`; fails unless all four coordinates are
/// rational (zero omega-part).
fn phi_decompose(x: &Mat<AlgInt>, den: &BigInt) -> Result<[BigRational; 4]> {
    let field = x.at(0, 0).field();
    let as_rational = |v: &AlgNum| -> Result<BigRational> {
        if v.numerator().coord_b().is_zero() {
            Ok(BigRational::new(v.numerator().coord_a().clone(), v.denominator() * den))
        } else {
            Err(Error::Internal("expected a rational coordinate in the phi decomposition"))
        }
    };
    // gamma = (x12 - x21)/(omega - conj(omega)), and the denominator is purely
    // imaginary, so this is -(x12 - x21)(omega - conj(omega))/N(omega - conj(omega))
    let delta = &field.omega() - &field.omega().conj();
    let t = x.at(0, 1) - x.at(1, 0);
    let gamma = AlgNum::new(-&(&t * &delta), delta.norm())?;
    let omega = AlgNum::from_int(field.omega());
    let beta = &AlgNum::from_int(x.at(0, 1).clone()) - &(&gamma * &omega);
    Ok([
        as_rational(&AlgNum::from_int(x.at(0, 0).clone()))?,
        as_rational(&beta)?,
        as_rational(&gamma)?,
        as_rational(&as_num(x.at(1, 1)))?,
    ])
}

fn as_num(x: &AlgInt) -> AlgNum {
    AlgNum::from_int(x.clone())
}

/// The four Hermitian basis matrices `phi^{-1}(e_i)`.
fn herm_basis(field: FieldParams) -> [Mat<AlgInt>; 4] {
    let z = field.zero();
    let o = field.one();
    let w = field.omega();
    [
        Mat::from_rows(vec![vec![o.clone(), z.clone()], vec![z.clone(), z.clone()]]),
        Mat::from_rows(vec![vec![z.clone(), o.clone()], vec![o.clone(), z.clone()]]),
        Mat::from_rows(vec![vec![z.clone(), w.clone()], vec![w.conj(), z.clone()]]),
        Mat::from_rows(vec![vec![z.clone(), z.clone()], vec![z.clone(), o]]),
    ]
}

/// The exact image of a degree-2 scaled matrix under the isomorphism onto
/// `SO_0(S_1)`: entries are rationals, `S_1`-orthogonality and `det = 1`
/// hold exactly, and `phi(M N) = phi(M) phi(N)`, `phi(-M) = phi(M)`.
pub fn phi_mat(m: &ScaledMatrix, gram: &GramData) -> Result<OrthoMatrix> {
    if m.degree() != 2 {
        return Err(Error::DegreeNotTwo);
    }
    if m.field() != gram.field {
        return Err(Error::FieldMismatch(gram.field.m(), m.field().m()));
    }
    let field = m.field();
    let (a, b, c, d) = m.blocks();
    let wbar = m.w().conj();
    let ell2 = m.ell() * m.ell();
    let scalar = |x: AlgInt| -> Result<BigRational> {
        let v = &x * &wbar;
        if v.coord_b().is_zero() {
            Ok(BigRational::new(v.coord_a().clone(), ell2.clone()))
        } else {
            Err(Error::Internal("block determinant must be real"))
        }
    };
    let alpha = scalar(a.det())?;
    let beta = -scalar(b.det())?;
    let gamma = -scalar(c.det())?;
    let delta = scalar(d.det())?;
    let vec_of = |x: Mat<AlgInt>| phi_decompose(&x.scale(&wbar), &ell2);
    let a_vec = vec_of(a.adjugate().mul(&b))?.map(|q| -q);
    let b_vec = vec_of(a.mul(&c.adjugate()))?.map(|q| -q);
    let c_vec = vec_of(b.mul(&d.adjugate()))?;
    let d_vec = vec_of(c.adjugate().mul(&d))?;
    // K column by column on the Hermitian basis: K z = phi(A Z D# + B Z# C#)
    let basis = herm_basis(field);
    let mut k_cols = Vec::with_capacity(4);
    for e in &basis {
        let prod = a.mul(e).mul(&d.adjugate()).add(&b.mul(&e.adjugate()).mul(&c.adjugate()));
        k_cols.push(phi_decompose(&prod.scale(&wbar), &ell2)?);
    }
    let s0 = &gram.s0;
    let row_s0 = |v: &[BigRational; 4], j: usize| -> BigRational {
        let mut acc = BigRational::zero();
        for (i, vi) in v.iter().enumerate() {
            acc += vi * s0.at(i, j);
        }
        acc
    };
    let mat = Mat::from_fn(6, 6, |r, cidx| match (r, cidx) {
        (0, 0) => alpha.clone(),
        (0, 5) => beta.clone(),
        (5, 0) => gamma.clone(),
        (5, 5) => delta.clone(),
        (0, j) => row_s0(&a_vec, j - 1),
        (5, j) => row_s0(&d_vec, j - 1),
        (r, 0) => b_vec[r - 1].clone(),
        (r, 5) => c_vec[r - 1].clone(),
        (r, j) => k_cols[j - 1][r - 1].clone(),
    });
    OrthoMatrix::checked(field, mat, gram)
}

/// A point of the orthogonal half-space: coordinates `(tau_1, z, w, tau_2)`
/// with `Im tau_1 > 0` and `y^T S_0 y > 0`.
#[derive(Debug, Clone, Copy)]
pub struct HalfSpacePoint {
    pub coords: [Complex64; 4],
}

impl HalfSpacePoint {
    pub fn new(coords: [Complex64; 4], gram: &GramData) -> Result<Self> {
        let p = HalfSpacePoint { coords };
        if !p.in_half_space(gram) {
            return Err(Error::BoundaryDegeneracy);
        }
        Ok(p)
    }

    pub fn in_half_space(&self, gram: &GramData) -> bool {
        let y: [Complex64; 4] = core::array::from_fn(|i| Complex64::new(self.coords[i].im, 0.0));
        self.coords[0].im > 0.0 && gram.s0_quad(&y).re > 0.0
    }
}

/// `phi` on points: the image of `Z` in `H_2` under the coordinate bijection.
pub fn phi_point(field: FieldParams, z: &Mat<Complex64>) -> [Complex64; 4] {
    let omega = field.omega_complex();
    let gamma = (z.at(0, 1) - z.at(1, 0)) / (omega - omega.conj());
    let beta = z.at(0, 1) - gamma * omega;
    [*z.at(0, 0), beta, gamma, *z.at(1, 1)]
}

/// Inverse of [`phi_point`].
pub fn phi_point_inverse(field: FieldParams, v: &[Complex64; 4]) -> Mat<Complex64> {
    let omega = field.omega_complex();
    let h12 = v[1] + v[2] * omega;
    let h21 = v[1] + v[2] * omega.conj();
    Mat::from_rows(vec![vec![v[0], h12], vec![h21, v[3]]])
}

/// The action of an orthogonal matrix on the half-space, returning the image
/// point and the automorphy factor `M~{z}`.
pub fn ortho_action(
    mt: &OrthoMatrix,
    z: &HalfSpacePoint,
    gram: &GramData,
    tol: f64,
) -> Result<(HalfSpacePoint, Complex64)> {
    let blocks = mt.action_blocks();
    let zc = z.coords;
    let s0_z = gram.s0_quad(&zc);
    let to_c = |q: &BigRational| Complex64::new(rational_to_f64(q), 0.0);
    let mut factor = -to_c(&blocks.gamma) * s0_z / 2.0 + to_c(&blocks.delta);
    for i in 0..4 {
        factor += to_c(&blocks.dt_s0[i]) * zc[i];
    }
    if factor.norm() < tol {
        return Err(Error::BoundaryDegeneracy);
    }
    let mut image = [Complex64::new(0.0, 0.0); 4];
    for r in 0..4 {
        let mut acc = -s0_z / 2.0 * to_c(&blocks.b[r]) + to_c(&blocks.c[r]);
        for c in 0..4 {
            acc += to_c(blocks.k.at(r, c)) * zc[c];
        }
        image[r] = acc / factor;
    }
    let point = HalfSpacePoint { coords: image };
    if !point.in_half_space(gram) {
        return Err(Error::BoundaryDegeneracy);
    }
    Ok((point, factor))
}

/// Numeric blocks of `M = (1/u) L` with `u = sqrt(w)` (degree 2; either
/// square root gives the same action and factor).
fn complex_blocks(m: &ScaledMatrix) -> (Mat<Complex64>, Mat<Complex64>, Mat<Complex64>, Mat<Complex64>) {
    let u = m.w().to_complex().sqrt();
    let (a, b, c, d) = m.blocks();
    let conv = |blk: &Mat<AlgInt>| blk.map(|x| x.to_complex() / u);
    (conv(&a), conv(&b), conv(&c), conv(&d))
}

/// Membership of a complex 2x2 point in the Hermitian half-space:
/// `(Z - conj(Z)^T)/(2i)` positive definite.
pub fn in_hermitian_half_space(z: &Mat<Complex64>) -> bool {
    let y11 = (z.at(0, 0) - z.at(0, 0).conj()) / Complex64::new(0.0, 2.0);
    let y22 = (z.at(1, 1) - z.at(1, 1).conj()) / Complex64::new(0.0, 2.0);
    let y12 = (z.at(0, 1) - z.at(1, 0).conj()) / Complex64::new(0.0, 2.0);
    let det = y11.re * y22.re - y12.norm_sqr();
    y11.re > 0.0 && det > 0.0
}

/// The Moebius-type action `Z -> (AZ + B)(CZ + D)^{-1}` together with the
/// factor `det(CZ + D)`.
pub fn su_action(m: &ScaledMatrix, z: &Mat<Complex64>) -> Result<(Mat<Complex64>, Complex64)> {
    if m.degree() != 2 {
        return Err(Error::DegreeNotTwo);
    }
    if !in_hermitian_half_space(z) {
        return Err(Error::BoundaryDegeneracy);
    }
    let (a, b, c, d) = complex_blocks(m);
    let num = a.mul(z).add(&b);
    let den = c.mul(z).add(&d);
    let det = den.at(0, 0) * den.at(1, 1) - den.at(0, 1) * den.at(1, 0);
    if det.norm() < 1e-12 {
        return Err(Error::SingularFactor);
    }
    let inv = Mat::from_rows(vec![
        vec![den.at(1, 1) / det, -den.at(0, 1) / det],
        vec![-den.at(1, 0) / det, den.at(0, 0) / det],
    ]);
    let image = num.mul(&inv);
    if !in_hermitian_half_space(&image) {
        return Err(Error::BoundaryDegeneracy);
    }
    Ok((image, det))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classgroup::ClassGroup;
    use crate::extension::{atkin_lehner, atkin_decomposition};
    use crate::matgroup::WordSampler;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f(m: u64) -> FieldParams {
        FieldParams::new(m).unwrap()
    }

    fn id6(field: FieldParams) -> OrthoMatrix {
        OrthoMatrix::identity(field)
    }

    #[test]
    fn gram_matrices() {
        let g5 = GramData::new(f(5));
        assert_eq!(g5.s.at(0, 0), &rat(2));
        assert_eq!(g5.s.at(0, 1), &rat(0));
        assert_eq!(g5.s.at(1, 1), &rat(10));
        let g7 = GramData::new(f(7));
        assert_eq!(g7.s.at(0, 1), &rat(1));
        assert_eq!(g7.s.at(1, 1), &rat(4));
        // det S = |d_K|
        assert_eq!(g5.s.det(), rat(20));
        assert_eq!(g7.s.det(), rat(7));
        assert_eq!(g5.s1.det(), rat(20));
    }

    #[test]
    fn phi_vec_bijection() {
        let k = f(5);
        let h = HermMatrix::from_integral(&Mat::from_rows(vec![
            vec![k.one(), k.zero()],
            vec![k.zero(), k.one()],
        ]))
        .unwrap();
        assert_eq!(phi_vec(&h), [rat(1), rat(0), rat(0), rat(1)]);
        let hw = HermMatrix::from_integral(&Mat::from_rows(vec![
            vec![k.zero(), k.omega()],
            vec![k.omega().conj(), k.zero()],
        ]))
        .unwrap();
        assert_eq!(phi_vec(&hw), [rat(0), rat(0), rat(1), rat(0)]);
        let back = phi_vec_inverse(k, &phi_vec(&hw)).unwrap();
        assert_eq!(back, hw);
    }

    #[test]
    fn det_is_half_s0_quadratic_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in [1u64, 5, 7] {
            let k = f(m);
            let gram = GramData::new(k);
            for _ in 0..100 {
                let h = Mat::from_rows(vec![
                    vec![k.from_int(rng.gen_range(-9i64..=9)), AlgInt::from_coords(k, rng.gen_range(-9i64..=9), rng.gen_range(-9i64..=9))],
                    vec![k.zero(), k.from_int(rng.gen_range(-9i64..=9))],
                ]);
                let h = Mat::from_rows(vec![
                    vec![h.at(0, 0).clone(), h.at(0, 1).clone()],
                    vec![h.at(0, 1).conj(), h.at(1, 1).clone()],
                ]);
                let hm = HermMatrix::from_integral(&h).unwrap();
                let v = phi_vec(&hm);
                // S_0[v] over exact rationals
                let mut acc = BigRational::zero();
                for r in 0..4 {
                    for c in 0..4 {
                        acc += &v[r] * gram.s0.at(r, c) * &v[c];
                    }
                }
                assert_eq!(hm.det(), acc / rat(2));
            }
        }
    }

    #[test]
    fn phi_of_j_is_the_displayed_matrix() {
        for m in [1u64, 2, 5, 6] {
            let k = f(m);
            let gram = GramData::new(k);
            let j = ScaledMatrix::j_matrix(k, 2);
            let img = phi_mat(&j, &gram).unwrap();
            // (0 0 P; 0 I 0; P 0 0) with P = (0 -1; -1 0)
            let expect = Mat::from_fn(6, 6, |r, c| match (r, c) {
                (0, 5) | (5, 0) | (1, 4) | (4, 1) => rat(-1),
                (2, 2) | (3, 3) => rat(1),
                _ => rat(0),
            });
            assert_eq!(img.entries(), &expect, "m={m}");
        }
    }

    #[test]
    fn phi_of_identity_orbit_is_identity() {
        // the triple of I also covers -I; the kernel {±I} collapses
        let k = f(5);
        let gram = GramData::new(k);
        let id = ScaledMatrix::identity(k, 2);
        assert_eq!(phi_mat(&id, &gram).unwrap(), id6(k));
    }

    #[test]
    fn phi_of_translation_has_displayed_shape() {
        let k = f(5);
        let gram = GramData::new(k);
        let h = Mat::from_rows(vec![
            vec![k.from_int(2), k.omega()],
            vec![k.omega().conj(), k.from_int(-1)],
        ]);
        let t = ScaledMatrix::translation(k, &h).unwrap();
        let img = phi_mat(&t, &gram).unwrap();
        let hm = HermMatrix::from_integral(&h).unwrap();
        let lam = phi_vec(&hm);
        // middle-right column c = phi(H), K = I, beta = -det H, top row -phi(H)^T S_0
        for r in 0..4 {
            assert_eq!(img.entries().at(r + 1, 5), &lam[r]);
            for c in 0..4 {
                let expect = if r == c { rat(1) } else { rat(0) };
                assert_eq!(img.entries().at(r + 1, c + 1), &expect);
            }
        }
        assert_eq!(img.entries().at(0, 5), &-hm.det());
        let mut top = [BigRational::zero(), BigRational::zero(), BigRational::zero(), BigRational::zero()];
        for (j, item) in top.iter_mut().enumerate() {
            let mut acc = BigRational::zero();
            for i in 0..4 {
                acc += &lam[i] * gram.s0.at(i, j);
            }
            *item = -acc;
        }
        for j in 0..4 {
            assert_eq!(img.entries().at(0, j + 1), &top[j]);
        }
    }

    #[test]
    fn phi_is_multiplicative_and_orthogonal_on_words() {
        for m in [1u64, 5] {
            let k = f(m);
            let gram = GramData::new(k);
            let mut sampler = WordSampler::new(k, 2, ChaCha8Rng::seed_from_u64(29));
            let w2 = atkin_lehner(k, 2).unwrap();
            for _ in 0..25 {
                let x = sampler.random_word(5);
                let y = sampler.random_word(5).mul(&w2).unwrap();
                let px = phi_mat(&x, &gram).unwrap();
                let py = phi_mat(&y, &gram).unwrap();
                // orthogonality is checked inside phi_mat; multiplicativity:
                let pxy = phi_mat(&x.mul(&y).unwrap(), &gram).unwrap();
                assert_eq!(pxy, px.mul(&py).unwrap());
            }
        }
    }

    #[test]
    fn phi_kernel_is_plus_minus_identity() {
        let k = f(5);
        let gram = GramData::new(k);
        let mut sampler = WordSampler::new(k, 2, ChaCha8Rng::seed_from_u64(31));
        for _ in 0..10 {
            let x = sampler.random_word(5);
            let y = sampler.random_word(5);
            let px = phi_mat(&x, &gram).unwrap();
            let py = phi_mat(&y, &gram).unwrap();
            // since the triples already identify ±M, phi is injective here
            assert_eq!(px == py, x == y);
        }
    }

    #[test]
    fn phi_integral_on_extended_group_and_kernel_on_gamma() {
        for m in [1u64, 2, 3, 5, 6, 7, 15] {
            let k = f(m);
            let gram = GramData::new(k);
            for rec in atkin_decomposition(k).unwrap() {
                let img = phi_mat(&rec.matrix, &gram).unwrap();
                assert!(img.is_integral(), "m={m} d={}", rec.d);
            }
            let mut sampler = WordSampler::new(k, 2, ChaCha8Rng::seed_from_u64(37));
            for _ in 0..20 {
                let g = sampler.random_word(5);
                let img = phi_mat(&g, &gram).unwrap();
                assert!(img.is_integral());
                assert!(img.in_discriminant_kernel(&gram), "m={m}");
            }
            // W_d with d > 1 is integral but not in the discriminant kernel
            let nontrivial = atkin_decomposition(k)
                .unwrap()
                .into_iter()
                .find(|r| r.d > 1)
                .unwrap();
            let img = phi_mat(&nontrivial.matrix, &gram).unwrap();
            assert!(!img.in_discriminant_kernel(&gram), "m={m}");
        }
    }

    fn random_h2_point(rng: &mut ChaCha8Rng) -> Mat<Complex64> {
        let re = |rng: &mut ChaCha8Rng| rng.gen_range(-1.0..1.0);
        let x12 = Complex64::new(re(rng), re(rng));
        let y12 = Complex64::new(re(rng) * 0.2, re(rng) * 0.2);
        let z11 = Complex64::new(re(rng), 1.0 + re(rng).abs());
        let z22 = Complex64::new(re(rng), 1.0 + re(rng).abs());
        Mat::from_rows(vec![
            vec![z11, x12 + y12 * Complex64::new(0.0, 1.0)],
            vec![x12.conj() + y12.conj() * Complex64::new(0.0, 1.0), z22],
        ])
    }

    #[test]
    fn su_action_basics() {
        let k = f(5);
        let j = ScaledMatrix::j_matrix(k, 2);
        let i2 = Mat::from_rows(vec![
            vec![Complex64::new(0.0, 1.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)],
        ]);
        // J<iI> = -(iI)^{-1} = iI
        let (img, _) = su_action(&j, &i2).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                let expect = if r == c { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) };
                assert!((img.at(r, c) - expect).norm() < 1e-12);
            }
        }
        // translations shift
        let h = Mat::from_rows(vec![vec![k.from_int(2), k.zero()], vec![k.zero(), k.from_int(3)]]);
        let t = ScaledMatrix::translation(k, &h).unwrap();
        let (img, det) = su_action(&t, &i2).unwrap();
        assert!((img.at(0, 0) - Complex64::new(2.0, 1.0)).norm() < 1e-12);
        assert!((img.at(1, 1) - Complex64::new(3.0, 1.0)).norm() < 1e-12);
        assert!((det - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        // boundary rejection
        let boundary = Mat::from_rows(vec![
            vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ]);
        assert!(su_action(&j, &boundary).is_err());
    }

    #[test]
    fn jtilde_fixes_phi_of_i_identity() {
        let k = f(5);
        let gram = GramData::new(k);
        let j = phi_mat(&ScaledMatrix::j_matrix(k, 2), &gram).unwrap();
        let i = Complex64::new(0.0, 1.0);
        let z = HalfSpacePoint::new([i, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), i], &gram).unwrap();
        let (img, _) = ortho_action(&j, &z, &gram, 1e-9).unwrap();
        for c in 0..4 {
            assert!((img.coords[c] - z.coords[c]).norm() < 1e-12);
        }
        // the identity fixes every point with factor 1
        let (fix, factor) = ortho_action(&id6(k), &z, &gram, 1e-9).unwrap();
        for c in 0..4 {
            assert_eq!(fix.coords[c], z.coords[c]);
        }
        assert_eq!(factor, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn action_equivariance_and_factor_identity() {
        let tol = 1e-9;
        for m in [1u64, 5, 6] {
            let k = f(m);
            let gram = GramData::new(k);
            let mut rng = ChaCha8Rng::seed_from_u64(41);
            let mut sampler = WordSampler::new(k, 2, ChaCha8Rng::seed_from_u64(43));
            let w_last = atkin_decomposition(k).unwrap().pop().unwrap().matrix;
            for trial in 0..20 {
                let word = if trial % 3 == 0 {
                    w_last.clone()
                } else {
                    sampler.random_mild_word(3, 10_000)
                };
                let mt = phi_mat(&word, &gram).unwrap();
                let z = random_h2_point(&mut rng);
                let (img, det) = match su_action(&word, &z) {
                    Ok(v) => v,
                    Err(_) => continue,
                };
                let zp = HalfSpacePoint::new(phi_point(k, &z), &gram).unwrap();
                let (img_o, factor) = ortho_action(&mt, &zp, &gram, tol).unwrap();
                let img_vec = phi_point(k, &img);
                for c in 0..4 {
                    assert!(
                        (img_vec[c] - img_o.coords[c]).norm() < tol,
                        "m={m} coord {c}"
                    );
                }
                assert!((det - factor).norm() < tol, "m={m} factor");
            }
        }
    }

    #[test]
    fn ortho_json_round_trip() {
        let k = f(5);
        let gram = GramData::new(k);
        let w2 = atkin_lehner(k, 2).unwrap();
        let img = phi_mat(&w2, &gram).unwrap();
        let v = img.to_json();
        assert_eq!(OrthoMatrix::from_json(k, &v).unwrap(), img);
    }

    #[test]
    fn phi_rejects_wrong_degree() {
        let k = f(5);
        let gram = GramData::new(k);
        let cl = ClassGroup::new(k);
        let _ = cl;
        let id3 = ScaledMatrix::identity(k, 3);
        assert_eq!(phi_mat(&id3, &gram).unwrap_err(), Error::DegreeNotTwo);
    }
}
