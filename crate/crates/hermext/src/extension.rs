//! Construction of coset representatives for the extended Hermitian modular
//! group: elementary-divisor matrices over `O_K` in the pseudo-matrix
//! (Steinitz) style, block representatives `(1/u) diag(A, ell*conj(A)^{T,-1})`,
//! the degree-2 Atkin-Lehner involutions `W_d`, and the `SL_n` analogue.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::classgroup::{ClassGroup, QuadForm};
use crate::ideals::{express_in_span, Ideal};
use crate::matgroup::ScaledMatrix;
use crate::matrix::Mat;
use crate::quadfield::{AlgInt, AlgNum, FieldParams};
use crate::{Error, Result};

/// The ideal generated by all `k x k` minors of an integral square matrix.
pub fn minor_ideal(mat: &Mat<AlgInt>, k: usize) -> Result<Ideal> {
    let n = mat.rows();
    if k == 0 || k > n || mat.cols() != n {
        return Err(Error::DimensionMismatch);
    }
    let combos = combinations(n, k);
    let mut gens = Vec::new();
    for rows in &combos {
        for cols in &combos {
            let d = mat.submatrix(rows, cols).det();
            if !d.is_zero() {
                gens.push(d);
            }
        }
    }
    Ideal::from_generators(&gens)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Elements of the integral ideal ordered by ascending norm (element norms
/// are multiples of `N(I)`), at least `count` of them.
fn small_elements(ideal: &Ideal, count: usize) -> Result<Vec<AlgInt>> {
    let base = ideal.norm_int()?;
    let mut out = Vec::new();
    let mut k = BigInt::one();
    while out.len() < count && k <= BigInt::from(200) {
        out.extend(ideal.elements_of_norm(&(&base * &k))?);
        k += 1;
    }
    if out.is_empty() {
        return Err(Error::SearchExhausted("no small elements in ideal"));
    }
    Ok(out)
}

/// Writes `1 = e + f` with `e` in `E` and `f` in `F` for comaximal integral
/// ideals.
fn split_unity(e_ideal: &Ideal, f_ideal: &Ideal) -> Result<(AlgInt, AlgInt)> {
    let field = e_ideal.field();
    let (e1, e2) = e_ideal.basis_elements();
    let (f1, f2) = f_ideal.basis_elements();
    let one = field.one();
    let (z, _) = express_in_span(&one, &[e1.clone(), e2.clone(), f1, f2])
        .ok_or(Error::SearchExhausted("ideals are not comaximal"))?;
    let e = &e1.mul_int(&z[0]) + &e2.mul_int(&z[1]);
    let f = &one - &e;
    if !e_ideal.contains(&e) || !f_ideal.contains(&f) {
        return Err(Error::Internal("unity split escaped its ideals"));
    }
    Ok((e, f))
}

/// One pseudo-basis step `(I, J) -> (O_K, I*J)`: returns the 2x2 transform
/// `[[x, p], [y, q]]` with `x in I`, `y in J`, `p in J^{-1}`, `q in I^{-1}`
/// and `x q - y p = 1`.
fn steinitz_step(i_ideal: &Ideal, j_ideal: &Ideal) -> Result<[AlgNum; 4]> {
    let i_inv = i_ideal.inverse();
    let j_inv = j_ideal.inverse();
    let xs = small_elements(i_ideal, 40)?;
    let ys = small_elements(j_ideal, 40)?;
    for x in &xs {
        let e_ideal = i_inv.mul_element(x)?;
        if !e_ideal.is_integral() {
            return Err(Error::Internal("x I^{-1} must be integral"));
        }
        for y in &ys {
            let f_ideal = j_inv.mul_element(y)?;
            if !f_ideal.is_integral() {
                return Err(Error::Internal("y J^{-1} must be integral"));
            }
            if !e_ideal.add(&f_ideal)?.is_unit_ideal() {
                continue;
            }
            let (e, f) = split_unity(&e_ideal, &f_ideal)?;
            let q = &AlgNum::from_int(e) / &AlgNum::from_int(x.clone());
            let p = -&(&AlgNum::from_int(f) / &AlgNum::from_int(y.clone()));
            return Ok([AlgNum::from_int(x.clone()), p, AlgNum::from_int(y.clone()), q]);
        }
    }
    Err(Error::SearchExhausted("no comaximal pair found"))
}

/// Canonical integer solution of `g = alpha g1^2 + beta g1 g2 + gamma g2^2`:
/// the kernel of the 2x3 system has rank one, and the representative with
/// minimal `|gamma|` (positive on ties) is chosen.
fn quadratic_representation(g: &AlgInt, g1: &AlgInt, g2: &AlgInt) -> Result<[BigInt; 3]> {
    let gens = [g1 * g1, g1 * g2, g2 * g2];
    let (z, kernel) = express_in_span(g, &gens)
        .ok_or(Error::Internal("g lies in the Z-span of the basis products"))?;
    if kernel.len() != 1 || kernel[0][2].is_zero() {
        return Err(Error::Internal("unexpected kernel shape for the norm representation"));
    }
    let k = &kernel[0];
    let (num, den) = (-&z[2], k[2].clone());
    let t0 = num.div_floor(&den);
    let mut best: Option<[BigInt; 3]> = None;
    for t in [t0.clone(), &t0 + 1, &t0 - 1] {
        let cand = [&z[0] + &t * &k[0], &z[1] + &t * &k[1], &z[2] + &t * &k[2]];
        let better = match &best {
            None => true,
            Some(b) => {
                let (ca, ba) = (cand[2].abs(), b[2].abs());
                ca < ba || (ca == ba && cand[2] > b[2])
            }
        };
        if better {
            best = Some(cand);
        }
    }
    Ok(best.expect("candidate list is nonempty"))
}

/// An `n x n` matrix over `O_K` whose columns span `A + ... + A`: every
/// `k x k` minor ideal equals `A^k` and the determinant is the returned
/// generator `g` of `A^n`. Requires `[A]` to be `n`-torsion, otherwise the
/// Steinitz class of the requested module is not principal and the
/// construction fails.
pub fn elementary_divisor_matrix(a_ideal: &Ideal, n: usize) -> Result<(Mat<AlgInt>, AlgInt)> {
    if n == 0 {
        return Err(Error::DimensionMismatch);
    }
    if !a_ideal.is_integral() {
        return Err(Error::NotIntegral);
    }
    let field = a_ideal.field();
    let g = a_ideal.pow(n).is_principal()?.ok_or(Error::NotNTorsion)?;
    if let Some(gamma) = a_ideal.is_principal()? {
        // free module: diag(gamma, ..., gamma); its determinant gamma^n is
        // the generator reported
        let d = gamma.pow(n as u32);
        let mat = Mat::from_fn(n, n, |r, c| if r == c { gamma.clone() } else { field.zero() });
        verify_minor_ladder(&mat, a_ideal, n)?;
        return Ok((mat, d));
    }
    let mat = if n == 2 {
        // solve g = alpha a^2 + beta a b + gamma b^2 over Z on the HNF basis
        // and complete the second row as (-gamma b, alpha a + beta b)
        let (g1, g2) = a_ideal.basis_elements();
        let [alpha, beta, gamma] = quadratic_representation(&g, &g1, &g2)?;
        let row2a = -&g2.mul_int(&gamma);
        let row2b = &g1.mul_int(&alpha) + &g2.mul_int(&beta);
        Mat::from_rows(vec![vec![g1, g2], vec![row2a, row2b]])
    } else {
        // pseudo-matrix reduction (I, (A,...,A)) -> (M, (O_K,...,O_K, A^n))
        let mut mat = Mat::from_fn(n, n, |r, c| {
            AlgNum::from_int(if r == c { field.one() } else { field.zero() })
        });
        let mut acc = a_ideal.clone();
        for k in 0..n - 1 {
            let t = steinitz_step(&acc, a_ideal)?;
            for r in 0..n {
                let ck = mat.at(r, k).clone();
                let ck1 = mat.at(r, k + 1).clone();
                mat.set(r, k, &(&ck * &t[0]) + &(&ck1 * &t[2]));
                mat.set(r, k + 1, &(&ck * &t[1]) + &(&ck1 * &t[3]));
            }
            acc = acc.mul(a_ideal)?;
        }
        let g_num = AlgNum::from_int(g.clone());
        Mat::from_fn(n, n, |r, c| {
            let e = if c == n - 1 { mat.at(r, c) * &g_num } else { mat.at(r, c).clone() };
            e.to_algint().expect("final pseudo-matrix columns are integral")
        })
    };
    if mat.det() != g {
        return Err(Error::Internal("determinant differs from the reported generator"));
    }
    verify_minor_ladder(&mat, a_ideal, n)?;
    Ok((mat, g))
}

fn verify_minor_ladder(mat: &Mat<AlgInt>, a_ideal: &Ideal, n: usize) -> Result<()> {
    for k in 1..=n {
        if minor_ideal(mat, k)? != a_ideal.pow(k) {
            return Err(Error::Internal("minor ideal ladder differs from A^k"));
        }
    }
    Ok(())
}

/// A constructed representative with its provenance.
#[derive(Debug, Clone)]
pub struct CosetRep {
    pub matrix: ScaledMatrix,
    /// Index of the attached class in the ambient class group.
    pub class_index: usize,
    /// The reduced form of the class.
    pub class_form: QuadForm,
    /// The determinant generator of the `A`-block.
    pub generator: AlgInt,
}

impl CosetRep {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("class".into(), self.class_form.to_json());
        map.insert("generator".into(), self.generator.to_json());
        map.insert("matrix".into(), self.matrix.to_json());
        Value::Object(map)
    }
}

/// One representative `(1/u) diag(A, ell*conj(A)^{T,-1})` per class in
/// `Cl_K[n]`, with `ell = N(A)` and `w = det A`.
pub fn coset_representatives(
    field: FieldParams,
    n: usize,
    cl: &ClassGroup,
) -> Result<Vec<CosetRep>> {
    if cl.field() != field {
        return Err(Error::FieldMismatch(field.m(), cl.field().m()));
    }
    let mut reps = Vec::new();
    for class_index in cl.torsion_subgroup(n as u64) {
        let a_ideal = cl.ideal_of_class(class_index);
        let (a_blk, g) = elementary_divisor_matrix(&a_ideal, n)?;
        let ell = a_ideal.norm_int()?;
        let matrix = block_representative(field, n, &a_blk, &ell, &g)?;
        let dm = matrix.delta_membership(cl)?;
        if !dm.member || dm.class != Some(class_index) {
            return Err(Error::Internal("representative misses its intended class"));
        }
        reps.push(CosetRep {
            matrix,
            class_index,
            class_form: cl.form(class_index).clone(),
            generator: g,
        });
    }
    Ok(reps)
}

/// Assembles `diag(A, D)` with `D = ell * conj(A)^{T,-1}`, verified integral.
fn block_representative(
    field: FieldParams,
    n: usize,
    a_blk: &Mat<AlgInt>,
    ell: &BigInt,
    g: &AlgInt,
) -> Result<ScaledMatrix> {
    let conj_t = a_blk.map(|x| AlgNum::from_int(x.conj())).transpose();
    let inv = conj_t.inverse().ok_or(Error::Internal("A-block is invertible"))?;
    let ell_num = AlgNum::from_int(AlgInt::new(field, ell.clone(), BigInt::zero()));
    let mut d_entries = Vec::with_capacity(n * n);
    for r in 0..n {
        for c in 0..n {
            d_entries.push((inv.at(r, c) * &ell_num).to_algint()?);
        }
    }
    let d_blk = Mat::from_fn(n, n, |r, c| d_entries[r * n + c].clone());
    let zero = Mat::from_fn(n, n, |_, _| field.zero());
    let l = Mat::from_blocks(a_blk, &zero, &zero, &d_blk);
    ScaledMatrix::new(l, n, ell.clone(), g.clone())
}

/// The numerator of the Atkin-Lehner block `V_d` together with the chosen
/// `(u, v)` solving `u d - v (m^2+m)/d = 1` (minimal positive `u`).
pub fn atkin_v_numerator(field: FieldParams, d: u64) -> Result<(Mat<AlgInt>, BigInt, BigInt)> {
    if d == 0 || !field.squarefree_divisors().contains(&d) {
        return Err(Error::NotAtkinIndex(d, field.d_k()));
    }
    let m = BigInt::from(field.m());
    let d_big = BigInt::from(d);
    let modulus = (&m * &m + &m) / &d_big;
    if !d_big.gcd(&modulus).is_one() {
        return Err(Error::Internal("d and (m^2+m)/d are coprime for valid d"));
    }
    let u = if modulus.is_one() {
        BigInt::one()
    } else {
        let eg = d_big.extended_gcd(&modulus);
        let mut u = eg.x.mod_floor(&modulus);
        if u.is_zero() {
            u = modulus.clone();
        }
        u
    };
    let v = (&u * &d_big - BigInt::one()) / &modulus;
    let root = field.sqrt_minus_m();
    let m_plus = &field.from_int(field.m() as i64) + &root;
    let m_minus = &field.from_int(field.m() as i64) - &root;
    let n_d = Mat::from_rows(vec![
        vec![AlgInt::new(field, &u * &d_big, BigInt::zero()), m_plus.mul_int(&v)],
        vec![m_minus, AlgInt::new(field, d_big.clone(), BigInt::zero())],
    ]);
    if n_d.det() != AlgInt::new(field, d_big, BigInt::zero()) {
        return Err(Error::Internal("det V_d must be 1"));
    }
    Ok((n_d, u, v))
}

/// The Atkin-Lehner involution `W_d = diag(conj(V_d)^T, V_d^{-1})` as a
/// scaled matrix with `ell = d` and `w = d`.
pub fn atkin_lehner(field: FieldParams, d: u64) -> Result<ScaledMatrix> {
    let (n_d, _, _) = atkin_v_numerator(field, d)?;
    let a = n_d.map(AlgInt::conj).transpose();
    let d_blk = n_d.adjugate();
    let zero = Mat::from_fn(2, 2, |_, _| field.zero());
    let l = Mat::from_blocks(&a, &zero, &zero, &d_blk);
    ScaledMatrix::new(l, 2, BigInt::from(d), field.from_int(d as i64))
}

#[derive(Debug, Clone)]
pub struct AtkinRecord {
    pub d: u64,
    pub matrix: ScaledMatrix,
}

impl AtkinRecord {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("d".into(), Value::from(self.d));
        map.insert("matrix".into(), self.matrix.to_json());
        Value::Object(map)
    }
}

/// The full degree-2 coset decomposition `{W_d : d | d_K squarefree}`,
/// `2^nu` matrices for `nu` primes dividing the discriminant.
pub fn atkin_decomposition(field: FieldParams) -> Result<Vec<AtkinRecord>> {
    field
        .squarefree_divisors()
        .into_iter()
        .map(|d| Ok(AtkinRecord { d, matrix: atkin_lehner(field, d)? }))
        .collect()
}

#[derive(Debug, Clone)]
pub struct EvenDegreeRep {
    pub d: u64,
    pub matrix: ScaledMatrix,
    pub class_index: usize,
}

/// Representatives for even degree `n` when the class group is all
/// 2-torsion: block-diagonal copies of `conj(V_d)^T` and `V_d^{-1}` with
/// `ell = d`, `w = d^{n/2}`.
pub fn even_n_reps(field: FieldParams, n: usize, cl: &ClassGroup) -> Result<Vec<EvenDegreeRep>> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::DegreeNotEven);
    }
    if cl.field() != field {
        return Err(Error::FieldMismatch(field.m(), cl.field().m()));
    }
    if cl.torsion_subgroup(2).len() != cl.h() {
        return Err(Error::NotTwoTorsion);
    }
    let half = n / 2;
    let mut out = Vec::new();
    for d in field.squarefree_divisors() {
        let (n_d, _, _) = atkin_v_numerator(field, d)?;
        let top = n_d.map(AlgInt::conj).transpose();
        let bottom = n_d.adjugate();
        let l = Mat::from_fn(2 * n, 2 * n, |r, c| {
            // 2x2 blocks along the diagonal: `half` copies of top, then bottom
            let (br, bc) = (r / 2, c / 2);
            if br != bc {
                return field.zero();
            }
            let src = if br < half { &top } else { &bottom };
            src.at(r % 2, c % 2).clone()
        });
        let w = field.from_int(d as i64).pow(half as u32);
        let matrix = ScaledMatrix::new(l, n, BigInt::from(d), w)?;
        let dm = matrix.delta_membership(cl)?;
        if !dm.member {
            return Err(Error::Internal("even-degree representative left the extended group"));
        }
        out.push(EvenDegreeRep { d, matrix, class_index: dm.class.expect("member class") });
    }
    Ok(out)
}

/// A scaled `n x n` matrix `(1/u) L` in the normalizer of `SL_n(O_K)`:
/// `O_K det L = I(L)^n`.
#[derive(Debug, Clone)]
pub struct SlRep {
    pub l: Mat<AlgInt>,
    pub det: AlgInt,
    pub class_index: usize,
}

/// One representative per class in `Cl_K[n]` for the maximal discrete
/// extension of `SL_n(O_K)`, reusing the elementary divisor matrices.
pub fn sl_normalizer_reps(field: FieldParams, n: usize, cl: &ClassGroup) -> Result<Vec<SlRep>> {
    if cl.field() != field {
        return Err(Error::FieldMismatch(field.m(), cl.field().m()));
    }
    let mut out = Vec::new();
    for class_index in cl.torsion_subgroup(n as u64) {
        let a_ideal = cl.ideal_of_class(class_index);
        let (l, det) = elementary_divisor_matrix(&a_ideal, n)?;
        let content = minor_ideal(&l, 1)?;
        if Ideal::principal(&det)? != content.pow(n) {
            return Err(Error::Internal("SL representative violates O_K det L = I(L)^n"));
        }
        out.push(SlRep { l, det, class_index });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::atkin_ideal;
    use crate::matgroup::Modulus;

    fn f(m: u64) -> FieldParams {
        FieldParams::new(m).unwrap()
    }

    #[test]
    fn edm_matches_pinned_degree_two_matrix() {
        // m=5, A = A_2: [[2, 1+w], [-(1+w), 3-w]] with determinant 2
        let k = f(5);
        let a2 = atkin_ideal(k, 2).unwrap();
        let (mat, g) = elementary_divisor_matrix(&a2, 2).unwrap();
        assert_eq!(g, k.from_int(2));
        assert_eq!(mat.at(0, 0), &k.from_int(2));
        assert_eq!(mat.at(0, 1), &AlgInt::from_coords(k, 1, 1));
        assert_eq!(mat.at(1, 0), &AlgInt::from_coords(k, -1, -1));
        assert_eq!(mat.at(1, 1), &AlgInt::from_coords(k, 3, -1));
        assert_eq!(mat.det(), k.from_int(2));
    }

    #[test]
    fn edm_principal_class_is_diagonal() {
        let k = f(5);
        let two = Ideal::principal(&k.from_int(2)).unwrap();
        let (mat, g) = elementary_divisor_matrix(&two, 3).unwrap();
        assert_eq!(g, k.from_int(8));
        for r in 0..3 {
            for c in 0..3 {
                let expect = if r == c { k.from_int(2) } else { k.zero() };
                assert_eq!(mat.at(r, c), &expect);
            }
        }
    }

    #[test]
    fn edm_degree_three_passes_minor_oracle() {
        // m=23, class of (2,1,3), n=3
        let k = f(23);
        let cl = ClassGroup::new(k);
        let idx = (0..cl.h()).find(|&i| cl.form(i).triple() == (2, 1, 3)).unwrap();
        let a = cl.ideal_of_class(idx);
        let (mat, g) = elementary_divisor_matrix(&a, 3).unwrap();
        for kk in 1..=3 {
            assert_eq!(minor_ideal(&mat, kk).unwrap(), a.pow(kk));
        }
        assert_eq!(Ideal::principal(&g).unwrap(), a.pow(3));
        assert_eq!(mat.det(), g);
    }

    #[test]
    fn edm_rejects_non_torsion_class() {
        // order-2 class, n=3: A^3 = A * (2) is not principal
        let k = f(5);
        let a2 = atkin_ideal(k, 2).unwrap();
        assert_eq!(elementary_divisor_matrix(&a2, 3).unwrap_err(), Error::NotNTorsion);
    }

    #[test]
    fn atkin_numerators_match_pinned_solutions() {
        // m=1, d=2: u=1, v=1, V_2 numerator [[2, 1+i], [1-i, 2]]
        let k1 = f(1);
        let (n2, u, v) = atkin_v_numerator(k1, 2).unwrap();
        assert_eq!((u, v), (BigInt::one(), BigInt::one()));
        assert_eq!(n2.at(0, 0), &k1.from_int(2));
        assert_eq!(n2.at(0, 1), &AlgInt::from_coords(k1, 1, 1));
        assert_eq!(n2.at(1, 0), &AlgInt::from_coords(k1, 1, -1));
        assert_eq!(n2.at(1, 1), &k1.from_int(2));
        // m=5, d=5: u=5, v=4, V_5 numerator [[25, 4(5+w)], [5-w, 5]]
        let k5 = f(5);
        let (n5, u, v) = atkin_v_numerator(k5, 5).unwrap();
        assert_eq!((u, v), (BigInt::from(5), BigInt::from(4)));
        assert_eq!(n5.at(0, 0), &k5.from_int(25));
        assert_eq!(n5.at(0, 1), &AlgInt::from_coords(k5, 20, 4));
        assert_eq!(n5.at(1, 0), &AlgInt::from_coords(k5, 5, -1));
        assert_eq!(n5.at(1, 1), &k5.from_int(5));
        // d=1: u=1, v=0, and W_1 lies in Gamma
        let (_, u, v) = atkin_v_numerator(k5, 1).unwrap();
        assert_eq!((u, v), (BigInt::one(), BigInt::zero()));
        assert!(atkin_lehner(k5, 1).unwrap().gamma_membership());
    }

    #[test]
    fn atkin_lehner_membership_and_content() {
        let k = f(5);
        let cl = ClassGroup::new(k);
        for d in [2u64, 5, 10] {
            let w = atkin_lehner(k, d).unwrap();
            assert_eq!(w.ell(), &BigInt::from(d));
            assert_eq!(w.content_ideal(), atkin_ideal(k, d).unwrap());
            assert!(!w.gamma_membership());
            let dm = w.delta_membership(&cl).unwrap();
            assert!(dm.member);
            assert_eq!(dm.class, Some(cl.class_of_ideal(&atkin_ideal(k, d).unwrap()).unwrap()));
        }
        assert!(atkin_lehner(k, 3).is_err());
        // the scale sqrt(2) is irreducible: W_2 is not integral for m = 1
        assert!(!atkin_lehner(f(1), 2).unwrap().gamma_membership());
        // A_5 = (sqrt(-5)) is principal, so W_5 collapses modulo the kernel
        let w5 = atkin_lehner(k, 5).unwrap();
        let id = ScaledMatrix::identity(k, 2);
        assert!(w5.coset_equal(&id, Modulus::MuGamma, &cl).unwrap());
        assert!(!atkin_lehner(k, 2).unwrap().coset_equal(&id, Modulus::MuGamma, &cl).unwrap());
    }

    #[test]
    fn atkin_product_collapses_to_w10() {
        // numerator of W_2 * W_5 has content ideal A_10 over m=5
        let k = f(5);
        let w2 = atkin_lehner(k, 2).unwrap();
        let w5 = atkin_lehner(k, 5).unwrap();
        let prod = w2.mul(&w5).unwrap();
        assert_eq!(prod.content_ideal(), atkin_ideal(k, 10).unwrap());
        // W_10^{-1} (W_2 W_5) passes gamma membership
        let w10 = atkin_lehner(k, 10).unwrap();
        let x = w10.inverse().mul(&prod).unwrap();
        assert!(x.gamma_membership());
    }

    #[test]
    fn atkin_decomposition_counts_and_closure() {
        let cases: [(u64, usize); 3] = [(5, 4), (3, 2), (1, 2)];
        for (m, count) in cases {
            let k = f(m);
            let cl = ClassGroup::new(k);
            let reps = atkin_decomposition(k).unwrap();
            assert_eq!(reps.len(), count);
            assert_eq!(count, 1 << k.discriminant_primes().len());
            // pairwise Gamma-inequivalent
            for i in 0..reps.len() {
                for j in 0..reps.len() {
                    let eq =
                        reps[i].matrix.coset_equal(&reps[j].matrix, Modulus::Gamma, &cl).unwrap();
                    assert_eq!(eq, i == j, "m={m} i={i} j={j}");
                }
            }
            // closure: W_d W_e lies in the coset of W_{de/gcd^2}
            for i in &reps {
                for jr in &reps {
                    let g = num_integer::gcd(i.d, jr.d);
                    let target = i.d / g * (jr.d / g);
                    let prod = i.matrix.mul(&jr.matrix).unwrap();
                    let wt = atkin_lehner(k, target).unwrap();
                    assert!(
                        prod.coset_equal(&wt, Modulus::Gamma, &cl).unwrap(),
                        "m={m} d={} e={}",
                        i.d,
                        jr.d
                    );
                }
            }
        }
    }

    #[test]
    fn i_scalar_lies_in_the_w_m_coset() {
        // for prime discriminant fields, iI lands in the W_m coset
        let k = f(7);
        let cl = ClassGroup::new(k);
        let id = ScaledMatrix::identity(k, 2);
        let i_scalar =
            ScaledMatrix::new(id.numerator().clone(), 2, BigInt::one(), -&k.one()).unwrap();
        let w7 = atkin_lehner(k, 7).unwrap();
        assert!(i_scalar.coset_equal(&w7, Modulus::Gamma, &cl).unwrap());
        assert!(!i_scalar.coset_equal(&id, Modulus::Gamma, &cl).unwrap());
    }

    #[test]
    fn gauss_field_extra_coset_element() {
        // ((1+i)/sqrt 2) diag(U, U) with U = diag(1, i) lies in Gamma W_2 for
        // m=1; its triple is (diag(1,i,1,i), ell=1, w=-i)
        let k = f(1);
        let cl = ClassGroup::new(k);
        let l = Mat::from_fn(
            4,
            4,
            |r, c| {
                if r != c {
                    k.zero()
                } else if r % 2 == 0 {
                    k.one()
                } else {
                    k.omega()
                }
            },
        );
        let x = ScaledMatrix::new(l, 2, BigInt::one(), -&k.omega()).unwrap();
        let w2 = atkin_lehner(k, 2).unwrap();
        assert!(x.coset_equal(&w2, Modulus::Gamma, &cl).unwrap());
        let id = ScaledMatrix::identity(k, 2);
        assert!(!x.coset_equal(&id, Modulus::Gamma, &cl).unwrap());
    }

    #[test]
    fn coset_representatives_enumerate_torsion() {
        for (m, n, expect) in [(5u64, 2usize, 2usize), (23, 3, 3)] {
            let k = f(m);
            let cl = ClassGroup::new(k);
            let reps = coset_representatives(k, n, &cl).unwrap();
            assert_eq!(reps.len(), expect, "m={m} n={n}");
            let mut classes: Vec<usize> = reps.iter().map(|r| r.class_index).collect();
            classes.sort_unstable();
            assert_eq!(classes, cl.torsion_subgroup(n as u64));
            // pairwise inequivalent mod the kernel
            for i in 0..reps.len() {
                for j in 0..reps.len() {
                    let eq = reps[i]
                        .matrix
                        .coset_equal(&reps[j].matrix, Modulus::MuGamma, &cl)
                        .unwrap();
                    assert_eq!(eq, i == j);
                }
            }
        }
        // coprime class number: single identity-class representative
        let k = f(2);
        let cl = ClassGroup::new(k);
        let reps = coset_representatives(k, 3, &cl).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].matrix.gamma_membership());
    }

    #[test]
    fn even_degree_representatives() {
        let k = f(5);
        let cl = ClassGroup::new(k);
        let reps = even_n_reps(k, 4, &cl).unwrap();
        assert_eq!(reps.len(), 4);
        let mut classes: Vec<usize> = reps.iter().map(|r| r.class_index).collect();
        classes.sort_unstable();
        classes.dedup();
        assert_eq!(classes, cl.torsion_subgroup(4));
        // odd degree rejected
        assert_eq!(even_n_reps(k, 3, &cl).unwrap_err(), Error::DegreeNotEven);
        // class group with an order-4 element rejected
        let k14 = f(14);
        let cl14 = ClassGroup::new(k14);
        assert_eq!(even_n_reps(k14, 4, &cl14).unwrap_err(), Error::NotTwoTorsion);
        // h = 1 passes trivially
        let k1 = f(1);
        let cl1 = ClassGroup::new(k1);
        assert_eq!(even_n_reps(k1, 2, &cl1).unwrap().len(), 2);
    }

    #[test]
    fn sl_normalizer_representatives() {
        // h = 1: identity only
        let k1 = f(1);
        let cl1 = ClassGroup::new(k1);
        let reps = sl_normalizer_reps(k1, 2, &cl1).unwrap();
        assert_eq!(reps.len(), 1);
        assert!(reps[0].det.is_unit());
        // m=5, n=2: two representatives, the nontrivial one from the A_2 block
        let k = f(5);
        let cl = ClassGroup::new(k);
        let reps = sl_normalizer_reps(k, 2, &cl).unwrap();
        assert_eq!(reps.len(), 2);
        // m=23, n=3: three representatives
        let k23 = f(23);
        let cl23 = ClassGroup::new(k23);
        assert_eq!(sl_normalizer_reps(k23, 3, &cl23).unwrap().len(), 3);
    }

    #[test]
    fn combinations_enumerate_subsets() {
        assert_eq!(combinations(4, 2).len(), 6);
        assert_eq!(combinations(3, 3), vec![vec![0, 1, 2]]);
        assert_eq!(combinations(5, 1).len(), 5);
    }
}
