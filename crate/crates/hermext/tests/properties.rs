//! Property tests for the arithmetic invariants that hold on all inputs,
//! not just the worked examples.

use num_bigint::BigInt;
use proptest::prelude::*;

use hermext::classgroup::{reduced_forms, QuadForm};
use hermext::ideals::Ideal;
use hermext::quadfield::{AlgInt, FieldParams};

fn field_strategy() -> impl Strategy<Value = FieldParams> {
    prop_oneof![
        Just(1u64),
        Just(2),
        Just(3),
        Just(5),
        Just(6),
        Just(7),
        Just(14),
        Just(15),
        Just(23),
        Just(31)
    ]
    .prop_map(|m| FieldParams::new(m).expect("squarefree"))
}

proptest! {
    #[test]
    fn norm_and_trace_behave(field in field_strategy(), coords in (-1000i64..=1000, -1000i64..=1000, -1000i64..=1000, -1000i64..=1000)) {
        let x = AlgInt::from_coords(field, coords.0, coords.1);
        let y = AlgInt::from_coords(field, coords.2, coords.3);
        prop_assert_eq!((&x * &y).norm(), x.norm() * y.norm());
        prop_assert_eq!(x.conj().conj(), x.clone());
        prop_assert_eq!(&x + &x.conj(), AlgInt::new(field, x.trace(), BigInt::from(0)));
        prop_assert!(x.norm() >= BigInt::from(0));
    }

    #[test]
    fn ideal_norm_multiplicative_and_conj_product(
        field in field_strategy(),
        g in (-40i64..=40, -40i64..=40, -40i64..=40, -40i64..=40),
    ) {
        let x = AlgInt::from_coords(field, g.0, g.1);
        let y = AlgInt::from_coords(field, g.2, g.3);
        prop_assume!(!x.is_zero() || !y.is_zero());
        let i = Ideal::from_generators(&[x, y]).unwrap();
        let n = i.norm_int().unwrap();
        prop_assert_eq!(
            i.mul(&i.conj()).unwrap(),
            Ideal::principal(&AlgInt::new(field, n.clone(), BigInt::from(0))).unwrap()
        );
        let j = Ideal::principal(&AlgInt::from_coords(field, 3, 1)).unwrap();
        prop_assert_eq!(i.mul(&j).unwrap().norm_int().unwrap(), n * j.norm_int().unwrap());
    }

    #[test]
    fn hnf_is_stable_under_regeneration(
        field in field_strategy(),
        g in (-40i64..=40, -40i64..=40, -40i64..=40, -40i64..=40),
        r in (-5i64..=5, -5i64..=5),
    ) {
        let x = AlgInt::from_coords(field, g.0, g.1);
        let y = AlgInt::from_coords(field, g.2, g.3);
        prop_assume!(!x.is_zero() || !y.is_zero());
        let i = Ideal::from_generators(&[x, y]).unwrap();
        let (b1, b2) = i.basis_elements();
        let extra = &(&b1 * &AlgInt::from_coords(field, r.0, r.1)) + &b2;
        let j = Ideal::from_generators(&[b1, b2, extra]).unwrap();
        prop_assert_eq!(i, j);
    }

    #[test]
    fn ideal_json_round_trips(
        field in field_strategy(),
        g in (-40i64..=40, -40i64..=40, -40i64..=40, -40i64..=40),
    ) {
        let x = AlgInt::from_coords(field, g.0, g.1);
        let y = AlgInt::from_coords(field, g.2, g.3);
        prop_assume!(!x.is_zero() || !y.is_zero());
        let i = Ideal::from_generators(&[x, y]).unwrap();
        prop_assert_eq!(Ideal::from_json(field, &i.to_json()).unwrap(), i);
    }

    /// Reducing any unimodular transform of a reduced form recovers it: the
    /// reduction algorithm computes a class invariant.
    #[test]
    fn reduction_is_a_class_invariant(
        field in field_strategy(),
        idx in 0usize..8,
        t in (-6i64..=6, -6i64..=6, -6i64..=6),
    ) {
        let forms = reduced_forms(field);
        let form = &forms[idx % forms.len()];
        // build [[p, q], [r, s]] with det 1 from two shears and a sign
        let (u, v, w) = t;
        let (p, q, r, s) = {
            // [[1, u], [0, 1]] * [[1, 0], [v, 1]] * [[1, w], [0, 1]]
            let (a1, b1, c1, d1) = (1 + u * v, u, v, 1i64);
            (a1, a1 * w + b1, c1, c1 * w + d1)
        };
        prop_assert_eq!(p * s - q * r, 1);
        let (fa, fb, fc) = {
            use num_traits::ToPrimitive;
            (
                form.a.to_i64().unwrap(),
                form.b.to_i64().unwrap(),
                form.c.to_i64().unwrap(),
            )
        };
        let eval = |x: i64, y: i64| fa * x * x + fb * x * y + fc * y * y;
        let a2 = eval(p, r);
        let c2 = eval(q, s);
        let b2 = 2 * fa * p * q + fb * (p * s + q * r) + 2 * fc * r * s;
        let transformed = QuadForm::new(a2, b2, c2);
        prop_assert_eq!(transformed.discriminant(), form.discriminant());
        prop_assert_eq!(&transformed.reduce(), form);
    }
}
