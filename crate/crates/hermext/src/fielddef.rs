//! The field generated by the entries of the extended group: closed-form
//! descriptions in the settled cases, and the ramification-support check
//! (every ramified prime of the described compositum divides `n * d_K`).

use serde_json::{Map, Value};

use crate::classgroup::ClassGroup;
use crate::quadfield::{distinct_primes, FieldParams};
use crate::{Error, Result};

/// Generators of the field of definition, when known: a root of unity
/// `zeta_r`, a list of quadratic radicals `sqrt(p)`, and optionally the base
/// field `K` itself. `Unknown` marks the cases that would require the
/// Hilbert class field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldDescription {
    Known {
        /// Order `r` of the adjoined root of unity (`1` when none is needed).
        zeta_order: u64,
        /// Primes `p` whose square roots are adjoined.
        radicals: Vec<u64>,
        /// Whether `K` itself is among the generators.
        includes_base: bool,
    },
    Unknown,
}

impl FieldDescription {
    pub fn rationals() -> Self {
        FieldDescription::Known { zeta_order: 1, radicals: Vec::new(), includes_base: false }
    }

    pub fn to_json(&self) -> Value {
        match self {
            FieldDescription::Unknown => {
                let mut map = Map::new();
                map.insert("unknown".into(), Value::Bool(true));
                Value::Object(map)
            }
            FieldDescription::Known { zeta_order, radicals, includes_base } => {
                let mut gens: Vec<Value> = Vec::new();
                if *includes_base {
                    gens.push(Value::String("K".into()));
                }
                if *zeta_order > 1 {
                    gens.push(Value::String(format!("zeta_{zeta_order}")));
                }
                for p in radicals {
                    gens.push(Value::String(format!("sqrt({p})")));
                }
                let mut map = Map::new();
                map.insert("generators".into(), Value::Array(gens));
                Value::Object(map)
            }
        }
    }
}

/// The predicted field of definition for degree `n` over the given field, in
/// the cases with a closed form; `Unknown` otherwise.
pub fn predicted_field(field: FieldParams, n: usize, cl: &ClassGroup) -> FieldDescription {
    let n64 = n as u64;
    let h = cl.h() as u64;
    if n == 1 {
        // degree one: the elliptic modular group, defined over Q
        return FieldDescription::rationals();
    }
    if n == 2 {
        // Q(zeta_4, sqrt(p); p | d_K); this contains K
        return FieldDescription::Known {
            zeta_order: 4,
            radicals: field.discriminant_primes(),
            includes_base: false,
        };
    }
    match field.d_k() {
        -4 => {
            return FieldDescription::Known {
                zeta_order: 4 * n64,
                radicals: Vec::new(),
                includes_base: true,
            }
        }
        -3 => {
            return FieldDescription::Known {
                zeta_order: 6 * n64,
                radicals: Vec::new(),
                includes_base: true,
            }
        }
        _ => {}
    }
    if num_integer::gcd(h, n64) == 1 {
        return FieldDescription::Known {
            zeta_order: 2 * n64,
            radicals: Vec::new(),
            includes_base: true,
        };
    }
    if cl.torsion_subgroup(2).len() == cl.h() {
        // all classes 2-torsion
        let radicals = if n % 2 == 0 { field.discriminant_primes() } else { Vec::new() };
        return FieldDescription::Known { zeta_order: 2 * n64, radicals, includes_base: true };
    }
    FieldDescription::Unknown
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationReport {
    /// Primes that can ramify in the described compositum.
    pub support: Vec<u64>,
    /// Whether the support is contained in the primes dividing `n * d_K`.
    pub ok: bool,
}

impl RamificationReport {
    pub fn to_json(&self, desc: &FieldDescription) -> Value {
        let mut map = Map::new();
        if let Value::Object(inner) = desc.to_json() {
            for (k, v) in inner {
                map.insert(k, v);
            }
        }
        map.insert("ok".into(), Value::Bool(self.ok));
        map.insert(
            "support".into(),
            Value::Array(self.support.iter().map(|p| Value::from(*p)).collect()),
        );
        Value::Object(map)
    }
}

/// Ramification support of the described compositum from standard facts:
/// `zeta_r` contributes the primes dividing `r`, `sqrt(p)` contributes `p`
/// and `2`, and `K` contributes the primes dividing `d_K`. Checks
/// containment in the primes dividing `n * d_K`.
pub fn ramification_support(
    desc: &FieldDescription,
    field: FieldParams,
    n: usize,
) -> Result<RamificationReport> {
    let (zeta_order, radicals, includes_base) = match desc {
        FieldDescription::Unknown => return Err(Error::UnknownFieldDescription),
        FieldDescription::Known { zeta_order, radicals, includes_base } => {
            (*zeta_order, radicals, *includes_base)
        }
    };
    let mut support = distinct_primes(zeta_order);
    for p in radicals {
        support.push(*p);
        support.push(2);
    }
    if includes_base {
        support.extend(field.discriminant_primes());
    }
    support.sort_unstable();
    support.dedup();
    let allowed = distinct_primes(n as u64 * field.d_k().unsigned_abs());
    let ok = support.iter().all(|p| allowed.contains(p));
    Ok(RamificationReport { support, ok })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(m: u64) -> FieldParams {
        FieldParams::new(m).unwrap()
    }

    fn cl(m: u64) -> ClassGroup {
        ClassGroup::new(f(m))
    }

    #[test]
    fn degree_one_is_rational() {
        for m in [1u64, 5, 23] {
            assert_eq!(predicted_field(f(m), 1, &cl(m)), FieldDescription::rationals());
            let rep = ramification_support(&FieldDescription::rationals(), f(m), 1).unwrap();
            assert!(rep.support.is_empty());
            assert!(rep.ok);
        }
    }

    #[test]
    fn degree_two_lists_discriminant_primes() {
        let desc = predicted_field(f(5), 2, &cl(5));
        assert_eq!(
            desc,
            FieldDescription::Known { zeta_order: 4, radicals: vec![2, 5], includes_base: false }
        );
        let rep = ramification_support(&desc, f(5), 2).unwrap();
        assert_eq!(rep.support, vec![2, 5]);
        assert!(rep.ok);
    }

    #[test]
    fn special_discriminants_use_cyclotomic_towers() {
        // d_K = -4, n = 3: K[zeta_12]
        assert_eq!(
            predicted_field(f(1), 3, &cl(1)),
            FieldDescription::Known { zeta_order: 12, radicals: vec![], includes_base: true }
        );
        // d_K = -3, n = 4: K[zeta_24]
        assert_eq!(
            predicted_field(f(3), 4, &cl(3)),
            FieldDescription::Known { zeta_order: 24, radicals: vec![], includes_base: true }
        );
    }

    #[test]
    fn coprime_class_number_case() {
        // h(-20) = 2 coprime to 3: K[zeta_6]
        assert_eq!(
            predicted_field(f(5), 3, &cl(5)),
            FieldDescription::Known { zeta_order: 6, radicals: vec![], includes_base: true }
        );
    }

    #[test]
    fn two_torsion_class_group_case() {
        // Cl(-84) = C_2 x C_2 (m = 21): n = 4 even adjoins the radicals
        let desc = predicted_field(f(21), 4, &cl(21));
        assert_eq!(
            desc,
            FieldDescription::Known {
                zeta_order: 8,
                radicals: vec![2, 3, 7],
                includes_base: true
            }
        );
        let rep = ramification_support(&desc, f(21), 4).unwrap();
        assert_eq!(rep.support, vec![2, 3, 7]);
        assert!(rep.ok);
    }

    #[test]
    fn unsettled_case_is_unknown() {
        // m = 23, n = 3: gcd(h, n) = 3 and the class group is not 2-torsion
        let desc = predicted_field(f(23), 3, &cl(23));
        assert_eq!(desc, FieldDescription::Unknown);
        assert_eq!(
            ramification_support(&desc, f(23), 3).unwrap_err(),
            Error::UnknownFieldDescription
        );
    }

    #[test]
    fn support_bound_for_degree_two() {
        for m in 1..=50u64 {
            if FieldParams::new(m).is_err() {
                continue;
            }
            let field = f(m);
            let g = ClassGroup::new(field);
            let desc = predicted_field(field, 2, &g);
            let rep = ramification_support(&desc, field, 2).unwrap();
            assert!(rep.ok, "m = {m}");
            // the degree-2 radical list is exactly the discriminant primes
            if let FieldDescription::Known { radicals, .. } = desc {
                assert_eq!(radicals, field.discriminant_primes());
            } else {
                panic!("degree-2 description is always known");
            }
        }
    }

    #[test]
    fn json_report_shape() {
        let desc = predicted_field(f(5), 2, &cl(5));
        let rep = ramification_support(&desc, f(5), 2).unwrap();
        let v = rep.to_json(&desc);
        assert_eq!(v["ok"], Value::Bool(true));
        assert_eq!(v["support"], serde_json::json!([2, 5]));
        assert_eq!(v["generators"], serde_json::json!(["zeta_4", "sqrt(2)", "sqrt(5)"]));
    }
}
