use proptest::prelude::*;

use qcong::arith::{inv_mod, jacobi_symbol, sqrt_mod};
use qcong::circle::{
    hensel_lift_solution, inverse_param, is_admissible, param_point, SolutionTriple,
};
use qcong::counter::{count_pythagorean, r2, CountConfig, CountMethod, CountReport};
use qcong::expsum::{
    admissible_alphas, e_sum, s_alpha_bruteforce, s_alpha_cochrane, tolerance, EsumMode, ExpSumSpec,
};
use qcong::poly::{Poly, RationalFunction};
use qcong::weights::WeightSpec;
use qcong::{Error, PrimePowerModulus};

const PRIMES: [u64; 4] = [7, 11, 13, 17];

fn md(p: u64, n: u32) -> PrimePowerModulus {
    PrimePowerModulus::new(p, n).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parametrization_round_trips(t in 0u64..100_000, pi in 0usize..4, n in 1u32..4) {
        let m = md(PRIMES[pi], n);
        let t = t % m.q();
        prop_assume!(is_admissible(t, m.p()));
        let pt = param_point(&m.residue(t as i128), &m).unwrap();
        let (y1, y2) = pt.pair();
        prop_assert_eq!((y1 * y1 + y2 * y2) % m.q(), 1);
        prop_assert_eq!(inverse_param(y1, y2, &m).unwrap().value(), t);
    }

    #[test]
    fn lifts_reduce_to_the_original(x1 in 1i64..2401, x2 in 1i64..2401, pi in 0usize..2) {
        let m = md([7, 11][pi], 2);
        let q = m.q() as i64;
        let (x1, x2) = (x1 % q, x2 % q);
        let s = (x1 * x1 + x2 * x2).rem_euclid(q);
        prop_assume!(m.is_unit(x1 as i128) && m.is_unit(x2 as i128) && m.is_unit(s as i128));
        let Some((x3, _)) = sqrt_mod(s as i128, &m).unwrap() else {
            return Ok(());
        };
        let base = SolutionTriple::new(x1, x2, x3.value() as i64, m).unwrap();
        let lifts = hensel_lift_solution(&base).unwrap();
        prop_assert_eq!(lifts.len() as u64, m.p() * m.p());
        for l in lifts {
            prop_assert_eq!(l.x1 % q, x1);
            prop_assert_eq!(l.x3 % q, x3.value() as i64);
        }
    }

    #[test]
    fn cochrane_agrees_with_bruteforce(
        k1 in -5000i64..5000,
        k2 in -5000i64..5000,
        x3 in 1i64..5000,
        pi in 0usize..3,
        n in 2u32..4,
    ) {
        let m = md(PRIMES[pi], n);
        let Ok(spec) = ExpSumSpec::new(k1, k2, x3, m) else {
            return Ok(());
        };
        prop_assume!(spec.r + 2 <= n && spec.d.rem_euclid(m.p() as i128) != 0);
        let f = spec.phase();
        for alpha in admissible_alphas(m.p()) {
            let closed = s_alpha_cochrane(&f, alpha as i128, &m).unwrap().value;
            let brute = s_alpha_bruteforce(&f, alpha as i128, &m).unwrap();
            prop_assert!((closed - brute).norm() <= tolerance(m.q()));
        }
        let total = e_sum(&spec, EsumMode::Closed).unwrap();
        let brute = e_sum(&spec, EsumMode::Bruteforce).unwrap();
        prop_assert!((total - brute).norm() <= tolerance(m.q()) * m.p() as f64);
    }

    #[test]
    fn jacobi_is_multiplicative_in_a(a in -10_000i128..10_000, b in -10_000i128..10_000, m in 0u64..500) {
        let m = 2 * m + 1;
        prop_assert_eq!(jacobi_symbol(a * b, m), jacobi_symbol(a, m) * jacobi_symbol(b, m));
    }

    #[test]
    fn r2_matches_enumeration(m in 0u64..3000) {
        let top = (m as f64).sqrt() as i64 + 1;
        let mut count = 0;
        for a in -top..=top {
            for b in -top..=top {
                if (a * a + b * b) as u64 == m {
                    count += 1;
                }
            }
        }
        prop_assert_eq!(r2(m), count);
    }

    #[test]
    fn rational_derivative_obeys_product_rule(
        a in prop::collection::vec(-9i128..9, 1..4),
        b in prop::collection::vec(-9i128..9, 1..4),
        x in -20i128..20,
    ) {
        let f = RationalFunction::polynomial(Poly::new(a));
        let g = RationalFunction::new(Poly::new(b), Poly::new(vec![1, 0, 1])).unwrap();
        let lhs = f.mul(&g).derivative();
        let lhs_val = lhs.eval_f64(x as f64);
        let rhs_val = f.derivative().eval_f64(x as f64) * g.eval_f64(x as f64)
            + f.eval_f64(x as f64) * g.derivative().eval_f64(x as f64);
        prop_assert!((lhs_val - rhs_val).abs() <= 1e-9 * (1.0 + rhs_val.abs()));
    }
}

#[test]
fn inverse_rejects_non_units() {
    let m = md(11, 3);
    assert_eq!(
        inv_mod(121, &m),
        Err(Error::NotInvertible { a: 121, q: 1331 })
    );
}

#[test]
fn pythagorean_counts_are_monotone() {
    let mut last = 0;
    for n in 0..200 {
        let c = count_pythagorean(n).unwrap();
        assert!(c >= last);
        last = c;
    }
    assert_eq!(count_pythagorean(0).unwrap(), 1);
}

#[test]
fn modulus_deserialization_validates() {
    let good: PrimePowerModulus = serde_json::from_str(r#"{"p":7,"n":3,"q":343}"#).unwrap();
    assert_eq!(good, md(7, 3));
    assert!(serde_json::from_str::<PrimePowerModulus>(r#"{"p":9,"n":2,"q":81}"#).is_err());
}

#[test]
fn count_report_serializes_schema_fields() {
    let cfg = CountConfig::new(
        md(7, 2),
        5.0,
        WeightSpec::gaussian(1.0).unwrap(),
        3.5,
        CountMethod::SqrtBucket,
    )
    .unwrap();
    let rep = qcong::counter::count_smoothed(&cfg).unwrap();
    let v = serde_json::to_value(&rep).unwrap();
    for key in [
        "p",
        "n",
        "q",
        "N",
        "nu",
        "phi_scale",
        "measured_T",
        "predicted_T0",
        "ratio",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["method"], "sqrt-bucket");
    let back: CountReport = serde_json::from_value(v).unwrap();
    assert_eq!(back.measured_t, rep.measured_t);
}
