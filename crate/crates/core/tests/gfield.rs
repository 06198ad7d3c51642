// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;

use systolic_core::gfield::{field_div, Field, FieldPoly};

const PRIMES: [u64; 8] = [2, 3, 5, 7, 13, 257, 65_537, 2_147_483_647];

fn primes_to(n: u64) -> Vec<u64> {
    (2..=n).filter(|&p| (2..p).take_while(|d| d * d <= p).all(|d| p % d != 0)).collect()
}

proptest! {
    #[test]
    fn field_axioms(pi in 0..PRIMES.len(), x in any::<i64>(), y in any::<i64>(), z in any::<i64>()) {
        let f = Field::new(PRIMES[pi]).unwrap();
        let (a, b, c) = (f.elem(x), f.elem(y), f.elem(z));
        prop_assert_eq!((a + b) + c, a + (b + c));
        prop_assert_eq!((a * b) * c, a * (b * c));
        prop_assert_eq!(a * (b + c), a * b + a * c);
        prop_assert_eq!(a + b, b + a);
        prop_assert_eq!(a * b, b * a);
        prop_assert_eq!(a - a, f.zero());
        prop_assert_eq!(a + (-a), f.zero());
        prop_assert_eq!(a * f.one(), a);
        if !a.is_zero() {
            prop_assert_eq!(a * a.inv().unwrap(), f.one());
        }
    }

    #[test]
    fn poly_division_identity(
        pi in 0..4usize,
        a in prop::collection::vec(any::<i64>(), 0..12),
        b in prop::collection::vec(any::<i64>(), 1..8),
    ) {
        let f = Field::new(PRIMES[pi]).unwrap();
        let (pa, pb) = (FieldPoly::from_ints(f, &a), FieldPoly::from_ints(f, &b));
        prop_assume!(!pb.is_zero());
        let (q, r) = pa.div_rem(&pb).unwrap();
        prop_assert_eq!(q.mul(&pb).add(&r), pa.clone());
        prop_assert!(r.degree() < pb.degree());
        let x = f.elem(a.len() as i64 + 3);
        prop_assert_eq!(pa.mul(&pb).eval(x), pa.eval(x) * pb.eval(x));
    }
}

#[test]
fn division_exhaustive_small_primes() {
    for p in primes_to(31) {
        let f = Field::new(p).unwrap();
        for x in 0..p as i64 {
            for y in 1..p as i64 {
                let (a, b) = (f.elem(x), f.elem(y));
                assert_eq!(field_div(a, b).unwrap() * b, a, "p={p} a={x} b={y}");
            }
            assert!(field_div(f.elem(x), f.zero()).is_err());
        }
    }
}

#[test]
fn polynomial_text_form() {
    let p: FieldPoly = "1, -1, 0, 7 mod 7".parse().unwrap();
    assert_eq!(p.to_string(), "1,6 mod 7");
    assert_eq!(p.degree(), 1);
    assert_eq!("mod 5".parse::<FieldPoly>().unwrap().degree(), -1);
    assert!("1,2 mod 8".parse::<FieldPoly>().is_err());
    assert!("1,x mod 5".parse::<FieldPoly>().is_err());
}
