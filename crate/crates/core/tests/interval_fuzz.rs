//! Random operation triples checked against exact dyadic arithmetic.

mod common;

use common::Dyadic;
use feigdim::interval::{arith, Op};
use feigdim::Interval;
use proptest::prelude::*;

fn scalar() -> impl Strategy<Value = f64> {
    prop_oneof![
        1 => Just(0.0),
        1 => (-4i32..=4).prop_map(|k| k as f64),
        8 => (-1.0f64..1.0, -60i32..60).prop_map(|(m, e)| m * 2f64.powi(e)),
    ]
}

fn interval() -> impl Strategy<Value = Interval> {
    (scalar(), scalar()).prop_map(|(a, b)| Interval::new(a.min(b), a.max(b)).unwrap())
}

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        Just(Op::Add),
        Just(Op::Sub),
        Just(Op::Mul),
        Just(Op::Div),
        Just(Op::Neg),
        Just(Op::Abs)
    ]
}

fn samples(x: Interval) -> [f64; 3] {
    [x.lo(), x.midpoint(), x.hi()]
}

fn within(z: Interval, exact: &Dyadic) -> bool {
    Dyadic::from_f64(z.lo()).le(exact) && exact.le(&Dyadic::from_f64(z.hi()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100_000))]

    #[test]
    fn results_contain_exact_images(op in op(), x in interval(), y in interval()) {
        let z = match arith(op, x, Some(y)) {
            Ok(z) => z,
            Err(_) => {
                prop_assert!(op == Op::Div && y.contains(0.0));
                return Ok(());
            }
        };
        prop_assert!(z.lo() <= z.hi());
        for a in samples(x) {
            let da = Dyadic::from_f64(a);
            match op {
                Op::Neg => prop_assert!(within(z, &da.neg())),
                Op::Abs => prop_assert!(within(z, &Dyadic::from_f64(a.abs()))),
                _ => {
                    for b in samples(y) {
                        let db = Dyadic::from_f64(b);
                        match op {
                            Op::Add => prop_assert!(within(z, &da.add(&db)), "{a} + {b} not in {z}"),
                            Op::Sub => prop_assert!(within(z, &da.add(&db.neg())), "{a} - {b} not in {z}"),
                            Op::Mul => prop_assert!(within(z, &da.mul(&db)), "{a} * {b} not in {z}"),
                            Op::Div => {
                                // a / b in [lo, hi]  <=>  lo*b <= a <= hi*b for b > 0
                                let (lo, hi) = (Dyadic::from_f64(z.lo()), Dyadic::from_f64(z.hi()));
                                let ok = if b > 0.0 {
                                    lo.mul(&db).le(&da) && da.le(&hi.mul(&db))
                                } else {
                                    hi.mul(&db).le(&da) && da.le(&lo.mul(&db))
                                };
                                prop_assert!(ok, "{a} / {b} not in {z}");
                            }
                            Op::Neg | Op::Abs => unreachable!(),
                        }
                    }
                }
            }
        }
    }
}
