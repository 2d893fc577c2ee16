use std::sync::Arc;

use proptest::prelude::*;

use qog::enumerate::{ordered_bell, WeakOrders};
use qog::field::{sign_under, FieldOrderTag, Poly, RatFunc};
use qog::groups::Carrier;
use qog::qo::{check_axiom, AxiomId};
use qog::valuation::{check_valuation, Valuation};

fn finite_spec() -> impl Strategy<Value = String> {
    prop::collection::vec(2i64..6, 1..3)
        .prop_map(|fs| fs.iter().map(|n| format!("Z/{n}")).collect::<Vec<_>>().join("x"))
}

fn poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-10i64..=10, 0..5).prop_map(|c| Poly::from_ints(&c))
}

fn ratfunc() -> impl Strategy<Value = RatFunc> {
    (poly(), poly(), -3i64..=3).prop_filter_map("zero", |(n, d, k)| {
        if n.is_zero() || d.is_zero() {
            return None;
        }
        Some(RatFunc::new(n, d).ok()?.mul(&RatFunc::t_pow(k)))
    })
}

proptest! {
    #[test]
    fn group_laws(spec in finite_spec(), a in 0usize..32, b in 0usize..32, c in 0usize..32) {
        let g = Carrier::parse(&spec).unwrap();
        let n = g.len();
        let (a, b, c) = (a % n, b % n, c % n);
        let add = |x, y| g.add(x, y).unwrap();
        prop_assert_eq!(add(add(a, b), c), add(a, add(b, c)));
        prop_assert_eq!(add(a, b), add(b, a));
        prop_assert_eq!(add(a, g.zero()), a);
        prop_assert_eq!(add(a, g.neg(a)), g.zero());
        prop_assert_eq!(g.sub(a, b).unwrap(), add(a, g.neg(b)));
    }

    #[test]
    fn window_sums_stay_consistent(a in -4i64..=4, b in -4i64..=4) {
        let g = Carrier::parse("Z^1[B=4]").unwrap();
        let ia = g.lookup(&format!("({a})").parse().unwrap()).unwrap();
        let ib = g.lookup(&format!("({b})").parse().unwrap()).unwrap();
        match g.add(ia, ib) {
            Some(s) => prop_assert_eq!(g.element(s).0[0], a + b),
            None => prop_assert!((a + b).abs() > 4),
        }
    }

    #[test]
    fn ratfunc_display_parses_back(f in ratfunc()) {
        let back: RatFunc = f.to_string().parse().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn tadic_value_is_additive(f in ratfunc(), g in ratfunc()) {
        prop_assert_eq!(f.mul(&g).tadic_val(), Some(f.tadic_val().unwrap() + g.tadic_val().unwrap()));
        let s = f.add(&g);
        if !s.is_zero() {
            prop_assert!(s.tadic_val() >= f.tadic_val().min(g.tadic_val()));
        }
    }

    #[test]
    fn signs_are_multiplicative_and_additive(f in ratfunc(), g in ratfunc(), eta in prop::sample::select(vec![1i8, -1])) {
        let tag = FieldOrderTag { eta };
        let s = |h: &RatFunc| sign_under(h, tag);
        prop_assert_eq!(s(&f.mul(&g)), s(&f) * s(&g));
        prop_assert_eq!(s(&f.neg()), -s(&f));
        if s(&f) == s(&g) {
            prop_assert_eq!(s(&f.add(&g)), s(&f));
        }
    }

    #[test]
    fn p_adic_valuations_are_valuations(p in prop::sample::select(vec![2i64, 3, 5]), k in 1u32..4) {
        let n = p.pow(k);
        prop_assume!(n <= 64);
        let c = Carrier::parse(&format!("Z/{n}")).unwrap();
        let v = Valuation::p_adic(Arc::clone(&c), p).unwrap();
        prop_assert!(check_valuation(&v).passed());
        prop_assert!(check_axiom(&v.induced_qo(), AxiomId::CAxioms).passed());
    }
}

#[test]
fn weak_order_counts_are_ordered_bell_numbers() {
    for n in 0..=6 {
        assert_eq!(WeakOrders::new(n, 8).unwrap().count() as u64, ordered_bell(n));
    }
}
