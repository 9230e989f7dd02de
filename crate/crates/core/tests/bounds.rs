use num_bigint::BigUint;
use zslab::bounds::{
    base_bound, candidate_bounds, composite_bound, exp_upper_step, har2_exact, harborth_bounds,
    ppower_bound, rank2_exact, upper_egz_prime, BoundContext,
};
use zslab::{
    best_bounds, exact_s, parse_group, BoundKind, BoundOptions, SearchBudget, SearchStatus,
};

fn big(v: u64) -> BigUint {
    BigUint::from(v)
}

/// Groups small enough to search exactly in a few seconds.
const SEARCHABLE: &[&str] = &[
    "2", "3", "4", "5", "6", "7", "8", "9", "10", "11", "12", "2^2", "2^3", "2^4", "2^5", "2x4",
    "2x6", "2x8", "2x10", "3^2", "3x6", "3x9", "4^2", "5^2", "2^2x4", "2x4^2", "2^2x8", "3^3",
];

#[test]
fn exact_values_sit_inside_every_bound() {
    let budget = SearchBudget::default();
    for spec in SEARCHABLE {
        let g = parse_group(spec).unwrap();
        let r = exact_s(&g, &budget).unwrap();
        assert_eq!(r.status, SearchStatus::Exact, "{spec}");
        let v = big(r.value.unwrap());
        let cands = candidate_bounds(&g, &BoundContext::default()).unwrap();
        assert!(cands.iter().any(|c| c.kind != BoundKind::Lower), "{spec}: no upper bound");
        for c in &cands {
            let ok = match c.kind {
                BoundKind::Upper => c.value_int >= v,
                BoundKind::Lower => c.value_int <= v,
                BoundKind::Exact => c.value_int == v,
            };
            assert!(ok, "{spec}: exact {v} vs {:?} {} via {:?}", c.kind, c.value_int, c.chain());
        }
        let best = best_bounds(&g, &BoundOptions::default()).unwrap();
        assert!(best.lower.value_int <= v && v <= best.upper.value_int, "{spec}");
        assert!(best.upper_conditional.value_int <= best.upper.value_int);
    }
}

#[test]
fn conditional_egz_bounds_also_hold() {
    for (p, n, exact) in [(3u64, 1usize, 5u64), (3, 2, 9), (3, 3, 19), (5, 1, 9), (5, 2, 17), (7, 1, 13)] {
        let none = Default::default();
        let b = upper_egz_prime(p, n, &none).unwrap();
        assert!(b.is_conditional());
        assert!(b.value_int >= big(exact), "p={p} n={n}");
        let verified = [(p, n)].into_iter().collect();
        let b2 = upper_egz_prime(p, n, &verified).unwrap();
        assert!(!b2.is_conditional());
        assert_eq!(b2.value_int, b.value_int);
    }
    assert_eq!(upper_egz_prime(3, 1, &Default::default()).unwrap().value_int, big(18));
    assert_eq!(upper_egz_prime(3, 2, &Default::default()).unwrap().value_int, big(49));
}

#[test]
fn unconditional_headline_drops_assumptions() {
    for spec in ["3^4", "5^3", "7^2", "3^6", "9^3", "15^2"] {
        let g = parse_group(spec).unwrap();
        let plain = best_bounds(&g, &BoundOptions::default()).unwrap();
        assert!(!plain.upper.is_conditional(), "{spec}");
        assert!(!plain.lower.is_conditional());
        let assumed = best_bounds(&g, &BoundOptions { assume_propd: true, ..Default::default() }).unwrap();
        assert!(assumed.upper.value_int <= plain.upper.value_int);
        assert_eq!(assumed.upper, assumed.upper_conditional);
        if assumed.upper.value_int < plain.upper.value_int {
            assert!(assumed.upper.is_conditional(), "{spec}");
        }
        for c in plain.candidates.iter().filter(|c| c.is_conditional()) {
            assert!(c.conditional_on.iter().all(|d| d.to_string().starts_with("PROPERTY_D(")));
        }
    }
}

#[test]
fn prime_power_recursion_closes_up() {
    let ctx = BoundContext::default();
    for p in [3u64, 5, 7] {
        for n in 1..=6 {
            let u1 = base_bound(p, n, &ctx, false).unwrap().value_int;
            for r in 1..=4u32 {
                let ur = ppower_bound(p, r, n, &ctx, false).unwrap().bound.value_int;
                let geometric = (big(p).pow(r) - 1u32) / big(p - 1);
                assert_eq!(&ur - 1u32, (&u1 - 1u32) * &geometric, "p={p} n={n} r={r}");
                assert!(ur <= &u1 * &geometric);
            }
        }
    }
}

#[test]
fn composite_matches_closed_reading() {
    let ctx = BoundContext::default();
    for m in [1u64, 2, 4] {
        for k in [3u64, 5, 9, 15] {
            for n in 1..=4 {
                let c = composite_bound(m, k, n, &ctx, false).unwrap();
                let want = (big(1) << n) * big(m - 1) * big(k) + &c.coefficient * big(k - 1) + 1u32;
                assert_eq!(c.bound.value_int, want, "m={m} k={k} n={n}");
                assert_eq!(c.closed_form, want);
                let chain = c.bound.chain();
                assert_eq!(chain.last(), Some(&"composite_bound"));
                assert!(chain.contains(&"exp_upper_step"));
                // the composite bound never undercuts the Harborth lower bound
                let lo = harborth_bounds(m * k, n).unwrap().0.value_int;
                assert!(c.bound.value_int >= lo);
            }
        }
    }
    assert_eq!(composite_bound(2, 3, 1, &ctx, false).unwrap().bound.value_int, big(11));
}

#[test]
fn quotient_step_reproduces_cyclic_values() {
    // s(Z_ab) <= a(s(Z_b) - 1) + s(Z_a), tight for cyclic groups
    for (a, b) in [(2u64, 3u64), (3, 3), (2, 5), (5, 3), (2, 2), (4, 4)] {
        let s_h = rank2_exact(1, b).unwrap();
        let s_q = rank2_exact(1, a).unwrap();
        let step = exp_upper_step(a, &s_h, &s_q).unwrap();
        assert_eq!(step.value_int, big(2 * a * b - 1));
    }
    let lower = harborth_bounds(3, 2).unwrap().0;
    assert!(exp_upper_step(3, &lower, &rank2_exact(3, 3).unwrap()).is_err());
}

#[test]
fn harborth_and_binary_values_agree() {
    for a in 1..=3u32 {
        for n in 1..=5 {
            let k = 1u64 << a;
            let exact = har2_exact(a, n).unwrap().value_int;
            let (lo, _) = harborth_bounds(k, n).unwrap();
            assert_eq!(exact, lo.value_int, "a={a} n={n}");
            assert_eq!(exact, big((k - 1) << n) + 1u32);
        }
    }
    for n1 in 1..=6u64 {
        for mult in 1..=4 {
            let n2 = n1 * mult;
            if n2 < 2 {
                assert!(rank2_exact(n1, n2).is_err());
                continue;
            }
            assert_eq!(rank2_exact(n1, n2).unwrap().value_int, big(2 * n1 + 2 * n2 - 3));
        }
    }
}

#[test]
fn z9_proof_chain() {
    let g = parse_group("9").unwrap();
    let b = best_bounds(&g, &BoundOptions::default()).unwrap();
    assert_eq!(b.lower.value_int, big(17));
    assert_eq!(b.upper.value_int, big(17));
    assert!(b.upper.chain().contains(&"exp_upper_step"));
    let json = b.to_json();
    assert_eq!(json["interval"], serde_json::json!([17, 17]));
}
