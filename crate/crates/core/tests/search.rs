use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use zslab::search::certify_witness;
use zslab::{
    canonical_form, check_property_d, exact_g, exact_s, has_zero_sum_subsequence, is_kth_power_form,
    parse_group, PropertyDStatus, SearchBudget, SearchStatus, SumReachTable, Symmetries, ZSequence,
};

fn budget() -> SearchBudget {
    SearchBudget::default()
}

#[test]
fn zero_sum_is_invariant_under_symmetries() {
    let mut rng = StdRng::seed_from_u64(7);
    for spec in ["6", "2x4", "3^2", "4^2", "2^4", "2x6", "3^3", "5^2"] {
        let g = parse_group(spec).unwrap();
        let order = g.order().unwrap() as usize;
        let k = g.exponent() as usize;
        let sym = Symmetries::for_zero_sum(&g).unwrap();
        for _ in 0..200 {
            let len = rng.gen_range(0..=2 * k + 2);
            let mut idx: Vec<usize> = (0..len).map(|_| rng.gen_range(0..order)).collect();
            idx.sort_unstable();
            let (aut, t) = sym.random_map(&mut rng);
            let image = sym.apply(aut, t, &idx);
            let a = ZSequence::from_indices(&g, &idx);
            let b = ZSequence::from_indices(&g, &image);
            assert_eq!(
                has_zero_sum_subsequence(&a, k).unwrap(),
                has_zero_sum_subsequence(&b, k).unwrap(),
                "{spec}: {a} vs {b}"
            );
            assert_eq!(sym.canonical(&idx), sym.canonical(&image));
            assert_eq!(canonical_form(&a).unwrap(), canonical_form(&b).unwrap());
        }
    }
}

#[test]
fn incremental_table_equals_rebuild() {
    let mut rng = StdRng::seed_from_u64(11);
    for spec in ["5", "12", "2^3", "3^2", "2x8"] {
        let g = parse_group(spec).unwrap();
        let order = g.order().unwrap() as usize;
        for k in 1..=g.exponent() as usize + 1 {
            let mut table = SumReachTable::for_group(&g, k).unwrap();
            let mut idx = Vec::new();
            for _ in 0..20 {
                let x = rng.gen_range(0..order);
                let before = table.clone();
                let next = table.extend(x);
                assert_eq!(table, before, "extend must not touch its input");
                idx.push(x);
                let rebuilt = SumReachTable::from_sequence(&ZSequence::from_indices(&g, &idx), k).unwrap();
                assert_eq!(next, rebuilt);
                table = next;
            }
        }
    }
}

#[test]
fn exponent_copies_force_a_zero_sum() {
    let mut rng = StdRng::seed_from_u64(3);
    for spec in ["7", "2x6", "3^2", "4^2", "2^2x4"] {
        let g = parse_group(spec).unwrap();
        let order = g.order().unwrap() as usize;
        let k = g.exponent() as usize;
        for x in 0..order {
            let mut idx = vec![x; k];
            for _ in 0..rng.gen_range(0..5) {
                idx.push(rng.gen_range(0..order));
            }
            let s = ZSequence::from_indices(&g, &idx);
            assert!(has_zero_sum_subsequence(&s, k).unwrap());
        }
    }
}

#[test]
fn thread_count_does_not_change_answers() {
    for spec in ["7", "2x4", "3^2", "2^4", "4^2", "2x2x4", "2x8", "3^3"] {
        let g = parse_group(spec).unwrap();
        let one = exact_s(&g, &budget().with_threads(1)).unwrap();
        for threads in [2, 4] {
            let many = exact_s(&g, &budget().with_threads(threads)).unwrap();
            assert_eq!((one.value, one.status), (many.value, many.status), "{spec} threads={threads}");
        }
        let g1 = exact_g(&g, &budget().with_threads(1)).unwrap();
        let g4 = exact_g(&g, &budget().with_threads(4)).unwrap();
        assert_eq!((g1.value, g1.status), (g4.value, g4.status), "{spec}");
    }
}

#[test]
fn witnesses_certify() {
    for spec in ["2", "5", "6", "2^3", "2x4", "3^2", "4^2", "2x2x4", "2^5", "3^3", "5^2"] {
        let g = parse_group(spec).unwrap();
        let r = exact_s(&g, &budget()).unwrap();
        assert_eq!(r.status, SearchStatus::Exact, "{spec}");
        let w = r.witness.unwrap();
        assert_eq!(w.len() as u64 + 1, r.value.unwrap());
        let k = g.exponent() as usize;
        let cert = certify_witness(&w, k, 0, 20).unwrap();
        assert!(cert.holds(), "{spec}: {cert:?}");
    }
}

#[test]
fn squarefree_witnesses_are_sets() {
    for spec in ["3", "5", "3^2", "2x4", "4^2", "3^3"] {
        let g = parse_group(spec).unwrap();
        let r = exact_g(&g, &budget()).unwrap();
        assert_eq!(r.status, SearchStatus::Exact, "{spec}");
        let w = r.witness.unwrap();
        assert!(w.is_squarefree());
        assert_eq!(w.len() as u64 + 1, r.value.unwrap());
        assert!(!has_zero_sum_subsequence(&w, g.exponent() as usize).unwrap());
    }
}

#[test]
fn elementary_three_groups_satisfy_s_equals_2g_minus_1() {
    for (n, s, g) in [(1, 5, 3), (2, 9, 5), (3, 19, 10)] {
        let grp = parse_group(&format!("3^{n}")).unwrap();
        let rs = exact_s(&grp, &budget()).unwrap();
        let rg = exact_g(&grp, &budget()).unwrap();
        assert_eq!(rs.value, Some(s));
        assert_eq!(rg.value, Some(g));
        assert_eq!(rs.value.unwrap(), 2 * rg.value.unwrap() - 1);
    }
}

#[test]
fn exhausted_budget_keeps_a_sound_lower_bound() {
    let g = parse_group("25").unwrap();
    let r = exact_s(&g, &SearchBudget::nodes(500)).unwrap();
    assert_eq!(r.status, SearchStatus::LowerBoundOnly);
    let w = r.witness.unwrap();
    assert!(!has_zero_sum_subsequence(&w, 25).unwrap());
    assert_eq!(r.value.unwrap(), w.len() as u64 + 1);
    assert!(r.value.unwrap() <= 49);

    let p = check_property_d(&parse_group("3^3").unwrap(), &SearchBudget::nodes(10)).unwrap();
    assert_eq!(p.holds, PropertyDStatus::Unknown);
}

#[test]
fn extremal_sequences_of_small_groups_are_powers() {
    for spec in ["2^3", "5", "6", "3^2", "4^2"] {
        let g = parse_group(spec).unwrap();
        let r = check_property_d(&g, &budget()).unwrap();
        assert_eq!(r.holds, PropertyDStatus::Holds, "{spec}");
        let w = exact_s(&g, &budget()).unwrap().witness.unwrap();
        assert!(is_kth_power_form(&w, g.exponent() as usize));
    }
}
