mod common;

use proptest::prelude::*;

use seuguard_core::analysis::{analyze, format_eta};
use seuguard_core::cfg::{pdg_of, NodeId};
use seuguard_core::lang::print_program;
use seuguard_core::property::{eval_phi, OutputBuffer};
use seuguard_core::slicer::{backward_slice_multi, output_criteria};
use seuguard_core::{flip_bit, parse, parse_spec, Classification, IntRange};

use common::{random_control_loop, random_program};

proptest! {
    #[test]
    fn flip_is_an_involution(v in any::<i32>(), b in 0u8..32) {
        let f = flip_bit(v, b).unwrap();
        prop_assert_eq!(flip_bit(f, b).unwrap(), v);
        prop_assert_eq!((v ^ f).count_ones(), 1);
        prop_assert_eq!(((v ^ f) as u32).trailing_zeros(), b as u32);
    }

    #[test]
    fn flip_rejects_positions_past_31(v in any::<i32>(), b in 32u8..=255) {
        prop_assert!(flip_bit(v, b).is_err());
    }

    #[test]
    fn parser_never_panics(src in "\\PC{0,120}") {
        let _ = parse(&src);
    }

    #[test]
    fn printed_programs_reparse_to_the_same_tree(seed in 0u64..10_000) {
        let g = random_program(seed);
        let p = g.program();
        let again = parse(&print_program(&p)).unwrap();
        prop_assert!(p.same_structure(&again), "{}", print_program(&p));
    }

    #[test]
    fn control_loops_reparse_to_the_same_tree(seed in 0u64..10_000) {
        let p = random_control_loop(seed).program();
        prop_assert!(p.same_structure(&parse(&print_program(&p)).unwrap()));
    }

    #[test]
    fn generated_programs_stay_within_size_limits(seed in 0u64..10_000) {
        let p = random_program(seed).program();
        prop_assert!(p.stmt_count() <= 20);
        prop_assert!(p.param_count() <= 3);
    }

    #[test]
    fn slices_keep_every_output_point(seed in 0u64..10_000) {
        let g = random_program(seed);
        let p = g.program();
        let out = p.find_var(&g.spec().output_variable).unwrap();
        let slice = backward_slice_multi(&pdg_of(&p), &output_criteria(&p, out)).unwrap();
        for s in p.output_points() {
            prop_assert!(slice.contains(NodeId::of_stmt(s)));
        }
        prop_assert!(slice.relevant_variables.contains(&out));
        prop_assert!(slice.relevant_variables.iter().all(|v| v.index() < p.vars.len()));
    }

    #[test]
    fn buffer_keeps_the_newest_values(values in prop::collection::vec(any::<i32>(), 0..20), cap in 1usize..6) {
        let mut b = OutputBuffer::new(cap);
        for &v in &values {
            b.append(v);
        }
        prop_assert_eq!(b.len(), values.len().min(cap));
        prop_assert_eq!(b.newest(), values.last().copied());
        let tail: Vec<i32> = values[values.len() - b.len()..].to_vec();
        prop_assert_eq!(b.entries().collect::<Vec<_>>(), tail);
    }

    #[test]
    fn window_holds_unless_every_recent_value_is_out_of_range(
        values in prop::collection::vec(-5i32..15, 1..10),
        n in 1usize..5,
    ) {
        let spec = parse_spec(&format!("window o in (0,9) persist {n}")).unwrap();
        let mut b = spec.new_buffer();
        for &v in &values {
            b.append(v);
        }
        let recent = &values[values.len().saturating_sub(n)..];
        let expected = values.len() < n || recent.iter().any(|v| (0..=9).contains(v));
        prop_assert_eq!(eval_phi(&spec, &b).unwrap(), expected);
    }

    #[test]
    fn ranges_round_trip_through_text(lo in -1000i32..1000, len in 0i32..100) {
        let r = IntRange::new(lo, lo + len).unwrap();
        prop_assert_eq!(r.to_string().parse::<IntRange>().unwrap(), r);
        prop_assert_eq!(r.size(), len as u64 + 1);
    }

    #[test]
    fn eta_is_a_percentage(s in 1usize..50, m_frac in 0.0f64..=1.0) {
        let m = (s as f64 * m_frac) as usize;
        let text = format_eta(seuguard_core::analysis::eta(s, m));
        let value: f64 = text.trim_end_matches('%').parse().unwrap();
        prop_assert!((0.0..=100.0).contains(&value));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn report_aggregates_are_consistent(seed in 0u64..10_000) {
        let g = random_program(seed);
        let r = analyze(&g.analysis_config()).unwrap();
        prop_assert!(r.m <= r.s && r.s <= r.t);
        prop_assert_eq!(r.t, g.program().list_variables().len());
        prop_assert_eq!(r.crv_count, r.s - r.m);
        let m = r
            .per_variable
            .iter()
            .filter(|v| v.in_slice && v.verdict.classification == Classification::NonCrv)
            .count();
        prop_assert_eq!(r.m, m);
        for v in &r.per_variable {
            if !v.in_slice {
                prop_assert!(v.verdict.pruned);
            }
            if let Some(c) = &v.verdict.counterexample {
                prop_assert_eq!(Some(c.direction), v.verdict.direction);
            }
        }
    }
}
