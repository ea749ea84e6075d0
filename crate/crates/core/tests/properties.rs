use blockshift::analysis::complexity_profile;
use blockshift::arith::{correlation_average, WeightTable};
use blockshift::schedule::build_schedule_with;
use blockshift::{
    build_schedule, fill_level, init_partial, realize, verify_realization, Alphabet, Interval,
    Profile, ScheduleConfig, SparseSetSpec, TargetSequence, STAR,
};
use proptest::prelude::*;

fn binary_squares(depth: usize, hint: Interval) -> blockshift::Schedule {
    build_schedule(
        &Alphabet::binary(),
        &SparseSetSpec::squares(),
        depth,
        hint,
        Profile::Faithful,
    )
    .unwrap()
}

fn target(bits: &[bool]) -> TargetSequence {
    TargetSequence::Explicit {
        symbols: bits.iter().map(|&b| b as u8).collect(),
        label: "random".into(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn filling_only_touches_stars(bits in proptest::collection::vec(any::<bool>(), 40), hi in 0i64..1200) {
        let s = binary_squares(1, Interval::new(0, hi).unwrap());
        let u = target(&bits);
        let window = blockshift::realize::realization_window(&s, 1).unwrap();
        let x0 = init_partial(&u, &s.sparse, window, &s.alphabet).unwrap();
        let x1 = fill_level(&x0, 1, &s).unwrap();
        for (a, b) in x0.cells().iter().zip(x1.cells()) {
            if *a != STAR {
                prop_assert_eq!(a, b);
            }
        }
        for (b, block) in x1.cells().chunks_exact(15).enumerate() {
            let lo = window.lo + 15 * b as i64;
            let meets = s.sparse.meets(Interval::new(lo, lo + 14).unwrap()).unwrap();
            prop_assert!(block.iter().all(|&c| (c == STAR) != meets));
        }
        prop_assert!(verify_realization(&x1, &u, &s.sparse, &s.alphabet).unwrap().passed());
    }

    #[test]
    fn realizations_are_realizations(bits in proptest::collection::vec(any::<bool>(), 900)) {
        let s = binary_squares(2, Interval::new(0, 0).unwrap());
        let u = target(&bits);
        let x = realize(&u, &s, 2).unwrap();
        let r = verify_realization(&x, &u, &s.sparse, &s.alphabet).unwrap();
        prop_assert!(r.passed());
        prop_assert_eq!(r.checked, 832);
        // monotone across depths
        let x1 = realize(&u, &s, 1).unwrap();
        prop_assert_eq!(x1.cells(), x.slice(x1.interval()).unwrap());
    }

    #[test]
    fn average_ignores_the_fill_cycle(start in 0usize..40_000, n in 1u64..=832) {
        let config = ScheduleConfig { cycle_start: start, ..ScheduleConfig::default() };
        let s = build_schedule_with(&Alphabet::binary(), &SparseSetSpec::squares(), 2, Profile::Faithful, config).unwrap();
        let base = binary_squares(2, Interval::new(0, 0).unwrap());
        let u = TargetSequence::MuIndicator;
        let w = WeightTable::mobius(n).unwrap();
        let a = correlation_average(&realize(&u, &s, 2).unwrap(), &s.alphabet, &w, &s.sparse, n, None).unwrap();
        let b = correlation_average(&realize(&u, &base, 2).unwrap(), &s.alphabet, &w, &s.sparse, n, None).unwrap();
        prop_assert_eq!(a.points, b.points);
    }

    #[test]
    fn complexity_bounds(cells in proptest::collection::vec(0u8..3, 1..300)) {
        let x = blockshift::PartialWindow::new(0, cells.clone()).unwrap();
        let r = complexity_profile(&x, 12).unwrap();
        let mut prev = 1u64;
        for &(n, c) in &r.counts {
            let cap = 3u64.pow(n as u32).min((cells.len() as u64 + 1).saturating_sub(n));
            prop_assert!(c <= cap);
            prop_assert!(c <= 3 * prev);
            prev = c;
        }
    }
}

#[test]
fn fast_profile_is_seeded() {
    let build = |seed| {
        let config = ScheduleConfig {
            seed,
            ..ScheduleConfig::default()
        };
        let s = build_schedule_with(
            &Alphabet::new("0+-").unwrap(),
            &SparseSetSpec::squares(),
            2,
            Profile::Fast,
            config,
        )
        .unwrap();
        realize(&TargetSequence::MuSign, &s, 2).unwrap()
    };
    assert_eq!(build(7), build(7));
    assert_ne!(build(7).cells(), build(8).cells());
}

#[test]
fn monomial_and_nlogn_sets_build() {
    for (spec, depth) in [("monomial:3", 2), ("nlogn", 1), ("power:5/2", 2)] {
        let sparse = SparseSetSpec::parse(spec).unwrap();
        let s = build_schedule(
            &Alphabet::binary(),
            &sparse,
            depth,
            Interval::new(0, 0).unwrap(),
            Profile::Faithful,
        )
        .unwrap_or_else(|e| panic!("{spec}: {e}"));
        let x = realize(&TargetSequence::MuIndicator, &s, depth).unwrap();
        assert!(
            verify_realization(&x, &TargetSequence::MuIndicator, &sparse, &s.alphabet)
                .unwrap()
                .passed(),
            "{spec}"
        );
    }
}
