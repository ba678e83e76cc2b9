use std::collections::BTreeSet;

use proptest::prelude::*;

use naetree::analysis::{estimate_psi, f_large, g_large, g_small, small_regime, QSqrt6, Rational};
use naetree::generators::{
    ksat_to_naesat, random_ksat, random_mixed_closed, random_negation_closed,
};
use naetree::oracle::{brute_force, nae_solutions_direct, verify_enumeration};
use naetree::search::DEFAULT_ORDERING_BUDGET;
use naetree::tree::check_invariants;
use naetree::{
    enumerate, enumerate_all_orderings, enumerate_with, materialize, Assignment, Formula,
    OrderingSource, SearchConfig,
};

/// Clamps `m` to the number of distinct monotone triples.
fn instance(n: u32, m: usize, seed: u64, mixed: bool) -> Formula {
    let n_ = n as usize;
    let m = m.min(n_ * (n_ - 1) * (n_ - 2) / 6);
    if mixed {
        random_mixed_closed(n, m, seed).unwrap()
    } else {
        random_negation_closed(n, m, seed).unwrap()
    }
}

fn collect(f: &Formula, cfg: &SearchConfig) -> Vec<Assignment> {
    let mut out = Vec::new();
    enumerate_with(f, cfg, &mut |a| out.push(a.clone())).unwrap();
    out
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn emits_the_oracle_set_exactly_once(
        n in 4u32..=13,
        m in 1usize..30,
        seed in any::<u64>(),
        ord in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let f = instance(n, m, seed, mixed);
        let Some(tau) = brute_force(&f, None).unwrap().tau else { return Ok(()) };
        let sols = collect(&f, &SearchConfig::new(tau, OrderingSource::Seeded(ord)));
        let r = verify_enumeration(&f, tau, &sols).unwrap();
        prop_assert!(r.pass, "{:?}", r.first_mismatch);
    }

    #[test]
    fn parallel_prefix_split_finds_the_same_set(
        n in 6u32..=12,
        m in 2usize..24,
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let f = instance(n, m, seed, mixed);
        let Some(tau) = brute_force(&f, None).unwrap().tau else { return Ok(()) };
        let seq = collect(&f, &SearchConfig::new(tau, OrderingSource::Seeded(seed)));
        let par = collect(&f, &SearchConfig {
            parallel: 3,
            ..SearchConfig::new(tau, OrderingSource::Seeded(seed))
        });
        let a: BTreeSet<_> = seq.into_iter().collect();
        let b: BTreeSet<_> = par.into_iter().collect();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn materialized_trees_are_clean_and_psi_is_additive(
        n in 4u32..=12,
        m in 1usize..24,
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let f = instance(n, m, seed, mixed);
        let Some(tau) = brute_force(&f, None).unwrap().tau else { return Ok(()) };
        let tree = materialize(&f, tau).unwrap();
        let v = check_invariants(&tree);
        prop_assert!(v.is_empty(), "{:?}", v.first());
        prop_assert!(tree.claim_violations.is_empty());
        prop_assert!(tree.resets.len() <= 3 * n as usize);
        prop_assert_eq!(&tree.psi_bottom_up()[0], &tree.psi_by_paths());
        // Without pruning a solution can sit at several leaves; the set of
        // them is still exactly the oracle's.
        let found: BTreeSet<Assignment> = tree
            .nodes
            .iter()
            .filter(|x| x.transversal)
            .map(|x| Assignment::from_varset(x.ones))
            .collect();
        let want: BTreeSet<Assignment> =
            brute_force(&f, Some(tau)).unwrap().weight_t_solutions.into_iter().collect();
        prop_assert_eq!(found, want);
    }

    #[test]
    fn nae_semantics_match_the_closure(
        n in 3u32..=10,
        m in 1usize..12,
        seed in any::<u64>(),
        t in 0usize..=10,
    ) {
        let raw = random_ksat(n, 3, m, seed).unwrap();
        let t = t.min(n as usize);
        let direct = nae_solutions_direct(&raw, t).unwrap();
        let closure = brute_force(&raw.negation_closure(), Some(t)).unwrap().weight_t_solutions;
        prop_assert_eq!(direct, closure);
    }

    #[test]
    fn reduction_preserves_satisfiability(
        n in 1u32..=8,
        k in 1usize..=3,
        m in 0usize..10,
        seed in any::<u64>(),
    ) {
        let k = k.min(n as usize);
        let f = random_ksat(n, k, m, seed).unwrap();
        let g = ksat_to_naesat(&f);
        prop_assert_eq!(g.num_vars(), n + 1);
        let sat = brute_force(&f, None).unwrap().tau.is_some();
        let nae = (0..=g.num_vars() as usize)
            .any(|t| !nae_solutions_direct(&g, t).unwrap().is_empty());
        prop_assert_eq!(sat, nae);
    }

    #[test]
    fn closed_generators_are_fixed_points(
        n in 3u32..=20,
        m in 0usize..40,
        seed in any::<u64>(),
        mixed in any::<bool>(),
    ) {
        let f = instance(n, m, seed, mixed);
        prop_assert_eq!(&f.negation_closure(), &f);
        prop_assert_eq!(&instance(n, m, seed, mixed), &f);
        prop_assert!(f.clauses().iter().all(|c| c.width() <= 3));
    }

    #[test]
    fn surd_order_agrees_with_floats(
        a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50,
    ) {
        let x = QSqrt6::new(Rational::from_integer(a.into()), Rational::from_integer(b.into()));
        let y = QSqrt6::new(Rational::from_integer(c.into()), Rational::from_integer(d.into()));
        let (fx, fy) = (x.to_f64(), y.to_f64());
        if (fx - fy).abs() > 1e-9 {
            prop_assert_eq!(x < y, fx < fy);
        }
        prop_assert!(&x * &x >= QSqrt6::zero());
        prop_assert_eq!(&x * &y, &y * &x);
        prop_assert_eq!(&(&x + &y) - &y, x);
    }

    #[test]
    fn large_bound_pieces_meet_at_w_eq_2d(d in 0i64..40) {
        prop_assert_eq!(g_large(1, 2 * d, d), g_large(2, 2 * d, d));
        prop_assert_eq!(f_large(2 * d, d), g_large(1, 2 * d, d));
    }

    #[test]
    fn small_bound_is_the_least_applicable_piece(w in -3i64..50, d in 0i64..25, h in 0i64..25) {
        let r = small_regime(w, d, h);
        prop_assert!(r.applies(w, d, h));
        let v = g_small(r.index(), w, d, h);
        let least = (1..=4).map(|i| g_small(i, w, d, h)).min().unwrap();
        prop_assert_eq!(v, least);
    }
}

/// The Monte Carlo mean lands within three standard errors of the exact
/// ψ in at least 99 of 100 independently seeded trials.
#[test]
fn psi_estimate_covers_the_exhaustive_value() {
    let mut checked = 0;
    for seed in 1u64.. {
        let f = random_mixed_closed(8, 6, seed).unwrap();
        let Some(tau) = brute_force(&f, None).unwrap().tau else {
            continue;
        };
        let Ok(r) = enumerate_all_orderings(&f, tau, DEFAULT_ORDERING_BUDGET) else {
            continue;
        };
        if r.leaf_histogram.len() < 2 {
            continue;
        }
        let psi = naetree::analysis::QSqrt6::from(r.psi_paths.clone()).to_f64();
        let hits = (0..100u64)
            .filter(|&trial| {
                let est = estimate_psi(&f, tau, 400, trial * 1000 + seed).unwrap();
                (est.mean - psi).abs() <= 3.0 * est.std_error
            })
            .count();
        assert!(hits >= 99, "seed {seed}: {hits}/100 within 3 SE of {psi}");
        checked += 1;
        if checked == 3 {
            break;
        }
    }
}

#[test]
fn deterministic_tree_has_zero_variance() {
    let f = naetree::generators::maj(8, 3).unwrap().negation_closure();
    let est = estimate_psi(&f, 4, 100, 5).unwrap();
    assert_eq!(est.mean, 36.0);
    assert_eq!(est.std_error, 0.0);
    assert_eq!((est.min, est.max), (36, 36));
}

#[test]
fn fixed_and_seeded_orderings_agree_on_maj12() {
    let f = naetree::generators::maj(12, 3).unwrap().negation_closure();
    let mut a = Vec::new();
    enumerate(&f, 6, OrderingSource::Fixed, &mut |x| a.push(x.clone())).unwrap();
    let mut b = Vec::new();
    enumerate(&f, 6, OrderingSource::Seeded(11), &mut |x| {
        b.push(x.clone())
    })
    .unwrap();
    a.sort();
    b.sort();
    assert_eq!(a.len(), 216);
    assert_eq!(a, b);
}
