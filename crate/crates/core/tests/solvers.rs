mod common;

use common::{best, generate, set_of, welfare};
use pb_core::gen::{GenParams, ProfileKind};
use pb_core::model::{is_feasible_outcome, BundleRule, TieBreakPolicy};
use pb_core::oracle::solve_oracle;
use pb_core::solvers::{solve_distinct_votes, solve_exact, solve_greedy};
use pb_core::{solve, SolveMode, SolverConfig, SolverKind, Vote, VoterId};
use proptest::prelude::*;

fn general(seed: u64) -> GenParams {
    GenParams {
        projects: (2, 10),
        voters: (1, 5),
        budget: (2, 12),
        cost: (1, 4),
        max_group_size: 3,
        tree_depth: (0, 2),
        complement_prob: 0.3,
        ..GenParams::default()
    }
    .with_seed(seed)
}

fn unit_laminar(seed: u64, kind: ProfileKind) -> GenParams {
    GenParams {
        projects: (2, 9),
        voters: (1, 5),
        budget: (1, 5),
        max_group_size: 4,
        ..GenParams::default()
    }
    .with_seed(seed)
    .with_kind(kind)
}

fn weighted(seed: u64) -> GenParams {
    GenParams {
        projects: (2, 10),
        voters: (1, 4),
        budget: (1, 6),
        max_weight: 5,
        complement_prob: 0.3,
        duplicate_prob: 0.3,
        ..GenParams::default()
    }
    .with_seed(seed)
}

fn expand(votes: &[Vote]) -> Vec<Vote> {
    let mut out = Vec::new();
    for v in votes {
        for _ in 0..v.weight {
            let mut c = v.clone();
            c.voter = VoterId(out.len() as u32 + 1);
            c.weight = 1;
            out.push(c);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn exact_matches_reference(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&general(seed)) else { return Ok(()) };
        let (set, w) = best(&inst, &votes).unwrap();
        let r = solve_exact(&inst, &votes, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.social_welfare, w);
        prop_assert_eq!(set_of(&r.outcome), set);
        prop_assert!(is_feasible_outcome(&inst, &r.outcome));
    }

    #[test]
    fn exact_matches_reference_under_index_sum(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&general(seed)) else { return Ok(()) };
        let inst = inst.with_tiebreak(TieBreakPolicy::index_sum()).unwrap();
        let (set, _) = best(&inst, &votes).unwrap();
        let r = solve_exact(&inst, &votes, &SolverConfig::default()).unwrap();
        prop_assert_eq!(set_of(&r.outcome), set);
    }

    #[test]
    fn exact_respects_custom_priority(seed in any::<u64>(), rot in 0usize..10) {
        let Some((inst, votes)) = generate(&general(seed)) else { return Ok(()) };
        let mut ids = inst.project_ids();
        ids.reverse();
        let k = rot % ids.len();
        ids.rotate_left(k);
        let inst = inst.with_tiebreak(TieBreakPolicy::with_priority(ids)).unwrap();
        let (set, _) = best(&inst, &votes).unwrap();
        let r = solve_exact(&inst, &votes, &SolverConfig::default()).unwrap();
        prop_assert_eq!(set_of(&r.outcome), set);
    }

    #[test]
    fn oracle_matches_reference(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&general(seed)) else { return Ok(()) };
        let (set, w) = best(&inst, &votes).unwrap();
        for prune in [true, false] {
            let config = SolverConfig { oracle_prune: prune, ..SolverConfig::default() };
            let r = solve_oracle(&inst, &votes, &config).unwrap();
            prop_assert_eq!(r.social_welfare, w);
            prop_assert_eq!(set_of(&r.outcome), set.clone());
        }
    }

    #[test]
    fn greedy_optimal_on_structured_profiles(seed in any::<u64>(), deviant in any::<bool>()) {
        let kind = if deviant { ProfileKind::Def3WithDeviant } else { ProfileKind::Def3 };
        let Some((inst, votes)) = generate(&unit_laminar(seed, kind)) else { return Ok(()) };
        let (_, w) = best(&inst, &votes).unwrap();
        let r = solve_greedy(&inst, &votes, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.social_welfare, w);
        prop_assert!(is_feasible_outcome(&inst, &r.outcome));
        prop_assert_eq!(welfare(&inst, &votes, &set_of(&r.outcome)), r.social_welfare);
    }

    #[test]
    fn greedy_is_feasible_on_any_profile(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&unit_laminar(seed, ProfileKind::General)) else { return Ok(()) };
        let (_, w) = best(&inst, &votes).unwrap();
        let r = solve_greedy(&inst, &votes, &SolverConfig::default()).unwrap();
        prop_assert!(is_feasible_outcome(&inst, &r.outcome));
        prop_assert!(r.social_welfare <= w);
    }

    #[test]
    fn distinct_matches_expanded_reference(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&weighted(seed)) else { return Ok(()) };
        let expanded = expand(&votes);
        let (_, w) = best(&inst, &expanded).unwrap();
        let r = solve_distinct_votes(&inst, &votes, &SolverConfig::default()).unwrap();
        // Only the welfare is pinned: the case algorithm picks its own
        // representative among equally good bundles.
        prop_assert_eq!(r.social_welfare, w);
        prop_assert!(is_feasible_outcome(&inst, &r.outcome));
        prop_assert_eq!(welfare(&inst, &expanded, &set_of(&r.outcome)), w);
        let e = solve_exact(&inst, &expanded, &SolverConfig::default()).unwrap();
        prop_assert_eq!(e.social_welfare, w);
    }

    #[test]
    fn auto_dispatch_is_optimal_when_it_answers(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&general(seed)) else { return Ok(()) };
        let (_, w) = best(&inst, &votes).unwrap();
        let r = solve(&inst, &votes, SolveMode::Auto, &SolverConfig::default()).unwrap();
        prop_assert_eq!(r.social_welfare, w);
    }
}

#[test]
fn exact_rejects_oversized_groups() {
    let (inst, votes) = generate(&general(7)).unwrap();
    let config = SolverConfig {
        smax_cap: 0,
        ..SolverConfig::default()
    };
    let err = solve_exact(&inst, &votes, &config).unwrap_err();
    assert_eq!(err.code(), "GroupTooLarge");
    assert!(err.is_capacity());
}

#[test]
fn greedy_and_distinct_need_unit_costs() {
    let f = pb_core::strategy::fixture("ballot-demo").unwrap();
    let (inst, votes) = f.build().unwrap();
    let config = SolverConfig::default();
    assert_eq!(
        solve_greedy(&inst, &votes, &config).unwrap_err().code(),
        "NotUnitCost"
    );
    assert_eq!(
        solve_distinct_votes(&inst, &votes, &config)
            .unwrap_err()
            .code(),
        "NotUnitCost"
    );
}

#[test]
fn distinct_cap_counts_distinct_ballots() {
    let (inst, votes) = generate(&weighted(3)).unwrap();
    let config = SolverConfig {
        distinct_cap: 0,
        ..SolverConfig::default()
    };
    assert_eq!(
        solve_distinct_votes(&inst, &votes, &config)
            .unwrap_err()
            .code(),
        "TooManyDistinctVotes"
    );
}

#[test]
fn custom_bundle_order_picks_first_listed_optimum() {
    let f = pb_core::strategy::fixture("obs5-substitutes").unwrap();
    let (inst, votes) = f.build().unwrap();
    let custom = TieBreakPolicy {
        project_priority: None,
        bundle_rule: BundleRule::Custom(vec![
            vec![pb_core::ProjectId(4), pb_core::ProjectId(5)],
            vec![pb_core::ProjectId(1), pb_core::ProjectId(3)],
        ]),
    };
    let inst = inst.with_tiebreak(custom).unwrap();
    let r = solve(
        &inst,
        &votes,
        SolveMode::ForceExact,
        &SolverConfig::default(),
    )
    .unwrap();
    // {p4,p5} only scores 2, so the first listed optimum is {p1,p3}.
    assert_eq!(r.outcome, pb_core::Outcome::from_ids([1, 3]));
    assert_eq!(r.solver, SolverKind::ExactTreeDp);
}
