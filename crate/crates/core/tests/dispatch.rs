mod common;

use common::{best, generate};
use pb_core::gen::{GenParams, ProfileKind};
use pb_core::model::{
    validate_instance, GroupKindRecord, GroupRecord, InstanceFile, ProjectRecord, TieBreakPolicy,
};
use pb_core::solvers::{solve_distinct_votes, solve_exact, solve_greedy};
use pb_core::strategy::fixture;
use pb_core::{
    solve, GroupId, Outcome, ProjectId, SolveMode, SolverConfig, SolverKind, Vote, VoterId,
};

fn structured(seed: u64) -> GenParams {
    GenParams {
        projects: (3, 8),
        budget: (2, 5),
        max_group_size: 3,
        ..GenParams::default()
    }
    .with_seed(seed)
    .with_kind(ProfileKind::Def3)
}

fn one_big_group(size: u32) -> InstanceFile {
    InstanceFile {
        budget: 3,
        projects: (1..=size)
            .map(|p| ProjectRecord {
                id: ProjectId(p),
                name: format!("p{p}"),
                cost: 1,
                group: GroupId(1),
            })
            .collect(),
        groups: vec![GroupRecord {
            id: GroupId(1),
            kind: GroupKindRecord::Standard,
            max_approvals: None,
            label_leaf: None,
            extra_labels: vec![],
        }],
        labels: vec![],
        tiebreak: TieBreakPolicy::default(),
    }
}

#[test]
fn structured_unit_cost_profiles_use_greedy() {
    let mut checked = 0;
    for seed in 0..40 {
        let Some((inst, votes)) = generate(&structured(seed)) else {
            continue;
        };
        let r = solve(&inst, &votes, SolveMode::Auto, &SolverConfig::default()).unwrap();
        assert_eq!(r.solver, SolverKind::Greedy, "seed {seed}");
        assert!(r.compliance.compliant);
        assert!(r.warnings.is_empty());
        checked += 1;
    }
    assert!(checked > 30);
}

#[test]
fn complement_ballots_use_exact() {
    let f = fixture("obs4-complements").unwrap();
    let (inst, mut votes) = f.build().unwrap();
    votes[2] = Vote::new(VoterId(3)).with(GroupId(1), 3, &[1, 2, 3], true);
    let config = SolverConfig::default();
    let r = solve(&inst, &votes, SolveMode::Auto, &config).unwrap();
    assert_eq!(r.solver, SolverKind::ExactTreeDp);
    assert_eq!(r.outcome, Outcome::from_ids([1, 2, 3]));
    let g = solve(&inst, &votes, SolveMode::ForceGreedy, &config).unwrap();
    assert_eq!(g.solver, SolverKind::Greedy);
    assert!(g.warnings.iter().any(|w| w.contains("complements")));
}

#[test]
fn oversized_group_is_reported() {
    let inst = validate_instance(&one_big_group(20)).unwrap();
    let votes = vec![Vote::new(VoterId(1)).with(GroupId(1), 3, &[1, 2, 3], false)];
    let err = solve(
        &inst,
        &votes,
        SolveMode::ForceExact,
        &SolverConfig::default(),
    )
    .unwrap_err();
    assert_eq!(err.code(), "GroupTooLarge");
    assert_eq!(err.entity().as_deref(), Some("g1"));
    // Unit costs and a chain profile still let Auto answer with greedy.
    let r = solve(&inst, &votes, SolveMode::Auto, &SolverConfig::default()).unwrap();
    assert_eq!(r.solver, SolverKind::Greedy);
    assert_eq!(r.outcome, Outcome::from_ids([1, 2, 3]));
}

#[test]
fn nonlaminar_needs_the_oracle() {
    let f = fixture("thm2-nonlaminar").unwrap();
    let (inst, votes) = f.build().unwrap();
    let err = solve(&inst, &votes, SolveMode::Auto, &SolverConfig::default()).unwrap_err();
    assert_eq!(err.code(), "NoApplicableSolver");
    assert!(err.to_string().contains("oracle"));
    let r = solve(
        &inst,
        &votes,
        SolveMode::ForceOracle,
        &SolverConfig::default(),
    )
    .unwrap();
    assert_eq!(r.outcome, Outcome::from_ids([3]));
}

#[test]
fn empty_profile_pads_by_priority() {
    let inst = validate_instance(&one_big_group(5)).unwrap();
    let r = solve_greedy(&inst, &[], &SolverConfig::default()).unwrap();
    assert_eq!(r.outcome, Outcome::from_ids([1, 2, 3]));
    let r = solve_greedy(
        &inst,
        &[],
        &SolverConfig {
            pad: false,
            ..SolverConfig::default()
        },
    )
    .unwrap();
    assert_eq!(r.outcome, Outcome::default());
    let inst = inst
        .with_tiebreak(TieBreakPolicy::with_priority(
            [5, 4, 3, 2, 1].map(ProjectId).to_vec(),
        ))
        .unwrap();
    let r = solve_greedy(&inst, &[], &SolverConfig::default()).unwrap();
    assert_eq!(r.outcome, Outcome::from_ids([3, 4, 5]));
}

#[test]
fn greedy_on_substitutes_profile() {
    let f = fixture("obs5-substitutes").unwrap();
    let (inst, votes) = f.build().unwrap();
    let r = solve_greedy(&inst, &votes, &SolverConfig::default()).unwrap();
    // p3 has five supporters and goes first; p1 then wins the tie for the
    // last unit. Same welfare as the exact optimum {p1,p2}.
    assert_eq!(r.outcome, Outcome::from_ids([1, 3]));
    assert_eq!(r.social_welfare, 6);
}

#[test]
fn distinct_votes_on_complements_profile() {
    let f = fixture("obs4-complements").unwrap();
    let (inst, votes) = f.build().unwrap();
    let r = solve_distinct_votes(&inst, &votes, &SolverConfig::default()).unwrap();
    assert_eq!(r.outcome, Outcome::from_ids([1, 2, 4]));
    assert_eq!(r.social_welfare, 6);
}

#[test]
fn single_weighted_voter_gets_their_best_bundle() {
    for seed in 0..30 {
        let Some((inst, votes)) = generate(&structured(seed).with_kind(ProfileKind::General)) else {
            continue;
        };
        let one = vec![votes[0].clone().weighted(4)];
        let (_, w) = best(&inst, &one).unwrap();
        let r = solve_distinct_votes(&inst, &one, &SolverConfig::default()).unwrap();
        assert_eq!(r.social_welfare, w);
        assert_eq!(w % 4, 0);
    }
}

#[test]
fn exact_dominates_greedy() {
    for seed in 0..100 {
        let p = GenParams {
            complement_prob: 0.3,
            ..structured(seed).with_kind(ProfileKind::General)
        };
        let Some((inst, votes)) = generate(&p) else {
            continue;
        };
        let config = SolverConfig::default();
        let e = solve_exact(&inst, &votes, &config).unwrap();
        let g = solve_greedy(&inst, &votes, &config).unwrap();
        assert!(e.social_welfare >= g.social_welfare, "seed {seed}");
    }
}

#[test]
fn results_are_identical_across_thread_counts() {
    let (inst, votes) = generate(&structured(5).with_kind(ProfileKind::General)).unwrap();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| {
                solve(
                    &inst,
                    &votes,
                    SolveMode::ForceExact,
                    &SolverConfig::default(),
                )
                .unwrap()
                .to_json()
            })
    };
    let one = run(1);
    assert_eq!(one, run(2));
    assert_eq!(one, run(4));
}
