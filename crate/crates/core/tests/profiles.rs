mod common;

use std::collections::BTreeSet;

use common::generate;
use pb_core::gen::{gen_instance, gen_profile, GenParams, ProfileKind};
use pb_core::model::validate_profile;
use pb_core::profiles::{chains_certify, classify, deviant_witness, GroupVerdict};
use pb_core::strategy::fixture;
use pb_core::{GroupId, Instance, ProjectId, Vote, VoterId};
use proptest::prelude::*;

/// Chains partition the group and every ballot approves a prefix of one chain.
fn chains_witness_ok(
    inst: &Instance,
    votes: &[Vote],
    g: GroupId,
    chains: &[Vec<ProjectId>],
) -> bool {
    let members: BTreeSet<ProjectId> = inst.group(g).unwrap().projects.iter().copied().collect();
    let listed: Vec<ProjectId> = chains.iter().flatten().copied().collect();
    if listed.len() != members.len() || listed.iter().copied().collect::<BTreeSet<_>>() != members {
        return false;
    }
    votes.iter().filter_map(|v| v.entry(g)).all(|e| {
        e.approvals.is_empty()
            || chains.iter().any(|c| {
                let prefix: BTreeSet<ProjectId> = c[..e.approvals.len().min(c.len())]
                    .iter()
                    .copied()
                    .collect();
                prefix == e.approvals
            })
    })
}

fn params(seed: u64, kind: ProfileKind) -> GenParams {
    GenParams {
        projects: (2, 9),
        voters: (1, 6),
        budget: (1, 5),
        max_group_size: 4,
        ..GenParams::default()
    }
    .with_seed(seed)
    .with_kind(kind)
}

#[test]
fn example_profile() {
    let f = fixture("example3").unwrap();
    let (inst, votes) = f.build().unwrap();
    let report = classify(&inst, &votes);
    assert!(report.compliant);
    assert_eq!(report.verdict(GroupId(1)), Some(&GroupVerdict::Independent));
    let Some(GroupVerdict::SubstituteChains { chains }) = report.verdict(GroupId(2)) else {
        panic!("group 2: {:?}", report.verdict(GroupId(2)));
    };
    assert!(chains_certify(&votes, GroupId(2), chains));
    assert!(chains_witness_ok(&inst, &votes, GroupId(2), chains));
    let ids: Vec<Vec<u32>> = chains
        .iter()
        .map(|c| c.iter().map(|p| p.0).collect())
        .collect();
    assert_eq!(ids, vec![vec![4, 5, 6], vec![8, 9, 7]]);
}

#[test]
fn complement_flag_is_never_compliant() {
    let f = fixture("obs4-complements").unwrap();
    let (inst, mut votes) = f.build().unwrap();
    assert!(classify(&inst, &votes).compliant);
    votes[2].entries.get_mut(&GroupId(1)).unwrap().complement = true;
    let report = classify(&inst, &votes);
    assert!(!report.compliant);
    assert!(report.complements);
    assert!(matches!(
        report.verdict(GroupId(1)),
        Some(GroupVerdict::NonCompliant { .. })
    ));
    assert_eq!(report.deviant_voters, vec![VoterId(3)]);
}

#[test]
fn crossing_approvals_are_not_chains() {
    let f = fixture("example3").unwrap();
    let (inst, mut votes) = f.build().unwrap();
    // {p6,p7} overlaps both {p4,p5,p6} and {p7,p8,p9} without nesting.
    votes[3].entries.get_mut(&GroupId(2)).unwrap().approvals =
        [6, 7].map(ProjectId).into_iter().collect();
    let report = classify(&inst, &votes);
    assert!(matches!(
        report.verdict(GroupId(2)),
        Some(GroupVerdict::NonCompliant { .. })
    ));
    assert_eq!(deviant_witness(&inst, &votes, 1), vec![VoterId(4)]);
}

#[test]
fn certify_rejects_a_wrong_order() {
    let f = fixture("example3").unwrap();
    let (_, votes) = f.build().unwrap();
    let bad = vec![
        [6, 5, 4].map(ProjectId).to_vec(),
        [7, 8, 9].map(ProjectId).to_vec(),
    ];
    assert!(!chains_certify(&votes, GroupId(2), &bad));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn structured_profiles_classify_compliant(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&params(seed, ProfileKind::Def3)) else { return Ok(()) };
        let report = classify(&inst, &votes);
        prop_assert!(report.compliant, "{}", report.to_text());
        for g in &report.groups {
            if let GroupVerdict::SubstituteChains { chains } = &g.verdict {
                prop_assert!(chains_certify(&votes, g.group, chains));
                prop_assert!(chains_witness_ok(&inst, &votes, g.group, chains));
            }
            if g.verdict == GroupVerdict::Independent {
                for e in votes.iter().filter_map(|v| v.entry(g.group)) {
                    let cost: u64 = e.approvals.iter().map(|p| inst.project(*p).unwrap().cost).sum();
                    prop_assert_eq!(e.funds, cost);
                }
            }
        }
    }

    #[test]
    fn complement_profiles_classify_noncompliant(seed in any::<u64>()) {
        let Some((inst, votes)) = generate(&params(seed, ProfileKind::WithComplements)) else { return Ok(()) };
        prop_assert!(votes.iter().any(Vote::has_complement));
        prop_assert!(!classify(&inst, &votes).compliant);
    }

    #[test]
    fn one_deviant_is_witnessed(seed in any::<u64>()) {
        let p = params(seed, ProfileKind::Def3WithDeviant);
        let Ok(inst) = gen_instance(&p) else { return Ok(()) };
        let (votes, _) = validate_profile(&inst, &gen_profile(&inst, &p).votes).unwrap();
        let report = classify(&inst, &votes);
        prop_assert!(report.certified_with(1), "{}", report.to_text());
    }
}
