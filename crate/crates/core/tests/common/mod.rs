//! Reference implementations for the integration tests. Nothing here calls
//! into the solvers; feasibility and welfare are recomputed from the raw
//! instance data.
#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeSet;

use pb_core::gen::{gen_instance, gen_profile, GenParams};
use pb_core::model::validate_profile;
use pb_core::{GroupKind, Instance, Outcome, ProjectId, Vote};

pub fn cost_of(inst: &Instance, set: &BTreeSet<ProjectId>) -> u64 {
    set.iter().map(|p| inst.project(*p).unwrap().cost).sum()
}

pub fn feasible(inst: &Instance, set: &BTreeSet<ProjectId>) -> bool {
    if cost_of(inst, set) > inst.budget() {
        return false;
    }
    for l in inst.labels() {
        let spend: u64 = inst
            .label_projects(l.id)
            .iter()
            .filter(|p| set.contains(p))
            .map(|p| inst.project(*p).unwrap().cost)
            .sum();
        if spend < l.b_min || spend > l.b_max {
            return false;
        }
    }
    inst.groups().iter().all(|g| match g.kind {
        GroupKind::Contradictory { max_approvals } => {
            g.projects.iter().filter(|p| set.contains(p)).count() <= max_approvals as usize
        }
        GroupKind::Standard => true,
    })
}

pub fn utility(inst: &Instance, vote: &Vote, set: &BTreeSet<ProjectId>) -> u64 {
    let mut total = 0;
    for e in vote.entries.values() {
        let all = e.approvals.iter().all(|p| set.contains(p));
        if e.complement && !all {
            continue;
        }
        let covered: u64 = e
            .approvals
            .iter()
            .filter(|p| set.contains(p))
            .map(|p| inst.project(*p).unwrap().cost)
            .sum();
        total += covered.min(e.funds);
    }
    total
}

pub fn welfare(inst: &Instance, votes: &[Vote], set: &BTreeSet<ProjectId>) -> u64 {
    votes.iter().map(|v| v.weight * utility(inst, v, set)).sum()
}

pub fn all_subsets(inst: &Instance) -> Vec<BTreeSet<ProjectId>> {
    let ids = inst.project_ids();
    (0u64..1 << ids.len())
        .map(|m| {
            ids.iter()
                .enumerate()
                .filter(|(i, _)| m >> i & 1 == 1)
                .map(|(_, p)| *p)
                .collect()
        })
        .collect()
}

pub fn feasible_subsets(inst: &Instance) -> Vec<BTreeSet<ProjectId>> {
    all_subsets(inst)
        .into_iter()
        .filter(|s| feasible(inst, s))
        .collect()
}

/// Best feasible bundle: maximum welfare, then the instance's tie-break rule.
pub fn best(inst: &Instance, votes: &[Vote]) -> Option<(BTreeSet<ProjectId>, u64)> {
    let ids = inst.project_ids();
    let mut best: Option<(BTreeSet<ProjectId>, u64)> = None;
    for s in feasible_subsets(inst) {
        let w = welfare(inst, votes, &s);
        let better = match &best {
            None => true,
            Some((b, bw)) => match w.cmp(bw) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    inst.tiebreak().compare_bundles(&ids, &s, b) == Ordering::Greater
                }
            },
        };
        if better {
            best = Some((s, w));
        }
    }
    best
}

pub fn set_of(o: &Outcome) -> BTreeSet<ProjectId> {
    o.selected.clone()
}

/// Instance and validated profile for `params`, or `None` when generation fails.
pub fn generate(params: &GenParams) -> Option<(Instance, Vec<Vote>)> {
    let inst = gen_instance(params).ok()?;
    let profile = gen_profile(&inst, params);
    let (votes, _) = validate_profile(&inst, &profile.votes).expect("generated ballots validate");
    Some((inst, votes))
}
