use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ids::ProjectId;
use super::instance::Instance;
use super::vote::Vote;

/// A funded bundle of projects.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Outcome {
    pub selected: BTreeSet<ProjectId>,
}

impl Outcome {
    pub fn from_ids(ids: impl IntoIterator<Item = u32>) -> Self {
        Outcome {
            selected: ids.into_iter().map(ProjectId).collect(),
        }
    }

    pub fn contains(&self, p: ProjectId) -> bool {
        self.selected.contains(&p)
    }

    pub fn cost(&self, instance: &Instance) -> u64 {
        self.selected
            .iter()
            .filter_map(|&p| instance.project(p))
            .map(|p| p.cost)
            .sum()
    }

    pub(crate) fn from_mask(instance: &Instance, mask: &[bool]) -> Self {
        Outcome {
            selected: mask
                .iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| instance.projects()[i].id)
                .collect(),
        }
    }

    pub(crate) fn to_mask(&self, instance: &Instance) -> Vec<bool> {
        let mut mask = vec![false; instance.projects().len()];
        for &p in &self.selected {
            if let Some(i) = instance.project_index(p) {
                mask[i] = true;
            }
        }
        mask
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ids: Vec<String> = self.selected.iter().map(|p| p.to_string()).collect();
        write!(f, "{{{}}}", ids.join(","))
    }
}

/// Unweighted utility of one ballot for an outcome.
pub fn utility(instance: &Instance, vote: &Vote, outcome: &Outcome) -> u64 {
    let cost = |p: &ProjectId| instance.project(*p).map_or(0, |p| p.cost);
    vote.entries
        .values()
        .map(|e| {
            let covered: u64 = e
                .approvals
                .iter()
                .filter(|p| outcome.contains(**p))
                .map(cost)
                .sum();
            if e.complement && !e.approvals.iter().all(|p| outcome.contains(*p)) {
                0
            } else {
                covered.min(e.funds)
            }
        })
        .sum()
}

pub fn social_welfare(instance: &Instance, votes: &[Vote], outcome: &Outcome) -> u64 {
    votes
        .iter()
        .map(|v| v.weight * utility(instance, v, outcome))
        .sum()
}

/// Budget, every label's funding bounds, and contradictory-group caps.
pub fn is_feasible_outcome(instance: &Instance, outcome: &Outcome) -> bool {
    if outcome
        .selected
        .iter()
        .any(|&p| instance.project(p).is_none())
    {
        return false;
    }
    feasible_mask(instance, &outcome.to_mask(instance))
}

pub(crate) fn feasible_mask(instance: &Instance, mask: &[bool]) -> bool {
    let total: u64 = (0..mask.len())
        .filter(|&i| mask[i])
        .map(|i| instance.cost_of(i))
        .sum();
    if total > instance.budget() {
        return false;
    }
    for (l, node) in instance.labels().iter().enumerate() {
        let spend: u64 = instance
            .members_of_label(l)
            .iter()
            .filter(|&&p| mask[p])
            .map(|&p| instance.cost_of(p))
            .sum();
        if spend < node.b_min || spend > node.b_max {
            return false;
        }
    }
    instance
        .groups()
        .iter()
        .enumerate()
        .all(|(g, group)| match group.kind.selection_cap() {
            Some(k) => {
                instance
                    .members_of_group(g)
                    .iter()
                    .filter(|&&p| mask[p])
                    .count()
                    <= k
            }
            None => true,
        })
}

/// One group entry of one voter, in dense project indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Ballot {
    pub voter: usize,
    pub weight: u64,
    pub funds: u64,
    pub approvals: Vec<usize>,
    pub complement: bool,
}

impl Ballot {
    pub fn value(&self, instance: &Instance, selected: &[bool]) -> u64 {
        let mut covered = 0;
        for &p in &self.approvals {
            if selected[p] {
                covered += instance.cost_of(p);
            } else if self.complement {
                return 0;
            }
        }
        covered.min(self.funds)
    }
}

/// A profile regrouped by ballot group for the solvers.
#[derive(Debug, Clone)]
pub(crate) struct CompiledProfile {
    pub by_group: Vec<Vec<Ballot>>,
}

impl CompiledProfile {
    pub fn new(instance: &Instance, votes: &[Vote]) -> Self {
        let mut by_group = vec![Vec::new(); instance.groups().len()];
        for (vi, v) in votes.iter().enumerate() {
            for (gid, e) in &v.entries {
                let Some(g) = instance.group_index(*gid) else {
                    continue;
                };
                if e.funds == 0 || e.approvals.is_empty() {
                    continue;
                }
                by_group[g].push(Ballot {
                    voter: vi,
                    weight: v.weight,
                    funds: e.funds,
                    approvals: e
                        .approvals
                        .iter()
                        .filter_map(|&p| instance.project_index(p))
                        .collect(),
                    complement: e.complement,
                });
            }
        }
        CompiledProfile { by_group }
    }

    pub fn welfare(&self, instance: &Instance, selected: &[bool]) -> u64 {
        self.by_group
            .iter()
            .flatten()
            .map(|b| b.weight * b.value(instance, selected))
            .sum()
    }

    pub fn group_welfare(&self, instance: &Instance, g: usize, selected: &[bool]) -> u64 {
        self.by_group[g]
            .iter()
            .map(|b| b.weight * b.value(instance, selected))
            .sum()
    }
}
