use std::collections::BTreeSet;

use crate::model::{GroupId, Instance, ProjectId, Vote, VoteEntry};

use super::StrategyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceOptions {
    /// Offer complement flags on standard groups.
    pub allow_complements: bool,
    /// Only vary one group at a time, keeping the other entries truthful.
    pub single_group: bool,
    /// Refuse spaces estimated above this many ballots.
    pub cap: u128,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            allow_complements: true,
            single_group: false,
            cap: 2_000_000,
        }
    }
}

/// Candidate entries per group. Funds are capped at the cost of the approved
/// set since any excess cannot change a utility; a complement flag is only
/// offered for two or more approvals, where it changes the meaning.
#[derive(Debug, Clone)]
pub struct DeviationSpace {
    pub groups: Vec<(GroupId, Vec<Option<VoteEntry>>)>,
    pub budget: u64,
    pub single_group: bool,
    pub exhaustive: bool,
}

impl DeviationSpace {
    pub fn new(instance: &Instance, options: SpaceOptions) -> Result<Self, StrategyError> {
        let budget = instance.budget();
        let mut groups = Vec::new();
        for group in instance.groups() {
            let members = &group.projects;
            let limit = group.kind.selection_cap().unwrap_or(members.len());
            let mut cands: Vec<Option<VoteEntry>> = vec![None];
            for size in 1..=limit.min(members.len()) {
                for set in combinations(members, size) {
                    let cost: u64 = set.iter().map(|&p| instance.project(p).unwrap().cost).sum();
                    let complement_options: &[bool] =
                        if options.allow_complements && !group.kind.is_contradictory() && size >= 2
                        {
                            &[false, true]
                        } else {
                            &[false]
                        };
                    for funds in 1..=cost.min(budget) {
                        for &complement in complement_options {
                            cands.push(Some(VoteEntry {
                                funds,
                                approvals: set.iter().copied().collect::<BTreeSet<_>>(),
                                complement,
                            }));
                        }
                    }
                }
            }
            groups.push((group.id, cands));
        }
        let estimate: u128 = if options.single_group {
            groups.iter().map(|(_, c)| c.len() as u128).sum()
        } else {
            groups
                .iter()
                .map(|(_, c)| c.len() as u128)
                .try_fold(1u128, |a, b| a.checked_mul(b))
                .unwrap_or(u128::MAX)
        };
        if estimate > options.cap {
            return Err(StrategyError::SpaceTooLarge {
                estimate,
                cap: options.cap,
            });
        }
        Ok(DeviationSpace {
            groups,
            budget,
            single_group: options.single_group,
            exhaustive: !options.single_group,
        })
    }

    /// Visits candidate ballots in the deterministic search order until
    /// `visit` returns `false`. Group 0 varies fastest.
    pub fn for_each(&self, truthful: &Vote, visit: &mut dyn FnMut(&Vote) -> bool) {
        if self.single_group {
            for (gid, cands) in &self.groups {
                let rest: u64 = truthful
                    .entries
                    .iter()
                    .filter(|(g, _)| *g != gid)
                    .map(|(_, e)| e.funds)
                    .sum();
                for c in cands {
                    if c.as_ref().map_or(0, |e| e.funds) + rest > self.budget {
                        continue;
                    }
                    let mut v = truthful.clone();
                    match c {
                        Some(e) => v.entries.insert(*gid, e.clone()),
                        None => v.entries.remove(gid),
                    };
                    if !visit(&v) {
                        return;
                    }
                }
            }
            return;
        }
        let mut vote = Vote {
            voter: truthful.voter,
            weight: truthful.weight,
            entries: Default::default(),
        };
        self.walk(self.groups.len(), 0, &mut vote, visit);
    }

    /// Fixes groups `g-1`, `g-2`, ... in turn; the last group is the outermost loop.
    fn walk(
        &self,
        g: usize,
        spent: u64,
        vote: &mut Vote,
        visit: &mut dyn FnMut(&Vote) -> bool,
    ) -> bool {
        if g == 0 {
            return visit(vote);
        }
        let (gid, cands) = &self.groups[g - 1];
        for c in cands {
            let funds = c.as_ref().map_or(0, |e| e.funds);
            if spent + funds > self.budget {
                continue;
            }
            match c {
                Some(e) => vote.entries.insert(*gid, e.clone()),
                None => vote.entries.remove(gid),
            };
            if !self.walk(g - 1, spent + funds, vote, visit) {
                return false;
            }
        }
        vote.entries.remove(gid);
        true
    }
}

/// `size`-subsets of `items` in lexicographic order.
fn combinations(items: &[ProjectId], size: usize) -> Vec<Vec<ProjectId>> {
    let n = items.len();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..size).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        let mut i = size;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] < n - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_are_lexicographic() {
        let items: Vec<ProjectId> = (1..=4).map(ProjectId).collect();
        let got: Vec<Vec<u32>> = combinations(&items, 2)
            .into_iter()
            .map(|c| c.into_iter().map(|p| p.0).collect())
            .collect();
        assert_eq!(
            got,
            vec![
                vec![1, 2],
                vec![1, 3],
                vec![1, 4],
                vec![2, 3],
                vec![2, 4],
                vec![3, 4]
            ]
        );
    }
}
