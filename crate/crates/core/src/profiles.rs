//! Recognizes profiles for which greedy aggregation is optimal.
//!
//! A group is compliant when it is contradictory, when every ballot funds
//! exactly the cost of its approvals ("independent"), or when its projects
//! split into subgroups, each with a strict order, such that every ballot
//! approves a prefix of one subgroup's order ("substitute chains"). Any
//! complement flag makes the profile non-compliant.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{CompiledProfile, GroupId, Instance, ProjectId, Vote, VoterId};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum GroupVerdict {
    Contradictory,
    Independent,
    /// Each chain lists a subgroup from most to least preferred.
    SubstituteChains {
        chains: Vec<Vec<ProjectId>>,
    },
    NonCompliant {
        reason: String,
    },
}

impl GroupVerdict {
    pub fn is_compliant(&self) -> bool {
        !matches!(self, GroupVerdict::NonCompliant { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupCompliance {
    pub group: GroupId,
    #[serde(flatten)]
    pub verdict: GroupVerdict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplianceReport {
    pub compliant: bool,
    pub complements: bool,
    pub groups: Vec<GroupCompliance>,
    /// Voters whose removal makes the profile compliant (empty when it already is).
    pub deviant_voters: Vec<VoterId>,
    /// Smallest witnessed deviant count; `None` when no witness was found.
    pub compliant_with_k_deviants: Option<usize>,
}

impl ComplianceReport {
    /// Compliant after removing at most `k` witnessed deviants.
    pub fn certified_with(&self, k: usize) -> bool {
        self.compliant_with_k_deviants.is_some_and(|d| d <= k)
    }

    pub fn verdict(&self, group: GroupId) -> Option<&GroupVerdict> {
        self.groups
            .iter()
            .find(|g| g.group == group)
            .map(|g| &g.verdict)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let head = if self.compliant {
            "compliant".to_string()
        } else if self.certified_with(usize::MAX) {
            let ids: Vec<String> = self.deviant_voters.iter().map(|v| v.to_string()).collect();
            format!("compliant after removing {}", ids.join(","))
        } else {
            "not compliant".to_string()
        };
        let _ = writeln!(out, "compliance: {head}");
        for g in &self.groups {
            let text = match &g.verdict {
                GroupVerdict::Contradictory => "contradictory".to_string(),
                GroupVerdict::Independent => "independent".to_string(),
                GroupVerdict::SubstituteChains { chains } => {
                    let parts: Vec<String> = chains
                        .iter()
                        .map(|c| {
                            let ids: Vec<String> = c.iter().map(|p| p.to_string()).collect();
                            format!("[{}]", ids.join(">"))
                        })
                        .collect();
                    format!("substitute chains {}", parts.join(" "))
                }
                GroupVerdict::NonCompliant { reason } => format!("non-compliant: {reason}"),
            };
            let _ = writeln!(out, "  {}: {text}", g.group);
        }
        out
    }
}

/// Per-group verdicts plus a single-deviant witness search.
pub fn classify(instance: &Instance, votes: &[Vote]) -> ComplianceReport {
    let profile = CompiledProfile::new(instance, votes);
    classify_compiled(instance, votes, &profile)
}

pub(crate) fn classify_compiled(
    instance: &Instance,
    votes: &[Vote],
    profile: &CompiledProfile,
) -> ComplianceReport {
    let keep = vec![true; votes.len()];
    let groups = verdicts(instance, votes, profile, &keep);
    let compliant = groups.iter().all(|g| g.verdict.is_compliant());
    let deviant_voters = if compliant {
        Vec::new()
    } else {
        witness(instance, votes, profile, 1)
    };
    let compliant_with_k_deviants = if compliant {
        Some(0)
    } else if deviant_voters.is_empty() {
        None
    } else {
        Some(deviant_voters.len())
    };
    ComplianceReport {
        compliant,
        complements: votes.iter().any(Vote::has_complement),
        groups,
        deviant_voters,
        compliant_with_k_deviants,
    }
}

/// Searches voter subsets of size `1..=max_deviants`, in ascending voter-id
/// order, for one whose removal makes the profile compliant.
pub fn deviant_witness(instance: &Instance, votes: &[Vote], max_deviants: usize) -> Vec<VoterId> {
    let profile = CompiledProfile::new(instance, votes);
    let keep = vec![true; votes.len()];
    if verdicts(instance, votes, &profile, &keep)
        .iter()
        .all(|g| g.verdict.is_compliant())
    {
        return Vec::new();
    }
    witness(instance, votes, &profile, max_deviants)
}

fn witness(
    instance: &Instance,
    votes: &[Vote],
    profile: &CompiledProfile,
    max_deviants: usize,
) -> Vec<VoterId> {
    let mut order: Vec<usize> = (0..votes.len()).collect();
    order.sort_by_key(|&i| votes[i].voter);
    for size in 1..=max_deviants.min(votes.len()) {
        let mut pick: Vec<usize> = (0..size).collect();
        loop {
            let mut keep = vec![true; votes.len()];
            for &i in &pick {
                keep[order[i]] = false;
            }
            if verdicts(instance, votes, profile, &keep)
                .iter()
                .all(|g| g.verdict.is_compliant())
            {
                return pick.iter().map(|&i| votes[order[i]].voter).collect();
            }
            if !next_combination(&mut pick, votes.len()) {
                break;
            }
        }
    }
    Vec::new()
}

fn next_combination(pick: &mut [usize], n: usize) -> bool {
    let k = pick.len();
    for i in (0..k).rev() {
        if pick[i] < n - k + i {
            pick[i] += 1;
            for j in i + 1..k {
                pick[j] = pick[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn verdicts(
    instance: &Instance,
    votes: &[Vote],
    profile: &CompiledProfile,
    keep: &[bool],
) -> Vec<GroupCompliance> {
    instance
        .groups()
        .iter()
        .enumerate()
        .map(|(g, group)| GroupCompliance {
            group: group.id,
            verdict: group_verdict(instance, votes, profile, keep, g),
        })
        .collect()
}

fn group_verdict(
    instance: &Instance,
    votes: &[Vote],
    profile: &CompiledProfile,
    keep: &[bool],
    g: usize,
) -> GroupVerdict {
    if instance.groups()[g].kind.is_contradictory() {
        return GroupVerdict::Contradictory;
    }
    let ballots: Vec<_> = profile.by_group[g]
        .iter()
        .filter(|b| keep[b.voter])
        .collect();
    if let Some(b) = ballots.iter().find(|b| b.complement) {
        return GroupVerdict::NonCompliant {
            reason: format!(
                "{} marks its approvals as complements",
                votes[b.voter].voter
            ),
        };
    }
    if ballots.iter().all(|b| {
        let cost: u64 = b.approvals.iter().map(|&p| instance.cost_of(p)).sum();
        b.funds == cost
    }) {
        return GroupVerdict::Independent;
    }

    let members = instance.members_of_group(g);
    let local = |p: usize| members.iter().position(|&q| q == p).unwrap();
    let mut parent: Vec<usize> = (0..members.len()).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = x;
        while parent[c] != r {
            let n = parent[c];
            parent[c] = r;
            c = n;
        }
        r
    }
    let sets: BTreeSet<Vec<usize>> = ballots
        .iter()
        .map(|b| b.approvals.iter().map(|&p| local(p)).collect())
        .collect();
    for set in &sets {
        for w in set.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a] = b;
        }
    }
    let mut components: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..members.len() {
        let r = find(&mut parent, i);
        components.entry(r).or_default().push(i);
    }

    let mut chains = Vec::new();
    for comp in components.values() {
        let comp_sets: Vec<&Vec<usize>> = sets.iter().filter(|s| comp.contains(&s[0])).collect();
        let mut by_size = comp_sets.clone();
        by_size.sort_by_key(|s| s.len());
        for w in by_size.windows(2) {
            if w[0].len() == w[1].len() || !w[0].iter().all(|x| w[1].contains(x)) {
                let show = |s: &Vec<usize>| {
                    let ids: Vec<String> = s
                        .iter()
                        .map(|&i| instance.projects()[members[i]].id.to_string())
                        .collect();
                    format!("{{{}}}", ids.join(","))
                };
                return GroupVerdict::NonCompliant {
                    reason: format!(
                        "approval sets {} and {} are not nested",
                        show(w[0]),
                        show(w[1])
                    ),
                };
            }
        }
        let mut order = comp.clone();
        let depth = |i: usize| comp_sets.iter().filter(|s| s.contains(&i)).count();
        order.sort_by_key(|&i| (std::cmp::Reverse(depth(i)), instance.rank_of(members[i])));
        chains.push(
            order
                .into_iter()
                .map(|i| instance.projects()[members[i]].id)
                .collect::<Vec<_>>(),
        );
    }
    chains.sort();
    GroupVerdict::SubstituteChains { chains }
}

/// True when every ballot's approvals in the group equal a prefix of one chain.
pub fn chains_certify(votes: &[Vote], group: GroupId, chains: &[Vec<ProjectId>]) -> bool {
    votes.iter().all(|v| match v.entry(group) {
        None => true,
        Some(e) if e.funds == 0 || e.approvals.is_empty() => true,
        Some(e) => chains.iter().any(|c| {
            e.approvals.len() <= c.len()
                && c[..e.approvals.len()]
                    .iter()
                    .all(|p| e.approvals.contains(p))
        }),
    })
}
