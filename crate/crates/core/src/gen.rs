//! Seeded random instances and profiles for property tests.
//!
//! Everything is a pure function of the parameters, seed included.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{
    check_feasibility, validate_instance, EntryRecord, GroupId, GroupKindRecord, GroupRecord,
    Instance, InstanceFile, LabelId, LabelRecord, ProjectId, ProjectRecord, TieBreakPolicy,
    VoteRecord, VoterId,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    /// Arbitrary valid ballots; complement flags with `complement_prob`.
    General,
    /// Independent or substitute-chain ballots over hidden per-group structure.
    Def3,
    /// `Def3` plus one arbitrary ballot without complement flags.
    Def3WithDeviant,
    /// Every group holds a single project; ballots as in `General` without complements.
    SingletonGroups,
    /// `General` with at least one complement flag.
    WithComplements,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub seed: u64,
    /// Inclusive ranges.
    pub projects: (usize, usize),
    pub voters: (usize, usize),
    pub budget: (u64, u64),
    pub cost: (u64, u64),
    pub max_group_size: usize,
    pub tree_depth: (usize, usize),
    pub branching: (usize, usize),
    /// Probability that a label carries a non-trivial bound.
    pub bound_tightness: f64,
    pub contradictory_prob: f64,
    pub complement_prob: f64,
    pub max_weight: u64,
    /// Probability that a ballot copies an earlier one.
    pub duplicate_prob: f64,
    pub kind: ProfileKind,
    pub attempts: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            seed: 0,
            projects: (3, 8),
            voters: (2, 5),
            budget: (2, 5),
            cost: (1, 1),
            max_group_size: 3,
            tree_depth: (0, 2),
            branching: (2, 3),
            bound_tightness: 0.4,
            contradictory_prob: 0.2,
            complement_prob: 0.0,
            max_weight: 1,
            duplicate_prob: 0.0,
            kind: ProfileKind::General,
            attempts: 200,
        }
    }
}

impl GenParams {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("no feasible instance after {0} attempts")]
    GenerationFailed(usize),
}

/// Ground truth behind a generated group's ballots.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "structure", rename_all = "kebab-case")]
pub enum HiddenStructure {
    Contradictory,
    Independent,
    Chains { chains: Vec<Vec<ProjectId>> },
    Unstructured,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratedProfile {
    pub votes: Vec<VoteRecord>,
    pub hidden: BTreeMap<GroupId, HiddenStructure>,
}

fn pick<R: Rng>(rng: &mut R, (lo, hi): (usize, usize)) -> usize {
    rng.gen_range(lo..=hi.max(lo))
}

pub fn gen_instance(params: &GenParams) -> Result<Instance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    for _ in 0..params.attempts.max(1) {
        let file = draw_instance(params, &mut rng);
        if let Ok(inst) = validate_instance(&file) {
            if check_feasibility(&inst) {
                return Ok(inst);
            }
        }
    }
    Err(GenError::GenerationFailed(params.attempts))
}

fn draw_instance(params: &GenParams, rng: &mut ChaCha8Rng) -> InstanceFile {
    let m = pick(rng, params.projects).max(1);
    let singleton = params.kind == ProfileKind::SingletonGroups;
    let max_size = if singleton {
        1
    } else {
        params.max_group_size.max(1)
    };
    let min_groups = m.div_ceil(max_size);
    let r = if singleton {
        m
    } else {
        rng.gen_range(min_groups..=m)
    };

    // Every group gets one project, the rest go to groups with room.
    let mut sizes = vec![1usize; r];
    for _ in r..m {
        let open: Vec<usize> = (0..r).filter(|&g| sizes[g] < max_size).collect();
        sizes[*open.choose(rng).unwrap()] += 1;
    }
    let mut projects = Vec::with_capacity(m);
    let mut next = 1u32;
    for (g, &size) in sizes.iter().enumerate() {
        for _ in 0..size {
            projects.push(ProjectRecord {
                id: ProjectId(next),
                name: format!("project {next}"),
                cost: rng.gen_range(params.cost.0..=params.cost.1.max(params.cost.0)) as i64,
                group: GroupId(g as u32 + 1),
            });
            next += 1;
        }
    }
    let budget = rng
        .gen_range(params.budget.0..=params.budget.1.max(params.budget.0))
        .max(1);

    // Label tree, top-down over contiguous runs of groups.
    let depth = pick(rng, params.tree_depth);
    let mut labels = vec![LabelRecord {
        id: LabelId(0),
        parent: None,
        min: 0,
        max: Some(budget),
    }];
    let mut leaf_of = vec![LabelId(0); r];
    let mut frontier: Vec<(LabelId, Vec<usize>, usize)> = vec![(LabelId(0), (0..r).collect(), 0)];
    while let Some((id, members, level)) = frontier.pop() {
        if level >= depth || members.len() < 2 {
            for &g in &members {
                leaf_of[g] = id;
            }
            continue;
        }
        let k = pick(rng, params.branching).clamp(2, members.len());
        let mut cuts: Vec<usize> = (1..members.len()).collect();
        cuts.shuffle(rng);
        let mut cuts: Vec<usize> = cuts.into_iter().take(k - 1).collect();
        cuts.sort();
        let mut start = 0;
        for end in cuts.into_iter().chain(std::iter::once(members.len())) {
            let child = LabelId(labels.len() as u32);
            labels.push(LabelRecord {
                id: child,
                parent: Some(id),
                min: 0,
                max: None,
            });
            frontier.push((child, members[start..end].to_vec(), level + 1));
            start = end;
        }
    }

    // Bounds, sized by what each label could possibly spend.
    let mut capacity = vec![0u64; labels.len()];
    for (g, &leaf) in leaf_of.iter().enumerate() {
        let spend: u64 = projects
            .iter()
            .filter(|p| p.group.0 as usize == g + 1)
            .map(|p| p.cost as u64)
            .sum();
        let mut cur = Some(leaf);
        while let Some(l) = cur {
            capacity[l.0 as usize] += spend;
            cur = labels[l.0 as usize].parent;
        }
    }
    for (i, l) in labels.iter_mut().enumerate() {
        if !rng.gen_bool(params.bound_tightness.clamp(0.0, 1.0)) {
            continue;
        }
        let cap = capacity[i].min(budget);
        let lo = rng.gen_range(0..=cap / 2);
        let hi = rng.gen_range(lo..=cap);
        l.min = lo;
        l.max = Some(if i == 0 { budget } else { hi.max(lo) });
        if i == 0 {
            l.min = lo.min(budget);
        }
    }

    let groups = sizes
        .iter()
        .enumerate()
        .map(|(g, &size)| {
            let contradictory = size >= 2
                && !(params.kind == ProfileKind::WithComplements && g == 0)
                && rng.gen_bool(params.contradictory_prob.clamp(0.0, 1.0));
            GroupRecord {
                id: GroupId(g as u32 + 1),
                kind: if contradictory {
                    GroupKindRecord::Contradictory
                } else {
                    GroupKindRecord::Standard
                },
                max_approvals: contradictory.then(|| rng.gen_range(1..size) as u32),
                label_leaf: Some(leaf_of[g]),
                extra_labels: Vec::new(),
            }
        })
        .collect();

    InstanceFile {
        budget,
        projects,
        groups,
        labels,
        tiebreak: TieBreakPolicy::default(),
    }
}

/// Ballots for `instance`; draws from a stream independent of `gen_instance`.
pub fn gen_profile(instance: &Instance, params: &GenParams) -> GeneratedProfile {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    rng.set_stream(1);
    let n = pick(&mut rng, params.voters).max(1);
    let def3 = matches!(
        params.kind,
        ProfileKind::Def3 | ProfileKind::Def3WithDeviant
    );

    let mut hidden = BTreeMap::new();
    for g in instance.groups() {
        let h = if g.kind.is_contradictory() {
            HiddenStructure::Contradictory
        } else if !def3 {
            HiddenStructure::Unstructured
        } else if rng.gen_bool(0.5) {
            HiddenStructure::Independent
        } else {
            let mut order = g.projects.clone();
            order.shuffle(&mut rng);
            let parts = rng.gen_range(1..=order.len());
            let mut cuts: Vec<usize> = (1..order.len()).collect();
            cuts.shuffle(&mut rng);
            let mut cuts: Vec<usize> = cuts.into_iter().take(parts - 1).collect();
            cuts.sort();
            let mut chains = Vec::new();
            let mut start = 0;
            for end in cuts.into_iter().chain(std::iter::once(order.len())) {
                chains.push(order[start..end].to_vec());
                start = end;
            }
            HiddenStructure::Chains { chains }
        };
        hidden.insert(g.id, h);
    }

    let mut votes: Vec<VoteRecord> = Vec::with_capacity(n + 1);
    for v in 0..n {
        let voter = VoterId(v as u32 + 1);
        if v > 0 && rng.gen_bool(params.duplicate_prob.clamp(0.0, 1.0)) {
            let mut copy = votes[rng.gen_range(0..v)].clone();
            copy.voter = voter;
            votes.push(copy);
            continue;
        }
        let weight = rng.gen_range(1..=params.max_weight.max(1));
        let entries = if def3 {
            structured_ballot(instance, &hidden, &mut rng)
        } else {
            let comp = match params.kind {
                ProfileKind::SingletonGroups => 0.0,
                _ => params.complement_prob,
            };
            free_ballot(instance, comp, &mut rng)
        };
        votes.push(VoteRecord {
            voter,
            weight,
            entries,
        });
    }

    if params.kind == ProfileKind::Def3WithDeviant {
        let voter = VoterId(n as u32 + 1);
        let entries = free_ballot(instance, 0.0, &mut rng);
        votes.push(VoteRecord {
            voter,
            weight: rng.gen_range(1..=params.max_weight.max(1)),
            entries,
        });
    }
    if params.kind == ProfileKind::WithComplements
        && !votes
            .iter()
            .any(|v| v.entries.values().any(|e| e.complement && e.funds > 0))
    {
        force_complement(instance, &mut votes[0], &mut rng);
    }
    GeneratedProfile { votes, hidden }
}

fn cost_of(instance: &Instance, set: &[ProjectId]) -> u64 {
    set.iter().map(|&p| instance.project(p).unwrap().cost).sum()
}

fn random_subset(rng: &mut ChaCha8Rng, items: &[ProjectId], max: usize) -> Vec<ProjectId> {
    let k = rng.gen_range(1..=max.min(items.len()).max(1));
    let mut v: Vec<ProjectId> = items.choose_multiple(rng, k).copied().collect();
    v.sort();
    v
}

fn group_order(instance: &Instance, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut order: Vec<usize> = (0..instance.groups().len()).collect();
    order.shuffle(rng);
    order
}

fn free_ballot(
    instance: &Instance,
    complement_prob: f64,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<GroupId, EntryRecord> {
    let mut left = instance.budget();
    let mut entries = BTreeMap::new();
    for gi in group_order(instance, rng) {
        let g = &instance.groups()[gi];
        if left == 0 || rng.gen_bool(0.35) {
            continue;
        }
        let cap = g.kind.selection_cap().unwrap_or(g.projects.len());
        let s = random_subset(rng, &g.projects, cap);
        let top = (cost_of(instance, &s) + 1).min(left);
        let funds = rng.gen_range(1..=top);
        left -= funds;
        let complement =
            !g.kind.is_contradictory() && rng.gen_bool(complement_prob.clamp(0.0, 1.0));
        entries.insert(
            g.id,
            EntryRecord {
                funds: funds as i64,
                approvals: s,
                complement,
            },
        );
    }
    entries
}

fn structured_ballot(
    instance: &Instance,
    hidden: &BTreeMap<GroupId, HiddenStructure>,
    rng: &mut ChaCha8Rng,
) -> BTreeMap<GroupId, EntryRecord> {
    let mut left = instance.budget();
    let mut entries = BTreeMap::new();
    for gi in group_order(instance, rng) {
        let g = &instance.groups()[gi];
        if left == 0 || rng.gen_bool(0.3) {
            continue;
        }
        let (approvals, funds) = match &hidden[&g.id] {
            HiddenStructure::Independent => {
                let mut s = random_subset(rng, &g.projects, g.projects.len());
                while cost_of(instance, &s) > left && s.len() > 1 {
                    s.pop();
                }
                let c = cost_of(instance, &s);
                if c > left {
                    continue;
                }
                (s, c)
            }
            HiddenStructure::Chains { chains } => {
                let chain = chains.choose(rng).unwrap();
                let len = rng.gen_range(1..=chain.len());
                let mut s = chain[..len].to_vec();
                s.sort();
                let top = cost_of(instance, &s).min(left);
                (s, rng.gen_range(1..=top))
            }
            HiddenStructure::Contradictory | HiddenStructure::Unstructured => {
                let cap = g.kind.selection_cap().unwrap_or(g.projects.len());
                let s = random_subset(rng, &g.projects, cap);
                let top = (cost_of(instance, &s) + 1).min(left);
                (s, rng.gen_range(1..=top))
            }
        };
        left -= funds;
        entries.insert(
            g.id,
            EntryRecord {
                funds: funds as i64,
                approvals,
                complement: false,
            },
        );
    }
    entries
}

fn force_complement(instance: &Instance, vote: &mut VoteRecord, rng: &mut ChaCha8Rng) {
    let Some(g) = instance
        .groups()
        .iter()
        .find(|g| !g.kind.is_contradictory())
    else {
        return;
    };
    let s = random_subset(rng, &g.projects, g.projects.len());
    let others: u64 = vote
        .entries
        .iter()
        .filter(|(id, _)| **id != g.id)
        .map(|(_, e)| e.funds as u64)
        .sum();
    if others + 1 > instance.budget() {
        vote.entries.clear();
    }
    vote.entries.insert(
        g.id,
        EntryRecord {
            funds: 1,
            approvals: s,
            complement: true,
        },
    );
}

/// True when hidden chains partition the group exactly.
pub fn hidden_partition_is_complete(
    instance: &Instance,
    hidden: &HiddenStructure,
    group: GroupId,
) -> bool {
    match hidden {
        HiddenStructure::Chains { chains } => {
            let all: BTreeSet<ProjectId> = chains.iter().flatten().copied().collect();
            let expected: BTreeSet<ProjectId> = instance
                .group(group)
                .map(|g| g.projects.iter().copied().collect())
                .unwrap_or_default();
            all == expected && chains.iter().map(Vec::len).sum::<usize>() == expected.len()
        }
        _ => true,
    }
}
