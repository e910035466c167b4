use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::model::{BundleKey, BundleRule, CompiledProfile, GroupId, Instance, ProjectId, Vote};

use super::{compile, mask_key, prefer, SolveError, SolverConfig};

/// A DP cell: the best bundle found for one exact spend level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Cell {
    pub welfare: u64,
    pub key: BundleKey,
}

impl Cell {
    pub fn empty(instance: &Instance) -> Self {
        Cell {
            welfare: 0,
            key: BundleKey::empty(instance.projects().len()),
        }
    }

    pub fn beats(&self, other: &Cell, rule: &BundleRule) -> bool {
        prefer(rule, self.welfare, &self.key, other.welfare, &other.key) == Ordering::Greater
    }

    pub fn join(&self, other: &Cell) -> Cell {
        let mut key = self.key.clone();
        key.union_with(&other.key);
        Cell {
            welfare: self.welfare + other.welfare,
            key,
        }
    }
}

/// Keeps `cand` in `slot` when it is better than what is there.
pub(crate) fn offer(slot: &mut Option<Cell>, cand: Cell, rule: &BundleRule) {
    match slot {
        Some(cur) if !cand.beats(cur, rule) => {}
        _ => *slot = Some(cand),
    }
}

/// Best subsets of one group, by spend.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupTable {
    group: GroupId,
    rule: BundleRule,
    /// Project ids in priority order; bundle keys index into this.
    by_rank: Vec<ProjectId>,
    pub(crate) exact: Vec<Option<Cell>>,
}

impl GroupTable {
    pub fn build(
        instance: &Instance,
        votes: &[Vote],
        group: GroupId,
        config: &SolverConfig,
    ) -> Result<GroupTable, SolveError> {
        let g = instance
            .group_index(group)
            .ok_or_else(|| crate::model::ModelError::UnknownId(group.to_string()))?;
        let profile = compile(instance, votes);
        let exact = exact_table(instance, &profile, g, config.smax_cap)?;
        Ok(GroupTable::from_cells(instance, group, exact))
    }

    pub(crate) fn from_cells(
        instance: &Instance,
        group: GroupId,
        exact: Vec<Option<Cell>>,
    ) -> Self {
        GroupTable {
            group,
            rule: instance.tiebreak().bundle_rule.clone(),
            by_rank: (0..instance.projects().len())
                .map(|r| instance.projects()[instance.project_at_rank(r)].id)
                .collect(),
            exact,
        }
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    /// Largest spend level in the table.
    pub fn max_spend(&self) -> u64 {
        self.exact.len() as u64 - 1
    }

    /// Best subset costing exactly `b`, if any subset does.
    pub fn exact(&self, b: u64) -> Option<(BTreeSet<ProjectId>, u64)> {
        self.exact
            .get(b as usize)
            .and_then(|c| c.as_ref())
            .map(|c| (self.ids(&c.key), c.welfare))
    }

    /// Best subset costing at most `b`.
    pub fn at_most(&self, b: u64) -> (BTreeSet<ProjectId>, u64) {
        let mut best: Option<&Cell> = None;
        for c in self.exact.iter().take(b as usize + 1).flatten() {
            if best.is_none_or(|cur| c.beats(cur, &self.rule)) {
                best = Some(c);
            }
        }
        let best = best.expect("the empty subset always fits");
        (self.ids(&best.key), best.welfare)
    }

    fn ids(&self, key: &BundleKey) -> BTreeSet<ProjectId> {
        key.ranks.ranks().map(|r| self.by_rank[r]).collect()
    }
}

/// Best subset of `group` costing at most `b` under full utility semantics.
pub fn best_group_subset(
    instance: &Instance,
    votes: &[Vote],
    group: GroupId,
    b: u64,
    config: &SolverConfig,
) -> Result<(BTreeSet<ProjectId>, u64), SolveError> {
    Ok(GroupTable::build(instance, votes, group, config)?.at_most(b))
}

/// Hard ceiling on group size regardless of configuration (tables are `2^s` long).
pub(crate) const MAX_SCAN_BITS: usize = 26;

/// Scans every subset of group `g` and keeps the best per exact spend.
pub(crate) fn exact_table(
    instance: &Instance,
    profile: &CompiledProfile,
    g: usize,
    cap: usize,
) -> Result<Vec<Option<Cell>>, SolveError> {
    let group = &instance.groups()[g];
    let members = instance.members_of_group(g);
    let s = members.len();
    if s > cap.min(MAX_SCAN_BITS) {
        return Err(SolveError::GroupTooLarge {
            group: group.id,
            size: s,
            cap,
        });
    }
    let rule = &instance.tiebreak().bundle_rule;
    let budget = instance.budget();
    let total: u64 = members.iter().map(|&p| instance.cost_of(p)).sum();
    let width = budget.min(total) as usize + 1;
    let limit = group.kind.selection_cap().unwrap_or(s);

    // Local bit i is members[i]; the lex code puts higher priority in higher bits.
    let mut by_rank: Vec<usize> = (0..s).collect();
    by_rank.sort_by_key(|&i| instance.rank_of(members[i]));
    let mut lex_bit = vec![0u64; s];
    for (pos, &i) in by_rank.iter().enumerate() {
        lex_bit[i] = 1 << (s - 1 - pos);
    }
    let local = |p: usize| members.iter().position(|&q| q == p).unwrap();
    let ballots: Vec<(u64, u64, u64, bool)> = profile.by_group[g]
        .iter()
        .map(|b| {
            let am = b.approvals.iter().fold(0u64, |m, &p| m | 1 << local(p));
            (b.weight, b.funds, am, b.complement)
        })
        .collect();

    let n = 1usize << s;
    let mut cost = vec![0u64; n];
    let mut lex = vec![0u64; n];
    let mut isum = vec![0u64; n];
    for mask in 1..n {
        let low = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        cost[mask] = cost[rest] + instance.cost_of(members[low]);
        lex[mask] = lex[rest] | lex_bit[low];
        isum[mask] = isum[rest] + instance.projects()[members[low]].id.0 as u64;
    }

    // (welfare, mask) per spend level.
    let mut best: Vec<Option<(u64, usize)>> = vec![None; width];
    for mask in 0..n {
        if cost[mask] as usize >= width || (mask.count_ones() as usize) > limit {
            continue;
        }
        let m = mask as u64;
        let welfare: u64 = ballots
            .iter()
            .map(|&(w, f, am, comp)| {
                if comp && m & am != am {
                    0
                } else {
                    w * cost[(m & am) as usize].min(f)
                }
            })
            .sum();
        let slot = &mut best[cost[mask] as usize];
        let better = match *slot {
            None => true,
            Some((bw, bm)) => match welfare.cmp(&bw) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    let lex_cmp = lex[mask].cmp(&lex[bm]);
                    let ord = match rule {
                        BundleRule::IndexSum => isum[bm].cmp(&isum[mask]).then(lex_cmp),
                        _ => lex_cmp,
                    };
                    ord == Ordering::Greater
                }
            },
        };
        if better {
            *slot = Some((welfare, mask));
        }
    }

    Ok(best
        .into_iter()
        .map(|c| {
            c.map(|(welfare, mask)| {
                let mut sel = vec![false; instance.projects().len()];
                for (i, &p) in members.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        sel[p] = true;
                    }
                }
                Cell {
                    welfare,
                    key: mask_key(instance, &sel),
                }
            })
        })
        .collect())
}
