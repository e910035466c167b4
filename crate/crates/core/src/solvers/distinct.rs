use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::model::{Ballot, CompiledProfile, Instance, Vote, VoteEntry};

use super::exact::tree_dp;
use super::table::{offer, Cell};
use super::{compile, key_mask, mask_key, require_tree, require_unit_cost, resolve_custom};
use super::{SolveError, SolverConfig, SolverKind, TallyResult};

/// Exact solver for unit-cost instances whose profile has few distinct
/// ballots. Identical ballots are merged into one weighted ballot; each group
/// table is filled by enumerating which complement ballots get their whole
/// approval set funded, then splitting the rest of the spend across classes
/// of projects that the remaining ballots approve identically.
pub fn solve_distinct_votes(
    instance: &Instance,
    votes: &[Vote],
    config: &SolverConfig,
) -> Result<TallyResult, SolveError> {
    let mask = distinct_mask(instance, votes, config)?;
    Ok(TallyResult::build(
        instance,
        votes,
        &mask,
        SolverKind::DistinctVotes,
        "case analysis over distinct ballots".into(),
        Vec::new(),
    ))
}

/// Identical ballots merged, summing weights; first occurrence keeps its id.
pub(crate) fn merge_identical(votes: &[Vote]) -> Vec<Vote> {
    let mut merged: BTreeMap<&BTreeMap<crate::model::GroupId, VoteEntry>, usize> = BTreeMap::new();
    let mut out: Vec<Vote> = Vec::new();
    for v in votes {
        match merged.get(&v.entries) {
            Some(&i) => out[i].weight += v.weight,
            None => {
                merged.insert(&v.entries, out.len());
                out.push(v.clone());
            }
        }
    }
    out
}

pub(crate) fn distinct_mask(
    instance: &Instance,
    votes: &[Vote],
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    require_unit_cost(instance)?;
    require_tree(instance, "the distinct-votes solver")?;
    let merged = merge_identical(votes);
    if merged.len() > config.distinct_cap {
        return Err(SolveError::TooManyDistinctVotes {
            count: merged.len(),
            cap: config.distinct_cap,
        });
    }
    let profile = compile(instance, &merged);
    let tables: Vec<Vec<Option<Cell>>> = (0..instance.groups().len())
        .into_par_iter()
        .map(|g| case_table(instance, &profile, g))
        .collect();
    let best = tree_dp(instance, &tables)?;
    let mask = key_mask(instance, &best.key);
    Ok(resolve_custom(
        instance,
        &compile(instance, votes),
        best.welfare,
        mask,
    ))
}

fn case_table(instance: &Instance, profile: &CompiledProfile, g: usize) -> Vec<Option<Cell>> {
    let rule = &instance.tiebreak().bundle_rule;
    let members = instance.members_of_group(g);
    let limit = instance.groups()[g]
        .kind
        .selection_cap()
        .unwrap_or(members.len());
    let width = (instance.budget() as usize).min(members.len()) + 1;
    let ballots = &profile.by_group[g];
    let (comp, plain): (Vec<&Ballot>, Vec<&Ballot>) = ballots.iter().partition(|b| b.complement);

    let mut table: Vec<Option<Cell>> = vec![None; width];
    for (b, slot) in table.iter_mut().enumerate() {
        if b > limit {
            continue;
        }
        for funded in 0u64..(1 << comp.len()) {
            let mut union = vec![false; instance.projects().len()];
            for (i, c) in comp.iter().enumerate() {
                if funded >> i & 1 == 1 {
                    for &p in &c.approvals {
                        union[p] = true;
                    }
                }
            }
            let fixed = members.iter().filter(|&&p| union[p]).count();
            if fixed > b {
                continue;
            }
            // Remaining projects grouped by which plain ballots approve them.
            let mut classes: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
            for &p in members.iter().filter(|&&p| !union[p]) {
                let pattern = plain
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.approvals.contains(&p))
                    .fold(0u64, |m, (i, _)| m | 1 << i);
                classes.entry(pattern).or_default().push(p);
            }
            for list in classes.values_mut() {
                list.sort_by_key(|&p| instance.rank_of(p));
            }
            let classes: Vec<(u64, Vec<usize>)> = classes.into_iter().collect();
            let base: Vec<u64> = plain
                .iter()
                .map(|s| s.approvals.iter().filter(|&&p| union[p]).count() as u64)
                .collect();
            let mut best: Option<(u64, Vec<usize>)> = None;
            let mut counts = vec![0usize; classes.len()];
            split(&classes, 0, b - fixed, &mut counts, &mut |counts| {
                let value: u64 = plain
                    .iter()
                    .enumerate()
                    .map(|(i, s)| {
                        let extra: usize = classes
                            .iter()
                            .zip(counts)
                            .filter(|((pat, _), _)| pat >> i & 1 == 1)
                            .map(|(_, &c)| c)
                            .sum();
                        s.weight * (base[i] + extra as u64).min(s.funds)
                    })
                    .sum();
                if best.as_ref().is_none_or(|(bv, _)| value > *bv) {
                    best = Some((value, counts.to_vec()));
                }
            });
            let Some((_, counts)) = best else { continue };
            let mut sel = union;
            for ((_, list), &c) in classes.iter().zip(&counts) {
                for &p in list.iter().take(c) {
                    sel[p] = true;
                }
            }
            let welfare = profile.group_welfare(instance, g, &sel);
            offer(
                slot,
                Cell {
                    welfare,
                    key: mask_key(instance, &sel),
                },
                rule,
            );
        }
    }
    table
}

/// Enumerates count vectors over classes summing to `left`, each bounded by its class size.
fn split(
    classes: &[(u64, Vec<usize>)],
    i: usize,
    left: usize,
    counts: &mut Vec<usize>,
    visit: &mut dyn FnMut(&[usize]),
) {
    if i == classes.len() {
        if left == 0 {
            visit(counts);
        }
        return;
    }
    let room: usize = classes[i..].iter().map(|(_, l)| l.len()).sum();
    if room < left {
        return;
    }
    for c in 0..=classes[i].1.len().min(left) {
        counts[i] = c;
        split(classes, i + 1, left - c, counts, visit);
    }
    counts[i] = 0;
}
