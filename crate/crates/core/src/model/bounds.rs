use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::error::ModelError;
use super::ids::LabelId;
use super::instance::Instance;

/// Per-label funding bounds tightened by the bounds of the whole subtree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EffectiveBounds {
    pub bounds: BTreeMap<LabelId, (u64, u64)>,
}

impl EffectiveBounds {
    pub fn get(&self, label: LabelId) -> Option<(u64, u64)> {
        self.bounds.get(&label).copied()
    }

    pub fn min(&self, label: LabelId) -> u64 {
        self.bounds[&label].0
    }

    pub fn max(&self, label: LabelId) -> u64 {
        self.bounds[&label].1
    }
}

/// Bottom-up tightening over the label tree.
///
/// A leaf keeps its declared bounds. An internal node's lower bound is at
/// least the sum of its children's lower bounds and its upper bound at most
/// the sum of their upper bounds; groups attached directly to an internal
/// node count as children bounded by `(0, B)`. Instances whose labels are not
/// laminar get their declared bounds unchanged.
pub fn effective_bounds(instance: &Instance) -> Result<EffectiveBounds, ModelError> {
    let labels = instance.labels();
    let mut tight = vec![(0u64, 0u64); labels.len()];
    if !instance.is_laminar() {
        for (i, l) in labels.iter().enumerate() {
            tight[i] = (l.b_min, l.b_max);
        }
    } else {
        for &l in instance.reverse_label_order() {
            let node = &labels[l];
            let children = instance.children_of_label(l);
            let (lo, hi) = if children.is_empty() {
                (node.b_min, node.b_max)
            } else {
                let mut lo = 0u64;
                let mut hi = 0u64;
                for &c in children {
                    lo += tight[c].0;
                    hi += tight[c].1;
                }
                hi += instance.budget() * instance.groups_at_label(l).len() as u64;
                (lo.max(node.b_min), hi.min(node.b_max))
            };
            if lo > hi {
                return Err(ModelError::Infeasible(node.id));
            }
            tight[l] = (lo, hi);
        }
    }
    let root = instance.root_index();
    if tight[root].0 > instance.budget() {
        return Err(ModelError::Infeasible(labels[root].id));
    }
    Ok(EffectiveBounds {
        bounds: labels.iter().zip(tight).map(|(l, b)| (l.id, b)).collect(),
    })
}

/// True iff some outcome meets the budget, every label's bounds, and every
/// contradictory cap.
///
/// Laminar instances are decided exactly by per-label sets of reachable spend
/// levels (pseudo-polynomial in the budget); other label families fall back
/// to searching subsets.
pub fn check_feasibility(instance: &Instance) -> bool {
    if !instance.is_laminar() {
        return crate::oracle::first_feasible(instance).is_some();
    }
    if effective_bounds(instance).is_err() {
        return false;
    }
    let reach = label_reach(instance, instance.root_index());
    reach.iter().any(|&r| r)
}

fn label_reach(instance: &Instance, l: usize) -> Vec<bool> {
    let width = instance.budget() as usize + 1;
    let mut acc = vec![false; width];
    acc[0] = true;
    for &c in instance.children_of_label(l) {
        acc = sumset(&acc, &label_reach(instance, c));
    }
    for &g in instance.groups_at_label(l) {
        acc = sumset(&acc, &group_reach(instance, g, width));
    }
    let node = &instance.labels()[l];
    for (b, slot) in acc.iter_mut().enumerate() {
        if (b as u64) < node.b_min || (b as u64) > node.b_max {
            *slot = false;
        }
    }
    acc
}

/// Spend levels reachable by subsets of one group (respecting its cap).
pub(crate) fn group_reach(instance: &Instance, g: usize, width: usize) -> Vec<bool> {
    let members = instance.members_of_group(g);
    let cap = instance.groups()[g]
        .kind
        .selection_cap()
        .unwrap_or(members.len())
        .min(members.len());
    // reach[c][b]: some subset of exactly c projects costs b.
    let mut reach = vec![vec![false; width]; cap + 1];
    reach[0][0] = true;
    for &p in members {
        let cost = instance.cost_of(p) as usize;
        for c in (0..cap).rev() {
            for b in (0..width.saturating_sub(cost)).rev() {
                if reach[c][b] {
                    reach[c + 1][b + cost] = true;
                }
            }
        }
    }
    (0..width).map(|b| reach.iter().any(|row| row[b])).collect()
}

fn sumset(a: &[bool], b: &[bool]) -> Vec<bool> {
    let mut out = vec![false; a.len()];
    for (i, _) in a.iter().enumerate().filter(|(_, &x)| x) {
        for (j, _) in b.iter().enumerate().take(a.len() - i).filter(|(_, &y)| y) {
            out[i + j] = true;
        }
    }
    out
}
