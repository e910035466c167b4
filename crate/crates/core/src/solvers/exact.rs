use rayon::prelude::*;

use crate::model::{BundleRule, CompiledProfile, Instance, Vote};

use super::table::{exact_table, offer, Cell};
use super::{
    compile, infeasible, key_mask, require_tree, resolve_custom, SolveError, SolverConfig,
};
use super::{SolverKind, TallyResult};

/// Welfare-by-spend vector of one subtree.
type Column = Vec<Option<Cell>>;

/// Exact welfare maximization by dynamic programming over the label tree.
pub fn solve_exact(
    instance: &Instance,
    votes: &[Vote],
    config: &SolverConfig,
) -> Result<TallyResult, SolveError> {
    let profile = compile(instance, votes);
    let mask = exact_mask(instance, &profile, config)?;
    Ok(TallyResult::build(
        instance,
        votes,
        &mask,
        SolverKind::ExactTreeDp,
        "label-tree dynamic program".into(),
        Vec::new(),
    ))
}

pub(crate) fn exact_mask(
    instance: &Instance,
    profile: &CompiledProfile,
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    require_tree(instance, "the exact solver")?;
    let built: Vec<Result<Column, SolveError>> = (0..instance.groups().len())
        .into_par_iter()
        .map(|g| exact_table(instance, profile, g, config.smax_cap))
        .collect();
    let tables = built.into_iter().collect::<Result<Vec<_>, _>>()?;
    let best = tree_dp(instance, &tables)?;
    let mask = key_mask(instance, &best.key);
    Ok(resolve_custom(instance, profile, best.welfare, mask))
}

/// Combines per-group tables bottom-up and reads the best root entry.
pub(crate) fn tree_dp(instance: &Instance, tables: &[Column]) -> Result<Cell, SolveError> {
    let rule = &instance.tiebreak().bundle_rule;
    let root = node_column(instance, tables, instance.root_index(), rule);
    let mut best: Option<Cell> = None;
    for cell in root.into_iter().flatten() {
        offer(&mut best, cell, rule);
    }
    best.ok_or_else(|| infeasible(instance))
}

fn node_column(instance: &Instance, tables: &[Column], l: usize, rule: &BundleRule) -> Column {
    let width = instance.budget() as usize + 1;
    let mut acc: Column = vec![None; width];
    acc[0] = Some(Cell::empty(instance));
    for &c in instance.children_of_label(l) {
        let child = node_column(instance, tables, c, rule);
        acc = convolve(&acc, &child, rule);
    }
    for &g in instance.groups_at_label(l) {
        acc = convolve(&acc, &tables[g], rule);
    }
    let node = &instance.labels()[l];
    for (b, slot) in acc.iter_mut().enumerate() {
        if (b as u64) < node.b_min || (b as u64) > node.b_max {
            *slot = None;
        }
    }
    acc
}

/// Max-plus convolution truncated at the width of `a`.
fn convolve(a: &[Option<Cell>], b: &[Option<Cell>], rule: &BundleRule) -> Column {
    let mut out: Column = vec![None; a.len()];
    for (i, x) in a.iter().enumerate() {
        let Some(x) = x else { continue };
        for (j, y) in b.iter().enumerate().take(a.len() - i) {
            let Some(y) = y else { continue };
            offer(&mut out[i + j], x.join(y), rule);
        }
    }
    out
}
