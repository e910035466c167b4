//! Aggregation: pick a feasible bundle maximizing social welfare.

mod dispatch;
mod distinct;
mod exact;
mod greedy;
mod result;
mod table;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{BundleKey, BundleRule, CompiledProfile, GroupId, Instance, ModelError, Vote};

pub use dispatch::{solve, solve_outcome};
pub use distinct::solve_distinct_votes;
pub use exact::solve_exact;
pub use greedy::solve_greedy;
pub use result::TallyResult;
pub use table::{best_group_subset, GroupTable};

pub(crate) use distinct::distinct_mask;
pub(crate) use exact::exact_mask;
pub(crate) use greedy::greedy_mask;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveMode {
    Auto,
    ForceGreedy,
    ForceExact,
    ForceDistinct,
    ForceOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    Greedy,
    ExactTreeDp,
    DistinctVotes,
    Oracle,
}

impl std::fmt::Display for SolverKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverKind::Greedy => "greedy",
            SolverKind::ExactTreeDp => "exact-tree-dp",
            SolverKind::DistinctVotes => "distinct-votes",
            SolverKind::Oracle => "oracle",
        })
    }
}

/// Capacity limits and behavior switches shared by all solvers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Largest group the subset-scanning solvers accept.
    pub smax_cap: usize,
    /// Largest number of distinct ballots the distinct-votes solver accepts.
    pub distinct_cap: usize,
    /// Largest project count the brute-force oracle accepts.
    pub oracle_cap: usize,
    /// Greedy keeps adding zero-gain projects until the budget is used.
    pub pad: bool,
    /// Oracle prunes branches that cannot become feasible.
    pub oracle_prune: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            smax_cap: 16,
            distinct_cap: 10,
            oracle_cap: 20,
            pad: true,
            oracle_prune: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("greedy and distinct-votes solvers require every project to cost 1")]
    NotUnitCost,
    #[error("group {group} has {size} projects, above the cap of {cap}")]
    GroupTooLarge {
        group: GroupId,
        size: usize,
        cap: usize,
    },
    #[error("{count} distinct ballots, above the cap of {cap}")]
    TooManyDistinctVotes { count: usize, cap: usize },
    #[error("{projects} projects, above the enumeration cap of {cap}")]
    InstanceTooLarge { projects: usize, cap: usize },
    #[error("no solver applies: {0}")]
    NoApplicableSolver(String),
}

impl SolveError {
    pub fn code(&self) -> &'static str {
        match self {
            SolveError::Model(e) => e.code(),
            SolveError::NotUnitCost => "NotUnitCost",
            SolveError::GroupTooLarge { .. } => "GroupTooLarge",
            SolveError::TooManyDistinctVotes { .. } => "TooManyDistinctVotes",
            SolveError::InstanceTooLarge { .. } => "InstanceTooLarge",
            SolveError::NoApplicableSolver(_) => "NoApplicableSolver",
        }
    }

    pub fn entity(&self) -> Option<String> {
        match self {
            SolveError::Model(e) => e.entity(),
            SolveError::GroupTooLarge { group, .. } => Some(group.to_string()),
            _ => None,
        }
    }

    pub fn is_infeasible(&self) -> bool {
        matches!(self, SolveError::Model(ModelError::Infeasible(_)))
    }

    /// Errors caused by size limits rather than by the input being wrong.
    pub fn is_capacity(&self) -> bool {
        matches!(
            self,
            SolveError::GroupTooLarge { .. }
                | SolveError::TooManyDistinctVotes { .. }
                | SolveError::InstanceTooLarge { .. }
                | SolveError::NoApplicableSolver(_)
                | SolveError::NotUnitCost
        )
    }
}

pub(crate) fn infeasible(instance: &Instance) -> SolveError {
    SolveError::Model(ModelError::Infeasible(instance.root_label().id))
}

pub(crate) fn mask_key(instance: &Instance, mask: &[bool]) -> BundleKey {
    let mut key = BundleKey::empty(instance.projects().len());
    for (p, _) in mask.iter().enumerate().filter(|(_, &b)| b) {
        key.index_sum += instance.projects()[p].id.0 as u64;
        key.ranks.insert(instance.rank_of(p));
    }
    key
}

pub(crate) fn key_mask(instance: &Instance, key: &BundleKey) -> Vec<bool> {
    let mut mask = vec![false; instance.projects().len()];
    for r in key.ranks.ranks() {
        mask[instance.project_at_rank(r)] = true;
    }
    mask
}

/// `Greater` when `(wa, ka)` is the better bundle.
pub(crate) fn prefer(
    rule: &BundleRule,
    wa: u64,
    ka: &BundleKey,
    wb: u64,
    kb: &BundleKey,
) -> Ordering {
    wa.cmp(&wb).then_with(|| ka.compare(kb, rule))
}

/// Applies a custom bundle list on top of a solver's choice: the first listed
/// feasible bundle with the optimal welfare replaces the default pick.
pub(crate) fn resolve_custom(
    instance: &Instance,
    profile: &CompiledProfile,
    welfare: u64,
    default: Vec<bool>,
) -> Vec<bool> {
    let BundleRule::Custom(list) = &instance.tiebreak().bundle_rule else {
        return default;
    };
    for bundle in list {
        let mut mask = vec![false; instance.projects().len()];
        for &p in bundle {
            if let Some(i) = instance.project_index(p) {
                mask[i] = true;
            }
        }
        if crate::model::feasible_mask(instance, &mask)
            && profile.welfare(instance, &mask) == welfare
        {
            return mask;
        }
    }
    default
}

pub(crate) fn require_unit_cost(instance: &Instance) -> Result<(), SolveError> {
    if instance.is_unit_cost() {
        Ok(())
    } else {
        Err(SolveError::NotUnitCost)
    }
}

pub(crate) fn require_tree(instance: &Instance, what: &str) -> Result<(), SolveError> {
    if instance.is_laminar() {
        Ok(())
    } else {
        Err(SolveError::NoApplicableSolver(format!(
            "{what} needs nested-or-disjoint labels; use --mode oracle for this instance"
        )))
    }
}

pub(crate) fn compile(instance: &Instance, votes: &[Vote]) -> CompiledProfile {
    CompiledProfile::new(instance, votes)
}
