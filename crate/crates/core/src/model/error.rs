use thiserror::Error;

use super::ids::{GroupId, LabelId, ProjectId, VoterId};

/// Validation failures for instances and votes.
///
/// [`ModelError::code`] is the stable machine-readable name used by the CLI
/// and the HTTP service.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("labels {0} and {1} overlap without one containing the other")]
    NonLaminarLabels(LabelId, LabelId),
    #[error("label structure is not a rooted tree: {0}")]
    NotATree(String),
    #[error("group {0} has no projects")]
    EmptyGroup(GroupId),
    #[error("project {0} declared more than once")]
    DuplicateProject(ProjectId),
    #[error("group {0} declared more than once")]
    DuplicateGroup(GroupId),
    #[error("label {0} declared more than once")]
    DuplicateLabel(LabelId),
    #[error("project {0} has non-positive cost {1}")]
    NonPositiveCost(ProjectId, i64),
    #[error("label {0} has min {1} above max {2}")]
    BoundsInverted(LabelId, u64, u64),
    #[error("budget must be positive")]
    ZeroBudget,
    #[error("contradictory group {0} must allow at least one approval")]
    ZeroApprovalCap(GroupId),
    #[error("unknown {0}")]
    UnknownId(String),
    #[error("tie-break policy invalid: {0}")]
    BadTieBreak(String),
    #[error("funding constraints admit no outcome (first violated at label {0})")]
    Infeasible(LabelId),
    #[error("voter {voter} allocates {total}, above the budget {budget}")]
    BudgetExceeded {
        voter: VoterId,
        total: u64,
        budget: u64,
    },
    #[error("voter {voter} approves {count} projects in contradictory group {group} (cap {cap})")]
    TooManyApprovalsInContradictoryGroup {
        voter: VoterId,
        group: GroupId,
        count: usize,
        cap: u32,
    },
    #[error("voter {voter} allocates negative funds to group {group}")]
    NegativeAllocation { voter: VoterId, group: GroupId },
    #[error("voter {0} has zero weight")]
    ZeroWeight(VoterId),
    #[error("voter {0} appears more than once in the profile")]
    DuplicateVoter(VoterId),
}

impl ModelError {
    pub fn code(&self) -> &'static str {
        match self {
            ModelError::NonLaminarLabels(..) => "NonLaminarLabels",
            ModelError::NotATree(_) => "NotATree",
            ModelError::EmptyGroup(_) => "EmptyGroup",
            ModelError::DuplicateProject(_) => "DuplicateProject",
            ModelError::DuplicateGroup(_) => "DuplicateGroup",
            ModelError::DuplicateLabel(_) => "DuplicateLabel",
            ModelError::NonPositiveCost(..) => "NonPositiveCost",
            ModelError::BoundsInverted(..) => "BoundsInverted",
            ModelError::ZeroBudget => "ZeroBudget",
            ModelError::ZeroApprovalCap(_) => "ZeroApprovalCap",
            ModelError::UnknownId(_) => "UnknownId",
            ModelError::BadTieBreak(_) => "BadTieBreak",
            ModelError::Infeasible(_) => "Infeasible",
            ModelError::BudgetExceeded { .. } => "BudgetExceeded",
            ModelError::TooManyApprovalsInContradictoryGroup { .. } => {
                "TooManyApprovalsInContradictoryGroup"
            }
            ModelError::NegativeAllocation { .. } => "NegativeAllocation",
            ModelError::ZeroWeight(_) => "ZeroWeight",
            ModelError::DuplicateVoter(_) => "DuplicateVoter",
        }
    }

    /// The entity the error is about, rendered like `p3`, `g2`, `l1`, `v7`.
    pub fn entity(&self) -> Option<String> {
        Some(match self {
            ModelError::NonLaminarLabels(a, _) => a.to_string(),
            ModelError::EmptyGroup(g)
            | ModelError::DuplicateGroup(g)
            | ModelError::ZeroApprovalCap(g) => g.to_string(),
            ModelError::DuplicateProject(p) | ModelError::NonPositiveCost(p, _) => p.to_string(),
            ModelError::DuplicateLabel(l)
            | ModelError::BoundsInverted(l, ..)
            | ModelError::Infeasible(l) => l.to_string(),
            ModelError::BudgetExceeded { voter, .. }
            | ModelError::ZeroWeight(voter)
            | ModelError::DuplicateVoter(voter) => voter.to_string(),
            ModelError::TooManyApprovalsInContradictoryGroup { group, .. }
            | ModelError::NegativeAllocation { group, .. } => group.to_string(),
            ModelError::UnknownId(what) => what.clone(),
            ModelError::NotATree(_) | ModelError::ZeroBudget | ModelError::BadTieBreak(_) => {
                return None
            }
        })
    }
}
