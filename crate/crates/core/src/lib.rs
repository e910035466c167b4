//! Participatory budgeting with interacting projects.
//!
//! Voters split the budget across ballot groups, approve projects inside each
//! group, and flag whether their approvals in a group are complements. The
//! crate aggregates such ballots into a welfare-maximizing bundle under a
//! hierarchy (1-laminar family) of minimum/maximum funding constraints, and
//! ships a strategy lab that searches for profitable misreports.
//!
//! Layout:
//!
//! * [`model`]: instances, votes, outcomes, utility and welfare, label tree.
//! * [`solvers`]: two-pass greedy, label-tree dynamic program, distinct-votes
//!   case algorithm, and the [`solvers::solve`] dispatcher.
//! * [`oracle`]: brute-force enumeration of feasible outcomes.
//! * [`profiles`]: recognizes the special "independent or substitute chain"
//!   vote profiles for which greedy aggregation is optimal.
//! * [`strategy`]: deviation search, equilibrium checks, canned fixtures.
//! * [`gen`]: seeded random instances and profiles.

pub mod gen;
pub mod model;
pub mod oracle;
pub mod profiles;
pub mod solvers;
pub mod strategy;

pub use model::{
    EffectiveBounds, Group, GroupId, GroupKind, Instance, InstanceFile, LabelId, ModelError,
    Outcome, Project, ProjectId, TieBreakPolicy, Vote, VoteEntry, VoterId,
};
pub use profiles::ComplianceReport;
pub use solvers::{solve, SolveError, SolveMode, SolverConfig, SolverKind, TallyResult};
pub use strategy::DeviationResult;
