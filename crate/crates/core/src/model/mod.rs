//! Instances, votes, outcomes, and the functions that score them.

mod bounds;
mod error;
mod file;
mod ids;
mod instance;
mod tiebreak;
mod vote;
mod welfare;

pub use bounds::{check_feasibility, effective_bounds, EffectiveBounds};
pub use error::ModelError;
pub use file::{
    parse_instance_file, parse_votes_file, to_canonical_json, EntryRecord, GroupKindRecord,
    GroupRecord, InstanceFile, LabelRecord, ProjectRecord, VoteRecord,
};
pub use ids::{GroupId, LabelId, ProjectId, VoterId};
pub use instance::{
    validate_instance, Group, GroupKind, Instance, LabelNode, LabelPolicy, Project,
};
pub use tiebreak::{BundleKey, BundleRule, RankSet, TieBreakPolicy};
pub use vote::{validate_profile, validate_vote, ValidatedProfile, Vote, VoteEntry, VoteFix};
pub use welfare::{is_feasible_outcome, social_welfare, utility, Outcome};

pub(crate) use welfare::{feasible_mask, Ballot, CompiledProfile};
