//! Manipulation search: can a voter gain by misreporting?

mod fixtures;
mod search;
mod space;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Outcome, VoteRecord, VoterId};
use crate::solvers::SolveError;

pub use fixtures::{fixture, fixtures, Fixture};
pub use search::{find_profitable_deviation, nash_check, DeviationSearch};
pub use space::{DeviationSpace, SpaceOptions};

/// A profitable misreport. Utilities are measured with the truthful ballot.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationResult {
    pub voter: VoterId,
    pub truthful_vote: VoteRecord,
    pub deviated_vote: VoteRecord,
    pub truthful_outcome: Outcome,
    pub deviated_outcome: Outcome,
    pub true_utility_before: u64,
    pub true_utility_after: u64,
    /// Welfare of the truthful outcome under the truthful profile.
    pub reported_welfare_before: u64,
    /// Welfare of the deviated outcome under the deviated profile.
    pub reported_welfare_after: u64,
    /// The deviated outcome only wins on the tie-break: under the deviated
    /// profile it does not score strictly above the truthful outcome.
    pub tie_dependent: bool,
}

impl DeviationResult {
    pub fn delta(&self) -> i64 {
        self.true_utility_after as i64 - self.true_utility_before as i64
    }

    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let _ = writeln!(out, "voter: {}", self.voter);
        let _ = writeln!(out, "deviated ballot:");
        for (g, e) in &self.deviated_vote.entries {
            let ids: Vec<String> = e.approvals.iter().map(|p| p.to_string()).collect();
            let _ = writeln!(
                out,
                "  {g}: funds {} approve {{{}}} complement {}",
                e.funds,
                ids.join(","),
                u8::from(e.complement)
            );
        }
        let _ = writeln!(
            out,
            "outcome: {} -> {}",
            self.truthful_outcome, self.deviated_outcome
        );
        let _ = writeln!(
            out,
            "true utility: {} -> {} (delta {:+})",
            self.true_utility_before,
            self.true_utility_after,
            self.delta()
        );
        let _ = writeln!(
            out,
            "reported welfare: {} -> {}",
            self.reported_welfare_before, self.reported_welfare_after
        );
        if self.tie_dependent {
            let _ = writeln!(out, "note: the deviated outcome wins only on the tie-break");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StrategyError {
    #[error("deviation space has about {estimate} ballots, above the cap of {cap}")]
    SpaceTooLarge { estimate: u128, cap: u128 },
    #[error("voter {0} is not in the profile")]
    UnknownVoter(VoterId),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

impl StrategyError {
    pub fn code(&self) -> &'static str {
        match self {
            StrategyError::SpaceTooLarge { .. } => "SpaceTooLarge",
            StrategyError::UnknownVoter(_) => "UnknownId",
            StrategyError::Solve(e) => e.code(),
        }
    }
}
