use rayon::prelude::*;

use crate::model::{utility, CompiledProfile, Instance, Vote, VoterId};
use crate::solvers::{SolveMode, SolverConfig};

use super::space::{DeviationSpace, SpaceOptions};
use super::{DeviationResult, StrategyError};

/// What a deviation search examined and found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationSearch {
    pub found: Option<DeviationResult>,
    pub exhaustive: bool,
    pub examined: u64,
}

/// Searches `voter`'s deviation space for a ballot that raises their true
/// utility.
///
/// The first deviation (in space order) whose outcome also scores strictly
/// above the truthful outcome under the deviated profile is returned; if
/// every profitable deviation relies on the tie-break, the first of those is
/// returned with `tie_dependent` set.
pub fn find_profitable_deviation(
    instance: &Instance,
    votes: &[Vote],
    voter: VoterId,
    mode: SolveMode,
    config: &SolverConfig,
    options: SpaceOptions,
) -> Result<DeviationSearch, StrategyError> {
    let idx = votes
        .iter()
        .position(|v| v.voter == voter)
        .ok_or(StrategyError::UnknownVoter(voter))?;
    let space = DeviationSpace::new(instance, options)?;
    let truthful = &votes[idx];
    let base = crate::solvers::solve_outcome(instance, votes, mode, config)?;
    let before = utility(instance, truthful, &base);
    let base_mask = base.to_mask(instance);
    let reported_before = CompiledProfile::new(instance, votes).welfare(instance, &base_mask);

    let mut profile = votes.to_vec();
    let mut examined = 0u64;
    let mut strict: Option<DeviationResult> = None;
    let mut tied: Option<DeviationResult> = None;
    let mut failure: Option<StrategyError> = None;
    space.for_each(truthful, &mut |cand| {
        if cand.entries == truthful.entries {
            return true;
        }
        examined += 1;
        profile[idx] = cand.clone();
        let outcome = match crate::solvers::solve_outcome(instance, &profile, mode, config) {
            Ok(o) => o,
            Err(e) => {
                failure = Some(e.into());
                return false;
            }
        };
        let after = utility(instance, truthful, &outcome);
        if after <= before {
            return true;
        }
        let compiled = CompiledProfile::new(instance, &profile);
        let reported_after = compiled.welfare(instance, &outcome.to_mask(instance));
        let tie_dependent = reported_after <= compiled.welfare(instance, &base_mask);
        let result = DeviationResult {
            voter,
            truthful_vote: truthful.to_record(),
            deviated_vote: cand.to_record(),
            truthful_outcome: base.clone(),
            deviated_outcome: outcome,
            true_utility_before: before,
            true_utility_after: after,
            reported_welfare_before: reported_before,
            reported_welfare_after: reported_after,
            tie_dependent,
        };
        if tie_dependent {
            tied.get_or_insert(result);
            true
        } else {
            strict = Some(result);
            false
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(DeviationSearch {
        found: strict.or(tied),
        exhaustive: space.exhaustive,
        examined,
    })
}

/// Runs the deviation search for every voter; an empty list means no voter
/// can gain by misreporting alone.
pub fn nash_check(
    instance: &Instance,
    votes: &[Vote],
    mode: SolveMode,
    config: &SolverConfig,
    options: SpaceOptions,
) -> Result<Vec<DeviationResult>, StrategyError> {
    let per_voter: Vec<Result<DeviationSearch, StrategyError>> = votes
        .par_iter()
        .map(|v| find_profitable_deviation(instance, votes, v.voter, mode, config, options))
        .collect();
    let mut found = Vec::new();
    for r in per_voter {
        if let Some(d) = r?.found {
            found.push(d);
        }
    }
    Ok(found)
}
