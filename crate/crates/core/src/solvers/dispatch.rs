use crate::model::{CompiledProfile, Instance, Outcome, Vote};
use crate::oracle::oracle_mask;
use crate::profiles::{classify_compiled, ComplianceReport};

use super::greedy::greedy_warnings;
use super::{compile, distinct_mask, exact_mask, greedy_mask};
use super::{SolveError, SolveMode, SolverConfig, SolverKind, TallyResult};

/// Tallies with the requested solver, or picks one in `Auto` mode.
pub fn solve(
    instance: &Instance,
    votes: &[Vote],
    mode: SolveMode,
    config: &SolverConfig,
) -> Result<TallyResult, SolveError> {
    let profile = compile(instance, votes);
    let report = classify_compiled(instance, votes, &profile);
    let (kind, reason) = choose(instance, votes, &report, mode, config)?;
    let mask = run(instance, votes, &profile, kind, config)?;
    let warnings = if kind == SolverKind::Greedy {
        greedy_warnings(votes, &report)
    } else {
        Vec::new()
    };
    Ok(TallyResult::with_compliance(
        instance, votes, &mask, kind, reason, report, warnings,
    ))
}

/// Outcome only; skips the report work `solve` does.
pub fn solve_outcome(
    instance: &Instance,
    votes: &[Vote],
    mode: SolveMode,
    config: &SolverConfig,
) -> Result<Outcome, SolveError> {
    Ok(Outcome::from_mask(
        instance,
        &outcome_mask(instance, votes, mode, config)?,
    ))
}

pub(crate) fn outcome_mask(
    instance: &Instance,
    votes: &[Vote],
    mode: SolveMode,
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    let profile = compile(instance, votes);
    let kind = match mode {
        SolveMode::Auto => {
            let report = classify_compiled(instance, votes, &profile);
            choose(instance, votes, &report, mode, config)?.0
        }
        other => forced(other),
    };
    run(instance, votes, &profile, kind, config)
}

fn forced(mode: SolveMode) -> SolverKind {
    match mode {
        SolveMode::ForceGreedy => SolverKind::Greedy,
        SolveMode::ForceDistinct => SolverKind::DistinctVotes,
        SolveMode::ForceOracle => SolverKind::Oracle,
        SolveMode::ForceExact | SolveMode::Auto => SolverKind::ExactTreeDp,
    }
}

fn run(
    instance: &Instance,
    votes: &[Vote],
    profile: &CompiledProfile,
    kind: SolverKind,
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    match kind {
        SolverKind::Greedy => greedy_mask(instance, profile, config),
        SolverKind::ExactTreeDp => exact_mask(instance, profile, config),
        SolverKind::DistinctVotes => distinct_mask(instance, votes, config),
        SolverKind::Oracle => oracle_mask(instance, profile, config),
    }
}

fn choose(
    instance: &Instance,
    votes: &[Vote],
    report: &ComplianceReport,
    mode: SolveMode,
    config: &SolverConfig,
) -> Result<(SolverKind, String), SolveError> {
    if mode != SolveMode::Auto {
        return Ok((forced(mode), format!("forced by mode {}", mode_name(mode))));
    }
    if !instance.is_laminar() {
        return Err(SolveError::NoApplicableSolver(
            "labels are not nested-or-disjoint; only the brute-force oracle (--mode oracle) \
             handles such instances"
                .into(),
        ));
    }
    let exact_fits = instance.max_group_size() <= config.smax_cap;
    if votes.iter().any(Vote::has_complement) {
        if exact_fits {
            return Ok((SolverKind::ExactTreeDp, "complement flags present".into()));
        }
    } else if instance.is_unit_cost() && report.certified_with(1) {
        return Ok((
            SolverKind::Greedy,
            "unit costs and an independent/substitute-chain profile with at most one deviant"
                .into(),
        ));
    } else if exact_fits {
        return Ok((
            SolverKind::ExactTreeDp,
            "general profile within the group size cap".into(),
        ));
    }
    Err(SolveError::NoApplicableSolver(format!(
        "largest group has {} projects, above the cap of {}; raise --smax-cap or use --mode oracle \
         on small instances",
        instance.max_group_size(),
        config.smax_cap
    )))
}

fn mode_name(mode: SolveMode) -> &'static str {
    match mode {
        SolveMode::Auto => "auto",
        SolveMode::ForceGreedy => "greedy",
        SolveMode::ForceExact => "exact",
        SolveMode::ForceDistinct => "distinct",
        SolveMode::ForceOracle => "oracle",
    }
}
