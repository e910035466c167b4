use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::model::{social_welfare, utility, Instance, LabelId, Outcome, Vote, VoterId};
use crate::profiles::{classify, ComplianceReport};

use super::SolverKind;

/// A finished tally. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TallyResult {
    pub outcome: Outcome,
    pub cost: u64,
    pub budget: u64,
    pub social_welfare: u64,
    pub per_voter_utility: BTreeMap<VoterId, u64>,
    pub label_spend: BTreeMap<LabelId, u64>,
    pub solver: SolverKind,
    pub reason: String,
    pub compliance: ComplianceReport,
    pub warnings: Vec<String>,
}

impl TallyResult {
    pub(crate) fn build(
        instance: &Instance,
        votes: &[Vote],
        mask: &[bool],
        solver: SolverKind,
        reason: String,
        warnings: Vec<String>,
    ) -> TallyResult {
        let compliance = classify(instance, votes);
        TallyResult::with_compliance(instance, votes, mask, solver, reason, compliance, warnings)
    }

    pub(crate) fn with_compliance(
        instance: &Instance,
        votes: &[Vote],
        mask: &[bool],
        solver: SolverKind,
        reason: String,
        compliance: ComplianceReport,
        warnings: Vec<String>,
    ) -> TallyResult {
        let outcome = Outcome::from_mask(instance, mask);
        let label_spend = instance
            .labels()
            .iter()
            .map(|l| {
                let spend = instance
                    .label_projects(l.id)
                    .into_iter()
                    .filter(|p| outcome.contains(*p))
                    .filter_map(|p| instance.project(p))
                    .map(|p| p.cost)
                    .sum();
                (l.id, spend)
            })
            .collect();
        TallyResult {
            cost: outcome.cost(instance),
            budget: instance.budget(),
            social_welfare: social_welfare(instance, votes, &outcome),
            per_voter_utility: votes
                .iter()
                .map(|v| (v.voter, utility(instance, v, &outcome)))
                .collect(),
            label_spend,
            solver,
            reason,
            compliance,
            warnings,
            outcome,
        }
    }

    /// Stable JSON form (pretty, trailing newline).
    pub fn to_json(&self) -> String {
        crate::model::to_canonical_json(self)
    }

    /// Human-readable report.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let ids: Vec<String> = self
            .outcome
            .selected
            .iter()
            .map(|p| p.to_string())
            .collect();
        let _ = writeln!(out, "solver: {} ({})", self.solver, self.reason);
        let _ = writeln!(
            out,
            "outcome: {}",
            if ids.is_empty() {
                "(none)".into()
            } else {
                ids.join(",")
            }
        );
        let _ = writeln!(out, "cost: {} of {}", self.cost, self.budget);
        let _ = writeln!(out, "social welfare: {}", self.social_welfare);
        let _ = writeln!(out, "utilities:");
        for (v, u) in &self.per_voter_utility {
            let _ = writeln!(out, "  {v}: {u}");
        }
        let _ = writeln!(out, "label spend:");
        for (l, s) in &self.label_spend {
            let _ = writeln!(out, "  {l}: {s}");
        }
        out.push_str(&self.compliance.to_text());
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}
