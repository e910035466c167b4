use crate::model::{effective_bounds, CompiledProfile, Instance, Vote};
use crate::profiles::{classify_compiled, ComplianceReport};

use super::{compile, require_tree, require_unit_cost, SolveError, SolverConfig};
use super::{SolverKind, TallyResult};

/// Two-pass greedy for unit-cost instances: first meet every label minimum
/// bottom-up, then fill the remaining budget by best marginal gain.
pub fn solve_greedy(
    instance: &Instance,
    votes: &[Vote],
    config: &SolverConfig,
) -> Result<TallyResult, SolveError> {
    let profile = compile(instance, votes);
    let mask = greedy_mask(instance, &profile, config)?;
    let report = classify_compiled(instance, votes, &profile);
    let warnings = greedy_warnings(votes, &report);
    Ok(TallyResult::build(
        instance,
        votes,
        &mask,
        SolverKind::Greedy,
        "two-pass greedy".into(),
        warnings,
    ))
}

pub(crate) fn greedy_warnings(votes: &[Vote], report: &ComplianceReport) -> Vec<String> {
    let mut warnings = Vec::new();
    if votes.iter().any(Vote::has_complement) {
        warnings.push(
            "some ballots mark complements; greedy marginal gains are not guaranteed optimal"
                .into(),
        );
    }
    if !report.certified_with(1) {
        warnings.push(
            "profile is not certified independent/substitute-chain with at most one deviant; \
             greedy outcome may be suboptimal"
                .into(),
        );
    }
    warnings
}

struct State<'a> {
    instance: &'a Instance,
    profile: &'a CompiledProfile,
    selected: Vec<bool>,
    label_spend: Vec<u64>,
    label_cap: Vec<u64>,
    group_count: Vec<usize>,
    /// Per group, per ballot: (covered cost, approvals still missing).
    ballot_state: Vec<Vec<(u64, usize)>>,
    count: u64,
}

impl<'a> State<'a> {
    fn new(instance: &'a Instance, profile: &'a CompiledProfile) -> Result<Self, SolveError> {
        let eb = effective_bounds(instance)?;
        Ok(State {
            instance,
            profile,
            selected: vec![false; instance.projects().len()],
            label_spend: vec![0; instance.labels().len()],
            label_cap: instance.labels().iter().map(|l| eb.max(l.id)).collect(),
            group_count: vec![0; instance.groups().len()],
            ballot_state: profile
                .by_group
                .iter()
                .map(|bs| bs.iter().map(|b| (0, b.approvals.len())).collect())
                .collect(),
            count: 0,
        })
    }

    fn admissible(&self, p: usize) -> bool {
        if self.selected[p] || self.count >= self.instance.budget() {
            return false;
        }
        let g = self.instance.group_of(p);
        if let Some(k) = self.instance.groups()[g].kind.selection_cap() {
            if self.group_count[g] >= k {
                return false;
            }
        }
        self.instance
            .labels_of_project(p)
            .iter()
            .all(|&l| self.label_spend[l] < self.label_cap[l])
    }

    fn gain(&self, p: usize) -> u64 {
        let g = self.instance.group_of(p);
        let mut gain = 0;
        for (b, &(covered, missing)) in self.profile.by_group[g].iter().zip(&self.ballot_state[g]) {
            if !b.approvals.contains(&p) {
                continue;
            }
            let before = if b.complement && missing > 0 {
                0
            } else {
                covered.min(b.funds)
            };
            let after = if b.complement && missing > 1 {
                0
            } else {
                (covered + 1).min(b.funds)
            };
            gain += b.weight * (after - before);
        }
        gain
    }

    fn add(&mut self, p: usize) {
        self.selected[p] = true;
        self.count += 1;
        let g = self.instance.group_of(p);
        self.group_count[g] += 1;
        for &l in self.instance.labels_of_project(p) {
            self.label_spend[l] += 1;
        }
        for (b, st) in self.profile.by_group[g]
            .iter()
            .zip(self.ballot_state[g].iter_mut())
        {
            if b.approvals.contains(&p) {
                st.0 += 1;
                st.1 -= 1;
            }
        }
    }

    /// Best admissible candidate by gain, ties to higher priority.
    fn best(&self, candidates: impl Iterator<Item = usize>) -> Option<(usize, u64)> {
        let mut best: Option<(usize, u64)> = None;
        for p in candidates.filter(|&p| self.admissible(p)) {
            let gain = self.gain(p);
            let better = match best {
                None => true,
                Some((q, bg)) => {
                    gain > bg || (gain == bg && self.instance.rank_of(p) < self.instance.rank_of(q))
                }
            };
            if better {
                best = Some((p, gain));
            }
        }
        best
    }
}

pub(crate) fn greedy_mask(
    instance: &Instance,
    profile: &CompiledProfile,
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    require_unit_cost(instance)?;
    require_tree(instance, "the greedy solver")?;
    let mut st = State::new(instance, profile)?;

    for &l in instance.reverse_label_order() {
        let node = &instance.labels()[l];
        while st.label_spend[l] < node.b_min {
            let members = instance.members_of_label(l).iter().copied();
            match st.best(members) {
                Some((p, _)) => st.add(p),
                None => return Err(crate::model::ModelError::Infeasible(node.id).into()),
            }
        }
    }

    while st.count < instance.budget() {
        match st.best(0..instance.projects().len()) {
            Some((_, 0)) if !config.pad => break,
            Some((p, _)) => st.add(p),
            None => break,
        }
    }
    Ok(st.selected)
}
