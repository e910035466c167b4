//! Brute-force reference: enumerate every feasible outcome.
//!
//! Outcomes come out in lexicographic order of their sorted project ids
//! (`{}`, `{p1}`, `{p1,p2}`, ..., `{p2}`, ...). Branches that already break the
//! budget, a label maximum, or a contradictory cap are skipped, as are
//! branches whose remaining projects cannot lift some label to its minimum.

use std::cmp::Ordering;

use crate::model::{CompiledProfile, Instance, Outcome, Vote};
use crate::solvers::{SolveError, SolverConfig, SolverKind, TallyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleOptions {
    /// Largest project count accepted.
    pub cap: usize,
    /// Skip branches that cannot contain a feasible outcome.
    pub prune: bool,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            cap: 20,
            prune: true,
        }
    }
}

/// Iterator over feasible outcomes.
pub struct FeasibleOutcomes<'a> {
    walker: Walker<'a>,
}

impl Iterator for FeasibleOutcomes<'_> {
    type Item = Outcome;

    fn next(&mut self) -> Option<Outcome> {
        let inst = self.walker.instance;
        self.walker.advance().map(|m| Outcome::from_mask(inst, m))
    }
}

pub fn enumerate_feasible(
    instance: &Instance,
    options: OracleOptions,
) -> Result<FeasibleOutcomes<'_>, SolveError> {
    check_cap(instance, options.cap)?;
    Ok(FeasibleOutcomes {
        walker: Walker::new(instance, options.prune),
    })
}

/// Maximum-welfare feasible outcome by exhaustion.
pub fn solve_oracle(
    instance: &Instance,
    votes: &[Vote],
    config: &SolverConfig,
) -> Result<TallyResult, SolveError> {
    let profile = CompiledProfile::new(instance, votes);
    let mask = oracle_mask(instance, &profile, config)?;
    Ok(TallyResult::build(
        instance,
        votes,
        &mask,
        SolverKind::Oracle,
        "exhaustive enumeration".into(),
        Vec::new(),
    ))
}

pub(crate) fn oracle_mask(
    instance: &Instance,
    profile: &CompiledProfile,
    config: &SolverConfig,
) -> Result<Vec<bool>, SolveError> {
    check_cap(instance, config.oracle_cap)?;
    let rule = &instance.tiebreak().bundle_rule;
    let mut walker = Walker::new(instance, config.oracle_prune);
    let mut best: Option<(u64, crate::model::BundleKey, Vec<bool>)> = None;
    while let Some(mask) = walker.advance() {
        let w = profile.welfare(instance, mask);
        let take = match &best {
            None => true,
            Some((bw, bk, _)) => match w.cmp(bw) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => {
                    crate::solvers::mask_key(instance, mask).compare(bk, rule) == Ordering::Greater
                }
            },
        };
        if take {
            best = Some((w, crate::solvers::mask_key(instance, mask), mask.to_vec()));
        }
    }
    let (w, _, mask) = best.ok_or_else(|| crate::solvers::infeasible(instance))?;
    Ok(crate::solvers::resolve_custom(instance, profile, w, mask))
}

/// Some feasible outcome, searching without a size cap.
pub(crate) fn first_feasible(instance: &Instance) -> Option<Vec<bool>> {
    Walker::new(instance, true).advance().map(<[bool]>::to_vec)
}

fn check_cap(instance: &Instance, cap: usize) -> Result<(), SolveError> {
    let m = instance.projects().len();
    if m > cap {
        Err(SolveError::InstanceTooLarge { projects: m, cap })
    } else {
        Ok(())
    }
}

struct Walker<'a> {
    instance: &'a Instance,
    prune: bool,
    chosen: Vec<usize>,
    selected: Vec<bool>,
    next: usize,
    total: u64,
    label_spend: Vec<u64>,
    group_count: Vec<usize>,
    /// `suffix[l][i]`: cost of the projects of label `l` with index `>= i`.
    suffix: Vec<Vec<u64>>,
    started: bool,
}

impl<'a> Walker<'a> {
    fn new(instance: &'a Instance, prune: bool) -> Self {
        let m = instance.projects().len();
        let suffix = (0..instance.labels().len())
            .map(|l| {
                let mut s = vec![0u64; m + 1];
                let mut member = vec![false; m];
                for &p in instance.members_of_label(l) {
                    member[p] = true;
                }
                for i in (0..m).rev() {
                    s[i] = s[i + 1] + if member[i] { instance.cost_of(i) } else { 0 };
                }
                s
            })
            .collect();
        Walker {
            instance,
            prune,
            chosen: Vec::new(),
            selected: vec![false; m],
            next: 0,
            total: 0,
            label_spend: vec![0; instance.labels().len()],
            group_count: vec![0; instance.groups().len()],
            suffix,
            started: false,
        }
    }

    fn push(&mut self, p: usize) {
        let c = self.instance.cost_of(p);
        self.chosen.push(p);
        self.selected[p] = true;
        self.total += c;
        for &l in self.instance.labels_of_project(p) {
            self.label_spend[l] += c;
        }
        self.group_count[self.instance.group_of(p)] += 1;
    }

    fn pop(&mut self) -> Option<usize> {
        let p = self.chosen.pop()?;
        let c = self.instance.cost_of(p);
        self.selected[p] = false;
        self.total -= c;
        for &l in self.instance.labels_of_project(p) {
            self.label_spend[l] -= c;
        }
        self.group_count[self.instance.group_of(p)] -= 1;
        Some(p)
    }

    fn over(&self) -> bool {
        if self.total > self.instance.budget() {
            return true;
        }
        if self
            .instance
            .labels()
            .iter()
            .zip(&self.label_spend)
            .any(|(l, &s)| s > l.b_max)
        {
            return true;
        }
        self.instance
            .groups()
            .iter()
            .zip(&self.group_count)
            .any(|(g, &c)| g.kind.selection_cap().is_some_and(|k| c > k))
    }

    /// No extension using projects `from..` can meet every minimum.
    fn starved(&self, from: usize) -> bool {
        self.instance
            .labels()
            .iter()
            .enumerate()
            .any(|(l, node)| self.label_spend[l] + self.suffix[l][from] < node.b_min)
    }

    fn feasible(&self) -> bool {
        !self.over()
            && self
                .instance
                .labels()
                .iter()
                .zip(&self.label_spend)
                .all(|(l, &s)| s >= l.b_min)
    }

    fn advance(&mut self) -> Option<&[bool]> {
        let m = self.selected.len();
        if !self.started {
            self.started = true;
            if self.feasible() {
                return Some(&self.selected);
            }
            if self.prune && self.starved(0) {
                self.next = m;
            }
        }
        loop {
            if self.next < m {
                let p = self.next;
                self.push(p);
                self.next = p + 1;
                if self.prune && (self.over() || self.starved(p + 1)) {
                    self.pop();
                    continue;
                }
                if self.feasible() {
                    return Some(&self.selected);
                }
            } else {
                let p = self.pop()?;
                self.next = p + 1;
            }
        }
    }
}
