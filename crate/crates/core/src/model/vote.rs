use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::error::ModelError;
use super::file::{EntryRecord, VoteRecord};
use super::ids::{GroupId, ProjectId, VoterId};
use super::instance::Instance;

/// One group's part of a ballot: funds earmarked for the group, the approved
/// projects, and whether those approvals are only valuable together.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct VoteEntry {
    pub funds: u64,
    pub approvals: BTreeSet<ProjectId>,
    pub complement: bool,
}

/// A validated ballot. Groups the voter gave no funds to are absent.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vote {
    pub voter: VoterId,
    pub weight: u64,
    pub entries: BTreeMap<GroupId, VoteEntry>,
}

/// Normalizations applied while validating a raw ballot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "fix", content = "group")]
pub enum VoteFix {
    /// Zero funds with approvals: approvals dropped along with the entry.
    ApprovalsCleared(GroupId),
    /// Complement flag on a contradictory group or an empty approval set: cleared.
    ComplementCleared(GroupId),
    /// Zero funds and nothing approved: entry removed.
    EntryDropped(GroupId),
}

impl Vote {
    pub fn new(voter: VoterId) -> Self {
        Vote {
            voter,
            weight: 1,
            entries: BTreeMap::new(),
        }
    }

    pub fn weighted(mut self, weight: u64) -> Self {
        self.weight = weight;
        self
    }

    /// Builder used by fixtures and tests; does not validate.
    pub fn with(mut self, group: GroupId, funds: u64, approvals: &[u32], complement: bool) -> Self {
        self.entries.insert(
            group,
            VoteEntry {
                funds,
                approvals: approvals.iter().map(|&p| ProjectId(p)).collect(),
                complement,
            },
        );
        self
    }

    pub fn total_funds(&self) -> u64 {
        self.entries.values().map(|e| e.funds).sum()
    }

    pub fn entry(&self, group: GroupId) -> Option<&VoteEntry> {
        self.entries.get(&group)
    }

    pub fn has_complement(&self) -> bool {
        self.entries.values().any(|e| e.complement)
    }

    pub fn to_record(&self) -> VoteRecord {
        VoteRecord {
            voter: self.voter,
            weight: self.weight,
            entries: self
                .entries
                .iter()
                .map(|(g, e)| {
                    (
                        *g,
                        EntryRecord {
                            funds: e.funds as i64,
                            approvals: e.approvals.iter().copied().collect(),
                            complement: e.complement,
                        },
                    )
                })
                .collect(),
        }
    }
}

/// Validates and normalizes one raw ballot.
pub fn validate_vote(
    instance: &Instance,
    record: &VoteRecord,
) -> Result<(Vote, Vec<VoteFix>), ModelError> {
    let voter = record.voter;
    if record.weight == 0 {
        return Err(ModelError::ZeroWeight(voter));
    }
    let mut fixes = Vec::new();
    let mut entries = BTreeMap::new();
    let mut total: u64 = 0;
    for (&gid, raw) in &record.entries {
        let group = instance
            .group(gid)
            .ok_or_else(|| ModelError::UnknownId(format!("{gid} (in ballot of {voter})")))?;
        if raw.funds < 0 {
            return Err(ModelError::NegativeAllocation { voter, group: gid });
        }
        let funds = raw.funds as u64;
        let mut approvals = BTreeSet::new();
        for &p in &raw.approvals {
            match instance.project(p) {
                Some(proj) if proj.group == gid => {
                    approvals.insert(p);
                }
                Some(_) => {
                    return Err(ModelError::UnknownId(format!(
                        "{p} (not in {gid}, ballot of {voter})"
                    )))
                }
                None => return Err(ModelError::UnknownId(format!("{p} (in ballot of {voter})"))),
            }
        }
        if let Some(cap) = group.kind.selection_cap() {
            if approvals.len() > cap {
                return Err(ModelError::TooManyApprovalsInContradictoryGroup {
                    voter,
                    group: gid,
                    count: approvals.len(),
                    cap: cap as u32,
                });
            }
        }
        total = total.saturating_add(funds);
        let mut complement = raw.complement;
        if funds == 0 {
            // An empty zero-funds entry carries nothing, so it is dropped either way.
            fixes.push(if approvals.is_empty() {
                VoteFix::EntryDropped(gid)
            } else {
                VoteFix::ApprovalsCleared(gid)
            });
            continue;
        }
        if complement && (group.kind.is_contradictory() || approvals.is_empty()) {
            complement = false;
            fixes.push(VoteFix::ComplementCleared(gid));
        }
        entries.insert(
            gid,
            VoteEntry {
                funds,
                approvals,
                complement,
            },
        );
    }
    if total > instance.budget() {
        return Err(ModelError::BudgetExceeded {
            voter,
            total,
            budget: instance.budget(),
        });
    }
    Ok((
        Vote {
            voter,
            weight: record.weight,
            entries,
        },
        fixes,
    ))
}

/// Validated ballots and the fixes applied to each voter's ballot.
pub type ValidatedProfile = (Vec<Vote>, Vec<(VoterId, VoteFix)>);

/// Validates every ballot and rejects repeated voter ids.
pub fn validate_profile(
    instance: &Instance,
    records: &[VoteRecord],
) -> Result<ValidatedProfile, ModelError> {
    let mut seen = HashSet::new();
    let mut votes = Vec::with_capacity(records.len());
    let mut fixes = Vec::new();
    for rec in records {
        if !seen.insert(rec.voter) {
            return Err(ModelError::DuplicateVoter(rec.voter));
        }
        let (v, f) = validate_vote(instance, rec)?;
        fixes.extend(f.into_iter().map(|x| (rec.voter, x)));
        votes.push(v);
    }
    Ok((votes, fixes))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::file::{GroupKindRecord, GroupRecord, InstanceFile, ProjectRecord};
    use crate::model::instance::validate_instance;

    fn instance() -> Instance {
        let file = InstanceFile {
            budget: 4,
            projects: vec![
                ProjectRecord {
                    id: ProjectId(1),
                    name: "a".into(),
                    cost: 1,
                    group: GroupId(1),
                },
                ProjectRecord {
                    id: ProjectId(2),
                    name: "b".into(),
                    cost: 1,
                    group: GroupId(1),
                },
                ProjectRecord {
                    id: ProjectId(3),
                    name: "c".into(),
                    cost: 2,
                    group: GroupId(2),
                },
                ProjectRecord {
                    id: ProjectId(4),
                    name: "d".into(),
                    cost: 2,
                    group: GroupId(2),
                },
            ],
            groups: vec![
                GroupRecord {
                    id: GroupId(1),
                    kind: GroupKindRecord::Standard,
                    max_approvals: None,
                    label_leaf: None,
                    extra_labels: vec![],
                },
                GroupRecord {
                    id: GroupId(2),
                    kind: GroupKindRecord::Contradictory,
                    max_approvals: None,
                    label_leaf: None,
                    extra_labels: vec![],
                },
            ],
            labels: vec![],
            tiebreak: Default::default(),
        };
        validate_instance(&file).unwrap()
    }

    fn raw(voter: u32, entries: &[(u32, i64, &[u32], bool)]) -> VoteRecord {
        VoteRecord {
            voter: VoterId(voter),
            weight: 1,
            entries: entries
                .iter()
                .map(|&(g, f, s, t)| {
                    (
                        GroupId(g),
                        EntryRecord {
                            funds: f,
                            approvals: s.iter().map(|&p| ProjectId(p)).collect(),
                            complement: t,
                        },
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn budget_boundary() {
        let inst = instance();
        assert!(validate_vote(
            &inst,
            &raw(1, &[(1, 2, &[1, 2], false), (2, 2, &[3], false)])
        )
        .is_ok());
        let err = validate_vote(
            &inst,
            &raw(1, &[(1, 3, &[1, 2], false), (2, 2, &[3], false)]),
        )
        .unwrap_err();
        assert_eq!(err.code(), "BudgetExceeded");
    }

    #[test]
    fn contradictory_cap_and_complement() {
        let inst = instance();
        let err = validate_vote(&inst, &raw(1, &[(2, 2, &[3, 4], false)])).unwrap_err();
        assert_eq!(err.code(), "TooManyApprovalsInContradictoryGroup");
        let (v, fixes) = validate_vote(&inst, &raw(1, &[(2, 2, &[3], true)])).unwrap();
        assert!(!v.entries[&GroupId(2)].complement);
        assert_eq!(fixes, vec![VoteFix::ComplementCleared(GroupId(2))]);
    }

    #[test]
    fn zero_funds_normalize() {
        let inst = instance();
        let (v, fixes) =
            validate_vote(&inst, &raw(1, &[(1, 0, &[1], false), (2, 0, &[], false)])).unwrap();
        assert!(v.entries.is_empty());
        assert_eq!(
            fixes,
            vec![
                VoteFix::ApprovalsCleared(GroupId(1)),
                VoteFix::EntryDropped(GroupId(2))
            ]
        );
        // Normalization is idempotent.
        let (again, more) = validate_vote(&inst, &v.to_record()).unwrap();
        assert_eq!(again, v);
        assert!(more.is_empty());
    }

    #[test]
    fn unknown_and_negative() {
        let inst = instance();
        assert_eq!(
            validate_vote(&inst, &raw(1, &[(9, 1, &[], false)]))
                .unwrap_err()
                .code(),
            "UnknownId"
        );
        assert_eq!(
            validate_vote(&inst, &raw(1, &[(1, 1, &[3], false)]))
                .unwrap_err()
                .code(),
            "UnknownId"
        );
        assert_eq!(
            validate_vote(&inst, &raw(1, &[(1, -1, &[], false)]))
                .unwrap_err()
                .code(),
            "NegativeAllocation"
        );
    }

    #[test]
    fn duplicate_voters_rejected() {
        let inst = instance();
        let err = validate_profile(&inst, &[raw(1, &[]), raw(1, &[])]).unwrap_err();
        assert_eq!(err, ModelError::DuplicateVoter(VoterId(1)));
    }
}
