use std::collections::BTreeMap;

use crate::model::{
    validate_profile, EntryRecord, GroupId, GroupKindRecord, GroupRecord, Instance, InstanceFile,
    LabelId, LabelPolicy, LabelRecord, ModelError, ProjectId, ProjectRecord, TieBreakPolicy, Vote,
    VoteRecord, VoterId,
};
use crate::solvers::SolveMode;

/// A canned instance and truthful profile, with the settings it is meant to
/// be run under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub summary: &'static str,
    pub instance: InstanceFile,
    pub votes: Vec<VoteRecord>,
    pub mode: SolveMode,
    /// Voter whose manipulation the fixture demonstrates.
    pub attacker: Option<VoterId>,
    pub allow_complements: bool,
    /// Labels are not nested-or-disjoint; only the oracle can tally it.
    pub relaxed: bool,
}

impl Fixture {
    pub fn build(&self) -> Result<(Instance, Vec<Vote>), ModelError> {
        let policy = if self.relaxed {
            LabelPolicy::Relaxed
        } else {
            LabelPolicy::RequireLaminar
        };
        let instance = Instance::build(&self.instance, policy)?;
        let (votes, _) = validate_profile(&instance, &self.votes)?;
        Ok((instance, votes))
    }
}

/// All fixtures, keyed by name.
pub fn fixtures() -> BTreeMap<&'static str, Fixture> {
    [complement_swing(), substitute_tie(), overlapping_labels(), two_chains(), ballot_demo()]
        .into_iter()
        .map(|f| (f.name, f))
        .collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    fixtures().remove(name)
}

fn project(id: u32, cost: i64, group: u32, name: &str) -> ProjectRecord {
    ProjectRecord {
        id: ProjectId(id),
        name: name.to_string(),
        cost,
        group: GroupId(group),
    }
}

fn group(id: u32, leaf: Option<u32>) -> GroupRecord {
    GroupRecord {
        id: GroupId(id),
        kind: GroupKindRecord::Standard,
        max_approvals: None,
        label_leaf: leaf.map(LabelId),
        extra_labels: Vec::new(),
    }
}

fn label(id: u32, parent: Option<u32>, min: u64, max: Option<u64>) -> LabelRecord {
    LabelRecord {
        id: LabelId(id),
        parent: parent.map(LabelId),
        min,
        max,
    }
}

/// `(group, funds, approvals, complement)` entries.
fn ballot(voter: u32, entries: &[(u32, i64, &[u32], bool)]) -> VoteRecord {
    VoteRecord {
        voter: VoterId(voter),
        weight: 1,
        entries: entries
            .iter()
            .map(|&(g, funds, approvals, complement)| {
                (
                    GroupId(g),
                    EntryRecord {
                        funds,
                        approvals: approvals.iter().map(|&p| ProjectId(p)).collect(),
                        complement,
                    },
                )
            })
            .collect(),
    }
}

fn root_only(budget: u64) -> Vec<LabelRecord> {
    vec![label(0, None, 0, Some(budget))]
}

fn complement_swing() -> Fixture {
    Fixture {
        name: "obs4-complements",
        summary: "Complement flag lets voter 3 force a bundle worth more to them",
        instance: InstanceFile {
            budget: 3,
            projects: (1..=6)
                .map(|p| project(p, 1, if p <= 3 { 1 } else { 2 }, &format!("project {p}")))
                .collect(),
            groups: vec![group(1, None), group(2, None)],
            labels: root_only(3),
            tiebreak: TieBreakPolicy::default(),
        },
        votes: vec![
            ballot(1, &[(1, 2, &[1, 2], false), (2, 1, &[4], false)]),
            ballot(2, &[(1, 2, &[1, 2], false), (2, 1, &[4], false)]),
            ballot(3, &[(1, 1, &[3], false), (2, 2, &[5, 6], false)]),
        ],
        mode: SolveMode::ForceExact,
        attacker: Some(VoterId(3)),
        allow_complements: true,
        relaxed: false,
    }
}

fn substitute_tie() -> Fixture {
    // Group 1 holds three substitutes; projects 4..10 are singleton groups 2..8.
    let mut projects = vec![
        project(1, 1, 1, "p1"),
        project(2, 1, 1, "p2"),
        project(3, 1, 1, "p3"),
    ];
    projects.extend((4..=10).map(|p| project(p, 1, p - 2, &format!("p{p}"))));
    let mut groups = vec![group(1, None)];
    groups.extend((2..=8).map(|g| group(g, None)));
    let first_choice = |voter: u32| -> Vec<u32> {
        let mut s = Vec::new();
        if voter <= 3 {
            s.push(1);
        }
        if (4..=6).contains(&voter) {
            s.push(2);
        }
        if [2, 3, 4, 5, 7].contains(&voter) {
            s.push(3);
        }
        s
    };
    let votes = (1..=7)
        .map(|v| {
            let z1 = first_choice(v);
            // Voter i also backs project i + 3, alone in group i + 1.
            ballot(v, &[(1, 1, &z1, false), (v + 1, 1, &[v + 3], false)])
        })
        .collect();
    Fixture {
        name: "obs5-substitutes",
        summary: "Substitute approvals let voter 7 swing a tie broken by lowest index sum",
        instance: InstanceFile {
            budget: 2,
            projects,
            groups,
            labels: root_only(2),
            tiebreak: TieBreakPolicy::index_sum(),
        },
        votes,
        mode: SolveMode::ForceExact,
        attacker: Some(VoterId(7)),
        allow_complements: false,
        relaxed: false,
    }
}

fn overlapping_labels() -> Fixture {
    let mut third = group(3, Some(1));
    third.extra_labels = vec![LabelId(2)];
    Fixture {
        name: "thm2-nonlaminar",
        summary: "Overlapping label sets break strategyproofness even with singleton groups",
        instance: InstanceFile {
            budget: 2,
            projects: vec![
                project(1, 1, 1, "p1"),
                project(2, 1, 2, "p2"),
                project(3, 1, 3, "p3"),
            ],
            groups: vec![group(1, Some(1)), group(2, Some(2)), third],
            labels: vec![
                label(0, None, 0, Some(2)),
                label(1, Some(0), 1, Some(1)),
                label(2, Some(0), 1, Some(1)),
            ],
            tiebreak: TieBreakPolicy::with_priority(vec![ProjectId(3), ProjectId(1), ProjectId(2)]),
        },
        votes: vec![
            ballot(1, &[(1, 1, &[1], false), (3, 1, &[3], false)]),
            ballot(2, &[(3, 1, &[3], false)]),
            ballot(3, &[(1, 1, &[1], false)]),
        ],
        mode: SolveMode::ForceOracle,
        attacker: Some(VoterId(3)),
        allow_complements: false,
        relaxed: true,
    }
}

fn two_chains() -> Fixture {
    let projects = (1..=9)
        .map(|p| project(p, 1, if p <= 3 { 1 } else { 2 }, &format!("p{p}")))
        .collect();
    Fixture {
        name: "example3",
        summary: "One independent group and one group of two substitute chains",
        instance: InstanceFile {
            budget: 4,
            projects,
            groups: vec![group(1, None), group(2, None)],
            labels: root_only(4),
            tiebreak: TieBreakPolicy::default(),
        },
        votes: vec![
            ballot(1, &[(1, 2, &[1, 2], false), (2, 1, &[4, 5, 6], false)]),
            ballot(2, &[(1, 2, &[2, 3], false), (2, 1, &[4, 5], false)]),
            ballot(3, &[(1, 1, &[2], false), (2, 2, &[7, 8, 9], false)]),
            ballot(4, &[(1, 1, &[3], false), (2, 2, &[8, 9], false)]),
        ],
        mode: SolveMode::Auto,
        attacker: None,
        allow_complements: false,
        relaxed: false,
    }
}

fn ballot_demo() -> Fixture {
    let names = [
        (1, 80, 1, "Bike lanes on Main St"),
        (2, 60, 1, "Bike parking downtown"),
        (3, 40, 1, "Bike repair stations"),
        (4, 100, 2, "Library extended hours"),
        (5, 50, 2, "Library e-book licenses"),
        (6, 120, 3, "Community garden at Elm lot"),
        (7, 90, 3, "Parking structure at Elm lot"),
        (8, 70, 4, "Playground resurfacing"),
        (9, 30, 4, "Park benches"),
    ];
    let mut groups = vec![
        group(1, Some(1)),
        group(2, Some(2)),
        group(3, Some(1)),
        group(4, Some(2)),
    ];
    groups[2].kind = GroupKindRecord::Contradictory;
    groups[2].max_approvals = Some(1);
    Fixture {
        name: "ballot-demo",
        summary: "Four-group city ballot with a contradictory group and two spending labels",
        instance: InstanceFile {
            budget: 300,
            projects: names
                .iter()
                .map(|&(id, c, g, n)| project(id, c, g, n))
                .collect(),
            groups,
            labels: vec![
                label(0, None, 0, Some(300)),
                label(1, Some(0), 0, Some(200)),
                label(2, Some(0), 50, None),
            ],
            tiebreak: TieBreakPolicy::default(),
        },
        votes: vec![
            ballot(
                1,
                &[
                    (1, 150, &[1, 2], true),
                    (2, 100, &[4], false),
                    (4, 50, &[9], false),
                ],
            ),
            ballot(
                2,
                &[
                    (3, 120, &[6], false),
                    (4, 100, &[8, 9], false),
                    (2, 80, &[5], false),
                ],
            ),
            ballot(
                3,
                &[
                    (1, 40, &[3], false),
                    (3, 90, &[7], false),
                    (2, 150, &[4, 5], false),
                ],
            ),
        ],
        mode: SolveMode::Auto,
        attacker: None,
        allow_complements: true,
        relaxed: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_build() {
        for (name, f) in fixtures() {
            f.build().unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn nonlaminar_fixture_is_rejected_by_strict_validation() {
        let f = fixture("thm2-nonlaminar").unwrap();
        let err = crate::model::validate_instance(&f.instance).unwrap_err();
        assert_eq!(err, ModelError::NonLaminarLabels(LabelId(1), LabelId(2)));
    }
}
