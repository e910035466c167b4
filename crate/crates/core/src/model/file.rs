//! On-disk record types for instances and vote profiles.
//!
//! These mirror the JSON documents one to one. Parsing a canonical document
//! and serializing it again yields the same bytes; [`to_canonical_json`]
//! produces that canonical form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::ids::{GroupId, LabelId, ProjectId, VoterId};
use super::tiebreak::TieBreakPolicy;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub budget: u64,
    pub projects: Vec<ProjectRecord>,
    pub groups: Vec<GroupRecord>,
    #[serde(default)]
    pub labels: Vec<LabelRecord>,
    #[serde(default)]
    pub tiebreak: TieBreakPolicy,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectRecord {
    pub id: ProjectId,
    #[serde(default)]
    pub name: String,
    /// Signed so that non-positive costs can be reported instead of failing to parse.
    pub cost: i64,
    pub group: GroupId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupKindRecord {
    Standard,
    Contradictory,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRecord {
    pub id: GroupId,
    pub kind: GroupKindRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_approvals: Option<u32>,
    /// Label node the group hangs under; the root when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label_leaf: Option<LabelId>,
    /// Additional labels carried by the group. Only labels on the path from
    /// `label_leaf` to the root keep the family laminar; anything else makes
    /// the instance usable by the brute-force oracle only.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_labels: Vec<LabelId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelRecord {
    pub id: LabelId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<LabelId>,
    #[serde(default)]
    pub min: u64,
    /// `None` is the +infinity sentinel.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VoteRecord {
    pub voter: VoterId,
    #[serde(default = "default_weight")]
    pub weight: u64,
    #[serde(default)]
    pub entries: BTreeMap<GroupId, EntryRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRecord {
    pub funds: i64,
    #[serde(default)]
    pub approvals: Vec<ProjectId>,
    #[serde(default)]
    pub complement: bool,
}

fn default_weight() -> u64 {
    1
}

/// Pretty JSON with a trailing newline; the canonical text form of every record type.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("record types always serialize");
    text.push('\n');
    text
}

pub fn parse_instance_file(text: &str) -> Result<InstanceFile, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn parse_votes_file(text: &str) -> Result<Vec<VoteRecord>, serde_json::Error> {
    serde_json::from_str(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_keys_are_strings_in_json() {
        let mut entries = BTreeMap::new();
        entries.insert(
            GroupId(2),
            EntryRecord {
                funds: 1,
                approvals: vec![ProjectId(4)],
                complement: false,
            },
        );
        let rec = VoteRecord {
            voter: VoterId(1),
            weight: 1,
            entries,
        };
        let text = to_canonical_json(&vec![rec.clone()]);
        assert!(text.contains("\"2\": {"));
        assert_eq!(parse_votes_file(&text).unwrap(), vec![rec]);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"budget": 1, "projects": [], "groups": [], "bogus": 3}"#;
        assert!(parse_instance_file(text).is_err());
    }
}
