use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::ids::ProjectId;

/// Deterministic tie-breaking between equally good projects and bundles.
///
/// `project_priority` lists project ids from most to least preferred; when
/// absent, lower ids are preferred. Greedy selection breaks ties with it
/// directly, and the bundle rules below are all defined on top of it.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TieBreakPolicy {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub project_priority: Option<Vec<ProjectId>>,
    #[serde(default)]
    pub bundle_rule: BundleRule,
}

/// How exact solvers pick among bundles of equal welfare.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BundleRule {
    /// Walk projects in priority order; the first project contained in exactly
    /// one of the two bundles decides, and the bundle containing it wins.
    /// For bundles of equal size this is the lexicographically smallest
    /// sorted-priority sequence.
    #[default]
    PriorityLex,
    /// Lower sum of project ids wins; equal sums fall back to `PriorityLex`.
    IndexSum,
    /// Listed bundles win in list order over every unlisted bundle; unlisted
    /// bundles compare by `PriorityLex`.
    Custom(Vec<Vec<ProjectId>>),
}

impl TieBreakPolicy {
    pub fn index_sum() -> Self {
        TieBreakPolicy {
            project_priority: None,
            bundle_rule: BundleRule::IndexSum,
        }
    }

    pub fn with_priority(priority: Vec<ProjectId>) -> Self {
        TieBreakPolicy {
            project_priority: Some(priority),
            bundle_rule: BundleRule::PriorityLex,
        }
    }

    /// Priority-ordered project ids, given the full id set.
    pub fn priority_order(&self, ids: &[ProjectId]) -> Vec<ProjectId> {
        match &self.project_priority {
            Some(order) => order.clone(),
            None => {
                let mut v = ids.to_vec();
                v.sort();
                v
            }
        }
    }

    /// Compares two bundles; `Greater` means `a` is preferred.
    ///
    /// This is the set-level definition of the rule. Solvers use an
    /// equivalent incremental key ([`BundleKey`]) and are tested against it.
    pub fn compare_bundles(
        &self,
        all_ids: &[ProjectId],
        a: &BTreeSet<ProjectId>,
        b: &BTreeSet<ProjectId>,
    ) -> Ordering {
        let order = self.priority_order(all_ids);
        match &self.bundle_rule {
            BundleRule::PriorityLex => priority_lex(&order, a, b),
            BundleRule::IndexSum => {
                let sa: u64 = a.iter().map(|p| p.0 as u64).sum();
                let sb: u64 = b.iter().map(|p| p.0 as u64).sum();
                sb.cmp(&sa).then_with(|| priority_lex(&order, a, b))
            }
            BundleRule::Custom(list) => {
                let pos = |s: &BTreeSet<ProjectId>| {
                    list.iter()
                        .position(|l| l.iter().copied().collect::<BTreeSet<_>>() == *s)
                };
                match (pos(a), pos(b)) {
                    (Some(x), Some(y)) => y.cmp(&x),
                    (Some(_), None) => Ordering::Greater,
                    (None, Some(_)) => Ordering::Less,
                    (None, None) => priority_lex(&order, a, b),
                }
            }
        }
    }
}

fn priority_lex(order: &[ProjectId], a: &BTreeSet<ProjectId>, b: &BTreeSet<ProjectId>) -> Ordering {
    for p in order {
        match (a.contains(p), b.contains(p)) {
            (true, false) => return Ordering::Greater,
            (false, true) => return Ordering::Less,
            _ => {}
        }
    }
    Ordering::Equal
}

/// Bitset over priority ranks, ordered as a big-endian integer with rank 0
/// as the most significant bit. Unions of disjoint sets add without carries,
/// which is what lets the dynamic programs compare partial bundles locally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RankSet {
    words: Vec<u64>,
}

impl RankSet {
    pub fn empty(universe: usize) -> Self {
        RankSet {
            words: vec![0; universe.div_ceil(64).max(1)],
        }
    }

    pub fn insert(&mut self, rank: usize) {
        self.words[rank / 64] |= 1u64 << (63 - rank % 64);
    }

    pub fn contains(&self, rank: usize) -> bool {
        self.words[rank / 64] & (1u64 << (63 - rank % 64)) != 0
    }

    pub fn union_with(&mut self, other: &RankSet) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= *o;
        }
    }

    pub fn ranks(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w & (1u64 << (63 - b)) != 0)
                .map(move |b| i * 64 + b)
        })
    }
}

/// Incremental form of a bundle used by the solvers' tie-breaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BundleKey {
    pub index_sum: u64,
    pub ranks: RankSet,
}

impl BundleKey {
    pub fn empty(universe: usize) -> Self {
        BundleKey {
            index_sum: 0,
            ranks: RankSet::empty(universe),
        }
    }

    pub fn union_with(&mut self, other: &BundleKey) {
        self.index_sum += other.index_sum;
        self.ranks.union_with(&other.ranks);
    }

    /// `Greater` means `self` is preferred. Custom lists are resolved by the
    /// solvers after the fact, so they order like `PriorityLex` here.
    pub fn compare(&self, other: &BundleKey, rule: &BundleRule) -> Ordering {
        match rule {
            BundleRule::IndexSum => other
                .index_sum
                .cmp(&self.index_sum)
                .then_with(|| self.ranks.cmp(&other.ranks)),
            BundleRule::PriorityLex | BundleRule::Custom(_) => self.ranks.cmp(&other.ranks),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[u32]) -> BTreeSet<ProjectId> {
        ids.iter().map(|&i| ProjectId(i)).collect()
    }

    #[test]
    fn priority_lex_prefers_highest_priority_difference() {
        let ids: Vec<_> = (1..=4).map(ProjectId).collect();
        let tb = TieBreakPolicy::default();
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[1, 4]), &set(&[2, 3])),
            Ordering::Greater
        );
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[1, 2, 3]), &set(&[1, 2])),
            Ordering::Greater
        );
    }

    #[test]
    fn class_priority_from_custom_order() {
        let ids: Vec<_> = (1..=3).map(ProjectId).collect();
        let tb = TieBreakPolicy::with_priority(vec![ProjectId(3), ProjectId(1), ProjectId(2)]);
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[3]), &set(&[1, 2])),
            Ordering::Greater
        );
    }

    #[test]
    fn index_sum_then_priority() {
        let ids: Vec<_> = (1..=10).map(ProjectId).collect();
        let tb = TieBreakPolicy::index_sum();
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[1, 2]), &set(&[1, 3])),
            Ordering::Greater
        );
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[1, 4]), &set(&[2, 3])),
            Ordering::Greater
        );
    }

    #[test]
    fn rank_set_orders_as_big_endian_integer() {
        let mut a = RankSet::empty(70);
        let mut b = RankSet::empty(70);
        a.insert(0);
        b.insert(1);
        b.insert(65);
        assert!(a > b);
        let mut c = b.clone();
        c.union_with(&a);
        assert_eq!(c.ranks().collect::<Vec<_>>(), vec![0, 1, 65]);
        assert!(c.contains(65));
    }

    #[test]
    fn custom_list_wins_over_unlisted() {
        let ids: Vec<_> = (1..=3).map(ProjectId).collect();
        let tb = TieBreakPolicy {
            project_priority: None,
            bundle_rule: BundleRule::Custom(vec![vec![ProjectId(3)], vec![ProjectId(2)]]),
        };
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[3]), &set(&[1])),
            Ordering::Greater
        );
        assert_eq!(
            tb.compare_bundles(&ids, &set(&[2]), &set(&[3])),
            Ordering::Less
        );
    }

    #[test]
    fn bundle_rule_serializes_kebab_case() {
        let tb = TieBreakPolicy::index_sum();
        let text = serde_json::to_string(&tb).unwrap();
        assert_eq!(text, r#"{"bundle_rule":"index-sum"}"#);
        let back: TieBreakPolicy = serde_json::from_str(&text).unwrap();
        assert_eq!(back, tb);
    }
}
