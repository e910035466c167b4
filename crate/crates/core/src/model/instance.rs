use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::error::ModelError;
use super::file::{GroupKindRecord, GroupRecord, InstanceFile, LabelRecord, ProjectRecord};
use super::ids::{GroupId, LabelId, ProjectId};
use super::tiebreak::{BundleRule, TieBreakPolicy};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Project {
    pub id: ProjectId,
    pub name: String,
    pub cost: u64,
    pub group: GroupId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GroupKind {
    Standard,
    /// At most `max_approvals` projects of the group may be approved by a
    /// voter, and at most that many may be funded.
    Contradictory {
        max_approvals: u32,
    },
}

impl GroupKind {
    pub fn selection_cap(&self) -> Option<usize> {
        match self {
            GroupKind::Standard => None,
            GroupKind::Contradictory { max_approvals } => Some(*max_approvals as usize),
        }
    }

    pub fn is_contradictory(&self) -> bool {
        matches!(self, GroupKind::Contradictory { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub id: GroupId,
    pub kind: GroupKind,
    /// Sorted project ids.
    pub projects: Vec<ProjectId>,
    pub label_leaf: LabelId,
    pub extra_labels: Vec<LabelId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelNode {
    pub id: LabelId,
    pub parent: Option<LabelId>,
    pub b_min: u64,
    /// Resolved upper bound; the infinity sentinel becomes the budget.
    pub b_max: u64,
    pub declared_max: Option<u64>,
    pub children: Vec<LabelId>,
}

/// Laminarity requirement applied by [`Instance::build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelPolicy {
    /// Label sets must be pairwise nested or disjoint and agree with the tree.
    RequireLaminar,
    /// Arbitrary label families and a zero budget are accepted. Only the
    /// brute-force oracle and the feasibility checks can use such instances.
    Relaxed,
}

/// A validated instance. Projects, groups, and labels are stored sorted by id;
/// the dense position of an entity in those vectors is its internal index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    budget: u64,
    projects: Vec<Project>,
    groups: Vec<Group>,
    labels: Vec<LabelNode>,
    root: usize,
    tiebreak: TieBreakPolicy,
    laminar: bool,

    project_pos: HashMap<ProjectId, usize>,
    group_pos: HashMap<GroupId, usize>,
    label_pos: HashMap<LabelId, usize>,
    project_group: Vec<usize>,
    group_members: Vec<Vec<usize>>,
    label_members: Vec<Vec<usize>>,
    project_labels: Vec<Vec<usize>>,
    label_children: Vec<Vec<usize>>,
    label_direct_groups: Vec<Vec<usize>>,
    reverse_order: Vec<usize>,
    rank_of: Vec<usize>,
    by_rank: Vec<usize>,
}

/// Validates a raw instance with the laminarity requirement.
pub fn validate_instance(file: &InstanceFile) -> Result<Instance, ModelError> {
    Instance::build(file, LabelPolicy::RequireLaminar)
}

impl Instance {
    pub fn build(file: &InstanceFile, policy: LabelPolicy) -> Result<Instance, ModelError> {
        if file.budget == 0 && policy == LabelPolicy::RequireLaminar {
            return Err(ModelError::ZeroBudget);
        }
        let budget = file.budget;

        // Projects.
        let mut project_recs: Vec<&ProjectRecord> = file.projects.iter().collect();
        project_recs.sort_by_key(|p| p.id);
        for w in project_recs.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateProject(w[0].id));
            }
        }
        for p in &project_recs {
            if p.cost <= 0 {
                return Err(ModelError::NonPositiveCost(p.id, p.cost));
            }
        }

        // Groups.
        let mut group_recs: Vec<&GroupRecord> = file.groups.iter().collect();
        group_recs.sort_by_key(|g| g.id);
        for w in group_recs.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateGroup(w[0].id));
            }
        }
        let group_pos: HashMap<GroupId, usize> = group_recs
            .iter()
            .enumerate()
            .map(|(i, g)| (g.id, i))
            .collect();
        let mut group_members: Vec<Vec<usize>> = vec![Vec::new(); group_recs.len()];
        let mut project_group = Vec::with_capacity(project_recs.len());
        for (pi, p) in project_recs.iter().enumerate() {
            let gi = *group_pos
                .get(&p.group)
                .ok_or_else(|| ModelError::UnknownId(format!("{} (group of {})", p.group, p.id)))?;
            group_members[gi].push(pi);
            project_group.push(gi);
        }
        for (gi, g) in group_recs.iter().enumerate() {
            if group_members[gi].is_empty() {
                return Err(ModelError::EmptyGroup(g.id));
            }
            if g.kind == GroupKindRecord::Contradictory && g.max_approvals == Some(0) {
                return Err(ModelError::ZeroApprovalCap(g.id));
            }
        }

        // Labels, with the root synthesized when no labels are given.
        let mut label_recs: Vec<LabelRecord> = file.labels.clone();
        if label_recs.is_empty() {
            label_recs.push(LabelRecord {
                id: LabelId(0),
                parent: None,
                min: 0,
                max: None,
            });
        }
        label_recs.sort_by_key(|l| l.id);
        for w in label_recs.windows(2) {
            if w[0].id == w[1].id {
                return Err(ModelError::DuplicateLabel(w[0].id));
            }
        }
        let label_pos: HashMap<LabelId, usize> = label_recs
            .iter()
            .enumerate()
            .map(|(i, l)| (l.id, i))
            .collect();
        let mut parent_of: Vec<Option<usize>> = Vec::with_capacity(label_recs.len());
        for l in &label_recs {
            parent_of.push(match l.parent {
                None => None,
                Some(p) => {
                    Some(*label_pos.get(&p).ok_or_else(|| {
                        ModelError::UnknownId(format!("{} (parent of {})", p, l.id))
                    })?)
                }
            });
        }
        let roots: Vec<usize> = (0..label_recs.len())
            .filter(|&i| parent_of[i].is_none())
            .collect();
        let root = match roots.as_slice() {
            [r] => *r,
            [] => return Err(ModelError::NotATree("no root label (cycle)".into())),
            many => {
                let ids: Vec<String> = many.iter().map(|&i| label_recs[i].id.to_string()).collect();
                return Err(ModelError::NotATree(format!(
                    "multiple roots: {}",
                    ids.join(", ")
                )));
            }
        };
        // Every label must reach the root.
        for start in 0..label_recs.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = parent_of[cur] {
                cur = p;
                steps += 1;
                if steps > label_recs.len() {
                    return Err(ModelError::NotATree(format!(
                        "cycle through {}",
                        label_recs[start].id
                    )));
                }
            }
        }
        let mut label_children: Vec<Vec<usize>> = vec![Vec::new(); label_recs.len()];
        for (i, p) in parent_of.iter().enumerate() {
            if let Some(p) = p {
                label_children[*p].push(i);
            }
        }
        let ancestors = |mut l: usize| {
            let mut out = vec![l];
            while let Some(p) = parent_of[l] {
                out.push(p);
                l = p;
            }
            out
        };

        // Group attachments.
        let mut groups = Vec::with_capacity(group_recs.len());
        let mut group_label_sets: Vec<BTreeSet<usize>> = Vec::with_capacity(group_recs.len());
        let mut label_direct_groups: Vec<Vec<usize>> = vec![Vec::new(); label_recs.len()];
        let mut tree_consistent = true;
        for (gi, g) in group_recs.iter().enumerate() {
            let leaf_id = g.label_leaf.unwrap_or(label_recs[root].id);
            let leaf = *label_pos
                .get(&leaf_id)
                .ok_or_else(|| ModelError::UnknownId(format!("{} (label of {})", leaf_id, g.id)))?;
            label_direct_groups[leaf].push(gi);
            let mut set: BTreeSet<usize> = ancestors(leaf).into_iter().collect();
            let on_path = set.clone();
            let mut extras = Vec::new();
            for &x in &g.extra_labels {
                let xi = *label_pos
                    .get(&x)
                    .ok_or_else(|| ModelError::UnknownId(format!("{} (label of {})", x, g.id)))?;
                if !on_path.contains(&xi) {
                    tree_consistent = false;
                    extras.push(x);
                    set.extend(ancestors(xi));
                }
            }
            extras.sort();
            extras.dedup();
            group_label_sets.push(set);
            let kind = match g.kind {
                GroupKindRecord::Standard => GroupKind::Standard,
                GroupKindRecord::Contradictory => GroupKind::Contradictory {
                    max_approvals: g.max_approvals.unwrap_or(1),
                },
            };
            groups.push(Group {
                id: g.id,
                kind,
                projects: group_members[gi]
                    .iter()
                    .map(|&p| project_recs[p].id)
                    .collect(),
                label_leaf: leaf_id,
                extra_labels: extras,
            });
        }

        // Label -> groups, used for the laminarity check.
        let mut label_groups: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); label_recs.len()];
        for (gi, set) in group_label_sets.iter().enumerate() {
            for &l in set {
                label_groups[l].insert(gi);
            }
        }
        let laminar = first_crossing(&label_groups, &label_recs).is_none();
        if policy == LabelPolicy::RequireLaminar {
            if let Some((a, b)) = first_crossing(&label_groups, &label_recs) {
                return Err(ModelError::NonLaminarLabels(a, b));
            }
            if !tree_consistent {
                let g = groups.iter().find(|g| !g.extra_labels.is_empty()).unwrap();
                return Err(ModelError::NotATree(format!(
                    "{} carries label {} outside the path of its leaf {}",
                    g.id, g.extra_labels[0], g.label_leaf
                )));
            }
        }

        let mut labels = Vec::with_capacity(label_recs.len());
        for (i, l) in label_recs.iter().enumerate() {
            let b_max = l.max.map_or(budget, |m| m.min(budget));
            if l.min > b_max {
                return Err(ModelError::BoundsInverted(l.id, l.min, b_max));
            }
            let mut children: Vec<LabelId> = label_children[i]
                .iter()
                .map(|&c| label_recs[c].id)
                .collect();
            children.sort();
            labels.push(LabelNode {
                id: l.id,
                parent: parent_of[i].map(|p| label_recs[p].id),
                b_min: l.min,
                b_max,
                declared_max: l.max,
                children,
            });
        }

        // Tie-break must name every project exactly once.
        let ids: Vec<ProjectId> = project_recs.iter().map(|p| p.id).collect();
        let project_pos: HashMap<ProjectId, usize> =
            ids.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let tiebreak = file.tiebreak.clone();
        if let Some(order) = &tiebreak.project_priority {
            let uniq: BTreeSet<ProjectId> = order.iter().copied().collect();
            if uniq.len() != order.len()
                || order.len() != ids.len()
                || !order.iter().all(|p| project_pos.contains_key(p))
            {
                return Err(ModelError::BadTieBreak(
                    "project_priority must list every project exactly once".into(),
                ));
            }
        }
        if let BundleRule::Custom(list) = &tiebreak.bundle_rule {
            for bundle in list {
                if let Some(p) = bundle.iter().find(|p| !project_pos.contains_key(p)) {
                    return Err(ModelError::BadTieBreak(format!(
                        "custom bundle names unknown {p}"
                    )));
                }
            }
        }
        let order = tiebreak.priority_order(&ids);
        let by_rank: Vec<usize> = order.iter().map(|p| project_pos[p]).collect();
        let mut rank_of = vec![0; ids.len()];
        for (r, &p) in by_rank.iter().enumerate() {
            rank_of[p] = r;
        }

        let mut label_members: Vec<Vec<usize>> = vec![Vec::new(); label_recs.len()];
        let mut project_labels: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (l, gs) in label_groups.iter().enumerate() {
            for &g in gs {
                for &p in &group_members[g] {
                    label_members[l].push(p);
                    project_labels[p].push(l);
                }
            }
            label_members[l].sort();
        }
        for pl in &mut project_labels {
            pl.sort();
        }

        // Leaves first, then the leaves of what remains, and so on.
        let mut height = vec![0usize; label_recs.len()];
        fn fill_height(n: usize, children: &[Vec<usize>], height: &mut [usize]) -> usize {
            let h = children[n]
                .iter()
                .map(|&c| fill_height(c, children, height) + 1)
                .max()
                .unwrap_or(0);
            height[n] = h;
            h
        }
        fill_height(root, &label_children, &mut height);
        let mut reverse_order: Vec<usize> = (0..label_recs.len()).collect();
        reverse_order.sort_by_key(|&l| (height[l], label_recs[l].id));
        for ch in &mut label_children {
            ch.sort_by_key(|&c| label_recs[c].id);
        }

        let projects = project_recs
            .iter()
            .map(|p| Project {
                id: p.id,
                name: p.name.clone(),
                cost: p.cost as u64,
                group: p.group,
            })
            .collect();

        Ok(Instance {
            budget,
            projects,
            groups,
            labels,
            root,
            tiebreak,
            laminar: laminar && tree_consistent,
            project_pos,
            group_pos,
            label_pos,
            project_group,
            group_members,
            label_members,
            project_labels,
            label_children,
            label_direct_groups,
            reverse_order,
            rank_of,
            by_rank,
        })
    }

    /// Canonical file form: explicit root, explicit leaves, sorted records.
    pub fn to_file(&self) -> InstanceFile {
        InstanceFile {
            budget: self.budget,
            projects: self
                .projects
                .iter()
                .map(|p| ProjectRecord {
                    id: p.id,
                    name: p.name.clone(),
                    cost: p.cost as i64,
                    group: p.group,
                })
                .collect(),
            groups: self
                .groups
                .iter()
                .map(|g| GroupRecord {
                    id: g.id,
                    kind: match g.kind {
                        GroupKind::Standard => GroupKindRecord::Standard,
                        GroupKind::Contradictory { .. } => GroupKindRecord::Contradictory,
                    },
                    max_approvals: match g.kind {
                        GroupKind::Standard => None,
                        GroupKind::Contradictory { max_approvals } => Some(max_approvals),
                    },
                    label_leaf: Some(g.label_leaf),
                    extra_labels: g.extra_labels.clone(),
                })
                .collect(),
            labels: self
                .labels
                .iter()
                .map(|l| LabelRecord {
                    id: l.id,
                    parent: l.parent,
                    min: l.b_min,
                    max: l.declared_max,
                })
                .collect(),
            tiebreak: self.tiebreak.clone(),
        }
    }

    pub fn with_tiebreak(&self, tiebreak: TieBreakPolicy) -> Result<Instance, ModelError> {
        let mut file = self.to_file();
        file.tiebreak = tiebreak;
        let policy = if self.laminar {
            LabelPolicy::RequireLaminar
        } else {
            LabelPolicy::Relaxed
        };
        Instance::build(&file, policy)
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn projects(&self) -> &[Project] {
        &self.projects
    }

    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    pub fn labels(&self) -> &[LabelNode] {
        &self.labels
    }

    pub fn root_label(&self) -> &LabelNode {
        &self.labels[self.root]
    }

    pub fn tiebreak(&self) -> &TieBreakPolicy {
        &self.tiebreak
    }

    /// True when label sets are nested-or-disjoint and match the declared tree.
    pub fn is_laminar(&self) -> bool {
        self.laminar
    }

    pub fn project(&self, id: ProjectId) -> Option<&Project> {
        self.project_pos.get(&id).map(|&i| &self.projects[i])
    }

    pub fn group(&self, id: GroupId) -> Option<&Group> {
        self.group_pos.get(&id).map(|&i| &self.groups[i])
    }

    pub fn label(&self, id: LabelId) -> Option<&LabelNode> {
        self.label_pos.get(&id).map(|&i| &self.labels[i])
    }

    pub fn project_ids(&self) -> Vec<ProjectId> {
        self.projects.iter().map(|p| p.id).collect()
    }

    /// Projects carrying label `id` (the set the funding bounds of `id` apply to).
    pub fn label_projects(&self, id: LabelId) -> Vec<ProjectId> {
        self.label_pos
            .get(&id)
            .map(|&l| {
                self.label_members[l]
                    .iter()
                    .map(|&p| self.projects[p].id)
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn is_unit_cost(&self) -> bool {
        self.projects.iter().all(|p| p.cost == 1)
    }

    pub fn max_group_size(&self) -> usize {
        self.group_members.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn total_cost(&self) -> u64 {
        self.projects.iter().map(|p| p.cost).sum()
    }

    /// Names of projects keyed by id, for reports.
    pub fn project_names(&self) -> BTreeMap<ProjectId, String> {
        self.projects
            .iter()
            .map(|p| (p.id, p.name.clone()))
            .collect()
    }

    // Dense-index accessors for the solvers.

    pub(crate) fn project_index(&self, id: ProjectId) -> Option<usize> {
        self.project_pos.get(&id).copied()
    }

    pub(crate) fn group_index(&self, id: GroupId) -> Option<usize> {
        self.group_pos.get(&id).copied()
    }

    pub(crate) fn root_index(&self) -> usize {
        self.root
    }

    pub(crate) fn cost_of(&self, p: usize) -> u64 {
        self.projects[p].cost
    }

    pub(crate) fn group_of(&self, p: usize) -> usize {
        self.project_group[p]
    }

    pub(crate) fn members_of_group(&self, g: usize) -> &[usize] {
        &self.group_members[g]
    }

    pub(crate) fn members_of_label(&self, l: usize) -> &[usize] {
        &self.label_members[l]
    }

    pub(crate) fn labels_of_project(&self, p: usize) -> &[usize] {
        &self.project_labels[p]
    }

    pub(crate) fn children_of_label(&self, l: usize) -> &[usize] {
        &self.label_children[l]
    }

    pub(crate) fn groups_at_label(&self, l: usize) -> &[usize] {
        &self.label_direct_groups[l]
    }

    /// Label indices, leaves first (only meaningful for laminar instances).
    pub(crate) fn reverse_label_order(&self) -> &[usize] {
        &self.reverse_order
    }

    pub(crate) fn rank_of(&self, p: usize) -> usize {
        self.rank_of[p]
    }

    pub(crate) fn project_at_rank(&self, r: usize) -> usize {
        self.by_rank[r]
    }
}

/// Smallest (by id pair) pair of labels whose group sets cross.
fn first_crossing(
    label_groups: &[BTreeSet<usize>],
    recs: &[LabelRecord],
) -> Option<(LabelId, LabelId)> {
    let n = label_groups.len();
    let mut best: Option<(LabelId, LabelId)> = None;
    for a in 0..n {
        for b in (a + 1)..n {
            let (sa, sb) = (&label_groups[a], &label_groups[b]);
            let inter = sa.intersection(sb).count();
            if inter > 0 && inter < sa.len() && inter < sb.len() {
                let pair = if recs[a].id < recs[b].id {
                    (recs[a].id, recs[b].id)
                } else {
                    (recs[b].id, recs[a].id)
                };
                if best.is_none_or(|b| pair < b) {
                    best = Some(pair);
                }
            }
        }
    }
    best
}
