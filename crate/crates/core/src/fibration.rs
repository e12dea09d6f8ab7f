//! Section separation in a genus-0 fibration, as a combinatorial state
//! machine: sections group into contact classes over base components, each
//! class carries a symmetric table of intersection multiplicities, and
//! blowing up a maximal class decrements its table by exactly one, splitting
//! the class where contact dies. Fiber trees record the exceptional
//! components, and a ledger records every step.
//!
//! The multiplicity tables are required to be ultrametric (among the three
//! pairwise values of any triple, the two smallest coincide). That is what
//! orders of tangency of sections satisfy, and it makes the post-decrement
//! contact relation transitive, so class splitting is well defined.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FibrationError {
    #[error("invalid separation state: {0}")]
    InvalidState(String),
    #[error("cannot blow up a singleton class")]
    SingletonCenter,
    #[error("state is already fully separated")]
    FullySeparated,
    #[error("no class {members:?} on component {component}")]
    NoSuchCenter { component: u32, members: Vec<u32> },
    #[error("pullback map does not cover label `{0}`")]
    UnmappedLabel(String),
}

/// Sections agreeing along one base component, with their pairwise contact
/// multiplicities (keys normalized to i < j, table complete on the members).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContactClass {
    pub members: BTreeSet<u32>,
    pub mult: BTreeMap<(u32, u32), u64>,
}

impl ContactClass {
    pub fn new(members: impl IntoIterator<Item = u32>, mult: BTreeMap<(u32, u32), u64>) -> Self {
        ContactClass {
            members: members.into_iter().collect(),
            mult,
        }
    }

    pub fn multiplicity(&self, i: u32, j: u32) -> Option<u64> {
        let key = if i < j { (i, j) } else { (j, i) };
        self.mult.get(&key).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentRecord {
    pub id: u32,
    pub classes: Vec<ContactClass>,
}

/// The full separation state: sections are labeled 1..=sections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationState {
    pub sections: u32,
    pub components: Vec<ComponentRecord>,
}

/// The descent measure: maximal class size, number of classes attaining it,
/// and the sum of all multiplicities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct DescentMeasure {
    pub n_p: usize,
    pub count_at_max: usize,
    pub total: u64,
}

impl SeparationState {
    /// All type invariants: member ranges, disjoint classes per component,
    /// complete positive tables, and the ultrametric triple condition.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen_components = BTreeSet::new();
        for comp in &self.components {
            if !seen_components.insert(comp.id) {
                return Err(format!("component id {} appears twice", comp.id));
            }
            let mut seen_members: BTreeSet<u32> = BTreeSet::new();
            for class in &comp.classes {
                if class.members.is_empty() {
                    return Err(format!("empty class on component {}", comp.id));
                }
                for &m in &class.members {
                    if m == 0 || m > self.sections {
                        return Err(format!(
                            "section {} outside 1..={} on component {}",
                            m, self.sections, comp.id
                        ));
                    }
                    if !seen_members.insert(m) {
                        return Err(format!(
                            "section {} lies in two classes of component {}",
                            m, comp.id
                        ));
                    }
                }
                let members: Vec<u32> = class.members.iter().copied().collect();
                let mut expected_keys = BTreeSet::new();
                for (a, &i) in members.iter().enumerate() {
                    for &j in &members[a + 1..] {
                        expected_keys.insert((i, j));
                        match class.multiplicity(i, j) {
                            None => {
                                return Err(format!(
                                    "missing multiplicity for pair ({i},{j}) on component {}",
                                    comp.id
                                ))
                            }
                            Some(0) => {
                                return Err(format!(
                                    "multiplicity of ({i},{j}) on component {} must be >= 1",
                                    comp.id
                                ))
                            }
                            Some(_) => {}
                        }
                    }
                }
                for key in class.mult.keys() {
                    if !expected_keys.contains(key) {
                        return Err(format!(
                            "stray multiplicity key {:?} on component {}",
                            key, comp.id
                        ));
                    }
                }
                // Ultrametric: the two smallest of any triple's three
                // pairwise values are equal.
                for (a, &i) in members.iter().enumerate() {
                    for (b, &j) in members.iter().enumerate().skip(a + 1) {
                        for &k in &members[b + 1..] {
                            let mut vals = [
                                class.multiplicity(i, j).expect("checked above"),
                                class.multiplicity(i, k).expect("checked above"),
                                class.multiplicity(j, k).expect("checked above"),
                            ];
                            vals.sort_unstable();
                            if vals[0] != vals[1] {
                                return Err(format!(
                                    "triple ({i},{j},{k}) on component {} is not ultrametric: {:?}",
                                    comp.id, vals
                                ));
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn measure(&self) -> DescentMeasure {
        let mut n_p = 1;
        let mut count_at_max = 0;
        let mut total = 0u64;
        for comp in &self.components {
            for class in &comp.classes {
                total += class.mult.values().sum::<u64>();
                match class.members.len().cmp(&n_p) {
                    std::cmp::Ordering::Greater => {
                        n_p = class.members.len();
                        count_at_max = 1;
                    }
                    std::cmp::Ordering::Equal => count_at_max += 1,
                    std::cmp::Ordering::Less => {}
                }
            }
        }
        DescentMeasure {
            n_p,
            count_at_max,
            total,
        }
    }
}

/// A blow-up center: one class, identified by component and member set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Center {
    pub component: u32,
    pub members: BTreeSet<u32>,
}

/// Chooses a class of maximal size; ties go to the smallest component id,
/// then the lexicographically least member set.
pub fn select_center(state: &SeparationState) -> Result<(Center, DescentMeasure), FibrationError> {
    state
        .validate()
        .map_err(FibrationError::InvalidState)?;
    let measure = state.measure();
    if measure.n_p < 2 {
        return Err(FibrationError::FullySeparated);
    }
    let mut best: Option<Center> = None;
    let mut components: Vec<&ComponentRecord> = state.components.iter().collect();
    components.sort_by_key(|c| c.id);
    for comp in components {
        for class in &comp.classes {
            if class.members.len() != measure.n_p {
                continue;
            }
            let candidate = Center {
                component: comp.id,
                members: class.members.clone(),
            };
            let better = match &best {
                None => true,
                Some(b) => {
                    (candidate.component, candidate.members.iter().collect::<Vec<_>>())
                        < (b.component, b.members.iter().collect::<Vec<_>>())
                }
            };
            if better {
                best = Some(candidate);
            }
        }
    }
    Ok((best.expect("n_p >= 2 means a maximal class exists"), measure))
}

/// One ledger record: the class blown up, its table before and after, and
/// the label of the new exceptional divisor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LedgerEntry {
    pub step: usize,
    pub component: u32,
    pub members: Vec<u32>,
    pub before: BTreeMap<(u32, u32), u64>,
    pub after: BTreeMap<(u32, u32), u64>,
    pub exceptional: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BlowupLedger {
    pub entries: Vec<LedgerEntry>,
}

/// Blows up one class: every pairwise multiplicity drops by exactly one,
/// the class splits along surviving contact (transitive by ultrametricity),
/// and singleton survivors leave the class list.
pub fn blowup_step(
    state: &SeparationState,
    center: &Center,
    step: usize,
) -> Result<(SeparationState, LedgerEntry), FibrationError> {
    state
        .validate()
        .map_err(FibrationError::InvalidState)?;
    let comp_index = state
        .components
        .iter()
        .position(|c| c.id == center.component)
        .ok_or_else(|| FibrationError::NoSuchCenter {
            component: center.component,
            members: center.members.iter().copied().collect(),
        })?;
    let class_index = state.components[comp_index]
        .classes
        .iter()
        .position(|c| c.members == center.members)
        .ok_or_else(|| FibrationError::NoSuchCenter {
            component: center.component,
            members: center.members.iter().copied().collect(),
        })?;
    let class = &state.components[comp_index].classes[class_index];
    if class.members.len() < 2 {
        return Err(FibrationError::SingletonCenter);
    }

    let before = class.mult.clone();
    let after: BTreeMap<(u32, u32), u64> =
        before.iter().map(|(&k, &v)| (k, v - 1)).collect();

    // Contact components of the decremented relation.
    let members: Vec<u32> = class.members.iter().copied().collect();
    let mut remaining: BTreeSet<u32> = class.members.clone();
    let mut subclasses: Vec<BTreeSet<u32>> = Vec::new();
    while let Some(&seed) = remaining.iter().next() {
        let mut group = BTreeSet::from([seed]);
        let mut frontier = vec![seed];
        while let Some(i) = frontier.pop() {
            for &j in &members {
                if group.contains(&j) {
                    continue;
                }
                let key = if i < j { (i, j) } else { (j, i) };
                if after.get(&key).copied().unwrap_or(0) >= 1 {
                    group.insert(j);
                    frontier.push(j);
                }
            }
        }
        for g in &group {
            remaining.remove(g);
        }
        subclasses.push(group);
    }
    subclasses.sort();

    let mut new_state = state.clone();
    let classes = &mut new_state.components[comp_index].classes;
    classes.remove(class_index);
    for group in subclasses {
        if group.len() < 2 {
            continue;
        }
        let mult: BTreeMap<(u32, u32), u64> = after
            .iter()
            .filter(|((i, j), _)| group.contains(i) && group.contains(j))
            .map(|(&k, &v)| (k, v))
            .collect();
        debug_assert!(mult.values().all(|&v| v >= 1), "survivors keep contact");
        classes.push(ContactClass {
            members: group,
            mult,
        });
    }
    classes.sort_by(|a, b| a.members.cmp(&b.members));

    debug_assert!(new_state.validate().is_ok());
    let entry = LedgerEntry {
        step,
        component: center.component,
        members: members.clone(),
        before,
        after,
        exceptional: format!("E{step}"),
    };
    Ok((new_state, entry))
}

/// The reduced fiber over one base component: a tree of components with the
/// original fiber as root, and every section assigned to a vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberTree {
    pub component: u32,
    pub vertices: usize,
    pub edges: Vec<(usize, usize)>,
    pub assignment: BTreeMap<u32, usize>,
}

impl FiberTree {
    pub fn initial(component: u32, sections: u32) -> FiberTree {
        FiberTree {
            component,
            vertices: 1,
            edges: Vec::new(),
            assignment: (1..=sections).map(|s| (s, 0)).collect(),
        }
    }

    /// Attaches one new vertex at the common vertex of the blown-up class
    /// and moves every class member onto it.
    fn apply_blowup(&mut self, members: &BTreeSet<u32>) {
        let anchor = members
            .iter()
            .next()
            .map(|m| self.assignment[m])
            .expect("blow-up classes are nonempty");
        let new_vertex = self.vertices;
        self.vertices += 1;
        self.edges.push((anchor, new_vertex));
        for m in members {
            self.assignment.insert(*m, new_vertex);
        }
    }
}

/// Connectedness, acyclicity, total assignment, and consistency with the
/// state: all sections of one contact class sit on one common vertex.
pub fn fiber_tree_check(tree: &FiberTree, state: &SeparationState) -> bool {
    if tree.vertices == 0 || tree.edges.len() + 1 != tree.vertices {
        return false;
    }
    let mut adjacency = vec![Vec::new(); tree.vertices];
    for &(a, b) in &tree.edges {
        if a >= tree.vertices || b >= tree.vertices {
            return false;
        }
        adjacency[a].push(b);
        adjacency[b].push(a);
    }
    let mut seen = vec![false; tree.vertices];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &w in &adjacency[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    if !seen.iter().all(|&s| s) {
        return false; // disconnected, or (with the edge count) cyclic
    }
    for s in 1..=state.sections {
        match tree.assignment.get(&s) {
            Some(&v) if v < tree.vertices => {}
            _ => return false,
        }
    }
    let Some(comp) = state.components.iter().find(|c| c.id == tree.component) else {
        return true;
    };
    comp.classes.iter().all(|class| {
        let mut vertices = class.members.iter().map(|m| tree.assignment[m]);
        let first = vertices.next();
        vertices.all(|v| Some(v) == first)
    })
}

/// Full run of a separation: intermediate states, ledger, and fiber trees.
#[derive(Clone, Debug)]
pub struct SeparationRun {
    pub final_state: SeparationState,
    pub ledger: BlowupLedger,
    pub trees: Vec<FiberTree>,
    /// Measures observed before each step, ending with the final measure.
    pub measures: Vec<DescentMeasure>,
    /// Every intermediate state, starting with the input.
    pub states: Vec<SeparationState>,
    /// Fiber trees after each step, aligned with `states`.
    pub tree_history: Vec<Vec<FiberTree>>,
}

/// Iterates select-center and blow-up until every class is a singleton.
pub fn separate_all(state: &SeparationState) -> Result<SeparationRun, FibrationError> {
    state
        .validate()
        .map_err(FibrationError::InvalidState)?;
    let mut current = state.clone();
    let mut ledger = BlowupLedger::default();
    let mut trees: BTreeMap<u32, FiberTree> = state
        .components
        .iter()
        .map(|c| (c.id, FiberTree::initial(c.id, state.sections)))
        .collect();
    let mut measures = vec![current.measure()];
    let mut states = vec![current.clone()];
    let mut tree_history = vec![trees.values().cloned().collect::<Vec<_>>()];
    loop {
        match select_center(&current) {
            Err(FibrationError::FullySeparated) => break,
            Err(e) => return Err(e),
            Ok((center, _)) => {
                let step = ledger.entries.len() + 1;
                let (next, entry) = blowup_step(&current, &center, step)?;
                trees
                    .get_mut(&center.component)
                    .expect("trees cover all components")
                    .apply_blowup(&center.members);
                ledger.entries.push(entry);
                current = next;
                measures.push(current.measure());
                states.push(current.clone());
                tree_history.push(trees.values().cloned().collect());
            }
        }
    }
    Ok(SeparationRun {
        final_state: current,
        ledger,
        trees: trees.into_values().collect(),
        measures,
        states,
        tree_history,
    })
}

/// One stage of a composite morphism: its own exceptional divisors and the
/// pullback of labels coming from earlier stages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub exceptional: BTreeSet<String>,
    pub pullback: BTreeMap<String, BTreeSet<String>>,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage[{} divisors]", self.exceptional.len())
    }
}

/// Exceptional locus of a composite: fold of
/// `E(f ∘ g) = g^{-1}(E(f)) ∪ E(g)` across the stages, outermost first.
pub fn exceptional_composite(stages: &[Stage]) -> Result<BTreeSet<String>, FibrationError> {
    let mut acc: BTreeSet<String> = BTreeSet::new();
    for (index, stage) in stages.iter().enumerate() {
        if index == 0 {
            acc = stage.exceptional.clone();
            continue;
        }
        let mut pulled = BTreeSet::new();
        for label in &acc {
            let images = stage
                .pullback
                .get(label)
                .ok_or_else(|| FibrationError::UnmappedLabel(label.clone()))?;
            pulled.extend(images.iter().cloned());
        }
        pulled.extend(stage.exceptional.iter().cloned());
        acc = pulled;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(members: &[u32], mult: &[((u32, u32), u64)]) -> ContactClass {
        ContactClass::new(members.iter().copied(), mult.iter().copied().collect())
    }

    fn single_component_state(sections: u32, classes: Vec<ContactClass>) -> SeparationState {
        SeparationState {
            sections,
            components: vec![ComponentRecord { id: 1, classes }],
        }
    }

    #[test]
    fn ultrametric_validation() {
        // Two smallest of (2,1,1) coincide: valid.
        let s = single_component_state(
            3,
            vec![class(
                &[1, 2, 3],
                &[((1, 2), 2), ((1, 3), 1), ((2, 3), 1)],
            )],
        );
        assert!(s.validate().is_ok());
        // (2,2,1): the two smallest are 1 and 2: invalid.
        let s = single_component_state(
            3,
            vec![class(
                &[1, 2, 3],
                &[((1, 2), 2), ((1, 3), 2), ((2, 3), 1)],
            )],
        );
        assert!(s.validate().is_err());
    }

    #[test]
    fn singleton_classes_are_valid() {
        let s = single_component_state(2, vec![class(&[1], &[]), class(&[2], &[])]);
        assert!(s.validate().is_ok());
        assert_eq!(s.measure().n_p, 1);
    }

    #[test]
    fn zero_multiplicity_is_invalid() {
        let s = single_component_state(2, vec![class(&[1, 2], &[((1, 2), 0)])]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn missing_pair_is_invalid() {
        let s = single_component_state(3, vec![class(&[1, 2, 3], &[((1, 2), 1), ((1, 3), 1)])]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn select_center_tie_breaks() {
        // Classes {1,2} on component 2 and {3,4} on component 1.
        let s = SeparationState {
            sections: 4,
            components: vec![
                ComponentRecord {
                    id: 2,
                    classes: vec![class(&[1, 2], &[((1, 2), 1)])],
                },
                ComponentRecord {
                    id: 1,
                    classes: vec![class(&[3, 4], &[((3, 4), 1)])],
                },
            ],
        };
        let (center, measure) = select_center(&s).unwrap();
        assert_eq!(center.component, 1);
        assert_eq!(measure.n_p, 2);
        assert_eq!(measure.count_at_max, 2);
    }

    #[test]
    fn select_center_prefers_larger_class() {
        let s = single_component_state(
            5,
            vec![
                class(&[1, 2, 3], &[((1, 2), 1), ((1, 3), 1), ((2, 3), 1)]),
                class(&[4, 5], &[((4, 5), 3)]),
            ],
        );
        let (center, measure) = select_center(&s).unwrap();
        assert_eq!(center.members, BTreeSet::from([1, 2, 3]));
        assert_eq!(measure.n_p, 3);
        assert_eq!(measure.count_at_max, 1);
    }

    #[test]
    fn blowup_splits_off_separated_section() {
        let s = single_component_state(
            3,
            vec![class(
                &[1, 2, 3],
                &[((1, 2), 2), ((1, 3), 1), ((2, 3), 1)],
            )],
        );
        let (center, measure) = select_center(&s).unwrap();
        assert_eq!(measure.total, 4);
        let (next, entry) = blowup_step(&s, &center, 1).unwrap();
        let classes = &next.components[0].classes;
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].members, BTreeSet::from([1, 2]));
        assert_eq!(classes[0].multiplicity(1, 2), Some(1));
        assert_eq!(next.measure().n_p, 2);
        assert_eq!(next.measure().total, 1);
        assert_eq!(entry.exceptional, "E1");
        assert_eq!(entry.after[&(1, 3)], 0);
    }

    #[test]
    fn blowup_with_multiplicity_one_separates_fully() {
        let s = single_component_state(2, vec![class(&[1, 2], &[((1, 2), 1)])]);
        let (center, _) = select_center(&s).unwrap();
        let (next, _) = blowup_step(&s, &center, 1).unwrap();
        assert!(next.components[0].classes.is_empty());
        assert_eq!(next.measure().n_p, 1);
    }

    #[test]
    fn blowup_only_decrements_when_contact_survives() {
        let s = single_component_state(2, vec![class(&[1, 2], &[((1, 2), 3)])]);
        let (center, before) = select_center(&s).unwrap();
        let (next, _) = blowup_step(&s, &center, 1).unwrap();
        let after = next.measure();
        assert_eq!(next.components[0].classes[0].multiplicity(1, 2), Some(2));
        assert_eq!((after.n_p, after.count_at_max), (before.n_p, before.count_at_max));
        assert!(after.total < before.total);
    }

    #[test]
    fn singleton_center_is_rejected() {
        let s = single_component_state(2, vec![class(&[1], &[]), class(&[2], &[])]);
        let center = Center {
            component: 1,
            members: BTreeSet::from([1]),
        };
        assert!(matches!(
            blowup_step(&s, &center, 1),
            Err(FibrationError::SingletonCenter)
        ));
    }

    #[test]
    fn separate_all_examples() {
        // Already separated: empty ledger.
        let s = single_component_state(2, vec![]);
        let run = separate_all(&s).unwrap();
        assert!(run.ledger.entries.is_empty());

        // One class {1,2} with multiplicity 2: exactly two steps.
        let s = single_component_state(2, vec![class(&[1, 2], &[((1, 2), 2)])]);
        let run = separate_all(&s).unwrap();
        assert_eq!(run.ledger.entries.len(), 2);

        // The (2,1,1) triple: two steps in total.
        let s = single_component_state(
            3,
            vec![class(
                &[1, 2, 3],
                &[((1, 2), 2), ((1, 3), 1), ((2, 3), 1)],
            )],
        );
        let run = separate_all(&s).unwrap();
        assert_eq!(run.ledger.entries.len(), 2);
        assert_eq!(run.final_state.measure().n_p, 1);
    }

    #[test]
    fn run_invariants_hold() {
        let s = SeparationState {
            sections: 5,
            components: vec![
                ComponentRecord {
                    id: 1,
                    classes: vec![class(
                        &[1, 2, 3],
                        &[((1, 2), 3), ((1, 3), 1), ((2, 3), 1)],
                    )],
                },
                ComponentRecord {
                    id: 2,
                    classes: vec![class(&[4, 5], &[((4, 5), 2)])],
                },
            ],
        };
        let initial_total = s.measure().total;
        let run = separate_all(&s).unwrap();
        assert!(run.ledger.entries.len() as u64 <= initial_total);
        for w in run.measures.windows(2) {
            assert!(w[1].total < w[0].total, "total strictly decreases");
            assert!(
                (w[1].n_p, w[1].count_at_max) <= (w[0].n_p, w[0].count_at_max),
                "(n_p, N_p) never lex-increases"
            );
        }
        for state in &run.states {
            assert!(state.validate().is_ok());
        }
        for tree in &run.trees {
            assert!(fiber_tree_check(tree, &run.final_state));
        }
        // One tree vertex added per step on the affected component.
        let steps_on: BTreeMap<u32, usize> =
            run.ledger.entries.iter().fold(BTreeMap::new(), |mut acc, e| {
                *acc.entry(e.component).or_default() += 1;
                acc
            });
        for tree in &run.trees {
            assert_eq!(
                tree.vertices,
                1 + steps_on.get(&tree.component).copied().unwrap_or(0)
            );
            assert_eq!(tree.assignment.len() as u32, run.final_state.sections);
        }
    }

    #[test]
    fn fiber_tree_rejects_cycles_and_disconnection() {
        let state = single_component_state(1, vec![]);
        let mut tree = FiberTree::initial(1, 1);
        tree.vertices = 3;
        tree.edges = vec![(0, 1), (1, 2), (2, 0)];
        assert!(!fiber_tree_check(&tree, &state));
        let mut tree = FiberTree::initial(1, 1);
        tree.vertices = 2;
        tree.edges = vec![];
        assert!(!fiber_tree_check(&tree, &state));
    }

    #[test]
    fn fiber_tree_requires_classes_on_common_vertex() {
        let state = single_component_state(2, vec![class(&[1, 2], &[((1, 2), 1)])]);
        let mut tree = FiberTree::initial(1, 2);
        tree.vertices = 2;
        tree.edges = vec![(0, 1)];
        tree.assignment.insert(2, 1);
        assert!(!fiber_tree_check(&tree, &state));
    }

    fn stage(exceptional: &[&str], pullback: &[(&str, &[&str])]) -> Stage {
        Stage {
            exceptional: exceptional.iter().map(|s| s.to_string()).collect(),
            pullback: pullback
                .iter()
                .map(|(k, v)| {
                    (
                        k.to_string(),
                        v.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>(),
                    )
                })
                .collect(),
        }
    }

    #[test]
    fn composite_of_one_stage_is_itself() {
        let s = stage(&["A"], &[]);
        assert_eq!(
            exceptional_composite(&[s.clone()]).unwrap(),
            s.exceptional
        );
    }

    #[test]
    fn composite_union_rule() {
        let f = stage(&["A"], &[]);
        let g = stage(&["B"], &[("A", &["A'"])]);
        let out = exceptional_composite(&[f, g]).unwrap();
        assert_eq!(
            out,
            ["A'", "B"].iter().map(|s| s.to_string()).collect()
        );
    }

    #[test]
    fn composite_is_associative_over_grouping() {
        let f = stage(&["A"], &[]);
        let g = stage(&["B"], &[("A", &["A1", "A2"])]);
        let h = stage(
            &["C"],
            &[("A1", &["A1h"]), ("A2", &["A2h"]), ("B", &["Bh"])],
        );
        let direct = exceptional_composite(&[f.clone(), g.clone(), h.clone()]).unwrap();
        // Group the first two stages into one composite stage, then fold.
        let fg_exceptional = exceptional_composite(&[f.clone(), g.clone()]).unwrap();
        let fg = Stage {
            exceptional: fg_exceptional,
            pullback: BTreeMap::new(),
        };
        let grouped = exceptional_composite(&[fg, h]).unwrap();
        assert_eq!(direct, grouped);
    }

    #[test]
    fn composite_rejects_unmapped_labels() {
        let f = stage(&["A"], &[]);
        let g = stage(&["B"], &[]);
        assert!(matches!(
            exceptional_composite(&[f, g]),
            Err(FibrationError::UnmappedLabel(_))
        ));
    }
}
