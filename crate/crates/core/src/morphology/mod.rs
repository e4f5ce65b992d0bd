//! Modular robots as rooted trees of core/brick/hinge modules.
//!
//! The tree fixes everything a controller needs: the number of actuated
//! hinges, a stable hinge ordering (pre-order, children by ascending
//! slot), and the hinge pairs at tree distance ≤ 2 that receive
//! oscillator couplings. Robots are stored as JSON documents; the five
//! classic test-suite shapes ship with the crate and further test
//! robots come from the seeded generator in [`generate`].

mod generate;

pub use generate::generate_random_morphology;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MorphologyError {
    #[error("invalid morphology document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unknown module kind `{0}`")]
    UnknownKind(String),
    #[error("orientation must be 0 or 90, got {0}")]
    BadOrientation(u64),
    #[error("slot `{slot}` is not valid for a {kind} module")]
    SlotOutOfRange { kind: &'static str, slot: String },
    #[error("core modules may only appear at the root")]
    CoreBelowRoot,
    #[error("root module must be a core, got {0}")]
    RootNotCore(String),
    #[error("robot has no hinge")]
    NoHinges,
}

/// Module kind; arity (max child slots) is 4 / 3 / 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModuleKind {
    Core,
    Brick,
    ActiveHinge,
}

impl ModuleKind {
    pub fn slot_count(self) -> usize {
        match self {
            ModuleKind::Core => 4,
            ModuleKind::Brick => 3,
            ModuleKind::ActiveHinge => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModuleKind::Core => "core",
            ModuleKind::Brick => "brick",
            ModuleKind::ActiveHinge => "active_hinge",
        }
    }

    fn parse(s: &str) -> Result<Self, MorphologyError> {
        match s {
            "core" => Ok(ModuleKind::Core),
            "brick" => Ok(ModuleKind::Brick),
            "active_hinge" => Ok(ModuleKind::ActiveHinge),
            other => Err(MorphologyError::UnknownKind(other.to_string())),
        }
    }
}

/// Rotation of a module about its attachment axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    #[default]
    Deg0,
    Deg90,
}

impl Orientation {
    pub fn degrees(self) -> u32 {
        match self {
            Orientation::Deg0 => 0,
            Orientation::Deg90 => 90,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModuleNode {
    pub kind: ModuleKind,
    pub orientation: Orientation,
    /// Children by attachment slot; slots start at 0 and are bounded by
    /// the module kind's arity.
    pub children: BTreeMap<u8, ModuleNode>,
}

impl ModuleNode {
    pub fn new(kind: ModuleKind) -> Self {
        Self { kind, orientation: Orientation::Deg0, children: BTreeMap::new() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MorphologyTree {
    pub name: String,
    pub root: ModuleNode,
}

/// A hinge in stable traversal order; `path` holds the slot indices
/// from the root down to the hinge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hinge {
    pub index: usize,
    pub path: Vec<u8>,
}

/// Unordered hinge pairs at tree distance ≤ 2.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighbourGraph {
    pub hinge_count: usize,
    /// Pairs `(i, j)` with `i < j`, sorted lexicographically.
    pub pairs: Vec<(usize, usize)>,
}

// ---------------------------------------------------------------------
// Document format

#[derive(Serialize, Deserialize)]
struct RobotDoc {
    name: String,
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    kind: String,
    #[serde(default)]
    orientation: u64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    children: BTreeMap<String, NodeDoc>,
}

/// Parses a robot document, validating kinds, orientations and slot
/// arities.
pub fn parse_morphology(document: &str) -> Result<MorphologyTree, MorphologyError> {
    let doc: RobotDoc = serde_json::from_str(document)?;
    let root = build_node(&doc.root, true)?;
    if root.kind != ModuleKind::Core {
        return Err(MorphologyError::RootNotCore(root.kind.as_str().to_string()));
    }
    let tree = MorphologyTree { name: doc.name, root };
    Ok(tree)
}

fn build_node(doc: &NodeDoc, is_root: bool) -> Result<ModuleNode, MorphologyError> {
    let kind = ModuleKind::parse(&doc.kind)?;
    if kind == ModuleKind::Core && !is_root {
        return Err(MorphologyError::CoreBelowRoot);
    }
    let orientation = match doc.orientation {
        0 => Orientation::Deg0,
        90 => Orientation::Deg90,
        other => return Err(MorphologyError::BadOrientation(other)),
    };
    let mut children = BTreeMap::new();
    for (slot_str, child_doc) in &doc.children {
        let slot: u8 = slot_str
            .parse()
            .map_err(|_| MorphologyError::SlotOutOfRange { kind: kind.as_str(), slot: slot_str.clone() })?;
        if usize::from(slot) >= kind.slot_count() {
            return Err(MorphologyError::SlotOutOfRange { kind: kind.as_str(), slot: slot_str.clone() });
        }
        children.insert(slot, build_node(child_doc, false)?);
    }
    Ok(ModuleNode { kind, orientation, children })
}

/// Canonical document for a tree; `parse ∘ emit` is the identity.
pub fn emit_morphology(tree: &MorphologyTree) -> String {
    fn to_doc(node: &ModuleNode) -> NodeDoc {
        NodeDoc {
            kind: node.kind.as_str().to_string(),
            orientation: u64::from(node.orientation.degrees()),
            children: node
                .children
                .iter()
                .map(|(slot, child)| (slot.to_string(), to_doc(child)))
                .collect(),
        }
    }
    let doc = RobotDoc { name: tree.name.clone(), root: to_doc(&tree.root) };
    let mut out = serde_json::to_string_pretty(&doc).expect("tree serializes");
    out.push('\n');
    out
}

// ---------------------------------------------------------------------
// Traversal

/// Hinges in pre-order, children visited by ascending slot index.
pub fn enumerate_hinges(tree: &MorphologyTree) -> Vec<Hinge> {
    let mut hinges = Vec::new();
    let mut path = Vec::new();
    visit(&tree.root, &mut path, &mut hinges);
    hinges
}

fn visit(node: &ModuleNode, path: &mut Vec<u8>, hinges: &mut Vec<Hinge>) {
    if node.kind == ModuleKind::ActiveHinge {
        hinges.push(Hinge { index: hinges.len(), path: path.clone() });
    }
    for (&slot, child) in &node.children {
        path.push(slot);
        visit(child, path, hinges);
        path.pop();
    }
}

pub fn hinge_count(tree: &MorphologyTree) -> usize {
    enumerate_hinges(tree).len()
}

// ---------------------------------------------------------------------
// Neighbour graph

/// Flat arena view of the module tree: pre-order ids with parent links.
struct Arena {
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    /// Arena id of each hinge, in hinge order.
    hinge_ids: Vec<usize>,
}

fn flatten(tree: &MorphologyTree) -> Arena {
    let mut arena = Arena { parent: Vec::new(), depth: Vec::new(), hinge_ids: Vec::new() };
    fn go(node: &ModuleNode, parent: Option<usize>, depth: usize, arena: &mut Arena) {
        let id = arena.parent.len();
        arena.parent.push(parent);
        arena.depth.push(depth);
        if node.kind == ModuleKind::ActiveHinge {
            arena.hinge_ids.push(id);
        }
        for child in node.children.values() {
            go(child, Some(id), depth + 1, arena);
        }
    }
    go(&tree.root, None, 0, &mut arena);
    arena
}

/// Edge distance between two arena nodes via their lowest common
/// ancestor.
fn tree_distance(arena: &Arena, mut a: usize, mut b: usize) -> usize {
    let mut da = arena.depth[a];
    let mut db = arena.depth[b];
    let mut dist = 0;
    while da > db {
        a = arena.parent[a].expect("node above root");
        da -= 1;
        dist += 1;
    }
    while db > da {
        b = arena.parent[b].expect("node above root");
        db -= 1;
        dist += 1;
    }
    while a != b {
        a = arena.parent[a].expect("node above root");
        b = arena.parent[b].expect("node above root");
        dist += 2;
    }
    dist
}

/// All unordered hinge pairs whose module-tree distance is 1 or 2.
pub fn neighbour_pairs(tree: &MorphologyTree) -> NeighbourGraph {
    let arena = flatten(tree);
    let n = arena.hinge_ids.len();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if tree_distance(&arena, arena.hinge_ids[i], arena.hinge_ids[j]) <= 2 {
                pairs.push((i, j));
            }
        }
    }
    NeighbourGraph { hinge_count: n, pairs }
}

// ---------------------------------------------------------------------
// Bundled robots

/// Names of the robots shipped under `data/robots/`.
pub const BUNDLED_ROBOT_NAMES: [&str; 5] = ["spider", "gecko", "snake", "babya", "babyb"];

/// The five hand-picked robots bundled with the crate.
///
/// The spider is the classic quadruped: four limbs on the core, each
/// hinge–brick–hinge–brick. The other four follow shapes commonly used
/// in modular-robot test suites; their exact structures are this
/// crate's own reconstructions, so only the spider carries golden
/// structural constants in the tests.
pub fn bundled_robots() -> Vec<MorphologyTree> {
    bundled_robot_sources()
        .iter()
        .map(|(_, src)| parse_morphology(src).expect("bundled robot parses"))
        .collect()
}

pub fn bundled_robot_sources() -> [(&'static str, &'static str); 5] {
    [
        ("spider", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/robots/spider.json"))),
        ("gecko", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/robots/gecko.json"))),
        ("snake", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/robots/snake.json"))),
        ("babya", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/robots/babya.json"))),
        ("babyb", include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/robots/babyb.json"))),
    ]
}

pub fn bundled_robot(name: &str) -> Option<MorphologyTree> {
    bundled_robot_sources()
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, src)| parse_morphology(src).expect("bundled robot parses"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    /// Independent all-pairs distance oracle: BFS over the undirected
    /// module adjacency.
    fn bfs_pairs(tree: &MorphologyTree) -> Vec<(usize, usize)> {
        let arena = flatten(tree);
        let n_nodes = arena.parent.len();
        let mut adj = vec![Vec::new(); n_nodes];
        for (id, parent) in arena.parent.iter().enumerate() {
            if let Some(p) = parent {
                adj[id].push(*p);
                adj[*p].push(id);
            }
        }
        let mut pairs = Vec::new();
        for i in 0..arena.hinge_ids.len() {
            let start = arena.hinge_ids[i];
            let mut dist = vec![usize::MAX; n_nodes];
            dist[start] = 0;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if dist[v] == usize::MAX {
                        dist[v] = dist[u] + 1;
                        queue.push_back(v);
                    }
                }
            }
            for (j, &hj) in arena.hinge_ids.iter().enumerate().skip(i + 1) {
                if dist[hj] <= 2 {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    #[test]
    fn spider_golden_counts() {
        let spider = bundled_robot("spider").unwrap();
        assert_eq!(hinge_count(&spider), 8);
        assert_eq!(neighbour_pairs(&spider).pairs.len(), 10);
    }

    #[test]
    fn single_hinge_robot() {
        let doc = r#"{"name":"mono","root":{"kind":"core","children":{"0":{"kind":"active_hinge"}}}}"#;
        let tree = parse_morphology(doc).unwrap();
        assert_eq!(hinge_count(&tree), 1);
        let graph = neighbour_pairs(&tree);
        assert_eq!(graph.hinge_count, 1);
        assert!(graph.pairs.is_empty());
        assert_eq!(enumerate_hinges(&tree)[0].index, 0);
    }

    #[test]
    fn chain_of_three_hinges_has_three_pairs() {
        let doc = r#"{"name":"chain","root":{"kind":"core","children":{"0":
            {"kind":"active_hinge","children":{"0":
            {"kind":"active_hinge","children":{"0":
            {"kind":"active_hinge"}}}}}}}}"#;
        let tree = parse_morphology(doc).unwrap();
        let graph = neighbour_pairs(&tree);
        assert_eq!(graph.pairs, vec![(0, 1), (0, 2), (1, 2)]);
    }

    #[test]
    fn brick_with_out_of_range_slot_is_rejected() {
        let doc = r#"{"name":"bad","root":{"kind":"core","children":{"0":
            {"kind":"brick","children":{"3":{"kind":"active_hinge"}}}}}}"#;
        let err = parse_morphology(doc).unwrap_err();
        assert!(matches!(err, MorphologyError::SlotOutOfRange { kind: "brick", .. }));
    }

    #[test]
    fn second_core_is_rejected() {
        let doc = r#"{"name":"bad","root":{"kind":"core","children":{"0":{"kind":"core"}}}}"#;
        assert!(matches!(parse_morphology(doc), Err(MorphologyError::CoreBelowRoot)));
    }

    #[test]
    fn unknown_kind_is_rejected() {
        let doc = r#"{"name":"bad","root":{"kind":"wheel"}}"#;
        assert!(matches!(parse_morphology(doc), Err(MorphologyError::UnknownKind(_))));
    }

    #[test]
    fn parse_emit_is_identity_on_bundled_files() {
        for (name, src) in bundled_robot_sources() {
            let tree = parse_morphology(src).unwrap();
            let emitted = emit_morphology(&tree);
            assert_eq!(emitted, src, "bundled file `{name}` is not canonical");
            assert_eq!(parse_morphology(&emitted).unwrap(), tree);
        }
    }

    #[test]
    fn neighbour_pairs_match_bfs_oracle_on_bundled_robots() {
        for tree in bundled_robots() {
            let got = neighbour_pairs(&tree);
            assert_eq!(got.pairs, bfs_pairs(&tree), "robot {}", tree.name);
        }
    }

    #[test]
    fn hinge_order_is_preorder_by_slot() {
        // Hinges on core slots 1 and 3, a deeper one under slot 1.
        let doc = r#"{"name":"order","root":{"kind":"core","children":{
            "1":{"kind":"active_hinge","children":{"0":{"kind":"active_hinge"}}},
            "3":{"kind":"active_hinge"}}}}"#;
        let tree = parse_morphology(doc).unwrap();
        let hinges = enumerate_hinges(&tree);
        let paths: Vec<Vec<u8>> = hinges.iter().map(|h| h.path.clone()).collect();
        assert_eq!(paths, vec![vec![1], vec![1, 0], vec![3]]);
    }

    #[test]
    fn permuting_slots_changes_order_deterministically() {
        let a = r#"{"name":"x","root":{"kind":"core","children":{
            "0":{"kind":"active_hinge"},
            "1":{"kind":"brick","children":{"0":{"kind":"active_hinge"}}}}}}"#;
        // Same modules, slots swapped: the brick's hinge now comes first.
        let b = r#"{"name":"x","root":{"kind":"core","children":{
            "0":{"kind":"brick","children":{"0":{"kind":"active_hinge"}}},
            "1":{"kind":"active_hinge"}}}}"#;
        let ha = enumerate_hinges(&parse_morphology(a).unwrap());
        let hb = enumerate_hinges(&parse_morphology(b).unwrap());
        assert_eq!(ha[0].path, vec![0]);
        assert_eq!(ha[1].path, vec![1, 0]);
        assert_eq!(hb[0].path, vec![0, 0]);
        assert_eq!(hb[1].path, vec![1]);
    }
}
