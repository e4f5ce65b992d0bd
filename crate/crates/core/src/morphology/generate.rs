//! Seeded random test morphologies.

use super::{hinge_count, ModuleKind, ModuleNode, MorphologyTree, Orientation};
use crate::numerics::rng::RngStream;

/// Grows a random valid tree with at most `max_modules` modules
/// (including the core) and at least one hinge, retrying whole trees
/// until a hinge is present. Deterministic in the stream state.
pub fn generate_random_morphology(rng: &mut RngStream, max_modules: usize) -> MorphologyTree {
    assert!(max_modules >= 2, "need room for the core plus one module");
    loop {
        let target = 2 + rng.uniform_usize(max_modules - 1); // 2..=max_modules
        let root = grow(rng, target);
        let tree = MorphologyTree { name: format!("gen-{:016x}", rng.seed()), root };
        if hinge_count(&tree) >= 1 {
            return tree;
        }
    }
}

fn grow(rng: &mut RngStream, target_modules: usize) -> ModuleNode {
    let mut root = ModuleNode::new(ModuleKind::Core);
    // Open attachment points as paths from the root plus a free slot.
    let mut open: Vec<(Vec<u8>, u8)> = (0..4).map(|s| (Vec::new(), s)).collect();
    let mut modules = 1;
    while modules < target_modules && !open.is_empty() {
        let pick = rng.uniform_usize(open.len());
        let (path, slot) = open.swap_remove(pick);
        let kind = if rng.bernoulli(0.5) { ModuleKind::ActiveHinge } else { ModuleKind::Brick };
        let orientation = if rng.bernoulli(0.5) { Orientation::Deg0 } else { Orientation::Deg90 };
        let mut node = ModuleNode::new(kind);
        node.orientation = orientation;

        let mut child_path = path.clone();
        child_path.push(slot);
        for s in 0..kind.slot_count() as u8 {
            open.push((child_path.clone(), s));
        }
        attach(&mut root, &path, slot, node);
        modules += 1;
    }
    root
}

fn attach(root: &mut ModuleNode, path: &[u8], slot: u8, node: ModuleNode) {
    let mut cursor = root;
    for step in path {
        cursor = cursor.children.get_mut(step).expect("open slot path is valid");
    }
    cursor.children.insert(slot, node);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morphology::{emit_morphology, neighbour_pairs, parse_morphology};

    #[test]
    fn generation_is_deterministic() {
        let mut a = RngStream::new(0);
        let mut b = RngStream::new(0);
        let ta = generate_random_morphology(&mut a, 10);
        let tb = generate_random_morphology(&mut b, 10);
        assert_eq!(ta, tb);
    }

    #[test]
    fn max_two_modules_forces_a_single_hinge() {
        for seed in 0..20 {
            let mut rng = RngStream::new(seed);
            let tree = generate_random_morphology(&mut rng, 2);
            assert_eq!(hinge_count(&tree), 1, "seed {seed}");
        }
    }

    #[test]
    fn hinge_counts_are_diverse_over_many_robots() {
        let master = RngStream::new(99);
        let mut counts = std::collections::BTreeSet::new();
        for i in 0..1000u64 {
            let mut rng = master.derive(&[i]);
            let tree = generate_random_morphology(&mut rng, 12);
            counts.insert(hinge_count(&tree));
        }
        assert!(counts.len() >= 5, "hinge counts seen: {counts:?}");
    }

    #[test]
    fn generated_trees_roundtrip_and_have_valid_pairs() {
        let master = RngStream::new(7);
        for i in 0..50u64 {
            let mut rng = master.derive(&[i]);
            let tree = generate_random_morphology(&mut rng, 10);
            let reparsed = parse_morphology(&emit_morphology(&tree)).unwrap();
            assert_eq!(reparsed, tree);
            let graph = neighbour_pairs(&tree);
            for &(i, j) in &graph.pairs {
                assert!(i < j && j < graph.hinge_count);
            }
        }
    }
}
