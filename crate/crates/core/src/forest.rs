//! Rooted, vertex-labeled forests encoding walk witnesses.

use crate::problem::FlawId;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ForestFlavor {
    Break,
    Recursive,
    LeftHanded,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForestNode {
    pub label: FlawId,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

/// Nodes are stored in creation order; `roots` and `children` index into `nodes`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessForest {
    pub flavor: ForestFlavor,
    pub nodes: Vec<ForestNode>,
    pub roots: Vec<usize>,
}

impl WitnessForest {
    pub fn new(flavor: ForestFlavor) -> Self {
        WitnessForest {
            flavor,
            nodes: Vec::new(),
            roots: Vec::new(),
        }
    }

    pub fn add(&mut self, label: FlawId, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(ForestNode {
            label,
            parent,
            children: Vec::new(),
        });
        match parent {
            Some(p) => self.nodes[p].children.push(id),
            None => self.roots.push(id),
        }
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root_labels(&self) -> Vec<FlawId> {
        self.roots.iter().map(|&r| self.nodes[r].label).collect()
    }

    pub fn child_labels(&self, node: usize) -> Vec<FlawId> {
        self.nodes[node]
            .children
            .iter()
            .map(|&c| self.nodes[c].label)
            .collect()
    }

    /// Every sibling group, the roots included.
    pub fn sibling_groups(&self) -> impl Iterator<Item = Vec<FlawId>> + '_ {
        std::iter::once(self.root_labels())
            .chain((0..self.nodes.len()).map(move |n| self.child_labels(n)))
    }

    /// Root labels distinct and every vertex's child labels distinct.
    pub fn siblings_distinct(&self) -> bool {
        self.sibling_groups().all(|mut g| {
            let n = g.len();
            g.sort_unstable();
            g.dedup();
            g.len() == n
        })
    }

    /// Structural sanity: parent links agree with child lists and every node
    /// is reachable from exactly one root.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack: Vec<usize> = Vec::new();
        for &r in &self.roots {
            if r >= self.nodes.len() || self.nodes[r].parent.is_some() {
                return false;
            }
            stack.push(r);
        }
        while let Some(n) = stack.pop() {
            if seen[n] {
                return false;
            }
            seen[n] = true;
            for &c in &self.nodes[n].children {
                if c >= self.nodes.len() || self.nodes[c].parent != Some(n) {
                    return false;
                }
                stack.push(c);
            }
        }
        seen.into_iter().all(|s| s)
    }
}
