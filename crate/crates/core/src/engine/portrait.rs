use std::collections::BTreeMap;

use crate::arith::F2Vector;

/// Depth-limited decoration of the tree: the first-layer translation and,
/// for each first-layer vertex with a non-trivial section, that section's portrait.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Portrait {
    pub translation: F2Vector,
    pub children: BTreeMap<F2Vector, Portrait>,
}

impl Portrait {
    pub fn leaf(translation: F2Vector) -> Portrait {
        Portrait {
            translation,
            children: BTreeMap::new(),
        }
    }

    /// Number of levels below this node that carry data.
    pub fn depth(&self) -> u32 {
        self.children.values().map(|c| c.depth() + 1).max().unwrap_or(0)
    }

    /// Total number of stored nodes.
    pub fn size(&self) -> usize {
        1 + self.children.values().map(Portrait::size).sum::<usize>()
    }
}
