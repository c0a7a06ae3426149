//! Recursive block partitions and their `.blocks` text form.
//!
//! One line per node: `node_id parent_id label_list`, where the root's
//! parent is `-` and labels are comma separated. A node's labels are listed
//! in increasing distance from the origin along its ray, so the last
//! remaining label of a block is the one expected on the hull.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockNode {
    pub parent: Option<usize>,
    pub labels: Vec<u32>,
    pub children: Vec<usize>,
}

impl BlockNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Node 0 is the root; ids follow pre-order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockTree {
    nodes: Vec<BlockNode>,
}

impl BlockTree {
    pub fn leaf(label: u32) -> Self {
        BlockTree {
            nodes: vec![BlockNode {
                parent: None,
                labels: vec![label],
                children: Vec::new(),
            }],
        }
    }

    /// A root over `children`, with the root's labels in `order`.
    pub fn join(children: Vec<BlockTree>, order: Vec<u32>) -> Result<Self> {
        let mut nodes = vec![BlockNode {
            parent: None,
            labels: order,
            children: Vec::new(),
        }];
        for child in children {
            let base = nodes.len();
            nodes[0].children.push(base);
            for (i, mut node) in child.nodes.into_iter().enumerate() {
                node.parent = Some(if i == 0 { 0 } else { node.parent.unwrap() + base });
                for c in &mut node.children {
                    *c += base;
                }
                nodes.push(node);
            }
        }
        let t = BlockTree { nodes };
        t.validate()?;
        Ok(t)
    }

    /// Two-level tree over a flat partition; blocks keep their listed order.
    pub fn from_partition(blocks: Vec<Vec<u32>>) -> Result<Self> {
        let order = blocks.concat();
        let children = blocks
            .into_iter()
            .map(|b| {
                if b.len() == 1 {
                    Ok(BlockTree::leaf(b[0]))
                } else {
                    let leaves = b.iter().map(|&l| BlockTree::leaf(l)).collect();
                    BlockTree::join(leaves, b)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        BlockTree::join(children, order)
    }

    pub fn shifted(&self, offset: u32) -> BlockTree {
        let mut t = self.clone();
        for n in &mut t.nodes {
            for l in &mut n.labels {
                *l += offset;
            }
        }
        t
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[BlockNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &BlockNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> &BlockNode {
        &self.nodes[0]
    }

    pub fn labels(&self) -> &[u32] {
        &self.nodes[0].labels
    }

    /// Label lists of the root's children.
    pub fn top_blocks(&self) -> Vec<&[u32]> {
        self.root()
            .children
            .iter()
            .map(|&c| self.nodes[c].labels.as_slice())
            .collect()
    }

    pub fn arity(&self) -> usize {
        self.root().children.len()
    }

    pub fn depth(&self, mut id: usize) -> usize {
        let mut d = 0;
        while let Some(p) = self.nodes[id].parent {
            id = p;
            d += 1;
        }
        d
    }

    /// Subtree rooted at `id`, renumbered.
    pub fn subtree(&self, id: usize) -> BlockTree {
        let mut nodes = Vec::new();
        let mut stack = vec![(id, None)];
        while let Some((old, parent)) = stack.pop() {
            let new = nodes.len();
            if let Some(p) = parent {
                let pn: &mut BlockNode = &mut nodes[p];
                pn.children.push(new);
            }
            nodes.push(BlockNode {
                parent,
                labels: self.nodes[old].labels.clone(),
                children: Vec::new(),
            });
            for &c in self.nodes[old].children.iter().rev() {
                stack.push((c, Some(new)));
            }
        }
        BlockTree { nodes }
    }

    pub fn validate(&self) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::NotPartition("empty block tree".into()));
        }
        for (id, node) in self.nodes.iter().enumerate() {
            let own: BTreeSet<u32> = node.labels.iter().copied().collect();
            if own.len() != node.labels.len() {
                return Err(Error::NotPartition(format!("node {id} repeats a label")));
            }
            if node.is_leaf() {
                if node.labels.len() != 1 {
                    return Err(Error::NotPartition(format!(
                        "leaf {id} has {} labels",
                        node.labels.len()
                    )));
                }
                continue;
            }
            let mut union = BTreeSet::new();
            let mut total = 0;
            for &c in &node.children {
                if self.nodes.get(c).and_then(|n| n.parent) != Some(id) {
                    return Err(Error::NotPartition(format!("node {c} is not a child of {id}")));
                }
                total += self.nodes[c].labels.len();
                union.extend(self.nodes[c].labels.iter().copied());
            }
            if total != union.len() || union != own {
                return Err(Error::NotPartition(format!(
                    "children of node {id} do not partition its labels"
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("# node parent labels\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let parent = node.parent.map_or("-".to_string(), |p| p.to_string());
            let labels: Vec<String> = node.labels.iter().map(u32::to_string).collect();
            writeln!(out, "{id} {parent} {}", labels.join(",")).unwrap();
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rows: Vec<(usize, Option<usize>, Vec<u32>, usize)> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: line_no, msg };
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", f.len())));
            }
            let id = f[0].parse().map_err(|_| err(format!("bad node id {:?}", f[0])))?;
            let parent = if f[1] == "-" {
                None
            } else {
                Some(f[1].parse().map_err(|_| err(format!("bad parent id {:?}", f[1])))?)
            };
            let labels = f[2]
                .split(',')
                .map(|s| s.parse().map_err(|_| err(format!("bad label {s:?}"))))
                .collect::<Result<Vec<u32>>>()?;
            rows.push((id, parent, labels, line_no));
        }
        let n = rows.len();
        let mut nodes: Vec<Option<BlockNode>> = vec![None; n];
        for (id, parent, labels, line) in &rows {
            if *id >= n || nodes[*id].is_some() {
                return Err(Error::Parse {
                    line: *line,
                    msg: format!("node id {id} is repeated or out of range"),
                });
            }
            nodes[*id] = Some(BlockNode {
                parent: *parent,
                labels: labels.clone(),
                children: Vec::new(),
            });
        }
        let mut nodes: Vec<BlockNode> = nodes.into_iter().map(Option::unwrap).collect();
        if n == 0 || nodes[0].parent.is_some() {
            return Err(Error::NotPartition("node 0 must be the root".into()));
        }
        for (id, _, _, line) in &rows {
            match nodes[*id].parent {
                Some(p) if p >= n || p == *id => {
                    return Err(Error::Parse {
                        line: *line,
                        msg: format!("unknown parent {p}"),
                    })
                }
                Some(p) => nodes[p].children.push(*id),
                None if *id != 0 => {
                    return Err(Error::Parse {
                        line: *line,
                        msg: "second root".into(),
                    })
                }
                None => {}
            }
        }
        for node in &mut nodes {
            node.children.sort_unstable();
        }
        let t = BlockTree { nodes };
        t.validate()?;
        Ok(t)
    }
}
