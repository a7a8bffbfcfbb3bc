use crate::testcase::{Statement, TestCase};

/// Append-only store of test cases that extend one another. Each entry keeps
/// only the statements it adds to its parent.
#[derive(Debug, Clone, Default)]
pub struct TestArchive {
    nodes: Vec<Node>,
}

#[derive(Debug, Clone)]
struct Node {
    parent: Option<usize>,
    suffix: Vec<Statement>,
    len: usize,
}

impl TestArchive {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Stores `t`, which must start with the test stored at `parent`.
    pub fn push_extension(&mut self, parent: Option<usize>, t: &TestCase) -> usize {
        let prefix = parent.map_or(0, |p| self.nodes[p].len);
        debug_assert!(t.len() >= prefix);
        self.nodes.push(Node {
            parent,
            suffix: t.statements[prefix..].to_vec(),
            len: t.len(),
        });
        self.nodes.len() - 1
    }

    pub fn test_len(&self, id: usize) -> usize {
        self.nodes[id].len
    }

    pub fn get(&self, id: usize) -> TestCase {
        let mut chain = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.nodes[i].parent;
        }
        let mut statements = Vec::with_capacity(self.nodes[id].len);
        for i in chain.into_iter().rev() {
            statements.extend(self.nodes[i].suffix.iter().cloned());
        }
        TestCase { statements }
    }
}
