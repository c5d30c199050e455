use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{render_class, ClassDecl, ProgramNode};

/// Child indices from the root to a node.
pub type NodePath = Vec<usize>;

/// Arranges declarations in a tree of the given arity. Siblings are grouped
/// bottom-up from the left; a trailing node that does not fill a group is
/// carried to the next level unchanged. The root is always a `Group`, and
/// the depth is the ceiling of the logarithm of the class count.
pub fn balance(decls: Vec<ClassDecl>, arity: usize) -> ProgramNode {
    assert!(arity >= 2, "arity must be at least 2");
    let mut level: Vec<ProgramNode> = decls.into_iter().map(ProgramNode::Leaf).collect();
    if level.len() <= 1 {
        return ProgramNode::Group(level);
    }
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(arity));
        let mut iter = level.into_iter().peekable();
        while iter.peek().is_some() {
            let chunk: Vec<ProgramNode> = iter.by_ref().take(arity).collect();
            if chunk.len() == 1 {
                next.extend(chunk);
            } else {
                next.push(ProgramNode::Group(chunk));
            }
        }
        level = next;
    }
    level.pop().expect("non-empty level")
}

/// SHA-256 digest of a node's structure.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeKey(pub [u8; 32]);

impl NodeKey {
    pub fn to_hex(&self) -> String {
        hex::encode(self.0)
    }

    pub fn from_hex(s: &str) -> Option<Self> {
        let bytes = hex::decode(s).ok()?;
        Some(NodeKey(bytes.try_into().ok()?))
    }
}

impl fmt::Display for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl fmt::Debug for NodeKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "NodeKey({})", &self.to_hex()[..12])
    }
}

/// Key of a leaf: the digest of its canonical rendering, so source
/// positions and formatting do not contribute.
pub fn leaf_key(decl: &ClassDecl) -> NodeKey {
    let mut h = Sha256::new();
    h.update(b"L");
    h.update(render_class(decl).as_bytes());
    NodeKey(h.finalize().into())
}

/// Key of a group from its children's keys.
pub fn group_key(children: &[NodeKey]) -> NodeKey {
    let mut h = Sha256::new();
    h.update(b"G");
    h.update((children.len() as u64).to_le_bytes());
    for c in children {
        h.update(c.0);
    }
    NodeKey(h.finalize().into())
}

/// Structural key of a node.
pub fn node_key(node: &ProgramNode) -> NodeKey {
    match node {
        ProgramNode::Leaf(c) => leaf_key(c),
        ProgramNode::Group(children) => group_key(&children.iter().map(node_key).collect::<Vec<_>>()),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{parse_classes, parse_program};
    use super::*;

    fn classes(n: usize) -> Vec<ClassDecl> {
        let text: String = (1..=n)
            .map(|i| format!("class C{i} extends Object {{ C{i}() {{ super(); }} }}\n"))
            .collect();
        parse_classes(&text).unwrap()
    }

    fn shape(node: &ProgramNode) -> String {
        match node {
            ProgramNode::Leaf(c) => c.name.to_string(),
            ProgramNode::Group(children) => {
                format!("({})", children.iter().map(shape).collect::<Vec<_>>().join(" "))
            }
        }
    }

    #[test]
    fn seven_classes_binary() {
        let t = balance(classes(7), 2);
        assert_eq!(shape(&t), "(((C1 C2) (C3 C4)) ((C5 C6) C7))");
        assert_eq!(t.depth(), 3);
    }

    #[test]
    fn degenerate_sizes() {
        assert_eq!(balance(vec![], 2), ProgramNode::Group(vec![]));
        let one = balance(classes(1), 2);
        assert!(matches!(&one, ProgramNode::Group(c) if matches!(c.as_slice(), [ProgramNode::Leaf(_)])));
    }

    #[test]
    fn depth_is_ceil_log() {
        for n in 2..=70usize {
            let expected = (n as f64).log2().ceil() as usize;
            assert_eq!(balance(classes(n), 2).depth(), expected, "n = {n}");
        }
        assert_eq!(balance(classes(1243), 2).depth(), 11);
        assert_eq!(balance(classes(10), 3).depth(), 3);
    }

    #[test]
    fn keys_ignore_whitespace() {
        let a = parse_program("class A extends Object { A() { super(); } A m() { return this; } }").unwrap();
        let b =
            parse_program("class A extends Object {\n  A() { super(); }\n  A m() {\n    return this;\n  }\n}").unwrap();
        assert_eq!(node_key(&a), node_key(&b));
        let c = parse_program("class A extends Object { A() { super(); } A m() { return new A(); } }").unwrap();
        assert_ne!(node_key(&a), node_key(&c));
    }

    #[test]
    fn key_hex_round_trip() {
        let k = node_key(&balance(classes(3), 2));
        assert_eq!(NodeKey::from_hex(&k.to_hex()), Some(k));
    }
}
