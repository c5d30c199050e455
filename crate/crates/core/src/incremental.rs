//! Memoized rechecking. Node results are keyed by structural digest, so a
//! node is recomputed only when something in its subtree changed.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::cocontextual::{check_group, check_leaf, finish_root, CoOutcome, NodeResult, VarGen};
use crate::requirements::Tuning;
use crate::syntax::{group_key, leaf_key, ClassDecl, ClassName, NodeKey, NodePath, ProgramNode};

/// First token of a cache file.
pub const CACHE_MAGIC: &str = "cocofj-cache";
pub const CACHE_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SessionError {
    #[error("no node at path {0:?}")]
    BadPath(NodePath),
    #[error("class {0} is not declared")]
    UnknownClass(ClassName),
    #[error("malformed cache file: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An edit to the program held by a session.
#[derive(Clone, Debug)]
pub enum Edit {
    /// Replaces the leaf declaring the named class.
    Replace(ClassName, ClassDecl),
    Delete(ClassName),
    /// Appends a leaf to the group holding the rightmost leaf.
    Insert(ClassDecl),
}

/// Node keys laid out like the program tree.
#[derive(Clone, Debug, PartialEq, Eq)]
enum KeyTree {
    Leaf(NodeKey),
    Group(NodeKey, Vec<KeyTree>),
}

impl KeyTree {
    fn build(node: &ProgramNode) -> Self {
        match node {
            ProgramNode::Leaf(d) => KeyTree::Leaf(leaf_key(d)),
            ProgramNode::Group(children) => {
                let kids: Vec<KeyTree> = children.iter().map(KeyTree::build).collect();
                KeyTree::Group(group_key(&kids.iter().map(KeyTree::key).collect::<Vec<_>>()), kids)
            }
        }
    }

    fn key(&self) -> NodeKey {
        match self {
            KeyTree::Leaf(k) | KeyTree::Group(k, _) => *k,
        }
    }

    /// Keys from the root down to the node at `path`.
    fn spine(&self, path: &[usize]) -> Option<Vec<NodeKey>> {
        let mut out = vec![self.key()];
        let mut cur = self;
        for &i in path {
            match cur {
                KeyTree::Group(_, kids) => cur = kids.get(i)?,
                KeyTree::Leaf(_) => return None,
            }
            out.push(cur.key());
        }
        Some(out)
    }

    fn collect(&self, out: &mut HashSet<NodeKey>) {
        out.insert(self.key());
        if let KeyTree::Group(_, kids) = self {
            kids.iter().for_each(|k| k.collect(out));
        }
    }

    fn children_mut(&mut self, path: &[usize]) -> Option<&mut Vec<KeyTree>> {
        let mut cur = self;
        for &i in path {
            match cur {
                KeyTree::Group(_, kids) => cur = kids.get_mut(i)?,
                KeyTree::Leaf(_) => return None,
            }
        }
        match cur {
            KeyTree::Group(_, kids) => Some(kids),
            KeyTree::Leaf(_) => None,
        }
    }
}

/// Recomputes keys along `path`, bottom-up. Nodes off the path keep theirs.
fn refresh(node: &ProgramNode, keys: &mut KeyTree, path: &[usize]) {
    match (node, &mut *keys) {
        (ProgramNode::Group(children), KeyTree::Group(key, kids)) if children.len() == kids.len() => {
            if let Some((&i, rest)) = path.split_first() {
                refresh(&children[i], &mut kids[i], rest);
            }
            *key = group_key(&kids.iter().map(KeyTree::key).collect::<Vec<_>>());
        }
        _ => *keys = KeyTree::build(node),
    }
}

/// Counters for one check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub outcome: CoOutcome,
    /// Nodes whose result was computed by this check.
    pub recomputed: usize,
    /// Memo hits; each covers a whole subtree.
    pub reused: usize,
    pub nodes: usize,
}

/// A program with its memo table.
pub struct Session {
    tuning: Tuning,
    vars: VarGen,
    memo: HashMap<NodeKey, Arc<NodeResult>>,
    program: ProgramNode,
    keys: KeyTree,
}

impl Session {
    pub fn new(program: ProgramNode, tuning: Tuning) -> Self {
        Self::with_vars(program, tuning, VarGen::from_env())
    }

    pub fn with_vars(program: ProgramNode, tuning: Tuning, vars: VarGen) -> Self {
        let keys = KeyTree::build(&program);
        Session {
            tuning,
            vars,
            memo: HashMap::new(),
            program,
            keys,
        }
    }

    pub fn program(&self) -> &ProgramNode {
        &self.program
    }

    pub fn tuning(&self) -> Tuning {
        self.tuning
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn root_key(&self) -> NodeKey {
        self.keys.key()
    }

    pub fn key_at(&self, path: &[usize]) -> Option<NodeKey> {
        self.keys.spine(path).and_then(|s| s.last().copied())
    }

    /// Memoized result of the node at `path`, if present.
    pub fn cached(&self, path: &[usize]) -> Option<Arc<NodeResult>> {
        self.key_at(path).and_then(|k| self.memo.get(&k).cloned())
    }

    /// Checks the program, reusing memoized subtrees, then drops memo entries
    /// for nodes no longer in the program.
    pub fn check(&mut self) -> CheckReport {
        let mut counts = (0, 0);
        let root = compute(
            &self.program,
            &self.keys,
            &mut self.memo,
            &mut self.vars,
            self.tuning,
            &mut counts,
        );
        let outcome = finish_root(&root, self.tuning);
        let mut live = HashSet::new();
        self.keys.collect(&mut live);
        self.memo.retain(|k, _| live.contains(k));
        CheckReport {
            outcome,
            recomputed: counts.0,
            reused: counts.1,
            nodes: self.program.node_count(),
        }
    }

    /// Replaces the program; unchanged subtrees stay memoized.
    pub fn recheck(&mut self, program: ProgramNode) -> CheckReport {
        self.keys = KeyTree::build(&program);
        self.program = program;
        self.check()
    }

    /// Forgets the node at `path` and its ancestors. Returns how many memo
    /// entries were removed.
    pub fn invalidate(&mut self, path: &[usize]) -> Result<usize, SessionError> {
        let spine = self
            .keys
            .spine(path)
            .ok_or_else(|| SessionError::BadPath(path.to_vec()))?;
        Ok(spine.iter().filter(|k| self.memo.remove(k).is_some()).count())
    }

    pub fn edit(&mut self, edit: Edit) -> Result<(), SessionError> {
        match edit {
            Edit::Replace(name, decl) => {
                let path = self.locate(&name)?;
                *self.program.at_mut(&path).expect("located leaf") = ProgramNode::Leaf(decl);
                refresh(&self.program, &mut self.keys, &path);
            }
            Edit::Delete(name) => {
                let mut path = self.locate(&name)?;
                let Some(index) = path.pop() else {
                    self.program = ProgramNode::Group(Vec::new());
                    self.keys = KeyTree::build(&self.program);
                    return Ok(());
                };
                match self.program.at_mut(&path) {
                    Some(ProgramNode::Group(children)) => {
                        children.remove(index);
                    }
                    _ => return Err(SessionError::BadPath(path)),
                }
                if let Some(kids) = self.keys.children_mut(&path) {
                    kids.remove(index);
                }
                refresh(&self.program, &mut self.keys, &path);
            }
            Edit::Insert(decl) => {
                if let ProgramNode::Leaf(_) = self.program {
                    let old = std::mem::replace(&mut self.program, ProgramNode::Group(Vec::new()));
                    self.program = ProgramNode::Group(vec![old]);
                    self.keys = KeyTree::build(&self.program);
                }
                let path = rightmost_group(&self.program);
                let leaf = KeyTree::Leaf(leaf_key(&decl));
                if let Some(ProgramNode::Group(children)) = self.program.at_mut(&path) {
                    children.push(ProgramNode::Leaf(decl));
                }
                if let Some(kids) = self.keys.children_mut(&path) {
                    kids.push(leaf);
                }
                refresh(&self.program, &mut self.keys, &path);
            }
        }
        Ok(())
    }

    fn locate(&self, name: &ClassName) -> Result<NodePath, SessionError> {
        self.program
            .find_class(name.as_str())
            .ok_or_else(|| SessionError::UnknownClass(name.clone()))
    }

    /// Writes the memo table: a header line with the tuning and the next
    /// class-variable id, then one `key<TAB>json` line per node.
    pub fn save_cache(&self, path: &Path) -> Result<(), SessionError> {
        let mut out = BufWriter::new(fs::File::create(path)?);
        writeln!(
            out,
            "{CACHE_MAGIC} v{CACHE_VERSION} normalize={} merge={} next={}",
            self.tuning.normalize,
            self.tuning.in_depth_merge,
            self.vars.peek()
        )?;
        let mut entries: Vec<_> = self.memo.iter().collect();
        entries.sort_by_key(|(k, _)| **k);
        for (key, result) in entries {
            let json = serde_json::to_string(result.as_ref()).map_err(|e| SessionError::Cache(e.to_string()))?;
            writeln!(out, "{}\t{json}", key.to_hex())?;
        }
        out.flush()?;
        Ok(())
    }

    /// Adds the entries of a cache file written under the same version and
    /// tuning. Returns the number of entries loaded; a file from another
    /// version or tuning is ignored.
    pub fn load_cache(&mut self, path: &Path) -> Result<usize, SessionError> {
        let mut lines = BufReader::new(fs::File::open(path)?).lines();
        let header = lines
            .next()
            .transpose()?
            .ok_or_else(|| SessionError::Cache("empty file".into()))?;
        let Some((tuning, next)) = parse_header(&header)? else {
            return Ok(0);
        };
        if tuning != self.tuning {
            return Ok(0);
        }
        let mut loaded = HashMap::new();
        for (n, line) in lines.enumerate() {
            let line = line?;
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| SessionError::Cache(format!("line {}: {what}", n + 2));
            let (hex, json) = line.split_once('\t').ok_or_else(|| bad("missing tab"))?;
            let key = NodeKey::from_hex(hex).ok_or_else(|| bad("bad key"))?;
            let result: NodeResult = serde_json::from_str(json).map_err(|e| bad(&e.to_string()))?;
            loaded.insert(key, Arc::new(result));
        }
        let count = loaded.len();
        self.memo.extend(loaded);
        if next > self.vars.peek() {
            self.vars = VarGen::starting_at(next);
        }
        Ok(count)
    }
}

/// `None` for a header of another format version.
fn parse_header(line: &str) -> Result<Option<(Tuning, u32)>, SessionError> {
    let bad = || SessionError::Cache(format!("bad header {line:?}"));
    let mut parts = line.split_whitespace();
    if parts.next() != Some(CACHE_MAGIC) {
        return Err(bad());
    }
    if parts.next() != Some(&format!("v{CACHE_VERSION}")) {
        return Ok(None);
    }
    let mut tuning = Tuning::default();
    let mut next = None;
    for part in parts {
        let (k, v) = part.split_once('=').ok_or_else(bad)?;
        match k {
            "normalize" => tuning.normalize = v.parse().map_err(|_| bad())?,
            "merge" => tuning.in_depth_merge = v.parse().map_err(|_| bad())?,
            "next" => next = Some(v.parse().map_err(|_| bad())?),
            _ => return Err(bad()),
        }
    }
    Ok(Some((tuning, next.ok_or_else(bad)?)))
}

fn rightmost_group(node: &ProgramNode) -> NodePath {
    let mut path = Vec::new();
    let mut cur = node;
    while let ProgramNode::Group(children) = cur {
        match children.last() {
            Some(last @ ProgramNode::Group(_)) => {
                path.push(children.len() - 1);
                cur = last;
            }
            _ => break,
        }
    }
    path
}

fn compute(
    node: &ProgramNode,
    keys: &KeyTree,
    memo: &mut HashMap<NodeKey, Arc<NodeResult>>,
    vars: &mut VarGen,
    tuning: Tuning,
    counts: &mut (usize, usize),
) -> Arc<NodeResult> {
    if let Some(hit) = memo.get(&keys.key()) {
        counts.1 += 1;
        return hit.clone();
    }
    let result = match (node, keys) {
        (ProgramNode::Leaf(decl), _) => check_leaf(decl, vars, tuning),
        (ProgramNode::Group(children), KeyTree::Group(_, kids)) => {
            let parts: Vec<Arc<NodeResult>> = children
                .iter()
                .zip(kids)
                .map(|(c, k)| compute(c, k, memo, vars, tuning, counts))
                .collect();
            check_group(&parts.iter().map(Arc::as_ref).collect::<Vec<_>>(), tuning)
        }
        (ProgramNode::Group(_), KeyTree::Leaf(_)) => unreachable!("key tree mirrors the program"),
    };
    counts.0 += 1;
    let result = Arc::new(result);
    memo.insert(keys.key(), result.clone());
    result
}
