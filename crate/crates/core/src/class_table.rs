//! The decomposed class table: extends, constructor, field and method
//! clauses with indexed lookups, plus the immediate-subclass relation.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{ClassDecl, ClassName, Name, Param, ProgramNode};

/// Method signature `params -> ret`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodSig {
    pub params: Vec<ClassName>,
    pub ret: ClassName,
}

impl fmt::Display for MethodSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) -> {}", join(&self.params), self.ret)
    }
}

pub(crate) fn join<T: fmt::Display>(items: &[T]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Clause {
    Extends(ClassName, ClassName),
    Ctor(ClassName, Vec<ClassName>),
    Field(ClassName, Name, ClassName),
    Method(ClassName, Name, MethodSig),
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Clause::Extends(c, d) => write!(f, "extends {c} {d}"),
            Clause::Ctor(c, ps) => write!(f, "ctor {c}({})", join(ps)),
            Clause::Field(c, n, t) => write!(f, "field {c}.{n} : {t}"),
            Clause::Method(c, m, sig) => write!(f, "method {c}.{m} : {sig}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ClassTableError {
    #[error("inheritance cycle through {}", join(.0))]
    Cycle(Vec<ClassName>),
    #[error("duplicate declaration of class {0}")]
    DuplicateClass(ClassName),
    #[error("duplicate {kind} {member} in class {class}")]
    DuplicateMember {
        class: ClassName,
        kind: &'static str,
        member: Name,
    },
    #[error("class {0} is not declared")]
    UndeclaredClass(ClassName),
    #[error("field {field} not found in class {class}")]
    FieldNotFound { class: ClassName, field: Name },
}

/// Immediate-subclass relation: each class maps to its direct superclass.
/// `Object` is implicit and has no entry.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubclassRelation {
    parent: HashMap<ClassName, ClassName>,
}

impl SubclassRelation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, class: ClassName, superclass: ClassName) {
        self.parent.insert(class, superclass);
    }

    pub fn parent(&self, class: &ClassName) -> Option<&ClassName> {
        self.parent.get(class)
    }

    /// Whether `class` is `Object` or has a known superclass.
    pub fn knows(&self, class: &ClassName) -> bool {
        class.is_object() || self.parent.contains_key(class)
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (&ClassName, &ClassName)> {
        self.parent.iter()
    }

    /// Reflexive-transitive closure membership. Unknown classes have no
    /// supertypes other than themselves.
    pub fn is_subtype(&self, sub: &ClassName, sup: &ClassName) -> bool {
        self.try_is_subtype(sub, sup).unwrap_or(false)
    }

    /// Like [`is_subtype`](Self::is_subtype) but `None` when the chain from
    /// `sub` reaches a class whose superclass is unknown before deciding.
    pub fn try_is_subtype(&self, sub: &ClassName, sup: &ClassName) -> Option<bool> {
        let mut cur = sub;
        // Bounded walk: a cyclic relation terminates after visiting every entry.
        for _ in 0..=self.parent.len() + 1 {
            if cur == sup {
                return Some(true);
            }
            if cur.is_object() {
                return Some(false);
            }
            cur = self.parent.get(cur)?;
        }
        Some(false)
    }

    /// First class found on a cycle, if any.
    pub fn find_cycle(&self) -> Option<Vec<ClassName>> {
        let mut done: HashSet<&ClassName> = HashSet::new();
        let mut keys: Vec<&ClassName> = self.parent.keys().collect();
        keys.sort();
        for start in keys {
            let mut path: Vec<&ClassName> = Vec::new();
            let mut on_path: HashSet<&ClassName> = HashSet::new();
            let mut cur = start;
            loop {
                if done.contains(cur) {
                    break;
                }
                if !on_path.insert(cur) {
                    let i = path.iter().position(|c| *c == cur).expect("on path");
                    return Some(path[i..].iter().map(|c| (*c).clone()).collect());
                }
                path.push(cur);
                match self.parent.get(cur) {
                    Some(next) => cur = next,
                    None => break,
                }
            }
            done.extend(path);
        }
        None
    }
}

/// Class table with hash indexes over the clause set.
#[derive(Clone, Debug, Default)]
pub struct ClassTable {
    sigma: SubclassRelation,
    ctors: HashMap<ClassName, Vec<ClassName>>,
    own_fields: HashMap<ClassName, Vec<Param>>,
    field_index: HashMap<(ClassName, Name), ClassName>,
    methods: HashMap<(ClassName, Name), MethodSig>,
}

impl ClassTable {
    pub fn build(program: &ProgramNode) -> Result<Self, ClassTableError> {
        Self::from_decls(program.classes())
    }

    pub fn from_decls<'a>(decls: impl IntoIterator<Item = &'a ClassDecl>) -> Result<Self, ClassTableError> {
        let mut ct = ClassTable::default();
        for d in decls {
            ct.add(d)?;
        }
        if let Some(cycle) = ct.sigma.find_cycle() {
            return Err(ClassTableError::Cycle(cycle));
        }
        Ok(ct)
    }

    fn add(&mut self, d: &ClassDecl) -> Result<(), ClassTableError> {
        if self.sigma.knows(&d.name) {
            return Err(ClassTableError::DuplicateClass(d.name.clone()));
        }
        self.sigma.insert(d.name.clone(), d.superclass.clone());
        self.ctors.insert(d.name.clone(), d.ctor.param_types());
        for f in &d.fields {
            if self
                .field_index
                .insert((d.name.clone(), f.name.clone()), f.ty.clone())
                .is_some()
            {
                return Err(ClassTableError::DuplicateMember {
                    class: d.name.clone(),
                    kind: "field",
                    member: f.name.clone(),
                });
            }
        }
        self.own_fields.insert(d.name.clone(), d.fields.clone());
        for m in &d.methods {
            let sig = MethodSig {
                params: m.params.iter().map(|p| p.ty.clone()).collect(),
                ret: m.ret.clone(),
            };
            if self.methods.insert((d.name.clone(), m.name.clone()), sig).is_some() {
                return Err(ClassTableError::DuplicateMember {
                    class: d.name.clone(),
                    kind: "method",
                    member: m.name.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn sigma(&self) -> &SubclassRelation {
        &self.sigma
    }

    pub fn is_declared(&self, class: &ClassName) -> bool {
        self.sigma.knows(class)
    }

    pub fn is_subtype(&self, sub: &ClassName, sup: &ClassName) -> bool {
        self.sigma.is_subtype(sub, sup)
    }

    pub fn extends_lookup(&self, class: &ClassName) -> Option<&ClassName> {
        self.sigma.parent(class)
    }

    /// Declared constructor parameter types; `Object` takes none.
    pub fn ctor_lookup(&self, class: &ClassName) -> Option<&[ClassName]> {
        if class.is_object() {
            return Some(&[]);
        }
        self.ctors.get(class).map(Vec::as_slice)
    }

    /// Proper ancestors of `class`, nearest first, ending at `Object` when
    /// the chain is fully declared.
    pub fn ancestors(&self, class: &ClassName) -> Vec<ClassName> {
        let mut out = Vec::new();
        let mut cur = class;
        while let Some(p) = self.sigma.parent(cur) {
            if out.len() > self.sigma.len() {
                break;
            }
            out.push(p.clone());
            cur = p;
        }
        out
    }

    /// Own field declared directly in `class`.
    pub fn own_field(&self, class: &ClassName, field: &Name) -> Option<&ClassName> {
        self.field_index.get(&(class.clone(), field.clone()))
    }

    pub fn own_fields(&self, class: &ClassName) -> &[Param] {
        self.own_fields.get(class).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Own method declared directly in `class`.
    pub fn own_method(&self, class: &ClassName, method: &Name) -> Option<&MethodSig> {
        self.methods.get(&(class.clone(), method.clone()))
    }

    /// Type of `field` in `class` or its nearest declaring ancestor.
    pub fn field_lookup(&self, field: &Name, class: &ClassName) -> Result<ClassName, ClassTableError> {
        if !self.is_declared(class) {
            return Err(ClassTableError::UndeclaredClass(class.clone()));
        }
        std::iter::once(class.clone())
            .chain(self.ancestors(class))
            .find_map(|c| self.own_field(&c, field).cloned())
            .ok_or_else(|| ClassTableError::FieldNotFound {
                class: class.clone(),
                field: field.clone(),
            })
    }

    /// Inherited-then-own field types, root first.
    pub fn fields_lookup(&self, class: &ClassName) -> Result<Vec<ClassName>, ClassTableError> {
        if class.is_object() {
            return Ok(Vec::new());
        }
        if !self.is_declared(class) {
            return Err(ClassTableError::UndeclaredClass(class.clone()));
        }
        let mut chain: Vec<ClassName> = self.ancestors(class);
        if chain.last().is_some_and(|c| !c.is_object()) {
            let last = chain.last().expect("non-empty").clone();
            return Err(ClassTableError::UndeclaredClass(last));
        }
        chain.reverse();
        chain.push(class.clone());
        Ok(chain
            .iter()
            .flat_map(|c| self.own_fields(c).iter().map(|p| p.ty.clone()))
            .collect())
    }

    /// Signature of `method` from the nearest declaring class at or above
    /// `class`.
    pub fn mtype(&self, method: &Name, class: &ClassName) -> Option<&MethodSig> {
        if let Some(sig) = self.own_method(class, method) {
            return Some(sig);
        }
        self.ancestors(class).iter().find_map(|c| self.own_method(c, method))
    }

    pub fn clauses(&self) -> Vec<Clause> {
        let mut out: Vec<Clause> = Vec::new();
        out.extend(self.sigma.pairs().map(|(c, d)| Clause::Extends(c.clone(), d.clone())));
        out.extend(self.ctors.iter().map(|(c, ps)| Clause::Ctor(c.clone(), ps.clone())));
        out.extend(
            self.field_index
                .iter()
                .map(|((c, f), t)| Clause::Field(c.clone(), f.clone(), t.clone())),
        );
        out.extend(
            self.methods
                .iter()
                .map(|((c, m), s)| Clause::Method(c.clone(), m.clone(), s.clone())),
        );
        out
    }

    /// One clause per line, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.clauses().iter().map(ToString::to_string).collect();
        lines.sort();
        lines.into_iter().map(|l| l + "\n").collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    const LIST: &str = "
        class Int extends Object { Int() { super(); } }
        class List extends Object {
            List() { super(); }
            List add(Int a) { return this; }
            Int size() { return new Int(); }
        }
        class LinkedList extends List { LinkedList() { super(); } }
    ";

    const NAT: &str = "
        class Nat extends Object { Nat() { super(); } }
        class Zero extends Nat { Zero() { super(); } }
        class Succ extends Nat { Nat val; Succ(Nat val) { super(); this.val = val; } }
    ";

    fn table(text: &str) -> ClassTable {
        ClassTable::build(&parse_program(text).unwrap()).unwrap()
    }

    fn n(s: &str) -> Name {
        Name::new(s)
    }

    #[test]
    fn list_table_clauses() {
        let ct = table(LIST);
        let dump = ct.dump();
        for line in [
            "extends List Object",
            "extends LinkedList List",
            "method List.size : () -> Int",
            "method List.add : (Int) -> List",
            "ctor List()",
            "ctor LinkedList()",
        ] {
            assert!(dump.lines().any(|l| l == line), "missing {line} in\n{dump}");
        }
    }

    #[test]
    fn empty_program_empty_table() {
        assert_eq!(table("").dump(), "");
    }

    #[test]
    fn cycle_rejected() {
        let p = parse_program("class A extends B { A() { super(); } } class B extends A { B() { super(); } }").unwrap();
        assert!(matches!(ClassTable::build(&p), Err(ClassTableError::Cycle(_))));
    }

    #[test]
    fn field_lookups() {
        let ct = table(NAT);
        assert_eq!(ct.field_lookup(&n("val"), &n("Succ")).unwrap(), n("Nat"));
        assert!(ct.field_lookup(&n("f"), &n("Object")).is_err());
        assert_eq!(ct.fields_lookup(&n("Object")).unwrap(), Vec::<Name>::new());
        assert_eq!(ct.fields_lookup(&n("Succ")).unwrap(), vec![n("Nat")]);
        assert_eq!(table(LIST).fields_lookup(&n("LinkedList")).unwrap(), Vec::<Name>::new());
    }

    #[test]
    fn inherited_field_lookup() {
        let ct = table(&format!(
            "{NAT} class Big extends Succ {{ Nat w; Big(Nat val, Nat w) {{ super(val); this.w = w; }} }}"
        ));
        assert_eq!(ct.field_lookup(&n("val"), &n("Big")).unwrap(), n("Nat"));
        assert_eq!(ct.fields_lookup(&n("Big")).unwrap(), vec![n("Nat"), n("Nat")]);
    }

    #[test]
    fn method_lookups() {
        let ct = table(LIST);
        let sig = ct.mtype(&n("add"), &n("LinkedList")).unwrap();
        assert_eq!(sig.params, vec![n("Int")]);
        assert_eq!(sig.ret, n("List"));
        assert!(ct.mtype(&n("size"), &n("Object")).is_none());
    }

    #[test]
    fn subtyping() {
        let ct = table(LIST);
        assert!(ct.is_subtype(&n("List"), &n("List")));
        assert!(ct.is_subtype(&n("LinkedList"), &n("Object")));
        assert!(!ct.is_subtype(&n("List"), &n("LinkedList")));
        let partial = SubclassRelation::new();
        assert_eq!(partial.try_is_subtype(&n("A"), &n("B")), None);
        assert_eq!(partial.try_is_subtype(&n("Object"), &n("B")), Some(false));
    }
}
