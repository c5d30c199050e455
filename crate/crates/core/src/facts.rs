//! Ground declaration signatures propagated up the program tree so that
//! nodes can discharge requirements against classes declared elsewhere in
//! their subtree.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::class_table::{MethodSig, SubclassRelation};
use crate::requirements::ReqKind;
use crate::syntax::{ClassDecl, ClassName, Name};

/// Signatures declared by one class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassInfo {
    pub name: ClassName,
    /// `None` only for `Object`.
    pub superclass: Option<ClassName>,
    pub ctor: Vec<ClassName>,
    pub fields: Vec<(Name, ClassName)>,
    pub methods: BTreeMap<Name, MethodSig>,
}

impl ClassInfo {
    pub fn from_decl(decl: &ClassDecl) -> Self {
        ClassInfo {
            name: decl.name.clone(),
            superclass: Some(decl.superclass.clone()),
            ctor: decl.ctor.param_types(),
            fields: decl.fields.iter().map(|f| (f.name.clone(), f.ty.clone())).collect(),
            methods: decl
                .methods
                .iter()
                .map(|m| {
                    let sig = MethodSig {
                        params: m.params.iter().map(|p| p.ty.clone()).collect(),
                        ret: m.ret.clone(),
                    };
                    (m.name.clone(), sig)
                })
                .collect(),
        }
    }

    pub fn object() -> Self {
        ClassInfo {
            name: ClassName::object(),
            superclass: None,
            ctor: Vec::new(),
            fields: Vec::new(),
            methods: BTreeMap::new(),
        }
    }

    pub fn field(&self, name: &Name) -> Option<&ClassName> {
        self.fields.iter().find(|(f, _)| f == name).map(|(_, t)| t)
    }

    /// Declared member types in requirement layout: method parameters then
    /// return type, constructor parameters, field type, or superclass.
    pub fn declared(&self, kind: ReqKind, member: Option<&Name>) -> Option<Vec<ClassName>> {
        match kind {
            ReqKind::Extends => self.superclass.clone().map(|d| vec![d]),
            ReqKind::Ctor => Some(self.ctor.clone()),
            ReqKind::Field => member.and_then(|f| self.field(f)).map(|t| vec![t.clone()]),
            ReqKind::Method | ReqKind::OptMethod => member.and_then(|m| self.methods.get(m)).map(|sig| {
                let mut v = sig.params.clone();
                v.push(sig.ret.clone());
                v
            }),
        }
    }
}

/// Class signatures known within a subtree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFacts {
    classes: HashMap<ClassName, Arc<ClassInfo>>,
    /// Class names declared more than once in the subtree.
    duplicates: Vec<ClassName>,
}

impl ClassFacts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(info: ClassInfo) -> Self {
        let mut f = ClassFacts::new();
        f.insert(Arc::new(info));
        f
    }

    pub fn from_classes<'a>(decls: impl IntoIterator<Item = &'a ClassDecl>) -> Self {
        let mut f = ClassFacts::new();
        for d in decls {
            f.insert(Arc::new(ClassInfo::from_decl(d)));
        }
        f
    }

    pub fn insert(&mut self, info: Arc<ClassInfo>) {
        let name = info.name.clone();
        if self.classes.insert(name.clone(), info).is_some() {
            self.duplicates.push(name);
        }
    }

    /// Union; classes present on both sides are recorded as duplicates.
    pub fn union(parts: &[&ClassFacts]) -> Self {
        let total = parts.iter().map(|p| p.classes.len()).sum();
        let mut out = ClassFacts {
            classes: HashMap::with_capacity(total),
            duplicates: Vec::new(),
        };
        for p in parts {
            out.duplicates.extend(p.duplicates.iter().cloned());
            for info in p.classes.values() {
                out.insert(info.clone());
            }
        }
        out.duplicates.sort();
        out.duplicates.dedup();
        out
    }

    pub fn get(&self, class: &ClassName) -> Option<&ClassInfo> {
        self.classes.get(class).map(|a| a.as_ref())
    }

    pub fn contains(&self, class: &ClassName) -> bool {
        self.classes.contains_key(class)
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn duplicates(&self) -> &[ClassName] {
        &self.duplicates
    }

    /// Classes sorted by name.
    pub fn sorted(&self) -> Vec<&ClassInfo> {
        let mut v: Vec<&ClassInfo> = self.classes.values().map(|a| a.as_ref()).collect();
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    }

    pub fn sigma(&self) -> SubclassRelation {
        let mut s = SubclassRelation::new();
        for info in self.classes.values() {
            if let Some(d) = &info.superclass {
                s.insert(info.name.clone(), d.clone());
            }
        }
        s
    }

    /// Supertype chain above `class` as far as it is known, nearest first.
    pub fn ancestors(&self, class: &ClassName) -> Vec<&ClassInfo> {
        let mut out = Vec::new();
        let mut cur = self.get(class).and_then(|i| i.superclass.as_ref());
        while let Some(c) = cur {
            if out.len() > self.classes.len() {
                break;
            }
            match self.get(c) {
                Some(info) => {
                    out.push(info);
                    cur = info.superclass.as_ref();
                }
                None => break,
            }
        }
        out
    }
}
