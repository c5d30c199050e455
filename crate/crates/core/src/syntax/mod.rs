//! Featherweight Java abstract syntax, concrete text syntax and the
//! balanced program tree used as the unit of memoization.

mod parse;
mod render;
mod tree;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

pub use parse::{parse_classes, parse_expr, parse_program, ParseError};
pub use render::{render, render_class, render_expr};
pub use tree::{balance, group_key, leaf_key, node_key, NodeKey, NodePath};

/// An interned-by-refcount identifier. Cloning is cheap.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Name(Arc<str>);

impl Name {
    pub fn new(s: &str) -> Self {
        Name(Arc::from(s))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn object() -> Self {
        Name::new(OBJECT)
    }

    pub fn is_object(&self) -> bool {
        &*self.0 == OBJECT
    }
}

pub const OBJECT: &str = "Object";
pub const THIS: &str = "this";

impl fmt::Display for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Name {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Name {
    fn from(s: &str) -> Self {
        Name::new(s)
    }
}

impl From<String> for Name {
    fn from(s: String) -> Self {
        Name(Arc::from(s))
    }
}

/// Ground class type.
pub type ClassName = Name;

/// Unification placeholder for a not-yet-known class.
#[derive(Copy, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassVar(pub u32);

impl fmt::Display for ClassVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.0)
    }
}

impl fmt::Debug for ClassVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U{}", self.0)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TypeRef {
    Class(ClassName),
    Var(ClassVar),
}

impl TypeRef {
    pub fn class(name: &str) -> Self {
        TypeRef::Class(Name::new(name))
    }

    pub fn as_class(&self) -> Option<&ClassName> {
        match self {
            TypeRef::Class(c) => Some(c),
            TypeRef::Var(_) => None,
        }
    }

    pub fn as_var(&self) -> Option<ClassVar> {
        match self {
            TypeRef::Var(v) => Some(*v),
            TypeRef::Class(_) => None,
        }
    }

    pub fn is_ground(&self) -> bool {
        matches!(self, TypeRef::Class(_))
    }
}

impl From<ClassVar> for TypeRef {
    fn from(v: ClassVar) -> Self {
        TypeRef::Var(v)
    }
}

impl From<ClassName> for TypeRef {
    fn from(c: ClassName) -> Self {
        TypeRef::Class(c)
    }
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Class(c) => write!(f, "{c}"),
            TypeRef::Var(v) => write!(f, "{v}"),
        }
    }
}

impl fmt::Debug for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// 1-based source position. Positions never take part in structural
/// equality or hashing, so two parses of differently formatted text compare
/// equal.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: u32,
    pub col: u32,
}

impl Span {
    pub fn new(line: u32, col: u32) -> Self {
        Span { line, col }
    }

    pub fn is_known(&self) -> bool {
        self.line > 0
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for Span {}

impl std::hash::Hash for Span {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExprKind {
    Var(Name),
    This,
    Field(Box<Expr>, Name),
    Invoke(Box<Expr>, Name, Vec<Expr>),
    New(ClassName, Vec<Expr>),
    /// `(C) e`
    UCast(ClassName, Box<Expr>),
    /// `(C)! e`
    DCast(ClassName, Box<Expr>),
    /// `(C)? e`
    SCast(ClassName, Box<Expr>),
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr {
            kind,
            span: Span::default(),
        }
    }

    pub fn at(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn var(name: &str) -> Self {
        Expr::new(ExprKind::Var(Name::new(name)))
    }

    pub fn this() -> Self {
        Expr::new(ExprKind::This)
    }

    pub fn field(self, name: &str) -> Self {
        Expr::new(ExprKind::Field(Box::new(self), Name::new(name)))
    }

    pub fn call(self, method: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Invoke(Box::new(self), Name::new(method), args))
    }

    pub fn new_obj(class: &str, args: Vec<Expr>) -> Self {
        Expr::new(ExprKind::New(Name::new(class), args))
    }

    pub fn ucast(class: &str, e: Expr) -> Self {
        Expr::new(ExprKind::UCast(Name::new(class), Box::new(e)))
    }

    pub fn dcast(class: &str, e: Expr) -> Self {
        Expr::new(ExprKind::DCast(Name::new(class), Box::new(e)))
    }

    pub fn scast(class: &str, e: Expr) -> Self {
        Expr::new(ExprKind::SCast(Name::new(class), Box::new(e)))
    }

    /// Number of nodes in the expression.
    pub fn size(&self) -> usize {
        1 + match &self.kind {
            ExprKind::Var(_) | ExprKind::This => 0,
            ExprKind::Field(e, _) | ExprKind::UCast(_, e) | ExprKind::DCast(_, e) | ExprKind::SCast(_, e) => e.size(),
            ExprKind::Invoke(e, _, args) => e.size() + args.iter().map(Expr::size).sum::<usize>(),
            ExprKind::New(_, args) => args.iter().map(Expr::size).sum(),
        }
    }
}

/// A typed name: a field, a method parameter or a constructor parameter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Param {
    pub ty: ClassName,
    pub name: Name,
}

impl Param {
    pub fn new(ty: &str, name: &str) -> Self {
        Param {
            ty: Name::new(ty),
            name: Name::new(name),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MethodDecl {
    pub ret: ClassName,
    pub name: Name,
    pub params: Vec<Param>,
    pub body: Expr,
    pub span: Span,
}

/// `C(D̄ ḡ, C̄ f̄) { super(ḡ); this.f̄ = f̄; }`
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CtorDecl {
    pub class: ClassName,
    pub super_params: Vec<Param>,
    pub own_params: Vec<Param>,
    pub span: Span,
}

impl CtorDecl {
    /// Full parameter type list, super parameters first.
    pub fn param_types(&self) -> Vec<ClassName> {
        self.super_params
            .iter()
            .chain(&self.own_params)
            .map(|p| p.ty.clone())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ClassDecl {
    pub name: ClassName,
    pub superclass: ClassName,
    pub fields: Vec<Param>,
    pub ctor: CtorDecl,
    pub methods: Vec<MethodDecl>,
    pub span: Span,
}

impl ClassDecl {
    /// A class with the canonical constructor for the given inherited and
    /// own fields.
    pub fn with_canonical_ctor(
        name: &str,
        superclass: &str,
        inherited: Vec<Param>,
        fields: Vec<Param>,
        methods: Vec<MethodDecl>,
    ) -> Self {
        ClassDecl {
            name: Name::new(name),
            superclass: Name::new(superclass),
            ctor: CtorDecl {
                class: Name::new(name),
                super_params: inherited,
                own_params: fields.clone(),
                span: Span::default(),
            },
            fields,
            methods,
            span: Span::default(),
        }
    }

    pub fn method(&self, name: &str) -> Option<&MethodDecl> {
        self.methods.iter().find(|m| m.name.as_str() == name)
    }

    /// Checks the per-declaration invariants: no self extension, distinct
    /// field names, distinct method names, distinct parameter names that are
    /// never `this`, and a constructor named after the class.
    pub fn validate(&self) -> Result<(), String> {
        if self.name == self.superclass {
            return Err(format!("class {} extends itself", self.name));
        }
        if self.name.is_object() {
            return Err("class Object is implicit and cannot be declared".into());
        }
        if self.ctor.class != self.name {
            return Err(format!(
                "constructor {} does not match class {}",
                self.ctor.class, self.name
            ));
        }
        distinct(self.fields.iter().map(|f| &f.name), "field", &self.name)?;
        distinct(self.methods.iter().map(|m| &m.name), "method", &self.name)?;
        let ctor_names = self.ctor.super_params.iter().chain(&self.ctor.own_params);
        distinct(ctor_names.map(|p| &p.name), "constructor parameter", &self.name)?;
        for m in &self.methods {
            distinct(m.params.iter().map(|p| &p.name), "parameter", &m.name)?;
            if m.params.iter().any(|p| p.name.as_str() == THIS) {
                return Err(format!("method {} declares a parameter named this", m.name));
            }
        }
        Ok(())
    }
}

fn distinct<'a>(names: impl Iterator<Item = &'a Name>, what: &str, owner: &Name) -> Result<(), String> {
    let mut seen = std::collections::HashSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(format!("duplicate {what} {n} in {owner}"));
        }
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProgramNode {
    Group(Vec<ProgramNode>),
    Leaf(ClassDecl),
}

impl ProgramNode {
    /// Class declarations in left-to-right leaf order.
    pub fn classes(&self) -> Vec<&ClassDecl> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect<'a>(&'a self, out: &mut Vec<&'a ClassDecl>) {
        match self {
            ProgramNode::Leaf(c) => out.push(c),
            ProgramNode::Group(children) => children.iter().for_each(|c| c.collect(out)),
        }
    }

    pub fn into_classes(self) -> Vec<ClassDecl> {
        match self {
            ProgramNode::Leaf(c) => vec![c],
            ProgramNode::Group(children) => children.into_iter().flat_map(Self::into_classes).collect(),
        }
    }

    /// Total number of nodes, groups and leaves.
    pub fn node_count(&self) -> usize {
        match self {
            ProgramNode::Leaf(_) => 1,
            ProgramNode::Group(children) => 1 + children.iter().map(Self::node_count).sum::<usize>(),
        }
    }

    /// Longest root-to-leaf edge count.
    pub fn depth(&self) -> usize {
        match self {
            ProgramNode::Leaf(_) => 0,
            ProgramNode::Group(children) => children.iter().map(|c| 1 + c.depth()).max().unwrap_or(0),
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&ProgramNode> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                ProgramNode::Group(children) => children.get(*i)?.at(rest),
                ProgramNode::Leaf(_) => None,
            },
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut ProgramNode> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => match self {
                ProgramNode::Group(children) => children.get_mut(*i)?.at_mut(rest),
                ProgramNode::Leaf(_) => None,
            },
        }
    }

    /// Path of the leaf declaring `class`.
    pub fn find_class(&self, class: &str) -> Option<NodePath> {
        match self {
            ProgramNode::Leaf(c) => (c.name.as_str() == class).then(Vec::new),
            ProgramNode::Group(children) => children.iter().enumerate().find_map(|(i, c)| {
                c.find_class(class).map(|mut p| {
                    p.insert(0, i);
                    p
                })
            }),
        }
    }

    /// Validates every declaration and global class-name uniqueness.
    pub fn validate(&self) -> Result<(), String> {
        let mut seen = std::collections::HashSet::new();
        for c in self.classes() {
            c.validate()?;
            if !seen.insert(&c.name) {
                return Err(format!("duplicate class {}", c.name));
            }
        }
        Ok(())
    }
}
