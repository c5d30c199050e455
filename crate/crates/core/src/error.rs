//! Type errors shared by both checkers.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::syntax::{ClassName, Name, Span};

/// Typing rule that rejected the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rule {
    Var,
    Field,
    Invk,
    New,
    UCast,
    DCast,
    SCast,
    Method,
    Class,
    Program,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Rule::Var => "Var",
            Rule::Field => "Field",
            Rule::Invk => "Invk",
            Rule::New => "New",
            Rule::UCast => "UCast",
            Rule::DCast => "DCast",
            Rule::SCast => "SCast",
            Rule::Method => "Method",
            Rule::Class => "Class",
            Rule::Program => "Program",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeError {
    pub rule: Rule,
    pub class: Option<ClassName>,
    pub method: Option<Name>,
    pub span: Span,
    pub message: String,
}

impl TypeError {
    pub fn new(rule: Rule, message: impl Into<String>) -> Self {
        TypeError {
            rule,
            class: None,
            method: None,
            span: Span::default(),
            message: message.into(),
        }
    }

    pub fn at(mut self, span: Span) -> Self {
        if !self.span.is_known() {
            self.span = span;
        }
        self
    }

    pub fn in_class(mut self, class: &ClassName) -> Self {
        self.class.get_or_insert_with(|| class.clone());
        self
    }

    pub fn in_method(mut self, method: &Name) -> Self {
        self.method.get_or_insert_with(|| method.clone());
        self
    }
}

impl fmt::Display for TypeError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.class, &self.method) {
            (Some(c), Some(m)) => write!(f, "in {c}.{m}: ")?,
            (Some(c), None) => write!(f, "in {c}: ")?,
            _ => {}
        }
        write!(f, "{} [{}]", self.message, self.rule)
    }
}

impl std::error::Error for TypeError {}

/// Outcome of checking a whole program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject(Vec<TypeError>),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }

    pub fn errors(&self) -> &[TypeError] {
        match self {
            Verdict::Accept => &[],
            Verdict::Reject(e) => e,
        }
    }
}

/// Where a requirement or constraint was generated. Carries names rather
/// than positions so cached results stay valid across reformatting.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub rule: Rule,
    pub class: Option<ClassName>,
    pub member: Option<Name>,
}

impl Origin {
    pub fn new(rule: Rule) -> Self {
        Origin {
            rule,
            class: None,
            member: None,
        }
    }

    pub fn in_class(mut self, class: &ClassName) -> Self {
        self.class = Some(class.clone());
        self
    }

    pub fn in_member(mut self, member: &Name) -> Self {
        self.member = Some(member.clone());
        self
    }

    pub fn error(&self, message: impl Into<String>) -> TypeError {
        TypeError {
            rule: self.rule,
            class: self.class.clone(),
            method: self.member.clone(),
            span: Span::default(),
            message: message.into(),
        }
    }
}
