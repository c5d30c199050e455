use std::collections::HashSet;
use std::fmt;

use super::{Constraint, Subst, Truth};
use crate::class_table::SubclassRelation;
use crate::error::{Origin, TypeError};
use crate::syntax::{ClassName, TypeRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverFailure {
    pub constraint: Constraint,
    pub origin: Origin,
    pub reason: String,
}

impl SolverFailure {
    pub fn to_error(&self) -> TypeError {
        self.origin.error(self.reason.clone())
    }
}

impl fmt::Display for SolverFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (constraint {})", self.reason, self.constraint)
    }
}

enum Step {
    Done,
    Defer(Constraint),
    Fail(String),
}

/// Continuous solver: equations are unified as they arrive; the other
/// constraints wait until the substitution and the known hierarchy decide
/// them.
#[derive(Clone, Default)]
pub struct Solver {
    subst: Subst,
    sigma: SubclassRelation,
    deferred: Vec<(Constraint, Origin)>,
    deferred_set: HashSet<Constraint>,
    failure: Option<SolverFailure>,
    final_mode: bool,
    dirty: bool,
}

impl Solver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_sigma(sigma: SubclassRelation) -> Self {
        Solver {
            sigma,
            ..Self::default()
        }
    }

    pub fn subst(&self) -> &Subst {
        &self.subst
    }

    pub fn sigma(&self) -> &SubclassRelation {
        &self.sigma
    }

    pub fn resolve(&self, t: &TypeRef) -> TypeRef {
        self.subst.resolve(t)
    }

    pub fn failure(&self) -> Option<&SolverFailure> {
        self.failure.as_ref()
    }

    pub fn is_failed(&self) -> bool {
        self.failure.is_some()
    }

    /// Deferred constraints with the current substitution applied.
    pub fn deferred(&self) -> Vec<(Constraint, Origin)> {
        self.deferred
            .iter()
            .map(|(c, o)| (c.apply(&self.subst), o.clone()))
            .collect()
    }

    pub fn deferred_len(&self) -> usize {
        self.deferred.len()
    }

    /// Adds hierarchy facts; deferred subtype checks are revisited.
    pub fn extend_sigma<'a>(&mut self, pairs: impl IntoIterator<Item = (&'a ClassName, &'a ClassName)>) {
        for (c, d) in pairs {
            self.sigma.insert(c.clone(), d.clone());
        }
        self.dirty = true;
        self.settle();
    }

    /// Feeds constraints and propagates to a fixpoint. Returns whether the
    /// substitution changed.
    pub fn solve(&mut self, constraints: impl IntoIterator<Item = (Constraint, Origin)>) -> bool {
        let before = self.subst.len();
        for (c, o) in constraints {
            self.add(c, o);
        }
        self.settle();
        self.subst.len() != before
    }

    pub fn solve_one(&mut self, c: Constraint, o: Origin) -> bool {
        self.solve([(c, o)])
    }

    /// Decides every deferred constraint against the complete hierarchy.
    /// Classes without a known superclass have none.
    pub fn finalize(&mut self) -> Result<(), Box<SolverFailure>> {
        self.final_mode = true;
        self.dirty = true;
        self.settle();
        if self.failure.is_none() {
            if let Some((c, o)) = self.deferred.first() {
                let c = c.apply(&self.subst);
                self.failure = Some(SolverFailure {
                    reason: format!("constraint {c} cannot be decided"),
                    constraint: c,
                    origin: o.clone(),
                });
            }
        }
        match &self.failure {
            Some(f) => Err(Box::new(f.clone())),
            None => Ok(()),
        }
    }

    fn add(&mut self, c: Constraint, o: Origin) {
        if self.failure.is_some() {
            return;
        }
        match self.step(c.apply(&self.subst)) {
            Step::Done => {}
            Step::Defer(c) => {
                if self.deferred_set.insert(c.clone()) {
                    self.deferred.push((c, o));
                }
            }
            Step::Fail(reason) => {
                self.failure = Some(SolverFailure {
                    constraint: c.apply(&self.subst),
                    origin: o,
                    reason,
                });
            }
        }
    }

    fn settle(&mut self) {
        while self.dirty && self.failure.is_none() {
            self.dirty = false;
            let pending = std::mem::take(&mut self.deferred);
            self.deferred_set.clear();
            for (c, o) in pending {
                self.add(c, o);
            }
        }
    }

    fn subtype(&self, sub: &ClassName, sup: &ClassName) -> Option<bool> {
        match self.sigma.try_is_subtype(sub, sup) {
            None if self.final_mode => Some(false),
            r => r,
        }
    }

    fn step(&mut self, c: Constraint) -> Step {
        match c {
            Constraint::Eq(a, b) => match self.subst.unify(&a, &b) {
                Ok(changed) => {
                    self.dirty |= changed;
                    Step::Done
                }
                Err((x, y)) => Step::Fail(format!("type mismatch: {x} is not {y}")),
            },
            Constraint::CondEq(a, b, g) => {
                if a == b {
                    return Step::Done;
                }
                match g.eval(&self.subst) {
                    Truth::Holds => self.step(Constraint::Eq(a, b)),
                    Truth::Fails => Step::Done,
                    Truth::Undecided => Step::Defer(Constraint::CondEq(a, b, g)),
                }
            }
            Constraint::Sub(a, b) => {
                if a == b || b.as_class().is_some_and(|c| c.is_object()) {
                    return Step::Done;
                }
                match (&a, &b) {
                    (TypeRef::Class(x), TypeRef::Class(y)) => match self.subtype(x, y) {
                        Some(true) => Step::Done,
                        Some(false) => Step::Fail(format!("{x} is not a subtype of {y}")),
                        None => Step::Defer(Constraint::Sub(a, b)),
                    },
                    _ => Step::Defer(Constraint::Sub(a, b)),
                }
            }
            Constraint::NotSub(a, b) => {
                if a == b || b.as_class().is_some_and(|c| c.is_object()) {
                    return Step::Fail(format!("{a} is a subtype of {b}"));
                }
                match (&a, &b) {
                    (TypeRef::Class(x), TypeRef::Class(y)) => match self.subtype(x, y) {
                        Some(true) => Step::Fail(format!("{x} is a subtype of {y}")),
                        Some(false) => Step::Done,
                        None => Step::Defer(Constraint::NotSub(a, b)),
                    },
                    _ => Step::Defer(Constraint::NotSub(a, b)),
                }
            }
            Constraint::Neq(a, b) => {
                if a == b {
                    Step::Fail(format!("{a} must differ from {b}"))
                } else if a.is_ground() && b.is_ground() {
                    Step::Done
                } else {
                    Step::Defer(Constraint::Neq(a, b))
                }
            }
        }
    }

    /// Sorted text dump of the substitution and deferred constraints.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, t) in self.subst.bindings() {
            out.push_str(&format!("{v} := {t}\n"));
        }
        let mut deferred: Vec<String> = self.deferred().iter().map(|(c, _)| format!("defer {c}\n")).collect();
        deferred.sort();
        out.extend(deferred);
        out
    }
}
