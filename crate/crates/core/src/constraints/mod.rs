//! Constraints over class types, normalized conditions, substitutions and
//! the incremental solver.

mod condition;
mod solver;
mod subst;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use condition::{Condition, Truth};
pub use solver::{Solver, SolverFailure};
pub use subst::Subst;

use crate::syntax::{ClassVar, TypeRef};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Constraint {
    Eq(TypeRef, TypeRef),
    Neq(TypeRef, TypeRef),
    Sub(TypeRef, TypeRef),
    NotSub(TypeRef, TypeRef),
    /// `lhs = rhs` if the guard holds.
    CondEq(TypeRef, TypeRef, Condition),
}

impl Constraint {
    /// `lhs = rhs if guard`, degenerating to a plain equation when the guard
    /// is irrefutable.
    pub fn guarded(lhs: TypeRef, rhs: TypeRef, guard: &Condition) -> Constraint {
        if guard.is_irrefutable() {
            Constraint::Eq(lhs, rhs)
        } else {
            Constraint::CondEq(lhs, rhs, guard.clone())
        }
    }

    pub fn apply(&self, s: &Subst) -> Constraint {
        let r = |t: &TypeRef| s.resolve(t);
        match self {
            Constraint::Eq(a, b) => Constraint::Eq(r(a), r(b)),
            Constraint::Neq(a, b) => Constraint::Neq(r(a), r(b)),
            Constraint::Sub(a, b) => Constraint::Sub(r(a), r(b)),
            Constraint::NotSub(a, b) => Constraint::NotSub(r(a), r(b)),
            Constraint::CondEq(a, b, g) => Constraint::CondEq(r(a), r(b), g.apply(s)),
        }
    }

    pub fn vars(&self) -> Vec<ClassVar> {
        let (a, b, g) = match self {
            Constraint::Eq(a, b) | Constraint::Neq(a, b) | Constraint::Sub(a, b) | Constraint::NotSub(a, b) => {
                (a, b, None)
            }
            Constraint::CondEq(a, b, g) => (a, b, Some(g)),
        };
        let mut out: Vec<ClassVar> = a.as_var().into_iter().chain(b.as_var()).collect();
        if let Some(g) = g {
            out.extend(g.vars());
        }
        out
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::Eq(a, b) => write!(f, "{a} = {b}"),
            Constraint::Neq(a, b) => write!(f, "{a} != {b}"),
            Constraint::Sub(a, b) => write!(f, "{a} <: {b}"),
            Constraint::NotSub(a, b) => write!(f, "{a} !<: {b}"),
            Constraint::CondEq(a, b, g) => write!(f, "{a} = {b} if {g}"),
        }
    }
}

impl fmt::Debug for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
