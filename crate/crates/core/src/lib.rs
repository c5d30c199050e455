//! Dual-mode Featherweight Java type checking.

pub mod syntax;

pub use syntax::{
    balance, group_key, leaf_key, node_key, parse_classes, parse_expr, parse_program, render, render_class,
    render_expr, ClassDecl, ClassName, ClassVar, CtorDecl, Expr, ExprKind, MethodDecl, Name, NodeKey, NodePath, Param,
    ParseError, ProgramNode, Span, TypeRef,
};

pub mod class_table;
pub mod contextual;
pub mod error;

pub use class_table::{ClassTable, ClassTableError, Clause, MethodSig, SubclassRelation};
pub use contextual::{check_expr, check_program as check_contextual, TypingContext};
pub use error::{Rule, TypeError, Verdict};
pub mod constraints;

pub use constraints::{Condition, Constraint, Solver, SolverFailure, Subst, Truth};
pub use error::Origin;
pub mod facts;
pub mod requirements;

pub use facts::{ClassFacts, ClassInfo};
pub use requirements::{
    merge_cr, merge_r, remove_var_req, satisfies, ClassReq, ClassReqs, ContextReqs, ReqEntry, ReqKind, Tuning,
};
pub mod cocontextual;

pub use cocontextual::{
    check_program as check_cocontextual, co_check_expr, CoOutcome, CoResult, NodeResult, Pin, VarGen,
};
pub mod synth;

pub use synth::{mutate, shuffled, synthesize, Fault, Mutant, Naming, Scheme, SynthConfig};

pub mod incremental;
pub use incremental::{CheckReport, Edit, Session, SessionError};

pub mod harness;
pub use harness::{diff_check, run_benchmark, BenchOptions, BenchReport, Case, DiffReport};
