//! Bottom-up co-contextual checker: expressions produce a type, constraints,
//! context requirements and class-table requirements; class nodes discharge
//! requirements against the declarations in their subtree.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::constraints::{Constraint, Solver, Truth};
use crate::contextual::TypingContext;
use crate::error::{Origin, Rule, TypeError, Verdict};
use crate::facts::{ClassFacts, ClassInfo};
use crate::requirements::{
    against_decl, in_depth_merge, merge_cr, merge_r, remove_var_req, resolve_complements, ClassReq, ClassReqs,
    ContextReqs, Emitted, ReqEntry, ReqKind, Tuning,
};
use crate::syntax::{ClassDecl, ClassName, ClassVar, Expr, ExprKind, MethodDecl, Name, ProgramNode, TypeRef, THIS};

/// Environment variable holding the first class-variable id of a session.
pub const FRESH_SEED_VAR: &str = "COCOFJ_FRESH_SEED";

/// Session-wide fresh class-variable supply. Ids are never reused within a
/// session, so results computed at different times never share variables.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct VarGen {
    next: u32,
}

impl VarGen {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn starting_at(next: u32) -> Self {
        VarGen { next }
    }

    /// Starts at the id in `COCOFJ_FRESH_SEED`, or 0.
    pub fn from_env() -> Self {
        let next = std::env::var(FRESH_SEED_VAR)
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or(0);
        VarGen { next }
    }

    pub fn peek(&self) -> u32 {
        self.next
    }

    pub fn fresh(&mut self) -> TypeRef {
        let v = ClassVar(self.next);
        self.next = self.next.checked_add(1).expect("class variable ids exhausted");
        TypeRef::Var(v)
    }

    fn fresh_n(&mut self, n: usize) -> Vec<TypeRef> {
        (0..n).map(|_| self.fresh()).collect()
    }
}

/// Output of checking one expression with its constraints solved.
#[derive(Clone)]
pub struct CoResult {
    pub ty: TypeRef,
    pub solver: Solver,
    pub r: ContextReqs,
    pub cr: ClassReqs,
}

struct ExprGen<'a> {
    vars: &'a mut VarGen,
    tuning: Tuning,
    origin: Origin,
    constraints: Emitted,
}

struct Generated {
    ty: TypeRef,
    r: ContextReqs,
    cr: ClassReqs,
}

impl ExprGen<'_> {
    fn origin(&self, rule: Rule) -> Origin {
        Origin {
            rule,
            ..self.origin.clone()
        }
    }

    fn emit(&mut self, c: Constraint, rule: Rule) {
        let o = self.origin(rule);
        self.constraints.push((c, o));
    }

    fn combine(&mut self, parts: Vec<Generated>, extra: Option<ReqEntry>) -> (ContextReqs, ClassReqs) {
        let mut rs = Vec::with_capacity(parts.len());
        let mut crs = Vec::with_capacity(parts.len() + 1);
        for p in parts {
            rs.push(p.r);
            crs.push(p.cr);
        }
        crs.extend(extra.map(ClassReqs::single));
        let (r, s_r) = merge_r(rs);
        let (cr, s_cr) = merge_cr(crs, &self.tuning);
        self.constraints.extend(s_r);
        self.constraints.extend(s_cr);
        (r, cr)
    }

    /// Checks arguments against fresh parameter variables.
    fn args(&mut self, args: &[Expr], rule: Rule) -> (Vec<Generated>, Vec<TypeRef>) {
        let gens: Vec<Generated> = args.iter().map(|a| self.expr(a)).collect();
        let params = self.vars.fresh_n(args.len());
        for (g, u) in gens.iter().zip(&params) {
            self.emit(Constraint::Sub(g.ty.clone(), u.clone()), rule);
        }
        (gens, params)
    }

    fn expr(&mut self, e: &Expr) -> Generated {
        match &e.kind {
            ExprKind::Var(x) => {
                let u = self.vars.fresh();
                Generated {
                    r: ContextReqs::single(x.clone(), u.clone()),
                    ty: u,
                    cr: ClassReqs::new(),
                }
            }
            ExprKind::This => {
                let u = self.vars.fresh();
                Generated {
                    r: ContextReqs::single(Name::new(THIS), u.clone()),
                    ty: u,
                    cr: ClassReqs::new(),
                }
            }
            ExprKind::Field(recv, f) => {
                let g = self.expr(recv);
                let u = self.vars.fresh();
                let req = ReqEntry::new(
                    ClassReq::field(g.ty.clone(), f.clone(), u.clone()),
                    self.origin(Rule::Field),
                );
                let (r, cr) = self.combine(vec![g], Some(req));
                Generated { ty: u, r, cr }
            }
            ExprKind::Invoke(recv, m, args) => {
                let g = self.expr(recv);
                let (mut parts, params) = self.args(args, Rule::Invk);
                let ret = self.vars.fresh();
                let req = ReqEntry::new(
                    ClassReq::method(g.ty.clone(), m.clone(), params, ret.clone()),
                    self.origin(Rule::Invk),
                );
                parts.insert(0, g);
                let (r, cr) = self.combine(parts, Some(req));
                Generated { ty: ret, r, cr }
            }
            ExprKind::New(c, args) => {
                let (parts, params) = self.args(args, Rule::New);
                let ty = TypeRef::Class(c.clone());
                let req = ReqEntry::new(ClassReq::ctor(ty.clone(), params), self.origin(Rule::New));
                let (r, cr) = self.combine(parts, Some(req));
                Generated { ty, r, cr }
            }
            ExprKind::UCast(c, inner) => {
                let g = self.expr(inner);
                let target = TypeRef::Class(c.clone());
                self.emit(Constraint::Sub(g.ty.clone(), target.clone()), Rule::UCast);
                Generated { ty: target, ..g }
            }
            ExprKind::DCast(c, inner) => {
                let g = self.expr(inner);
                let target = TypeRef::Class(c.clone());
                self.emit(Constraint::Sub(target.clone(), g.ty.clone()), Rule::DCast);
                self.emit(Constraint::Neq(target.clone(), g.ty.clone()), Rule::DCast);
                Generated { ty: target, ..g }
            }
            ExprKind::SCast(c, inner) => {
                let g = self.expr(inner);
                let target = TypeRef::Class(c.clone());
                self.emit(Constraint::NotSub(g.ty.clone(), target.clone()), Rule::SCast);
                self.emit(Constraint::NotSub(target.clone(), g.ty.clone()), Rule::SCast);
                Generated { ty: target, ..g }
            }
        }
    }
}

fn generate(e: &Expr, vars: &mut VarGen, tuning: Tuning, origin: Origin) -> (Generated, Emitted) {
    let mut g = ExprGen {
        vars,
        tuning,
        origin,
        constraints: Emitted::new(),
    };
    let out = g.expr(e);
    (out, g.constraints)
}

/// Checks `e` without any context and solves its constraints. The type and
/// requirement sets have the current substitution applied.
pub fn co_check_expr(e: &Expr, vars: &mut VarGen, tuning: Tuning) -> CoResult {
    let (g, constraints) = generate(e, vars, tuning, Origin::new(Rule::Var));
    let mut solver = Solver::new();
    solver.solve(constraints);
    let s = solver.subst();
    CoResult {
        ty: s.resolve(&g.ty),
        r: g.r.apply(s),
        cr: g.cr.apply(s),
        solver,
    }
}

/// Types recorded for one method: the enclosing class, its superclass and
/// the body.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pin {
    pub class: ClassName,
    pub method: Name,
    pub this_ty: TypeRef,
    pub super_ty: TypeRef,
    pub body_ty: TypeRef,
}

impl Pin {
    fn resolve(&self, s: &Solver) -> Pin {
        Pin {
            class: self.class.clone(),
            method: self.method.clone(),
            this_ty: s.resolve(&self.this_ty),
            super_ty: s.resolve(&self.super_ty),
            body_ty: s.resolve(&self.body_ty),
        }
    }
}

/// Requirements and constraints of one method, before class-level rules.
pub struct CoMethod {
    pub constraints: Emitted,
    pub cr: ClassReqs,
    pub errors: Vec<TypeError>,
    pub pin: Pin,
}

/// Checks method `m` of `class`, whose `this` and superclass are the
/// variables `this_ty` and `super_ty`.
pub fn co_check_method(
    class: &ClassName,
    m: &MethodDecl,
    this_ty: &TypeRef,
    super_ty: &TypeRef,
    vars: &mut VarGen,
    tuning: Tuning,
) -> CoMethod {
    let origin = Origin::new(Rule::Method).in_class(class).in_member(&m.name);
    let (g, mut constraints) = generate(&m.body, vars, tuning, origin.clone());
    let mut r = g.r;
    for p in &m.params {
        let (rest, eq) = remove_var_req(&r, &p.name, TypeRef::Class(p.ty.clone()));
        r = rest;
        constraints.extend(eq.map(|c| (c, origin.clone())));
    }
    let (rest, eq) = remove_var_req(&r, &Name::new(THIS), this_ty.clone());
    constraints.extend(eq.map(|c| (c, origin.clone())));
    let errors = rest
        .iter()
        .map(|(x, _)| {
            TypeError::new(Rule::Var, format!("unbound variable {x}"))
                .in_class(class)
                .in_method(&m.name)
                .at(m.body.span)
        })
        .collect();
    constraints.push((
        Constraint::Sub(g.ty.clone(), TypeRef::Class(m.ret.clone())),
        origin.clone(),
    ));
    let params: Vec<TypeRef> = m.params.iter().map(|p| TypeRef::Class(p.ty.clone())).collect();
    let opt = ReqEntry::new(
        ClassReq::opt_method(super_ty.clone(), m.name.clone(), params, TypeRef::Class(m.ret.clone())),
        origin,
    );
    let (cr, s) = merge_cr([g.cr, ClassReqs::single(opt)], &tuning);
    constraints.extend(s);
    CoMethod {
        constraints,
        cr,
        errors,
        pin: Pin {
            class: class.clone(),
            method: m.name.clone(),
            this_ty: this_ty.clone(),
            super_ty: super_ty.clone(),
            body_ty: g.ty,
        },
    }
}

/// Requirements and constraints of one class declaration.
pub struct CoClass {
    pub constraints: Emitted,
    pub cr: ClassReqs,
    pub errors: Vec<TypeError>,
    pub pins: Vec<Pin>,
}

pub fn co_check_class(decl: &ClassDecl, vars: &mut VarGen, tuning: Tuning) -> CoClass {
    let origin = Origin::new(Rule::Class).in_class(&decl.name);
    let class_err = |msg: String| TypeError::new(Rule::Class, msg).in_class(&decl.name).at(decl.span);
    let mut errors = Vec::new();
    if let Err(msg) = decl.validate() {
        errors.push(TypeError::new(Rule::Program, msg).in_class(&decl.name).at(decl.span));
    }
    if decl.ctor.own_params != decl.fields {
        errors.push(class_err(
            "constructor parameters do not match the declared fields".into(),
        ));
    }
    let this_ty = vars.fresh();
    let super_ty = vars.fresh();
    let mut constraints: Emitted = vec![(
        Constraint::Eq(this_ty.clone(), TypeRef::Class(decl.name.clone())),
        origin.clone(),
    )];
    let super_params: Vec<TypeRef> = decl
        .ctor
        .super_params
        .iter()
        .map(|p| TypeRef::Class(p.ty.clone()))
        .collect();
    let mut parts = vec![
        ClassReqs::single(ReqEntry::new(
            ClassReq::extends(this_ty.clone(), super_ty.clone()),
            origin.clone(),
        )),
        ClassReqs::single(ReqEntry::new(ClassReq::ctor(super_ty.clone(), super_params), origin)),
    ];
    let mut pins = Vec::with_capacity(decl.methods.len());
    for m in &decl.methods {
        let cm = co_check_method(&decl.name, m, &this_ty, &super_ty, vars, tuning);
        constraints.extend(cm.constraints);
        parts.push(cm.cr);
        errors.extend(cm.errors);
        pins.push(cm.pin);
    }
    let (cr, s) = merge_cr(parts, &tuning);
    constraints.extend(s);
    CoClass {
        constraints,
        cr,
        errors,
        pins,
    }
}

/// Compacted result of checking a subtree: everything a parent needs, with
/// the subtree's substitution already applied.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeResult {
    /// Requirements not yet discharged by the subtree's declarations.
    pub entries: Vec<ReqEntry>,
    /// Constraints the subtree could not decide.
    pub deferred: Emitted,
    pub facts: ClassFacts,
    pub pins: Vec<Pin>,
    pub errors: Vec<TypeError>,
    /// Largest requirement count at any node of the subtree.
    pub peak_entries: usize,
    /// Class-variable ids drawn while computing this node itself, as a
    /// half-open range; empty for groups.
    pub fresh: (u32, u32),
}

/// Applies the substitution, solving, in-depth merging and walking of
/// ground requirements up the known hierarchy until nothing changes.
struct Work<'a> {
    tuning: Tuning,
    facts: &'a ClassFacts,
    object: ClassInfo,
    solver: Solver,
    entries: Vec<ReqEntry>,
    pending: Emitted,
}

impl<'a> Work<'a> {
    fn new(facts: &'a ClassFacts, tuning: Tuning, entries: Vec<ReqEntry>, pending: Emitted) -> Self {
        Work {
            tuning,
            facts,
            object: ClassInfo::object(),
            solver: Solver::with_sigma(facts.sigma()),
            entries,
            pending,
        }
    }

    fn apply_subst(&mut self) {
        let s = self.solver.subst();
        let tuning = self.tuning;
        self.entries = std::mem::take(&mut self.entries)
            .into_iter()
            .map(|e| e.apply(s))
            .filter(|e| tuning.keep(e))
            .collect();
    }

    fn settle(&mut self) {
        loop {
            let changed = self.solver.solve(std::mem::take(&mut self.pending));
            if self.solver.is_failed() {
                return;
            }
            if changed {
                self.apply_subst();
            }
            if self.tuning.normalize {
                self.entries = resolve_complements(std::mem::take(&mut self.entries));
            }
            if self.tuning.merges() {
                let (entries, emitted) = in_depth_merge(std::mem::take(&mut self.entries));
                self.entries = entries;
                self.pending.extend(emitted);
            }
            let walked = self.walk();
            if !changed && !walked && self.pending.is_empty() {
                return;
            }
        }
    }

    /// Moves ground requirements up the hierarchy as far as the facts reach.
    fn walk(&mut self) -> bool {
        let bound = self.facts.len() + 2;
        let mut touched = false;
        let mut out = Vec::with_capacity(self.entries.len());
        for e in std::mem::take(&mut self.entries) {
            let mut cur = e;
            let mut steps = 0;
            loop {
                let info = match cur.req.recv.as_class() {
                    Some(c) if c.is_object() => &self.object,
                    Some(c) => match self.facts.get(c) {
                        Some(info) => info,
                        None => {
                            out.push(cur);
                            break;
                        }
                    },
                    None => {
                        out.push(cur);
                        break;
                    }
                };
                if steps > bound {
                    out.push(cur);
                    break;
                }
                let d = against_decl(cur, info, &self.tuning);
                if !d.touched {
                    out.extend(d.kept);
                    break;
                }
                touched = true;
                steps += 1;
                self.pending.extend(d.emitted);
                let mut kept = d.kept;
                if kept.len() == 1 && kept[0].req.recv.is_ground() {
                    cur = kept.pop().expect("one entry");
                } else {
                    out.extend(kept);
                    break;
                }
            }
        }
        self.entries = out;
        touched
    }

    fn into_result(
        mut self,
        mut errors: Vec<TypeError>,
        pins: Vec<Pin>,
        peak_below: usize,
        fresh: (u32, u32),
    ) -> NodeResult {
        if let Some(f) = self.solver.failure() {
            errors.push(f.to_error());
        }
        self.apply_subst();
        let pins = pins.iter().map(|p| p.resolve(&self.solver)).collect();
        NodeResult {
            peak_entries: peak_below.max(self.entries.len()),
            deferred: self.solver.deferred(),
            entries: self.entries,
            facts: self.facts.clone(),
            pins,
            errors,
            fresh,
        }
    }
}

/// Checks a variable-receiver entry against declarations in order.
fn against_all(entry: ReqEntry, infos: &[&ClassInfo], tuning: &Tuning, out: &mut Vec<ReqEntry>, emitted: &mut Emitted) {
    let recv = entry.req.recv.clone();
    let mut cur = Some(entry);
    for info in infos {
        let Some(e) = cur.take() else { break };
        let d = against_decl(e, info, tuning);
        emitted.extend(d.emitted);
        for k in d.kept {
            if cur.is_none() && k.req.recv == recv {
                cur = Some(k);
            } else {
                out.push(k);
            }
        }
    }
    out.extend(cur);
}

fn split_against(
    entries: Vec<ReqEntry>,
    infos: &[&ClassInfo],
    tuning: &Tuning,
    emitted: &mut Emitted,
) -> Vec<ReqEntry> {
    let mut out = Vec::with_capacity(entries.len());
    for e in entries {
        if e.req.recv.is_ground() {
            out.push(e);
        } else {
            against_all(e, infos, tuning, &mut out, emitted);
        }
    }
    out
}

/// Checks one class declaration as a leaf of the program tree.
pub fn check_leaf(decl: &ClassDecl, vars: &mut VarGen, tuning: Tuning) -> NodeResult {
    let first = vars.peek();
    let co = co_check_class(decl, vars, tuning);
    let facts = ClassFacts::single(ClassInfo::from_decl(decl));
    let mut work = Work::new(&facts, tuning, co.cr.into_entries(), Emitted::new());
    work.solver.solve(co.constraints);
    work.apply_subst();
    let info = facts.get(&decl.name).expect("own class");
    let entries = std::mem::take(&mut work.entries);
    work.entries = split_against(entries, &[info], &tuning, &mut work.pending);
    work.settle();
    work.into_result(co.errors, co.pins, 0, (first, vars.peek()))
}

/// Combines the results of sibling subtrees.
pub fn check_group(children: &[&NodeResult], tuning: Tuning) -> NodeResult {
    let facts = ClassFacts::union(&children.iter().map(|c| &c.facts).collect::<Vec<_>>());
    let sorted: Vec<Vec<&ClassInfo>> = children.iter().map(|c| c.facts.sorted()).collect();
    let mut pending = Emitted::new();
    for c in children {
        pending.extend(c.deferred.iter().cloned());
    }
    let mut parts = Vec::with_capacity(children.len());
    for (i, child) in children.iter().enumerate() {
        let siblings: Vec<&ClassInfo> = sorted
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .flat_map(|(_, infos)| infos.iter().copied())
            .collect();
        let entries = split_against(child.entries.clone(), &siblings, &tuning, &mut pending);
        parts.push(ClassReqs::from_entries(entries));
    }
    let (cr, s) = merge_cr(parts, &tuning);
    pending.extend(s);
    let errors = children.iter().flat_map(|c| c.errors.iter().cloned()).collect();
    let pins = children.iter().flat_map(|c| c.pins.iter().cloned()).collect();
    let peak = children.iter().map(|c| c.peak_entries).max().unwrap_or(0);
    let mut work = Work::new(&facts, tuning, cr.into_entries(), pending);
    work.settle();
    work.into_result(errors, pins, peak, (0, 0))
}

/// Checks a subtree from scratch.
pub fn check_node(node: &ProgramNode, vars: &mut VarGen, tuning: Tuning) -> NodeResult {
    match node {
        ProgramNode::Leaf(decl) => check_leaf(decl, vars, tuning),
        ProgramNode::Group(children) => {
            let results: Vec<NodeResult> = children.iter().map(|c| check_node(c, vars, tuning)).collect();
            check_group(&results.iter().collect::<Vec<_>>(), tuning)
        }
    }
}

/// Verdict of the co-contextual checker with the solved method types.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoOutcome {
    pub verdict: Verdict,
    /// Solved types per `(class, method)`.
    pub pins: BTreeMap<(ClassName, Name), Pin>,
    pub peak_entries: usize,
}

/// Closes a requirement set against complete facts: decides every deferred
/// constraint and reports requirements that remain live.
fn close(work: &mut Work<'_>, errors: &mut Vec<TypeError>) {
    work.settle();
    let finalized = work.solver.finalize();
    let s = work.solver.subst();
    for e in &work.entries {
        if e.req.kind == ReqKind::OptMethod {
            continue;
        }
        // After a solver failure only requirements that are certainly live
        // are reported.
        match e.eval(s) {
            Truth::Fails => continue,
            Truth::Undecided if finalized.is_err() => continue,
            _ => {}
        }
        let req = e.req.apply(s);
        errors.push(e.origin.error(format!("unsatisfied requirement {req}")));
    }
    if let Err(f) = finalized {
        errors.push(f.to_error());
    }
}

/// Program-level checks on a complete tree result: duplicate classes,
/// inheritance cycles, field shadowing, and residual requirements.
pub fn finish_root(root: &NodeResult, tuning: Tuning) -> CoOutcome {
    let mut errors = root.errors.clone();
    let program_err = |msg: String| TypeError::new(Rule::Program, msg);
    for d in root.facts.duplicates() {
        errors.push(program_err(format!("duplicate class {d}")));
    }
    if let Some(cycle) = root.facts.sigma().find_cycle() {
        let names: Vec<String> = cycle.iter().map(ToString::to_string).collect();
        errors.push(program_err(format!("inheritance cycle through {}", names.join(", "))));
    }
    for info in root.facts.sorted() {
        for (f, _) in &info.fields {
            if let Some(owner) = root.facts.ancestors(&info.name).iter().find(|a| a.field(f).is_some()) {
                errors.push(
                    TypeError::new(
                        Rule::Class,
                        format!("field {f} shadows the field declared in {}", owner.name),
                    )
                    .in_class(&info.name),
                );
            }
        }
    }
    let mut work = Work::new(&root.facts, tuning, root.entries.clone(), root.deferred.clone());
    close(&mut work, &mut errors);
    let pins = root
        .pins
        .iter()
        .map(|p| {
            let p = p.resolve(&work.solver);
            ((p.class.clone(), p.method.clone()), p)
        })
        .collect();
    CoOutcome {
        verdict: if errors.is_empty() {
            Verdict::Accept
        } else {
            Verdict::Reject(errors)
        },
        pins,
        peak_entries: root.peak_entries.max(work.entries.len()),
    }
}

/// Checks a whole program tree with a fresh variable supply.
pub fn check_program(program: &ProgramNode, tuning: Tuning) -> CoOutcome {
    let mut vars = VarGen::from_env();
    check_program_with(program, &mut vars, tuning)
}

pub fn check_program_with(program: &ProgramNode, vars: &mut VarGen, tuning: Tuning) -> CoOutcome {
    let root = check_node(program, vars, tuning);
    finish_root(&root, tuning)
}

/// Closes an expression result under a typing context and complete class
/// facts. On success returns the final solver, whose substitution grounds
/// the expression's type and requirements.
pub fn close_expr(
    res: &CoResult,
    ctx: &TypingContext,
    facts: &ClassFacts,
    tuning: Tuning,
) -> Result<Solver, Vec<TypeError>> {
    let mut errors: Vec<TypeError> = res.solver.failure().map(|f| f.to_error()).into_iter().collect();
    let mut pending = Emitted::new();
    for (x, t) in res.r.iter() {
        match ctx.get(x) {
            Some(c) => pending.push((
                Constraint::Eq(t.clone(), TypeRef::Class(c.clone())),
                Origin::new(Rule::Var),
            )),
            None => errors.push(TypeError::new(Rule::Var, format!("unbound variable {x}"))),
        }
    }
    let infos = facts.sorted();
    let mut work = Work::new(facts, tuning, Vec::new(), res.solver.deferred());
    work.pending.extend(pending);
    work.entries = split_against(res.cr.clone().into_entries(), &infos, &tuning, &mut work.pending);
    close(&mut work, &mut errors);
    if errors.is_empty() {
        Ok(work.solver)
    } else {
        Err(errors)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::check_program as check_contextual;
    use crate::syntax::{parse_expr, parse_program};

    const NAT: &str = "
        class Nat extends Object { Nat() { super(); } Nat plus(Nat o) { return o; } }
        class Zero extends Nat { Zero() { super(); } }
        class Succ extends Nat {
            Nat pred;
            Succ(Nat pred) { super(); this.pred = pred; }
            Nat plus(Nat o) { return new Succ(this.pred.plus(o)); }
        }
    ";

    const LIST: &str = "
        class List extends Object {
            List() { super(); }
            List add(Nat a) { return this; }
            Nat size() { return 0; }
        }
        class LinkedList extends List { LinkedList() { super(); } }
    ";

    fn both(src: &str) -> (bool, bool) {
        let p = parse_program(src).expect("parses");
        let ctx = check_contextual(&p).is_accept();
        let co = check_program(&p, Tuning::default());
        (ctx, co.verdict.is_accept())
    }

    #[test]
    fn variable_rule() {
        let mut vars = VarGen::new();
        let res = co_check_expr(&parse_expr("x").unwrap(), &mut vars, Tuning::default());
        assert_eq!(res.r.get(&Name::new("x")), Some(&res.ty));
        assert!(res.cr.is_empty());
    }

    #[test]
    fn list_expression_requirements() {
        let mut vars = VarGen::new();
        let e = parse_expr("new List().add(x).size()").unwrap();
        let res = co_check_expr(&e, &mut vars, Tuning::default());
        let dump = res.cr.dump();
        assert_eq!(res.cr.len(), 3, "{dump}");
        assert!(dump.contains("List.init()"), "{dump}");
        assert!(dump.contains("List.add"), "{dump}");
        assert!(dump.contains(".size : () -> "), "{dump}");
    }

    #[test]
    fn nat_and_list_accept() {
        assert_eq!(both(&format!("{NAT}{LIST}")), (true, true));
    }

    #[test]
    fn deleted_method_rejects() {
        let src = format!(
            "{NAT}
            class List extends Object {{ List() {{ super(); }} Nat two() {{ return new List().size(); }} }}"
        );
        assert_eq!(both(&src), (false, false));
    }

    #[test]
    fn inherited_method_through_subclass() {
        let src = format!(
            "{NAT}{LIST}
            class User extends Object {{ User() {{ super(); }} Nat go() {{ return new LinkedList().add(1).size(); }} }}"
        );
        assert_eq!(both(&src), (true, true));
    }

    #[test]
    fn unbound_variable_rejects() {
        let src = format!("{NAT} class A extends Object {{ A() {{ super(); }} Nat m() {{ return y; }} }}");
        assert_eq!(both(&src), (false, false));
    }

    #[test]
    fn bad_override_rejects() {
        let src =
            format!("{NAT} class Z2 extends Zero {{ Z2() {{ super(); }} Zero plus(Nat o) {{ return new Zero(); }} }}");
        assert_eq!(both(&src), (false, false));
    }

    #[test]
    fn casts() {
        let base = "class A extends Object { A() { super(); } }
                    class B extends A { B() { super(); } }
                    class C extends Object { C() { super(); } }";
        for (body, ok) in [
            ("(A) new B()", true),
            ("(B) new A()", false),
            ("(B)! new A()", true),
            ("(A)! new B()", false),
            ("(C)? new A()", true),
            ("(A)? new B()", false),
        ] {
            let src = format!("{base} class T extends Object {{ T() {{ super(); }} Object m() {{ return {body}; }} }}");
            assert_eq!(both(&src), (ok, ok), "{body}");
        }
    }

    #[test]
    fn pins_ground_on_accept() {
        let p = parse_program(&format!("{NAT}{LIST}")).unwrap();
        let out = check_program(&p, Tuning::default());
        assert!(out.verdict.is_accept(), "{:?}", out.verdict);
        let pin = &out.pins[&(Name::new("Succ"), Name::new("plus"))];
        assert_eq!(pin.this_ty, TypeRef::class("Succ"));
        assert_eq!(pin.super_ty, TypeRef::class("Nat"));
        assert_eq!(pin.body_ty, TypeRef::class("Succ"));
    }

    #[test]
    fn toggles_agree() {
        let p = parse_program(&format!("{NAT}{LIST}")).unwrap();
        for normalize in [false, true] {
            for in_depth_merge in [false, true] {
                let t = Tuning {
                    normalize,
                    in_depth_merge,
                };
                assert!(check_program(&p, t).verdict.is_accept(), "{t:?}");
            }
        }
    }

    #[test]
    fn closed_expression_matches_contextual_type() {
        let p = parse_program(&format!("{NAT}{LIST}")).unwrap();
        let facts = ClassFacts::union(
            &p.classes()
                .iter()
                .map(|d| ClassFacts::single(ClassInfo::from_decl(d)))
                .collect::<Vec<_>>()
                .iter()
                .collect::<Vec<_>>(),
        );
        let e = parse_expr("new LinkedList().add(x).size()").unwrap();
        let mut vars = VarGen::new();
        let res = co_check_expr(&e, &mut vars, Tuning::default());
        let ctx = TypingContext::new().with("x", "Zero");
        let solver = close_expr(&res, &ctx, &facts, Tuning::default()).expect("closes");
        assert_eq!(solver.resolve(&res.ty), TypeRef::class("Nat"));

        let e = parse_expr("(LinkedList)? (LinkedList)? x").unwrap();
        let res = co_check_expr(&e, &mut vars, Tuning::default());
        assert!(close_expr(&res, &ctx, &facts, Tuning::default()).is_err());
    }
}
