//! Reference checker: types expressions top-down under a typing context.

use std::collections::HashMap;

use crate::class_table::ClassTable;
use crate::error::{Rule, TypeError, Verdict};
use crate::syntax::{ClassDecl, ClassName, Expr, ExprKind, MethodDecl, Name, ProgramNode, THIS};

/// Bindings from variable names and `this` to classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingContext {
    bindings: HashMap<Name, ClassName>,
}

impl TypingContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name`, replacing any earlier binding.
    pub fn bind(&mut self, name: Name, ty: ClassName) -> &mut Self {
        self.bindings.insert(name, ty);
        self
    }

    pub fn with(mut self, name: &str, ty: &str) -> Self {
        self.bind(Name::new(name), Name::new(ty));
        self
    }

    pub fn get(&self, name: &Name) -> Option<&ClassName> {
        self.bindings.get(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &ClassName)> {
        self.bindings.iter()
    }
}

fn check_args(
    ctx: &TypingContext,
    ct: &ClassTable,
    args: &[Expr],
    expected: &[ClassName],
    rule: Rule,
    what: &str,
) -> Result<(), TypeError> {
    if args.len() != expected.len() {
        return Err(TypeError::new(
            rule,
            format!("{what} expects {} arguments, got {}", expected.len(), args.len()),
        ));
    }
    for (a, d) in args.iter().zip(expected) {
        let c = check_expr(ctx, ct, a)?;
        if !ct.is_subtype(&c, d) {
            return Err(
                TypeError::new(rule, format!("argument of type {c} is not a subtype of {d} in {what}")).at(a.span),
            );
        }
    }
    Ok(())
}

/// Type of `e` under `ctx`; the first error encountered wins.
pub fn check_expr(ctx: &TypingContext, ct: &ClassTable, e: &Expr) -> Result<ClassName, TypeError> {
    let result = match &e.kind {
        ExprKind::Var(x) => ctx
            .get(x)
            .cloned()
            .ok_or_else(|| TypeError::new(Rule::Var, format!("unbound variable {x}"))),
        ExprKind::This => ctx
            .get(&Name::new(THIS))
            .cloned()
            .ok_or_else(|| TypeError::new(Rule::Var, "this is unbound")),
        ExprKind::Field(r, f) => {
            let c = check_expr(ctx, ct, r)?;
            ct.field_lookup(f, &c)
                .map_err(|err| TypeError::new(Rule::Field, err.to_string()))
        }
        ExprKind::Invoke(r, m, args) => {
            let c = check_expr(ctx, ct, r)?;
            let sig = ct
                .mtype(m, &c)
                .ok_or_else(|| TypeError::new(Rule::Invk, format!("method {m} not found in class {c}")).at(e.span))?;
            check_args(ctx, ct, args, &sig.params, Rule::Invk, &format!("method {c}.{m}"))?;
            Ok(sig.ret.clone())
        }
        ExprKind::New(c, args) => {
            let fields = ct
                .fields_lookup(c)
                .map_err(|err| TypeError::new(Rule::New, err.to_string()))?;
            check_args(ctx, ct, args, &fields, Rule::New, &format!("constructor {c}"))?;
            Ok(c.clone())
        }
        ExprKind::UCast(c, inner) => {
            let d = check_expr(ctx, ct, inner)?;
            if ct.is_subtype(&d, c) {
                Ok(c.clone())
            } else {
                Err(TypeError::new(
                    Rule::UCast,
                    format!("upcast from {d} to {c}: {d} is not a subtype of {c}"),
                ))
            }
        }
        ExprKind::DCast(c, inner) => {
            let d = check_expr(ctx, ct, inner)?;
            if ct.is_subtype(c, &d) && *c != d {
                Ok(c.clone())
            } else {
                Err(TypeError::new(
                    Rule::DCast,
                    format!("downcast from {d} to {c}: {c} is not a proper subtype of {d}"),
                ))
            }
        }
        ExprKind::SCast(c, inner) => {
            let d = check_expr(ctx, ct, inner)?;
            if !ct.is_subtype(c, &d) && !ct.is_subtype(&d, c) {
                Ok(c.clone())
            } else {
                Err(TypeError::new(
                    Rule::SCast,
                    format!("stupid cast from {d} to {c}: the classes are related"),
                ))
            }
        }
    };
    result.map_err(|err| err.at(e.span))
}

/// Parameters of `m` and `this` bound to their declared types.
pub fn method_context(class: &ClassName, m: &MethodDecl) -> TypingContext {
    let mut ctx = TypingContext::new();
    for p in &m.params {
        ctx.bind(p.name.clone(), p.ty.clone());
    }
    ctx.bind(Name::new(THIS), class.clone());
    ctx
}

/// Checks one method of class `class`.
pub fn check_method(ct: &ClassTable, class: &ClassName, m: &MethodDecl) -> Result<(), TypeError> {
    let tag = |err: TypeError| err.in_class(class).in_method(&m.name);
    let ctx = method_context(class, m);
    let body = check_expr(&ctx, ct, &m.body).map_err(tag)?;
    if !ct.is_subtype(&body, &m.ret) {
        return Err(tag(TypeError::new(
            Rule::Method,
            format!("body type {body} is not a subtype of return type {}", m.ret),
        )
        .at(m.body.span)));
    }
    if let Some(sup) = ct.extends_lookup(class) {
        if let Some(sig) = ct.mtype(&m.name, sup) {
            let params: Vec<ClassName> = m.params.iter().map(|p| p.ty.clone()).collect();
            if sig.params != params || sig.ret != m.ret {
                return Err(tag(TypeError::new(
                    Rule::Method,
                    format!("invalid override of {}: superclass signature is {sig}", m.name),
                )
                .at(m.span)));
            }
        }
    }
    Ok(())
}

/// Checks one class declaration; returns every method error plus any
/// class-level error.
pub fn check_class(ct: &ClassTable, decl: &ClassDecl) -> Vec<TypeError> {
    let mut errors = Vec::new();
    let class_err = |msg: String| TypeError::new(Rule::Class, msg).in_class(&decl.name).at(decl.span);
    match ct.fields_lookup(&decl.superclass) {
        Ok(inherited) => {
            let super_types: Vec<ClassName> = decl.ctor.super_params.iter().map(|p| p.ty.clone()).collect();
            if super_types != inherited {
                errors.push(class_err(format!(
                    "constructor passes ({}) to super but {} has fields ({})",
                    crate::class_table::join(&super_types),
                    decl.superclass,
                    crate::class_table::join(&inherited)
                )));
            }
        }
        Err(err) => errors.push(class_err(err.to_string())),
    }
    if decl.ctor.own_params != decl.fields {
        errors.push(class_err(
            "constructor parameters do not match the declared fields".into(),
        ));
    }
    for f in &decl.fields {
        if let Some(owner) = ct
            .ancestors(&decl.name)
            .iter()
            .find(|a| ct.own_field(a, &f.name).is_some())
        {
            errors.push(class_err(format!(
                "field {} shadows the field declared in {owner}",
                f.name
            )));
        }
    }
    for m in &decl.methods {
        if let Err(err) = check_method(ct, &decl.name, m) {
            errors.push(err);
        }
    }
    errors
}

/// Builds the class table and checks every declaration.
pub fn check_program(program: &ProgramNode) -> Verdict {
    if let Err(msg) = program.validate() {
        return Verdict::Reject(vec![TypeError::new(Rule::Program, msg)]);
    }
    let ct = match ClassTable::build(program) {
        Ok(ct) => ct,
        Err(err) => return Verdict::Reject(vec![TypeError::new(Rule::Program, err.to_string())]),
    };
    let errors: Vec<TypeError> = program
        .classes()
        .into_iter()
        .flat_map(|d| check_class(&ct, d))
        .collect();
    if errors.is_empty() {
        Verdict::Accept
    } else {
        Verdict::Reject(errors)
    }
}
