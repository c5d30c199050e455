use std::fmt::Write;

use super::{ClassDecl, Expr, ExprKind, Param, ProgramNode};

/// Renders a program, one class per line, in left-to-right leaf order.
pub fn render(program: &ProgramNode) -> String {
    let mut out = String::new();
    for c in program.classes() {
        out.push_str(&render_class(c));
        out.push('\n');
    }
    out
}

fn params(ps: &[Param]) -> String {
    ps.iter()
        .map(|p| format!("{} {}", p.ty, p.name))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Renders one class declaration on a single line. Reparsing the output
/// yields a structurally equal declaration.
pub fn render_class(c: &ClassDecl) -> String {
    let mut s = format!("class {} extends {} {{", c.name, c.superclass);
    for f in &c.fields {
        let _ = write!(s, " {} {};", f.ty, f.name);
    }
    let all: Vec<Param> = c.ctor.super_params.iter().chain(&c.ctor.own_params).cloned().collect();
    let supers: Vec<&str> = c.ctor.super_params.iter().map(|p| p.name.as_str()).collect();
    let _ = write!(
        s,
        " {}({}) {{ super({});",
        c.ctor.class,
        params(&all),
        supers.join(", ")
    );
    for p in &c.ctor.own_params {
        let _ = write!(s, " this.{0} = {0};", p.name);
    }
    s.push_str(" }");
    for m in &c.methods {
        let _ = write!(
            s,
            " {} {}({}) {{ return {}; }}",
            m.ret,
            m.name,
            params(&m.params),
            render_expr(&m.body)
        );
    }
    s.push_str(" }");
    s
}

pub fn render_expr(e: &Expr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_args(s: &mut String, args: &[Expr]) {
    s.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_expr(s, a);
    }
    s.push(')');
}

fn write_receiver(s: &mut String, e: &Expr) {
    let is_cast = matches!(e.kind, ExprKind::UCast(..) | ExprKind::DCast(..) | ExprKind::SCast(..));
    if is_cast {
        s.push('(');
        write_expr(s, e);
        s.push(')');
    } else {
        write_expr(s, e);
    }
}

fn write_expr(s: &mut String, e: &Expr) {
    match &e.kind {
        ExprKind::Var(x) => s.push_str(x.as_str()),
        ExprKind::This => s.push_str("this"),
        ExprKind::Field(r, f) => {
            write_receiver(s, r);
            s.push('.');
            s.push_str(f.as_str());
        }
        ExprKind::Invoke(r, m, args) => {
            write_receiver(s, r);
            s.push('.');
            s.push_str(m.as_str());
            write_args(s, args);
        }
        ExprKind::New(c, args) => {
            s.push_str("new ");
            s.push_str(c.as_str());
            write_args(s, args);
        }
        ExprKind::UCast(c, inner) => {
            let _ = write!(s, "({c}) ");
            write_expr(s, inner);
        }
        ExprKind::DCast(c, inner) => {
            let _ = write!(s, "({c})! ");
            write_expr(s, inner);
        }
        ExprKind::SCast(c, inner) => {
            let _ = write!(s, "({c})? ");
            write_expr(s, inner);
        }
    }
}
