use thiserror::Error;

use super::{balance, ClassDecl, CtorDecl, Expr, ExprKind, MethodDecl, Name, Param, ProgramNode, Span};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub message: String,
}

impl ParseError {
    fn at(span: Span, message: impl Into<String>) -> Self {
        ParseError {
            line: span.line,
            col: span.col,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    Punct(char),
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: Span,
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut line = 1u32;
    let mut col = 1u32;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let span = Span::new(line, col);
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
        } else if c.is_whitespace() {
            chars.next();
            col += 1;
        } else if c == '/' {
            chars.next();
            if chars.peek() != Some(&'/') {
                return Err(ParseError::at(span, "unexpected '/'"));
            }
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                chars.next();
            }
        } else if c.is_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            out.push(Token {
                tok: Tok::Ident(s),
                span,
            });
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    s.push(c);
                    chars.next();
                    col += 1;
                } else {
                    break;
                }
            }
            let n = s
                .parse()
                .map_err(|_| ParseError::at(span, format!("numeric literal {s} out of range")))?;
            out.push(Token {
                tok: Tok::Number(n),
                span,
            });
        } else if "{}();,.=!?".contains(c) {
            chars.next();
            col += 1;
            out.push(Token {
                tok: Tok::Punct(c),
                span,
            });
        } else {
            return Err(ParseError::at(span, format!("unexpected character {c:?}")));
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(out)
}

const KEYWORDS: &[&str] = &["class", "extends", "super", "this", "return", "new"];

/// Numeric literals above this bound are rejected; they desugar to nested
/// `Succ` allocations.
const MAX_LITERAL: u64 = 1024;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, n: usize) -> &Tok {
        let i = (self.pos + n).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError::at(self.span(), msg))
    }

    fn describe(&self) -> String {
        match self.peek() {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(n) => format!("'{n}'"),
            Tok::Punct(c) => format!("'{c}'"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn punct(&mut self, c: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected '{c}', found {}", self.describe()))
        }
    }

    fn is_punct(&self, c: char) -> bool {
        *self.peek() == Tok::Punct(c)
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == kw => {
                self.bump();
                Ok(())
            }
            _ => self.err(format!("expected '{kw}', found {}", self.describe())),
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self) -> Result<Name, ParseError> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(Name::from(s))
            }
            _ => self.err(format!("expected identifier, found {}", self.describe())),
        }
    }

    fn program(&mut self) -> Result<Vec<ClassDecl>, ParseError> {
        let mut classes: Vec<ClassDecl> = Vec::new();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            let class = self.class()?;
            if classes.iter().any(|c| c.name == class.name) {
                return Err(ParseError::at(span, format!("duplicate class {}", class.name)));
            }
            classes.push(class);
        }
        Ok(classes)
    }

    fn class(&mut self) -> Result<ClassDecl, ParseError> {
        let span = self.span();
        self.keyword("class")?;
        let name = self.ident()?;
        self.keyword("extends")?;
        let superclass = self.ident()?;
        self.punct('{')?;
        let mut fields = Vec::new();
        // Fields are `T f;`; the constructor starts with `C(`.
        while matches!(self.peek(), Tok::Ident(_)) && *self.peek_at(2) == Tok::Punct(';') {
            let ty = self.ident()?;
            let f = self.ident()?;
            self.punct(';')?;
            fields.push(Param { ty, name: f });
        }
        let ctor = self.ctor()?;
        let mut methods = Vec::new();
        while !self.is_punct('}') {
            methods.push(self.method()?);
        }
        self.punct('}')?;
        let decl = ClassDecl {
            name,
            superclass,
            fields,
            ctor,
            methods,
            span,
        };
        decl.validate().map_err(|m| ParseError::at(span, m))?;
        Ok(decl)
    }

    fn params(&mut self) -> Result<Vec<Param>, ParseError> {
        self.punct('(')?;
        let mut out = Vec::new();
        if !self.is_punct(')') {
            loop {
                let ty = self.ident()?;
                let name = match self.peek() {
                    Tok::Ident(s) if s == "this" => {
                        return self.err("parameter may not be named this");
                    }
                    _ => self.ident()?,
                };
                out.push(Param { ty, name });
                if self.is_punct(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.punct(')')?;
        Ok(out)
    }

    fn ctor(&mut self) -> Result<CtorDecl, ParseError> {
        let span = self.span();
        let class = self.ident()?;
        let params = self.params()?;
        self.punct('{')?;
        self.keyword("super")?;
        self.punct('(')?;
        let mut super_args = Vec::new();
        if !self.is_punct(')') {
            loop {
                super_args.push(self.ident()?);
                if self.is_punct(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.punct(')')?;
        self.punct(';')?;
        let mut assigned = Vec::new();
        while self.is_keyword("this") {
            let at = self.span();
            self.bump();
            self.punct('.')?;
            let f = self.ident()?;
            self.punct('=')?;
            let x = self.ident()?;
            self.punct(';')?;
            if f != x {
                return Err(ParseError::at(at, format!("constructor must assign this.{f} = {f}")));
            }
            assigned.push(f);
        }
        self.punct('}')?;
        let n = super_args.len();
        let shape_ok = n + assigned.len() == params.len()
            && params[..n].iter().zip(&super_args).all(|(p, a)| p.name == *a)
            && params[n..].iter().zip(&assigned).all(|(p, a)| p.name == *a);
        if !shape_ok {
            return Err(ParseError::at(
                span,
                "constructor must pass its leading parameters to super and assign the rest to fields in order",
            ));
        }
        let mut params = params;
        let own_params = params.split_off(n);
        Ok(CtorDecl {
            class,
            super_params: params,
            own_params,
            span,
        })
    }

    fn method(&mut self) -> Result<MethodDecl, ParseError> {
        let span = self.span();
        let ret = self.ident()?;
        let name = self.ident()?;
        let params = self.params()?;
        self.punct('{')?;
        self.keyword("return")?;
        let body = self.expr()?;
        self.punct(';')?;
        self.punct('}')?;
        Ok(MethodDecl {
            ret,
            name,
            params,
            body,
            span,
        })
    }

    fn starts_expr(&self) -> bool {
        match self.peek() {
            Tok::Ident(s) => !matches!(s.as_str(), "class" | "extends" | "super" | "return"),
            Tok::Number(_) => true,
            Tok::Punct(c) => *c == '(',
            Tok::Eof => false,
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        while self.is_punct('.') {
            let span = self.span();
            self.bump();
            let member = self.ident()?;
            if self.is_punct('(') {
                let args = self.args()?;
                e = Expr::new(ExprKind::Invoke(Box::new(e), member, args)).at(span);
            } else {
                e = Expr::new(ExprKind::Field(Box::new(e), member)).at(span);
            }
        }
        Ok(e)
    }

    fn args(&mut self) -> Result<Vec<Expr>, ParseError> {
        self.punct('(')?;
        let mut out = Vec::new();
        if !self.is_punct(')') {
            loop {
                out.push(self.expr()?);
                if self.is_punct(',') {
                    self.bump();
                } else {
                    break;
                }
            }
        }
        self.punct(')')?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Number(n) => {
                self.bump();
                if n > MAX_LITERAL {
                    return Err(ParseError::at(
                        span,
                        format!("numeric literal {n} exceeds {MAX_LITERAL}"),
                    ));
                }
                let mut e = Expr::new_obj("Zero", vec![]).at(span);
                for _ in 0..n {
                    e = Expr::new_obj("Succ", vec![e]).at(span);
                }
                Ok(e)
            }
            Tok::Ident(s) if s == "this" => {
                self.bump();
                Ok(Expr::this().at(span))
            }
            Tok::Ident(s) if s == "new" => {
                self.bump();
                let class = self.ident()?;
                let args = self.args()?;
                Ok(Expr::new(ExprKind::New(class, args)).at(span))
            }
            Tok::Ident(s) if s == "succ" && *self.peek_at(1) == Tok::Punct('(') => {
                self.bump();
                self.punct('(')?;
                let inner = self.expr()?;
                self.punct(')')?;
                Ok(Expr::new(ExprKind::New(Name::new("Succ"), vec![inner])).at(span))
            }
            Tok::Ident(_) => Ok(Expr::new(ExprKind::Var(self.ident()?)).at(span)),
            Tok::Punct('(') => {
                let is_cast = matches!(self.peek_at(1), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                    && *self.peek_at(2) == Tok::Punct(')')
                    && self.cast_follows(3);
                self.bump();
                if is_cast {
                    let class = self.ident()?;
                    self.punct(')')?;
                    let kind = if self.is_punct('!') {
                        self.bump();
                        '!'
                    } else if self.is_punct('?') {
                        self.bump();
                        '?'
                    } else {
                        ' '
                    };
                    let operand = Box::new(self.expr()?);
                    let kind = match kind {
                        '!' => ExprKind::DCast(class, operand),
                        '?' => ExprKind::SCast(class, operand),
                        _ => ExprKind::UCast(class, operand),
                    };
                    Ok(Expr::new(kind).at(span))
                } else {
                    let e = self.expr()?;
                    self.punct(')')?;
                    Ok(e)
                }
            }
            _ => self.err(format!("expected expression, found {}", self.describe())),
        }
    }

    /// After `( Ident )`, a cast is followed by `!`, `?` or an expression.
    fn cast_follows(&self, offset: usize) -> bool {
        match self.peek_at(offset) {
            Tok::Punct('!') | Tok::Punct('?') | Tok::Punct('(') | Tok::Number(_) => true,
            Tok::Ident(s) => !matches!(s.as_str(), "class" | "extends" | "super" | "return"),
            _ => false,
        }
    }
}

/// Parses a sequence of class declarations.
pub fn parse_classes(text: &str) -> Result<Vec<ClassDecl>, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    p.program()
}

/// Parses a program and arranges its classes in a balanced binary tree.
pub fn parse_program(text: &str) -> Result<ProgramNode, ParseError> {
    Ok(balance(parse_classes(text)?, 2))
}

/// Parses a single expression.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    if !p.starts_expr() {
        return p.err(format!("expected expression, found {}", p.describe()));
    }
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after expression", p.describe()));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_class() {
        let p = parse_program("class A extends Object { A() { super(); } }").unwrap();
        let ProgramNode::Group(children) = &p else {
            panic!("root must be a group")
        };
        let [ProgramNode::Leaf(a)] = children.as_slice() else {
            panic!("expected one leaf")
        };
        assert_eq!(a.name.as_str(), "A");
        assert!(a.fields.is_empty() && a.methods.is_empty());
    }

    #[test]
    fn invocation_chain_shape() {
        let e = parse_expr("new List().add(n).size()").unwrap();
        let expected = Expr::new_obj("List", vec![])
            .call("add", vec![Expr::var("n")])
            .call("size", vec![]);
        assert_eq!(e, expected);
    }

    #[test]
    fn literals_desugar() {
        assert_eq!(parse_expr("0").unwrap(), Expr::new_obj("Zero", vec![]));
        assert_eq!(
            parse_expr("succ(0)").unwrap(),
            Expr::new_obj("Succ", vec![Expr::new_obj("Zero", vec![])])
        );
        assert_eq!(parse_expr("2").unwrap(), parse_expr("succ(succ(0))").unwrap());
    }

    #[test]
    fn cast_forms() {
        assert_eq!(parse_expr("(C) x").unwrap(), Expr::ucast("C", Expr::var("x")));
        assert_eq!(parse_expr("(C)! x").unwrap(), Expr::dcast("C", Expr::var("x")));
        assert_eq!(parse_expr("(C)? x").unwrap(), Expr::scast("C", Expr::var("x")));
        // Postfix binds tighter than a cast.
        assert_eq!(
            parse_expr("(C) x.f").unwrap(),
            Expr::ucast("C", Expr::var("x").field("f"))
        );
        assert_eq!(
            parse_expr("((C) x).f").unwrap(),
            Expr::ucast("C", Expr::var("x")).field("f")
        );
        // A parenthesized variable is not a cast.
        assert_eq!(parse_expr("(x).f").unwrap(), Expr::var("x").field("f"));
    }

    #[test]
    fn rejects_self_extension() {
        let err = parse_program("class A extends A { A() { super(); } }").unwrap_err();
        assert!(err.message.contains("extends itself"), "{err}");
    }

    #[test]
    fn rejects_duplicates() {
        let dup_class = "class A extends Object { A() { super(); } } class A extends Object { A() { super(); } }";
        assert!(parse_program(dup_class)
            .unwrap_err()
            .message
            .contains("duplicate class"));
        let dup_field = "class A extends Object { A f; A f; A(A f, A f) { super(); this.f = f; this.f = f; } }";
        assert!(parse_program(dup_field).is_err());
        let dup_method = "class A extends Object { A() { super(); } A m() { return this; } A m() { return this; } }";
        assert!(parse_program(dup_method)
            .unwrap_err()
            .message
            .contains("duplicate method"));
    }

    #[test]
    fn rejects_malformed_ctor() {
        let text = "class A extends Object { A f; A(A f) { super(); this.f = g; } }";
        assert!(parse_program(text).is_err());
        let text = "class A extends Object { A f; A(A f, A g) { super(g); this.f = f; } }";
        assert!(parse_program(text).is_err());
    }

    #[test]
    fn error_positions() {
        let err = parse_program("class A extends Object {\n  A() { super() }\n}").unwrap_err();
        assert_eq!((err.line, err.col), (2, 17));
    }

    #[test]
    fn comments_ignored() {
        let text = "// header\nclass A extends Object { // trailing\n A() { super(); } }";
        assert_eq!(parse_program(text).unwrap().classes().len(), 1);
    }
}
