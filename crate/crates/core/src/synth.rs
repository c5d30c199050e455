//! Synthesized benchmark programs: the `Nat` classes plus `k` binary
//! inheritance hierarchies of height `h`, and single-fault mutants.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::class_table::ClassTable;
use crate::contextual::{check_expr, method_context, TypingContext};
use crate::syntax::{
    balance, parse_classes, ClassDecl, ClassName, Expr, ExprKind, MethodDecl, Name, Param, ProgramNode, Span,
};

/// Shape of the generated method bodies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    /// Own field plus the superclass's method.
    AccumSuper,
    /// Own field plus the method of the same position in the previous
    /// hierarchy, reached through an extra field.
    AccumPrev,
    /// Both of the above.
    AccumPrevSuper,
}

/// How member names are shared between classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Naming {
    /// Every name is unique.
    Unique,
    /// Hierarchies reuse the same names position by position.
    Mirrored,
    /// All classes of one hierarchy share the method name; field names vary
    /// only by depth so that no field is shadowed.
    Override,
    /// Mirrored and Override combined.
    MirOver,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::AccumSuper, Scheme::AccumPrev, Scheme::AccumPrevSuper];

    fn uses_super(self) -> bool {
        matches!(self, Scheme::AccumSuper | Scheme::AccumPrevSuper)
    }

    fn uses_prev(self) -> bool {
        matches!(self, Scheme::AccumPrev | Scheme::AccumPrevSuper)
    }
}

impl Naming {
    pub const ALL: [Naming; 4] = [Naming::Unique, Naming::Mirrored, Naming::Override, Naming::MirOver];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::AccumSuper => "super",
            Scheme::AccumPrev => "prev",
            Scheme::AccumPrevSuper => "prev-super",
        })
    }
}

impl fmt::Display for Naming {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Naming::Unique => "unique",
            Naming::Mirrored => "mirrored",
            Naming::Override => "override",
            Naming::MirOver => "mir-over",
        })
    }
}

impl FromStr for Scheme {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown scheme {s} (expected super, prev or prev-super)"))
    }
}

impl FromStr for Naming {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Naming::ALL
            .into_iter()
            .find(|x| x.to_string() == s)
            .ok_or_else(|| format!("unknown naming {s} (expected unique, mirrored, override or mir-over)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SynthConfig {
    pub scheme: Scheme,
    pub naming: Naming,
    /// Number of root hierarchies.
    pub k: usize,
    /// Height of each hierarchy.
    pub height: usize,
}

impl SynthConfig {
    pub fn new(scheme: Scheme, naming: Naming, k: usize, height: usize) -> Self {
        assert!(k >= 1 && height >= 1, "k and height must be positive");
        SynthConfig {
            scheme,
            naming,
            k,
            height,
        }
    }

    pub fn class_count(&self) -> usize {
        self.k * ((1 << self.height) - 1) + 3
    }

    /// Every scheme and naming combination for each `k` and height.
    pub fn grid(ks: &[usize], heights: &[usize]) -> Vec<SynthConfig> {
        let mut out = Vec::new();
        for &scheme in &Scheme::ALL {
            for &naming in &Naming::ALL {
                for &k in ks {
                    for &height in heights {
                        out.push(SynthConfig::new(scheme, naming, k, height));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for SynthConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} k={} h={}", self.scheme, self.naming, self.k, self.height)
    }
}

const NAT_SOURCE: &str = "
class Nat extends Object {
    Nat() { super(); }
    Nat plus(Nat other) { return other; }
}
class Zero extends Nat {
    Zero() { super(); }
}
class Succ extends Nat {
    Nat pred;
    Succ(Nat pred) { super(); this.pred = pred; }
    Nat plus(Nat other) { return new Succ(this.pred.plus(other)); }
}
";

/// `Nat`, `Zero` and `Succ`; addition peels one `Succ` per step.
pub fn nat_classes() -> Vec<ClassDecl> {
    parse_classes(NAT_SOURCE).expect("Nat classes parse")
}

/// Names of the `Nat` classes, which every synthesized program starts with.
pub const NAT_CLASSES: [&str; 3] = ["Nat", "Zero", "Succ"];

fn depth(p: usize) -> usize {
    (usize::BITS - 1 - p.leading_zeros()) as usize
}

struct Names {
    naming: Naming,
}

impl Names {
    fn class(i: usize, p: usize) -> String {
        format!("C{i}_{p}")
    }

    fn member(&self, base: &str, i: usize, p: usize) -> String {
        let d = depth(p);
        match self.naming {
            Naming::Unique => format!("{base}{i}_{p}"),
            Naming::Mirrored => format!("{base}{p}"),
            Naming::Override if base == "m" => format!("{base}{i}"),
            Naming::Override => format!("{base}{i}_{d}"),
            Naming::MirOver if base == "m" => base.to_owned(),
            Naming::MirOver => format!("{base}{d}"),
        }
    }
}

/// Declarations in order: the `Nat` classes, then each hierarchy in heap
/// order (position `p` extends `p / 2`; position 1 extends `Object`).
pub fn synthesize_classes(cfg: &SynthConfig) -> Vec<ClassDecl> {
    let names = Names { naming: cfg.naming };
    let per = (1usize << cfg.height) - 1;
    let mut out = nat_classes();
    out.reserve(cfg.k * per);
    for i in 1..=cfg.k {
        let mut fields_at: Vec<Vec<Param>> = vec![Vec::new(); per + 1];
        for p in 1..=per {
            let class = Names::class(i, p);
            let superclass = if p == 1 {
                "Object".to_owned()
            } else {
                Names::class(i, p / 2)
            };
            let inherited: Vec<Param> = if p == 1 { Vec::new() } else { fields_at[p / 2].clone() };
            let nat_field = names.member("f", i, p);
            let mut own = vec![Param::new("Nat", &nat_field)];
            let prev_field = (cfg.scheme.uses_prev() && i > 1).then(|| names.member("g", i, p));
            if let Some(g) = &prev_field {
                own.push(Param::new(&Names::class(i - 1, p), g));
            }
            let mut summands = vec![Expr::this().field(&nat_field)];
            if cfg.scheme.uses_super() && p > 1 {
                let parent = Names::class(i, p / 2);
                let m = names.member("m", i, p / 2);
                summands.push(Expr::ucast(&parent, Expr::this()).call(&m, vec![]));
            }
            if let Some(g) = &prev_field {
                let m = names.member("m", i - 1, p);
                summands.push(Expr::this().field(g).call(&m, vec![]));
            }
            let mut body = summands.remove(0);
            for s in summands {
                body = body.call("plus", vec![s]);
            }
            let method = MethodDecl {
                ret: Name::new("Nat"),
                name: Name::new(&names.member("m", i, p)),
                params: Vec::new(),
                body,
                span: Span::default(),
            };
            let super_params = inherited
                .iter()
                .enumerate()
                .map(|(n, f)| Param::new(f.ty.as_str(), &format!("s{n}")))
                .collect();
            let mut all = inherited;
            all.extend(own.iter().cloned());
            fields_at[p] = all;
            out.push(ClassDecl::with_canonical_ctor(
                &class,
                &superclass,
                super_params,
                own,
                vec![method],
            ));
        }
    }
    out
}

pub fn synthesize(cfg: &SynthConfig) -> ProgramNode {
    balance(synthesize_classes(cfg), 2)
}

/// A synthesized program with its declarations in a seeded random order.
pub fn shuffled(cfg: &SynthConfig, seed: u64) -> ProgramNode {
    let mut classes = synthesize_classes(cfg);
    classes.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    balance(classes, 2)
}

/// A single injected fault.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Fault {
    /// A method's return type becomes its own class, which the body does
    /// not produce.
    WrongReturn,
    /// A method that some call resolves to, with no inherited fallback, is
    /// deleted.
    DeleteMethod,
    /// The last constructor parameter for an own field is dropped.
    DropCtorParam,
    /// A method overriding an inherited one gains an extra parameter.
    BadOverride,
    /// A method body becomes an undeclared variable.
    UnboundVariable,
    /// A method body is upcast to a class it is unrelated to.
    UnrelatedUpcast,
    NoOp,
}

impl Fault {
    pub const ALL: [Fault; 7] = [
        Fault::WrongReturn,
        Fault::DeleteMethod,
        Fault::DropCtorParam,
        Fault::BadOverride,
        Fault::UnboundVariable,
        Fault::UnrelatedUpcast,
        Fault::NoOp,
    ];
}

impl fmt::Display for Fault {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Clone, Debug)]
pub struct Mutant {
    pub program: ProgramNode,
    pub fault: Fault,
    /// Class the fault was injected into.
    pub target: Option<ClassName>,
    pub expect_accept: bool,
}

/// Methods that some call site resolves to, given the static receiver
/// types of a well-typed program.
fn called_methods(classes: &[ClassDecl], ct: &ClassTable) -> HashSet<(ClassName, Name)> {
    fn visit(e: &Expr, ctx: &TypingContext, ct: &ClassTable, out: &mut HashSet<(ClassName, Name)>) {
        match &e.kind {
            ExprKind::Var(_) | ExprKind::This => {}
            ExprKind::Field(r, _) | ExprKind::UCast(_, r) | ExprKind::DCast(_, r) | ExprKind::SCast(_, r) => {
                visit(r, ctx, ct, out)
            }
            ExprKind::New(_, args) => args.iter().for_each(|a| visit(a, ctx, ct, out)),
            ExprKind::Invoke(r, m, args) => {
                visit(r, ctx, ct, out);
                args.iter().for_each(|a| visit(a, ctx, ct, out));
                if let Ok(recv) = check_expr(ctx, ct, r) {
                    let owner = std::iter::once(recv.clone())
                        .chain(ct.ancestors(&recv))
                        .find(|c| ct.own_method(c, m).is_some());
                    if let Some(owner) = owner {
                        out.insert((owner, m.clone()));
                    }
                }
            }
        }
    }
    let mut out = HashSet::new();
    for c in classes {
        for m in &c.methods {
            visit(&m.body, &method_context(&c.name, m), ct, &mut out);
        }
    }
    out
}

fn inherited_method(classes: &[ClassDecl], ct: &ClassTable, class: &ClassDecl) -> Option<(Name, Vec<Param>)> {
    let mut seen = BTreeSet::new();
    for a in ct.ancestors(&class.name) {
        let Some(decl) = classes.iter().find(|d| d.name == a) else {
            continue;
        };
        for m in &decl.methods {
            if class.method(m.name.as_str()).is_none() && seen.insert(m.name.clone()) {
                let params = m
                    .params
                    .iter()
                    .enumerate()
                    .map(|(n, p)| Param::new(p.ty.as_str(), &format!("x{n}")))
                    .collect();
                return Some((m.name.clone(), params));
            }
        }
    }
    None
}

fn body_type(ct: &ClassTable, c: &ClassDecl, m: &MethodDecl) -> Option<ClassName> {
    check_expr(&method_context(&c.name, m), ct, &m.body).ok()
}

/// Injects one seeded fault into a program the contextual checker accepts.
/// Faults with no eligible site fall through to the next kind; the result is
/// rebalanced as a binary tree in the original declaration order.
pub fn mutate(program: &ProgramNode, seed: u64) -> Mutant {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut classes: Vec<ClassDecl> = program.classes().into_iter().cloned().collect();
    let ct = ClassTable::from_decls(&classes).expect("mutate requires a well-formed program");
    let start = rng.gen_range(0..Fault::ALL.len());
    for offset in 0..Fault::ALL.len() {
        let fault = Fault::ALL[(start + offset) % Fault::ALL.len()];
        if let Some(target) = apply_fault(fault, &mut classes, &ct, &mut rng) {
            return Mutant {
                program: balance(classes, 2),
                fault,
                target,
                expect_accept: fault == Fault::NoOp,
            };
        }
    }
    unreachable!("NoOp always applies")
}

fn pick<'a, T>(rng: &mut ChaCha8Rng, items: &'a [T]) -> Option<&'a T> {
    items.choose(rng)
}

fn apply_fault(
    fault: Fault,
    classes: &mut [ClassDecl],
    ct: &ClassTable,
    rng: &mut ChaCha8Rng,
) -> Option<Option<ClassName>> {
    let with_methods: Vec<usize> = (0..classes.len()).filter(|&i| !classes[i].methods.is_empty()).collect();
    match fault {
        Fault::NoOp => Some(None),
        Fault::WrongReturn => {
            // The class itself is never a supertype of a body that does not
            // mention it; skip methods whose body type could be the class.
            let sites: Vec<(usize, usize)> = with_methods
                .iter()
                .flat_map(|&i| (0..classes[i].methods.len()).map(move |j| (i, j)))
                .filter(|&(i, j)| {
                    let c = &classes[i];
                    let body = body_type(ct, c, &c.methods[j]);
                    body.is_some_and(|t| !ct.is_subtype(&t, &c.name))
                })
                .collect();
            let &(i, j) = pick(rng, &sites)?;
            let name = classes[i].name.clone();
            classes[i].methods[j].ret = name.clone();
            Some(Some(name))
        }
        Fault::DeleteMethod => {
            let called = called_methods(classes, ct);
            let mut sites: Vec<(usize, usize)> = Vec::new();
            for (i, c) in classes.iter().enumerate() {
                for (j, m) in c.methods.iter().enumerate() {
                    let inherited = ct
                        .ancestors(&c.name)
                        .iter()
                        .any(|a| ct.own_method(a, &m.name).is_some());
                    if !inherited && called.contains(&(c.name.clone(), m.name.clone())) {
                        sites.push((i, j));
                    }
                }
            }
            let &(i, j) = pick(rng, &sites)?;
            classes[i].methods.remove(j);
            Some(Some(classes[i].name.clone()))
        }
        Fault::DropCtorParam => {
            let sites: Vec<usize> = (0..classes.len())
                .filter(|&i| !classes[i].ctor.own_params.is_empty())
                .collect();
            let &i = pick(rng, &sites)?;
            classes[i].ctor.own_params.pop();
            Some(Some(classes[i].name.clone()))
        }
        Fault::BadOverride => {
            let sites: Vec<(usize, Name, Vec<Param>)> = classes
                .iter()
                .enumerate()
                .filter_map(|(i, c)| inherited_method(classes, ct, c).map(|(m, ps)| (i, m, ps)))
                .collect();
            let (i, m, params) = pick(rng, &sites)?.clone();
            let sig = ct.mtype(&m, &classes[i].superclass).expect("inherited").clone();
            let mut params = params;
            let extra = Param::new(sig.ret.as_str(), "extra");
            params.push(extra);
            classes[i].methods.push(MethodDecl {
                ret: sig.ret.clone(),
                name: m,
                params,
                body: Expr::var("extra"),
                span: Span::default(),
            });
            Some(Some(classes[i].name.clone()))
        }
        Fault::UnboundVariable => {
            let &i = pick(rng, &with_methods)?;
            let j = rng.gen_range(0..classes[i].methods.len());
            let m = &mut classes[i].methods[j];
            let unbound = if m.params.iter().any(|p| p.name.as_str() == "y") {
                "y0"
            } else {
                "y"
            };
            m.body = Expr::var(unbound);
            Some(Some(classes[i].name.clone()))
        }
        Fault::UnrelatedUpcast => {
            let mut sites: Vec<(usize, usize, ClassName)> = Vec::new();
            for &i in &with_methods {
                let c = &classes[i];
                for (j, m) in c.methods.iter().enumerate() {
                    let Some(body) = body_type(ct, c, m) else {
                        continue;
                    };
                    let unrelated = classes
                        .iter()
                        .map(|d| &d.name)
                        .filter(|d| !ct.is_subtype(&body, d) && !ct.is_subtype(d, &body))
                        .min()
                        .cloned();
                    if let Some(d) = unrelated {
                        sites.push((i, j, d));
                    }
                }
            }
            let (i, j, d) = pick(rng, &sites)?.clone();
            let m = &mut classes[i].methods[j];
            let body = std::mem::replace(&mut m.body, Expr::this());
            m.body = Expr::new(ExprKind::UCast(d, Box::new(body)));
            Some(Some(classes[i].name.clone()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contextual::check_program as check_contextual;

    #[test]
    fn class_counts() {
        for k in 1..=6 {
            for height in 1..=6 {
                let cfg = SynthConfig::new(Scheme::AccumPrevSuper, Naming::Override, k, height);
                assert_eq!(synthesize_classes(&cfg).len(), cfg.class_count());
            }
        }
        let big = SynthConfig::new(Scheme::AccumSuper, Naming::Unique, 40, 5);
        assert_eq!(big.class_count(), 1243);
    }

    #[test]
    fn grid_is_well_typed() {
        for cfg in SynthConfig::grid(&[1, 2], &[1, 2, 3]) {
            let v = check_contextual(&synthesize(&cfg));
            assert!(v.is_accept(), "{cfg}: {v:?}");
        }
    }

    #[test]
    fn mutants_reject_unless_noop() {
        let cfg = SynthConfig::new(Scheme::AccumPrevSuper, Naming::MirOver, 2, 2);
        let p = synthesize(&cfg);
        let mut seen = HashSet::new();
        for seed in 0..60 {
            let m = mutate(&p, seed);
            seen.insert(m.fault);
            assert_eq!(
                check_contextual(&m.program).is_accept(),
                m.expect_accept,
                "{:?} seed {seed}",
                m.fault
            );
        }
        assert_eq!(seen.len(), Fault::ALL.len());
    }

    #[test]
    fn deleting_list_size_rejects() {
        let src = "
            class Nat extends Object { Nat() { super(); } }
            class List extends Object { List() { super(); } Nat size() { return new Nat(); } }
            class User extends Object { User() { super(); } Nat go() { return new List().size(); } }
        ";
        let p = crate::syntax::parse_program(src).unwrap();
        let classes: Vec<ClassDecl> = p.classes().into_iter().cloned().collect();
        let ct = ClassTable::from_decls(&classes).unwrap();
        let called = called_methods(&classes, &ct);
        assert!(called.contains(&(Name::new("List"), Name::new("size"))));
    }
}
