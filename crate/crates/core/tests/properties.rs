//! Property tests for the structural and algebraic invariants of every
//! module, each against an independent oracle.

use std::collections::{BTreeSet, HashSet};

use cocofj::cocontextual::{check_node, close_expr};
use cocofj::synth::synthesize_classes;
use cocofj::*;
use proptest::prelude::*;
use proptest::sample::{select, Index};

const TUNINGS: [Tuning; 4] = [
    Tuning {
        normalize: true,
        in_depth_merge: true,
    },
    Tuning {
        normalize: true,
        in_depth_merge: false,
    },
    Tuning {
        normalize: false,
        in_depth_merge: true,
    },
    Tuning {
        normalize: false,
        in_depth_merge: false,
    },
];

fn u(i: u32) -> TypeRef {
    TypeRef::Var(ClassVar(i))
}

// ---------------------------------------------------------------------------
// Generators

fn arb_expr() -> impl Strategy<Value = Expr> {
    let class = select(vec!["Object", "C0", "C1", "C2"]);
    let leaf = prop_oneof![
        select(vec!["a", "b", "x"]).prop_map(Expr::var),
        Just(Expr::this()),
        class.clone().prop_map(|c| Expr::new_obj(c, vec![])),
    ];
    leaf.prop_recursive(4, 24, 3, move |inner| {
        prop_oneof![
            (inner.clone(), select(vec!["f", "g"])).prop_map(|(e, f)| e.field(f)),
            (
                inner.clone(),
                select(vec!["m", "n"]),
                prop::collection::vec(inner.clone(), 0..3)
            )
                .prop_map(|(e, m, args)| e.call(m, args)),
            (class.clone(), prop::collection::vec(inner.clone(), 0..3)).prop_map(|(c, args)| Expr::new_obj(c, args)),
            (0..3u8, class.clone(), inner).prop_map(|(k, c, e)| match k {
                0 => Expr::ucast(c, e),
                1 => Expr::dcast(c, e),
                _ => Expr::scast(c, e),
            }),
        ]
    })
}

/// One class: superclass choice among earlier classes, own field count, and
/// methods as (name index, parameter type indices, return type index, body).
type ClassSpec = (Index, usize, Vec<(usize, Vec<usize>, usize, Expr)>);

fn arb_specs() -> impl Strategy<Value = Vec<ClassSpec>> {
    let method = (0..3usize, prop::collection::vec(0..8usize, 0..3), 0..8usize, arb_expr());
    prop::collection::vec((any::<Index>(), 0..3usize, prop::collection::vec(method, 0..3)), 1..7)
}

/// Builds an acyclic table with globally unique field names and canonical
/// constructors, in declaration order.
fn build_table(specs: &[ClassSpec]) -> Vec<ClassDecl> {
    let n = specs.len();
    let ty = |i: usize| {
        if i.is_multiple_of(n + 1) {
            "Object".to_string()
        } else {
            format!("C{}", i % (n + 1) - 1)
        }
    };
    let mut decls: Vec<ClassDecl> = Vec::new();
    let mut all_fields: Vec<Vec<Param>> = Vec::new();
    for (i, (sup, nfields, methods)) in specs.iter().enumerate() {
        let s = sup.index(i + 1);
        let (superclass, inherited) = if s == 0 {
            ("Object".to_string(), Vec::new())
        } else {
            (format!("C{}", s - 1), all_fields[s - 1].clone())
        };
        let own: Vec<Param> = (0..*nfields)
            .map(|j| Param::new(&ty(i + j), &format!("f{i}_{j}")))
            .collect();
        let mut seen = HashSet::new();
        let methods: Vec<MethodDecl> = methods
            .iter()
            .filter(|(m, ..)| seen.insert(*m))
            .map(|(m, params, ret, body)| MethodDecl {
                ret: Name::new(&ty(*ret)),
                name: Name::new(&format!("m{m}")),
                params: params
                    .iter()
                    .enumerate()
                    .map(|(k, t)| Param::new(&ty(*t), &format!("p{k}")))
                    .collect(),
                body: body.clone(),
                span: Span::default(),
            })
            .collect();
        let mut fields = inherited.clone();
        fields.extend(own.iter().cloned());
        all_fields.push(fields);
        decls.push(ClassDecl::with_canonical_ctor(
            &format!("C{i}"),
            &superclass,
            inherited,
            own,
            methods,
        ));
    }
    decls
}

// ---------------------------------------------------------------------------
// Syntax

fn depth_ok(node: &ProgramNode, arity: usize, root: bool) -> bool {
    match node {
        ProgramNode::Leaf(_) => true,
        ProgramNode::Group(children) => {
            let width = children.len() <= arity && (root || children.len() >= 2);
            width && children.iter().all(|c| depth_ok(c, arity, false))
        }
    }
}

proptest! {
    #[test]
    fn expressions_round_trip(e in arb_expr()) {
        let text = render_expr(&e);
        prop_assert_eq!(parse_expr(&text).unwrap(), e, "{}", text);
    }

    #[test]
    fn programs_round_trip(specs in arb_specs(), arity in 2..5usize) {
        let program = balance(build_table(&specs), arity);
        let text = render(&program);
        let parsed = parse_program(&text).unwrap();
        prop_assert_eq!(parsed.classes(), program.classes());
        prop_assert_eq!(parse_classes(&text).unwrap().len(), specs.len());
    }

    #[test]
    fn balance_keeps_leaf_order(n in 0..40usize, arity in 2..6usize) {
        let decls: Vec<ClassDecl> = (0..n)
            .map(|i| ClassDecl::with_canonical_ctor(&format!("C{i}"), "Object", vec![], vec![], vec![]))
            .collect();
        let tree = balance(decls.clone(), arity);
        let leaves: Vec<ClassDecl> = tree.classes().into_iter().cloned().collect();
        prop_assert_eq!(leaves, decls);
        prop_assert!(depth_ok(&tree, arity, true));
    }

    #[test]
    fn node_keys_depend_only_on_structure(specs in arb_specs(), arity in 2..5usize) {
        let decls = build_table(&specs);
        let program = balance(decls.clone(), arity);
        let reparsed = balance(parse_classes(&render(&program)).unwrap(), arity);
        prop_assert_eq!(node_key(&program), node_key(&reparsed));
        prop_assert_eq!(node_key(&program), node_key(&balance(decls.clone(), arity)));
        let mut renamed = decls;
        renamed[0].name = Name::new("Renamed");
        prop_assert_ne!(node_key(&program), node_key(&balance(renamed, arity)));
    }
}

// ---------------------------------------------------------------------------
// Class table

/// Lookups by walking the declarations directly.
struct Walk<'a>(&'a [ClassDecl]);

impl Walk<'_> {
    fn decl(&self, c: &ClassName) -> Option<&ClassDecl> {
        self.0.iter().find(|d| d.name == *c)
    }

    fn chain(&self, c: &ClassName) -> Vec<&ClassDecl> {
        let mut out = Vec::new();
        let mut cur = self.decl(c);
        while let Some(d) = cur {
            out.push(d);
            cur = self.decl(&d.superclass);
        }
        out
    }

    fn subtype(&self, c: &ClassName, d: &ClassName) -> bool {
        c == d || d.is_object() || self.chain(c).iter().any(|x| x.superclass == *d)
    }

    fn fields(&self, c: &ClassName) -> Vec<ClassName> {
        let mut chain = self.chain(c);
        chain.reverse();
        chain
            .iter()
            .flat_map(|d| d.fields.iter().map(|f| f.ty.clone()))
            .collect()
    }

    fn field(&self, f: &Name, c: &ClassName) -> Option<ClassName> {
        self.chain(c)
            .iter()
            .find_map(|d| d.fields.iter().find(|p| p.name == *f).map(|p| p.ty.clone()))
    }

    fn mtype(&self, m: &Name, c: &ClassName) -> Option<MethodSig> {
        self.chain(c).iter().find_map(|d| {
            d.method(m.as_str()).map(|md| MethodSig {
                params: md.params.iter().map(|p| p.ty.clone()).collect(),
                ret: md.ret.clone(),
            })
        })
    }
}

proptest! {
    #[test]
    fn table_lookups_match_declaration_walk(specs in arb_specs()) {
        let decls = build_table(&specs);
        let ct = ClassTable::from_decls(&decls).unwrap();
        let walk = Walk(&decls);
        let mut names: Vec<ClassName> = decls.iter().map(|d| d.name.clone()).collect();
        names.push(Name::object());
        let members: Vec<Name> = (0..3).map(|m| Name::new(&format!("m{m}"))).collect();
        let fields: Vec<Name> = decls.iter().flat_map(|d| d.fields.iter().map(|f| f.name.clone())).collect();
        for c in &names {
            prop_assert_eq!(ct.fields_lookup(c).unwrap(), walk.fields(c));
            for m in &members {
                prop_assert_eq!(ct.mtype(m, c).cloned(), walk.mtype(m, c));
            }
            for f in &fields {
                prop_assert_eq!(ct.field_lookup(f, c).ok(), walk.field(f, c));
            }
            if let Some(d) = walk.decl(c) {
                prop_assert_eq!(ct.extends_lookup(c), Some(&d.superclass));
                let mut expected = ct.fields_lookup(&d.superclass).unwrap();
                expected.extend(d.fields.iter().map(|f| f.ty.clone()));
                prop_assert_eq!(ct.fields_lookup(c).unwrap(), expected);
                prop_assert_eq!(ct.ctor_lookup(c).unwrap(), &d.ctor.param_types()[..]);
            }
            for d in &names {
                prop_assert_eq!(ct.is_subtype(c, d), walk.subtype(c, d), "{} <: {}", c, d);
            }
        }
        for a in &names {
            prop_assert!(ct.is_subtype(a, a));
            for b in &names {
                if a != b && ct.is_subtype(a, b) {
                    prop_assert!(!ct.is_subtype(b, a));
                }
                for c in &names {
                    if ct.is_subtype(a, b) && ct.is_subtype(b, c) {
                        prop_assert!(ct.is_subtype(a, c));
                    }
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Conditions and substitutions

const DOMAIN: [&str; 4] = ["A", "B", "C", "X"];
const VARS: u32 = 4;

fn term(i: usize) -> TypeRef {
    match i {
        0..=3 => u(i as u32),
        _ => TypeRef::class(["A", "B", "C"][i - 4]),
    }
}

#[derive(Clone, Debug)]
enum Atom {
    Eq(TypeRef),
    Neq(TypeRef),
    In(BTreeSet<ClassName>),
}

fn arb_atom() -> impl Strategy<Value = Atom> {
    prop_oneof![
        (0..7usize).prop_map(|i| Atom::Eq(term(i))),
        (0..7usize).prop_map(|i| Atom::Neq(term(i))),
        (0..8u8).prop_map(|mask| Atom::In(
            (0..3)
                .filter(|b| mask & (1 << b) != 0)
                .map(|b| Name::new(DOMAIN[b]))
                .collect()
        )),
    ]
}

fn arb_condition() -> impl Strategy<Value = (TypeRef, Vec<Atom>)> {
    ((0..7usize).prop_map(term), prop::collection::vec(arb_atom(), 0..6))
}

fn build_condition(receiver: &TypeRef, atoms: &[Atom]) -> Condition {
    let mut c = Condition::irrefutable(receiver.clone());
    for a in atoms {
        match a {
            Atom::Eq(t) => c.add_eq(t),
            Atom::Neq(t) => c.add_neq(t),
            Atom::In(s) => c.add_alternatives(s),
        }
    }
    c
}

/// Every ground assignment of the variables over a domain with one class
/// no condition mentions.
fn assignments() -> Vec<[&'static str; VARS as usize]> {
    let mut out = Vec::new();
    for i in 0..DOMAIN.len().pow(VARS) {
        let mut rho = [""; VARS as usize];
        for (v, slot) in rho.iter_mut().enumerate() {
            *slot = DOMAIN[(i / DOMAIN.len().pow(v as u32)) % DOMAIN.len()];
        }
        out.push(rho);
    }
    out
}

fn val<'a>(t: &'a TypeRef, rho: &[&'a str]) -> &'a str {
    match t {
        TypeRef::Var(v) => rho[v.0 as usize],
        TypeRef::Class(c) => c.as_str(),
    }
}

fn atoms_hold(receiver: &TypeRef, atoms: &[Atom], rho: &[&str]) -> bool {
    let r = val(receiver, rho);
    atoms.iter().all(|a| match a {
        Atom::Eq(t) => r == val(t, rho),
        Atom::Neq(t) => r != val(t, rho),
        Atom::In(s) => s.is_empty() || s.iter().any(|c| c.as_str() == r),
    })
}

fn holds(c: &Condition, rho: &[&str]) -> bool {
    if c.is_unsat() {
        return false;
    }
    let r = val(c.receiver(), rho);
    c.not_ground().iter().all(|g| g.as_str() != r)
        && c.not_var().iter().all(|v| rho[v.0 as usize] != r)
        && c.same_var().iter().all(|v| rho[v.0 as usize] == r)
        && (c.alternatives().is_empty() || c.alternatives().iter().any(|a| a.as_str() == r))
}

fn arb_subst() -> impl Strategy<Value = Subst> {
    prop::collection::vec((0..VARS, 0..7usize), 0..4).prop_map(|pairs| {
        let mut s = Subst::new();
        for (v, t) in pairs {
            let _ = s.unify(&u(v), &term(t));
        }
        s
    })
}

/// Whether a ground assignment is an instance of the substitution.
fn extends(s: &Subst, rho: &[&str]) -> bool {
    (0..VARS).all(|v| val(&s.resolve(&u(v)), rho) == rho[v as usize])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normalization_preserves_meaning((receiver, atoms) in arb_condition()) {
        let c = build_condition(&receiver, &atoms);
        prop_assert!(c.check_normal().is_ok(), "{:?}", c.check_normal());
        let mut any = false;
        for rho in assignments() {
            let expected = atoms_hold(&receiver, &atoms, &rho);
            prop_assert_eq!(holds(&c, &rho), expected, "{} under {:?}", c, rho);
            any |= expected;
        }
        prop_assert_eq!(c.is_unsat(), !any, "{} pruned={}", c, c.is_unsat());
        if c.is_irrefutable() {
            prop_assert!(assignments().iter().all(|rho| holds(&c, rho)));
        }
    }

    #[test]
    fn eval_is_sound((receiver, atoms) in arb_condition(), s in arb_subst()) {
        let c = build_condition(&receiver, &atoms);
        let applied = c.apply(&s);
        prop_assert!(applied.check_normal().is_ok());
        let truth = c.eval(&s);
        for rho in assignments().into_iter().filter(|rho| extends(&s, rho)) {
            let h = holds(&c, &rho);
            prop_assert_eq!(holds(&applied, &rho), h);
            match truth {
                Truth::Holds => prop_assert!(h, "{} holds under {:?} but not at {:?}", c, s, rho),
                Truth::Fails => prop_assert!(!h, "{} fails under {:?} but holds at {:?}", c, s, rho),
                Truth::Undecided => {}
            }
        }
    }

    #[test]
    fn combinators_match_semantics(
        (ra, aa) in arb_condition(),
        (rb, ab) in arb_condition(),
        t in (0..7usize).prop_map(term),
    ) {
        let a = build_condition(&ra, &aa);
        let b = build_condition(&rb, &ab).rebase(ra.clone());
        let conj = a.conjoin(&b);
        let resolved = a.resolve(&b);
        let rebased = a.rebase(t.clone());
        let mut union = a.clone();
        let mergeable = a.eq_up_to_alternatives(&b);
        if mergeable {
            union.union_alternatives(&b);
        }
        for rho in assignments() {
            let (x, y) = (holds(&a, &rho), holds(&b, &rho));
            if let Some(c) = &conj {
                prop_assert_eq!(holds(c, &rho), x && y, "{} and {} gave {}", a, b, c);
            }
            if let Some(c) = &resolved {
                prop_assert_eq!(holds(c, &rho), x || y, "{} or {} gave {}", a, b, c);
            }
            if mergeable {
                prop_assert_eq!(holds(&union, &rho), x || y);
            }
            let same = val(&t, &rho) == val(&ra, &rho);
            prop_assert_eq!(holds(&rebased, &rho), same && x);
        }
    }

    #[test]
    fn unification_is_sound(pairs in prop::collection::vec((0..7usize, 0..7usize), 0..6)) {
        let mut s = Subst::new();
        let ok = pairs.iter().all(|(a, b)| s.unify(&term(*a), &term(*b)).is_ok());
        let solutions = assignments()
            .into_iter()
            .filter(|rho| pairs.iter().all(|(a, b)| val(&term(*a), rho) == val(&term(*b), rho)))
            .count();
        prop_assert_eq!(ok, solutions > 0);
        if ok {
            for (a, b) in &pairs {
                prop_assert_eq!(s.resolve(&term(*a)), s.resolve(&term(*b)));
            }
            // The unifier is most general: every solution is an instance.
            for rho in assignments() {
                let solves = pairs.iter().all(|(a, b)| val(&term(*a), &rho) == val(&term(*b), &rho));
                prop_assert_eq!(solves, extends(&s, &rho));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Solver confluence

fn arb_constraint() -> impl Strategy<Value = Constraint> {
    let t = (0..7usize).prop_map(term);
    prop_oneof![
        (t.clone(), t.clone()).prop_map(|(a, b)| Constraint::Eq(a, b)),
        (t.clone(), t.clone()).prop_map(|(a, b)| Constraint::Neq(a, b)),
        (t.clone(), t, arb_condition()).prop_map(|(a, b, (r, atoms))| Constraint::guarded(
            a,
            b,
            &build_condition(&r, &atoms)
        )),
    ]
}

fn solve_in_order(cs: &[Constraint]) -> (bool, Vec<TypeRef>) {
    let mut solver = Solver::new();
    solver.solve(cs.iter().map(|c| (c.clone(), Origin::new(Rule::Program))));
    // A failed run has no defined substitution.
    match solver.finalize() {
        Ok(()) => (true, (0..VARS).map(|v| solver.resolve(&u(v))).collect()),
        Err(_) => (false, Vec::new()),
    }
}

fn permutations<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first.clone());
            out.push(p);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn solver_is_order_independent(cs in prop::collection::vec(arb_constraint(), 1..6)) {
        let first = solve_in_order(&cs);
        for p in permutations(&cs) {
            prop_assert_eq!(solve_in_order(&p), first.clone());
        }
    }
}

// ---------------------------------------------------------------------------
// Requirements

const REQ_TABLE: &str = "
    class A extends Object { Object f; A(Object f) { super(); this.f = f; } A m(A a) { return a; } }
    class B extends A { B(Object f) { super(f); } A m(A a) { return this; } Object n() { return this; } }
";

fn arb_req(terms: Vec<TypeRef>) -> impl Strategy<Value = ClassReq> {
    let t = select(terms);
    (0..5u8, t.clone(), t.clone(), t, select(vec!["m", "n", "k"]), 0..2usize).prop_map(
        |(kind, recv, a, b, m, arity)| {
            let params = vec![a.clone(); arity];
            match kind {
                0 => ClassReq::extends(recv, a),
                1 => ClassReq::ctor(recv, params),
                2 => ClassReq::field(recv, Name::new(if m == "k" { "g" } else { "f" }), a),
                3 => ClassReq::method(recv, Name::new(m), params, b),
                _ => ClassReq::opt_method(recv, Name::new(m), params, b),
            }
        },
    )
}

fn reqs(entries: &[ClassReq]) -> ClassReqs {
    ClassReqs::from_entries(
        entries
            .iter()
            .map(|r| ReqEntry::new(r.clone(), Origin::new(Rule::Program))),
    )
}

/// Closes requirements against the fixed table: the verdict and the final
/// ground type of each variable.
fn close(cr: ClassReqs, emitted: Vec<(Constraint, Origin)>, tuning: Tuning) -> (bool, Vec<TypeRef>) {
    let facts = ClassFacts::from_classes(&parse_classes(REQ_TABLE).unwrap());
    let mut solver = Solver::with_sigma(facts.sigma());
    solver.solve(emitted);
    let first = solver.subst().clone();
    let res = CoResult {
        ty: TypeRef::class("Object"),
        cr: cr.apply(&first),
        solver,
        r: ContextReqs::new(),
    };
    match close_expr(&res, &TypingContext::new(), &facts, tuning) {
        Ok(last) => (true, (0..VARS).map(|v| last.resolve(&first.resolve(&u(v)))).collect()),
        Err(_) => (false, Vec::new()),
    }
}

fn var_terms() -> Vec<TypeRef> {
    vec![
        u(0),
        u(1),
        u(2),
        TypeRef::class("A"),
        TypeRef::class("B"),
        TypeRef::class("Object"),
    ]
}

fn ground_terms() -> Vec<TypeRef> {
    vec![TypeRef::class("A"), TypeRef::class("B"), TypeRef::class("Object")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn merge_is_commutative(
        a in prop::collection::vec(arb_req(var_terms()), 0..4),
        b in prop::collection::vec(arb_req(var_terms()), 0..4),
    ) {
        for tuning in TUNINGS {
            let (ab, eab) = merge_cr([reqs(&a), reqs(&b)], &tuning);
            let (ba, eba) = merge_cr([reqs(&b), reqs(&a)], &tuning);
            prop_assert_eq!(close(ab, eab, tuning), close(ba, eba, tuning), "{:?}", tuning);
        }
    }

    #[test]
    fn removal_matches_satisfaction(entries in prop::collection::vec(arb_req(ground_terms()), 0..5)) {
        let decls = parse_classes(REQ_TABLE).unwrap();
        let ct = ClassTable::from_decls(&decls).unwrap();
        let cr = reqs(&entries);
        let satisfied = satisfies(&ct, &Subst::new(), &cr).unwrap();
        for tuning in TUNINGS {
            let (closed, _) = close(cr.clone(), Vec::new(), tuning);
            prop_assert_eq!(closed, satisfied, "{}", cr.dump());
        }
    }
}

// ---------------------------------------------------------------------------
// Freshness

fn vars_of(r: &NodeResult) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    for e in &r.entries {
        out.extend(e.req.recv.as_var().map(|v| v.0));
        out.extend(e.req.types.iter().filter_map(TypeRef::as_var).map(|v| v.0));
        out.extend(e.cond.vars().map(|v| v.0));
    }
    for (c, _) in &r.deferred {
        out.extend(c.vars().iter().map(|v| v.0));
    }
    for p in &r.pins {
        out.extend(
            [&p.this_ty, &p.super_ty, &p.body_ty]
                .into_iter()
                .filter_map(TypeRef::as_var)
                .map(|v| v.0),
        );
    }
    out
}

fn arb_config() -> impl Strategy<Value = SynthConfig> {
    (
        select(Scheme::ALL.to_vec()),
        select(Naming::ALL.to_vec()),
        1..4usize,
        1..4usize,
    )
        .prop_map(|(s, n, k, h)| SynthConfig::new(s, n, k, h))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sibling_results_share_no_variables(cfg in arb_config(), arity in 2..5usize, fault in 0..64u64) {
        let program = mutate(&balance(synthesize_classes(&cfg), arity), fault).program;
        let ProgramNode::Group(children) = &program else { unreachable!("root is a group") };
        let mut vars = VarGen::new();
        let mut seen: BTreeSet<u32> = BTreeSet::new();
        for child in children {
            let r = check_node(child, &mut vars, Tuning::default());
            let own = vars_of(&r);
            prop_assert!(own.is_disjoint(&seen), "shared {:?}", own.intersection(&seen).collect::<Vec<_>>());
            if let ProgramNode::Leaf(_) = child {
                prop_assert!(own.iter().all(|v| (r.fresh.0..r.fresh.1).contains(v)));
            }
            seen.extend(own);
        }
    }

    #[test]
    fn optimizations_keep_pins(cfg in arb_config(), arity in 2..5usize) {
        let program = balance(synthesize_classes(&cfg), arity);
        let pins = |t: Tuning| check_cocontextual(&program, t);
        let base = pins(TUNINGS[0]);
        prop_assert!(base.verdict.is_accept());
        for t in &TUNINGS[1..] {
            let other = pins(*t);
            prop_assert_eq!(&other.verdict, &base.verdict);
            prop_assert_eq!(&other.pins, &base.pins);
        }
    }
}
