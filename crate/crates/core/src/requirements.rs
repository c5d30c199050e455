//! Context requirements and class-table requirements with their merge and
//! remove operations.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::class_table::{join, ClassTable};
use crate::constraints::{Condition, Constraint, Subst, Truth};
use crate::error::{Origin, Rule};
use crate::facts::ClassInfo;
use crate::syntax::{ClassName, Name, TypeRef};

/// Constraints paired with the place that produced them.
pub type Emitted = Vec<(Constraint, Origin)>;

/// Switches for the two requirement optimizations. In-depth merging is only
/// active together with normalization.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Tuning {
    /// Prune entries with unsatisfiable conditions as soon as they arise and
    /// emit plain equations for irrefutable guards.
    pub normalize: bool,
    /// Collapse entries on the same receiver with equal conditions.
    pub in_depth_merge: bool,
}

impl Default for Tuning {
    fn default() -> Self {
        Tuning {
            normalize: true,
            in_depth_merge: true,
        }
    }
}

impl Tuning {
    pub fn merges(&self) -> bool {
        self.normalize && self.in_depth_merge
    }

    fn guarded(&self, lhs: TypeRef, rhs: TypeRef, guard: &Condition) -> Constraint {
        if self.normalize {
            Constraint::guarded(lhs, rhs, guard)
        } else {
            Constraint::CondEq(lhs, rhs, guard.clone())
        }
    }

    pub(crate) fn keep(&self, e: &ReqEntry) -> bool {
        !(self.normalize && e.cond.is_unsat())
    }
}

/// Required variable types, keyed by variable name or `this`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContextReqs {
    map: BTreeMap<Name, TypeRef>,
}

impl ContextReqs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(name: Name, ty: TypeRef) -> Self {
        ContextReqs {
            map: BTreeMap::from([(name, ty)]),
        }
    }

    pub fn get(&self, name: &Name) -> Option<&TypeRef> {
        self.map.get(name)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Name, &TypeRef)> {
        self.map.iter()
    }

    pub fn apply(&self, s: &Subst) -> ContextReqs {
        ContextReqs {
            map: self.map.iter().map(|(k, v)| (k.clone(), s.resolve(v))).collect(),
        }
    }
}

/// Union of context requirements; a name required twice yields an equation
/// between its two types.
pub fn merge_r(parts: impl IntoIterator<Item = ContextReqs>) -> (ContextReqs, Emitted) {
    let mut out = ContextReqs::new();
    let mut emitted = Emitted::new();
    for part in parts {
        for (name, ty) in part.map {
            match out.map.get(&name) {
                Some(existing) => {
                    emitted.push((Constraint::Eq(existing.clone(), ty), Origin::new(Rule::Var)));
                }
                None => {
                    out.map.insert(name, ty);
                }
            }
        }
    }
    (out, emitted)
}

/// Discharges the requirement on `name` against its declared type.
pub fn remove_var_req(r: &ContextReqs, name: &Name, declared: TypeRef) -> (ContextReqs, Option<Constraint>) {
    let mut out = r.clone();
    match out.map.remove(name) {
        Some(t) => (out, Some(Constraint::Eq(declared, t))),
        None => (out, None),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ReqKind {
    Extends,
    Ctor,
    Field,
    Method,
    OptMethod,
}

impl ReqKind {
    /// Whether a subclass inherits the member from its superclass.
    pub fn inherited(self) -> bool {
        matches!(self, ReqKind::Field | ReqKind::Method | ReqKind::OptMethod)
    }
}

/// A demanded class-table clause. `types` holds method parameters then the
/// return type, constructor parameters, the field type, or the superclass.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClassReq {
    pub kind: ReqKind,
    pub recv: TypeRef,
    pub member: Option<Name>,
    pub types: Vec<TypeRef>,
}

impl ClassReq {
    pub fn extends(recv: TypeRef, sup: TypeRef) -> Self {
        ClassReq {
            kind: ReqKind::Extends,
            recv,
            member: None,
            types: vec![sup],
        }
    }

    pub fn ctor(recv: TypeRef, params: Vec<TypeRef>) -> Self {
        ClassReq {
            kind: ReqKind::Ctor,
            recv,
            member: None,
            types: params,
        }
    }

    pub fn field(recv: TypeRef, field: Name, ty: TypeRef) -> Self {
        ClassReq {
            kind: ReqKind::Field,
            recv,
            member: Some(field),
            types: vec![ty],
        }
    }

    pub fn method(recv: TypeRef, method: Name, params: Vec<TypeRef>, ret: TypeRef) -> Self {
        let mut types = params;
        types.push(ret);
        ClassReq {
            kind: ReqKind::Method,
            recv,
            member: Some(method),
            types,
        }
    }

    pub fn opt_method(recv: TypeRef, method: Name, params: Vec<TypeRef>, ret: TypeRef) -> Self {
        ClassReq {
            kind: ReqKind::OptMethod,
            ..ClassReq::method(recv, method, params, ret)
        }
    }

    pub fn key(&self) -> ReqKey {
        ReqKey {
            kind: self.kind,
            member: self.member.clone(),
        }
    }

    pub fn apply(&self, s: &Subst) -> ClassReq {
        ClassReq {
            kind: self.kind,
            recv: s.resolve(&self.recv),
            member: self.member.clone(),
            types: self.types.iter().map(|t| s.resolve(t)).collect(),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.recv.is_ground() && self.types.iter().all(TypeRef::is_ground)
    }
}

impl fmt::Display for ClassReq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let r = &self.recv;
        let member = self.member.as_ref().map(Name::as_str).unwrap_or("");
        match self.kind {
            ReqKind::Extends => write!(f, "{r} extends {}", self.types[0]),
            ReqKind::Ctor => write!(f, "{r}.init({})", join(&self.types)),
            ReqKind::Field => write!(f, "{r}.{member} : {}", self.types[0]),
            ReqKind::Method | ReqKind::OptMethod => {
                let (ret, params) = self.types.split_last().expect("method has a return type");
                write!(f, "{r}.{member} : ({}) -> {ret}", join(params))?;
                if self.kind == ReqKind::OptMethod {
                    f.write_str(" opt")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for ClassReq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReqKey {
    pub kind: ReqKind,
    pub member: Option<Name>,
}

/// A requirement with the condition under which it is live.
///
/// For a variable receiver the condition is stated over that receiver (or
/// is irrefutable). A ground receiver may carry a condition over another
/// type: the entry then stands for the inherited copy of a requirement on
/// that type.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ReqEntry {
    pub req: ClassReq,
    pub cond: Condition,
    pub origin: Origin,
}

impl ReqEntry {
    pub fn new(req: ClassReq, origin: Origin) -> Self {
        let cond = Condition::irrefutable(req.recv.clone());
        ReqEntry { req, cond, origin }
    }

    pub fn with_cond(mut self, cond: Condition) -> Self {
        self.cond = cond;
        self
    }

    pub fn apply(&self, s: &Subst) -> ReqEntry {
        ReqEntry {
            req: self.req.apply(s),
            cond: self.cond.apply(s),
            origin: self.origin.clone(),
        }
    }

    /// The condition stated over the requirement's own receiver when that is
    /// expressible.
    fn own_cond(&self) -> Option<Condition> {
        if self.cond.receiver() == &self.req.recv {
            Some(self.cond.clone())
        } else if self.cond.is_irrefutable() {
            Some(Condition::irrefutable(self.req.recv.clone()))
        } else if self.cond.is_unsat() {
            Some(Condition::unsatisfiable(self.req.recv.clone()))
        } else {
            None
        }
    }

    /// Liveness of the entry under `s`.
    pub fn eval(&self, s: &Subst) -> Truth {
        self.cond.eval(s)
    }
}

impl fmt::Display for ReqEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.req, self.cond)
    }
}

impl fmt::Debug for ReqEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Class-table requirements grouped by member kind and name.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReqs {
    groups: BTreeMap<ReqKey, Vec<ReqEntry>>,
}

impl ClassReqs {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn single(entry: ReqEntry) -> Self {
        let mut out = ClassReqs::new();
        out.insert(entry);
        out
    }

    pub fn from_entries(entries: impl IntoIterator<Item = ReqEntry>) -> Self {
        let mut out = ClassReqs::new();
        for e in entries {
            out.insert(e);
        }
        out
    }

    pub fn insert(&mut self, entry: ReqEntry) {
        self.groups.entry(entry.req.key()).or_default().push(entry);
    }

    pub fn len(&self) -> usize {
        self.groups.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.values().all(Vec::is_empty)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ReqEntry> {
        self.groups.values().flatten()
    }

    pub fn into_entries(self) -> Vec<ReqEntry> {
        self.groups.into_values().flatten().collect()
    }

    pub fn apply(&self, s: &Subst) -> ClassReqs {
        ClassReqs::from_entries(self.iter().map(|e| e.apply(s)))
    }

    /// One `(requirement, condition)` pair per line, sorted.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.iter().map(ToString::to_string).collect();
        lines.sort();
        lines.into_iter().map(|l| l + "\n").collect()
    }
}

/// Conjunction of two entries' conditions with `recv1 = recv2`, when it can
/// be stated over one receiver.
fn pair_guard(e1: &ReqEntry, e2: &ReqEntry) -> Option<Condition> {
    let (a, b) = if e1.req.recv.is_ground() { (e2, e1) } else { (e1, e2) };
    let ca = a.own_cond()?;
    let cb = b.own_cond()?;
    ca.with_eq(&b.req.recv).conjoin(&cb)
}

fn emit_pairs(
    types1: &[TypeRef],
    types2: &[TypeRef],
    guard: &Condition,
    origin: &Origin,
    tuning: &Tuning,
    out: &mut Emitted,
) {
    for (t1, t2) in types1.iter().zip(types2) {
        if t1 != t2 {
            out.push((tuning.guarded(t1.clone(), t2.clone(), guard), origin.clone()));
        }
    }
}

/// Relates the same-named requirements of two sets. Entries are kept;
/// whenever two receivers might denote the same class, their member types
/// are equated under that condition. Two irrefutable entries on distinct
/// variable receivers are split three ways: each keeps the case where the
/// receivers differ, and a combined copy covers the case where they agree.
fn relate(left: &mut Vec<ReqEntry>, right: &mut [ReqEntry], tuning: &Tuning, emitted: &mut Emitted) {
    if left.first().is_some_and(|e| e.req.kind == ReqKind::OptMethod) {
        return;
    }
    let left_vars: Vec<usize> = (0..left.len()).filter(|&i| !left[i].req.recv.is_ground()).collect();
    let right_vars: Vec<usize> = (0..right.len()).filter(|&j| !right[j].req.recv.is_ground()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for &i in &left_vars {
        pairs.extend((0..right.len()).map(|j| (i, j)));
    }
    for &j in &right_vars {
        pairs.extend(
            (0..left.len())
                .filter(|i| left[*i].req.recv.is_ground())
                .map(|i| (i, j)),
        );
    }
    let mut combined = Vec::new();
    for (i, j) in pairs {
        let (e1, e2) = (&left[i], &right[j]);
        if e1.req.types.len() != e2.req.types.len() {
            continue;
        }
        let (r1, r2) = (e1.req.recv.clone(), e2.req.recv.clone());
        let split = tuning.normalize
            && r1 != r2
            && !r1.is_ground()
            && !r2.is_ground()
            && e1.cond.is_irrefutable()
            && e2.cond.is_irrefutable();
        if split {
            let same = Condition::irrefutable(r1.clone()).with_eq(&r2);
            emit_pairs(&e1.req.types, &e2.req.types, &same, &e2.origin, tuning, emitted);
            combined.push(e1.clone().with_cond(same));
            left[i].cond = Condition::irrefutable(r1.clone()).with_neq(&r2);
            right[j].cond = Condition::irrefutable(r2).with_neq(&r1);
        } else if let Some(guard) = pair_guard(e1, e2) {
            if !guard.is_unsat() {
                emit_pairs(&e1.req.types, &e2.req.types, &guard, &e2.origin, tuning, emitted);
            }
        }
    }
    left.extend(combined);
}

/// Merges class-table requirement sets.
pub fn merge_cr(parts: impl IntoIterator<Item = ClassReqs>, tuning: &Tuning) -> (ClassReqs, Emitted) {
    let mut out = ClassReqs::new();
    let mut emitted = Emitted::new();
    for part in parts {
        for (key, mut entries) in part.groups {
            match out.groups.get_mut(&key) {
                None => {
                    out.groups.insert(key, entries);
                }
                Some(existing) => {
                    relate(existing, &mut entries, tuning, &mut emitted);
                    existing.extend(entries);
                }
            }
        }
    }
    (out, emitted)
}

/// Result of checking one entry against one declaration.
#[derive(Debug, Default)]
pub struct Discharge {
    /// Refined remainder and inherited copies.
    pub kept: Vec<ReqEntry>,
    pub emitted: Emitted,
    /// Whether the declaration was relevant to the entry.
    pub touched: bool,
}

impl Discharge {
    fn untouched(e: ReqEntry) -> Self {
        Discharge {
            kept: vec![e],
            emitted: Emitted::new(),
            touched: false,
        }
    }
}

/// The condition under which `entry` refers to `class`, or `None` when it
/// cannot.
fn guard_for(entry: &ReqEntry, class: &ClassName) -> Option<Condition> {
    match &entry.req.recv {
        TypeRef::Class(c) => (c == class && !entry.cond.is_unsat()).then(|| entry.cond.clone()),
        TypeRef::Var(_) => {
            let g = entry.own_cond()?.with_eq(&TypeRef::Class(class.clone()));
            (!g.is_unsat()).then_some(g)
        }
    }
}

/// Matches `entry` against the member types `declared` in `class`: the types
/// are equated under the entry's condition restricted to the receiver being
/// `class`, and the entry survives only for other receivers. A length
/// mismatch emits a guarded equation between two distinct classes, which
/// fails exactly when the guard holds.
pub fn discharge(entry: ReqEntry, class: &ClassName, declared: &[ClassName], tuning: &Tuning) -> Discharge {
    let Some(guard) = guard_for(&entry, class) else {
        return Discharge::untouched(entry);
    };
    let mut emitted = Emitted::new();
    if entry.req.types.len() == declared.len() {
        for (t, d) in entry.req.types.iter().zip(declared) {
            let d = TypeRef::Class(d.clone());
            if *t != d {
                emitted.push((tuning.guarded(t.clone(), d, &guard), entry.origin.clone()));
            }
        }
    } else {
        let marker = if class.is_object() {
            TypeRef::class("<arity>")
        } else {
            TypeRef::class(crate::syntax::OBJECT)
        };
        emitted.push((
            tuning.guarded(TypeRef::Class(class.clone()), marker, &guard),
            entry.origin.clone(),
        ));
    }
    let mut kept = Vec::new();
    if !entry.req.recv.is_ground() {
        let own = entry.own_cond().expect("guard_for succeeded");
        let rest = ReqEntry {
            cond: own.with_neq(&TypeRef::Class(class.clone())),
            ..entry
        };
        if tuning.keep(&rest) {
            kept.push(rest);
        }
    }
    Discharge {
        kept,
        emitted,
        touched: true,
    }
}

/// Splits an inherited-member entry at `class extends superclass`: the
/// original survives for receivers other than `class`, and a copy targets
/// `superclass` for the receiver being `class`.
pub fn inherit(entry: ReqEntry, class: &ClassName, superclass: &ClassName, tuning: &Tuning) -> Discharge {
    if !entry.req.kind.inherited() {
        return Discharge::untouched(entry);
    }
    let Some(guard) = guard_for(&entry, class) else {
        return Discharge::untouched(entry);
    };
    let sup = TypeRef::Class(superclass.clone());
    let mut kept = Vec::new();
    match &entry.req.recv {
        TypeRef::Class(_) => {
            let mut e = entry;
            e.req.recv = sup;
            kept.push(e);
        }
        TypeRef::Var(_) => {
            let copy = ReqEntry {
                req: ClassReq {
                    recv: sup,
                    ..entry.req.clone()
                },
                cond: guard,
                origin: entry.origin.clone(),
            };
            let own = entry.own_cond().expect("guard_for succeeded");
            let rest = ReqEntry {
                cond: own.with_neq(&TypeRef::Class(class.clone())),
                ..entry
            };
            for e in [rest, copy] {
                if tuning.keep(&e) {
                    kept.push(e);
                }
            }
        }
    }
    Discharge {
        kept,
        emitted: Emitted::new(),
        touched: true,
    }
}

fn remove_where(
    cr: ClassReqs,
    applies: impl Fn(&ReqEntry) -> bool,
    step: impl Fn(ReqEntry) -> Discharge,
) -> (ClassReqs, Emitted) {
    let mut out = ClassReqs::new();
    let mut emitted = Emitted::new();
    for e in cr.into_entries() {
        if applies(&e) {
            let d = step(e);
            for k in d.kept {
                out.insert(k);
            }
            emitted.extend(d.emitted);
        } else {
            out.insert(e);
        }
    }
    (out, emitted)
}

/// Checks one entry against one declaration: its own member first, then the
/// superclass edge. `Object` drops optional entries aimed at it.
pub fn against_decl(entry: ReqEntry, info: &ClassInfo, tuning: &Tuning) -> Discharge {
    let kind = entry.req.kind;
    match kind {
        ReqKind::Extends => match &info.superclass {
            Some(sup) => discharge(entry, &info.name, std::slice::from_ref(sup), tuning),
            None => Discharge::untouched(entry),
        },
        ReqKind::Ctor => discharge(entry, &info.name, &info.ctor, tuning),
        ReqKind::Field | ReqKind::Method | ReqKind::OptMethod => {
            let mut first = match info.declared(kind, entry.req.member.as_ref()) {
                Some(types) => discharge(entry, &info.name, &types, tuning),
                None => Discharge::untouched(entry),
            };
            let mut kept = Vec::new();
            for e in std::mem::take(&mut first.kept) {
                match &info.superclass {
                    Some(sup) => {
                        let d = inherit(e, &info.name, sup, tuning);
                        first.touched |= d.touched;
                        kept.extend(d.kept);
                    }
                    None => {
                        if kind == ReqKind::OptMethod && e.req.recv.as_class() == Some(&info.name) {
                            first.touched = true;
                        } else {
                            kept.push(e);
                        }
                    }
                }
            }
            first.kept = kept;
            first
        }
    }
}

/// Discharges method and optional-method requirements against the methods
/// declared in `info`.
pub fn remove_methods(info: &ClassInfo, cr: ClassReqs, tuning: &Tuning) -> (ClassReqs, Emitted) {
    remove_where(
        cr,
        |e| {
            matches!(e.req.kind, ReqKind::Method | ReqKind::OptMethod)
                && e.req.member.as_ref().is_some_and(|m| info.methods.contains_key(m))
        },
        |e| {
            let declared = info.declared(e.req.kind, e.req.member.as_ref()).expect("declared");
            discharge(e, &info.name, &declared, tuning)
        },
    )
}

/// Discharges field requirements against the fields declared in `info`.
pub fn remove_fields(info: &ClassInfo, cr: ClassReqs, tuning: &Tuning) -> (ClassReqs, Emitted) {
    remove_where(
        cr,
        |e| e.req.kind == ReqKind::Field && e.req.member.as_ref().is_some_and(|f| info.field(f).is_some()),
        |e| {
            let declared = info.declared(e.req.kind, e.req.member.as_ref()).expect("declared");
            discharge(e, &info.name, &declared, tuning)
        },
    )
}

/// Discharges constructor requirements against the constructor of `info`.
pub fn remove_ctor(info: &ClassInfo, cr: ClassReqs, tuning: &Tuning) -> (ClassReqs, Emitted) {
    remove_where(
        cr,
        |e| e.req.kind == ReqKind::Ctor,
        |e| discharge(e, &info.name, &info.ctor, tuning),
    )
}

/// Discharges extends requirements and splits inherited-member requirements
/// at the superclass edge of `info`. Optional requirements reaching
/// `Object` are dropped.
pub fn remove_ext(info: &ClassInfo, cr: ClassReqs, tuning: &Tuning) -> (ClassReqs, Emitted) {
    match &info.superclass {
        Some(sup) => remove_where(
            cr,
            |e| e.req.kind == ReqKind::Extends || e.req.kind.inherited(),
            |e| {
                if e.req.kind == ReqKind::Extends {
                    discharge(e, &info.name, std::slice::from_ref(sup), tuning)
                } else {
                    inherit(e, &info.name, sup, tuning)
                }
            },
        ),
        None => {
            let mut out = ClassReqs::new();
            for e in cr.into_entries() {
                let dropped = e.req.kind == ReqKind::OptMethod && e.req.recv.as_class() == Some(&info.name);
                if !dropped {
                    out.insert(e);
                }
            }
            (out, Emitted::new())
        }
    }
}

/// All four removals for one declaration, in member, field, constructor,
/// extends order.
pub fn remove_decl(info: &ClassInfo, cr: ClassReqs, tuning: &Tuning) -> (ClassReqs, Emitted) {
    let (cr, mut s) = remove_methods(info, cr, tuning);
    let (cr, s2) = remove_fields(info, cr, tuning);
    let (cr, s3) = remove_ctor(info, cr, tuning);
    let (cr, s4) = remove_ext(info, cr, tuning);
    s.extend(s2);
    s.extend(s3);
    s.extend(s4);
    (cr, s)
}

fn core_order(a: &ReqEntry, b: &ReqEntry) -> Ordering {
    a.req
        .kind
        .cmp(&b.req.kind)
        .then_with(|| a.req.member.cmp(&b.req.member))
        .then_with(|| a.req.recv.cmp(&b.req.recv))
        .then_with(|| a.cond.receiver().cmp(b.cond.receiver()))
        .then_with(|| a.cond.is_unsat().cmp(&b.cond.is_unsat()))
        .then_with(|| a.cond.not_ground().cmp(b.cond.not_ground()))
        .then_with(|| a.cond.not_var().cmp(b.cond.not_var()))
        .then_with(|| a.cond.same_var().cmp(b.cond.same_var()))
}

/// Collapses entries on the same member and receiver whose conditions agree
/// up to alternatives. Member types are equated unconditionally, since both
/// denote the same member of the same class. Optional entries collapse only
/// when their types already coincide; entries of different arity never do.
pub fn in_depth_merge(mut entries: Vec<ReqEntry>) -> (Vec<ReqEntry>, Emitted) {
    entries.sort_by(core_order);
    let mut out: Vec<ReqEntry> = Vec::with_capacity(entries.len());
    let mut emitted = Emitted::new();
    let mut group_start = 0;
    for e in entries {
        if out.len() > group_start && core_order(&out[group_start], &e) != Ordering::Equal {
            group_start = out.len();
        }
        let target = out[group_start..].iter_mut().find(|t| {
            t.req.types.len() == e.req.types.len() && (e.req.kind != ReqKind::OptMethod || t.req.types == e.req.types)
        });
        match target {
            Some(t) => {
                for (a, b) in t.req.types.iter().zip(&e.req.types) {
                    if a != b {
                        emitted.push((Constraint::Eq(a.clone(), b.clone()), e.origin.clone()));
                    }
                }
                t.cond.union_alternatives(&e.cond);
            }
            None => out.push(e),
        }
    }
    (out, emitted)
}

/// Joins entries that state the same requirement under two conditions
/// differing in one complementary atom into a single entry under the common
/// part. A split merge otherwise leaves a requirement whose return type
/// decides its own liveness.
pub fn resolve_complements(entries: Vec<ReqEntry>) -> Vec<ReqEntry> {
    let mut groups: HashMap<ClassReq, Vec<ReqEntry>> = HashMap::new();
    let mut order: Vec<ClassReq> = Vec::new();
    for e in entries {
        let slot = groups.entry(e.req.clone()).or_insert_with(|| {
            order.push(e.req.clone());
            Vec::new()
        });
        slot.push(e);
    }
    let mut out = Vec::new();
    for req in order {
        let mut group = groups.remove(&req).expect("grouped");
        'again: loop {
            for i in 0..group.len() {
                for j in i + 1..group.len() {
                    if let Some(cond) = group[i].cond.resolve(&group[j].cond) {
                        group.swap_remove(j);
                        group[i].cond = cond;
                        continue 'again;
                    }
                }
            }
            break;
        }
        out.extend(group);
    }
    out
}

/// Whether `ct` satisfies every live requirement of `cr` under `s`. Live
/// requirements must be ground.
pub fn satisfies(ct: &ClassTable, s: &Subst, cr: &ClassReqs) -> Result<bool, String> {
    for e in cr.iter() {
        match e.eval(s) {
            Truth::Fails => continue,
            Truth::Undecided => return Err(format!("condition of {e} is not decided")),
            Truth::Holds => {}
        }
        let req = e.req.apply(s);
        if !req.is_ground() {
            return Err(format!("requirement {req} is not ground"));
        }
        let ground = |t: &TypeRef| t.as_class().expect("ground").clone();
        let recv = ground(&req.recv);
        let types: Vec<ClassName> = req.types.iter().map(ground).collect();
        let ok = match req.kind {
            ReqKind::Extends => ct.extends_lookup(&recv) == Some(&types[0]),
            ReqKind::Ctor => ct.fields_lookup(&recv).is_ok_and(|f| f == types),
            ReqKind::Field => ct
                .field_lookup(req.member.as_ref().expect("field name"), &recv)
                .is_ok_and(|t| t == types[0]),
            ReqKind::Method | ReqKind::OptMethod => {
                let found = ct.mtype(req.member.as_ref().expect("method name"), &recv);
                match found {
                    Some(sig) => {
                        let (ret, params) = types.split_last().expect("return type");
                        sig.params == params && sig.ret == *ret
                    }
                    None => req.kind == ReqKind::OptMethod,
                }
            }
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_program, ClassVar};

    fn u(i: u32) -> TypeRef {
        TypeRef::Var(ClassVar(i))
    }

    fn c(s: &str) -> TypeRef {
        TypeRef::class(s)
    }

    fn o() -> Origin {
        Origin::new(Rule::Invk)
    }

    fn info(src: &str, class: &str) -> ClassInfo {
        let p = parse_program(src).unwrap();
        let decl = p
            .classes()
            .into_iter()
            .find(|d| d.name.as_str() == class)
            .unwrap()
            .clone();
        ClassInfo::from_decl(&decl)
    }

    const LIST: &str = "
        class Int extends Object { Int() { super(); } }
        class List extends Object { List() { super(); } Int size() { return new Int(); } }
        class LinkedList extends List { LinkedList() { super(); } }
    ";

    fn lines(cr: &ClassReqs) -> Vec<String> {
        cr.dump().lines().map(str::to_owned).collect()
    }

    fn shown(s: &Emitted) -> Vec<String> {
        s.iter().map(|(c, _)| c.to_string()).collect()
    }

    #[test]
    fn remove_methods_trace() {
        let list = info(LIST, "List");
        let cr = ClassReqs::single(ReqEntry::new(ClassReq::method(u(1), "size".into(), vec![], u(2)), o()));
        let (rest, s) = remove_methods(&list, cr, &Tuning::default());
        assert_eq!(lines(&rest), ["(U1.size : () -> U2, U1 != List)"]);
        assert_eq!(shown(&s), ["U2 = Int if U1 = List"]);
    }

    #[test]
    fn remove_ext_trace() {
        let linked = info(LIST, "LinkedList");
        let cr = ClassReqs::single(ReqEntry::new(ClassReq::method(u(3), "size".into(), vec![], u(4)), o()));
        let (rest, s) = remove_ext(&linked, cr, &Tuning::default());
        assert_eq!(
            lines(&rest),
            [
                "(List.size : () -> U4, U3 = LinkedList)",
                "(U3.size : () -> U4, U3 != LinkedList)"
            ]
        );
        assert!(s.is_empty());
    }

    #[test]
    fn merge_splits_distinct_variable_receivers() {
        let a = ClassReqs::single(ReqEntry::new(ClassReq::method(u(1), "size".into(), vec![], u(2)), o()));
        let b = ClassReqs::single(ReqEntry::new(ClassReq::method(u(3), "size".into(), vec![], u(4)), o()));
        let (cr, s) = merge_cr([a.clone(), b.clone()], &Tuning::default());
        assert_eq!(
            lines(&cr),
            [
                "(U1.size : () -> U2, U1 != U3)",
                "(U1.size : () -> U2, U1 = U3)",
                "(U3.size : () -> U4, U3 != U1)"
            ]
        );
        assert_eq!(shown(&s), ["U2 = U4 if U1 = U3"]);

        let plain = Tuning {
            normalize: false,
            in_depth_merge: false,
        };
        let (cr, s) = merge_cr([a, b], &plain);
        assert_eq!(cr.len(), 2);
        assert_eq!(shown(&s), ["U2 = U4 if U1 = U3"]);
    }

    #[test]
    fn merge_ground_receivers_is_union() {
        let a = ClassReqs::single(ReqEntry::new(ClassReq::ctor(c("List"), vec![]), o()));
        let b = ClassReqs::single(ReqEntry::new(ClassReq::ctor(c("LinkedList"), vec![]), o()));
        let (cr, s) = merge_cr([a, b], &Tuning::default());
        assert_eq!(cr.len(), 2);
        assert!(s.is_empty());
    }

    #[test]
    fn optional_requirements_never_relate() {
        let a = ClassReqs::single(ReqEntry::new(
            ClassReq::opt_method(u(1), "m".into(), vec![], c("A")),
            o(),
        ));
        let b = ClassReqs::single(ReqEntry::new(
            ClassReq::opt_method(u(2), "m".into(), vec![], c("B")),
            o(),
        ));
        let (cr, s) = merge_cr([a, b], &Tuning::default());
        assert_eq!(cr.len(), 2);
        assert!(s.is_empty());
    }

    #[test]
    fn context_requirements() {
        let (r, s) = merge_r([
            ContextReqs::single("x".into(), u(1)),
            ContextReqs::single("x".into(), u(2)),
        ]);
        assert_eq!(r.len(), 1);
        assert_eq!(shown(&s), ["U1 = U2"]);
        let (rest, eq) = remove_var_req(&r, &"x".into(), c("A"));
        assert!(rest.is_empty());
        assert_eq!(eq.unwrap().to_string(), "A = U1");
        let (rest, eq) = remove_var_req(&r, &"y".into(), c("A"));
        assert_eq!(rest.len(), 1);
        assert!(eq.is_none());
    }

    #[test]
    fn arity_mismatch_fails_when_live() {
        let list = info(LIST, "List");
        let e = ReqEntry::new(ClassReq::method(c("List"), "size".into(), vec![u(1)], u(2)), o());
        let d = against_decl(e, &list, &Tuning::default());
        assert!(d.kept.is_empty());
        assert_eq!(shown(&d.emitted), ["List = Object"]);
    }

    #[test]
    fn in_depth_merge_collapses_same_receiver() {
        let e1 = ReqEntry::new(ClassReq::field(u(1), "f".into(), u(2)), o());
        let e2 = ReqEntry::new(ClassReq::field(u(1), "f".into(), u(3)), o());
        let (out, s) = in_depth_merge(vec![e1, e2]);
        assert_eq!(out.len(), 1);
        assert_eq!(shown(&s), ["U2 = U3"]);
    }

    #[test]
    fn satisfies_ground_requirements() {
        let p = parse_program(LIST).unwrap();
        let ct = ClassTable::build(&p).unwrap();
        let mut s = Subst::new();
        s.unify(&u(1), &c("LinkedList")).unwrap();
        s.unify(&u(2), &c("Int")).unwrap();
        let ok = ClassReqs::from_entries([
            ReqEntry::new(ClassReq::method(u(1), "size".into(), vec![], u(2)), o()),
            ReqEntry::new(ClassReq::ctor(c("List"), vec![]), o()),
            ReqEntry::new(ClassReq::extends(c("LinkedList"), c("List")), o()),
            ReqEntry::new(ClassReq::opt_method(c("List"), "absent".into(), vec![], c("Int")), o()),
        ]);
        assert_eq!(satisfies(&ct, &s, &ok), Ok(true));
        let bad = ClassReqs::single(ReqEntry::new(
            ClassReq::method(u(1), "size".into(), vec![], c("List")),
            o(),
        ));
        assert_eq!(satisfies(&ct, &s, &bad), Ok(false));
        let dead = ClassReqs::single(
            ReqEntry::new(ClassReq::method(u(1), "nope".into(), vec![], u(2)), o())
                .with_cond(Condition::irrefutable(u(1)).with_neq(&c("LinkedList"))),
        );
        assert_eq!(satisfies(&ct, &s, &dead), Ok(true));
    }
}
