use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::Subst;
use crate::syntax::{ClassName, ClassVar, TypeRef};

/// Three-valued truth of a condition under a partial substitution.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth {
    Holds,
    Fails,
    Undecided,
}

/// Normalized conjunction of (in)equations about one receiver type.
///
/// The condition holds when the receiver differs from every class in
/// `not_ground` and every variable in `not_var`, equals every variable in
/// `same_var`, and, if `alternatives` is non-empty, is one of its classes.
///
/// Normal form: the receiver occurs in none of the sets; `alternatives` and
/// `not_ground` are never both non-empty; `not_var` and `same_var` are
/// disjoint; an unsatisfiable condition has all sets empty.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Condition {
    receiver: TypeRef,
    not_ground: BTreeSet<ClassName>,
    not_var: BTreeSet<ClassVar>,
    same_var: BTreeSet<ClassVar>,
    alternatives: BTreeSet<ClassName>,
    unsat: bool,
}

impl Condition {
    pub fn irrefutable(receiver: TypeRef) -> Self {
        Condition {
            receiver,
            not_ground: BTreeSet::new(),
            not_var: BTreeSet::new(),
            same_var: BTreeSet::new(),
            alternatives: BTreeSet::new(),
            unsat: false,
        }
    }

    pub fn unsatisfiable(receiver: TypeRef) -> Self {
        let mut c = Condition::irrefutable(receiver);
        c.unsat = true;
        c
    }

    pub fn receiver(&self) -> &TypeRef {
        &self.receiver
    }

    pub fn not_ground(&self) -> &BTreeSet<ClassName> {
        &self.not_ground
    }

    pub fn not_var(&self) -> &BTreeSet<ClassVar> {
        &self.not_var
    }

    pub fn same_var(&self) -> &BTreeSet<ClassVar> {
        &self.same_var
    }

    pub fn alternatives(&self) -> &BTreeSet<ClassName> {
        &self.alternatives
    }

    pub fn is_unsat(&self) -> bool {
        self.unsat
    }

    pub fn is_irrefutable(&self) -> bool {
        !self.unsat
            && self.not_ground.is_empty()
            && self.not_var.is_empty()
            && self.same_var.is_empty()
            && self.alternatives.is_empty()
    }

    fn set_unsat(&mut self) {
        self.not_ground.clear();
        self.not_var.clear();
        self.same_var.clear();
        self.alternatives.clear();
        self.unsat = true;
    }

    /// Conjoins `receiver = t`.
    pub fn add_eq(&mut self, t: &TypeRef) {
        if self.unsat || *t == self.receiver {
            return;
        }
        match (&self.receiver, t) {
            (TypeRef::Class(_), TypeRef::Class(_)) => self.set_unsat(),
            (_, TypeRef::Var(v)) => {
                if self.not_var.contains(v) {
                    self.set_unsat();
                } else {
                    self.same_var.insert(*v);
                }
            }
            (TypeRef::Var(_), TypeRef::Class(c)) => {
                let excluded =
                    self.not_ground.contains(c) || (!self.alternatives.is_empty() && !self.alternatives.contains(c));
                if excluded {
                    self.set_unsat();
                } else {
                    self.alternatives = BTreeSet::from([c.clone()]);
                    self.not_ground.clear();
                }
            }
        }
    }

    /// Conjoins `receiver != t`.
    pub fn add_neq(&mut self, t: &TypeRef) {
        if self.unsat {
            return;
        }
        if *t == self.receiver {
            self.set_unsat();
            return;
        }
        match (&self.receiver, t) {
            (TypeRef::Class(_), TypeRef::Class(_)) => {}
            (_, TypeRef::Var(v)) => {
                if self.same_var.contains(v) {
                    self.set_unsat();
                } else {
                    self.not_var.insert(*v);
                }
            }
            (TypeRef::Var(_), TypeRef::Class(c)) => {
                if self.alternatives.is_empty() {
                    self.not_ground.insert(c.clone());
                } else {
                    self.alternatives.remove(c);
                    if self.alternatives.is_empty() {
                        self.set_unsat();
                    }
                }
            }
        }
    }

    /// Conjoins `receiver ∈ set`. An empty set adds nothing.
    pub fn add_alternatives(&mut self, set: &BTreeSet<ClassName>) {
        if self.unsat || set.is_empty() {
            return;
        }
        match &self.receiver {
            TypeRef::Class(r) => {
                if !set.contains(r) {
                    self.set_unsat();
                }
            }
            TypeRef::Var(_) => {
                let next: BTreeSet<ClassName> = if self.alternatives.is_empty() {
                    set.difference(&self.not_ground).cloned().collect()
                } else {
                    self.alternatives.intersection(set).cloned().collect()
                };
                if next.is_empty() {
                    self.set_unsat();
                } else {
                    self.alternatives = next;
                    self.not_ground.clear();
                }
            }
        }
    }

    pub fn with_eq(mut self, t: &TypeRef) -> Self {
        self.add_eq(t);
        self
    }

    pub fn with_neq(mut self, t: &TypeRef) -> Self {
        self.add_neq(t);
        self
    }

    /// Replays this condition's atoms onto `target`, reading each atom as a
    /// statement about `target`'s receiver. Valid when both receivers are
    /// known to be equal.
    fn replay_onto(&self, target: &mut Condition, resolve: &impl Fn(&TypeRef) -> TypeRef) {
        if self.unsat {
            target.set_unsat();
            return;
        }
        target.add_alternatives(&self.alternatives);
        for g in &self.not_ground {
            target.add_neq(&TypeRef::Class(g.clone()));
        }
        for v in &self.not_var {
            target.add_neq(&resolve(&TypeRef::Var(*v)));
        }
        for v in &self.same_var {
            target.add_eq(&resolve(&TypeRef::Var(*v)));
        }
    }

    /// The same condition stated over another receiver known to be equal to
    /// this one's.
    pub fn rebase(&self, receiver: TypeRef) -> Condition {
        let mut out = Condition::irrefutable(receiver);
        if out.receiver != self.receiver {
            out.add_eq(&self.receiver);
        }
        self.replay_onto(&mut out, &|t| t.clone());
        out
    }

    /// Conjunction with `other`, if expressible over a single receiver.
    pub fn conjoin(&self, other: &Condition) -> Option<Condition> {
        if self.unsat || other.unsat {
            return Some(Condition::unsatisfiable(self.receiver.clone()));
        }
        if other.is_irrefutable() {
            return Some(self.clone());
        }
        let same_receiver = other.receiver == self.receiver
            || match &other.receiver {
                TypeRef::Var(v) => self.same_var.contains(v),
                TypeRef::Class(c) => self.alternatives.len() == 1 && self.alternatives.contains(c),
            };
        if !same_receiver {
            return None;
        }
        let mut out = self.clone();
        other.replay_onto(&mut out, &|t| t.clone());
        Some(out)
    }

    /// Applies a substitution and renormalizes.
    pub fn apply(&self, s: &Subst) -> Condition {
        let resolve = |t: &TypeRef| s.resolve(t);
        let mut out = Condition::irrefutable(resolve(&self.receiver));
        self.replay_onto(&mut out, &resolve);
        out
    }

    /// Evaluates the condition under a partial substitution.
    pub fn eval(&self, s: &Subst) -> Truth {
        if self.unsat {
            return Truth::Fails;
        }
        let r = s.resolve(&self.receiver);
        let mut undecided = false;
        for g in &self.not_ground {
            match &r {
                TypeRef::Class(c) if c == g => return Truth::Fails,
                TypeRef::Class(_) => {}
                TypeRef::Var(_) => undecided = true,
            }
        }
        for v in &self.not_var {
            let x = s.resolve(&TypeRef::Var(*v));
            if x == r {
                return Truth::Fails;
            }
            if !(x.is_ground() && r.is_ground()) {
                undecided = true;
            }
        }
        for v in &self.same_var {
            let x = s.resolve(&TypeRef::Var(*v));
            if x == r {
                continue;
            }
            if x.is_ground() && r.is_ground() {
                return Truth::Fails;
            }
            undecided = true;
        }
        if !self.alternatives.is_empty() {
            match &r {
                TypeRef::Class(c) if !self.alternatives.contains(c) => return Truth::Fails,
                TypeRef::Class(_) => {}
                TypeRef::Var(_) => undecided = true,
            }
        }
        if undecided {
            Truth::Undecided
        } else {
            Truth::Holds
        }
    }

    /// Equality ignoring `alternatives`; the in-depth merge criterion.
    pub fn eq_up_to_alternatives(&self, other: &Condition) -> bool {
        self.receiver == other.receiver
            && self.unsat == other.unsat
            && self.not_ground == other.not_ground
            && self.not_var == other.not_var
            && self.same_var == other.same_var
    }

    /// Combines two conditions equal up to alternatives into their
    /// disjunction: an empty alternative set is the weaker one and wins.
    pub fn union_alternatives(&mut self, other: &Condition) {
        debug_assert!(self.eq_up_to_alternatives(other));
        if self.alternatives.is_empty() || other.alternatives.is_empty() {
            self.alternatives.clear();
        } else {
            self.alternatives.extend(other.alternatives.iter().cloned());
        }
    }

    /// The disjunction of two conditions that agree except for one atom
    /// asserted by one and negated by the other, which is the common part.
    pub fn resolve(&self, other: &Condition) -> Option<Condition> {
        if self.unsat || other.unsat || self.receiver != other.receiver {
            return None;
        }
        for (a, b) in [(self, other), (other, self)] {
            if a.not_ground == b.not_ground && a.alternatives == b.alternatives {
                let same = a.not_var.difference(&b.not_var).count() == 1
                    && b.not_var.is_subset(&a.not_var)
                    && b.same_var.difference(&a.same_var).count() == 1
                    && a.same_var.is_subset(&b.same_var);
                if same {
                    let v = a.not_var.difference(&b.not_var).next().expect("one atom");
                    if b.same_var.difference(&a.same_var).next() == Some(v) {
                        let mut out = a.clone();
                        out.not_var.remove(v);
                        return Some(out);
                    }
                }
            }
            if a.not_var == b.not_var
                && a.same_var == b.same_var
                && a.alternatives.is_empty()
                && b.not_ground.is_empty()
                && b.alternatives.len() == 1
            {
                let c = b.alternatives.iter().next().expect("one alternative");
                if a.not_ground.contains(c) {
                    let mut out = a.clone();
                    out.not_ground.remove(c);
                    return Some(out);
                }
            }
        }
        None
    }

    /// Every class variable the condition mentions.
    pub fn vars(&self) -> impl Iterator<Item = ClassVar> + '_ {
        self.receiver
            .as_var()
            .into_iter()
            .chain(self.not_var.iter().copied())
            .chain(self.same_var.iter().copied())
    }

    /// Every class name the condition mentions.
    pub fn names(&self) -> impl Iterator<Item = &ClassName> + '_ {
        self.receiver
            .as_class()
            .into_iter()
            .chain(self.not_ground.iter())
            .chain(self.alternatives.iter())
    }

    /// Checks the normal-form invariants.
    pub fn check_normal(&self) -> Result<(), String> {
        let r = &self.receiver;
        let in_sets = match r {
            TypeRef::Class(c) => self.not_ground.contains(c) || self.alternatives.contains(c),
            TypeRef::Var(v) => self.not_var.contains(v) || self.same_var.contains(v),
        };
        if in_sets {
            return Err(format!("receiver {r} occurs in its own condition"));
        }
        if !self.alternatives.is_empty() && !self.not_ground.is_empty() {
            return Err("alternatives and excluded classes both non-empty".into());
        }
        if self.not_var.intersection(&self.same_var).next().is_some() {
            return Err("a variable is both equal and unequal to the receiver".into());
        }
        if self.unsat
            && !(self.not_ground.is_empty()
                && self.not_var.is_empty()
                && self.same_var.is_empty()
                && self.alternatives.is_empty())
        {
            return Err("unsatisfiable condition with residual atoms".into());
        }
        Ok(())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.unsat {
            return f.write_str("false");
        }
        if self.is_irrefutable() {
            return f.write_str("true");
        }
        let r = &self.receiver;
        let mut atoms: Vec<String> = Vec::new();
        match self.alternatives.len() {
            0 => {}
            1 => atoms.push(format!("{r} = {}", self.alternatives.iter().next().expect("one"))),
            _ => {
                let alts: Vec<String> = self.alternatives.iter().map(ToString::to_string).collect();
                atoms.push(format!("{r} in {{{}}}", alts.join(", ")));
            }
        }
        atoms.extend(self.not_ground.iter().map(|g| format!("{r} != {g}")));
        atoms.extend(self.same_var.iter().map(|v| format!("{r} = {v}")));
        atoms.extend(self.not_var.iter().map(|v| format!("{r} != {v}")));
        f.write_str(&atoms.join(" & "))
    }
}

impl fmt::Debug for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: u32) -> TypeRef {
        TypeRef::Var(ClassVar(i))
    }

    fn c(s: &str) -> TypeRef {
        TypeRef::class(s)
    }

    #[test]
    fn eq_against_excluded_is_unsat() {
        let cond = Condition::irrefutable(u(1)).with_neq(&c("C")).with_eq(&c("C"));
        assert!(cond.is_unsat());
    }

    #[test]
    fn reflexive_eq_is_noop() {
        let cond = Condition::irrefutable(u(1)).with_eq(&u(1));
        assert!(cond.is_irrefutable());
    }

    #[test]
    fn alternatives_exclude() {
        let mut cond = Condition::irrefutable(u(1));
        cond.add_alternatives(&BTreeSet::from([Name::new("A"), Name::new("B")]));
        assert!(cond.clone().with_eq(&c("C")).is_unsat());
        assert_eq!(cond.clone().with_eq(&c("A")).alternatives().len(), 1);
        assert!(cond.with_neq(&c("A")).with_neq(&c("B")).is_unsat());
    }

    use crate::syntax::Name;

    #[test]
    fn evaluation() {
        let mut s = Subst::new();
        let cond = Condition::irrefutable(u(1)).with_neq(&c("List"));
        assert_eq!(cond.eval(&s), Truth::Undecided);
        s.unify(&u(1), &c("List")).unwrap();
        assert_eq!(cond.eval(&s), Truth::Fails);
        assert_eq!(Condition::irrefutable(u(9)).eval(&s), Truth::Holds);
        let eq = Condition::irrefutable(u(3)).with_eq(&c("LinkedList"));
        assert_eq!(eq.eval(&s), Truth::Undecided);
    }

    #[test]
    fn apply_renormalizes() {
        let mut s = Subst::new();
        let cond = Condition::irrefutable(u(1)).with_neq(&u(2));
        s.unify(&u(1), &u(2)).unwrap();
        assert!(cond.apply(&s).is_unsat());
        let mut s = Subst::new();
        s.unify(&u(1), &c("A")).unwrap();
        let cond = Condition::irrefutable(u(1)).with_neq(&c("B"));
        assert!(cond.apply(&s).is_irrefutable());
    }

    #[test]
    fn conjoin_via_same_var() {
        let a = Condition::irrefutable(u(1)).with_eq(&u(3));
        let b = Condition::irrefutable(u(3)).with_neq(&c("List"));
        let ab = a.conjoin(&b).unwrap();
        assert_eq!(ab.receiver(), &u(1));
        assert!(ab.not_ground().contains(&Name::new("List")));
        let unrelated = Condition::irrefutable(u(7)).with_neq(&c("List"));
        assert!(a.conjoin(&unrelated).is_none());
    }

    #[test]
    fn display() {
        let cond = Condition::irrefutable(u(1)).with_neq(&c("List"));
        assert_eq!(cond.to_string(), "U1 != List");
        assert_eq!(
            Condition::irrefutable(u(3)).with_eq(&c("LinkedList")).to_string(),
            "U3 = LinkedList"
        );
    }
}
