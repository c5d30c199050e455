use std::collections::HashMap;
use std::fmt;

use crate::syntax::{ClassName, ClassVar, TypeRef};

/// Union-find over class variables with ground anchors. Resolving is
/// idempotent: a resolved type is either ground or an unbound root variable.
#[derive(Clone, Default)]
pub struct Subst {
    links: HashMap<ClassVar, TypeRef>,
}

impl Subst {
    pub fn new() -> Self {
        Self::default()
    }

    fn find(&self, v: ClassVar) -> TypeRef {
        let mut cur = v;
        loop {
            match self.links.get(&cur) {
                None => return TypeRef::Var(cur),
                Some(TypeRef::Class(c)) => return TypeRef::Class(c.clone()),
                Some(TypeRef::Var(next)) => cur = *next,
            }
        }
    }

    fn compress(&mut self, v: ClassVar, root: &TypeRef) {
        let mut cur = v;
        while let Some(TypeRef::Var(next)) = self.links.get(&cur).cloned() {
            if TypeRef::Var(next) == *root {
                break;
            }
            self.links.insert(cur, root.clone());
            cur = next;
        }
    }

    pub fn resolve(&self, t: &TypeRef) -> TypeRef {
        match t {
            TypeRef::Var(v) => self.find(*v),
            TypeRef::Class(_) => t.clone(),
        }
    }

    pub fn resolve_var(&self, v: ClassVar) -> TypeRef {
        self.find(v)
    }

    /// Unifies two types. Returns whether any binding was added, or the
    /// clashing ground pair.
    pub fn unify(&mut self, a: &TypeRef, b: &TypeRef) -> Result<bool, (ClassName, ClassName)> {
        let ra = self.resolve(a);
        let rb = self.resolve(b);
        for (orig, root) in [(a, &ra), (b, &rb)] {
            if let TypeRef::Var(v) = orig {
                self.compress(*v, root);
            }
        }
        if ra == rb {
            return Ok(false);
        }
        match (ra, rb) {
            (TypeRef::Class(x), TypeRef::Class(y)) => Err((x, y)),
            (TypeRef::Var(x), TypeRef::Var(y)) => {
                let (from, to) = if x > y { (x, y) } else { (y, x) };
                self.links.insert(from, TypeRef::Var(to));
                Ok(true)
            }
            (TypeRef::Var(x), t @ TypeRef::Class(_)) | (t @ TypeRef::Class(_), TypeRef::Var(x)) => {
                self.links.insert(x, t);
                Ok(true)
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    /// Every bound variable with its resolved type, sorted by variable.
    pub fn bindings(&self) -> Vec<(ClassVar, TypeRef)> {
        let mut out: Vec<(ClassVar, TypeRef)> = self.links.keys().map(|v| (*v, self.find(*v))).collect();
        out.sort();
        out
    }
}

impl fmt::Debug for Subst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.bindings()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(i: u32) -> TypeRef {
        TypeRef::Var(ClassVar(i))
    }

    #[test]
    fn chain_resolves_to_ground() {
        let mut s = Subst::new();
        s.unify(&u(3), &u(2)).unwrap();
        s.unify(&u(2), &u(1)).unwrap();
        s.unify(&u(1), &TypeRef::class("C")).unwrap();
        for i in 1..=3 {
            assert_eq!(s.resolve(&u(i)), TypeRef::class("C"));
        }
        assert!(s.unify(&u(3), &TypeRef::class("D")).is_err());
        assert_eq!(s.unify(&u(3), &TypeRef::class("C")), Ok(false));
    }

    #[test]
    fn resolve_is_idempotent() {
        let mut s = Subst::new();
        s.unify(&u(5), &u(7)).unwrap();
        let once = s.resolve(&u(7));
        assert_eq!(s.resolve(&once), once);
        assert_eq!(once, u(5));
    }
}
