//! Union-find over the terms `V ∪ {null}` of a symbolic heap.

use std::collections::BTreeMap;

use crate::syntax::{PureKind, SymbolicHeap, Term, Var, VarSet};

#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub fn find(&mut self, i: usize) -> usize {
        let mut r = i;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut j = i;
        while self.parent[j] != r {
            let next = self.parent[j];
            self.parent[j] = r;
            j = next;
        }
        r
    }

    /// Merges the two classes; the smaller index becomes the root so that
    /// `null` (index 0) always represents its class.
    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// The terms `null, v1, v2, …` (variables in sorted order) with the
/// equivalence generated by the `≈` atoms of a heap.
#[derive(Clone, Debug)]
pub struct TermClasses {
    pub terms: Vec<Term>,
    index: BTreeMap<Var, usize>,
    uf: UnionFind,
}

impl TermClasses {
    pub fn new(vars: &VarSet) -> Self {
        let mut terms = vec![Term::Null];
        terms.extend(vars.iter().cloned().map(Term::Var));
        let index = vars.iter().cloned().enumerate().map(|(i, v)| (v, i + 1)).collect();
        TermClasses {
            uf: UnionFind::new(terms.len()),
            terms,
            index,
        }
    }

    /// Classes of `vars ∪ fv(h)` under the equalities of `h`.
    pub fn of_heap(h: &SymbolicHeap, vars: &VarSet) -> Self {
        let mut all = vars.clone();
        all.extend(h.fv());
        let mut c = TermClasses::new(&all);
        for a in h.pure() {
            if a.kind() == PureKind::Eq {
                let (i, j) = (c.idx(a.lhs()), c.idx(a.rhs()));
                c.uf.union(i, j);
            }
        }
        c
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn idx(&self, t: &Term) -> usize {
        match t {
            Term::Null => 0,
            Term::Var(v) => *self
                .index
                .get(v)
                .unwrap_or_else(|| panic!("term `{v:?}` is not tracked")),
        }
    }

    pub fn class(&mut self, t: &Term) -> usize {
        let i = self.idx(t);
        self.uf.find(i)
    }

    pub fn same(&mut self, a: &Term, b: &Term) -> bool {
        self.class(a) == self.class(b)
    }

    pub fn union(&mut self, a: usize, b: usize) {
        self.uf.union(a, b);
    }

    pub fn find(&mut self, i: usize) -> usize {
        self.uf.find(i)
    }

    /// Class representative for every term index.
    pub fn roots(&mut self) -> Vec<usize> {
        (0..self.terms.len()).map(|i| self.uf.find(i)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::PureAtom;

    #[test]
    fn null_represents_its_class() {
        let mut uf = UnionFind::new(4);
        uf.union(3, 2);
        uf.union(2, 0);
        assert_eq!(uf.find(3), 0);
        assert_eq!(uf.find(1), 1);
    }

    #[test]
    fn classes_from_equalities() {
        let h = SymbolicHeap::from_pure([
            PureAtom::eq(Var::new("x"), Var::new("y")),
            PureAtom::neq(Var::new("y"), Var::new("z")),
        ]);
        let mut c = TermClasses::of_heap(&h, &VarSet::new());
        assert!(c.same(&Term::var("x"), &Term::var("y")));
        assert!(!c.same(&Term::var("x"), &Term::var("z")));
        assert_eq!(c.len(), 4);
    }
}
