//! Satisfiability, alias sets and canonicalization by aliasing case
//! analysis.
//!
//! The case split ranges over set partitions of `V ∪ {null}` instead of
//! arbitrary reflexive-symmetric relations: a relation that is not
//! transitive always yields an unsatisfiable formula, so both readings
//! produce the same satisfiable cases.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::semantics::{Cell, Heap, State, Store, Value};
use crate::syntax::*;
use crate::unionfind::TermClasses;

pub const DEFAULT_VAR_CAP: usize = 7;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CanonError {
    #[error(
        "case analysis over {vars} variables exceeds the limit of {limit} aliasing cases \
         (variable cap {cap}); simplify the input or raise the cap"
    )]
    CapExceeded { vars: usize, cap: usize, limit: u128 },
}

/// Bell numbers: the number of set partitions of an `n`-element set.
pub fn bell(n: usize) -> u128 {
    let mut row = vec![1u128];
    for _ in 0..n {
        let mut next = vec![*row.last().unwrap()];
        for v in &row {
            let x = *next.last().unwrap() + v;
            next.push(x);
        }
        row = next;
    }
    row[0]
}

/// Aliasing constraints of a heap: its `≈`-classes and the pairs of
/// classes it forces apart.
struct Constraints {
    classes: TermClasses,
    blocks: Vec<usize>,
    conflict: Vec<Vec<bool>>,
}

impl Constraints {
    /// `None` when the heap is unsatisfiable.
    fn new(h: &SymbolicHeap, vars: &VarSet) -> Option<Self> {
        let mut classes = TermClasses::of_heap(h, vars);
        let roots = classes.roots();
        let mut blocks: Vec<usize> = roots.clone();
        blocks.sort_unstable();
        blocks.dedup();
        let pos: BTreeMap<usize, usize> = blocks.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let n = blocks.len();
        let mut conflict = vec![vec![false; n]; n];
        let mut apart = |a: usize, b: usize| -> bool {
            if a == b {
                return false;
            }
            conflict[a][b] = true;
            conflict[b][a] = true;
            true
        };
        for a in h.pure() {
            if a.kind() == PureKind::Neq {
                let (l, r) = (classes.class(a.lhs()), classes.class(a.rhs()));
                if !apart(pos[&l], pos[&r]) {
                    return None;
                }
            }
        }
        let null_block = pos[&classes.class(&Term::Null)];
        let sources: Vec<usize> = h
            .spatial()
            .iter()
            .map(|s| pos[&classes.class(&Term::Var(s.source().clone()))])
            .collect();
        for (i, &s) in sources.iter().enumerate() {
            if !apart(s, null_block) {
                return None;
            }
            for &s2 in &sources[..i] {
                if !apart(s, s2) {
                    return None;
                }
            }
        }
        Some(Constraints {
            classes,
            blocks,
            conflict,
        })
    }

    /// Keeps only the blocks holding `null` or a variable of `keep`; the
    /// other terms are left out of the case split.
    fn restrict(mut self, keep: &VarSet) -> Self {
        let roots = self.classes.roots();
        let mut wanted = vec![false; self.blocks.len()];
        let pos: BTreeMap<usize, usize> = self.blocks.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        for (i, t) in self.classes.terms.iter().enumerate() {
            let relevant = match t {
                Term::Null => true,
                Term::Var(v) => keep.contains(v),
            };
            if relevant {
                wanted[pos[&roots[i]]] = true;
            }
        }
        let idx: Vec<usize> = (0..self.blocks.len()).filter(|&i| wanted[i]).collect();
        Constraints {
            blocks: idx.iter().map(|&i| self.blocks[i]).collect(),
            conflict: idx
                .iter()
                .map(|&i| idx.iter().map(|&j| self.conflict[i][j]).collect())
                .collect(),
            classes: self.classes,
        }
    }

    /// Every grouping of the blocks that merges no conflicting pair, as
    /// restricted-growth assignments block → group. Stops once more than
    /// `limit` groupings exist and returns `None`.
    fn groupings(&self, limit: u128) -> Option<Vec<Vec<usize>>> {
        let n = self.blocks.len();
        let mut out = Vec::new();
        let mut assign: Vec<usize> = Vec::with_capacity(n);
        let mut groups: Vec<Vec<usize>> = Vec::new();
        if self.grow(&mut assign, &mut groups, &mut out, limit) {
            Some(out)
        } else {
            None
        }
    }

    fn grow(
        &self,
        assign: &mut Vec<usize>,
        groups: &mut Vec<Vec<usize>>,
        out: &mut Vec<Vec<usize>>,
        limit: u128,
    ) -> bool {
        let b = assign.len();
        if b == self.blocks.len() {
            out.push(assign.clone());
            return (out.len() as u128) <= limit;
        }
        for g in 0..=groups.len() {
            if g < groups.len() && groups[g].iter().any(|&m| self.conflict[m][b]) {
                continue;
            }
            if g == groups.len() {
                groups.push(Vec::new());
            }
            groups[g].push(b);
            assign.push(g);
            let ok = self.grow(assign, groups, out, limit);
            assign.pop();
            groups[g].pop();
            if groups[g].is_empty() {
                groups.pop();
            }
            if !ok {
                return false;
            }
        }
        true
    }

    /// The complete pure formula `π` for one grouping.
    fn pi(&mut self, grouping: &[usize]) -> Vec<PureAtom> {
        let roots = self.classes.roots();
        let block_of: BTreeMap<usize, usize> = self.blocks.iter().enumerate().map(|(i, r)| (*r, i)).collect();
        let group = |ti: usize| block_of.get(&roots[ti]).map(|b| grouping[*b]);
        let terms = &self.classes.terms;
        let mut atoms = Vec::new();
        for i in 0..terms.len() {
            for j in (i + 1)..terms.len() {
                let (Some(gi), Some(gj)) = (group(i), group(j)) else {
                    continue;
                };
                let kind = if gi == gj { PureKind::Eq } else { PureKind::Neq };
                atoms.push(PureAtom::new(kind, terms[i].clone(), terms[j].clone()));
            }
        }
        atoms
    }
}

/// Whether some state satisfies the heap.
pub fn satisfiable(h: &SymbolicHeap) -> bool {
    Constraints::new(h, &VarSet::new()).is_some()
}

/// `{v | x ≈ v ∈ ψ}`, reading `x ≈ v` and `v ≈ x` as the same atom.
pub fn aliases(x: &Var, h: &SymbolicHeap) -> VarSet {
    let xt = Term::Var(x.clone());
    h.pure()
        .iter()
        .filter(|a| a.kind() == PureKind::Eq)
        .filter_map(|a| {
            if a.lhs() == &xt {
                a.rhs().as_var().cloned()
            } else if a.rhs() == &xt {
                a.lhs().as_var().cloned()
            } else {
                None
            }
        })
        .collect()
}

/// Every pair of distinct terms over `vars ∪ {null}` is decided by an
/// `≈` or `≉` atom of `h`; `t ≈ t` counts as always present.
pub fn is_canonical(h: &SymbolicHeap, vars: &VarSet) -> bool {
    let mut terms = vec![Term::Null];
    terms.extend(vars.iter().cloned().map(Term::Var));
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            let eq = PureAtom::new(PureKind::Eq, terms[i].clone(), terms[j].clone());
            if !h.contains_pure(&eq) && !h.contains_pure(&eq.negate()) {
                return false;
            }
        }
    }
    true
}

/// One complete pure formula per set partition of `vars ∪ {null}`.
pub fn pi(vars: &VarSet) -> Vec<SymbolicHeap> {
    let mut c = Constraints::new(&SymbolicHeap::emp(), vars).expect("emp is satisfiable");
    let groupings = c.groupings(u128::MAX).expect("no limit");
    groupings.iter().map(|g| SymbolicHeap::from_pure(c.pi(g))).collect()
}

/// `CA(ψ, C)`: the satisfiable `π * ψ` for `π` ranging over `Π(fv(ψ) ∪ fv(C))`.
pub fn ca(h: &SymbolicHeap, c: &Command) -> Result<Vec<SymbolicHeap>, CanonError> {
    ca_over(h, &c.fv(), DEFAULT_VAR_CAP)
}

/// Case analysis over `vars ∪ fv(h)`. Refuses when the number of
/// satisfiable cases would exceed `Bell(cap + 1)`.
pub fn ca_over(h: &SymbolicHeap, vars: &VarSet, cap: usize) -> Result<Vec<SymbolicHeap>, CanonError> {
    let Some(mut c) = Constraints::new(h, vars) else {
        return Ok(Vec::new());
    };
    let limit = bell(cap + 1);
    let groupings = c.groupings(limit).ok_or(CanonError::CapExceeded {
        vars: c.classes.len() - 1,
        cap,
        limit,
    })?;
    let mut out: Vec<SymbolicHeap> = groupings
        .iter()
        .map(|g| {
            let mut r = h.clone();
            for a in c.pi(g) {
                r.push_pure(a);
            }
            r
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// Case analysis deciding only the aliasing among `vars ∪ {null}`,
/// leaving the other variables of `h` as they are. The cases are exact:
/// their disjunction is equivalent to `h`.
pub fn ca_partial(h: &SymbolicHeap, vars: &VarSet, cap: usize) -> Result<Vec<SymbolicHeap>, CanonError> {
    let Some(c) = Constraints::new(h, vars) else {
        return Ok(Vec::new());
    };
    let mut c = c.restrict(vars);
    let limit = bell(cap + 1);
    let groupings = c.groupings(limit).ok_or(CanonError::CapExceeded {
        vars: c.blocks.len() - 1,
        cap,
        limit,
    })?;
    let mut out: Vec<SymbolicHeap> = groupings
        .iter()
        .map(|g| {
            let mut r = h.clone();
            for a in c.pi(g) {
                r.push_pure(a);
            }
            r
        })
        .collect();
    out.dedup();
    Ok(out)
}

/// `cano(P, C)` with the default cap and binder renaming away from the
/// names of `P` and `C`.
pub fn cano(p: &Assertion, c: &Command) -> Result<Assertion, CanonError> {
    let mut fresh = FreshNames::new(p.all_vars().into_iter().chain(c.all_vars()).collect());
    cano_with(p, c, DEFAULT_VAR_CAP, &mut fresh)
}

pub fn cano_with(p: &Assertion, c: &Command, cap: usize, fresh: &mut FreshNames) -> Result<Assertion, CanonError> {
    let cfv = c.fv();
    let mut out = Vec::new();
    for d in &p.disjuncts {
        let d = d.freshen_binders(&cfv, fresh);
        for phi in ca_over(&d.body, &cfv, cap)? {
            out.push(QuantifiedHeap::new(d.binders.clone(), phi));
        }
    }
    Ok(Assertion::new(out))
}

/// A model giving each `≈`-class of `h` its own location (the class of
/// `null` maps to `null`), with the number of locations it uses. For a
/// canonical heap every model is this one up to renaming locations.
pub fn canonical_model(h: &SymbolicHeap, vars: &VarSet) -> Option<(State, u8)> {
    let c = Constraints::new(h, vars)?;
    let mut classes = c.classes;
    let null_root = classes.class(&Term::Null);
    let roots = classes.roots();
    let mut loc_of: BTreeMap<usize, u8> = BTreeMap::new();
    for &r in &roots {
        if r != null_root && !loc_of.contains_key(&r) {
            let next = loc_of.len() as u8 + 1;
            loc_of.insert(r, next);
        }
    }
    let value = |i: usize| match loc_of.get(&roots[i]) {
        Some(l) => Value::Loc(*l),
        None => Value::Null,
    };
    let mut store = Store::new();
    for (i, t) in classes.terms.iter().enumerate() {
        if let Term::Var(v) = t {
            store.set(v, value(i));
        }
    }
    let mut heap = Heap::new();
    for a in h.spatial() {
        let Value::Loc(l) = store.get(a.source()) else {
            unreachable!("sources are non-null in satisfiable heaps")
        };
        let cell = match a {
            SpatialAtom::PointsTo(_, t) => Cell::Val(store.eval(t)),
            SpatialAtom::NegPoints(_) => Cell::Dealloc,
        };
        heap.set(l, cell);
    }
    Some((State::new(store, heap), loc_of.len() as u8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_assertion, parse_heap};

    fn h(s: &str) -> SymbolicHeap {
        parse_heap(s).unwrap()
    }

    fn vars(names: &[&str]) -> VarSet {
        names.iter().map(|n| Var::new(n)).collect()
    }

    #[test]
    fn satisfiability_examples() {
        assert!(!satisfiable(&h("x == y * x -> t * y -> u")));
        assert!(!satisfiable(&h("x == null * x -> t")));
        assert!(satisfiable(&h("x != y * x -> y * y -/>")));
        assert!(!satisfiable(&h("x != x")));
        assert!(satisfiable(&h("emp")));
    }

    #[test]
    fn alias_sets() {
        assert_eq!(aliases(&Var::new("x"), &h("x == y * y -> t")), vars(&["y"]));
        assert_eq!(aliases(&Var::new("x"), &h("y == x * y -> t")), vars(&["y"]));
        assert!(aliases(&Var::new("x"), &h("emp")).is_empty());
    }

    #[test]
    fn partition_counts() {
        assert_eq!(pi(&vars(&["x", "y"])).len(), 5);
        assert_eq!(pi(&VarSet::new()).len(), 1);
        assert_eq!(pi(&vars(&["x"])).len(), 2);
        assert_eq!(bell(8), 4140);
    }

    #[test]
    fn case_analysis_of_free() {
        let out = ca(&h("y -> null"), &Command::Free(Var::new("x"))).unwrap();
        let printed: Vec<String> = out.iter().map(|p| p.to_string()).collect();
        assert_eq!(printed.len(), 3);
        for expected in [
            "x == y * x != null * y != null * y -> null",
            "x == null * x != y * y != null * y -> null",
            "x != y * x != null * y != null * y -> null",
        ] {
            assert!(printed.contains(&expected.to_string()), "{expected} in {printed:?}");
        }
        assert_eq!(ca(&h("emp"), &Command::Skip).unwrap().len(), 1);
        assert!(ca(&h("x == null * x -> t"), &Command::Skip).unwrap().is_empty());
    }

    #[test]
    fn canonicity() {
        let v = vars(&["x", "y"]);
        assert!(!is_canonical(&h("y -> t"), &v));
        assert!(is_canonical(&h("x == y * x != null * y != null * y -> t"), &v));
        for phi in ca(&h("y -> t"), &Command::Free(Var::new("x"))).unwrap() {
            let mut all = phi.fv();
            all.insert(Var::new("x"));
            assert!(is_canonical(&phi, &all));
        }
    }

    #[test]
    fn cano_renames_clashing_binders() {
        let p = parse_assertion("exists x . x -> null").unwrap();
        let c = Command::Free(Var::new("x"));
        let q = cano(&p, &c).unwrap();
        assert!(!q.disjuncts.is_empty());
        for d in &q.disjuncts {
            assert!(!d.binders.contains(&Var::new("x")));
        }
        assert!(cano(&Assertion::false_(), &c).unwrap().is_false());
    }

    #[test]
    fn cap_is_enforced() {
        let many: VarSet = (0..9).map(|i| Var::new(&format!("v{i}"))).collect();
        assert!(matches!(
            ca_over(&SymbolicHeap::emp(), &many, 7),
            Err(CanonError::CapExceeded { .. })
        ));
    }

    #[test]
    fn canonical_model_satisfies_heap() {
        let phi = h("x == y * x != null * z == null * y -> z");
        let (st, n) = canonical_model(&phi, &VarSet::new()).unwrap();
        assert_eq!(n, 1);
        let dom = crate::semantics::DomainSpec::new(n, 1);
        assert!(crate::semantics::satisfies_heap(&dom, &st, &phi));
    }

    #[test]
    fn partial_split_leaves_other_variables_alone() {
        let psi = h("y -> e * a != x");
        let cases = ca_partial(&psi, &vars(&["x", "y"]), DEFAULT_VAR_CAP).unwrap();
        assert_eq!(cases.len(), 3);
        for c in &cases {
            assert!(is_canonical(c, &vars(&["x", "y"])));
            assert!(!is_canonical(c, &vars(&["x", "y", "e"])));
        }
        let dom = crate::semantics::DomainSpec::new(3, 1);
        let all = vars(&["a", "e", "x", "y"]);
        let split = Assertion::new(cases.into_iter().map(QuantifiedHeap::unquantified).collect());
        for st in crate::semantics::enum_states(&dom, &all) {
            assert_eq!(
                crate::semantics::satisfies_heap(&dom, &st, &psi),
                crate::semantics::satisfies(&dom, &st, &split)
            );
        }
    }
}
