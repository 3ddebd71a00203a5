//! Entailment between assertions.
//!
//! The antecedent's binders are skolemized and each body is split into
//! canonical cases over every variable in play. All models of a canonical
//! heap are the same up to renaming locations, so a case entails the
//! consequent iff its canonical model (with spare locations for the
//! consequent's binders) satisfies some consequent disjunct.

use std::fmt;

use crate::canon::{self, canonical_model, CanonError};
use crate::semantics::{models, satisfies, satisfies_quantified, DomainSpec, State};
use crate::syntax::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntailVerdict {
    Holds,
    /// `counterexample ⊨ P` and `counterexample ⊭ Q` over `domain`.
    Fails {
        counterexample: State,
        domain: DomainSpec,
    },
    Unknown(String),
}

impl EntailVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, EntailVerdict::Holds)
    }
}

impl fmt::Display for EntailVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EntailVerdict::Holds => f.write_str("holds"),
            EntailVerdict::Fails { counterexample, .. } => {
                write!(f, "fails, counterexample {counterexample}")
            }
            EntailVerdict::Unknown(r) => write!(f, "unknown: {r}"),
        }
    }
}

pub fn entails(p: &Assertion, q: &Assertion) -> EntailVerdict {
    entails_with(p, q, canon::DEFAULT_VAR_CAP)
}

pub fn entails_with(p: &Assertion, q: &Assertion, cap: usize) -> EntailVerdict {
    if p.disjuncts_subset_of(q) {
        return EntailVerdict::Holds;
    }
    let mut fresh = FreshNames::new(p.all_vars().into_iter().chain(q.all_vars()).collect());
    let qfv = q.fv();
    let max_binders = q.disjuncts.iter().map(|d| d.binders.len()).max().unwrap_or(0);
    for d in &p.disjuncts {
        let body = skolemize(d, &mut fresh);
        let mut vars = body.fv();
        vars.extend(qfv.iter().cloned());
        let cases = match canon::ca_over(&body, &vars, cap) {
            Ok(c) => c,
            Err(e @ CanonError::CapExceeded { .. }) => return EntailVerdict::Unknown(e.to_string()),
        };
        for psi in cases {
            let (model, n) = canonical_model(&psi, &vars).expect("case analysis keeps satisfiable cases");
            let dom = DomainSpec::new(n + max_binders as u8, psi.spatial().len());
            if !q.disjuncts.iter().any(|phi| satisfies_quantified(&dom, &model, phi)) {
                // forget the skolem constants so the state satisfies `P` itself
                let mut keep = p.fv();
                keep.extend(qfv.iter().cloned());
                let mut st = model.clone();
                for v in vars.iter().filter(|v| !keep.contains(*v)) {
                    st.store.set(v, crate::semantics::Value::Null);
                }
                let dom = DomainSpec::new((n + max_binders as u8).max(1), psi.spatial().len());
                debug_assert!(satisfies(&dom, &st, p), "counterexample must satisfy the antecedent");
                return EntailVerdict::Fails {
                    counterexample: st,
                    domain: dom,
                };
            }
        }
    }
    EntailVerdict::Holds
}

/// Renames the binders to fresh free variables.
fn skolemize(d: &QuantifiedHeap, fresh: &mut FreshNames) -> SymbolicHeap {
    let mut body = d.body.clone();
    for b in &d.binders {
        let s = fresh.fresh(b);
        body = body.rename(b, &s);
    }
    body
}

/// `ψ ⊨ φ` for a quantifier-free antecedent.
pub fn entails_sh(psi: &SymbolicHeap, phi: &QuantifiedHeap) -> bool {
    entails(&psi.clone().into(), &phi.clone().into()).holds()
}

/// No state of the domain (heaps capped at `max_cells`) satisfies `P`
/// without satisfying `Q`.
pub fn entails_oracle(p: &Assertion, q: &Assertion, dom: &DomainSpec) -> bool {
    oracle_counterexample(p, q, dom).is_none()
}

pub fn oracle_counterexample(p: &Assertion, q: &Assertion, dom: &DomainSpec) -> Option<State> {
    let mut vars = p.fv();
    vars.extend(q.fv());
    models(dom, p, &vars)
        .into_iter()
        .filter(|s| s.heap.len() <= dom.max_cells)
        .find(|s| !satisfies(dom, s, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_assertion;
    use crate::semantics::{Cell, Value};

    fn a(s: &str) -> Assertion {
        parse_assertion(s).unwrap()
    }

    #[test]
    fn basic_verdicts() {
        let p = a("x -> y * y -/>");
        assert!(entails(&p, &p).holds());
        assert!(entails(&Assertion::false_(), &a("x -> null")).holds());
        assert!(entails(&a("x != null * x -> null"), &a("exists v . x -> v")).holds());
        assert!(!entails(&a("emp"), &a("x -> null")).holds());
        assert!(entails(&a("x == y * x != null * y != null * y -/>"), &a("x -/>")).holds());
    }

    #[test]
    fn points_to_does_not_entail_dealloc() {
        match entails(&a("x -> null"), &a("x -/>")) {
            EntailVerdict::Fails { counterexample, domain } => {
                assert_eq!(domain.locations, 1);
                assert_eq!(counterexample.store.get(&Var::new("x")), Value::Loc(1));
                assert_eq!(counterexample.heap.get(1), Some(Cell::Val(Value::Null)));
            }
            v => panic!("expected failure, got {v:?}"),
        }
    }

    #[test]
    fn oracle_examples() {
        let dom = DomainSpec::new(2, 2);
        assert!(entails_oracle(
            &a("x -> null \\/ x -/>"),
            &a("exists v . x -> v \\/ x -/>"),
            &dom
        ));
        assert!(!entails_oracle(&a("emp"), &Assertion::false_(), &dom));
    }

    #[test]
    fn binders_need_fresh_values() {
        // a fresh location distinct from x and y always exists
        assert!(entails(&a("x -> y"), &a("exists a . x -> y * a != x * a != y * a != null")).holds());
        assert!(!entails(&a("x -> y"), &a("exists a . x -> a * a != y")).holds());
        assert!(entails(&a("x -> y"), &a("exists a . x -> a")).holds());
    }
}
