//! Validity of `[P] C [ε: Q]`: every `Q`-state must be reachable. Decided
//! by `Q ⊨ wpo(P, C, ε)`, with execution over a finite domain to replay
//! refutations or to settle what the entailment procedure cannot.

use std::fmt;

use thiserror::Error;

use crate::canon::CanonError;
use crate::entail::{entails_with, EntailVerdict};
use crate::semantics::{
    brute_counterexample, brute_wpo_over, predecessors, satisfies, triple_vars, DomainExhausted, DomainSpec, State,
};
use crate::syntax::*;
use crate::wpo::{wpo, WpoConfig, WpoError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Evidence {
    /// `Q ⊨ wpo`. `bound_relative` when some loop was unrolled to the
    /// bound without reaching a fixpoint.
    ByEntailment { bound_relative: bool },
    /// The entailment was undecided; exhaustive execution over the domain.
    ByBruteForce(DomainSpec),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    /// Refuted only up to the loop bound.
    LoopBound(usize),
    VarCap(CanonError),
    DomainExhausted(DomainExhausted),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TripleVerdict {
    Valid(Evidence),
    /// `witness ⊨ Q` but no `P`-state reaches it.
    Invalid {
        witness: State,
        domain: DomainSpec,
        reason: String,
    },
    Unknown(UnknownReason),
}

impl TripleVerdict {
    pub fn exit_code(&self) -> i32 {
        match self {
            TripleVerdict::Valid(_) => 0,
            TripleVerdict::Invalid { .. } => 1,
            TripleVerdict::Unknown(_) => 2,
        }
    }
}

impl fmt::Display for TripleVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TripleVerdict::Valid(Evidence::ByEntailment { bound_relative: false }) => f.write_str("valid"),
            TripleVerdict::Valid(Evidence::ByEntailment { bound_relative: true }) => {
                f.write_str("valid (loops unrolled to the bound without a fixpoint)")
            }
            TripleVerdict::Valid(Evidence::ByBruteForce(d)) => {
                write!(f, "valid over {} locations (entailment undecided)", d.locations)
            }
            TripleVerdict::Invalid { reason, .. } => write!(f, "invalid: {reason}"),
            TripleVerdict::Unknown(UnknownReason::LoopBound(b)) => {
                write!(f, "unknown: refuted only within {b} loop iterations")
            }
            TripleVerdict::Unknown(UnknownReason::VarCap(e)) => write!(f, "unknown: {e}"),
            TripleVerdict::Unknown(UnknownReason::DomainExhausted(e)) => write!(f, "unknown: {e}"),
        }
    }
}

/// Domain overrides; unset fields are sized from the triple.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct DomainOverride {
    pub locations: Option<u8>,
    pub max_cells: Option<usize>,
}

/// A domain large enough for the triple's states: one location per
/// variable and quantified variable, one per allocation site, one spare.
/// Never smaller than the spatial atoms of `P` and `Q` plus allocation
/// sites plus one.
pub fn auto_domain(t: &Triple, ov: DomainOverride) -> DomainSpec {
    let binders = |a: &Assertion| a.disjuncts.iter().map(|d| d.binders.len()).max().unwrap_or(0);
    let spatial = t.pre.max_spatial() + t.post.max_spatial();
    let allocs = t.cmd.desugar().alloc_sites();
    let by_vars = triple_vars(t).len() + binders(&t.pre).max(binders(&t.post)) + allocs + 1;
    let by_atoms = spatial + allocs + 1;
    let locations = ov
        .locations
        .unwrap_or(by_vars.max(by_atoms).min(u8::MAX as usize) as u8);
    let max_cells = ov.max_cells.unwrap_or(spatial + allocs);
    DomainSpec::new(locations, max_cells)
}

pub fn check_triple(t: &Triple, cfg: &WpoConfig, ov: DomainOverride) -> TripleVerdict {
    let cmd = t.cmd.desugar();
    let t = &Triple::new(t.pre.clone(), cmd, t.exit, t.post.clone());
    let w = match wpo(&t.pre, &t.cmd, t.exit, cfg) {
        Ok(w) => w,
        Err(WpoError::Canon(e)) => return TripleVerdict::Unknown(UnknownReason::VarCap(e)),
        Err(e @ WpoError::NotCanonical { .. }) => unreachable!("wpo canonicalizes first: {e}"),
    };
    let dom = auto_domain(t, ov);
    match entails_with(&t.post, &w.post, cfg.var_cap) {
        EntailVerdict::Holds => TripleVerdict::Valid(Evidence::ByEntailment {
            bound_relative: w.truncated,
        }),
        EntailVerdict::Unknown(_) => match brute_counterexample(&dom, t, cfg.loop_bound) {
            Ok(None) => TripleVerdict::Valid(Evidence::ByBruteForce(dom)),
            Ok(Some(s)) if !w.truncated => invalid(s, dom, "no precondition state reaches it"),
            Ok(Some(_)) => TripleVerdict::Unknown(UnknownReason::LoopBound(cfg.loop_bound)),
            Err(e) => TripleVerdict::Unknown(UnknownReason::DomainExhausted(e)),
        },
        EntailVerdict::Fails { .. } if w.truncated => TripleVerdict::Unknown(UnknownReason::LoopBound(cfg.loop_bound)),
        EntailVerdict::Fails { counterexample, domain } => {
            // replay the entailment counterexample, then fall back to a search
            let room = DomainSpec::new(
                domain.locations.max(1) + t.cmd.alloc_sites() as u8,
                dom.max_cells.max(domain.max_cells),
            );
            if replays(t, &counterexample, &room, cfg.loop_bound) == Ok(true) {
                return invalid(counterexample, room, "the postcondition state is unreachable");
            }
            match brute_counterexample(&dom, t, cfg.loop_bound) {
                Ok(Some(s)) => invalid(s, dom, "no precondition state reaches it"),
                Ok(None) => TripleVerdict::Unknown(UnknownReason::DomainExhausted(DomainExhausted {
                    locations: dom.locations,
                })),
                Err(e) => TripleVerdict::Unknown(UnknownReason::DomainExhausted(e)),
            }
        }
    }
}

fn invalid(witness: State, domain: DomainSpec, reason: &str) -> TripleVerdict {
    TripleVerdict::Invalid {
        witness,
        domain,
        reason: reason.to_string(),
    }
}

/// `s ⊨ Q` and no `P`-state of the domain reaches `s`.
pub fn replays(t: &Triple, s: &State, dom: &DomainSpec, loop_bound: usize) -> Result<bool, DomainExhausted> {
    if !satisfies(dom, s, &t.post) {
        return Ok(false);
    }
    let vars = triple_vars(t);
    let reach = brute_wpo_over(dom, &t.pre, &t.cmd, t.exit, loop_bound, &vars, Default::default())?;
    Ok(!reach.contains(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WitnessError {
    #[error("the state does not satisfy the postcondition")]
    NotInPost,
    #[error(transparent)]
    DomainExhausted(#[from] DomainExhausted),
}

/// A `P`-state from which `C` reaches `target` with exit `ε`.
pub fn find_witness(
    t: &Triple,
    target: &State,
    dom: &DomainSpec,
    loop_bound: usize,
) -> Result<Option<State>, WitnessError> {
    if !satisfies(dom, target, &t.post) {
        return Err(WitnessError::NotInPost);
    }
    let t = Triple::new(t.pre.clone(), t.cmd.desugar(), t.exit, t.post.clone());
    Ok(predecessors(dom, &t, target, loop_bound)?.into_iter().next())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_triple;
    use crate::semantics::{Cell, Heap, Store, Value};

    fn verdict(s: &str) -> TripleVerdict {
        check_triple(
            &parse_triple(s).unwrap(),
            &WpoConfig::default(),
            DomainOverride::default(),
        )
    }

    #[test]
    fn examples() {
        assert!(matches!(
            verdict("[ exists v . x -> v ] free(x) [ ok: x -/> ]"),
            TripleVerdict::Valid(_)
        ));
        assert!(matches!(
            verdict("[ x -> null ] skip [ ok: false ]"),
            TripleVerdict::Valid(_)
        ));
        match verdict("[ emp * x -> null ] free(x) [ er: emp * x -> null ]") {
            TripleVerdict::Invalid { witness, .. } => {
                let x = Var::new("x");
                let want = State::new(
                    Store::new().with(&x, Value::Loc(1)),
                    Heap::new().with(1, Cell::Val(Value::Null)),
                );
                assert_eq!(witness, want);
                assert_eq!(witness.display_over(&[x].into()).to_string(), "{x=l1} | {l1=null}");
            }
            v => panic!("expected invalid, got {v:?}"),
        }
    }

    #[test]
    fn witnesses_go_backwards() {
        let t = parse_triple("[ exists v . x -> v ] free(x) [ ok: x -/> ]").unwrap();
        let x = Var::new("x");
        let target = State::new(Store::new().with(&x, Value::Loc(1)), Heap::new().with(1, Cell::Dealloc));
        let dom = DomainSpec::new(2, 2);
        let pre = find_witness(&t, &target, &dom, 2).unwrap().unwrap();
        assert!(matches!(pre.heap.get(1), Some(Cell::Val(_))));
        let none = parse_triple("[ false ] free(x) [ ok: x -/> ]").unwrap();
        assert_eq!(find_witness(&none, &target, &dom, 2), Ok(None));
        assert_eq!(
            find_witness(&t, &State::default(), &dom, 2),
            Err(WitnessError::NotInPost)
        );
    }
}
