//! Weakest postconditions computed symbolically, optionally together with
//! a derivation of `[P] C [ε: WPO]`.
//!
//! The heap commands need their precondition split into aliasing cases
//! first; [`wpo`] does that before `free`, loads and stores and then works
//! disjunct by disjunct with [`wpo_sh`]. Plain [`wpo`] only decides the
//! aliasing among operands and allocated cells
//! ([`ca_partial`](crate::canon::ca_partial)); [`synthesize`] uses the full
//! [`cano`](crate::canon::cano_with) because the heap rules ask for
//! canonical preconditions.

use thiserror::Error;

use crate::canon::{self, aliases, CanonError};
use crate::entail::entails_with;
use crate::proof::{union, Branch, DerivationNode, RuleName, SideData};
use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct WpoConfig {
    /// Iterations of `C⋆` unrolled at most.
    pub loop_bound: usize,
    pub var_cap: usize,
    /// Stop unrolling once an iteration adds nothing new.
    pub fixpoint: bool,
    /// Drop unsatisfiable disjuncts and eliminate binders fixed by an
    /// equality.
    pub prune: bool,
}

impl Default for WpoConfig {
    fn default() -> Self {
        WpoConfig {
            loop_bound: 4,
            var_cap: canon::DEFAULT_VAR_CAP,
            fixpoint: true,
            prune: true,
        }
    }
}

impl WpoConfig {
    pub fn with_loop_bound(self, loop_bound: usize) -> Self {
        WpoConfig { loop_bound, ..self }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum WpoError {
    #[error("`{cmd}` needs a precondition that decides the aliasing of its operands, got `{heap}`")]
    NotCanonical { cmd: String, heap: String },
    #[error(transparent)]
    Canon(#[from] CanonError),
}

#[derive(Clone, Debug)]
pub struct WpoOutput {
    pub post: Assertion,
    /// Some loop was cut off at the bound before reaching a fixpoint, so
    /// the result is exact only for the bounded semantics.
    pub truncated: bool,
}

/// `WPO⟦P, C, ε⟧`. Sugar is desugared first.
pub fn wpo(p: &Assertion, c: &Command, exit: ExitCondition, cfg: &WpoConfig) -> Result<WpoOutput, WpoError> {
    let c = c.desugar();
    let mut e = Engine::new(*cfg, false, p.all_vars().into_iter().chain(c.all_vars()).collect());
    let (post, _) = e.wpo(p, &c, exit)?;
    Ok(WpoOutput {
        post,
        truncated: e.truncated,
    })
}

/// [`wpo`] together with a derivation of `[P] desugar(C) [ε: WPO]`.
pub fn synthesize(
    p: &Assertion,
    c: &Command,
    exit: ExitCondition,
    cfg: &WpoConfig,
) -> Result<(WpoOutput, DerivationNode), WpoError> {
    let c = c.desugar();
    let mut e = Engine::new(*cfg, true, p.all_vars().into_iter().chain(c.all_vars()).collect());
    let (post, d) = e.wpo(p, &c, exit)?;
    Ok((
        WpoOutput {
            post,
            truncated: e.truncated,
        },
        d.expect("derivations were requested"),
    ))
}

/// `WPO⟦ψ, C, ε⟧` for one heap, without the outer case split. The heap
/// commands require `ψ` to decide the aliasing among their operands and
/// the sources of `ψ`'s spatial atoms.
pub fn wpo_sh(psi: &SymbolicHeap, c: &Command, exit: ExitCondition, cfg: &WpoConfig) -> Result<Assertion, WpoError> {
    let c = c.desugar();
    let mut vars = psi.fv();
    vars.extend(c.all_vars());
    let mut e = Engine::new(*cfg, false, vars);
    Ok(e.wpo_sh(psi, &c, exit)?.0)
}

type Out = (Assertion, Option<DerivationNode>);

struct Engine {
    cfg: WpoConfig,
    fresh: FreshNames,
    proofs: bool,
    truncated: bool,
}

/// Whether `wpo_sh` meets a heap command before `wpo` gets another chance
/// to split cases, so the precondition must be canonical now.
fn splits_first(c: &Command) -> bool {
    match c {
        Command::Free(_) | Command::Load(..) | Command::Store(..) => true,
        Command::Seq(a, _) => splits_first(a),
        Command::Choice(a, b) => splits_first(a) || splits_first(b),
        _ => false,
    }
}

fn heap_assertion(psi: &SymbolicHeap) -> Assertion {
    psi.clone().into()
}

impl Engine {
    fn new(cfg: WpoConfig, proofs: bool, used: VarSet) -> Self {
        Engine {
            cfg,
            fresh: FreshNames::new(used),
            proofs,
            truncated: false,
        }
    }

    fn axiom(
        &self,
        rule: RuleName,
        pre: &SymbolicHeap,
        c: &Command,
        exit: ExitCondition,
        post: &Assertion,
        side: SideData,
    ) -> Option<DerivationNode> {
        self.proofs.then(|| {
            DerivationNode::axiom(
                rule,
                Triple::new(heap_assertion(pre), c.clone(), exit, post.clone()),
                side,
            )
        })
    }

    fn wpo(&mut self, p: &Assertion, c: &Command, exit: ExitCondition) -> Result<Out, WpoError> {
        let cp = if splits_first(c) && self.proofs {
            canon::cano_with(p, c, self.cfg.var_cap, &mut self.fresh)?
        } else if splits_first(c) {
            // Without a derivation to check, deciding the aliasing among
            // the operands and the allocated cells is enough.
            let cfv = c.fv();
            let mut out = Vec::new();
            for d in &p.disjuncts {
                let d = d.freshen_binders(&cfv, &mut self.fresh);
                let mut vars: VarSet = d.body.spatial().iter().map(|a| a.source().clone()).collect();
                vars.extend(cfv.iter().cloned());
                for phi in canon::ca_partial(&d.body, &vars, self.cfg.var_cap)? {
                    out.push(QuantifiedHeap::new(d.binders.clone(), phi));
                }
            }
            Assertion::new(out)
        } else {
            let cfv = c.fv();
            Assertion::new(
                p.disjuncts
                    .iter()
                    .map(|d| d.freshen_binders(&cfv, &mut self.fresh))
                    .collect(),
            )
        };
        let mut parts = Vec::with_capacity(cp.disjuncts.len());
        let mut proofs = Vec::new();
        for d in &cp.disjuncts {
            self.fresh.reserve(d.binders.iter().cloned());
            let (a, pf) = self.wpo_sh(&d.body, c, exit)?;
            parts.push(a.exists_all(&d.binders));
            if let Some(mut pf) = pf {
                for b in d.binders.iter().rev() {
                    pf = DerivationNode::exist(b, pf);
                }
                proofs.push(pf);
            }
        }
        let raw = Assertion::new(parts.into_iter().flat_map(|a| a.disjuncts).collect());
        let post = if self.cfg.prune { prune(&raw) } else { raw.clone() };
        let proof = self.proofs.then(|| {
            let d = DerivationNode::disj(c.clone(), exit, proofs);
            if d.conclusion.pre.same_disjuncts(p) && d.conclusion.post.same_disjuncts(&post) {
                d
            } else {
                DerivationNode::cons(p.clone(), post.clone(), d)
            }
        });
        Ok((post, proof))
    }

    fn require_canonical(&self, psi: &SymbolicHeap, c: &Command, operands: &[&Var]) -> Result<(), WpoError> {
        let mut vars: VarSet = psi.spatial().iter().map(|a| a.source().clone()).collect();
        vars.extend(operands.iter().map(|v| (*v).clone()));
        if canon::is_canonical(psi, &vars) {
            Ok(())
        } else {
            Err(WpoError::NotCanonical {
                cmd: c.to_string(),
                heap: psi.to_string(),
            })
        }
    }

    /// The points-to atom `y ↦ t` of `ψ` with `y` equal to `x`, if any.
    fn find_cell(psi: &SymbolicHeap, x: &Var) -> Option<(Var, Term)> {
        let mut al = aliases(x, psi);
        al.insert(x.clone());
        psi.spatial().iter().find_map(|a| match a {
            SpatialAtom::PointsTo(y, t) if al.contains(y) => Some((y.clone(), t.clone())),
            _ => None,
        })
    }

    fn wpo_sh(&mut self, psi: &SymbolicHeap, c: &Command, exit: ExitCondition) -> Result<Out, WpoError> {
        use ExitCondition::{Er, Ok as OkE};
        let f = Assertion::false_();
        let same = heap_assertion(psi);
        Ok(match c {
            Command::Skip => {
                let post = if exit == OkE { same } else { f };
                let pf = self.axiom(RuleName::Skip, psi, c, exit, &post, SideData::None);
                (post, pf)
            }
            Command::Error => {
                let post = if exit == Er { same } else { f };
                let pf = self.axiom(RuleName::Error, psi, c, exit, &post, SideData::None);
                (post, pf)
            }
            Command::Assume(b) => {
                let post = if exit == OkE { heap_assertion(&psi.star(b)) } else { f };
                let pf = self.axiom(RuleName::Assume, psi, c, exit, &post, SideData::None);
                (post, pf)
            }
            Command::Assign(x, t) => {
                let post = if exit == OkE {
                    let x1 = self.fresh.fresh(x);
                    let body = psi
                        .rename(x, &x1)
                        .with_pure(PureAtom::eq(x.clone(), t.subst(x, &Term::Var(x1.clone()))));
                    QuantifiedHeap::new(vec![x1], body).into()
                } else {
                    f
                };
                let pf = self.axiom(RuleName::Assign, psi, c, exit, &post, SideData::None);
                (post, pf)
            }
            Command::Havoc(x) => {
                let post = if exit == OkE {
                    let x1 = self.fresh.fresh(x);
                    QuantifiedHeap::new(vec![x1.clone()], psi.rename(x, &x1)).into()
                } else {
                    f
                };
                let pf = self.axiom(RuleName::Havoc, psi, c, exit, &post, SideData::None);
                (post, pf)
            }
            Command::Alloc(x) => self.alloc(psi, c, x, exit)?,
            Command::Free(x) => {
                self.require_canonical(psi, c, &[x])?;
                match Self::find_cell(psi, x) {
                    Some((y, t)) => {
                        let post = if exit == OkE {
                            let rest = psi
                                .remove_spatial(&SpatialAtom::PointsTo(y.clone(), t))
                                .expect("cell found above");
                            heap_assertion(&rest.with_spatial(SpatialAtom::NegPoints(y.clone())))
                        } else {
                            f
                        };
                        let pf = self.axiom(RuleName::Free, psi, c, exit, &post, SideData::Alias(y));
                        (post, pf)
                    }
                    None => {
                        let post = if exit == Er { same } else { f };
                        let pf = self.axiom(RuleName::FreeEr, psi, c, exit, &post, SideData::None);
                        (post, pf)
                    }
                }
            }
            Command::Load(x, y) => {
                self.require_canonical(psi, c, &[y])?;
                match Self::find_cell(psi, y) {
                    Some((z, t)) => {
                        let post = if exit == OkE {
                            let x1 = self.fresh.fresh(x);
                            let x1t = Term::Var(x1.clone());
                            let body = psi.rename(x, &x1).with_pure(PureAtom::eq(x.clone(), t.subst(x, &x1t)));
                            QuantifiedHeap::new(vec![x1], body).into()
                        } else {
                            f
                        };
                        let pf = self.axiom(RuleName::Load, psi, c, exit, &post, SideData::Alias(z));
                        (post, pf)
                    }
                    None => {
                        let post = if exit == Er { same } else { f };
                        let pf = self.axiom(RuleName::LoadEr, psi, c, exit, &post, SideData::None);
                        (post, pf)
                    }
                }
            }
            Command::Store(x, t) => {
                self.require_canonical(psi, c, &[x])?;
                match Self::find_cell(psi, x) {
                    Some((y, old)) => {
                        let post = if exit == OkE {
                            let rest = psi
                                .remove_spatial(&SpatialAtom::PointsTo(y.clone(), old))
                                .expect("cell found above");
                            heap_assertion(&rest.with_spatial(SpatialAtom::PointsTo(y.clone(), t.clone())))
                        } else {
                            f
                        };
                        let pf = self.axiom(RuleName::Store, psi, c, exit, &post, SideData::Alias(y));
                        (post, pf)
                    }
                    None => {
                        let post = if exit == Er { same } else { f };
                        let pf = self.axiom(RuleName::StoreEr, psi, c, exit, &post, SideData::None);
                        (post, pf)
                    }
                }
            }
            Command::Seq(c1, c2) => match exit {
                OkE => {
                    let (r, d1) = self.wpo_sh(psi, c1, OkE)?;
                    let (w, d2) = self.wpo(&r, c2, OkE)?;
                    let pf = d1.zip(d2).map(|(a, b)| DerivationNode::seq2(a, b));
                    (w, pf)
                }
                Er => {
                    let (e1, d1e) = self.wpo_sh(psi, c1, Er)?;
                    let (r, d1o) = self.wpo_sh(psi, c1, OkE)?;
                    let (e2, d2e) = self.wpo(&r, c2, Er)?;
                    let pf = self.proofs.then(|| {
                        DerivationNode::disj(
                            c.clone(),
                            Er,
                            vec![
                                DerivationNode::seq1(d1e.unwrap(), (**c2).clone()),
                                DerivationNode::seq2(d1o.unwrap(), d2e.unwrap()),
                            ],
                        )
                    });
                    (union([e1, e2]), pf)
                }
            },
            Command::Choice(c1, c2) => {
                let (a1, d1) = self.wpo_sh(psi, c1, exit)?;
                let (a2, d2) = self.wpo_sh(psi, c2, exit)?;
                let pf = self.proofs.then(|| {
                    DerivationNode::disj(
                        c.clone(),
                        exit,
                        vec![
                            DerivationNode::choice(Branch::Left, d1.unwrap(), (**c2).clone()),
                            DerivationNode::choice(Branch::Right, d2.unwrap(), (**c1).clone()),
                        ],
                    )
                });
                (union([a1, a2]), pf)
            }
            Command::Local(x, body) => {
                let x1 = self.fresh.fresh(x);
                let x2 = self.fresh.fresh(x);
                let (w, d) = self.wpo(&heap_assertion(&psi.rename(x, &x1)), body, exit)?;
                // x (the local) becomes x2, x1 (the outer x) becomes x again
                let w = w.swap(x, &x2).swap(&x1, x);
                let post = w.exists(&x2);
                let pf = d.map(|d| {
                    let d = d.swap(x, &x2).swap(&x1, x);
                    let concl = Triple::new(same.clone(), c.clone(), exit, post.clone());
                    DerivationNode::new(RuleName::Local, concl, vec![d], SideData::Var(x2.clone()))
                });
                (post, pf)
            }
            Command::Star(body) => self.star(psi, c, body, exit)?,
            Command::If(..) | Command::While(..) | Command::Assert(_) | Command::Malloc(_) => {
                return self.wpo_sh(psi, &c.desugar(), exit);
            }
        })
    }

    fn alloc(&mut self, psi: &SymbolicHeap, c: &Command, x: &Var, exit: ExitCondition) -> Result<Out, WpoError> {
        if exit == ExitCondition::Er {
            let post = Assertion::false_();
            let pf = self.axiom(RuleName::Alloc1, psi, c, exit, &post, SideData::None);
            return Ok((post, pf));
        }
        let x1 = self.fresh.fresh(x);
        let v = self.fresh.fresh(&Var::new("v"));
        let xt = Term::Var(x.clone());
        let vt = Term::Var(v.clone());
        let moved = psi.rename(x, &x1);
        let first: Assertion = QuantifiedHeap::new(
            vec![x1.clone(), v.clone()],
            moved.clone().with_spatial(SpatialAtom::PointsTo(x.clone(), vt.clone())),
        )
        .into();
        let mut posts = vec![first.clone()];
        let mut proofs = Vec::new();
        if self.proofs {
            proofs.push(DerivationNode::axiom(
                RuleName::Alloc1,
                Triple::new(heap_assertion(psi), c.clone(), exit, first),
                SideData::None,
            ));
        }
        // reuse of a deallocated cell: that cell is the new x
        for a in psi.spatial() {
            let SpatialAtom::NegPoints(y) = a else { continue };
            let y1 = if y == x { x1.clone() } else { y.clone() };
            let body = moved
                .remove_spatial(&SpatialAtom::NegPoints(y1.clone()))
                .expect("renamed atom is present")
                .with_spatial(SpatialAtom::PointsTo(y1.clone(), vt.clone()))
                .with_pure(PureAtom::eq(xt.clone(), y1.clone()));
            let post: Assertion = QuantifiedHeap::new(vec![x1.clone(), v.clone()], body).into();
            if self.proofs {
                let rest = psi.remove_spatial(a).expect("atom of psi").rename(x, &x1);
                let rule_post: Assertion = QuantifiedHeap::new(
                    vec![x1.clone(), v.clone()],
                    rest.with_spatial(SpatialAtom::PointsTo(x.clone(), vt.clone()))
                        .with_pure(PureAtom::eq(xt.clone(), y1.clone())),
                )
                .into();
                let ax = DerivationNode::axiom(
                    RuleName::Alloc2,
                    Triple::new(heap_assertion(psi), c.clone(), exit, rule_post),
                    SideData::Alias(y.clone()),
                );
                proofs.push(DerivationNode::cons(heap_assertion(psi), post.clone(), ax));
            }
            posts.push(post);
        }
        let post = union(posts);
        let pf = self.proofs.then(|| DerivationNode::disj(c.clone(), exit, proofs));
        Ok((post, pf))
    }

    /// `Υ(0) = ψ`, `Υ(n+1) = WPO⟦Υ(n), C, ok⟧` for at most `steps`
    /// iterations. Returns the iterates, the derivations of each step that
    /// is kept, and whether the sequence provably stopped growing.
    fn iterates(
        &mut self,
        psi: &SymbolicHeap,
        body: &Command,
        steps: usize,
    ) -> Result<(Vec<Assertion>, Vec<DerivationNode>, bool), WpoError> {
        let mut ups = vec![heap_assertion(psi)];
        let mut proofs = Vec::new();
        for _ in 0..steps {
            let last = ups.last().expect("nonempty");
            let (next, mut d) = self.wpo(last, body, ExitCondition::Ok)?;
            let next = if self.cfg.fixpoint {
                // States of a disjunct already covered by an earlier iterate
                // reach nothing new, so it can leave the frontier.
                let seen = Assertion::new(ups.iter().flat_map(|u| u.disjuncts.clone()).collect());
                let kept: Vec<QuantifiedHeap> = next
                    .disjuncts
                    .iter()
                    .filter(|q| !entails_with(&Assertion::from((*q).clone()), &seen, self.cfg.var_cap).holds())
                    .cloned()
                    .collect();
                if kept.is_empty() {
                    return Ok((ups, proofs, true));
                }
                let kept = Assertion::new(kept);
                if kept.disjuncts.len() != next.disjuncts.len() {
                    d = d.map(|p| DerivationNode::cons(last.clone(), kept.clone(), p));
                }
                kept
            } else {
                next
            };
            ups.push(next);
            proofs.extend(d);
        }
        Ok((ups, proofs, false))
    }

    fn variant(&self, c: &Command, ups: &[Assertion], steps: Vec<DerivationNode>) -> DerivationNode {
        let concl = Triple::new(ups[0].clone(), c.clone(), ExitCondition::Ok, union(ups.iter().cloned()));
        DerivationNode::new(
            RuleName::BackwardsVariant,
            concl,
            steps,
            SideData::Variant(ups.to_vec()),
        )
    }

    fn star(&mut self, psi: &SymbolicHeap, c: &Command, body: &Command, exit: ExitCondition) -> Result<Out, WpoError> {
        let bound = self.cfg.loop_bound;
        match exit {
            ExitCondition::Ok => {
                let (ups, steps, fixed) = self.iterates(psi, body, bound)?;
                self.truncated |= !fixed;
                let pf = self.proofs.then(|| self.variant(c, &ups, steps));
                Ok((union(ups), pf))
            }
            ExitCondition::Er => {
                if bound == 0 {
                    self.truncated = true;
                    let post = Assertion::false_();
                    let pf = self.axiom(RuleName::LoopZero, psi, c, exit, &post, SideData::None);
                    return Ok((post, pf));
                }
                let (ups, steps, fixed) = self.iterates(psi, body, bound - 1)?;
                self.truncated |= !fixed;
                let mut errs = Vec::with_capacity(ups.len());
                let mut err_proofs = Vec::new();
                for u in &ups {
                    let (e, d) = self.wpo(u, body, ExitCondition::Er)?;
                    errs.push(e);
                    err_proofs.extend(d);
                }
                let post = union(errs);
                let pf = self.proofs.then(|| {
                    let bv = self.variant(c, &ups, steps);
                    let last = DerivationNode::disj(body.clone(), ExitCondition::Er, err_proofs);
                    let last = if last.conclusion.pre.same_disjuncts(&bv.conclusion.post) {
                        last
                    } else {
                        // some iterate was empty and contributed no premise
                        DerivationNode::cons(bv.conclusion.post.clone(), post.clone(), last)
                    };
                    DerivationNode::loop_non_zero(DerivationNode::seq2(bv, last))
                });
                Ok((post, pf))
            }
        }
    }
}

/// Drops unsatisfiable and duplicate disjuncts, substitutes away binders
/// equated to another term, and forgets unused binders. The result is
/// equivalent to the input.
pub fn prune(a: &Assertion) -> Assertion {
    let mut out = Vec::new();
    for d in &a.disjuncts {
        if let Some(d) = simplify(d) {
            out.push(d);
        }
    }
    union([Assertion::new(out)])
}

fn simplify(d: &QuantifiedHeap) -> Option<QuantifiedHeap> {
    let mut binders = d.binders.clone();
    let mut body = d.body.clone();
    loop {
        let pick = body.pure().iter().find_map(|a| {
            if a.kind() != PureKind::Eq {
                return None;
            }
            let is_b = |t: &Term| t.as_var().is_some_and(|v| binders.contains(v));
            if is_b(a.rhs()) {
                Some((a.rhs().as_var().unwrap().clone(), a.lhs().clone()))
            } else if is_b(a.lhs()) {
                Some((a.lhs().as_var().unwrap().clone(), a.rhs().clone()))
            } else {
                None
            }
        });
        let Some((b, t)) = pick else { break };
        // null cannot be substituted into a points-to source
        body = body.subst(&b, &t).ok()?;
        binders.retain(|v| v != &b);
    }
    if !canon::satisfiable(&body) {
        return None;
    }
    let fv = body.fv();
    binders.retain(|v| fv.contains(v));
    Some(QuantifiedHeap::new(binders, body))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_assertion, parse_command, parse_heap};

    fn h(s: &str) -> SymbolicHeap {
        parse_heap(s).unwrap()
    }

    #[test]
    fn free_on_canonical_cases() {
        let cfg = WpoConfig::default();
        let c = parse_command("free(x)").unwrap();
        let ok = wpo_sh(
            &h("x == y * x != null * y != null * y -> e"),
            &c,
            ExitCondition::Ok,
            &cfg,
        )
        .unwrap();
        assert_eq!(ok.to_string(), "x == y * x != null * y != null * y -/>");
        let er_in = h("x != y * x != null * y != null * y -> e");
        let er = wpo_sh(&er_in, &c, ExitCondition::Er, &cfg).unwrap();
        assert_eq!(er, Assertion::from(er_in.clone()));
        assert!(wpo_sh(&er_in, &c, ExitCondition::Ok, &cfg).unwrap().is_false());
    }

    #[test]
    fn heap_commands_reject_undecided_aliasing() {
        let c = parse_command("free(x)").unwrap();
        let r = wpo_sh(&h("y -> e"), &c, ExitCondition::Ok, &WpoConfig::default());
        assert!(matches!(r, Err(WpoError::NotCanonical { .. })));
    }

    #[test]
    fn prune_eliminates_fixed_binders() {
        let a = parse_assertion("exists a b . a == x * b == null * a -> b \\/ exists c . c == null * c -> x").unwrap();
        assert_eq!(prune(&a).to_string(), "x -> null");
    }

    fn agrees_with_execution(p: &str, c: &str) {
        use crate::semantics::{brute_wpo_over, models, DomainSpec};
        let cfg = WpoConfig {
            loop_bound: 2,
            fixpoint: false,
            ..WpoConfig::default()
        };
        let dom = DomainSpec::new(3, 3);
        let p = parse_assertion(p).unwrap();
        let c = parse_command(c).unwrap();
        let mut vars = p.fv();
        vars.extend(c.fv());
        for exit in ExitCondition::ALL {
            let w = wpo(&p, &c, exit, &cfg).unwrap();
            let brute = brute_wpo_over(&dom, &p, &c.desugar(), exit, 2, &vars, Default::default()).unwrap();
            assert_eq!(models(&dom, &w.post, &vars), brute, "{exit}: {}", w.post);
            let (_, d) = synthesize(&p, &c, exit, &cfg).unwrap();
            crate::proof::check(&d).unwrap_or_else(|e| panic!("{e}\n{}", crate::proof::print_derivation(&d)));
        }
    }

    #[test]
    fn matches_bounded_execution() {
        agrees_with_execution("x == null", "x := y");
        agrees_with_execution("x -> y", "free(y)");
        agrees_with_execution("x -/> * y -> x", "x := alloc()");
        agrees_with_execution("x -/>", "x := alloc()");
        agrees_with_execution("x -> y * y -> null", "local x { x := [x] ; free(x) }");
        agrees_with_execution("x -> null", "star { choice { [x] := y } or { free(x) } }");
        agrees_with_execution("emp", "if (x == y) { error } else { y := malloc() }");
    }

    #[test]
    fn loops_reach_a_fixpoint() {
        let p = parse_assertion("x == null").unwrap();
        let w = wpo(
            &p,
            &parse_command("star { x := y }").unwrap(),
            ExitCondition::Ok,
            &WpoConfig::default(),
        )
        .unwrap();
        assert!(!w.truncated);
    }
}
