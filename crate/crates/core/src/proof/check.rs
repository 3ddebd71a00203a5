use thiserror::Error;

use super::{union, Branch, DerivationNode, RuleName, SideData};
use crate::canon::{aliases, is_canonical};
use crate::entail::{entails_with, EntailVerdict};
use crate::syntax::*;

/// Case-analysis cap used for the entailments of `Cons`; a little above
/// the default because derivations carry skolemized binders.
const CONS_VAR_CAP: usize = 9;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{rule} at node {}: {reason}", path_string(.path))]
pub struct CheckError {
    pub rule: RuleName,
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub reason: String,
}

fn path_string(p: &[usize]) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

/// Checks every node of the derivation.
pub fn check(d: &DerivationNode) -> Result<(), CheckError> {
    let mut path = Vec::new();
    check_at(d, &mut path)
}

fn check_at(d: &DerivationNode, path: &mut Vec<usize>) -> Result<(), CheckError> {
    let fail = |reason: String, path: &Vec<usize>| CheckError {
        rule: d.rule,
        path: path.clone(),
        reason,
    };
    if d.rule == RuleName::BackwardsVariant {
        // the unfolded chain nests each step in the next, so check its new
        // nodes one by one and the original premises once
        let expanded = expand_variant(d).map_err(|r| fail(r, path))?;
        let mut steps = vec![&expanded];
        for link in &expanded.premises {
            steps.push(link);
            steps.extend(link.premises.first());
        }
        for s in steps {
            check_step(s).map_err(|r| fail(format!("in the unfolded variant, {}: {r}", s.rule), path))?;
        }
    } else {
        check_step(d).map_err(|r| fail(r, path))?;
    }
    for (i, p) in d.premises.iter().enumerate() {
        path.push(i);
        check_at(p, path)?;
        path.pop();
    }
    Ok(())
}

type Step = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Step {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn same(what: &str, a: &Assertion, b: &Assertion) -> Step {
    ensure(a.same_disjuncts(b), || format!("{what}: expected `{b}`, found `{a}`"))
}

fn premises(d: &DerivationNode, n: usize) -> Step {
    ensure(d.premises.len() == n, || {
        format!("expected {n} premise(s), found {}", d.premises.len())
    })
}

fn entailment(a: &Assertion, b: &Assertion) -> Step {
    match entails_with(a, b, CONS_VAR_CAP) {
        EntailVerdict::Holds => Ok(()),
        EntailVerdict::Fails { counterexample, .. } => {
            Err(format!("`{a}` does not entail `{b}` (counterexample {counterexample})"))
        }
        EntailVerdict::Unknown(r) => Err(format!("cannot decide `{a}` |= `{b}`: {r}")),
    }
}

fn heap_pre(t: &Triple) -> Result<&SymbolicHeap, String> {
    t.pre
        .as_heap()
        .ok_or_else(|| format!("the precondition `{}` must be a single quantifier-free heap", t.pre))
}

fn is_false(t: &Triple) -> Step {
    ensure(t.post.is_false(), || {
        format!("the {} postcondition must be `false`", t.exit)
    })
}

/// Compares a one-disjunct postcondition `∃b⃗. body` against `expected`
/// built from the binder names actually used, which must avoid `avoid`.
fn quantified_post(post: &Assertion, n: usize, avoid: &VarSet, expected: impl FnOnce(&[Var]) -> SymbolicHeap) -> Step {
    let [d] = post.disjuncts.as_slice() else {
        return Err(format!("expected a single disjunct postcondition, found `{post}`"));
    };
    ensure(d.binders.len() == n, || {
        format!("expected {n} quantified variable(s) in `{post}`")
    })?;
    for b in &d.binders {
        ensure(!avoid.contains(b), || format!("quantified variable `{b}` is not fresh"))?;
    }
    let want = expected(&d.binders);
    ensure(d.body == want, || {
        format!("postcondition: expected `{want}`, found `{}`", d.body)
    })
}

fn canonical_for(psi: &SymbolicHeap, extra: &[&Var], extra_terms: &[&Term]) -> Step {
    let mut vars = psi.fv();
    vars.extend(extra.iter().map(|v| (*v).clone()));
    for t in extra_terms {
        vars.extend(t.fv());
    }
    ensure(is_canonical(psi, &vars), || {
        format!("`{psi}` does not decide every (dis)equality over its variables and the operands")
    })
}

/// The points-to atom at `side`'s alias of `x`, or none of the aliases
/// of `x` having one.
fn alias_cell(psi: &SymbolicHeap, x: &Var, side: &SideData) -> Result<Option<(Var, Term)>, String> {
    let mut al = aliases(x, psi);
    al.insert(x.clone());
    let cell = |y: &Var| {
        psi.spatial().iter().find_map(|a| match a {
            SpatialAtom::PointsTo(z, t) if z == y => Some(t.clone()),
            _ => None,
        })
    };
    match side {
        SideData::Alias(y) => {
            ensure(al.contains(y), || format!("`{y}` is not an alias of `{x}`"))?;
            let t = cell(y).ok_or_else(|| format!("no points-to atom with source `{y}`"))?;
            Ok(Some((y.clone(), t)))
        }
        SideData::None => Ok(al.iter().find_map(|y| cell(y).map(|t| (y.clone(), t)))),
        other => Err(format!("unexpected side data {other:?}")),
    }
}

/// Checks one inference step; premises are not checked.
pub fn check_step(d: &DerivationNode) -> Result<(), String> {
    use ExitCondition::{Er, Ok as OkE};
    let t = &d.conclusion;
    let ok = t.exit == OkE;
    match d.rule {
        RuleName::Skip => {
            premises(d, 0)?;
            ensure(t.cmd == Command::Skip, || "command must be `skip`".into())?;
            if ok {
                same("postcondition", &t.post, &t.pre)
            } else {
                is_false(t)
            }
        }
        RuleName::Error => {
            premises(d, 0)?;
            ensure(t.cmd == Command::Error, || "command must be `error()`".into())?;
            if ok {
                is_false(t)
            } else {
                same("postcondition", &t.post, &t.pre)
            }
        }
        RuleName::Seq1 => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let Command::Seq(c1, _) = &t.cmd else {
                return Err("command must be a sequence".into());
            };
            ensure(t.exit == Er && p.exit == Er, || "Seq1 concludes er triples only".into())?;
            ensure(p.cmd == **c1, || "premise command must be the first component".into())?;
            same("precondition", &t.pre, &p.pre)?;
            same("postcondition", &t.post, &p.post)
        }
        RuleName::Seq2 => {
            premises(d, 2)?;
            let (p1, p2) = (&d.premises[0].conclusion, &d.premises[1].conclusion);
            let Command::Seq(c1, c2) = &t.cmd else {
                return Err("command must be a sequence".into());
            };
            ensure(p1.cmd == **c1 && p2.cmd == **c2, || {
                "premise commands must be the components".into()
            })?;
            ensure(p1.exit == OkE, || "first premise must be an ok triple".into())?;
            ensure(p2.exit == t.exit, || {
                "second premise must share the exit condition".into()
            })?;
            same("precondition", &t.pre, &p1.pre)?;
            same("intermediate assertion", &p2.pre, &p1.post)?;
            same("postcondition", &t.post, &p2.post)
        }
        RuleName::LoopZero => {
            premises(d, 0)?;
            ensure(matches!(t.cmd, Command::Star(_)), || "command must be a loop".into())?;
            if ok {
                same("postcondition", &t.post, &t.pre)
            } else {
                is_false(t)
            }
        }
        RuleName::LoopNonZero => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let Command::Star(body) = &t.cmd else {
                return Err("command must be a loop".into());
            };
            ensure(p.cmd == Command::seq(t.cmd.clone(), (**body).clone()), || {
                "premise command must be the loop followed by its body".into()
            })?;
            ensure(p.exit == t.exit, || "exit conditions differ".into())?;
            same("precondition", &t.pre, &p.pre)?;
            same("postcondition", &t.post, &p.post)
        }
        RuleName::Cons => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            ensure(p.cmd == t.cmd && p.exit == t.exit, || {
                "premise must share command and exit".into()
            })?;
            entailment(&p.pre, &t.pre)?;
            entailment(&t.post, &p.post)
        }
        RuleName::Disj => {
            for p in &d.premises {
                let p = &p.conclusion;
                ensure(p.cmd == t.cmd && p.exit == t.exit, || {
                    "premises must share command and exit".into()
                })?;
            }
            let pre = union(d.premises.iter().map(|p| p.conclusion.pre.clone()));
            let post = union(d.premises.iter().map(|p| p.conclusion.post.clone()));
            same("precondition", &t.pre, &pre)?;
            same("postcondition", &t.post, &post)
        }
        RuleName::Choice => {
            let Command::Choice(c1, c2) = &t.cmd else {
                return Err("command must be a choice".into());
            };
            let expect: Vec<&Command> = match (&d.side, d.premises.len()) {
                (SideData::Branch(Branch::Left), 1) => vec![c1],
                (SideData::Branch(Branch::Right), 1) => vec![c2],
                (SideData::None, 2) => vec![c1, c2],
                _ => return Err("expected two premises, or one premise and a branch".into()),
            };
            for (p, c) in d.premises.iter().zip(expect) {
                let p = &p.conclusion;
                ensure(p.cmd == *c && p.exit == t.exit, || {
                    "premise must be a branch of the choice".into()
                })?;
                same("precondition", &t.pre, &p.pre)?;
                same("postcondition", &t.post, &p.post)?;
            }
            Ok(())
        }
        RuleName::Exist => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let SideData::Var(x) = &d.side else {
                return Err("missing the quantified variable".into());
            };
            ensure(!t.cmd.fv().contains(x), || format!("`{x}` is free in the command"))?;
            ensure(p.cmd == t.cmd && p.exit == t.exit, || {
                "premise must share command and exit".into()
            })?;
            same("precondition", &t.pre, &p.pre.exists(x))?;
            same("postcondition", &t.post, &p.post.exists(x))
        }
        RuleName::Assign => {
            premises(d, 0)?;
            let Command::Assign(x, e) = &t.cmd else {
                return Err("command must be an assignment".into());
            };
            let psi = heap_pre(t)?;
            if !ok {
                return is_false(t);
            }
            let mut avoid = psi.fv();
            avoid.insert(x.clone());
            avoid.extend(e.fv());
            quantified_post(&t.post, 1, &avoid, |b| {
                psi.rename(x, &b[0])
                    .with_pure(PureAtom::eq(x.clone(), e.subst(x, &Term::Var(b[0].clone()))))
            })
        }
        RuleName::Havoc => {
            premises(d, 0)?;
            let Command::Havoc(x) = &t.cmd else {
                return Err("command must be `x := *`".into());
            };
            let psi = heap_pre(t)?;
            if !ok {
                return is_false(t);
            }
            let mut avoid = psi.fv();
            avoid.insert(x.clone());
            quantified_post(&t.post, 1, &avoid, |b| psi.rename(x, &b[0]))
        }
        RuleName::Assume => {
            premises(d, 0)?;
            let Command::Assume(b) = &t.cmd else {
                return Err("command must be an assume".into());
            };
            ensure(b.is_pure(), || "assume conditions must be pure".into())?;
            let psi = heap_pre(t)?;
            if ok {
                same("postcondition", &t.post, &psi.star(b).into())
            } else {
                is_false(t)
            }
        }
        RuleName::Local => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            let Command::Local(x, body) = &t.cmd else {
                return Err("command must be a local block".into());
            };
            let z = match &d.side {
                SideData::Var(z) => z.clone(),
                SideData::None => x.clone(),
                other => return Err(format!("unexpected side data {other:?}")),
            };
            let renamed = if &z == x {
                (**body).clone()
            } else {
                ensure(!body.all_vars().contains(&z), || {
                    format!("`{z}` already occurs in the block")
                })?;
                body.swap(x, &z)
            };
            ensure(p.cmd == renamed, || "premise command must be the block body".into())?;
            ensure(!t.pre.fv().contains(&z), || {
                format!("`{z}` is free in the precondition")
            })?;
            ensure(p.exit == t.exit, || "exit conditions differ".into())?;
            same("precondition", &t.pre, &p.pre)?;
            same("postcondition", &t.post, &p.post.exists(&z))
        }
        RuleName::FrameOk => {
            premises(d, 1)?;
            let p = &d.premises[0].conclusion;
            ensure(ok && p.exit == OkE, || {
                "the frame rule applies to ok triples only".into()
            })?;
            let SideData::Frame(f) = &d.side else {
                return Err("missing the frame".into());
            };
            ensure(p.cmd == t.cmd, || "premise must share the command".into())?;
            let m = t.cmd.mod_of();
            if let Some(v) = f.fv().iter().find(|v| m.contains(*v)) {
                return Err(format!("the command modifies `{v}`, which is free in the frame"));
            }
            same("precondition", &t.pre, &frame(&p.pre, f)?)?;
            same("postcondition", &t.post, &frame(&p.post, f)?)
        }
        RuleName::Alloc1 => {
            premises(d, 0)?;
            let Command::Alloc(x) = &t.cmd else {
                return Err("command must be `x := alloc()`".into());
            };
            let psi = heap_pre(t)?;
            if !ok {
                return is_false(t);
            }
            let mut avoid = psi.fv();
            avoid.insert(x.clone());
            distinct_binders(&t.post)?;
            quantified_post(&t.post, 2, &avoid, |b| {
                psi.rename(x, &b[0])
                    .with_spatial(SpatialAtom::PointsTo(x.clone(), Term::Var(b[1].clone())))
            })
        }
        RuleName::Alloc2 => {
            premises(d, 0)?;
            let Command::Alloc(x) = &t.cmd else {
                return Err("command must be `x := alloc()`".into());
            };
            let psi = heap_pre(t)?;
            let SideData::Alias(y) = &d.side else {
                return Err("missing the deallocated location".into());
            };
            let rest = psi
                .remove_spatial(&SpatialAtom::NegPoints(y.clone()))
                .ok_or_else(|| format!("precondition has no `{y} -/>`"))?;
            if !ok {
                return is_false(t);
            }
            let mut avoid = psi.fv();
            avoid.insert(x.clone());
            distinct_binders(&t.post)?;
            quantified_post(&t.post, 2, &avoid, |b| {
                let y1 = if y == x { b[0].clone() } else { y.clone() };
                rest.rename(x, &b[0])
                    .with_spatial(SpatialAtom::PointsTo(x.clone(), Term::Var(b[1].clone())))
                    .with_pure(PureAtom::eq(x.clone(), y1))
            })
        }
        RuleName::Free | RuleName::FreeEr => {
            premises(d, 0)?;
            let Command::Free(x) = &t.cmd else {
                return Err("command must be `free(x)`".into());
            };
            let psi = heap_pre(t)?;
            canonical_for(psi, &[x], &[])?;
            let cell = alias_cell(psi, x, &d.side)?;
            heap_effect(d.rule == RuleName::Free, t, psi, cell, |y, old| {
                psi.remove_spatial(&SpatialAtom::PointsTo(y.clone(), old.clone()))
                    .expect("cell present")
                    .with_spatial(SpatialAtom::NegPoints(y.clone()))
                    .into()
            })
        }
        RuleName::Load | RuleName::LoadEr => {
            premises(d, 0)?;
            let Command::Load(x, y) = &t.cmd else {
                return Err("command must be `x := [y]`".into());
            };
            let psi = heap_pre(t)?;
            canonical_for(psi, &[x, y], &[])?;
            let cell = alias_cell(psi, y, &d.side)?;
            if d.rule == RuleName::Load && ok {
                let Some((_, v)) = cell else {
                    return Err(format!("no alias of `{y}` points to a value"));
                };
                let mut avoid = psi.fv();
                avoid.insert(x.clone());
                avoid.insert(y.clone());
                return quantified_post(&t.post, 1, &avoid, |b| {
                    psi.rename(x, &b[0])
                        .with_pure(PureAtom::eq(x.clone(), v.subst(x, &Term::Var(b[0].clone()))))
                });
            }
            heap_effect(d.rule == RuleName::Load, t, psi, cell, |_, _| unreachable!())
        }
        RuleName::Store | RuleName::StoreEr => {
            premises(d, 0)?;
            let Command::Store(x, e) = &t.cmd else {
                return Err("command must be `[x] := t`".into());
            };
            let psi = heap_pre(t)?;
            canonical_for(psi, &[x], &[e])?;
            let cell = alias_cell(psi, x, &d.side)?;
            heap_effect(d.rule == RuleName::Store, t, psi, cell, |y, old| {
                psi.remove_spatial(&SpatialAtom::PointsTo(y.clone(), old.clone()))
                    .expect("cell present")
                    .with_spatial(SpatialAtom::PointsTo(y.clone(), e.clone()))
                    .into()
            })
        }
        RuleName::BackwardsVariant => expand_variant(d).map(|_| ()),
    }
}

fn distinct_binders(post: &Assertion) -> Step {
    match post.disjuncts.as_slice() {
        [d] if d.binders.len() == 2 => ensure(d.binders[0] != d.binders[1], || "binders must differ".into()),
        _ => Ok(()),
    }
}

/// Shared shape of the heap axioms: with a cell, `ok` gives `effect` and
/// `er` gives `false`; without one, `ok` gives `false` and `er` keeps `ψ`.
fn heap_effect(
    with_cell: bool,
    t: &Triple,
    psi: &SymbolicHeap,
    cell: Option<(Var, Term)>,
    effect: impl FnOnce(&Var, &Term) -> Assertion,
) -> Step {
    match (with_cell, cell) {
        (true, Some((y, old))) => {
            if t.exit == ExitCondition::Ok {
                same("postcondition", &t.post, &effect(&y, &old))
            } else {
                is_false(t)
            }
        }
        (true, None) => Err("no alias of the address has a points-to atom".into()),
        (false, Some((y, _))) => Err(format!("`{y}` is an allocated alias of the address")),
        (false, None) => {
            if t.exit == ExitCondition::Ok {
                is_false(t)
            } else {
                same("postcondition", &t.post, &psi.clone().into())
            }
        }
    }
}

/// `P * F` distributed over the disjuncts of `P`.
fn frame(p: &Assertion, f: &QuantifiedHeap) -> Result<Assertion, String> {
    let fvars = f.all_vars();
    let mut out = Vec::new();
    for d in &p.disjuncts {
        let dvars = d.all_vars();
        if d.binders.iter().any(|b| fvars.contains(b)) || f.binders.iter().any(|b| dvars.contains(b)) {
            return Err(format!("rename the quantified variables of `{d}` and the frame apart"));
        }
        let mut binders = d.binders.clone();
        binders.extend(f.binders.iter().cloned());
        out.push(QuantifiedHeap::new(binders, d.body.star(&f.body)));
    }
    Ok(Assertion::new(out))
}

/// Unfolds a backwards variant with assertions `P(0), …, P(k)` into
/// `LoopZero`, `LoopNonZero`, `Seq2` and `Disj` steps.
pub fn expand_variant(d: &DerivationNode) -> Result<DerivationNode, String> {
    let t = &d.conclusion;
    let SideData::Variant(ps) = &d.side else {
        return Err("missing the variant assertions".into());
    };
    ensure(!ps.is_empty(), || "the variant needs at least P(0)".into())?;
    ensure(t.exit == ExitCondition::Ok, || {
        "the variant concludes ok triples only".into()
    })?;
    let Command::Star(body) = &t.cmd else {
        return Err("command must be a loop".into());
    };
    premises(d, ps.len() - 1)?;
    for (n, p) in d.premises.iter().enumerate() {
        let c = &p.conclusion;
        ensure(c.cmd == **body && c.exit == ExitCondition::Ok, || {
            format!("step {n} must be an ok triple for the loop body")
        })?;
        same(&format!("step {n} precondition"), &c.pre, &ps[n])?;
        same(&format!("step {n} postcondition"), &c.post, &ps[n + 1])?;
    }
    let p0 = ps[0].clone();
    let mut chain = vec![DerivationNode::axiom(
        RuleName::LoopZero,
        Triple::new(p0.clone(), t.cmd.clone(), ExitCondition::Ok, p0.clone()),
        SideData::None,
    )];
    for step in &d.premises {
        let prev = chain.last().expect("nonempty").clone();
        chain.push(DerivationNode::loop_non_zero(DerivationNode::seq2(prev, step.clone())));
    }
    let disj = DerivationNode::disj(t.cmd.clone(), ExitCondition::Ok, chain);
    same("precondition", &t.pre, &disj.conclusion.pre)?;
    same("postcondition", &t.post, &disj.conclusion.post)?;
    Ok(disj)
}
