//! Differential suites: the symbolic engine against the concrete oracle.
//!
//! Every case draws from its own seeded stream, so a failing case can be
//! rerun alone with `islkit diff-test --suite NAME --seed S --case N`.

use std::collections::BTreeMap;
use std::time::Instant;

use islkit_core::canon::{self, aliases};
use islkit_core::entail::{entails, entails_oracle, EntailVerdict};
use islkit_core::par::{self, ExecMode};
use islkit_core::proof::{check, check_step, expand_variant, DerivationNode, RuleName, SideData};
use islkit_core::semantics::{
    brute_valid, brute_wpo_over, enum_states, exec, models, satisfies, Cell, DomainSpec, Heap, State, Store,
};
use islkit_core::triple::auto_domain;
use islkit_core::wpo::{synthesize, wpo, WpoConfig, WpoError};
use islkit_core::*;

use crate::corpus::{Gen, Head, Shape};
use crate::report::{CaseOutcome, RunReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Expressiveness,
    Cano,
    Entailment,
    Rules,
    Completeness,
    Lemmas,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::Expressiveness,
        Suite::Cano,
        Suite::Entailment,
        Suite::Rules,
        Suite::Completeness,
        Suite::Lemmas,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Expressiveness => "expressiveness",
            Suite::Cano => "cano",
            Suite::Entailment => "entailment",
            Suite::Rules => "rules",
            Suite::Completeness => "completeness",
            Suite::Lemmas => "lemmas",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    fn stream(self) -> u64 {
        self as u64 + 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Params {
    pub seed: u64,
    /// Decided cases wanted; for `rules` per rule and for `lemmas` per
    /// lemma instance count.
    pub cases: usize,
    pub locs: u8,
    pub max_cells: usize,
    pub loop_bound: usize,
    pub mode: ExecMode,
    pub shape: Shape,
}

impl Params {
    pub fn new(seed: u64, cases: usize) -> Self {
        Params {
            seed,
            cases,
            locs: 3,
            max_cells: 2,
            loop_bound: 3,
            mode: ExecMode::default(),
            shape: Shape::default(),
        }
    }

    pub fn dom(&self) -> DomainSpec {
        DomainSpec::new(self.locs, self.max_cells)
    }

    fn repro(&self, suite: Suite, case: u64) -> String {
        format!(
            "islkit diff-test --suite {} --seed {} --locs {} --max-cells {} --loop-bound {} --case {}",
            suite.name(),
            self.seed,
            self.locs,
            self.max_cells,
            self.loop_bound,
            case
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct CaseResult {
    pub outcome: Option<CaseOutcome>,
    /// The generated input, for `--case` reruns.
    pub input: String,
    pub counts: BTreeMap<String, usize>,
}

impl CaseResult {
    fn of(outcome: CaseOutcome) -> Self {
        CaseResult {
            outcome: Some(outcome),
            input: String::new(),
            counts: BTreeMap::new(),
        }
    }

    fn count(&mut self, key: &str, n: usize) {
        *self.counts.entry(key.to_string()).or_default() += n;
    }

    fn fail(&mut self, detail: String) {
        if !matches!(self.outcome, Some(CaseOutcome::Fail(_))) {
            self.outcome = Some(CaseOutcome::Fail(detail));
        }
    }
}

fn skip(reason: impl Into<String>) -> CaseResult {
    CaseResult::of(CaseOutcome::Skip(reason.into()))
}

/// One generated case of a suite.
pub fn run_case(suite: Suite, p: &Params, case: u64) -> CaseResult {
    let mut g = Gen::for_case(p.seed, suite.stream(), case, p.shape);
    let mut input = String::new();
    let mut r = match suite {
        Suite::Expressiveness => expressiveness_case(&mut g, p, &mut input),
        Suite::Cano => cano_case(&mut g, p, &mut input),
        Suite::Entailment => entailment_case(&mut g, &mut input),
        Suite::Rules => rules_case(&mut g, p, case, &mut input),
        Suite::Completeness => completeness_case(&mut g, p, &mut input),
        Suite::Lemmas => lemmas_case(&mut g, p, &mut input),
    };
    r.input = input;
    r
}

fn rule_key(r: RuleName) -> String {
    format!("rule_{r}")
}

const LEMMAS: [&str; 4] = [
    "heap_monotonicity",
    "frame_preservation",
    "untouched_vars",
    "canonical_alias",
];

fn done(suite: Suite, p: &Params, report: &RunReport, counts: &BTreeMap<String, usize>) -> bool {
    let get = |k: &str| counts.get(k).copied().unwrap_or(0);
    match suite {
        Suite::Rules => RuleName::ALL.iter().all(|r| get(&rule_key(*r)) >= p.cases),
        Suite::Lemmas => LEMMAS.iter().all(|k| get(k) >= p.cases),
        Suite::Completeness => get("valid") >= p.cases,
        _ => report.checked() >= p.cases,
    }
}

/// Runs cases in batches until enough are decided, or gives up after
/// fifty times the requested number of attempts (per rule for `rules`).
pub fn run_suite(suite: Suite, p: &Params) -> RunReport {
    let start = Instant::now();
    let mut report = RunReport::new(suite.name());
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    let batch = (p.cases / 4).clamp(16, 256);
    let per_case = if suite == Suite::Rules { RuleName::ALL.len() } else { 1 };
    let max_attempts = p.cases.max(1) * 50 * per_case;
    let mut next = 0usize;
    while !done(suite, p, &report, &counts) && next < max_attempts {
        let results = par::map_range(p.mode, batch, |i| run_case(suite, p, (next + i) as u64));
        for (i, r) in results.into_iter().enumerate() {
            let case = (next + i) as u64;
            for (k, v) in r.counts {
                *counts.entry(k).or_default() += v;
            }
            if let Some(o) = r.outcome {
                report.record(case, o, || p.repro(suite, case));
            }
        }
        next += batch;
    }
    for (k, v) in counts {
        report.note(&k, v);
    }
    report.wall = start.elapsed();
    report
}

// ---------------------------------------------------------------------------
// expressiveness: models of wpo = brute-force WPO

fn exact_cfg(p: &Params) -> WpoConfig {
    WpoConfig::default().with_loop_bound(p.loop_bound)
}

fn expressiveness_case(g: &mut Gen, p: &Params, input: &mut String) -> CaseResult {
    let pre = g.assertion();
    let c = g.program();
    let exit = g.exit();
    *input = format!("{pre} ; {c} ; {exit}");
    let w = match wpo(&pre, &c, exit, &exact_cfg(p)) {
        Ok(w) => w,
        Err(e) => return skip(e.to_string()),
    };
    let core = c.desugar();
    let mut vars = pre.fv();
    vars.extend(core.fv());
    let dom = p.dom();
    let brute = match brute_wpo_over(&dom, &pre, &core, exit, p.loop_bound, &vars, ExecMode::Sequential) {
        Ok(b) => b,
        Err(e) => return skip(e.to_string()),
    };
    let sym = models(&dom, &w.post, &vars);
    if sym == brute {
        CaseResult::of(CaseOutcome::Pass)
    } else {
        let extra = sym.difference(&brute).next().map(|s| s.display_over(&vars).to_string());
        let missing = brute.difference(&sym).next().map(|s| s.display_over(&vars).to_string());
        CaseResult::of(CaseOutcome::Fail(format!(
            "[ {pre} ] {c} [ {exit}: ? ]: wpo = {} ; only symbolic: {extra:?} ; only concrete: {missing:?}",
            w.post
        )))
    }
}

// ---------------------------------------------------------------------------
// canonicalization preserves meaning and is canonical

fn cano_case(g: &mut Gen, p: &Params, input: &mut String) -> CaseResult {
    let pre = g.assertion();
    let c = g.program().desugar();
    *input = format!("{pre} ; {c}");
    let cp = match canon::cano(&pre, &c) {
        Ok(x) => x,
        Err(e) => return skip(e.to_string()),
    };
    let cfv = c.fv();
    for d in &cp.disjuncts {
        let mut vars = d.body.fv();
        vars.extend(cfv.iter().cloned());
        if !canon::is_canonical(&d.body, &vars) {
            return CaseResult::of(CaseOutcome::Fail(format!("cano({pre}, {c}) has non-canonical `{d}`")));
        }
    }
    let mut vars = pre.fv();
    vars.extend(cfv);
    let dom = p.dom();
    let states = enum_states(&dom, &vars);
    for s in &states {
        if satisfies(&dom, s, &pre) != satisfies(&dom, s, &cp) {
            return CaseResult::of(CaseOutcome::Fail(format!(
                "cano({pre}, {c}) = {cp} disagrees at {}",
                s.display_over(&vars)
            )));
        }
    }
    let mut r = CaseResult::of(CaseOutcome::Pass);
    r.count("states_compared", states.len());
    r
}

// ---------------------------------------------------------------------------
// syntactic entailment against the finite-domain oracle

fn entailment_case(g: &mut Gen, input: &mut String) -> CaseResult {
    g.shape.max_spatial = 3;
    g.shape.max_binders = 1;
    let lhs = g.assertion();
    // half of the consequents are weakenings of the antecedent
    let rhs = if g.chance(0.5) {
        let mut q = lhs.clone();
        for d in q.disjuncts.iter_mut() {
            if !d.body.pure().is_empty() && g.chance(0.5) {
                let drop = d.body.pure().iter().next().unwrap().clone();
                let rest: Vec<PureAtom> = d.body.pure().iter().filter(|a| **a != drop).cloned().collect();
                let mut h = SymbolicHeap::from_pure(rest);
                for s in d.body.spatial() {
                    h.push_spatial(s.clone());
                }
                d.body = h;
            }
        }
        q.or(g.assertion())
    } else {
        g.assertion()
    };
    *input = format!("{lhs} |= {rhs}");
    if lhs.max_spatial() > 3 || rhs.max_spatial() > 3 {
        return skip("too many spatial atoms");
    }
    let dom = DomainSpec::new(4, 4);
    let oracle = entails_oracle(&lhs, &rhs, &dom);
    let verdict = entails(&lhs, &rhs);
    let agree = match &verdict {
        EntailVerdict::Holds => oracle,
        EntailVerdict::Fails { counterexample, domain } => {
            if satisfies(domain, counterexample, &lhs) && !satisfies(domain, counterexample, &rhs) {
                !oracle
            } else {
                return CaseResult::of(CaseOutcome::Fail(format!(
                    "{lhs} |= {rhs}: counterexample {counterexample} does not refute"
                )));
            }
        }
        EntailVerdict::Unknown(r) => return skip(r.clone()),
    };
    let mut r = if agree {
        CaseResult::of(CaseOutcome::Pass)
    } else {
        CaseResult::of(CaseOutcome::Fail(format!(
            "{lhs} |= {rhs}: syntactic {verdict}, oracle {oracle}"
        )))
    };
    r.count(if oracle { "holds" } else { "fails" }, 1);
    r
}

// ---------------------------------------------------------------------------
// local soundness of single rule instances

fn head_for(rule: RuleName, g: &mut Gen) -> Head {
    match rule {
        RuleName::Skip => Head::Skip,
        RuleName::Error => Head::Error,
        RuleName::Seq1 | RuleName::Seq2 | RuleName::Cons => Head::Seq,
        RuleName::LoopZero | RuleName::LoopNonZero | RuleName::BackwardsVariant => Head::Star,
        RuleName::Disj | RuleName::Choice => Head::Choice,
        RuleName::Assign => Head::Assign,
        RuleName::Havoc => Head::Havoc,
        RuleName::Assume => Head::Assume,
        RuleName::Local => Head::Local,
        RuleName::Alloc1 | RuleName::Alloc2 => Head::Alloc,
        RuleName::Free | RuleName::FreeEr => Head::Free,
        RuleName::Load | RuleName::LoadEr => Head::Load,
        RuleName::Store | RuleName::StoreEr => Head::Store,
        RuleName::Exist | RuleName::FrameOk => {
            let heads = [
                Head::Assign,
                Head::Free,
                Head::Load,
                Head::Store,
                Head::Alloc,
                Head::Seq,
            ];
            heads[g.below(heads.len())]
        }
    }
}

/// Every node of the derivation, with backwards variants also unfolded.
fn harvest(d: &DerivationNode, out: &mut Vec<DerivationNode>) {
    out.push(d.clone());
    if d.rule == RuleName::BackwardsVariant {
        if let Ok(e) = expand_variant(d) {
            out.push(e.clone());
            for link in &e.premises {
                out.push(link.clone());
                if let Some(s) = link.premises.first() {
                    out.push(s.clone());
                }
            }
        }
    }
    for p in &d.premises {
        harvest(p, out);
    }
}

/// A conclusion that differs from the instance's, to probe that the
/// checker rejects what it should.
fn mutate(g: &mut Gen, d: &DerivationNode) -> DerivationNode {
    let mut m = d.clone();
    match g.below(3) {
        0 => {
            m.conclusion.exit = match m.conclusion.exit {
                ExitCondition::Ok => ExitCondition::Er,
                ExitCondition::Er => ExitCondition::Ok,
            }
        }
        1 => m.conclusion.post = m.conclusion.post.clone().or(g.assertion()),
        _ => {
            let extra = g.condition();
            m.conclusion.post = Assertion::new(
                m.conclusion
                    .post
                    .disjuncts
                    .iter()
                    .map(|q| QuantifiedHeap::new(q.binders.clone(), q.body.star(&extra)))
                    .collect(),
            );
            m.conclusion.pre = m.conclusion.pre.clone().or(g.assertion());
        }
    }
    m
}

/// `FrameOk` over an ok instance with a frame on variables the command
/// leaves alone; the flag asks for the unsound er variant instead.
fn framed(g: &mut Gen, d: &DerivationNode, er: bool) -> Option<DerivationNode> {
    let t = &d.conclusion;
    if t.exit != ExitCondition::Ok {
        return None;
    }
    let m = t.cmd.mod_of();
    let free: Vec<Var> = g.vars().into_iter().filter(|v| !m.contains(v)).collect();
    if free.is_empty() {
        return None;
    }
    let src = free[g.below(free.len())].clone();
    let mut f = SymbolicHeap::emp();
    if g.chance(0.5) {
        let other = free[g.below(free.len())].clone();
        f.push_pure(PureAtom::neq(src.clone(), other));
    }
    f.push_spatial(if g.chance(0.7) {
        SpatialAtom::PointsTo(src, Term::Null)
    } else {
        SpatialAtom::NegPoints(src)
    });
    let star = |a: &Assertion| {
        Assertion::new(
            a.disjuncts
                .iter()
                .map(|q| QuantifiedHeap::new(q.binders.clone(), q.body.star(&f)))
                .collect(),
        )
    };
    let exit = if er { ExitCondition::Er } else { ExitCondition::Ok };
    let (pre, post) = if er {
        // premise [P] C [er: Q] framed into [P * F] C [er: Q * F]
        (star(&t.pre), star(&t.pre))
    } else {
        (star(&t.pre), star(&t.post))
    };
    let mut premise = d.clone();
    if er {
        premise.conclusion.exit = ExitCondition::Er;
        premise.conclusion.post = t.pre.clone();
    }
    Some(DerivationNode::new(
        RuleName::FrameOk,
        Triple::new(pre, t.cmd.clone(), exit, post),
        vec![premise],
        SideData::Frame(QuantifiedHeap::unquantified(f)),
    ))
}

fn valid(dom: &DomainSpec, t: &Triple, bound: usize) -> Option<bool> {
    brute_valid(dom, t, bound).ok()
}

/// Checks one accepted instance: valid premises must give a valid
/// conclusion. Conclusions get one more loop iteration than premises,
/// since `LoopNonZero` turns `C⋆; C` into `C⋆`.
fn sound_instance(dom: &DomainSpec, d: &DerivationNode, bound: usize) -> Result<bool, String> {
    for p in &d.premises {
        match valid(dom, &p.conclusion, bound) {
            Some(true) => {}
            _ => return Ok(false),
        }
    }
    match valid(dom, &d.conclusion, bound + 1) {
        Some(true) => Ok(true),
        Some(false) => Err(format!("{} accepted an invalid conclusion {}", d.rule, d.conclusion)),
        None => Ok(false),
    }
}

fn rules_case(g: &mut Gen, p: &Params, case: u64, input: &mut String) -> CaseResult {
    let rule = RuleName::ALL[case as usize % RuleName::ALL.len()];
    g.shape.max_binders = if rule == RuleName::Exist { 2 } else { 1 };
    let head = head_for(rule, g);
    let c = g.with_head(head, 3);
    let mut pre = g.assertion();
    if rule == RuleName::Alloc2 {
        let x = g.var();
        let mut h = g.heap();
        if h.spatial().iter().all(|a| a.source() != &x) {
            h.push_spatial(SpatialAtom::NegPoints(x));
        }
        pre = h.into();
    }
    let exit = g.exit();
    *input = format!("{rule}: {pre} ; {c} ; {exit}");
    let cfg = WpoConfig::default().with_loop_bound(2);
    let d = match synthesize(&pre, &c, exit, &cfg) {
        Ok((_, d)) => d,
        Err(WpoError::Canon(e)) => return skip(e.to_string()),
        Err(e) => return CaseResult::of(CaseOutcome::Fail(e.to_string())),
    };
    let mut nodes = Vec::new();
    harvest(&d, &mut nodes);
    let dom = DomainSpec::new(p.locs, p.max_cells);
    let bound = 2;
    let mut r = CaseResult::of(CaseOutcome::Pass);
    let mut candidates: Vec<DerivationNode> = nodes.iter().filter(|n| n.rule == rule).take(3).cloned().collect();
    if rule == RuleName::FrameOk {
        let oks: Vec<&DerivationNode> = nodes
            .iter()
            .filter(|n| n.conclusion.exit == ExitCondition::Ok && n.premises.is_empty())
            .collect();
        for n in oks.into_iter().take(3) {
            candidates.extend(framed(g, n, false));
            if let Some(bad) = framed(g, n, true) {
                if check_step(&bad).is_ok() {
                    r.fail(format!("er frame accepted: {}", bad.conclusion));
                } else {
                    r.count("er_frame_rejected", 1);
                }
            }
        }
    }
    for n in candidates {
        if let Err(e) = check_step(&n) {
            if rule == RuleName::FrameOk {
                r.count("frame_rejected", 1);
                continue;
            }
            r.fail(format!("synthesized {} step rejected: {e}", n.rule));
            continue;
        }
        match sound_instance(&dom, &n, bound) {
            Ok(true) => r.count(&rule_key(rule), 1),
            Ok(false) => r.count("vacuous", 1),
            Err(e) => r.fail(e),
        }
        let m = mutate(g, &n);
        if check_step(&m).is_ok() {
            r.count("mutants_accepted", 1);
            if let Err(e) = sound_instance(&dom, &m, bound) {
                r.fail(format!("mutant: {e}"));
            }
        } else {
            r.count("mutants_rejected", 1);
        }
    }
    r
}

// ---------------------------------------------------------------------------
// completeness: valid loop-free triples are derivable

fn completeness_case(g: &mut Gen, p: &Params, input: &mut String) -> CaseResult {
    g.shape.loops = false;
    let pre = g.assertion();
    let c = g.program().desugar();
    let exit = g.exit();
    let cfg = WpoConfig::default();
    let (w, d) = match synthesize(&pre, &c, exit, &cfg) {
        Ok(x) => x,
        Err(e) => return skip(e.to_string()),
    };
    // half the postconditions strengthen a slice of wpo, half are random
    let post = if g.chance(0.5) && !w.post.is_false() {
        let mut ds = Vec::new();
        for q in &w.post.disjuncts {
            if g.chance(0.6) {
                let mut body = q.body.clone();
                if g.chance(0.5) {
                    body = body.star(&g.condition());
                }
                ds.push(QuantifiedHeap::new(q.binders.clone(), body));
            }
        }
        Assertion::new(ds)
    } else {
        g.assertion()
    };
    let t = Triple::new(pre.clone(), c.clone(), exit, post.clone());
    *input = t.to_string();
    let dom = auto_domain(&t, Default::default());
    let dom = DomainSpec::new(dom.locations.min(p.locs.max(5)), dom.max_cells);
    let Some(is_valid) = valid(&dom, &t, p.loop_bound) else {
        return skip("domain exhausted");
    };
    let verdict = entails(&post, &w.post);
    let mut r = CaseResult::of(CaseOutcome::Pass);
    if is_valid {
        r.count("valid", 1);
        if !verdict.holds() {
            r.fail(format!("valid {t} but entailment against wpo {}: {verdict}", w.post));
            return r;
        }
        let proof = DerivationNode::cons(pre, post, d);
        if let Err(e) = check(&proof) {
            r.fail(format!("derivation of {t} rejected: {e}"));
        }
    } else {
        r.count("invalid", 1);
        if verdict.holds() {
            r.fail(format!("invalid {t} yet its postcondition entails wpo {}", w.post));
        }
    }
    r
}

// ---------------------------------------------------------------------------
// semantic lemmas over sampled transitions

fn random_state(g: &mut Gen, dom: &DomainSpec, vars: &[Var]) -> State {
    let values = dom.values();
    let mut store = Store::new();
    for v in vars {
        let val = values[g.below(values.len())];
        store.set(v, val);
    }
    let mut heap = Heap::new();
    for l in dom.locs() {
        if heap.len() < dom.max_cells && g.chance(0.4) {
            let cell = if g.chance(0.2) {
                Cell::Dealloc
            } else {
                Cell::Val(values[g.below(values.len())])
            };
            heap.set(l, cell);
        }
    }
    State::new(store, heap)
}

fn lemmas_case(g: &mut Gen, p: &Params, input: &mut String) -> CaseResult {
    let dom = DomainSpec::new(p.locs.max(4), p.max_cells);
    let mut vars = g.vars();
    let spare = Var::new("w");
    vars.push(spare.clone());
    let st = random_state(g, &dom, &vars);
    let c = g.command(3).desugar();
    *input = format!("{} ; {c}", st.display_over(&vars.iter().cloned().collect()));
    let cfv = c.fv();
    let mut r = CaseResult::of(CaseOutcome::Pass);
    for exit in ExitCondition::ALL {
        let Ok(outs) = exec(&dom, &st, &c, exit, p.loop_bound) else {
            return skip("domain exhausted");
        };
        for out in &outs {
            if !st.heap.dom().is_subset(&out.heap.dom()) {
                r.fail(format!("{c} shrank the heap domain from {st} to {out}"));
            }
            r.count("heap_monotonicity", 1);
            for v in vars.iter().filter(|v| !cfv.contains(v)) {
                if st.store.get(v) != out.store.get(v) {
                    r.fail(format!("{c} changed untouched `{v}`: {st} to {out}"));
                }
                r.count("untouched_vars", 1);
            }
            if exit == ExitCondition::Ok {
                let used: std::collections::BTreeSet<u8> = st.heap.dom().union(&out.heap.dom()).copied().collect();
                let free: Vec<u8> = dom.locs().filter(|l| !used.contains(l)).collect();
                if !free.is_empty() {
                    let l = free[g.below(free.len())];
                    let values = dom.values();
                    let cell = if g.chance(0.3) {
                        Cell::Dealloc
                    } else {
                        Cell::Val(values[g.below(values.len())])
                    };
                    let hr = Heap::new().with(l, cell);
                    let big = State::new(st.store.clone(), st.heap.compose(&hr).unwrap());
                    let want = State::new(out.store.clone(), out.heap.compose(&hr).unwrap());
                    match exec(&dom, &big, &c, ExitCondition::Ok, p.loop_bound) {
                        Ok(outs2) if outs2.contains(&want) => {}
                        Ok(_) => r.fail(format!("{c}: framing {st} -> {out} by l{l} loses the transition")),
                        // the frame took the last location an allocation needed
                        Err(_) => continue,
                    }
                    r.count("frame_preservation", 1);
                }
            }
        }
    }
    // canonical-alias lemma on a few canonical cases of a random heap
    let h = g.heap();
    let vset: VarSet = g.vars().into_iter().collect();
    if let Ok(cases) = canon::ca_over(&h, &vset, canon::DEFAULT_VAR_CAP) {
        for _ in 0..cases.len().min(4) {
            let psi = &cases[g.below(cases.len())];
            let mut all = vset.clone();
            all.extend(psi.fv());
            for m in models(&dom, &Assertion::from(psi.clone()), &all) {
                for x in &all {
                    if m.heap.allocated(m.store.get(x)).is_none() {
                        continue;
                    }
                    let mut al = aliases(x, psi);
                    al.insert(x.clone());
                    let has = psi
                        .spatial()
                        .iter()
                        .any(|a| matches!(a, SpatialAtom::PointsTo(v, _) if al.contains(v)));
                    if !has {
                        r.fail(format!(
                            "`{psi}` has a model {m} allocating `{x}` with no points-to alias"
                        ));
                    }
                    r.count("canonical_alias", 1);
                }
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_runs_clean_on_a_few_cases() {
        for s in Suite::ALL {
            let p = Params {
                cases: 8,
                ..Params::new(11, 8)
            };
            let r = run_suite(s, &p);
            assert!(r.ok(), "{r}");
            assert!(r.run >= 8);
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }
}
