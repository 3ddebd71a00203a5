//! Stores, heaps with deallocated cells, the satisfaction relation and the
//! denotational semantics of commands over a finite value domain, plus the
//! brute-force WPO and validity oracles built on them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::par::{self, ExecMode};
use crate::syntax::*;

/// `Val = Loc ∪ {null}`; locations are numbered from 1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Null,
    Loc(u8),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => f.write_str("null"),
            Value::Loc(l) => write!(f, "l{l}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Val(Value),
    Dealloc,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Val(v) => write!(f, "{v}"),
            Cell::Dealloc => f.write_str("⊥"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DomainSpec {
    pub locations: u8,
    pub max_cells: usize,
}

impl DomainSpec {
    pub fn new(locations: u8, max_cells: usize) -> Self {
        DomainSpec { locations, max_cells }
    }

    pub fn locs(&self) -> impl Iterator<Item = u8> + Clone {
        1..=self.locations
    }

    /// `null` first, then the locations in order.
    pub fn values(&self) -> Vec<Value> {
        std::iter::once(Value::Null)
            .chain(self.locs().map(Value::Loc))
            .collect()
    }

    pub fn with_max_cells(self, max_cells: usize) -> Self {
        DomainSpec { max_cells, ..self }
    }
}

/// A total store: variables without an entry hold `null`. Null entries are
/// never stored, so structural equality is extensional equality.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Store(BTreeMap<Var, Value>);

impl Store {
    pub fn new() -> Self {
        Store::default()
    }

    pub fn get(&self, x: &Var) -> Value {
        self.0.get(x).copied().unwrap_or(Value::Null)
    }

    pub fn set(&mut self, x: &Var, v: Value) {
        match v {
            Value::Null => {
                self.0.remove(x);
            }
            v => {
                self.0.insert(x.clone(), v);
            }
        }
    }

    pub fn with(mut self, x: &Var, v: Value) -> Self {
        self.set(x, v);
        self
    }

    pub fn eval(&self, t: &Term) -> Value {
        match t {
            Term::Var(x) => self.get(x),
            Term::Null => Value::Null,
        }
    }

    pub fn bindings(&self) -> impl Iterator<Item = (&Var, &Value)> {
        self.0.iter()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Heap(BTreeMap<u8, Cell>);

impl Heap {
    pub fn new() -> Self {
        Heap::default()
    }

    pub fn get(&self, l: u8) -> Option<Cell> {
        self.0.get(&l).copied()
    }

    pub fn set(&mut self, l: u8, c: Cell) {
        self.0.insert(l, c);
    }

    pub fn with(mut self, l: u8, c: Cell) -> Self {
        self.set(l, c);
        self
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn cells(&self) -> impl Iterator<Item = (u8, Cell)> + '_ {
        self.0.iter().map(|(l, c)| (*l, *c))
    }

    pub fn dom(&self) -> BTreeSet<u8> {
        self.0.keys().copied().collect()
    }

    /// `dom+`: holds a value rather than `⊥`.
    pub fn allocated(&self, v: Value) -> Option<Value> {
        match v {
            Value::Loc(l) => match self.get(l) {
                Some(Cell::Val(c)) => Some(c),
                _ => None,
            },
            Value::Null => None,
        }
    }

    pub fn disjoint(&self, other: &Heap) -> bool {
        self.0.keys().all(|l| !other.0.contains_key(l))
    }

    /// `h1 ∘ h2`, defined on disjoint heaps.
    pub fn compose(&self, other: &Heap) -> Option<Heap> {
        if !self.disjoint(other) {
            return None;
        }
        let mut out = self.clone();
        out.0.extend(other.0.iter().map(|(l, c)| (*l, *c)));
        Some(out)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub store: Store,
    pub heap: Heap,
}

impl State {
    pub fn new(store: Store, heap: Heap) -> Self {
        State { store, heap }
    }

    /// Prints every variable of `vars`, nulls included, then the heap:
    /// `{x=l1, y=null} | {l1=⊥}`.
    pub fn display_over<'a>(&'a self, vars: &'a VarSet) -> impl fmt::Display + 'a {
        StateDisplay { st: self, vars }
    }
}

struct StateDisplay<'a> {
    st: &'a State,
    vars: &'a VarSet,
}

impl fmt::Display for StateDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vars.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={}", self.st.store.get(v))?;
        }
        f.write_str("} | ")?;
        write_heap(f, &self.st.heap)
    }
}

fn write_heap(f: &mut fmt::Formatter<'_>, h: &Heap) -> fmt::Result {
    f.write_str("{")?;
    for (i, (l, c)) in h.cells().enumerate() {
        if i > 0 {
            f.write_str(", ")?;
        }
        write!(f, "l{l}={c}")?;
    }
    f.write_str("}")
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (v, val)) in self.store.bindings().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}={val}")?;
        }
        f.write_str("} | ")?;
        write_heap(f, &self.heap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("allocation found no free or deallocated location among {locations} locations")]
pub struct DomainExhausted {
    pub locations: u8,
}

// ---------------------------------------------------------------------------
// satisfaction

/// `σ ⊨ P`, with existentials ranging over the domain's values.
pub fn satisfies(dom: &DomainSpec, st: &State, p: &Assertion) -> bool {
    p.disjuncts.iter().any(|d| satisfies_quantified(dom, st, d))
}

pub fn satisfies_heap(dom: &DomainSpec, st: &State, h: &SymbolicHeap) -> bool {
    satisfies_quantified(dom, st, &QuantifiedHeap::unquantified(h.clone()))
}

pub fn satisfies_quantified(dom: &DomainSpec, st: &State, q: &QuantifiedHeap) -> bool {
    if q.body.spatial().len() != st.heap.len() {
        return false;
    }
    let mut m = Matcher {
        dom,
        st,
        q,
        env: q.binders.iter().map(|b| (b.clone(), None)).collect(),
        used: BTreeSet::new(),
    };
    m.spatial(0)
}

struct Matcher<'a> {
    dom: &'a DomainSpec,
    st: &'a State,
    q: &'a QuantifiedHeap,
    env: BTreeMap<Var, Option<Value>>,
    used: BTreeSet<u8>,
}

impl Matcher<'_> {
    // Some(Some(v)) known, Some(None) unbound binder
    fn lookup(&self, t: &Term) -> Option<Value> {
        match t {
            Term::Null => Some(Value::Null),
            Term::Var(x) => match self.env.get(x) {
                Some(b) => *b,
                None => Some(self.st.store.get(x)),
            },
        }
    }

    fn bind(&mut self, x: &Var, v: Option<Value>) {
        self.env.insert(x.clone(), v);
    }

    fn spatial(&mut self, i: usize) -> bool {
        let atoms = self.q.body.spatial();
        if i == atoms.len() {
            return self.pure();
        }
        let atom = &atoms[i];
        let src = atom.source().clone();
        let src_t = Term::Var(src.clone());
        let candidates: Vec<u8> = match self.lookup(&src_t) {
            Some(Value::Loc(l)) => vec![l],
            Some(Value::Null) => return false,
            None => self.st.heap.dom().into_iter().collect(),
        };
        let src_free = self.lookup(&src_t).is_none();
        for l in candidates {
            if self.used.contains(&l) {
                continue;
            }
            let Some(cell) = self.st.heap.get(l) else {
                continue;
            };
            if src_free {
                self.bind(&src, Some(Value::Loc(l)));
            }
            let ok = match (atom, cell) {
                (SpatialAtom::NegPoints(_), Cell::Dealloc) => {
                    self.used.insert(l);
                    let r = self.spatial(i + 1);
                    self.used.remove(&l);
                    r
                }
                (SpatialAtom::PointsTo(_, t), Cell::Val(cv)) => match self.lookup(t) {
                    Some(tv) if tv != cv => false,
                    Some(_) => {
                        self.used.insert(l);
                        let r = self.spatial(i + 1);
                        self.used.remove(&l);
                        r
                    }
                    None => {
                        let x = t.as_var().expect("unbound terms are binders").clone();
                        self.bind(&x, Some(cv));
                        self.used.insert(l);
                        let r = self.spatial(i + 1);
                        self.used.remove(&l);
                        self.bind(&x, None);
                        r
                    }
                },
                _ => false,
            };
            if src_free {
                self.bind(&src, None);
            }
            if ok {
                return true;
            }
        }
        false
    }

    fn pure(&mut self) -> bool {
        let pending: Vec<Var> = self
            .q
            .body
            .pure()
            .iter()
            .flat_map(|a| a.fv())
            .filter(|v| matches!(self.env.get(v), Some(None)))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        self.enumerate(&pending, 0)
    }

    fn enumerate(&mut self, pending: &[Var], i: usize) -> bool {
        if i == pending.len() {
            return self.q.body.pure().iter().all(|a| {
                let l = self.lookup(a.lhs()).expect("all pure terms bound");
                let r = self.lookup(a.rhs()).expect("all pure terms bound");
                (l == r) == (a.kind() == PureKind::Eq)
            });
        }
        for v in self.dom.values() {
            self.bind(&pending[i], Some(v));
            if self.enumerate(pending, i + 1) {
                self.bind(&pending[i], None);
                return true;
            }
        }
        self.bind(&pending[i], None);
        false
    }
}

/// Whether the store satisfies every atom of a pure formula, as `assume`
/// requires.
pub fn holds_pure(store: &Store, b: &SymbolicHeap) -> bool {
    b.pure()
        .iter()
        .all(|a| (store.eval(a.lhs()) == store.eval(a.rhs())) == (a.kind() == PureKind::Eq))
}

// ---------------------------------------------------------------------------
// model enumeration

/// Every state over `vars` (other variables null) that satisfies `p`.
///
/// Equal to filtering [`enum_states`] through [`satisfies`] whenever the
/// heap cap admits every model, but generated directly from the formula.
pub fn models(dom: &DomainSpec, p: &Assertion, vars: &VarSet) -> BTreeSet<State> {
    let mut out = BTreeSet::new();
    for d in &p.disjuncts {
        models_quantified(dom, d, vars, &mut out);
    }
    out
}

fn models_quantified(dom: &DomainSpec, q: &QuantifiedHeap, vars: &VarSet, out: &mut BTreeSet<State>) {
    let mut fresh = FreshNames::new(vars.iter().cloned().chain(q.all_vars()).collect());
    let q = q.freshen_binders(vars, &mut fresh);
    let body = &q.body;
    let body_fv = body.fv();
    // variables outside `vars` that are not bound are fixed to null
    let mut order: Vec<Var> = vars.iter().cloned().collect();
    order.extend(q.binders.iter().filter(|b| body_fv.contains(*b)).cloned());
    let index: BTreeMap<Var, usize> = order.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let ready_at = |ts: &[&Term]| {
        ts.iter()
            .filter_map(|t| t.as_var().and_then(|v| index.get(v).copied()))
            .max()
    };

    // constraints grouped by the depth at which they become checkable
    let mut checks: Vec<Vec<Check>> = vec![Vec::new(); order.len() + 1];
    for a in body.pure() {
        let c = Check::Pure(a.clone());
        match ready_at(&[a.lhs(), a.rhs()]) {
            Some(i) => checks[i + 1].push(c),
            None => checks[0].push(c),
        }
    }
    let srcs: Vec<Term> = body.spatial().iter().map(|a| Term::Var(a.source().clone())).collect();
    for (i, s) in srcs.iter().enumerate() {
        let d = ready_at(&[s]);
        checks[d.map_or(0, |d| d + 1)].push(Check::Source(s.clone()));
        for s2 in &srcs[..i] {
            let d = ready_at(&[s, s2]);
            checks[d.map_or(0, |d| d + 1)].push(Check::Distinct(s.clone(), s2.clone()));
        }
    }

    let mut e = ModelEnum {
        vars_len: vars.len(),
        order: &order,
        index: &index,
        checks: &checks,
        body,
        values: dom.values(),
        assign: Vec::with_capacity(order.len()),
        out,
    };
    if e.passes(0) {
        e.go();
    }
}

struct ModelEnum<'a> {
    vars_len: usize,
    order: &'a [Var],
    index: &'a BTreeMap<Var, usize>,
    checks: &'a [Vec<Check>],
    body: &'a SymbolicHeap,
    values: Vec<Value>,
    assign: Vec<Value>,
    out: &'a mut BTreeSet<State>,
}

impl ModelEnum<'_> {
    fn eval(&self, t: &Term) -> Value {
        match t.as_var().and_then(|v| self.index.get(v)) {
            Some(&i) => self.assign[i],
            None => Value::Null,
        }
    }

    fn passes(&self, depth: usize) -> bool {
        self.checks[depth].iter().all(|c| match c {
            Check::Pure(a) => (self.eval(a.lhs()) == self.eval(a.rhs())) == (a.kind() == PureKind::Eq),
            Check::Source(s) => self.eval(s) != Value::Null,
            Check::Distinct(a, b) => self.eval(a) != self.eval(b),
        })
    }

    fn go(&mut self) {
        if self.assign.len() == self.order.len() {
            let mut store = Store::new();
            for (i, v) in self.order.iter().enumerate().take(self.vars_len) {
                store.set(v, self.assign[i]);
            }
            let mut heap = Heap::new();
            for a in self.body.spatial() {
                let Value::Loc(l) = self.eval(&Term::Var(a.source().clone())) else {
                    unreachable!("sources are checked non-null")
                };
                let cell = match a {
                    SpatialAtom::PointsTo(_, t) => Cell::Val(self.eval(t)),
                    SpatialAtom::NegPoints(_) => Cell::Dealloc,
                };
                heap.set(l, cell);
            }
            self.out.insert(State::new(store, heap));
            return;
        }
        for k in 0..self.values.len() {
            self.assign.push(self.values[k]);
            if self.passes(self.assign.len()) {
                self.go();
            }
            self.assign.pop();
        }
    }
}

#[derive(Clone, Debug)]
enum Check {
    Pure(PureAtom),
    Source(Term),
    Distinct(Term, Term),
}
// ---------------------------------------------------------------------------
// enumeration

/// Every store over `vars` crossed with every heap of at most
/// `max_cells` cells, in a fixed order: stores vary slowest, heaps grow by
/// size.
pub fn enum_states(dom: &DomainSpec, vars: &VarSet) -> Vec<State> {
    let values = dom.values();
    let mut stores = vec![Store::new()];
    for v in vars {
        stores = stores
            .into_iter()
            .flat_map(|s| values.iter().map(move |val| s.clone().with(v, *val)))
            .collect();
    }
    let mut cells: Vec<Cell> = values.iter().map(|v| Cell::Val(*v)).collect();
    cells.push(Cell::Dealloc);
    let locs: Vec<u8> = dom.locs().collect();
    let mut heaps = Vec::new();
    for size in 0..=dom.max_cells.min(locs.len()) {
        for subset in subsets(&locs, size) {
            let mut partial = vec![Heap::new()];
            for l in subset {
                partial = partial
                    .into_iter()
                    .flat_map(|h| cells.iter().map(move |c| h.clone().with(l, *c)))
                    .collect();
            }
            heaps.extend(partial);
        }
    }
    let mut out = Vec::with_capacity(stores.len() * heaps.len());
    for s in &stores {
        for h in &heaps {
            out.push(State::new(s.clone(), h.clone()));
        }
    }
    out
}

fn subsets(items: &[u8], k: usize) -> Vec<Vec<u8>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if items.len() < k {
        return Vec::new();
    }
    let mut out: Vec<Vec<u8>> = subsets(&items[1..], k - 1)
        .into_iter()
        .map(|mut s| {
            s.insert(0, items[0]);
            s
        })
        .collect();
    out.extend(subsets(&items[1..], k));
    out
}

// ---------------------------------------------------------------------------
// execution

/// Final states of one command from one state, split by exit condition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    pub ok: BTreeSet<State>,
    pub er: BTreeSet<State>,
}

impl Outcome {
    fn ok(st: State) -> Self {
        Outcome {
            ok: [st].into(),
            er: BTreeSet::new(),
        }
    }

    fn er(st: State) -> Self {
        Outcome {
            ok: BTreeSet::new(),
            er: [st].into(),
        }
    }

    fn absorb(&mut self, other: Outcome) {
        self.ok.extend(other.ok);
        self.er.extend(other.er);
    }

    pub fn get(&self, exit: ExitCondition) -> &BTreeSet<State> {
        match exit {
            ExitCondition::Ok => &self.ok,
            ExitCondition::Er => &self.er,
        }
    }

    pub fn into_exit(self, exit: ExitCondition) -> BTreeSet<State> {
        match exit {
            ExitCondition::Ok => self.ok,
            ExitCondition::Er => self.er,
        }
    }
}

/// `⟦C⟧` from `st` with every `C⋆` truncated to at most `loop_bound`
/// iterations.
pub fn run(dom: &DomainSpec, st: &State, c: &Command, loop_bound: usize) -> Result<Outcome, DomainExhausted> {
    Interp { dom, loop_bound }.run(c, st)
}

/// `{σ' | (σ, σ') ∈ ⟦C⟧_ε}` under the loop bound.
pub fn exec(
    dom: &DomainSpec,
    st: &State,
    c: &Command,
    exit: ExitCondition,
    loop_bound: usize,
) -> Result<BTreeSet<State>, DomainExhausted> {
    Ok(run(dom, st, c, loop_bound)?.into_exit(exit))
}

struct Interp<'a> {
    dom: &'a DomainSpec,
    loop_bound: usize,
}

impl Interp<'_> {
    fn run(&self, c: &Command, st: &State) -> Result<Outcome, DomainExhausted> {
        Ok(match c {
            Command::Skip => Outcome::ok(st.clone()),
            Command::Error => Outcome::er(st.clone()),
            Command::Assign(x, t) => {
                let mut s = st.clone();
                s.store.set(x, st.store.eval(t));
                Outcome::ok(s)
            }
            Command::Havoc(x) => {
                let mut out = Outcome::default();
                for v in self.dom.values() {
                    let mut s = st.clone();
                    s.store.set(x, v);
                    out.ok.insert(s);
                }
                out
            }
            Command::Assume(b) => {
                if holds_pure(&st.store, b) {
                    Outcome::ok(st.clone())
                } else {
                    Outcome::default()
                }
            }
            Command::Local(x, body) => {
                let saved = st.store.get(x);
                let mut out = Outcome::default();
                for v in self.dom.values() {
                    let mut s = st.clone();
                    s.store.set(x, v);
                    let r = self.run(body, &s)?;
                    for mut s2 in r.ok {
                        s2.store.set(x, saved);
                        out.ok.insert(s2);
                    }
                    for mut s2 in r.er {
                        s2.store.set(x, saved);
                        out.er.insert(s2);
                    }
                }
                out
            }
            Command::Seq(c1, c2) => {
                let r1 = self.run(c1, st)?;
                let mut out = Outcome {
                    ok: BTreeSet::new(),
                    er: r1.er,
                };
                for s in &r1.ok {
                    out.absorb(self.run(c2, s)?);
                }
                out
            }
            Command::Choice(c1, c2) => {
                let mut out = self.run(c1, st)?;
                out.absorb(self.run(c2, st)?);
                out
            }
            Command::Star(body) => {
                // breadth-first by iteration count: a state first reached
                // after k iterations contributes its errors iff k < bound
                let mut visited: BTreeSet<State> = [st.clone()].into();
                let mut frontier = vec![st.clone()];
                let mut er = BTreeSet::new();
                for _ in 0..self.loop_bound {
                    let mut next = Vec::new();
                    for s in &frontier {
                        let r = self.run(body, s)?;
                        er.extend(r.er);
                        for s2 in r.ok {
                            if visited.insert(s2.clone()) {
                                next.push(s2);
                            }
                        }
                    }
                    if next.is_empty() {
                        break;
                    }
                    frontier = next;
                }
                Outcome { ok: visited, er }
            }
            Command::Alloc(x) => {
                let mut out = Outcome::default();
                for l in self.dom.locs() {
                    if matches!(st.heap.get(l), None | Some(Cell::Dealloc)) {
                        for v in self.dom.values() {
                            let mut s = st.clone();
                            s.store.set(x, Value::Loc(l));
                            s.heap.set(l, Cell::Val(v));
                            out.ok.insert(s);
                        }
                    }
                }
                if out.ok.is_empty() {
                    return Err(DomainExhausted {
                        locations: self.dom.locations,
                    });
                }
                out
            }
            Command::Free(x) => {
                let a = st.store.get(x);
                match (a, st.heap.allocated(a)) {
                    (Value::Loc(l), Some(_)) => {
                        let mut s = st.clone();
                        s.heap.set(l, Cell::Dealloc);
                        Outcome::ok(s)
                    }
                    _ => Outcome::er(st.clone()),
                }
            }
            Command::Load(x, y) => match st.heap.allocated(st.store.get(y)) {
                Some(v) => {
                    let mut s = st.clone();
                    s.store.set(x, v);
                    Outcome::ok(s)
                }
                None => Outcome::er(st.clone()),
            },
            Command::Store(x, t) => {
                let a = st.store.get(x);
                match (a, st.heap.allocated(a)) {
                    (Value::Loc(l), Some(_)) => {
                        let mut s = st.clone();
                        s.heap.set(l, Cell::Val(st.store.eval(t)));
                        Outcome::ok(s)
                    }
                    _ => Outcome::er(st.clone()),
                }
            }
            sugar => self.run(&sugar.expand_sugar(), st)?,
        })
    }
}

// ---------------------------------------------------------------------------
// oracles

/// `WPO⟦P, C, ε⟧` over the domain, tracking `fv(P) ∪ fv(C)`.
pub fn brute_wpo(
    dom: &DomainSpec,
    p: &Assertion,
    c: &Command,
    exit: ExitCondition,
    loop_bound: usize,
) -> Result<BTreeSet<State>, DomainExhausted> {
    let mut vars = p.fv();
    vars.extend(c.fv());
    brute_wpo_over(dom, p, c, exit, loop_bound, &vars, ExecMode::default())
}

/// [`brute_wpo`] with explicit tracked variables and execution mode. The
/// input states are every model of `P`, so no heap cap can exclude one.
pub fn brute_wpo_over(
    dom: &DomainSpec,
    p: &Assertion,
    c: &Command,
    exit: ExitCondition,
    loop_bound: usize,
    vars: &VarSet,
    mode: ExecMode,
) -> Result<BTreeSet<State>, DomainExhausted> {
    let pre: Vec<State> = models(dom, p, vars).into_iter().collect();
    let results = par::map(mode, &pre, |s| exec(dom, s, c, exit, loop_bound));
    let mut out = BTreeSet::new();
    for r in results {
        out.extend(r?);
    }
    Ok(out)
}

/// Validity relative to the domain and loop bound: every `Q`-state is
/// reachable from some `P`-state.
pub fn brute_valid(dom: &DomainSpec, t: &Triple, loop_bound: usize) -> Result<bool, DomainExhausted> {
    Ok(brute_counterexample(dom, t, loop_bound)?.is_none())
}

/// The first `Q`-state (in state order) outside the reachable set.
pub fn brute_counterexample(dom: &DomainSpec, t: &Triple, loop_bound: usize) -> Result<Option<State>, DomainExhausted> {
    let vars = triple_vars(t);
    let reach = brute_wpo_over(dom, &t.pre, &t.cmd, t.exit, loop_bound, &vars, ExecMode::default())?;
    Ok(models(dom, &t.post, &vars).into_iter().find(|s| !reach.contains(s)))
}

/// `fv(P) ∪ fv(C) ∪ fv(Q)`.
pub fn triple_vars(t: &Triple) -> VarSet {
    let mut vars = t.pre.fv();
    vars.extend(t.cmd.fv());
    vars.extend(t.post.fv());
    vars
}

/// Predecessors of `target`: `P`-states that reach it with exit `ε`.
pub fn predecessors(
    dom: &DomainSpec,
    t: &Triple,
    target: &State,
    loop_bound: usize,
) -> Result<Vec<State>, DomainExhausted> {
    let vars = triple_vars(t);
    let mut out = Vec::new();
    for s in models(dom, &t.pre, &vars) {
        if exec(dom, &s, &t.cmd, t.exit, loop_bound)?.contains(target) {
            out.push(s);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_assertion, parse_command, parse_triple};

    fn x() -> Var {
        Var::new("x")
    }

    fn st(store: &[(&str, Value)], heap: &[(u8, Cell)]) -> State {
        let mut s = Store::new();
        for (v, val) in store {
            s.set(&Var::new(v), *val);
        }
        let mut h = Heap::new();
        for (l, c) in heap {
            h.set(*l, *c);
        }
        State::new(s, h)
    }

    const L1: Value = Value::Loc(1);
    const L2: Value = Value::Loc(2);

    #[test]
    fn satisfaction_clauses() {
        let dom = DomainSpec::new(2, 2);
        let p = parse_assertion("x -> null").unwrap();
        assert!(satisfies(&dom, &st(&[("x", L1)], &[(1, Cell::Val(Value::Null))]), &p));
        let dealloc = st(&[("x", L1)], &[(1, Cell::Dealloc)]);
        assert!(!satisfies(&dom, &dealloc, &p));
        assert!(satisfies(&dom, &dealloc, &parse_assertion("x -/>").unwrap()));
        let shared = st(&[("x", L1), ("y", L1)], &[(1, Cell::Val(Value::Null))]);
        assert!(!satisfies(
            &dom,
            &shared,
            &parse_assertion("x -> null * y -> null").unwrap()
        ));
    }

    #[test]
    fn pure_atoms_need_empty_heap() {
        let dom = DomainSpec::new(2, 2);
        let p = parse_assertion("x == x").unwrap();
        assert!(satisfies(&dom, &st(&[], &[]), &p));
        assert!(!satisfies(&dom, &st(&[], &[(1, Cell::Dealloc)]), &p));
    }

    #[test]
    fn existentials_range_over_values() {
        let dom = DomainSpec::new(2, 2);
        let p = parse_assertion("exists v . x -> v * v != null").unwrap();
        assert!(satisfies(&dom, &st(&[("x", L1)], &[(1, Cell::Val(L2))]), &p));
        assert!(!satisfies(&dom, &st(&[("x", L1)], &[(1, Cell::Val(Value::Null))]), &p));
    }

    #[test]
    fn free_ok_and_er() {
        let dom = DomainSpec::new(2, 2);
        let c = Command::Free(x());
        let s = st(&[("x", L1)], &[(1, Cell::Val(L2))]);
        let out = exec(&dom, &s, &c, ExitCondition::Ok, 0).unwrap();
        assert_eq!(out, [st(&[("x", L1)], &[(1, Cell::Dealloc)])].into());
        let empty = st(&[("x", L1)], &[]);
        let out = exec(&dom, &empty, &c, ExitCondition::Er, 0).unwrap();
        assert_eq!(out, [empty].into());
        assert!(exec(&dom, &s, &Command::Skip, ExitCondition::Er, 0).unwrap().is_empty());
    }

    #[test]
    fn alloc_exhaustion_is_reported() {
        let dom = DomainSpec::new(1, 1);
        let s = st(&[], &[(1, Cell::Val(Value::Null))]);
        assert!(exec(&dom, &s, &Command::Alloc(x()), ExitCondition::Ok, 0).is_err());
        let s = st(&[], &[(1, Cell::Dealloc)]);
        assert_eq!(
            exec(&dom, &s, &Command::Alloc(x()), ExitCondition::Ok, 0)
                .unwrap()
                .len(),
            2
        );
    }

    #[test]
    fn local_restores_the_outer_value() {
        let dom = DomainSpec::new(1, 1);
        let c = parse_command("local x { x := null ; y := x }").unwrap();
        let out = exec(&dom, &st(&[("x", L1)], &[]), &c, ExitCondition::Ok, 0).unwrap();
        assert_eq!(out, [st(&[("x", L1)], &[])].into());
    }

    #[test]
    fn star_counts_iterations() {
        let dom = DomainSpec::new(2, 2);
        // each iteration allocates a fresh cell; bound 1 allows one allocation
        let c = parse_command("star { x := alloc() ; [x] := null }").unwrap();
        let out = exec(&dom, &st(&[], &[]), &c, ExitCondition::Ok, 1).unwrap();
        assert!(out.iter().all(|s| s.heap.len() <= 1));
        assert_eq!(out.len(), 3);
        let err = parse_command("star { error }").unwrap();
        assert!(exec(&dom, &st(&[], &[]), &err, ExitCondition::Er, 0)
            .unwrap()
            .is_empty());
        assert_eq!(exec(&dom, &st(&[], &[]), &err, ExitCondition::Er, 1).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_counts() {
        let vars: VarSet = [x()].into();
        assert_eq!(enum_states(&DomainSpec::new(1, 1), &vars).len(), 8);
        assert_eq!(enum_states(&DomainSpec::new(0, 0), &VarSet::new()).len(), 1);
        let xy: VarSet = [x(), Var::new("y")].into();
        let states = enum_states(&DomainSpec::new(2, 0), &xy);
        assert_eq!(states.len(), 9);
        assert!(states.iter().all(|s| s.heap.is_empty()));
    }

    #[test]
    fn brute_wpo_of_alloc() {
        let dom = DomainSpec::new(2, 0);
        let p = parse_assertion("emp").unwrap();
        let out = brute_wpo(&dom, &p, &Command::Alloc(x()), ExitCondition::Ok, 0).unwrap();
        assert_eq!(out.len(), 6);
        for s in &out {
            let Value::Loc(l) = s.store.get(&x()) else { panic!() };
            assert_eq!(s.heap.dom(), [l].into());
        }
        assert!(
            brute_wpo(&dom, &Assertion::false_(), &Command::Skip, ExitCondition::Ok, 0)
                .unwrap()
                .is_empty()
        );
    }

    #[test]
    fn brute_validity_examples() {
        let dom = DomainSpec::new(2, 2);
        let t = parse_triple("[ exists v . x -> v ] free(x) [ ok: x -/> ]").unwrap();
        assert!(brute_valid(&dom, &t, 0).unwrap());
        let t = parse_triple("[ emp * x -> null ] free(x) [ er: emp * x -> null ]").unwrap();
        assert!(!brute_valid(&dom, &t, 0).unwrap());
        let t = parse_triple("[ x -> null ] skip [ ok: false ]").unwrap();
        assert!(brute_valid(&dom, &t, 0).unwrap());
    }

    #[test]
    fn models_agree_with_filtered_enumeration() {
        let dom = DomainSpec::new(2, 2);
        for src in [
            "x -> y * y -/>",
            "exists a . x -> a * a != y",
            "x == y \\/ exists b . b -> x",
            "x != null * y == null",
        ] {
            let p = parse_assertion(src).unwrap();
            let vars: VarSet = [x(), Var::new("y")].into();
            let direct = models(&dom, &p, &vars);
            let filtered: BTreeSet<State> = enum_states(&dom, &vars)
                .into_iter()
                .filter(|s| satisfies(&dom, s, &p))
                .collect();
            assert_eq!(direct, filtered, "{src}");
        }
    }
}
