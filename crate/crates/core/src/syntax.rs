//! Terms, assertions, commands and triples, with the syntactic operations
//! every other module builds on: free variables, modified variables,
//! capture-avoiding substitution, fresh names and desugaring.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// A program or logical variable. Cheap to clone.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(Arc<str>);

impl Var {
    pub fn new(name: &str) -> Self {
        assert!(!name.is_empty(), "variable names must be nonempty");
        Var(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Var {
    fn from(s: &str) -> Self {
        Var::new(s)
    }
}

pub type VarSet = BTreeSet<Var>;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Null,
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(Var::new(name))
    }

    pub fn as_var(&self) -> Option<&Var> {
        match self {
            Term::Var(v) => Some(v),
            Term::Null => None,
        }
    }

    pub fn fv(&self) -> VarSet {
        self.as_var().into_iter().cloned().collect()
    }

    pub fn subst(&self, x: &Var, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == x => t.clone(),
            other => other.clone(),
        }
    }

    pub fn swap(&self, a: &Var, b: &Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(swap_var(v, a, b)),
            Term::Null => Term::Null,
        }
    }
}

impl From<Var> for Term {
    fn from(v: Var) -> Self {
        Term::Var(v)
    }
}

pub(crate) fn swap_var(v: &Var, a: &Var, b: &Var) -> Var {
    if v == a {
        b.clone()
    } else if v == b {
        a.clone()
    } else {
        v.clone()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PureKind {
    Eq,
    Neq,
}

/// `t ≈ u` or `t ≉ u`. The two sides are stored in term order so that
/// `x ≈ y` and `y ≈ x` are the same atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PureAtom {
    kind: PureKind,
    lhs: Term,
    rhs: Term,
}

impl PureAtom {
    pub fn new(kind: PureKind, a: Term, b: Term) -> Self {
        let (lhs, rhs) = if a <= b { (a, b) } else { (b, a) };
        PureAtom { kind, lhs, rhs }
    }

    pub fn eq(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        PureAtom::new(PureKind::Eq, a.into(), b.into())
    }

    pub fn neq(a: impl Into<Term>, b: impl Into<Term>) -> Self {
        PureAtom::new(PureKind::Neq, a.into(), b.into())
    }

    pub fn kind(&self) -> PureKind {
        self.kind
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn negate(&self) -> PureAtom {
        let kind = match self.kind {
            PureKind::Eq => PureKind::Neq,
            PureKind::Neq => PureKind::Eq,
        };
        PureAtom::new(kind, self.lhs.clone(), self.rhs.clone())
    }

    /// `t ≈ t`, which holds on every empty-heap state.
    pub fn is_tautology(&self) -> bool {
        self.kind == PureKind::Eq && self.lhs == self.rhs
    }

    pub fn fv(&self) -> VarSet {
        let mut s = self.lhs.fv();
        s.extend(self.rhs.fv());
        s
    }

    pub fn subst(&self, x: &Var, t: &Term) -> PureAtom {
        PureAtom::new(self.kind, self.lhs.subst(x, t), self.rhs.subst(x, t))
    }

    pub fn swap(&self, a: &Var, b: &Var) -> PureAtom {
        PureAtom::new(self.kind, self.lhs.swap(a, b), self.rhs.swap(a, b))
    }
}

/// A heap-describing atom. `emp` is not represented: it is the unit of `*`
/// and is dropped on construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SpatialAtom {
    PointsTo(Var, Term),
    NegPoints(Var),
}

impl SpatialAtom {
    pub fn source(&self) -> &Var {
        match self {
            SpatialAtom::PointsTo(x, _) | SpatialAtom::NegPoints(x) => x,
        }
    }

    pub fn fv(&self) -> VarSet {
        let mut s = VarSet::new();
        s.insert(self.source().clone());
        if let SpatialAtom::PointsTo(_, t) = self {
            s.extend(t.fv());
        }
        s
    }

    fn sort_key(&self) -> (&Var, u8, Option<&Term>) {
        match self {
            SpatialAtom::PointsTo(x, t) => (x, 0, Some(t)),
            SpatialAtom::NegPoints(x) => (x, 1, None),
        }
    }

    pub fn subst(&self, x: &Var, t: &Term) -> Result<SpatialAtom, SubstError> {
        let src = self.source();
        let new_src = if src == x {
            match t {
                Term::Var(y) => y.clone(),
                Term::Null => return Err(SubstError::NullIntoSpatialSource { var: x.clone() }),
            }
        } else {
            src.clone()
        };
        Ok(match self {
            SpatialAtom::PointsTo(_, dst) => SpatialAtom::PointsTo(new_src, dst.subst(x, t)),
            SpatialAtom::NegPoints(_) => SpatialAtom::NegPoints(new_src),
        })
    }

    pub fn swap(&self, a: &Var, b: &Var) -> SpatialAtom {
        match self {
            SpatialAtom::PointsTo(x, t) => SpatialAtom::PointsTo(swap_var(x, a, b), t.swap(a, b)),
            SpatialAtom::NegPoints(x) => SpatialAtom::NegPoints(swap_var(x, a, b)),
        }
    }
}

impl PartialOrd for SpatialAtom {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for SpatialAtom {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Any atom of the surface syntax, used to build heaps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Atom {
    Emp,
    Pure(PureAtom),
    Spatial(SpatialAtom),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("substituting null for `{var:?}` would put null in a points-to source position")]
    NullIntoSpatialSource { var: Var },
}

/// A quantifier-free symbolic heap: a `*`-conjunction of atoms, kept in a
/// normal form (pure atoms as a set without tautologies, spatial atoms as
/// a sorted multiset, no `emp`). Derived equality is therefore equality
/// modulo atom order.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolicHeap {
    pure: BTreeSet<PureAtom>,
    spatial: Vec<SpatialAtom>,
}

impl SymbolicHeap {
    pub fn emp() -> Self {
        SymbolicHeap::default()
    }

    pub fn from_atoms(atoms: impl IntoIterator<Item = Atom>) -> Self {
        let mut h = SymbolicHeap::emp();
        for a in atoms {
            h.push(a);
        }
        h
    }

    pub fn from_pure(atoms: impl IntoIterator<Item = PureAtom>) -> Self {
        SymbolicHeap::from_atoms(atoms.into_iter().map(Atom::Pure))
    }

    pub fn push(&mut self, atom: Atom) {
        match atom {
            Atom::Emp => {}
            Atom::Pure(p) => self.push_pure(p),
            Atom::Spatial(s) => self.push_spatial(s),
        }
    }

    pub fn push_pure(&mut self, p: PureAtom) {
        if !p.is_tautology() {
            self.pure.insert(p);
        }
    }

    pub fn push_spatial(&mut self, s: SpatialAtom) {
        let pos = self.spatial.partition_point(|a| a <= &s);
        self.spatial.insert(pos, s);
    }

    pub fn with_pure(mut self, p: PureAtom) -> Self {
        self.push_pure(p);
        self
    }

    pub fn with_spatial(mut self, s: SpatialAtom) -> Self {
        self.push_spatial(s);
        self
    }

    pub fn pure(&self) -> &BTreeSet<PureAtom> {
        &self.pure
    }

    pub fn spatial(&self) -> &[SpatialAtom] {
        &self.spatial
    }

    pub fn is_pure(&self) -> bool {
        self.spatial.is_empty()
    }

    pub fn is_emp(&self) -> bool {
        self.pure.is_empty() && self.spatial.is_empty()
    }

    pub fn contains_pure(&self, p: &PureAtom) -> bool {
        p.is_tautology() || self.pure.contains(p)
    }

    pub fn contains_spatial(&self, s: &SpatialAtom) -> bool {
        self.spatial.binary_search(s).is_ok()
    }

    /// Separating conjunction of two heaps.
    pub fn star(&self, other: &SymbolicHeap) -> SymbolicHeap {
        let mut out = self.clone();
        for p in &other.pure {
            out.pure.insert(p.clone());
        }
        for s in &other.spatial {
            out.push_spatial(s.clone());
        }
        out
    }

    /// Removes one occurrence of `s`, returning the remainder `ψ'` with
    /// `ψ = ψ' * s`.
    pub fn remove_spatial(&self, s: &SpatialAtom) -> Option<SymbolicHeap> {
        let pos = self.spatial.iter().position(|a| a == s)?;
        let mut out = self.clone();
        out.spatial.remove(pos);
        Some(out)
    }

    pub fn atoms(&self) -> impl Iterator<Item = Atom> + '_ {
        self.pure
            .iter()
            .cloned()
            .map(Atom::Pure)
            .chain(self.spatial.iter().cloned().map(Atom::Spatial))
    }

    pub fn fv(&self) -> VarSet {
        let mut s = VarSet::new();
        for p in &self.pure {
            s.extend(p.fv());
        }
        for a in &self.spatial {
            s.extend(a.fv());
        }
        s
    }

    pub fn subst(&self, x: &Var, t: &Term) -> Result<SymbolicHeap, SubstError> {
        let mut out = SymbolicHeap::emp();
        for p in &self.pure {
            out.push_pure(p.subst(x, t));
        }
        for a in &self.spatial {
            out.push_spatial(a.subst(x, t)?);
        }
        Ok(out)
    }

    /// Variable-for-variable substitution, which can never fail.
    pub fn rename(&self, x: &Var, y: &Var) -> SymbolicHeap {
        self.subst(x, &Term::Var(y.clone()))
            .expect("renaming to a variable is total")
    }

    pub fn swap(&self, a: &Var, b: &Var) -> SymbolicHeap {
        let mut out = SymbolicHeap::emp();
        for p in &self.pure {
            out.push_pure(p.swap(a, b));
        }
        for s in &self.spatial {
            out.push_spatial(s.swap(a, b));
        }
        out
    }
}

/// `∃x⃗. ψ`.
#[derive(Clone, Debug, Default)]
pub struct QuantifiedHeap {
    pub binders: Vec<Var>,
    pub body: SymbolicHeap,
}

impl QuantifiedHeap {
    pub fn new(binders: Vec<Var>, body: SymbolicHeap) -> Self {
        debug_assert!(
            binders.iter().collect::<BTreeSet<_>>().len() == binders.len(),
            "binders must be pairwise distinct"
        );
        QuantifiedHeap { binders, body }
    }

    pub fn unquantified(body: SymbolicHeap) -> Self {
        QuantifiedHeap {
            binders: Vec::new(),
            body,
        }
    }

    pub fn fv(&self) -> VarSet {
        let mut s = self.body.fv();
        for b in &self.binders {
            s.remove(b);
        }
        s
    }

    /// Every variable name occurring in the formula, bound or free.
    pub fn all_vars(&self) -> VarSet {
        let mut s = self.body.fv();
        s.extend(self.binders.iter().cloned());
        s
    }

    /// Binders renamed to positional names that cannot appear in parsed
    /// input, giving a representative of the alpha-equivalence class.
    pub fn alpha_key(&self) -> (usize, SymbolicHeap) {
        if self.binders.is_empty() {
            return (0, self.body.clone());
        }
        // rename in two steps so a binder called `%1` cannot be captured
        let mut body = self.body.clone();
        let tmp: Vec<Var> = (0..self.binders.len()).map(|i| Var::new(&format!("%t{i}"))).collect();
        for (b, t) in self.binders.iter().zip(&tmp) {
            body = body.rename(b, t);
        }
        for (i, t) in tmp.iter().enumerate() {
            body = body.rename(t, &Var::new(&format!("%{i}")));
        }
        (self.binders.len(), body)
    }

    pub fn alpha_eq(&self, other: &QuantifiedHeap) -> bool {
        if self.binders.len() != other.binders.len() {
            return false;
        }
        if self.binders == other.binders {
            return self.body == other.body;
        }
        self.alpha_key() == other.alpha_key()
    }

    /// Capture-avoiding substitution of `t` for the free occurrences of `x`.
    pub fn subst(&self, x: &Var, t: &Term) -> Result<QuantifiedHeap, SubstError> {
        if self.binders.contains(x) || !self.body.fv().contains(x) {
            return Ok(self.clone());
        }
        let tfv = t.fv();
        let mut avoid = self.all_vars();
        avoid.extend(tfv.iter().cloned());
        avoid.insert(x.clone());
        let mut binders = Vec::with_capacity(self.binders.len());
        let mut body = self.body.clone();
        for b in &self.binders {
            if tfv.contains(b) {
                let nb = fresh_var(b, &avoid);
                avoid.insert(nb.clone());
                body = body.rename(b, &nb);
                binders.push(nb);
            } else {
                binders.push(b.clone());
            }
        }
        Ok(QuantifiedHeap {
            binders,
            body: body.subst(x, t)?,
        })
    }

    pub fn rename_free(&self, x: &Var, y: &Var) -> QuantifiedHeap {
        self.subst(x, &Term::Var(y.clone()))
            .expect("renaming to a variable is total")
    }

    /// Renames every binder that occurs in `avoid` to a fresh name.
    pub fn freshen_binders(&self, avoid: &VarSet, fresh: &mut FreshNames) -> QuantifiedHeap {
        let mut out = self.clone();
        for i in 0..out.binders.len() {
            let b = out.binders[i].clone();
            if avoid.contains(&b) {
                let nb = fresh.fresh(&b);
                out.body = out.body.rename(&b, &nb);
                out.binders[i] = nb;
            }
        }
        out
    }

    pub fn swap(&self, a: &Var, b: &Var) -> QuantifiedHeap {
        QuantifiedHeap {
            binders: self.binders.iter().map(|v| swap_var(v, a, b)).collect(),
            body: self.body.swap(a, b),
        }
    }

    /// `∃x. self`, with `x` prepended to the binder list unless it is
    /// already bound here.
    pub fn exists(&self, x: &Var) -> QuantifiedHeap {
        if self.binders.contains(x) {
            return self.clone();
        }
        let mut binders = Vec::with_capacity(self.binders.len() + 1);
        binders.push(x.clone());
        binders.extend(self.binders.iter().cloned());
        QuantifiedHeap {
            binders,
            body: self.body.clone(),
        }
    }
}

impl PartialEq for QuantifiedHeap {
    fn eq(&self, other: &Self) -> bool {
        self.alpha_eq(other)
    }
}

impl Eq for QuantifiedHeap {}

impl From<SymbolicHeap> for QuantifiedHeap {
    fn from(body: SymbolicHeap) -> Self {
        QuantifiedHeap::unquantified(body)
    }
}

/// A finite disjunction of quantified heaps; the empty disjunction is `false`.
#[derive(Clone, Debug, Default)]
pub struct Assertion {
    pub disjuncts: Vec<QuantifiedHeap>,
}

impl Assertion {
    pub fn false_() -> Self {
        Assertion::default()
    }

    pub fn new(disjuncts: Vec<QuantifiedHeap>) -> Self {
        Assertion { disjuncts }
    }

    pub fn is_false(&self) -> bool {
        self.disjuncts.is_empty()
    }

    pub fn or(mut self, other: Assertion) -> Assertion {
        self.disjuncts.extend(other.disjuncts);
        self
    }

    pub fn fv(&self) -> VarSet {
        let mut s = VarSet::new();
        for d in &self.disjuncts {
            s.extend(d.fv());
        }
        s
    }

    pub fn all_vars(&self) -> VarSet {
        let mut s = VarSet::new();
        for d in &self.disjuncts {
            s.extend(d.all_vars());
        }
        s
    }

    /// The single quantifier-free disjunct, if the assertion is one.
    pub fn as_heap(&self) -> Option<&SymbolicHeap> {
        match self.disjuncts.as_slice() {
            [d] if d.binders.is_empty() => Some(&d.body),
            _ => None,
        }
    }

    pub fn max_spatial(&self) -> usize {
        self.disjuncts.iter().map(|d| d.body.spatial().len()).max().unwrap_or(0)
    }

    pub fn subst(&self, x: &Var, t: &Term) -> Result<Assertion, SubstError> {
        let disjuncts = self.disjuncts.iter().map(|d| d.subst(x, t)).collect::<Result<_, _>>()?;
        Ok(Assertion { disjuncts })
    }

    pub fn rename_free(&self, x: &Var, y: &Var) -> Assertion {
        Assertion {
            disjuncts: self.disjuncts.iter().map(|d| d.rename_free(x, y)).collect(),
        }
    }

    pub fn swap(&self, a: &Var, b: &Var) -> Assertion {
        Assertion {
            disjuncts: self.disjuncts.iter().map(|d| d.swap(a, b)).collect(),
        }
    }

    /// `∃x. self`, distributed over the disjuncts.
    pub fn exists(&self, x: &Var) -> Assertion {
        Assertion {
            disjuncts: self.disjuncts.iter().map(|d| d.exists(x)).collect(),
        }
    }

    /// `∃x1 … xn. self`, keeping the binder order.
    pub fn exists_all(&self, xs: &[Var]) -> Assertion {
        xs.iter().rev().fold(self.clone(), |acc, x| acc.exists(x))
    }

    /// Disjuncts deduplicated up to alpha-equivalence and sorted by their
    /// alpha representative; the normal form used for printing and for
    /// comparing assertions as sets of disjuncts.
    pub fn normalized(&self) -> Assertion {
        let mut keyed: Vec<((usize, SymbolicHeap), &QuantifiedHeap)> =
            self.disjuncts.iter().map(|d| (d.alpha_key(), d)).collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        keyed.dedup_by(|a, b| a.0 == b.0);
        Assertion {
            disjuncts: keyed.into_iter().map(|(_, d)| d.clone()).collect(),
        }
    }

    /// Equality as sets of disjuncts up to alpha-equivalence.
    pub fn same_disjuncts(&self, other: &Assertion) -> bool {
        let a: BTreeSet<_> = self.disjuncts.iter().map(|d| d.alpha_key()).collect();
        let b: BTreeSet<_> = other.disjuncts.iter().map(|d| d.alpha_key()).collect();
        a == b
    }

    /// Every disjunct of `self` occurs (up to alpha) in `other`.
    pub fn disjuncts_subset_of(&self, other: &Assertion) -> bool {
        let b: BTreeSet<_> = other.disjuncts.iter().map(|d| d.alpha_key()).collect();
        self.disjuncts.iter().all(|d| b.contains(&d.alpha_key()))
    }
}

impl PartialEq for Assertion {
    fn eq(&self, other: &Self) -> bool {
        self.disjuncts.len() == other.disjuncts.len()
            && self.disjuncts.iter().zip(&other.disjuncts).all(|(a, b)| a == b)
    }
}

impl Eq for Assertion {}

impl From<SymbolicHeap> for Assertion {
    fn from(h: SymbolicHeap) -> Self {
        Assertion {
            disjuncts: vec![h.into()],
        }
    }
}

impl From<QuantifiedHeap> for Assertion {
    fn from(q: QuantifiedHeap) -> Self {
        Assertion { disjuncts: vec![q] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExitCondition {
    Ok,
    Er,
}

impl ExitCondition {
    pub const ALL: [ExitCondition; 2] = [ExitCondition::Ok, ExitCondition::Er];
}

/// Program syntax: the core language plus the `if`/`while`/`assert`/`malloc`
/// sugar, which [`Command::desugar`] expands away.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Command {
    Skip,
    Assign(Var, Term),
    Havoc(Var),
    Assume(SymbolicHeap),
    Local(Var, Box<Command>),
    Seq(Box<Command>, Box<Command>),
    Choice(Box<Command>, Box<Command>),
    Star(Box<Command>),
    Alloc(Var),
    Free(Var),
    Load(Var, Var),
    Store(Var, Term),
    Error,
    If(SymbolicHeap, Box<Command>, Box<Command>),
    While(SymbolicHeap, Box<Command>),
    Assert(SymbolicHeap),
    Malloc(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("assume/if/while/assert conditions must be pure, found a spatial atom")]
pub struct ImpureCondition;

impl Command {
    pub fn seq(a: Command, b: Command) -> Command {
        Command::Seq(Box::new(a), Box::new(b))
    }

    pub fn choice(a: Command, b: Command) -> Command {
        Command::Choice(Box::new(a), Box::new(b))
    }

    pub fn star(c: Command) -> Command {
        Command::Star(Box::new(c))
    }

    pub fn local(x: Var, c: Command) -> Command {
        Command::Local(x, Box::new(c))
    }

    pub fn assume(b: SymbolicHeap) -> Result<Command, ImpureCondition> {
        if b.is_pure() {
            Ok(Command::Assume(b))
        } else {
            Err(ImpureCondition)
        }
    }

    /// Right-nested sequence of the given commands; `skip` when empty.
    pub fn seq_all(cmds: impl IntoIterator<Item = Command>) -> Command {
        let mut v: Vec<Command> = cmds.into_iter().collect();
        let Some(mut acc) = v.pop() else {
            return Command::Skip;
        };
        while let Some(c) = v.pop() {
            acc = Command::seq(c, acc);
        }
        acc
    }

    pub fn is_sugar(&self) -> bool {
        matches!(
            self,
            Command::If(..) | Command::While(..) | Command::Assert(_) | Command::Malloc(_)
        )
    }

    /// True when no sugar occurs anywhere in the command.
    pub fn is_core(&self) -> bool {
        match self {
            c if c.is_sugar() => false,
            Command::Local(_, c) | Command::Star(c) => c.is_core(),
            Command::Seq(a, b) | Command::Choice(a, b) => a.is_core() && b.is_core(),
            _ => true,
        }
    }

    pub fn fv(&self) -> VarSet {
        let mut s = VarSet::new();
        self.collect_fv(&mut s);
        s
    }

    fn collect_fv(&self, s: &mut VarSet) {
        match self {
            Command::Skip | Command::Error => {}
            Command::Assign(x, t) | Command::Store(x, t) => {
                s.insert(x.clone());
                s.extend(t.fv());
            }
            Command::Havoc(x) | Command::Alloc(x) | Command::Free(x) | Command::Malloc(x) => {
                s.insert(x.clone());
            }
            Command::Load(x, y) => {
                s.insert(x.clone());
                s.insert(y.clone());
            }
            Command::Assume(b) | Command::Assert(b) => s.extend(b.fv()),
            Command::Local(x, c) => {
                let mut inner = c.fv();
                inner.remove(x);
                s.extend(inner);
            }
            Command::Seq(a, b) | Command::Choice(a, b) => {
                a.collect_fv(s);
                b.collect_fv(s);
            }
            Command::Star(c) => c.collect_fv(s),
            Command::If(b, c1, c2) => {
                s.extend(b.fv());
                c1.collect_fv(s);
                c2.collect_fv(s);
            }
            Command::While(b, c) => {
                s.extend(b.fv());
                c.collect_fv(s);
            }
        }
    }

    /// Every variable name in the command, including `local` binders.
    pub fn all_vars(&self) -> VarSet {
        let mut s = self.fv();
        self.collect_binders(&mut s);
        s
    }

    fn collect_binders(&self, s: &mut VarSet) {
        match self {
            Command::Local(x, c) => {
                s.insert(x.clone());
                s.extend(c.fv());
                c.collect_binders(s);
            }
            Command::Seq(a, b) | Command::Choice(a, b) | Command::If(_, a, b) => {
                a.collect_binders(s);
                b.collect_binders(s);
            }
            Command::Star(c) | Command::While(_, c) => c.collect_binders(s),
            _ => {}
        }
    }

    /// Variables the command may assign.
    pub fn mod_of(&self) -> VarSet {
        match self {
            Command::Skip
            | Command::Assume(_)
            | Command::Error
            | Command::Free(_)
            | Command::Store(..)
            | Command::Assert(_) => VarSet::new(),
            Command::Assign(x, _)
            | Command::Havoc(x)
            | Command::Alloc(x)
            | Command::Load(x, _)
            | Command::Malloc(x) => [x.clone()].into(),
            Command::Local(x, c) => {
                let mut m = c.mod_of();
                m.remove(x);
                m
            }
            Command::Seq(a, b) | Command::Choice(a, b) | Command::If(_, a, b) => {
                let mut m = a.mod_of();
                m.extend(b.mod_of());
                m
            }
            Command::Star(c) | Command::While(_, c) => c.mod_of(),
        }
    }

    /// Number of `alloc`/`malloc` sites.
    pub fn alloc_sites(&self) -> usize {
        match self {
            Command::Alloc(_) | Command::Malloc(_) => 1,
            Command::Local(_, c) | Command::Star(c) | Command::While(_, c) => c.alloc_sites(),
            Command::Seq(a, b) | Command::Choice(a, b) | Command::If(_, a, b) => a.alloc_sites() + b.alloc_sites(),
            _ => 0,
        }
    }

    pub fn contains_star(&self) -> bool {
        match self {
            Command::Star(_) | Command::While(..) => true,
            Command::Local(_, c) => c.contains_star(),
            Command::Seq(a, b) | Command::Choice(a, b) | Command::If(_, a, b) => a.contains_star() || b.contains_star(),
            _ => false,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Command::Local(_, c) | Command::Star(c) | Command::While(_, c) => 1 + c.depth(),
            Command::Seq(a, b) | Command::Choice(a, b) | Command::If(_, a, b) => 1 + a.depth().max(b.depth()),
            _ => 1,
        }
    }

    /// Replaces the free occurrences of `x` by `z`, which must not be bound
    /// anywhere inside the command.
    pub fn rename_free(&self, x: &Var, z: &Var) -> Command {
        let rv = |v: &Var| if v == x { z.clone() } else { v.clone() };
        let zt = Term::Var(z.clone());
        let rt = |t: &Term| t.subst(x, &zt);
        let rh = |h: &SymbolicHeap| h.rename(x, z);
        match self {
            Command::Skip => Command::Skip,
            Command::Error => Command::Error,
            Command::Assign(v, t) => Command::Assign(rv(v), rt(t)),
            Command::Havoc(v) => Command::Havoc(rv(v)),
            Command::Assume(b) => Command::Assume(rh(b)),
            Command::Local(v, c) if v == x => self.clone(),
            Command::Local(v, c) => Command::local(v.clone(), c.rename_free(x, z)),
            Command::Seq(a, b) => Command::seq(a.rename_free(x, z), b.rename_free(x, z)),
            Command::Choice(a, b) => Command::choice(a.rename_free(x, z), b.rename_free(x, z)),
            Command::Star(c) => Command::star(c.rename_free(x, z)),
            Command::Alloc(v) => Command::Alloc(rv(v)),
            Command::Free(v) => Command::Free(rv(v)),
            Command::Load(v, w) => Command::Load(rv(v), rv(w)),
            Command::Store(v, t) => Command::Store(rv(v), rt(t)),
            Command::If(b, c1, c2) => {
                Command::If(rh(b), Box::new(c1.rename_free(x, z)), Box::new(c2.rename_free(x, z)))
            }
            Command::While(b, c) => Command::While(rh(b), Box::new(c.rename_free(x, z))),
            Command::Assert(b) => Command::Assert(rh(b)),
            Command::Malloc(v) => Command::Malloc(rv(v)),
        }
    }

    /// Exchanges the names `a` and `b` everywhere, binders included.
    pub fn swap(&self, a: &Var, b: &Var) -> Command {
        let sv = |v: &Var| swap_var(v, a, b);
        let sh = |h: &SymbolicHeap| h.swap(a, b);
        let bx = |c: &Command| Box::new(c.swap(a, b));
        match self {
            Command::Skip => Command::Skip,
            Command::Error => Command::Error,
            Command::Assign(v, t) => Command::Assign(sv(v), t.swap(a, b)),
            Command::Havoc(v) => Command::Havoc(sv(v)),
            Command::Assume(h) => Command::Assume(sh(h)),
            Command::Local(v, c) => Command::Local(sv(v), bx(c)),
            Command::Seq(c1, c2) => Command::Seq(bx(c1), bx(c2)),
            Command::Choice(c1, c2) => Command::Choice(bx(c1), bx(c2)),
            Command::Star(c) => Command::Star(bx(c)),
            Command::Alloc(v) => Command::Alloc(sv(v)),
            Command::Free(v) => Command::Free(sv(v)),
            Command::Load(v, w) => Command::Load(sv(v), sv(w)),
            Command::Store(v, t) => Command::Store(sv(v), t.swap(a, b)),
            Command::If(h, c1, c2) => Command::If(sh(h), bx(c1), bx(c2)),
            Command::While(h, c) => Command::While(sh(h), bx(c)),
            Command::Assert(h) => Command::Assert(sh(h)),
            Command::Malloc(v) => Command::Malloc(sv(v)),
        }
    }

    /// One level of sugar expansion; core commands are returned unchanged.
    pub fn expand_sugar(&self) -> Command {
        match self {
            Command::If(b, c1, c2) => Command::choice(
                Command::seq(Command::Assume(b.clone()), (**c1).clone()),
                Command::seq(assume_not(b), (**c2).clone()),
            ),
            Command::While(b, c) => Command::seq(
                Command::star(Command::seq(Command::Assume(b.clone()), (**c).clone())),
                assume_not(b),
            ),
            Command::Assert(b) => {
                Command::choice(Command::seq(assume_not(b), Command::Error), Command::Assume(b.clone()))
            }
            Command::Malloc(x) => Command::choice(Command::Alloc(x.clone()), Command::Assign(x.clone(), Term::Null)),
            other => other.clone(),
        }
    }

    /// Full recursive desugaring into the core language.
    pub fn desugar(&self) -> Command {
        match self {
            c if c.is_sugar() => c.expand_sugar().desugar(),
            Command::Local(x, c) => Command::local(x.clone(), c.desugar()),
            Command::Seq(a, b) => Command::seq(a.desugar(), b.desugar()),
            Command::Choice(a, b) => Command::choice(a.desugar(), b.desugar()),
            Command::Star(c) => Command::star(c.desugar()),
            other => other.clone(),
        }
    }
}

/// `assume(!B)` for `B = b1 * … * bn`: `assume(¬b1) + … + assume(¬bn)`.
/// With no atoms `B` is `emp` (true) and its negation never passes.
pub fn assume_not(b: &SymbolicHeap) -> Command {
    let negs: Vec<Command> = b
        .pure()
        .iter()
        .map(|a| Command::Assume(SymbolicHeap::emp().with_pure(a.negate())))
        .collect();
    let mut it = negs.into_iter().rev();
    match it.next() {
        None => Command::Assume(SymbolicHeap::emp().with_pure(PureAtom::neq(Term::Null, Term::Null))),
        Some(last) => it.fold(last, |acc, c| Command::choice(c, acc)),
    }
}

/// `[P] C [ε: Q]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triple {
    pub pre: Assertion,
    pub cmd: Command,
    pub exit: ExitCondition,
    pub post: Assertion,
}

impl Triple {
    pub fn new(pre: Assertion, cmd: Command, exit: ExitCondition, post: Assertion) -> Self {
        Triple { pre, cmd, exit, post }
    }

    pub fn all_vars(&self) -> VarSet {
        let mut s = self.pre.all_vars();
        s.extend(self.post.all_vars());
        s.extend(self.cmd.all_vars());
        s
    }

    pub fn swap(&self, a: &Var, b: &Var) -> Triple {
        Triple {
            pre: self.pre.swap(a, b),
            cmd: self.cmd.swap(a, b),
            exit: self.exit,
            post: self.post.swap(a, b),
        }
    }

    /// Same command and exit; pre and post equal as sets of disjuncts.
    pub fn matches(&self, other: &Triple) -> bool {
        self.exit == other.exit
            && self.cmd == other.cmd
            && self.pre.same_disjuncts(&other.pre)
            && self.post.same_disjuncts(&other.post)
    }
}

/// The first of `hint'`, `hint''`, … not in `avoid`. Never returns `hint`.
pub fn fresh_var(hint: &Var, avoid: &VarSet) -> Var {
    let mut name = hint.name().to_string();
    loop {
        name.push('\'');
        let v = Var::new(&name);
        if !avoid.contains(&v) {
            return v;
        }
    }
}

/// A deterministic supply of fresh names that never repeats itself and
/// avoids an initial set of used names.
#[derive(Clone, Debug, Default)]
pub struct FreshNames {
    used: VarSet,
}

impl FreshNames {
    pub fn new(used: VarSet) -> Self {
        FreshNames { used }
    }

    pub fn fresh(&mut self, hint: &Var) -> Var {
        let v = fresh_var(hint, &self.used);
        self.used.insert(v.clone());
        v
    }

    pub fn reserve(&mut self, vars: impl IntoIterator<Item = Var>) {
        self.used.extend(vars);
    }

    pub fn is_used(&self, v: &Var) -> bool {
        self.used.contains(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(s: &str) -> Var {
        Var::new(s)
    }

    fn set(names: &[&str]) -> VarSet {
        names.iter().map(|n| v(n)).collect()
    }

    #[test]
    fn fv_of_heaps_binders_and_locals() {
        let h = SymbolicHeap::emp()
            .with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("y")))
            .with_pure(PureAtom::neq(v("y"), Term::Null));
        assert_eq!(h.fv(), set(&["x", "y"]));

        let q = QuantifiedHeap::new(
            vec![v("x")],
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("y"))),
        );
        assert_eq!(q.fv(), set(&["y"]));

        let c = Command::local(v("x"), Command::Assign(v("x"), Term::var("y")));
        assert_eq!(c.fv(), set(&["y"]));
    }

    #[test]
    fn mod_clauses() {
        assert!(Command::Free(v("x")).mod_of().is_empty());
        assert_eq!(Command::Load(v("x"), v("y")).mod_of(), set(&["x"]));
        let c = Command::local(v("x"), Command::Assign(v("x"), Term::var("y")));
        assert!(c.mod_of().is_empty());
        assert!(Command::Store(v("x"), Term::Null).mod_of().is_empty());
    }

    #[test]
    fn substitution_examples() {
        let h = SymbolicHeap::emp()
            .with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("y")))
            .with_pure(PureAtom::eq(v("x"), v("z")));
        let expected = SymbolicHeap::emp()
            .with_spatial(SpatialAtom::PointsTo(v("x'"), Term::var("y")))
            .with_pure(PureAtom::eq(v("x'"), v("z")));
        assert_eq!(h.subst(&v("x"), &Term::var("x'")).unwrap(), expected);

        let h = SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("y"), Term::var("x")));
        let expected = SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("y"), Term::Null));
        assert_eq!(h.subst(&v("x"), &Term::Null).unwrap(), expected);

        let q = QuantifiedHeap::new(
            vec![v("x")],
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("y"))),
        );
        assert_eq!(q.subst(&v("x"), &Term::var("z")).unwrap(), q);
    }

    #[test]
    fn null_into_source_is_rejected() {
        let h = SymbolicHeap::emp().with_spatial(SpatialAtom::NegPoints(v("x")));
        assert!(matches!(
            h.subst(&v("x"), &Term::Null),
            Err(SubstError::NullIntoSpatialSource { .. })
        ));
    }

    #[test]
    fn substitution_avoids_capture() {
        // (∃y. x ↦ y)[x := y] must not capture the substituted y
        let q = QuantifiedHeap::new(
            vec![v("y")],
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("y"))),
        );
        let r = q.subst(&v("x"), &Term::var("y")).unwrap();
        assert_eq!(r.fv(), set(&["y"]));
        assert_ne!(r.binders[0], v("y"));
    }

    #[test]
    fn fresh_names() {
        assert_eq!(fresh_var(&v("x"), &set(&["x", "y"])), v("x'"));
        assert_eq!(fresh_var(&v("x"), &set(&["x", "x'"])), v("x''"));
        assert_eq!(fresh_var(&v("z"), &VarSet::new()), v("z'"));
        let mut f = FreshNames::new(set(&["x"]));
        assert_eq!(f.fresh(&v("x")), v("x'"));
        assert_eq!(f.fresh(&v("x")), v("x''"));
    }

    #[test]
    fn heap_equality_ignores_order_and_orientation() {
        let a = SymbolicHeap::from_atoms([
            Atom::Spatial(SpatialAtom::NegPoints(v("y"))),
            Atom::Pure(PureAtom::eq(v("y"), v("x"))),
            Atom::Emp,
        ]);
        let b = SymbolicHeap::from_atoms([
            Atom::Pure(PureAtom::eq(v("x"), v("y"))),
            Atom::Spatial(SpatialAtom::NegPoints(v("y"))),
        ]);
        assert_eq!(a, b);
    }

    #[test]
    fn alpha_equivalence() {
        let a = QuantifiedHeap::new(
            vec![v("a")],
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("a"))),
        );
        let b = QuantifiedHeap::new(
            vec![v("b")],
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("b"))),
        );
        assert_eq!(a, b);
        let c = QuantifiedHeap::unquantified(
            SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("b"))),
        );
        assert_ne!(a, c);
    }

    #[test]
    fn desugar_encodings() {
        let b = SymbolicHeap::from_pure([PureAtom::eq(v("x"), v("y")), PureAtom::neq(v("y"), Term::Null)]);
        let expected = Command::choice(
            Command::Assume(SymbolicHeap::from_pure([PureAtom::neq(v("x"), v("y"))])),
            Command::Assume(SymbolicHeap::from_pure([PureAtom::eq(v("y"), Term::Null)])),
        );
        assert_eq!(assume_not(&b), expected);

        let m = Command::Malloc(v("x")).desugar();
        assert_eq!(
            m,
            Command::choice(Command::Alloc(v("x")), Command::Assign(v("x"), Term::Null))
        );

        let body = Command::Free(v("x"));
        let w = Command::While(b.clone(), Box::new(body.clone())).desugar();
        assert_eq!(
            w,
            Command::seq(
                Command::star(Command::seq(Command::Assume(b.clone()), body)),
                assume_not(&b)
            )
        );

        let a = Command::Assert(b.clone()).desugar();
        assert_eq!(
            a,
            Command::choice(Command::seq(assume_not(&b), Command::Error), Command::Assume(b))
        );
    }

    #[test]
    fn exists_distributes_and_keeps_order() {
        let h = SymbolicHeap::emp().with_spatial(SpatialAtom::PointsTo(v("x"), Term::var("a")));
        let p: Assertion = h.into();
        let q = p.exists_all(&[v("a"), v("b")]);
        assert_eq!(q.disjuncts[0].binders, vec![v("a"), v("b")]);
    }
}
