//! Derivation trees for the proof system, a checker for them, and a text
//! format to read and write them.

mod check;
mod format;

pub use check::{check, check_step, expand_variant, CheckError};
pub use format::{parse_derivation, print_derivation};

use std::fmt;

use crate::syntax::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RuleName {
    Skip,
    Error,
    Seq1,
    Seq2,
    LoopZero,
    LoopNonZero,
    Cons,
    Disj,
    Choice,
    Exist,
    Assign,
    Havoc,
    Assume,
    Local,
    FrameOk,
    Alloc1,
    Alloc2,
    Free,
    FreeEr,
    Load,
    LoadEr,
    Store,
    StoreEr,
    /// Derived rule, checked by expanding it into the primitive ones.
    BackwardsVariant,
}

impl RuleName {
    pub const ALL: [RuleName; 24] = [
        RuleName::Skip,
        RuleName::Error,
        RuleName::Seq1,
        RuleName::Seq2,
        RuleName::LoopZero,
        RuleName::LoopNonZero,
        RuleName::Cons,
        RuleName::Disj,
        RuleName::Choice,
        RuleName::Exist,
        RuleName::Assign,
        RuleName::Havoc,
        RuleName::Assume,
        RuleName::Local,
        RuleName::FrameOk,
        RuleName::Alloc1,
        RuleName::Alloc2,
        RuleName::Free,
        RuleName::FreeEr,
        RuleName::Load,
        RuleName::LoadEr,
        RuleName::Store,
        RuleName::StoreEr,
        RuleName::BackwardsVariant,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleName::Skip => "Skip",
            RuleName::Error => "Error",
            RuleName::Seq1 => "Seq1",
            RuleName::Seq2 => "Seq2",
            RuleName::LoopZero => "LoopZero",
            RuleName::LoopNonZero => "LoopNonZero",
            RuleName::Cons => "Cons",
            RuleName::Disj => "Disj",
            RuleName::Choice => "Choice",
            RuleName::Exist => "Exist",
            RuleName::Assign => "Assign",
            RuleName::Havoc => "Havoc",
            RuleName::Assume => "Assume",
            RuleName::Local => "Local",
            RuleName::FrameOk => "FrameOk",
            RuleName::Alloc1 => "Alloc1",
            RuleName::Alloc2 => "Alloc2",
            RuleName::Free => "Free",
            RuleName::FreeEr => "FreeEr",
            RuleName::Load => "Load",
            RuleName::LoadEr => "LoadEr",
            RuleName::Store => "Store",
            RuleName::StoreEr => "StoreEr",
            RuleName::BackwardsVariant => "BackwardsVariant",
        }
    }

    pub fn from_name(s: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.name() == s)
    }

    pub fn is_derived(self) -> bool {
        self == RuleName::BackwardsVariant
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    Left,
    Right,
}

/// Rule-specific data that cannot be read off the conclusion.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum SideData {
    #[default]
    None,
    /// The frame of `FrameOk`.
    Frame(QuantifiedHeap),
    /// The alias whose points-to atom the heap rules act on.
    Alias(Var),
    /// The quantified variable of `Exist`, or the renamed local of `Local`.
    Var(Var),
    /// Which side of a choice a single-premise `Choice` follows.
    Branch(Branch),
    /// The assertions `P(0), …, P(k)` of a backwards variant.
    Variant(Vec<Assertion>),
}

impl SideData {
    pub fn swap(&self, a: &Var, b: &Var) -> SideData {
        match self {
            SideData::None => SideData::None,
            SideData::Frame(f) => SideData::Frame(f.swap(a, b)),
            SideData::Alias(v) => SideData::Alias(swap_var(v, a, b)),
            SideData::Var(v) => SideData::Var(swap_var(v, a, b)),
            SideData::Branch(br) => SideData::Branch(*br),
            SideData::Variant(ps) => SideData::Variant(ps.iter().map(|p| p.swap(a, b)).collect()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivationNode {
    pub rule: RuleName,
    pub conclusion: Triple,
    pub premises: Vec<DerivationNode>,
    pub side: SideData,
}

/// Disjuncts of all inputs, deduplicated up to alpha-equivalence, in order.
pub(crate) fn union(parts: impl IntoIterator<Item = Assertion>) -> Assertion {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for p in parts {
        for d in p.disjuncts {
            if seen.insert(d.alpha_key()) {
                out.push(d);
            }
        }
    }
    Assertion::new(out)
}

impl DerivationNode {
    pub fn new(rule: RuleName, conclusion: Triple, premises: Vec<DerivationNode>, side: SideData) -> Self {
        DerivationNode {
            rule,
            conclusion,
            premises,
            side,
        }
    }

    pub fn axiom(rule: RuleName, conclusion: Triple, side: SideData) -> Self {
        DerivationNode::new(rule, conclusion, Vec::new(), side)
    }

    /// `Disj` over premises sharing a command and exit.
    pub fn disj(cmd: Command, exit: ExitCondition, premises: Vec<DerivationNode>) -> Self {
        let pre = union(premises.iter().map(|d| d.conclusion.pre.clone()));
        let post = union(premises.iter().map(|d| d.conclusion.post.clone()));
        DerivationNode::new(
            RuleName::Disj,
            Triple::new(pre, cmd, exit, post),
            premises,
            SideData::None,
        )
    }

    pub fn exist(x: &Var, premise: DerivationNode) -> Self {
        let t = &premise.conclusion;
        let c = Triple::new(t.pre.exists(x), t.cmd.clone(), t.exit, t.post.exists(x));
        DerivationNode::new(RuleName::Exist, c, vec![premise], SideData::Var(x.clone()))
    }

    pub fn cons(pre: Assertion, post: Assertion, premise: DerivationNode) -> Self {
        let t = &premise.conclusion;
        let c = Triple::new(pre, t.cmd.clone(), t.exit, post);
        DerivationNode::new(RuleName::Cons, c, vec![premise], SideData::None)
    }

    pub fn seq1(premise: DerivationNode, second: Command) -> Self {
        let t = &premise.conclusion;
        let c = Triple::new(
            t.pre.clone(),
            Command::seq(t.cmd.clone(), second),
            ExitCondition::Er,
            t.post.clone(),
        );
        DerivationNode::new(RuleName::Seq1, c, vec![premise], SideData::None)
    }

    pub fn seq2(first: DerivationNode, second: DerivationNode) -> Self {
        let c = Triple::new(
            first.conclusion.pre.clone(),
            Command::seq(first.conclusion.cmd.clone(), second.conclusion.cmd.clone()),
            second.conclusion.exit,
            second.conclusion.post.clone(),
        );
        DerivationNode::new(RuleName::Seq2, c, vec![first, second], SideData::None)
    }

    pub fn choice(branch: Branch, premise: DerivationNode, other: Command) -> Self {
        let t = &premise.conclusion;
        let cmd = match branch {
            Branch::Left => Command::choice(t.cmd.clone(), other),
            Branch::Right => Command::choice(other, t.cmd.clone()),
        };
        let c = Triple::new(t.pre.clone(), cmd, t.exit, t.post.clone());
        DerivationNode::new(RuleName::Choice, c, vec![premise], SideData::Branch(branch))
    }

    pub fn loop_non_zero(premise: DerivationNode) -> Self {
        let t = &premise.conclusion;
        let body = match &t.cmd {
            Command::Seq(a, _) => (**a).clone(),
            other => other.clone(),
        };
        let c = Triple::new(t.pre.clone(), body, t.exit, t.post.clone());
        DerivationNode::new(RuleName::LoopNonZero, c, vec![premise], SideData::None)
    }

    /// Exchanges two variable names throughout the derivation.
    pub fn swap(&self, a: &Var, b: &Var) -> DerivationNode {
        DerivationNode {
            rule: self.rule,
            conclusion: self.conclusion.swap(a, b),
            premises: self.premises.iter().map(|p| p.swap(a, b)).collect(),
            side: self.side.swap(a, b),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(|p| p.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(|p| p.depth()).max().unwrap_or(0)
    }

    /// Every rule occurring in the tree.
    pub fn rules(&self) -> std::collections::BTreeSet<RuleName> {
        let mut s: std::collections::BTreeSet<RuleName> = [self.rule].into();
        for p in &self.premises {
            s.extend(p.rules());
        }
        s
    }
}
