//! Seeded generator of assertions and programs for the differential suites.
//!
//! Default distribution: variables drawn from `x, y, z` (the first
//! `vars` of them), binders `a` and `b`; one or two disjuncts, each with
//! up to two pure atoms and up to `max_spatial` spatial atoms over
//! distinct sources, 70% of them `↦`. Commands up to `max_depth` deep;
//! atomic commands are picked with weights skip 1, error 1, assign 3,
//! havoc 1, assume 2, alloc 2, free 3, load 3, store 3.

use islkit_core::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shape {
    pub vars: usize,
    pub max_depth: usize,
    pub max_spatial: usize,
    pub max_disjuncts: usize,
    pub max_binders: usize,
    pub loops: bool,
    pub sugar: bool,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            vars: 3,
            max_depth: 4,
            max_spatial: 2,
            max_disjuncts: 2,
            max_binders: 1,
            loops: true,
            sugar: true,
        }
    }
}

/// Heads a generated command can be forced to have.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Head {
    Skip,
    Error,
    Assign,
    Havoc,
    Assume,
    Alloc,
    Free,
    Load,
    Store,
    Seq,
    Choice,
    Star,
    Local,
}

pub struct Gen {
    rng: ChaCha8Rng,
    pub shape: Shape,
}

const VAR_NAMES: [&str; 3] = ["x", "y", "z"];
const BINDER_NAMES: [&str; 2] = ["a", "b"];

impl Gen {
    /// Independent stream for one case of one suite.
    pub fn for_case(seed: u64, suite: u64, case: u64, shape: Shape) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(suite.wrapping_mul(1 << 32).wrapping_add(case));
        Gen { rng, shape }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }

    pub fn vars(&self) -> Vec<Var> {
        VAR_NAMES[..self.shape.vars.clamp(1, 3)]
            .iter()
            .map(|v| Var::new(v))
            .collect()
    }

    pub fn var(&mut self) -> Var {
        let vs = self.vars();
        vs.choose(&mut self.rng).unwrap().clone()
    }

    fn term_from(&mut self, pool: &[Var]) -> Term {
        if self.chance(0.25) {
            Term::Null
        } else {
            Term::Var(pool.choose(&mut self.rng).unwrap().clone())
        }
    }

    pub fn term(&mut self) -> Term {
        let vs = self.vars();
        self.term_from(&vs)
    }

    fn pure_from(&mut self, pool: &[Var]) -> PureAtom {
        let a = Term::Var(pool.choose(&mut self.rng).unwrap().clone());
        let b = self.term_from(pool);
        if self.chance(0.5) {
            PureAtom::eq(a, b)
        } else {
            PureAtom::neq(a, b)
        }
    }

    /// A pure condition with one or two atoms.
    pub fn condition(&mut self) -> SymbolicHeap {
        let vs = self.vars();
        let n = 1 + self.below(2);
        SymbolicHeap::from_pure((0..n).map(|_| self.pure_from(&vs)))
    }

    fn heap_over(&mut self, pool: &[Var]) -> SymbolicHeap {
        let mut h = SymbolicHeap::emp();
        for _ in 0..self.below(3) {
            let a = self.pure_from(pool);
            h.push_pure(a);
        }
        let mut sources = pool.to_vec();
        sources.shuffle(&mut self.rng);
        let n = self.below(self.shape.max_spatial + 1).min(sources.len());
        for src in sources.into_iter().take(n) {
            if self.chance(0.7) {
                let t = self.term_from(pool);
                h.push_spatial(SpatialAtom::PointsTo(src, t));
            } else {
                h.push_spatial(SpatialAtom::NegPoints(src));
            }
        }
        h
    }

    /// A quantifier-free heap over the program variables.
    pub fn heap(&mut self) -> SymbolicHeap {
        let vs = self.vars();
        self.heap_over(&vs)
    }

    pub fn quantified(&mut self) -> QuantifiedHeap {
        let nb = if self.shape.max_binders == 0 || self.chance(0.6) {
            0
        } else {
            1 + self.below(self.shape.max_binders.min(2))
        };
        let binders: Vec<Var> = BINDER_NAMES[..nb].iter().map(|b| Var::new(b)).collect();
        let mut pool = self.vars();
        pool.extend(binders.iter().cloned());
        let body = self.heap_over(&pool);
        QuantifiedHeap::new(binders, body)
    }

    pub fn assertion(&mut self) -> Assertion {
        if self.chance(0.03) {
            return Assertion::false_();
        }
        let n = 1 + self.below(self.shape.max_disjuncts.max(1));
        Assertion::new((0..n).map(|_| self.quantified()).collect())
    }

    pub fn exit(&mut self) -> ExitCondition {
        if self.chance(0.5) {
            ExitCondition::Ok
        } else {
            ExitCondition::Er
        }
    }

    pub fn atomic(&mut self) -> Command {
        let weights = [1, 1, 3, 1, 2, 2, 3, 3, 3];
        let heads = [
            Head::Skip,
            Head::Error,
            Head::Assign,
            Head::Havoc,
            Head::Assume,
            Head::Alloc,
            Head::Free,
            Head::Load,
            Head::Store,
        ];
        let total: u32 = weights.iter().sum();
        let mut k = self.rng.gen_range(0..total);
        for (h, w) in heads.iter().zip(weights) {
            if k < w {
                return self.with_head(*h, 1);
            }
            k -= w;
        }
        unreachable!()
    }

    /// A command whose outermost construct is `head`; subcommands get
    /// depth at most `depth - 1`.
    pub fn with_head(&mut self, head: Head, depth: usize) -> Command {
        let sub = depth.saturating_sub(1).max(1);
        match head {
            Head::Skip => Command::Skip,
            Head::Error => Command::Error,
            Head::Assign => {
                let x = self.var();
                let t = self.term();
                Command::Assign(x, t)
            }
            Head::Havoc => Command::Havoc(self.var()),
            Head::Assume => Command::Assume(self.condition()),
            Head::Alloc => Command::Alloc(self.var()),
            Head::Free => Command::Free(self.var()),
            Head::Load => {
                let x = self.var();
                let y = self.var();
                Command::Load(x, y)
            }
            Head::Store => {
                let x = self.var();
                let t = self.term();
                Command::Store(x, t)
            }
            Head::Seq => {
                let a = self.command(sub);
                let b = self.command(sub);
                Command::seq(a, b)
            }
            Head::Choice => {
                let a = self.command(sub);
                let b = self.command(sub);
                Command::choice(a, b)
            }
            Head::Star => {
                let body = self.loop_free(sub);
                Command::star(body)
            }
            Head::Local => {
                let x = self.var();
                let body = self.command(sub);
                Command::local(x, body)
            }
        }
    }

    fn loop_free(&mut self, depth: usize) -> Command {
        let saved = self.shape.loops;
        self.shape.loops = false;
        let c = self.command(depth);
        self.shape.loops = saved;
        c
    }

    /// A command of depth at most `depth`.
    pub fn command(&mut self, depth: usize) -> Command {
        if depth <= 1 || self.chance(0.3) {
            return self.atomic();
        }
        let roll = self.below(100);
        match roll {
            0..=34 => self.with_head(Head::Seq, depth),
            35..=54 => self.with_head(Head::Choice, depth),
            55..=66 if self.shape.loops => self.with_head(Head::Star, depth),
            67..=78 => self.with_head(Head::Local, depth),
            79..=99 if self.shape.sugar => self.sugar(depth),
            _ => self.with_head(Head::Seq, depth),
        }
    }

    fn sugar(&mut self, depth: usize) -> Command {
        let sub = depth - 1;
        match self.below(4) {
            0 => {
                let b = self.condition();
                let c1 = self.command(sub);
                let c2 = self.command(sub);
                Command::If(b, Box::new(c1), Box::new(c2))
            }
            1 if self.shape.loops => {
                let b = self.condition();
                let c = self.loop_free(sub);
                Command::While(b, Box::new(c))
            }
            2 => Command::Assert(self.condition()),
            _ => Command::Malloc(self.var()),
        }
    }

    /// A random command up to the shape's depth.
    pub fn program(&mut self) -> Command {
        let d = self.shape.max_depth;
        self.command(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_reproducible() {
        let shape = Shape::default();
        let a: Vec<String> = (0..20)
            .map(|i| Gen::for_case(7, 1, i, shape).program().to_string())
            .collect();
        let b: Vec<String> = (0..20)
            .map(|i| Gen::for_case(7, 1, i, shape).program().to_string())
            .collect();
        assert_eq!(a, b);
        assert_ne!(a[0..5], a[5..10]);
    }

    #[test]
    fn respects_depth_and_loops() {
        let shape = Shape {
            loops: false,
            ..Shape::default()
        };
        for i in 0..200 {
            let c = Gen::for_case(1, 2, i, shape).program();
            assert!(c.depth() <= 4, "{c}");
            assert!(!c.contains_star(), "{c}");
        }
    }
}
