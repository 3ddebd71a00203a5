//! Printing in the concrete grammar accepted by [`crate::parse`].
//!
//! Heaps print pure atoms first (in their sorted order) and spatial atoms
//! after, so equal heaps always print identically.

use std::fmt::{self, Display, Formatter, Write};

use crate::syntax::*;

impl Display for Var {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Null => f.write_str("null"),
        }
    }
}

impl Display for PureAtom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let op = match self.kind() {
            PureKind::Eq => "==",
            PureKind::Neq => "!=",
        };
        write!(f, "{} {op} {}", self.lhs(), self.rhs())
    }
}

impl Display for SpatialAtom {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            SpatialAtom::PointsTo(x, t) => write!(f, "{x} -> {t}"),
            SpatialAtom::NegPoints(x) => write!(f, "{x} -/>"),
        }
    }
}

impl Display for SymbolicHeap {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.is_emp() {
            return f.write_str("emp");
        }
        let mut first = true;
        for a in self.pure() {
            if !first {
                f.write_str(" * ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        for a in self.spatial() {
            if !first {
                f.write_str(" * ")?;
            }
            first = false;
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

impl Display for QuantifiedHeap {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if !self.binders.is_empty() {
            f.write_str("exists")?;
            for b in &self.binders {
                write!(f, " {b}")?;
            }
            f.write_str(" . ")?;
        }
        write!(f, "{}", self.body)
    }
}

impl Display for Assertion {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return f.write_str("false");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                f.write_str(" \\/ ")?;
            }
            write!(f, "{d}")?;
        }
        Ok(())
    }
}

impl Display for ExitCondition {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExitCondition::Ok => "ok",
            ExitCondition::Er => "er",
        })
    }
}

impl Display for Command {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Command::Skip => f.write_str("skip"),
            Command::Error => f.write_str("error"),
            Command::Assign(x, t) => write!(f, "{x} := {t}"),
            Command::Havoc(x) => write!(f, "{x} := *"),
            Command::Assume(b) => write!(f, "assume({b})"),
            Command::Local(x, c) => write!(f, "local {x} {{ {c} }}"),
            Command::Seq(a, b) => {
                if matches!(**a, Command::Seq(..)) {
                    write!(f, "{{ {a} }} ; {b}")
                } else {
                    write!(f, "{a} ; {b}")
                }
            }
            Command::Choice(a, b) => write!(f, "choice {{ {a} }} or {{ {b} }}"),
            Command::Star(c) => write!(f, "star {{ {c} }}"),
            Command::Alloc(x) => write!(f, "{x} := alloc()"),
            Command::Free(x) => write!(f, "free({x})"),
            Command::Load(x, y) => write!(f, "{x} := [{y}]"),
            Command::Store(x, t) => write!(f, "[{x}] := {t}"),
            Command::If(b, c1, c2) => write!(f, "if ({b}) {{ {c1} }} else {{ {c2} }}"),
            Command::While(b, c) => write!(f, "while ({b}) {{ {c} }}"),
            Command::Assert(b) => write!(f, "assert({b})"),
            Command::Malloc(x) => write!(f, "{x} := malloc()"),
        }
    }
}

impl Display for Triple {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "[ {} ] {} [ {}: {} ]", self.pre, self.cmd, self.exit, self.post)
    }
}

/// One disjunct per line, in the sorted order of [`Assertion::normalized`].
pub fn disjunct_lines(p: &Assertion) -> String {
    let n = p.normalized();
    if n.disjuncts.is_empty() {
        return "false\n".to_string();
    }
    let mut out = String::new();
    for d in &n.disjuncts {
        let _ = writeln!(out, "{d}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heap_prints_pure_then_spatial() {
        let h = SymbolicHeap::emp()
            .with_spatial(SpatialAtom::NegPoints(Var::new("y")))
            .with_pure(PureAtom::neq(Var::new("y"), Term::Null))
            .with_pure(PureAtom::eq(Var::new("y"), Var::new("x")))
            .with_pure(PureAtom::neq(Term::Null, Var::new("x")));
        assert_eq!(h.to_string(), "x == y * x != null * y != null * y -/>");
    }

    #[test]
    fn empty_forms() {
        assert_eq!(SymbolicHeap::emp().to_string(), "emp");
        assert_eq!(Assertion::false_().to_string(), "false");
    }

    #[test]
    fn left_nested_sequence_is_grouped() {
        let c = Command::seq(Command::seq(Command::Skip, Command::Error), Command::Skip);
        assert_eq!(c.to_string(), "{ skip ; error } ; skip");
    }
}
