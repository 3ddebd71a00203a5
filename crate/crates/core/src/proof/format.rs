//! Text form of derivations:
//!
//! ```text
//! (Seq2 [ P ] C [ ok: Q ]
//!   (Skip [ P ] skip [ ok: P ])
//!   (Free [ ... ] free(x) [ ok: ... ] alias { y }))
//! ```
//!
//! Side data follows the conclusion as `alias { y }`, `var { z }`,
//! `frame { F }`, `branch { left }` or `variant { [ P0 ] [ P1 ] ... }`.

use std::fmt::Write as _;

use super::{Branch, DerivationNode, RuleName, SideData};
use crate::parse::{ParseError, Parser, Tok};
use crate::syntax::*;

pub fn print_derivation(d: &DerivationNode) -> String {
    let mut s = String::new();
    write_node(&mut s, d, 0);
    s.push('\n');
    s
}

fn write_node(s: &mut String, d: &DerivationNode, indent: usize) {
    let pad = "  ".repeat(indent);
    let _ = write!(s, "{pad}({} {}", d.rule, d.conclusion);
    match &d.side {
        SideData::None => {}
        SideData::Frame(f) => {
            let _ = write!(s, " frame {{ {f} }}");
        }
        SideData::Alias(v) => {
            let _ = write!(s, " alias {{ {v} }}");
        }
        SideData::Var(v) => {
            let _ = write!(s, " var {{ {v} }}");
        }
        SideData::Branch(b) => {
            let name = match b {
                Branch::Left => "left",
                Branch::Right => "right",
            };
            let _ = write!(s, " branch {{ {name} }}");
        }
        SideData::Variant(ps) => {
            s.push_str(" variant {");
            for p in ps {
                let _ = write!(s, " [ {p} ]");
            }
            s.push_str(" }");
        }
    }
    for p in &d.premises {
        s.push('\n');
        write_node(s, p, indent + 1);
    }
    s.push(')');
}

pub fn parse_derivation(src: &str) -> Result<DerivationNode, ParseError> {
    let mut p = Parser::new(src)?;
    let d = node(&mut p)?;
    p.expect_eof()?;
    Ok(d)
}

fn node(p: &mut Parser) -> Result<DerivationNode, ParseError> {
    p.expect_sym("(")?;
    let rule = match p.peek().clone() {
        Tok::Ident(name) => RuleName::from_name(&name).ok_or_else(|| p.error(&["rule name"]))?,
        _ => return Err(p.error(&["rule name"])),
    };
    p.ident()?;
    let conclusion = p.triple()?;
    let mut side = SideData::None;
    if let Tok::Ident(key) = p.peek().clone() {
        p.ident()?;
        p.expect_sym("{")?;
        side = match key.as_str() {
            "alias" => SideData::Alias(p.ident()?),
            "var" => SideData::Var(p.ident()?),
            "frame" => {
                let a = p.assertion()?;
                match <[QuantifiedHeap; 1]>::try_from(a.disjuncts) {
                    Ok([f]) => SideData::Frame(f),
                    Err(_) => return Err(p.error(&["a single frame disjunct"])),
                }
            }
            "branch" => match p.ident()?.name() {
                "left" => SideData::Branch(Branch::Left),
                "right" => SideData::Branch(Branch::Right),
                _ => return Err(p.error(&["`left`", "`right`"])),
            },
            "variant" => {
                let mut ps = Vec::new();
                while p.eat_sym("[") {
                    ps.push(p.assertion()?);
                    p.expect_sym("]")?;
                }
                SideData::Variant(ps)
            }
            _ => return Err(p.error(&["`alias`", "`var`", "`frame`", "`branch`", "`variant`"])),
        };
        p.expect_sym("}")?;
    }
    let mut premises = Vec::new();
    while p.is_sym("(") {
        premises.push(node(p)?);
    }
    p.expect_sym(")")?;
    Ok(DerivationNode::new(rule, conclusion, premises, side))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::parse_triple;

    #[test]
    fn round_trip() {
        let leaf = DerivationNode::axiom(
            RuleName::Free,
            parse_triple(
                "[ x == y * x != null * y != null * y -> null ] free(x) [ ok: x == y * x != null * y != null * y -/> ]",
            )
            .unwrap(),
            SideData::Alias(Var::new("y")),
        );
        let d = DerivationNode::exist(&Var::new("a"), leaf);
        let text = print_derivation(&d);
        assert_eq!(parse_derivation(&text).unwrap(), d);
        assert!(text.starts_with("(Exist [ exists a . "));
    }

    #[test]
    fn unknown_rule_is_reported() {
        let e = parse_derivation("(Magic [ emp ] skip [ ok: emp ])").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
    }
}
