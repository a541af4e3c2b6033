//! Concrete-syntax rendering; output re-parses to the same tree.

use std::fmt;

use super::{Action, BinOp, Polarity, Program, Statement};

// Binding strength, loosest first.
const CHOICE: u8 = 0;
const PAR: u8 = 1;
const SEQ: u8 = 2;
const POSTFIX: u8 = 3;

fn level(x: &Statement) -> u8 {
    match x {
        Statement::Binary(BinOp::Choice, ..) => CHOICE,
        Statement::Binary(BinOp::Seq, ..) => SEQ,
        Statement::Binary(..) => PAR,
        _ => POSTFIX,
    }
}

fn write_at(f: &mut fmt::Formatter<'_>, x: &Statement, min: u8) -> fmt::Result {
    if level(x) < min {
        write!(f, "(")?;
        write_stmt(f, x)?;
        write!(f, ")")
    } else {
        write_stmt(f, x)
    }
}

fn write_stmt(f: &mut fmt::Formatter<'_>, x: &Statement) -> fmt::Result {
    match x {
        Statement::Act(a) => write!(f, "{a}"),
        Statement::Var(y) => write!(f, "{y}"),
        Statement::Hole => write!(f, "@"),
        Statement::Restrict(inner, c) => {
            write_at(f, inner, POSTFIX)?;
            write!(f, "\\{c}")
        }
        Statement::Binary(BinOp::Choice, l, r) => {
            write_at(f, l, CHOICE)?;
            write!(f, " + ")?;
            write_at(f, r, PAR)
        }
        Statement::Binary(BinOp::Seq, l, r) => {
            write_at(f, l, POSTFIX)?;
            write!(f, "; ")?;
            write_at(f, r, SEQ)
        }
        Statement::Binary(op, l, r) => {
            // same operator chains to the left; any other parallel operator needs parentheses
            match &**l {
                Statement::Binary(lop, ..) if lop == op => write_stmt(f, l)?,
                _ => write_at(f, l, SEQ)?,
            }
            write!(f, " {} ", op.symbol())?;
            write_at(f, r, SEQ)
        }
    }
}

impl fmt::Display for Statement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_stmt(f, self)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Internal(b) => write!(f, "{b}"),
            Action::Output(c) => write!(f, "~{c}"),
            Action::Stop => write!(f, "stop"),
            Action::JointInput(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "&")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            Action::JointPrefix(ls) => {
                for (i, l) in ls.iter().enumerate() {
                    if i > 0 {
                        write!(f, "&")?;
                    }
                    if l.polarity == Polarity::Out {
                        write!(f, "~")?;
                    }
                    write!(f, "{}", l.channel)?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.channels().is_empty() {
            write!(f, "chan")?;
            for c in self.channels() {
                write!(f, " {c}")?;
            }
            writeln!(f, ";")?;
        }
        for (y, body) in self.decls() {
            writeln!(f, "let {y} = {body};")?;
        }
        write!(f, "run {}", self.main())
    }
}

#[cfg(test)]
mod tests {
    use crate::generate::{random_program, GenConfig};
    use crate::syntax::{parse_program, Calculus, Statement};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn renders_with_minimal_parentheses() {
        let p = parse_program(
            "chan c1 c2; run ((c1&c2 || ~c1)\\c1 || ~c2); (b2 + b3)",
            Calculus::Ccsn,
            2,
        )
        .unwrap();
        assert_eq!(
            p.main().to_string(),
            "((c1&c2 || ~c1)\\c1 || ~c2); (b2 + b3)"
        );
        let reparsed = parse_program(&p.to_string(), Calculus::Ccsn, 2).unwrap();
        assert_eq!(reparsed, p);
    }

    #[test]
    fn mixed_parallel_operators_get_parentheses() {
        let x = Statement::binary(
            crate::syntax::BinOp::SyncMerge,
            Statement::merge(Statement::internal("a"), Statement::internal("b")),
            Statement::internal("d"),
        );
        assert_eq!(x.to_string(), "(a || b) | d");
    }

    #[test]
    fn random_programs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for calculus in [Calculus::Ccsn, Calculus::CcsnPlus] {
            let cfg = GenConfig::new(calculus);
            for _ in 0..300 {
                let p = random_program(&mut rng, &cfg);
                let text = p.to_string();
                let q = parse_program(&text, calculus, p.nbar())
                    .unwrap_or_else(|e| panic!("{text}: {e}"));
                assert_eq!(q, p, "{text}");
            }
        }
    }
}
