//! Hand-written lexer and recursive-descent parser for the concrete grammar.
//!
//! ```text
//! program := {"chan" ident+ ";"} {"let" ident "=" stmt ";"} "run" stmt
//! stmt    := par {"+" par}
//! par     := seq {pop seq}          pop ∈ { ||  |  ||-  |- }, one op per level
//! seq     := post [";" seq]
//! post    := atom {"\" ident}
//! atom    := "stop" | "(" stmt ")" | "@" | item {"&" item}
//! item    := ident | "~" ident
//! ```

use std::collections::{BTreeMap, BTreeSet};

use super::{
    Action, BinOp, Calculus, Program, ProgramError, Statement, SyncAction, SyntacticContext,
};
use crate::identifiers::{Name, TAU};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Chan,
    Let,
    Run,
    Stop,
    Tau,
    Plus,
    Merge,
    Sync,
    LeftMerge,
    LeftSync,
    Semi,
    Backslash,
    LParen,
    RParen,
    At,
    Amp,
    Tilde,
    Eq,
    Eof,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, ProgramError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let ch = chars[i];
        let (tline, tcol) = (line, col);
        let mut push = |tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token {
                tok,
                line: tline,
                col: tcol,
            });
            *i += len;
            *col += len;
        };
        match ch {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '|' => {
                let next = chars.get(i + 1).copied();
                let third = chars.get(i + 2).copied();
                match (next, third) {
                    (Some('|'), Some('-')) => push(Tok::LeftMerge, 3, &mut i, &mut col),
                    (Some('|'), _) => push(Tok::Merge, 2, &mut i, &mut col),
                    (Some('-'), _) => push(Tok::LeftSync, 2, &mut i, &mut col),
                    _ => push(Tok::Sync, 1, &mut i, &mut col),
                }
            }
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            ';' => push(Tok::Semi, 1, &mut i, &mut col),
            '\\' => push(Tok::Backslash, 1, &mut i, &mut col),
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '@' => push(Tok::At, 1, &mut i, &mut col),
            '&' => push(Tok::Amp, 1, &mut i, &mut col),
            '~' => push(Tok::Tilde, 1, &mut i, &mut col),
            '=' => push(Tok::Eq, 1, &mut i, &mut col),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '\'')
                {
                    j += 1;
                }
                let word: String = chars[start..j].iter().collect();
                let tok = match word.as_str() {
                    "chan" => Tok::Chan,
                    "let" => Tok::Let,
                    "run" => Tok::Run,
                    "stop" => Tok::Stop,
                    TAU => Tok::Tau,
                    _ => Tok::Ident(word),
                };
                push(tok, j - start, &mut i, &mut col);
            }
            other => {
                return Err(ProgramError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    calculus: Calculus,
    nbar: usize,
    channels: BTreeSet<Name>,
    vars: BTreeSet<Name>,
    allow_hole: bool,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        let idx = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[idx].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> ProgramError {
        let t = &self.toks[self.pos];
        ProgramError::Syntax {
            line: t.line,
            col: t.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ProgramError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {what}, found {:?}", self.peek())))
        }
    }

    fn ident(&mut self) -> Result<Name, ProgramError> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Name::new(&s))
            }
            other => Err(self.error(format!("expected identifier, found {other:?}"))),
        }
    }

    fn starts_statement(tok: &Tok) -> bool {
        matches!(
            tok,
            Tok::Ident(_) | Tok::Stop | Tok::Tau | Tok::LParen | Tok::At | Tok::Tilde
        )
    }

    fn statement(&mut self) -> Result<Statement, ProgramError> {
        let mut left = self.parallel()?;
        while *self.peek() == Tok::Plus {
            self.bump();
            let right = self.parallel()?;
            left = Statement::binary(BinOp::Choice, left, right);
        }
        Ok(left)
    }

    fn parallel_op(tok: &Tok) -> Option<BinOp> {
        match tok {
            Tok::Merge => Some(BinOp::Merge),
            Tok::Sync => Some(BinOp::SyncMerge),
            Tok::LeftMerge => Some(BinOp::LeftMerge),
            Tok::LeftSync => Some(BinOp::LeftSyncMerge),
            _ => None,
        }
    }

    fn parallel(&mut self) -> Result<Statement, ProgramError> {
        let mut left = self.sequence()?;
        let mut level_op: Option<BinOp> = None;
        while let Some(op) = Self::parallel_op(self.peek()) {
            if let Some(first) = level_op {
                if first != op {
                    let t = &self.toks[self.pos];
                    return Err(ProgramError::MixedParallelOps {
                        line: t.line,
                        col: t.col,
                        first: first.symbol(),
                        second: op.symbol(),
                    });
                }
            }
            level_op = Some(op);
            self.bump();
            let right = self.sequence()?;
            left = Statement::binary(op, left, right);
        }
        Ok(left)
    }

    fn sequence(&mut self) -> Result<Statement, ProgramError> {
        let left = self.postfix()?;
        if *self.peek() == Tok::Semi && Self::starts_statement(self.peek_at(1)) {
            self.bump();
            let right = self.sequence()?;
            return Ok(Statement::binary(BinOp::Seq, left, right));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Statement, ProgramError> {
        let mut x = self.atom()?;
        while *self.peek() == Tok::Backslash {
            self.bump();
            let c = self.ident()?;
            if !self.channels.contains(&c) {
                return Err(ProgramError::UndeclaredChannel(c));
            }
            x = Statement::Restrict(std::sync::Arc::new(x), c);
        }
        Ok(x)
    }

    fn atom(&mut self) -> Result<Statement, ProgramError> {
        match self.peek().clone() {
            Tok::Stop => {
                self.bump();
                Ok(Statement::stop())
            }
            Tok::LParen => {
                self.bump();
                let x = self.statement()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(x)
            }
            Tok::At => {
                if !self.allow_hole {
                    return Err(ProgramError::HoleOutsideContext);
                }
                self.bump();
                Ok(Statement::Hole)
            }
            Tok::Tau => {
                self.bump();
                if *self.peek() == Tok::Amp {
                    return Err(self.error("`tau` cannot appear in a joint construct"));
                }
                Ok(Statement::Act(Action::tau()))
            }
            Tok::Ident(_) | Tok::Tilde => self.joint_or_action(),
            other => Err(self.error(format!("expected a statement, found {other:?}"))),
        }
    }

    fn item(&mut self) -> Result<(bool, Name), ProgramError> {
        let tilde = if *self.peek() == Tok::Tilde {
            self.bump();
            true
        } else {
            false
        };
        Ok((tilde, self.ident()?))
    }

    fn joint_or_action(&mut self) -> Result<Statement, ProgramError> {
        let mut items = vec![self.item()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            items.push(self.item()?);
        }
        if items.len() == 1 && !items[0].0 {
            let name = items.pop().unwrap().1;
            if self.vars.contains(&name) {
                return Ok(Statement::Var(name));
            }
            if !self.channels.contains(&name) {
                return Ok(Statement::Act(Action::Internal(name)));
            }
            items.push((false, name));
        }
        for (_, c) in &items {
            if !self.channels.contains(c) {
                return Err(ProgramError::UndeclaredChannel(c.clone()));
            }
        }
        if items.len() > self.nbar {
            return Err(ProgramError::JointTooLong {
                len: items.len(),
                nbar: self.nbar,
            });
        }
        let action = match self.calculus {
            Calculus::Ccsn => {
                if items.len() == 1 && items[0].0 {
                    Action::Output(items.pop().unwrap().1)
                } else if items.iter().any(|(t, _)| *t) {
                    return Err(ProgramError::WrongCalculusConstruct {
                        construct: "output inside a joint input".into(),
                        calculus: self.calculus,
                    });
                } else {
                    Action::JointInput(items.into_iter().map(|(_, c)| c).collect())
                }
            }
            Calculus::CcsnPlus => Action::JointPrefix(
                items
                    .into_iter()
                    .map(|(t, c)| {
                        if t {
                            SyncAction::output(c)
                        } else {
                            SyncAction::input(c)
                        }
                    })
                    .collect(),
            ),
        };
        Ok(Statement::Act(action))
    }
}

/// Parses a whole program in the given calculus with bound `nbar`.
pub fn parse_program(text: &str, calculus: Calculus, nbar: usize) -> Result<Program, ProgramError> {
    if nbar == 0 {
        return Err(ProgramError::InvalidNbar);
    }
    let toks = lex(text)?;
    let mut vars = BTreeSet::new();
    for w in toks.windows(2) {
        if w[0].tok == Tok::Let {
            if let Tok::Ident(s) = &w[1].tok {
                if !vars.insert(Name::new(s)) {
                    return Err(ProgramError::DuplicateDeclaration(Name::new(s)));
                }
            }
        }
    }
    let mut p = Parser {
        toks,
        pos: 0,
        calculus,
        nbar,
        channels: BTreeSet::new(),
        vars,
        allow_hole: false,
    };
    while *p.peek() == Tok::Chan {
        p.bump();
        loop {
            let c = p.ident()?;
            if p.vars.contains(&c) || !p.channels.insert(c.clone()) {
                return Err(ProgramError::DuplicateDeclaration(c));
            }
            if *p.peek() == Tok::Semi {
                break;
            }
        }
        p.expect(Tok::Semi, "`;`")?;
    }
    let mut decls = BTreeMap::new();
    while *p.peek() == Tok::Let {
        p.bump();
        let y = p.ident()?;
        p.expect(Tok::Eq, "`=`")?;
        let body = p.statement()?;
        p.expect(Tok::Semi, "`;` after declaration")?;
        decls.insert(y, body);
    }
    p.expect(Tok::Run, "`run`")?;
    let main = p.statement()?;
    p.expect(Tok::Eof, "end of input")?;
    Program::new(calculus, p.channels, decls, main, nbar)
}

/// Parses a syntactic context (a statement that may contain `@` holes)
/// against the declarations of `program`.
pub fn parse_context(text: &str, program: &Program) -> Result<SyntacticContext, ProgramError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        calculus: program.calculus(),
        nbar: program.nbar(),
        channels: program.channels().clone(),
        vars: program.decls().keys().cloned().collect(),
        allow_hole: true,
    };
    let s = p.statement()?;
    p.expect(Tok::Eof, "end of input")?;
    program.check_statement(&s, true)?;
    Ok(SyntacticContext(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(s: &str) -> Statement {
        Statement::internal(s)
    }

    #[test]
    fn parses_sequenced_merge() {
        let p = parse_program("chan c1;\nrun (b1 || b2); stop", Calculus::Ccsn, 2).unwrap();
        assert_eq!(
            *p.main(),
            Statement::seq(Statement::merge(b("b1"), b("b2")), Statement::stop())
        );
    }

    #[test]
    fn parses_tau() {
        let p = parse_program("run tau", Calculus::Ccsn, 2).unwrap();
        assert_eq!(*p.main(), Statement::Act(Action::tau()));
    }

    #[test]
    fn rejects_unguarded_recursion() {
        let err = parse_program("let y = y; run y", Calculus::Ccsn, 2).unwrap_err();
        assert_eq!(err, ProgramError::UnguardedRecursion(Name::new("y")));
    }

    #[test]
    fn declaration_terminator_is_disambiguated() {
        let p = parse_program("let y = b;y; run y", Calculus::Ccsn, 2).unwrap();
        assert_eq!(
            p.body(&Name::new("y")),
            Some(&Statement::seq(b("b"), Statement::var("y")))
        );
    }

    #[test]
    fn resolves_channels_and_outputs() {
        let p = parse_program("chan c d; run (c&d || ~c) + d", Calculus::Ccsn, 2).unwrap();
        let joint = Statement::Act(Action::JointInput(vec![Name::new("c"), Name::new("d")]));
        let out = Statement::Act(Action::Output(Name::new("c")));
        let single = Statement::Act(Action::JointInput(vec![Name::new("d")]));
        assert_eq!(
            *p.main(),
            Statement::choice(Statement::merge(joint, out), single)
        );
    }

    #[test]
    fn joint_prefix_mode() {
        let p = parse_program("chan c1 c2; run ~c1&c2; b1", Calculus::CcsnPlus, 2).unwrap();
        let j = Action::JointPrefix(vec![
            SyncAction::output(Name::new("c1")),
            SyncAction::input(Name::new("c2")),
        ]);
        assert_eq!(*p.main(), Statement::seq(Statement::Act(j), b("b1")));
    }

    #[test]
    fn precedence_levels() {
        let p = parse_program("chan c; run a + b || d; e \\c", Calculus::Ccsn, 2).unwrap();
        let expected = Statement::choice(
            b("a"),
            Statement::merge(
                b("b"),
                Statement::seq(b("d"), Statement::restrict(b("e"), "c")),
            ),
        );
        assert_eq!(*p.main(), expected);
        let p = parse_program("run a; b; d", Calculus::Ccsn, 2).unwrap();
        assert_eq!(
            *p.main(),
            Statement::seq(b("a"), Statement::seq(b("b"), b("d")))
        );
        let p = parse_program("run a || b || d", Calculus::Ccsn, 2).unwrap();
        assert_eq!(
            *p.main(),
            Statement::merge(Statement::merge(b("a"), b("b")), b("d"))
        );
    }

    #[test]
    fn error_cases() {
        assert!(matches!(
            parse_program("run a || b | d", Calculus::Ccsn, 2),
            Err(ProgramError::MixedParallelOps { .. })
        ));
        assert!(matches!(
            parse_program("chan c; run ~c&c", Calculus::Ccsn, 2),
            Err(ProgramError::WrongCalculusConstruct { .. })
        ));
        assert!(matches!(
            parse_program("chan c d e; run c&d&e", Calculus::Ccsn, 2),
            Err(ProgramError::JointTooLong { len: 3, nbar: 2 })
        ));
        assert!(matches!(
            parse_program("run ~c", Calculus::Ccsn, 2),
            Err(ProgramError::UndeclaredChannel(_))
        ));
        assert!(matches!(
            parse_program("run (a", Calculus::Ccsn, 2),
            Err(ProgramError::Syntax { line: 1, .. })
        ));
        assert!(matches!(
            parse_program("run @", Calculus::Ccsn, 2),
            Err(ProgramError::HoleOutsideContext)
        ));
        assert!(matches!(
            parse_program("run a $ b", Calculus::Ccsn, 2),
            Err(ProgramError::Syntax {
                line: 1,
                col: 7,
                ..
            })
        ));
    }

    #[test]
    fn comments_are_skipped() {
        let p = parse_program("# comment\nrun b # trailing\n", Calculus::Ccsn, 2).unwrap();
        assert_eq!(*p.main(), b("b"));
    }

    #[test]
    fn parses_contexts() {
        let p = parse_program("chan c1 c2; run stop", Calculus::Ccsn, 2).unwrap();
        let s = parse_context("(@ || ~c1) || ~c2", &p).unwrap();
        assert_eq!(s.holes(), 1);
        assert_eq!(s.to_string(), "@ || ~c1 || ~c2");
    }
}
