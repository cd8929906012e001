use super::{Formula, Sequent, Signature, SyntaxError, Var, RESERVED};
use crate::truthfun;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Ident(&'a str),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Eof,
}

impl Tok<'_> {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`=>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(Tok<'_>, usize)>, SyntaxError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => i += 1,
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b',' => {
                out.push((Tok::Comma, i));
                i += 1;
            }
            b'.' => {
                out.push((Tok::Dot, i));
                i += 1;
            }
            b'=' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, i));
                i += 2;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'')
                {
                    i += 1;
                }
                out.push((Tok::Ident(&src[start..i]), start));
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(SyntaxError::Lex { pos: i, ch });
            }
        }
    }
    out.push((Tok::Eof, src.len()));
    Ok(out)
}

enum SigMode<'s> {
    Fixed(&'s Signature),
    Infer(&'s mut Signature),
}

impl SigMode<'_> {
    fn sig(&self) -> &Signature {
        match self {
            SigMode::Fixed(s) => s,
            SigMode::Infer(s) => s,
        }
    }
}

struct Parser<'a, 's> {
    toks: Vec<(Tok<'a>, usize)>,
    i: usize,
    sig: SigMode<'s>,
}

impl<'a> Parser<'a, '_> {
    fn peek(&self) -> Tok<'a> {
        self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> (Tok<'a>, usize) {
        let t = self.toks[self.i];
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, SyntaxError> {
        Err(SyntaxError::Unexpected {
            pos: self.pos(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        })
    }

    fn expect(&mut self, tok: Tok<'_>, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.unexpected(what)
        }
    }

    fn variable(&mut self) -> Result<Var, SyntaxError> {
        match self.peek() {
            Tok::Ident(name) if !RESERVED.contains(&name) => {
                self.bump();
                Ok(Var::new(name))
            }
            _ => self.unexpected("a variable"),
        }
    }

    fn formula(&mut self) -> Result<Formula, SyntaxError> {
        let name = match self.peek() {
            Tok::Ident(name) => name,
            _ => return self.unexpected("a formula"),
        };
        let pos = self.pos();
        self.bump();
        if name == "forall" || name == "exists" {
            let var = self.variable()?;
            self.expect(Tok::Dot, "`.` after the bound variable")?;
            let body = self.formula()?;
            return Ok(if name == "forall" {
                Formula::forall(var, body)
            } else {
                Formula::exists(var, body)
            });
        }
        if let Some(conn) = self.sig.sig().connective(name) {
            let args = self.formula_args()?;
            return check_conn(conn, args, pos);
        }
        if let Some(arity) = self.sig.sig().predicate_arity(name) {
            let args = self.var_args()?;
            if args.len() != arity {
                return Err(SyntaxError::Arity {
                    pos,
                    name: name.to_string(),
                    expected: arity,
                    found: args.len(),
                });
            }
            return Ok(Formula::Atom {
                pred: name.to_string(),
                args,
            });
        }
        if let SigMode::Fixed(_) = self.sig {
            return Err(SyntaxError::UnknownSymbol {
                pos,
                name: name.to_string(),
            });
        }
        if let Ok(func) = truthfun::builtin(name) {
            self.declare(|sig| sig.add_connective(name, func))?;
            let conn = self.sig.sig().connective(name).expect("just added");
            let args = self.formula_args()?;
            check_conn(conn, args, pos)
        } else {
            let args = self.var_args()?;
            self.declare(|sig| sig.add_predicate(name, args.len()))?;
            Ok(Formula::Atom {
                pred: name.to_string(),
                args,
            })
        }
    }

    fn declare(
        &mut self,
        f: impl FnOnce(&mut Signature) -> Result<(), SyntaxError>,
    ) -> Result<(), SyntaxError> {
        match &mut self.sig {
            SigMode::Infer(sig) => f(sig),
            SigMode::Fixed(_) => unreachable!("declarations only happen while inferring"),
        }
    }

    fn formula_args(&mut self) -> Result<Vec<Formula>, SyntaxError> {
        let mut args = Vec::new();
        if self.peek() != Tok::LParen {
            return Ok(args);
        }
        self.bump();
        if self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.formula()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return self.unexpected("`,` or `)`"),
            }
        }
    }

    fn var_args(&mut self) -> Result<Vec<Var>, SyntaxError> {
        let mut args = Vec::new();
        if self.peek() != Tok::LParen {
            return Ok(args);
        }
        self.bump();
        if self.peek() == Tok::RParen {
            self.bump();
            return Ok(args);
        }
        loop {
            args.push(self.variable()?);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => {
                    self.bump();
                    return Ok(args);
                }
                _ => return self.unexpected("`,` or `)`"),
            }
        }
    }

    fn formula_list(&mut self, stop: Tok<'_>) -> Result<Vec<Formula>, SyntaxError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        loop {
            out.push(self.formula()?);
            if self.peek() == Tok::Comma {
                self.bump();
            } else {
                return Ok(out);
            }
        }
    }

    fn finish(&mut self) -> Result<(), SyntaxError> {
        if self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.unexpected("end of input")
        }
    }

    fn sequent(&mut self) -> Result<Sequent, SyntaxError> {
        let left = self.formula_list(Tok::Arrow)?;
        self.expect(Tok::Arrow, "`=>`")?;
        let right = self.formula_list(Tok::Eof)?;
        self.finish()?;
        Ok(Sequent::new(left, right))
    }
}

fn check_conn(
    conn: super::Connective,
    args: Vec<Formula>,
    pos: usize,
) -> Result<Formula, SyntaxError> {
    if args.len() != conn.arity() {
        return Err(SyntaxError::Arity {
            pos,
            name: conn.name.clone(),
            expected: conn.arity(),
            found: args.len(),
        });
    }
    Ok(Formula::Conn { conn, args })
}

/// Parses a formula against a fixed signature.
pub fn parse_formula(text: &str, sig: &Signature) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        sig: SigMode::Fixed(sig),
    };
    let phi = p.formula()?;
    p.finish()?;
    Ok(phi)
}

/// Parses a formula, declaring unknown symbols on the fly: builtin connective
/// names become connectives, anything else a predicate of the arity it is used at.
pub fn parse_formula_inferring(text: &str, sig: &mut Signature) -> Result<Formula, SyntaxError> {
    let mut p = Parser {
        toks: lex(text)?,
        i: 0,
        sig: SigMode::Infer(sig),
    };
    let phi = p.formula()?;
    p.finish()?;
    Ok(phi)
}

pub fn parse_sequent(text: &str, sig: &Signature) -> Result<Sequent, SyntaxError> {
    Parser {
        toks: lex(text)?,
        i: 0,
        sig: SigMode::Fixed(sig),
    }
    .sequent()
}

pub fn parse_sequent_inferring(text: &str, sig: &mut Signature) -> Result<Sequent, SyntaxError> {
    Parser {
        toks: lex(text)?,
        i: 0,
        sig: SigMode::Infer(sig),
    }
    .sequent()
}
