use std::sync::Arc;

use thiserror::Error;

use super::Formula;

/// Syntax error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: expected {expected}, found {found}")]
pub struct ParseError {
    pub position: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(String),
    Not,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Atom(name) => format!("atom `{name}`"),
            Token::Not => "`~`".into(),
            Token::And => "`&`".into(),
            Token::Or => "`|`".into(),
            Token::Arrow => "`->`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\n' | b'\r' | b'\x0c' => i += 1,
            b'~' | b'!' => {
                out.push((i, Token::Not));
                i += 1;
            }
            b'&' => {
                out.push((i, Token::And));
                i += 1;
            }
            b'|' => {
                out.push((i, Token::Or));
                i += 1;
            }
            b'(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            b')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            b'-' => {
                if bytes.get(i + 1) == Some(&b'>') {
                    out.push((i, Token::Arrow));
                    i += 2;
                } else {
                    return Err(ParseError {
                        position: i + 1,
                        expected: "`>` after `-`".into(),
                        found: found_at(text, i + 1),
                    });
                }
            }
            b'a'..=b'z' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_lowercase() || bytes[i].is_ascii_digit() || bytes[i] == b'_')
                {
                    i += 1;
                }
                out.push((start, Token::Atom(text[start..i].to_string())));
            }
            _ => {
                return Err(ParseError {
                    position: i,
                    expected: "an atom, `~`, `(`, or a connective".into(),
                    found: found_at(text, i),
                })
            }
        }
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

fn found_at(text: &str, pos: usize) -> String {
    match text[pos.min(text.len())..].chars().next() {
        Some(c) => format!("`{c}`"),
        None => "end of input".into(),
    }
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError {
            position: self.offset(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    // implication binds loosest and associates to the right
    fn implication(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Token::Arrow {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Arc::new(lhs), Arc::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Token::Or {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::And {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Token::Not => {
                self.bump();
                Ok(Formula::Not(Arc::new(self.unary()?)))
            }
            Token::Atom(name) => {
                self.bump();
                Ok(Formula::Atom(Arc::from(name.as_str())))
            }
            Token::LParen => {
                self.bump();
                let inner = self.implication()?;
                if *self.peek() != Token::RParen {
                    return Err(self.error("`)`"));
                }
                self.bump();
                Ok(inner)
            }
            _ => Err(self.error("an atom, `~`, or `(`")),
        }
    }
}

/// Parses formula text. `~` and `!` are negation; precedence is
/// `~` > `&` > `|` > `->`, with `&` and `|` left associative and `->` right
/// associative.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser { tokens, pos: 0 };
    let f = parser.implication()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("a connective or end of input"));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(n: &str) -> Formula {
        Formula::atom(n)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse("p -> (q -> p)").unwrap(),
            Formula::implies(atom("p"), Formula::implies(atom("q"), atom("p")))
        );
        assert_eq!(parse("p").unwrap(), atom("p"));
        assert_eq!(
            parse("~p | ~~p").unwrap(),
            Formula::or(
                Formula::not(atom("p")),
                Formula::not(Formula::not(atom("p")))
            )
        );
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(parse("p -> q -> r").unwrap(), parse("p -> (q -> r)").unwrap());
        assert_eq!(parse("p & q & r").unwrap(), parse("(p & q) & r").unwrap());
        assert_eq!(parse("p | q | r").unwrap(), parse("(p | q) | r").unwrap());
        assert_eq!(parse("p | q & r").unwrap(), parse("p | (q & r)").unwrap());
        assert_eq!(parse("~p & q").unwrap(), parse("(~p) & q").unwrap());
        assert_eq!(parse("p | q -> r").unwrap(), parse("(p | q) -> r").unwrap());
        assert_eq!(parse("!p").unwrap(), parse("~p").unwrap());
        assert_eq!(parse(" \tp\n->q ").unwrap(), parse("p -> q").unwrap());
        assert_eq!(parse("x_1 & y2").unwrap(), Formula::and(atom("x_1"), atom("y2")));
    }

    #[test]
    fn errors_carry_position_and_hint() {
        let err = parse("p -> ").unwrap_err();
        assert_eq!(err.position, 5);
        assert!(err.expected.contains("atom"));

        let err = parse("(p & q").unwrap_err();
        assert_eq!(err.position, 6);
        assert_eq!(err.expected, "`)`");

        let err = parse("p q").unwrap_err();
        assert_eq!(err.position, 2);

        let err = parse("p - q").unwrap_err();
        assert_eq!(err.position, 3);

        let err = parse("P").unwrap_err();
        assert_eq!(err.position, 0);

        assert!(parse("").is_err());
    }
}
