use super::lexer::{tokenize, Tok, Token};
use super::{Conjunction, Literal, Provenance, RuleError, RuleSet, Template};
use crate::dataset::Condition;

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Position reported at end of input.
    end: (usize, usize),
}

impl Parser {
    fn new(text: &str) -> Result<Self, RuleError> {
        let tokens = tokenize(text)?;
        let lines = text.lines().count().max(1);
        let last_col = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
        Ok(Self { tokens, pos: 0, end: (lines, last_col) })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn error_at(&self, tok: Option<&Token>, message: impl Into<String>) -> RuleError {
        let (line, col) = tok.map_or(self.end, |t| (t.line, t.col));
        RuleError::Syntax { line, col, message: message.into() }
    }

    /// Clauses as literal lists, or an empty list for blank input / `FALSE`.
    fn clauses(&mut self) -> Result<Vec<Vec<Literal>>, RuleError> {
        if self.peek().is_none() {
            return Ok(Vec::new());
        }
        if matches!(self.peek().map(|t| &t.tok), Some(Tok::False)) {
            self.next();
            if let Some(t) = self.peek() {
                return Err(self.error_at(Some(t), "unexpected input after FALSE"));
            }
            return Ok(Vec::new());
        }
        let mut out = vec![self.clause()?];
        while let Some(t) = self.peek() {
            match t.tok {
                Tok::Or => {
                    self.next();
                    out.push(self.clause()?);
                }
                // a clause opening a new line is an implicit OR
                Tok::Ident(_) | Tok::Not | Tok::LParen if t.line_start => out.push(self.clause()?),
                _ => return Err(self.error_at(Some(t), "expected `OR` or end of input")),
            }
        }
        Ok(out)
    }

    fn clause(&mut self) -> Result<Vec<Literal>, RuleError> {
        let paren = matches!(self.peek().map(|t| &t.tok), Some(Tok::LParen));
        if paren {
            self.next();
        }
        let mut literals = vec![self.literal()?];
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::And)) {
            self.next();
            literals.push(self.literal()?);
        }
        if paren {
            match self.next() {
                Some(Token { tok: Tok::RParen, .. }) => {}
                other => return Err(self.error_at(other.as_ref(), "expected `)`")),
            }
        }
        Ok(literals)
    }

    fn literal(&mut self) -> Result<Literal, RuleError> {
        let mut negated = false;
        while matches!(self.peek().map(|t| &t.tok), Some(Tok::Not)) {
            self.next();
            negated = !negated;
        }
        let feature = match self.next() {
            Some(Token { tok: Tok::Ident(name), .. }) => name,
            other => return Err(self.error_at(other.as_ref(), "expected feature name")),
        };
        let op = match self.next() {
            Some(Token { tok: Tok::Op(op), .. }) => op,
            other => return Err(self.error_at(other.as_ref(), "expected comparison operator")),
        };
        let value_tok = self.next();
        let condition = match (op, value_tok.as_ref().map(|t| &t.tok)) {
            ("==", Some(Tok::Ident(v) | Tok::Str(v) | Tok::Number(v, _))) => {
                Condition::Equals(v.clone())
            }
            ("!=", Some(Tok::Ident(v) | Tok::Str(v) | Tok::Number(v, _))) => {
                Condition::NotEquals(v.clone())
            }
            ("<=", Some(Tok::Number(_, t))) => Condition::LessEqual(*t),
            ("<", Some(Tok::Number(_, t))) => Condition::Less(*t),
            (">=", Some(Tok::Number(_, t))) => Condition::GreaterEqual(*t),
            (">", Some(Tok::Number(_, t))) => Condition::Greater(*t),
            ("==" | "!=", _) => return Err(self.error_at(value_tok.as_ref(), "expected value")),
            _ => return Err(self.error_at(value_tok.as_ref(), "expected number")),
        };
        let lit = Literal::new(feature, condition);
        Ok(if negated { lit.negate() } else { lit })
    }
}

/// Parses a DNF rule set; each OR-branch becomes one human conjunction.
/// Repeated clauses collapse to one.
pub fn parse_rules(text: &str) -> Result<RuleSet, RuleError> {
    let mut parser = Parser::new(text)?;
    let mut rs = RuleSet::default();
    for literals in parser.clauses()? {
        rs.push(Conjunction::new(literals, Provenance::Human)?);
    }
    Ok(rs)
}

/// Parses partial templates with the same grammar as [`parse_rules`].
pub fn parse_templates(text: &str) -> Result<Vec<Template>, RuleError> {
    let mut parser = Parser::new(text)?;
    let mut out: Vec<Template> = Vec::new();
    for literals in parser.clauses()? {
        let t = Template::new(literals)?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}
