use super::RuleError;

#[derive(Clone, Debug, PartialEq)]
pub(super) enum Tok {
    Ident(String),
    /// Source text plus parsed value.
    Number(String, f64),
    Str(String),
    Op(&'static str),
    LParen,
    RParen,
    And,
    Or,
    Not,
    False,
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
    /// First token on its line.
    pub line_start: bool,
}

const OPS: [&str; 6] = ["<=", "<", ">=", ">", "==", "!="];

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_' || c == '.'
}

pub(super) fn is_plain_ident(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(is_ident_char)
        && keyword(s).is_none()
}

fn keyword(word: &str) -> Option<Tok> {
    match word.to_ascii_uppercase().as_str() {
        "AND" => Some(Tok::And),
        "OR" => Some(Tok::Or),
        "NOT" => Some(Tok::Not),
        "FALSE" => Some(Tok::False),
        _ => None,
    }
}

/// Length in bytes of a number literal at the start of `s`, if any.
fn number_len(s: &str) -> Option<usize> {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'-' || b[i] == b'+') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return None;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'-' || b[j] == b'+') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    Some(i)
}

pub(super) fn tokenize(text: &str) -> Result<Vec<Token>, RuleError> {
    let mut out = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let mut line_start = true;
        let mut rest = raw_line;
        let mut offset = 0;
        loop {
            let trimmed = rest.trim_start();
            offset += rest.len() - trimmed.len();
            rest = trimmed;
            let Some(c) = rest.chars().next() else { break };
            if c == '#' {
                break;
            }
            let col = raw_line[..offset].chars().count() + 1;
            let (tok, len) = if c == '(' {
                (Tok::LParen, 1)
            } else if c == ')' {
                (Tok::RParen, 1)
            } else if "<>=!".contains(c) {
                let len = rest.find(|ch: char| !"<>=!".contains(ch)).unwrap_or(rest.len());
                let op = &rest[..len];
                match OPS.iter().find(|o| **o == op) {
                    Some(o) => (Tok::Op(o), len),
                    None => {
                        return Err(RuleError::UnknownOperator { line, col, op: op.to_string() })
                    }
                }
            } else if c == '"' || c == '\'' {
                let mut value = String::new();
                let mut escaped = false;
                let mut end = None;
                for (i, ch) in rest.char_indices().skip(1) {
                    if escaped {
                        value.push(ch);
                        escaped = false;
                    } else if ch == '\\' {
                        escaped = true;
                    } else if ch == c {
                        end = Some(i + ch.len_utf8());
                        break;
                    } else {
                        value.push(ch);
                    }
                }
                match end {
                    Some(len) => (Tok::Str(value), len),
                    None => {
                        return Err(RuleError::Syntax {
                            line,
                            col,
                            message: "unterminated string".into(),
                        })
                    }
                }
            } else if let Some(len) = number_len(rest)
                .filter(|&n| !rest[n..].starts_with(is_ident_char))
            {
                let text = &rest[..len];
                let value: f64 = text.parse().map_err(|_| RuleError::Syntax {
                    line,
                    col,
                    message: format!("bad number `{text}`"),
                })?;
                (Tok::Number(text.to_string(), value), len)
            } else if is_ident_char(c) {
                let len = rest.find(|ch: char| !is_ident_char(ch)).unwrap_or(rest.len());
                let word = &rest[..len];
                (keyword(word).unwrap_or_else(|| Tok::Ident(word.to_string())), len)
            } else {
                return Err(RuleError::Syntax {
                    line,
                    col,
                    message: format!("unexpected character `{c}`"),
                });
            };
            out.push(Token { tok, line, col, line_start });
            line_start = false;
            rest = &rest[len..];
            offset += len;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lexes_literals_and_keywords() {
        assert_eq!(
            toks("NOT a_1 >= -3.5e4 and b == \"x y\" # trailing"),
            vec![
                Tok::Not,
                Tok::Ident("a_1".into()),
                Tok::Op(">="),
                Tok::Number("-3.5e4".into(), -35000.0),
                Tok::And,
                Tok::Ident("b".into()),
                Tok::Op("=="),
                Tok::Str("x y".into()),
            ]
        );
    }

    #[test]
    fn unknown_operator_has_position() {
        assert_eq!(
            tokenize("a => 1").unwrap_err(),
            RuleError::UnknownOperator { line: 1, col: 3, op: "=>".into() }
        );
        assert!(matches!(tokenize("a = 1"), Err(RuleError::UnknownOperator { .. })));
    }

    #[test]
    fn number_prefixed_words_are_idents() {
        assert_eq!(toks("3d"), vec![Tok::Ident("3d".into())]);
    }
}
