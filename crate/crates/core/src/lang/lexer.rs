use super::ast::Span;
use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    /// Integer literal that only fits once negated (`-9223372036854775808`).
    IntMinMagnitude,
    Float(f64),
    Str(String),
    Def,
    Class,
    If,
    Elif,
    Else,
    While,
    Return,
    Raise,
    Pass,
    And,
    Or,
    Not,
    Is,
    In,
    True,
    False,
    None,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Dot,
    Arrow,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Newline,
    Eof,
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "def" => Tok::Def,
        "class" => Tok::Class,
        "if" => Tok::If,
        "elif" => Tok::Elif,
        "else" => Tok::Else,
        "while" => Tok::While,
        "return" => Tok::Return,
        "raise" => Tok::Raise,
        "pass" => Tok::Pass,
        "and" => Tok::And,
        "or" => Tok::Or,
        "not" => Tok::Not,
        "is" => Tok::Is,
        "in" => Tok::In,
        "True" => Tok::True,
        "False" => Tok::False,
        "None" => Tok::None,
        _ => return None,
    })
}

/// Splits source text into tokens. Newlines inside parentheses are dropped;
/// runs of newlines collapse into one `Newline` token.
pub fn tokenize(source: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = source.chars().collect();
    let mut tokens: Vec<Token> = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let mut depth = 0usize;

    macro_rules! push {
        ($tok:expr, $span:expr) => {
            tokens.push(Token { tok: $tok, span: $span })
        };
    }

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        match c {
            '\n' => {
                if depth == 0 && !matches!(tokens.last().map(|t| &t.tok), Some(Tok::Newline) | None)
                {
                    push!(Tok::Newline, span);
                }
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            ' ' | '\t' | '\r' => {
                i += 1;
                col += 1;
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '"' => {
                let (text, consumed, lines) = lex_string(&chars[i..], span)?;
                push!(Tok::Str(text), span);
                i += consumed;
                if lines > 0 {
                    line += lines;
                    col = 1;
                } else {
                    col += consumed as u32;
                }
                continue;
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_float = false;
                if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                    is_float = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        is_float = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let tok = if is_float {
                    let v: f64 = text
                        .parse()
                        .map_err(|_| SyntaxError::new(span, format!("bad float literal `{text}`")))?;
                    if !v.is_finite() {
                        return Err(SyntaxError::new(span, format!("float literal `{text}` overflows")));
                    }
                    Tok::Float(v)
                } else {
                    match text.parse::<i64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) if text == "9223372036854775808" => Tok::IntMinMagnitude,
                        Err(_) => {
                            return Err(SyntaxError::new(
                                span,
                                format!("integer literal `{text}` out of range"),
                            ))
                        }
                    }
                };
                col += (i - start) as u32;
                push!(tok, span);
                continue;
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                col += (i - start) as u32;
                push!(keyword(&word).unwrap_or(Tok::Ident(word)), span);
                continue;
            }
            _ => {}
        }

        let next = chars.get(i + 1).copied();
        let (tok, width) = match (c, next) {
            ('-', Some('>')) => (Tok::Arrow, 2),
            ('=', Some('=')) => (Tok::EqEq, 2),
            ('!', Some('=')) => (Tok::NotEq, 2),
            ('<', Some('=')) => (Tok::Le, 2),
            ('>', Some('=')) => (Tok::Ge, 2),
            ('(', _) => {
                depth += 1;
                (Tok::LParen, 1)
            }
            (')', _) => {
                depth = depth.saturating_sub(1);
                (Tok::RParen, 1)
            }
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            (',', _) => (Tok::Comma, 1),
            (':', _) => (Tok::Colon, 1),
            (';', _) => (Tok::Semi, 1),
            ('.', _) => (Tok::Dot, 1),
            ('=', _) => (Tok::Assign, 1),
            ('<', _) => (Tok::Lt, 1),
            ('>', _) => (Tok::Gt, 1),
            ('+', _) => (Tok::Plus, 1),
            ('-', _) => (Tok::Minus, 1),
            ('*', _) => (Tok::Star, 1),
            ('/', _) => (Tok::Slash, 1),
            ('%', _) => (Tok::Percent, 1),
            _ => return Err(SyntaxError::new(span, format!("unexpected character `{c}`"))),
        };
        push!(tok, span);
        i += width;
        col += width as u32;
    }
    tokens.push(Token {
        tok: Tok::Eof,
        span: Span::new(line, col),
    });
    Ok(tokens)
}

/// Returns (decoded text, chars consumed, newlines crossed).
fn lex_string(chars: &[char], span: Span) -> Result<(String, usize, u32), SyntaxError> {
    let mut out = String::new();
    let mut i = 1;
    let mut lines = 0;
    loop {
        let Some(&c) = chars.get(i) else {
            return Err(SyntaxError::new(span, "unterminated string literal"));
        };
        match c {
            '"' => return Ok((out, i + 1, lines)),
            '\\' => {
                let esc = chars
                    .get(i + 1)
                    .copied()
                    .ok_or_else(|| SyntaxError::new(span, "unterminated escape"))?;
                i += 2;
                match esc {
                    'n' => out.push('\n'),
                    't' => out.push('\t'),
                    'r' => out.push('\r'),
                    '0' => out.push('\0'),
                    '\\' => out.push('\\'),
                    '"' => out.push('"'),
                    'u' => {
                        if chars.get(i) != Some(&'{') {
                            return Err(SyntaxError::new(span, "expected `{` after \\u"));
                        }
                        let close = chars[i..]
                            .iter()
                            .position(|&c| c == '}')
                            .ok_or_else(|| SyntaxError::new(span, "unterminated \\u escape"))?;
                        let hex: String = chars[i + 1..i + close].iter().collect();
                        let ch = u32::from_str_radix(&hex, 16)
                            .ok()
                            .and_then(char::from_u32)
                            .ok_or_else(|| SyntaxError::new(span, format!("bad \\u escape `{hex}`")))?;
                        out.push(ch);
                        i += close + 1;
                    }
                    other => {
                        return Err(SyntaxError::new(span, format!("unknown escape `\\{other}`")))
                    }
                }
            }
            '\n' => {
                lines += 1;
                out.push(c);
                i += 1;
            }
            _ => {
                out.push(c);
                i += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn numbers_and_operators() {
        assert_eq!(
            toks("x = 1.5e3 <= 42"),
            vec![
                Tok::Ident("x".into()),
                Tok::Assign,
                Tok::Float(1500.0),
                Tok::Le,
                Tok::Int(42),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn newlines_collapse_and_vanish_in_parens() {
        assert_eq!(
            toks("f(1,\n 2)\n\n\ny"),
            vec![
                Tok::Ident("f".into()),
                Tok::LParen,
                Tok::Int(1),
                Tok::Comma,
                Tok::Int(2),
                Tok::RParen,
                Tok::Newline,
                Tok::Ident("y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn string_escapes() {
        assert_eq!(
            toks(r#""a\"b\n\u{e9}""#),
            vec![Tok::Str("a\"b\né".into()), Tok::Eof]
        );
    }

    #[test]
    fn unterminated_string_reports_position() {
        let err = tokenize("x = \"abc").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
    }
}
