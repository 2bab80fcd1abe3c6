//! Tokenizer for the supported SQL subset.
//!
//! Identifiers are lowercased (the dialect is case-insensitive); string
//! literals keep their content verbatim; number lexemes are preserved so a
//! reprinted query stays byte-stable.

use super::SqlError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    /// Identifier or keyword, lowercased.
    Ident(String),
    /// Numeric literal, original lexeme.
    Number(String),
    /// String literal content (quotes stripped, `''` unescaped).
    Str(String),
    /// Operator or punctuation, e.g. `(`, `,`, `<=`, `*`.
    Sym(&'static str),
}

impl Tok {
    pub fn is_sym(&self, s: &str) -> bool {
        matches!(self, Tok::Sym(sym) if *sym == s)
    }

    /// Case-insensitive keyword check (identifiers are already lowercase).
    pub fn is_kw(&self, kw: &str) -> bool {
        matches!(self, Tok::Ident(id) if id == kw)
    }

    pub fn ident(&self) -> Option<&str> {
        match self {
            Tok::Ident(id) => Some(id),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    /// Byte offset in the input, for error reporting.
    pub pos: usize,
}

const TWO_CHAR_SYMS: [(&str, &str); 5] = [("<=", "<="), (">=", ">="), ("<>", "<>"), ("!=", "!="), ("||", "||")];
const ONE_CHAR_SYMS: &str = "(),;*+-/=<>.%";

/// Tokenize a SQL statement.  `--` line comments are skipped.
pub fn lex(input: &str) -> Result<Vec<Token>, SqlError> {
    let bytes = input.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c == '-' && bytes.get(i + 1) == Some(&b'-') {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
            continue;
        }
        let pos = i;
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() {
                let ch = bytes[i] as char;
                if ch.is_ascii_alphanumeric() || ch == '_' || ch == '$' {
                    i += 1;
                } else {
                    break;
                }
            }
            tokens.push(Token { tok: Tok::Ident(input[start..i].to_ascii_lowercase()), pos });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
            }
            tokens.push(Token { tok: Tok::Number(input[start..i].to_string()), pos });
            continue;
        }
        if c == '\'' {
            // Scan for the closing quote on raw bytes ('' escapes a quote);
            // UTF-8 continuation bytes can never equal the ASCII quote, so
            // multi-byte content passes through intact.
            let start = i + 1;
            let mut j = start;
            loop {
                if j >= bytes.len() {
                    return Err(SqlError::ParseError {
                        position: pos,
                        expected: "closing quote for string literal".into(),
                    });
                }
                if bytes[j] == b'\'' {
                    if bytes.get(j + 1) == Some(&b'\'') {
                        j += 2;
                        continue;
                    }
                    break;
                }
                j += 1;
            }
            tokens.push(Token { tok: Tok::Str(input[start..j].replace("''", "'")), pos });
            i = j + 1;
            continue;
        }
        if let Some((_, sym)) = TWO_CHAR_SYMS
            .iter()
            .find(|(pat, _)| input[i..].starts_with(pat))
        {
            tokens.push(Token { tok: Tok::Sym(sym), pos });
            i += 2;
            continue;
        }
        if let Some(idx) = ONE_CHAR_SYMS.find(c) {
            // Index into a static list so the token borrows 'static text.
            const SYMS: [&str; 13] =
                ["(", ")", ",", ";", "*", "+", "-", "/", "=", "<", ">", ".", "%"];
            tokens.push(Token { tok: Tok::Sym(SYMS[idx]), pos });
            i += 1;
            continue;
        }
        return Err(SqlError::ParseError {
            position: pos,
            expected: format!("a token (found `{c}`)"),
        });
    }
    Ok(tokens)
}

/// Render tokens back to canonical text: single spaces between tokens, no
/// space around `.`/inside parens/before commas, strings requoted.  The
/// result lexes back to the same token sequence, so the rendering is a
/// fixed point.
pub fn join_tokens(tokens: &[Tok]) -> String {
    let mut out = String::new();
    for (i, tok) in tokens.iter().enumerate() {
        let text = match tok {
            Tok::Ident(id) => id.clone(),
            Tok::Number(n) => n.clone(),
            Tok::Str(s) => format!("'{}'", s.replace('\'', "''")),
            Tok::Sym(s) => s.to_string(),
        };
        if i > 0 {
            let prev = &tokens[i - 1];
            let tight = tok.is_sym(".")
                || tok.is_sym(",")
                || tok.is_sym(")")
                || tok.is_sym(";")
                || prev.is_sym(".")
                || prev.is_sym("(");
            if !tight {
                out.push(' ');
            }
        }
        out.push_str(&text);
    }
    out
}
