use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokKind {
    Ident,
    Int,
    Str,
    Char,
    Op,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokKind,
    pub text: String,
    pub line: u32,
    pub end_line: u32,
}

const OPS: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "(", ")", "{", "}", "[", "]", ";", ",", ".", "@",
    "=", "<", ">", "!", "~", "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

/// Split Java source into tokens. Comments are kept as tokens so the
/// parser can attach them to the following member or statement.
pub fn tokenize(src: &str, file: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0usize;
    let mut line = 1u32;
    let err = |line: u32, msg: &str| ParseError::new(file, line, msg);

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start_line = line;
        // comments
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            let start = i;
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            toks.push(Token {
                kind: TokKind::Comment,
                text: text.trim_end().to_string(),
                line: start_line,
                end_line: start_line,
            });
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let start = i;
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(start_line, "unterminated block comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            toks.push(Token {
                kind: TokKind::Comment,
                text,
                line: start_line,
                end_line: line,
            });
            continue;
        }
        if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            toks.push(Token {
                kind: TokKind::Ident,
                text: chars[start..i].iter().collect(),
                line,
                end_line: line,
            });
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            if c == '0' && matches!(chars.get(i + 1), Some('x') | Some('X')) {
                i += 2;
                while i < chars.len() && (chars[i].is_ascii_hexdigit() || chars[i] == '_') {
                    i += 1;
                }
            } else {
                while i < chars.len()
                    && (chars[i].is_ascii_digit() || chars[i] == '_' || chars[i] == '.')
                {
                    i += 1;
                }
            }
            if i < chars.len() && matches!(chars[i], 'L' | 'l' | 'f' | 'F' | 'd' | 'D') {
                i += 1;
            }
            toks.push(Token {
                kind: TokKind::Int,
                text: chars[start..i].iter().collect(),
                line,
                end_line: line,
            });
            continue;
        }
        if c == '"' || c == '\'' {
            let quote = c;
            let start = i;
            i += 1;
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(err(start_line, "unterminated literal")),
                    Some('\\') => i += 2,
                    Some(&q) if q == quote => {
                        i += 1;
                        break;
                    }
                    Some(_) => i += 1,
                }
            }
            let end = i.min(chars.len());
            toks.push(Token {
                kind: if quote == '"' { TokKind::Str } else { TokKind::Char },
                text: chars[start..end].iter().collect(),
                line,
                end_line: line,
            });
            continue;
        }
        let rest: String = chars[i..(i + 4).min(chars.len())].iter().collect();
        match OPS.iter().find(|op| rest.starts_with(**op)) {
            Some(op) => {
                toks.push(Token {
                    kind: TokKind::Op,
                    text: op.to_string(),
                    line,
                    end_line: line,
                });
                i += op.chars().count();
            }
            None => return Err(err(line, &format!("unexpected character '{c}'"))),
        }
    }
    Ok(toks)
}
