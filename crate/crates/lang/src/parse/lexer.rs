use crate::site::Pos;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Decimal literal text; range checks happen in the parser.
    Int(String),
    Punct(&'static str),
    /// Start of a `//@` or `/*@` annotation comment.
    AnnotStart,
    AnnotEnd,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(s) => format!("`{s}`"),
            Tok::Punct(p) => format!("`{p}`"),
            Tok::AnnotStart => "annotation".into(),
            Tok::AnnotEnd => "end of annotation".into(),
            Tok::Eof => "end of file".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

#[derive(Debug, Clone)]
pub struct LexError {
    pub pos: Pos,
    pub message: String,
}

// Longest first.
const PUNCTS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "(", ")", "{", "}", "[", "]", ";", ",", "=", "<",
    ">", "+", "-", "*", "/", "%", "!", "&", "|", "^", "~", "?", ":", ".",
];

#[derive(PartialEq)]
enum Mode {
    Code,
    LineAnnot,
    BlockAnnot,
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1u32;
    let mut col = 1u32;
    let mut mode = Mode::Code;

    macro_rules! advance {
        ($n:expr) => {
            for _ in 0..$n {
                if bytes[i] == b'\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        };
    }

    while i < bytes.len() {
        let pos = Pos { line, col };
        let rest = &bytes[i..];
        let c = bytes[i];

        if c == b'\n' && mode == Mode::LineAnnot {
            out.push(Token {
                tok: Tok::AnnotEnd,
                pos,
            });
            mode = Mode::Code;
            advance!(1);
            continue;
        }
        if c.is_ascii_whitespace() {
            advance!(1);
            continue;
        }
        if mode == Mode::BlockAnnot && (rest.starts_with(b"@*/") || rest.starts_with(b"*/")) {
            out.push(Token {
                tok: Tok::AnnotEnd,
                pos,
            });
            mode = Mode::Code;
            advance!(if rest[0] == b'@' { 3 } else { 2 });
            continue;
        }
        if mode == Mode::Code && rest.starts_with(b"//@") {
            out.push(Token {
                tok: Tok::AnnotStart,
                pos,
            });
            mode = Mode::LineAnnot;
            advance!(3);
            continue;
        }
        if mode == Mode::Code && rest.starts_with(b"/*@") {
            out.push(Token {
                tok: Tok::AnnotStart,
                pos,
            });
            mode = Mode::BlockAnnot;
            advance!(3);
            continue;
        }
        if rest.starts_with(b"//") {
            while i < bytes.len() && bytes[i] != b'\n' {
                advance!(1);
            }
            continue;
        }
        if mode != Mode::BlockAnnot && rest.starts_with(b"/*") {
            let Some(end) = src[i + 2..].find("*/") else {
                return Err(LexError {
                    pos,
                    message: "unterminated comment".into(),
                });
            };
            advance!(end + 4);
            continue;
        }
        if c == b'#' {
            return Err(LexError {
                pos,
                message: "unsupported construct: preprocessor directive".into(),
            });
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                advance!(1);
            }
            out.push(Token {
                tok: Tok::Ident(src[start..i].to_string()),
                pos,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_alphanumeric() {
                advance!(1);
            }
            let text = &src[start..i];
            if !text.bytes().all(|b| b.is_ascii_digit()) {
                return Err(LexError {
                    pos,
                    message: format!("unsupported literal `{text}`: only decimal integers are allowed"),
                });
            }
            if text.len() > 1 && text.starts_with('0') {
                return Err(LexError {
                    pos,
                    message: format!("unsupported literal `{text}`: octal literals are not allowed"),
                });
            }
            out.push(Token {
                tok: Tok::Int(text.to_string()),
                pos,
            });
            continue;
        }
        if let Some(p) = PUNCTS.iter().find(|p| rest.starts_with(p.as_bytes())) {
            out.push(Token {
                tok: Tok::Punct(p),
                pos,
            });
            advance!(p.len());
            continue;
        }
        let ch = src[i..].chars().next().unwrap_or('?');
        return Err(LexError {
            pos,
            message: format!("unexpected character `{ch}`"),
        });
    }

    let pos = Pos { line, col };
    match mode {
        Mode::Code => {}
        Mode::LineAnnot => out.push(Token {
            tok: Tok::AnnotEnd,
            pos,
        }),
        Mode::BlockAnnot => {
            return Err(LexError {
                pos,
                message: "unterminated annotation".into(),
            })
        }
    }
    out.push(Token { tok: Tok::Eof, pos });
    Ok(out)
}
