use super::{Diagnostic, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    /// Unsigned literal; range-checked by the parser so `-2147483648` works.
    Int(u64),
    KwInt,
    KwBool,
    KwVoid,
    KwTrue,
    KwFalse,
    KwIf,
    KwElse,
    KwWhile,
    KwReturn,
    KwPrint,
    KwInput,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Semi,
    Comma,
    Assign,
    PlusAssign,
    MinusAssign,
    StarAssign,
    PlusPlus,
    MinusMinus,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    AndAnd,
    OrOr,
    Bang,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::KwInt => "int",
            Tok::KwBool => "bool",
            Tok::KwVoid => "void",
            Tok::KwTrue => "true",
            Tok::KwFalse => "false",
            Tok::KwIf => "if",
            Tok::KwElse => "else",
            Tok::KwWhile => "while",
            Tok::KwReturn => "return",
            Tok::KwPrint => "print",
            Tok::KwInput => "input",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Assign => "=",
            Tok::PlusAssign => "+=",
            Tok::MinusAssign => "-=",
            Tok::StarAssign => "*=",
            Tok::PlusPlus => "++",
            Tok::MinusMinus => "--",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Slash => "/",
            Tok::Percent => "%",
            Tok::EqEq => "==",
            Tok::NotEq => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Bang => "!",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> Span {
        Span {
            start: self.pos,
            end: self.pos,
            line: self.line,
            col: self.col,
        }
    }
}

/// Tokenizes the whole input. Lexical errors are collected; offending characters are
/// skipped so that later errors are still reported.
pub(super) fn lex(src: &str) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut cur = Cursor {
        src,
        pos: 0,
        line: 1,
        col: 1,
    };
    let mut toks = Vec::new();
    let mut errs = Vec::new();

    loop {
        // whitespace and comments
        loop {
            match (cur.peek(), cur.peek2()) {
                (Some(c), _) if c.is_whitespace() => {
                    cur.bump();
                }
                (Some('/'), Some('/')) => {
                    while let Some(c) = cur.peek() {
                        if c == '\n' {
                            break;
                        }
                        cur.bump();
                    }
                }
                (Some('/'), Some('*')) => {
                    let start = cur.mark();
                    cur.bump();
                    cur.bump();
                    let mut closed = false;
                    while let Some(c) = cur.bump() {
                        if c == '*' && cur.peek() == Some('/') {
                            cur.bump();
                            closed = true;
                            break;
                        }
                    }
                    if !closed {
                        errs.push(Diagnostic::error("unterminated block comment", start));
                    }
                }
                _ => break,
            }
        }

        let mut span = cur.mark();
        let Some(c) = cur.bump() else {
            toks.push(Token {
                tok: Tok::Eof,
                span,
            });
            break;
        };

        let tok = if c.is_ascii_alphabetic() || c == '_' {
            while matches!(cur.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
                cur.bump();
            }
            let word = &src[span.start..cur.pos];
            match word {
                "int" => Tok::KwInt,
                "bool" => Tok::KwBool,
                "void" => Tok::KwVoid,
                "true" => Tok::KwTrue,
                "false" => Tok::KwFalse,
                "if" => Tok::KwIf,
                "else" => Tok::KwElse,
                "while" => Tok::KwWhile,
                "return" => Tok::KwReturn,
                "print" => Tok::KwPrint,
                "input" => Tok::KwInput,
                _ => Tok::Ident(word.to_string()),
            }
        } else if c.is_ascii_digit() {
            while matches!(cur.peek(), Some(c) if c.is_ascii_digit()) {
                cur.bump();
            }
            let digits = &src[span.start..cur.pos];
            match digits.parse::<u64>() {
                Ok(v) if v <= i32::MAX as u64 + 1 => Tok::Int(v),
                _ => {
                    span.end = cur.pos;
                    errs.push(Diagnostic::error(
                        format!("integer literal `{digits}` does not fit in 32 bits"),
                        span,
                    ));
                    Tok::Int(0)
                }
            }
        } else {
            let two = |cur: &mut Cursor, next: char, yes: Tok, no: Tok| {
                if cur.peek() == Some(next) {
                    cur.bump();
                    yes
                } else {
                    no
                }
            };
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                ';' => Tok::Semi,
                ',' => Tok::Comma,
                '%' => Tok::Percent,
                '/' => Tok::Slash,
                '*' => two(&mut cur, '=', Tok::StarAssign, Tok::Star),
                '=' => two(&mut cur, '=', Tok::EqEq, Tok::Assign),
                '<' => two(&mut cur, '=', Tok::Le, Tok::Lt),
                '>' => two(&mut cur, '=', Tok::Ge, Tok::Gt),
                '!' => two(&mut cur, '=', Tok::NotEq, Tok::Bang),
                '+' => match cur.peek() {
                    Some('+') => {
                        cur.bump();
                        Tok::PlusPlus
                    }
                    Some('=') => {
                        cur.bump();
                        Tok::PlusAssign
                    }
                    _ => Tok::Plus,
                },
                '-' => match cur.peek() {
                    Some('-') => {
                        cur.bump();
                        Tok::MinusMinus
                    }
                    Some('=') => {
                        cur.bump();
                        Tok::MinusAssign
                    }
                    _ => Tok::Minus,
                },
                '&' if cur.peek() == Some('&') => {
                    cur.bump();
                    Tok::AndAnd
                }
                '|' if cur.peek() == Some('|') => {
                    cur.bump();
                    Tok::OrOr
                }
                other => {
                    span.end = cur.pos;
                    errs.push(Diagnostic::error(
                        format!("unexpected character {other:?}"),
                        span,
                    ));
                    continue;
                }
            }
        };
        span.end = cur.pos;
        toks.push(Token { tok, span });
    }
    (toks, errs)
}
