use super::{Direction, Position, ShexError};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    /// Unescaped content of `<...>`, possibly relative.
    IriRef(String),
    PName { prefix: String, local: String },
    /// Bare word other than `a`, upper-cased.
    Keyword(String),
    /// The `a` shorthand for `rdf:type`.
    A,
    Str(String),
    LangTag(String),
    Number { lexical: String, kind: NumberKind },
    Regex { pattern: String, flags: String },
    /// `#in:` / `#out:` line with the text following the colon.
    Annotation { direction: Direction, text: String },
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    LParen,
    RParen,
    Semi,
    Comma,
    Caret,
    DoubleCaret,
    At,
    Amp,
    Dollar,
    Star,
    Plus,
    Question,
    Dot,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum NumberKind {
    Integer,
    Decimal,
    Double,
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub pos: Position,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ShexError> {
    let mut lexer = Lexer {
        chars: text.chars().collect(),
        idx: 0,
        line: 1,
        column: 1,
        line_has_content: false,
    };
    let mut tokens = Vec::new();
    loop {
        let token = lexer.next_token()?;
        let done = token.tok == Tok::Eof;
        tokens.push(token);
        if done {
            return Ok(tokens);
        }
    }
}

struct Lexer {
    chars: Vec<char>,
    idx: usize,
    line: usize,
    column: usize,
    /// Whether a non-whitespace character has been seen on the current line.
    line_has_content: bool,
}

fn is_name_start(c: char) -> bool {
    c.is_alphabetic() || c == '_'
}

fn is_name_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '-' | '.')
}

impl Lexer {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.idx).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.idx + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.idx).copied()?;
        self.idx += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
            self.line_has_content = false;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn pos(&self) -> Position {
        Position {
            line: self.line,
            column: self.column,
        }
    }

    fn error(&self, pos: Position, message: impl Into<String>) -> ShexError {
        ShexError::Syntax {
            pos,
            message: message.into(),
        }
    }

    fn next_token(&mut self) -> Result<Token, ShexError> {
        loop {
            while self.peek().is_some_and(char::is_whitespace) {
                self.bump();
            }
            let pos = self.pos();
            let Some(c) = self.peek() else {
                return Ok(Token { tok: Tok::Eof, pos });
            };
            if c == '#' {
                let line_start = !self.line_has_content;
                if let Some(tok) = self.comment(line_start) {
                    return Ok(Token { tok, pos });
                }
                continue;
            }
            self.line_has_content = true;
            let tok = self.token(c, pos)?;
            return Ok(Token { tok, pos });
        }
    }

    /// Consumes a comment; returns an annotation token if the comment is an
    /// `#in:` / `#out:` line.
    fn comment(&mut self, line_start: bool) -> Option<Tok> {
        let mut body = String::new();
        self.bump();
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            body.push(c);
            self.bump();
        }
        if !line_start {
            return None;
        }
        let (direction, text) = if let Some(rest) = body.strip_prefix("in:") {
            (Direction::In, rest)
        } else {
            (Direction::Out, body.strip_prefix("out:")?)
        };
        Some(Tok::Annotation {
            direction,
            text: text.trim_end_matches('\r').to_string(),
        })
    }

    fn token(&mut self, c: char, pos: Position) -> Result<Tok, ShexError> {
        let single = match c {
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ';' => Some(Tok::Semi),
            ',' => Some(Tok::Comma),
            '&' => Some(Tok::Amp),
            '$' => Some(Tok::Dollar),
            '*' => Some(Tok::Star),
            '?' => Some(Tok::Question),
            _ => None,
        };
        if let Some(tok) = single {
            self.bump();
            return Ok(tok);
        }
        match c {
            '<' => self.iri_ref(pos),
            '"' | '\'' => self.string(c, pos),
            '/' => self.regex(pos),
            '^' => {
                self.bump();
                if self.peek() == Some('^') {
                    self.bump();
                    Ok(Tok::DoubleCaret)
                } else {
                    Ok(Tok::Caret)
                }
            }
            '@' => self.at(pos),
            '+' | '-' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit() || d == '.') => {
                self.number(pos)
            }
            '+' => {
                self.bump();
                Ok(Tok::Plus)
            }
            '.' if self.peek_at(1).is_some_and(|d| d.is_ascii_digit()) => self.number(pos),
            '.' => {
                self.bump();
                Ok(Tok::Dot)
            }
            c if c.is_ascii_digit() => self.number(pos),
            ':' => {
                self.bump();
                let local = self.local_name();
                Ok(Tok::PName {
                    prefix: String::new(),
                    local,
                })
            }
            c if is_name_start(c) => self.word(pos),
            other => Err(self.error(pos, format!("unexpected character {other:?}"))),
        }
    }

    fn iri_ref(&mut self, pos: Position) -> Result<Tok, ShexError> {
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                Some('>') => return Ok(Tok::IriRef(value)),
                Some('\\') => value.push(self.unicode_escape(pos)?),
                Some(c) if c.is_whitespace() || matches!(c, '<' | '"' | '{' | '}' | '|' | '^' | '`') => {
                    return Err(self.error(pos, format!("invalid character {c:?} in IRI")))
                }
                Some(c) => value.push(c),
                None => return Err(self.error(pos, "unterminated IRI")),
            }
        }
    }

    /// Reads the remainder of a `\u` / `\U` escape; the backslash is consumed.
    fn unicode_escape(&mut self, pos: Position) -> Result<char, ShexError> {
        let len = match self.bump() {
            Some('u') => 4,
            Some('U') => 8,
            _ => return Err(self.error(pos, "invalid escape sequence")),
        };
        let mut hex = String::new();
        for _ in 0..len {
            match self.bump() {
                Some(h) if h.is_ascii_hexdigit() => hex.push(h),
                _ => return Err(self.error(pos, "invalid unicode escape")),
            }
        }
        u32::from_str_radix(&hex, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(pos, "invalid unicode code point"))
    }

    fn string(&mut self, quote: char, pos: Position) -> Result<Tok, ShexError> {
        self.bump();
        let mut value = String::new();
        loop {
            match self.bump() {
                Some(c) if c == quote => return Ok(Tok::Str(value)),
                Some('\\') => {
                    let escaped = match self.peek() {
                        Some('t') => '\t',
                        Some('n') => '\n',
                        Some('r') => '\r',
                        Some('b') => '\u{8}',
                        Some('f') => '\u{c}',
                        Some('"') => '"',
                        Some('\'') => '\'',
                        Some('\\') => '\\',
                        Some('u') | Some('U') => {
                            value.push(self.unicode_escape(pos)?);
                            continue;
                        }
                        _ => return Err(self.error(pos, "invalid escape sequence in string")),
                    };
                    self.bump();
                    value.push(escaped);
                }
                Some('\n') | None => return Err(self.error(pos, "unterminated string literal")),
                Some(c) => value.push(c),
            }
        }
    }

    fn regex(&mut self, pos: Position) -> Result<Tok, ShexError> {
        self.bump();
        let mut pattern = String::new();
        loop {
            match self.bump() {
                Some('/') => break,
                Some('\\') => {
                    pattern.push('\\');
                    match self.bump() {
                        Some(c) if c != '\n' => pattern.push(c),
                        _ => return Err(self.error(pos, "unterminated regular expression")),
                    }
                }
                Some('\n') | None => return Err(self.error(pos, "unterminated regular expression")),
                Some(c) => pattern.push(c),
            }
        }
        let mut flags = String::new();
        while let Some(c) = self.peek().filter(|c| matches!(c, 's' | 'm' | 'i' | 'x')) {
            flags.push(c);
            self.bump();
        }
        Ok(Tok::Regex { pattern, flags })
    }

    /// `@` starts either a language tag (`@en`) or a shape reference
    /// (`@<label>`, `@ex:label`).
    fn at(&mut self, pos: Position) -> Result<Tok, ShexError> {
        let mut offset = 1;
        while self
            .peek_at(offset)
            .is_some_and(|c| c.is_ascii_alphanumeric() || c == '-')
        {
            offset += 1;
        }
        let is_lang = offset > 1
            && self.peek_at(1).is_some_and(|c| c.is_ascii_alphabetic())
            && self.peek_at(offset) != Some(':')
            && !self.peek_at(offset).is_some_and(|c| is_name_char(c) && c != '.');
        self.bump();
        if !is_lang {
            return Ok(Tok::At);
        }
        let mut tag = String::new();
        for _ in 1..offset {
            tag.push(self.bump().unwrap_or_default());
        }
        if !is_valid_lang_tag(&tag) {
            return Err(self.error(pos, format!("invalid language tag @{tag}")));
        }
        Ok(Tok::LangTag(tag))
    }

    fn number(&mut self, pos: Position) -> Result<Tok, ShexError> {
        let mut lexical = String::new();
        if let Some(sign) = self.peek().filter(|c| matches!(c, '+' | '-')) {
            lexical.push(sign);
            self.bump();
        }
        let mut kind = NumberKind::Integer;
        self.digits(&mut lexical);
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            kind = NumberKind::Decimal;
            lexical.push('.');
            self.bump();
            self.digits(&mut lexical);
        }
        if self.peek().is_some_and(|c| c == 'e' || c == 'E') {
            kind = NumberKind::Double;
            lexical.push('e');
            self.bump();
            if let Some(sign) = self.peek().filter(|c| matches!(c, '+' | '-')) {
                lexical.push(sign);
                self.bump();
            }
            if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(self.error(pos, "malformed exponent"));
            }
            self.digits(&mut lexical);
        }
        Ok(Tok::Number { lexical, kind })
    }

    fn digits(&mut self, out: &mut String) {
        while let Some(d) = self.peek().filter(char::is_ascii_digit) {
            out.push(d);
            self.bump();
        }
    }

    /// Reads a run of name characters, leaving a trailing `.` unconsumed.
    fn name_run(&mut self, allow_colon: bool) -> String {
        let mut end = self.idx;
        while let Some(&c) = self.chars.get(end) {
            if is_name_char(c) || (allow_colon && c == ':') || (allow_colon && c == '%') {
                end += 1;
            } else {
                break;
            }
        }
        while end > self.idx && self.chars[end - 1] == '.' {
            end -= 1;
        }
        let mut out = String::new();
        while self.idx < end {
            out.push(self.bump().unwrap_or_default());
        }
        out
    }

    fn local_name(&mut self) -> String {
        self.name_run(true)
    }

    fn word(&mut self, pos: Position) -> Result<Tok, ShexError> {
        let word = self.name_run(false);
        if self.peek() == Some(':') {
            if word == "_" {
                return Err(self.error(pos, "blank nodes are not supported"));
            }
            self.bump();
            let local = self.local_name();
            return Ok(Tok::PName {
                prefix: word,
                local,
            });
        }
        if word == "a" {
            return Ok(Tok::A);
        }
        Ok(Tok::Keyword(word.to_ascii_uppercase()))
    }
}

pub(crate) fn is_valid_lang_tag(tag: &str) -> bool {
    let mut parts = tag.split('-');
    let primary_ok = parts
        .next()
        .is_some_and(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphabetic()));
    primary_ok && parts.all(|p| !p.is_empty() && p.chars().all(|c| c.is_ascii_alphanumeric()))
}
