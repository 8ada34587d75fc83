//! A small character cursor shared by the text grammars.

use crate::error::Error;
use crate::rational::Q;
use num_bigint::BigInt;
use num_traits::Zero;

pub(crate) struct Cursor<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Cursor { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    pub fn peek2(&self) -> Option<char> {
        self.rest().chars().nth(1)
    }

    pub fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    pub fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.bump();
        }
    }

    /// Skips spaces and tabs only, leaving newlines in place.
    pub fn skip_blank(&mut self) {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> Result<(), Error> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    pub fn position(&self) -> (usize, usize) {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = match before.rfind('\n') {
            Some(i) => before[i + 1..].chars().count() + 1,
            None => before.chars().count() + 1,
        };
        (line, column)
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.position();
        let mut message = message.into();
        match self.peek() {
            Some(c) => message.push_str(&format!(", found `{c}`")),
            None => message.push_str(", found end of input"),
        }
        Error::parse(line, column, message)
    }

    pub fn ident(&mut self) -> Option<&'a str> {
        let start = self.pos;
        match self.peek() {
            Some(c) if c.is_alphabetic() || c == '_' => {
                self.bump();
            }
            _ => return None,
        }
        while matches!(self.peek(), Some(c) if c.is_alphanumeric() || c == '_') {
            self.bump();
        }
        Some(&self.src[start..self.pos])
    }

    pub fn unsigned(&mut self) -> Option<BigInt> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if start == self.pos {
            None
        } else {
            self.src[start..self.pos].parse().ok()
        }
    }

    pub fn small_unsigned(&mut self) -> Result<u32, Error> {
        let n = self
            .unsigned()
            .ok_or_else(|| self.error("expected an integer"))?;
        u32::try_from(n).map_err(|_| self.error("integer out of range"))
    }

    /// An unsigned rational `p` or `p/q`. A `/` not followed by a digit is left alone.
    pub fn unsigned_rational(&mut self) -> Result<Option<Q>, Error> {
        let Some(n) = self.unsigned() else {
            return Ok(None);
        };
        if self.peek() == Some('/') && matches!(self.peek2(), Some(c) if c.is_ascii_digit()) {
            self.bump();
            let d = self.unsigned().expect("digit checked");
            if d.is_zero() {
                return Err(self.error("zero denominator"));
            }
            return Ok(Some(Q::new(n, d)));
        }
        Ok(Some(Q::from_integer(n)))
    }

    pub fn finish(&mut self) -> Result<(), Error> {
        self.skip_ws();
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}
