//! Numeric expressions for parameter values: `0.25`, `pi/4`, `3pi/4`,
//! `-2*pi + 0.1`, `1e-3`. `pi` and `tau` are the only names; a number
//! directly followed by a name or `(` multiplies it.

use std::f64::consts::{PI, TAU};

pub fn eval(input: &str) -> Result<f64, String> {
    let mut parser = Parser {
        src: input.as_bytes(),
        pos: 0,
    };
    let value = parser.expr()?;
    parser.skip_ws();
    if parser.pos != parser.src.len() {
        return Err(format!(
            "unexpected `{}` in `{input}`",
            &input[parser.pos..]
        ));
    }
    if !value.is_finite() {
        return Err(format!("`{input}` is not finite"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.src.get(self.pos).is_some_and(u8::is_ascii_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut value = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            value = if op == b'+' { value + rhs } else { value - rhs };
        }
        Ok(value)
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut value = self.unary()?;
        loop {
            match self.peek() {
                Some(op @ (b'*' | b'/')) => {
                    self.pos += 1;
                    let rhs = self.unary()?;
                    value = if op == b'*' { value * rhs } else { value / rhs };
                }
                Some(c) if c.is_ascii_alphabetic() || c == b'(' => value *= self.primary()?,
                _ => return Ok(value),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let value = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err("missing `)`".into());
                }
                self.pos += 1;
                Ok(value)
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(u8::is_ascii_alphabetic) {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"pi" => Ok(PI),
                    b"tau" => Ok(TAU),
                    name => Err(format!("unknown name `{}`", String::from_utf8_lossy(name))),
                }
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) => Err(format!("unexpected `{}`", c as char)),
            None => Err("expression ends early".into()),
        }
    }

    fn number(&mut self) -> Result<f64, String> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            while p
                .src
                .get(p.pos)
                .is_some_and(|c| c.is_ascii_digit() || *c == b'.')
            {
                p.pos += 1;
            }
        };
        digits(self);
        // exponent only when digits follow, so `2e` stays an error
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            let mut end = self.pos + 1;
            if matches!(self.src.get(end), Some(b'+' | b'-')) {
                end += 1;
            }
            if self.src.get(end).is_some_and(u8::is_ascii_digit) {
                self.pos = end;
                digits(self);
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse()
            .map_err(|_| format!("`{text}` is not a number"))
    }
}
