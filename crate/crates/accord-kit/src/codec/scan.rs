use crate::error::CodecError;

/// Whitespace-tolerant token scanner with line/column tracking. Keywords are
/// matched literally but may be separated by arbitrary whitespace; numeric
/// tokens are unsigned decimal integers only.
pub(crate) struct Scanner<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
    col: usize,
}

impl<'a> Scanner<'a> {
    pub fn new(text: &'a str) -> Self {
        Scanner { text, pos: 0, line: 1, col: 1 }
    }

    pub fn malformed(&self, expected: impl Into<String>) -> CodecError {
        CodecError::Malformed { line: self.line, col: self.col, expected: expected.into() }
    }

    fn advance(&mut self, len: usize) {
        for c in self.text[self.pos..self.pos + len].chars() {
            if c == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.pos += len;
    }

    pub fn skip_ws(&mut self) {
        let rest = self.text[self.pos..]
            .char_indices()
            .find(|&(_, c)| !c.is_whitespace())
            .map_or(self.text.len() - self.pos, |(i, _)| i);
        self.advance(rest);
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }

    /// Consumes `token` if it is next (after whitespace). The token itself is
    /// matched byte-for-byte; internal spaces in `token` match any non-empty
    /// whitespace run.
    pub fn eat(&mut self, token: &str) -> bool {
        let save = (self.pos, self.line, self.col);
        for (i, part) in token.split(' ').filter(|p| !p.is_empty()).enumerate() {
            if i == 0 {
                self.skip_ws();
            } else {
                let before = self.pos;
                self.skip_ws();
                if self.pos == before {
                    (self.pos, self.line, self.col) = save;
                    return false;
                }
            }
            if self.text[self.pos..].starts_with(part) {
                self.advance(part.len());
            } else {
                (self.pos, self.line, self.col) = save;
                return false;
            }
        }
        true
    }

    pub fn expect(&mut self, token: &str) -> Result<(), CodecError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.skip_ws();
            Err(self.malformed(format!("`{token}`")))
        }
    }

    /// Peeks whether `token` is next without consuming it.
    pub fn peek(&mut self, token: &str) -> bool {
        let save = (self.pos, self.line, self.col);
        let hit = self.eat(token);
        (self.pos, self.line, self.col) = save;
        hit
    }

    pub fn uint(&mut self) -> Result<i64, CodecError> {
        self.skip_ws();
        let digits: String = self.text[self.pos..]
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .collect();
        if digits.is_empty() {
            return Err(self.malformed("unsigned integer"));
        }
        let value = digits
            .parse::<i64>()
            .map_err(|_| self.malformed("integer in range"))?;
        self.advance(digits.len());
        Ok(value)
    }

    pub fn uindex(&mut self) -> Result<usize, CodecError> {
        Ok(self.uint()? as usize)
    }

    /// Consumes a trailing comma if present.
    pub fn eat_comma(&mut self) -> bool {
        self.eat(",")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerates_whitespace_between_tokens() {
        let mut s = Scanner::new("  Total   Value :  30 ");
        assert!(s.eat("Total Value"));
        assert!(s.eat(":"));
        assert_eq!(s.uint().unwrap(), 30);
        assert!(s.at_end());
    }

    #[test]
    fn reports_location() {
        let mut s = Scanner::new("abc\nxy 12z");
        assert!(s.eat("abc"));
        assert!(s.eat("xy"));
        assert_eq!(s.uint().unwrap(), 12);
        let err = s.uint().unwrap_err();
        match err {
            CodecError::Malformed { line, col, .. } => {
                assert_eq!(line, 2);
                assert_eq!(col, 6);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn rejects_signed_numbers() {
        let mut s = Scanner::new("-3");
        assert!(s.uint().is_err());
    }
}
