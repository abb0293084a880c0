//! Numeric expressions accepted in scene files, e.g. `"sqrt(2)/4"` or
//! `"9 - 4*sqrt(2)"`.
//!
//! Grammar: `expr := term (('+'|'-') term)*`, `term := unary (('*'|'/') unary)*`,
//! `unary := '-' unary | atom`, `atom := number | 'sqrt' '(' expr ')' | '(' expr ')'`.
//! `×`, `÷` and `−` are accepted as operator spellings.

use std::iter::Peekable;
use std::str::CharIndices;

pub fn eval_expr(src: &str) -> Result<f64, String> {
    let mut p = Parser {
        src,
        it: src.char_indices().peekable(),
    };
    let v = p.expr()?;
    p.skip_ws();
    if let Some(&(i, c)) = p.it.peek() {
        return Err(format!("unexpected '{c}' at offset {i} in \"{src}\""));
    }
    if !v.is_finite() {
        return Err(format!("\"{src}\" is not finite"));
    }
    Ok(v)
}

struct Parser<'a> {
    src: &'a str,
    it: Peekable<CharIndices<'a>>,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.it.next_if(|(_, c)| c.is_whitespace()).is_some() {}
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.it.peek().map(|&(_, c)| c)
    }

    fn expr(&mut self) -> Result<f64, String> {
        let mut v = self.term()?;
        loop {
            match self.peek() {
                Some('+') => {
                    self.it.next();
                    v += self.term()?;
                }
                Some('-' | '−') => {
                    self.it.next();
                    v -= self.term()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn term(&mut self) -> Result<f64, String> {
        let mut v = self.unary()?;
        loop {
            match self.peek() {
                Some('*' | '×') => {
                    self.it.next();
                    v *= self.unary()?;
                }
                Some('/' | '÷') => {
                    self.it.next();
                    v /= self.unary()?;
                }
                _ => return Ok(v),
            }
        }
    }

    fn unary(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('-' | '−') => {
                self.it.next();
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.it.next();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<f64, String> {
        match self.peek() {
            Some('(') => {
                self.it.next();
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.it.peek().unwrap().0;
                let mut end = start;
                while let Some((i, c)) = self.it.next_if(|(_, c)| c.is_ascii_alphabetic()) {
                    end = i + c.len_utf8();
                }
                let name = &self.src[start..end];
                if name != "sqrt" {
                    return Err(format!("unknown function '{name}' in \"{}\"", self.src));
                }
                self.expect('(')?;
                let v = self.expr()?;
                self.expect(')')?;
                if v < 0.0 {
                    return Err(format!("sqrt of negative value in \"{}\"", self.src));
                }
                Ok(v.sqrt())
            }
            Some(c) => Err(format!("unexpected '{c}' in \"{}\"", self.src)),
            None => Err(format!("unexpected end of \"{}\"", self.src)),
        }
    }

    fn number(&mut self) -> Result<f64, String> {
        let start = self.it.peek().unwrap().0;
        let mut end = start;
        let mut prev = ' ';
        while let Some((i, c)) = self.it.next_if(|&(_, c)| {
            c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || ((c == '+' || c == '-') && matches!(prev, 'e' | 'E'))
        }) {
            prev = c;
            end = i + c.len_utf8();
        }
        let text = &self.src[start..end];
        text.parse().map_err(|_| format!("bad number '{text}' in \"{}\"", self.src))
    }

    fn expect(&mut self, want: char) -> Result<(), String> {
        match self.peek() {
            Some(c) if c == want => {
                self.it.next();
                Ok(())
            }
            _ => Err(format!("expected '{want}' in \"{}\"", self.src)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_irrational_knots() {
        assert_eq!(eval_expr("sqrt(2)/4").unwrap(), 2f64.sqrt() / 4.0);
        assert_eq!(eval_expr("9 - 4*sqrt(2)").unwrap(), 9.0 - 4.0 * 2f64.sqrt());
        assert_eq!(eval_expr("8/7").unwrap(), 8.0 / 7.0);
        assert_eq!(eval_expr("−(1 + 2) × 3 ÷ 4").unwrap(), -9.0 / 4.0);
        assert_eq!(eval_expr("1.5e-3").unwrap(), 1.5e-3);
        assert_eq!(eval_expr("2e+1").unwrap(), 20.0);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "1 +", "sqrt(-1)", "cos(1)", "(1", "1 2", "1/0", "2x"] {
            assert!(eval_expr(bad).is_err(), "{bad}");
        }
    }
}
