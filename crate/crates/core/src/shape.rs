//! Orders of groups written in ATLAS-style shape notation, such as
//! `2^{10+3}.Sym_6`, `6.(GO_4^+(2) x GO_4^+(3)).2` or `(Q_8:2^2).(2 x Sym_3)`.
//!
//! Extensions (`.`), direct products (`x` or `×`) and semidirect products
//! (`:`) all multiply orders. Supported atoms: integers (cyclic or elementary
//! abelian with an exponent), `[2^s]` (a group of order `2^s`), `Sym_n`,
//! `Alt_n`, `Dih_n` (order `n`), `Q_8`, `AGL_1(p)`, and the orthogonal
//! families `GO`, `SO`, `PSO`, `Omega` with optional `^+`/`^-`.

use crate::error::CoreError;

/// Order of the group described by `shape`.
pub fn shape_order(shape: &str) -> Result<u128, CoreError> {
    let mut p = Parser { s: shape.chars().filter(|c| !c.is_whitespace()).collect(), pos: 0 };
    let v = p.expr()?;
    if p.pos != p.s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser {
    s: Vec<char>,
    pos: usize,
}

fn mul(a: u128, b: u128) -> Result<u128, CoreError> {
    a.checked_mul(b).ok_or_else(|| CoreError::Parse("shape order overflows u128".into()))
}

fn pow(a: u128, e: u32) -> Result<u128, CoreError> {
    a.checked_pow(e).ok_or_else(|| CoreError::Parse("shape order overflows u128".into()))
}

impl Parser {
    fn err(&self, what: &str) -> CoreError {
        let s: String = self.s.iter().collect();
        CoreError::Parse(format!("{what} at position {} in shape {s:?}", self.pos))
    }

    fn peek(&self) -> Option<char> {
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), CoreError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn expr(&mut self) -> Result<u128, CoreError> {
        let mut v = self.term()?;
        while let Some(c) = self.peek() {
            if c == '.' || c == 'x' || c == '×' || c == ':' {
                self.pos += 1;
                v = mul(v, self.term()?)?;
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn term(&mut self) -> Result<u128, CoreError> {
        let base = self.atom()?;
        if self.eat('^') {
            let e = self.exponent()?;
            pow(base, e)
        } else {
            Ok(base)
        }
    }

    /// `k` or `{a+b+...}`.
    fn exponent(&mut self) -> Result<u32, CoreError> {
        if self.eat('{') {
            let mut total = self.number()? as u32;
            while self.eat('+') {
                total += self.number()? as u32;
            }
            self.expect('}')?;
            Ok(total)
        } else {
            Ok(self.number()? as u32)
        }
    }

    fn number(&mut self) -> Result<u128, CoreError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        let digits: String = self.s[start..self.pos].iter().collect();
        digits.parse().map_err(|_| self.err("number out of range"))
    }

    fn word(&mut self) -> String {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_alphabetic() || c == 'Ω') {
            self.pos += 1;
        }
        self.s[start..self.pos].iter().collect()
    }

    /// `_k` or `_{k}`.
    fn subscript(&mut self) -> Result<u32, CoreError> {
        self.expect('_')?;
        let braced = self.eat('{');
        let k = self.number()? as u32;
        if braced {
            self.expect('}')?;
        }
        Ok(k)
    }

    /// Optional `^+` or `^-`.
    fn sign(&mut self) -> i32 {
        if self.peek() == Some('^') {
            match self.s.get(self.pos + 1) {
                Some('+') => {
                    self.pos += 2;
                    return 1;
                }
                Some('-') => {
                    self.pos += 2;
                    return -1;
                }
                _ => {}
            }
        }
        0
    }

    fn atom(&mut self) -> Result<u128, CoreError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some('[') => {
                self.pos += 1;
                let b = self.number()?;
                self.expect('^')?;
                let e = self.exponent()?;
                self.expect(']')?;
                pow(b, e)
            }
            Some(c) if c.is_ascii_digit() => self.number(),
            Some(_) => self.named(),
            None => Err(self.err("unexpected end")),
        }
    }

    fn named(&mut self) -> Result<u128, CoreError> {
        let name = self.word();
        match name.as_str() {
            "Sym" => Ok((1..=self.subscript()? as u128).product()),
            "Alt" => {
                let n = self.subscript()?;
                let f: u128 = (1..=n as u128).product();
                Ok(if n >= 2 { f / 2 } else { 1 })
            }
            "Dih" => Ok(self.subscript()? as u128),
            "Q" => {
                let n = self.subscript()?;
                if n != 8 {
                    return Err(self.err("only Q_8 is supported"));
                }
                Ok(8)
            }
            "AGL" => {
                if self.subscript()? != 1 {
                    return Err(self.err("only AGL_1 is supported"));
                }
                let p = self.paren_number()?;
                Ok(p * (p - 1))
            }
            "GO" | "SO" | "PSO" | "Omega" | "Ω" => {
                // The sign may be written before or after the dimension.
                let before = self.sign();
                let dim = self.subscript()?;
                let sign = if before != 0 { before } else { self.sign() };
                let q = self.paren_number()?;
                orthogonal_order(&name, dim, sign, q).ok_or_else(|| self.err("unsupported orthogonal group"))
            }
            _ => Err(self.err(&format!("unknown group name {name:?}"))),
        }
    }

    fn paren_number(&mut self) -> Result<u128, CoreError> {
        self.expect('(')?;
        let v = self.number()?;
        self.expect(')')?;
        Ok(v)
    }
}

/// Cyclic factor orders of an abelian group written as in `2^24^6`,
/// `2^44^23^5` or `2.4.8^4`: each factor is a base with an optional exponent,
/// factors may be separated by dots, and an unbraced exponent is one digit.
pub fn abelian_type(s: &str) -> Result<Vec<u32>, CoreError> {
    let c: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = |what: &str| CoreError::Parse(format!("{what} in abelian type {s:?}"));
    let mut out = Vec::new();
    let mut i = 0;
    while i < c.len() {
        if c[i] == '.' {
            i += 1;
            continue;
        }
        let start = i;
        while i < c.len() && c[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(bad("expected a number"));
        }
        let base: u32 = c[start..i].iter().collect::<String>().parse().map_err(|_| bad("base out of range"))?;
        let mut exp = 1;
        if i < c.len() && c[i] == '^' {
            i += 1;
            if i < c.len() && c[i] == '{' {
                let close = c[i..].iter().position(|&x| x == '}').ok_or_else(|| bad("unclosed brace"))? + i;
                exp = c[i + 1..close].iter().collect::<String>().parse().map_err(|_| bad("bad exponent"))?;
                i = close + 1;
            } else if i < c.len() && c[i].is_ascii_digit() {
                exp = c[i].to_digit(10).expect("digit");
                i += 1;
            } else {
                return Err(bad("expected an exponent"));
            }
        }
        if base < 2 {
            return Err(bad("cyclic factors have order at least 2"));
        }
        out.extend(std::iter::repeat_n(base, exp as usize));
    }
    Ok(out)
}

/// Orders of the orthogonal groups of a non-degenerate quadratic form over
/// `F_q`. `sign` is `+1`/`-1` in even dimension and `0` in odd dimension.
pub fn orthogonal_order(family: &str, dim: u32, sign: i32, q: u128) -> Option<u128> {
    let go = if dim.is_multiple_of(2) {
        if sign == 0 || dim == 0 {
            return None;
        }
        let m = dim / 2;
        let qm = q.checked_pow(m)?;
        let twist = if sign > 0 { qm - 1 } else { qm + 1 };
        let mut o = 2 * q.checked_pow(m * (m - 1))? * twist;
        for i in 1..m {
            o = o.checked_mul(q.checked_pow(2 * i)? - 1)?;
        }
        o
    } else {
        if sign != 0 {
            return None;
        }
        let m = dim / 2;
        let mut o = q.checked_pow(m * m)?;
        for i in 1..=m {
            o = o.checked_mul(q.checked_pow(2 * i)? - 1)?;
        }
        if q % 2 == 1 {
            o *= 2;
        }
        o
    };
    let odd = q % 2 == 1;
    match family {
        "GO" => Some(go),
        // SO is the determinant-one subgroup in odd characteristic.
        "SO" if odd => Some(go / 2),
        // PSO = SO / (SO ∩ {±1}); -1 has determinant 1 only in even dimension.
        "PSO" if odd => Some(if dim.is_multiple_of(2) { go / 4 } else { go / 2 }),
        // Omega: the spinor-norm kernel in SO (odd q) or the Dickson-invariant
        // kernel (even q).
        "Omega" | "Ω" => Some(if odd { go / 4 } else { go / 2 }),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_named_groups() {
        assert_eq!(shape_order("Sym_6").unwrap(), 720);
        assert_eq!(shape_order("Alt_4").unwrap(), 12);
        assert_eq!(shape_order("Dih_8").unwrap(), 8);
        assert_eq!(shape_order("Q_8:2^2").unwrap(), 32);
        assert_eq!(shape_order("AGL_1(5)").unwrap(), 20);
        assert_eq!(shape_order("[2^{20}].Sym_6").unwrap(), (1 << 20) * 720);
    }

    #[test]
    fn classical_orders() {
        // Known values: |GO_4^+(2)| = |Sym_3 wr 2| = 72, |GO_3(3)| = 2 x |Sym_4| = 48,
        // |GO_7(2)| = |Sp_6(2)| = 1451520, |GO_6^+(2)| = |Sym_8| = 40320.
        assert_eq!(shape_order("GO_4^+(2)").unwrap(), 72);
        assert_eq!(shape_order("GO_3(3)").unwrap(), 48);
        assert_eq!(shape_order("GO_7(2)").unwrap(), 1_451_520);
        assert_eq!(shape_order("GO_6^+(2)").unwrap(), 40_320);
        assert_eq!(shape_order("GO_2^-(2)").unwrap(), 6);
        // Omega_5(3) is isomorphic to PSp_4(3), of order 25920.
        assert_eq!(shape_order("Omega_5(3)").unwrap(), 25_920);
        // Omega_6^+(2) is isomorphic to Alt_8.
        assert_eq!(shape_order("Omega_6^+(2)").unwrap(), 20_160);
        assert_eq!(shape_order("PSO_4^+(3)").unwrap(), 288);
        assert_eq!(shape_order("PSO^+_4(3)").unwrap(), 288);
        assert_eq!(shape_order("Dih_{12}").unwrap(), 12);
    }

    #[test]
    fn exponents_and_products() {
        assert_eq!(shape_order("2^{10+3}.Sym_6").unwrap(), (1 << 13) * 720);
        assert_eq!(shape_order("Dih_8^2").unwrap(), 64);
        assert_eq!(shape_order("10.Dih_8^2").unwrap(), 640);
        assert_eq!(shape_order("2 x 3 × 5").unwrap(), 30);
        assert_eq!(shape_order("6^4").unwrap(), 1296);
    }

    #[test]
    fn abelian_types() {
        assert_eq!(abelian_type("2^24^4").unwrap(), vec![2, 2, 4, 4, 4, 4]);
        assert_eq!(abelian_type("2^44^23^5").unwrap(), vec![2, 2, 2, 2, 4, 4, 3, 3, 3, 3, 3]);
        assert_eq!(abelian_type("2.4.8^4").unwrap(), vec![2, 4, 8, 8, 8, 8]);
        assert_eq!(abelian_type("2^{10}").unwrap(), vec![2; 10]);
        assert!(abelian_type("2^").is_err());
        assert!(abelian_type("1^3").is_err());
    }

    #[test]
    fn rejects_malformed() {
        assert!(shape_order("Sym").is_err());
        assert!(shape_order("(2.3").is_err());
        assert!(shape_order("Foo_3").is_err());
        assert!(shape_order("GO_4(3)").is_err());
        assert!(shape_order("2^{200}").is_err());
    }
}
