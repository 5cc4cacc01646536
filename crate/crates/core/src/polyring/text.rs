//! Text format: `c*x0^a0*x1^a1 + ...`, coefficients as integers or `(t-polynomial)`.

use super::{Monomial, Polynomial};
use crate::error::{Error, Result};
use crate::exactalg::{FieldSpec, Scalar};

impl Polynomial {
    /// Terms in descending order joined by ` + `; `0` for the zero polynomial.
    pub fn to_text(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms()
            .map(|(m, c)| {
                let factors: Vec<String> = m
                    .exps()
                    .enumerate()
                    .filter(|&(_, e)| e > 0)
                    .map(|(j, e)| if e == 1 { format!("x{j}") } else { format!("x{j}^{e}") })
                    .collect();
                if factors.is_empty() {
                    self.field.format(c)
                } else if c == Scalar::ONE {
                    factors.join("*")
                } else {
                    format!("{}*{}", self.field.format(c), factors.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }

    pub fn parse(field: &FieldSpec, nvars: usize, s: &str) -> Result<Polynomial> {
        let mut p = Parser { src: s.as_bytes(), pos: 0, field, nvars };
        let out = p.poly()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    field: &'a FieldSpec,
    nvars: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected a number"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { pos: start, msg: "number too large".into() })
    }

    /// Sum of signed terms; `term` parses one unsigned term.
    fn signed_sum<A, T>(
        &mut self,
        zero: A,
        mut term: impl FnMut(&mut Self) -> Result<T>,
        mut combine: impl FnMut(A, T, bool) -> A,
    ) -> Result<A> {
        let mut acc = zero;
        let mut negate = self.eat(b'-');
        if !negate {
            self.eat(b'+');
        }
        loop {
            let t = term(self)?;
            acc = combine(acc, t, negate);
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    negate = false;
                }
                Some(b'-') => {
                    self.pos += 1;
                    negate = true;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn poly(&mut self) -> Result<Polynomial> {
        let field = self.field.clone();
        let nvars = self.nvars;
        self.signed_sum(
            Polynomial::zero(&field, nvars),
            |p| p.term(),
            |mut acc, (m, c), neg| {
                acc.add_term(m, if neg { field.neg(c) } else { c });
                acc
            },
        )
    }

    fn term(&mut self) -> Result<(Monomial, Scalar)> {
        let mut c = Scalar::ONE;
        let mut exps = vec![0u32; self.nvars];
        let mut any = false;
        loop {
            match self.peek() {
                Some(b'x') => {
                    self.pos += 1;
                    let at = self.pos;
                    let j = self.number()? as usize;
                    if j >= self.nvars {
                        return Err(Error::Parse { pos: at, msg: format!("variable x{j} out of range (d = {})", self.nvars) });
                    }
                    let e = if self.eat(b'^') { self.number()? } else { 1 };
                    exps[j] = exps[j]
                        .checked_add(u32::try_from(e).map_err(|_| self.err("exponent too large"))?)
                        .filter(|&v| v <= u16::MAX as u32)
                        .ok_or_else(|| self.err("exponent too large"))?;
                }
                Some(b'(') => {
                    self.pos += 1;
                    let v = self.tpoly()?;
                    if !self.eat(b')') {
                        return Err(self.err("expected ')'"));
                    }
                    c = self.field.mul(c, v);
                }
                Some(b't') => {
                    let v = self.tpoly_term()?;
                    c = self.field.mul(c, v);
                }
                Some(b) if b.is_ascii_digit() => {
                    let n = self.number()?;
                    c = self.field.mul(c, self.field.from_int((n % self.field.p() as u64) as i64));
                }
                _ => return Err(self.err(if any { "expected a factor after '*'" } else { "expected a term" })),
            }
            any = true;
            if !self.eat(b'*') {
                break;
            }
        }
        Ok((Monomial::from_exps(&exps), c))
    }

    fn tpoly(&mut self) -> Result<Scalar> {
        let field = self.field.clone();
        self.signed_sum(Scalar::ZERO, |p| p.tpoly_term(), |acc, v, neg| if neg { field.sub(acc, v) } else { field.add(acc, v) })
    }

    /// `c`, `t`, `t^k`, `c*t^k`.
    fn tpoly_term(&mut self) -> Result<Scalar> {
        let mut c = Scalar::ONE;
        loop {
            match self.peek() {
                Some(b't') => {
                    if self.field.is_prime_field() {
                        return Err(self.err("'t' is only meaningful in an extension field"));
                    }
                    self.pos += 1;
                    let e = if self.eat(b'^') { self.number()? } else { 1 };
                    c = self.field.mul(c, self.field.pow(self.field.generator_t(), e));
                }
                Some(b) if b.is_ascii_digit() => {
                    let n = self.number()?;
                    c = self.field.mul(c, self.field.from_int((n % self.field.p() as u64) as i64));
                }
                _ => return Err(self.err("expected a coefficient")),
            }
            // `t*x0` belongs to the outer term, so only continue on another coefficient factor.
            let save = self.pos;
            if self.eat(b'*') && matches!(self.peek(), Some(b't') | Some(b'0'..=b'9')) {
                continue;
            }
            self.pos = save;
            return Ok(c);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests_support::random_poly;
    use super::super::PolyRing;
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn print_examples() {
        let r = PolyRing::new(FieldSpec::prime(3).unwrap(), 3);
        let f = r.parse("2*x0^2*x1 + x2 + 1").unwrap();
        assert_eq!(f.to_text(), "2*x0^2*x1 + x2 + 1");
        assert_eq!(r.zero().to_text(), "0");
        assert_eq!(r.parse(" x0 -x0 ").unwrap(), r.zero());
        assert_eq!(r.parse("-x1").unwrap().to_text(), "2*x1");
        assert_eq!(r.parse("x0*x0").unwrap().to_text(), "x0^2");
    }

    #[test]
    fn extension_coefficients() {
        let f4 = FieldSpec::new(2, 2, None).unwrap();
        let r = PolyRing::new(f4.clone(), 2);
        let g = r.parse("(t+1)*x0 + (t)*x1^2 + t").unwrap();
        assert_eq!(g.to_text(), "(t)*x1^2 + (t+1)*x0 + (t)");
        assert_eq!(r.parse(&g.to_text()).unwrap(), g);
        // t^2 = t + 1 in this field
        assert_eq!(r.parse("(t^2)").unwrap(), r.parse("(t+1)").unwrap());
    }

    #[test]
    fn errors_carry_positions() {
        let r = PolyRing::new(FieldSpec::prime(2).unwrap(), 2);
        assert!(matches!(r.parse("x2"), Err(Error::Parse { pos: 1, .. })));
        assert!(matches!(r.parse("x0 +"), Err(Error::Parse { .. })));
        assert!(matches!(r.parse("t*x0"), Err(Error::Parse { .. })));
        assert!(matches!(r.parse("x0 x1"), Err(Error::Parse { .. })));
    }

    #[test]
    fn round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for f in [FieldSpec::prime(2).unwrap(), FieldSpec::prime(5).unwrap(), FieldSpec::new(3, 2, None).unwrap()] {
            let r = PolyRing::new(f, 3);
            for _ in 0..100 {
                let a = random_poly(&mut rng, &r, 5, 5);
                let s = a.to_text();
                let b = r.parse(&s).unwrap();
                assert_eq!(a, b);
                assert_eq!(b.to_text(), s);
            }
        }
    }
}
