use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Sparse multivariate polynomial with exact rational coefficients over a
/// fixed number of variables. Terms are keyed by exponent vectors; zero
/// coefficients are never stored, so structural equality is polynomial
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyExpr {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, BigRational>,
}

fn total(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Graded order key: total degree first, then lexicographic.
fn graded(e: &[u32]) -> (u32, &[u32]) {
    (total(e), e)
}

impl PolyExpr {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: BigRational) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn integer(nvars: usize, c: i64) -> Self {
        Self::constant(nvars, BigRational::from_integer(c.into()))
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range");
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, BigRational::one());
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(e).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| total(e)).max().unwrap_or(0)
    }

    pub fn degree_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    /// Indices of the variables that occur.
    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars).filter(|&v| self.degree_in(v) > 0).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| total(e) == 0)
    }

    fn leading(&self) -> Option<(&Vec<u32>, &BigRational)> {
        self.terms.iter().max_by(|a, b| graded(a.0).cmp(&graded(b.0)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.nvars);
        }
        Self { nvars: self.nvars, terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::integer(self.nvars, 1);
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Primitive integer form with positive leading coefficient (graded
    /// order). Two polynomials are scalar multiples iff their normal forms
    /// agree.
    pub fn normalize(&self) -> Self {
        let Some((_, lead)) = self.leading() else {
            return self.clone();
        };
        let lcm = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd = self
            .terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * &lcm / c.denom())));
        let mut factor = BigRational::new(lcm, gcd);
        if lead.is_negative() {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn eval(&self, x: &[BigRational]) -> BigRational {
        assert_eq!(x.len(), self.nvars, "point has the wrong number of coordinates");
        let mut sum = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    t *= &x[v];
                }
            }
            sum += t;
        }
        sum
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.nvars, "point has the wrong number of coordinates");
        self.terms
            .iter()
            .map(|(e, c)| {
                let mut t = c.to_f64().unwrap_or(f64::NAN);
                for (v, &k) in e.iter().enumerate() {
                    t *= x[v].powi(k as i32);
                }
                t
            })
            .sum()
    }

    /// Writes `self = a * x_v + b` when `self` has degree exactly one in
    /// `x_v`; `a` and `b` are free of `x_v`.
    pub fn split_linear(&self, v: usize) -> Option<(Self, Self)> {
        if self.degree_in(v) != 1 {
            return None;
        }
        let mut a = Self::zero(self.nvars);
        let mut b = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 1 {
                let mut e = e.clone();
                e[v] = 0;
                a.add_term(e, c.clone());
            } else {
                b.add_term(e.clone(), c.clone());
            }
        }
        Some((a, b))
    }

    /// Largest monomial dividing every term, as an exponent vector.
    pub fn monomial_content(&self) -> Vec<u32> {
        let mut m: Option<Vec<u32>> = None;
        for e in self.terms.keys() {
            m = Some(match m {
                None => e.clone(),
                Some(m) => m.iter().zip(e).map(|(a, b)| *a.min(b)).collect(),
            });
        }
        m.unwrap_or_else(|| vec![0; self.nvars])
    }

    /// Exact division by a monomial that divides every term.
    pub fn div_monomial(&self, m: &[u32]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(m).map(|(a, b)| a - b).collect(), c.clone()))
            .collect();
        Self { nvars: self.nvars, terms }
    }

    /// `den^d * self(x_v = num / den)` with `d = degree_in(v)`, a polynomial
    /// with the same zeros as `self` wherever `den` does not vanish.
    pub fn substitute_fraction(&self, v: usize, num: &Self, den: &Self) -> Self {
        let d = self.degree_in(v);
        let mut parts = vec![Self::zero(self.nvars); d as usize + 1];
        for (e, c) in &self.terms {
            let mut e = e.clone();
            let k = std::mem::take(&mut e[v]);
            parts[k as usize].add_term(e, c.clone());
        }
        let mut out = Self::zero(self.nvars);
        for (k, p) in parts.iter().enumerate() {
            if !p.is_zero() {
                out = &out + &(&(p * &num.pow(k as u32)) * &den.pow(d - k as u32));
            }
        }
        out
    }

    /// Renders with the given variable names, e.g. `3/2*a^2*b - x + 1`.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { p: self, names }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }

    /// Parses `term (('+'|'-') term)*` where a term is a product of
    /// rational numbers (`3`, `3/2`, `0.25`) and powers `name^k`.
    pub fn parse(s: &str, names: &[String]) -> Result<Self> {
        Parser::new(s, names).expr()
    }
}

pub struct PolyDisplay<'a> {
    p: &'a PolyExpr,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        let mut terms: Vec<_> = self.p.terms.iter().collect();
        terms.sort_by(|a, b| graded(b.0).cmp(&graded(a.0)));
        for (n, (e, c)) in terms.into_iter().enumerate() {
            let neg = c.is_negative();
            match (n, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let c = c.abs();
            let mut factors = Vec::new();
            if !c.is_one() || total(e) == 0 {
                factors.push(c.to_string());
            }
            for (v, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => factors.push(self.names[v].clone()),
                    _ => factors.push(format!("{}^{k}", self.names[v])),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl Add for &PolyExpr {
    type Output = PolyExpr;
    fn add(self, rhs: &PolyExpr) -> PolyExpr {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &PolyExpr {
    type Output = PolyExpr;
    fn sub(self, rhs: &PolyExpr) -> PolyExpr {
        self + &(-rhs)
    }
}

impl Neg for &PolyExpr {
    type Output = PolyExpr;
    fn neg(self) -> PolyExpr {
        PolyExpr { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }
}

impl Mul for &PolyExpr {
    type Output = PolyExpr;
    fn mul(self, rhs: &PolyExpr) -> PolyExpr {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = PolyExpr::zero(self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

/// Exact rational from a decimal or fraction literal such as `2`, `-0.25`
/// or `3/2`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid number `{s}`"));
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let value = if let Some((n, d)) = body.split_once('/') {
        let n = parse_decimal(n).ok_or_else(bad)?;
        let d = parse_decimal(d).ok_or_else(bad)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        n / d
    } else {
        parse_decimal(body).ok_or_else(bad)?
    };
    Ok(if neg { -value } else { value })
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (int, frac) = s.split_once('.').unwrap_or((s, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let scale = num_traits::pow(BigInt::from(10), frac.len());
    Some(BigRational::new(digits, scale))
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    names: &'a [String],
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, names: &'a [String]) -> Self {
        Self { src, pos: 0, names }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.src[self.pos..].starts_with(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.src[self.pos..].chars().next()
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.src[self.pos..].chars().next().filter(|c| f(*c)) {
            self.pos += c.len_utf8();
        }
        &self.src[start..self.pos]
    }

    fn expr(&mut self) -> Result<PolyExpr> {
        let n = self.names.len();
        let mut out = PolyExpr::zero(n);
        let mut sign = match self.peek() {
            Some('-') => {
                self.pos += 1;
                -1
            }
            Some('+') => {
                self.pos += 1;
                1
            }
            None => return Err(self.err("empty expression")),
            _ => 1,
        };
        loop {
            let t = self.term()?;
            out = if sign > 0 { &out + &t } else { &out - &t };
            match self.peek() {
                Some('+') => sign = 1,
                Some('-') => sign = -1,
                None => return Ok(out),
                Some(_) => return Err(self.err("expected `+` or `-`")),
            }
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<PolyExpr> {
        let mut t = self.factor()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            t = &t * &self.factor()?;
        }
        Ok(t)
    }

    fn factor(&mut self) -> Result<PolyExpr> {
        let n = self.names.len();
        match self.peek() {
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let num = self.take_while(|c| c.is_ascii_digit() || c == '.');
                let mut value = parse_decimal(num).ok_or_else(|| self.err("invalid number"))?;
                if self.peek() == Some('/') {
                    self.pos += 1;
                    self.skip_ws();
                    let den = self.take_while(|c| c.is_ascii_digit() || c == '.');
                    let den = parse_decimal(den).ok_or_else(|| self.err("invalid denominator"))?;
                    if den.is_zero() {
                        return Err(self.err("zero denominator"));
                    }
                    value /= den;
                }
                Ok(PolyExpr::constant(n, value))
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let name = self.take_while(|c| c.is_alphanumeric() || c == '_');
                let v = self
                    .names
                    .iter()
                    .position(|x| x == name)
                    .ok_or_else(|| Error::UnknownParameter(name.to_string()))?;
                let mut k = 1;
                if self.peek() == Some('^') {
                    self.pos += 1;
                    self.skip_ws();
                    let digits = self.take_while(|c| c.is_ascii_digit());
                    k = digits.parse().map_err(|_| self.err("expected exponent"))?;
                }
                Ok(PolyExpr::var(n, v).pow(k))
            }
            Some('(') => Err(self.err("parentheses are not part of the grammar")),
            _ => Err(self.err("expected a number or a parameter")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_format_round_trip() {
        let n = names(&["a", "b", "alpha"]);
        let p = PolyExpr::parse("3/2*a^2*b - alpha + 1", &n).unwrap();
        assert_eq!(p.to_string_with(&n), "3/2*a^2*b - alpha + 1");
        assert_eq!(PolyExpr::parse(&p.to_string_with(&n), &n).unwrap(), p);
        let p = PolyExpr::parse("-b*a + a*b", &n).unwrap();
        assert!(p.is_zero());
        assert_eq!(p.to_string_with(&n), "0");
        assert_eq!(PolyExpr::parse("0.25*a", &n).unwrap(), PolyExpr::var(3, 0).scale(&q(1, 4)));
    }

    #[test]
    fn parse_errors() {
        let n = names(&["a"]);
        assert!(matches!(PolyExpr::parse("a*q", &n), Err(Error::UnknownParameter(_))));
        assert!(matches!(PolyExpr::parse("a +", &n), Err(Error::Parse(_))));
        assert!(matches!(PolyExpr::parse("1/0", &n), Err(Error::Parse(_))));
        assert!(matches!(PolyExpr::parse("", &n), Err(Error::Parse(_))));
        assert!(matches!(PolyExpr::parse("(a)", &n), Err(Error::Parse(_))));
    }

    #[test]
    fn normalization() {
        let n = names(&["theta", "lambda", "alpha"]);
        let p = PolyExpr::parse("-1/2*theta*lambda + theta*alpha", &n).unwrap();
        let np = p.normalize();
        assert_eq!(np.to_string_with(&n), "theta*lambda - 2*theta*alpha");
        assert_eq!(np.normalize(), np);
        assert_eq!(p.scale(&q(-7, 3)).normalize(), np);
    }

    #[test]
    fn evaluation_and_linear_split() {
        let n = names(&["a", "b", "x"]);
        let p = PolyExpr::parse("a*x + b^2", &n).unwrap();
        assert_eq!(p.eval(&[q(1, 2), q(3, 1), q(4, 1)]), q(11, 1));
        assert_eq!(p.eval_f64(&[0.5, 3.0, 4.0]), 11.0);
        let (a, b) = p.split_linear(2).unwrap();
        assert_eq!(a.to_string_with(&n), "a");
        assert_eq!(b.to_string_with(&n), "b^2");
        assert!(p.split_linear(1).is_none());
        assert_eq!(p.variables(), vec![0, 1, 2]);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn rational_literals() {
        assert_eq!(parse_rational("3/2").unwrap(), q(3, 2));
        assert_eq!(parse_rational("-0.3").unwrap(), q(-3, 10));
        assert_eq!(parse_rational("7").unwrap(), q(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
    }
}
