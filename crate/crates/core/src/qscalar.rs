//! Exact coefficient ring: finite sums `Σ c_r q^r` with Gaussian-integer
//! coefficients and rational exponents.
//!
//! Distinct formal powers of `q` are treated as linearly independent, so
//! equality is coefficient-wise.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Rational numbers used for every exponent in the crate.
pub type Rat = Rational64;
/// Gaussian integers `a + bi`.
pub type Gauss = Complex<i64>;

/// Formal Laurent-type polynomial in `q` with rational exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QScalar {
    terms: BTreeMap<Rat, Gauss>,
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n, d)
}

pub fn rint(n: i64) -> Rat {
    Rat::from_integer(n)
}

impl QScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(Gauss::new(1, 0), Rat::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::monomial(Gauss::new(n, 0), Rat::zero())
    }

    pub fn i() -> Self {
        Self::monomial(Gauss::new(0, 1), Rat::zero())
    }

    /// `q^r`.
    pub fn q_pow(r: Rat) -> Self {
        Self::monomial(Gauss::new(1, 0), r)
    }

    pub fn monomial(c: Gauss, r: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(r, c);
        }
        Self { terms }
    }

    /// `q^r - q^{-r}`.
    pub fn q_diff(r: Rat) -> Self {
        Self::q_pow(r) - Self::q_pow(-r)
    }

    /// Symmetric quantum integer `[n]_{q^r} = (q^{rn} - q^{-rn})/(q^r - q^{-r})`.
    pub fn q_int(n: u32, r: Rat) -> Self {
        let mut out = Self::zero();
        for k in 0..n as i64 {
            out = out + Self::q_pow(r * rint(n as i64 - 1 - 2 * k));
        }
        out
    }

    /// Symmetric Gaussian binomial `[n choose k]_{q^r}`.
    pub fn q_binomial(n: u32, k: u32, r: Rat) -> Self {
        if k > n {
            return Self::zero();
        }
        let mut row = vec![Self::one()];
        for m in 1..=n {
            let mut next = Vec::with_capacity(m as usize + 1);
            for j in 0..=m {
                let mut v = Self::zero();
                if j < m {
                    v = v + row[j as usize].mul_q(r * rint(j as i64));
                }
                if j > 0 {
                    v = v + row[j as usize - 1].mul_q(-r * rint((m - j) as i64));
                }
                next.push(v);
            }
            row = next;
        }
        row[k as usize].clone()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        *self == Self::one()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Rat, &Gauss)> {
        self.terms.iter()
    }

    /// The single term `(c, r)` if this scalar is `c q^r`.
    pub fn as_monomial(&self) -> Option<(Gauss, Rat)> {
        if self.terms.len() == 1 {
            let (r, c) = self.terms.iter().next().unwrap();
            Some((*c, *r))
        } else {
            None
        }
    }

    /// Multiply by `q^r`.
    pub fn mul_q(&self, r: Rat) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (*e + r, *c)).collect(),
        }
    }

    pub fn scale(&self, c: Gauss) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, x)| (*e, *x * c)).collect(),
        }
    }

    /// Complex conjugation: `q^r -> q^{-r}`, `i -> -i`.
    pub fn star(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (-*e, c.conj())).collect(),
        }
    }

    fn add_term(&mut self, r: Rat, c: Gauss) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(r).or_insert_with(Gauss::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&r);
        }
    }

    /// Exact division; `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &QScalar) -> Option<QScalar> {
        let (&d_top, &d_lead) = d.terms.iter().next_back()?;
        let &d_low = d.terms.keys().next().unwrap();
        if self.is_zero() {
            return Some(Self::zero());
        }
        let floor = *self.terms.keys().next().unwrap() - d_low;
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((&top, &c)) = rem.terms.iter().next_back() {
            let e = top - d_top;
            if e < floor {
                return None;
            }
            let qc = gauss_div(c, d_lead)?;
            quot.add_term(e, qc);
            for (de, dc) in &d.terms {
                rem.add_term(*de + e, -(*dc * qc));
            }
        }
        Some(quot)
    }
}

fn gauss_div(a: Gauss, b: Gauss) -> Option<Gauss> {
    let n = b.norm_sqr();
    if n == 0 {
        return None;
    }
    let p = a * b.conj();
    if p.re % n != 0 || p.im % n != 0 {
        return None;
    }
    Some(Gauss::new(p.re / n, p.im / n))
}

impl Add for QScalar {
    type Output = QScalar;
    fn add(mut self, rhs: QScalar) -> QScalar {
        for (r, c) in rhs.terms {
            self.add_term(r, c);
        }
        self
    }
}

impl<'a> Add<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn add(self, rhs: &QScalar) -> QScalar {
        self.clone() + rhs.clone()
    }
}

impl Neg for QScalar {
    type Output = QScalar;
    fn neg(self) -> QScalar {
        Self {
            terms: self.terms.into_iter().map(|(r, c)| (r, -c)).collect(),
        }
    }
}

impl Sub for QScalar {
    type Output = QScalar;
    fn sub(self, rhs: QScalar) -> QScalar {
        self + (-rhs)
    }
}

impl<'a> Sub<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn sub(self, rhs: &QScalar) -> QScalar {
        self.clone() - rhs.clone()
    }
}

impl<'a> Mul<&'a QScalar> for &'a QScalar {
    type Output = QScalar;
    fn mul(self, rhs: &QScalar) -> QScalar {
        let mut out = QScalar::zero();
        for (r1, c1) in &self.terms {
            for (r2, c2) in &rhs.terms {
                out.add_term(*r1 + *r2, *c1 * *c2);
            }
        }
        out
    }
}

impl Mul for QScalar {
    type Output = QScalar;
    fn mul(self, rhs: QScalar) -> QScalar {
        &self * &rhs
    }
}

pub fn qs_add(x: &QScalar, y: &QScalar) -> QScalar {
    x + y
}

pub fn qs_mul(x: &QScalar, y: &QScalar) -> QScalar {
    x * y
}

pub fn qs_star(x: &QScalar) -> QScalar {
    x.star()
}

pub fn qs_is_zero(x: &QScalar) -> bool {
    x.is_zero()
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

pub(crate) fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn gauss_is_negative(c: &Gauss) -> bool {
    c.re < 0 || (c.re == 0 && c.im < 0)
}

/// Coefficient text without sign handling; `unit_blank` drops a bare `1`.
fn fmt_gauss_abs(c: &Gauss, unit_blank: bool) -> String {
    if c.im == 0 {
        if c.re == 1 && unit_blank {
            String::new()
        } else {
            format!("{}", c.re)
        }
    } else if c.re == 0 {
        match c.im {
            1 => "i".to_string(),
            n => format!("{n}i"),
        }
    } else if c.im > 0 {
        format!("({}+{}i)", c.re, c.im)
    } else {
        format!("({}-{}i)", c.re, -c.im)
    }
}

/// `(negative, body)` for one term `c q^r`.
fn fmt_term(c: &Gauss, r: &Rat) -> (bool, String) {
    let neg = gauss_is_negative(c);
    let abs = if neg { -*c } else { *c };
    if r.is_zero() {
        return (neg, fmt_gauss_abs(&abs, false));
    }
    let q = if *r == Rat::one() {
        "q".to_string()
    } else {
        format!("q^{{{}}}", fmt_rat(r))
    };
    let coef = fmt_gauss_abs(&abs, true);
    if coef.is_empty() {
        (neg, q)
    } else {
        (neg, format!("{coef}*{q}"))
    }
}

impl fmt::Display for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (r, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body) = fmt_term(c, r);
            match (idx, neg) {
                (0, false) => write!(f, "{body}")?,
                (0, true) => write!(f, "-{body}")?,
                (_, false) => write!(f, " + {body}")?,
                (_, true) => write!(f, " - {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for QScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QScalar({self})")
    }
}

/// Character cursor shared by the scalar and operator parsers.
pub(crate) struct Cursor<'a> {
    pub src: &'a str,
    pub pos: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &'a str) -> Self {
        Self { src, pos: 0 }
    }

    pub fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    pub fn skip_ws(&mut self) {
        while let Some(ch) = self.rest().chars().next() {
            if ch.is_whitespace() {
                self.pos += ch.len_utf8();
            } else {
                break;
            }
        }
    }

    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{s}`")))
        }
    }

    pub fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.src.len()
    }

    pub fn error(&self, msg: &str) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    pub fn integer(&mut self) -> Option<i64> {
        self.skip_ws();
        let digits: usize = self
            .rest()
            .chars()
            .take_while(|c| c.is_ascii_digit())
            .count();
        if digits == 0 {
            return None;
        }
        let v = self.rest()[..digits].parse().ok()?;
        self.pos += digits;
        Some(v)
    }

    /// Unsigned rational `n` or `n/d`.
    pub fn unsigned_rat(&mut self) -> Result<Option<Rat>> {
        let Some(n) = self.integer() else {
            return Ok(None);
        };
        let save = self.pos;
        if self.eat("/") {
            match self.integer() {
                Some(0) => return Err(self.error("zero denominator")),
                Some(d) => return Ok(Some(Rat::new(n, d))),
                None => self.pos = save,
            }
        }
        Ok(Some(Rat::from_integer(n)))
    }

    /// Signed rational with optional leading `-`.
    pub fn signed_rat(&mut self) -> Result<Rat> {
        let neg = self.eat("-");
        let r = self
            .unsigned_rat()?
            .ok_or_else(|| self.error("expected a rational number"))?;
        Ok(if neg { -r } else { r })
    }
}

/// One multiplicative scalar atom: integer, `i`, `ni`, `(a±bi)`, `q`, `q^{r}`.
pub(crate) fn parse_scalar_atom(cur: &mut Cursor) -> Result<Option<QScalar>> {
    cur.skip_ws();
    let save = cur.pos;
    if let Some(n) = cur.integer() {
        if cur.rest().starts_with('i') && !starts_ident_after_i(cur.rest()) {
            cur.pos += 1;
            return Ok(Some(QScalar::monomial(Gauss::new(0, n), Rat::zero())));
        }
        return Ok(Some(QScalar::int(n)));
    }
    if cur.rest().starts_with('i') && !starts_ident_after_i(cur.rest()) {
        cur.pos += 1;
        return Ok(Some(QScalar::i()));
    }
    if cur.rest().starts_with('q') && !starts_ident_after_q(cur.rest()) {
        cur.pos += 1;
        if cur.rest().starts_with("^{") {
            cur.pos += 2;
            let r = cur.signed_rat()?;
            cur.expect("}")?;
            return Ok(Some(QScalar::q_pow(r)));
        }
        return Ok(Some(QScalar::q_pow(Rat::one())));
    }
    if cur.rest().starts_with('(') {
        cur.pos += 1;
        if let Ok(s) = parse_scalar_sum(cur) {
            if cur.eat(")") {
                return Ok(Some(s));
            }
        }
        cur.pos = save;
    }
    Ok(None)
}

fn starts_ident_after_i(s: &str) -> bool {
    s[1..]
        .chars()
        .next()
        .map(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        .unwrap_or(false)
}

fn starts_ident_after_q(s: &str) -> bool {
    match s[1..].chars().next() {
        Some('^') => false,
        Some(c) => c.is_ascii_alphanumeric() || c == '_' || c == '\'',
        None => false,
    }
}

fn parse_scalar_product(cur: &mut Cursor) -> Result<QScalar> {
    let mut acc = parse_scalar_atom(cur)?.ok_or_else(|| cur.error("expected scalar"))?;
    loop {
        let save = cur.pos;
        if cur.eat("*") {
            match parse_scalar_atom(cur)? {
                Some(x) => acc = acc * x,
                None => {
                    cur.pos = save;
                    break;
                }
            }
        } else {
            break;
        }
    }
    Ok(acc)
}

pub(crate) fn parse_scalar_sum(cur: &mut Cursor) -> Result<QScalar> {
    let mut acc = QScalar::zero();
    let mut first = true;
    loop {
        let neg = if cur.eat("-") {
            true
        } else if cur.eat("+") || first {
            false
        } else {
            break;
        };
        let t = parse_scalar_product(cur)?;
        acc = if neg { acc - t } else { acc + t };
        first = false;
        if !matches!(cur.peek(), Some('+') | Some('-')) {
            break;
        }
    }
    Ok(acc)
}

impl FromStr for QScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let mut cur = Cursor::new(s);
        let v = parse_scalar_sum(&mut cur)?;
        if !cur.at_end() {
            return Err(cur.error("trailing input"));
        }
        Ok(v)
    }
}
