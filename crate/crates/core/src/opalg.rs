//! The exponential operator algebra.
//!
//! A monomial `c·e(X)` stands for `c·exp(π Σ_j b_j (a_j u_j + c_j p_j) + π Σ_i b_i d_i λ_i)`
//! with `b_j² = m_j b²`. Monomials are stored with one combined exponent
//! vector; products pick up the phase `q^{φ(X,Y)}` with
//! `φ(X,Y) = ¼ Σ_j m_j (a_j c'_j − c_j a'_j)`, which follows from
//! `[p_j, u_j] = 1/(2πi)`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::qscalar::{fmt_rat, parse_scalar_atom, Cursor, QScalar, Rat};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Symbol {
    pub name: String,
    pub scale: Rat,
}

/// Ordered position variables (each with its momentum) plus central λ-symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariableSpace {
    vars: Vec<Symbol>,
    lambdas: Vec<Symbol>,
    legs: u8,
    base: Option<Arc<VariableSpace>>,
}

fn valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    let Some(first) = chars.next() else {
        return false;
    };
    if !first.is_ascii_alphabetic() {
        return false;
    }
    let body: String = name.trim_end_matches('\'').to_string();
    if !body.chars().all(|c| c.is_ascii_alphanumeric()) {
        return false;
    }
    !matches!(body.as_str(), "e" | "q" | "i" | "p")
}

impl VariableSpace {
    pub fn new(vars: &[(&str, Rat)], lambdas: &[(&str, Rat)]) -> Result<Arc<Self>> {
        let to_syms = |xs: &[(&str, Rat)]| -> Vec<Symbol> {
            xs.iter()
                .map(|(n, s)| Symbol {
                    name: n.to_string(),
                    scale: *s,
                })
                .collect()
        };
        Self::from_symbols(to_syms(vars), to_syms(lambdas), 1, None)
    }

    fn from_symbols(
        vars: Vec<Symbol>,
        lambdas: Vec<Symbol>,
        legs: u8,
        base: Option<Arc<VariableSpace>>,
    ) -> Result<Arc<Self>> {
        let mut seen = std::collections::BTreeSet::new();
        for s in vars.iter().chain(lambdas.iter()) {
            if !valid_ident(&s.name) {
                return Err(Error::InvalidForm(format!("bad symbol name `{}`", s.name)));
            }
            if !seen.insert(s.name.clone()) {
                return Err(Error::InvalidForm(format!("duplicate symbol `{}`", s.name)));
            }
            if !s.scale.is_positive() {
                return Err(Error::ScaleMismatch(format!(
                    "non-positive scale for {}",
                    s.name
                )));
            }
        }
        Ok(Arc::new(Self {
            vars,
            lambdas,
            legs,
            base,
        }))
    }

    /// Two-leg space: leg 1 keeps the names, leg 2 appends `'`.
    pub fn tensor_square(self: &Arc<Self>) -> Result<Arc<Self>> {
        if self.legs != 1 {
            return Err(Error::LegMismatch(
                "tensor square of a two-leg space".into(),
            ));
        }
        let prime = |xs: &[Symbol]| -> Vec<Symbol> {
            xs.iter()
                .map(|s| Symbol {
                    name: format!("{}'", s.name),
                    scale: s.scale,
                })
                .collect()
        };
        let mut vars = self.vars.clone();
        vars.extend(prime(&self.vars));
        let mut lambdas = self.lambdas.clone();
        lambdas.extend(prime(&self.lambdas));
        Self::from_symbols(vars, lambdas, 2, Some(self.clone()))
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    pub fn n_lambda(&self) -> usize {
        self.lambdas.len()
    }

    pub fn legs(&self) -> u8 {
        self.legs
    }

    pub fn base(&self) -> Option<&Arc<VariableSpace>> {
        self.base.as_ref()
    }

    pub fn vars(&self) -> &[Symbol] {
        &self.vars
    }

    pub fn lambdas(&self) -> &[Symbol] {
        &self.lambdas
    }

    pub fn scale(&self, j: usize) -> Rat {
        self.vars[j].scale
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|s| s.name == name)
    }

    pub fn lambda_index(&self, name: &str) -> Option<usize> {
        self.lambdas.iter().position(|s| s.name == name)
    }

    pub fn zero_exponent(&self) -> Exponent {
        Exponent::zero(self.n(), self.n_lambda())
    }

    /// `φ(X, Y)` such that `e(X)e(Y) = q^{φ} e(X+Y)`.
    pub fn phase(&self, x: &Exponent, y: &Exponent) -> Rat {
        let mut t = Rat::zero();
        for j in 0..self.n() {
            let w = x.a[j] * y.c[j] - x.c[j] * y.a[j];
            if !w.is_zero() {
                t += self.vars[j].scale * w;
            }
        }
        t / Rat::from_integer(4)
    }

    /// Exponent `P` with `e(X)^{is/b} e(Y)^{it/b} = e^{πiPst} e(Y)^{it/b} e(X)^{is/b}`.
    pub fn weyl_pairing(&self, x: &Exponent, y: &Exponent) -> Rat {
        -Rat::from_integer(2) * self.phase(x, y)
    }

    fn compatible(&self, other: &VariableSpace) -> bool {
        std::ptr::eq(self, other) || self == other
    }
}

/// Combined exponent vector `(a | c | d)` over (u, p, λ).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent {
    pub a: Vec<Rat>,
    pub c: Vec<Rat>,
    pub d: Vec<Rat>,
}

impl Exponent {
    pub fn zero(n: usize, l: usize) -> Self {
        Self {
            a: vec![Rat::zero(); n],
            c: vec![Rat::zero(); n],
            d: vec![Rat::zero(); l],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.a
            .iter()
            .chain(&self.c)
            .chain(&self.d)
            .all(|x| x.is_zero())
    }

    pub fn has_momentum(&self) -> bool {
        self.c.iter().any(|x| !x.is_zero())
    }

    pub fn has_lambda(&self) -> bool {
        self.d.iter().any(|x| !x.is_zero())
    }

    pub fn add(&self, o: &Exponent) -> Exponent {
        let z = |x: &[Rat], y: &[Rat]| x.iter().zip(y).map(|(p, q)| *p + *q).collect();
        Exponent {
            a: z(&self.a, &o.a),
            c: z(&self.c, &o.c),
            d: z(&self.d, &o.d),
        }
    }

    pub fn sub(&self, o: &Exponent) -> Exponent {
        self.add(&o.scaled(-Rat::one()))
    }

    pub fn scaled(&self, k: Rat) -> Exponent {
        let s = |x: &[Rat]| x.iter().map(|p| *p * k).collect();
        Exponent {
            a: s(&self.a),
            c: s(&self.c),
            d: s(&self.d),
        }
    }

    pub fn neg(&self) -> Exponent {
        self.scaled(-Rat::one())
    }

    /// Momentum part only.
    pub fn p_part(&self) -> Exponent {
        Exponent {
            a: vec![Rat::zero(); self.a.len()],
            c: self.c.clone(),
            d: vec![Rat::zero(); self.d.len()],
        }
    }

    /// Position and λ part only.
    pub fn ul_part(&self) -> Exponent {
        Exponent {
            a: self.a.clone(),
            c: vec![Rat::zero(); self.c.len()],
            d: self.d.clone(),
        }
    }

    /// The form `−2p_Y` built from the position part of `y`.
    pub fn momentum_of(y: &Exponent) -> Exponent {
        Exponent {
            a: vec![Rat::zero(); y.a.len()],
            c: y.a.iter().map(|v| *v * Rat::from_integer(-2)).collect(),
            d: vec![Rat::zero(); y.d.len()],
        }
    }

    fn dims(&self) -> (usize, usize) {
        (self.a.len(), self.d.len())
    }
}

// ---------------------------------------------------------------------------
// Linear forms: text
// ---------------------------------------------------------------------------

fn fmt_coef_name(first: bool, k: &Rat, name: &str, out: &mut String) {
    let neg = k.is_negative();
    let abs = k.abs();
    if neg {
        out.push('-');
    } else if !first {
        out.push('+');
    }
    if abs.is_one() {
    } else if abs.is_integer() {
        out.push_str(&fmt_rat(&abs));
    } else {
        out.push('(');
        out.push_str(&fmt_rat(&abs));
        out.push(')');
    }
    out.push_str(name);
}

pub fn format_form(space: &VariableSpace, x: &Exponent) -> String {
    let mut out = String::new();
    let mut first = true;
    for (j, v) in x.a.iter().enumerate() {
        if !v.is_zero() {
            fmt_coef_name(first, v, &space.vars[j].name, &mut out);
            first = false;
        }
    }
    for (j, v) in x.c.iter().enumerate() {
        if !v.is_zero() {
            fmt_coef_name(first, v, &format!("p_{}", space.vars[j].name), &mut out);
            first = false;
        }
    }
    for (j, v) in x.d.iter().enumerate() {
        if !v.is_zero() {
            fmt_coef_name(first, v, &space.lambdas[j].name, &mut out);
            first = false;
        }
    }
    if first {
        out.push('0');
    }
    out
}

fn ident(cur: &mut Cursor) -> Option<String> {
    cur.skip_ws();
    let rest = cur.rest();
    let mut chars = rest.char_indices();
    let mut len = match chars.next() {
        Some((_, c)) if c.is_ascii_alphabetic() => c.len_utf8(),
        _ => return None,
    };
    for (idx, c) in chars {
        if c.is_ascii_alphanumeric() || c == '_' {
            len = idx + c.len_utf8();
        } else {
            break;
        }
    }
    let mut name = rest[..len].to_string();
    let mut tail = &rest[len..];
    while let Some(t) = tail.strip_prefix('\'') {
        name.push('\'');
        len += 1;
        tail = t;
    }
    cur.pos += len;
    Some(name)
}

enum Slot {
    U(usize),
    P(usize),
    L(usize),
}

fn resolve(space: &VariableSpace, name: &str) -> Result<Slot> {
    if let Some(rest) = name.strip_prefix("p'_") {
        let v = format!("{rest}'");
        return space
            .var_index(&v)
            .map(Slot::P)
            .ok_or(Error::UnknownSymbol(name.to_string()));
    }
    if let Some(rest) = name.strip_prefix("p_") {
        return space
            .var_index(rest)
            .map(Slot::P)
            .ok_or(Error::UnknownSymbol(name.to_string()));
    }
    if let Some(j) = space.var_index(name) {
        return Ok(Slot::U(j));
    }
    if let Some(j) = space.lambda_index(name) {
        return Ok(Slot::L(j));
    }
    Err(Error::UnknownSymbol(name.to_string()))
}

fn parse_form_cursor(space: &VariableSpace, cur: &mut Cursor) -> Result<Exponent> {
    let mut x = space.zero_exponent();
    let save = cur.pos;
    if cur.eat("0") {
        match cur.peek() {
            Some(')') | Some(']') | None => return Ok(x),
            _ => cur.pos = save,
        }
    }
    let mut first = true;
    loop {
        let sign = if cur.eat("-") {
            -Rat::one()
        } else if cur.eat("+") || first {
            Rat::one()
        } else {
            break;
        };
        let mut k = Rat::one();
        if cur.peek() == Some('(') {
            cur.expect("(")?;
            k = cur.signed_rat()?;
            cur.expect(")")?;
            cur.eat("*");
        } else if let Some(r) = cur.unsigned_rat()? {
            k = r;
            cur.eat("*");
        }
        let pstart = cur.pos;
        cur.skip_ws();
        let name = if cur.rest().starts_with("p'_") {
            cur.pos += 3;
            let rest = ident(cur).ok_or_else(|| cur.error("expected a symbol"))?;
            format!("p'_{rest}")
        } else {
            ident(cur).ok_or_else(|| cur.error("expected a symbol"))?
        };
        let slot = resolve(space, &name).inspect_err(|_| cur.pos = pstart)?;
        let v = sign * k;
        match slot {
            Slot::U(j) => x.a[j] += v,
            Slot::P(j) => x.c[j] += v,
            Slot::L(j) => x.d[j] += v,
        }
        first = false;
        if !matches!(cur.peek(), Some('+') | Some('-')) {
            break;
        }
    }
    Ok(x)
}

/// Parse a linear form such as `v-w-2p_v+(1/2)l1`.
pub fn parse_form(space: &VariableSpace, s: &str) -> Result<Exponent> {
    let mut cur = Cursor::new(s);
    let x = parse_form_cursor(space, &mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input in form"));
    }
    Ok(x)
}

// ---------------------------------------------------------------------------
// Monomials and sums
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpMonomial {
    pub coeff: QScalar,
    pub exp: Exponent,
}

impl ExpMonomial {
    pub fn new(coeff: QScalar, exp: Exponent) -> Self {
        Self { coeff, exp }
    }

    pub fn unit(exp: Exponent) -> Self {
        Self {
            coeff: QScalar::one(),
            exp,
        }
    }
}

pub fn mono_mul(space: &VariableSpace, m1: &ExpMonomial, m2: &ExpMonomial) -> Result<ExpMonomial> {
    let (n, l) = (space.n(), space.n_lambda());
    if m1.exp.dims() != (n, l) || m2.exp.dims() != (n, l) {
        return Err(Error::SpaceMismatch);
    }
    let ph = space.phase(&m1.exp, &m2.exp);
    Ok(ExpMonomial {
        coeff: (&m1.coeff * &m2.coeff).mul_q(ph),
        exp: m1.exp.add(&m2.exp),
    })
}

/// Canonical sum of monomials over a fixed variable space.
#[derive(Clone)]
pub struct OperatorSum {
    space: Arc<VariableSpace>,
    terms: BTreeMap<Exponent, QScalar>,
}

impl PartialEq for OperatorSum {
    fn eq(&self, other: &Self) -> bool {
        self.space.compatible(&other.space) && self.terms == other.terms
    }
}

impl Eq for OperatorSum {}

impl OperatorSum {
    pub fn zero(space: &Arc<VariableSpace>) -> Self {
        Self {
            space: space.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(space: &Arc<VariableSpace>) -> Self {
        Self::monomial(space, QScalar::one(), space.zero_exponent())
    }

    pub fn scalar(space: &Arc<VariableSpace>, c: QScalar) -> Self {
        Self::monomial(space, c, space.zero_exponent())
    }

    pub fn monomial(space: &Arc<VariableSpace>, coeff: QScalar, exp: Exponent) -> Self {
        let mut s = Self::zero(space);
        s.add_term(exp, coeff);
        s
    }

    /// `e(X)` with unit coefficient.
    pub fn exp(space: &Arc<VariableSpace>, exp: Exponent) -> Self {
        Self::monomial(space, QScalar::one(), exp)
    }

    pub fn from_monomials(
        space: &Arc<VariableSpace>,
        ms: impl IntoIterator<Item = ExpMonomial>,
    ) -> Self {
        let mut s = Self::zero(space);
        for m in ms {
            s.add_term(m.exp, m.coeff);
        }
        s
    }

    pub fn parse(space: &Arc<VariableSpace>, text: &str) -> Result<Self> {
        parse_operator(space, text)
    }

    pub fn space(&self) -> &Arc<VariableSpace> {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &QScalar)> {
        self.terms.iter()
    }

    pub fn monomials(&self) -> Vec<ExpMonomial> {
        self.terms
            .iter()
            .map(|(e, c)| ExpMonomial::new(c.clone(), e.clone()))
            .collect()
    }

    pub fn coeff(&self, exp: &Exponent) -> QScalar {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    pub(crate) fn add_term(&mut self, exp: Exponent, c: QScalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn check(&self, other: &OperatorSum) -> Result<()> {
        if self.space.compatible(&other.space) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn add(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check(other)?;
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.add(&other.scale(&QScalar::int(-1)))
    }

    pub fn mul(&self, other: &OperatorSum) -> Result<OperatorSum> {
        self.check(other)?;
        let mut out = OperatorSum::zero(&self.space);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let ph = self.space.phase(e1, e2);
                out.add_term(e1.add(e2), (c1 * c2).mul_q(ph));
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &QScalar) -> OperatorSum {
        let mut out = OperatorSum::zero(&self.space);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x * c);
        }
        out
    }

    pub fn mul_q(&self, r: Rat) -> OperatorSum {
        self.scale(&QScalar::q_pow(r))
    }

    /// Divide every coefficient exactly by `d`.
    pub fn div_scalar(&self, d: &QScalar) -> Result<OperatorSum> {
        let mut out = OperatorSum::zero(&self.space);
        for (e, x) in &self.terms {
            let q = x
                .div_exact(d)
                .ok_or_else(|| Error::NotDivisible(d.to_string()))?;
            out.add_term(e.clone(), q);
        }
        Ok(out)
    }

    /// Formal adjoint: coefficients conjugated, exponents unchanged.
    pub fn star(&self) -> OperatorSum {
        let mut out = OperatorSum::zero(&self.space);
        for (e, x) in &self.terms {
            out.add_term(e.clone(), x.star());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Result<OperatorSum> {
        let mut acc = OperatorSum::one(&self.space);
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    pub fn as_monomial(&self) -> Option<ExpMonomial> {
        if self.terms.len() == 1 {
            let (e, c) = self.terms.iter().next().unwrap();
            Some(ExpMonomial::new(c.clone(), e.clone()))
        } else {
            None
        }
    }

    /// Inverse of `c·e(X)` for a unit coefficient `c = u q^r`, `u ∈ {±1, ±i}`.
    pub fn inverse_monomial(&self) -> Option<OperatorSum> {
        let m = self.as_monomial()?;
        let (g, r) = m.coeff.as_monomial()?;
        if g.norm_sqr() != 1 {
            return None;
        }
        Some(OperatorSum::monomial(
            &self.space,
            QScalar::monomial(g.conj(), -r),
            m.exp.neg(),
        ))
    }

    /// Same data viewed on a space with identical dimensions.
    pub fn with_space(&self, space: &Arc<VariableSpace>) -> Result<OperatorSum> {
        if space.n() != self.space.n() || space.n_lambda() != self.space.n_lambda() {
            return Err(Error::SpaceMismatch);
        }
        Ok(OperatorSum {
            space: space.clone(),
            terms: self.terms.clone(),
        })
    }

    pub fn map_exponents(
        &self,
        space: &Arc<VariableSpace>,
        f: impl Fn(&Exponent) -> (Exponent, QScalar),
    ) -> OperatorSum {
        let mut out = OperatorSum::zero(space);
        for (e, c) in &self.terms {
            let (e2, k) = f(e);
            out.add_term(e2, c * &k);
        }
        out
    }

    /// Display with bracket grouping `c*[X]e(Z)` where a pair allows it.
    pub fn pretty(&self) -> String {
        let mut used = std::collections::BTreeSet::new();
        let mut items: Vec<(bool, String)> = Vec::new();
        for (e, c) in &self.terms {
            if used.contains(e) {
                continue;
            }
            used.insert(e.clone());
            let partner = e.p_part().sub(&e.ul_part());
            let ul = e.ul_part();
            let paired =
                !ul.is_zero() && !used.contains(&partner) && self.terms.get(&partner) == Some(c);
            if paired {
                used.insert(partner);
                let y =
                    e.c.iter()
                        .map(|v| *v / Rat::from_integer(-2))
                        .collect::<Vec<_>>();
                let pair: Rat = (0..self.space.n())
                    .map(|j| self.space.scale(j) * ul.a[j] * y[j])
                    .fold(Rat::zero(), |a, b| a + b);
                let x = if pair.is_negative() { ul.neg() } else { ul };
                let body = format!(
                    "[{}]e({})",
                    format_form(&self.space, &x),
                    format_form(&self.space, &e.p_part())
                );
                items.push(coef_prefix(c, body));
            } else {
                let body = format!("e({})", format_form(&self.space, e));
                items.push(coef_prefix(c, body));
            }
        }
        join_items(items)
    }

    pub fn to_latex(&self) -> String {
        latexify(&self.pretty())
    }
}

fn coef_prefix(c: &QScalar, body: String) -> (bool, String) {
    if c.is_one() {
        return (false, body);
    }
    if *c == QScalar::int(-1) {
        return (true, body);
    }
    if let Some((g, r)) = c.as_monomial() {
        let neg = g.re < 0 || (g.re == 0 && g.im < 0);
        let abs = QScalar::monomial(if neg { -g } else { g }, r);
        if abs.is_one() {
            return (neg, body);
        }
        return (neg, format!("{abs}*{body}"));
    }
    (false, format!("({c})*{body}"))
}

fn join_items(items: Vec<(bool, String)>) -> String {
    if items.is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (idx, (neg, body)) in items.into_iter().enumerate() {
        match (idx, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body)
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body)
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body)
            }
        }
    }
    out
}

fn latexify(s: &str) -> String {
    let mut out = String::new();
    let chars: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c == 'p' && chars.get(i + 1) == Some(&'_') {
            out.push_str("p_{");
            i += 2;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '\'') {
                out.push(chars[i]);
                i += 1;
            }
            out.push('}');
            continue;
        }
        if c == 'l'
            && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
            && (i == 0 || !(chars[i - 1].is_ascii_alphabetic() || chars[i - 1] == '_'))
        {
            out.push_str("\\lambda_{");
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                out.push(chars[i]);
                i += 1;
            }
            out.push('}');
            continue;
        }
        match c {
            '*' => {}
            'e' if chars.get(i + 1) == Some(&'(') => out.push('e'),
            _ => out.push(c),
        }
        i += 1;
    }
    out
}

impl fmt::Display for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items = self
            .terms
            .iter()
            .map(|(e, c)| coef_prefix(c, format!("e({})", format_form(&self.space, e))))
            .collect();
        f.write_str(&join_items(items))
    }
}

impl fmt::Debug for OperatorSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "OperatorSum({self})")
    }
}

pub fn op_add(x: &OperatorSum, y: &OperatorSum) -> Result<OperatorSum> {
    x.add(y)
}

pub fn op_mul(x: &OperatorSum, y: &OperatorSum) -> Result<OperatorSum> {
    x.mul(y)
}

pub fn op_star(x: &OperatorSum) -> OperatorSum {
    x.star()
}

/// `[X]e(−2p_Y) = e(X−2p_Y) + e(−X−2p_Y)`.
pub fn bracket(space: &Arc<VariableSpace>, x: &Exponent, y: &Exponent) -> Result<OperatorSum> {
    if x.has_momentum() {
        return Err(Error::InvalidForm(
            "bracket argument X carries momenta".into(),
        ));
    }
    if y.has_momentum() || y.has_lambda() {
        return Err(Error::ScaleMismatch(
            "Y must be a position form; λ-symbols carry no momenta".into(),
        ));
    }
    let z = Exponent::momentum_of(y);
    let mut s = OperatorSum::zero(space);
    s.add_term(z.add(x), QScalar::one());
    s.add_term(z.sub(x), QScalar::one());
    Ok(s)
}

/// `[X,Y]_{q^r} = q^r XY − q^{−r} YX`.
pub fn q_commutator(x: &OperatorSum, y: &OperatorSum, r: Rat) -> Result<OperatorSum> {
    x.mul(y)?.mul_q(r).sub(&y.mul(x)?.mul_q(-r))
}

/// One piece of a positivity certificate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PositiveTerm {
    /// `[X]e(−2p_Y)`.
    Bracket { x: Exponent, y: Exponent },
    /// A lone momentum-free exponential such as `K_i`.
    Cartan { x: Exponent },
}

/// Certificate that `s` is a sum of standard bracket terms, or `None`.
pub fn is_standard_positive(s: &OperatorSum) -> Option<Vec<PositiveTerm>> {
    let space = s.space();
    if s.len() == 1 {
        let (e, c) = s.terms().next().unwrap();
        if c.is_one() && !e.has_momentum() {
            return Some(vec![PositiveTerm::Cartan { x: e.clone() }]);
        }
    }
    let mut used = std::collections::BTreeSet::new();
    let mut cert = Vec::new();
    for (e, c) in s.terms() {
        if used.contains(e) {
            continue;
        }
        used.insert(e.clone());
        let ul = e.ul_part();
        let p = e.p_part();
        let mut y = space.zero_exponent();
        for j in 0..space.n() {
            y.a[j] = p.c[j] / Rat::from_integer(-2);
        }
        if !e.has_momentum() {
            return None;
        }
        if ul.is_zero() {
            if *c != QScalar::int(2) {
                return None;
            }
            cert.push(PositiveTerm::Bracket { x: ul, y });
            continue;
        }
        if !c.is_one() {
            return None;
        }
        let partner = p.sub(&ul);
        if used.contains(&partner) || s.coeff(&partner) != QScalar::one() {
            return None;
        }
        used.insert(partner);
        let pair: Rat = (0..space.n())
            .map(|j| space.scale(j) * ul.a[j] * y.a[j])
            .fold(Rat::zero(), |a, b| a + b);
        if pair.is_zero() {
            return None;
        }
        let x = if pair.is_negative() { ul.neg() } else { ul };
        cert.push(PositiveTerm::Bracket { x, y });
    }
    Some(cert)
}

/// Place a one-leg operator on leg 1 or 2 of `two`.
pub fn embed_leg(s: &OperatorSum, leg: u8, two: &Arc<VariableSpace>) -> Result<OperatorSum> {
    let base = two
        .base()
        .ok_or_else(|| Error::LegMismatch("target space has a single leg".into()))?;
    if !base.compatible(s.space()) {
        return Err(Error::LegMismatch(
            "operator is not on the base space".into(),
        ));
    }
    if leg != 1 && leg != 2 {
        return Err(Error::LegMismatch(format!("no leg {leg}")));
    }
    let (n, l) = (base.n(), base.n_lambda());
    let off_u = if leg == 1 { 0 } else { n };
    let off_l = if leg == 1 { 0 } else { l };
    Ok(s.map_exponents(two, |e| {
        let mut x = two.zero_exponent();
        for j in 0..n {
            x.a[off_u + j] = e.a[j];
            x.c[off_u + j] = e.c[j];
        }
        for j in 0..l {
            x.d[off_l + j] = e.d[j];
        }
        (x, QScalar::one())
    }))
}

// ---------------------------------------------------------------------------
// Operator grammar
// ---------------------------------------------------------------------------

fn parse_factor(space: &Arc<VariableSpace>, cur: &mut Cursor) -> Result<Option<OperatorSum>> {
    cur.skip_ws();
    if cur.rest().starts_with("(x)") {
        return Ok(None);
    }
    if cur.rest().starts_with("e(") {
        cur.pos += 2;
        let x = parse_form_cursor(space, cur)?;
        cur.expect(")")?;
        return Ok(Some(OperatorSum::exp(space, x)));
    }
    if cur.rest().starts_with('[') {
        cur.pos += 1;
        let x = parse_form_cursor(space, cur)?;
        cur.expect("]")?;
        cur.expect("e(")?;
        let z = parse_form_cursor(space, cur)?;
        cur.expect(")")?;
        let mut s = OperatorSum::zero(space);
        s.add_term(z.add(&x), QScalar::one());
        s.add_term(z.sub(&x), QScalar::one());
        return Ok(Some(s));
    }
    if let Some(c) = parse_scalar_atom(cur)? {
        return Ok(Some(OperatorSum::scalar(space, c)));
    }
    if cur.rest().starts_with('(') {
        cur.pos += 1;
        let s = parse_sum(space, cur)?;
        cur.expect(")")?;
        return Ok(Some(s));
    }
    Ok(None)
}

fn parse_product(space: &Arc<VariableSpace>, cur: &mut Cursor) -> Result<OperatorSum> {
    let mut acc = parse_factor(space, cur)?.ok_or_else(|| cur.error("expected a factor"))?;
    loop {
        let save = cur.pos;
        cur.eat("*");
        match parse_factor(space, cur)? {
            Some(f) => acc = acc.mul(&f)?,
            None => {
                cur.pos = save;
                break;
            }
        }
    }
    Ok(acc)
}

fn parse_term(space: &Arc<VariableSpace>, cur: &mut Cursor) -> Result<OperatorSum> {
    let save = cur.pos;
    let left_space = space.base().cloned();
    if let Some(base) = &left_space {
        let mut probe = Cursor {
            src: cur.src,
            pos: cur.pos,
        };
        if let Ok(l) = parse_product(base, &mut probe) {
            if probe.eat("(x)") {
                let r = parse_product(base, &mut probe)?;
                cur.pos = probe.pos;
                return embed_leg(&l, 1, space)?.mul(&embed_leg(&r, 2, space)?);
            }
        }
        cur.pos = save;
    }
    parse_product(space, cur)
}

fn parse_sum(space: &Arc<VariableSpace>, cur: &mut Cursor) -> Result<OperatorSum> {
    let mut acc = OperatorSum::zero(space);
    let mut first = true;
    loop {
        let neg = if cur.eat("-") {
            true
        } else if cur.eat("+") || first {
            false
        } else {
            break;
        };
        let t = parse_term(space, cur)?;
        acc = if neg { acc.sub(&t)? } else { acc.add(&t)? };
        first = false;
        if !matches!(cur.peek(), Some('+') | Some('-')) {
            break;
        }
    }
    Ok(acc)
}

pub fn parse_operator(space: &Arc<VariableSpace>, text: &str) -> Result<OperatorSum> {
    let mut cur = Cursor::new(text);
    if cur.eat("0") && cur.at_end() {
        return Ok(OperatorSum::zero(space));
    }
    cur.pos = 0;
    let s = parse_sum(space, &mut cur)?;
    if !cur.at_end() {
        return Err(cur.error("trailing input"));
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::{rat, rint};

    fn sp1() -> Arc<VariableSpace> {
        VariableSpace::new(
            &[("u", rint(1)), ("v", rint(1)), ("w", rint(1))],
            &[("l1", rint(1))],
        )
        .unwrap()
    }

    fn op(s: &Arc<VariableSpace>, t: &str) -> OperatorSum {
        OperatorSum::parse(s, t).unwrap()
    }

    #[test]
    fn standard_phase() {
        let s = sp1();
        let prod = op(&s, "e(u)").mul(&op(&s, "e(-2p_u)")).unwrap();
        assert_eq!(prod, op(&s, "q^{-1/2}*e(u-2p_u)"));
        let disjoint = op(&s, "e(u)").mul(&op(&s, "e(-2p_v)")).unwrap();
        assert_eq!(disjoint, op(&s, "e(u-2p_v)"));
    }

    #[test]
    fn reordering() {
        let s = sp1();
        let lhs = op(&s, "e(-2u)*e(-2p_u)");
        let rhs = op(&s, "q^{2}*e(-2p_u)*e(-2u)");
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn star_of_normal_ordered() {
        let s = sp1();
        let x = op(&s, "q^{1/2}*e(u)*e(-2p_u)");
        assert_eq!(x, op(&s, "e(u-2p_u)"));
        assert_eq!(x.star(), x);
    }

    #[test]
    fn bracket_examples() {
        let s = sp1();
        let w = parse_form(&s, "w").unwrap();
        let b = bracket(&s, &w, &w).unwrap();
        assert_eq!(b, op(&s, "e(w-2p_w) + e(-w-2p_w)"));
        let z = bracket(&s, &s.zero_exponent(), &w).unwrap();
        assert_eq!(z, op(&s, "2*e(-2p_w)"));
        let l = parse_form(&s, "l1").unwrap();
        assert!(matches!(bracket(&s, &w, &l), Err(Error::ScaleMismatch(_))));
    }

    #[test]
    fn standard_positive() {
        let s = sp1();
        let b = op(&s, "[w]e(-2p_w)");
        let cert = is_standard_positive(&b).unwrap();
        let w = parse_form(&s, "w").unwrap();
        assert_eq!(cert, vec![PositiveTerm::Bracket { x: w.clone(), y: w }]);
        assert!(is_standard_positive(&op(&s, "e(u-2p_u)")).is_none());
        assert!(is_standard_positive(&op(&s, "e(u-2v+w)")).is_some());
    }

    #[test]
    fn round_trip() {
        let s = sp1();
        for t in [
            "e(u-2p_u)",
            "-q^{1/2}*e(-u+(1/2)v-2p_w) + (q + q^{-1})*e(w)",
            "2i*e(0) - e(-2l1)",
        ] {
            let x = op(&s, t);
            assert_eq!(op(&s, &x.to_string()), x);
        }
        let x = op(&s, "e(-w) + q*e(u+l1)");
        assert_eq!(x.to_string(), "e(-w) + q*e(u+l1)");
    }

    #[test]
    fn pretty_brackets() {
        let s = sp1();
        let x = op(&s, "[v-w]e(-2p_v) + [u]e(-2p_u-2p_v+2p_w)");
        let p = x.pretty();
        assert_eq!(op(&s, &p), x);
        assert!(p.contains("[v-w]e(-2p_v)"), "{p}");
    }

    #[test]
    fn tensor_legs() {
        let s = sp1();
        let two = s.tensor_square().unwrap();
        let k = op(&s, "e(u-2v+w)");
        let kk = op(&two, "e(u-2v+w) (x) e(u-2v+w)");
        assert_eq!(kk, op(&two, "e(u-2v+w+u'-2v'+w')"));
        let one = embed_leg(&OperatorSum::one(&s), 2, &two).unwrap();
        assert_eq!(one, OperatorSum::one(&two));
        assert!(embed_leg(&k, 3, &two).is_err());
        let p = op(&two, "e(-2p'_u)");
        assert_eq!(p, op(&two, "e(-2p_u')"));
    }

    #[test]
    fn scales_enter_phase() {
        let s = VariableSpace::new(&[("t", rat(1, 2)), ("u", rint(1))], &[]).unwrap();
        let prod = op(&s, "e(t)").mul(&op(&s, "e(-2p_t)")).unwrap();
        assert_eq!(prod, op(&s, "q^{-1/4}*e(t-2p_t)"));
    }

    #[test]
    fn monomial_inverse() {
        let s = sp1();
        let x = op(&s, "-i*q^{3/2}*e(u-2p_v)");
        let y = x.inverse_monomial().unwrap();
        assert_eq!(x.mul(&y).unwrap(), OperatorSum::one(&s));
    }
}
