//! Conjugation of operator sums by affine-symplectic moves and by quantum
//! dilogarithms `g_b(A)`, scripts of such moves, and λ-removal.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{identity, inverse, solve, transpose, Matrix};
use crate::opalg::{format_form, parse_form, Exponent, OperatorSum, VariableSpace};
use crate::qscalar::{fmt_rat, rint, Gauss, QScalar, Rat};
use crate::repbuild::{Generator, Representation};

pub const SCRIPT_SCHEMA: &str = "qborel.script/v1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// `X ↦ g(A)* X g(A)`.
    StarLeft,
    /// `X ↦ g(A) X g(A)*`.
    StarRight,
}

impl Direction {
    fn sign(self) -> i64 {
        match self {
            Direction::StarLeft => 1,
            Direction::StarRight => -1,
        }
    }

    pub fn reversed(self) -> Direction {
        match self {
            Direction::StarLeft => Direction::StarRight,
            Direction::StarRight => Direction::StarLeft,
        }
    }
}

fn default_scale() -> String {
    "1".into()
}

/// One step of a script. Forms are written in the operator grammar.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Move {
    /// Simultaneous substitution `u_k ↦ form` (unlisted variables fixed);
    /// momenta follow so that all commutators are kept.
    Linear { map: BTreeMap<String, String> },
    /// `p_var ↦ p_var + by`, with `by` a multiple of `var` plus λ-terms.
    Gaussian { var: String, by: String },
    /// `u_var ↦ u_var + by` for a λ-form `by`.
    Shift { var: String, by: String },
    /// `u_var ↦ u_var + k·iQ_var/2`.
    QShift { var: String, half_units: i64 },
    /// Conjugation by `g_b(e(arg))` with `q_i = q^m`.
    Dilog {
        arg: String,
        #[serde(default = "default_scale")]
        m: String,
        direction: Direction,
    },
}

impl Move {
    pub fn label(&self) -> String {
        match self {
            Move::Linear { map } => {
                let parts: Vec<String> = map.iter().map(|(k, v)| format!("{k}->{v}")).collect();
                format!("linear({})", parts.join(", "))
            }
            Move::Gaussian { var, by } => format!("gaussian(p_{var} += {by})"),
            Move::Shift { var, by } => format!("shift({var} += {by})"),
            Move::QShift { var, half_units } => format!("qshift({var}, {half_units})"),
            Move::Dilog { arg, direction, .. } => {
                let d = match direction {
                    Direction::StarLeft => "g*",
                    Direction::StarRight => "g",
                };
                format!("{d}(e({arg}))")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransformScript {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Moves in the order they are applied.
    pub moves: Vec<Move>,
}

impl TransformScript {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let t: TransformScript =
            serde_json::from_str(s).map_err(|e| Error::Format(e.to_string()))?;
        if let Some(sc) = &t.schema {
            if sc != SCRIPT_SCHEMA {
                return Err(Error::Format(format!("unsupported script schema `{sc}`")));
            }
        }
        Ok(t)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain document")
    }

    /// The script undoing this one.
    pub fn inverse(&self, space: &VariableSpace) -> Result<TransformScript> {
        let mut moves = Vec::new();
        for m in self.moves.iter().rev() {
            moves.push(inverse_move(m, space)?);
        }
        Ok(TransformScript {
            schema: self.schema.clone(),
            name: format!("{}^-1", self.name),
            description: String::new(),
            moves,
        })
    }
}

fn inverse_move(m: &Move, space: &VariableSpace) -> Result<Move> {
    Ok(match m {
        Move::Linear { map } => {
            let mat = linear_matrix(map, space)?;
            let inv = inverse(&mat).ok_or(Error::SingularMatrix)?;
            let mut out = BTreeMap::new();
            for (k, row) in inv.iter().enumerate() {
                let mut x = space.zero_exponent();
                x.a.clone_from(row);
                out.insert(space.vars()[k].name.clone(), format_form(space, &x));
            }
            Move::Linear { map: out }
        }
        Move::Gaussian { var, by } => Move::Gaussian {
            var: var.clone(),
            by: negate_form(space, by)?,
        },
        Move::Shift { var, by } => Move::Shift {
            var: var.clone(),
            by: negate_form(space, by)?,
        },
        Move::QShift { var, half_units } => Move::QShift {
            var: var.clone(),
            half_units: -half_units,
        },
        Move::Dilog { arg, m, direction } => Move::Dilog {
            arg: arg.clone(),
            m: m.clone(),
            direction: direction.reversed(),
        },
    })
}

fn negate_form(space: &VariableSpace, s: &str) -> Result<String> {
    Ok(format_form(space, &parse_form(space, s)?.neg()))
}

/// Full substitution matrix `M`, rows being the images of the `u_k`.
fn linear_matrix(map: &BTreeMap<String, String>, space: &VariableSpace) -> Result<Matrix> {
    let mut m = identity(space.n());
    for (name, form) in map {
        let k = space
            .var_index(name)
            .ok_or_else(|| Error::UnknownSymbol(name.clone()))?;
        let x = parse_form(space, form)?;
        if x.has_momentum() || x.has_lambda() {
            return Err(Error::InvalidForm(format!(
                "linear image of {name} must be a position form"
            )));
        }
        m[k] = x.a;
    }
    Ok(m)
}

/// A move resolved against a variable space, ready to act on exponents.
enum Compiled {
    Exponent(Box<dyn Fn(&Exponent) -> Result<(Exponent, QScalar)> + Send + Sync>),
    Dilog {
        arg: Exponent,
        m: Rat,
        direction: Direction,
    },
}

fn compile(mv: &Move, space: &Arc<VariableSpace>) -> Result<Compiled> {
    let n = space.n();
    match mv {
        Move::Linear { map } => {
            let m = linear_matrix(map, space)?;
            let minv = inverse(&m).ok_or(Error::SingularMatrix)?;
            let mt = transpose(&m);
            let d: Vec<Rat> = (0..n).map(|j| space.scale(j)).collect();
            // c' = D^{-1} M^{-1} D c
            let l: Matrix = (0..n)
                .map(|i| (0..n).map(|j| minv[i][j] * d[j] / d[i]).collect())
                .collect();
            Ok(Compiled::Exponent(Box::new(move |e| {
                let mut x = e.clone();
                for i in 0..n {
                    x.a[i] = (0..n).fold(Rat::zero(), |s, j| s + mt[i][j] * e.a[j]);
                    x.c[i] = (0..n).fold(Rat::zero(), |s, j| s + l[i][j] * e.c[j]);
                }
                Ok((x, QScalar::one()))
            })))
        }
        Move::Gaussian { var, by } => {
            let k = space
                .var_index(var)
                .ok_or_else(|| Error::UnknownSymbol(var.clone()))?;
            let b = parse_form(space, by)?;
            if b.has_momentum() || (0..n).any(|j| j != k && !b.a[j].is_zero()) {
                return Err(Error::InvalidForm(format!(
                    "gaussian shift of p_{var} by `{by}`"
                )));
            }
            Ok(Compiled::Exponent(Box::new(move |e| {
                let ck = e.c[k];
                Ok((
                    if ck.is_zero() {
                        e.clone()
                    } else {
                        e.add(&b.scaled(ck))
                    },
                    QScalar::one(),
                ))
            })))
        }
        Move::Shift { var, by } => {
            let k = space
                .var_index(var)
                .ok_or_else(|| Error::UnknownSymbol(var.clone()))?;
            let b = parse_form(space, by)?;
            if b.has_momentum() || b.a.iter().any(|v| !v.is_zero()) {
                return Err(Error::InvalidForm(format!(
                    "shift of {var} by a non-λ form `{by}`"
                )));
            }
            Ok(Compiled::Exponent(Box::new(move |e| {
                let ak = e.a[k];
                Ok((
                    if ak.is_zero() {
                        e.clone()
                    } else {
                        e.add(&b.scaled(ak))
                    },
                    QScalar::one(),
                ))
            })))
        }
        Move::QShift { var, half_units } => {
            let k = space
                .var_index(var)
                .ok_or_else(|| Error::UnknownSymbol(var.clone()))?;
            let (units, mk, name) = (*half_units, space.scale(k), var.clone());
            Ok(Compiled::Exponent(Box::new(move |e| {
                let t = e.a[k] * rint(units);
                if !t.is_integer() {
                    return Err(Error::NonIntegralQShift(name.clone()));
                }
                let t = t.to_integer();
                let unit = match t.mod_floor(&4) {
                    0 => Gauss::new(1, 0),
                    1 => Gauss::new(0, 1),
                    2 => Gauss::new(-1, 0),
                    _ => Gauss::new(0, -1),
                };
                Ok((e.clone(), QScalar::monomial(unit, rint(t) * mk / rint(2))))
            })))
        }
        Move::Dilog { arg, m, direction } => {
            let a = parse_arg(space, arg)?;
            let m = parse_scale(m)?;
            Ok(Compiled::Dilog {
                arg: a,
                m,
                direction: *direction,
            })
        }
    }
}

fn parse_arg(space: &VariableSpace, arg: &str) -> Result<Exponent> {
    let t = arg.trim();
    let inner = t
        .strip_prefix("e(")
        .and_then(|s| s.strip_suffix(')'))
        .unwrap_or(t);
    parse_form(space, inner)
}

fn parse_scale(s: &str) -> Result<Rat> {
    let mut cur = crate::qscalar::Cursor::new(s);
    let r = cur.signed_rat()?;
    if !cur.at_end() || !r.is_positive() {
        return Err(cur.error("expected a positive rational scale"));
    }
    Ok(r)
}

pub fn apply_symplectic(mv: &Move, s: &OperatorSum) -> Result<OperatorSum> {
    match compile(mv, s.space())? {
        Compiled::Exponent(f) => map_sum(s, &*f),
        Compiled::Dilog { .. } => Err(Error::InvalidForm("dilog move is not symplectic".into())),
    }
}

fn map_sum(
    s: &OperatorSum,
    f: &(dyn Fn(&Exponent) -> Result<(Exponent, QScalar)> + Send + Sync),
) -> Result<OperatorSum> {
    let mut out = OperatorSum::zero(s.space());
    for (e, c) in s.terms() {
        let (x, k) = f(e)?;
        out.add_term(x, c * &k);
    }
    Ok(out)
}

/// `B(x) = Σ_k [n choose k]_{q^m} x^k`.
fn binomial_poly(n: u32, m: Rat) -> Vec<QScalar> {
    (0..=n).map(|k| QScalar::q_binomial(n, k, m)).collect()
}

fn poly_mul(p: &[QScalar], b: &[QScalar]) -> Vec<QScalar> {
    let mut out = vec![QScalar::zero(); p.len() + b.len() - 1];
    for (i, x) in p.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    out
}

/// Exact quotient by a monic polynomial, `None` on a remainder.
fn poly_div(p: &[QScalar], b: &[QScalar]) -> Option<Vec<QScalar>> {
    let db = b.len() - 1;
    if p.len() <= db {
        return p.iter().all(QScalar::is_zero).then(Vec::new);
    }
    let mut r = p.to_vec();
    let mut q = vec![QScalar::zero(); p.len() - db];
    for k in (0..q.len()).rev() {
        let lead = r[k + db].clone();
        if lead.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] = &r[k + j] - &(&lead * bj);
        }
        q[k] = lead;
    }
    r.iter().all(QScalar::is_zero).then_some(q)
}

/// Conjugation by `g_b(e(arg))`. Along each line `M + kA` the commutation
/// exponent `n = φ(A, M)/m` is constant; with `s·n ≥ 0` the line polynomial
/// is multiplied by `B_{|n|}`, otherwise it must be exactly divisible.
pub fn dilog_conjugate(mv: &Move, s: &OperatorSum) -> Result<OperatorSum> {
    let Compiled::Dilog { arg, m, direction } = compile(mv, s.space())? else {
        return Err(Error::InvalidForm("not a dilog move".into()));
    };
    conjugate_exp(&arg, m, direction, s)
}

fn conjugate_exp(
    arg: &Exponent,
    m: Rat,
    direction: Direction,
    s: &OperatorSum,
) -> Result<OperatorSum> {
    let space = s.space().clone();
    if arg.is_zero() {
        return Err(Error::InvalidForm("dilog argument is the identity".into()));
    }
    let flat = |e: &Exponent| -> Vec<Rat> { e.a.iter().chain(&e.c).chain(&e.d).copied().collect() };
    let af = flat(arg);
    let t = af.iter().position(|v| !v.is_zero()).unwrap();

    let mut lines: BTreeMap<Exponent, BTreeMap<i64, QScalar>> = BTreeMap::new();
    for (e, c) in s.terms() {
        let k = (flat(e)[t] / af[t]).floor().to_integer();
        let base = e.sub(&arg.scaled(rint(k)));
        lines.entry(base).or_default().insert(k, c.clone());
    }

    let results: Vec<Result<Vec<(Exponent, QScalar)>>> = lines
        .into_par_iter()
        .map(|(base, poly)| {
            let nq = space.phase(arg, &base) / m;
            if !nq.is_integer() {
                return Err(Error::NonRewritable {
                    monomial: format_form(&space, &base),
                    n: fmt_rat(&nq),
                });
            }
            let n = nq.to_integer();
            let lo = *poly.keys().next().unwrap();
            let hi = *poly.keys().last().unwrap();
            if n == 0 {
                return Ok(poly
                    .into_iter()
                    .map(|(k, c)| (base.add(&arg.scaled(rint(k))), c))
                    .collect());
            }
            let p: Vec<QScalar> = (lo..=hi)
                .map(|k| poly.get(&k).cloned().unwrap_or_default())
                .collect();
            let b = binomial_poly(n.unsigned_abs().to_u32().unwrap(), m);
            let out = if direction.sign() * n > 0 {
                poly_mul(&p, &b)
            } else {
                poly_div(&p, &b).ok_or_else(|| Error::NonRewritable {
                    monomial: format!(
                        "e({})",
                        format_form(&space, &base.add(&arg.scaled(rint(lo))))
                    ),
                    n: n.to_string(),
                })?
            };
            Ok(out
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| (base.add(&arg.scaled(rint(lo + k as i64))), c))
                .collect())
        })
        .collect();

    let mut out = OperatorSum::zero(&space);
    for r in results {
        for (e, c) in r? {
            out.add_term(e, c);
        }
    }
    Ok(out)
}

/// Apply a single move to an operator sum.
pub fn apply_move(mv: &Move, s: &OperatorSum) -> Result<OperatorSum> {
    match compile(mv, s.space())? {
        Compiled::Exponent(f) => map_sum(s, &*f),
        Compiled::Dilog { arg, m, direction } => conjugate_exp(&arg, m, direction, s),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub position: usize,
    #[serde(rename = "move")]
    pub label: String,
    pub monomials_in: usize,
    pub monomials_out: usize,
}

pub fn apply_script_traced(
    script: &TransformScript,
    s: &OperatorSum,
) -> Result<(OperatorSum, Vec<TraceStep>)> {
    let mut cur = s.clone();
    let mut trace = Vec::with_capacity(script.moves.len());
    for (pos, mv) in script.moves.iter().enumerate() {
        let wrap = |e: Error| Error::ScriptFailed {
            position: pos + 1,
            name: mv.label(),
            source: Box::new(e),
        };
        let next = apply_move(mv, &cur).map_err(wrap)?;
        trace.push(TraceStep {
            position: pos + 1,
            label: mv.label(),
            monomials_in: cur.len(),
            monomials_out: next.len(),
        });
        cur = next;
    }
    Ok((cur, trace))
}

pub fn apply_script(script: &TransformScript, s: &OperatorSum) -> Result<OperatorSum> {
    Ok(apply_script_traced(script, s)?.0)
}

/// Apply a script to every generator; the trace is keyed by generator.
pub fn apply_script_rep(
    script: &TransformScript,
    rep: &Representation,
) -> Result<(Representation, BTreeMap<String, Vec<TraceStep>>)> {
    let items: Vec<(Generator, &OperatorSum)> = rep
        .gens
        .iter()
        .filter(|(g, _)| !matches!(g, Generator::KInv(_)))
        .map(|(g, s)| (*g, s))
        .collect();
    let done: Vec<Result<(Generator, OperatorSum, Vec<TraceStep>)>> = items
        .into_par_iter()
        .map(|(g, s)| {
            let (o, t) = apply_script_traced(script, s)?;
            Ok((g, o, t))
        })
        .collect();
    let mut gens = BTreeMap::new();
    let mut traces = BTreeMap::new();
    for d in done {
        let (g, o, t) = d?;
        traces.insert(g.to_string(), t);
        gens.insert(g, o);
    }
    let out = Representation::new(
        format!("{}({})", script.name, rep.name),
        rep.datum.clone(),
        rep.word.clone(),
        rep.space.clone(),
        gens,
    )?;
    Ok((out, traces))
}

/// Result of removing λ-dependence from the `K_i`.
#[derive(Clone, Debug)]
pub struct LambdaRemoval {
    pub rep: Representation,
    /// `shifts[i][t]`: coefficient of λ-symbol `t` in the shift `c_i` with `Σ_i a_ij c_i = ℓ_j/2`.
    pub shifts: Vec<Vec<Rat>>,
}

/// Remove all λ-dependence from the `K_j` of a Borel representation whose
/// `e_i` are λ-free; the `f_i` are dropped.
pub fn remove_lambda(rep: &Representation) -> Result<LambdaRemoval> {
    let n = rep.rank();
    let nl = rep.space.n_lambda();
    for i in 1..=n {
        if let Some(e) = rep.e(i) {
            if e.terms().any(|(x, _)| x.has_lambda()) {
                return Err(Error::InvalidForm(format!("e{i} depends on λ")));
            }
        }
    }
    let mut ell: Matrix = vec![vec![Rat::zero(); nl]; n];
    for j in 1..=n {
        let k = rep
            .k(j)
            .and_then(OperatorSum::as_monomial)
            .ok_or_else(|| Error::NotStandardForm(format!("K{j}")))?;
        for t in 0..nl {
            ell[j - 1][t] = k.exp.d[t] / rint(2);
        }
    }
    let at: Matrix = (0..n)
        .map(|j| (0..n).map(|i| rint(rep.datum.a[i][j])).collect())
        .collect();
    let c = solve(&at, &ell).ok_or(Error::SingularMatrix)?;
    let space = rep.space.clone();
    let borel = rep.borel();
    let out = borel.map_gens(rep.name.clone(), &space, |g, s| match g {
        Generator::K(j) => {
            let mut shift = space.zero_exponent();
            for t in 0..nl {
                shift.d[t] = -rint(2)
                    * (0..n).fold(Rat::zero(), |acc, i| {
                        acc + rint(rep.datum.a[i][j - 1]) * c[i][t]
                    });
            }
            Ok(s.map_exponents(&space, |e| (e.add(&shift), QScalar::one())))
        }
        _ => Ok(s.clone()),
    })?;
    Ok(LambdaRemoval {
        rep: out.zero_lambdas()?,
        shifts: c,
    })
}

/// View a two-leg representation as a one-leg representation on the second
/// leg, with the first-leg positions (which must carry no momenta) turned
/// into λ-symbols. Returns the new representation and the number of frozen
/// variables.
pub fn freeze_first_leg(rep: &Representation) -> Result<(Representation, usize)> {
    let space = &rep.space;
    let base = space
        .base()
        .ok_or_else(|| Error::LegMismatch("expected a two-leg space".into()))?
        .clone();
    let n1 = base.n();
    for (g, s) in &rep.gens {
        if s.terms()
            .any(|(e, _)| e.c[..n1].iter().any(|v| !v.is_zero()))
        {
            return Err(Error::LegMismatch(format!("{g} acts on the first leg")));
        }
    }
    let vars: Vec<(&str, Rat)> = space.vars()[n1..]
        .iter()
        .map(|s| (s.name.as_str(), s.scale))
        .collect();
    let lambdas: Vec<(&str, Rat)> = space.vars()[..n1]
        .iter()
        .chain(space.lambdas())
        .map(|s| (s.name.as_str(), s.scale))
        .collect();
    let frozen = VariableSpace::new(&vars, &lambdas)?;
    let nl = space.n_lambda();
    let out = rep.map_gens(rep.name.clone(), &frozen, |_, s| {
        Ok(s.map_exponents(&frozen, |e| {
            let mut x = Exponent::zero(space.n() - n1, n1 + nl);
            x.a.copy_from_slice(&e.a[n1..]);
            x.c.copy_from_slice(&e.c[n1..]);
            x.d[..n1].copy_from_slice(&e.a[..n1]);
            x.d[n1..].copy_from_slice(&e.d);
            (x, QScalar::one())
        }))
    })?;
    Ok((out, n1))
}

/// Rename variables (same order and scales), e.g. to drop leg primes.
pub fn rename_vars(rep: &Representation, f: impl Fn(&str) -> String) -> Result<Representation> {
    let vars: Vec<(String, Rat)> = rep
        .space
        .vars()
        .iter()
        .map(|s| (f(&s.name), s.scale))
        .collect();
    let lambdas: Vec<(String, Rat)> = rep
        .space
        .lambdas()
        .iter()
        .map(|s| (f(&s.name), s.scale))
        .collect();
    let v: Vec<(&str, Rat)> = vars.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let l: Vec<(&str, Rat)> = lambdas.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let space = VariableSpace::new(&v, &l)?;
    rep.map_gens(rep.name.clone(), &space, |_, s| s.with_space(&space))
}

/// Scripts shipped with the crate.
pub fn builtin_script(name: &str) -> Result<TransformScript> {
    let text = match name {
        "a1_canonicalizer" => include_str!("../scripts/a1_canonicalizer.json"),
        "a1_wstar" => include_str!("../scripts/a1_wstar.json"),
        "a2_gns_twist" => include_str!("../scripts/a2_gns_twist.json"),
        "b2_gns_twist" => include_str!("../scripts/b2_gns_twist.json"),
        "a2_change_t" => include_str!("../scripts/a2_change_t.json"),
        "a2_coxeter_psi" => include_str!("../scripts/a2_coxeter_psi.json"),
        "a2_phi1" => include_str!("../scripts/a2_phi1.json"),
        "a2_phi2" => include_str!("../scripts/a2_phi2.json"),
        "a3_to_simple" => include_str!("../scripts/a3_to_simple.json"),
        "a3_decompose" => include_str!("../scripts/a3_decompose.json"),
        _ => return Err(Error::Format(format!("unknown script `{name}`"))),
    };
    TransformScript::from_json_str(text)
}

pub const BUILTIN_SCRIPTS: [&str; 10] = [
    "a1_canonicalizer",
    "a1_wstar",
    "a2_gns_twist",
    "b2_gns_twist",
    "a2_change_t",
    "a2_coxeter_psi",
    "a2_phi1",
    "a2_phi2",
    "a3_to_simple",
    "a3_decompose",
];
