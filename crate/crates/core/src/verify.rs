//! Verification suites producing machine-readable reports.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cartan::CartanDatum;
use crate::dilog::{selftest, BParam, SelfTestConfig};
use crate::error::{Error, Result};
use crate::opalg::{embed_leg, OperatorSum, VariableSpace};
use crate::qscalar::{fmt_rat, rint, QScalar, Rat};
use crate::repbuild::{
    bracket_preconditions, build_preset, coproduct_rep, flip, nonsimple_vectors, qbi_blocks,
    transcendental, Generator, Representation,
};
use crate::rewrite::{
    apply_script_rep, builtin_script, freeze_first_leg, remove_lambda, rename_vars, TraceStep,
};

pub const REPORT_SCHEMA: &str = "qborel.report/v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Nonzero monomials left over by a symbolic identity.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual_terms: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<serde_json::Value>,
}

impl Check {
    /// Passes iff `residual` is exactly zero.
    pub fn symbolic(name: impl Into<String>, residual: &OperatorSum) -> Check {
        let n = residual.len();
        Check {
            name: name.into(),
            passed: n == 0,
            residual_terms: Some(n),
            residual: (n > 0).then(|| truncate(&residual.to_string())),
            numeric_residual: None,
            tolerance: None,
            detail: None,
        }
    }

    pub fn numeric(name: impl Into<String>, residual: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            passed: residual.is_finite() && residual < tol,
            residual_terms: None,
            residual: None,
            numeric_residual: Some(residual),
            tolerance: Some(tol),
            detail: None,
        }
    }

    pub fn flag(name: impl Into<String>, passed: bool) -> Check {
        Check {
            name: name.into(),
            passed,
            residual_terms: None,
            residual: None,
            numeric_residual: None,
            tolerance: None,
            detail: None,
        }
    }

    pub fn failed(name: impl Into<String>, err: &Error) -> Check {
        let mut c = Check::flag(name, false);
        c.residual = Some(err.to_string());
        c
    }

    pub fn with_detail(mut self, d: serde_json::Value) -> Check {
        self.detail = Some(d);
        self
    }
}

fn truncate(s: &str) -> String {
    const MAX: usize = 400;
    if s.len() <= MAX {
        return s.to_string();
    }
    let mut cut = MAX;
    while !s.is_char_boundary(cut) {
        cut -= 1;
    }
    format!("{}…", &s[..cut])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub schema: String,
    pub suite: String,
    pub subject: String,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub elapsed_ms: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub traces: BTreeMap<String, Vec<TraceStep>>,
}

impl CheckReport {
    pub fn new(suite: &str, subject: &str, checks: Vec<Check>, start: Instant) -> CheckReport {
        CheckReport {
            schema: REPORT_SCHEMA.to_string(),
            suite: suite.to_string(),
            subject: subject.to_string(),
            passed: checks.iter().all(|c| c.passed),
            checks,
            elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            notes: Vec::new(),
            traces: BTreeMap::new(),
        }
    }

    pub fn failures(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("plain document")
    }
}

fn req(rep: &Representation, g: Generator) -> Result<&OperatorSum> {
    rep.get(g)
        .ok_or_else(|| Error::UnknownSymbol(g.to_string()))
}

fn mul(a: &OperatorSum, b: &OperatorSum) -> Result<OperatorSum> {
    a.mul(b)
}

/// `Σ_k (−1)^k [n choose k]_{q_i} x^{n−k} y x^k` with `n = 1 − a_ij`.
pub fn serre_residual(
    x: &OperatorSum,
    y: &OperatorSum,
    a_ij: i64,
    m_i: Rat,
) -> Result<OperatorSum> {
    let n = (1 - a_ij) as u32;
    let mut acc = OperatorSum::zero(x.space());
    for k in 0..=n {
        let t = x.pow(n - k)?.mul(y)?.mul(&x.pow(k)?)?;
        let c = QScalar::q_binomial(n, k, m_i);
        let c = if k % 2 == 1 { -c } else { c };
        acc = acc.add(&t.scale(&c))?;
    }
    Ok(acc)
}

/// Relations of the quantum group (or its Borel part, if no `f_i` are given).
pub fn relation_checks(rep: &Representation) -> Result<Vec<Check>> {
    relation_checks_for(rep, &rep.datum)
}

fn relation_checks_for(rep: &Representation, datum: &CartanDatum) -> Result<Vec<Check>> {
    let n = datum.rank();
    let has = |g| rep.get(g).is_some();
    let mut jobs: Vec<(
        String,
        Box<dyn Fn() -> Result<OperatorSum> + Send + Sync + '_>,
    )> = Vec::new();
    for i in 1..=n {
        let qi = datum.m[i - 1];
        jobs.push((
            format!("K{i}*K{i}^-1 = 1"),
            Box::new(move || {
                mul(req(rep, Generator::K(i))?, req(rep, Generator::KInv(i))?)?
                    .sub(&OperatorSum::one(&rep.space))
            }),
        ));
        for j in 1..=n {
            let a = rint(datum.a[i - 1][j - 1]);
            if j > i {
                jobs.push((
                    format!("K{i}K{j} = K{j}K{i}"),
                    Box::new(move || {
                        let (ki, kj) = (req(rep, Generator::K(i))?, req(rep, Generator::K(j))?);
                        mul(ki, kj)?.sub(&mul(kj, ki)?)
                    }),
                ));
            }
            if has(Generator::E(j)) {
                jobs.push((
                    format!("K{i}e{j} = q_{i}^({}) e{j}K{i}", datum.a[i - 1][j - 1]),
                    Box::new(move || {
                        let (k, e) = (req(rep, Generator::K(i))?, req(rep, Generator::E(j))?);
                        mul(k, e)?.sub(&mul(e, k)?.mul_q(a * qi))
                    }),
                ));
            }
            if has(Generator::F(j)) {
                jobs.push((
                    format!("K{i}f{j} = q_{i}^({}) f{j}K{i}", -datum.a[i - 1][j - 1]),
                    Box::new(move || {
                        let (k, f) = (req(rep, Generator::K(i))?, req(rep, Generator::F(j))?);
                        mul(k, f)?.sub(&mul(f, k)?.mul_q(-a * qi))
                    }),
                ));
            }
            if has(Generator::E(i)) && has(Generator::F(j)) {
                jobs.push((
                    format!("[e{i}, f{j}]"),
                    Box::new(move || {
                        let (e, f) = (req(rep, Generator::E(i))?, req(rep, Generator::F(j))?);
                        let c = mul(e, f)?.sub(&mul(f, e)?)?;
                        if i != j {
                            return Ok(c);
                        }
                        let rhs = req(rep, Generator::KInv(i))?
                            .sub(req(rep, Generator::K(i))?)?
                            .scale(&QScalar::q_diff(qi));
                        c.sub(&rhs)
                    }),
                ));
            }
            if i != j && datum.a[i - 1][j - 1] != 0 {
                let aij = datum.a[i - 1][j - 1];
                for (kind, gi, gj) in [
                    ("e", Generator::E(i), Generator::E(j)),
                    ("f", Generator::F(i), Generator::F(j)),
                ] {
                    if has(gi) && has(gj) {
                        jobs.push((
                            format!("Serre {kind}({i},{j})"),
                            Box::new(move || serre_residual(req(rep, gi)?, req(rep, gj)?, aij, qi)),
                        ));
                    }
                }
            }
        }
    }
    Ok(jobs
        .into_par_iter()
        .map(|(name, f)| match f() {
            Ok(r) => Check::symbolic(name, &r),
            Err(e) => Check::failed(name, &e),
        })
        .collect())
}

pub fn suite_quantum_group(rep: &Representation) -> Result<CheckReport> {
    let start = Instant::now();
    let checks = relation_checks(rep)?;
    Ok(CheckReport::new("quantum_group", &rep.name, checks, start))
}

pub fn suite_quantum_group_preset(name: &str) -> Result<CheckReport> {
    suite_quantum_group(&build_preset(name)?)
}

/// Weyl pairings between `K_i`, the terms of `e_j` and the non-simple root vectors.
pub fn suite_integrable_plane(rep: &Representation) -> Result<CheckReport> {
    let start = Instant::now();
    let sp = &rep.space;
    let n = rep.rank();
    let mut checks = Vec::new();
    for i in 1..=n {
        let ki = req(rep, Generator::K(i))?
            .as_monomial()
            .ok_or_else(|| Error::NotStandardForm(format!("K{i}")))?;
        for j in 1..=n {
            let kj = req(rep, Generator::K(j))?.as_monomial().unwrap();
            checks.push(Check::flag(
                format!("P(K{i},K{j}) = 0"),
                sp.weyl_pairing(&ki.exp, &kj.exp).is_zero(),
            ));
            if let Some(e) = rep.e(j) {
                let want = -rep.datum.m[i - 1] * rint(rep.datum.a[i - 1][j - 1]);
                let got: Vec<Rat> = e
                    .terms()
                    .map(|(t, _)| sp.weyl_pairing(&ki.exp, t))
                    .collect();
                checks.push(
                    Check::flag(
                        format!("P(K{i},e{j}) = {}", fmt_rat(&want)),
                        got.iter().all(|p| *p == want),
                    )
                    .with_detail(serde_json::json!(got
                        .iter()
                        .map(fmt_rat)
                        .collect::<Vec<_>>())),
                );
            }
        }
    }
    if let Ok(vs) = nonsimple_vectors(rep) {
        for (name, v) in &vs {
            let Some(mv) = v.as_monomial().filter(|m| m.coeff.is_one()) else {
                let unit = v.terms().all(|(_, c)| c.is_one());
                checks.push(
                    Check::flag(format!("{name} recorded as a sum of exponentials"), true)
                        .with_detail(
                            serde_json::json!({ "terms": v.len(), "unit_coefficients": unit }),
                        ),
                );
                continue;
            };
            let digits: Vec<usize> = name[1..]
                .chars()
                .filter_map(|c| c.to_digit(10))
                .map(|d| d as usize)
                .collect();
            if let [i, _] = digits[..] {
                let e = req(rep, Generator::E(i))?;
                let got: Vec<Rat> = e
                    .terms()
                    .map(|(t, _)| sp.weyl_pairing(t, &mv.exp))
                    .collect();
                checks.push(
                    Check::flag(
                        format!("P(e{i}, {name}) = 1"),
                        got.iter().all(|p| *p == Rat::from_integer(1)),
                    )
                    .with_detail(serde_json::json!(got
                        .iter()
                        .map(fmt_rat)
                        .collect::<Vec<_>>())),
                );
            }
        }
    }
    Ok(CheckReport::new(
        "integrable_plane",
        &rep.name,
        checks,
        start,
    ))
}

fn same_gens(
    name: &str,
    got: &Representation,
    want: &Representation,
    gens: &[Generator],
) -> Vec<Check> {
    gens.iter()
        .map(|g| match (got.get(*g), want.get(*g)) {
            (Some(a), Some(b)) => match a.sub(b) {
                Ok(r) => Check::symbolic(format!("{name}: {g}"), &r),
                Err(e) => Check::failed(format!("{name}: {g}"), &e),
            },
            _ => Check::flag(format!("{name}: {g} present"), false),
        })
        .collect()
}

fn borel_gens(rank: usize) -> Vec<Generator> {
    (1..=rank)
        .flat_map(|i| [Generator::E(i), Generator::K(i)])
        .collect()
}

fn run(checks: &mut Vec<Check>, name: &str, f: impl FnOnce() -> Result<Vec<Check>>) {
    match f() {
        Ok(mut c) => checks.append(&mut c),
        Err(e) => checks.push(Check::failed(name, &e)),
    }
}

/// Twists, flips and the Coxeter move on the rank-2 GNS presentations.
pub fn suite_gns(typ: &str) -> Result<CheckReport> {
    let start = Instant::now();
    let (raw, twisted, full, twist) = match typ {
        "A2" => ("A2_gns_raw", "A2_gns_twisted", "A2_full", "a2_gns_twist"),
        "B2" => ("B2_gns_raw", "B2_gns_twisted", "B2_full", "b2_gns_twist"),
        t => return Err(Error::UnsupportedType(t.to_string())),
    };
    let raw = build_preset(raw)?;
    let tw = build_preset(twisted)?;
    let gens = borel_gens(2);
    let mut checks = Vec::new();
    run(&mut checks, "twist", || {
        let (out, _) = apply_script_rep(&builtin_script(twist)?, &raw)?;
        let mut c = same_gens("twist(raw) = twisted", &out, &tw, &gens);
        c.push(Check::symbolic(
            "twist leaves e2 invariant",
            &out.e(2).unwrap().sub(raw.e(2).unwrap())?,
        ));
        Ok(c)
    });
    run(&mut checks, "flip", || {
        let f = flip(&build_preset(full)?.zero_lambdas()?)?;
        Ok(same_gens("flip(full, λ=0) = twisted", &f, &tw, &gens))
    });
    if typ == "A2" {
        run(&mut checks, "change of variables", || {
            let (out, _) = apply_script_rep(&builtin_script("a2_change_t")?, &tw)?;
            let full0 = build_preset(full)?.zero_lambdas()?;
            Ok(same_gens("T(twisted) = full at λ=0", &out, &full0, &gens))
        });
        run(&mut checks, "Coxeter move", || {
            let (out, _) = apply_script_rep(&builtin_script("a2_coxeter_psi")?, &tw)?;
            let swap = |g: Generator| match g {
                Generator::E(i) => Generator::E(3 - i),
                Generator::K(i) => Generator::K(3 - i),
                g => g,
            };
            Ok(gens
                .iter()
                .map(|g| {
                    let r = out.get(*g).unwrap().sub(tw.get(swap(*g)).unwrap()).unwrap();
                    Check::symbolic(format!("Ψ(twisted) {g} = twisted {}", swap(*g)), &r)
                })
                .collect())
        });
    }
    run(&mut checks, "twisted relations", || relation_checks(&tw));
    Ok(CheckReport::new("gns", typ, checks, start))
}

/// Tensor square, decomposition script, and removal of the first leg.
pub fn suite_decomposition(typ: &str) -> Result<CheckReport> {
    let start = Instant::now();
    let (simple, script, to_simple, mult) = match typ {
        "A1" => (
            "A1_simple",
            "a1_wstar",
            ("A1_canonical", "a1_canonicalizer"),
            1usize,
        ),
        "A2" => ("A2_simple", "a2_phi2", ("A2_full", "a2_phi1"), 3),
        "A3" => ("A3_simple", "a3_decompose", ("A3_full", "a3_to_simple"), 6),
        t => return Err(Error::UnsupportedType(t.to_string())),
    };
    let simple_rep = build_preset(simple)?;
    let n = simple_rep.rank();
    let gens = borel_gens(n);
    let mut checks = Vec::new();
    let mut traces = BTreeMap::new();

    run(&mut checks, "reduction to the simple form", || {
        let start = build_preset(to_simple.0)?.borel();
        let start = if typ == "A1" {
            start
        } else {
            start.zero_lambdas()?
        };
        let (out, _) = apply_script_rep(&builtin_script(to_simple.1)?, &start)?;
        let out = out.zero_lambdas()?;
        Ok(same_gens(
            &format!("{}({}) = {simple}", to_simple.1, to_simple.0),
            &out,
            &simple_rep,
            &gens,
        ))
    });

    let delta = coproduct_rep(&simple_rep)?;
    let two = delta.space.clone();
    let sc = builtin_script(script)?;
    let sc = if typ == "A1" { sc.inverse(&two)? } else { sc };

    if typ == "A1" {
        run(&mut checks, "W* direction", || {
            let w = builtin_script(script)?;
            let one_x = simple_rep.map_gens("1⊗x", &two, |_, s| embed_leg(s, 2, &two))?;
            let (out, _) = apply_script_rep(&w, &one_x)?;
            Ok(same_gens("W*(1⊗x)W = Δ(x)", &out, &delta, &gens))
        });
    }

    match apply_script_rep(&sc, &delta) {
        Ok((out, tr)) => {
            traces = tr;
            for i in 1..=n {
                let want = embed_leg(simple_rep.e(i).unwrap(), 2, &two)?;
                checks.push(Check::symbolic(
                    format!("Δ(e{i}) ↦ 1⊗e{i}"),
                    &out.e(i).unwrap().sub(&want)?,
                ));
                if typ == "A1" {
                    let want = embed_leg(simple_rep.k(i).unwrap(), 2, &two)?;
                    checks.push(Check::symbolic(
                        format!("Δ(K{i}) ↦ 1⊗K{i}"),
                        &out.k(i).unwrap().sub(&want)?,
                    ));
                } else {
                    checks.push(Check::symbolic(
                        format!("Δ(K{i}) ↦ K{i}⊗K{i}"),
                        &out.k(i).unwrap().sub(delta.k(i).unwrap())?,
                    ));
                }
            }
            run(&mut checks, "first-leg removal", || {
                let (frozen, count) = freeze_first_leg(&out)?;
                let removed = remove_lambda(&frozen)?.rep;
                let back = rename_vars(&removed, |s| s.trim_end_matches('\'').to_string())?;
                let mut c = same_gens(
                    &format!("after removal = 1⊗{simple}"),
                    &back,
                    &simple_rep,
                    &gens,
                );
                c.push(
                    Check::flag(format!("multiplicity count = {mult}"), count == mult)
                        .with_detail(serde_json::json!({ "first_leg_variables": count })),
                );
                if typ == "A2" {
                    let k1 = removed.k(1).unwrap().to_string();
                    c.push(Check::flag("final K1 = e(u'-2v'+w')", k1 == "e(u'-2v'+w')"));
                }
                Ok(c)
            });
        }
        Err(e) => checks.push(Check::failed(format!("{script} on Δ({simple})"), &e)),
    }
    let mut rep = CheckReport::new("decomposition", typ, checks, start);
    rep.traces = traces;
    if typ != "A1" {
        rep.notes.push(format!(
            "multiplicative unitary realized by the explicit equivalent script `{script}`"
        ));
    }
    Ok(rep)
}

fn tensor(
    two: &std::sync::Arc<VariableSpace>,
    x: &OperatorSum,
    y: &OperatorSum,
) -> Result<OperatorSum> {
    embed_leg(x, 1, two)?.mul(&embed_leg(y, 2, two)?)
}

fn inv(x: &OperatorSum) -> Result<OperatorSum> {
    x.inverse_monomial()
        .ok_or_else(|| Error::NonMonomialArgument(x.to_string()))
}

fn single(x: &OperatorSum) -> Result<OperatorSum> {
    x.as_monomial()
        .map(|_| x.clone())
        .ok_or_else(|| Error::NonMonomialArgument(x.to_string()))
}

/// The generator form of the A2 decomposition arguments, evaluated on the
/// simple form, against the coordinate form. Each argument is normalized by
/// the unique power of `q` making it a positive exponential; the factors
/// found are reported next to the printed ones.
pub fn suite_repind_script(typ: &str) -> Result<CheckReport> {
    if typ != "A2" {
        return Err(Error::UnsupportedType(typ.to_string()));
    }
    let start = Instant::now();
    let r = build_preset("A2_simple")?;
    let two = r.space.tensor_square()?;
    let vs = nonsimple_vectors(&r)?;
    let e2 = single(r.e(2).unwrap())?;
    let (k1, k2) = (r.k(1).unwrap().clone(), r.k(2).unwrap().clone());
    // In the generator form, b12 stands for [e1, e2] and b21 for [e2, e1].
    let b12 = single(&vs["e21"])?;
    let b21 = single(&vs["e12"])?;
    let raw: Vec<(&str, i64, Result<OperatorSum>)> = vec![
        (
            "e2 ⊗ K2 b21 b12^-1 e2^-1",
            2,
            (|| tensor(&two, &e2, &k2.mul(&b21)?.mul(&inv(&b12)?)?.mul(&inv(&e2)?)?))(),
        ),
        (
            "b21 e2^-1 ⊗ K1 b21^-1 e2",
            2,
            (|| tensor(&two, &b21.mul(&inv(&e2)?)?, &k1.mul(&inv(&b21)?)?.mul(&e2)?))(),
        ),
        (
            "b12 e2^-1 ⊗ K1 b21^-1 e2",
            1,
            (|| tensor(&two, &b12.mul(&inv(&e2)?)?, &k1.mul(&inv(&b21)?)?.mul(&e2)?))(),
        ),
        (
            "e2 ⊗ K2 e2^-1",
            1,
            (|| tensor(&two, &e2, &k2.mul(&inv(&e2)?)?))(),
        ),
    ];
    let coord: Vec<OperatorSum> = builtin_script("a2_phi2")?
        .moves
        .iter()
        .rev()
        .map(|m| match m {
            crate::rewrite::Move::Dilog { arg, .. } => {
                OperatorSum::parse(&two, &format!("e({arg})"))
            }
            _ => Err(Error::Format("unexpected move".into())),
        })
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    let mut exps = Vec::new();
    let mut factors = Vec::new();
    for (k, (label, printed, a)) in raw.into_iter().enumerate() {
        let name = format!("argument {}: {label}", k + 1);
        let x = match a.and_then(|x| {
            x.as_monomial()
                .ok_or_else(|| Error::NonMonomialArgument(x.to_string()))
        }) {
            Ok(m) => m,
            Err(e) => {
                checks.push(Check::failed(name, &e));
                continue;
            }
        };
        let unit = x
            .coeff
            .as_monomial()
            .filter(|(g, _)| *g == crate::qscalar::Gauss::new(1, 0));
        let Some((_, r0)) = unit else {
            checks.push(Check::flag(
                format!("{name} has a pure q-power coefficient"),
                false,
            ));
            continue;
        };
        let factor = -r0;
        let normalized = OperatorSum::exp(&two, x.exp.clone());
        checks.push(
            Check::symbolic(
                format!("{name} = coordinate form"),
                &normalized.sub(&coord[k])?,
            )
            .with_detail(
                serde_json::json!({ "q_factor": fmt_rat(&factor), "printed_q_factor": printed }),
            ),
        );
        factors.push((factor, printed));
        exps.push(x.exp);
    }
    let pairings: Vec<Vec<String>> = exps
        .iter()
        .map(|x| {
            exps.iter()
                .map(|y| fmt_rat(&two.weyl_pairing(x, y)))
                .collect()
        })
        .collect();
    checks.push(
        Check::flag(
            "arguments pairwise q-commute",
            exps.iter()
                .all(|x| exps.iter().all(|y| two.weyl_pairing(x, y).is_integer())),
        )
        .with_detail(serde_json::json!(pairings)),
    );
    let mut rep = CheckReport::new("repind_script", typ, checks, start);
    for (k, (f, p)) in factors.iter().enumerate() {
        if *f != rint(*p) {
            rep.notes.push(format!(
                "argument {}: positivity requires q^{} where q^{p} is printed",
                k + 1,
                fmt_rat(f)
            ));
        }
    }
    Ok(rep)
}

/// The `b ↦ 1/b` counterpart of a preset: relations with `q̃` for the dual
/// datum, plus the commutation preconditions for taking term-wise powers.
pub fn suite_transcendental(name: &str) -> Result<CheckReport> {
    let start = Instant::now();
    let rep = build_preset(name)?;
    let mut checks = Vec::new();
    for (g, s) in &rep.gens {
        if matches!(g, Generator::K(_) | Generator::KInv(_)) {
            continue;
        }
        let m = rep.datum.m[g.root() - 1];
        if let Some(pre) = bracket_preconditions(s, m) {
            if !pre.is_empty() {
                checks.push(
                    Check::flag(
                        format!("{g}: every bracket pair q_i^2-commutes"),
                        pre.iter().all(|b| *b),
                    )
                    .with_detail(serde_json::json!(pre)),
                );
            }
        }
        let blocks = qbi_blocks(s, m);
        let powers: Vec<u32> = blocks.iter().flatten().map(|b| b.power).collect();
        checks.push(
            Check::flag(
                format!("{g}: terms form a q_i^2-commuting chain of blocks"),
                blocks.is_some(),
            )
            .with_detail(serde_json::json!({ "block_powers": powers })),
        );
    }
    match transcendental(&rep) {
        Ok(t) => {
            run(&mut checks, "dual relations", || {
                Ok(relation_checks(&t)?
                    .into_iter()
                    .map(|mut c| {
                        c.name = format!("tilde: {}", c.name);
                        c
                    })
                    .collect())
            });
        }
        Err(e) => checks.push(Check::failed("transcendental map", &e)),
    }
    Ok(CheckReport::new("transcendental", name, checks, start))
}

/// Numerical identities of `G_b`, `S_b` and `g_b` at one value of `b`.
pub fn suite_dilog(b: f64, cfg: &SelfTestConfig) -> Result<CheckReport> {
    let start = Instant::now();
    let param = BParam::new(b)?;
    let checks = selftest(&param, cfg)
        .into_iter()
        .map(|r| {
            Check::numeric(r.name.clone(), r.max_residual, r.tolerance)
                .with_detail(serde_json::json!({ "samples": r.samples }))
        })
        .collect();
    Ok(CheckReport::new(
        "dilog",
        &format!("b = {b}"),
        checks,
        start,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn serre_a1_pair_in_a2() {
        let r = build_preset("A2_simple").unwrap();
        let res = serre_residual(r.e(1).unwrap(), r.e(2).unwrap(), -1, rint(1)).unwrap();
        assert!(res.is_zero());
        let bad = serre_residual(r.e(1).unwrap(), r.e(2).unwrap(), 0, rint(1)).unwrap();
        assert!(!bad.is_zero());
    }

    #[test]
    fn a1_relations() {
        let rep = suite_quantum_group_preset("A1_canonical").unwrap();
        assert!(rep.passed, "{:?}", rep.failures());
        assert!(rep.checks.iter().any(|c| c.name == "[e1, f1]"));
    }

    #[test]
    fn report_json_has_schema() {
        let rep = suite_quantum_group_preset("A2_simple").unwrap();
        assert_eq!(rep.to_json()["schema"], REPORT_SCHEMA);
    }

    #[test]
    fn broken_rep_fails() {
        let r = build_preset("A2_simple").unwrap();
        let bad = r
            .map_gens("bad", &r.space.clone(), |g, s| {
                if g == Generator::E(2) {
                    s.add(&OperatorSum::parse(&r.space, "e(w)")?)
                } else {
                    Ok(s.clone())
                }
            })
            .unwrap();
        let rep = suite_quantum_group(&bad).unwrap();
        assert!(!rep.passed);
    }
}
