//! Representations of the quantum Borel and full quantum group by
//! exponential operators: the canonical construction from a reduced word,
//! the named presets, flips, non-simple root vectors, coproducts and the
//! transcendental (`b ↦ 1/b`) counterpart.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cartan::{cartan_datum, coordinate_labels, CartanDatum, LieType, ReducedWord};
use crate::error::{Error, Result};
use crate::linalg::solve_unique;
use crate::opalg::{
    bracket, is_standard_positive, q_commutator, Exponent, OperatorSum, PositiveTerm, VariableSpace,
};
use crate::qscalar::{rint, QScalar, Rat};

pub const REP_SCHEMA: &str = "qborel.rep/v1";

pub const PRESET_NAMES: [&str; 9] = [
    "A1_canonical",
    "A2_full",
    "B2_full",
    "A2_simple",
    "A3_simple",
    "A2_gns_raw",
    "B2_gns_raw",
    "A2_gns_twisted",
    "B2_gns_twisted",
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    E(usize),
    F(usize),
    K(usize),
    KInv(usize),
}

impl Generator {
    pub fn root(&self) -> usize {
        match *self {
            Generator::E(i) | Generator::F(i) | Generator::K(i) | Generator::KInv(i) => i,
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::E(i) => write!(f, "e{i}"),
            Generator::F(i) => write!(f, "f{i}"),
            Generator::K(i) => write!(f, "K{i}"),
            Generator::KInv(i) => write!(f, "K{i}^-1"),
        }
    }
}

impl FromStr for Generator {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::UnknownSymbol(s.to_string());
        let (head, rest) = s.split_at(s.chars().next().ok_or_else(bad)?.len_utf8());
        let (num, inv) = match rest.strip_suffix("^-1") {
            Some(n) => (n, true),
            None => (rest, false),
        };
        let i: usize = num.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match (head, inv) {
            ("e", false) => Ok(Generator::E(i)),
            ("f", false) => Ok(Generator::F(i)),
            ("K", false) => Ok(Generator::K(i)),
            ("K", true) => Ok(Generator::KInv(i)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LambdaMode {
    Symbolic,
    Zeroed,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Representation {
    pub name: String,
    pub datum: CartanDatum,
    pub word: ReducedWord,
    pub space: Arc<VariableSpace>,
    pub gens: BTreeMap<Generator, OperatorSum>,
    pub lambda_mode: LambdaMode,
}

impl Representation {
    /// Assemble a representation; every `K_i` gets its inverse attached.
    pub fn new(
        name: impl Into<String>,
        datum: CartanDatum,
        word: ReducedWord,
        space: Arc<VariableSpace>,
        mut gens: BTreeMap<Generator, OperatorSum>,
    ) -> Result<Self> {
        let ks: Vec<(usize, OperatorSum)> = gens
            .iter()
            .filter_map(|(g, s)| match g {
                Generator::K(i) => Some((*i, s.clone())),
                _ => None,
            })
            .collect();
        for (i, k) in ks {
            let inv = k
                .inverse_monomial()
                .ok_or_else(|| Error::NotStandardForm(format!("K{i}")))?;
            gens.insert(Generator::KInv(i), inv);
        }
        for (g, s) in &gens {
            if g.root() > datum.rank() {
                return Err(Error::UnknownSymbol(g.to_string()));
            }
            if s.space().as_ref() != space.as_ref() {
                return Err(Error::SpaceMismatch);
            }
        }
        let lambda_mode = if space.n_lambda() > 0 {
            LambdaMode::Symbolic
        } else {
            LambdaMode::Zeroed
        };
        Ok(Self {
            name: name.into(),
            datum,
            word,
            space,
            gens,
            lambda_mode,
        })
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn get(&self, g: Generator) -> Option<&OperatorSum> {
        self.gens.get(&g)
    }

    pub fn e(&self, i: usize) -> Option<&OperatorSum> {
        self.get(Generator::E(i))
    }

    pub fn f(&self, i: usize) -> Option<&OperatorSum> {
        self.get(Generator::F(i))
    }

    pub fn k(&self, i: usize) -> Option<&OperatorSum> {
        self.get(Generator::K(i))
    }

    pub fn k_inv(&self, i: usize) -> Option<&OperatorSum> {
        self.get(Generator::KInv(i))
    }

    /// Keep only `e_i` and `K_i^{±1}`.
    pub fn borel(&self) -> Representation {
        let mut r = self.clone();
        r.gens.retain(|g, _| !matches!(g, Generator::F(_)));
        r
    }

    /// Apply `f` to every generator, moving them to `space`.
    pub fn map_gens(
        &self,
        name: impl Into<String>,
        space: &Arc<VariableSpace>,
        f: impl Fn(Generator, &OperatorSum) -> Result<OperatorSum>,
    ) -> Result<Representation> {
        let mut gens = BTreeMap::new();
        for (g, s) in &self.gens {
            if matches!(g, Generator::KInv(_)) {
                continue;
            }
            gens.insert(*g, f(*g, s)?);
        }
        Representation::new(
            name,
            self.datum.clone(),
            self.word.clone(),
            space.clone(),
            gens,
        )
    }

    /// Same generators on the space with all λ-symbols removed (set to 0).
    pub fn zero_lambdas(&self) -> Result<Representation> {
        let vars: Vec<(&str, Rat)> = self
            .space
            .vars()
            .iter()
            .map(|s| (s.name.as_str(), s.scale))
            .collect();
        let space = VariableSpace::new(&vars, &[])?;
        let n = space.n();
        let mut r = self.map_gens(self.name.clone(), &space, |_, s| {
            Ok(s.map_exponents(&space, |e| {
                let mut x = Exponent::zero(n, 0);
                x.a.clone_from(&e.a);
                x.c.clone_from(&e.c);
                (x, QScalar::one())
            }))
        })?;
        r.lambda_mode = LambdaMode::Zeroed;
        Ok(r)
    }

    pub fn to_doc(&self) -> RepDoc {
        let syms = |xs: &[crate::opalg::Symbol]| {
            xs.iter()
                .map(|s| (s.name.clone(), crate::qscalar::fmt_rat(&s.scale)))
                .collect()
        };
        let (vars, lambdas) = (syms(self.space.vars()), syms(self.space.lambdas()));
        RepDoc {
            schema: Some(REP_SCHEMA.to_string()),
            name: self.name.clone(),
            lie_type: self.datum.lie_type.to_string(),
            word: self.word.to_string(),
            legs: (self.space.legs() == 2).then_some(2),
            variables: vars,
            lambdas,
            fill_canonical: false,
            generators: self
                .gens
                .iter()
                .filter(|(g, _)| !matches!(g, Generator::KInv(_)))
                .map(|(g, s)| (g.to_string(), s.pretty()))
                .collect(),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self.to_doc()).expect("plain document")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Representation> {
        let doc: RepDoc =
            serde_json::from_value(v.clone()).map_err(|e| Error::Format(e.to_string()))?;
        doc.build()
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::from("\\begin{align*}\n");
        let lines: Vec<String> = self
            .gens
            .iter()
            .filter(|(g, _)| !matches!(g, Generator::KInv(_)))
            .map(|(g, s)| {
                let lhs = match g {
                    Generator::E(i) => format!("\\be_{{{i}}}"),
                    Generator::F(i) => format!("\\bf_{{{i}}}"),
                    Generator::K(i) => format!("K_{{{i}}}"),
                    Generator::KInv(i) => format!("K_{{{i}}}^{{-1}}"),
                };
                format!("{lhs} &= {}", s.to_latex())
            })
            .collect();
        out.push_str(&lines.join(",\\\\\n"));
        out.push_str("\n\\end{align*}\n");
        out
    }
}

/// Serialized form of a representation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema: Option<String>,
    pub name: String,
    #[serde(rename = "type")]
    pub lie_type: String,
    pub word: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legs: Option<u8>,
    pub variables: Vec<(String, String)>,
    #[serde(default)]
    pub lambdas: Vec<(String, String)>,
    /// Complete missing `f_i`, `K_i` from the canonical construction.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub fill_canonical: bool,
    pub generators: BTreeMap<String, String>,
}

fn parse_syms(xs: &[(String, String)]) -> Result<Vec<(String, Rat)>> {
    xs.iter()
        .map(|(n, s)| {
            let mut cur = crate::qscalar::Cursor::new(s);
            let r = cur.signed_rat()?;
            if !cur.at_end() {
                return Err(cur.error("trailing input in scale"));
            }
            Ok((n.clone(), r))
        })
        .collect()
}

impl RepDoc {
    pub fn build(&self) -> Result<Representation> {
        let lie_type: LieType = self.lie_type.parse()?;
        let datum = cartan_datum(lie_type)?;
        let word: ReducedWord = self.word.parse()?;
        let vars = parse_syms(&self.variables)?;
        let lambdas = parse_syms(&self.lambdas)?;
        let space = match self.legs.unwrap_or(1) {
            1 => {
                let v: Vec<(&str, Rat)> = vars.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                let l: Vec<(&str, Rat)> = lambdas.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                VariableSpace::new(&v, &l)?
            }
            2 => {
                let half =
                    |xs: &[(String, Rat)]| -> Vec<(String, Rat)> { xs[..xs.len() / 2].to_vec() };
                let (v, l) = (half(&vars), half(&lambdas));
                let v: Vec<(&str, Rat)> = v.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                let l: Vec<(&str, Rat)> = l.iter().map(|(n, s)| (n.as_str(), *s)).collect();
                let two = VariableSpace::new(&v, &l)?.tensor_square()?;
                let names: Vec<&str> = two.vars().iter().map(|s| s.name.as_str()).collect();
                if names != vars.iter().map(|(n, _)| n.as_str()).collect::<Vec<_>>() {
                    return Err(Error::LegMismatch(
                        "second-leg names must carry a trailing `'`".into(),
                    ));
                }
                two
            }
            k => return Err(Error::LegMismatch(format!("unsupported leg count {k}"))),
        };
        let mut gens = BTreeMap::new();
        for (g, text) in &self.generators {
            let gen: Generator = g.parse()?;
            if matches!(gen, Generator::KInv(_)) {
                continue;
            }
            gens.insert(gen, OperatorSum::parse(&space, text)?);
        }
        if self.fill_canonical {
            let names: Vec<&str> = vars.iter().map(|(n, _)| n.as_str()).collect();
            let canon = build_canonical_named(&datum, &word, LambdaMode::Symbolic, &names)?;
            for (g, s) in canon.gens {
                if matches!(g, Generator::F(_) | Generator::K(_)) {
                    gens.entry(g).or_insert(s.with_space(&space)?);
                }
            }
        }
        Representation::new(self.name.clone(), datum, word, space, gens)
    }
}

/// Canonical representation with variables `v1..vN` and λ-symbols `l1..ln`.
pub fn build_canonical(
    datum: &CartanDatum,
    word: &ReducedWord,
    mode: LambdaMode,
) -> Result<Representation> {
    let names: Vec<String> = (1..=word.len()).map(|j| format!("v{j}")).collect();
    let names: Vec<&str> = names.iter().map(String::as_str).collect();
    build_canonical_named(datum, word, mode, &names)
}

/// Canonical representation attached to `word`, with `names[j-1]` for `v_j`.
///
/// `f_i` and `K_i` for every root; `e_i` only for the rightmost letter.
pub fn build_canonical_named(
    datum: &CartanDatum,
    word: &ReducedWord,
    mode: LambdaMode,
    names: &[&str],
) -> Result<Representation> {
    let labels = coordinate_labels(datum, word)?;
    let n = word.len();
    if names.len() != n {
        return Err(Error::InvalidForm(format!(
            "{} names for {} variables",
            names.len(),
            n
        )));
    }
    let rank = datum.rank();
    let vars: Vec<(&str, Rat)> = (0..n)
        .map(|j| (names[j], datum.m[labels.root_of[j] - 1]))
        .collect();
    let lnames: Vec<String> = (1..=rank).map(|i| format!("l{i}")).collect();
    let lambdas: Vec<(&str, Rat)> = match mode {
        LambdaMode::Symbolic => (0..rank)
            .map(|i| (lnames[i].as_str(), datum.m[i]))
            .collect(),
        LambdaMode::Zeroed => vec![],
    };
    let space = VariableSpace::new(&vars, &lambdas)?;
    let a_ri = |j: usize, i: usize| rint(datum.a[labels.root_of[j] - 1][i - 1]);
    let lam = |x: &mut Exponent, i: usize| {
        if mode == LambdaMode::Symbolic {
            x.d[i - 1] = rint(-2);
        }
    };

    let mut gens = BTreeMap::new();
    for i in 1..=rank {
        let mut f = OperatorSum::zero(&space);
        for k in 1..=labels.multiplicity(i) {
            let vik = labels.v(i, k) - 1;
            let mut x = space.zero_exponent();
            for j in 0..vik {
                x.a[j] = -a_ri(j, i);
            }
            x.a[vik] -= Rat::one();
            lam(&mut x, i);
            let mut y = space.zero_exponent();
            y.a[vik] = -Rat::one();
            f = f.add(&bracket(&space, &x, &y)?)?;
        }
        gens.insert(Generator::F(i), f);

        let mut kx = space.zero_exponent();
        for j in 0..n {
            kx.a[j] = -a_ri(j, i);
        }
        lam(&mut kx, i);
        gens.insert(Generator::K(i), OperatorSum::exp(&space, kx));
    }
    let last = word.last();
    let v1 = labels.v(last, 1) - 1;
    let mut x = space.zero_exponent();
    x.a[v1] = Rat::one();
    gens.insert(Generator::E(last), bracket(&space, &x, &x)?);

    let mut rep = Representation::new(
        format!("canonical({word})"),
        datum.clone(),
        word.clone(),
        space,
        gens,
    )?;
    rep.lambda_mode = mode;
    Ok(rep)
}

fn preset_docs() -> &'static Vec<RepDoc> {
    static DOCS: OnceLock<Vec<RepDoc>> = OnceLock::new();
    DOCS.get_or_init(|| {
        serde_json::from_str(include_str!("../data/presets.json")).expect("bundled presets parse")
    })
}

/// All preset names, including the auxiliary ones.
pub fn all_preset_names() -> Vec<String> {
    preset_docs().iter().map(|d| d.name.clone()).collect()
}

pub fn build_preset(name: &str) -> Result<Representation> {
    preset_docs()
        .iter()
        .find(|d| d.name == name)
        .ok_or_else(|| Error::UnknownPreset(name.to_string()))?
        .build()
}

/// Replace every `[X]e(−2p_Y)` in the `e_i` by `[Y]e(−2p_X)`; the `K_i` are
/// re-solved so that `K_i e_j = q_i^{a_ij} e_j K_i`.
pub fn flip(rep: &Representation) -> Result<Representation> {
    let space = &rep.space;
    let mut gens = BTreeMap::new();
    for i in 1..=rep.rank() {
        let Some(e) = rep.e(i) else { continue };
        let cert =
            is_standard_positive(e).ok_or_else(|| Error::NotStandardForm(format!("e{i}")))?;
        let mut out = OperatorSum::zero(space);
        for t in cert {
            match t {
                PositiveTerm::Bracket { x, y } if !x.is_zero() && !x.has_lambda() => {
                    out = out.add(&bracket(space, &y, &x)?)?;
                }
                _ => return Err(Error::NotStandardForm(format!("e{i}"))),
            }
        }
        gens.insert(Generator::E(i), out);
    }
    for i in 1..=rep.rank() {
        let mut rows = Vec::new();
        let mut rhs = Vec::new();
        for (g, s) in &gens {
            let Generator::E(j) = *g else { continue };
            let mut seen = std::collections::BTreeSet::new();
            for (exp, _) in s.terms() {
                if !seen.insert(exp.p_part()) {
                    continue;
                }
                let n = space.n();
                rows.push(
                    (0..n)
                        .map(|t| space.scale(t) * exp.c[t] / rint(2))
                        .collect(),
                );
                rhs.push(rep.datum.m[i - 1] * rint(rep.datum.a[i - 1][j - 1]));
            }
        }
        let k = solve_unique(&rows, &rhs, space.n())
            .ok_or_else(|| Error::NotStandardForm(format!("K{i}")))?;
        let mut kx = space.zero_exponent();
        kx.a = k;
        gens.insert(Generator::K(i), OperatorSum::exp(space, kx));
    }
    Representation::new(
        format!("flip({})", rep.name),
        rep.datum.clone(),
        rep.word.clone(),
        space.clone(),
        gens,
    )
}

/// `[e_j, e_i]_{q_i^{-a_ij/2}} / (q_i^{-a_ij} − q_i^{a_ij})`.
fn one_step(rep: &Representation, i: usize, j: usize) -> Result<OperatorSum> {
    let (ei, ej) = simple_pair(rep, i, j)?;
    let mi = rep.datum.m[i - 1];
    let aij = rint(rep.datum.a[i - 1][j - 1]);
    q_commutator(ej, ei, -aij * mi / rint(2))?.div_scalar(&QScalar::q_diff(-aij * mi))
}

fn simple_pair(rep: &Representation, i: usize, j: usize) -> Result<(&OperatorSum, &OperatorSum)> {
    if i == j || i > rep.rank() || j > rep.rank() || !rep.datum.adjacent(i - 1, j - 1) {
        return Err(Error::NotAdjacent(i, j));
    }
    let get = |k: usize| {
        rep.e(k)
            .ok_or_else(|| Error::UnknownSymbol(format!("e{k}")))
    };
    Ok((get(i)?, get(j)?))
}

/// The root vector for the pair `(i, j)`; for `a_ij = −2` this is the
/// longer bracket `[e_i, [e_i, e_j]_{q_i^{-1}}] / ((q_i − q_i^{-1})(q_i² − q_i^{-2}))`.
pub fn nonsimple_vector(rep: &Representation, i: usize, j: usize) -> Result<OperatorSum> {
    let (ei, ej) = simple_pair(rep, i, j)?;
    if rep.datum.a[i - 1][j - 1] == -2 {
        let mi = rep.datum.m[i - 1];
        let inner = q_commutator(ei, ej, -mi)?;
        let outer = q_commutator(ei, &inner, Rat::zero())?;
        let d = &QScalar::q_diff(mi) * &QScalar::q_diff(rint(2) * mi);
        return outer.div_scalar(&d);
    }
    one_step(rep, i, j)
}

/// Non-simple root vectors keyed `e{i}{j}`; doubly-laced types add `eX`.
pub fn nonsimple_vectors(rep: &Representation) -> Result<BTreeMap<String, OperatorSum>> {
    let mut out = BTreeMap::new();
    let n = rep.rank();
    for i in 1..=n {
        for j in 1..=n {
            if i == j || !rep.datum.adjacent(i - 1, j - 1) {
                continue;
            }
            match rep.datum.a[i - 1][j - 1] {
                -1 if rep.datum.is_simply_laced() => {
                    out.insert(format!("e{i}{j}"), one_step(rep, i, j)?);
                }
                -2 => {
                    out.insert("eX".to_string(), one_step(rep, i, j)?);
                    out.insert(format!("e{i}{j}"), nonsimple_vector(rep, i, j)?);
                }
                _ => {}
            }
        }
    }
    Ok(out)
}

/// `Δ(e_i) = 1⊗e_i + e_i⊗K_i`, `Δ(f_i) = f_i⊗1 + K_i^{-1}⊗f_i`, `Δ(K_i) = K_i⊗K_i`.
pub fn coproduct(
    g: Generator,
    rep: &Representation,
    two: &Arc<VariableSpace>,
) -> Result<OperatorSum> {
    if rep.space.legs() != 1 {
        return Err(Error::LegMismatch(
            "coproduct of a two-leg representation".into(),
        ));
    }
    let leg = |s: &OperatorSum, l: u8| crate::opalg::embed_leg(s, l, two);
    let get = |g: Generator| {
        rep.get(g)
            .ok_or_else(|| Error::UnknownSymbol(g.to_string()))
    };
    let i = g.root();
    match g {
        Generator::E(_) => {
            leg(get(g)?, 2)?.add(&leg(get(g)?, 1)?.mul(&leg(get(Generator::K(i))?, 2)?)?)
        }
        Generator::F(_) => {
            leg(get(g)?, 1)?.add(&leg(get(Generator::KInv(i))?, 1)?.mul(&leg(get(g)?, 2)?)?)
        }
        Generator::K(_) | Generator::KInv(_) => leg(get(g)?, 1)?.mul(&leg(get(g)?, 2)?),
    }
}

/// The tensor square `P ⊗ P` with every generator mapped by `Δ`.
pub fn coproduct_rep(rep: &Representation) -> Result<Representation> {
    let two = rep.space.tensor_square()?;
    rep.map_gens(format!("Δ({})", rep.name), &two, |g, _| {
        coproduct(g, rep, &two)
    })
}

/// Transcendental counterpart: the generator of root `i` is raised to the
/// power `1/b_i²` term by term, giving a representation of the Langlands
/// dual datum in the formal parameter `q̃`.
pub fn transcendental(rep: &Representation) -> Result<Representation> {
    if rep.space.legs() != 1 {
        return Err(Error::LegMismatch(
            "transcendental map on a two-leg space".into(),
        ));
    }
    let dual = rep.datum.langlands_dual();
    let mmin = *rep.datum.m.iter().min().unwrap();
    let vars: Vec<(String, Rat)> = rep
        .space
        .vars()
        .iter()
        .map(|s| (s.name.clone(), mmin / s.scale))
        .collect();
    let lambdas: Vec<(String, Rat)> = rep
        .space
        .lambdas()
        .iter()
        .map(|s| (s.name.clone(), mmin / s.scale))
        .collect();
    let v: Vec<(&str, Rat)> = vars.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let l: Vec<(&str, Rat)> = lambdas.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let space = VariableSpace::new(&v, &l)?;
    let old = rep.space.clone();
    let mut gens = BTreeMap::new();
    for (g, s) in &rep.gens {
        if matches!(g, Generator::KInv(_)) {
            continue;
        }
        if s.terms().any(|(_, c)| !c.is_one()) {
            return Err(Error::NotStandardForm(format!(
                "{g} has non-unit coefficients"
            )));
        }
        let mi = rep.datum.m[g.root() - 1];
        let scaled = |e: &Exponent, k: u32| {
            let mut x = e.clone();
            let kr = rint(k as i64);
            for j in 0..old.n() {
                let f = old.scale(j) / mi / kr;
                x.a[j] *= f;
                x.c[j] *= f;
            }
            for (t, sym) in old.lambdas().iter().enumerate() {
                x.d[t] *= sym.scale / mi / kr;
            }
            x
        };
        let blocks = qbi_blocks(s, mi)
            .ok_or_else(|| Error::NotStandardForm(format!("{g} has no q-commuting chain")))?;
        let mut t = OperatorSum::zero(&space);
        for b in &blocks {
            let mut root = OperatorSum::zero(&space);
            for e in &b.terms {
                root = root.add(&OperatorSum::exp(&space, scaled(e, b.power)))?;
            }
            t = t.add(&root.pow(b.power)?)?;
        }
        gens.insert(*g, t);
    }
    let mut out = Representation::new(
        format!("tilde({})", rep.name),
        dual,
        rep.word.clone(),
        space,
        gens,
    )?;
    out.lambda_mode = rep.lambda_mode;
    Ok(out)
}

/// A group of terms raised together: its `k`-th root summands commute
/// pairwise with exponent `±2mk`, and the group is replaced by
/// `(Σ e(X/k))^k` under a real power.
#[derive(Clone, Debug, PartialEq)]
pub struct QbiBlock {
    pub terms: Vec<Exponent>,
    pub power: u32,
}

/// Orders `n` items so that each has one common exponent `±target` against
/// every earlier item.
fn chain_order(
    n: usize,
    cross: &dyn Fn(usize, usize) -> Option<Rat>,
    target: Rat,
) -> Option<Vec<usize>> {
    fn extend(
        order: &mut Vec<usize>,
        used: &mut [bool],
        cross: &dyn Fn(usize, usize) -> Option<Rat>,
        target: Rat,
    ) -> bool {
        if order.len() == used.len() {
            return true;
        }
        for k in 0..used.len() {
            if used[k] {
                continue;
            }
            let vals: Vec<Option<Rat>> = order.iter().map(|&j| cross(j, k)).collect();
            let ok = match vals.first() {
                None => true,
                Some(Some(v0)) => v0.abs() == target && vals.iter().all(|v| *v == Some(*v0)),
                Some(None) => false,
            };
            if ok {
                used[k] = true;
                order.push(k);
                if extend(order, used, cross, target) {
                    return true;
                }
                order.pop();
                used[k] = false;
            }
        }
        false
    }
    let mut order = Vec::new();
    let mut used = vec![false; n];
    extend(&mut order, &mut used, cross, target).then_some(order)
}

/// Splits `s` into blocks for taking the power `1/b_i^2` term by term.
/// Terms whose commutation exponent exceeds `2m` in size share a block; the
/// blocks, and the terms inside each block, must form q-commuting chains.
pub fn qbi_blocks(s: &OperatorSum, m: Rat) -> Option<Vec<QbiBlock>> {
    let terms: Vec<Exponent> = s.terms().map(|(e, _)| e.clone()).collect();
    let space = s.space();
    let n = terms.len();
    let target = rint(2) * m;
    let tp: Vec<Vec<Rat>> = terms
        .iter()
        .map(|x| terms.iter().map(|y| rint(2) * space.phase(x, y)).collect())
        .collect();
    let mut comp: Vec<usize> = (0..n).collect();
    fn root(c: &mut [usize], mut i: usize) -> usize {
        while c[i] != i {
            c[i] = c[c[i]];
            i = c[i];
        }
        i
    }
    for i in 0..n {
        for j in 0..n {
            if tp[i][j].abs() > target {
                let (a, b) = (root(&mut comp, i), root(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        let r = root(&mut comp, i);
        groups.entry(r).or_default().push(i);
    }
    let groups: Vec<Vec<usize>> = groups.into_values().collect();
    let mut blocks = Vec::new();
    for g in &groups {
        let power = if g.len() == 1 {
            Rat::one()
        } else {
            tp[g[0]][g[1]].abs() / target
        };
        if !power.is_integer() || power < Rat::one() {
            return None;
        }
        let order = chain_order(g.len(), &|a, b| Some(tp[g[a]][g[b]]), power * target)?;
        blocks.push((
            order.into_iter().map(|k| g[k]).collect::<Vec<_>>(),
            power.to_integer() as u32,
        ));
    }
    let cross = |a: usize, b: usize| {
        let v = tp[blocks[a].0[0]][blocks[b].0[0]];
        blocks[a]
            .0
            .iter()
            .all(|&x| blocks[b].0.iter().all(|&y| tp[x][y] == v))
            .then_some(v)
    };
    let order = chain_order(blocks.len(), &cross, target)?;
    Some(
        order
            .into_iter()
            .map(|k| QbiBlock {
                terms: blocks[k].0.iter().map(|&t| terms[t].clone()).collect(),
                power: blocks[k].1,
            })
            .collect(),
    )
}

/// For each bracket pair of `s`, whether `e(Z+X)` and `e(Z−X)` commute up to `q^{±2m}`.
pub fn bracket_preconditions(s: &OperatorSum, m: Rat) -> Option<Vec<bool>> {
    let space = s.space();
    let cert = is_standard_positive(s)?;
    Some(
        cert.iter()
            .filter_map(|t| match t {
                PositiveTerm::Bracket { x, y } => {
                    let z = Exponent::momentum_of(y);
                    let p = rint(2) * space.phase(&z.add(x), &z.sub(x));
                    Some(p.abs() == rint(2) * m)
                }
                PositiveTerm::Cartan { .. } => None,
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;

    fn p(name: &str) -> Representation {
        build_preset(name).unwrap()
    }

    fn op(rep: &Representation, s: &str) -> OperatorSum {
        OperatorSum::parse(&rep.space, s).unwrap()
    }

    #[test]
    fn generator_names() {
        for s in ["e1", "f3", "K2", "K1^-1"] {
            assert_eq!(s.parse::<Generator>().unwrap().to_string(), s);
        }
        assert!("g1".parse::<Generator>().is_err());
        assert!("e0".parse::<Generator>().is_err());
    }

    #[test]
    fn all_presets_load() {
        for n in all_preset_names() {
            let r = p(&n);
            for i in 1..=r.rank() {
                let k = r.k(i).unwrap().mul(r.k_inv(i).unwrap()).unwrap();
                assert_eq!(k, OperatorSum::one(&r.space), "{n} K{i}");
            }
        }
        assert!(matches!(
            build_preset("G2_full"),
            Err(Error::UnknownPreset(_))
        ));
    }

    #[test]
    fn canonical_a1() {
        let d = cartan_datum(LieType::A1).unwrap();
        let r = build_canonical_named(&d, &"s1".parse().unwrap(), LambdaMode::Symbolic, &["u"])
            .unwrap();
        assert_eq!(r.f(1).unwrap(), &op(&r, "[-u-2l1]e(2p_u)"));
        assert_eq!(r.k(1).unwrap(), &op(&r, "e(-2u-2l1)"));
        assert_eq!(r.e(1).unwrap(), &op(&r, "[u]e(-2p_u)"));
        let z =
            build_canonical_named(&d, &"s1".parse().unwrap(), LambdaMode::Zeroed, &["u"]).unwrap();
        assert_eq!(z.space.n_lambda(), 0);
        assert_eq!(z.k(1).unwrap(), &op(&z, "e(-2u)"));
    }

    #[test]
    fn canonical_matches_full_presets() {
        for (name, t) in [("A2_full", LieType::A2), ("B2_full", LieType::B2)] {
            let full = p(name);
            let names: Vec<&str> = full.space.vars().iter().map(|s| s.name.as_str()).collect();
            let d = cartan_datum(t).unwrap();
            let c = build_canonical_named(&d, &full.word, LambdaMode::Symbolic, &names).unwrap();
            for i in 1..=d.rank() {
                assert_eq!(
                    c.f(i).unwrap().to_string(),
                    full.f(i).unwrap().to_string(),
                    "{name} f{i}"
                );
                assert_eq!(
                    c.k(i).unwrap().to_string(),
                    full.k(i).unwrap().to_string(),
                    "{name} K{i}"
                );
            }
            let last = full.word.last();
            assert_eq!(
                c.e(last).unwrap().to_string(),
                full.e(last).unwrap().to_string()
            );
        }
    }

    #[test]
    fn canonical_a3_k_matches_simple() {
        let s = p("A3_simple");
        let f = p("A3_full").zero_lambdas().unwrap();
        for i in 1..=3 {
            assert_eq!(f.k(i).unwrap().to_string(), s.k(i).unwrap().to_string());
        }
    }

    #[test]
    fn flip_a2_b2() {
        let f = flip(&p("A2_full").zero_lambdas().unwrap()).unwrap();
        let t = p("A2_gns_twisted");
        for i in 1..=2 {
            assert_eq!(f.e(i).unwrap().to_string(), t.e(i).unwrap().to_string());
            assert_eq!(f.k(i).unwrap().to_string(), t.k(i).unwrap().to_string());
        }
        let f = flip(&p("B2_full").zero_lambdas().unwrap()).unwrap();
        let t = p("B2_gns_twisted");
        for i in 1..=2 {
            assert_eq!(f.e(i).unwrap().to_string(), t.e(i).unwrap().to_string());
            assert_eq!(f.k(i).unwrap().to_string(), t.k(i).unwrap().to_string());
        }
    }

    #[test]
    fn flip_involution() {
        let r = p("A2_gns_twisted");
        let ff = flip(&flip(&r).unwrap()).unwrap();
        for i in 1..=2 {
            assert_eq!(ff.e(i), r.e(i));
            assert_eq!(ff.k(i), r.k(i));
        }
        assert!(matches!(
            flip(&p("A2_simple")),
            Err(Error::NotStandardForm(_))
        ));
    }

    #[test]
    fn nonsimple_a2() {
        let r = p("A2_simple");
        let v = nonsimple_vectors(&r).unwrap();
        let e12 = &v["e12"];
        let e1 = r.e(1).unwrap();
        assert_eq!(e1.mul(e12).unwrap(), e12.mul(e1).unwrap().mul_q(rint(-1)));
        assert!(matches!(
            nonsimple_vector(&r, 1, 1),
            Err(Error::NotAdjacent(1, 1))
        ));
    }

    #[test]
    fn nonsimple_b2() {
        let r = p("B2_full");
        let v = nonsimple_vectors(&r).unwrap();
        let (e1, e2) = (r.e(1).unwrap(), r.e(2).unwrap());
        let (ex, e12) = (&v["eX"], &v["e12"]);
        assert_eq!(ex.mul(e2).unwrap(), e2.mul(ex).unwrap().mul_q(rint(-1)));
        assert_eq!(e1.mul(e12).unwrap(), e12.mul(e1).unwrap().mul_q(rint(-1)));
        assert_eq!(e12.mul(ex).unwrap(), ex.mul(e12).unwrap().mul_q(rint(-1)));
    }

    #[test]
    fn coproduct_k_and_e() {
        let r = p("A2_simple");
        let two = r.space.tensor_square().unwrap();
        let k1 = coproduct(Generator::K(1), &r, &two).unwrap();
        assert_eq!(k1, OperatorSum::parse(&two, "e(u-2v+w+u'-2v'+w')").unwrap());
        let e2 = coproduct(Generator::E(2), &r, &two).unwrap();
        assert_eq!(
            e2,
            OperatorSum::parse(&two, "e(w'-2p_w') + e(w-2p_w)(x)e(-2u+v-2w)").unwrap()
        );
        let one = crate::opalg::embed_leg(&OperatorSum::one(&r.space), 1, &two).unwrap();
        assert_eq!(one, OperatorSum::one(&two));
    }

    #[test]
    fn json_round_trip() {
        for n in all_preset_names() {
            let r = p(&n);
            let back = Representation::from_json(&r.to_json()).unwrap();
            assert_eq!(back.gens, r.gens, "{n}");
        }
        let d = coproduct_rep(&p("A2_simple")).unwrap();
        let back = Representation::from_json(&d.to_json()).unwrap();
        assert_eq!(back.gens, d.gens);
    }

    #[test]
    fn latex_output() {
        let t = p("B2_full").to_latex();
        assert!(t.contains("\\be_{2} &= [w]e(-2p_{w})"));
        assert!(t.contains("\\lambda_{1}"));
    }

    #[test]
    fn transcendental_a_type_is_identity() {
        let r = p("A2_simple");
        let t = transcendental(&r).unwrap();
        assert_eq!(t.e(1).unwrap().to_string(), r.e(1).unwrap().to_string());
    }

    #[test]
    fn transcendental_b2_scales() {
        let t = transcendental(&p("B2_gns_twisted")).unwrap();
        assert_eq!(t.datum.m, vec![rint(1), rat(1, 2)]);
        assert_eq!(t.space.scale(0), rint(1));
        assert_eq!(t.space.scale(1), rat(1, 2));
        assert!(transcendental(&p("A2_full")).is_ok());
    }

    #[test]
    fn qbi_chain_on_brackets() {
        let r = p("B2_gns_twisted");
        assert!(qbi_blocks(r.e(2).unwrap(), rint(1))
            .unwrap()
            .iter()
            .all(|b| b.power == 1));
        assert!(bracket_preconditions(r.e(1).unwrap(), rat(1, 2))
            .unwrap()
            .iter()
            .all(|b| *b));
    }
}
