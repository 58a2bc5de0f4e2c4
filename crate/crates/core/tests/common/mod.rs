//! Random instance generators shared by the property tests and the
//! acceptance run.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use qborel::qscalar::{rat, rint};
use qborel::rewrite::apply_move;
use qborel::{Direction, Exponent, Move, OperatorSum, QScalar, Rat, VariableSpace};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Three unit-scale variables and one λ.
pub fn space_a() -> Arc<VariableSpace> {
    VariableSpace::new(
        &[("u", rint(1)), ("v", rint(1)), ("w", rint(1))],
        &[("l1", rint(1))],
    )
    .unwrap()
}

/// Mixed scales, as in type B.
pub fn space_b() -> Arc<VariableSpace> {
    VariableSpace::new(
        &[("t", rat(1, 2)), ("u", rint(1)), ("v", rat(1, 2))],
        &[("l1", rat(1, 2))],
    )
    .unwrap()
}

pub fn pentagon_space() -> Arc<VariableSpace> {
    VariableSpace::new(&[("x", rint(1)), ("y", rint(1))], &[]).unwrap()
}

fn small_rat(r: &mut impl Rng) -> Rat {
    rat(r.gen_range(-4..=4), *[1, 2].choose(r).unwrap())
}

pub fn exponent(r: &mut impl Rng, space: &VariableSpace) -> Exponent {
    let mut e = space.zero_exponent();
    for j in 0..space.n() {
        e.a[j] = small_rat(r);
        e.c[j] = small_rat(r);
    }
    for t in 0..space.n_lambda() {
        e.d[t] = rint(r.gen_range(-2..=2));
    }
    e
}

/// Exponent with even integer entries.
pub fn even_exponent(r: &mut impl Rng, space: &VariableSpace, bound: i64) -> Exponent {
    let mut e = space.zero_exponent();
    for j in 0..space.n() {
        e.a[j] = rint(2 * r.gen_range(-bound..=bound));
        e.c[j] = rint(2 * r.gen_range(-bound..=bound));
    }
    e
}

pub fn scalar(r: &mut impl Rng) -> QScalar {
    let mut s = QScalar::zero();
    for _ in 0..r.gen_range(1..=3) {
        let c = Complex::new(r.gen_range(-3..=3), r.gen_range(-1..=1));
        s = s + QScalar::monomial(c, rat(r.gen_range(-6..=6), 2));
    }
    s
}

pub fn sum(r: &mut impl Rng, space: &Arc<VariableSpace>, max_terms: usize) -> OperatorSum {
    let mut s = OperatorSum::zero(space);
    for _ in 0..r.gen_range(1..=max_terms) {
        s = s
            .add(&OperatorSum::monomial(space, scalar(r), exponent(r, space)))
            .unwrap();
    }
    s
}

fn form(space: &VariableSpace, coeffs: &[i64]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if *c == 0 {
            continue;
        }
        let name = &space.vars()[k].name;
        out.push_str(&match (*c, out.is_empty()) {
            (1, true) => name.clone(),
            (1, false) => format!("+{name}"),
            (-1, _) => format!("-{name}"),
            (c, true) => format!("{c}{name}"),
            (c, false) if c > 0 => format!("+{c}{name}"),
            (c, _) => format!("{c}{name}"),
        });
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

/// An invertible integral substitution built from elementary operations.
pub fn linear_move(r: &mut impl Rng, space: &VariableSpace) -> Move {
    let n = space.n();
    let mut m: Vec<Vec<i64>> = (0..n)
        .map(|i| (0..n).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..3 {
        let (i, j) = (r.gen_range(0..n), r.gen_range(0..n));
        match r.gen_range(0..3) {
            0 if i != j => {
                let k = r.gen_range(-2..=2);
                for c in 0..n {
                    m[i][c] += k * m[j][c];
                }
            }
            1 => m.swap(i, j),
            _ => m[i].iter_mut().for_each(|x| *x = -*x),
        }
    }
    let map: BTreeMap<String, String> = (0..n)
        .map(|k| (space.vars()[k].name.clone(), form(space, &m[k])))
        .collect();
    Move::Linear { map }
}

pub fn symplectic_move(r: &mut impl Rng, space: &VariableSpace) -> Move {
    let var = space.vars()[r.gen_range(0..space.n())].name.clone();
    match r.gen_range(0..3) {
        0 => linear_move(r, space),
        1 => Move::Gaussian {
            var: var.clone(),
            by: format!("{}{var}+l1", r.gen_range(-2..=2)),
        },
        _ => Move::Shift {
            var,
            by: format!("{}l1", r.gen_range(-2..=2)),
        },
    }
}

fn n_against(space: &VariableSpace, arg: &Exponent, m: Rat, x: &Exponent) -> Rat {
    space.phase(arg, x) / m
}

/// A dilog move on `space_a` together with the direction-compatible
/// monomial sums it expands.
pub struct DilogCase {
    pub mv: Move,
    pub x: OperatorSum,
    pub y: OperatorSum,
}

pub fn dilog_case(r: &mut ChaCha8Rng) -> DilogCase {
    let space = space_a();
    let arg = loop {
        let e = even_exponent(r, &space, 1);
        if !e.is_zero() {
            break e;
        }
    };
    let direction = if r.gen_bool(0.5) {
        Direction::StarLeft
    } else {
        Direction::StarRight
    };
    let sign = if direction == Direction::StarLeft {
        1
    } else {
        -1
    };
    let draw = |r: &mut ChaCha8Rng| {
        let mut s = OperatorSum::zero(&space);
        for _ in 0..r.gen_range(1..=2) {
            let e = loop {
                let mut e = even_exponent(r, &space, 2);
                e.a.iter_mut().for_each(|v| *v /= rint(2));
                let n = n_against(&space, &arg, rint(1), &e);
                if n.is_integer()
                    && (rint(sign) * n).to_integer() >= 0
                    && (n.to_integer().abs() <= 2)
                {
                    break e;
                }
            };
            s = s.add(&OperatorSum::monomial(&space, scalar(r), e)).unwrap();
        }
        s
    };
    let x = draw(r);
    let y = draw(r);
    let mv = Move::Dilog {
        arg: qborel::opalg::format_form(&space, &arg),
        m: "1".into(),
        direction,
    };
    DilogCase { mv, x, y }
}

pub const PENTAGON_U: &str = "-2x";
pub const PENTAGON_V: &str = "-2p_x";
pub const PENTAGON_W: &str = "-2x-2p_x";

fn g(arg: &str) -> Move {
    Move::Dilog {
        arg: arg.into(),
        m: "1".into(),
        direction: Direction::StarRight,
    }
}

/// A monomial on which every factor of both pentagon products expands.
pub fn pentagon_monomial(r: &mut impl Rng) -> OperatorSum {
    let space = pentagon_space();
    let u = qborel::opalg::parse_form(&space, PENTAGON_U).unwrap();
    let v = qborel::opalg::parse_form(&space, PENTAGON_V).unwrap();
    loop {
        let e = even_exponent(r, &space, 2);
        let (nu, nv) = (space.phase(&u, &e), space.phase(&v, &e));
        if nu <= rint(0) && nv <= rint(0) && nu.is_integer() && nv.is_integer() {
            return OperatorSum::monomial(&space, scalar(r), e);
        }
    }
}

/// `g(V) g(U) X (g(V) g(U))^*` and `g(U) g(W) g(V) X (g(U) g(W) g(V))^*`.
pub fn pentagon_sides(x: &OperatorSum) -> qborel::Result<(OperatorSum, OperatorSum)> {
    let lhs = apply_move(&g(PENTAGON_V), &apply_move(&g(PENTAGON_U), x)?)?;
    let rhs = apply_move(
        &g(PENTAGON_U),
        &apply_move(&g(PENTAGON_W), &apply_move(&g(PENTAGON_V), x)?)?,
    )?;
    Ok((lhs, rhs))
}

pub fn associativity(seed: u64) -> bool {
    let mut r = rng(seed);
    let s = if seed % 2 == 0 { space_a() } else { space_b() };
    let (x, y, z) = (sum(&mut r, &s, 3), sum(&mut r, &s, 3), sum(&mut r, &s, 3));
    x.mul(&y).unwrap().mul(&z).unwrap() == x.mul(&y.mul(&z).unwrap()).unwrap()
}

pub fn star_anti(seed: u64) -> bool {
    let mut r = rng(seed);
    let s = if seed % 2 == 0 { space_a() } else { space_b() };
    let (x, y) = (sum(&mut r, &s, 3), sum(&mut r, &s, 3));
    x.mul(&y).unwrap().star() == y.star().mul(&x.star()).unwrap() && x.star().star() == x
}

pub fn move_homomorphism(seed: u64) -> bool {
    let mut r = rng(seed);
    if seed % 2 == 0 {
        let s = if seed % 4 == 0 { space_a() } else { space_b() };
        let mv = symplectic_move(&mut r, &s);
        let (x, y) = (sum(&mut r, &s, 3), sum(&mut r, &s, 3));
        let lhs = apply_move(&mv, &x.mul(&y).unwrap()).unwrap();
        lhs == apply_move(&mv, &x)
            .unwrap()
            .mul(&apply_move(&mv, &y).unwrap())
            .unwrap()
    } else {
        let c = dilog_case(&mut r);
        let lhs = apply_move(&c.mv, &c.x.mul(&c.y).unwrap()).unwrap();
        lhs == apply_move(&c.mv, &c.x)
            .unwrap()
            .mul(&apply_move(&c.mv, &c.y).unwrap())
            .unwrap()
    }
}

pub fn expand_absorb(seed: u64) -> bool {
    let mut r = rng(seed);
    let c = dilog_case(&mut r);
    let Move::Dilog { arg, m, direction } = &c.mv else {
        unreachable!()
    };
    let back = Move::Dilog {
        arg: arg.clone(),
        m: m.clone(),
        direction: direction.reversed(),
    };
    let there = apply_move(&c.mv, &c.x).unwrap();
    apply_move(&back, &there).unwrap() == c.x
}
