//! Numerical evaluation of the non-compact quantum dilogarithm.
//!
//! `log G_b` is computed by Gauss–Legendre quadrature of its integral
//! representation along the line `Im t = δ`, and continued to the whole plane
//! with the functional equation `G_b(x + b) = (1 − e^{2πibx}) G_b(x)`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::sync::OnceLock;

use gauss_quad::GaussLegendre;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Below this imaginary part, `G_b` is evaluated through the reflection
/// formula, keeping the quadrature free of exponential cancellation.
pub const REFLECT_BELOW: f64 = -2.0;

const MAX_SHIFTS: u32 = 200;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BParam {
    b: f64,
    q: f64,
    zeta: C64,
}

impl BParam {
    pub fn new(b: f64) -> Result<BParam> {
        if b.is_nan() || b <= 0.0 || b >= 1.0 {
            return Err(Error::InvalidParameter(format!("b = {b} is not in (0, 1)")));
        }
        Ok(BParam::raw(b))
    }

    fn raw(b: f64) -> BParam {
        let zeta = (I * (PI / 2.0) * ((b * b + 1.0 / (b * b)) / 6.0 + 0.5)).exp();
        BParam {
            b,
            q: b + 1.0 / b,
            zeta,
        }
    }

    /// The same function parametrized by `1/b`: continuation then steps by `1/b`.
    pub fn dual(&self) -> BParam {
        BParam::raw(1.0 / self.b)
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    #[allow(non_snake_case)]
    pub fn Q(&self) -> f64 {
        self.q
    }

    pub fn zeta(&self) -> C64 {
        self.zeta
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexPoint {
    pub z: C64,
    pub strip_ok: bool,
}

impl ComplexPoint {
    pub fn new(param: &BParam, z: C64) -> ComplexPoint {
        ComplexPoint {
            z,
            strip_ok: z.re > 0.0 && z.re < param.q,
        }
    }
}

/// Composite Gauss–Legendre rule with adaptive bisection.
#[derive(Clone, Debug)]
pub struct Quadrature {
    nodes: Vec<(f64, f64)>,
    pub tol: f64,
    /// Bisection also stops once the panel estimates agree to this relative accuracy.
    pub rel: f64,
    pub max_depth: u32,
    pub reflect: bool,
}

impl Quadrature {
    pub fn new(order: usize, tol: f64) -> Quadrature {
        let rule = GaussLegendre::new(order.max(2)).expect("order at least 2");
        Quadrature {
            nodes: rule.as_node_weight_pairs().to_vec(),
            tol,
            rel: 1e-14,
            max_depth: 14,
            reflect: true,
        }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    fn fixed(&self, f: &dyn Fn(f64) -> C64, a: f64, b: f64) -> C64 {
        let (h, c) = ((b - a) / 2.0, (a + b) / 2.0);
        self.nodes
            .iter()
            .map(|&(x, w)| f(c + h * x) * w)
            .sum::<C64>()
            * h
    }

    fn adaptive(
        &self,
        f: &dyn Fn(f64) -> C64,
        a: f64,
        b: f64,
        eps: f64,
        depth: u32,
        ok: &mut bool,
    ) -> C64 {
        let m = (a + b) / 2.0;
        let whole = self.fixed(f, a, b);
        let split = self.fixed(f, a, m) + self.fixed(f, m, b);
        if (whole - split).norm() <= eps.max(self.rel * split.norm()) {
            return split;
        }
        if depth == 0 {
            *ok = false;
            return split;
        }
        self.adaptive(f, a, m, eps / 2.0, depth - 1, ok)
            + self.adaptive(f, m, b, eps / 2.0, depth - 1, ok)
    }

    /// `∫_a^b f` to absolute accuracy `eps`, on unit panels.
    pub fn integrate(&self, f: &dyn Fn(f64) -> C64, a: f64, b: f64, eps: f64) -> Result<C64> {
        let panels = ((b - a).ceil() as usize).max(1);
        let h = (b - a) / panels as f64;
        let mut ok = true;
        let mut sum = C64::new(0.0, 0.0);
        for k in 0..panels {
            let x0 = a + k as f64 * h;
            sum += self.adaptive(f, x0, x0 + h, eps / panels as f64, self.max_depth, &mut ok);
        }
        if ok {
            Ok(sum)
        } else {
            Err(Error::AccuracyNotReached(format!(
                "adaptive quadrature on [{a}, {b}]"
            )))
        }
    }

    /// `∫ f` along the ray `start + s·dir`, `s ≥ 0`, run out until the
    /// integrand has decayed below `eps`.
    fn ray(&self, f: &dyn Fn(C64) -> C64, start: C64, dir: C64, eps: f64) -> Result<C64> {
        let g = |s: f64| f(start + dir * s);
        let mut sum = C64::new(0.0, 0.0);
        let mut quiet = 0;
        for k in 0..400 {
            let (a, b) = (k as f64 * 0.5, (k + 1) as f64 * 0.5);
            let part = self.integrate(&g, a, b, eps / 100.0)?;
            sum += part;
            let edge = g(b).norm();
            quiet = if part.norm() < eps / 100.0 && edge < eps / 100.0 {
                quiet + 1
            } else {
                0
            };
            if quiet >= 2 {
                return Ok(sum * dir);
            }
        }
        Err(Error::AccuracyNotReached(format!(
            "integrand along ray from {start} does not decay"
        )))
    }
}

impl Default for Quadrature {
    fn default() -> Quadrature {
        Quadrature::new(20, 1e-13)
    }
}

fn default_rule() -> &'static Quadrature {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    RULE.get_or_init(Quadrature::default)
}

/// Rule for integrals whose integrand itself involves `G_b`.
fn outer_rule() -> &'static Quadrature {
    static RULE: OnceLock<Quadrature> = OnceLock::new();
    RULE.get_or_init(|| Quadrature {
        rel: 1e-11,
        max_depth: 8,
        ..Quadrature::new(16, 1e-10)
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogG {
    pub value: C64,
    /// Functional-equation steps taken to reach the quadrature window.
    pub shifts: u32,
    pub reflected: bool,
}

fn near_lattice(param: &BParam, w: C64) -> bool {
    // w = n b + m / b with n, m ≥ 0
    if w.im.abs() > 1e-12 || w.re < -1e-12 {
        return false;
    }
    let (b, ib) = (param.b, 1.0 / param.b);
    let mut n = 0.0;
    while n * b <= w.re + 1e-12 {
        let m = (w.re - n * b) / ib;
        if (m - m.round()).abs() * ib < 1e-12 && m.round() >= 0.0 {
            return true;
        }
        n += 1.0;
    }
    false
}

fn integral_in_strip(param: &BParam, z: C64, rule: &Quadrature) -> Result<C64> {
    let (b, q) = (param.b, param.q);
    let delta = b.min(1.0 / b);
    let f = |s: f64| {
        let t = C64::new(s, delta);
        if s > 0.0 {
            (PI * t * (z - q)).exp()
                / ((1.0 - (-PI * b * t).exp()) * (1.0 - (-PI * t / b).exp()) * t)
        } else {
            (PI * t * z).exp() / (((PI * b * t).exp() - 1.0) * ((PI * t / b).exp() - 1.0) * t)
        }
    };
    let target = rule.tol / 10.0;
    let lift = (-PI * delta * z.im).exp();
    let (rl, rr) = (z.re, q - z.re);
    let bound = |r: f64, t: f64| {
        let d = (1.0 - (-PI * b * t).exp()) * (1.0 - (-PI * t / b).exp());
        lift * (-PI * r * t).exp() / (PI * r * t * d)
    };
    let mut t_max = 1.0;
    while bound(rl, t_max) > target || bound(rr, t_max) > target {
        t_max += 1.0;
        if t_max > 2000.0 {
            return Err(Error::AccuracyNotReached(format!("tail bound at z = {z}")));
        }
    }
    rule.integrate(&f, -t_max, t_max, rule.tol)
}

/// `log G_b(z)` with the given quadrature rule.
pub fn log_big_g_with(param: &BParam, z: C64, rule: &Quadrature) -> Result<LogG> {
    if near_lattice(param, -z) {
        return Err(Error::PoleInput(format!("{z}")));
    }
    if near_lattice(param, z - param.q) {
        return Err(Error::PoleInput(format!("{z} (zero of G_b)")));
    }
    if rule.reflect && z.im < REFLECT_BELOW {
        let other = log_big_g_with(param, param.q - z, rule)?;
        return Ok(LogG {
            value: I * PI * z * (z - param.q) - other.value,
            shifts: other.shifts,
            reflected: true,
        });
    }
    let (b, q) = (param.b, param.q);
    let (lo, hi) = (q / 2.0 - b / 2.0, q / 2.0 + b / 2.0);
    let mut w = z;
    let mut acc = C64::new(0.0, 0.0);
    let mut shifts = 0;
    while w.re < lo {
        acc -= (1.0 - (2.0 * PI * I * b * w).exp()).ln();
        w += b;
        shifts += 1;
    }
    while w.re > hi {
        w -= b;
        acc += (1.0 - (2.0 * PI * I * b * w).exp()).ln();
        shifts += 1;
    }
    if shifts > MAX_SHIFTS {
        return Err(Error::AccuracyNotReached(format!(
            "{shifts} continuation steps for {z}"
        )));
    }
    let value = param.zeta.conj().ln() - integral_in_strip(param, w, rule)? + acc;
    Ok(LogG {
        value,
        shifts,
        reflected: false,
    })
}

pub fn log_big_g(param: &BParam, z: C64) -> Result<C64> {
    Ok(log_big_g_with(param, z, default_rule())?.value)
}

pub fn big_g(param: &BParam, z: C64) -> Result<C64> {
    Ok(log_big_g(param, z)?.exp())
}

/// `S_b(z) = e^{(iπ/2) z (Q − z)} G_b(z)`, so that `S_b(z) S_b(Q − z) = 1`.
pub fn sb(param: &BParam, z: C64) -> Result<C64> {
    Ok((I * PI / 2.0 * z * (param.q - z) + log_big_g(param, z)?).exp())
}

fn gb_arg(param: &BParam, x: f64) -> Result<C64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::InvalidParameter(format!("g_b needs x > 0, got {x}")));
    }
    Ok(C64::new(param.q / 2.0, 0.0) + x.ln() / (2.0 * PI * I * param.b))
}

pub fn gb(param: &BParam, x: f64) -> Result<C64> {
    Ok(param.zeta.conj() / big_g(param, gb_arg(param, x)?)?)
}

pub fn gb_star(param: &BParam, x: f64) -> Result<C64> {
    Ok(gb(param, x)?.conj())
}

fn residual(lhs: C64, rhs: C64) -> f64 {
    (lhs - rhs).norm() / rhs.norm().max(1.0)
}

/// Residual of the tau-beta integral against `G(α)G(β)/G(α+β)`.
pub fn check_tau_beta(param: &BParam, alpha: C64, beta: C64) -> Result<f64> {
    let q = param.q;
    let admissible = beta.re > 0.0 && (alpha + beta).re < q && alpha.re > 0.0;
    if !admissible {
        return Err(Error::ConvergenceViolation(format!(
            "need Re β > 0, Re α > 0 and Re(α+β) < Q; got α = {alpha}, β = {beta}"
        )));
    }
    let rule = outer_rule();
    let delta = alpha.re / 2.0;
    let f = |tau: C64| -> C64 {
        let ga = log_big_g(param, alpha + I * tau);
        let gq = log_big_g(param, q + I * tau);
        match (ga, gq) {
            (Ok(a), Ok(b)) => (-2.0 * PI * tau * beta + a - b).exp(),
            _ => C64::new(f64::NAN, f64::NAN),
        }
    };
    let start = C64::new(0.0, delta);
    let eps = 1e-10;
    let lhs = rule.ray(&f, start, C64::new(1.0, 0.0), eps)?
        - rule.ray(&f, start, C64::new(-1.0, 0.0), eps)?;
    let rhs = (log_big_g(param, alpha)? + log_big_g(param, beta)?
        - log_big_g(param, alpha + beta)?)
    .exp();
    if !lhs.is_finite() {
        return Err(Error::AccuracyNotReached("tau-beta integrand".into()));
    }
    Ok(residual(lhs, rhs))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierResidual {
    pub gb: f64,
    pub gb_star: f64,
}

/// Residuals of both Fourier integrals against direct evaluation of
/// `g_b(x)` and `g_b^*(x)`.
pub fn check_fourier_gb(param: &BParam, x: f64) -> Result<FourierResidual> {
    let (q, b) = (param.q, param.b);
    let lx = gb_arg(param, x).map(|_| x.ln())?;
    let rule = outer_rule();
    let inv_g = |t: C64| {
        log_big_g(param, q + I * t)
            .map(|l| (-l).exp())
            .unwrap_or(C64::new(f64::NAN, f64::NAN))
    };
    let power = |t: C64| (I * t * lx / b).exp();
    let start = C64::new(0.0, 0.5);
    let eps = 1e-10;
    let diag = C64::new(FRAC_1_SQRT_2, -FRAC_1_SQRT_2);

    let f1 = |t: C64| (-PI * I * t * t).exp() * inv_g(t) * power(t);
    let v1 = rule.ray(&f1, start, diag, eps)? - rule.ray(&f1, start, C64::new(-1.0, 0.0), eps)?;

    let f2 = |t: C64| (-PI * q * t).exp() * inv_g(t) * power(t);
    let v2 =
        rule.ray(&f2, start, C64::new(1.0, 0.0), eps)? - rule.ray(&f2, start, -diag.conj(), eps)?;

    if !v1.is_finite() || !v2.is_finite() {
        return Err(Error::AccuracyNotReached(format!(
            "Fourier integral at x = {x}"
        )));
    }
    Ok(FourierResidual {
        gb: residual(v1, gb(param, x)?),
        gb_star: residual(v2, gb_star(param, x)?),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl IdentityResult {
    fn new(name: &str, residuals: Result<Vec<f64>>, tolerance: f64) -> IdentityResult {
        let (samples, max_residual) = match residuals {
            Ok(r) => (
                r.len(),
                r.iter()
                    .fold(0.0f64, |m, x| if x.is_nan() { f64::NAN } else { m.max(*x) }),
            ),
            Err(_) => (0, f64::INFINITY),
        };
        IdentityResult {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            passed: samples > 0 && max_residual < tolerance,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SelfTestConfig {
    pub samples: usize,
    pub tol: f64,
    pub integral_tol: f64,
    pub tau_beta_points: usize,
    pub fourier_points: usize,
    pub seed: u64,
}

impl Default for SelfTestConfig {
    fn default() -> SelfTestConfig {
        SelfTestConfig {
            samples: 100,
            tol: 1e-8,
            integral_tol: 1e-6,
            tau_beta_points: 10,
            fourier_points: 5,
            seed: 7,
        }
    }
}

/// Admissible `(α, β)` pairs, as multiples of `Q`.
pub const TAU_BETA_POINTS: [((f64, f64), (f64, f64)); 10] = [
    ((1.0 / 3.0, 0.0), (1.0 / 3.0, 0.0)),
    ((0.5, 0.0), (0.25, 0.0)),
    ((0.2, 0.0), (0.5, 0.0)),
    ((0.6, 0.0), (0.2, 0.0)),
    ((0.25, 0.1), (0.3, -0.05)),
    ((0.4, -0.1), (0.35, 0.1)),
    ((0.15, 0.0), (0.15, 0.0)),
    ((0.5, 0.05), (0.3, 0.0)),
    ((0.3, 0.2), (0.2, 0.0)),
    ((0.45, 0.0), (0.4, -0.2)),
];

pub const FOURIER_POINTS: [f64; 5] = [0.1, 0.5, 1.0, 3.0, 10.0];

fn sample_strip(rng: &mut ChaCha8Rng, q: f64) -> C64 {
    C64::new(rng.gen_range(0.05..q - 0.05), rng.gen_range(-1.5..1.5))
}

/// All numerical identities at one value of `b`.
pub fn selftest(param: &BParam, cfg: &SelfTestConfig) -> Vec<IdentityResult> {
    let q = param.q;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let strip: Vec<C64> = (0..cfg.samples)
        .map(|_| sample_strip(&mut rng, q))
        .collect();
    let wide: Vec<C64> = (0..cfg.samples)
        .map(|_| C64::new(rng.gen_range(-1.0..q + 1.0), rng.gen_range(-1.5..1.5)))
        .collect();
    let reals: Vec<f64> = (0..cfg.samples)
        .map(|k| 10f64.powf(-3.0 + 6.0 * k as f64 / (cfg.samples.max(2) - 1) as f64))
        .collect();
    let b = param.b;
    let g = |z: C64| big_g(param, z);
    let each = |pts: &[C64], f: &(dyn Fn(C64) -> Result<f64> + Sync)| -> Result<Vec<f64>> {
        pts.par_iter().map(|&z| f(z)).collect()
    };
    let mut out = vec![
        IdentityResult::new(
            "reflection G",
            each(&strip, &|z| {
                Ok(residual(g(z)? * g(q - z)?, (I * PI * z * (z - q)).exp()))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "reflection S",
            each(&strip, &|z| {
                Ok(residual(
                    sb(param, z)? * sb(param, q - z)?,
                    C64::new(1.0, 0.0),
                ))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "functional equation b",
            each(&wide, &|z| {
                Ok(residual(
                    g(z + b)?,
                    (1.0 - (2.0 * PI * I * b * z).exp()) * g(z)?,
                ))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "functional equation 1/b",
            each(&wide, &|z| {
                Ok(residual(
                    g(z + 1.0 / b)?,
                    (1.0 - (2.0 * PI * I * z / b).exp()) * g(z)?,
                ))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "functional equation S",
            each(&wide, &|z| {
                let f = I * ((-PI * I * b * z).exp() - (PI * I * b * z).exp());
                Ok(residual(sb(param, z + b)?, f * sb(param, z)?))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "complex conjugation",
            each(&wide, &|z| {
                Ok(residual(
                    g(z)?.conj() * g(q - z.conj())?,
                    C64::new(1.0, 0.0),
                ))
            }),
            cfg.tol,
        ),
        IdentityResult::new(
            "|g_b(x)| = 1",
            reals
                .par_iter()
                .map(|&x| Ok((gb(param, x)?.norm() - 1.0).abs()))
                .collect(),
            cfg.tol,
        ),
        IdentityResult::new(
            "self-duality G",
            each(&wide, &|z| Ok(residual(g(z)?, big_g(&param.dual(), z)?))),
            cfg.tol,
        ),
        IdentityResult::new(
            "self-duality g",
            reals
                .par_iter()
                .map(|&x| {
                    Ok(residual(
                        gb(param, x)?,
                        gb(&param.dual(), x.powf(1.0 / (b * b)))?,
                    ))
                })
                .collect(),
            cfg.tol,
        ),
    ];
    let tb: Vec<(C64, C64)> = TAU_BETA_POINTS
        .iter()
        .take(cfg.tau_beta_points)
        .map(|&((ar, ai), (br, bi))| (C64::new(ar, ai) * q, C64::new(br, bi) * q))
        .collect();
    out.push(IdentityResult::new(
        "tau-beta",
        tb.par_iter()
            .map(|&(a, bb)| check_tau_beta(param, a, bb))
            .collect(),
        cfg.integral_tol,
    ));
    let fr: Result<Vec<FourierResidual>> = FOURIER_POINTS
        .iter()
        .take(cfg.fourier_points)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&&x| check_fourier_gb(param, x))
        .collect();
    let fr = fr.map(|v| v.iter().flat_map(|r| [r.gb, r.gb_star]).collect());
    out.push(IdentityResult::new(
        "Fourier g_b and g_b*",
        fr,
        cfg.integral_tol,
    ));
    out
}
