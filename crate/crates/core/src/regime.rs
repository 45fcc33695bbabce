//! Photon-counting regimes of the generalized Euler distribution.
//!
//! The Mandel parameter of `[X]_q` is `P(lambda) / mean`, where `P` is a
//! downward quadratic in `lambda`. Whether `P` has real roots is decided by
//! the sign of a cubic `delta` in `zeta = q^m`.

use std::f64::consts::PI;
use std::fmt;

use crate::error::{domain, Error, Result};
use crate::gen_euler::{self, domain_max, q_int, GenEulerParams};
use crate::qcalc::{check_q, q_number};

/// Poissonian band: `|P(lambda)| < POISSONIAN_TOL * max(1, lambda^2)`.
pub const POISSONIAN_TOL: f64 = 1e-10;

/// Slack allowed on the arccos argument before it is an error.
const ACOS_SLACK: f64 = 1e-12;

/// Distance from `q0` inside which the trigonometric root is replaced by
/// bisection.
const NEAR_Q0: f64 = 1e-6;

/// `q0 = (5 sqrt 5 - 2)/11`, where the cubic acquires a double root.
pub fn q0() -> f64 {
    (5.0 * 5f64.sqrt() - 2.0) / 11.0
}

/// Coefficients of `delta(zeta) = a zeta^3 + b zeta^2 + c zeta + d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CubicCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl CubicCoeffs {
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(CubicCoeffs {
            a: (1.0 + q).powi(2),
            b: (q - 3.0) * (1.0 + q),
            c: (q - 1.0) * (3.0 * q + 1.0),
            d: 7.0 - q * (6.0 + q),
        })
    }

    pub fn eval(&self, zeta: f64) -> f64 {
        ((self.a * zeta + self.b) * zeta + self.c) * zeta + self.d
    }

    /// `alpha` and `beta` of the depressed cubic `t^3 + beta t + alpha`.
    fn depressed(&self) -> (f64, f64) {
        let CubicCoeffs { a, b, c, d } = *self;
        let alpha = (2.0 * b.powi(3) - 9.0 * a * b * c + 27.0 * a * a * d) / (27.0 * a.powi(3));
        let beta = (3.0 * a * c - b * b) / (3.0 * a * a);
        (alpha, beta)
    }

    /// Positive critical point; `delta` decreases on `(0, zeta_c)`.
    fn critical_point(&self) -> f64 {
        let CubicCoeffs { a, b, c, .. } = *self;
        (-b + (b * b - 3.0 * a * c).sqrt()) / (3.0 * a)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    SubPoissonian,
    Poissonian,
    SuperPoissonian,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::SubPoissonian => "sub-poissonian",
            Regime::Poissonian => "poissonian",
            Regime::SuperPoissonian => "super-poissonian",
        }
    }

    /// Regime from a value of `P(lambda)` (or anything sharing its sign).
    pub fn from_sign(p: f64, lambda: f64) -> Self {
        if p.abs() < POISSONIAN_TOL * lambda.powi(2).max(1.0) {
            Regime::Poissonian
        } else if p < 0.0 {
            Regime::SubPoissonian
        } else {
            Regime::SuperPoissonian
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open piece `[lo, hi)` of the lambda-domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeInterval {
    pub lo: f64,
    pub hi: f64,
    pub regime: Regime,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeReport {
    pub q: f64,
    pub m: u32,
    pub delta: f64,
    pub delta_small: f64,
    pub cardano_disc: f64,
    pub q0: f64,
    pub m_q: Option<u32>,
    pub zeta_q: Option<f64>,
    /// Roots of `P` with `lambda_plus < lambda_minus`.
    pub lambda_plus: Option<f64>,
    pub lambda_minus: Option<f64>,
    /// The same thresholds in `|z|`.
    pub z_plus: Option<f64>,
    pub z_minus: Option<f64>,
    pub domain_max: f64,
    pub intervals: Vec<RegimeInterval>,
    /// Roots of `P` inside the domain.
    pub poissonian_points: Vec<f64>,
}

fn check_m(m: u32) -> Result<()> {
    if m == 0 {
        return domain("the sign polynomial needs m >= 1");
    }
    Ok(())
}

/// Coefficients `(A, B, C)` of `P(lambda) = A lambda^2 + B lambda + C`.
pub fn sign_poly_coeffs(q: f64, m: u32) -> Result<(f64, f64, f64)> {
    check_q(q)?;
    check_m(m)?;
    let qm = q.powi(m as i32);
    let mq = q_number(f64::from(m), q)?;
    Ok((qm * (1.0 + q) - 2.0, qm * (2.0 * mq + qm) - 1.0, -mq))
}

/// `P(lambda) = lambda^2 q^m (1 + q - 2q^{-m}) + lambda (q^m (2[m]_q + q^m) - 1) - [m]_q`.
pub fn sign_poly(lambda: f64, q: f64, m: u32) -> Result<f64> {
    let (a, b, c) = sign_poly_coeffs(q, m)?;
    Ok((a * lambda + b) * lambda + c)
}

/// `Delta = q^{2m} (2[m]_q + q^m)^2 + 4[m]_q (q^{m+1} - 2) - 2q^{2m} + 1`.
pub fn discriminant_delta(q: f64, m: u32) -> Result<f64> {
    check_q(q)?;
    let qm = q.powi(m as i32);
    let mq = q_number(f64::from(m), q)?;
    Ok(qm * qm * (2.0 * mq + qm).powi(2) + 4.0 * mq * (qm * q - 2.0) - 2.0 * qm * qm + 1.0)
}

/// `delta = (1+q)^2 q^{3m} + (q-3)(q+1) q^{2m} + (q(3q-2) - 1) q^m + 7 - q(6+q)`.
pub fn delta_small(q: f64, m: u32) -> Result<f64> {
    check_q(q)?;
    let qm = q.powi(m as i32);
    Ok((1.0 + q).powi(2) * qm.powi(3) + (q - 3.0) * (q + 1.0) * qm * qm + (q * (3.0 * q - 2.0) - 1.0) * qm + 7.0
        - q * (6.0 + q))
}

/// Cardano discriminant `alpha^2 + 4 beta^3 / 27`.
pub fn cardano_discriminant(q: f64) -> Result<f64> {
    let (alpha, beta) = CubicCoeffs::new(q)?.depressed();
    Ok(alpha * alpha + 4.0 * beta.powi(3) / 27.0)
}

/// Smallest positive root of `delta` for `q > q0`, from the trigonometric
/// form of the cubic roots (bisection within `1e-6` of `q0`). Immediately
/// above `q0` this root still exceeds `q`.
pub fn zeta_root(q: f64) -> Result<f64> {
    check_q(q)?;
    if q <= q0() {
        return domain(format!("the cubic has one real root for q = {q} <= q0"));
    }
    if q - q0() < NEAR_Q0 {
        return zeta_q_bisection(q);
    }
    let cubic = CubicCoeffs::new(q)?;
    let (alpha, beta) = cubic.depressed();
    let arg = 3.0 * 3f64.sqrt() * alpha / (2.0 * beta * (-beta).sqrt());
    if arg.abs() > 1.0 + ACOS_SLACK {
        return domain(format!("arccos argument {arg} outside [-1, 1] at q = {q}"));
    }
    let theta = arg.clamp(-1.0, 1.0).acos() / 3.0;
    Ok(-cubic.b / (3.0 * cubic.a) + 2.0 * (-beta / 3.0).sqrt() * (theta + 4.0 * PI / 3.0).cos())
}

/// The root `zeta_q` of `delta` in `(0, q)`.
pub fn zeta_q(q: f64) -> Result<f64> {
    let z = zeta_root(q)?;
    let slack = 1e-9;
    if !(z > -slack && z < q + slack) {
        return Err(Error::RootNotInInterval { root: z, lo: 0.0, hi: q });
    }
    Ok(z)
}

/// Bisection for the smallest positive root of `delta` on `(0, zeta_c)`,
/// where `delta` is decreasing with `delta(0) > 0 >= delta(zeta_c)`.
pub fn zeta_q_bisection(q: f64) -> Result<f64> {
    check_q(q)?;
    if q <= q0() {
        return domain(format!("the cubic has one real root for q = {q} <= q0"));
    }
    let cubic = CubicCoeffs::new(q)?;
    let (mut lo, mut hi) = (0.0, cubic.critical_point());
    if cubic.eval(hi) > 0.0 {
        return Err(Error::RootNotInInterval { root: f64::NAN, lo, hi });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if cubic.eval(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `m_q = floor(ln zeta / ln q)`, absent for `q <= q0`.
pub fn m_threshold(q: f64) -> Result<Option<u32>> {
    check_q(q)?;
    if q <= q0() {
        return Ok(None);
    }
    let z = zeta_root(q)?;
    Ok(Some((z.ln() / q.ln()).floor().max(0.0) as u32))
}

/// Real roots of `P` ordered `lambda_plus < lambda_minus`, absent when
/// `Delta <= 0`.
pub fn lambda_roots(q: f64, m: u32) -> Result<Option<(f64, f64)>> {
    let (a, b, c) = sign_poly_coeffs(q, m)?;
    let disc = b * b - 4.0 * a * c;
    if !(disc > 0.0) {
        return Ok(None);
    }
    let t = -0.5 * (b + b.signum() * disc.sqrt());
    let (r1, r2) = (t / a, c / t);
    Ok(Some((r1.min(r2), r1.max(r2))))
}

fn check_lambda(lambda: f64, q: f64, m: u32) -> Result<()> {
    check_q(q)?;
    let max = domain_max(q, m);
    if !(lambda >= 0.0 && lambda < max) {
        return domain(format!("lambda = {lambda} outside [0, {max})"));
    }
    Ok(())
}

/// Regime from the sign of `P(lambda)`; for `m = 0` the Mandel parameter is
/// `(q - 1) lambda`.
pub fn classify(lambda: f64, q: f64, m: u32) -> Result<Regime> {
    check_lambda(lambda, q, m)?;
    if m == 0 {
        if lambda == 0.0 {
            return Err(Error::DivisionByZero("Mandel parameter at m = 0, lambda = 0"));
        }
        return Ok(Regime::from_sign((q - 1.0) * lambda, lambda));
    }
    Ok(Regime::from_sign(sign_poly(lambda, q, m)?, lambda))
}

/// Regime from brute-force moments of a PMF table: `Var - E` of `[X]_q`
/// equals `P(lambda)` and is tested against the same band.
pub fn classify_oracle(lambda: f64, q: f64, m: u32) -> Result<Regime> {
    let params = GenEulerParams::new(q, m, lambda)?;
    let table = gen_euler::pmf_table(&params, 1e-14)?;
    let mut mean = 0.0;
    for (j, &p) in table.probs().iter().enumerate() {
        mean += q_int(j as u32, q) * p;
    }
    if mean == 0.0 {
        return Err(Error::DivisionByZero("Mandel parameter at m = 0, lambda = 0"));
    }
    let mut var = 0.0;
    for (j, &p) in table.probs().iter().enumerate() {
        var += (q_int(j as u32, q) - mean).powi(2) * p;
    }
    Ok(Regime::from_sign(var - mean, lambda))
}

/// Discriminants, thresholds, roots and the regime partition of
/// `[0, q^m/(1-q))`.
pub fn report(q: f64, m: u32) -> Result<RegimeReport> {
    check_q(q)?;
    let max = domain_max(q, m);
    let roots = if m == 0 { None } else { lambda_roots(q, m)? };
    let mut intervals = Vec::new();
    let mut poissonian_points = Vec::new();
    match roots {
        Some((lp, lm)) if lp < max && lm > 0.0 => {
            let mut cuts = vec![0.0];
            for r in [lp, lm] {
                if r > 0.0 && r < max {
                    cuts.push(r);
                    poissonian_points.push(r);
                }
            }
            cuts.push(max);
            for w in cuts.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let regime = if mid > lp && mid < lm {
                    Regime::SuperPoissonian
                } else {
                    Regime::SubPoissonian
                };
                intervals.push(RegimeInterval { lo: w[0], hi: w[1], regime });
            }
        }
        _ => intervals.push(RegimeInterval { lo: 0.0, hi: max, regime: Regime::SubPoissonian }),
    }
    let zeta = if q > q0() { Some(zeta_root(q)?) } else { None };
    Ok(RegimeReport {
        q,
        m,
        delta: discriminant_delta(q, m)?,
        delta_small: delta_small(q, m)?,
        cardano_disc: cardano_discriminant(q)?,
        q0: q0(),
        m_q: m_threshold(q)?,
        zeta_q: zeta,
        lambda_plus: roots.map(|r| r.0),
        lambda_minus: roots.map(|r| r.1),
        z_plus: roots.map(|r| r.0.max(0.0).sqrt()),
        z_minus: roots.map(|r| r.1.max(0.0).sqrt()),
        domain_max: max,
        intervals,
        poissonian_points,
    })
}

#[cfg(test)]
mod tests;
