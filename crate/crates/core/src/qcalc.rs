//! Scalar q-calculus: q-numbers, q-factorials, q-shifted factorials
//! (finite, infinite and real order), q-binomials and the two
//! q-exponentials.
//!
//! Everything works in double precision for a base `q` in `(0, 1)`.
//! Infinite products are truncated under a [`TruncationPolicy`]; when every
//! factor is a positive real they are accumulated as a compensated sum of
//! `ln_1p` terms, otherwise they are multiplied out directly.

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::sum::CompensatedSum;

/// Stopping rule for infinite products and non-terminating series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    tol: f64,
    max_terms: usize,
}

impl TruncationPolicy {
    pub const DEFAULT_TOL: f64 = 1e-14;
    pub const DEFAULT_MAX_TERMS: usize = 10_000;

    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0 && tol < 1.0) {
            return domain(format!("tolerance {tol} not in (0, 1)"));
        }
        if max_terms == 0 {
            return domain("max_terms must be at least 1");
        }
        Ok(Self { tol, max_terms })
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        Self {
            tol: Self::DEFAULT_TOL,
            max_terms: Self::DEFAULT_MAX_TERMS,
        }
    }
}

pub(crate) fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        domain(format!("base q = {q} not in (0, 1)"))
    }
}

/// `q^{k(k-1)/2}` by exponent arithmetic.
pub fn q_pow_binom2(q: f64, k: u32) -> f64 {
    let e = f64::from(k) * (f64::from(k) - 1.0) / 2.0;
    q.powf(e)
}

/// If `w` equals `q^{-n}` for some integer `n >= 0` (to within `1e-12`),
/// returns that `n`.
pub(crate) fn as_neg_q_power(w: Complex64, q: f64) -> Option<u32> {
    if w.im.abs() > 1e-12 * w.norm() || w.re <= 0.0 {
        return None;
    }
    let n = (-w.re.ln() / q.ln()).round();
    if !(0.0..=f64::from(u32::MAX)).contains(&n) {
        return None;
    }
    if (w.re * q.powf(n) - 1.0).abs() <= 1e-12 {
        Some(n as u32)
    } else {
        None
    }
}

/// The q-number `[a]_q = (1 - q^a) / (1 - q)`.
pub fn q_number(a: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(-(a * q.ln()).exp_m1() / (1.0 - q))
}

/// `[n]_q! = (q;q)_n / (1-q)^n`.
pub fn q_factorial(n: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    Ok(q_pochhammer(q, q, n) / (1.0 - q).powi(n as i32))
}

/// Finite q-shifted factorial `(a;q)_n` for real `a`.
pub fn q_pochhammer(a: f64, q: f64, n: u32) -> f64 {
    (0..n).map(|k| 1.0 - a * q.powi(k as i32)).product()
}

/// Finite q-shifted factorial `(a;q)_n` for complex `a`.
pub fn q_pochhammer_complex(a: Complex64, q: f64, n: u32) -> Complex64 {
    (0..n).fold(Complex64::new(1.0, 0.0), |acc, k| {
        acc * (1.0 - a * q.powi(k as i32))
    })
}

/// Number of factors needed before `|a| q^k < tol (1 - q)`.
fn truncation_depth(abs_a: f64, q: f64, policy: &TruncationPolicy) -> Result<usize> {
    let threshold = policy.tol() * (1.0 - q);
    if abs_a < threshold {
        return Ok(0);
    }
    let k = ((threshold / abs_a).ln() / q.ln()).ceil();
    let k = if k.is_finite() { k.max(0.0) as usize } else { usize::MAX };
    // ceil() may land one short when the ratio is an exact power of q
    let k = if abs_a * q.powi(k.min(i32::MAX as usize) as i32) < threshold {
        k
    } else {
        k.saturating_add(1)
    };
    if k > policy.max_terms() {
        return Err(Error::NonConvergence {
            what: "infinite q-product",
            terms: policy.max_terms(),
        });
    }
    Ok(k)
}

/// `ln (a;q)_inf` for real `a < 1`, where every factor is positive.
///
/// For `|a| < 1` the series `-sum_k a^k / (k (1 - q^k))` is used when it
/// needs fewer terms than the product, which is the case as `q -> 1`.
pub fn ln_q_pochhammer_infinite(a: f64, q: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    if !(a < 1.0) {
        return domain(format!("log product needs a < 1, got {a}"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let abs_a = a.abs();
    if abs_a < 1.0 {
        let product_depth = (policy.tol() * (1.0 - q) / abs_a).ln() / q.ln();
        let series_depth = (policy.tol() * (1.0 - q) * (1.0 - abs_a)).ln() / abs_a.ln();
        if series_depth < product_depth {
            return ln_q_pochhammer_series(a, q, policy);
        }
    }
    let depth = truncation_depth(abs_a, q, policy)?;
    let mut acc = CompensatedSum::new();
    for k in 0..depth {
        acc.add((-a * q.powi(k as i32)).ln_1p());
    }
    Ok(acc.value())
}

/// `-sum_{k>=1} a^k / (k (1 - q^k))`, `|a| < 1`. Terms are bounded by
/// `|a|^k / (1-q)`, so the remainder after `K` terms is below
/// `|a|^{K+1} / ((1-q)(1-|a|))`.
fn ln_q_pochhammer_series(a: f64, q: f64, policy: &TruncationPolicy) -> Result<f64> {
    let abs_a = a.abs();
    let mut acc = CompensatedSum::new();
    let mut ak = 1.0;
    for k in 1..=policy.max_terms() {
        ak *= a;
        let kf = k as f64;
        acc.add(-ak / (kf * -(kf * q.ln()).exp_m1()));
        if ak.abs() * abs_a / ((1.0 - q) * (1.0 - abs_a)) < policy.tol() {
            return Ok(acc.value());
        }
    }
    Err(Error::NonConvergence {
        what: "log q-product series",
        terms: policy.max_terms(),
    })
}

/// `(a;q)_inf` for real `a`.
pub fn q_pochhammer_infinite_real(a: f64, q: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    if a < 1.0 {
        return ln_q_pochhammer_infinite(a, q, policy).map(f64::exp);
    }
    let depth = truncation_depth(a.abs(), q, policy)?;
    let mut prod = 1.0;
    for k in 0..depth {
        prod *= 1.0 - a * q.powi(k as i32);
        if prod == 0.0 {
            break;
        }
    }
    Ok(prod)
}

/// `(a;q)_inf` truncated under `policy`.
pub fn q_pochhammer_infinite(
    a: Complex64,
    q: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    if a.im == 0.0 {
        return q_pochhammer_infinite_real(a.re, q, policy).map(|v| Complex64::new(v, 0.0));
    }
    check_q(q)?;
    let depth = truncation_depth(a.norm(), q, policy)?;
    let mut prod = Complex64::new(1.0, 0.0);
    for k in 0..depth {
        prod *= 1.0 - a * q.powi(k as i32);
    }
    Ok(prod)
}

/// `(a;q)_alpha = (a;q)_inf / (a q^alpha; q)_inf` for real order `alpha`.
pub fn q_pochhammer_real_order(
    a: Complex64,
    q: f64,
    alpha: f64,
    policy: &TruncationPolicy,
) -> Result<Complex64> {
    check_q(q)?;
    if alpha == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let shifted = a * q.powf(alpha);
    if let Some(n) = as_neg_q_power(shifted, q) {
        // the denominator has the zero factor 1 - q^{-n} q^n; only a
        // non-negative integer order still has a finite value
        if alpha >= 0.0 && alpha.fract() == 0.0 && alpha <= f64::from(u32::MAX) {
            return Ok(q_pochhammer_complex(a, q, alpha as u32));
        }
        return Err(Error::Pole(format!(
            "a q^alpha = q^-{n} makes (a q^alpha; q)_inf vanish"
        )));
    }
    let num = q_pochhammer_infinite(a, q, policy)?;
    let den = q_pochhammer_infinite(shifted, q, policy)?;
    if den.norm() == 0.0 {
        return Err(Error::Pole("denominator product underflowed to zero".into()));
    }
    Ok(num / den)
}

/// Gaussian binomial coefficient `[n k]_q`.
pub fn q_binomial(n: u32, k: u32, q: f64) -> Result<f64> {
    check_q(q)?;
    if k > n {
        return domain(format!("q-binomial needs k <= n, got n={n}, k={k}"));
    }
    Ok(q_pochhammer(q, q, n) / (q_pochhammer(q, q, n - k) * q_pochhammer(q, q, k)))
}

/// Generalized q-binomial `[alpha k]_q` for real upper index.
pub fn q_binomial_general(alpha: f64, k: u32, q: f64) -> f64 {
    let kf = f64::from(k);
    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    let expo = kf * alpha - kf * (kf - 1.0) / 2.0;
    sign * q.powf(expo) * q_pochhammer(q.powf(-alpha), q, k) / q_pochhammer(q, q, k)
}

/// The q-exponential `e_q(xi) = 1 / ((1-q) xi; q)_inf`, `|xi| < 1/(1-q)`.
pub fn e_q(xi: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let a = (1.0 - q) * xi;
    if !(a.abs() < 1.0) {
        return domain(format!("e_q needs |xi|(1-q) < 1, got {}", a.abs()));
    }
    Ok((-ln_q_pochhammer_infinite(a, q, &TruncationPolicy::default())?).exp())
}

/// The entire q-exponential `E_q(xi) = (-(1-q) xi; q)_inf`.
pub fn big_e_q(xi: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    q_pochhammer_infinite_real(-(1.0 - q) * xi, q, &TruncationPolicy::default())
}
