//! Residuals of the classical identities the p.g.f. derivation relies on.
//!
//! Each function evaluates both sides independently and returns their
//! difference. Where the series side is an alternating sum whose terms can
//! dwarf its value, the difference is divided by the sum of absolute terms,
//! the scale at which double precision can resolve it.

use num_complex::Complex64;

use super::{phi_rs, phi_rs_with_scale, wall_scaled, SeriesParam, SeriesSpec};
use crate::error::{domain, Error, Result};
use crate::qcalc::{check_q, q_pochhammer, q_pochhammer_complex, q_pochhammer_infinite_real, TruncationPolicy};

/// Wall reflection `P_n(x; q^{-N} | q) ~ x^N P_{n-N}(x; q^N | q)`.
///
/// Both sides are multiplied by `(q^{1-N};q)_n`, which vanishes for
/// `N >= 1`; the left side is then the regular polynomial
/// `(aq;q)_n P_n(x; a|q)` at `a = q^{-N}`; the right side
/// `(q^{N+1};q)_{n-N} P_{n-N}(x; q^N|q)` is the same form at `a = q^N`.
pub fn wall_reflection_check(n: u32, big_n: u32, x: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    if big_n > n {
        return domain(format!("reflection needs N <= n, got n={n}, N={big_n}"));
    }
    let lhs = wall_scaled(n, x, -(big_n as i32), q)?;
    let (nf, bf) = (f64::from(n), f64::from(big_n));
    let sign = if big_n % 2 == 0 { 1.0 } else { -1.0 };
    let rhs = x.powi(big_n as i32)
        * sign
        * q.powf(bf * (bf + 1.0 - 2.0 * nf) / 2.0)
        * wall_scaled(n - big_n, x, big_n as i32, q)?;
    Ok((lhs - rhs).abs())
}

/// Finite Heine transformation of a terminating `3phi2` at argument `q`:
///
/// `3phi2(q^-n, alpha, beta; gamma, q^{1-n}/tau | q; q)
///   = (alpha tau;q)_n/(tau;q)_n 3phi2(q^-n, gamma/beta, alpha; gamma, alpha tau | q; beta tau q^n)`
pub fn heine_transform_check(
    n: u32,
    alpha: Complex64,
    beta: Complex64,
    gamma: Complex64,
    tau: Complex64,
    q: f64,
) -> Result<f64> {
    check_q(q)?;
    let policy = TruncationPolicy::default();
    let qn = q.powi(n as i32);
    let lhs = SeriesSpec::new(
        vec![SeriesParam::NegQPow(n), alpha.into(), beta.into()],
        vec![gamma, q / (qn * tau)],
        q,
        Complex64::new(q, 0.0),
    )?;
    let rhs = SeriesSpec::new(
        vec![SeriesParam::NegQPow(n), (gamma / beta).into(), alpha.into()],
        vec![gamma, alpha * tau],
        q,
        beta * tau * qn,
    )?;
    let tau_poch = q_pochhammer_complex(tau, q, n);
    if tau_poch.norm() == 0.0 {
        return Err(Error::ZeroDenominator(n as usize));
    }
    let prefactor = q_pochhammer_complex(alpha * tau, q, n) / tau_poch;
    let l = phi_rs(&lhs, &policy)?;
    let r = prefactor * phi_rs(&rhs, &policy)?;
    Ok((l - r).norm())
}

/// Terminating `2phi1(q^-n, b; c | q; q) = (c/b;q)_n b^n / (c;q)_n`.
///
/// Returns `|lhs - rhs| / max(1, sum_k |term_k|)`.
pub fn q_chu_vandermonde_check(n: u32, b: f64, c: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let spec = SeriesSpec::real(&[SeriesParam::NegQPow(n), b.into()], &[c], q, q)?;
    let (lhs, scale) = phi_rs_with_scale(&spec, &TruncationPolicy::default())?;
    let rhs = q_pochhammer(c / b, q, n) * b.powi(n as i32) / q_pochhammer(c, q, n);
    Ok((lhs.re - rhs).abs() / scale.max(1.0))
}

/// q-binomial theorem `sum_n a^n/(q;q)_n = 1/(a;q)_inf`, `|a| < 1`.
///
/// Returns `|series - 1/(a;q)_inf| / sum_n |a|^n/(q;q)_n`. The absolute
/// series is `1/(|a|;q)_inf`, about `6e6` at `|a| = q = 0.9`.
pub fn q_binomial_theorem_check(a: f64, q: f64, policy: &TruncationPolicy) -> Result<f64> {
    check_q(q)?;
    if !(a.abs() < 1.0) {
        return domain(format!("q-binomial theorem needs |a| < 1, got {a}"));
    }
    let spec = SeriesSpec::real(&[0.0.into()], &[], q, a)?;
    let (series, scale) = phi_rs_with_scale(&spec, policy)?;
    let product = q_pochhammer_infinite_real(a, q, policy)?;
    Ok((series.re - 1.0 / product).abs() / scale)
}
