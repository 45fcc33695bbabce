//! Basic (`r phi s`) and classical (`r F s`) hypergeometric series, Wall
//! polynomials, Laguerre polynomials and the 2D q-Hermite family.
//!
//! Terms are generated by ratio recurrences so that large intermediate
//! factors such as `(q^{-n};q)_k` never appear on their own, and summed with
//! compensation. The `q^{C(k,2)}` weight of `r phi s` is applied separately
//! by exponent arithmetic.

pub mod identities;

use num_complex::Complex64;
use twofloat::TwoFloat;

use crate::error::{domain, Error, Result};
use crate::qcalc::{as_neg_q_power, check_q, q_binomial, q_pochhammer, q_pow_binom2, TruncationPolicy};
use crate::sum::{CompensatedComplexSum, CompensatedSum};

/// A numerator parameter of a basic hypergeometric series.
///
/// `NegQPow(n)` is the exact parameter `q^{-n}`; the series built with it
/// terminates after the `k = n` term with an exactly vanishing factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SeriesParam {
    Value(Complex64),
    NegQPow(u32),
}

impl SeriesParam {
    pub fn real(a: f64) -> Self {
        SeriesParam::Value(Complex64::new(a, 0.0))
    }

    pub fn value(&self, q: f64) -> Complex64 {
        match *self {
            SeriesParam::Value(a) => a,
            SeriesParam::NegQPow(n) => Complex64::new(q.powi(-(n as i32)), 0.0),
        }
    }

    /// The factor `1 - a q^k` of `(a;q)_{k+1} / (a;q)_k`.
    fn factor(&self, q: f64, k: u32) -> Complex64 {
        match *self {
            SeriesParam::Value(a) => 1.0 - a * q.powi(k as i32),
            SeriesParam::NegQPow(n) => Complex64::new(1.0 - q.powi(k as i32 - n as i32), 0.0),
        }
    }

    fn termination_order(&self, q: f64) -> Option<u32> {
        match *self {
            SeriesParam::NegQPow(n) => Some(n),
            SeriesParam::Value(a) => as_neg_q_power(a, q),
        }
    }
}

impl From<f64> for SeriesParam {
    fn from(a: f64) -> Self {
        SeriesParam::real(a)
    }
}

impl From<Complex64> for SeriesParam {
    fn from(a: Complex64) -> Self {
        SeriesParam::Value(a)
    }
}

/// Parameters of `r phi s (a_1..a_r; b_1..b_s | q; argument)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesSpec {
    numerators: Vec<SeriesParam>,
    denominators: Vec<Complex64>,
    q: f64,
    argument: Complex64,
}

impl SeriesSpec {
    pub fn new(
        numerators: Vec<SeriesParam>,
        denominators: Vec<Complex64>,
        q: f64,
        argument: Complex64,
    ) -> Result<Self> {
        check_q(q)?;
        Ok(Self {
            numerators,
            denominators,
            q,
            argument,
        })
    }

    /// Real-parameter convenience constructor.
    pub fn real(numerators: &[SeriesParam], denominators: &[f64], q: f64, argument: f64) -> Result<Self> {
        Self::new(
            numerators.to_vec(),
            denominators.iter().map(|&b| Complex64::new(b, 0.0)).collect(),
            q,
            Complex64::new(argument, 0.0),
        )
    }

    pub fn numerators(&self) -> &[SeriesParam] {
        &self.numerators
    }

    pub fn denominators(&self) -> &[Complex64] {
        &self.denominators
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn argument(&self) -> Complex64 {
        self.argument
    }

    /// Smallest `n` such that some numerator is `q^{-n}`.
    pub fn terminates_at(&self) -> Option<u32> {
        self.numerators
            .iter()
            .filter_map(|a| a.termination_order(self.q))
            .min()
    }

    /// `1 + s - r`, the exponent of the `(-1)^k q^{C(k,2)}` weight.
    fn excess(&self) -> i32 {
        1 + self.denominators.len() as i32 - self.numerators.len() as i32
    }
}

/// Partial sum of the first `terms` terms (`k = 0..terms`).
///
/// This is the single summation loop behind [`phi_rs`].
pub fn phi_rs_partial(spec: &SeriesSpec, terms: u32) -> Result<Complex64> {
    accumulate(spec, Some(terms), &TruncationPolicy::default()).map(|(v, _)| v)
}

/// `(-1)^{e k} q^{e C(k,2)}`.
fn weight(q: f64, excess: i32, k: u32) -> f64 {
    if excess == 0 {
        return 1.0;
    }
    let sign = if excess % 2 != 0 && k % 2 == 1 { -1.0 } else { 1.0 };
    sign * q_pow_binom2(q, k).powi(excess)
}

/// Sums either exactly `terms` terms or, when `terms` is `None`, until two
/// consecutive terms fall below `tol` relative to the running sum. Returns
/// the sum and the sum of term magnitudes.
fn accumulate(spec: &SeriesSpec, terms: Option<u32>, policy: &TruncationPolicy) -> Result<(Complex64, f64)> {
    let q = spec.q;
    let excess = spec.excess();
    let zero = Complex64::new(0.0, 0.0);
    let mut acc = CompensatedComplexSum::new();
    let mut magnitude = CompensatedSum::new();
    // Pochhammer quotients, argument powers and 1/(q;q)_k
    let mut ratio = Complex64::new(1.0, 0.0);
    let mut small_run = 0;
    let limit = terms.unwrap_or(policy.max_terms() as u32);
    for k in 0..limit {
        let term = ratio * weight(q, excess, k);
        acc.add(term);
        magnitude.add(term.norm());
        if terms.is_none() {
            if term.norm() <= policy.tol() * acc.value().norm() {
                small_run += 1;
                if small_run >= 2 {
                    return Ok((acc.value(), magnitude.value()));
                }
            } else {
                small_run = 0;
            }
        }
        if k + 1 == limit {
            break;
        }
        let mut step = spec.argument / (1.0 - q.powi(k as i32 + 1));
        for a in &spec.numerators {
            step *= a.factor(q, k);
        }
        for b in &spec.denominators {
            let f = 1.0 - b * q.powi(k as i32);
            if f.norm() <= 1e-14 {
                return Err(Error::ZeroDenominator(k as usize + 1));
            }
            step /= f;
        }
        ratio *= step;
        if terms.is_none() && ratio == zero {
            return Ok((acc.value(), magnitude.value()));
        }
    }
    if terms.is_some() {
        Ok((acc.value(), magnitude.value()))
    } else {
        Err(Error::NonConvergence {
            what: "basic hypergeometric series",
            terms: policy.max_terms(),
        })
    }
}

/// Evaluates the basic hypergeometric series `r phi s`.
pub fn phi_rs(spec: &SeriesSpec, policy: &TruncationPolicy) -> Result<Complex64> {
    phi_rs_with_scale(spec, policy).map(|(v, _)| v)
}

/// [`phi_rs`] together with `sum_k |term_k|`, the scale against which the
/// rounding error of an alternating sum should be judged.
pub fn phi_rs_with_scale(spec: &SeriesSpec, policy: &TruncationPolicy) -> Result<(Complex64, f64)> {
    if let Some(n) = spec.terminates_at() {
        return accumulate(spec, Some(n + 1), policy);
    }
    let r = spec.numerators.len();
    let s = spec.denominators.len();
    if r > s + 1 {
        return Err(Error::Divergence(format!(
            "non-terminating {r}phi{s} has zero radius of convergence"
        )));
    }
    if r == s + 1 && spec.argument.norm() >= 1.0 {
        return Err(Error::Divergence(format!(
            "non-terminating {r}phi{s} needs |argument| < 1, got {}",
            spec.argument.norm()
        )));
    }
    accumulate(spec, None, policy)
}

fn non_positive_integer(a: f64) -> Option<u32> {
    (a <= 0.0 && a.fract() == 0.0 && a >= -f64::from(u32::MAX)).then(|| (-a) as u32)
}

/// Evaluates the classical hypergeometric series `r F s` at real `x`.
pub fn f_rs(numerators: &[f64], denominators: &[f64], x: f64, policy: &TruncationPolicy) -> Result<f64> {
    let terminate = numerators.iter().filter_map(|&a| non_positive_integer(a)).min();
    let r = numerators.len();
    let s = denominators.len();
    if terminate.is_none() {
        if r > s + 1 && x != 0.0 {
            return Err(Error::Divergence(format!("non-terminating {r}F{s} diverges for x != 0")));
        }
        if r == s + 1 && x.abs() >= 1.0 {
            return Err(Error::Divergence(format!("non-terminating {r}F{s} needs |x| < 1")));
        }
    }
    let limit = match terminate {
        Some(n) => n as usize + 1,
        None => policy.max_terms(),
    };
    let mut acc = CompensatedSum::new();
    let mut term = 1.0;
    let mut small_run = 0;
    for k in 0..limit {
        acc.add(term);
        if terminate.is_none() {
            if term.abs() <= policy.tol() * acc.value().abs() {
                small_run += 1;
                if small_run >= 2 {
                    return Ok(acc.value());
                }
            } else {
                small_run = 0;
            }
        }
        let kf = k as f64;
        let mut step = x / (kf + 1.0);
        for &a in numerators {
            step *= a + kf;
        }
        for &b in denominators {
            if b + kf == 0.0 {
                if k + 1 < limit {
                    return Err(Error::ZeroDenominator(k + 1));
                }
                return Ok(acc.value());
            }
            step /= b + kf;
        }
        term *= step;
        if term == 0.0 && terminate.is_none() {
            return Ok(acc.value());
        }
    }
    if terminate.is_some() {
        Ok(acc.value())
    } else {
        Err(Error::NonConvergence {
            what: "hypergeometric series",
            terms: policy.max_terms(),
        })
    }
}

/// Wall (little q-Laguerre) polynomial `P_n(x; a | q) = 2phi1(q^{-n}, 0; aq | q; qx)`.
pub fn wall(n: u32, x: f64, a: f64, q: f64) -> Result<f64> {
    check_q(q)?;
    let mut acc = CompensatedSum::new();
    let mut term = 1.0;
    for k in 0..=n {
        acc.add(term);
        if k == n {
            break;
        }
        let den = 1.0 - a * q.powi(k as i32 + 1);
        if den.abs() <= 1e-14 {
            return Err(Error::ZeroDenominator(k as usize + 1));
        }
        term *= (1.0 - q.powi(k as i32 - n as i32)) * q * x / (den * (1.0 - q.powi(k as i32 + 1)));
    }
    Ok(acc.value())
}

/// `(aq;q)_n P_n(x; a | q)` at `a = q^{a_exp}`.
///
/// This is a polynomial in `a` and stays finite where `P_n` has a pole
/// (`a = q^{-N}`, `1 <= N <= n`). The exponent is kept symbolic so the
/// factor `1 - q^{-N} q^N` is exactly zero.
///
/// The alternating sum can cancel by twelve orders of magnitude or more
/// (`q = 0.99`, `n = 10`, large `a_exp`), so it is carried in double-double.
pub fn wall_scaled(n: u32, x: f64, a_exp: i32, q: f64) -> Result<f64> {
    check_q(q)?;
    let one = TwoFloat::from(1.0);
    let qq = TwoFloat::from(q);
    let qx = qq * x;
    let ni = n as i32;
    let pow = |e: i32| if e >= 0 { qq.powi(e) } else { dd_div(one, qq.powi(-e)) };
    // suffix[k] = (a q^{k+1}; q)_{n-k}
    let mut suffix = vec![one; n as usize + 1];
    for k in (0..n as usize).rev() {
        suffix[k] = suffix[k + 1] * (one - pow(a_exp + k as i32 + 1));
    }
    let mut acc = TwoFloat::from(0.0);
    let mut c = one;
    for k in 0..=ni {
        acc += c * suffix[k as usize];
        c = dd_div(c * (one - pow(k - ni)) * qx, one - pow(k + 1));
    }
    Ok(f64::from(acc))
}

/// Double-double quotient with one Newton correction; `TwoFloat`'s own
/// division is only accurate to about one double ulp.
fn dd_div(a: TwoFloat, b: TwoFloat) -> TwoFloat {
    let y = a / b;
    y + f64::from(a - b * y) / f64::from(b)
}

/// Generalized Laguerre polynomial `L_n^{(alpha)}(x)`.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > -1.0) {
        return domain(format!("Laguerre parameter alpha = {alpha} must exceed -1"));
    }
    // (alpha+1)_n / n!
    let mut lead = 1.0;
    for i in 0..n {
        lead *= (alpha + 1.0 + f64::from(i)) / f64::from(i + 1);
    }
    let mut acc = CompensatedSum::new();
    let mut term = lead;
    for j in 0..=n {
        acc.add(term);
        let jf = f64::from(j);
        term *= (jf - f64::from(n)) * x / ((alpha + 1.0 + jf) * (jf + 1.0));
    }
    Ok(acc.value())
}

/// The 2D complex q-Hermite polynomial `H_{m,j}(z, zeta | q)`.
pub fn hermite2d(m: u32, j: u32, z: Complex64, zeta: Complex64, q: f64) -> Result<Complex64> {
    check_q(q)?;
    let mut acc = CompensatedComplexSum::new();
    for k in 0..=m.min(j) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let coeff = q_binomial(m, k, q)? * q_binomial(j, k, q)? * sign * q_pow_binom2(q, k) * q_pochhammer(q, q, k);
        acc.add(coeff * z.powu(m - k) * zeta.powu(j - k));
    }
    Ok(acc.value())
}
