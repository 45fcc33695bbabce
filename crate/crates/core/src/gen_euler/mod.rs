//! The generalized Euler distribution of index `m`.
//!
//! Every statistic depends on the coherent-state label `z` only through
//! `lambda = |z|^2`; the phase enters [`coefficient`] alone.

mod finite_block;
mod sample;

pub use finite_block::finite_block;
pub use sample::SampleStream;

use num_complex::Complex64;

use crate::error::{domain, Error, Result};
use crate::hypergeom::{laguerre, wall_scaled};
use crate::qcalc::{
    check_q, ln_q_pochhammer_infinite, q_number, q_pochhammer, q_pochhammer_infinite_real, TruncationPolicy,
};
use crate::sum::CompensatedSum;

pub const MAX_M: u32 = 60;
pub const MIN_Q: f64 = 0.05;

/// Largest finite `ln` of an `f64`.
const LN_MAX: f64 = 709.782712893384;

/// The triple `(q, m, lambda)` with `0 <= lambda < q^m/(1-q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenEulerParams {
    q: f64,
    m: u32,
    lambda: f64,
    ln_norm: f64,
}

impl GenEulerParams {
    pub fn new(q: f64, m: u32, lambda: f64) -> Result<Self> {
        if !(q >= MIN_Q && q < 1.0) {
            return domain(format!("q = {q} outside [{MIN_Q}, 1)"));
        }
        if m > MAX_M {
            return domain(format!("m = {m} exceeds {MAX_M}"));
        }
        let max = domain_max(q, m);
        if !(lambda >= 0.0 && lambda < max) {
            return domain(format!("lambda = {lambda} outside [0, {max})"));
        }
        let ln_norm = ln_normalization(q, m, lambda)?;
        Ok(GenEulerParams { q, m, lambda, ln_norm })
    }

    /// Parametrize by the coherent-state label.
    pub fn from_z(q: f64, m: u32, z: Complex64) -> Result<Self> {
        Self::new(q, m, z.norm_sqr())
    }

    /// Parametrize by `|z|`.
    pub fn from_zmod(q: f64, m: u32, r: f64) -> Result<Self> {
        if !(r >= 0.0) {
            return domain(format!("|z| = {r} must be non-negative"));
        }
        Self::new(q, m, r * r)
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `xi = (1-q) lambda`.
    pub fn xi(&self) -> f64 {
        (1.0 - self.q) * self.lambda
    }

    pub fn domain_max(&self) -> f64 {
        domain_max(self.q, self.m)
    }
}

/// Upper end `q^m/(1-q)` of the lambda-domain.
pub fn domain_max(q: f64, m: u32) -> f64 {
    q.powi(m as i32) / (1.0 - q)
}

/// `ln N = ln (q^{1-m} xi;q)_m - m ln q - ln (q^{-m} xi;q)_inf`; all factors
/// are positive on the domain.
fn ln_normalization(q: f64, m: u32, lambda: f64) -> Result<f64> {
    let xi = (1.0 - q) * lambda;
    let mut acc = CompensatedSum::new();
    for k in 0..m {
        acc.add((-q.powi(1 - m as i32 + k as i32) * xi).ln_1p());
    }
    acc.add(-f64::from(m) * q.ln());
    acc.add(-ln_q_pochhammer_infinite(q.powi(-(m as i32)) * xi, q, &TruncationPolicy::default())?);
    Ok(acc.value())
}

/// The normalization factor `N_{q,m}(lambda)`.
pub fn normalization(lambda: f64, q: f64, m: u32) -> Result<f64> {
    Ok(GenEulerParams::new(q, m, lambda)?.ln_norm.exp())
}

/// `ln` of the positive factor `q^{2C(n,2) - mj} xi^d / ((q;q)_j (q;q)_m)`
/// shared by the coefficient and the PMF, with `n = min`, `d = |m-j|`.
/// `None` when `xi = 0` and `d > 0`.
fn ln_prefactor(j: u32, m: u32, xi: f64, q: f64) -> Option<f64> {
    let n = m.min(j);
    let d = m.abs_diff(j);
    let ln_xi = if d == 0 {
        0.0
    } else if xi == 0.0 {
        return None;
    } else {
        f64::from(d) * xi.ln()
    };
    // q^{2C(n,2) - mj} in one exponent so q^{-mj} never overflows alone
    let expo = f64::from(n) * (f64::from(n) - 1.0) - f64::from(m) * f64::from(j);
    Some(expo * q.ln() + ln_xi - q_pochhammer(q, q, j).ln() - q_pochhammer(q, q, m).ln())
}

/// `(q;q)_{max}/(q;q)_d P_n(xi; q^d | q)`.
fn wall_factor(j: u32, m: u32, xi: f64, q: f64) -> Result<f64> {
    wall_scaled(m.min(j), xi, m.abs_diff(j) as i32, q)
}

/// The coherent-state coefficient `C_j^{q,m}(z)`, including the phase
/// `exp(i (m-j) arg z)`.
pub fn coefficient(j: u32, z: Complex64, q: f64, m: u32) -> Result<Complex64> {
    check_q(q)?;
    let xi = (1.0 - q) * z.norm_sqr();
    let Some(ln_pre) = ln_prefactor(j, m, xi, q) else {
        return Ok(Complex64::new(0.0, 0.0));
    };
    let ln_mag = 0.5 * ln_pre;
    if ln_mag > LN_MAX {
        return Err(Error::Overflow(format!("coefficient j={j}, m={m} exceeds double range")));
    }
    let n = m.min(j);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let real = sign * ln_mag.exp() * wall_factor(j, m, xi, q)?;
    let phase = (f64::from(m) - f64::from(j)) * z.arg();
    Ok(Complex64::from_polar(1.0, phase) * real)
}

/// Probability `p_j(lambda; q, m)`.
pub fn pmf(j: u32, params: &GenEulerParams) -> Result<f64> {
    let (q, m) = (params.q, params.m);
    let Some(ln_pre) = ln_prefactor(j, m, params.xi(), q) else {
        return Ok(0.0);
    };
    let w = wall_factor(j, m, params.xi(), q)?;
    let p = (ln_pre - params.ln_norm).exp() * w * w;
    if !p.is_finite() {
        return Err(Error::Overflow(format!("pmf j={j}, m={m}")));
    }
    Ok(p)
}

/// A truncated PMF `p_0..p_J` with a bound on the omitted mass.
#[derive(Debug, Clone, PartialEq)]
pub struct PmfTable {
    params: GenEulerParams,
    probs: Vec<f64>,
    tail_bound: f64,
}

impl PmfTable {
    pub fn params(&self) -> &GenEulerParams {
        &self.params
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Compensated `sum_j p_j` over the table.
    pub fn total(&self) -> f64 {
        self.probs.iter().copied().collect::<CompensatedSum>().value()
    }

    /// Running sums of the table.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = CompensatedSum::new();
        self.probs
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect()
    }
}

/// Largest index a table may reach.
pub fn table_cap(m: u32) -> usize {
    100 * (m as usize + 1) + 1000
}

/// Majorant for the mass beyond index `j >= m`.
///
/// For `j >= m`, `p_j = A rho^j / (q;q)_j W_j^2` with `rho = q^{-m} xi` and
/// `W_j = sum_k c_k (q^{d+k+1};q)_{m-k}`, `d = j - m`. Since
/// `|(q^{d+k+1};q)_{m-k} - 1| <= q^{d+1} [m]_q`, every `|W_i|`, `i > j`, is
/// at most `|W_inf| + B q^{d+2} [m]_q` with `W_inf = sum c_k` and
/// `B = sum |c_k|`. The ratio `rho / (1 - q^{i+1})` of `rho^i / (q;q)_i`
/// decreases in `i`, so the remaining sum is geometric.
struct TailMajorant {
    ln_a: f64,
    ln_rho: f64,
    w_inf: f64,
    w_abs: f64,
    q_int_m: f64,
}

impl TailMajorant {
    fn new(params: &GenEulerParams) -> Self {
        let (q, m, xi) = (params.q, params.m, params.xi());
        let mut w_inf = CompensatedSum::new();
        let mut w_abs = 0.0;
        let mut c = 1.0;
        for k in 0..=m {
            w_inf.add(c);
            w_abs += c.abs();
            c *= (1.0 - q.powi(k as i32 - m as i32)) * q * xi / (1.0 - q.powi(k as i32 + 1));
        }
        let mf = f64::from(m);
        TailMajorant {
            ln_a: mf * (mf - 1.0) * q.ln() - mf * xi.ln() - q_pochhammer(q, q, m).ln() - params.ln_norm,
            ln_rho: xi.ln() - mf * q.ln(),
            w_inf: w_inf.value().abs(),
            w_abs,
            q_int_m: q_int(m, q),
        }
    }

    /// Bound on `sum_{i > j} p_i`, or `None` while the ratio is not yet
    /// below one.
    fn bound(&self, j: usize, q: f64, m: u32) -> Option<f64> {
        let next = j as i32 + 1;
        let r = self.ln_rho.exp() / (1.0 - q.powi(next + 1));
        if !(r < 1.0) {
            return None;
        }
        let d = next - m as i32;
        let w = self.w_inf + self.w_abs * q.powi(d + 1) * self.q_int_m;
        let ln_u = f64::from(next) * self.ln_rho - q_pochhammer(q, q, next as u32).ln();
        Some((self.ln_a + 2.0 * w.ln() + ln_u).exp() / (1.0 - r))
    }
}

/// Tabulate `p_0..p_J`, stopping once a geometric bound on the omitted
/// mass falls below `tol`.
pub fn pmf_table(params: &GenEulerParams, tol: f64) -> Result<PmfTable> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return domain(format!("table tolerance {tol} outside (0, 1e-3]"));
    }
    let m = params.m as usize;
    if params.lambda == 0.0 {
        let mut probs = vec![0.0; m + 1];
        probs[m] = 1.0;
        return Ok(PmfTable { params: *params, probs, tail_bound: 0.0 });
    }
    let tail = TailMajorant::new(params);
    let mut probs = Vec::new();
    for j in 0..=table_cap(params.m) {
        probs.push(pmf(j as u32, params)?);
        if j < m {
            continue;
        }
        if let Some(tail_bound) = tail.bound(j, params.q, params.m) {
            if tail_bound < tol {
                return Ok(PmfTable { params: *params, probs, tail_bound });
            }
        }
    }
    Err(Error::NonConvergence {
        what: "pmf table tail",
        terms: table_cap(params.m),
    })
}

/// Default table tolerance for moments, CDF and sampling.
pub const DEFAULT_TABLE_TOL: f64 = 1e-13;

/// Probability generating function `E[t^X]`, `|t| <= 1`, in closed form: a
/// ratio of infinite products times an `(m+1)`-term sum.
pub fn pgf(t: f64, params: &GenEulerParams) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return domain(format!("p.g.f. needs |t| <= 1, got {t}"));
    }
    if t == 0.0 {
        return pmf(0, params);
    }
    let (q, m, xi) = (params.q, params.m, params.xi());
    let policy = TruncationPolicy::default();
    let qm = q.powi(-(m as i32));
    let ratio = q_pochhammer_infinite_real(qm * xi, q, &policy)? / q_pochhammer_infinite_real(qm * t * xi, q, &policy)?;
    Ok(ratio * terminating_sum(t, params))
}

/// `t^m 3phi2(q^{-m}, q/t, t; q^{1-m} xi, q | q; q xi)`, with `t^m (q/t;q)_k`
/// merged into `t^{m-k} prod_{i<k} (t - q^{i+1})` so small `t` stays stable.
fn terminating_sum(t: f64, params: &GenEulerParams) -> f64 {
    let (q, m, xi) = (params.q, params.m, params.xi());
    let mut acc = CompensatedSum::new();
    // prod_{i<k} (t - q^{i+1}) (q^{-m};q)_k (t;q)_k (q xi)^k / ((q^{1-m} xi;q)_k (q;q)_k^2)
    let mut c = 1.0;
    for k in 0..=m {
        acc.add(t.powi((m - k) as i32) * c);
        if k == m {
            break;
        }
        let ki = k as i32;
        let qk1 = q.powi(ki + 1);
        c *= (t - qk1) * (1.0 - q.powi(ki - m as i32)) * (1.0 - t * q.powi(ki)) * q * xi
            / ((1.0 - q.powi(1 - m as i32 + ki) * xi) * (1.0 - qk1) * (1.0 - qk1));
    }
    acc.value()
}

/// `sum_j t^j p_j` over an adaptive table; the brute-force p.g.f. oracle.
pub fn pgf_bruteforce(t: f64, params: &GenEulerParams, tol: f64) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return domain(format!("p.g.f. needs |t| <= 1, got {t}"));
    }
    let table = pmf_table(params, tol)?;
    Ok(power_sum(t, table.probs()))
}

/// `sum_j t^j p_j`.
pub(crate) fn power_sum(t: f64, probs: &[f64]) -> f64 {
    let mut acc = CompensatedSum::new();
    let mut tj = 1.0;
    for &p in probs {
        acc.add(tj * p);
        tj *= t;
    }
    acc.value()
}

/// `ln n!`.
fn ln_factorial(n: u32) -> f64 {
    (2..=n).map(|i| f64::from(i).ln()).sum()
}

/// The `q -> 1` limit of the PMF, a generalized Poisson law:
/// `lambda^d e^{-lambda}/j! ((m^j)! L_{m^j}^{(d)}(lambda)/sqrt(m!))^2`.
pub fn pmf_classical_limit(j: u32, lambda: f64, m: u32) -> Result<f64> {
    if !(lambda >= 0.0) {
        return domain(format!("lambda = {lambda} must be non-negative"));
    }
    let n = m.min(j);
    let d = m.abs_diff(j);
    let ln_pow = if d == 0 {
        0.0
    } else if lambda == 0.0 {
        return Ok(0.0);
    } else {
        f64::from(d) * lambda.ln()
    };
    let l = laguerre(n, f64::from(d), lambda)?;
    let ln_pre = ln_pow - lambda - ln_factorial(j) + 2.0 * ln_factorial(n) - ln_factorial(m);
    Ok(ln_pre.exp() * l * l)
}

/// The `q -> 1` limit of the p.g.f.:
/// `t^m exp(lambda (t-1)) L_m^{(0)}(lambda (2 - t - 1/t))`.
pub fn pgf_classical_limit(t: f64, lambda: f64, m: u32) -> Result<f64> {
    if !(t.abs() <= 1.0) {
        return domain(format!("p.g.f. needs |t| <= 1, got {t}"));
    }
    if t.abs() < 1e-8 {
        return domain(format!("classical p.g.f. is singular at t = {t}"));
    }
    if !(lambda >= 0.0) {
        return domain(format!("lambda = {lambda} must be non-negative"));
    }
    let l = laguerre(m, 0.0, lambda * (2.0 - t - 1.0 / t))?;
    Ok(t.powi(m as i32) * (lambda * (t - 1.0)).exp() * l)
}

/// `E[[X]_q] = lambda + [m]_q`.
pub fn mean(params: &GenEulerParams) -> f64 {
    params.lambda + q_int(params.m, params.q)
}

/// `Var[[X]_q] = lambda^2 q^m (1 + q - 2q^{-m}) + lambda q^m (2[m]_q + q^m)`.
pub fn variance(params: &GenEulerParams) -> f64 {
    let (q, m, l) = (params.q, params.m, params.lambda);
    let qm = q.powi(m as i32);
    l * l * qm * (1.0 + q - 2.0 / qm) + l * qm * (2.0 * q_int(m, q) + qm)
}

/// Mandel parameter `(Var - E)/E` of `[X]_q`.
pub fn mandel_q(params: &GenEulerParams) -> Result<f64> {
    let mu = mean(params);
    if mu == 0.0 {
        return Err(Error::DivisionByZero("Mandel parameter at m = 0, lambda = 0"));
    }
    Ok((variance(params) - mu) / mu)
}

/// `[m]_q` for the validated `q`.
pub(crate) fn q_int(m: u32, q: f64) -> f64 {
    q_number(f64::from(m), q).expect("q validated by GenEulerParams")
}

/// `P(X <= j)` from a running sum of the PMF.
pub fn cdf(j: u32, params: &GenEulerParams) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for i in 0..=j {
        acc.add(pmf(i, params)?);
    }
    Ok(acc.value())
}

/// Smallest `j` with `cdf(j) > u`. When `u` exceeds the tabulated mass the
/// first index past the table is returned.
pub fn quantile(u: f64, params: &GenEulerParams) -> Result<u32> {
    if !(0.0..1.0).contains(&u) {
        return domain(format!("quantile level {u} outside [0, 1)"));
    }
    let table = pmf_table(params, DEFAULT_TABLE_TOL)?;
    Ok(quantile_in(&table.cumulative(), u))
}

pub(crate) fn quantile_in(cumulative: &[f64], u: f64) -> u32 {
    cumulative.partition_point(|&c| c <= u) as u32
}
