use crate::error::{domain, Result};
use crate::hypergeom::wall_scaled;
use crate::qcalc::q_pochhammer;
use crate::sum::CompensatedSum;

use super::GenEulerParams;

/// The finite part of the p.g.f. series split, summed termwise for
/// `j < m`:
///
/// `sum_j t^j [q^{2C(j,2)} x^{m-j} W(j, q^{m-j})^2 - q^{2C(m,2)} x^{j-m} W(m, q^{j-m})^2] / (q^{mj} (q;q)_j)`
///
/// with `x = (1-q) lambda` and `W(n, a) = (aq;q)_n P_n(x; a|q)`. The Wall
/// reflection makes each bracket vanish, so the result should be zero.
pub fn finite_block(t: f64, params: &GenEulerParams) -> Result<f64> {
    let (q, m, x) = (params.q(), params.m(), params.xi());
    if m > 0 && x == 0.0 {
        return domain("finite block needs lambda > 0 when m >= 1");
    }
    let mut acc = CompensatedSum::new();
    let mi = m as i32;
    for j in 0..m {
        let ji = j as i32;
        let scale = t.powi(ji) / (q.powi(mi * ji) * q_pochhammer(q, q, j));
        let w1 = wall_scaled(j, x, mi - ji, q)?;
        let w2 = wall_scaled(m, x, ji - mi, q)?;
        acc.add(scale * q.powi(ji * (ji - 1)) * x.powi(mi - ji) * w1 * w1);
        acc.add(-scale * q.powi(mi * (mi - 1)) * x.powi(ji - mi) * w2 * w2);
    }
    Ok(acc.value())
}
