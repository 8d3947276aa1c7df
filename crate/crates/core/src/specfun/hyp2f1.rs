use num_complex::Complex64;

use super::gamma::{log_gamma, pochhammer};
use crate::error::{Error, Result};

/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 10_000;

/// Terms below this fraction of the running sum count as negligible.
const TERM_TOL: f64 = 1e-17;

/// Largest tolerated ratio between the biggest partial sum and the result.
pub const CANCELLATION_LIMIT: f64 = 1e5;

/// A complex number held as `exp(ln_scale) * mantissa`, so that values far
/// outside the double range can be carried through products.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub ln_scale: Complex64,
    pub mantissa: Complex64,
}

impl Scaled {
    pub fn zero() -> Self {
        Self {
            ln_scale: Complex64::new(0.0, 0.0),
            mantissa: Complex64::new(0.0, 0.0),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return self.mantissa;
        }
        self.ln_scale.exp() * self.mantissa
    }

    /// Multiplies by `exp(l)`.
    pub fn times_exp(mut self, l: Complex64) -> Self {
        self.ln_scale += l;
        self
    }
}

fn nonpositive_integer(c: Complex64) -> Option<u64> {
    (c.im == 0.0 && c.re <= 0.0 && c.re.fract() == 0.0).then(|| (-c.re) as u64)
}

/// `Σ_k (a)_k (b)_k t^k / (k! Γ(c + k))` for real `t` with `|t| < 1`.
///
/// When `c` is a nonpositive integer the terms with `c + k ≤ 0` vanish and
/// summation starts at `k = 1 - c`.
fn regularized_series(a: Complex64, b: Complex64, c: Complex64, t: f64) -> Result<Scaled> {
    let (s, max_partial) = regularized_series_raw(a, b, c, t)?;
    let magnitude = s.mantissa.norm();
    if max_partial > CANCELLATION_LIMIT * magnitude {
        return Err(Error::Accuracy {
            context: "hypergeometric series lost precision to cancellation",
            attained: f64::EPSILON * max_partial / magnitude,
        });
    }
    Ok(s)
}

/// [`regularized_series`] without the cancellation check. Also returns the
/// largest partial sum in units of the scale, so `ε` times it bounds the
/// rounding error of the mantissa.
pub(crate) fn regularized_series_raw(a: Complex64, b: Complex64, c: Complex64, t: f64) -> Result<(Scaled, f64)> {
    if t.abs() >= 1.0 || !t.is_finite() {
        return Err(Error::Domain(format!("series argument {t} outside (-1, 1)")));
    }
    let k0 = nonpositive_integer(c).map_or(0, |m| m + 1);
    let first_a = pochhammer(a, k0);
    let first_b = pochhammer(b, k0);
    let zero = Complex64::new(0.0, 0.0);
    if first_a == zero || first_b == zero || (t == 0.0 && k0 > 0) {
        return Ok((Scaled::zero(), 0.0));
    }
    let ln_first = first_a.ln() + first_b.ln() - super::ln_factorial(k0) - log_gamma(c + k0 as f64)?
        + if k0 > 0 {
            Complex64::new(k0 as f64, 0.0) * Complex64::new(t, 0.0).ln()
        } else {
            zero
        };
    if t == 0.0 {
        let one = Scaled {
            ln_scale: ln_first,
            mantissa: Complex64::new(1.0, 0.0),
        };
        return Ok((one, 1.0));
    }

    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut max_partial = 1.0f64;
    let mut small_run = 0;
    let mut k = k0;
    loop {
        let kf = k as f64;
        let num = (a + kf) * (b + kf);
        if num == zero {
            break;
        }
        term *= num * t / ((kf + 1.0) * (c + kf));
        sum += term;
        k += 1;
        max_partial = max_partial.max(sum.norm());
        if term.norm() <= TERM_TOL * sum.norm() {
            small_run += 1;
            if small_run == 3 {
                break;
            }
        } else {
            small_run = 0;
        }
        if (k - k0) as usize >= MAX_TERMS {
            return Err(Error::Accuracy {
                context: "hypergeometric series did not converge",
                attained: term.norm() / sum.norm(),
            });
        }
    }
    let s = Scaled {
        ln_scale: ln_first,
        mantissa: sum,
    };
    Ok((s, max_partial))
}

/// Regularized `F(a, b; c; w) / Γ(c)` for `w ≤ 0`, in scaled form.
///
/// Always evaluated through the Pfaff transformation
/// `F(a, b; c; w) = (1 - w)^{-a} F(a, c - b; c; w / (w - 1))`, whose series
/// argument lies in `[0, 1)` for every `w ≤ 0`.
pub fn hyp2f1_reg_scaled(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Scaled> {
    if !(w <= 0.0) {
        return Err(Error::Domain(format!("hyp2f1_reg requires w <= 0, got {w}")));
    }
    let xi = w / (w - 1.0);
    let s = regularized_series(a, c - b, c, xi)?;
    // (1 - w)^{-a} = (1 - xi)^{a}
    Ok(s.times_exp(a * (1.0 - xi).ln()))
}

/// Regularized `F(a, b; c; w) / Γ(c)` for `w ≤ 0`.
pub fn hyp2f1_reg(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Complex64> {
    Ok(hyp2f1_reg_scaled(a, b, c, w)?.value())
}

/// Regularized `F(a, b; c; w) / Γ(c)` by the defining series in `w`, for
/// `|w| < 1`. Independent of the Pfaff route used by [`hyp2f1_reg`].
pub fn hyp2f1_reg_direct(a: Complex64, b: Complex64, c: Complex64, w: f64) -> Result<Complex64> {
    Ok(regularized_series(a, b, c, w)?.value())
}
