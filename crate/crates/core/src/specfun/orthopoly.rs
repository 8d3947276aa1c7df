//! Meixner and Krawtchouk polynomials, their weights and orthonormal versions.

use serde::{Deserialize, Serialize};

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use super::gamma::{ln_factorial, ln_gamma_signed};
use crate::error::{Error, Result};

/// Parameters `(β, ξ)` of the Meixner weight `(β)_x ξ^x / x!` on `Z_+`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeixnerParams {
    beta: f64,
    xi: f64,
}

impl MeixnerParams {
    pub fn new(beta: f64, xi: f64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("Meixner beta must be positive, got {beta}")));
        }
        if !(xi > 0.0 && xi < 1.0) {
            return Err(Error::Domain(format!("Meixner xi must lie in (0,1), got {xi}")));
        }
        Ok(Self { beta, xi })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }
}

/// Parameters `(p, L)` of the binomial weight on `{0, …, L}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KrawtchoukParams {
    p: f64,
    big_l: u32,
}

impl KrawtchoukParams {
    pub fn new(p: f64, big_l: u32) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!("Krawtchouk p must lie in (0,1), got {p}")));
        }
        if big_l == 0 {
            return Err(Error::Domain("Krawtchouk L must be positive".into()));
        }
        Ok(Self { p, big_l })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// The number of lattice sites is `L + 1`.
    pub fn big_l(&self) -> u32 {
        self.big_l
    }
}

/// Rounding error tolerated before the terminating sum is redone exactly.
const MEIXNER_SUM_TOL: f64 = 1e-14;

/// Terminating `F(-n, -x; β; 1 - 1/ξ)` for any real `β` such that
/// `(β)_k ≠ 0` for `k ≤ min(n, x)`.
///
/// For `ξ < 1` the terms alternate. When their moduli dwarf the sum, the
/// sum is recomputed in exact rational arithmetic from the binary values of
/// `β` and `ξ`, so the result is then correctly rounded.
pub(crate) fn meixner_poly(n: u32, x: u32, beta: f64, xi: f64) -> f64 {
    let (sum, err) = meixner_sum(n, x, beta, xi);
    if err <= MEIXNER_SUM_TOL * sum.abs() {
        return sum;
    }
    meixner_poly_exact(n, x, beta, xi).unwrap_or(sum)
}

/// Floating-point terminating sum and a bound on its rounding error.
fn meixner_sum(n: u32, x: u32, beta: f64, xi: f64) -> (f64, f64) {
    let arg = 1.0 - 1.0 / xi;
    let top = n.min(x);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut abs_sum = 1.0;
    for k in 0..top {
        let kf = k as f64;
        term *= (kf - n as f64) * (kf - x as f64) * arg / ((beta + kf) * (kf + 1.0));
        sum += term;
        abs_sum += term.abs();
    }
    (sum, 4.0 * (top as f64 + 1.0) * f64::EPSILON * abs_sum)
}

fn meixner_poly_exact(n: u32, x: u32, beta: f64, xi: f64) -> Option<f64> {
    let beta = BigRational::from_float(beta)?;
    let xi = BigRational::from_float(xi)?;
    let one = BigRational::one();
    let arg = &one - one.clone() / xi;
    let mut term = one.clone();
    let mut sum = one;
    for k in 0..n.min(x) {
        let kr = BigRational::from_integer(k.into());
        let num = (&kr - BigRational::from_integer(n.into())) * (&kr - BigRational::from_integer(x.into())) * &arg;
        let den = (&beta + &kr) * (&kr + BigRational::one());
        term = term * num / den;
        sum += &term;
    }
    sum.to_f64()
}

/// Meixner polynomial `M_n(x; β, ξ)`.
pub fn meixner(n: u32, x: u32, prm: &MeixnerParams) -> f64 {
    meixner_poly(n, x, prm.beta, prm.xi)
}

/// `ln W(x) = ln Γ(β + x) - ln Γ(β) - ln x! + x ln ξ`.
pub fn ln_meixner_weight(x: u32, prm: &MeixnerParams) -> f64 {
    let (lg_bx, _) = ln_gamma_signed(prm.beta + x as f64).expect("beta > 0");
    let (lg_b, _) = ln_gamma_signed(prm.beta).expect("beta > 0");
    lg_bx - lg_b - ln_factorial(x as u64) + x as f64 * prm.xi.ln()
}

/// Meixner weight `Γ(β + x) ξ^x / (Γ(β) x!)`.
pub fn meixner_weight(x: u32, prm: &MeixnerParams) -> f64 {
    ln_meixner_weight(x, prm).exp()
}

/// `ln ‖M_n‖^{-2} = ln(ξ^n (1-ξ)^β (β)_n / n!)`.
fn ln_meixner_inv_norm_sq(n: u32, prm: &MeixnerParams) -> f64 {
    let (lg_bn, _) = ln_gamma_signed(prm.beta + n as f64).expect("beta > 0");
    let (lg_b, _) = ln_gamma_signed(prm.beta).expect("beta > 0");
    n as f64 * prm.xi.ln() + prm.beta * (1.0 - prm.xi).ln() + lg_bn - lg_b - ln_factorial(n as u64)
}

/// Orthonormal signed Meixner function `(-1)^n M_n(x) √W(x) / ‖M_n‖`.
pub fn meixner_tilde(n: u32, x: u32, prm: &MeixnerParams) -> f64 {
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let scale = (0.5 * (ln_meixner_weight(x, prm) + ln_meixner_inv_norm_sq(n, prm))).exp();
    // the orthonormal values are at most one, so an absolute bound suffices
    let (mut poly, err) = meixner_sum(n, x, prm.beta, prm.xi);
    if err * scale > MEIXNER_SUM_TOL * 1e-2 {
        poly = meixner_poly_exact(n, x, prm.beta, prm.xi).unwrap_or(poly);
    }
    sign * poly * scale
}

fn check_krawtchouk_range(v: u32, prm: &KrawtchoukParams) -> Result<()> {
    if v > prm.big_l {
        return Err(Error::Domain(format!("{v} outside [0, {}]", prm.big_l)));
    }
    Ok(())
}

/// Krawtchouk polynomial `K_n(x; p, L) = M_n(x; -L, p/(p-1))`.
pub fn krawtchouk(n: u32, x: u32, prm: &KrawtchoukParams) -> Result<f64> {
    check_krawtchouk_range(n, prm)?;
    check_krawtchouk_range(x, prm)?;
    Ok(meixner_poly(n, x, -(prm.big_l as f64), prm.p / (prm.p - 1.0)))
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(n as u64) - ln_factorial(k as u64) - ln_factorial((n - k) as u64)
}

/// Binomial weight `C(L, x) p^x (1-p)^{L-x}`.
pub fn krawtchouk_weight(x: u32, prm: &KrawtchoukParams) -> Result<f64> {
    check_krawtchouk_range(x, prm)?;
    let l = prm.big_l;
    Ok((ln_binomial(l, x) + x as f64 * prm.p.ln() + (l - x) as f64 * (1.0 - prm.p).ln()).exp())
}

/// Orthonormal Krawtchouk function `K_n(x) √W(x) / ‖K_n‖`, with
/// `‖K_n‖² = ((1-p)/p)^n / C(L, n)`.
pub fn krawtchouk_tilde(n: u32, x: u32, prm: &KrawtchoukParams) -> Result<f64> {
    let k = krawtchouk(n, x, prm)?;
    let w = krawtchouk_weight(x, prm)?;
    let ln_norm_sq = n as f64 * ((1.0 - prm.p) / prm.p).ln() - ln_binomial(prm.big_l, n);
    Ok(k * (0.5 * (w.ln() - ln_norm_sq)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mp(beta: f64, xi: f64) -> MeixnerParams {
        MeixnerParams::new(beta, xi).unwrap()
    }

    #[test]
    fn meixner_trivial_values() {
        let prm = mp(1.7, 0.3);
        for x in 0..10 {
            assert_eq!(meixner(0, x, &prm), 1.0);
        }
        for n in 0..10 {
            assert_eq!(meixner(n, 0, &prm), 1.0);
        }
        // one-term expansion
        let want = 1.0 + (1.0 - 1.0 / 0.3) / 1.7;
        assert!((meixner(1, 1, &prm) - want).abs() < 1e-15);
    }

    #[test]
    fn meixner_weight_values() {
        let prm = mp(1.7, 0.3);
        assert!((meixner_weight(0, &prm) - 1.0).abs() < 1e-15);
        assert!((meixner_weight(1, &prm) - 1.7 * 0.3).abs() < 1e-15);
        let total: f64 = (0..=200).map(|x| meixner_weight(x, &prm)).sum();
        assert!((total - 0.7f64.powf(-1.7)).abs() < 1e-12 * total);
    }

    #[test]
    fn meixner_tilde_orthonormal() {
        let prm = mp(1.7, 0.3);
        assert!((meixner_tilde(0, 0, &prm) - 0.7f64.powf(0.85)).abs() < 1e-15);
        let g = |m, n| (0..=300).map(|x| meixner_tilde(m, x, &prm) * meixner_tilde(n, x, &prm)).sum::<f64>();
        assert!((g(1, 1) - 1.0).abs() < 1e-10);
        assert!(g(0, 1).abs() < 1e-10);
    }

    #[test]
    fn params_validation() {
        assert!(MeixnerParams::new(0.0, 0.3).is_err());
        assert!(MeixnerParams::new(1.0, 1.0).is_err());
        assert!(KrawtchoukParams::new(0.0, 3).is_err());
        assert!(KrawtchoukParams::new(0.5, 0).is_err());
    }

    #[test]
    fn krawtchouk_trivial_and_range() {
        let prm = KrawtchoukParams::new(0.4, 6).unwrap();
        for x in 0..=6 {
            assert_eq!(krawtchouk(0, x, &prm).unwrap(), 1.0);
            assert_eq!(krawtchouk(x, 0, &prm).unwrap(), 1.0);
        }
        assert!(matches!(krawtchouk(7, 0, &prm), Err(Error::Domain(_))));
        assert!(matches!(krawtchouk_weight(7, &prm), Err(Error::Domain(_))));
        assert!((krawtchouk_weight(0, &prm).unwrap() - 0.6f64.powi(6)).abs() < 1e-16);
        assert!((krawtchouk_weight(6, &prm).unwrap() - 0.4f64.powi(6)).abs() < 1e-16);
        let total: f64 = (0..=6).map(|x| krawtchouk_weight(x, &prm).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn krawtchouk_orthogonality() {
        let prm = KrawtchoukParams::new(0.4, 6).unwrap();
        for m in 0..=6 {
            for n in 0..=6 {
                let s: f64 = (0..=6)
                    .map(|x| {
                        krawtchouk(m, x, &prm).unwrap() * krawtchouk(n, x, &prm).unwrap() * krawtchouk_weight(x, &prm).unwrap()
                    })
                    .sum();
                if m != n {
                    assert!(s.abs() < 1e-12, "{m} {n} {s}");
                }
                let t: f64 = (0..=6)
                    .map(|x| krawtchouk_tilde(m, x, &prm).unwrap() * krawtchouk_tilde(n, x, &prm).unwrap())
                    .sum();
                let want = if m == n { 1.0 } else { 0.0 };
                assert!((t - want).abs() < 1e-12, "{m} {n} {t}");
            }
        }
    }
}
