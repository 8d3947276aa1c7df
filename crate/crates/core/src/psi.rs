//! The functions `ψ_a(x)` on the half-integer lattice: a real orthonormal
//! eigenbasis of a second order difference operator `D`, given by a Gauss
//! hypergeometric function and, alternatively, by a contour integral.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::HalfInt;
use crate::specfun::{ln_abs_gamma, log_gamma, regularized_series_raw};
use crate::zmeasure::{Series, ZParams};

/// Exponent beyond which a direct product of the factors would leave the
/// double range.
const LN_OVERFLOW: f64 = 700.0;

/// Absolute accuracy accepted for a value of `ψ` whose series cancels; every
/// value is an entry of an orthogonal matrix and so at most one in modulus.
pub const PSI_ABS_TOL: f64 = 1e-12;

/// Relative accuracy that accepts the series form without a second opinion.
const PSI_REL_TOL: f64 = 1e-12;

/// Contour `|ω| = radius` with a trapezoid rule of `nodes` points, doubled up
/// to `max_doublings` times.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    radius: f64,
    nodes: usize,
    max_doublings: u32,
}

impl QuadratureConfig {
    pub fn new(radius: f64, nodes: usize, max_doublings: u32) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!("contour radius must be positive, got {radius}")));
        }
        if nodes < 4 {
            return Err(Error::Config(format!("at least 4 quadrature nodes are needed, got {nodes}")));
        }
        if max_doublings == 0 {
            return Err(Error::Config("max_doublings must be positive".into()));
        }
        Ok(Self {
            radius,
            nodes,
            max_doublings,
        })
    }

    /// Unit circle, 256 nodes.
    pub fn single_contour() -> Self {
        Self {
            radius: 1.0,
            nodes: 256,
            max_doublings: 8,
        }
    }

    /// Radius `min(1.25, (1 + 1/√ξ)/2)`, 512 nodes per circle.
    pub fn double_contour(xi: f64) -> Self {
        Self {
            radius: (0.5 * (1.0 + 1.0 / xi.sqrt())).min(1.25),
            nodes: 512,
            max_doublings: 5,
        }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn max_doublings(&self) -> u32 {
        self.max_doublings
    }

    /// Checks `√ξ < radius < 1/√ξ`.
    pub fn check_admissible(&self, xi: f64) -> Result<()> {
        let s = xi.sqrt();
        if !(s < self.radius && self.radius * s < 1.0) {
            return Err(Error::Config(format!(
                "contour radius {} must lie in ({s}, {}) for xi = {xi}",
                self.radius,
                1.0 / s
            )));
        }
        Ok(())
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self::single_contour()
    }
}

/// A value of `ψ_a(x)` with a diagnostic flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PsiValue {
    pub value: f64,
    /// Whether some factor of the product was outside the double range, so
    /// that only the log-space assembly could produce the value.
    pub log_scale_used: bool,
}

/// How `ψ` is evaluated for a parameter point.
enum Route {
    Direct,
    /// Degenerate series with a positive integer parameter `N`.
    Truncated(i64),
    /// Degenerate series with a negative integer parameter; evaluated through
    /// `ψ_a(x; z, z') = (-1)^{x+a} ψ_{-a}(-x; -z, -z')`.
    Reflected,
}

fn route(prm: &ZParams) -> Result<Route> {
    match prm.series() {
        Series::Principal | Series::Complementary => Ok(Route::Direct),
        Series::Degenerate => match prm.degenerate_integer() {
            Some(n) if n > 0 => Ok(Route::Truncated(n)),
            _ => Ok(Route::Reflected),
        },
        Series::SecondDegenerate => Err(Error::Domain(
            "psi is defined only for 0 < xi < 1; use the Krawtchouk kernel for xi < 0".into(),
        )),
    }
}

fn parity_sign(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `ψ_a(x; z, z', ξ)`.
pub fn psi(a: HalfInt, x: HalfInt, prm: &ZParams) -> Result<f64> {
    Ok(psi_value(a, x, prm)?.value)
}

/// `ψ_a(x; z, z', ξ)` with the assembly diagnostic.
pub fn psi_value(a: HalfInt, x: HalfInt, prm: &ZParams) -> Result<PsiValue> {
    match route(prm)? {
        Route::Direct => psi_series(a, x, prm),
        Route::Truncated(n) => {
            if x.twice() < 1 - 2 * n {
                return Err(Error::Domain(format!(
                    "x = {x} below the support -N + 1/2 of the degenerate series (N = {n})"
                )));
            }
            if a.twice() > 2 * n - 1 {
                return Ok(PsiValue {
                    value: 0.0,
                    log_scale_used: false,
                });
            }
            psi_series(a, x, prm)
        }
        Route::Reflected => {
            let v = psi_value(a.reflect(), x.reflect(), &prm.negated()?)?;
            Ok(PsiValue {
                value: parity_sign(x.int_sum(a)) * v.value,
                ..v
            })
        }
    }
}

/// `½ ln` of the positive gamma ratio under the square root.
fn half_ln_gamma_ratio(a: HalfInt, x: HalfInt, prm: &ZParams) -> Result<f64> {
    let (z, zp) = (prm.z(), prm.zprime());
    let (xv, av) = (x.value(), a.value());
    Ok(0.5
        * (ln_abs_gamma(z + xv + 0.5)? + ln_abs_gamma(zp + xv + 0.5)?
            - ln_abs_gamma(z - av + 0.5)?
            - ln_abs_gamma(zp - av + 0.5)?))
}

/// Hypergeometric form, through the Pfaff-transformed series in `ξ`:
/// `ψ_a(x) = √G · ξ^{(x+a)/2} (1-ξ)^{(z'-z+1)/2} Σ_k (a-z+½)_k (x+z'+½)_k ξ^k / (k! Γ(x+a+1+k))`.
fn psi_series(a: HalfInt, x: HalfInt, prm: &ZParams) -> Result<PsiValue> {
    let (z, zp, xi) = (prm.z(), prm.zprime(), prm.xi());
    let (xv, av) = (x.value(), a.value());
    let m = x.int_sum(a) as f64;
    let (s, max_partial) = regularized_series_raw(-z + av + 0.5, zp + xv + 0.5, Complex64::new(m + 1.0, 0.0), xi)?;
    if s.is_zero() {
        return Ok(PsiValue {
            value: 0.0,
            log_scale_used: false,
        });
    }
    let half_ln_g = half_ln_gamma_ratio(a, x, prm)?;
    let ln_xi_pow = 0.5 * m * xi.ln();
    let ln_one_minus = 0.5 * (zp - z + 1.0) * (1.0 - xi).ln();
    let ln_total = s.ln_scale + half_ln_g + ln_xi_pow + ln_one_minus;
    let log_scale_used = [half_ln_g, ln_xi_pow, s.ln_scale.re, ln_one_minus.re]
        .iter()
        .any(|l| l.abs() > LN_OVERFLOW);
    let value = (ln_total.exp() * s.mantissa).re;
    // Deep in the oscillatory region the alternating series cancels badly,
    // while the integrand on the unit circle stays of moderate size.
    let series_err = 2.0 * f64::EPSILON * max_partial * ln_total.re.exp();
    if series_err <= PSI_ABS_TOL * 1e-2 || series_err <= PSI_REL_TOL * value.abs() {
        return Ok(PsiValue { value, log_scale_used });
    }
    let contour = contour_value(a, x, prm, &QuadratureConfig::single_contour());
    let (value, err) = match contour {
        Ok((v, e)) if e < series_err => (v, e),
        _ => (value, series_err),
    };
    if err > PSI_ABS_TOL {
        return Err(Error::Accuracy {
            context: "psi lost precision in both the series and the contour form",
            attained: err,
        });
    }
    Ok(PsiValue { value, log_scale_used })
}

/// Mean of `g` over `n` equispaced nodes of `|ω| = r`, starting at angle
/// `offset · 2π/n`, with `offset` in `{0, ½}`.
fn circle_mean<G: Fn(Complex64) -> Complex64>(g: &G, r: f64, n: usize, half_offset: bool) -> (Complex64, f64) {
    let step = 2.0 * PI / n as f64;
    let shift = if half_offset { 0.5 * step } else { 0.0 };
    let mut sum = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for k in 0..n {
        let v = g(Complex64::from_polar(r, shift + k as f64 * step));
        abs_sum += v.norm();
        sum += v;
    }
    (sum / n as f64, abs_sum / n as f64)
}

/// `(1/2πi) ∮ g(ω) dω/ω` on `|ω| = r` by the trapezoid rule with node doubling.
pub(crate) fn contour_mean<G: Fn(Complex64) -> Complex64>(
    g: G,
    q: &QuadratureConfig,
    context: &'static str,
) -> Result<Complex64> {
    Ok(contour_mean_with_scale(g, q, context)?.0)
}

/// [`contour_mean`] together with the mean modulus of the integrand.
fn contour_mean_with_scale<G: Fn(Complex64) -> Complex64>(
    g: G,
    q: &QuadratureConfig,
    context: &'static str,
) -> Result<(Complex64, f64)> {
    let mut n = q.nodes;
    let (mut value, mut abs_mean) = circle_mean(&g, q.radius, n, false);
    for _ in 0..q.max_doublings {
        let (odd, odd_abs) = circle_mean(&g, q.radius, n, true);
        let next = 0.5 * (value + odd);
        abs_mean = 0.5 * (abs_mean + odd_abs);
        n *= 2;
        let diff = (next - value).norm();
        value = next;
        if diff <= 1e-12 * value.norm() + 64.0 * f64::EPSILON * abs_mean {
            return Ok((value, abs_mean));
        }
    }
    Err(Error::Accuracy {
        context,
        attained: if value.norm() > 0.0 { abs_mean * f64::EPSILON / value.norm() } else { f64::INFINITY },
    })
}

/// `ψ_a(x)` from its single contour integral representation on `|ω| = r`:
/// `√G · Γ(z'-a+½)/Γ(z'+x+½) · (1-ξ)^{(z'-z+1)/2} · (1/2πi)∮ (1-√ξω)^{a-z'-½} (1-√ξ/ω)^{z-a-½} ω^{-x-a} dω/ω`.
pub fn psi_contour(a: HalfInt, x: HalfInt, prm: &ZParams, q: &QuadratureConfig) -> Result<f64> {
    q.check_admissible(prm.xi())?;
    match route(prm)? {
        Route::Direct => {}
        Route::Truncated(n) => {
            if x.twice() < 1 - 2 * n {
                return Err(Error::Domain(format!(
                    "x = {x} below the support -N + 1/2 of the degenerate series (N = {n})"
                )));
            }
            if a.twice() > 2 * n - 1 {
                return Ok(0.0);
            }
        }
        Route::Reflected => {
            let v = psi_contour(a.reflect(), x.reflect(), &prm.negated()?, q)?;
            return Ok(parity_sign(x.int_sum(a)) * v);
        }
    }
    Ok(contour_value(a, x, prm, q)?.0)
}

/// The contour representation and a bound on its absolute rounding error.
fn contour_value(a: HalfInt, x: HalfInt, prm: &ZParams, q: &QuadratureConfig) -> Result<(f64, f64)> {
    let (z, zp, xi) = (prm.z(), prm.zprime(), prm.xi());
    let (xv, av) = (x.value(), a.value());
    let sq = xi.sqrt();
    let p1 = a.value() - zp - 0.5;
    let p2 = z - av - 0.5;
    let m = x.int_sum(a) as i32;
    let (integral, abs_mean) = contour_mean_with_scale(
        |w| ((1.0 - sq * w).ln() * p1 + (1.0 - sq / w).ln() * p2).exp() * w.powi(-m),
        q,
        "psi contour quadrature did not converge",
    )?;
    let ln_pref = half_ln_gamma_ratio(a, x, prm)? + log_gamma(zp - av + 0.5)? - log_gamma(zp + xv + 0.5)?
        + 0.5 * (zp - z + 1.0) * (1.0 - xi).ln();
    let pref = ln_pref.exp();
    // each sample carries a relative error of about ε times its exponents
    let digits_lost = p1.norm() + p2.norm() + m.unsigned_abs() as f64 + 8.0;
    Ok(((pref * integral).re, pref.norm() * digits_lost * f64::EPSILON * abs_mean))
}

/// `F(A, B; M+1; ξ/(ξ-1)) / Γ(M+1)` from the contour integral
/// `Γ(1-A)/Γ(M+1-A) · ξ^{-M/2} (1-ξ)^B · (1/2πi)∮ (1-√ξω)^{A-1} (1-√ξ/ω)^{-B} ω^{-M} dω/ω`.
pub fn hyp2f1_reg_contour(a: Complex64, b: Complex64, m: i32, xi: f64, q: &QuadratureConfig) -> Result<Complex64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::Domain(format!("xi must lie in (0,1), got {xi}")));
    }
    q.check_admissible(xi)?;
    // Γ(1-A)/Γ(M+1-A) as a finite product
    let one = Complex64::new(1.0, 0.0);
    let ratio = if m >= 0 {
        let p = (0..m).fold(one, |acc, j| acc * (1.0 - a + j as f64));
        if p == Complex64::new(0.0, 0.0) {
            return Err(Error::Pole((1.0 - a).re));
        }
        p.inv()
    } else {
        (0..-m).fold(one, |acc, j| acc * (m as f64 + 1.0 - a + j as f64))
    };
    let sq = xi.sqrt();
    let integral = contour_mean(
        |w| ((1.0 - sq * w).ln() * (a - 1.0) - (1.0 - sq / w).ln() * b).exp() * w.powi(-m),
        q,
        "hypergeometric contour quadrature did not converge",
    )?;
    Ok(ratio * (-0.5 * m as f64 * xi.ln() + b * (1.0 - xi).ln()).exp() * integral)
}

/// Coefficient `√(ξ (z + t)(z' + t))`, real for every series with `0 < ξ < 1`.
fn sqrt_coefficient(prm: &ZParams, t: f64) -> Result<f64> {
    let q = ((prm.z() + t) * (prm.zprime() + t)).re * prm.xi();
    if q < 0.0 {
        return Err(Error::Domain(format!("negative coefficient {q} under the square root")));
    }
    Ok(q.sqrt())
}

/// `(D f)(x) = √(ξ(z+x+½)(z'+x+½)) f(x+1) + √(ξ(z+x-½)(z'+x-½)) f(x-1) - (x + ξ(z+z'+x)) f(x)`.
///
/// Neighbours with a vanishing coefficient are not evaluated.
pub fn apply_d<F: FnMut(HalfInt) -> Result<f64>>(mut f: F, x: HalfInt, prm: &ZParams) -> Result<f64> {
    let xv = x.value();
    let up = sqrt_coefficient(prm, xv + 0.5)?;
    let down = sqrt_coefficient(prm, xv - 0.5)?;
    let mut out = -(xv + prm.xi() * (prm.z_plus_zprime() + xv)) * f(x)?;
    if up != 0.0 {
        out += up * f(x.shift(1))?;
    }
    if down != 0.0 {
        out += down * f(x.shift(-1))?;
    }
    Ok(out)
}

/// `|(1-ξ) x ψ_a(x) - [A₋ ψ_{a-1}(x) + A₊ ψ_{a+1}(x) + (-a + ξ(z+z'-a)) ψ_a(x)]|`
/// with `A∓ = √(ξ(z-a±½)(z'-a±½))`.
pub fn three_term_residual(a: HalfInt, x: HalfInt, prm: &ZParams) -> Result<f64> {
    let av = a.value();
    let xi = prm.xi();
    let center = psi(a, x, prm)?;
    let down = sqrt_coefficient(prm, -av + 0.5)?;
    let up = sqrt_coefficient(prm, -av - 0.5)?;
    let mut rhs = (-av + xi * (prm.z_plus_zprime() - av)) * center;
    if down != 0.0 {
        rhs += down * psi(a.shift(-1), x, prm)?;
    }
    if up != 0.0 {
        rhs += up * psi(a.shift(1), x, prm)?;
    }
    Ok(((1.0 - xi) * x.value() * center - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    fn principal(xi: f64) -> ZParams {
        ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), xi).unwrap()
    }

    #[test]
    fn small_xi_limit() {
        let prm = principal(1e-10);
        for a in HalfInt::range_inclusive(h("-3.5"), h("3.5")) {
            for x in HalfInt::range_inclusive(h("-3.5"), h("3.5")) {
                let v = psi(a, x, &prm).unwrap();
                if x == a.reflect() {
                    assert!((v - 1.0).abs() < 1e-5, "{a} {x} {v}");
                } else {
                    assert!(v.abs() < 1e-4, "{a} {x} {v}");
                }
            }
        }
    }

    #[test]
    fn contour_matches_series_at_a_point() {
        let prm = principal(0.3);
        let q = QuadratureConfig::default();
        for (a, x) in [("0.5", "0.5"), ("-1.5", "2.5"), ("3.5", "-4.5")] {
            let s = psi(h(a), h(x), &prm).unwrap();
            let c = psi_contour(h(a), h(x), &prm, &q).unwrap();
            assert!((s - c).abs() < 1e-10, "{a} {x}: {s} vs {c}");
        }
    }

    #[test]
    fn d_of_zero_and_delta() {
        let prm = principal(0.3);
        assert_eq!(apply_d(|_| Ok(0.0), h("0.5"), &prm).unwrap(), 0.0);
        let y = h("4.5");
        let delta = |t: HalfInt| Ok(if t == y { 1.0 } else { 0.0 });
        assert_eq!(apply_d(delta, h("0.5"), &prm).unwrap(), 0.0);
        assert_eq!(apply_d(delta, h("2.5"), &prm).unwrap(), 0.0);
        assert!(apply_d(delta, h("3.5"), &prm).unwrap() > 0.0);
    }

    #[test]
    fn quadrature_config_validation() {
        assert!(QuadratureConfig::new(0.0, 256, 4).is_err());
        assert!(QuadratureConfig::new(1.0, 2, 4).is_err());
        let q = QuadratureConfig::new(2.0, 256, 4).unwrap();
        assert!(q.check_admissible(0.3).is_err());
        assert!(QuadratureConfig::double_contour(0.85).check_admissible(0.85).is_ok());
    }

    #[test]
    fn second_degenerate_rejected() {
        let prm = ZParams::real(2.0, -3.0, -0.5).unwrap();
        assert!(matches!(psi(h("0.5"), h("0.5"), &prm), Err(Error::Domain(_))));
    }

    #[test]
    fn degenerate_domain_and_truncation() {
        let prm = ZParams::real(3.0, 3.7, 0.3).unwrap();
        assert!(matches!(psi(h("0.5"), h("-3.5"), &prm), Err(Error::Domain(_))));
        assert!(psi(h("0.5"), h("-2.5"), &prm).is_ok());
        assert_eq!(psi(h("3.5"), h("1.5"), &prm).unwrap(), 0.0);
        assert_eq!(psi(h("7.5"), h("-2.5"), &prm).unwrap(), 0.0);
        assert!(psi(h("2.5"), h("1.5"), &prm).unwrap() != 0.0);
    }
}
