use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Below this modulus the argument is shifted upward before the asymptotic
/// series is applied.
const STIRLING_MIN: f64 = 15.0;

/// `B_{2k} / (2k (2k-1))` for k = 1..=9.
const STIRLING_COEFFS: [f64; 9] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
    43867.0 / 244_188.0,
];

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

fn is_pole(w: Complex64) -> bool {
    w.im == 0.0 && w.re <= 0.0 && w.re.fract() == 0.0
}

fn stirling(w: Complex64) -> Complex64 {
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        corr += pow * c;
        pow *= inv2;
    }
    (w - 0.5) * w.ln() - w + HALF_LN_2PI + corr
}

/// Principal branch of `ln Γ(w)`: analytic off the negative real axis, real
/// on the positive real axis.
///
/// The argument is shifted by the functional equation until the asymptotic
/// Stirling series is accurate to double precision; the shift contributes a
/// sum of principal logarithms, which stays continuous off the real axis.
pub fn log_gamma(w: Complex64) -> Result<Complex64> {
    if is_pole(w) {
        return Err(Error::Pole(w.re));
    }
    if !(w.re.is_finite() && w.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma({w})")));
    }
    let mut shifted = w;
    let mut correction = Complex64::new(0.0, 0.0);
    while shifted.re < STIRLING_MIN || shifted.norm() < STIRLING_MIN {
        correction += shifted.ln();
        shifted += 1.0;
    }
    let mut out = stirling(shifted) - correction;
    if w.im == 0.0 && w.re > 0.0 {
        out.im = 0.0;
    }
    Ok(out)
}

/// `ln |Γ(w)|`, using the reflection formula in the left half-plane so that
/// large negative arguments need no long upward shift.
pub fn ln_abs_gamma(w: Complex64) -> Result<f64> {
    if is_pole(w) {
        return Err(Error::Pole(w.re));
    }
    if w.re >= 0.5 {
        return Ok(log_gamma(w)?.re);
    }
    // |Γ(w)| = π / (|sin πw| |Γ(1 - w)|)
    let (u, v) = (PI * w.re, PI * w.im);
    let ln_abs_sin = if v.abs() > 20.0 {
        v.abs() - std::f64::consts::LN_2
    } else {
        0.5 * (u.sin().powi(2) + v.sinh().powi(2)).ln()
    };
    Ok(PI.ln() - ln_abs_sin - log_gamma(1.0 - w)?.re)
}

/// `1/Γ(w)`, entire; exactly zero at the poles of Γ.
pub fn recip_gamma(w: Complex64) -> Complex64 {
    match log_gamma(w) {
        Ok(l) => (-l).exp(),
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

/// `ln |Γ(x)|` and the sign of `Γ(x)` for real `x`.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(Error::Pole(x));
    }
    if x > 0.0 {
        return Ok((log_gamma(Complex64::new(x, 0.0))?.re, 1.0));
    }
    // Γ(x) Γ(1 - x) = π / sin(πx)
    let s = (PI * x).sin();
    let (l, _) = ln_gamma_signed(1.0 - x)?;
    Ok((PI.ln() - s.abs().ln() - l, s.signum()))
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(256);
        t.push(0.0);
        for k in 1..256u64 {
            t.push(t[k as usize - 1] + (k as f64).ln());
        }
        t
    });
    match table.get(n as usize) {
        Some(&v) => v,
        None => log_gamma(Complex64::new(n as f64 + 1.0, 0.0))
            .expect("positive argument")
            .re,
    }
}

/// Rising factorial `(a)_k` for complex `a`.
pub fn pochhammer(a: Complex64, k: u64) -> Complex64 {
    (0..k).fold(Complex64::new(1.0, 0.0), |acc, j| acc * (a + j as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn log_gamma_integers() {
        assert!(log_gamma(c(1.0, 0.0)).unwrap().norm() < 1e-14);
        assert!(log_gamma(c(2.0, 0.0)).unwrap().norm() < 1e-14);
        let l5 = log_gamma(c(5.0, 0.0)).unwrap();
        assert!((l5.re - 24f64.ln()).abs() < 1e-14 * 24f64.ln());
        assert_eq!(l5.im, 0.0);
        let l31 = log_gamma(c(31.0, 0.0)).unwrap().re;
        let exact: f64 = (1..=30).map(|k| (k as f64).ln()).sum();
        assert!((l31 - exact).abs() < 1e-13 * exact);
    }

    #[test]
    fn log_gamma_half_via_duplication() {
        // Γ(1/2)^2 = π
        let l = log_gamma(c(0.5, 0.0)).unwrap();
        assert!((2.0 * l.re - PI.ln()).abs() < 1e-14);
    }

    #[test]
    fn poles() {
        assert!(matches!(log_gamma(c(0.0, 0.0)), Err(Error::Pole(_))));
        assert!(matches!(log_gamma(c(-7.0, 0.0)), Err(Error::Pole(_))));
        assert_eq!(recip_gamma(c(0.0, 0.0)), c(0.0, 0.0));
        assert_eq!(recip_gamma(c(-3.0, 0.0)), c(0.0, 0.0));
        assert!((recip_gamma(c(2.0, 0.0)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn recurrence_in_complex_plane() {
        for &(re, im) in &[(0.3, 2.0), (-4.7, 0.5), (12.0, -9.0), (-20.25, -3.0), (40.0, 30.0)] {
            let w = c(re, im);
            let lhs = (log_gamma(w + 1.0).unwrap() - log_gamma(w).unwrap()).exp();
            assert!((lhs - w).norm() < 1e-12 * w.norm(), "{w}");
        }
    }

    #[test]
    fn negative_real_arguments_carry_sign() {
        // Γ(-1/2) = -2√π
        let g = log_gamma(c(-0.5, 0.0)).unwrap().exp();
        assert!((g.re + 2.0 * PI.sqrt()).abs() < 1e-13);
        assert!(g.im.abs() < 1e-13);
        let (l, s) = ln_gamma_signed(-0.5).unwrap();
        assert_eq!(s, -1.0);
        assert!((l - (2.0 * PI.sqrt()).ln()).abs() < 1e-14);
        let (l, s) = ln_gamma_signed(-1.5).unwrap();
        assert_eq!(s, 1.0);
        assert!((l - (4.0 * PI.sqrt() / 3.0).ln()).abs() < 1e-14);
    }

    #[test]
    fn ln_abs_gamma_matches_shifted_evaluation() {
        for &(re, im) in &[(-0.3, 0.0), (-7.5, 0.0), (-40.2, 1.0), (-3.5, -25.0), (2.0, 3.0)] {
            let w = c(re, im);
            let want = log_gamma(w).unwrap().re;
            assert!((ln_abs_gamma(w).unwrap() - want).abs() < 1e-12 * want.abs().max(1.0), "{w}");
        }
        assert!(ln_abs_gamma(c(-2.0, 0.0)).is_err());
    }

    #[test]
    fn ln_factorial_table_and_tail() {
        assert_eq!(ln_factorial(0), 0.0);
        assert!((ln_factorial(4) - 24f64.ln()).abs() < 1e-15);
        let direct: f64 = (1..=300).map(|k| (k as f64).ln()).sum();
        assert!((ln_factorial(300) - direct).abs() < 1e-11);
    }
}
