//! The z-measure weight, its parameter series, and the decomposition of the
//! measure into a mixture over `|λ|`.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::partitions::{dim, enumerate_partitions, ln_dim_over_factorial, Partition};
use crate::specfun::{ln_factorial, log_gamma};

/// Largest `n_max` accepted by [`total_mass`].
pub const MAX_MASS_SIZE: usize = 45;

/// The four parameter regimes in which the z-measure is a probability measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Series {
    Principal,
    Complementary,
    Degenerate,
    SecondDegenerate,
}

/// Validated parameters `(z, z', ξ)` together with their series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZParams {
    z: Complex64,
    zprime: Complex64,
    xi: f64,
    series: Series,
    zzprime: f64,
}

fn as_nonzero_integer(w: Complex64) -> Option<i64> {
    (w.im == 0.0 && w.re.fract() == 0.0 && w.re != 0.0 && w.re.abs() < 1e15).then_some(w.re as i64)
}

/// Classifies `(z, z', ξ)` into one of the probability-measure series.
pub fn classify(z: Complex64, zprime: Complex64, xi: f64) -> Result<ZParams> {
    let bad = |msg: String| Err(Error::InvalidParameters(msg));
    if !(z.re.is_finite() && z.im.is_finite() && zprime.re.is_finite() && zprime.im.is_finite() && xi.is_finite()) {
        return bad("parameters must be finite".into());
    }
    if xi < 0.0 {
        return match (as_nonzero_integer(z), as_nonzero_integer(zprime)) {
            (Some(n), Some(m)) if (n > 0) != (m > 0) => Ok(ZParams {
                z,
                zprime,
                xi,
                series: Series::SecondDegenerate,
                zzprime: (n * m) as f64,
            }),
            _ => bad(format!(
                "xi = {xi} < 0 requires z, z' to be nonzero integers of opposite sign (got {z}, {zprime})"
            )),
        };
    }
    if !(xi > 0.0 && xi < 1.0) {
        return bad(format!("xi must lie in (0,1) or be negative, got {xi}"));
    }
    if z.im != 0.0 || zprime.im != 0.0 {
        let tol = 1e-12 * z.norm().max(1.0);
        if z.im == 0.0 || (zprime - z.conj()).norm() > tol {
            return bad(format!("non-real z, z' must be complex conjugates (got {z}, {zprime})"));
        }
        return Ok(ZParams {
            z,
            zprime: z.conj(),
            xi,
            series: Series::Principal,
            zzprime: z.norm_sqr(),
        });
    }
    let (a, b) = (z.re, zprime.re);
    let degenerate = |n: i64, other: f64| (other > 0.0) == (n > 0) && other.abs() > (n.abs() - 1) as f64;
    let series = match (as_nonzero_integer(z), as_nonzero_integer(zprime)) {
        (Some(n), _) if degenerate(n, b) => Series::Degenerate,
        (_, Some(n)) if degenerate(n, a) => Series::Degenerate,
        (None, None) if a.floor() == b.floor() && a.fract() != 0.0 && b.fract() != 0.0 => Series::Complementary,
        (Some(_), _) | (_, Some(_)) => {
            return bad(format!(
                "integer parameter requires the other to share its sign and satisfy |z'| > |z| - 1 (got {a}, {b})"
            ))
        }
        _ => return bad(format!("real z, z' must lie in one open interval (m, m+1) (got {a}, {b})")),
    };
    Ok(ZParams {
        z,
        zprime,
        xi,
        series,
        zzprime: a * b,
    })
}

impl ZParams {
    pub fn new(z: Complex64, zprime: Complex64, xi: f64) -> Result<Self> {
        classify(z, zprime, xi)
    }

    /// Real parameters shorthand.
    pub fn real(z: f64, zprime: f64, xi: f64) -> Result<Self> {
        classify(Complex64::new(z, 0.0), Complex64::new(zprime, 0.0), xi)
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn zprime(&self) -> Complex64 {
        self.zprime
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn series(&self) -> Series {
        self.series
    }

    /// `zz'`, real for every series.
    pub fn zzprime(&self) -> f64 {
        self.zzprime
    }

    /// `z + z'`, real for every series.
    pub fn z_plus_zprime(&self) -> f64 {
        (self.z + self.zprime).re
    }

    /// `(-z, -z', ξ)`, again a valid parameter point for the first three series.
    pub fn negated(&self) -> Result<Self> {
        classify(-self.z, -self.zprime, self.xi)
    }

    /// `(z', z, ξ)`.
    pub fn swapped(&self) -> Self {
        Self {
            z: self.zprime,
            zprime: self.z,
            ..*self
        }
    }

    /// For the second degenerate series, `(N, N')` with `z = N`, `z' = -N'` up to order.
    pub fn rectangle(&self) -> Option<(u32, u32)> {
        if self.series != Series::SecondDegenerate {
            return None;
        }
        let (a, b) = (self.z.re as i64, self.zprime.re as i64);
        Some(if a > 0 { (a as u32, (-b) as u32) } else { (b as u32, (-a) as u32) })
    }

    /// For the degenerate series, the integer parameter of smallest modulus;
    /// it bounds `ℓ(λ)` (or `ℓ(λ')` when negative).
    pub fn degenerate_integer(&self) -> Option<i64> {
        if self.series != Series::Degenerate {
            return None;
        }
        match (as_nonzero_integer(self.z), as_nonzero_integer(self.zprime)) {
            (Some(n), Some(m)) => Some(if n.abs() <= m.abs() { n } else { m }),
            (Some(n), None) | (None, Some(n)) => Some(n),
            (None, None) => None,
        }
    }

    /// For the degenerate series with a positive integer parameter, `(N, β)`
    /// such that the parameters are `(N, N + β - 1)` up to order.
    pub fn meixner_shape(&self) -> Option<(u32, f64)> {
        let n = self.degenerate_integer().filter(|&n| n > 0)?;
        let other = self.z_plus_zprime() - n as f64;
        Some((n as u32, other - n as f64 + 1.0))
    }
}

#[derive(Serialize, Deserialize)]
struct ZParamsWire {
    z: [f64; 2],
    zprime: [f64; 2],
    xi: f64,
}

impl Serialize for ZParams {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ZParamsWire {
            z: [self.z.re, self.z.im],
            zprime: [self.zprime.re, self.zprime.im],
            xi: self.xi,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ZParams {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let w = ZParamsWire::deserialize(d)?;
        classify(
            Complex64::new(w.z[0], w.z[1]),
            Complex64::new(w.zprime[0], w.zprime[1]),
            w.xi,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// Per-box factors `(z + c)(z' + c)` accumulated as a log-magnitude and a sign.
/// Returns `None` when some factor vanishes.
fn ln_box_product(prm: &ZParams, lambda: &Partition) -> Option<(f64, f64)> {
    let mut ln_mag = 0.0;
    let mut sign = 1.0;
    for c in lambda.contents() {
        let q = ((prm.z + c as f64) * (prm.zprime + c as f64)).re;
        if q == 0.0 {
            return None;
        }
        ln_mag += q.abs().ln();
        if q < 0.0 {
            sign = -sign;
        }
    }
    Some((ln_mag, sign))
}

/// `M_{z,z',ξ}(λ) = (1-ξ)^{zz'} ξ^{|λ|} (z)_λ (z')_λ (dim λ / |λ|!)²`.
pub fn weight(prm: &ZParams, lambda: &Partition) -> f64 {
    let n = lambda.size();
    let Some((ln_boxes, mut sign)) = ln_box_product(prm, lambda) else {
        return 0.0;
    };
    if prm.xi < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    let ln_w = prm.zzprime * (1.0 - prm.xi).ln()
        + n as f64 * prm.xi.abs().ln()
        + ln_boxes
        + 2.0 * ln_dim_over_factorial(lambda);
    sign * ln_w.exp()
}

/// `ln |(a)_n|` and the sign of `(a)_n` for real `a`; `None` when it vanishes.
fn ln_rising_signed(a: f64, n: usize) -> Option<(f64, f64)> {
    if a > 0.0 && n > 200 {
        let l = log_gamma(Complex64::new(a + n as f64, 0.0)).ok()?.re - log_gamma(Complex64::new(a, 0.0)).ok()?.re;
        return Some((l, 1.0));
    }
    let mut ln_mag = 0.0;
    let mut sign = 1.0;
    for j in 0..n {
        let f = a + j as f64;
        if f == 0.0 {
            return None;
        }
        ln_mag += f.abs().ln();
        if f < 0.0 {
            sign = -sign;
        }
    }
    Some((ln_mag, sign))
}

/// Negative binomial law of `|λ|`: `(1-ξ)^{zz'} ξ^n (zz')_n / n!`.
pub fn negative_binomial(prm: &ZParams, n: usize) -> Result<f64> {
    if prm.series == Series::SecondDegenerate {
        return Err(Error::Domain("the second degenerate series mixes by a binomial law".into()));
    }
    let a = prm.zzprime;
    let (ln_rise, _) = ln_rising_signed(a, n).expect("zz' > 0 for the first three series");
    Ok((a * (1.0 - prm.xi).ln() + n as f64 * prm.xi.ln() + ln_rise - ln_factorial(n as u64)).exp())
}

/// Binomial mixing law `C(NN', n) p^n (1-p)^{NN'-n}`, `p = ξ/(ξ-1)`.
pub fn binomial_mixing(big_n: u32, big_nprime: u32, xi: f64, n: usize) -> Result<f64> {
    if !(xi < 0.0) {
        return Err(Error::Domain(format!("binomial mixing requires xi < 0, got {xi}")));
    }
    let total = big_n as usize * big_nprime as usize;
    if n > total {
        return Err(Error::Domain(format!("n = {n} exceeds NN' = {total}")));
    }
    let p = xi / (xi - 1.0);
    let ln_binom = ln_factorial(total as u64) - ln_factorial(n as u64) - ln_factorial((total - n) as u64);
    Ok((ln_binom + n as f64 * p.ln() + (total - n) as f64 * (1.0 - p).ln()).exp())
}

/// Probability that `|λ| = n`, for any series.
pub fn size_law(prm: &ZParams, n: usize) -> f64 {
    match prm.rectangle() {
        Some((a, b)) => binomial_mixing(a, b, prm.xi, n).unwrap_or(0.0),
        None => negative_binomial(prm, n).expect("first three series"),
    }
}

/// `Σ_{n > n_max} P(|λ| = n)`, summed term by term.
pub fn size_tail(prm: &ZParams, n_max: usize) -> f64 {
    if let Some((a, b)) = prm.rectangle() {
        let total = a as usize * b as usize;
        return ((n_max + 1)..=total).map(|n| size_law(prm, n)).sum();
    }
    let mut sum = 0.0;
    let mut n = n_max + 1;
    let mut prev = f64::INFINITY;
    loop {
        let t = size_law(prm, n);
        sum += t;
        if t < prev && t <= 1e-18 * sum.max(f64::MIN_POSITIVE) || t == 0.0 {
            break;
        }
        prev = t;
        n += 1;
        if n > n_max + 1_000_000 {
            break;
        }
    }
    sum
}

/// Conditional law on partitions of `n = |λ|`:
/// `(z)_λ (z')_λ / (zz')_n · (dim λ)² / n!`.
pub fn weight_fixed_n(prm: &ZParams, lambda: &Partition) -> Result<f64> {
    let n = lambda.size();
    let (ln_den, den_sign) = ln_rising_signed(prm.zzprime, n)
        .ok_or_else(|| Error::Domain(format!("(zz')_{n} vanishes for zz' = {}", prm.zzprime)))?;
    let Some((ln_boxes, sign)) = ln_box_product(prm, lambda) else {
        return Ok(0.0);
    };
    let ln_w = ln_boxes - ln_den + 2.0 * ln_dim_over_factorial(lambda) + ln_factorial(n as u64);
    Ok(sign * den_sign * ln_w.exp())
}

/// Exact conditional law for integer parameters `(z, z')`.
pub fn weight_fixed_n_exact(z: i64, zprime: i64, lambda: &Partition) -> Result<BigRational> {
    let n = lambda.size();
    let zz = z * zprime;
    let den = (0..n as i64).fold(BigInt::one(), |acc, j| acc * BigInt::from(zz + j));
    if den.is_zero() {
        return Err(Error::Domain(format!("(zz')_{n} vanishes for zz' = {zz}")));
    }
    let num = lambda
        .contents()
        .fold(BigInt::one(), |acc, c| acc * BigInt::from(z + c) * BigInt::from(zprime + c));
    let d = BigInt::from(dim(lambda));
    let n_fact = (1..=n as i64).fold(BigInt::one(), |acc, k| acc * k);
    Ok(BigRational::new(num * &d * &d, den * n_fact))
}

/// Truncated total mass and the mass of the omitted sizes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassResult {
    pub partial_sum: f64,
    pub tail_bound: f64,
}

/// Compensated summation.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

/// `Σ_{|λ| ≤ n_max} M(λ)` with the tail `Σ_{n > n_max} P(|λ| = n)`.
pub fn total_mass(prm: &ZParams, n_max: usize) -> Result<MassResult> {
    if n_max > MAX_MASS_SIZE {
        return Err(Error::SizeLimit {
            what: "n_max",
            value: n_max,
            limit: MAX_MASS_SIZE,
        });
    }
    // one shard per size, combined in index order
    let shards: Vec<f64> = (0..=n_max)
        .into_par_iter()
        .map(|n| -> Result<f64> {
            let parts = enumerate_partitions(n)?;
            Ok(neumaier_sum(parts.iter().map(|l| weight(prm, l))))
        })
        .collect::<Result<_>>()?;
    Ok(MassResult {
        partial_sum: neumaier_sum(shards),
        tail_bound: size_tail(prm, n_max),
    })
}

/// Whether the exact rational is strictly positive; used by oracle checks.
pub fn is_positive_rational(r: &BigRational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn principal() -> ZParams {
        classify(c(1.0, 1.0), c(1.0, -1.0), 0.3).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(principal().series(), Series::Principal);
        assert_eq!(ZParams::real(0.4, 0.7, 0.3).unwrap().series(), Series::Complementary);
        assert_eq!(ZParams::real(2.0, -3.0, -0.5).unwrap().series(), Series::SecondDegenerate);
        assert_eq!(ZParams::real(3.0, 3.7, 0.3).unwrap().series(), Series::Degenerate);
        assert_eq!(ZParams::real(-2.0, -1.5, 0.3).unwrap().series(), Series::Degenerate);
        assert_eq!(ZParams::real(-0.4, -0.7, 0.3).unwrap().series(), Series::Complementary);
        let d = ZParams::real(3.0, 3.7, 0.3).unwrap();
        assert_eq!(d.degenerate_integer(), Some(3));
        let (n, beta) = d.meixner_shape().unwrap();
        assert_eq!(n, 3);
        assert!((beta - 1.7).abs() < 1e-14);
        assert_eq!(ZParams::real(5.0, 3.0, 0.3).unwrap().meixner_shape(), Some((3, 3.0)));
        assert_eq!(ZParams::real(-2.0, -1.5, 0.3).unwrap().meixner_shape(), None);
    }

    #[test]
    fn classify_rejections() {
        // different intervals
        assert!(ZParams::real(0.4, 1.7, 0.3).is_err());
        // not conjugate
        assert!(classify(c(1.0, 1.0), c(1.0, 1.0), 0.3).is_err());
        // boundary |z'| = |z| - 1 is excluded
        assert!(ZParams::real(3.0, 1.5, 0.3).is_err());
        // (3, 2) is degenerate with the roles of z and z' exchanged
        assert_eq!(ZParams::real(3.0, 2.0, 0.3).unwrap().series(), Series::Degenerate);
        // opposite signs with positive xi
        assert!(ZParams::real(3.0, -2.5, 0.3).is_err());
        // xi out of range
        assert!(principal_with_xi(1.0).is_err());
        assert!(principal_with_xi(0.0).is_err());
        // negative xi needs integers
        assert!(ZParams::real(2.5, -3.0, -0.5).is_err());
        assert!(ZParams::real(2.0, 3.0, -0.5).is_err());
        let err = ZParams::real(0.4, 1.7, 0.3).unwrap_err().to_string();
        assert!(err.contains("interval"), "{err}");
    }

    fn principal_with_xi(xi: f64) -> Result<ZParams> {
        classify(c(1.0, 1.0), c(1.0, -1.0), xi)
    }

    #[test]
    fn weight_examples() {
        let prm = principal();
        assert_eq!(prm.zzprime(), 2.0);
        assert!((weight(&prm, &Partition::empty()) - 0.49).abs() < 1e-15);
        assert!((weight(&prm, &"1".parse().unwrap()) - 0.294).abs() < 1e-15);
        assert!((weight(&prm, &"2,1".parse().unwrap()) - 0.0147).abs() < 1e-15);
    }

    #[test]
    fn negative_binomial_examples() {
        let prm = principal();
        assert!((negative_binomial(&prm, 0).unwrap() - 0.49).abs() < 1e-15);
        let total = neumaier_sum((0..=300).map(|n| negative_binomial(&prm, n).unwrap()));
        assert!((total - 1.0).abs() < 1e-12);
        let mean = neumaier_sum((0..=400).map(|n| n as f64 * negative_binomial(&prm, n).unwrap()));
        assert!((mean - 0.3 * 2.0 / 0.7).abs() < 1e-10);
        let second = ZParams::real(2.0, -3.0, -0.5).unwrap();
        assert!(negative_binomial(&second, 1).is_err());
    }

    #[test]
    fn fixed_n_examples() {
        let prm = principal();
        assert!((weight_fixed_n(&prm, &Partition::empty()).unwrap() - 1.0).abs() < 1e-15);
        assert!((weight_fixed_n(&prm, &"1".parse().unwrap()).unwrap() - 1.0).abs() < 1e-15);
        let exact = weight_fixed_n_exact(2, -2, &"2".parse().unwrap()).unwrap();
        assert_eq!(exact, BigRational::new(1.into(), 2.into()));
        let exact = weight_fixed_n_exact(2, -2, &"1,1".parse().unwrap()).unwrap();
        assert_eq!(exact, BigRational::new(1.into(), 2.into()));
        // zz' = -4: (zz')_5 contains a zero factor
        assert!(weight_fixed_n_exact(2, -2, &"5".parse().unwrap()).is_err());
    }

    #[test]
    fn binomial_mixing_examples() {
        let p: f64 = 0.5;
        assert!((binomial_mixing(2, 3, -1.0, 0).unwrap() - (1.0 - p).powi(6)).abs() < 1e-16);
        let total: f64 = (0..=6).map(|n| binomial_mixing(2, 3, -1.0, n).unwrap()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        assert!(binomial_mixing(2, 3, -1.0, 7).is_err());
        assert!(binomial_mixing(2, 3, 0.5, 1).is_err());
    }

    #[test]
    fn total_mass_small_cases() {
        let prm = principal();
        let m0 = total_mass(&prm, 0).unwrap();
        assert!((m0.partial_sum - 0.49).abs() < 1e-15);
        let m = total_mass(&prm, 30).unwrap();
        assert!(m.tail_bound < 1e-12);
        assert!((m.partial_sum - 1.0).abs() <= m.tail_bound + 1e-14);
        let second = ZParams::real(2.0, -2.0, -1.0).unwrap();
        let m = total_mass(&second, 4).unwrap();
        assert_eq!(m.tail_bound, 0.0);
        assert!((m.partial_sum - 1.0).abs() < 1e-14);
        assert!(total_mass(&prm, 46).is_err());
    }
}
