//! Young diagrams, Maya diagrams and the exact combinatorics attached to them.
//!
//! A [`Partition`] stores its nonzero rows only. Points of the half-integer
//! lattice are [`HalfInt`] values stored as the odd integer `2x`, so lattice
//! arithmetic never touches floating point.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest `n` accepted by [`enumerate_partitions`].
pub const MAX_ENUMERATION_SIZE: usize = 60;

/// A partition `λ_1 ≥ λ_2 ≥ … ≥ λ_ℓ ≥ 1`, identified with its Young diagram.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    /// The empty diagram.
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    /// Builds a partition from a weakly decreasing sequence. Trailing zeros
    /// are dropped; an increase anywhere is rejected.
    pub fn new(parts: Vec<u32>) -> Result<Self> {
        let mut parts = parts;
        while parts.last() == Some(&0) {
            parts.pop();
        }
        if parts.windows(2).any(|w| w[0] < w[1]) || parts.contains(&0) {
            return Err(Error::Domain(format!(
                "parts must be weakly decreasing and positive: {parts:?}"
            )));
        }
        Ok(Self { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    /// `|λ|`, the number of boxes.
    pub fn size(&self) -> usize {
        self.parts.iter().map(|&p| p as usize).sum()
    }

    /// `ℓ(λ)`, the number of nonzero rows.
    pub fn length(&self) -> usize {
        self.parts.len()
    }

    /// `λ_i` with 1-based `i`; zero beyond the last row.
    pub fn part_at(&self, i: usize) -> u32 {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The transposed diagram `λ'`.
    pub fn transpose(&self) -> Self {
        let width = self.part_at(1) as usize;
        let parts = (1..=width)
            .map(|j| self.parts.iter().filter(|&&p| p as usize >= j).count() as u32)
            .collect();
        Self { parts }
    }

    /// Contents `j - i` of all boxes `(i, j)`, row by row.
    pub fn contents(&self) -> impl Iterator<Item = i64> + '_ {
        self.parts.iter().enumerate().flat_map(|(r, &p)| {
            let i = r as i64 + 1;
            (1..=p as i64).map(move |j| j - i)
        })
    }

    /// Whether the diagram fits in a rectangle with `rows` rows and `cols` columns.
    pub fn fits_in(&self, rows: usize, cols: usize) -> bool {
        self.length() <= rows && self.part_at(1) as usize <= cols
    }

    /// Removable corners, as the row indices (0-based) whose last box can be removed.
    fn corner_rows(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.parts.len()).filter(|&r| r + 1 == self.parts.len() || self.parts[r] > self.parts[r + 1])
    }

    fn without_box_in_row(&self, r: usize) -> Self {
        let mut parts = self.parts.clone();
        parts[r] -= 1;
        if parts[r] == 0 {
            parts.pop();
        }
        Self { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text: Vec<String> = self.parts.iter().map(u32::to_string).collect();
        f.pad(&text.join(","))
    }
}

impl FromStr for Partition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::empty());
        }
        let parts = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::Parse(format!("bad part {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<u32>::deserialize(d)?;
        Partition::new(parts).map_err(serde::de::Error::custom)
    }
}

/// A point of the lattice `Z' = Z + 1/2`, stored as the odd integer `2x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const HALF: HalfInt = HalfInt(1);
    pub const MINUS_HALF: HalfInt = HalfInt(-1);

    /// From the doubled value; `twice` must be odd.
    pub fn from_twice(twice: i64) -> Result<Self> {
        if twice.rem_euclid(2) != 1 {
            return Err(Error::Domain(format!("{twice}/2 is not a half-integer")));
        }
        Ok(Self(twice))
    }

    /// The half-integer `k + 1/2`.
    pub const fn from_floor(k: i64) -> Self {
        Self(2 * k + 1)
    }

    pub fn from_f64(v: f64) -> Result<Self> {
        let t = 2.0 * v;
        if !t.is_finite() || t.fract() != 0.0 || t.abs() > 1e15 {
            return Err(Error::Domain(format!("{v} is not a half-integer")));
        }
        Self::from_twice(t as i64)
    }

    pub const fn twice(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// `x - 1/2`, an integer.
    pub const fn floor(self) -> i64 {
        (self.0 - 1) / 2
    }

    /// `x + 1/2`, an integer.
    pub const fn ceil(self) -> i64 {
        self.floor() + 1
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    /// Shift by an integer.
    pub const fn shift(self, k: i64) -> Self {
        Self(self.0 + 2 * k)
    }

    pub const fn reflect(self) -> Self {
        Self(-self.0)
    }

    /// Integer sum `x + y` of two half-integers.
    pub const fn int_sum(self, other: HalfInt) -> i64 {
        (self.0 + other.0) / 2
    }

    /// Integer difference `x - y` of two half-integers.
    pub const fn int_diff(self, other: HalfInt) -> i64 {
        (self.0 - other.0) / 2
    }

    /// All lattice points in `[lo, hi]`.
    pub fn range_inclusive(lo: HalfInt, hi: HalfInt) -> impl Iterator<Item = HalfInt> {
        (lo.0..=hi.0).step_by(2).map(HalfInt)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        f.pad(&format!("{sign}{}.5", self.0.unsigned_abs() / 2))
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let v: f64 = s
            .parse()
            .map_err(|e| Error::Parse(format!("bad lattice point {s:?}: {e}")))?;
        Self::from_f64(v).map_err(|_| Error::Parse(format!("{s:?} is not a half-integer")))
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_f64(self.value())
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        HalfInt::from_f64(v).map_err(serde::de::Error::custom)
    }
}

/// Finite encoding of the Maya diagram `X(λ) = {λ_i - i + 1/2}`: the points
/// of `X(λ)` above zero and the holes it leaves below zero.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MayaDiagram {
    pub added: BTreeSet<HalfInt>,
    pub removed: BTreeSet<HalfInt>,
}

impl MayaDiagram {
    pub fn contains(&self, x: HalfInt) -> bool {
        if x.is_positive() {
            self.added.contains(&x)
        } else {
            !self.removed.contains(&x)
        }
    }

    /// Diagram of the transposed partition: `X(λ') = -(Z' \ X(λ))`.
    pub fn transpose(&self) -> Self {
        Self {
            added: self.removed.iter().map(|x| x.reflect()).collect(),
            removed: self.added.iter().map(|x| x.reflect()).collect(),
        }
    }
}

/// Encodes `X(λ)`.
pub fn maya(lambda: &Partition) -> MayaDiagram {
    let l = lambda.length() as i64;
    let mut out = MayaDiagram::default();
    let mut present = BTreeSet::new();
    for i in 1..=l + 1 {
        let x = HalfInt::from_floor(lambda.part_at(i as usize) as i64 - i);
        present.insert(x);
        if x.is_positive() {
            out.added.insert(x);
        }
    }
    // every point below -l - 1/2 is present; holes can only sit in [-l-1/2, -1/2]
    for k in 1..=l + 1 {
        let x = HalfInt::from_floor(-k);
        if !present.contains(&x) {
            out.removed.insert(x);
        }
    }
    out
}

/// Reconstructs `λ` from its Maya diagram.
pub fn maya_inverse(m: &MayaDiagram) -> Result<Partition> {
    if m.added.len() != m.removed.len()
        || m.added.iter().any(|x| !x.is_positive())
        || m.removed.iter().any(|x| x.is_positive())
    {
        return Err(Error::Domain("unbalanced Maya diagram".into()));
    }
    let depth = m.removed.iter().next().map(|x| -x.floor()).unwrap_or(0);
    let mut points: Vec<HalfInt> = m.added.iter().rev().copied().collect();
    points.extend((1..=depth + 1).map(|k| HalfInt::from_floor(-k)).filter(|x| !m.removed.contains(x)));
    let parts = points
        .iter()
        .enumerate()
        .map(|(r, x)| (x.floor() + r as i64 + 1) as u32)
        .collect();
    Partition::new(parts)
}

/// Whether `x ∈ X(λ)`.
pub fn contains_point(lambda: &Partition, x: HalfInt) -> bool {
    // x = λ_i - i + 1/2 for some i; only i with λ_i - i ≥ x - 1/2 can hit it
    let target = x.floor();
    let l = lambda.length() as i64;
    if target < -l {
        return true;
    }
    (1..=l + 1).any(|i| lambda.part_at(i as usize) as i64 - i == target)
}

/// All partitions of `n` in reverse lexicographic order.
pub fn enumerate_partitions(n: usize) -> Result<Vec<Partition>> {
    if n > MAX_ENUMERATION_SIZE {
        return Err(Error::SizeLimit {
            what: "partition size",
            value: n,
            limit: MAX_ENUMERATION_SIZE,
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::new();
    fill(n as u32, n as u32, &mut current, &mut out);
    Ok(out)
}

fn fill(remaining: u32, max_part: u32, current: &mut Vec<u32>, out: &mut Vec<Partition>) {
    if remaining == 0 {
        out.push(Partition {
            parts: current.clone(),
        });
        return;
    }
    for p in (1..=remaining.min(max_part)).rev() {
        current.push(p);
        fill(remaining - p, p, current, out);
        current.pop();
    }
}

fn factorial(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// Number of standard tableaux of shape `λ`, from the factorial/Vandermonde
/// formula with `N = ℓ(λ)`.
pub fn dim(lambda: &Partition) -> BigUint {
    let n = lambda.length();
    let shifted: Vec<u64> = (1..=n).map(|i| (lambda.part_at(i) as usize + n - i) as u64).collect();
    let mut numerator = factorial(lambda.size() as u64);
    for i in 0..n {
        for j in i + 1..n {
            numerator *= shifted[i] - shifted[j];
        }
    }
    let denominator = shifted.iter().fold(BigUint::one(), |acc, &s| acc * factorial(s));
    numerator / denominator
}

/// Counts standard tableaux by removing corners recursively.
pub fn dim_oracle(lambda: &Partition) -> BigUint {
    fn go(l: &Partition, memo: &mut HashMap<Partition, BigUint>) -> BigUint {
        if l.is_empty() {
            return BigUint::one();
        }
        if let Some(v) = memo.get(l) {
            return v.clone();
        }
        let mut total = BigUint::zero();
        for r in l.corner_rows().collect::<Vec<_>>() {
            total += go(&l.without_box_in_row(r), memo);
        }
        memo.insert(l.clone(), total.clone());
        total
    }
    go(lambda, &mut HashMap::new())
}

/// `ln(dim λ / |λ|!)` in floating point.
pub fn ln_dim_over_factorial(lambda: &Partition) -> f64 {
    let n = lambda.length();
    let shifted: Vec<i64> = (1..=n).map(|i| (lambda.part_at(i) as usize + n - i) as i64).collect();
    let mut acc = 0.0;
    for i in 0..n {
        acc -= crate::specfun::ln_factorial(shifted[i] as u64);
        for j in i + 1..n {
            acc += ((shifted[i] - shifted[j]) as f64).ln();
        }
    }
    acc
}

/// Generalized Pochhammer symbol `(t)_λ = ∏_{(i,j)∈λ} (t + j - i)`.
pub fn pochhammer_partition(t: Complex64, lambda: &Partition) -> Complex64 {
    lambda
        .contents()
        .fold(Complex64::new(1.0, 0.0), |acc, c| acc * (t + c as f64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    #[test]
    fn dim_small_shapes() {
        assert_eq!(dim(&Partition::empty()), BigUint::one());
        assert_eq!(dim(&p("1")), BigUint::one());
        assert_eq!(dim(&p("2,1")), BigUint::from(2u32));
        assert_eq!(dim(&p("3,2")), BigUint::from(5u32));
    }

    #[test]
    fn dim_oracle_small_shapes() {
        assert_eq!(dim_oracle(&Partition::empty()), BigUint::one());
        assert_eq!(dim_oracle(&p("2,2")), BigUint::from(2u32));
        assert_eq!(dim_oracle(&p("2,1")), BigUint::from(2u32));
        assert_eq!(dim_oracle(&p("3,2")), BigUint::from(5u32));
    }

    #[test]
    fn dim_agrees_with_corner_recursion_up_to_20() {
        for n in 0..=20 {
            for l in enumerate_partitions(n).unwrap() {
                assert_eq!(dim(&l), dim_oracle(&l), "{l}");
            }
        }
    }

    #[test]
    fn ln_dim_matches_exact() {
        for l in enumerate_partitions(12).unwrap() {
            let exact: f64 = dim(&l).to_string().parse().unwrap();
            let ln_exact = exact.ln() - (1..=12).map(|k| (k as f64).ln()).sum::<f64>();
            assert!((ln_dim_over_factorial(&l) - ln_exact).abs() < 1e-12, "{l}");
        }
    }

    #[test]
    fn pochhammer_examples() {
        let t = Complex64::new(0.3, -1.7);
        assert_eq!(pochhammer_partition(t, &Partition::empty()), Complex64::new(1.0, 0.0));
        assert_eq!(pochhammer_partition(t, &p("1")), t);
        let want = t * (t + 1.0) * (t - 1.0);
        assert!((pochhammer_partition(t, &p("2,1")) - want).norm() < 1e-14);
    }

    #[test]
    fn pochhammer_vanishes_for_long_partitions() {
        let three = Complex64::new(3.0, 0.0);
        for n in 4..=10 {
            for l in enumerate_partitions(n).unwrap() {
                let v = pochhammer_partition(three, &l);
                if l.length() > 3 {
                    assert_eq!(v, Complex64::new(0.0, 0.0), "{l}");
                } else {
                    assert!(v.norm() > 0.0);
                }
            }
        }
    }

    #[test]
    fn maya_examples() {
        let m = maya(&Partition::empty());
        assert!(m.added.is_empty() && m.removed.is_empty());

        let m = maya(&p("1"));
        assert_eq!(m.added, [h("0.5")].into_iter().collect());
        assert_eq!(m.removed, [h("-0.5")].into_iter().collect());

        let m = maya(&p("2,1"));
        // X((2,1)) = {3/2, -1/2, -5/2, -7/2, ...}
        assert_eq!(m.added, [h("1.5")].into_iter().collect());
        assert_eq!(m.removed, [h("-1.5")].into_iter().collect());

        let m = maya(&p("3,3"));
        assert_eq!(m.added, [h("2.5"), h("1.5")].into_iter().collect());
        assert_eq!(m.removed, [h("-0.5"), h("-1.5")].into_iter().collect());
    }

    #[test]
    fn contains_point_examples() {
        assert!(contains_point(&Partition::empty(), h("-0.5")));
        assert!(!contains_point(&Partition::empty(), h("0.5")));
        assert!(contains_point(&p("2,1"), h("1.5")));
        assert!(contains_point(&p("2,1"), h("-0.5")));
        assert!(!contains_point(&p("2,1"), h("-1.5")));
        assert!(!contains_point(&p("2,1"), h("0.5")));
        assert!(contains_point(&p("2,1"), h("-2.5")));
    }

    #[test]
    fn contains_point_agrees_with_maya() {
        for n in 0..=9 {
            for l in enumerate_partitions(n).unwrap() {
                let m = maya(&l);
                for x in HalfInt::range_inclusive(h("-12.5"), h("12.5")) {
                    assert_eq!(contains_point(&l, x), m.contains(x), "{l} {x}");
                }
            }
        }
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_partitions(0).unwrap(), vec![Partition::empty()]);
        let four: Vec<String> = enumerate_partitions(4).unwrap().iter().map(|l| l.to_string()).collect();
        assert_eq!(four, ["4", "3,1", "2,2", "2,1,1", "1,1,1,1"]);
        assert_eq!(enumerate_partitions(10).unwrap().len(), 42);
        assert!(matches!(enumerate_partitions(61), Err(Error::SizeLimit { .. })));
    }

    #[test]
    fn parsing_and_display() {
        assert_eq!(p("").to_string(), "");
        assert_eq!(p("3,1,1").parts(), &[3, 1, 1]);
        assert!("1,2".parse::<Partition>().is_err());
        assert_eq!(h("-0.5").twice(), -1);
        assert_eq!(h("1.5").to_string(), "1.5");
        assert_eq!(HalfInt::from_twice(-3).unwrap().to_string(), "-1.5");
        assert_eq!(HalfInt::from_twice(-1).unwrap().to_string(), "-0.5");
        assert!("1.0".parse::<HalfInt>().is_err());
        assert!(HalfInt::from_twice(4).is_err());
    }

    #[test]
    fn halfint_floor_ceil() {
        for k in -7..7 {
            let x = HalfInt::from_floor(k);
            assert_eq!(x.floor(), k);
            assert_eq!(x.ceil(), k + 1);
            assert_eq!(x.value(), k as f64 + 0.5);
        }
        assert_eq!(h("2.5").int_sum(h("-0.5")), 2);
        assert_eq!(h("2.5").int_diff(h("-0.5")), 3);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(p("3,1").transpose(), p("2,1,1"));
        assert_eq!(Partition::empty().transpose(), Partition::empty());
        assert_eq!(p("2,2").transpose(), p("2,2"));
    }
}
