//! Ground truth by exhaustive enumeration: correlation functions of the
//! z-measures, orthogonal polynomial ensemble probabilities, the rectangular
//! tableaux push-forward, and an exact two-stage sampler.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::{contains_point, enumerate_partitions, HalfInt, Partition};
use crate::specfun::{krawtchouk_weight, ln_meixner_weight, meixner_weight, KrawtchoukParams, MeixnerParams};
use crate::zmeasure::{neumaier_sum, size_law, size_tail, weight, weight_fixed_n, ZParams};

/// Largest `n_max` for correlation sums and sampling.
pub const MAX_ORACLE_SIZE: usize = 40;

/// Largest ensemble size for [`ensemble_brute_corr`].
pub const MAX_ENSEMBLE_POINTS: u32 = 6;

/// Largest rectangle area for [`tableaux_pushforward`].
pub const MAX_TABLEAUX_AREA: u32 = 16;

/// Largest mixing tail tolerated by the sampler.
pub const SAMPLER_TAIL_TOL: f64 = 1e-9;

/// Relative size of the last Meixner weight kept by the ensemble oracle.
const MEIXNER_CUTOFF_TOL: f64 = 1e-14;

/// A correlation function value from enumeration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrResult {
    pub points: Vec<HalfInt>,
    pub value: f64,
    pub tail_bound: f64,
    #[serde(rename = "n_max")]
    pub n_max_used: usize,
}

fn guard(n_max: usize) -> Result<()> {
    if n_max > MAX_ORACLE_SIZE {
        return Err(Error::SizeLimit {
            what: "n_max",
            value: n_max,
            limit: MAX_ORACLE_SIZE,
        });
    }
    Ok(())
}

fn check_distinct(points: &[HalfInt]) -> Result<()> {
    let set: BTreeSet<_> = points.iter().collect();
    if set.len() != points.len() {
        return Err(Error::Domain("points must be pairwise distinct".into()));
    }
    Ok(())
}

/// All diagrams with `|λ| ≤ n_max` and their weights, grouped by size.
#[derive(Debug, Clone)]
pub struct WeightTable {
    prm: ZParams,
    n_max: usize,
    by_size: Vec<Vec<(Partition, f64)>>,
}

impl WeightTable {
    pub fn new(prm: &ZParams, n_max: usize) -> Result<Self> {
        guard(n_max)?;
        let by_size = (0..=n_max)
            .into_par_iter()
            .map(|n| -> Result<Vec<(Partition, f64)>> {
                Ok(enumerate_partitions(n)?
                    .into_iter()
                    .map(|l| {
                        let w = weight(prm, &l);
                        (l, w)
                    })
                    .collect())
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            prm: *prm,
            n_max,
            by_size,
        })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn params(&self) -> &ZParams {
        &self.prm
    }

    /// Mass of the omitted sizes.
    pub fn tail_bound(&self) -> f64 {
        size_tail(&self.prm, self.n_max)
    }

    /// Enumerated mass.
    pub fn partial_sum(&self) -> f64 {
        neumaier_sum(self.by_size.iter().map(|b| neumaier_sum(b.iter().map(|(_, w)| *w))))
    }

    /// `Σ M(λ)` over enumerated `λ` whose Maya diagram contains every point.
    pub fn corr(&self, points: &[HalfInt]) -> Result<CorrResult> {
        check_distinct(points)?;
        let shards: Vec<f64> = self
            .by_size
            .par_iter()
            .map(|b| {
                neumaier_sum(
                    b.iter()
                        .filter(|(l, _)| points.iter().all(|&x| contains_point(l, x)))
                        .map(|(_, w)| *w),
                )
            })
            .collect();
        Ok(CorrResult {
            points: points.to_vec(),
            value: neumaier_sum(shards),
            tail_bound: self.tail_bound(),
            n_max_used: self.n_max,
        })
    }

    /// `Σ |λ| M(λ)` over the enumerated diagrams.
    pub fn mean_size(&self) -> f64 {
        neumaier_sum(
            self.by_size
                .iter()
                .enumerate()
                .map(|(n, b)| n as f64 * neumaier_sum(b.iter().map(|(_, w)| *w))),
        )
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Partition, f64)> {
        self.by_size.iter().flatten()
    }
}

/// `ρ(points)` by direct enumeration of `|λ| ≤ n_max`.
pub fn brute_corr(points: &[HalfInt], prm: &ZParams, n_max: usize) -> Result<CorrResult> {
    check_distinct(points)?;
    WeightTable::new(prm, n_max)?.corr(points)
}

/// Weight family of an orthogonal polynomial ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Family {
    Meixner(MeixnerParams),
    Krawtchouk(KrawtchoukParams),
}

/// An ensemble correlation value with the mass neglected by truncating an
/// infinite support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub value: f64,
    pub tail_bound: f64,
    pub support_max: u32,
}

/// Truncation point of the Meixner support and the relative one-point mass
/// beyond it, with a polynomial factor for the Vandermonde.
fn meixner_cutoff(big_n: u32, prm: &MeixnerParams) -> (u32, f64) {
    let power = 2.0 * (big_n as f64 - 1.0);
    let g = |x: u32| (ln_meixner_weight(x, prm) + power * (1.0 + x as f64).ln()).exp();
    let mut head = 0.0;
    let mut x = 0u32;
    // past the mode the terms decrease, so stop at the first negligible one
    loop {
        let term = g(x);
        head += term;
        if x + 1 >= big_n && term < MEIXNER_CUTOFF_TOL * head && g(x + 1) < term {
            break;
        }
        x += 1;
    }
    let tail: f64 = ((x + 1)..(x + 1000)).map(g).sum();
    (x, tail / head * big_n as f64)
}

/// Probability that the `N`-point ensemble contains the given points.
pub fn ensemble_brute_corr(points: &[u32], big_n: u32, family: &Family) -> Result<EnsembleResult> {
    if big_n == 0 || big_n > MAX_ENSEMBLE_POINTS {
        return Err(Error::SizeLimit {
            what: "ensemble size N",
            value: big_n as usize,
            limit: MAX_ENSEMBLE_POINTS as usize,
        });
    }
    let set: BTreeSet<u32> = points.iter().copied().collect();
    if set.len() != points.len() {
        return Err(Error::Domain("points must be pairwise distinct".into()));
    }
    let (top, tail, w): (u32, f64, Vec<f64>) = match family {
        Family::Meixner(mp) => {
            let (t, tail) = meixner_cutoff(big_n, mp);
            (t, tail, (0..=t).map(|x| meixner_weight(x, mp)).collect())
        }
        Family::Krawtchouk(kp) => {
            let l = kp.big_l();
            if big_n > l + 1 {
                return Err(Error::Domain(format!("N = {big_n} exceeds the {} support points", l + 1)));
            }
            (l, 0.0, (0..=l).map(|x| krawtchouk_weight(x, kp)).collect::<Result<_>>()?)
        }
    };
    let result = |value| EnsembleResult {
        value,
        tail_bound: tail,
        support_max: top,
    };
    if points.len() > big_n as usize || points.iter().any(|&p| p > top) {
        return Ok(result(0.0));
    }
    let mut total = 0.0;
    let mut hit = 0.0;
    let mut chosen = Vec::with_capacity(big_n as usize);
    walk_configurations(&w, big_n as usize, 0, 1.0, &mut chosen, &mut |cfg, p| {
        total += p;
        if set.iter().all(|x| cfg.contains(x)) {
            hit += p;
        }
    });
    Ok(result(hit / total))
}

/// Visits increasing configurations with `∏ W(x_i) ∏ (x_i - x_j)²`.
fn walk_configurations<F: FnMut(&[u32], f64)>(
    w: &[f64],
    remaining: usize,
    start: usize,
    acc: f64,
    chosen: &mut Vec<u32>,
    visit: &mut F,
) {
    if remaining == 0 {
        visit(chosen, acc);
        return;
    }
    for x in start..=(w.len() - remaining) {
        let vd: f64 = chosen.iter().map(|&c| (x as f64 - c as f64).powi(2)).product();
        chosen.push(x as u32);
        walk_configurations(w, remaining - 1, x + 1, acc * w[x] * vd, chosen, visit);
        chosen.pop();
    }
}

/// Probability of the configuration `{λ_i + N - i}` in the `N`-point ensemble,
/// by normalizing over all configurations in the support.
pub fn ensemble_configuration_probability(config: &[u32], big_n: u32, family: &Family) -> Result<f64> {
    if config.len() != big_n as usize {
        return Err(Error::Domain("a configuration has exactly N points".into()));
    }
    Ok(ensemble_brute_corr(config, big_n, family)?.value)
}

/// `{λ_i + N - i : i = 1..N}` for `ℓ(λ) ≤ N`.
pub fn shifted_configuration(lambda: &Partition, big_n: u32) -> Option<Vec<u32>> {
    (lambda.length() <= big_n as usize)
        .then(|| (1..=big_n as usize).map(|i| lambda.part_at(i) + big_n - i as u32).collect())
}

fn rectangle_subdiagrams(rows: u32, cols: u32) -> Vec<Vec<u32>> {
    fn rec(rows: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == rows as usize {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=max {
            prefix.push(v);
            rec(rows, v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(rows, cols, &mut Vec::new(), &mut out);
    out
}

/// Distribution of `λ^{(n)}` under the uniform measure on standard tableaux
/// of the `N × N'` rectangle, as exact rationals.
pub fn tableaux_pushforward(big_n: u32, big_nprime: u32, n: u32) -> Result<BTreeMap<Partition, BigRational>> {
    let area = big_n * big_nprime;
    if area > MAX_TABLEAUX_AREA {
        return Err(Error::SizeLimit {
            what: "rectangle area",
            value: area as usize,
            limit: MAX_TABLEAUX_AREA as usize,
        });
    }
    if n > area {
        return Err(Error::Domain(format!("n = {n} exceeds the rectangle area {area}")));
    }
    // growth paths from ∅ (forward) and to the rectangle (backward), counted
    // over the lattice of subdiagrams stored as padded row vectors
    let shapes = rectangle_subdiagrams(big_n, big_nprime);
    let size = |s: &Vec<u32>| s.iter().sum::<u32>();
    let mut by_size: Vec<&Vec<u32>> = shapes.iter().collect();
    by_size.sort_by_key(|s| size(s));
    let mut forward: HashMap<&Vec<u32>, BigUint> = HashMap::new();
    for s in &by_size {
        let count = if size(s) == 0 {
            BigUint::one()
        } else {
            removable(s).iter().map(|t| forward[t].clone()).sum()
        };
        forward.insert(s, count);
    }
    let mut backward: HashMap<&Vec<u32>, BigUint> = HashMap::new();
    for s in by_size.iter().rev() {
        let count = if size(s) == area {
            BigUint::one()
        } else {
            addable(s, big_nprime).iter().map(|t| backward[t].clone()).sum()
        };
        backward.insert(s, count);
    }
    let total = BigRational::from_integer(forward[shapes.iter().find(|s| size(s) == area).unwrap()].clone().into());
    let mut out = BTreeMap::new();
    for s in shapes.iter().filter(|s| size(s) == n) {
        let paths = &forward[s] * &backward[s];
        if paths.is_zero() {
            continue;
        }
        out.insert(Partition::new(s.clone())?, BigRational::from_integer(paths.into()) / &total);
    }
    Ok(out)
}

fn removable(s: &[u32]) -> Vec<Vec<u32>> {
    (0..s.len())
        .filter(|&i| s[i] > 0 && s.get(i + 1).is_none_or(|&next| next < s[i]))
        .map(|i| {
            let mut t = s.to_vec();
            t[i] -= 1;
            t
        })
        .collect()
}

fn addable(s: &[u32], cols: u32) -> Vec<Vec<u32>> {
    (0..s.len())
        .filter(|&i| s[i] < cols && (i == 0 || s[i - 1] > s[i]))
        .map(|i| {
            let mut t = s.to_vec();
            t[i] += 1;
            t
        })
        .collect()
}

/// One draw of the sampler.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub seed: u64,
    pub index: u64,
    pub n: usize,
    pub partition: Partition,
}

/// Inverse-CDF lookup: first index whose cumulative value exceeds `u`.
fn inverse_cdf(cdf: &[f64], u: f64) -> usize {
    let target = u * cdf.last().copied().unwrap_or(0.0);
    cdf.partition_point(|&c| c <= target).min(cdf.len() - 1)
}

fn cumulative(values: impl IntoIterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    values
        .into_iter()
        .map(|v| {
            acc += v.max(0.0);
            acc
        })
        .collect()
}

/// Exact two-stage sampler: `n = |λ|` from the truncated mixing law, then `λ`
/// from the conditional law on diagrams of size `n`.
///
/// Record `i` uses its own stream of a ChaCha generator keyed by `seed`, so a
/// record does not depend on how many others were drawn.
pub fn sample(prm: &ZParams, count: usize, n_max: usize, seed: u64) -> Result<Vec<SampleRecord>> {
    sample_range(prm, 0..count as u64, n_max, seed)
}

/// Records with the given indices; see [`sample`].
pub fn sample_range(
    prm: &ZParams,
    indices: std::ops::Range<u64>,
    n_max: usize,
    seed: u64,
) -> Result<Vec<SampleRecord>> {
    guard(n_max)?;
    let tail = size_tail(prm, n_max);
    if tail > SAMPLER_TAIL_TOL {
        return Err(Error::Config(format!(
            "mixing tail {tail:e} beyond n_max = {n_max} exceeds {SAMPLER_TAIL_TOL:e}; raise n_max"
        )));
    }
    let size_cdf = cumulative((0..=n_max).map(|n| size_law(prm, n)));
    let mut by_size: HashMap<usize, (Vec<Partition>, Vec<f64>)> = HashMap::new();
    let mut out = Vec::with_capacity((indices.end - indices.start) as usize);
    for index in indices {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        let n = inverse_cdf(&size_cdf, rng.gen::<f64>());
        if let std::collections::hash_map::Entry::Vacant(e) = by_size.entry(n) {
            let parts = enumerate_partitions(n)?;
            let cdf = cumulative(
                parts
                    .iter()
                    .map(|l| weight_fixed_n(prm, l))
                    .collect::<Result<Vec<_>>>()?,
            );
            e.insert((parts, cdf));
        }
        let (parts, cdf) = &by_size[&n];
        let lambda = parts[inverse_cdf(cdf, rng.gen::<f64>())].clone();
        out.push(SampleRecord {
            seed,
            index,
            n,
            partition: lambda,
        });
    }
    Ok(out)
}

/// Truncated, renormalized mixing law used by the sampler.
pub fn truncated_size_law(prm: &ZParams, n_max: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..=n_max).map(|n| size_law(prm, n)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|p| p / total).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    fn principal(xi: f64) -> ZParams {
        ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), xi).unwrap()
    }

    #[test]
    fn deep_point_gives_partial_sum() {
        let t = WeightTable::new(&principal(0.3), 12).unwrap();
        let r = t.corr(&[h("-13.5")]).unwrap();
        assert!((r.value - t.partial_sum()).abs() < 1e-15);
        assert!(brute_corr(&[h("0.5"), h("0.5")], &principal(0.3), 5).is_err());
        assert!(brute_corr(&[h("0.5")], &principal(0.3), 41).is_err());
    }

    #[test]
    fn small_xi_excludes_positive_points() {
        let r = brute_corr(&[h("0.5"), h("-0.5")], &principal(1e-9), 6).unwrap();
        assert!(r.value < 1e-8);
    }

    #[test]
    fn ensemble_trivial_cases() {
        let kp = KrawtchoukParams::new(0.4, 3).unwrap();
        let fam = Family::Krawtchouk(kp);
        assert_eq!(ensemble_brute_corr(&[0, 1, 2], 2, &fam).unwrap().value, 0.0);
        for x in 0..=3 {
            assert!((ensemble_brute_corr(&[x], 4, &fam).unwrap().value - 1.0).abs() < 1e-15);
        }
        assert!(ensemble_brute_corr(&[0], 7, &fam).is_err());
    }

    #[test]
    fn tableaux_small_rectangles() {
        let d = tableaux_pushforward(2, 2, 0).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!(d[&Partition::empty()], BigRational::one());
        let d = tableaux_pushforward(2, 2, 2).unwrap();
        let half = BigRational::new(1.into(), 2.into());
        assert_eq!(d[&"2".parse::<Partition>().unwrap()], half);
        assert_eq!(d[&"1,1".parse::<Partition>().unwrap()], half);
        let d = tableaux_pushforward(2, 3, 6).unwrap();
        assert_eq!(d[&"3,3".parse::<Partition>().unwrap()], BigRational::one());
        assert!(tableaux_pushforward(4, 5, 1).is_err());
    }

    #[test]
    fn sampler_is_reproducible_per_index() {
        let prm = principal(0.3);
        let all = sample(&prm, 20, 30, 7).unwrap();
        let tail = sample_range(&prm, 15..20, 30, 7).unwrap();
        assert_eq!(&all[15..], &tail[..]);
        assert!(sample(&principal(1e-9), 10, 5, 1).unwrap().iter().all(|r| r.partition.is_empty()));
        assert!(matches!(sample(&principal(0.9), 10, 10, 1), Err(Error::Config(_))));
    }
}
