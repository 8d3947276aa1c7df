//! The discrete hypergeometric correlation kernel in its three forms (sum
//! over the eigenbasis, integrable form, double contour integral), the gauge
//! relating them, and the Christoffel–Darboux kernels of the Meixner and
//! Krawtchouk ensembles.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::partitions::HalfInt;
use crate::psi::{psi, QuadratureConfig};
use crate::specfun::{krawtchouk_tilde, ln_abs_gamma, log_gamma, meixner_tilde, KrawtchoukParams, MeixnerParams};
use crate::zmeasure::{Series, ZParams};

/// First truncation point of the eigenbasis sum.
const INITIAL_A_MAX: HalfInt = HalfInt::from_floor(10);

/// Number of times the eigenbasis range may be doubled.
const MAX_A_DOUBLINGS: u32 = 9;

/// A block of the eigenbasis sum below this size stops the doubling.
const BLOCK_TOL: f64 = 1e-12;

/// Largest tail accepted from the adaptive eigenbasis sum.
pub const SERIES_TAIL_TOL: f64 = 1e-10;

/// Which representation produced a kernel value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Cd,
    Contour,
    MeixnerCd,
    KrawtchoukCd,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Series => "series",
            Method::Cd => "cd",
            Method::Contour => "contour",
            Method::MeixnerCd => "meixnercd",
            Method::KrawtchoukCd => "krawtchoukcd",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "series" => Ok(Method::Series),
            "cd" => Ok(Method::Cd),
            "contour" => Ok(Method::Contour),
            "meixnercd" | "meixner" => Ok(Method::MeixnerCd),
            "krawtchoukcd" | "krawtchouk" => Ok(Method::KrawtchoukCd),
            other => Err(Error::Parse(format!("unknown kernel method {other:?}"))),
        }
    }
}

/// The symmetric kernel `K̲` or its gauge-equivalent `K̂`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Gauge {
    Underlined,
    Hatted,
}

impl FromStr for Gauge {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "underlined" => Ok(Gauge::Underlined),
            "hatted" => Ok(Gauge::Hatted),
            other => Err(Error::Parse(format!("unknown gauge {other:?}"))),
        }
    }
}

fn require_gauge_domain(prm: &ZParams) -> Result<()> {
    match prm.series() {
        Series::SecondDegenerate => Err(Error::Domain("the gauge factor needs 0 < xi < 1".into())),
        _ => Ok(()),
    }
}

/// `f(x) = Γ(x+z'+½) / √(Γ(x+z+½) Γ(x+z'+½))`; unimodular for the principal
/// series, real for the others.
pub fn gauge_f(x: HalfInt, prm: &ZParams) -> Result<Complex64> {
    require_gauge_domain(prm)?;
    let xv = x.value() + 0.5;
    let (z, zp) = (prm.z(), prm.zprime());
    let num = log_gamma(zp + xv)?;
    let half_ln_den = 0.5 * (ln_abs_gamma(z + xv)? + ln_abs_gamma(zp + xv)?);
    Ok((num - half_ln_den).exp())
}

/// `φ(x, y) = √(Γ(x+z+½)Γ(x+z'+½)Γ(y+z+½)Γ(y+z'+½)) / (Γ(x+z'+½) Γ(y+z+½))`.
pub fn phi(x: HalfInt, y: HalfInt, prm: &ZParams) -> Result<Complex64> {
    require_gauge_domain(prm)?;
    let (xv, yv) = (x.value() + 0.5, y.value() + 0.5);
    let (z, zp) = (prm.z(), prm.zprime());
    let half_ln_num =
        0.5 * (ln_abs_gamma(z + xv)? + ln_abs_gamma(zp + xv)? + ln_abs_gamma(z + yv)? + ln_abs_gamma(zp + yv)?);
    Ok((Complex64::new(half_ln_num, 0.0) - log_gamma(zp + xv)? - log_gamma(z + yv)?).exp())
}

/// A truncated eigenbasis sum with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSum {
    pub value: f64,
    pub tail: f64,
    pub a_max: HalfInt,
}

/// `ψ_a(x)` for `a = ½, 3/2, …` in `[lo, hi]`.
fn psi_block(x: HalfInt, lo: HalfInt, hi: HalfInt, prm: &ZParams) -> Result<Vec<f64>> {
    HalfInt::range_inclusive(lo, hi).map(|a| psi(a, x, prm)).collect()
}

/// Eigenbasis values `ψ_a(x_i)` for `a ∈ Z'₊` up to an adaptively chosen
/// cutoff.
struct PsiTable {
    columns: Vec<Vec<f64>>,
    a_max: HalfInt,
    tail: f64,
}

impl PsiTable {
    fn for_points(points: &[HalfInt], prm: &ZParams, fixed_a_max: Option<HalfInt>) -> Result<Self> {
        check_series_domain(prm)?;
        let fill = |lo: HalfInt, hi: HalfInt| -> Result<Vec<Vec<f64>>> {
            points.par_iter().map(|&x| psi_block(x, lo, hi, prm)).collect()
        };
        if let Some(a_max) = fixed_a_max {
            if !a_max.is_positive() {
                return Err(Error::Domain(format!("a_max must be at least 1/2, got {a_max}")));
            }
            let columns = fill(HalfInt::HALF, a_max)?;
            let tail = geometric_tail(&columns);
            return Ok(Self { columns, a_max, tail });
        }
        let mut a_max = INITIAL_A_MAX;
        let mut columns = fill(HalfInt::HALF, a_max)?;
        for _ in 0..MAX_A_DOUBLINGS {
            let next = HalfInt::from_floor(2 * a_max.floor() + 1);
            let block = fill(a_max.shift(1), next)?;
            let block_size = block_contribution(&block);
            for (c, b) in columns.iter_mut().zip(block) {
                c.extend(b);
            }
            a_max = next;
            if block_size < BLOCK_TOL {
                return Ok(Self {
                    columns,
                    a_max,
                    tail: block_size,
                });
            }
        }
        let tail = geometric_tail(&columns);
        Err(Error::Accuracy {
            context: "eigenbasis kernel sum did not converge",
            attained: tail,
        })
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        self.columns[i].iter().zip(&self.columns[j]).map(|(u, v)| u * v).sum()
    }
}

/// Largest `Σ_a |ψ_a(x)ψ_a(y)|` over pairs in a block.
fn block_contribution(block: &[Vec<f64>]) -> f64 {
    let norms: Vec<f64> = block.iter().map(|c| c.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let m = norms.iter().cloned().fold(0.0, f64::max);
    m * m
}

/// Tail of a truncated eigenbasis sum from the decay of its last terms.
fn geometric_tail(columns: &[Vec<f64>]) -> f64 {
    columns
        .iter()
        .map(|c| {
            let n = c.len();
            if n < 2 {
                return f64::INFINITY;
            }
            let (last, prev) = (c[n - 1] * c[n - 1], c[n - 2] * c[n - 2]);
            if last == 0.0 {
                return 0.0;
            }
            let r = last / prev;
            if r < 1.0 {
                last * r / (1.0 - r)
            } else {
                f64::INFINITY
            }
        })
        .fold(0.0, f64::max)
}

fn check_series_domain(prm: &ZParams) -> Result<()> {
    if prm.series() == Series::SecondDegenerate {
        return Err(Error::Domain(
            "the eigenbasis kernel needs 0 < xi < 1; use the Krawtchouk kernel".into(),
        ));
    }
    Ok(())
}

/// `Σ_{a ∈ Z'₊, a ≤ a_max} ψ_a(x) ψ_a(y)` with a geometric tail estimate.
pub fn kernel_series_truncated(x: HalfInt, y: HalfInt, prm: &ZParams, a_max: HalfInt) -> Result<KernelSum> {
    let t = PsiTable::for_points(&[x, y], prm, Some(a_max))?;
    Ok(KernelSum {
        value: t.entry(0, 1),
        tail: t.tail,
        a_max,
    })
}

/// The eigenbasis sum with the cutoff doubled from 21/2 until the last block
/// is negligible.
pub fn kernel_series_adaptive(x: HalfInt, y: HalfInt, prm: &ZParams) -> Result<KernelSum> {
    let t = PsiTable::for_points(&[x, y], prm, None)?;
    if t.tail > SERIES_TAIL_TOL {
        return Err(Error::Accuracy {
            context: "eigenbasis kernel tail too large",
            attained: t.tail,
        });
    }
    Ok(KernelSum {
        value: t.entry(0, 1),
        tail: t.tail,
        a_max: t.a_max,
    })
}

/// `K̲(x, y) = Σ_{a ∈ Z'₊} ψ_a(x) ψ_a(y)`.
pub fn kernel_series(x: HalfInt, y: HalfInt, prm: &ZParams) -> Result<f64> {
    Ok(kernel_series_adaptive(x, y, prm)?.value)
}

/// Integrable form
/// `√(zz'ξ)/(1-ξ) · (ψ_{-½}(x)ψ_{½}(y) - ψ_{½}(x)ψ_{-½}(y)) / (x - y)`, off the diagonal.
pub fn kernel_cd(x: HalfInt, y: HalfInt, prm: &ZParams) -> Result<f64> {
    if x == y {
        return Err(Error::Domain(
            "the integrable form is evaluated off the diagonal only; use kernel_series".into(),
        ));
    }
    let (p, q) = cd_factors(x, prm)?;
    let (r, s) = cd_factors(y, prm)?;
    Ok(cd_combine(x, y, (p, q), (r, s), prm))
}

fn cd_factors(x: HalfInt, prm: &ZParams) -> Result<(f64, f64)> {
    Ok((psi(HalfInt::MINUS_HALF, x, prm)?, psi(HalfInt::HALF, x, prm)?))
}

fn cd_combine(x: HalfInt, y: HalfInt, (mx, px): (f64, f64), (my, py): (f64, f64), prm: &ZParams) -> f64 {
    let xi = prm.xi();
    let c = (prm.zzprime() * xi).sqrt() / (1.0 - xi);
    c * (mx * py - px * my) / x.int_diff(y) as f64
}

/// Double contour integral `K̂(x, y)` on two circles of radius `q.radius()`.
pub fn kernel_contour(x: HalfInt, y: HalfInt, prm: &ZParams, q: &QuadratureConfig) -> Result<Complex64> {
    let m = contour_matrix(&[x, y], prm, q)?;
    Ok(m[(0, 1)])
}

fn check_double_contour(prm: &ZParams, q: &QuadratureConfig) -> Result<()> {
    require_gauge_domain(prm)?;
    q.check_admissible(prm.xi())?;
    if !(q.radius() > 1.0) {
        return Err(Error::Config(format!(
            "double contour radius must exceed 1 so that the inverted first circle lies inside the second, got {}",
            q.radius()
        )));
    }
    Ok(())
}

/// `K̂` on all pairs of `points`; node doubling is driven by the whole matrix.
fn contour_matrix(points: &[HalfInt], prm: &ZParams, q: &QuadratureConfig) -> Result<DMatrix<Complex64>> {
    check_double_contour(prm, q)?;
    let mut n = q.nodes();
    let mut prev = contour_matrix_at(points, prm, q.radius(), n)?;
    for _ in 0..q.max_doublings() {
        n *= 2;
        let (next, scale) = contour_matrix_at(points, prm, q.radius(), n)?;
        let converged = next
            .iter()
            .zip(prev.0.iter())
            .zip(scale.iter())
            .all(|((a, b), s)| (a - b).norm() <= 1e-12 * a.norm() + 64.0 * f64::EPSILON * s);
        prev = (next, scale);
        if converged {
            return Ok(prev.0);
        }
    }
    let worst = prev
        .0
        .iter()
        .zip(prev.1.iter())
        .map(|(a, s)| s * f64::EPSILON / a.norm().max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    Err(Error::Accuracy {
        context: "double contour quadrature did not converge",
        attained: worst,
    })
}

/// One trapezoid evaluation with `n` nodes per circle. Returns the matrix
/// and, per entry, the mean modulus of the summand (a roundoff scale).
fn contour_matrix_at(points: &[HalfInt], prm: &ZParams, r: f64, n: usize) -> Result<(DMatrix<Complex64>, DMatrix<f64>)> {
    let (z, zp) = (prm.z(), prm.zprime());
    let sq = prm.xi().sqrt();
    let nodes: Vec<Complex64> = (0..n).map(|k| Complex64::from_polar(r, 2.0 * PI * k as f64 / n as f64)).collect();
    let ln_in: Vec<Complex64> = nodes.iter().map(|w| (1.0 - sq * w).ln()).collect();
    let ln_out: Vec<Complex64> = nodes.iter().map(|w| (1.0 - sq / w).ln()).collect();
    // 1/(ω_j ω_k - 1) depends on (j + k) mod n only
    let circulant: Vec<Complex64> = (0..n)
        .map(|m| (Complex64::from_polar(r * r, 2.0 * PI * m as f64 / n as f64) - 1.0).inv())
        .collect();
    // dω₁dω₂ / (2πi)² over the trapezoid grid is ω₁ω₂/n² per node pair
    let first: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|x| {
            let e = -x.floor() as i32;
            (0..n)
                .map(|j| (ln_in[j] * (-zp) + ln_out[j] * z).exp() * nodes[j].powi(e))
                .collect()
        })
        .collect();
    let second: Vec<Vec<Complex64>> = points
        .par_iter()
        .map(|y| {
            let e = -y.floor() as i32;
            let f2: Vec<Complex64> = (0..n)
                .map(|k| (ln_in[k] * (-z) + ln_out[k] * zp).exp() * nodes[k].powi(e))
                .collect();
            // G(j) = Σ_k F₂(k) c((j + k) mod n)
            (0..n)
                .map(|j| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (k, f) in f2.iter().enumerate() {
                        acc += f * circulant[(j + k) % n];
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let p = points.len();
    let nn = (n * n) as f64;
    let mut out = DMatrix::from_element(p, p, Complex64::new(0.0, 0.0));
    let mut scale = DMatrix::from_element(p, p, 0.0);
    for i in 0..p {
        for j in 0..p {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut abs = 0.0;
            for (a, b) in first[i].iter().zip(&second[j]) {
                let t = a * b;
                acc += t;
                abs += t.norm();
            }
            out[(i, j)] = acc / nn;
            scale[(i, j)] = abs * n as f64 / nn;
        }
    }
    Ok((out, scale))
}

/// `Σ_{m<N} M̃_m(x̃) M̃_m(ỹ)`.
pub fn meixner_cd_kernel(xt: u32, yt: u32, big_n: u32, prm: &MeixnerParams) -> f64 {
    (0..big_n).map(|m| meixner_tilde(m, xt, prm) * meixner_tilde(m, yt, prm)).sum()
}

/// `Σ_{m<N} K̃_m(x̃) K̃_m(ỹ)` for the orthonormal Krawtchouk functions.
pub fn krawtchouk_cd_kernel(xt: u32, yt: u32, big_n: u32, prm: &KrawtchoukParams) -> Result<f64> {
    if big_n > prm.big_l() + 1 {
        return Err(Error::Domain(format!("N = {big_n} exceeds L + 1 = {}", prm.big_l() + 1)));
    }
    (0..big_n).try_fold(0.0, |acc, m| Ok(acc + krawtchouk_tilde(m, xt, prm)? * krawtchouk_tilde(m, yt, prm)?))
}

/// Kernel values on a point set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMatrix {
    pub points: Vec<HalfInt>,
    pub method: Method,
    pub gauge: Gauge,
    pub entries: Vec<Vec<f64>>,
    /// Imaginary parts, present only when some entry is non-real (hatted
    /// kernel of the principal series).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entries_im: Option<Vec<Vec<f64>>>,
}

impl KernelMatrix {
    pub fn dim(&self) -> usize {
        self.points.len()
    }

    pub fn is_complex(&self) -> bool {
        self.entries_im.is_some()
    }

    pub fn to_real(&self) -> DMatrix<f64> {
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| self.entries[i][j])
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        let p = self.dim();
        DMatrix::from_fn(p, p, |i, j| {
            Complex64::new(self.entries[i][j], self.entries_im.as_ref().map_or(0.0, |m| m[i][j]))
        })
    }

    fn from_complex(points: Vec<HalfInt>, method: Method, gauge: Gauge, m: &DMatrix<Complex64>) -> Self {
        let p = points.len();
        let entries = (0..p).map(|i| (0..p).map(|j| m[(i, j)].re).collect()).collect();
        let any_im = m.iter().any(|v| v.im != 0.0);
        let entries_im = any_im.then(|| (0..p).map(|i| (0..p).map(|j| m[(i, j)].im).collect()).collect());
        Self {
            points,
            method,
            gauge,
            entries,
            entries_im,
        }
    }

    fn from_real(points: Vec<HalfInt>, method: Method, gauge: Gauge, m: &DMatrix<f64>) -> Self {
        let p = points.len();
        Self {
            points,
            method,
            gauge,
            entries: (0..p).map(|i| (0..p).map(|j| m[(i, j)]).collect()).collect(),
            entries_im: None,
        }
    }

    /// Determinant; complex for a non-real hatted matrix.
    pub fn determinant(&self) -> Complex64 {
        if self.is_complex() {
            self.to_complex().determinant()
        } else {
            Complex64::new(self.to_real().determinant(), 0.0)
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("kernel matrices serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        let p = self.dim();
        let square = |rows: &Vec<Vec<f64>>| rows.len() == p && rows.iter().all(|r| r.len() == p);
        if !square(&self.entries) || !self.entries_im.as_ref().is_none_or(square) {
            return Err(Error::Parse(format!("kernel matrix entries must be {p}x{p}")));
        }
        let distinct: BTreeSet<_> = self.points.iter().collect();
        if distinct.len() != p {
            return Err(Error::Parse("kernel matrix points must be distinct".into()));
        }
        Ok(())
    }

    /// CSV with header `x,y,K` (plus `K_im` for complex matrices), rows in
    /// lexicographic order of `(x, y)`.
    pub fn to_csv(&self) -> String {
        let mut order: Vec<usize> = (0..self.dim()).collect();
        order.sort_by_key(|&i| self.points[i]);
        let mut out = String::from(if self.is_complex() { "x,y,K,K_im\n" } else { "x,y,K\n" });
        for &i in &order {
            for &j in &order {
                out.push_str(&format!("{},{},{}", self.points[i], self.points[j], format_number(self.entries[i][j])));
                if let Some(im) = &self.entries_im {
                    out.push_str(&format!(",{}", format_number(im[i][j])));
                }
                out.push('\n');
            }
        }
        out
    }
}

/// Shortest decimal that parses back to the same double, as in the JSON
/// output; `NaN` and infinities are spelled out.
pub fn format_number(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite numbers serialize")
    } else {
        v.to_string()
    }
}

fn check_distinct(points: &[HalfInt]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Domain("at least one point is required".into()));
    }
    let set: BTreeSet<_> = points.iter().collect();
    if set.len() != points.len() {
        return Err(Error::Domain("points must be pairwise distinct".into()));
    }
    Ok(())
}

/// Lowest lattice point of the support of the degenerate series; every point
/// below it is occupied almost surely.
fn always_occupied_below(prm: &ZParams) -> Option<HalfInt> {
    match prm.series() {
        Series::SecondDegenerate => prm.rectangle().map(|(n, _)| HalfInt::from_floor(-(n as i64))),
        Series::Degenerate => prm
            .degenerate_integer()
            .filter(|&n| n > 0)
            .map(|n| HalfInt::from_floor(-n)),
        _ => None,
    }
}

/// Builds the underlined kernel on the points of the support and sets
/// `K(x, y) = δ_{xy}` for almost surely occupied points below it.
fn underlined_matrix(points: &[HalfInt], prm: &ZParams, method: Method, q: &QuadratureConfig) -> Result<DMatrix<f64>> {
    let p = points.len();
    let floor = always_occupied_below(prm);
    let inside: Vec<usize> = (0..p).filter(|&i| floor.is_none_or(|f| points[i] >= f)).collect();
    let sub: Vec<HalfInt> = inside.iter().map(|&i| points[i]).collect();
    let core = if sub.is_empty() {
        DMatrix::zeros(0, 0)
    } else {
        underlined_core(&sub, prm, method, q)?
    };
    let mut out = DMatrix::from_fn(p, p, |i, j| if i == j { 1.0 } else { 0.0 });
    for (a, &i) in inside.iter().enumerate() {
        for (b, &j) in inside.iter().enumerate() {
            out[(i, j)] = core[(a, b)];
        }
    }
    Ok(out)
}

fn underlined_core(points: &[HalfInt], prm: &ZParams, method: Method, q: &QuadratureConfig) -> Result<DMatrix<f64>> {
    let p = points.len();
    match method {
        Method::Series => {
            let t = PsiTable::for_points(points, prm, None)?;
            if t.tail > SERIES_TAIL_TOL {
                return Err(Error::Accuracy {
                    context: "eigenbasis kernel tail too large",
                    attained: t.tail,
                });
            }
            Ok(DMatrix::from_fn(p, p, |i, j| t.entry(i, j)))
        }
        Method::Cd => {
            let factors: Vec<(f64, f64)> = points.par_iter().map(|&x| cd_factors(x, prm)).collect::<Result<_>>()?;
            let diag = PsiTable::for_points(points, prm, None)?;
            Ok(DMatrix::from_fn(p, p, |i, j| {
                if i == j {
                    diag.entry(i, i)
                } else {
                    cd_combine(points[i], points[j], factors[i], factors[j], prm)
                }
            }))
        }
        Method::Contour => {
            let hat = contour_matrix(points, prm, q)?;
            let f: Vec<Complex64> = points.iter().map(|&x| gauge_f(x, prm)).collect::<Result<_>>()?;
            Ok(DMatrix::from_fn(p, p, |i, j| (f[j] / f[i] * hat[(i, j)]).re))
        }
        Method::MeixnerCd => {
            let (n, beta) = prm.meixner_shape().ok_or_else(|| {
                Error::Domain("the Meixner kernel needs degenerate parameters (N, N + beta - 1) with N > 0".into())
            })?;
            let mp = MeixnerParams::new(beta, prm.xi())?;
            let shift = |x: HalfInt| (x.floor() + n as i64) as u32;
            Ok(DMatrix::from_fn(p, p, |i, j| meixner_cd_kernel(shift(points[i]), shift(points[j]), n, &mp)))
        }
        Method::KrawtchoukCd => {
            let (n, np) = prm
                .rectangle()
                .ok_or_else(|| Error::Domain("the Krawtchouk kernel needs second degenerate parameters".into()))?;
            let xi = prm.xi();
            let kp = KrawtchoukParams::new(xi / (xi - 1.0), n + np - 1)?;
            let top = (n + np - 1) as i64;
            let shift = |x: HalfInt| {
                let t = x.floor() + n as i64;
                (t <= top).then_some(t as u32)
            };
            let mut out = DMatrix::zeros(p, p);
            for i in 0..p {
                for j in 0..p {
                    if let (Some(a), Some(b)) = (shift(points[i]), shift(points[j])) {
                        out[(i, j)] = krawtchouk_cd_kernel(a, b, n, &kp)?;
                    }
                }
            }
            Ok(out)
        }
    }
}

/// Kernel matrix on `points` in the requested representation and gauge.
pub fn kernel_matrix(
    points: &[HalfInt],
    prm: &ZParams,
    method: Method,
    gauge: Gauge,
    q: &QuadratureConfig,
) -> Result<KernelMatrix> {
    check_distinct(points)?;
    let p = points.len();
    match gauge {
        Gauge::Underlined => {
            let m = underlined_matrix(points, prm, method, q)?;
            Ok(KernelMatrix::from_real(points.to_vec(), method, gauge, &m))
        }
        Gauge::Hatted => {
            let f: Vec<Complex64> = points.iter().map(|&x| gauge_f(x, prm)).collect::<Result<_>>()?;
            let m = if method == Method::Contour {
                contour_matrix(points, prm, q)?
            } else {
                let u = underlined_matrix(points, prm, method, q)?;
                DMatrix::from_fn(p, p, |i, j| f[i] / f[j] * u[(i, j)])
            };
            Ok(KernelMatrix::from_complex(points.to_vec(), method, gauge, &m))
        }
    }
}

/// Correlation function `det[K(x_i, x_j)]`.
pub fn corr_det(
    points: &[HalfInt],
    prm: &ZParams,
    method: Method,
    gauge: Gauge,
    q: &QuadratureConfig,
) -> Result<f64> {
    Ok(kernel_matrix(points, prm, method, gauge, q)?.determinant().re)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> HalfInt {
        s.parse().unwrap()
    }

    fn principal() -> ZParams {
        ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3).unwrap()
    }

    #[test]
    fn phi_and_gauge_f() {
        let prm = principal();
        for (x, y) in [("0.5", "0.5"), ("-2.5", "3.5"), ("1.5", "-0.5")] {
            let (x, y) = (h(x), h(y));
            let p = phi(x, y, &prm).unwrap();
            assert!((p * phi(y, x, &prm).unwrap() - 1.0).norm() < 1e-13);
            let ratio = gauge_f(y, &prm).unwrap() / gauge_f(x, &prm).unwrap();
            assert!((p - ratio).norm() < 1e-12);
            assert!((gauge_f(x, &prm).unwrap().norm() - 1.0).abs() < 1e-13);
        }
        assert!((phi(h("2.5"), h("2.5"), &prm).unwrap() - 1.0).norm() < 1e-14);
        let comp = ZParams::real(0.4, 0.7, 0.55).unwrap();
        for x in HalfInt::range_inclusive(h("-0.5"), h("6.5")) {
            let f = gauge_f(x, &comp).unwrap();
            assert!(f.re > 0.0 && f.im == 0.0, "{x} {f}");
        }
        // sign of Γ(x + z' + ½) at x = -3/2 is negative
        assert!(gauge_f(h("-1.5"), &comp).unwrap().re < 0.0);
    }

    #[test]
    fn series_symmetric_and_cd_agrees() {
        let prm = principal();
        let (x, y) = (h("-1.5"), h("2.5"));
        let kxy = kernel_series(x, y, &prm).unwrap();
        assert_eq!(kxy, kernel_series(y, x, &prm).unwrap());
        assert!((kxy - kernel_cd(x, y, &prm).unwrap()).abs() < 1e-10);
        assert!(matches!(kernel_cd(x, x, &prm), Err(Error::Domain(_))));
    }

    #[test]
    fn truncated_sum_reports_tail() {
        let prm = principal();
        let s = kernel_series_truncated(h("0.5"), h("0.5"), &prm, h("5.5")).unwrap();
        let full = kernel_series(h("0.5"), h("0.5"), &prm).unwrap();
        assert!(s.tail > 0.0);
        assert!((s.value - full).abs() < 10.0 * s.tail + 1e-15);
        assert!(kernel_series_truncated(h("0.5"), h("0.5"), &prm, h("-0.5")).is_err());
    }

    #[test]
    fn meixner_cd_basics() {
        let mp = MeixnerParams::new(1.7, 0.3).unwrap();
        let w0 = crate::specfun::meixner_weight(4, &mp);
        assert!((meixner_cd_kernel(4, 4, 1, &mp) - 0.7f64.powf(1.7) * w0).abs() < 1e-15);
        let trace: f64 = (0..=300).map(|x| meixner_cd_kernel(x, x, 3, &mp)).sum();
        assert!((trace - 3.0).abs() < 1e-9);
    }

    #[test]
    fn krawtchouk_cd_basics() {
        let kp = KrawtchoukParams::new(0.4, 5).unwrap();
        for x in 0..=5 {
            for y in 0..=5 {
                let k = krawtchouk_cd_kernel(x, y, 6, &kp).unwrap();
                let want = if x == y { 1.0 } else { 0.0 };
                assert!((k - want).abs() < 1e-12);
            }
        }
        let trace: f64 = (0..=5).map(|x| krawtchouk_cd_kernel(x, x, 3, &kp).unwrap()).sum();
        assert!((trace - 3.0).abs() < 1e-12);
        assert!(krawtchouk_cd_kernel(0, 0, 7, &kp).is_err());
    }

    #[test]
    fn contour_matches_series_small_case() {
        let prm = principal();
        let q = QuadratureConfig::double_contour(prm.xi());
        let (x, y) = (h("-0.5"), h("1.5"));
        let hat = kernel_contour(x, y, &prm, &q).unwrap();
        let under = phi(x, y, &prm).unwrap() * hat;
        assert!(under.im.abs() < 1e-10);
        assert!((under.re - kernel_series(x, y, &prm).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn matrix_json_round_trip_and_csv() {
        let prm = principal();
        let pts = [h("-0.5"), h("1.5")];
        let m = kernel_matrix(&pts, &prm, Method::Series, Gauge::Underlined, &QuadratureConfig::default()).unwrap();
        let s = m.to_json();
        assert_eq!(KernelMatrix::from_json(&s).unwrap().to_json(), s);
        let csv = m.to_csv();
        assert!(csv.starts_with("x,y,K\n-0.5,-0.5,"));
        assert_eq!(csv.lines().count(), 5);
        assert!(kernel_matrix(&[h("0.5"), h("0.5")], &prm, Method::Series, Gauge::Underlined, &QuadratureConfig::default()).is_err());
    }
}
