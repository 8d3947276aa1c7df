//! Self-checks of the library identities, grouped by module. Used by the
//! `verify` command.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{corr_det, gauge_f, kernel_matrix, meixner_cd_kernel, Gauge, Method};
use crate::oracle::{
    ensemble_brute_corr, sample, shifted_configuration, tableaux_pushforward, Family, WeightTable,
};
use crate::partitions::{
    dim, dim_oracle, enumerate_partitions, maya, maya_inverse, pochhammer_partition, HalfInt, Partition,
};
use crate::psi::{apply_d, hyp2f1_reg_contour, psi, psi_contour, three_term_residual, QuadratureConfig};
use crate::specfun::{
    hyp2f1_reg, hyp2f1_reg_direct, krawtchouk, krawtchouk_weight, log_gamma, meixner, meixner_tilde,
    KrawtchoukParams, MeixnerParams,
};
use crate::zmeasure::{negative_binomial, total_mass, weight, weight_fixed_n, weight_fixed_n_exact, ZParams};

/// Names of the available suites.
pub const SUITES: [&str; 6] = ["partitions", "specfun", "zmeasure", "psi", "kernel", "oracle"];

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub identity: &'static str,
    pub tolerance: f64,
    pub attained: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.attained <= self.tolerance
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4} {:<10} {:<28} {:<34} tol={:<9.2e} err={:.3e}",
            if self.passed() { "ok" } else { "FAIL" },
            self.suite,
            self.name,
            self.identity,
            self.tolerance,
            self.attained
        )
    }
}

/// Tolerance overrides keyed by check name.
pub type Overrides = BTreeMap<String, f64>;

struct Recorder<'a> {
    suite: &'static str,
    overrides: &'a Overrides,
    out: Vec<Check>,
}

impl Recorder<'_> {
    fn record(&mut self, name: &'static str, identity: &'static str, tolerance: f64, attained: Result<f64>) {
        let tolerance = self.overrides.get(name).copied().unwrap_or(tolerance);
        // an evaluation error counts as an infinite error
        let attained = attained.unwrap_or(f64::INFINITY);
        self.out.push(Check {
            suite: self.suite,
            name,
            identity,
            tolerance,
            attained: if attained.is_nan() { f64::INFINITY } else { attained },
        });
    }
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(suite: &str, overrides: &Overrides) -> Result<Vec<Check>> {
    if suite == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run_suite(s, overrides)?);
        }
        return Ok(out);
    }
    let name = SUITES
        .iter()
        .copied()
        .find(|s| *s == suite)
        .ok_or_else(|| Error::Config(format!("unknown suite {suite:?}; expected one of {SUITES:?} or all")))?;
    let mut r = Recorder {
        suite: name,
        overrides,
        out: Vec::new(),
    };
    match name {
        "partitions" => partitions_suite(&mut r),
        "specfun" => specfun_suite(&mut r),
        "zmeasure" => zmeasure_suite(&mut r),
        "psi" => psi_suite(&mut r),
        "kernel" => kernel_suite(&mut r),
        _ => oracle_suite(&mut r),
    }
    Ok(r.out)
}

fn all_partitions(max: usize) -> Vec<Partition> {
    (0..=max).flat_map(|n| enumerate_partitions(n).expect("small sizes")).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(f64::MIN_POSITIVE)
}

fn max_of<I: IntoIterator<Item = Result<f64>>>(it: I) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

fn grid(lo: &str, hi: &str) -> Vec<HalfInt> {
    HalfInt::range_inclusive(lo.parse().unwrap(), hi.parse().unwrap()).collect()
}

fn principal(xi: f64) -> ZParams {
    ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), xi).expect("valid")
}

fn complementary() -> ZParams {
    ZParams::real(0.4, 0.7, 0.55).expect("valid")
}

fn partitions_suite(r: &mut Recorder) {
    let upto20 = all_partitions(20);
    let mismatches = upto20.iter().filter(|l| dim(l) != dim_oracle(l)).count();
    r.record("dim_vs_corner_recursion", "standard tableaux count", 0.0, Ok(mismatches as f64));
    let bad = upto20.iter().filter(|l| l.transpose().transpose() != **l).count();
    r.record("transpose_involution", "transpose twice", 0.0, Ok(bad as f64));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ts: Vec<Complex64> = (0..20)
        .map(|_| Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)))
        .collect();
    let err = all_partitions(12)
        .iter()
        .flat_map(|l| ts.iter().map(move |&t| (l, t)))
        .map(|(l, t)| {
            let sign = if l.size() % 2 == 0 { 1.0 } else { -1.0 };
            crel(pochhammer_partition(t, l), sign * pochhammer_partition(-t, &l.transpose()))
        })
        .fold(0.0, f64::max);
    r.record("pochhammer_symmetry", "(t)_λ = (-1)^|λ| (-t)_λ'", 1e-12, Ok(err));

    let bad = all_partitions(12)
        .iter()
        .filter(|l| l.length() > 2 && pochhammer_partition(Complex64::new(2.0, 0.0), l) != Complex64::new(0.0, 0.0))
        .count();
    r.record("pochhammer_vanishing", "(N)_λ = 0 for ℓ(λ) > N", 0.0, Ok(bad as f64));

    let bad = all_partitions(15)
        .iter()
        .filter(|l| {
            let m = maya(l);
            maya_inverse(&m).ok().as_ref() != Some(*l) || maya(&l.transpose()) != m.transpose()
        })
        .count();
    r.record("maya_round_trip", "X(λ') = -(Z' \\ X(λ))", 0.0, Ok(bad as f64));
}

fn specfun_suite(r: &mut Recorder) {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let random_c =
        |rng: &mut ChaCha8Rng, scale: f64| Complex64::new(rng.gen_range(-scale..scale), rng.gen_range(-scale..scale));
    let ws: Vec<Complex64> = (0..100).map(|_| random_c(&mut rng, 10.0)).collect();
    let err = max_of(ws.iter().map(|&w| {
        let lhs = (log_gamma(w)? + log_gamma(1.0 - w)?).exp();
        Ok(crel(lhs, PI / (PI * w).sin()))
    }));
    r.record("gamma_reflection", "Γ(w)Γ(1-w) = π/sin πw", 1e-11, err);

    let a_s: Vec<Complex64> = (0..50).map(|_| random_c(&mut rng, 5.0)).collect();
    let err = max_of(a_s.iter().map(|&a| {
        let lhs = (log_gamma(0.5 + a)? + log_gamma(0.5 - a)?).exp();
        Ok(crel(lhs, PI / (PI * a).cos()))
    }));
    r.record("gamma_half_product", "Γ(½+A)Γ(½-A) = π/cos πA", 1e-11, err);

    let triples: Vec<(Complex64, Complex64, Complex64)> = (0..50)
        .map(|_| {
            let c = Complex64::new(rng.gen_range(0.2..6.0), rng.gen_range(-2.0..2.0));
            (random_c(&mut rng, 4.0), random_c(&mut rng, 4.0), c)
        })
        .collect();
    let w = 0.3 / (0.3 - 1.0);
    let err = max_of(
        triples
            .iter()
            .map(|&(a, b, c)| Ok(crel(hyp2f1_reg(a, b, c, w)?, hyp2f1_reg_direct(a, b, c, w)?))),
    );
    r.record("hyp2f1_pfaff_vs_direct", "Pfaff transformation", 1e-12, err);

    let mp = MeixnerParams::new(1.7, 0.3).expect("valid");
    let (beta, c) = (mp.beta(), mp.xi());
    let mut rec_err = 0.0f64;
    let mut diff_err = 0.0f64;
    for n in 1..30u32 {
        for x in 1..30u32 {
            let (nf, xf) = (n as f64, x as f64);
            let m = |k: u32, t: u32| meixner(k, t, &mp);
            let lhs = (c - 1.0) * xf * m(n, x);
            let terms = [c * (nf + beta) * m(n + 1, x), -(nf + (nf + beta) * c) * m(n, x), nf * m(n - 1, x)];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(lhs.abs());
            rec_err = rec_err.max((lhs - terms.iter().sum::<f64>()).abs() / scale);
            let lhs = nf * (c - 1.0) * m(n, x);
            let terms = [c * (xf + beta) * m(n, x + 1), -(xf + (xf + beta) * c) * m(n, x), xf * m(n, x - 1)];
            let scale = terms.iter().map(|t| t.abs()).sum::<f64>().max(lhs.abs());
            diff_err = diff_err.max((lhs - terms.iter().sum::<f64>()).abs() / scale);
        }
    }
    r.record("meixner_three_term", "Meixner recurrence in n", 1e-10, Ok(rec_err));
    r.record("meixner_difference", "Meixner difference equation", 1e-10, Ok(diff_err));

    let mut gram_err = 0.0f64;
    for m in 0..=10 {
        for n in 0..=10 {
            let s: f64 = (0..=400).map(|x| meixner_tilde(m, x, &mp) * meixner_tilde(n, x, &mp)).sum();
            gram_err = gram_err.max((s - if m == n { 1.0 } else { 0.0 }).abs());
        }
    }
    r.record("meixner_orthonormal", "orthonormal Meixner functions", 1e-9, Ok(gram_err));

    let kp = KrawtchoukParams::new(0.4, 6).expect("valid");
    let err = max_of((0..=6).flat_map(|m| (0..=6).filter(move |&n| n != m).map(move |n| (m, n))).map(|(m, n)| {
        (0..=6).try_fold(0.0, |acc, x| Ok(acc + krawtchouk(m, x, &kp)? * krawtchouk(n, x, &kp)? * krawtchouk_weight(x, &kp)?))
            .map(f64::abs)
    }));
    r.record("krawtchouk_orthogonal", "Krawtchouk orthogonality", 1e-12, err);
}

fn zmeasure_suite(r: &mut Recorder) {
    let points = [
        principal(0.3),
        complementary(),
        ZParams::real(3.0, 3.7, 0.3).expect("valid"),
        ZParams::real(2.0, -3.0, -0.5).expect("valid"),
    ];
    let err = max_of(points.iter().take(3).map(|p| {
        let m = total_mass(p, 30)?;
        Ok(((m.partial_sum - 1.0).abs() - m.tail_bound).max(0.0))
    }));
    r.record("normalization", "total mass one", 1e-12, err);

    let diagrams = all_partitions(15);
    let negatives = points
        .iter()
        .flat_map(|p| diagrams.iter().map(move |l| weight(p, l)))
        .filter(|w| *w < 0.0)
        .count();
    r.record("nonnegativity", "weights are nonnegative", 0.0, Ok(negatives as f64));

    let small = all_partitions(12);
    let err = max_of(points.iter().take(2).map(|p| {
        let q = p.negated()?;
        Ok(small.iter().map(|l| rel(weight(p, l), weight(&q, &l.transpose()))).fold(0.0, f64::max))
    }));
    r.record("transposition_symmetry", "M(λ; z,z') = M(λ'; -z,-z')", 1e-12, err);

    let err = points
        .iter()
        .flat_map(|p| small.iter().map(move |l| rel(weight(p, l), weight(&p.swapped(), l))))
        .fold(0.0, f64::max);
    r.record("swap_symmetry", "M invariant under z ↔ z'", 1e-13, Ok(err));

    let err = max_of(points.iter().take(3).flat_map(|p| {
        small.iter().map(move |l| {
            let w = weight(p, l);
            Ok(rel(w, weight_fixed_n(p, l)? * negative_binomial(p, l.size())?))
        })
    }));
    r.record("mixing_identity", "negative binomial mixture", 1e-12, err);

    let second = &points[3];
    let bad = small
        .iter()
        .filter(|l| {
            let w = weight(second, l);
            if l.fits_in(2, 3) {
                w <= 0.0
            } else {
                w != 0.0
            }
        })
        .count()
        + small
            .iter()
            .filter(|l| l.length() > 3 && weight(&points[2], l) != 0.0)
            .count();
    r.record("degenerate_support", "support of degenerate series", 0.0, Ok(bad as f64));

    let err = max_of((1..=6).flat_map(|n| enumerate_partitions(n).expect("small")).map(|l| {
        let exact = weight_fixed_n_exact(2, -3, &l)?;
        let approx = weight_fixed_n(second, &l)?;
        Ok(rel(rational_to_f64(&exact), approx))
    }));
    r.record("fixed_n_exact", "exact conditional law", 1e-13, err);
}

fn rational_to_f64(q: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().unwrap_or(f64::NAN)
}

fn psi_params() -> [ZParams; 3] {
    [principal(0.3), complementary(), principal(0.85)]
}

/// Largest value of `f` over parameter sets and pairs of lattice points.
fn over_pairs<F>(params: &[ZParams], pts: &[HalfInt], f: F) -> Result<f64>
where
    F: Fn(&ZParams, HalfInt, HalfInt) -> Result<f64>,
{
    let mut worst = 0.0f64;
    for p in params {
        for &a in pts {
            for &x in pts {
                worst = worst.max(f(p, a, x)?);
            }
        }
    }
    Ok(worst)
}

fn psi_suite(r: &mut Recorder) {
    let lattice = grid("-9.5", "9.5");
    let params = psi_params();
    let err = over_pairs(&params, &lattice, |p, a, x| {
        let lhs = apply_d(|t| psi(a, t, p), x, p)?;
        let rhs = a.value() * (1.0 - p.xi()) * psi(a, x, p)?;
        Ok((lhs - rhs).abs() / d_scale(a, x, p)?)
    });
    r.record("eigenvalue_equation", "D ψ_a = a(1-ξ) ψ_a", 1e-9, err);

    let err = over_pairs(&params, &lattice, |p, a, x| {
        let res = three_term_residual(a, x, p)?;
        Ok(res / (x.value() * psi(a, x, p)?).abs().max(1.0))
    });
    r.record("three_term_relation", "three-term relation in a", 1e-9, err);

    let small = grid("-4.5", "4.5");
    let err = over_pairs(&params[..2], &small, |p, a, x| {
        let q = p.negated()?;
        let v = psi(a, x, p)?;
        let s1 = psi(x, a, &q)?;
        let sign = if x.int_sum(a).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let s2 = sign * psi(a.reflect(), x.reflect(), &q)?;
        Ok(rel(v, s1).max(rel(v, s2)))
    });
    r.record("index_argument_symmetry", "ψ_a(x) = ψ_x(a; -z,-z')", 1e-10, err);

    let q = QuadratureConfig::default();
    let err = over_pairs(&params[..2], &small, |p, a, x| Ok((psi(a, x, p)? - psi_contour(a, x, p, &q)?).abs()));
    r.record("contour_vs_series", "single contour integral", 1e-9, err);

    let prm = principal(0.3);
    let support = grid("-80.5", "80.5");
    let basis = grid("-5.5", "5.5");
    let columns: Result<Vec<Vec<f64>>> = basis
        .iter()
        .map(|&a| support.iter().map(|&x| psi(a, x, &prm)).collect())
        .collect();
    let err = columns.map(|cols| {
        let mut worst = 0.0f64;
        for (i, u) in cols.iter().enumerate() {
            for (j, v) in cols.iter().enumerate() {
                let g: f64 = u.iter().zip(v).map(|(s, t)| s * t).sum();
                worst = worst.max((g - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    });
    r.record("orthonormality", "orthonormal basis of l2(Z')", 1e-8, err);

    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let draws: Vec<(Complex64, Complex64, i32, f64)> = (0..30)
        .map(|k| {
            let mut c = || Complex64::new(rng.gen_range(-5.0..5.0), rng.gen_range(-2.0..2.0));
            (c(), c(), rng.gen_range(-6..=6), if k % 2 == 0 { 0.2 } else { 0.6 })
        })
        .collect();
    let err = max_of(draws.iter().map(|&(a, b, m, xi)| {
        let series = hyp2f1_reg(a, b, Complex64::new(m as f64 + 1.0, 0.0), xi / (xi - 1.0))?;
        let contour = hyp2f1_reg_contour(a, b, m, xi, &q)?;
        Ok(crel(series, contour))
    }));
    r.record("hypergeometric_contour", "contour formula for F/Γ", 1e-9, err);

    let deg = ZParams::real(3.0, 3.7, 0.3).expect("valid");
    let mp = MeixnerParams::new(1.7, 0.3).expect("valid");
    let err = max_of((0..=2u32).flat_map(|m| {
        let deg = &deg;
        let mp = &mp;
        (0..=6u32).map(move |xt| {
            let a = HalfInt::from_floor(2 - m as i64);
            let x = HalfInt::from_floor(xt as i64 - 3);
            Ok((psi(a, x, deg)? - meixner_tilde(m, xt, mp)).abs())
        })
    }));
    r.record("meixner_bridge", "ψ_a = M̃_n for z = N", 1e-10, err);
}

/// Sum of the moduli of the terms of `D ψ_a(x)` and of the eigenvalue side.
fn d_scale(a: HalfInt, x: HalfInt, p: &ZParams) -> Result<f64> {
    let centre = psi(a, x, p)?.abs();
    let diag = x.value() + p.xi() * (p.z_plus_zprime() + x.value());
    // applying D to |ψ| gives the neighbour moduli minus the diagonal term
    let neighbours = apply_d(|t| Ok(psi(a, t, p)?.abs()), x, p)? + diag * centre;
    let eig = (a.value() * (1.0 - p.xi())).abs() * centre;
    Ok((neighbours + diag.abs() * centre + eig).max(f64::MIN_POSITIVE))
}

fn kernel_suite(r: &mut Recorder) {
    let lattice = grid("-4.5", "4.5");
    let q = QuadratureConfig::default();
    let mut cd_err: Result<f64> = Ok(0.0);
    let mut contour_err: Result<f64> = Ok(0.0);
    let mut projection: Result<f64> = Ok(0.0);
    for p in psi_params() {
        let qc = QuadratureConfig::double_contour(p.xi());
        let series = kernel_matrix(&lattice, &p, Method::Series, Gauge::Underlined, &q);
        let cd = kernel_matrix(&lattice, &p, Method::Cd, Gauge::Underlined, &q);
        let contour = kernel_matrix(&lattice, &p, Method::Contour, Gauge::Underlined, &qc);
        let diff = |a: &Result<crate::kernel::KernelMatrix>, b: &Result<crate::kernel::KernelMatrix>| -> Result<f64> {
            let (a, b) = (a.as_ref().map_err(Clone::clone)?, b.as_ref().map_err(Clone::clone)?);
            Ok((a.to_real() - b.to_real()).amax())
        };
        cd_err = cd_err.and_then(|e| Ok(e.max(diff(&series, &cd)?)));
        contour_err = contour_err.and_then(|e| Ok(e.max(diff(&series, &contour)?)));
    }
    r.record("series_vs_integrable", "integrable form", 1e-8, cd_err);
    r.record("series_vs_double_contour", "double contour and gauge", 1e-7, contour_err);

    let prm = principal(0.3);
    let window = grid("-40.5", "40.5");
    projection = projection.and_then(|_| {
        let k = kernel_matrix(&window, &prm, Method::Series, Gauge::Underlined, &q)?.to_real();
        let k2 = &k * &k;
        // only the central block is away from the truncation edge
        let inner: Vec<usize> = (0..window.len()).filter(|&i| window[i].value().abs() < 10.0).collect();
        Ok(inner
            .iter()
            .flat_map(|&i| inner.iter().map(move |&j| (i, j)))
            .map(|(i, j)| (k2[(i, j)] - k[(i, j)]).abs())
            .fold(0.0, f64::max))
    });
    r.record("projection", "K² = K", 1e-8, projection);

    let five = grid("-2.5", "1.5");
    let err = (|| -> Result<f64> {
        let hat = kernel_matrix(&five, &prm, Method::Series, Gauge::Hatted, &q)?.to_complex();
        let under = kernel_matrix(&five, &prm, Method::Series, Gauge::Underlined, &q)?.to_real();
        let mut worst = 0.0f64;
        for mask in 1u32..(1 << five.len()) {
            let idx: Vec<usize> = (0..five.len()).filter(|i| mask & (1 << i) != 0).collect();
            let hs = hat.select_rows(&idx).select_columns(&idx);
            let us = under.select_rows(&idx).select_columns(&idx);
            worst = worst.max((hs.determinant() - Complex64::new(us.determinant(), 0.0)).norm());
        }
        Ok(worst)
    })();
    r.record("gauge_minors", "gauge invariance of minors", 1e-9, err);

    let deg = ZParams::real(3.0, 3.7, 0.3).expect("valid");
    let mp = MeixnerParams::new(1.7, 0.3).expect("valid");
    let shifted: Vec<HalfInt> = (0..=12).map(|t| HalfInt::from_floor(t - 3)).collect();
    let err = kernel_matrix(&shifted, &deg, Method::Series, Gauge::Underlined, &q).map(|k| {
        let mut worst = 0.0f64;
        for i in 0..=12u32 {
            for j in 0..=12u32 {
                worst = worst.max((k.entries[i as usize][j as usize] - meixner_cd_kernel(i, j, 3, &mp)).abs());
            }
        }
        worst
    });
    r.record("degenerate_bridge", "eigenbasis sum = Meixner CD", 1e-10, err);

    let err = (|| -> Result<f64> {
        let qc = QuadratureConfig::double_contour(deg.xi());
        let hat = kernel_matrix(&shifted[..6], &deg, Method::Contour, Gauge::Hatted, &qc)?.to_complex();
        let mut worst = 0.0f64;
        for i in 0..6 {
            for j in 0..6 {
                let under = meixner_cd_kernel(i as u32, j as u32, 3, &mp);
                let f = gauge_f(shifted[i], &deg)? / gauge_f(shifted[j], &deg)?;
                worst = worst.max((hat[(i, j)] - f * under).norm());
            }
        }
        Ok(worst)
    })();
    r.record("degenerate_double_contour", "double contour for z = N", 1e-8, err);

    let kp = KrawtchoukParams::new(0.4, 3).expect("valid");
    let err = (|| -> Result<f64> {
        let second = ZParams::real(2.0, -2.0, -2.0 / 3.0)?;
        let pts = [HalfInt::from_floor(-2), HalfInt::from_floor(-1)];
        let det = corr_det(&pts, &second, Method::KrawtchoukCd, Gauge::Underlined, &q)?;
        let brute = ensemble_brute_corr(&[0, 1], 2, &Family::Krawtchouk(kp))?.value;
        Ok((det - brute).abs())
    })();
    r.record("krawtchouk_two_point", "Krawtchouk ensemble determinant", 1e-12, err);
}

fn oracle_suite(r: &mut Recorder) {
    let q = QuadratureConfig::default();
    let pts = grid("-2.5", "1.5");
    let err = (|| -> Result<f64> {
        let prm = principal(0.3);
        let table = WeightTable::new(&prm, 30)?;
        let mut worst = 0.0f64;
        for mask in 1u32..(1 << pts.len()) {
            if mask.count_ones() > 3 {
                continue;
            }
            let sub: Vec<HalfInt> = (0..pts.len()).filter(|i| mask & (1 << i) != 0).map(|i| pts[i]).collect();
            let brute = table.corr(&sub)?;
            let det = corr_det(&sub, &prm, Method::Series, Gauge::Underlined, &q)?;
            worst = worst.max(((brute.value - det).abs() - brute.tail_bound).max(0.0));
        }
        Ok(worst)
    })();
    r.record("brute_vs_determinant", "determinantal correlations", 1e-7, err);

    let err = (|| -> Result<f64> {
        let deg = ZParams::real(2.0, 2.7, 0.3)?;
        let fam = Family::Meixner(MeixnerParams::new(1.7, 0.3)?);
        let mut worst = 0.0f64;
        for l in all_partitions(10).iter().filter(|l| l.length() <= 2) {
            let cfg = shifted_configuration(l, 2).expect("two rows");
            let ens = ensemble_brute_corr(&cfg, 2, &fam)?.value;
            worst = worst.max(rel(weight(&deg, l), ens));
        }
        Ok(worst)
    })();
    r.record("meixner_ensemble", "z-measure = Meixner ensemble", 1e-10, err);

    let err = (|| -> Result<f64> {
        let second = ZParams::real(2.0, -3.0, -0.7)?;
        let fam = Family::Krawtchouk(KrawtchoukParams::new(0.7 / 1.7, 4)?);
        let mut worst = 0.0f64;
        for l in all_partitions(6).iter().filter(|l| l.fits_in(2, 3)) {
            let cfg = shifted_configuration(l, 2).expect("two rows");
            worst = worst.max(rel(weight(&second, l), ensemble_brute_corr(&cfg, 2, &fam)?.value));
        }
        Ok(worst)
    })();
    r.record("krawtchouk_ensemble", "z-measure = Krawtchouk ensemble", 1e-12, err);

    let err = (|| -> Result<f64> {
        let mut bad = 0usize;
        for (a, b) in [(1u32, 1u32), (2, 2), (2, 3), (3, 3), (2, 5), (3, 4)] {
            for n in 0..=a * b {
                let push = tableaux_pushforward(a, b, n)?;
                for l in enumerate_partitions(n as usize)? {
                    let exact = weight_fixed_n_exact(a as i64, -(b as i64), &l)?;
                    let got = push.get(&l).cloned().unwrap_or_default();
                    if exact != got {
                        bad += 1;
                    }
                }
            }
        }
        Ok(bad as f64)
    })();
    r.record("tableaux_pushforward", "uniform tableaux push-forward", 0.0, err);

    let err = (|| -> Result<f64> {
        let prm = principal(0.3);
        let draws = sample(&prm, 20_000, 30, 2024)?;
        let sizes: Vec<f64> = draws.iter().map(|d| d.n as f64).collect();
        let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
        let var = sizes.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (sizes.len() - 1) as f64;
        let se = (var / sizes.len() as f64).sqrt();
        let expected = prm.xi() * prm.zzprime() / (1.0 - prm.xi());
        Ok((mean - expected).abs() / se)
    })();
    r.record("sampler_mean_size", "E|λ| = ξzz'/(1-ξ) (in SE)", 3.0, err);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_rejected() {
        assert!(run_suite("nope", &Overrides::new()).is_err());
    }

    #[test]
    fn partitions_suite_passes() {
        let checks = run_suite("partitions", &Overrides::new()).unwrap();
        assert!(checks.iter().all(Check::passed), "{checks:?}");
    }

    #[test]
    fn overrides_apply() {
        let mut o = Overrides::new();
        o.insert("transpose_involution".into(), 5.0);
        let checks = run_suite("partitions", &o).unwrap();
        assert_eq!(checks.iter().find(|c| c.name == "transpose_involution").unwrap().tolerance, 5.0);
    }
}
