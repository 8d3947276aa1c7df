//! The functions ψ_a on the half-integer lattice: a few values, the
//! difference equation they solve and their Gram matrix.

use num_complex::Complex64;
use zkernel::psi::{apply_d, psi, psi_contour, QuadratureConfig};
use zkernel::{HalfInt, Result, ZParams};

fn lattice(lo: i64, hi: i64) -> Vec<HalfInt> {
    (lo..=hi).map(HalfInt::from_floor).collect()
}

fn main() -> Result<()> {
    let prm = ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3)?;
    let q = QuadratureConfig::default();

    println!("   a      x        series                contour");
    for (a, x) in [(0, 0), (-1, 2), (3, -2), (-4, -4)] {
        let (a, x) = (HalfInt::from_floor(a), HalfInt::from_floor(x));
        println!("{a:>5} {x:>6}  {:>20.15}  {:>20.15}", psi(a, x, &prm)?, psi_contour(a, x, &prm, &q)?);
    }

    let a = HalfInt::from_floor(1);
    let mut worst = 0.0f64;
    for x in lattice(-10, 10) {
        let lhs = apply_d(|t| psi(a, t, &prm), x, &prm)?;
        worst = worst.max((lhs - a.value() * (1.0 - prm.xi()) * psi(a, x, &prm)?).abs());
    }
    println!("\nmax |D ψ_a - a(1-ξ) ψ_a| for a = {a}: {worst:.2e}");

    // the support is truncated where the values are far below roundoff
    let support = lattice(-60, 60);
    let basis = lattice(-3, 2);
    let columns: Vec<Vec<f64>> = basis
        .iter()
        .map(|&a| support.iter().map(|&x| psi(a, x, &prm)).collect())
        .collect::<Result<_>>()?;
    println!("\nGram matrix of ψ_a for a = {} .. {}:", basis[0], basis[basis.len() - 1]);
    for u in &columns {
        let row: Vec<String> = columns
            .iter()
            .map(|v| format!("{:+.1e}", u.iter().zip(v).map(|(s, t)| s * t).sum::<f64>()))
            .collect();
        println!("  {}", row.join(" "));
    }
    Ok(())
}
