//! Exact draws and a comparison of empirical statistics with the exact ones.

use num_complex::Complex64;
use zkernel::kernel::kernel_series;
use zkernel::oracle::{sample, sample_range};
use zkernel::partitions::contains_point;
use zkernel::{HalfInt, Result, ZParams};

fn main() -> Result<()> {
    let prm = ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3)?;
    let draws = sample(&prm, 20_000, 30, 42)?;
    for d in draws.iter().take(8) {
        println!("draw {:>2}: |λ| = {:>2}  λ = ({})", d.index, d.n, d.partition);
    }

    // record i depends only on (seed, i)
    let again = sample_range(&prm, 5..8, 30, 42)?;
    assert_eq!(&again[..], &draws[5..8]);

    let count = draws.len() as f64;
    let mean = draws.iter().map(|d| d.n as f64).sum::<f64>() / count;
    let exact_mean = prm.xi() * prm.zzprime() / (1.0 - prm.xi());
    println!("\nmean size {mean:.4} (exact {exact_mean:.4})");

    let half = HalfInt::HALF;
    let hits = draws.iter().filter(|d| contains_point(&d.partition, half)).count() as f64;
    let rho = kernel_series(half, half, &prm)?;
    let se = (rho * (1.0 - rho) / count).sqrt();
    println!("P(½ ∈ X(λ)) ≈ {:.4} ± {se:.4} (kernel {rho:.4})", hits / count);
    Ok(())
}
