//! Weights of small diagrams in each parameter series, the law of |λ| and
//! the mass captured by a finite enumeration.

use num_complex::Complex64;
use zkernel::partitions::enumerate_partitions;
use zkernel::zmeasure::{negative_binomial, size_law, total_mass, weight};
use zkernel::{Partition, Result, ZParams};

fn main() -> Result<()> {
    let points = [
        ("principal", ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3)?),
        ("complementary", ZParams::real(0.4, 0.7, 0.55)?),
        ("degenerate", ZParams::real(3.0, 3.7, 0.3)?),
        ("second degenerate", ZParams::real(2.0, -3.0, -0.7)?),
    ];
    for (label, prm) in &points {
        println!("{label}: series {:?}, zz' = {}", prm.series(), prm.zzprime());
        for parts in ["", "1", "2", "1,1", "2,1", "3,3"] {
            let lambda: Partition = if parts.is_empty() { Partition::empty() } else { parts.parse()? };
            println!("  M({lambda:>5}) = {:.6e}", weight(prm, &lambda));
        }
        let first: Vec<String> = (0..6).map(|n| format!("{:.4}", size_law(prm, n))).collect();
        println!("  P(|λ| = 0..5) = [{}]", first.join(", "));
    }

    // the conditional law at fixed size times the mixing law gives the weight
    let prm = &points[0].1;
    let n = 4;
    let by_hand: f64 = enumerate_partitions(n)?.iter().map(|l| weight(prm, l)).sum();
    println!("\nsum of weights of size {n}: {by_hand:.12}");
    println!("negative binomial at {n}:  {:.12}", negative_binomial(prm, n)?);

    for (label, prm) in &points[..3] {
        let m = total_mass(prm, 30)?;
        println!("{label}: mass up to size 30 = {:.15}, tail bound {:.2e}", m.partial_sum, m.tail_bound);
    }
    Ok(())
}
