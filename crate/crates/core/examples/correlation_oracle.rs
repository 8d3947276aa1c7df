//! Correlation functions by summing weights over all diagrams up to a size
//! cutoff, next to the kernel determinants.

use num_complex::Complex64;
use zkernel::kernel::{corr_det, Gauge, Method};
use zkernel::oracle::WeightTable;
use zkernel::psi::QuadratureConfig;
use zkernel::{HalfInt, Result, ZParams};

fn main() -> Result<()> {
    let prm = ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3)?;
    let table = WeightTable::new(&prm, 30)?;
    println!("enumerated mass {:.15}, tail bound {:.2e}", table.partial_sum(), table.tail_bound());
    println!("mean size from the table {:.10}", table.mean_size());

    let q = QuadratureConfig::default();
    let sets: [&[i64]; 4] = [&[-1], &[0], &[-1, 1], &[-3, -1, 0]];
    for floors in sets {
        let pts: Vec<HalfInt> = floors.iter().map(|&k| HalfInt::from_floor(k)).collect();
        let brute = table.corr(&pts)?;
        let det = corr_det(&pts, &prm, Method::Series, Gauge::Underlined, &q)?;
        let shown: Vec<f64> = pts.iter().map(|p| p.value()).collect();
        println!(
            "ρ{shown:?}: enumeration {:.12}, determinant {:.12}, difference {:.1e}",
            brute.value,
            det,
            (brute.value - det).abs()
        );
    }
    Ok(())
}
