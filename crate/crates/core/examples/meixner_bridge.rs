//! For z = N a positive integer the diagrams have at most N rows, the
//! shifted first column is an N-point Meixner ensemble, and the kernel is
//! the Christoffel-Darboux kernel of the Meixner functions.

use zkernel::kernel::{kernel_series, meixner_cd_kernel};
use zkernel::oracle::{ensemble_brute_corr, shifted_configuration, Family};
use zkernel::partitions::enumerate_partitions;
use zkernel::psi::psi;
use zkernel::specfun::{meixner_tilde, MeixnerParams};
use zkernel::zmeasure::weight;
use zkernel::{HalfInt, Result, ZParams};

fn main() -> Result<()> {
    let (n, beta, xi) = (3u32, 1.7, 0.3);
    let prm = ZParams::real(n as f64, n as f64 + beta - 1.0, xi)?;
    let mp = MeixnerParams::new(beta, xi)?;

    println!("ψ_a(x) against the orthonormal Meixner functions (a = N - ½ - m, x = x̃ - N + ½):");
    for m in 0..n {
        let a = HalfInt::from_floor(n as i64 - 1 - m as i64);
        let row: Vec<String> = (0..5u32)
            .map(|xt| {
                let x = HalfInt::from_floor(xt as i64 - n as i64);
                let v = psi(a, x, &prm).unwrap_or(f64::NAN);
                format!("{:+.3e}", v - meixner_tilde(m, xt, &mp))
            })
            .collect();
        println!("  m = {m}: {}", row.join(" "));
    }
    let beyond = psi(HalfInt::from_floor(n as i64), HalfInt::from_floor(0), &prm)?;
    println!("ψ at a = N + ½ is exactly {beyond}");

    let mut worst = 0.0f64;
    for xt in 0..=12u32 {
        for yt in 0..=12u32 {
            let x = HalfInt::from_floor(xt as i64 - n as i64);
            let y = HalfInt::from_floor(yt as i64 - n as i64);
            worst = worst.max((kernel_series(x, y, &prm)? - meixner_cd_kernel(xt, yt, n, &mp)).abs());
        }
    }
    println!("max |K - Meixner CD kernel| on shifted coordinates ≤ 12: {worst:.2e}");

    // two-row diagrams against the 2-point Meixner ensemble
    let two = ZParams::real(2.0, 2.0 + beta - 1.0, xi)?;
    let fam = Family::Meixner(mp);
    println!("\nN = 2: weight versus ensemble probability");
    for size in 0..=3 {
        for l in enumerate_partitions(size)?.iter().filter(|l| l.length() <= 2) {
            let cfg = shifted_configuration(l, 2).expect("at most two rows");
            let ens = ensemble_brute_corr(&cfg, 2, &fam)?.value;
            println!("  {l:>4} -> {cfg:?}: {:.12} {:.12}", weight(&two, l), ens);
        }
    }
    Ok(())
}
