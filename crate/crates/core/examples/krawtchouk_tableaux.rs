//! The second degenerate series lives on diagrams inside an N × N' box. Its
//! rows form a Krawtchouk ensemble, and its fixed-size laws are the laws of
//! the shape grown by a uniformly random standard tableau of the box.

use zkernel::oracle::{ensemble_brute_corr, shifted_configuration, tableaux_pushforward, Family};
use zkernel::partitions::enumerate_partitions;
use zkernel::specfun::KrawtchoukParams;
use zkernel::zmeasure::{binomial_mixing, weight, weight_fixed_n_exact};
use zkernel::{Result, ZParams};

fn main() -> Result<()> {
    let (n, np, xi) = (2u32, 3u32, -0.7);
    let prm = ZParams::real(n as f64, -(np as f64), xi)?;
    let fam = Family::Krawtchouk(KrawtchoukParams::new(xi / (xi - 1.0), n + np - 1)?);

    println!("weights in the {n} × {np} box against the Krawtchouk ensemble:");
    let mut total = 0.0;
    for size in 0..=(n * np) as usize {
        for l in enumerate_partitions(size)?.iter().filter(|l| l.fits_in(n as usize, np as usize)) {
            let cfg = shifted_configuration(l, n).expect("fits");
            let w = weight(&prm, l);
            total += w;
            println!("  {l:>6}: {w:.15} {:.15}", ensemble_brute_corr(&cfg, n, &fam)?.value);
        }
    }
    println!("total mass {total:.15}");
    let sizes: Vec<String> = (0..=6).map(|k| format!("{:.4}", binomial_mixing(n, np, xi, k).unwrap_or(0.0))).collect();
    println!("law of |λ|: [{}]", sizes.join(", "));

    println!("\ngrowth of a uniform standard tableau of the 2 × 2 box, after two boxes:");
    for (l, p) in tableaux_pushforward(2, 2, 2)? {
        println!("  {l}: {p} (exact conditional law {})", weight_fixed_n_exact(2, -2, &l)?);
    }
    Ok(())
}
