//! The correlation kernel three ways: the eigenbasis sum, the integrable
//! form and the double contour integral, plus the gauge that relates the
//! two normalizations.

use num_complex::Complex64;
use zkernel::kernel::{kernel_matrix, Gauge, Method};
use zkernel::psi::QuadratureConfig;
use zkernel::{HalfInt, Result, ZParams};

fn main() -> Result<()> {
    let points: Vec<HalfInt> = (-3..=2).map(HalfInt::from_floor).collect();
    let cases = [
        ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.3)?,
        ZParams::real(0.4, 0.7, 0.55)?,
        ZParams::new(Complex64::new(1.0, 1.0), Complex64::new(1.0, -1.0), 0.85)?,
    ];
    for prm in &cases {
        let single = QuadratureConfig::default();
        let double = QuadratureConfig::double_contour(prm.xi());
        let series = kernel_matrix(&points, prm, Method::Series, Gauge::Underlined, &single)?.to_real();
        let cd = kernel_matrix(&points, prm, Method::Cd, Gauge::Underlined, &single)?.to_real();
        let contour = kernel_matrix(&points, prm, Method::Contour, Gauge::Underlined, &double)?.to_real();
        println!(
            "{:?} ξ = {}: |series - cd| = {:.1e}, |series - contour| = {:.1e}",
            prm.series(),
            prm.xi(),
            (&series - &cd).amax(),
            (&series - &contour).amax()
        );
    }

    // the hatted kernel is not symmetric but has the same minors
    let prm = &cases[0];
    let q = QuadratureConfig::double_contour(prm.xi());
    let hat = kernel_matrix(&points[..3], prm, Method::Contour, Gauge::Hatted, &q)?;
    let under = kernel_matrix(&points[..3], prm, Method::Series, Gauge::Underlined, &q)?;
    println!("\nhatted K on {:?}:", points[..3].iter().map(|p| p.value()).collect::<Vec<_>>());
    println!("{}", hat.to_complex());
    println!("det hatted = {:.12}", hat.determinant());
    println!("det underlined = {:.12}", under.determinant().re);
    Ok(())
}
