//! Reference quantities of the semicircle law: density, distribution
//! function, classical quantiles, and the Stieltjes transform.

use wignerlab::semicircle::{cdf, density, quantile, stieltjes_ref, ComplexPoint};

fn main() -> wignerlab::Result<()> {
    println!("x      g_sc(x)   G_sc(x)");
    for i in 0..=8 {
        let x = -2.0 + 0.5 * i as f64;
        println!("{x:+.2}  {:.6}  {:.6}", density(x)?, cdf(x)?);
    }

    println!("\nclassical quantiles gamma_j for n = 10:");
    for j in 1..=10 {
        print!(" {:+.4}", quantile(j, 10)?);
    }
    println!();

    let z = ComplexPoint::new(0.0, 1.0)?;
    let s = stieltjes_ref(z);
    println!("\ns(i) = {:.6} + {:.6}i", s.re, s.im);
    let residual = (1.0 + z.to_complex() * s + s * s).norm();
    println!("|1 + z s + s^2| = {residual:.3e}");
    Ok(())
}
