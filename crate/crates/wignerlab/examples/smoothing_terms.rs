//! The smoothing inequality bounds the Kolmogorov distance by four terms
//! built from the Stieltjes transform. Evaluated here (all constants set
//! to 1) on the replica-averaged transform of a small ensemble.

use num_complex::Complex64;
use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::lawcheck::{smoothing_bound, v_zero};
use wignerlab::semicircle::ComplexPoint;
use wignerlab::spectral::{eigendecompose, stieltjes};

fn main() -> wignerlab::Result<()> {
    let dist = EntryDistribution::rademacher();
    for n in [128usize, 256, 512] {
        let spectra: Vec<_> = (0..10)
            .map(|r| {
                let s = sample_wigner(n, &dist, 900 + r)?;
                eigendecompose(&s, false)
            })
            .collect::<wignerlab::Result<_>>()?;
        let f = |z: ComplexPoint| -> Complex64 {
            let sum: Complex64 = spectra.iter().map(|s| stieltjes(s, z)).sum();
            sum / spectra.len() as f64
        };
        let v0 = v_zero(n, 1.0);
        let eps = (2.0 * (2.0_f64.sqrt() + 1.0) * v0).powf(2.0 / 3.0) * 1.001;
        let b = smoothing_bound(&f, v0, eps, 1.0)?;
        println!(
            "n={n:4}: term1={:.3e} term2={:.3e} term3={:.3e} term4={:.3e} total={:.3e}",
            b.term1,
            b.term2,
            b.term3,
            b.term4,
            b.total()
        );
    }
    Ok(())
}
