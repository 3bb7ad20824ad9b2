//! Draw one Wigner matrix and compare its spectrum with the semicircle
//! law: edge locations, bulk counts, and the Kolmogorov distance.

use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::lawcheck::kolmogorov_distance;
use wignerlab::spectral::{counting, eigendecompose};

fn main() -> wignerlab::Result<()> {
    let n = 512;
    let dist = EntryDistribution::rademacher();
    let sample = sample_wigner(n, &dist, 7)?;
    let spec = eigendecompose(&sample, false)?;

    let eig = spec.eigenvalues();
    println!("n = {n}, entry law = {}", dist.tag());
    println!("lambda_min = {:+.5}, lambda_max = {:+.5}", eig[0], eig[n - 1]);
    println!(
        "eigenvalues in [-2, 2]: {} of {n}",
        counting(&spec, -2.0, 2.0)?
    );
    println!("Kolmogorov distance to G_sc: {:.5}", kolmogorov_distance(&spec));
    Ok(())
}
