//! Convergence rate of the empirical spectral distribution: median
//! Kolmogorov distance over replicas, fitted as a power of n.

use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::lawcheck::{kolmogorov_distance, quantile, scaling_fit};
use wignerlab::rng::derive_seed;
use wignerlab::spectral::eigendecompose;

fn main() -> wignerlab::Result<()> {
    let dist = EntryDistribution::rademacher();
    let replicas = 20;
    let mut medians = Vec::new();
    for n in [64usize, 128, 256, 512] {
        let mut distances: Vec<f64> = (0..replicas)
            .map(|r| {
                let sample = sample_wigner(n, &dist, derive_seed(42, n, r))?;
                Ok(kolmogorov_distance(&eigendecompose(&sample, false)?))
            })
            .collect::<wignerlab::Result<_>>()?;
        distances.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let median = quantile(&distances, 0.5);
        println!("n = {n:4}: median KS = {median:.5}");
        medians.push((n as f64, median));
    }
    let fit = scaling_fit(&medians, true)?;
    println!(
        "\nfitted rate: KS ~ n^{:.3} (slope std error {:.3})",
        fit.slope, fit.slope_std_error
    );
    Ok(())
}
