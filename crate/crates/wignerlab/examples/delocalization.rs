//! Eigenvector delocalization: the statistic n max|u_jk|^2 / log n stays
//! bounded for Wigner ensembles, and Rademacher entries behave like
//! Gaussian ones.

use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::lawcheck::{delocalization_report, quantile};
use wignerlab::rng::derive_seed;
use wignerlab::spectral::eigendecompose;

fn main() -> wignerlab::Result<()> {
    let n = 256;
    let replicas = 20;
    for dist in [EntryDistribution::rademacher(), EntryDistribution::gaussian()] {
        let mut stats: Vec<f64> = (0..replicas)
            .map(|r| {
                let sample = sample_wigner(n, &dist, derive_seed(5, n, r))?;
                delocalization_report(&eigendecompose(&sample, true)?)
            })
            .collect::<wignerlab::Result<_>>()?;
        stats.sort_by(|a, b| a.partial_cmp(b).unwrap());
        println!(
            "{:10} n={n}: median {:.3}, q99 {:.3} (localized would be n/log n = {:.1})",
            dist.tag(),
            quantile(&stats, 0.5),
            quantile(&stats, 0.99),
            n as f64 / (n as f64).ln()
        );
    }
    Ok(())
}
