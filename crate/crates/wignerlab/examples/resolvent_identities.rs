//! Exact resolvent identities on one sample: the self-consistent equation
//! 1 + z m_n + m_n^2 = T_n, the Ward identity, and the epsilon
//! decomposition of a diagonal entry.

use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::semicircle::ComplexPoint;
use wignerlab::spectral::{eigendecompose, epsilon_decomposition, resolvent, t_statistic};

fn main() -> wignerlab::Result<()> {
    let n = 100;
    let sample = sample_wigner(n, &EntryDistribution::gaussian(), 11)?;
    let z = ComplexPoint::new(0.3, 0.5)?;

    let rec = t_statistic(&sample, z)?;
    println!("m_n(z)    = {:.6} + {:.6}i", rec.m_n.re, rec.m_n.im);
    println!("T_n(z)    = {:.3e} + {:.3e}i", rec.t_n.re, rec.t_n.im);
    println!("Lambda_n  = {:.3e} + {:.3e}i", rec.lambda_n.re, rec.lambda_n.im);
    println!("|1 + z m_n + m_n^2 - T_n| = {:.3e}", rec.residual);

    let spec = eigendecompose(&sample, true)?;
    let r = resolvent(&spec, z)?;
    let col = 0;
    let sum: f64 = (0..n).map(|k| r[(k, col)].norm_sqr()).sum();
    println!(
        "Ward identity: sum_k |R_k0|^2 = {sum:.8}, Im R_00 / v = {:.8}",
        r[(col, col)].im / z.v()
    );

    let parts = epsilon_decomposition(&sample, z, 0)?;
    println!(
        "eps_0 split: |eps1| = {:.3e}, |eps2| = {:.3e}, |eps3| = {:.3e}, |eps4| = {:.3e}",
        parts.eps1.norm(),
        parts.eps2.norm(),
        parts.eps3.norm(),
        parts.eps4.norm()
    );
    Ok(())
}
