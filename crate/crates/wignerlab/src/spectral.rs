//! Eigendecomposition, empirical spectral distribution, Stieltjes
//! transforms, full and minor resolvents, the epsilon decomposition of the
//! diagonal resolvent entries, and the self-consistency statistic tying
//! them together.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::ensemble::WignerSample;
use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::semicircle::{stieltjes_ref, ComplexPoint};

/// Below this modulus of a diagonal resolvent entry the Schur rank-relation
/// is numerically meaningless; the row is flagged rather than divided.
pub const DEGENERACY_THRESHOLD: f64 = 1e-14;

/// Ascending eigenvalues (and optionally orthonormal eigenvectors) of one
/// symmetric matrix.
#[derive(Clone, Debug)]
pub struct SpectralData {
    n: usize,
    eigenvalues: Vec<f64>,
    /// Column j holds the eigenvector of `eigenvalues[j]`.
    eigenvectors: Option<DMatrix<f64>>,
}

impl SpectralData {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> Option<&DMatrix<f64>> {
        self.eigenvectors.as_ref()
    }

    pub fn from_eigenvalues(mut eigenvalues: Vec<f64>) -> Self {
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self {
            n: eigenvalues.len(),
            eigenvalues,
            eigenvectors: None,
        }
    }
}

/// Full eigendecomposition of W, eigenvalues sorted ascending.
pub fn eigendecompose(sample: &WignerSample, want_vectors: bool) -> Result<SpectralData> {
    let m = sample.matrix();
    if m != &m.transpose() {
        return Err(Error::Contract("input matrix is not symmetric".into()));
    }
    let n = sample.n();
    if want_vectors {
        let eig = SymmetricEigen::new(m.clone());
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let mut vectors = DMatrix::<f64>::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            vectors.set_column(dst, &eig.eigenvectors.column(src));
        }
        Ok(SpectralData {
            n,
            eigenvalues,
            eigenvectors: Some(vectors),
        })
    } else {
        let mut eigenvalues: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Ok(SpectralData {
            n,
            eigenvalues,
            eigenvectors: None,
        })
    }
}

/// Empirical spectral distribution F_n(x) = #{j : lambda_j <= x} / n.
pub fn esd_cdf(spec: &SpectralData, x: f64) -> f64 {
    let count = spec.eigenvalues.partition_point(|&l| l <= x);
    count as f64 / spec.n as f64
}

/// Number of eigenvalues in the closed interval [a, b].
pub fn counting(spec: &SpectralData, a: f64, b: f64) -> Result<usize> {
    if a > b {
        return Err(Error::Argument(format!("interval [{a}, {b}] is empty")));
    }
    let below_a = spec.eigenvalues.partition_point(|&l| l < a);
    let up_to_b = spec.eigenvalues.partition_point(|&l| l <= b);
    Ok(up_to_b - below_a)
}

/// Stieltjes transform m_n(z) = (1/n) sum 1/(lambda_j - z).
pub fn stieltjes(spec: &SpectralData, z: ComplexPoint) -> Complex64 {
    let zc = z.to_complex();
    let sum: Complex64 = spec
        .eigenvalues
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - zc).inv())
        .sum();
    sum / spec.n as f64
}

/// Full resolvent R(z) = (W - zI)^{-1} assembled from the
/// eigendecomposition. Requires eigenvectors.
pub fn resolvent(spec: &SpectralData, z: ComplexPoint) -> Result<DMatrix<Complex64>> {
    let vectors = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Contract("resolvent requires eigenvectors".into()))?;
    let zc = z.to_complex();
    let n = spec.n;
    let uc = vectors.map(|x| Complex64::new(x, 0.0));
    let mut scaled = uc.clone();
    for (l, &lambda) in spec.eigenvalues.iter().enumerate() {
        let inv = (Complex64::new(lambda, 0.0) - zc).inv();
        for j in 0..n {
            scaled[(j, l)] *= inv;
        }
    }
    Ok(scaled * uc.transpose())
}

/// Requested rows of the resolvent, R_jk = sum_l u_l(j) u_l(k) / (lambda_l - z).
pub fn resolvent_entries(
    spec: &SpectralData,
    z: ComplexPoint,
    rows: &[usize],
) -> Result<Vec<Vec<Complex64>>> {
    let vectors = spec
        .eigenvectors
        .as_ref()
        .ok_or_else(|| Error::Contract("resolvent rows require eigenvectors".into()))?;
    let zc = z.to_complex();
    let n = spec.n;
    let mut out = Vec::with_capacity(rows.len());
    for &j in rows {
        if j >= n {
            return Err(Error::Argument(format!("row {j} out of range for n = {n}")));
        }
        let mut row = vec![Complex64::default(); n];
        for (l, &lambda) in spec.eigenvalues.iter().enumerate() {
            let w = vectors[(j, l)] / (Complex64::new(lambda, 0.0) - zc);
            for (k, entry) in row.iter_mut().enumerate() {
                *entry += w * vectors[(k, l)];
            }
        }
        out.push(row);
    }
    Ok(out)
}

/// Diagonal of the minor resolvent R^{(j)} (row/column j removed) and its
/// trace, via the Schur rank-relation
/// R^{(j)}_{kl} = R_kl - R_kj R_jl / R_jj.
pub fn minor_resolvent_diag(
    spec: &SpectralData,
    z: ComplexPoint,
    j: usize,
) -> Result<(Vec<Complex64>, Complex64)> {
    let r = resolvent(spec, z)?;
    minor_diag_from_resolvent(&r, j)
}

fn minor_diag_from_resolvent(
    r: &DMatrix<Complex64>,
    j: usize,
) -> Result<(Vec<Complex64>, Complex64)> {
    let n = r.nrows();
    if j >= n {
        return Err(Error::Argument(format!("row {j} out of range for n = {n}")));
    }
    let rjj = r[(j, j)];
    if rjj.norm() < DEGENERACY_THRESHOLD {
        return Err(Error::Numeric(format!(
            "|R_jj| = {:.3e} below degeneracy threshold at row {j}",
            rjj.norm()
        )));
    }
    let mut diag = Vec::with_capacity(n - 1);
    let mut trace = Complex64::default();
    for k in 0..n {
        if k == j {
            continue;
        }
        let val = r[(k, k)] - r[(k, j)] * r[(j, k)] / rjj;
        trace += val;
        diag.push(val);
    }
    Ok((diag, trace))
}

/// The four error terms of the Schur-complement expression for R_jj.
#[derive(Clone, Copy, Debug)]
pub struct EpsilonParts {
    pub eps1: Complex64,
    pub eps2: Complex64,
    pub eps3: Complex64,
    pub eps4: Complex64,
}

impl EpsilonParts {
    pub fn total(&self) -> Complex64 {
        self.eps1 + self.eps2 + self.eps3 + self.eps4
    }
}

/// Epsilon decomposition for one row. Eigendecomposes internally; use
/// [`t_statistic`] when all rows of one sample are needed.
pub fn epsilon_decomposition(
    sample: &WignerSample,
    z: ComplexPoint,
    j: usize,
) -> Result<EpsilonParts> {
    let spec = eigendecompose(sample, true)?;
    let r = resolvent(&spec, z)?;
    epsilon_from_resolvent(sample, &r, z, j)
}

/// Epsilon decomposition given a precomputed full resolvent.
///
/// In terms of W = X / sqrt(n):
///   eps1 = W_jj,
///   eps2 = -sum_{l != k} W_jk W_jl R^{(j)}_{kl},
///   eps3 = -sum_k (W_jk^2 - 1/n) R^{(j)}_{kk},
///   eps4 = (Tr R - Tr R^{(j)}) / n.
pub fn epsilon_from_resolvent(
    sample: &WignerSample,
    r: &DMatrix<Complex64>,
    _z: ComplexPoint,
    j: usize,
) -> Result<EpsilonParts> {
    let n = sample.n();
    if j >= n {
        return Err(Error::Argument(format!("row {j} out of range for n = {n}")));
    }
    let rjj = r[(j, j)];
    if rjj.norm() < DEGENERACY_THRESHOLD {
        return Err(Error::Numeric(format!(
            "|R_jj| = {:.3e} below degeneracy threshold at row {j}",
            rjj.norm()
        )));
    }

    // Bilinear form of the minor resolvent against the j-th row of W,
    // using R^{(j)}_{kl} = R_kl - R_kj R_jl / R_jj.
    let mut full = Complex64::default(); // sum_{k,l != j} W_jk W_jl R_kl
    let mut cross = Complex64::default(); // sum_{k != j} W_jk R_kj
    for k in 0..n {
        if k == j {
            continue;
        }
        let wjk = sample.w(j, k);
        cross += wjk * r[(k, j)];
        let mut inner = Complex64::default();
        for l in 0..n {
            if l == j {
                continue;
            }
            inner += sample.w(j, l) * r[(k, l)];
        }
        full += wjk * inner;
    }
    let quad = full - cross * cross / rjj; // w^T R^{(j)} w

    let (minor_diag, minor_trace) = minor_diag_from_resolvent(r, j)?;
    let inv_n = 1.0 / n as f64;

    // Diagonal part of the quadratic form, sum_k W_jk^2 R^{(j)}_kk.
    let mut diag_part = Complex64::default();
    let mut eps3 = Complex64::default();
    let mut idx = 0usize;
    for k in 0..n {
        if k == j {
            continue;
        }
        let wjk = sample.w(j, k);
        diag_part += wjk * wjk * minor_diag[idx];
        eps3 -= (wjk * wjk - inv_n) * minor_diag[idx];
        idx += 1;
    }

    let trace_r: Complex64 = (0..n).map(|k| r[(k, k)]).sum();
    Ok(EpsilonParts {
        eps1: Complex64::new(sample.w(j, j), 0.0),
        eps2: -(quad - diag_part),
        eps3,
        eps4: (trace_r - minor_trace) * inv_n,
    })
}

/// One evaluation of the self-consistent equation 1 + z m_n + m_n^2 = T_n.
#[derive(Clone, Debug)]
pub struct SelfConsistencyRecord {
    pub z: ComplexPoint,
    pub m_n: Complex64,
    pub t_n: Complex64,
    pub lambda_n: Complex64,
    /// |1 + z m_n + m_n^2 - T_n|.
    pub residual: f64,
    /// Rows skipped because of a degenerate diagonal resolvent entry.
    pub flagged_rows: Vec<usize>,
}

/// Computes T_n = (1/n) sum_j eps_j R_jj from the epsilon decomposition and
/// the residual of the self-consistent equation.
pub fn t_statistic(sample: &WignerSample, z: ComplexPoint) -> Result<SelfConsistencyRecord> {
    let spec = eigendecompose(sample, true)?;
    let r = resolvent(&spec, z)?;
    let n = sample.n();
    let m_n = stieltjes(&spec, z);

    let mut t_n = Complex64::default();
    let mut flagged = Vec::new();
    for j in 0..n {
        match epsilon_from_resolvent(sample, &r, z, j) {
            Ok(parts) => t_n += parts.total() * r[(j, j)],
            Err(Error::Numeric(_)) => flagged.push(j),
            Err(e) => return Err(e),
        }
    }
    t_n /= n as f64;

    let zc = z.to_complex();
    let residual = (Complex64::new(1.0, 0.0) + zc * m_n + m_n * m_n - t_n).norm();
    Ok(SelfConsistencyRecord {
        z,
        m_n,
        t_n,
        lambda_n: m_n - stieltjes_ref(z),
        residual,
        flagged_rows: flagged,
    })
}

/// Symmetric elementary perturbation matrix e_a e_b^T + e_b e_a^T
/// (or e_a e_a^T when a = b).
fn elementary(n: usize, a: usize, b: usize) -> DMatrix<f64> {
    let mut e = DMatrix::<f64>::zeros(n, n);
    if a == b {
        e[(a, a)] = 1.0;
    } else {
        e[(a, b)] = 1.0;
        e[(b, a)] = 1.0;
    }
    e
}

fn complex_inverse(m: &DMatrix<f64>, z: Complex64) -> Result<DMatrix<Complex64>> {
    let n = m.nrows();
    let mut a = m.map(|x| Complex64::new(x, 0.0));
    for i in 0..n {
        a[(i, i)] -= z;
    }
    a.try_inverse()
        .ok_or_else(|| Error::Numeric("resolvent matrix is singular".into()))
}

fn expansion_probe_set(sample: &WignerSample, a: usize, b: usize) -> Vec<(usize, usize)> {
    let n = sample.n();
    let mut probes = vec![(a, a), (a, b), (b, b)];
    // Three extra pairs derived deterministically from the sample seed.
    let mut h = derive_seed(sample.seed(), n, (a * n + b) as u64);
    for _ in 0..3 {
        let j = (h % n as u64) as usize;
        h = derive_seed(h, n, 1);
        let k = (h % n as u64) as usize;
        h = derive_seed(h, n, 2);
        probes.push((j, k));
    }
    probes
}

fn expansion_sides(
    sample: &WignerSample,
    z: ComplexPoint,
    a: usize,
    b: usize,
    m: usize,
    include_remainder: bool,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    let n = sample.n();
    if a >= n || b >= n {
        return Err(Error::Argument(format!(
            "indices ({a}, {b}) out of range for n = {n}"
        )));
    }
    let zc = z.to_complex();
    let w = sample.matrix();
    let e = elementary(n, a, b);
    let x_ab = sample.w(a, b); // equals n^{-1/2} X_ab
    let u = w - x_ab * &e;

    let r = complex_inverse(w, zc)?;
    let t = complex_inverse(&u, zc)?;

    let ec = e.map(|x| Complex64::new(x, 0.0));
    let te = &t * &ec;
    let mut rhs = t.clone();
    let mut power = t.clone(); // (T E)^mu T
    let mut coeff = Complex64::new(1.0, 0.0);
    for _ in 1..=m {
        power = &te * &power;
        coeff *= -x_ab;
        rhs += &power * coeff;
    }
    if include_remainder {
        let remainder = &te * &power.clone_owned();
        // replace the trailing T with R: (T E)^{m+1} R = (T E)^{m+1} T T^{-1} R;
        // assemble directly instead: (T E)^{m+1} R.
        let mut tail = r.clone();
        for _ in 0..=m {
            tail = &te * &tail;
        }
        let _ = remainder;
        coeff *= -x_ab;
        rhs += &tail * coeff;
    }
    Ok((r, rhs))
}

/// Max absolute entrywise residual of the exact resolvent expansion
/// R = T + sum_{mu=1}^m (-1)^mu n^{-mu/2} X_ab^mu (T E)^mu T
///       + (-1)^{m+1} n^{-(m+1)/2} X_ab^{m+1} (T E)^{m+1} R
/// over the probe entry set.
pub fn perturbation_expansion_residual(
    sample: &WignerSample,
    z: ComplexPoint,
    a: usize,
    b: usize,
    m: usize,
) -> Result<f64> {
    let (r, rhs) = expansion_sides(sample, z, a, b, m, true)?;
    Ok(expansion_probe_set(sample, a, b)
        .into_iter()
        .map(|(j, k)| (r[(j, k)] - rhs[(j, k)]).norm())
        .fold(0.0, f64::max))
}

/// Error of the truncated series (remainder dropped); decreases with m for
/// moderate v.
pub fn perturbation_truncated_error(
    sample: &WignerSample,
    z: ComplexPoint,
    a: usize,
    b: usize,
    m: usize,
) -> Result<f64> {
    let (r, rhs) = expansion_sides(sample, z, a, b, m, false)?;
    Ok(expansion_probe_set(sample, a, b)
        .into_iter()
        .map(|(j, k)| (r[(j, k)] - rhs[(j, k)]).norm())
        .fold(0.0, f64::max))
}
