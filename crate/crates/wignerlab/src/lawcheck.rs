//! Statistical verification at desk scale: Kolmogorov distances,
//! local-law fluctuation scans, window densities, rigidity, eigenvector
//! delocalization, the smoothing inequality, and log-log rate fitting.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::composite_simpson;
use crate::semicircle::{self, edge_distance, stieltjes_ref, ComplexPoint};
use crate::spectral::{counting, stieltjes, SpectralData};

/// Nearest-rank quantile with midpoint interpolation when the rank lands
/// exactly between two order statistics (so median{1, 3} = 2). `sorted`
/// must be ascending and nonempty; `level` in (0, 1].
pub fn quantile(sorted: &[f64], level: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty sample");
    assert!(level > 0.0 && level <= 1.0, "quantile level {level}");
    let m = sorted.len();
    let h = level * m as f64;
    let k = h.round();
    if (h - k).abs() < 1e-9 * m as f64 {
        let k = k as usize;
        if k >= 1 && k < m {
            return 0.5 * (sorted[k - 1] + sorted[k]);
        }
    }
    sorted[(h.ceil() as usize).clamp(1, m) - 1]
}

/// The three quantile levels reported everywhere.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quantiles {
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
}

impl Quantiles {
    pub fn from_values(values: &mut Vec<f64>) -> Self {
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        Self {
            q50: quantile(values, 0.50),
            q90: quantile(values, 0.90),
            q99: quantile(values, 0.99),
        }
    }
}

/// Evaluation grid in the upper half-plane. The minimal v never drops
/// below the eigenvalue spacing scale 1/n.
#[derive(Clone, Debug)]
pub struct GridSpec {
    u: Vec<f64>,
    v: Vec<f64>,
    n: usize,
    a0: f64,
}

/// Reference scale v0 = A0 log(n) / n.
pub fn v_zero(n: usize, a0: f64) -> f64 {
    a0 * (n as f64).ln() / n as f64
}

impl GridSpec {
    pub fn new(u: Vec<f64>, v: Vec<f64>, n: usize, a0: f64) -> Result<Self> {
        if u.is_empty() || v.is_empty() {
            return Err(Error::Argument("grid must have u and v values".into()));
        }
        let spacing = 1.0 / n as f64;
        for &vi in &v {
            if !(vi > 0.0) {
                return Err(Error::Argument(format!("grid v = {vi} not positive")));
            }
            if vi < spacing {
                return Err(Error::Argument(format!(
                    "grid v = {vi} below spacing scale 1/n = {spacing}"
                )));
            }
        }
        Ok(Self { u, v, n, a0 })
    }

    /// u values crossed with `count` log-spaced v values in [v_lo, v_hi].
    pub fn log_spaced(
        u: Vec<f64>,
        n: usize,
        a0: f64,
        v_lo: f64,
        v_hi: f64,
        count: usize,
    ) -> Result<Self> {
        if !(v_lo > 0.0 && v_hi > v_lo) || count < 2 {
            return Err(Error::Argument(format!(
                "need 0 < v_lo < v_hi and count >= 2, got [{v_lo}, {v_hi}] x {count}"
            )));
        }
        let ratio = (v_hi / v_lo).ln();
        let v = (0..count)
            .map(|i| v_lo * (ratio * i as f64 / (count - 1) as f64).exp())
            .collect();
        Self::new(u, v, n, a0)
    }

    pub fn u_values(&self) -> &[f64] {
        &self.u
    }

    pub fn v_values(&self) -> &[f64] {
        &self.v
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn v0(&self) -> f64 {
        v_zero(self.n, self.a0)
    }
}

/// Quantile summary of Lambda_n = m_n - s at one grid point. The full
/// modulus is only meaningful inside the bulk (|u| <= 2 + v); the
/// imaginary part is meaningful everywhere.
#[derive(Clone, Debug)]
pub struct GridPointStats {
    pub u: f64,
    pub v: f64,
    pub in_bulk: bool,
    pub abs_lambda: Quantiles,
    pub im_lambda: Quantiles,
    pub nv_abs_lambda: Quantiles,
}

/// Least-squares line fit, optionally in log-log coordinates.
#[derive(Clone, Copy, Debug)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
    pub slope_std_error: f64,
}

#[derive(Clone, Debug)]
pub struct LabeledFit {
    pub label: String,
    pub fit: FitResult,
}

/// Aggregated campaign output: grid quantiles plus per-replica scalar
/// statistics and whatever rate fits were requested.
#[derive(Clone, Debug, Default)]
pub struct LawReport {
    pub replica_count: usize,
    pub points: Vec<GridPointStats>,
    pub ks_per_replica: Vec<f64>,
    pub rigidity_max: Vec<f64>,
    pub deloc_max: Vec<f64>,
    pub slopes: Vec<LabeledFit>,
    pub config_echo: String,
}

impl Default for GridPointStats {
    fn default() -> Self {
        let q = Quantiles {
            q50: 0.0,
            q90: 0.0,
            q99: 0.0,
        };
        Self {
            u: 0.0,
            v: 0.0,
            in_bulk: true,
            abs_lambda: q,
            im_lambda: q,
            nv_abs_lambda: q,
        }
    }
}

/// Kolmogorov distance sup_x |F_n(x) - G_sc(x)|, exact over the jump
/// points of the empirical CDF.
pub fn kolmogorov_distance(spec: &SpectralData) -> f64 {
    let n = spec.n() as f64;
    let mut sup = 0.0_f64;
    for (idx, &lambda) in spec.eigenvalues().iter().enumerate() {
        let g = semicircle::cdf(lambda).expect("finite eigenvalue");
        let hi = ((idx + 1) as f64 / n - g).abs();
        let lo = (idx as f64 / n - g).abs();
        sup = sup.max(hi).max(lo);
    }
    sup
}

/// Per-grid-point quantiles of |Lambda_n|, Im Lambda_n and nv |Lambda_n|
/// over a replica set.
pub fn local_law_scan(replicas: &[SpectralData], grid: &GridSpec) -> Result<LawReport> {
    if replicas.is_empty() {
        return Err(Error::Argument("empty replica set".into()));
    }
    let n = grid.n() as f64;
    let mut points = Vec::with_capacity(grid.u.len() * grid.v.len());
    for &u in &grid.u {
        for &v in &grid.v {
            let z = ComplexPoint::new(u, v)?;
            let s = stieltjes_ref(z);
            let mut abs = Vec::with_capacity(replicas.len());
            let mut imag = Vec::with_capacity(replicas.len());
            let mut scaled = Vec::with_capacity(replicas.len());
            for rep in replicas {
                let lambda = stieltjes(rep, z) - s;
                abs.push(lambda.norm());
                imag.push(lambda.im.abs());
                scaled.push(n * v * lambda.norm());
            }
            points.push(GridPointStats {
                u,
                v,
                in_bulk: u.abs() <= 2.0 + v,
                abs_lambda: Quantiles::from_values(&mut abs),
                im_lambda: Quantiles::from_values(&mut imag),
                nv_abs_lambda: Quantiles::from_values(&mut scaled),
            });
        }
    }
    Ok(LawReport {
        replica_count: replicas.len(),
        points,
        config_echo: format!("n={} a0={} grid={}x{}", grid.n, grid.a0, grid.u.len(), grid.v.len()),
        ..LawReport::default()
    })
}

/// One (u, v) point of the outside-the-bulk scan with its theoretical
/// envelope amplitude.
#[derive(Clone, Debug)]
pub struct OutsidePoint {
    pub u: f64,
    pub v: f64,
    pub gamma: f64,
    pub im_lambda: Quantiles,
    /// Square root of the four-term second-moment envelope (all constants
    /// set to 1, p = 2): an amplitude scale, not an asserted bound.
    pub envelope: f64,
}

#[derive(Clone, Debug)]
pub struct OutsideReport {
    pub points: Vec<OutsidePoint>,
    /// Smallest multiplier making the envelope dominate the 99% quantile
    /// at every point.
    pub fitted_prefactor: f64,
}

/// Four-term second-moment envelope for Im Lambda_n outside the bulk,
/// with p = 2 and every constant set to 1:
///   p^p / (n (gamma+v))^p
/// + p^{2p} / ((nv)^{2p} (gamma+v)^{p/2})
/// + 1 / (n^p v^{p/2} (gamma+v)^{p/2})
/// + p^{p/2} / ((nv)^{3p/2} (gamma+v)^{p/4}).
pub fn outside_envelope(n: usize, u: f64, v: f64) -> f64 {
    let gamma = edge_distance(u);
    let nf = n as f64;
    let nv = nf * v;
    let gv = gamma + v;
    let t1 = 4.0 / (nf * nf * gv * gv);
    let t2 = 16.0 / (nv.powi(4) * gv);
    let t3 = 1.0 / (nf * nf * v * gv);
    let t4 = 2.0 / (nv.powi(3) * gv.sqrt());
    t1 + t2 + t3 + t4
}

/// Quantiles of Im Lambda_n at points strictly outside the bulk, compared
/// in shape against the envelope.
pub fn imag_law_outside(
    replicas: &[SpectralData],
    u_values: &[f64],
    v_values: &[f64],
) -> Result<OutsideReport> {
    if replicas.is_empty() {
        return Err(Error::Argument("empty replica set".into()));
    }
    if u_values.is_empty() || v_values.is_empty() {
        return Err(Error::Argument("empty evaluation grid".into()));
    }
    let n = replicas[0].n();
    let mut points = Vec::new();
    let mut prefactor = 0.0_f64;
    for &u in u_values {
        if u.abs() <= 2.0 {
            return Err(Error::Argument(format!(
                "u = {u} is inside the bulk; this scan requires |u| > 2"
            )));
        }
        for &v in v_values {
            let z = ComplexPoint::new(u, v)?;
            let s = stieltjes_ref(z);
            let mut imag: Vec<f64> = replicas
                .iter()
                .map(|rep| (stieltjes(rep, z) - s).im.abs())
                .collect();
            let q = Quantiles::from_values(&mut imag);
            let envelope = outside_envelope(n, u, v).sqrt();
            prefactor = prefactor.max(q.q99 / envelope);
            points.push(OutsidePoint {
                u,
                v,
                gamma: edge_distance(u),
                im_lambda: q,
                envelope,
            });
        }
    }
    Ok(OutsideReport {
        points,
        fitted_prefactor: prefactor,
    })
}

/// Normalized eigenvalue count in the window [x - xi/2n, x + xi/2n]:
/// N / xi, comparable to g_sc(x).
pub fn window_density(spec: &SpectralData, x: f64, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(Error::Argument(format!("window width xi = {xi} must be positive")));
    }
    let half = xi / (2.0 * spec.n() as f64);
    Ok(counting(spec, x - half, x + half)? as f64 / xi)
}

/// Per-index eigenvalue-vs-quantile deviations and normalized maxima.
#[derive(Clone, Debug)]
pub struct RigidityReport {
    /// dev_j = |lambda_j - gamma_j| with gamma_j defined by G_sc = j/n.
    pub deviations: Vec<f64>,
    /// r_j = dev_j * n^{2/3} * min(j, n+1-j)^{1/3}.
    pub normalized: Vec<f64>,
    pub max: f64,
    /// 1-based index attaining the maximum.
    pub argmax: usize,
}

impl RigidityReport {
    /// Maximum of r_j over the 1-based inclusive index range [lo, hi].
    pub fn max_over(&self, lo: usize, hi: usize) -> f64 {
        self.normalized[lo - 1..hi]
            .iter()
            .copied()
            .fold(0.0, f64::max)
    }
}

/// Rigidity statistics. The quantile convention G_sc(gamma_j) = j/n
/// inflates the deviation at j = n (gamma_n = 2 exactly); the normalized
/// maxima are therefore most informative over bulk indices.
pub fn rigidity_report(spec: &SpectralData) -> Result<RigidityReport> {
    let n = spec.n();
    let nf = n as f64;
    let mut deviations = Vec::with_capacity(n);
    let mut normalized = Vec::with_capacity(n);
    let mut max = f64::NEG_INFINITY;
    let mut argmax = 1;
    for (idx, &lambda) in spec.eigenvalues().iter().enumerate() {
        let j = idx + 1;
        let dev = (lambda - semicircle::quantile(j, n)?).abs();
        let r = dev * nf.powf(2.0 / 3.0) * (j.min(n + 1 - j) as f64).cbrt();
        if r > max {
            max = r;
            argmax = j;
        }
        deviations.push(dev);
        normalized.push(r);
    }
    Ok(RigidityReport {
        deviations,
        normalized,
        max,
        argmax,
    })
}

/// Delocalization statistic n * max_{j,k} |u_jk|^2 / log n. Bounded for
/// flat eigenvectors, of order n / log n for localized ones.
pub fn delocalization_report(spec: &SpectralData) -> Result<f64> {
    let n = spec.n();
    if n < 2 {
        return Err(Error::Argument("delocalization statistic requires n >= 2".into()));
    }
    let vectors = spec
        .eigenvectors()
        .ok_or_else(|| Error::Contract("delocalization requires eigenvectors".into()))?;
    let max_sq = vectors.iter().map(|x| x * x).fold(0.0, f64::max);
    Ok(n as f64 * max_sq / (n as f64).ln())
}

/// The four evaluated terms of the smoothing inequality, constants set
/// to 1.
#[derive(Clone, Copy, Debug)]
pub struct SmoothingBound {
    /// Integral of |f - s| along the horizontal line Im z = V, including
    /// a tail estimate beyond the cut.
    pub term1: f64,
    /// v0.
    pub term2: f64,
    /// epsilon^{3/2}.
    pub term3: f64,
    /// 2 sup_x |integral of (f - s)(x + iv) over v in [v'(x), V]|.
    pub term4: f64,
}

impl SmoothingBound {
    pub fn total(&self) -> f64 {
        self.term1 + self.term2 + self.term3 + self.term4
    }
}

/// Quadrature resolution knobs for [`smoothing_bound_with`].
#[derive(Clone, Copy, Debug)]
pub struct SmoothingOptions {
    /// Half-width of the term-1 integration range.
    pub u_cut: f64,
    /// Simpson intervals per integral.
    pub intervals: usize,
    /// Grid points for the supremum over x.
    pub x_points: usize,
}

impl Default for SmoothingOptions {
    fn default() -> Self {
        Self {
            u_cut: 20.0,
            intervals: 1024,
            x_points: 201,
        }
    }
}

fn smoothing_precondition(v0: f64, eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::Argument(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    let lhs = 2.0 * (2.0_f64.sqrt() + 1.0) * v0;
    let rhs = eps.powf(1.5);
    if lhs > rhs {
        return Err(Error::Argument(format!(
            "precondition 2(sqrt(2)+1) v0 <= eps^(3/2) fails: {lhs:.6e} > {rhs:.6e}"
        )));
    }
    Ok(())
}

/// Smoothing-inequality terms at fixed quadrature resolution.
pub fn smoothing_bound_with<F>(
    f: &F,
    v0: f64,
    eps: f64,
    v_big: f64,
    opts: &SmoothingOptions,
) -> Result<SmoothingBound>
where
    F: Fn(ComplexPoint) -> Complex64,
{
    smoothing_precondition(v0, eps)?;
    if !(v_big > 0.0) {
        return Err(Error::Argument(format!("V = {v_big} must be positive")));
    }

    let diff = |u: f64, v: f64| -> Complex64 {
        let z = ComplexPoint::new(u, v).expect("v > 0 by construction");
        f(z) - stieltjes_ref(z)
    };

    // Term 1: integral of |f - s| on the line Im z = V, truncated at
    // |u| = u_cut. The tail is estimated from the integrand value at the
    // cut assuming the generic ~u^{-2} decay of a difference of Stieltjes
    // transforms: each side contributes about |g(+-U)| * U.
    let integrand = |u: f64| diff(u, v_big).norm();
    let body = composite_simpson(&integrand, -opts.u_cut, opts.u_cut, opts.intervals);
    let tail = (integrand(opts.u_cut) + integrand(-opts.u_cut)) * opts.u_cut;
    let term1 = body + tail;

    // Term 4: sup over x in J'_eps = [-2 + eps/2, 2 - eps/2] of the
    // modulus of the vertical integral from v'(x) = v0 / sqrt(2 - |x|).
    let lo = -2.0 + eps / 2.0;
    let hi = 2.0 - eps / 2.0;
    let mut sup = 0.0_f64;
    for i in 0..opts.x_points {
        let x = lo + (hi - lo) * i as f64 / (opts.x_points - 1) as f64;
        let v_start = v0 / (2.0 - x.abs()).sqrt();
        if v_start >= v_big {
            continue;
        }
        let re = composite_simpson(&|v| diff(x, v).re, v_start, v_big, opts.intervals);
        let im = composite_simpson(&|v| diff(x, v).im, v_start, v_big, opts.intervals);
        sup = sup.max(re.hypot(im));
    }

    Ok(SmoothingBound {
        term1,
        term2: v0,
        term3: eps.powf(1.5),
        term4: 2.0 * sup,
    })
}

/// Smoothing-inequality terms with automatic step halving until terms 1
/// and 4 are stable to 1e-3 relative.
pub fn smoothing_bound<F>(f: &F, v0: f64, eps: f64, v_big: f64) -> Result<SmoothingBound>
where
    F: Fn(ComplexPoint) -> Complex64,
{
    let mut opts = SmoothingOptions {
        intervals: 256,
        ..SmoothingOptions::default()
    };
    let mut prev = smoothing_bound_with(f, v0, eps, v_big, &opts)?;
    for _ in 0..5 {
        opts.intervals *= 2;
        let next = smoothing_bound_with(f, v0, eps, v_big, &opts)?;
        let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-12);
        if rel(prev.term1, next.term1) < 1e-3 && rel(prev.term4, next.term4) < 1e-3 {
            return Ok(next);
        }
        prev = next;
    }
    Ok(prev)
}

/// Least-squares line through the points, in log-log coordinates when
/// requested. Reports the max absolute residual and the slope's standard
/// error.
pub fn scaling_fit(points: &[(f64, f64)], log_log: bool) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Argument(format!(
            "fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    let mut xs = Vec::with_capacity(points.len());
    let mut ys = Vec::with_capacity(points.len());
    for &(x, y) in points {
        if log_log {
            if !(x > 0.0 && y > 0.0) {
                return Err(Error::Argument(format!(
                    "log-log fit requires positive values, got ({x}, {y})"
                )));
            }
            xs.push(x.ln());
            ys.push(y.ln());
        } else {
            xs.push(x);
            ys.push(y);
        }
    }
    let m = xs.len() as f64;
    let x_bar = xs.iter().sum::<f64>() / m;
    let y_bar = ys.iter().sum::<f64>() / m;
    let sxx: f64 = xs.iter().map(|x| (x - x_bar).powi(2)).sum();
    if sxx < 1e-300 {
        return Err(Error::Argument("fit x values are all equal".into()));
    }
    let sxy: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - x_bar) * (y - y_bar))
        .sum();
    let slope = sxy / sxx;
    let intercept = y_bar - slope * x_bar;
    let mut max_residual = 0.0_f64;
    let mut rss = 0.0_f64;
    for (x, y) in xs.iter().zip(&ys) {
        let r = y - (intercept + slope * x);
        max_residual = max_residual.max(r.abs());
        rss += r * r;
    }
    let slope_std_error = if points.len() > 2 {
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(FitResult {
        slope,
        intercept,
        max_residual,
        slope_std_error,
    })
}

/// Kolmogorov distance between the replica-averaged empirical CDF and
/// G_sc, exact over the pooled jump points.
pub fn mean_esd_distance(replicas: &[SpectralData]) -> Result<f64> {
    if replicas.is_empty() {
        return Err(Error::Argument("empty replica set".into()));
    }
    let n = replicas[0].n();
    let mut pooled = Vec::with_capacity(n * replicas.len());
    for rep in replicas {
        if rep.n() != n {
            return Err(Error::Argument(format!(
                "mixed dimensions: {} vs {}",
                rep.n(),
                n
            )));
        }
        pooled.extend_from_slice(rep.eigenvalues());
    }
    // The replica mean of the empirical CDFs equals the pooled empirical
    // CDF, so the sup reduces to the single-sample formula.
    Ok(kolmogorov_distance(&SpectralData::from_eigenvalues(pooled)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample_wigner, EntryDistribution};
    use crate::spectral::eigendecompose;
    use proptest::prelude::*;

    fn rademacher_spectra(n: usize, count: usize, base_seed: u64) -> Vec<SpectralData> {
        let dist = EntryDistribution::rademacher();
        (0..count)
            .map(|i| {
                let s = sample_wigner(n, &dist, base_seed + i as u64).unwrap();
                eigendecompose(&s, false).unwrap()
            })
            .collect()
    }

    #[test]
    fn quantile_convention_pinned() {
        assert_eq!(quantile(&[1.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[1.0, 2.0, 3.0], 0.5), 2.0);
        assert_eq!(quantile(&[5.0], 0.5), 5.0);
        let fifty: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        assert_eq!(quantile(&fifty, 0.99), 50.0);
        assert_eq!(quantile(&fifty, 0.90), 45.5);
        assert_eq!(quantile(&fifty, 1.0), 50.0);
    }

    #[test]
    fn grid_spec_validation() {
        assert!(GridSpec::new(vec![0.0], vec![0.5], 100, 4.0).is_ok());
        assert!(GridSpec::new(vec![0.0], vec![-0.5], 100, 4.0).is_err());
        assert!(GridSpec::new(vec![0.0], vec![1e-4], 100, 4.0).is_err());
        let g = GridSpec::log_spaced(vec![0.0], 1024, 4.0, 0.05, 0.5, 5).unwrap();
        assert_eq!(g.v_values().len(), 5);
        assert!((g.v_values()[0] - 0.05).abs() < 1e-12);
        assert!((g.v_values()[4] - 0.5).abs() < 1e-12);
        for pair in g.v_values().windows(2) {
            assert!((pair[1] / pair[0] - g.v_values()[1] / g.v_values()[0]).abs() < 1e-9);
        }
        assert!((v_zero(1024, 4.0) - 4.0 * 1024.0_f64.ln() / 1024.0).abs() < 1e-15);
    }

    #[test]
    fn ks_half_quantile_construction() {
        // lambda_j at the (j - 1/2)/n quantile gives distance exactly 1/(2n).
        let n = 64;
        let eig: Vec<f64> = (1..=n)
            .map(|j| semicircle::quantile(2 * j - 1, 2 * n).unwrap())
            .collect();
        let spec = SpectralData::from_eigenvalues(eig);
        let d = kolmogorov_distance(&spec);
        assert!((d - 1.0 / (2.0 * n as f64)).abs() < 1e-9, "d = {d}");
    }

    #[test]
    fn ks_degenerate_spectrum() {
        let spec = SpectralData::from_eigenvalues(vec![0.0; 10]);
        assert!((kolmogorov_distance(&spec) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ks_matches_brute_force_grid() {
        let dist = EntryDistribution::rademacher();
        let sample = sample_wigner(80, &dist, 5).unwrap();
        let spec = eigendecompose(&sample, false).unwrap();
        let exact = kolmogorov_distance(&spec);
        let mut brute = 0.0_f64;
        let grid = 100_000;
        for i in 0..=grid {
            let x = -3.0 + 6.0 * i as f64 / grid as f64;
            let diff = (crate::spectral::esd_cdf(&spec, x) - semicircle::cdf(x).unwrap()).abs();
            brute = brute.max(diff);
        }
        assert!(exact >= brute - 1e-12);
        assert!(exact - brute < 1e-4, "exact {exact} vs grid {brute}");
    }

    #[test]
    fn scan_single_replica_collapses() {
        let reps = rademacher_spectra(64, 1, 9);
        let grid = GridSpec::new(vec![0.0], vec![0.5], 64, 4.0).unwrap();
        let report = local_law_scan(&reps, &grid).unwrap();
        assert_eq!(report.replica_count, 1);
        let p = &report.points[0];
        assert_eq!(p.abs_lambda.q50, p.abs_lambda.q90);
        assert_eq!(p.abs_lambda.q90, p.abs_lambda.q99);
        assert!(p.in_bulk);
    }

    #[test]
    fn scan_rejects_empty_replicas() {
        let grid = GridSpec::new(vec![0.0], vec![0.5], 64, 4.0).unwrap();
        assert!(local_law_scan(&[], &grid).is_err());
    }

    #[test]
    fn scan_quantiles_monotone_and_median_decreasing() {
        let reps = rademacher_spectra(128, 12, 100);
        let grid = GridSpec::log_spaced(vec![0.0], 128, 4.0, 0.08, 1.0, 6).unwrap();
        let report = local_law_scan(&reps, &grid).unwrap();
        for p in &report.points {
            assert!(p.abs_lambda.q50 <= p.abs_lambda.q90 + 1e-15);
            assert!(p.abs_lambda.q90 <= p.abs_lambda.q99 + 1e-15);
            assert!(p.im_lambda.q50 <= p.im_lambda.q99 + 1e-15);
        }
        // Median fluctuation broadly shrinks as v grows; compare endpoints.
        let first = report.points.first().unwrap().abs_lambda.q50;
        let last = report.points.last().unwrap().abs_lambda.q50;
        assert!(last < first, "median |Lambda| not decreasing: {first} -> {last}");
    }

    #[test]
    fn outside_scan_contracts() {
        let reps = rademacher_spectra(256, 10, 300);
        assert!(imag_law_outside(&reps, &[1.0], &[0.5]).is_err());
        let report = imag_law_outside(&reps, &[4.0], &[0.25, 1.0]).unwrap();
        assert!(report.fitted_prefactor.is_finite());
        // Global regime: both transforms are smooth and close at v = 1.
        for p in &report.points {
            if p.v >= 1.0 {
                assert!(p.im_lambda.q99 <= 0.1, "Im Lambda q99 = {}", p.im_lambda.q99);
            }
        }
        // Far outside the spectrum the fluctuations are much smaller than
        // in the bulk at the same v.
        let grid = GridSpec::new(vec![0.0], vec![0.25], 256, 4.0).unwrap();
        let bulk = local_law_scan(&reps, &grid).unwrap();
        assert!(report.points[0].im_lambda.q50 < bulk.points[0].im_lambda.q50 / 3.0);
    }

    #[test]
    fn window_density_cases() {
        let dist = EntryDistribution::rademacher();
        let sample = sample_wigner(200, &dist, 11).unwrap();
        let spec = eigendecompose(&sample, false).unwrap();
        assert!(window_density(&spec, 0.0, 0.0).is_err());
        // Window of full spectral width: count / xi exactly.
        let xi = 4.0 * 200.0;
        let inside = counting(&spec, -2.0, 2.0).unwrap();
        if inside == 200 {
            assert!((window_density(&spec, 0.0, xi).unwrap() - 0.25).abs() < 1e-15);
        }
        // No eigenvalues near x = 3.
        assert_eq!(window_density(&spec, 3.0, 16.0).unwrap(), 0.0);
    }

    #[test]
    fn window_density_integrates_back() {
        let dist = EntryDistribution::rademacher();
        let sample = sample_wigner(150, &dist, 23).unwrap();
        let spec = eigendecompose(&sample, false).unwrap();
        let n = 150;
        // Disjoint windows of width 0.25 covering [-3, 3].
        let width = 0.25;
        let xi = width * n as f64;
        let mut total = 0.0;
        for i in 0..24 {
            let x = -3.0 + width * (i as f64 + 0.5);
            total += window_density(&spec, x, xi).unwrap() * xi;
        }
        assert!((total - n as f64).abs() < 1.5, "recovered {total} of {n}");
    }

    #[test]
    fn rigidity_zero_on_quantiles() {
        let n = 40;
        let eig: Vec<f64> = (1..=n).map(|j| semicircle::quantile(j, n).unwrap()).collect();
        let spec = SpectralData::from_eigenvalues(eig);
        let report = rigidity_report(&spec).unwrap();
        assert!(report.max < 1e-8, "max r_j = {}", report.max);
    }

    #[test]
    fn rigidity_edge_index_weight() {
        // Shift only lambda_1; r_1 must use min(j, n+1-j) = 1.
        let n = 40;
        let mut eig: Vec<f64> = (1..=n).map(|j| semicircle::quantile(j, n).unwrap()).collect();
        eig[0] -= 0.01;
        let spec = SpectralData::from_eigenvalues(eig);
        let report = rigidity_report(&spec).unwrap();
        assert_eq!(report.argmax, 1);
        let expect = 0.01 * (n as f64).powf(2.0 / 3.0);
        assert!((report.max - expect).abs() < 1e-9);
        assert!(report.max_over(2, n) < 1e-8);
    }

    #[test]
    fn delocalization_cases() {
        let dist = EntryDistribution::rademacher();
        let sample = sample_wigner(64, &dist, 2).unwrap();
        let novecs = eigendecompose(&sample, false).unwrap();
        assert!(delocalization_report(&novecs).is_err());

        // Orthonormal columns force max |u_jk|^2 <= 1.
        let spec = eigendecompose(&sample, true).unwrap();
        let stat = delocalization_report(&spec).unwrap();
        assert!(stat > 0.0 && stat <= 64.0 / 64.0_f64.ln() + 1e-12);

        // Diagonal matrix: identity eigenvectors, fully localized.
        let diag = nalgebra::DMatrix::<f64>::from_fn(32, 32, |j, k| {
            if j == k {
                (j + 1) as f64 / 32.0_f64.sqrt()
            } else {
                0.0
            }
        });
        let local = crate::ensemble::WignerSample::from_matrix(diag, 0, "diag").unwrap();
        let spec = eigendecompose(&local, true).unwrap();
        let stat = delocalization_report(&spec).unwrap();
        assert!((stat - 32.0 / 32.0_f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn smoothing_self_test_and_precondition() {
        let v0 = 0.01;
        let eps = 0.2;
        assert!(smoothing_bound(&stieltjes_ref, 0.1, 0.2, 1.0).is_err());
        let b = smoothing_bound(&stieltjes_ref, v0, eps, 1.0).unwrap();
        assert!(b.term1.abs() < 1e-6);
        assert!(b.term4.abs() < 1e-6);
        assert!((b.term2 - v0).abs() < 1e-15);
        assert!((b.term3 - eps.powf(1.5)).abs() < 1e-15);
        assert!((b.total() - (b.term1 + b.term2 + b.term3 + b.term4)).abs() < 1e-15);
    }

    #[test]
    fn smoothing_step_halving_consistent() {
        let reps = rademacher_spectra(128, 8, 700);
        let f = |z: ComplexPoint| {
            let sum: Complex64 = reps.iter().map(|r| stieltjes(r, z)).sum();
            sum / reps.len() as f64
        };
        let coarse = SmoothingOptions {
            intervals: 512,
            ..SmoothingOptions::default()
        };
        let fine = SmoothingOptions {
            intervals: 1024,
            ..SmoothingOptions::default()
        };
        let v0 = 0.02;
        let eps = 0.3;
        let a = smoothing_bound_with(&f, v0, eps, 1.0, &coarse).unwrap();
        let b = smoothing_bound_with(&f, v0, eps, 1.0, &fine).unwrap();
        assert!((a.term1 - b.term1).abs() / b.term1 < 0.01);
        assert!((a.term4 - b.term4).abs() / b.term4.max(1e-12) < 0.01);
    }

    #[test]
    fn scaling_fit_exact_laws() {
        let square: Vec<(f64, f64)> = (1..=6).map(|i| (i as f64, (i * i) as f64)).collect();
        let fit = scaling_fit(&square, true).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
        assert!(fit.slope_std_error < 1e-12);

        let inv: Vec<(f64, f64)> = (1..=5).map(|i| (i as f64, 3.0 / i as f64)).collect();
        let fit = scaling_fit(&inv, true).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0_f64.ln()).abs() < 1e-12);

        assert!(scaling_fit(&square[..2], true).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)], true).is_err());
        assert!(scaling_fit(&[(1.0, 1.0), (2.0, -1.0), (3.0, 1.0)], false).is_ok());
    }

    #[test]
    fn mean_esd_trivial_cases() {
        let reps = rademacher_spectra(64, 1, 55);
        let single = mean_esd_distance(&reps).unwrap();
        assert!((single - kolmogorov_distance(&reps[0])).abs() < 1e-15);
        let repeated = vec![reps[0].clone(), reps[0].clone(), reps[0].clone()];
        assert!((mean_esd_distance(&repeated).unwrap() - single).abs() < 1e-12);
        assert!(mean_esd_distance(&[]).is_err());
        let mixed = vec![reps[0].clone(), rademacher_spectra(32, 1, 1).remove(0)];
        assert!(mean_esd_distance(&mixed).is_err());
    }

    #[test]
    fn mean_esd_bounded_by_mean_ks() {
        let reps = rademacher_spectra(96, 10, 400);
        let mean_dist = mean_esd_distance(&reps).unwrap();
        let mean_ks: f64 =
            reps.iter().map(kolmogorov_distance).sum::<f64>() / reps.len() as f64;
        assert!(mean_dist <= mean_ks + 1e-12);
    }

    proptest! {
        #[test]
        fn quantiles_monotone_in_level(mut values in prop::collection::vec(-1e6..1e6f64, 1..40)) {
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let q = [0.1, 0.25, 0.5, 0.9, 0.99, 1.0];
            for pair in q.windows(2) {
                prop_assert!(quantile(&values, pair[0]) <= quantile(&values, pair[1]) + 1e-12);
            }
        }

        #[test]
        fn fit_recovers_random_power_law(
            slope in -3.0..3.0f64,
            scale in 0.1..10.0f64,
        ) {
            let pts: Vec<(f64, f64)> = (1..=8)
                .map(|i| {
                    let x = i as f64;
                    (x, scale * x.powf(slope))
                })
                .collect();
            let fit = scaling_fit(&pts, true).unwrap();
            prop_assert!((fit.slope - slope).abs() < 1e-9);
            prop_assert!((fit.intercept - scale.ln()).abs() < 1e-9);
        }
    }
}
