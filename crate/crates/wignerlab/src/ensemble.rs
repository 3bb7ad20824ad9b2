//! Matrix-entry distributions, Wigner sampling, the truncation and
//! standardization pipeline, and four-moment-matching companion laws.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::quadrature::adaptive_simpson;
use crate::rng::replica_rng;

/// Effective integration cutoff for the standard normal: the neglected tail
/// mass is far below every tolerance used here.
const GAUSS_CUT: f64 = 16.0;

/// Fixed factor bounding the matched atoms: |atom| <= 1.5 * B whenever
/// B >= A^2 + 1.
pub const MATCH_ATOM_BOUND_FACTOR: f64 = 1.5;

/// Concrete sampling law for one standardized matrix entry.
#[derive(Clone, Debug, PartialEq)]
pub enum EntryLaw {
    /// +/-1 with equal probability.
    Rademacher,
    /// Standard normal.
    Gaussian,
    /// Finite discrete law given by atoms and weights.
    Table { atoms: Vec<f64>, weights: Vec<f64> },
    /// Symmetrized Pareto with the given tail index, rescaled to unit
    /// variance. All moments of order below `tail_index` are finite.
    SymmetrizedPareto { tail_index: f64 },
    /// X * 1[|X| <= threshold] of the base law, recentred by `center` and
    /// rescaled by `scale`.
    Truncated {
        base: Box<EntryLaw>,
        threshold: f64,
        center: f64,
        scale: f64,
    },
}

impl EntryLaw {
    fn pareto_sigma0(tail_index: f64) -> f64 {
        (tail_index / (tail_index - 2.0)).sqrt()
    }

    /// Raw k-th moment E X^k. Errors on divergent requests.
    fn raw_moment(&self, k: u32) -> Result<f64> {
        match self {
            EntryLaw::Rademacher => Ok(if k % 2 == 0 { 1.0 } else { 0.0 }),
            EntryLaw::Gaussian => {
                let f = move |x: f64| x.powi(k as i32) * gauss_density(x);
                Ok(adaptive_simpson(&f, -GAUSS_CUT, GAUSS_CUT, 1e-12))
            }
            EntryLaw::Table { atoms, weights } => Ok(atoms
                .iter()
                .zip(weights)
                .map(|(a, w)| w * a.powi(k as i32))
                .sum()),
            EntryLaw::SymmetrizedPareto { tail_index } => {
                let a = *tail_index;
                if k as f64 >= a {
                    return Err(Error::Argument(format!(
                        "moment of order {k} diverges for tail index {a}"
                    )));
                }
                if k % 2 == 1 {
                    return Ok(0.0);
                }
                let lo = 1.0 / Self::pareto_sigma0(a);
                // Integrate the body numerically and add the exact power-law
                // tail remainder beyond x0.
                let x0 = 1e4_f64;
                let f = move |x: f64| x.powi(k as i32) * pareto_density(x, a);
                let body = 2.0 * adaptive_simpson(&f, lo, x0, 1e-12);
                let sigma0 = Self::pareto_sigma0(a);
                let tail = a * sigma0.powf(-a) * x0.powf(k as f64 - a) / (a - k as f64);
                Ok(body + tail)
            }
            EntryLaw::Truncated {
                base,
                threshold,
                center,
                scale,
            } => {
                // E ((hat X - c)/s)^k via binomial expansion in the hat
                // moments; hat X = X 1[|X| <= T].
                let mut total = 0.0;
                let mut binom = 1.0_f64;
                for i in 0..=k {
                    let hm = if i == 0 {
                        1.0
                    } else {
                        base.hat_moment(i, *threshold)?
                    };
                    total += binom * hm * (-center).powi((k - i) as i32);
                    binom = binom * ((k - i) as f64) / ((i + 1) as f64);
                }
                Ok(total / scale.powi(k as i32))
            }
        }
    }

    /// E[X^k 1(|X| <= t)] for k >= 1.
    fn hat_moment(&self, k: u32, t: f64) -> Result<f64> {
        match self {
            EntryLaw::Rademacher => Ok(if t >= 1.0 {
                if k % 2 == 0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                0.0
            }),
            EntryLaw::Gaussian => {
                let cut = t.min(GAUSS_CUT);
                let f = move |x: f64| x.powi(k as i32) * gauss_density(x);
                Ok(adaptive_simpson(&f, -cut, cut, 1e-12))
            }
            EntryLaw::Table { atoms, weights } => Ok(atoms
                .iter()
                .zip(weights)
                .filter(|(a, _)| a.abs() <= t)
                .map(|(a, w)| w * a.powi(k as i32))
                .sum()),
            EntryLaw::SymmetrizedPareto { tail_index } => {
                if k % 2 == 1 {
                    return Ok(0.0);
                }
                let a = *tail_index;
                let lo = 1.0 / Self::pareto_sigma0(a);
                if t <= lo {
                    return Ok(0.0);
                }
                let f = move |x: f64| x.powi(k as i32) * pareto_density(x, a);
                Ok(2.0 * adaptive_simpson(&f, lo, t, 1e-12))
            }
            EntryLaw::Truncated { .. } => Err(Error::Argument(
                "nested truncation is not supported".into(),
            )),
        }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            EntryLaw::Rademacher => {
                if rng.gen::<bool>() {
                    1.0
                } else {
                    -1.0
                }
            }
            EntryLaw::Gaussian => rng.sample(StandardNormal),
            EntryLaw::Table { atoms, weights } => {
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                for (a, w) in atoms.iter().zip(weights) {
                    acc += w;
                    if u < acc {
                        return *a;
                    }
                }
                *atoms.last().expect("non-empty table")
            }
            EntryLaw::SymmetrizedPareto { tail_index } => {
                let u: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
                let p = u.powf(-1.0 / tail_index);
                let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                sign * p / Self::pareto_sigma0(*tail_index)
            }
            EntryLaw::Truncated {
                base,
                threshold,
                center,
                scale,
            } => {
                let x = base.sample(rng);
                let hat = if x.abs() <= *threshold { x } else { 0.0 };
                (hat - center) / scale
            }
        }
    }

    fn support_bound(&self) -> Option<f64> {
        match self {
            EntryLaw::Rademacher => Some(1.0),
            EntryLaw::Gaussian | EntryLaw::SymmetrizedPareto { .. } => None,
            EntryLaw::Table { atoms, .. } => {
                atoms.iter().map(|a| a.abs()).fold(None, |acc, x| {
                    Some(acc.map_or(x, |m: f64| m.max(x)))
                })
            }
            EntryLaw::Truncated {
                base,
                threshold,
                center,
                scale,
            } => {
                let raw = base.support_bound().map_or(*threshold, |b| b.min(*threshold));
                Some((raw + center.abs()) / scale)
            }
        }
    }
}

fn gauss_density(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Density of |X| folded symmetrically: f(x) = (a/2) sigma0^-a |x|^(-a-1)
/// for |x| >= 1/sigma0, where sigma0 normalizes the variance to 1.
fn pareto_density(x: f64, tail_index: f64) -> f64 {
    let sigma0 = EntryLaw::pareto_sigma0(tail_index);
    if x.abs() < 1.0 / sigma0 {
        0.0
    } else {
        0.5 * tail_index * sigma0.powf(-tail_index) * x.abs().powf(-tail_index - 1.0)
    }
}

/// A standardized matrix-entry law together with its declared moment margin
/// delta (so that the (4 + delta)-th absolute moment is finite).
#[derive(Clone, Debug, PartialEq)]
pub struct EntryDistribution {
    law: EntryLaw,
    delta: f64,
}

impl EntryDistribution {
    /// Wraps a law after verifying mean 0 and unit variance to 1e-10.
    pub fn new(law: EntryLaw, delta: f64) -> Result<Self> {
        if delta <= 0.0 || !delta.is_finite() {
            return Err(Error::Config(format!(
                "moment margin delta must be positive and finite, got {delta}"
            )));
        }
        if let EntryLaw::Table { atoms, weights } = &law {
            if atoms.is_empty() || atoms.len() != weights.len() {
                return Err(Error::Config(
                    "table law needs equally many atoms and weights".into(),
                ));
            }
            if weights.iter().any(|w| *w < -1e-15) {
                return Err(Error::Config("table weights must be nonnegative".into()));
            }
            let total: f64 = weights.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::Config(format!(
                    "table weights sum to {total}, expected 1"
                )));
            }
        }
        if let EntryLaw::SymmetrizedPareto { tail_index } = &law {
            if *tail_index <= 2.0 {
                return Err(Error::Config(format!(
                    "pareto tail index must exceed 2, got {tail_index}"
                )));
            }
        }
        let dist = Self { law, delta };
        let m1 = dist.moment(1)?;
        let m2 = dist.moment(2)?;
        if m1.abs() > 1e-10 || (m2 - 1.0).abs() > 1e-10 {
            return Err(Error::Config(format!(
                "law is not standardized: mean {m1:.3e}, variance {m2:.12}"
            )));
        }
        Ok(dist)
    }

    pub fn rademacher() -> Self {
        Self::new(EntryLaw::Rademacher, 4.0).expect("rademacher is standardized")
    }

    pub fn gaussian() -> Self {
        Self::new(EntryLaw::Gaussian, 4.0).expect("gaussian is standardized")
    }

    pub fn table(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        Self::new(EntryLaw::Table { atoms, weights }, 4.0)
    }

    /// Symmetrized Pareto exemplar realizing a finite mu_{4+delta} with
    /// heavy tails: the tail index is 4 + delta + 0.1.
    pub fn symmetrized_pareto(delta: f64) -> Result<Self> {
        Self::new(
            EntryLaw::SymmetrizedPareto {
                tail_index: 4.0 + delta + 0.1,
            },
            delta,
        )
    }

    pub fn law(&self) -> &EntryLaw {
        &self.law
    }

    /// Declared moment-margin exponent delta.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Deterministic almost-sure bound on |X|, when one exists.
    pub fn support_bound(&self) -> Option<f64> {
        self.law.support_bound()
    }

    /// k-th moment E X^k: exact summation for discrete laws, adaptive
    /// quadrature for continuous ones.
    pub fn moment(&self, k: u32) -> Result<f64> {
        if k < 1 {
            return Err(Error::Argument("moment order must be >= 1".into()));
        }
        self.law.raw_moment(k)
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        self.law.sample(rng)
    }

    /// Short textual tag for reports.
    pub fn tag(&self) -> String {
        match &self.law {
            EntryLaw::Rademacher => "rademacher".into(),
            EntryLaw::Gaussian => "gaussian".into(),
            EntryLaw::Table { atoms, .. } => format!("table[{}]", atoms.len()),
            EntryLaw::SymmetrizedPareto { tail_index } => format!("pareto[a={tail_index}]"),
            EntryLaw::Truncated { threshold, .. } => format!("truncated[T={threshold:.4}]"),
        }
    }

    /// Parses a textual distribution spec:
    /// `rademacher`, `gaussian`, `pareto:delta=<d>`,
    /// `table:atoms=<a,...>;weights=<w,...>`, `match:a3=<A>;b4=<B>`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let (name, rest) = match spec.split_once(':') {
            Some((n, r)) => (n.trim(), r.trim()),
            None => (spec.trim(), ""),
        };
        let params = parse_params(rest)?;
        let get = |key: &str| -> Result<f64> {
            params
                .iter()
                .find(|(k, _)| k == key)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::Config(format!("distribution spec missing field `{key}`")))
        };
        match name {
            "rademacher" => Ok(Self::rademacher()),
            "gaussian" => Ok(Self::gaussian()),
            "pareto" => Self::symmetrized_pareto(get("delta")?),
            "match" => four_moment_match(get("a3")?, get("b4")?),
            "table" => {
                let atoms = parse_list(rest, "atoms")?;
                let weights = parse_list(rest, "weights")?;
                Self::table(atoms, weights)
            }
            other => Err(Error::Config(format!(
                "unknown distribution name `{other}` in spec `{spec}`"
            ))),
        }
    }

    /// Textual spec that `parse_spec` accepts back.
    pub fn spec_string(&self) -> String {
        match &self.law {
            EntryLaw::Rademacher => "rademacher".into(),
            EntryLaw::Gaussian => "gaussian".into(),
            EntryLaw::SymmetrizedPareto { tail_index } => {
                format!("pareto:delta={}", tail_index - 4.1)
            }
            EntryLaw::Table { atoms, weights } => format!(
                "table:atoms={};weights={}",
                join(atoms),
                join(weights)
            ),
            EntryLaw::Truncated { .. } => "truncated".into(),
        }
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter()
        .map(|x| format!("{x:.17e}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_params(rest: &str) -> Result<Vec<(String, f64)>> {
    let mut out = Vec::new();
    for part in rest.split(';').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("malformed distribution field `{part}`")))?;
        if let Ok(x) = v.trim().parse::<f64>() {
            out.push((k.trim().to_string(), x));
        }
    }
    Ok(out)
}

fn parse_list(rest: &str, key: &str) -> Result<Vec<f64>> {
    for part in rest.split(';') {
        if let Some((k, v)) = part.split_once('=') {
            if k.trim() == key {
                return v
                    .split(',')
                    .map(|t| {
                        t.trim().parse::<f64>().map_err(|_| {
                            Error::Config(format!("bad number `{t}` in field `{key}`"))
                        })
                    })
                    .collect();
            }
        }
    }
    Err(Error::Config(format!("distribution spec missing field `{key}`")))
}

/// Truncation and standardization parameters for the bounded-entry pipeline.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TruncationPolicy {
    /// Truncation exponent alpha = 2/(4 + delta).
    pub alpha: f64,
    /// kappa = delta / (2(4 + delta)) = (1 - 2 alpha)/2.
    pub kappa: f64,
    /// Truncation constant D.
    pub d: f64,
    /// Delocalization-pipeline exponent, 0 < phi' < 1/4.
    pub phi_prime: f64,
}

impl TruncationPolicy {
    pub fn new(delta: f64, d: f64, phi_prime: f64) -> Result<Self> {
        if delta <= 0.0 {
            return Err(Error::Config(format!("delta must be positive, got {delta}")));
        }
        if d <= 0.0 {
            return Err(Error::Config(format!("D must be positive, got {d}")));
        }
        if !(0.0 < phi_prime && phi_prime < 0.25) {
            return Err(Error::Config(format!(
                "phi' must lie in (0, 1/4), got {phi_prime}"
            )));
        }
        let alpha = 2.0 / (4.0 + delta);
        Ok(Self {
            alpha,
            kappa: (1.0 - 2.0 * alpha) / 2.0,
            d,
            phi_prime,
        })
    }

    /// Entry threshold T = D n^(1/2 - phi').
    pub fn threshold(&self, n: usize) -> f64 {
        self.d * (n as f64).powf(0.5 - self.phi_prime)
    }
}

/// Law of X 1[|X| <= T] recentred and rescaled to unit variance. Laws whose
/// support is already below the threshold are returned unchanged.
pub fn truncate_standardize(
    dist: &EntryDistribution,
    n: usize,
    policy: &TruncationPolicy,
) -> Result<EntryDistribution> {
    let t = policy.threshold(n);
    if let Some(bound) = dist.support_bound() {
        if bound <= t {
            return Ok(dist.clone());
        }
    }
    let base = dist.law().clone();
    let center = base.hat_moment(1, t)?;
    let second = base.hat_moment(2, t)?;
    let variance = second - center * center;
    if variance < 1e-12 {
        return Err(Error::Numeric(format!(
            "degenerate post-truncation variance {variance:.3e} at threshold {t:.3e}"
        )));
    }
    let law = match base {
        // Discrete laws truncate exactly into another table.
        EntryLaw::Table { atoms, weights } => {
            let scale = variance.sqrt();
            EntryLaw::Table {
                atoms: atoms
                    .iter()
                    .map(|a| {
                        let hat = if a.abs() <= t { *a } else { 0.0 };
                        (hat - center) / scale
                    })
                    .collect(),
                weights,
            }
        }
        other => EntryLaw::Truncated {
            base: Box::new(other),
            threshold: t,
            center,
            scale: variance.sqrt(),
        },
    };
    EntryDistribution::new(law, dist.delta())
}

/// Finite discrete law on at most three atoms {-s, 0, t} matching the first
/// four moments (0, 1, a3, b4). Requires b4 >= a3^2 + 1.
///
/// With w := p t = q s, the moment system collapses to
/// t - s = a3, t^2 - t s + s^2 = b4, giving
/// s = (-a3 + sqrt(4 b4 - 3 a3^2))/2 in closed form.
pub fn four_moment_match(a3: f64, b4: f64) -> Result<EntryDistribution> {
    if !(a3.is_finite() && b4.is_finite()) || b4 < a3 * a3 + 1.0 {
        return Err(Error::Argument(format!(
            "four-moment matching needs B >= A^2 + 1, got A = {a3}, B = {b4}"
        )));
    }
    let disc = (4.0 * b4 - 3.0 * a3 * a3).sqrt();
    let s = 0.5 * (-a3 + disc);
    let t = 0.5 * (a3 + disc);
    let w = 1.0 / (t + s);
    let p = w / t;
    let q = w / s;
    let zero_mass = 1.0 - p - q;

    let (atoms, weights) = if zero_mass.abs() < 1e-14 {
        (vec![-s, t], vec![q, p])
    } else {
        (vec![-s, 0.0, t], vec![q, zero_mass, p])
    };
    let dist = EntryDistribution::new(
        EntryLaw::Table {
            atoms: atoms.clone(),
            weights: weights.clone(),
        },
        4.0,
    )?;
    // Residual check on the third and fourth moments.
    let m3 = dist.moment(3)?;
    let m4 = dist.moment(4)?;
    if (m3 - a3).abs() > 1e-10 || (m4 - b4).abs() > 1e-10 {
        return Err(Error::Numeric(format!(
            "moment-matching residuals too large: |m3 - A| = {:.3e}, |m4 - B| = {:.3e}",
            (m3 - a3).abs(),
            (m4 - b4).abs()
        )));
    }
    Ok(dist)
}

/// One n x n real symmetric realization W = X / sqrt(n).
#[derive(Clone, Debug)]
pub struct WignerSample {
    n: usize,
    matrix: DMatrix<f64>,
    seed: u64,
    dist_tag: String,
}

impl WignerSample {
    pub fn n(&self) -> usize {
        self.n
    }

    /// The scaled matrix W = X / sqrt(n).
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Entry of W (symmetric in its indices).
    pub fn w(&self, j: usize, k: usize) -> f64 {
        self.matrix[(j, k)]
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dist_tag(&self) -> &str {
        &self.dist_tag
    }

    /// Test-support constructor from an explicit symmetric W.
    pub fn from_matrix(matrix: DMatrix<f64>, seed: u64, dist_tag: &str) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n {
            return Err(Error::Contract("matrix must be square".into()));
        }
        if matrix != matrix.transpose() {
            return Err(Error::Contract("matrix must be exactly symmetric".into()));
        }
        Ok(Self {
            n,
            matrix,
            seed,
            dist_tag: dist_tag.to_string(),
        })
    }
}

/// Samples one Wigner matrix: upper-triangle entries (diagonal included)
/// i.i.d. from `dist`, mirrored below, scaled by 1/sqrt(n). Deterministic
/// in (n, dist, seed): entries are drawn in row-major triangle order from a
/// counter-based stream keyed by the seed.
pub fn sample_wigner(n: usize, dist: &EntryDistribution, seed: u64) -> Result<WignerSample> {
    if n == 0 {
        return Err(Error::Argument("dimension must be >= 1".into()));
    }
    let mut rng = replica_rng(seed);
    let scale = 1.0 / (n as f64).sqrt();
    let mut matrix = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        for k in j..n {
            let x = dist.sample(&mut rng) * scale;
            matrix[(j, k)] = x;
            matrix[(k, j)] = x;
        }
    }
    Ok(WignerSample {
        n,
        matrix,
        seed,
        dist_tag: dist.tag(),
    })
}
