//! Deterministic parallel Monte Carlo campaigns: replica generation,
//! per-replica metric evaluation, aggregation, and persistence.
//!
//! The determinism contract: the aggregated summary is byte-identical for
//! identical configs regardless of worker count or completion order. Each
//! replica draws from its own seed derived from (master seed, n, replica
//! index); aggregation happens after collection, in replica-index order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::mpsc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::ensemble::{sample_wigner, EntryDistribution};
use crate::error::{Error, Result};
use crate::lawcheck::{
    self, kolmogorov_distance, quantile, v_zero, GridSpec,
};
use crate::rng::derive_seed;
use crate::semicircle::{stieltjes_ref, ComplexPoint};
use crate::spectral::{eigendecompose, stieltjes, SpectralData};

/// Version tag written into every persisted artifact.
pub const SCHEMA_VERSION: u32 = 1;

/// Evaluation grid parameters; the concrete v values depend on n through
/// v0 = A0 log(n)/n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub u: Vec<f64>,
    pub a0: f64,
    /// Lower end of the v sweep, as a multiple of v0.
    pub v_lo_mult: f64,
    pub v_max: f64,
    pub v_count: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            u: vec![0.0],
            a0: 4.0,
            v_lo_mult: 4.0,
            v_max: 0.5,
            v_count: 8,
        }
    }
}

impl GridConfig {
    /// Concrete grid for dimension n.
    pub fn grid_for(&self, n: usize) -> Result<GridSpec> {
        let v_lo = self.v_lo_mult * v_zero(n, self.a0);
        GridSpec::log_spaced(self.u.clone(), n, self.a0, v_lo, self.v_max, self.v_count)
    }
}

/// Which per-replica metrics to compute.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub ks: bool,
    pub local_law: bool,
    pub rigidity: bool,
    pub deloc: bool,
    /// Keep raw eigenvalues for pooled statistics (mean-ESD distance).
    pub keep_eigenvalues: bool,
}

impl Default for MetricFlags {
    fn default() -> Self {
        Self {
            ks: true,
            local_law: false,
            rigidity: false,
            deloc: false,
            keep_eigenvalues: false,
        }
    }
}

/// Full description of one campaign; replayable from this value alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    /// Entry-law spec string, e.g. "rademacher" or "pareto:delta=1".
    pub dist: String,
    pub n_list: Vec<usize>,
    pub replicas: usize,
    pub seed: u64,
    pub grid: GridConfig,
    pub metrics: MetricFlags,
    /// Empty string disables persistence.
    pub out_dir: String,
    /// 0 means one worker per available core.
    pub workers: usize,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        Self {
            dist: "rademacher".into(),
            n_list: vec![128],
            replicas: 10,
            seed: 1,
            grid: GridConfig::default(),
            metrics: MetricFlags::default(),
            out_dir: String::new(),
            workers: 1,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        EntryDistribution::parse_spec(&self.dist)?;
        if self.n_list.is_empty() {
            return Err(Error::Config("n_list must be nonempty".into()));
        }
        if !self.n_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(format!(
                "n_list must be strictly ascending, got {:?}",
                self.n_list
            )));
        }
        if self.replicas < 1 {
            return Err(Error::Config("replicas must be >= 1".into()));
        }
        if self.metrics.local_law {
            for &n in &self.n_list {
                self.grid.grid_for(n)?;
            }
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self =
            toml::from_str(text).map_err(|e| Error::Config(format!("config parse: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    /// SHA-256 of the canonical serialized form, hex-encoded.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }

    fn worker_count(&self) -> usize {
        if self.workers > 0 {
            self.workers
        } else {
            std::thread::available_parallelism().map_or(1, |p| p.get())
        }
    }
}

/// Metrics of one completed replica.
#[derive(Clone, Debug)]
pub struct ReplicaRecord {
    pub n: usize,
    pub replica: u64,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub wall_seconds: f64,
}

impl ReplicaRecord {
    /// One self-describing key-value line.
    pub fn to_line(&self) -> String {
        let mut line = format!(
            "n={} replica={} seed={} wall_seconds={:.6}",
            self.n, self.replica, self.seed, self.wall_seconds
        );
        for (key, value) in &self.metrics {
            write!(line, " {key}={value:.16e}").unwrap();
        }
        line
    }
}

/// A replica whose metric evaluation failed numerically.
#[derive(Clone, Debug)]
pub struct FailureRecord {
    pub n: usize,
    pub replica: u64,
    pub seed: u64,
    pub message: String,
}

/// Raw eigenvalues kept for pooled statistics.
#[derive(Clone, Debug)]
pub struct ReplicaSpectrum {
    pub n: usize,
    pub replica: u64,
    pub eigenvalues: Vec<f64>,
}

/// One aggregated row: statistics of a single metric at a single n.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub n: usize,
    pub metric: String,
    pub count: usize,
    pub mean: f64,
    pub q50: f64,
    pub q90: f64,
    pub q99: f64,
    /// Empirical p-th moments, mean of x^p.
    pub moment_p1: f64,
    pub moment_p2: f64,
    pub moment_p4: f64,
}

/// Deterministic aggregate of a campaign.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
}

impl Summary {
    pub const HEADER: &'static str = "n,metric,count,mean,q50,q90,q99,moment_p1,moment_p2,moment_p4";

    /// Canonical table body: header plus one CSV row per (n, metric).
    pub fn render(&self) -> String {
        let mut out = String::from(Self::HEADER);
        out.push('\n');
        for row in &self.rows {
            writeln!(
                out,
                "{},{},{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                row.n,
                row.metric,
                row.count,
                row.mean,
                row.q50,
                row.q90,
                row.q99,
                row.moment_p1,
                row.moment_p2,
                row.moment_p4
            )
            .unwrap();
        }
        out
    }

    pub fn row(&self, n: usize, metric: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.n == n && r.metric == metric)
    }
}

/// Everything a campaign produces in memory.
#[derive(Clone, Debug)]
pub struct CampaignOutcome {
    pub records: Vec<ReplicaRecord>,
    pub failures: Vec<FailureRecord>,
    pub spectra: Vec<ReplicaSpectrum>,
    pub summary: Summary,
    pub config_hash: String,
}

/// Canonical metric key for one grid point, e.g.
/// `abs_lambda[u=0.0000,v=5.000000e-1]`.
pub fn metric_point_name(kind: &str, u: f64, v: f64) -> String {
    format!("{kind}[u={u:.4},v={v:.6e}]")
}

fn compute_replica(
    config: &CampaignConfig,
    dist: &EntryDistribution,
    n: usize,
    replica: u64,
) -> Result<(ReplicaRecord, Option<ReplicaSpectrum>)> {
    let start = Instant::now();
    let seed = derive_seed(config.seed, n, replica);
    let sample = sample_wigner(n, dist, seed)?;
    let spec = eigendecompose(&sample, config.metrics.deloc)?;
    let mut metrics = BTreeMap::new();

    if config.metrics.ks {
        metrics.insert("ks_distance".to_string(), kolmogorov_distance(&spec));
    }
    if config.metrics.rigidity {
        let report = lawcheck::rigidity_report(&spec)?;
        metrics.insert("rigidity_max".to_string(), report.max);
        let lo = (n / 10).max(1);
        let hi = 9 * n / 10;
        metrics.insert("rigidity_bulk_max".to_string(), report.max_over(lo, hi));
    }
    if config.metrics.deloc {
        metrics.insert(
            "deloc_stat".to_string(),
            lawcheck::delocalization_report(&spec)?,
        );
    }
    if config.metrics.local_law {
        let grid = config.grid.grid_for(n)?;
        for &u in grid.u_values() {
            for &v in grid.v_values() {
                let z = ComplexPoint::new(u, v)?;
                let lambda = stieltjes(&spec, z) - stieltjes_ref(z);
                metrics.insert(metric_point_name("abs_lambda", u, v), lambda.norm());
                metrics.insert(metric_point_name("im_lambda", u, v), lambda.im.abs());
                metrics.insert(
                    metric_point_name("nv_abs_lambda", u, v),
                    n as f64 * v * lambda.norm(),
                );
            }
        }
    }

    let spectrum = config.metrics.keep_eigenvalues.then(|| ReplicaSpectrum {
        n,
        replica,
        eigenvalues: spec.eigenvalues().to_vec(),
    });
    Ok((
        ReplicaRecord {
            n,
            replica,
            seed,
            metrics,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
        spectrum,
    ))
}

/// Per-(n, metric) statistics in deterministic order. Records are sorted
/// by (n, replica index) first; all records sharing an n must expose the
/// same metric keys.
pub fn aggregate(records: &[ReplicaRecord]) -> Result<Summary> {
    let mut sorted: Vec<&ReplicaRecord> = records.iter().collect();
    sorted.sort_by_key(|r| (r.n, r.replica));

    // Schema check per n.
    let mut by_n: BTreeMap<usize, Vec<&ReplicaRecord>> = BTreeMap::new();
    for rec in &sorted {
        by_n.entry(rec.n).or_default().push(rec);
    }
    let mut rows = Vec::new();
    for (n, group) in by_n {
        let keys: Vec<&String> = group[0].metrics.keys().collect();
        let mut offenders = Vec::new();
        for rec in &group {
            if rec.metrics.keys().collect::<Vec<_>>() != keys {
                offenders.push(rec.replica);
            }
        }
        if !offenders.is_empty() {
            return Err(Error::Contract(format!(
                "metric schema mismatch at n = {n}, replicas {offenders:?}"
            )));
        }
        for key in keys {
            let mut values: Vec<f64> = group.iter().map(|r| r.metrics[key]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let count = values.len();
            let mean = values.iter().sum::<f64>() / count as f64;
            let moment = |p: i32| values.iter().map(|x| x.powi(p)).sum::<f64>() / count as f64;
            rows.push(SummaryRow {
                n,
                metric: key.clone(),
                count,
                mean,
                q50: quantile(&values, 0.50),
                q90: quantile(&values, 0.90),
                q99: quantile(&values, 0.99),
                moment_p1: moment(1),
                moment_p2: moment(2),
                moment_p4: moment(4),
            });
        }
    }
    Ok(Summary { rows })
}

enum WorkerMessage {
    Done(usize, Box<(ReplicaRecord, Option<ReplicaSpectrum>)>),
    Failed(usize, FailureRecord),
}

/// Runs every (n, replica) work item exactly once on a pool of workers,
/// streams record lines to persistence as they complete, and aggregates
/// in replica-index order. Numeric failures are recorded and skipped;
/// persistence failures abort with a partial manifest.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignOutcome> {
    config.validate()?;
    let dist = EntryDistribution::parse_spec(&config.dist)?;
    let config_hash = config.hash();
    let started_at = unix_now();

    let sink = if config.out_dir.is_empty() {
        None
    } else {
        Some(Persistence::create(Path::new(&config.out_dir), &config_hash)?)
    };

    let tasks: Vec<(usize, u64)> = config
        .n_list
        .iter()
        .flat_map(|&n| (0..config.replicas as u64).map(move |r| (n, r)))
        .collect();
    let total = tasks.len();
    let next = AtomicUsize::new(0);
    let (tx, rx) = mpsc::channel::<WorkerMessage>();

    let mut slots: Vec<Option<(ReplicaRecord, Option<ReplicaSpectrum>)>> =
        (0..total).map(|_| None).collect();
    let mut failures: Vec<FailureRecord> = Vec::new();
    let mut sink = sink;
    let mut persist_error: Option<Error> = None;

    std::thread::scope(|scope| {
        for _ in 0..config.worker_count().min(total.max(1)) {
            let tx = tx.clone();
            let tasks = &tasks;
            let next = &next;
            let config = &config;
            let dist = &dist;
            scope.spawn(move || loop {
                let idx = next.fetch_add(1, Ordering::Relaxed);
                if idx >= tasks.len() {
                    break;
                }
                let (n, replica) = tasks[idx];
                let message = match compute_replica(config, dist, n, replica) {
                    Ok(done) => WorkerMessage::Done(idx, Box::new(done)),
                    Err(e) => WorkerMessage::Failed(
                        idx,
                        FailureRecord {
                            n,
                            replica,
                            seed: derive_seed(config.seed, n, replica),
                            message: e.to_string(),
                        },
                    ),
                };
                if tx.send(message).is_err() {
                    break;
                }
            });
        }
        drop(tx);

        for message in rx {
            match message {
                WorkerMessage::Done(idx, done) => {
                    if persist_error.is_none() {
                        if let Some(sink) = sink.as_mut() {
                            if let Err(e) = sink.append_record(&done.0) {
                                persist_error = Some(e);
                            }
                        }
                    }
                    slots[idx] = Some(*done);
                }
                WorkerMessage::Failed(idx, failure) => {
                    let _ = idx;
                    failures.push(failure);
                }
            }
        }
    });

    failures.sort_by_key(|f| (f.n, f.replica));

    if let Some(e) = persist_error {
        if let Some(sink) = sink.as_mut() {
            let _ = sink.write_manifest(config, started_at, failures.len(), total, false);
        }
        return Err(e);
    }

    // Deterministic order: slots follow the task list, which is sorted by
    // (n, replica index).
    let mut records = Vec::with_capacity(total - failures.len());
    let mut spectra = Vec::new();
    for slot in slots.into_iter().flatten() {
        records.push(slot.0);
        if let Some(spectrum) = slot.1 {
            spectra.push(spectrum);
        }
    }

    let summary = aggregate(&records)?;
    if let Some(sink) = sink.as_mut() {
        sink.write_summary(&summary, &config_hash)?;
        sink.write_manifest(config, started_at, failures.len(), total, true)?;
    }

    Ok(CampaignOutcome {
        records,
        failures,
        spectra,
        summary,
        config_hash,
    })
}

fn unix_now() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs())
}

struct Persistence {
    dir: PathBuf,
    records: fs::File,
}

impl Persistence {
    fn create(dir: &Path, config_hash: &str) -> Result<Self> {
        fs::create_dir_all(dir)?;
        let mut records = fs::File::create(dir.join("records.txt"))?;
        writeln!(records, "# schema={SCHEMA_VERSION} config={config_hash}")?;
        Ok(Self {
            dir: dir.to_path_buf(),
            records,
        })
    }

    fn append_record(&mut self, record: &ReplicaRecord) -> Result<()> {
        writeln!(self.records, "{}", record.to_line())?;
        Ok(())
    }

    fn write_summary(&self, summary: &Summary, config_hash: &str) -> Result<()> {
        let mut text = format!("# schema={SCHEMA_VERSION}\n# config={config_hash}\n");
        text.push_str(&summary.render());
        fs::write(self.dir.join("summary.csv"), text)?;
        Ok(())
    }

    fn write_manifest(
        &self,
        config: &CampaignConfig,
        started_at: u64,
        failures: usize,
        total: usize,
        complete: bool,
    ) -> Result<()> {
        let status = if complete { "complete" } else { "partial" };
        let text = format!(
            "schema={SCHEMA_VERSION}\nconfig={}\nstarted_at={started_at}\nfinished_at={}\n\
             tasks={total}\nfailures={failures}\nstatus={status}\n",
            config.hash(),
            unix_now()
        );
        fs::write(self.dir.join("manifest.txt"), text)?;
        Ok(())
    }
}

/// Pooled spectra grouped by n, in replica order; input for mean-ESD
/// statistics.
pub fn spectra_by_n(spectra: &[ReplicaSpectrum]) -> BTreeMap<usize, Vec<SpectralData>> {
    let mut sorted: Vec<&ReplicaSpectrum> = spectra.iter().collect();
    sorted.sort_by_key(|s| (s.n, s.replica));
    let mut map: BTreeMap<usize, Vec<SpectralData>> = BTreeMap::new();
    for s in sorted {
        map.entry(s.n)
            .or_default()
            .push(SpectralData::from_eigenvalues(s.eigenvalues.clone()));
    }
    map
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> CampaignConfig {
        CampaignConfig {
            n_list: vec![32, 48],
            replicas: 4,
            seed: 99,
            // At these small n the default A0 = 4 puts 4 v0 above v_max.
            grid: GridConfig {
                a0: 1.0,
                ..GridConfig::default()
            },
            metrics: MetricFlags {
                ks: true,
                local_law: true,
                rigidity: true,
                deloc: true,
                keep_eigenvalues: true,
            },
            ..CampaignConfig::default()
        }
    }

    #[test]
    fn config_roundtrip_and_validation() {
        let config = small_config();
        let text = config.to_toml();
        let parsed = CampaignConfig::from_toml(&text).unwrap();
        assert_eq!(parsed, config);
        assert_eq!(parsed.hash(), config.hash());

        let mut bad = config.clone();
        bad.n_list = vec![64, 32];
        assert!(bad.validate().is_err());
        bad.n_list = vec![];
        assert!(bad.validate().is_err());
        let mut bad = config.clone();
        bad.replicas = 0;
        assert!(bad.validate().is_err());
        let mut bad = config;
        bad.dist = "cauchy".into();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn aggregate_trivial_cases() {
        let make = |replica: u64, value: f64| ReplicaRecord {
            n: 16,
            replica,
            seed: replica,
            metrics: BTreeMap::from([("m".to_string(), value)]),
            wall_seconds: 0.0,
        };
        // Constant metric: all quantiles equal it.
        let constant = vec![make(0, 2.5), make(1, 2.5), make(2, 2.5)];
        let summary = aggregate(&constant).unwrap();
        let row = summary.row(16, "m").unwrap();
        assert_eq!(row.count, 3);
        for v in [row.mean, row.q50, row.q90, row.q99, row.moment_p1] {
            assert_eq!(v, 2.5);
        }
        assert_eq!(row.moment_p2, 6.25);

        // Two records {1, 3}: median 2 under the midpoint convention.
        let pair = vec![make(0, 1.0), make(1, 3.0)];
        let row = aggregate(&pair).unwrap();
        assert_eq!(row.row(16, "m").unwrap().q50, 2.0);

        // Schema mismatch is an error naming the offender.
        let mut odd = make(2, 1.0);
        odd.metrics.insert("extra".to_string(), 0.0);
        let err = aggregate(&[make(0, 1.0), make(1, 2.0), odd]).unwrap_err();
        assert!(err.to_string().contains("2"), "{err}");
    }

    #[test]
    fn single_replica_report_equals_record() {
        let config = CampaignConfig {
            n_list: vec![32],
            replicas: 1,
            seed: 5,
            ..CampaignConfig::default()
        };
        let outcome = run_campaign(&config).unwrap();
        assert_eq!(outcome.records.len(), 1);
        let row = outcome.summary.row(32, "ks_distance").unwrap();
        let value = outcome.records[0].metrics["ks_distance"];
        assert_eq!(row.mean, value);
        assert_eq!(row.q50, value);
        assert_eq!(row.q99, value);
    }

    #[test]
    fn campaign_complete_and_deterministic_across_workers() {
        let mut config = small_config();
        config.workers = 1;
        let serial = run_campaign(&config).unwrap();
        assert_eq!(serial.records.len(), 2 * 4);
        assert!(serial.failures.is_empty());
        assert_eq!(serial.spectra.len(), 8);

        config.workers = 8;
        let parallel = run_campaign(&config).unwrap();
        assert_eq!(serial.summary.render(), parallel.summary.render());
        // Record streams agree after ordering, including derived seeds.
        let lines = |o: &CampaignOutcome| {
            o.records
                .iter()
                .map(|r| {
                    let mut line = r.to_line();
                    let cut = line.find(" wall_seconds=").unwrap();
                    let rest = line.split_off(cut);
                    let metrics_start = rest[1..].find(' ').map(|i| i + 1).unwrap();
                    line + &rest[metrics_start..]
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(lines(&serial), lines(&parallel));
    }

    #[test]
    fn campaign_persists_artifacts() {
        let dir = std::env::temp_dir().join(format!("wignerlab-test-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        let config = CampaignConfig {
            n_list: vec![24],
            replicas: 3,
            seed: 8,
            out_dir: dir.to_string_lossy().into_owned(),
            ..CampaignConfig::default()
        };
        let outcome = run_campaign(&config).unwrap();

        let records = fs::read_to_string(dir.join("records.txt")).unwrap();
        assert!(records.starts_with(&format!(
            "# schema={SCHEMA_VERSION} config={}",
            outcome.config_hash
        )));
        assert_eq!(records.lines().count(), 1 + 3);

        let summary = fs::read_to_string(dir.join("summary.csv")).unwrap();
        assert!(summary.contains(Summary::HEADER));
        assert!(summary.contains(&outcome.config_hash));

        let manifest = fs::read_to_string(dir.join("manifest.txt")).unwrap();
        assert!(manifest.contains("status=complete"));
        assert!(manifest.contains("failures=0"));
        assert!(manifest.contains("tasks=3"));
        let _ = fs::remove_dir_all(&dir);
    }

    #[test]
    fn spectra_grouping_orders_replicas() {
        let spectra = vec![
            ReplicaSpectrum {
                n: 8,
                replica: 1,
                eigenvalues: vec![1.0],
            },
            ReplicaSpectrum {
                n: 8,
                replica: 0,
                eigenvalues: vec![0.0],
            },
        ];
        let grouped = spectra_by_n(&spectra);
        let group = &grouped[&8];
        assert_eq!(group[0].eigenvalues(), &[0.0]);
        assert_eq!(group[1].eigenvalues(), &[1.0]);
    }

    #[test]
    fn record_line_format() {
        let record = ReplicaRecord {
            n: 10,
            replica: 2,
            seed: 123,
            metrics: BTreeMap::from([("ks_distance".to_string(), 0.5)]),
            wall_seconds: 0.25,
        };
        assert_eq!(
            record.to_line(),
            "n=10 replica=2 seed=123 wall_seconds=0.250000 ks_distance=5.0000000000000000e-1"
        );
    }
}
