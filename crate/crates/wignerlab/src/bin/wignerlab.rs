//! Command-line surface: one subcommand per verification campaign.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numeric failure
//! (identity residuals above tolerance or too many failed replicas).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_complex::Complex64;

use wignerlab::ensemble::{sample_wigner, EntryDistribution};
use wignerlab::error::Error;
use wignerlab::harness::{
    metric_point_name, run_campaign, CampaignConfig, CampaignOutcome, MetricFlags, SCHEMA_VERSION,
};
use wignerlab::lawcheck::{
    self, kolmogorov_distance, mean_esd_distance, scaling_fit, v_zero, FitResult,
};
use wignerlab::plot::{emit_plot, PlotKind, Series};
use wignerlab::rng::derive_seed;
use wignerlab::semicircle::{self, stieltjes_ref, ComplexPoint};
use wignerlab::spectral::{
    eigendecompose, epsilon_from_resolvent, minor_resolvent_diag,
    perturbation_expansion_residual, resolvent, stieltjes, SpectralData,
};
use wignerlab::Result;

/// Default output directory when neither --out nor WIGNERLAB_OUT is set.
const DEFAULT_OUT: &str = "out";
const OUT_ENV: &str = "WIGNERLAB_OUT";
/// A campaign fails as a whole when more than this fraction of replicas
/// fail numerically.
const FAILURE_THRESHOLD: f64 = 0.1;

#[derive(Parser)]
#[command(
    name = "wignerlab",
    version,
    about = "Spectral statistics laboratory for Wigner random matrices"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Campaign config file (TOML); flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Matrix dimensions, comma separated.
    #[arg(long, global = true, value_delimiter = ',')]
    n: Option<Vec<usize>>,

    /// Replicas per dimension.
    #[arg(long, global = true)]
    replicas: Option<usize>,

    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Entry law, e.g. rademacher | gaussian | pareto:delta=1 |
    /// table:atoms=..;weights=.. | match:a3=..;b4=..
    #[arg(long, global = true)]
    dist: Option<String>,

    /// Grid constant A0 in v0 = A0 log(n)/n.
    #[arg(long = "v-min-const", global = true)]
    v_min_const: Option<f64>,

    /// Grid u values, comma separated.
    #[arg(long = "grid-u", global = true, value_delimiter = ',')]
    grid_u: Option<Vec<f64>>,

    /// Number of log-spaced v values.
    #[arg(long = "grid-v-count", global = true)]
    grid_v_count: Option<usize>,

    /// Output directory (default: $WIGNERLAB_OUT or ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads (0 = one per core).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Also emit SVG plots.
    #[arg(long, global = true)]
    plots: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Draw one matrix per n and tabulate its spectrum.
    Sample,
    /// Check the exact resolvent identities and report max residuals.
    Identities,
    /// Local-law fluctuation scan over the (u, v) grid.
    Locallaw,
    /// Kolmogorov distance campaign with rate fit.
    Ks,
    /// Replica-averaged ESD distance campaign with rate fit.
    Meanks,
    /// Eigenvalue rigidity campaign.
    Rigidity,
    /// Eigenvector delocalization campaign.
    Deloc,
    /// Windowed eigenvalue counts against the limiting density.
    Window {
        /// Window width parameter (default sqrt(n)).
        #[arg(long)]
        xi: Option<f64>,
    },
    /// Evaluate the four smoothing-inequality terms on campaign data.
    Smoothing,
    /// Fit a power law to an x,y table.
    Scaling {
        /// CSV file with x,y pairs ('#' lines and a header are skipped).
        #[arg(long)]
        input: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Argument(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: &Cli) -> Result<()> {
    let config = build_config(cli)?;
    let out_dir = out_dir(cli);
    fs::create_dir_all(&out_dir)?;
    match &cli.command {
        Command::Sample => cmd_sample(cli, &config, &out_dir),
        Command::Identities => cmd_identities(&config, &out_dir),
        Command::Locallaw => cmd_locallaw(cli, &config, &out_dir),
        Command::Ks => cmd_ks(cli, &config, &out_dir),
        Command::Meanks => cmd_meanks(cli, &config, &out_dir),
        Command::Rigidity => cmd_rigidity(&config, &out_dir),
        Command::Deloc => cmd_deloc(&config, &out_dir),
        Command::Window { xi } => cmd_window(&config, &out_dir, *xi),
        Command::Smoothing => cmd_smoothing(&config, &out_dir),
        Command::Scaling { input } => cmd_scaling(cli, &config, input, &out_dir),
    }
}

fn out_dir(cli: &Cli) -> PathBuf {
    cli.out.clone().unwrap_or_else(|| {
        std::env::var_os(OUT_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
    })
}

fn build_config(cli: &Cli) -> Result<CampaignConfig> {
    let mut config = match &cli.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                Error::Config(format!("config file {}: {e}", path.display()))
            })?;
            CampaignConfig::from_toml(&text)?
        }
        None => CampaignConfig::default(),
    };
    if let Some(n) = &cli.n {
        config.n_list = n.clone();
    }
    if let Some(replicas) = cli.replicas {
        config.replicas = replicas;
    }
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(dist) = &cli.dist {
        config.dist = dist.clone();
    }
    if let Some(a0) = cli.v_min_const {
        config.grid.a0 = a0;
    }
    if let Some(u) = &cli.grid_u {
        config.grid.u = u.clone();
    }
    if let Some(count) = cli.grid_v_count {
        config.grid.v_count = count;
    }
    if let Some(workers) = cli.workers {
        config.workers = workers;
    }
    config.validate()?;
    Ok(config)
}

/// CSV table with '#'-prefixed metadata lines; numbers are written by the
/// callers with 17 significant digits.
fn write_table(path: &Path, config_hash: &str, header: &str, rows: &[String]) -> Result<()> {
    let mut text = format!("# schema={SCHEMA_VERSION}\n# config={config_hash}\n{header}\n");
    for row in rows {
        text.push_str(row);
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn campaign(config: &CampaignConfig, metrics: MetricFlags, out_dir: &Path) -> Result<CampaignOutcome> {
    let mut config = config.clone();
    config.metrics = metrics;
    config.out_dir = out_dir.to_string_lossy().into_owned();
    let outcome = run_campaign(&config)?;
    let total = config.n_list.len() * config.replicas;
    for failure in &outcome.failures {
        eprintln!(
            "replica failed: n={} replica={} seed={}: {}",
            failure.n, failure.replica, failure.seed, failure.message
        );
    }
    if outcome.failures.len() as f64 > FAILURE_THRESHOLD * total as f64 {
        return Err(Error::Numeric(format!(
            "{} of {} replicas failed numerically",
            outcome.failures.len(),
            total
        )));
    }
    Ok(outcome)
}

fn print_fit(label: &str, fit: &FitResult) {
    println!(
        "{label}: slope {:+.4} +- {:.4} (intercept {:+.4}, max residual {:.2e})",
        fit.slope, fit.slope_std_error, fit.intercept, fit.max_residual
    );
}

fn fit_metadata(fit: &FitResult) -> String {
    format!(
        "# fit slope={:.16e} intercept={:.16e} max_residual={:.16e} slope_std_error={:.16e}",
        fit.slope, fit.intercept, fit.max_residual, fit.slope_std_error
    )
}

fn loglog_rate_plot(
    points: &[(f64, f64)],
    fit: Option<&FitResult>,
    label: &str,
    path: &Path,
) -> Result<()> {
    let mut series = vec![Series::new(label, points.to_vec())];
    if let Some(fit) = fit {
        let xs = [points[0].0, points[points.len() - 1].0];
        let line: Vec<(f64, f64)> = xs
            .iter()
            .map(|&x| (x, (fit.intercept + fit.slope * x.ln()).exp()))
            .collect();
        series.push(Series::new(
            &format!("fit slope {:+.3}", fit.slope),
            line,
        ));
    }
    emit_plot(&series, PlotKind::LogLog, path)
}

fn cmd_sample(cli: &Cli, config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let dist = EntryDistribution::parse_spec(&config.dist)?;
    let hash = config.hash();
    for &n in &config.n_list {
        let seed = derive_seed(config.seed, n, 0);
        let sample = sample_wigner(n, &dist, seed)?;
        let spec = eigendecompose(&sample, false)?;
        let rows: Vec<String> = spec
            .eigenvalues()
            .iter()
            .enumerate()
            .map(|(j, l)| format!("{},{:.16e}", j + 1, l))
            .collect();
        let path = out_dir.join(format!("sample_n{n}.csv"));
        write_table(&path, &hash, "index,eigenvalue", &rows)?;
        println!(
            "n={n} seed={seed} lambda_min={:.6} lambda_max={:.6} ks={:.6} -> {}",
            spec.eigenvalues()[0],
            spec.eigenvalues()[n - 1],
            kolmogorov_distance(&spec),
            path.display()
        );
        if cli.plots {
            let esd: Vec<(f64, f64)> = spec
                .eigenvalues()
                .iter()
                .enumerate()
                .map(|(j, &l)| (l, (j + 1) as f64 / n as f64))
                .collect();
            let reference: Vec<(f64, f64)> = (0..=200)
                .map(|i| {
                    let x = -2.2 + 4.4 * i as f64 / 200.0;
                    (x, semicircle::cdf(x).unwrap())
                })
                .collect();
            let series = [
                Series::new("empirical CDF", esd),
                Series::new("semicircle CDF", reference),
            ];
            emit_plot(&series, PlotKind::Overlay, &out_dir.join(format!("esd_n{n}.svg")))?;
        }
    }
    Ok(())
}

fn cmd_identities(config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let dist = EntryDistribution::parse_spec(&config.dist)?;
    let n = config.n_list[0];
    let sample = sample_wigner(n, &dist, derive_seed(config.seed, n, 0))?;
    let spec = eigendecompose(&sample, true)?;

    let z_points = [
        ComplexPoint::new(0.0, 1.0)?,
        ComplexPoint::new(0.7, 0.5)?,
        ComplexPoint::new(-1.4, 0.2)?,
        ComplexPoint::new(2.5, 0.1)?,
    ];
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for z in z_points {
        let r = resolvent(&spec, z)?;
        let rec = wignerlab::spectral::t_statistic(&sample, z)?;
        let self_res = rec.residual / (1.0 + z.to_complex().norm_sqr());

        let denom = z.to_complex() + rec.m_n + stieltjes_ref(z);
        let ratio_res = (rec.lambda_n * denom - rec.t_n).norm();

        let mut ward_res: f64 = 0.0;
        for l in 0..n {
            let sum: f64 = (0..n).map(|k| r[(k, l)].norm_sqr()).sum();
            ward_res = ward_res.max((sum - r[(l, l)].im / z.v()).abs());
        }

        let m = stieltjes(&spec, z);
        let mut eps_res: f64 = 0.0;
        let mut interlace_res: f64 = 0.0;
        let trace_r: Complex64 = (0..n).map(|k| r[(k, k)]).sum();
        for j in 0..n {
            let parts = epsilon_from_resolvent(&sample, &r, z, j)?;
            let rhs = (-Complex64::new(1.0, 0.0) + parts.total() * r[(j, j)])
                / (z.to_complex() + m);
            eps_res = eps_res.max((r[(j, j)] - rhs).norm());
            let (_, minor_trace) = minor_resolvent_diag(&spec, z, j)?;
            let gap = (trace_r - minor_trace).norm() - 1.0 / z.v();
            interlace_res = interlace_res.max(gap);
        }

        let pert_res = perturbation_expansion_residual(&sample, z, 0, n / 2, 2)?;

        worst = worst
            .max(self_res)
            .max(ratio_res)
            .max(ward_res / 10.0) // ward tolerance is 1e-9, others 1e-8
            .max(eps_res)
            .max(pert_res)
            .max(interlace_res * 1e2);
        rows.push(format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            z.u(),
            z.v(),
            self_res,
            ratio_res,
            ward_res,
            eps_res,
            pert_res,
            interlace_res
        ));
        println!(
            "z=({:+.2},{:.2}) self={self_res:.2e} ratio={ratio_res:.2e} ward={ward_res:.2e} \
             eps={eps_res:.2e} pert={pert_res:.2e} interlace_excess={interlace_res:.2e}",
            z.u(),
            z.v()
        );
    }
    write_table(
        &out_dir.join("identities.csv"),
        &config.hash(),
        "z_u,z_v,self_consistency,ratio,ward,epsilon_reconstruction,perturbation,interlacing_excess",
        &rows,
    )?;
    if worst > 1e-8 {
        return Err(Error::Numeric(format!(
            "identity residual {worst:.3e} exceeds 1e-8"
        )));
    }
    println!("all identities within tolerance");
    Ok(())
}

fn cmd_ks(cli: &Cli, config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let outcome = campaign(
        config,
        MetricFlags {
            ks: true,
            local_law: false,
            rigidity: false,
            deloc: false,
            keep_eigenvalues: false,
        },
        out_dir,
    )?;
    let mut rows = Vec::new();
    let mut medians = Vec::new();
    for &n in &config.n_list {
        let row = outcome
            .summary
            .row(n, "ks_distance")
            .ok_or_else(|| Error::Numeric(format!("no ks rows for n = {n}")))?;
        rows.push(format!(
            "{n},{:.16e},{:.16e},{:.16e},{:.16e}",
            row.q50, row.mean, row.q90, row.q99
        ));
        medians.push((n as f64, row.q50));
        println!("n={n} median ks={:.6e}", row.q50);
    }
    let fit = (medians.len() >= 3)
        .then(|| scaling_fit(&medians, true))
        .transpose()?;
    if let Some(fit) = &fit {
        print_fit("ks rate", fit);
        rows.push(fit_metadata(fit));
    }
    write_table(
        &out_dir.join("ks.csv"),
        &outcome.config_hash,
        "n,median_ks,mean_ks,q90_ks,q99_ks",
        &rows,
    )?;
    if cli.plots && !medians.is_empty() {
        loglog_rate_plot(&medians, fit.as_ref(), "median ks", &out_dir.join("ks.svg"))?;
    }
    Ok(())
}

fn cmd_meanks(cli: &Cli, config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let outcome = campaign(
        config,
        MetricFlags {
            ks: true,
            local_law: false,
            rigidity: false,
            deloc: false,
            keep_eigenvalues: true,
        },
        out_dir,
    )?;
    let grouped = wignerlab::harness::spectra_by_n(&outcome.spectra);
    let mut rows = Vec::new();
    let mut points = Vec::new();
    for (&n, spectra) in &grouped {
        let dist = mean_esd_distance(spectra)?;
        rows.push(format!("{n},{},{:.16e}", spectra.len(), dist));
        points.push((n as f64, dist));
        println!("n={n} mean-esd distance={dist:.6e}");
    }
    let fit = (points.len() >= 3)
        .then(|| scaling_fit(&points, true))
        .transpose()?;
    if let Some(fit) = &fit {
        print_fit("mean-esd rate", fit);
        rows.push(fit_metadata(fit));
    }
    write_table(
        &out_dir.join("meanks.csv"),
        &outcome.config_hash,
        "n,replicas,mean_esd_distance",
        &rows,
    )?;
    if cli.plots && !points.is_empty() {
        loglog_rate_plot(&points, fit.as_ref(), "mean-esd", &out_dir.join("meanks.svg"))?;
    }
    Ok(())
}

fn cmd_locallaw(cli: &Cli, config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let outcome = campaign(
        config,
        MetricFlags {
            ks: false,
            local_law: true,
            rigidity: false,
            deloc: false,
            keep_eigenvalues: false,
        },
        out_dir,
    )?;
    let mut rows = Vec::new();
    let mut plot_series = Vec::new();
    for &n in &config.n_list {
        let grid = config.grid.grid_for(n)?;
        let mut medians = Vec::new();
        for &u in grid.u_values() {
            for &v in grid.v_values() {
                let abs = outcome
                    .summary
                    .row(n, &metric_point_name("abs_lambda", u, v))
                    .ok_or_else(|| Error::Numeric("missing grid row".into()))?;
                let im = outcome
                    .summary
                    .row(n, &metric_point_name("im_lambda", u, v))
                    .ok_or_else(|| Error::Numeric("missing grid row".into()))?;
                let nv = outcome
                    .summary
                    .row(n, &metric_point_name("nv_abs_lambda", u, v))
                    .ok_or_else(|| Error::Numeric("missing grid row".into()))?;
                rows.push(format!(
                    "{n},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    u, v, abs.q50, abs.q90, abs.q99, im.q50, nv.q99
                ));
                if u == grid.u_values()[0] {
                    medians.push((v, abs.q50));
                }
            }
        }
        if medians.len() >= 3 {
            let fit = scaling_fit(&medians, true)?;
            print_fit(&format!("n={n} |Lambda| vs v"), &fit);
            rows.push(format!("# n={n} {}", &fit_metadata(&fit)[2..]));
        }
        plot_series.push(Series::new(&format!("n={n}"), medians));
    }
    write_table(
        &out_dir.join("locallaw.csv"),
        &outcome.config_hash,
        "n,u,v,q50_abs_lambda,q90_abs_lambda,q99_abs_lambda,q50_im_lambda,q99_nv_abs_lambda",
        &rows,
    )?;
    if cli.plots {
        emit_plot(&plot_series, PlotKind::LogLog, &out_dir.join("locallaw.svg"))?;
    }
    Ok(())
}

fn cmd_rigidity(config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let outcome = campaign(
        config,
        MetricFlags {
            ks: false,
            local_law: false,
            rigidity: true,
            deloc: false,
            keep_eigenvalues: false,
        },
        out_dir,
    )?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let bulk = outcome
            .summary
            .row(n, "rigidity_bulk_max")
            .ok_or_else(|| Error::Numeric(format!("no rigidity rows for n = {n}")))?;
        let full = outcome
            .summary
            .row(n, "rigidity_max")
            .ok_or_else(|| Error::Numeric(format!("no rigidity rows for n = {n}")))?;
        rows.push(format!(
            "{n},{:.16e},{:.16e},{:.16e},{:.16e}",
            bulk.q50, bulk.q90, bulk.q99, full.q50
        ));
        println!(
            "n={n} bulk max r_j: median={:.4} q99={:.4} (log^2 n = {:.4})",
            bulk.q50,
            bulk.q99,
            (n as f64).ln().powi(2)
        );
    }
    write_table(
        &out_dir.join("rigidity.csv"),
        &outcome.config_hash,
        "n,q50_bulk_max,q90_bulk_max,q99_bulk_max,q50_full_max",
        &rows,
    )?;
    Ok(())
}

fn cmd_deloc(config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let outcome = campaign(
        config,
        MetricFlags {
            ks: false,
            local_law: false,
            rigidity: false,
            deloc: true,
            keep_eigenvalues: false,
        },
        out_dir,
    )?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let row = outcome
            .summary
            .row(n, "deloc_stat")
            .ok_or_else(|| Error::Numeric(format!("no deloc rows for n = {n}")))?;
        rows.push(format!(
            "{n},{:.16e},{:.16e},{:.16e}",
            row.q50, row.q90, row.q99
        ));
        println!(
            "n={n} deloc statistic n*max|u|^2/log n: median={:.4} q99={:.4}",
            row.q50, row.q99
        );
    }
    write_table(
        &out_dir.join("deloc.csv"),
        &outcome.config_hash,
        "n,q50_deloc,q90_deloc,q99_deloc",
        &rows,
    )?;
    Ok(())
}

fn cmd_window(config: &CampaignConfig, out_dir: &Path, xi: Option<f64>) -> Result<()> {
    let dist = EntryDistribution::parse_spec(&config.dist)?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let xi = xi.unwrap_or_else(|| (n as f64).sqrt());
        for replica in 0..config.replicas as u64 {
            let sample = sample_wigner(n, &dist, derive_seed(config.seed, n, replica))?;
            let spec = eigendecompose(&sample, false)?;
            for &x in &config.grid.u {
                let density = lawcheck::window_density(&spec, x, xi)?;
                rows.push(format!(
                    "{n},{replica},{:.16e},{:.16e},{:.16e},{:.16e}",
                    x,
                    xi,
                    density,
                    semicircle::density(x)?
                ));
            }
        }
        println!("n={n} xi={xi:.3} done ({} replicas)", config.replicas);
    }
    write_table(
        &out_dir.join("window.csv"),
        &config.hash(),
        "n,replica,x,xi,window_density,semicircle_density",
        &rows,
    )?;
    Ok(())
}

fn cmd_smoothing(config: &CampaignConfig, out_dir: &Path) -> Result<()> {
    let dist = EntryDistribution::parse_spec(&config.dist)?;
    let mut rows = Vec::new();
    let mut term4_points = Vec::new();
    for &n in &config.n_list {
        let spectra: Vec<SpectralData> = (0..config.replicas as u64)
            .map(|r| {
                let sample = sample_wigner(n, &dist, derive_seed(config.seed, n, r))?;
                eigendecompose(&sample, false)
            })
            .collect::<Result<_>>()?;
        let f = |z: ComplexPoint| -> Complex64 {
            let sum: Complex64 = spectra.iter().map(|s| stieltjes(s, z)).sum();
            sum / spectra.len() as f64
        };
        let v0 = v_zero(n, config.grid.a0);
        let eps = (2.0 * (2.0_f64.sqrt() + 1.0) * v0).powf(2.0 / 3.0) * 1.001;
        let bound = lawcheck::smoothing_bound(&f, v0, eps, 1.0)?;
        rows.push(format!(
            "{n},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            v0,
            eps,
            bound.term1,
            bound.term2,
            bound.term3,
            bound.term4,
            bound.total()
        ));
        term4_points.push((n as f64, bound.term4));
        println!(
            "n={n} v0={v0:.4e} eps={eps:.4e} terms=({:.3e}, {:.3e}, {:.3e}, {:.3e}) total={:.3e}",
            bound.term1,
            bound.term2,
            bound.term3,
            bound.term4,
            bound.total()
        );
    }
    if term4_points.len() >= 3 {
        let fit = scaling_fit(&term4_points, true)?;
        print_fit("term4 rate", &fit);
        rows.push(fit_metadata(&fit));
    }
    write_table(
        &out_dir.join("smoothing.csv"),
        &config.hash(),
        "n,v0,epsilon,term1,term2,term3,term4,total",
        &rows,
    )?;
    Ok(())
}

fn cmd_scaling(cli: &Cli, config: &CampaignConfig, input: &Path, out_dir: &Path) -> Result<()> {
    let text = fs::read_to_string(input)
        .map_err(|e| Error::Argument(format!("input {}: {e}", input.display())))?;
    let mut points = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',');
        let (Some(x), Some(y)) = (fields.next(), fields.next()) else {
            continue;
        };
        if let (Ok(x), Ok(y)) = (x.trim().parse::<f64>(), y.trim().parse::<f64>()) {
            points.push((x, y));
        }
    }
    let fit = scaling_fit(&points, true)?;
    print_fit(&format!("{}", input.display()), &fit);
    write_table(
        &out_dir.join("scaling.csv"),
        &config.hash(),
        "slope,intercept,max_residual,slope_std_error",
        &[format!(
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            fit.slope, fit.intercept, fit.max_residual, fit.slope_std_error
        )],
    )?;
    if cli.plots {
        loglog_rate_plot(&points, Some(&fit), "data", &out_dir.join("scaling.svg"))?;
    }
    Ok(())
}
