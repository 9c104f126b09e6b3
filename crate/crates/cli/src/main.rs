//! `mpuav`: batch experiment runner for multi-purpose UAV trips.
//!
//! Every command writes its table (CSV or JSON) plus `manifest.json` into
//! the `--out` directory. Exit status is 0 on success, 1 when infeasible
//! trials dominate, 2 on any error; failures also print a one-line JSON
//! record on stderr.

mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use mpuav_core::channel::TransmissionTimes;
use mpuav_core::geometry::{area_audit, cdf_rb, AreaBackend, PathGeometry, Point2};
use mpuav_core::montecarlo::{compare_methods, run_study, sample_nearest_distances, AggregateMetrics, Method, StudyKind};
use mpuav_core::params::{apply_overrides, load_and_validate, SystemParams, TABLE_I_TOML};
use mpuav_core::planner::{Planner, Scenario};
use mpuav_core::{Error, Result};

use output::{Cell, Format, Table};

#[derive(Parser, Debug)]
#[command(name = "mpuav", version, about = "Trip planning and Monte-Carlo studies for package-and-data UAV missions")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML config; the built-in reference parameters when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one config value, e.g. `--set mission.battery_wh=150`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Planner radius grid step, m.
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StudyArg {
    Bound,
    Direct,
    Both,
}

impl StudyArg {
    fn kinds(self) -> Vec<StudyKind> {
        match self {
            StudyArg::Bound => vec![StudyKind::Bound],
            StudyArg::Direct => vec![StudyKind::Direct],
            StudyArg::Both => vec![StudyKind::Bound, StudyKind::Direct],
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nearest-point distance CDF: closed form, numeric area and PPP samples.
    RbCdf {
        #[arg(long, default_value_t = 500.0)]
        l1: f64,
        #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2)]
        theta: f64,
        #[arg(long, default_value_t = 1000.0)]
        l2: f64,
        /// Excluded disk around the IoT end, m.
        #[arg(long, default_value_t = 0.0)]
        r_hole: f64,
        /// Point density per m²; the TBS density when omitted.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 1000.0)]
        r_max: f64,
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Plan one trip for explicit coordinates (`x,y` in metres).
    Plan {
        #[arg(long, default_value = "0,0", allow_hyphen_values = true, value_parser = parse_point)]
        s: Point2,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        d: Point2,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        iot: Point2,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_point)]
        tbs: Point2,
        /// Requested data, bit/Hz; the config value when omitted.
        #[arg(long)]
        m: Option<f64>,
        /// Restrict to the deliver-first route.
        #[arg(long)]
        deliver_first: bool,
    },
    /// Mean metrics over a grid of distances and payloads.
    Sweep {
        #[arg(long, value_delimiter = ',', default_value = "3,5,7")]
        l2_km: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_value = "0,1000,2000,4000,6000,8000,10000,15000,20000")]
        m_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = StudyArg::Both)]
        study: StudyArg,
    },
    /// Histograms of delivery time and delivery-time inflation.
    Histogram {
        #[arg(long, default_value_t = 5.0)]
        l2_km: f64,
        #[arg(long, value_delimiter = ',', default_value = "0,10000")]
        m_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = StudyArg::Direct)]
        study: StudyArg,
    },
    /// Optimal routing against deliver-first on common instances.
    Compare {
        #[arg(long, default_value_t = 5.0)]
        l2_km: f64,
        #[arg(long, value_delimiter = ',', default_value = "1000,4000,6000,10000")]
        m_grid: Vec<f64>,
        #[arg(long, value_enum, default_value_t = StudyArg::Direct)]
        study: StudyArg,
    },
    /// Closed-form buffer area against the numeric oracle on the audit grid.
    AreaAudit {
        /// Scanline spacing, m; r/200 (at least 0.25 m) when omitted.
        #[arg(long)]
        resolution: Option<f64>,
        /// Relative error above which a row is listed as a discrepancy.
        #[arg(long, default_value_t = 0.01)]
        tolerance: f64,
    },
}

fn parse_point(s: &str) -> std::result::Result<Point2, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let x: f64 = x.trim().parse().map_err(|e| format!("{e}"))?;
    let y: f64 = y.trim().parse().map_err(|e| format!("{e}"))?;
    Ok(Point2::new(x, y))
}

/// Outcome of a command: tables to write and whether infeasible trials
/// dominated.
struct Report {
    tables: Vec<Table>,
    infeasible_dominant: bool,
}

fn resolve_config(common: &Common) -> Result<SystemParams> {
    let text = match &common.config {
        Some(p) => fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => TABLE_I_TOML.to_string(),
    };
    let mut overrides = Vec::new();
    for o in &common.overrides {
        let (k, v) = o
            .split_once('=')
            .ok_or_else(|| Error::InvalidValue { field: o.clone(), reason: "expected SECTION.KEY=VALUE".into() })?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    if let Some(seed) = common.seed {
        overrides.push(("run.seed".into(), seed.to_string()));
    }
    if let Some(trials) = common.trials {
        overrides.push(("run.trials".into(), trials.to_string()));
    }
    if let Some(step) = common.step {
        overrides.push(("run.grid_step_m".into(), format!("{step:?}")));
    }
    let text = if overrides.is_empty() { text } else { apply_overrides(&text, &overrides)? };
    let loaded = load_and_validate(&text, true)?;
    for w in &loaded.warnings {
        eprintln!("warning: {w}");
    }
    Ok(loaded.params)
}

fn metrics_cells(m: &AggregateMetrics) -> Vec<Cell> {
    vec![
        m.trials.into(),
        m.completed.into(),
        m.infeasible.into(),
        m.skipped.into(),
        m.t_total.mean.into(),
        m.t_total.std_err.into(),
        m.e_total.mean.into(),
        m.e_total.std_err.into(),
        m.m_t_over_bw.mean.into(),
        m.m_t_over_bw.std_err.into(),
        m.t_delivery.mean.into(),
        m.t_delivery.std_err.into(),
        m.xi.mean.into(),
        m.xi.std_err.into(),
        m.xi.min.into(),
        m.xi.max.into(),
        m.full_delivery_fraction.into(),
    ]
}

const METRICS_HEADER: [&str; 17] = [
    "trials",
    "completed",
    "infeasible",
    "skipped",
    "t_total_mean_s",
    "t_total_se_s",
    "e_total_mean_j",
    "e_total_se_j",
    "m_t_mean",
    "m_t_se",
    "t_delivery_mean_s",
    "t_delivery_se_s",
    "xi_mean",
    "xi_se",
    "xi_min",
    "xi_max",
    "full_delivery_fraction",
];

fn study_name(kind: StudyKind) -> &'static str {
    match kind {
        StudyKind::Bound => "bound",
        StudyKind::Direct => "direct",
    }
}

fn dominated(m: &AggregateMetrics) -> bool {
    m.infeasible > m.completed
}

fn run_rb_cdf(params: &SystemParams, l1: f64, theta: f64, l2: f64, r_hole: f64, lambda: Option<f64>, r_max: f64, points: usize) -> Result<Report> {
    if points == 0 || !(r_max > 0.0) {
        return Err(Error::InvalidValue { field: "points/r-max".into(), reason: "need at least one point and a positive range".into() });
    }
    let path = PathGeometry::new(l1, theta, l2, r_hole)?;
    let lambda = lambda.unwrap_or(params.lambda_t);
    let mut samples = sample_nearest_distances(&path, lambda, params.run.trials as usize, params.run.seed)?;
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut table = Table::new("rb_cdf", &["r_m", "f_closed", "f_numeric", "f_empirical", "closed_diagnostics"]);
    for k in 0..=points {
        let r = r_max * k as f64 / points as f64;
        let closed = cdf_rb(&path, lambda, r, AreaBackend::Closed)?;
        let numeric = cdf_rb(&path, lambda, r, AreaBackend::Numeric { resolution: params.run.area_resolution })?;
        let empirical = samples.partition_point(|x| *x <= r) as f64 / n;
        let diags: Vec<String> = closed.diagnostics.iter().map(|d| format!("{d:?}")).collect();
        table.push(vec![r.into(), closed.value.into(), numeric.value.into(), empirical.into(), diags.join(";").into()]);
    }
    Ok(Report { tables: vec![table], infeasible_dominant: false })
}

fn run_plan(params: &SystemParams, sc: Scenario, m: Option<f64>, deliver_first: bool) -> Result<Report> {
    let times = TransmissionTimes::from_params(params);
    let planner = Planner::new(params, &times);
    let m = m.unwrap_or(params.m_over_bw);
    let plan = if deliver_first { planner.deliver_first(&sc, m)? } else { planner.plan(&sc, m)? };
    let mut table = Table::new(
        "plan",
        &[
            "route", "h1_x", "h1_y", "h2_x", "h2_y", "r_c2u_m", "r_u2b_m", "t_total_s", "t_delivery_s", "e_total_j", "m_t",
            "m_requested", "full_delivery",
        ],
    );
    table.push(vec![
        plan.route.map(|r| r.number().to_string()).unwrap_or_else(|| "delivery_only".into()).into(),
        plan.h1.map(|p| p.x).into(),
        plan.h1.map(|p| p.y).into(),
        plan.h2.map(|p| p.x).into(),
        plan.h2.map(|p| p.y).into(),
        plan.r_c2u.into(),
        plan.r_u2b.into(),
        plan.t_total.into(),
        plan.t_delivery.into(),
        plan.e_total.into(),
        plan.m_t_over_bw.into(),
        plan.m_over_bw.into(),
        plan.feasible_full_delivery.into(),
    ]);
    Ok(Report { tables: vec![table], infeasible_dominant: false })
}

fn run_sweep(params: &SystemParams, l2_km: &[f64], ms: &[f64], study: StudyArg) -> Result<Report> {
    let mut header = vec!["study", "l2_m", "m_requested"];
    header.extend(METRICS_HEADER);
    let mut table = Table::new("sweep", &header);
    let mut dominant = false;
    for kind in study.kinds() {
        for &km in l2_km {
            let l2 = km * 1000.0;
            for m in run_study(kind, params, l2, ms, params.run.trials, params.run.seed, Method::Optimal)? {
                dominant |= dominated(&m);
                let mut row: Vec<Cell> = vec![study_name(kind).into(), l2.into(), m.m_over_bw.into()];
                row.extend(metrics_cells(&m));
                table.push(row);
            }
        }
    }
    Ok(Report { tables: vec![table], infeasible_dominant: dominant })
}

fn run_histogram(params: &SystemParams, l2_km: f64, ms: &[f64], study: StudyArg) -> Result<Report> {
    let mut table = Table::new("histogram", &["study", "quantity", "m_requested", "bin", "lower", "upper", "count"]);
    let mut dominant = false;
    for kind in study.kinds() {
        let metrics = run_study(kind, params, l2_km * 1000.0, ms, params.run.trials, params.run.seed, Method::Optimal)?;
        for m in &metrics {
            dominant |= dominated(m);
            for (quantity, h) in [("t_delivery_s", &m.t_delivery_histogram), ("xi", &m.xi_histogram)] {
                for (i, c) in h.counts.iter().enumerate() {
                    table.push(vec![
                        study_name(kind).into(),
                        quantity.into(),
                        m.m_over_bw.into(),
                        (i as u64).into(),
                        h.edges[i].into(),
                        h.edges[i + 1].into(),
                        (*c).into(),
                    ]);
                }
            }
        }
    }
    Ok(Report { tables: vec![table], infeasible_dominant: dominant })
}

fn run_compare(params: &SystemParams, l2_km: f64, ms: &[f64], study: StudyArg) -> Result<Report> {
    let mut table = Table::new(
        "compare",
        &[
            "study",
            "m_requested",
            "paired",
            "optimal_t_mean_s",
            "optimal_e_mean_j",
            "optimal_m_t_mean",
            "deliver_first_t_mean_s",
            "deliver_first_e_mean_j",
            "deliver_first_m_t_mean",
            "data_dominance",
            "both_full",
            "time_dominance",
        ],
    );
    let mut dominant = false;
    for kind in study.kinds() {
        for c in compare_methods(kind, params, l2_km * 1000.0, ms, params.run.trials, params.run.seed)? {
            dominant |= dominated(&c.optimal);
            table.push(vec![
                study_name(kind).into(),
                c.m_over_bw.into(),
                c.paired.into(),
                c.optimal.t_total.mean.into(),
                c.optimal.e_total.mean.into(),
                c.optimal.m_t_over_bw.mean.into(),
                c.deliver_first.t_total.mean.into(),
                c.deliver_first.e_total.mean.into(),
                c.deliver_first.m_t_over_bw.mean.into(),
                c.data_dominance.into(),
                c.both_full.into(),
                c.time_dominance.into(),
            ]);
        }
    }
    Ok(Report { tables: vec![table], infeasible_dominant: dominant })
}

fn run_area_audit(resolution: Option<f64>, tolerance: f64) -> Result<Report> {
    let mut table = Table::new(
        "area_audit",
        &["l1_m", "theta_rad", "r_m", "closed_m2", "numeric_m2", "rel_err", "branch", "diagnostics", "discrepancy"],
    );
    for row in area_audit(resolution)? {
        let diags: Vec<String> = row.diagnostics.iter().map(|d| format!("{d:?}")).collect();
        let listed = !(row.rel_err <= tolerance) || !diags.is_empty();
        table.push(vec![
            row.l1.into(),
            row.theta.into(),
            row.r.into(),
            row.closed.into(),
            row.numeric.into(),
            row.rel_err.into(),
            (row.branch as u64).into(),
            diags.join(";").into(),
            listed.into(),
        ]);
    }
    Ok(Report { tables: vec![table], infeasible_dominant: false })
}

/// Arguments with the output directory removed, so the manifest does not
/// depend on where it was written.
fn recorded_args() -> Vec<String> {
    let mut out = Vec::new();
    let mut skip = false;
    for a in std::env::args().skip(1) {
        if skip {
            skip = false;
        } else if a == "--out" {
            skip = true;
        } else if !a.starts_with("--out=") {
            out.push(a);
        }
    }
    out
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::RbCdf { .. } => "rb-cdf",
        Command::Plan { .. } => "plan",
        Command::Sweep { .. } => "sweep",
        Command::Histogram { .. } => "histogram",
        Command::Compare { .. } => "compare",
        Command::AreaAudit { .. } => "area-audit",
    }
}

fn write_manifest(dir: &Path, cli: &Cli, params: &SystemParams, config: &str, outputs: &[PathBuf]) -> Result<()> {
    let files: Vec<String> = outputs
        .iter()
        .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .collect();
    let manifest = json!({
        "tool": "mpuav",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(&cli.command),
        "args": recorded_args(),
        "seed": params.run.seed,
        "trials": params.run.trials,
        "outputs": files,
        "config": config,
    });
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join("manifest.json");
    fs::write(&path, text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: &Cli) -> Result<bool> {
    let mut params = resolve_config(&cli.common)?;
    if let Command::RbCdf { .. } = cli.command {
        if cli.common.trials.is_none() {
            params.run.trials = 100_000;
        }
    }
    let config = params.to_toml_string();
    let report = match &cli.command {
        Command::RbCdf { l1, theta, l2, r_hole, lambda, r_max, points } => {
            run_rb_cdf(&params, *l1, *theta, *l2, *r_hole, *lambda, *r_max, *points)?
        }
        Command::Plan { s, d, iot, tbs, m, deliver_first } => {
            run_plan(&params, Scenario { s: *s, d: *d, iot: *iot, tbs: *tbs }, *m, *deliver_first)?
        }
        Command::Sweep { l2_km, m_grid, study } => run_sweep(&params, l2_km, m_grid, *study)?,
        Command::Histogram { l2_km, m_grid, study } => run_histogram(&params, *l2_km, m_grid, *study)?,
        Command::Compare { l2_km, m_grid, study } => run_compare(&params, *l2_km, m_grid, *study)?,
        Command::AreaAudit { resolution, tolerance } => run_area_audit(*resolution, *tolerance)?,
    };
    let dir = &cli.common.out;
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut outputs = Vec::new();
    for t in &report.tables {
        outputs.push(t.write(dir, cli.common.format)?);
    }
    write_manifest(dir, cli, &params, &config, &outputs)?;
    Ok(report.infeasible_dominant)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => {
            eprintln!("{}", json!({"error": "infeasible", "message": "infeasible trials outnumber planned trials"}));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("{}", json!({"error": e.kind(), "message": e.to_string()}));
            ExitCode::from(if matches!(e, Error::Infeasible { .. }) { 1 } else { 2 })
        }
    }
}
