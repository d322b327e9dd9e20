//! Operator commands behind the `cjrank` binary.
//!
//! Each `cmd_*` function does the work and returns what it produced; [`run`]
//! adds the printing. Exit codes: 0 success, 1 invalid input, 2 I/O,
//! 3 numerical failure (non-identifiable or diverged fit).

mod args;

use std::fs;
use std::io::{self, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};

use cjrank_core::analytics::export::{self, TableRow};
use cjrank_core::analytics::{
    fit_log, kendall_tau, method_comparison, win_summary, KendallTest, MethodComparison,
    PValueMethod,
};
use cjrank_core::rating::{cj_display_scores, elo_replay, rank_order, ranks_from_order, RatingConfig};
use cjrank_core::scheduler::accumulate_coverage;
use cjrank_core::simulator::{simulate_experiment, LatentModel};
use cjrank_core::store::{
    load_log, read_manifest, Experiment, ExperimentManifest, JudgementRecord, Store, LOG_FILE,
    MANIFEST_FILE,
};
use cjrank_core::{corpus, ErrorKind, ItemId, ItemIndex};
use cjrank_service::AppState;
use thiserror::Error;

pub use args::{
    BaseArg, Cli, Command, CoverageArgs, Method, ModelKind, RatingOverrides, ScoreArgs,
    ServeArgs, SimulateArgs,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] cjrank_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("port {port} on {host} is already in use")]
    PortInUse { host: String, port: u16 },
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: String, source: io::Error },
    #[error("data directory {} is not writable: {source}", path.display())]
    DataDir { path: PathBuf, source: io::Error },
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("service stopped: {0}")]
    Serve(io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Validation | ErrorKind::NotFound | ErrorKind::Conflict => 1,
                ErrorKind::Io => 2,
                ErrorKind::Numerical => 3,
            },
            CliError::Usage(_) => 1,
            CliError::PortInUse { .. }
            | CliError::Bind { .. }
            | CliError::DataDir { .. }
            | CliError::Write { .. }
            | CliError::Serve(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

/// The comparison table for one log, plus anything the operator should hear about.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub csv: String,
    /// Present when both methods ran.
    pub comparison: Option<MethodComparison>,
    pub judgements: usize,
    pub warnings: Vec<String>,
}

fn single_method_rows(index: &ItemIndex, scores: &[f64], elo: bool) -> Vec<TableRow> {
    let order = rank_order(scores);
    let ranks = ranks_from_order(&order);
    order
        .iter()
        .map(|&i| {
            let cell = Some((scores[i], ranks[i]));
            TableRow {
                item_id: index.id(i).0,
                elo: if elo { cell } else { None },
                cj: if elo { None } else { cell },
            }
        })
        .collect()
}

/// Scores a log already in memory.
pub fn score_log(
    manifest: &ExperimentManifest,
    log: &[JudgementRecord],
    method: Method,
    config: &RatingConfig,
) -> Result<ScoreReport> {
    let index = manifest.index()?;
    let mut report = ScoreReport {
        csv: format!("{}\n", export::COMPARISON_HEADER),
        comparison: None,
        judgements: log.len(),
        warnings: Vec::new(),
    };
    if log.is_empty() {
        report.warnings.push("log is empty; nothing to score".into());
        return Ok(report);
    }
    let smoothing_note = |regularized: bool, warnings: &mut Vec<String>| {
        if regularized {
            warnings.push(format!(
                "win graph is not strongly connected; Bradley-Terry scores include smoothing of {}",
                config.bt.smoothing.unwrap_or_default()
            ));
        }
    };
    match method {
        Method::Both => {
            let cmp = method_comparison(&index, log, config)?;
            smoothing_note(cmp.regularized, &mut report.warnings);
            if !cmp.bt.converged {
                report.warnings.push(format!(
                    "Bradley-Terry fit stopped after {} iterations without converging",
                    cmp.bt.iterations
                ));
            }
            report.csv = export::comparison_csv(&cmp);
            report.comparison = Some(cmp);
        }
        Method::Elo => {
            let elo = elo_replay(&index, log, &config.elo)?;
            report.csv = export::table_csv(&single_method_rows(&index, &elo.ratings, true));
        }
        Method::Bt => {
            let bt = fit_log(&index, log, config)?;
            smoothing_note(bt.regularized, &mut report.warnings);
            let cj = cj_display_scores(&bt);
            report.csv = export::table_csv(&single_method_rows(&index, &cj, false));
        }
    }
    Ok(report)
}

fn score_inputs(args: &ScoreArgs) -> Result<(PathBuf, PathBuf)> {
    match (&args.experiment, &args.manifest, &args.log) {
        (Some(dir), None, None) => Ok((dir.join(MANIFEST_FILE), dir.join(LOG_FILE))),
        (None, Some(m), Some(l)) => Ok((m.clone(), l.clone())),
        _ => Err(CliError::Usage(
            "pass --experiment DIR, or both --manifest and --log".into(),
        )),
    }
}

/// Reads a manifest and log, scores them and writes the table to `--out` if given.
pub fn cmd_score(args: &ScoreArgs) -> Result<ScoreReport> {
    let (manifest_path, log_path) = score_inputs(args)?;
    let manifest = read_manifest(&manifest_path)?;
    let config = args.rating.apply(manifest.config)?;
    let log = load_log(&log_path)?;
    let report = score_log(&manifest, &log, args.method, &config)?;
    if let Some(out) = &args.out {
        write_file(out, &report.csv)?;
    }
    Ok(report)
}

/// Ground truth for a simulated run. Ten items reuse the sample corpus'
/// reference strengths; other sizes get evenly spaced strengths with item 1 strongest.
pub fn latent_model(kind: ModelKind, n_items: usize) -> cjrank_core::Result<LatentModel> {
    let strengths: Vec<f64> = if n_items == corpus::SAMPLE.len() {
        corpus::reference_strengths()
    } else {
        (0..n_items).map(|k| (n_items - k) as f64).collect()
    };
    match kind {
        ModelKind::Bt => LatentModel::bradley_terry(strengths),
        ModelKind::Thurstone => {
            let means: Vec<f64> = strengths.iter().map(|s| s.ln()).collect();
            LatentModel::thurstone(&means)
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimulateSummary {
    pub out: PathBuf,
    pub judgements: usize,
    pub comparison: MethodComparison,
    pub elo_vs_latent: KendallTest,
    pub cj_vs_latent: KendallTest,
}

/// Item positions sorted best-first by the given rank column.
fn order_by(index: &ItemIndex, cmp: &MethodComparison, rank: impl Fn(&cjrank_core::analytics::ComparisonRow) -> usize) -> Vec<usize> {
    let mut rows: Vec<_> = cmp.rows.iter().collect();
    rows.sort_by_key(|r| rank(r));
    rows.iter()
        .map(|r| index.position(r.item_id).expect("comparison rows come from the index"))
        .collect()
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulateSummary> {
    let config = args.rating.apply(RatingConfig::default())?;
    let model = latent_model(args.model, args.items)?;
    let sim = simulate_experiment(&model, args.items, args.sessions, args.seed, config)?;
    sim.save(&args.out)?;

    let index = sim.manifest.index()?;
    let comparison = method_comparison(&index, &sim.log, &config)?;
    let latent = model.latent_order();
    let elo_vs_latent = kendall_tau(&order_by(&index, &comparison, |r| r.elo_rank), &latent)?;
    let cj_vs_latent = kendall_tau(&order_by(&index, &comparison, |r| r.cj_rank), &latent)?;
    Ok(SimulateSummary {
        out: args.out.clone(),
        judgements: sim.log.len(),
        comparison,
        elo_vs_latent,
        cj_vs_latent,
    })
}

/// Prefixes a dense grid with an item-id header row and an item-id column.
fn labelled_grid(ids: &[ItemId], grid: &str) -> String {
    let mut out = String::from("item_id");
    for id in ids {
        out.push(',');
        out.push_str(&id.to_string());
    }
    out.push('\n');
    for (id, line) in ids.iter().zip(grid.lines()) {
        out.push_str(&format!("{id},{line}\n"));
    }
    out
}

pub const COVERAGE_FILES: [&str; 3] = ["coverage.csv", "wins.csv", "win_percentages.csv"];

/// Writes the pair-coverage, win-count and win-share grids; returns the files written.
pub fn cmd_coverage(args: &CoverageArgs) -> Result<Vec<PathBuf>> {
    let exp = Experiment::load(args.experiment.clone())?;
    let index = exp.index();
    let coverage = accumulate_coverage(index, &exp.dealt_pairs())?;
    let summary = win_summary(index, &exp.log())?;
    let out_dir = args.out.clone().unwrap_or_else(|| args.experiment.clone());
    fs::create_dir_all(&out_dir).map_err(|source| CliError::Write {
        path: out_dir.clone(),
        source,
    })?;
    let grids = [
        export::coverage_csv(&coverage),
        export::wins_csv(&summary),
        export::percentages_csv(&summary),
    ];
    let mut written = Vec::new();
    for (name, grid) in COVERAGE_FILES.iter().zip(grids) {
        let path = out_dir.join(name);
        write_file(&path, &labelled_grid(index.ids(), &grid))?;
        written.push(path);
    }
    Ok(written)
}

/// Binds the service port, reporting an occupied port as such.
pub fn bind(host: &str, port: u16) -> Result<TcpListener> {
    TcpListener::bind((host, port)).map_err(|source| {
        if source.kind() == io::ErrorKind::AddrInUse {
            CliError::PortInUse {
                host: host.to_string(),
                port,
            }
        } else {
            CliError::Bind {
                addr: format!("{host}:{port}"),
                source,
            }
        }
    })
}

fn check_writable(dir: &Path) -> Result<()> {
    let err = |source| CliError::DataDir {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(err)?;
    let probe = dir.join(".cjrank-write-probe");
    fs::write(&probe, b"").map_err(err)?;
    fs::remove_file(&probe).map_err(err)
}

/// Opens the data directory and serves until ctrl-c.
pub fn cmd_serve(args: &ServeArgs) -> Result<()> {
    check_writable(&args.data_dir)?;
    let store = Store::open(&args.data_dir)?;
    let listener = bind(&args.host, args.port)?;
    let addr = listener.local_addr().map_err(CliError::Serve)?;
    listener.set_nonblocking(true).map_err(CliError::Serve)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(CliError::Serve)?;
    eprintln!("cjrank: serving {} on http://{addr}", args.data_dir.display());
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::from_std(listener).map_err(CliError::Serve)?;
        cjrank_service::serve(listener, AppState::new(store))
            .await
            .map_err(CliError::Serve)
    })
}

fn print_correlation(err: &mut dyn Write, cmp: &MethodComparison) -> io::Result<()> {
    let c = &cmp.correlation;
    let pearson = c
        .pearson_r
        .map_or_else(|| "undefined".to_string(), |r| format!("{r:.4}"));
    let method = match c.p_value_method {
        PValueMethod::Exact => "exact",
        PValueMethod::NormalApproximation => "normal approximation",
    };
    writeln!(
        err,
        "pearson r = {pearson}, kendall tau = {:.4} (p = {:.3e}, {method})",
        c.kendall_tau, c.kendall_p_value
    )
}

/// Runs one parsed command, sending tables to `out` and diagnostics to `err`.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let io_err = |e: io::Error| CliError::Write {
        path: PathBuf::from("<stdout>"),
        source: e,
    };
    match &cli.command {
        Command::Serve(args) => cmd_serve(args),
        Command::Simulate(args) => {
            let s = cmd_simulate(args)?;
            writeln!(out, "wrote {} judgements to {}", s.judgements, s.out.display()).map_err(io_err)?;
            writeln!(
                out,
                "kendall tau vs latent order: elo = {:.4}, bradley-terry = {:.4}",
                s.elo_vs_latent.tau, s.cj_vs_latent.tau
            )
            .map_err(io_err)?;
            print_correlation(out, &s.comparison).map_err(io_err)
        }
        Command::Score(args) => {
            let report = cmd_score(args)?;
            for w in &report.warnings {
                writeln!(err, "warning: {w}").map_err(io_err)?;
            }
            if args.out.is_none() {
                out.write_all(report.csv.as_bytes()).map_err(io_err)?;
            }
            if let Some(cmp) = &report.comparison {
                print_correlation(err, cmp).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Coverage(args) => {
            for path in cmd_coverage(args)? {
                writeln!(out, "wrote {}", path.display()).map_err(io_err)?;
            }
            Ok(())
        }
    }
}
