//! `noos`: serve, replay, report, export, user-add.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use chrono::NaiveDate;
use clap::{Parser, Subcommand, ValueEnum};
use noosphere_core::assess::{closure_histogram, participation_report};
use noosphere_core::autolink::LinkOptions;
use noosphere_core::export::{compile, serialize, CompileOptions, Format};
use noosphere_core::store::{log_bytes, read_log_file};
use noosphere_core::{rebuild_state, EventRecord, Role, State, SystemClock, UserId};

use crate::api::{router, AppState};
use crate::auth::Sessions;
use crate::config::Config;
use crate::data::{load_collections, write_atomic, DataDir};
use crate::error::ServiceError;

#[derive(Debug, Parser)]
#[command(name = "noos", version, about = "Collaborative knowledge-base server and tools")]
pub struct Cli {
    /// TOML configuration file; NOOS_* variables override it.
    #[arg(long, global = true, env = "NOOS_CONFIG")]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportKind {
    Participation,
    Closures,
    Export,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Tsv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DocFormat {
    Latex,
    TocText,
}

impl From<DocFormat> for Format {
    fn from(f: DocFormat) -> Self {
        match f {
            DocFormat::Latex => Format::Latex,
            DocFormat::TocText => Format::TocText,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the HTTP API over the configured data directory.
    Serve,
    /// Rebuild state from an event log and write reports.
    Replay {
        log: PathBuf,
        /// Output directory; receives events.jsonl, snapshot.json and reports.
        #[arg(long, default_value = "replay-out")]
        out: PathBuf,
        #[arg(long = "report", value_enum)]
        reports: Vec<ReportKind>,
        #[arg(long)]
        from: Option<NaiveDate>,
        #[arg(long)]
        to: Option<NaiveDate>,
        /// Collections for the export report (overrides the config).
        #[arg(long)]
        collections: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "latex")]
        format: DocFormat,
    },
    /// Print a report over the data directory.
    Report {
        #[arg(value_enum)]
        kind: ReportKind,
        #[arg(long, value_enum, default_value = "tsv")]
        format: TableFormat,
        #[arg(long)]
        from: Option<NaiveDate>,
        #[arg(long)]
        to: Option<NaiveDate>,
    },
    /// Compile the course notes from the data directory.
    Export {
        #[arg(long, value_enum, default_value = "latex")]
        format: DocFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Register an account (run while the server is stopped).
    UserAdd {
        #[arg(long)]
        id: String,
        #[arg(long)]
        name: String,
        #[arg(long)]
        role: Role,
        #[arg(long)]
        email: String,
        #[arg(long, env = "NOOS_USER_SECRET")]
        secret: String,
    },
}

pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let _ = tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_env("NOOS_LOG"))
        .with_writer(std::io::stderr)
        .try_init();
    let mut out = std::io::stdout();
    match run(cli, std::env::vars(), &mut out) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("noos: {e}");
            e.exit_code()
        }
    }
}

/// Executes a parsed command; output for stdout goes to `out`.
pub fn run(
    cli: Cli,
    env: impl IntoIterator<Item = (String, String)>,
    out: &mut dyn std::io::Write,
) -> Result<(), ServiceError> {
    let cfg = Config::load(cli.config.as_deref(), env)?;
    let write = |out: &mut dyn std::io::Write, s: &[u8]| {
        out.write_all(s).map_err(|e| ServiceError::Data(e.to_string()))
    };
    match cli.command {
        Command::Serve => serve(cfg),
        Command::Replay {
            log,
            out: dir,
            reports,
            from,
            to,
            collections,
            format,
        } => {
            let summary = replay(&cfg, &log, &dir, &reports, from, to, collections.as_deref(), format)?;
            write(out, summary.as_bytes())
        }
        Command::Report { kind, format, from, to } => {
            let (records, state) = load(&DataDir::new(&cfg.data_dir))?;
            let body = report(&cfg, &records, &state, kind, format, from, to, None, DocFormat::Latex)?;
            write(out, body.as_bytes())
        }
        Command::Export { format, out: file } => {
            let (records, state) = load(&DataDir::new(&cfg.data_dir))?;
            let body = report(&cfg, &records, &state, ReportKind::Export, TableFormat::Tsv, None, None, None, format)?;
            match file {
                Some(path) => write_atomic(&path, body.as_bytes()),
                None => write(out, body.as_bytes()),
            }
        }
        Command::UserAdd {
            id,
            name,
            role,
            email,
            secret,
        } => {
            let dir = DataDir::new(&cfg.data_dir);
            let opened = dir.open(&cfg, Arc::new(SystemClock))?;
            let user = UserId::new(id)?;
            if secret.is_empty() {
                return Err(ServiceError::Data("secret must not be empty".into()));
            }
            opened
                .engine
                .register_user(&cfg.admin_id(), &user, name, role, email)?;
            opened.credentials.set(&user, &secret)?;
            dir.checkpoint(&opened.engine)?;
            write(out, format!("added {user} ({role})\n").as_bytes())
        }
    }
}

/// Reads the data directory without changing it.
pub fn load(dir: &DataDir) -> Result<(Vec<EventRecord>, State), ServiceError> {
    let records = if dir.events().exists() {
        read_log_file(dir.events())?
    } else {
        Vec::new()
    };
    let state = rebuild_state(&records)?;
    Ok((records, state))
}

fn day_span(records: &[EventRecord]) -> (NaiveDate, NaiveDate) {
    match (records.first(), records.last()) {
        (Some(a), Some(b)) => (a.ts.date_naive(), b.ts.date_naive()),
        _ => {
            let d = NaiveDate::from_ymd_opt(1970, 1, 1).unwrap();
            (d, d)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn report(
    cfg: &Config,
    records: &[EventRecord],
    state: &State,
    kind: ReportKind,
    format: TableFormat,
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    collections: Option<&Path>,
    doc: DocFormat,
) -> Result<String, ServiceError> {
    let json = |v: serde_json::Value| serde_json::to_string_pretty(&v).expect("json") + "\n";
    Ok(match kind {
        ReportKind::Participation => {
            let r = participation_report(state, &cfg.rubric);
            match format {
                TableFormat::Tsv => r.to_delimited('\t'),
                TableFormat::Json => json(serde_json::to_value(&r).expect("json")),
            }
        }
        ReportKind::Closures => {
            let (first, last) = day_span(records);
            let h = closure_histogram(records, from.unwrap_or(first), to.unwrap_or(last), cfg.tz()?)?;
            match format {
                TableFormat::Tsv => h.to_tsv(),
                TableFormat::Json => json(serde_json::to_value(&h).expect("json")),
            }
        }
        ReportKind::Export => {
            let collections = load_collections(collections.or(cfg.export.collections.as_deref()))?;
            let opts = CompileOptions {
                front: cfg.export.front.clone(),
                rubric: cfg.rubric,
                link: LinkOptions::default(),
            };
            let d = compile(state, &collections, &opts)?;
            String::from_utf8(serialize(&d, doc.into())).expect("serializers emit UTF-8")
        }
    })
}

#[allow(clippy::too_many_arguments)]
pub fn replay(
    cfg: &Config,
    log: &Path,
    dir: &Path,
    reports: &[ReportKind],
    from: Option<NaiveDate>,
    to: Option<NaiveDate>,
    collections: Option<&Path>,
    doc: DocFormat,
) -> Result<String, ServiceError> {
    let records = read_log_file(log)?;
    let state = rebuild_state(&records)?;
    std::fs::create_dir_all(dir).map_err(|e| ServiceError::Data(format!("{}: {e}", dir.display())))?;
    let data = DataDir::new(dir);
    write_atomic(&data.events(), &log_bytes(&records))?;
    write_atomic(&data.snapshot(), &state.to_snapshot())?;
    let mut summary = format!("replayed {} events to {}\n", records.len(), dir.display());
    for &kind in reports {
        let name = match (kind, doc) {
            (ReportKind::Participation, _) => "participation.tsv",
            (ReportKind::Closures, _) => "closures.tsv",
            (ReportKind::Export, DocFormat::Latex) => "notes.tex",
            (ReportKind::Export, DocFormat::TocText) => "notes.toc.txt",
        };
        let body = report(cfg, &records, &state, kind, TableFormat::Tsv, from, to, collections, doc)?;
        write_atomic(&dir.join(name), body.as_bytes())?;
        summary.push_str(&format!("wrote {name}\n"));
    }
    Ok(summary)
}

/// Opens the data directory into shared API state.
pub fn app_state(cfg: Config) -> Result<(Arc<AppState>, Option<String>), ServiceError> {
    let dir = DataDir::new(&cfg.data_dir);
    let opened = dir.open(&cfg, Arc::new(SystemClock))?;
    let collections = load_collections(cfg.export.collections.as_deref())?;
    let state = AppState {
        engine: Arc::new(opened.engine),
        credentials: opened.credentials,
        sessions: Sessions::new(cfg.token_ttl_secs),
        collections,
        config: cfg,
    };
    Ok((Arc::new(state), opened.generated_secret))
}

fn serve(cfg: Config) -> Result<(), ServiceError> {
    let dir = DataDir::new(&cfg.data_dir);
    let listen = cfg.listen.clone();
    let (state, secret) = app_state(cfg)?;
    if let Some(secret) = secret {
        eprintln!("seeded admin {} with secret {secret}", state.config.admin.id);
    }
    let rt = tokio::runtime::Runtime::new().map_err(|e| ServiceError::Data(e.to_string()))?;
    rt.block_on(async {
        let listener = tokio::net::TcpListener::bind(&listen)
            .await
            .map_err(|e| ServiceError::Listen {
                addr: listen.clone(),
                reason: e.to_string(),
            })?;
        tracing::info!("listening on {listen}");
        axum::serve(listener, router(state.clone()))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await
            .map_err(|e| ServiceError::Data(e.to_string()))
    })?;
    dir.checkpoint(&state.engine)
}
