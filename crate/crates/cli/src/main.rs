//! `flexpdm`: operator tool for layout files and the dashboard server.
//!
//! JSON goes to stdout, human summaries to stderr. Exit codes: 0 success,
//! 1 invalid layout, 2 usage or malformed input, 3 store errors.

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use flexpdm_core::canonical::to_canonical_vec;
use flexpdm_core::layout::decode;
use flexpdm_core::store::RecordKind;
use flexpdm_core::{
    builtin_catalog, compose_default, diff, encode, list_visible, validate, LayoutDocument, Role,
    Store, StoreOptions,
};
use flexpdm_server::{router, serve, AppState, ServerConfig, DEFAULT_BIND};

#[derive(Parser)]
#[command(
    name = "flexpdm",
    version,
    about = "Role-based dashboard layouts for a PDM system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a layout file; prints the validation report.
    Validate { file: PathBuf },
    /// Print the default layout for a role.
    ComposeDefault {
        #[arg(long)]
        role: Role,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Print the edits that turn layout <a> into layout <b>.
    Diff { a: PathBuf, b: PathBuf },
    /// Load sample users, products and projects into an empty store.
    Seed {
        #[arg(long, env = "FLEXPDM_STORE")]
        store: PathBuf,
    },
    /// Dump one record kind as JSON lines.
    Export {
        #[arg(long, env = "FLEXPDM_STORE")]
        store: PathBuf,
        /// users, layouts, audit, chat, products or projects
        #[arg(long)]
        kind: RecordKind,
    },
    /// Print the component catalog, optionally as one role sees it.
    Catalog {
        #[arg(long)]
        role: Option<Role>,
    },
    /// Run the HTTP API until interrupted.
    Serve {
        #[arg(long, env = "FLEXPDM_STORE")]
        store: PathBuf,
        #[arg(long, env = "FLEXPDM_BIND", default_value = DEFAULT_BIND)]
        bind: SocketAddr,
        #[arg(long, env = "FLEXPDM_SESSION_TTL_SECS", default_value_t = 8 * 3600)]
        session_ttl_secs: i64,
        /// Allowed browser origin; repeat for several.
        #[arg(
            long = "cors-origin",
            env = "FLEXPDM_CORS_ORIGINS",
            value_delimiter = ','
        )]
        cors_origins: Vec<String>,
    },
}

enum Failure {
    Usage(String),
    Store(String),
}

type Outcome = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate { file } => cmd_validate(&file),
        Command::ComposeDefault { role, output } => cmd_compose(role, output.as_deref()),
        Command::Diff { a, b } => cmd_diff(&a, &b),
        Command::Seed { store } => cmd_seed(&store),
        Command::Export { store, kind } => cmd_export(&store, kind),
        Command::Catalog { role } => cmd_catalog(role),
        Command::Serve {
            store,
            bind,
            session_ttl_secs,
            cors_origins,
        } => cmd_serve(ServerConfig {
            bind,
            store_path: store,
            session_ttl: chrono::Duration::seconds(session_ttl_secs),
            cors_origins,
        }),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Store(msg)) => {
            eprintln!("store error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn emit(bytes: &[u8]) -> Result<(), Failure> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Usage(format!("writing output: {e}")))
}

fn read_layout(path: &Path) -> Result<LayoutDocument, Failure> {
    let bytes = std::fs::read(path)
        .map_err(|e| Failure::Usage(format!("reading {}: {e}", path.display())))?;
    decode(&bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn cmd_validate(file: &Path) -> Outcome {
    let doc = read_layout(file)?;
    let report = validate(&doc, &builtin_catalog());
    emit(&to_canonical_vec(&report).expect("reports serialize"))?;
    if report.is_empty() {
        eprintln!("{}: valid", file.display());
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "{}: {} violation(s)",
            file.display(),
            report.violations.len()
        );
        for v in &report.violations {
            eprintln!("  {:?} {}: {}", v.code, v.subject, v.detail);
        }
        Ok(ExitCode::from(1))
    }
}

fn cmd_compose(role: Role, output: Option<&Path>) -> Outcome {
    let bytes = encode(&compose_default(role, &builtin_catalog()));
    match output {
        Some(path) => std::fs::write(path, &bytes)
            .map_err(|e| Failure::Usage(format!("writing {}: {e}", path.display())))?,
        None => emit(&bytes)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_diff(a: &Path, b: &Path) -> Outcome {
    let (base, target) = (read_layout(a)?, read_layout(b)?);
    let edits = diff(&base, &target).map_err(|e| Failure::Usage(e.to_string()))?;
    emit(&to_canonical_vec(&edits).expect("edits serialize"))?;
    eprintln!("{} edit(s)", edits.len());
    Ok(ExitCode::SUCCESS)
}

fn open_store(path: &Path) -> Result<Store, Failure> {
    Store::open(path, StoreOptions::default()).map_err(|e| Failure::Store(e.to_string()))
}

fn cmd_seed(path: &Path) -> Outcome {
    let summary = open_store(path)?
        .seed_sample_data()
        .map_err(|e| Failure::Store(e.to_string()))?;
    eprintln!(
        "seeded {} users, {} products, {} projects",
        summary.users, summary.products, summary.projects
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_export(path: &Path, kind: RecordKind) -> Outcome {
    let store = open_store(path)?;
    let mut out = std::io::stdout().lock();
    let n = store
        .export_jsonl(kind, &mut out)
        .map_err(|e| Failure::Store(e.to_string()))?;
    out.flush().map_err(|e| Failure::Usage(e.to_string()))?;
    eprintln!("{n} record(s)");
    Ok(ExitCode::SUCCESS)
}

fn cmd_catalog(role: Option<Role>) -> Outcome {
    let reg = builtin_catalog();
    let bytes = match role {
        Some(role) => to_canonical_vec(&list_visible(&reg, role)),
        None => to_canonical_vec(&reg),
    };
    emit(&bytes.expect("catalog serializes"))?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_serve(config: ServerConfig) -> Outcome {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info")),
        )
        .init();
    if config.session_ttl <= chrono::Duration::zero() {
        return Err(Failure::Usage("session TTL must be positive".into()));
    }
    let store = open_store(&config.store_path)?;
    let app = router(
        AppState::new(store, config.session_ttl),
        &config.cors_origins,
    )
    .map_err(|e| Failure::Usage(e.message))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| Failure::Usage(e.to_string()))?;
    runtime.block_on(async move {
        let listener = tokio::net::TcpListener::bind(config.bind)
            .await
            .map_err(|e| Failure::Usage(format!("binding {}: {e}", config.bind)))?;
        let addr = listener
            .local_addr()
            .map_err(|e| Failure::Usage(e.to_string()))?;
        println!("flexpdm listening on {addr}");
        let shutdown = async {
            let _ = tokio::signal::ctrl_c().await;
        };
        serve(listener, app, shutdown)
            .await
            .map_err(|e| Failure::Usage(e.to_string()))?;
        Ok(ExitCode::SUCCESS)
    })
}
