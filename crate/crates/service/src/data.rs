//! The data directory: `events.jsonl` (the log), `snapshot.json` (a cache of
//! the state at some seq) and `credentials.json` (login verifiers).

use std::path::{Path, PathBuf};
use std::sync::Arc;

use noosphere_core::export::Collection;
use noosphere_core::notify::FileSink;
use noosphere_core::{Clock, Engine, FileLog, State};
use rand::RngCore;

use crate::auth::Credentials;
use crate::config::{Config, MailSinkKind};
use crate::error::ServiceError;

pub const EVENTS: &str = "events.jsonl";
pub const SNAPSHOT: &str = "snapshot.json";
pub const CREDENTIALS: &str = "credentials.json";

#[derive(Debug, Clone)]
pub struct DataDir {
    root: PathBuf,
}

/// An engine over a data directory, plus what opening it produced.
pub struct Opened {
    pub engine: Engine,
    pub credentials: Credentials,
    /// Set when the directory was empty and an admin secret was generated.
    pub generated_secret: Option<String>,
}

impl DataDir {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn events(&self) -> PathBuf {
        self.root.join(EVENTS)
    }

    pub fn snapshot(&self) -> PathBuf {
        self.root.join(SNAPSHOT)
    }

    pub fn credentials(&self) -> PathBuf {
        self.root.join(CREDENTIALS)
    }

    fn io(&self, what: &Path, e: std::io::Error) -> ServiceError {
        ServiceError::Data(format!("{}: {e}", what.display()))
    }

    /// Opens the log, replays it (from the snapshot when one is usable) and
    /// seeds the configured admin into an empty directory.
    pub fn open(&self, cfg: &Config, clock: Arc<dyn Clock>) -> Result<Opened, ServiceError> {
        std::fs::create_dir_all(&self.root).map_err(|e| self.io(&self.root, e))?;
        let (log, records) = FileLog::open(self.events())?;
        let cached = match std::fs::read(self.snapshot()) {
            Ok(bytes) => match State::from_snapshot(&bytes) {
                Ok(s) if s.last_seq() <= records.len() as u64 => Some(s),
                Ok(_) | Err(_) => {
                    tracing::warn!("ignoring stale or unreadable {}", self.snapshot().display());
                    None
                }
            },
            Err(_) => None,
        };
        let engine = match cached {
            Some(state) => Engine::from_snapshot(Box::new(log), clock, state, records)?,
            None => Engine::from_records(Box::new(log), clock, records)?,
        };
        if cfg.mail.sink == MailSinkKind::File {
            let path = cfg.mail.path.clone().expect("validated");
            engine.set_mail_sink(Box::new(FileSink::new(path)));
        }
        let credentials = Credentials::open(self.credentials())?;
        let mut generated_secret = None;
        if engine.snapshot().users().next().is_none() {
            let admin = cfg.admin_id();
            engine.bootstrap_admin(&admin, cfg.admin.name.clone(), cfg.admin.email.clone())?;
            let secret = match &cfg.admin.secret {
                Some(s) => s.clone(),
                None => {
                    let mut raw = [0u8; 12];
                    rand::rng().fill_bytes(&mut raw);
                    let s = hex::encode(raw);
                    generated_secret = Some(s.clone());
                    s
                }
            };
            credentials.set(&admin, &secret)?;
        }
        Ok(Opened {
            engine,
            credentials,
            generated_secret,
        })
    }

    /// Flushes the log and writes the snapshot atomically.
    pub fn checkpoint(&self, engine: &Engine) -> Result<(), ServiceError> {
        engine.sync()?;
        write_atomic(&self.snapshot(), &engine.snapshot().to_snapshot())
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), ServiceError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes)
        .and_then(|_| std::fs::rename(&tmp, path))
        .map_err(|e| ServiceError::Data(format!("{}: {e}", path.display())))
}

pub fn load_collections(path: Option<&Path>) -> Result<Vec<Collection>, ServiceError> {
    let Some(path) = path else {
        return Ok(Vec::new());
    };
    let bytes = std::fs::read(path).map_err(|e| ServiceError::Data(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| ServiceError::Data(format!("{}: {e}", path.display())))
}
