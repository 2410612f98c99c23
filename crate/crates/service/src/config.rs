//! Service configuration: a TOML file, then `NOOS_*` environment overrides,
//! then validation.

use std::path::{Path, PathBuf};

use chrono::FixedOffset;
use noosphere_core::assess::RubricConfig;
use noosphere_core::export::FrontMatter;
use noosphere_core::UserId;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("{path}: cannot read: {reason}")]
    Read { path: String, reason: String },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("config field {field}: {message}")]
    Field { field: String, message: String },
}

fn field(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Field {
        field: field.to_string(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MailSinkKind {
    File,
    #[default]
    None,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct MailConfig {
    pub sink: MailSinkKind,
    pub path: Option<PathBuf>,
}

/// The administrator seeded into an empty data directory.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AdminConfig {
    pub id: String,
    pub name: String,
    pub email: String,
    /// Initial login secret. Left empty, one is generated and printed once.
    pub secret: Option<String>,
}

impl Default for AdminConfig {
    fn default() -> Self {
        Self {
            id: "admin".into(),
            name: "Administrator".into(),
            email: "admin@localhost.localdomain".into(),
            secret: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExportConfig {
    /// JSON list of `{name, members}` collections.
    pub collections: Option<PathBuf>,
    pub front: FrontMatter,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub listen: String,
    pub data_dir: PathBuf,
    pub token_ttl_secs: u64,
    /// Reports bucket days in this offset, e.g. `-06:00`.
    pub report_tz: String,
    pub rubric: RubricConfig,
    pub mail: MailConfig,
    pub admin: AdminConfig,
    pub export: ExportConfig,
}

impl Default for Config {
    fn default() -> Self {
        Self {
            listen: "127.0.0.1:8080".into(),
            data_dir: PathBuf::from("data"),
            token_ttl_secs: 8 * 3600,
            report_tz: "+00:00".into(),
            rubric: RubricConfig::default(),
            mail: MailConfig::default(),
            admin: AdminConfig::default(),
            export: ExportConfig::default(),
        }
    }
}

pub const ENV_PREFIX: &str = "NOOS_";

impl Config {
    /// Reads `path` if given, applies overrides from `env`, validates.
    pub fn load(
        path: Option<&Path>,
        env: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Self, ConfigError> {
        let mut cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Read {
                    path: p.display().to_string(),
                    reason: e.to_string(),
                })?;
                Self::parse(&text, &p.display().to_string())?
            }
            None => Self::default(),
        };
        for (key, value) in env {
            if let Some(name) = key.strip_prefix(ENV_PREFIX) {
                cfg.set_env(name, &value)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| {
            let line = e
                .span()
                .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
                .unwrap_or(1);
            ConfigError::Parse {
                path: origin.to_string(),
                line,
                message: e.message().to_string(),
            }
        })
    }

    fn set_env(&mut self, name: &str, value: &str) -> Result<(), ConfigError> {
        let env = |f: &str| format!("{ENV_PREFIX}{f}");
        let number = |f: &str| {
            value
                .parse::<usize>()
                .map_err(|_| field(&env(f), format!("expected a whole number, got {value:?}")))
        };
        match name {
            "LISTEN" => self.listen = value.into(),
            "DATA_DIR" => self.data_dir = value.into(),
            "TOKEN_TTL_SECS" => self.token_ttl_secs = number(name)? as u64,
            "REPORT_TZ" => self.report_tz = value.into(),
            "NEGLIGIBLE_MAX_CHARS" => self.rubric.negligible_max_chars = number(name)?,
            "DEVELOPED_MIN_CHARS" => self.rubric.developed_min_chars = number(name)?,
            "MAIL_SINK" => {
                self.mail.sink = match value {
                    "file" => MailSinkKind::File,
                    "none" => MailSinkKind::None,
                    _ => return Err(field(&env(name), "expected \"file\" or \"none\"")),
                }
            }
            "MAIL_PATH" => self.mail.path = Some(value.into()),
            "ADMIN_ID" => self.admin.id = value.into(),
            "ADMIN_SECRET" => self.admin.secret = Some(value.into()),
            "COLLECTIONS" => self.export.collections = Some(value.into()),
            // NOOS_LOG and friends belong to other layers
            _ => {}
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.listen
            .parse::<std::net::SocketAddr>()
            .map_err(|_| field("listen", format!("{:?} is not host:port", self.listen)))?;
        if self.data_dir.as_os_str().is_empty() {
            return Err(field("data_dir", "must not be empty"));
        }
        if self.token_ttl_secs == 0 {
            return Err(field("token_ttl_secs", "must be positive"));
        }
        self.tz()?;
        self.rubric
            .validate()
            .map_err(|e| field("rubric", e.to_string()))?;
        if self.mail.sink == MailSinkKind::File && self.mail.path.is_none() {
            return Err(field("mail.path", "required when mail.sink = \"file\""));
        }
        UserId::new(self.admin.id.clone()).map_err(|e| field("admin.id", e.to_string()))?;
        if matches!(&self.admin.secret, Some(s) if s.is_empty()) {
            return Err(field("admin.secret", "must not be empty"));
        }
        Ok(())
    }

    pub fn tz(&self) -> Result<FixedOffset, ConfigError> {
        self.report_tz
            .parse()
            .map_err(|_| field("report_tz", format!("{:?} is not an offset like +10:00", self.report_tz)))
    }

    pub fn admin_id(&self) -> UserId {
        UserId::new(self.admin.id.clone()).expect("validated")
    }
}
