//! Login secrets and session tokens. Neither ever reaches the event log:
//! verifiers live in `credentials.json` beside it, tokens only in memory.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Duration, Utc};
use noosphere_core::UserId;
use rand::RngCore;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::ServiceError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verifier {
    pub salt: String,
    pub hash: String,
}

impl Verifier {
    pub fn new(secret: &str) -> Self {
        let mut salt = [0u8; 16];
        rand::rng().fill_bytes(&mut salt);
        let salt = hex::encode(salt);
        let hash = digest(&salt, secret);
        Self { salt, hash }
    }

    pub fn matches(&self, secret: &str) -> bool {
        constant_time_eq(digest(&self.salt, secret).as_bytes(), self.hash.as_bytes())
    }
}

fn digest(salt: &str, secret: &str) -> String {
    let mut h = Sha256::new();
    h.update(salt.as_bytes());
    h.update([0u8]);
    h.update(secret.as_bytes());
    hex::encode(h.finalize())
}

fn constant_time_eq(a: &[u8], b: &[u8]) -> bool {
    a.len() == b.len() && a.iter().zip(b).fold(0u8, |acc, (x, y)| acc | (x ^ y)) == 0
}

/// Salted verifiers keyed by user, persisted as pretty JSON.
#[derive(Debug)]
pub struct Credentials {
    path: PathBuf,
    verifiers: Mutex<BTreeMap<UserId, Verifier>>,
    /// Checked for unknown users so both failure paths do the same work.
    decoy: Verifier,
}

impl Credentials {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, ServiceError> {
        let path = path.into();
        let verifiers = match std::fs::read(&path) {
            Ok(bytes) => serde_json::from_slice(&bytes)
                .map_err(|e| ServiceError::Data(format!("{}: {e}", path.display())))?,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => BTreeMap::new(),
            Err(e) => return Err(ServiceError::Data(format!("{}: {e}", path.display()))),
        };
        Ok(Self {
            path,
            verifiers: Mutex::new(verifiers),
            decoy: Verifier::new("decoy"),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn set(&self, user: &UserId, secret: &str) -> Result<(), ServiceError> {
        let mut v = self.verifiers.lock().unwrap();
        v.insert(user.clone(), Verifier::new(secret));
        let bytes = serde_json::to_vec_pretty(&*v).expect("verifiers serialize");
        let tmp = self.path.with_extension("json.tmp");
        std::fs::write(&tmp, bytes)
            .and_then(|_| std::fs::rename(&tmp, &self.path))
            .map_err(|e| ServiceError::Data(format!("{}: {e}", self.path.display())))
    }

    pub fn has(&self, user: &UserId) -> bool {
        self.verifiers.lock().unwrap().contains_key(user)
    }

    pub fn check(&self, user: &UserId, secret: &str) -> bool {
        let v = self.verifiers.lock().unwrap();
        match v.get(user) {
            Some(found) => found.matches(secret),
            None => {
                let _ = self.decoy.matches(secret);
                false
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SessionToken {
    pub token: String,
    pub user: UserId,
    pub expires_at: DateTime<Utc>,
}

#[derive(Debug)]
pub struct Sessions {
    ttl: Duration,
    live: Mutex<HashMap<String, SessionToken>>,
}

impl Sessions {
    pub fn new(ttl_secs: u64) -> Self {
        Self {
            ttl: Duration::seconds(ttl_secs as i64),
            live: Mutex::new(HashMap::new()),
        }
    }

    pub fn issue(&self, user: &UserId, now: DateTime<Utc>) -> SessionToken {
        let mut raw = [0u8; 32];
        rand::rng().fill_bytes(&mut raw);
        let token = SessionToken {
            token: hex::encode(raw),
            user: user.clone(),
            expires_at: now + self.ttl,
        };
        let mut live = self.live.lock().unwrap();
        live.retain(|_, s| s.expires_at > now);
        live.insert(token.token.clone(), token.clone());
        token
    }

    /// The user behind `token`, if it exists and has not expired.
    pub fn resolve(&self, token: &str, now: DateTime<Utc>) -> Option<UserId> {
        let mut live = self.live.lock().unwrap();
        match live.get(token) {
            Some(s) if s.expires_at > now => Some(s.user.clone()),
            Some(_) => {
                live.remove(token);
                None
            }
            None => None,
        }
    }
}
