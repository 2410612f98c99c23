//! Identifiers for users and stored objects.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;

/// Longest identifier accepted anywhere in the system.
pub const MAX_ID_LEN: usize = 64;

fn is_url_safe(s: &str) -> bool {
    !s.is_empty()
        && s.len() <= MAX_ID_LEN
        && s
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'-' | b'_' | b'.' | b'~'))
}

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(try_from = "String", into = "String")]
        pub struct $name(String);

        impl $name {
            pub fn new(raw: impl Into<String>) -> Result<Self, EngineError> {
                let raw = raw.into();
                if is_url_safe(&raw) {
                    Ok(Self(raw))
                } else {
                    Err(EngineError::InvalidId(raw))
                }
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl TryFrom<String> for $name {
            type Error = EngineError;

            fn try_from(raw: String) -> Result<Self, Self::Error> {
                Self::new(raw)
            }
        }

        impl From<$name> for String {
            fn from(id: $name) -> String {
                id.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl std::str::FromStr for $name {
            type Err = EngineError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                Self::new(s)
            }
        }
    };
}

id_type!(
    /// Registered user handle, chosen by whoever creates the account.
    UserId
);
id_type!(
    /// Engine-assigned object identifier. Derived from the sequence number of
    /// the creating event, so an id is never handed out twice.
    ObjectId
);

impl ObjectId {
    pub(crate) fn minted(kind: ObjectKind, seq: u64) -> Self {
        Self(format!("{}{}", kind.prefix(), seq))
    }

    /// The `index`-th notice produced by event `seq`.
    pub(crate) fn notice(seq: u64, index: usize) -> Self {
        Self(format!("n{seq}.{index}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Entry,
    Correction,
    Request,
    Message,
}

impl ObjectKind {
    fn prefix(self) -> &'static str {
        match self {
            ObjectKind::Entry => "e",
            ObjectKind::Correction => "c",
            ObjectKind::Request => "r",
            ObjectKind::Message => "m",
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Entry => "entry",
            ObjectKind::Correction => "correction",
            ObjectKind::Request => "request",
            ObjectKind::Message => "message",
        }
    }
}

impl std::str::FromStr for ObjectKind {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entry" => Ok(ObjectKind::Entry),
            "correction" => Ok(ObjectKind::Correction),
            "request" => Ok(ObjectKind::Request),
            "message" => Ok(ObjectKind::Message),
            other => Err(EngineError::InvalidId(other.to_string())),
        }
    }
}

/// Typed pointer to an entry, correction, request or message.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ObjectRef {
    pub kind: ObjectKind,
    pub id: ObjectId,
}

impl ObjectRef {
    pub fn new(kind: ObjectKind, id: ObjectId) -> Self {
        Self { kind, id }
    }

    pub fn entry(id: ObjectId) -> Self {
        Self::new(ObjectKind::Entry, id)
    }

    pub fn correction(id: ObjectId) -> Self {
        Self::new(ObjectKind::Correction, id)
    }

    pub fn request(id: ObjectId) -> Self {
        Self::new(ObjectKind::Request, id)
    }

    pub fn message(id: ObjectId) -> Self {
        Self::new(ObjectKind::Message, id)
    }

    /// `kind:id`, used as a map key and in query strings.
    pub fn key(&self) -> String {
        format!("{}:{}", self.kind.as_str(), self.id)
    }

    pub fn parse_key(key: &str) -> Result<Self, EngineError> {
        let (kind, id) = key
            .split_once(':')
            .ok_or_else(|| EngineError::InvalidId(key.to_string()))?;
        Ok(Self::new(kind.parse()?, id.parse()?))
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.kind.as_str(), self.id)
    }
}
