//! Materialized domain objects.

use std::collections::BTreeSet;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::ids::{ObjectId, ObjectRef, UserId};

pub type Timestamp = DateTime<Utc>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Student,
    Instructor,
    Auditor,
    Admin,
}

impl Role {
    /// Instructors and admins may override owner-only transitions.
    pub fn is_moderator(self) -> bool {
        matches!(self, Role::Instructor | Role::Admin)
    }
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Student => "student",
            Role::Instructor => "instructor",
            Role::Auditor => "auditor",
            Role::Admin => "admin",
        }
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "student" => Ok(Role::Student),
            "instructor" => Ok(Role::Instructor),
            "auditor" => Ok(Role::Auditor),
            "admin" => Ok(Role::Admin),
            other => Err(format!("unknown role {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct User {
    pub id: UserId,
    pub name: String,
    pub role: Role,
    pub email: String,
}

/// Syntactic check only: one `@`, nonempty local part, a dot in the domain.
pub fn is_valid_email(email: &str) -> bool {
    let Some((local, domain)) = email.split_once('@') else {
        return false;
    };
    !local.is_empty()
        && !domain.contains('@')
        && domain.contains('.')
        && !domain.starts_with('.')
        && !domain.ends_with('.')
        && !email.chars().any(char::is_whitespace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryKind {
    Concept,
    Theorem,
    Proof,
    Example,
    Exercise,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewState {
    Unreviewed,
    NeedsWork,
    Approved,
}

/// Either a single owning user or the orphaned marker. Never both.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Owner {
    User(UserId),
    Orphaned,
}

impl Owner {
    pub fn user(&self) -> Option<&UserId> {
        match self {
            Owner::User(u) => Some(u),
            Owner::Orphaned => None,
        }
    }

    pub fn is_orphaned(&self) -> bool {
        matches!(self, Owner::Orphaned)
    }

    pub fn is(&self, user: &UserId) -> bool {
        self.user() == Some(user)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub id: ObjectId,
    pub title: String,
    pub synonyms: Vec<String>,
    pub kind: EntryKind,
    pub content: String,
    pub owner: Owner,
    pub creator: UserId,
    pub created_at: Timestamp,
    pub updated_at: Timestamp,
    /// Sequence number of the creating event; orders entries by age.
    pub created_seq: u64,
    pub revision: u64,
    pub review_state: ReviewState,
    pub deleted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Improvement,
    Style,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionState {
    Open,
    Resolved,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Correction {
    pub id: ObjectId,
    pub entry: ObjectId,
    pub filer: UserId,
    pub text: String,
    pub severity: Severity,
    pub state: CorrectionState,
    pub action_taken: Option<String>,
    pub resolution_note: Option<String>,
    pub resolved_by: Option<UserId>,
    pub filed_at: Timestamp,
    pub resolved_at: Option<Timestamp>,
    pub filed_seq: u64,
}

impl Correction {
    pub fn is_open(&self) -> bool {
        self.state == CorrectionState::Open
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestState {
    Active,
    Filled,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Request {
    pub id: ObjectId,
    pub title: String,
    pub description: String,
    pub creator: UserId,
    pub state: RequestState,
    pub filled_by: Option<ObjectId>,
    pub filled_at: Option<Timestamp>,
    pub created_at: Timestamp,
    pub created_seq: u64,
}

/// What a message hangs off: a core object for roots, another message for replies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parent {
    Object(ObjectRef),
    Message(ObjectId),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub id: ObjectId,
    pub parent: Parent,
    /// The core object at the root of this message's thread.
    pub root: ObjectRef,
    pub author: UserId,
    pub subject: Option<String>,
    pub body: String,
    pub posted_at: Timestamp,
    pub posted_seq: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    Inbox,
    Email,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Watch {
    pub user: UserId,
    pub object: ObjectRef,
    pub channels: BTreeSet<Channel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoticeCause {
    Implicit,
    Watch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Notice {
    pub id: ObjectId,
    pub user: UserId,
    pub event_seq: u64,
    pub cause: NoticeCause,
    pub summary: String,
    pub read: bool,
    pub created_at: Timestamp,
}
