//! The closed set of events the engine records, and the log record wrapper.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::ids::{ObjectId, ObjectRef, UserId};
use crate::model::{Channel, EntryKind, ReviewState, Role, Severity, Timestamp};

/// One line of the event log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventRecord {
    pub seq: u64,
    pub ts: Timestamp,
    pub actor: UserId,
    #[serde(flatten)]
    pub event: Event,
}

impl EventRecord {
    pub fn kind(&self) -> &'static str {
        self.event.kind()
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("event records always serialize")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload")]
pub enum Event {
    #[serde(rename = "user.created")]
    UserCreated(UserCreated),
    #[serde(rename = "user.role_changed")]
    RoleChanged(RoleChanged),
    #[serde(rename = "entry.created")]
    EntryCreated(EntryCreated),
    #[serde(rename = "entry.revised")]
    EntryRevised(EntryRevised),
    #[serde(rename = "entry.reviewed")]
    EntryReviewed(EntryReviewed),
    #[serde(rename = "entry.orphaned")]
    EntryOrphaned(EntryTarget),
    #[serde(rename = "entry.force_orphaned")]
    EntryForceOrphaned(EntryForceOrphaned),
    #[serde(rename = "entry.adopted")]
    EntryAdopted(EntryTarget),
    #[serde(rename = "entry.transferred")]
    EntryTransferred(EntryTransferred),
    #[serde(rename = "entry.deleted")]
    EntryDeleted(EntryTarget),
    #[serde(rename = "correction.filed")]
    CorrectionFiled(CorrectionFiled),
    #[serde(rename = "correction.resolved")]
    CorrectionResolved(CorrectionResolved),
    #[serde(rename = "request.created")]
    RequestCreated(RequestCreated),
    #[serde(rename = "request.fulfilled")]
    RequestFulfilled(RequestFulfilled),
    #[serde(rename = "message.posted")]
    MessagePosted(MessagePosted),
    #[serde(rename = "watch.set")]
    WatchSet(WatchSet),
    #[serde(rename = "watch.removed")]
    WatchRemoved(WatchRemoved),
    #[serde(rename = "notice.read")]
    NoticeRead(NoticeRead),
}

/// Every event name the log accepts.
pub const EVENT_KINDS: &[&str] = &[
    "user.created",
    "user.role_changed",
    "entry.created",
    "entry.revised",
    "entry.reviewed",
    "entry.orphaned",
    "entry.force_orphaned",
    "entry.adopted",
    "entry.transferred",
    "entry.deleted",
    "correction.filed",
    "correction.resolved",
    "request.created",
    "request.fulfilled",
    "message.posted",
    "watch.set",
    "watch.removed",
    "notice.read",
];

impl Event {
    pub fn kind(&self) -> &'static str {
        match self {
            Event::UserCreated(_) => "user.created",
            Event::RoleChanged(_) => "user.role_changed",
            Event::EntryCreated(_) => "entry.created",
            Event::EntryRevised(_) => "entry.revised",
            Event::EntryReviewed(_) => "entry.reviewed",
            Event::EntryOrphaned(_) => "entry.orphaned",
            Event::EntryForceOrphaned(_) => "entry.force_orphaned",
            Event::EntryAdopted(_) => "entry.adopted",
            Event::EntryTransferred(_) => "entry.transferred",
            Event::EntryDeleted(_) => "entry.deleted",
            Event::CorrectionFiled(_) => "correction.filed",
            Event::CorrectionResolved(_) => "correction.resolved",
            Event::RequestCreated(_) => "request.created",
            Event::RequestFulfilled(_) => "request.fulfilled",
            Event::MessagePosted(_) => "message.posted",
            Event::WatchSet(_) => "watch.set",
            Event::WatchRemoved(_) => "watch.removed",
            Event::NoticeRead(_) => "notice.read",
        }
    }

    /// Builds an event from its name and a JSON payload.
    pub fn from_parts(kind: &str, payload: serde_json::Value) -> Result<Self, EngineError> {
        if !EVENT_KINDS.contains(&kind) {
            return Err(EngineError::UnknownEventKind(kind.to_string()));
        }
        let tagged = serde_json::json!({ "kind": kind, "payload": payload });
        serde_json::from_value(tagged).map_err(|e| EngineError::MalformedPayload(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UserCreated {
    pub user: UserId,
    pub name: String,
    pub role: Role,
    pub email: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoleChanged {
    pub user: UserId,
    pub role: Role,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryCreated {
    pub entry: ObjectId,
    pub title: String,
    #[serde(default)]
    pub synonyms: Vec<String>,
    pub kind: EntryKind,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryRevised {
    pub entry: ObjectId,
    pub revision: u64,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryReviewed {
    pub entry: ObjectId,
    pub review_state: ReviewState,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryTarget {
    pub entry: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryForceOrphaned {
    pub entry: ObjectId,
    pub previous_owner: UserId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntryTransferred {
    pub entry: ObjectId,
    pub recipient: UserId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionFiled {
    pub correction: ObjectId,
    pub entry: ObjectId,
    pub text: String,
    pub severity: Severity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrectionResolved {
    pub correction: ObjectId,
    pub action: String,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestCreated {
    pub request: ObjectId,
    pub title: String,
    #[serde(default)]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RequestFulfilled {
    pub request: ObjectId,
    pub entry: ObjectId,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MessagePosted {
    pub message: ObjectId,
    /// A core object for a new thread, or a message for a reply.
    pub target: ObjectRef,
    #[serde(default)]
    pub subject: Option<String>,
    pub body: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatchSet {
    pub object: ObjectRef,
    pub channels: BTreeSet<Channel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WatchRemoved {
    pub object: ObjectRef,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoticeRead {
    pub notice: ObjectId,
}
