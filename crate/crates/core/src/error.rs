use thiserror::Error;

use crate::ids::{ObjectId, UserId};

/// Broad grouping of failures, used by front ends to choose a status code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or empty input.
    Invalid,
    /// Referenced object or user does not exist.
    NotFound,
    /// The actor lacks authority for the transition.
    Forbidden,
    /// The object is not in a state that admits the transition.
    Conflict,
    /// The log or a stored artifact could not be read or written.
    Storage,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid identifier {0:?}")]
    InvalidId(String),
    #[error("unknown actor {0}")]
    UnknownActor(UserId),
    #[error("unknown user {0}")]
    UnknownUser(UserId),
    #[error("unknown recipient {0}")]
    UnknownRecipient(UserId),
    #[error("user {0} already exists")]
    DuplicateUser(UserId),
    #[error("display name must not be empty")]
    EmptyName,
    #[error("invalid e-mail address {0:?}")]
    InvalidEmail(String),
    #[error("{0}")]
    Forbidden(String),

    #[error("title must not be empty")]
    EmptyTitle,
    #[error("entry {0} does not exist")]
    EntryMissing(ObjectId),
    #[error("actor is not the owner of entry {0}")]
    NotOwner(ObjectId),
    #[error("entry {0} is orphaned; adopt it first")]
    OrphanedEntry(ObjectId),
    #[error("entry {0} is already orphaned")]
    AlreadyOrphaned(ObjectId),
    #[error("entry {0} is not orphaned")]
    NotOrphaned(ObjectId),
    #[error("cannot transfer an entry to its current owner")]
    SelfTransfer,
    #[error("entry {entry} is at revision {actual}, not {expected}")]
    RevisionConflict {
        entry: ObjectId,
        expected: u64,
        actual: u64,
    },

    #[error("correction {0} does not exist")]
    CorrectionMissing(ObjectId),
    #[error("correction text must not be empty")]
    EmptyText,
    #[error("correction {0} is already resolved")]
    AlreadyResolved(ObjectId),
    #[error("resolution action and note must not be empty")]
    EmptyAction,

    #[error("request {0} does not exist")]
    RequestMissing(ObjectId),
    #[error("request {0} is already filled")]
    AlreadyFilled(ObjectId),
    #[error("actor does not own entry {0}")]
    NotEntryOwner(ObjectId),

    #[error("discussion target {0} does not exist")]
    UnknownTarget(String),
    #[error("thread anchor {0} does not exist")]
    UnknownAnchor(String),
    #[error("message body must not be empty")]
    EmptyBody,

    #[error("object {0} does not exist")]
    UnknownObject(String),
    #[error("a watch needs at least one channel")]
    EmptyChannels,
    #[error("no watch on {0}")]
    NoSuchWatch(String),
    #[error("notice {0} does not exist")]
    NoticeMissing(ObjectId),
    #[error("notice {0} belongs to another user")]
    NotYourNotice(ObjectId),

    #[error("unknown event kind {0:?}")]
    UnknownEventKind(String),
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("log expected seq {expected}, got {got}")]
    SeqConflict { expected: u64, got: u64 },
    #[error("corrupt record at seq {seq}: {reason}")]
    CorruptRecord { seq: u64, reason: String },
    #[error("storage failure: {0}")]
    Storage(String),
    #[error("snapshot rejected: {0}")]
    BadSnapshot(String),

    #[error("invalid day range: {from} is after {to}")]
    InvalidRange { from: String, to: String },
    #[error("invalid rubric: {0}")]
    InvalidRubric(String),
    #[error("unsupported format {0:?}")]
    UnsupportedFormat(String),
    #[error("invalid collection: {0}")]
    InvalidCollection(String),
}

impl EngineError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        use EngineError::*;
        match self {
            InvalidId(_) => "invalid-id",
            UnknownActor(_) => "unknown-actor",
            UnknownUser(_) => "unknown-user",
            UnknownRecipient(_) => "unknown-recipient",
            DuplicateUser(_) => "duplicate-user",
            EmptyName => "empty-name",
            InvalidEmail(_) => "invalid-email",
            Forbidden(_) => "forbidden",
            EmptyTitle => "empty-title",
            EntryMissing(_) => "entry-missing",
            NotOwner(_) => "not-owner",
            OrphanedEntry(_) => "orphaned-entry",
            AlreadyOrphaned(_) => "already-orphaned",
            NotOrphaned(_) => "not-orphaned",
            SelfTransfer => "self-transfer",
            RevisionConflict { .. } => "revision-conflict",
            CorrectionMissing(_) => "correction-missing",
            EmptyText => "empty-text",
            AlreadyResolved(_) => "already-resolved",
            EmptyAction => "empty-action",
            RequestMissing(_) => "request-missing",
            AlreadyFilled(_) => "already-filled",
            NotEntryOwner(_) => "not-entry-owner",
            UnknownTarget(_) => "unknown-target",
            UnknownAnchor(_) => "unknown-anchor",
            EmptyBody => "empty-body",
            UnknownObject(_) => "unknown-object",
            EmptyChannels => "empty-channels",
            NoSuchWatch(_) => "no-such-watch",
            NoticeMissing(_) => "notice-missing",
            NotYourNotice(_) => "not-your-notice",
            UnknownEventKind(_) => "unknown-event-kind",
            MalformedPayload(_) => "malformed-payload",
            SeqConflict { .. } => "seq-conflict",
            CorruptRecord { .. } => "corrupt-record",
            Storage(_) => "storage-failure",
            BadSnapshot(_) => "bad-snapshot",
            InvalidRange { .. } => "invalid-range",
            InvalidRubric(_) => "invalid-rubric",
            UnsupportedFormat(_) => "unsupported-format",
            InvalidCollection(_) => "invalid-collection",
        }
    }

    pub fn class(&self) -> ErrorClass {
        use EngineError::*;
        match self {
            InvalidId(_) | EmptyName | InvalidEmail(_) | EmptyTitle | EmptyText | EmptyAction
            | EmptyBody | EmptyChannels | UnknownEventKind(_) | MalformedPayload(_)
            | InvalidRange { .. } | InvalidRubric(_) | UnsupportedFormat(_)
            | InvalidCollection(_) | SelfTransfer => ErrorClass::Invalid,
            UnknownActor(_) | UnknownUser(_) | UnknownRecipient(_) | EntryMissing(_)
            | CorrectionMissing(_) | RequestMissing(_) | UnknownTarget(_) | UnknownAnchor(_)
            | UnknownObject(_) | NoSuchWatch(_) | NoticeMissing(_) => ErrorClass::NotFound,
            Forbidden(_) | NotOwner(_) | NotEntryOwner(_) | NotYourNotice(_) => {
                ErrorClass::Forbidden
            }
            DuplicateUser(_) | OrphanedEntry(_) | AlreadyOrphaned(_) | NotOrphaned(_)
            | RevisionConflict { .. } | AlreadyResolved(_) | AlreadyFilled(_)
            | SeqConflict { .. } => ErrorClass::Conflict,
            CorruptRecord { .. } | Storage(_) | BadSnapshot(_) => ErrorClass::Storage,
        }
    }
}

pub type Result<T, E = EngineError> = std::result::Result<T, E>;
