//! Materialized state: everything the log implies, folded one record at a time.
//!
//! `apply` is the only way state changes. Live commands and replay both go
//! through it, so a rebuilt state is identical to the live one by
//! construction; the randomized round-trip tests check that claim anyway.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::EngineError;
use crate::event::{Event, EventRecord, RoleChanged, UserCreated};
use crate::ids::{ObjectId, ObjectKind, ObjectRef, UserId};
use crate::model::{
    is_valid_email, Correction, Entry, Message, Notice, Request, Role, Timestamp, User, Watch,
};
use crate::notify::{self, OutboundMail};
use crate::{authority, corrections, discussion, requests};

pub const SNAPSHOT_FORMAT: &str = "noosphere-snapshot";
pub const SNAPSHOT_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct State {
    pub(crate) last_seq: u64,
    pub(crate) last_ts: Option<Timestamp>,
    pub(crate) users: BTreeMap<UserId, User>,
    pub(crate) entries: BTreeMap<ObjectId, Entry>,
    pub(crate) corrections: BTreeMap<ObjectId, Correction>,
    pub(crate) requests: BTreeMap<ObjectId, Request>,
    pub(crate) messages: BTreeMap<ObjectId, Message>,
    /// user -> object key -> watch
    pub(crate) watches: BTreeMap<UserId, BTreeMap<String, Watch>>,
    pub(crate) notices: BTreeMap<ObjectId, Notice>,
}

/// Side effects of applying one record.
#[derive(Debug, Default)]
pub struct Applied {
    pub notices: Vec<ObjectId>,
    pub mail: Vec<OutboundMail>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SnapshotHeader {
    format: String,
    version: u32,
    seq: u64,
}

impl State {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn last_seq(&self) -> u64 {
        self.last_seq
    }

    pub fn last_ts(&self) -> Option<Timestamp> {
        self.last_ts
    }

    /// Validates `record` against the current state without changing it.
    pub fn validate(&self, record: &EventRecord) -> Result<(), EngineError> {
        if record.seq != self.last_seq + 1 {
            return Err(EngineError::SeqConflict {
                expected: self.last_seq + 1,
                got: record.seq,
            });
        }
        if let Some(last) = self.last_ts {
            if record.ts < last {
                return Err(EngineError::MalformedPayload(
                    "timestamp earlier than previous record".into(),
                ));
            }
        }
        let bootstrap = self.users.is_empty();
        if !bootstrap && !self.users.contains_key(&record.actor) {
            return Err(EngineError::UnknownActor(record.actor.clone()));
        }
        let actor = &record.actor;
        let seq = record.seq;
        match &record.event {
            Event::UserCreated(p) => self.check_user_created(actor, p),
            Event::RoleChanged(p) => self.check_role_changed(actor, p),
            Event::EntryCreated(p) => authority::check_created(self, seq, p),
            Event::EntryRevised(p) => authority::check_revised(self, actor, p),
            Event::EntryReviewed(p) => authority::check_reviewed(self, actor, p),
            Event::EntryOrphaned(p) => authority::check_orphaned(self, actor, p),
            Event::EntryForceOrphaned(p) => authority::check_force_orphaned(self, actor, p),
            Event::EntryAdopted(p) => authority::check_adopted(self, p),
            Event::EntryTransferred(p) => authority::check_transferred(self, actor, p),
            Event::EntryDeleted(p) => authority::check_deleted(self, actor, p),
            Event::CorrectionFiled(p) => corrections::check_filed(self, seq, p),
            Event::CorrectionResolved(p) => corrections::check_resolved(self, actor, p),
            Event::RequestCreated(p) => requests::check_created(self, seq, p),
            Event::RequestFulfilled(p) => requests::check_fulfilled(self, actor, p),
            Event::MessagePosted(p) => discussion::check_posted(self, seq, p),
            Event::WatchSet(p) => notify::check_watch_set(self, p),
            Event::WatchRemoved(p) => notify::check_watch_removed(self, actor, p),
            Event::NoticeRead(p) => notify::check_notice_read(self, actor, p),
        }
    }

    /// Validates then folds `record` into the state, fanning out notices.
    /// On error the state is unchanged.
    pub fn apply(&mut self, record: &EventRecord) -> Result<Applied, EngineError> {
        self.validate(record)?;
        let actor = &record.actor;
        let (seq, ts) = (record.seq, record.ts);
        match &record.event {
            Event::UserCreated(p) => {
                self.users.insert(
                    p.user.clone(),
                    User {
                        id: p.user.clone(),
                        name: p.name.trim().to_string(),
                        role: p.role,
                        email: p.email.clone(),
                    },
                );
            }
            Event::RoleChanged(p) => {
                if let Some(u) = self.users.get_mut(&p.user) {
                    u.role = p.role;
                }
            }
            Event::EntryCreated(p) => authority::apply_created(self, actor, seq, ts, p),
            Event::EntryRevised(p) => authority::apply_revised(self, ts, p),
            Event::EntryReviewed(p) => authority::apply_reviewed(self, p),
            Event::EntryOrphaned(p) => authority::apply_orphaned(self, &p.entry),
            Event::EntryForceOrphaned(p) => authority::apply_orphaned(self, &p.entry),
            Event::EntryAdopted(p) => authority::apply_owner(self, &p.entry, actor.clone()),
            Event::EntryTransferred(p) => {
                authority::apply_owner(self, &p.entry, p.recipient.clone())
            }
            Event::EntryDeleted(p) => authority::apply_deleted(self, p),
            Event::CorrectionFiled(p) => corrections::apply_filed(self, actor, seq, ts, p),
            Event::CorrectionResolved(p) => corrections::apply_resolved(self, actor, ts, p),
            Event::RequestCreated(p) => requests::apply_created(self, actor, seq, ts, p),
            Event::RequestFulfilled(p) => requests::apply_fulfilled(self, ts, p),
            Event::MessagePosted(p) => discussion::apply_posted(self, actor, seq, ts, p),
            Event::WatchSet(p) => notify::apply_watch_set(self, actor, p),
            Event::WatchRemoved(p) => notify::apply_watch_removed(self, actor, p),
            Event::NoticeRead(p) => notify::apply_notice_read(self, p),
        }
        self.last_seq = seq;
        self.last_ts = Some(ts);
        Ok(notify::fan_out(self, record))
    }

    fn check_user_created(&self, actor: &UserId, p: &UserCreated) -> Result<(), EngineError> {
        if self.users.is_empty() {
            if actor != &p.user || p.role != Role::Admin {
                return Err(EngineError::Forbidden(
                    "the first account must be an admin created by itself".into(),
                ));
            }
        } else {
            self.require_role(actor, Role::Admin)?;
        }
        if self.users.contains_key(&p.user) {
            return Err(EngineError::DuplicateUser(p.user.clone()));
        }
        if p.name.trim().is_empty() {
            return Err(EngineError::EmptyName);
        }
        if !is_valid_email(&p.email) {
            return Err(EngineError::InvalidEmail(p.email.clone()));
        }
        Ok(())
    }

    fn check_role_changed(&self, actor: &UserId, p: &RoleChanged) -> Result<(), EngineError> {
        self.require_role(actor, Role::Admin)?;
        self.user(&p.user)?;
        Ok(())
    }

    fn require_role(&self, actor: &UserId, role: Role) -> Result<(), EngineError> {
        match self.users.get(actor) {
            Some(u) if u.role == role => Ok(()),
            Some(_) => Err(EngineError::Forbidden(format!(
                "{actor} lacks the {role:?} role"
            ))),
            None => Err(EngineError::UnknownActor(actor.clone())),
        }
    }

    pub(crate) fn is_moderator(&self, user: &UserId) -> bool {
        self.users.get(user).is_some_and(|u| u.role.is_moderator())
    }

    pub fn user(&self, id: &UserId) -> Result<&User, EngineError> {
        self.users
            .get(id)
            .ok_or_else(|| EngineError::UnknownUser(id.clone()))
    }

    pub fn users(&self) -> impl Iterator<Item = &User> {
        self.users.values()
    }

    /// Whether a watch or discussion may point at `obj`.
    pub fn object_exists(&self, obj: &ObjectRef) -> bool {
        match obj.kind {
            ObjectKind::Entry => self.entry(&obj.id).is_ok(),
            ObjectKind::Correction => self.corrections.contains_key(&obj.id),
            ObjectKind::Request => self.requests.contains_key(&obj.id),
            ObjectKind::Message => self.messages.contains_key(&obj.id),
        }
    }

    /// Snapshot file bytes: a header line, then the state as one JSON line.
    pub fn to_snapshot(&self) -> Vec<u8> {
        let header = SnapshotHeader {
            format: SNAPSHOT_FORMAT.into(),
            version: SNAPSHOT_VERSION,
            seq: self.last_seq,
        };
        let mut out = serde_json::to_vec(&header).expect("header serializes");
        out.push(b'\n');
        out.extend(serde_json::to_vec(self).expect("state serializes"));
        out.push(b'\n');
        out
    }

    pub fn from_snapshot(bytes: &[u8]) -> Result<Self, EngineError> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| EngineError::BadSnapshot(format!("not UTF-8: {e}")))?;
        let (head, body) = text
            .split_once('\n')
            .ok_or_else(|| EngineError::BadSnapshot("missing header line".into()))?;
        let header: SnapshotHeader = serde_json::from_str(head)
            .map_err(|e| EngineError::BadSnapshot(format!("header: {e}")))?;
        if header.format != SNAPSHOT_FORMAT {
            return Err(EngineError::BadSnapshot(format!(
                "unknown format {:?}",
                header.format
            )));
        }
        if header.version != SNAPSHOT_VERSION {
            return Err(EngineError::BadSnapshot(format!(
                "unsupported version {}",
                header.version
            )));
        }
        let state: State = serde_json::from_str(body.trim_end())
            .map_err(|e| EngineError::BadSnapshot(format!("body: {e}")))?;
        if state.last_seq != header.seq {
            return Err(EngineError::BadSnapshot(format!(
                "header seq {} disagrees with body seq {}",
                header.seq, state.last_seq
            )));
        }
        Ok(state)
    }
}

/// Folds a whole log into a fresh state. Any record that fails validation is
/// reported as corrupt with its seq.
pub fn rebuild_state(records: &[EventRecord]) -> Result<State, EngineError> {
    let mut state = State::new();
    replay_onto(&mut state, records)?;
    Ok(state)
}

pub(crate) fn replay_onto(state: &mut State, records: &[EventRecord]) -> Result<(), EngineError> {
    for record in records {
        state
            .apply(record)
            .map_err(|e| EngineError::CorruptRecord {
                seq: record.seq,
                reason: format!("{} ({})", e, e.code()),
            })?;
    }
    Ok(())
}
