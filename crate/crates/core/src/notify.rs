//! Notices: implicit recipients by event kind, plus user watches, fanned out
//! inside the same state transition as the event itself. E-mail copies are
//! queued to a pluggable sink and retried until delivered.
//!
//! Implicit recipients:
//! - correction filed: the entry's owner
//! - correction resolved: the filer
//! - reply to a message: the parent message's author
//! - request filled: the request's creator
//!
//! Watches cover revisions, ownership changes, corrections filed or resolved,
//! messages posted and requests filled. Each user gets at most one notice per
//! event, and the actor never gets one for their own event.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{Event, EventRecord, NoticeRead, WatchRemoved, WatchSet};
use crate::ids::{ObjectId, ObjectKind, ObjectRef, UserId};
use crate::model::{Channel, Notice, NoticeCause, Parent, Watch};
use crate::state::{Applied, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InboxFilter {
    Unread,
    #[default]
    All,
}

/// One outbound e-mail, also the line format of the file sink.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutboundMail {
    pub to: String,
    pub subject: String,
    pub body: String,
    pub event_seq: u64,
}

#[derive(Debug, thiserror::Error)]
#[error("mail sink: {0}")]
pub struct SinkError(pub String);

pub trait MailSink: Send {
    fn deliver(&mut self, mail: &OutboundMail) -> Result<(), SinkError>;
}

/// Drops everything.
#[derive(Debug, Default)]
pub struct NullSink;

impl MailSink for NullSink {
    fn deliver(&mut self, _mail: &OutboundMail) -> Result<(), SinkError> {
        Ok(())
    }
}

/// Appends one JSON object per message to a file.
#[derive(Debug)]
pub struct FileSink {
    path: PathBuf,
}

impl FileSink {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }
}

impl MailSink for FileSink {
    fn deliver(&mut self, mail: &OutboundMail) -> Result<(), SinkError> {
        let mut line = serde_json::to_string(mail).map_err(|e| SinkError(e.to_string()))?;
        line.push('\n');
        OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .and_then(|mut f| f.write_all(line.as_bytes()))
            .map_err(|e| SinkError(format!("{}: {e}", self.path.display())))
    }
}

/// Collects mail in memory; clones share the buffer.
#[derive(Debug, Clone, Default)]
pub struct MemorySink {
    sent: Arc<Mutex<Vec<OutboundMail>>>,
}

impl MemorySink {
    pub fn sent(&self) -> Vec<OutboundMail> {
        self.sent.lock().unwrap().clone()
    }
}

impl MailSink for MemorySink {
    fn deliver(&mut self, mail: &OutboundMail) -> Result<(), SinkError> {
        self.sent.lock().unwrap().push(mail.clone());
        Ok(())
    }
}

/// FIFO retry queue in front of a sink. Delivery stops at the first failure
/// so order is preserved; failed mail waits for the next attempt.
pub(crate) struct Outbox {
    sink: Box<dyn MailSink>,
    queue: VecDeque<OutboundMail>,
}

impl Outbox {
    pub(crate) fn new(sink: Box<dyn MailSink>) -> Self {
        Self {
            sink,
            queue: VecDeque::new(),
        }
    }

    pub(crate) fn set_sink(&mut self, sink: Box<dyn MailSink>) {
        self.sink = sink;
    }

    pub(crate) fn enqueue(&mut self, mail: Vec<OutboundMail>) {
        self.queue.extend(mail);
    }

    pub(crate) fn deliver(&mut self) {
        while let Some(mail) = self.queue.front() {
            if self.sink.deliver(mail).is_err() {
                break;
            }
            self.queue.pop_front();
        }
    }

    pub(crate) fn pending(&self) -> usize {
        self.queue.len()
    }
}

// ---- watch / notice events -----------------------------------------------

pub(crate) fn check_watch_set(state: &State, p: &WatchSet) -> Result<(), EngineError> {
    if !state.object_exists(&p.object) {
        return Err(EngineError::UnknownObject(p.object.key()));
    }
    if p.channels.is_empty() {
        return Err(EngineError::EmptyChannels);
    }
    Ok(())
}

pub(crate) fn check_watch_removed(
    state: &State,
    actor: &UserId,
    p: &WatchRemoved,
) -> Result<(), EngineError> {
    state
        .watches
        .get(actor)
        .and_then(|w| w.get(&p.object.key()))
        .map(|_| ())
        .ok_or_else(|| EngineError::NoSuchWatch(p.object.key()))
}

pub(crate) fn check_notice_read(
    state: &State,
    actor: &UserId,
    p: &NoticeRead,
) -> Result<(), EngineError> {
    let n = state
        .notices
        .get(&p.notice)
        .ok_or_else(|| EngineError::NoticeMissing(p.notice.clone()))?;
    if &n.user != actor {
        return Err(EngineError::NotYourNotice(p.notice.clone()));
    }
    Ok(())
}

pub(crate) fn apply_watch_set(state: &mut State, actor: &UserId, p: &WatchSet) {
    state.watches.entry(actor.clone()).or_default().insert(
        p.object.key(),
        Watch {
            user: actor.clone(),
            object: p.object.clone(),
            channels: p.channels.clone(),
        },
    );
}

pub(crate) fn apply_watch_removed(state: &mut State, actor: &UserId, p: &WatchRemoved) {
    if let Some(w) = state.watches.get_mut(actor) {
        w.remove(&p.object.key());
        if w.is_empty() {
            state.watches.remove(actor);
        }
    }
}

pub(crate) fn apply_notice_read(state: &mut State, p: &NoticeRead) {
    if let Some(n) = state.notices.get_mut(&p.notice) {
        n.read = true;
    }
}

// ---- fan-out ---------------------------------------------------------------

fn implicit_recipients(state: &State, record: &EventRecord) -> Vec<UserId> {
    match &record.event {
        Event::CorrectionFiled(p) => state
            .entries
            .get(&p.entry)
            .and_then(|e| e.owner.user().cloned())
            .into_iter()
            .collect(),
        Event::CorrectionResolved(p) => state
            .corrections
            .get(&p.correction)
            .map(|c| c.filer.clone())
            .into_iter()
            .collect(),
        Event::MessagePosted(p) if p.target.kind == ObjectKind::Message => state
            .messages
            .get(&p.target.id)
            .map(|m| m.author.clone())
            .into_iter()
            .collect(),
        Event::RequestFulfilled(p) => state
            .requests
            .get(&p.request)
            .map(|r| r.creator.clone())
            .into_iter()
            .collect(),
        _ => Vec::new(),
    }
}

/// Objects whose watchers hear about this event.
fn watch_subjects(state: &State, record: &EventRecord) -> Vec<ObjectRef> {
    match &record.event {
        Event::EntryRevised(p) => vec![ObjectRef::entry(p.entry.clone())],
        Event::EntryOrphaned(p) | Event::EntryAdopted(p) => vec![ObjectRef::entry(p.entry.clone())],
        Event::EntryForceOrphaned(p) => vec![ObjectRef::entry(p.entry.clone())],
        Event::EntryTransferred(p) => vec![ObjectRef::entry(p.entry.clone())],
        Event::CorrectionFiled(p) => vec![ObjectRef::entry(p.entry.clone())],
        Event::CorrectionResolved(p) => {
            let mut out = vec![ObjectRef::correction(p.correction.clone())];
            if let Some(c) = state.corrections.get(&p.correction) {
                out.push(ObjectRef::entry(c.entry.clone()));
            }
            out
        }
        Event::MessagePosted(p) => {
            // the target, every ancestor message, and the thread's core object
            let mut out = Vec::new();
            let mut cur = p.target.clone();
            loop {
                out.push(cur.clone());
                if cur.kind != ObjectKind::Message {
                    break;
                }
                match state.messages.get(&cur.id).map(|m| &m.parent) {
                    Some(Parent::Message(id)) => cur = ObjectRef::message(id.clone()),
                    Some(Parent::Object(o)) => cur = o.clone(),
                    None => break,
                }
            }
            out
        }
        Event::RequestFulfilled(p) => vec![
            ObjectRef::request(p.request.clone()),
            ObjectRef::entry(p.entry.clone()),
        ],
        _ => Vec::new(),
    }
}

fn entry_title(state: &State, id: &ObjectId) -> String {
    state
        .entries
        .get(id)
        .map_or_else(|| id.to_string(), |e| e.title.clone())
}

fn summarize(state: &State, record: &EventRecord) -> String {
    let actor = &record.actor;
    match &record.event {
        Event::EntryRevised(p) => format!(
            "\"{}\" was revised by {actor} (revision {})",
            entry_title(state, &p.entry),
            p.revision
        ),
        Event::EntryOrphaned(p) => {
            format!("\"{}\" was orphaned by {actor}", entry_title(state, &p.entry))
        }
        Event::EntryForceOrphaned(p) => format!(
            "\"{}\" was orphaned by {actor} (previous owner {})",
            entry_title(state, &p.entry),
            p.previous_owner
        ),
        Event::EntryAdopted(p) => {
            format!("\"{}\" was adopted by {actor}", entry_title(state, &p.entry))
        }
        Event::EntryTransferred(p) => format!(
            "\"{}\" was transferred from {actor} to {}",
            entry_title(state, &p.entry),
            p.recipient
        ),
        Event::CorrectionFiled(p) => format!(
            "{actor} filed a correction on \"{}\": {}",
            entry_title(state, &p.entry),
            p.text
        ),
        Event::CorrectionResolved(p) => {
            let title = state
                .corrections
                .get(&p.correction)
                .map_or_else(String::new, |c| entry_title(state, &c.entry));
            format!(
                "{actor} resolved correction {} on \"{title}\". Action taken: {}. Why: {}",
                p.correction, p.action, p.note
            )
        }
        Event::MessagePosted(p) => {
            let what = if p.target.kind == ObjectKind::Message {
                "replied to your message"
            } else {
                "posted a message"
            };
            match &p.subject {
                Some(s) => format!("{actor} {what} on {}: {s}", p.target),
                None => format!("{actor} {what} on {}", p.target),
            }
        }
        Event::RequestFulfilled(p) => {
            let title = state
                .requests
                .get(&p.request)
                .map_or_else(|| p.request.to_string(), |r| r.title.clone());
            format!(
                "Request \"{title}\" was filled by {actor} with \"{}\"",
                entry_title(state, &p.entry)
            )
        }
        other => format!("{actor}: {}", other.kind()),
    }
}

#[derive(Debug, Clone, Copy)]
struct Delivery {
    cause: NoticeCause,
    inbox: bool,
    email: bool,
}

/// Creates the notices for `record` (already folded into `state`) and
/// returns the e-mail copies to send.
pub(crate) fn fan_out(state: &mut State, record: &EventRecord) -> Applied {
    let mut plan: BTreeMap<UserId, Delivery> = BTreeMap::new();
    for user in implicit_recipients(state, record) {
        plan.insert(
            user,
            Delivery {
                cause: NoticeCause::Implicit,
                inbox: true,
                email: true,
            },
        );
    }
    let subjects: BTreeSet<String> = watch_subjects(state, record)
        .iter()
        .map(ObjectRef::key)
        .collect();
    if !subjects.is_empty() {
        for (user, watches) in &state.watches {
            for key in &subjects {
                let Some(w) = watches.get(key) else { continue };
                let inbox = w.channels.contains(&Channel::Inbox);
                let email = w.channels.contains(&Channel::Email);
                plan.entry(user.clone())
                    .and_modify(|d| {
                        d.inbox |= inbox;
                        d.email |= email;
                    })
                    .or_insert(Delivery {
                        cause: NoticeCause::Watch,
                        inbox,
                        email,
                    });
            }
        }
    }
    plan.remove(&record.actor);
    if plan.is_empty() {
        return Applied::default();
    }

    let summary = summarize(state, record);
    let mut applied = Applied::default();
    for (user, d) in plan {
        if d.inbox {
            let id = ObjectId::notice(record.seq, applied.notices.len());
            state.notices.insert(
                id.clone(),
                Notice {
                    id: id.clone(),
                    user: user.clone(),
                    event_seq: record.seq,
                    cause: d.cause,
                    summary: summary.clone(),
                    read: false,
                    created_at: record.ts,
                },
            );
            applied.notices.push(id);
        }
        if d.email {
            if let Some(u) = state.users.get(&user) {
                applied.mail.push(OutboundMail {
                    to: u.email.clone(),
                    subject: format!("[noosphere] {}", record.kind()),
                    body: summary.clone(),
                    event_seq: record.seq,
                });
            }
        }
    }
    applied
}

// ---- queries -------------------------------------------------------------

impl State {
    pub fn notice(&self, id: &ObjectId) -> Result<&Notice, EngineError> {
        self.notices
            .get(id)
            .ok_or_else(|| EngineError::NoticeMissing(id.clone()))
    }

    pub fn notices(&self) -> impl Iterator<Item = &Notice> {
        self.notices.values()
    }

    /// A user's notices, newest first.
    pub fn inbox(&self, user: &UserId, filter: InboxFilter) -> Result<Vec<&Notice>, EngineError> {
        self.user(user)?;
        let mut out: Vec<&Notice> = self
            .notices
            .values()
            .filter(|n| &n.user == user && (filter == InboxFilter::All || !n.read))
            .collect();
        out.sort_by(|a, b| b.event_seq.cmp(&a.event_seq).then_with(|| b.id.cmp(&a.id)));
        Ok(out)
    }

    pub fn watches_of(&self, user: &UserId) -> Vec<&Watch> {
        self.watches
            .get(user)
            .map(|w| w.values().collect())
            .unwrap_or_default()
    }
}

impl Engine {
    /// Registers or updates the caller's watch on `object`.
    pub fn add_watch(
        &self,
        user: &UserId,
        object: &ObjectRef,
        channels: impl IntoIterator<Item = Channel>,
    ) -> Result<Watch, EngineError> {
        let channels: BTreeSet<Channel> = channels.into_iter().collect();
        let (_, state) = self.commit(user, |_, _| {
            Ok(Event::WatchSet(WatchSet {
                object: object.clone(),
                channels,
            }))
        })?;
        Ok(state.watches[user][&object.key()].clone())
    }

    pub fn remove_watch(&self, user: &UserId, object: &ObjectRef) -> Result<(), EngineError> {
        self.commit(user, |_, _| {
            Ok(Event::WatchRemoved(WatchRemoved {
                object: object.clone(),
            }))
        })?;
        Ok(())
    }

    pub fn inbox(&self, user: &UserId, filter: InboxFilter) -> Result<Vec<Notice>, EngineError> {
        Ok(self
            .snapshot()
            .inbox(user, filter)?
            .into_iter()
            .cloned()
            .collect())
    }

    /// Marks a notice read. Repeating the call is harmless.
    pub fn mark_read(&self, user: &UserId, notice: &ObjectId) -> Result<Notice, EngineError> {
        let (_, state) = self.commit(user, |_, _| {
            Ok(Event::NoticeRead(NoticeRead {
                notice: notice.clone(),
            }))
        })?;
        Ok(state.notice(notice)?.clone())
    }
}
