//! The single-writer front door over the log and the materialized state.

use std::sync::{Arc, Mutex, RwLock};

use crate::clock::{Clock, SystemClock};
use crate::error::EngineError;
use crate::event::{Event, EventRecord};
use crate::ids::UserId;
use crate::notify::{MailSink, NullSink, Outbox};
use crate::state::{replay_onto, State};
use crate::store::{LogStore, MemoryLog};

struct Writer {
    log: Box<dyn LogStore>,
    clock: Arc<dyn Clock>,
}

/// Serializes every mutation through one writer. Reads take an `Arc<State>`
/// snapshot and never block behind a command that is still validating.
pub struct Engine {
    writer: Mutex<Writer>,
    state: RwLock<Arc<State>>,
    records: RwLock<Vec<EventRecord>>,
    outbox: Mutex<Outbox>,
}

impl std::fmt::Debug for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Engine")
            .field("last_seq", &self.snapshot().last_seq())
            .finish()
    }
}

impl Engine {
    pub fn new(log: Box<dyn LogStore>, clock: Arc<dyn Clock>) -> Self {
        Self {
            writer: Mutex::new(Writer { log, clock }),
            state: RwLock::new(Arc::new(State::new())),
            records: RwLock::new(Vec::new()),
            outbox: Mutex::new(Outbox::new(Box::new(NullSink))),
        }
    }

    pub fn in_memory(clock: Arc<dyn Clock>) -> Self {
        Self::new(Box::new(MemoryLog::new()), clock)
    }

    /// Rebuilds from records that `log` already holds.
    pub fn from_records(
        log: Box<dyn LogStore>,
        clock: Arc<dyn Clock>,
        records: Vec<EventRecord>,
    ) -> Result<Self, EngineError> {
        Self::from_snapshot(log, clock, State::new(), records)
    }

    /// Starts from a snapshot and applies the records past its seq.
    pub fn from_snapshot(
        log: Box<dyn LogStore>,
        clock: Arc<dyn Clock>,
        mut state: State,
        records: Vec<EventRecord>,
    ) -> Result<Self, EngineError> {
        let start = state.last_seq();
        if start > records.len() as u64 {
            return Err(EngineError::BadSnapshot(format!(
                "snapshot is at seq {start} but the log ends at {}",
                records.len()
            )));
        }
        replay_onto(&mut state, &records[start as usize..])?;
        let engine = Self::new(log, clock);
        *engine.state.write().unwrap() = Arc::new(state);
        *engine.records.write().unwrap() = records;
        Ok(engine)
    }

    /// Replaces the mail sink; queued messages carry over.
    pub fn set_mail_sink(&self, sink: Box<dyn MailSink>) {
        self.outbox.lock().unwrap().set_sink(sink);
    }

    pub fn snapshot(&self) -> Arc<State> {
        self.state.read().unwrap().clone()
    }

    pub fn records(&self) -> Vec<EventRecord> {
        self.records.read().unwrap().clone()
    }

    pub fn with_records<R>(&self, f: impl FnOnce(&[EventRecord]) -> R) -> R {
        f(&self.records.read().unwrap())
    }

    /// Appends a raw event by name. The payload must already carry any ids
    /// the event mints (they derive from the next seq).
    pub fn append_event(
        &self,
        actor: &UserId,
        kind: &str,
        payload: serde_json::Value,
    ) -> Result<EventRecord, EngineError> {
        let event = Event::from_parts(kind, payload)?;
        self.commit(actor, |_, _| Ok(event)).map(|(rec, _)| rec)
    }

    /// Runs one command: `build` sees the current state and the seq the event
    /// will receive, and returns the event to record. Validation, the durable
    /// append and the state update happen under the writer lock; if the log
    /// append fails nothing changes.
    pub(crate) fn commit(
        &self,
        actor: &UserId,
        build: impl FnOnce(&State, u64) -> Result<Event, EngineError>,
    ) -> Result<(EventRecord, Arc<State>), EngineError> {
        let mut writer = self.writer.lock().unwrap();
        let record = {
            let current = self.snapshot();
            let seq = current.last_seq() + 1;
            let event = build(&current, seq)?;
            let now = writer.clock.now();
            let ts = current.last_ts().map_or(now, |last| last.max(now));
            let record = EventRecord {
                seq,
                ts,
                actor: actor.clone(),
                event,
            };
            current.validate(&record)?;
            record
        };
        writer.log.append(&record)?;
        let (applied, after) = {
            let mut guard = self.state.write().unwrap();
            let applied = Arc::make_mut(&mut guard)
                .apply(&record)
                .expect("record was validated against this state");
            self.records.write().unwrap().push(record.clone());
            (applied, guard.clone())
        };
        drop(writer);
        if !applied.mail.is_empty() {
            let mut outbox = self.outbox.lock().unwrap();
            outbox.enqueue(applied.mail);
            outbox.deliver();
        }
        Ok((record, after))
    }

    /// Retries queued mail; returns how many are still pending.
    pub fn deliver_mail(&self) -> usize {
        let mut outbox = self.outbox.lock().unwrap();
        outbox.deliver();
        outbox.pending()
    }

    pub fn pending_mail(&self) -> usize {
        self.outbox.lock().unwrap().pending()
    }

    /// Flushes the log to durable storage.
    pub fn sync(&self) -> Result<(), EngineError> {
        self.writer.lock().unwrap().log.sync()
    }
}

impl Default for Engine {
    fn default() -> Self {
        Self::in_memory(Arc::new(SystemClock))
    }
}
