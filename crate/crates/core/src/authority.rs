//! Entry lifecycle and the ownership state machine: create, revise, review,
//! orphan, adopt, transfer, delete.
//!
//! Ownership is a two-state machine per entry: `User(u)` or `Orphaned`.
//! Only the current owner may orphan or transfer; only an orphaned entry may
//! be adopted, first come first served. Moderators (instructors and admins)
//! may force-orphan an owned entry, which is recorded as its own event kind.

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{
    EntryCreated, EntryForceOrphaned, EntryReviewed, EntryRevised, EntryTarget,
    EntryTransferred, Event,
};
use crate::ids::{ObjectId, ObjectKind, UserId};
use crate::model::{Correction, Entry, EntryKind, Owner, ReviewState, Timestamp};
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewEntry {
    pub title: String,
    pub synonyms: Vec<String>,
    pub kind: EntryKind,
    pub content: String,
}

impl NewEntry {
    pub fn new(title: impl Into<String>, kind: EntryKind, content: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            synonyms: Vec::new(),
            kind,
            content: content.into(),
        }
    }

    pub fn with_synonyms<I, S>(mut self, synonyms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.synonyms = synonyms.into_iter().map(Into::into).collect();
        self
    }
}

/// Result of an adoption. Open corrections on the entry become the adopter's
/// to resolve; they are handed back here rather than as a notice, since an
/// actor never receives notices for their own events.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct Adoption {
    pub entry: Entry,
    pub inherited_corrections: Vec<Correction>,
}

// ---- validation ----------------------------------------------------------

pub(crate) fn check_created(_state: &State, seq: u64, p: &EntryCreated) -> Result<(), EngineError> {
    if p.entry != ObjectId::minted(ObjectKind::Entry, seq) {
        return Err(EngineError::MalformedPayload(format!(
            "entry id {} does not match seq {seq}",
            p.entry
        )));
    }
    if p.title.trim().is_empty() {
        return Err(EngineError::EmptyTitle);
    }
    Ok(())
}

fn owned_by_actor<'a>(
    state: &'a State,
    actor: &UserId,
    entry: &ObjectId,
) -> Result<&'a Entry, EngineError> {
    let e = state.entry(entry)?;
    if e.owner.is(actor) {
        Ok(e)
    } else {
        Err(EngineError::NotOwner(entry.clone()))
    }
}

pub(crate) fn check_revised(
    state: &State,
    actor: &UserId,
    p: &EntryRevised,
) -> Result<(), EngineError> {
    let e = state.entry(&p.entry)?;
    if e.owner.is_orphaned() {
        return Err(EngineError::OrphanedEntry(p.entry.clone()));
    }
    if !e.owner.is(actor) && !state.is_moderator(actor) {
        return Err(EngineError::NotOwner(p.entry.clone()));
    }
    if p.revision != e.revision + 1 {
        return Err(EngineError::RevisionConflict {
            entry: p.entry.clone(),
            expected: p.revision.saturating_sub(1),
            actual: e.revision,
        });
    }
    Ok(())
}

pub(crate) fn check_reviewed(
    state: &State,
    actor: &UserId,
    p: &EntryReviewed,
) -> Result<(), EngineError> {
    state.entry(&p.entry)?;
    if !state.is_moderator(actor) {
        return Err(EngineError::Forbidden(
            "only instructors and admins record reviews".into(),
        ));
    }
    Ok(())
}

pub(crate) fn check_orphaned(
    state: &State,
    actor: &UserId,
    p: &EntryTarget,
) -> Result<(), EngineError> {
    if state.entry(&p.entry)?.owner.is_orphaned() {
        return Err(EngineError::AlreadyOrphaned(p.entry.clone()));
    }
    owned_by_actor(state, actor, &p.entry).map(|_| ())
}

pub(crate) fn check_force_orphaned(
    state: &State,
    actor: &UserId,
    p: &EntryForceOrphaned,
) -> Result<(), EngineError> {
    let e = state.entry(&p.entry)?;
    let Some(owner) = e.owner.user() else {
        return Err(EngineError::AlreadyOrphaned(p.entry.clone()));
    };
    if !state.is_moderator(actor) {
        return Err(EngineError::NotOwner(p.entry.clone()));
    }
    if owner != &p.previous_owner {
        return Err(EngineError::MalformedPayload(format!(
            "entry {} is owned by {owner}, not {}",
            p.entry, p.previous_owner
        )));
    }
    Ok(())
}

pub(crate) fn check_adopted(state: &State, p: &EntryTarget) -> Result<(), EngineError> {
    if !state.entry(&p.entry)?.owner.is_orphaned() {
        return Err(EngineError::NotOrphaned(p.entry.clone()));
    }
    Ok(())
}

pub(crate) fn check_transferred(
    state: &State,
    actor: &UserId,
    p: &EntryTransferred,
) -> Result<(), EngineError> {
    owned_by_actor(state, actor, &p.entry)?;
    if !state.users.contains_key(&p.recipient) {
        return Err(EngineError::UnknownRecipient(p.recipient.clone()));
    }
    if &p.recipient == actor {
        return Err(EngineError::SelfTransfer);
    }
    Ok(())
}

pub(crate) fn check_deleted(
    state: &State,
    actor: &UserId,
    p: &EntryTarget,
) -> Result<(), EngineError> {
    let e = state.entry(&p.entry)?;
    if !e.owner.is(actor) && !state.is_moderator(actor) {
        return Err(EngineError::NotOwner(p.entry.clone()));
    }
    Ok(())
}

// ---- folding -------------------------------------------------------------

pub(crate) fn apply_created(
    state: &mut State,
    actor: &UserId,
    seq: u64,
    ts: Timestamp,
    p: &EntryCreated,
) {
    state.entries.insert(
        p.entry.clone(),
        Entry {
            id: p.entry.clone(),
            title: p.title.clone(),
            synonyms: p.synonyms.clone(),
            kind: p.kind,
            content: p.content.clone(),
            owner: Owner::User(actor.clone()),
            creator: actor.clone(),
            created_at: ts,
            updated_at: ts,
            created_seq: seq,
            revision: 1,
            review_state: ReviewState::Unreviewed,
            deleted: false,
        },
    );
}

pub(crate) fn apply_revised(state: &mut State, ts: Timestamp, p: &EntryRevised) {
    if let Some(e) = state.entries.get_mut(&p.entry) {
        e.content = p.content.clone();
        e.revision = p.revision;
        e.updated_at = ts;
    }
}

pub(crate) fn apply_reviewed(state: &mut State, p: &EntryReviewed) {
    if let Some(e) = state.entries.get_mut(&p.entry) {
        e.review_state = p.review_state;
    }
}

pub(crate) fn apply_orphaned(state: &mut State, entry: &ObjectId) {
    if let Some(e) = state.entries.get_mut(entry) {
        e.owner = Owner::Orphaned;
    }
}

pub(crate) fn apply_owner(state: &mut State, entry: &ObjectId, owner: UserId) {
    if let Some(e) = state.entries.get_mut(entry) {
        e.owner = Owner::User(owner);
    }
}

pub(crate) fn apply_deleted(state: &mut State, p: &EntryTarget) {
    if let Some(e) = state.entries.get_mut(&p.entry) {
        e.deleted = true;
    }
}

// ---- queries -------------------------------------------------------------

impl State {
    /// A live (not tombstoned) entry.
    pub fn entry(&self, id: &ObjectId) -> Result<&Entry, EngineError> {
        self.entries
            .get(id)
            .filter(|e| !e.deleted)
            .ok_or_else(|| EngineError::EntryMissing(id.clone()))
    }

    /// Live entries in creation order.
    pub fn entries(&self) -> Vec<&Entry> {
        let mut out: Vec<&Entry> = self.entries.values().filter(|e| !e.deleted).collect();
        out.sort_by_key(|e| e.created_seq);
        out
    }

    /// Entries flagged for adoption, oldest first.
    pub fn orphans(&self) -> Vec<&Entry> {
        self.entries()
            .into_iter()
            .filter(|e| e.owner.is_orphaned())
            .collect()
    }

    pub fn entries_owned_by(&self, user: &UserId) -> Vec<&Entry> {
        self.entries()
            .into_iter()
            .filter(|e| e.owner.is(user))
            .collect()
    }
}

// ---- commands ------------------------------------------------------------

impl Engine {
    pub fn create_entry(&self, author: &UserId, new: NewEntry) -> Result<Entry, EngineError> {
        let (rec, state) = self.commit(author, |s, seq| {
            s.user(author).map_err(|_| EngineError::UnknownUser(author.clone()))?;
            Ok(Event::EntryCreated(EntryCreated {
                entry: ObjectId::minted(ObjectKind::Entry, seq),
                title: new.title.trim().to_string(),
                synonyms: new.synonyms,
                kind: new.kind,
                content: new.content,
            }))
        })?;
        Ok(state.entry(&ObjectId::minted(ObjectKind::Entry, rec.seq))?.clone())
    }

    /// Replaces the content. With `expected_revision` set, fails with
    /// revision-conflict unless the entry is still at that revision.
    pub fn revise_entry(
        &self,
        actor: &UserId,
        entry: &ObjectId,
        new_content: impl Into<String>,
        expected_revision: Option<u64>,
    ) -> Result<Entry, EngineError> {
        let content = new_content.into();
        let (_, state) = self.commit(actor, |s, _| {
            let revision = s.entry(entry)?.revision;
            let event = EntryRevised {
                entry: entry.clone(),
                revision: revision + 1,
                content,
            };
            check_revised(s, actor, &event)?;
            if let Some(expected) = expected_revision {
                if expected != revision {
                    return Err(EngineError::RevisionConflict {
                        entry: entry.clone(),
                        expected,
                        actual: revision,
                    });
                }
            }
            Ok(Event::EntryRevised(event))
        })?;
        Ok(state.entry(entry)?.clone())
    }

    pub fn set_review_state(
        &self,
        actor: &UserId,
        entry: &ObjectId,
        review_state: ReviewState,
    ) -> Result<Entry, EngineError> {
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::EntryReviewed(EntryReviewed {
                entry: entry.clone(),
                review_state,
            }))
        })?;
        Ok(state.entry(entry)?.clone())
    }

    /// Owner releases the entry. A moderator acting on someone else's entry
    /// produces a force-orphan event instead.
    pub fn orphan_entry(&self, actor: &UserId, entry: &ObjectId) -> Result<Entry, EngineError> {
        let (_, state) = self.commit(actor, |s, _| {
            let e = s.entry(entry)?;
            match e.owner.user() {
                Some(owner) if owner != actor && s.is_moderator(actor) => {
                    Ok(Event::EntryForceOrphaned(EntryForceOrphaned {
                        entry: entry.clone(),
                        previous_owner: owner.clone(),
                    }))
                }
                _ => Ok(Event::EntryOrphaned(EntryTarget {
                    entry: entry.clone(),
                })),
            }
        })?;
        Ok(state.entry(entry)?.clone())
    }

    pub fn adopt_entry(&self, actor: &UserId, entry: &ObjectId) -> Result<Adoption, EngineError> {
        let (_, state) = self.commit(actor, |s, _| {
            s.user(actor)?;
            Ok(Event::EntryAdopted(EntryTarget {
                entry: entry.clone(),
            }))
        })?;
        Ok(Adoption {
            entry: state.entry(entry)?.clone(),
            inherited_corrections: state
                .open_corrections(entry)?
                .into_iter()
                .cloned()
                .collect(),
        })
    }

    pub fn transfer_entry(
        &self,
        actor: &UserId,
        entry: &ObjectId,
        recipient: &UserId,
    ) -> Result<Entry, EngineError> {
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::EntryTransferred(EntryTransferred {
                entry: entry.clone(),
                recipient: recipient.clone(),
            }))
        })?;
        Ok(state.entry(entry)?.clone())
    }

    /// Tombstones the entry; it disappears from reads but stays in the log.
    pub fn delete_entry(&self, actor: &UserId, entry: &ObjectId) -> Result<(), EngineError> {
        self.commit(actor, |_, _| {
            Ok(Event::EntryDeleted(EntryTarget {
                entry: entry.clone(),
            }))
        })?;
        Ok(())
    }
}
