//! Public critique of entries. A correction stays open, and pinned to the
//! entry's display, until the owner (or a moderator) resolves it with an
//! action and a note. There is no retraction.

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{CorrectionFiled, CorrectionResolved, Event};
use crate::ids::{ObjectId, ObjectKind, UserId};
use crate::model::{Correction, CorrectionState, Severity, Timestamp};
use crate::state::State;

pub(crate) fn check_filed(state: &State, seq: u64, p: &CorrectionFiled) -> Result<(), EngineError> {
    if p.correction != ObjectId::minted(ObjectKind::Correction, seq) {
        return Err(EngineError::MalformedPayload(format!(
            "correction id {} does not match seq {seq}",
            p.correction
        )));
    }
    state.entry(&p.entry)?;
    if p.text.trim().is_empty() {
        return Err(EngineError::EmptyText);
    }
    Ok(())
}

pub(crate) fn check_resolved(
    state: &State,
    actor: &UserId,
    p: &CorrectionResolved,
) -> Result<(), EngineError> {
    let c = state.correction(&p.correction)?;
    let entry = state.entry(&c.entry)?;
    if !c.is_open() {
        return Err(EngineError::AlreadyResolved(p.correction.clone()));
    }
    if !entry.owner.is(actor) && !state.is_moderator(actor) {
        return Err(EngineError::NotOwner(c.entry.clone()));
    }
    if p.action.trim().is_empty() || p.note.trim().is_empty() {
        return Err(EngineError::EmptyAction);
    }
    Ok(())
}

pub(crate) fn apply_filed(
    state: &mut State,
    actor: &UserId,
    seq: u64,
    ts: Timestamp,
    p: &CorrectionFiled,
) {
    state.corrections.insert(
        p.correction.clone(),
        Correction {
            id: p.correction.clone(),
            entry: p.entry.clone(),
            filer: actor.clone(),
            text: p.text.clone(),
            severity: p.severity,
            state: CorrectionState::Open,
            action_taken: None,
            resolution_note: None,
            resolved_by: None,
            filed_at: ts,
            resolved_at: None,
            filed_seq: seq,
        },
    );
}

pub(crate) fn apply_resolved(
    state: &mut State,
    actor: &UserId,
    ts: Timestamp,
    p: &CorrectionResolved,
) {
    if let Some(c) = state.corrections.get_mut(&p.correction) {
        c.state = CorrectionState::Resolved;
        c.action_taken = Some(p.action.clone());
        c.resolution_note = Some(p.note.clone());
        c.resolved_by = Some(actor.clone());
        c.resolved_at = Some(ts);
    }
}

impl State {
    pub fn correction(&self, id: &ObjectId) -> Result<&Correction, EngineError> {
        self.corrections
            .get(id)
            .ok_or_else(|| EngineError::CorrectionMissing(id.clone()))
    }

    pub fn corrections(&self) -> impl Iterator<Item = &Correction> {
        self.corrections.values()
    }

    /// All corrections on an entry, in filing order.
    pub fn corrections_for(&self, entry: &ObjectId) -> Result<Vec<&Correction>, EngineError> {
        self.entry(entry)?;
        let mut out: Vec<&Correction> = self
            .corrections
            .values()
            .filter(|c| &c.entry == entry)
            .collect();
        out.sort_by_key(|c| c.filed_seq);
        Ok(out)
    }

    /// The pinned block shown with an entry: its open corrections, oldest first.
    pub fn open_corrections(&self, entry: &ObjectId) -> Result<Vec<&Correction>, EngineError> {
        Ok(self
            .corrections_for(entry)?
            .into_iter()
            .filter(|c| c.is_open())
            .collect())
    }

    pub fn open_correction_count(&self, entry: &ObjectId) -> usize {
        self.corrections
            .values()
            .filter(|c| &c.entry == entry && c.is_open())
            .count()
    }
}

impl Engine {
    pub fn file_correction(
        &self,
        filer: &UserId,
        entry: &ObjectId,
        text: impl Into<String>,
        severity: Severity,
    ) -> Result<Correction, EngineError> {
        let text = text.into();
        let (rec, state) = self.commit(filer, |_, seq| {
            Ok(Event::CorrectionFiled(CorrectionFiled {
                correction: ObjectId::minted(ObjectKind::Correction, seq),
                entry: entry.clone(),
                text,
                severity,
            }))
        })?;
        Ok(state
            .correction(&ObjectId::minted(ObjectKind::Correction, rec.seq))?
            .clone())
    }

    pub fn resolve_correction(
        &self,
        actor: &UserId,
        correction: &ObjectId,
        action: impl Into<String>,
        note: impl Into<String>,
    ) -> Result<Correction, EngineError> {
        let (action, note) = (action.into(), note.into());
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::CorrectionResolved(CorrectionResolved {
                correction: correction.clone(),
                action,
                note,
            }))
        })?;
        Ok(state.correction(correction)?.clone())
    }
}
