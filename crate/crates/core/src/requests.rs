//! The global to-do list. A request is filled by explicitly linking an entry
//! the actor owns; there is no title matching and no cancellation.

use serde::{Deserialize, Serialize};

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{Event, RequestCreated, RequestFulfilled};
use crate::ids::{ObjectId, ObjectKind, UserId};
use crate::model::{Request, RequestState, Timestamp};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RequestFilter {
    Active,
    Filled,
    #[default]
    All,
}

pub(crate) fn check_created(_state: &State, seq: u64, p: &RequestCreated) -> Result<(), EngineError> {
    if p.request != ObjectId::minted(ObjectKind::Request, seq) {
        return Err(EngineError::MalformedPayload(format!(
            "request id {} does not match seq {seq}",
            p.request
        )));
    }
    if p.title.trim().is_empty() {
        return Err(EngineError::EmptyTitle);
    }
    Ok(())
}

pub(crate) fn check_fulfilled(
    state: &State,
    actor: &UserId,
    p: &RequestFulfilled,
) -> Result<(), EngineError> {
    let r = state.request(&p.request)?;
    if r.state == RequestState::Filled {
        return Err(EngineError::AlreadyFilled(p.request.clone()));
    }
    if !state.entry(&p.entry)?.owner.is(actor) {
        return Err(EngineError::NotEntryOwner(p.entry.clone()));
    }
    Ok(())
}

pub(crate) fn apply_created(
    state: &mut State,
    actor: &UserId,
    seq: u64,
    ts: Timestamp,
    p: &RequestCreated,
) {
    state.requests.insert(
        p.request.clone(),
        Request {
            id: p.request.clone(),
            title: p.title.clone(),
            description: p.description.clone(),
            creator: actor.clone(),
            state: RequestState::Active,
            filled_by: None,
            filled_at: None,
            created_at: ts,
            created_seq: seq,
        },
    );
}

pub(crate) fn apply_fulfilled(state: &mut State, ts: Timestamp, p: &RequestFulfilled) {
    if let Some(r) = state.requests.get_mut(&p.request) {
        r.state = RequestState::Filled;
        r.filled_by = Some(p.entry.clone());
        r.filled_at = Some(ts);
    }
}

impl State {
    pub fn request(&self, id: &ObjectId) -> Result<&Request, EngineError> {
        self.requests
            .get(id)
            .ok_or_else(|| EngineError::RequestMissing(id.clone()))
    }

    /// Requests in creation order.
    pub fn list_requests(&self, filter: RequestFilter) -> Vec<&Request> {
        let mut out: Vec<&Request> = self
            .requests
            .values()
            .filter(|r| match filter {
                RequestFilter::Active => r.state == RequestState::Active,
                RequestFilter::Filled => r.state == RequestState::Filled,
                RequestFilter::All => true,
            })
            .collect();
        out.sort_by_key(|r| (r.created_at, r.created_seq));
        out
    }
}

impl Engine {
    pub fn create_request(
        &self,
        creator: &UserId,
        title: impl Into<String>,
        description: impl Into<String>,
    ) -> Result<Request, EngineError> {
        let (title, description) = (title.into(), description.into());
        let (rec, state) = self.commit(creator, |s, seq| {
            s.user(creator)?;
            Ok(Event::RequestCreated(RequestCreated {
                request: ObjectId::minted(ObjectKind::Request, seq),
                title: title.trim().to_string(),
                description,
            }))
        })?;
        Ok(state
            .request(&ObjectId::minted(ObjectKind::Request, rec.seq))?
            .clone())
    }

    pub fn fulfill_request(
        &self,
        actor: &UserId,
        request: &ObjectId,
        entry: &ObjectId,
    ) -> Result<Request, EngineError> {
        let (_, state) = self.commit(actor, |_, _| {
            Ok(Event::RequestFulfilled(RequestFulfilled {
                request: request.clone(),
                entry: entry.clone(),
            }))
        })?;
        Ok(state.request(request)?.clone())
    }
}
