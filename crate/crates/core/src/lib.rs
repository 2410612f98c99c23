//! Event-sourced engine for a small collaborative encyclopedia of LaTeX
//! entries: ownership, corrections, requests, discussion, notices, concept
//! autolinking, participation scoring and notes export.
//!
//! Every change is an [`EventRecord`] appended through the single writer in
//! [`Engine`]; [`State`] is the fold of the log and answers all queries.

pub mod assess;
pub mod authority;
pub mod autolink;
pub mod clock;
pub mod corrections;
pub mod discussion;
pub mod engine;
pub mod error;
pub mod event;
pub mod export;
pub mod ids;
pub mod model;
pub mod notify;
pub mod requests;
pub mod state;
pub mod store;
pub mod testkit;
pub mod users;
pub mod view;

pub use authority::{Adoption, NewEntry};
pub use clock::{Clock, ManualClock, SystemClock};
pub use engine::Engine;
pub use error::{EngineError, ErrorClass, Result};
pub use event::{Event, EventRecord, EVENT_KINDS};
pub use ids::{ObjectId, ObjectKind, ObjectRef, UserId};
pub use model::*;
pub use state::{rebuild_state, State};
pub use store::{FileLog, LogStore, MemoryLog};
