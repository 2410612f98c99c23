//! The display payload for one entry: content with its link table, the pinned
//! open corrections, and the attached discussion.

use serde::Serialize;

use crate::autolink::{self, Link, LinkOptions, TermIndex};
use crate::discussion::ThreadNode;
use crate::error::EngineError;
use crate::ids::{ObjectId, ObjectRef};
use crate::model::{Correction, Entry};
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryView {
    pub entry: Entry,
    pub links: Vec<Link>,
    pub open_corrections: Vec<Correction>,
    pub thread: Vec<ThreadNode>,
}

impl State {
    pub fn entry_view(
        &self,
        id: &ObjectId,
        index: &TermIndex,
        opts: LinkOptions,
    ) -> Result<EntryView, EngineError> {
        let entry = self.entry(id)?;
        Ok(EntryView {
            links: autolink::link(entry, index, opts).links,
            open_corrections: self.open_corrections(id)?.into_iter().cloned().collect(),
            thread: self.thread(&ObjectRef::entry(id.clone()))?,
            entry: entry.clone(),
        })
    }
}
