//! Threaded messages hanging off entries, corrections and requests.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use crate::engine::Engine;
use crate::error::EngineError;
use crate::event::{Event, MessagePosted};
use crate::ids::{ObjectId, ObjectKind, ObjectRef, UserId};
use crate::model::{Message, Parent, Timestamp};
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreadNode {
    pub message: Message,
    /// The message's own subject, or `Re: <root subject>` for bare replies.
    pub display_subject: String,
    pub children: Vec<ThreadNode>,
}

impl ThreadNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(ThreadNode::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children.iter().map(ThreadNode::depth).max().unwrap_or(0)
    }

    /// Pre-order walk.
    pub fn walk<'a>(&'a self, out: &mut Vec<&'a Message>) {
        out.push(&self.message);
        for c in &self.children {
            c.walk(out);
        }
    }
}

pub(crate) fn check_posted(state: &State, seq: u64, p: &MessagePosted) -> Result<(), EngineError> {
    if p.message != ObjectId::minted(ObjectKind::Message, seq) {
        return Err(EngineError::MalformedPayload(format!(
            "message id {} does not match seq {seq}",
            p.message
        )));
    }
    if !state.object_exists(&p.target) {
        return Err(EngineError::UnknownTarget(p.target.key()));
    }
    if p.body.trim().is_empty() {
        return Err(EngineError::EmptyBody);
    }
    Ok(())
}

pub(crate) fn apply_posted(
    state: &mut State,
    actor: &UserId,
    seq: u64,
    ts: Timestamp,
    p: &MessagePosted,
) {
    let (parent, root) = match p.target.kind {
        ObjectKind::Message => {
            let root = state.messages[&p.target.id].root.clone();
            (Parent::Message(p.target.id.clone()), root)
        }
        _ => (Parent::Object(p.target.clone()), p.target.clone()),
    };
    let subject = p
        .subject
        .as_ref()
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty());
    state.messages.insert(
        p.message.clone(),
        Message {
            id: p.message.clone(),
            parent,
            root,
            author: actor.clone(),
            subject,
            body: p.body.clone(),
            posted_at: ts,
            posted_seq: seq,
        },
    );
}

impl State {
    pub fn message(&self, id: &ObjectId) -> Result<&Message, EngineError> {
        self.messages
            .get(id)
            .ok_or_else(|| EngineError::UnknownTarget(ObjectRef::message(id.clone()).key()))
    }

    pub fn messages(&self) -> impl Iterator<Item = &Message> {
        self.messages.values()
    }

    /// The discussion attached to `anchor`: every root thread on a core
    /// object, or the subtree under a message. Children are ordered by
    /// posting time.
    pub fn thread(&self, anchor: &ObjectRef) -> Result<Vec<ThreadNode>, EngineError> {
        if !self.object_exists(anchor) {
            return Err(EngineError::UnknownAnchor(anchor.key()));
        }
        let mut replies: BTreeMap<&ObjectId, Vec<&Message>> = BTreeMap::new();
        let mut roots = Vec::new();
        for m in self.messages.values() {
            match &m.parent {
                Parent::Message(p) => replies.entry(p).or_default().push(m),
                Parent::Object(o) if o == anchor => roots.push(m),
                Parent::Object(_) => {}
            }
        }
        for list in replies.values_mut() {
            list.sort_by_key(|m| (m.posted_at, m.posted_seq));
        }
        if anchor.kind == ObjectKind::Message {
            let m = &self.messages[&anchor.id];
            let root_subject = self.root_subject(m);
            return Ok(vec![build_node(m, &root_subject, &replies)]);
        }
        roots.sort_by_key(|m| (m.posted_at, m.posted_seq));
        Ok(roots
            .into_iter()
            .map(|m| {
                let subject = m.subject.clone().unwrap_or_else(|| "(no subject)".into());
                build_node(m, &subject, &replies)
            })
            .collect())
    }

    fn root_subject<'a>(&'a self, mut m: &'a Message) -> String {
        while let Parent::Message(p) = &m.parent {
            m = &self.messages[p];
        }
        m.subject.clone().unwrap_or_else(|| "(no subject)".into())
    }

    /// Full-scan check of the tree property: every reply's parent exists,
    /// chains end at a core object without cycles, and the cached root agrees
    /// with the chain.
    pub fn validate_threads(&self) -> Result<(), String> {
        for m in self.messages.values() {
            let mut seen = HashSet::new();
            let mut cur = m;
            loop {
                if !seen.insert(&cur.id) {
                    return Err(format!("cycle through message {}", m.id));
                }
                match &cur.parent {
                    Parent::Message(p) => match self.messages.get(p) {
                        Some(next) if next.posted_seq < cur.posted_seq => cur = next,
                        Some(_) => return Err(format!("message {} replies forward", cur.id)),
                        None => return Err(format!("message {} has missing parent {p}", cur.id)),
                    },
                    Parent::Object(o) => {
                        if o != &m.root {
                            return Err(format!("message {} has inconsistent root", m.id));
                        }
                        break;
                    }
                }
            }
        }
        Ok(())
    }
}

fn build_node(
    m: &Message,
    root_subject: &str,
    replies: &BTreeMap<&ObjectId, Vec<&Message>>,
) -> ThreadNode {
    let display_subject = match (&m.subject, &m.parent) {
        (Some(s), _) => s.clone(),
        (None, Parent::Message(_)) => format!("Re: {root_subject}"),
        (None, Parent::Object(_)) => root_subject.to_string(),
    };
    let children = replies
        .get(&m.id)
        .map(|list| {
            list.iter()
                .map(|c| build_node(c, root_subject, replies))
                .collect()
        })
        .unwrap_or_default();
    ThreadNode {
        message: m.clone(),
        display_subject,
        children,
    }
}

impl Engine {
    /// Starts a thread on a core object, or replies when `target` is a message.
    pub fn post_message(
        &self,
        author: &UserId,
        target: &ObjectRef,
        subject: Option<String>,
        body: impl Into<String>,
    ) -> Result<Message, EngineError> {
        let body = body.into();
        let (rec, state) = self.commit(author, |_, seq| {
            Ok(Event::MessagePosted(MessagePosted {
                message: ObjectId::minted(ObjectKind::Message, seq),
                target: target.clone(),
                subject,
                body,
            }))
        })?;
        Ok(state
            .message(&ObjectId::minted(ObjectKind::Message, rec.seq))?
            .clone())
    }
}
