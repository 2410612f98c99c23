//! Normalized term lookup: every live entry's title and synonyms.

use std::collections::{BTreeMap, HashMap};

use crate::ids::ObjectId;
use crate::model::Entry;
use crate::state::State;

/// Case-folds one character without changing the character count, so that
/// normalized text stays aligned with its source.
pub fn fold_char(c: char) -> char {
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

/// Case-fold, collapse whitespace runs to one space, trim. Articles are kept.
pub fn normalize(term: &str) -> String {
    let mut out = String::with_capacity(term.len());
    let mut pending_space = false;
    for c in term.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push(fold_char(c));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Target {
    pub entry: ObjectId,
    pub created_seq: u64,
}

#[derive(Debug, Clone, Default)]
struct Node {
    children: HashMap<char, usize>,
    term: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct TermIndex {
    terms: BTreeMap<String, Target>,
    /// Terms in `terms` order; trie leaves point here.
    order: Vec<String>,
    nodes: Vec<Node>,
}

impl Default for TermIndex {
    fn default() -> Self {
        Self::build(std::iter::empty())
    }
}

impl TermIndex {
    /// Indexes titles and synonyms; on a collision the entry with the
    /// smallest creation seq keeps the term.
    pub fn build<'a>(entries: impl IntoIterator<Item = &'a Entry>) -> Self {
        let mut terms: BTreeMap<String, Target> = BTreeMap::new();
        for e in entries {
            if e.deleted {
                continue;
            }
            for raw in std::iter::once(&e.title).chain(&e.synonyms) {
                let term = normalize(raw);
                if term.is_empty() {
                    continue;
                }
                let candidate = Target {
                    entry: e.id.clone(),
                    created_seq: e.created_seq,
                };
                terms
                    .entry(term)
                    .and_modify(|t| {
                        if candidate.created_seq < t.created_seq {
                            *t = candidate.clone();
                        }
                    })
                    .or_insert(candidate);
            }
        }
        let order: Vec<String> = terms.keys().cloned().collect();
        let mut nodes = vec![Node::default()];
        for (k, term) in order.iter().enumerate() {
            let mut at = 0;
            for c in term.chars() {
                at = match nodes[at].children.get(&c) {
                    Some(&n) => n,
                    None => {
                        nodes.push(Node::default());
                        let n = nodes.len() - 1;
                        nodes[at].children.insert(c, n);
                        n
                    }
                };
            }
            nodes[at].term = Some(k);
        }
        Self {
            terms,
            order,
            nodes,
        }
    }

    pub fn from_state(state: &State) -> Self {
        Self::build(state.entries())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Looks up an already-normalized term.
    pub fn get(&self, term: &str) -> Option<&Target> {
        self.terms.get(term)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&str, &Target)> {
        self.terms.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Walks the trie along `chars`, reporting `(length, term)` for every
    /// prefix that is a complete term.
    pub(crate) fn prefixes<'s, I>(&'s self, chars: I) -> impl Iterator<Item = (usize, &'s str)> + use<'s, I>
    where
        I: Iterator<Item = char>,
    {
        let mut at = Some(0usize);
        chars.enumerate().map_while(move |(k, c)| {
            let n = *self.nodes[at?].children.get(&c)?;
            at = Some(n);
            Some((k + 1, self.nodes[n].term.map(|t| self.order[t].as_str())))
        })
        .filter_map(|(len, term)| term.map(|t| (len, t)))
    }
}
