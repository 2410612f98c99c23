//! Wraps concept mentions in `\nooslink{id}{text}`.

use std::collections::BTreeSet;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::index::{fold_char, normalize, TermIndex};
use super::tokenize::{tokenize, Diagnostic, SegmentKind, Tokens};
use crate::ids::ObjectId;
use crate::model::Entry;

pub const LINK_COMMAND: &str = "\\nooslink";

/// Source characters a linked span may not contain; they would break the
/// markup argument.
const UNLINKABLE: &[char] = &['{', '}', '\\', '%', '$', '#'];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkOptions {
    /// Also match a term followed by `s` or `es`.
    pub plural_folding: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Link {
    /// Byte span in the unlinked content.
    pub span: Range<usize>,
    pub target: ObjectId,
    /// The normalized term that matched.
    pub term: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedContent {
    pub content: String,
    pub links: Vec<Link>,
    pub diagnostics: Vec<Diagnostic>,
    /// For each link, the byte span of its wrapped text inside `content`.
    #[serde(skip)]
    inner: Vec<Range<usize>>,
}

impl LinkedContent {
    /// The original content, recovered by dropping the wrappers this linker
    /// inserted (literal link markup already in the source is kept).
    pub fn strip(&self) -> String {
        let mut out = String::with_capacity(self.content.len());
        let mut pos = 0;
        for inner in &self.inner {
            let open = self.content[..inner.start]
                .rfind(LINK_COMMAND)
                .expect("wrapper precedes its text");
            out.push_str(&self.content[pos..open]);
            out.push_str(&self.content[inner.clone()]);
            pos = inner.end + 1;
        }
        out.push_str(&self.content[pos..]);
        out
    }
}

/// Removes every `\nooslink{id}{text}` wrapper from `text`, keeping `text`.
pub fn strip_link_markup(text: &str) -> String {
    let open = format!("{LINK_COMMAND}{{");
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(p) = rest.find(&open) {
        let after = &rest[p + open.len()..];
        let parsed = after.split_once("}{").and_then(|(id, tail)| {
            if id.contains('}') {
                return None;
            }
            tail.split_once('}')
        });
        match parsed {
            Some((inner, tail)) => {
                out.push_str(&rest[..p]);
                out.push_str(inner);
                rest = tail;
            }
            None => {
                out.push_str(&rest[..p + open.len()]);
                rest = after;
            }
        }
    }
    out.push_str(rest);
    out
}

/// One character of normalized text with the source bytes it stands for.
#[derive(Debug, Clone, Copy)]
struct Unit {
    ch: char,
    start: usize,
    end: usize,
}

fn units(src: &str, span: &Range<usize>) -> Vec<Unit> {
    let mut out: Vec<Unit> = Vec::new();
    for (off, c) in src[span.clone()].char_indices() {
        let start = span.start + off;
        let end = start + c.len_utf8();
        if c.is_whitespace() {
            if let Some(last) = out.last_mut().filter(|u| u.ch == ' ') {
                last.end = end;
                continue;
            }
            out.push(Unit { ch: ' ', start, end });
        } else {
            out.push(Unit {
                ch: fold_char(c),
                start,
                end,
            });
        }
    }
    out
}

fn is_letter(u: Option<&Unit>) -> bool {
    u.is_some_and(|u| u.ch.is_alphabetic())
}

/// Every position where a plural suffix may follow a match of length `len`.
fn plural_ends(units: &[Unit], end: usize) -> impl Iterator<Item = usize> + '_ {
    ["s", "es"].into_iter().filter_map(move |suffix| {
        let n = suffix.len();
        let fits = units
            .get(end..end + n)
            .is_some_and(|s| s.iter().map(|u| u.ch).eq(suffix.chars()));
        fits.then_some(end + n)
    })
}

/// A candidate match: unit range within a text segment and the term.
#[derive(Debug, Clone)]
struct Hit<'i> {
    start: usize,
    end: usize,
    term: &'i str,
}

/// Leftmost-longest non-overlapping hits over one text segment.
fn scan<'i>(
    src: &str,
    units: &[Unit],
    index: &'i TermIndex,
    opts: LinkOptions,
) -> Vec<Hit<'i>> {
    let mut hits = Vec::new();
    let mut i = 0;
    while i < units.len() {
        if units[i].ch == ' ' || (i > 0 && is_letter(units.get(i - 1))) {
            i += 1;
            continue;
        }
        let mut best: Option<Hit> = None;
        for (len, term) in index.prefixes(units[i..].iter().map(|u| u.ch)) {
            let base = i + len;
            let ends = std::iter::once(base).chain(if opts.plural_folding {
                plural_ends(units, base).collect::<Vec<_>>()
            } else {
                Vec::new()
            });
            for end in ends {
                let bounded = !is_letter(units.get(end));
                let clean = !src[units[i].start..units[end - 1].end].contains(UNLINKABLE);
                // on a tie the longer base term wins, so an exact match beats a plural
                if bounded && clean && best.as_ref().is_none_or(|b| end >= b.end) {
                    best = Some(Hit { start: i, end, term });
                }
            }
        }
        match best {
            Some(hit) => {
                i = hit.end;
                hits.push(hit);
            }
            None => i += 1,
        }
    }
    hits
}

/// Links `content` against `index`. Mentions of `own_terms` (already
/// normalized) and of `own_id` are left alone, and each target is linked at
/// its first mention only.
pub fn link_text(
    content: &str,
    own_id: Option<&ObjectId>,
    own_terms: &BTreeSet<String>,
    index: &TermIndex,
    opts: LinkOptions,
) -> LinkedContent {
    let Tokens {
        segments,
        diagnostics,
    } = tokenize(content);
    let mut links = Vec::new();
    let mut seen: BTreeSet<&ObjectId> = BTreeSet::new();
    for seg in segments.iter().filter(|s| s.kind == SegmentKind::Text) {
        let units = units(content, &seg.span);
        for hit in scan(content, &units, index, opts) {
            let target = &index.get(hit.term).expect("trie terms are indexed").entry;
            if Some(target) == own_id || own_terms.contains(hit.term) || !seen.insert(target) {
                continue;
            }
            links.push(Link {
                span: units[hit.start].start..units[hit.end - 1].end,
                target: target.clone(),
                term: hit.term.to_string(),
            });
        }
    }
    let mut out = String::with_capacity(content.len() + links.len() * 24);
    let mut inner = Vec::with_capacity(links.len());
    let mut pos = 0;
    for l in &links {
        out.push_str(&content[pos..l.span.start]);
        out.push_str(LINK_COMMAND);
        out.push('{');
        out.push_str(l.target.as_str());
        out.push_str("}{");
        let start = out.len();
        out.push_str(&content[l.span.clone()]);
        inner.push(start..out.len());
        out.push('}');
        pos = l.span.end;
    }
    out.push_str(&content[pos..]);
    LinkedContent {
        content: out,
        links,
        diagnostics,
        inner,
    }
}

/// The normalized title and synonyms of `entry`.
pub fn own_terms(entry: &Entry) -> BTreeSet<String> {
    std::iter::once(&entry.title)
        .chain(&entry.synonyms)
        .map(|t| normalize(t))
        .filter(|t| !t.is_empty())
        .collect()
}

pub fn link(entry: &Entry, index: &TermIndex, opts: LinkOptions) -> LinkedContent {
    link_text(&entry.content, Some(&entry.id), &own_terms(entry), index, opts)
}
