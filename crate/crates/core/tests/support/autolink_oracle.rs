//! A brute-force reference linker and random corpora to compare against.
//!
//! The oracle tries every substring of every text segment, normalizes it and
//! looks it up in a plain map; it shares nothing with the trie scan but the
//! tokenizer and `normalize`.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use noosphere_core::autolink::{
    link, link_text, normalize, tokenize, LinkOptions, SegmentKind, TermIndex, LINK_COMMAND,
};
use noosphere_core::testkit::world;
use noosphere_core::{Entry, EntryKind, NewEntry, ObjectId};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const UNLINKABLE: [char; 6] = ['{', '}', '\\', '%', '$', '#'];

const WORDS: [&str; 24] = [
    "metric", "space", "Space", "compact", "set", "open", "Banach", "fixed", "point", "theorem",
    "limit", "the", "of", "a", "flow", "Lie", "group", "matrix", "matrices", "box", "boxes",
    "Öre", "straße", "İz",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleLink {
    pub span: Range<usize>,
    pub target: ObjectId,
    pub term: String,
}

/// Oldest entry wins each normalized term.
pub fn term_map(entries: &[&Entry]) -> BTreeMap<String, (u64, ObjectId)> {
    let mut map: BTreeMap<String, (u64, ObjectId)> = BTreeMap::new();
    for e in entries {
        for t in std::iter::once(&e.title).chain(&e.synonyms) {
            let n = normalize(t);
            if n.is_empty() {
                continue;
            }
            let cand = (e.created_seq, e.id.clone());
            match map.get(&n) {
                Some(old) if old.0 <= cand.0 => {}
                _ => {
                    map.insert(n, cand);
                }
            }
        }
    }
    map
}

fn is_letter(c: Option<char>) -> bool {
    c.is_some_and(char::is_alphabetic)
}

/// Leftmost-longest over raw source positions.
pub fn oracle(
    content: &str,
    own_id: Option<&ObjectId>,
    own_terms: &BTreeSet<String>,
    terms: &BTreeMap<String, (u64, ObjectId)>,
    opts: LinkOptions,
) -> (String, Vec<OracleLink>) {
    let max_term = terms.keys().map(|t| t.chars().count()).max().unwrap_or(0);
    let mut links: Vec<OracleLink> = Vec::new();
    let mut seen: BTreeSet<ObjectId> = BTreeSet::new();
    for seg in tokenize(content).segments {
        if seg.kind != SegmentKind::Text {
            continue;
        }
        let text = &content[seg.span.clone()];
        let chars: Vec<(usize, char)> = text.char_indices().collect();
        let at = |k: usize| chars.get(k).map(|&(_, c)| c);
        let offset = |k: usize| chars.get(k).map_or(text.len(), |&(o, _)| o);
        let mut k = 0;
        while k < chars.len() {
            let c = chars[k].1;
            if c.is_whitespace() || (k > 0 && is_letter(at(k - 1))) {
                k += 1;
                continue;
            }
            // (end, base length, term)
            let mut best: Option<(usize, usize, String)> = None;
            let mut visible = 0;
            for q in k + 1..=chars.len() {
                if !chars[q - 1].1.is_whitespace() {
                    visible += 1;
                }
                if visible > max_term + 2 {
                    break;
                }
                let src = &text[offset(k)..offset(q)];
                if src.ends_with(char::is_whitespace) || src.contains(UNLINKABLE) || is_letter(at(q)) {
                    continue;
                }
                let mut cands = vec![(src.len(), normalize(src))];
                if opts.plural_folding {
                    for suffix in ["s", "es"] {
                        let lower = src.to_lowercase();
                        if lower.ends_with(suffix) && src.len() > suffix.len() {
                            let base = &src[..src.len() - suffix.len()];
                            if !base.ends_with(char::is_whitespace) {
                                cands.push((base.len(), normalize(base)));
                            }
                        }
                    }
                }
                for (base_len, n) in cands {
                    if terms.contains_key(&n)
                        && best.as_ref().is_none_or(|b| q > b.0 || (q == b.0 && base_len > b.1))
                    {
                        best = Some((q, base_len, n));
                    }
                }
            }
            match best {
                Some((q, _, term)) => {
                    let target = terms[&term].1.clone();
                    let keep = Some(&target) != own_id && !own_terms.contains(&term) && seen.insert(target.clone());
                    if keep {
                        let start = seg.span.start + offset(k);
                        links.push(OracleLink {
                            span: start..seg.span.start + offset(q),
                            target,
                            term,
                        });
                    }
                    k = q;
                }
                None => k += 1,
            }
        }
    }
    let mut out = String::new();
    let mut pos = 0;
    for l in &links {
        out.push_str(&content[pos..l.span.start]);
        out.push_str(&format!("{LINK_COMMAND}{{{}}}{{{}}}", l.target, &content[l.span.clone()]));
        pos = l.span.end;
    }
    out.push_str(&content[pos..]);
    (out, links)
}

fn title(rng: &mut ChaCha8Rng) -> String {
    let n = rng.random_range(1..=4);
    let words: Vec<&str> = (0..n).map(|_| *WORDS.choose(rng).unwrap()).collect();
    words.join(" ")
}

const SEPARATORS: [&str; 16] = [
    " ", " ", " ", "  ", "\n", " \t ", ", ", ". ", "(", ")", "-", "'", "2", "{", "#", "x",
];
const INSERTS: [&str; 10] = [
    " $x + y$ ",
    " \\[ metric space \\] ",
    " % metric space comment\n",
    " \\emph{compact set} ",
    " \\ref{fixed point} ",
    " \\begin{equation}open set\\end{equation} ",
    " \\verb|space| ",
    " $$ unclosed",
    " \\nooslink{e1}{box} ",
    "es ",
];

pub fn random_text(rng: &mut ChaCha8Rng, tokens: usize) -> String {
    let mut s = String::new();
    for _ in 0..tokens {
        match rng.random_range(0..20) {
            0 => s.push_str(INSERTS.choose(rng).unwrap()),
            1 => s.push('s'),
            _ => {
                s.push_str(WORDS.choose(rng).unwrap());
                s.push_str(SEPARATORS.choose(rng).unwrap());
            }
        }
    }
    s
}

/// Runs `corpora` random corpora; returns (entries linked, links found) or
/// the first disagreement.
pub fn compare(corpora: usize, seed: u64) -> Result<(usize, usize), String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut checked, mut found) = (0, 0);
    for corpus in 0..corpora {
        let w = world();
        let size = rng.random_range(1..=100);
        let mut ids = Vec::new();
        for _ in 0..size {
            let tokens = rng.random_range(5..60);
            let mut new = NewEntry::new(title(&mut rng), EntryKind::Concept, random_text(&mut rng, tokens));
            if rng.random_range(0..4) == 0 {
                new = new.with_synonyms([title(&mut rng)]);
            }
            ids.push(w.engine.create_entry(&w.students[0], new).unwrap().id);
        }
        for id in &ids {
            if rng.random_range(0..20) == 0 {
                w.engine.delete_entry(&w.students[0], id).unwrap();
            }
        }
        let state = w.engine.snapshot();
        let entries = state.entries();
        let index = TermIndex::build(entries.iter().copied());
        let terms = term_map(&entries);
        let opts = LinkOptions { plural_folding: corpus % 2 == 1 };
        for e in &entries {
            let got = link(e, &index, opts);
            let own: BTreeSet<String> = std::iter::once(&e.title)
                .chain(&e.synonyms)
                .map(|t| normalize(t))
                .collect();
            let (want, want_links) = oracle(&e.content, Some(&e.id), &own, &terms, opts);
            let got_links: Vec<OracleLink> = got
                .links
                .iter()
                .map(|l| OracleLink { span: l.span.clone(), target: l.target.clone(), term: l.term.clone() })
                .collect();
            if got.content != want || got_links != want_links {
                return Err(format!(
                    "corpus {corpus} entry {} ({:?}, plural={}):\ncontent {:?}\ngot  {:?}\nwant {:?}",
                    e.id, e.title, opts.plural_folding, e.content, got_links, want_links
                ));
            }
            checked += 1;
            found += want_links.len();
        }
        // free text against the same index, no self filtering
        let text = random_text(&mut rng, 80);
        let got = link_text(&text, None, &BTreeSet::new(), &index, opts);
        let (want, _) = oracle(&text, None, &BTreeSet::new(), &terms, opts);
        if got.content != want {
            return Err(format!("corpus {corpus} free text {text:?}:\ngot  {:?}\nwant {want:?}", got.content));
        }
    }
    Ok((checked, found))
}

/// Links random inputs and checks that stripping gives back the input.
pub fn round_trips(inputs: usize, seed: u64) -> Result<usize, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = world();
    for t in ["metric space", "space", "box", "fixed point", "Öre", "straße", "compact set"] {
        w.engine
            .create_entry(&w.students[0], NewEntry::new(t, EntryKind::Concept, "x"))
            .unwrap();
    }
    let index = TermIndex::from_state(&w.engine.snapshot());
    let mut linked = 0;
    for k in 0..inputs {
        let tokens = rng.random_range(0..40);
        let text = random_text(&mut rng, tokens);
        let opts = LinkOptions { plural_folding: k % 2 == 0 };
        let out = link_text(&text, None, &BTreeSet::new(), &index, opts);
        if out.strip() != text {
            return Err(format!("strip mismatch for {text:?}"));
        }
        if !text.contains(LINK_COMMAND) && noosphere_core::autolink::strip_link_markup(&out.content) != text {
            return Err(format!("markup strip mismatch for {text:?}"));
        }
        linked += usize::from(!out.links.is_empty());
    }
    Ok(linked)
}
