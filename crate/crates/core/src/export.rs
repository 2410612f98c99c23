//! Compiles the corpus into a course-notes document: front matter, a table of
//! contents, an alphabetical run of sections, then the collections.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assess::{score_entry, RubricConfig};
use crate::autolink::{self, fold_char, LinkOptions, TermIndex};
use crate::error::EngineError;
use crate::ids::ObjectId;
use crate::model::Entry;
use crate::state::State;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Collection {
    pub name: String,
    pub members: Vec<ObjectId>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrontMatter {
    pub title: String,
    pub subtitle: String,
    pub institution: String,
    pub date: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    pub front: FrontMatter,
    pub rubric: RubricConfig,
    pub link: LinkOptions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Part {
    /// `7` for a section, `80.3` for a subsection.
    pub number: String,
    pub title: String,
    pub entry: Option<ObjectId>,
    /// Linked LaTeX body; empty for a collection heading.
    pub body: String,
    pub subsections: Vec<Part>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DocumentModel {
    pub front: FrontMatter,
    pub sections: Vec<Part>,
}

impl DocumentModel {
    /// `(number, title)` for every section and subsection, in order.
    pub fn toc(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        for s in &self.sections {
            out.push((s.number.as_str(), s.title.as_str()));
            for sub in &s.subsections {
                out.push((sub.number.as_str(), sub.title.as_str()));
            }
        }
        out
    }

    pub fn entry_ids(&self) -> Vec<&ObjectId> {
        self.sections
            .iter()
            .flat_map(|s| std::iter::once(s).chain(&s.subsections))
            .filter_map(|p| p.entry.as_ref())
            .collect()
    }
}

/// Case-insensitive codepoint order on titles, then age.
pub fn title_order(a: &Entry, b: &Entry) -> Ordering {
    a.title
        .chars()
        .map(fold_char)
        .cmp(b.title.chars().map(fold_char))
        .then(a.created_seq.cmp(&b.created_seq))
}

fn check_collections(state: &State, collections: &[Collection]) -> Result<(), EngineError> {
    let mut owner: BTreeMap<&ObjectId, &str> = BTreeMap::new();
    for c in collections {
        for m in &c.members {
            state
                .entry(m)
                .map_err(|_| EngineError::InvalidCollection(format!("{}: unknown entry {m}", c.name)))?;
            if let Some(prev) = owner.insert(m, &c.name) {
                return Err(EngineError::InvalidCollection(format!(
                    "entry {m} is in both {prev:?} and {:?}",
                    c.name
                )));
            }
        }
    }
    Ok(())
}

pub fn compile(
    state: &State,
    collections: &[Collection],
    opts: &CompileOptions,
) -> Result<DocumentModel, EngineError> {
    check_collections(state, collections)?;
    let included: Vec<&Entry> = state
        .entries()
        .into_iter()
        .filter(|e| score_entry(e, state.open_correction_count(&e.id), &opts.rubric).score > 0)
        .collect();
    let index = TermIndex::build(included.iter().copied());
    let grouped: BTreeSet<&ObjectId> = collections.iter().flat_map(|c| &c.members).collect();
    let body = |e: &Entry| autolink::link(e, &index, opts.link).content;

    let mut run: Vec<&Entry> = included
        .iter()
        .copied()
        .filter(|e| !grouped.contains(&e.id))
        .collect();
    run.sort_by(|a, b| title_order(a, b));
    let mut sections: Vec<Part> = run
        .into_iter()
        .enumerate()
        .map(|(k, e)| Part {
            number: (k + 1).to_string(),
            title: e.title.clone(),
            entry: Some(e.id.clone()),
            body: body(e),
            subsections: Vec::new(),
        })
        .collect();

    let by_id: BTreeMap<&ObjectId, &Entry> = included.iter().map(|e| (&e.id, *e)).collect();
    for c in collections {
        let members: Vec<&Entry> = c.members.iter().filter_map(|m| by_id.get(m).copied()).collect();
        if members.is_empty() {
            continue;
        }
        let number = (sections.len() + 1).to_string();
        let subsections = members
            .into_iter()
            .enumerate()
            .map(|(k, e)| Part {
                number: format!("{number}.{}", k + 1),
                title: e.title.clone(),
                entry: Some(e.id.clone()),
                body: body(e),
                subsections: Vec::new(),
            })
            .collect();
        sections.push(Part {
            number,
            title: c.name.clone(),
            entry: None,
            body: String::new(),
            subsections,
        });
    }
    Ok(DocumentModel {
        front: opts.front.clone(),
        sections,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Latex,
    TocText,
}

impl FromStr for Format {
    type Err = EngineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "latex" | "tex" => Ok(Format::Latex),
            "toc-text" | "toc" => Ok(Format::TocText),
            other => Err(EngineError::UnsupportedFormat(other.to_string())),
        }
    }
}

pub fn serialize(doc: &DocumentModel, format: Format) -> Vec<u8> {
    match format {
        Format::Latex => latex(doc).into_bytes(),
        Format::TocText => toc_text(doc).into_bytes(),
    }
}

/// Serializes by format name; unknown names are `unsupported-format`.
pub fn serialize_named(doc: &DocumentModel, format: &str) -> Result<Vec<u8>, EngineError> {
    Ok(serialize(doc, format.parse()?))
}

pub fn toc_text(doc: &DocumentModel) -> String {
    let mut out = String::new();
    for (n, t) in doc.toc() {
        let _ = writeln!(out, "{n}\t{t}");
    }
    out
}

fn label(p: &Part) -> String {
    match &p.entry {
        Some(id) => format!("\\label{{noos:{id}}}"),
        None => String::new(),
    }
}

pub fn latex(doc: &DocumentModel) -> String {
    let f = &doc.front;
    let mut out = String::from(
        "\\documentclass{article}\n\
         \\usepackage[utf8]{inputenc}\n\
         \\usepackage{amsmath}\n\
         \\usepackage{amssymb}\n\
         \\newcommand{\\nooslink}[2]{\\emph{#2}~(\\ref{noos:#1})}\n",
    );
    let _ = writeln!(out, "\\title{{{}\\\\ \\large {}}}", f.title, f.subtitle);
    let _ = writeln!(out, "\\author{{{}}}", f.institution);
    let _ = writeln!(out, "\\date{{{}}}", f.date);
    out.push_str("\\begin{document}\n\\maketitle\n\\tableofcontents\n");
    for s in &doc.sections {
        let _ = writeln!(out, "\n\\section{{{}}}{}", s.title, label(s));
        if !s.body.is_empty() {
            out.push_str(&s.body);
            out.push('\n');
        }
        for sub in &s.subsections {
            let _ = writeln!(out, "\n\\subsection{{{}}}{}", sub.title, label(sub));
            out.push_str(&sub.body);
            out.push('\n');
        }
    }
    out.push_str("\n\\end{document}\n");
    out
}
