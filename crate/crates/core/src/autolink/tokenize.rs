//! Splits LaTeX source into text, math, command, verbatim and comment
//! segments. Total: never fails, and the segments always tile the input.

use std::ops::Range;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentKind {
    Text,
    InlineMath,
    DisplayMath,
    Command,
    Verbatim,
    Comment,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub span: Range<usize>,
    pub content: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Byte offset of the opening delimiter.
    pub offset: usize,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Tokens {
    pub segments: Vec<Segment>,
    pub diagnostics: Vec<Diagnostic>,
}

impl Tokens {
    pub fn text_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Text)
    }
}

const MATH_ENVS: &[&str] = &[
    "equation", "equation*", "align", "align*", "eqnarray", "eqnarray*",
];
const VERBATIM_ENVS: &[&str] = &["verbatim", "verbatim*"];

/// Commands whose braced argument is a label, key or address rather than prose.
const KEY_COMMANDS: &[&str] = &[
    "begin", "end", "label", "ref", "eqref", "pageref", "cite", "url", "href", "nooslink",
    "includegraphics", "input", "include", "usepackage", "documentclass",
];

pub fn tokenize(src: &str) -> Tokens {
    let mut t = Tokenizer {
        src,
        bytes: src.as_bytes(),
        out: Tokens::default(),
    };
    t.run();
    t.out
}

struct Tokenizer<'a> {
    src: &'a str,
    bytes: &'a [u8],
    out: Tokens,
}

impl Tokenizer<'_> {
    fn run(&mut self) {
        let mut i = 0;
        let mut text_start = 0;
        while i < self.bytes.len() {
            let found = match self.bytes[i] {
                b'%' => Some((SegmentKind::Comment, self.line_end(i))),
                b'$' => self.dollar(i),
                b'\\' => self.backslash(i),
                _ => None,
            };
            match found {
                Some((kind, end)) => {
                    self.push(SegmentKind::Text, text_start..i);
                    self.push(kind, i..end);
                    i = end;
                    text_start = end;
                }
                None if self.out.diagnostics.last().is_some_and(|d| d.offset == i) => {
                    // unbalanced opener: everything from here on is text
                    i = self.bytes.len();
                }
                None => i += 1,
            }
        }
        self.push(SegmentKind::Text, text_start..self.bytes.len());
    }

    fn push(&mut self, kind: SegmentKind, span: Range<usize>) {
        if span.is_empty() {
            return;
        }
        if kind == SegmentKind::Text {
            if let Some(last) = self.out.segments.last_mut() {
                if last.kind == SegmentKind::Text && last.span.end == span.start {
                    last.span.end = span.end;
                    last.content.push_str(&self.src[span]);
                    return;
                }
            }
        }
        self.out.segments.push(Segment {
            kind,
            content: self.src[span.clone()].to_string(),
            span,
        });
    }

    fn unbalanced(&mut self, at: usize, what: &str) -> Option<(SegmentKind, usize)> {
        self.out.diagnostics.push(Diagnostic {
            offset: at,
            message: format!("unbalanced {what}; the rest of the input is treated as text"),
        });
        None
    }

    fn line_end(&self, from: usize) -> usize {
        self.bytes[from..]
            .iter()
            .position(|&b| b == b'\n')
            .map_or(self.bytes.len(), |p| from + p + 1)
    }

    /// Index just past the closing `close`, skipping backslash escapes.
    fn find_close(&self, from: usize, close: &[u8]) -> Option<usize> {
        let mut j = from;
        while j < self.bytes.len() {
            if self.bytes[j..].starts_with(close) {
                return Some(j + close.len());
            }
            j += if self.bytes[j] == b'\\' { 2 } else { 1 };
        }
        None
    }

    fn dollar(&mut self, i: usize) -> Option<(SegmentKind, usize)> {
        if self.bytes[i..].starts_with(b"$$") {
            match self.find_close(i + 2, b"$$") {
                Some(end) => Some((SegmentKind::DisplayMath, end)),
                None => self.unbalanced(i, "$$"),
            }
        } else {
            match self.find_close(i + 1, b"$") {
                Some(end) => Some((SegmentKind::InlineMath, end)),
                None => self.unbalanced(i, "$"),
            }
        }
    }

    fn backslash(&mut self, i: usize) -> Option<(SegmentKind, usize)> {
        let rest = &self.bytes[i + 1..];
        match rest.first() {
            None => Some((SegmentKind::Command, i + 1)),
            Some(b'(') => match self.find_close(i + 2, b"\\)") {
                Some(end) => Some((SegmentKind::InlineMath, end)),
                None => self.unbalanced(i, "\\("),
            },
            Some(b'[') => match self.find_close(i + 2, b"\\]") {
                Some(end) => Some((SegmentKind::DisplayMath, end)),
                None => self.unbalanced(i, "\\["),
            },
            Some(c) if c.is_ascii_alphabetic() => {
                let name_len = rest.iter().take_while(|b| b.is_ascii_alphabetic()).count();
                let name = &self.src[i + 1..i + 1 + name_len];
                let after = i + 1 + name_len;
                match name {
                    "verb" => self.verb(i, after),
                    "begin" => self.environment(i, after),
                    _ if KEY_COMMANDS.contains(&name) => {
                        Some((SegmentKind::Command, self.key_argument(after)))
                    }
                    _ => Some((SegmentKind::Command, after)),
                }
            }
            Some(_) => {
                let ch = self.src[i + 1..].chars().next().expect("nonempty");
                Some((SegmentKind::Command, i + 1 + ch.len_utf8()))
            }
        }
    }

    /// Extends over one `{...}` with no nested braces and no line break.
    fn key_argument(&self, at: usize) -> usize {
        if self.bytes.get(at) != Some(&b'{') {
            return at;
        }
        for (k, &b) in self.bytes[at + 1..].iter().enumerate() {
            match b {
                b'}' => return at + 1 + k + 1,
                b'{' | b'\n' => return at,
                _ => {}
            }
        }
        at
    }

    fn verb(&mut self, i: usize, after: usize) -> Option<(SegmentKind, usize)> {
        let mut open = after;
        if self.bytes.get(open) == Some(&b'*') {
            open += 1;
        }
        let Some(delim) = self.src[open..].chars().next() else {
            return self.unbalanced(i, "\\verb");
        };
        if delim.is_ascii_alphabetic() || delim.is_whitespace() {
            return Some((SegmentKind::Command, after));
        }
        let body = open + delim.len_utf8();
        match self.src[body..].find(delim) {
            Some(p) if !self.src[body..body + p].contains('\n') => {
                Some((SegmentKind::Verbatim, body + p + delim.len_utf8()))
            }
            _ => self.unbalanced(i, "\\verb"),
        }
    }

    fn environment(&mut self, i: usize, after: usize) -> Option<(SegmentKind, usize)> {
        let arg_end = self.key_argument(after);
        if arg_end == after {
            return Some((SegmentKind::Command, after));
        }
        let name = &self.src[after + 1..arg_end - 1];
        let kind = if MATH_ENVS.contains(&name) {
            SegmentKind::DisplayMath
        } else if VERBATIM_ENVS.contains(&name) {
            SegmentKind::Verbatim
        } else {
            return Some((SegmentKind::Command, arg_end));
        };
        let close = format!("\\end{{{name}}}");
        match self.src[arg_end..].find(&close) {
            Some(p) => Some((kind, arg_end + p + close.len())),
            None => self.unbalanced(i, &format!("\\begin{{{name}}}")),
        }
    }
}
