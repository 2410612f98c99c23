//! Concept autolinking over LaTeX entry content.

mod index;
mod link;
mod tokenize;

pub use index::{fold_char, normalize, Target, TermIndex};
pub use link::{
    link, link_text, own_terms, strip_link_markup, Link, LinkOptions, LinkedContent,
    LINK_COMMAND,
};
pub use tokenize::{tokenize, Diagnostic, Segment, SegmentKind, Tokens};
