//! Participation scoring, the per-user score table and the closure timeline.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{FixedOffset, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::autolink::{tokenize, SegmentKind};
use crate::error::EngineError;
use crate::event::{Event, EventRecord};
use crate::ids::{ObjectId, UserId};
use crate::model::{Entry, ReviewState};
use crate::state::State;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RubricConfig {
    pub negligible_max_chars: usize,
    pub developed_min_chars: usize,
}

impl Default for RubricConfig {
    fn default() -> Self {
        Self {
            negligible_max_chars: 200,
            developed_min_chars: 800,
        }
    }
}

impl RubricConfig {
    pub fn validate(&self) -> Result<(), EngineError> {
        if self.negligible_max_chars == 0 || self.negligible_max_chars >= self.developed_min_chars
        {
            return Err(EngineError::InvalidRubric(format!(
                "need 0 < negligible_max_chars ({}) < developed_min_chars ({})",
                self.negligible_max_chars, self.developed_min_chars
            )));
        }
        Ok(())
    }
}

/// Bytes of non-whitespace characters outside `%` comments.
pub fn content_chars(content: &str) -> usize {
    tokenize(content)
        .segments
        .iter()
        .filter(|s| s.kind != SegmentKind::Comment)
        .flat_map(|s| s.content.chars())
        .filter(|c| !c.is_whitespace())
        .map(char::len_utf8)
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EntryScore<'a> {
    pub entry: &'a ObjectId,
    pub score: u8,
}

/// The rubric as a pure function of size, open corrections and review state.
pub fn score(chars: usize, open_corrections: usize, review: ReviewState, cfg: &RubricConfig) -> u8 {
    if chars <= cfg.negligible_max_chars {
        0
    } else if chars >= cfg.developed_min_chars {
        if open_corrections == 0 && review == ReviewState::Approved {
            3
        } else {
            2
        }
    } else {
        1
    }
}

pub fn score_entry<'a>(entry: &'a Entry, open_corrections: usize, cfg: &RubricConfig) -> EntryScore<'a> {
    EntryScore {
        entry: &entry.id,
        score: score(content_chars(&entry.content), open_corrections, entry.review_state, cfg),
    }
}

impl State {
    pub fn score_of(&self, id: &ObjectId, cfg: &RubricConfig) -> Result<u8, EngineError> {
        let e = self.entry(id)?;
        Ok(score_entry(e, self.open_correction_count(id), cfg).score)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub user: UserId,
    /// Entry counts for scores 0, 1, 2 and 3.
    pub counts: [usize; 4],
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParticipationReport {
    pub rows: Vec<ReportRow>,
    pub totals: [usize; 4],
    pub grand_total: usize,
}

impl ParticipationReport {
    pub fn row(&self, user: &UserId) -> Option<&ReportRow> {
        self.rows.iter().find(|r| &r.user == user)
    }

    /// One header line, then `user<delim>c0<delim>c1<delim>c2<delim>c3<delim>total` per user.
    pub fn to_delimited(&self, delim: char) -> String {
        let mut out = ["user", "c0", "c1", "c2", "c3", "total"].join(&delim.to_string());
        out.push('\n');
        for r in &self.rows {
            let [a, b, c, d] = r.counts;
            let _ = writeln!(out, "{}{delim}{a}{delim}{b}{delim}{c}{delim}{d}{delim}{}", r.user, r.total);
        }
        out
    }
}

/// One row per registered user, counting the live entries each one owns now.
pub fn participation_report(state: &State, cfg: &RubricConfig) -> ParticipationReport {
    let mut rows: BTreeMap<&UserId, [usize; 4]> = state.users().map(|u| (&u.id, [0; 4])).collect();
    for e in state.entries() {
        if let Some(owner) = e.owner.user() {
            let s = score_entry(e, state.open_correction_count(&e.id), cfg).score;
            rows.entry(owner).or_default()[s as usize] += 1;
        }
    }
    let rows: Vec<ReportRow> = rows
        .into_iter()
        .map(|(user, counts)| ReportRow {
            user: user.clone(),
            total: counts.iter().sum(),
            counts,
        })
        .collect();
    let mut totals = [0; 4];
    for r in &rows {
        for (t, c) in totals.iter_mut().zip(r.counts) {
            *t += c;
        }
    }
    ParticipationReport {
        grand_total: totals.iter().sum(),
        rows,
        totals,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureHistogram {
    pub from: NaiveDate,
    pub to: NaiveDate,
    /// Offset from UTC, in seconds, used to assign local days.
    pub tz_offset_secs: i32,
    /// Days with at least one closure.
    pub days: BTreeMap<NaiveDate, usize>,
    pub total: usize,
    /// Share of closures on the busiest tenth (rounded up) of active days.
    pub bunching_index: Option<f64>,
}

impl ClosureHistogram {
    /// Number of calendar days on the axis, including empty ones.
    pub fn axis_days(&self) -> i64 {
        (self.to - self.from).num_days() + 1
    }

    /// `day<TAB>count` lines, then the bunching index (`-` when absent).
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("day\tcount\n");
        for (d, n) in &self.days {
            let _ = writeln!(out, "{d}\t{n}");
        }
        match self.bunching_index {
            Some(b) => {
                let _ = writeln!(out, "bunching_index\t{b:.6}");
            }
            None => out.push_str("bunching_index\t-\n"),
        }
        out
    }
}

pub fn bunching_index(counts: impl IntoIterator<Item = usize>) -> Option<f64> {
    let mut counts: Vec<usize> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: usize = counts.iter().sum();
    if total == 0 {
        return None;
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let top = counts.len().div_ceil(10);
    Some(counts[..top].iter().sum::<usize>() as f64 / total as f64)
}

/// Buckets correction resolutions by local calendar day within `from..=to`.
pub fn closure_histogram(
    records: &[EventRecord],
    from: NaiveDate,
    to: NaiveDate,
    tz: FixedOffset,
) -> Result<ClosureHistogram, EngineError> {
    if from > to {
        return Err(EngineError::InvalidRange {
            from: from.to_string(),
            to: to.to_string(),
        });
    }
    let mut days: BTreeMap<NaiveDate, usize> = BTreeMap::new();
    for r in records {
        if let Event::CorrectionResolved(_) = r.event {
            let day = r.ts.with_timezone(&tz).date_naive();
            if (from..=to).contains(&day) {
                *days.entry(day).or_default() += 1;
            }
        }
    }
    Ok(ClosureHistogram {
        from,
        to,
        tz_offset_secs: tz.local_minus_utc(),
        total: days.values().sum(),
        bunching_index: bunching_index(days.values().copied()),
        days,
    })
}
