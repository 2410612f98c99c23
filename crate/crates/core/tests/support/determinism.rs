//! Random workloads over every command, followed by replay comparisons.

#![allow(dead_code)]

use noosphere_core::notify::InboxFilter;
use noosphere_core::store::{log_bytes, parse_log};
use noosphere_core::testkit::world;
use noosphere_core::{
    rebuild_state, Channel, EntryKind, NewEntry, ObjectId, ObjectRef, ReviewState, Role, Severity,
    UserId,
};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn pick<'a, T>(rng: &mut ChaCha8Rng, xs: &'a [T]) -> Option<&'a T> {
    xs.choose(rng)
}

/// Drives one engine until its log holds `events` records; returns the number
/// of rejected commands along the way.
pub fn workload(seed: u64, events: u64) -> (noosphere_core::Engine, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = world();
    let mut users: Vec<UserId> = vec![w.admin.clone(), w.instructor.clone(), w.auditor.clone()];
    users.extend(w.students.iter().cloned());
    let mut entries: Vec<ObjectId> = Vec::new();
    let mut corrections: Vec<ObjectId> = Vec::new();
    let mut requests: Vec<ObjectId> = Vec::new();
    let mut messages: Vec<ObjectId> = Vec::new();
    let mut rejected = 0;
    let e = &w.engine;
    while e.snapshot().last_seq() < events {
        if rng.random_range(0..3) == 0 {
            w.tick();
        }
        let u = pick(&mut rng, &users).unwrap().clone();
        let ent = pick(&mut rng, &entries).cloned();
        let res: Result<(), noosphere_core::EngineError> = match rng.random_range(0..18) {
            0 | 1 => e
                .create_entry(&u, NewEntry::new(format!("Topic {}", rng.random_range(0..50)), EntryKind::Concept, "A short body."))
                .map(|x| entries.push(x.id)),
            2 => match ent {
                Some(x) => e.revise_entry(&u, &x, format!("Body {}", rng.random::<u32>()), None).map(drop),
                None => continue,
            },
            3 => match ent {
                Some(x) => e.orphan_entry(&u, &x).map(drop),
                None => continue,
            },
            4 => match ent {
                Some(x) => e.adopt_entry(&u, &x).map(drop),
                None => continue,
            },
            5 => match ent {
                Some(x) => {
                    let r = pick(&mut rng, &users).unwrap().clone();
                    e.transfer_entry(&u, &x, &r).map(drop)
                }
                None => continue,
            },
            6 => match ent {
                Some(x) => e.file_correction(&u, &x, "Fix this.", Severity::Error).map(|c| corrections.push(c.id)),
                None => continue,
            },
            7 => match pick(&mut rng, &corrections).cloned() {
                Some(c) => e.resolve_correction(&u, &c, "fixed", "done").map(drop),
                None => continue,
            },
            8 => e
                .create_request(&u, format!("Wanted {}", rng.random_range(0..30)), "Please write this.")
                .map(|r| requests.push(r.id)),
            9 => match (pick(&mut rng, &requests).cloned(), ent) {
                (Some(r), Some(x)) => e.fulfill_request(&u, &r, &x).map(drop),
                _ => continue,
            },
            10 | 11 => {
                let target = if rng.random_range(0..2) == 0 {
                    pick(&mut rng, &messages).cloned().map(ObjectRef::message)
                } else {
                    ent.map(ObjectRef::entry)
                };
                match target {
                    Some(t) => e.post_message(&u, &t, None, "A comment.").map(|m| messages.push(m.id)),
                    None => continue,
                }
            }
            12 => match ent {
                Some(x) => e
                    .add_watch(&u, &ObjectRef::entry(x), vec![Channel::Inbox, Channel::Email])
                    .map(drop),
                None => continue,
            },
            13 => match e.inbox(&u, InboxFilter::Unread) {
                Ok(list) if !list.is_empty() => {
                    let n = list[rng.random_range(0..list.len())].id.clone();
                    e.mark_read(&u, &n).map(drop)
                }
                _ => continue,
            },
            14 => match ent {
                Some(x) => e.set_review_state(&u, &x, ReviewState::Approved).map(drop),
                None => continue,
            },
            15 => match ent {
                Some(x) => e.delete_entry(&u, &x).map(drop),
                None => continue,
            },
            16 => match ent {
                Some(x) => e.remove_watch(&u, &ObjectRef::entry(x)),
                None => continue,
            },
            _ => {
                let role = *pick(&mut rng, &[Role::Student, Role::Auditor, Role::Instructor]).unwrap();
                let target = pick(&mut rng, &users[1..]).unwrap().clone();
                e.set_role(&u, &target, role).map(drop)
            }
        };
        if res.is_err() {
            rejected += 1;
        }
    }
    (w.engine, rejected)
}

/// Live state equals the state rebuilt from the log, and two replays of the
/// serialized log produce identical snapshot bytes.
pub fn check(sequences: u64, events: u64) -> Result<String, String> {
    let mut kinds = std::collections::BTreeSet::new();
    for seed in 0..sequences {
        let (engine, _) = workload(seed, events);
        let records = engine.records();
        for r in &records {
            kinds.insert(serde_json::to_value(r).unwrap()["kind"].as_str().unwrap().to_string());
        }
        let live = engine.snapshot().to_snapshot();
        let rebuilt = rebuild_state(&records).map_err(|e| e.to_string())?.to_snapshot();
        if live != rebuilt {
            return Err(format!("seed {seed}: rebuilt state differs from live state"));
        }
        let bytes = log_bytes(&records);
        let once = rebuild_state(&parse_log(&bytes[..]).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .to_snapshot();
        let twice = rebuild_state(&parse_log(&bytes[..]).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?
            .to_snapshot();
        if once != twice || once != live {
            return Err(format!("seed {seed}: replays of the serialized log differ"));
        }
    }
    if kinds.len() != noosphere_core::EVENT_KINDS.len() {
        return Err(format!("only {} of {} event kinds exercised", kinds.len(), noosphere_core::EVENT_KINDS.len()));
    }
    Ok(format!(
        "{sequences} sequences of {events} events, {} event kinds exercised, zero diffs",
        kinds.len()
    ))
}
