//! Drives the engine through a fourteen-week course and records the log.
//!
//! Shared by `examples/gen_fixtures.rs`, which writes `testdata/`, and by the
//! drift test, which checks the committed files still match.

use std::collections::BTreeMap;
use std::sync::Arc;

use chrono::{DateTime, Duration, TimeZone, Utc};
use noosphere_core::export::Collection;
use noosphere_core::store::log_bytes;
use noosphere_core::{
    Channel, Engine, EntryKind, ManualClock, NewEntry, ObjectId, ObjectRef, ReviewState, Role,
    Severity, UserId,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const CONCEPTS: [&str; 79] = [
    "Autonomization",
    "Banach fixed point theorem",
    "Bernoulli equation",
    "Cauchy sequence",
    "Cayley-Hamilton theorem",
    "Characterization of homogeneous equations",
    "Characterization of linear ODEs",
    "Characterization of separable equations",
    "Characterization of the Bernoulli equation",
    "Characterization of trivial symmetries",
    "Compact",
    "Completeness of a compact subspace",
    "Constant coefficient symmetries",
    "Constant of integration",
    "Continuously differentiable",
    "Contraction mapping",
    "Curve",
    "Derivation of the determining equation",
    "Determining equation",
    "Diagonalization",
    "Differential form of an ODE",
    "Differential properties of flows",
    "Directional derivative",
    "Distance between functions",
    "Existence of flows",
    "Existence of integrating factor",
    "Existence theorem for IVP",
    "Exponential of a matrix",
    "Exponential of an irreducible block",
    "Extended eigenspace",
    "Flow of a linear system",
    "Homogeneous equation",
    "Homogeneous form of the determining equation",
    "Implicit function theorem",
    "Implicit solution",
    "Infinitesimal symmetry",
    "Integral curve",
    "Integrating factor",
    "Invariant subspace",
    "Inverse function theorem",
    "Irreducible nilpotent transformation",
    "Iterative definition of sine and cosine",
    "Jacobian",
    "Jordan canonical form",
    "Limit point",
    "Limit point",
    "Linear ODE",
    "Linear system",
    "Lipschitz",
    "Method of integrating factors",
    "Method of standard coordinates",
    "Metric space",
    "Nilpotent transformation",
    "Picard iteration",
    "Proof completeness wrt uniform convergence",
    "Proof of existence of flows",
    "Proof of rectification theorem",
    "Proof of the Banach fixed point theorem",
    "Proof of the existence theorem for IVPs",
    "Push forward",
    "Rectification theorem",
    "Reducible transformation",
    "Relation between symmetries and integrating factors",
    "Relation between symmetries and solution curves",
    "Separation of variables",
    "Slope evolution formula",
    "Slope transformation formula",
    "Solution curve",
    "Solution of the Bernoulli equation using the method of integrating factors",
    "Supremum",
    "Symmetries of homogeneous equations",
    "Symmetries of linear equations",
    "Symmetries of separable equations",
    "Symmetry",
    "The relation between limits and limit points",
    "Transformation",
    "Trivial symmetry",
    "Uniform convergence",
    "Vector field",
];

pub const ASSIGNMENTS: [(&str, &[&str]); 4] = [
    (
        "Foundations assignment",
        &[
            "Foundations problem 2a",
            "Foundations problem 2b",
            "Foundations problem 3a",
            "Foundations problem 3b",
            "Foundations problem 3c",
            "Foundations problem 4a",
            "Foundations problem 4b",
            "Foundations problem 4c",
            "Foundations problems 5a 5b",
            "Foundations problem 5c",
            "Foundations problem 5d",
            "Foundations problem 5e",
            "Foundations problem 5f",
            "Foundations problem 5g",
            "Foundations problem 5h",
            "Foundations problem 5i",
            "Foundations problems 5j",
            "Foundations problem 6a",
            "Foundations problem 6d",
            "Foundations problems 6b 6c",
            "Foundations problems 6e",
        ],
    ),
    (
        "Flows assignment",
        &[
            "Flows problem 2a",
            "Flows problem 2b",
            "Flows problem 3",
            "Flows problem 4",
            "Flows problem 5",
            "Flows problem 6a",
            "Flows problem 6b",
            "Flows problem 7",
            "Flows problem 8",
            "Flows problem 9a",
            "Flows problem 9b",
        ],
    ),
    (
        "Scalar equation problems.",
        &[
            "Scalar equations problem 1",
            "Scalar equations problem 2",
            "Scalar equations problem 3",
            "Scalar equations problem 4",
            "Scalar equations problem 5",
        ],
    ),
    (
        "Linear algebra problems.",
        &[
            "linear algebra problem 1",
            "linear algebra problem 2",
            "linear algebra problem 3",
            "linear algebra problem 4",
            "linear algebra problem 5",
            "linear algebra problem 6",
        ],
    ),
];

/// Day each problem set is posted, counted from the first Monday of term.
const ASSIGNMENT_DAYS: [i64; 4] = [14, 35, 56, 77];

const UNADOPTED: [&str; 4] = [
    "Foundations problem 6d",
    "Flows problem 8",
    "Scalar equations problem 5",
    "linear algebra problem 6",
];

/// Index into `CONCEPTS` of entries written by staff. 44 is the first of the
/// two "Limit point" entries.
const INSTRUCTOR_CONCEPTS: [usize; 7] = [10, 51, 69, 44, 77, 14, 16];
const AUDITOR_CONCEPTS: [usize; 3] = [42, 22, 78];

const UNFILLED_REQUESTS: [&str; 8] = [
    "Gronwall inequality",
    "Peano existence theorem",
    "Phase portrait",
    "Stability of equilibria",
    "Variation of parameters",
    "Wronskian",
    "Lie bracket",
    "Riccati equation",
];

/// Final score classes per student: counts of 0, 1, 2 and 3. The published
/// rows for students 2 and 3 add up to 40 and 35 against totals of 39 and 32;
/// the fixture keeps the totals and takes the difference out of the last column.
const CLASSES: [[usize; 4]; 3] = [[0, 1, 10, 26], [1, 2, 10, 26], [3, 6, 10, 13]];
const CONCEPT_SPLIT: [usize; 3] = [24, 25, 20];
const EXERCISE_SPLIT: [usize; 3] = [13, 14, 12];
const CORRECTED_TOP: usize = 47;

/// Evenings on which each student works through their open corrections.
const BURST_DAYS: [&[i64]; 3] = [
    &[13, 27, 41, 55, 69, 83, 97],
    &[12, 26, 40, 54, 68, 82, 96],
    &[20, 48, 76, 97],
];

const BANACH_PROOF: &str = include_str!("../../testdata/entries/banach_proof.tex");
const SYMMETRY: &str = include_str!("../../testdata/entries/symmetry.tex");
const FLOWS_9A: &str = include_str!("../../testdata/entries/flows_9a.tex");

pub struct Fixture {
    pub trial: Vec<u8>,
    pub notes: Vec<u8>,
    pub collections: Vec<Collection>,
    pub meta: serde_json::Value,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Item {
    Concept(usize),
    Exercise(usize, usize),
}

#[derive(Debug, Clone)]
enum Target {
    Entry(Item),
    Request(usize),
    Correction(usize),
    Message(usize),
}

#[derive(Debug, Clone)]
enum Action {
    Request { req: usize, title: String, description: String },
    Create { item: Item, author: usize, content: String },
    Fulfill { req: usize, item: Item, actor: usize },
    Orphan { item: Item },
    Adopt { item: Item, actor: usize },
    Revise { item: Item, actor: usize, content: String },
    File { corr: usize, item: Item, filer: usize, text: String, severity: Severity },
    Resolve { corr: usize, actor: usize, action: String, note: String },
    Review { item: Item, state: ReviewState },
    Post { msg: usize, author: usize, target: Target, subject: Option<String>, body: String },
    Watch { user: usize, target: Target, channels: Vec<Channel> },
}

/// User slots: 0 admin, 1 instructor, 2 auditor, 3..=5 students.
const USERS: [(&str, &str, Role); 6] = [
    ("admin", "Site administrator", Role::Admin),
    ("instructor", "Course instructor", Role::Instructor),
    ("auditor", "Auditing student", Role::Auditor),
    ("student1", "Student 1", Role::Student),
    ("student2", "Student 2", Role::Student),
    ("student3", "Student 3", Role::Student),
];
const INSTRUCTOR: usize = 1;
const AUDITOR: usize = 2;

fn start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2003, 1, 6, 0, 0, 0).unwrap()
}

fn at(day: i64, hour: i64, minute: i64) -> DateTime<Utc> {
    start() + Duration::days(day) + Duration::hours(hour) + Duration::minutes(minute)
}

fn title(item: Item) -> &'static str {
    match item {
        Item::Concept(i) => CONCEPTS[i],
        Item::Exercise(a, k) => ASSIGNMENTS[a].1[k],
    }
}

fn kind(item: Item) -> EntryKind {
    let t = title(item);
    match item {
        Item::Exercise(..) => EntryKind::Exercise,
        _ if t.starts_with("Proof") => EntryKind::Proof,
        _ if t.contains("theorem") || t.starts_with("Characterization") => EntryKind::Theorem,
        _ if t.starts_with("Symmetries of") || t.starts_with("Solution of") => EntryKind::Example,
        _ => EntryKind::Concept,
    }
}

fn synonyms(item: Item) -> Vec<String> {
    let s: &[&str] = match title(item) {
        "Banach fixed point theorem" => &["contraction mapping principle"],
        "Picard iteration" => &["method of successive approximations"],
        "Linear ODE" => &["linear differential equation"],
        "Separation of variables" => &["separable equation"],
        "Lipschitz" => &["Lipschitz condition"],
        _ => &[],
    };
    s.iter().map(|x| x.to_string()).collect()
}

fn non_space(s: &str) -> usize {
    s.chars().filter(|c| !c.is_whitespace()).map(char::len_utf8).sum()
}

const SENTENCES: [&str; 10] = [
    "Let $U\\subseteq\\mathbb{R}^2$ be open and let $\\omega\\colon U\\to\\mathbb{R}$ be smooth.",
    "Throughout we write $y'=\\omega(x,y)$ for the scalar equation under study.",
    "A short computation gives \\[ \\frac{d}{dx}F(x,y(x)) = F_x + \\omega F_y. \\]",
    "The argument uses {m} in an essential way.",
    "See the entry on {m} for the background needed here.",
    "\\begin{equation*} \\hat y = y + \\epsilon\\,\\eta(x,y) + O(\\epsilon^2) \\end{equation*}",
    "For a concrete case take $\\omega(x,y) = x + y$ on the whole plane.",
    "The same idea appears again when {m} is discussed.",
    "Uniqueness follows once the estimate $|\\phi_1 - \\phi_2| \\le K|t - t_0|$ is in hand.",
    "We keep the notation of the lectures: $\\Phi_t$ denotes the flow at time $t$.",
];

struct Writer<'r> {
    rng: &'r mut ChaCha8Rng,
}

impl Writer<'_> {
    fn mention(&mut self) -> String {
        let k = self.rng.random_range(0..CONCEPTS.len());
        CONCEPTS[k].to_lowercase()
    }

    fn sentence(&mut self) -> String {
        let s = SENTENCES[self.rng.random_range(0..SENTENCES.len())];
        if s.contains("{m}") {
            s.replace("{m}", &self.mention())
        } else {
            s.to_string()
        }
    }

    fn body(&mut self, head: String, min: usize) -> String {
        let mut out = head;
        while non_space(&out) < min {
            out.push(' ');
            out.push_str(&self.sentence());
            if self.rng.random_range(0..5) == 0 {
                out.push_str("\n\n");
            }
        }
        out.push('\n');
        out
    }

    fn stub(&mut self, item: Item) -> String {
        format!("\\textbf{{{:?}}}~~{} (to be written).\n", kind(item), title(item))
    }

    fn minimal(&mut self, item: Item) -> String {
        let head = format!("\\textbf{{{:?}}}~~This entry is about {}.", kind(item), title(item).to_lowercase());
        let s = self.body(head, 230);
        assert!((201..800).contains(&non_space(&s)));
        s
    }

    fn statement(&mut self, item: Item) -> String {
        if title(item) == "Flows problem 9a" {
            let end = FLOWS_9A.find("\\noindent\nWe first").unwrap();
            return FLOWS_9A[..end].to_string();
        }
        let head = format!("\\textbf{{Problem}}~~{}.", title(item));
        let s = self.body(head, 230);
        assert!((201..800).contains(&non_space(&s)));
        s
    }

    fn developed(&mut self, item: Item) -> String {
        let fixed = match title(item) {
            "Proof of the Banach fixed point theorem" => Some(BANACH_PROOF),
            "Symmetry" => Some(SYMMETRY),
            "Flows problem 9a" => Some(FLOWS_9A),
            _ => None,
        };
        if let Some(text) = fixed {
            return text.to_string();
        }
        let head = format!(
            "\\textbf{{{:?}}}~~We develop {} in detail.",
            kind(item),
            title(item).to_lowercase()
        );
        let s = self.body(head, 900);
        assert!(non_space(&s) >= 800);
        s
    }
}

struct Plan {
    actions: Vec<(DateTime<Utc>, usize, Action)>,
}

impl Plan {
    fn push(&mut self, ts: DateTime<Utc>, action: Action) {
        let n = self.actions.len();
        self.actions.push((ts, n, action));
    }
}

/// Ownership and final class of every student-owned item.
struct Holding {
    item: Item,
    student: usize,
    class: usize,
}

fn is_special(item: Item) -> bool {
    matches!(
        title(item),
        "Proof of the Banach fixed point theorem" | "Symmetry" | "Flows problem 9a"
    )
}

fn allocate(rng: &mut ChaCha8Rng) -> Vec<Holding> {
    let staff: Vec<usize> = INSTRUCTOR_CONCEPTS.iter().chain(&AUDITOR_CONCEPTS).copied().collect();
    let mut concepts: Vec<Item> = (0..CONCEPTS.len())
        .filter(|i| !staff.contains(i))
        .map(Item::Concept)
        .collect();
    concepts.shuffle(rng);
    let mut exercises: Vec<Item> = ASSIGNMENTS
        .iter()
        .enumerate()
        .flat_map(|(a, (_, ps))| (0..ps.len()).map(move |k| Item::Exercise(a, k)))
        .filter(|&it| !UNADOPTED.contains(&title(it)))
        .collect();
    exercises.shuffle(rng);
    assert_eq!(concepts.len(), CONCEPT_SPLIT.iter().sum::<usize>());
    assert_eq!(exercises.len(), EXERCISE_SPLIT.iter().sum::<usize>());

    let mut out = Vec::new();
    let (mut ci, mut ei) = (0, 0);
    for s in 0..3 {
        let mine_c: Vec<Item> = concepts[ci..ci + CONCEPT_SPLIT[s]].to_vec();
        let mine_e: Vec<Item> = exercises[ei..ei + EXERCISE_SPLIT[s]].to_vec();
        ci += CONCEPT_SPLIT[s];
        ei += EXERCISE_SPLIT[s];
        let mut classes: Vec<usize> = (0..4).flat_map(|c| std::iter::repeat_n(c, CLASSES[s][c])).collect();
        assert_eq!(classes.len(), mine_c.len() + mine_e.len());
        let mut pool: Vec<Item> = mine_c.iter().chain(&mine_e).copied().collect();
        pool.shuffle(rng);
        // stubs are never exercises, the three showcase entries are finished
        let mut assigned: Vec<(Item, usize)> = Vec::new();
        for _ in 0..CLASSES[s][0] {
            let k = pool
                .iter()
                .position(|&it| matches!(it, Item::Concept(_)) && !is_special(it))
                .unwrap();
            assigned.push((pool.remove(k), 0));
            classes.remove(0);
        }
        while let Some(k) = pool.iter().position(|&it| is_special(it)) {
            assigned.push((pool.remove(k), 3));
            let c = classes.iter().position(|&c| c == 3).unwrap();
            classes.remove(c);
        }
        classes.shuffle(rng);
        assigned.extend(pool.into_iter().zip(classes));
        for (item, class) in assigned {
            out.push(Holding {
                item,
                student: 3 + s,
                class,
            });
        }
    }
    out.sort_by_key(|h| h.item);
    out
}

pub fn generate() -> Fixture {
    let mut rng = ChaCha8Rng::seed_from_u64(5190);
    let holdings = allocate(&mut rng);
    let mut w = Writer { rng: &mut ChaCha8Rng::seed_from_u64(2003) };
    let mut plan = Plan { actions: Vec::new() };

    // requests: one per student concept except nine, plus eight nobody takes
    let mut student_concepts: Vec<&Holding> = holdings
        .iter()
        .filter(|h| matches!(h.item, Item::Concept(_)))
        .collect();
    student_concepts.shuffle(&mut rng);
    let backed: Vec<&Holding> = student_concepts[..60].to_vec();
    let mut request_titles: Vec<(String, Option<usize>)> = backed
        .iter()
        .enumerate()
        .map(|(k, h)| (title(h.item).to_string(), Some(k)))
        .chain(UNFILLED_REQUESTS.iter().map(|t| (t.to_string(), None)))
        .collect();
    request_titles.shuffle(&mut rng);
    let mut request_day: BTreeMap<usize, (usize, i64)> = BTreeMap::new();
    for (r, (t, backer)) in request_titles.iter().enumerate() {
        let week = (r * 12 / request_titles.len()) as i64;
        let day = week * 7;
        plan.push(
            at(day, 10, r as i64),
            Action::Request {
                req: r,
                title: t.clone(),
                description: format!("Write an entry on {} as covered in lecture.", t.to_lowercase()),
            },
        );
        if let Some(b) = backer {
            request_day.insert(*b, (r, day));
        }
    }

    // staff entries
    for (slot, list) in [(INSTRUCTOR, &INSTRUCTOR_CONCEPTS[..]), (AUDITOR, &AUDITOR_CONCEPTS[..])] {
        for (k, &i) in list.iter().enumerate() {
            let item = Item::Concept(i);
            let day = 1 + (k as i64) + if slot == AUDITOR { 3 } else { 0 };
            plan.push(at(day, 8, k as i64), Action::Create { item, author: slot, content: w.developed(item) });
            plan.push(at(day + 1, 8, 30 + k as i64), Action::Review { item, state: ReviewState::Approved });
        }
    }

    // problem sets: posted, released for adoption
    for (a, (_, problems)) in ASSIGNMENTS.iter().enumerate() {
        for k in 0..problems.len() {
            let item = Item::Exercise(a, k);
            let day = ASSIGNMENT_DAYS[a];
            plan.push(at(day, 10, k as i64), Action::Create { item, author: INSTRUCTOR, content: w.statement(item) });
            plan.push(at(day, 11, k as i64), Action::Orphan { item });
        }
    }

    let mut top: Vec<Item> = holdings.iter().filter(|h| h.class == 3).map(|h| h.item).collect();
    top.shuffle(&mut rng);
    top.truncate(CORRECTED_TOP);

    let mut corr = 0usize;
    let mut first_correction_of: BTreeMap<usize, (usize, DateTime<Utc>)> = BTreeMap::new();
    for h in &holdings {
        let item = h.item;
        let student = h.student;
        let dev_base = match item {
            Item::Concept(_) => {
                let (req, rday) = match backed.iter().position(|b| b.item == item) {
                    Some(k) => {
                        let (r, d) = request_day[&k];
                        (Some(r), d)
                    }
                    None => (None, rng.random_range(2..60)),
                };
                let day = rday + 1 + rng.random_range(0..8);
                let hour = rng.random_range(14..22);
                let content = if h.class == 0 { w.stub(item) } else { w.minimal(item) };
                plan.push(at(day, hour, 0), Action::Create { item, author: student, content });
                if let Some(req) = req {
                    plan.push(at(day, hour, 30), Action::Fulfill { req, item, actor: student });
                }
                day + 5 + rng.random_range(0..14)
            }
            Item::Exercise(a, _) => {
                let day = ASSIGNMENT_DAYS[a] + 1 + rng.random_range(0..4);
                plan.push(at(day, rng.random_range(15..23), 0), Action::Adopt { item, actor: student });
                day + 2 + rng.random_range(0..8)
            }
        };
        if h.class < 2 {
            continue;
        }
        let dev = dev_base.min(90);
        plan.push(at(dev, 21, 0), Action::Revise { item, actor: student, content: w.developed(item) });
        let file_day = dev + 1 + rng.random_range(0..4);
        let file_ts = at(file_day, 9, rng.random_range(0..50));
        if h.class == 2 {
            plan.push(
                file_ts,
                Action::File {
                    corr,
                    item,
                    filer: INSTRUCTOR,
                    text: "The argument is incomplete; please justify the key step.".into(),
                    severity: Severity::Error,
                },
            );
            plan.push(file_ts + Duration::minutes(5), Action::Review { item, state: ReviewState::NeedsWork });
            corr += 1;
        } else if top.contains(&item) {
            plan.push(
                file_ts,
                Action::File {
                    corr,
                    item,
                    filer: INSTRUCTOR,
                    text: "Please state the hypotheses precisely.".into(),
                    severity: if rng.random_range(0..2) == 0 { Severity::Improvement } else { Severity::Style },
                },
            );
            first_correction_of.entry(student).or_insert((corr, file_ts));
            let burst = BURST_DAYS[student - 3]
                .iter()
                .copied()
                .find(|&d| d > file_day)
                .unwrap_or(98);
            let minute = rng.random_range(0..40);
            let mut revised = w.developed(item);
            revised.push_str("\nRevised: the hypotheses are now stated in full.\n");
            plan.push(at(burst, 20, minute), Action::Revise { item, actor: student, content: revised });
            plan.push(
                at(burst, 20, minute + 10),
                Action::Resolve {
                    corr,
                    actor: student,
                    action: "revised the entry".into(),
                    note: "hypotheses added as requested".into(),
                },
            );
            let approve = (burst + 1 + rng.random_range(0..3)).min(101);
            plan.push(at(approve, 8, rng.random_range(0..50)), Action::Review { item, state: ReviewState::Approved });
            corr += 1;
        } else {
            let approve = (dev + 2 + rng.random_range(0..5)).min(101);
            plan.push(at(approve, 8, rng.random_range(0..50)), Action::Review { item, state: ReviewState::Approved });
        }
    }

    // the one student-filed correction, on an instructor entry
    let supremum = Item::Concept(69);
    plan.push(
        at(30, 14, 0),
        Action::File {
            corr,
            item: supremum,
            filer: 4,
            text: "The example uses a set that is not bounded above.".into(),
            severity: Severity::Error,
        },
    );
    let mut fixed = w.developed(supremum);
    fixed.push_str("\nThe example set is now bounded above.\n");
    plan.push(at(32, 10, 0), Action::Revise { item: supremum, actor: INSTRUCTOR, content: fixed });
    plan.push(
        at(32, 10, 5),
        Action::Resolve {
            corr,
            actor: INSTRUCTOR,
            action: "replaced the example".into(),
            note: "the original set was unbounded, as pointed out".into(),
        },
    );
    corr += 1;

    // discussion: every thread is between one student and the instructor
    let req0 = request_day[&0].0;
    let req0_day = request_day[&0].1;
    let asker = backed[0].student;
    plan.push(
        at(req0_day, 12, 0),
        Action::Post {
            msg: 0,
            author: asker,
            target: Target::Request(req0),
            subject: Some("Scope of this entry".into()),
            body: "Should the entry include the proof or only the statement?".into(),
        },
    );
    plan.push(at(req0_day, 16, 0), Action::Post {
        msg: 1,
        author: INSTRUCTOR,
        target: Target::Message(0),
        subject: None,
        body: "The statement and one worked example are enough; the proof can be its own entry.".into(),
    });
    plan.push(at(req0_day, 19, 0), Action::Post {
        msg: 2,
        author: asker,
        target: Target::Message(1),
        subject: None,
        body: "Thanks, will do.".into(),
    });
    let (c3, c3_ts) = first_correction_of[&5];
    plan.push(c3_ts + Duration::hours(6), Action::Post {
        msg: 3,
        author: 5,
        target: Target::Correction(c3),
        subject: Some("Which hypotheses?".into()),
        body: "Do you mean continuity of $\\omega$ or the Lipschitz bound as well?".into(),
    });
    plan.push(c3_ts + Duration::hours(9), Action::Post {
        msg: 4,
        author: INSTRUCTOR,
        target: Target::Message(3),
        subject: None,
        body: "Both. State where each one is used.".into(),
    });
    let flows_2a = Item::Exercise(1, 0);
    let owner_2a = holdings.iter().find(|h| h.item == flows_2a).unwrap().student;
    plan.push(at(40, 13, 0), Action::Post {
        msg: 5,
        author: owner_2a,
        target: Target::Entry(flows_2a),
        subject: Some("Domain of the flow".into()),
        body: "Is it fine to restrict to $y>0$ here?".into(),
    });
    plan.push(at(41, 9, 0), Action::Post {
        msg: 6,
        author: INSTRUCTOR,
        target: Target::Message(5),
        subject: None,
        body: "Yes, but say so explicitly at the start.".into(),
    });
    plan.push(at(60, 9, 0), Action::Post {
        msg: 7,
        author: INSTRUCTOR,
        target: Target::Entry(Item::Exercise(1, 8)),
        subject: Some("Still open".into()),
        body: "This problem is still available for adoption.".into(),
    });

    // watches
    plan.push(at(12, 9, 0), Action::Watch {
        user: AUDITOR,
        target: Target::Entry(Item::Concept(51)),
        channels: vec![Channel::Inbox, Channel::Email],
    });
    plan.push(at(12, 9, 5), Action::Watch {
        user: 4,
        target: Target::Entry(Item::Concept(44)),
        channels: vec![Channel::Inbox],
    });
    let mut metric = w.developed(Item::Concept(51));
    metric.push_str("\nAdded: every metric space is Hausdorff.\n");
    plan.push(at(40, 11, 0), Action::Revise { item: Item::Concept(51), actor: INSTRUCTOR, content: metric });

    let stubs: Vec<&Holding> = holdings.iter().filter(|h| h.class == 0).collect();
    let mut tail = Plan { actions: Vec::new() };
    for (k, h) in stubs.iter().enumerate() {
        tail.push(
            at(102, 20, k as i64),
            Action::Revise { item: h.item, actor: h.student, content: w.developed(h.item) },
        );
    }

    let run = Runner::new();
    run.execute(plan);
    let trial = log_bytes(&run.engine.records());
    run.execute(tail);
    let notes = log_bytes(&run.engine.records());

    let collections = ASSIGNMENTS
        .iter()
        .enumerate()
        .map(|(a, (name, ps))| Collection {
            name: name.to_string(),
            members: (0..ps.len()).map(|k| run.entry(Item::Exercise(a, k))).collect(),
        })
        .collect();
    let meta = json!({
        "description": "Fourteen-week course run: three students, one instructor, one auditor.",
        "fixture_conventions": {
            "unfilled_total": 12,
            "active_requests": UNFILLED_REQUESTS.len(),
            "unadopted_exercises": UNADOPTED.len(),
            "note": "the split of the unfilled total between requests and unadopted exercises is a fixture choice",
            "non_student_entries": {
                "instructor_concepts": INSTRUCTOR_CONCEPTS.len(),
                "auditor_concepts": AUDITOR_CONCEPTS.len(),
                "orphaned_exercises": UNADOPTED.len(),
            },
        },
        "corrections": corr,
        "notes_tail": "math5190_notes.jsonl is this log plus revisions that develop the negligible entries",
    });
    Fixture { trial, notes, collections, meta }
}

struct Runner {
    engine: Engine,
    clock: Arc<ManualClock>,
    users: Vec<UserId>,
    entries: std::cell::RefCell<BTreeMap<Item, ObjectId>>,
    requests: std::cell::RefCell<BTreeMap<usize, ObjectId>>,
    corrections: std::cell::RefCell<BTreeMap<usize, ObjectId>>,
    messages: std::cell::RefCell<BTreeMap<usize, ObjectId>>,
}

impl Runner {
    fn new() -> Self {
        let clock = Arc::new(ManualClock::new(at(0, 9, 0)));
        let engine = Engine::in_memory(clock.clone());
        let users: Vec<UserId> = USERS.iter().map(|(id, ..)| UserId::new(*id).unwrap()).collect();
        engine.bootstrap_admin(&users[0], USERS[0].1, "admin@example.org").unwrap();
        for (k, (id, name, role)) in USERS.iter().enumerate().skip(1) {
            clock.set(at(0, 9, k as i64));
            engine
                .register_user(&users[0], &users[k], *name, *role, format!("{id}@example.org"))
                .unwrap();
        }
        Self {
            engine,
            clock,
            users,
            entries: Default::default(),
            requests: Default::default(),
            corrections: Default::default(),
            messages: Default::default(),
        }
    }

    fn entry(&self, item: Item) -> ObjectId {
        self.entries.borrow()[&item].clone()
    }

    fn target(&self, t: &Target) -> ObjectRef {
        match t {
            Target::Entry(i) => ObjectRef::entry(self.entry(*i)),
            Target::Request(r) => ObjectRef::request(self.requests.borrow()[r].clone()),
            Target::Correction(c) => ObjectRef::correction(self.corrections.borrow()[c].clone()),
            Target::Message(m) => ObjectRef::message(self.messages.borrow()[m].clone()),
        }
    }

    fn execute(&self, mut plan: Plan) {
        plan.actions.sort_by_key(|(ts, n, _)| (*ts, *n));
        let e = &self.engine;
        let u = |k: usize| &self.users[k];
        for (ts, _, action) in plan.actions {
            self.clock.set(ts);
            let what = format!("{action:?}");
            let res: Result<(), noosphere_core::EngineError> = (|| {
                match action {
                    Action::Request { req, title, description } => {
                        let r = e.create_request(u(INSTRUCTOR), title, description)?;
                        self.requests.borrow_mut().insert(req, r.id);
                    }
                    Action::Create { item, author, content } => {
                        let new = NewEntry::new(title(item), kind(item), content).with_synonyms(synonyms(item));
                        let created = e.create_entry(u(author), new)?;
                        self.entries.borrow_mut().insert(item, created.id);
                    }
                    Action::Fulfill { req, item, actor } => {
                        let r = self.requests.borrow()[&req].clone();
                        e.fulfill_request(u(actor), &r, &self.entry(item))?;
                    }
                    Action::Orphan { item } => {
                        e.orphan_entry(u(INSTRUCTOR), &self.entry(item))?;
                    }
                    Action::Adopt { item, actor } => {
                        e.adopt_entry(u(actor), &self.entry(item))?;
                    }
                    Action::Revise { item, actor, content } => {
                        e.revise_entry(u(actor), &self.entry(item), content, None)?;
                    }
                    Action::File { corr, item, filer, text, severity } => {
                        let c = e.file_correction(u(filer), &self.entry(item), text, severity)?;
                        self.corrections.borrow_mut().insert(corr, c.id);
                    }
                    Action::Resolve { corr, actor, action, note } => {
                        let c = self.corrections.borrow()[&corr].clone();
                        e.resolve_correction(u(actor), &c, action, note)?;
                    }
                    Action::Review { item, state } => {
                        e.set_review_state(u(INSTRUCTOR), &self.entry(item), state)?;
                    }
                    Action::Post { msg, author, target, subject, body } => {
                        let m = e.post_message(u(author), &self.target(&target), subject, body)?;
                        self.messages.borrow_mut().insert(msg, m.id);
                    }
                    Action::Watch { user, target, channels } => {
                        e.add_watch(u(user), &self.target(&target), channels)?;
                    }
                }
                Ok(())
            })();
            if let Err(err) = res {
                panic!("scenario step failed at {ts}: {what}: {err}");
            }
        }
    }
}
