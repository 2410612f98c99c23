//! A small populated engine for tests and examples.

use std::sync::Arc;

use chrono::{Duration, TimeZone, Utc};

use crate::clock::ManualClock;
use crate::engine::Engine;
use crate::ids::UserId;
use crate::model::Role;

pub struct World {
    pub engine: Engine,
    pub clock: Arc<ManualClock>,
    pub admin: UserId,
    pub instructor: UserId,
    pub auditor: UserId,
    pub students: Vec<UserId>,
}

/// An in-memory engine holding an admin, an instructor, an auditor and
/// `student1`..`student3`, with a manual clock that ticks one minute per call
/// to [`World::tick`].
pub fn world() -> World {
    let start = Utc.with_ymd_and_hms(2003, 1, 6, 9, 0, 0).unwrap();
    let clock = Arc::new(ManualClock::new(start));
    let engine = Engine::in_memory(clock.clone());
    let id = |s: &str| UserId::new(s).unwrap();
    let admin = id("admin");
    engine
        .bootstrap_admin(&admin, "Administrator", "admin@example.org")
        .unwrap();
    let add = |name: &str, role: Role| {
        let user = id(name);
        engine
            .register_user(&admin, &user, name, role, format!("{name}@example.org"))
            .unwrap();
        user
    };
    let instructor = add("instructor", Role::Instructor);
    let auditor = add("auditor", Role::Auditor);
    let students = (1..=3).map(|i| add(&format!("student{i}"), Role::Student)).collect();
    World {
        engine,
        clock,
        admin,
        instructor,
        auditor,
        students,
    }
}

impl World {
    pub fn tick(&self) {
        self.clock.advance(Duration::minutes(1));
    }
}
