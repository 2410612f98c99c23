//! Regenerates the course-run fixtures under `testdata/`.
//!
//! cargo run -p noosphere-core --example gen_fixtures

#[path = "../tests/support/scenario.rs"]
mod scenario;

use std::fs;
use std::path::Path;

fn main() -> std::io::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata");
    let f = scenario::generate();
    fs::write(dir.join("math5190.jsonl"), &f.trial)?;
    fs::write(dir.join("math5190_notes.jsonl"), &f.notes)?;
    fs::write(
        dir.join("math5190.collections.json"),
        serde_json::to_string_pretty(&f.collections)? + "\n",
    )?;
    fs::write(
        dir.join("math5190.meta.json"),
        serde_json::to_string_pretty(&f.meta)? + "\n",
    )?;
    println!(
        "wrote {} + {} bytes of log",
        f.trial.len(),
        f.notes.len() - f.trial.len()
    );
    Ok(())
}
