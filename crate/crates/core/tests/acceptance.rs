//! Acceptance gate: runs every criterion suite and prints one line each.
//! Exits nonzero if any criterion fails.

use std::path::Path;
use std::process::ExitCode;

use monowick::suites::{self, golden_documents};

fn golden_files_match() -> Result<(), String> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    for doc in golden_documents() {
        let path = dir.join(doc.file);
        let stored = std::fs::read(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        if stored != doc.contents.as_bytes() {
            return Err(format!("{} does not match byte for byte", path.display()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args()
        .skip(1)
        .filter(|a| !a.starts_with('-'))
        .collect();
    let mut failed = Vec::new();
    for suite in suites::all() {
        if !filter.is_empty() && !filter.iter().any(|f| suite.name.contains(f.as_str())) {
            continue;
        }
        let mut report = suite.run();
        if suite.criterion == 12 {
            if let Err(msg) = golden_files_match() {
                report.passed = false;
                report.failed += 1;
                report.failures.push(msg);
            }
        }
        println!("{report}");
        if !report.passed {
            failed.push(report.criterion);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
